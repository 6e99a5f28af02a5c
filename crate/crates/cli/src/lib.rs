//! Command-line front end: symbol evaluation, equivalence search,
//! certificates, diagram rendering and operator-model verification.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid input (unreadable or
//! malformed spec, resolution or precondition violation), 4 a verification
//! failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bratteli::equivalence::uhf_supernatural;
use bratteli::{
    certify, find_telescoping_witness, triangular_profile, unitary_equivalence_check, Certificate, Diagram, DimVector,
    DotOptions, OperatorModel, Report, ShiftConvention, SymbolSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "bratteli",
    version,
    about = "Bratteli diagrams and E-matrix symbols of AF algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate and compare symbols.
    #[command(subcommand)]
    Symbol(SymbolCommand),
    /// Search for an isomorphism or non-isomorphism certificate.
    Certify(CertifyArgs),
    /// Draw the Bratteli diagram down to a given level.
    Render(RenderArgs),
    /// Finite-resolution operator model checks.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Subcommand, Debug)]
enum SymbolCommand {
    /// Shape vector at Bratteli level K (level 0 is the root).
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Search for a telescoping witness between two symbols.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Triangular profile and supernatural number of a symbol.
    Invariants {
        #[arg(long)]
        spec: PathBuf,
        /// Number of factors sampled for combinator symbols.
        #[arg(long, default_value_t = 32)]
        horizon: usize,
    },
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Stationary dimension vector of the first symbol, e.g. `inf,2`.
    #[arg(long, requires = "tail_b")]
    tail_a: Option<DimVector>,
    #[arg(long, requires = "tail_a")]
    tail_b: Option<DimVector>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Dot,
    Text,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Label multiplicity-1 edges in DOT output.
    #[arg(long)]
    show_unit: bool,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(short)]
    p: u64,
    #[arg(short)]
    q: u64,
    #[arg(short, default_value_t = 2)]
    s: u64,
    #[arg(long, default_value = "backward")]
    convention: ShiftConvention,
}

#[derive(Subcommand, Debug)]
enum ModelCommand {
    /// Relations and membership identities for every admissible p'.
    Verify(ModelArgs),
    /// E-matrix of the inclusion H_p ⊂ H_pq, read off from ranks.
    Extract(ModelArgs),
    /// Embedding identities of H_p inside H_pq.
    Bemb(ModelArgs),
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<bratteli::Error> for Failure {
    fn from(e: bratteli::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

/// Text on stdout plus the exit code to report.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }

    fn json(value: &Value, passed: bool) -> Self {
        Output {
            text: serde_json::to_string_pretty(value).expect("values serialize"),
            code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
        }
    }
}

fn load_spec(path: &Path) -> Result<SymbolSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn certificate_passes(cert: &Certificate) -> bool {
    match cert {
        Certificate::EquivalentWitness { replay, .. } => replay.verified,
        _ => true,
    }
}

fn symbol(cmd: SymbolCommand) -> Result<Output, Failure> {
    match cmd {
        SymbolCommand::Eval { spec, depth } => {
            let shape = load_spec(&spec)?.level(depth)?;
            Ok(Output::ok(serde_json::to_string(&shape).expect("shapes serialize")))
        }
        SymbolCommand::Equiv { a, b, depth } => {
            let cert = find_telescoping_witness(&load_spec(&a)?, &load_spec(&b)?, depth)?;
            let found = cert.is_equivalent() && certificate_passes(&cert);
            Ok(Output::json(&to_value(&cert), found))
        }
        SymbolCommand::Invariants { spec, horizon } => {
            let spec = load_spec(&spec)?;
            let value = json!({
                "first_index": spec.first_index(),
                "initial_column": to_value(spec.initial_column()),
                "triangular_profile": to_value(&triangular_profile(&spec, horizon)?),
                "supernatural": uhf_supernatural(&spec).map(|s| to_value(&s)),
            });
            Ok(Output::json(&value, true))
        }
    }
}

fn certify_cmd(args: CertifyArgs) -> Result<Output, Failure> {
    let (a, b) = (load_spec(&args.a)?, load_spec(&args.b)?);
    let cert = certify(&a, &b, args.depth)?;
    let mut passed = certificate_passes(&cert);
    let mut value = json!({ "certificate": to_value(&cert) });
    if let (Some(ta), Some(tb)) = (&args.tail_a, &args.tail_b) {
        let unitary = unitary_equivalence_check(&a, ta, &b, tb, args.depth)?;
        passed &= certificate_passes(&unitary);
        value["unitary"] = to_value(&unitary);
    }
    Ok(Output::json(&value, passed))
}

fn render(args: RenderArgs) -> Result<Output, Failure> {
    let spec = load_spec(&args.spec)?;
    let diagram = match args.depth {
        0 => Diagram::unit(),
        d => Diagram::from_symbol(&spec.prefix(d - 1)?)?,
    };
    let text = match args.format {
        Format::Text => diagram.to_text(),
        Format::Dot => diagram.to_dot(DotOptions {
            show_unit: args.show_unit,
        }),
    };
    Ok(Output::ok(text.trim_end().to_string()))
}

fn build_model(args: &ModelArgs) -> Result<OperatorModel, Failure> {
    Ok(OperatorModel::build(args.p, args.q, args.s)?.with_convention(args.convention))
}

fn report_entry(suite: &str, params: Value, report: &Report) -> Value {
    json!({ "suite": suite, "parameters": params, "checks": to_value(report) })
}

fn model(cmd: ModelCommand) -> Result<Output, Failure> {
    match cmd {
        ModelCommand::Verify(args) => {
            let m = build_model(&args)?;
            let r = m.resolution() as u64;
            let mut entries = Vec::new();
            let mut passed = true;
            for pp in (1..=r / 2).filter(|d| r.is_multiple_of(*d)) {
                for (suite, report) in [
                    ("relations", m.verify_relations(pp)?),
                    ("membership", m.verify_membership(pp)?),
                ] {
                    passed &= report.all_pass();
                    entries.push(report_entry(suite, json!({ "p'": pp }), &report));
                }
            }
            let bemb = m.verify_bemb(args.p, args.q)?;
            passed &= bemb.all_pass();
            entries.push(report_entry("bemb", json!({ "p'": args.p, "q'": args.q }), &bemb));
            Ok(Output::json(&Value::Array(entries), passed))
        }
        ModelCommand::Extract(args) => {
            let m = build_model(&args)?;
            let e = m.extract_e_matrix(args.p, args.q)?;
            let (small_a, small_b) = m.multiplicities(args.p)?;
            let (big_a, big_b) = m.multiplicities(args.p * args.q)?;
            let value = json!({
                "p": args.p,
                "q": args.q,
                "s": args.s,
                "e_matrix": to_value(&e),
                "display": e.to_string(),
                "multiplicities": {
                    "small": [small_a.to_string(), small_b.to_string()],
                    "big": [big_a.to_string(), big_b.to_string()],
                },
            });
            Ok(Output::json(&value, true))
        }
        ModelCommand::Bemb(args) => {
            let m = build_model(&args)?;
            let report = m.verify_bemb(args.p, args.q)?;
            Ok(Output::json(&to_value(&report), report.all_pass()))
        }
    }
}

fn dispatch(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Symbol(cmd) => symbol(cmd),
        Command::Certify(args) => certify_cmd(args),
        Command::Render(args) => render(args),
        Command::Model(cmd) => model(cmd),
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli) {
        Ok(output) => {
            let _ = writeln!(out, "{}", output.text);
            if output.code != EXIT_OK {
                let _ = writeln!(err, "bratteli: verification failed");
            }
            output.code
        }
        Err(f) => {
            let _ = writeln!(err, "bratteli: {}", f.message);
            f.code
        }
    }
}
