//! Relations between symbols.
//!
//! Equivalence is only semidecided. Positive answers come with a telescoping
//! [`Witness`] that is replayed independently before it is reported, and
//! negative answers only come from certificates: factor size and rank,
//! mismatched supernatural numbers of UHF symbols, or mismatched dimension
//! vectors for unitary equivalence. Everything else is [`Certificate::Unknown`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ematrix::{DimVector, EMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::supernatural::{factorize, Multiplicity, SupernaturalNumber};
use crate::symbol::{Generator, SymbolSpec};
use crate::triangular::Triangular;

/// Per-row and per-matrix caps on enumerated intertwiner candidates.
const ROW_CANDIDATE_LIMIT: usize = 512;
const MATRIX_CANDIDATE_LIMIT: usize = 64;
const COMBINATION_BUDGET: usize = 100_000;

/// Solves `X · c_prev = target` for an admissible non-negative integer `X`.
///
/// When `c_prev` has full row rank the solution is unique and is found by
/// exact rational elimination. Otherwise rows are enumerated with entries
/// at most `entry_bound`.
pub fn solve_intertwiner(c_prev: &EMatrix, target: &EMatrix, entry_bound: &BigUint) -> Result<Option<EMatrix>> {
    Ok(intertwiner_candidates(c_prev, target, entry_bound, 1)?
        .into_iter()
        .next())
}

/// Up to `limit` admissible solutions of `X · c_prev = target`, in a fixed
/// deterministic order that favours weight on the diagonal.
pub fn intertwiner_candidates(
    c_prev: &EMatrix,
    target: &EMatrix,
    entry_bound: &BigUint,
    limit: usize,
) -> Result<Vec<EMatrix>> {
    if target.cols() != c_prev.cols() {
        return Err(Error::shape("solve_intertwiner", target.shape(), c_prev.shape()));
    }
    if limit == 0 {
        return Ok(Vec::new());
    }
    if c_prev.rank_over_rationals() == c_prev.rows() {
        return Ok(unique_solution(c_prev, target).into_iter().collect());
    }
    let bound = entry_bound.to_u64().unwrap_or(u64::MAX);
    let mut rows: Vec<Vec<Vec<u64>>> = match (0..target.rows())
        .map(|i| row_solutions(c_prev, target.row_slice(i), bound))
        .collect::<Option<Vec<_>>>()
    {
        Some(rows) => rows,
        None => return Ok(Vec::new()),
    };
    // Try diagonal-heavy rows first so identity-like intertwiners come early.
    for (i, cands) in rows.iter_mut().enumerate() {
        cands.sort_by_key(|x| std::cmp::Reverse(x.get(i).copied().unwrap_or(0)));
    }
    Ok(combine_rows(&rows, c_prev.rows(), limit))
}

fn to_rational(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

fn unique_solution(c_prev: &EMatrix, target: &EMatrix) -> Option<EMatrix> {
    // X·C = T  ⇔  Cᵀ·Xᵀ = Tᵀ, and Cᵀ has full column rank.
    let ct: Vec<Vec<BigRational>> = (0..c_prev.cols())
        .map(|j| (0..c_prev.rows()).map(|i| to_rational(c_prev.get(i, j))).collect())
        .collect();
    let tt: Vec<Vec<BigRational>> = (0..target.cols())
        .map(|j| (0..target.rows()).map(|i| to_rational(target.get(i, j))).collect())
        .collect();
    let xt = linalg::solve_full_column_rank(&ct, &tt)?;
    let mut data = Vec::with_capacity(target.rows() * c_prev.rows());
    for i in 0..target.rows() {
        for row in &xt {
            let v = &row[i];
            if !v.is_integer() || v.is_negative() {
                return None;
            }
            data.push(v.to_integer().to_biguint().expect("non-negative"));
        }
    }
    let x = EMatrix::from_vec(target.rows(), c_prev.rows(), data).ok()?;
    x.is_admissible().then_some(x)
}

/// All non-negative integer rows `x` with `x · c = t` and entries `≤ bound`,
/// in descending lexicographic order; `None` if there are none.
fn row_solutions(c: &EMatrix, t: &[BigUint], bound: u64) -> Option<Vec<Vec<u64>>> {
    let k = c.rows();
    let mut out = Vec::new();
    let mut x = vec![0u64; k];
    let mut partial: Vec<BigUint> = vec![BigUint::zero(); t.len()];
    enumerate_row(c, t, bound, 0, &mut x, &mut partial, &mut out);
    (!out.is_empty()).then_some(out)
}

fn enumerate_row(
    c: &EMatrix,
    t: &[BigUint],
    bound: u64,
    var: usize,
    x: &mut Vec<u64>,
    partial: &mut Vec<BigUint>,
    out: &mut Vec<Vec<u64>>,
) {
    if out.len() >= ROW_CANDIDATE_LIMIT {
        return;
    }
    let k = c.rows();
    let row = c.row_slice(var);
    if var + 1 == k {
        // The last variable is determined by any column where it appears.
        let mut value: Option<BigUint> = None;
        for j in 0..t.len() {
            let rest = &t[j] - &partial[j];
            if row[j].is_zero() {
                if !rest.is_zero() {
                    return;
                }
                continue;
            }
            if !(&rest % &row[j]).is_zero() {
                return;
            }
            let q = rest / &row[j];
            match &value {
                Some(v) if *v != q => return,
                _ => value = Some(q),
            }
        }
        let v = value.unwrap_or_default();
        let Some(v) = v.to_u64().filter(|&v| v <= bound) else {
            return;
        };
        x[var] = v;
        out.push(x.clone());
        x[var] = 0;
        return;
    }
    // Largest value that keeps every partial sum within the target.
    let mut hi = bound;
    for j in 0..t.len() {
        if !row[j].is_zero() {
            let room = (&t[j] - &partial[j]) / &row[j];
            hi = hi.min(room.to_u64().unwrap_or(u64::MAX));
        }
    }
    for v in (0..=hi).rev() {
        let add: Vec<BigUint> = row.iter().map(|e| e * v).collect();
        for j in 0..t.len() {
            partial[j] += &add[j];
        }
        x[var] = v;
        enumerate_row(c, t, bound, var + 1, x, partial, out);
        for j in 0..t.len() {
            partial[j] -= &add[j];
        }
        if out.len() >= ROW_CANDIDATE_LIMIT {
            break;
        }
    }
    x[var] = 0;
}

/// Picks one solution per row so that every column of `X` is non-zero.
fn combine_rows(rows: &[Vec<Vec<u64>>], ncols: usize, limit: usize) -> Vec<EMatrix> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(rows.len());
    let mut budget = COMBINATION_BUDGET;
    combine(
        rows,
        ncols,
        limit,
        &mut pick,
        &mut vec![0usize; ncols],
        &mut budget,
        &mut out,
    );
    out
}

fn combine(
    rows: &[Vec<Vec<u64>>],
    ncols: usize,
    limit: usize,
    pick: &mut Vec<usize>,
    cover: &mut Vec<usize>,
    budget: &mut usize,
    out: &mut Vec<EMatrix>,
) {
    if out.len() >= limit || *budget == 0 {
        return;
    }
    *budget -= 1;
    let i = pick.len();
    if i == rows.len() {
        if cover.iter().all(|&c| c > 0) {
            let data = pick
                .iter()
                .enumerate()
                .flat_map(|(r, &p)| rows[r][p].iter().map(|&v| BigUint::from(v)))
                .collect();
            out.push(EMatrix::from_vec(rows.len(), ncols, data).expect("consistent shape"));
        }
        return;
    }
    for (p, cand) in rows[i].iter().enumerate() {
        if cand.iter().all(|&v| v == 0) {
            continue;
        }
        for (j, &v) in cand.iter().enumerate() {
            cover[j] += usize::from(v > 0);
        }
        pick.push(p);
        combine(rows, ncols, limit, pick, cover, budget, out);
        pick.pop();
        for (j, &v) in cand.iter().enumerate() {
            cover[j] -= usize::from(v > 0);
        }
        if out.len() >= limit || *budget == 0 {
            return;
        }
    }
}

/// Interleaving matrices `C₀, C₁, …, C_{2d−1}` and cut positions
/// `r₁ < … < r_d`, `m₁ < … < m_d` into the sequences `A₀, A₁, …` and
/// `B₀, B₁, …` (index 0 is the initial column).
///
/// The defining equations are `C₀ = ∏_{i<r₁} Aᵢ`,
/// `C_{2n−1}C_{2n−2} = ∏_{m_{n−1} ≤ i < m_n} Bᵢ` and
/// `C_{2n}C_{2n−1} = ∏_{r_n ≤ i < r_{n+1}} Aᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub c: Vec<EMatrix>,
    pub r_cuts: Vec<usize>,
    pub m_cuts: Vec<usize>,
}

/// Outcome of re-multiplying a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replay {
    pub verified: bool,
    /// Number of `A` (resp. `B`) matrices consumed, column included.
    pub a_length: usize,
    pub b_length: usize,
    /// SHA-256 of the JSON of `∏_{i<a_length} Aᵢ` and `∏_{i<b_length} Bᵢ`.
    pub a_product_sha256: String,
    pub b_product_sha256: String,
}

fn block(seq: &[EMatrix], start: usize, end: usize) -> Result<EMatrix> {
    let mut acc = seq[start].clone();
    for m in &seq[start + 1..end] {
        acc = m.multiply(&acc)?;
    }
    Ok(acc)
}

fn sha256_of(m: &EMatrix) -> String {
    let json = serde_json::to_string(m).expect("matrices serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

impl Witness {
    pub fn depth(&self) -> usize {
        self.r_cuts.len()
    }

    /// Checks every defining equation by direct multiplication against the
    /// given sequences (column first). Returns a description of the first
    /// violated condition.
    pub fn check(&self, a_seq: &[EMatrix], b_seq: &[EMatrix]) -> std::result::Result<(), String> {
        let d = self.r_cuts.len();
        if self.m_cuts.len() != d || self.c.len() != 2 * d || d == 0 {
            return Err(format!(
                "inconsistent witness sizes: {} C's, {} r-cuts, {} m-cuts",
                self.c.len(),
                d,
                self.m_cuts.len()
            ));
        }
        for (name, cuts, seq) in [("r", &self.r_cuts, a_seq), ("m", &self.m_cuts, b_seq)] {
            if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts[0] == 0 {
                return Err(format!("{name}-cuts {cuts:?} are not strictly increasing from 0"));
            }
            if cuts[d - 1] > seq.len() {
                return Err(format!(
                    "{name}-cut {} exceeds the {} available matrices",
                    cuts[d - 1],
                    seq.len()
                ));
            }
        }
        if let Some((i, c)) = self.c.iter().enumerate().find(|(_, c)| !c.is_admissible()) {
            return Err(format!("C{i} = {c} is not admissible"));
        }
        let eq = |lhs: Result<EMatrix>, rhs: Result<EMatrix>, what: String| -> std::result::Result<(), String> {
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => Ok(()),
                (Ok(l), Ok(r)) => Err(format!("{what}: {l} ≠ {r}")),
                (Err(e), _) | (_, Err(e)) => Err(format!("{what}: {e}")),
            }
        };
        eq(
            Ok(self.c[0].clone()),
            block(a_seq, 0, self.r_cuts[0]),
            "C0 = A-block 1".into(),
        )?;
        for n in 1..=d {
            let m_start = if n == 1 { 0 } else { self.m_cuts[n - 2] };
            eq(
                self.c[2 * n - 1].multiply(&self.c[2 * n - 2]),
                block(b_seq, m_start, self.m_cuts[n - 1]),
                format!("C{}·C{} = B-block {n}", 2 * n - 1, 2 * n - 2),
            )?;
            if n < d {
                eq(
                    self.c[2 * n].multiply(&self.c[2 * n - 1]),
                    block(a_seq, self.r_cuts[n - 1], self.r_cuts[n]),
                    format!("C{}·C{} = A-block {}", 2 * n, 2 * n - 1, n + 1),
                )?;
            }
        }
        Ok(())
    }

    /// Regenerates both prefixes from the specs and replays the witness.
    pub fn replay(&self, a: &SymbolSpec, b: &SymbolSpec) -> Result<Replay> {
        let a_len = self.r_cuts.last().copied().unwrap_or(0);
        let b_len = self.m_cuts.last().copied().unwrap_or(0);
        let a_seq = spec_sequence(a, a_len)?;
        let b_seq = spec_sequence(b, b_len)?;
        let verified = a_seq.len() == a_len && b_seq.len() == b_len && self.check(&a_seq, &b_seq).is_ok();
        let hash = |seq: &[EMatrix]| -> Result<String> {
            Ok(match seq.len() {
                0 => String::new(),
                n => sha256_of(&block(seq, 0, n)?),
            })
        };
        Ok(Replay {
            verified,
            a_length: a_len,
            b_length: b_len,
            a_product_sha256: hash(&a_seq)?,
            b_product_sha256: hash(&b_seq)?,
        })
    }
}

/// The column followed by up to `count − 1` factors.
fn spec_sequence(spec: &SymbolSpec, count: usize) -> Result<Vec<EMatrix>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut seq = vec![spec.initial_column().clone()];
    for f in spec.factors().take(count - 1) {
        seq.push(f?);
    }
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Reason {
    /// Eventually all factors are square of different fixed sizes with full
    /// rank; `sampled_*` counts the factors checked.
    SizeRank {
        size_a: usize,
        size_b: usize,
        sampled_a: usize,
        sampled_b: usize,
    },
    /// Two UHF symbols with different supernatural numbers.
    SupernaturalMismatch {
        a: SupernaturalNumber,
        b: SupernaturalNumber,
    },
    /// The finite entries of the declared dimension vectors differ, so no
    /// unitary carries one represented algebra onto the other.
    DimensionVector { tail_a: DimVector, tail_b: DimVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Certificate {
    EquivalentWitness { witness: Witness, replay: Replay },
    NonIsomorphic { reason: Reason },
    SubAlgebraOnly { failed_at: u64 },
    Unknown { note: String },
}

impl Certificate {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Certificate::EquivalentWitness { .. })
    }

    pub fn is_non_isomorphic(&self) -> bool {
        matches!(self, Certificate::NonIsomorphic { .. })
    }

    fn unknown(note: impl Into<String>) -> Self {
        Certificate::Unknown { note: note.into() }
    }
}

/// Bounds for [`find_telescoping_witness_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Number of A-blocks (and of B-blocks) in the witness.
    pub depth: usize,
    /// Maximal number of matrices in one block.
    pub width: usize,
    /// Maximal number of candidate `C` matrices tried overall.
    pub node_budget: usize,
}

impl SearchBounds {
    pub fn new(depth: usize) -> Self {
        SearchBounds {
            depth,
            width: depth.max(1),
            node_budget: 200_000,
        }
    }
}

/// [`find_telescoping_witness_with`] with default width and budget.
pub fn find_telescoping_witness(a: &SymbolSpec, b: &SymbolSpec, depth: usize) -> Result<Certificate> {
    find_telescoping_witness_with(a, b, SearchBounds::new(depth))
}

/// Depth-first search for a telescoping witness, shorter blocks first, so
/// the first witness found has the lexicographically smallest interleaved
/// cut sequence. The witness is replayed before it is returned.
pub fn find_telescoping_witness_with(a: &SymbolSpec, b: &SymbolSpec, bounds: SearchBounds) -> Result<Certificate> {
    if bounds.depth == 0 {
        return Ok(Certificate::unknown("depth 0 admits no witness"));
    }
    let horizon = bounds.depth * bounds.width + 1;
    let mut search = Search {
        a_seq: spec_sequence(a, horizon)?,
        b_seq: spec_sequence(b, horizon)?,
        bounds,
        budget: bounds.node_budget,
        c: Vec::new(),
        r: Vec::new(),
        m: Vec::new(),
    };
    if !search.dfs()? {
        let note = if search.budget == 0 {
            format!("search budget of {} candidates exhausted", bounds.node_budget)
        } else {
            format!("no witness with {} blocks of width ≤ {}", bounds.depth, bounds.width)
        };
        return Ok(Certificate::unknown(note));
    }
    let witness = Witness {
        c: search.c,
        r_cuts: search.r,
        m_cuts: search.m,
    };
    let replay = witness.replay(a, b)?;
    if !replay.verified {
        return Ok(Certificate::unknown("candidate witness failed replay"));
    }
    Ok(Certificate::EquivalentWitness { witness, replay })
}

struct Search {
    a_seq: Vec<EMatrix>,
    b_seq: Vec<EMatrix>,
    bounds: SearchBounds,
    budget: usize,
    c: Vec<EMatrix>,
    r: Vec<usize>,
    m: Vec<usize>,
}

impl Search {
    fn dfs(&mut self) -> Result<bool> {
        let step = self.c.len();
        if step == 2 * self.bounds.depth {
            return Ok(true);
        }
        let a_side = step.is_multiple_of(2);
        let (seq_len, start) = if a_side {
            (self.a_seq.len(), self.r.last().copied().unwrap_or(0))
        } else {
            (self.b_seq.len(), self.m.last().copied().unwrap_or(0))
        };
        let max_end = seq_len.min(start + self.bounds.width);
        for end in start + 1..=max_end {
            let seq = if a_side { &self.a_seq } else { &self.b_seq };
            let target = block(seq, start, end)?;
            let candidates = match self.c.last() {
                None => vec![target],
                Some(prev) => {
                    let bound = target.max_entry();
                    intertwiner_candidates(prev, &target, &bound, MATRIX_CANDIDATE_LIMIT)?
                }
            };
            for x in candidates {
                if self.budget == 0 {
                    return Ok(false);
                }
                self.budget -= 1;
                self.c.push(x);
                if a_side {
                    self.r.push(end)
                } else {
                    self.m.push(end)
                }
                if self.dfs()? {
                    return Ok(true);
                }
                self.c.pop();
                if a_side {
                    self.r.pop()
                } else {
                    self.m.pop()
                };
            }
        }
        Ok(false)
    }
}

/// The supernatural number of a symbol built only from 1×1 factors, when it
/// can be determined exactly.
pub fn uhf_supernatural(spec: &SymbolSpec) -> Option<SupernaturalNumber> {
    let col = spec.initial_column();
    if col.shape() != (1, 1) {
        return None;
    }
    let c = col.get(0, 0);
    let s = match spec.generator() {
        Generator::Uhf(s) => s.multiply_by(c).ok()?,
        Generator::Explicit { factors, periodic } => {
            if factors.iter().any(|f| f.shape() != (1, 1)) {
                return None;
            }
            if *periodic {
                let mut primes = std::collections::BTreeMap::new();
                for f in factors {
                    for (p, _) in factorize(f.get(0, 0)) {
                        primes.insert(p, Multiplicity::Infinite);
                    }
                }
                SupernaturalNumber::from_parts(primes, Multiplicity::ZERO)
                    .ok()?
                    .multiply_by(c)
                    .ok()?
            } else {
                let total: BigUint = factors.iter().map(|f| f.get(0, 0)).product::<BigUint>() * c;
                SupernaturalNumber::from_biguint(&total).ok()?
            }
        }
        Generator::ScalarAmplify(m, inner) => uhf_supernatural(inner)?.multiply_by(m).ok()?,
        Generator::Tensor(x, y) => uhf_supernatural(x)?.multiply(&uhf_supernatural(y)?),
        _ => return None,
    };
    Some(s)
}

/// Factor size and rank certificate.
///
/// Leading factors that are not square of the eventual size are absorbed
/// into the column. If from there on every sampled factor (up to `depth`)
/// is `N×N` with rank `N` on one side and `N′×N′` with rank `N′` on the
/// other, with `N ≠ N′`, the algebras are not isomorphic. UHF symbols with
/// exactly known, different supernatural numbers are also separated.
pub fn nonisomorphism_certificate(a: &SymbolSpec, b: &SymbolSpec, depth: usize) -> Result<Certificate> {
    if let (Some(sa), Some(sb)) = (uhf_supernatural(a), uhf_supernatural(b)) {
        if sa != sb {
            return Ok(Certificate::NonIsomorphic {
                reason: Reason::SupernaturalMismatch { a: sa, b: sb },
            });
        }
        return Ok(Certificate::unknown("equal supernatural numbers"));
    }
    let (Some((size_a, sampled_a)), Some((size_b, sampled_b))) = (eventual_size(a, depth)?, eventual_size(b, depth)?)
    else {
        return Ok(Certificate::unknown("factors are not eventually square with full rank"));
    };
    if size_a == size_b {
        return Ok(Certificate::unknown(format!("both symbols have factor size {size_a}")));
    }
    Ok(Certificate::NonIsomorphic {
        reason: Reason::SizeRank {
            size_a,
            size_b,
            sampled_a,
            sampled_b,
        },
    })
}

/// `(N, sampled)` when the sampled tail of factors is square `N×N` with
/// rank `N`.
fn eventual_size(spec: &SymbolSpec, depth: usize) -> Result<Option<(usize, usize)>> {
    let factors = spec.factors().take(depth).collect::<Result<Vec<_>>>()?;
    let Some(last) = factors.last() else { return Ok(None) };
    let n = last.rows();
    // Tail of square n×n factors; everything before it is folded into the column.
    let tail_start = factors.iter().rposition(|f| f.shape() != (n, n)).map_or(0, |i| i + 1);
    let tail = &factors[tail_start..];
    if tail.iter().any(|f| f.rank_over_rationals() != n) {
        return Ok(None);
    }
    Ok(Some((n, tail.len())))
}

/// Compares declared dimension-vector tails.
///
/// Each tail must be stationary under the sampled factors,
/// `qᵀ·Eₙ = qᵀ` in `ℕ ∪ {∞}`. When the multisets of finite entries differ
/// the represented algebras are not unitarily equivalent.
pub fn unitary_equivalence_check(
    a: &SymbolSpec,
    tail_a: &DimVector,
    b: &SymbolSpec,
    tail_b: &DimVector,
    depth: usize,
) -> Result<Certificate> {
    check_tail(a, tail_a, depth, "a")?;
    check_tail(b, tail_b, depth, "b")?;
    if tail_a.finite_multiset() != tail_b.finite_multiset() {
        return Ok(Certificate::NonIsomorphic {
            reason: Reason::DimensionVector {
                tail_a: tail_a.clone(),
                tail_b: tail_b.clone(),
            },
        });
    }
    Ok(Certificate::unknown("dimension vectors agree"))
}

fn check_tail(spec: &SymbolSpec, tail: &DimVector, depth: usize, side: &str) -> Result<()> {
    for (pos, f) in spec.factors().take(depth).enumerate() {
        let f = f?;
        if f.rows() != tail.len() || f.cols() != tail.len() {
            return Err(Error::Precondition(format!(
                "{side}: factor {pos} is {}×{}, tail has {} entries",
                f.rows(),
                f.cols(),
                tail.len()
            )));
        }
        let back = f.propagate_dim(tail)?;
        if &back != tail {
            return Err(Error::Precondition(format!(
                "{side}: declared tail {} is not stationary at factor {pos}: qᵀE = {}",
                fmt_dims(tail),
                fmt_dims(&back)
            )));
        }
    }
    Ok(())
}

fn fmt_dims(v: &DimVector) -> String {
    let parts: Vec<String> = v.entries().iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Runs the isomorphism certificates in turn: size/rank and supernatural
/// obstructions first, then the witness search.
pub fn certify(a: &SymbolSpec, b: &SymbolSpec, depth: usize) -> Result<Certificate> {
    let cert = nonisomorphism_certificate(a, b, depth)?;
    if cert.is_non_isomorphic() {
        return Ok(cert);
    }
    find_telescoping_witness(a, b, depth)
}

/// A commutative semigroup inside the triangular family, enumerated as
/// `A₁, A₂, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Semigroup {
    /// `{T(n,1) : n ≥ 1}` with `A_p = T(p,1)`.
    UnitSecondParameter,
    /// `{T(a,b) : a ≥ b ≥ 1}`, enumerated with `a` outer and `b` inner.
    Maximal,
}

impl Semigroup {
    pub fn element(self, p: u64) -> Triangular {
        match self {
            Semigroup::UnitSecondParameter => Triangular::new(p, 1u32).expect("p ≥ 1"),
            Semigroup::Maximal => {
                let (mut a, mut rest) = (1u64, p - 1);
                while rest >= a {
                    rest -= a;
                    a += 1;
                }
                Triangular::new(a, rest + 1).expect("b ≤ a")
            }
        }
    }

    /// Position of `t` in the enumeration, or `None` if `t` is not a member.
    pub fn index_of(self, t: &Triangular) -> Option<BigUint> {
        match self {
            Semigroup::UnitSecondParameter => (t.b == BigUint::from(1u32)).then(|| t.a.clone()),
            Semigroup::Maximal => {
                let a = &t.a;
                Some(a * (a - 1u32) / 2u32 + &t.b)
            }
        }
    }

    pub fn contains(self, t: &Triangular) -> bool {
        self.index_of(t).is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaBounds {
    pub max_p: u64,
    pub max_s: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaWitness {
    pub p: u64,
    /// Index of `A_r` in the semigroup enumeration.
    #[serde(with = "crate::ematrix::decimal")]
    pub r: BigUint,
    pub s: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum SigmaOutcome {
    HoldsUpTo { p: u64, witnesses: Vec<SigmaWitness> },
    FailsAt { p: u64 },
}

impl SigmaOutcome {
    /// A failure of the condition leaves only the sub-algebra inclusion.
    pub fn to_certificate(&self) -> Certificate {
        match self {
            SigmaOutcome::FailsAt { p } => Certificate::SubAlgebraOnly { failed_at: *p },
            SigmaOutcome::HoldsUpTo { p, .. } => Certificate::unknown(format!("condition (σ) holds for every p ≤ {p}")),
        }
    }
}

/// Checks `A_p A_r = ∏_{i≤s} Bᵢ` for every `p ≤ max_p`, searching `s ≤ max_s`.
///
/// In the triangular family the identity reads `(a_p a_r, b_p b_r) =
/// (∏ aᵢ, ∏ bᵢ)`, so `A_r` is the exact quotient of the prefix product by
/// `A_p` whenever it exists and lies in the semigroup.
pub fn sigma_check(semigroup: Semigroup, chosen: &[EMatrix], bounds: SigmaBounds) -> Result<SigmaOutcome> {
    let mut prefix = Vec::with_capacity(chosen.len().min(bounds.max_s));
    let mut acc = Triangular::new(1u32, 1u32).expect("identity");
    for (i, m) in chosen.iter().enumerate() {
        let t = Triangular::from_matrix(m)
            .filter(|t| semigroup.contains(t))
            .ok_or_else(|| Error::Precondition(format!("B-factor {i} = {m} is outside the semigroup")))?;
        if i < bounds.max_s {
            acc = acc.multiply(&t);
            prefix.push(acc.clone());
        }
    }
    let mut witnesses = Vec::new();
    for p in 1..=bounds.max_p {
        let ap = semigroup.element(p);
        let found = prefix.iter().enumerate().find_map(|(i, prod)| {
            let quotient = exact_quotient(prod, &ap)?;
            semigroup.index_of(&quotient).map(|r| SigmaWitness { p, r, s: i + 1 })
        });
        match found {
            Some(w) => witnesses.push(w),
            None => return Ok(SigmaOutcome::FailsAt { p }),
        }
    }
    Ok(SigmaOutcome::HoldsUpTo {
        p: bounds.max_p,
        witnesses,
    })
}

fn exact_quotient(prod: &Triangular, by: &Triangular) -> Option<Triangular> {
    if !(&prod.a % &by.a).is_zero() || !(&prod.b % &by.b).is_zero() {
        return None;
    }
    Triangular::new(&prod.a / &by.a, &prod.b / &by.b)
}
