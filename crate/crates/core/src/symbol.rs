//! Glimm-Bratteli symbols `∏ₙ Eₙ · A₀` as lazily generated factor sequences.
//!
//! A [`SymbolSpec`] is a closed-form rule: it never materializes an infinite
//! list, and every consumer asks for an explicit number of factors. Finite
//! prefixes are [`FiniteSymbol`] values, which is where telescoping lives.
//!
//! Factors have two indexings. [`SymbolSpec::factor`] uses the family's own
//! multiplier (the F family starts at `n = 2`, the K₁ and UHF families at
//! `n = 1`, explicit lists at `0`), while [`SymbolSpec::factor_at`] is the
//! plain position in the product, starting at 0 next to the column.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ematrix::{EMatrix, ShapeVector};
use crate::error::{Error, Result};
use crate::supernatural::{Multiplicity, SupernaturalNumber};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// A finite list, or a list repeated forever when `periodic`.
    Explicit {
        factors: Vec<EMatrix>,
        periodic: bool,
    },
    /// `[[n,0],[n−1,1]]^{⊗N}` for `n ≥ 2`.
    FFamily {
        n: u32,
    },
    /// The constant factor `[[1,0],[1,1]]`.
    KOne,
    /// The 1×1 factors `p₁, p₁p₂, …` whose product is the supernatural number.
    Uhf(SupernaturalNumber),
    /// `∏_{n≥1} ∏_{m=1..n} [[n,0],[n−m,m]]`, flattened with `n` outer and `m`
    /// inner ascending.
    F1Extended,
    Tensor(Box<SymbolSpec>, Box<SymbolSpec>),
    DirectSum(Box<SymbolSpec>, Box<SymbolSpec>),
    ScalarAmplify(BigUint, Box<SymbolSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct SymbolSpec {
    initial_column: EMatrix,
    generator: Generator,
}

fn unit_pair() -> EMatrix {
    EMatrix::column([1u32, 1])
}

fn check_column(col: &EMatrix) -> Result<()> {
    if !col.is_column() || col.entries().iter().any(Zero::is_zero) {
        return Err(Error::InvalidSpec(format!(
            "initial column must be a k×1 matrix with positive entries, got {col}"
        )));
    }
    Ok(())
}

impl SymbolSpec {
    /// `F_{N,M}` with column `(1,1)^{⊗N}`.
    pub fn f_family(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("FFamily needs N ≥ 1".into()));
        }
        Ok(SymbolSpec {
            initial_column: unit_pair().kronecker_power(n),
            generator: Generator::FFamily { n },
        })
    }

    /// `[[1,0],[1,1]]^∞ (1,1)ᵀ`.
    pub fn k_one() -> Self {
        SymbolSpec {
            initial_column: unit_pair(),
            generator: Generator::KOne,
        }
    }

    pub fn uhf(s: SupernaturalNumber) -> Self {
        SymbolSpec {
            initial_column: EMatrix::scalar(1u32),
            generator: Generator::Uhf(s),
        }
    }

    pub fn f1_extended() -> Self {
        SymbolSpec {
            initial_column: unit_pair(),
            generator: Generator::F1Extended,
        }
    }

    pub fn explicit(initial_column: EMatrix, factors: Vec<EMatrix>, periodic: bool) -> Result<Self> {
        check_column(&initial_column)?;
        if periodic && factors.is_empty() {
            return Err(Error::InvalidSpec("a periodic list needs at least one factor".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if !f.is_admissible() {
                return Err(Error::InvalidSpec(format!("factor {i} = {f} is not admissible")));
            }
        }
        chain_check(&initial_column, &factors)?;
        if periodic {
            let (first, last) = (&factors[0], &factors[factors.len() - 1]);
            if first.cols() != last.rows() {
                return Err(Error::InvalidSpec(format!(
                    "period does not close: last factor has {} rows, first expects {}",
                    last.rows(),
                    first.cols()
                )));
            }
        }
        Ok(SymbolSpec {
            initial_column,
            generator: Generator::Explicit { factors, periodic },
        })
    }

    pub fn tensor(a: SymbolSpec, b: SymbolSpec) -> Self {
        SymbolSpec {
            initial_column: a.initial_column.kronecker(&b.initial_column),
            generator: Generator::Tensor(Box::new(a), Box::new(b)),
        }
    }

    /// Direct sum over the column `(1,1)ᵀ`: the first factor is `a₀ ⊕ b₀`
    /// (the two initial columns), dropped when both are `(1)`, followed by
    /// the blockwise sums `Aₙ ⊕ Bₙ`.
    pub fn direct_sum(a: SymbolSpec, b: SymbolSpec) -> Self {
        SymbolSpec {
            initial_column: unit_pair(),
            generator: Generator::DirectSum(Box::new(a), Box::new(b)),
        }
    }

    pub fn scalar_amplify(m: BigUint, inner: SymbolSpec) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::InvalidSpec("amplification factor must be positive".into()));
        }
        Ok(SymbolSpec {
            initial_column: inner.initial_column.scale(&m),
            generator: Generator::ScalarAmplify(m, Box::new(inner)),
        })
    }

    /// Replaces the initial column of a base family or explicit list. The
    /// column of a combinator is derived from its parts and cannot be set.
    pub fn with_initial_column(mut self, col: EMatrix) -> Result<Self> {
        check_column(&col)?;
        if self.is_combinator() {
            if col != self.initial_column {
                return Err(Error::InvalidSpec(format!(
                    "combinator column is derived as {}, got {col}",
                    self.initial_column
                )));
            }
            return Ok(self);
        }
        if col.rows() != self.initial_column.rows() {
            return Err(Error::InvalidSpec(format!(
                "initial column needs {} rows, got {}",
                self.initial_column.rows(),
                col.rows()
            )));
        }
        self.initial_column = col;
        Ok(self)
    }

    fn is_combinator(&self) -> bool {
        matches!(
            self.generator,
            Generator::Tensor(..) | Generator::DirectSum(..) | Generator::ScalarAmplify(..)
        )
    }

    pub fn initial_column(&self) -> &EMatrix {
        &self.initial_column
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// The family's own index of the factor at position 0.
    pub fn first_index(&self) -> u64 {
        match &self.generator {
            Generator::Explicit { .. } | Generator::DirectSum(..) => 0,
            Generator::FFamily { .. } => 2,
            Generator::KOne | Generator::Uhf(_) | Generator::F1Extended => 1,
            Generator::Tensor(a, _) => a.first_index(),
            Generator::ScalarAmplify(_, inner) => inner.first_index(),
        }
    }

    /// Number of factors, or `None` for an infinite symbol.
    pub fn len(&self) -> Option<usize> {
        match &self.generator {
            Generator::Explicit { factors, periodic } => (!periodic).then_some(factors.len()),
            Generator::FFamily { .. } | Generator::KOne | Generator::Uhf(_) | Generator::F1Extended => None,
            Generator::Tensor(a, b) => min_len(a.len(), b.len()),
            Generator::DirectSum(a, b) => {
                min_len(a.len(), b.len()).map(|n| n + usize::from(dsum_has_column_factor(a, b)))
            }
            Generator::ScalarAmplify(_, inner) => inner.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// The factor at position `pos` of the product (0 is the one applied
    /// directly to the initial column).
    pub fn factor_at(&self, pos: usize) -> Result<EMatrix> {
        if let Some(len) = self.len() {
            if pos >= len {
                return Err(Error::IndexOutOfRange {
                    index: pos as u64 + self.first_index(),
                    range: format!("{} factors from index {}", len, self.first_index()),
                });
            }
        }
        Ok(match &self.generator {
            Generator::Explicit { factors, .. } => factors[pos % factors.len()].clone(),
            Generator::FFamily { n } => f_factor(pos as u64 + 2).kronecker_power(*n),
            Generator::KOne => EMatrix::from_u64(&[&[1, 0], &[1, 1]]),
            Generator::Uhf(s) => EMatrix::scalar(uhf_step(s, pos + 1)),
            Generator::F1Extended => {
                let (n, m) = f1_extended_pair(pos as u64);
                triangular_matrix(n, m)
            }
            Generator::Tensor(a, b) => a.factor_at(pos)?.kronecker(&b.factor_at(pos)?),
            Generator::DirectSum(a, b) => {
                let offset = usize::from(dsum_has_column_factor(a, b));
                if pos < offset {
                    a.initial_column.direct_sum(&b.initial_column)
                } else {
                    a.factor_at(pos - offset)?.direct_sum(&b.factor_at(pos - offset)?)
                }
            }
            Generator::ScalarAmplify(_, inner) => inner.factor_at(pos)?,
        })
    }

    /// The factor with the family's own index `n`.
    pub fn factor(&self, n: u64) -> Result<EMatrix> {
        let first = self.first_index();
        if n < first {
            return Err(Error::IndexOutOfRange {
                index: n,
                range: format!("indices start at {first}"),
            });
        }
        let pos = usize::try_from(n - first).map_err(|_| Error::IndexOutOfRange {
            index: n,
            range: "position exceeds the address space".into(),
        })?;
        self.factor_at(pos)
    }

    /// Iterator over the factors in product order, stopping at the end of a
    /// finite symbol.
    pub fn factors(&self) -> impl Iterator<Item = Result<EMatrix>> + '_ {
        let end = self.len().unwrap_or(usize::MAX);
        (0..end).map(move |pos| self.factor_at(pos))
    }

    /// The first `k` factors over the initial column.
    pub fn prefix(&self, k: usize) -> Result<FiniteSymbol> {
        let factors = self.factors().take(k).collect::<Result<Vec<_>>>()?;
        if factors.len() < k {
            return Err(Error::IndexOutOfRange {
                index: k as u64,
                range: format!("symbol has only {} factors", factors.len()),
            });
        }
        Ok(FiniteSymbol {
            initial_column: self.initial_column.clone(),
            factors,
        })
    }

    /// `∏_{i<k} E_i · A₀` as a shape vector; `.to_column()` gives the column.
    pub fn partial_product(&self, k: usize) -> Result<ShapeVector> {
        let mut shape = ShapeVector::try_from(&self.initial_column)?;
        for f in self.factors().take(k) {
            shape = f?.apply_to_shape(&shape)?;
        }
        Ok(shape)
    }

    /// Bratteli level `n`: level 0 is the root `C^{1×1}`, level 1 the
    /// initial column, level `n+1` the partial product of `n` factors.
    pub fn level(&self, n: usize) -> Result<ShapeVector> {
        match n {
            0 => Ok(ShapeVector::unit()),
            n => self.partial_product(n - 1),
        }
    }
}

fn min_len(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

fn dsum_has_column_factor(a: &SymbolSpec, b: &SymbolSpec) -> bool {
    let one = EMatrix::scalar(1u32);
    a.initial_column != one || b.initial_column != one
}

fn chain_check(initial_column: &EMatrix, factors: &[EMatrix]) -> Result<()> {
    let mut rows = initial_column.rows();
    for (i, f) in factors.iter().enumerate() {
        if f.cols() != rows {
            return Err(Error::InvalidSpec(format!(
                "factor {i} has {} columns but the previous level has {rows} summands",
                f.cols()
            )));
        }
        rows = f.rows();
    }
    Ok(())
}

/// `[[n,0],[n−1,1]]`.
fn f_factor(n: u64) -> EMatrix {
    EMatrix::from_u64(&[&[n, 0], &[n - 1, 1]])
}

/// `T(a,b) = [[a,0],[a−b,b]]` for `a ≥ b`.
pub(crate) fn triangular_matrix(a: u64, b: u64) -> EMatrix {
    EMatrix::from_u64(&[&[a, 0], &[a - b, b]])
}

/// Position `t` of the flattened double product to its `(n, m)` pair.
fn f1_extended_pair(mut t: u64) -> (u64, u64) {
    let mut n = 1;
    while t >= n {
        t -= n;
        n += 1;
    }
    (n, t + 1)
}

/// The `j`-th UHF factor (1-based): the product of the support primes of
/// rank `i ≤ j` that still have multiplicity left, i.e. `j − i < k_p`.
fn uhf_step(s: &SupernaturalNumber, j: usize) -> BigUint {
    s.support()
        .take(j)
        .enumerate()
        .filter(|&(i, p)| match s.multiplicity(p) {
            Multiplicity::Infinite => true,
            Multiplicity::Finite(k) => ((j - (i + 1)) as u64) < k,
        })
        .fold(BigUint::one(), |acc, (_, p)| acc * p)
}

/// A finite prefix of a Bratteli diagram: the initial column and a chain of
/// admissible factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteRepr")]
pub struct FiniteSymbol {
    initial_column: EMatrix,
    factors: Vec<EMatrix>,
}

#[derive(Deserialize)]
struct FiniteRepr {
    initial_column: EMatrix,
    factors: Vec<EMatrix>,
}

impl TryFrom<FiniteRepr> for FiniteSymbol {
    type Error = Error;

    fn try_from(r: FiniteRepr) -> Result<Self> {
        FiniteSymbol::new(r.initial_column, r.factors)
    }
}

impl FiniteSymbol {
    pub fn new(initial_column: EMatrix, factors: Vec<EMatrix>) -> Result<Self> {
        check_column(&initial_column)?;
        if let Some((i, f)) = factors.iter().enumerate().find(|(_, f)| !f.is_admissible()) {
            return Err(Error::InvalidSpec(format!("factor {i} = {f} is not admissible")));
        }
        chain_check(&initial_column, &factors)?;
        Ok(FiniteSymbol {
            initial_column,
            factors,
        })
    }

    pub fn initial_column(&self) -> &EMatrix {
        &self.initial_column
    }

    pub fn factors(&self) -> &[EMatrix] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The initial column followed by the factors, i.e. `E₀, E₁, …`.
    pub fn sequence(&self) -> Vec<EMatrix> {
        std::iter::once(self.initial_column.clone())
            .chain(self.factors.iter().cloned())
            .collect()
    }

    /// Product of the factors alone, `None` when there are none.
    pub fn factor_product(&self) -> Result<Option<EMatrix>> {
        EMatrix::chain_product(&self.factors)
    }

    /// The final column `∏ Eₙ · A₀`.
    pub fn total_product(&self) -> Result<EMatrix> {
        EMatrix::chain_product(std::iter::once(&self.initial_column).chain(&self.factors))
            .map(|m| m.expect("chain contains the column"))
    }

    /// Shapes of every Bratteli level, starting from the root `(1)`.
    pub fn shapes(&self) -> Result<Vec<ShapeVector>> {
        let mut out = vec![ShapeVector::unit(), ShapeVector::try_from(&self.initial_column)?];
        for f in &self.factors {
            let next = f.apply_to_shape(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Regroups the factors into consecutive blocks. `cuts` lists the end
    /// position (exclusive) of each block, strictly increasing, the last one
    /// equal to [`Self::len`].
    pub fn telescope(&self, cuts: &[usize]) -> Result<FiniteSymbol> {
        let mut start = 0;
        let mut factors = Vec::with_capacity(cuts.len());
        for &end in cuts {
            if end <= start {
                return Err(Error::InvalidPartition(format!(
                    "cuts must be strictly increasing and positive, got {cuts:?}"
                )));
            }
            if end > self.len() {
                return Err(Error::InvalidPartition(format!(
                    "cut {end} exceeds the {} factors",
                    self.len()
                )));
            }
            let block = EMatrix::chain_product(&self.factors[start..end])?.expect("non-empty block");
            factors.push(block);
            start = end;
        }
        if start != self.len() {
            return Err(Error::InvalidPartition(format!(
                "cuts {cuts:?} leave factors {start}..{} ungrouped",
                self.len()
            )));
        }
        FiniteSymbol::new(self.initial_column.clone(), factors)
    }

    /// [`Self::telescope`] with block sizes instead of cut positions.
    pub fn telescope_blocks(&self, sizes: &[usize]) -> Result<FiniteSymbol> {
        let cuts: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition("block sizes must be positive".into()));
        }
        self.telescope(&cuts)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_column: Option<EMatrix>,
    generator: GeneratorRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum GeneratorRepr {
    #[serde(alias = "ExplicitList")]
    Explicit {
        factors: Vec<EMatrix>,
        #[serde(default)]
        periodic: bool,
    },
    #[serde(alias = "F")]
    FFamily {
        #[serde(rename = "N")]
        n: u32,
    },
    #[serde(alias = "KOneFamily", alias = "K1")]
    KOne,
    #[serde(rename = "UHF", alias = "UHFFamily", alias = "Uhf")]
    Uhf {
        supernatural: SupernaturalNumber,
    },
    F1Extended,
    Tensor {
        left: Box<SpecRepr>,
        right: Box<SpecRepr>,
    },
    DirectSum {
        left: Box<SpecRepr>,
        right: Box<SpecRepr>,
    },
    ScalarAmplify {
        #[serde(rename = "M", with = "crate::ematrix::decimal")]
        m: BigUint,
        inner: Box<SpecRepr>,
    },
}

impl TryFrom<SpecRepr> for SymbolSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r.generator {
            GeneratorRepr::Explicit { factors, periodic } => {
                let col = r
                    .initial_column
                    .ok_or_else(|| Error::InvalidSpec("Explicit needs an initial_column".into()))?;
                return SymbolSpec::explicit(col, factors, periodic);
            }
            GeneratorRepr::FFamily { n } => SymbolSpec::f_family(n)?,
            GeneratorRepr::KOne => SymbolSpec::k_one(),
            GeneratorRepr::Uhf { supernatural } => SymbolSpec::uhf(supernatural),
            GeneratorRepr::F1Extended => SymbolSpec::f1_extended(),
            GeneratorRepr::Tensor { left, right } => SymbolSpec::tensor((*left).try_into()?, (*right).try_into()?),
            GeneratorRepr::DirectSum { left, right } => {
                SymbolSpec::direct_sum((*left).try_into()?, (*right).try_into()?)
            }
            GeneratorRepr::ScalarAmplify { m, inner } => SymbolSpec::scalar_amplify(m, (*inner).try_into()?)?,
        };
        match r.initial_column {
            Some(col) => spec.with_initial_column(col),
            None => Ok(spec),
        }
    }
}

impl From<SymbolSpec> for SpecRepr {
    fn from(s: SymbolSpec) -> Self {
        let generator = match s.generator {
            Generator::Explicit { factors, periodic } => GeneratorRepr::Explicit { factors, periodic },
            Generator::FFamily { n } => GeneratorRepr::FFamily { n },
            Generator::KOne => GeneratorRepr::KOne,
            Generator::Uhf(supernatural) => GeneratorRepr::Uhf { supernatural },
            Generator::F1Extended => GeneratorRepr::F1Extended,
            Generator::Tensor(a, b) => GeneratorRepr::Tensor {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
            Generator::DirectSum(a, b) => GeneratorRepr::DirectSum {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
            Generator::ScalarAmplify(m, inner) => GeneratorRepr::ScalarAmplify {
                m,
                inner: Box::new((*inner).into()),
            },
        };
        SpecRepr {
            initial_column: Some(s.initial_column),
            generator,
        }
    }
}
