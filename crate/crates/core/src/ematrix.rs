//! Non-negative integer matrices of partial-embedding multiplicities, the
//! matrix-size vectors they act on, and representation-dimension vectors over
//! `ℕ ∪ {∞}`.
//!
//! An E-matrix `E ∈ ℤ₊^{m×n}` describes a canonical `*`-homomorphism
//! `M(p) → M(q)`: entry `E[i][j]` is how many times the `j`-th summand of the
//! source sits inside the `i`-th summand of the target. Composition of
//! embeddings is the matrix product, tensor products of embeddings are
//! Kronecker products, and direct sums are block-diagonal.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// Dense non-negative big-integer matrix, row-major.
///
/// Zero rows and columns are permitted (non-unital canonical homomorphisms
/// have them); [`EMatrix::is_admissible`] is the predicate Bratteli factors
/// must satisfy.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigUint>,
}

impl EMatrix {
    pub fn from_rows<T: Into<BigUint> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        if nrows > 0 && ncols == 0 {
            return Err(Error::InvalidMatrix("rows without columns".into()));
        }
        let data = rows.iter().flatten().cloned().map(Into::into).collect();
        Ok(EMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Panicking constructor for literals in code and tests.
    pub fn from_u64(rows: &[&[u64]]) -> Self {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&rows).expect("well-formed matrix literal")
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigUint>) -> Result<Self> {
        if data.len() != rows * cols || (rows == 0) != (cols == 0) {
            return Err(Error::InvalidMatrix(format!(
                "{} entries do not fill a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(EMatrix { rows, cols, data })
    }

    /// The 0×0 matrix, neutral for [`EMatrix::direct_sum`].
    pub fn empty() -> Self {
        EMatrix {
            rows: 0,
            cols: 0,
            data: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        EMatrix {
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn scalar(v: impl Into<BigUint>) -> Self {
        EMatrix {
            rows: 1,
            cols: 1,
            data: vec![v.into()],
        }
    }

    pub fn column<T: Into<BigUint>>(entries: impl IntoIterator<Item = T>) -> Self {
        let data: Vec<BigUint> = entries.into_iter().map(Into::into).collect();
        EMatrix {
            rows: data.len(),
            cols: usize::from(!data.is_empty()),
            data,
        }
    }

    pub fn row<T: Into<BigUint>>(entries: impl IntoIterator<Item = T>) -> Self {
        let data: Vec<BigUint> = entries.into_iter().map(Into::into).collect();
        EMatrix {
            rows: usize::from(!data.is_empty()),
            cols: data.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_column(&self) -> bool {
        self.cols == 1
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigUint) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.data
    }

    pub fn row_slice(&self, i: usize) -> &[BigUint] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigUint>> {
        (0..self.rows).map(|i| self.row_slice(i).to_vec()).collect()
    }

    /// Every row and every column has a positive entry.
    pub fn is_admissible(&self) -> bool {
        if self.rows == 0 {
            return false;
        }
        let rows_ok = (0..self.rows).all(|i| self.row_slice(i).iter().any(|v| !v.is_zero()));
        let cols_ok = (0..self.cols).all(|j| (0..self.rows).any(|i| !self.get(i, j).is_zero()));
        rows_ok && cols_ok
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn multiply(&self, right: &EMatrix) -> Result<EMatrix> {
        if self.cols != right.rows {
            return Err(Error::shape("multiply", self.shape(), right.shape()));
        }
        let (m, k, n) = (self.rows, self.cols, right.cols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            for l in 0..k {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = right.get(l, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product with `C[(i,r),(j,s)] = A[i][j]·B[r][s]`; the pair
    /// `(i,r)` is flattened as `i·rows(B) + r` (outer index major).
    pub fn kronecker(&self, b: &EMatrix) -> EMatrix {
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for r in 0..b.rows {
                    for s in 0..b.cols {
                        out.data[(i * b.rows + r) * cols + j * b.cols + s] = a * b.get(r, s);
                    }
                }
            }
        }
        out
    }

    pub fn kronecker_power(&self, n: u32) -> EMatrix {
        let mut out = EMatrix::scalar(1u32);
        for _ in 0..n {
            out = out.kronecker(self);
        }
        out
    }

    /// Block-diagonal `[[A, 0], [0, B]]`.
    pub fn direct_sum(&self, b: &EMatrix) -> EMatrix {
        let rows = self.rows + b.rows;
        let cols = self.cols + b.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * cols + j] = self.get(i, j).clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.data[(self.rows + i) * cols + self.cols + j] = b.get(i, j).clone();
            }
        }
        out
    }

    pub fn scale(&self, k: &BigUint) -> EMatrix {
        EMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Largest entry `μ(A)`.
    pub fn max_entry(&self) -> BigUint {
        self.data.iter().max().cloned().unwrap_or_default()
    }

    pub fn rank_over_rationals(&self) -> usize {
        let rows = (0..self.rows)
            .map(|i| self.row_slice(i).iter().map(|v| BigInt::from(v.clone())).collect())
            .collect();
        linalg::bareiss_rank(rows)
    }

    /// `p' = E·p`.
    pub fn apply_to_shape(&self, p: &ShapeVector) -> Result<ShapeVector> {
        if self.cols != p.len() {
            return Err(Error::shape("apply_to_shape", self.shape(), (p.len(), 1)));
        }
        let entries: Vec<BigUint> = (0..self.rows)
            .map(|i| self.row_slice(i).iter().zip(p.entries()).map(|(e, x)| e * x).sum())
            .collect();
        ShapeVector::new(entries)
    }

    /// Row-vector product `qᵀ·E` under the `ℕ ∪ {∞}` rules; `q` is indexed by
    /// the rows of `E` (the larger algebra) and the result by its columns.
    pub fn propagate_dim(&self, q_next: &DimVector) -> Result<DimVector> {
        if q_next.len() != self.rows {
            return Err(Error::shape("propagate_dim", (1, q_next.len()), self.shape()));
        }
        let entries = (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(Dim::zero(), |acc, i| {
                    acc.add(&q_next.entries()[i].mul_count(self.get(i, j)))
                })
            })
            .collect();
        Ok(DimVector::new(entries))
    }

    /// Product of a chain `fs[n−1] ··· fs[1]·fs[0]` (right-to-left order).
    pub fn chain_product<'a>(factors: impl IntoIterator<Item = &'a EMatrix>) -> Result<Option<EMatrix>> {
        let mut acc: Option<EMatrix> = None;
        for f in factors {
            acc = Some(match acc {
                None => f.clone(),
                Some(prev) => f.multiply(&prev)?,
            });
        }
        Ok(acc)
    }
}

impl fmt::Debug for EMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row_slice(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Matrix literal: JSON array of rows of decimal strings.
impl Serialize for EMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row_slice(i).iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberLiteral {
    Text(String),
    Int(u64),
}

impl NumberLiteral {
    fn to_biguint(&self) -> Result<BigUint> {
        match self {
            NumberLiteral::Int(v) => Ok(BigUint::from(*v)),
            NumberLiteral::Text(s) => parse_biguint(s),
        }
    }
}

pub(crate) fn parse_biguint(s: &str) -> Result<BigUint> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a non-negative decimal integer: {s:?}")));
    }
    t.parse::<BigUint>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

impl<'de> Deserialize<'de> for EMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Vec<NumberLiteral>> = Vec::deserialize(d)?;
        let rows = raw
            .iter()
            .map(|r| r.iter().map(NumberLiteral::to_biguint).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        EMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a single big integer written as a decimal string
/// (plain JSON integers are accepted on input).
pub(crate) mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        NumberLiteral::deserialize(d)?
            .to_biguint()
            .map_err(serde::de::Error::custom)
    }
}

/// Matrix-size vector `p = (p_j)` of a finite-dimensional algebra `M(p)`;
/// every entry is at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShapeVector(Vec<BigUint>);

impl ShapeVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if entries.iter().any(Zero::is_zero) {
            return Err(Error::InvalidShape("entries must be positive".into()));
        }
        Ok(ShapeVector(entries))
    }

    pub fn from_u64(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| BigUint::from(v)).collect())
    }

    /// The shape of `C^{1×1}`.
    pub fn unit() -> Self {
        ShapeVector(vec![BigUint::one()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.0
    }

    pub fn to_column(&self) -> EMatrix {
        EMatrix::column(self.0.iter().cloned())
    }
}

impl TryFrom<&EMatrix> for ShapeVector {
    type Error = Error;

    fn try_from(m: &EMatrix) -> Result<Self> {
        if !m.is_column() {
            return Err(Error::InvalidShape(format!(
                "{}×{} is not a column",
                m.rows(),
                m.cols()
            )));
        }
        ShapeVector::new(m.entries().to_vec())
    }
}

impl Serialize for ShapeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShapeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<NumberLiteral>::deserialize(d)?;
        let entries = raw
            .into_iter()
            .map(|n| n.to_biguint().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ShapeVector::new(entries).map_err(serde::de::Error::custom)
    }
}

/// A representation multiplicity: a non-negative integer or `∞`.
///
/// Arithmetic follows `a + ∞ = ∞` and `∞·0 = 0·∞ = 0`; this is the
/// commutative semiring `ℕ ∪ {∞}`, not saturating arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Finite(BigUint),
    Infinite,
}

impl Dim {
    pub fn zero() -> Self {
        Dim::Finite(BigUint::zero())
    }

    pub fn finite(v: impl Into<BigUint>) -> Self {
        Dim::Finite(v.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Dim::Finite(v) if v.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Dim::Finite(_))
    }

    pub fn add(&self, other: &Dim) -> Dim {
        match (self, other) {
            (Dim::Finite(a), Dim::Finite(b)) => Dim::Finite(a + b),
            _ => Dim::Infinite,
        }
    }

    pub fn mul(&self, other: &Dim) -> Dim {
        if self.is_zero() || other.is_zero() {
            return Dim::zero();
        }
        match (self, other) {
            (Dim::Finite(a), Dim::Finite(b)) => Dim::Finite(a * b),
            _ => Dim::Infinite,
        }
    }

    pub fn mul_count(&self, k: &BigUint) -> Dim {
        self.mul(&Dim::Finite(k.clone()))
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Finite(v) => write!(f, "{v}"),
            Dim::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Dim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Dim::Infinite),
            t => parse_biguint(t).map(Dim::Finite),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumberLiteral::deserialize(d)? {
            NumberLiteral::Int(v) => Ok(Dim::finite(v)),
            NumberLiteral::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Per-summand representation multiplicities `q_n` of a concretely
/// represented finite-dimensional algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(Vec<Dim>);

impl DimVector {
    pub fn new(entries: Vec<Dim>) -> Self {
        DimVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Dim] {
        &self.0
    }

    /// Finite entries, sorted, as a multiset.
    pub fn finite_multiset(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = self
            .0
            .iter()
            .filter_map(|d| match d {
                Dim::Finite(x) => Some(x.clone()),
                Dim::Infinite => None,
            })
            .collect();
        v.sort();
        v
    }
}

impl std::str::FromStr for DimVector {
    type Err = Error;

    /// Comma-separated entries, e.g. `inf,2`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(str::parse)
            .collect::<Result<Vec<Dim>>>()
            .map(DimVector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> EMatrix {
        EMatrix::from_u64(rows)
    }

    #[test]
    fn multiply_unital_embedding_example() {
        let e = m(&[&[2, 0, 0], &[0, 1, 1]]);
        let p = EMatrix::column([2u32, 2, 3]);
        assert_eq!(e.multiply(&p).unwrap(), EMatrix::column([4u32, 5]));
    }

    #[test]
    fn multiply_identity_and_by_hand() {
        let a = m(&[&[2, 0], &[1, 1]]);
        assert_eq!(EMatrix::identity(2).multiply(&a).unwrap(), a);
        let b = m(&[&[3, 0], &[2, 1]]);
        assert_eq!(b.multiply(&a).unwrap(), m(&[&[6, 0], &[5, 1]]));
    }

    #[test]
    fn multiply_shape_error() {
        let a = m(&[&[1, 2]]);
        assert!(matches!(
            a.multiply(&a),
            Err(Error::ShapeMismatch { op: "multiply", .. })
        ));
    }

    #[test]
    fn kronecker_examples() {
        let f = m(&[&[2, 0], &[1, 1]]);
        assert_eq!(
            f.kronecker(&f),
            m(&[&[4, 0, 0, 0], &[2, 2, 0, 0], &[2, 0, 2, 0], &[1, 1, 1, 1]])
        );
        assert_eq!(EMatrix::scalar(1u32).kronecker(&f), f);
        let ones = EMatrix::column([1u32, 1]);
        assert_eq!(ones.kronecker(&ones), EMatrix::column([1u32, 1, 1, 1]));
    }

    #[test]
    fn kronecker_index_order_is_outer_major() {
        // Non-symmetric operands pin the (i,r),(j,s) flattening.
        let a = m(&[&[1, 2]]);
        let b = m(&[&[3], &[5]]);
        assert_eq!(a.kronecker(&b), m(&[&[3, 6], &[5, 10]]));
        assert_eq!(b.kronecker(&a), m(&[&[3, 6], &[5, 10]]));
        let c = m(&[&[1, 0], &[0, 2]]);
        let d = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            c.kronecker(&d),
            m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 2], &[0, 0, 2, 0]])
        );
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(
            EMatrix::scalar(3u32).direct_sum(&EMatrix::scalar(1u32)),
            m(&[&[3, 0], &[0, 1]])
        );
        let a = m(&[&[2, 0], &[1, 1]]);
        assert_eq!(EMatrix::empty().direct_sum(&a), a);
        assert_eq!(a.direct_sum(&EMatrix::empty()), a);
        assert_eq!(
            EMatrix::scalar(2u32).direct_sum(&EMatrix::scalar(3u32)),
            m(&[&[2, 0], &[0, 3]])
        );
    }

    #[test]
    fn max_entry_examples() {
        let e2 = m(&[&[3, 0], &[2, 1]]);
        let e1 = m(&[&[2, 0], &[1, 1]]);
        assert_eq!(e2.max_entry(), BigUint::from(3u32));
        assert_eq!(m(&[&[1]]).max_entry(), BigUint::one());
        let prod = e2.multiply(&e1).unwrap();
        assert_eq!(prod.max_entry(), BigUint::from(6u32));
        assert!(prod.max_entry() >= e2.max_entry().max(e1.max_entry()));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(m(&[&[2, 0], &[1, 1]]).rank_over_rationals(), 2);
        assert_eq!(EMatrix::column([1u32, 1, 1, 1]).rank_over_rationals(), 1);
        let f = m(&[&[2, 0], &[1, 1]]);
        assert_eq!(f.kronecker(&f).rank_over_rationals(), 4);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).rank_over_rationals(), 1);
    }

    #[test]
    fn admissibility() {
        assert!(m(&[&[2, 0, 0], &[0, 1, 1]]).is_admissible());
        assert!(!m(&[&[2, 0, 0], &[0, 0, 0]]).is_admissible());
        assert!(!m(&[&[1, 0], &[1, 0]]).is_admissible());
        assert!(!EMatrix::empty().is_admissible());
    }

    #[test]
    fn apply_to_shape_examples() {
        let f = m(&[&[2, 0], &[1, 1]]);
        let p = ShapeVector::from_u64(&[1, 1]).unwrap();
        assert_eq!(f.apply_to_shape(&p).unwrap(), ShapeVector::from_u64(&[2, 2]).unwrap());
        assert_eq!(EMatrix::identity(2).apply_to_shape(&p).unwrap(), p);

        let mut shape = p;
        for n in 2u64..=4 {
            shape = m(&[&[n, 0], &[n - 1, 1]]).apply_to_shape(&shape).unwrap();
        }
        assert_eq!(shape, ShapeVector::from_u64(&[24, 24]).unwrap());

        assert!(f.apply_to_shape(&ShapeVector::unit()).is_err());
    }

    #[test]
    fn shape_vector_rejects_zero() {
        assert!(ShapeVector::from_u64(&[1, 0]).is_err());
    }

    #[test]
    fn propagate_dim_examples() {
        let tail: DimVector = "inf,5".parse().unwrap();
        let e = m(&[&[3, 0], &[2, 1]]);
        assert_eq!(e.propagate_dim(&tail).unwrap(), tail);

        let q: DimVector = "4,7".parse().unwrap();
        assert_eq!(EMatrix::identity(2).propagate_dim(&q).unwrap(), q);

        let ones: DimVector = "1,1".parse().unwrap();
        assert_eq!(
            m(&[&[2, 0], &[1, 1]]).propagate_dim(&ones).unwrap(),
            "3,1".parse().unwrap()
        );

        assert!(e.propagate_dim(&"1".parse().unwrap()).is_err());
    }

    #[test]
    fn infinity_times_zero_is_zero() {
        assert_eq!(Dim::Infinite.mul(&Dim::zero()), Dim::zero());
        assert_eq!(Dim::zero().mul(&Dim::Infinite), Dim::zero());
        assert_eq!(Dim::Infinite.add(&Dim::finite(3u32)), Dim::Infinite);
        assert_eq!(Dim::Infinite.mul(&Dim::finite(2u32)), Dim::Infinite);
    }

    #[test]
    fn json_literal_roundtrip() {
        let a = m(&[&[2, 0], &[1, 1]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["2","0"],["1","1"]]"#);
        let back: EMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);

        let big: EMatrix = serde_json::from_str(r#"[["100000000000000000000000"]]"#).unwrap();
        assert_eq!(big.get(0, 0).to_string(), "100000000000000000000000");

        let mixed: EMatrix = serde_json::from_str(r#"[[2,"0"],[1,1]]"#).unwrap();
        assert_eq!(mixed, a);

        assert!(serde_json::from_str::<EMatrix>(r#"[["1","2"],["3"]]"#).is_err());
        assert!(serde_json::from_str::<EMatrix>(r#"[["-1"]]"#).is_err());
        assert_eq!(serde_json::from_str::<EMatrix>("[]").unwrap(), EMatrix::empty());
    }
}
