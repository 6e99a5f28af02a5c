//! Finite-resolution model of the one-dimensional integro-differential
//! operators on `L²(0,1)`.
//!
//! Functions are restricted to step functions on the cells
//! `[j/r, (j+1)/r)`, with orthonormal basis `f_j = √r·χ_j`. In this basis
//! multiplication by an indicator is a diagonal 0/1 matrix, shifts by
//! multiples of `1/r` are cyclic permutations, and the integral operator
//! `u ↦ ∫₀¹ u` is the matrix with every entry `1/r`. All entries are exact
//! rationals.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ematrix::EMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Square matrix of exact rationals stored as integer numerators over one
/// positive common denominator, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        RationalMatrix {
            n,
            num: vec![BigInt::zero(); n * n],
            den: BigInt::one(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.num[i * n + i] = BigInt::one();
        }
        m
    }

    /// Every entry equal to `v`.
    pub fn constant(n: usize, v: &BigRational) -> Self {
        Self::from_parts(n, vec![v.numer().clone(); n * n], v.denom().clone())
    }

    fn from_parts(n: usize, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut m = RationalMatrix { n, num, den };
        m.normalize();
        m
    }

    pub fn from_entries(n: usize, entries: &[BigRational]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} entries do not fill {n}×{n}",
                entries.len()
            )));
        }
        let den = entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = entries.iter().map(|e| e.numer() * (&den / e.denom())).collect();
        Ok(Self::from_parts(n, num, den))
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for v in &mut self.num {
                *v = -&*v;
            }
        }
        let g = self
            .num
            .iter()
            .fold(self.den.clone(), |g, v| if v.is_zero() { g } else { g.gcd(v) });
        if !g.is_one() && !g.is_zero() {
            for v in &mut self.num {
                if !v.is_zero() {
                    *v /= &g;
                }
            }
            self.den /= &g;
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i * self.n + j].clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n, "operator sizes differ");
        let n = self.n;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = &self.num[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.num[l * n + j];
                    if !b.is_zero() {
                        num[i * n + j] += a * b;
                    }
                }
            }
        }
        Self::from_parts(n, num, &self.den * &other.den)
    }

    fn combine(&self, other: &RationalMatrix, sign: i32) -> RationalMatrix {
        assert_eq!(self.n, other.n, "operator sizes differ");
        let den = self.den.lcm(&other.den);
        let (fa, fb) = (&den / &self.den, &den / &other.den);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| {
                let (x, y) = (a * &fa, b * &fb);
                if sign > 0 {
                    x + y
                } else {
                    x - y
                }
            })
            .collect();
        Self::from_parts(self.n, num, den)
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        self.combine(other, -1)
    }

    pub fn scale(&self, k: &BigRational) -> RationalMatrix {
        let num = self.num.iter().map(|v| v * k.numer()).collect();
        Self::from_parts(self.n, num, &self.den * k.denom())
    }

    /// The adjoint; the basis is real and orthonormal, so this is the
    /// transpose.
    pub fn adjoint(&self) -> RationalMatrix {
        let n = self.n;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                num[j * n + i] = self.num[i * n + j].clone();
            }
        }
        RationalMatrix {
            n,
            num,
            den: self.den.clone(),
        }
    }

    pub fn trace(&self) -> BigRational {
        let t: BigInt = (0..self.n).map(|i| &self.num[i * self.n + i]).sum();
        BigRational::new(t, self.den.clone())
    }

    pub fn rank(&self) -> usize {
        let rows = self.num.chunks(self.n.max(1)).map(<[BigInt]>::to_vec).collect();
        linalg::bareiss_rank(rows)
    }

    /// First entry where the two matrices differ.
    pub fn first_difference(&self, other: &RationalMatrix) -> Option<(usize, usize)> {
        let n = self.n;
        if self.den == other.den {
            return (0..n * n)
                .find(|&k| self.num[k] != other.num[k])
                .map(|k| (k / n, k % n));
        }
        (0..n * n)
            .find(|&k| &self.num[k] * &other.den != &other.num[k] * &self.den)
            .map(|k| (k / n, k % n))
    }

    fn entries_numerators(&self) -> &[BigInt] {
        &self.num
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let r: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                r.join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Dimension of the linear span of a family of operators.
pub fn span_dimension(ops: &[&RationalMatrix]) -> usize {
    // Scaling a row by its positive denominator leaves the rank unchanged.
    let rows = ops.iter().map(|m| m.entries_numerators().to_vec()).collect();
    linalg::bareiss_rank(rows)
}

/// How `S_h` is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftConvention {
    /// `(S_h u)(x) = u(x − h)`, cyclically.
    #[default]
    Backward,
    /// `S_h = 1 + h·D_{1,h}`, i.e. `(S_h u)(x) = u(x + h)`.
    Forward,
    /// `S_h = 1 − h·D_{1,h}` read with the forward difference; not a shift.
    Literal,
    /// The backward shift without wrap-around; mass leaving `[0,1)` is lost.
    Truncated,
}

impl std::str::FromStr for ShiftConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward" => Ok(ShiftConvention::Backward),
            "forward" => Ok(ShiftConvention::Forward),
            "literal" => Ok(ShiftConvention::Literal),
            "truncated" => Ok(ShiftConvention::Truncated),
            _ => Err(Error::Parse(format!(
                "unknown shift convention {s:?} (backward, forward, literal, truncated)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorModel {
    p: u64,
    q: u64,
    s: u64,
    r: usize,
    convention: ShiftConvention,
}

impl OperatorModel {
    /// Model at resolution `r = p·q·s`.
    pub fn build(p: u64, q: u64, s: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Resolution(format!("p and q must be positive, got p={p}, q={q}")));
        }
        if s < 2 {
            return Err(Error::Resolution(format!("s must be at least 2, got {s}")));
        }
        let r = p
            .checked_mul(q)
            .and_then(|v| v.checked_mul(s))
            .and_then(|v| usize::try_from(v).ok())
            .filter(|&r| r <= 4096)
            .ok_or_else(|| Error::Resolution(format!("resolution p·q·s = {p}·{q}·{s} is too large")))?;
        Ok(OperatorModel {
            p,
            q,
            s,
            r,
            convention: ShiftConvention::Backward,
        })
    }

    pub fn with_convention(mut self, convention: ShiftConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn resolution(&self) -> usize {
        self.r
    }

    pub fn convention(&self) -> ShiftConvention {
        self.convention
    }

    fn check_divides(&self, pp: u64, what: &str) -> Result<usize> {
        let pp_usize = usize::try_from(pp).unwrap_or(usize::MAX);
        if pp == 0 || !self.r.is_multiple_of(pp_usize) {
            return Err(Error::Resolution(format!(
                "{what} = {pp} does not divide r = {}",
                self.r
            )));
        }
        Ok(pp_usize)
    }

    /// `M_{i,p'}`: multiplication by the indicator of `[i/p', (i+1)/p')`,
    /// with `i` taken mod `p'`.
    pub fn mult_op(&self, i: i64, pp: u64) -> Result<RationalMatrix> {
        let pp = self.check_divides(pp, "p'")?;
        let cell = self.r / pp;
        let i = i.rem_euclid(pp as i64) as usize;
        let mut m = RationalMatrix::zeros(self.r);
        for k in i * cell..(i + 1) * cell {
            m.num[k * self.r + k] = BigInt::one();
        }
        Ok(m)
    }

    /// The true cyclic permutation `(P_a u)(x) = u(x − a/r)`.
    fn permutation(&self, a: i64) -> RationalMatrix {
        let r = self.r;
        let mut m = RationalMatrix::zeros(r);
        for b in 0..r {
            let to = (b as i64 + a).rem_euclid(r as i64) as usize;
            m.num[to * r + b] = BigInt::one();
        }
        m
    }

    /// `S_h` for `h = a/r` under the model's convention.
    pub fn shift_cells(&self, a: i64) -> RationalMatrix {
        let r = self.r;
        match self.convention {
            ShiftConvention::Backward => self.permutation(a),
            ShiftConvention::Forward => self.permutation(-a),
            ShiftConvention::Literal => {
                let two = RationalMatrix::identity(r).scale(&BigRational::from_integer(2.into()));
                two.sub(&self.permutation(-a))
            }
            ShiftConvention::Truncated => {
                let mut m = RationalMatrix::zeros(r);
                for b in 0..r {
                    let to = b as i64 + a;
                    if (0..r as i64).contains(&to) {
                        m.num[to as usize * r + b] = BigInt::one();
                    }
                }
                m
            }
        }
    }

    fn cells_of(&self, h: &BigRational) -> Result<i64> {
        let scaled = h * BigRational::from_integer(BigInt::from(self.r));
        if !scaled.is_integer() {
            return Err(Error::Resolution(format!("h = {h} is not a multiple of 1/{}", self.r)));
        }
        i64::try_from(scaled.to_integer()).map_err(|_| Error::Resolution(format!("h = {h} is too large")))
    }

    pub fn shift_op(&self, h: &BigRational) -> Result<RationalMatrix> {
        Ok(self.shift_cells(self.cells_of(h)?))
    }

    /// `I₁ u = ∫₀¹ u dx`, every entry `1/r`.
    pub fn integral_op(&self) -> RationalMatrix {
        RationalMatrix::constant(self.r, &BigRational::new(BigInt::one(), BigInt::from(self.r)))
    }

    /// `D_{1,h} = h⁻¹(S_{−h} − Id)`, the forward difference
    /// `(u(x+h) − u(x))/h`, independent of the shift convention.
    pub fn diff_op(&self, h: &BigRational) -> Result<RationalMatrix> {
        let a = self.cells_of(h)?;
        if a == 0 {
            return Err(Error::Precondition("D_{1,h} needs h ≠ 0".into()));
        }
        let diff = self.permutation(-a).sub(&RationalMatrix::identity(self.r));
        Ok(diff.scale(&h.recip()))
    }

    /// `B^{p'}_{ij} = p'·M_i·I₁·M_j` and `A^{p'}_{ij} = M_i·S_{(i−j)/p'} − B_{ij}`.
    pub fn basis_ops(&self, pp: u64) -> Result<BasisOps> {
        let ppu = self.check_divides(pp, "p'")?;
        let cell = (self.r / ppu) as i64;
        let ms: Vec<RationalMatrix> = (0..ppu as i64).map(|i| self.mult_op(i, pp)).collect::<Result<_>>()?;
        let i1 = self.integral_op();
        let k = BigRational::from_integer(BigInt::from(pp));
        let mut a = Vec::with_capacity(ppu * ppu);
        let mut b = Vec::with_capacity(ppu * ppu);
        for i in 0..ppu {
            let mi_i1 = ms[i].mul(&i1);
            for j in 0..ppu {
                let bij = mi_i1.mul(&ms[j]).scale(&k);
                let shift = self.shift_cells((i as i64 - j as i64) * cell);
                a.push(ms[i].mul(&shift).sub(&bij));
                b.push(bij);
            }
        }
        Ok(BasisOps { p: ppu, a, b })
    }

    fn require_faithful(&self, pp: u64) -> Result<usize> {
        let ppu = self.check_divides(pp, "p'")?;
        if self.r / ppu < 2 {
            return Err(Error::Resolution(format!(
                "r/p' = {}/{pp} must be at least 2 for a faithful A-family",
                self.r
            )));
        }
        Ok(ppu)
    }

    /// Exact checks of the elementary operator relations and the
    /// matrix-unit laws of both basis families.
    pub fn verify_relations(&self, pp: u64) -> Result<Report> {
        let ppu = self.require_faithful(pp)?;
        let r = self.r as i64;
        let cell = r / ppu as i64;
        let ms: Vec<RationalMatrix> = (0..ppu as i64).map(|i| self.mult_op(i, pp)).collect::<Result<_>>()?;
        let i1 = self.integral_op();
        let ops = self.basis_ops(pp)?;
        let zero = RationalMatrix::zeros(self.r);
        let n = ppu;
        let mut rep = Report::default();

        rep.check("M_i M_j = δ_ij M_i", "elementary", iproduct(n, n), |(i, j)| {
            (ms[i].mul(&ms[j]), if i == j { ms[i].clone() } else { zero.clone() })
        });
        rep.check(
            "S_{j/p} M_i = M_{i+j} S_{j/p}",
            "elementary",
            iproduct(n, n),
            |(i, j)| {
                let s = self.shift_cells(j as i64 * cell);
                (s.mul(&ms[i]), ms[(i + j) % n].mul(&s))
            },
        );
        let shifts = -(r - 1)..r;
        let span = 2 * (r - 1);
        let cached: Vec<RationalMatrix> = (-span..=span).map(|a| self.shift_cells(a)).collect();
        let shift = |a: i64| &cached[(a + span) as usize];
        let pairs: Vec<(i64, i64)> = shifts
            .clone()
            .flat_map(|a| shifts.clone().map(move |b| (a, b)))
            .collect();
        rep.check("S_h S_t = S_{h+t}", "elementary", pairs, |(a, b)| {
            (shift(a).mul(shift(b)), shift(a + b).clone())
        });
        rep.check("M_i* = M_i", "elementary", 0..n, |i| (ms[i].adjoint(), ms[i].clone()));
        rep.check("S_h* = S_{-h}", "elementary", shifts.clone(), |a| {
            (self.shift_cells(a).adjoint(), self.shift_cells(-a))
        });
        rep.check("S_h I_1 = I_1", "elementary", shifts.clone(), |a| {
            (self.shift_cells(a).mul(&i1), i1.clone())
        });
        rep.check("I_1 S_h = I_1", "elementary", shifts, |a| {
            (i1.mul(&self.shift_cells(a)), i1.clone())
        });
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(pp));
        rep.check("I_1 M_i I_1 = p^-1 I_1", "elementary", 0..n, |i| {
            (i1.mul(&ms[i]).mul(&i1), i1.scale(&inv_p))
        });

        let quads: Vec<(usize, usize, usize, usize)> = iproduct(n, n)
            .flat_map(|(i, j)| iproduct(n, n).map(move |(k, l)| (i, j, k, l)))
            .collect();
        rep.check(
            "B_ij B_nm = δ_jn B_im",
            "matrix-units",
            quads.clone(),
            |(i, j, k, l)| {
                let want = if j == k { ops.b(i, l).clone() } else { zero.clone() };
                (ops.b(i, j).mul(ops.b(k, l)), want)
            },
        );
        rep.check("B_ij* = B_ji", "matrix-units", iproduct(n, n), |(i, j)| {
            (ops.b(i, j).adjoint(), ops.b(j, i).clone())
        });
        rep.check(
            "A_ij A_nm = δ_jn A_im",
            "matrix-units",
            quads.clone(),
            |(i, j, k, l)| {
                let want = if j == k { ops.a(i, l).clone() } else { zero.clone() };
                (ops.a(i, j).mul(ops.a(k, l)), want)
            },
        );
        rep.check("A_ij* = A_ji", "matrix-units", iproduct(n, n), |(i, j)| {
            (ops.a(i, j).adjoint(), ops.a(j, i).clone())
        });
        rep.check("A_ij B_nm = 0", "matrix-units", quads.clone(), |(i, j, k, l)| {
            (ops.a(i, j).mul(ops.b(k, l)), zero.clone())
        });
        rep.check("B_ij A_nm = 0", "matrix-units", quads, |(i, j, k, l)| {
            (ops.b(i, j).mul(ops.a(k, l)), zero.clone())
        });
        Ok(rep)
    }

    /// The generating operators expressed through the basis operators of
    /// `H_{p'}`.
    pub fn verify_membership(&self, pp: u64) -> Result<Report> {
        let ppu = self.require_faithful(pp)?;
        let n = ppu;
        let cell = (self.r / n) as i64;
        let ops = self.basis_ops(pp)?;
        let i1 = self.integral_op();
        let id = RationalMatrix::identity(self.r);
        let mut rep = Report::default();

        let inv_p = BigRational::new(BigInt::one(), BigInt::from(pp));
        rep.check("p^-1 sum_ij B_ij = I_1", "membership", [()], |()| {
            (sum(self.r, ops.b.iter()).scale(&inv_p), i1.clone())
        });
        rep.check("sum_j M_j = 1", "membership", [()], |()| {
            let ms = (0..n as i64).map(|j| self.mult_op(j, pp).expect("p' | r"));
            (sum(self.r, ms.collect::<Vec<_>>().iter()), id.clone())
        });
        rep.check("sum_i (A_{i,i-1} + B_{i,i-1}) = S_{1/p}", "membership", [()], |()| {
            let terms: Vec<RationalMatrix> = (0..n)
                .map(|i| {
                    let j = (i + n - 1) % n;
                    ops.a(i, j).add(ops.b(i, j))
                })
                .collect();
            (sum(self.r, terms.iter()), self.shift_cells(cell))
        });
        rep.check("S_{k/p} = S_{1/p}^k", "membership", 0..=n, |k| {
            let base = self.shift_cells(cell);
            let power = (0..k).fold(id.clone(), |acc, _| acc.mul(&base));
            (power, self.shift_cells(k as i64 * cell))
        });
        rep.check("M_i = A_ii + B_ii", "membership", 0..n, |i| {
            (
                ops.a(i, i).add(ops.b(i, i)),
                self.mult_op(i as i64, pp).expect("p' | r"),
            )
        });
        rep.check("D_{1,h} in H_p for h = k/p", "membership", 1..=n, |k| {
            let h = BigRational::new(BigInt::from(k), BigInt::from(pp));
            let d = self.diff_op(&h).expect("h is a multiple of 1/r");
            (ops.project(&d), d)
        });
        rep.check("h^-1 (1 - S_h) in H_p for h = k/p", "membership", 1..=n, |k| {
            let h = BigRational::new(BigInt::from(k), BigInt::from(pp));
            let d = id.sub(&self.shift_cells(k as i64 * cell)).scale(&h.recip());
            (ops.project(&d), d)
        });
        Ok(rep)
    }

    /// The embedding `H_{p'} ⊂ H_{p'q'}` written in the basis of the larger
    /// algebra.
    pub fn verify_bemb(&self, pp: u64, qq: u64) -> Result<Report> {
        let fine = pp
            .checked_mul(qq)
            .ok_or_else(|| Error::Resolution("p'·q' overflows".into()))?;
        self.require_faithful(fine)?;
        let (n, q) = (pp as usize, qq as usize);
        let nf = n * q;
        let coarse = self.basis_ops(pp)?;
        let fine_ops = self.basis_ops(fine)?;
        let inv_q = BigRational::new(BigInt::one(), BigInt::from(qq));
        let block_b = |i: usize, j: usize| -> RationalMatrix {
            let terms: Vec<&RationalMatrix> = (i * q..(i + 1) * q)
                .flat_map(|a| (j * q..(j + 1) * q).map(move |b| (a, b)))
                .map(|(a, b)| fine_ops.b(a, b))
                .collect();
            sum(self.r, terms).scale(&inv_q)
        };
        let mut rep = Report::default();
        rep.check("M_{i,p} = sum_n M_{n,pq}", "embedding", 0..n, |i| {
            let parts: Vec<RationalMatrix> = (i * q..(i + 1) * q)
                .map(|k| self.mult_op(k as i64, fine).expect("p'q' | r"))
                .collect();
            (self.mult_op(i as i64, pp).expect("p' | r"), sum(self.r, parts.iter()))
        });
        rep.check("B^p_ij = q^-1 sum_nm B^pq_nm", "embedding", iproduct(n, n), |(i, j)| {
            (coarse.b(i, j).clone(), block_b(i, j))
        });
        rep.check(
            "A^p_ij = sum_n (A^pq + B^pq)_{n,n+(j-i)q} - q^-1 sum_nm B^pq_nm",
            "embedding",
            iproduct(n, n),
            |(i, j)| {
                let diag: Vec<RationalMatrix> = (i * q..(i + 1) * q)
                    .map(|k| {
                        let m = (k as i64 + (j as i64 - i as i64) * q as i64).rem_euclid(nf as i64) as usize;
                        fine_ops.a(k, m).add(fine_ops.b(k, m))
                    })
                    .collect();
                (coarse.a(i, j).clone(), sum(self.r, diag.iter()).sub(&block_b(i, j)))
            },
        );
        rep.unverifiable(
            "A^p_ij = (sum_n M_{n,pq}) S_{(iq-pq-n+n)/(pq)} - B^p_ij",
            "embedding",
            "the shift index does not reduce to a consistent value as written",
        );
        Ok(rep)
    }

    /// `E[k][l] = rank(Q_k · P_l)` in summand order (A, B), with `Q` the
    /// central projections of `H_{p'q'}` and `P` minimal projections of
    /// `H_{p'}`.
    pub fn extract_e_matrix(&self, pp: u64, qq: u64) -> Result<EMatrix> {
        self.extract_e_matrix_with(pp, qq, 0, 0)
    }

    /// [`Self::extract_e_matrix`] with the minimal projections `A_{ka,ka}`
    /// and `B_{kb,kb}`.
    pub fn extract_e_matrix_with(&self, pp: u64, qq: u64, ka: usize, kb: usize) -> Result<EMatrix> {
        let fine = pp
            .checked_mul(qq)
            .ok_or_else(|| Error::Resolution("p'·q' overflows".into()))?;
        self.check_divides(fine, "p'q'")?;
        if self.r as u64 != 2 * fine {
            return Err(Error::Resolution(format!(
                "extraction needs r = 2·p'·q' (each summand of the larger algebra represented once), got r = {} for p'q' = {fine}",
                self.r
            )));
        }
        let small = self.basis_ops(pp)?;
        if ka >= small.p || kb >= small.p {
            return Err(Error::IndexOutOfRange {
                index: ka.max(kb) as u64,
                range: format!("0..{}", small.p),
            });
        }
        let big = self.basis_ops(fine)?;
        let q_b = sum(self.r, (0..big.p).map(|i| big.b(i, i)));
        let q_a = RationalMatrix::identity(self.r).sub(&q_b);
        let projections = [small.a(ka, ka), small.b(kb, kb)];
        let mut rows = Vec::with_capacity(2);
        for qk in [&q_a, &q_b] {
            rows.push(
                projections
                    .iter()
                    .map(|pl| BigUint::from(qk.mul(pl).rank()))
                    .collect::<Vec<_>>(),
            );
        }
        EMatrix::from_rows(&rows)
    }

    /// Representation multiplicities `(rank A_00, rank B_00)` of the two
    /// summands of `H_{p'}` on the model space.
    pub fn multiplicities(&self, pp: u64) -> Result<(BigUint, BigUint)> {
        let ops = self.basis_ops(pp)?;
        Ok((BigUint::from(ops.a(0, 0).rank()), BigUint::from(ops.b(0, 0).rank())))
    }
}

fn iproduct(n: usize, m: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| (0..m).map(move |j| (i, j)))
}

fn sum<'a>(n: usize, ms: impl IntoIterator<Item = &'a RationalMatrix>) -> RationalMatrix {
    ms.into_iter().fold(RationalMatrix::zeros(n), |acc, m| acc.add(m))
}

/// The two matrix-unit families of `H_{p'}`, indexed `(i, j)` row-major.
#[derive(Clone, Debug)]
pub struct BasisOps {
    p: usize,
    a: Vec<RationalMatrix>,
    b: Vec<RationalMatrix>,
}

impl BasisOps {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn a(&self, i: usize, j: usize) -> &RationalMatrix {
        &self.a[i * self.p + j]
    }

    pub fn b(&self, i: usize, j: usize) -> &RationalMatrix {
        &self.b[i * self.p + j]
    }

    pub fn all(&self) -> impl Iterator<Item = &RationalMatrix> {
        self.a.iter().chain(&self.b)
    }

    /// Orthogonal projection onto the span of the matrix units, using
    /// `tr(e_ji X) = c_ij tr(e_jj)` for `X = Σ c_ij e_ij`.
    pub fn project(&self, x: &RationalMatrix) -> RationalMatrix {
        let n = x.size();
        let mut out = RationalMatrix::zeros(n);
        for family in [&self.a, &self.b] {
            for i in 0..self.p {
                for j in 0..self.p {
                    let ejj = &family[j * self.p + j];
                    let t = ejj.trace();
                    if t.is_zero() {
                        continue;
                    }
                    let c = family[j * self.p + i].mul(x).trace() / t;
                    if !c.is_zero() {
                        out = out.add(&family[i * self.p + j].scale(&c));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unverifiable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instance: String,
    pub row: usize,
    pub col: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub identity: String,
    pub tag: String,
    pub status: Status,
    /// Number of index instances checked.
    pub instances: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One entry per identity; an identity fails if any instance fails, and
/// the first failing instance is kept as the counterexample.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn check<T: fmt::Debug>(
        &mut self,
        identity: &str,
        tag: &str,
        instances: impl IntoIterator<Item = T>,
        mut sides: impl FnMut(T) -> (RationalMatrix, RationalMatrix),
    ) {
        let mut count = 0;
        let mut counterexample = None;
        for inst in instances {
            count += 1;
            let label = format!("{inst:?}");
            let (lhs, rhs) = sides(inst);
            if let Some((row, col)) = lhs.first_difference(&rhs) {
                counterexample = Some(Counterexample {
                    instance: label,
                    row,
                    col,
                    lhs: lhs.get(row, col).to_string(),
                    rhs: rhs.get(row, col).to_string(),
                });
                break;
            }
        }
        self.checks.push(Check {
            identity: identity.into(),
            tag: tag.into(),
            status: if counterexample.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            instances: count,
            counterexample,
            note: None,
        });
    }

    fn unverifiable(&mut self, identity: &str, tag: &str, note: &str) {
        self.checks.push(Check {
            identity: identity.into(),
            tag: tag.into(),
            status: Status::Unverifiable,
            instances: 0,
            counterexample: None,
            note: Some(note.into()),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, identity: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.identity == identity)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}
