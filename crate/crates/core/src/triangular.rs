//! The commuting family `T(a,b) = [[a,0],[a−b,b]]` of 2×2 E-matrices with
//! common eigenvectors `(1,1)ᵀ` and `(0,1)ᵀ`.
//!
//! Products reduce to pairs of integers, `T(a,b)·T(c,d) = T(ac,bd)`, so an
//! infinite product in the family is described by two supernatural numbers.
//! A column `(c,c)ᵀ` equals `T(c,1)·(1,1)ᵀ` and is folded into the first
//! number.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ematrix::EMatrix;
use crate::error::Result;
use crate::supernatural::{factorize, Multiplicity, SupernaturalNumber};
use crate::symbol::{FiniteSymbol, Generator, SymbolSpec};

/// One element `T(a,b)`, with `a ≥ b ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangular {
    #[serde(with = "crate::ematrix::decimal")]
    pub a: BigUint,
    #[serde(with = "crate::ematrix::decimal")]
    pub b: BigUint,
}

impl Triangular {
    pub fn new(a: impl Into<BigUint>, b: impl Into<BigUint>) -> Option<Self> {
        let (a, b) = (a.into(), b.into());
        (!b.is_zero() && a >= b).then_some(Triangular { a, b })
    }

    /// Reads `T(a,b)` off a matrix, or `None` outside the family.
    pub fn from_matrix(m: &EMatrix) -> Option<Self> {
        if m.shape() != (2, 2) || !m.get(0, 1).is_zero() {
            return None;
        }
        let (a, c, b) = (m.get(0, 0), m.get(1, 0), m.get(1, 1));
        if b.is_zero() || &(c + b) != a {
            return None;
        }
        Some(Triangular {
            a: a.clone(),
            b: b.clone(),
        })
    }

    pub fn to_matrix(&self) -> EMatrix {
        EMatrix::from_rows(&[
            vec![self.a.clone(), BigUint::zero()],
            vec![&self.a - &self.b, self.b.clone()],
        ])
        .expect("2×2 literal")
    }

    pub fn multiply(&self, other: &Triangular) -> Triangular {
        Triangular {
            a: &self.a * &other.a,
            b: &self.b * &other.b,
        }
    }
}

impl fmt::Display for Triangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.a, self.b)
    }
}

/// `(∏ aₙ, ∏ bₙ)` for an infinite product of triangular factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularPair {
    pub a: SupernaturalNumber,
    pub b: SupernaturalNumber,
}

impl TriangularPair {
    pub fn one() -> Self {
        TriangularPair {
            a: SupernaturalNumber::one(),
            b: SupernaturalNumber::one(),
        }
    }

    /// `(u, 1)`, the pair of the F₁ family.
    pub fn universal_unit() -> Self {
        TriangularPair {
            a: SupernaturalNumber::universal(),
            b: SupernaturalNumber::one(),
        }
    }

    pub fn times(&self, t: &Triangular) -> Self {
        TriangularPair {
            a: self.a.multiply_by(&t.a).expect("a ≥ 1"),
            b: self.b.multiply_by(&t.b).expect("b ≥ 1"),
        }
    }

    /// Both components restricted to primes `≤ bound`, for comparisons
    /// where one side is only known on small primes.
    pub fn restricted_to(&self, bound: u64) -> (BTreeMap<u64, Multiplicity>, BTreeMap<u64, Multiplicity>) {
        (self.a.restricted_to(bound), self.b.restricted_to(bound))
    }
}

impl fmt::Display for TriangularPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "profile")]
pub enum Profile {
    /// `exact` is false when the pair was extrapolated from a finite window.
    Pair {
        pair: TriangularPair,
        exact: bool,
    },
    NotInFamily,
}

impl Profile {
    pub fn pair(&self) -> Option<&TriangularPair> {
        match self {
            Profile::Pair { pair, .. } => Some(pair),
            Profile::NotInFamily => None,
        }
    }
}

/// `(c,c)ᵀ ↦ c`; `None` for any other column.
fn column_scalar(col: &EMatrix) -> Option<BigUint> {
    (col.shape() == (2, 1) && col.get(0, 0) == col.get(1, 0)).then(|| col.get(0, 0).clone())
}

fn with_column(pair: TriangularPair, col: &EMatrix) -> Option<TriangularPair> {
    let c = column_scalar(col)?;
    Some(TriangularPair {
        a: pair.a.multiply_by(&c).expect("positive column"),
        b: pair.b,
    })
}

impl FiniteSymbol {
    /// The exact pair of a finite prefix, or `NotInFamily`.
    pub fn triangular_profile(&self) -> Profile {
        let mut pair = TriangularPair::one();
        for f in self.factors() {
            match Triangular::from_matrix(f) {
                Some(t) => pair = pair.times(&t),
                None => return Profile::NotInFamily,
            }
        }
        match with_column(pair, self.initial_column()) {
            Some(pair) => Profile::Pair { pair, exact: true },
            None => Profile::NotInFamily,
        }
    }
}

/// The supernatural pair of a symbol whose factors all lie in the family.
///
/// The built-in families and explicit lists are handled in closed form.
/// Tensor and direct-sum combinators are sampled over `horizon` factors:
/// a prime still occurring in the second half of the window is taken to
/// recur forever, and the result is marked inexact.
pub fn triangular_profile(spec: &SymbolSpec, horizon: usize) -> Result<Profile> {
    let col = spec.initial_column();
    let closed = match spec.generator() {
        Generator::FFamily { n: 1 } => Some(TriangularPair::universal_unit()),
        Generator::FFamily { .. } | Generator::KOne | Generator::Uhf(_) => return Ok(Profile::NotInFamily),
        Generator::F1Extended => Some(TriangularPair {
            a: SupernaturalNumber::universal(),
            b: SupernaturalNumber::universal(),
        }),
        Generator::Explicit { factors, periodic } => {
            let Some(ts) = factors.iter().map(Triangular::from_matrix).collect::<Option<Vec<_>>>() else {
                return Ok(Profile::NotInFamily);
            };
            Some(if *periodic {
                TriangularPair {
                    a: infinite_over(ts.iter().map(|t| &t.a)),
                    b: infinite_over(ts.iter().map(|t| &t.b)),
                }
            } else {
                ts.iter().fold(TriangularPair::one(), |p, t| p.times(t))
            })
        }
        Generator::ScalarAmplify(m, inner) => {
            // The amplified column is M·(inner column), so M joins `a`.
            return Ok(match triangular_profile(inner, horizon)? {
                Profile::Pair { pair, exact } => Profile::Pair {
                    pair: TriangularPair {
                        a: pair.a.multiply_by(m)?,
                        b: pair.b,
                    },
                    exact,
                },
                Profile::NotInFamily => Profile::NotInFamily,
            });
        }
        Generator::Tensor(..) | Generator::DirectSum(..) => None,
    };
    if let Some(pair) = closed {
        return Ok(match with_column(pair, col) {
            Some(pair) => Profile::Pair { pair, exact: true },
            None => Profile::NotInFamily,
        });
    }
    sampled_profile(spec, horizon)
}

/// `∏ p^∞` over every prime dividing one of `values`.
fn infinite_over<'a>(values: impl Iterator<Item = &'a BigUint>) -> SupernaturalNumber {
    let mut primes = BTreeMap::new();
    for v in values {
        for (p, _) in factorize(v) {
            primes.insert(p, Multiplicity::Infinite);
        }
    }
    SupernaturalNumber::from_parts(primes, Multiplicity::ZERO).expect("factorize yields primes")
}

fn sampled_profile(spec: &SymbolSpec, horizon: usize) -> Result<Profile> {
    let window = spec.len().map_or(horizon, |n| n.min(horizon));
    let exact = spec.len().is_some_and(|n| n <= horizon);
    let mut ts = Vec::with_capacity(window);
    for f in spec.factors().take(window) {
        match Triangular::from_matrix(&f?) {
            Some(t) => ts.push(t),
            None => return Ok(Profile::NotInFamily),
        }
    }
    let pair = if exact {
        ts.iter().fold(TriangularPair::one(), |p, t| p.times(t))
    } else {
        let half = window / 2;
        TriangularPair {
            a: extrapolate(ts.iter().map(|t| &t.a), half),
            b: extrapolate(ts.iter().map(|t| &t.b), half),
        }
    };
    Ok(match with_column(pair, spec.initial_column()) {
        Some(pair) => Profile::Pair { pair, exact },
        None => Profile::NotInFamily,
    })
}

/// Multiplicities counted over the window, with primes that still occur at
/// or after position `tail_from` promoted to `∞`.
fn extrapolate<'a>(values: impl Iterator<Item = &'a BigUint>, tail_from: usize) -> SupernaturalNumber {
    let mut primes: BTreeMap<u64, Multiplicity> = BTreeMap::new();
    for (pos, v) in values.enumerate() {
        if v.is_one() {
            continue;
        }
        for (p, k) in factorize(v) {
            let add = if pos >= tail_from {
                Multiplicity::Infinite
            } else {
                Multiplicity::Finite(k)
            };
            let e = primes.entry(p).or_insert(Multiplicity::ZERO);
            *e = *e + add;
        }
    }
    SupernaturalNumber::from_parts(primes, Multiplicity::ZERO).expect("factorize yields primes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: u64, b: u64) -> Triangular {
        Triangular::new(a, b).unwrap()
    }

    #[test]
    fn family_membership_and_closure() {
        assert_eq!(
            Triangular::from_matrix(&EMatrix::from_u64(&[&[3, 0], &[2, 1]])),
            Some(t(3, 1))
        );
        assert_eq!(Triangular::from_matrix(&EMatrix::from_u64(&[&[1, 0], &[1, 1]])), None);
        assert_eq!(Triangular::from_matrix(&EMatrix::from_u64(&[&[2]])), None);
        let (x, y) = (t(6, 2), t(5, 3));
        assert_eq!(
            x.to_matrix().multiply(&y.to_matrix()).unwrap(),
            x.multiply(&y).to_matrix()
        );
        assert!(Triangular::new(2u32, 3u32).is_none());
    }

    #[test]
    fn closed_form_profiles() {
        let f1 = SymbolSpec::f_family(1).unwrap();
        assert_eq!(
            triangular_profile(&f1, 0).unwrap(),
            Profile::Pair {
                pair: TriangularPair::universal_unit(),
                exact: true
            }
        );
        let amp = SymbolSpec::scalar_amplify(6u32.into(), f1.clone()).unwrap();
        assert_eq!(
            triangular_profile(&amp, 0).unwrap(),
            triangular_profile(&f1, 0).unwrap()
        );

        let ext = triangular_profile(&SymbolSpec::f1_extended(), 0).unwrap();
        let pair = ext.pair().unwrap();
        assert_eq!(pair.a, SupernaturalNumber::universal());
        assert_eq!(pair.b, SupernaturalNumber::universal());

        let f2 = SymbolSpec::f_family(2).unwrap();
        assert_eq!(triangular_profile(&f2, 10).unwrap(), Profile::NotInFamily);
        assert_eq!(
            triangular_profile(&SymbolSpec::k_one(), 10).unwrap(),
            Profile::NotInFamily
        );
    }

    #[test]
    fn f1_extended_profile_matches_enumeration() {
        // Count prime multiplicities directly over n ≤ 50: each prime ≤ 50
        // keeps recurring in both a and b, so both extrapolate to ∞.
        let mut a_counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut b_counts: BTreeMap<u64, u64> = BTreeMap::new();
        for n in 1..=50u64 {
            for m in 1..=n {
                for (p, k) in factorize(&BigUint::from(n)) {
                    *a_counts.entry(p).or_default() += k;
                }
                for (p, k) in factorize(&BigUint::from(m)) {
                    *b_counts.entry(p).or_default() += k;
                }
            }
        }
        let closed = triangular_profile(&SymbolSpec::f1_extended(), 0).unwrap();
        let pair = closed.pair().unwrap();
        for p in crate::supernatural::primes_up_to(50) {
            assert!(a_counts[&p] > 0 && b_counts[&p] > 0);
            assert_eq!(pair.a.multiplicity(p), Multiplicity::Infinite);
            assert_eq!(pair.b.multiplicity(p), Multiplicity::Infinite);
        }
    }

    #[test]
    fn explicit_profiles() {
        let col = EMatrix::column([2u32, 2]);
        let fin = SymbolSpec::explicit(col.clone(), vec![t(3, 1).to_matrix(), t(4, 2).to_matrix()], false).unwrap();
        let p = triangular_profile(&fin, 0).unwrap();
        let pair = p.pair().unwrap();
        assert_eq!(pair.a, SupernaturalNumber::from_u64(24).unwrap());
        assert_eq!(pair.b, SupernaturalNumber::from_u64(2).unwrap());

        let per = SymbolSpec::explicit(col, vec![t(6, 1).to_matrix()], true).unwrap();
        let pair = triangular_profile(&per, 0).unwrap().pair().unwrap().clone();
        assert_eq!(pair.a.multiplicity(2), Multiplicity::Infinite);
        assert_eq!(pair.a.multiplicity(3), Multiplicity::Infinite);
        assert_eq!(pair.a.multiplicity(5), Multiplicity::ZERO);
        assert_eq!(pair.b, SupernaturalNumber::one());

        let uneven = SymbolSpec::explicit(EMatrix::column([1u32, 2]), vec![t(2, 1).to_matrix()], true).unwrap();
        assert_eq!(triangular_profile(&uneven, 0).unwrap(), Profile::NotInFamily);
    }

    #[test]
    fn sampled_profile_for_combinators() {
        let three = SymbolSpec::explicit(EMatrix::column([1u32]), vec![EMatrix::scalar(3u32)], true).unwrap();
        let f1 = SymbolSpec::f_family(1).unwrap();
        let tensored = SymbolSpec::tensor(three, f1);
        let p = triangular_profile(&tensored, 12).unwrap();
        let Profile::Pair { pair, exact } = p else {
            panic!("expected a pair")
        };
        assert!(!exact);
        assert_eq!(pair.a.multiplicity(3), Multiplicity::Infinite);
        assert_eq!(pair.b.multiplicity(3), Multiplicity::Infinite);
        assert_eq!(pair.b.multiplicity(2), Multiplicity::ZERO);
    }

    #[test]
    fn finite_profile_is_exact() {
        let fs = SymbolSpec::f_family(1).unwrap().prefix(4).unwrap();
        let pair = fs.triangular_profile().pair().unwrap().clone();
        assert_eq!(pair.a, SupernaturalNumber::from_u64(120).unwrap());
        assert_eq!(pair.b, SupernaturalNumber::one());
        let grouped = fs.telescope(&[1, 4]).unwrap();
        assert_eq!(grouped.triangular_profile(), fs.triangular_profile());
    }
}
