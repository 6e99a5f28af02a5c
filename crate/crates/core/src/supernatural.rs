//! Supernatural numbers `∏ p^{k_p}` with `k_p ∈ ℕ ∪ {∞}`.
//!
//! Only finitely many primes are stored explicitly. Every other prime carries
//! the common multiplicity [`SupernaturalNumber::others`], so the universal
//! number `∏ p^∞` over all primes is representable exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub const ZERO: Multiplicity = Multiplicity::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }
}

impl std::ops::Add for Multiplicity {
    type Output = Multiplicity;

    fn add(self, other: Multiplicity) -> Multiplicity {
        match (self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => Multiplicity::Finite(a + b),
            _ => Multiplicity::Infinite,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(k) => write!(f, "{k}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Multiplicity::Finite(k)),
            Raw::Text(s) => match s.trim() {
                "inf" | "∞" | "infinity" => Ok(Multiplicity::Infinite),
                t => t
                    .parse()
                    .map(Multiplicity::Finite)
                    .map_err(|_| serde::de::Error::custom(format!("bad multiplicity {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupernaturalNumber {
    explicit: BTreeMap<u64, Multiplicity>,
    others: Multiplicity,
}

impl Default for SupernaturalNumber {
    fn default() -> Self {
        Self::one()
    }
}

impl SupernaturalNumber {
    pub fn one() -> Self {
        SupernaturalNumber {
            explicit: BTreeMap::new(),
            others: Multiplicity::ZERO,
        }
    }

    /// `∏ p^∞` over all primes.
    pub fn universal() -> Self {
        SupernaturalNumber {
            explicit: BTreeMap::new(),
            others: Multiplicity::Infinite,
        }
    }

    pub fn prime_power(p: u64, k: Multiplicity) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        let mut s = Self::one();
        s.set(p, k);
        Ok(s)
    }

    pub fn from_parts(explicit: BTreeMap<u64, Multiplicity>, others: Multiplicity) -> Result<Self> {
        if let Some(p) = explicit.keys().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        let mut s = SupernaturalNumber { explicit, others };
        s.normalize();
        Ok(s)
    }

    pub fn from_biguint(n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidSpec("0 has no supernatural form".into()));
        }
        let mut s = Self::one();
        for (p, k) in factorize(n) {
            s.set(p, Multiplicity::Finite(k));
        }
        Ok(s)
    }

    pub fn from_u64(n: u64) -> Result<Self> {
        Self::from_biguint(&BigUint::from(n))
    }

    fn set(&mut self, p: u64, k: Multiplicity) {
        if k == self.others {
            self.explicit.remove(&p);
        } else {
            self.explicit.insert(p, k);
        }
    }

    fn normalize(&mut self) {
        let others = self.others;
        self.explicit.retain(|_, k| *k != others);
    }

    pub fn multiplicity(&self, p: u64) -> Multiplicity {
        self.explicit.get(&p).copied().unwrap_or(self.others)
    }

    pub fn others(&self) -> Multiplicity {
        self.others
    }

    /// Explicitly stored exceptions to [`Self::others`].
    pub fn explicit(&self) -> &BTreeMap<u64, Multiplicity> {
        &self.explicit
    }

    pub fn is_finite_number(&self) -> bool {
        self.others.is_zero() && self.explicit.values().all(|k| matches!(k, Multiplicity::Finite(_)))
    }

    pub fn multiply(&self, other: &SupernaturalNumber) -> SupernaturalNumber {
        let mut out = SupernaturalNumber {
            explicit: BTreeMap::new(),
            others: self.others + other.others,
        };
        for &p in self.explicit.keys().chain(other.explicit.keys()) {
            let k = self.multiplicity(p) + other.multiplicity(p);
            out.set(p, k);
        }
        out
    }

    pub fn multiply_by(&self, n: &BigUint) -> Result<SupernaturalNumber> {
        Ok(self.multiply(&Self::from_biguint(n)?))
    }

    /// `self | other`: every prime multiplicity of `self` is at most that of
    /// `other` (with `k ≤ ∞` for all `k`).
    pub fn divides(&self, other: &SupernaturalNumber) -> bool {
        if self.others > other.others {
            return false;
        }
        self.explicit
            .keys()
            .chain(other.explicit.keys())
            .all(|&p| self.multiplicity(p) <= other.multiplicity(p))
    }

    /// The multiplicities of all primes `≤ bound`.
    pub fn restricted_to(&self, bound: u64) -> BTreeMap<u64, Multiplicity> {
        primes_up_to(bound)
            .into_iter()
            .map(|p| (p, self.multiplicity(p)))
            .collect()
    }

    /// The primes with positive multiplicity, ascending; infinite when
    /// `others > 0`, so callers take a prefix.
    pub fn support(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        if self.others.is_zero() {
            Box::new(self.explicit.iter().filter(|(_, k)| !k.is_zero()).map(|(&p, _)| p))
        } else {
            Box::new(Primes::new().filter(move |&p| !self.multiplicity(p).is_zero()))
        }
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .explicit
            .iter()
            .map(|(p, k)| match k {
                Multiplicity::Finite(1) => p.to_string(),
                Multiplicity::Finite(k) => format!("{p}^{k}"),
                Multiplicity::Infinite => format!("{p}^∞"),
            })
            .collect();
        let others = match self.others {
            Multiplicity::Finite(0) => None,
            Multiplicity::Finite(k) => Some(format!("∏p^{k}")),
            Multiplicity::Infinite => Some("∏p^∞".to_string()),
        };
        match (parts.is_empty(), others) {
            (true, None) => write!(f, "1"),
            (false, None) => write!(f, "{}", parts.join("·")),
            (true, Some(o)) => write!(f, "{o}"),
            (false, Some(o)) => write!(f, "{o} (except {})", parts.join("·")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SupernaturalRepr {
    #[serde(default)]
    primes: BTreeMap<String, Multiplicity>,
    #[serde(default = "zero_multiplicity")]
    others: Multiplicity,
}

fn zero_multiplicity() -> Multiplicity {
    Multiplicity::ZERO
}

impl Serialize for SupernaturalNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SupernaturalRepr {
            primes: self.explicit.iter().map(|(p, k)| (p.to_string(), *k)).collect(),
            others: self.others,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SupernaturalNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SupernaturalRepr::deserialize(d)?;
        let explicit = raw
            .primes
            .iter()
            .map(|(p, k)| p.trim().parse::<u64>().map(|p| (p, *k)))
            .collect::<std::result::Result<BTreeMap<_, _>, _>>()
            .map_err(serde::de::Error::custom)?;
        SupernaturalNumber::from_parts(explicit, raw.others).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    Primes::new().take_while(|&p| p <= bound).collect()
}

/// Ascending primes by trial division against the primes found so far.
#[derive(Clone, Debug, Default)]
pub struct Primes {
    found: Vec<u64>,
}

impl Primes {
    pub fn new() -> Self {
        Primes::default()
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let mut c = self.found.last().map_or(2, |&p| p + 1);
        loop {
            if self
                .found
                .iter()
                .take_while(|&&p| p * p <= c)
                .all(|&p| !c.is_multiple_of(p))
            {
                self.found.push(c);
                return Some(c);
            }
            c += 1;
        }
    }
}

/// Prime factorization by trial division. Factors are returned ascending.
pub fn factorize(n: &BigUint) -> Vec<(u64, u64)> {
    if let Some(small) = n.to_u64() {
        return factorize_u64(small);
    }
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    loop {
        if let Some(r) = rest.to_u64() {
            // Every prime below `d` is gone, so the tail cannot repeat one.
            out.extend(factorize_u64(r));
            return out;
        }
        let bd = BigUint::from(d);
        let mut k = 0;
        loop {
            let (q, r) = rest.div_rem(&bd);
            if !r.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
}

fn factorize_u64(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        let mut k = 0;
        while n.is_multiple_of(d) {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        match out.last_mut() {
            Some((p, k)) if *p == n => *k += 1,
            _ => out.push((n, 1)),
        }
    }
    out
}
