//! Strategies shared by the property suites and the acceptance harness.

#![allow(dead_code)]

use bratteli::equivalence::Witness;
use bratteli::{EMatrix, FiniteSymbol, SymbolSpec};
use proptest::prelude::*;

/// Arbitrary non-negative matrix with entries in `0..=max`.
pub fn matrix(rows: usize, cols: usize, max: u64) -> impl Strategy<Value = EMatrix> {
    prop::collection::vec(0..=max, rows * cols)
        .prop_map(move |v| EMatrix::from_vec(rows, cols, v.into_iter().map(Into::into).collect()).expect("sizes match"))
}

/// Admissible matrix: zero rows and columns are patched with a 1.
pub fn admissible(rows: usize, cols: usize, max: u64) -> impl Strategy<Value = EMatrix> {
    matrix(rows, cols, max).prop_map(move |mut m| {
        for i in 0..rows {
            if m.row_slice(i).iter().all(|v| *v == 0u32.into()) {
                m.set(i, i % cols, 1u32.into());
            }
        }
        for j in 0..cols {
            if (0..rows).all(|i| *m.get(i, j) == 0u32.into()) {
                m.set(j % rows, j, 1u32.into());
            }
        }
        m
    })
}

pub fn admissible_any(max_dim: usize, max: u64) -> impl Strategy<Value = EMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| admissible(r, c, max))
}

/// Admissible chain `M₀, M₁, …` with `M₀` a column and `Mᵢ` shaped
/// `dᵢ₊₁ × dᵢ`.
pub fn chain(len: usize, max_dim: usize, max: u64) -> impl Strategy<Value = Vec<EMatrix>> {
    prop::collection::vec(1..=max_dim, len).prop_flat_map(move |dims| {
        let shapes: Vec<(usize, usize)> = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| (d, if i == 0 { 1 } else { dims[i - 1] }))
            .collect();
        shapes
            .into_iter()
            .map(|(r, c)| admissible(r, c, max).boxed())
            .collect::<Vec<_>>()
    })
}

pub fn finite_symbol(max_len: usize, max_dim: usize, max: u64) -> impl Strategy<Value = FiniteSymbol> {
    (1..=max_len + 1)
        .prop_flat_map(move |n| chain(n, max_dim, max))
        .prop_map(|c| FiniteSymbol::new(c[0].clone(), c[1..].to_vec()).expect("chain is admissible"))
}

/// A pair of sequences together with a witness that relates them by
/// construction: `A = (C₀, C₂C₁, C₄C₃, …)` and `B = (C₁C₀, C₃C₂, …)`.
#[derive(Clone, Debug)]
pub struct Interleaved {
    pub a: Vec<EMatrix>,
    pub b: Vec<EMatrix>,
    pub witness: Witness,
}

impl Interleaved {
    pub fn specs(&self) -> (SymbolSpec, SymbolSpec) {
        let mk = |s: &[EMatrix]| SymbolSpec::explicit(s[0].clone(), s[1..].to_vec(), false).expect("admissible chain");
        (mk(&self.a), mk(&self.b))
    }
}

pub fn interleaved(depth: usize, max_dim: usize, max: u64) -> impl Strategy<Value = Interleaved> {
    chain(2 * depth, max_dim, max).prop_map(move |c| {
        let a = (0..depth)
            .map(|n| {
                if n == 0 {
                    c[0].clone()
                } else {
                    c[2 * n].multiply(&c[2 * n - 1]).unwrap()
                }
            })
            .collect();
        let b = (0..depth).map(|n| c[2 * n + 1].multiply(&c[2 * n]).unwrap()).collect();
        Interleaved {
            a,
            b,
            witness: Witness {
                c,
                r_cuts: (1..=depth).collect(),
                m_cuts: (1..=depth).collect(),
            },
        }
    })
}

/// Strictly increasing cut positions over `n` factors ending at `n`.
pub fn cuts(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<bool>(), n.saturating_sub(1)).prop_map(move |keep| {
        let mut cuts: Vec<usize> = keep
            .iter()
            .enumerate()
            .filter(|(_, &k)| k)
            .map(|(i, _)| i + 1)
            .collect();
        cuts.push(n);
        cuts
    })
}

pub fn mu(m: &EMatrix) -> num_bigint::BigUint {
    m.max_entry()
}
