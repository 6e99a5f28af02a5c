mod common;

use bratteli::equivalence::{certify, sigma_check, solve_intertwiner, Semigroup, SigmaBounds, SigmaOutcome};
use bratteli::operator_model::{span_dimension, RationalMatrix};
use bratteli::{Certificate, Dim, DimVector, EMatrix, OperatorModel, SymbolSpec, Triangular};
use common::*;
use num_bigint::BigUint;
use proptest::prelude::*;

fn dim_vector(len: usize) -> impl Strategy<Value = DimVector> {
    prop::collection::vec(prop_oneof![1 => Just(None), 3 => (0u64..6).prop_map(Some)], len)
        .prop_map(|v| DimVector::new(v.into_iter().map(|d| d.map_or(Dim::Infinite, Dim::finite)).collect()))
}

proptest! {
    #[test]
    fn multiplication_is_associative(
        (a, b, c) in (1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(i, j, k, l)| (matrix(i, j, 4), matrix(j, k, 4), matrix(k, l, 4)))
    ) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kronecker_mixed_product(
        (a, b, c, d) in (1usize..3, 1usize..3, 1usize..3, 1usize..3, 1usize..3, 1usize..3)
            .prop_flat_map(|(i, j, k, l, m, n)| (matrix(i, j, 3), matrix(l, m, 3), matrix(j, k, 3), matrix(m, n, 3)))
    ) {
        let lhs = a.kronecker(&b).multiply(&c.kronecker(&d)).unwrap();
        let rhs = a.multiply(&c).unwrap().kronecker(&b.multiply(&d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn admissibility_is_closed(
        (a, b) in (1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(i, j, k)| (admissible(i, j, 3), admissible(j, k, 3))),
        c in admissible_any(3, 3),
    ) {
        prop_assert!(a.multiply(&b).unwrap().is_admissible());
        prop_assert!(a.kronecker(&c).is_admissible());
        prop_assert!(a.direct_sum(&c).is_admissible());
    }

    #[test]
    fn mu_is_monotone(
        (a, b) in (1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(i, j, k)| (admissible(i, j, 5), admissible(j, k, 5)))
    ) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(mu(&ab) >= mu(&a).max(mu(&b)));
    }

    #[test]
    fn propagate_dim_composes(
        (e1, e2, q) in (1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(a, b, c)| (matrix(a, b, 3), matrix(c, a, 3), dim_vector(c)))
    ) {
        let stepwise = e1.propagate_dim(&e2.propagate_dim(&q).unwrap()).unwrap();
        let direct = e2.multiply(&e1).unwrap().propagate_dim(&q).unwrap();
        prop_assert_eq!(stepwise, direct);
    }

    #[test]
    fn propagate_dim_is_additive(
        (e, q, r) in (1usize..4, 1usize..4)
            .prop_flat_map(|(a, b)| (matrix(a, b, 3), dim_vector(a), dim_vector(a)))
    ) {
        let sum = DimVector::new(q.entries().iter().zip(r.entries()).map(|(x, y)| x.add(y)).collect());
        let lhs = e.propagate_dim(&sum).unwrap();
        let (pq, pr) = (e.propagate_dim(&q).unwrap(), e.propagate_dim(&r).unwrap());
        let rhs = DimVector::new(pq.entries().iter().zip(pr.entries()).map(|(x, y)| x.add(y)).collect());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn telescoping_preserves_products(
        (fs, cuts) in finite_symbol(6, 3, 3)
            .prop_filter("needs a factor", |fs| !fs.is_empty())
            .prop_flat_map(|fs| { let n = fs.len(); (Just(fs), cuts(n)) })
    ) {
        let t = fs.telescope(&cuts).unwrap();
        prop_assert_eq!(t.total_product().unwrap(), fs.total_product().unwrap());
        let (long, short) = (fs.shapes().unwrap(), t.shapes().unwrap());
        prop_assert_eq!(&short[..2], &long[..2]);
        for (k, &c) in cuts.iter().enumerate() {
            prop_assert_eq!(&short[k + 2], &long[c + 1]);
        }
    }

    #[test]
    fn shapes_chain(fs in finite_symbol(6, 4, 3)) {
        let shapes = fs.shapes().unwrap();
        prop_assert_eq!(shapes.len(), fs.len() + 2);
        for (k, f) in fs.sequence().iter().enumerate() {
            prop_assert_eq!(f.cols(), shapes[k].len());
            prop_assert_eq!(f.rows(), shapes[k + 1].len());
        }
    }

    #[test]
    fn triangular_family_is_closed(a in 1u64..50, b in 1u64..50, c in 1u64..50, d in 1u64..50) {
        let x = Triangular::new(a.max(b), a.min(b)).unwrap();
        let y = Triangular::new(c.max(d), c.min(d)).unwrap();
        let product = x.to_matrix().multiply(&y.to_matrix()).unwrap();
        let t = Triangular::from_matrix(&product);
        prop_assert_eq!(t.as_ref(), Some(&x.multiply(&y)));
        prop_assert_eq!(x.multiply(&y), y.multiply(&x));
    }

    #[test]
    fn intertwiner_is_unique_for_invertible_c(
        (c, x) in (1usize..4)
            .prop_flat_map(|n| (admissible(n, n, 3), admissible_any(3, 3).prop_flat_map(move |x| {
                let rows = x.rows();
                admissible(rows, n, 3)
            })))
            .prop_filter("c must be invertible", |(c, _)| c.rank_over_rationals() == c.rows())
    ) {
        let target = x.multiply(&c).unwrap();
        let bound = target.max_entry();
        prop_assert_eq!(solve_intertwiner(&c, &target, &bound).unwrap(), Some(x));
    }

    #[test]
    fn constructed_witnesses_replay(w in (1usize..4).prop_flat_map(|d| interleaved(d, 3, 2))) {
        prop_assert!(w.witness.check(&w.a, &w.b).is_ok());
        let (a, b) = w.specs();
        prop_assert!(w.witness.replay(&a, &b).unwrap().verified);
    }

    #[test]
    fn tampered_witnesses_fail(
        (w, which, row, col) in (1usize..4)
            .prop_flat_map(|d| (interleaved(d, 3, 2), 0..2 * d, any::<prop::sample::Index>(), any::<prop::sample::Index>()))
    ) {
        let mut bad = w.witness.clone();
        let m = &mut bad.c[which];
        let (i, j) = (row.index(m.rows()), col.index(m.cols()));
        let v = m.get(i, j) + 1u32;
        m.set(i, j, v);
        prop_assert!(bad.check(&w.a, &w.b).is_err());
    }

    #[test]
    fn tensor_commutes_with_partial_products(k in 0usize..5, which in 0usize..3) {
        let pick = |i: usize| match i % 3 {
            0 => SymbolSpec::f_family(1).unwrap(),
            1 => SymbolSpec::k_one(),
            _ => SymbolSpec::f1_extended(),
        };
        let (a, b) = (pick(which), pick(which + 1));
        let t = SymbolSpec::tensor(a.clone(), b.clone());
        let lhs = t.partial_product(k).unwrap().to_column();
        let rhs = a.partial_product(k).unwrap().to_column().kronecker(&b.partial_product(k).unwrap().to_column());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn f_family_is_a_kronecker_power(n in 1u32..4, idx in 2u64..12) {
        let f1 = SymbolSpec::f_family(1).unwrap().factor(idx).unwrap();
        prop_assert_eq!(SymbolSpec::f_family(n).unwrap().factor(idx).unwrap(), f1.kronecker_power(n));
    }

    #[test]
    fn sigma_outcome_is_monotone_in_the_bound(m in 1u64..40, small in 1u64..15, extra in 0u64..10) {
        let chosen: Vec<EMatrix> = std::iter::once(m)
            .chain(2..30)
            .map(|a| Triangular::new(a, 1u32).unwrap().to_matrix())
            .collect();
        let run = |max_p| sigma_check(Semigroup::UnitSecondParameter, &chosen, SigmaBounds { max_p, max_s: 30 }).unwrap();
        match (run(small), run(small + extra)) {
            (SigmaOutcome::FailsAt { p }, big) => prop_assert_eq!(big, SigmaOutcome::FailsAt { p }),
            (SigmaOutcome::HoldsUpTo { witnesses: w1, .. }, SigmaOutcome::HoldsUpTo { witnesses: w2, .. }) => {
                prop_assert_eq!(&w2[..w1.len()], &w1[..]);
            }
            (SigmaOutcome::HoldsUpTo { .. }, SigmaOutcome::FailsAt { p }) => prop_assert!(p > small),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_results_replay_and_exclude_obstructions(
        (f, col, shift, block) in (1usize..3)
            .prop_flat_map(|n| (admissible(n, n, 2), admissible(n, 1, 2), 0usize..2, 1usize..3))
    ) {
        // B is a telescoping of the periodic symbol A, so the two are
        // isomorphic and no obstruction may fire.
        let a = SymbolSpec::explicit(col.clone(), vec![f.clone()], true).unwrap();
        let power = |k: usize| (1..k).fold(f.clone(), |acc, _| f.multiply(&acc).unwrap());
        let b_col = if shift == 0 { col } else { power(shift).multiply(&col).unwrap() };
        let b = SymbolSpec::explicit(b_col, vec![power(block)], true).unwrap();
        let cert = certify(&a, &b, 4).unwrap();
        prop_assert!(!cert.is_non_isomorphic());
        if let Certificate::EquivalentWitness { witness, replay } = &cert {
            prop_assert!(replay.verified);
            prop_assert!(witness.replay(&a, &b).unwrap().verified);
        }
        prop_assert!(!certify(&b, &a, 4).unwrap().is_non_isomorphic());
    }

    #[test]
    fn basis_operators_are_matrix_units(p in 1u64..4, q in 1u64..3, s in 2u64..4, pick in any::<prop::sample::Index>()) {
        let model = OperatorModel::build(p, q, s).unwrap();
        let r = model.resolution() as u64;
        let divisors: Vec<u64> = (1..=r / 2).filter(|d| r.is_multiple_of(*d)).collect();
        let pp = divisors[pick.index(divisors.len())];
        let ops = model.basis_ops(pp).unwrap();
        let n = pp as usize;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert_eq!(ops.a(i, j).mul(ops.a(j, k)), ops.a(i, k).clone());
                    prop_assert_eq!(ops.b(i, j).mul(ops.b(j, k)), ops.b(i, k).clone());
                    prop_assert!(ops.a(i, j).mul(ops.b(j, k)).is_zero());
                }
            }
        }
        let all: Vec<&RationalMatrix> = ops.all().collect();
        prop_assert_eq!(span_dimension(&all), 2 * n * n);
        prop_assert_eq!(ops.a(0, 0).rank() as u64, r / pp - 1);
        prop_assert_eq!(model.multiplicities(pp).unwrap(), (BigUint::from(r / pp - 1), BigUint::from(1u32)));
    }
}
