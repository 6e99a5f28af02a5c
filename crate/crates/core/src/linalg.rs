//! Exact elimination kernels shared by the integer and rational matrix types.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of an integer matrix given as rows, by fraction-free (Bareiss)
/// elimination. Every intermediate value stays an integer; the divisions by
/// the previous pivot are exact.
pub(crate) fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut prev_pivot = BigInt::one();

    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot_row) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col].clone();
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail {
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *v = (&pivot * &*v - &factor * p) / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}

/// Solves `a · x = b` for every right-hand side column of `b`, where `a` is
/// `n × k` with full column rank `k`. Returns `None` if `a` is rank deficient
/// or any system is inconsistent. The solution is unique when it exists.
pub(crate) fn solve_full_column_rank(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let k = if n == 0 { 0 } else { a[0].len() };
    let nrhs = if n == 0 { 0 } else { b[0].len() };

    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(ar, br)| ar.iter().chain(br.iter()).cloned().collect())
        .collect();

    let mut pivots = Vec::with_capacity(k);
    let mut row = 0;
    for col in 0..k {
        let pr = (row..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut().skip(col) {
            *v = &*v * &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, p) in other.iter_mut().zip(&pivot_row).skip(col) {
                *v -= p * &f;
            }
        }
        pivots.push(row);
        row += 1;
    }

    // Rows below the pivots must reduce to 0 = 0.
    if m[row..].iter().any(|r| r[k..].iter().any(|v| !v.is_zero())) {
        return None;
    }

    let mut x = vec![vec![BigRational::zero(); nrhs]; k];
    for (var, &pr) in pivots.iter().enumerate() {
        x[var].clone_from_slice(&m[pr][k..]);
    }
    Some(x)
}
