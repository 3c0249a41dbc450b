//! LLL reduction of integer bases with exact big-integer rows and a
//! binary64 Gram–Schmidt shadow (Schnorr–Euchner style, lazy size reduction).

use crate::hp::bigint_to_f64_scaled;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LllError {
    #[error("basis rows have inconsistent lengths")]
    Shape,
    #[error("reduction did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("basis is numerically degenerate at row {0}")]
    Degenerate(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LllStats {
    pub swaps: usize,
    pub size_reductions: usize,
}

/// Entries are rescaled by `2^-shift` so the largest fits well inside binary64.
const TARGET_BITS: i64 = 400;
const ETA: f64 = 0.51;

struct Shadow {
    shift: i64,
    rows: Vec<Vec<f64>>,
}

impl Shadow {
    fn new(basis: &[Vec<BigInt>]) -> Self {
        let max_bits = basis
            .iter()
            .flat_map(|r| r.iter())
            .map(|x| x.bits() as i64)
            .max()
            .unwrap_or(0);
        let shift = (max_bits - TARGET_BITS).max(0);
        let rows = basis.iter().map(|r| to_f64_row(r, shift)).collect();
        Self { shift, rows }
    }
}

fn to_f64_row(r: &[BigInt], shift: i64) -> Vec<f64> {
    r.iter().map(|x| bigint_to_f64_scaled(x, -shift)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place LLL reduction with parameter `delta` (e.g. 0.99).
pub fn lll_reduce(basis: &mut [Vec<BigInt>], delta: f64) -> Result<LllStats, LllError> {
    let d = basis.len();
    if d == 0 {
        return Ok(LllStats::default());
    }
    let n = basis[0].len();
    if basis.iter().any(|r| r.len() != n) {
        return Err(LllError::Shape);
    }
    let mut sh = Shadow::new(basis);
    let mut mu = vec![vec![0.0f64; d]; d];
    let mut r = vec![vec![0.0f64; d]; d];
    let mut stats = LllStats::default();

    let gs_row = |k: usize, sh: &Shadow, mu: &mut Vec<Vec<f64>>, r: &mut Vec<Vec<f64>>| {
        for j in 0..k {
            let mut v = dot(&sh.rows[k], &sh.rows[j]);
            for i in 0..j {
                v -= mu[j][i] * r[k][i];
            }
            r[k][j] = v;
            mu[k][j] = v / r[j][j];
        }
        let mut v = dot(&sh.rows[k], &sh.rows[k]);
        for j in 0..k {
            v -= mu[k][j] * r[k][j];
        }
        r[k][k] = v;
    };

    gs_row(0, &sh, &mut mu, &mut r);
    if !(r[0][0] > 0.0) {
        return Err(LllError::Degenerate(0));
    }
    let max_iter = 200_000 + 50 * d * d * d;
    let mut iter = 0usize;
    let mut k = 1;
    while k < d {
        iter += 1;
        if iter > max_iter {
            return Err(LllError::NoConvergence(max_iter));
        }
        // lazy size reduction of row k
        let mut rounds = 0;
        loop {
            gs_row(k, &sh, &mut mu, &mut r);
            let mut changed = false;
            for j in (0..k).rev() {
                let m = mu[k][j];
                if m.abs() <= ETA {
                    continue;
                }
                let x = m.round();
                changed = true;
                stats.size_reductions += 1;
                let xb = float_to_bigint(x);
                let (head, tail) = basis.split_at_mut(k);
                for (bk, bj) in tail[0].iter_mut().zip(&head[j]) {
                    *bk -= &xb * bj;
                }
                for i in 0..j {
                    mu[k][i] -= x * mu[j][i];
                }
                mu[k][j] -= x;
            }
            if !changed {
                break;
            }
            sh.rows[k] = to_f64_row(&basis[k], sh.shift);
            rounds += 1;
            if rounds > 200 {
                return Err(LllError::NoConvergence(rounds));
            }
        }
        if !(r[k][k] > 0.0) {
            // numerically dependent; a zero row means the input was not a basis
            if basis[k].iter().all(|x| x.is_zero()) {
                return Err(LllError::Degenerate(k));
            }
            r[k][k] = f64::MIN_POSITIVE;
        }
        let m = mu[k][k - 1];
        if r[k][k] < (delta - m * m) * r[k - 1][k - 1] {
            basis.swap(k, k - 1);
            sh.rows.swap(k, k - 1);
            stats.swaps += 1;
            if k > 1 {
                k -= 1;
            } else {
                gs_row(0, &sh, &mut mu, &mut r);
            }
        } else {
            k += 1;
        }
    }
    Ok(stats)
}

fn float_to_bigint(x: f64) -> BigInt {
    let dy = crate::hp::Dyadic::from_f64(x);
    if dy.exp >= 0 {
        dy.mantissa << dy.exp as usize
    } else {
        // |x| >= 1 after rounding, so a negative exponent means an exact integer mantissa
        let m = dy.mantissa;
        let s = (-dy.exp) as usize;
        if m.is_negative() {
            -((-m) >> s)
        } else {
            m >> s
        }
    }
}

/// Squared Euclidean norm.
pub fn norm2(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn det3(m: &[Vec<BigInt>]) -> BigInt {
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    #[test]
    fn classic_example() {
        let mut m = b(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let before = det3(&m).abs();
        lll_reduce(&mut m, 0.99).unwrap();
        assert_eq!(det3(&m).abs(), before);
        assert_eq!(norm2(&m[0]), BigInt::from(1));
    }

    #[test]
    fn recovers_small_relation() {
        // knapsack-style: find x with 3x1 + 7x2 - 5x3 ≈ 0 heavily weighted
        let w = 1i64 << 40;
        let mut m = b(&[&[1, 0, 0, 3 * w], &[0, 1, 0, 7 * w], &[0, 0, 1, -5 * w]]);
        lll_reduce(&mut m, 0.99).unwrap();
        assert!(m.iter().any(|r| r[3].is_zero() && norm2(r) <= BigInt::from(9)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduction_preserves_lattice_and_satisfies_lovasz(
            entries in proptest::collection::vec(-1000i64..1000, 9)
        ) {
            let mut m: Vec<Vec<BigInt>> = entries.chunks(3)
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let d0 = det3(&m).abs();
            prop_assume!(!d0.is_zero());
            lll_reduce(&mut m, 0.99).unwrap();
            prop_assert_eq!(det3(&m).abs(), d0);
            // first vector is within 2^{(d-1)/2} of the shortest basis vector found
            let first = norm2(&m[0]);
            for row in &m {
                prop_assert!(first <= norm2(row) * BigInt::from(4));
            }
        }
    }
}
