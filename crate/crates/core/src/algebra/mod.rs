//! Linear algebra and truncated-series arithmetic over a [`Scalar`] backend.

mod jet;
mod multi;
mod poly;

pub use jet::Jet;
pub use multi::{MultiPoly, Shape, TruncatedSeries};
pub use poly::{poly_div_exact, UniPoly};

use crate::scalar::Scalar;

/// Determinant of a non-empty square matrix.
///
/// Fraction-free elimination on the exact backend, partial pivoting on the
/// float backend. Singular matrices give zero.
pub fn det<S: Scalar>(rows: &[Vec<S>]) -> S {
    S::determinant(rows)
}

/// Like [`det`], but the 0×0 determinant is one.
pub fn det_or_one<S: Scalar>(rows: &[Vec<S>]) -> S {
    if rows.is_empty() {
        S::one()
    } else {
        det(rows)
    }
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: usize) -> S {
    (2..=n as i64).fold(S::one(), |acc, k| acc * &S::from_i64(k))
}

/// Sign of a permutation given as images of `0..n`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use proptest::prelude::*;
    use rug::Rational;

    /// Laplace expansion along the first row; the reference the elimination
    /// routines are checked against.
    fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = Rational::new();
        for k in 0..n {
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = m[0][k].clone() * cofactor_det(&minor);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn q(p: i64) -> Rational {
        Rational::from(p)
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det(&[vec![q(1), q(2)], vec![q(3), q(4)]]), q(-2));
        let id: Vec<Vec<Rational>> = (0..5)
            .map(|i| (0..5).map(|j| q((i == j) as i64)).collect())
            .collect();
        assert_eq!(det(&id), q(1));
        let singular = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(det(&singular), q(0));
        let f: Vec<Vec<BigFloat>> = vec![
            vec![BigFloat::from_f64(128, 1.0), BigFloat::from_f64(128, 2.0)],
            vec![BigFloat::from_f64(128, 3.0), BigFloat::from_f64(128, 4.0)],
        ];
        assert_eq!(det(&f).to_f64(), -2.0);
        assert_eq!(det_or_one::<Rational>(&[]), q(1));
    }

    #[test]
    fn two_by_two_jet_hankel_matches_cofactor() {
        // [[φ, φ′], [φ′, φ″]] for the jet of 1/(1 − x) at x = 1/3
        let base = Rational::from((1, 3));
        let x = Jet::variable(base, 2);
        let phi = Jet::constant(q(1), 2).sub(&x).recip().unwrap();
        let d: Vec<Rational> = (0..3).map(|m| phi.derivative(m)).collect();
        let m = vec![vec![d[0].clone(), d[1].clone()], vec![d[1].clone(), d[2].clone()]];
        let expect = d[0].clone() * &d[2] - d[1].clone() * &d[1];
        assert_eq!(det(&m), expect);
        // 1/(1−x) at 1/3: φ = 3/2, φ′ = 9/4, φ″ = 27/4
        assert_eq!(expect, Rational::from((81, 8)) - Rational::from((81, 16)));
    }

    #[test]
    fn permutation_helpers() {
        let mut count = 0;
        let mut sum = 0;
        for_each_permutation(4, |p| {
            count += 1;
            sum += permutation_sign(p);
        });
        assert_eq!((count, sum), (24, 0));
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(
            n in 1usize..=6,
            entries in prop::collection::vec((-9i64..=9, 1i64..=5), 36),
        ) {
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| {
                    let (p, d) = entries[i * 6 + j];
                    Rational::from((p, d))
                }).collect())
                .collect();
            prop_assert_eq!(det(&m), cofactor_det(&m));
        }
    }
}
