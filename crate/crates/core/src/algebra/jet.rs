use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::factorial;

/// Truncated Taylor expansion `Σ_{m≤D} c_m ε^m` around a base point.
///
/// Binary operations truncate to the smaller of the two orders.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Jet { coeffs }
    }

    pub fn constant(c: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = c;
        Jet { coeffs }
    }

    /// `base + ε`.
    pub fn variable(base: S, order: usize) -> Self {
        let mut j = Self::constant(base, order);
        if order > 0 {
            j.coeffs[1] = S::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> S {
        self.coeffs.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    /// `m`-th derivative at the base point, `m! c_m`.
    pub fn derivative(&self, m: usize) -> S {
        factorial::<S>(m) * &self.coeff(m)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        Jet { coeffs }
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Jet {
            coeffs: (0..n).map(|i| f(&self.coeffs[i], &other.coeffs[i])).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b)
    }

    pub fn neg(&self) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c.clone() * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: &S) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + k;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + &(a.clone() * b);
            }
        }
        Jet { coeffs }
    }

    pub fn recip(&self) -> Result<Self> {
        let f0 = &self.coeffs[0];
        if f0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = f0.recip()?;
        let mut g: Vec<S> = Vec::with_capacity(self.coeffs.len());
        g.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + &(self.coeffs[j].clone() * &g[k - j]);
            }
            g.push(-(acc * &inv0));
        }
        Ok(Jet { coeffs: g })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(S::one(), self.order());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `(sin g, cos g)` by the coupled recurrences
    /// `k s_k = Σ j g_j c_{k−j}`, `k c_k = −Σ j g_j s_{k−j}`.
    pub fn sin_cos(&self) -> Result<(Self, Self)> {
        let n = self.coeffs.len();
        let mut s = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        s.push(self.coeffs[0].sin()?);
        c.push(self.coeffs[0].cos()?);
        for k in 1..n {
            let mut ds = S::zero();
            let mut dc = S::zero();
            for j in 1..=k {
                let jg = S::from_i64(j as i64) * &self.coeffs[j];
                ds = ds + &(jg.clone() * &c[k - j]);
                dc = dc - &(jg * &s[k - j]);
            }
            let kk = S::from_i64(k as i64);
            s.push(ds / &kk);
            c.push(dc / &kk);
        }
        Ok((Jet { coeffs: s }, Jet { coeffs: c }))
    }

    pub fn sin(&self) -> Result<Self> {
        Ok(self.sin_cos()?.0)
    }

    pub fn cos(&self) -> Result<Self> {
        Ok(self.sin_cos()?.1)
    }

    /// Jet of `sin(x0 + ε)`: coefficients `sin(x0 + mπ/2)/m!`.
    pub fn sin_at(x0: &S, order: usize) -> Result<Self> {
        let (s, c) = (x0.sin()?, x0.cos()?);
        let cycle = [s.clone(), c.clone(), -s, -c];
        let coeffs = (0..=order)
            .map(|m| cycle[m % 4].clone() / &factorial::<S>(m))
            .collect();
        Ok(Jet { coeffs })
    }

    /// `Σ_m k_m m! c_m`, i.e. `K(∂_ε) f |_{ε=0}` for `K(x) = Σ k_m x^m`
    /// and `f` the function this jet expands.
    pub fn apply_operator(&self, k: &[S]) -> Result<S> {
        if k.len() > self.coeffs.len() {
            return Err(Error::BadIndex(format!(
                "operator of degree {} needs jet order {}, have {}",
                k.len() - 1,
                k.len() - 1,
                self.order()
            )));
        }
        Ok(k
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (m, km)| acc + &(km.clone() * &self.derivative(m))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use rug::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    #[test]
    fn geometric_recip() {
        let one_minus = Jet::from_coeffs(vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        let g = one_minus.recip().unwrap();
        assert_eq!(g.coeffs(), &[q(1, 1), q(1, 1), q(1, 1), q(1, 1)]);
        assert!(matches!(
            Jet::from_coeffs(vec![q(0, 1), q(1, 1)]).recip(),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn powi_binomial() {
        let x = Jet::variable(q(1, 1), 4);
        let p = x.powi(3);
        assert_eq!(p.coeffs(), &[q(1, 1), q(3, 1), q(3, 1), q(1, 1), q(0, 1)]);
    }

    #[test]
    fn sin_of_variable_matches_sin_at() {
        let prec = 128;
        let x0 = BigFloat::from_f64(prec, 0.7);
        let a = Jet::variable(x0.clone(), 8).sin().unwrap();
        let b = Jet::sin_at(&x0, 8).unwrap();
        for m in 0..=8 {
            assert!((a.coeff(m) - &b.coeff(m)).abs().to_f64() < 1e-36);
        }
    }

    #[test]
    fn sin_jet_matches_central_differences() {
        // Finite differences at 128 bits against the exact jet, orders 0..4.
        let prec = 128;
        let x0 = BigFloat::from_f64(prec, 1.234);
        let jet = Jet::variable(x0.clone(), 8).sin().unwrap();
        let h = BigFloat::from_f64(prec, 1e-6);
        let f = |k: i64| (x0.clone() + &(h.clone() * &BigFloat::from_i64(k))).sin().unwrap();
        let fd = [
            f(0),
            (f(1) - &f(-1)) / &(BigFloat::from_i64(2) * &h),
            (f(1) - &(BigFloat::from_i64(2) * &f(0)) + &f(-1)) / &(h.clone() * &h),
            (f(2) - &(BigFloat::from_i64(2) * &f(1)) + &(BigFloat::from_i64(2) * &f(-1)) - &f(-2))
                / &(BigFloat::from_i64(2) * &h * &h * &h),
            (f(2) - &(BigFloat::from_i64(4) * &f(1)) + &(BigFloat::from_i64(6) * &f(0))
                - &(BigFloat::from_i64(4) * &f(-1))
                + &f(-2))
                / &(h.clone() * &h * &h * &h),
        ];
        // truncation error O(h²), rounding well below that at 128 bits
        let tols = [1e-36, 1e-10, 1e-10, 1e-10, 1e-10];
        for m in 0..=4 {
            let d = (jet.derivative(m) - &fd[m]).abs().to_f64();
            assert!(d < tols[m], "order {m}: {d}");
        }
    }

    #[test]
    fn apply_operator_is_weighted_derivatives() {
        // K(x) = 2 + 3x applied to e^{ε} (coefficients 1/m!) gives 2 + 3
        let e = Jet::from_coeffs(vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6)]);
        assert_eq!(e.apply_operator(&[q(2, 1), q(3, 1)]).unwrap(), q(5, 1));
    }
}
