use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Jet;

/// Dense univariate polynomial, coefficients from the constant term up.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x - root`.
    pub fn linear_root(root: &S) -> Self {
        Self::new(vec![-root.clone(), S::one()])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Self::new(out)
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(S::one());
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

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x + c)
    }

    /// Composition with a jet: the expansion of `p(g(ε))`.
    pub fn eval_jet(&self, g: &Jet<S>) -> Jet<S> {
        let order = g.order();
        self.coeffs.iter().rev().fold(Jet::constant(S::zero(), order), |acc, c| {
            acc.mul(g).add_scalar(c)
        })
    }

    /// Euclidean division; the divisor's leading coefficient must be
    /// invertible.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor
            .degree()
            .ok_or(Error::DivisionByZero("polynomial division by zero"))?;
        let lead_inv = divisor.coeffs[dd].recip()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd].clone() * &lead_inv;
            if !q.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].clone() - &(q.clone() * d);
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Synthetic division by `x - root`: `(quotient, p(root))`.
    pub fn synthetic_division(&self, root: &S) -> (Self, S) {
        if self.coeffs.is_empty() {
            return (Self::zero(), S::zero());
        }
        let n = self.coeffs.len();
        let mut quot = vec![S::zero(); n - 1];
        let mut carry = self.coeffs[n - 1].clone();
        for k in (0..n - 1).rev() {
            quot[k] = carry.clone();
            carry = carry * root + &self.coeffs[k];
        }
        (Self::new(quot), carry)
    }

    /// Divided differences `p[x_1], p[x_1,x_2], …, p[x_1..x_n]`.
    ///
    /// Repeated synthetic division, so repeated nodes give the confluent
    /// (derivative) limits without special casing.
    pub fn divided_differences(&self, nodes: &[S]) -> Vec<S> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut q = self.clone();
        for x in nodes {
            let (next, value) = q.synthetic_division(x);
            out.push(value);
            q = next;
        }
        out
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * &S::from_i64(k as i64))
                .collect(),
        )
    }
}

/// `num / den`, failing with [`Error::NotDivisible`] unless the remainder
/// vanishes exactly.
pub fn poly_div_exact<S: Scalar>(num: &UniPoly<S>, den: &UniPoly<S>) -> Result<UniPoly<S>> {
    let (q, r) = num.div_rem(den)?;
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::NotDivisible)
    }
}
