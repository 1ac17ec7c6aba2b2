use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Jet;

/// Row-major layout of a dense box of multi-indices `0 ≤ e_i < dims[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Shape { dims, strides }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn nvars(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        idx.len() == self.dims.len() && idx.iter().zip(&self.dims).all(|(e, d)| e < d)
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(e, s)| e * s).sum()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (i, s) in self.strides.iter().enumerate() {
            idx[i] = flat / s;
            flat %= s;
        }
        idx
    }
}

/// Power series in several variables truncated to the box
/// `e_i ≤ caps[i]`. Products stay in the same box, which is exact for
/// the ideal generated by the `z_i^{caps[i]+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    caps: Vec<usize>,
    shape: Shape,
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn zero(caps: &[usize]) -> Self {
        let shape = Shape::new(caps.iter().map(|c| c + 1).collect());
        let coeffs = vec![S::zero(); shape.len()];
        TruncatedSeries {
            caps: caps.to_vec(),
            shape,
            coeffs,
        }
    }

    pub fn constant(caps: &[usize], c: S) -> Self {
        let mut s = Self::zero(caps);
        s.coeffs[0] = c;
        s
    }

    pub fn one(caps: &[usize]) -> Self {
        Self::constant(caps, S::one())
    }

    /// `z_var`.
    pub fn variable(caps: &[usize], var: usize) -> Self {
        let mut s = Self::zero(caps);
        if caps[var] > 0 {
            let mut idx = vec![0; caps.len()];
            idx[var] = 1;
            s.set(&idx, S::one());
        }
        s
    }

    /// A jet in `ε` placed on variable `var`.
    pub fn from_jet(caps: &[usize], var: usize, jet: &Jet<S>) -> Result<Self> {
        if jet.order() < caps[var] {
            return Err(Error::BadIndex(format!(
                "jet of order {} cannot fill degree {}",
                jet.order(),
                caps[var]
            )));
        }
        let mut s = Self::zero(caps);
        let mut idx = vec![0; caps.len()];
        for m in 0..=caps[var] {
            idx[var] = m;
            s.set(&idx, jet.coeff(m));
        }
        Ok(s)
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        if self.shape.contains(idx) {
            self.coeffs[self.shape.flat(idx)].clone()
        } else {
            S::zero()
        }
    }

    pub fn set(&mut self, idx: &[usize], c: S) {
        let f = self.shape.flat(idx);
        self.coeffs[f] = c;
    }

    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    /// Coefficient at the corner `caps` of the box.
    pub fn top(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    /// Nonzero coefficients with their exponents.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(f, c)| (self.shape.unravel(f), c))
    }

    fn check_caps(&self, other: &Self) {
        assert_eq!(self.caps, other.caps, "series truncated to different boxes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_caps(other);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.clone() + b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_caps(other);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.clone() - b;
        }
        out
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = a.clone() * k;
        }
        out
    }

    pub fn add_scalar(&self, k: &S) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + k;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_caps(other);
        let mut out = Self::zero(&self.caps);
        let nz: Vec<(Vec<usize>, &S)> = other.terms().collect();
        for (fa, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ia = self.shape.unravel(fa);
            for (ib, b) in &nz {
                let sum: Vec<usize> = ia.iter().zip(ib).map(|(x, y)| x + y).collect();
                if self.shape.contains(&sum) {
                    let f = self.shape.flat(&sum);
                    out.coeffs[f] = out.coeffs[f].clone() + &(a.clone() * *b);
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = self.coeffs[0].recip()?;
        let nz: Vec<(Vec<usize>, S)> = self
            .terms()
            .filter(|(i, _)| i.iter().any(|&e| e > 0))
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let mut g = Self::zero(&self.caps);
        g.coeffs[0] = inv0.clone();
        // Row-major order visits every componentwise-smaller index first.
        for f in 1..g.coeffs.len() {
            let e = self.shape.unravel(f);
            let mut acc = S::zero();
            for (i, c) in &nz {
                if i.iter().zip(&e).all(|(a, b)| a <= b) {
                    let rest: Vec<usize> = e.iter().zip(i).map(|(a, b)| a - b).collect();
                    let gr = &g.coeffs[self.shape.flat(&rest)];
                    if !gr.is_zero() {
                        acc = acc + &(c.clone() * gr);
                    }
                }
            }
            g.coeffs[f] = -(acc * &inv0);
        }
        Ok(g)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.caps);
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

    /// `Σ_m c_m u^m` for the jet `c` and `u = self`, whose constant term
    /// must vanish.
    pub fn compose_jet(&self, outer: &Jet<S>) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Unsupported(
                "composition needs an inner series without constant term".into(),
            ));
        }
        let total: usize = self.caps.iter().sum();
        if outer.order() < total {
            return Err(Error::BadIndex(format!(
                "outer jet of order {} cannot fill total degree {total}",
                outer.order()
            )));
        }
        let mut acc = Self::constant(&self.caps, outer.coeff(total));
        for m in (0..total).rev() {
            acc = acc.mul(self).add_scalar(&outer.coeff(m));
        }
        Ok(acc)
    }
}

/// Dense polynomial in `nvars` variables. The coefficient box grows as
/// needed; equality ignores the box.
#[derive(Debug, Clone)]
pub struct MultiPoly<S> {
    shape: Shape,
    coeffs: Vec<S>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        Self::constant(nvars, S::zero())
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        MultiPoly {
            shape: Shape::new(vec![1; nvars]),
            coeffs: vec![c],
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    /// `z_var`.
    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut dims = vec![1; nvars];
        dims[var] = 2;
        let mut p = MultiPoly {
            shape: Shape::new(dims),
            coeffs: vec![S::zero(), S::one()],
        };
        p.coeffs.resize(p.shape.len(), S::zero());
        p
    }

    /// `Σ_k c_k z_var^k`.
    pub fn univariate(nvars: usize, var: usize, coeffs: &[S]) -> Self {
        let mut dims = vec![1; nvars];
        dims[var] = coeffs.len().max(1);
        let mut p = MultiPoly {
            shape: Shape::new(dims),
            coeffs: coeffs.to_vec(),
        };
        if p.coeffs.is_empty() {
            p.coeffs.push(S::zero());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.shape.nvars()
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        if self.shape.contains(idx) {
            self.coeffs[self.shape.flat(idx)].clone()
        } else {
            S::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(f, c)| (self.shape.unravel(f), c))
    }

    fn with_dims(dims: Vec<usize>) -> Self {
        let shape = Shape::new(dims);
        let coeffs = vec![S::zero(); shape.len()];
        MultiPoly { shape, coeffs }
    }

    fn accumulate(&mut self, idx: &[usize], c: S) {
        let f = self.shape.flat(idx);
        self.coeffs[f] = self.coeffs[f].clone() + &c;
    }

    /// Highest power of `z_var` with a nonzero coefficient.
    pub fn degree_in(&self, var: usize) -> Option<usize> {
        self.terms().map(|(i, _)| i[var]).max()
    }

    /// Shrinks the box to the support.
    pub fn trim(&self) -> Self {
        let n = self.nvars();
        let dims: Vec<usize> = (0..n).map(|v| self.degree_in(v).map_or(1, |d| d + 1)).collect();
        let mut out = Self::with_dims(dims);
        for (i, c) in self.terms() {
            out.accumulate(&i, c.clone());
        }
        out
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        assert_eq!(self.nvars(), other.nvars());
        let dims = self
            .shape
            .dims()
            .iter()
            .zip(other.shape.dims())
            .map(|(a, b)| *a.max(b))
            .collect();
        let mut out = Self::with_dims(dims);
        for (i, c) in self.terms() {
            out.accumulate(&i, c.clone());
        }
        for (i, c) in other.terms() {
            out.accumulate(&i, if negate { -c.clone() } else { c.clone() });
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn scale(&self, k: &S) -> Self {
        MultiPoly {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars());
        let a = self.trim();
        let b = other.trim();
        let dims = a
            .shape
            .dims()
            .iter()
            .zip(b.shape.dims())
            .map(|(x, y)| x + y - 1)
            .collect();
        let mut out = Self::with_dims(dims);
        let bt: Vec<(Vec<usize>, &S)> = b.terms().collect();
        for (ia, ca) in a.terms() {
            for (ib, cb) in &bt {
                let sum: Vec<usize> = ia.iter().zip(ib).map(|(x, y)| x + y).collect();
                out.accumulate(&sum, ca.clone() * *cb);
            }
        }
        out
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars());
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

    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.nvars());
        let mut acc = S::zero();
        for (i, c) in self.terms() {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&i) {
                t = t * &x.powi(e as u32);
            }
            acc = acc + &t;
        }
        acc
    }

    /// Substitutes `z_var = value`, removing the variable.
    pub fn drop_var_at(&self, var: usize, value: &S) -> Self {
        let mut dims = self.shape.dims().to_vec();
        dims.remove(var);
        let mut out = Self::with_dims(dims);
        for (mut i, c) in self.terms() {
            let e = i.remove(var);
            out.accumulate(&i, c.clone() * &value.powi(e as u32));
        }
        out
    }

    pub fn swap_vars(&self, a: usize, b: usize) -> Self {
        let mut dims = self.shape.dims().to_vec();
        dims.swap(a, b);
        let mut out = Self::with_dims(dims);
        for (mut i, c) in self.terms() {
            i.swap(a, b);
            out.accumulate(&i, c.clone());
        }
        out
    }

    /// Coefficient of `z_var^d`, as a polynomial that does not involve
    /// `z_var`.
    pub fn slice(&self, var: usize, d: usize) -> Self {
        let mut dims = self.shape.dims().to_vec();
        dims[var] = 1;
        let mut out = Self::with_dims(dims);
        for (mut i, c) in self.terms() {
            if i[var] == d {
                i[var] = 0;
                out.accumulate(&i, c.clone());
            }
        }
        out
    }

    /// Multiplies by `z_var^k`.
    pub fn shift(&self, var: usize, k: usize) -> Self {
        let mut dims = self.shape.dims().to_vec();
        dims[var] += k;
        let mut out = Self::with_dims(dims);
        for (mut i, c) in self.terms() {
            i[var] += k;
            out.accumulate(&i, c.clone());
        }
        out
    }

    /// Exact quotient by `z_i - z_j`.
    pub fn divide_by_difference(&self, i: usize, j: usize) -> Result<Self> {
        assert_ne!(i, j);
        let n = self.nvars();
        let Some(deg) = self.degree_in(i) else {
            return Ok(Self::zero(n));
        };
        // Synthetic division in z_i with coefficients in the other variables:
        // q_{d-1} = p_d + z_j q_d, remainder p_0 + z_j q_0.
        let mut q: Vec<Self> = vec![Self::zero(n); deg];
        let mut carry = self.slice(i, deg);
        for d in (0..deg).rev() {
            q[d] = carry.clone();
            carry = self.slice(i, d).add(&carry.shift(j, 1));
        }
        if !carry.is_zero() {
            return Err(Error::NotDivisible);
        }
        let mut out = Self::zero(n);
        for (d, qd) in q.iter().enumerate() {
            out = out.add(&qd.shift(i, d));
        }
        Ok(out.trim())
    }

    /// Truncation to the box `e_i ≤ caps[i]`.
    pub fn to_series(&self, caps: &[usize]) -> TruncatedSeries<S> {
        let mut s = TruncatedSeries::zero(caps);
        let bound = Shape::new(caps.iter().map(|c| c + 1).collect());
        for (i, c) in self.terms() {
            if bound.contains(&i) {
                s.set(&i, c.clone());
            }
        }
        s
    }
}

impl<S: Scalar> PartialEq for MultiPoly<S> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars() && self.sub(other).is_zero()
    }
}
