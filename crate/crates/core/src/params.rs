//! Weight parametrisations of the six-vertex model and conversions between
//! them: Boltzmann weights `(a, b, c)`, the anisotropy pair `(Δ, t)`, and
//! trigonometric spectral data `(λ, ν, η)`.
//!
//! All conversions between the `(λ, η)` engines and the `(Δ, t)` engines go
//! through this module.

use crate::error::{Error, Result};
use crate::scalar::{BigFloat, Scalar};

/// Boltzmann weights of the vertex pairs {1,2}, {3,4}, {5,6}.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeights<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Scalar> VertexWeights<S> {
    pub fn new(a: S, b: S, c: S, allow_nonphysical: bool) -> Result<Self> {
        for (name, w) in [("a", &a), ("b", &b), ("c", &c)] {
            let bad = if allow_nonphysical {
                w.is_zero()
            } else {
                w.signum() <= 0
            };
            if bad {
                return Err(Error::NonphysicalWeights(format!(
                    "weight {name} = {} must be {}",
                    w.to_report_string(),
                    if allow_nonphysical { "nonzero" } else { "positive" }
                )));
            }
        }
        Ok(VertexWeights { a, b, c })
    }

    pub fn c_squared(&self) -> S {
        self.c.clone() * &self.c
    }
}

/// The pair `(Δ, t)` with `Δ = (a²+b²−c²)/(2ab)` and `t = b/a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyPoint<S> {
    pub delta: S,
    pub t: S,
}

impl<S: Scalar> AnisotropyPoint<S> {
    pub fn new(delta: S, t: S, allow_nonphysical: bool) -> Result<Self> {
        let p = AnisotropyPoint { delta, t };
        if p.t.is_zero() {
            return Err(Error::NonphysicalWeights("t must be nonzero".into()));
        }
        if !allow_nonphysical {
            if p.t.signum() <= 0 {
                return Err(Error::NonphysicalWeights("t must be positive".into()));
            }
            if p.c_squared_ratio().signum() <= 0 {
                return Err(Error::NonphysicalWeights(format!(
                    "c²/a² = 1 + t² − 2tΔ = {} must be positive",
                    p.c_squared_ratio().to_report_string()
                )));
            }
        }
        Ok(p)
    }

    /// `c²/a² = 1 + t² − 2tΔ`.
    pub fn c_squared_ratio(&self) -> S {
        let two = S::from_i64(2);
        S::one() + &(self.t.clone() * &self.t) - &(two * &self.t * &self.delta)
    }

    /// `t² − 2Δt`, the coefficient recurring in the integrand.
    pub fn t2_minus_2delta_t(&self) -> S {
        let two = S::from_i64(2);
        self.t.clone() * &self.t - &(two * &self.delta * &self.t)
    }

    /// `2Δt`.
    pub fn two_delta_t(&self) -> S {
        S::from_i64(2) * &self.delta * &self.t
    }
}

/// Row rapidities `ν` (one per horizontal line, from the top), column
/// rapidities `λ` (one per vertical line, counted from the right) and the
/// crossing parameter `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<S> {
    pub lambdas: Vec<S>,
    pub nus: Vec<S>,
    pub eta: S,
}

impl<S: Scalar> SpectralData<S> {
    pub fn new(lambdas: Vec<S>, nus: Vec<S>, eta: S) -> Result<Self> {
        if lambdas.len() != nus.len() {
            return Err(Error::BadIndex(format!(
                "{} column rapidities but {} row rapidities",
                lambdas.len(),
                nus.len()
            )));
        }
        Ok(SpectralData { lambdas, nus, eta })
    }

    /// All `λ_k = λ`, all `ν_l = 0`.
    pub fn homogeneous(n: usize, lambda: S, eta: S) -> Self {
        SpectralData {
            lambdas: vec![lambda; n],
            nus: vec![S::zero(); n],
            eta,
        }
    }

    pub fn size(&self) -> usize {
        self.lambdas.len()
    }

    /// Fails on the first repeated `λ` (or, failing that, repeated `ν`).
    pub fn check_distinct(&self) -> Result<()> {
        for set in [&self.lambdas, &self.nus] {
            for j in 0..set.len() {
                for k in j + 1..set.len() {
                    if (set[j].clone() - &set[k]).is_zero() {
                        return Err(Error::DuplicateRapidity(j + 1, k + 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// Weights of the site on row `row` and column `col` (both 1-based).
    pub fn site_weights(&self, row: usize, col: usize) -> Result<(S, S)> {
        let lam = &self.lambdas[col - 1];
        let nu = &self.nus[row - 1];
        Ok((trig::a(lam, nu, &self.eta)?, trig::b(lam, nu, &self.eta)?))
    }

    pub fn c(&self) -> Result<S> {
        trig::c(&self.eta)
    }
}

/// The trigonometric building blocks `a, b, c, d, e` and `φ`.
pub mod trig {
    use super::*;

    pub fn a<S: Scalar>(lambda: &S, nu: &S, eta: &S) -> Result<S> {
        (lambda.clone() - nu + eta).sin()
    }

    pub fn b<S: Scalar>(lambda: &S, nu: &S, eta: &S) -> Result<S> {
        (lambda.clone() - nu - eta).sin()
    }

    pub fn c<S: Scalar>(eta: &S) -> Result<S> {
        (S::from_i64(2) * eta).sin()
    }

    pub fn d<S: Scalar>(lambda: &S, nu: &S) -> Result<S> {
        (lambda.clone() - nu).sin()
    }

    pub fn e<S: Scalar>(lambda: &S, nu: &S, eta: &S) -> Result<S> {
        (lambda.clone() - nu + &(S::from_i64(2) * eta)).sin()
    }

    /// `φ = c / (a b)`.
    pub fn phi<S: Scalar>(lambda: &S, nu: &S, eta: &S) -> Result<S> {
        let ab = a(lambda, nu, eta)? * &b(lambda, nu, eta)?;
        c(eta)?.checked_div(&ab)
    }
}

pub fn delta_t_from_weights<S: Scalar>(w: &VertexWeights<S>) -> Result<AnisotropyPoint<S>> {
    if w.a.is_zero() || w.b.is_zero() {
        return Err(Error::DivisionByZero("weights a and b must be nonzero"));
    }
    let two = S::from_i64(2);
    let num = w.a.clone() * &w.a + &(w.b.clone() * &w.b) - &(w.c.clone() * &w.c);
    let delta = num / &(two * &w.a * &w.b);
    let t = w.b.clone() / &w.a;
    Ok(AnisotropyPoint { delta, t })
}

/// `a = sin(λ−ν+η)`, `b = sin(λ−ν−η)`, `c = sin 2η`.
pub fn weights_from_trig<S: Scalar>(
    lambda: &S,
    nu: &S,
    eta: &S,
    allow_nonphysical: bool,
) -> Result<VertexWeights<S>> {
    let a = trig::a(lambda, nu, eta)?;
    let b = trig::b(lambda, nu, eta)?;
    let c = trig::c(eta)?;
    VertexWeights::new(a, b, c, allow_nonphysical)
}

/// `Δ = cos 2η`, `t = sin(λ−η)/sin(λ+η)` (with `ν = 0`).
pub fn delta_t_from_trig<S: Scalar>(lambda: &S, eta: &S) -> Result<AnisotropyPoint<S>> {
    let two_eta = S::from_i64(2) * eta;
    let delta = two_eta.cos()?;
    let t = trig::b(lambda, &S::zero(), eta)?.checked_div(&trig::a(lambda, &S::zero(), eta)?)?;
    Ok(AnisotropyPoint { delta, t })
}

/// Inverse of [`delta_t_from_trig`] on the physical disordered branch
/// `|Δ| < 1`, `t > 0`: returns `(λ, η)` with `0 < η < π/2` and
/// `η < λ < π − η`.
pub fn trig_from_delta_t(point: &AnisotropyPoint<BigFloat>) -> Result<(BigFloat, BigFloat)> {
    let delta = &point.delta;
    let t = &point.t;
    let one = BigFloat::one();
    if delta.abs() >= one {
        return Err(Error::Unsupported(format!(
            "Δ = {} is outside the trigonometric regime |Δ| < 1",
            delta.to_report_string()
        )));
    }
    if t.signum() <= 0 {
        return Err(Error::NonphysicalWeights("t must be positive".into()));
    }
    let pi = delta.pi_like()?;
    let half_pi = pi.clone() / &BigFloat::from_i64(2);
    // acos Δ = π/2 − atan(Δ / sqrt(1 − Δ²))
    let root = (one.clone() - &(delta.clone() * delta)).sqrt();
    let acos = half_pi.clone() - &(delta.clone() / &root).atan()?;
    let eta = acos / &BigFloat::from_i64(2);
    let lambda = rapidity_from_ratio(t, &eta)?;
    Ok((lambda, eta))
}

/// Solves `w = sin(λ−η)/sin(λ+η)` for `λ`, i.e.
/// `λ = atan(tan η · (1+w)/(1−w))`, on the branch `λ ∈ (−π/2, π)` that is
/// continuous in `w` away from the pole `w = 1` (where `λ = π/2`).
pub fn rapidity_from_ratio(w: &BigFloat, eta: &BigFloat) -> Result<BigFloat> {
    let one = BigFloat::one();
    let pi = eta.pi_like()?;
    let denom = one.clone() - w;
    if denom.is_zero() {
        return Ok(pi / &BigFloat::from_i64(2));
    }
    let tan_eta = eta.sin()? / &eta.cos()?;
    let mut lambda = (tan_eta * &(one + w) / &denom).atan()?;
    if denom.signum() < 0 {
        lambda = lambda + &pi;
    }
    Ok(lambda)
}
