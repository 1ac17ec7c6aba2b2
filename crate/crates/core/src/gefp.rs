//! Homogeneous GEFP engines: coefficient extraction from the
//! multiple-integral integrand, and the `s×s` determinant of
//! `K`-polynomial operators.

use std::collections::BTreeMap;

use crate::algebra::{factorial, for_each_permutation, permutation_sign, MultiPoly, TruncatedSeries, UniPoly};
use crate::error::{Error, Result};
use crate::hfun::{h_multivariate_poly, HFamily, OmegaRho};
use crate::ik::{gefp_homogeneous_limit, k_polynomial, PhiJet};
use crate::oracle::{gefp_oracle_value, WeightGrid, YoungProfile};
use crate::params::{delta_t_from_trig, weights_from_trig, AnisotropyPoint};
use crate::report::{CorrelationResult, Engine, ParamEcho, Quantity};
use crate::scalar::Scalar;

/// Largest `s` for the permutation sum of [`gefp_determinant_jets`].
pub const JETS_S_CAP: usize = 6;

/// `Π_j [(t²−2Δt)z_j+1]^{s−j} (z_j−1)^{−(s−j+1)} Π_{j<k} (z_j−z_k)/(t²z_jz_k−2Δt z_j+1)`
/// truncated to `caps`, with `z_1..z_s` on variables `0..s`.
pub fn integrand_prefactor<S: Scalar>(
    s: usize,
    caps: &[usize],
    point: &AnisotropyPoint<S>,
) -> Result<TruncatedSeries<S>> {
    let one = S::one();
    let t2 = point.t.clone() * &point.t;
    let slope = point.t2_minus_2delta_t();
    let var = |j: usize| TruncatedSeries::variable(caps, j);
    let mut acc = TruncatedSeries::one(caps);
    for j in 0..s {
        let up = s - j - 1;
        if up > 0 {
            acc = acc.mul(&var(j).scale(&slope).add_scalar(&one).powi(up as u32));
        }
        let pole = var(j).add_scalar(&-one.clone()).invert()?;
        acc = acc.mul(&pole.powi((s - j) as u32));
    }
    for j in 0..s {
        for k in j + 1..s {
            acc = acc.mul(&var(j).sub(&var(k)));
            acc = acc.mul(&cross(caps, j, k, &t2, point)?);
        }
    }
    Ok(acc)
}

/// `(t² z_j z_k − 2Δt z_j + 1)^{−1}`.
fn cross<S: Scalar>(
    caps: &[usize],
    j: usize,
    k: usize,
    t2: &S,
    point: &AnisotropyPoint<S>,
) -> Result<TruncatedSeries<S>> {
    let zj = TruncatedSeries::variable(caps, j);
    let zk = TruncatedSeries::variable(caps, k);
    zj.mul(&zk)
        .scale(t2)
        .sub(&zj.scale(&point.two_delta_t()))
        .add_scalar(&S::one())
        .invert()
}

/// `Σ_{e' ≤ e} A_{e'} h_{e−e'}`, the coefficient of `z^e` in `A·h`.
fn coefficient_of_product<S: Scalar>(a: &TruncatedSeries<S>, h: &MultiPoly<S>, e: &[usize]) -> S {
    let mut acc = S::zero();
    for (ih, ch) in h.terms() {
        if ih.iter().zip(e).all(|(x, y)| x <= y) {
            let rest: Vec<usize> = e.iter().zip(&ih).map(|(y, x)| y - x).collect();
            let ca = a.coeff(&rest);
            if !ca.is_zero() {
                acc = acc + &(ca * ch);
            }
        }
    }
    acc
}

fn signed<S: Scalar>(v: S, s: usize) -> S {
    if s % 2 == 1 {
        -v
    } else {
        v
    }
}

struct Kernel<S> {
    prefactor: TruncatedSeries<S>,
    h: MultiPoly<S>,
}

/// Residue engine at one `(Δ, t)`. Integrand pieces are built once per
/// `(N, s)` and reused across profiles.
pub struct ResidueEngine<S> {
    point: AnisotropyPoint<S>,
    family: HFamily<S>,
    kernels: BTreeMap<(usize, usize), Kernel<S>>,
}

impl<S: Scalar> ResidueEngine<S> {
    pub fn new(point: AnisotropyPoint<S>, family: HFamily<S>) -> Self {
        ResidueEngine {
            point,
            family,
            kernels: BTreeMap::new(),
        }
    }

    /// `h_1..h_{N_max}` from the enumeration at `(Δ, t)`.
    pub fn from_oracle(n_max: usize, point: AnisotropyPoint<S>) -> Result<Self> {
        let family = HFamily::from_anisotropy(n_max, &point)?;
        Ok(Self::new(point, family))
    }

    pub fn point(&self) -> &AnisotropyPoint<S> {
        &self.point
    }

    pub fn family(&self) -> &HFamily<S> {
        &self.family
    }

    fn kernel(&mut self, n: usize, s: usize) -> Result<&Kernel<S>> {
        if !self.kernels.contains_key(&(n, s)) {
            let caps = vec![n - 1; s];
            let kernel = Kernel {
                prefactor: integrand_prefactor(s, &caps, &self.point)?,
                h: h_multivariate_poly(&self.family, n, s)?,
            };
            self.kernels.insert((n, s), kernel);
        }
        Ok(&self.kernels[&(n, s)])
    }

    /// `h_{N,s}` as used by the engine.
    pub fn h_poly(&mut self, n: usize, s: usize) -> Result<MultiPoly<S>> {
        Ok(self.kernel(n, s)?.h.clone())
    }

    pub fn gefp(&mut self, profile: &YoungProfile) -> Result<S> {
        let s = profile.s();
        if s == 0 {
            return Ok(S::one());
        }
        let e: Vec<usize> = profile.r().iter().map(|r| r - 1).collect();
        let kernel = self.kernel(profile.n(), s)?;
        Ok(signed(coefficient_of_product(&kernel.prefactor, &kernel.h, &e), s))
    }
}

/// GEFP by coefficient extraction, with `h` from the enumeration.
pub fn gefp_residue<S: Scalar>(
    profile: &YoungProfile,
    point: &AnisotropyPoint<S>,
) -> Result<CorrelationResult<S>> {
    let mut engine = ResidueEngine::from_oracle(profile.n(), point.clone())?;
    Ok(CorrelationResult {
        value: engine.gefp(profile)?,
        quantity: Quantity::Gefp,
        engine: Engine::Residue,
        n: profile.n(),
        r: profile.r().to_vec(),
        params: ParamEcho::delta_t(point),
    })
}

/// `(−1)^s det[K_{N−s+j−1}(∂_{ε_k})]` applied to
/// `Π_{j<k} 1/(ρ̃(ε_j)ρ(ε_k)[ω̃(ε_j)ω(ε_k)−1]) Π_j ω(ε_j)^{N−r_j} ρ(ε_j)^N` at `ε = 0`.
pub fn gefp_determinant_jets<S: Scalar>(profile: &YoungProfile, lambda: &S, eta: &S) -> Result<S> {
    let n = profile.n();
    let s = profile.s();
    let r = profile.r();
    if s == 0 {
        return Ok(S::one());
    }
    if s > JETS_S_CAP {
        return Err(Error::TooLarge {
            what: "s",
            got: s,
            cap: JETS_S_CAP,
        });
    }
    let phi = PhiJet::new(lambda, eta, 2 * (n - 1))?;
    // weights[p][m] = m! · [x^m] K_{N−s+p}
    let weights: Vec<Vec<S>> = (0..s)
        .map(|p| {
            let k = k_polynomial(n - s + p, &phi)?;
            Ok((0..n).map(|m| k.coeff(m) * &factorial::<S>(m)).collect())
        })
        .collect::<Result<_>>()?;
    let or = OmegaRho::new(lambda, eta, n - 1)?;
    let caps = vec![n - 1; s];
    let on = |var: usize, jet: &crate::algebra::Jet<S>| TruncatedSeries::from_jet(&caps, var, jet);

    let mut f = TruncatedSeries::one(&caps);
    for (j, &rj) in r.iter().enumerate() {
        let g = or.omega.powi((n - rj) as u32).mul(&or.rho.powi(n as u32));
        f = f.mul(&on(j, &g)?);
    }
    for j in 0..s {
        for k in j + 1..s {
            let bracket = on(j, &or.omega_tilde)?
                .mul(&on(k, &or.omega)?)
                .add_scalar(&-S::one());
            let den = on(j, &or.rho_tilde)?.mul(&on(k, &or.rho)?).mul(&bracket);
            f = f.div(&den)?;
        }
    }

    let terms: Vec<(Vec<usize>, S)> = f.terms().map(|(i, c)| (i, c.clone())).collect();
    let mut total = S::zero();
    for_each_permutation(s, |perm| {
        let mut acc = S::zero();
        for (idx, c) in &terms {
            let mut w = c.clone();
            for (k, &m) in idx.iter().enumerate() {
                w = w * &weights[perm[k]][m];
                if w.is_zero() {
                    break;
                }
            }
            acc = acc + &w;
        }
        total = if permutation_sign(perm) > 0 {
            total.clone() + &acc
        } else {
            total.clone() - &acc
        };
    });
    Ok(signed(total, s))
}

/// Parameters of a homogeneous lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum HomParams<S> {
    DeltaT(AnisotropyPoint<S>),
    Trig { lambda: S, eta: S },
}

impl<S: Scalar> HomParams<S> {
    pub fn echo(&self) -> ParamEcho {
        match self {
            HomParams::DeltaT(p) => ParamEcho::delta_t(p),
            HomParams::Trig { lambda, eta } => ParamEcho::trig(lambda, eta),
        }
    }
}

/// GEFP of a homogeneous lattice by the chosen engine.
pub fn gefp_homogeneous<S: Scalar>(
    profile: &YoungProfile,
    params: &HomParams<S>,
    engine: Engine,
    allow_nonphysical: bool,
) -> Result<CorrelationResult<S>> {
    let n = profile.n();
    let value = match (engine, params) {
        (Engine::Oracle, HomParams::DeltaT(p)) => {
            gefp_oracle_value(&WeightGrid::from_anisotropy(n, p), profile)?
        }
        (Engine::Oracle, HomParams::Trig { lambda, eta }) => {
            let w = weights_from_trig(lambda, &S::zero(), eta, allow_nonphysical)?;
            gefp_oracle_value(&WeightGrid::homogeneous(n, &w), profile)?
        }
        (Engine::Residue, HomParams::DeltaT(p)) => {
            ResidueEngine::from_oracle(n, p.clone())?.gefp(profile)?
        }
        (Engine::Residue, HomParams::Trig { lambda, eta }) => {
            let point = delta_t_from_trig(lambda, eta)?;
            ResidueEngine::new(point, HFamily::via_k(n, lambda, eta)?).gefp(profile)?
        }
        (Engine::Jets, HomParams::Trig { lambda, eta }) => gefp_determinant_jets(profile, lambda, eta)?,
        (Engine::Homlim, HomParams::Trig { lambda, eta }) => gefp_homogeneous_limit(profile, lambda, eta)?,
        (Engine::Jets | Engine::Homlim, HomParams::DeltaT(_)) => {
            return Err(Error::Unsupported(format!(
                "engine {engine} works on (lambda, eta); convert the (delta, t) point first"
            )))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "engine {engine} does not compute a homogeneous GEFP"
            )))
        }
    };
    Ok(CorrelationResult {
        value,
        quantity: Quantity::Gefp,
        engine,
        n,
        r: profile.r().to_vec(),
        params: params.echo(),
    })
}

/// EFP: the GEFP of the constant profile `(r, …, r)` of length `s`. In the
/// integral this replaces `Π_j z_j^{r_j}` by `(z_1⋯z_s)^r`.
pub fn efp_special_case<S: Scalar>(
    n: usize,
    s: usize,
    r: usize,
    params: &HomParams<S>,
    engine: Engine,
    allow_nonphysical: bool,
) -> Result<CorrelationResult<S>> {
    let profile = YoungProfile::constant(n, s, r)?;
    let mut out = gefp_homogeneous(&profile, params, engine, allow_nonphysical)?;
    out.quantity = Quantity::Efp;
    Ok(out)
}

/// Outcome of deforming the `z_s` contour outwards when `r_s = N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleDeformationReport<S> {
    pub profile: YoungProfile,
    /// `G` at the profile.
    pub full: S,
    /// `G` at the profile without its last entry.
    pub reduced: S,
    /// Minus the residue at `z_s = 1`, integrated over `z_1..z_{s−1}`.
    pub unit_residue: S,
    /// For each `j < s`, the order at `z_j = 0` of the residue at
    /// `z_s = (2Δt z_j − 1)/(t² z_j)`, other variables at generic values
    /// (`None`: the residue vanishes identically).
    pub reflected_orders: Vec<Option<isize>>,
    pub balanced: bool,
}

/// A rational function of one variable, as numerator and denominator.
#[derive(Clone)]
struct Ratio<S> {
    num: UniPoly<S>,
    den: UniPoly<S>,
}

impl<S: Scalar> Ratio<S> {
    fn poly(p: UniPoly<S>) -> Self {
        Ratio {
            num: p,
            den: UniPoly::constant(S::one()),
        }
    }

    fn constant(c: S) -> Self {
        Self::poly(UniPoly::constant(c))
    }

    fn add(&self, o: &Self) -> Self {
        Ratio {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    fn mul(&self, o: &Self) -> Self {
        Ratio {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    fn scale(&self, k: &S) -> Self {
        Ratio {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Order of vanishing at 0; `None` for the zero function.
    fn order(&self) -> Option<isize> {
        let low = |p: &UniPoly<S>| p.coeffs().iter().position(|c| !c.is_zero());
        Some(low(&self.num)? as isize - low(&self.den)? as isize)
    }
}

/// Checks `G(r_1..r_{s−1}, N) = G(r_1..r_{s−1})` by deforming the `z_s`
/// contour: the pole at `z_s = 1` must give the shorter profile and the
/// poles at `z_s = (2Δt z_j−1)/(t² z_j)` must not contribute.
pub fn pole_deformation_check<S: Scalar>(
    engine: &mut ResidueEngine<S>,
    profile: &YoungProfile,
) -> Result<PoleDeformationReport<S>> {
    let n = profile.n();
    let s = profile.s();
    let r = profile.r();
    if r.last() != Some(&n) {
        return Err(Error::InvalidProfile(format!(
            "pole deformation needs r_s = N, got {profile}"
        )));
    }
    let point = engine.point().clone();
    let full = engine.gefp(profile)?;
    let reduced = engine.gefp(&profile.without_last())?;
    let h = engine.h_poly(n, s)?;

    // Residue at z_s = 1: every other factor evaluated there.
    let one = S::one();
    let caps = vec![n - 1; s - 1];
    let slope = point.t2_minus_2delta_t();
    let mut pre = integrand_prefactor(s - 1, &caps, &point)?;
    for j in 0..s - 1 {
        let zj = TruncatedSeries::variable(&caps, j);
        // The exponents of the z_s-free factors differ by one between s and s−1.
        pre = pre
            .mul(&zj.scale(&slope).add_scalar(&one))
            .div(&zj.add_scalar(&-one.clone()))?;
        pre = pre
            .mul(&zj.add_scalar(&-one.clone()))
            .div(&zj.scale(&slope).add_scalar(&one))?;
    }
    let h1 = h.drop_var_at(s - 1, &one);
    let e: Vec<usize> = r[..s - 1].iter().map(|x| x - 1).collect();
    let unit_residue = -signed(coefficient_of_product(&pre, &h1, &e), s);

    let reflected_orders = (0..s - 1)
        .map(|j| reflected_residue_order(&h, &point, r, j))
        .collect::<Result<Vec<_>>>()?;
    let balanced = (full.clone() - &reduced).is_zero()
        && (unit_residue.clone() - &full).is_zero()
        && reflected_orders.iter().all(|o| o.map_or(true, |o| o >= 0));
    Ok(PoleDeformationReport {
        profile: profile.clone(),
        full,
        reduced,
        unit_residue,
        reflected_orders,
        balanced,
    })
}

/// Order at `z_j = 0` of the `z_s`-residue at the reflected pole, including
/// the `z_j^{−r_j}` of the integrand.
fn reflected_residue_order<S: Scalar>(
    h: &MultiPoly<S>,
    point: &AnisotropyPoint<S>,
    r: &[usize],
    j: usize,
) -> Result<Option<isize>> {
    let s = r.len();
    let l = s - 1;
    let one = S::one();
    let t2 = point.t.clone() * &point.t;
    let two_dt = point.two_delta_t();
    let slope = point.t2_minus_2delta_t();
    let z = UniPoly::monomial(one.clone(), 1);
    let p_num = UniPoly::new(vec![-one.clone(), two_dt.clone()]);
    let p_den = z.scale(&t2);
    let generic = |v: usize| S::from_i64(v as i64 + 3) / &S::from_i64(2 * v as i64 + 11);
    let x: Vec<Ratio<S>> = (0..s)
        .map(|v| {
            if v == j {
                Ratio::poly(z.clone())
            } else if v == l {
                Ratio {
                    num: p_num.clone(),
                    den: p_den.clone(),
                }
            } else {
                Ratio::constant(generic(v))
            }
        })
        .collect();
    let unit = Ratio::constant(one.clone());

    let mut total: isize = 0;
    let mut add = |f: &Ratio<S>, power: isize| -> Result<bool> {
        match f.order() {
            Some(o) => {
                total += o * power;
                Ok(true)
            }
            None if power > 0 => Ok(false),
            None => Err(Error::Inconsistent("reflected residue divides by zero".into())),
        }
    };
    for v in 0..s {
        let up = (s - v - 1) as isize;
        if !add(&x[v], -(r[v] as isize))?
            || !add(&x[v].scale(&slope).add(&unit), up)?
            || !add(&x[v].sub(&unit), -(up + 1))?
        {
            return Ok(None);
        }
    }
    for a in 0..s {
        for b in a + 1..s {
            if !add(&x[a].sub(&x[b]), 1)? {
                return Ok(None);
            }
            if (a, b) == (j, l) {
                // the residue of 1/(t² z_j z_s − …) in z_s
                add(&x[j].scale(&t2), -1)?;
            } else {
                let den = x[a].mul(&x[b]).scale(&t2).sub(&x[a].scale(&two_dt)).add(&unit);
                add(&den, -1)?;
            }
        }
    }
    // h with z_s = P/Q: numerator Σ_b h_b P^b Q^{d−b} over Q^d.
    let d = h.degree_in(l).unwrap_or(0);
    let mut num = UniPoly::zero();
    for b in 0..=d {
        let mut coeff = h.slice(l, b);
        for v in (0..s).rev() {
            if v != j && v != l {
                coeff = coeff.drop_var_at(v, &generic(v));
            }
        }
        // left with (z_j, z_s), z_s of degree 0
        let hb = UniPoly::new(
            (0..=coeff.degree_in(0).unwrap_or(0))
                .map(|e| coeff.coeff(&[e, 0]))
                .collect(),
        );
        num = num.add(&hb.mul(&p_num.powi(b as u32)).mul(&p_den.powi((d - b) as u32)));
    }
    let hr = Ratio {
        num,
        den: p_den.powi(d as u32),
    };
    if !add(&hr, 1)? {
        return Ok(None);
    }
    Ok(Some(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use rug::Rational;

    const PREC: u32 = 128;

    fn f(x: f64) -> BigFloat {
        BigFloat::from_f64(PREC, x)
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    fn profile(n: usize, r: &[usize]) -> YoungProfile {
        YoungProfile::new(n, r.to_vec()).unwrap()
    }

    #[test]
    fn residue_matches_oracle_small() {
        let point = AnisotropyPoint::new(q(1, 2), q(1, 1), false).unwrap();
        let mut engine = ResidueEngine::from_oracle(4, point.clone()).unwrap();
        for n in 1..=4 {
            let grid = WeightGrid::from_anisotropy(n, &point);
            for p in YoungProfile::enumerate(n) {
                assert_eq!(engine.gefp(&p).unwrap(), gefp_oracle_value(&grid, &p).unwrap(), "{p}");
            }
        }
        let v = gefp_residue(&profile(3, &[2, 3]), &point).unwrap();
        assert_eq!(v.value, gefp_oracle_value(&WeightGrid::from_anisotropy(3, &point), &profile(3, &[2, 3])).unwrap());
    }

    #[test]
    fn residue_single_row_is_partial_sum() {
        let point = AnisotropyPoint::new(q(-1, 1), q(2, 3), false).unwrap();
        let mut engine = ResidueEngine::from_oracle(5, point).unwrap();
        for n in 1..=5 {
            let sums = engine.family().table(n).unwrap().partial_sums();
            for r in 1..=n {
                assert_eq!(engine.gefp(&profile(n, &[r])).unwrap(), sums[r - 1]);
            }
        }
    }

    #[test]
    fn jets_match_oracle() {
        let (lam, eta) = (f(1.3), f(0.35));
        let w = weights_from_trig(&lam, &f(0.0), &eta, false).unwrap();
        for n in 1..=4 {
            let grid = WeightGrid::homogeneous(n, &w);
            for p in YoungProfile::enumerate(n) {
                let v = gefp_determinant_jets(&p, &lam, &eta).unwrap();
                let reference = gefp_oracle_value(&grid, &p).unwrap();
                let ok = if reference.is_zero() {
                    v.abs().to_f64() < 1e-16
                } else {
                    v.agrees_with(&reference, 1e-16)
                };
                assert!(ok, "{p}: {v} vs {reference}");
            }
        }
        let too_big = YoungProfile::new(7, vec![7; 7]).unwrap();
        assert_eq!(gefp_determinant_jets(&too_big, &lam, &eta).unwrap_err().name(), "TooLarge");
    }

    #[test]
    fn efp_wrapper() {
        let ice = HomParams::DeltaT(AnisotropyPoint::new(q(1, 2), q(1, 1), false).unwrap());
        let a = efp_special_case(4, 2, 3, &ice, Engine::Residue, false).unwrap();
        let b = gefp_homogeneous(&profile(4, &[3, 3]), &ice, Engine::Oracle, false).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.quantity, Quantity::Efp);
        let one = efp_special_case(3, 3, 3, &ice, Engine::Residue, false).unwrap();
        assert_eq!(one.value, q(1, 1));
        let err = gefp_homogeneous(&profile(2, &[1]), &ice, Engine::Jets, false).unwrap_err();
        assert_eq!(err.name(), "Unsupported");
    }

    #[test]
    fn pole_deformation_examples() {
        let point = AnisotropyPoint::new(q(1, 2), q(1, 1), false).unwrap();
        let mut engine = ResidueEngine::from_oracle(4, point).unwrap();
        for r in [&[2usize][..], &[2, 3], &[2, 3, 4]] {
            let n = *r.last().unwrap();
            let rep = pole_deformation_check(&mut engine, &profile(n, r)).unwrap();
            assert!(rep.balanced, "{rep:?}");
        }
        assert_eq!(pole_deformation_check(&mut engine, &profile(2, &[2])).unwrap().full, q(1, 1));
        assert!(pole_deformation_check(&mut engine, &profile(3, &[2])).is_err());

        // generic point: the reflected residue vanishes to order r_s − r_j
        let point = AnisotropyPoint::new(q(1, 3), q(3, 4), false).unwrap();
        let mut engine = ResidueEngine::from_oracle(4, point).unwrap();
        let rep = pole_deformation_check(&mut engine, &profile(4, &[1, 3, 4])).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.reflected_orders, vec![Some(3), Some(1)]);
    }
}
