//! The boundary correlation `H_N^{(r)}`, its generating function
//! `h_N(z) = Σ_r H_N^{(r)} z^{r−1}`, and the symmetric polynomials
//! `h_{N,s}(z_1, …, z_s)`.

use std::collections::BTreeMap;

use crate::algebra::{det_or_one, Jet, MultiPoly, UniPoly};
use crate::error::{Error, Result};
use crate::ik::{homogeneous_partition_jets, k_polynomial, partially_inhomogeneous_partition, PhiJet};
use crate::oracle::{boundary_h_table, WeightGrid};
use crate::params::{delta_t_from_trig, rapidity_from_ratio, trig, weights_from_trig, AnisotropyPoint, VertexWeights};
use crate::scalar::{BigFloat, Scalar};

/// Jets at `ε = 0` of
/// `ω(ε) = (a/b) sin ε / sin(ε−2η)`, `ρ(ε) = (b/c) sin(ε−2η) / sin(ε+λ−η)`,
/// `ω̃ = t²ω / (2tΔω − 1)` and `ρ̃ = 1 / (1 − ω̃)`.
#[derive(Debug, Clone)]
pub struct OmegaRho<S> {
    pub omega: Jet<S>,
    pub rho: Jet<S>,
    pub omega_tilde: Jet<S>,
    pub rho_tilde: Jet<S>,
    pub point: AnisotropyPoint<S>,
}

impl<S: Scalar> OmegaRho<S> {
    pub fn new(lambda: &S, eta: &S, order: usize) -> Result<Self> {
        let zero = S::zero();
        let two_eta = S::from_i64(2) * eta;
        let a = trig::a(lambda, &zero, eta)?;
        let b = trig::b(lambda, &zero, eta)?;
        let c = trig::c(eta)?;
        let sin_shift = Jet::sin_at(&-two_eta, order)?;
        let omega = Jet::sin_at(&zero, order)?
            .div(&sin_shift)?
            .scale(&a.checked_div(&b)?);
        let rho = sin_shift
            .div(&Jet::sin_at(&(lambda.clone() - eta), order)?)?
            .scale(&b.checked_div(&c)?);
        let point = delta_t_from_trig(lambda, eta)?;
        let (omega_tilde, rho_tilde) = tilde(&omega, &point)?;
        Ok(OmegaRho {
            omega,
            rho,
            omega_tilde,
            rho_tilde,
            point,
        })
    }
}

/// `(ω̃, ρ̃)` from `ω`.
pub fn tilde<S: Scalar>(omega: &Jet<S>, point: &AnisotropyPoint<S>) -> Result<(Jet<S>, Jet<S>)> {
    let t2 = point.t.clone() * &point.t;
    let den = omega.scale(&point.two_delta_t()).add_scalar(&-S::one());
    let omega_tilde = omega.scale(&t2).div(&den)?;
    let rho_tilde = omega_tilde.neg().add_scalar(&S::one()).recip()?;
    Ok((omega_tilde, rho_tilde))
}

/// `(H_N^{(1)}, …, H_N^{(N)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTable<S> {
    values: Vec<S>,
}

impl<S: Scalar> HTable<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadIndex("an H table needs N >= 1 entries".into()));
        }
        Ok(HTable { values })
    }

    pub fn from_oracle(grid: &WeightGrid<S>) -> Result<Self> {
        Self::new(boundary_h_table(grid)?)
    }

    /// All entries from one `K_{N−1}`.
    pub fn via_k(n: usize, lambda: &S, eta: &S) -> Result<Self> {
        let (k, or) = k_setup(n, lambda, eta)?;
        let values = (1..=n)
            .map(|r| h_via_k_with(&k, &or, n, r))
            .collect::<Result<Vec<S>>>()?;
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `H_N^{(r)}`, `r` from 1.
    pub fn get(&self, r: usize) -> Result<&S> {
        if r == 0 || r > self.n() {
            return Err(Error::BadIndex(format!("r = {r} is outside 1..={}", self.n())));
        }
        Ok(&self.values[r - 1])
    }

    pub fn sum(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, v| acc + v)
    }

    /// `G_{N,1}^{(r)} = Σ_{r' ≤ r} H_N^{(r')}` for `r = 1..N`.
    pub fn partial_sums(&self) -> Vec<S> {
        let mut acc = S::zero();
        self.values
            .iter()
            .map(|v| {
                acc = acc.clone() + v;
                acc.clone()
            })
            .collect()
    }

    pub fn generating(&self) -> UniPoly<S> {
        UniPoly::new(self.values.clone())
    }
}

/// `h_N(z)`.
pub fn h_generating<S: Scalar>(table: &HTable<S>) -> UniPoly<S> {
    table.generating()
}

fn k_setup<S: Scalar>(n: usize, lambda: &S, eta: &S) -> Result<(UniPoly<S>, OmegaRho<S>)> {
    if n == 0 {
        return Err(Error::BadIndex("N must be at least 1".into()));
    }
    let phi = PhiJet::new(lambda, eta, 2 * (n - 1))?;
    Ok((k_polynomial(n - 1, &phi)?, OmegaRho::new(lambda, eta, n - 1)?))
}

fn h_via_k_with<S: Scalar>(k: &UniPoly<S>, or: &OmegaRho<S>, n: usize, r: usize) -> Result<S> {
    if r == 0 || r > n {
        return Err(Error::BadIndex(format!("r = {r} is outside 1..={n}")));
    }
    let f = or.omega.powi((n - r) as u32).mul(&or.rho.powi((n - 1) as u32));
    f.apply_operator(k.coeffs())
}

/// `H_N^{(r)} = K_{N−1}(∂_ε) [ω(ε)]^{N−r} [ρ(ε)]^{N−1} |_{ε=0}`.
pub fn boundary_h_via_k<S: Scalar>(n: usize, r: usize, lambda: &S, eta: &S) -> Result<S> {
    let (k, or) = k_setup(n, lambda, eta)?;
    h_via_k_with(&k, &or, n, r)
}

/// `h_1, …, h_{N_max}` at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct HFamily<S> {
    tables: Vec<HTable<S>>,
}

impl<S: Scalar> HFamily<S> {
    /// `tables[n−1]` must have `n` entries.
    pub fn from_tables(tables: Vec<HTable<S>>) -> Result<Self> {
        for (i, t) in tables.iter().enumerate() {
            if t.n() != i + 1 {
                return Err(Error::BadIndex(format!(
                    "table {} has {} entries, expected {}",
                    i + 1,
                    t.n(),
                    i + 1
                )));
            }
        }
        Ok(HFamily { tables })
    }

    /// Exact when `S` is: the oracle at `a = 1`, `b = t`.
    pub fn from_anisotropy(n_max: usize, point: &AnisotropyPoint<S>) -> Result<Self> {
        Self::from_tables(
            (1..=n_max)
                .map(|n| HTable::from_oracle(&WeightGrid::from_anisotropy(n, point)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn from_weights(n_max: usize, w: &VertexWeights<S>) -> Result<Self> {
        Self::from_tables(
            (1..=n_max)
                .map(|n| HTable::from_oracle(&WeightGrid::homogeneous(n, w)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn via_k(n_max: usize, lambda: &S, eta: &S) -> Result<Self> {
        Self::from_tables(
            (1..=n_max)
                .map(|n| HTable::via_k(n, lambda, eta))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n_max(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, n: usize) -> Result<&HTable<S>> {
        if n == 0 || n > self.n_max() {
            return Err(Error::BadIndex(format!(
                "h_{n} requested, family covers 1..={}",
                self.n_max()
            )));
        }
        Ok(&self.tables[n - 1])
    }

    pub fn h(&self, n: usize) -> Result<UniPoly<S>> {
        Ok(self.table(n)?.generating())
    }
}

/// Both sides of `K_{N−1}(∂_ε) f(ω(ε))|₀ = [z^{N−1}] (z−1)^{N−1} h_N(z) f(z)`,
/// with `h_N` from the enumeration at the same `(λ, η)`.
pub fn kfint_check<S: Scalar>(n: usize, f: &UniPoly<S>, lambda: &S, eta: &S) -> Result<(S, S)> {
    let (k, or) = k_setup(n, lambda, eta)?;
    let lhs = f.eval_jet(&or.omega).apply_operator(k.coeffs())?;
    let w = weights_from_trig(lambda, &S::zero(), eta, true)?;
    let h = HTable::from_oracle(&WeightGrid::homogeneous(n, &w))?.generating();
    let shift = UniPoly::new(vec![-S::one(), S::one()]).powi((n - 1) as u32);
    let rhs = shift.mul(&h).mul(f).coeff(n - 1);
    Ok((lhs, rhs))
}

fn check_ns<S: Scalar>(family: &HFamily<S>, n: usize, s: usize) -> Result<()> {
    if s > n {
        return Err(Error::BadIndex(format!("s = {s} exceeds N = {n}")));
    }
    if n > family.n_max() {
        return Err(Error::BadIndex(format!(
            "h_{{{n},{s}}} needs h_{n}, family covers 1..={}",
            family.n_max()
        )));
    }
    Ok(())
}

/// `z^{k−1} (z−1)^{s−k} h_{N−k+1}(z)` for `k = 1..s`.
fn entries<S: Scalar>(family: &HFamily<S>, n: usize, s: usize) -> Result<Vec<UniPoly<S>>> {
    let minus_one = UniPoly::new(vec![-S::one(), S::one()]);
    (1..=s)
        .map(|k| {
            Ok(UniPoly::monomial(S::one(), k - 1)
                .mul(&minus_one.powi((s - k) as u32))
                .mul(&family.h(n - k + 1)?))
        })
        .collect()
}

/// `h_{N,s}(z)` at a point. Repeated arguments are fine: the determinant is
/// taken over divided differences.
pub fn h_multivariate_value<S: Scalar>(family: &HFamily<S>, n: usize, z: &[S]) -> Result<S> {
    let s = z.len();
    check_ns(family, n, s)?;
    let cols: Vec<Vec<S>> = entries(family, n, s)?
        .iter()
        .map(|f| f.divided_differences(z))
        .collect();
    let m: Vec<Vec<S>> = (0..s).map(|j| (0..s).map(|k| cols[k][j].clone()).collect()).collect();
    let d = det_or_one(&m);
    Ok(if (s * s.saturating_sub(1) / 2) % 2 == 1 { -d } else { d })
}

/// `h_{N,s}` as a polynomial in `z_1..z_s` (variables `0..s`).
pub fn h_multivariate_poly<S: Scalar>(family: &HFamily<S>, n: usize, s: usize) -> Result<MultiPoly<S>> {
    check_ns(family, n, s)?;
    let f = entries(family, n, s)?;
    // Laplace expansion along the last filled row, over column subsets.
    let mut layer: BTreeMap<u32, MultiPoly<S>> = BTreeMap::new();
    layer.insert(0, MultiPoly::one(s));
    for row in 0..s {
        let mut next: BTreeMap<u32, MultiPoly<S>> = BTreeMap::new();
        for (&mask, minor) in &layer {
            for (k, fk) in f.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let term = minor.mul(&MultiPoly::univariate(s, row, fk.coeffs()));
                let slot = next.entry(mask | (1 << k)).or_insert_with(|| MultiPoly::zero(s));
                *slot = if (mask >> (k + 1)).count_ones() % 2 == 1 {
                    slot.sub(&term)
                } else {
                    slot.add(&term)
                };
            }
        }
        layer = next;
    }
    let mut p = layer.remove(&((1u32 << s) - 1)).unwrap_or_else(|| MultiPoly::one(s));
    for j in 0..s {
        for k in j + 1..s {
            p = p.divide_by_difference(j, k)?;
        }
    }
    Ok(p.trim())
}

/// Order at `z_j = 0` of `h(…, z_k = (2Δt z_j − 1)/(t² z_j), …)` with the
/// remaining variables symbolic, or `None` if the substitution vanishes.
pub fn reflected_zero_order<S: Scalar>(
    h: &MultiPoly<S>,
    point: &AnisotropyPoint<S>,
    j: usize,
    k: usize,
) -> Result<Option<isize>> {
    let nv = h.nvars();
    if j >= nv || k >= nv || j == k {
        return Err(Error::BadIndex(format!("variables {j}, {k} of {nv}")));
    }
    let d = h.degree_in(k).unwrap_or(0);
    let num = MultiPoly::univariate(nv, j, &[-S::one(), point.two_delta_t()]);
    let den = MultiPoly::univariate(nv, j, &[S::zero(), point.t.clone() * &point.t]);
    let mut total = MultiPoly::zero(nv);
    for b in 0..=d {
        let term = h.slice(k, b).mul(&num.powi(b as u32)).mul(&den.powi((d - b) as u32));
        total = total.add(&term);
    }
    Ok(total
        .terms()
        .map(|(i, _)| i[j])
        .min()
        .map(|m| m as isize - d as isize))
}

/// `h_{N,N}(z_1, …, z_N)` from the partition function with rapidities
/// `λ_j` fixed by `t z_j = sin(λ_j−η) / sin(λ_j+η)` and all `ν = 0`:
/// `[Z_N(λ_1..λ_N) / Z_N] Π_j [a / a(λ_j)]^{N−1}`.
pub fn h_via_inhomogeneous_z(z: &[BigFloat], lambda: &BigFloat, eta: &BigFloat) -> Result<BigFloat> {
    let n = z.len();
    if n == 0 {
        return Ok(BigFloat::one());
    }
    for j in 0..n {
        for k in j + 1..n {
            if (z[j].clone() - &z[k]).is_zero() {
                return Err(Error::DuplicateRapidity(j + 1, k + 1));
            }
        }
    }
    let zero = BigFloat::zero();
    let point = delta_t_from_trig(lambda, eta)?;
    let a = trig::a(lambda, &zero, eta)?;
    let mut lams = Vec::with_capacity(n);
    let mut ratio = BigFloat::one();
    for zj in z {
        if zj.is_zero() {
            return Err(Error::BranchPole);
        }
        let w = point.t.clone() * zj;
        let lam = rapidity_from_ratio(&w, eta)?;
        let aj = trig::a(&lam, &zero, eta)?;
        let back = trig::b(&lam, &zero, eta)?.checked_div(&aj)?;
        if !back.agrees_with(&w, 1e-20) {
            return Err(Error::Inconsistent(format!(
                "rapidity round trip for z = {}",
                zj.to_report_string()
            )));
        }
        ratio = ratio * &a.checked_div(&aj)?.powi((n - 1) as u32);
        lams.push(lam);
    }
    let zn = homogeneous_partition_jets(n, lambda, eta)?;
    Ok(partially_inhomogeneous_partition(&lams, eta)?.checked_div(&zn)? * &ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::boundary_h_oracle_value;
    use rug::Rational;

    const PREC: u32 = 128;

    fn f(x: f64) -> BigFloat {
        BigFloat::from_f64(PREC, x)
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    fn generic() -> (BigFloat, BigFloat) {
        (f(1.3), f(0.35))
    }

    fn ice() -> (BigFloat, BigFloat) {
        let pi = BigFloat::pi(PREC);
        (pi.clone() / &f(2.0), pi / &f(6.0))
    }

    fn exact_point() -> AnisotropyPoint<Rational> {
        AnisotropyPoint::new(q(1, 3), q(3, 4), false).unwrap()
    }

    #[test]
    fn omega_rho_identities() {
        let (lam, eta) = generic();
        let n = 4;
        let or = OmegaRho::new(&lam, &eta, 2 * n).unwrap();
        assert!(or.omega.value().is_zero());
        let one = Jet::constant(f(1.0), 2 * n);
        let check = or.rho.mul(&or.omega.add_scalar(&-f(1.0))).sub(&one);
        assert!(check.coeffs().iter().all(|c| c.abs().to_f64() < 1e-30));
        let p = &or.point;
        let lhs = or
            .omega_tilde
            .mul(&or.omega.scale(&p.two_delta_t()).add_scalar(&-f(1.0)));
        let rhs = or.omega.scale(&(p.t.clone() * &p.t));
        assert!(lhs.sub(&rhs).coeffs().iter().all(|c| c.abs().to_f64() < 1e-30));
    }

    #[test]
    fn tilde_is_crossing_of_omega() {
        // ω̃ is ω with η → −η; ρ picks up the sign of c = sin 2η.
        let (lam, eta) = generic();
        let or = OmegaRho::new(&lam, &eta, 6).unwrap();
        let crossed = OmegaRho::new(&lam, &-eta, 6).unwrap();
        let d = crossed.omega.sub(&or.omega_tilde);
        assert!(d.coeffs().iter().all(|c| c.abs().to_f64() < 1e-30));
        let d = crossed.rho.add(&or.rho_tilde);
        assert!(d.coeffs().iter().all(|c| c.abs().to_f64() < 1e-30));
    }

    #[test]
    fn h_via_k_examples() {
        let (lam, eta) = ice();
        assert!(boundary_h_via_k(1, 1, &lam, &eta).unwrap().agrees_with(&f(1.0), 1e-30));
        let t = HTable::via_k(3, &lam, &eta).unwrap();
        for (v, e) in t.values().iter().zip([2.0, 3.0, 2.0]) {
            let e = f(e) / &f(7.0);
            assert!(v.agrees_with(&e, 1e-20), "{v} vs {e}");
        }
        let (lam, eta) = (BigFloat::pi(PREC) / &f(2.0), f(0.35));
        let t = HTable::via_k(4, &lam, &eta).unwrap();
        assert!(t.sum().agrees_with(&f(1.0), 1e-22));
    }

    #[test]
    fn h_via_k_matches_oracle() {
        let (lam, eta) = generic();
        let w = weights_from_trig(&lam, &f(0.0), &eta, false).unwrap();
        for n in 1..=5 {
            let grid = WeightGrid::homogeneous(n, &w);
            let t = HTable::via_k(n, &lam, &eta).unwrap();
            for r in 1..=n {
                let reference = boundary_h_oracle_value(&grid, r).unwrap();
                assert!(t.get(r).unwrap().agrees_with(&reference, 1e-18));
            }
        }
    }

    #[test]
    fn generating_function() {
        let t = HTable::new(vec![q(1, 1)]).unwrap();
        assert_eq!(h_generating(&t), UniPoly::constant(q(1, 1)));
        let w = VertexWeights::new(q(1, 1), q(1, 1), q(1, 1), false).unwrap();
        let t = HTable::from_oracle(&WeightGrid::homogeneous(2, &w)).unwrap();
        assert_eq!(h_generating(&t), UniPoly::new(vec![q(1, 2), q(1, 2)]));
        let fam = HFamily::from_anisotropy(5, &exact_point()).unwrap();
        for n in 1..=5 {
            assert_eq!(fam.h(n).unwrap().eval(&q(1, 1)), q(1, 1));
        }
        assert_eq!(HTable::<Rational>::new(vec![]).unwrap_err().name(), "BadIndex");
        assert!(t.get(3).is_err());
    }

    #[test]
    fn kfint_examples() {
        let (lam, eta) = generic();
        let cases: [(usize, UniPoly<BigFloat>); 3] = [
            (2, UniPoly::constant(f(1.0))),
            (3, UniPoly::monomial(f(1.0), 3)),
            (3, UniPoly::monomial(f(1.0), 1)),
        ];
        for (n, poly) in cases {
            let (lhs, rhs) = kfint_check(n, &poly, &lam, &eta).unwrap();
            assert!(lhs.agrees_with(&rhs, 1e-20), "N={n}: {lhs} vs {rhs}");
        }
        let (lhs, rhs) = kfint_check(3, &UniPoly::monomial(f(1.0), 3), &lam, &eta).unwrap();
        assert!(lhs.abs().to_f64() < 1e-25 && rhs.abs().to_f64() < 1e-25);
    }

    #[test]
    fn multivariate_basics() {
        let fam = HFamily::from_anisotropy(4, &exact_point()).unwrap();
        for n in 1..=4 {
            let h1 = h_multivariate_poly(&fam, n, 1).unwrap();
            assert_eq!(h1, MultiPoly::univariate(1, 0, fam.h(n).unwrap().coeffs()));
            for s in 1..=n {
                let h = h_multivariate_poly(&fam, n, s).unwrap();
                for v in 0..s {
                    assert!(h.degree_in(v).unwrap_or(0) < n);
                }
                let lower = h.drop_var_at(s - 1, &q(1, 1));
                assert_eq!(lower, h_multivariate_poly(&fam, n, s - 1).unwrap());
                if s >= 2 {
                    assert_eq!(h.swap_vars(0, 1), h);
                }
                let z: Vec<Rational> = (0..s).map(|j| q(2 * j as i64 + 3, 7)).collect();
                assert_eq!(h_multivariate_value(&fam, n, &z).unwrap(), h.eval(&z));
                let same = vec![q(2, 5); s];
                assert_eq!(h_multivariate_value(&fam, n, &same).unwrap(), h.eval(&same));
            }
        }
        assert_eq!(h_multivariate_poly(&fam, 2, 3).unwrap_err().name(), "BadIndex");
    }

    #[test]
    fn reflected_substitution_has_simple_zero() {
        let p = exact_point();
        let fam = HFamily::from_anisotropy(4, &p).unwrap();
        for n in 2..=4 {
            for s in 2..=n {
                let h = h_multivariate_poly(&fam, n, s).unwrap();
                for j in 0..s - 1 {
                    assert_eq!(reflected_zero_order(&h, &p, j, s - 1).unwrap(), Some(1), "N={n} s={s} j={j}");
                }
            }
        }
    }

    #[test]
    fn inhomogeneous_z_matches_multivariate() {
        let (lam, eta) = generic();
        let fam = HFamily::via_k(3, &lam, &eta).unwrap();
        for z in [vec![f(0.3), f(0.6)], vec![f(0.3), f(-0.7), f(1.9)], vec![f(0.999), f(1.001)]] {
            let a = h_via_inhomogeneous_z(&z, &lam, &eta).unwrap();
            let b = h_multivariate_value(&fam, z.len(), &z).unwrap();
            assert!(a.agrees_with(&b, 1e-18), "{a} vs {b}");
        }
    }

    #[test]
    fn inhomogeneous_z_simple_zero_and_errors() {
        let (lam, eta) = generic();
        let p = delta_t_from_trig(&lam, &eta).unwrap();
        let z1 = f(1e-6);
        let z2 = (p.two_delta_t() * &z1 - &f(1.0)) / &(p.t.clone() * &p.t * &z1);
        let h = h_via_inhomogeneous_z(&[z1.clone(), z2.clone()], &lam, &eta).unwrap();
        let z1b = f(2e-6);
        let z2b = (p.two_delta_t() * &z1b - &f(1.0)) / &(p.t.clone() * &p.t * &z1b);
        let hb = h_via_inhomogeneous_z(&[z1b, z2b], &lam, &eta).unwrap();
        assert!(h.abs().to_f64() < 1e-4);
        let slope = hb.to_f64() / h.to_f64();
        assert!((slope - 2.0).abs() < 1e-4, "ratio {slope}");
        assert_eq!(
            h_via_inhomogeneous_z(&[f(0.5), f(0.5)], &lam, &eta).unwrap_err(),
            Error::DuplicateRapidity(1, 2)
        );
        assert_eq!(h_via_inhomogeneous_z(&[f(0.0), f(0.5)], &lam, &eta).unwrap_err(), Error::BranchPole);
    }
}
