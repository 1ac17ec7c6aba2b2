//! Determinant engines on the trigonometric parametrisation: the
//! Izergin–Korepin partition function, its homogeneous limit, the `K_n`
//! polynomials and the inhomogeneous GEFP formulas.
//!
//! Column `k` (from the right) carries `λ_k`, row `l` (from the top) `ν_l`;
//! site weights are `a(λ_k, ν_l)`, `b(λ_k, ν_l)`.

use std::collections::HashMap;

use crate::algebra::{det, det_or_one, factorial, permutation_sign, Jet, TruncatedSeries, UniPoly};
use crate::error::{Error, Result};
use crate::oracle::YoungProfile;
use crate::params::{trig, SpectralData};
use crate::scalar::Scalar;

/// Largest `N` for the permutation expansion of the shift-operator
/// determinant.
pub const PERMUTATION_CAP: usize = 7;

/// Taylor jet of `φ(λ + ε) = c / (sin(λ+ε+η) sin(λ+ε−η))` around `ε = 0`.
#[derive(Debug, Clone)]
pub struct PhiJet<S> {
    pub lambda: S,
    pub eta: S,
    jet: Jet<S>,
}

impl<S: Scalar> PhiJet<S> {
    pub fn new(lambda: &S, eta: &S, order: usize) -> Result<Self> {
        let a = Jet::sin_at(&(lambda.clone() + eta), order)?;
        let b = Jet::sin_at(&(lambda.clone() - eta), order)?;
        let c = trig::c(eta)?;
        let jet = a.mul(&b).recip()?.scale(&c);
        Ok(PhiJet {
            lambda: lambda.clone(),
            eta: eta.clone(),
            jet,
        })
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn jet(&self) -> &Jet<S> {
        &self.jet
    }

    /// `∂_λ^m φ`.
    pub fn derivative(&self, m: usize) -> S {
        self.jet.derivative(m)
    }

    pub fn a(&self) -> Result<S> {
        trig::a(&self.lambda, &S::zero(), &self.eta)
    }

    pub fn b(&self) -> Result<S> {
        trig::b(&self.lambda, &S::zero(), &self.eta)
    }

    /// `[∂^{j+k+offset} φ]` for `j, k` in `0..n`.
    fn hankel(&self, n: usize, offset: usize) -> Vec<Vec<S>> {
        (0..n)
            .map(|j| (0..n).map(|k| self.derivative(j + k + offset)).collect())
            .collect()
    }
}

fn prod<S: Scalar>(it: impl IntoIterator<Item = Result<S>>) -> Result<S> {
    it.into_iter().try_fold(S::one(), |acc, x| Ok(acc * &x?))
}

/// Izergin–Korepin determinant for distinct rapidities.
pub fn ik_partition<S: Scalar>(spec: &SpectralData<S>) -> Result<S> {
    spec.check_distinct()?;
    ik_unchecked(&spec.lambdas, &spec.nus, &spec.eta)
}

fn ik_unchecked<S: Scalar>(lams: &[S], nus: &[S], eta: &S) -> Result<S> {
    let n = lams.len();
    if n == 0 {
        return Ok(S::one());
    }
    let mut num = S::one();
    let mut m = Vec::with_capacity(n);
    for lam in lams {
        let mut row = Vec::with_capacity(n);
        for nu in nus {
            let ab = trig::a(lam, nu, eta)? * &trig::b(lam, nu, eta)?;
            row.push(trig::c(eta)?.checked_div(&ab)?);
            num = num * &ab;
        }
        m.push(row);
    }
    let mut den = S::one();
    for j in 0..n {
        for k in j + 1..n {
            den = den * &trig::d(&lams[k], &lams[j])? * &trig::d(&nus[j], &nus[k])?;
        }
    }
    Ok(num.checked_div(&den)? * &det(&m))
}

/// `Z_N` at coinciding rapidities: `(ab)^{N²} det[∂^{j+k} φ] / (Π_{m<N} m!)²`.
pub fn homogeneous_partition_jets<S: Scalar>(n: usize, lambda: &S, eta: &S) -> Result<S> {
    if n == 0 {
        return Ok(S::one());
    }
    let phi = PhiJet::new(lambda, eta, 2 * n - 2)?;
    let ab = phi.a()? * &phi.b()?;
    let norm = (0..n).fold(S::one(), |acc, m| acc * &factorial::<S>(m));
    Ok(ab.powi((n * n) as u32) * &det(&phi.hankel(n, 0)) / &(norm.clone() * &norm))
}

/// `Z_N` with distinct `λ_1..λ_N` and every `ν = 0`:
/// `Π_j [a(λ_j) b(λ_j)]^N det[∂^{j−1} φ(λ_k)] / (Π_{m<N} m! · Π_{j<k} d(λ_k, λ_j))`.
pub fn partially_inhomogeneous_partition<S: Scalar>(lambdas: &[S], eta: &S) -> Result<S> {
    let n = lambdas.len();
    if n == 0 {
        return Ok(S::one());
    }
    let mut den = (0..n).fold(S::one(), |acc, m| acc * &factorial::<S>(m));
    for j in 0..n {
        for k in j + 1..n {
            let d = trig::d(&lambdas[k], &lambdas[j])?;
            if d.is_zero() {
                return Err(Error::DuplicateRapidity(j + 1, k + 1));
            }
            den = den * &d;
        }
    }
    let mut num = S::one();
    let mut cols = Vec::with_capacity(n);
    for lam in lambdas {
        let phi = PhiJet::new(lam, eta, n - 1)?;
        num = num * &(phi.a()? * &phi.b()?).powi(n as u32);
        cols.push((0..n).map(|j| phi.derivative(j)).collect::<Vec<S>>());
    }
    let m: Vec<Vec<S>> = (0..n).map(|j| (0..n).map(|k| cols[k][j].clone()).collect()).collect();
    Ok(num * &det(&m) / &den)
}

/// `K_n(x) = (−1)^n n! φ^{n+1} det[x^j | ∂^{j+k−1} φ] / det[∂^{j+k} φ]`,
/// indices from 0, the first matrix having `x^j` in its first column.
pub fn k_polynomial<S: Scalar>(n: usize, phi: &PhiJet<S>) -> Result<UniPoly<S>> {
    if phi.order() < 2 * n {
        return Err(Error::BadIndex(format!(
            "K_{n} needs a φ jet of order {}, have {}",
            2 * n,
            phi.order()
        )));
    }
    let den = det(&phi.hankel(n + 1, 0));
    if den.is_zero() {
        return Err(Error::SingularHankel(n));
    }
    let phi0 = phi.derivative(0);
    let sign = if n % 2 == 0 { S::one() } else { -S::one() };
    let scale = sign * &factorial::<S>(n) * &phi0.powi(n as u32 + 1) / &den;
    let coeffs = (0..=n)
        .map(|m| {
            let mat: Vec<Vec<S>> = (0..=n)
                .map(|j| {
                    let mut row = Vec::with_capacity(n + 1);
                    row.push(if j == m { S::one() } else { S::zero() });
                    row.extend((1..=n).map(|k| phi.derivative(j + k - 1)));
                    row
                })
                .collect();
            det(&mat) * &scale
        })
        .collect();
    Ok(UniPoly::new(coeffs))
}

/// `K_0, …, K_{n_max}` from a single φ jet.
pub fn k_polynomials<S: Scalar>(n_max: usize, lambda: &S, eta: &S) -> Result<Vec<UniPoly<S>>> {
    let phi = PhiJet::new(lambda, eta, 2 * n_max)?;
    (0..=n_max).map(|n| k_polynomial(n, &phi)).collect()
}

fn check_sizes<S>(spec: &SpectralData<S>, profile: &YoungProfile) -> Result<()> {
    if spec.lambdas.len() != profile.n() {
        return Err(Error::BadIndex(format!(
            "profile is for N = {} but {} rapidities were given",
            profile.n(),
            spec.lambdas.len()
        )));
    }
    Ok(())
}

/// GEFP by repeatedly removing the top row; the last step is the
/// Izergin–Korepin determinant of the remaining lattice.
pub fn gefp_inhom_recurrence<S: Scalar>(spec: &SpectralData<S>, profile: &YoungProfile) -> Result<S> {
    check_sizes(spec, profile)?;
    spec.check_distinct()?;
    let r: Vec<isize> = profile.r().iter().map(|&x| x as isize).collect();
    let g = unnormalised_recurrence(&spec.lambdas, &spec.nus, &spec.eta, &r)?;
    g.checked_div(&ik_unchecked(&spec.lambdas, &spec.nus, &spec.eta)?)
}

fn unnormalised_recurrence<S: Scalar>(lams: &[S], nus: &[S], eta: &S, r: &[isize]) -> Result<S> {
    let Some((&r1, rest)) = r.split_first() else {
        return ik_unchecked(lams, nus, eta);
    };
    let n = lams.len();
    let r1 = r1.max(0) as usize;
    let nu1 = &nus[0];
    let pre = prod((r1..n).map(|k| trig::a(&lams[k], nu1, eta)))? * &trig::c(eta)?;
    let sub_r: Vec<isize> = rest.iter().map(|x| x - 1).collect();
    let mut total = S::zero();
    for j in 0..r1 {
        let mut term = S::one();
        for k in (0..r1).filter(|&k| k != j) {
            term = term
                * &trig::b(&lams[k], nu1, eta)?
                * &trig::e(&lams[k], &lams[j], eta)?.checked_div(&trig::d(&lams[k], &lams[j])?)?;
        }
        term = term * &prod(nus[1..].iter().map(|nu| trig::a(&lams[j], nu, eta)))?;
        let sub_lams: Vec<S> = lams
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, x)| x.clone())
            .collect();
        let sub = unnormalised_recurrence(&sub_lams, &nus[1..], eta, &sub_r)?;
        total = total + &(term * &sub);
    }
    Ok(pre * &total)
}

/// Injective maps `0..s → 0..n`, in lexicographic order.
fn injections(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, s: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                go(n, s, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, s, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Laplace expansion of an `n×n` determinant along its first `s` columns:
/// calls `term(alpha, sign, rest_mask)` for every injective assignment of
/// rows to those columns, where the remaining rows (bitmask) fill the
/// other columns in increasing order.
fn laplace_first_columns(n: usize, s: usize, mut term: impl FnMut(&[usize], i32, u32) -> Result<()>) -> Result<()> {
    for alpha in injections(n, s) {
        let mut perm = alpha.clone();
        let mut mask = 0u32;
        for row in 0..n {
            if !alpha.contains(&row) {
                perm.push(row);
                mask |= 1 << row;
            }
        }
        term(&alpha, permutation_sign(&perm), mask)?;
    }
    Ok(())
}

fn rows_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&r| mask >> r & 1 == 1).collect()
}

/// GEFP from the shift-operator determinant, expanded over permutations;
/// the minors over the last `N − s` columns are shared between terms.
pub fn gefp_inhom_determinant<S: Scalar>(spec: &SpectralData<S>, profile: &YoungProfile) -> Result<S> {
    gefp_inhom_determinant_shifted(spec, profile, &S::zero())
}

/// Same as [`gefp_inhom_determinant`] with every shift `λ_j` replaced by
/// `λ_j − shift` and every `ε` by `ε + shift`. The value does not depend
/// on `shift`.
pub fn gefp_inhom_determinant_shifted<S: Scalar>(
    spec: &SpectralData<S>,
    profile: &YoungProfile,
    shift: &S,
) -> Result<S> {
    check_sizes(spec, profile)?;
    spec.check_distinct()?;
    let n = profile.n();
    let s = profile.s();
    if n > PERMUTATION_CAP {
        return Err(Error::TooLarge {
            what: "N",
            got: n,
            cap: PERMUTATION_CAP,
        });
    }
    let (lams, nus, eta) = (&spec.lambdas, &spec.nus, &spec.eta);
    let r = profile.r();

    let phi: Vec<Vec<S>> = lams
        .iter()
        .map(|lam| nus.iter().map(|nu| trig::phi(lam, nu, eta)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let full = det(&phi);
    if full.is_zero() {
        return Err(Error::DivisionByZero("determinant of φ(λ_j, ν_k) vanishes"));
    }
    let mut pre = full.recip()?;
    for j in 0..s {
        pre = pre * &prod(nus[j + 1..].iter().map(|nu| trig::d(&nus[j], nu)))?;
        let den = prod((0..r[j]).map(|k| trig::a(&lams[k], &nus[j], eta)))?
            * &prod((r[j]..n).map(|k| trig::b(&lams[k], &nus[j], eta)))?;
        pre = pre * &den.recip()?;
    }

    let f = |eps: &[S]| -> Result<S> {
        let mut v = S::one();
        for j in 0..s {
            for k in j + 1..s {
                v = v
                    * &trig::a(&eps[j], &nus[k], eta)?
                    * &trig::b(&eps[k], &nus[j], eta)?.checked_div(&trig::e(&eps[j], &eps[k], eta)?)?;
            }
        }
        for j in 0..s {
            v = v
                * &prod((0..r[j]).map(|k| trig::e(&lams[k], &eps[j], eta)))?
                * &prod((r[j]..n).map(|k| trig::d(&lams[k], &eps[j])))?;
            v = v.checked_div(&prod(nus.iter().map(|nu| trig::b(&eps[j], nu, eta)))?)?;
        }
        Ok(v)
    };

    let mut minors: HashMap<u32, S> = HashMap::new();
    let mut total = S::zero();
    laplace_first_columns(n, s, |alpha, sign, mask| {
        let minor = match minors.get(&mask) {
            Some(m) => m.clone(),
            None => {
                let rows = rows_of(mask, n);
                let sub: Vec<Vec<S>> = rows.iter().map(|&j| phi[j][s..].to_vec()).collect();
                let m = det_or_one(&sub);
                minors.insert(mask, m.clone());
                m
            }
        };
        if minor.is_zero() {
            return Ok(());
        }
        // ε_k = (λ_{α(k)} − shift) + shift
        let eps: Vec<S> = alpha
            .iter()
            .map(|&j| (lams[j].clone() - shift) + shift)
            .collect();
        let term = f(&eps)? * &minor;
        total = if sign > 0 { total.clone() + &term } else { total.clone() - &term };
        Ok(())
    })?;
    Ok(pre * &total)
}

/// GEFP in the homogeneous limit as an `N×N` determinant whose first `s`
/// columns are the operators `∂_{ε_k}^{j}` and whose remaining columns are
/// `∂_λ^{j+k−s} φ`, acting on an explicit function of `ε_1..ε_s`.
///
/// The prefactor uses the per-row exponents `Π_j a^{r_j} b^{N−r_j}`.
pub fn gefp_homogeneous_limit<S: Scalar>(profile: &YoungProfile, lambda: &S, eta: &S) -> Result<S> {
    let n = profile.n();
    let s = profile.s();
    let r = profile.r();
    if n > PERMUTATION_CAP {
        return Err(Error::TooLarge {
            what: "N",
            got: n,
            cap: PERMUTATION_CAP,
        });
    }
    let phi = PhiJet::new(lambda, eta, 2 * n - 2)?;
    let (a, b) = (phi.a()?, phi.b()?);
    let hankel = det(&phi.hankel(n, 0));
    if hankel.is_zero() {
        return Err(Error::SingularHankel(n - 1));
    }

    let caps = vec![n - 1; s];
    let order = s * (n - 1);
    let two_eta = S::from_i64(2) * eta;
    let series_of = |var: usize, base: &S| -> Result<TruncatedSeries<S>> {
        TruncatedSeries::from_jet(&caps, var, &Jet::sin_at(base, order)?)
    };
    let mut f = TruncatedSeries::one(&caps);
    for j in 0..s {
        let sin_e = series_of(j, &S::zero())?;
        let sin_e2 = series_of(j, &-two_eta.clone())?;
        let den = series_of(j, &(lambda.clone() - eta))?;
        f = f
            .mul(&sin_e.powi((n - r[j]) as u32))
            .mul(&sin_e2.powi(r[j] as u32))
            .div(&den.powi(n as u32))?;
    }
    for j in 0..s {
        for k in j + 1..s {
            let num = series_of(j, &(lambda.clone() + eta))?.mul(&series_of(k, &(lambda.clone() - eta))?);
            let diff = TruncatedSeries::variable(&caps, j).sub(&TruncatedSeries::variable(&caps, k));
            let den = diff.compose_jet(&Jet::sin_at(&two_eta, order)?)?;
            f = f.mul(&num).div(&den)?;
        }
    }

    let mut minors: HashMap<u32, S> = HashMap::new();
    let mut total = S::zero();
    laplace_first_columns(n, s, |alpha, sign, mask| {
        let minor = match minors.get(&mask) {
            Some(m) => m.clone(),
            None => {
                let rows = rows_of(mask, n);
                let sub: Vec<Vec<S>> = rows
                    .iter()
                    .map(|&j| (0..n - s).map(|c| phi.derivative(j + c)).collect())
                    .collect();
                let m = det_or_one(&sub);
                minors.insert(mask, m.clone());
                m
            }
        };
        let coeff = f.coeff(alpha);
        if minor.is_zero() || coeff.is_zero() {
            return Ok(());
        }
        let weight = alpha.iter().fold(S::one(), |acc, &m| acc * &factorial::<S>(m));
        let term = coeff * &weight * &minor;
        total = if sign > 0 { total.clone() + &term } else { total.clone() - &term };
        Ok(())
    })?;

    let mut pre = (1..=s).fold(S::one(), |acc, j| acc * &factorial::<S>(n - j));
    if (s * n) % 2 == 1 {
        pre = -pre;
    }
    let ab = r
        .iter()
        .fold(S::one(), |acc, &rj| acc * &a.powi(rj as u32) * &b.powi((n - rj) as u32));
    Ok(pre * &total / &(ab * &hankel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{gefp_oracle_value, partition_function_oracle, WeightGrid};
    use crate::params::weights_from_trig;
    use crate::scalar::BigFloat;

    const PREC: u32 = 128;

    fn f(x: f64) -> BigFloat {
        BigFloat::from_f64(PREC, x)
    }

    fn spec(n: usize) -> SpectralData<BigFloat> {
        let lams = [1.2, 1.55, 1.35, 1.8, 1.62];
        let nus = [0.1, -0.2, 0.05, 0.17, -0.08];
        SpectralData::new(
            lams[..n].iter().map(|&x| f(x)).collect(),
            nus[..n].iter().map(|&x| f(x)).collect(),
            f(0.4),
        )
        .unwrap()
    }

    #[test]
    fn ik_n1_is_c() {
        let s = spec(1);
        let z = ik_partition(&s).unwrap();
        assert!(z.rel_diff(&s.c().unwrap()) < 1e-35);
    }

    #[test]
    fn ik_matches_oracle() {
        let s = SpectralData::new(vec![f(0.3), f(0.7)], vec![f(0.1), f(0.5)], f(0.4)).unwrap();
        let grid = WeightGrid::from_spectral(&s, true).unwrap();
        let z = ik_partition(&s).unwrap();
        assert!(z.rel_diff(&partition_function_oracle(&grid).unwrap()) < 1e-25);
        for n in 1..=4 {
            let s = spec(n);
            let grid = WeightGrid::from_spectral(&s, false).unwrap();
            let z = ik_partition(&s).unwrap();
            assert!(z.rel_diff(&partition_function_oracle(&grid).unwrap()) < 1e-30);
        }
    }

    #[test]
    fn ik_rejects_duplicates() {
        let s = SpectralData::new(vec![f(0.3), f(0.3)], vec![f(0.1), f(0.5)], f(0.4)).unwrap();
        assert_eq!(ik_partition(&s).unwrap_err(), Error::DuplicateRapidity(1, 2));
    }

    #[test]
    fn homogeneous_z_examples() {
        let pi = BigFloat::pi(PREC);
        let half_pi = pi.clone() / &BigFloat::from_i64(2);
        let z1 = homogeneous_partition_jets(1, &half_pi, &(pi.clone() / &BigFloat::from_i64(6))).unwrap();
        assert!(z1.rel_diff(&(BigFloat::from_i64(3).sqrt() / &BigFloat::from_i64(2))) < 1e-35);
        let z2 = homogeneous_partition_jets(2, &half_pi, &(pi.clone() / &BigFloat::from_i64(4))).unwrap();
        assert!(z2.rel_diff(&BigFloat::one()) < 1e-35);
        let z3 = homogeneous_partition_jets(3, &half_pi, &(pi / &BigFloat::from_i64(6))).unwrap();
        let w = BigFloat::from_i64(3).sqrt() / &BigFloat::from_i64(2);
        assert!(z3.rel_diff(&(BigFloat::from_i64(7) * &w.powi(9))) < 1e-33);
    }

    #[test]
    fn partially_inhomogeneous_matches_oracle() {
        let eta = f(0.4);
        for n in 1..=4 {
            let lams: Vec<BigFloat> = (0..n).map(|k| f(1.1 + 0.17 * k as f64)).collect();
            let spec = SpectralData::new(lams.clone(), vec![f(0.0); n], eta.clone()).unwrap();
            let grid = WeightGrid::from_spectral(&spec, true).unwrap();
            let reference = partition_function_oracle(&grid).unwrap();
            let z = partially_inhomogeneous_partition(&lams, &eta).unwrap();
            assert!(z.agrees_with(&reference, 1e-30), "N={n}: {z} vs {reference}");
        }
        let dup = [f(1.0), f(1.2), f(1.0)];
        assert_eq!(
            partially_inhomogeneous_partition(&dup, &eta).unwrap_err(),
            Error::DuplicateRapidity(1, 3)
        );
    }

    #[test]
    fn k_polynomial_shapes() {
        let pi = BigFloat::pi(PREC);
        let ks = k_polynomials(3, &(pi.clone() / &BigFloat::from_i64(2)), &(pi / &BigFloat::from_i64(5))).unwrap();
        assert_eq!(ks[0].coeffs(), &[BigFloat::one()]);
        assert_eq!(ks[3].degree(), Some(3));
    }

    #[test]
    fn inhomogeneous_engines_agree_with_oracle() {
        for n in 2..=4 {
            let s = spec(n);
            let grid = WeightGrid::from_spectral(&s, false).unwrap();
            for p in YoungProfile::enumerate(n) {
                let g0 = gefp_oracle_value(&grid, &p).unwrap();
                let g1 = gefp_inhom_recurrence(&s, &p).unwrap();
                let g2 = gefp_inhom_determinant(&s, &p).unwrap();
                assert!(g1.agrees_with(&g0, 1e-30), "recurrence {p}: {g1} vs {g0}");
                assert!(g2.agrees_with(&g0, 1e-30), "determinant {p}: {g2} vs {g0}");
            }
        }
    }

    #[test]
    fn shifted_determinant_is_invariant() {
        let s = spec(3);
        let p = YoungProfile::new(3, vec![2]).unwrap();
        let g = gefp_inhom_determinant(&s, &p).unwrap();
        let gs = gefp_inhom_determinant_shifted(&s, &p, &f(0.2)).unwrap();
        assert!(gs.rel_diff(&g) < 1e-20);
    }

    #[test]
    fn homogeneous_limit_matches_oracle() {
        let (lam, eta) = (f(1.3), f(0.45));
        let w = weights_from_trig(&lam, &BigFloat::zero(), &eta, false).unwrap();
        for n in 1..=4 {
            let grid = WeightGrid::homogeneous(n, &w);
            for p in YoungProfile::enumerate(n) {
                let g0 = gefp_oracle_value(&grid, &p).unwrap();
                let g = gefp_homogeneous_limit(&p, &lam, &eta).unwrap();
                assert!(g.agrees_with(&g0, 1e-28), "{p}: {g} vs {g0}");
            }
        }
    }
}
