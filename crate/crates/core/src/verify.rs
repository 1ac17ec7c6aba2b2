//! Verification suites shared by the acceptance tests and `gefp-lab verify`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::error::Result;
use crate::gefp::{efp_special_case, gefp_determinant_jets, pole_deformation_check, HomParams, ResidueEngine};
use crate::hfun::{kfint_check, reflected_zero_order, HTable};
use crate::ik::{gefp_inhom_determinant, gefp_inhom_recurrence, homogeneous_partition_jets, ik_partition};
use crate::oracle::{
    boundary_h_oracle_value, gefp_oracle_value, modified_domain_partition, naive_reduced_partition,
    partition_function_oracle, reduced_partition_function, WeightGrid, YoungProfile,
};
use crate::params::{trig_from_delta_t, weights_from_trig, AnisotropyPoint, SpectralData, VertexWeights};
use crate::algebra::UniPoly;
use crate::report::Engine;
use crate::scalar::{BigFloat, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    /// Small sizes only, a few seconds.
    Quick,
    /// The full acceptance grid.
    Desk,
}

impl Level {
    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "quick" => Some(Level::Quick),
            "desk" => Some(Level::Desk),
            _ => None,
        }
    }

    fn n_max(self, desk: usize) -> usize {
        match self {
            Level::Quick => desk.min(3),
            Level::Desk => desk,
        }
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub id: String,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// First few failures, human readable.
    pub failures: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} ({} checks{})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks,
            match self.failures.first() {
                Some(f) => format!(", first failure: {f}"),
                None => String::new(),
            }
        )
    }
}

const FAILURE_LIMIT: usize = 8;

struct Tally {
    checks: usize,
    failures: Vec<String>,
    failed: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < FAILURE_LIMIT {
                self.failures.push(what());
            }
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let w = what();
                self.check(false, || format!("{w}: error {}: {e}", e.name()));
                None
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < FAILURE_LIMIT {
                self.failures.push(f);
            }
        }
    }

    fn report(self, id: &str, title: &'static str, start: Instant) -> SuiteReport {
        SuiteReport {
            id: id.to_string(),
            title,
            passed: self.failed == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            elapsed: start.elapsed(),
        }
    }
}

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

fn fl(prec: u32, x: f64) -> BigFloat {
    BigFloat::from_f64(prec, x)
}

/// The exact `(Δ, t)` grid: ice, free fermion, `Δ = −1`, a nonphysical
/// `Δ > 1` point and a physical `Δ > 1` point.
pub fn exact_grid() -> Vec<(AnisotropyPoint<Rational>, &'static str)> {
    [
        ((1, 2), (1, 1), false, "delta=1/2 t=1"),
        ((0, 1), (1, 1), false, "delta=0 t=1"),
        ((-1, 1), (2, 3), false, "delta=-1 t=2/3"),
        ((3, 2), (1, 2), true, "delta=3/2 t=1/2 (nonphysical)"),
        ((3, 2), (1, 4), false, "delta=3/2 t=1/4"),
    ]
    .into_iter()
    .map(|(d, t, allow, name)| {
        (
            AnisotropyPoint::new(q(d.0, d.1), q(t.0, t.1), allow).expect("grid point"),
            name,
        )
    })
    .collect()
}

fn physical(p: &AnisotropyPoint<Rational>) -> bool {
    Scalar::signum(&p.t) > 0 && Scalar::signum(&p.c_squared_ratio()) > 0
}

/// Criterion 1: Residue engine equals the oracle exactly.
pub fn engine_equivalence(level: Level) -> SuiteReport {
    let start = Instant::now();
    let n_max = level.n_max(5);
    let tallies: Vec<Tally> = exact_grid()
        .into_par_iter()
        .map(|(point, name)| {
            let mut t = Tally::new();
            let Some(mut engine) =
                t.result(ResidueEngine::from_oracle(n_max, point.clone()), || format!("{name}: h tables"))
            else {
                return t;
            };
            for n in 1..=n_max {
                let grid = WeightGrid::from_anisotropy(n, &point);
                for p in YoungProfile::enumerate(n) {
                    let res = t.result(engine.gefp(&p), || format!("{name} {p}: residue"));
                    let ora = t.result(gefp_oracle_value(&grid, &p), || format!("{name} {p}: oracle"));
                    if let (Some(a), Some(b)) = (res, ora) {
                        t.check(a == b, || format!("{name} {p}: residue {a} != oracle {b}"));
                    }
                }
            }
            t
        })
        .collect();
    let mut total = Tally::new();
    tallies.into_iter().for_each(|t| total.merge(t));
    total.report("1", "engine equivalence, residue == oracle (exact)", start)
}

/// Two generic spectral sets on which every weight is positive.
pub fn spectral_sets(n: usize, prec: u32) -> Vec<SpectralData<BigFloat>> {
    let set = |l0: f64, dl: f64, n0: f64, dn: f64, eta: f64| {
        SpectralData::new(
            (0..n).map(|k| fl(prec, l0 + dl * k as f64)).collect(),
            (0..n).map(|l| fl(prec, n0 + dn * l as f64)).collect(),
            fl(prec, eta),
        )
        .expect("equal lengths")
    };
    vec![set(1.1, 0.17, 0.05, 0.07, 0.4), set(1.45, -0.13, -0.2, 0.11, 0.3)]
}

/// Criterion 2: Inhomogeneous recurrence, shift-operator determinant and oracle.
pub fn inhomogeneous_equivalence(level: Level) -> SuiteReport {
    let start = Instant::now();
    let prec = 128;
    let tol = 1e-18;
    let mut t = Tally::new();
    for n in 1..=level.n_max(4) {
        for (i, spec) in spectral_sets(n, prec).iter().enumerate() {
            let Some(grid) = t.result(WeightGrid::from_spectral(spec, false), || format!("set {i} N={n}"))
            else {
                continue;
            };
            for p in YoungProfile::enumerate(n) {
                let ora = t.result(gefp_oracle_value(&grid, &p), || format!("set {i} {p}: oracle"));
                let rec = t.result(gefp_inhom_recurrence(spec, &p), || format!("set {i} {p}: recurrence"));
                let det = t.result(gefp_inhom_determinant(spec, &p), || format!("set {i} {p}: determinant"));
                if let (Some(o), Some(r), Some(d)) = (ora, rec, det) {
                    t.check(r.agrees_with(&o, tol), || format!("set {i} {p}: recurrence {r} vs oracle {o}"));
                    t.check(d.agrees_with(&o, tol), || format!("set {i} {p}: determinant {d} vs oracle {o}"));
                    t.check(d.agrees_with(&r, tol), || format!("set {i} {p}: determinant {d} vs recurrence {r}"));
                }
            }
        }
    }
    t.report("2", "inhomogeneous recurrence == determinant == oracle (1e-18)", start)
}

/// Criterion 3: Izergin–Korepin determinant and its homogeneous limit.
pub fn izergin_korepin(level: Level) -> SuiteReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let prec = 256;
    for n in 1..=level.n_max(5) {
        for (i, spec) in spectral_sets(n, prec).iter().enumerate() {
            let grid = t.result(WeightGrid::from_spectral(spec, false), || format!("set {i} N={n}"));
            let ik = t.result(ik_partition(spec), || format!("set {i} N={n}: ik"));
            if let (Some(g), Some(v)) = (grid, ik) {
                if let Some(o) = t.result(partition_function_oracle(&g), || format!("set {i} N={n}: oracle")) {
                    t.check(v.agrees_with(&o, 1e-22), || format!("set {i} N={n}: ik {v} vs oracle {o}"));
                }
            }
        }
    }
    let prec = 128;
    let pi = BigFloat::pi(prec);
    let half = pi.clone() / &fl(prec, 2.0);
    for (name, eta) in [("ice", pi.clone() / &fl(prec, 6.0)), ("free fermion", pi / &fl(prec, 4.0))] {
        let Some(w) = t.result(weights_from_trig(&half, &fl(prec, 0.0), &eta, false), || name.to_string())
        else {
            continue;
        };
        for n in 1..=level.n_max(5) {
            let jets = t.result(homogeneous_partition_jets(n, &half, &eta), || format!("{name} N={n}"));
            let ora = t.result(partition_function_oracle(&WeightGrid::homogeneous(n, &w)), || {
                format!("{name} N={n}: oracle")
            });
            if let (Some(j), Some(o)) = (jets, ora) {
                t.check(j.agrees_with(&o, 1e-22), || format!("{name} N={n}: jets {j} vs oracle {o}"));
                if name == "ice" && n == 3 {
                    let expected = fl(prec, 7.0) * &(fl(prec, 3.0).sqrt() / &fl(prec, 2.0)).powi(9);
                    t.check(j.agrees_with(&expected, 1e-22), || format!("Z_3(ice) = {j}, expected {expected}"));
                }
            }
        }
    }
    t.report("3", "Izergin-Korepin vs oracle (1e-22 at 256 bits), homogeneous limit", start)
}

/// A generic physical trig point and the ice point.
fn trig_points(prec: u32) -> Vec<(BigFloat, BigFloat, &'static str)> {
    let pi = BigFloat::pi(prec);
    vec![
        (fl(prec, 1.3), fl(prec, 0.35), "lambda=1.3 eta=0.35"),
        (pi.clone() / &fl(prec, 2.0), pi / &fl(prec, 6.0), "ice"),
    ]
}

/// Criterion 4: Boundary correlation: normalisation, `K`-formula, integral identity.
pub fn boundary_layer(level: Level) -> SuiteReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let tol = 1e-18;
    for (point, name) in exact_grid() {
        for n in 1..=level.n_max(6) {
            if let Some(table) = t.result(HTable::from_oracle(&WeightGrid::from_anisotropy(n, &point)), || {
                format!("{name} N={n}")
            }) {
                t.check(table.sum() == q(1, 1), || format!("{name} N={n}: sum H = {}", table.sum()));
            }
        }
    }
    for (lam, eta, name) in trig_points(128) {
        let Some(w) = t.result(weights_from_trig(&lam, &fl(128, 0.0), &eta, false), || name.to_string()) else {
            continue;
        };
        for n in 1..=level.n_max(5) {
            let grid = WeightGrid::homogeneous(n, &w);
            if let Some(table) = t.result(HTable::via_k(n, &lam, &eta), || format!("{name} N={n}: via K")) {
                for r in 1..=n {
                    if let Some(o) = t.result(boundary_h_oracle_value(&grid, r), || format!("{name} N={n}")) {
                        let v = &table.values()[r - 1];
                        t.check(v.agrees_with(&o, tol), || format!("{name} N={n} r={r}: K {v} vs oracle {o}"));
                    }
                }
            }
            for m in 0..=n {
                let f = UniPoly::monomial(fl(128, 1.0), m);
                if let Some((lhs, rhs)) = t.result(kfint_check(n, &f, &lam, &eta), || format!("{name} N={n} m={m}")) {
                    t.check(lhs.agrees_with(&rhs, tol), || format!("{name} N={n} f=z^{m}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    t.report("4", "boundary layer: sum H = 1, H via K, integral identity", start)
}

/// Criterion 5: symmetry, degree bound, specialisation at 1, zero on the
/// reflected curve.
pub fn h_properties(level: Level) -> SuiteReport {
    let start = Instant::now();
    let n_max = level.n_max(4);
    let mut points = exact_grid();
    points.push((AnisotropyPoint::new(q(1, 3), q(3, 4), false).expect("point"), "delta=1/3 t=3/4"));
    let mut t = Tally::new();
    for (point, name) in points {
        let generic = point.delta == q(1, 3);
        let Some(mut engine) = t.result(ResidueEngine::from_oracle(n_max, point.clone()), || name.to_string())
        else {
            continue;
        };
        for n in 1..=n_max {
            let mut previous = None;
            for s in 0..=n {
                let Some(h) = t.result(engine.h_poly(n, s), || format!("{name} N={n} s={s}")) else {
                    break;
                };
                for v in 0..s {
                    let d = h.degree_in(v).unwrap_or(0);
                    t.check(d < n, || format!("{name} N={n} s={s}: degree {d} in z_{}", v + 1));
                    for w in v + 1..s {
                        t.check(h.swap_vars(v, w) == h, || format!("{name} N={n} s={s}: not symmetric"));
                    }
                }
                if let Some(prev) = previous.take() {
                    let at1 = h.drop_var_at(s - 1, &q(1, 1));
                    t.check(at1 == prev, || format!("{name} N={n} s={s}: h(…,1) != h_(N,s-1)"));
                }
                for j in 0..s.saturating_sub(1) {
                    let order = t.result(reflected_zero_order(&h, &point, j, s - 1), || {
                        format!("{name} N={n} s={s} j={}", j + 1)
                    });
                    if let Some(order) = order {
                        let ok = if generic {
                            order == Some(1)
                        } else {
                            order.map_or(true, |o| o >= 1)
                        };
                        t.check(ok, || {
                            format!("{name} N={n} s={s} j={}: order {order:?} at the reflected point", j + 1)
                        });
                    }
                }
                previous = Some(h);
            }
        }
    }
    t.report("5", "h_{N,s}: symmetry, degree, h(..,1), simple zero (exact)", start)
}

/// Criterion 6: Vanishing, reduction, contour deformation, EFP wrapper.
pub fn structural_properties(level: Level) -> SuiteReport {
    let start = Instant::now();
    let n_max = level.n_max(5);
    let tallies: Vec<Tally> = exact_grid()
        .into_par_iter()
        .filter(|(p, _)| physical(p))
        .map(|(point, name)| {
            let mut t = Tally::new();
            let Some(mut engine) = t.result(ResidueEngine::from_oracle(n_max, point.clone()), || name.to_string())
            else {
                return t;
            };
            for n in 1..=n_max {
                for p in YoungProfile::enumerate(n) {
                    let Some(g) = t.result(engine.gefp(&p), || format!("{name} {p}")) else {
                        continue;
                    };
                    t.check(g.is_zero() == p.is_vanishing(), || format!("{name} {p}: G = {g}"));
                    t.check((0..=1).contains(&g), || format!("{name} {p}: G = {g} outside [0,1]"));
                    if p.r().last() == Some(&n) {
                        if let Some(h) = t.result(engine.gefp(&p.without_last()), || format!("{name} {p}")) {
                            t.check(g == h, || format!("{name} {p}: G = {g} but shorter profile gives {h}"));
                        }
                        if n <= 4 {
                            let rep = t.result(pole_deformation_check(&mut engine, &p), || format!("{name} {p}"));
                            if let Some(rep) = rep {
                                t.check(rep.balanced, || format!("{name} {p}: unbalanced {rep:?}"));
                            }
                        }
                    }
                }
                // the wrapper builds its own engine, so keep it to N <= 4
                let efp_n = if n <= 4 { n } else { 0 };
                for s in 1..=efp_n {
                    for r in 1..=efp_n {
                        let params = HomParams::DeltaT(point.clone());
                        let efp = t.result(efp_special_case(n, s, r, &params, Engine::Residue, false), || {
                            format!("{name} efp N={n} s={s} r={r}")
                        });
                        let grid = WeightGrid::from_anisotropy(n, &point);
                        let profile = YoungProfile::constant(n, s, r).expect("valid");
                        let ora = t.result(gefp_oracle_value(&grid, &profile), || format!("{name} {profile}"));
                        let general = t.result(engine.gefp(&profile), || format!("{name} {profile}"));
                        if let (Some(e), Some(o), Some(g)) = (efp, ora, general) {
                            t.check(e.value == o && e.value == g, || {
                                format!("{name} EFP {profile}: {} vs oracle {o}, engine {g}", e.value)
                            });
                        }
                    }
                }
            }
            t
        })
        .collect();
    let mut total = Tally::new();
    tallies.into_iter().for_each(|t| total.merge(t));
    total.report("6", "vanishing, reduction at r_s = N, pole deformation, EFP", start)
}

/// Criterion 7: `Z_mod · a^{|μ|} = G · Z_N`.
pub fn cut_domain(level: Level) -> SuiteReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let points = [
        ("ice", VertexWeights::new(q(1, 1), q(1, 1), q(1, 1), false)),
        ("a=2 b=1 c=3/2", VertexWeights::new(q(2, 1), q(1, 1), q(3, 2), false)),
    ];
    for (name, w) in points {
        let Some(w) = t.result(w, || name.to_string()) else { continue };
        for n in 1..=level.n_max(4) {
            let grid = WeightGrid::homogeneous(n, &w);
            let Some(z) = t.result(partition_function_oracle(&grid), || format!("{name} N={n}")) else {
                continue;
            };
            for p in YoungProfile::enumerate(n) {
                let zmod = t.result(modified_domain_partition(&grid, &p), || format!("{name} {p}"));
                let g = t.result(gefp_oracle_value(&grid, &p), || format!("{name} {p}"));
                if let (Some(zm), Some(g)) = (zmod, g) {
                    let lhs = zm * &w.a.powi(p.mu_size() as u32);
                    let rhs = g * &z;
                    t.check(lhs == rhs, || format!("{name} {p}: {lhs} != {rhs}"));
                }
            }
        }
    }
    t.report("7", "cut domain: Z_mod a^|mu| == G Z_N (exact)", start)
}

/// Criterion 8: Number of configurations at `a = b = c = 1`.
pub fn configuration_counts(level: Level) -> SuiteReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let expected = [1, 2, 7, 42, 429];
    let w = VertexWeights::new(q(1, 1), q(1, 1), q(1, 1), false).expect("weights");
    for n in 1..=level.n_max(5) {
        let grid = WeightGrid::homogeneous(n, &w);
        if let Some(z) = t.result(reduced_partition_function(&grid), || format!("N={n}")) {
            t.check(z == expected[n - 1], || format!("N={n}: {z} configurations"));
        }
        if n <= 3 {
            if let Some(z) = t.result(naive_reduced_partition(&grid), || format!("naive N={n}")) {
                t.check(z == expected[n - 1], || format!("naive N={n}: {z} configurations"));
            }
        }
    }
    t.report("8", "configuration counts 1, 2, 7, 42, 429", start)
}

/// Jets determinant against the exact residue value, over the `|Δ| < 1`
/// grid points, at 128 bits.
pub fn jets_vs_residue(level: Level) -> SuiteReport {
    let start = Instant::now();
    let prec = 128;
    let n_max = level.n_max(5);
    let mut t = Tally::new();
    for (point, name) in exact_grid() {
        let delta = point.delta.clone();
        if !(delta > -1 && delta < 1) {
            continue;
        }
        let fpoint = AnisotropyPoint {
            delta: BigFloat::from_rational(prec, &point.delta),
            t: BigFloat::from_rational(prec, &point.t),
        };
        let Some((lam, eta)) = t.result(trig_from_delta_t(&fpoint), || name.to_string()) else {
            continue;
        };
        let Some(mut engine) = t.result(ResidueEngine::from_oracle(n_max, point.clone()), || name.to_string())
        else {
            continue;
        };
        for n in 1..=n_max {
            for p in YoungProfile::enumerate(n) {
                let exact = t.result(engine.gefp(&p), || format!("{name} {p}: residue"));
                let jets = t.result(gefp_determinant_jets(&p, &lam, &eta), || format!("{name} {p}: jets"));
                if let (Some(e), Some(j)) = (exact, jets) {
                    let e = BigFloat::from_rational(prec, &e);
                    t.check(j.agrees_with(&e, 1e-14), || format!("{name} {p}: jets {j} vs residue {e}"));
                }
            }
        }
    }
    t.report("jets", "jets determinant vs residue (1e-14, |delta| < 1)", start)
}

/// The eight acceptance criteria, in order.
pub fn acceptance(level: Level) -> Vec<SuiteReport> {
    let suites: [fn(Level) -> SuiteReport; 8] = [
        engine_equivalence,
        inhomogeneous_equivalence,
        izergin_korepin,
        boundary_layer,
        h_properties,
        structural_properties,
        cut_domain,
        configuration_counts,
    ];
    suites.par_iter().map(|f| f(level)).collect()
}

/// Acceptance criteria plus the jets cross-check.
pub fn all_suites(level: Level) -> Vec<SuiteReport> {
    let mut out = acceptance(level);
    out.push(jets_vs_residue(level));
    out
}
