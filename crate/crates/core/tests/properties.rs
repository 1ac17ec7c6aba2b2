use gefp_lab::algebra::Jet;
use gefp_lab::gefp::ResidueEngine;
use gefp_lab::hfun::{h_multivariate_poly, HFamily, HTable, OmegaRho};
use gefp_lab::ik::{homogeneous_partition_jets, ik_partition};
use gefp_lab::oracle::{
    boundary_h_table, gefp_oracle_frozen, gefp_oracle_value, WeightGrid, YoungProfile,
};
use gefp_lab::params::{
    delta_t_from_trig, delta_t_from_weights, weights_from_trig, AnisotropyPoint, SpectralData,
    VertexWeights,
};
use gefp_lab::scalar::{BigFloat, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

const PREC: u32 = 128;

fn f(x: f64) -> BigFloat {
    BigFloat::from_f64(PREC, x)
}

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

/// Rational `(Δ, t)` with `t > 0` and `c² > 0`.
fn physical_point() -> impl Strategy<Value = AnisotropyPoint<Rational>> {
    (-12i64..=12, 1i64..=6, 1i64..=12, 1i64..=6).prop_filter_map(
        "c² must be positive",
        |(dp, dq, tp, tq)| AnisotropyPoint::new(q(dp, dq), q(tp, tq), false).ok(),
    )
}

fn profile(n_max: usize) -> impl Strategy<Value = YoungProfile> {
    (1..=n_max).prop_flat_map(|n| {
        let all = YoungProfile::enumerate(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

/// Physical trig pair: `0 < η < π/2`, `η < λ < π − η`.
fn trig_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..1.5, 0.05f64..0.95).prop_map(|(eta, u)| {
        let lo = eta;
        let hi = std::f64::consts::PI - eta;
        (lo + (hi - lo) * u, eta)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_delta_is_cos_two_eta((lambda, eta) in trig_pair(), nu in -0.02f64..0.02) {
        let (lambda, nu, eta) = (f(lambda + nu), f(nu), f(eta));
        let w = weights_from_trig(&lambda, &nu, &eta, false).unwrap();
        let p = delta_t_from_weights(&w).unwrap();
        let cos = (f(2.0) * &eta).cos().unwrap();
        prop_assert!(p.delta.agrees_with(&cos, 1e-30));
    }

    #[test]
    fn anisotropy_is_scale_invariant(
        a in 1i64..50, b in 1i64..50, c in 1i64..50, kp in 1i64..20, kq in 1i64..20,
    ) {
        let k = q(kp, kq);
        let w = VertexWeights::new(q(a, 1), q(b, 1), q(c, 1), true).unwrap();
        let scaled = VertexWeights::new(
            q(a, 1) * &k, q(b, 1) * &k, q(c, 1) * &k, true,
        ).unwrap();
        prop_assert_eq!(delta_t_from_weights(&w).unwrap(), delta_t_from_weights(&scaled).unwrap());
    }

    #[test]
    fn gefp_vanishes_exactly_below_diagonal(point in physical_point(), p in profile(4)) {
        let g = gefp_oracle_value(&WeightGrid::from_anisotropy(p.n(), &point), &p).unwrap();
        if p.is_vanishing() {
            prop_assert!(g.is_zero());
        } else {
            prop_assert!(g > 0 && g <= 1, "G = {} out of (0, 1]", g);
        }
    }

    #[test]
    fn edge_and_frozen_definitions_agree(point in physical_point(), p in profile(4)) {
        let grid = WeightGrid::from_anisotropy(p.n(), &point);
        prop_assert_eq!(
            gefp_oracle_value(&grid, &p).unwrap(),
            gefp_oracle_frozen(&grid, &p).unwrap()
        );
    }

    #[test]
    fn last_row_at_n_drops_out(point in physical_point(), p in profile(4)) {
        prop_assume!(p.r().last() == Some(&p.n()));
        let grid = WeightGrid::from_anisotropy(p.n(), &point);
        prop_assert_eq!(
            gefp_oracle_value(&grid, &p).unwrap(),
            gefp_oracle_value(&grid, &p.without_last()).unwrap()
        );
    }

    #[test]
    fn boundary_layer_sums_to_one(point in physical_point(), n in 1usize..=5) {
        let grid = WeightGrid::from_anisotropy(n, &point);
        let table = HTable::new(boundary_h_table(&grid).unwrap()).unwrap();
        prop_assert_eq!(table.sum(), Rational::from(1));
        // partial sums are the single-row GEFP and never decrease
        let sums = table.partial_sums();
        for r in 1..=n {
            let g = gefp_oracle_value(&grid, &YoungProfile::new(n, vec![r]).unwrap()).unwrap();
            prop_assert_eq!(&sums[r - 1], &g);
        }
        prop_assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn residue_equals_oracle_at_random_points(point in physical_point(), p in profile(4)) {
        let mut engine = ResidueEngine::from_oracle(p.n(), point.clone()).unwrap();
        let oracle = gefp_oracle_value(&WeightGrid::from_anisotropy(p.n(), &point), &p).unwrap();
        prop_assert_eq!(engine.gefp(&p).unwrap(), oracle);
    }

    #[test]
    fn h_specialises_at_one(point in physical_point(), n in 2usize..=4, s in 2usize..=4) {
        prop_assume!(s <= n);
        let family = HFamily::from_anisotropy(n, &point).unwrap();
        let h = h_multivariate_poly(&family, n, s).unwrap();
        let lower = h_multivariate_poly(&family, n, s - 1).unwrap();
        prop_assert_eq!(h.drop_var_at(s - 1, &Rational::from(1)), lower);
        for v in 0..s {
            prop_assert!(h.degree_in(v).map_or(true, |d| d < n));
        }
    }

    #[test]
    fn omega_rho_jet_identities((lambda, eta) in trig_pair()) {
        let (lambda, eta) = (f(lambda), f(eta));
        let order = 8;
        let or = OmegaRho::new(&lambda, &eta, order).unwrap();
        let one = Jet::constant(f(1.0), order);
        let small = |j: &Jet<BigFloat>, scale: f64| {
            j.coeffs().iter().all(|c| c.abs().to_f64() <= 1e-28 * scale.max(1.0))
        };
        let r = or.rho.mul(&or.omega.add_scalar(&-f(1.0))).sub(&one);
        let size = or.rho.coeffs().iter().map(|c| c.abs().to_f64()).fold(1.0, f64::max);
        prop_assert!(small(&r, size));
        let p = &or.point;
        let lhs = or.omega_tilde.mul(&or.omega.scale(&p.two_delta_t()).add_scalar(&-f(1.0)));
        let rhs = or.omega.scale(&(p.t.clone() * &p.t));
        let size = or.omega_tilde.coeffs().iter().map(|c| c.abs().to_f64()).fold(1.0, f64::max);
        prop_assert!(small(&lhs.sub(&rhs), size));
    }

    #[test]
    fn ik_matches_oracle_at_random_rapidities(seed in any::<u64>(), n in 1usize..=4) {
        let spec = random_spectral(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let grid = WeightGrid::from_spectral(&spec, true).unwrap();
        let oracle = gefp_lab::oracle::partition_function_oracle(&grid).unwrap();
        prop_assert!(ik_partition(&spec).unwrap().agrees_with(&oracle, 1e-25));
    }
}

fn random_spectral(rng: &mut ChaCha8Rng, n: usize) -> SpectralData<BigFloat> {
    // well separated so the Cauchy-like denominators stay away from zero
    let lambdas = (0..n).map(|k| f(0.9 + 0.37 * k as f64 + rng.gen_range(0.0..0.1))).collect();
    let nus = (0..n).map(|k| f(-0.2 + 0.29 * k as f64 + rng.gen_range(0.0..0.1))).collect();
    SpectralData::new(lambdas, nus, f(rng.gen_range(0.2..0.5))).unwrap()
}

#[test]
fn ik_is_symmetric_in_each_rapidity_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = random_spectral(&mut rng, 3);
    let z = ik_partition(&spec).unwrap();
    for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
        let mut lam = spec.clone();
        lam.lambdas = perm.iter().map(|&i| spec.lambdas[i].clone()).collect();
        assert!(ik_partition(&lam).unwrap().agrees_with(&z, 1e-30));
        let mut nu = spec.clone();
        nu.nus = perm.iter().map(|&i| spec.nus[i].clone()).collect();
        assert!(ik_partition(&nu).unwrap().agrees_with(&z, 1e-30));
    }
}

#[test]
fn ik_converges_to_homogeneous_limit() {
    let (lambda, eta) = (f(1.1), f(0.35));
    let n = 3;
    let exact = homogeneous_partition_jets(n, &lambda, &eta).unwrap();
    let err = |h: f64| {
        let spec = SpectralData::new(
            (0..n).map(|k| lambda.clone() + &f(h * k as f64)).collect(),
            (0..n).map(|k| f(-h * 0.5 * k as f64)).collect(),
            eta.clone(),
        )
        .unwrap();
        ik_partition(&spec).unwrap().rel_diff(&exact)
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!(e2 < e1, "error did not shrink: {e1} -> {e2}");
    // first order in h: halving h roughly halves the error
    assert!(e2 < 0.7 * e1);
}

#[test]
fn trig_point_conversion_is_consistent() {
    let (lambda, eta) = (f(1.2), f(0.4));
    let p = delta_t_from_trig(&lambda, &eta).unwrap();
    let w = weights_from_trig(&lambda, &f(0.0), &eta, false).unwrap();
    let via_w = delta_t_from_weights(&w).unwrap();
    assert!(p.delta.agrees_with(&via_w.delta, 1e-35));
    assert!(p.t.agrees_with(&via_w.t, 1e-35));
}
