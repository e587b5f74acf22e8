use nalgebra::DMatrix;
use period3::bifurcation::{self, Sde2dOptions};
use period3::kinetics::{self, Provenance, RateMatrix};
use period3::model::{self, PhasePoint};
use period3::{orbits, ModelParams};
use proptest::prelude::*;

fn rate_matrix(n: usize, entries: &[f64]) -> RateMatrix {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[(i, j)] = entries[i * n + j];
            }
        }
    }
    RateMatrix {
        w,
        g: (0..n).map(|i| i as f64).collect(),
        provenance: Provenance::Semiclassical,
        kappa: 1.0,
        nbar: 0.0,
    }
}

fn rotate3(pt: PhasePoint) -> PhasePoint {
    pt.rotate(2.0 * std::f64::consts::PI / 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_holds_on_random_orbits(f in 0.15f64..2.5, dg in 0.05f64..0.85, lambda in 0.001f64..0.1) {
        let m = ModelParams::positive(f, lambda);
        let fp = model::wells(&m).unwrap();
        let o = orbits::orbit_solve(&m, fp.g_at(dg)).unwrap();
        let t = orbits::fourier_coefficients(&o, lambda, (o.q.len() - 1) / 2).unwrap();
        prop_assert!((t.parseval_sum() / o.mean_r2() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stationary_distribution_is_a_probability_vector(
        n in 2usize..9,
        entries in prop::collection::vec(0.01f64..10.0, 81),
        lambda in 0.001f64..0.1,
    ) {
        let s = kinetics::stationary_solve(&rate_matrix(n, &entries), lambda).unwrap();
        prop_assert!((s.rho.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.rho.iter().all(|&p| p >= 0.0));
        prop_assert!(s.residual < 1e-9);
    }

    #[test]
    fn cycle_residual_ignores_overall_rate_scale(
        n in 3usize..8,
        entries in prop::collection::vec(0.01f64..10.0, 64),
        factor in 1e-3f64..1e3,
    ) {
        let w = rate_matrix(n, &entries);
        let a = kinetics::detailed_balance_residual(&w).max_violation;
        let b = kinetics::detailed_balance_residual(&w.scaled(factor)).max_violation;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        let s1 = kinetics::stationary_solve(&w, 0.01).unwrap();
        let s2 = kinetics::stationary_solve(&w.scaled(factor), 0.01).unwrap();
        for (x, y) in s1.rho.iter().zip(&s2.rho) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_rates_balance(energies in prop::collection::vec(-3.0f64..3.0, 6)) {
        let n = energies.len();
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[(i, j)] = (-(energies[j] - energies[i]) / 2.0).exp();
                }
            }
        }
        let rm = RateMatrix { w, g: energies.clone(), provenance: Provenance::Semiclassical, kappa: 1.0, nbar: 0.0 };
        prop_assert!(kinetics::detailed_balance_residual(&rm).max_violation <= 1e-12);
    }

    #[test]
    fn damped_field_commutes_with_the_threefold_rotation(
        f in 0.0f64..3.0, kappa in 0.0f64..2.0, q in -2.0f64..2.0, p in -2.0f64..2.0, s in prop::sample::select(vec![1.0, -1.0]),
    ) {
        let m = ModelParams::new(f, 0.01, kappa, 0.0, s).unwrap();
        let pt = PhasePoint::new(q, p);
        let (a, b) = bifurcation::damped_field(&m, kappa, rotate3(pt));
        let (fq, fp) = bifurcation::damped_field(&m, kappa, pt);
        let r = rotate3(PhasePoint::new(fq, fp));
        prop_assert!((a - r.q).abs() < 1e-12 && (b - r.p).abs() < 1e-12);
        prop_assert!((model::g_value(rotate3(pt), &m) - model::g_value(pt, &m)).abs() < 1e-12);
    }

    #[test]
    fn stable_states_are_stationary_without_noise(f in 0.2f64..2.0, frac in 0.05f64..0.95) {
        let m = ModelParams::positive(f, 0.01);
        let kappa = frac * bifurcation::kappa_b(f, 1.0);
        let set = bifurcation::classical_fixed_points(&m, kappa).unwrap();
        prop_assert_eq!(set.stable.len(), 3);
        let opts = Sde2dOptions { dt: 0.005 / kappa.max(1.0), tau_max: 5.0, record_every: 1000, noiseless: true };
        for fpt in &set.stable {
            let end = bifurcation::simulate_2d(&m, kappa, fpt.point, 0, &opts).unwrap().last();
            prop_assert!((end.q - fpt.point.q).hypot(end.p - fpt.point.p) < 1e-8);
        }
    }

    #[test]
    fn branches_merge_at_the_threshold(f in 0.1f64..3.0) {
        let kb = bifurcation::kappa_b(f, 1.0);
        let (hi, lo) = bifurcation::state_radii2(&ModelParams::positive(f, 0.01), kb * (1.0 - 1e-10)).unwrap();
        prop_assert!((hi - lo) / hi < 1e-4);
        prop_assert!((bifurcation::f_b(kb, 1.0) / f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bifurcation_amplitude(f in 0.1f64..3.0, s in prop::sample::select(vec![1.0, -1.0])) {
        prop_assume!(s > 0.0 || f > 2.05);
        let m = ModelParams::new(f, 0.01, 0.0, 0.0, s).unwrap();
        let bd = bifurcation::slow_mode_reduction(&m).unwrap();
        prop_assert!((bd.x_b.norm_sqr() - (s + f * f / 2.0)).abs() < 1e-9);
        prop_assert!(bd.b_b > 0.0);
    }
}

#[test]
fn origin_fluctuations_have_the_oscillator_variance() {
    let m = ModelParams::new(0.0, 0.004, 1.0, 0.5, 1.0).unwrap();
    let opts = Sde2dOptions { dt: 0.005, tau_max: 6.0, record_every: 100_000, noiseless: false };
    let ends = period3::numerics::parallel_map(10_000, |i| {
        bifurcation::simulate_2d(&m, 1.0, PhasePoint::new(0.0, 0.0), i as u64, &opts).unwrap().last()
    });
    let var = ends.iter().map(|e| e.q * e.q + e.p * e.p).sum::<f64>() / (2.0 * ends.len() as f64);
    let expect = m.lambda * (2.0 * m.nbar + 1.0) / 2.0;
    assert!((var / expect - 1.0).abs() < 0.05, "{var} vs {expect}");
}
