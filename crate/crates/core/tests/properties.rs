use proptest::prelude::*;
use thermovoid::constitutive::{bilinear_form, bilinear_form_via_response, energy_w};
use thermovoid::material::{epsilon_of_lambda, epsilon_residual, feasibility_window, spectrum, zeta_of_lambda};
use thermovoid::measures::fmt_float;
use thermovoid::sampling::Sampler;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bilinear_form_is_symmetric_and_matches_the_response(seed: u64, dim in 1usize..=3, alpha in -3.0f64..3.0) {
        let mut s = Sampler::new(seed);
        let m = s.material(dim);
        let (e, f) = (s.kinematic(dim), s.kinematic(dim));
        let ef = bilinear_form(&e, &f, &m);
        prop_assert!(close(ef, bilinear_form(&f, &e, &m), 1e-12));
        prop_assert!(close(ef, bilinear_form_via_response(&e, &f, &m), 1e-12));
        let scaled = e.combine(alpha, &f, 0.0);
        prop_assert!(close(energy_w(&scaled, &m), alpha * alpha * energy_w(&e, &m), 1e-12));
    }

    #[test]
    fn stored_energy_lies_between_the_extreme_eigenvalues(seed: u64, dim in 1usize..=3) {
        let mut s = Sampler::new(seed);
        let m = s.material(dim);
        let sp = spectrum(&m).unwrap();
        let e = s.kinematic(dim);
        let w = 2.0 * energy_w(&e, &m);
        let n = e.norm_sq(m.inertia);
        prop_assert!(w >= sp.mu_min * n * (1.0 - 1e-10) && w <= sp.mu_max * n * (1.0 + 1e-10));
    }

    #[test]
    fn spectrum_scales_with_the_stored_energy(seed: u64, dim in 1usize..=3, c in 0.01f64..100.0) {
        let mut s = Sampler::new(seed);
        let m = s.material(dim);
        let a = spectrum(&m).unwrap();
        let b = spectrum(&m.scale_stored_energy(c)).unwrap();
        prop_assert!(close(b.mu_min, c * a.mu_min, 1e-9));
        prop_assert!(close(b.mu_max, c * a.mu_max, 1e-9));
    }

    #[test]
    fn epsilon_root_is_nonnegative_and_zeta_grows(seed: u64, dim in 1usize..=3, log_lambda in -2.0f64..6.0) {
        let mut s = Sampler::new(seed);
        let m = s.material(dim);
        let sp = spectrum(&m).unwrap();
        let lambda = 10f64.powf(log_lambda);
        let eps = epsilon_of_lambda(&sp, &m, lambda);
        prop_assert!(eps >= 0.0);
        prop_assert!(epsilon_residual(&sp, &m, lambda, eps) <= 1e-12);
        let lo = zeta_of_lambda(&sp, &m, lambda).unwrap();
        let hi = zeta_of_lambda(&sp, &m, 2.0 * lambda).unwrap();
        prop_assert!(hi.zeta >= lo.zeta);
        prop_assert!(lo.zeta >= (sp.mu_max / m.density).sqrt());
    }

    #[test]
    fn latest_start_lies_in_the_window(zeta in 0.1f64..10.0, length in 0.1f64..5.0, extra in 0.0f64..5.0, frac in 0.0f64..=1.0) {
        let horizon = length / zeta + extra;
        let w = feasibility_window(zeta, length, horizon).unwrap();
        let r0 = frac * length;
        if let Some((t0, r)) = w.latest(r0) {
            prop_assert!(w.contains(t0, r));
        }
        let (lo, hi) = w.t0_range(0.0).unwrap();
        prop_assert!(lo <= hi && w.contains(hi, 0.0));
    }

    #[test]
    fn formatted_floats_round_trip(x: f64) {
        prop_assume!(x.is_finite());
        let back: f64 = fmt_float(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}
