use gpvortex::dynamics::{potential_step, relative_error, strang_step, Backend, WaveField};
use gpvortex::grid::{Closure, Grid1D, Grid2D, Layout};
use gpvortex::krylov::LanczosOptions;
use gpvortex::pade::build_pade;
use gpvortex::spectral::{mirror_extend, physical_block, SpectralField};
use gpvortex::C64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_flow_preserves_modulus(v in prop::collection::vec(complex(), 1..50), tau in -5.0..5.0f64) {
        let mut w = v.clone();
        potential_step(&mut w, tau);
        for (a, b) in w.iter().zip(&v) {
            prop_assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * b.norm().max(1.0));
        }
    }

    #[test]
    fn scaled_fields_have_relative_error_eps(v in prop::collection::vec(complex(), 2..40), eps in 0.0..0.5f64) {
        prop_assume!(v.iter().all(|z| z.norm() > 1e-3));
        let r: Vec<f64> = (1..=v.len()).map(|i| i as f64).collect();
        let w: Vec<C64> = v.iter().map(|z| z * (1.0 + eps)).collect();
        let e = relative_error(&w, &v, &r, 1e9).unwrap();
        prop_assert!((e - eps).abs() < 1e-14);
    }

    #[test]
    fn geometric_grids_hit_the_boundary(l in 5.0..40.0f64, hmin in 0.02..0.2f64, k in 2.0..6.0f64) {
        let mean = (hmin * k).min(0.5 * l);
        if let Ok(g) = Grid1D::build_geometric(l, hmin, mean) {
            let x = g.nodes();
            prop_assert_eq!(x[0], -l);
            prop_assert_eq!(*x.last().unwrap(), l);
            prop_assert!(x.windows(2).all(|w| w[1] > w[0]));
            prop_assert!((g.weights().iter().sum::<f64>() - 2.0 * l).abs() < 1e-10 * l);
        }
    }

    #[test]
    fn mirroring_round_trips(seed in prop::collection::vec(complex(), 25)) {
        let n = 8;
        let ext = mirror_extend(&seed, n).unwrap();
        prop_assert_eq!(physical_block(&ext, n), seed.clone());
        let f = SpectralField::from_samples(3.0, n, &ext).unwrap();
        let back = f.to_samples();
        for (a, b) in back.iter().zip(&ext) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn pade_densities_stay_in_the_unit_interval(r in 0.0..1e4f64, q in 3usize..=4) {
        let p = build_pade(q).unwrap();
        let v = p.rho(r);
        prop_assert!((0.0..1.0).contains(&v) || (r > 1e3 && v <= 1.0));
        prop_assert!(p.rho_prime(r) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn splitting_conserves_mass_and_reverses(
        v in prop::collection::vec(complex(), 81),
        tau in 0.001..0.5f64,
    ) {
        let spec = Backend::spectral(4.0, 16).unwrap();
        let g = Grid2D::square(Grid1D::build_uniform(4.0, 9, Closure::Closed).unwrap(), Layout::Physical);
        let fd = Backend::fd(&g, LanczosOptions::default()).unwrap();
        let fields = [
            WaveField::new(spec.grid().unwrap(), mirror_extend(&v, 16).unwrap()).unwrap(),
            WaveField::new(g, v.clone()).unwrap(),
        ];
        for (b, f0) in [&spec, &fd].into_iter().zip(fields) {
            let m0 = b.mass(&f0.values);
            let mut f = f0.clone();
            strang_step(&mut f, tau, b).unwrap();
            prop_assert!(((b.mass(&f.values) - m0) / m0).abs() < 1e-12);
            strang_step(&mut f, -tau, b).unwrap();
            let err = f.values.iter().zip(&f0.values).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-10, "{} {}", b.name(), err);
        }
    }
}
