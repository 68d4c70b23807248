use proptest::prelude::*;
use scatlev::asymptotics::*;
use scatlev::grid::{Direction, LineGrid};
use scatlev::potential::Potential;
use scatlev::Error;

fn config() -> SuiteConfig {
    toml::from_str(include_str!("data/asymptotics.toml")).unwrap()
}

fn well() -> Potential {
    Potential::gaussian_well(1.0, 1.0).unwrap()
}

#[test]
fn free_curves_vanish() {
    let r = run_suite(&Potential::zero(), &config()).unwrap();
    for c in &r.curves {
        assert!(c.max_norm() <= 1e-8, "{}: {}", c.quantity.tag(), c.max_norm());
    }
    assert!(r.pass);
}

#[test]
fn gaussian_well_suite_decays() {
    let cfg = config();
    let r = run_suite(&well(), &cfg).unwrap();
    for v in &r.verdicts {
        assert!(v.strictly_decreasing && !v.zero_curve, "{v:?}");
        assert!(v.final_value < v.threshold, "{v:?}");
        assert!(v.pass, "{v:?}");
    }
    for q in [Quantity::LogTimePast, Quantity::LogTimeFuture] {
        assert!(r.verdict(q).unwrap().cross_check.unwrap() <= cfg.thresholds.cross_check);
    }
    for v in &r.verdicts {
        println!("{:16} final {:.4} ratio {:.2}", v.quantity.tag(), v.final_value, v.adjoint_ratio);
    }
    // T* outruns T on the low-energy and future-cut curves, where the T
    // variant keeps the slowly decaying tail of Omega q
    let joint = r.verdicts.iter().filter(|v| !matches!(v.quantity, Quantity::LowEnergy | Quantity::FutureCut));
    for v in joint {
        assert!(v.adjoint_ratio_ok, "{v:?}");
    }
    assert!(r.singular_ratio_20 <= cfg.thresholds.singular_ratio);
    assert!(r.pass);
    for c in &r.curves {
        assert_eq!((c.n, c.x_max), (cfg.n, cfg.x_max));
        assert!(c.norm.iter().chain(&c.norm_adjoint).all(|&x| x >= 0.0));
    }
}

#[test]
fn unresolvable_parameters_are_range_errors() {
    let cfg = config();
    let g = LineGrid::new(cfg.n, cfg.x_max).unwrap();
    let b = Workbench::new(&well(), &g, &cfg.subspace).unwrap();
    let (lo, hi) = b.rescaling_window();
    assert!(lo < -3.0 && hi > 1.05, "({lo}, {hi})");
    let e = b.rescaled_family(&[0.0, hi + 0.5], false).unwrap_err();
    assert!(matches!(&e, Error::Range(m) if m.contains("window")), "{e}");
    assert!(matches!(b.corollary_limits(Quantity::LowEnergy, &[1e-6]), Err(Error::Range(_))));
    assert!(matches!(b.corollary_limits(Quantity::HighEnergy, &[1e6]), Err(Error::Range(_))));
    assert!(matches!(b.corollary_limits(Quantity::PastCut, &[-1e4]), Err(Error::Range(_))));
    assert!(matches!(b.corollary_limits(Quantity::LogTimePast, &[1.0]), Err(Error::Contract(_))));
}

#[test]
fn broken_transform_is_not_reported_as_physics() {
    let g = LineGrid::new(2048, 40.0).unwrap();
    let spec = SubspaceSpec { x_extent: 12.0, k_low: 0.0, k_band: 8.0, concentration: 0.99 };
    let b = Workbench::new(&well(), &g, &spec).unwrap();
    assert!(b.isometry_defect() > 1e-2);
    assert!(matches!(b.log_time_propagation(&[-1.0], false), Err(Error::Infrastructure(_))));
}

#[test]
fn generic_gamma1_matches_point_symbol() {
    let cfg = config();
    let g = LineGrid::new(cfg.n, cfg.x_max).unwrap();
    let b = Workbench::new(&well(), &g, &cfg.subspace).unwrap();
    assert!(b.gamma1_point_deviation(10.0, 2001) <= 2e-2);
}

#[test]
fn tiny_time_bandwidth_product_is_a_contract_error() {
    let g = LineGrid::new(256, 20.0).unwrap();
    let spec = SubspaceSpec { x_extent: 0.5, k_low: 0.6, k_band: 1.6, concentration: 0.95 };
    assert!(matches!(test_subspace(&g, &spec), Err(Error::Contract(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subspace_is_band_limited_and_orthonormal(x_extent in 2.5f64..5.0, k_low in 0.0f64..1.0, width in 3.0f64..6.0) {
        let g = LineGrid::new(256, 20.0).unwrap();
        let spec = SubspaceSpec { x_extent, k_low, k_band: k_low + width, concentration: 0.95 };
        let s = test_subspace(&g, &spec).unwrap();
        prop_assert!(s.dim() >= 1);
        let gram = s.basis.adjoint() * &s.basis;
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)].re - want).abs() < 1e-9 && gram[(i, j)].im.abs() < 1e-9);
            }
        }
        for j in 0..s.dim() {
            let col: Vec<_> = (0..g.n()).map(|i| s.basis[(i, j)]).collect();
            let fh = g.fourier(&col, Direction::Forward).unwrap();
            let outside: f64 = (0..g.n())
                .filter(|&m| g.k(m).abs() > spec.k_band || g.k(m).abs() < k_low)
                .map(|m| fh[m].norm_sqr())
                .sum();
            prop_assert!(outside < 1e-20);
        }
    }
}
