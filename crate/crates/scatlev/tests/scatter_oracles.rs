use num_complex::Complex64 as C64;
use proptest::prelude::*;
use scatlev::grid::LineGrid;
use scatlev::potential::Potential;
use scatlev::scatter::{Resonance, Scatterer};

fn grid() -> LineGrid {
    LineGrid::new(2048, 40.0).unwrap()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form square-well bound states (depth `v0`, half width `a`).
fn square_well_levels(v0: f64, a: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let even = |q: f64| q * (q * a).tan() - (v0 - q * q).sqrt();
    let odd = |q: f64| -q / (q * a).tan() - (v0 - q * q).sqrt();
    let qmax = v0.sqrt();
    let half = std::f64::consts::FRAC_PI_2 / a;
    let mut j = 0;
    loop {
        let lo = j as f64 * half + 1e-12;
        if lo >= qmax {
            break;
        }
        let hi = ((j + 1) as f64 * half - 1e-12).min(qmax - 1e-14);
        let q = if j % 2 == 0 { bisect(even, lo, hi) } else { bisect(odd, lo, hi) };
        let f = if j % 2 == 0 { even(q) } else { odd(q) };
        if f.abs() < 1e-6 {
            out.push(q * q - v0);
        }
        j += 1;
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn reflectionless_jost_function() {
    let s = Scatterer::new(&Potential::poschl_teller(2.0, 1.0).unwrap(), &grid());
    let g = grid();
    for &k in &[0.01, 0.3, 1.0, 4.5] {
        let j = s.jost_solve(k).unwrap();
        let i = C64::new(0.0, 1.0);
        let t = (k + i) / (k - i);
        assert!((j.coefficients.t - t).norm() < 1e-6, "k={k}");
        assert!(j.coefficients.r_left.norm() < 1e-6);
        for (idx, m) in j.m_plus.iter().enumerate() {
            let x = g.x(idx);
            let want = (k + i * x.tanh()) / (k + i);
            assert!((m - want).norm() < 1e-6, "k={k} x={x}: {m} vs {want}");
        }
    }
}

#[test]
fn square_well_transmission() {
    let (v0, a) = (4.0, 1.0);
    let s = Scatterer::new(&Potential::square_well(v0, 2.0 * a).unwrap(), &grid());
    for &k in &[0.002, 0.1, 0.9, 2.0, 7.3] {
        let q: f64 = (k * k + v0).sqrt();
        let i = C64::new(0.0, 1.0);
        let t = (-2.0 * i * k * a).exp() * 2.0 * k * q
            / (2.0 * k * q * (2.0 * q * a).cos() - i * (k * k + q * q) * (2.0 * q * a).sin());
        let c = s.coefficients(k).unwrap();
        assert!((c.t - t).norm() < 1e-8, "k={k}: {} vs {t}", c.t);
        assert!((c.r_left - c.r_right).norm() < 1e-8);
    }
}

#[test]
fn square_well_levels_match_transcendental_roots() {
    for &v0 in &[4.0, 16.0, 30.0] {
        let s = Scatterer::new(&Potential::square_well(v0, 2.0).unwrap(), &grid());
        let b = s.bound_states().unwrap();
        let want = square_well_levels(v0, 1.0);
        assert_eq!(b.n_bound, want.len(), "depth {v0}");
        assert_eq!(b.n_bound, (2.0 * v0.sqrt() / std::f64::consts::PI).floor() as usize + 1);
        for (e, w) in b.eigenvalues.iter().zip(&want) {
            assert!((e - w).abs() < 1e-8, "depth {v0}: {e} vs {w}");
        }
        assert_eq!(b.resonance.class, Resonance::Generic);
    }
}

#[test]
fn levels_of_sech2_family() {
    // depth l(l+1): levels -(l-j)^2, zero-energy resonance
    for l in 1..=3usize {
        let depth = (l * (l + 1)) as f64;
        let s = Scatterer::new(&Potential::poschl_teller(depth, 1.0).unwrap(), &grid());
        let b = s.bound_states().unwrap();
        assert_eq!(b.n_bound, l);
        for (j, e) in b.eigenvalues.iter().enumerate() {
            let want = -(((l - j) * (l - j)) as f64);
            assert!((e - want).abs() < 1e-6, "l={l}: {e} vs {want}");
        }
        assert!(b.resonance.class.is_exceptional());
    }
}

#[test]
fn asymmetric_potential_channels() {
    let samples = vec![(-3.0, 0.0), (-1.0, -2.0), (0.5, -0.5), (2.0, 0.0)];
    let s = Scatterer::new(&Potential::custom_samples(samples).unwrap(), &grid());
    let c = s.coefficients(0.8).unwrap();
    assert!(c.flux_defect() < 1e-10);
    assert!((c.r_left - c.r_right).norm() > 1e-3);
    // t r_right* + r_left t* = 0
    assert!((c.t * c.r_right.conj() + c.r_left * c.t.conj()).norm() < 1e-10);
    let sm = s.s_matrix(0.64).unwrap();
    assert!(sm.unitarity_defect() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unitarity_for_random_wells(depth in -3.0f64..6.0, width in 0.3f64..3.0, k in 0.001f64..30.0) {
        let s = Scatterer::new(&Potential::gaussian_well(depth, width).unwrap(), &grid());
        let sm = s.s_matrix(k * k).unwrap();
        prop_assert!(sm.unitarity_defect() < 1e-10);
        // symmetric potential: parity channels decouple
        prop_assert!(sm.parity[0][1].norm() < 1e-9 && sm.parity[1][0].norm() < 1e-9);
    }

    #[test]
    fn eigenfunction_symmetry(depth in 0.1f64..5.0, k in 0.05f64..5.0) {
        let g = grid();
        let s = Scatterer::new(&Potential::square_well(depth, 1.5).unwrap(), &g);
        let p = s.eigenfunction(k).unwrap();
        let m = s.eigenfunction(-k).unwrap();
        // psi(x, -k) = psi(-x, k) for an even potential
        for j in 1..g.n() {
            prop_assert!((m[j] - p[g.n() - j]).norm() < 1e-9);
        }
    }
}

#[test]
fn lippmann_schwinger_residual() {
    // trapezoid on a fine grid with the kink of |x - y| at a node
    let v = Potential::gaussian_well(1.0, 1.0).unwrap();
    let g = LineGrid::new(16384, 40.0).unwrap();
    let s = Scatterer::new(&v, &g);
    let h = g.h();
    for &k in &[0.5f64, -1.0, 2.5] {
        let psi = s.eigenfunction(k).unwrap();
        let vpsi: Vec<C64> = (0..g.n()).map(|j| v.eval(g.x(j)) * psi[j]).collect();
        let mut worst = 0.0f64;
        for j in (g.n() / 4..3 * g.n() / 4).step_by(41) {
            let x = g.x(j);
            let mut acc = C64::new(0.0, 0.0);
            for (i, w) in vpsi.iter().enumerate() {
                let wt = if i == 0 || i == j { 0.5 } else { 1.0 };
                let wt = if i == j { 2.0 * wt } else { wt };
                acc += w * C64::from_polar(wt, k.abs() * (x - g.x(i)).abs());
            }
            let rhs = C64::from_polar(1.0, k * x) + acc * h / C64::new(0.0, 2.0 * k.abs());
            worst = worst.max((psi[j] - rhs).norm());
        }
        assert!(worst <= 1e-5, "k={k}: residual {worst}");
    }
}

#[test]
fn jost_factors_stay_bounded() {
    let catalog = [
        Potential::square_well(4.0, 2.0).unwrap(),
        Potential::gaussian_well(1.0, 1.0).unwrap(),
        Potential::poschl_teller(2.0, 1.0).unwrap(),
        Potential::delta_regularized(-2.0, 0.05).unwrap(),
    ];
    for v in &catalog {
        let s = Scatterer::new(v, &grid());
        for &k in &[1.0, 2.0, 5.0, 20.0] {
            let j = s.jost_solve(k).unwrap();
            let m = j.m_plus.iter().chain(&j.m_minus).map(|z| z.norm()).fold(0.0, f64::max);
            assert!(m <= 10.0);
            assert!((j.m_plus[grid().n() - 1] - 1.0).norm() < 1e-6);
            assert!((j.m_minus[0] - 1.0).norm() < 1e-6);
        }
    }
}

#[test]
fn bound_state_count_survives_refinement() {
    for v in [Potential::square_well(16.0, 2.0).unwrap(), Potential::gaussian_well(3.0, 1.5).unwrap()] {
        let a = Scatterer::new(&v, &LineGrid::new(1024, 40.0).unwrap()).bound_states().unwrap();
        let b = Scatterer::new(&v, &LineGrid::new(2048, 40.0).unwrap()).bound_states().unwrap();
        assert_eq!(a.n_bound, b.n_bound);
    }
}

#[test]
fn s_tends_to_identity_at_high_energy() {
    // first Born order: t - 1 ~ -i \int V / (2k)
    let v = Potential::gaussian_well(1.0, 1.0).unwrap();
    let s = Scatterer::new(&v, &grid());
    for &lambda in &[64.0f64, 1e4] {
        let k = lambda.sqrt();
        let c = s.coefficients(k).unwrap();
        let born = C64::new(0.0, std::f64::consts::PI.sqrt() / (2.0 * k));
        assert!((c.t - 1.0 - born).norm() < 0.2 * born.norm(), "k={k}");
    }
    let sm = s.s_matrix(1e4).unwrap();
    let d = scatlev::mat2::sub(&sm.parity, &scatlev::mat2::identity());
    assert!(scatlev::mat2::frobenius(&d) < 5e-2);
}
