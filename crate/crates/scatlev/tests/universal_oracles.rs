use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatlev::grid::{LineGrid, LogGrid};
use scatlev::universal::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn rel(a: &[C64], b: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (d / n).sqrt()
}

// Packets used with the Mellin route keep away from `x = 0` and from
// `k = 0`, so that `T f` has no slowly decaying tail reaching the box edge.

/// Gaussian packet `e^{-(x-c)^2/(2w^2)} e^{i k0 x}`.
fn packet(g: &LineGrid, c: f64, w: f64, k0: f64) -> Vec<C64> {
    (0..g.n())
        .map(|j| {
            let x = g.x(j);
            C64::from_polar((-(x - c).powi(2) / (2.0 * w * w)).exp(), k0 * x)
        })
        .collect()
}

/// Closed-form `(2 pi)^{-1/2} \int e^{-ikx} packet(x) dx`.
fn packet_hat(k: f64, c: f64, w: f64, k0: f64) -> C64 {
    C64::from_polar(w * (-(w * w) * (k - k0).powi(2) / 2.0).exp(), -(k - k0) * c)
}

fn random_packets(g: &LineGrid, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut f = vec![C64::new(0.0, 0.0); g.n()];
            for _ in 0..3 {
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let c = side * rng.random_range(10.0..16.0);
                let w = rng.random_range(1.5..2.0);
                let k0 = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(4.0..7.0);
                let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                for (v, p) in f.iter_mut().zip(packet(g, c, w, k0)) {
                    *v += a * p;
                }
            }
            f
        })
        .collect()
}

fn bridge() -> (LineGrid, MellinBridge) {
    let g = LineGrid::new(2048, 40.0).unwrap();
    let b = MellinBridge::with_default_log(&g).unwrap();
    (g, b)
}

#[test]
fn hilbert_of_lorentzian() {
    let g = LineGrid::new(262144, 8000.0).unwrap();
    let f: Vec<C64> = (0..g.n()).map(|j| C64::new(1.0 / (1.0 + g.x(j).powi(2)), 0.0)).collect();
    let hf = hilbert_transform(&g, &f).unwrap();
    for j in 0..g.n() {
        let x = g.x(j);
        if x.abs() <= 10.0 {
            let want = x / (1.0 + x * x);
            assert!((hf[j] - want).norm() < 1e-6, "x={x}: {} vs {want}", hf[j]);
        }
    }
}

#[test]
fn hilbert_squares_to_minus_one_and_swaps_parity() {
    let g = LineGrid::new(1024, 30.0).unwrap();
    let f: Vec<C64> = (0..g.n())
        .map(|j| {
            let x = g.x(j);
            C64::new((-x * x).exp() * (1.0 + x * x), 0.0)
        })
        .collect();
    let hf = hilbert_transform(&g, &f).unwrap();
    let hhf = hilbert_transform(&g, &hf).unwrap();
    assert!(hhf.iter().zip(&f).all(|(a, b)| (a + b).norm() < 1e-10));
    let r = g.reflect(&hf).unwrap();
    assert!(r.iter().zip(&hf).skip(1).all(|(a, b)| (a + b).norm() < 1e-10));
}

#[test]
fn t_fourier_matches_half_line_integral() {
    let g = LineGrid::new(2048, 40.0).unwrap();
    let (c, w, k0) = (1.5, 1.0, 6.0);
    let f = packet(&g, c, w, k0);
    let tf = apply_t_fourier(&g, &f).unwrap();
    let dq = 1e-3;
    for j in (0..g.n()).step_by(97) {
        let x = g.x(j);
        if x == 0.0 {
            continue;
        }
        // (2 pi)^{-1/2} \int_0^inf e^{i q |x|} f^(q sign x) dq, midpoint rule
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..20000 {
            let q = (i as f64 + 0.5) * dq;
            acc += C64::from_polar(1.0, q * x.abs()) * packet_hat(q * x.signum(), c, w, k0);
        }
        let want = acc * dq / (2.0 * PI).sqrt();
        assert!((tf[j] - want).norm() < 1e-5, "x={x}: {} vs {want}", tf[j]);
    }
    let zero = apply_t_fourier(&g, &vec![C64::new(0.0, 0.0); g.n()]).unwrap();
    assert!(zero.iter().all(|z| z.norm() == 0.0));
    // T and its complement partition the identity
    let hf = hilbert_transform(&g, &f).unwrap();
    for j in 0..g.n() {
        let s = if j > g.origin() { 1.0 } else if j < g.origin() { -1.0 } else { 0.0 };
        let comp = 0.5 * (f[j] - I * s * hf[j]);
        assert!((tf[j] + comp - f[j]).norm() < 1e-10);
    }
}

#[test]
fn hilbert_is_minus_r_of_a_on_random_packets() {
    let (g, b) = bridge();
    for f in random_packets(&g, 20, 7) {
        let tm = b.apply_t_mellin(&f).unwrap();
        let tf = apply_t_fourier(&g, &f).unwrap();
        let nf = g.norm_x(&f);
        let e = rel(&tm, &tf) * g.norm_x(&tf) / nf;
        assert!(e <= 1e-6, "T realizations differ by {e}");

        let rf = b.apply_r(&f).unwrap();
        let hf = hilbert_transform(&g, &f).unwrap();
        let ish: Vec<C64> = apply_sigma(&g, &hf).iter().map(|z| I * z).collect();
        let sum: Vec<C64> = ish.iter().zip(&rf).map(|(a, b)| a + b).collect();
        assert!(g.norm_x(&sum) / nf <= 1e-6);
        let isr: Vec<C64> = apply_sigma(&g, &rf).iter().map(|z| I * z).collect();
        assert!(rel(&isr, &hf) * g.norm_x(&hf) / nf <= 1e-6);
        assert!((g.norm_x(&rf) / nf - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn t_mellin_eigen_action_at_zero() {
    let (e, _) = r_pair(0.0);
    assert!((0.5 * (1.0 - e) - C64::new(0.5, 0.5)).norm() < 1e-15);
    let (g, b) = bridge();
    let zero = b.apply_t_mellin(&vec![C64::new(0.0, 0.0); g.n()]).unwrap();
    assert!(zero.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn fourier_conjugation_flips_a() {
    let (g, b) = bridge();
    let (c, w, k0) = (10.0, 1.0, 10.0);
    let f = packet(&g, c, w, k0);
    let th = |s: f64| C64::new((PI * s).tanh(), 0.0);
    let thm = |s: f64| C64::new((-PI * s).tanh(), 0.0);
    // phi(A) F* f, with F* f in closed form
    let fstar: Vec<C64> = (0..g.n()).map(|j| packet_hat(-g.x(j), c, w, k0)).collect();
    let lhs = b.function_of_a(&fstar, th, th).unwrap();
    // F* phi(-A) f, transforming samples taken at the momentum nodes
    let pm = b.function_of_a(&f, thm, thm).unwrap();
    let interp = g.interpolant(&pm, 8).unwrap();
    let at_k: Vec<C64> = (0..g.n())
        .map(|m| if g.k(m).abs() < g.x_max() { interp.eval(g.k(m)) } else { C64::new(0.0, 0.0) })
        .collect();
    let rhs = g.fourier(&at_k, scatlev::grid::Direction::Inverse).unwrap();
    let e = rel(&lhs, &rhs);
    assert!(e <= 1e-6, "flip error {e}");
}

#[test]
fn canonical_commutation_shift() {
    let (g, b) = bridge();
    let f: Vec<C64> = packet(&g, 12.0, 1.5, 5.0);
    let t = 0.7;
    let th = |s: f64| C64::new((PI * s).tanh(), 0.0);
    let shifted = |s: f64| C64::new((PI * (s + t)).tanh(), 0.0);
    let lhs = b.function_of_a(&f, shifted, shifted).unwrap();
    let a = dilation_conjugator(&g, &f, -t).unwrap();
    let a = b.function_of_a(&a, th, th).unwrap();
    let rhs = dilation_conjugator(&g, &a, t).unwrap();
    let e = rel(&rhs, &lhs) * g.norm_x(&lhs) / g.norm_x(&f);
    assert!(e <= 1e-5, "CCR error {e}");
}

/// Midpoint quadrature on a grid symmetric about 0, which realizes the
/// principal value of odd singular integrands.
fn transform_pair(s: f64, kernel: impl Fn(f64) -> f64) -> C64 {
    let du = 2e-3;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..40000 {
        let u = (i as f64 + 0.5) * du;
        let (kp, km) = (kernel(u), kernel(-u));
        acc += C64::from_polar(kp, -s * u) + C64::from_polar(km, s * u);
    }
    acc * du / (2.0 * PI).sqrt()
}

#[test]
fn hilbert_is_minus_r_of_a_on_fourier_pairs() {
    let log = LogGrid::new(4096, -20.0, 20.0).unwrap();
    for l in (0..log.m()).step_by(97) {
        let s = log.s(l);
        if s.abs() > 6.0 {
            continue;
        }
        let a = transform_pair(s, |u| 1.0 / (u / 2.0).sinh());
        let want = -I * (2.0 * PI).sqrt() * (PI * s).tanh();
        assert!((a - want).norm() < 1e-4, "s={s}: {a} vs {want}");
        let c = transform_pair(s, |u| 1.0 / (u / 2.0).cosh());
        let want = (2.0 * PI).sqrt() / (PI * s).cosh();
        assert!((c - want).norm() < 1e-4, "s={s}: {c} vs {want}");
    }
}

#[test]
fn tanh_of_a_matches_principal_value_kernel() {
    // (tanh(pi A) g)(e^u) e^{u/2} = (i / 2 pi) Pv \int h(v) / sinh((u - v)/2) dv,
    // h(v) = e^{v/2} g(e^v), separately on each half line
    let (g, b) = bridge();
    let (c, w, k0) = (2.5, 0.8, 1.0);
    let f = packet(&g, c, w, k0);
    let th = |s: f64| C64::new((PI * s).tanh(), 0.0);
    let out = b.function_of_a(&f, th, th).unwrap();
    let gfun = |x: f64| C64::from_polar((-(x - c).powi(2) / (2.0 * w * w)).exp(), k0 * x);
    let dv = 1e-3;
    for &j in &[1100usize, 1120, 1150, 1180, 1200, 1240, 1300, 900, 950, 1000] {
        let x = g.x(j);
        let sgn = x.signum();
        let u = x.abs().ln();
        let h = |v: f64| (v / 2.0).exp() * gfun(sgn * v.exp());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..60000 {
            let d = (i as f64 + 0.5) * dv;
            let kern = 1.0 / (d / 2.0).sinh();
            acc += (h(u - d) - h(u + d)) * kern;
        }
        let want = I / (2.0 * PI) * acc * dv / (u / 2.0).exp();
        assert!((out[j] - want).norm() < 1e-4, "x={x}: {} vs {want}", out[j]);
    }
}

#[test]
fn identity_multipliers() {
    let (g, b) = bridge();
    let f = packet(&g, -2.0, 1.0, 0.5);
    let one = |_: f64| C64::new(1.0, 0.0);
    assert!(rel(&function_of_h0(&g, &f, one).unwrap(), &f) < 1e-13);
    assert!(rel(&b.function_of_a(&f, one, one).unwrap(), &f) < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn r_is_unitary_on_packets(c in 10.0f64..16.0, w in 1.5f64..2.0, k0 in 4.0f64..7.0, flip in proptest::bool::ANY) {
        let (g, b) = bridge();
        let sgn = if flip { -1.0 } else { 1.0 };
        let f = packet(&g, sgn * c, w, -sgn * k0);
        let rf = b.apply_r(&f).unwrap();
        prop_assert!((g.norm_x(&rf) / g.norm_x(&f) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn symbols_unimodular(s in -50.0f64..50.0) {
        let (e, o) = r_pair(s);
        prop_assert!((e.norm() - 1.0).abs() < 1e-12);
        prop_assert!((e * o - 1.0).norm() < 1e-12);
    }
}
