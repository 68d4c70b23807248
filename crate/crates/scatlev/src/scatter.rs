//! Stationary scattering: Jost solutions, S-matrix, eigenfunctions, bound
//! states and zero-energy resonances.
//!
//! The radial ODE `psi'' = (V - E) psi` is integrated with the fourth-order
//! Magnus scheme on two Gauss points. Each step is the exact exponential of a
//! traceless real 2x2 matrix, so the transfer matrices have unit determinant
//! and the flux `|t|^2 + |r|^2 = 1` holds to round-off.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::LineGrid;
use crate::mat2::{self, M2};
use crate::potential::Potential;

/// Smallest momentum at which the stationary problem is solved directly.
pub const K_MIN: f64 = 1e-3;

const G1: f64 = 0.5 - 0.288_675_134_594_812_9;
const G2: f64 = 0.5 + 0.288_675_134_594_812_9;
const COMM: f64 = 0.144_337_567_297_406_43; // sqrt(3)/12

#[derive(Clone, Copy, Debug)]
struct Sub {
    h: f64,
    vbar: f64,
    c: f64,
}

/// Magnus propagator between consecutive nodes, with potential samples
/// cached at the Gauss points of every sub-step.
#[derive(Clone, Debug)]
pub struct Propagator {
    nodes: Vec<f64>,
    subs: Vec<Sub>,
    ends: Vec<usize>,
    refine: usize,
    max_h: f64,
}

impl Propagator {
    /// `refine` multiplies the automatic sub-step count.
    pub fn new(v: &Potential, nodes: Vec<f64>, refine: usize) -> Self {
        let feature = v.feature_scale();
        let mut bps: Vec<f64> = v.breakpoints();
        bps.sort_by(f64::total_cmp);
        let mut subs = Vec::new();
        let mut ends = vec![0];
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut cuts = vec![a];
            cuts.extend(bps.iter().copied().filter(|&p| p > a + 1e-14 && p < b - 1e-14));
            cuts.push(b);
            for c in cuts.windows(2) {
                let len = c[1] - c[0];
                let count = if v.is_zero() {
                    1
                } else {
                    ((8.0 * len / feature).ceil() as usize).clamp(1, 256)
                } * refine.max(1);
                let hs = len / count as f64;
                for s in 0..count {
                    let x0 = c[0] + s as f64 * hs;
                    let v1 = v.eval(x0 + G1 * hs);
                    let v2 = v.eval(x0 + G2 * hs);
                    subs.push(Sub { h: hs, vbar: 0.5 * (v1 + v2), c: COMM * hs * hs * (v1 - v2) });
                }
            }
            ends.push(subs.len());
        }
        let max_h = subs.iter().map(|s| s.h).fold(0.0, f64::max);
        Self { nodes, subs, ends, refine: refine.max(1), max_h }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Transfer matrix of one sub-step at energy `e`, forward or backward.
    #[inline]
    fn step(s: &Sub, e: f64, backward: bool) -> [[f64; 2]; 2] {
        let vb = s.vbar - e;
        let (c, h) = (s.c, s.h);
        let delta = c * c + h * h * vb;
        let (ch, sh) = if delta > 1e-8 {
            let mu = delta.sqrt();
            (mu.cosh(), mu.sinh() / mu)
        } else if delta < -1e-8 {
            let w = (-delta).sqrt();
            (w.cos(), w.sin() / w)
        } else {
            (1.0 + 0.5 * delta * (1.0 + delta / 12.0), 1.0 + delta / 6.0 * (1.0 + delta / 20.0))
        };
        let sg = if backward { -sh } else { sh };
        [[ch + sg * c, sg * h], [sg * h * vb, ch - sg * c]]
    }

    /// Propagates `(psi, psi')` from the first node to the last.
    pub fn sweep_right(&self, e: f64, y0: [C64; 2], mut store: Option<&mut Vec<C64>>) -> [C64; 2] {
        let mut y = y0;
        if let Some(s) = store.as_deref_mut() {
            s.clear();
            s.push(y[0]);
        }
        for i in 0..self.nodes.len() - 1 {
            for sub in &self.subs[self.ends[i]..self.ends[i + 1]] {
                let m = Self::step(sub, e, false);
                y = [y[0] * m[0][0] + y[1] * m[0][1], y[0] * m[1][0] + y[1] * m[1][1]];
            }
            if let Some(s) = store.as_deref_mut() {
                s.push(y[0]);
            }
        }
        y
    }

    /// Propagates `(psi, psi')` from the last node to the first; stored
    /// values are in node order.
    pub fn sweep_left(&self, e: f64, y_end: [C64; 2], mut store: Option<&mut Vec<C64>>) -> [C64; 2] {
        let nn = self.nodes.len();
        let mut y = y_end;
        if let Some(s) = store.as_deref_mut() {
            s.clear();
            s.resize(nn, C64::new(0.0, 0.0));
            s[nn - 1] = y[0];
        }
        for i in (0..nn - 1).rev() {
            for sub in self.subs[self.ends[i]..self.ends[i + 1]].iter().rev() {
                let m = Self::step(sub, e, true);
                y = [y[0] * m[0][0] + y[1] * m[0][1], y[0] * m[1][0] + y[1] * m[1][1]];
            }
            if let Some(s) = store.as_deref_mut() {
                s[i] = y[0];
            }
        }
        y
    }

    /// Real solution swept rightwards at energy `e`, counting sign changes.
    /// Returns the node count and the final `(u, u')`, rescaled to avoid
    /// overflow.
    fn count_sign_changes(&self, e: f64, y0: [f64; 2]) -> (usize, [f64; 2]) {
        let mut y = y0;
        let mut zeros = 0;
        let mut last = y[0];
        for i in 0..self.nodes.len() - 1 {
            for sub in &self.subs[self.ends[i]..self.ends[i + 1]] {
                let m = Self::step(sub, e, false);
                y = [y[0] * m[0][0] + y[1] * m[0][1], y[0] * m[1][0] + y[1] * m[1][1]];
                if y[0] != 0.0 {
                    if last != 0.0 && (y[0] > 0.0) != (last > 0.0) {
                        zeros += 1;
                    }
                    last = y[0];
                }
                let mag = y[0].abs() + y[1].abs();
                if mag > 1e150 {
                    y = [y[0] * 1e-150, y[1] * 1e-150];
                    last *= 1e-150;
                }
            }
        }
        (zeros, y)
    }
}

/// Transmission and reflection amplitudes at momentum `k > 0`.
///
/// `r_left` belongs to incidence from the left,
/// `psi(x, k) ~ e^{ikx} + r_left e^{-ikx}` as `x -> -inf`; `r_right` to
/// incidence from the right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringCoefficients {
    pub k: f64,
    pub t: C64,
    pub r_left: C64,
    pub r_right: C64,
}

impl ScatteringCoefficients {
    pub fn free(k: f64) -> Self {
        Self { k, t: mat2::ONE, r_left: mat2::ZERO, r_right: mat2::ZERO }
    }

    /// Channel order `(+k, -k)`; column = incoming channel.
    pub fn plane_wave(&self) -> M2 {
        [[self.t, self.r_right], [self.r_left, self.t]]
    }

    pub fn flux_defect(&self) -> f64 {
        let t2 = self.t.norm_sqr();
        (t2 + self.r_left.norm_sqr() - 1.0).abs().max((t2 + self.r_right.norm_sqr() - 1.0).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SMatrix {
    pub lambda: f64,
    pub plane_wave: M2,
    pub parity: M2,
}

impl SMatrix {
    pub fn from_coefficients(c: &ScatteringCoefficients) -> Self {
        let pw = c.plane_wave();
        Self { lambda: c.k * c.k, plane_wave: pw, parity: mat2::to_parity(&pw) }
    }

    pub fn from_parity(lambda: f64, parity: M2) -> Self {
        Self { lambda, plane_wave: mat2::from_parity(&parity), parity }
    }

    pub fn identity(lambda: f64) -> Self {
        Self { lambda, plane_wave: mat2::identity(), parity: mat2::identity() }
    }

    pub fn unitarity_defect(&self) -> f64 {
        mat2::unitarity_defect(&self.plane_wave).max(mat2::unitarity_defect(&self.parity))
    }
}

#[derive(Clone, Debug)]
pub struct JostSolution {
    pub k: f64,
    /// `e^{-ikx} f_+(x)` on the grid.
    pub m_plus: Vec<C64>,
    /// `e^{ikx} f_-(x)` on the grid.
    pub m_minus: Vec<C64>,
    /// `W[f_-, f_+] = f_- f_+' - f_-' f_+` at `x = 0`.
    pub wronskian: C64,
    pub coefficients: ScatteringCoefficients,
    /// Max change of `f_+` under halving of the step.
    pub residual: f64,
    /// Set when `V` has not decayed at the grid edge.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resonance {
    Generic,
    Exceptional,
    ExceptionalFree,
    Borderline,
}

impl Resonance {
    pub fn label(self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::Exceptional => "exceptional",
            Self::ExceptionalFree => "exceptional (free)",
            Self::Borderline => "borderline",
        }
    }

    pub fn is_exceptional(self) -> bool {
        matches!(self, Self::Exceptional | Self::ExceptionalFree)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceInfo {
    pub class: Resonance,
    pub w0: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub n_bound: usize,
    pub eigenvalues: Vec<f64>,
    pub even_count: Option<usize>,
    pub resonance: ResonanceInfo,
}

/// Scattering solver for one potential on one grid.
#[derive(Clone, Debug)]
pub struct Scatterer {
    grid: LineGrid,
    potential: Potential,
    prop: Propagator,
    /// Finer sub-steps for `|k| < K_FINE`, where errors are amplified by `1/k`.
    prop_low: Propagator,
    /// Tier `j` has `2^(j+1)` times the base sub-steps and serves momenta
    /// with `|k| h_sub > 1`, away from the Bragg peaks of the sub-step lattice.
    tiers: Vec<OnceLock<Propagator>>,
    k_min: f64,
}

const K_FINE: f64 = 0.1;
const TIERS: usize = 8;

impl Scatterer {
    pub fn new(potential: &Potential, grid: &LineGrid) -> Self {
        let nodes: Vec<f64> = (0..=grid.n()).map(|j| grid.x(j)).collect();
        Self {
            grid: grid.clone(),
            potential: potential.clone(),
            prop: Propagator::new(potential, nodes.clone(), 1),
            prop_low: Propagator::new(potential, nodes, 4),
            tiers: (0..TIERS).map(|_| OnceLock::new()).collect(),
            k_min: K_MIN,
        }
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }
    pub fn potential(&self) -> &Potential {
        &self.potential
    }
    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    fn check_k(&self, k: f64) -> Result<()> {
        if k.abs() < self.k_min || !k.is_finite() {
            Err(Error::Cutoff { k, k_min: self.k_min })
        } else {
            Ok(())
        }
    }

    fn prop_for(&self, k: f64) -> &Propagator {
        let need = (k.abs() * self.prop.max_h).ceil() as usize;
        if need > 1 && !self.potential.is_zero() {
            let j = (need.next_power_of_two().trailing_zeros() as usize).min(TIERS);
            self.tiers[j - 1].get_or_init(|| Propagator::new(&self.potential, self.prop.nodes.clone(), 1 << j))
        } else if k.abs() < K_FINE {
            &self.prop_low
        } else {
            &self.prop
        }
    }

    fn edges(&self) -> (f64, f64) {
        (self.grid.x(0), self.grid.x(self.grid.n()))
    }

    /// `f_+` swept from the right edge; returns the left-edge state.
    fn f_plus(&self, k: f64, store: Option<&mut Vec<C64>>) -> [C64; 2] {
        let (_, xr) = self.edges();
        let e = C64::from_polar(1.0, k * xr);
        self.prop_for(k).sweep_left(k * k, [e, C64::new(0.0, k) * e], store)
    }

    fn f_minus(&self, k: f64, store: Option<&mut Vec<C64>>) -> [C64; 2] {
        let (xl, _) = self.edges();
        let e = C64::from_polar(1.0, -k * xl);
        self.prop_for(k).sweep_right(k * k, [e, C64::new(0.0, -k) * e], store)
    }

    /// `(1/t, r_left/t)` from the left-edge state of `f_+`.
    fn decompose_left(&self, k: f64, y: [C64; 2]) -> (C64, C64) {
        let (xl, _) = self.edges();
        let d = y[1] / C64::new(0.0, k);
        let a = 0.5 * (y[0] + d) * C64::from_polar(1.0, -k * xl);
        let b = 0.5 * (y[0] - d) * C64::from_polar(1.0, k * xl);
        (a, b)
    }

    /// `(1/t, r_right/t)` from the right-edge state of `f_-`.
    fn decompose_right(&self, k: f64, y: [C64; 2]) -> (C64, C64) {
        let (_, xr) = self.edges();
        let d = y[1] / C64::new(0.0, k);
        let a = 0.5 * (y[0] - d) * C64::from_polar(1.0, k * xr);
        let b = 0.5 * (y[0] + d) * C64::from_polar(1.0, -k * xr);
        (a, b)
    }

    pub fn coefficients(&self, k: f64) -> Result<ScatteringCoefficients> {
        self.check_k(k)?;
        let k = k.abs();
        if self.potential.is_zero() {
            return Ok(ScatteringCoefficients::free(k));
        }
        let (a, b) = self.decompose_left(k, self.f_plus(k, None));
        let (a2, b2) = self.decompose_right(k, self.f_minus(k, None));
        let t = 0.5 * (1.0 / a + 1.0 / a2);
        Ok(ScatteringCoefficients { k, t, r_left: b / a, r_right: b2 / a2 })
    }

    pub fn s_matrix(&self, lambda: f64) -> Result<SMatrix> {
        if !(lambda >= self.k_min * self.k_min) {
            return Err(Error::Cutoff { k: lambda.max(0.0).sqrt(), k_min: self.k_min });
        }
        Ok(SMatrix::from_coefficients(&self.coefficients(lambda.sqrt())?))
    }

    pub fn s_sweep(&self, lambdas: &[f64]) -> Result<Vec<SMatrix>> {
        lambdas.par_iter().map(|&l| self.s_matrix(l)).collect()
    }

    pub fn jost_solve(&self, k: f64) -> Result<JostSolution> {
        self.check_k(k)?;
        if k < 0.0 {
            return Err(Error::Contract(format!("jost_solve needs k > 0, got {k}")));
        }
        let n = self.grid.n();
        let mut fp = Vec::new();
        let mut fm = Vec::new();
        let yl = self.f_plus(k, Some(&mut fp));
        let yr = self.f_minus(k, Some(&mut fm));
        let (a, b) = self.decompose_left(k, yl);
        let (a2, b2) = self.decompose_right(k, yr);

        let w = self.wronskian_at_origin(k, &fp, &fm);

        let base = self.prop_for(k);
        let fine = Propagator::new(&self.potential, base.nodes.clone(), 2 * base.refine);
        let (_, xr) = self.edges();
        let e = C64::from_polar(1.0, k * xr);
        let mut fp2 = Vec::new();
        fine.sweep_left(k * k, [e, C64::new(0.0, k) * e], Some(&mut fp2));
        let scale = fp.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let residual =
            fp.iter().zip(&fp2).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) / scale;

        let m_plus = (0..n).map(|j| fp[j] * C64::from_polar(1.0, -k * self.grid.x(j))).collect();
        let m_minus = (0..n).map(|j| fm[j] * C64::from_polar(1.0, k * self.grid.x(j))).collect();
        let vmax = (0..n).map(|j| self.potential.eval(self.grid.x(j)).abs()).fold(0.0, f64::max);
        let edge = self.potential.eval(self.grid.x(0)).abs().max(self.potential.eval(xr).abs());
        Ok(JostSolution {
            k,
            m_plus,
            m_minus,
            wronskian: w,
            coefficients: ScatteringCoefficients {
                k,
                t: 0.5 * (1.0 / a + 1.0 / a2),
                r_left: b / a,
                r_right: b2 / a2,
            },
            residual,
            truncated: edge > 1e-10 * vmax.max(1e-300),
        })
    }

    fn wronskian_at_origin(&self, k: f64, fp: &[C64], fm: &[C64]) -> C64 {
        let o = self.grid.origin();
        let nodes = vec![self.grid.x(o), self.grid.x(o + 1)];
        let p = Propagator::new(&self.potential, nodes, 1);
        // f_+' at the origin: sweep a unit basis and solve for the derivative
        let y1 = p.sweep_right(k * k, [mat2::ONE, mat2::ZERO], None);
        let y2 = p.sweep_right(k * k, [mat2::ZERO, mat2::ONE], None);
        let deriv = |f0: C64, f1: C64| (f1 - y1[0] * f0) / y2[0];
        let dp = deriv(fp[o], fp[o + 1]);
        let dm = deriv(fm[o], fm[o + 1]);
        fm[o] * dp - dm * fp[o]
    }

    /// Generalized eigenfunction `psi(., k)` on the grid, `k` signed.
    pub fn eigenfunction(&self, k: f64) -> Result<Vec<C64>> {
        Ok(self.eigenfunction_with_coefficients(k)?.0)
    }

    pub fn eigenfunction_with_coefficients(
        &self,
        k: f64,
    ) -> Result<(Vec<C64>, ScatteringCoefficients)> {
        self.check_k(k)?;
        let n = self.grid.n();
        let kk = k.abs();
        if self.potential.is_zero() {
            let f = (0..n).map(|j| C64::from_polar(1.0, k * self.grid.x(j))).collect();
            return Ok((f, ScatteringCoefficients::free(kk)));
        }
        let mut f = Vec::with_capacity(n + 1);
        let (t, rl, rr);
        if k > 0.0 {
            let (a, b) = self.decompose_left(kk, self.f_plus(kk, Some(&mut f)));
            t = 1.0 / a;
            rl = b / a;
            let (a2, b2) = self.decompose_right(kk, self.f_minus(kk, None));
            rr = b2 / a2;
        } else {
            let (a2, b2) = self.decompose_right(kk, self.f_minus(kk, Some(&mut f)));
            t = 1.0 / a2;
            rr = b2 / a2;
            let (a, b) = self.decompose_left(kk, self.f_plus(kk, None));
            rl = b / a;
        }
        f.truncate(n);
        for z in f.iter_mut() {
            *z *= t;
        }
        Ok((f, ScatteringCoefficients { k: kk, t, r_left: rl, r_right: rr }))
    }

    /// `psi(., k)` on sorted `nodes` whose span encloses the support of `V`.
    pub fn eigenfunction_on(&self, k: f64, nodes: Vec<f64>) -> Result<Vec<C64>> {
        self.check_k(k)?;
        let t = self.coefficients(k)?.t;
        let kk = k.abs();
        let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
        let prop = Propagator::new(&self.potential, nodes, 1);
        let mut out = Vec::new();
        if k > 0.0 {
            let e = t * C64::from_polar(1.0, kk * b);
            prop.sweep_left(kk * kk, [e, C64::new(0.0, kk) * e], Some(&mut out));
        } else {
            let e = t * C64::from_polar(1.0, -kk * a);
            prop.sweep_right(kk * kk, [e, C64::new(0.0, -kk) * e], Some(&mut out));
        }
        Ok(out)
    }

    /// Zero-energy Wronskian `W[f_-(.,0), f_+(.,0)]` with `f_+ -> 1` at the
    /// right edge and `f_- -> 1` at the left edge.
    pub fn zero_energy_wronskian(&self) -> f64 {
        let one = [mat2::ONE, mat2::ZERO];
        let mut fp = Vec::new();
        let mut fm = Vec::new();
        self.prop.sweep_left(0.0, one, Some(&mut fp));
        self.prop.sweep_right(0.0, one, Some(&mut fm));
        self.wronskian_at_origin(0.0, &fp, &fm).norm()
    }

    /// Number of eigenvalues below `e < 0`, or of zeros of the zero-energy
    /// solution when `e = 0`, including a zero beyond the right edge.
    pub fn count_below(&self, e: f64) -> usize {
        let kappa = (-e).max(0.0).sqrt();
        let (zeros, y) = self.prop.count_sign_changes(e, [1.0, kappa]);
        let extra = if e < 0.0 {
            (y[1] + kappa * y[0]) * y[0] < 0.0
        } else {
            // a crossing further out than 1/k_min is a threshold resonance
            y[0] * y[1] < 0.0 && -y[0] / y[1] < 10.0 / self.k_min
        };
        zeros + extra as usize
    }

    pub fn bound_states(&self) -> Result<SpectralSummary> {
        let w1 = 2.0 / self.coefficients(1.0)?.t.norm();
        let tau = 1e-4 * w1;
        if self.potential.is_zero() {
            return Ok(SpectralSummary {
                n_bound: 0,
                eigenvalues: Vec::new(),
                even_count: Some(0),
                resonance: ResonanceInfo { class: Resonance::ExceptionalFree, w0: 0.0, tau },
            });
        }
        let w0 = self.zero_energy_wronskian();
        let class = if w0 >= tau / 10.0 && w0 <= 10.0 * tau {
            Resonance::Borderline
        } else if w0 < tau {
            Resonance::Exceptional
        } else {
            Resonance::Generic
        };
        let n_nodes = self.count_below(0.0);
        let vmin = self.prop.subs.iter().map(|s| s.vbar).fold(0.0, f64::min) - 1.0;
        let mut eigenvalues = Vec::with_capacity(n_nodes);
        for j in 0..n_nodes {
            let (mut lo, mut hi) = (vmin, 0.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if self.count_below(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            eigenvalues.push(0.5 * (lo + hi));
        }
        let top = eigenvalues.last().copied().unwrap_or(vmin);
        let n_bisect = self.count_below(-self.k_min * self.k_min).max(self.count_below(0.5 * top));
        if n_bisect != n_nodes || eigenvalues.iter().any(|&e| !(e < 0.0)) {
            return Err(Error::Physics(format!(
                "node count {n_nodes} disagrees with eigenvalue bisection {n_bisect}"
            )));
        }
        let even_count = self
            .potential
            .is_symmetric()
            .then(|| eigenvalues.iter().filter(|&&e| self.is_even_state(e)).count());
        Ok(SpectralSummary {
            n_bound: n_nodes,
            eigenvalues,
            even_count,
            resonance: ResonanceInfo { class, w0, tau },
        })
    }

    /// Parity of the bound state at energy `e` for a symmetric potential:
    /// even states have `u'(0) = 0`.
    fn is_even_state(&self, e: f64) -> bool {
        let kappa = (-e).sqrt();
        let mut u = Vec::new();
        self.prop.sweep_right(e, [mat2::ONE, C64::new(kappa, 0.0)], Some(&mut u));
        let o = self.grid.origin();
        let (a, b) = (u[o - 1].re, u[o + 1].re);
        // even states have equal values at symmetric points
        (a - b).abs() < (a + b).abs()
    }

    /// `S(0)` in plane-wave channels by order-2 Richardson extrapolation
    /// from `k in {2, 4, 8} k_min`.
    pub fn s_zero(&self) -> Result<M2> {
        let s: Vec<M2> = [2.0, 4.0, 8.0]
            .iter()
            .map(|f| self.coefficients(f * self.k_min).map(|c| c.plane_wave()))
            .collect::<Result<_>>()?;
        Ok(richardson(&s[0], &s[1], &s[2]))
    }
}

/// Limit at 0 from samples at `k, 2k, 4k` assuming `S0 + a k + b k^2`.
pub fn richardson(s1: &M2, s2: &M2, s3: &M2) -> M2 {
    let mut out = [[mat2::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (8.0 * s1[i][j] - 6.0 * s2[i][j] + s3[i][j]) / 3.0;
        }
    }
    out
}

/// Geometric energy grid from `k_min^2` to `lambda_max`.
pub fn energy_grid(k_min: f64, lambda_max: f64, count: usize) -> Vec<f64> {
    let (a, b) = ((k_min * k_min).ln(), lambda_max.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}
