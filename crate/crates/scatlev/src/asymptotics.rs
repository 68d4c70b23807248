//! Restricted-norm decay of `Omega - X` under spectral cuts in `H0` and `A`,
//! the log-time evolution and the dilation-rescaled family.
//!
//! Norms are largest singular values on a band-limited, spatially
//! concentrated test subspace. Every curve is reported for the operator and
//! for its adjoint.

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::grid::{Direction, LineGrid};
use crate::mat2::{self, M2};
use crate::potential::{Potential, PotentialKind};
use crate::scatter::Scatterer;
use crate::universal::{apply_t_fourier, apply_t_fourier_adjoint, r_pair, Cut, MellinBridge};
use crate::waveop::{build_wave_operator, linalg, Side, WaveOperatorMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `chi(H0 >= eps)(Omega - 1)`
    HighEnergy,
    /// `chi(H0 <= eps)(Omega - Gamma_1(A))`
    LowEnergy,
    /// `chi(A <= t)(Omega - 1)`
    PastCut,
    /// `chi(A >= t)(Omega - S(H0))`
    FutureCut,
    /// `chi(A <= 0)(e^{i ln(H0) t} e^{-i ln(H) t} Omega - 1)`
    LogTimePast,
    /// `chi(A >= 0)(e^{i ln(H0) t} e^{-i ln(H) t} Omega - S(H0))`
    LogTimeFuture,
    /// `chi(H0 <= 1)(Omega(H(t), H0) - Gamma_1(A))`
    RescaledLow,
    /// `chi(H0 >= 1)(Omega(H(t), H0) - 1)`
    RescaledHigh,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::HighEnergy,
        Quantity::LowEnergy,
        Quantity::PastCut,
        Quantity::FutureCut,
        Quantity::LogTimePast,
        Quantity::LogTimeFuture,
        Quantity::RescaledLow,
        Quantity::RescaledHigh,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Quantity::HighEnergy => "high-energy",
            Quantity::LowEnergy => "low-energy",
            Quantity::PastCut => "past-cut",
            Quantity::FutureCut => "future-cut",
            Quantity::LogTimePast => "log-time-past",
            Quantity::LogTimeFuture => "log-time-future",
            Quantity::RescaledLow => "rescaled-low",
            Quantity::RescaledHigh => "rescaled-high",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Quantity::HighEnergy => "chi(H0>=eps)(Omega-1)",
            Quantity::LowEnergy => "chi(H0<=eps)(Omega-Gamma1(A))",
            Quantity::PastCut => "chi(A<=t)(Omega-1)",
            Quantity::FutureCut => "chi(A>=t)(Omega-S)",
            Quantity::LogTimePast => "chi(A<=0)(e^{i ln H0 t} e^{-i ln H t} Omega-1)",
            Quantity::LogTimeFuture => "chi(A>=0)(e^{i ln H0 t} e^{-i ln H t} Omega-S)",
            Quantity::RescaledLow => "chi(H0<=1)(Omega(H(t),H0)-Gamma1(A))",
            Quantity::RescaledHigh => "chi(H0>=1)(Omega(H(t),H0)-1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCurve {
    pub quantity: Quantity,
    pub parameter: Vec<f64>,
    /// Norms for the operator itself.
    pub norm: Vec<f64>,
    /// Norms for the adjoint of the difference.
    pub norm_adjoint: Vec<f64>,
    pub n: usize,
    pub x_max: f64,
    pub subspace_dim: usize,
}

impl DecayCurve {
    fn decreasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1] < w[0])
    }

    /// Both variants strictly decrease along the parameter list.
    pub fn strictly_decreasing(&self) -> bool {
        Self::decreasing(&self.norm) && Self::decreasing(&self.norm_adjoint)
    }

    /// Larger of the two final values.
    pub fn final_value(&self) -> f64 {
        let a = self.norm.last().copied().unwrap_or(0.0);
        let b = self.norm_adjoint.last().copied().unwrap_or(0.0);
        a.max(b)
    }

    /// Ratio of the larger to the smaller final value.
    pub fn adjoint_ratio(&self) -> f64 {
        let a = self.norm.last().copied().unwrap_or(0.0);
        let b = self.norm_adjoint.last().copied().unwrap_or(0.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi == 0.0 {
            1.0
        } else {
            hi / lo
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.norm.iter().chain(&self.norm_adjoint).copied().fold(0.0, f64::max)
    }
}

/// Slepian-type test subspace: band `k_low <= |k| <= k_band`, at least
/// `concentration` of the mass in `|x| <= x_extent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub x_extent: f64,
    #[serde(default)]
    pub k_low: f64,
    pub k_band: f64,
    pub concentration: f64,
}

#[derive(Clone, Debug)]
pub struct TestSubspace {
    /// Orthonormal columns (plain Euclidean norm on the samples).
    pub basis: Mat<C64>,
    pub concentrations: Vec<f64>,
}

impl TestSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|j| (0..self.basis.nrows()).map(|i| self.basis[(i, j)]).collect()).collect()
    }
}

fn band_limit(grid: &LineGrid, f: &[C64], k_low: f64, k_band: f64) -> Result<Vec<C64>> {
    let mut fh = grid.fourier(f, Direction::Forward)?;
    for (m, z) in fh.iter_mut().enumerate() {
        let k = grid.k(m).abs();
        if k > k_band || k < k_low {
            *z = C64::new(0.0, 0.0);
        }
    }
    grid.fourier(&fh, Direction::Inverse)
}

pub fn test_subspace(grid: &LineGrid, spec: &SubspaceSpec) -> Result<TestSubspace> {
    contract(spec.x_extent > 0.0 && spec.x_extent < grid.x_max(), || {
        format!("x_extent {} must lie in (0, x_max = {})", spec.x_extent, grid.x_max())
    })?;
    contract(spec.k_band > 0.0 && spec.k_band <= grid.k_max(), || {
        format!("k_band {} must lie in (0, k_max = {})", spec.k_band, grid.k_max())
    })?;
    contract(spec.k_low >= 0.0 && spec.k_low < spec.k_band, || {
        format!("k_low {} must lie in [0, k_band)", spec.k_low)
    })?;
    contract(spec.concentration > 0.0 && spec.concentration < 1.0, || "concentration must lie in (0, 1)".into())?;
    let idx: Vec<usize> = (0..grid.n()).filter(|&j| grid.x(j).abs() <= spec.x_extent).collect();
    let p = idx.len();
    let band: Vec<f64> = grid.momenta().into_iter().filter(|k| k.abs() <= spec.k_band && k.abs() >= spec.k_low).collect();
    let inv_n = 1.0 / grid.n() as f64;
    let h = grid.h();
    let kernel: Vec<C64> = (0..2 * p - 1)
        .map(|d| {
            let dx = (d as f64 - (p - 1) as f64) * h;
            band.iter().map(|&k| C64::from_polar(inv_n, k * dx)).sum()
        })
        .collect();
    let m = Mat::from_fn(p, p, |i, j| kernel[i + p - 1 - j]);
    let eig = m.self_adjoint_eigen(faer::Side::Lower).map_err(linalg)?;
    let vals = eig.S().column_vector();
    let u = eig.U();
    let keep: Vec<usize> = (0..p).filter(|&i| vals[i].re >= spec.concentration).collect();
    contract(!keep.is_empty(), || "test subspace is empty; enlarge x_extent or k_band".into())?;
    let cols: Vec<Vec<C64>> = keep
        .par_iter()
        .map(|&c| {
            let mut f = vec![C64::new(0.0, 0.0); grid.n()];
            for (r, &j) in idx.iter().enumerate() {
                f[j] = u[(r, c)];
            }
            let mut g = band_limit(grid, &f, spec.k_low, spec.k_band)?;
            let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            g.iter_mut().for_each(|z| *z /= norm);
            Ok(g)
        })
        .collect::<Result<_>>()?;
    Ok(TestSubspace {
        basis: Mat::from_fn(grid.n(), cols.len(), |i, j| cols[j][i]),
        concentrations: keep.iter().map(|&c| vals[c].re).collect(),
    })
}

/// Acts with a plane-wave channel matrix on each pair `(k, -k)`, `k > 0`.
fn apply_channels(grid: &LineGrid, f: &[C64], mat: impl Fn(usize) -> M2, adjoint: bool) -> Result<Vec<C64>> {
    let mut fh = grid.fourier(f, Direction::Forward)?;
    for m in grid.origin()..grid.n() {
        let mb = grid.mirror_k(m);
        let s = if adjoint { mat2::adjoint(&mat(m)) } else { mat(m) };
        let (a, b) = (fh[m], fh[mb]);
        fh[m] = s[0][0] * a + s[0][1] * b;
        fh[mb] = s[1][0] * a + s[1][1] * b;
    }
    grid.fourier(&fh, Direction::Inverse)
}

fn cut_h0(grid: &LineGrid, f: &[C64], cut: Cut) -> Result<Vec<C64>> {
    let mut fh = grid.fourier(f, Direction::Forward)?;
    for (m, z) in fh.iter_mut().enumerate() {
        *z *= cut.indicator(grid.k(m).powi(2));
    }
    grid.fourier(&fh, Direction::Inverse)
}

/// `|k|^{2 i t}`, that is `e^{i ln(H0) t}`.
fn log_h0_evolution(grid: &LineGrid, f: &[C64], t: f64) -> Result<Vec<C64>> {
    let mut fh = grid.fourier(f, Direction::Forward)?;
    for (m, z) in fh.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, 2.0 * t * grid.k(m).abs().ln());
    }
    grid.fourier(&fh, Direction::Inverse)
}

fn to_mat(n: usize, cols: &[Vec<C64>]) -> Mat<C64> {
    Mat::from_fn(n, cols.len(), |i, j| cols[j][i])
}

fn columns_of(m: &Mat<C64>) -> Vec<Vec<C64>> {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)]).collect()).collect()
}

fn top_singular(cols: &[Vec<C64>]) -> Result<f64> {
    if cols.is_empty() {
        return Ok(0.0);
    }
    let m = to_mat(cols[0].len(), cols);
    if m.norm_l2() == 0.0 {
        return Ok(0.0);
    }
    let s = m.singular_values().map_err(linalg)?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Operators that share one grid, potential and test subspace.
pub struct Workbench {
    grid: LineGrid,
    potential: Potential,
    omega: Arc<WaveOperatorMatrix>,
    channel: Arc<Vec<M2>>,
    s0: M2,
    subspace: TestSubspace,
    bridge: MellinBridge,
    q: Vec<Vec<C64>>,
    omega_q: Mat<C64>,
    omega_adj_q: Mat<C64>,
    isometry_defect: f64,
}

impl Workbench {
    pub fn new(v: &Potential, grid: &LineGrid, spec: &SubspaceSpec) -> Result<Self> {
        let s = Scatterer::new(v, grid);
        let omega = Arc::new(build_wave_operator(v, grid, Side::Minus)?);
        let mut channel = vec![mat2::identity(); grid.n()];
        let pos: Vec<(usize, M2)> = (grid.origin()..grid.n())
            .into_par_iter()
            .map(|m| Ok((m, s.coefficients(grid.k(m))?.plane_wave())))
            .collect::<Result<_>>()?;
        for (m, c) in pos {
            channel[m] = c;
        }
        let s0 = if v.is_zero() { mat2::identity() } else { s.s_zero()? };
        Self::assemble(v, grid, spec, omega, Arc::new(channel), s0)
    }

    /// Same operators on another test subspace.
    pub fn with_subspace(&self, spec: &SubspaceSpec) -> Result<Self> {
        Self::assemble(&self.potential, &self.grid, spec, self.omega.clone(), self.channel.clone(), self.s0)
    }

    fn assemble(
        v: &Potential,
        grid: &LineGrid,
        spec: &SubspaceSpec,
        omega: Arc<WaveOperatorMatrix>,
        channel: Arc<Vec<M2>>,
        s0: M2,
    ) -> Result<Self> {
        let subspace = test_subspace(grid, spec)?;
        let q = subspace.columns();
        let omega_q = &omega.omega.entries * &subspace.basis;
        let omega_adj_q = omega.omega.entries.adjoint() * &subspace.basis;
        let back = omega.omega.entries.adjoint() * &omega_q;
        let isometry_defect = (&back - &subspace.basis).norm_l2() / (subspace.dim() as f64).sqrt();
        Ok(Self {
            grid: grid.clone(),
            potential: v.clone(),
            bridge: MellinBridge::with_default_log(grid)?,
            omega,
            channel,
            s0,
            subspace,
            q,
            omega_q,
            omega_adj_q,
            isometry_defect,
        })
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn subspace(&self) -> &TestSubspace {
        &self.subspace
    }

    /// `S(0)` in plane-wave channels.
    pub fn s_zero(&self) -> M2 {
        self.s0
    }

    /// RMS of `(Omega* Omega - 1) q` over the test basis.
    pub fn isometry_defect(&self) -> f64 {
        self.isometry_defect
    }

    fn apply_s(&self, f: &[C64], adjoint: bool) -> Result<Vec<C64>> {
        apply_channels(&self.grid, f, |m| self.channel[m], adjoint)
    }

    /// `Gamma_1(A) = 1 + T (S(0) - 1)`.
    fn apply_gamma1(&self, f: &[C64], adjoint: bool) -> Result<Vec<C64>> {
        let s0m1 = mat2::sub(&self.s0, &mat2::identity());
        let extra = if adjoint {
            let tf = apply_t_fourier_adjoint(&self.grid, f)?;
            apply_channels(&self.grid, &tf, |_| s0m1, true)?
        } else {
            let g = apply_channels(&self.grid, f, |_| s0m1, false)?;
            apply_t_fourier(&self.grid, &g)?
        };
        Ok(f.iter().zip(&extra).map(|(a, b)| a + b).collect())
    }

    /// Columns of `(Omega - X) q` or `(Omega - X)* q`.
    fn differences(&self, adjoint: bool, subtract: impl Fn(&[C64]) -> Result<Vec<C64>> + Sync) -> Result<Vec<Vec<C64>>> {
        let oq = if adjoint { &self.omega_adj_q } else { &self.omega_q };
        let oq = columns_of(oq);
        oq.par_iter()
            .zip(&self.q)
            .map(|(o, q)| {
                let x = subtract(q)?;
                Ok(o.iter().zip(&x).map(|(a, b)| a - b).collect())
            })
            .collect()
    }

    fn h0_cut_norm(&self, cols: &[Vec<C64>], cut: Cut) -> Result<f64> {
        let p: Vec<Vec<C64>> = cols.par_iter().map(|c| cut_h0(&self.grid, c, cut)).collect::<Result<_>>()?;
        top_singular(&p)
    }

    fn a_cut_norm(&self, cols: &[Vec<C64>], cut: Cut) -> Result<f64> {
        let p: Vec<Vec<C64>> = cols.par_iter().map(|c| self.bridge.indicator_a(c, cut)).collect::<Result<_>>()?;
        top_singular(&p)
    }

    fn check_energy(&self, eps: f64) -> Result<()> {
        let (lo, hi) = (2.0 * self.grid.dk(), 0.8 * self.grid.k_max());
        if !(eps.sqrt() >= lo && eps.sqrt() <= hi) {
            return Err(Error::Range(format!(
                "energy cut {eps} outside the resolvable window [{}, {}]",
                lo * lo,
                hi * hi
            )));
        }
        Ok(())
    }

    fn check_dilation(&self, t: f64) -> Result<()> {
        let lim = (0.5 * self.bridge.log().s_max()).min(0.1 * self.grid.x_max() * self.grid.k_max());
        if t.abs() > lim {
            return Err(Error::Range(format!("dilation cut {t} outside the resolvable window [-{lim}, {lim}]")));
        }
        Ok(())
    }

    fn curve(&self, quantity: Quantity, parameter: &[f64], norm: Vec<f64>, norm_adjoint: Vec<f64>) -> DecayCurve {
        DecayCurve {
            quantity,
            parameter: parameter.to_vec(),
            norm,
            norm_adjoint,
            n: self.grid.n(),
            x_max: self.grid.x_max(),
            subspace_dim: self.subspace.dim(),
        }
    }

    /// One of the four cut limits of `Omega`.
    pub fn corollary_limits(&self, quantity: Quantity, parameters: &[f64]) -> Result<DecayCurve> {
        let mut out = [Vec::new(), Vec::new()];
        for (slot, adjoint) in [false, true].into_iter().enumerate() {
            let cols = match quantity {
                Quantity::HighEnergy | Quantity::PastCut => self.differences(adjoint, |q| Ok(q.to_vec()))?,
                Quantity::LowEnergy => self.differences(adjoint, |q| self.apply_gamma1(q, adjoint))?,
                Quantity::FutureCut => self.differences(adjoint, |q| self.apply_s(q, adjoint))?,
                _ => {
                    return Err(Error::Contract(format!("{} is not one of the four cut limits", quantity.tag())));
                }
            };
            for &p in parameters {
                let v = match quantity {
                    Quantity::HighEnergy => {
                        self.check_energy(p)?;
                        self.h0_cut_norm(&cols, Cut::AtLeast(p))?
                    }
                    Quantity::LowEnergy => {
                        self.check_energy(p)?;
                        self.h0_cut_norm(&cols, Cut::AtMost(p))?
                    }
                    Quantity::PastCut => {
                        self.check_dilation(p)?;
                        self.a_cut_norm(&cols, Cut::AtMost(p))?
                    }
                    _ => {
                        self.check_dilation(p)?;
                        self.a_cut_norm(&cols, Cut::AtLeast(p))?
                    }
                };
                out[slot].push(v);
            }
        }
        let [a, b] = out;
        Ok(self.curve(quantity, parameters, a, b))
    }

    /// Singular values of `chi(A <= t)(Omega - 1)` on the test subspace.
    pub fn past_cut_singular_values(&self, t: f64) -> Result<Vec<f64>> {
        self.check_dilation(t)?;
        let cols = self.differences(false, |q| Ok(q.to_vec()))?;
        let p: Vec<Vec<C64>> =
            cols.par_iter().map(|c| self.bridge.indicator_a(c, Cut::AtMost(t))).collect::<Result<_>>()?;
        let m = to_mat(self.grid.n(), &p);
        m.singular_values().map_err(linalg)
    }

    /// `e^{i ln(H0) t} e^{-i ln(H) t} Omega` through the eigenfunction
    /// transform: `e^{-i ln(H) t} = Omega e^{-i ln(H0) t} Omega*` on the
    /// absolutely continuous subspace.
    fn log_time_columns(&self, t: f64, adjoint: bool, future: bool) -> Result<Vec<Vec<C64>>> {
        let g = &self.grid;
        let om = &self.omega.omega.entries;
        let apply_mat = |m: &Mat<C64>, cols: &[Vec<C64>], adj: bool| -> Vec<Vec<C64>> {
            let x = to_mat(g.n(), cols);
            let y = if adj { m.adjoint() * &x } else { m * &x };
            columns_of(&y)
        };
        let evolve = |cols: &[Vec<C64>], s: f64| -> Result<Vec<Vec<C64>>> {
            cols.par_iter().map(|c| log_h0_evolution(g, c, s)).collect()
        };
        let w = if adjoint {
            // (Omega* Omega) e^{i ln(H0) t} Omega* e^{-i ln(H0) t}
            let a = evolve(&self.q, -t)?;
            let b = apply_mat(om, &a, true);
            let c = evolve(&b, t)?;
            let d = apply_mat(om, &c, false);
            apply_mat(om, &d, true)
        } else {
            let a = columns_of(&(om.adjoint() * &self.omega_q));
            let b = evolve(&a, -t)?;
            let c = apply_mat(om, &b, false);
            evolve(&c, t)?
        };
        w.par_iter()
            .zip(&self.q)
            .map(|(wc, q)| {
                let x = if future { self.apply_s(q, adjoint)? } else { q.clone() };
                Ok(wc.iter().zip(&x).map(|(a, b)| a - b).collect())
            })
            .collect()
    }

    pub fn log_time_propagation(&self, t_values: &[f64], future: bool) -> Result<DecayCurve> {
        if self.isometry_defect > 1e-2 {
            return Err(Error::Infrastructure(format!(
                "eigenfunction transform is not unitary on the test subspace (defect {:.3e})",
                self.isometry_defect
            )));
        }
        let cut = if future { Cut::AtLeast(0.0) } else { Cut::AtMost(0.0) };
        let mut out = [Vec::new(), Vec::new()];
        for (slot, adjoint) in [false, true].into_iter().enumerate() {
            for &t in t_values {
                self.check_dilation(2.0 * t)?;
                let cols = self.log_time_columns(t, adjoint, future)?;
                out[slot].push(self.a_cut_norm(&cols, cut)?);
            }
        }
        let [a, b] = out;
        let q = if future { Quantity::LogTimeFuture } else { Quantity::LogTimePast };
        Ok(self.curve(q, t_values, a, b))
    }

    /// Admissible window of the rescaling parameter.
    pub fn rescaling_window(&self) -> (f64, f64) {
        let v = &self.potential;
        let width = if v.kind() == PotentialKind::CustomSamples { v.extent() } else { v.feature_scale() };
        let feature = v.feature_scale();
        // e^{-t} width <= x_max / 4 and e^{-t} feature >= 4 h
        let lo = (width / (0.25 * self.grid.x_max())).ln();
        let hi = (feature / (4.0 * self.grid.h())).ln();
        (lo, hi)
    }

    /// Both curves of the rescaled family, with `Gamma_1` from the original
    /// potential.
    pub fn rescaled_family(&self, t_values: &[f64], low: bool) -> Result<DecayCurve> {
        let (lo, hi) = self.rescaling_window();
        if let Some(t) = t_values.iter().find(|&&t| t < lo || t > hi) {
            return Err(Error::Range(format!(
                "rescaling parameter {t} outside the admissible window [{lo:.3}, {hi:.3}]"
            )));
        }
        let mut norm = Vec::new();
        let mut norm_adjoint = Vec::new();
        for &t in t_values {
            let vt = if self.potential.is_zero() { Potential::zero() } else { self.potential.rescaled(t)? };
            let om = build_wave_operator(&vt, &self.grid, Side::Minus)?;
            let e = &om.omega.entries;
            for (adjoint, sink) in [(false, &mut norm), (true, &mut norm_adjoint)] {
                let oq = if adjoint { e.adjoint() * &self.subspace.basis } else { e * &self.subspace.basis };
                let oq = columns_of(&oq);
                let cols: Vec<Vec<C64>> = oq
                    .par_iter()
                    .zip(&self.q)
                    .map(|(o, q)| {
                        let x = if low { self.apply_gamma1(q, adjoint)? } else { q.clone() };
                        Ok(o.iter().zip(&x).map(|(a, b)| a - b).collect())
                    })
                    .collect::<Result<_>>()?;
                let cut = if low { Cut::AtMost(1.0) } else { Cut::AtLeast(1.0) };
                sink.push(self.h0_cut_norm(&cols, cut)?);
            }
        }
        let q = if low { Quantity::RescaledLow } else { Quantity::RescaledHigh };
        Ok(self.curve(q, t_values, norm, norm_adjoint))
    }

    /// `max_s |Gamma_1(s) - (P_o + R(s) P_e)|` in parity channels on `|s| <= s_max`.
    pub fn gamma1_point_deviation(&self, s_max: f64, samples: usize) -> f64 {
        let s0 = mat2::to_parity(&self.s0);
        let d = mat2::sub(&s0, &mat2::identity());
        (0..samples)
            .map(|i| {
                let s = -s_max + 2.0 * s_max * i as f64 / (samples - 1) as f64;
                let (re, ro) = r_pair(s);
                let t = mat2::diag(0.5 * (1.0 - re), 0.5 * (1.0 - ro));
                let g = mat2::add(&mat2::identity(), &mat2::mul(&t, &d));
                let point = mat2::diag(re, mat2::ONE);
                mat2::frobenius(&mat2::sub(&g, &point))
            })
            .fold(0.0, f64::max)
    }
}

/// Parameter lists of the full suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveLists {
    pub high_energy: Vec<f64>,
    pub low_energy: Vec<f64>,
    pub past_cut: Vec<f64>,
    pub future_cut: Vec<f64>,
    pub log_time_past: Vec<f64>,
    pub log_time_future: Vec<f64>,
    pub rescaled_low: Vec<f64>,
    pub rescaled_high: Vec<f64>,
}

impl CurveLists {
    pub fn list(&self, q: Quantity) -> &[f64] {
        match q {
            Quantity::HighEnergy => &self.high_energy,
            Quantity::LowEnergy => &self.low_energy,
            Quantity::PastCut => &self.past_cut,
            Quantity::FutureCut => &self.future_cut,
            Quantity::LogTimePast => &self.log_time_past,
            Quantity::LogTimeFuture => &self.log_time_future,
            Quantity::RescaledLow => &self.rescaled_low,
            Quantity::RescaledHigh => &self.rescaled_high,
        }
    }
}

/// Calibrated final-value thresholds and consistency tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub high_energy: f64,
    pub low_energy: f64,
    pub past_cut: f64,
    pub future_cut: f64,
    pub log_time: f64,
    pub rescaled: f64,
    /// Largest admissible ratio of the two final values.
    pub adjoint_ratio: f64,
    /// Log-time curve against the cut curve at `2t`.
    pub cross_check: f64,
    /// A curve whose entries all stay below this is the zero curve.
    pub zero_curve: f64,
    /// Bound on `sigma_20 / sigma_1` of `chi(A <= 0)(Omega - 1)`.
    pub singular_ratio: f64,
}

impl Thresholds {
    pub fn final_max(&self, q: Quantity) -> f64 {
        match q {
            Quantity::HighEnergy => self.high_energy,
            Quantity::LowEnergy => self.low_energy,
            Quantity::PastCut => self.past_cut,
            Quantity::FutureCut => self.future_cut,
            Quantity::LogTimePast | Quantity::LogTimeFuture => self.log_time,
            Quantity::RescaledLow | Quantity::RescaledHigh => self.rescaled,
        }
    }
}

/// Everything the restricted-norm suite needs besides the potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: usize,
    pub x_max: f64,
    pub subspace: SubspaceSpec,
    pub log_time_subspace: SubspaceSpec,
    pub lists: CurveLists,
    pub thresholds: Thresholds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveVerdict {
    pub quantity: Quantity,
    pub strictly_decreasing: bool,
    pub final_value: f64,
    pub threshold: f64,
    pub adjoint_ratio: f64,
    pub adjoint_ratio_ok: bool,
    /// Largest deviation from the cut curve at `2t`, log-time curves only.
    pub cross_check: Option<f64>,
    pub zero_curve: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub n: usize,
    pub x_max: f64,
    pub subspace_dim: usize,
    pub log_time_subspace_dim: usize,
    pub isometry_defect: f64,
    pub singular_ratio_20: f64,
    pub singular_ratio_ok: bool,
    pub curves: Vec<DecayCurve>,
    pub verdicts: Vec<CurveVerdict>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn curve(&self, q: Quantity) -> Option<&DecayCurve> {
        self.curves.iter().find(|c| c.quantity == q)
    }

    pub fn verdict(&self, q: Quantity) -> Option<&CurveVerdict> {
        self.verdicts.iter().find(|c| c.quantity == q)
    }
}

/// One curve of the suite. Log-time curves run on `log_bench`.
pub fn suite_curve(bench: &Workbench, log_bench: &Workbench, lists: &CurveLists, q: Quantity) -> Result<DecayCurve> {
    let p = lists.list(q);
    match q {
        Quantity::LogTimePast => log_bench.log_time_propagation(p, false),
        Quantity::LogTimeFuture => log_bench.log_time_propagation(p, true),
        Quantity::RescaledLow => bench.rescaled_family(p, true),
        Quantity::RescaledHigh => bench.rescaled_family(p, false),
        _ => bench.corollary_limits(q, p),
    }
}

fn cross_check(log_bench: &Workbench, c: &DecayCurve) -> Result<f64> {
    let cut = if c.quantity == Quantity::LogTimePast { Quantity::PastCut } else { Quantity::FutureCut };
    let doubled: Vec<f64> = c.parameter.iter().map(|t| 2.0 * t).collect();
    let d = log_bench.corollary_limits(cut, &doubled)?;
    Ok(c.norm
        .iter()
        .zip(&d.norm)
        .chain(c.norm_adjoint.iter().zip(&d.norm_adjoint))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// All eight curves in a fixed order with their verdicts.
pub fn run_suite(v: &Potential, config: &SuiteConfig) -> Result<SuiteReport> {
    let grid = LineGrid::new(config.n, config.x_max)?;
    let bench = Workbench::new(v, &grid, &config.subspace)?;
    let log_bench = bench.with_subspace(&config.log_time_subspace)?;
    let th = &config.thresholds;
    let mut curves = Vec::new();
    let mut verdicts = Vec::new();
    for q in Quantity::ALL {
        let c = suite_curve(&bench, &log_bench, &config.lists, q)?;
        let cross = match q {
            Quantity::LogTimePast | Quantity::LogTimeFuture => Some(cross_check(&log_bench, &c)?),
            _ => None,
        };
        let zero_curve = c.max_norm() <= th.zero_curve;
        let threshold = th.final_max(q);
        let decreasing = c.strictly_decreasing();
        let ratio = c.adjoint_ratio();
        let pass = zero_curve
            || (decreasing && c.final_value() < threshold && cross.is_none_or(|x| x <= th.cross_check));
        verdicts.push(CurveVerdict {
            quantity: q,
            strictly_decreasing: decreasing,
            final_value: c.final_value(),
            threshold,
            adjoint_ratio: ratio,
            adjoint_ratio_ok: zero_curve || ratio <= th.adjoint_ratio,
            cross_check: cross,
            zero_curve,
            pass,
        });
        curves.push(c);
    }
    let sv = bench.past_cut_singular_values(0.0)?;
    let singular_ratio_20 = match (sv.first(), sv.get(19)) {
        (Some(&a), Some(&b)) if a > th.zero_curve => b / a,
        (Some(&a), None) if a > th.zero_curve => f64::INFINITY,
        _ => 0.0,
    };
    let singular_ratio_ok = singular_ratio_20 <= th.singular_ratio;
    let pass = singular_ratio_ok && verdicts.iter().all(|v| v.pass);
    Ok(SuiteReport {
        n: grid.n(),
        x_max: grid.x_max(),
        subspace_dim: bench.subspace().dim(),
        log_time_subspace_dim: log_bench.subspace().dim(),
        isometry_defect: bench.isometry_defect(),
        singular_ratio_20,
        singular_ratio_ok,
        curves,
        verdicts,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_is_orthonormal_and_concentrated() {
        let g = LineGrid::new(512, 20.0).unwrap();
        let spec = SubspaceSpec { x_extent: 5.0, k_low: 0.0, k_band: 4.0, concentration: 0.99 };
        let s = test_subspace(&g, &spec).unwrap();
        assert!(s.dim() > 5);
        let gram = s.basis.adjoint() * &s.basis;
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - want).norm() < 1e-9);
            }
        }
        for (j, c) in s.columns().iter().enumerate() {
            let inside: f64 = (0..g.n()).filter(|&i| g.x(i).abs() <= 5.0).map(|i| c[i].norm_sqr()).sum();
            assert!(inside >= 0.99 - 1e-9, "column {j}: {inside}");
        }
    }

    #[test]
    fn channel_identity_is_neutral() {
        let g = LineGrid::new(256, 10.0).unwrap();
        let f: Vec<C64> = g.points().iter().map(|&x| C64::new((-x * x).exp(), x.sin())).collect();
        let out = apply_channels(&g, &f, |_| mat2::identity(), false).unwrap();
        for (a, b) in out.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
