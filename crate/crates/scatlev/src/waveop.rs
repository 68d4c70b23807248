//! Wave operators from generalized eigenfunctions, the remainder kernel `K`
//! and the structure residual `Omega - 1 - T (S - 1)`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{contract, Error, Result};
use crate::grid::{Direction, LineGrid, INV_SQRT_2PI};
use crate::mat2::{self, M2};
use crate::potential::Potential;
use crate::scatter::{ScatteringCoefficients, Scatterer};
use crate::universal::{apply_t_fourier, fourier_multiplier, Basis, OperatorMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `max ||Omega* Omega f - f|| / ||f||` over the standard test packets.
    pub isometry_defect: f64,
    pub flux_defect: f64,
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct WaveOperatorMatrix {
    pub omega: OperatorMatrix,
    pub side: Side,
    pub diagnostics: Diagnostics,
}

pub(crate) fn linalg<E: std::fmt::Debug>(e: E) -> Error {
    Error::Infrastructure(format!("dense linear algebra failed: {e:?}"))
}

/// Singular values of `scale * a`, nonincreasing.
pub fn singular_values(a: &Mat<C64>, scale: f64) -> Result<Vec<f64>> {
    let s = a.singular_values().map_err(linalg)?;
    Ok(s.into_iter().map(|v| v * scale).collect())
}

/// Number of singular values of `a` below `threshold`, from the spectrum of
/// `a* a`.
pub fn count_small_singular(a: &Mat<C64>, threshold: f64) -> Result<usize> {
    let g = a.adjoint() * a;
    let e = g.self_adjoint_eigenvalues(faer::Side::Lower).map_err(linalg)?;
    Ok(e.iter().filter(|&&v| v < threshold * threshold).count())
}

/// Gaussian test packets well inside the box with moderate momenta.
pub fn test_packets(grid: &LineGrid) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    for &c in &[-4.0, 0.0, 4.0] {
        for &k0 in &[-4.0, -1.5, 1.5, 4.0] {
            out.push(
                (0..grid.n())
                    .map(|j| {
                        let x = grid.x(j);
                        C64::from_polar((-(x - c) * (x - c) / 4.5).exp(), k0 * x)
                    })
                    .collect(),
            );
        }
    }
    out
}

/// Columns `psi(., k_m)` for every grid momentum, with the scattering data
/// of `|k_m|`.
pub fn eigenfunction_columns(s: &Scatterer) -> Result<(Vec<Vec<C64>>, Vec<ScatteringCoefficients>)> {
    let g = s.grid();
    let out: Vec<(Vec<C64>, ScatteringCoefficients)> = (0..g.n())
        .into_par_iter()
        .map(|m| s.eigenfunction_with_coefficients(g.k(m)))
        .collect::<Result<_>>()?;
    Ok(out.into_iter().unzip())
}

/// `Omega_+` columns from `Omega_-` columns: `Omega_+ = Omega_- S*`.
fn plus_columns(g: &LineGrid, minus: &[Vec<C64>], coef: &[ScatteringCoefficients]) -> Vec<Vec<C64>> {
    (0..g.n())
        .into_par_iter()
        .map(|m| {
            let mb = g.mirror_k(m);
            let c = &coef[m];
            let (a, b) = if g.k(m) > 0.0 {
                (c.t.conj(), c.r_right.conj())
            } else {
                (c.t.conj(), c.r_left.conj())
            };
            minus[m].iter().zip(&minus[mb]).map(|(p, q)| a * p + b * q).collect()
        })
        .collect()
}

/// Position-basis matrix of `Psi (dk / sqrt(2 pi)) F` from momentum columns.
fn synthesize(g: &LineGrid, cols: &[Vec<C64>]) -> Mat<C64> {
    let n = g.n();
    let s = g.h() * INV_SQRT_2PI;
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r: Vec<C64> = cols.iter().map(|c| c[i].conj()).collect();
            g.fourier_in_place(&mut r, Direction::Inverse);
            r.iter().map(|z| z.conj() * s).collect()
        })
        .collect();
    Mat::from_fn(n, n, |i, j| rows[i][j])
}

impl WaveOperatorMatrix {
    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        self.omega.apply(f)
    }

    /// Adjoint with respect to the uniform grid inner product.
    pub fn apply_adjoint(&self, f: &[C64]) -> Vec<C64> {
        let v = Mat::from_fn(f.len(), 1, |i, _| f[i]);
        let out = self.omega.entries.adjoint() * &v;
        (0..out.nrows()).map(|i| out[(i, 0)]).collect()
    }

    pub fn isometry_defect(&self, vectors: &[Vec<C64>]) -> f64 {
        vectors
            .iter()
            .map(|f| {
                let back = self.apply_adjoint(&self.apply(f));
                let d: f64 = back.iter().zip(f).map(|(a, b)| (a - b).norm_sqr()).sum();
                let nf: f64 = f.iter().map(|z| z.norm_sqr()).sum();
                (d / nf).sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.omega.entries, 1.0)
    }

    pub fn small_singular_count(&self, threshold: f64) -> Result<usize> {
        count_small_singular(&self.omega.entries, threshold)
    }
}

pub fn build_wave_operator(v: &Potential, grid: &LineGrid, side: Side) -> Result<WaveOperatorMatrix> {
    let s = Scatterer::new(v, grid);
    let (cols, coef) = eigenfunction_columns(&s)?;
    let cols = match side {
        Side::Minus => cols,
        Side::Plus => plus_columns(grid, &cols, &coef),
    };
    let label = match side {
        Side::Minus => "Omega_- from eigenfunction synthesis",
        Side::Plus => "Omega_+ = Omega_- S* from eigenfunction synthesis",
    };
    let omega = OperatorMatrix { entries: synthesize(grid, &cols), basis: Basis::Position, provenance: label.into() };
    let edge = v.eval(grid.x(0)).abs().max(v.eval(grid.x(grid.n() - 1)).abs());
    let mut w = WaveOperatorMatrix {
        omega,
        side,
        diagnostics: Diagnostics {
            isometry_defect: 0.0,
            flux_defect: coef.iter().map(|c| c.flux_defect()).fold(0.0, f64::max),
            truncated: edge > 1e-10,
        },
    };
    w.diagnostics.isometry_defect = w.isometry_defect(&test_packets(grid));
    Ok(w)
}

/// `K(x, k)` on the grid for a set of momentum columns.
#[derive(Clone, Debug)]
pub struct RemainderKernel {
    pub columns: Vec<usize>,
    /// `n x columns.len()` samples.
    pub kernel: Mat<C64>,
    /// Hilbert-Schmidt norm of the operator `K (dk/sqrt(2 pi)) F` restricted
    /// to the columns.
    pub hs_norm: f64,
    pub singular_values: Vec<f64>,
    /// `max |K| |k| <x>` over `|k| >= 1`.
    pub envelope_large_k: f64,
    /// `max |K| <x>^0.6` over `|k| < 1`.
    pub envelope_small_k: f64,
}

/// Fine-grid refinement used by the kernel quadrature.
pub const KERNEL_REFINE: usize = 16;

fn kernel_column(s: &Scatterer, k: f64, win: usize) -> Result<Vec<C64>> {
    let g = s.grid();
    let n = g.n();
    let mut col = vec![C64::new(0.0, 0.0); n];
    if s.potential().is_zero() {
        return Ok(col);
    }
    let o = g.origin();
    let hf = g.h() / KERNEL_REFINE as f64;
    let nf = 2 * win * KERNEL_REFINE + 1;
    let x0 = g.x(o - win);
    let nodes: Vec<f64> = (0..nf).map(|i| x0 + i as f64 * hf).collect();
    let psi = s.eigenfunction_on(k, nodes.clone())?;
    let kk = k.abs();
    let v = s.potential();
    let gy: Vec<C64> = nodes.iter().zip(&psi).map(|(&y, p)| v.eval(y) * p).collect();
    let ep: Vec<C64> = nodes.iter().map(|&y| C64::from_polar(1.0, kk * y)).collect();
    // right-anchored cumulative integrals of e^{+-iky} g
    let mut cp = vec![C64::new(0.0, 0.0); nf];
    let mut cm = vec![C64::new(0.0, 0.0); nf];
    for i in (0..nf - 1).rev() {
        cp[i] = cp[i + 1] + 0.5 * hf * (ep[i] * gy[i] + ep[i + 1] * gy[i + 1]);
        cm[i] = cm[i + 1] + 0.5 * hf * (ep[i].conj() * gy[i] + ep[i + 1].conj() * gy[i + 1]);
    }
    let mut dp = vec![C64::new(0.0, 0.0); nf];
    let mut dm = vec![C64::new(0.0, 0.0); nf];
    for i in 1..nf {
        dp[i] = dp[i - 1] + 0.5 * hf * (ep[i] * gy[i] + ep[i - 1] * gy[i - 1]);
        dm[i] = dm[i - 1] + 0.5 * hf * (ep[i].conj() * gy[i] + ep[i - 1].conj() * gy[i - 1]);
    }
    let den = C64::new(0.0, 2.0 * kk);
    let centre = win * KERNEL_REFINE;
    for jj in 0..=2 * win {
        let i = jj * KERNEL_REFINE;
        let right = (ep[i].conj() * cp[i] - ep[i] * cm[i]) / den;
        let left = (ep[i] * dm[i] - ep[i].conj() * dp[i]) / den;
        col[o - win + jj] = match i.cmp(&centre) {
            std::cmp::Ordering::Greater => right,
            std::cmp::Ordering::Less => left,
            std::cmp::Ordering::Equal => 0.5 * (right + left),
        };
    }
    Ok(col)
}

fn window_cells(v: &Potential, g: &LineGrid) -> Result<usize> {
    let cells = (v.extent() / g.h()).ceil() as usize + 1;
    contract(cells < g.n() / 2, || {
        format!("potential extent {} does not fit inside x_max = {}", v.extent(), g.x_max())
    })?;
    Ok(cells)
}

pub fn remainder_kernel(v: &Potential, grid: &LineGrid, columns: Option<Vec<usize>>) -> Result<RemainderKernel> {
    v.check_decay_hypothesis()?;
    let columns = columns.unwrap_or_else(|| (0..grid.n()).collect());
    let s = Scatterer::new(v, grid);
    let win = if v.is_zero() { 0 } else { window_cells(v, grid)? };
    let cols: Vec<Vec<C64>> = columns
        .par_iter()
        .map(|&m| kernel_column(&s, grid.k(m), win))
        .collect::<Result<_>>()?;
    let n = grid.n();
    let kernel = Mat::from_fn(n, columns.len(), |i, j| cols[j][i]);
    let w = (grid.h() * grid.dk() / (2.0 * PI)).sqrt();
    let mut large = 0.0f64;
    let mut small = 0.0f64;
    for (c, &m) in cols.iter().zip(&columns) {
        let k = grid.k(m).abs();
        for (j, z) in c.iter().enumerate() {
            let jx = (1.0 + grid.x(j).powi(2)).sqrt();
            if k >= 1.0 {
                large = large.max(z.norm() * k * jx);
            } else {
                small = small.max(z.norm() * jx.powf(0.6));
            }
        }
    }
    Ok(RemainderKernel {
        hs_norm: w * kernel.norm_l2(),
        singular_values: singular_values(&kernel, w)?,
        kernel,
        columns,
        envelope_large_k: large,
        envelope_small_k: small,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub side: Side,
    pub n: usize,
    pub x_max: f64,
    pub k_band: f64,
    pub columns: usize,
    /// `||D - K_quad||_F`.
    pub residual_abs: f64,
    /// `||D - K_quad||_F / ||K_quad||_F`, zero when both vanish.
    pub residual_rel: f64,
    pub d_norm: f64,
    pub k_norm: f64,
    pub singular_values: Vec<f64>,
    /// `sigma_50(D) / sigma_1(D)`.
    pub sv_ratio_50: f64,
    pub envelope_large_k: f64,
    pub envelope_small_k: f64,
}

/// Band columns `|k_m| <= k_band`.
pub fn band_columns(grid: &LineGrid, k_band: f64) -> Vec<usize> {
    (0..grid.n()).filter(|&m| grid.k(m).abs() <= k_band).collect()
}

/// Compares `D = Omega - 1 - T(S - 1)` (or its `Omega_+` analogue with
/// `1 - T` and `S*`) against the quadrature kernel on the band columns.
pub fn structure_residual(v: &Potential, grid: &LineGrid, side: Side, k_band: f64) -> Result<StructureReport> {
    v.check_decay_hypothesis()?;
    let cols = band_columns(grid, k_band);
    contract(!cols.is_empty(), || format!("no grid momenta with |k| <= {k_band}"))?;
    let s = Scatterer::new(v, grid);
    let kern = remainder_kernel(v, grid, Some(cols.clone()))?;
    let pos = |m: usize| cols.binary_search(&m).ok();

    let d_cols: Vec<(Vec<C64>, Vec<C64>)> = cols
        .par_iter()
        .map(|&m| -> Result<(Vec<C64>, Vec<C64>)> {
            let k = grid.k(m);
            let mb = grid.mirror_k(m);
            let e = grid.plane_wave(m);
            let eb = grid.plane_wave(mb);
            let (psi, c) = s.eigenfunction_with_coefficients(k)?;
            let kcol = |mm: usize| -> Vec<C64> {
                let j = pos(mm).expect("band is symmetric");
                (0..grid.n()).map(|i| kern.kernel[(i, j)]).collect()
            };
            match side {
                Side::Minus => {
                    let r = if k > 0.0 { c.r_left } else { c.r_right };
                    let se: Vec<C64> = e.iter().zip(&eb).map(|(a, b)| (c.t - 1.0) * a + r * b).collect();
                    let tse = apply_t_fourier(grid, &se)?;
                    let d = (0..grid.n()).map(|i| psi[i] - e[i] - tse[i]).collect();
                    Ok((d, kcol(m)))
                }
                Side::Plus => {
                    let psi_b = s.eigenfunction(grid.k(mb))?;
                    let rb = if k > 0.0 { c.r_right.conj() } else { c.r_left.conj() };
                    let tb = c.t.conj();
                    let omega_col: Vec<C64> = psi.iter().zip(&psi_b).map(|(p, q)| tb * p + rb * q).collect();
                    let se: Vec<C64> = e.iter().zip(&eb).map(|(a, b)| (tb - 1.0) * a + rb * b).collect();
                    let tse = apply_t_fourier(grid, &se)?;
                    let d = (0..grid.n()).map(|i| omega_col[i] - e[i] - (se[i] - tse[i])).collect();
                    let (k1, k2) = (kcol(m), kcol(mb));
                    let ks = k1.iter().zip(&k2).map(|(a, b)| tb * a + rb * b).collect();
                    Ok((d, ks))
                }
            }
        })
        .collect::<Result<_>>()?;

    let n = grid.n();
    let d = Mat::from_fn(n, cols.len(), |i, j| d_cols[j].0[i]);
    let kq = Mat::from_fn(n, cols.len(), |i, j| d_cols[j].1[i]);
    let w = (grid.h() * grid.dk() / (2.0 * PI)).sqrt();
    let diff = (&d - &kq).norm_l2() * w;
    let (dn, kn) = (d.norm_l2() * w, kq.norm_l2() * w);
    let sv = singular_values(&d, w)?;
    let ratio = if sv.is_empty() || sv[0] == 0.0 { 0.0 } else { sv.get(49).copied().unwrap_or(0.0) / sv[0] };
    Ok(StructureReport {
        side,
        n,
        x_max: grid.x_max(),
        k_band,
        columns: cols.len(),
        residual_abs: diff,
        residual_rel: if kn > 0.0 { diff / kn } else if diff == 0.0 { 0.0 } else { f64::INFINITY },
        d_norm: dn,
        k_norm: kn,
        singular_values: sv,
        sv_ratio_50: ratio,
        envelope_large_k: kern.envelope_large_k,
        envelope_small_k: kern.envelope_small_k,
    })
}

/// Max relative change of the significant part (`sigma_j / sigma_1 >=
/// floor`) of two singular-value profiles.
pub fn profile_change(a: &[f64], b: &[f64], floor: f64) -> f64 {
    if a.is_empty() || a[0] == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .take_while(|(x, _)| **x / a[0] >= floor)
        .map(|(x, y)| (x - y).abs() / x)
        .fold(0.0, f64::max)
}

/// Even-sector symbol of the point interaction of strength `alpha`;
/// `alpha = +-inf` gives the Dirichlet limit `-1`.
pub fn point_symbol(alpha: f64, k: f64) -> C64 {
    if alpha.is_infinite() {
        return C64::new(-1.0, 0.0);
    }
    let two_k = 2.0 * k.abs();
    if alpha == 0.0 {
        return mat2::ONE;
    }
    C64::new(two_k, -alpha) / C64::new(two_k, alpha)
}

/// Parity S-matrix of the point interaction, `diag(S_alpha, 1)`.
pub fn point_s_parity(alpha: f64, k: f64) -> M2 {
    mat2::diag(point_symbol(alpha, k), mat2::ONE)
}

/// `Omega^alpha = 1 + T (S_alpha(H0) - 1) P_e`, with no remainder.
pub fn point_interaction_omega(alpha: f64, grid: &LineGrid) -> Result<WaveOperatorMatrix> {
    contract(!alpha.is_nan(), || "alpha must be a number or infinite".into())?;
    let omega = OperatorMatrix::from_map(grid.n(), Basis::Position, "point interaction closed form", |f| {
        let r = grid.reflect(f)?;
        let pe: Vec<C64> = f.iter().zip(&r).map(|(a, b)| 0.5 * (a + b)).collect();
        let g = fourier_multiplier(grid, &pe, |k| point_symbol(alpha, k) - 1.0)?;
        let tg = apply_t_fourier(grid, &g)?;
        Ok(f.iter().zip(&tg).map(|(a, b)| a + b).collect())
    })?;
    let mut w = WaveOperatorMatrix { omega, side: Side::Minus, diagnostics: Diagnostics::default() };
    w.diagnostics.isometry_defect = w.isometry_defect(&test_packets(grid));
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_wave_operator_is_identity() {
        let g = LineGrid::new(256, 20.0).unwrap();
        let w = build_wave_operator(&Potential::zero(), &g, Side::Minus).unwrap();
        let id = Mat::<C64>::identity(256, 256);
        assert!((&w.omega.entries - &id).norm_max() < 1e-8);
        let p = point_interaction_omega(0.0, &g).unwrap();
        assert!((&p.omega.entries - &id).norm_max() < 1e-12);
    }

    #[test]
    fn dirichlet_symbol() {
        assert_eq!(point_symbol(f64::INFINITY, 0.3), C64::new(-1.0, 0.0));
        assert!((point_symbol(1e12, 0.3) + 1.0).norm() < 1e-11);
    }

    #[test]
    fn profile_change_ignores_tail() {
        let a = [1.0, 0.5, 1e-5];
        let b = [1.01, 0.52, 3e-5];
        assert!((profile_change(&a, &b, 1e-3) - 0.04).abs() < 1e-12);
    }
}
