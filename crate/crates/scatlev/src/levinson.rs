//! Boundary symbols of `q(Omega)` on the energy-dilation square and their
//! windings.
//!
//! Orientation: B1 runs `A` from -inf to +inf at energy 0, B2 runs the
//! energy from 0 to +inf, B3 runs `A` back at infinite energy and B4 closes
//! the square at `A = -inf`. With it the total winding is `-N`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::LineGrid;
use crate::mat2::{self, M2};
use crate::potential::Potential;
use crate::scatter::{energy_grid, Resonance, Scatterer, K_MIN};
use crate::universal::r_pair;
use crate::waveop::point_s_parity;

/// A sampled path of 2x2 matrices with its parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolPath {
    pub param: Vec<f64>,
    pub values: Vec<M2>,
}

impl SymbolPath {
    pub fn constant(value: M2, count: usize) -> Self {
        Self { param: (0..count).map(|i| i as f64).collect(), values: vec![value; count] }
    }

    pub fn first(&self) -> M2 {
        self.values[0]
    }

    pub fn last(&self) -> M2 {
        self.values[self.values.len() - 1]
    }

    /// Scalar path of one diagonal entry.
    pub fn entry(&self, i: usize) -> SymbolPath {
        let values = self.values.iter().map(|m| mat2::diag(m[i][i], mat2::ONE)).collect();
        SymbolPath { param: self.param.clone(), values }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundarySymbol {
    pub gamma1: SymbolPath,
    pub gamma2: SymbolPath,
    pub gamma3: SymbolPath,
    pub gamma4: SymbolPath,
    /// `Gamma_1(+inf), Gamma_2(+inf), Gamma_3(-inf), Gamma_4(0)`.
    pub corner_values: [M2; 4],
}

/// Sampling of the four pieces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub a_points: usize,
    pub a_max: f64,
    pub lambda_points: usize,
    pub lambda_max: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self { a_points: 2048, a_max: 10.0, lambda_points: 3600, lambda_max: 1e6 }
    }
}

/// `Gamma_1(s) = 1 + (1 - R(s)) (S0 - 1) / 2` in parity channels.
pub fn gamma1_path(s0: &M2, spec: &ContourSpec) -> SymbolPath {
    let m = spec.a_points;
    let param: Vec<f64> = (0..m).map(|i| -spec.a_max + 2.0 * spec.a_max * i as f64 / (m - 1) as f64).collect();
    let d = mat2::sub(s0, &mat2::identity());
    let values = param
        .iter()
        .map(|&s| {
            let (re, ro) = r_pair(s);
            let t = mat2::diag(0.5 * (1.0 - re), 0.5 * (1.0 - ro));
            mat2::add(&mat2::identity(), &mat2::mul(&t, &d))
        })
        .collect();
    SymbolPath { param, values }
}

/// `Gamma_2`: `S(0)`, the sweep, then `S(+inf) = 1`.
fn gamma2_path(s0: M2, lambdas: &[f64], sweep: &[M2]) -> SymbolPath {
    let mut param = vec![0.0];
    param.extend_from_slice(lambdas);
    param.push(f64::INFINITY);
    let mut values = vec![s0];
    values.extend_from_slice(sweep);
    values.push(mat2::identity());
    SymbolPath { param, values }
}

fn assemble(s0: M2, lambdas: &[f64], sweep: &[M2], spec: &ContourSpec) -> Result<BoundarySymbol> {
    let gamma1 = gamma1_path(&s0, spec);
    let gamma2 = gamma2_path(s0, lambdas, sweep);
    let gamma3 = SymbolPath::constant(mat2::identity(), spec.a_points);
    let gamma4 = SymbolPath::constant(mat2::identity(), 2);
    let corners = [gamma1.last(), gamma2.last(), gamma3.first(), gamma4.last()];
    let mismatch = [
        mat2::frobenius(&mat2::sub(&gamma1.last(), &gamma2.first())),
        mat2::frobenius(&mat2::sub(&gamma2.last(), &gamma3.last())),
        mat2::frobenius(&mat2::sub(&gamma3.first(), &gamma4.first())),
        mat2::frobenius(&mat2::sub(&gamma4.last(), &gamma1.first())),
    ];
    if mismatch.iter().any(|&e| e > 1e-6) {
        return Err(Error::Physics(format!(
            "boundary corners do not match (mismatch {mismatch:?}); corner values {corners:?}"
        )));
    }
    Ok(BoundarySymbol { gamma1, gamma2, gamma3, gamma4, corner_values: corners })
}

/// Boundary symbol from scattering data on the given grid.
pub fn boundary_symbols(v: &Potential, grid: &LineGrid, spec: &ContourSpec) -> Result<BoundarySymbol> {
    let s = Scatterer::new(v, grid);
    let s0 = mat2::to_parity(&s.s_zero()?);
    let lambdas = energy_grid(K_MIN, spec.lambda_max, spec.lambda_points);
    let sweep: Vec<M2> = s.s_sweep(&lambdas)?.into_iter().map(|m| m.parity).collect();
    assemble(s0, &lambdas, &sweep, spec)
}

/// Unwrapped phase of `det` along the path, divided by `2 pi`.
pub fn winding_phase(path: &[M2]) -> Result<f64> {
    let mut total = 0.0;
    for (i, w) in path.windows(2).enumerate() {
        let jump = (mat2::det(&w[1]) / mat2::det(&w[0])).arg();
        if jump.abs() >= 0.5 * PI {
            return Err(Error::Undersampled { index: i + 1, jump });
        }
        total += jump;
    }
    Ok(total / (2.0 * PI))
}

/// `(1/2 pi i) \int tr[G^{-1} dG]` by finite differences on the parameter
/// and the trapezoid rule. Uniform parameters use the five-point stencil,
/// others the three-point one. Returns the integrand samples as well.
pub fn winding_trace(param: &[f64], path: &[M2]) -> Result<(f64, Vec<f64>)> {
    let n = path.len();
    if n < 3 {
        return Ok((0.0, vec![0.0; n]));
    }
    let step = (param[n - 1] - param[0]) / (n - 1) as f64;
    let uniform = n >= 5 && param.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs());
    let lin = |c: &[(usize, f64)]| {
        c.iter().fold([[mat2::ZERO; 2]; 2], |acc, &(j, w)| mat2::add(&acc, &mat2::scale(&path[j], C64::new(w, 0.0))))
    };
    let mut integrand = Vec::with_capacity(n);
    for i in 0..n {
        let d = mat2::det(&path[i]).norm();
        if d < 1e-8 {
            return Err(Error::Singular { index: i, det: d });
        }
        let deriv = if uniform && i >= 2 && i + 2 < n {
            let c = 1.0 / (12.0 * step);
            lin(&[(i - 2, c), (i - 1, -8.0 * c), (i + 1, 8.0 * c), (i + 2, -c)])
        } else if i == 0 || i == n - 1 {
            let (a, b) = if i == 0 { (0, 1) } else { (n - 2, n - 1) };
            let c = 1.0 / (param[b] - param[a]);
            lin(&[(a, -c), (b, c)])
        } else {
            let (h1, h2) = (param[i] - param[i - 1], param[i + 1] - param[i]);
            lin(&[
                (i - 1, -h2 / (h1 * (h1 + h2))),
                (i, (h2 - h1) / (h1 * h2)),
                (i + 1, h1 / (h2 * (h1 + h2))),
            ])
        };
        let tr = mat2::trace(&mat2::mul(&mat2::inverse(&path[i]), &deriv));
        integrand.push((tr / C64::new(0.0, 2.0 * PI)).re);
    }
    let w = (1..n).map(|i| 0.5 * (param[i] - param[i - 1]) * (integrand[i] + integrand[i - 1])).sum();
    Ok((w, integrand))
}

/// `w_1 = (S_ee - S_oo) / 4` after checking the admissible structure of
/// `S(0)`.
pub fn w1_closed_form(s0: &M2) -> Result<f64> {
    let det = mat2::det(s0);
    let det_ok = (det - 1.0).norm() <= 1e-3 || (det + 1.0).norm() <= 1e-3;
    let diag_real = s0[0][0].im.abs() <= 1e-3 && s0[1][1].im.abs() <= 1e-3;
    if !det_ok || !diag_real {
        return Err(Error::Classification(format!(
            "det S(0) = {det}, diagonal ({}, {}); expected det = +-1 and a real diagonal",
            s0[0][0], s0[1][1]
        )));
    }
    Ok(0.25 * (s0[0][0] - s0[1][1]).re)
}

/// Class of `S(0)` implied by its determinant.
pub fn s0_class(s0: &M2) -> Resonance {
    if (mat2::det(s0) + 1.0).norm() <= 1e-3 {
        Resonance::Generic
    } else {
        Resonance::Exceptional
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Winding {
    pub phase: f64,
    pub trace: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorWinding {
    pub w1: f64,
    pub w2: f64,
    pub total: f64,
    pub n_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevinsonReport {
    pub w1: Winding,
    pub w2: Winding,
    pub w3: Winding,
    pub w4: Winding,
    pub w1_closed_form: f64,
    pub total: f64,
    pub n_bound: usize,
    pub classification: Resonance,
    pub time_delay_integral: f64,
    pub expected_time_delay: f64,
    /// `|total + N|`.
    pub discrepancy: f64,
    pub time_delay_residual: f64,
    /// `max |phase - trace|` over the four pieces.
    pub route_residual: f64,
    pub s0_parity: M2,
    pub even: Option<SectorWinding>,
    pub odd: Option<SectorWinding>,
    pub valid: bool,
    pub issues: Vec<String>,
}

/// Integrand `(1/2 pi i) tr[S^{-1} dS/d lambda]` over the energy sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Integrand {
    pub lambda: Vec<f64>,
    pub value: Vec<f64>,
}

/// Trace-route winding of `Gamma_2` with the small segment from `S(0)` to
/// the first sample and a `c / lambda^{3/2}` tail fitted on the last decade.
fn w2_trace(path: &SymbolPath) -> Result<(f64, Integrand)> {
    let n = path.values.len();
    let lam = &path.param[1..n - 1];
    let u: Vec<f64> = lam.iter().map(|l| l.ln()).collect();
    let (body, per_u) = winding_trace(&u, &path.values[1..n - 1])?;
    let integrand: Vec<f64> = per_u.iter().zip(lam).map(|(f, l)| f / l).collect();
    let head = winding_phase(&path.values[..2])?;
    let lmax = lam[lam.len() - 1];
    let (mut num, mut den) = (0.0, 0.0);
    for (l, f) in lam.iter().zip(&integrand) {
        if *l >= 0.1 * lmax {
            let b = l.powf(-1.5);
            num += b * f;
            den += b * b;
        }
    }
    let c = if den > 0.0 { num / den } else { 0.0 };
    let tail = 2.0 * c / lmax.sqrt();
    Ok((head + body + tail, Integrand { lambda: lam.to_vec(), value: integrand }))
}

fn piece(path: &SymbolPath, lambda_piece: bool) -> Result<(Winding, Option<Integrand>)> {
    let phase = winding_phase(&path.values)?;
    if lambda_piece {
        let (trace, integrand) = w2_trace(path)?;
        Ok((Winding { phase, trace }, Some(integrand)))
    } else {
        let (trace, _) = winding_trace(&path.param, &path.values)?;
        Ok((Winding { phase, trace }, None))
    }
}

/// Windings of one boundary symbol; shared by the potential and the
/// closed-form point-interaction paths.
fn report_from_symbol(
    b: &BoundarySymbol,
    n_bound: usize,
    class: Resonance,
    parity_counts: Option<(usize, usize)>,
) -> Result<(LevinsonReport, Integrand)> {
    let mut issues = Vec::new();
    let (w1, _) = piece(&b.gamma1, false)?;
    let (w2, integrand) = piece(&b.gamma2, true)?;
    let (w3, _) = piece(&b.gamma3, false)?;
    let (w4, _) = piece(&b.gamma4, false)?;
    let s0 = b.gamma2.first();
    let w1c = w1_closed_form(&s0)?;
    let total = w1.trace + w2.trace + w3.trace + w4.trace;
    let time_delay = -w2.trace;
    let expected = if class.is_exceptional() { n_bound as f64 } else { n_bound as f64 - 0.5 };
    let route_residual = [&w1, &w2, &w3, &w4].iter().map(|w| (w.phase - w.trace).abs()).fold(0.0, f64::max);
    let discrepancy = (total + n_bound as f64).abs();
    if (total - total.round()).abs() > 1e-2 {
        issues.push(format!("total winding {total} is not within 1e-2 of an integer"));
    }
    if discrepancy > 1e-2 {
        issues.push(format!("total winding {total} differs from -N = -{n_bound}"));
    }
    if (time_delay - expected).abs() > 5e-3 {
        issues.push(format!("time-delay integral {time_delay} differs from expected {expected}"));
    }
    if route_residual > 1e-2 {
        issues.push(format!("phase and trace routes differ by {route_residual}"));
    }
    if (w1.trace - w1c).abs() > 2e-2 {
        issues.push(format!("w1 = {} disagrees with the closed form {w1c}", w1.trace));
    }
    if s0_class(&s0) != class && class != Resonance::Borderline && class != Resonance::ExceptionalFree {
        issues.push(format!("S(0) class {:?} disagrees with the zero-energy Wronskian class {class:?}", s0_class(&s0)));
    }
    let sector = |i: usize, count: usize| -> Result<SectorWinding> {
        let (a, _) = winding_trace(&b.gamma1.param, &b.gamma1.entry(i).values)?;
        let (c, _) = w2_trace(&b.gamma2.entry(i))?;
        Ok(SectorWinding { w1: a, w2: c, total: a + c, n_bound: count })
    };
    let (even, odd) = match parity_counts {
        Some((ne, no)) => (Some(sector(0, ne)?), Some(sector(1, no)?)),
        None => (None, None),
    };
    let report = LevinsonReport {
        w1,
        w2,
        w3,
        w4,
        w1_closed_form: w1c,
        total,
        n_bound,
        classification: class,
        time_delay_integral: time_delay,
        expected_time_delay: expected,
        discrepancy,
        time_delay_residual: (time_delay - expected).abs(),
        route_residual,
        s0_parity: s0,
        even,
        odd,
        valid: issues.is_empty(),
        issues,
    };
    Ok((report, integrand.expect("energy piece carries its integrand")))
}

pub fn levinson_report(v: &Potential, grid: &LineGrid, spec: &ContourSpec) -> Result<(LevinsonReport, Integrand)> {
    let s = Scatterer::new(v, grid);
    let summary = s.bound_states()?;
    let b = boundary_symbols(v, grid, spec)?;
    let counts = summary.even_count.map(|e| (e, summary.n_bound - e));
    report_from_symbol(&b, summary.n_bound, summary.resonance.class, counts)
}

/// Closed-form report for the point interaction of strength `alpha`.
pub fn levinson_point(alpha: f64, spec: &ContourSpec) -> Result<(LevinsonReport, Integrand)> {
    let lambdas = energy_grid(K_MIN, spec.lambda_max, spec.lambda_points);
    let sweep: Vec<M2> = lambdas.iter().map(|l| point_s_parity(alpha, l.sqrt())).collect();
    let s0 = point_s_parity(alpha, 0.0);
    let b = assemble(s0, &lambdas, &sweep, spec)?;
    let n = usize::from(alpha < 0.0);
    let class = if alpha == 0.0 { Resonance::ExceptionalFree } else { Resonance::Generic };
    report_from_symbol(&b, n, class, Some((n, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_winding_examples() {
        let c = vec![mat2::identity(); 10];
        assert_eq!(winding_phase(&c).unwrap(), 0.0);
        let circle: Vec<M2> = (0..=64)
            .map(|i| mat2::diag(C64::from_polar(1.0, 2.0 * PI * i as f64 / 64.0), mat2::ONE))
            .collect();
        assert!((winding_phase(&circle).unwrap() - 1.0).abs() < 1e-12);
        let coarse: Vec<M2> = (0..=3)
            .map(|i| mat2::diag(C64::from_polar(1.0, 2.0 * PI * i as f64 / 3.0), mat2::ONE))
            .collect();
        assert!(matches!(winding_phase(&coarse), Err(Error::Undersampled { .. })));
    }

    #[test]
    fn closed_form_w1() {
        let g = mat2::diag(C64::new(-1.0, 0.0), mat2::ONE);
        assert!((w1_closed_form(&g).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(w1_closed_form(&mat2::identity()).unwrap(), 0.0);
        let b = C64::from_polar(0.8, 0.4);
        let e = [[C64::new(0.6, 0.0), b], [-b.conj(), C64::new(0.6, 0.0)]];
        assert!(w1_closed_form(&e).unwrap().abs() < 1e-15);
        let bad = mat2::diag(C64::new(0.0, 1.0), mat2::ONE);
        assert!(matches!(w1_closed_form(&bad), Err(Error::Classification(_))));
    }

    #[test]
    fn delta_calibration() {
        let (r, _) = levinson_point(-2.0, &ContourSpec::default()).unwrap();
        assert!((r.total + 1.0).abs() < 1e-2, "{r:?}");
        assert!(r.valid, "{:?}", r.issues);
        let (r, _) = levinson_point(0.0, &ContourSpec::default()).unwrap();
        assert!(r.total.abs() < 1e-12);
    }
}
