use std::path::PathBuf;

use scatlev::asymptotics::{run_suite, Quantity};
use scatlev::levinson::{levinson_point, levinson_report, Integrand, LevinsonReport};
use scatlev::mat2;
use scatlev::scatter::{energy_grid, SMatrix, Scatterer, SpectralSummary};
use scatlev::universal::{apply_t_fourier, seeded_test_functions, MellinBridge};
use scatlev::waveop::{
    band_columns, point_interaction_omega, point_s_parity, point_symbol, remainder_kernel, structure_residual, Side,
    StructureReport,
};
use serde::Serialize;

use crate::config::{Model, RunConfig};
use crate::output::{GridMeta, Meta, Sink};
use crate::CliError;

pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

fn sink(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Sink, CliError> {
    let meta = Meta {
        artifact: "scatlev",
        version: crate::output::VERSION,
        command,
        grid: GridMeta::of(&cfg.line_grid()?),
        seed: cfg.seed,
    };
    Sink::new(out, meta)
}

#[derive(Serialize)]
struct SweepReport {
    model: String,
    points: usize,
    lambda_min: f64,
    lambda_max: f64,
    max_unitarity_defect: f64,
    max_abs_t: f64,
    max_abs_r: f64,
    spectrum: Option<SpectralSummary>,
    point_bound_energy: Option<f64>,
    pass: bool,
}

pub fn smatrix(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Outcome, CliError> {
    let sweep = &cfg.sweep;
    let lambdas = energy_grid(sweep.k_min, sweep.lambda_max, sweep.lambda_points);
    let (model, rows, spectrum, point_bound_energy) = match cfg.model()? {
        Model::Sampled(v) => {
            let s = Scatterer::new(&v, &cfg.line_grid()?);
            (v.kind().tag().to_string(), s.s_sweep(&lambdas)?, Some(s.bound_states()?), None)
        }
        Model::Point(alpha) => {
            let rows = lambdas.iter().map(|&l| SMatrix::from_parity(l, point_s_parity(alpha, l.sqrt()))).collect();
            let e = (alpha < 0.0).then(|| -alpha * alpha / 4.0);
            (format!("point({alpha})"), rows, None, e)
        }
    };
    let sink = sink(cfg, out, command)?;
    let mut worst = [0.0f64; 3];
    let mut table = Vec::with_capacity(rows.len());
    for m in &rows {
        let p = &m.plane_wave;
        let (t, rr, rl) = (p[0][0], p[0][1], p[1][0]);
        let u = m.unitarity_defect();
        worst = [worst[0].max(u), worst[1].max(t.norm()), worst[2].max(rl.norm().max(rr.norm()))];
        table.push(vec![m.lambda, m.lambda.sqrt(), t.re, t.im, rl.re, rl.im, rr.re, rr.im, t.norm(), u]);
    }
    let tol = cfg.tolerances.unitarity;
    let pass = worst[0] <= tol && worst[1] <= 1.0 + tol;
    let header = ["lambda", "k", "t_re", "t_im", "r_left_re", "r_left_im", "r_right_re", "r_right_im", "abs_t", "unitarity_defect"];
    let mut files = vec![sink.csv("smatrix.csv", &header, table)?];
    let report = SweepReport {
        model,
        points: rows.len(),
        lambda_min: lambdas[0],
        lambda_max: *lambdas.last().unwrap_or(&lambdas[0]),
        max_unitarity_defect: worst[0],
        max_abs_t: worst[1],
        max_abs_r: worst[2],
        spectrum,
        point_bound_energy,
        pass,
    };
    files.push(sink.json("spectrum.json", &report)?);
    let failures = if pass {
        vec![]
    } else {
        vec![format!("unitarity defect {:.3e} or |t| = {:.6} exceeds tolerance {tol:e}", worst[0], worst[1])]
    };
    Ok(Outcome { files, failures })
}

#[derive(Serialize)]
struct LevinsonOut<'a> {
    model: String,
    report: &'a LevinsonReport,
    pass: bool,
}

fn levinson_failures(cfg: &RunConfig, r: &LevinsonReport) -> Vec<String> {
    let t = &cfg.tolerances;
    let mut f: Vec<String> = r.issues.clone();
    if r.discrepancy > t.winding {
        f.push(format!("total winding {:.5} misses -N = -{} by more than {}", r.total, r.n_bound, t.winding));
    }
    if (r.time_delay_integral - r.expected_time_delay).abs() > t.time_delay {
        f.push(format!(
            "time-delay integral {:.5} misses {} by more than {}",
            r.time_delay_integral, r.expected_time_delay, t.time_delay
        ));
    }
    f
}

fn write_levinson(sink: &Sink, cfg: &RunConfig, model: String, r: &LevinsonReport, i: &Integrand) -> Result<Outcome, CliError> {
    let failures = levinson_failures(cfg, r);
    let rows = i.lambda.iter().zip(&i.value).map(|(&l, &v)| vec![l, v]);
    let files = vec![
        sink.json("levinson.json", &LevinsonOut { model, report: r, pass: failures.is_empty() })?,
        sink.csv("time_delay.csv", &["lambda", "integrand"], rows)?,
    ];
    Ok(Outcome { files, failures })
}

pub fn levinson(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Outcome, CliError> {
    let contour = cfg.sweep.contour();
    let (model, (r, i)) = match cfg.model()? {
        Model::Sampled(v) => (v.kind().tag().to_string(), levinson_report(&v, &cfg.line_grid()?, &contour)?),
        Model::Point(alpha) => (format!("point({alpha})"), levinson_point(alpha, &contour)?),
    };
    let sink = sink(cfg, out, command)?;
    write_levinson(&sink, cfg, model, &r, &i)
}

#[derive(Serialize)]
struct StructureOut {
    model: String,
    minus: StructureReport,
    plus: StructureReport,
    t_cross_check: CrossCheck,
    kernel: Option<KernelInfo>,
    pass: bool,
}

#[derive(Serialize)]
struct CrossCheck {
    functions: usize,
    seed: u64,
    max_relative_error: f64,
}

#[derive(Serialize)]
struct KernelInfo {
    file: String,
    rows: usize,
    columns: usize,
    hs_norm: f64,
    envelope_large_k: f64,
    envelope_small_k: f64,
}

pub fn verify_structure(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Outcome, CliError> {
    let v = cfg.build_potential()?;
    let g = cfg.line_grid()?;
    let spec = &cfg.structure;
    let minus = structure_residual(&v, &g, Side::Minus, spec.k_band)?;
    let plus = structure_residual(&v, &g, Side::Plus, spec.k_band)?;
    let bridge = match cfg.log_grid()? {
        Some(l) => MellinBridge::new(&g, &l)?,
        None => MellinBridge::with_default_log(&g)?,
    };
    let mut worst = 0.0f64;
    for f in seeded_test_functions(&g, spec.test_functions, cfg.seed) {
        let a = apply_t_fourier(&g, &f)?;
        let b = bridge.apply_t_mellin(&f)?;
        let d: Vec<_> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        worst = worst.max(g.norm_x(&d) / g.norm_x(&f));
    }
    let sink = sink(cfg, out, command)?;
    let mut files = Vec::new();
    let kernel = if spec.kernel_dump {
        let cols = band_columns(&g, spec.k_band);
        let k = remainder_kernel(&v, &g, Some(cols))?;
        let momenta: Vec<f64> = k.columns.iter().map(|&m| g.k(m)).collect();
        let path = sink.kernel("kernel.bin", &g, &momenta, &k.kernel)?;
        files.push(path);
        Some(KernelInfo {
            file: "kernel.bin".into(),
            rows: k.kernel.nrows(),
            columns: k.kernel.ncols(),
            hs_norm: k.hs_norm,
            envelope_large_k: k.envelope_large_k,
            envelope_small_k: k.envelope_small_k,
        })
    } else {
        None
    };
    let t = &cfg.tolerances;
    let mut failures = Vec::new();
    for r in [&minus, &plus] {
        if r.residual_rel > t.structure_residual || r.sv_ratio_50 > t.singular_ratio {
            failures.push(format!(
                "{:?}: residual {:.3e}, sigma_50/sigma_1 {:.3e}",
                r.side, r.residual_rel, r.sv_ratio_50
            ));
        }
    }
    if worst > t.t_cross_check {
        failures.push(format!("Fourier and Mellin realizations of T differ by {worst:.3e}"));
    }
    let len = minus.singular_values.len().min(plus.singular_values.len());
    let rows = (0..len).map(|i| vec![(i + 1) as f64, minus.singular_values[i], plus.singular_values[i]]);
    files.push(sink.csv("singular_values.csv", &["index", "sigma_minus", "sigma_plus"], rows)?);
    let report = StructureOut {
        model: v.kind().tag().to_string(),
        minus,
        plus,
        t_cross_check: CrossCheck { functions: spec.test_functions, seed: cfg.seed, max_relative_error: worst },
        kernel,
        pass: failures.is_empty(),
    };
    files.insert(0, sink.json("structure.json", &report)?);
    Ok(Outcome { files, failures })
}

pub fn asymptotics(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Outcome, CliError> {
    let v = cfg.build_potential()?;
    let suite = cfg.asymptotics.as_ref().ok_or_else(|| CliError::Config("missing [asymptotics] section".into()))?;
    let report = run_suite(&v, suite)?;
    let mut sink = sink(cfg, out, command)?;
    sink.meta.grid = GridMeta::of(&scatlev::grid::LineGrid::new(suite.n, suite.x_max)?);
    let mut files = vec![sink.json("asymptotics.json", &report)?];
    for c in &report.curves {
        let rows = c.parameter.iter().zip(&c.norm).zip(&c.norm_adjoint).map(|((&p, &a), &b)| vec![p, a, b]);
        files.push(sink.csv(&format!("curve_{}.csv", c.quantity.tag()), &["parameter", "norm_T", "norm_Tstar"], rows)?);
    }
    let mut failures: Vec<String> = report
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| format!("{} curve: final {:.4} (threshold {})", v.quantity.tag(), v.final_value, v.threshold))
        .collect();
    if !report.singular_ratio_ok {
        failures.push(format!(
            "{}: sigma_20/sigma_1 = {:.3e}",
            Quantity::PastCut.tag(),
            report.singular_ratio_20
        ));
    }
    Ok(Outcome { files, failures })
}

#[derive(Serialize)]
struct PointOut<'a> {
    alpha: f64,
    bound_energy: Option<f64>,
    deficiency: usize,
    isometry_defect: f64,
    s_zero_even: (f64, f64),
    report: &'a LevinsonReport,
    pass: bool,
}

pub fn point(cfg: &RunConfig, out: PathBuf, command: &'static str) -> Result<Outcome, CliError> {
    let (alpha, k_points, k_max) = match (&cfg.point, cfg.potential.as_ref().map(|_| cfg.model()).transpose()?) {
        (Some(p), _) => (p.alpha, p.k_points, p.k_max),
        (None, Some(Model::Point(a))) => (a, 200, 10.0),
        _ => return Err(CliError::Config("missing [point] section with `alpha`".into())),
    };
    if alpha.is_nan() {
        return Err(CliError::Config("`point.alpha` must be a number".into()));
    }
    let g = cfg.line_grid()?;
    let omega = point_interaction_omega(alpha, &g)?;
    let deficiency = omega.small_singular_count(0.5)?;
    let (r, i) = levinson_point(alpha, &cfg.sweep.contour())?;
    let sink = sink(cfg, out, command)?;
    let mut failures = levinson_failures(cfg, &r);
    if deficiency != r.n_bound {
        failures.push(format!("{deficiency} singular values below 0.5, expected {}", r.n_bound));
    }
    let s0 = point_symbol(alpha, 0.0);
    let report = PointOut {
        alpha,
        bound_energy: (alpha < 0.0).then(|| -alpha * alpha / 4.0),
        deficiency,
        isometry_defect: omega.diagnostics.isometry_defect,
        s_zero_even: (s0.re, s0.im),
        report: &r,
        pass: failures.is_empty(),
    };
    let rows = (0..k_points).map(|j| {
        let k = k_max * j as f64 / (k_points - 1) as f64;
        let s = point_symbol(alpha, k);
        let d = mat2::det(&point_s_parity(alpha, k));
        vec![k, s.re, s.im, d.arg()]
    });
    let files = vec![
        sink.json("point.json", &report)?,
        sink.csv("point_symbol.csv", &["k", "s_even_re", "s_even_im", "det_phase"], rows)?,
        sink.csv("time_delay.csv", &["lambda", "integrand"], i.lambda.iter().zip(&i.value).map(|(&l, &v)| vec![l, v]))?,
    ];
    Ok(Outcome { files, failures })
}
