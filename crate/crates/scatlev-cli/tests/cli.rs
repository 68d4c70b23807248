use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatlev"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("SCATLEV_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const SHORT_SWEEP: &str = "[sweep]\nlambda_points = 200\n";

#[test]
fn free_smatrix_rows_are_identity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &format!("[potential]\nkind = \"zero\"\n{SHORT_SWEEP}"));
    let o = run(&["smatrix"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(dir.path().join("smatrix.csv"));
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert!((r[col(&h, "t_re")] - 1.0).abs() <= 1e-12 && r[col(&h, "t_im")].abs() <= 1e-12);
        for c in ["r_left_re", "r_left_im", "r_right_re", "r_right_im"] {
            assert!(r[col(&h, c)].abs() <= 1e-12);
        }
    }
    let s = json(dir.path().join("spectrum.json"));
    assert_eq!(s["spectrum"]["n_bound"], 0);
    assert_eq!(s["meta"]["grid"]["n"], 2048);
    assert_eq!(s["meta"]["version"], env!("CARGO_PKG_VERSION"));
    let text = fs::read_to_string(dir.path().join("smatrix.csv")).unwrap();
    assert!(text.starts_with(&format!("# scatlev {} smatrix", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# grid n=2048 x_max=40"));
}

#[test]
fn sech2_is_reflectionless() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &format!("[potential]\nkind = \"poschl_teller\"\ndepth = 2.0\nwidth = 1.0\n{SHORT_SWEEP}"),
    );
    let o = run(&["smatrix"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(dir.path().join("smatrix.csv"));
    for r in &rows {
        let rl = r[col(&h, "r_left_re")].hypot(r[col(&h, "r_left_im")]);
        let rr = r[col(&h, "r_right_re")].hypot(r[col(&h, "r_right_im")]);
        assert!(rl <= 1e-6 && rr <= 1e-6, "lambda {}: {rl} {rr}", r[0]);
    }
}

#[test]
fn malformed_config_exits_two_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[potential]\nkind = \"zero\"\n\n[grid]\nn = 512\nx_maxx = 40.0\n");
    let o = run(&["smatrix"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x_maxx"));

    let cfg = write_config(&dir, "[potential]\nkind = \"zero\"\n[grid]\nn = 512\nx_max = -1.0\n");
    let o = run(&["smatrix"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.x_max"));

    let o = run(&["smatrix"], &dir.path().join("missing.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn levinson_square_well_counts_bound_states() {
    let dir = TempDir::new().unwrap();
    let o = run(&["levinson"], &configs().join("square_well.toml"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("levinson.json"));
    let n = r["report"]["n_bound"].as_f64().unwrap();
    assert_eq!(n, 2.0);
    assert!((r["report"]["total"].as_f64().unwrap() + n).abs() <= 1e-2);
    assert_eq!(r["pass"], true);
    let (_, rows) = csv_rows(dir.path().join("time_delay.csv"));
    assert!(rows.len() >= 1000);
}

#[test]
fn levinson_point_interaction() {
    let dir = TempDir::new().unwrap();
    let o = run(&["levinson"], &configs().join("point.toml"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("levinson.json"));
    assert!((r["report"]["total"].as_f64().unwrap() + 1.0).abs() <= 1e-2);
}

#[test]
fn levinson_free_is_zero() {
    let dir = TempDir::new().unwrap();
    let o = run(&["levinson"], &configs().join("free.toml"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(dir.path().join("levinson.json"))["report"];
    for key in ["total", "time_delay_integral"] {
        assert!(r[key].as_f64().unwrap().abs() <= 1e-12, "{key}: {}", r[key]);
    }
    for w in ["w1", "w2", "w3", "w4"] {
        assert!(r[w]["trace"].as_f64().unwrap().abs() <= 1e-12);
    }
}

fn small_structure(kind: &str) -> String {
    format!("seed = 3\n[potential]\n{kind}\n[grid]\nn = 1024\nx_max = 40.0\n[structure]\nk_band = 10.0\n")
}

#[test]
fn verify_structure_gaussian_well_and_kernel_dump() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &small_structure("kind = \"gaussian_well\"\ndepth = 1.0\nwidth = 1.0"));
    let o = run(&["verify-structure"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("structure.json"));
    for side in ["minus", "plus"] {
        assert!(r[side]["residual_rel"].as_f64().unwrap() <= 1e-3);
    }
    assert!(r["t_cross_check"]["max_relative_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r["t_cross_check"]["seed"], 3);

    let bytes = fs::read(dir.path().join("kernel.bin")).unwrap();
    assert_eq!(&bytes[..8], b"SCLVKERN");
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
    let (rows, cols) = (u64_at(16) as usize, u64_at(24) as usize);
    assert_eq!((rows, u64_at(32), f64_at(40)), (1024, 1024, 40.0));
    assert_eq!(cols, r["kernel"]["columns"].as_u64().unwrap() as usize);
    assert_eq!(bytes.len(), 48 + 8 * cols + 16 * rows * cols);
    // momenta ascend and the samples are finite
    let ks: Vec<f64> = (0..cols).map(|j| f64_at(48 + 8 * j)).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]) && ks[0] < 0.0 && ks[cols - 1] > 0.0);
    let data = 48 + 8 * cols;
    assert!((0..2 * rows * cols).all(|i| f64_at(data + 8 * i).is_finite()));
}

#[test]
fn verify_structure_free_is_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &small_structure("kind = \"zero\""));
    let o = run(&["verify-structure"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("structure.json"));
    for side in ["minus", "plus"] {
        assert_eq!(r[side]["residual_abs"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn slow_tail_is_refused_by_name() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify-structure"], &configs().join("slow_tail.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho > 5/2"));
}

fn free_suite(rescaled_high: &str) -> String {
    format!(
        "[potential]\nkind = \"zero\"\n\
         [asymptotics]\nn = 1024\nx_max = 40.0\n\
         [asymptotics.subspace]\nx_extent = 8.0\nk_band = 6.0\nconcentration = 0.99\n\
         [asymptotics.log_time_subspace]\nx_extent = 4.0\nk_low = 1.0\nk_band = 6.0\nconcentration = 0.99\n\
         [asymptotics.lists]\nhigh_energy = [1.0, 4.0]\nlow_energy = [1.0, 0.25]\npast_cut = [0.0, -2.0]\n\
         future_cut = [0.0, 2.0]\nlog_time_past = [-1.0, -2.0]\nlog_time_future = [1.0, 2.0]\n\
         rescaled_low = [0.0, -1.0]\nrescaled_high = {rescaled_high}\n\
         [asymptotics.thresholds]\nhigh_energy = 0.2\nlow_energy = 0.25\npast_cut = 0.2\nfuture_cut = 0.2\n\
         log_time = 0.25\nrescaled = 0.25\nadjoint_ratio = 5.0\ncross_check = 5e-2\nzero_curve = 1e-8\n\
         singular_ratio = 0.1\n"
    )
}

#[test]
fn asymptotics_free_curves_vanish() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &free_suite("[0.0, 0.5]"));
    let o = run(&["asymptotics"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("asymptotics.json"));
    assert_eq!(r["pass"], true);
    assert_eq!(r["meta"]["grid"]["n"], 1024);
    for tag in ["high-energy", "low-energy", "past-cut", "future-cut", "log-time-past", "log-time-future", "rescaled-low", "rescaled-high"] {
        let (_, rows) = csv_rows(dir.path().join(format!("curve_{tag}.csv")));
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r[1].abs() <= 1e-8 && r[2].abs() <= 1e-8), "{tag}");
    }
}

#[test]
fn asymptotics_out_of_window_exits_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &free_suite("[0.0, 9.0]"));
    let o = run(&["asymptotics"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("admissible window"));
}

#[test]
fn point_command_reports_deficiency() {
    let dir = TempDir::new().unwrap();
    let o = run(&["point"], &configs().join("point.toml"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("point.json"));
    assert_eq!(r["deficiency"], 1);
    assert_eq!(r["bound_energy"], -1.0);
    let (_, rows) = csv_rows(dir.path().join("point_symbol.csv"));
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| (r[1].hypot(r[2]) - 1.0).abs() <= 1e-12));
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = write_config(
        &a,
        &format!("[potential]\nkind = \"square_well\"\ndepth = 4.0\nwidth = 2.0\n{SHORT_SWEEP}"),
    );
    for d in [&a, &b] {
        assert!(run(&["smatrix"], &cfg, d.path()).status.success());
    }
    for f in ["smatrix.csv", "spectrum.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn command_guard_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &format!("command = \"levinson\"\n[potential]\nkind = \"zero\"\n{SHORT_SWEEP}"));
    assert_eq!(run(&["smatrix"], &cfg, dir.path()).status.code(), Some(2));
    let cfg = write_config(&dir, &format!("[potential]\nkind = \"zero\"\n{SHORT_SWEEP}"));
    let o = run(&["smatrix", "--grid-n", "512", "--seed", "11"], &cfg, dir.path());
    assert!(o.status.success());
    let s = json(dir.path().join("spectrum.json"));
    assert_eq!((s["meta"]["grid"]["n"].as_u64(), s["meta"]["seed"].as_u64()), (Some(512), Some(11)));
}
