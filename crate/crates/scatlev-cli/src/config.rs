use std::fs;
use std::path::{Path, PathBuf};

use scatlev::asymptotics::SuiteConfig;
use scatlev::grid::{LineGrid, LogGrid};
use scatlev::levinson::ContourSpec;
use scatlev::potential::Potential;
use scatlev::scatter::K_MIN;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional guard: when present it must name the invoked command.
    pub command: Option<String>,
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub structure: StructureSpec,
    pub asymptotics: Option<SuiteConfig>,
    pub point: Option<PointSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// Closed-form point interaction of strength `alpha`.
    Point { alpha: f64 },
    SquareWell { depth: f64, width: f64 },
    GaussianWell { depth: f64, width: f64 },
    PoschlTeller { depth: f64, width: f64 },
    DeltaRegularized { alpha: f64, sigma: f64 },
    /// Either inline `(x, V)` pairs or a CSV file with header `x,v`.
    CustomSamples { samples: Option<Vec<(f64, f64)>>, csv: Option<PathBuf> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub x_max: f64,
    pub log: Option<LogSpec>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 2048, x_max: 40.0, log: None }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpec {
    pub m: usize,
    pub u_min: f64,
    pub u_max: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub k_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub a_points: usize,
    pub a_max: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let c = ContourSpec::default();
        Self {
            k_min: K_MIN,
            lambda_max: c.lambda_max,
            lambda_points: c.lambda_points,
            a_points: c.a_points,
            a_max: c.a_max,
        }
    }
}

impl SweepSpec {
    pub fn contour(&self) -> ContourSpec {
        ContourSpec {
            a_points: self.a_points,
            a_max: self.a_max,
            lambda_points: self.lambda_points,
            lambda_max: self.lambda_max,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub unitarity: f64,
    pub winding: f64,
    pub time_delay: f64,
    pub structure_residual: f64,
    pub singular_ratio: f64,
    pub t_cross_check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-8,
            winding: 1e-2,
            time_delay: 5e-3,
            structure_residual: 1e-3,
            singular_ratio: 1e-3,
            t_cross_check: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureSpec {
    pub k_band: f64,
    pub test_functions: usize,
    pub kernel_dump: bool,
}

impl Default for StructureSpec {
    fn default() -> Self {
        Self { k_band: 20.0, test_functions: 20, kernel_dump: true }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub alpha: f64,
    #[serde(default = "default_k_points")]
    pub k_points: usize,
    #[serde(default = "default_k_max")]
    pub k_max: f64,
}

fn default_k_points() -> usize {
    200
}

fn default_k_max() -> f64 {
    10.0
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be positive and finite, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be at least {min}, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(PotentialSpec::CustomSamples { csv: Some(p), .. }) = &mut cfg.potential {
            if p.is_relative() {
                *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        at_least("grid.n", self.grid.n, 16)?;
        positive("grid.x_max", self.grid.x_max)?;
        if let Some(l) = self.grid.log {
            at_least("grid.log.m", l.m, 16)?;
            if !(l.u_min < l.u_max) {
                return Err(CliError::Config("`grid.log.u_min` must be below `grid.log.u_max`".into()));
            }
        }
        let s = &self.sweep;
        positive("sweep.k_min", s.k_min)?;
        positive("sweep.lambda_max", s.lambda_max)?;
        positive("sweep.a_max", s.a_max)?;
        at_least("sweep.lambda_points", s.lambda_points, 2)?;
        at_least("sweep.a_points", s.a_points, 2)?;
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.unitarity", t.unitarity),
            ("tolerances.winding", t.winding),
            ("tolerances.time_delay", t.time_delay),
            ("tolerances.structure_residual", t.structure_residual),
            ("tolerances.singular_ratio", t.singular_ratio),
            ("tolerances.t_cross_check", t.t_cross_check),
        ] {
            positive(name, v)?;
        }
        positive("structure.k_band", self.structure.k_band)?;
        if let Some(a) = &self.asymptotics {
            at_least("asymptotics.n", a.n, 16)?;
            positive("asymptotics.x_max", a.x_max)?;
        }
        if let Some(p) = &self.point {
            at_least("point.k_points", p.k_points, 2)?;
            positive("point.k_max", p.k_max)?;
        }
        Ok(())
    }

    pub fn line_grid(&self) -> Result<LineGrid, CliError> {
        Ok(LineGrid::new(self.grid.n, self.grid.x_max)?)
    }

    pub fn log_grid(&self) -> Result<Option<LogGrid>, CliError> {
        Ok(match self.grid.log {
            Some(l) => Some(LogGrid::new(l.m, l.u_min, l.u_max)?),
            None => None,
        })
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let spec = self.potential.as_ref().ok_or_else(|| CliError::Config("missing [potential] section".into()))?;
        Ok(Model::Sampled(match spec {
            PotentialSpec::Point { alpha } => {
                if alpha.is_nan() {
                    return Err(CliError::Config("`potential.alpha` must be a number".into()));
                }
                return Ok(Model::Point(*alpha));
            }
            PotentialSpec::Zero => Potential::zero(),
            PotentialSpec::SquareWell { depth, width } => Potential::square_well(*depth, *width)?,
            PotentialSpec::GaussianWell { depth, width } => Potential::gaussian_well(*depth, *width)?,
            PotentialSpec::PoschlTeller { depth, width } => Potential::poschl_teller(*depth, *width)?,
            PotentialSpec::DeltaRegularized { alpha, sigma } => Potential::delta_regularized(*alpha, *sigma)?,
            PotentialSpec::CustomSamples { samples, csv } => match (samples, csv) {
                (Some(s), None) => Potential::custom_samples(s.clone())?,
                (None, Some(p)) => Potential::custom_samples(read_samples(p)?)?,
                _ => {
                    return Err(CliError::Config(
                        "custom_samples needs exactly one of `samples` and `csv`".into(),
                    ))
                }
            },
        }))
    }

    pub fn build_potential(&self) -> Result<Potential, CliError> {
        match self.model()? {
            Model::Sampled(v) => Ok(v),
            Model::Point(_) => {
                Err(CliError::Config("the point interaction has no samples; use `levinson`, `smatrix` or `point`".into()))
            }
        }
    }
}

pub enum Model {
    Sampled(Potential),
    Point(f64),
}

#[derive(Deserialize)]
struct SampleRow {
    x: f64,
    v: f64,
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    rdr.deserialize::<SampleRow>()
        .map(|r| r.map(|r| (r.x, r.v)).map_err(|e| CliError::Config(format!("{}: {e}", path.display()))))
        .collect()
}
