use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use faer::Mat;
use num_complex::Complex64 as C64;
use scatlev::grid::LineGrid;
use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const KERNEL_MAGIC: &[u8; 8] = b"SCLVKERN";
pub const KERNEL_FORMAT: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct GridMeta {
    pub n: usize,
    pub x_max: f64,
    pub h: f64,
    pub dk: f64,
    pub k_max: f64,
}

impl GridMeta {
    pub fn of(g: &LineGrid) -> Self {
        Self { n: g.n(), x_max: g.x_max(), h: g.h(), dk: g.dk(), k_max: g.k_max() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub grid: GridMeta,
    pub seed: u64,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

pub struct Sink {
    dir: PathBuf,
    pub meta: Meta,
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Sink {
    pub fn new(dir: PathBuf, meta: Meta) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
        Ok(Self { dir, meta })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(&Envelope { meta: &self.meta, body })
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
        Ok(path)
    }

    /// CSV with `#` comment lines carrying the metadata ahead of the header.
    pub fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| io(&path, e))?;
        let mut out = BufWriter::new(file);
        let g = &self.meta.grid;
        writeln!(out, "# {} {} {}", self.meta.artifact, self.meta.version, self.meta.command)
            .and_then(|_| writeln!(out, "# grid n={} x_max={} h={} dk={}", g.n, g.x_max, g.h, g.dk))
            .and_then(|_| writeln!(out, "# seed={}", self.meta.seed))
            .map_err(|e| io(&path, e))?;
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(fail)?;
        for r in rows {
            w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(fail)?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        Ok(path)
    }

    /// Kernel samples in the layout described in the README.
    pub fn kernel(&self, name: &str, grid: &LineGrid, momenta: &[f64], kernel: &Mat<C64>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| io(&path, e))?;
        let mut out = BufWriter::new(file);
        let (rows, cols) = (kernel.nrows(), kernel.ncols());
        let mut buf = Vec::with_capacity(48 + 8 * (cols + 2 * rows * cols));
        buf.extend_from_slice(KERNEL_MAGIC);
        buf.extend_from_slice(&KERNEL_FORMAT.to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        buf.extend_from_slice(&(rows as u64).to_le_bytes());
        buf.extend_from_slice(&(cols as u64).to_le_bytes());
        buf.extend_from_slice(&(grid.n() as u64).to_le_bytes());
        buf.extend_from_slice(&grid.x_max().to_le_bytes());
        for k in momenta {
            buf.extend_from_slice(&k.to_le_bytes());
        }
        for i in 0..rows {
            for j in 0..cols {
                let z = kernel[(i, j)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out.write_all(&buf).and_then(|_| out.flush()).map_err(|e| io(&path, e))?;
        Ok(path)
    }
}
