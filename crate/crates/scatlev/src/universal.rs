//! Potential-independent operators: the symbols of `R(A)`, the Hilbert
//! transform, the operator `T` in its Fourier and Mellin realizations, and
//! functional calculus of `H0 = -d^2/dx^2` and of the dilation generator `A`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{contract, Result};
use crate::grid::{Direction, LineGrid, LogGrid, ParityVector};

/// `(r_even(s), r_odd(s)) = -tanh(pi s) -/+ i sech(pi s)`.
pub fn r_pair(s: f64) -> (C64, C64) {
    let th = -(PI * s).tanh();
    let sech = 1.0 / (PI * s).cosh();
    (C64::new(th, -sech), C64::new(th, sech))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolPair {
    pub s: Vec<f64>,
    pub r_even: Vec<C64>,
    pub r_odd: Vec<C64>,
}

pub fn r_symbols(s: &[f64]) -> SymbolPair {
    let (r_even, r_odd) = s.iter().map(|&x| r_pair(x)).unzip();
    SymbolPair { s: s.to_vec(), r_even, r_odd }
}

/// Spectral cut used for indicator functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cut {
    AtMost(f64),
    Above(f64),
    AtLeast(f64),
    Below(f64),
}

impl Cut {
    pub fn indicator(self, v: f64) -> f64 {
        let inside = match self {
            Cut::AtMost(c) => v <= c,
            Cut::Above(c) => v > c,
            Cut::AtLeast(c) => v >= c,
            Cut::Below(c) => v < c,
        };
        if inside { 1.0 } else { 0.0 }
    }
}

/// `sign(x_j)`, with `sign(0) = 0`.
pub fn sign_x(grid: &LineGrid, j: usize) -> f64 {
    match j.cmp(&grid.origin()) {
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => 1.0,
    }
}

pub fn apply_sigma(grid: &LineGrid, f: &[C64]) -> Vec<C64> {
    f.iter().enumerate().map(|(j, v)| v * sign_x(grid, j)).collect()
}

/// Multiplication by `phi(k_m)` in the momentum basis.
pub fn fourier_multiplier(
    grid: &LineGrid,
    f: &[C64],
    phi: impl Fn(f64) -> C64,
) -> Result<Vec<C64>> {
    let mut buf = grid.fourier(f, Direction::Forward)?;
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= phi(grid.k(m));
    }
    grid.fourier_in_place(&mut buf, Direction::Inverse);
    Ok(buf)
}

/// Hilbert transform, `-i sign(k)` in momentum space.
pub fn hilbert_transform(grid: &LineGrid, f: &[C64]) -> Result<Vec<C64>> {
    fourier_multiplier(grid, f, |k| C64::new(0.0, -k.signum()))
}

/// `T f = (f + i sigma H f) / 2`.
pub fn apply_t_fourier(grid: &LineGrid, f: &[C64]) -> Result<Vec<C64>> {
    let hf = hilbert_transform(grid, f)?;
    let i = C64::new(0.0, 1.0);
    Ok(f.iter()
        .zip(&hf)
        .enumerate()
        .map(|(j, (a, b))| 0.5 * (a + i * sign_x(grid, j) * b))
        .collect())
}

/// `T* f = (f + i H sigma f) / 2`.
pub fn apply_t_fourier_adjoint(grid: &LineGrid, f: &[C64]) -> Result<Vec<C64>> {
    let hsf = hilbert_transform(grid, &apply_sigma(grid, f))?;
    let i = C64::new(0.0, 1.0);
    Ok(f.iter().zip(&hsf).map(|(a, b)| 0.5 * (a + i * b)).collect())
}

/// `phi(H0)` with `phi` a function of the energy `k^2`.
pub fn function_of_h0(grid: &LineGrid, f: &[C64], phi: impl Fn(f64) -> C64) -> Result<Vec<C64>> {
    fourier_multiplier(grid, f, |k| phi(k * k))
}

pub fn indicator_h0(grid: &LineGrid, f: &[C64], cut: Cut) -> Result<Vec<C64>> {
    function_of_h0(grid, f, |e| C64::new(cut.indicator(e), 0.0))
}

/// `e^{iBt}` with `B = ln(H0) / 2`, i.e. multiplication by `|k|^{it}`.
pub fn dilation_conjugator(grid: &LineGrid, f: &[C64], t: f64) -> Result<Vec<C64>> {
    fourier_multiplier(grid, f, |k| C64::from_polar(1.0, t * k.abs().ln()))
}

/// Mellin-side spectra of the even and odd half-line parts.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinParity {
    pub even: Vec<C64>,
    pub odd: Vec<C64>,
}

/// Passage between line samples and the Mellin-parity basis in which
/// functions of `A` are diagonal.
#[derive(Clone, Debug)]
pub struct MellinBridge {
    grid: LineGrid,
    log: LogGrid,
    factor: usize,
}

impl MellinBridge {
    pub fn new(grid: &LineGrid, log: &LogGrid) -> Result<Self> {
        contract(log.u_max().exp() >= grid.x_max(), || {
            format!(
                "log grid ends at {} before the line grid edge {}",
                log.u_max().exp(),
                grid.x_max()
            )
        })?;
        Ok(Self { grid: grid.clone(), log: log.clone(), factor: 8 })
    }

    /// Log grid covering `[e^{-24}, e x_max]` with `max(4n, 8192)` points.
    pub fn default_log(grid: &LineGrid) -> Result<LogGrid> {
        LogGrid::new((4 * grid.n()).max(8192), -24.0, grid.x_max().ln() + 1.0)
    }

    pub fn with_default_log(grid: &LineGrid) -> Result<Self> {
        Self::new(grid, &Self::default_log(grid)?)
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }
    pub fn log(&self) -> &LogGrid {
        &self.log
    }

    pub fn to_mellin(&self, f: &[C64]) -> Result<MellinParity> {
        let interp = self.grid.interpolant(f, self.factor)?;
        let m = self.log.m();
        let l = self.grid.x_max();
        let mut even = vec![C64::new(0.0, 0.0); m];
        let mut odd = vec![C64::new(0.0, 0.0); m];
        for i in 0..m {
            let x = self.log.point(i);
            if x < l {
                let (p, q) = (interp.eval(x), interp.eval(-x));
                even[i] = (p + q) * std::f64::consts::FRAC_1_SQRT_2;
                odd[i] = (p - q) * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        Ok(MellinParity {
            even: self.log.mellin(&even, Direction::Forward)?,
            odd: self.log.mellin(&odd, Direction::Forward)?,
        })
    }

    pub fn from_mellin(&self, mp: &MellinParity) -> Result<Vec<C64>> {
        let m = self.log.m();
        contract(mp.even.len() == m && mp.odd.len() == m, || {
            format!("Mellin spectra must have length {m}")
        })?;
        let half = self.grid.n() / 2;
        let h = self.grid.h();
        let ie = self.log.u_interpolant(&mp.even, self.factor);
        let io = self.log.u_interpolant(&mp.odd, self.factor);
        let (u_lo, u_hi) = (self.log.u_min(), self.log.u_max());
        let at = |interp: &crate::grid::UInterp, x: f64| {
            let u = x.ln();
            if (u_lo..u_hi).contains(&u) {
                interp.eval(u) / x.sqrt()
            } else {
                C64::new(0.0, 0.0)
            }
        };
        let mut even = Vec::with_capacity(half + 1);
        let mut odd = Vec::with_capacity(half + 1);
        // the even part is flat near the origin
        even.push(at(&ie, (h / 64.0).max(u_lo.exp())));
        odd.push(C64::new(0.0, 0.0));
        for i in 1..=half {
            let x = i as f64 * h;
            even.push(if i == half { C64::new(0.0, 0.0) } else { at(&ie, x) });
            odd.push(at(&io, x));
        }
        self.grid.parity_join(&ParityVector { even, odd })
    }

    /// `phi_e(A) P_e + phi_o(A) P_o`.
    pub fn function_of_a(
        &self,
        f: &[C64],
        phi_even: impl Fn(f64) -> C64,
        phi_odd: impl Fn(f64) -> C64,
    ) -> Result<Vec<C64>> {
        let mut mp = self.to_mellin(f)?;
        for l in 0..self.log.m() {
            let s = self.log.s(l);
            mp.even[l] *= phi_even(s);
            mp.odd[l] *= phi_odd(s);
        }
        self.from_mellin(&mp)
    }

    pub fn indicator_a(&self, f: &[C64], cut: Cut) -> Result<Vec<C64>> {
        let phi = |s: f64| C64::new(cut.indicator(s), 0.0);
        self.function_of_a(f, phi, phi)
    }

    pub fn apply_r(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.function_of_a(f, |s| r_pair(s).0, |s| r_pair(s).1)
    }

    /// `T f = (1 - R(A)) f / 2`.
    pub fn apply_t_mellin(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.function_of_a(f, |s| 0.5 * (1.0 - r_pair(s).0), |s| 0.5 * (1.0 - r_pair(s).1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Position,
    Momentum,
    MellinParity,
}

/// Dense operator on grid samples.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub entries: Mat<C64>,
    pub basis: Basis,
    pub provenance: String,
}

impl OperatorMatrix {
    /// Matrix of a linear map, assembled from its action on unit vectors.
    pub fn from_map<F>(n: usize, basis: Basis, provenance: &str, map: F) -> Result<Self>
    where
        F: Fn(&[C64]) -> Result<Vec<C64>> + Sync,
    {
        let cols: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                map(&e)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            entries: Mat::from_fn(n, n, |i, j| cols[j][i]),
            basis,
            provenance: provenance.to_owned(),
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.norm_l2()
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let v = Mat::from_fn(f.len(), 1, |i, _| f[i]);
        let out = &self.entries * &v;
        (0..out.nrows()).map(|i| out[(i, 0)]).collect()
    }

    fn conjugate(&self, grid: &LineGrid, cols: Direction, rows: Direction, scale: f64) -> Result<Mat<C64>> {
        let n = self.n();
        contract(n == grid.n(), || format!("matrix size {n} does not match grid size {}", grid.n()))?;
        let mut a = self.entries.clone();
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                buf[i] = a[(i, j)];
            }
            grid.fourier_in_place(&mut buf, cols);
            for i in 0..n {
                a[(i, j)] = buf[i];
            }
        }
        for i in 0..n {
            for j in 0..n {
                buf[j] = a[(i, j)].conj();
            }
            grid.fourier_in_place(&mut buf, rows);
            for j in 0..n {
                a[(i, j)] = buf[j].conj() * scale;
            }
        }
        Ok(a)
    }

    /// `F M F^{-1}` for a position-basis matrix.
    pub fn to_momentum(&self, grid: &LineGrid) -> Result<Self> {
        contract(self.basis == Basis::Position, || "matrix is not in the position basis".into())?;
        let a = self.conjugate(grid, Direction::Forward, Direction::Forward, grid.dk() / grid.h())?;
        Ok(Self { entries: a, basis: Basis::Momentum, provenance: self.provenance.clone() })
    }

    /// `F^{-1} M F` for a momentum-basis matrix.
    pub fn to_position(&self, grid: &LineGrid) -> Result<Self> {
        contract(self.basis == Basis::Momentum, || "matrix is not in the momentum basis".into())?;
        let a = self.conjugate(grid, Direction::Inverse, Direction::Inverse, grid.h() / grid.dk())?;
        Ok(Self { entries: a, basis: Basis::Position, provenance: self.provenance.clone() })
    }
}

/// Seeded sums of three Gaussian packets, centred at `0.25 x_max <= |c| <= 0.4 x_max`
/// with carrier `4 <= |k0| <= 7`.
pub fn seeded_test_functions(grid: &LineGrid, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.x_max();
    (0..count)
        .map(|_| {
            let mut f = vec![C64::new(0.0, 0.0); grid.n()];
            for _ in 0..3 {
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let c = side * rng.random_range(0.25 * l..0.4 * l);
                let w = rng.random_range(1.5..2.0);
                let k0 = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(4.0..7.0);
                let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                for (j, v) in f.iter_mut().enumerate() {
                    let x = grid.x(j);
                    *v += a * C64::from_polar((-(x - c).powi(2) / (2.0 * w * w)).exp(), k0 * x);
                }
            }
            f
        })
        .collect()
}
