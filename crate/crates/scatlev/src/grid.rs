//! Spatial and logarithmic grids with their unitary transforms.
//!
//! The line grid samples `[-x_max, x_max)` at `x_j = -x_max + j h`. Its
//! momentum grid is shifted by half a cell, `k_m = (m - n/2 + 1/2) dk`, so
//! `k = 0` is never sampled and plane waves are exactly antiperiodic on the
//! box. Norms are weighted: `h` in position space, `dk` in momentum space.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{contract, Result};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone)]
pub struct LineGrid {
    n: usize,
    x_max: f64,
    h: f64,
    dk: f64,
    pre: Arc<Vec<C64>>,
    post: Arc<Vec<C64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LineGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineGrid")
            .field("n", &self.n)
            .field("x_max", &self.x_max)
            .finish()
    }
}

impl PartialEq for LineGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.x_max == other.x_max
    }
}

impl LineGrid {
    pub fn new(n: usize, x_max: f64) -> Result<Self> {
        contract(n >= 16 && n.is_power_of_two(), || {
            format!("grid size {n} must be a power of two >= 16")
        })?;
        contract(x_max.is_finite() && x_max > 0.0, || {
            format!("x_max = {x_max} must be positive")
        })?;
        let h = 2.0 * x_max / n as f64;
        let dk = PI / x_max;
        let nf = n as f64;
        let pre = (0..n)
            .map(|j| C64::from_polar(1.0, PI * j as f64 * (1.0 - 1.0 / nf)))
            .collect();
        let post = (0..n)
            .map(|m| C64::from_polar(1.0, PI * (m as f64 - nf / 2.0 + 0.5)))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            x_max,
            h,
            dk,
            pre: Arc::new(pre),
            post: Arc::new(post),
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn dk(&self) -> f64 {
        self.dk
    }
    pub fn k_max(&self) -> f64 {
        PI / self.h
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.x_max + j as f64 * self.h
    }
    pub fn k(&self, m: usize) -> f64 {
        (m as f64 - self.n as f64 / 2.0 + 0.5) * self.dk
    }
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.k(m)).collect()
    }
    /// Index of the grid point `x = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }
    /// Index of the momentum `-k_m`.
    pub fn mirror_k(&self, m: usize) -> usize {
        self.n - 1 - m
    }

    /// Same box, `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n * factor, self.x_max)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        contract(len == self.n, || {
            format!("vector length {len} does not match grid size {}", self.n)
        })
    }

    pub fn fourier(&self, f: &[C64], dir: Direction) -> Result<Vec<C64>> {
        self.check_len(f.len())?;
        let mut buf = f.to_vec();
        self.fourier_in_place(&mut buf, dir);
        Ok(buf)
    }

    /// Unchecked in-place transform; `buf.len()` must equal `n`.
    pub fn fourier_in_place(&self, buf: &mut [C64], dir: Direction) {
        match dir {
            Direction::Forward => {
                let s = self.h * INV_SQRT_2PI;
                for (v, p) in buf.iter_mut().zip(self.pre.iter()) {
                    *v *= p;
                }
                self.fwd.process(buf);
                for (v, p) in buf.iter_mut().zip(self.post.iter()) {
                    *v *= p * s;
                }
            }
            Direction::Inverse => {
                let s = self.dk * INV_SQRT_2PI;
                for (v, p) in buf.iter_mut().zip(self.post.iter()) {
                    *v *= p.conj();
                }
                self.inv.process(buf);
                for (v, p) in buf.iter_mut().zip(self.pre.iter()) {
                    *v *= p.conj() * s;
                }
            }
        }
    }

    pub fn norm_x(&self, f: &[C64]) -> f64 {
        (self.h * f.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
    pub fn norm_k(&self, f: &[C64]) -> f64 {
        (self.dk * f.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
    pub fn inner_x(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() * self.h
    }

    /// Plane wave `e^{i k_m x}` sampled on the grid.
    pub fn plane_wave(&self, m: usize) -> Vec<C64> {
        let k = self.k(m);
        (0..self.n).map(|j| C64::from_polar(1.0, k * self.x(j))).collect()
    }

    /// Reflection `f(x) -> f(-x)`, realized so that `e^{ikx} -> e^{-ikx}`
    /// exactly; the unpaired point `-x_max` uses the antiperiodic image.
    pub fn reflect(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f.len())?;
        let n = self.n;
        Ok((0..n).map(|j| if j == 0 { -f[0] } else { f[n - j] }).collect())
    }

    pub fn parity_split(&self, f: &[C64]) -> Result<ParityVector> {
        self.check_len(f.len())?;
        let n = self.n;
        let half = n / 2;
        let mut even = Vec::with_capacity(half + 1);
        let mut odd = Vec::with_capacity(half + 1);
        for i in 0..=half {
            let plus = if i < half { f[half + i] } else { -f[0] };
            let minus = f[half - i];
            even.push((plus + minus) / SQRT_2);
            odd.push((plus - minus) / SQRT_2);
        }
        Ok(ParityVector { even, odd })
    }

    pub fn parity_join(&self, p: &ParityVector) -> Result<Vec<C64>> {
        let half = self.n / 2;
        contract(p.even.len() == half + 1 && p.odd.len() == half + 1, || {
            format!(
                "parity vector lengths ({}, {}) do not match half-grid size {}",
                p.even.len(),
                p.odd.len(),
                half + 1
            )
        })?;
        let mut f = vec![C64::new(0.0, 0.0); self.n];
        for i in 0..half {
            f[half + i] = (p.even[i] + p.odd[i]) / SQRT_2;
        }
        for i in 1..=half {
            f[half - i] = (p.even[i] - p.odd[i]) / SQRT_2;
        }
        Ok(f)
    }

    /// Band-limited interpolant of `f`, evaluated through an upsampled copy.
    pub fn interpolant(&self, f: &[C64], factor: usize) -> Result<BandInterp> {
        self.check_len(f.len())?;
        let fine = self.refined(factor)?;
        let mut spec = f.to_vec();
        self.fourier_in_place(&mut spec, Direction::Forward);
        let offset = (fine.n - self.n) / 2;
        let mut buf = vec![C64::new(0.0, 0.0); fine.n];
        buf[offset..offset + self.n].copy_from_slice(&spec);
        fine.fourier_in_place(&mut buf, Direction::Inverse);
        Ok(BandInterp {
            values: buf,
            x0: -self.x_max,
            step: fine.h,
        })
    }
}

/// Half-line storage of the even and odd parts, each scaled by `sqrt 2` so
/// that the split is unitary. Index `i` corresponds to `x = i h`,
/// `i = 0..=n/2`; the odd part vanishes at `x = 0` and the even part at
/// `x = x_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityVector {
    pub even: Vec<C64>,
    pub odd: Vec<C64>,
}

impl ParityVector {
    /// Trapezoid norm on the half line; equals the line-grid norm.
    pub fn norm(&self, h: f64) -> f64 {
        let last = self.even.len() - 1;
        let mut s = 0.0;
        for (i, (e, o)) in self.even.iter().zip(&self.odd).enumerate() {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            s += w * (e.norm_sqr() + o.norm_sqr());
        }
        (h * s).sqrt()
    }
}

const STENCIL: usize = 8;

/// Local Lagrange interpolation on a uniformly resampled, antiperiodically
/// continued copy of a grid function.
#[derive(Clone, Debug)]
pub struct BandInterp {
    values: Vec<C64>,
    x0: f64,
    step: f64,
}

impl BandInterp {
    fn sample(&self, idx: isize) -> C64 {
        let n = self.values.len() as isize;
        let wraps = idx.div_euclid(n);
        let v = self.values[idx.rem_euclid(n) as usize];
        if wraps % 2 == 0 {
            v
        } else {
            -v
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        debug_assert!(x.is_finite());
        let t = (x - self.x0) / self.step;
        let base = t.floor() as isize - (STENCIL as isize / 2 - 1);
        let frac = t - base as f64;
        if (t - t.round()).abs() < 1e-12 {
            return self.sample(t.round() as isize);
        }
        let w = lagrange_weights(frac);
        let mut acc = C64::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            acc += self.sample(base + i as isize) * wi;
        }
        acc
    }
}

/// Weights for nodes `0..STENCIL` evaluated at position `t` (in node units).
fn lagrange_weights(t: f64) -> [f64; STENCIL] {
    let mut w = [0.0; STENCIL];
    for (i, wi) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for j in 0..STENCIL {
            if j != i {
                p *= (t - j as f64) / (i as f64 - j as f64);
            }
        }
        *wi = p;
    }
    w
}

/// Uniform grid in `u = ln x`, periodic in `u`.
#[derive(Clone)]
pub struct LogGrid {
    m: usize,
    u_min: f64,
    u_max: f64,
    du: f64,
    ds: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LogGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogGrid")
            .field("m", &self.m)
            .field("u_min", &self.u_min)
            .field("u_max", &self.u_max)
            .finish()
    }
}

impl LogGrid {
    pub fn new(m: usize, u_min: f64, u_max: f64) -> Result<Self> {
        contract(m >= 16 && m % 2 == 0, || format!("log grid size {m} must be even and >= 16"))?;
        contract(u_max > u_min && u_min.is_finite() && u_max.is_finite(), || {
            format!("log bounds [{u_min}, {u_max}] must be increasing")
        })?;
        let du = (u_max - u_min) / m as f64;
        let ds = 2.0 * PI / (m as f64 * du);
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            u_min,
            u_max,
            du,
            ds,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn u_min(&self) -> f64 {
        self.u_min
    }
    pub fn u_max(&self) -> f64 {
        self.u_max
    }
    pub fn du(&self) -> f64 {
        self.du
    }
    pub fn ds(&self) -> f64 {
        self.ds
    }
    pub fn u(&self, i: usize) -> f64 {
        self.u_min + i as f64 * self.du
    }
    pub fn point(&self, i: usize) -> f64 {
        self.u(i).exp()
    }
    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.point(i)).collect()
    }
    /// Dual (dilation) variable `s_l`.
    pub fn s(&self, l: usize) -> f64 {
        (l as f64 - self.m as f64 / 2.0) * self.ds
    }
    pub fn duals(&self) -> Vec<f64> {
        (0..self.m).map(|l| self.s(l)).collect()
    }
    pub fn s_max(&self) -> f64 {
        self.m as f64 / 2.0 * self.ds
    }

    /// Mellin transform of half-line samples `g(e^{u_i})`.
    ///
    /// Forward: `g^(s) = (2 pi)^{-1/2} \int e^{-isu} e^{u/2} g(e^u) du`, so the
    /// dilation generator acts as multiplication by `s`.
    pub fn mellin(&self, g: &[C64], dir: Direction) -> Result<Vec<C64>> {
        contract(g.len() == self.m, || {
            format!("vector length {} does not match log grid size {}", g.len(), self.m)
        })?;
        let mut buf = g.to_vec();
        match dir {
            Direction::Forward => {
                for (i, v) in buf.iter_mut().enumerate() {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    *v *= sign * (0.5 * self.u(i)).exp();
                }
                self.fwd.process(&mut buf);
                let s = self.du * INV_SQRT_2PI;
                for (l, v) in buf.iter_mut().enumerate() {
                    *v *= C64::from_polar(s, -self.s(l) * self.u_min);
                }
            }
            Direction::Inverse => {
                let s = self.ds * INV_SQRT_2PI;
                for (l, v) in buf.iter_mut().enumerate() {
                    *v *= C64::from_polar(s, self.s(l) * self.u_min);
                }
                self.inv.process(&mut buf);
                for (i, v) in buf.iter_mut().enumerate() {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    *v *= sign * (-0.5 * self.u(i)).exp();
                }
            }
        }
        Ok(buf)
    }

    /// Norm of dual-side samples.
    pub fn norm_s(&self, f: &[C64]) -> f64 {
        (self.ds * f.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Norm in `L^2(R_+, dx)` of samples `g(e^{u_i})`.
    pub fn norm_half_line(&self, g: &[C64]) -> f64 {
        let s: f64 = g
            .iter()
            .enumerate()
            .map(|(i, z)| z.norm_sqr() * self.u(i).exp())
            .sum();
        (self.du * s).sqrt()
    }

    /// Interpolant in `u` of `h(u) = e^{u/2} g(e^u)` given its transform.
    pub fn u_interpolant(&self, spec: &[C64], factor: usize) -> UInterp {
        let mf = self.m * factor;
        let du = self.du / factor as f64;
        let offset = (mf - self.m) / 2;
        let s = self.ds * INV_SQRT_2PI;
        let mut buf = vec![C64::new(0.0, 0.0); mf];
        for (l, v) in spec.iter().enumerate() {
            buf[offset + l] = v * C64::from_polar(s, self.s(l) * self.u_min);
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(mf).process(&mut buf);
        for v in buf.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
        UInterp { values: buf, u0: self.u_min, step: du }
    }
}

/// Periodic local interpolation in the logarithmic variable.
#[derive(Clone, Debug)]
pub struct UInterp {
    values: Vec<C64>,
    u0: f64,
    step: f64,
}

impl UInterp {
    pub fn eval(&self, u: f64) -> C64 {
        let n = self.values.len() as isize;
        let t = (u - self.u0) / self.step;
        let base = t.floor() as isize - (STENCIL as isize / 2 - 1);
        let frac = t - base as f64;
        let w = lagrange_weights(frac);
        let mut acc = C64::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            acc += self.values[(base + i as isize).rem_euclid(n) as usize] * wi;
        }
        acc
    }
}
