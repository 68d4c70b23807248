//! Potential catalog and weighted `L^1` norms.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    SquareWell,
    GaussianWell,
    PoschlTeller,
    DeltaRegularized,
    CustomSamples,
}

impl PotentialKind {
    pub fn tag(self) -> &'static str {
        match self {
            Self::SquareWell => "square_well",
            Self::GaussianWell => "gaussian_well",
            Self::PoschlTeller => "poschl_teller",
            Self::DeltaRegularized => "delta_regularized",
            Self::CustomSamples => "custom_samples",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "square_well" => Self::SquareWell,
            "gaussian_well" => Self::GaussianWell,
            "poschl_teller" => Self::PoschlTeller,
            "delta_regularized" => Self::DeltaRegularized,
            "custom_samples" => Self::CustomSamples,
            _ => return None,
        })
    }
}

/// Exponents at which weighted norms are cached.
pub const RHO_CACHE: [f64; 3] = [1.0, 2.0, 2.75];

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    depth: f64,
    width: f64,
    alpha: f64,
    sigma: f64,
    samples: Option<Arc<Vec<(f64, f64)>>>,
    rho_norms: [Option<f64>; 3],
}

/// Result of a weighted-norm evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedNorm {
    pub value: f64,
    pub tail_bound: f64,
}

impl Potential {
    fn build(kind: PotentialKind, depth: f64, width: f64, alpha: f64, sigma: f64) -> Self {
        let mut p = Self { kind, depth, width, alpha, sigma, samples: None, rho_norms: [None; 3] };
        p.cache_norms();
        p
    }

    fn cache_norms(&mut self) {
        let x = self.extent().max(1.0);
        let norms = RHO_CACHE.map(|rho| weighted_norm(self, rho, x).ok().map(|w| w.value + w.tail_bound));
        self.rho_norms = norms;
    }

    fn check_positive(name: &str, v: f64) -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::Contract(format!("{name} = {v} must be positive")))
        }
    }

    fn check_finite(name: &str, v: f64) -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::Contract(format!("{name} = {v} must be finite")))
        }
    }

    /// `V = -depth` on `|x| < width/2`.
    pub fn square_well(depth: f64, width: f64) -> Result<Self> {
        Self::check_finite("depth", depth)?;
        Self::check_positive("width", width)?;
        Ok(Self::build(PotentialKind::SquareWell, depth, width, 0.0, 0.0))
    }

    /// `V = -depth exp(-(x/width)^2)`; negative depth gives a barrier.
    pub fn gaussian_well(depth: f64, width: f64) -> Result<Self> {
        Self::check_finite("depth", depth)?;
        Self::check_positive("width", width)?;
        Ok(Self::build(PotentialKind::GaussianWell, depth, width, 0.0, 0.0))
    }

    /// `V = -depth sech^2(x/width)`.
    pub fn poschl_teller(depth: f64, width: f64) -> Result<Self> {
        Self::check_finite("depth", depth)?;
        Self::check_positive("width", width)?;
        Ok(Self::build(PotentialKind::PoschlTeller, depth, width, 0.0, 0.0))
    }

    /// Gaussian of unit mass and width `sigma`, scaled by `alpha`.
    pub fn delta_regularized(alpha: f64, sigma: f64) -> Result<Self> {
        Self::check_finite("alpha", alpha)?;
        Self::check_positive("sigma", sigma)?;
        Ok(Self::build(PotentialKind::DeltaRegularized, 0.0, 0.0, alpha, sigma))
    }

    /// Piecewise-linear interpolation of `(x, V)` samples, zero outside.
    pub fn custom_samples(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Contract("custom potential needs at least two samples".into()));
        }
        if samples.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::Contract("custom potential samples must be finite".into()));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Contract("custom potential abscissae must be distinct".into()));
        }
        let mut p = Self {
            kind: PotentialKind::CustomSamples,
            depth: 0.0,
            width: 0.0,
            alpha: 0.0,
            sigma: 0.0,
            samples: Some(Arc::new(samples)),
            rho_norms: [None; 3],
        };
        p.cache_norms();
        Ok(p)
    }

    pub fn zero() -> Self {
        Self::build(PotentialKind::GaussianWell, 0.0, 1.0, 0.0, 0.0)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }
    pub fn depth(&self) -> f64 {
        self.depth
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn samples(&self) -> Option<&[(f64, f64)]> {
        self.samples.as_deref().map(|v| v.as_slice())
    }

    /// Cached `\int <x>^rho |V|` for the exponents in [`RHO_CACHE`];
    /// `None` when the tail is not controlled.
    pub fn rho_norms(&self) -> [Option<f64>; 3] {
        self.rho_norms
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            PotentialKind::DeltaRegularized => self.alpha == 0.0,
            PotentialKind::CustomSamples => self.samples().unwrap().iter().all(|s| s.1 == 0.0),
            _ => self.depth == 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            PotentialKind::SquareWell => {
                if x.abs() < 0.5 * self.width {
                    -self.depth
                } else {
                    0.0
                }
            }
            PotentialKind::GaussianWell => -self.depth * (-(x / self.width).powi(2)).exp(),
            PotentialKind::PoschlTeller => {
                let c = (x / self.width).cosh();
                if c.is_finite() {
                    -self.depth / (c * c)
                } else {
                    0.0
                }
            }
            PotentialKind::DeltaRegularized => {
                let s = self.sigma;
                self.alpha * (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
            }
            PotentialKind::CustomSamples => {
                let s = self.samples().unwrap();
                if x < s[0].0 || x > s[s.len() - 1].0 {
                    return 0.0;
                }
                let i = s.partition_point(|p| p.0 <= x).clamp(1, s.len() - 1);
                let (x0, v0) = s[i - 1];
                let (x1, v1) = s[i];
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Points where `V` or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PotentialKind::SquareWell => vec![-0.5 * self.width, 0.5 * self.width],
            PotentialKind::CustomSamples => self.samples().unwrap().iter().map(|s| s.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Smallest length scale on which `V` varies.
    pub fn feature_scale(&self) -> f64 {
        match self.kind {
            PotentialKind::SquareWell
            | PotentialKind::GaussianWell
            | PotentialKind::PoschlTeller => self.width,
            PotentialKind::DeltaRegularized => self.sigma,
            PotentialKind::CustomSamples => {
                let s = self.samples().unwrap();
                s.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Half-width outside which `|V|` is below `1e-18` of its scale.
    pub fn extent(&self) -> f64 {
        let ln = (1e18f64).ln();
        match self.kind {
            PotentialKind::SquareWell => 0.5 * self.width,
            PotentialKind::GaussianWell => self.width * ln.sqrt(),
            PotentialKind::PoschlTeller => 0.5 * self.width * (4.0 * 1e18f64).ln(),
            PotentialKind::DeltaRegularized => self.sigma * (2.0 * ln).sqrt(),
            PotentialKind::CustomSamples => {
                let s = self.samples().unwrap();
                s.iter().map(|p| p.0.abs()).fold(0.0, f64::max)
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self.kind {
            PotentialKind::CustomSamples => {
                let s = self.samples().unwrap();
                let scale = s.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1e-300);
                s.iter().all(|&(x, v)| (self.eval(-x) - v).abs() <= 1e-12 * scale)
            }
            _ => true,
        }
    }

    /// Rescaled potential `e^{-2t} V(e^{-t} x)`.
    pub fn rescaled(&self, t: f64) -> Result<Self> {
        let a = (-t).exp();
        match self.kind {
            PotentialKind::SquareWell => Self::square_well(self.depth * a * a, self.width / a),
            PotentialKind::GaussianWell => Self::gaussian_well(self.depth * a * a, self.width / a),
            PotentialKind::PoschlTeller => Self::poschl_teller(self.depth * a * a, self.width / a),
            PotentialKind::DeltaRegularized => Self::delta_regularized(self.alpha * a, self.sigma / a),
            PotentialKind::CustomSamples => Self::custom_samples(
                self.samples().unwrap().iter().map(|&(x, v)| (x / a, v * a * a)).collect(),
            ),
        }
    }

    /// Upper bound for `\int_{|x|>X} <x>^rho |V|`, when known in closed form.
    fn tail_bound(&self, rho: f64, x: f64) -> Option<f64> {
        let x = x.max(1.0);
        let weight = (2.0 * x * x).powf(0.5 * rho);
        match self.kind {
            PotentialKind::SquareWell => (0.5 * self.width <= x).then_some(0.0),
            PotentialKind::GaussianWell | PotentialKind::DeltaRegularized => {
                let (amp, w) = if self.kind == PotentialKind::GaussianWell {
                    (self.depth.abs(), self.width)
                } else {
                    let s = self.sigma;
                    (self.alpha.abs() / (s * (2.0 * PI).sqrt()), s * 2f64.sqrt())
                };
                let denom = 2.0 * x / (w * w) - rho / x;
                (denom > 0.0).then(|| 2.0 * amp * weight * (-(x / w).powi(2)).exp() / denom)
            }
            PotentialKind::PoschlTeller => {
                let w = self.width;
                let denom = 2.0 / w - rho / x;
                (denom > 0.0)
                    .then(|| 2.0 * 4.0 * self.depth.abs() * weight * (-2.0 * x / w).exp() / denom)
            }
            PotentialKind::CustomSamples => {
                let s = self.samples().unwrap();
                let edge = s[0].1.abs().max(s[s.len() - 1].1.abs());
                (edge < 1e-10).then_some(0.0)
            }
        }
    }

    /// Power-law decay exponent of `|V|` fitted on the outer samples of a
    /// custom potential; `None` for cataloged kinds (which decay faster
    /// than any power) or when the tail vanishes.
    pub fn tail_exponent(&self) -> Option<f64> {
        let s = self.samples()?;
        let xmax = s.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
        let pts: Vec<(f64, f64)> = s
            .iter()
            .filter(|p| p.0.abs() >= 0.5 * xmax && p.0.abs() > 1.0 && p.1.abs() > 0.0)
            .map(|p| (p.0.abs().ln(), p.1.abs().ln()))
            .collect();
        let edge = s[0].1.abs().max(s[s.len() - 1].1.abs());
        if pts.len() < 4 || edge < 1e-10 {
            return None;
        }
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / n, sy / n);
        let (sxy, sxx) = pts
            .iter()
            .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
        Some(-sxy / sxx)
    }

    /// Refuses potentials outside `L^1_rho` for some `rho > 5/2`.
    pub fn check_decay_hypothesis(&self) -> Result<()> {
        if let Some(p) = self.tail_exponent() {
            if p <= 3.5 {
                return Err(Error::RhoHypothesis(format!(
                    "fitted tail |V| ~ |x|^-{p:.2} is not integrable against <x>^rho for any rho > 5/2"
                )));
            }
        }
        if self.kind == PotentialKind::CustomSamples && self.rho_norms[2].is_none() {
            return Err(Error::RhoHypothesis(
                "samples have not decayed at the edge, so the weighted norm for rho > 5/2 is uncontrolled"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// `\int_{-X}^{X} <x>^rho |V(x)| dx` by composite Gauss-Legendre quadrature,
/// plus a closed-form bound on the remaining tail.
pub fn weighted_norm(v: &Potential, rho: f64, x_max: f64) -> Result<WeightedNorm> {
    if !(rho >= 0.0) {
        return Err(Error::Contract(format!("rho = {rho} must be nonnegative")));
    }
    let tail = v.tail_bound(rho, x_max).ok_or_else(|| {
        let edge = v.eval(x_max).abs().max(v.eval(-x_max).abs());
        let edge = match v.samples() {
            Some(s) => s[0].1.abs().max(s[s.len() - 1].1.abs()).max(edge),
            None => edge,
        };
        Error::Divergent { rho, edge }
    })?;
    if v.is_zero() {
        return Ok(WeightedNorm { value: 0.0, tail_bound: 0.0 });
    }
    let mut cuts: Vec<f64> = v
        .breakpoints()
        .into_iter()
        .filter(|b| b.abs() < x_max)
        .chain([-x_max, x_max])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let panel = (v.feature_scale() / 16.0).min(0.05);
    let f = |x: f64| (1.0 + x * x).powf(0.5 * rho) * v.eval(x).abs();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let np = ((b - a) / panel).ceil().max(1.0) as usize;
        let hp = (b - a) / np as f64;
        for p in 0..np {
            total += gauss_legendre(&f, a + p as f64 * hp, a + (p + 1) as f64 * hp);
        }
    }
    Ok(WeightedNorm { value: total, tail_bound: tail })
}

const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W.iter()) {
        s += w * (f(c - r * x) + f(c + r * x));
    }
    s * r
}
