//! Dense gradient-based optical flow on gaze-region patches.
//!
//! Spatial gradients come from the 3×3 Sobel pair applied to the smoothed
//! previous patch, the temporal gradient from the patch difference. The
//! velocity update is the brightness-constancy projection
//!
//! ```text
//! u = ū - Ex (Ex ū + Ey v̄ + Et) / (α² + Ex² + Ey²)
//! v = v̄ - Ey (Ex ū + Ey v̄ + Et) / (α² + Ex² + Ey²)
//! ```
//!
//! where `(ū, v̄)` is either the previous frame's flow ([`FlowMode::LiteralRecursion`],
//! one update per frame) or the 4-neighbour average of the current estimate
//! ([`FlowMode::IterativeRelaxation`], classic Horn–Schunck sweeps warm-started
//! from the previous frame).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Horizontal Sobel kernel, applied as a true convolution so `ex` is the
/// positive x-derivative (scaled by 8).
pub const SOBEL_X: [[f64; 3]; 3] = [[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]];
/// Vertical Sobel kernel; with y pointing down, `ey` is the positive y-derivative.
pub const SOBEL_Y: [[f64; 3]; 3] = [[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    /// One update per frame seeded by the previous frame's velocity.
    #[default]
    LiteralRecursion,
    /// `iterations` neighbourhood-average sweeps per frame.
    IterativeRelaxation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub alpha: f64,
    pub iterations: usize,
    pub gaussian_sigma: f64,
    pub mode: FlowMode,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            alpha: 1.0,
            iterations: 8,
            gaussian_sigma: 1.0,
            mode: FlowMode::LiteralRecursion,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "gaussian_sigma must be >= 0, got {}",
                self.gaussian_sigma
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientPlanes {
    pub ex: Plane<f64>,
    pub ey: Plane<f64>,
    pub et: Plane<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowField {
    pub u: Plane<f64>,
    pub v: Plane<f64>,
    pub magnitude: Plane<f64>,
    /// `atan2(u, v)` folded into `[0, 2π)`; meaningless where magnitude is 0.
    pub orientation: Plane<f64>,
}

impl FlowField {
    pub fn zeros(width: usize, height: usize) -> Self {
        let z = Plane::filled(width, height, 0.0);
        FlowField {
            u: z.clone(),
            v: z.clone(),
            magnitude: z.clone(),
            orientation: z,
        }
    }

    pub fn from_uv(u: Plane<f64>, v: Plane<f64>) -> Self {
        assert!(u.same_shape(&v));
        let (w, h) = (u.width(), u.height());
        let mut magnitude = Vec::with_capacity(u.len());
        let mut orientation = Vec::with_capacity(u.len());
        for (&a, &b) in u.as_slice().iter().zip(v.as_slice()) {
            magnitude.push(a.hypot(b));
            orientation.push(orientation_of(a, b));
        }
        FlowField {
            u,
            v,
            magnitude: Plane::from_vec(w, h, magnitude),
            orientation: Plane::from_vec(w, h, orientation),
        }
    }

    pub fn width(&self) -> usize {
        self.u.width()
    }

    pub fn height(&self) -> usize {
        self.u.height()
    }
}

/// Full-circle angle of a flow vector, argument order `(u, v)`.
pub fn orientation_of(u: f64, v: f64) -> f64 {
    let a = u.atan2(v).rem_euclid(TAU);
    // rem_euclid can round a tiny negative angle up to exactly 2π
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Discrete Gaussian taps for offsets `-r..=r`, `r = ceil(3σ)`, normalised to sum 1.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur with replicated borders. `sigma == 0` is the identity.
pub fn smooth(patch: &Plane<f64>, sigma: f64) -> Plane<f64> {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return patch.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (patch.width(), patch.height());
    let horizontal = Plane::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, k)| k * patch.get_clamped(x as isize + i as isize - r, y as isize))
            .sum::<f64>()
    });
    Plane::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, k)| k * horizontal.get_clamped(x as isize, y as isize + i as isize - r))
            .sum::<f64>()
    })
}

/// 3×3 convolution (kernel flipped) with replicated borders.
pub fn convolve3(image: &Plane<f64>, kernel: &[[f64; 3]; 3]) -> Plane<f64> {
    Plane::from_fn(image.width(), image.height(), |x, y| {
        let mut acc = 0.0;
        for (j, row) in kernel.iter().enumerate() {
            for (i, k) in row.iter().enumerate() {
                if *k != 0.0 {
                    let sx = x as isize + 1 - i as isize;
                    let sy = y as isize + 1 - j as isize;
                    acc += k * image.get_clamped(sx, sy);
                }
            }
        }
        acc
    })
}

/// Spatial gradients of the previous (smoothed) patch and the temporal difference.
pub fn gradients(prev_smoothed: &Plane<f64>, curr: &Plane<f64>) -> GradientPlanes {
    assert!(prev_smoothed.same_shape(curr));
    let et = Plane::from_vec(
        curr.width(),
        curr.height(),
        curr.as_slice()
            .iter()
            .zip(prev_smoothed.as_slice())
            .map(|(c, p)| c - p)
            .collect(),
    );
    GradientPlanes {
        ex: convolve3(prev_smoothed, &SOBEL_X),
        ey: convolve3(prev_smoothed, &SOBEL_Y),
        et,
    }
}

/// Advances the flow by one frame.
pub fn flow_step(grads: &GradientPlanes, seed: &FlowField, cfg: &FlowConfig) -> FlowField {
    match cfg.mode {
        FlowMode::LiteralRecursion => {
            let (u, v) = project(grads, &seed.u, &seed.v, cfg.alpha);
            FlowField::from_uv(u, v)
        }
        FlowMode::IterativeRelaxation => relax(grads, seed, cfg).0,
    }
}

/// Runs relaxation sweeps and reports the mean absolute update of each sweep.
pub fn relax(grads: &GradientPlanes, seed: &FlowField, cfg: &FlowConfig) -> (FlowField, Vec<f64>) {
    let mut u = seed.u.clone();
    let mut v = seed.v.clone();
    let mut updates = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let (nu, nv) = project(grads, &neighbour_mean(&u), &neighbour_mean(&v), cfg.alpha);
        let delta: f64 = nu
            .as_slice()
            .iter()
            .zip(u.as_slice())
            .chain(nv.as_slice().iter().zip(v.as_slice()))
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / (2 * u.len()) as f64;
        updates.push(delta);
        u = nu;
        v = nv;
    }
    (FlowField::from_uv(u, v), updates)
}

fn project(
    grads: &GradientPlanes,
    base_u: &Plane<f64>,
    base_v: &Plane<f64>,
    alpha: f64,
) -> (Plane<f64>, Plane<f64>) {
    let a2 = alpha * alpha;
    let n = base_u.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let (ex, ey, et) = (grads.ex.as_slice(), grads.ey.as_slice(), grads.et.as_slice());
    for i in 0..n {
        let (bu, bv) = (base_u.as_slice()[i], base_v.as_slice()[i]);
        let residual = ex[i] * bu + ey[i] * bv + et[i];
        let denom = a2 + ex[i] * ex[i] + ey[i] * ey[i];
        u.push(bu - ex[i] * residual / denom);
        v.push(bv - ey[i] * residual / denom);
    }
    let (w, h) = (base_u.width(), base_u.height());
    (Plane::from_vec(w, h, u), Plane::from_vec(w, h, v))
}

fn neighbour_mean(p: &Plane<f64>) -> Plane<f64> {
    Plane::from_fn(p.width(), p.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        0.25 * (p.get_clamped(x - 1, y)
            + p.get_clamped(x + 1, y)
            + p.get_clamped(x, y - 1)
            + p.get_clamped(x, y + 1))
    })
}
