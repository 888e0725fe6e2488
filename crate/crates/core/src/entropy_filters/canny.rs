use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optical_flow::{convolve3, smooth, SOBEL_X, SOBEL_Y};
use crate::plane::Plane;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CannyConfig {
    /// Hysteresis thresholds on the Sobel gradient magnitude of 8-bit input.
    pub low: f64,
    pub high: f64,
    pub sigma: f64,
}

impl Default for CannyConfig {
    fn default() -> Self {
        CannyConfig {
            low: 30.0,
            high: 90.0,
            sigma: 1.4,
        }
    }
}

impl CannyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.low && self.low <= self.high) {
            return Err(Error::Config(format!(
                "canny thresholds need 0 <= low <= high, got low={} high={}",
                self.low, self.high
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("canny sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    pub bits: Plane<bool>,
    pub nzp: usize,
}

/// Canny edge detection: blur, Sobel, non-maximum suppression, hysteresis.
pub fn canny(region: &Plane<u8>, cfg: &CannyConfig) -> EdgeMap {
    assert!(cfg.low <= cfg.high, "low threshold above high threshold");
    let blurred = smooth(&region.to_f64(), cfg.sigma);
    let gx = convolve3(&blurred, &SOBEL_X);
    let gy = convolve3(&blurred, &SOBEL_Y);
    let magnitude = Plane::from_vec(
        region.width(),
        region.height(),
        gx.as_slice()
            .iter()
            .zip(gy.as_slice())
            .map(|(a, b)| a.hypot(*b))
            .collect(),
    );
    let thinned = non_maximum_suppression(&magnitude, &gx, &gy);
    let bits = hysteresis(&thinned, cfg.low, cfg.high);
    let nzp = bits.as_slice().iter().filter(|&&b| b).count();
    EdgeMap { bits, nzp }
}

fn non_maximum_suppression(mag: &Plane<f64>, gx: &Plane<f64>, gy: &Plane<f64>) -> Plane<f64> {
    Plane::from_fn(mag.width(), mag.height(), |x, y| {
        let m = mag.get(x, y);
        if m == 0.0 {
            return 0.0;
        }
        let mut angle = gy.get(x, y).atan2(gx.get(x, y)).to_degrees();
        if angle < 0.0 {
            angle += 180.0;
        }
        let (dx, dy): (isize, isize) = if !(22.5..157.5).contains(&angle) {
            (1, 0)
        } else if angle < 67.5 {
            (1, 1)
        } else if angle < 112.5 {
            (0, 1)
        } else {
            (-1, 1)
        };
        let (xi, yi) = (x as isize, y as isize);
        let behind = mag.get_clamped(xi - dx, yi - dy);
        let ahead = mag.get_clamped(xi + dx, yi + dy);
        // the asymmetric comparison keeps exactly one pixel of a two-pixel plateau
        if m >= behind && m > ahead {
            m
        } else {
            0.0
        }
    })
}

fn hysteresis(thinned: &Plane<f64>, low: f64, high: f64) -> Plane<bool> {
    let (w, h) = (thinned.width(), thinned.height());
    let mut out = Plane::filled(w, h, false);
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let m = thinned.get(x, y);
            if m > 0.0 && m >= high && !out.get(x, y) {
                out[(x, y)] = true;
                queue.push_back((x, y));
                while let Some((cx, cy)) = queue.pop_front() {
                    for ny in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                        for nx in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                            let nm = thinned.get(nx, ny);
                            if nm > 0.0 && nm >= low && !out.get(nx, ny) {
                                out[(nx, ny)] = true;
                                queue.push_back((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Fraction of region pixels marked as edges.
pub fn edge_ratio(edges: &EdgeMap) -> f64 {
    if edges.bits.is_empty() {
        return 0.0;
    }
    edges.nzp as f64 / edges.bits.len() as f64
}
