//! Median smoothing of the motion parameters, the four-way AND cut test and
//! assembly of flagged frames into action segments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the median window (window spans `k-4..=k+4`).
pub const MEDIAN_HALF_WINDOW: usize = 4;
/// Fewest available values a window needs to yield a median.
pub const MEDIAN_MIN_SUPPORT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Foreground pixel ratio.
    pub t_a: f64,
    /// Standard deviation of motions.
    pub t_b: f64,
    /// Edge ratio.
    pub t_c: f64,
    /// Hand score.
    pub t_d: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            t_a: 0.30,
            t_b: 0.10,
            t_c: 0.05,
            t_d: 0.10,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("t_a", self.t_a), ("t_b", self.t_b), ("t_c", self.t_c), ("t_d", self.t_d)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameFeatures {
    pub frame_index: usize,
    pub fpr_raw: Option<f64>,
    pub sdm_raw: Option<f64>,
    pub phi: Option<f64>,
    pub upsilon: Option<f64>,
    pub fpr_med: Option<f64>,
    pub sdm_med: Option<f64>,
    pub cut_flag: bool,
}

/// Inclusive frame interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionSegment {
    pub start: usize,
    pub end: usize,
}

impl ActionSegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Median of the available values in the window centred on `k`.
///
/// The window is truncated at the sequence ends; unavailable frames contribute
/// nothing. Fewer than three values leaves the result unavailable. Even counts
/// take the mean of the two central values.
pub fn median_smooth(series: &[Option<f64>], k: usize) -> Option<f64> {
    let lo = k.saturating_sub(MEDIAN_HALF_WINDOW);
    let hi = (k + MEDIAN_HALF_WINDOW).min(series.len().checked_sub(1)?);
    let mut window: Vec<f64> = series.get(lo..=hi)?.iter().flatten().copied().collect();
    if window.len() < MEDIAN_MIN_SUPPORT {
        return None;
    }
    window.sort_by(f64::total_cmp);
    let n = window.len();
    Some(if n % 2 == 1 {
        window[n / 2]
    } else {
        0.5 * (window[n / 2 - 1] + window[n / 2])
    })
}

pub fn median_smooth_series(series: &[Option<f64>]) -> Vec<Option<f64>> {
    (0..series.len()).map(|k| median_smooth(series, k)).collect()
}

/// True iff all four values are available and each meets its threshold.
pub fn decide_cut(f: &FrameFeatures, t: &Thresholds) -> bool {
    match (f.fpr_med, f.sdm_med, f.phi, f.upsilon) {
        (Some(fpr), Some(sdm), Some(phi), Some(ups)) => {
            fpr >= t.t_a && sdm >= t.t_b && phi >= t.t_c && ups >= t.t_d
        }
        _ => false,
    }
}

/// Maximal runs of flagged frames, dropping runs shorter than `min_run`.
///
/// Each run opens on a 0→1 transition (start cut) and closes on its last
/// flagged frame (end cut), so starts and ends alternate by construction.
pub fn assemble_segments(flags: &[bool], min_run: usize) -> Vec<ActionSegment> {
    let min_run = min_run.max(1);
    let mut segments = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &flag) in flags.iter().chain(std::iter::once(&false)).enumerate() {
        match (flag, open) {
            (true, None) => open = Some(i),
            (false, Some(start)) => {
                if i - start >= min_run {
                    segments.push(ActionSegment { start, end: i - 1 });
                }
                open = None;
            }
            _ => {}
        }
    }
    segments
}
