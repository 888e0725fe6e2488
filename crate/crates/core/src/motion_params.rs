//! Orientation histogram, background/foreground labelling and the two motion
//! parameters: foreground pixel ratio (fpr) and standard deviation of motions (sdm).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::optical_flow::FlowField;

pub const NUM_BINS: usize = 4;

/// Magnitude-weighted orientation histogram over the four quadrants
/// `[0, π/2)`, `[π/2, π)`, `[π, 3π/2)`, `[3π/2, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionHistogram {
    pub bins: [f64; NUM_BINS],
    pub total_weight: f64,
    /// The two heaviest bins, heaviest first; ties go to the lower index.
    pub background_bins: [usize; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PixelLabeling {
    pub foreground_count: usize,
    pub background_count: usize,
}

/// Quadrant index of an orientation in `[0, 2π)`.
pub fn bin_of(orientation: f64) -> usize {
    ((orientation / FRAC_PI_2) as usize).min(NUM_BINS - 1)
}

pub fn build_histogram(flow: &FlowField) -> MotionHistogram {
    let mut bins = [0.0; NUM_BINS];
    let mut total_weight = 0.0;
    for (&m, &o) in flow
        .magnitude
        .as_slice()
        .iter()
        .zip(flow.orientation.as_slice())
    {
        if m > 0.0 {
            bins[bin_of(o)] += m;
            total_weight += m;
        }
    }
    MotionHistogram {
        bins,
        total_weight,
        background_bins: top_two(&bins),
    }
}

fn top_two(bins: &[f64; NUM_BINS]) -> [usize; 2] {
    let mut order = [0, 1, 2, 3];
    // stable: equal masses keep ascending index order
    order.sort_by(|&a, &b| bins[b].total_cmp(&bins[a]));
    [order[0], order[1]]
}

/// A pixel is background when it does not move or when its orientation falls in
/// one of the two background bins.
pub fn label_pixels(flow: &FlowField, hist: &MotionHistogram) -> PixelLabeling {
    let foreground_count = flow
        .magnitude
        .as_slice()
        .iter()
        .zip(flow.orientation.as_slice())
        .filter(|&(&m, &o)| m > 0.0 && !hist.background_bins.contains(&bin_of(o)))
        .count();
    PixelLabeling {
        foreground_count,
        background_count: flow.magnitude.len() - foreground_count,
    }
}

/// Foreground pixels over all region pixels.
pub fn compute_fpr(labeling: &PixelLabeling) -> f64 {
    let total = labeling.foreground_count + labeling.background_count;
    if total == 0 {
        return 0.0;
    }
    labeling.foreground_count as f64 / total as f64
}

/// Population standard deviation of the normalised bin masses. An empty
/// histogram has sdm 0.
pub fn compute_sdm(hist: &MotionHistogram) -> f64 {
    let sum: f64 = hist.bins.iter().sum();
    if sum <= 0.0 {
        return 0.0;
    }
    let normalized = hist.bins.map(|b| b / sum);
    std_dev(&normalized)
}

fn std_dev(values: &[f64; NUM_BINS]) -> f64 {
    let mean = values.iter().sum::<f64>() / NUM_BINS as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / NUM_BINS as f64;
    var.sqrt()
}

/// fpr and sdm of one flow field, with the histogram they came from.
pub fn motion_parameters(flow: &FlowField) -> (f64, f64, MotionHistogram) {
    let hist = build_histogram(flow);
    let labeling = label_pixels(flow, &hist);
    (compute_fpr(&labeling), compute_sdm(&hist), hist)
}
