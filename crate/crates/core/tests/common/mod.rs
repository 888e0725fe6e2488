//! Independent reference implementations and fixtures shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::PI;

use egoseg::entropy_filters::train_skin_model;
use egoseg::evaluation::LabeledVideo;
use egoseg::pipeline::{extract_features, PipelineConfig, VideoFeatures};
use egoseg::synthetic::{generate, ScenarioConfig};
use egoseg::{ActionSegment, EvalCounts, FlowField, GroundTruthSegment, Plane};
use rand::rngs::StdRng;
use rand::Rng;
use rayon::prelude::*;

/// Median of the available values by rank counting, with no sorting.
pub fn median_by_rank(window: &[Option<f64>]) -> Option<f64> {
    let vals: Vec<f64> = window.iter().flatten().copied().collect();
    let n = vals.len();
    if n < 3 {
        return None;
    }
    // the r-th smallest value is one with fewer than r+1 values strictly below it
    // and at least r+1 values at or below it
    let nth = |r: usize| {
        *vals
            .iter()
            .find(|&&x| {
                let below = vals.iter().filter(|&&y| y < x).count();
                let at_or_below = vals.iter().filter(|&&y| y <= x).count();
                below <= r && r < at_or_below
            })
            .unwrap()
    };
    Some(if n % 2 == 1 {
        nth(n / 2)
    } else {
        0.5 * (nth(n / 2 - 1) + nth(n / 2))
    })
}

pub struct NaiveMotion {
    pub bins: [f64; 4],
    pub background: [usize; 2],
    pub fpr: f64,
    pub sdm: f64,
}

fn quadrant(o: f64) -> usize {
    if o < PI / 2.0 {
        0
    } else if o < PI {
        1
    } else if o < 1.5 * PI {
        2
    } else {
        3
    }
}

/// Pixel-by-pixel reference for the orientation histogram, background bins,
/// fpr and sdm.
pub fn naive_motion(flow: &FlowField) -> NaiveMotion {
    let n = flow.u.len();
    let mut bins = [0.0; 4];
    for i in 0..n {
        let m = flow.magnitude.as_slice()[i];
        if m > 0.0 {
            bins[quadrant(flow.orientation.as_slice()[i])] += m;
        }
    }
    let mut first = 0;
    for b in 1..4 {
        if bins[b] > bins[first] {
            first = b;
        }
    }
    let mut second = usize::MAX;
    for b in 0..4 {
        if b != first && (second == usize::MAX || bins[b] > bins[second]) {
            second = b;
        }
    }
    let mut fg = 0usize;
    for i in 0..n {
        let m = flow.magnitude.as_slice()[i];
        let q = quadrant(flow.orientation.as_slice()[i]);
        if m > 0.0 && q != first && q != second {
            fg += 1;
        }
    }
    let total: f64 = bins.iter().sum();
    let sdm = if total > 0.0 {
        let p = bins.map(|b| b / total);
        let mean = (p[0] + p[1] + p[2] + p[3]) / 4.0;
        let mut var = 0.0;
        for x in p {
            var += (x - mean) * (x - mean);
        }
        (var / 4.0).sqrt()
    } else {
        0.0
    };
    NaiveMotion {
        bins,
        background: [first, second],
        fpr: fg as f64 / n as f64,
        sdm,
    }
}

fn frames_of(start: usize, end: usize) -> BTreeSet<usize> {
    (start..=end).collect()
}

/// Scores a video by materialising every interval as a set of frames.
pub fn brute_force_score(segments: &[ActionSegment], gts: &[GroundTruthSegment]) -> EvalCounts {
    let gt_sets: Vec<BTreeSet<usize>> = gts.iter().map(|g| frames_of(g.start, g.end)).collect();
    let mut assigned: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); gts.len()];
    for s in segments {
        let seg = frames_of(s.start, s.end);
        let mut best: Option<(usize, usize)> = None;
        for (j, g) in gt_sets.iter().enumerate() {
            let common = seg.intersection(g).count();
            if 2 * common < seg.len() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bj, bc)) => common > bc || (common == bc && gts[j].start < gts[bj].start),
            };
            if better {
                best = Some((j, common));
            }
        }
        if let Some((j, _)) = best {
            assigned[j].push(seg);
        }
    }
    let mut c = EvalCounts::default();
    for (g, segs) in gt_sets.iter().zip(&assigned) {
        if segs.is_empty() {
            c.fn_ += 1;
            continue;
        }
        let inter: usize = segs.iter().map(|s| s.intersection(g).count()).sum();
        let union: usize = segs.iter().map(|s| s.union(g).count()).sum();
        if 2 * inter >= union {
            c.tp += 1;
        } else {
            c.fp += 1;
        }
    }
    c
}

/// Sorted, disjoint random intervals inside `0..frames`.
pub fn random_intervals(rng: &mut StdRng, frames: usize, max_count: usize) -> Vec<(usize, usize)> {
    let count = rng.random_range(0..=max_count);
    let mut cuts: Vec<usize> = (0..2 * count).map(|_| rng.random_range(0..frames)).collect();
    cuts.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for pair in cuts.chunks(2) {
        let (s, e) = (pair[0], pair[1]);
        if out.last().is_none_or(|&(_, pe)| s > pe) {
            out.push((s, e));
        }
    }
    out
}

pub fn to_segments(iv: &[(usize, usize)]) -> Vec<ActionSegment> {
    iv.iter().map(|&(start, end)| ActionSegment { start, end }).collect()
}

pub fn to_ground_truth(iv: &[(usize, usize)]) -> Vec<GroundTruthSegment> {
    iv.iter()
        .enumerate()
        .map(|(i, &(start, end))| GroundTruthSegment {
            label: format!("g{i}"),
            start,
            end,
        })
        .collect()
}

/// A random flow field with exact zeros and axis-aligned vectors mixed in.
pub fn random_flow(rng: &mut StdRng, width: usize, height: usize) -> FlowField {
    let mut uv = || -> (f64, f64) {
        match rng.random_range(0..6) {
            0 => (0.0, 0.0),
            1 => {
                let a = rng.random_range(-2.0..2.0);
                if rng.random_bool(0.5) { (a, 0.0) } else { (0.0, a) }
            }
            _ => (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
        }
    };
    let pairs: Vec<(f64, f64)> = (0..width * height).map(|_| uv()).collect();
    FlowField::from_uv(
        Plane::from_vec(width, height, pairs.iter().map(|p| p.0).collect()),
        Plane::from_vec(width, height, pairs.iter().map(|p| p.1).collect()),
    )
}

/// Per-frame features and ground truth for the standard synthetic suite,
/// computed once per seed in parallel.
pub fn suite_videos(seeds: std::ops::RangeInclusive<u64>, cfg: &PipelineConfig) -> Vec<LabeledVideo> {
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let scenario = generate(&ScenarioConfig::suite(seed)).expect("suite config is valid");
            let skin = train_skin_model(&scenario.skin_pixels, &scenario.nonskin_pixels, 32, 0.5)
                .expect("generator provides both classes");
            let raw = extract_features(&scenario.frames(), &scenario.gaze, &skin, cfg);
            LabeledVideo {
                features: VideoFeatures::from_raw(&raw),
                ground_truth: scenario.ground_truth,
            }
        })
        .collect()
}
