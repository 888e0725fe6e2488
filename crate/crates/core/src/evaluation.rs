//! Scoring discovered segments against ground truth.
//!
//! A discovered segment is aligned to a ground-truth segment when at least half
//! of the discovered segment's frames fall inside it. Each ground-truth segment
//! then gets an alignment score, the summed intersections over the summed
//! unions with its aligned segments; a score of at least 0.5 is a true
//! positive, anything lower a false positive, and no aligned segment at all a
//! false negative. Discovered segments aligned to nothing (rest states) are
//! ignored.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cut_detector::{ActionSegment, Thresholds};
use crate::error::{Error, Result};
use crate::frame_io::GroundTruthSegment;
use crate::pipeline::VideoFeatures;

/// Minimum alignment score accepted as a true positive.
pub const ACCEPT_SCORE: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl std::ops::Add for EvalCounts {
    type Output = EvalCounts;

    fn add(self, o: EvalCounts) -> EvalCounts {
        EvalCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::iter::Sum for EvalCounts {
    fn sum<I: Iterator<Item = EvalCounts>>(iter: I) -> Self {
        iter.fold(EvalCounts::default(), |a, b| a + b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

fn overlap(a_start: usize, a_end: usize, b_start: usize, b_end: usize) -> usize {
    let lo = a_start.max(b_start);
    let hi = a_end.min(b_end);
    if lo > hi {
        0
    } else {
        hi - lo + 1
    }
}

fn intersection(seg: &ActionSegment, gt: &GroundTruthSegment) -> usize {
    overlap(seg.start, seg.end, gt.start, gt.end)
}

/// At least half of the segment's frames lie inside `gt` (boundary inclusive).
pub fn is_aligned(seg: &ActionSegment, gt: &GroundTruthSegment) -> bool {
    2 * intersection(seg, gt) >= seg.len()
}

/// Summed intersections over summed unions between `gt` and each aligned segment.
pub fn align_score(gt: &GroundTruthSegment, aligned: &[ActionSegment]) -> Result<f64> {
    if aligned.is_empty() {
        return Err(Error::Unsorted(
            "alignment score needs at least one aligned segment".into(),
        ));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for s in aligned {
        let i = intersection(s, gt);
        inter += i;
        union += gt.len() + s.len() - i;
    }
    Ok(inter as f64 / union as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tp,
    Fp,
    Fn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtOutcome {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub aligned: Vec<ActionSegment>,
    pub align_score: Option<f64>,
    pub outcome: Outcome,
}

fn check_sorted(what: &str, intervals: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    let mut last_end: Option<usize> = None;
    for (start, end) in intervals {
        if start > end {
            return Err(Error::Unsorted(format!("{what} [{start}, {end}] is inverted")));
        }
        if let Some(prev) = last_end {
            if start <= prev {
                return Err(Error::Unsorted(format!(
                    "{what} starting at {start} overlaps or precedes the previous one"
                )));
            }
        }
        last_end = Some(end);
    }
    Ok(())
}

/// Per-ground-truth outcomes for one video.
pub fn evaluate_video(
    segments: &[ActionSegment],
    gts: &[GroundTruthSegment],
) -> Result<Vec<GtOutcome>> {
    check_sorted("segment", segments.iter().map(|s| (s.start, s.end)))?;
    check_sorted("ground-truth segment", gts.iter().map(|g| (g.start, g.end)))?;

    let mut aligned: Vec<Vec<ActionSegment>> = vec![Vec::new(); gts.len()];
    for seg in segments {
        // largest overlap wins; gts are sorted so the first maximum has the lower start
        let best = gts
            .iter()
            .enumerate()
            .filter(|(_, g)| is_aligned(seg, g))
            .map(|(j, g)| (j, intersection(seg, g)))
            .fold(None::<(usize, usize)>, |best, (j, ov)| match best {
                Some((_, b)) if b >= ov => best,
                _ => Some((j, ov)),
            });
        if let Some((j, _)) = best {
            aligned[j].push(*seg);
        }
    }

    gts.iter()
        .zip(aligned)
        .map(|(gt, segs)| {
            let (score, outcome) = if segs.is_empty() {
                (None, Outcome::Fn)
            } else {
                let s = align_score(gt, &segs)?;
                (Some(s), if s >= ACCEPT_SCORE { Outcome::Tp } else { Outcome::Fp })
            };
            Ok(GtOutcome {
                label: gt.label.clone(),
                start: gt.start,
                end: gt.end,
                aligned: segs,
                align_score: score,
                outcome,
            })
        })
        .collect()
}

pub fn count_outcomes(outcomes: &[GtOutcome]) -> EvalCounts {
    let mut c = EvalCounts::default();
    for o in outcomes {
        match o.outcome {
            Outcome::Tp => c.tp += 1,
            Outcome::Fp => c.fp += 1,
            Outcome::Fn => c.fn_ += 1,
        }
    }
    c
}

pub fn score_video(segments: &[ActionSegment], gts: &[GroundTruthSegment]) -> Result<EvalCounts> {
    Ok(count_outcomes(&evaluate_video(segments, gts)?))
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(c: &EvalCounts) -> Metrics {
    let recall = ratio(c.tp, c.tp + c.fn_);
    let precision = ratio(c.tp, c.tp + c.fp);
    let f_measure = if recall + precision > 0.0 {
        2.0 * recall * precision / (recall + precision)
    } else {
        0.0
    };
    Metrics {
        recall,
        precision,
        f_measure,
    }
}

/// JSON evaluation report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub counts: EvalCounts,
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
    pub per_gt: Vec<GtOutcome>,
}

impl EvalReport {
    pub fn new(per_gt: Vec<GtOutcome>) -> Self {
        let counts = count_outcomes(&per_gt);
        let m = metrics(&counts);
        EvalReport {
            config_hash: None,
            counts,
            recall: m.recall,
            precision: m.precision,
            f_measure: m.f_measure,
            per_gt,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub t_a: Vec<f64>,
    pub t_b: Vec<f64>,
    pub t_c: Vec<f64>,
    pub t_d: Vec<f64>,
}

impl Default for SweepGrid {
    /// 0.10..=0.90 in steps of 0.10 for fpr, sdm and hand score; edge ratio fixed at 0.05.
    fn default() -> Self {
        let steps: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
        SweepGrid {
            t_a: steps.clone(),
            t_b: steps.clone(),
            t_c: vec![0.05],
            t_d: steps,
        }
    }
}

impl SweepGrid {
    pub fn combinations(&self) -> Vec<Thresholds> {
        let mut out = Vec::with_capacity(self.len());
        for &t_a in &self.t_a {
            for &t_b in &self.t_b {
                for &t_c in &self.t_c {
                    for &t_d in &self.t_d {
                        out.push(Thresholds { t_a, t_b, t_c, t_d });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t_a.len() * self.t_b.len() * self.t_c.len() * self.t_d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        for t in self.combinations() {
            t.validate()?;
        }
        Ok(())
    }
}

/// Cached features and ground truth for one video in a sweep.
#[derive(Clone, Debug)]
pub struct LabeledVideo {
    pub features: VideoFeatures,
    pub ground_truth: Vec<GroundTruthSegment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub thresholds: Thresholds,
    pub counts: EvalCounts,
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

/// Pooled counts and metrics for one threshold combination across videos.
pub fn evaluate_thresholds(
    videos: &[LabeledVideo],
    thresholds: &Thresholds,
    min_run: usize,
) -> Result<SweepResult> {
    let counts = videos
        .iter()
        .map(|v| score_video(&v.features.segments(thresholds, min_run), &v.ground_truth))
        .sum::<Result<EvalCounts>>()?;
    let m = metrics(&counts);
    Ok(SweepResult {
        thresholds: *thresholds,
        counts,
        recall: m.recall,
        precision: m.precision,
        f_measure: m.f_measure,
    })
}

/// Evaluates every grid combination; output order follows [`SweepGrid::combinations`].
pub fn sweep(videos: &[LabeledVideo], grid: &SweepGrid, min_run: usize) -> Result<Vec<SweepResult>> {
    grid.validate()?;
    grid.combinations()
        .par_iter()
        .map(|t| evaluate_thresholds(videos, t, min_run))
        .collect()
}

/// Sorts best F-measure first; ties keep grid order.
pub fn rank_by_f_measure(results: &mut [SweepResult]) {
    results.sort_by(|a, b| b.f_measure.total_cmp(&a.f_measure));
}

pub fn sweep_to_csv(results: &[SweepResult], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("t_a,t_b,t_c,t_d,tp,fp,fn,recall,precision,f_measure\n");
    for r in results {
        let t = r.thresholds;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            t.t_a, t.t_b, t.t_c, t.t_d, r.counts.tp, r.counts.fp, r.counts.fn_, r.recall, r.precision, r.f_measure
        ));
    }
    out
}
