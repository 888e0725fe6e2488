//! Per-video feature extraction and cut detection.

use serde::{Deserialize, Serialize};

use crate::cut_detector::{
    assemble_segments, decide_cut, median_smooth_series, ActionSegment, FrameFeatures, Thresholds,
};
use crate::entropy_filters::{canny, edge_ratio, hand_score, CannyConfig, SkinModel};
use crate::error::{Error, Result};
use crate::frame_io::{Frame, GazeTrack};
use crate::gaze_region::{extract_region, GazeRegion, REGION_SIZE};
use crate::motion_params::{motion_parameters, MotionHistogram};
use crate::optical_flow::{flow_step, gradients, smooth, FlowConfig, FlowField};
use crate::plane::Plane;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub flow: FlowConfig,
    pub canny: CannyConfig,
    pub thresholds: Thresholds,
    /// Runs of cut frames shorter than this are discarded.
    pub min_run: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            flow: FlowConfig::default(),
            canny: CannyConfig::default(),
            thresholds: Thresholds::default(),
            min_run: 1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        self.canny.validate()?;
        self.thresholds.validate()?;
        if self.min_run == 0 {
            return Err(Error::Config("min_run must be positive".into()));
        }
        Ok(())
    }
}

/// Unsmoothed per-frame measurements. Flow-derived values need a gaze region
/// in both this frame and the previous one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawFeatures {
    pub frame_index: usize,
    pub fpr: Option<f64>,
    pub sdm: Option<f64>,
    pub phi: Option<f64>,
    pub upsilon: Option<f64>,
    pub histogram: Option<MotionHistogram>,
}

/// What the extractor saw at one frame, for debug dumps.
pub struct FrameTrace<'a> {
    pub frame_index: usize,
    pub region: Option<&'a GazeRegion>,
    pub flow: Option<&'a FlowField>,
}

pub fn extract_features(
    frames: &[Frame],
    gaze: &GazeTrack,
    skin: &SkinModel,
    cfg: &PipelineConfig,
) -> Vec<RawFeatures> {
    extract_features_inspect(frames, gaze, skin, cfg, |_| {})
}

/// [`extract_features`] with a callback invoked once per frame.
pub fn extract_features_inspect(
    frames: &[Frame],
    gaze: &GazeTrack,
    skin: &SkinModel,
    cfg: &PipelineConfig,
    mut inspect: impl FnMut(&FrameTrace<'_>),
) -> Vec<RawFeatures> {
    let zero_flow = FlowField::zeros(REGION_SIZE, REGION_SIZE);
    let mut prev_smoothed: Option<Plane<f64>> = None;
    let mut seed = zero_flow.clone();
    let mut out = Vec::with_capacity(frames.len());

    for frame in frames {
        let sample = gaze.sample(frame.index);
        let Some(region) = extract_region(frame, &sample) else {
            prev_smoothed = None;
            seed = zero_flow.clone();
            inspect(&FrameTrace {
                frame_index: frame.index,
                region: None,
                flow: None,
            });
            out.push(RawFeatures {
                frame_index: frame.index,
                fpr: None,
                sdm: None,
                phi: None,
                upsilon: None,
                histogram: None,
            });
            continue;
        };

        // both patches are smoothed so a static scene has zero temporal gradient
        let curr_smoothed = smooth(&region.y.to_f64(), cfg.flow.gaussian_sigma);
        let flow = match &prev_smoothed {
            Some(prev) => {
                let grads = gradients(prev, &curr_smoothed);
                Some(flow_step(&grads, &seed, &cfg.flow))
            }
            None => None,
        };
        let motion = flow.as_ref().map(motion_parameters);
        seed = flow.clone().unwrap_or_else(|| zero_flow.clone());
        prev_smoothed = Some(curr_smoothed);

        let phi = edge_ratio(&canny(&region.y, &cfg.canny));
        let upsilon = hand_score(&region, skin);
        inspect(&FrameTrace {
            frame_index: frame.index,
            region: Some(&region),
            flow: flow.as_ref(),
        });
        out.push(RawFeatures {
            frame_index: frame.index,
            fpr: motion.map(|m| m.0),
            sdm: motion.map(|m| m.1),
            phi: Some(phi),
            upsilon: Some(upsilon),
            histogram: motion.map(|m| m.2),
        });
    }
    out
}

/// Smoothed per-frame features for one video, ready for thresholding.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoFeatures {
    pub features: Vec<FrameFeatures>,
    pub histograms: Vec<Option<MotionHistogram>>,
}

impl VideoFeatures {
    pub fn from_raw(raw: &[RawFeatures]) -> Self {
        let fpr: Vec<_> = raw.iter().map(|r| r.fpr).collect();
        let sdm: Vec<_> = raw.iter().map(|r| r.sdm).collect();
        let fpr_med = median_smooth_series(&fpr);
        let sdm_med = median_smooth_series(&sdm);
        let features = raw
            .iter()
            .enumerate()
            .map(|(k, r)| FrameFeatures {
                frame_index: r.frame_index,
                fpr_raw: r.fpr,
                sdm_raw: r.sdm,
                phi: r.phi,
                upsilon: r.upsilon,
                fpr_med: fpr_med[k],
                sdm_med: sdm_med[k],
                cut_flag: false,
            })
            .collect();
        VideoFeatures {
            features,
            histograms: raw.iter().map(|r| r.histogram).collect(),
        }
    }

    pub fn cut_flags(&self, thresholds: &Thresholds) -> Vec<bool> {
        self.features.iter().map(|f| decide_cut(f, thresholds)).collect()
    }

    pub fn apply_thresholds(&mut self, thresholds: &Thresholds) {
        for f in &mut self.features {
            f.cut_flag = decide_cut(f, thresholds);
        }
    }

    pub fn segments(&self, thresholds: &Thresholds, min_run: usize) -> Vec<ActionSegment> {
        assemble_segments(&self.cut_flags(thresholds), min_run)
    }

    /// Feature trace CSV. `with_histograms` appends the four bin masses.
    pub fn to_csv(&self, comment: Option<&str>, with_histograms: bool) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            out.push_str(&format!("# {c}\n"));
        }
        out.push_str("frame,fpr_raw,sdm_raw,phi,upsilon,fpr_med,sdm_med,cut");
        if with_histograms {
            out.push_str(",bin_1,bin_2,bin_3,bin_4");
        }
        out.push('\n');
        for (f, h) in self.features.iter().zip(&self.histograms) {
            let cols = [f.fpr_raw, f.sdm_raw, f.phi, f.upsilon, f.fpr_med, f.sdm_med];
            out.push_str(&f.frame_index.to_string());
            for c in cols {
                out.push(',');
                out.push_str(&fmt_opt(c));
            }
            out.push_str(if f.cut_flag { ",1" } else { ",0" });
            if with_histograms {
                for i in 0..4 {
                    out.push(',');
                    out.push_str(&fmt_opt(h.map(|h| h.bins[i])));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Full per-video run: features with cut flags set, plus the assembled segments.
pub fn run_video(
    frames: &[Frame],
    gaze: &GazeTrack,
    skin: &SkinModel,
    cfg: &PipelineConfig,
) -> (VideoFeatures, Vec<ActionSegment>) {
    let raw = extract_features(frames, gaze, skin, cfg);
    let mut video = VideoFeatures::from_raw(&raw);
    video.apply_thresholds(&cfg.thresholds);
    let segments = video.segments(&cfg.thresholds, cfg.min_run);
    (video, segments)
}
