//! Unsupervised temporal segmentation of egocentric video.
//!
//! Each frame is reduced to a 56×56 gaze region around the wearer's fixation
//! point. Two motion parameters (foreground pixel ratio and the spread of the
//! orientation histogram) are tracked across successive regions, filtered by an
//! edge-density test and a skin-colour hand score, and frames passing all four
//! tests are grouped into action segments. The [`evaluation`] module scores
//! those segments against labelled ground truth.
//!
//! The pipeline is deterministic: the same frames, gaze track and configuration
//! always produce bit-identical features and segments.

pub mod cut_detector;
pub mod entropy_filters;
pub mod error;
pub mod evaluation;
pub mod frame_io;
pub mod gaze_region;
pub mod motion_params;
pub mod optical_flow;
pub mod pipeline;
pub mod plane;
pub mod synthetic;

pub use cut_detector::{ActionSegment, FrameFeatures, Thresholds};
pub use entropy_filters::{CannyConfig, EdgeMap, SkinModel};
pub use error::{Error, Result};
pub use evaluation::{EvalCounts, EvalReport, SweepGrid, SweepResult};
pub use frame_io::{Frame, GazeSample, GazeTrack, GroundTruthSegment, Manifest};
pub use gaze_region::{GazeRegion, REGION_PIXELS, REGION_SIZE};
pub use motion_params::{MotionHistogram, PixelLabeling};
pub use optical_flow::{FlowConfig, FlowField, FlowMode, GradientPlanes};
pub use pipeline::{PipelineConfig, RawFeatures, VideoFeatures};
pub use plane::Plane;
pub use synthetic::{Scenario, ScenarioConfig};
