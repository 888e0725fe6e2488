//! Fixation-centred regions of interest.

use crate::frame_io::{Frame, GazeSample};
use crate::plane::Plane;

/// Side length of a gaze region in pixels.
pub const REGION_SIZE: usize = 56;
/// Number of pixels in a gaze region; the divisor of every per-region ratio.
pub const REGION_PIXELS: usize = REGION_SIZE * REGION_SIZE;

#[derive(Clone, Debug, PartialEq)]
pub struct GazeRegion {
    pub frame_index: usize,
    pub origin_x: usize,
    pub origin_y: usize,
    pub y: Plane<u8>,
    pub u: Plane<u8>,
    pub v: Plane<u8>,
}

/// Crops the 56×56 window centred on a valid fixation.
///
/// The nominal origin is `(x - 28, y - 28)`; near the frame border the window
/// slides inward so it always lies fully inside the frame. Returns `None` for
/// saccade samples.
pub fn extract_region(frame: &Frame, sample: &GazeSample) -> Option<GazeRegion> {
    debug_assert_eq!(frame.index, sample.frame_index);
    if !sample.valid {
        return None;
    }
    assert!(
        frame.width() >= REGION_SIZE && frame.height() >= REGION_SIZE,
        "frame {} is smaller than a gaze region",
        frame.index
    );
    let half = REGION_SIZE / 2;
    let origin_x = sample.x.saturating_sub(half).min(frame.width() - REGION_SIZE);
    let origin_y = sample.y.saturating_sub(half).min(frame.height() - REGION_SIZE);
    let crop = |p: &Plane<u8>| p.crop(origin_x, origin_y, REGION_SIZE, REGION_SIZE);
    Some(GazeRegion {
        frame_index: frame.index,
        origin_x,
        origin_y,
        y: crop(&frame.y),
        u: crop(&frame.u),
        v: crop(&frame.v),
    })
}
