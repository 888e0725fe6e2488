//! Fixtures shared by the egoseg benchmarks.

use egoseg::plane::Plane;
use egoseg::synthetic::{generate, Scenario, ScenarioConfig};
use egoseg::REGION_SIZE;

/// Deterministic textured 56×56 patch shifted by `dx` pixels.
pub fn textured_patch(dx: usize) -> Plane<f64> {
    Plane::from_fn(REGION_SIZE, REGION_SIZE, |x, y| {
        let xs = x + dx;
        ((xs * 37 + y * 11) % 97) as f64 * 2.0 + ((xs / 5 + y / 7) % 3) as f64 * 20.0
    })
}

/// Short suite scenario used by the pipeline benchmarks.
pub fn short_scenario(seed: u64, num_frames: usize) -> Scenario {
    let mut cfg = ScenarioConfig::suite(seed);
    cfg.num_frames = num_frames;
    cfg.action_intervals.retain(|&(_, e)| e < num_frames);
    generate(&cfg).expect("valid scenario")
}
