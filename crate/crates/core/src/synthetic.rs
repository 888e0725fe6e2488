//! Deterministic synthetic egocentric sequences with known action intervals.
//!
//! The scene is a procedural, slowly tinted background seen through a camera
//! that shakes by up to `camera_jitter` pixels per frame. During an action a
//! textured, skin-coloured disc (the "hand") makes a straight stroke at
//! `foreground_speed` pixels per frame and the gaze pursues its centre, so
//! inside the gaze window the background streams past while the hand slips
//! slowly forward. Between actions the gaze rests on background points; every
//! tenth rest frame is a saccade, as are the frames where the eye jumps to or
//! from the hand.
//!
//! All randomness comes from xorshift64* seeded through splitmix64, and all
//! texture lookups hash integer lattice coordinates, so output bytes depend only
//! on the configuration.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame_io::{
    convert_rgb_to_yuv, encode_ppm, ground_truth_to_csv, gaze_track_to_csv, uv_samples_to_csv,
    write_text, Frame, GazeSample, GazeTrack, GroundTruthSegment, Manifest, RgbImage,
};
use crate::plane::Plane;

/// Radius of the foreground disc in pixels.
pub const BLOB_RADIUS: f64 = 25.0;
/// Pursuit slip: pixels per frame the hand gains on the gaze along its heading.
const PURSUIT_SLIP: f64 = 0.05;
/// Every n-th rest frame is a saccade.
const SACCADE_PERIOD: usize = 10;
/// Rest frames between fixation changes.
const FIXATION_HOLD: usize = 10;
const SAMPLES_PER_CLASS: usize = 4000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub num_frames: usize,
    pub frame_size: (usize, usize),
    /// Inclusive `(start, end)` frame intervals.
    pub action_intervals: Vec<(usize, usize)>,
    /// Feature size of the background texture in pixels.
    pub background_texture_scale: f64,
    pub foreground_speed: f64,
    pub skin_color: (u8, u8, u8),
    pub camera_jitter: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 1,
            num_frames: 300,
            frame_size: (320, 240),
            action_intervals: Vec::new(),
            background_texture_scale: 12.0,
            foreground_speed: 2.0,
            skin_color: (210, 150, 120),
            camera_jitter: 0.3,
        }
    }
}

impl ScenarioConfig {
    /// Standard evaluation scenario: 300 frames with three actions placed from `seed`.
    pub fn suite(seed: u64) -> Self {
        let mut rng = XorShift64Star::new(seed ^ 0x5eed_5eed);
        let num_frames = 300;
        // three actions of 40..=70 frames separated by rests of at least 20
        let lens: Vec<usize> = (0..3).map(|_| 40 + rng.below(31)).collect();
        let slack = num_frames - lens.iter().sum::<usize>() - 4 * 20;
        let mut cuts: Vec<usize> = (0..4).map(|_| rng.below(slack + 1)).collect();
        cuts.sort_unstable();
        let mut gaps = [0usize; 4];
        let mut prev = 0;
        for (g, c) in gaps.iter_mut().zip(&cuts) {
            *g = 20 + c - prev;
            prev = *c;
        }
        let mut intervals = Vec::new();
        let mut t = 0;
        for (i, len) in lens.iter().enumerate() {
            t += gaps[i];
            intervals.push((t, t + len - 1));
            t += len;
        }
        ScenarioConfig {
            seed,
            num_frames,
            action_intervals: intervals,
            ..ScenarioConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.frame_size;
        if w < 96 || h < 96 {
            return Err(Error::Config(format!(
                "frame_size must be at least 96x96, got {w}x{h}"
            )));
        }
        if self.num_frames == 0 {
            return Err(Error::Config("num_frames must be positive".into()));
        }
        let mut sorted = self.action_intervals.clone();
        sorted.sort_unstable();
        for &(s, e) in &sorted {
            if s > e || e >= self.num_frames {
                return Err(Error::Config(format!(
                    "action interval [{s}, {e}] is inverted or outside 0..{}",
                    self.num_frames
                )));
            }
        }
        for pair in sorted.windows(2) {
            if pair[1].0 <= pair[0].1 {
                return Err(Error::Config(format!(
                    "action intervals [{}, {}] and [{}, {}] overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        if !sorted.is_empty() && (self.foreground_speed.is_nan() || self.foreground_speed <= 0.0) {
            return Err(Error::Config("foreground_speed must be > 0".into()));
        }
        if self.background_texture_scale.is_nan() || self.background_texture_scale < 1.0 {
            return Err(Error::Config("background_texture_scale must be >= 1".into()));
        }
        if self.camera_jitter.is_nan() || self.camera_jitter < 0.0 {
            return Err(Error::Config("camera_jitter must be >= 0".into()));
        }
        Ok(())
    }
}

/// xorshift64* (Vigna 2016): `x ^= x >> 12; x ^= x << 25; x ^= x >> 27; x * 0x2545F4914F6CDD1D`,
/// state initialised by one splitmix64 step of the seed.
#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        XorShift64Star {
            state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n` (`n > 0`).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Smooth value noise in `[0, 1]` over a hashed integer lattice.
#[derive(Clone, Copy, Debug)]
struct ValueNoise {
    key: u64,
}

impl ValueNoise {
    fn new(seed: u64, channel: u64) -> Self {
        ValueNoise {
            key: splitmix64(seed.wrapping_mul(0x1000_0000_01B3) ^ channel),
        }
    }

    fn lattice(&self, ix: i64, iy: i64) -> f64 {
        let h = splitmix64(
            self.key ^ (ix as u64).wrapping_mul(0x9E37_79B1) ^ (iy as u64).wrapping_mul(0x85EB_CA77_C2B2_AE63),
        );
        (h >> 11) as f64 / (1u64 << 53) as f64
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (fx, fy) = (x.floor(), y.floor());
        let (ix, iy) = (fx as i64, fy as i64);
        let s = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (s(x - fx), s(y - fy));
        let a = self.lattice(ix, iy);
        let b = self.lattice(ix + 1, iy);
        let c = self.lattice(ix, iy + 1);
        let d = self.lattice(ix + 1, iy + 1);
        let top = a + (b - a) * tx;
        let bottom = c + (d - c) * tx;
        top + (bottom - top) * ty
    }
}

/// One rendered scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub images: Vec<RgbImage>,
    /// Per-frame foreground coverage, present on action frames.
    pub blob_masks: Vec<Option<Plane<bool>>>,
    pub gaze: GazeTrack,
    pub ground_truth: Vec<GroundTruthSegment>,
    pub skin_pixels: Vec<(u8, u8)>,
    pub nonskin_pixels: Vec<(u8, u8)>,
}

/// Disc placement in image coordinates.
struct Blob {
    cx: f64,
    cy: f64,
}

struct Scene {
    background: ValueNoise,
    detail: ValueNoise,
    tint: ValueNoise,
    skin_tex: ValueNoise,
    cfg: ScenarioConfig,
}

impl Scene {
    fn background_rgb(&self, wx: f64, wy: f64) -> [f64; 3] {
        let s = self.cfg.background_texture_scale;
        let lum = 0.9 * self.background.at(wx / s, wy / s) + 0.1 * self.detail.at(wx * 2.5 / s, wy * 2.5 / s);
        let l = 50.0 + 170.0 * lum;
        let t = self.tint.at(wx / (6.0 * s), wy / (6.0 * s));
        // cool grey to green-grey; both keep V below neutral, away from skin
        let cool = [0.85, 0.95, 1.05];
        let green = [0.85, 1.05, 0.90];
        [0, 1, 2].map(|i| l * (cool[i] + (green[i] - cool[i]) * t))
    }

    fn blob_rgb(&self, lx: f64, ly: f64) -> [f64; 3] {
        let f = 0.5 + 0.6 * self.skin_tex.at(lx / 3.5, ly / 3.5);
        let (r, g, b) = self.cfg.skin_color;
        [f64::from(r) * f, f64::from(g) * f, f64::from(b) * f]
    }

    /// Camera offset is added to image coordinates to get world coordinates.
    fn render(&self, camera: (f64, f64), blob: Option<&Blob>) -> (RgbImage, Option<Plane<bool>>) {
        let (w, h) = self.cfg.frame_size;
        let mut rgb = Vec::with_capacity(w * h * 3);
        let mut mask = blob.map(|_| Plane::filled(w, h, false));
        for y in 0..h {
            for x in 0..w {
                let wx = x as f64 + camera.0;
                let wy = y as f64 + camera.1;
                let mut px = self.background_rgb(wx, wy);
                if let Some(b) = blob {
                    let (dx, dy) = (x as f64 - b.cx, y as f64 - b.cy);
                    if dx * dx + dy * dy <= BLOB_RADIUS * BLOB_RADIUS {
                        px = self.blob_rgb(dx, dy);
                        if let Some(m) = mask.as_mut() {
                            m[(x, y)] = true;
                        }
                    }
                }
                rgb.extend(px.map(quantize));
            }
        }
        (
            RgbImage {
                width: w,
                height: h,
                rgb,
            },
            mask,
        )
    }
}

/// Renders a scenario. Identical configurations give identical bytes.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let seed = cfg.seed;
    let scene = Scene {
        background: ValueNoise::new(seed, 1),
        detail: ValueNoise::new(seed, 2),
        tint: ValueNoise::new(seed, 3),
        skin_tex: ValueNoise::new(seed, 4),
        cfg: cfg.clone(),
    };
    let mut rng = XorShift64Star::new(seed);
    let (w, h) = cfg.frame_size;
    let (wf, hf) = (w as f64, h as f64);

    let mut intervals = cfg.action_intervals.clone();
    intervals.sort_unstable();
    // per-action straight stroke from a random start in a random direction,
    // reflected at the margins so the disc stays inside the frame
    let margin = BLOB_RADIUS + 3.0;
    let paths: Vec<(f64, f64, f64)> = intervals
        .iter()
        .map(|&(start, end)| {
            let heading = rng.range(0.0, TAU);
            let travel = (end - start) as f64 * cfg.foreground_speed;
            // start where the whole stroke fits when the frame allows it
            let span = |extent: f64, d: f64| {
                let lo = margin + (-d).max(0.0);
                let hi = extent - margin - d.max(0.0);
                if lo <= hi { (lo, hi) } else { (margin, extent - margin) }
            };
            let (x0, x1) = span(wf, travel * heading.cos());
            let (y0, y1) = span(hf, travel * heading.sin());
            (rng.range(x0, x1), rng.range(y0, y1), heading)
        })
        .collect();
    let action_at = |k: usize| intervals.iter().position(|&(s, e)| (s..=e).contains(&k));

    let mut images = Vec::with_capacity(cfg.num_frames);
    let mut masks = Vec::with_capacity(cfg.num_frames);
    let mut gaze = Vec::with_capacity(cfg.num_frames);
    let mut rest_count = 0usize;
    let mut fixation = (wf / 2.0, hf / 2.0);

    for k in 0..cfg.num_frames {
        let j = cfg.camera_jitter;
        let camera = (rng.range(-j, j), rng.range(-j, j));
        // smooth pursuit keeps the gaze on the hand with a small slip: the hand
        // starts slightly behind the fixated pixel and ends slightly ahead
        let hand = action_at(k).map(|i| {
            let (sx, sy, heading) = paths[i];
            let travel = (k - intervals[i].0) as f64 * cfg.foreground_speed;
            let px = reflect(sx + travel * heading.cos(), margin, wf - margin);
            let py = reflect(sy + travel * heading.sin(), margin, hf - margin);
            let gx = (px - camera.0).round();
            let gy = (py - camera.1).round();
            let (s, e) = intervals[i];
            let slip = PURSUIT_SLIP * ((k - s) as f64 - (e - s) as f64 / 2.0);
            let blob = Blob {
                cx: gx + slip * heading.cos(),
                cy: gy + slip * heading.sin(),
            };
            (blob, gx, gy)
        });
        let blob = hand.as_ref().map(|h| &h.0);
        let (image, mask) = scene.render(camera, blob);

        let sample = match &hand {
            Some((_, gx, gy)) => gaze_at(k, *gx, *gy, w, h, true),
            None => {
                if rest_count.is_multiple_of(FIXATION_HOLD) {
                    fixation = (rng.range(28.0, wf - 28.0), rng.range(28.0, hf - 28.0));
                }
                // the eye jumps to and from the hand, so frames bordering an action are saccades
                let borders_action = action_at(k + 1).is_some() || (k > 0 && action_at(k - 1).is_some());
                let valid = rest_count % SACCADE_PERIOD != SACCADE_PERIOD - 1 && !borders_action;
                rest_count += 1;
                gaze_at(k, fixation.0 - camera.0, fixation.1 - camera.1, w, h, valid)
            }
        };
        gaze.push(sample);
        images.push(image);
        masks.push(mask);
    }

    let (skin_pixels, nonskin_pixels) = sample_training_pixels(&scene, &images, &masks, &mut rng);
    let ground_truth = intervals
        .iter()
        .enumerate()
        .map(|(i, &(start, end))| GroundTruthSegment {
            label: format!("action-{}", i + 1),
            start,
            end,
        })
        .collect();

    Ok(Scenario {
        config: cfg.clone(),
        images,
        blob_masks: masks,
        gaze: GazeTrack::from_samples(gaze)?,
        ground_truth,
        skin_pixels,
        nonskin_pixels,
    })
}

/// Folds `x` back into `[lo, hi]` as if bouncing off both ends.
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    let t = (x - lo).rem_euclid(2.0 * span);
    lo + if t > span { 2.0 * span - t } else { t }
}

fn gaze_at(k: usize, x: f64, y: f64, w: usize, h: usize, valid: bool) -> GazeSample {
    if !valid {
        return GazeSample::saccade(k);
    }
    GazeSample {
        frame_index: k,
        x: (x.round().max(0.0) as usize).min(w - 1),
        y: (y.round().max(0.0) as usize).min(h - 1),
        valid: true,
    }
}

/// Skin samples come from the disc texture itself (so scenes without actions
/// still train a model); non-skin samples from rendered background pixels.
fn sample_training_pixels(
    scene: &Scene,
    images: &[RgbImage],
    masks: &[Option<Plane<bool>>],
    rng: &mut XorShift64Star,
) -> (Vec<(u8, u8)>, Vec<(u8, u8)>) {
    let mut skin = Vec::with_capacity(SAMPLES_PER_CLASS);
    while skin.len() < SAMPLES_PER_CLASS {
        let lx = rng.range(-BLOB_RADIUS, BLOB_RADIUS);
        let ly = rng.range(-BLOB_RADIUS, BLOB_RADIUS);
        if lx * lx + ly * ly > BLOB_RADIUS * BLOB_RADIUS {
            continue;
        }
        let [r, g, b] = scene.blob_rgb(lx, ly).map(quantize);
        let (_, u, v) = convert_rgb_to_yuv(r, g, b);
        skin.push((u, v));
    }
    let mut nonskin = Vec::with_capacity(SAMPLES_PER_CLASS);
    while nonskin.len() < SAMPLES_PER_CLASS {
        let k = rng.below(images.len());
        let img = &images[k];
        let i = rng.below(img.width * img.height);
        if masks[k].as_ref().is_some_and(|m| m.as_slice()[i]) {
            continue;
        }
        let (_, u, v) = convert_rgb_to_yuv(img.rgb[3 * i], img.rgb[3 * i + 1], img.rgb[3 * i + 2]);
        nonskin.push((u, v));
    }
    (skin, nonskin)
}

fn quantize(c: f64) -> u8 {
    c.round().clamp(0.0, 255.0) as u8
}

impl Scenario {
    pub fn frames(&self) -> Vec<Frame> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| Frame::from_rgb(i, img.width, img.height, &img.rgb))
            .collect()
    }

    /// Writes a pipeline input directory: `manifest.json`, `frames/*.ppm`,
    /// `gaze.csv`, `ground_truth.csv`, `skin_pixels.csv`, `nonskin_pixels.csv`
    /// and the generating `scenario.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let frames_dir = dir.join("frames");
        std::fs::create_dir_all(&frames_dir).map_err(|e| Error::io(&frames_dir, e))?;
        let mut names = Vec::with_capacity(self.images.len());
        for (i, img) in self.images.iter().enumerate() {
            let rel = PathBuf::from("frames").join(format!("frame_{i:05}.ppm"));
            let path = dir.join(&rel);
            std::fs::write(&path, encode_ppm(img)).map_err(|e| Error::io(&path, e))?;
            names.push(rel);
        }
        let (w, h) = self.config.frame_size;
        let manifest = Manifest {
            frames: names,
            width: w,
            height: h,
            fps: 30.0,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        write_text(&dir.join("manifest.json"), &(json + "\n"))?;
        write_text(&dir.join("gaze.csv"), &with_header(gaze_track_to_csv(&self.gaze), "frame_index,x,y,valid"))?;
        write_text(
            &dir.join("ground_truth.csv"),
            &with_header(ground_truth_to_csv(&self.ground_truth), "label,start,end"),
        )?;
        write_text(&dir.join("skin_pixels.csv"), &with_header(uv_samples_to_csv(&self.skin_pixels), "u,v"))?;
        write_text(
            &dir.join("nonskin_pixels.csv"),
            &with_header(uv_samples_to_csv(&self.nonskin_pixels), "u,v"),
        )?;
        let cfg = serde_json::to_string_pretty(&self.config).expect("config serialises");
        write_text(&dir.join("scenario.json"), &(cfg + "\n"))?;
        Ok(())
    }
}

fn with_header(body: String, header: &str) -> String {
    if body.is_empty() {
        format!("{header}\n")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy_filters::{skin_posterior, train_skin_model};
    use crate::gaze_region::{extract_region, REGION_PIXELS, REGION_SIZE};

    fn small(intervals: Vec<(usize, usize)>, num_frames: usize) -> ScenarioConfig {
        ScenarioConfig {
            seed: 7,
            num_frames,
            action_intervals: intervals,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = small(vec![(5, 14)], 20);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate(&ScenarioConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.images, other.images);
    }

    #[test]
    fn no_actions_means_no_ground_truth() {
        let s = generate(&small(vec![], 15)).unwrap();
        assert!(s.ground_truth.is_empty());
        assert!(s.blob_masks.iter().all(Option::is_none));
        assert_eq!(s.skin_pixels.len(), SAMPLES_PER_CLASS);
        assert_eq!(s.nonskin_pixels.len(), SAMPLES_PER_CLASS);
    }

    #[test]
    fn interval_passes_through() {
        let s = generate(&small(vec![(50, 100)], 110)).unwrap();
        assert_eq!(s.ground_truth.len(), 1);
        assert_eq!((s.ground_truth[0].start, s.ground_truth[0].end), (50, 100));
        assert_eq!(s.images.len(), 110);
    }

    #[test]
    fn hand_fills_gaze_window_during_action() {
        let s = generate(&small(vec![(3, 40)], 45)).unwrap();
        let frames = s.frames();
        for k in 3..=40 {
            let region = extract_region(&frames[k], &s.gaze.sample(k)).expect("action gaze is valid");
            let mask = s.blob_masks[k].as_ref().unwrap();
            let covered = (0..REGION_SIZE)
                .flat_map(|y| (0..REGION_SIZE).map(move |x| (x, y)))
                .filter(|&(x, y)| mask[(region.origin_x + x, region.origin_y + y)])
                .count();
            let frac = covered as f64 / REGION_PIXELS as f64;
            assert!(frac > 0.3, "frame {k}: coverage {frac}");
        }
    }

    #[test]
    fn trained_model_recognises_hand_pixels() {
        let s = generate(&small(vec![(2, 9)], 12)).unwrap();
        let model = train_skin_model(&s.skin_pixels, &s.nonskin_pixels, 32, 0.5).unwrap();
        let frames = s.frames();
        let (mut n, mut confident) = (0usize, 0usize);
        for k in 2..=9 {
            let mask = s.blob_masks[k].as_ref().unwrap();
            let f = &frames[k];
            for y in 0..f.height() {
                for x in 0..f.width() {
                    if mask[(x, y)] {
                        n += 1;
                        if skin_posterior(f.u[(x, y)], f.v[(x, y)], &model) > 0.9 {
                            confident += 1;
                        }
                    }
                }
            }
        }
        assert!(n > 0);
        assert!(confident as f64 / n as f64 > 0.99, "{confident}/{n}");
    }

    #[test]
    fn saccade_schedule() {
        let s = generate(&small(vec![(30, 40)], 60)).unwrap();
        let valid: Vec<bool> = (0..60).map(|k| s.gaze.sample(k).valid).collect();
        // rest frames 0..=28 count 0..=28: every tenth is a saccade
        for k in [9, 19] {
            assert!(!valid[k]);
        }
        // the eye jumps onto and off the hand
        assert!(!valid[29]);
        assert!(!valid[41]);
        assert!((30..=40).all(|k| valid[k]));
        let rest_saccades = valid.iter().enumerate().filter(|&(k, v)| !v && !(30..=40).contains(&k)).count();
        assert_eq!(rest_saccades, 5);
    }

    #[test]
    fn suite_layout() {
        for seed in 1..=50 {
            let cfg = ScenarioConfig::suite(seed);
            cfg.validate().unwrap();
            assert_eq!(cfg.num_frames, 300);
            assert_eq!(cfg.action_intervals.len(), 3);
            let mut prev_end: Option<usize> = None;
            for &(s, e) in &cfg.action_intervals {
                assert!((40..=70).contains(&(e - s + 1)));
                let gap = match prev_end {
                    Some(p) => s - p - 1,
                    None => s,
                };
                assert!(gap >= 20, "seed {seed}: gap {gap}");
                prev_end = Some(e);
            }
            assert!(299 - prev_end.unwrap() >= 20);
        }
    }

    #[test]
    fn reflect_folds_into_range() {
        assert_eq!(reflect(15.0, 10.0, 20.0), 15.0);
        assert_eq!(reflect(23.0, 10.0, 20.0), 17.0);
        assert_eq!(reflect(7.0, 10.0, 20.0), 13.0);
        assert_eq!(reflect(41.0, 10.0, 20.0), 19.0);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            ScenarioConfig { frame_size: (80, 200), ..ScenarioConfig::default() },
            ScenarioConfig { num_frames: 0, ..ScenarioConfig::default() },
            small(vec![(10, 5)], 20),
            small(vec![(10, 25)], 20),
            small(vec![(0, 10), (10, 15)], 20),
            ScenarioConfig { foreground_speed: 0.0, ..small(vec![(1, 2)], 20) },
            ScenarioConfig { camera_jitter: -1.0, ..ScenarioConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(generate(&cfg), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn rng_is_reproducible_and_in_range() {
        let mut a = XorShift64Star::new(42);
        let mut b = XorShift64Star::new(42);
        for _ in 0..1000 {
            let x = a.next_f64();
            assert_eq!(x, b.next_f64());
            assert!((0.0..1.0).contains(&x));
        }
        assert!(XorShift64Star::new(0).next_u64() != 0);
    }
}
