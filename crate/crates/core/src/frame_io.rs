//! Frame sequences, gaze tracks, ground truth and segment lists on disk.
//!
//! Frames arrive as a JSON manifest listing binary PPM (P6, maxval 255) files.
//! Tabular data is plain CSV with a header row; lines starting with `#` are
//! treated as comments so provenance lines written by the CLI round-trip.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cut_detector::ActionSegment;
use crate::error::{Error, Result};
use crate::gaze_region::REGION_SIZE;
use crate::plane::Plane;

/// One video frame in full-range YUV 4:4:4.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub y: Plane<u8>,
    pub u: Plane<u8>,
    pub v: Plane<u8>,
}

impl Frame {
    pub fn from_rgb(index: usize, width: usize, height: usize, rgb: &[u8]) -> Frame {
        assert_eq!(rgb.len(), width * height * 3);
        let mut y = Vec::with_capacity(width * height);
        let mut u = Vec::with_capacity(width * height);
        let mut v = Vec::with_capacity(width * height);
        for px in rgb.chunks_exact(3) {
            let (yy, uu, vv) = convert_rgb_to_yuv(px[0], px[1], px[2]);
            y.push(yy);
            u.push(uu);
            v.push(vv);
        }
        Frame {
            index,
            y: Plane::from_vec(width, height, y),
            u: Plane::from_vec(width, height, u),
            v: Plane::from_vec(width, height, v),
        }
    }

    pub fn width(&self) -> usize {
        self.y.width()
    }

    pub fn height(&self) -> usize {
        self.y.height()
    }
}

/// BT.601 full-range RGB to YUV with chroma centred on 128.
pub fn convert_rgb_to_yuv(r: u8, g: u8, b: u8) -> (u8, u8, u8) {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let u = -0.169 * r - 0.331 * g + 0.5 * b + 128.0;
    let v = 0.5 * r - 0.419 * g - 0.081 * b + 128.0;
    (quantize(y), quantize(u), quantize(v))
}

fn quantize(x: f64) -> u8 {
    (x + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Frame sequence manifest. Frame paths are relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub frames: Vec<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub fps: f64,
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn load_sequence(manifest_path: &Path) -> Result<Vec<Frame>> {
    let manifest = load_manifest(manifest_path)?;
    if manifest.width < REGION_SIZE || manifest.height < REGION_SIZE {
        return Err(Error::parse(
            manifest_path,
            format!(
                "frames must be at least {REGION_SIZE}x{REGION_SIZE}, manifest declares {}x{}",
                manifest.width, manifest.height
            ),
        ));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new(""));
    manifest
        .frames
        .iter()
        .enumerate()
        .map(|(index, rel)| {
            let path = base.join(rel);
            let bytes = fs::read(&path).map_err(|e| Error::Image {
                index,
                path: path.clone(),
                reason: e.to_string(),
            })?;
            let image = decode_ppm(&bytes).map_err(|reason| Error::Image {
                index,
                path: path.clone(),
                reason,
            })?;
            if image.width != manifest.width || image.height != manifest.height {
                return Err(Error::Image {
                    index,
                    path,
                    reason: format!(
                        "dimension mismatch: {}x{} but manifest declares {}x{}",
                        image.width, image.height, manifest.width, manifest.height
                    ),
                });
            }
            Ok(Frame::from_rgb(index, image.width, image.height, &image.rgb))
        })
        .collect()
}

/// Interleaved 8-bit RGB image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.rgb);
    out
}

pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos).ok_or("missing magic number")?;
    if magic != b"P6" {
        return Err(format!(
            "unsupported magic {:?}, expected binary PPM (P6)",
            String::from_utf8_lossy(magic)
        ));
    }
    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
        let token = next_token(bytes, &mut pos).ok_or(format!("missing {name}"))?;
        *slot = std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(format!("malformed {name}"))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err("zero image dimension".into());
    }
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}, expected 255"));
    }
    // exactly one whitespace byte separates the header from the raster
    if bytes.get(pos).is_none_or(|b| !b.is_ascii_whitespace()) {
        return Err("missing whitespace after header".into());
    }
    pos += 1;
    let need = width * height * 3;
    let raster = &bytes[pos..];
    if raster.len() < need {
        return Err(format!(
            "truncated raster: {} bytes, expected {need}",
            raster.len()
        ));
    }
    Ok(RgbImage {
        width,
        height,
        rgb: raster[..need].to_vec(),
    })
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    (*pos > start).then(|| &bytes[start..*pos])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GazeSample {
    pub frame_index: usize,
    pub x: usize,
    pub y: usize,
    pub valid: bool,
}

impl GazeSample {
    pub fn saccade(frame_index: usize) -> Self {
        GazeSample {
            frame_index,
            x: 0,
            y: 0,
            valid: false,
        }
    }
}

/// Gaze samples keyed by frame. Frames without a row read as saccades.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GazeTrack {
    samples: BTreeMap<usize, GazeSample>,
}

impl GazeTrack {
    pub fn from_samples(samples: impl IntoIterator<Item = GazeSample>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for s in samples {
            if map.insert(s.frame_index, s).is_some() {
                return Err(Error::DuplicateFrame(s.frame_index));
            }
        }
        Ok(GazeTrack { samples: map })
    }

    pub fn sample(&self, frame_index: usize) -> GazeSample {
        self.samples
            .get(&frame_index)
            .copied()
            .unwrap_or_else(|| GazeSample::saccade(frame_index))
    }

    /// Samples in frame order.
    pub fn samples(&self) -> impl Iterator<Item = &GazeSample> {
        self.samples.values()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GazeRow {
    frame_index: usize,
    x: usize,
    y: usize,
    valid: u8,
}

pub fn load_gaze_track(path: &Path) -> Result<GazeTrack> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gaze_track(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::parse(path, reason),
        other => other,
    })
}

pub fn parse_gaze_track(text: &str) -> Result<GazeTrack> {
    let rows: Vec<GazeRow> = read_rows(text)?;
    let samples = rows
        .into_iter()
        .map(|r| {
            let valid = match r.valid {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::parse(
                        "",
                        format!("frame {}: valid must be 0 or 1, got {other}", r.frame_index),
                    ))
                }
            };
            Ok(GazeSample {
                frame_index: r.frame_index,
                x: r.x,
                y: r.y,
                valid,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GazeTrack::from_samples(samples)
}

pub fn gaze_track_to_csv(track: &GazeTrack) -> String {
    write_rows(track.samples().map(|s| GazeRow {
        frame_index: s.frame_index,
        x: s.x,
        y: s.y,
        valid: u8::from(s.valid),
    }))
}

/// A labelled, inclusive ground-truth interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthSegment {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

impl GroundTruthSegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn load_ground_truth(path: &Path) -> Result<Vec<GroundTruthSegment>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ground_truth(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::parse(path, reason),
        other => other,
    })
}

/// Parses and validates ground truth. The returned list is sorted by start frame.
pub fn parse_ground_truth(text: &str) -> Result<Vec<GroundTruthSegment>> {
    let mut segments: Vec<GroundTruthSegment> = read_rows(text)?;
    for s in &segments {
        if s.start > s.end {
            return Err(Error::InvertedSegment {
                label: s.label.clone(),
                start: s.start,
                end: s.end,
            });
        }
    }
    segments.sort_by_key(|s| (s.start, s.end));
    for pair in segments.windows(2) {
        if pair[1].start <= pair[0].end {
            return Err(Error::Overlap {
                first: (pair[0].start, pair[0].end),
                second: (pair[1].start, pair[1].end),
            });
        }
    }
    Ok(segments)
}

pub fn ground_truth_to_csv(segments: &[GroundTruthSegment]) -> String {
    write_rows(segments.iter())
}

pub fn segments_to_csv(segments: &[ActionSegment]) -> String {
    if segments.is_empty() {
        return "start,end\n".to_string();
    }
    write_rows(segments.iter())
}

pub fn segments_to_csv_with_comment(segments: &[ActionSegment], comment: &str) -> String {
    let body = segments_to_csv(segments);
    format!("# {comment}\n{body}")
}

pub fn parse_segments(text: &str) -> Result<Vec<ActionSegment>> {
    let segments: Vec<ActionSegment> = read_rows(text)?;
    for s in &segments {
        if s.start > s.end {
            return Err(Error::InvertedSegment {
                label: String::new(),
                start: s.start,
                end: s.end,
            });
        }
    }
    Ok(segments)
}

pub fn load_segments(path: &Path) -> Result<Vec<ActionSegment>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_segments(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::parse(path, reason),
        other => other,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct UvRow {
    u: u8,
    v: u8,
}

/// Reads `u,v` pixel samples used to train a skin model.
pub fn load_uv_samples(path: &Path) -> Result<Vec<(u8, u8)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows: Vec<UvRow> = read_rows(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::parse(path, reason),
        other => other,
    })?;
    Ok(rows.into_iter().map(|r| (r.u, r.v)).collect())
}

pub fn uv_samples_to_csv(samples: &[(u8, u8)]) -> String {
    write_rows(samples.iter().map(|&(u, v)| UvRow { u, v }))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_rows<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::parse("", format!("row {}: {e}", i + 1))))
        .collect()
}

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut wrote_any = false;
    for row in rows {
        writer.serialize(row).expect("in-memory CSV write");
        wrote_any = true;
    }
    let bytes = writer.into_inner().expect("in-memory CSV flush");
    let text = String::from_utf8(bytes).expect("CSV output is UTF-8");
    if wrote_any {
        text
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn yuv_reference_colours() {
        assert_eq!(convert_rgb_to_yuv(0, 0, 0), (0, 128, 128));
        assert_eq!(convert_rgb_to_yuv(255, 255, 255), (255, 128, 128));
        assert_eq!(convert_rgb_to_yuv(255, 0, 0), (76, 85, 255));
    }

    #[test]
    fn yuv_corner_colours_in_range() {
        for bits in 0..8u8 {
            let c = |b: u8| if bits & b != 0 { 255 } else { 0 };
            let (y, u, v) = convert_rgb_to_yuv(c(1), c(2), c(4));
            // u8 already bounds the range; check the unclamped values agree
            let (r, g, b) = (f64::from(c(1)), f64::from(c(2)), f64::from(c(4)));
            assert!((f64::from(y) - (0.299 * r + 0.587 * g + 0.114 * b)).abs() <= 0.5);
            let _ = (u, v);
        }
    }

    proptest! {
        #[test]
        fn grey_maps_to_neutral_chroma(g in 0u8..=255) {
            let (_, u, v) = convert_rgb_to_yuv(g, g, g);
            prop_assert!((i32::from(u) - 128).abs() <= 1);
            prop_assert!((i32::from(v) - 128).abs() <= 1);
        }

        #[test]
        fn gaze_csv_round_trip(rows in proptest::collection::btree_map(0usize..500, (0usize..640, 0usize..480, any::<bool>()), 0..40)) {
            let track = GazeTrack::from_samples(rows.into_iter().map(|(frame_index, (x, y, valid))| GazeSample { frame_index, x, y, valid })).unwrap();
            let again = parse_gaze_track(&gaze_track_to_csv(&track)).unwrap();
            prop_assert_eq!(track, again);
        }

        #[test]
        fn ground_truth_csv_round_trip(lens in proptest::collection::vec((1usize..30, 0usize..10), 0..8)) {
            let mut next = 0;
            let gts: Vec<_> = lens.iter().enumerate().map(|(i, &(len, gap))| {
                let start = next + gap;
                next = start + len;
                GroundTruthSegment { label: format!("act-{i}"), start, end: start + len - 1 }
            }).collect();
            let text = ground_truth_to_csv(&gts);
            let again = if text.is_empty() { Vec::new() } else { parse_ground_truth(&text).unwrap() };
            prop_assert_eq!(gts, again);
        }
    }

    #[test]
    fn gaze_rows_parse() {
        let track = parse_gaze_track("frame_index,x,y,valid\n5,120,90,1\n6,0,0,0\n").unwrap();
        assert_eq!(
            track.sample(5),
            GazeSample {
                frame_index: 5,
                x: 120,
                y: 90,
                valid: true
            }
        );
        assert!(!track.sample(6).valid);
        // absent frame reads as saccade
        assert!(!track.sample(7).valid);
    }

    #[test]
    fn duplicate_gaze_frame_rejected() {
        let err = parse_gaze_track("frame_index,x,y,valid\n5,1,1,1\n5,2,2,1\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateFrame(5)));
    }

    #[test]
    fn non_numeric_gaze_rejected() {
        assert!(parse_gaze_track("frame_index,x,y,valid\n5,abc,1,1\n").is_err());
        assert!(parse_gaze_track("frame_index,x,y,valid\n5,1,1,2\n").is_err());
    }

    #[test]
    fn ground_truth_rows() {
        let gts = parse_ground_truth("label,start,end\ngrab-mug,10,42\n").unwrap();
        assert_eq!(
            gts,
            vec![GroundTruthSegment {
                label: "grab-mug".into(),
                start: 10,
                end: 42
            }]
        );
        assert!(matches!(
            parse_ground_truth("label,start,end\nstir,42,40\n"),
            Err(Error::InvertedSegment { .. })
        ));
        assert!(matches!(
            parse_ground_truth("label,start,end\na,0,10\nb,8,20\n"),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn segments_csv_skips_comment_lines() {
        let segs = vec![ActionSegment { start: 3, end: 5 }];
        let text = segments_to_csv_with_comment(&segs, "config=abc");
        assert!(text.starts_with("# config=abc\nstart,end\n"));
        assert_eq!(parse_segments(&text).unwrap(), segs);
        let empty = segments_to_csv_with_comment(&[], "x");
        assert_eq!(empty, "# x\nstart,end\n");
        assert!(parse_segments(&empty).unwrap().is_empty());
    }

    #[test]
    fn ppm_round_trip_and_errors() {
        let img = RgbImage {
            width: 2,
            height: 1,
            rgb: vec![1, 2, 3, 4, 5, 6],
        };
        assert_eq!(decode_ppm(&encode_ppm(&img)).unwrap(), img);
        let with_comment = b"P6\n# made by hand\n2 1\n255\n\x01\x02\x03\x04\x05\x06";
        assert_eq!(decode_ppm(with_comment).unwrap(), img);
        assert!(decode_ppm(b"P5\n2 1\n255\n\x00\x00").is_err());
        assert!(decode_ppm(b"P6\n2 1\n65535\n").is_err());
        assert!(decode_ppm(b"P6\n2 1\n255\n\x00").is_err());
        assert!(decode_ppm(b"P6\nx 1\n255\n").is_err());
    }

    fn write_sequence(dir: &Path, files: &[(&str, usize, usize)], declared: (usize, usize)) -> PathBuf {
        for &(name, w, h) in files {
            let img = RgbImage {
                width: w,
                height: h,
                rgb: vec![0; w * h * 3],
            };
            fs::write(dir.join(name), encode_ppm(&img)).unwrap();
        }
        let manifest = Manifest {
            frames: files.iter().map(|f| PathBuf::from(f.0)).collect(),
            width: declared.0,
            height: declared.1,
            fps: 30.0,
        };
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string(&manifest).unwrap()).unwrap();
        path
    }

    #[test]
    fn load_sequence_orders_frames_and_converts() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_sequence(
            dir.path(),
            &[("a.ppm", 64, 64), ("b.ppm", 64, 64), ("c.ppm", 64, 64)],
            (64, 64),
        );
        let frames = load_sequence(&path).unwrap();
        assert_eq!(frames.iter().map(|f| f.index).collect::<Vec<_>>(), [0, 1, 2]);
        assert!(frames[0].y.as_slice().iter().all(|&y| y == 0));
        assert!(frames[0].u.as_slice().iter().all(|&u| u == 128));
        assert!(frames[0].v.as_slice().iter().all(|&v| v == 128));
    }

    #[test]
    fn load_sequence_reports_offending_frame() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_sequence(dir.path(), &[("a.ppm", 64, 64), ("b.ppm", 64, 60)], (64, 64));
        match load_sequence(&path).unwrap_err() {
            Error::Image { index, reason, .. } => {
                assert_eq!(index, 1);
                assert!(reason.contains("dimension mismatch"));
            }
            other => panic!("unexpected {other:?}"),
        }

        let manifest = Manifest {
            frames: vec!["missing.ppm".into()],
            width: 64,
            height: 64,
            fps: 30.0,
        };
        fs::write(&path, serde_json::to_string(&manifest).unwrap()).unwrap();
        let msg = load_sequence(&path).unwrap_err().to_string();
        assert!(msg.contains("missing.ppm"), "{msg}");
    }
}
