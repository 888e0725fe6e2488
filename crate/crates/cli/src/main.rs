use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use egoseg::entropy_filters::{skin_map, train_skin_model};
use egoseg::evaluation::{self, LabeledVideo};
use egoseg::frame_io::{
    load_ground_truth, load_gaze_track, load_segments, load_sequence, load_uv_samples,
    segments_to_csv_with_comment, write_text,
};
use egoseg::pipeline::{extract_features_inspect, FrameTrace};
use egoseg::synthetic::generate;
use egoseg::{
    EvalReport, FlowMode, PipelineConfig, Plane, ScenarioConfig, SkinModel, SweepGrid, VideoFeatures,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "egoseg", version, about = "Gaze-based temporal segmentation of egocentric video")]
struct Cli {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for multi-video commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-frame feature trace CSV.
    Features {
        #[command(flatten)]
        run: RunArgs,
        /// Append the four orientation-bin masses to each row.
        #[arg(long)]
        histograms: bool,
        /// Write per-frame flow planes as CSV grids into this directory.
        #[arg(long)]
        flow_dump: Option<PathBuf>,
        /// Write per-frame skin posterior grids into this directory.
        #[arg(long)]
        skin_dump: Option<PathBuf>,
    },
    /// Detected action segments as `start,end` CSV.
    Segment {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score a segment CSV against ground truth; writes a JSON report.
    Eval {
        #[arg(long)]
        segments: PathBuf,
        #[arg(long)]
        ground_truth: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every threshold combination of a grid over labelled inputs.
    Sweep {
        /// Input directories, each with a `ground_truth.csv`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// JSON grid with `t_a`, `t_b`, `t_c`, `t_d` value lists.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Sort rows by F-measure, best first.
        #[arg(long)]
        ranked: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Train a skin colour model from labelled `u,v` pixel CSVs.
    TrainSkin {
        #[arg(long)]
        skin: PathBuf,
        #[arg(long)]
        nonskin: PathBuf,
        #[arg(long, default_value_t = 32)]
        bins: usize,
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a synthetic input directory.
    Synth {
        /// Scenario JSON; without it the standard suite layout for `--seed` is used.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Override the number of frames (actions past the end are dropped).
        #[arg(long)]
        frames: Option<usize>,
        /// Drop all actions.
        #[arg(long)]
        no_actions: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Input directories holding `manifest.json` and `gaze.csv`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output file for one input, output directory for several; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    t_a: Option<f64>,
    #[arg(long)]
    t_b: Option<f64>,
    #[arg(long)]
    t_c: Option<f64>,
    #[arg(long)]
    t_d: Option<f64>,
    #[arg(long)]
    min_run: Option<usize>,
    #[arg(long, value_enum)]
    flow_mode: Option<ModeArg>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Skin model JSON, overriding the config and input directory.
    #[arg(long)]
    skin_model: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Literal,
    Relaxation,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    #[serde(flatten)]
    pipeline: PipelineConfig,
    skin_model: Option<PathBuf>,
}

impl RunConfig {
    fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    fn apply(&mut self, o: &Overrides) {
        let p = &mut self.pipeline;
        let t = &mut p.thresholds;
        for (slot, value) in [(&mut t.t_a, o.t_a), (&mut t.t_b, o.t_b), (&mut t.t_c, o.t_c), (&mut t.t_d, o.t_d)] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(v) = o.min_run {
            p.min_run = v;
        }
        if let Some(m) = o.flow_mode {
            p.flow.mode = match m {
                ModeArg::Literal => FlowMode::LiteralRecursion,
                ModeArg::Relaxation => FlowMode::IterativeRelaxation,
            };
        }
        if let Some(v) = o.alpha {
            p.flow.alpha = v;
        }
        if let Some(v) = o.iterations {
            p.flow.iterations = v;
        }
        if let Some(v) = o.sigma {
            p.flow.gaussian_sigma = v;
        }
        if let Some(path) = &o.skin_model {
            self.skin_model = Some(path.clone());
        }
    }

    /// SHA-256 of the canonical JSON form.
    fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn is_config_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<ConfigError>() || e.downcast_ref::<egoseg::Error>().is_some_and(egoseg::Error::is_config)
    })
}

/// Error chain joined by `: `, skipping causes already quoted by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain().map(ToString::to_string) {
        if !out.contains(&cause) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&cause);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", describe(&err));
            ExitCode::from(if is_config_error(&err) { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(ConfigError("--jobs must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let config = cli.config.as_deref();
    match cli.command {
        Command::Features { run, histograms, flow_dump, skin_dump } => {
            let cfg = resolve_config(config, &run.overrides)?;
            let dumps = Dumps { flow: flow_dump, skin: skin_dump };
            for_each_input(&run, "features.csv", |input| {
                let video = process(input, &cfg, &dumps)?;
                Ok(video.to_csv(Some(&provenance(&cfg)), histograms))
            })
        }
        Command::Segment { run } => {
            let cfg = resolve_config(config, &run.overrides)?;
            for_each_input(&run, "segments.csv", |input| {
                let video = process(input, &cfg, &Dumps::default())?;
                let segments = video.segments(&cfg.pipeline.thresholds, cfg.pipeline.min_run);
                Ok(segments_to_csv_with_comment(&segments, &provenance(&cfg)))
            })
        }
        Command::Eval { segments, ground_truth, out } => {
            let cfg = resolve_config(config, &Overrides::default())?;
            let segs = load_segments(&segments)?;
            let gts = load_ground_truth(&ground_truth)?;
            let mut report = EvalReport::new(evaluation::evaluate_video(&segs, &gts)?);
            report.config_hash = Some(cfg.hash());
            emit(out.as_deref(), &report.to_json())
        }
        Command::Sweep { inputs, grid, ranked, out, overrides } => {
            let cfg = resolve_config(config, &overrides)?;
            let grid = match grid {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| path.display().to_string())?;
                    let grid: SweepGrid = serde_json::from_str(&text)
                        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                    grid.validate()?;
                    grid
                }
                None => SweepGrid::default(),
            };
            let videos = inputs
                .par_iter()
                .map(|input| {
                    let features = process(input, &cfg, &Dumps::default())?;
                    let path = input.join("ground_truth.csv");
                    let ground_truth = load_ground_truth(&path)?;
                    Ok(LabeledVideo { features, ground_truth })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mut results = evaluation::sweep(&videos, &grid, cfg.pipeline.min_run)?;
            if ranked {
                evaluation::rank_by_f_measure(&mut results);
            }
            emit(out.as_deref(), &evaluation::sweep_to_csv(&results, Some(&provenance(&cfg))))
        }
        Command::TrainSkin { skin, nonskin, bins, prior, out } => {
            let model = train_skin_model(&load_uv_samples(&skin)?, &load_uv_samples(&nonskin)?, bins, prior)?;
            emit(out.as_deref(), &(model.to_json() + "\n"))
        }
        Command::Synth { scenario, seed, frames, no_actions, out } => {
            let mut sc = match scenario {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| path.display().to_string())?;
                    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
                }
                None => ScenarioConfig::suite(seed),
            };
            if let Some(n) = frames {
                sc.num_frames = n;
                sc.action_intervals.retain(|&(_, e)| e < n);
            }
            if no_actions {
                sc.action_intervals.clear();
            }
            generate(&sc)?.write_to(&out)?;
            Ok(())
        }
    }
}

fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(overrides);
    cfg.pipeline.validate()?;
    Ok(cfg)
}

fn provenance(cfg: &RunConfig) -> String {
    format!("config={}", cfg.hash())
}

/// Runs `produce` on every input in parallel. One input writes to `--out` or
/// stdout; several write `<out>/<input name>/<file_name>`.
fn for_each_input(
    run: &RunArgs,
    file_name: &str,
    produce: impl Fn(&Path) -> anyhow::Result<String> + Sync,
) -> anyhow::Result<()> {
    if let [input] = run.inputs.as_slice() {
        return emit(run.out.as_deref(), &produce(input)?);
    }
    let Some(out_dir) = &run.out else {
        bail!("--out must name a directory when several inputs are given");
    };
    run.inputs.par_iter().try_for_each(|input| {
        let name = input.file_name().unwrap_or(input.as_os_str());
        let text = produce(input)?;
        write_text(&out_dir.join(name).join(file_name), &text)?;
        Ok(())
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_text(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Default)]
struct Dumps {
    flow: Option<PathBuf>,
    skin: Option<PathBuf>,
}

fn process(input: &Path, cfg: &RunConfig, dumps: &Dumps) -> anyhow::Result<VideoFeatures> {
    let frames = load_sequence(&input.join("manifest.json"))?;
    let gaze = load_gaze_track(&input.join("gaze.csv"))?;
    let skin = resolve_skin_model(input, cfg)?;
    let mut dump_error: Option<anyhow::Error> = None;
    let raw = extract_features_inspect(&frames, &gaze, &skin, &cfg.pipeline, |trace| {
        if dump_error.is_none() {
            if let Err(e) = write_dumps(trace, dumps, &skin) {
                dump_error = Some(e);
            }
        }
    });
    if let Some(e) = dump_error {
        return Err(e);
    }
    let mut video = VideoFeatures::from_raw(&raw);
    video.apply_thresholds(&cfg.pipeline.thresholds);
    Ok(video)
}

fn write_dumps(trace: &FrameTrace<'_>, dumps: &Dumps, skin: &SkinModel) -> anyhow::Result<()> {
    let k = trace.frame_index;
    if let (Some(dir), Some(flow)) = (&dumps.flow, trace.flow) {
        write_text(&dir.join(format!("flow_{k:05}_u.csv")), &grid_csv(&flow.u))?;
        write_text(&dir.join(format!("flow_{k:05}_v.csv")), &grid_csv(&flow.v))?;
    }
    if let (Some(dir), Some(region)) = (&dumps.skin, trace.region) {
        write_text(&dir.join(format!("skin_{k:05}.csv")), &grid_csv(&skin_map(region, skin)))?;
    }
    Ok(())
}

fn grid_csv(plane: &Plane<f64>) -> String {
    let mut out = String::new();
    for row in plane.as_slice().chunks(plane.width()) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a string");
        }
        out.push('\n');
    }
    out
}

/// Config path, then `skin_model.json` in the input, then training from the
/// input's labelled pixel CSVs.
fn resolve_skin_model(input: &Path, cfg: &RunConfig) -> anyhow::Result<SkinModel> {
    let stored = input.join("skin_model.json");
    let path = cfg.skin_model.clone().or_else(|| stored.exists().then_some(stored));
    if let Some(path) = path {
        let text = std::fs::read_to_string(&path).with_context(|| path.display().to_string())?;
        return SkinModel::from_json(&text).with_context(|| path.display().to_string());
    }
    let skin = load_uv_samples(&input.join("skin_pixels.csv"))
        .context("no skin model configured and no labelled skin pixels in the input")?;
    let nonskin = load_uv_samples(&input.join("nonskin_pixels.csv"))?;
    Ok(train_skin_model(&skin, &nonskin, 32, 0.5)?)
}
