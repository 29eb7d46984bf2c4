use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rlbsp::imageio::{list_numbered, load_frame, load_ground_truth, load_sequence, write_mask};
use rlbsp::imageio::TemporalWindow;
use rlbsp::metrics::{aggregate_counts, Averaging, ReportTable};
use rlbsp::synth::{write_sequence, SyntheticSceneSpec};
use rlbsp::texture::OperatorKind;
use rlbsp::{ConfusionCounts, Frame, Mask, Subtractor};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Output mask name for input frame `index`.
pub fn mask_name(index: u32) -> String {
    format!("bin{index:06}.pgm")
}

#[derive(Clone, Copy, Debug)]
pub struct SubtractSummary {
    pub frames: usize,
    /// Time spent inside the subtractor, excluding decode and encode.
    pub elapsed: Duration,
}

impl SubtractSummary {
    pub fn fps(&self) -> f64 {
        fps(self.frames, self.elapsed)
    }
}

fn fps(frames: usize, elapsed: Duration) -> f64 {
    let secs = elapsed.as_secs_f64();
    if secs > 0.0 {
        frames as f64 / secs
    } else {
        f64::INFINITY
    }
}

pub fn subtract(input: &Path, output: &Path, cfg: &RunConfig) -> CliResult<SubtractSummary> {
    let source = load_sequence(input)?;
    fs::create_dir_all(output)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", output.display())))?;
    let mut subtractor = Subtractor::new(cfg.texture_operator()?, cfg.model, cfg.seed)?;
    let mut elapsed = Duration::ZERO;
    let mut frames = 0;
    for item in source.decode() {
        let (index, frame) = item?;
        let start = Instant::now();
        let mask = subtractor.process(&frame)?;
        elapsed += start.elapsed();
        write_mask(mask.as_frame(), output.join(mask_name(index)))?;
        frames += 1;
    }
    Ok(SubtractSummary { frames, elapsed })
}

/// What `evaluate` scores and how.
#[derive(Clone, Debug)]
pub struct EvaluateArgs {
    pub masks: PathBuf,
    pub gt: PathBuf,
    pub roi: Option<PathBuf>,
    pub window: Option<TemporalWindow>,
    pub category: String,
}

/// Pairs `bin<N>.*` masks with `gt<N>.*` labels and scores them.
///
/// Within the window (everything when absent) both directories must hold
/// exactly the same frame indices.
pub fn evaluate_counts(args: &EvaluateArgs) -> CliResult<ConfusionCounts> {
    let masks = list_numbered(&args.masks, "bin")?;
    let gts = list_numbered(&args.gt, "gt")?;
    let inside = |i: u32| args.window.is_none_or(|w| w.contains(i));
    let mask_ids: Vec<u32> = masks.iter().map(|e| e.index).filter(|&i| inside(i)).collect();
    let gt_ids: Vec<u32> = gts.iter().map(|e| e.index).filter(|&i| inside(i)).collect();
    if gt_ids.is_empty() {
        return Err(CliError::Data(format!(
            "no ground-truth frames in {}",
            args.gt.display()
        )));
    }
    if mask_ids != gt_ids {
        let missing = gt_ids.iter().find(|i| !mask_ids.contains(i));
        let extra = mask_ids.iter().find(|i| !gt_ids.contains(i));
        return Err(CliError::Data(match (missing, extra) {
            (Some(i), _) => format!("no mask for ground-truth frame {i}"),
            (None, Some(i)) => format!("no ground truth for mask frame {i}"),
            (None, None) => "mask and ground-truth frames differ".to_string(),
        }));
    }
    let roi = args.roi.as_deref().map(load_frame).transpose()?;
    let mut counts = ConfusionCounts::default();
    for (m, g) in masks
        .iter()
        .filter(|e| inside(e.index))
        .zip(gts.iter().filter(|e| inside(e.index)))
    {
        let gt = load_ground_truth(&g.path)?;
        let mask = Mask::from_frame(load_frame(&m.path)?)?;
        counts.accumulate(&mask, &gt, roi.as_ref(), None, g.index)?;
    }
    Ok(counts)
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<ReportTable> {
    let counts = evaluate_counts(args)?;
    Ok(aggregate_counts(
        &[(args.category.clone(), counts)],
        Averaging::MeanOfSequences,
    )?)
}

pub fn synth(spec_path: &Path, out: &Path) -> CliResult<SyntheticSceneSpec> {
    let text = fs::read_to_string(spec_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec_path.display())))?;
    let spec = SyntheticSceneSpec::from_key_values(&text)?;
    write_sequence(&spec, out)?;
    Ok(spec)
}

/// Scene used by `bench` when no input is given.
pub fn default_bench_scene() -> SyntheticSceneSpec {
    let text = "width=320\nheight=240\nframes=100\nseed=1\nbackground=160\nnoise_sigma=5\n\
                square_side=20\nsquare_x=20\nsquare_y=110\nsquare_vx=2\nsquare_intensity=96\n";
    SyntheticSceneSpec::from_key_values(text).expect("valid built-in scene")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spread {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Spread {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        Spread {
            median,
            min: v[0],
            max: v[n - 1],
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub repeat: usize,
    /// Frames per second of the descriptor pass alone, per operator.
    pub descriptor_fps: Vec<(OperatorKind, Spread)>,
    /// Frames per second of descriptor + classify + update.
    pub pipeline: (OperatorKind, Spread),
    pub machine: String,
}

pub enum BenchInput<'a> {
    Sequence(&'a Path),
    Scene(SyntheticSceneSpec),
}

fn bench_frames(input: BenchInput<'_>) -> CliResult<Vec<Frame>> {
    match input {
        BenchInput::Sequence(dir) => {
            let source = load_sequence(dir)?;
            Ok(source
                .decode()
                .map(|r| r.map(|(_, f)| f))
                .collect::<rlbsp::Result<_>>()?)
        }
        BenchInput::Scene(spec) => Ok(spec.generate()?.map(|(f, _)| f).collect()),
    }
}

fn time_pipeline(frames: &[Frame], cfg: &RunConfig) -> CliResult<f64> {
    let mut subtractor = Subtractor::new(cfg.texture_operator()?, cfg.model, cfg.seed)?;
    let start = Instant::now();
    for frame in frames {
        std::hint::black_box(subtractor.process(frame)?);
    }
    Ok(fps(frames.len(), start.elapsed()))
}

/// Times the in-memory frames; one untimed warm-up pass precedes the
/// `repeat` measured passes of each figure.
pub fn bench(input: BenchInput<'_>, cfg: &RunConfig, repeat: usize) -> CliResult<BenchReport> {
    if repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let frames = bench_frames(input)?;
    let (width, height) = frames[0].dims();

    let mut descriptor_fps = Vec::new();
    for kind in OperatorKind::ALL {
        let op = match kind {
            k if k == cfg.operator => cfg.texture_operator()?,
            k => k.with_defaults(),
        };
        let mut runs = Vec::with_capacity(repeat);
        for pass in 0..=repeat {
            let start = Instant::now();
            for frame in &frames {
                std::hint::black_box(op.describe_frame(frame)?);
            }
            if pass > 0 {
                runs.push(fps(frames.len(), start.elapsed()));
            }
        }
        descriptor_fps.push((kind, Spread::of(&runs)));
    }

    time_pipeline(&frames, cfg)?;
    let runs = (0..repeat)
        .map(|_| time_pipeline(&frames, cfg))
        .collect::<CliResult<Vec<_>>>()?;

    Ok(BenchReport {
        width,
        height,
        frames: frames.len(),
        repeat,
        descriptor_fps,
        pipeline: (cfg.operator, Spread::of(&runs)),
        machine: machine_info(),
    })
}

impl BenchReport {
    pub fn render(&self) -> String {
        let mut out = format!(
            "machine: {}\nframes: {} x {}x{}, {} timed runs (median [min, max])\n",
            self.machine, self.frames, self.width, self.height, self.repeat
        );
        for (kind, s) in &self.descriptor_fps {
            out += &format!(
                "descriptor {:<6} {:>10.1} fps [{:.1}, {:.1}]\n",
                kind.name(),
                s.median,
                s.min,
                s.max
            );
        }
        let (kind, s) = &self.pipeline;
        out += &format!(
            "pipeline   {:<6} {:>10.1} fps [{:.1}, {:.1}]\n",
            kind.name(),
            s.median,
            s.min,
            s.max
        );
        out
    }
}

pub fn machine_info() -> String {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".to_string());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{cpu}; {threads} hardware threads; {}-{}; single-threaded run",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

/// A sequence found under a dataset root.
#[derive(Clone, Debug)]
pub struct DatasetSequence {
    pub category: String,
    pub name: String,
    pub path: PathBuf,
}

fn sorted_dirs(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::Io(format!("cannot read {}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn dir_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `ROOT/<category>/<sequence>/input`, in name order.
pub fn discover_dataset(root: &Path, only: &[String]) -> CliResult<Vec<DatasetSequence>> {
    let mut found = Vec::new();
    for cat in sorted_dirs(root)? {
        let category = dir_name(&cat);
        if !only.is_empty() && !only.contains(&category) {
            continue;
        }
        for seq in sorted_dirs(&cat)? {
            if seq.join("input").is_dir() {
                found.push(DatasetSequence {
                    category: category.clone(),
                    name: dir_name(&seq),
                    path: seq,
                });
            }
        }
    }
    if found.is_empty() {
        return Err(CliError::Data(format!(
            "no category/sequence/input directories under {}",
            root.display()
        )));
    }
    Ok(found)
}

/// Runs the subtractor on one sequence and scores it against its own
/// ground truth, ROI and temporal window, without writing masks.
pub fn score_sequence(dir: &Path, cfg: &RunConfig) -> CliResult<ConfusionCounts> {
    let source = load_sequence(dir)?;
    if !source.has_ground_truth() {
        return Err(CliError::Data(format!(
            "{} has no groundtruth/ directory",
            dir.display()
        )));
    }
    let mut subtractor = Subtractor::new(cfg.texture_operator()?, cfg.model, cfg.seed)?;
    let mut counts = ConfusionCounts::default();
    for item in source.decode() {
        let (index, frame) = item?;
        let mask = subtractor.process(&frame)?;
        if source.window().is_some_and(|w| !w.contains(index)) {
            continue;
        }
        let gt = source.load_ground_truth(index)?.ok_or_else(|| {
            CliError::Data(format!("no ground truth for frame {index} in {}", dir.display()))
        })?;
        counts.accumulate(&mask, &gt, source.roi(), None, index)?;
    }
    Ok(counts)
}

/// Per-sequence counts for a whole dataset, reported through `progress`.
pub fn cdnet(
    root: &Path,
    only: &[String],
    cfg: &RunConfig,
    mut progress: impl FnMut(&DatasetSequence, &ConfusionCounts),
) -> CliResult<ReportTable> {
    let mut per_sequence = Vec::new();
    for seq in discover_dataset(root, only)? {
        let counts = score_sequence(&seq.path, cfg)?;
        progress(&seq, &counts);
        per_sequence.push((seq.category.clone(), counts));
    }
    Ok(aggregate_counts(&per_sequence, Averaging::MeanOfSequences)?)
}

pub fn write_report(table: &ReportTable, out: &Path) -> CliResult<()> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(out, table.to_csv())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))
}
