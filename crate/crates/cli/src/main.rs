use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rlbsp::imageio::TemporalWindow;
use rlbsp::texture::OperatorKind;
use rlbsp_cli::commands::{self, BenchInput, EvaluateArgs};
use rlbsp_cli::{CliError, CliResult, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "rlbsp", version, about = "Background subtraction with RLBSP texture descriptors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one foreground mask per input frame.
    Subtract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score masks against ground truth and write a CSV report.
    Evaluate {
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Region-of-interest image; zero pixels are not scored.
        #[arg(long)]
        roi: Option<PathBuf>,
        /// Inclusive range of scored frame indices.
        #[arg(long, num_args = 2, value_names = ["FIRST", "LAST"])]
        window: Option<Vec<u32>>,
        #[arg(long)]
        out: PathBuf,
        /// Row label in the report.
        #[arg(long, default_value = "sequence")]
        category: String,
    },
    /// Generate a synthetic sequence with exact ground truth.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure descriptor and full-pipeline throughput.
    Bench {
        #[arg(long, conflicts_with = "synth")]
        input: Option<PathBuf>,
        /// Scene spec to generate in memory; a 320x240x100 scene is used
        /// when neither this nor --input is given.
        #[arg(long)]
        synth: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run and score every category/sequence of a CDnet-layout dataset.
    Cdnet {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to these categories.
        #[arg(long = "category")]
        categories: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    operator: Option<OperatorKind>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    min_matches: Option<usize>,
    #[arg(long)]
    rc: Option<u32>,
    #[arg(long)]
    rt: Option<u32>,
    #[arg(long)]
    phi: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn resolve(&self) -> CliResult<RunConfig> {
        let overrides = Overrides {
            operator: self.operator,
            tau: self.tau,
            samples: self.samples,
            min_matches: self.min_matches,
            rc: self.rc,
            rt: self.rt,
            phi: self.phi,
            seed: self.seed,
        };
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Subtract { input, output, run } => {
            let cfg = run.resolve()?;
            let summary = commands::subtract(&input, &output, &cfg)?;
            println!(
                "{} masks written to {}; {:.1} fps over {:.3} s",
                summary.frames,
                output.display(),
                summary.fps(),
                summary.elapsed.as_secs_f64()
            );
        }
        Command::Evaluate {
            masks,
            gt,
            roi,
            window,
            out,
            category,
        } => {
            let window = window
                .map(|w| TemporalWindow::new(w[0], w[1]))
                .transpose()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let table = commands::evaluate(&EvaluateArgs {
                masks,
                gt,
                roi,
                window,
                category,
            })?;
            commands::write_report(&table, &out)?;
            print!("{}", table.to_csv());
        }
        Command::Synth { spec, out } => {
            let scene = commands::synth(&spec, &out)?;
            println!("{} frames written to {}", scene.frames, out.display());
        }
        Command::Bench {
            input,
            synth,
            repeat,
            run,
        } => {
            let cfg = run.resolve()?;
            let source = match (&input, &synth) {
                (Some(dir), _) => BenchInput::Sequence(dir),
                (None, Some(spec)) => BenchInput::Scene(read_scene(spec)?),
                (None, None) => BenchInput::Scene(commands::default_bench_scene()),
            };
            print!("{}", commands::bench(source, &cfg, repeat)?.render());
        }
        Command::Cdnet {
            dataset,
            out,
            categories,
            run,
        } => {
            let cfg = run.resolve()?;
            let table = commands::cdnet(&dataset, &categories, &cfg, |seq, counts| {
                let fm = rlbsp::metrics::compute(counts).fmeasure;
                eprintln!("{}/{}: fm {fm:.4}", seq.category, seq.name);
            })?;
            commands::write_report(&table, &out)?;
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}

fn read_scene(path: &Path) -> CliResult<rlbsp::synth::SyntheticSceneSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(rlbsp::synth::SyntheticSceneSpec::from_key_values(&text)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
