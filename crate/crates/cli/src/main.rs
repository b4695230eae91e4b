//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use energy_screen::energy::Estimator;
use energy_screen::error::{Error, Result};
use energy_screen::harness::{
    cmd_classify, cmd_screen, cmd_simulate, noise_ratio_table, run_replicates, NoiseRatioTableConfig, Report,
    ReplicateConfig, ScreenRequest,
};
use energy_screen::kernel::GammaKernel;
use energy_screen::mars::{NoiseDist, ScreenConfig, ScreenMethod, SearchRange};
use energy_screen::matching::MatchingSolver;
use energy_screen::mixs::{ResampleConfig, ResampleScheme};
use energy_screen::simgen::ExampleSpec;

#[derive(Parser)]
#[command(name = "energy-screen", version, about = "Energy-distance feature screening and classification")]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen the features of a labelled CSV file.
    Screen {
        /// Labelled CSV input.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        screen: ScreenArgs,
        /// Directory for report.txt and CSV tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Screen a training file, fit the classifier and evaluate it on a test file.
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        screen: ScreenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a simulated training (and test) sample as CSV.
    Simulate {
        /// Design id, 1 to 7 (8 needs a user-supplied sampler and is library-only).
        #[arg(long)]
        example: u8,
        #[arg(long, default_value_t = 100)]
        n1: usize,
        #[arg(long, default_value_t = 100)]
        n2: usize,
        #[arg(long, default_value_t = 1000)]
        dim: usize,
        /// Test rows per class; 0 writes no test file.
        #[arg(long, default_value_t = 250)]
        test_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded replication study on a simulation design.
    Replicate {
        #[arg(long)]
        example: u8,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 100)]
        n1: usize,
        #[arg(long, default_value_t = 100)]
        n2: usize,
        #[arg(long, default_value_t = 1000)]
        dim: usize,
        /// Test rows per class; 0 skips classification.
        #[arg(long, default_value_t = 250)]
        test_n: usize,
        /// Comma-separated methods: wos, mars, pairs, mixs.
        #[arg(long, default_value = "mars,mixs", value_delimiter = ',')]
        method: Vec<ScreenMethod>,
        /// Comma-separated kernels: g1, g2, g3.
        #[arg(long, default_value = "g1,g2,g3", value_delimiter = ',')]
        gamma: Vec<GammaKernel>,
        #[command(flatten)]
        tuning: TuningArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest consecutive ratio of ordered energies on pure-noise data.
    NoiseRatio {
        /// Comma-separated total sample sizes.
        #[arg(long, default_value = "10,20,80", value_delimiter = ',')]
        n_grid: Vec<usize>,
        /// Maximum number of noise features.
        #[arg(long, default_value_t = 200)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value = "gaussian")]
        noise: NoiseDist,
        #[arg(long, default_value = "g1")]
        gamma: GammaKernel,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScreenArgs {
    /// wos (no screening), mars, pairs or mixs.
    #[arg(long, default_value = "mars")]
    method: ScreenMethod,
    #[arg(long, default_value = "g1")]
    gamma: GammaKernel,
    #[command(flatten)]
    tuning: TuningArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct TuningArgs {
    /// Lower end of the ratio search (1-based order position).
    #[arg(long, requires = "range_hi")]
    range_lo: Option<usize>,
    /// Upper end of the ratio search.
    #[arg(long, requires = "range_lo")]
    range_hi: Option<usize>,
    /// Search the full range 1..d-1 instead of the upper half.
    #[arg(long, conflicts_with = "range_lo")]
    full_range: bool,
    /// Resamples per pair test in mixed screening.
    #[arg(long, default_value_t = 200)]
    perm_count: usize,
    /// Draw resamples with replacement instead of permuting labels.
    #[arg(long)]
    bootstrap: bool,
    /// Energy estimator used for screening: v-statistic or unbiased.
    #[arg(long, default_value = "v-statistic")]
    estimator: Estimator,
    /// Use the greedy matching above this many features.
    #[arg(long, default_value_t = 2000)]
    exact_matching_up_to: usize,
}

impl TuningArgs {
    fn screen_config(&self) -> ScreenConfig {
        let range = match (self.range_lo, self.range_hi, self.full_range) {
            (Some(lo), Some(hi), _) => SearchRange::Explicit { lo, hi },
            (_, _, true) => SearchRange::Full,
            _ => SearchRange::UpperHalf,
        };
        ScreenConfig::default()
            .with_range(range)
            .with_estimator(self.estimator)
            .with_solver(MatchingSolver::Auto {
                exact_up_to: self.exact_matching_up_to,
            })
    }

    fn resample(&self) -> ResampleConfig {
        ResampleConfig {
            replicates: self.perm_count,
            scheme: if self.bootstrap { ResampleScheme::Bootstrap } else { ResampleScheme::Permutation },
        }
    }
}

impl ScreenArgs {
    fn request(&self) -> ScreenRequest {
        ScreenRequest {
            method: self.method,
            kernel: self.gamma.clone(),
            screen: self.tuning.screen_config(),
            resample: self.tuning.resample(),
            seed: self.seed,
        }
    }
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<()> {
    print!("{}", report.to_text());
    if let Some(dir) = out {
        for p in report.write_dir(dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Screen { input, screen, out } => {
            let (_, report) = cmd_screen(&input, &screen.request())?;
            emit(&report, out.as_ref())
        }
        Command::Classify { train, test, screen, out } => {
            let (_, report) = cmd_classify(&train, &test, &screen.request())?;
            emit(&report, out.as_ref())
        }
        Command::Simulate {
            example,
            n1,
            n2,
            dim,
            test_n,
            seed,
            out,
        } => {
            let spec = ExampleSpec::new(example, n1, n2, dim, seed)?;
            let test = (test_n > 0).then_some((test_n, test_n));
            let report = cmd_simulate(&spec, test, None, &out)?;
            emit(&report, None)
        }
        Command::Replicate {
            example,
            reps,
            n1,
            n2,
            dim,
            test_n,
            method,
            gamma,
            tuning,
            seed,
            out,
        } => {
            let mut cfg = ReplicateConfig::new(example, seed);
            cfg.reps = reps;
            cfg.n1 = n1;
            cfg.n2 = n2;
            cfg.d = dim;
            cfg.test = (test_n > 0).then_some((test_n, test_n));
            cfg.methods = method;
            cfg.kernels = gamma;
            cfg.screen = tuning.screen_config();
            cfg.resample = tuning.resample();
            let r = run_replicates(&cfg)?;
            emit(&r.report, out.as_ref())
        }
        Command::NoiseRatio {
            n_grid,
            dim,
            reps,
            noise,
            gamma,
            seed,
            out,
        } => {
            let cfg = NoiseRatioTableConfig {
                n_grid,
                d_cap: dim,
                reps,
                noise,
                kernel: gamma,
                seed,
            };
            let (_, report) = noise_ratio_table(&cfg)?;
            emit(&report, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
