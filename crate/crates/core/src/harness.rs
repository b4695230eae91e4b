//! End-to-end runs: screening and classification of data files, simulation
//! output, seeded replication studies and the pure-noise ratio study.
//!
//! Every run returns a [`Report`] holding a metadata block and one or more
//! [`Table`]s, renderable as aligned text or CSV. Replicates are distributed
//! over the rayon pool and gathered in replicate order, and every replicate
//! draws from its own derived seed, so reports do not depend on the number
//! of threads.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::classify::{fit_discriminant, misclassification_rate, predict_rows};
use crate::csvio::{read_labeled_csv, read_sample, write_sample};
use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::mars::{mars_screen, noise_ratio_study, NoiseDist, NoiseRatioConfig, ScreenConfig, ScreenMethod, ScreenedSet};
use crate::mixs::{mixs_screen, ResampleConfig};
use crate::pairs::pairs_screen;
use crate::sample::TwoClassSample;
use crate::seed::derive_seed_path;
use crate::simgen::{generate_with, true_signals, BivariateSampler, ExampleSpec, TrueSignals};
use crate::sum::{pairwise_mean, pairwise_sum};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance attached to every report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    /// First 16 hex digits of the SHA-256 of the canonical configuration text.
    pub config_hash: String,
    pub seed: u64,
    pub config: String,
}

impl Metadata {
    pub fn new(command: &str, config: String, seed: u64) -> Self {
        let digest = Sha256::digest(config.as_bytes());
        let config_hash = digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Metadata {
            command: command.to_string(),
            version: VERSION.to_string(),
            config_hash,
            seed,
            config,
        }
    }

    fn table(&self) -> Table {
        let mut t = Table::new("metadata", &["key", "value"]);
        t.push(vec!["command".into(), self.command.clone()]);
        t.push(vec!["version".into(), self.version.clone()]);
        t.push(vec!["config_hash".into(), self.config_hash.clone()]);
        t.push(vec!["seed".into(), self.seed.to_string()]);
        t.push(vec!["config".into(), self.config.clone()]);
        t
    }
}

/// A named table of string cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_text(&self) -> String {
        let ncol = self.headers.len();
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (c, cell) in r.iter().enumerate().take(ncol) {
                width[c] = width[c].max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (c, cell) in cells.iter().enumerate() {
                if c > 0 {
                    s.push_str("  ");
                }
                let pad = width[c] - cell.chars().count();
                s.push_str(cell);
                if c + 1 < cells.len() {
                    s.extend(std::iter::repeat_n(' ', pad));
                }
            }
            s.push('\n');
            s
        };
        let mut out = format!("== {} ==\n", self.name);
        out.push_str(&line(&self.headers));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

/// Output of a command: metadata, free-form notes and tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub metadata: Metadata,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.metadata.table().to_text();
        if !self.notes.is_empty() {
            out.push_str("== notes ==\n");
            for n in &self.notes {
                out.push_str(n);
                out.push('\n');
            }
        }
        for t in &self.tables {
            out.push('\n');
            out.push_str(&t.to_text());
        }
        out
    }

    /// Writes `report.txt`, `metadata.csv` and one `<table>.csv` per table
    /// into `dir`, creating it if needed. Returns the written paths.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(io(&p))?;
            written.push(p);
            Ok(())
        };
        put("report.txt".into(), self.to_text())?;
        put("metadata.csv".into(), self.metadata.table().to_csv())?;
        for t in &self.tables {
            put(format!("{}.csv", t.name), t.to_csv())?;
        }
        Ok(written)
    }
}

fn fmt_f(v: f64) -> String {
    v.to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f)
}

/// How to screen a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreenRequest {
    pub method: ScreenMethod,
    pub kernel: GammaKernel,
    pub screen: ScreenConfig,
    pub resample: ResampleConfig,
    pub seed: u64,
}

impl ScreenRequest {
    pub fn new(method: ScreenMethod, kernel: GammaKernel) -> Self {
        ScreenRequest {
            method,
            kernel,
            screen: ScreenConfig::default(),
            resample: ResampleConfig::default(),
            seed: 0,
        }
    }

    fn describe(&self) -> String {
        format!(
            "method={} gamma={} range={:?} floor={:e} estimator={} solver={:?} resamples={} scheme={} seed={}",
            self.method,
            self.kernel,
            self.screen.range,
            self.screen.energy_floor,
            self.screen.estimator.name(),
            self.screen.solver,
            self.resample.replicates,
            self.resample.scheme.name(),
            self.seed
        )
    }
}

/// Runs the requested screening procedure.
pub fn screen(sample: &TwoClassSample, req: &ScreenRequest) -> Result<ScreenedSet> {
    match req.method {
        ScreenMethod::Unscreened => Ok(ScreenedSet::unscreened(sample.dim())),
        ScreenMethod::Marginal => mars_screen(sample, &req.kernel, &req.screen),
        ScreenMethod::Paired => pairs_screen(sample, &req.kernel, &req.screen, req.seed),
        ScreenMethod::Mixed => mixs_screen(sample, &req.kernel, &req.screen, &req.resample, req.seed),
    }
}

fn names_of(sample: &TwoClassSample) -> impl Fn(usize) -> String + '_ {
    move |k| sample.feature_name(k)
}

fn screen_tables(sample: &TwoClassSample, set: &ScreenedSet) -> (Vec<String>, Vec<Table>) {
    let name = names_of(sample);
    let list = |v: &[usize]| v.iter().map(|&k| name(k)).collect::<Vec<_>>().join(" ");
    let plist = |v: &[(usize, usize)]| {
        v.iter()
            .map(|&(i, j)| format!("{{{},{}}}", name(i), name(j)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut notes = vec![
        format!("method: {}", set.method),
        format!("retained single features: [{}]", list(&set.marginal)),
        format!("retained pairs: [{}]", plist(&set.pairs)),
        format!("t_hat: {}  s_hat: {}", set.t_hat, set.s_hat),
        format!("dropped features: {}", set.dropped().len()),
    ];
    if set.padded {
        notes.push("odd dimension: one standard normal padding column was appended for matching; it is excluded from all results".into());
    }
    if set.null_warning {
        notes.push("warning: the cut lies at the energy floor; the data look like pure noise".into());
    }

    let mut tables = Vec::new();
    let mut summary = Table::new("screened", &["kind", "feature_i", "feature_j", "index_i", "index_j"]);
    for &k in &set.marginal {
        summary.push(vec!["single".into(), name(k), String::new(), (k + 1).to_string(), String::new()]);
    }
    for &(i, j) in &set.pairs {
        summary.push(vec!["pair".into(), name(i), name(j), (i + 1).to_string(), (j + 1).to_string()]);
    }
    tables.push(summary);

    match set.method {
        ScreenMethod::Marginal => {
            let mut t = Table::new("energies", &["index", "feature", "energy", "retained"]);
            for (k, e) in set.profile.iter().enumerate() {
                t.push(vec![(k + 1).to_string(), name(k), fmt_f(*e), set.contains_marginal(k).to_string()]);
            }
            tables.push(t);
        }
        ScreenMethod::Paired | ScreenMethod::Mixed => {
            let mut t = Table::new("pair_energies", &["index_i", "index_j", "feature_i", "feature_j", "energy"]);
            for (&(i, j), e) in set.matching.iter().zip(&set.profile) {
                t.push(vec![(i + 1).to_string(), (j + 1).to_string(), name(i), name(j), fmt_f(*e)]);
            }
            tables.push(t);
            if set.method == ScreenMethod::Mixed {
                let mut t = Table::new("verdicts", &["index_i", "index_j", "p1", "p2", "p3", "p4", "verdict"]);
                for v in &set.verdicts {
                    let (i, j) = v.pair;
                    let pad = if j >= set.dim { "pad".to_string() } else { (j + 1).to_string() };
                    let mut row = vec![(i + 1).to_string(), pad];
                    row.extend(v.pvalues.iter().map(|p| fmt_f(*p)));
                    row.push(v.verdict.name().into());
                    t.push(row);
                }
                tables.push(t);
            }
        }
        ScreenMethod::Unscreened => {}
    }
    (notes, tables)
}

/// Screens the labelled CSV at `input`.
pub fn cmd_screen(input: &Path, req: &ScreenRequest) -> Result<(ScreenedSet, Report)> {
    let sample = read_sample(input)?;
    let set = screen(&sample, req)?;
    let (notes, tables) = screen_tables(&sample, &set);
    let meta = Metadata::new("screen", format!("input={} {}", input.display(), req.describe()), req.seed);
    Ok((set, Report { metadata: meta, notes, tables }))
}

/// Screens `train`, fits the classifier on it and evaluates on `test`.
pub fn cmd_classify(train: &Path, test: &Path, req: &ScreenRequest) -> Result<(f64, Report)> {
    let sample = read_sample(train)?;
    let test_rows = read_labeled_csv(test)?;
    if test_rows.dim() != sample.dim() {
        return Err(Error::data(format!(
            "training data has {} features but test data has {}",
            sample.dim(),
            test_rows.dim()
        )));
    }
    if test_rows.is_empty() {
        return Err(Error::data(format!("{}: no test rows", test.display())));
    }
    let set = screen(&sample, req)?;
    let model = fit_discriminant(&sample, &set, &req.kernel)?;
    let predicted = predict_rows(&model, test_rows.rows.view())?;
    let wrong = predicted.iter().zip(&test_rows.labels).filter(|(p, l)| p != l).count();
    let rate = wrong as f64 / predicted.len() as f64;

    let (mut notes, mut tables) = screen_tables(&sample, &set);
    notes.push(format!("test rows: {}  misclassified: {wrong}  rate: {rate}", predicted.len()));
    let mut t = Table::new("predictions", &["row", "label", "predicted"]);
    for (r, (p, l)) in predicted.iter().zip(&test_rows.labels).enumerate() {
        t.push(vec![(r + 1).to_string(), l.as_u8().to_string(), p.as_u8().to_string()]);
    }
    tables.push(t);
    let mut s = Table::new("classification", &["method", "gamma", "test_rows", "misclassified", "rate"]);
    s.push(vec![
        req.method.to_string(),
        req.kernel.to_string(),
        predicted.len().to_string(),
        wrong.to_string(),
        fmt_f(rate),
    ]);
    tables.push(s);
    let meta = Metadata::new(
        "classify",
        format!("train={} test={} {}", train.display(), test.display(), req.describe()),
        req.seed,
    );
    Ok((rate, Report { metadata: meta, notes, tables }))
}

/// Draws a training (and optionally test) sample of a design and writes them
/// to `train.csv` / `test.csv` in `out_dir`.
pub fn cmd_simulate(
    spec: &ExampleSpec,
    test_sizes: Option<(usize, usize)>,
    bivariate: Option<Arc<dyn BivariateSampler>>,
    out_dir: &Path,
) -> Result<Report> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let train = generate_with(spec, bivariate.clone())?;
    let train_path = out_dir.join("train.csv");
    write_sample(&train_path, &train)?;
    let mut files = Table::new("files", &["role", "path", "n1", "n2", "d"]);
    files.push(vec![
        "train".into(),
        train_path.display().to_string(),
        spec.n1.to_string(),
        spec.n2.to_string(),
        spec.d.to_string(),
    ]);
    if let Some((t1, t2)) = test_sizes {
        let tspec = spec.with_sizes(t1, t2).with_seed(derive_seed_path(spec.seed, &[1]));
        let test = generate_with(&tspec, bivariate)?;
        let test_path = out_dir.join("test.csv");
        write_sample(&test_path, &test)?;
        files.push(vec![
            "test".into(),
            test_path.display().to_string(),
            t1.to_string(),
            t2.to_string(),
            spec.d.to_string(),
        ]);
    }
    let truth = true_signals(spec.id);
    let notes = vec![format!(
        "signal features (1-based): singles {:?}, pairs {:?}",
        truth.marginal.iter().map(|k| k + 1).collect::<Vec<_>>(),
        truth.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect::<Vec<_>>()
    )];
    let meta = Metadata::new(
        "simulate",
        format!("example={} n1={} n2={} d={} test={test_sizes:?}", spec.id, spec.n1, spec.n2, spec.d),
        spec.seed,
    );
    Ok(Report {
        metadata: meta,
        notes,
        tables: vec![files],
    })
}

/// A seeded replication study on one simulation design.
#[derive(Clone)]
pub struct ReplicateConfig {
    pub example: u8,
    pub n1: usize,
    pub n2: usize,
    pub d: usize,
    /// Test sizes per class; `None` skips classification.
    pub test: Option<(usize, usize)>,
    pub reps: usize,
    pub seed: u64,
    pub methods: Vec<ScreenMethod>,
    pub kernels: Vec<GammaKernel>,
    pub screen: ScreenConfig,
    pub resample: ResampleConfig,
    pub bivariate: Option<Arc<dyn BivariateSampler>>,
}

impl std::fmt::Debug for ReplicateConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.describe())
    }
}

impl ReplicateConfig {
    /// Training sizes 100 per class, test sizes 250 per class (200 per class
    /// for training in design 8), `d = 1000`, 100 replicates, MarS and MixS
    /// with all three built-in kernels.
    pub fn new(example: u8, seed: u64) -> Self {
        let n = if example == 8 { 200 } else { 100 };
        ReplicateConfig {
            example,
            n1: n,
            n2: n,
            d: 1000,
            test: Some((250, 250)),
            reps: 100,
            seed,
            methods: vec![ScreenMethod::Marginal, ScreenMethod::Mixed],
            kernels: GammaKernel::BUILTIN.to_vec(),
            screen: ScreenConfig::default(),
            resample: ResampleConfig::default(),
            bivariate: None,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "example={} n1={} n2={} d={} test={:?} reps={} methods=[{}] gammas=[{}] range={:?} estimator={} solver={:?} resamples={} scheme={} seed={}",
            self.example,
            self.n1,
            self.n2,
            self.d,
            self.test,
            self.reps,
            self.methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
            self.kernels.iter().map(|k| k.name().to_string()).collect::<Vec<_>>().join(","),
            self.screen.range,
            self.screen.estimator.name(),
            self.screen.solver,
            self.resample.replicates,
            self.resample.scheme.name(),
            self.seed
        )
    }

    fn validate(&self) -> Result<()> {
        ExampleSpec::new(self.example, self.n1, self.n2, self.d, self.seed)?;
        if self.reps == 0 {
            return Err(Error::config("at least one replicate is required"));
        }
        if self.methods.is_empty() || self.kernels.is_empty() {
            return Err(Error::config("at least one method and one kernel are required"));
        }
        if let Some((a, b)) = self.test {
            if a + b == 0 {
                return Err(Error::config("test set must not be empty"));
            }
        }
        Ok(())
    }
}

/// Outcome of one (replicate, method, kernel) run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub rep: usize,
    pub method: ScreenMethod,
    pub kernel: String,
    /// True signal features retained in any form.
    pub signals: usize,
    /// Non-signal features retained in any form.
    pub noise: usize,
    /// True signal pairs retained as pairs.
    pub pairs_found: usize,
    /// Retained features coincide with the true signal features.
    pub exact: bool,
    pub error_rate: Option<f64>,
}

/// Mean and standard error per (method, kernel).
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: ScreenMethod,
    pub kernel: String,
    pub reps: usize,
    pub signals_mean: f64,
    pub signals_se: f64,
    pub noise_mean: f64,
    pub noise_se: f64,
    pub pairs_mean: f64,
    pub exact_rate: f64,
    pub error_mean: Option<f64>,
    pub error_se: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateReport {
    pub records: Vec<ReplicateRecord>,
    pub summary: Vec<SummaryRow>,
    pub report: Report,
}

impl ReplicateReport {
    pub fn row(&self, method: ScreenMethod, kernel: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.method == method && r.kernel == kernel)
    }

    pub fn records_for(&self, method: ScreenMethod, kernel: &str) -> Vec<&ReplicateRecord> {
        self.records.iter().filter(|r| r.method == method && r.kernel == kernel).collect()
    }
}

/// Mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = pairwise_mean(values);
    if n < 2 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn score_screen(set: &ScreenedSet, truth: &TrueSignals) -> (usize, usize, usize, bool) {
    let retained = set.retained();
    let signal = truth.features();
    let signals = retained.iter().filter(|k| signal.binary_search(k).is_ok()).count();
    let noise = retained.len() - signals;
    let pairs_found = truth.pairs.iter().filter(|&&(i, j)| set.contains_pair(i, j)).count();
    (signals, noise, pairs_found, retained == signal)
}

fn run_one(cfg: &ReplicateConfig, rep: usize) -> Result<Vec<ReplicateRecord>> {
    let train_spec = ExampleSpec::new(
        cfg.example,
        cfg.n1,
        cfg.n2,
        cfg.d,
        derive_seed_path(cfg.seed, &[rep as u64, 0]),
    )?;
    let train = generate_with(&train_spec, cfg.bivariate.clone())?;
    let test = match cfg.test {
        Some((t1, t2)) => Some(generate_with(
            &train_spec
                .with_sizes(t1, t2)
                .with_seed(derive_seed_path(cfg.seed, &[rep as u64, 1])),
            cfg.bivariate.clone(),
        )?),
        None => None,
    };
    let truth = true_signals(cfg.example);
    let mut out = Vec::new();
    for kernel in &cfg.kernels {
        for &method in &cfg.methods {
            let req = ScreenRequest {
                method,
                kernel: kernel.clone(),
                screen: cfg.screen,
                resample: cfg.resample,
                seed: derive_seed_path(cfg.seed, &[rep as u64, 2]),
            };
            let set = screen(&train, &req)?;
            let (signals, noise, pairs_found, exact) = score_screen(&set, &truth);
            let error_rate = match &test {
                Some(t) => Some(misclassification_rate(&fit_discriminant(&train, &set, kernel)?, t)?),
                None => None,
            };
            out.push(ReplicateRecord {
                rep,
                method,
                kernel: kernel.name().to_string(),
                signals,
                noise,
                pairs_found,
                exact,
                error_rate,
            });
        }
    }
    Ok(out)
}

/// Runs every replicate and summarises per (method, kernel).
pub fn run_replicates(cfg: &ReplicateConfig) -> Result<ReplicateReport> {
    cfg.validate()?;
    let per_rep: Vec<Vec<ReplicateRecord>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_one(cfg, rep))
        .collect::<Result<_>>()?;
    let records: Vec<ReplicateRecord> = per_rep.into_iter().flatten().collect();

    let mut summary = Vec::new();
    for kernel in &cfg.kernels {
        for &method in &cfg.methods {
            let rs: Vec<&ReplicateRecord> = records
                .iter()
                .filter(|r| r.method == method && r.kernel == kernel.name())
                .collect();
            let col = |f: &dyn Fn(&ReplicateRecord) -> f64| mean_se(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (signals_mean, signals_se) = col(&|r| r.signals as f64);
            let (noise_mean, noise_se) = col(&|r| r.noise as f64);
            let (pairs_mean, _) = col(&|r| r.pairs_found as f64);
            let (exact_rate, _) = col(&|r| if r.exact { 1.0 } else { 0.0 });
            let errors: Option<Vec<f64>> = rs.iter().map(|r| r.error_rate).collect();
            let (error_mean, error_se) = match errors {
                Some(e) => {
                    let (m, s) = mean_se(&e);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            summary.push(SummaryRow {
                method,
                kernel: kernel.name().to_string(),
                reps: rs.len(),
                signals_mean,
                signals_se,
                noise_mean,
                noise_se,
                pairs_mean,
                exact_rate,
                error_mean,
                error_se,
            });
        }
    }

    let mut screening = Table::new(
        "screening_summary",
        &["method", "gamma", "reps", "signals_mean", "signals_se", "noise_mean", "noise_se", "signal_pairs_mean", "exact_rate"],
    );
    let mut errors = Table::new("misclassification_summary", &["method", "gamma", "reps", "rate_mean", "rate_se"]);
    for r in &summary {
        screening.push(vec![
            r.method.to_string(),
            r.kernel.clone(),
            r.reps.to_string(),
            fmt_f(r.signals_mean),
            fmt_f(r.signals_se),
            fmt_f(r.noise_mean),
            fmt_f(r.noise_se),
            fmt_f(r.pairs_mean),
            fmt_f(r.exact_rate),
        ]);
        if r.error_mean.is_some() {
            errors.push(vec![
                r.method.to_string(),
                r.kernel.clone(),
                r.reps.to_string(),
                fmt_opt(r.error_mean),
                fmt_opt(r.error_se),
            ]);
        }
    }
    let mut per = Table::new(
        "replicates",
        &["rep", "method", "gamma", "signals", "noise", "signal_pairs", "exact", "rate"],
    );
    for r in &records {
        per.push(vec![
            r.rep.to_string(),
            r.method.to_string(),
            r.kernel.clone(),
            r.signals.to_string(),
            r.noise.to_string(),
            r.pairs_found.to_string(),
            r.exact.to_string(),
            fmt_opt(r.error_rate),
        ]);
    }
    let mut tables = vec![screening];
    if cfg.test.is_some() {
        tables.push(errors);
    }
    tables.push(per);
    let report = Report {
        metadata: Metadata::new("replicate", cfg.describe(), cfg.seed),
        notes: vec![format!("signal features: {:?}", true_signals(cfg.example).features().iter().map(|k| k + 1).collect::<Vec<_>>())],
        tables,
    };
    Ok(ReplicateReport {
        records,
        summary,
        report,
    })
}

/// Number of noise features at total sample size `n`: `⌊exp(25 n^{1/4})⌋`
/// capped at `cap`.
pub fn noise_schedule(n: usize, cap: usize) -> usize {
    let t = (25.0 * (n as f64).powf(0.25)).exp().floor();
    if t.is_finite() && t < cap as f64 {
        t as usize
    } else {
        cap
    }
}

/// Pure-noise ratio study over a grid of total sample sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRatioTableConfig {
    pub n_grid: Vec<usize>,
    pub d_cap: usize,
    pub reps: usize,
    pub noise: NoiseDist,
    pub kernel: GammaKernel,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRatioRow {
    pub n: usize,
    pub d_noise: usize,
    pub mean: f64,
    pub se: f64,
}

/// Mean `Lₙ` with standard error for each grid point. Grid point `i` uses
/// the seed stream `i` of the configured seed.
pub fn noise_ratio_table(cfg: &NoiseRatioTableConfig) -> Result<(Vec<NoiseRatioRow>, Report)> {
    if cfg.n_grid.is_empty() {
        return Err(Error::config("the sample-size grid is empty"));
    }
    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let d_noise = noise_schedule(n, cfg.d_cap);
        let mut nc = NoiseRatioConfig::new(d_noise, n, cfg.reps, cfg.noise, derive_seed_path(cfg.seed, &[i as u64]));
        nc.kernel = cfg.kernel.clone();
        let s = noise_ratio_study(&nc)?;
        rows.push(NoiseRatioRow {
            n,
            d_noise,
            mean: s.mean,
            se: s.stderr,
        });
    }
    let mut t = Table::new("noise_ratio", &["n", "d_noise", "mean_L", "se_L"]);
    for r in &rows {
        t.push(vec![r.n.to_string(), r.d_noise.to_string(), fmt_f(r.mean), fmt_f(r.se)]);
    }
    let meta = Metadata::new(
        "noise-ratio",
        format!(
            "grid={:?} d_cap={} reps={} noise={} gamma={} seed={}",
            cfg.n_grid,
            cfg.d_cap,
            cfg.reps,
            cfg.noise.name(),
            cfg.kernel,
            cfg.seed
        ),
        cfg.seed,
    );
    Ok((
        rows,
        Report {
            metadata: meta,
            notes: vec!["n is the total sample size, split evenly between the classes".into()],
            tables: vec![t],
        },
    ))
}
