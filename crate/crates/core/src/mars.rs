//! Marginal screening (MarS): locate the jump in the ordered marginal
//! energies and keep every feature above it.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::energy::{marginal_energy_profile_with, Estimator, Scratch};
use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::matching::MatchingSolver;
use crate::mixs::PairVerdict;
use crate::sample::TwoClassSample;
use crate::seed::{derive_seed, rng_from_seed};
use crate::sum::pairwise_mean;

/// Range of order-statistic positions `k` over which the ratio
/// `Ê₍ₖ₊₁₎ / Ê₍ₖ₎` is maximised. Positions are 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchRange {
    /// `[⌈d/2⌉, d − 1]`: at most half the features may be declared signals.
    #[default]
    UpperHalf,
    /// `[1, d − 1]`.
    Full,
    /// Explicit bounds, validated against `d` when used.
    Explicit { lo: usize, hi: usize },
}

impl SearchRange {
    /// Bounds for dimension `d`.
    pub fn resolve(self, d: usize) -> Result<(usize, usize)> {
        if d < 2 {
            return Err(Error::precondition(format!("signal count needs at least 2 features (got {d})")));
        }
        let (lo, hi) = match self {
            SearchRange::UpperHalf => (d.div_ceil(2), d - 1),
            SearchRange::Full => (1, d - 1),
            SearchRange::Explicit { lo, hi } => (lo, hi),
        };
        if lo < 1 || lo > hi || hi > d - 1 {
            return Err(Error::config(format!(
                "search range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= d-1 = {}",
                d - 1
            )));
        }
        Ok((lo, hi))
    }
}

/// Screening parameters shared by all three screening procedures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenConfig {
    pub range: SearchRange,
    /// Energies below this value are raised to it before ratios are formed.
    pub energy_floor: f64,
    pub estimator: Estimator,
    /// Matching algorithm for paired and mixed screening.
    pub solver: MatchingSolver,
}

/// Smallest positive normal-ish magnitude used for clamping.
pub const DEFAULT_ENERGY_FLOOR: f64 = 1e-300;

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig {
            range: SearchRange::UpperHalf,
            energy_floor: DEFAULT_ENERGY_FLOOR,
            estimator: Estimator::VStatistic,
            solver: MatchingSolver::default(),
        }
    }
}

impl ScreenConfig {
    pub fn with_range(mut self, range: SearchRange) -> Self {
        self.range = range;
        self
    }

    pub fn with_solver(mut self, solver: MatchingSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.energy_floor.is_finite() && self.energy_floor > 0.0) {
            return Err(Error::config("energy floor must be a positive finite number"));
        }
        Ok(())
    }
}

/// Result of the ratio search.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalCount {
    /// `t̂`: number of order statistics below the jump.
    pub t_hat: usize,
    /// `ŝ = d − t̂`.
    pub s_hat: usize,
    /// Searched bounds (1-based, inclusive).
    pub lo: usize,
    pub hi: usize,
    /// `R̂ₖ` for `k = lo..=hi`.
    pub ratios: Vec<f64>,
    /// Feature indices in ascending order of clamped energy. Ties are ordered so
    /// that the lowest index sits highest, which makes it the first retained.
    pub order: Vec<usize>,
    /// Clamped energies in the same order as `order`.
    pub sorted: Vec<f64>,
    /// `Ê₍t̂₊₁₎ < 10 · floor`: the cut sits at the clamping floor, which
    /// suggests there is no signal at all.
    pub null_warning: bool,
}

impl SignalCount {
    /// The `ŝ` selected indices in descending order of energy.
    pub fn selected(&self) -> Vec<usize> {
        self.order[self.t_hat..].iter().rev().copied().collect()
    }
}

/// Estimates the number of signals from a vector of energies.
pub fn estimate_signal_count(energies: &[f64], config: &ScreenConfig) -> Result<SignalCount> {
    config.validate()?;
    let d = energies.len();
    let (lo, hi) = config.range.resolve(d)?;
    if let Some(k) = energies.iter().position(|e| e.is_nan()) {
        return Err(Error::data(format!("energy of feature {} is NaN", k + 1)));
    }
    let floor = config.energy_floor;
    let clamped: Vec<f64> = energies.iter().map(|&e| e.max(floor)).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| clamped[a].total_cmp(&clamped[b]).then(b.cmp(&a)));
    let sorted: Vec<f64> = order.iter().map(|&k| clamped[k]).collect();

    let ratios: Vec<f64> = (lo..=hi).map(|k| sorted[k] / sorted[k - 1]).collect();
    let mut best = 0;
    for (i, r) in ratios.iter().enumerate() {
        if *r > ratios[best] {
            best = i;
        }
    }
    let t_hat = lo + best;
    Ok(SignalCount {
        t_hat,
        s_hat: d - t_hat,
        lo,
        hi,
        null_warning: sorted[t_hat] < 10.0 * floor,
        ratios,
        order,
        sorted,
    })
}

/// Which procedure produced a [`ScreenedSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScreenMethod {
    /// No screening: every feature is kept as a single feature.
    Unscreened,
    Marginal,
    Paired,
    Mixed,
}

impl ScreenMethod {
    pub fn name(self) -> &'static str {
        match self {
            ScreenMethod::Unscreened => "wos",
            ScreenMethod::Marginal => "mars",
            ScreenMethod::Paired => "pairs",
            ScreenMethod::Mixed => "mixs",
        }
    }
}

impl std::fmt::Display for ScreenMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScreenMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wos" | "none" => Ok(ScreenMethod::Unscreened),
            "mars" | "marginal" => Ok(ScreenMethod::Marginal),
            "pairs" | "paired" => Ok(ScreenMethod::Paired),
            "mixs" | "mixed" => Ok(ScreenMethod::Mixed),
            other => Err(Error::config(format!("unknown screening method '{other}' (expected wos, mars, pairs or mixs)"))),
        }
    }
}

/// Features retained by a screening procedure. Indices are 0-based and refer
/// to the columns of the screened sample; a padding column never appears.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreenedSet {
    pub method: ScreenMethod,
    /// Number of features of the input sample.
    pub dim: usize,
    /// Retained single features, ascending.
    pub marginal: Vec<usize>,
    /// Retained feature pairs `(i, j)` with `i < j`, ascending.
    pub pairs: Vec<(usize, usize)>,
    pub t_hat: usize,
    pub s_hat: usize,
    /// The energies the ratio cut was applied to: one per feature for
    /// marginal screening, one per matched pair otherwise.
    pub profile: Vec<f64>,
    /// The perfect matching underlying paired and mixed screening.
    pub matching: Vec<(usize, usize)>,
    pub null_warning: bool,
    /// An extra noise column was appended to make the dimension even.
    pub padded: bool,
    /// Per-pair decisions of mixed screening.
    pub verdicts: Vec<PairVerdict>,
}

impl ScreenedSet {
    /// Every feature kept as a single feature.
    pub fn unscreened(dim: usize) -> Self {
        ScreenedSet {
            method: ScreenMethod::Unscreened,
            dim,
            marginal: (0..dim).collect(),
            pairs: Vec::new(),
            t_hat: 0,
            s_hat: dim,
            profile: Vec::new(),
            matching: Vec::new(),
            null_warning: false,
            padded: false,
            verdicts: Vec::new(),
        }
    }

    /// Every retained feature index, ascending.
    pub fn retained(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.marginal.clone();
        all.extend(self.pairs.iter().flat_map(|&(i, j)| [i, j]));
        all.sort_unstable();
        all
    }

    /// Features not retained in any form, ascending.
    pub fn dropped(&self) -> Vec<usize> {
        let kept = self.retained();
        (0..self.dim).filter(|k| kept.binary_search(k).is_err()).collect()
    }

    pub fn contains_marginal(&self, k: usize) -> bool {
        self.marginal.binary_search(&k).is_ok()
    }

    pub fn contains_pair(&self, i: usize, j: usize) -> bool {
        let p = if i < j { (i, j) } else { (j, i) };
        self.pairs.binary_search(&p).is_ok()
    }
}

/// MarS: keeps the `ŝ` features with the largest marginal energies.
pub fn mars_screen(sample: &TwoClassSample, kernel: &GammaKernel, config: &ScreenConfig) -> Result<ScreenedSet> {
    config.validate()?;
    config.range.resolve(sample.dim())?;
    let profile = marginal_energy_profile_with(sample, kernel, config.estimator)?;
    let count = estimate_signal_count(&profile.energies, config)?;
    let mut marginal = count.selected();
    marginal.sort_unstable();
    Ok(ScreenedSet {
        method: ScreenMethod::Marginal,
        dim: sample.dim(),
        marginal,
        pairs: Vec::new(),
        t_hat: count.t_hat,
        s_hat: count.s_hat,
        profile: profile.energies,
        matching: Vec::new(),
        null_warning: count.null_warning,
        padded: false,
        verdicts: Vec::new(),
    })
}

/// Distribution of the pure-noise features in the noise-ratio study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseDist {
    Gaussian,
    Cauchy,
}

impl NoiseDist {
    pub fn name(self) -> &'static str {
        match self {
            NoiseDist::Gaussian => "gaussian",
            NoiseDist::Cauchy => "cauchy",
        }
    }

    pub(crate) fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            NoiseDist::Gaussian => StandardNormal.sample(rng),
            NoiseDist::Cauchy => Cauchy::new(0.0, 1.0).expect("unit scale").sample(rng),
        }
    }
}

impl std::str::FromStr for NoiseDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(NoiseDist::Gaussian),
            "cauchy" => Ok(NoiseDist::Cauchy),
            other => Err(Error::config(format!("unknown noise distribution '{other}' (expected gaussian or cauchy)"))),
        }
    }
}

/// Parameters of the pure-noise ratio study: `replicates` data sets of
/// `d_noise` i.i.d. noise features with `n` observations split evenly
/// between the two classes.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRatioConfig {
    pub d_noise: usize,
    pub n: usize,
    pub replicates: usize,
    pub noise: NoiseDist,
    pub kernel: GammaKernel,
    pub estimator: Estimator,
    pub energy_floor: f64,
    pub seed: u64,
}

impl NoiseRatioConfig {
    pub fn new(d_noise: usize, n: usize, replicates: usize, noise: NoiseDist, seed: u64) -> Self {
        NoiseRatioConfig {
            d_noise,
            n,
            replicates,
            noise,
            kernel: GammaKernel::Gamma1,
            estimator: Estimator::VStatistic,
            energy_floor: DEFAULT_ENERGY_FLOOR,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRatioSummary {
    pub mean: f64,
    pub stderr: f64,
    /// `Lₙ` of each replicate, in replicate order.
    pub values: Vec<f64>,
}

/// Largest consecutive ratio of the ordered (clamped) energies.
fn max_ratio(energies: &[f64], floor: f64) -> f64 {
    let mut s: Vec<f64> = energies.iter().map(|e| e.max(floor)).collect();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Mean and standard error of `Lₙ` over pure-noise replicates.
pub fn noise_ratio_study(config: &NoiseRatioConfig) -> Result<NoiseRatioSummary> {
    if config.d_noise < 2 {
        return Err(Error::precondition("noise ratio study needs at least 2 noise features"));
    }
    if config.replicates < 2 {
        return Err(Error::precondition("noise ratio study needs at least 2 replicates"));
    }
    if config.n < 4 {
        return Err(Error::precondition("noise ratio study needs n >= 4 (two observations per class)"));
    }
    let n1 = config.n / 2;
    let n2 = config.n - n1;
    let values: Vec<f64> = (0..config.replicates)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, r| {
            let mut rng = rng_from_seed(derive_seed(config.seed, r as u64));
            let energies: Vec<f64> = (0..config.d_noise)
                .map(|_| {
                    let x: Vec<f64> = (0..n1).map(|_| config.noise.draw(&mut rng)).collect();
                    let y: Vec<f64> = (0..n2).map(|_| config.noise.draw(&mut rng)).collect();
                    scratch.marginal(&x, &y, &config.kernel, config.estimator)
                })
                .collect();
            max_ratio(&energies, config.energy_floor)
        })
        .collect();
    let mean = pairwise_mean(&values);
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = crate::sum::pairwise_sum(&dev) / (values.len() - 1) as f64;
    Ok(NoiseRatioSummary {
        mean,
        stderr: (var / values.len() as f64).sqrt(),
        values,
    })
}

/// Mean and standard error of `Lₙ` with the bounded kernel γ₁ and the
/// V-statistic estimator.
pub fn max_consecutive_noise_ratio(
    d_noise: usize,
    n: usize,
    replicates: usize,
    noise_dist: NoiseDist,
    seed: u64,
) -> Result<(f64, f64)> {
    let s = noise_ratio_study(&NoiseRatioConfig::new(d_noise, n, replicates, noise_dist, seed))?;
    Ok((s.mean, s.stderr))
}
