//! Mixed screening (MixS): decide, for each pair kept by paired screening,
//! whether it carries signal through one feature, both features separately,
//! or only jointly.
//!
//! Four resampling tests are run per pair `{i, j}` on one shared set of
//! resampled class splits, with statistics `Êᵢ`, `Êⱼ`, `Êᵢ + Êⱼ` and
//! `Ê_{i,j}`. The smallest p-value names the verdict.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::energy::{EnergyTerms, Estimator};
use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::mars::{ScreenConfig, ScreenMethod, ScreenedSet};
use crate::pairs::{pair_stage, pad_odd_dimension, without_pad};
use crate::sample::TwoClassSample;
use crate::seed::{derive_seed, derive_seed_path, rng_from_seed};
use crate::sum::pairwise_mean;

/// How null class splits are drawn from the pooled observations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ResampleScheme {
    /// Random relabelling without replacement.
    #[default]
    Permutation,
    /// Both classes drawn with replacement from the pooled sample.
    Bootstrap,
}

impl ResampleScheme {
    pub fn name(self) -> &'static str {
        match self {
            ResampleScheme::Permutation => "permutation",
            ResampleScheme::Bootstrap => "bootstrap",
        }
    }
}

impl std::str::FromStr for ResampleScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "permutation" | "perm" => Ok(ResampleScheme::Permutation),
            "bootstrap" | "boot" => Ok(ResampleScheme::Bootstrap),
            other => Err(Error::config(format!("unknown resampling scheme '{other}'"))),
        }
    }
}

/// Smallest accepted number of resamples.
pub const MIN_RESAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResampleConfig {
    /// Number of null resamples `M`.
    pub replicates: usize,
    pub scheme: ResampleScheme,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig {
            replicates: 200,
            scheme: ResampleScheme::Permutation,
        }
    }
}

impl ResampleConfig {
    pub fn new(replicates: usize) -> Self {
        ResampleConfig {
            replicates,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < MIN_RESAMPLES {
            return Err(Error::config(format!(
                "at least {MIN_RESAMPLES} resamples are required (got {})",
                self.replicates
            )));
        }
        Ok(())
    }
}

/// Role assigned to a screened pair `{i, j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Keep `i` alone.
    MarginalFirst,
    /// Keep `j` alone.
    MarginalSecond,
    /// Keep `i` and `j` as separate features.
    BothMarginal,
    /// Keep `{i, j}` as a joint feature.
    Paired,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::MarginalFirst => "marginal-first",
            Verdict::MarginalSecond => "marginal-second",
            Verdict::BothMarginal => "both-marginal",
            Verdict::Paired => "paired",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairVerdict {
    pub pair: (usize, usize),
    pub pvalues: [f64; 4],
    pub verdict: Verdict,
}

/// Verdict of the smallest p-value; ties go to the earliest position.
pub fn classify_pair(pvalues: [f64; 4]) -> Verdict {
    let mut best = 0;
    for k in 1..4 {
        if pvalues[k] < pvalues[best] {
            best = k;
        }
    }
    [Verdict::MarginalFirst, Verdict::MarginalSecond, Verdict::BothMarginal, Verdict::Paired][best]
}

/// Monte-Carlo p-value `(1 + #{replicate ≥ observed}) / (M + 1)`.
pub fn resample_pvalue(observed: f64, replicates: &[f64]) -> f64 {
    let count = replicates.iter().filter(|&&r| r >= observed).count();
    (1 + count) as f64 / (replicates.len() + 1) as f64
}

/// Kernel values between all pooled observations of one feature or feature pair.
struct PooledKernel {
    n: usize,
    values: Array2<f64>,
}

impl PooledKernel {
    fn new(pooled_sq: impl Fn(usize, usize) -> f64, n: usize, kernel: &GammaKernel) -> Self {
        let mut values = Array2::zeros((n, n));
        for a in 0..n {
            for b in (a + 1)..n {
                let v = kernel.apply(pooled_sq(a, b));
                values[[a, b]] = v;
                values[[b, a]] = v;
            }
        }
        PooledKernel { n, values }
    }

    /// Energy of the split assigning pooled rows `idx[..n1]` to class 1 and the rest to class 2.
    fn energy(&self, idx: &[usize], n1: usize, estimator: Estimator, buf: &mut Vec<f64>) -> f64 {
        let (a, b) = idx.split_at(n1);
        let mut block = |rows: &[usize], cols: Option<&[usize]>| {
            buf.clear();
            match cols {
                Some(cols) => {
                    for &r in rows {
                        buf.extend(cols.iter().map(|&c| self.values[[r, c]]));
                    }
                }
                None => {
                    for (p, &r) in rows.iter().enumerate() {
                        buf.extend(rows[p + 1..].iter().map(|&c| self.values[[r, c]]));
                    }
                }
            }
            pairwise_mean(buf)
        };
        EnergyTerms {
            cross: block(a, Some(b)),
            within1: block(a, None),
            within2: block(b, None),
            n1: a.len(),
            n2: b.len(),
        }
        .combine(estimator)
    }
}

/// The four statistics for one split.
fn statistics(k: &[PooledKernel; 3], idx: &[usize], n1: usize, estimator: Estimator, buf: &mut Vec<f64>) -> [f64; 4] {
    let ei = k[0].energy(idx, n1, estimator, buf);
    let ej = k[1].energy(idx, n1, estimator, buf);
    let eij = k[2].energy(idx, n1, estimator, buf);
    [ei, ej, ei + ej, eij]
}

/// p-values `(p₁, p₂, p₃, p₄)` for the pair `(i, j)` of `sample`.
pub fn resample_pvalues(
    sample: &TwoClassSample,
    pair: (usize, usize),
    kernel: &GammaKernel,
    resample: &ResampleConfig,
    estimator: Estimator,
    seed: u64,
) -> Result<[f64; 4]> {
    resample.validate()?;
    let (i, j) = pair;
    let d = sample.dim();
    if i >= d || j >= d || i == j {
        return Err(Error::precondition(format!(
            "pair ({}, {}) is not two distinct features of 1..{d}",
            i + 1,
            j + 1
        )));
    }
    let pool = |k: usize| {
        let (mut x, y) = sample.column_pair(k);
        x.extend(y);
        x
    };
    let (xi, xj) = (pool(i), pool(j));
    let n = xi.len();
    let n1 = sample.n1();
    let sq = |v: &[f64], a: usize, b: usize| (v[a] - v[b]) * (v[a] - v[b]);
    let kernels = [
        PooledKernel::new(|a, b| sq(&xi, a, b), n, kernel),
        PooledKernel::new(|a, b| sq(&xj, a, b), n, kernel),
        PooledKernel::new(|a, b| 0.5 * (sq(&xi, a, b) + sq(&xj, a, b)), n, kernel),
    ];
    debug_assert!(kernels.iter().all(|k| k.n == n));

    let mut buf = Vec::new();
    let identity: Vec<usize> = (0..n).collect();
    let observed = statistics(&kernels, &identity, n1, estimator, &mut buf);

    let mut rng = rng_from_seed(seed);
    let mut idx = identity.clone();
    let mut null: [Vec<f64>; 4] = Default::default();
    for _ in 0..resample.replicates {
        match resample.scheme {
            ResampleScheme::Permutation => idx.shuffle(&mut rng),
            ResampleScheme::Bootstrap => idx.iter_mut().for_each(|v| *v = rng.random_range(0..n)),
        }
        let s = statistics(&kernels, &idx, n1, estimator, &mut buf);
        for r in 0..4 {
            null[r].push(s[r]);
        }
    }
    Ok(std::array::from_fn(|r| resample_pvalue(observed[r], &null[r])))
}

/// MixS: paired screening followed by a verdict for every selected pair.
///
/// A selected pair that contains the padding column is tested like any other;
/// the padding column is then removed from whatever the verdict keeps.
pub fn mixs_screen(
    sample: &TwoClassSample,
    kernel: &GammaKernel,
    config: &ScreenConfig,
    resample: &ResampleConfig,
    seed: u64,
) -> Result<ScreenedSet> {
    resample.validate()?;
    let pad_seed = derive_seed(seed, 0);
    let stage = pair_stage(sample, kernel, config, pad_seed)?;
    let tested = if stage.padded { pad_odd_dimension(sample, pad_seed)?.0 } else { sample.clone() };

    let selected = stage.selected();
    let verdicts: Vec<PairVerdict> = selected
        .par_iter()
        .map(|&(i, j)| {
            let pseed = derive_seed_path(seed, &[1, i as u64, j as u64]);
            let pvalues = resample_pvalues(&tested, (i, j), kernel, resample, config.estimator, pseed)?;
            Ok(PairVerdict {
                pair: (i, j),
                pvalues,
                verdict: classify_pair(pvalues),
            })
        })
        .collect::<Result<_>>()?;

    let real = |k: usize| Some(k) != stage.pad;
    let mut marginal = Vec::new();
    let mut pairs = Vec::new();
    for v in &verdicts {
        let (i, j) = v.pair;
        match v.verdict {
            Verdict::MarginalFirst => marginal.push(i),
            Verdict::MarginalSecond => marginal.extend(real(j).then_some(j)),
            Verdict::BothMarginal => marginal.extend([i, j].into_iter().filter(|&k| real(k))),
            Verdict::Paired if real(j) => pairs.push((i, j)),
            Verdict::Paired => marginal.push(i),
        }
    }
    marginal.sort_unstable();
    pairs.sort_unstable();
    Ok(ScreenedSet {
        method: ScreenMethod::Mixed,
        dim: sample.dim(),
        s_hat: marginal.len() + pairs.len(),
        marginal,
        pairs,
        t_hat: stage.count.t_hat,
        profile: stage.energies.clone(),
        matching: without_pad(&stage.matching.pairs, stage.pad),
        null_warning: stage.count.null_warning,
        padded: stage.padded,
        verdicts,
    })
}
