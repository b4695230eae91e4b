//! Paired screening (PairS): match features into pairs that maximise the
//! total pair energy, then apply the ratio cut to the matched pair energies.

use rand_distr::{Distribution, StandardNormal};

use crate::energy::pair_energy_matrix_with;
use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::mars::{estimate_signal_count, ScreenConfig, ScreenMethod, ScreenedSet, SignalCount};
use crate::matching::{build_weight_matrix, min_weight_perfect_matching_with, Matching};
use crate::sample::TwoClassSample;
use crate::seed::rng_from_seed;

/// Name given to the padding column.
pub const PAD_COLUMN_NAME: &str = "__pad__";

/// Appends one column of standard normal noise to both classes when the
/// dimension is odd. The new column, if any, has index `sample.dim()`.
pub fn pad_odd_dimension(sample: &TwoClassSample, seed: u64) -> Result<(TwoClassSample, bool)> {
    if sample.dim().is_multiple_of(2) {
        return Ok((sample.clone(), false));
    }
    let mut rng = rng_from_seed(seed);
    let c1: Vec<f64> = (0..sample.n1()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let c2: Vec<f64> = (0..sample.n2()).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok((sample.with_extra_column(&c1, &c2, PAD_COLUMN_NAME)?, true))
}

/// Outcome of the matching and ratio cut, on the (possibly padded) sample.
pub(crate) struct PairStage {
    pub padded: bool,
    /// Index of the padding column, if present.
    pub pad: Option<usize>,
    pub matching: Matching,
    /// Energy of each matched pair, aligned with `matching.pairs`.
    pub energies: Vec<f64>,
    pub count: SignalCount,
}

impl PairStage {
    /// The `ŝ` selected pairs, highest energy first.
    pub fn selected(&self) -> Vec<(usize, usize)> {
        self.count.selected().into_iter().map(|k| self.matching.pairs[k]).collect()
    }
}

pub(crate) fn pair_stage(
    sample: &TwoClassSample,
    kernel: &GammaKernel,
    config: &ScreenConfig,
    seed: u64,
) -> Result<PairStage> {
    config.validate()?;
    let (padded_sample, padded) = pad_odd_dimension(sample, seed)?;
    let d = padded_sample.dim();
    if d < 4 {
        return Err(Error::precondition(format!(
            "paired screening needs at least 4 features after padding (got {d})"
        )));
    }
    config.range.resolve(d / 2)?;
    let energy = pair_energy_matrix_with(&padded_sample, kernel, config.estimator)?;
    let weights = build_weight_matrix(&energy)?;
    let matching = min_weight_perfect_matching_with(&weights, config.solver)?;
    let energies: Vec<f64> = matching
        .pairs
        .iter()
        .map(|&(i, j)| energy.get(i, j).expect("matched pair is off-diagonal"))
        .collect();
    let count = estimate_signal_count(&energies, config)?;
    Ok(PairStage {
        padded,
        pad: padded.then_some(sample.dim()),
        matching,
        energies,
        count,
    })
}

/// PairS. A selected pair that contains the padding column is reported as a
/// single feature.
pub fn pairs_screen(
    sample: &TwoClassSample,
    kernel: &GammaKernel,
    config: &ScreenConfig,
    seed: u64,
) -> Result<ScreenedSet> {
    let stage = pair_stage(sample, kernel, config, seed)?;
    let mut marginal = Vec::new();
    let mut pairs = Vec::new();
    for (i, j) in stage.selected() {
        match stage.pad {
            Some(p) if j == p => marginal.push(i),
            _ => pairs.push((i, j)),
        }
    }
    marginal.sort_unstable();
    pairs.sort_unstable();
    Ok(ScreenedSet {
        method: ScreenMethod::Paired,
        dim: sample.dim(),
        marginal,
        pairs,
        t_hat: stage.count.t_hat,
        s_hat: stage.count.s_hat,
        profile: stage.energies.clone(),
        matching: without_pad(&stage.matching.pairs, stage.pad),
        null_warning: stage.count.null_warning,
        padded: stage.padded,
        verdicts: Vec::new(),
    })
}

pub(crate) fn without_pad(pairs: &[(usize, usize)], pad: Option<usize>) -> Vec<(usize, usize)> {
    pairs.iter().copied().filter(|&(_, j)| Some(j) != pad).collect()
}
