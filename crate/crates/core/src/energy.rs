//! Sample energy distances for single features and feature pairs.
//!
//! For samples `x` (class 1) and `y` (class 2) and a kernel γ the statistic is
//!
//! ```text
//! Ê = 2·mean γ(|xᵢ − yⱼ|²) − W₁ − W₂
//! ```
//!
//! where `W₁`, `W₂` are the within-class means of γ over distinct pairs.
//! Two normalisations of the within-class terms are offered by [`Estimator`]:
//! the U-statistic divides by the number of distinct pairs and is unbiased
//! for the population energy; the V-statistic divides by `n²` (diagonal
//! zeros included) and is never negative. For a feature pair `{i, j}` the
//! kernel argument is half the squared Euclidean distance of the bivariate
//! differences.

use std::borrow::Cow;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::sample::TwoClassSample;
use crate::sum::pairwise_mean;

/// How the within-class terms are normalised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Within-class means over the `C(n, 2)` distinct pairs. Unbiased; can be negative.
    #[default]
    Unbiased,
    /// Within-class sums divided by `n²`. Biased upward by O(1/n); never negative
    /// for a negative-definite kernel.
    VStatistic,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Unbiased => "unbiased",
            Estimator::VStatistic => "v-statistic",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbiased" | "u" => Ok(Estimator::Unbiased),
            "v-statistic" | "v" => Ok(Estimator::VStatistic),
            other => Err(Error::config(format!("unknown estimator '{other}' (expected unbiased or v-statistic)"))),
        }
    }
}

/// Marginal energies `Ê_k`, one per feature.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyProfile {
    pub energies: Vec<f64>,
    pub kernel: GammaKernel,
    pub estimator: Estimator,
}

impl EnergyProfile {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Symmetric matrix of pair energies `Ê_{i,j}`; the diagonal is undefined
/// and stored as NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct PairEnergyMatrix {
    values: Array2<f64>,
    pub kernel: GammaKernel,
    pub estimator: Estimator,
}

impl PairEnergyMatrix {
    /// Wraps a precomputed matrix. Off-diagonal entries must be finite and
    /// symmetric; the diagonal is ignored.
    pub fn from_values(mut values: Array2<f64>, kernel: GammaKernel, estimator: Estimator) -> Result<Self> {
        let d = values.nrows();
        if values.ncols() != d {
            return Err(Error::precondition("pair energy matrix must be square"));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (values[[i, j]], values[[j, i]]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::data(format!("non-finite pair energy at ({}, {})", i + 1, j + 1)));
                }
                if a.to_bits() != b.to_bits() {
                    return Err(Error::data(format!("pair energy matrix not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
            values[[i, i]] = f64::NAN;
        }
        Ok(PairEnergyMatrix {
            values,
            kernel,
            estimator,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// `Ê_{i,j}` for `i ≠ j`; `None` on the diagonal or out of range.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        (i != j && i < self.dim() && j < self.dim()).then(|| self.values[[i, j]])
    }

    /// Largest off-diagonal entry.
    pub fn max_off_diagonal(&self) -> Option<f64> {
        let d = self.dim();
        (0..d)
            .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
            .map(|(i, j)| self.values[[i, j]])
            .reduce(f64::max)
    }

    /// Full matrix view (NaN diagonal).
    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }
}

/// Squared differences of one feature, laid out in a fixed order:
/// cross pairs `(i, j)` row-major over class 1 × class 2, then the distinct
/// within-class pairs `i < j` of class 1 and of class 2.
#[derive(Clone, Debug)]
pub(crate) struct SquaredDiffs {
    n1: usize,
    n2: usize,
    cross: Vec<f64>,
    within1: Vec<f64>,
    within2: Vec<f64>,
}

fn within_diffs(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let a = v[i];
        out.extend(v[i + 1..].iter().map(|&b| (a - b) * (a - b)));
    }
    out
}

impl SquaredDiffs {
    pub(crate) fn new(x: &[f64], y: &[f64]) -> Self {
        let mut cross = Vec::with_capacity(x.len() * y.len());
        for &a in x {
            cross.extend(y.iter().map(|&b| (a - b) * (a - b)));
        }
        SquaredDiffs {
            n1: x.len(),
            n2: y.len(),
            cross,
            within1: within_diffs(x),
            within2: within_diffs(y),
        }
    }

    fn bytes(n1: usize, n2: usize) -> usize {
        8 * (n1 * n2 + n1 * (n1 - 1) / 2 + n2 * (n2 - 1) / 2)
    }
}

/// Kernel means of the three blocks.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EnergyTerms {
    pub cross: f64,
    pub within1: f64,
    pub within2: f64,
    pub n1: usize,
    pub n2: usize,
}

impl EnergyTerms {
    pub(crate) fn combine(&self, estimator: Estimator) -> f64 {
        match estimator {
            // The within terms are added first so the result does not depend
            // on which sample is called class 1.
            Estimator::Unbiased => 2.0 * self.cross - (self.within1 + self.within2),
            Estimator::VStatistic => {
                let a1 = (self.n1 - 1) as f64 / self.n1 as f64;
                let a2 = (self.n2 - 1) as f64 / self.n2 as f64;
                2.0 * self.cross - (a1 * self.within1 + a2 * self.within2)
            }
        }
    }
}

/// Reusable buffer for kernel evaluation.
#[derive(Default)]
pub(crate) struct Scratch {
    buf: Vec<f64>,
}

impl Scratch {
    fn kernel_mean(&mut self, args: impl Iterator<Item = f64>, kernel: &GammaKernel) -> f64 {
        self.buf.clear();
        self.buf.extend(args);
        kernel.apply_in_place(&mut self.buf);
        pairwise_mean(&self.buf)
    }

    pub(crate) fn marginal_terms(&mut self, diffs: &SquaredDiffs, kernel: &GammaKernel) -> EnergyTerms {
        EnergyTerms {
            cross: self.kernel_mean(diffs.cross.iter().copied(), kernel),
            within1: self.kernel_mean(diffs.within1.iter().copied(), kernel),
            within2: self.kernel_mean(diffs.within2.iter().copied(), kernel),
            n1: diffs.n1,
            n2: diffs.n2,
        }
    }

    /// Terms for the feature pair whose per-feature squared differences are `a` and `b`:
    /// the kernel argument is `(a + b) / 2`.
    pub(crate) fn pair_terms(&mut self, a: &SquaredDiffs, b: &SquaredDiffs, kernel: &GammaKernel) -> EnergyTerms {
        EnergyTerms {
            cross: self.kernel_mean(a.cross.iter().zip(&b.cross).map(|(p, q)| 0.5 * (p + q)), kernel),
            within1: self.kernel_mean(a.within1.iter().zip(&b.within1).map(|(p, q)| 0.5 * (p + q)), kernel),
            within2: self.kernel_mean(a.within2.iter().zip(&b.within2).map(|(p, q)| 0.5 * (p + q)), kernel),
            n1: a.n1,
            n2: a.n2,
        }
    }

    /// Marginal energy of raw samples; see [`marginal_energy_with`].
    pub(crate) fn marginal(&mut self, x: &[f64], y: &[f64], kernel: &GammaKernel, estimator: Estimator) -> f64 {
        // Canonical orientation makes the statistic bit-for-bit symmetric in its arguments.
        let (x, y) = if canonical_first(y, x) { (y, x) } else { (x, y) };
        self.marginal_terms(&SquaredDiffs::new(x, y), kernel).combine(estimator)
    }

    pub(crate) fn pair(
        &mut self,
        (xa, xb): (&[f64], &[f64]),
        (ya, yb): (&[f64], &[f64]),
        kernel: &GammaKernel,
        estimator: Estimator,
    ) -> f64 {
        let a = SquaredDiffs::new(xa, ya);
        let b = SquaredDiffs::new(xb, yb);
        self.pair_terms(&a, &b, kernel).combine(estimator)
    }
}

/// Strict total order on samples used to pick the cross-block orientation.
fn canonical_first(a: &[f64], b: &[f64]) -> bool {
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (p, q) in a.iter().zip(b) {
                match p.total_cmp(q) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

fn check_univariate(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::precondition(format!(
            "energy distance needs at least 2 observations per class (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite observation"));
    }
    Ok(())
}

/// Unbiased sample energy distance between two univariate samples.
pub fn marginal_energy(x: &[f64], y: &[f64], kernel: &GammaKernel) -> Result<f64> {
    marginal_energy_with(x, y, kernel, Estimator::Unbiased)
}

pub fn marginal_energy_with(x: &[f64], y: &[f64], kernel: &GammaKernel, estimator: Estimator) -> Result<f64> {
    check_univariate(x, y)?;
    Ok(Scratch::default().marginal(x, y, kernel, estimator))
}

/// Unbiased sample energy distance between two bivariate samples (`n × 2` each),
/// with kernel argument `‖u − v‖² / 2`.
pub fn pair_energy(x2: ArrayView2<'_, f64>, y2: ArrayView2<'_, f64>, kernel: &GammaKernel) -> Result<f64> {
    pair_energy_with(x2, y2, kernel, Estimator::Unbiased)
}

pub fn pair_energy_with(
    x2: ArrayView2<'_, f64>,
    y2: ArrayView2<'_, f64>,
    kernel: &GammaKernel,
    estimator: Estimator,
) -> Result<f64> {
    if x2.ncols() != 2 || y2.ncols() != 2 {
        return Err(Error::precondition("pair energy needs exactly two columns per class"));
    }
    let (xa, xb) = (x2.column(0).to_vec(), x2.column(1).to_vec());
    let (ya, yb) = (y2.column(0).to_vec(), y2.column(1).to_vec());
    check_univariate(&xa, &ya)?;
    check_univariate(&xb, &yb)?;
    Ok(Scratch::default().pair((&xa, &xb), (&ya, &yb), kernel, estimator))
}

/// Unbiased marginal energies of every feature.
pub fn marginal_energy_profile(sample: &TwoClassSample, kernel: &GammaKernel) -> Result<EnergyProfile> {
    marginal_energy_profile_with(sample, kernel, Estimator::Unbiased)
}

/// Marginal energies of every feature. Features are processed in parallel;
/// each value is computed independently so the output does not depend on
/// the number of worker threads.
pub fn marginal_energy_profile_with(
    sample: &TwoClassSample,
    kernel: &GammaKernel,
    estimator: Estimator,
) -> Result<EnergyProfile> {
    let energies = (0..sample.dim())
        .into_par_iter()
        .map_init(Scratch::default, |scratch, k| {
            let (x, y) = sample.column_pair(k);
            scratch.marginal(&x, &y, kernel, estimator)
        })
        .collect();
    Ok(EnergyProfile {
        energies,
        kernel: kernel.clone(),
        estimator,
    })
}

/// Unbiased pair energies over all unordered feature pairs.
pub fn pair_energy_matrix(sample: &TwoClassSample, kernel: &GammaKernel) -> Result<PairEnergyMatrix> {
    pair_energy_matrix_with(sample, kernel, Estimator::Unbiased)
}

/// Memory budget for caching per-feature squared differences.
const DIFF_CACHE_BYTES: usize = 1 << 30;

/// Pair energies over all unordered feature pairs, each computed once and
/// mirrored. Rows of the upper triangle are distributed over worker threads
/// and written back in index order.
pub fn pair_energy_matrix_with(
    sample: &TwoClassSample,
    kernel: &GammaKernel,
    estimator: Estimator,
) -> Result<PairEnergyMatrix> {
    let d = sample.dim();
    if d < 2 {
        return Err(Error::precondition("pair energies need at least two features"));
    }
    let diffs_of = |k: usize| {
        let (x, y) = sample.column_pair(k);
        SquaredDiffs::new(&x, &y)
    };
    let cached: Option<Vec<SquaredDiffs>> = (SquaredDiffs::bytes(sample.n1(), sample.n2()).saturating_mul(d)
        <= DIFF_CACHE_BYTES)
        .then(|| (0..d).into_par_iter().map(diffs_of).collect());
    let get = |k: usize| -> Cow<'_, SquaredDiffs> {
        match &cached {
            Some(c) => Cow::Borrowed(&c[k]),
            None => Cow::Owned(diffs_of(k)),
        }
    };

    let rows: Vec<Vec<f64>> = (0..d - 1)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, i| {
            let a = get(i);
            ((i + 1)..d)
                .map(|j| scratch.pair_terms(&a, &get(j), kernel).combine(estimator))
                .collect()
        })
        .collect();

    let mut values = Array2::from_elem((d, d), f64::NAN);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(PairEnergyMatrix {
        values,
        kernel: kernel.clone(),
        estimator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct transcription of the double sums, used as an independent oracle.
    fn oracle(x: &[f64], y: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let (n1, n2) = (x.len() as f64, y.len() as f64);
        let mut c = 0.0;
        for a in x {
            for b in y {
                c += g((a - b) * (a - b));
            }
        }
        let w = |v: &[f64]| {
            let mut s = 0.0;
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    s += g((v[i] - v[j]) * (v[i] - v[j]));
                }
            }
            s
        };
        2.0 * c / (n1 * n2) - w(x) / (n1 * (n1 - 1.0) / 2.0) - w(y) / (n2 * (n2 - 1.0) / 2.0)
    }

    #[test]
    fn zero_for_identical_degenerate_samples() {
        assert_eq!(marginal_energy(&[0.0, 0.0], &[0.0, 0.0], &GammaKernel::Gamma1).unwrap(), 0.0);
    }

    #[test]
    fn hand_enumerated_values() {
        // cross: γ3 of squared diffs {1, 9, 1, 1} → {1, 3, 1, 1}, mean 1.5; within 2 and 2.
        let e = marginal_energy(&[0.0, 2.0], &[1.0, 3.0], &GammaKernel::Gamma3).unwrap();
        assert_relative_eq!(e, -1.0, epsilon = 1e-15);
        let e = marginal_energy(&[0.0, 1.0], &[0.0, 1.0], &GammaKernel::Gamma2).unwrap();
        assert_relative_eq!(e, -std::f64::consts::LN_2, epsilon = 1e-15);
    }

    #[test]
    fn pair_hand_values() {
        let g = GammaKernel::Gamma3;
        let x = array![[0.0, 0.0], [2.0, 0.0]];
        let y = array![[1.0, 0.0], [3.0, 0.0]];
        assert_relative_eq!(pair_energy(x.view(), y.view(), &g).unwrap(), -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        let x = array![[0.0, 0.0], [0.0, 2.0]];
        let y = array![[0.0, 1.0], [0.0, 3.0]];
        assert_relative_eq!(pair_energy(x.view(), y.view(), &g).unwrap(), -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        let c = array![[1.5, -2.0], [1.5, -2.0], [1.5, -2.0]];
        assert_eq!(pair_energy(c.view(), c.view(), &GammaKernel::Gamma1).unwrap(), 0.0);
    }

    #[test]
    fn v_statistic_relation() {
        // V = U + W1/n1 + W2/n2 algebraically.
        let x = [0.3, -1.2, 2.5, 0.7];
        let y = [1.1, 0.4, -0.6];
        let g = GammaKernel::Gamma2;
        let u = marginal_energy_with(&x, &y, &g, Estimator::Unbiased).unwrap();
        let v = marginal_energy_with(&x, &y, &g, Estimator::VStatistic).unwrap();
        let w = |s: &[f64]| {
            let mut t = 0.0;
            let mut c = 0.0;
            for i in 0..s.len() {
                for j in (i + 1)..s.len() {
                    t += ((s[i] - s[j]) * (s[i] - s[j])).ln_1p();
                    c += 1.0;
                }
            }
            t / c
        };
        assert_relative_eq!(v, u + w(&x) / 4.0 + w(&y) / 3.0, epsilon = 1e-13);
        assert!(v >= 0.0);
    }

    #[test]
    fn size_errors() {
        let g = GammaKernel::Gamma1;
        assert!(matches!(marginal_energy(&[1.0], &[1.0, 2.0], &g), Err(Error::Precondition(_))));
        assert!(matches!(marginal_energy(&[1.0, 2.0], &[1.0], &g), Err(Error::Precondition(_))));
        assert!(matches!(marginal_energy(&[1.0, f64::NAN], &[1.0, 2.0], &g), Err(Error::Data(_))));
        let one = array![[1.0, 2.0]];
        let two = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(pair_energy(one.view(), two.view(), &g).is_err());
    }

    #[test]
    fn profile_single_column_and_duplicates() {
        let s = TwoClassSample::from_rows(&[vec![0.0], vec![2.0]], &[vec![1.0], vec![3.0]]).unwrap();
        let p = marginal_energy_profile(&s, &GammaKernel::Gamma3).unwrap();
        assert_eq!(p.len(), 1);
        assert_relative_eq!(p.energies[0], -1.0, epsilon = 1e-15);

        let s = TwoClassSample::from_rows(&[vec![0.1, 0.1], vec![1.7, 1.7], vec![-0.4, -0.4]], &[vec![2.0, 2.0], vec![0.5, 0.5]])
            .unwrap();
        let p = marginal_energy_profile(&s, &GammaKernel::Gamma1).unwrap();
        assert_eq!(p.energies[0].to_bits(), p.energies[1].to_bits());
    }

    #[test]
    fn pair_matrix_properties() {
        let s = TwoClassSample::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let m = pair_energy_matrix(&s, &GammaKernel::Gamma2).unwrap();
        assert_eq!(m.get(0, 1), Some(0.0));
        assert_eq!(m.get(0, 0), None);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c1 = Array2::from_shape_fn((9, 5), |_| rng.random::<f64>() * 4.0 - 2.0);
        let c2 = Array2::from_shape_fn((7, 5), |_| rng.random::<f64>() * 4.0 - 1.0);
        let s = TwoClassSample::new(c1, c2).unwrap();
        let m = pair_energy_matrix(&s, &GammaKernel::Gamma1).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(m.get(i, j).unwrap().to_bits(), m.get(j, i).unwrap().to_bits());
                }
            }
        }
        let direct = pair_energy(
            s.class1().select(ndarray::Axis(1), &[1, 2]).view(),
            s.class2().select(ndarray::Axis(1), &[1, 2]).view(),
            &GammaKernel::Gamma1,
        )
        .unwrap();
        assert_eq!(m.get(1, 2).unwrap().to_bits(), direct.to_bits());

        let one = TwoClassSample::from_rows(&[vec![1.0], vec![2.0]], &[vec![1.0], vec![2.0]]).unwrap();
        assert!(pair_energy_matrix(&one, &GammaKernel::Gamma1).is_err());
    }

    #[test]
    fn from_values_validates() {
        let ok = array![[0.0, 1.0], [1.0, 0.0]];
        let m = PairEnergyMatrix::from_values(ok, GammaKernel::Gamma1, Estimator::Unbiased).unwrap();
        assert_eq!(m.max_off_diagonal(), Some(1.0));
        let asym = array![[0.0, 1.0], [2.0, 0.0]];
        assert!(PairEnergyMatrix::from_values(asym, GammaKernel::Gamma1, Estimator::Unbiased).is_err());
        let nan = array![[0.0, f64::NAN], [f64::NAN, 0.0]];
        assert!(PairEnergyMatrix::from_values(nan, GammaKernel::Gamma1, Estimator::Unbiased).is_err());
    }

    #[test]
    fn parallel_profile_is_thread_count_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c1 = Array2::from_shape_fn((30, 40), |_| rng.random::<f64>());
        let c2 = Array2::from_shape_fn((25, 40), |_| rng.random::<f64>() * 1.3);
        let s = TwoClassSample::new(c1, c2).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                (
                    marginal_energy_profile_with(&s, &GammaKernel::Gamma2, Estimator::VStatistic).unwrap(),
                    pair_energy_matrix(&s, &GammaKernel::Gamma1).unwrap(),
                )
            })
        };
        let (p1, m1) = run(1);
        let (p4, m4) = run(4);
        assert!(p1.energies.iter().zip(&p4.energies).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(m1.values().iter().zip(m4.values().iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    proptest! {
        #[test]
        fn agrees_with_direct_double_sum(
            x in proptest::collection::vec(-5.0f64..5.0, 2..12),
            y in proptest::collection::vec(-5.0f64..5.0, 2..12),
        ) {
            for (k, g) in [
                (GammaKernel::Gamma1, (|t: f64| 1.0 - (-t).exp()) as fn(f64) -> f64),
                (GammaKernel::Gamma2, |t: f64| (1.0 + t).ln()),
                (GammaKernel::Gamma3, |t: f64| t.sqrt()),
            ] {
                let e = marginal_energy(&x, &y, &k).unwrap();
                prop_assert!((e - oracle(&x, &y, g)).abs() < 1e-10);
            }
        }

        #[test]
        fn symmetric_in_roles(
            x in proptest::collection::vec(-5.0f64..5.0, 2..15),
            y in proptest::collection::vec(-5.0f64..5.0, 2..15),
        ) {
            for k in GammaKernel::BUILTIN {
                for est in [Estimator::Unbiased, Estimator::VStatistic] {
                    let a = marginal_energy_with(&x, &y, &k, est).unwrap();
                    let b = marginal_energy_with(&y, &x, &k, est).unwrap();
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }

        #[test]
        fn permutation_invariant(
            x in proptest::collection::vec(-5.0f64..5.0, 2..15),
            y in proptest::collection::vec(-5.0f64..5.0, 2..15),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut xp, mut yp) = (x.clone(), y.clone());
            xp.shuffle(&mut rng);
            yp.shuffle(&mut rng);
            for k in GammaKernel::BUILTIN {
                let a = marginal_energy(&x, &y, &k).unwrap();
                let b = marginal_energy(&xp, &yp, &k).unwrap();
                let scale = a.abs().max(1.0);
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }
}
