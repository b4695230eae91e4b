//! Simulation designs with known signal structure.
//!
//! | id | class 1 signal columns | class 2 signal columns | noise |
//! |----|------------------------|------------------------|-------|
//! | 1 | 4 × N(0, 1) | 4 × N(1, 1) | N(0, 1) |
//! | 2 | pairs (1,2), (3,4) bivariate normal, correlation +0.9 | same with correlation −0.9 | N(0, 1) |
//! | 3 | pair (1,2) correlation +0.9; column 3 ~ N(1, 1) | pair (1,2) correlation −0.9; column 3 ~ N(0, 1) | N(0, 1) |
//! | 4 | 4 × N(0, 1) | 4 × N(0, (1/3)²) | N(0, 1) |
//! | 5 | 4 × Cauchy(0, 1) | 4 × Cauchy(2, 1) | Cauchy(0, 1) |
//! | 6 | 4 × Cauchy(0, 1) | 4 × Cauchy(0, 5) | Cauchy(0, 1) |
//! | 7 | 4 × N(0, 4) | 4 × ½N(−1.95, 4 − 1.95²) + ½N(1.95, 4 − 1.95²) | N(0, 1) |
//! | 8 | 4 × N(0, 1) | pairs (1,2), (3,4) from a user-supplied bivariate sampler | N(0, 1) |
//!
//! Rows are generated class by class and, within a row, column by column, so
//! a given specification always yields the same matrices.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mars::NoiseDist;
use crate::sample::TwoClassSample;
use crate::seed::rng_from_seed;

/// Draws one observation of a two-dimensional signal block.
pub trait BivariateSampler: Send + Sync {
    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64);
}

impl<F> BivariateSampler for F
where
    F: Fn(&mut dyn RngCore) -> (f64, f64) + Send + Sync,
{
    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        self(rng)
    }
}

/// Which simulation design to draw and how much of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExampleSpec {
    pub id: u8,
    pub n1: usize,
    pub n2: usize,
    pub d: usize,
    pub seed: u64,
}

/// Known signal structure of a design (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrueSignals {
    pub marginal: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

impl TrueSignals {
    /// All signal feature indices, ascending.
    pub fn features(&self) -> Vec<usize> {
        let mut f = self.marginal.clone();
        f.extend(self.pairs.iter().flat_map(|&(i, j)| [i, j]));
        f.sort_unstable();
        f
    }
}

/// Number of design ids.
pub const EXAMPLE_COUNT: u8 = 8;

/// Location shift of the mixture components in design 7.
const MIXTURE_SHIFT: f64 = 1.95;
const CORRELATION: f64 = 0.9;

impl ExampleSpec {
    pub fn new(id: u8, n1: usize, n2: usize, d: usize, seed: u64) -> Result<Self> {
        let spec = ExampleSpec { id, n1, n2, d, seed };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=EXAMPLE_COUNT).contains(&self.id) {
            return Err(Error::config(format!("example id must be 1..={EXAMPLE_COUNT} (got {})", self.id)));
        }
        let min_d = min_dimension(self.id);
        if self.d < min_d {
            return Err(Error::config(format!("example {} needs d >= {min_d} (got {})", self.id, self.d)));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::config("each class needs at least 2 observations"));
        }
        Ok(())
    }

    /// The same design with a different seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The same design with different class sizes.
    pub fn with_sizes(mut self, n1: usize, n2: usize) -> Self {
        self.n1 = n1;
        self.n2 = n2;
        self
    }
}

pub fn min_dimension(id: u8) -> usize {
    if id == 3 {
        3
    } else {
        4
    }
}

pub fn true_signals(id: u8) -> TrueSignals {
    match id {
        2 | 8 => TrueSignals {
            marginal: vec![],
            pairs: vec![(0, 1), (2, 3)],
        },
        3 => TrueSignals {
            marginal: vec![2],
            pairs: vec![(0, 1)],
        },
        _ => TrueSignals {
            marginal: vec![0, 1, 2, 3],
            pairs: vec![],
        },
    }
}

/// Noise distribution of the non-signal columns.
pub fn noise_distribution(id: u8) -> NoiseDist {
    if id == 5 || id == 6 {
        NoiseDist::Cauchy
    } else {
        NoiseDist::Gaussian
    }
}

fn normal(rng: &mut dyn RngCore) -> f64 {
    StandardNormal.sample(rng)
}

/// Standard Cauchy variate by inversion of the distribution function.
fn cauchy(rng: &mut dyn RngCore, location: f64, scale: f64) -> f64 {
    let u: f64 = rng.random();
    location + scale * (PI * (u - 0.5)).tan()
}

fn correlated_pair(rng: &mut dyn RngCore, rho: f64) -> (f64, f64) {
    let a = normal(rng);
    let b = normal(rng);
    (a, rho * a + (1.0 - rho * rho).sqrt() * b)
}

/// Fills the signal columns of one row. `class` is 1 or 2.
fn signal_row(
    id: u8,
    class: u8,
    row: &mut [f64],
    rng: &mut dyn RngCore,
    bivariate: Option<&dyn BivariateSampler>,
) {
    let second = class == 2;
    match id {
        1 => row[..4].iter_mut().for_each(|v| *v = normal(rng) + if second { 1.0 } else { 0.0 }),
        2 => {
            let rho = if second { -CORRELATION } else { CORRELATION };
            for b in 0..2 {
                let (x, y) = correlated_pair(rng, rho);
                row[2 * b] = x;
                row[2 * b + 1] = y;
            }
        }
        3 => {
            let rho = if second { -CORRELATION } else { CORRELATION };
            let (x, y) = correlated_pair(rng, rho);
            row[0] = x;
            row[1] = y;
            row[2] = normal(rng) + if second { 0.0 } else { 1.0 };
        }
        4 => {
            let sd = if second { 1.0 / 3.0 } else { 1.0 };
            row[..4].iter_mut().for_each(|v| *v = sd * normal(rng));
        }
        5 => {
            let loc = if second { 2.0 } else { 0.0 };
            row[..4].iter_mut().for_each(|v| *v = cauchy(rng, loc, 1.0));
        }
        6 => {
            let scale = if second { 5.0 } else { 1.0 };
            row[..4].iter_mut().for_each(|v| *v = cauchy(rng, 0.0, scale));
        }
        7 => {
            if second {
                let sd = (4.0 - MIXTURE_SHIFT * MIXTURE_SHIFT).sqrt();
                row[..4].iter_mut().for_each(|v| {
                    let shift = if rng.random::<bool>() { MIXTURE_SHIFT } else { -MIXTURE_SHIFT };
                    *v = shift + sd * normal(rng);
                });
            } else {
                row[..4].iter_mut().for_each(|v| *v = 2.0 * normal(rng));
            }
        }
        8 => {
            if second {
                let sampler = bivariate.expect("checked by generate");
                for b in 0..2 {
                    let (x, y) = sampler.sample(rng);
                    row[2 * b] = x;
                    row[2 * b + 1] = y;
                }
            } else {
                row[..4].iter_mut().for_each(|v| *v = normal(rng));
            }
        }
        _ => unreachable!("validated id"),
    }
}

/// Draws a sample for designs 1 to 7.
pub fn generate(spec: &ExampleSpec) -> Result<TwoClassSample> {
    generate_with(spec, None)
}

/// Draws a sample; design 8 requires `bivariate`.
pub fn generate_with(spec: &ExampleSpec, bivariate: Option<Arc<dyn BivariateSampler>>) -> Result<TwoClassSample> {
    spec.validate()?;
    if spec.id == 8 && bivariate.is_none() {
        return Err(Error::config("example 8 needs a bivariate sampler for its class-2 signal pairs"));
    }
    let mut rng = rng_from_seed(spec.seed);
    let noise = noise_distribution(spec.id);
    let width = min_dimension(spec.id);
    let mut draw = |n: usize, class: u8| {
        let mut m = Array2::zeros((n, spec.d));
        let mut row = vec![0.0; spec.d];
        for r in 0..n {
            signal_row(spec.id, class, &mut row, &mut rng, bivariate.as_deref());
            for v in &mut row[width..] {
                *v = noise.draw(&mut rng);
            }
            m.row_mut(r).assign(&ndarray::ArrayView1::from(&row));
        }
        m
    };
    let class1 = draw(spec.n1, 1);
    let class2 = draw(spec.n2, 2);
    TwoClassSample::new(class1, class2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn corr(x: &[f64], y: &[f64]) -> f64 {
        let (mx, my) = (mean(x), mean(y));
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn validation() {
        assert!(ExampleSpec::new(0, 5, 5, 10, 0).is_err());
        assert!(ExampleSpec::new(9, 5, 5, 10, 0).is_err());
        assert!(ExampleSpec::new(1, 5, 5, 3, 0).is_err());
        assert!(ExampleSpec::new(3, 5, 5, 3, 0).is_ok());
        assert!(ExampleSpec::new(1, 1, 5, 10, 0).is_err());
        let s8 = ExampleSpec::new(8, 5, 5, 6, 0).unwrap();
        assert!(matches!(generate(&s8), Err(Error::Config(_))));
        let plug: Arc<dyn BivariateSampler> = Arc::new(|rng: &mut dyn RngCore| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            (a, a.signum() * b.abs())
        });
        let s = generate_with(&s8, Some(plug)).unwrap();
        assert_eq!((s.n1(), s.n2(), s.dim()), (5, 5, 6));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = ExampleSpec::new(5, 7, 9, 12, 42).unwrap();
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_ne!(generate(&spec).unwrap(), generate(&spec.with_seed(43)).unwrap());
    }

    #[test]
    fn location_shift_moments() {
        let s = generate(&ExampleSpec::new(1, 10_000, 10_000, 6, 1).unwrap()).unwrap();
        for k in 0..6 {
            let diff = mean(&s.class2().column(k).to_vec()) - mean(&s.class1().column(k).to_vec());
            let target = if k < 4 { 1.0 } else { 0.0 };
            assert!((diff - target).abs() < 0.05, "column {k}: {diff}");
        }
    }

    #[test]
    fn correlation_moments() {
        let s = generate(&ExampleSpec::new(2, 10_000, 10_000, 5, 2).unwrap()).unwrap();
        for (a, b) in [(0, 1), (2, 3)] {
            let c1 = corr(&s.class1().column(a).to_vec(), &s.class1().column(b).to_vec());
            let c2 = corr(&s.class2().column(a).to_vec(), &s.class2().column(b).to_vec());
            assert!((c1 - 0.9).abs() < 0.03 && (c2 + 0.9).abs() < 0.03, "{c1} {c2}");
        }
    }

    #[test]
    fn mixture_variance() {
        let s = generate(&ExampleSpec::new(7, 10_000, 10_000, 4, 3).unwrap()).unwrap();
        for k in 0..4 {
            let col = s.class2().column(k).to_vec();
            let m = mean(&col);
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (col.len() - 1) as f64;
            assert!((var - 4.0).abs() < 0.15, "{var}");
        }
    }

    #[test]
    fn scale_design_uses_one_third_sd() {
        let s = generate(&ExampleSpec::new(4, 10, 10_000, 4, 4).unwrap()).unwrap();
        let col = s.class2().column(0).to_vec();
        let var = col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64;
        assert!((var - 1.0 / 9.0).abs() < 0.01);
    }

    #[test]
    fn design_three_signal_layout() {
        let t = true_signals(3);
        assert_eq!(t.features(), vec![0, 1, 2]);
        let s = generate(&ExampleSpec::new(3, 5_000, 5_000, 3, 5).unwrap()).unwrap();
        let d = mean(&s.class1().column(2).to_vec()) - mean(&s.class2().column(2).to_vec());
        assert!((d - 1.0).abs() < 0.07);
    }
}
