//! Scale-adjusted average distance classifiers built on a screened set.
//!
//! With `ŝ₁` retained single features and `ŝ₂` retained pairs, the
//! dissimilarity between observations `u` and `v` is
//!
//! ```text
//! h(u, v) = (1/ŝ₁) Σₖ γ(|uₖ − vₖ|²) + (1/ŝ₂) Σ_{i,j} γ((|uᵢ − vᵢ|² + |uⱼ − vⱼ|²) / 2)
//! ```
//!
//! (an empty block is left out). A new point `z` is scored by
//!
//! ```text
//! ξ(z) = [mean h(z, Y) − W₂/2] − [mean h(z, X) − W₁/2]
//! ```
//!
//! where `Wc` is the mean of `h` over distinct training pairs of class `c`,
//! and assigned to class 1 when `ξ(z) > 0`.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::GammaKernel;
use crate::mars::ScreenedSet;
use crate::sample::{Label, TwoClassSample};
use crate::sum::pairwise_mean;

/// Retained coordinates in evaluation order: the single features first,
/// then both members of each pair.
#[derive(Clone, Debug, PartialEq)]
struct Layout {
    marginal: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl Layout {
    fn new(screened: &ScreenedSet) -> Result<Self> {
        if screened.marginal.is_empty() && screened.pairs.is_empty() {
            return Err(Error::precondition("the screened set is empty"));
        }
        Ok(Layout {
            marginal: screened.marginal.clone(),
            pairs: screened.pairs.clone(),
        })
    }

    fn columns(&self) -> Vec<usize> {
        let mut c = self.marginal.clone();
        c.extend(self.pairs.iter().flat_map(|&(i, j)| [i, j]));
        c
    }

    /// `h` on rows already restricted to [`Layout::columns`].
    fn h(&self, u: ArrayView1<'_, f64>, v: ArrayView1<'_, f64>, kernel: &GammaKernel) -> f64 {
        let s1 = self.marginal.len();
        let sq = |k: usize| (u[k] - v[k]) * (u[k] - v[k]);
        let mut total = 0.0;
        if s1 > 0 {
            let sum: f64 = (0..s1).map(|k| kernel.apply(sq(k))).sum();
            total += sum / s1 as f64;
        }
        let s2 = self.pairs.len();
        if s2 > 0 {
            let sum: f64 = (0..s2)
                .map(|p| kernel.apply(0.5 * (sq(s1 + 2 * p) + sq(s1 + 2 * p + 1))))
                .sum();
            total += sum / s2 as f64;
        }
        total
    }
}

/// `h(u, v)` for full-dimension observations.
pub fn h_dissimilarity(u: &[f64], v: &[f64], screened: &ScreenedSet, kernel: &GammaKernel) -> Result<f64> {
    let layout = Layout::new(screened)?;
    if u.len() != v.len() {
        return Err(Error::precondition("observations differ in length"));
    }
    let cols = layout.columns();
    if let Some(&k) = cols.iter().find(|&&k| k >= u.len()) {
        return Err(Error::precondition(format!(
            "screened feature {} exceeds observation length {}",
            k + 1,
            u.len()
        )));
    }
    let pick = |x: &[f64]| ndarray::Array1::from_iter(cols.iter().map(|&k| x[k]));
    Ok(layout.h(pick(u).view(), pick(v).view(), kernel))
}

/// A fitted classifier.
#[derive(Clone, Debug)]
pub struct DiscriminantModel {
    layout: Layout,
    kernel: GammaKernel,
    dim: usize,
    class1: Array2<f64>,
    class2: Array2<f64>,
    within1: f64,
    within2: f64,
}

fn within_mean(rows: ArrayView2<'_, f64>, layout: &Layout, kernel: &GammaKernel) -> f64 {
    let n = rows.nrows();
    let mut vals = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            vals.push(layout.h(rows.row(a), rows.row(b), kernel));
        }
    }
    pairwise_mean(&vals)
}

/// Stores the training rows restricted to the screened features together with
/// the two within-class mean dissimilarities.
pub fn fit_discriminant(
    sample: &TwoClassSample,
    screened: &ScreenedSet,
    kernel: &GammaKernel,
) -> Result<DiscriminantModel> {
    let layout = Layout::new(screened)?;
    let cols = layout.columns();
    if let Some(&k) = cols.iter().find(|&&k| k >= sample.dim()) {
        return Err(Error::precondition(format!(
            "screened feature {} is outside the sample's {} features",
            k + 1,
            sample.dim()
        )));
    }
    let class1 = sample.class1().select(Axis(1), &cols);
    let class2 = sample.class2().select(Axis(1), &cols);
    let within1 = within_mean(class1.view(), &layout, kernel);
    let within2 = within_mean(class2.view(), &layout, kernel);
    Ok(DiscriminantModel {
        layout,
        kernel: kernel.clone(),
        dim: sample.dim(),
        class1,
        class2,
        within1,
        within2,
    })
}

impl DiscriminantModel {
    pub fn within1(&self) -> f64 {
        self.within1
    }

    pub fn within2(&self) -> f64 {
        self.within2
    }

    pub fn kernel(&self) -> &GammaKernel {
        &self.kernel
    }

    /// Number of features an observation must have.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The same model with the class roles exchanged.
    pub fn swapped(&self) -> DiscriminantModel {
        DiscriminantModel {
            class1: self.class2.clone(),
            class2: self.class1.clone(),
            within1: self.within2,
            within2: self.within1,
            ..self.clone()
        }
    }

    fn project(&self, z: &[f64]) -> Result<ndarray::Array1<f64>> {
        if z.len() != self.dim {
            return Err(Error::precondition(format!(
                "observation has {} features, model expects {}",
                z.len(),
                self.dim
            )));
        }
        Ok(self.layout.columns().iter().map(|&k| z[k]).collect())
    }

    fn score_projected(&self, z: ArrayView1<'_, f64>) -> f64 {
        let mean_to = |rows: &Array2<f64>| {
            let v: Vec<f64> = rows.rows().into_iter().map(|r| self.layout.h(z, r, &self.kernel)).collect();
            pairwise_mean(&v)
        };
        let xi1 = mean_to(&self.class1) - self.within1 / 2.0;
        let xi2 = mean_to(&self.class2) - self.within2 / 2.0;
        xi2 - xi1
    }
}

/// `ξ(z)`; positive values favour class 1.
pub fn discriminant_score(model: &DiscriminantModel, z: &[f64]) -> Result<f64> {
    let p = model.project(z)?;
    Ok(model.score_projected(p.view()))
}

/// Class 1 when `ξ(z) > 0`, class 2 otherwise.
pub fn predict(model: &DiscriminantModel, z: &[f64]) -> Result<Label> {
    Ok(label_of(discriminant_score(model, z)?))
}

fn label_of(score: f64) -> Label {
    if score > 0.0 {
        Label::One
    } else {
        Label::Two
    }
}

/// Predicted labels for every row of `rows` (full dimension), in row order.
pub fn predict_rows(model: &DiscriminantModel, rows: ArrayView2<'_, f64>) -> Result<Vec<Label>> {
    if rows.ncols() != model.dim {
        return Err(Error::data(format!(
            "test data has {} features, model expects {}",
            rows.ncols(),
            model.dim
        )));
    }
    let cols = model.layout.columns();
    let projected = rows.select(Axis(1), &cols);
    Ok((0..projected.nrows())
        .into_par_iter()
        .map(|r| label_of(model.score_projected(projected.row(r))))
        .collect())
}

/// Fraction of test rows assigned to the wrong class.
pub fn misclassification_rate(model: &DiscriminantModel, test: &TwoClassSample) -> Result<f64> {
    let p1 = predict_rows(model, test.class1())?;
    let p2 = predict_rows(model, test.class2())?;
    let wrong = p1.iter().filter(|&&l| l != Label::One).count() + p2.iter().filter(|&&l| l != Label::Two).count();
    Ok(wrong as f64 / (p1.len() + p2.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mars::ScreenMethod;

    fn screened(marginal: Vec<usize>, pairs: Vec<(usize, usize)>, dim: usize) -> ScreenedSet {
        let mut s = ScreenedSet::unscreened(dim);
        s.method = ScreenMethod::Mixed;
        s.s_hat = marginal.len() + pairs.len();
        s.marginal = marginal;
        s.pairs = pairs;
        s
    }

    fn one_d_model() -> DiscriminantModel {
        let s = TwoClassSample::from_rows(&[vec![0.0], vec![0.1]], &[vec![10.0], vec![10.1]]).unwrap();
        fit_discriminant(&s, &ScreenedSet::unscreened(1), &GammaKernel::Gamma1).unwrap()
    }

    #[test]
    fn h_examples() {
        let g3 = GammaKernel::Gamma3;
        let u = [3.0, 7.0, -1.0];
        let m = screened(vec![0], vec![], 3);
        assert_eq!(h_dissimilarity(&u, &u, &m, &g3).unwrap(), 0.0);
        assert_eq!(h_dissimilarity(&u, &[0.0, 0.0, 0.0], &m, &g3).unwrap(), 3.0);
        let p = screened(vec![], vec![(0, 1)], 3);
        assert_eq!(h_dissimilarity(&[1.0, 1.0, 5.0], &[0.0, 0.0, 0.0], &p, &g3).unwrap(), 1.0);
        let both = screened(vec![2], vec![(0, 1)], 3);
        let v = [0.5, -2.0, 4.0];
        assert_eq!(
            h_dissimilarity(&u, &v, &both, &g3).unwrap(),
            h_dissimilarity(&v, &u, &both, &g3).unwrap()
        );
        assert!(h_dissimilarity(&u, &v, &screened(vec![], vec![], 3), &g3).is_err());
    }

    #[test]
    fn score_examples() {
        let m = one_d_model();
        let expected = |z: f64| {
            let g = |t: f64| 1.0 - (-t).exp();
            let w1 = g(0.01);
            let w2 = g(0.01);
            let hx = (g((z - 0.0) * (z - 0.0)) + g((z - 0.1) * (z - 0.1))) / 2.0;
            let hy = (g((z - 10.0) * (z - 10.0)) + g((z - 10.1) * (z - 10.1))) / 2.0;
            (hy - w2 / 2.0) - (hx - w1 / 2.0)
        };
        let s = discriminant_score(&m, &[0.05]).unwrap();
        assert!((s - expected(0.05)).abs() < 1e-12);
        assert!((s - 0.9975).abs() < 1e-3);
        let s2 = discriminant_score(&m, &[10.05]).unwrap();
        assert!((s2 + 0.9975).abs() < 1e-3);
        assert_eq!(predict(&m, &[0.05]).unwrap(), Label::One);
        assert_eq!(predict(&m, &[10.05]).unwrap(), Label::Two);
        assert!(discriminant_score(&m, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn identical_classes_score_zero_and_predict_two() {
        let rows = vec![vec![0.3, 1.0], vec![-0.7, 2.0], vec![1.1, 0.0]];
        let s = TwoClassSample::from_rows(&rows, &rows).unwrap();
        let m = fit_discriminant(&s, &ScreenedSet::unscreened(2), &GammaKernel::Gamma2).unwrap();
        for z in [[0.0, 0.0], [5.0, -3.0], [0.3, 1.0]] {
            assert_eq!(discriminant_score(&m, &z).unwrap(), 0.0);
            assert_eq!(predict(&m, &z).unwrap(), Label::Two);
        }
    }

    #[test]
    fn within_terms() {
        let c = vec![vec![2.0, 2.0], vec![2.0, 2.0], vec![2.0, 2.0]];
        let s = TwoClassSample::from_rows(&c, &[vec![0.0, 1.0], vec![3.0, 1.0]]).unwrap();
        let scr = screened(vec![0], vec![], 2);
        let m = fit_discriminant(&s, &scr, &GammaKernel::Gamma3).unwrap();
        assert_eq!(m.within1(), 0.0);
        assert!((m.within2() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn swapping_roles_negates_scores() {
        let c1 = vec![vec![0.0, 1.0, 2.0], vec![0.4, 0.2, -1.0], vec![1.5, -0.3, 0.7]];
        let c2 = vec![vec![2.0, 1.0, 0.0], vec![-0.4, 3.2, 1.0]];
        let s = TwoClassSample::from_rows(&c1, &c2).unwrap();
        let scr = screened(vec![2], vec![(0, 1)], 3);
        let m = fit_discriminant(&s, &scr, &GammaKernel::Gamma1).unwrap();
        let w = fit_discriminant(&s.swapped(), &scr, &GammaKernel::Gamma1).unwrap();
        for z in [[0.1, 0.2, 0.3], [3.0, -1.0, 2.0]] {
            let a = discriminant_score(&m, &z).unwrap();
            assert_eq!(a, -discriminant_score(&w, &z).unwrap());
            assert_eq!(a, -discriminant_score(&m.swapped(), &z).unwrap());
        }
    }

    #[test]
    fn separated_and_swapped_rates() {
        let m = one_d_model();
        let test = TwoClassSample::from_rows(&[vec![0.02], vec![-0.3], vec![0.5]], &[vec![9.0], vec![11.0]]).unwrap();
        assert_eq!(misclassification_rate(&m, &test).unwrap(), 0.0);
        assert_eq!(misclassification_rate(&m, &test.swapped()).unwrap(), 1.0);
        let wrong_dim = TwoClassSample::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]], &[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(misclassification_rate(&m, &wrong_dim), Err(Error::Data(_))));
    }
}
