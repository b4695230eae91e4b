//! Minimum-weight perfect matching of features.
//!
//! Pairing features so that the summed pair energy is maximal is posed as a
//! minimum-weight perfect matching on the complete graph with edge weights
//! `K − Ê_{i,j}`, `K = max Ê + 1`. The exact solver converts the `f64`
//! weights to integers without rounding and runs an integer blossom
//! algorithm, so the returned matching is optimal for the weights exactly as
//! given.

use ndarray::Array2;

use crate::blossom::{max_weight_matching, Edge};
use crate::energy::PairEnergyMatrix;
use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Symmetric matrix of strictly positive edge weights (diagonal unused).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    values: Array2<f64>,
}

impl WeightMatrix {
    /// Validates a square symmetric matrix of positive finite off-diagonal weights.
    pub fn from_values(mut values: Array2<f64>) -> Result<Self> {
        let d = values.nrows();
        if values.ncols() != d || d < 2 {
            return Err(Error::precondition("weight matrix must be square with at least 2 rows"));
        }
        for i in 0..d {
            values[[i, i]] = f64::NAN;
            for j in (i + 1)..d {
                let (a, b) = (values[[i, j]], values[[j, i]]);
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::data(format!("weight ({}, {}) = {a} is not positive and finite", i + 1, j + 1)));
                }
                if a.to_bits() != b.to_bits() {
                    return Err(Error::data(format!("weight matrix not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(WeightMatrix { values })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }
}

/// `W = (max Ê + 1) − Ê` over the off-diagonal entries.
pub fn build_weight_matrix(energies: &PairEnergyMatrix) -> Result<WeightMatrix> {
    let d = energies.dim();
    if d < 2 || d % 2 == 1 {
        return Err(Error::precondition(format!("weight matrix needs an even dimension >= 2 (got {d})")));
    }
    let k = energies.max_off_diagonal().expect("d >= 2") + 1.0;
    let mut values = Array2::from_elem((d, d), f64::NAN);
    for i in 0..d {
        for j in (i + 1)..d {
            let w = k - energies.get(i, j).expect("off-diagonal");
            values[[i, j]] = w;
            values[[j, i]] = w;
        }
    }
    WeightMatrix::from_values(values)
}

/// A perfect matching: `pairs` are `(i, j)` with `i < j`, sorted by `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the weights of the matched edges.
    pub total_weight: f64,
}

impl Matching {
    fn from_pairs(mut pairs: Vec<(usize, usize)>, weights: &WeightMatrix) -> Self {
        for p in &mut pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let w: Vec<f64> = pairs.iter().map(|&(i, j)| weights.get(i, j)).collect();
        Matching {
            total_weight: pairwise_sum(&w),
            pairs,
        }
    }

    /// Sum of `Ê_{i,j}` over the matched pairs.
    pub fn total_energy(&self, energies: &PairEnergyMatrix) -> f64 {
        let e: Vec<f64> = self
            .pairs
            .iter()
            .map(|&(i, j)| energies.get(i, j).unwrap_or(f64::NAN))
            .collect();
        pairwise_sum(&e)
    }

    /// Checks that every index of `0..d` occurs exactly once.
    pub fn is_perfect(&self, d: usize) -> bool {
        let mut seen = vec![false; d];
        for &(i, j) in &self.pairs {
            for k in [i, j] {
                if k >= d || seen[k] {
                    return false;
                }
                seen[k] = true;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Matching algorithm selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchingSolver {
    /// Exact blossom algorithm, O(d³).
    Exact,
    /// Repeatedly matches the lightest remaining edge. Not optimal in general.
    Greedy,
    /// Exact up to the given dimension, greedy above it.
    Auto { exact_up_to: usize },
}

impl Default for MatchingSolver {
    fn default() -> Self {
        MatchingSolver::Auto { exact_up_to: 2000 }
    }
}

impl MatchingSolver {
    fn use_exact(self, d: usize) -> bool {
        match self {
            MatchingSolver::Exact => true,
            MatchingSolver::Greedy => false,
            MatchingSolver::Auto { exact_up_to } => d <= exact_up_to,
        }
    }
}

/// Largest supported spread of weight magnitudes, in bits, for the exact solver.
const MAX_WEIGHT_BITS: i32 = 100;

/// Integer mantissa and binary exponent with `x = m · 2^e`, `m` odd.
fn decompose(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (m, e)
}

/// Exact integer images of positive finite weights under a common power-of-two scaling.
fn to_integer_weights(w: &[f64]) -> Result<Vec<i128>> {
    let parts: Vec<(u64, i32)> = w.iter().map(|&x| decompose(x)).collect();
    let e_min = parts.iter().map(|p| p.1).min().unwrap_or(0);
    let top = parts
        .iter()
        .map(|&(m, e)| e - e_min + (64 - m.leading_zeros() as i32))
        .max()
        .unwrap_or(0);
    if top > MAX_WEIGHT_BITS {
        return Err(Error::Matching(format!(
            "weights span {top} bits; the exact solver supports at most {MAX_WEIGHT_BITS}"
        )));
    }
    Ok(parts.iter().map(|&(m, e)| (m as i128) << (e - e_min)).collect())
}

fn check_even(d: usize) -> Result<()> {
    if d < 2 || d % 2 == 1 {
        return Err(Error::precondition(format!("perfect matching needs an even number of vertices >= 2 (got {d})")));
    }
    Ok(())
}

/// Exact minimum-weight perfect matching.
pub fn min_weight_perfect_matching(weights: &WeightMatrix) -> Result<Matching> {
    let d = weights.dim();
    check_even(d)?;
    let index: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let raw: Vec<f64> = index.iter().map(|&(i, j)| weights.get(i, j)).collect();
    let ints = to_integer_weights(&raw)?;
    let top = *ints.iter().max().expect("d >= 2") + 1;
    // Maximising (top − w) over maximum-cardinality matchings minimises Σ w
    // over perfect matchings, since every perfect matching has d/2 edges.
    let edges: Vec<Edge> = index
        .iter()
        .zip(&ints)
        .map(|(&(u, v), &w)| Edge { u, v, w: top - w })
        .collect();
    let mate = max_weight_matching(d, &edges, true);
    let mut pairs = Vec::with_capacity(d / 2);
    for (v, m) in mate.iter().enumerate() {
        match m {
            Some(u) if v < *u => pairs.push((v, *u)),
            Some(_) => {}
            None => return Err(Error::Matching(format!("vertex {} left unmatched", v + 1))),
        }
    }
    let matching = Matching::from_pairs(pairs, weights);
    if !matching.is_perfect(d) {
        return Err(Error::Matching("solver returned an invalid matching".into()));
    }
    Ok(matching)
}

/// Greedy perfect matching: edges in ascending `(weight, i, j)` order.
pub fn greedy_perfect_matching(weights: &WeightMatrix) -> Result<Matching> {
    let d = weights.dim();
    check_even(d)?;
    let mut edges: Vec<(f64, usize, usize)> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .map(|(i, j)| (weights.get(i, j), i, j))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used = vec![false; d];
    let mut pairs = Vec::with_capacity(d / 2);
    for (_, i, j) in edges {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j));
            if pairs.len() == d / 2 {
                break;
            }
        }
    }
    Ok(Matching::from_pairs(pairs, weights))
}

pub fn min_weight_perfect_matching_with(weights: &WeightMatrix, solver: MatchingSolver) -> Result<Matching> {
    if solver.use_exact(weights.dim()) {
        min_weight_perfect_matching(weights)
    } else {
        greedy_perfect_matching(weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Estimator;
    use crate::kernel::GammaKernel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn energy_matrix(d: usize, entries: &[(usize, usize, f64)]) -> PairEnergyMatrix {
        let mut v = Array2::zeros((d, d));
        for &(i, j, e) in entries {
            v[[i, j]] = e;
            v[[j, i]] = e;
        }
        PairEnergyMatrix::from_values(v, GammaKernel::Gamma1, Estimator::Unbiased).unwrap()
    }

    /// All perfect matchings of `0..d`, by recursion on the lowest free vertex.
    fn all_matchings(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for idx in 0..free.len() {
            let b = free.remove(idx);
            cur.push((a, b));
            all_matchings(free, cur, out);
            cur.pop();
            free.insert(idx, b);
        }
        free.insert(0, a);
    }

    #[test]
    fn four_feature_example() {
        let e = energy_matrix(4, &[(0, 1, 5.0), (2, 3, 4.0)]);
        let w = build_weight_matrix(&e).unwrap();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(2, 3), 2.0);
        assert_eq!(w.get(0, 2), 6.0);
        let m = min_weight_perfect_matching(&w).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_energy(&e), 9.0);
        assert_eq!(m.total_weight, 3.0);

        let mut out = Vec::new();
        all_matchings(&mut (0..4).collect(), &mut Vec::new(), &mut out);
        let mut totals: Vec<f64> = out
            .iter()
            .map(|p| p.iter().map(|&(i, j)| w.get(i, j)).sum())
            .collect();
        totals.sort_by(f64::total_cmp);
        assert_eq!(totals, vec![3.0, 12.0, 12.0]);
    }

    #[test]
    fn zero_energies_give_unit_weights() {
        let e = energy_matrix(4, &[]);
        let w = build_weight_matrix(&e).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| i == j || w.get(i, j) == 1.0)));
    }

    #[test]
    fn two_vertices_and_errors() {
        let w = WeightMatrix::from_values(ndarray::array![[0.0, 2.5], [2.5, 0.0]]).unwrap();
        assert_eq!(min_weight_perfect_matching(&w).unwrap().pairs, vec![(0, 1)]);
        let odd = WeightMatrix::from_values(Array2::from_elem((3, 3), 1.0)).unwrap();
        assert!(matches!(min_weight_perfect_matching(&odd), Err(Error::Precondition(_))));
        assert!(WeightMatrix::from_values(ndarray::array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(WeightMatrix::from_values(ndarray::array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        let huge = WeightMatrix::from_values(ndarray::array![
            [0.0, 1e-200, 1.0, 1.0],
            [1e-200, 0.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 1e200],
            [1.0, 1.0, 1e200, 0.0]
        ])
        .unwrap();
        assert!(matches!(min_weight_perfect_matching(&huge), Err(Error::Matching(_))));
    }

    #[test]
    fn integer_conversion_is_exact_and_order_preserving() {
        let w = [1.5, 0.1, 3.0, 0.1 + 0.2, 1e-3];
        let ints = to_integer_weights(&w).unwrap();
        for a in 0..w.len() {
            for b in 0..w.len() {
                assert_eq!(w[a].partial_cmp(&w[b]), ints[a].partial_cmp(&ints[b]));
                // Exact ratio check through f64 where representable.
                if ints[a] < (1 << 53) && ints[b] < (1 << 53) {
                    assert_eq!(w[a] * ints[b] as f64, w[b] * ints[a] as f64);
                }
            }
        }
    }

    #[test]
    fn exact_solver_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for d in [4usize, 6, 8, 10] {
            let mut out = Vec::new();
            all_matchings(&mut (0..d).collect(), &mut Vec::new(), &mut out);
            for _ in 0..60 {
                let mut v = Array2::zeros((d, d));
                for i in 0..d {
                    for j in (i + 1)..d {
                        // Coarse grid forces frequent ties.
                        let x = if rng.random::<bool>() { rng.random_range(1..5) as f64 } else { rng.random::<f64>() * 10.0 + 0.01 };
                        v[[i, j]] = x;
                        v[[j, i]] = x;
                    }
                }
                let w = WeightMatrix::from_values(v).unwrap();
                let m = min_weight_perfect_matching(&w).unwrap();
                assert!(m.is_perfect(d));
                let sum = |p: &[(usize, usize)]| p.iter().map(|&(i, j)| w.get(i, j)).sum::<f64>();
                let best = out.iter().map(|p| sum(p)).fold(f64::INFINITY, f64::min);
                assert!((sum(&m.pairs) - best).abs() <= 1e-12 * best, "d={d}: {} vs {best}", sum(&m.pairs));
                let g = greedy_perfect_matching(&w).unwrap();
                assert!(g.is_perfect(d));
                assert!(g.total_weight >= m.total_weight - 1e-12 * best);
            }
        }
    }

    #[test]
    fn disjoint_signal_pairs_are_recovered() {
        let e = energy_matrix(10, &[(1, 7, 0.8), (3, 4, 0.5)]);
        let m = min_weight_perfect_matching(&build_weight_matrix(&e).unwrap()).unwrap();
        assert!(m.pairs.contains(&(1, 7)) && m.pairs.contains(&(3, 4)));
    }

    #[test]
    fn larger_instances_stay_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 120;
        let mut v = Array2::zeros((d, d));
        for i in 0..d {
            for j in (i + 1)..d {
                let x = rng.random::<f64>() + 0.5;
                v[[i, j]] = x;
                v[[j, i]] = x;
            }
        }
        let w = WeightMatrix::from_values(v).unwrap();
        let m = min_weight_perfect_matching(&w).unwrap();
        assert!(m.is_perfect(d));
        let g = min_weight_perfect_matching_with(&w, MatchingSolver::Greedy).unwrap();
        assert!(g.total_weight >= m.total_weight);
        let a = min_weight_perfect_matching_with(&w, MatchingSolver::Auto { exact_up_to: 10 }).unwrap();
        assert_eq!(a, g);
    }
}
