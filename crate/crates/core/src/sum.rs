//! Pairwise (cascade) summation.
//!
//! The energy statistics are means over O(n²) kernel evaluations, and a
//! whole profile touches d·n² terms. Pairwise summation keeps the rounding
//! error at O(ε log N) instead of O(ε N) while staying branch-light and
//! deterministic: the reduction tree depends only on the slice length.

const BLOCK: usize = 64;

/// Sum of `values` with a fixed binary reduction tree.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        // Eight independent accumulators; the order is fixed so the result
        // is reproducible.
        let mut acc = [0.0f64; 8];
        let chunks = values.chunks_exact(8);
        let rest = chunks.remainder();
        for c in chunks {
            for k in 0..8 {
                acc[k] += c[k];
            }
        }
        let mut s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
        for &v in rest {
            s += v;
        }
        return s;
    }
    let mid = (values.len() / 2 / 8) * 8;
    let mid = if mid == 0 { values.len() / 2 } else { mid };
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Arithmetic mean via [`pairwise_sum`]; `NaN` for an empty slice.
pub fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_sums_are_exact() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.5]), 1.5);
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn beats_naive_accumulation() {
        // 1e7 copies of 0.1: naive summation drifts by ~1e-4 relative.
        let v = vec![0.1f64; 10_000_000];
        let exact = 1_000_000.0;
        let naive: f64 = v.iter().sum();
        let pw = pairwise_sum(&v);
        assert!((pw - exact).abs() < (naive - exact).abs());
        assert!((pw - exact).abs() / exact < 1e-12);
    }

    proptest! {
        #[test]
        fn matches_naive_within_rounding(v in proptest::collection::vec(-1e3f64..1e3, 0..500)) {
            let naive: f64 = v.iter().sum();
            let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!((pairwise_sum(&v) - naive).abs() <= 1e-12 * scale);
        }
    }
}
