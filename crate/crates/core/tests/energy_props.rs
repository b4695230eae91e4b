use energy_screen::energy::{marginal_energy, pair_energy_matrix};
use energy_screen::harness::mean_se;
use energy_screen::kernel::GammaKernel;
use energy_screen::sample::TwoClassSample;
use energy_screen::seed::{derive_seed, rng_from_seed};
use energy_screen::simgen::{generate, ExampleSpec};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

fn normals(seed: u64, n: usize, shift: f64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| shift + rng.sample::<f64, _>(StandardNormal)).collect()
}

fn mc_energy(reps: usize, n: usize, shift: f64, kernel: &GammaKernel, seed: u64) -> (f64, f64) {
    let est: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r as u64);
            let x = normals(derive_seed(s, 0), n, 0.0);
            let y = normals(derive_seed(s, 1), n, shift);
            marginal_energy(&x, &y, kernel).unwrap()
        })
        .collect();
    mean_se(&est)
}

#[test]
fn null_expectation_is_zero() {
    for k in GammaKernel::BUILTIN {
        let (mean, se) = mc_energy(10_000, 10, 0.0, &k, 17);
        assert!(mean.abs() <= 4.0 * se, "{}: mean {mean} se {se}", k.name());
    }
}

#[test]
fn separated_distributions_have_positive_energy() {
    for k in GammaKernel::BUILTIN {
        let (mean, se) = mc_energy(40, 200, 2.0, &k, 5);
        assert!(mean > 5.0 * se, "{}: mean {mean} se {se}", k.name());
    }
}

#[test]
fn pair_matrix_is_independent_of_worker_count() {
    let sample = generate(&ExampleSpec::new(2, 30, 30, 24, 8).unwrap()).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| pair_energy_matrix(&sample, &GammaKernel::Gamma1).unwrap())
    };
    let a = run(1);
    let b = run(3);
    let bits = |m: &energy_screen::energy::PairEnergyMatrix| m.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn marginal_equality_designs_have_null_marginal_energy() {
    // Design 2 moves only the correlation of the signal pairs.
    let reps = 2000;
    let est: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = generate(&ExampleSpec::new(2, 20, 20, 4, derive_seed(99, r)).unwrap()).unwrap();
            (0..4)
                .map(|k| {
                    let (x, y) = s.column_pair(k);
                    marginal_energy(&x, &y, &GammaKernel::Gamma1).unwrap()
                })
                .collect()
        })
        .collect();
    for k in 0..4 {
        let col: Vec<f64> = est.iter().map(|v| v[k]).collect();
        let (mean, se) = mean_se(&col);
        assert!(mean.abs() <= 4.0 * se, "column {k}: mean {mean} se {se}");
    }
}

#[test]
fn constant_columns_give_zero_energy() {
    let x = Array2::from_elem((5, 2), 1.5);
    let s = TwoClassSample::new(x.clone(), x).unwrap();
    for k in 0..2 {
        let (a, b) = s.column_pair(k);
        assert_eq!(marginal_energy(&a, &b, &GammaKernel::Gamma3).unwrap(), 0.0);
    }
}
