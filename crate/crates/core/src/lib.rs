//! Energy-distance feature screening and distance-based classification for
//! two-class data with many more features than observations.
//!
//! The building block is the sample energy distance between the two classes
//! ([`energy`]), computed per feature or per pair of features under one of
//! several kernels ([`kernel`]). On top of it:
//!
//! - [`mars`] screens features one at a time with a ratio cut on the ordered
//!   energies,
//! - [`pairs`] matches features into pairs with an exact minimum-weight
//!   perfect matching ([`matching`]) and screens the pairs,
//! - [`mixs`] resolves each screened pair into a pair or single features by
//!   resampling tests,
//! - [`classify`] fits the gSAVG/bgSAVG discriminant on the screened blocks.
//!
//! [`simgen`] draws the simulation designs, [`csvio`] reads and writes
//! labelled CSV files and [`harness`] runs the commands and replication
//! studies behind the `energy-screen` binary.
//!
//! ```
//! use energy_screen::{generate, mars_screen, ExampleSpec, GammaKernel, ScreenConfig};
//!
//! let sample = generate(&ExampleSpec::new(1, 80, 80, 100, 3)?)?;
//! let set = mars_screen(&sample, &GammaKernel::Gamma2, &ScreenConfig::default())?;
//! assert!(set.marginal.starts_with(&[0, 1, 2, 3]));
//! # Ok::<(), energy_screen::Error>(())
//! ```
//!
//! All parallel work runs on the rayon global pool (or the pool installed by
//! the caller). Results are identical for any number of threads.

mod blossom;
pub mod classify;
pub mod csvio;
pub mod energy;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod mars;
pub mod matching;
pub mod mixs;
pub mod pairs;
pub mod sample;
pub mod seed;
pub mod simgen;
pub mod sum;

pub use classify::{fit_discriminant, misclassification_rate, predict, DiscriminantModel};
pub use energy::{marginal_energy, pair_energy, Estimator};
pub use error::{Error, Result};
pub use kernel::GammaKernel;
pub use mars::{mars_screen, ScreenConfig, ScreenMethod, ScreenedSet, SearchRange};
pub use matching::{min_weight_perfect_matching, Matching, MatchingSolver, WeightMatrix};
pub use mixs::{mixs_screen, ResampleConfig, ResampleScheme, Verdict};
pub use pairs::pairs_screen;
pub use sample::{Label, TwoClassSample};
pub use simgen::{generate, ExampleSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/marginal.md")]
    mod marginal {}
    #[doc = include_str!("../../../book/src/paired.md")]
    mod paired {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
