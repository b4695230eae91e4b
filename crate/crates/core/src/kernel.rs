//! The γ functions that turn squared differences into dissimilarities.
//!
//! Every kernel is a non-decreasing map of `[0, ∞)` into itself with
//! `γ(0) = 0`. The three built-in choices are
//!
//! | kernel   | γ(t)          | character                  |
//! |----------|---------------|----------------------------|
//! | `Gamma1` | `1 − exp(−t)` | bounded, robust to outliers |
//! | `Gamma2` | `log(1 + t)`  | unbounded, 1-Lipschitz      |
//! | `Gamma3` | `√t`          | unbounded, reduces to `|u − v|` |
//!
//! The kernel is always applied to a *squared* difference, so `Gamma3`
//! recovers the classical energy distance built on absolute differences.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A user-supplied γ. No validity check for complete monotonicity is
/// attempted; the caller is responsible for `γ(0) = 0` and monotonicity.
#[derive(Clone)]
pub struct CustomGamma {
    name: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomGamma {
    pub fn new(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CustomGamma {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CustomGamma").field(&self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum GammaKernel {
    Gamma1,
    Gamma2,
    Gamma3,
    Custom(CustomGamma),
}

impl GammaKernel {
    /// The three built-in kernels, in order.
    pub const BUILTIN: [GammaKernel; 3] = [GammaKernel::Gamma1, GammaKernel::Gamma2, GammaKernel::Gamma3];

    /// Evaluates `γ(t)`, rejecting negative or NaN arguments.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("gamma kernel argument must be non-negative, got {t}")));
        }
        Ok(self.apply(t))
    }

    /// Unchecked evaluation for internal hot loops where `t ≥ 0` holds by construction.
    #[inline]
    pub(crate) fn apply(&self, t: f64) -> f64 {
        match self {
            GammaKernel::Gamma1 => gamma1(t),
            GammaKernel::Gamma2 => t.ln_1p(),
            GammaKernel::Gamma3 => t.sqrt(),
            GammaKernel::Custom(c) => (c.func)(t),
        }
    }

    /// Replaces every element `t` of `buf` by `γ(t)`.
    ///
    /// The match is hoisted out of the loop so each arm compiles to a tight loop.
    pub(crate) fn apply_in_place(&self, buf: &mut [f64]) {
        match self {
            GammaKernel::Gamma1 => buf.iter_mut().for_each(|t| *t = gamma1(*t)),
            GammaKernel::Gamma2 => buf.iter_mut().for_each(|t| *t = t.ln_1p()),
            GammaKernel::Gamma3 => buf.iter_mut().for_each(|t| *t = t.sqrt()),
            GammaKernel::Custom(c) => buf.iter_mut().for_each(|t| *t = (c.func)(*t)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            GammaKernel::Gamma1 => "g1",
            GammaKernel::Gamma2 => "g2",
            GammaKernel::Gamma3 => "g3",
            GammaKernel::Custom(c) => c.name(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, GammaKernel::Gamma1)
    }
}

#[inline]
fn gamma1(t: f64) -> f64 {
    // -expm1(-t) is exact near zero and gives +0.0 at t = 0.
    -(-t).exp_m1() + 0.0
}

/// `γ(t)` for a kernel; see [`GammaKernel::eval`].
pub fn gamma_eval(kernel: &GammaKernel, t: f64) -> Result<f64> {
    kernel.eval(t)
}

impl fmt::Display for GammaKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GammaKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g1" | "gamma1" => Ok(GammaKernel::Gamma1),
            "g2" | "gamma2" => Ok(GammaKernel::Gamma2),
            "g3" | "gamma3" => Ok(GammaKernel::Gamma3),
            other => Err(Error::config(format!("unknown gamma kernel '{other}' (expected g1, g2 or g3)"))),
        }
    }
}

impl PartialEq for GammaKernel {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GammaKernel::Custom(a), GammaKernel::Custom(b)) => Arc::ptr_eq(&a.func, &b.func),
            (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}
