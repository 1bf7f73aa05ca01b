//! Scalar abstraction for the geometric and transport kernels.
//!
//! Everything upstream of the Gaussian/Monte Carlo layers is generic over
//! [`Real`], so the same code runs in `f32` for quick experiments and `f64`
//! for the certified tolerances. Concrete aliases at the crate root pin the
//! default to `f64`.

use std::fmt::{Debug, Display};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + num_traits::ToPrimitive + Debug + Display + 'static
{
    /// Lossy conversion from `f64`, used for tolerances and literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Sums with Neumaier compensation; the mass-bookkeeping invariants
/// (recombination below 1e-14) are not reachable with naive summation.
pub fn compensated_sum<F: Real>(values: impl IntoIterator<Item = F>) -> F {
    let mut sum = F::zero();
    let mut comp = F::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}
