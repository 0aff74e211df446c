//! Scalar abstraction shared by the numerical modules.
//!
//! Every state, operator and gate is generic over a [`Real`] field type so the
//! same code runs in `f64` (the default, used for all certification work) and
//! `f32` (useful for quick sweeps where 1e-5 agreement is enough).

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Bound used by construction-time checks: unitarity, normalization,
    /// hermiticity and trace preservation.
    const TOLERANCE: Self;
    /// Bound on the most negative eigenvalue a density operator may carry.
    /// Eigen-solvers are the looser step, hence a separate constant.
    const PSD_TOLERANCE: Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Probabilities at or below this are treated as exactly zero when deciding
    /// whether a post-measurement state is defined.
    #[inline]
    fn probability_floor() -> Self {
        Self::epsilon() * Self::epsilon()
    }
}

impl Real for f64 {
    const TOLERANCE: f64 = 1e-12;
    const PSD_TOLERANCE: f64 = 1e-10;
}

impl Real for f32 {
    const TOLERANCE: f32 = 1e-5;
    const PSD_TOLERANCE: f32 = 1e-4;
}

/// Neumaier-compensated sum. Used wherever reductions must not depend on the
/// length or grouping of the input beyond the last few ulps.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1.0e16, 1.0, -1.0e16, 1.0];
        assert_eq!(compensated_sum(values), 2.0);
        let naive: f64 = values.iter().sum();
        assert_ne!(naive, 2.0);
    }

    const _: () = assert!(<f64 as Real>::TOLERANCE < <f64 as Real>::PSD_TOLERANCE);
    const _: () = assert!(<f32 as Real>::TOLERANCE < <f32 as Real>::PSD_TOLERANCE);
}
