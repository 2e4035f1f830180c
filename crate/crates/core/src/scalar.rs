//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Validation slacks scale with the precision of the type, so an `f32`
/// density matrix is not rejected for rounding that is normal at single
/// precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Max |ρ_ij − conj(ρ_ji)| accepted for a density matrix.
    fn hermitian_tol() -> Self;
    /// Max |Tr ρ − 1| accepted for a density matrix.
    fn trace_tol() -> Self;
    /// Smallest eigenvalue accepted as PSD (negative slack).
    fn psd_slack() -> Self;
    /// Default absolute tolerance of matrix equality.
    fn eq_tol() -> Self;
    /// Max |Σ p − 1| accepted for an outcome distribution.
    fn prob_sum_tol() -> Self;
    /// Negative probabilities above `-prob_neg_tol` are clamped to 0.
    fn prob_neg_tol() -> Self;
    /// Kraus completeness tolerance.
    fn completeness_tol() -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn hermitian_tol() -> Self {
        1e-10
    }
    fn trace_tol() -> Self {
        1e-10
    }
    fn psd_slack() -> Self {
        1e-9
    }
    fn eq_tol() -> Self {
        1e-12
    }
    fn prob_sum_tol() -> Self {
        1e-10
    }
    fn prob_neg_tol() -> Self {
        1e-12
    }
    fn completeness_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn hermitian_tol() -> Self {
        1e-5
    }
    fn trace_tol() -> Self {
        1e-5
    }
    fn psd_slack() -> Self {
        1e-4
    }
    fn eq_tol() -> Self {
        1e-6
    }
    fn prob_sum_tol() -> Self {
        1e-5
    }
    fn prob_neg_tol() -> Self {
        1e-6
    }
    fn completeness_tol() -> Self {
        1e-4
    }
}
