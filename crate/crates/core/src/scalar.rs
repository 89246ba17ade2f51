//! Scalar abstraction shared by every numeric module.
//!
//! Coefficients of propagated Pauli strings, Bloch components, noise strengths
//! and dense density matrices are all generic over [`Real`]. Both `f32` and
//! `f64` implement it; the crate root exports `f64` aliases for everyday use.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by both the combinatorial engine and the
/// dense oracle.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + RealField + Default + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for trace and Hermiticity checks on density matrices.
    const TRACE_TOL: f64;
    /// Most negative eigenvalue still accepted as positive semidefinite.
    const PSD_TOL: f64;
    /// Tolerance used when comparing two oracle computations entrywise.
    const ORACLE_TOL: f64;

    /// Converts an `f64` literal. Never fails for finite inputs.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 literal")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TRACE_TOL: f64 = 1e-12;
    const PSD_TOL: f64 = 1e-10;
    const ORACLE_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const TRACE_TOL: f64 = 1e-4;
    const PSD_TOL: f64 = 1e-4;
    const ORACLE_TOL: f64 = 1e-4;
}
