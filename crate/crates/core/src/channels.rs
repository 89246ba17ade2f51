//! Depolarizing and reset channels and their Heisenberg-picture actions on
//! Pauli strings.
//!
//! The fired depolarizing error `D` is self-adjoint and kills every
//! non-identity factor on its qubit. The adjoint of a reset to
//! `rho = (I + aX + bY + cZ) / 2` maps `I -> I`, `X -> a I`, `Y -> b I` and
//! `Z -> c I` on the reset qubit.

use crate::error::{Error, Result};
use crate::pauli::{PauliLabel, PauliString};
use crate::scalar::Real;

/// Slack allowed on `|r| <= 1` when validating Bloch vectors.
pub const BLOCH_NORM_SLACK: f64 = 1e-9;

/// Bloch vector `(a, b, c)` of a single-qubit state with exact-zero flags.
///
/// The flags are fixed at construction: a component is exactly zero iff the
/// value handed in compares equal to zero. Survival logic only ever consults
/// the flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bloch<T = f64> {
    components: [T; 3],
    exact_zero: [bool; 3],
}

impl<T: Real> Bloch<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        let components = [a, b, c];
        Bloch {
            components,
            exact_zero: components.map(|v| v == T::zero()),
        }
    }

    /// `|0>`.
    pub fn zero_state() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    /// `|1>`.
    pub fn one_state() -> Self {
        Self::new(T::zero(), T::zero(), -T::one())
    }

    /// `|+>`.
    pub fn plus_state() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    /// H-type magic state, Bloch vector `(1/sqrt2, 0, 1/sqrt2)`.
    pub fn magic_state() -> Self {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        Self::new(h, T::zero(), h)
    }

    /// T-type magic state, Bloch vector `(1, 1, 1)/sqrt3`; no zero component.
    pub fn t_magic_state() -> Self {
        let t = T::lit(1.0 / 3f64.sqrt());
        Self::new(t, t, t)
    }

    pub fn maximally_mixed() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn components(&self) -> [T; 3] {
        self.components
    }

    pub fn exact_zero_flags(&self) -> [bool; 3] {
        self.exact_zero
    }

    /// Coefficient picked up by a non-identity label under the reset
    /// adjoint, with its exact-zero flag. Identity maps to `(1, false)`.
    pub fn component(&self, label: PauliLabel) -> (T, bool) {
        match label {
            PauliLabel::I => (T::one(), false),
            PauliLabel::X => (self.components[0], self.exact_zero[0]),
            PauliLabel::Y => (self.components[1], self.exact_zero[1]),
            PauliLabel::Z => (self.components[2], self.exact_zero[2]),
        }
    }

    pub fn norm(&self) -> T {
        let [a, b, c] = self.components;
        num_traits::Float::sqrt(a * a + b * b + c * c)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.norm().as_f64();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_SLACK {
            return Err(Error::InvalidResetState { norm });
        }
        Ok(())
    }

    /// Converts between scalar types, preserving the exact-zero flags.
    pub fn cast<U: Real>(&self) -> Bloch<U> {
        Bloch {
            components: self.components.map(|v| U::lit(v.as_f64())),
            exact_zero: self.exact_zero,
        }
    }
}

/// Reset of one qubit to a fixed single-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResetSpec<T = f64> {
    pub qubit: usize,
    pub bloch: Bloch<T>,
}

impl<T: Real> ResetSpec<T> {
    pub fn new(qubit: usize, bloch: Bloch<T>) -> Self {
        ResetSpec { qubit, bloch }
    }
}

/// Per-qubit, per-layer depolarizing strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel<T = f64> {
    gamma: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(Error::InvalidArgument(format!("noise strength {gamma} outside [0, 1]")));
        }
        Ok(NoiseModel { gamma })
    }

    pub fn noiseless() -> Self {
        NoiseModel { gamma: T::zero() }
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        Err(Error::QubitOutOfRange { qubit: q, n })
    } else {
        Ok(())
    }
}

pub(crate) fn depolarize_in_place<T: Real>(p: &mut PauliString<T>, qubit: usize) {
    if !p.get(qubit).is_identity() {
        p.annihilate();
    }
}

pub(crate) fn reset_in_place<T: Real>(p: &mut PauliString<T>, r: &ResetSpec<T>) {
    if p.is_annihilated() {
        return;
    }
    let label = p.get(r.qubit);
    if label.is_identity() {
        return;
    }
    let (factor, zero) = r.bloch.component(label);
    p.bits_mut().clear(r.qubit);
    p.scale(factor, zero);
}

/// `D^dagger = D` applied to `p` on `qubit`.
pub fn depolarize_error_adjoint<T: Real>(p: &PauliString<T>, qubit: usize) -> Result<PauliString<T>> {
    check_qubit(qubit, p.num_qubits())?;
    let mut out = p.clone();
    depolarize_in_place(&mut out, qubit);
    Ok(out)
}

/// Heisenberg-picture action of a reset on `p`.
pub fn reset_adjoint<T: Real>(p: &PauliString<T>, r: &ResetSpec<T>) -> Result<PauliString<T>> {
    check_qubit(r.qubit, p.num_qubits())?;
    let mut out = p.clone();
    reset_in_place(&mut out, r);
    Ok(out)
}

/// Forward action of the reset on one Pauli basis element of the reset
/// qubit: `I -> I + aX + bY + cZ` (twice the installed state), everything
/// else to zero. Exactly-zero components are omitted.
pub fn reset_forward_ptm_row<T: Real>(r: &ResetSpec<T>, label: PauliLabel) -> Vec<(PauliLabel, T)> {
    if !label.is_identity() {
        return Vec::new();
    }
    let mut out = vec![(PauliLabel::I, T::one())];
    for l in [PauliLabel::X, PauliLabel::Y, PauliLabel::Z] {
        let (v, zero) = r.bloch.component(l);
        if !zero {
            out.push((l, v));
        }
    }
    out
}
