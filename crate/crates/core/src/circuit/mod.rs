//! Circuit data model.
//!
//! A circuit is `n` qubits, a depolarizing strength and an ordered list of
//! layers. Each layer applies its gates, then its resets, then one round of
//! depolarizing noise on every qubit ([`LAYER_ORDER`]). The adjoint of a layer
//! therefore runs noise, resets, gates.

mod families;
mod io;

use std::collections::HashSet;
use std::fmt;

use rand::Rng;

use crate::channels::{NoiseModel, ResetSpec};
use crate::error::{Error, Result};
use crate::pauli::{words_for, CliffordTableau, Gate};
use crate::scalar::Real;

pub use families::{
    gen_brickwork, gen_repetition_refresh, idle_circuit, random_bloch, random_circuit, RandomCircuitOptions,
};
pub use io::{read_circuit, write_circuit};

/// Stage order within one forward layer.
pub const LAYER_ORDER: [Stage; 3] = [Stage::Gates, Stage::Resets, Stage::Noise];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Gates,
    Resets,
    Noise,
}

/// One layer: disjoint gates, then resets on distinct qubits. A qubit may
/// be both gated and reset; the gate acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T = f64> {
    pub gates: Vec<Gate>,
    pub resets: Vec<ResetSpec<T>>,
}

impl<T: Real> Default for Layer<T> {
    fn default() -> Self {
        Layer {
            gates: Vec::new(),
            resets: Vec::new(),
        }
    }
}

impl<T: Real> Layer<T> {
    pub fn new(gates: Vec<Gate>, resets: Vec<ResetSpec<T>>) -> Self {
        Layer { gates, resets }
    }

    pub fn idle() -> Self {
        Self::default()
    }

    pub fn tableau(&self, n: usize) -> Result<CliffordTableau> {
        CliffordTableau::from_layer(n, &self.gates)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T = f64> {
    n: usize,
    noise: NoiseModel<T>,
    layers: Vec<Layer<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize, noise: NoiseModel<T>, layers: Vec<Layer<T>>) -> Self {
        Circuit { n, noise, layers }
    }

    pub fn empty(n: usize, noise: NoiseModel<T>) -> Self {
        Self::new(n, noise, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn noise(&self) -> NoiseModel<T> {
        self.noise
    }

    pub fn gamma(&self) -> T {
        self.noise.gamma()
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn push(&mut self, layer: Layer<T>) {
        self.layers.push(layer);
    }

    /// Number of depolarizing sites, `depth * n`.
    pub fn noise_sites(&self) -> usize {
        self.depth() * self.n
    }

    /// First `depth` layers.
    pub fn truncated(&self, depth: usize) -> Self {
        Circuit {
            n: self.n,
            noise: self.noise,
            layers: self.layers[..depth.min(self.layers.len())].to_vec(),
        }
    }

    /// Same circuit with a different noise strength.
    pub fn with_noise(&self, noise: NoiseModel<T>) -> Self {
        Circuit { noise, ..self.clone() }
    }

    /// Every invariant violation, tagged with its layer.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

/// One invariant breach found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub layer: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.layer {
            Some(l) => write!(f, "{}, layer {l}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

pub fn validate<T: Real>(c: &Circuit<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let g = c.gamma();
    if !(g >= T::zero() && g <= T::one()) {
        out.push(Violation {
            layer: None,
            message: format!("noise strength {g} outside [0, 1]"),
        });
    }
    for (l, layer) in c.layers.iter().enumerate() {
        let mut push = |message: String| {
            out.push(Violation {
                layer: Some(l),
                message,
            })
        };
        let mut used = HashSet::new();
        let mut overlap = false;
        for gate in &layer.gates {
            let width = gate.symplectic().width();
            if gate.qubits().len() != width {
                push(format!(
                    "{} expects {width} qubits, got {}",
                    gate.kind_name(),
                    gate.qubits().len()
                ));
            }
            for &q in gate.qubits() {
                if q >= c.n {
                    push(format!("qubit {q} out of range"));
                } else if !used.insert(q) {
                    overlap = true;
                }
            }
        }
        if overlap {
            push("overlapping gates".to_string());
        }
        let mut reset_qubits = HashSet::new();
        for r in &layer.resets {
            if r.qubit >= c.n {
                push(format!("reset qubit {} out of range", r.qubit));
            } else if !reset_qubits.insert(r.qubit) {
                push(format!("duplicate reset on qubit {}", r.qubit));
            }
            if r.bloch.validate().is_err() {
                push("invalid reset state".to_string());
            }
        }
    }
    out
}

/// Which depolarizing sites fired: one bit per `(layer, qubit)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ErrorConfig {
    n: usize,
    depth: usize,
    fired: Vec<Vec<u64>>,
}

impl ErrorConfig {
    pub fn none(n: usize, depth: usize) -> Self {
        ErrorConfig {
            n,
            depth,
            fired: vec![vec![0; words_for(n)]; depth],
        }
    }

    pub fn all(n: usize, depth: usize) -> Self {
        let mut b = Self::none(n, depth);
        for l in 0..depth {
            for q in 0..n {
                b.set(l, q, true);
            }
        }
        b
    }

    /// Decodes bit `layer * n + qubit` of `code`. Requires `depth * n <= 64`.
    pub fn from_index(n: usize, depth: usize, code: u64) -> Self {
        assert!(n * depth <= 64);
        let mut b = Self::none(n, depth);
        for l in 0..depth {
            for q in 0..n {
                if (code >> (l * n + q)) & 1 == 1 {
                    b.set(l, q, true);
                }
            }
        }
        b
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub fn get(&self, layer: usize, qubit: usize) -> bool {
        (self.fired[layer][qubit >> 6] >> (qubit & 63)) & 1 == 1
    }

    pub fn set(&mut self, layer: usize, qubit: usize, value: bool) {
        let w = &mut self.fired[layer][qubit >> 6];
        let m = 1u64 << (qubit & 63);
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    /// Qubits where the error fired in `layer`, ascending.
    pub fn fired_in(&self, layer: usize) -> impl Iterator<Item = usize> + '_ {
        self.fired[layer].iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn count_fired(&self) -> usize {
        self.fired.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }

    pub fn check_matches<T: Real>(&self, c: &Circuit<T>) -> Result<()> {
        if self.n != c.num_qubits() {
            return Err(Error::SizeMismatch {
                expected: c.num_qubits(),
                found: self.n,
            });
        }
        if self.depth != c.depth() {
            return Err(Error::InvalidArgument(format!(
                "error configuration has depth {}, circuit has {}",
                self.depth,
                c.depth()
            )));
        }
        Ok(())
    }

    /// Probability of this configuration when every site fires
    /// independently with probability `gamma`.
    pub fn probability<T: Real>(&self, gamma: T) -> T {
        let fired = self.count_fired();
        let quiet = self.n * self.depth - fired;
        num_traits::Float::powi(gamma, fired as i32) * num_traits::Float::powi(T::one() - gamma, quiet as i32)
    }
}

/// Independent Bernoulli(gamma) draw for every noise site, layer-major.
pub fn sample_error_config<T: Real, R: Rng + ?Sized>(c: &Circuit<T>, rng: &mut R) -> ErrorConfig {
    let gamma = c.gamma().as_f64();
    let mut b = ErrorConfig::none(c.num_qubits(), c.depth());
    if gamma <= 0.0 {
        return b;
    }
    for l in 0..c.depth() {
        for q in 0..c.num_qubits() {
            if rng.random_bool(gamma) {
                b.set(l, q, true);
            }
        }
    }
    b
}
