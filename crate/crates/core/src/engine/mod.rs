//! Heisenberg-picture propagation through a sampled error configuration.
//!
//! For a fixed configuration `b`, the adjoint circuit maps every Pauli
//! string either to zero or to a multiple of a single Pauli string. A
//! non-identity input *survives* when its image is structurally nonzero and
//! not proportional to the identity. The circuit retains some memory of its
//! input under `b` exactly when some input survives.

mod monte_carlo;
mod survivor;

use crate::channels::{depolarize_in_place, reset_in_place, ResetSpec};
use crate::circuit::{Circuit, ErrorConfig};
use crate::error::{Error, Result};
use crate::pauli::{LocalClifford, PauliBits, PauliString};
use crate::scalar::Real;

pub use monte_carlo::{
    pauli_survival_probability, survival_probability, survival_probability_exact, survival_probability_exact_with_cap,
    trial_rng, McOptions, SurvivalEstimate, DEFAULT_EXACT_SITE_CAP,
};
pub use survivor::{any_survivor_fast, survivor_analysis, Generator, SurvivorAnalysis, SurvivorBasis};

/// Largest qubit count accepted by the exhaustive survivor search.
pub const DEFAULT_BRUTEFORCE_CAP: usize = 8;

#[derive(Clone, Debug)]
pub(crate) struct CompiledLayer<T> {
    pub(crate) gates: Vec<LocalClifford>,
    pub(crate) resets: Vec<ResetSpec<T>>,
}

/// Circuit with every gate lowered to its local phaseless action.
#[derive(Clone, Debug)]
pub struct CompiledCircuit<T = f64> {
    n: usize,
    layers: Vec<CompiledLayer<T>>,
}

impl<T: Real> CompiledCircuit<T> {
    pub fn new(c: &Circuit<T>) -> Result<Self> {
        c.ensure_valid()?;
        let layers = c
            .layers()
            .iter()
            .map(|l| {
                Ok(CompiledLayer {
                    gates: l
                        .gates
                        .iter()
                        .map(|g| g.compile(c.num_qubits()))
                        .collect::<Result<_>>()?,
                    resets: l.resets.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledCircuit {
            n: c.num_qubits(),
            layers,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub(crate) fn layer(&self, l: usize) -> &CompiledLayer<T> {
        &self.layers[l]
    }

    fn check_config(&self, b: &ErrorConfig) -> Result<()> {
        if b.num_qubits() != self.n || b.depth() != self.depth() {
            return Err(Error::InvalidArgument(format!(
                "error configuration is {}x{}, circuit is {}x{}",
                b.depth(),
                b.num_qubits(),
                self.depth(),
                self.n
            )));
        }
        Ok(())
    }

    /// Applies the adjoint circuit to `s`, recording weights as it goes.
    pub fn propagate(&self, b: &ErrorConfig, s: &PauliString<T>) -> Result<(PauliString<T>, PropagationTrace)> {
        self.check_config(b)?;
        s.bits().check_len(self.n)?;
        let mut p = s.clone();
        let mut trace = PropagationTrace::start(p.weight());
        for l in (0..self.depth()).rev() {
            let layer = &self.layers[l];
            for q in b.fired_in(l) {
                depolarize_in_place(&mut p, q);
            }
            let after_noise = p.weight();
            for r in &layer.resets {
                reset_in_place(&mut p, r);
            }
            let after_resets = p.weight();
            if !p.is_annihilated() {
                for g in &layer.gates {
                    g.conjugate_adjoint(p.bits_mut());
                }
            }
            let after_gates = p.weight();
            if p.is_annihilated() && trace.annihilated_at.is_none() {
                trace.annihilated_at = Some(l);
            }
            trace.push(SubRoundWeights {
                after_noise,
                after_resets,
                after_gates,
            });
        }
        Ok((p, trace))
    }

    /// Final image of `s`, or `None` once it is annihilated.
    fn run_single(&self, b: &ErrorConfig, s: &PauliBits) -> Option<PauliString<T>> {
        let mut p: PauliString<T> = s.clone().into();
        for l in (0..self.depth()).rev() {
            let layer = &self.layers[l];
            for q in b.fired_in(l) {
                depolarize_in_place(&mut p, q);
            }
            for r in &layer.resets {
                reset_in_place(&mut p, r);
            }
            if p.is_annihilated() {
                return None;
            }
            for g in &layer.gates {
                g.conjugate_adjoint(p.bits_mut());
            }
        }
        Some(p)
    }

    /// Whether `s` is still structurally nonzero after the adjoint circuit
    /// (an identity image counts as alive here).
    pub(crate) fn stays_alive(&self, b: &ErrorConfig, s: &PauliBits) -> bool {
        self.run_single(b, s).is_some()
    }

    pub(crate) fn survives(&self, b: &ErrorConfig, s: &PauliBits) -> bool {
        self.run_single(b, s).is_some_and(|p| p.is_nontrivial())
    }
}

/// Weights seen inside one adjoint layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubRoundWeights {
    pub after_noise: usize,
    pub after_resets: usize,
    pub after_gates: usize,
}

/// Weight history of one propagated Pauli string.
///
/// `layer_weights[i]` is the weight after the adjoint of circuit layer
/// `depth - 1 - i`, i.e. at the layer boundary in front of it. `min_weight`
/// covers the initial weight and every boundary; sub-round weights are kept
/// for diagnostics only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationTrace {
    pub initial_weight: usize,
    pub layer_weights: Vec<usize>,
    pub sub_rounds: Vec<SubRoundWeights>,
    pub min_weight: usize,
    /// Circuit layer whose adjoint first zeroed the string.
    pub annihilated_at: Option<usize>,
}

impl PropagationTrace {
    fn start(initial_weight: usize) -> Self {
        PropagationTrace {
            initial_weight,
            layer_weights: Vec::new(),
            sub_rounds: Vec::new(),
            min_weight: initial_weight,
            annihilated_at: None,
        }
    }

    fn push(&mut self, sub: SubRoundWeights) {
        self.layer_weights.push(sub.after_gates);
        self.min_weight = self.min_weight.min(sub.after_gates);
        self.sub_rounds.push(sub);
    }

    /// Minimum boundary weight inside consecutive batches of `batch` adjoint
    /// layers (the initial weight belongs to the first batch).
    pub fn batch_minima(&self, batch: usize) -> Vec<usize> {
        assert!(batch > 0);
        let mut weights = vec![self.initial_weight];
        weights.extend(&self.layer_weights);
        weights
            .chunks(batch)
            .map(|c| c.iter().copied().min().unwrap_or(0))
            .collect()
    }
}

/// Weight thresholds `w_0 = n`, `w_j = ceil(w_{j-1} / 4)` down to 1; a
/// diagnostic annotation for batched traces.
pub fn weight_schedule(n: usize) -> Vec<usize> {
    let mut out = vec![n];
    let mut w = n;
    while w > 1 {
        w = w.div_ceil(4);
        out.push(w);
    }
    out
}

/// Propagates `s` backwards through `c` under configuration `b`.
pub fn propagate_pauli<T: Real>(
    c: &Circuit<T>,
    b: &ErrorConfig,
    s: &PauliString<T>,
) -> Result<(PauliString<T>, PropagationTrace)> {
    b.check_matches(c)?;
    CompiledCircuit::new(c)?.propagate(b, s)
}

/// Exhaustive search over all `4^n - 1` non-identity inputs.
pub fn any_survivor_bruteforce<T: Real>(c: &Circuit<T>, b: &ErrorConfig) -> Result<bool> {
    any_survivor_bruteforce_with_cap(c, b, DEFAULT_BRUTEFORCE_CAP)
}

pub fn any_survivor_bruteforce_with_cap<T: Real>(c: &Circuit<T>, b: &ErrorConfig, cap: usize) -> Result<bool> {
    let n = c.num_qubits();
    if n > cap.min(31) {
        return Err(Error::CapExceeded {
            what: "brute-force survivor search qubits",
            requested: n,
            cap: cap.min(31),
        });
    }
    b.check_matches(c)?;
    let compiled = CompiledCircuit::new(c)?;
    Ok((1..1u64 << (2 * n)).any(|code| compiled.survives(b, &PauliBits::from_index(n, code))))
}

/// Every non-identity input that survives, by exhaustive search.
pub fn surviving_inputs_bruteforce<T: Real>(c: &Circuit<T>, b: &ErrorConfig) -> Result<Vec<PauliBits>> {
    let n = c.num_qubits();
    if n > DEFAULT_BRUTEFORCE_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force survivor search qubits",
            requested: n,
            cap: DEFAULT_BRUTEFORCE_CAP,
        });
    }
    b.check_matches(c)?;
    let compiled = CompiledCircuit::new(c)?;
    Ok((1..1u64 << (2 * n))
        .map(|code| PauliBits::from_index(n, code))
        .filter(|s| compiled.survives(b, s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{Bloch, NoiseModel};
    use crate::circuit::{idle_circuit, Layer};
    use crate::pauli::{Gate, NamedGate};

    fn p(s: &str) -> PauliString<f64> {
        s.parse().unwrap()
    }

    fn reset_circuit(bloch: Bloch<f64>) -> Circuit<f64> {
        Circuit::new(
            1,
            NoiseModel::new(0.1).unwrap(),
            vec![Layer::new(vec![], vec![ResetSpec::new(0, bloch)])],
        )
    }

    #[test]
    fn empty_circuit_leaves_input_unchanged() {
        let c = idle_circuit::<f64>(3, 0, 0.2).unwrap();
        let (out, trace) = propagate_pauli(&c, &ErrorConfig::none(3, 0), &p("XIZ")).unwrap();
        assert_eq!(out, p("XIZ"));
        assert_eq!(trace.min_weight, 2);
        assert!(trace.layer_weights.is_empty());
    }

    #[test]
    fn reset_to_zero_kills_x_and_keeps_z() {
        let c = reset_circuit(Bloch::zero_state());
        let b = ErrorConfig::none(1, 1);
        let (x, tx) = propagate_pauli(&c, &b, &p("X")).unwrap();
        assert!(x.is_annihilated());
        assert_eq!(tx.annihilated_at, Some(0));
        let (z, tz) = propagate_pauli(&c, &b, &p("Z")).unwrap();
        assert!(!z.is_annihilated());
        assert!(z.bits().is_identity());
        assert_eq!(z.coeff(), 1.0);
        assert_eq!(tz.min_weight, 0);
        assert!(!any_survivor_bruteforce(&c, &b).unwrap());
    }

    #[test]
    fn trace_records_sub_rounds() {
        // forward: CNOT(0,1), noise; adjoint on ZZ: noise sees ZZ, CNOT maps ZZ -> IZ
        let c = Circuit::new(
            2,
            NoiseModel::new(0.5).unwrap(),
            vec![Layer::new(vec![Gate::named(NamedGate::Cnot, &[0, 1])], vec![])],
        );
        let (out, trace) = propagate_pauli(&c, &ErrorConfig::none(2, 1), &p("ZZ")).unwrap();
        assert_eq!(out, p("IZ"));
        assert_eq!(trace.sub_rounds[0].after_noise, 2);
        assert_eq!(trace.layer_weights, vec![1]);
        assert_eq!(trace.min_weight, 1);
    }

    #[test]
    fn noise_fires_before_gates_in_adjoint_order() {
        // forward layer: H on qubit 0 then noise on qubit 1. The adjoint sees
        // the noise first, while the string still has support on qubit 1.
        let c = Circuit::new(
            2,
            NoiseModel::new(0.5).unwrap(),
            vec![Layer::new(vec![Gate::named(NamedGate::Swap, &[0, 1])], vec![])],
        );
        let mut b = ErrorConfig::none(2, 1);
        b.set(0, 1, true);
        let (out, _) = propagate_pauli(&c, &b, &p("XI")).unwrap();
        assert!(!out.is_annihilated());
        assert_eq!(out, p("IX"));
        let (out, _) = propagate_pauli(&c, &b, &p("IX")).unwrap();
        assert!(out.is_annihilated());
    }

    #[test]
    fn gate_acts_before_reset_on_same_qubit() {
        // forward: H(0) then reset to |0>. Adjoint on Z: reset maps Z -> I.
        // Forward X after the layer: reset kills X regardless of H.
        let c = Circuit::new(
            1,
            NoiseModel::new(0.0).unwrap(),
            vec![Layer::new(
                vec![Gate::named(NamedGate::H, &[0])],
                vec![ResetSpec::new(0, Bloch::zero_state())],
            )],
        );
        let b = ErrorConfig::none(1, 1);
        assert!(propagate_pauli(&c, &b, &p("X")).unwrap().0.is_annihilated());
        let (z, _) = propagate_pauli(&c, &b, &p("Z")).unwrap();
        assert!(z.bits().is_identity() && !z.is_annihilated());
    }

    #[test]
    fn bruteforce_extremes() {
        let c = idle_circuit::<f64>(2, 3, 0.3).unwrap();
        let mut b = ErrorConfig::none(2, 3);
        assert!(any_survivor_bruteforce(&c, &b).unwrap());
        b.set(2, 0, true);
        b.set(2, 1, true);
        assert!(!any_survivor_bruteforce(&c, &b).unwrap());
        let big = idle_circuit::<f64>(9, 1, 0.3).unwrap();
        assert!(matches!(
            any_survivor_bruteforce(&big, &ErrorConfig::none(9, 1)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn dimension_mismatches_rejected() {
        let c = idle_circuit::<f64>(2, 3, 0.3).unwrap();
        assert!(propagate_pauli(&c, &ErrorConfig::none(2, 2), &p("XX")).is_err());
        assert!(propagate_pauli(&c, &ErrorConfig::none(2, 3), &p("XXX")).is_err());
    }

    #[test]
    fn schedule_quarters() {
        assert_eq!(weight_schedule(64), vec![64, 16, 4, 1]);
        assert_eq!(weight_schedule(10), vec![10, 3, 1]);
        assert_eq!(weight_schedule(1), vec![1]);
    }

    #[test]
    fn batch_minima() {
        let trace = PropagationTrace {
            initial_weight: 3,
            layer_weights: vec![2, 4, 1, 5],
            sub_rounds: vec![],
            min_weight: 1,
            annihilated_at: None,
        };
        assert_eq!(trace.batch_minima(2), vec![2, 1, 5]);
    }
}
