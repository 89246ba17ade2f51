//! Circuit families used by sweeps and verification suites.
//!
//! Generators draw randomness layer by layer, so for a fixed seed the
//! depth-`d` circuit is a prefix of the depth-`d + 1` one.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Circuit, Layer};
use crate::channels::{Bloch, NoiseModel, ResetSpec};
use crate::error::{Error, Result};
use crate::pauli::{random_symplectic, Gate, NamedGate};
use crate::scalar::Real;

/// `depth` empty layers: noise only.
pub fn idle_circuit<T: Real>(n: usize, depth: usize, gamma: f64) -> Result<Circuit<T>> {
    let noise = NoiseModel::new(T::lit(gamma))?;
    Ok(Circuit::new(n, noise, vec![Layer::idle(); depth]))
}

/// Brickwork of uniformly random two-qubit Cliffords on nearest neighbours,
/// even pairs on even layers and odd pairs on odd layers. Every qubit is
/// reset to `reset_state` independently with probability `reset_rate` in
/// each layer.
pub fn gen_brickwork<T: Real, R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    gamma: f64,
    reset_rate: f64,
    reset_state: Bloch<T>,
    rng: &mut R,
) -> Result<Circuit<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("brickwork needs at least 2 qubits".into()));
    }
    if !(0.0..=1.0).contains(&reset_rate) {
        return Err(Error::InvalidArgument(format!(
            "reset rate {reset_rate} outside [0, 1]"
        )));
    }
    reset_state.validate()?;
    let mut c = Circuit::empty(n, NoiseModel::new(T::lit(gamma))?);
    for l in 0..depth {
        let gates = (l % 2..n - 1)
            .step_by(2)
            .map(|q| Gate::tableau(&[q, q + 1], random_symplectic(2, rng)))
            .collect();
        let resets = (0..n)
            .filter(|_| reset_rate > 0.0 && rng.random_bool(reset_rate))
            .map(|q| ResetSpec::new(q, reset_state))
            .collect();
        c.push(Layer::new(gates, resets));
    }
    Ok(c)
}

/// Clifford-only repetition-code refresh: data qubits on even indices,
/// parity ancillas on odd ones. Each round copies neighbouring data parities
/// onto the ancillas with two CNOT layers and then resets the ancillas to
/// `|0>`. There is no majority vote; that would need a non-Clifford gate.
pub fn gen_repetition_refresh<T: Real>(n: usize, rounds: usize, gamma: f64) -> Result<Circuit<T>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "repetition refresh needs an odd qubit count >= 3, got {n}"
        )));
    }
    let mut c = Circuit::empty(n, NoiseModel::new(T::lit(gamma))?);
    let ancillas: Vec<usize> = (1..n).step_by(2).collect();
    for _ in 0..rounds {
        c.push(Layer::new(
            ancillas
                .iter()
                .map(|&a| Gate::named(NamedGate::Cnot, &[a - 1, a]))
                .collect(),
            vec![],
        ));
        c.push(Layer::new(
            ancillas
                .iter()
                .map(|&a| Gate::named(NamedGate::Cnot, &[a + 1, a]))
                .collect(),
            vec![],
        ));
        c.push(Layer::new(
            vec![],
            ancillas
                .iter()
                .map(|&a| ResetSpec::new(a, Bloch::zero_state()))
                .collect(),
        ));
    }
    Ok(c)
}

/// Uniformly random point of the Bloch ball.
pub fn random_bloch<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Bloch<T> {
    let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let r = rng.random::<f64>().cbrt();
    Bloch::new(
        T::lit(v[0] / norm * r),
        T::lit(v[1] / norm * r),
        T::lit(v[2] / norm * r),
    )
}

/// Knobs for [`random_circuit`].
#[derive(Clone, Debug)]
pub struct RandomCircuitOptions<T = f64> {
    /// Chance that a free qubit starts a two-qubit gate.
    pub two_qubit_prob: f64,
    /// Chance that a remaining free qubit gets a single-qubit gate.
    pub one_qubit_prob: f64,
    /// Chance that a two-qubit gate is a raw random tableau, not a named gate.
    pub raw_tableau_prob: f64,
    /// Per-qubit reset chance in each layer.
    pub reset_prob: f64,
    /// Reset states to pick from; a uniformly random Bloch vector is added
    /// to the choice when `random_states` is set.
    pub reset_states: Vec<Bloch<T>>,
    pub random_states: bool,
}

impl<T: Real> Default for RandomCircuitOptions<T> {
    fn default() -> Self {
        RandomCircuitOptions {
            two_qubit_prob: 0.5,
            one_qubit_prob: 0.5,
            raw_tableau_prob: 0.3,
            reset_prob: 0.2,
            reset_states: vec![
                Bloch::zero_state(),
                Bloch::one_state(),
                Bloch::plus_state(),
                Bloch::magic_state(),
                Bloch::t_magic_state(),
                Bloch::maximally_mixed(),
            ],
            random_states: true,
        }
    }
}

/// Random layered Clifford+reset circuit mixing named gates, raw two-qubit
/// tableaux and resets to assorted states.
pub fn random_circuit<T: Real, R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    gamma: f64,
    opts: &RandomCircuitOptions<T>,
    rng: &mut R,
) -> Result<Circuit<T>> {
    const ONE_QUBIT: [NamedGate; 6] = [
        NamedGate::H,
        NamedGate::S,
        NamedGate::Sdg,
        NamedGate::X,
        NamedGate::Y,
        NamedGate::Z,
    ];
    const TWO_QUBIT: [NamedGate; 3] = [NamedGate::Cnot, NamedGate::Cz, NamedGate::Swap];
    let mut c = Circuit::empty(n, NoiseModel::new(T::lit(gamma))?);
    let choices = opts.reset_states.len() + opts.random_states as usize;
    for _ in 0..depth {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut gates = Vec::new();
        let mut i = 0;
        while i < order.len() {
            if i + 1 < order.len() && rng.random_bool(opts.two_qubit_prob) {
                let qs = [order[i], order[i + 1]];
                if rng.random_bool(opts.raw_tableau_prob) {
                    gates.push(Gate::tableau(&qs, random_symplectic(2, rng)));
                } else {
                    gates.push(Gate::named(TWO_QUBIT[rng.random_range(0..TWO_QUBIT.len())], &qs));
                }
                i += 2;
            } else {
                if rng.random_bool(opts.one_qubit_prob) {
                    gates.push(Gate::named(
                        ONE_QUBIT[rng.random_range(0..ONE_QUBIT.len())],
                        &[order[i]],
                    ));
                }
                i += 1;
            }
        }
        let mut resets = Vec::new();
        if choices > 0 {
            for q in 0..n {
                if rng.random_bool(opts.reset_prob) {
                    let pick = rng.random_range(0..choices);
                    let bloch = if pick < opts.reset_states.len() {
                        opts.reset_states[pick]
                    } else {
                        random_bloch(rng)
                    };
                    resets.push(ResetSpec::new(q, bloch));
                }
            }
        }
        c.push(Layer::new(gates, resets));
    }
    Ok(c)
}
