//! Verification suites behind `memloss check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{Bloch, NoiseModel};
use crate::circuit::{idle_circuit, random_bloch, random_circuit, sample_error_config, Circuit, ErrorConfig, Layer};
use crate::engine::{
    any_survivor_bruteforce, any_survivor_fast, pauli_survival_probability, propagate_pauli, McOptions,
};
use crate::error::{Error, Result};
use crate::oracle::{
    check_lemma1, dense_channel_adjoint_check, mixture_deviation, ChannelSpec, DensityMatrix, Lemma1Options,
};
use crate::pauli::{random_symplectic, Gate, NamedGate, PauliBits, PauliLabel, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Adjoint,
    Equivalence,
    Lemma1,
    Fact,
    Mixture,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Adjoint,
        Suite::Equivalence,
        Suite::Lemma1,
        Suite::Fact,
        Suite::Mixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Adjoint => "adjoint",
            Suite::Equivalence => "equivalence",
            Suite::Lemma1 => "lemma1",
            Suite::Fact => "fact",
            Suite::Mixture => "mixture",
        }
    }

    pub fn default_instances(self) -> usize {
        match self {
            Suite::Adjoint => 8,
            Suite::Equivalence => 500,
            Suite::Lemma1 => 100,
            Suite::Fact => 100_000,
            Suite::Mixture => 20,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub label: String,
    pub observed: f64,
    /// Value `observed` is compared with; the comparison is per suite.
    pub limit: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn max_observed(&self) -> f64 {
        self.cases.iter().map(|c| c.observed).fold(0.0, f64::max)
    }
}

/// Runs `suite`. `instances` means random circuits for equivalence, lemma1
/// and mixture, sampled configurations per grid point for fact, and extra
/// random two-qubit tableaux for adjoint.
pub fn run_check(suite: Suite, instances: usize, seed: u64) -> Result<SuiteReport> {
    let cases = match suite {
        Suite::Adjoint => adjoint_cases(instances, seed),
        Suite::Equivalence => equivalence_cases(instances, seed)?,
        Suite::Lemma1 => lemma1_cases(instances, seed)?,
        Suite::Fact => fact_cases(instances as u64, seed)?,
        Suite::Mixture => mixture_cases(instances, seed)?,
    };
    Ok(SuiteReport {
        suite: suite.name(),
        cases,
    })
}

fn instance_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

pub const ADJOINT_TOL: f64 = 1e-12;

fn adjoint_cases(extra: usize, seed: u64) -> Vec<CaseResult> {
    let mut specs: Vec<ChannelSpec<f64>> = [0.0, 0.1, 0.5, 1.0]
        .into_iter()
        .map(ChannelSpec::Depolarizing)
        .collect();
    specs.push(ChannelSpec::FiredError);
    for b in [
        Bloch::zero_state(),
        Bloch::one_state(),
        Bloch::plus_state(),
        Bloch::magic_state(),
        Bloch::t_magic_state(),
        Bloch::maximally_mixed(),
    ] {
        specs.push(ChannelSpec::Reset(b));
    }
    specs.extend(NamedGate::ALL.into_iter().map(ChannelSpec::Gate));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        specs.push(ChannelSpec::Tableau(random_symplectic(2, &mut rng)));
        specs.push(ChannelSpec::Reset(random_bloch(&mut rng)));
    }
    specs
        .par_iter()
        .map(|spec| {
            let dev = dense_channel_adjoint_check(spec).max();
            CaseResult {
                label: spec.name(),
                observed: dev,
                limit: ADJOINT_TOL,
                passed: dev < ADJOINT_TOL,
            }
        })
        .collect()
}

const EQUIVALENCE_GAMMAS: [f64; 4] = [0.0, 0.1, 0.5, 1.0];

/// Random instance for the equivalence suite: `n <= 6`, `d <= 6`, mixed
/// reset states, gamma cycling through the grid.
pub fn equivalence_instance(seed: u64, i: usize) -> Result<(Circuit<f64>, ErrorConfig)> {
    let mut rng = instance_rng(seed, i);
    let n = rng.random_range(1..=6);
    let d = rng.random_range(0..=6);
    let gamma = EQUIVALENCE_GAMMAS[i % EQUIVALENCE_GAMMAS.len()];
    let c = random_circuit(n, d, gamma, &Default::default(), &mut rng)?;
    let b = sample_error_config(&c, &mut rng);
    Ok((c, b))
}

fn equivalence_cases(instances: usize, seed: u64) -> Result<Vec<CaseResult>> {
    (0..instances)
        .into_par_iter()
        .map(|i| {
            let (c, b) = equivalence_instance(seed, i)?;
            let fast = any_survivor_fast(&c, &b)?;
            let brute = any_survivor_bruteforce(&c, &b)?;
            Ok(CaseResult {
                label: format!(
                    "instance {i}: n={} d={} gamma={} fired={}",
                    c.num_qubits(),
                    c.depth(),
                    c.gamma(),
                    b.count_fired()
                ),
                observed: fast as u8 as f64,
                limit: brute as u8 as f64,
                passed: fast == brute,
            })
        })
        .collect()
}

pub const IDLE_EQUALITY_TOL: f64 = 1e-10;

fn lemma1_cases(instances: usize, seed: u64) -> Result<Vec<CaseResult>> {
    let opts = Lemma1Options {
        seed,
        ..Default::default()
    };
    let mut cases: Vec<CaseResult> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed, i);
            let n = rng.random_range(1..=4);
            let d = rng.random_range(1..=4);
            let gamma = [0.05, 0.1, 0.2, 0.4][rng.random_range(0..4)];
            let c = random_circuit::<f64, _>(n, d, gamma, &Default::default(), &mut rng)?;
            let (rho, sigma) = if rng.random_bool(0.5) {
                (
                    DensityMatrix::random_pure(n, &mut rng),
                    DensityMatrix::random_pure(n, &mut rng),
                )
            } else {
                (
                    DensityMatrix::random_mixture(n, 3, &mut rng),
                    DensityMatrix::random_pure(n, &mut rng),
                )
            };
            let r = check_lemma1(&c, &rho, &sigma, &opts)?;
            Ok(CaseResult {
                label: format!("instance {i}: n={n} d={d} gamma={gamma} ({:?})", r.method),
                observed: r.lhs,
                limit: r.rhs,
                passed: r.holds,
            })
        })
        .collect::<Result<_>>()?;

    // one qubit idling between |0> and |1>: both sides are 2 (1 - gamma)^d
    for gamma in [0.1, 0.3] {
        for d in [1usize, 2, 5, 10] {
            let c = idle_circuit::<f64>(1, d, gamma)?;
            let r = check_lemma1(&c, &DensityMatrix::basis(1, 0)?, &DensityMatrix::basis(1, 1)?, &opts)?;
            let closed = 2.0 * (1.0 - gamma).powi(d as i32);
            let gap = (r.lhs - r.rhs).abs().max((r.lhs - closed).abs());
            cases.push(CaseResult {
                label: format!("idle equality d={d} gamma={gamma}"),
                observed: gap,
                limit: IDLE_EQUALITY_TOL,
                passed: r.holds && gap <= IDLE_EQUALITY_TOL,
            });
        }
    }
    Ok(cases)
}

/// Circuits whose adjoint keeps a known weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactFamily {
    /// `w` idling qubits; the string stays put.
    Idle,
    /// `w + 1` qubits with alternating SWAP layers, which move the support
    /// without changing its weight.
    SwapLadder,
    /// `w + 1` qubits with alternating CNOT layers; the weight changes, so
    /// the bound uses the traced minimum.
    CnotLadder,
}

impl FactFamily {
    pub fn name(self) -> &'static str {
        match self {
            FactFamily::Idle => "idle",
            FactFamily::SwapLadder => "swap-ladder",
            FactFamily::CnotLadder => "cnot-ladder",
        }
    }
}

/// Builds a fact-suite circuit and the probed Pauli (`Z` on qubits
/// `0..w`, or `X` for the CNOT ladder).
pub fn fact_instance(family: FactFamily, w: usize, d: usize, gamma: f64) -> Result<(Circuit<f64>, PauliBits)> {
    let (n, label) = match family {
        FactFamily::Idle => (w, PauliLabel::Z),
        FactFamily::SwapLadder => (w + 1, PauliLabel::Z),
        FactFamily::CnotLadder => (w + 1, PauliLabel::X),
    };
    let c = match family {
        FactFamily::Idle => idle_circuit(n, d, gamma)?,
        FactFamily::SwapLadder | FactFamily::CnotLadder => {
            let g = if family == FactFamily::SwapLadder {
                NamedGate::Swap
            } else {
                NamedGate::Cnot
            };
            let mut c = Circuit::empty(n, NoiseModel::new(gamma)?);
            for l in 0..d {
                let gates = (l % 2..n - 1).step_by(2).map(|q| Gate::named(g, &[q, q + 1])).collect();
                c.push(Layer::new(gates, vec![]));
            }
            c
        }
    };
    let mut s = PauliBits::identity(n);
    for q in 0..w {
        s.set(q, label);
    }
    Ok((c, s))
}

fn fact_cases(trials: u64, seed: u64) -> Result<Vec<CaseResult>> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!(
            "fact suite needs at least 100 trials, got {trials}"
        )));
    }
    let mut cases = Vec::new();
    for family in [FactFamily::Idle, FactFamily::SwapLadder, FactFamily::CnotLadder] {
        for w in [1usize, 2, 3] {
            for d in [1usize, 5, 10] {
                for gamma in [0.1, 0.3] {
                    let (c, s) = fact_instance(family, w, d, gamma)?;
                    let none = ErrorConfig::none(c.num_qubits(), c.depth());
                    let (_, trace) = propagate_pauli(&c, &none, &PauliString::new(s.clone(), 1.0))?;
                    let min_w = trace.min_weight;
                    let bound = (1.0 - gamma).powi((min_w * d) as i32);
                    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
                    let est = pauli_survival_probability(&c, &s, &McOptions::new(trials, seed))?;
                    let within_bound = est.p_hat <= bound + 3.0 * sigma;
                    let weight_ok = family == FactFamily::CnotLadder || min_w == w;
                    let mut passed = within_bound && weight_ok;
                    let mut label = format!("{} w={w} (traced {min_w}) d={d} gamma={gamma}", family.name());
                    if family == FactFamily::Idle {
                        passed &= (est.p_hat - bound).abs() <= 3.0 * sigma;
                        label.push_str(" [equality]");
                    }
                    cases.push(CaseResult {
                        label,
                        observed: est.p_hat,
                        limit: bound + 3.0 * sigma,
                        passed,
                    });
                }
            }
        }
    }
    Ok(cases)
}

pub const MIXTURE_TOL: f64 = 1e-10;
const MIXTURE_SITE_CAP: usize = 12;

fn mixture_cases(instances: usize, seed: u64) -> Result<Vec<CaseResult>> {
    (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed, i);
            let n = rng.random_range(1..=4);
            let d = rng.random_range(1..=MIXTURE_SITE_CAP / n);
            let gamma = [0.1, 0.25, 0.5][rng.random_range(0..3)];
            let c = random_circuit(n, d, gamma, &Default::default(), &mut rng)?;
            let rho = DensityMatrix::random_mixture(n, 2, &mut rng);
            let dev = mixture_deviation(&c, &rho)?;
            Ok(CaseResult {
                label: format!("instance {i}: n={n} d={d} sites={} gamma={gamma}", c.noise_sites()),
                observed: dev,
                limit: MIXTURE_TOL,
                passed: dev < MIXTURE_TOL,
            })
        })
        .collect()
}
