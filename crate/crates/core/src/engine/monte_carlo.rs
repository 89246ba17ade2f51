//! Survival probability by sampling or by exhaustive enumeration of error
//! configurations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CompiledCircuit;
use crate::circuit::{sample_error_config, Circuit, ErrorConfig};
use crate::error::{Error, Result};
use crate::harness::wilson_interval;
use crate::pauli::PauliBits;
use crate::scalar::Real;

/// Largest number of noise sites `n * depth` enumerated exactly.
pub const DEFAULT_EXACT_SITE_CAP: usize = 20;

const CHUNK: u64 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    /// Two-sided confidence level of the Wilson interval.
    pub confidence: f64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl McOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        McOptions {
            trials,
            seed,
            confidence: 0.99,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub trials: u64,
    pub survivors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub confidence: f64,
}

/// Generator for trial `index`: stream `index` of the ChaCha8 key derived
/// from `seed`, so trials are independent of how work is scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("thread count must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Monte Carlo estimate of the probability that some input survives.
///
/// The result depends only on the circuit, `trials` and `seed`.
pub fn survival_probability<T: Real>(c: &Circuit<T>, opts: &McOptions) -> Result<SurvivalEstimate> {
    estimate(c, opts, |compiled, b| compiled.any_survivor(b))
}

fn estimate<T: Real>(
    c: &Circuit<T>,
    opts: &McOptions,
    hit: impl Fn(&CompiledCircuit<T>, &ErrorConfig) -> bool + Sync,
) -> Result<SurvivalEstimate> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if !(opts.confidence > 0.0 && opts.confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence {} outside (0, 1)",
            opts.confidence
        )));
    }
    let compiled = CompiledCircuit::new(c)?;
    let survivors = with_threads(opts.threads, || {
        (0..opts.trials.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                (k * CHUNK..((k + 1) * CHUNK).min(opts.trials))
                    .filter(|&i| {
                        let mut rng = trial_rng(opts.seed, i);
                        let b = sample_error_config(c, &mut rng);
                        hit(&compiled, &b)
                    })
                    .count() as u64
            })
            .sum::<u64>()
    })?;
    let (ci_lo, ci_hi) = wilson_interval(survivors, opts.trials, opts.confidence)?;
    Ok(SurvivalEstimate {
        trials: opts.trials,
        survivors,
        p_hat: survivors as f64 / opts.trials as f64,
        ci_lo,
        ci_hi,
        confidence: opts.confidence,
    })
}

/// Monte Carlo estimate of the probability that the single input `s` is
/// not annihilated by the adjoint circuit, sharing the seeding scheme of
/// [`survival_probability`].
pub fn pauli_survival_probability<T: Real>(
    c: &Circuit<T>,
    s: &PauliBits,
    opts: &McOptions,
) -> Result<SurvivalEstimate> {
    s.check_len(c.num_qubits())?;
    estimate(c, opts, |compiled, b| compiled.stays_alive(b, s))
}

/// Exact survival probability, summing over all `2^(n * depth)` error
/// configurations.
pub fn survival_probability_exact<T: Real>(c: &Circuit<T>) -> Result<T> {
    survival_probability_exact_with_cap(c, DEFAULT_EXACT_SITE_CAP)
}

pub fn survival_probability_exact_with_cap<T: Real>(c: &Circuit<T>, cap: usize) -> Result<T> {
    let sites = c.noise_sites();
    let cap = cap.min(40);
    if sites > cap {
        return Err(Error::CapExceeded {
            what: "noise sites for exact survival",
            requested: sites,
            cap,
        });
    }
    let compiled = CompiledCircuit::new(c)?;
    let (n, d) = (c.num_qubits(), c.depth());
    let gamma = c.gamma();
    let total = 1u64 << sites;
    let chunks = total.div_ceil(CHUNK);
    // fixed chunking keeps the floating-point summation order stable
    let partial: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut acc = T::zero();
            for code in k * CHUNK..((k + 1) * CHUNK).min(total) {
                let b = ErrorConfig::from_index(n, d, code);
                let p = b.probability(gamma);
                if p != T::zero() && compiled.any_survivor(&b) {
                    acc += p;
                }
            }
            acc
        })
        .collect();
    Ok(partial.into_iter().fold(T::zero(), |a, b| a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::idle_circuit;

    #[test]
    fn idle_chain_matches_closed_form() {
        // survival iff some qubit never fires: 1 - (1 - (1-g)^d)^n
        for (n, d, g) in [(2usize, 3usize, 0.2f64), (3, 4, 0.5), (1, 5, 0.1)] {
            let c = idle_circuit::<f64>(n, d, g).unwrap();
            let exact = survival_probability_exact(&c).unwrap();
            let closed = 1.0 - (1.0 - (1.0 - g).powi(d as i32)).powi(n as i32);
            assert!((exact - closed).abs() < 1e-12, "{exact} {closed}");
        }
    }

    #[test]
    fn exact_cap_enforced() {
        let c = idle_circuit::<f64>(5, 5, 0.1).unwrap();
        assert!(survival_probability_exact(&c).unwrap_err().is_cap());
    }

    #[test]
    fn estimate_is_thread_independent() {
        let c = idle_circuit::<f64>(4, 5, 0.3).unwrap();
        let mut opts = McOptions::new(3000, 17);
        opts.threads = Some(1);
        let one = survival_probability(&c, &opts).unwrap();
        opts.threads = Some(4);
        let four = survival_probability(&c, &opts).unwrap();
        assert_eq!(one, four);
        let exact = survival_probability_exact(&c).unwrap();
        assert!(one.ci_lo <= exact && exact <= one.ci_hi, "{one:?} {exact}");
    }

    #[test]
    fn degenerate_noise() {
        let c = idle_circuit::<f64>(3, 4, 0.0).unwrap();
        assert_eq!(
            survival_probability(&c, &McOptions::new(100, 1)).unwrap().survivors,
            100
        );
        assert_eq!(survival_probability_exact(&c).unwrap(), 1.0);
        let c = idle_circuit::<f64>(3, 4, 1.0).unwrap();
        assert_eq!(survival_probability(&c, &McOptions::new(100, 1)).unwrap().survivors, 0);
        assert_eq!(survival_probability_exact(&c).unwrap(), 0.0);
    }

    #[test]
    fn single_pauli_on_idle_chain() {
        let c = idle_circuit::<f64>(3, 4, 0.2).unwrap();
        let s: PauliBits = "XZI".parse().unwrap();
        let est = pauli_survival_probability(&c, &s, &McOptions::new(20_000, 3)).unwrap();
        let want = 0.8f64.powi(8);
        assert!(est.ci_lo <= want && want <= est.ci_hi, "{est:?}");
    }

    #[test]
    fn bad_options_rejected() {
        let c = idle_circuit::<f64>(2, 2, 0.1).unwrap();
        assert!(survival_probability(&c, &McOptions::new(0, 1)).is_err());
        let mut o = McOptions::new(10, 1);
        o.confidence = 1.0;
        assert!(survival_probability(&c, &o).is_err());
        o.confidence = 0.9;
        o.threads = Some(0);
        assert!(survival_probability(&c, &o).is_err());
    }
}
