//! Cross-checks against oracles written independently of the library.

use memloss::circuit::{gen_repetition_refresh, random_circuit, sample_error_config, ErrorConfig};
use memloss::engine::{
    any_survivor_bruteforce, any_survivor_fast, survival_probability, survival_probability_exact, McOptions,
};
use memloss::harness::{fit_decay, run_sweep, wilson_interval, Family, FitOptions, ResetState, SweepConfig};
use memloss::{CliffordTableau, Gate, NamedGate, PauliBits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type M4 = [[f64; 4]; 4];

fn mul(a: &M4, b: &M4) -> M4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn transpose(a: &M4) -> M4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[j][i] = a[i][j];
        }
    }
    t
}

fn kron(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> M4 {
    let mut k = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    k
}

const I2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
const X2: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const Z2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

fn close(a: &M4, b: &M4) -> bool {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).abs() < 1e-12)
}

fn conjugate(n_gate: &[Gate], p: &str) -> String {
    let t = CliffordTableau::from_layer(2, n_gate).unwrap();
    t.conjugate_bits(&p.parse::<PauliBits>().unwrap()).unwrap().to_string()
}

#[test]
fn cnot_spreads_x_by_matrix_conjugation() {
    // control is qubit 0, the left tensor factor
    let cnot: M4 = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    let out = mul(&mul(&cnot, &kron(X2, I2)), &transpose(&cnot));
    assert!(close(&out, &kron(X2, X2)));
    assert_eq!(conjugate(&[Gate::named(NamedGate::Cnot, &[0, 1])], "XI"), "XX");
}

#[test]
fn hadamard_maps_z_to_x_by_matrix_conjugation() {
    let s = 0.5f64.sqrt();
    let h = kron([[s, s], [s, -s]], I2);
    let out = mul(&mul(&h, &kron(Z2, I2)), &transpose(&h));
    assert!(close(&out, &kron(X2, I2)));
    assert_eq!(conjugate(&[Gate::named(NamedGate::H, &[0])], "ZI"), "XI");
}

#[test]
fn fired_count_matches_binomial_tail() {
    // n d = 10_000 sites at gamma = 0.1: mean 1000, sd 30
    let c = memloss::circuit::idle_circuit::<f64>(100, 100, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let fired = sample_error_config(&c, &mut rng).count_fired() as i64;
        assert!((fired - 1000).abs() <= 100, "{fired}");
    }
}

fn wilson_by_hand(s: f64, t: f64, z: f64) -> (f64, f64) {
    let p = s / t;
    let denom = 1.0 + z * z / t;
    let centre = (p + z * z / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z * z / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[test]
fn wilson_against_hand_formula() {
    let z = 1.959963984540054;
    for (s, t) in [(0u64, 100u64), (100, 100), (50, 100), (3, 17), (999, 1000)] {
        let (lo, hi) = wilson_interval(s, t, 0.95).unwrap();
        let (hlo, hhi) = wilson_by_hand(s as f64, t as f64, z);
        assert!((lo - hlo).abs() < 1e-9 && (hi - hhi).abs() < 1e-9, "{s}/{t}");
    }
    let (lo, hi) = wilson_interval(0, 100, 0.95).unwrap();
    assert_eq!(lo, 0.0);
    assert!((hi - 0.0370).abs() < 5e-5);
    let (lo, hi) = wilson_interval(100, 100, 0.95).unwrap();
    assert!((lo - 0.9630).abs() < 5e-5);
    assert_eq!(hi, 1.0);
    let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
    assert!(lo < 0.5 && 0.5 < hi);
    assert!((lo + hi) / 2.0 <= 0.5 + 1e-12);
}

#[test]
fn repetition_refresh_monte_carlo_matches_enumeration() {
    let c = gen_repetition_refresh::<f64>(3, 2, 0.2).unwrap();
    assert_eq!(c.noise_sites(), 18);
    let exact = survival_probability_exact(&c).unwrap();
    let est = survival_probability(&c, &McOptions::new(100_000, 4)).unwrap();
    assert!(est.ci_lo <= exact && exact <= est.ci_hi, "{exact} vs {est:?}");
}

#[test]
fn small_random_circuit_monte_carlo_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c = random_circuit::<f64, _>(2, 2, 0.3, &Default::default(), &mut rng).unwrap();
    let exact = survival_probability_exact(&c).unwrap();
    let est = survival_probability(&c, &McOptions::new(100_000, 8)).unwrap();
    assert!(est.ci_lo <= exact && exact <= est.ci_hi, "{exact} vs {est:?}");
}

#[test]
fn fixed_small_instance_fast_equals_bruteforce() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_circuit::<f64, _>(2, 2, 0.5, &Default::default(), &mut rng).unwrap();
    for code in 0..16 {
        let b = ErrorConfig::from_index(2, 2, code);
        assert_eq!(
            any_survivor_fast(&c, &b).unwrap(),
            any_survivor_bruteforce(&c, &b).unwrap()
        );
    }
}

#[test]
fn random_instances_fast_equals_bruteforce() {
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let n = 1 + (i % 6) as usize;
        let d = (i / 6 % 7) as usize;
        let c = random_circuit::<f64, _>(n, d, 0.25, &Default::default(), &mut rng).unwrap();
        let b = sample_error_config(&c, &mut rng);
        assert_eq!(
            any_survivor_fast(&c, &b).unwrap(),
            any_survivor_bruteforce(&c, &b).unwrap(),
            "instance {i}"
        );
    }
}

fn brickwork(n: usize, depths: Vec<usize>, seed: u64) -> SweepConfig {
    SweepConfig {
        family: Family::Brickwork,
        n: vec![n],
        gamma: vec![0.1],
        reset_rate: 0.1,
        reset_state: ResetState::default(),
        depths,
        trials: 10_000,
        seed,
        confidence: 0.99,
        out: None,
        plot: None,
    }
}

#[test]
fn brickwork_survival_is_non_increasing_in_depth() {
    let depths = vec![1, 2, 4, 6, 8, 10, 12, 14, 16, 20, 25, 30, 50, 100, 200];
    let rows = run_sweep(&brickwork(8, depths, 7), &[], None, None).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].survivors <= w[0].survivors, "{:?} -> {:?}", w[0], w[1]);
    }
    assert_eq!(rows.last().unwrap().survivors, 0);
}

#[test]
fn brickwork_tail_is_log_linear() {
    let rows = run_sweep(&brickwork(16, (6..=26).collect(), 1), &[], None, None).unwrap();
    let fit = fit_decay(&rows, &FitOptions::default()).unwrap();
    assert!(fit.slope < 0.0);
    assert!(fit.r_squared > 0.9, "{fit:?}");
}
