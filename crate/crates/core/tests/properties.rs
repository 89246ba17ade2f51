use memloss::circuit::{random_circuit, ErrorConfig};
use memloss::engine::{any_survivor_bruteforce, any_survivor_fast, propagate_pauli, survival_probability, McOptions};
use memloss::harness::wilson_interval;
use memloss::pauli::random_symplectic;
use memloss::{Circuit, CliffordTableau, Gate, PauliBits, PauliString};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circuit(seed: u64, n: usize, d: usize, gamma: f64) -> Circuit<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_circuit(n, d, gamma, &Default::default(), &mut rng).unwrap()
}

fn config(n: usize, d: usize, bits: &[bool]) -> ErrorConfig {
    let mut b = ErrorConfig::none(n, d);
    for l in 0..d {
        for q in 0..n {
            b.set(l, q, bits[(l * n + q) % bits.len()]);
        }
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn firing_more_sites_never_revives_a_pauli(
        seed in any::<u64>(), n in 1usize..6, d in 0usize..6, code in any::<u64>(),
        bits in prop::collection::vec(any::<bool>(), 1..40), extra in prop::collection::vec(any::<bool>(), 1..40),
    ) {
        let c = circuit(seed, n, d, 0.2);
        let b = config(n, d, &bits);
        let mut more = b.clone();
        for l in 0..d {
            for q in 0..n {
                if extra[(l * n + q) % extra.len()] {
                    more.set(l, q, true);
                }
            }
        }
        let s: PauliString<f64> = PauliBits::from_index(n, code % (1u64 << (2 * n))).into();
        let (few, _) = propagate_pauli(&c, &b, &s).unwrap();
        let (many, _) = propagate_pauli(&c, &more, &s).unwrap();
        prop_assert!(few.is_annihilated() <= many.is_annihilated());
        prop_assert!(any_survivor_fast(&c, &more).unwrap() <= any_survivor_fast(&c, &b).unwrap());
    }

    #[test]
    fn trace_minimum_bounds_every_boundary(seed in any::<u64>(), n in 1usize..8, d in 0usize..8, code in any::<u64>()) {
        let c = circuit(seed, n, d, 0.1);
        let s: PauliString<f64> = PauliBits::from_index(n, code % (1u64 << (2 * n))).into();
        let (out, trace) = propagate_pauli(&c, &ErrorConfig::none(n, d), &s).unwrap();
        prop_assert_eq!(trace.layer_weights.len(), d);
        prop_assert!(trace.min_weight <= trace.initial_weight);
        prop_assert!(trace.layer_weights.iter().all(|&w| w >= trace.min_weight));
        prop_assert!(out.weight() >= trace.min_weight || d == 0);
    }

    #[test]
    fn fast_search_agrees_with_bruteforce(seed in any::<u64>(), n in 1usize..5, d in 0usize..5, bits in prop::collection::vec(any::<bool>(), 1..25)) {
        let c = circuit(seed, n, d, 0.3);
        let b = config(n, d, &bits);
        prop_assert_eq!(any_survivor_fast(&c, &b).unwrap(), any_survivor_bruteforce(&c, &b).unwrap());
    }

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = CliffordTableau::from_layer(3, &[Gate::tableau(&[2, 0], random_symplectic(2, &mut rng))]).unwrap();
        let (p, q) = (PauliBits::from_index(3, a % 64), PauliBits::from_index(3, b % 64));
        let (tp, tq) = (t.conjugate_bits(&p).unwrap(), t.conjugate_bits(&q).unwrap());
        prop_assert_eq!(p.anticommutes(&q), tp.anticommutes(&tq));
        prop_assert_eq!(p.is_identity(), tp.is_identity());
    }

    #[test]
    fn wilson_brackets_the_estimate(trials in 1u64..5000, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
        let s = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(s, trials, conf).unwrap();
        let p = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn circuit_json_round_trips(seed in any::<u64>(), n in 1usize..6, d in 0usize..5) {
        let c = circuit(seed, n, d, 0.25);
        let text = c.to_json().unwrap();
        let back = Circuit::<f64>::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn common_seed_makes_survival_monotone_in_depth(seed in any::<u64>(), n in 1usize..7, d in 1usize..8, mc in any::<u64>()) {
        let c = circuit(seed, n, d, 0.15);
        let opts = McOptions::new(500, mc);
        let mut last = u64::MAX;
        for depth in 0..=d {
            let est = survival_probability(&c.truncated(depth), &opts).unwrap();
            prop_assert!(est.survivors <= last);
            prop_assert_eq!(est.p_hat, est.survivors as f64 / est.trials as f64);
            prop_assert!(est.ci_lo <= est.p_hat && est.p_hat <= est.ci_hi);
            last = est.survivors;
        }
    }
}
