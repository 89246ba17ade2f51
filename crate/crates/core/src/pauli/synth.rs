//! Decomposition of a local symplectic matrix into named gates.
//!
//! The dense oracle needs an actual unitary for raw tableau gates; we take
//! the unitary of the circuit returned here. Any other choice differs by a
//! Pauli correction, which survival analysis cannot see.

use super::tableau::{NamedGate, SymplecticMatrix};

struct Reducer {
    m: SymplecticMatrix,
    log: Vec<(NamedGate, Vec<usize>)>,
}

impl Reducer {
    fn label(&self, row: usize, j: usize) -> (bool, bool) {
        let v = self.m.rows()[row];
        self.m.local_bits(v, j)
    }

    /// Post-composes the current map with `gate`.
    fn apply(&mut self, gate: NamedGate, qubits: &[usize]) {
        let k = self.m.width();
        let g = gate.symplectic();
        for row in self.m.rows_mut() {
            let mut v = 0u64;
            for (j, &q) in qubits.iter().enumerate() {
                v |= ((*row >> q) & 1) << j;
                v |= ((*row >> (k + q)) & 1) << (g.width() + j);
            }
            let out = g.apply(v);
            for (j, &q) in qubits.iter().enumerate() {
                let x = (out >> j) & 1;
                let z = (out >> (g.width() + j)) & 1;
                *row = (*row & !(1 << q) & !(1 << (k + q))) | (x << q) | (z << (k + q));
            }
        }
        self.log.push((gate, qubits.to_vec()));
    }
}

/// Returns named gates, in application order, whose phaseless action equals
/// `m`. Qubit indices are local (`0..m.width()`).
pub fn synthesize(m: &SymplecticMatrix) -> Vec<(NamedGate, Vec<usize>)> {
    let k = m.width();
    let mut r = Reducer {
        m: m.clone(),
        log: Vec::new(),
    };
    for i in 0..k {
        // image of X_i -> X_i
        for j in i..k {
            match r.label(i, j) {
                (false, true) => r.apply(NamedGate::H, &[j]),
                (true, true) => r.apply(NamedGate::S, &[j]),
                _ => {}
            }
        }
        if !r.label(i, i).0 {
            let j = (i + 1..k)
                .find(|&j| r.label(i, j).0)
                .expect("image of X_i is non-trivial");
            r.apply(NamedGate::Swap, &[i, j]);
        }
        for j in i + 1..k {
            if r.label(i, j).0 {
                r.apply(NamedGate::Cnot, &[i, j]);
            }
        }
        // image of Z_i -> Z_i, keeping X_i fixed
        let zi = k + i;
        if r.label(zi, i) == (true, true) {
            r.apply(NamedGate::H, &[i]);
            r.apply(NamedGate::S, &[i]);
            r.apply(NamedGate::H, &[i]);
        }
        for j in i + 1..k {
            match r.label(zi, j) {
                (true, false) => r.apply(NamedGate::H, &[j]),
                (true, true) => {
                    r.apply(NamedGate::S, &[j]);
                    r.apply(NamedGate::H, &[j]);
                }
                _ => {}
            }
            if r.label(zi, j).1 {
                r.apply(NamedGate::Cnot, &[j, i]);
            }
        }
    }
    debug_assert_eq!(r.m, SymplecticMatrix::identity(k));
    r.log.into_iter().rev().map(|(g, qs)| (g.inverse(), qs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{random_symplectic, symplectic_from_index, Gate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn compose(k: usize, circuit: &[(NamedGate, Vec<usize>)]) -> SymplecticMatrix {
        let mut acc = SymplecticMatrix::identity(k);
        for (g, qs) in circuit {
            let local = Gate::named(*g, qs).compile(k).unwrap();
            let rows: Vec<u64> = acc
                .rows()
                .iter()
                .map(|&row| {
                    let mut p = crate::pauli::PauliBits::identity(k);
                    for j in 0..k {
                        p.set_bits(j, (row >> j) & 1 == 1, (row >> (k + j)) & 1 == 1);
                    }
                    local.conjugate(&mut p);
                    (0..k).fold(0u64, |v, j| {
                        v | ((p.x_bit(j) as u64) << j) | ((p.z_bit(j) as u64) << (k + j))
                    })
                })
                .collect();
            acc = SymplecticMatrix::from_rows(k, rows).unwrap();
        }
        acc
    }

    #[test]
    fn every_two_qubit_element_is_reproduced() {
        for i in 0..720u128 {
            let m = symplectic_from_index(2, i);
            assert_eq!(compose(2, &synthesize(&m)), m, "index {i}");
        }
    }

    #[test]
    fn wider_random_elements_are_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=5 {
            for _ in 0..25 {
                let m = random_symplectic(k, &mut rng);
                assert_eq!(compose(k, &synthesize(&m)), m);
            }
        }
    }
}
