//! Dense operator kernels on `2^n x 2^n` complex matrices.
//!
//! Qubit 0 is the most significant bit of a basis index, matching the
//! left-to-right order of Pauli labels. Every map here is linear on
//! arbitrary matrices, not just states, so the same code evolves states and
//! Pauli operators alike.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::channels::Bloch;
use crate::circuit::{Circuit, ErrorConfig};
use crate::pauli::{synthesize, Gate, NamedGate, PauliBits, SymplecticMatrix};
use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Dense matrix of a phaseless Pauli, with the Hermitian phase convention
/// (`Y = i X Z` on each factor).
pub fn pauli_matrix<T: Real>(p: &PauliBits) -> CMatrix<T> {
    let n = p.num_qubits();
    let (mut xm, mut zm) = (0usize, 0usize);
    for q in 0..n {
        if p.x_bit(q) {
            xm |= qubit_mask(n, q);
        }
        if p.z_bit(q) {
            zm |= qubit_mask(n, q);
        }
    }
    let dim = 1usize << n;
    let phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(xm & zm).count_ones() as usize % 4];
    let mut m = CMatrix::<T>::zeros(dim, dim);
    for k in 0..dim {
        let sign = if (zm & k).count_ones() % 2 == 1 { -phase } else { phase };
        m[(k ^ xm, k)] = sign;
    }
    m
}

/// Single-qubit density matrix `(I + aX + bY + cZ) / 2`.
pub fn bloch_matrix<T: Real>(b: &Bloch<T>) -> CMatrix<T> {
    let [x, y, z] = b.components();
    let half = T::lit(0.5);
    let one = T::one();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new((one + z) * half, T::zero()),
            Complex::new(x * half, -y * half),
            Complex::new(x * half, y * half),
            Complex::new((one - z) * half, T::zero()),
        ],
    )
}

/// Unitary of a named gate; the first listed qubit is the most significant.
pub fn named_unitary<T: Real>(g: NamedGate) -> CMatrix<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (dim, v): (usize, Vec<(f64, f64)>) = match g {
        NamedGate::H => (2, vec![(h, 0.0), (h, 0.0), (h, 0.0), (-h, 0.0)]),
        NamedGate::S => (2, vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]),
        NamedGate::Sdg => (2, vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, -1.0)]),
        NamedGate::X => (2, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
        NamedGate::Y => (2, vec![(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]),
        NamedGate::Z => (2, vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]),
        NamedGate::Cnot => (4, perm(&[0, 1, 3, 2])),
        NamedGate::Swap => (4, perm(&[0, 2, 1, 3])),
        NamedGate::Cz => {
            let mut v = perm(&[0, 1, 2, 3]);
            v[15] = (-1.0, 0.0);
            (4, v)
        }
    };
    let entries: Vec<Complex<T>> = v.into_iter().map(|(re, im)| c(re, im)).collect();
    CMatrix::from_row_slice(dim, dim, &entries)
}

fn perm(images: &[usize]) -> Vec<(f64, f64)> {
    let d = images.len();
    let mut v = vec![(0.0, 0.0); d * d];
    for (col, &row) in images.iter().enumerate() {
        v[row * d + col] = (1.0, 0.0);
    }
    v
}

/// Unitary whose conjugation action is `m`: the product of the named gates
/// returned by [`synthesize`].
pub fn tableau_unitary<T: Real>(m: &SymplecticMatrix) -> CMatrix<T> {
    let k = m.width();
    let mut u = CMatrix::<T>::identity(1 << k, 1 << k);
    for (g, qs) in synthesize(m) {
        u = apply_left(&u, k, &qs, &named_unitary(g));
    }
    u
}

pub fn gate_unitary<T: Real>(g: &Gate) -> CMatrix<T> {
    match g {
        Gate::Named { gate, .. } => named_unitary(*gate),
        Gate::Tableau { matrix, .. } => tableau_unitary(matrix),
    }
}

/// `U M` with `u` acting on `qubits` of an `n`-qubit register.
pub fn apply_left<T: Real>(m: &CMatrix<T>, n: usize, qubits: &[usize], u: &CMatrix<T>) -> CMatrix<T> {
    let k = qubits.len();
    let local = 1usize << k;
    let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(n, q)).collect();
    let all: usize = masks.iter().sum();
    let spread = |l: usize| -> usize { (0..k).filter(|&j| (l >> (k - 1 - j)) & 1 == 1).map(|j| masks[j]).sum() };
    let offsets: Vec<usize> = (0..local).map(spread).collect();
    let mut out = CMatrix::<T>::zeros(m.nrows(), m.ncols());
    let mut v = vec![Complex::new(T::zero(), T::zero()); local];
    for col in 0..m.ncols() {
        for base in (0..m.nrows()).filter(|r| r & all == 0) {
            for (l, &o) in offsets.iter().enumerate() {
                v[l] = m[(base | o, col)];
            }
            for (a, &oa) in offsets.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (b, vb) in v.iter().enumerate() {
                    acc += u[(a, b)] * vb;
                }
                out[(base | oa, col)] = acc;
            }
        }
    }
    out
}

/// `U M U^dagger`.
pub fn conjugate_by<T: Real>(m: &CMatrix<T>, n: usize, qubits: &[usize], u: &CMatrix<T>) -> CMatrix<T> {
    let left = apply_left(m, n, qubits, u);
    apply_left(&left.adjoint(), n, qubits, u).adjoint()
}

/// `rho_new (x) Tr_q(M)`, with `rho_new` placed on qubit `q`.
pub fn replace_qubit<T: Real>(m: &CMatrix<T>, n: usize, q: usize, fresh: &CMatrix<T>) -> CMatrix<T> {
    let mask = qubit_mask(n, q);
    let dim = m.nrows();
    let mut out = CMatrix::<T>::zeros(dim, dim);
    for i in 0..dim {
        let i0 = i & !mask;
        let bi = (i & mask != 0) as usize;
        for j in 0..dim {
            let j0 = j & !mask;
            let bj = (j & mask != 0) as usize;
            let t = m[(i0, j0)] + m[(i0 | mask, j0 | mask)];
            out[(i, j)] = fresh[(bi, bj)] * t;
        }
    }
    out
}

/// Fired depolarizing error: replace qubit `q` with `I/2`.
pub fn fired_error<T: Real>(m: &CMatrix<T>, n: usize, q: usize) -> CMatrix<T> {
    replace_qubit(m, n, q, &bloch_matrix(&Bloch::maximally_mixed()))
}

/// `N_gamma(M) = (1 - gamma) M + gamma D(M)` on qubit `q`.
pub fn depolarize<T: Real>(m: &CMatrix<T>, n: usize, q: usize, gamma: T) -> CMatrix<T> {
    if gamma == T::zero() {
        return m.clone();
    }
    let d = fired_error(m, n, q);
    m.map(|v| v * (T::one() - gamma)) + d.map(|v| v * gamma)
}

/// Noise at each site of one layer: full `N_gamma` when `config` is
/// `None`, otherwise the fired error exactly where the configuration fires.
#[derive(Clone, Copy)]
pub(crate) enum NoiseMode<'a> {
    Average,
    Config(&'a ErrorConfig),
}

/// Applies the whole circuit to an arbitrary matrix.
pub(crate) fn apply_circuit<T: Real>(c: &Circuit<T>, mode: NoiseMode<'_>, m: &CMatrix<T>) -> CMatrix<T> {
    let n = c.num_qubits();
    let gamma = c.gamma();
    let mut m = m.clone();
    for (l, layer) in c.layers().iter().enumerate() {
        for g in &layer.gates {
            m = conjugate_by(&m, n, g.qubits(), &gate_unitary(g));
        }
        for r in &layer.resets {
            m = replace_qubit(&m, n, r.qubit, &bloch_matrix(&r.bloch));
        }
        for q in 0..n {
            m = match mode {
                NoiseMode::Average => depolarize(&m, n, q, gamma),
                NoiseMode::Config(b) if b.get(l, q) => fired_error(&m, n, q),
                NoiseMode::Config(_) => m,
            };
        }
    }
    m
}

/// Kraus operators of single-qubit channels.
pub fn depolarizing_kraus<T: Real>(gamma: T) -> Vec<CMatrix<T>> {
    let quarter = T::lit(0.25);
    let a = num_traits::Float::sqrt(T::one() - T::lit(3.0) * gamma * quarter);
    let b = num_traits::Float::sqrt(gamma * quarter);
    let mut out = vec![CMatrix::<T>::identity(2, 2).map(|v| v * a)];
    for g in [NamedGate::X, NamedGate::Y, NamedGate::Z] {
        out.push(named_unitary::<T>(g).map(|v| v * b));
    }
    out
}

/// `K_ij = A |i><j|` with `A A^dagger = rho` (a triangular factor).
pub fn reset_kraus<T: Real>(b: &Bloch<T>) -> Vec<CMatrix<T>> {
    let rho = bloch_matrix(b);
    let zero = Complex::new(T::zero(), T::zero());
    let p = rho[(0, 0)].re;
    let r = rho[(1, 1)].re;
    let a = if p > T::zero() {
        let sp = num_traits::Float::sqrt(p);
        let off = rho[(1, 0)] / Complex::new(sp, T::zero());
        let rest = num_traits::Float::max(r - off.norm_sqr(), T::zero());
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(sp, T::zero()),
                zero,
                off,
                Complex::new(num_traits::Float::sqrt(rest), T::zero()),
            ],
        )
    } else {
        CMatrix::from_row_slice(
            2,
            2,
            &[zero, zero, zero, Complex::new(num_traits::Float::sqrt(r), T::zero())],
        )
    };
    let mut out = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = CMatrix::<T>::zeros(2, 2);
            e[(i, j)] = Complex::new(T::one(), T::zero());
            out.push(&a * e);
        }
    }
    out
}

/// `sum_k K_k^dagger M K_k`.
pub fn kraus_adjoint<T: Real>(kraus: &[CMatrix<T>], m: &CMatrix<T>) -> CMatrix<T> {
    kraus.iter().fold(CMatrix::<T>::zeros(m.nrows(), m.ncols()), |acc, k| {
        acc + k.adjoint() * m * k
    })
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diagonal()
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b)
}

/// `Tr(A^dagger B)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{random_symplectic, PauliLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = CMatrix<f64>;

    fn close(a: &M, b: &M) -> bool {
        (a - b).iter().all(|v| v.norm() < 1e-12)
    }

    fn same_up_to_sign(a: &M, b: &M) -> bool {
        close(a, b) || close(a, &b.map(|v| -v))
    }

    #[test]
    fn single_qubit_paulis() {
        let y: M = pauli_matrix(&"Y".parse().unwrap());
        assert!(close(&y, &named_unitary(NamedGate::Y)));
        let xz: M = pauli_matrix(&"XZ".parse().unwrap());
        assert_eq!(xz[(2, 0)], Complex::new(1.0, 0.0));
        assert_eq!(xz[(3, 1)], Complex::new(-1.0, 0.0));
    }

    #[test]
    fn paulis_are_hermitian_and_orthogonal() {
        for a in 0..16u64 {
            let pa: M = pauli_matrix(&PauliBits::from_index(2, a));
            assert!(close(&pa, &pa.adjoint()));
            for b in 0..16u64 {
                let pb: M = pauli_matrix(&PauliBits::from_index(2, b));
                let ip = hs_inner(&pa, &pb);
                let want = if a == b { 4.0 } else { 0.0 };
                assert!((ip - Complex::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn named_gates_match_phaseless_conjugation() {
        for g in NamedGate::ALL {
            let k = g.arity();
            let u: M = named_unitary(g);
            assert!(close(&(&u * u.adjoint()), &M::identity(1 << k, 1 << k)));
            let qs: Vec<usize> = (0..k).collect();
            let local = Gate::named(g, &qs).compile(k).unwrap();
            for code in 0..1u64 << (2 * k) {
                let p = PauliBits::from_index(k, code);
                let mut img = p.clone();
                local.conjugate(&mut img);
                let dense = conjugate_by(&pauli_matrix(&p), k, &qs, &u);
                assert!(same_up_to_sign(&dense, &pauli_matrix(&img)), "{g} on {p}");
                let mut back = p.clone();
                local.conjugate_adjoint(&mut back);
                let dense = apply_left(
                    &apply_left(&pauli_matrix(&p), k, &qs, &u.adjoint()).adjoint(),
                    k,
                    &qs,
                    &u.adjoint(),
                )
                .adjoint();
                assert!(same_up_to_sign(&dense, &pauli_matrix(&back)), "{g} adjoint on {p}");
            }
        }
    }

    #[test]
    fn tableau_unitaries_match_their_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3 {
            for _ in 0..20 {
                let m = random_symplectic(k, &mut rng);
                let u: M = tableau_unitary(&m);
                let qs: Vec<usize> = (0..k).collect();
                let local = Gate::tableau(&qs, m).compile(k).unwrap();
                for code in 0..1u64 << (2 * k) {
                    let p = PauliBits::from_index(k, code);
                    let mut img = p.clone();
                    local.conjugate(&mut img);
                    assert!(same_up_to_sign(
                        &conjugate_by(&pauli_matrix(&p), k, &qs, &u),
                        &pauli_matrix(&img)
                    ));
                }
            }
        }
    }

    #[test]
    fn embedded_gate_on_reversed_qubits() {
        // CNOT with control 2 and target 0 on three qubits: X on qubit 2 spreads to qubit 0
        let u: M = named_unitary(NamedGate::Cnot);
        let p: PauliBits = "IIX".parse().unwrap();
        let out = conjugate_by(&pauli_matrix(&p), 3, &[2, 0], &u);
        assert!(same_up_to_sign(&out, &pauli_matrix(&"XIX".parse().unwrap())));
    }

    #[test]
    fn reset_and_error_act_on_one_qubit() {
        let plus: M = bloch_matrix(&Bloch::plus_state());
        let zz: M = pauli_matrix(&"ZZ".parse().unwrap());
        // Tr_0(ZZ) = 0, so resetting qubit 0 of ZZ gives zero
        assert!(replace_qubit(&zz, 2, 0, &plus).iter().all(|v| v.norm() < 1e-15));
        let ii = M::identity(4, 4);
        let out = replace_qubit(&ii, 2, 1, &plus);
        let want = pauli_matrix::<f64>(&"II".parse().unwrap()) + pauli_matrix::<f64>(&"IX".parse().unwrap());
        assert!(close(&out, &want));
        let x: M = pauli_matrix(&PauliBits::single(1, 0, PauliLabel::X).unwrap());
        assert!(close(&depolarize(&x, 1, 0, 0.3), &x.map(|v| v * 0.7)));
    }

    #[test]
    fn kraus_sets_are_trace_preserving() {
        for b in [
            Bloch::zero_state(),
            Bloch::magic_state(),
            Bloch::t_magic_state(),
            Bloch::maximally_mixed(),
            Bloch::new(0.3, -0.4, 0.5),
        ] {
            let ks = reset_kraus::<f64>(&b);
            assert!(close(&kraus_adjoint(&ks, &M::identity(2, 2)), &M::identity(2, 2)));
        }
        for g in [0.0, 0.1, 1.0] {
            assert!(close(
                &kraus_adjoint(&depolarizing_kraus::<f64>(g), &M::identity(2, 2)),
                &M::identity(2, 2)
            ));
        }
    }
}
