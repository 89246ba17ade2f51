use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{PauliBits, PauliString};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest local gate width handled by [`SymplecticMatrix`] (rows are `u64`).
pub const MAX_LOCAL_QUBITS: usize = 32;

/// Phaseless action of a `k`-qubit Clifford as a `2k x 2k` GF(2) matrix.
///
/// `rows[i]` is the image of `X_i` and `rows[k + i]` the image of `Z_i`.
/// Within a row, bit `j` is the x component on local qubit `j` and bit
/// `k + j` the z component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    k: usize,
    rows: Vec<u64>,
}

#[inline]
fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

impl SymplecticMatrix {
    pub fn identity(k: usize) -> Self {
        assert!(k <= MAX_LOCAL_QUBITS);
        SymplecticMatrix {
            k,
            rows: (0..2 * k).map(|i| 1u64 << i).collect(),
        }
    }

    /// Wraps raw rows, rejecting anything that is not symplectic.
    pub fn from_rows(k: usize, rows: Vec<u64>) -> Result<Self> {
        if k == 0 || k > MAX_LOCAL_QUBITS {
            return Err(Error::InvalidTableau(format!("unsupported width {k}")));
        }
        if rows.len() != 2 * k {
            return Err(Error::InvalidTableau(format!(
                "expected {} rows, found {}",
                2 * k,
                rows.len()
            )));
        }
        let mask = Self::full_mask(k);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::InvalidTableau("row has bits beyond 2k columns".into()));
        }
        let m = SymplecticMatrix { k, rows };
        if !m.is_symplectic() {
            return Err(Error::InvalidTableau(
                "rows do not preserve commutation relations".into(),
            ));
        }
        Ok(m)
    }

    fn full_mask(k: usize) -> u64 {
        if 2 * k == 64 {
            u64::MAX
        } else {
            (1u64 << (2 * k)) - 1
        }
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Symplectic product of two local vectors.
    #[inline]
    pub fn omega(&self, u: u64, v: u64) -> bool {
        let k = self.k;
        let low = if k == 32 { u32::MAX as u64 } else { (1u64 << k) - 1 };
        let (ux, uz) = (u & low, u >> k);
        let (vx, vz) = (v & low, v >> k);
        parity((ux & vz) ^ (uz & vx))
    }

    pub fn is_symplectic(&self) -> bool {
        let n = 2 * self.k;
        for a in 0..n {
            for b in a..n {
                let expect = self.omega(1 << a, 1 << b);
                if self.omega(self.rows[a], self.rows[b]) != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Image of a local vector.
    #[inline]
    pub fn apply(&self, mut v: u64) -> u64 {
        let mut out = 0;
        while v != 0 {
            let j = v.trailing_zeros() as usize;
            out ^= self.rows[j];
            v &= v - 1;
        }
        out
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.k, next.k);
        SymplecticMatrix {
            k: self.k,
            rows: self.rows.iter().map(|&r| next.apply(r)).collect(),
        }
    }

    /// Inverse map by GF(2) elimination of `(image, preimage)` pairs.
    pub fn inverse(&self) -> SymplecticMatrix {
        let n = 2 * self.k;
        let mut pairs: Vec<(u64, u64)> = self.rows.iter().enumerate().map(|(j, &r)| (r, 1u64 << j)).collect();
        for bit in 0..n {
            let pivot = (bit..n)
                .find(|&i| (pairs[i].0 >> bit) & 1 == 1)
                .expect("symplectic matrices are invertible");
            pairs.swap(bit, pivot);
            let (pv, pc) = pairs[bit];
            for (i, pair) in pairs.iter_mut().enumerate() {
                if i != bit && (pair.0 >> bit) & 1 == 1 {
                    pair.0 ^= pv;
                    pair.1 ^= pc;
                }
            }
        }
        SymplecticMatrix {
            k: self.k,
            rows: pairs.into_iter().map(|(_, c)| c).collect(),
        }
    }

    /// Label of local qubit `j` in local vector `v`, as `(x, z)`.
    #[inline]
    pub(crate) fn local_bits(&self, v: u64, j: usize) -> (bool, bool) {
        ((v >> j) & 1 == 1, (v >> (self.k + j)) & 1 == 1)
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [u64] {
        &mut self.rows
    }
}

/// Fixed named gate set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedGate {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
}

impl NamedGate {
    pub const ALL: [NamedGate; 9] = [
        NamedGate::H,
        NamedGate::S,
        NamedGate::Sdg,
        NamedGate::X,
        NamedGate::Y,
        NamedGate::Z,
        NamedGate::Cnot,
        NamedGate::Cz,
        NamedGate::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            NamedGate::Cnot | NamedGate::Cz | NamedGate::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedGate::H => "H",
            NamedGate::S => "S",
            NamedGate::Sdg => "SDG",
            NamedGate::X => "X",
            NamedGate::Y => "Y",
            NamedGate::Z => "Z",
            NamedGate::Cnot => "CNOT",
            NamedGate::Cz => "CZ",
            NamedGate::Swap => "SWAP",
        }
    }

    /// Unitary inverse within the gate set.
    pub fn inverse(self) -> NamedGate {
        match self {
            NamedGate::S => NamedGate::Sdg,
            NamedGate::Sdg => NamedGate::S,
            g => g,
        }
    }

    /// Phaseless conjugation action `P -> U P U^dagger`.
    pub fn symplectic(self) -> SymplecticMatrix {
        // single qubit: bit 0 = x, bit 1 = z
        // two qubits: bits 0,1 = x0,x1; bits 2,3 = z0,z1
        let (k, rows) = match self {
            NamedGate::H => (1, vec![0b10, 0b01]),
            NamedGate::S | NamedGate::Sdg => (1, vec![0b11, 0b10]),
            NamedGate::X | NamedGate::Y | NamedGate::Z => (1, vec![0b01, 0b10]),
            // X0 -> X0 X1, X1 -> X1, Z0 -> Z0, Z1 -> Z0 Z1
            NamedGate::Cnot => (2, vec![0b0011, 0b0010, 0b0100, 0b1100]),
            // X0 -> X0 Z1, X1 -> Z0 X1
            NamedGate::Cz => (2, vec![0b1001, 0b0110, 0b0100, 0b1000]),
            NamedGate::Swap => (2, vec![0b0010, 0b0001, 0b1000, 0b0100]),
        };
        SymplecticMatrix { k, rows }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedGate::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// One gate of a layer: either a named gate or a raw local tableau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Named {
        gate: NamedGate,
        qubits: Vec<usize>,
    },
    Tableau {
        qubits: Vec<usize>,
        matrix: SymplecticMatrix,
    },
}

impl Gate {
    pub fn named(gate: NamedGate, qubits: &[usize]) -> Self {
        Gate::Named {
            gate,
            qubits: qubits.to_vec(),
        }
    }

    pub fn tableau(qubits: &[usize], matrix: SymplecticMatrix) -> Self {
        Gate::Tableau {
            qubits: qubits.to_vec(),
            matrix,
        }
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            Gate::Named { qubits, .. } | Gate::Tableau { qubits, .. } => qubits,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::Named { gate, .. } => gate.name(),
            Gate::Tableau { .. } => "TABLEAU",
        }
    }

    pub fn symplectic(&self) -> SymplecticMatrix {
        match self {
            Gate::Named { gate, .. } => gate.symplectic(),
            Gate::Tableau { matrix, .. } => matrix.clone(),
        }
    }

    /// Checks arity, range and repeated qubits; returns the local action.
    pub fn compile(&self, n: usize) -> Result<LocalClifford> {
        let qubits = self.qubits();
        let matrix = self.symplectic();
        if qubits.len() != matrix.width() {
            return Err(Error::InvalidArgument(format!(
                "{} acts on {} qubits, got {}",
                self.kind_name(),
                matrix.width(),
                qubits.len()
            )));
        }
        let mut seen = HashSet::new();
        for &q in qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            if !seen.insert(q) {
                return Err(Error::OverlappingGates { qubit: q });
            }
        }
        Ok(LocalClifford::new(qubits.to_vec(), matrix))
    }
}

/// A Clifford acting on a few qubits of a larger register, with both its
/// forward and inverse phaseless actions precomputed.
#[derive(Clone, Debug)]
pub struct LocalClifford {
    qubits: Vec<usize>,
    forward: SymplecticMatrix,
    inverse: SymplecticMatrix,
    forward_table: Vec<u64>,
    inverse_table: Vec<u64>,
}

const TABLE_MAX_BITS: usize = 8;

impl LocalClifford {
    pub fn new(qubits: Vec<usize>, forward: SymplecticMatrix) -> Self {
        assert_eq!(qubits.len(), forward.width());
        let inverse = forward.inverse();
        let bits = 2 * forward.width();
        let (forward_table, inverse_table) = if bits <= TABLE_MAX_BITS {
            let size = 1u64 << bits;
            (
                (0..size).map(|v| forward.apply(v)).collect(),
                (0..size).map(|v| inverse.apply(v)).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        LocalClifford {
            qubits,
            forward,
            inverse,
            forward_table,
            inverse_table,
        }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn forward(&self) -> &SymplecticMatrix {
        &self.forward
    }

    pub fn inverse(&self) -> &SymplecticMatrix {
        &self.inverse
    }

    #[inline]
    fn gather(&self, p: &PauliBits) -> u64 {
        let k = self.qubits.len();
        let mut v = 0u64;
        for (j, &q) in self.qubits.iter().enumerate() {
            v |= (p.x_bit(q) as u64) << j;
            v |= (p.z_bit(q) as u64) << (k + j);
        }
        v
    }

    #[inline]
    fn scatter(&self, p: &mut PauliBits, v: u64) {
        let k = self.qubits.len();
        for (j, &q) in self.qubits.iter().enumerate() {
            p.set_bits(q, (v >> j) & 1 == 1, (v >> (k + j)) & 1 == 1);
        }
    }

    /// `P -> U P U^dagger` on the gate's qubits.
    #[inline]
    pub fn conjugate(&self, p: &mut PauliBits) {
        let v = self.gather(p);
        if v == 0 {
            return;
        }
        let out = if self.forward_table.is_empty() {
            self.forward.apply(v)
        } else {
            self.forward_table[v as usize]
        };
        self.scatter(p, out);
    }

    /// `P -> U^dagger P U`, the Heisenberg-picture action of the gate.
    #[inline]
    pub fn conjugate_adjoint(&self, p: &mut PauliBits) {
        let v = self.gather(p);
        if v == 0 {
            return;
        }
        let out = if self.inverse_table.is_empty() {
            self.inverse.apply(v)
        } else {
            self.inverse_table[v as usize]
        };
        self.scatter(p, out);
    }
}

/// Phaseless conjugation action of an `n`-qubit Clifford.
///
/// `rows[i]` is the image of `X_i`, `rows[n + i]` the image of `Z_i`.
/// Signs are not tracked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<PauliBits>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let rows = (0..2 * n)
            .map(|i| {
                let mut p = PauliBits::identity(n);
                if i < n {
                    p.set_bits(i, true, false);
                } else {
                    p.set_bits(i - n, false, true);
                }
                p
            })
            .collect();
        CliffordTableau { n, rows }
    }

    /// Composite action of one layer of pairwise disjoint gates.
    pub fn from_layer(n: usize, gates: &[Gate]) -> Result<Self> {
        let mut used = HashSet::new();
        let mut compiled = Vec::with_capacity(gates.len());
        for g in gates {
            let local = g.compile(n)?;
            for &q in local.qubits() {
                if !used.insert(q) {
                    return Err(Error::OverlappingGates { qubit: q });
                }
            }
            compiled.push(local);
        }
        Ok(Self::from_local(n, &compiled))
    }

    /// Sequential composition: the first gate acts first.
    pub fn from_local(n: usize, gates: &[LocalClifford]) -> Self {
        let mut t = Self::identity(n);
        for row in &mut t.rows {
            for g in gates {
                g.conjugate(row);
            }
        }
        t
    }

    /// Embeds a local symplectic matrix acting on `qubits`.
    pub fn from_symplectic(n: usize, qubits: &[usize], m: &SymplecticMatrix) -> Result<Self> {
        let gate = Gate::tableau(qubits, m.clone()).compile(n)?;
        Ok(Self::from_local(n, &[gate]))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn image_x(&self, q: usize) -> &PauliBits {
        &self.rows[q]
    }

    pub fn image_z(&self, q: usize) -> &PauliBits {
        &self.rows[self.n + q]
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in a..2 * n {
                let expect = a != b && (a % n == b % n);
                if self.rows[a].anticommutes(&self.rows[b]) != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn conjugate_bits(&self, p: &PauliBits) -> Result<PauliBits> {
        p.check_len(self.n)?;
        let mut out = PauliBits::identity(self.n);
        for q in 0..self.n {
            if p.x_bit(q) {
                out.xor_assign(&self.rows[q]);
            }
            if p.z_bit(q) {
                out.xor_assign(&self.rows[self.n + q]);
            }
        }
        Ok(out)
    }

    /// Phaseless image of `p`; the coefficient is carried over unchanged.
    pub fn conjugate<T: Real>(&self, p: &PauliString<T>) -> Result<PauliString<T>> {
        let mut out = p.clone();
        if p.is_annihilated() {
            p.bits().check_len(self.n)?;
            return Ok(out);
        }
        *out.bits_mut() = self.conjugate_bits(p.bits())?;
        Ok(out)
    }

    /// Restricts to a `2k x 2k` local matrix when the tableau acts only on
    /// `qubits`.
    pub fn to_symplectic(&self, qubits: &[usize]) -> Result<SymplecticMatrix> {
        let k = qubits.len();
        let mut rows = Vec::with_capacity(2 * k);
        for block in 0..2 {
            for &q in qubits {
                let img = &self.rows[block * self.n + q];
                let mut v = 0u64;
                for q2 in img.support() {
                    let j = qubits
                        .iter()
                        .position(|&x| x == q2)
                        .ok_or_else(|| Error::InvalidTableau(format!("image leaves the local qubits at {q2}")))?;
                    v |= (img.x_bit(q2) as u64) << j;
                    v |= (img.z_bit(q2) as u64) << (k + j);
                }
                rows.push(v);
            }
        }
        SymplecticMatrix::from_rows(k, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliLabel;

    fn bits(s: &str) -> PauliBits {
        s.parse().unwrap()
    }

    #[test]
    fn named_gates_are_symplectic_and_self_consistent() {
        for g in NamedGate::ALL {
            let m = g.symplectic();
            assert!(m.is_symplectic(), "{g}");
            assert_eq!(m.then(&m.inverse()), SymplecticMatrix::identity(m.width()), "{g}");
            assert_eq!(m.width(), g.arity());
        }
    }

    #[test]
    fn cnot_spreads_x_from_control() {
        let t = CliffordTableau::from_layer(2, &[Gate::named(NamedGate::Cnot, &[0, 1])]).unwrap();
        assert_eq!(t.conjugate_bits(&bits("XI")).unwrap(), bits("XX"));
        assert_eq!(t.conjugate_bits(&bits("IZ")).unwrap(), bits("ZZ"));
        assert_eq!(t.conjugate_bits(&bits("ZI")).unwrap(), bits("ZI"));
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let t = CliffordTableau::from_layer(2, &[Gate::named(NamedGate::H, &[0])]).unwrap();
        assert_eq!(t.conjugate_bits(&bits("ZI")).unwrap(), bits("XI"));
        assert_eq!(t.conjugate_bits(&bits("YI")).unwrap(), bits("YI"));
    }

    #[test]
    fn empty_layer_is_identity() {
        let t = CliffordTableau::from_layer(3, &[]).unwrap();
        assert_eq!(t, CliffordTableau::identity(3));
        let id = PauliString::<f64>::identity(3);
        assert_eq!(t.conjugate(&id).unwrap(), id);
    }

    #[test]
    fn overlapping_gates_rejected() {
        let err = CliffordTableau::from_layer(2, &[Gate::named(NamedGate::H, &[0]), Gate::named(NamedGate::H, &[0])]);
        assert!(matches!(err, Err(Error::OverlappingGates { qubit: 0 })));
        let err = CliffordTableau::from_layer(
            2,
            &[Gate::named(NamedGate::Cnot, &[0, 1]), Gate::named(NamedGate::H, &[1])],
        );
        assert!(matches!(err, Err(Error::OverlappingGates { qubit: 1 })));
        assert!(matches!(
            CliffordTableau::from_layer(2, &[Gate::named(NamedGate::H, &[2])]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!("T".parse::<NamedGate>(), Err(Error::UnknownGate(_))));
    }

    #[test]
    fn non_symplectic_rows_rejected() {
        assert!(SymplecticMatrix::from_rows(1, vec![0b01, 0b01]).is_err());
        assert!(SymplecticMatrix::from_rows(1, vec![0b10, 0b01]).is_ok());
    }

    #[test]
    fn local_adjoint_inverts_conjugation() {
        let g = Gate::named(NamedGate::Cz, &[2, 0]).compile(3).unwrap();
        for code in 0..64u64 {
            let p = PauliBits::from_index(3, code);
            let mut q = p.clone();
            g.conjugate(&mut q);
            g.conjugate_adjoint(&mut q);
            assert_eq!(p, q);
        }
    }

    #[test]
    fn restriction_round_trips() {
        let m = NamedGate::Cnot.symplectic();
        let t = CliffordTableau::from_symplectic(4, &[3, 1], &m).unwrap();
        assert_eq!(t.to_symplectic(&[3, 1]).unwrap(), m);
        let mut p = PauliBits::identity(4);
        p.set(3, PauliLabel::X);
        let img = t.conjugate_bits(&p).unwrap();
        assert_eq!(img.to_string(), "IXIX");
    }
}
