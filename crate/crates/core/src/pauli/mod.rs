//! Phaseless Pauli algebra over paired X/Z bitsets.
//!
//! Qubit `i` of a string is stored in bit `i % 64` of word `i / 64` of both
//! masks. The textual form lists qubit 0 first, so `"XIYZ"` carries X on
//! qubit 0 and Z on qubit 3.

mod sample;
mod synth;
mod tableau;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use sample::{random_symplectic, random_two_qubit_clifford, symplectic_from_index, symplectic_group_order};
pub use synth::synthesize;
pub use tableau::{CliffordTableau, Gate, LocalClifford, NamedGate, SymplecticMatrix, MAX_LOCAL_QUBITS};

/// Single-qubit Pauli label, encoded as the `(x, z)` bit pair `x | z << 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLabel::I,
            (true, false) => PauliLabel::X,
            (true, true) => PauliLabel::Y,
            (false, true) => PauliLabel::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLabel::I => (false, false),
            PauliLabel::X => (true, false),
            PauliLabel::Y => (true, true),
            PauliLabel::Z => (false, true),
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliLabel::I
    }

    /// Index into the ordered basis `I, X, Y, Z`.
    pub fn index(self) -> usize {
        match self {
            PauliLabel::I => 0,
            PauliLabel::X => 1,
            PauliLabel::Y => 2,
            PauliLabel::Z => 3,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLabel::I => 'I',
            PauliLabel::X => 'X',
            PauliLabel::Y => 'Y',
            PauliLabel::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(PauliLabel::I),
            'X' | 'x' => Some(PauliLabel::X),
            'Y' | 'y' => Some(PauliLabel::Y),
            'Z' | 'z' => Some(PauliLabel::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Phaseless Pauli operator on `n` qubits as a pair of packed bit masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliBits {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliBits {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliBits {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Single-qubit Pauli `label` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, label: PauliLabel) -> Result<Self> {
        let mut p = Self::identity(n);
        p.try_set(q, label)?;
        Ok(p)
    }

    /// Builds a string from the integer encoding used by exhaustive
    /// enumeration: qubit `q` takes label `(code >> 2q) & 3` with
    /// `0 = I, 1 = X, 2 = Z, 3 = Y`, i.e. bit `2q` is x and bit `2q + 1` is z.
    pub fn from_index(n: usize, code: u64) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            let pair = (code >> (2 * q)) & 3;
            p.set(q, PauliLabel::from_bits(pair & 1 == 1, pair & 2 == 2));
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn get(&self, q: usize) -> PauliLabel {
        PauliLabel::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Label on qubit `q`; panics when `q` is out of range.
    #[inline]
    pub fn set(&mut self, q: usize, label: PauliLabel) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (x, z) = label.bits();
        self.set_bits(q, x, z);
    }

    pub fn try_set(&mut self, q: usize, label: PauliLabel) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        self.set(q, label);
        Ok(())
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q >> 6, q & 63);
        let m = 1u64 << b;
        self.x[w] = (self.x[w] & !m) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !m) | ((z as u64) << b);
    }

    /// Resets qubit `q` to identity.
    #[inline]
    pub fn clear(&mut self, q: usize) {
        self.set_bits(q, false, false);
    }

    /// Number of qubits carrying a non-identity factor.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Phaseless product: masks XOR componentwise.
    pub fn xor_assign(&mut self, other: &PauliBits) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Symplectic form: true when the two operators anticommute.
    pub fn anticommutes(&self, other: &PauliBits) -> bool {
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc & 1 == 1
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&q| self.x_bit(q) || self.z_bit(q))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '⊗')
            .map(|c| {
                PauliLabel::from_char(c).ok_or_else(|| Error::InvalidArgument(format!("bad Pauli character `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = PauliBits::identity(labels.len());
        for (q, l) in labels.into_iter().enumerate() {
            p.set(q, l);
        }
        Ok(p)
    }
}

/// Phaseless Pauli string with a real coefficient.
///
/// `alive` is the structural nonzero flag: it turns false exactly when a
/// channel annihilates the string, independently of how small `coeff` has
/// become numerically. Annihilated strings carry `coeff == 0` and compare
/// equal regardless of their masks.
#[derive(Clone, Debug)]
pub struct PauliString<T = f64> {
    bits: PauliBits,
    coeff: T,
    alive: bool,
}

impl<T: Real> PauliString<T> {
    pub fn new(bits: PauliBits, coeff: T) -> Self {
        let alive = coeff != T::zero();
        PauliString { bits, coeff, alive }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(PauliBits::identity(n), T::one())
    }

    pub fn single(n: usize, q: usize, label: PauliLabel) -> Result<Self> {
        Ok(Self::new(PauliBits::single(n, q, label)?, T::one()))
    }

    pub fn num_qubits(&self) -> usize {
        self.bits.n
    }

    pub fn bits(&self) -> &PauliBits {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut PauliBits {
        &mut self.bits
    }

    pub fn coeff(&self) -> T {
        self.coeff
    }

    pub fn is_annihilated(&self) -> bool {
        !self.alive
    }

    /// Nonzero and not proportional to the identity.
    pub fn is_nontrivial(&self) -> bool {
        self.alive && !self.bits.is_identity()
    }

    pub fn get(&self, q: usize) -> PauliLabel {
        self.bits.get(q)
    }

    /// Number of non-identity qubits; zero for annihilated strings.
    pub fn weight(&self) -> usize {
        if self.alive {
            self.bits.weight()
        } else {
            0
        }
    }

    pub fn annihilate(&mut self) {
        self.alive = false;
        self.coeff = T::zero();
    }

    /// Scales the coefficient by a component whose exact-zero status is
    /// known structurally.
    pub(crate) fn scale(&mut self, factor: T, exact_zero: bool) {
        if exact_zero {
            self.annihilate();
        } else if self.alive {
            self.coeff *= factor;
        }
    }

    /// Phaseless product: XOR of masks and product of coefficients.
    pub fn multiply(&self, other: &PauliString<T>) -> Result<PauliString<T>> {
        other.bits.check_len(self.bits.n)?;
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        let alive = self.alive && other.alive;
        Ok(PauliString {
            bits,
            coeff: if alive { self.coeff * other.coeff } else { T::zero() },
            alive,
        })
    }
}

impl<T: Real> PartialEq for PauliString<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.bits.n != other.bits.n {
            return false;
        }
        match (self.alive, other.alive) {
            (false, false) => true,
            (true, true) => self.bits == other.bits && self.coeff == other.coeff,
            _ => false,
        }
    }
}

impl<T: Real> From<PauliBits> for PauliString<T> {
    fn from(bits: PauliBits) -> Self {
        PauliString::new(bits, T::one())
    }
}

impl<T: Real> FromStr for PauliString<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(PauliBits::from_str(s)?.into())
    }
}

impl<T: Real> fmt::Display for PauliString<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.alive {
            return write!(f, "0");
        }
        if self.coeff != T::one() {
            write!(f, "{}*", self.coeff)?;
        }
        write!(f, "{}", self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString<f64> {
        s.parse().unwrap()
    }

    #[test]
    fn weight_counts_non_identity_factors() {
        assert_eq!(p("III").weight(), 0);
        assert_eq!(p("XIYZ").weight(), 3);
        let mut dead = p("XYZ");
        dead.annihilate();
        assert_eq!(dead.weight(), 0);
    }

    #[test]
    fn label_encoding() {
        let s = p("IXYZ");
        assert_eq!(s.get(0), PauliLabel::I);
        assert_eq!(s.get(1), PauliLabel::X);
        assert_eq!(s.get(2), PauliLabel::Y);
        assert_eq!(s.get(3), PauliLabel::Z);
        assert_eq!((s.bits().x_bit(2), s.bits().z_bit(2)), (true, true));
        assert_eq!(s.to_string(), "IXYZ");
    }

    #[test]
    fn multiply_is_phaseless_xor() {
        let xx = p("X").multiply(&p("X")).unwrap();
        assert_eq!(xx, p("I"));
        assert_eq!(xx.coeff(), 1.0);
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("Y"));
        let zero = PauliString::new("X".parse().unwrap(), 0.0);
        assert!(zero.multiply(&p("X")).unwrap().is_annihilated());
        assert!(p("XX").multiply(&p("X")).is_err());
    }

    #[test]
    fn annihilated_strings_compare_equal() {
        let mut a = p("XY");
        let mut b = p("ZI");
        a.annihilate();
        b.annihilate();
        assert_eq!(a, b);
        assert_ne!(a, p("XY"));
    }

    #[test]
    fn wide_strings_cross_word_boundaries() {
        let mut bits = PauliBits::identity(130);
        bits.set(0, PauliLabel::X);
        bits.set(64, PauliLabel::Y);
        bits.set(129, PauliLabel::Z);
        assert_eq!(bits.weight(), 3);
        assert_eq!(bits.get(64), PauliLabel::Y);
        assert_eq!(bits.support().collect::<Vec<_>>(), vec![0, 64, 129]);
        bits.clear(64);
        assert_eq!(bits.weight(), 2);
    }

    #[test]
    fn index_enumeration_covers_all_strings() {
        let all: std::collections::HashSet<_> = (0..16u64).map(|c| PauliBits::from_index(2, c)).collect();
        assert_eq!(all.len(), 16);
        assert!(PauliBits::from_index(2, 0).is_identity());
    }

    #[test]
    fn anticommutation() {
        let x: PauliBits = "XI".parse().unwrap();
        let z: PauliBits = "ZI".parse().unwrap();
        let zz: PauliBits = "ZZ".parse().unwrap();
        let xx: PauliBits = "XX".parse().unwrap();
        assert!(x.anticommutes(&z));
        assert!(!xx.anticommutes(&zz));
    }
}
