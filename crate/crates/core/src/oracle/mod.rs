//! Dense density-matrix simulation for small registers: ground truth for
//! trace distances, channel adjoints and the survival bound.

mod checks;
pub mod dense;

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

use crate::circuit::{Circuit, ErrorConfig};
use crate::error::{Error, Result};
use crate::pauli::PauliBits;
use crate::scalar::Real;
use dense::{apply_circuit, CMatrix, NoiseMode};

pub use checks::{
    check_lemma1, dense_adjoint_pauli, dense_channel_adjoint_check, mixture_deviation, AdjointDeviation, BoundMethod,
    ChannelSpec, Lemma1Options, Lemma1Report,
};

/// Largest register simulated densely.
pub const DEFAULT_DENSE_CAP: usize = 7;

/// Hermitian, unit-trace, positive semidefinite `2^n x 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T = f64> {
    n: usize,
    m: CMatrix<T>,
}

pub(crate) fn check_dense_cap(n: usize) -> Result<()> {
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense simulation qubits",
            requested: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    Ok(())
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `m` against the density-matrix invariants.
    pub fn new(n: usize, m: CMatrix<T>) -> Result<Self> {
        let rho = DensityMatrix { n, m };
        rho.check()?;
        Ok(rho)
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(n: usize, amplitudes: &[Complex<T>]) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::NotDensityMatrix(format!(
                "{} amplitudes for {n} qubits",
                amplitudes.len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if num_traits::Float::abs(norm - T::one()).as_f64() > T::TRACE_TOL.sqrt() {
            return Err(Error::NotDensityMatrix(format!("state vector has norm {norm}")));
        }
        let v = v.unscale(norm);
        Self::new(n, &v * v.adjoint())
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::InvalidArgument(format!("basis index {index} for {n} qubits")))? =
            Complex::new(T::one(), T::zero());
        Self::pure(n, &amps)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1 << n;
        let w = T::one() / T::lit(dim as f64);
        DensityMatrix {
            n,
            m: CMatrix::<T>::identity(dim, dim).map(|v| v * w),
        }
    }

    /// Haar-random pure state.
    pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut amps: Vec<Complex<T>> = (0..1 << n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        let norm = num_traits::Float::sqrt(amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b));
        for a in &mut amps {
            *a /= Complex::new(norm, T::zero());
        }
        let v = nalgebra::DVector::from_vec(amps);
        DensityMatrix { n, m: &v * v.adjoint() }
    }

    /// Mixture of `components` Haar-random pure states with uniformly drawn,
    /// normalized weights.
    pub fn random_mixture<R: Rng + ?Sized>(n: usize, components: usize, rng: &mut R) -> Self {
        let components = components.max(1);
        let weights: Vec<f64> = (0..components).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        let dim = 1 << n;
        let mut m = CMatrix::<T>::zeros(dim, dim);
        for w in weights {
            let psi = Self::random_pure(n, rng);
            m += psi.m.map(|v| v * T::lit(w / total));
        }
        DensityMatrix { n, m }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn trace(&self) -> Complex<T> {
        dense::trace(&self.m)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(T::infinity(), |a, b| num_traits::Float::min(a, b))
    }

    /// `Tr(rho P)`; real for Hermitian `rho`.
    pub fn expectation(&self, p: &PauliBits) -> Result<T> {
        p.check_len(self.n)?;
        Ok(dense::hs_inner(&dense::pauli_matrix(p), &self.m).re)
    }

    /// Checks shape, Hermiticity, unit trace and positivity.
    pub fn check(&self) -> Result<()> {
        let dim = 1usize << self.n;
        if self.m.nrows() != dim || self.m.ncols() != dim {
            return Err(Error::NotDensityMatrix(format!(
                "{}x{} matrix for {} qubits",
                self.m.nrows(),
                self.m.ncols(),
                self.n
            )));
        }
        let tol = T::lit(T::TRACE_TOL);
        let asym = (&self.m - self.m.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| num_traits::Float::max(a, b));
        if asym > tol {
            return Err(Error::NotDensityMatrix(format!("not Hermitian (deviation {asym})")));
        }
        let tr = self.trace();
        if (tr - Complex::new(T::one(), T::zero())).norm() > tol {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -T::lit(T::PSD_TOL) {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    fn from_output(n: usize, m: CMatrix<T>) -> Result<Self> {
        DensityMatrix::new(n, m).map_err(|e| Error::NotDensityMatrix(format!("channel output invalid: {e}")))
    }

    /// Parses `{"n": .., "matrix": [[entry, ..], ..]}` or
    /// `{"n": .., "amplitudes": [entry, ..]}`, where an entry is a real
    /// number or a `[re, im]` pair.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s)?;
        check_dense_cap(file.n)?;
        let cx = |e: &Entry| {
            let (re, im) = e.parts();
            Complex::new(T::lit(re), T::lit(im))
        };
        match (file.matrix, file.amplitudes) {
            (Some(rows), None) => {
                let dim = 1 << file.n;
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::NotDensityMatrix(format!("matrix must be {dim}x{dim}")));
                }
                let entries: Vec<Complex<T>> = rows.iter().flatten().map(cx).collect();
                Self::new(file.n, DMatrix::from_row_slice(dim, dim, &entries))
            }
            (None, Some(amps)) => Self::pure(file.n, &amps.iter().map(cx).collect::<Vec<_>>()),
            _ => Err(Error::InvalidArgument(
                "state file needs exactly one of `matrix` or `amplitudes`".into(),
            )),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn parts(&self) -> (f64, f64) {
        match *self {
            Entry::Real(re) => (re, 0.0),
            Entry::Complex([re, im]) => (re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: usize,
    #[serde(default)]
    matrix: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    amplitudes: Option<Vec<Entry>>,
}

fn check_state<T: Real>(c: &Circuit<T>, rho: &DensityMatrix<T>) -> Result<()> {
    check_dense_cap(c.num_qubits())?;
    c.ensure_valid()?;
    if rho.n != c.num_qubits() {
        return Err(Error::SizeMismatch {
            expected: c.num_qubits(),
            found: rho.n,
        });
    }
    Ok(())
}

/// Output of the noisy circuit: gates, resets, then `N_gamma` on every
/// qubit, layer by layer.
pub fn evolve<T: Real>(c: &Circuit<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    check_state(c, rho)?;
    DensityMatrix::from_output(rho.n, apply_circuit(c, NoiseMode::Average, &rho.m))
}

/// Output of the circuit with the fired error wherever `b` fires and no
/// noise elsewhere.
pub fn evolve_config<T: Real>(c: &Circuit<T>, b: &ErrorConfig, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    check_state(c, rho)?;
    b.check_matches(c)?;
    DensityMatrix::from_output(rho.n, apply_circuit(c, NoiseMode::Config(b), &rho.m))
}

/// `||rho - sigma||_1`, the sum of absolute eigenvalues of the difference
/// (between 0 and 2).
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.n != sigma.n {
        return Err(Error::SizeMismatch {
            expected: rho.n,
            found: sigma.n,
        });
    }
    let diff = &rho.m - &sigma.m;
    Ok(diff
        .symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |a, &b| a + num_traits::Float::abs(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{Bloch, NoiseModel, ResetSpec};
    use crate::circuit::{idle_circuit, Layer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reset_replaces_state() {
        let c = Circuit::<f64>::new(
            1,
            NoiseModel::noiseless(),
            vec![Layer::new(vec![], vec![ResetSpec::new(0, Bloch::zero_state())])],
        );
        let out = evolve(&c, &DensityMatrix::basis(1, 1).unwrap()).unwrap();
        assert!(trace_distance(&out, &DensityMatrix::basis(1, 0).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn idle_decay_closed_form() {
        let (g, d) = (0.3, 4);
        let c = idle_circuit::<f64>(1, d, g).unwrap();
        let out = evolve(&c, &DensityMatrix::basis(1, 0).unwrap()).unwrap();
        let f = (1.0f64 - g).powi(d as i32);
        assert!((out.matrix()[(0, 0)].re - (1.0 + f) / 2.0).abs() < 1e-12);
        assert!((out.matrix()[(1, 1)].re - (1.0 - f) / 2.0).abs() < 1e-12);
        let other = evolve(&c, &DensityMatrix::basis(1, 1).unwrap()).unwrap();
        assert!((trace_distance(&out, &other).unwrap() - 2.0 * f).abs() < 1e-12);
    }

    #[test]
    fn fired_everywhere_gives_mixed() {
        let c = idle_circuit::<f64>(1, 1, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityMatrix::random_mixture(1, 2, &mut rng);
        let out = evolve_config(&c, &ErrorConfig::all(1, 1), &rho).unwrap();
        assert!(trace_distance(&out, &DensityMatrix::maximally_mixed(1)).unwrap() < 1e-12);
    }

    #[test]
    fn trace_distance_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = DensityMatrix::<f64>::random_mixture(2, 3, &mut rng);
        assert!(rho.check().is_ok());
        assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-12);
        let a = DensityMatrix::<f64>::basis(2, 1).unwrap();
        let b = DensityMatrix::<f64>::basis(2, 2).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        assert!(trace_distance(&a, &DensityMatrix::basis(1, 0).unwrap()).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let bad = CMatrix::<f64>::identity(2, 2);
        assert!(DensityMatrix::new(1, bad).is_err());
        let neg = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.5, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(-0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(1, neg).is_err());
        assert!(DensityMatrix::<f64>::pure(1, &[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn state_json_forms() {
        let a = DensityMatrix::<f64>::from_json(r#"{"n": 1, "amplitudes": [0.6, [0, 0.8]]}"#).unwrap();
        assert!((a.expectation(&"Z".parse().unwrap()).unwrap() - (0.36 - 0.64)).abs() < 1e-12);
        let m = DensityMatrix::<f64>::from_json(r#"{"n": 1, "matrix": [[0.5, 0.5], [0.5, 0.5]]}"#).unwrap();
        assert!((m.expectation(&"X".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::<f64>::from_json(r#"{"n": 1}"#).is_err());
        assert!(DensityMatrix::<f64>::from_json(r#"{"n": 9, "amplitudes": []}"#)
            .unwrap_err()
            .is_cap());
    }

    #[test]
    fn dense_cap_enforced() {
        let c = idle_circuit::<f64>(8, 1, 0.1).unwrap();
        let rho = DensityMatrix::maximally_mixed(8);
        assert!(evolve(&c, &rho).unwrap_err().is_cap());
    }
}
