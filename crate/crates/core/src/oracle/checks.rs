//! Dense cross-checks of the combinatorial picture.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::dense::{self, apply_circuit, CMatrix, NoiseMode};
use super::{evolve, evolve_config, trace_distance, DensityMatrix};
use crate::channels::{depolarize_error_adjoint, reset_adjoint, Bloch, ResetSpec};
use crate::circuit::{Circuit, ErrorConfig};
use crate::engine::{survival_probability, survival_probability_exact_with_cap, McOptions, DEFAULT_EXACT_SITE_CAP};
use crate::error::{Error, Result};
use crate::harness::wilson_upper;
use crate::pauli::{Gate, NamedGate, PauliBits, PauliString, SymplecticMatrix};
use crate::scalar::Real;

/// Largest register for which the full Heisenberg-picture coefficient
/// vector (`4^n` entries, one dense evolution each) is built.
const DENSE_ADJOINT_CAP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Exact,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// `||Phi(rho) - Phi(sigma)||_1`.
    pub lhs: f64,
    /// Twice the survival probability, or twice its upper confidence bound.
    pub rhs: f64,
    pub holds: bool,
    pub method: BoundMethod,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Options {
    /// Noise sites up to which the survival probability is enumerated.
    pub site_cap: usize,
    pub trials: u64,
    pub seed: u64,
    /// One-sided level of the upper bound used in sampling mode.
    pub confidence: f64,
}

impl Default for Lemma1Options {
    fn default() -> Self {
        Lemma1Options {
            site_cap: DEFAULT_EXACT_SITE_CAP,
            trials: 100_000,
            seed: 0,
            confidence: 0.99,
        }
    }
}

/// Compares the output trace distance of two inputs with twice the
/// probability that some Pauli survives. Equality cases are accepted up to
/// the scalar's oracle tolerance.
pub fn check_lemma1<T: Real>(
    c: &Circuit<T>,
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    opts: &Lemma1Options,
) -> Result<Lemma1Report> {
    let lhs = trace_distance(&evolve(c, rho)?, &evolve(c, sigma)?)?.as_f64();
    let (rhs, method) = if c.noise_sites() <= opts.site_cap.min(DEFAULT_EXACT_SITE_CAP) {
        (
            2.0 * survival_probability_exact_with_cap(c, opts.site_cap)?.as_f64(),
            BoundMethod::Exact,
        )
    } else {
        let mut mc = McOptions::new(opts.trials, opts.seed);
        mc.confidence = opts.confidence;
        let est = survival_probability(c, &mc)?;
        (
            2.0 * wilson_upper(est.survivors, est.trials, opts.confidence)?,
            BoundMethod::Mc,
        )
    };
    Ok(Lemma1Report {
        lhs,
        rhs,
        holds: lhs <= rhs + T::ORACLE_TOL,
        method,
    })
}

/// Coefficients of `Phi^dagger(s)` (or `Phi_b^dagger(s)` when `b` is given)
/// in the Pauli basis, indexed like [`PauliBits::from_index`]. Built from the
/// transpose of the forward transfer matrix: entry `j` is
/// `Tr(s Phi(P_j)) / 2^n`.
pub fn dense_adjoint_pauli<T: Real>(c: &Circuit<T>, b: Option<&ErrorConfig>, s: &PauliBits) -> Result<Vec<T>> {
    let n = c.num_qubits();
    if n > DENSE_ADJOINT_CAP {
        return Err(Error::CapExceeded {
            what: "dense adjoint qubits",
            requested: n,
            cap: DENSE_ADJOINT_CAP,
        });
    }
    c.ensure_valid()?;
    s.check_len(n)?;
    if let Some(b) = b {
        b.check_matches(c)?;
    }
    let mode = b.map_or(NoiseMode::Average, NoiseMode::Config);
    let ps = dense::pauli_matrix::<T>(s);
    let scale = T::lit((1u64 << n) as f64);
    Ok((0..1u64 << (2 * n))
        .map(|j| {
            let out = apply_circuit(c, mode, &dense::pauli_matrix(&PauliBits::from_index(n, j)));
            dense::hs_inner(&ps, &out).re / scale
        })
        .collect())
}

/// Max entrywise gap between the binomially weighted average of
/// `evolve_config` over every error configuration and `evolve`.
pub fn mixture_deviation<T: Real>(c: &Circuit<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let sites = c.noise_sites();
    if sites > DEFAULT_EXACT_SITE_CAP {
        return Err(Error::CapExceeded {
            what: "noise sites for configuration mixture",
            requested: sites,
            cap: DEFAULT_EXACT_SITE_CAP,
        });
    }
    let full = evolve(c, rho)?;
    let dim = 1 << c.num_qubits();
    let mut acc = CMatrix::<T>::zeros(dim, dim);
    for code in 0..1u64 << sites {
        let b = ErrorConfig::from_index(c.num_qubits(), c.depth(), code);
        let p = b.probability(c.gamma());
        if p == T::zero() {
            continue;
        }
        acc += evolve_config(c, &b, rho)?.matrix().map(|v| v * p);
    }
    Ok((acc - full.matrix())
        .iter()
        .fold(T::zero(), |a, v| num_traits::Float::max(a, v.norm())))
}

/// A single- or two-qubit channel whose adjoint can be checked densely.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec<T = f64> {
    Depolarizing(T),
    FiredError,
    Reset(Bloch<T>),
    Gate(NamedGate),
    Tableau(SymplecticMatrix),
}

impl<T: Real> ChannelSpec<T> {
    pub fn num_qubits(&self) -> usize {
        match self {
            ChannelSpec::Gate(g) => g.arity(),
            ChannelSpec::Tableau(m) => m.width(),
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ChannelSpec::Depolarizing(g) => format!("depolarizing({g})"),
            ChannelSpec::FiredError => "fired-error".into(),
            ChannelSpec::Reset(b) => {
                let [x, y, z] = b.components();
                format!("reset({x}, {y}, {z})")
            }
            ChannelSpec::Gate(g) => g.name().into(),
            ChannelSpec::Tableau(_) => "tableau".into(),
        }
    }

    fn forward(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let k = self.num_qubits();
        let qs: Vec<usize> = (0..k).collect();
        match self {
            ChannelSpec::Depolarizing(g) => dense::depolarize(m, 1, 0, *g),
            ChannelSpec::FiredError => dense::fired_error(m, 1, 0),
            ChannelSpec::Reset(b) => dense::replace_qubit(m, 1, 0, &dense::bloch_matrix(b)),
            ChannelSpec::Gate(g) => dense::conjugate_by(m, k, &qs, &dense::named_unitary(*g)),
            ChannelSpec::Tableau(t) => dense::conjugate_by(m, k, &qs, &dense::tableau_unitary(t)),
        }
    }

    fn kraus(&self) -> Vec<CMatrix<T>> {
        match self {
            ChannelSpec::Depolarizing(g) => dense::depolarizing_kraus(*g),
            ChannelSpec::FiredError => dense::depolarizing_kraus(T::one()),
            ChannelSpec::Reset(b) => dense::reset_kraus(b),
            ChannelSpec::Gate(g) => vec![dense::named_unitary(*g)],
            ChannelSpec::Tableau(t) => vec![dense::tableau_unitary(t)],
        }
    }

    /// The crate's combinatorial adjoint of `p` as `(coefficient, image)`,
    /// empty when annihilated, and whether the sign is meaningful.
    fn combinatorial(&self, p: &PauliBits) -> (Vec<(T, PauliBits)>, bool) {
        let s: PauliString<T> = p.clone().into();
        let one = |q: PauliString<T>| -> Vec<(T, PauliBits)> {
            if q.is_annihilated() {
                vec![]
            } else {
                vec![(q.coeff(), q.bits().clone())]
            }
        };
        match self {
            ChannelSpec::Depolarizing(g) => {
                // E_b: (1 - g) times the identity map plus g times D^dagger
                let mut out: Vec<(T, PauliBits)> = vec![(T::one() - *g, p.clone())];
                for (c, q) in one(depolarize_error_adjoint(&s, 0).expect("qubit 0")) {
                    out.push((c * *g, q));
                }
                (out, true)
            }
            ChannelSpec::FiredError => (one(depolarize_error_adjoint(&s, 0).expect("qubit 0")), true),
            ChannelSpec::Reset(b) => (one(reset_adjoint(&s, &ResetSpec::new(0, *b)).expect("qubit 0")), true),
            ChannelSpec::Gate(_) | ChannelSpec::Tableau(_) => {
                let k = self.num_qubits();
                let qs: Vec<usize> = (0..k).collect();
                let gate = match self {
                    ChannelSpec::Gate(g) => Gate::named(*g, &qs),
                    ChannelSpec::Tableau(t) => Gate::tableau(&qs, t.clone()),
                    _ => unreachable!(),
                };
                let mut img = p.clone();
                gate.compile(k).expect("local gate").conjugate_adjoint(&mut img);
                (vec![(T::one(), img)], false)
            }
        }
    }
}

/// Largest deviations found by [`dense_channel_adjoint_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdjointDeviation {
    /// `max |T(N^dagger) - T(N)^T|`, adjoint taken from the Kraus form.
    pub ptm_transpose: f64,
    /// `max |<X, N(Y)> - <N^dagger(X), Y>|` over Pauli pairs and a few
    /// random matrices.
    pub inner_product: f64,
    /// Gap between the dense adjoint and the crate's Pauli-string adjoint
    /// (magnitudes only for gates, whose signs are not tracked).
    pub combinatorial: f64,
}

impl AdjointDeviation {
    pub fn max(&self) -> f64 {
        self.ptm_transpose.max(self.inner_product).max(self.combinatorial)
    }
}

fn ptm<T: Real>(k: usize, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> DMatrix<T> {
    let dim = 1usize << (2 * k);
    let scale = T::lit((1u64 << k) as f64);
    let paulis: Vec<CMatrix<T>> = (0..dim as u64)
        .map(|i| dense::pauli_matrix(&PauliBits::from_index(k, i)))
        .collect();
    let mut t = DMatrix::<T>::zeros(dim, dim);
    for (j, pj) in paulis.iter().enumerate() {
        let out = f(pj);
        for (i, pi) in paulis.iter().enumerate() {
            t[(i, j)] = dense::hs_inner(pi, &out).re / scale;
        }
    }
    t
}

/// Builds dense transfer matrices of `spec` and of its Kraus-form adjoint
/// and measures how far they are from the adjoint relations.
pub fn dense_channel_adjoint_check<T: Real>(spec: &ChannelSpec<T>) -> AdjointDeviation {
    let k = spec.num_qubits();
    let kraus = spec.kraus();
    let forward = ptm(k, |m| spec.forward(m));
    let backward = ptm(k, |m| dense::kraus_adjoint(&kraus, m));
    let ptm_transpose = (&backward - forward.transpose())
        .iter()
        .fold(0.0f64, |a, v| a.max(v.as_f64().abs()));

    let dim = 1usize << k;
    let mut grid: Vec<CMatrix<T>> = (0..1u64 << (2 * k))
        .map(|i| dense::pauli_matrix(&PauliBits::from_index(k, i)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..4 {
        grid.push(CMatrix::<T>::from_fn(dim, dim, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(T::lit(re), T::lit(im))
        }));
    }
    let mut inner_product = 0.0f64;
    for x in &grid {
        let adj = dense::kraus_adjoint(&kraus, x);
        for y in &grid {
            let lhs = dense::hs_inner(x, &spec.forward(y));
            let rhs = dense::hs_inner(&adj, y);
            inner_product = inner_product.max((lhs - rhs).norm().as_f64());
        }
    }

    let mut combinatorial = 0.0f64;
    for i in 0..1u64 << (2 * k) {
        let p = PauliBits::from_index(k, i);
        let (terms, signed) = spec.combinatorial(&p);
        let mut expected = vec![T::zero(); 1 << (2 * k)];
        for (c, q) in terms {
            let j = (0..k).fold(0usize, |v, qq| {
                v | ((q.x_bit(qq) as usize) << (2 * qq)) | ((q.z_bit(qq) as usize) << (2 * qq + 1))
            });
            expected[j] += c;
        }
        for (j, e) in expected.iter().enumerate() {
            let d = backward[(j, i as usize)];
            let gap = if signed {
                (d - *e).as_f64().abs()
            } else {
                (d.as_f64().abs() - e.as_f64().abs()).abs()
            };
            combinatorial = combinatorial.max(gap);
        }
    }
    AdjointDeviation {
        ptm_transpose,
        inner_product,
        combinatorial,
    }
}
