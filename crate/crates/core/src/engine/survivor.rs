//! Survivor search by tracking subspaces of inputs.
//!
//! Under a fixed error configuration the adjoint circuit acts linearly on
//! phaseless Pauli strings (as GF(2) vectors) until a string is annihilated.
//! Annihilation depends only on the label seen at each fired noise site and
//! reset qubit:
//!
//! * a fired error allows only `I`;
//! * a reset allows `I` plus every label whose Bloch component is not an
//!   exact zero.
//!
//! Allowed sets `{I}`, `{I, P}` and `{I, X, Y, Z}` are subgroups, so they cut
//! the current subspace by zero, one or two linear forms. A reset with
//! exactly one zero component allows `{I, Q, R}`, which is not a subgroup;
//! there the subspace splits into the two pieces allowing `{I, Q}` and
//! `{I, R}`. The search keeps a union of subspaces and answers whether any
//! of them still holds an element with a non-identity image at the end.
//!
//! Rows are stored column-major (one bitset over rows per x or z bit), so a
//! gate touches `2k` columns regardless of how many rows are alive.

use std::collections::HashSet;

use super::CompiledCircuit;
use crate::channels::ResetSpec;
use crate::circuit::{Circuit, ErrorConfig};
use crate::error::Result;
use crate::pauli::{LocalClifford, PauliBits, PauliLabel};
use crate::scalar::Real;

/// One generator of a surviving subspace: an input and its current image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub source: PauliBits,
    pub image: PauliBits,
}

/// Subspace of inputs that has not been annihilated, with images.
///
/// Active rows have non-identity images. Rows whose image became the
/// identity are moved to `settled`; their inputs are still alive but can no
/// longer influence anything.
#[derive(Clone, Debug)]
pub struct SurvivorBasis {
    n: usize,
    rows: usize,
    words: usize,
    // column j < n is x on qubit j, column n + j is z on qubit j
    img: Vec<u64>,
    src: Vec<u64>,
    settled: Vec<PauliBits>,
}

#[inline]
fn bit(col: &[u64], r: usize) -> bool {
    (col[r >> 6] >> (r & 63)) & 1 == 1
}

impl SurvivorBasis {
    /// All of Pauli space: generators `X_q` and `Z_q` mapped to themselves.
    pub fn full(n: usize) -> Self {
        let rows = 2 * n;
        let words = rows.div_ceil(64).max(1);
        let mut img = vec![0u64; 2 * n * words];
        for r in 0..rows {
            // row r < n is X_r, row n + q is Z_q; column index equals row index
            img[r * words + (r >> 6)] |= 1 << (r & 63);
        }
        SurvivorBasis {
            n,
            rows,
            words,
            src: img.clone(),
            img,
            settled: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Generators with non-identity image.
    pub fn active_rank(&self) -> usize {
        self.rows
    }

    /// Dimension of the whole surviving subspace.
    pub fn rank(&self) -> usize {
        self.rows + self.settled.len()
    }

    fn col(&self, j: usize) -> std::ops::Range<usize> {
        j * self.words..(j + 1) * self.words
    }

    fn extract(&self, data: &[u64], r: usize) -> PauliBits {
        let mut p = PauliBits::identity(self.n);
        for q in 0..self.n {
            let x = bit(&data[self.col(q)], r);
            let z = bit(&data[self.col(self.n + q)], r);
            p.set_bits(q, x, z);
        }
        p
    }

    pub fn active_generators(&self) -> Vec<Generator> {
        (0..self.rows)
            .map(|r| Generator {
                source: self.extract(&self.src, r),
                image: self.extract(&self.img, r),
            })
            .collect()
    }

    /// Inputs whose image is already the identity.
    pub fn settled_sources(&self) -> &[PauliBits] {
        &self.settled
    }

    fn remove_row(&mut self, r: usize) {
        let last = self.rows - 1;
        for data in [&mut self.img, &mut self.src] {
            for col in data.chunks_exact_mut(self.words) {
                let moved = bit(col, last);
                col[last >> 6] &= !(1 << (last & 63));
                if r != last {
                    let w = &mut col[r >> 6];
                    if moved {
                        *w |= 1 << (r & 63);
                    } else {
                        *w &= !(1 << (r & 63));
                    }
                }
            }
        }
        self.rows = last;
    }

    /// Rows where `fx * x_q + fz * z_q` is 1.
    fn form_mask(&self, q: usize, fx: bool, fz: bool) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        if fx {
            for (a, b) in m.iter_mut().zip(&self.img[self.col(q)]) {
                *a ^= b;
            }
        }
        if fz {
            for (a, b) in m.iter_mut().zip(&self.img[self.col(self.n + q)]) {
                *a ^= b;
            }
        }
        m
    }

    /// Intersects with the kernel of the form. Returns whether it shrank.
    fn restrict(&mut self, q: usize, fx: bool, fz: bool) -> bool {
        let mut m = self.form_mask(q, fx, fz);
        let Some(wi) = m.iter().position(|&w| w != 0) else {
            return false;
        };
        let p = wi * 64 + m[wi].trailing_zeros() as usize;
        m[wi] &= m[wi] - 1;
        let words = self.words;
        for data in [&mut self.img, &mut self.src] {
            for col in data.chunks_exact_mut(words) {
                if bit(col, p) {
                    for (c, w) in col.iter_mut().zip(&m) {
                        *c ^= w;
                    }
                }
            }
        }
        self.remove_row(p);
        true
    }

    fn allows_only(&mut self, q: usize, label: PauliLabel) {
        // kernel of the symplectic product with `label`
        let (x, z) = label.bits();
        self.restrict(q, z, x);
    }

    fn kill_qubit(&mut self, q: usize) {
        self.restrict(q, true, false);
        self.restrict(q, false, true);
    }

    fn clear_qubit(&mut self, q: usize) {
        for j in [q, self.n + q] {
            let r = self.col(j);
            self.img[r].fill(0);
        }
    }

    fn apply_adjoint(&mut self, g: &LocalClifford) {
        let qs = g.qubits();
        let k = qs.len();
        let inv = g.inverse();
        let cols: Vec<usize> = (0..2 * k)
            .map(|i| if i < k { qs[i] } else { self.n + qs[i - k] })
            .collect();
        let old: Vec<Vec<u64>> = cols.iter().map(|&c| self.img[self.col(c)].to_vec()).collect();
        for (j, &c) in cols.iter().enumerate() {
            let range = self.col(c);
            let dst = &mut self.img[range];
            dst.fill(0);
            for (i, o) in old.iter().enumerate() {
                if (inv.rows()[i] >> j) & 1 == 1 {
                    for (d, s) in dst.iter_mut().zip(o) {
                        *d ^= s;
                    }
                }
            }
        }
    }

    /// Moves identity-image rows to `settled`.
    fn settle(&mut self) {
        let mut nonzero = vec![0u64; self.words];
        for col in self.img.chunks_exact(self.words) {
            for (a, b) in nonzero.iter_mut().zip(col) {
                *a |= b;
            }
        }
        for r in (0..self.rows).rev() {
            if !bit(&nonzero, r) {
                let s = self.extract(&self.src, r);
                self.settled.push(s);
                // the swapped-in last row was already checked and is active
                self.remove_row(r);
            }
        }
    }

    /// Canonical form of the image span, which fixes all future behaviour.
    fn image_key(&self) -> Vec<Vec<u64>> {
        let width = (2 * self.n).div_ceil(64);
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut v = vec![0u64; width];
                for (j, col) in self.img.chunks_exact(self.words).enumerate() {
                    if bit(col, r) {
                        v[j >> 6] |= 1 << (j & 63);
                    }
                }
                v
            })
            .collect();
        rref(&mut rows);
        rows
    }
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + v[i].trailing_zeros() as usize)
}

/// Reduced row echelon form with pivots at the lowest set bit, sorted.
fn rref(rows: &mut Vec<Vec<u64>>) {
    let mut out: Vec<Vec<u64>> = Vec::new();
    for mut v in rows.drain(..) {
        for b in &out {
            let p = lowest_bit(b).unwrap();
            if bit(&v, p) {
                v.iter_mut().zip(b).for_each(|(a, c)| *a ^= c);
            }
        }
        let Some(p) = lowest_bit(&v) else { continue };
        for b in &mut out {
            if bit(b, p) {
                b.iter_mut().zip(&v).for_each(|(a, c)| *a ^= c);
            }
        }
        out.push(v);
    }
    out.sort_by_key(|v| lowest_bit(v));
    *rows = out;
}

/// Per-layer size of the tracked union.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerStats {
    /// Circuit layer whose adjoint was just applied.
    pub layer: usize,
    pub branches: usize,
    pub max_active_rank: usize,
}

/// Full outcome of the subspace search.
#[derive(Clone, Debug)]
pub struct SurvivorAnalysis {
    pub survived: bool,
    /// Subspaces still holding an active row, in deterministic order.
    pub branches: Vec<SurvivorBasis>,
    pub history: Vec<LayerStats>,
    pub peak_branches: usize,
}

fn apply_reset<T: Real>(branches: Vec<SurvivorBasis>, r: &ResetSpec<T>) -> Vec<SurvivorBasis> {
    let q = r.qubit;
    let zero = r.bloch.exact_zero_flags();
    let allowed: Vec<PauliLabel> = [PauliLabel::X, PauliLabel::Y, PauliLabel::Z]
        .into_iter()
        .zip(zero)
        .filter(|&(_, z)| !z)
        .map(|(l, _)| l)
        .collect();
    let mut out = Vec::with_capacity(branches.len());
    for mut v in branches {
        match allowed.len() {
            3 => out.push(v),
            2 => {
                let (a, b) = (allowed[0], allowed[1]);
                let (ax, az) = a.bits();
                let (bx, bz) = b.bits();
                let fits_a = v.form_mask(q, az, ax).iter().all(|&w| w == 0);
                let fits_b = v.form_mask(q, bz, bx).iter().all(|&w| w == 0);
                if fits_a || fits_b {
                    out.push(v);
                } else {
                    let mut w = v.clone();
                    v.allows_only(q, a);
                    w.allows_only(q, b);
                    out.push(v);
                    out.push(w);
                }
            }
            1 => {
                v.allows_only(q, allowed[0]);
                out.push(v);
            }
            _ => {
                v.kill_qubit(q);
                out.push(v);
            }
        }
    }
    for v in &mut out {
        v.clear_qubit(q);
    }
    out
}

fn run<T: Real>(c: &CompiledCircuit<T>, b: &ErrorConfig, dedupe: bool, record: bool) -> SurvivorAnalysis {
    let mut branches = vec![SurvivorBasis::full(c.num_qubits())];
    let mut history = Vec::new();
    let mut peak = 1;
    for l in (0..c.depth()).rev() {
        let layer = c.layer(l);
        for q in b.fired_in(l) {
            for v in &mut branches {
                v.kill_qubit(q);
            }
        }
        for r in &layer.resets {
            branches = apply_reset(branches, r);
            peak = peak.max(branches.len());
        }
        for v in &mut branches {
            for g in &layer.gates {
                v.apply_adjoint(g);
            }
            v.settle();
        }
        branches.retain(|v| v.active_rank() > 0);
        if dedupe && branches.len() > 1 {
            let mut seen = HashSet::new();
            branches.retain(|v| seen.insert(v.image_key()));
        }
        if record {
            history.push(LayerStats {
                layer: l,
                branches: branches.len(),
                max_active_rank: branches.iter().map(|v| v.active_rank()).max().unwrap_or(0),
            });
        }
        if branches.is_empty() {
            break;
        }
    }
    SurvivorAnalysis {
        survived: !branches.is_empty(),
        branches,
        history,
        peak_branches: peak,
    }
}

impl<T: Real> CompiledCircuit<T> {
    /// Whether some non-identity input survives `b`.
    pub fn any_survivor(&self, b: &ErrorConfig) -> bool {
        run(self, b, true, false).survived
    }
}

/// Whether some non-identity input survives configuration `b`, without
/// enumerating inputs.
pub fn any_survivor_fast<T: Real>(c: &Circuit<T>, b: &ErrorConfig) -> Result<bool> {
    b.check_matches(c)?;
    Ok(CompiledCircuit::new(c)?.any_survivor(b))
}

/// Runs the subspace search keeping every branch and its inputs, so the
/// union of branches describes the full set of surviving inputs.
pub fn survivor_analysis<T: Real>(c: &Circuit<T>, b: &ErrorConfig) -> Result<SurvivorAnalysis> {
    b.check_matches(c)?;
    Ok(run(&CompiledCircuit::new(c)?, b, false, true))
}
