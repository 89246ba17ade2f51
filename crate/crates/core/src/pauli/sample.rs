//! Uniform sampling of the symplectic group Sp(2k, GF(2)).
//!
//! Uses the Koenig–Smolin transvection construction: an index in
//! `0..|Sp(2k)|` is decoded as a mixed-radix number, one digit pair per
//! recursion level, and each level fixes the image of one symplectic pair via
//! at most four transvections. Internally vectors are interleaved
//! (`bit 2i = x_i`, `bit 2i + 1 = z_i`).

use rand::Rng;

use super::tableau::SymplecticMatrix;
use super::CliffordTableau;

const EVEN: u64 = 0x5555_5555_5555_5555;

fn inner(v: u64, w: u64) -> bool {
    let (vx, vz) = (v & EVEN, (v >> 1) & EVEN);
    let (wx, wz) = (w & EVEN, (w >> 1) & EVEN);
    ((vx & wz) ^ (vz & wx)).count_ones() & 1 == 1
}

fn transvection(k: u64, v: u64) -> u64 {
    if inner(k, v) {
        v ^ k
    } else {
        v
    }
}

fn pair(v: u64, i: usize) -> (u64, u64) {
    ((v >> (2 * i)) & 1, (v >> (2 * i + 1)) & 1)
}

/// Finds `h1, h2` with `y = Z_h1 Z_h2 x`.
fn find_transvection(x: u64, y: u64, n: usize) -> (u64, u64) {
    if x == y {
        return (0, 0);
    }
    if inner(x, y) {
        return (x ^ y, 0);
    }
    let mut z = 0u64;
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) != 0 && (y0 | y1) != 0 {
            let mut z0 = x0 ^ y0;
            let mut z1 = x1 ^ y1;
            if z0 == 0 && z1 == 0 {
                z1 = 1;
                if x0 != x1 {
                    z0 = 1;
                }
            }
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            return (x ^ z, y ^ z);
        }
    }
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) != 0 && (y0 | y1) == 0 {
            let (z0, z1) = if x0 == x1 { (0, 1) } else { (x1, x0) };
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            break;
        }
    }
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) == 0 && (y0 | y1) != 0 {
            let (z0, z1) = if y0 == y1 { (0, 1) } else { (y1, y0) };
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            break;
        }
    }
    (x ^ z, y ^ z)
}

/// Builds interleaved rows; `draw(m)` supplies a digit in `0..m`.
fn build(n: usize, draw: &mut dyn FnMut(u128) -> u128) -> Vec<u64> {
    let nn = 2 * n;
    let s = (1u128 << nn) - 1;
    let mut f1 = (draw(s) + 1) as u64;
    let e1 = 1u64;
    let (t0, t1) = find_transvection(e1, f1, n);
    let bits = draw(1u128 << (nn - 1)) as u64;
    let eprime = e1 | ((bits >> 1) << 2);
    let h0 = transvection(t1, transvection(t0, eprime));
    if bits & 1 == 1 {
        f1 = 0;
    }
    let mut g: Vec<u64> = vec![0b01, 0b10];
    if n > 1 {
        g.extend(build(n - 1, draw).into_iter().map(|r| r << 2));
    }
    for row in &mut g {
        let mut r = transvection(t0, *row);
        r = transvection(t1, r);
        r = transvection(h0, r);
        r = transvection(f1, r);
        *row = r;
    }
    g
}

fn deinterleave(n: usize, rows: Vec<u64>) -> SymplecticMatrix {
    let convert = |v: u64| {
        let mut out = 0u64;
        for i in 0..n {
            out |= ((v >> (2 * i)) & 1) << i;
            out |= ((v >> (2 * i + 1)) & 1) << (n + i);
        }
        out
    };
    // interleaved row 2i is the image of X_i, row 2i+1 the image of Z_i
    let mut out = vec![0u64; 2 * n];
    for (j, v) in rows.into_iter().enumerate() {
        let slot = if j % 2 == 0 { j / 2 } else { n + j / 2 };
        out[slot] = convert(v);
    }
    SymplecticMatrix::from_rows(n, out).expect("transvection construction yields symplectic matrices")
}

/// `|Sp(2k, GF(2))|`, or `None` on overflow.
pub fn symplectic_group_order(k: usize) -> Option<u128> {
    let mut order: u128 = 1;
    for m in 1..=k {
        let level = ((1u128 << (2 * m)) - 1).checked_mul(1u128 << (2 * m - 1))?;
        order = order.checked_mul(level)?;
    }
    Some(order)
}

/// Decodes `index` (taken modulo the group order) into a group element.
/// Distinct indices below the order give distinct elements.
pub fn symplectic_from_index(k: usize, index: u128) -> SymplecticMatrix {
    assert!((1..=10).contains(&k), "index decoding supports 1..=10 qubits");
    let mut rest = index % symplectic_group_order(k).expect("order fits for k <= 10");
    let mut draw = |m: u128| {
        let d = rest % m;
        rest /= m;
        d
    };
    deinterleave(k, build(k, &mut draw))
}

/// Uniformly random element of Sp(2k, GF(2)).
pub fn random_symplectic<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SymplecticMatrix {
    assert!((1..=super::MAX_LOCAL_QUBITS).contains(&k));
    let mut draw = |m: u128| rng.random_range(0..m);
    deinterleave(k, build(k, &mut draw))
}

/// Uniformly random two-qubit Clifford modulo phases and Pauli signs.
pub fn random_two_qubit_clifford<R: Rng + ?Sized>(rng: &mut R) -> CliffordTableau {
    let m = random_symplectic(2, rng);
    CliffordTableau::from_symplectic(2, &[0, 1], &m).expect("two-qubit embedding")
}
