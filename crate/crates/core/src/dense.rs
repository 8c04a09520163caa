//! Small dense complex linear algebra used by oracles and by local gates.
//!
//! Qubit ordering is big-endian: site 0 is the most significant bit of a
//! computational-basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::pauli::{Pauli, PauliString};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_1q(letter: Pauli) -> CMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match letter {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn i_pow(e: u8) -> C64 {
    match e & 3 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

/// Full `2^n x 2^n` matrix of a Pauli string, including its phase.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, i_pow(p.phase()));
    for k in 0..p.n() {
        m = kron(&m, &pauli_1q(p.letter(k)));
    }
    m
}

/// Applies the Pauli string to a state vector without building its matrix.
pub fn apply_pauli(p: &PauliString, v: &CVector) -> CVector {
    let n = p.n();
    let dim = v.len();
    debug_assert_eq!(dim, 1 << n);
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    let mut ny = 0u8;
    for k in 0..n {
        let bit = 1 << (n - 1 - k);
        if p.x_bit(k) {
            xmask |= bit;
        }
        if p.z_bit(k) {
            zmask |= bit;
        }
        if p.x_bit(k) && p.z_bit(k) {
            ny = ny.wrapping_add(1);
        }
    }
    // Y = i X Z, so P = i^(phase + #Y) X^x Z^z.
    let global = i_pow(p.phase().wrapping_add(ny & 3));
    let mut out = CVector::zeros(dim);
    for b in 0..dim {
        let sign = if (b & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ xmask] = v[b] * global * sign;
    }
    out
}

/// Embeds a `2^k x 2^k` operator acting on `sites` into an `n`-qubit operator.
pub fn embed(op: &CMatrix, sites: &[usize], n: usize) -> CMatrix {
    let k = sites.len();
    let dim = 1usize << n;
    let mut full = CMatrix::zeros(dim, dim);
    let local_index = |b: usize| -> usize {
        sites.iter().fold(0usize, |acc, &s| (acc << 1) | ((b >> (n - 1 - s)) & 1))
    };
    let mut rest_mask = dim - 1;
    for &s in sites {
        rest_mask &= !(1 << (n - 1 - s));
    }
    for col in 0..dim {
        let lc = local_index(col);
        for lr in 0..(1usize << k) {
            let amp = op[(lr, lc)];
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let mut row = col & rest_mask;
            for (j, &s) in sites.iter().enumerate() {
                if (lr >> (k - 1 - j)) & 1 == 1 {
                    row |= 1 << (n - 1 - s);
                }
            }
            full[(row, col)] += amp;
        }
    }
    full
}

/// Applies a `2^k x 2^k` operator on `sites` to an `n`-qubit state vector.
pub fn apply_local(op: &CMatrix, sites: &[usize], n: usize, v: &CVector) -> CVector {
    let k = sites.len();
    let dim = 1usize << n;
    let mut mask = 0usize;
    for &s in sites {
        mask |= 1 << (n - 1 - s);
    }
    let scatter = |base: usize, local: usize| -> usize {
        let mut idx = base;
        for (j, &s) in sites.iter().enumerate() {
            if (local >> (k - 1 - j)) & 1 == 1 {
                idx |= 1 << (n - 1 - s);
            }
        }
        idx
    };
    let mut out = CVector::zeros(dim);
    let mut buf = vec![C64::new(0.0, 0.0); 1 << k];
    for base in 0..dim {
        if base & mask != 0 {
            continue;
        }
        for (l, slot) in buf.iter_mut().enumerate() {
            *slot = v[scatter(base, l)];
        }
        for r in 0..(1usize << k) {
            let mut acc = C64::new(0.0, 0.0);
            for (l, &b) in buf.iter().enumerate() {
                acc += op[(r, l)] * b;
            }
            out[scatter(base, r)] = acc;
        }
    }
    out
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.nrows(), u.ncols());
    (u.adjoint() * u - id).norm()
}

/// `min_phi || a - e^{i phi} b ||` for two vectors.
pub fn distance_up_to_phase(a: &CVector, b: &CVector) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    (a - b * phase).norm()
}

pub fn basis_state(n: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(1 << n);
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Kronecker product of single-qubit states, site 0 first.
pub fn product_vector(states: &[[C64; 2]]) -> CVector {
    let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
    for s in states {
        let q = CVector::from_column_slice(s);
        v = v.kronecker(&q);
    }
    v
}

pub fn h_matrix() -> CMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)])
}

pub fn s_matrix() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

/// `exp(-i angle P)` for a Hermitian Pauli string.
pub fn pauli_exponential(p: &PauliString, angle: f64) -> CMatrix {
    let dim = 1usize << p.n();
    CMatrix::identity(dim, dim) * c(angle.cos(), 0.0) - pauli_matrix(p) * c(0.0, angle.sin())
}

/// Reduced density matrix of the last qubit of a normalized state.
pub fn reduced_last_qubit(v: &CVector) -> CMatrix {
    let mut rho = CMatrix::zeros(2, 2);
    let half = v.len() / 2;
    for rest in 0..half {
        for a in 0..2 {
            for b in 0..2 {
                rho[(a, b)] += v[2 * rest + a] * v[2 * rest + b].conj();
            }
        }
    }
    rho
}

/// Von Neumann entropy (bits) of the bipartition `[0, cut] | (cut, n)`.
pub fn cut_entropy(v: &CVector, n: usize, cut: usize) -> f64 {
    let rows = 1usize << (cut + 1);
    let cols = 1usize << (n - cut - 1);
    let m = CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c]);
    let sv = m.singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    sv.iter()
        .map(|s| s * s / total)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum()
}
