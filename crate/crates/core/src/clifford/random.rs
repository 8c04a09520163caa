//! Uniform sampling from the Clifford group (Bravyi–Maslov canonical form).

use rand::Rng;

use super::CliffordTableau;
use crate::pauli::PauliString;

type BitMatrix = Vec<Vec<u8>>;

fn zeros(n: usize) -> BitMatrix {
    vec![vec![0; n]; n]
}

fn eye(n: usize) -> BitMatrix {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn matmul(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![0u8; c]; r];
    for i in 0..r {
        for l in 0..k {
            if a[i][l] == 1 {
                for j in 0..c {
                    out[i][j] ^= b[l][j];
                }
            }
        }
    }
    out
}

fn transpose(a: &BitMatrix) -> BitMatrix {
    let n = a.len();
    let mut t = zeros(n);
    for i in 0..n {
        for j in 0..n {
            t[j][i] = a[i][j];
        }
    }
    t
}

/// Inverse of a unit lower-triangular matrix over GF(2).
fn inverse_unit_lower(a: &BitMatrix) -> BitMatrix {
    let n = a.len();
    let mut inv = eye(n);
    for i in 0..n {
        for j in 0..i {
            let mut acc = 0u8;
            for l in j..i {
                acc ^= a[i][l] & inv[l][j];
            }
            inv[i][j] = acc;
        }
    }
    inv
}

fn fill_lower(m: &mut BitMatrix, symmetric: bool, rng: &mut impl Rng) {
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            let v = rng.gen_range(0..2u8);
            m[i][j] = v;
            if symmetric {
                m[j][i] = v;
            }
        }
    }
}

/// Quantum Mallows sample: a Hadamard pattern and a qubit permutation.
fn sample_qmallows(n: usize, rng: &mut impl Rng) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut inds: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.gen();
        let index = -((r + (1.0 - r) * eps).log2().ceil()) as i64;
        let index = index.max(0) as usize;
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = inds.remove(k);
    }
    (had, perm)
}

fn block(a: &BitMatrix, b: &BitMatrix, c: &BitMatrix, d: &BitMatrix) -> BitMatrix {
    let n = a.len();
    let mut out = vec![vec![0u8; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j];
            out[i][n + j] = b[i][j];
            out[n + i][j] = c[i][j];
            out[n + i][n + j] = d[i][j];
        }
    }
    out
}

/// Draws a Clifford uniformly at random (including Pauli signs).
pub fn random_clifford(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    if n == 0 {
        return CliffordTableau::identity(0);
    }
    let (had, perm) = sample_qmallows(n, rng);

    let mut gamma1 = zeros(n);
    let mut gamma2 = zeros(n);
    for i in 0..n {
        gamma1[i][i] = rng.gen_range(0..2u8);
    }
    for i in 0..n {
        gamma2[i][i] = rng.gen_range(0..2u8);
    }
    let mut delta1 = eye(n);
    let mut delta2 = eye(n);
    fill_lower(&mut gamma1, true, rng);
    fill_lower(&mut gamma2, true, rng);
    fill_lower(&mut delta1, false, rng);
    fill_lower(&mut delta2, false, rng);

    let zero = zeros(n);
    let prod1 = matmul(&gamma1, &delta1);
    let prod2 = matmul(&gamma2, &delta2);
    let inv1 = transpose(&inverse_unit_lower(&delta1));
    let inv2 = transpose(&inverse_unit_lower(&delta2));
    let table1 = block(&delta1, &zero, &prod1, &inv1);
    let table2 = block(&delta2, &zero, &prod2, &inv2);

    let mut table = vec![Vec::new(); 2 * n];
    for i in 0..n {
        table[i] = table2[perm[i]].clone();
        table[n + i] = table2[n + perm[i]].clone();
    }
    for i in 0..n {
        if had[i] {
            table.swap(i, n + i);
        }
    }
    let table = matmul(&table1, &table);

    let mut images: Vec<PauliString> = Vec::with_capacity(2 * n);
    for row in &table {
        let x: Vec<bool> = row[..n].iter().map(|&b| b == 1).collect();
        let z: Vec<bool> = row[n..].iter().map(|&b| b == 1).collect();
        let phase = if rng.gen_range(0..2u8) == 1 { 2 } else { 0 };
        images.push(PauliString::from_bits(&x, &z, phase).expect("equal lengths"));
    }
    let z_images = images.split_off(n);
    CliffordTableau::from_images_unchecked(images, z_images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn samples_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=20 {
            for _ in 0..20 {
                assert!(random_clifford(n, &mut rng).is_symplectic(), "n={n}");
            }
        }
    }

    #[test]
    fn single_qubit_distribution_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts: HashMap<CliffordTableau, usize> = HashMap::new();
        let draws = 24_000;
        for _ in 0..draws {
            *counts.entry(random_clifford(1, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = draws as f64 / 24.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 23 degrees of freedom; 99.9% quantile is about 49.7.
        assert!(chi2 < 49.7, "chi2 = {chi2}");
    }

    #[test]
    fn two_qubit_support_is_full_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts: HashMap<CliffordTableau, usize> = HashMap::new();
        let draws = 11_520 * 20;
        for _ in 0..draws {
            *counts.entry(random_clifford(2, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 11_520);
        let expected = 20.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // dof = 11519, sd = sqrt(2 dof) ~ 152; allow five standard deviations.
        assert!((chi2 - 11_519.0).abs() < 5.0 * 152.0, "chi2 = {chi2}");
    }
}
