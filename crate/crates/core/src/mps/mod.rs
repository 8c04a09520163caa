//! Open-boundary matrix product states with a tracked orthogonality center.
//!
//! Each site tensor has index order `(left bond, physical, right bond)` and
//! is stored row-major, so the same buffer can be read either as a
//! `(dl·2) x dr` or as a `dl x (2·dr)` matrix.

mod linalg;
mod snapshot;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix, CVector};
use crate::error::{CtnError, Result};
use crate::pauli::{Pauli, PauliString};
use linalg::{entropy_of, lq, qr, scale_columns, scale_rows, svd_sorted, truncation_rank, zero};

pub(crate) use linalg::hermitian_entropy;

const STATEVECTOR_LIMIT: usize = 14;
const UNITARY_TOL: f64 = 1e-8;
const STABILIZER_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub chi_max: usize,
    /// Relative threshold on squared singular values.
    pub cutoff: f64,
}

impl TruncationPolicy {
    pub fn new(chi_max: usize, cutoff: f64) -> Result<Self> {
        if chi_max < 1 {
            return Err(CtnError::InvalidArgument("chi_max must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&cutoff) {
            return Err(CtnError::InvalidArgument(format!("cutoff {cutoff} outside [0, 1)")));
        }
        Ok(TruncationPolicy { chi_max, cutoff })
    }

    /// No truncation beyond numerical zeros.
    pub fn exact() -> Self {
        TruncationPolicy { chi_max: usize::MAX, cutoff: 0.0 }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy::exact()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tensor {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl Tensor {
    fn left_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dl * 2, self.dr, &self.data)
    }

    fn right_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dl, 2 * self.dr, &self.data)
    }

    fn from_left_matrix(m: &CMatrix) -> Tensor {
        let (rows, dr) = m.shape();
        Tensor { dl: rows / 2, dr, data: row_major(m) }
    }

    fn from_right_matrix(m: &CMatrix) -> Tensor {
        let (dl, cols) = m.shape();
        Tensor { dl, dr: cols / 2, data: row_major(m) }
    }

    #[inline]
    fn at(&self, a: usize, s: usize, b: usize) -> C64 {
        self.data[(a * 2 + s) * self.dr + b]
    }
}

fn row_major(m: &CMatrix) -> Vec<C64> {
    m.transpose().as_slice().to_vec()
}

#[derive(Clone, Debug)]
pub struct Mps {
    n: usize,
    tensors: Vec<Tensor>,
    center: usize,
    trunc: TruncationPolicy,
    discarded: Vec<f64>,
    total_discarded: f64,
}

impl Mps {
    /// Product state from single-qubit amplitude pairs; center at site 0.
    pub fn product_state(states: &[[C64; 2]]) -> Result<Self> {
        if states.is_empty() {
            return Err(CtnError::InvalidArgument("product state needs at least one site".into()));
        }
        let tensors = states
            .iter()
            .map(|s| {
                let norm = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
                if (norm - 1.0).abs() > 1e-8 {
                    return Err(CtnError::NotNormalized(norm));
                }
                Ok(Tensor { dl: 1, dr: 1, data: vec![s[0], s[1]] })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = tensors.len();
        Ok(Mps { n, tensors, center: 0, trunc: TruncationPolicy::exact(), discarded: vec![0.0; n - 1], total_discarded: 0.0 })
    }

    pub fn zero_state(n: usize) -> Result<Self> {
        Mps::product_state(&vec![[C64::new(1.0, 0.0), zero()]; n])
    }

    /// Exact MPS decomposition of a dense state vector (normalized first).
    pub fn from_statevector(v: &CVector, n: usize) -> Result<Self> {
        if v.len() != 1 << n || n == 0 {
            return Err(CtnError::Dimension { expected: 1 << n, found: v.len() });
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(CtnError::NotNormalized(0.0));
        }
        let mut rest = CMatrix::from_row_slice(1, v.len(), &v.unscale(norm).as_slice().to_vec());
        let mut tensors = Vec::with_capacity(n);
        for _ in 0..n - 1 {
            let dl = rest.nrows();
            let cols = rest.ncols() / 2;
            let m = CMatrix::from_row_slice(dl * 2, cols, &row_major(&rest));
            let svd = svd_sorted(m);
            let keep = truncation_rank(&svd.s, &TruncationPolicy::exact());
            let u = svd.u.columns(0, keep).into_owned();
            let mut vt = svd.vt.rows(0, keep).into_owned();
            scale_rows(&mut vt, &svd.s[..keep]);
            tensors.push(Tensor::from_left_matrix(&u));
            rest = vt;
        }
        tensors.push(Tensor::from_right_matrix(&rest));
        let mut mps =
            Mps { n, tensors, center: n - 1, trunc: TruncationPolicy::exact(), discarded: vec![0.0; n - 1], total_discarded: 0.0 };
        mps.normalize_center();
        Ok(mps)
    }

    /// Random normalized MPS with every internal bond at most `chi`.
    pub fn random(n: usize, chi: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 || chi == 0 {
            return Err(CtnError::InvalidArgument("n and chi must be positive".into()));
        }
        let mut dims = vec![1usize; n + 1];
        for (cut, d) in dims.iter_mut().enumerate().take(n).skip(1) {
            let left = 1usize.checked_shl(cut as u32).unwrap_or(usize::MAX);
            let right = 1usize.checked_shl((n - cut) as u32).unwrap_or(usize::MAX);
            *d = chi.min(left).min(right);
        }
        let tensors = (0..n)
            .map(|i| {
                let (dl, dr) = (dims[i], dims[i + 1]);
                let data = (0..dl * 2 * dr).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
                Tensor { dl, dr, data }
            })
            .collect();
        let mut mps =
            Mps { n, tensors, center: n - 1, trunc: TruncationPolicy::exact(), discarded: vec![0.0; n - 1], total_discarded: 0.0 };
        mps.move_center_to(0);
        mps.normalize_center();
        Ok(mps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.trunc
    }

    pub fn set_policy(&mut self, policy: TruncationPolicy) {
        self.trunc = policy;
    }

    /// Bond dimension of each of the `n - 1` internal cuts.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.n - 1].iter().map(|t| t.dr).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Weight discarded at each cut by the most recent truncation there.
    pub fn discarded_weights(&self) -> &[f64] {
        &self.discarded
    }

    /// Sum of all discarded weights since construction.
    pub fn total_discarded_weight(&self) -> f64 {
        self.total_discarded
    }

    fn normalize_center(&mut self) {
        let t = &mut self.tensors[self.center];
        let norm = t.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for a in &mut t.data {
                *a /= norm;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.tensors[self.center].data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Moves the orthogonality center with QR (rightwards) or LQ (leftwards).
    pub fn move_center_to(&mut self, site: usize) {
        assert!(site < self.n, "site {site} out of range");
        while self.center < site {
            let c = self.center;
            let (q, r) = qr(self.tensors[c].left_matrix());
            self.tensors[c] = Tensor::from_left_matrix(&q);
            let next = r * self.tensors[c + 1].right_matrix();
            self.tensors[c + 1] = Tensor::from_right_matrix(&next);
            self.center += 1;
        }
        while self.center > site {
            let c = self.center;
            let (l, q) = lq(self.tensors[c].right_matrix());
            self.tensors[c] = Tensor::from_right_matrix(&q);
            let prev = self.tensors[c - 1].left_matrix() * l;
            self.tensors[c - 1] = Tensor::from_left_matrix(&prev);
            self.center -= 1;
        }
    }

    /// Largest deviation from left/right isometry over all non-center sites.
    pub fn canonical_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, t) in self.tensors.iter().enumerate() {
            if i < self.center {
                let m = t.left_matrix();
                worst = worst.max((m.adjoint() * &m - CMatrix::identity(t.dr, t.dr)).norm());
            } else if i > self.center {
                let m = t.right_matrix();
                worst = worst.max((&m * m.adjoint() - CMatrix::identity(t.dl, t.dl)).norm());
            }
        }
        worst
    }

    /// Contracts sites `start..start+k` into a `(dl, 2^k, dr)` row-major tensor
    /// after moving the center to `start`.
    pub(crate) fn window(&mut self, start: usize, k: usize) -> (usize, usize, Vec<C64>) {
        self.move_center_to(start);
        let first = &self.tensors[start];
        let dl = first.dl;
        let mut phys = 2usize;
        let mut data = first.data.clone();
        let mut dr = first.dr;
        for site in start + 1..start + k {
            let t = &self.tensors[site];
            let left = CMatrix::from_row_slice(dl * phys, dr, &data);
            let prod = left * t.right_matrix();
            data = row_major(&prod);
            phys *= 2;
            dr = t.dr;
        }
        (dl, dr, data)
    }

    /// Writes a `(dl, 2^k, dr)` window back with SVD splits left to right.
    /// The center ends on the last site of the window.
    fn split_window(&mut self, start: usize, k: usize, dl: usize, dr: usize, mut data: Vec<C64>) {
        let mut left_dim = dl;
        let mut phys_rest = 1usize << k;
        for site in start..start + k - 1 {
            phys_rest /= 2;
            let m = CMatrix::from_row_slice(left_dim * 2, phys_rest * dr, &data);
            let svd = svd_sorted(m);
            let keep = self.truncate(site, &svd.s);
            let u = svd.u.columns(0, keep).into_owned();
            let mut vt = svd.vt.rows(0, keep).into_owned();
            let kept = renormalized(&svd.s[..keep]);
            scale_rows(&mut vt, &kept);
            self.tensors[site] = Tensor::from_left_matrix(&u);
            data = row_major(&vt);
            left_dim = keep;
        }
        self.tensors[start + k - 1] = Tensor { dl: left_dim, dr, data };
        self.center = start + k - 1;
        self.normalize_center();
    }

    /// Records the truncation at `cut` and returns the number of kept values.
    fn truncate(&mut self, cut: usize, s: &[f64]) -> usize {
        let keep = truncation_rank(s, &self.trunc);
        let total: f64 = s.iter().map(|x| x * x).sum();
        let kept: f64 = s[..keep].iter().map(|x| x * x).sum();
        let lost = if total > 0.0 { (1.0 - kept / total).max(0.0) } else { 0.0 };
        self.discarded[cut] = lost;
        self.total_discarded += lost;
        keep
    }

    /// Applies a `2^k x 2^k` unitary to sites `start..start+k` (`k <= 3`).
    pub fn apply_local_unitary(&mut self, u: &CMatrix, start: usize) -> Result<()> {
        let dim = u.nrows();
        if !dim.is_power_of_two() || u.ncols() != dim || dim < 2 {
            return Err(CtnError::Dimension { expected: 2, found: dim });
        }
        let k = dim.trailing_zeros() as usize;
        if k > 3 {
            return Err(CtnError::InvalidArgument(format!("local unitaries act on at most 3 sites, got {k}")));
        }
        if start + k > self.n {
            return Err(CtnError::SiteOutOfRange { site: start + k - 1, n: self.n });
        }
        let defect = dense::unitarity_defect(u);
        if defect > UNITARY_TOL {
            return Err(CtnError::NotUnitary(defect));
        }
        self.apply_window_operator(u, start, k);
        Ok(())
    }

    /// Applies an operator to an already validated window without checks.
    pub(crate) fn apply_window_operator(&mut self, u: &CMatrix, start: usize, k: usize) {
        let (dl, dr, data) = self.window(start, k);
        let p = 1usize << k;
        let mut out = vec![zero(); data.len()];
        for a in 0..dl {
            for b in 0..dr {
                for so in 0..p {
                    let mut acc = zero();
                    for si in 0..p {
                        acc += u[(so, si)] * data[(a * p + si) * dr + b];
                    }
                    out[(a * p + so) * dr + b] = acc;
                }
            }
        }
        if k == 1 {
            self.tensors[start] = Tensor { dl, dr, data: out };
            self.center = start;
            self.normalize_center();
        } else {
            self.split_window(start, k, dl, dr, out);
        }
    }

    /// Applies `exp(-i angle P) = cos(angle) I - i sin(angle) P` for a
    /// Hermitian Pauli string `P`, as a bond-2 MPO over the support of `P`,
    /// followed by a QR sweep and a truncating SVD sweep.
    pub fn apply_pauli_rotation(&mut self, angle: f64, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(CtnError::Dimension { expected: self.n, found: p.n() });
        }
        if !p.is_hermitian() {
            return Err(CtnError::InvalidArgument(format!("rotation generator {p} is not Hermitian")));
        }
        let alpha = C64::new(angle.cos(), 0.0);
        let beta = C64::new(0.0, -angle.sin()) * dense::i_pow(p.phase());
        let support = p.support();
        let (first, last) = match (support.first(), support.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => {
                let c = self.center;
                let factor = alpha + beta;
                for a in &mut self.tensors[c].data {
                    *a *= factor;
                }
                return Ok(());
            }
        };
        self.move_center_to(first);
        if first == last {
            let op = CMatrix::identity(2, 2) * alpha + dense::pauli_1q(p.letter(first)) * beta;
            self.apply_window_operator(&op, first, 1);
            return Ok(());
        }
        let id = CMatrix::identity(2, 2);
        for site in first..=last {
            let pm = dense::pauli_1q(p.letter(site));
            // MPO blocks indexed by (w_left, w_right).
            let blocks: Vec<(usize, usize, CMatrix)> = if site == first {
                vec![(0, 0, &id * alpha), (0, 1, &pm * beta)]
            } else if site == last {
                vec![(0, 0, id.clone()), (1, 0, pm)]
            } else {
                vec![(0, 0, id.clone()), (1, 1, pm)]
            };
            let wl = if site == first { 1 } else { 2 };
            let wr = if site == last { 1 } else { 2 };
            let t = &self.tensors[site];
            let (dl, dr) = (t.dl, t.dr);
            let (ndl, ndr) = (dl * wl, dr * wr);
            let mut data = vec![zero(); ndl * 2 * ndr];
            for (x, y, op) in &blocks {
                for a in 0..dl {
                    for b in 0..dr {
                        for so in 0..2 {
                            let mut acc = zero();
                            for si in 0..2 {
                                acc += op[(so, si)] * t.at(a, si, b);
                            }
                            let (na, nb) = (a * wl + x, b * wr + y);
                            data[(na * 2 + so) * ndr + nb] += acc;
                        }
                    }
                }
            }
            self.tensors[site] = Tensor { dl: ndl, dr: ndr, data };
        }
        for site in first..last {
            let (q, r) = qr(self.tensors[site].left_matrix());
            self.tensors[site] = Tensor::from_left_matrix(&q);
            let next = r * self.tensors[site + 1].right_matrix();
            self.tensors[site + 1] = Tensor::from_right_matrix(&next);
        }
        self.center = last;
        self.normalize_center();
        for site in (first + 1..=last).rev() {
            let svd = svd_sorted(self.tensors[site].right_matrix());
            let keep = self.truncate(site - 1, &svd.s);
            let vt = svd.vt.rows(0, keep).into_owned();
            let mut u = svd.u.columns(0, keep).into_owned();
            scale_columns(&mut u, &renormalized(&svd.s[..keep]));
            self.tensors[site] = Tensor::from_right_matrix(&vt);
            let prev = self.tensors[site - 1].left_matrix() * u;
            self.tensors[site - 1] = Tensor::from_left_matrix(&prev);
            self.center = site - 1;
        }
        self.normalize_center();
        Ok(())
    }

    /// Normalized Schmidt coefficients across `cut` (between sites `cut` and `cut+1`).
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>> {
        if cut + 1 >= self.n {
            return Err(CtnError::InvalidArgument(format!("cut {cut} out of range for n = {}", self.n)));
        }
        let mut work = self.clone();
        work.move_center_to(cut);
        let s = svd_sorted(work.tensors[cut].left_matrix()).s;
        Ok(renormalized(&s))
    }

    /// Von Neumann entropy in bits of the bipartition `[0, cut] | (cut, n)`.
    pub fn bond_entropy(&self, cut: usize) -> Result<f64> {
        Ok(entropy_of(&self.schmidt_values(cut)?))
    }

    /// Entropies of all `n - 1` cuts from a single sweep.
    pub fn entropies(&self) -> Vec<f64> {
        if self.n < 2 {
            return Vec::new();
        }
        let mut work = self.clone();
        work.move_center_to(0);
        let mut out = Vec::with_capacity(self.n - 1);
        for site in 0..self.n - 1 {
            let svd = svd_sorted(work.tensors[site].left_matrix());
            out.push(entropy_of(&svd.s));
            let keep = truncation_rank(&svd.s, &TruncationPolicy::exact());
            let mut vt = svd.vt.rows(0, keep).into_owned();
            scale_rows(&mut vt, &svd.s[..keep]);
            work.tensors[site] = Tensor::from_left_matrix(&svd.u.columns(0, keep).into_owned());
            let next = vt * work.tensors[site + 1].right_matrix();
            work.tensors[site + 1] = Tensor::from_right_matrix(&next);
        }
        out
    }

    pub fn max_entropy(&self) -> f64 {
        self.entropies().into_iter().fold(0.0, f64::max)
    }

    /// `⟨a|b⟩` by transfer-matrix contraction.
    pub fn overlap(&self, other: &Mps) -> Result<C64> {
        if self.n != other.n {
            return Err(CtnError::Dimension { expected: self.n, found: other.n });
        }
        let mut env = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            let mut next = CMatrix::zeros(a.dr, b.dr);
            for s in 0..2 {
                let am = CMatrix::from_fn(a.dl, a.dr, |i, j| a.at(i, s, j));
                let bm = CMatrix::from_fn(b.dl, b.dr, |i, j| b.at(i, s, j));
                next += am.adjoint() * &env * bm;
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    /// `|⟨a|b⟩|^2`.
    pub fn fidelity(&self, other: &Mps) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr().min(1.0))
    }

    /// Dense state vector, site 0 most significant.
    pub fn to_statevector(&self) -> Result<CVector> {
        if self.n > STATEVECTOR_LIMIT {
            return Err(CtnError::TooLarge { n: self.n, limit: STATEVECTOR_LIMIT });
        }
        let mut acc = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for t in &self.tensors {
            let prod = &acc * t.right_matrix();
            // (2^j, 2 dr) -> (2^{j+1}, dr)
            acc = CMatrix::from_row_slice(prod.nrows() * 2, t.dr, &row_major(&prod));
        }
        let v = CVector::from_column_slice(acc.as_slice());
        let norm = v.norm();
        Ok(if norm > 0.0 { v.unscale(norm) } else { v })
    }

    /// Single-site stabilizer `(P, ±1)` when `site` is a product factor in
    /// one of the six stabilizer states.
    pub fn detect_separable_stabilizer(&self, site: usize) -> Option<(Pauli, i8)> {
        let t = self.tensors.get(site)?;
        if t.dl != 1 || t.dr != 1 {
            return None;
        }
        let v = CVector::from_column_slice(&t.data);
        let norm = v.norm();
        if norm == 0.0 {
            return None;
        }
        let v = v.unscale(norm);
        stabilizer_states().into_iter().find(|(_, _, s)| dense::distance_up_to_phase(&v, s) <= STABILIZER_TOL).map(|(p, e, _)| (p, e))
    }

    /// The normalized single-site vector when both adjacent bonds are trivial.
    pub fn site_vector(&self, site: usize) -> Option<[C64; 2]> {
        let t = self.tensors.get(site)?;
        if t.dl != 1 || t.dr != 1 {
            return None;
        }
        let norm = (t.data[0].norm_sqr() + t.data[1].norm_sqr()).sqrt();
        Some([t.data[0] / norm, t.data[1] / norm])
    }
}

fn renormalized(s: &[f64]) -> Vec<f64> {
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        s.iter().map(|x| x / norm).collect()
    } else {
        s.to_vec()
    }
}

/// The six single-qubit stabilizer states with their stabilizers.
pub fn stabilizer_states() -> Vec<(Pauli, i8, CVector)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: C64, b: C64| CVector::from_column_slice(&[a, b]);
    vec![
        (Pauli::Z, 1, v(C64::new(1.0, 0.0), zero())),
        (Pauli::Z, -1, v(zero(), C64::new(1.0, 0.0))),
        (Pauli::X, 1, v(C64::new(r, 0.0), C64::new(r, 0.0))),
        (Pauli::X, -1, v(C64::new(r, 0.0), C64::new(-r, 0.0))),
        (Pauli::Y, 1, v(C64::new(r, 0.0), C64::new(0.0, r))),
        (Pauli::Y, -1, v(C64::new(r, 0.0), C64::new(0.0, -r))),
    ]
}
