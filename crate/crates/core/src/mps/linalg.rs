use num_complex::Complex64 as C64;

use super::TruncationPolicy;
use crate::dense::CMatrix;

/// Singular values below this fraction of the largest are treated as zero.
pub(crate) const NUMERICAL_ZERO: f64 = 1e-14;
const DEGENERACY_TOL: f64 = 1e-10;

pub(crate) struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub vt: CMatrix,
}

/// Thin SVD with singular values sorted in decreasing order.
///
/// One-sided (Hestenes) Jacobi on the taller orientation of `m`. Columns of
/// `U` belonging to exactly zero singular values are left as zero vectors.
pub(crate) fn svd_sorted(m: CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd_sorted(m.adjoint());
        return Svd { u: t.vt.adjoint(), s: t.s, vt: t.u.adjoint() };
    }
    let (mut a, mut v) = jacobi(m);
    let s: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    for (j, &sj) in s.iter().enumerate() {
        if sj > 0.0 {
            a.column_mut(j).unscale_mut(sj);
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]).then(x.cmp(&y)));
    let u = CMatrix::from_fn(rows, cols, |i, j| a[(i, order[j])]);
    v = CMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    let s = order.iter().map(|&i| s[i]).collect();
    Svd { u, s, vt: v.adjoint() }
}

/// Orthogonalizes the columns of `a` (rows >= cols) by plane rotations,
/// returning `(A V, V)`.
fn jacobi(mut a: CMatrix) -> (CMatrix, CMatrix) {
    const TOL: f64 = 1e-15;
    const MAX_SWEEPS: usize = 80;
    let n = a.ncols();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// `(x_p, x_q) <- (c x_p - s e^{-iφ} x_q, s e^{iφ} x_p + c x_q)`.
fn rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = xp * c - xq * phase.conj() * s;
        m[(i, q)] = xp * phase * s + xq * c;
    }
}

/// Number of singular values to keep under `policy`.
///
/// Values below `NUMERICAL_ZERO · s_0` are always dropped. A value is also
/// dropped when its share `s^2 / Σ s^2` falls below the cutoff. When
/// `chi_max` would split a degenerate multiplet the whole multiplet is
/// dropped, unless that leaves nothing.
pub(crate) fn truncation_rank(s: &[f64], policy: &TruncationPolicy) -> usize {
    if s.is_empty() {
        return 0;
    }
    let s0 = s[0];
    let total: f64 = s.iter().map(|x| x * x).sum();
    let mut keep = s
        .iter()
        .take_while(|&&x| x > NUMERICAL_ZERO * s0 && (policy.cutoff == 0.0 || x * x / total >= policy.cutoff))
        .count()
        .max(1);
    if keep > policy.chi_max {
        let boundary = policy.chi_max;
        let same = |a: f64, b: f64| (a - b).abs() <= DEGENERACY_TOL * s0;
        let mut start = boundary;
        while start > 0 && same(s[start - 1], s[boundary]) {
            start -= 1;
        }
        keep = if start == 0 { policy.chi_max } else { start };
    }
    keep
}

/// `M = Q R` with `Q` having orthonormal columns.
pub(crate) fn qr(m: CMatrix) -> (CMatrix, CMatrix) {
    let qr = m.qr();
    (qr.q(), qr.r())
}

/// `M = L Q` with `Q` having orthonormal rows.
pub(crate) fn lq(m: CMatrix) -> (CMatrix, CMatrix) {
    let (q, r) = qr(m.adjoint());
    (r.adjoint(), q.adjoint())
}

pub(crate) fn scale_columns(m: &mut CMatrix, s: &[f64]) {
    for (j, &v) in s.iter().enumerate() {
        m.column_mut(j).scale_mut(v);
    }
}

pub(crate) fn scale_rows(m: &mut CMatrix, s: &[f64]) {
    for (i, &v) in s.iter().enumerate() {
        m.row_mut(i).scale_mut(v);
    }
}

pub(crate) fn entropy_of(s: &[f64]) -> f64 {
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total <= 0.0 {
        return 0.0;
    }
    s.iter()
        .map(|x| x * x / total)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy (bits) of a Hermitian positive matrix after trace
/// normalization.
pub(crate) fn hermitian_entropy(rho: CMatrix) -> f64 {
    let ev = rho.symmetric_eigenvalues();
    let total: f64 = ev.iter().map(|&x| x.max(0.0)).sum();
    if total <= 0.0 {
        return 0.0;
    }
    ev.iter()
        .map(|&x| x.max(0.0) / total)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub(crate) fn zero() -> C64 {
    C64::new(0.0, 0.0)
}
