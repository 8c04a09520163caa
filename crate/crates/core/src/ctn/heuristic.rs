//! Window evaluation for the `k`-local heuristic cooler.
//!
//! After a `k`-qubit Clifford `U` acts on a window `abc`, the reduced state of
//! `L ∪ S` (`S` the window sites left of a cut) is
//! `2^{-|S|} Σ_{P on S} ρ_{U†PU} ⊗ P`, where `ρ_Q = Tr_window[(I ⊗ Q) ρ_{L,window}]`
//! are Pauli moments of the untouched window. The moments are computed once per
//! window and every candidate is then scored from at most 16 of them. Since the
//! subgroup `U†(V_S)` fixes the result, candidates sharing it share a score.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::clifford::{CliffordTableau, Direction};
use crate::dense::{self, CMatrix};
use crate::error::{CtnError, Result};
use crate::gateclasses::GateClassTable;
use crate::pauli::PauliString;

/// Entropy changes smaller than this (bits) count as no change.
pub const IMPROVEMENT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
struct Term {
    p: usize,
    q: usize,
    sign: f64,
}

/// One orbit `U†(V_S)` for a given cut, seen from both sides.
#[derive(Clone, Debug)]
struct Plane {
    near: Vec<Term>,
    far: Vec<Term>,
}

#[derive(Clone, Debug)]
struct Candidate {
    tableau: CliffordTableau,
    planes: Vec<usize>,
}

/// Candidate set for windows of `k` sites, built from a class table.
#[derive(Clone, Debug)]
pub struct HeuristicTable {
    k: usize,
    candidates: Vec<Candidate>,
    planes: Vec<Vec<Plane>>,
    identity_planes: Vec<usize>,
    /// For every `k`-qubit Pauli `Q` and input basis index `s`: `(row, Q[row, s])`.
    pauli_action: Vec<Vec<(usize, C64)>>,
    /// Pauli matrices on `m` qubits, indexed by `[m][packed]`.
    side_paulis: Vec<Vec<CMatrix>>,
}

fn hermitian_pauli(m: usize, packed: usize) -> PauliString {
    let x: Vec<bool> = (0..m).map(|q| (packed >> q) & 1 == 1).collect();
    let z: Vec<bool> = (0..m).map(|q| (packed >> (m + q)) & 1 == 1).collect();
    PauliString::from_bits(&x, &z, 0).expect("equal lengths")
}

fn pack(p: &PauliString) -> usize {
    let (x, z) = p.packed_bits();
    (x | (z << p.n())) as usize
}

impl HeuristicTable {
    pub fn new(classes: &GateClassTable) -> Result<Self> {
        let k = classes.k();
        let tableaus = classes.tableaus();
        Self::from_tableaus(k, tableaus)
    }

    /// Uses an explicit candidate list; the identity is always added as a
    /// reference for the current entropies.
    pub fn from_tableaus(k: usize, tableaus: Vec<CliffordTableau>) -> Result<Self> {
        if !(2..=3).contains(&k) {
            return Err(CtnError::InvalidArgument(format!("heuristic windows have k = 2 or 3, got {k}")));
        }
        if let Some(t) = tableaus.iter().find(|t| t.n() != k) {
            return Err(CtnError::Dimension { expected: k, found: t.n() });
        }
        let cuts = k - 1;
        let mut planes: Vec<Vec<Plane>> = vec![Vec::new(); cuts];
        let mut keys: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); cuts];

        let mut describe = |t: &CliffordTableau| -> Vec<usize> {
            (0..cuts)
                .map(|c| {
                    let near = side_terms(t, k, 0, c + 1);
                    let far = side_terms(t, k, c + 1, k);
                    let mut key: Vec<usize> = near.iter().map(|term| term.q).collect();
                    key.sort_unstable();
                    *keys[c].entry(key).or_insert_with(|| {
                        planes[c].push(Plane { near, far });
                        planes[c].len() - 1
                    })
                })
                .collect()
        };
        let identity_planes = describe(&CliffordTableau::identity(k));
        let candidates = tableaus
            .into_iter()
            .map(|tableau| {
                let planes = describe(&tableau);
                Candidate { tableau, planes }
            })
            .collect();

        let dim = 1usize << k;
        let pauli_action = (0..dim * dim)
            .map(|q| {
                let m = dense::pauli_matrix(&hermitian_pauli(k, q));
                (0..dim)
                    .map(|s| {
                        let row = (0..dim).find(|&r| m[(r, s)].norm() > 0.5).expect("Pauli matrices are monomial");
                        (row, m[(row, s)])
                    })
                    .collect()
            })
            .collect();
        let side_paulis = (0..k).map(|m| (0..1usize << (2 * m)).map(|p| dense::pauli_matrix(&hermitian_pauli(m, p))).collect()).collect();
        Ok(HeuristicTable { k, candidates, planes, identity_planes, pauli_action, side_paulis })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn tableau(&self, index: usize) -> &CliffordTableau {
        &self.candidates[index].tableau
    }

    /// Distinct cut orbits per internal cut.
    pub fn plane_counts(&self) -> Vec<usize> {
        self.planes.iter().map(Vec::len).collect()
    }

    /// Picks a candidate for the window `(dl, 2^k, dr)` in `data`, or `None`
    /// when nothing improves. Also returns the current internal-cut entropies.
    pub(crate) fn choose(&self, dl: usize, dr: usize, data: &[C64]) -> (Option<usize>, Vec<f64>) {
        let mut eval = WindowEval::new(self, dl, dr, data);
        let current: Vec<f64> = (0..self.k - 1).map(|c| eval.entropy(c, self.identity_planes[c])).collect();
        let choice = if self.k == 2 { self.choose_min(&mut eval, current[0]) } else { self.choose_admissible(&mut eval, &current) };
        (choice, current)
    }

    fn choose_min(&self, eval: &mut WindowEval, current: f64) -> Option<usize> {
        let mut best = current - IMPROVEMENT_TOL;
        let mut choice = None;
        let mut seen: Vec<Option<f64>> = vec![None; self.planes[0].len()];
        for (i, cand) in self.candidates.iter().enumerate() {
            let plane = cand.planes[0];
            let s = match seen[plane] {
                Some(s) => s,
                None => {
                    let s = if eval.renyi2(0, plane) >= best { f64::INFINITY } else { eval.entropy(0, plane) };
                    seen[plane] = Some(s);
                    s
                }
            };
            if s < best {
                best = s;
                choice = Some(i);
            }
        }
        choice
    }

    fn choose_admissible(&self, eval: &mut WindowEval, current: &[f64]) -> Option<usize> {
        let cuts = current.len();
        // S ≥ S₂, so a candidate survives only if every cut can stay below its
        // current value and some cut can drop strictly below it.
        let lower: Vec<Vec<f64>> = (0..cuts).map(|c| (0..self.planes[c].len()).map(|p| eval.renyi2(c, p)).collect()).collect();
        let survivors: Vec<usize> = (0..self.candidates.len())
            .filter(|&i| {
                let planes = &self.candidates[i].planes;
                (0..cuts).all(|c| lower[c][planes[c]] <= current[c] + IMPROVEMENT_TOL)
                    && (0..cuts).any(|c| lower[c][planes[c]] < current[c] - IMPROVEMENT_TOL)
            })
            .collect();
        let mut admissible: Vec<Vec<Option<Option<f64>>>> = self.planes.iter().map(|p| vec![None; p.len()]).collect();
        let mut check = |eval: &mut WindowEval, c: usize, plane: usize| -> Option<f64> {
            *admissible[c][plane].get_or_insert_with(|| {
                let s = eval.entropy(c, plane);
                (s <= current[c] + IMPROVEMENT_TOL).then_some(s)
            })
        };
        // Inadmissible planes are the common case, so the cut with fewer
        // distinct planes among the survivors is checked first.
        let mut order: Vec<usize> = (0..cuts).collect();
        order.sort_by_key(|&c| {
            let mut distinct: Vec<usize> = survivors.iter().map(|&i| self.candidates[i].planes[c]).collect();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        });
        let mut best = 0.0;
        let mut choice = None;
        let mut scores = vec![0.0; cuts];
        'cands: for i in survivors {
            let cand = &self.candidates[i];
            for &c in &order {
                let Some(s) = check(eval, c, cand.planes[c]) else { continue 'cands };
                scores[c] = s;
            }
            let decrease: f64 = (0..cuts).map(|c| current[c] - scores[c]).sum();
            let strict = (0..cuts).any(|c| scores[c] < current[c] - IMPROVEMENT_TOL);
            if strict && decrease > best {
                best = decrease;
                choice = Some(i);
            }
        }
        choice
    }
}

/// Terms `(P, U†PU)` for all Paulis `P` on window sites `lo..hi`.
fn side_terms(t: &CliffordTableau, k: usize, lo: usize, hi: usize) -> Vec<Term> {
    let m = hi - lo;
    (0..1usize << (2 * m))
        .map(|p| {
            let local = hermitian_pauli(m, p);
            let mut full = PauliString::identity(k);
            for j in 0..m {
                full.set_bits(lo + j, local.x_bit(j), local.z_bit(j));
            }
            let q = t.conjugate(&full, Direction::Backward).expect("sizes match");
            Term { p, q: pack(&q), sign: f64::from(q.sign()) }
        })
        .collect()
}

struct WindowEval<'a> {
    table: &'a HeuristicTable,
    dl: usize,
    dr: usize,
    data: &'a [C64],
    norm_sqr: f64,
    left: Option<Vec<CMatrix>>,
    right: Option<Vec<CMatrix>>,
}

impl<'a> WindowEval<'a> {
    fn new(table: &'a HeuristicTable, dl: usize, dr: usize, data: &'a [C64]) -> Self {
        let norm_sqr = data.iter().map(|z| z.norm_sqr()).sum();
        WindowEval { table, dl, dr, data, norm_sqr, left: None, right: None }
    }

    fn phys(&self) -> usize {
        1 << self.table.k
    }

    /// `ρ^L_Q[l, l'] = Σ_s Q[s', s] G[(l, s), (l', s')]` with `G = A A†`.
    fn left_moments(&mut self) -> &[CMatrix] {
        if self.left.is_none() {
            let (dl, dr, p) = (self.dl, self.dr, self.phys());
            let a = CMatrix::from_row_slice(dl * p, dr, self.data);
            let g = &a * a.adjoint();
            let moments = self
                .table
                .pauli_action
                .iter()
                .map(|action| {
                    CMatrix::from_fn(dl, dl, |l, lp| {
                        action.iter().enumerate().map(|(s, &(row, v))| v * g[(l * p + s, lp * p + row)]).sum()
                    })
                })
                .collect();
            self.left = Some(moments);
        }
        self.left.as_deref().expect("just filled")
    }

    /// `ρ^R_Q[r, r'] = Σ_s Q[s', s] H[(s, r), (s', r')]` with
    /// `H[(s, r), (s', r')] = Σ_l θ[l, s, r] conj(θ[l, s', r'])`.
    fn right_moments(&mut self) -> &[CMatrix] {
        if self.right.is_none() {
            let (dl, dr, p) = (self.dl, self.dr, self.phys());
            let b = CMatrix::from_row_slice(dl, p * dr, self.data);
            let h = b.transpose() * b.conjugate();
            let moments = self
                .table
                .pauli_action
                .iter()
                .map(|action| {
                    CMatrix::from_fn(dr, dr, |r, rp| {
                        action.iter().enumerate().map(|(s, &(row, v))| v * h[(s * dr + r, row * dr + rp)]).sum()
                    })
                })
                .collect();
            self.right = Some(moments);
        }
        self.right.as_deref().expect("just filled")
    }

    /// Picks the smaller side of cut `c`.
    fn near_is_smaller(&self, c: usize) -> bool {
        let k = self.table.k;
        self.dl << (c + 1) <= self.dr << (k - c - 1)
    }

    fn renyi2(&mut self, c: usize, plane: usize) -> f64 {
        let k = self.table.k;
        let table = self.table;
        let (terms, m, moments) = if self.near_is_smaller(c) {
            (&table.planes[c][plane].near, c + 1, self.left_moments())
        } else {
            (&table.planes[c][plane].far, k - c - 1, self.right_moments())
        };
        let sum: f64 = terms.iter().map(|t| moments[t.q].norm_squared()).sum();
        let purity = sum / (1u64 << m) as f64;
        -(purity / (self.norm_sqr * self.norm_sqr)).log2()
    }

    fn entropy(&mut self, c: usize, plane: usize) -> f64 {
        let k = self.table.k;
        let table = self.table;
        let (terms, m, moments) = if self.near_is_smaller(c) {
            (&table.planes[c][plane].near, c + 1, self.left_moments())
        } else {
            (&table.planes[c][plane].far, k - c - 1, self.right_moments())
        };
        let d = moments[0].nrows();
        let side = 1usize << m;
        let mut rho = CMatrix::zeros(d * side, d * side);
        for t in terms {
            let pm = &table.side_paulis[m][t.p];
            let q = &moments[t.q];
            for i in 0..d {
                for j in 0..d {
                    let v = q[(i, j)] * t.sign;
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for a in 0..side {
                        for b in 0..side {
                            rho[(i * side + a, j * side + b)] += v * pm[(a, b)];
                        }
                    }
                }
            }
        }
        crate::mps::hermitian_entropy(rho)
    }
}
