//! Numerical checks of the no-go result for Clifford disentanglers.
//!
//! A rotation `exp(-iθP) = αI + βP` with `P = P_B ⊗ P_n` acts on
//! `|Ψ⟩ ⊗ |φ_n⟩`, `|φ_n⟩ = μ|0⟩ + ν|1⟩`, `|φ̄_n⟩ = ν*|0⟩ - μ*|1⟩` and
//! `P_n|φ_n⟩ = γ|φ_n⟩ + δ|φ̄_n⟩`. Every unitary that makes the last qubit
//! separable for all `|Ψ⟩` has the form
//! `U_f = (U₁ ⊗ I)(I ⊗ |ω⟩⟨φ_n| + (αP_B + βγI)/√D ⊗ |ω̄⟩⟨φ̄_n|)`,
//! `D = 1 - |β|² + |β|²γ²`. Feeding it a stabilizer product state `|s⟩|0⟩`
//! with `⟨s|P_B|s⟩ = 0` leaves the last qubit with purity
//! `|μ|⁴ + |ν|⁴ + 2|μ|²|ν|²|β|²γ²/D`, which a stabilizer output can only
//! have if it equals `1` or `1/2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::tableau_to_unitary;
use crate::dense::{self, c, CMatrix, CVector};
use crate::error::{CtnError, Result};
use crate::gateclasses::enumerate_symplectic;
use crate::pauli::{Pauli, PauliString};

/// Largest `n - 1` accepted by [`purity_oracle`].
pub const ORACLE_LIMIT: usize = 8;

/// Tolerance for the normalization invariants and the witness tests.
pub const THEOREM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremInstance {
    /// `α = cos θ`, `β = -i sin θ`.
    pub theta: f64,
    /// Real and non-negative by convention.
    pub mu: C64,
    pub nu: C64,
    /// Real by convention.
    pub gamma: f64,
    pub delta: C64,
    /// Pauli on the first `n - 1` qubits, weight at least 1.
    pub p_b: PauliString,
    /// State of the first `n - 1` qubits.
    pub psi: CVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    CliffordDisentanglerPossible,
    Impossible,
}

const STABILIZER_STATES: [[(f64, f64); 2]; 6] = [
    [(1.0, 0.0), (0.0, 0.0)],
    [(0.0, 0.0), (1.0, 0.0)],
    [(FRAC_1_SQRT_2, 0.0), (FRAC_1_SQRT_2, 0.0)],
    [(FRAC_1_SQRT_2, 0.0), (-FRAC_1_SQRT_2, 0.0)],
    [(FRAC_1_SQRT_2, 0.0), (0.0, FRAC_1_SQRT_2)],
    [(FRAC_1_SQRT_2, 0.0), (0.0, -FRAC_1_SQRT_2)],
];

/// The six single-qubit stabilizer states.
pub fn stabilizer_states() -> [[C64; 2]; 6] {
    STABILIZER_STATES.map(|[a, b]| [c(a.0, a.1), c(b.0, b.1)])
}

/// `|m⟩ = cos(π/8)|0⟩ - i sin(π/8)|1⟩`.
pub fn magic_state() -> [C64; 2] {
    [c((PI / 8.0).cos(), 0.0), c(0.0, -(PI / 8.0).sin())]
}

impl TheoremInstance {
    /// Builds an instance from `|φ_n⟩` and the letter `P_n`, fixing the
    /// global phase so that `μ ≥ 0` and reading `γ`, `δ` off `P_n|φ_n⟩`.
    pub fn new(theta: f64, phi: [C64; 2], p_n: Pauli, p_b: PauliString, psi: CVector) -> Result<Self> {
        if p_n.is_identity() {
            return Err(CtnError::InvalidArgument("P_n must be X, Y or Z".into()));
        }
        let norm2 = phi[0].norm_sqr() + phi[1].norm_sqr();
        if (norm2 - 1.0).abs() > THEOREM_TOL {
            return Err(CtnError::NotNormalized(norm2));
        }
        let phase = if phi[0].norm() > 1e-300 { phi[0].conj() / phi[0].norm() } else { phi[1].conj() / phi[1].norm() };
        let (mu, nu) = (phi[0] * phase, phi[1] * phase);
        let phi_v = CVector::from_column_slice(&[mu, nu]);
        let bar = CVector::from_column_slice(&[nu.conj(), -mu.conj()]);
        let image = dense::pauli_1q(p_n) * &phi_v;
        let gamma = phi_v.dotc(&image).re;
        let delta = bar.dotc(&image);
        let inst = TheoremInstance { theta, mu: c(mu.re, 0.0), nu, gamma, delta, p_b, psi };
        inst.validate()?;
        Ok(inst)
    }

    /// `θ` uniform on `(0, π/2)`, `|φ_n⟩` Haar on the Bloch sphere, a uniform
    /// letter `P_n`, `P_B` uniform among Hermitian Paulis of weight ≥ 1 and a
    /// Haar-random `|Ψ⟩`.
    pub fn random(m: usize, rng: &mut impl Rng) -> Result<Self> {
        if m == 0 {
            return Err(CtnError::InvalidArgument("P_B needs at least one qubit".into()));
        }
        let theta = loop {
            let t = rng.gen_range(0.0..PI / 2.0);
            if t > 0.0 {
                break t;
            }
        };
        let phi = haar_qubit(rng);
        let p_n = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
        let p_b = loop {
            let letters: Vec<Pauli> = (0..m).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]).collect();
            let p = PauliString::from_letters(&letters);
            if p.weight() > 0 {
                break p;
            }
        };
        Self::new(theta, phi, p_n, p_b, haar_state(m, rng))
    }

    pub fn validate(&self) -> Result<()> {
        let phi_norm = self.mu.norm_sqr() + self.nu.norm_sqr();
        if (phi_norm - 1.0).abs() > THEOREM_TOL {
            return Err(CtnError::NotNormalized(phi_norm));
        }
        let action = self.gamma * self.gamma + self.delta.norm_sqr();
        if (action - 1.0).abs() > THEOREM_TOL {
            return Err(CtnError::InvalidArgument(format!("|γ|² + |δ|² = {action}, expected 1")));
        }
        if self.mu.im.abs() > THEOREM_TOL || self.mu.re < -THEOREM_TOL {
            return Err(CtnError::InvalidArgument("μ must be real and non-negative".into()));
        }
        if self.p_b.weight() == 0 || !self.p_b.is_hermitian() {
            return Err(CtnError::InvalidArgument(format!("P_B = {} must be Hermitian with weight ≥ 1", self.p_b)));
        }
        if self.psi.len() != 1 << self.p_b.n() {
            return Err(CtnError::Dimension { expected: 1 << self.p_b.n(), found: self.psi.len() });
        }
        Ok(())
    }

    /// Total number of qubits `n`.
    pub fn n(&self) -> usize {
        self.p_b.n() + 1
    }

    pub fn alpha(&self) -> C64 {
        c(self.theta.cos(), 0.0)
    }

    pub fn beta(&self) -> C64 {
        c(0.0, -self.theta.sin())
    }

    pub fn phi(&self) -> CVector {
        CVector::from_column_slice(&[self.mu, self.nu])
    }

    pub fn phi_bar(&self) -> CVector {
        CVector::from_column_slice(&[self.nu.conj(), -self.mu.conj()])
    }

    /// `P_n` rebuilt from `γ`, `δ` in the `{φ_n, φ̄_n}` frame.
    pub fn p_n_matrix(&self) -> CMatrix {
        let (phi, bar) = (self.phi(), self.phi_bar());
        (&phi * phi.adjoint() - &bar * bar.adjoint()) * c(self.gamma, 0.0)
            + &bar * phi.adjoint() * self.delta
            + &phi * bar.adjoint() * self.delta.conj()
    }

    /// `1 - |β|² + |β|²γ²`.
    fn denominator(&self) -> f64 {
        let b2 = self.beta().norm_sqr();
        1.0 - b2 + b2 * self.gamma * self.gamma
    }

    /// `U_f` with `U₁ = I` and `ω = φ_n`, on `n - 1` qubits followed by qubit `n`.
    fn disentangler(&self) -> Result<CMatrix> {
        let d = self.denominator();
        if d < 1e-14 {
            return Err(CtnError::SingularPurity);
        }
        let dim = 1usize << self.p_b.n();
        let pb = dense::pauli_matrix(&self.p_b);
        let branch = (pb * self.alpha() + CMatrix::identity(dim, dim) * (self.beta() * self.gamma)) / c(d.sqrt(), 0.0);
        let (phi, bar) = (self.phi(), self.phi_bar());
        let keep = &phi * phi.adjoint();
        let flip = &bar * bar.adjoint();
        let u = dense::kron(&CMatrix::identity(dim, dim), &keep) + dense::kron(&branch, &flip);
        if dense::unitarity_defect(&u) > 1e-9 {
            return Err(CtnError::NotUnitary(dense::unitarity_defect(&u)));
        }
        Ok(u)
    }

    fn check_oracle_size(&self) -> Result<()> {
        if self.p_b.n() > ORACLE_LIMIT {
            return Err(CtnError::TooLarge { n: self.p_b.n(), limit: ORACLE_LIMIT });
        }
        Ok(())
    }
}

fn haar_qubit(rng: &mut impl Rng) -> [C64; 2] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let azimuth: f64 = rng.gen_range(0.0..2.0 * PI);
    let polar = z.clamp(-1.0, 1.0).acos();
    [c((polar / 2.0).cos(), 0.0), C64::from_polar((polar / 2.0).sin(), azimuth)]
}

fn haar_state(m: usize, rng: &mut impl Rng) -> CVector {
    let gauss = |rng: &mut dyn rand::RngCore| -> f64 {
        let u1: f64 = 1.0 - rand::Rng::gen::<f64>(rng);
        let u2: f64 = rand::Rng::gen::<f64>(rng);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    };
    let v = DVector::from_fn(1 << m, |_, _| c(gauss(rng), gauss(rng)));
    let norm = v.norm();
    v / c(norm, 0.0)
}

fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// Closed-form purity of the last qubit after `U_f` acts on the stabilizer
/// test state.
pub fn purity_formula(inst: &TheoremInstance) -> Result<f64> {
    inst.validate()?;
    let d = inst.denominator();
    if d < 1e-14 {
        return Err(CtnError::SingularPurity);
    }
    let (m2, n2) = (inst.mu.norm_sqr(), inst.nu.norm_sqr());
    let b2 = inst.beta().norm_sqr();
    Ok(m2 * m2 + n2 * n2 + 2.0 * m2 * n2 * b2 * inst.gamma * inst.gamma / d)
}

/// Product state `|s⟩` with `P_i|s_i⟩ ⟂ |s_i⟩` on every non-identity site.
fn orthogonal_test_state(p_b: &PauliString) -> CVector {
    let r = FRAC_1_SQRT_2;
    let sites: Vec<[C64; 2]> = p_b
        .letters()
        .into_iter()
        .map(|l| match l {
            Pauli::Z => [c(r, 0.0), c(r, 0.0)],
            _ => [c(1.0, 0.0), c(0.0, 0.0)],
        })
        .collect();
    dense::product_vector(&sites)
}

/// Dense evaluation: builds `U_f`, applies it to `|s⟩|0⟩` and returns the
/// purity of the last qubit.
pub fn purity_oracle(inst: &TheoremInstance) -> Result<f64> {
    inst.validate()?;
    inst.check_oracle_size()?;
    let u = inst.disentangler()?;
    let input = orthogonal_test_state(&inst.p_b).kronecker(&dense::basis_state(1, 0));
    Ok(purity(&dense::reduced_last_qubit(&(u * input))))
}

/// Purity of the last qubit of `U_f (αI + βP)|Ψ⟩|φ_n⟩`; `1` when `U_f`
/// disentangles as claimed.
pub fn disentangled_purity(inst: &TheoremInstance) -> Result<f64> {
    inst.validate()?;
    inst.check_oracle_size()?;
    let u = inst.disentangler()?;
    let full = dense::kron(&dense::pauli_matrix(&inst.p_b), &inst.p_n_matrix());
    let dim = full.nrows();
    let rotation = CMatrix::identity(dim, dim) * inst.alpha() + full * inst.beta();
    let state = u * rotation * inst.psi.kronecker(&inst.phi());
    Ok(purity(&dense::reduced_last_qubit(&state)))
}

fn is_stabilizer_qubit(mu: C64, nu: C64) -> bool {
    let cross = mu.conj() * nu;
    let bloch = [2.0 * cross.re, 2.0 * cross.im, mu.norm_sqr() - nu.norm_sqr()];
    let norm = (mu.norm_sqr() + nu.norm_sqr()).max(1e-300);
    bloch.iter().any(|r| 1.0 - r.abs() / norm <= THEOREM_TOL)
}

/// Possible iff `|φ_n⟩` is one of the six stabilizer states or
/// `sin²θ ∈ {0, 1}`, all within [`THEOREM_TOL`].
pub fn theorem_witness(theta: f64, mu: C64, nu: C64) -> Classification {
    let s2 = theta.sin().powi(2);
    if is_stabilizer_qubit(mu, nu) || s2 <= THEOREM_TOL || s2 >= 1.0 - THEOREM_TOL {
        Classification::CliffordDisentanglerPossible
    } else {
        Classification::Impossible
    }
}

/// All 11520 two-qubit Cliffords (up to global phase) as dense unitaries.
pub fn two_qubit_cliffords() -> &'static [CMatrix] {
    static CLIFFORDS: OnceLock<Vec<CMatrix>> = OnceLock::new();
    CLIFFORDS.get_or_init(|| {
        let paulis: Vec<CMatrix> = (0..16)
            .map(|i| {
                let letters = [i / 4, i % 4].map(|j| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][j]);
                dense::pauli_matrix(&PauliString::from_letters(&letters))
            })
            .collect();
        let mut out = Vec::with_capacity(11520);
        for e in enumerate_symplectic(2).expect("k = 2 is supported") {
            let u = tableau_to_unitary(&e.lift()).expect("two qubits");
            out.extend(paulis.iter().map(|p| &u * p));
        }
        out
    })
}

fn is_product(v: &CVector) -> bool {
    (v[0] * v[3] - v[1] * v[2]).norm() < 1e-9
}

/// Exhaustive search at `n = 2` for a Clifford `C` with
/// `C (αI + βP_1 ⊗ P_n)|Ψ⟩|φ_n⟩` separable for `|Ψ⟩` in a probe set (the
/// instance's `|Ψ⟩` and `|0⟩, |1⟩, |+⟩, |+i⟩`). Returns the first index into
/// [`two_qubit_cliffords`] that works.
pub fn brute_force_disentangler(inst: &TheoremInstance) -> Result<Option<usize>> {
    inst.validate()?;
    if inst.p_b.n() != 1 {
        return Err(CtnError::Dimension { expected: 1, found: inst.p_b.n() });
    }
    let full = dense::kron(&dense::pauli_matrix(&inst.p_b), &inst.p_n_matrix());
    let rotation = CMatrix::identity(4, 4) * inst.alpha() + full * inst.beta();
    let r = FRAC_1_SQRT_2;
    let probes = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)], [c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(0.0, r)]];
    let mut states = vec![&rotation * inst.psi.kronecker(&inst.phi())];
    states.extend(probes.iter().map(|p| &rotation * CVector::from_column_slice(p).kronecker(&inst.phi())));
    Ok(two_qubit_cliffords().iter().position(|u| states.iter().all(|s| is_product(&(u * s)))))
}

/// Summary of a randomized verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest `|purity_formula - purity_oracle|`.
    pub max_formula_gap: f64,
    pub min_purity: f64,
    pub max_purity: f64,
    /// Smallest purity of the last qubit after `U_f` acts on the actual input.
    pub min_disentangled_purity: f64,
    /// Instances where `purity ∈ {1, 1/2}` disagrees with the witness.
    pub iff_violations: usize,
    pub brute_force_instances: usize,
    /// Instances where the exhaustive search disagrees with the witness.
    pub brute_force_mismatches: usize,
    pub brute_force_possible: usize,
}

impl TheoremReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_formula_gap <= tol
            && self.min_purity >= 0.5 - THEOREM_TOL
            && self.max_purity <= 1.0 + THEOREM_TOL
            && self.iff_violations == 0
            && self.brute_force_mismatches == 0
    }
}

fn in_special_set(p: f64) -> bool {
    (p - 1.0).abs() <= THEOREM_TOL || (p - 0.5).abs() <= THEOREM_TOL
}

/// Random `n = 2` instance for the exhaustive search; half of them use a
/// stabilizer `|φ_n⟩` so that both outcomes occur.
pub fn random_two_qubit_instance(rng: &mut impl Rng) -> Result<TheoremInstance> {
    let mut inst = TheoremInstance::random(1, rng)?;
    if rng.gen_bool(0.5) {
        let phi = stabilizer_states()[rng.gen_range(0..6)];
        let p_n = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
        inst = TheoremInstance::new(inst.theta, phi, p_n, inst.p_b, inst.psi)?;
    }
    Ok(inst)
}

/// Compares formula and oracle on `samples` random instances
/// (`n - 1 ∈ {2, 3, 4}`), checks the purity characterization on each, and
/// runs the exhaustive two-qubit search on `min(samples, 100)` instances.
pub fn verify_theorem(samples: usize, seed: u64) -> Result<TheoremReport> {
    if samples == 0 {
        return Err(CtnError::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TheoremReport {
        samples,
        seed,
        max_formula_gap: 0.0,
        min_purity: f64::INFINITY,
        max_purity: f64::NEG_INFINITY,
        min_disentangled_purity: f64::INFINITY,
        iff_violations: 0,
        brute_force_instances: samples.min(100),
        brute_force_mismatches: 0,
        brute_force_possible: 0,
    };
    for i in 0..samples {
        let inst = TheoremInstance::random(2 + i % 3, &mut rng)?;
        let formula = purity_formula(&inst)?;
        let oracle = purity_oracle(&inst)?;
        report.max_formula_gap = report.max_formula_gap.max((formula - oracle).abs());
        report.min_purity = report.min_purity.min(formula);
        report.max_purity = report.max_purity.max(formula);
        report.min_disentangled_purity = report.min_disentangled_purity.min(disentangled_purity(&inst)?);
        let possible = theorem_witness(inst.theta, inst.mu, inst.nu) == Classification::CliffordDisentanglerPossible;
        if in_special_set(formula) != possible {
            report.iff_violations += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..report.brute_force_instances {
        let inst = random_two_qubit_instance(&mut rng)?;
        let found = brute_force_disentangler(&inst)?.is_some();
        let claimed = theorem_witness(inst.theta, inst.mu, inst.nu) == Classification::CliffordDisentanglerPossible;
        report.brute_force_possible += usize::from(found);
        if found != claimed {
            report.brute_force_mismatches += 1;
        }
    }
    Ok(report)
}
