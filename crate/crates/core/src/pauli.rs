//! Signed Pauli strings in binary-symplectic form.
//!
//! A [`PauliString`] on `n` qubits stores an X bit and a Z bit per site,
//! packed 64 sites to a word, plus a global phase `i^phase`. The letter at a
//! site is read off the bit pair: `(1,0) -> X`, `(1,1) -> Y`, `(0,1) -> Z`.
//! `Y` here is the Hermitian Pauli matrix, so `Y = i X Z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CtnError, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        !((x1 & z2) ^ (z1 & x2))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl FromStr for Pauli {
    type Err = CtnError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next().and_then(Pauli::from_char), chars.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(CtnError::Parse { pos: 0, msg: format!("expected one of I, X, Y, Z, got {s:?}") }),
        }
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// `i^phase * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    /// `letter` on `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Self {
        let mut p = PauliString::identity(n);
        p.set_letter(site, letter);
        p
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (k, &l) in letters.iter().enumerate() {
            p.set_letter(k, l);
        }
        p
    }

    pub fn from_bits(x_bits: &[bool], z_bits: &[bool], phase: u8) -> Result<Self> {
        if x_bits.len() != z_bits.len() {
            return Err(CtnError::Dimension { expected: x_bits.len(), found: z_bits.len() });
        }
        let mut p = PauliString::identity(x_bits.len());
        for k in 0..x_bits.len() {
            p.set_bits(k, x_bits[k], z_bits[k]);
        }
        p.phase = phase & 3;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exponent of `i` in the global phase, in `0..4`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub fn add_phase(&mut self, phase: u8) {
        self.phase = (self.phase + (phase & 3)) & 3;
    }

    /// `true` when the global phase is `±1`.
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> i8 {
        if self.phase == 2 {
            -1
        } else {
            1
        }
    }

    pub fn x_bit(&self, k: usize) -> bool {
        self.x[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn z_bit(&self, k: usize) -> bool {
        self.z[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn x_bits(&self) -> Vec<bool> {
        (0..self.n).map(|k| self.x_bit(k)).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        (0..self.n).map(|k| self.z_bit(k)).collect()
    }

    pub fn set_bits(&mut self, k: usize, x: bool, z: bool) {
        let (w, b) = (k / 64, k % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letter(&self, k: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(k), self.z_bit(k))
    }

    pub fn set_letter(&mut self, k: usize, letter: Pauli) {
        let (x, z) = letter.bits();
        self.set_bits(k, x, z);
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|k| self.letter(k)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn num_y(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.x_bit(k) || self.z_bit(k)).collect()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    fn check_dims(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(CtnError::Dimension { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Product `self · other`, tracking the accumulated power of `i`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_dims(other)?;
        let mut r = self.clone();
        r.mul_assign_right(other);
        Ok(r)
    }

    /// `self <- self · other`. Sizes must match.
    pub(crate) fn mul_assign_right(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.x.len() {
            let (x1, z1) = (self.x[w], self.z[w]);
            let (x2, z2) = (other.x[w], other.z[w]);
            let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
            plus += ((px & qy) | (py & qz) | (pz & qx)).count_ones();
            minus += ((px & qz) | (py & qx) | (pz & qy)).count_ones();
            self.x[w] = x1 ^ x2;
            self.z[w] = z1 ^ z2;
        }
        let e = self.phase as u32 + other.phase as u32 + plus + 3 * minus;
        self.phase = (e & 3) as u8;
    }

    /// Whether the two strings commute (symplectic form vanishes).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dims(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 0
    }

    /// Letters on `sites` as a new string with phase `+1`.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        let mut r = PauliString::identity(sites.len());
        for (j, &s) in sites.iter().enumerate() {
            r.set_bits(j, self.x_bit(s), self.z_bit(s));
        }
        r
    }

    /// Packs the X and Z bits of a string on at most 32 qubits.
    pub(crate) fn packed_bits(&self) -> (u64, u64) {
        debug_assert!(self.n <= 64);
        (self.x.first().copied().unwrap_or(0), self.z.first().copied().unwrap_or(0))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for k in 0..self.n {
            write!(f, "{}", self.letter(k))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = CtnError;

    /// Parses `[+-]?i?[IXYZ]+`.
    fn from_str(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let mut phase = 0u8;
        match chars.first() {
            Some('+') => pos += 1,
            Some('-') => {
                phase = 2;
                pos += 1;
            }
            _ => {}
        }
        if chars.get(pos) == Some(&'i') {
            phase += 1;
            pos += 1;
        }
        if pos == chars.len() {
            return Err(CtnError::Parse { pos, msg: "empty Pauli string".into() });
        }
        let mut letters = Vec::with_capacity(chars.len() - pos);
        for (k, &c) in chars.iter().enumerate().skip(pos) {
            match Pauli::from_char(c) {
                Some(p) => letters.push(p),
                None => {
                    return Err(CtnError::Parse { pos: k, msg: format!("invalid Pauli letter {c:?}") })
                }
            }
        }
        let mut p = PauliString::from_letters(&letters);
        p.phase = phase & 3;
        Ok(p)
    }
}
