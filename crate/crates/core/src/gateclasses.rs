//! Entangling classes of `k`-qubit Cliffords (`k = 2, 3`).
//!
//! Two Cliffords `U` and `L·U` with `L` a product of single-qubit Cliffords
//! produce states with identical entanglement across every cut, so for
//! cooling purposes only the cosets `C_1^{⊗k} \ C_k` matter. Paulis and
//! phases are quotiented away first, which leaves the symplectic group
//! `Sp(2k, 2)` modulo local symplectics: 20 classes for `k = 2` and 6720 for
//! `k = 3`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{Read, Write};

use crate::clifford::CliffordTableau;
use crate::error::{CtnError, Result};
use crate::pauli::PauliString;

const MAGIC: &[u8; 8] = b"CTNCLS01";

/// Symplectic part of a `k`-qubit Clifford.
///
/// Column `j` is the binary image of the `j`-th generator in the order
/// `X_1..X_k, Z_1..Z_k`, stored as `2k` bits (x bits low, z bits high) at
/// offset `2k·j` of a single word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticElement {
    k: usize,
    packed: u64,
}

fn omega(k: usize, u: u64, v: u64) -> u32 {
    let mask = (1u64 << k) - 1;
    let (ux, uz) = (u & mask, u >> k);
    let (vx, vz) = (v & mask, v >> k);
    ((ux & vz) ^ (uz & vx)).count_ones() & 1
}

impl SymplecticElement {
    pub fn identity(k: usize) -> Self {
        let cols: Vec<u64> = (0..2 * k).map(|j| 1u64 << j).collect();
        Self::from_columns_unchecked(k, &cols)
    }

    fn from_columns_unchecked(k: usize, cols: &[u64]) -> Self {
        let w = 2 * k;
        let packed = cols.iter().enumerate().fold(0u64, |acc, (j, &c)| acc | (c << (w * j)));
        SymplecticElement { k, packed }
    }

    pub fn from_columns(k: usize, cols: &[u64]) -> Result<Self> {
        if !(1..=4).contains(&k) || cols.len() != 2 * k {
            return Err(CtnError::InvalidArgument(format!("need 2k columns for 1 <= k <= 4, got k={k}")));
        }
        if cols.iter().any(|&c| c >> (2 * k) != 0) {
            return Err(CtnError::InvalidArgument("column has bits beyond 2k".into()));
        }
        let e = Self::from_columns_unchecked(k, cols);
        if !e.is_symplectic() {
            return Err(CtnError::NotSymplectic);
        }
        Ok(e)
    }

    pub fn from_packed(k: usize, packed: u64) -> Result<Self> {
        let w = 2 * k;
        let cols: Vec<u64> = (0..w).map(|j| (packed >> (w * j)) & ((1u64 << w) - 1)).collect();
        Self::from_columns(k, &cols)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn packed(&self) -> u64 {
        self.packed
    }

    pub fn column(&self, j: usize) -> u64 {
        let w = 2 * self.k;
        (self.packed >> (w * j)) & ((1u64 << w) - 1)
    }

    /// Bit matrix `M[i][j]`: row `i` indexes `x_1..x_k, z_1..z_k` of column `j`.
    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let w = 2 * self.k;
        (0..w).map(|i| (0..w).map(|j| (self.column(j) >> i) & 1 == 1).collect()).collect()
    }

    /// `Mᵀ J M = J` over GF(2).
    pub fn is_symplectic(&self) -> bool {
        let k = self.k;
        for a in 0..2 * k {
            for b in a + 1..2 * k {
                let expect = u32::from(b == a + k);
                if omega(k, self.column(a), self.column(b)) != expect {
                    return false;
                }
            }
        }
        true
    }

    fn map_columns(&self, f: impl Fn(u64) -> u64) -> Self {
        let cols: Vec<u64> = (0..2 * self.k).map(|j| f(self.column(j))).collect();
        Self::from_columns_unchecked(self.k, &cols)
    }

    /// `G · self` for an elementary generator `G`.
    fn left_mul(&self, g: Generator) -> Self {
        let k = self.k;
        self.map_columns(|v| g.apply(k, v))
    }

    /// `self · G` for an elementary generator `G`.
    #[cfg(test)]
    fn right_mul(&self, g: Generator) -> Self {
        let k = self.k;
        let image = |w: u64| (0..2 * k).filter(|a| (w >> a) & 1 == 1).fold(0, |acc, a| acc ^ self.column(a));
        let cols: Vec<u64> = (0..2 * k).map(|j| image(g.apply(k, 1 << j))).collect();
        Self::from_columns_unchecked(k, &cols)
    }

    /// Phase-free part of a tableau.
    pub fn from_tableau(t: &CliffordTableau) -> Result<Self> {
        let k = t.n();
        let pack = |p: &PauliString| -> u64 {
            let (x, z) = p.packed_bits();
            x | (z << k)
        };
        let cols: Vec<u64> = (0..k).map(|j| pack(t.x_image(j))).chain((0..k).map(|j| pack(t.z_image(j)))).collect();
        Self::from_columns(k, &cols)
    }

    /// Tableau with this symplectic part and every image phase `+1`.
    pub fn lift(&self) -> CliffordTableau {
        let k = self.k;
        let to_pauli = |v: u64| -> PauliString {
            let x: Vec<bool> = (0..k).map(|q| (v >> q) & 1 == 1).collect();
            let z: Vec<bool> = (0..k).map(|q| (v >> (k + q)) & 1 == 1).collect();
            PauliString::from_bits(&x, &z, 0).expect("equal lengths")
        };
        let xs = (0..k).map(|j| to_pauli(self.column(j))).collect();
        let zs = (0..k).map(|j| to_pauli(self.column(k + j))).collect();
        CliffordTableau::from_images(xs, zs).expect("symplectic element lifts to a valid tableau")
    }

    /// `self⁻¹(v)` for a binary Pauli vector `v`: the vector `u` with `M u = v`.
    pub fn preimage(&self, v: u64) -> u64 {
        // M⁻¹ = J Mᵀ J, i.e. u_a = ω(column(partner(a)), v).
        let k = self.k;
        let mut u = 0u64;
        for a in 0..2 * k {
            let partner = if a < k { a + k } else { a - k };
            if omega(k, self.column(partner), v) == 1 {
                u |= 1 << a;
            }
        }
        u
    }
}

/// Lift of a symplectic element given its column vectors; fails when not symplectic.
pub fn lift_representative(s: &SymplecticElement) -> Result<CliffordTableau> {
    if !s.is_symplectic() {
        return Err(CtnError::NotSymplectic);
    }
    Ok(s.lift())
}

#[derive(Clone, Copy, Debug)]
enum Generator {
    H(usize),
    S(usize),
    Cx(usize, usize),
}

impl Generator {
    fn apply(self, k: usize, v: u64) -> u64 {
        let x = |q: usize| (v >> q) & 1;
        let z = |q: usize| (v >> (k + q)) & 1;
        match self {
            Generator::H(q) => {
                let (xq, zq) = (x(q), z(q));
                (v & !(1 << q) & !(1 << (k + q))) | (zq << q) | (xq << (k + q))
            }
            Generator::S(q) => v ^ (x(q) << (k + q)),
            Generator::Cx(c, t) => v ^ (x(c) << t) ^ (z(t) << (k + c)),
        }
    }

    fn local(k: usize) -> Vec<Generator> {
        (0..k).flat_map(|q| [Generator::H(q), Generator::S(q)]).collect()
    }

    fn all(k: usize) -> Vec<Generator> {
        let mut g = Self::local(k);
        for c in 0..k {
            for t in 0..k {
                if c != t {
                    g.push(Generator::Cx(c, t));
                }
            }
        }
        g
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 2 || k == 3 {
        Ok(())
    } else {
        Err(CtnError::InvalidArgument(format!("class tables exist for k = 2 or 3, got {k}")))
    }
}

/// All of `Sp(2k, 2)`, sorted by packed value.
pub fn enumerate_symplectic(k: usize) -> Result<Vec<SymplecticElement>> {
    check_k(k)?;
    let gens = Generator::all(k);
    let start = SymplecticElement::identity(k);
    let mut seen: HashSet<u64> = HashSet::from([start.packed]);
    let mut queue = VecDeque::from([start]);
    while let Some(e) = queue.pop_front() {
        for &g in &gens {
            let next = e.left_mul(g);
            if seen.insert(next.packed) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<SymplecticElement> = seen.into_iter().map(|packed| SymplecticElement { k, packed }).collect();
    out.sort_unstable();
    Ok(out)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let grand = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = grand;
            a = grand;
        }
        a
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// One representative per entangling class.
#[derive(Clone, Debug, PartialEq)]
pub struct GateClassTable {
    k: usize,
    representatives: Vec<SymplecticElement>,
    class_sizes: Vec<usize>,
}

/// Partitions `Sp(2k, 2)` into orbits under left multiplication by local
/// symplectics (union-find over the single-site `H`, `S` generators). The
/// representative of each class is its smallest packed element; classes are
/// listed in increasing representative order.
pub fn entangling_classes(k: usize) -> Result<GateClassTable> {
    let elements = enumerate_symplectic(k)?;
    let index: HashMap<u64, u32> = elements.iter().enumerate().map(|(i, e)| (e.packed, i as u32)).collect();
    let mut uf = UnionFind::new(elements.len());
    let local = Generator::local(k);
    for (i, e) in elements.iter().enumerate() {
        for &g in &local {
            let j = index[&e.left_mul(g).packed];
            uf.union(i as u32, j);
        }
    }
    // Elements are sorted, so the first member seen of each class is its minimum.
    let mut rep_of_root: HashMap<u32, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut class_sizes = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        let root = uf.find(i as u32);
        let slot = *rep_of_root.entry(root).or_insert_with(|| {
            representatives.push(*e);
            class_sizes.push(0);
            representatives.len() - 1
        });
        class_sizes[slot] += 1;
    }
    Ok(GateClassTable { k, representatives, class_sizes })
}

/// The class table used by the heuristic cooler; the same partition as
/// [`entangling_classes`].
pub fn double_coset_classes(k: usize) -> Result<GateClassTable> {
    entangling_classes(k)
}

impl GateClassTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[SymplecticElement] {
        &self.representatives
    }

    /// Class sizes in representative order (empty for tables read from disk).
    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// Representatives lifted to tableaus with all phases `+1`.
    pub fn tableaus(&self) -> Vec<CliffordTableau> {
        self.representatives.iter().map(SymplecticElement::lift).collect()
    }

    /// Index of the class containing `e`.
    pub fn class_of(&self, e: &SymplecticElement) -> Option<usize> {
        if e.k != self.k {
            return None;
        }
        let canon = canonical_form(e);
        self.representatives.binary_search(&canon).ok()
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        let io = |e| CtnError::io("writing class table", e);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&[self.k as u8]).map_err(io)?;
        w.write_all(&(self.representatives.len() as u64).to_le_bytes()).map_err(io)?;
        for r in &self.representatives {
            w.write_all(&r.packed.to_le_bytes()).map_err(io)?;
        }
        Ok(())
    }

    pub fn read(r: &mut impl Read) -> Result<Self> {
        let io = |e| CtnError::io("reading class table", e);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(CtnError::Parse { pos: 0, msg: "not a class table".into() });
        }
        let mut kb = [0u8; 1];
        r.read_exact(&mut kb).map_err(io)?;
        let k = kb[0] as usize;
        check_k(k)?;
        let mut word = [0u8; 8];
        r.read_exact(&mut word).map_err(io)?;
        let count = u64::from_le_bytes(word) as usize;
        let mut representatives = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            r.read_exact(&mut word).map_err(io)?;
            representatives.push(SymplecticElement::from_packed(k, u64::from_le_bytes(word))?);
        }
        Ok(GateClassTable { k, representatives, class_sizes: Vec::new() })
    }
}

/// Smallest element of the left local orbit of `e`.
pub fn canonical_form(e: &SymplecticElement) -> SymplecticElement {
    let local = Generator::local(e.k);
    let mut seen: HashSet<u64> = HashSet::from([e.packed]);
    let mut queue = VecDeque::from([*e]);
    let mut best = *e;
    while let Some(x) = queue.pop_front() {
        best = best.min(x);
        for &g in &local {
            let y = x.left_mul(g);
            if seen.insert(y.packed) {
                queue.push_back(y);
            }
        }
    }
    best
}

/// Canonical key of the 2-dimensional subspace `M⁻¹(V_q)` where `V_q` holds
/// the Paulis supported on site `q`: the three nonzero vectors, sorted and packed.
pub fn site_preimage_plane(e: &SymplecticElement, q: usize) -> u64 {
    let k = e.k;
    let a = e.preimage(1 << q);
    let b = e.preimage(1 << (k + q));
    let mut v = [a, b, a ^ b];
    v.sort_unstable();
    let w = 2 * k;
    v[0] | (v[1] << w) | (v[2] << (2 * w))
}
