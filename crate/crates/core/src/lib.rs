//! Clifford-augmented matrix product states.
//!
//! A state is stored as a pair `(C, |ψ⟩)`: a Clifford frame `C` kept as a
//! stabilizer tableau and a matrix product state `|ψ⟩`, representing the
//! physical vector `C|ψ⟩`. Clifford gates only touch the frame; non-Clifford
//! rotations are pulled back through the frame and applied to the MPS,
//! after which cooling routines try to move entanglement back into `C`.

pub mod circuit;
pub mod clifford;
pub mod ctn;
pub mod dense;
pub mod error;
pub mod experiments;
pub mod gateclasses;
pub mod mps;
pub mod pauli;
pub mod theory;

pub use clifford::{CliffordGate, CliffordTableau, Direction, GateKind, Side};
pub use ctn::{Cooler, CoolingPolicy, CoolingReport, CtnState, HeuristicTable};
pub use error::{CtnError, Result};
pub use gateclasses::{double_coset_classes, entangling_classes, GateClassTable, SymplecticElement};
pub use mps::{Mps, TruncationPolicy};
pub use pauli::{Pauli, PauliString};
