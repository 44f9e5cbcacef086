//! Combinatorial knot diagram calculus.
//!
//! This crate models oriented knot and link diagrams on the sphere as PD
//! codes and provides:
//!
//! - structural operations: validation, component tracing, faces,
//!   crossing signs, writhe, oriented smoothing, linking numbers,
//!   mirroring ([`diagram`], [`faces`], [`pd`]);
//! - the free abelian group on symbols `X_k`, `Y_k` and the smoothing
//!   invariant that sums a symbol per crossing, indexed by the linking
//!   number of that crossing's smoothing ([`algebra`], [`invariant`]);
//! - a Reidemeister move engine: site enumeration, application, and
//!   verification of each move's effect on the invariant against the
//!   allowed change forms ([`moves`]);
//! - a family of unknot diagrams whose exact untangling cost is pinned
//!   between quadratic lower and upper bounds, with the explicit move
//!   sequence executed and checked ([`family`]).
//!
//! The guide under `book/` walks through the concepts; its code snippets
//! compile and run as doc-tests of this crate.

pub mod algebra;
pub mod diagram;
pub mod faces;
pub mod family;
pub mod invariant;
pub mod moves;
pub mod pd;

pub use algebra::{Family, GroupElement, RForm, RGenerator, RLength};
pub use diagram::{Crossing, Diagram, DiagramError, EdgeLabel, LinkComponentMap, Sign, ValidationReport};
pub use faces::{Dart, Face, FacesReport, Orient};
pub use family::{gen_dn, untangle_sequence, verify_untangle, UntangleError, UntangleReport};
pub use invariant::{i_lk, i_phi, lower_bound};
pub use moves::{
    apply, apply_with_inverse, enumerate_moves, random_unknot, verify_change, ChangeVerdict, Depth,
    MoveError, MoveKind, MoveRecord, RiTarget, Side,
};
pub use pd::PdParseError;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/invariant.md")]
    mod invariant {}
    #[doc = include_str!("../../../book/src/moves.md")]
    mod moves {}
    #[doc = include_str!("../../../book/src/family.md")]
    mod family {}
}
