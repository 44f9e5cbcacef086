//! The quadratic untangling family: diagrams `D_n` of the unknot with
//! `7n - 1` crossings whose Reidemeister distance to the trivial diagram
//! is pinned between `2n^2 + 3n - 2` and `2n^2 + 3n`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::GroupElement;
use crate::diagram::{Diagram, DiagramError};
use crate::moves::{MoveError, MoveRecord};

/// Crossing-count checkpoints after each phase of the untangling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Checkpoints {
    pub after_riii: usize,
    pub after_rii_a: usize,
    pub after_rii_b: usize,
    pub after_ri: usize,
}

/// Move counts of the four untangling phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    pub riii: usize,
    pub rii_a: usize,
    pub rii_b: usize,
    pub ri: usize,
}

/// Result of executing and verifying the untangling of one `D_n`.
#[derive(Debug, Clone, Serialize)]
pub struct UntangleReport {
    pub n: usize,
    pub moves_executed: usize,
    pub phase_counts: PhaseCounts,
    #[serde(serialize_with = "serialize_deltas")]
    pub per_move_deltas: Vec<GroupElement>,
    pub checkpoints: Checkpoints,
    pub final_is_u: bool,
    pub lower: i64,
    pub upper: i64,
}

fn serialize_deltas<S: serde::Serializer>(
    deltas: &[GroupElement],
    ser: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(deltas.len()))?;
    for d in deltas {
        seq.serialize_element(&d.to_string())?;
    }
    seq.end()
}

#[derive(Debug, Error)]
pub enum UntangleError {
    #[error("move {index} failed: {source}")]
    Move {
        index: usize,
        #[source]
        source: MoveError,
    },
    #[error("move {index}: invariant change {delta} does not match {expected}")]
    ChangeMismatch {
        index: usize,
        delta: String,
        expected: String,
    },
    #[error("checkpoint after phase {phase}: {found} crossings, expected {expected}")]
    Checkpoint {
        phase: &'static str,
        found: usize,
        expected: usize,
    },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// The diagram `D_n` (placeholder while the template is derived).
pub fn gen_dn(_n: usize) -> Diagram {
    unimplemented!("family template under construction")
}

/// The explicit untangling sequence for `D_n` (placeholder).
pub fn untangle_sequence(_n: usize) -> Result<Vec<MoveRecord>, UntangleError> {
    unimplemented!("family template under construction")
}

/// Execute and verify the untangling of `D_n` (placeholder).
pub fn verify_untangle(_n: usize) -> Result<UntangleReport, UntangleError> {
    unimplemented!("family template under construction")
}
