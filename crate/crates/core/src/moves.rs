//! Reidemeister moves on diagrams: site enumeration, application,
//! change verification, and seeded random diagram generation.
//!
//! Reducing sites are faces: a monogon hosts an RI move, a bigon whose
//! strands run one-over-both hosts an RII move, and a trigon whose three
//! strands are linearly ordered by the over-relation hosts an RIII move.
//! Increasing sites are addressed by darts; records are single-use and
//! not portable across diagrams.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{g_hom, is_in_r, GroupElement, RForm, RGenerator};
use crate::diagram::{Crossing, Diagram, DiagramError, EdgeLabel, Port, Sign};
use crate::faces::{Dart, Face, Orient};
use crate::invariant::i_lk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    RI,
    RII,
    RIII,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::RI => write!(f, "RI"),
            MoveKind::RII => write!(f, "RII"),
            MoveKind::RIII => write!(f, "RIII"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveDir {
    Reduce,
    Increase,
}

/// Which side of an oriented edge a new kink's lobe pokes into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "L"),
            Side::Right => write!(f, "R"),
        }
    }
}

/// Whether the pushed strand of an increasing RII passes over or under
/// the target strand at both new crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Over,
    Under,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Over => write!(f, "over"),
            Depth::Under => write!(f, "under"),
        }
    }
}

/// Target of an increasing RI move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiTarget {
    Edge(EdgeLabel),
    /// Twist a crossing-free circle into a one-crossing kink. Offered
    /// only on diagrams without crossings.
    FreeCircle,
}

/// A fully addressed move, applicable to one specific diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MoveRecord {
    RiReduce { face: Face },
    RiIncrease { target: RiTarget, sign: Sign, side: Side },
    RiiReduce { face: Face },
    RiiIncrease { src: Dart, dst: Dart, depth: Depth },
    Riii { face: Face },
}

impl MoveRecord {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveRecord::RiReduce { .. } | MoveRecord::RiIncrease { .. } => MoveKind::RI,
            MoveRecord::RiiReduce { .. } | MoveRecord::RiiIncrease { .. } => MoveKind::RII,
            MoveRecord::Riii { .. } => MoveKind::RIII,
        }
    }

    /// Reduce or increase; `None` for the self-inverse RIII.
    pub fn direction(&self) -> Option<MoveDir> {
        match self {
            MoveRecord::RiReduce { .. } | MoveRecord::RiiReduce { .. } => Some(MoveDir::Reduce),
            MoveRecord::RiIncrease { .. } | MoveRecord::RiiIncrease { .. } => {
                Some(MoveDir::Increase)
            }
            MoveRecord::Riii { .. } => None,
        }
    }

    /// Crossing-count delta when applied.
    pub fn crossing_delta(&self) -> i64 {
        match self {
            MoveRecord::RiReduce { .. } => -1,
            MoveRecord::RiIncrease { .. } => 1,
            MoveRecord::RiiReduce { .. } => -2,
            MoveRecord::RiiIncrease { .. } => 2,
            MoveRecord::Riii { .. } => 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("move site not found in this diagram")]
    SiteNotFound,
    #[error("site is not admissible: {0}")]
    NotAdmissible(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("trace line {line}: {msg}")]
    Trace { line: usize, msg: String },
}

fn bigon_admissible(ports: &[Port]) -> bool {
    let (p1, p2) = (ports[0], ports[1]);
    p1.0 != p2.0 && (p1.1 % 2) != (p2.1 % 2)
}

fn trigon_admissible(ports: &[Port]) -> bool {
    let cs: Vec<usize> = ports.iter().map(|p| p.0).collect();
    if cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
        return false;
    }
    let parities: Vec<u8> = ports.iter().map(|p| p.1 % 2).collect();
    !(parities[0] == parities[1] && parities[1] == parities[2])
}

fn distinct_edges(d: &Diagram, ports: &[Port]) -> bool {
    let mut edges: Vec<EdgeLabel> = ports.iter().map(|&p| d.edge_at(p)).collect();
    edges.sort_unstable();
    edges.windows(2).all(|w| w[0] != w[1])
}

/// All applicable moves: every reducing RI/RII/RIII site, plus the
/// finite census of increasing moves (RI on each edge with both signs
/// and sides; RII for each ordered pair of distinct-edge darts sharing a
/// face, with both depth choices).
pub fn enumerate_moves(d: &Diagram) -> Vec<MoveRecord> {
    let mut out = Vec::new();
    let faces = d.faces_with_ports();
    for (face, ports) in &faces {
        match face.len() {
            1 => out.push(MoveRecord::RiReduce { face: face.clone() }),
            2 => {
                if distinct_edges(d, ports) && bigon_admissible(ports) {
                    out.push(MoveRecord::RiiReduce { face: face.clone() });
                }
            }
            3 => {
                if distinct_edges(d, ports) && trigon_admissible(ports) {
                    out.push(MoveRecord::Riii { face: face.clone() });
                }
            }
            _ => {}
        }
    }
    for e in 0..d.num_edges() {
        for sign in [Sign::Pos, Sign::Neg] {
            for side in [Side::Left, Side::Right] {
                out.push(MoveRecord::RiIncrease {
                    target: RiTarget::Edge(e),
                    sign,
                    side,
                });
            }
        }
    }
    if d.num_crossings() == 0 && d.free_circles() > 0 {
        for sign in [Sign::Pos, Sign::Neg] {
            for side in [Side::Left, Side::Right] {
                out.push(MoveRecord::RiIncrease {
                    target: RiTarget::FreeCircle,
                    sign,
                    side,
                });
            }
        }
    }
    for (face, _) in &faces {
        let darts = face.darts();
        for i in 0..darts.len() {
            for j in 0..darts.len() {
                if i == j || darts[i].edge == darts[j].edge {
                    continue;
                }
                for depth in [Depth::Over, Depth::Under] {
                    out.push(MoveRecord::RiiIncrease {
                        src: darts[i],
                        dst: darts[j],
                        depth,
                    });
                }
            }
        }
    }
    out
}

fn find_face(d: &Diagram, face: &Face) -> Option<Vec<Port>> {
    d.faces_with_ports()
        .into_iter()
        .find(|(f, _)| f == face)
        .map(|(_, ports)| ports)
}

fn apply_ri_reduce(d: &Diagram, ports: &[Port]) -> Result<Diagram, MoveError> {
    let (c, s) = ports[0];
    // loop edge occupies slots s and s+1; the strand passes through the
    // remaining two slots
    let keep = (((s + 2) % 4), ((s + 3) % 4));
    Ok(d.rebuild_without(&[c], &[((c, keep.0), (c, keep.1))])?)
}

fn apply_rii_reduce(d: &Diagram, ports: &[Port]) -> Result<Diagram, MoveError> {
    if !bigon_admissible(ports) || !distinct_edges(d, ports) {
        return Err(MoveError::NotAdmissible(
            "bigon strands are not one-over-both".into(),
        ));
    }
    let mut connect = Vec::new();
    for &(c, s) in ports {
        connect.push(((c, s), (c, (s + 2) % 4)));
        connect.push(((c, (s + 1) % 4), (c, (s + 3) % 4)));
    }
    let removed: Vec<usize> = ports.iter().map(|p| p.0).collect();
    Ok(d.rebuild_without(&removed, &connect)?)
}

fn apply_riii(d: &Diagram, ports: &[Port]) -> Result<Diagram, MoveError> {
    if !trigon_admissible(ports) || !distinct_edges(d, ports) {
        return Err(MoveError::NotAdmissible(
            "trigon over-relation is cyclic or degenerate".into(),
        ));
    }
    let c: Vec<usize> = ports.iter().map(|p| p.0).collect();
    let s: Vec<u8> = ports.iter().map(|p| p.1).collect();
    // Inner edge e[i] arrives at ports[i]; strand E[i] contains e[i] and
    // passes crossings c[i-1] and c[i]. At c[i] the crossing pair is
    // E[i] x E[i+1].
    let e: Vec<EdgeLabel> = ports.iter().map(|&p| d.edge_at(p)).collect();
    // External ports: x[i] continues strand E[i] at c[i]; y[i] continues
    // strand E[i+1] at c[i].
    let ex: Vec<EdgeLabel> = (0..3)
        .map(|i| d.edge_at((c[i], (s[i] + 2) % 4)))
        .collect();
    let ey: Vec<EdgeLabel> = (0..3)
        .map(|i| d.edge_at((c[i], (s[i] + 3) % 4)))
        .collect();
    // dir[i]: strand E[i] flows from its y[i-1] end toward its x[i] end.
    let dir: Vec<bool> = (0..3).map(|i| d.head(e[i]) == (c[i], s[i])).collect();
    let signs: Vec<Sign> = (0..3)
        .map(|i| d.crossing_sign(c[i]).expect("in range"))
        .collect();

    // After the slide each strand meets its two crossings in the
    // opposite order: E[i] now attaches its y[i-1]-side edge at the new
    // pair crossing N[i] and its x[i]-side edge at N[i-1], with a new
    // inner edge (reusing label e[i]) between them.
    let prev = |i: usize| (i + 2) % 3;
    let next = |i: usize| (i + 1) % 3;

    // (incoming, outgoing) edges of strand E[i] at new crossing N[j],
    // where j is i or prev(i)
    let strand_at = |i: usize, at_n: usize| -> (EdgeLabel, EdgeLabel) {
        if at_n == i {
            if dir[i] {
                (ey[prev(i)], e[i])
            } else {
                (e[i], ey[prev(i)])
            }
        } else {
            debug_assert_eq!(at_n, prev(i));
            if dir[i] {
                (e[i], ex[i])
            } else {
                (ex[i], e[i])
            }
        }
    };

    let mut crossings: Vec<Crossing> = d.crossings().to_vec();
    let mut over_in: Vec<u8> = (0..d.num_crossings())
        .map(|k| d.over_in_slot(k))
        .collect();
    for j in 0..3 {
        let (a_in, a_out) = strand_at(j, j); // E[j] at N[j]
        let (b_in, b_out) = strand_at(next(j), j); // E[j+1] at N[j]
        let e_j_over = s[j] % 2 == 1;
        let (tuple, oi) = if e_j_over {
            Diagram::make_crossing(b_in, b_out, a_in, a_out, signs[j])
        } else {
            Diagram::make_crossing(a_in, a_out, b_in, b_out, signs[j])
        };
        crossings[c[j]] = tuple;
        over_in[c[j]] = oi;
    }
    Ok(Diagram::from_parts(
        crossings,
        d.free_circles(),
        over_in,
    )?)
}

fn apply_ri_increase(
    d: &Diagram,
    target: RiTarget,
    sign: Sign,
    side: Side,
) -> Result<Diagram, MoveError> {
    let mut crossings: Vec<Crossing> = d.crossings().to_vec();
    let mut over_in: Vec<u8> = (0..d.num_crossings())
        .map(|k| d.over_in_slot(k))
        .collect();
    let mut circles = d.free_circles();
    let fresh = d.num_edges();
    let (e_in, e_out) = match target {
        RiTarget::Edge(e) => {
            if e >= d.num_edges() {
                return Err(MoveError::SiteNotFound);
            }
            // split e along its orientation: the tail port keeps the
            // label, the head port receives the new outgoing half
            let (hc, hs) = d.head(e);
            let e_out = fresh + 1;
            crossings[hc].0[hs as usize] = e_out;
            (e, e_out)
        }
        RiTarget::FreeCircle => {
            if circles == 0 {
                return Err(MoveError::SiteNotFound);
            }
            circles -= 1;
            (fresh + 1, fresh + 1)
        }
    };
    let loop_edge = fresh;
    // The lobe side and twist sign determine whether the incoming half
    // passes under or over at the new crossing.
    let under_first = (side == Side::Left) == (sign == Sign::Pos);
    let (tuple, oi) = if under_first {
        Diagram::make_crossing(e_in, loop_edge, loop_edge, e_out, sign)
    } else {
        Diagram::make_crossing(loop_edge, e_out, e_in, loop_edge, sign)
    };
    crossings.push(tuple);
    over_in.push(oi);
    Ok(Diagram::from_parts(crossings, circles, over_in)?)
}

fn apply_rii_increase(
    d: &Diagram,
    src: Dart,
    dst: Dart,
    depth: Depth,
) -> Result<Diagram, MoveError> {
    if src.edge == dst.edge {
        return Err(MoveError::NotAdmissible(
            "pushing an edge across itself is not supported".into(),
        ));
    }
    if src.edge >= d.num_edges() || dst.edge >= d.num_edges() {
        return Err(MoveError::SiteNotFound);
    }
    // both darts must lie on one face
    let faces = d.faces_with_ports();
    let shared = faces.iter().any(|(f, _)| {
        let ds = f.darts();
        ds.contains(&src) && ds.contains(&dst)
    });
    if !shared {
        return Err(MoveError::NotAdmissible(
            "darts do not share a face".into(),
        ));
    }

    let g = src.edge;
    let h = dst.edge;
    let w1 = src.orient;
    let w2 = dst.orient;

    let mut crossings: Vec<Crossing> = d.crossings().to_vec();
    let mut over_in: Vec<u8> = (0..d.num_crossings())
        .map(|k| d.over_in_slot(k))
        .collect();

    // Split both edges along their orientations: tail ports keep the old
    // labels (gA, hA), head ports receive the outgoing halves (gB, hB),
    // and tip/mid are the middle thirds.
    let g_a = g;
    let tip = d.num_edges();
    let g_b = tip + 1;
    let h_a = h;
    let mid = tip + 2;
    let h_b = tip + 3;
    let (ghc, ghs) = d.head(g);
    crossings[ghc].0[ghs as usize] = g_b;
    let (hhc, hhs) = d.head(h);
    crossings[hhc].0[hhs as usize] = h_b;

    // u is the first new crossing along the face walk of src; the face
    // walk of dst meets v first. The pushed strand's (in, out) edges:
    let (g_at_u, g_at_v) = match w1 {
        Orient::Fwd => ((g_a, tip), (tip, g_b)),
        Orient::Rev => ((tip, g_b), (g_a, tip)),
    };
    let (h_at_u, h_at_v) = match w2 {
        Orient::Fwd => ((mid, h_b), (h_a, mid)),
        Orient::Rev => ((h_a, mid), (mid, h_b)),
    };
    let sign_u = match depth {
        Depth::Over => {
            if w1 == w2 {
                Sign::Pos
            } else {
                Sign::Neg
            }
        }
        Depth::Under => {
            if w1 == w2 {
                Sign::Neg
            } else {
                Sign::Pos
            }
        }
    };
    let sign_v = sign_u.flip();

    let build = |g_io: (EdgeLabel, EdgeLabel), h_io: (EdgeLabel, EdgeLabel), sign: Sign| {
        match depth {
            Depth::Over => Diagram::make_crossing(h_io.0, h_io.1, g_io.0, g_io.1, sign),
            Depth::Under => Diagram::make_crossing(g_io.0, g_io.1, h_io.0, h_io.1, sign),
        }
    };
    let (tu, ou) = build(g_at_u, h_at_u, sign_u);
    let (tv, ov) = build(g_at_v, h_at_v, sign_v);
    crossings.push(tu);
    over_in.push(ou);
    crossings.push(tv);
    over_in.push(ov);
    Ok(Diagram::from_parts(crossings, d.free_circles(), over_in)?)
}

/// Apply a move. The record must address an existing, admissible site of
/// `d`; the result is validated and canonically relabeled.
pub fn apply(d: &Diagram, m: &MoveRecord) -> Result<Diagram, MoveError> {
    match m {
        MoveRecord::RiReduce { face } => {
            let ports = find_face(d, face).ok_or(MoveError::SiteNotFound)?;
            if ports.len() != 1 {
                return Err(MoveError::NotAdmissible("face is not a monogon".into()));
            }
            apply_ri_reduce(d, &ports)
        }
        MoveRecord::RiiReduce { face } => {
            let ports = find_face(d, face).ok_or(MoveError::SiteNotFound)?;
            if ports.len() != 2 {
                return Err(MoveError::NotAdmissible("face is not a bigon".into()));
            }
            apply_rii_reduce(d, &ports)
        }
        MoveRecord::Riii { face } => {
            let ports = find_face(d, face).ok_or(MoveError::SiteNotFound)?;
            if ports.len() != 3 {
                return Err(MoveError::NotAdmissible("face is not a trigon".into()));
            }
            apply_riii(d, &ports)
        }
        MoveRecord::RiIncrease { target, sign, side } => {
            apply_ri_increase(d, *target, *sign, *side)
        }
        MoveRecord::RiiIncrease { src, dst, depth } => {
            apply_rii_increase(d, *src, *dst, *depth)
        }
    }
}

/// Apply a move and return the record that undoes it (addressed to the
/// result). The inverse restores the original diagram up to canonical
/// relabeling.
pub fn apply_with_inverse(
    d: &Diagram,
    m: &MoveRecord,
) -> Result<(Diagram, MoveRecord), MoveError> {
    let after = apply(d, m)?;
    let before_key = d.iso_signature();
    let candidates: Vec<MoveRecord> = enumerate_moves(&after)
        .into_iter()
        .filter(|cand| match (m, cand) {
            (MoveRecord::RiReduce { .. }, MoveRecord::RiIncrease { .. }) => true,
            (MoveRecord::RiIncrease { .. }, MoveRecord::RiReduce { .. }) => true,
            (MoveRecord::RiiReduce { .. }, MoveRecord::RiiIncrease { .. }) => true,
            (MoveRecord::RiiIncrease { .. }, MoveRecord::RiiReduce { .. }) => true,
            (MoveRecord::Riii { .. }, MoveRecord::Riii { .. }) => true,
            _ => false,
        })
        .collect();
    for cand in candidates {
        if let Ok(back) = apply(&after, &cand) {
            if back.iso_signature() == before_key {
                return Ok((after, cand));
            }
        }
    }
    Err(MoveError::NotAdmissible(
        "no inverse move found; engine invariant violated".into(),
    ))
}

/// Verdict of checking one move's effect on the invariant.
#[derive(Debug, Clone)]
pub enum ChangeVerdict {
    /// The difference is an element of `R` whose form matches the move.
    Ok(RGenerator),
    /// The difference is in `R` but of the wrong form, or not in `R`.
    Mismatch {
        delta: GroupElement,
        kind: MoveKind,
    },
}

impl ChangeVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ChangeVerdict::Ok(_))
    }
}

/// Check that `i_lk(after) - i_lk(before)` has the change form the move
/// kind allows: `X_0`/`Y_0` for RI, `X_k + Y_k` or `X_k + Y_{k+1}` for
/// RII, `X_k - X_{k+1}` or `Y_k - Y_{k+1}` for RIII, up to sign.
pub fn verify_change(
    before: &Diagram,
    after: &Diagram,
    m: &MoveRecord,
) -> Result<ChangeVerdict, DiagramError> {
    let delta = i_lk(after)? - i_lk(before)?;
    let kind = m.kind();
    let verdict = match is_in_r(&delta) {
        Some(gen) => {
            let matches = matches!(
                (kind, gen.form),
                (MoveKind::RI, RForm::RiX0)
                    | (MoveKind::RI, RForm::RiY0)
                    | (MoveKind::RII, RForm::RiiXkYk)
                    | (MoveKind::RII, RForm::RiiXkYk1)
                    | (MoveKind::RIII, RForm::RiiiX)
                    | (MoveKind::RIII, RForm::RiiiY)
            );
            if matches {
                ChangeVerdict::Ok(gen)
            } else {
                ChangeVerdict::Mismatch { delta, kind }
            }
        }
        None => ChangeVerdict::Mismatch { delta, kind },
    };
    Ok(verdict)
}

/// Grow a random unknot diagram from the trivial diagram by seeded
/// moves: mostly increasing, occasionally reducing or sliding, until the
/// crossing count reaches `target`. Returns the diagram and the move
/// trace from `U`. Deterministic per seed.
pub fn random_unknot(seed: u64, target: usize) -> (Diagram, Vec<MoveRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Diagram::unknot();
    let mut trace = Vec::new();
    while d.num_crossings() < target {
        let all = enumerate_moves(&d);
        let room = target - d.num_crossings();
        let increases: Vec<&MoveRecord> = all
            .iter()
            .filter(|m| {
                m.direction() == Some(MoveDir::Increase) && m.crossing_delta() <= room as i64
            })
            .collect();
        let others: Vec<&MoveRecord> = all
            .iter()
            .filter(|m| m.direction() == Some(MoveDir::Reduce) || m.kind() == MoveKind::RIII)
            .collect();
        let pool = if !others.is_empty() && rng.gen_bool(0.2) {
            &others
        } else {
            &increases
        };
        let mv = pool[rng.gen_range(0..pool.len())].clone();
        d = apply(&d, &mv).expect("enumerated move must apply");
        trace.push(mv);
    }
    (d, trace)
}

// ---------------------------------------------------------------------
// Trace files
// ---------------------------------------------------------------------

fn face_index(d: &Diagram, face: &Face) -> Option<usize> {
    d.faces_with_ports().iter().position(|(f, _)| f == face)
}

fn dart_position(face: &Face, dart: &Dart) -> Option<usize> {
    face.darts().iter().position(|d| d == dart)
}

/// Render a move sequence as a replayable trace file. Each line
/// addresses a site of the diagram reached so far, so the sequence is
/// replayed internally while writing.
pub fn trace_to_text(
    start: &Diagram,
    moves: &[MoveRecord],
    diagram_name: &str,
    seed: Option<u64>,
) -> Result<String, MoveError> {
    let mut out = format!("diagram {diagram_name}\n");
    if let Some(s) = seed {
        out.push_str(&format!("seed {s}\n"));
    }
    let mut d = start.clone();
    for m in moves {
        let line = match m {
            MoveRecord::RiReduce { face } => {
                let idx = face_index(&d, face).ok_or(MoveError::SiteNotFound)?;
                format!("RI- face={idx}")
            }
            MoveRecord::RiiReduce { face } => {
                let idx = face_index(&d, face).ok_or(MoveError::SiteNotFound)?;
                format!("RII- face={idx}")
            }
            MoveRecord::Riii { face } => {
                let idx = face_index(&d, face).ok_or(MoveError::SiteNotFound)?;
                format!("RIII face={idx}")
            }
            MoveRecord::RiIncrease { target, sign, side } => match target {
                RiTarget::Edge(e) => format!("RI+ edge={e} sign={sign} side={side}"),
                RiTarget::FreeCircle => format!("RI+ circle sign={sign} side={side}"),
            },
            MoveRecord::RiiIncrease { src, dst, depth } => {
                let faces = d.faces_with_ports();
                let (idx, face) = faces
                    .iter()
                    .enumerate()
                    .find(|(_, (f, _))| f.darts().contains(src))
                    .map(|(i, (f, _))| (i, f))
                    .ok_or(MoveError::SiteNotFound)?;
                let i = dart_position(face, src).ok_or(MoveError::SiteNotFound)?;
                let j = dart_position(face, dst).ok_or(MoveError::SiteNotFound)?;
                format!("RII+ face={idx} from={i} to={j} depth={depth}")
            }
        };
        out.push_str(&line);
        out.push('\n');
        d = apply(&d, m)?;
    }
    Ok(out)
}

fn parse_kv<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str, MoveError> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| MoveError::Trace {
            line,
            msg: format!("expected {key}=<value>, got `{tok}`"),
        })
}

/// Parse and replay a trace file against `start`, returning the final
/// diagram and the resolved move records.
pub fn replay_trace(
    start: &Diagram,
    text: &str,
) -> Result<(Diagram, Vec<MoveRecord>), MoveError> {
    let mut d = start.clone();
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| MoveError::Trace { line, msg };
        let get_face = |d: &Diagram, tok: &str| -> Result<Face, MoveError> {
            let idx: usize = parse_kv(tok, "face", line)?
                .parse()
                .map_err(|_| err("bad face index".into()))?;
            let faces = d.faces_with_ports();
            faces
                .get(idx)
                .map(|(f, _)| f.clone())
                .ok_or_else(|| err(format!("face {idx} out of range")))
        };
        let record = match toks[0] {
            "diagram" | "seed" => continue,
            "RI-" if toks.len() == 2 => MoveRecord::RiReduce {
                face: get_face(&d, toks[1])?,
            },
            "RII-" if toks.len() == 2 => MoveRecord::RiiReduce {
                face: get_face(&d, toks[1])?,
            },
            "RIII" if toks.len() == 2 => MoveRecord::Riii {
                face: get_face(&d, toks[1])?,
            },
            "RI+" if toks.len() == 4 => {
                let target = if toks[1] == "circle" {
                    RiTarget::FreeCircle
                } else {
                    RiTarget::Edge(
                        parse_kv(toks[1], "edge", line)?
                            .parse()
                            .map_err(|_| err("bad edge".into()))?,
                    )
                };
                let sign = match parse_kv(toks[2], "sign", line)? {
                    "+" => Sign::Pos,
                    "-" => Sign::Neg,
                    other => return Err(err(format!("bad sign `{other}`"))),
                };
                let side = match parse_kv(toks[3], "side", line)? {
                    "L" => Side::Left,
                    "R" => Side::Right,
                    other => return Err(err(format!("bad side `{other}`"))),
                };
                MoveRecord::RiIncrease { target, sign, side }
            }
            "RII+" if toks.len() == 5 => {
                let face = get_face(&d, toks[1])?;
                let i: usize = parse_kv(toks[2], "from", line)?
                    .parse()
                    .map_err(|_| err("bad dart index".into()))?;
                let j: usize = parse_kv(toks[3], "to", line)?
                    .parse()
                    .map_err(|_| err("bad dart index".into()))?;
                let depth = match parse_kv(toks[4], "depth", line)? {
                    "over" => Depth::Over,
                    "under" => Depth::Under,
                    other => return Err(err(format!("bad depth `{other}`"))),
                };
                let darts = face.darts();
                if i >= darts.len() || j >= darts.len() {
                    return Err(err("dart index out of range".into()));
                }
                MoveRecord::RiiIncrease {
                    src: darts[i],
                    dst: darts[j],
                    depth,
                }
            }
            other => return Err(err(format!("unknown move `{other}`"))),
        };
        d = apply(&d, &record).map_err(|e| MoveError::Trace {
            line,
            msg: e.to_string(),
        })?;
        records.push(record);
    }
    Ok((d, records))
}

/// Sanity bound used by the randomized harnesses: a single move changes
/// `g` of the invariant by at most 1.
pub fn g_delta_bounded(delta: &GroupElement) -> bool {
    g_hom(delta).abs() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(text: &str) -> Diagram {
        Diagram::from_pd_text(text).unwrap()
    }

    fn kink() -> Diagram {
        pd("X 0 0 1 1")
    }

    #[test]
    fn kink_has_single_reducing_move() {
        let d = kink();
        let reduces: Vec<MoveRecord> = enumerate_moves(&d)
            .into_iter()
            .filter(|m| m.direction() == Some(MoveDir::Reduce))
            .collect();
        // both monogons of the kink splice to U; each is an RI site
        assert!(!reduces.is_empty());
        assert!(reduces.iter().all(|m| m.kind() == MoveKind::RI));
        let after = apply(&d, &reduces[0]).unwrap();
        assert_eq!(after, Diagram::unknot());
    }

    #[test]
    fn unknot_moves() {
        let u = Diagram::unknot();
        let moves = enumerate_moves(&u);
        assert!(moves
            .iter()
            .all(|m| m.direction() == Some(MoveDir::Increase)));
        assert_eq!(moves.len(), 4);
    }

    #[test]
    fn ri_round_trip_on_unknot() {
        let u = Diagram::unknot();
        for sign in [Sign::Pos, Sign::Neg] {
            for side in [Side::Left, Side::Right] {
                let m = MoveRecord::RiIncrease {
                    target: RiTarget::FreeCircle,
                    sign,
                    side,
                };
                let (kinked, inv) = apply_with_inverse(&u, &m).unwrap();
                assert_eq!(kinked.num_crossings(), 1);
                assert_eq!(kinked.writhe(), sign.value());
                let back = apply(&kinked, &inv).unwrap();
                assert_eq!(back, u);
            }
        }
    }

    #[test]
    fn ri_increase_delta_is_x0_or_y0() {
        let d = pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3");
        for e in 0..d.num_edges() {
            for sign in [Sign::Pos, Sign::Neg] {
                for side in [Side::Left, Side::Right] {
                    let m = MoveRecord::RiIncrease {
                        target: RiTarget::Edge(e),
                        sign,
                        side,
                    };
                    let after = apply(&d, &m).unwrap();
                    assert_eq!(after.num_crossings(), 4);
                    assert_eq!(after.writhe(), d.writhe() + sign.value());
                    let verdict = verify_change(&d, &after, &m).unwrap();
                    assert!(verdict.is_ok(), "bad delta for e={e} {sign} {side:?}");
                }
            }
        }
    }

    #[test]
    fn trefoil_has_no_reducing_moves() {
        let d = pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3");
        let moves = enumerate_moves(&d);
        assert!(moves
            .iter()
            .all(|m| m.direction() == Some(MoveDir::Increase)));
        // both trigon faces of the standard trefoil are cyclic
        let faces = d.faces();
        let trigons = faces.faces.iter().filter(|f| f.len() == 3).count();
        assert_eq!(trigons, 2);
    }

    #[test]
    fn rii_increase_all_variants_verify() {
        let d = kink();
        let faces = d.faces_with_ports();
        let mut seen_forms = std::collections::HashSet::new();
        for (face, _) in &faces {
            let darts = face.darts();
            for i in 0..darts.len() {
                for j in 0..darts.len() {
                    if i == j || darts[i].edge == darts[j].edge {
                        continue;
                    }
                    for depth in [Depth::Over, Depth::Under] {
                        let m = MoveRecord::RiiIncrease {
                            src: darts[i],
                            dst: darts[j],
                            depth,
                        };
                        let after = apply(&d, &m).unwrap();
                        assert_eq!(after.num_crossings(), 3);
                        assert_eq!(after.writhe(), d.writhe());
                        let verdict = verify_change(&d, &after, &m).unwrap();
                        match verdict {
                            ChangeVerdict::Ok(gen) => {
                                seen_forms.insert(gen.form);
                            }
                            ChangeVerdict::Mismatch { delta, .. } => {
                                panic!("RII delta {delta} not of RII form")
                            }
                        }
                    }
                }
            }
        }
        assert!(!seen_forms.is_empty());
    }

    #[test]
    fn rii_round_trip() {
        let d = kink();
        let faces = d.faces_with_ports();
        for (face, _) in &faces {
            let darts = face.darts();
            for i in 0..darts.len() {
                for j in 0..darts.len() {
                    if i == j || darts[i].edge == darts[j].edge {
                        continue;
                    }
                    let m = MoveRecord::RiiIncrease {
                        src: darts[i],
                        dst: darts[j],
                        depth: Depth::Over,
                    };
                    let (after, inv) = apply_with_inverse(&d, &m).unwrap();
                    let back = apply(&after, &inv).unwrap();
                    assert_eq!(back.iso_signature(), d.iso_signature());
                }
            }
        }
    }

    #[test]
    fn random_unknot_is_deterministic_and_valid() {
        let (d1, t1) = random_unknot(7, 12);
        let (d2, t2) = random_unknot(7, 12);
        assert_eq!(d1, d2);
        assert_eq!(t1.len(), t2.len());
        assert_eq!(d1.num_crossings(), 12);
        assert!(d1.trace_components().is_knot());
        assert!(d1.validate().is_valid());
        let (d3, _) = random_unknot(8, 12);
        assert_ne!(d1, d3, "different seeds should diverge");
        let (u, t) = random_unknot(3, 0);
        assert_eq!(u, Diagram::unknot());
        assert!(t.is_empty());
    }

    #[test]
    fn random_traces_verify_and_replay() {
        for seed in 0..6u64 {
            let (_, trace) = random_unknot(seed, 10);
            let mut d = Diagram::unknot();
            let mut inverses = Vec::new();
            for m in &trace {
                let (after, inv) = apply_with_inverse(&d, m).unwrap();
                let verdict = verify_change(&d, &after, m).unwrap();
                assert!(verdict.is_ok(), "seed {seed}: move failed change table");
                inverses.push(inv);
                d = after;
            }
            // replaying the inverses in reverse returns to U
            for inv in inverses.iter().rev() {
                d = apply(&d, inv).unwrap();
            }
            assert_eq!(d, Diagram::unknot());
        }
    }

    #[test]
    fn writhe_and_count_deltas() {
        for seed in 0..4u64 {
            let (_, trace) = random_unknot(seed, 14);
            let mut d = Diagram::unknot();
            for m in &trace {
                let after = apply(&d, m).unwrap();
                let dm = after.num_crossings() as i64 - d.num_crossings() as i64;
                assert_eq!(dm, m.crossing_delta());
                let dw = (after.writhe() - d.writhe()).abs();
                match m.kind() {
                    MoveKind::RI => assert_eq!(dw, 1),
                    MoveKind::RII | MoveKind::RIII => assert_eq!(dw, 0),
                }
                d = after;
            }
        }
    }

    #[test]
    fn trace_file_round_trip() {
        let (end, trace) = random_unknot(11, 9);
        let u = Diagram::unknot();
        let text = trace_to_text(&u, &trace, "unknot.pd", Some(11)).unwrap();
        let (replayed, records) = replay_trace(&u, &text).unwrap();
        assert_eq!(replayed, end);
        assert_eq!(records, trace);
        let text2 = trace_to_text(&u, &records, "unknot.pd", Some(11)).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn stale_record_rejected() {
        let d = kink();
        let reduce = enumerate_moves(&d)
            .into_iter()
            .find(|m| m.direction() == Some(MoveDir::Reduce))
            .unwrap();
        let u = apply(&d, &reduce).unwrap();
        // the record addressed the kink's face; it is gone now
        assert!(matches!(
            apply(&u, &reduce),
            Err(MoveError::SiteNotFound)
        ));
    }
}
