//! Oriented knot and link diagrams on the sphere, encoded as PD codes.
//!
//! A diagram is a list of crossings, each holding the four incident edge
//! labels in counterclockwise order starting from the incoming under-edge,
//! plus a count of crossing-free circle components (which PD codes cannot
//! express on their own).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index into a diagram's edge set. Canonical diagrams use exactly
/// `0..2m` where `m` is the crossing count, labels increasing along
/// each component's orientation.
pub type EdgeLabel = usize;

/// A port is one of the four slots of one crossing.
pub(crate) type Port = (usize, u8);

/// Crossing sign under the right-handed convention: positive iff the
/// over-strand runs from slot `d` to slot `b` of the tuple `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Pos => write!(f, "+"),
            Sign::Neg => write!(f, "-"),
        }
    }
}

/// One crossing: the tuple `(a, b, c, d)` of incident edge labels listed
/// counterclockwise from the incoming under-edge `a`. Slot `c` (index 2)
/// is the outgoing under-edge; the over-strand occupies slots `b` and `d`,
/// its direction determined by tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing(pub [EdgeLabel; 4]);

impl Crossing {
    pub fn slots(&self) -> [EdgeLabel; 4] {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("edge label {label} appears {count} times, expected exactly 2")]
    LabelMultiplicity { label: EdgeLabel, count: usize },
    #[error("over/under tracing is inconsistent at edge {edge}")]
    OrientationConflict { edge: EdgeLabel },
    #[error("rotation system is not spherical: component with {crossings} crossings has {faces} faces, expected {expected}")]
    NonPlanar {
        crossings: usize,
        faces: usize,
        expected: usize,
    },
    #[error("operation requires a knot diagram, found {components} components")]
    NotAKnot { components: usize },
    #[error("crossing index {index} out of range for diagram with {len} crossings")]
    CrossingOutOfRange { index: usize, len: usize },
    #[error("linking number requires exactly 2 components, found {components}")]
    NotTwoComponents { components: usize },
    #[error("inter-component sign sum {sum} is odd; tracing is corrupt")]
    OddInterComponentSum { sum: i64 },
}

/// Partition of a diagram's edges into oriented closed components.
/// Crossing-free circles occupy the trailing component indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkComponentMap {
    component_of: Vec<usize>,
    traced: usize,
    free_circles: usize,
}

impl LinkComponentMap {
    /// Component index of an edge.
    pub fn component_of(&self, edge: EdgeLabel) -> usize {
        self.component_of[edge]
    }

    /// Number of components traced through crossings.
    pub fn traced_components(&self) -> usize {
        self.traced
    }

    /// Total component count including free circles.
    pub fn component_count(&self) -> usize {
        self.traced + self.free_circles
    }

    pub fn is_knot(&self) -> bool {
        self.component_count() == 1
    }
}

/// Structural summary produced by [`Diagram::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub crossings: usize,
    pub edges: usize,
    pub faces: usize,
    pub traced_components: usize,
    pub free_circles: usize,
    pub component_count: usize,
    /// Crossing-graph connectivity; free circles are carried alongside.
    pub connected: bool,
    pub writhe: i64,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// An oriented diagram on the sphere. Immutable after construction;
/// edge labels are canonical (`0..2m`, increasing along each component)
/// and the over-strand direction of every crossing is resolved.
#[derive(Debug, Clone)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    free_circles: usize,
    /// Per crossing: the slot (1 or 3) where the over-strand enters.
    over_in: Vec<u8>,
    /// Per edge: `[head, tail]` ports. The head is where the edge enters
    /// a crossing, the tail where it leaves one.
    ends: Vec<[Port; 2]>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings
            && self.free_circles == other.free_circles
            && self.over_in == other.over_in
    }
}

impl Eq for Diagram {}

impl std::hash::Hash for Diagram {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.crossings.hash(state);
        self.free_circles.hash(state);
        self.over_in.hash(state);
    }
}

fn occurrences(crossings: &[Crossing]) -> Result<HashMap<EdgeLabel, Vec<Port>>, DiagramError> {
    let mut occ: HashMap<EdgeLabel, Vec<Port>> = HashMap::new();
    for (c, cr) in crossings.iter().enumerate() {
        for (s, &e) in cr.0.iter().enumerate() {
            occ.entry(e).or_default().push((c, s as u8));
        }
    }
    for (&label, ports) in &occ {
        if ports.len() != 2 {
            return Err(DiagramError::LabelMultiplicity {
                label,
                count: ports.len(),
            });
        }
    }
    Ok(occ)
}

fn other_port(occ: &HashMap<EdgeLabel, Vec<Port>>, e: EdgeLabel, p: Port) -> Port {
    let v = &occ[&e];
    if v[0] == p {
        v[1]
    } else {
        v[0]
    }
}

/// Resolve the over-strand direction of every crossing by constraint
/// propagation: slot 0 is incoming, slot 2 outgoing, each edge has one
/// incoming and one outgoing end, and slots 1/3 of a crossing carry one
/// of each. Components that never pass under are not determined by the
/// PD structure; they are oriented by the label-successor rule (prefer
/// the orientation whose successor of the minimum-label edge has the
/// smaller label), which recovers canonical labelings exactly.
fn resolve_over_in(
    crossings: &[Crossing],
    occ: &HashMap<EdgeLabel, Vec<Port>>,
) -> Result<Vec<u8>, DiagramError> {
    let m = crossings.len();
    // incoming[(c, s)]: Some(true) if the edge at that port enters c.
    let mut incoming: Vec<[Option<bool>; 4]> = vec![[None; 4]; m];
    let mut queue: Vec<(Port, bool)> = Vec::new();
    for c in 0..m {
        queue.push(((c, 0), true));
        queue.push(((c, 2), false));
    }

    let assign =
        |incoming: &mut Vec<[Option<bool>; 4]>,
         queue: &mut Vec<(Port, bool)>,
         p: Port,
         val: bool,
         crossings: &[Crossing]|
         -> Result<(), DiagramError> {
            match incoming[p.0][p.1 as usize] {
                Some(existing) if existing != val => Err(DiagramError::OrientationConflict {
                    edge: crossings[p.0].0[p.1 as usize],
                }),
                Some(_) => Ok(()),
                None => {
                    incoming[p.0][p.1 as usize] = Some(val);
                    queue.push((p, val));
                    Ok(())
                }
            }
        };

    let mut pending = queue.clone();
    for ((c, s), val) in queue.drain(..) {
        incoming[c][s as usize] = Some(val);
        let _ = (c, s, val);
    }
    while let Some((p, val)) = pending.pop() {
        let e = crossings[p.0].0[p.1 as usize];
        let q = other_port(occ, e, p);
        assign(&mut incoming, &mut pending, q, !val, crossings)?;
        if p.1 == 1 || p.1 == 3 {
            let mate = (p.0, 4 - p.1);
            assign(&mut incoming, &mut pending, mate, !val, crossings)?;
        }
    }

    // Orient components that stayed ambiguous (they pass over at every
    // crossing they meet).
    loop {
        let mut seed: Option<EdgeLabel> = None;
        let mut labels: Vec<EdgeLabel> = occ.keys().copied().collect();
        labels.sort_unstable();
        for e in labels {
            let p = occ[&e][0];
            if incoming[p.0][p.1 as usize].is_none() {
                seed = Some(e);
                break;
            }
        }
        let Some(e0) = seed else { break };
        let mut ports = occ[&e0].clone();
        ports.sort_unstable();
        // Candidate A: e0 enters at the lexicographically smaller port.
        let succ = |head: Port| -> EdgeLabel {
            let exit = (head.0, (head.1 + 2) % 4);
            crossings[exit.0].0[exit.1 as usize]
        };
        let head = if succ(ports[0]) <= succ(ports[1]) {
            ports[0]
        } else {
            ports[1]
        };
        let mut pending = vec![(head, true)];
        incoming[head.0][head.1 as usize] = Some(true);
        while let Some((p, val)) = pending.pop() {
            let e = crossings[p.0].0[p.1 as usize];
            let q = other_port(occ, e, p);
            assign(&mut incoming, &mut pending, q, !val, crossings)?;
            if p.1 == 1 || p.1 == 3 {
                let mate = (p.0, 4 - p.1);
                assign(&mut incoming, &mut pending, mate, !val, crossings)?;
            }
        }
    }

    let mut over_in = Vec::with_capacity(m);
    for c in 0..m {
        let slot1_in = incoming[c][1].expect("all ports resolved");
        over_in.push(if slot1_in { 1 } else { 3 });
    }
    Ok(over_in)
}

impl Diagram {
    /// The trivial diagram `U`: no crossings, one circle.
    pub fn unknot() -> Diagram {
        Diagram {
            crossings: Vec::new(),
            free_circles: 1,
            over_in: Vec::new(),
            ends: Vec::new(),
        }
    }

    /// Build and validate a diagram from raw crossing tuples. Labels may
    /// be arbitrary (each appearing exactly twice); they are canonicalized
    /// to `0..2m`. The over-strand direction of every crossing is derived
    /// by tracing.
    pub fn new(crossings: Vec<Crossing>, free_circles: usize) -> Result<Diagram, DiagramError> {
        let occ = occurrences(&crossings)?;
        let over_in = resolve_over_in(&crossings, &occ)?;
        Self::from_parts(crossings, free_circles, over_in)
    }

    /// Construct from tuples plus known over-strand directions. Used by
    /// the move engine and smoothing, where orientation is inherited
    /// rather than re-derived (re-derivation could flip a component that
    /// never passes under).
    pub(crate) fn from_parts(
        crossings: Vec<Crossing>,
        free_circles: usize,
        over_in: Vec<u8>,
    ) -> Result<Diagram, DiagramError> {
        debug_assert_eq!(crossings.len(), over_in.len());
        let occ = occurrences(&crossings)?;

        // head port of edge e: the port where e is incoming.
        let head_of = |e: EdgeLabel| -> Result<Port, DiagramError> {
            let ports = &occ[&e];
            let is_in = |p: Port| -> bool {
                match p.1 {
                    0 => true,
                    2 => false,
                    s => s == over_in[p.0],
                }
            };
            match (is_in(ports[0]), is_in(ports[1])) {
                (true, false) => Ok(ports[0]),
                (false, true) => Ok(ports[1]),
                _ => Err(DiagramError::OrientationConflict { edge: e }),
            }
        };

        // Relabel canonically: components ordered by smallest old label,
        // labels assigned sequentially along the orientation.
        let mut old_labels: Vec<EdgeLabel> = occ.keys().copied().collect();
        old_labels.sort_unstable();
        let mut new_label: HashMap<EdgeLabel, EdgeLabel> = HashMap::new();
        let mut counter = 0;
        for &start in &old_labels {
            if new_label.contains_key(&start) {
                continue;
            }
            let mut e = start;
            loop {
                new_label.insert(e, counter);
                counter += 1;
                let head = head_of(e)?;
                let exit = (head.0, (head.1 + 2) % 4);
                e = crossings[exit.0].0[exit.1 as usize];
                if e == start {
                    break;
                }
                if new_label.contains_key(&e) {
                    // A successor repeating without closing the cycle
                    // means some edge has two incoming ends.
                    return Err(DiagramError::OrientationConflict { edge: e });
                }
            }
        }

        let crossings: Vec<Crossing> = crossings
            .iter()
            .map(|cr| Crossing(cr.0.map(|e| new_label[&e])))
            .collect();

        let occ = occurrences(&crossings)?;
        let mut ends = vec![[(0usize, 0u8); 2]; crossings.len() * 2];
        for (&e, ports) in &occ {
            let is_in = |p: Port| -> bool {
                match p.1 {
                    0 => true,
                    2 => false,
                    s => s == over_in[p.0],
                }
            };
            let (head, tail) = if is_in(ports[0]) {
                (ports[0], ports[1])
            } else {
                (ports[1], ports[0])
            };
            ends[e] = [head, tail];
        }

        let d = Diagram {
            crossings,
            free_circles,
            over_in,
            ends,
        };
        d.check_spherical()?;
        Ok(d)
    }

    /// Euler check per crossing-graph component: `F = m + 2` faces each.
    fn check_spherical(&self) -> Result<(), DiagramError> {
        let m = self.num_crossings();
        if m == 0 {
            return Ok(());
        }
        // Union-find over crossings via shared edges.
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for e in 0..self.num_edges() {
            let [h, t] = self.ends[e];
            let (a, b) = (find(&mut parent, h.0), find(&mut parent, t.0));
            if a != b {
                parent[a] = b;
            }
        }
        let mut comp_crossings: HashMap<usize, usize> = HashMap::new();
        for c in 0..m {
            *comp_crossings.entry(find(&mut parent, c)).or_default() += 1;
        }
        let mut comp_faces: HashMap<usize, usize> = HashMap::new();
        for orbit in self.face_orbits() {
            let root = find(&mut parent, orbit[0].0);
            *comp_faces.entry(root).or_default() += 1;
        }
        for (&root, &mc) in &comp_crossings {
            let fc = comp_faces.get(&root).copied().unwrap_or(0);
            if fc != mc + 2 {
                return Err(DiagramError::NonPlanar {
                    crossings: mc,
                    faces: fc,
                    expected: mc + 2,
                });
            }
        }
        Ok(())
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn num_edges(&self) -> usize {
        self.crossings.len() * 2
    }

    pub fn free_circles(&self) -> usize {
        self.free_circles
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Edge label plugged into a port.
    pub(crate) fn edge_at(&self, p: Port) -> EdgeLabel {
        self.crossings[p.0].0[p.1 as usize]
    }

    /// Port where `e` enters a crossing.
    pub(crate) fn head(&self, e: EdgeLabel) -> Port {
        self.ends[e][0]
    }

    /// Port where `e` leaves a crossing.
    pub(crate) fn tail(&self, e: EdgeLabel) -> Port {
        self.ends[e][1]
    }

    /// The other port of the edge at `p`.
    pub(crate) fn mate(&self, p: Port) -> Port {
        let e = self.edge_at(p);
        let [h, t] = self.ends[e];
        if h == p {
            t
        } else {
            h
        }
    }

    pub(crate) fn over_in_slot(&self, c: usize) -> u8 {
        self.over_in[c]
    }

    /// Sign of a crossing: positive iff the over-strand enters at slot 3.
    pub fn crossing_sign(&self, c: usize) -> Result<Sign, DiagramError> {
        if c >= self.crossings.len() {
            return Err(DiagramError::CrossingOutOfRange {
                index: c,
                len: self.crossings.len(),
            });
        }
        Ok(if self.over_in[c] == 3 {
            Sign::Pos
        } else {
            Sign::Neg
        })
    }

    /// Sum of crossing signs.
    pub fn writhe(&self) -> i64 {
        self.over_in
            .iter()
            .map(|&s| if s == 3 { 1 } else { -1 })
            .sum()
    }

    /// Successor edge along the orientation: pass straight through the
    /// crossing that `e` enters.
    pub(crate) fn next_edge(&self, e: EdgeLabel) -> EdgeLabel {
        let (c, s) = self.head(e);
        self.edge_at((c, (s + 2) % 4))
    }

    /// Partition edges into oriented closed components.
    pub fn trace_components(&self) -> LinkComponentMap {
        let n = self.num_edges();
        let mut component_of = vec![usize::MAX; n];
        let mut traced = 0;
        for start in 0..n {
            if component_of[start] != usize::MAX {
                continue;
            }
            let mut e = start;
            loop {
                component_of[e] = traced;
                e = self.next_edge(e);
                if e == start {
                    break;
                }
            }
            traced += 1;
        }
        LinkComponentMap {
            component_of,
            traced,
            free_circles: self.free_circles,
        }
    }

    /// Orbits of the face permutation: arrive at a port, turn to the next
    /// slot counterclockwise, traverse that edge to its far end. Every
    /// port lies on exactly one orbit; a connected diagram with `m`
    /// crossings has `m + 2` orbits.
    pub(crate) fn face_orbits(&self) -> Vec<Vec<Port>> {
        let m = self.num_crossings();
        let mut seen = vec![[false; 4]; m];
        let mut orbits = Vec::new();
        for c in 0..m {
            for s in 0..4u8 {
                if seen[c][s as usize] {
                    continue;
                }
                let start = (c, s);
                let mut orbit = Vec::new();
                let mut p = start;
                loop {
                    seen[p.0][p.1 as usize] = true;
                    orbit.push(p);
                    let turn = (p.0, (p.1 + 1) % 4);
                    p = self.mate(turn);
                    if p == start {
                        break;
                    }
                }
                orbits.push(orbit);
            }
        }
        orbits
    }

    /// Number of crossing-graph components (0 for a crossing-free diagram).
    pub(crate) fn crossing_components(&self) -> usize {
        let m = self.num_crossings();
        if m == 0 {
            return 0;
        }
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for e in 0..self.num_edges() {
            let [h, t] = self.ends[e];
            let (a, b) = (find(&mut parent, h.0), find(&mut parent, t.0));
            if a != b {
                parent[a] = b;
            }
        }
        (0..m).filter(|&c| find(&mut parent, c) == c).count()
    }

    /// The crossing graph is connected (free circles are carried
    /// alongside and do not count as disconnection).
    pub fn is_connected(&self) -> bool {
        self.crossing_components() <= 1
    }

    /// Recompute all structural invariants and report them.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let m = self.num_crossings();
        let cm = self.trace_components();
        let faces = self.face_orbits().len();
        if m > 0 {
            let mut counts: HashMap<EdgeLabel, usize> = HashMap::new();
            for cr in &self.crossings {
                for &e in &cr.0 {
                    *counts.entry(e).or_default() += 1;
                }
            }
            for e in 0..self.num_edges() {
                if counts.get(&e).copied().unwrap_or(0) != 2 {
                    violations.push(format!("edge {e} does not appear exactly twice"));
                }
            }
            if let Err(err) = self.check_spherical() {
                violations.push(err.to_string());
            }
        }
        ValidationReport {
            crossings: m,
            edges: self.num_edges(),
            faces,
            traced_components: cm.traced_components(),
            free_circles: self.free_circles,
            component_count: cm.component_count(),
            connected: self.is_connected(),
            writhe: self.writhe(),
            violations,
        }
    }

    /// Oriented smoothing of crossing `c` of a knot diagram: reconnect so
    /// the incoming under-edge joins the outgoing over-edge and the
    /// incoming over-edge joins the outgoing under-edge. Always yields a
    /// two-component diagram with one crossing fewer.
    pub fn smooth(&self, c: usize) -> Result<Diagram, DiagramError> {
        if c >= self.crossings.len() {
            return Err(DiagramError::CrossingOutOfRange {
                index: c,
                len: self.crossings.len(),
            });
        }
        let cm = self.trace_components();
        if !cm.is_knot() {
            return Err(DiagramError::NotAKnot {
                components: cm.component_count(),
            });
        }
        let pairs: [(u8, u8); 2] = if self.over_in[c] == 3 {
            // positive: under-in joins over-out (slot 1), over-in (slot 3)
            // joins under-out
            [(0, 1), (3, 2)]
        } else {
            [(0, 3), (1, 2)]
        };
        let connect: Vec<(Port, Port)> = pairs
            .iter()
            .map(|&(x, y)| (((c, x)), ((c, y))))
            .collect();
        self.rebuild_without(&[c], &connect)
    }

    /// Linking number of a two-component diagram: half the signed count
    /// of crossings between the components.
    pub fn linking_number(&self, cm: &LinkComponentMap) -> Result<i64, DiagramError> {
        if cm.component_count() != 2 {
            return Err(DiagramError::NotTwoComponents {
                components: cm.component_count(),
            });
        }
        let mut sum = 0i64;
        for c in 0..self.num_crossings() {
            let under = cm.component_of(self.edge_at((c, 0)));
            let over = cm.component_of(self.edge_at((c, 1)));
            if under != over {
                sum += if self.over_in[c] == 3 { 1 } else { -1 };
            }
        }
        if sum % 2 != 0 {
            return Err(DiagramError::OddInterComponentSum { sum });
        }
        Ok(sum / 2)
    }

    /// Reverse every crossing's over/under marking. All signs negate.
    pub fn mirror(&self) -> Diagram {
        let mut crossings = Vec::with_capacity(self.crossings.len());
        let mut over_in = Vec::with_capacity(self.crossings.len());
        for (c, cr) in self.crossings.iter().enumerate() {
            let t = cr.0;
            if self.over_in[c] == 3 {
                // positive -> new under-in is old slot 3
                crossings.push(Crossing([t[3], t[0], t[1], t[2]]));
                over_in.push(1);
            } else {
                crossings.push(Crossing([t[1], t[2], t[3], t[0]]));
                over_in.push(3);
            }
        }
        Diagram::from_parts(crossings, self.free_circles, over_in)
            .expect("mirror preserves validity")
    }

    /// Remove the given crossings, reconnecting strands through the given
    /// port pairs. Walks that close up entirely inside the removed set
    /// become free circles; removed ports absent from `connect` are
    /// absorbed (used for kink removal). Surviving crossings keep their
    /// order and over-strand data.
    pub(crate) fn rebuild_without(
        &self,
        removed: &[usize],
        connect: &[(Port, Port)],
    ) -> Result<Diagram, DiagramError> {
        let removed_set: Vec<bool> = {
            let mut v = vec![false; self.num_crossings()];
            for &c in removed {
                v[c] = true;
            }
            v
        };
        let mut conn: HashMap<Port, Port> = HashMap::new();
        for &(a, b) in connect {
            conn.insert(a, b);
            conn.insert(b, a);
        }

        let mut port_label: HashMap<Port, usize> = HashMap::new();
        let mut next_label = 0usize;
        let mut visited = vec![false; self.num_edges()];

        for c in 0..self.num_crossings() {
            if removed_set[c] {
                continue;
            }
            for s in 0..4u8 {
                if port_label.contains_key(&(c, s)) {
                    continue;
                }
                let label = next_label;
                next_label += 1;
                port_label.insert((c, s), label);
                let mut from = (c, s);
                loop {
                    let e = self.edge_at(from);
                    visited[e] = true;
                    let q = self.mate(from);
                    if !removed_set[q.0] {
                        port_label.insert(q, label);
                        break;
                    }
                    let q2 = *conn
                        .get(&q)
                        .expect("strand walked into an absorbed port");
                    from = q2;
                }
            }
        }

        // Closed strands entirely inside the removed region.
        let mut circles = self.free_circles;
        for (&p0, _) in conn.iter() {
            let e0 = self.edge_at(p0);
            if visited[e0] {
                continue;
            }
            let mut from = p0;
            loop {
                let e = self.edge_at(from);
                if visited[e] {
                    break;
                }
                visited[e] = true;
                let q = self.mate(from);
                debug_assert!(removed_set[q.0]);
                from = *conn.get(&q).expect("cycle walked into an absorbed port");
            }
            circles += 1;
        }

        let mut crossings = Vec::new();
        let mut over_in = Vec::new();
        for c in 0..self.num_crossings() {
            if removed_set[c] {
                continue;
            }
            let slots: [EdgeLabel; 4] =
                [0, 1, 2, 3].map(|s| port_label[&(c, s as u8)]);
            crossings.push(Crossing(slots));
            over_in.push(self.over_in[c]);
        }
        Diagram::from_parts(crossings, circles, over_in)
    }

    /// Isomorphism-invariant signature: the lexicographically smallest
    /// relabeled form over all component orderings and starting edges,
    /// with the crossing list sorted. Two diagrams have equal signatures
    /// iff they differ only by canonical relabeling.
    pub fn iso_signature(&self) -> (Vec<([EdgeLabel; 4], u8)>, usize) {
        let cm = self.trace_components();
        let mut cycles: Vec<Vec<EdgeLabel>> = vec![Vec::new(); cm.traced_components()];
        {
            let mut seen = vec![false; self.num_edges()];
            for start in 0..self.num_edges() {
                if seen[start] {
                    continue;
                }
                let comp = cm.component_of(start);
                let mut e = start;
                loop {
                    seen[e] = true;
                    cycles[comp].push(e);
                    e = self.next_edge(e);
                    if e == start {
                        break;
                    }
                }
            }
        }

        fn permutations(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for rest in permutations(k - 1) {
                for pos in 0..=rest.len() {
                    let mut p = rest.clone();
                    p.insert(pos, k - 1);
                    out.push(p);
                }
            }
            out
        }

        let mut best: Option<Vec<([EdgeLabel; 4], u8)>> = None;
        // All component orders (component counts stay tiny) and all
        // starting edges within each.
        for order in permutations(cycles.len()) {
            let sizes: Vec<usize> = order.iter().map(|&ci| cycles[ci].len()).collect();
            let mut rotations = vec![0usize; sizes.len()];
            'odometer: loop {
                let mut relabel = vec![0usize; self.num_edges()];
                let mut counter = 0;
                for (&ci, &rot) in order.iter().zip(&rotations) {
                    let cycle = &cycles[ci];
                    for i in 0..cycle.len() {
                        relabel[cycle[(rot + i) % cycle.len()]] = counter;
                        counter += 1;
                    }
                }
                let mut form: Vec<([EdgeLabel; 4], u8)> = self
                    .crossings
                    .iter()
                    .zip(&self.over_in)
                    .map(|(cr, &oi)| (cr.0.map(|e| relabel[e]), oi))
                    .collect();
                form.sort_unstable();
                if best.as_ref().is_none_or(|b| form < *b) {
                    best = Some(form);
                }
                let mut i = 0;
                loop {
                    if i == rotations.len() {
                        break 'odometer;
                    }
                    rotations[i] += 1;
                    if rotations[i] < sizes[i] {
                        break;
                    }
                    rotations[i] = 0;
                    i += 1;
                }
            }
        }
        (best.unwrap_or_default(), self.free_circles)
    }

    /// Build a crossing tuple from strand data: slot 0 is the incoming
    /// under-edge, and the sign places the incoming over-edge at slot 3
    /// (positive) or slot 1 (negative).
    pub(crate) fn make_crossing(
        under_in: EdgeLabel,
        under_out: EdgeLabel,
        over_in: EdgeLabel,
        over_out: EdgeLabel,
        sign: Sign,
    ) -> (Crossing, u8) {
        match sign {
            Sign::Pos => (Crossing([under_in, over_out, under_out, over_in]), 3),
            Sign::Neg => (Crossing([under_in, over_in, under_out, over_out]), 1),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn kink_pos() -> Diagram {
        Diagram::new(vec![Crossing([0, 0, 1, 1])], 0).unwrap()
    }

    /// Left trefoil (Rolfsen 3_1), all crossings negative.
    pub(crate) fn trefoil_left() -> Diagram {
        Diagram::new(
            vec![
                Crossing([0, 3, 1, 4]),
                Crossing([2, 5, 3, 0]),
                Crossing([4, 1, 5, 2]),
            ],
            0,
        )
        .unwrap()
    }

    pub(crate) fn trefoil_right() -> Diagram {
        trefoil_left().mirror()
    }

    /// Positive Hopf link: two circles crossing twice, both positive.
    pub(crate) fn hopf_pos() -> Diagram {
        Diagram::new(vec![Crossing([0, 2, 1, 3]), Crossing([2, 0, 3, 1])], 0).unwrap()
    }

    #[test]
    fn kink_is_valid_positive() {
        let d = kink_pos();
        assert_eq!(d.num_crossings(), 1);
        assert_eq!(d.crossing_sign(0).unwrap(), Sign::Pos);
        assert_eq!(d.writhe(), 1);
        let report = d.validate();
        assert!(report.is_valid());
        assert_eq!(report.faces, 3);
        assert_eq!(report.component_count, 1);
    }

    #[test]
    fn unknot_diagram() {
        let u = Diagram::unknot();
        assert_eq!(u.num_crossings(), 0);
        assert_eq!(u.writhe(), 0);
        assert_eq!(u.trace_components().component_count(), 1);
    }

    #[test]
    fn label_multiplicity_rejected() {
        // label 0 appears three times
        let err = Diagram::new(
            vec![Crossing([0, 0, 0, 1]), Crossing([1, 2, 2, 3])],
            0,
        )
        .unwrap_err();
        assert!(matches!(err, DiagramError::LabelMultiplicity { label: 0, count: 3 }));
    }

    #[test]
    fn orientation_conflict_rejected() {
        // label 0 is the incoming under-edge of both crossings
        let err = Diagram::new(
            vec![Crossing([0, 1, 2, 3]), Crossing([0, 3, 2, 1])],
            0,
        )
        .unwrap_err();
        assert!(matches!(err, DiagramError::OrientationConflict { .. }));
    }

    #[test]
    fn nonplanar_rejected() {
        // a rotation system realizable only on the torus
        let err = Diagram::new(
            vec![Crossing([0, 1, 2, 3]), Crossing([2, 3, 0, 1])],
            0,
        )
        .unwrap_err();
        assert!(matches!(err, DiagramError::NonPlanar { .. }));
    }

    #[test]
    fn trefoil_structure() {
        let d = trefoil_left();
        assert_eq!(d.num_crossings(), 3);
        assert_eq!(d.writhe(), -3);
        assert_eq!(d.trace_components().component_count(), 1);
        assert_eq!(d.face_orbits().len(), 5);
        let r = d.mirror();
        assert_eq!(r.writhe(), 3);
        for c in 0..3 {
            assert_eq!(r.crossing_sign(c).unwrap(), Sign::Pos);
        }
    }

    #[test]
    fn mirror_is_involution() {
        for d in [kink_pos(), trefoil_left(), hopf_pos()] {
            assert_eq!(d.mirror().mirror(), d);
            assert_eq!(d.mirror().writhe(), -d.writhe());
        }
    }

    #[test]
    fn smooth_kink_gives_two_circles() {
        let d = kink_pos();
        let s = d.smooth(0).unwrap();
        assert_eq!(s.num_crossings(), 0);
        assert_eq!(s.free_circles(), 2);
        assert_eq!(s.trace_components().component_count(), 2);
    }

    #[test]
    fn smooth_trefoil_gives_hopf() {
        let d = trefoil_right();
        for c in 0..3 {
            let s = d.smooth(c).unwrap();
            assert_eq!(s.num_crossings(), 2);
            let cm = s.trace_components();
            assert_eq!(cm.component_count(), 2);
            assert_eq!(s.linking_number(&cm).unwrap(), 1);
        }
        let d = trefoil_left();
        for c in 0..3 {
            let s = d.smooth(c).unwrap();
            let cm = s.trace_components();
            assert_eq!(s.linking_number(&cm).unwrap(), -1);
        }
    }

    #[test]
    fn hopf_linking_number() {
        let d = hopf_pos();
        let cm = d.trace_components();
        assert_eq!(cm.component_count(), 2);
        assert_eq!(d.linking_number(&cm).unwrap(), 1);
        let m = d.mirror();
        assert_eq!(m.linking_number(&m.trace_components()).unwrap(), -1);
    }

    #[test]
    fn linking_number_requires_two_components() {
        let d = kink_pos();
        let cm = d.trace_components();
        assert!(matches!(
            d.linking_number(&cm),
            Err(DiagramError::NotTwoComponents { components: 1 })
        ));
    }

    #[test]
    fn two_free_circles() {
        let d = Diagram::new(vec![], 2).unwrap();
        let cm = d.trace_components();
        assert_eq!(cm.component_count(), 2);
        assert_eq!(d.linking_number(&cm).unwrap(), 0);
    }

    #[test]
    fn smooth_out_of_range() {
        let d = kink_pos();
        assert!(matches!(
            d.smooth(5),
            Err(DiagramError::CrossingOutOfRange { index: 5, len: 1 })
        ));
    }

    #[test]
    fn canonical_labels_follow_orientation() {
        let d = trefoil_left();
        for e in 0..d.num_edges() {
            let n = d.next_edge(e);
            // labels are sequential along the single component
            assert_eq!(n, (e + 1) % d.num_edges());
        }
    }
}
