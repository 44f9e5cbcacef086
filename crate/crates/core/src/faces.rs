//! Face structure of the underlying 4-valent sphere map.
//!
//! A dart is an edge together with the direction in which a face's
//! boundary walk traverses it. Every edge is traversed once in each
//! direction across the whole face set, so a diagram with `m` crossings
//! has `4m` darts; a connected diagram has `m + 2` faces. Monogons,
//! bigons and trigons are the sites of the reducing Reidemeister moves.

use std::fmt;

use crate::diagram::{Diagram, EdgeLabel, Port};

/// Direction of traversal relative to the edge's own orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orient {
    /// Tail to head, with the edge.
    Fwd,
    /// Head to tail, against the edge.
    Rev,
}

impl Orient {
    pub fn flip(self) -> Orient {
        match self {
            Orient::Fwd => Orient::Rev,
            Orient::Rev => Orient::Fwd,
        }
    }
}

/// One step of a face's boundary walk. A dart determines its face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub edge: EdgeLabel,
    pub orient: Orient,
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.orient {
            Orient::Fwd => write!(f, "{}", self.edge),
            Orient::Rev => write!(f, "{}'", self.edge),
        }
    }
}

/// A face: the cyclic dart list of its boundary walk, rotated so the
/// smallest dart comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    darts: Vec<Dart>,
}

impl Face {
    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.darts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Face list plus connectivity flag, as produced by [`Diagram::faces`].
#[derive(Debug, Clone)]
pub struct FacesReport {
    pub faces: Vec<Face>,
    /// False when the crossing graph is disconnected; the face list then
    /// covers each piece separately and global counts do not obey Euler.
    pub connected: bool,
}

impl Diagram {
    pub(crate) fn dart_at(&self, p: Port) -> Dart {
        let edge = self.edge_at(p);
        let orient = if self.head(edge) == p {
            Orient::Fwd
        } else {
            Orient::Rev
        };
        Dart { edge, orient }
    }

    /// Port a dart arrives at.
    pub(crate) fn dart_port(&self, d: Dart) -> Port {
        match d.orient {
            Orient::Fwd => self.head(d.edge),
            Orient::Rev => self.tail(d.edge),
        }
    }

    /// All faces with their arrival ports, in canonical order.
    pub(crate) fn faces_with_ports(&self) -> Vec<(Face, Vec<Port>)> {
        fn rotate<T: Copy>(v: &[T], k: usize) -> Vec<T> {
            v[k..].iter().chain(&v[..k]).copied().collect()
        }
        let mut out: Vec<(Face, Vec<Port>)> = self
            .face_orbits()
            .into_iter()
            .map(|orbit| {
                let darts: Vec<Dart> = orbit.iter().map(|&p| self.dart_at(p)).collect();
                // rotate so the smallest dart leads
                let min_idx = darts
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, d)| **d)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                (
                    Face {
                        darts: rotate(&darts, min_idx),
                    },
                    rotate(&orbit, min_idx),
                )
            })
            .collect();
        out.sort_by(|a, b| a.0.darts.first().cmp(&b.0.darts.first()));
        out
    }

    /// Face partition of the diagram's darts.
    pub fn faces(&self) -> FacesReport {
        FacesReport {
            faces: self.faces_with_ports().into_iter().map(|(f, _)| f).collect(),
            connected: self.is_connected(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kink_faces() {
        let d = Diagram::from_pd_text("X 0 0 1 1").unwrap();
        let report = d.faces();
        assert!(report.connected);
        assert_eq!(report.faces.len(), 3);
        let monogons = report.faces.iter().filter(|f| f.len() == 1).count();
        assert_eq!(monogons, 2);
        let total: usize = report.faces.iter().map(Face::len).sum();
        assert_eq!(total, 4 * d.num_crossings());
    }

    #[test]
    fn trefoil_faces() {
        let d = Diagram::from_pd_text("X 0 3 1 4\nX 2 5 3 0\nX 4 1 5 2").unwrap();
        let report = d.faces();
        assert_eq!(report.faces.len(), 5);
        let sizes = {
            let mut s: Vec<usize> = report.faces.iter().map(Face::len).collect();
            s.sort_unstable();
            s
        };
        assert_eq!(sizes, vec![2, 2, 2, 3, 3]);
    }

    #[test]
    fn hopf_has_bigon() {
        let d = Diagram::from_pd_text("X 0 2 1 3\nX 2 0 3 1").unwrap();
        let report = d.faces();
        assert_eq!(report.faces.len(), 4);
        assert!(report.faces.iter().any(|f| f.len() == 2));
    }

    #[test]
    fn every_dart_in_one_face() {
        let d = Diagram::from_pd_text("X 0 3 1 4\nX 2 5 3 0\nX 4 1 5 2").unwrap();
        let mut seen = std::collections::HashSet::new();
        for f in d.faces().faces {
            for &dart in f.darts() {
                assert!(seen.insert(dart), "dart {dart} repeated");
            }
        }
        assert_eq!(seen.len(), 4 * d.num_crossings());
    }
}
