//! Reading and writing diagrams.
//!
//! Text format, one crossing per line:
//!
//! ```text
//! # optional comments
//! circles 1
//! X 0 3 1 4
//! X 2 5 3 0
//! X 4 1 5 2
//! ```
//!
//! JSON alternative: `{"crossings": [[a,b,c,d], ...], "free_circles": k}`.
//! Serialization emits canonical labels and round-trips exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Crossing, Diagram, DiagramError};

#[derive(Debug, Error)]
pub enum PdParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Structure(#[from] DiagramError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct PdJson {
    crossings: Vec<[usize; 4]>,
    #[serde(default)]
    free_circles: usize,
}

impl Diagram {
    /// Parse the text PD format.
    pub fn from_pd_text(text: &str) -> Result<Diagram, PdParseError> {
        let mut crossings = Vec::new();
        let mut circles = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            match parts.next() {
                Some("X") => {
                    let mut slots = [0usize; 4];
                    for slot in &mut slots {
                        let tok = parts.next().ok_or_else(|| PdParseError::Syntax {
                            line,
                            msg: "crossing needs four edge labels".into(),
                        })?;
                        *slot = tok.parse().map_err(|_| PdParseError::Syntax {
                            line,
                            msg: format!("bad edge label `{tok}`"),
                        })?;
                    }
                    if parts.next().is_some() {
                        return Err(PdParseError::Syntax {
                            line,
                            msg: "trailing tokens after crossing".into(),
                        });
                    }
                    crossings.push(Crossing(slots));
                }
                Some("circles") => {
                    let tok = parts.next().ok_or_else(|| PdParseError::Syntax {
                        line,
                        msg: "circles needs a count".into(),
                    })?;
                    circles = tok.parse().map_err(|_| PdParseError::Syntax {
                        line,
                        msg: format!("bad circle count `{tok}`"),
                    })?;
                }
                Some(other) => {
                    return Err(PdParseError::Syntax {
                        line,
                        msg: format!("unknown directive `{other}`"),
                    })
                }
                None => unreachable!(),
            }
        }
        Ok(Diagram::new(crossings, circles)?)
    }

    /// Parse the JSON PD format.
    pub fn from_pd_json(text: &str) -> Result<Diagram, PdParseError> {
        let pd: PdJson = serde_json::from_str(text)?;
        Ok(Diagram::new(
            pd.crossings.into_iter().map(Crossing).collect(),
            pd.free_circles,
        )?)
    }

    /// Parse either format, sniffing JSON by a leading `{`.
    pub fn from_pd(text: &str) -> Result<Diagram, PdParseError> {
        if text.trim_start().starts_with('{') {
            Diagram::from_pd_json(text)
        } else {
            Diagram::from_pd_text(text)
        }
    }

    /// Canonical text serialization.
    pub fn to_pd_text(&self) -> String {
        let mut out = String::new();
        if self.free_circles() > 0 {
            out.push_str(&format!("circles {}\n", self.free_circles()));
        }
        for cr in self.crossings() {
            let [a, b, c, d] = cr.0;
            out.push_str(&format!("X {a} {b} {c} {d}\n"));
        }
        out
    }

    /// Canonical JSON serialization.
    pub fn to_pd_json(&self) -> String {
        let pd = PdJson {
            crossings: self.crossings().iter().map(|c| c.0).collect(),
            free_circles: self.free_circles(),
        };
        serde_json::to_string(&pd).expect("serializable")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_text())
    }
}

impl FromStr for Diagram {
    type Err = PdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Diagram::from_pd(s)
    }
}
