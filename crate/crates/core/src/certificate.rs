//! Three-valued verification outcomes with associative aggregation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A re-checkable counterexample attached to a `Refuted` verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Identifier of the violated inequality or property.
    pub check: String,
    pub point: Option<[f64; 2]>,
    pub vector: Option<[f64; 2]>,
    /// Observed value and the bound it failed, when the check is numeric.
    pub observed: Option<f64>,
    pub bound: Option<f64>,
    pub detail: String,
}

impl Witness {
    pub fn new(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Witness {
            check: check.into(),
            point: None,
            vector: None,
            observed: None,
            bound: None,
            detail: detail.into(),
        }
    }

    pub fn at(mut self, point: [f64; 2]) -> Self {
        self.point = Some(point);
        self
    }

    pub fn with_vector(mut self, v: [f64; 2]) -> Self {
        self.vector = Some(v);
        self
    }

    pub fn values(mut self, observed: f64, bound: f64) -> Self {
        self.observed = Some(observed);
        self.bound = Some(bound);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Proven,
    Refuted { witness: Witness },
    Unknown { reason: String, budget: u64 },
}

impl Verdict {
    /// Aggregation rank: Refuted > Unknown > Proven.
    fn rank(&self) -> u8 {
        match self {
            Verdict::Proven => 0,
            Verdict::Unknown { .. } => 1,
            Verdict::Refuted { .. } => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proven => "proven",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub verdict: Verdict,
    /// Worst observed slack per checked inequality (positive = satisfied).
    pub margins: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub children: Vec<Certificate>,
}

impl Certificate {
    pub fn proven(name: impl Into<String>) -> Self {
        Certificate {
            name: name.into(),
            verdict: Verdict::Proven,
            margins: BTreeMap::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn refuted(name: impl Into<String>, witness: Witness) -> Self {
        Certificate {
            verdict: Verdict::Refuted { witness },
            ..Certificate::proven(name)
        }
    }

    pub fn unknown(name: impl Into<String>, reason: impl Into<String>, budget: u64) -> Self {
        Certificate {
            verdict: Verdict::Unknown {
                reason: reason.into(),
                budget,
            },
            ..Certificate::proven(name)
        }
    }

    pub fn with_margin(mut self, key: impl Into<String>, value: f64) -> Self {
        self.margins.insert(key.into(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_proven(&self) -> bool {
        matches!(self.verdict, Verdict::Proven)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.verdict, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Refuted { witness } => Some(witness),
            _ => None,
        }
    }

    /// Combine stage certificates under `name`. The aggregate verdict is the
    /// highest-ranked child verdict; for a Refuted aggregate the witness is
    /// the first refuting stage, prefixed with that stage's name.
    pub fn aggregate(name: impl Into<String>, children: Vec<Certificate>) -> Self {
        let mut verdict = Verdict::Proven;
        for c in &children {
            if c.verdict.rank() > verdict.rank() {
                verdict = match &c.verdict {
                    Verdict::Refuted { witness } => {
                        let mut w = witness.clone();
                        w.check = format!("{}/{}", c.name, w.check);
                        Verdict::Refuted { witness: w }
                    }
                    other => other.clone(),
                };
            }
        }
        Certificate {
            name: name.into(),
            verdict,
            margins: BTreeMap::new(),
            notes: Vec::new(),
            children,
        }
    }

    /// Process exit code convention: 0 proven, 2 refuted, 3 unknown.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Proven => 0,
            Verdict::Refuted { .. } => 2,
            Verdict::Unknown { .. } => 3,
        }
    }
}

/// Tracks the smallest slack seen for a named inequality.
#[derive(Debug, Clone, Default)]
pub(crate) struct MarginTracker {
    worst: BTreeMap<String, f64>,
}

impl MarginTracker {
    pub fn observe(&mut self, key: &str, slack: f64) {
        let e = self.worst.entry(key.to_string()).or_insert(f64::INFINITY);
        if slack < *e {
            *e = slack;
        }
    }

    pub fn into_certificate(self, mut cert: Certificate) -> Certificate {
        for (k, v) in self.worst {
            cert.margins.insert(k, v);
        }
        cert
    }
}
