//! Replayable run records written as JSON lines.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::StateVector;

/// Decimal digits kept per amplitude component before hashing.
pub const DIGEST_DECIMALS: usize = 12;

/// SHA-256 of the state with its first nonzero amplitude made
/// real-positive and every component rounded to [`DIGEST_DECIMALS`]
/// digits, so states equal up to global phase share a digest.
pub fn state_digest(state: &StateVector) -> String {
    let canon = state.canonical_phase(1e-12);
    let mut h = Sha256::new();
    h.update(format!("{:?};", canon.factor_dims()));
    for a in canon.amplitudes() {
        h.update(format!("{},{};", round(a.re), round(a.im)));
    }
    hex::encode(h.finalize())
}

fn round(x: f64) -> String {
    let s = format!("{x:.DIGEST_DECIMALS$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub scenario: String,
    pub seed: Option<u64>,
    pub version: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub stage: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_digest: Option<String>,
    /// `[re, im]` pairs in basis order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outcomes: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub probabilities: BTreeMap<String, f64>,
}

impl TraceRecord {
    pub fn new(stage: impl Into<String>, description: impl Into<String>) -> Self {
        Self { stage: stage.into(), description: description.into(), ..Self::default() }
    }

    pub fn with_state(mut self, state: &StateVector, amplitudes: bool) -> Self {
        self.state_digest = Some(state_digest(state));
        if amplitudes {
            self.amplitudes = Some(state.amplitudes().iter().map(|a| [a.re, a.im]).collect());
        }
        self
    }

    pub fn outcome(mut self, name: impl Into<String>, value: i64) -> Self {
        self.outcomes.insert(name.into(), value);
        self
    }

    pub fn probability(mut self, name: impl Into<String>, p: f64) -> Self {
        self.probabilities.insert(name.into(), p);
        self
    }
}

/// A named pass/fail check evaluated during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub metadata: TraceMetadata,
    pub records: Vec<TraceRecord>,
    pub invariants: Vec<InvariantCheck>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Metadata(TraceMetadata),
    Record(TraceRecord),
    Invariant(InvariantCheck),
}

impl RunTrace {
    pub fn new(scenario: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            metadata: TraceMetadata { scenario: scenario.into(), seed, version: env!("CARGO_PKG_VERSION").to_string() },
            records: Vec::new(),
            invariants: Vec::new(),
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.invariants.push(InvariantCheck { name: name.into(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.invariants.iter().all(|c| c.passed)
    }

    /// Metadata line, then records, then invariant checks.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> io::Result<()> {
        let lines = std::iter::once(Line::Metadata(self.metadata.clone()))
            .chain(self.records.iter().cloned().map(Line::Record))
            .chain(self.invariants.iter().cloned().map(Line::Invariant));
        for line in lines {
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_json_lines(&self) -> String {
        let mut buf = Vec::new();
        self.write_json_lines(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_json_lines<R: BufRead>(input: R) -> io::Result<Self> {
        let mut metadata = None;
        let mut records = Vec::new();
        let mut invariants = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line)? {
                Line::Metadata(m) => metadata = Some(m),
                Line::Record(r) => records.push(r),
                Line::Invariant(c) => invariants.push(c),
            }
        }
        let metadata =
            metadata.ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "trace has no metadata line"))?;
        Ok(Self { metadata, records, invariants })
    }
}
