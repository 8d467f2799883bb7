//! Condensed view of a trace: observed-versus-expected tables and the
//! verdict of every invariant check.

use std::collections::BTreeMap;

use collapse_core::trace::{InvariantCheck, RunTrace};
use serde::{Deserialize, Serialize};

/// Stage name of records that carry summary tables.
pub const SUMMARY_STAGE: &str = "summary";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub name: String,
    pub entries: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub seed: Option<u64>,
    pub version: String,
    pub tables: Vec<SummaryTable>,
    pub checks: Vec<InvariantCheck>,
    pub passed: bool,
}

pub fn emit_summary(trace: &RunTrace) -> Summary {
    let tables = trace
        .records
        .iter()
        .filter(|r| r.stage == SUMMARY_STAGE)
        .map(|r| {
            let mut entries = r.probabilities.clone();
            entries.extend(r.outcomes.iter().map(|(k, v)| (k.clone(), *v as f64)));
            SummaryTable { name: r.description.clone(), entries }
        })
        .collect();
    Summary {
        scenario: trace.metadata.scenario.clone(),
        seed: trace.metadata.seed,
        version: trace.metadata.version.clone(),
        tables,
        checks: trace.invariants.clone(),
        passed: trace.all_passed(),
    }
}

impl Summary {
    /// Plain-text rendering for terminals.
    pub fn render(&self) -> String {
        let mut out =
            format!("scenario {} (seed {})\n", self.scenario, self.seed.map_or("none".into(), |s| s.to_string()));
        for t in &self.tables {
            out.push_str(&format!("{}:\n", t.name));
            for (k, v) in &t.entries {
                out.push_str(&format!("  {k:<28} {v:.6}\n"));
            }
        }
        for c in &self.checks {
            out.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}
