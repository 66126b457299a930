//! Check reports: one entry per law, or one entry per violating witness.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::exterior::GradedElement;
use crate::ring::Poly;

/// Schema tag written into structured reports.
pub const SCHEMA: &str = "lbk-report/1";

/// At most this many failing witnesses are listed per law.
pub const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Recorded for context; does not affect the verdict.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub id: String,
    pub law: String,
    pub status: Status,
    /// 1-based basis indices of the violating tuple.
    pub witness: Vec<usize>,
    /// Canonical rendering of the residual; `"0"` unless failing.
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Number of instances evaluated.
    pub cases: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub structure: String,
    pub entries: Vec<CheckEntry>,
}

/// Anything that can be the difference of the two sides of an identity.
pub trait Residual {
    fn is_zero_residual(&self) -> bool;
    fn render(&self) -> String;
}

impl Residual for Poly {
    fn is_zero_residual(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Residual for GradedElement {
    fn is_zero_residual(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Residual for bool {
    /// `true` means the condition holds.
    fn is_zero_residual(&self) -> bool {
        *self
    }
    fn render(&self) -> String {
        "violated".into()
    }
}

/// Collects the instances of one law.
pub struct Law {
    id: String,
    law: String,
    cases: usize,
    failures: Vec<(Vec<usize>, String, Option<String>)>,
}

impl Law {
    pub fn new(id: impl Into<String>, law: impl Into<String>) -> Self {
        Law {
            id: id.into(),
            law: law.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    /// Records one instance; `witness` uses 0-based indices.
    pub fn record(&mut self, witness: &[usize], residual: &impl Residual) {
        self.record_with(witness, residual, None::<String>);
    }

    pub fn record_with(
        &mut self,
        witness: &[usize],
        residual: &impl Residual,
        detail: Option<impl Into<String>>,
    ) {
        self.cases += 1;
        if !residual.is_zero_residual() {
            self.failures.push((
                witness.iter().map(|i| i + 1).collect(),
                residual.render(),
                detail.map(Into::into),
            ));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_entries(self) -> Vec<CheckEntry> {
        if self.failures.is_empty() {
            return vec![CheckEntry {
                id: self.id,
                law: self.law,
                status: Status::Pass,
                witness: vec![],
                residual: "0".into(),
                detail: None,
                cases: self.cases,
            }];
        }
        let total = self.failures.len();
        let mut out: Vec<CheckEntry> = self
            .failures
            .into_iter()
            .take(MAX_WITNESSES)
            .map(|(witness, residual, detail)| CheckEntry {
                id: self.id.clone(),
                law: self.law.clone(),
                status: Status::Fail,
                witness,
                residual,
                detail,
                cases: self.cases,
            })
            .collect();
        if total > MAX_WITNESSES {
            let last = out.last_mut().unwrap();
            let more = format!("{} further violations omitted", total - MAX_WITNESSES);
            last.detail = Some(match last.detail.take() {
                Some(d) => format!("{d}; {more}"),
                None => more,
            });
        }
        out
    }
}

impl CheckReport {
    pub fn new(structure: impl Into<String>) -> Self {
        CheckReport {
            structure: structure.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, law: Law) {
        self.entries.extend(law.into_entries());
    }

    /// Adds a single pass/fail entry with no witness.
    pub fn push_flag(&mut self, id: &str, law: &str, ok: bool, detail: Option<String>) {
        self.entries.push(CheckEntry {
            id: id.into(),
            law: law.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: vec![],
            residual: if ok { "0".into() } else { "violated".into() },
            detail,
            cases: 1,
        });
    }

    pub fn push_info(&mut self, id: &str, law: &str, detail: String) {
        self.entries.push(CheckEntry {
            id: id.into(),
            law: law.into(),
            status: Status::Info,
            witness: vec![],
            residual: "0".into(),
            detail: Some(detail),
            cases: 0,
        });
    }

    /// Merges a sub-report, prefixing its ids with `stage/`.
    pub fn absorb(&mut self, stage: &str, sub: CheckReport) {
        for mut e in sub.entries {
            e.id = format!("{stage}/{}", e.id);
            self.entries.push(e);
        }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    /// Whether every entry whose id starts with `prefix` passes.
    pub fn stage_passed(&self, prefix: &str) -> bool {
        self.entries
            .iter()
            .filter(|e| e.id.starts_with(prefix))
            .all(|e| e.status != Status::Fail)
    }

    pub fn entry(&self, id: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": SCHEMA,
            "structure": self.structure,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "entries": self.entries,
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "structure {}: {}",
            self.structure,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for e in &self.entries {
            let mut line = String::new();
            let tag = match e.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Info => "info",
            };
            write!(line, "  [{tag}] {} ({})", e.id, e.law)?;
            if e.status == Status::Pass {
                write!(line, " cases={}", e.cases)?;
            }
            if !e.witness.is_empty() {
                let w: Vec<String> = e.witness.iter().map(|i| i.to_string()).collect();
                write!(line, " at ({})", w.join(","))?;
            }
            if e.status == Status::Fail {
                write!(line, ": residual {}", e.residual)?;
            }
            if let Some(d) = &e.detail {
                write!(line, " [{d}]")?;
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
