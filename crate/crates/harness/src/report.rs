//! Scenario reports and their JSON and Markdown renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{HarnessError, Result};
use crate::registry;

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The inputs of one failed check, in the element text grammars.
///
/// Replaying `check` on `elements` with the report's params reproduces the
/// failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub elements: Vec<String>,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: String,
    pub params: ScenarioConfig,
    pub verdict: Verdict,
    pub cases: u64,
    pub failures: u64,
    pub witnesses: Vec<Witness>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// JSON with the timing field zeroed.
    pub fn to_json_untimed(&self) -> String {
        let mut r = self.clone();
        r.elapsed_ms = 0;
        r.to_json()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# Scenario `{}`\n", self.scenario).unwrap();
        statement_table(&mut out, std::iter::once(self));
        writeln!(out).unwrap();
        let p = &self.params;
        writeln!(
            out,
            "p = {}, n = {}, r = {}, degree = {}, cap = {}, seed = {}, samples = {}\n",
            p.p,
            p.n,
            p.r,
            p.degree,
            p.cap.map_or("default".to_string(), |c| c.to_string()),
            p.seed,
            p.samples
        )
        .unwrap();
        writeln!(out, "cases: {}, failures: {}, elapsed: {} ms", self.cases, self.failures, self.elapsed_ms).unwrap();
        witness_list(&mut out, self);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn write(&self, format: Format, path: &Path) -> Result<()> {
        write_text(path, &self.render(format))
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub(crate) fn statement_table<'a>(out: &mut String, reports: impl Iterator<Item = &'a ScenarioReport>) {
    writeln!(out, "| scenario | statement | expected | verdict |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for r in reports {
        let (statement, expected) = match registry::lookup(&r.scenario) {
            Ok(e) => (e.statement, e.expected.to_string()),
            Err(_) => ("?", "?".to_string()),
        };
        writeln!(out, "| `{}` | {} | {} | {} |", r.scenario, statement, expected, r.verdict).unwrap();
    }
}

pub(crate) fn witness_list(out: &mut String, r: &ScenarioReport) {
    if r.witnesses.is_empty() {
        return;
    }
    writeln!(out, "\n## Witnesses for `{}`\n", r.scenario).unwrap();
    for w in &r.witnesses {
        writeln!(out, "- `{}`: {}", w.check, w.note).unwrap();
        for e in &w.elements {
            writeln!(out, "  - `{}`", e.replace('\n', " ; ")).unwrap();
        }
        if let Some(d) = &w.detail {
            writeln!(out, "  - detail: {}", d.replace('\n', " ; ")).unwrap();
        }
    }
}
