//! Scenario bodies and the bookkeeping they share.

pub mod bracket;
pub mod center;
pub mod forms;
pub mod ideals;
pub mod phi;

use std::time::Instant;

use crate::checks::{self, Context, Outcome};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::registry;
use crate::report::{ScenarioReport, Verdict, Witness, SCHEMA_VERSION};

/// Witnesses kept per report; failures beyond this are only counted.
pub const MAX_WITNESSES: usize = 5;

/// Terms per sampled polynomial.
pub const SAMPLE_TERMS: usize = 3;

/// Collects check outcomes for one scenario run.
#[derive(Debug, Default)]
pub struct Recorder {
    pub cases: u64,
    pub failures: u64,
    pub vacuous: u64,
    pub witnesses: Vec<Witness>,
    forced: Option<Verdict>,
}

impl Recorder {
    /// Counts `outcome`; the elements are serialized only for a violation.
    pub fn record(&mut self, check: &str, elements: impl FnOnce() -> Vec<String>, outcome: Outcome) {
        match outcome {
            Outcome::Holds => self.cases += 1,
            Outcome::Vacuous => self.vacuous += 1,
            Outcome::Violated(note) => {
                self.cases += 1;
                self.failures += 1;
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(Witness {
                        check: check.to_string(),
                        elements: elements(),
                        note,
                        detail: None,
                    });
                }
            }
        }
    }

    /// Overrides the verdict derived from the counters.
    pub fn force(&mut self, verdict: Verdict) {
        self.forced = Some(verdict);
    }

    pub fn verdict(&self) -> Verdict {
        if let Some(v) = self.forced {
            return v;
        }
        if self.failures > 0 {
            Verdict::Fail
        } else if self.cases == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Runs one scenario; deterministic apart from `elapsed_ms`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let entry = registry::lookup(&cfg.scenario)?;
    let start = Instant::now();
    let ctx = Context::new(cfg.clone());
    let mut rec = Recorder::default();
    (entry.run)(&ctx, &mut rec)?;
    Ok(ScenarioReport {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.clone(),
        params: cfg.clone(),
        verdict: rec.verdict(),
        cases: rec.cases,
        failures: rec.failures,
        witnesses: rec.witnesses,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Result of re-running one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub check: String,
    pub outcome: Outcome,
}

impl Replay {
    pub fn reproduced(&self) -> bool {
        matches!(self.outcome, Outcome::Violated(_))
    }
}

/// Re-runs every witness of `report` under its own params.
pub fn replay(report: &ScenarioReport) -> Result<Vec<Replay>> {
    let ctx = Context::new(report.params.clone());
    report
        .witnesses
        .iter()
        .map(|w| {
            Ok(Replay {
                check: w.check.clone(),
                outcome: checks::run(&ctx, &w.check, &w.elements)?,
            })
        })
        .collect()
}
