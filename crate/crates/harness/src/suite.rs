//! Batches of scenarios run in parallel.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mutation, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::registry;
use crate::report::{self, ScenarioReport, Verdict};
use crate::scenarios;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Every scenario at its defaults (`p = 3`, `n = 2`).
    Quick,
    /// The quick runs plus `p = 5` and `n = 3` instances.
    Full,
}

/// Configurations of a profile, with `mutation` applied to each.
pub fn profile_configs(profile: Profile, mutation: Option<Mutation>) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for name in registry::names() {
        out.push(ScenarioConfig::for_scenario(name)?);
    }
    if profile == Profile::Full {
        for name in registry::names() {
            let mut c = ScenarioConfig::for_scenario(name)?;
            c.p = 5;
            match name {
                "center-structure" | "center-shrink" => c.cap = Some(10),
                "prop-center" | "remark-counterexample" => c.cap = Some(15),
                // |B|^(n-1) = 5^25 is out of reach; the sampled branch runs
                "lemma-muh" => c.samples = 50,
                _ => c.samples = c.samples.min(30),
            }
            out.push(c);
        }
        for name in ["phi-ring-hom", "phi-central", "phi-compat", "eq1", "lemma-muh", "lemma-frob", "cartier"] {
            let mut c = ScenarioConfig::for_scenario(name)?;
            c.n = 3;
            c.samples = c.samples.min(30);
            c.degree = c.degree.min(1);
            out.push(c);
        }
        let mut c = ScenarioConfig::for_scenario("center-shrink")?;
        c.n = 3;
        c.cap = Some(27);
        out.push(c);
    }
    for c in &mut out {
        c.mutation = mutation;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub report: ScenarioReport,
    pub expected: Verdict,
    /// The verdict equals the expected polarity.
    pub met: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
    pub entries: Vec<SuiteEntry>,
    /// Every entry met its expected polarity.
    pub passed: bool,
}

/// Runs `configs` in parallel; entries are sorted by scenario name, stable in input order.
pub fn run_configs(configs: &[ScenarioConfig]) -> Result<SuiteReport> {
    if configs.is_empty() {
        return Err(HarnessError::EmptySuite);
    }
    for c in configs {
        c.validate()?;
    }
    let reports = configs.par_iter().map(scenarios::run_scenario).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(reports.len());
    for report in reports {
        let expected = registry::lookup(&report.scenario)?.expected;
        entries.push(SuiteEntry {
            met: report.verdict == expected,
            expected,
            report,
        });
    }
    entries.sort_by(|a, b| a.report.scenario.cmp(&b.report.scenario));
    let passed = entries.iter().all(|e| e.met);
    let mutation = configs[0].mutation.filter(|m| configs.iter().all(|c| c.mutation == Some(*m)));
    Ok(SuiteReport {
        schema_version: report::SCHEMA_VERSION,
        profile: None,
        mutation,
        entries,
        passed,
    })
}

pub fn run_suite(profile: Profile, mutation: Option<Mutation>) -> Result<SuiteReport> {
    let mut r = run_configs(&profile_configs(profile, mutation)?)?;
    r.profile = Some(profile);
    Ok(r)
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# Suite\n").unwrap();
        if let Some(p) = self.profile {
            writeln!(out, "profile: {}", format!("{p:?}").to_lowercase()).unwrap();
        }
        if let Some(m) = self.mutation {
            writeln!(out, "mutation: {m:?}").unwrap();
        }
        writeln!(out).unwrap();
        report::statement_table(&mut out, self.entries.iter().map(|e| &e.report));
        writeln!(out, "\n| scenario | p | n | cases | failures | met | ms |").unwrap();
        writeln!(out, "|---|---|---|---|---|---|---|").unwrap();
        for e in &self.entries {
            let r = &e.report;
            writeln!(
                out,
                "| `{}` | {} | {} | {} | {} | {} | {} |",
                r.scenario, r.params.p, r.params.n, r.cases, r.failures, e.met, r.elapsed_ms
            )
            .unwrap();
        }
        for e in &self.entries {
            report::witness_list(&mut out, &e.report);
        }
        writeln!(out, "\nall expected polarities met: {}", self.passed).unwrap();
        out
    }

    pub fn render(&self, format: report::Format) -> String {
        match format {
            report::Format::Json => self.to_json(),
            report::Format::Markdown => self.to_markdown(),
        }
    }
}
