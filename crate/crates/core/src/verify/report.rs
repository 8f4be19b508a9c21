use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Valuation;

/// Every check quantifies over a finite domain universe only.
pub const SCOPE: &str = "bounded-domain";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub scope: String,
    /// Named sub-results, for checks that combine several criteria.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Part>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    /// Terms (or symbolic states) visited.
    pub states: usize,
    /// Valuations in the domain universe.
    pub valuations: usize,
    /// (state, valuation) pairs or transitions compared.
    pub pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

/// Where a check went wrong, with enough structure to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub reason: String,
    /// Pinned location of each automaton in the offending source term;
    /// `None` for an automaton still at its declared initial predicates.
    pub state: Vec<Option<String>>,
    /// Display forms of the terms involved.
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Valuation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<Valuation>,
    pub label: String,
    /// Steps from the two roots leading to a pair of terms that differ.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub sigma: Valuation,
    pub label: String,
    pub post: Valuation,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            passed: true,
            scope: SCOPE.to_string(),
            parts: Vec::new(),
            counterexample: None,
            stats: Stats::default(),
        }
    }

    pub(crate) fn fail(&mut self, cex: Counterexample) {
        self.passed = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(cex);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} ({}): {} states, {} valuations, {} pairs",
            self.check, self.scope, self.stats.states, self.stats.valuations, self.stats.pairs
        )?;
        if let Some(ms) = self.stats.wall_ms {
            write!(f, ", {ms} ms")?;
        }
        writeln!(f)?;
        for p in &self.parts {
            writeln!(f, "  {} {}", if p.passed { "ok  " } else { "fail" }, p.name)?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  counterexample: {}", self.reason)?;
        let state: Vec<&str> = self
            .state
            .iter()
            .map(|s| s.as_deref().unwrap_or("*"))
            .collect();
        writeln!(f, "    state: [{}]", state.join(", "))?;
        for t in &self.terms {
            writeln!(f, "    term: {t}")?;
        }
        for (i, s) in self.trace.iter().enumerate() {
            writeln!(f, "    trace {i}: {} --{}--> {}", s.sigma, s.label, s.post)?;
        }
        if let Some(s) = &self.sigma {
            writeln!(f, "    sigma: {s}")?;
        }
        writeln!(f, "    label: {}", self.label)?;
        if let Some(s) = &self.post {
            writeln!(f, "    post: {s}")?;
        }
        Ok(())
    }
}
