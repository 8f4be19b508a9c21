//! Re-executing a report's counterexample against a model.

use std::fmt::Write;

use super::bisim::linearize_for;
use super::{
    explicit_side, lits_side, sts_side, CheckReport, VerifyError, LINEARIZATION_CHECK, LITS_CHECK,
    SYMBOLIC_CHECK,
};
use crate::explicit::{action_steps_in, env_steps_in, ExplicitLabel, ScopedTerm};
use crate::linear::lits;
use crate::linearize::{scope_linearized, scope_linearized_at};
use crate::model::{Composition, DomainSpec, Universe, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    /// The discrepancy shows up again.
    pub reproduced: bool,
    pub text: String,
}

fn pins_of(p: &Composition, state: &[Option<String>]) -> Option<Vec<Option<usize>>> {
    let atoms = p.automata();
    if atoms.len() != state.len() {
        return None;
    }
    atoms
        .iter()
        .zip(state)
        .map(|(a, s)| match s {
            None => Some(None),
            Some(l) => a.automaton().location_index(l).map(Some),
        })
        .collect()
}

fn targets(
    t: &ScopedTerm,
    sigma: &Valuation,
    label: &str,
    post: &Valuation,
    u: &Universe,
) -> Result<Vec<ScopedTerm>, VerifyError> {
    let mut out = Vec::new();
    for s in action_steps_in(t, sigma, u)? {
        if s.post == *post
            && (ExplicitLabel::Action {
                action: s.action,
                sync: s.sync,
            })
            .to_string()
                == label
        {
            out.push(s.target);
        }
    }
    for s in env_steps_in(t, sigma, std::slice::from_ref(post))? {
        if ExplicitLabel::Env(s.sync).to_string() == label {
            out.push(s.target);
        }
    }
    Ok(out)
}

/// Replays the counterexample of `report` on `p` over `d`. Reports without
/// a counterexample are not reproduced.
pub fn replay(
    p: &Composition,
    d: &DomainSpec,
    report: &CheckReport,
) -> Result<ReplayOutcome, VerifyError> {
    let Some(cex) = &report.counterexample else {
        return Ok(ReplayOutcome {
            reproduced: false,
            text: "no counterexample to replay\n".into(),
        });
    };
    let Some(pins) = pins_of(p, &cex.state) else {
        return Ok(ReplayOutcome {
            reproduced: false,
            text: "counterexample state does not fit the model\n".into(),
        });
    };
    let q = p.with_pins(&pins);
    let u = d.universe();
    let all = u.all();
    let mut text = String::new();
    let reproduced = match report.check.as_str() {
        SYMBOLIC_CHECK => {
            let Some(sigma) = &cex.sigma else {
                return Ok(ReplayOutcome {
                    reproduced: false,
                    text: "counterexample lacks a valuation\n".into(),
                });
            };
            let ex = explicit_side(&ScopedTerm::Comp(q.clone()), sigma, &u, &all)?;
            let sy = super::symbolic_side(&q, sigma, &u, &all)?;
            for s in ex.iter().filter(|s| !sy.contains(*s)) {
                let _ = writeln!(text, "explicit only: {} to {}", s.label(), s.post());
            }
            for s in sy.iter().filter(|s| !ex.contains(*s)) {
                let _ = writeln!(text, "symbolic only: {} to {}", s.label(), s.post());
            }
            ex != sy
        }
        LITS_CHECK => {
            let sy = sts_side(&q, true);
            let li = lits_side(&q, &lits(p), true);
            for s in sy.iter().filter(|s| !li.contains(*s)) {
                let _ = writeln!(text, "symbolic only: {}", s.describe());
            }
            for s in li.iter().filter(|s| !sy.contains(*s)) {
                let _ = writeln!(text, "LiTS only: {}", s.describe());
            }
            sy != li
        }
        LINEARIZATION_CHECK => {
            let res = linearize_for(p, d);
            let mut left = vec![ScopedTerm::Comp(q.clone())];
            let mut right = match q.pinned_locations() {
                Some(locs) => vec![scope_linearized_at(&res, &locs)],
                None => vec![scope_linearized(&res)],
            };
            let mut diverged = false;
            let last = cex
                .sigma
                .as_ref()
                .zip(cex.post.as_ref())
                .map(|(s, p)| (s, cex.label.as_str(), p));
            let steps = cex
                .trace
                .iter()
                .map(|s| (&s.sigma, s.label.as_str(), &s.post))
                .chain(last);
            for (i, (sigma, label, post)) in steps.enumerate() {
                let mut l2 = Vec::new();
                for t in &left {
                    l2.extend(targets(t, sigma, label, post, &u)?);
                }
                let mut r2 = Vec::new();
                for t in &right {
                    r2.extend(targets(t, sigma, label, post, &u)?);
                }
                let _ = writeln!(
                    text,
                    "step {i}: {sigma} --{label}--> {post}: composition {}, linearization {}",
                    l2.len(),
                    r2.len()
                );
                if l2.is_empty() != r2.is_empty() {
                    diverged = true;
                    break;
                }
                if l2.is_empty() {
                    break;
                }
                (left, right) = (l2, r2);
            }
            diverged
        }
        other => {
            let _ = writeln!(text, "unknown check `{other}`");
            false
        }
    };
    let _ = writeln!(
        text,
        "{}",
        if reproduced {
            "reproduced"
        } else {
            "not reproduced"
        }
    );
    Ok(ReplayOutcome { reproduced, text })
}
