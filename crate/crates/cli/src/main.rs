//! `cif-lin`: parse, explore, linearize and verify CIF-style models.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or parse error,
//! 3 budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use cif_lin::explicit::{
    explicit_lts, initial_valuations, lts_to_dot, lts_to_json, ExplicitLts, LtsError, ScopedTerm,
};
use cif_lin::linear::{lits, lits_action_transitions, predict_size};
use cif_lin::linearize::{linearize_model, simplify_result, to_dot, to_json, to_model};
use cif_lin::model::{parse_model, print_model, Model, ParseError};
use cif_lin::symbolic::{build_sts, sts_to_dot, sts_to_json, Sts, StsLabel};
use cif_lin::verify::generate::{random_model, GenParams};
use cif_lin::verify::{self, CheckReport, Options, VerifyError};

#[derive(Parser)]
#[command(
    name = "cif-lin",
    version,
    about = "Linearization toolkit for CIF-style automata compositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Echo the model in normalized form.
    Parse(Common),
    /// Explicit transition system from the declared initial valuations.
    Explicit(Common),
    /// Symbolic transition system.
    Sts(Common),
    /// Linear transition system.
    Lits(Common),
    /// The linear automaton of the model's composition.
    Linearize(Common),
    /// Run every check; exit 0 iff all pass.
    Verify(Common),
    /// Predicted against actual number of LiTS action transitions.
    Size(Common),
}

#[derive(Args)]
struct Common {
    /// Model file.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text, env = "CIFLIN_FORMAT")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(short, long, env = "CIFLIN_OUTPUT")]
    output: Option<PathBuf>,
    /// Drop symbolic transitions whose initial predicate is literally false.
    #[arg(long, env = "CIFLIN_PRUNE")]
    prune: bool,
    /// Fold constants and absorb true/false in linearized predicates.
    #[arg(long, env = "CIFLIN_SIMPLIFY")]
    simplify: bool,
    /// First seed for random models checked by `verify`.
    #[arg(long, default_value_t = 0, env = "CIFLIN_SEED")]
    seed: u64,
    /// Number of random models `verify` checks besides the input.
    #[arg(long, default_value_t = 0, env = "CIFLIN_RANDOM")]
    random: u64,
    #[arg(long, default_value_t = Options::default().max_states, env = "CIFLIN_MAX_STATES")]
    max_states: usize,
    #[arg(long, default_value_t = Options::default().max_pairs, env = "CIFLIN_MAX_PAIRS")]
    max_pairs: usize,
    /// Replay the counterexamples of a JSON report written by `verify`.
    #[arg(long, env = "CIFLIN_REPLAY")]
    replay: Option<PathBuf>,
    /// Include wall-clock times in `verify` reports.
    #[arg(long, env = "CIFLIN_TIMINGS")]
    timings: bool,
    /// Action for `size`; defaults to the model's only synchronizing action.
    #[arg(long, env = "CIFLIN_ACTION")]
    action: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            max_states: self.max_states,
            max_pairs: self.max_pairs,
            timings: self.timings,
        }
    }
}

/// An outcome that maps to a nonzero exit code.
#[derive(Debug)]
enum Exit {
    CheckFailed,
    Usage(String),
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exit::CheckFailed => f.write_str("check failed"),
            Exit::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Exit {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(x) = e.downcast_ref::<Exit>() {
        return match x {
            Exit::CheckFailed => 1,
            Exit::Usage(_) => 2,
        };
    }
    if matches!(
        e.downcast_ref::<VerifyError>(),
        Some(VerifyError::Budget { .. })
    ) || matches!(
        e.downcast_ref::<LtsError>(),
        Some(LtsError::BudgetExceeded { .. })
    ) {
        return 3;
    }
    if e.downcast_ref::<ParseError>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if !matches!(e.downcast_ref::<Exit>(), Some(Exit::CheckFailed)) {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Model> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_model(&text)?)
}

fn emit(c: &Common, text: &str) -> anyhow::Result<()> {
    match &c.output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.context("writing standard output")?,
            }
        }
    }
    Ok(())
}

fn json_text(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, f: Format) -> anyhow::Error {
    let name = match f {
        Format::Text => "text",
        Format::Json => "json",
        Format::Dot => "dot",
    };
    anyhow!(Exit::Usage(format!("`{cmd}` has no {name} output")))
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Parse(c) => parse_cmd(&c),
        Command::Explicit(c) => explicit_cmd(&c),
        Command::Sts(c) => sts_cmd(&c),
        Command::Lits(c) => lits_cmd(&c),
        Command::Linearize(c) => linearize_cmd(&c),
        Command::Verify(c) => verify_cmd(&c),
        Command::Size(c) => size_cmd(&c),
    }
}

fn model_json(m: &Model) -> Json {
    json!({
        "actions": m.actions,
        "domains": m.domains.vars.iter().map(|(n, d)| json!({"var": n, "domain": d.to_string()})).collect::<Vec<_>>(),
        "automata": m.automata.iter().map(|a| json!({
            "name": a.name,
            "sync": a.sync,
            "locations": a.locations.iter().map(|l| json!({
                "name": l.name, "init": l.init.to_string(), "inv": l.inv.to_string(),
            })).collect::<Vec<_>>(),
            "edges": a.edges.iter().map(|e| json!({
                "source": e.source, "action": e.action, "r": e.reset.to_string(), "target": e.target,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "composition": m.composition.as_ref().map(|(n, c)| json!({"name": n, "term": c.to_string()})),
    })
}

fn parse_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    match c.format {
        Format::Text => emit(c, &print_model(&m)),
        Format::Json => emit(c, &json_text(&model_json(&m))),
        f => Err(unsupported("parse", f)),
    }
}

fn explicit_text(ts: &ExplicitLts) -> String {
    let mut out = format!("states {}\nedges {}\n", ts.state_count(), ts.edge_count());
    for (i, s) in ts.states().enumerate() {
        let _ = writeln!(out, "s{i} {} {}", s.term.state_label(), s.valuation);
    }
    for e in &ts.edges {
        let _ = writeln!(out, "s{} -> s{} : {}", e.source, e.target, e.label);
    }
    out
}

fn explicit_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    let t = ScopedTerm::Comp(m.root());
    let init = initial_valuations(&t, &m.domains)?;
    let ts = explicit_lts(&t, &init, &m.domains, c.max_states)?;
    match c.format {
        Format::Text => emit(c, &explicit_text(&ts)),
        Format::Json => emit(c, &json_text(&lts_to_json(&ts))),
        Format::Dot => emit(c, &lts_to_dot(&ts, m.composition_name())),
    }
}

fn sts_text(sts: &Sts) -> String {
    let mut out = format!("states {}\nedges {}\n", sts.state_count(), sts.edge_count());
    for (i, s) in sts.states().enumerate() {
        let _ = writeln!(out, "s{i} {}", s.state_label());
    }
    for e in &sts.edges {
        match &e.label {
            StsLabel::Action(l) => {
                let _ = writeln!(out, "s{} -> s{} : {l}", e.source, e.target);
            }
            StsLabel::Env(l) => {
                let _ = writeln!(out, "s{} ~> s{} : {l}", e.source, e.target);
            }
        }
    }
    out
}

fn sts_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    let sts = build_sts(&m.root(), c.prune);
    if sts.state_count() > c.max_states {
        return Err(VerifyError::Budget {
            what: "state",
            bound: c.max_states,
        }
        .into());
    }
    match c.format {
        Format::Text => emit(c, &sts_text(&sts)),
        Format::Json => emit(c, &json_text(&sts_to_json(&sts))),
        Format::Dot => emit(c, &sts_to_dot(&sts, m.composition_name())),
    }
}

fn lits_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    let l = lits(&m.root());
    match c.format {
        Format::Text => emit(c, &l.to_text()),
        Format::Json => emit(c, &json_text(&l.to_json())),
        Format::Dot => emit(c, &l.to_dot(m.composition_name())),
    }
}

fn linearize_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    let mut res = linearize_model(&m);
    if c.simplify {
        res = simplify_result(&res);
    }
    match c.format {
        Format::Text => emit(c, &print_model(&to_model(&res, &m))),
        Format::Json => emit(c, &json_text(&to_json(&res))),
        Format::Dot => emit(c, &to_dot(&res)),
    }
}

/// One checked model: the input or a generated one.
struct Subject {
    name: String,
    seed: Option<u64>,
    model: Model,
}

fn subjects(c: &Common, m: Model) -> Vec<Subject> {
    let mut out = vec![Subject {
        name: c.input.display().to_string(),
        seed: None,
        model: m,
    }];
    for seed in c.seed..c.seed + c.random {
        out.push(Subject {
            name: format!("random seed {seed}"),
            seed: Some(seed),
            model: random_model(seed, &GenParams::default()),
        });
    }
    out
}

fn check_all(s: &Subject, opts: &Options) -> Result<Vec<CheckReport>, VerifyError> {
    let p = s.model.root();
    Ok(vec![
        verify::check_symbolic(&p, &s.model.domains, opts)?,
        verify::check_lits(&p, opts)?,
        verify::check_linearization(&p, &s.model.domains, opts)?,
    ])
}

fn verify_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    if let Some(path) = &c.replay {
        return replay_cmd(c, m, path);
    }
    if c.format == Format::Dot {
        return Err(unsupported("verify", Format::Dot));
    }
    let opts = c.options();
    let mut results = Vec::new();
    let mut passed = true;
    for s in subjects(c, m) {
        let reports = check_all(&s, &opts)?;
        passed &= reports.iter().all(|r| r.passed);
        results.push((s, reports));
    }
    let out = match c.format {
        Format::Json => json_text(&json!({
            "passed": passed,
            "results": results.iter().map(|(s, reports)| json!({
                "model": s.name,
                "seed": s.seed,
                "reports": reports,
            })).collect::<Vec<_>>(),
        })),
        _ => {
            let mut out = String::new();
            for (s, reports) in &results {
                let _ = writeln!(out, "model {}", s.name);
                for r in reports {
                    out.push_str(&r.to_string());
                }
            }
            let _ = writeln!(
                out,
                "{}",
                if passed {
                    "all checks passed"
                } else {
                    "some checks failed"
                }
            );
            out
        }
    };
    emit(c, &out)?;
    if passed {
        Ok(())
    } else {
        Err(Exit::CheckFailed.into())
    }
}

fn replay_cmd(c: &Common, m: Model, path: &Path) -> anyhow::Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Json =
        serde_json::from_str(&text).map_err(|e| Exit::Usage(format!("{}: {e}", path.display())))?;
    let Some(results) = doc.get("results").and_then(Json::as_array) else {
        bail!(Exit::Usage(format!(
            "{}: not a verify report",
            path.display()
        )));
    };
    let mut out = String::new();
    let mut reproduced = false;
    for entry in results {
        let model = match entry.get("seed").and_then(Json::as_u64) {
            Some(seed) => random_model(seed, &GenParams::default()),
            None => m.clone(),
        };
        let reports: Vec<CheckReport> = serde_json::from_value(entry["reports"].clone())
            .map_err(|e| Exit::Usage(format!("{}: {e}", path.display())))?;
        for r in reports.iter().filter(|r| r.counterexample.is_some()) {
            let outcome = verify::replay(&model.root(), &model.domains, r)?;
            let _ = writeln!(
                out,
                "{} / {}:",
                entry["model"].as_str().unwrap_or("?"),
                r.check
            );
            out.push_str(&outcome.text);
            reproduced |= outcome.reproduced;
        }
    }
    if out.is_empty() {
        out.push_str("no counterexamples to replay\n");
    }
    emit(c, &out)?;
    if reproduced {
        Err(Exit::CheckFailed.into())
    } else {
        Ok(())
    }
}

fn size_cmd(c: &Common) -> anyhow::Result<()> {
    let m = load(&c.input)?;
    let p = m.root();
    let action = match &c.action {
        Some(a) => a.clone(),
        None => {
            let sync = p.sync_actions();
            if sync.len() != 1 {
                bail!(Exit::Usage(format!(
                    "the model synchronizes on {} actions; pass --action",
                    sync.len()
                )));
            }
            sync.into_iter().next().expect("one action")
        }
    };
    let actual = lits_action_transitions(&p).len();
    let (predicted, note) = match predict_size(&p, &action) {
        Ok(n) => (Some(n), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let out = match c.format {
        Format::Text => match (predicted, &note) {
            (Some(n), _) => format!("action {action}\npredicted {n}\nactual {actual}\n"),
            (None, Some(e)) => format!("action {action}\nnot applicable: {e}\nactual {actual}\n"),
            _ => unreachable!(),
        },
        Format::Json => json_text(
            &json!({"action": action, "predicted": predicted, "actual": actual, "note": note}),
        ),
        f => return Err(unsupported("size", f)),
    };
    emit(c, &out)?;
    if predicted == Some(actual) {
        Ok(())
    } else {
        Err(Exit::CheckFailed.into())
    }
}
