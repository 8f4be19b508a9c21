//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are the constants below.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cif_lin::fixtures::train_gate;
use cif_lin::linear::{lits, lits_action_transitions, predict_size};
use cif_lin::linearize::{linearize_model, to_model};
use cif_lin::model::{Composition, Conj, DomainSpec, Expr, Model, Valuation, Value};
use cif_lin::symbolic::{build_sts, StsLabel};
use cif_lin::verify::generate::{random_model, GenParams};
use cif_lin::verify::{self, mutate, CheckReport, Options};

const STS_BUDGET: Duration = Duration::from_secs(1);
const DISPLAY_BUDGET: Duration = Duration::from_secs(5);
const SEMANTICS_BUDGET: Duration = Duration::from_secs(60);
const BISIM_BUDGET: Duration = Duration::from_secs(120);
const SIZE_SEEDS: u64 = 50;
const RANDOM_SEEDS: u64 = 25;
const MAX_VALUATIONS: usize = 200;

const MODEL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/models/traingate.cif");
const BIN: &str = env!("CARGO_BIN_EXE_cif-lin");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strings(c: &Conj) -> BTreeSet<String> {
    c.0.iter().map(|p| p.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn random_params() -> GenParams {
    GenParams {
        vars: 3,
        domain_size: 3,
        ..GenParams::default()
    }
}

/// Atom(Gate), Atom(Train0), the whole train-gate model, then the random
/// models.
fn semantic_subjects() -> Vec<(String, Composition, DomainSpec)> {
    let m = train_gate();
    let atom = |name: &str| {
        let a = m
            .automata
            .iter()
            .find(|a| a.name == name)
            .expect("automaton exists")
            .clone();
        (
            format!("Atom({name})"),
            Composition::atom(a),
            m.domains.clone(),
        )
    };
    let mut out = vec![
        atom("Gate"),
        atom("Train0"),
        ("train-gate".into(), m.root(), m.domains.clone()),
    ];
    out.extend(random_subjects());
    out
}

fn random_subjects() -> Vec<(String, Composition, DomainSpec)> {
    (0..RANDOM_SEEDS)
        .map(|seed| {
            let m = random_model(seed, &random_params());
            (format!("seed {seed}"), m.root(), m.domains)
        })
        .collect()
}

fn all_pass(
    subjects: &[(String, Composition, DomainSpec)],
    check: impl Fn(&Composition, &DomainSpec) -> Result<CheckReport, verify::VerifyError>,
) -> Result<usize, String> {
    let mut pairs = 0;
    for (name, p, d) in subjects {
        ensure(d.universe_size() <= MAX_VALUATIONS, || {
            format!("{name}: {} valuations", d.universe_size())
        })?;
        let r = check(p, d).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.passed, || format!("{name}:\n{r}"))?;
        pairs += r.stats.pairs;
    }
    Ok(pairs)
}

fn sts_size() -> Outcome {
    let p = train_gate().root();
    let t = Instant::now();
    let sts = build_sts(&p, true);
    let elapsed = t.elapsed();
    ensure(sts.state_count() == 16, || {
        format!("{} states", sts.state_count())
    })?;
    ensure(elapsed < STS_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("16 states in {elapsed:?}"))
}

fn sts_fragment() -> Outcome {
    let p = train_gate().root();
    let sts = build_sts(&p, true);
    let rq_target = p.reinit(&["N", "F", "C"]).expect("valid locations");
    let env_target = p.reinit(&["F", "F", "C"]).expect("valid locations");
    let from_root: Vec<_> = sts.edges.iter().filter(|e| e.source == 0).collect();
    let rq = from_root.iter().any(|e| match &e.label {
        StsLabel::Action(l) => {
            *sts.state(e.target) == rq_target
                && l.action.name() == "rq"
                && strings(&l.reset) == set(&["id' == 0", "wq' == wq ++ [id']"])
                && strings(&l.inv) == set(&["n == 0"])
                && strings(&l.inv_post) == set(&["n == 0"])
                && l.sync
        }
        StsLabel::Env(_) => false,
    });
    ensure(rq, || {
        "no rq transition to <N, F, C> with the expected label".into()
    })?;
    let env = from_root.iter().any(|e| match &e.label {
        StsLabel::Env(l) => {
            *sts.state(e.target) == env_target
                && strings(&l.init) == set(&["wq == []"])
                && strings(&l.inv) == set(&["n == 0"])
        }
        StsLabel::Action(_) => false,
    });
    ensure(env, || {
        "no env transition to <F, F, C> with the expected label".into()
    })?;
    Ok("rq and env transitions from the root match".into())
}

/// The drawn linear automaton, as (action, reset conjuncts) with the
/// out-reset decrementing `n`.
fn drawn_edges() -> Vec<(&'static str, BTreeSet<String>)> {
    let mut out = Vec::new();
    for (i, l) in [(0, "l0"), (1, "l1")] {
        let e = |action, parts: Vec<String>| (action, parts.into_iter().collect::<BTreeSet<_>>());
        out.push(e(
            "rq",
            vec![
                format!("id' == {i}"),
                "wq' == wq ++ [id']".into(),
                format!("{l} == F"),
                format!("{l}' == N"),
                "l2 == C".into(),
                "l2' == C".into(),
            ],
        ));
        out.push(e("stop", vec![format!("{l} == N"), format!("{l}' == S")]));
        for from in ["N", "S"] {
            out.push(e(
                "go",
                vec![
                    format!("p' == {i}"),
                    "n' == n + 1".into(),
                    "[p'] ++ wq' == wq".into(),
                    format!("{l} == {from}"),
                    format!("{l}' == P"),
                    "l2 == C".into(),
                    "l2' == O".into(),
                ],
            ));
        }
        out.push(e(
            "out",
            vec![
                "n' == n - 1".into(),
                format!("{l} == P"),
                format!("{l}' == F"),
                "l2 == O".into(),
                "l2' == C".into(),
            ],
        ));
    }
    out
}

fn lits_size_and_edges() -> Outcome {
    let m = train_gate();
    let n = lits_action_transitions(&m.root()).len();
    ensure(n == 12, || format!("{n} LiTS action transitions"))?;
    let res = linearize_model(&m);
    let ours: Vec<(String, BTreeSet<String>)> = res
        .automaton
        .edges
        .iter()
        .map(|e| (e.action.name().to_string(), strings(&Conj::of(&e.reset))))
        .collect();
    ensure(ours.len() == 12, || format!("{} linear edges", ours.len()))?;
    for (action, parts) in drawn_edges() {
        ensure(ours.iter().any(|(a, p)| a == action && *p == parts), || {
            format!("missing {action}: {parts:?}")
        })?;
    }
    Ok("12 transitions; all 10 drawn edges present".into())
}

fn loc(v: &Valuation, name: &str) -> String {
    match v.get(name) {
        Some(Value::Loc(l)) => l.clone(),
        other => panic!("{name} = {other:?}"),
    }
}

fn int(v: &Valuation, name: &str) -> i64 {
    match v.get(name) {
        Some(Value::Int(i)) => *i,
        other => panic!("{name} = {other:?}"),
    }
}

fn predicate_displays() -> Outcome {
    let t = Instant::now();
    let m = train_gate();
    let res = linearize_model(&m);
    let lm: Model = to_model(&res, &m);
    let x = &res.automaton.locations[0];
    let mut checked = 0;
    for v in lm.domains.universe().all() {
        let init = loc(&v, "l0") == "F"
            && loc(&v, "l1") == "F"
            && loc(&v, "l2") == "C"
            && v.get("wq") == Some(&Value::List(vec![]));
        let inv = (loc(&v, "l2") != "C" || int(&v, "n") == 0)
            && (loc(&v, "l2") != "O" || int(&v, "n") <= 1);
        let got_init = x.init.eval(&v).map_err(|e| e.to_string())?;
        let got_inv = x.inv.eval(&v).map_err(|e| e.to_string())?;
        ensure(got_init == init && got_inv == inv, || {
            format!("differs at {v}")
        })?;
        checked += 1;
    }
    let elapsed = t.elapsed();
    ensure(elapsed < DISPLAY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} valuations in {elapsed:?}"))
}

fn size_prediction() -> Outcome {
    for seed in 0..SIZE_SEEDS {
        let automata = 2 + (seed % 3) as usize;
        let m = random_model(seed, &GenParams::single_sync(automata, 6));
        let p = m.root();
        let predicted = predict_size(&p, "a0").map_err(|e| format!("seed {seed}: {e}"))?;
        let actual = lits_action_transitions(&p).len();
        ensure(predicted == actual, || {
            format!("seed {seed}: predicted {predicted}, actual {actual}")
        })?;
    }
    Ok(format!("{SIZE_SEEDS} seeds"))
}

fn symbolic_vs_explicit() -> Outcome {
    let t = Instant::now();
    let subjects = semantic_subjects();
    let pairs = all_pass(&subjects, |p, d| {
        verify::check_symbolic(p, d, &Options::default())
    })?;
    let elapsed = t.elapsed();
    ensure(elapsed < SEMANTICS_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} models, {pairs} pairs in {elapsed:?}",
        subjects.len()
    ))
}

fn lits_vs_symbolic() -> Outcome {
    let subjects = semantic_subjects();
    let pairs = all_pass(&subjects, |p, _| verify::check_lits(p, &Options::default()))?;
    Ok(format!("{} models, {pairs} pairs", subjects.len()))
}

fn linearization() -> Outcome {
    let t = Instant::now();
    let m = train_gate();
    let mut subjects = vec![("train-gate".to_string(), m.root(), m.domains.clone())];
    subjects.extend(random_subjects());
    let pairs = all_pass(&subjects, |p, d| {
        verify::check_linearization(p, d, &Options::default())
    })?;
    let elapsed = t.elapsed();
    ensure(elapsed < BISIM_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} models, {pairs} pairs in {elapsed:?}",
        subjects.len()
    ))
}

fn fails_with_counterexample(
    what: &str,
    r: Result<CheckReport, verify::VerifyError>,
) -> Result<(), String> {
    let r = r.map_err(|e| format!("{what}: {e}"))?;
    ensure(!r.passed && r.counterexample.is_some(), || {
        format!("{what} not detected:\n{r}")
    })
}

fn fault_sensitivity() -> Outcome {
    let m = train_gate();
    let p = m.root();
    let opts = Options::default();
    let faulty = mutate::with_invariant(&p, "Gate", "C", Expr::var("n").eq(Expr::int(1)));
    fails_with_counterexample(
        "changed invariant",
        verify::check_symbolic_with(&p, &faulty, &m.domains, &opts),
    )?;
    let dropped = mutate::without_lits_transition(&lits(&p), 0);
    fails_with_counterexample(
        "dropped LiTS transition",
        verify::check_lits_with(&p, &dropped, &opts),
    )?;
    let res = verify::linearize_for(&p, &m.domains);
    let (edge, ptr) = mutate::moving_edge(&res).ok_or("no edge moves a pointer")?;
    let broken = mutate::without_pointer_update(&res, edge, &ptr);
    fails_with_counterexample(
        "deleted pointer update",
        verify::check_linearization_with(&p, &broken, &m.domains, &opts),
    )?;
    Ok("all three mutations caught".into())
}

fn cli_output(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited with {:?}", out.status.code())
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &[
            "verify", MODEL, "--format", "json", "--seed", "3", "--random", "2",
        ],
        &["linearize", MODEL],
        &["linearize", MODEL, "--format", "json"],
    ];
    for args in runs {
        let (a, b) = (cli_output(args)?, cli_output(args)?);
        ensure(a == b, || format!("{args:?} differs between runs"))?;
    }
    Ok("verify and linearize outputs identical across runs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("train-gate STS has 16 states", sts_size),
        ("STS fragment around the root", sts_fragment),
        ("LiTS size and drawn linear edges", lits_size_and_edges),
        ("linear init and invariant displays", predicate_displays),
        ("LiTS size prediction", size_prediction),
        ("symbolic vs explicit semantics", symbolic_vs_explicit),
        ("LiTS vs symbolic semantics", lits_vs_symbolic),
        ("linearization is stateless bisimilar", linearization),
        ("injected faults are detected", fault_sensitivity),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
