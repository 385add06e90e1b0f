use std::fs;
use std::path::Path;

use serde_json::{json, Value as Json};

use scilla_core::checks::check_contract;
use scilla_core::lang::{Address, ContractDef, Uint};
use scilla_core::propcheck::json::{alphabet_from_json, verdict_to_json};
use scilla_core::propcheck::{
    builtin_predicates, check_can_claim_back, check_safe_inductive, check_safe_with_jobs, check_since_as_long,
    Alphabet, PredKind, Predicate, PropError, StateGenerator, Verdict, DEFAULT_SEED,
};
use scilla_core::runtime::json::{
    cstate_to_json, message_from_json, message_to_json, params_from_json, parse_json, schedule_from_json,
    to_pretty, trace_to_json,
};
use scilla_core::runtime::{
    execute, instantiate, lint_trace, run_network, BState, ContractInstance, NetOutcome, NetworkState, Step,
};
use scilla_core::syntax::parse_contract;

use crate::{Deploy, Format, NetworkArgs, SimulateArgs, VerifyArgs};

const HOLDS: u8 = 0;
const VIOLATED: u8 = 1;
const PARSE: u8 = 2;
const CHECK: u8 = 3;
const SCHEMA: u8 = 4;
const INCONCLUSIVE: u8 = 5;
const PREDICATE: u8 = 6;
const IO: u8 = 10;

/// Variable that overrides the default sampling seed.
pub const SEED_VAR: &str = "SCILLA_MC_SEED";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Res<T> = Result<T, Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| fail(IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| fail(IO, format!("{}: {e}", path.display())))
}

fn load_json(path: &Path) -> Res<Json> {
    parse_json(&read(path)?).map_err(|e| fail(SCHEMA, format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_file(path: &Path) -> Res<ContractDef> {
    let src = read(path)?;
    parse_contract(&src).map_err(|e| {
        fail(PARSE, format!("{}:{}:{}: error[PARSE]: expected {}, found {}", path.display(), e.span.line, e.span.column, e.expected, e.found))
    })
}

pub fn check(path: &Path, format: Format) -> Res<u8> {
    let def = parse_file(path)?;
    let report = check_contract(&def);
    let file = path.display().to_string();
    match format {
        Format::Text => print!("{}", report.render(&file)),
        Format::Json => {
            let diags: Vec<Json> = report
                .diagnostics
                .iter()
                .map(|d| {
                    json!({
                        "file": file,
                        "line": d.span.line,
                        "column": d.span.column,
                        "severity": d.severity.to_string(),
                        "rule": d.rule.to_string(),
                        "message": d.message,
                    })
                })
                .collect();
            print!("{}", to_pretty(&Json::Array(diags)));
        }
    }
    Ok(if report.has_errors() { CHECK } else { 0 })
}

/// Parses, checks and instantiates a contract.
fn deploy(d: &Deploy) -> Res<ContractInstance> {
    let def = parse_file(&d.contract)?;
    let report = check_contract(&def);
    if report.has_errors() {
        let text = report.render(&d.contract.display().to_string());
        return Err(fail(CHECK, format!("contract rejected by the static checks\n{}", text.trim_end())));
    }
    let params = match &d.params {
        Some(p) => params_from_json(&def, &load_json(p)?).map_err(|e| fail(SCHEMA, format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    instantiate(def, Address::new(&d.id), Uint::from(d.balance), &params).map_err(|e| fail(SCHEMA, e.to_string()))
}

pub fn simulate(a: &SimulateArgs) -> Res<u8> {
    let inst = deploy(&a.deploy)?;
    let file = schedule_from_json(&load_json(&a.schedule)?)
        .map_err(|e| fail(SCHEMA, format!("{}: {e}", a.schedule.display())))?;
    let start = file.start.unwrap_or_else(|| inst.state0.clone());
    let trace = if file.schedule.is_empty() {
        vec![Step::identity(start)]
    } else {
        execute(&inst, &start, &file.schedule)
    };
    for (i, lint) in lint_trace(&trace, &file.schedule) {
        eprintln!("{}: step {i}: {lint}", a.schedule.display());
    }
    emit(a.out.as_deref(), &to_pretty(&trace_to_json(&trace)))?;
    Ok(0)
}

enum Property {
    Safety(Predicate),
    Preserved { p: Predicate, q: Predicate, r: Predicate },
    ClaimBack { backer: Address, amount: Uint },
}

fn pred_err(e: PropError) -> Failure {
    fail(PREDICATE, e.to_string())
}

fn resolve(a: &VerifyArgs, inst: &ContractInstance) -> Res<(String, Property)> {
    let compile = |src: &str, kind| Predicate::compile(src, kind, inst).map_err(pred_err);
    if let Some(expr) = &a.expr {
        return Ok((expr.clone(), Property::Safety(compile(expr, PredKind::State)?)));
    }
    let name = a.prop.as_deref().expect("clap requires --prop or --expr");
    let amount = Uint::parse_decimal(&a.amount).ok_or_else(|| fail(PREDICATE, format!("--amount `{}` is not a number", a.amount)))?;
    let (b, d) = (a.backer.as_str(), a.amount.as_str());
    let registry = builtin_predicates();
    let instantiate = |name: &str, args: &[&str], kind| -> Res<Predicate> {
        let builtin = registry.get(name).map_err(pred_err)?;
        compile(&builtin.instantiate(args).map_err(pred_err)?, kind)
    };
    let prop = match name {
        "donation_preserved" => Property::Preserved {
            p: instantiate("donated", &[b, d], PredKind::State)?,
            q: compile(&format!("has_entry(post.backers, \"{b}\", {d})"), PredKind::Step)?,
            r: instantiate("no_claims_from", &[b], PredKind::Elem)?,
        },
        "can_claim_back" => Property::ClaimBack { backer: Address::new(b), amount },
        other => {
            let builtin = registry.get(other).map_err(pred_err)?;
            if builtin.kind != PredKind::State {
                return Err(fail(PREDICATE, format!("`{other}` is a {} predicate, not a property", builtin.kind)));
            }
            let args: Vec<&str> = builtin.params.iter().map(|p| if *p == "b" { b } else { d }).collect();
            Property::Safety(instantiate(other, &args, PredKind::State)?)
        }
    };
    let label = match name {
        "donation_preserved" | "can_claim_back" | "donated" => format!("{name}({b}, {d})"),
        _ => name.to_string(),
    };
    Ok((label, prop))
}

fn seed(a: &VerifyArgs) -> Res<u64> {
    if let Some(s) = a.seed {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| fail(SCHEMA, format!("{SEED_VAR}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn verify(a: &VerifyArgs) -> Res<u8> {
    let inst = deploy(&a.deploy)?;
    let alphabet = match &a.alphabet {
        Some(p) => alphabet_from_json(&load_json(p)?).map_err(|e| fail(SCHEMA, format!("{}: {e}", p.display())))?,
        None => Alphabet::astar(inst.id()),
    };
    let (label, prop) = resolve(a, &inst)?;
    let result = match (&prop, a.inductive) {
        (Property::Safety(p), false) => check_safe_with_jobs(&inst, p, &alphabet, a.depth, a.jobs),
        (Property::Safety(p), true) => {
            let gen = StateGenerator::new(&inst, &alphabet);
            check_safe_inductive(&inst, p, &gen, &alphabet, a.samples, seed(a)?)
        }
        (_, true) => return Err(fail(PREDICATE, format!("--inductive applies to state predicates, not `{label}`"))),
        (Property::Preserved { p, q, r }, false) => check_since_as_long(
            &inst,
            p,
            q,
            r,
            &alphabet,
            a.reach_depth.unwrap_or(a.depth),
            a.cont_depth.unwrap_or(a.depth),
        ),
        (Property::ClaimBack { backer, amount }, false) => check_can_claim_back(&inst, backer, amount, &alphabet, a.depth),
    };
    let verdict = match result {
        Ok(v) => v,
        Err(e @ (PropError::GeneratorExhausted { .. } | PropError::Pool(_))) => Verdict::Inconclusive { reason: e.to_string() },
        Err(e) => return Err(pred_err(e)),
    };

    if let Verdict::Violated(w) = &verdict {
        let file = scilla_core::propcheck::json::witness_to_json(w);
        write(&a.out, &to_pretty(&file))?;
    }
    match a.format {
        Format::Json => {
            let mut obj = verdict_to_json(&verdict);
            let map = obj.as_object_mut().expect("verdicts are objects");
            map.insert("property".into(), Json::String(label));
            if verdict.witness().is_some() {
                map.insert("witness_file".into(), Json::String(a.out.display().to_string()));
            }
            print!("{}", to_pretty(&obj));
        }
        Format::Text => print!("{}", render_verdict(&label, &verdict, &a.out)),
    }
    Ok(match verdict {
        Verdict::Holds { .. } => HOLDS,
        Verdict::Violated(_) => VIOLATED,
        Verdict::Inconclusive { .. } => INCONCLUSIVE,
    })
}

fn render_verdict(label: &str, v: &Verdict, out: &Path) -> String {
    match v {
        Verdict::Holds { schedules_checked, steps_executed, premise_states, bound } => {
            let mut s = format!("holds: {label}\n  bound: {bound}\n  {schedules_checked} checked, {steps_executed} steps");
            if let Some(n) = premise_states {
                s.push_str(&format!(", {n} premise states"));
            }
            s + "\n"
        }
        Verdict::Violated(w) => {
            let mut s = format!("violated: {label}\n  bound: {}\n  {}\n", w.bound, w.detail);
            for (i, e) in w.schedule.iter().enumerate() {
                let mark = if w.continuation_from == Some(i) { "  -- continuation --\n" } else { "" };
                s.push_str(&format!("{mark}  [{i}] block {}: {}\n", e.bc.block_num, e.msg));
            }
            s + &format!("  witness written to {}\n", out.display())
        }
        Verdict::Inconclusive { reason } => format!("inconclusive: {label}\n  {reason}\n"),
    }
}

pub fn network(a: &NetworkArgs) -> Res<u8> {
    let mut contracts = Vec::new();
    for node in &a.nodes {
        let parts: Vec<&str> = node.split(',').collect();
        let (id, contract, params) = match parts[..] {
            [id, c] => (id, c, None),
            [id, c, p] => (id, c, Some(p.into())),
            _ => return Err(fail(SCHEMA, format!("--node `{node}`: expected ID,CONTRACT[,PARAMS]"))),
        };
        contracts.push(deploy(&Deploy { contract: contract.into(), params, id: id.to_string(), balance: 0 })?);
    }
    let accounts = a.accounts.iter().map(|s| Address::new(s)).collect();
    let initial = message_from_json(&load_json(&a.message)?, "message")
        .map_err(|e| fail(SCHEMA, format!("{}: {e}", a.message.display())))?;
    let mut net = NetworkState::new(contracts, accounts).map_err(|e| fail(SCHEMA, e.to_string()))?;
    let run = run_network(&mut net, initial, &BState::at(a.block), a.budget).map_err(|e| fail(SCHEMA, e.to_string()))?;

    let outcome = match run.outcome {
        NetOutcome::Completed => json!({"kind": "completed"}),
        NetOutcome::BudgetExhausted => json!({"kind": "budget_exhausted"}),
        NetOutcome::Stuck { waiting } => json!({"kind": "stuck", "waiting": waiting}),
    };
    let mut states = serde_json::Map::new();
    for n in &net.nodes {
        states.insert(n.inst.id().to_string(), cstate_to_json(&n.state));
    }
    let report = json!({
        "outcome": outcome,
        "steps": trace_to_json(&run.steps),
        "delivered": run.delivered.iter().map(message_to_json).collect::<Vec<_>>(),
        "faults": run.faults,
        "states": states,
    });
    emit(a.out.as_deref(), &to_pretty(&report))?;
    Ok(0)
}
