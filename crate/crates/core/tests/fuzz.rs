//! Random contracts: well-formed ones never go wrong at run time, and every
//! parseable one survives a pretty-print round trip.

use std::sync::atomic::{AtomicUsize, Ordering};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scilla_core::checks::check_contract;
use scilla_core::lang::{Address, EvalError, Message, Payload, Tag, Uint, Value};
use scilla_core::propcheck::{Alphabet, StateGenerator};
use scilla_core::runtime::Failure;
use scilla_core::runtime::{apply_transition_detailed, instantiate, BState};
use scilla_core::syntax::{parse_contract, pretty_print};

/// Names a generated expression may mention. `zz` is never bound.
const VARS: &[&str] = &["p", "q", "sender", "value", "tag", "u", "m", "bb", "w", "zz"];

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u64..20).prop_map(|n| n.to_string()),
        Just("true".to_string()),
        Just("false".to_string()),
        Just("\"A1\"".to_string()),
        Just("[]".to_string()),
        prop::sample::select(VARS).prop_map(str::to_string),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(&["+", "-", "==", "<=", "<", "&&", "||"][..]), inner.clone())
                .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
            inner.clone().prop_map(|a| format!("(not {a})")),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| format!("put({a}, {b}, {c})")),
            (prop::sample::select(&["get", "remove", "contains"][..]), inner.clone(), inner.clone())
                .prop_map(|(f, a, b)| format!("{f}({a}, {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("(let w = {a} in {b})")),
        ]
    })
}

#[derive(Clone, Copy)]
enum Ty {
    Uint,
    Bool,
    Map,
    Addr,
    Str,
}

/// A well-typed expression of type `ty`; `w` is bound to a uint when `w_bound`.
fn typed(rng: &mut ChaCha8Rng, ty: Ty, depth: u32, w_bound: bool) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    let sub = |rng: &mut ChaCha8Rng, t: Ty| typed(rng, t, depth.saturating_sub(1), w_bound);
    match ty {
        Ty::Uint if leaf => {
            let vars: &[&str] = if w_bound { &["p", "value", "u", "w"] } else { &["p", "value", "u"] };
            if rng.gen_bool(0.4) { rng.gen_range(0..20u32).to_string() } else { vars[rng.gen_range(0..vars.len())].into() }
        }
        Ty::Uint => match rng.gen_range(0..4) {
            0 => format!("({} + {})", sub(rng, Ty::Uint), sub(rng, Ty::Uint)),
            1 => format!("({} - {})", sub(rng, Ty::Uint), sub(rng, Ty::Uint)),
            2 => format!("get({}, {})", sub(rng, Ty::Map), sub(rng, Ty::Addr)),
            _ => {
                let v = sub(rng, Ty::Uint);
                format!("(let w = {v} in {})", typed(rng, Ty::Uint, depth.saturating_sub(1), true))
            }
        },
        Ty::Bool if leaf => ["true", "false", "bb"][rng.gen_range(0..3)].into(),
        Ty::Bool => match rng.gen_range(0..7) {
            0 => format!("({} == {})", sub(rng, Ty::Uint), sub(rng, Ty::Uint)),
            1 => format!("({} <= {})", sub(rng, Ty::Uint), sub(rng, Ty::Uint)),
            2 => format!("({} < {})", sub(rng, Ty::Uint), sub(rng, Ty::Uint)),
            3 => format!("({} && {})", sub(rng, Ty::Bool), sub(rng, Ty::Bool)),
            4 => format!("({} || {})", sub(rng, Ty::Bool), sub(rng, Ty::Bool)),
            5 => format!("(not {})", sub(rng, Ty::Bool)),
            _ => format!("contains({}, {})", sub(rng, Ty::Map), sub(rng, Ty::Addr)),
        },
        Ty::Map if leaf => ["[]", "m"][rng.gen_range(0..2)].into(),
        Ty::Map => match rng.gen_range(0..2) {
            0 => format!("put({}, {}, {})", sub(rng, Ty::Map), sub(rng, Ty::Addr), sub(rng, Ty::Uint)),
            _ => format!("remove({}, {})", sub(rng, Ty::Map), sub(rng, Ty::Addr)),
        },
        Ty::Addr => ["sender", "q"][rng.gen_range(0..2)].into(),
        Ty::Str => ["tag", "\"A1\""][rng.gen_range(0..2)].into(),
    }
}

/// Field to write and a well-typed expression for it, from a seed.
fn typed_write() -> impl Strategy<Value = (&'static str, String, Option<String>)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, ty) = [("f_u", Ty::Uint), ("f_b", Ty::Bool), ("f_m", Ty::Map), ("f_s", Ty::Str), ("f_a", Ty::Addr)]
            [rng.gen_range(0..5)];
        let e = typed(&mut rng, ty, 4, false);
        let cond = rng.gen_bool(0.5).then(|| typed(&mut rng, Ty::Bool, 3, false));
        (f, e, cond)
    })
}

/// A contract whose single transition writes an expression to a field,
/// optionally under a condition. Half the expressions are well-typed by
/// construction; the rest are arbitrary.
fn contract() -> impl Strategy<Value = String> {
    let field = prop::sample::select(&["f_u", "f_b", "f_m", "f_s", "f_a"][..]);
    let untyped = (field, expr(), prop::option::of(expr()));
    prop_oneof![untyped, typed_write()].prop_map(|(f, e, cond)| {
        let send = "send (<to -> sender, amount -> 0, tag -> \"main\">, MT)";
        let body = match cond {
            Some(c) => format!("if {c} then {f} := {e}; {send} else {send}"),
            None => format!("{f} := {e};\n  {send}"),
        };
        format!(
            "contract Fuzz (p : uint, q : address)\n\
             {{\n  f_u : uint = 0;\n  f_b : boolean = false;\n  f_m : address => uint = [];\n  \
             f_s : string = \"\";\n  f_a : address = q;\n}}\n\
             transition T (sender : address, value : uint, tag : string)\n  if tag == \"t\" =>\n  \
             u <- & f_u;\n  m <- & f_m;\n  bb <- & f_b;\n  {body}\n"
        )
    })
}

fn message(sender: &str, val: u64) -> Message {
    Message::new(Uint::from(val), Address::new(sender), Address::new("F"), Tag::new("t").unwrap(), Payload::Text(String::new()))
}

#[test]
fn accepted_contracts_never_go_wrong() {
    let accepted = AtomicUsize::new(0);
    let mut runner = TestRunner::new(Config { cases: 3000, ..Config::default() });
    runner
        .run(&(contract(), any::<u64>()), |(src, seed)| {
            let Ok(def) = parse_contract(&src) else { return Ok(()) };
            if check_contract(&def).has_errors() {
                return Ok(());
            }
            accepted.fetch_add(1, Ordering::Relaxed);
            let params = [("p".to_string(), Value::uint(3)), ("q".to_string(), Value::address("A1"))];
            let inst = instantiate(def, Address::new("F"), Uint::zero(), &params).expect("checked contract instantiates");
            let m = message("A1", 2);
            let gen = StateGenerator::new(&inst, &Alphabet::new(vec![BState::at(1)], vec![m.clone(), message("A2", 0)]));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..4 {
                let pre = gen.sample(&mut rng);
                let res = apply_transition_detailed(&inst, &pre.balance, &pre.fields, &m, &BState::at(1));
                match res {
                    Ok(_) | Err(Failure::Eval(EvalError::MapKeyAbsent { .. })) => {}
                    Err(other) => prop_assert!(false, "{other} in\n{src}"),
                }
            }
            Ok(())
        })
        .unwrap();
    // the generator must produce a fair share of well-formed contracts
    let n = accepted.load(Ordering::Relaxed);
    assert!(n >= 1000, "only {n} of 3000 generated contracts were accepted");
}

proptest! {
    #![proptest_config(Config { cases: 500, ..Config::default() })]

    #[test]
    fn pretty_print_round_trips(src in contract()) {
        if let Ok(def) = parse_contract(&src) {
            let printed = pretty_print(&def);
            let again = parse_contract(&printed);
            prop_assert_eq!(again.as_ref(), Ok(&def), "printed:\n{}", printed);
            prop_assert_eq!(pretty_print(&again.unwrap()), printed);
        }
    }
}
