//! JSON forms of alphabets, witnesses and verdicts.
//!
//! A witness is written in the schedule-file shape (`start` plus
//! `schedule`), so it can be replayed directly.

use serde_json::{json, Value as Json};

use super::{Alphabet, Verdict, Witness};
use crate::runtime::json::{
    array, bstate_from_json, bstate_to_json, cstate_to_json, field, message_from_json, message_to_json,
    schedule_to_json, trace_to_json, SchemaError,
};

/// `{"bstates": [{"block_num": n}, ...], "messages": [...]}`
pub fn alphabet_to_json(a: &Alphabet) -> Json {
    json!({
        "bstates": a.bstates.iter().map(bstate_to_json).collect::<Vec<_>>(),
        "messages": a.messages.iter().map(message_to_json).collect::<Vec<_>>(),
    })
}

pub fn alphabet_from_json(v: &Json) -> Result<Alphabet, SchemaError> {
    let bstates = array(field(v, "bstates", "$")?, "bstates")?
        .iter()
        .enumerate()
        .map(|(i, b)| bstate_from_json(b, &format!("bstates[{i}]")))
        .collect::<Result<_, _>>()?;
    let messages = array(field(v, "messages", "$")?, "messages")?
        .iter()
        .enumerate()
        .map(|(i, m)| message_from_json(m, &format!("messages[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(Alphabet::new(bstates, messages))
}

pub fn witness_to_json(w: &Witness) -> Json {
    json!({
        "start": cstate_to_json(&w.start),
        "schedule": schedule_to_json(&w.schedule),
        "failing_index": w.failing_index,
        "continuation_from": w.continuation_from,
        "detail": w.detail,
        "bound": w.bound,
        "trace": trace_to_json(&w.trace),
    })
}

pub fn verdict_to_json(v: &Verdict) -> Json {
    match v {
        Verdict::Holds { schedules_checked, steps_executed, premise_states, bound } => json!({
            "verdict": "holds",
            "schedules_checked": schedules_checked,
            "steps_executed": steps_executed,
            "premise_states": premise_states,
            "bound": bound,
        }),
        Verdict::Violated(w) => json!({"verdict": "violated", "witness": witness_to_json(w)}),
        Verdict::Inconclusive { reason } => json!({"verdict": "inconclusive", "reason": reason}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Address;
    use crate::runtime::json::{parse_json, schedule_from_json};

    #[test]
    fn shipped_alphabet_file_is_astar() {
        let text = include_str!("../../../../corpus/astar.json");
        let a = alphabet_from_json(&parse_json(text).unwrap()).unwrap();
        assert_eq!(a, Alphabet::astar(&Address::new("C")));
        assert_eq!(alphabet_from_json(&alphabet_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn witness_replays_as_schedule_file() {
        let inst = crate::corpus::claim_mutant_instance();
        let pred = super::super::Predicate::compile(
            "!funded -> sum_values(backers) <= balance",
            super::super::PredKind::State,
            &inst,
        )
        .unwrap();
        let a = Alphabet::astar(inst.id());
        let v = super::super::check_safe(&inst, &pred, &a, 2).unwrap();
        let j = verdict_to_json(&v);
        assert_eq!(j["verdict"], "violated");
        let file = schedule_from_json(&j["witness"]).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(file.start.as_ref(), Some(&w.start));
        assert_eq!(file.schedule, w.schedule);
    }

    #[test]
    fn malformed_alphabet_reports_path() {
        let bad = parse_json(r#"{"bstates": [{"block_num": -1}], "messages": []}"#).unwrap();
        match alphabet_from_json(&bad) {
            Err(SchemaError::Invalid { path, .. }) => assert_eq!(path, "bstates[0].block_num"),
            other => panic!("{other:?}"),
        }
    }
}
