//! JSON encoding of runtime data: values, messages, states, schedules and traces.
//!
//! Every value is tagged, `{"t": "uint", "v": 5}`; maps are arrays of
//! `[address, amount]` pairs in iteration order. Uints that do not fit in 64
//! bits are written as decimal strings. Object keys keep insertion order, so
//! output is byte-for-byte reproducible.

use std::sync::Arc;

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use super::{BState, CState, FieldStore, ScheduleElem, Step};
use crate::lang::{Address, ContractDef, MapValue, Message, Payload, Tag, Type, Uint, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

pub(crate) fn invalid(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError::Invalid { path: path.to_string(), message: message.into() }
}

/// Parses JSON text, reporting syntax errors with their position.
pub fn parse_json(text: &str) -> Result<Json, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("in-memory JSON always serializes");
    s.push('\n');
    s
}

pub(crate) fn field<'a>(obj: &'a Json, key: &str, path: &str) -> Result<&'a Json, SchemaError> {
    obj.as_object()
        .ok_or_else(|| invalid(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| invalid(path, format!("missing key `{key}`")))
}

fn string<'a>(v: &'a Json, path: &str) -> Result<&'a str, SchemaError> {
    v.as_str().ok_or_else(|| invalid(path, "expected a string"))
}

pub(crate) fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>, SchemaError> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

pub fn uint_to_json(u: &Uint) -> Json {
    match u.to_u64() {
        Some(n) => Json::from(n),
        None => Json::String(u.to_string()),
    }
}

pub fn uint_from_json(v: &Json, path: &str) -> Result<Uint, SchemaError> {
    if let Some(n) = v.as_u64() {
        return Ok(n.into());
    }
    v.as_str()
        .and_then(Uint::parse_decimal)
        .ok_or_else(|| invalid(path, "expected a non-negative integer"))
}

pub fn address_from_json(v: &Json, path: &str) -> Result<Address, SchemaError> {
    let s = string(v, path)?;
    if s.is_empty() {
        return Err(invalid(path, "empty address"));
    }
    Ok(Address::new(s))
}

fn map_to_json(m: &MapValue) -> Json {
    Json::Array(m.entries().iter().map(|(k, v)| json!([k.as_str(), uint_to_json(v)])).collect())
}

fn map_from_json(v: &Json, path: &str) -> Result<MapValue, SchemaError> {
    let mut entries: Vec<(Address, Uint)> = Vec::new();
    for (i, pair) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let pair = array(pair, &p)?;
        if pair.len() != 2 {
            return Err(invalid(&p, "expected an [address, amount] pair"));
        }
        let k = address_from_json(&pair[0], &p)?;
        if entries.iter().any(|(e, _)| *e == k) {
            return Err(invalid(&p, format!("duplicate key {k}")));
        }
        entries.push((k, uint_from_json(&pair[1], &p)?));
    }
    Ok(MapValue::from_entries(entries))
}

pub fn value_to_json(v: &Value) -> Json {
    let (t, inner) = match v {
        Value::Uint(u) => ("uint", uint_to_json(u)),
        Value::Bool(b) => ("bool", Json::Bool(*b)),
        Value::Address(a) => ("address", Json::String(a.to_string())),
        Value::Str(s) => ("string", Json::String(s.clone())),
        Value::Map(m) => ("map", map_to_json(m)),
    };
    json!({"t": t, "v": inner})
}

pub fn value_from_json(v: &Json, path: &str) -> Result<Value, SchemaError> {
    let t = string(field(v, "t", path)?, &format!("{path}.t"))?;
    let inner = field(v, "v", path)?;
    let p = format!("{path}.v");
    Ok(match t {
        "uint" => Value::Uint(uint_from_json(inner, &p)?),
        "bool" => Value::Bool(inner.as_bool().ok_or_else(|| invalid(&p, "expected a boolean"))?),
        "address" => Value::Address(address_from_json(inner, &p)?),
        "string" => Value::Str(string(inner, &p)?.to_string()),
        "map" => Value::Map(map_from_json(inner, &p)?),
        other => return Err(invalid(&format!("{path}.t"), format!("unknown value type `{other}`"))),
    })
}

/// Reads a value of a known type, accepting either the tagged form or a
/// plain JSON literal (`"A0"`, `10`, `true`, `[["A1", 5]]`).
pub fn typed_value_from_json(v: &Json, ty: Type, path: &str) -> Result<Value, SchemaError> {
    if v.get("t").is_some() {
        let val = value_from_json(v, path)?;
        if val.ty() != ty {
            return Err(invalid(path, format!("expected {ty}, found {}", val.ty())));
        }
        return Ok(val);
    }
    Ok(match ty {
        Type::Uint => Value::Uint(uint_from_json(v, path)?),
        Type::Bool => Value::Bool(v.as_bool().ok_or_else(|| invalid(path, "expected a boolean"))?),
        Type::Address => Value::Address(address_from_json(v, path)?),
        Type::Str => Value::Str(string(v, path)?.to_string()),
        Type::Map => Value::Map(map_from_json(v, path)?),
    })
}

/// Contract parameters from a JSON object. Declared parameters are typed by
/// their declaration; undeclared ones are passed through with a guessed type
/// so that instantiation can report them.
pub fn params_from_json(def: &ContractDef, v: &Json) -> Result<Vec<(String, Value)>, SchemaError> {
    let obj = v.as_object().ok_or_else(|| invalid("params", "expected an object"))?;
    let mut out = Vec::new();
    for (k, raw) in obj {
        let path = format!("params.{k}");
        let value = match def.param(k) {
            Some(p) => typed_value_from_json(raw, p.ty, &path)?,
            None if raw.get("t").is_some() => value_from_json(raw, &path)?,
            None => match raw {
                Json::Bool(b) => Value::Bool(*b),
                Json::String(s) => Value::Str(s.clone()),
                Json::Number(_) => Value::Uint(uint_from_json(raw, &path)?),
                _ => return Err(invalid(&path, "unsupported parameter value")),
            },
        };
        out.push((k.clone(), value));
    }
    Ok(out)
}

pub fn payload_to_json(p: &Payload) -> Json {
    match p {
        Payload::OkMsg => json!({"kind": "ok_msg"}),
        Payload::NoMsg => json!({"kind": "no_msg"}),
        Payload::Text(s) => json!({"kind": "text", "value": s}),
        Payload::Amount(u) => json!({"kind": "amount", "value": uint_to_json(u)}),
    }
}

pub fn payload_from_json(v: &Json, path: &str) -> Result<Payload, SchemaError> {
    let kind = string(field(v, "kind", path)?, &format!("{path}.kind"))?;
    let p = format!("{path}.value");
    Ok(match kind {
        "ok_msg" => Payload::OkMsg,
        "no_msg" => Payload::NoMsg,
        "text" => Payload::Text(string(field(v, "value", path)?, &p)?.to_string()),
        "amount" => Payload::Amount(uint_from_json(field(v, "value", path)?, &p)?),
        other => return Err(invalid(&format!("{path}.kind"), format!("unknown payload kind `{other}`"))),
    })
}

pub fn message_to_json(m: &Message) -> Json {
    json!({
        "val": uint_to_json(&m.val),
        "sender": m.sender.as_str(),
        "to": m.to.as_str(),
        "tag": m.method.as_str(),
        "body": payload_to_json(&m.body),
    })
}

pub fn message_from_json(v: &Json, path: &str) -> Result<Message, SchemaError> {
    let val = uint_from_json(field(v, "val", path)?, &format!("{path}.val"))?;
    let sender = address_from_json(field(v, "sender", path)?, &format!("{path}.sender"))?;
    let to = address_from_json(field(v, "to", path)?, &format!("{path}.to"))?;
    let tag_path = format!("{path}.tag");
    let method = Tag::new(string(field(v, "tag", path)?, &tag_path)?).ok_or_else(|| invalid(&tag_path, "empty tag"))?;
    let body = match v.get("body") {
        Some(b) => payload_from_json(b, &format!("{path}.body"))?,
        None => Payload::Text(String::new()),
    };
    Ok(Message::new(val, sender, to, method, body))
}

pub fn bstate_to_json(b: &BState) -> Json {
    json!({"block_num": uint_to_json(&b.block_num)})
}

pub fn bstate_from_json(v: &Json, path: &str) -> Result<BState, SchemaError> {
    Ok(BState { block_num: uint_from_json(field(v, "block_num", path)?, &format!("{path}.block_num"))? })
}

pub fn elem_to_json(e: &ScheduleElem) -> Json {
    json!({"block_num": uint_to_json(&e.bc.block_num), "msg": message_to_json(&e.msg)})
}

pub fn elem_from_json(v: &Json, path: &str) -> Result<ScheduleElem, SchemaError> {
    Ok(ScheduleElem::new(bstate_from_json(v, path)?, message_from_json(field(v, "msg", path)?, &format!("{path}.msg"))?))
}

pub fn schedule_to_json(sc: &[ScheduleElem]) -> Json {
    Json::Array(sc.iter().map(elem_to_json).collect())
}

/// A schedule, optionally with the state it starts from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleFile {
    pub start: Option<CState>,
    pub schedule: Vec<ScheduleElem>,
}

/// Accepts a bare array of elements or `{"start"?: cstate, "schedule": [...]}`
/// (the shape of witness files).
pub fn schedule_from_json(v: &Json) -> Result<ScheduleFile, SchemaError> {
    let (start, items) = match v {
        Json::Array(items) => (None, items),
        Json::Object(obj) => {
            let start = match obj.get("start") {
                Some(Json::Null) | None => None,
                Some(s) => Some(cstate_from_json(s, "start")?),
            };
            (start, array(field(v, "schedule", "$")?, "schedule")?)
        }
        _ => return Err(invalid("$", "expected an array of schedule elements")),
    };
    let schedule = items
        .iter()
        .enumerate()
        .map(|(i, e)| elem_from_json(e, &format!("schedule[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(ScheduleFile { start, schedule })
}

pub fn cstate_to_json(s: &CState) -> Json {
    let mut fields = Map::new();
    for (k, v) in s.fields.iter() {
        fields.insert(k.to_string(), value_to_json(v));
    }
    json!({"my_id": s.my_id.as_str(), "balance": uint_to_json(&s.balance), "fields": fields})
}

pub fn cstate_from_json(v: &Json, path: &str) -> Result<CState, SchemaError> {
    let my_id = address_from_json(field(v, "my_id", path)?, &format!("{path}.my_id"))?;
    let balance = uint_from_json(field(v, "balance", path)?, &format!("{path}.balance"))?;
    let fpath = format!("{path}.fields");
    let obj = field(v, "fields", path)?.as_object().ok_or_else(|| invalid(&fpath, "expected an object"))?;
    let mut fields = Vec::with_capacity(obj.len());
    for (k, raw) in obj {
        fields.push((Arc::from(k.as_str()), value_from_json(raw, &format!("{fpath}.{k}"))?));
    }
    Ok(CState { my_id, balance, fields: FieldStore::new(fields) })
}

pub fn step_to_json(s: &Step) -> Json {
    json!({
        "pre": cstate_to_json(&s.pre),
        "post": cstate_to_json(&s.post),
        "out": s.out.as_ref().map(message_to_json),
    })
}

pub fn step_from_json(v: &Json, path: &str) -> Result<Step, SchemaError> {
    let out = match field(v, "out", path)? {
        Json::Null => None,
        m => Some(message_from_json(m, &format!("{path}.out"))?),
    };
    Ok(Step {
        pre: cstate_from_json(field(v, "pre", path)?, &format!("{path}.pre"))?,
        post: cstate_from_json(field(v, "post", path)?, &format!("{path}.post"))?,
        out,
    })
}

pub fn trace_to_json(t: &[Step]) -> Json {
    Json::Array(t.iter().map(step_to_json).collect())
}

pub fn trace_from_json(v: &Json) -> Result<Vec<Step>, SchemaError> {
    array(v, "$")?
        .iter()
        .enumerate()
        .map(|(i, s)| step_from_json(s, &format!("[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::runtime::execute0;
    use proptest::prelude::*;

    #[test]
    fn value_shapes() {
        assert_eq!(value_to_json(&Value::uint(5)), json!({"t": "uint", "v": 5}));
        let big = &Uint::from(u64::MAX) + &Uint::from(1);
        assert_eq!(value_to_json(&Value::Uint(big.clone())), json!({"t": "uint", "v": "18446744073709551616"}));
        assert_eq!(value_from_json(&json!({"t": "uint", "v": "18446744073709551616"}), "$").unwrap(), Value::Uint(big));
        let m = MapValue::new().put(Address::new("A1"), 5.into()).put(Address::new("A2"), 7.into());
        assert_eq!(value_to_json(&Value::Map(m)), json!({"t": "map", "v": [["A2", 7], ["A1", 5]]}));
    }

    #[test]
    fn cstate_keeps_field_order() {
        let inst = corpus::crowdfunding_instance();
        let text = serde_json::to_string(&cstate_to_json(&inst.state0)).unwrap();
        assert_eq!(
            text,
            r#"{"my_id":"C","balance":0,"fields":{"backers":{"t":"map","v":[]},"funded":{"t":"bool","v":false}}}"#
        );
    }

    #[test]
    fn schedule_file_forms() {
        let bare = json!([{"block_num": 1, "msg": {"val": 5, "sender": "A1", "to": "C", "tag": "donate",
                            "body": {"kind": "text", "value": ""}}}]);
        let f = schedule_from_json(&bare).unwrap();
        assert_eq!(f.start, None);
        assert_eq!(f.schedule.len(), 1);
        assert_eq!(schedule_to_json(&f.schedule), bare);
        let wrapped = json!({"schedule": bare});
        assert_eq!(schedule_from_json(&wrapped).unwrap(), f);
    }

    #[test]
    fn schema_errors_name_the_path() {
        let bad = json!([{"block_num": 1, "msg": {"val": -1, "sender": "A1", "to": "C", "tag": "x"}}]);
        let err = schedule_from_json(&bad).unwrap_err();
        assert_eq!(err.to_string(), "schedule[0].msg.val: expected a non-negative integer");
        match parse_json("[1, 2") {
            Err(SchemaError::Syntax { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(payload_from_json(&json!({"kind": "shout"}), "b").is_err());
    }

    #[test]
    fn params_are_typed_by_declaration() {
        let def = corpus::crowdfunding();
        let ps = params_from_json(&def, &parse_json(corpus::CROWDFUNDING_PARAMS).unwrap()).unwrap();
        assert_eq!(ps, corpus::crowdfunding_params());
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        prop_oneof![
            any::<u64>().prop_map(Value::uint),
            any::<bool>().prop_map(Value::Bool),
            "[A-Z][0-9]".prop_map(|s| Value::address(&s)),
            ".*".prop_map(Value::Str),
            prop::collection::vec(("[A-C]", any::<u64>()), 0..4).prop_map(|es| {
                Value::Map(MapValue::from_entries(es.into_iter().map(|(k, v)| (Address::new(&k), Uint::from(v)))))
            }),
        ]
    }

    proptest! {
        #[test]
        fn value_round_trip(v in arb_value()) {
            prop_assert_eq!(value_from_json(&value_to_json(&v), "$").unwrap(), v);
        }

        #[test]
        fn trace_round_trip(vals in prop::collection::vec((0u64..20, 0usize..3, 0usize..3), 0..6)) {
            let inst = corpus::crowdfunding_instance();
            let sc: Vec<ScheduleElem> = vals.iter().map(|&(v, s, t)| {
                let m = Message::new(v.into(), Address::new(["A0", "A1", "A2"][s]), Address::new("C"),
                    Tag::new(["donate", "claim", "getfunds"][t]).unwrap(), Payload::Text(String::new()));
                ScheduleElem::new(BState::at(v), m)
            }).collect();
            let trace = execute0(&inst, &sc);
            let text = to_pretty(&trace_to_json(&trace));
            prop_assert_eq!(trace_from_json(&parse_json(&text).unwrap()).unwrap(), trace);
            prop_assert_eq!(schedule_from_json(&schedule_to_json(&sc)).unwrap().schedule, sc);
        }
    }
}
