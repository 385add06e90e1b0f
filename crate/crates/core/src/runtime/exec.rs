//! Transition dispatch and command execution.

use std::fmt;

use super::{BState, ContractInstance, FieldStore, RETURN_TAG};
use crate::lang::{
    eval_expr, Bindings, Cmd, ContRef, Env, EvalError, Expr, ExprKind, Literal, Message, MsgLit, Payload, Tag,
    TransitionDef, Type, Uint, Value, BALANCE_FIELD,
};

/// How a successful transition or continuation ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    /// Outgoing message, plus the continuation awaiting its result (`None` for `MT`).
    Send { msg: Message, cont: Option<String> },
    Return(Value),
}

/// Why a step ended in an exception.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    NoTransition,
    Ambiguous(Vec<String>),
    Eval(EvalError),
    /// A path ended without `send` or `return`.
    FellThrough,
    BadMessage(String),
    BadReturn(Type),
    UnknownField(String),
    UnknownAspect(String),
    UnknownContinuation(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NoTransition => f.write_str("no transition accepts the message"),
            Failure::Ambiguous(tags) => write!(f, "message accepted by several transitions: {}", tags.join(", ")),
            Failure::Eval(e) => write!(f, "{e}"),
            Failure::FellThrough => f.write_str("body ended without send or return"),
            Failure::BadMessage(why) => write!(f, "malformed outgoing message: {why}"),
            Failure::BadReturn(t) => write!(f, "cannot return a value of type {t}"),
            Failure::UnknownField(n) => write!(f, "no field `{n}`"),
            Failure::UnknownAspect(n) => write!(f, "no blockchain aspect `{n}`"),
            Failure::UnknownContinuation(n) => write!(f, "no continuation `{n}`"),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::Eval(e)
    }
}

/// Local bindings layered over the contract parameters.
struct Frame<'a> {
    params: &'a Env,
    locals: Env,
}

impl Bindings for Frame<'_> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.locals.lookup(name).or_else(|| self.params.lookup(name))
    }
}

fn component(name: &str, ty: Type, m: &Message) -> Option<Value> {
    let v = match name {
        "sender" => Value::Address(m.sender.clone()),
        "to" => Value::Address(m.to.clone()),
        "value" | "amount" => Value::Uint(m.val.clone()),
        "tag" => Value::Str(m.method.as_str().to_string()),
        "msg" => match &m.body {
            Payload::Text(s) => Value::Str(s.clone()),
            Payload::Amount(u) => Value::Uint(u.clone()),
            Payload::OkMsg | Payload::NoMsg => return None,
        },
        _ => return None,
    };
    (v.ty() == ty).then_some(v)
}

fn bind_params(t: &TransitionDef, m: &Message) -> Option<Env> {
    let mut env = Env::new();
    for p in &t.params {
        env.bind(p.name.clone(), component(&p.name, p.ty, m)?);
    }
    Some(env)
}

/// Picks the transition that accepts `m`: the one whose filter evaluates to
/// true, or, for transitions without a filter, whose name equals the method
/// tag. Exactly one transition must accept.
fn select<'c>(inst: &'c ContractInstance, m: &Message) -> Result<(&'c TransitionDef, Env), Failure> {
    let mut chosen: Option<(&TransitionDef, Env)> = None;
    let mut extra = Vec::new();
    for t in &inst.def.transitions {
        let Some(locals) = bind_params(t, m) else { continue };
        let (accepts, locals) = match &t.filter {
            Some(filter) => {
                let frame = Frame { params: &inst.params, locals };
                let ok = matches!(eval_expr(&frame, filter)?, Value::Bool(true));
                (ok, frame.locals)
            }
            None => (t.tag == m.method.as_str(), locals),
        };
        if !accepts {
            continue;
        }
        if chosen.is_none() {
            chosen = Some((t, locals));
        } else {
            extra.push(t.tag.clone());
        }
    }
    match chosen {
        None => Err(Failure::NoTransition),
        Some((t, _)) if !extra.is_empty() => {
            let mut tags = vec![t.tag.clone()];
            tags.extend(extra);
            Err(Failure::Ambiguous(tags))
        }
        Some(c) => Ok(c),
    }
}

/// Runs the transition accepting `m`. On success returns the new field store
/// and the effect the body ended with.
pub fn apply_transition_detailed(
    inst: &ContractInstance,
    bal: &Uint,
    fields: &FieldStore,
    m: &Message,
    bc: &BState,
) -> Result<(FieldStore, Effect), Failure> {
    let (t, locals) = select(inst, m)?;
    let mut frame = Frame { params: &inst.params, locals };
    let mut store = fields.clone();
    let effect = run(inst, bal, &mut store, bc, &mut frame, &t.body)?;
    Ok((store, effect))
}

/// Protocol-mode transition function: failures collapse to `(fields, None)`
/// and `return v` becomes a message carrying `v` back to the sender.
pub fn apply_transition(
    inst: &ContractInstance,
    bal: &Uint,
    fields: &FieldStore,
    m: &Message,
    bc: &BState,
) -> (FieldStore, Option<Message>) {
    match apply_transition_detailed(inst, bal, fields, m, bc) {
        Ok((store, Effect::Send { msg, .. })) => (store, Some(msg)),
        Ok((store, Effect::Return(v))) => match return_message(inst, &m.sender, v) {
            Ok(msg) => (store, Some(msg)),
            Err(_) => (fields.clone(), None),
        },
        Err(_) => (fields.clone(), None),
    }
}

/// The message carrying a returned value to `to`.
pub(crate) fn return_message(inst: &ContractInstance, to: &crate::lang::Address, v: Value) -> Result<Message, Failure> {
    let body = match v {
        Value::Uint(u) => Payload::Amount(u),
        Value::Str(s) => Payload::Text(s),
        other => return Err(Failure::BadReturn(other.ty())),
    };
    Ok(Message::new(Uint::zero(), inst.id().clone(), to.clone(), Tag::new(RETURN_TAG).unwrap(), body))
}

/// Invokes continuation `name` with the value returned by a callee.
pub(crate) fn run_continuation(
    inst: &ContractInstance,
    bal: &Uint,
    fields: &FieldStore,
    bc: &BState,
    name: &str,
    arg: Value,
) -> Result<(FieldStore, Effect), Failure> {
    let k = inst.def.continuation(name).ok_or_else(|| Failure::UnknownContinuation(name.to_string()))?;
    if arg.ty() != k.param.ty {
        return Err(Failure::Eval(EvalError::TypeMismatch {
            expected: k.param.ty.to_string(),
            found: arg.ty().to_string(),
            span: k.param.span.0,
        }));
    }
    let mut frame = Frame { params: &inst.params, locals: Env::new().with(k.param.name.clone(), arg) };
    let mut store = fields.clone();
    let effect = run(inst, bal, &mut store, bc, &mut frame, &k.body)?;
    Ok((store, effect))
}

fn run(
    inst: &ContractInstance,
    bal: &Uint,
    store: &mut FieldStore,
    bc: &BState,
    frame: &mut Frame<'_>,
    mut cmd: &Cmd,
) -> Result<Effect, Failure> {
    loop {
        match cmd {
            Cmd::FieldRead { var, field, rest, .. } => {
                let v = if field == BALANCE_FIELD {
                    Value::Uint(bal.clone())
                } else {
                    store.get(field).cloned().ok_or_else(|| Failure::UnknownField(field.clone()))?
                };
                frame.locals.bind(var.clone(), v);
                cmd = rest;
            }
            Cmd::ChainRead { var, aspect, rest, .. } => {
                let v = match aspect.as_str() {
                    "block_number" => Value::Uint(bc.block_num.clone()),
                    _ => return Err(Failure::UnknownAspect(aspect.clone())),
                };
                frame.locals.bind(var.clone(), v);
                cmd = rest;
            }
            Cmd::FieldWrite { field, value, rest, .. } => {
                let v = eval_expr(frame, value)?;
                if !store.set(field, v) {
                    return Err(Failure::UnknownField(field.clone()));
                }
                cmd = rest;
            }
            Cmd::Let { var, value, rest, .. } => {
                let v = eval_expr(frame, value)?;
                frame.locals.bind(var.clone(), v);
                cmd = rest;
            }
            Cmd::If { cond, then_branch, else_branch, .. } => {
                cmd = match eval_expr(frame, cond)? {
                    Value::Bool(true) => then_branch,
                    Value::Bool(false) => else_branch,
                    other => {
                        return Err(Failure::Eval(EvalError::TypeMismatch {
                            expected: "boolean".into(),
                            found: other.ty().to_string(),
                            span: cond.span(),
                        }))
                    }
                };
            }
            Cmd::Send { msg, cont, .. } => {
                let msg = build_message(inst, frame, msg)?;
                let cont = match cont {
                    ContRef::Empty => None,
                    ContRef::Named(k) => {
                        if inst.def.continuation(k).is_none() {
                            return Err(Failure::UnknownContinuation(k.clone()));
                        }
                        Some(k.clone())
                    }
                };
                return Ok(Effect::Send { msg, cont });
            }
            Cmd::Return { value, .. } => return Ok(Effect::Return(eval_expr(frame, value)?)),
            Cmd::End => return Err(Failure::FellThrough),
        }
    }
}

fn build_message(inst: &ContractInstance, frame: &Frame<'_>, lit: &MsgLit) -> Result<Message, Failure> {
    let to = match eval_expr(frame, &lit.to)? {
        Value::Address(a) => a,
        other => return Err(Failure::BadMessage(format!("`to` is {}", other.ty()))),
    };
    let val = match eval_expr(frame, &lit.amount)? {
        Value::Uint(u) => u,
        other => return Err(Failure::BadMessage(format!("`amount` is {}", other.ty()))),
    };
    let method = match eval_expr(frame, &lit.tag)? {
        Value::Str(s) => Tag::new(&s).ok_or_else(|| Failure::BadMessage("empty tag".into()))?,
        other => return Err(Failure::BadMessage(format!("`tag` is {}", other.ty()))),
    };
    let body = match &lit.body {
        None => Payload::Text(String::new()),
        Some(e) => payload(frame, e)?,
    };
    Ok(Message::new(val, inst.id().clone(), to, method, body))
}

fn payload(frame: &Frame<'_>, e: &Expr) -> Result<Payload, Failure> {
    match &e.kind {
        ExprKind::Lit(Literal::OkMsg) => Ok(Payload::OkMsg),
        ExprKind::Lit(Literal::NoMsg) => Ok(Payload::NoMsg),
        _ => match eval_expr(frame, e)? {
            Value::Str(s) => Ok(Payload::Text(s)),
            Value::Uint(u) => Ok(Payload::Amount(u)),
            other => Err(Failure::BadMessage(format!("body is {}", other.ty()))),
        },
    }
}
