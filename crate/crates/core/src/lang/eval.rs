//! Pure expression evaluation.

use thiserror::Error;

use super::ast::{BinOp, Expr, ExprKind, Literal, MapOp, SourceSpan};
use super::value::{uint_monus, MapValue, Type, Uint, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{span}: unbound variable `{name}`")]
    UnboundVariable { name: String, span: SourceSpan },
    #[error("{span}: type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String, span: SourceSpan },
    #[error("{span}: key {key} absent from map")]
    MapKeyAbsent { key: String, span: SourceSpan },
}

/// Read access to variable bindings.
pub trait Bindings {
    fn lookup(&self, name: &str) -> Option<&Value>;
}

/// Flat name-to-value environment. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    vars: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.vars.push((name.into(), value));
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.bind(name, value);
        self
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.vars.truncate(len);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl Bindings for Env {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

impl<B: Bindings + ?Sized> Bindings for &B {
    fn lookup(&self, name: &str) -> Option<&Value> {
        (**self).lookup(name)
    }
}

/// A single `let` binding layered over an outer scope.
struct Scope<'a> {
    outer: &'a dyn Bindings,
    name: &'a str,
    value: Value,
}

impl Bindings for Scope<'_> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        if name == self.name {
            Some(&self.value)
        } else {
            self.outer.lookup(name)
        }
    }
}

pub fn eval_expr(env: &dyn Bindings, e: &Expr) -> Result<Value, EvalError> {
    match &e.kind {
        ExprKind::Lit(lit) => match lit {
            Literal::Uint(u) => Ok(Value::Uint(u.clone())),
            Literal::Bool(b) => Ok(Value::Bool(*b)),
            Literal::Str(s) => Ok(Value::Str(s.clone())),
            Literal::EmptyMap => Ok(Value::Map(MapValue::new())),
            Literal::OkMsg | Literal::NoMsg => Err(EvalError::TypeMismatch {
                expected: "value".into(),
                found: "payload constant".into(),
                span: e.span(),
            }),
        },
        ExprKind::Var(name) => env.lookup(name).cloned().ok_or_else(|| EvalError::UnboundVariable {
            name: name.clone(),
            span: e.span(),
        }),
        ExprKind::Not(x) => Ok(Value::Bool(!as_bool(eval_expr(env, x)?, x)?)),
        ExprKind::Binary(op, l, r) => eval_binary(env, *op, l, r),
        ExprKind::Map(op, args) => eval_map_op(env, *op, args, e.span()),
        ExprKind::Let(name, val, body) => {
            let value = eval_expr(env, val)?;
            let scope = Scope { outer: env, name, value };
            eval_expr(&scope, body)
        }
    }
}

fn eval_binary(env: &dyn Bindings, op: BinOp, l: &Expr, r: &Expr) -> Result<Value, EvalError> {
    match op {
        // short-circuit
        BinOp::And => {
            if !as_bool(eval_expr(env, l)?, l)? {
                return Ok(Value::Bool(false));
            }
            Ok(Value::Bool(as_bool(eval_expr(env, r)?, r)?))
        }
        BinOp::Or => {
            if as_bool(eval_expr(env, l)?, l)? {
                return Ok(Value::Bool(true));
            }
            Ok(Value::Bool(as_bool(eval_expr(env, r)?, r)?))
        }
        BinOp::Add | BinOp::Sub | BinOp::Le | BinOp::Lt => {
            let a = as_uint(eval_expr(env, l)?, l)?;
            let b = as_uint(eval_expr(env, r)?, r)?;
            Ok(match op {
                BinOp::Add => Value::Uint(&a + &b),
                BinOp::Sub => Value::Uint(uint_monus(&a, &b)),
                BinOp::Le => Value::Bool(a <= b),
                _ => Value::Bool(a < b),
            })
        }
        BinOp::Eq => {
            let a = eval_expr(env, l)?;
            let b = eval_expr(env, r)?;
            if a.ty() != b.ty() {
                return Err(mismatch(a.ty(), &b, r));
            }
            Ok(Value::Bool(a == b))
        }
    }
}

fn eval_map_op(env: &dyn Bindings, op: MapOp, args: &[Expr], span: SourceSpan) -> Result<Value, EvalError> {
    if args.len() != op.arity() {
        return Err(EvalError::TypeMismatch {
            expected: format!("{} arguments to {}", op.arity(), op.name()),
            found: format!("{} arguments", args.len()),
            span,
        });
    }
    let map = match eval_expr(env, &args[0])? {
        Value::Map(m) => m,
        other => return Err(mismatch(Type::Map, &other, &args[0])),
    };
    let key = match eval_expr(env, &args[1])? {
        Value::Address(a) => a,
        other => return Err(mismatch(Type::Address, &other, &args[1])),
    };
    match op {
        MapOp::Put => {
            let v = as_uint(eval_expr(env, &args[2])?, &args[2])?;
            Ok(Value::Map(map.put(key, v)))
        }
        MapOp::Get => map.get(&key).cloned().map(Value::Uint).ok_or(EvalError::MapKeyAbsent {
            key: key.to_string(),
            span,
        }),
        MapOp::Remove => Ok(Value::Map(map.remove(&key))),
        MapOp::Contains => Ok(Value::Bool(map.contains(&key))),
    }
}

fn mismatch(expected: Type, found: &Value, at: &Expr) -> EvalError {
    EvalError::TypeMismatch {
        expected: expected.to_string(),
        found: found.ty().to_string(),
        span: at.span(),
    }
}

fn as_bool(v: Value, at: &Expr) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(mismatch(Type::Bool, &other, at)),
    }
}

fn as_uint(v: Value, at: &Expr) -> Result<Uint, EvalError> {
    match v {
        Value::Uint(u) => Ok(u),
        other => Err(mismatch(Type::Uint, &other, at)),
    }
}
