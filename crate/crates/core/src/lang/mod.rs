//! Core language: values, abstract syntax and the pure evaluator.

pub mod ast;
pub mod eval;
pub mod value;

pub use ast::*;
pub use eval::{eval_expr, Bindings, Env, EvalError};
pub use value::{uint_monus, Address, MapValue, Message, Payload, Tag, Type, Uint, Value};
