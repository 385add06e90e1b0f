//! Abstract syntax of contracts.
//!
//! Commands are right-nested: every effectful command carries the rest of the
//! block, and a block ends in `send`, `return`, an `if` whose branches are
//! blocks, or [`Cmd::End`] when it falls off the end (rejected by the
//! tail-position check).

use std::fmt;
use std::hash::{Hash, Hasher};

use super::value::{Type, Uint};

/// 1-based source position with a token length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line, column, length }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Position attached to an AST node.
///
/// Positions are metadata: two nodes that differ only in where they were
/// parsed from compare equal, so a pretty-printed contract re-parses to an
/// equal AST.
#[derive(Clone, Copy, Debug, Default)]
pub struct NodeSpan(pub SourceSpan);

impl PartialEq for NodeSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for NodeSpan {}

impl Hash for NodeSpan {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl From<SourceSpan> for NodeSpan {
    fn from(s: SourceSpan) -> Self {
        NodeSpan(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Uint(Uint),
    Bool(bool),
    Str(String),
    /// `[]`
    EmptyMap,
    /// `ok_msg` payload constant; only meaningful as a message body.
    OkMsg,
    /// `no_msg` payload constant; only meaningful as a message body.
    NoMsg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Eq,
    Le,
    Lt,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Eq => "==",
            BinOp::Le => "<=",
            BinOp::Lt => "<",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// Built-in map operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapOp {
    /// `put(m, k, v)`
    Put,
    /// `get(m, k)`
    Get,
    /// `remove(m, k)`
    Remove,
    /// `contains(m, k)`
    Contains,
}

impl MapOp {
    pub fn name(self) -> &'static str {
        match self {
            MapOp::Put => "put",
            MapOp::Get => "get",
            MapOp::Remove => "remove",
            MapOp::Contains => "contains",
        }
    }

    pub fn from_name(name: &str) -> Option<MapOp> {
        Some(match name {
            "put" => MapOp::Put,
            "get" => MapOp::Get,
            "remove" => MapOp::Remove,
            "contains" => MapOp::Contains,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            MapOp::Put => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: NodeSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Lit(Literal),
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Map(MapOp, Vec<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: impl Into<NodeSpan>) -> Self {
        Expr { kind, span: span.into() }
    }

    pub fn span(&self) -> SourceSpan {
        self.span.0
    }

    /// Calls `f` on every variable reference not bound by an enclosing `let`
    /// inside this expression.
    pub fn free_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str, SourceSpan)) {
        fn go<'a>(e: &'a Expr, bound: &mut Vec<&'a str>, f: &mut dyn FnMut(&'a str, SourceSpan)) {
            match &e.kind {
                ExprKind::Lit(_) => {}
                ExprKind::Var(v) => {
                    if !bound.contains(&v.as_str()) {
                        f(v, e.span())
                    }
                }
                ExprKind::Binary(_, l, r) => {
                    go(l, bound, f);
                    go(r, bound, f);
                }
                ExprKind::Not(x) => go(x, bound, f),
                ExprKind::Map(_, args) => args.iter().for_each(|a| go(a, bound, f)),
                ExprKind::Let(v, val, body) => {
                    go(val, bound, f);
                    bound.push(v);
                    go(body, bound, f);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }
}

/// Message literal `<to -> e, amount -> e, tag -> e, msg -> e>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsgLit {
    pub to: Expr,
    pub amount: Expr,
    pub tag: Expr,
    /// Optional body; an absent body sends `Text("")`.
    pub body: Option<Expr>,
}

/// Continuation argument of `send`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContRef {
    /// `MT`: nothing to resume.
    Empty,
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cmd {
    /// `var <- & field; rest`
    FieldRead { var: String, field: String, rest: Box<Cmd>, span: NodeSpan },
    /// `var <- && aspect; rest`
    ChainRead { var: String, aspect: String, rest: Box<Cmd>, span: NodeSpan },
    /// `field := value; rest`
    FieldWrite { field: String, value: Expr, rest: Box<Cmd>, span: NodeSpan },
    /// `let var = value in rest`
    Let { var: String, value: Expr, rest: Box<Cmd>, span: NodeSpan },
    If { cond: Expr, then_branch: Box<Cmd>, else_branch: Box<Cmd>, span: NodeSpan },
    Send { msg: MsgLit, cont: ContRef, span: NodeSpan },
    Return { value: Expr, span: NodeSpan },
    /// Block ended without `send` or `return`.
    End,
}

impl Cmd {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            Cmd::FieldRead { span, .. }
            | Cmd::ChainRead { span, .. }
            | Cmd::FieldWrite { span, .. }
            | Cmd::Let { span, .. }
            | Cmd::If { span, .. }
            | Cmd::Send { span, .. }
            | Cmd::Return { span, .. } => Some(span.0),
            Cmd::End => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub span: NodeSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDef {
    pub name: String,
    pub ty: Type,
    pub init: Expr,
    pub span: NodeSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDef {
    pub tag: String,
    pub params: Vec<Param>,
    pub filter: Option<Expr>,
    pub body: Cmd,
    pub span: NodeSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuationDef {
    pub name: String,
    pub param: Param,
    pub body: Cmd,
    pub span: NodeSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub params: Vec<Param>,
    pub fields: Vec<FieldDef>,
    pub transitions: Vec<TransitionDef>,
    pub continuations: Vec<ContinuationDef>,
    pub span: NodeSpan,
}

impl ContractDef {
    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn continuation(&self, name: &str) -> Option<&ContinuationDef> {
        self.continuations.iter().find(|c| c.name == name)
    }
}

/// Name of the implicit, read-only balance field.
pub const BALANCE_FIELD: &str = "balance";

/// Blockchain aspects readable with `x <- && aspect;`.
pub const CHAIN_ASPECTS: &[&str] = &["block_number"];

/// Message components a transition may declare as parameters, with their
/// required types. `msg` binds a text body as `string` or an amount body as
/// `uint`.
pub fn message_component_type(name: &str) -> Option<&'static [Type]> {
    match name {
        "sender" | "to" => Some(&[Type::Address]),
        "value" | "amount" => Some(&[Type::Uint]),
        "tag" => Some(&[Type::Str]),
        "msg" => Some(&[Type::Str, Type::Uint]),
        _ => None,
    }
}
