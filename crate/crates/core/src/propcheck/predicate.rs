//! Predicate language for properties.
//!
//! ```text
//! pred    := or ("->" pred)?                 implication, right-associative
//! or      := and ("||" and)*
//! and     := unary ("&&" unary)*
//! unary   := "!" unary | cmp
//! cmp     := sum (("==" | "!=" | "<=" | "<" | ">=" | ">") sum)?
//! sum     := atom (("+" | "-") atom)*
//! atom    := INT | STRING | "true" | "false" | "(" pred ")"
//!          | IDENT "(" args ")" | IDENT ("." IDENT)?
//! ```
//!
//! Identifiers resolve against the contract: `balance`, field names and
//! contract parameters. Over a pair of states, `pre.x` and `post.x` pick a
//! side and a bare name means `post`. Over a schedule element the names are
//! `block_num`, `msg.val`, `msg.sender`, `msg.to` and `msg.tag`. String
//! literals double as addresses. Subtraction truncates at zero.

use std::borrow::Cow;
use std::fmt;

use super::PropError;
use crate::lang::{MapValue, Type, Uint, Value, BALANCE_FIELD};
use crate::runtime::{CState, ContractInstance, ScheduleElem};

/// What a predicate is evaluated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredKind {
    /// One contract state.
    State,
    /// A pair of states, `pre` and `post`.
    Step,
    /// One schedule element.
    Elem,
}

impl fmt::Display for PredKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredKind::State => "state",
            PredKind::Step => "step",
            PredKind::Elem => "schedule-element",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PType {
    Uint,
    Bool,
    /// Addresses and strings compare as text.
    Text,
    Map,
}

impl fmt::Display for PType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PType::Uint => "uint",
            PType::Bool => "boolean",
            PType::Text => "address/string",
            PType::Map => "map",
        })
    }
}

fn ptype(t: Type) -> PType {
    match t {
        Type::Uint => PType::Uint,
        Type::Bool => PType::Bool,
        Type::Address | Type::Str => PType::Text,
        Type::Map => PType::Map,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Pre,
    Post,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ElemPart {
    BlockNum,
    Val,
    Sender,
    To,
    Tag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
    Add,
    Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    SumValues,
    HasEntry,
    Size,
    Contains,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sum_values" => Func::SumValues,
            "has_entry" => Func::HasEntry,
            "size" => Func::Size,
            "contains" => Func::Contains,
            _ => return None,
        })
    }

    fn signature(self) -> (&'static [PType], PType) {
        match self {
            Func::SumValues => (&[PType::Map], PType::Uint),
            Func::Size => (&[PType::Map], PType::Uint),
            Func::HasEntry => (&[PType::Map, PType::Text, PType::Uint], PType::Bool),
            Func::Contains => (&[PType::Map, PType::Text], PType::Bool),
        }
    }
}

/// Resolved, type-checked predicate expression.
#[derive(Clone, Debug)]
enum Node {
    Const(Value),
    Balance(Side),
    Field(Side, String),
    Elem(ElemPart),
    Not(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A compiled predicate, bound to one contract instance.
#[derive(Clone, Debug)]
pub struct Predicate {
    kind: PredKind,
    source: String,
    node: Node,
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(Uint),
    Str(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 17] = ["->", "||", "&&", "==", "!=", "<=", ">=", "<", ">", "!", "+", "-", "(", ")", ",", ".", "=>"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, PropError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(Uint::parse_decimal(&src[start..i]).expect("digits")), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c == b'"' {
            let start = i;
            i += 1;
            let from = i;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            if i == bytes.len() {
                return Err(PropError::PredicateParse { offset: start, message: "unterminated string".into() });
            }
            out.push((Tok::Str(src[from..i].to_string()), start));
            i += 1;
        } else {
            // "=>" is listed only to give a helpful error below
            let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) else {
                return Err(PropError::PredicateParse {
                    offset: i,
                    message: format!("unexpected character `{}`", src[i..].chars().next().unwrap()),
                });
            };
            if *sym == "=>" {
                return Err(PropError::PredicateParse { offset: i, message: "use `->` for implication".into() });
            }
            out.push((Tok::Sym(sym), i));
            i += sym.len();
        }
    }
    Ok(out)
}

// --------------------------------------------------------------- parsing

/// Surface syntax before name resolution.
#[derive(Clone, Debug)]
enum Ast {
    Int(Uint),
    Str(String),
    Bool(bool),
    Name(Option<String>, String),
    Not(Box<Ast>),
    Bin(Op, Box<Ast>, Box<Ast>),
    Call(String, Vec<Ast>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> PropError {
        PropError::PredicateParse { offset: self.offset(), message: message.into() }
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), PropError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{sym}`")))
        }
    }

    fn pred(&mut self) -> Result<Ast, PropError> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.pred()?;
            return Ok(Ast::Bin(Op::Implies, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ast, PropError> {
        let mut lhs = self.and()?;
        while self.eat("||") {
            lhs = Ast::Bin(Op::Or, Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ast, PropError> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            lhs = Ast::Bin(Op::And, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, PropError> {
        if self.eat("!") {
            return Ok(Ast::Not(Box::new(self.unary()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Ast, PropError> {
        let lhs = self.sum()?;
        for (sym, op) in [("==", Op::Eq), ("!=", Op::Ne), ("<=", Op::Le), (">=", Op::Ge), ("<", Op::Lt), (">", Op::Gt)] {
            if self.eat(sym) {
                return Ok(Ast::Bin(op, Box::new(lhs), Box::new(self.sum()?)));
            }
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Ast, PropError> {
        let mut lhs = self.atom()?;
        loop {
            let op = if self.eat("+") {
                Op::Add
            } else if self.eat("-") {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(self.atom()?));
        }
    }

    fn atom(&mut self) -> Result<Ast, PropError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err("unexpected end of predicate"));
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(Ast::Int(n)),
            Tok::Str(s) => Ok(Ast::Str(s)),
            Tok::Sym("(") => {
                let e = self.pred()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(id) if id == "true" => Ok(Ast::Bool(true)),
            Tok::Ident(id) if id == "false" => Ok(Ast::Bool(false)),
            Tok::Ident(id) => {
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.pred()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    return Ok(Ast::Call(id, args));
                }
                if self.eat(".") {
                    match self.peek().cloned() {
                        Some(Tok::Ident(member)) => {
                            self.pos += 1;
                            return Ok(Ast::Name(Some(id), member));
                        }
                        _ => return Err(self.err("expected a name after `.`")),
                    }
                }
                Ok(Ast::Name(None, id))
            }
            Tok::Sym(s) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected `{s}`")))
            }
        }
    }
}

// ------------------------------------------------------------ resolution

struct Resolver<'a> {
    kind: PredKind,
    inst: &'a ContractInstance,
}

fn type_err(message: String) -> PropError {
    PropError::PredicateTypeError(message)
}

impl Resolver<'_> {
    fn name(&self, qual: Option<&str>, name: &str) -> Result<(Node, PType), PropError> {
        let kind = self.kind;
        match (kind, qual) {
            (PredKind::Elem, Some("msg")) => {
                let (part, ty) = match name {
                    "val" => (ElemPart::Val, PType::Uint),
                    "sender" => (ElemPart::Sender, PType::Text),
                    "to" => (ElemPart::To, PType::Text),
                    "tag" => (ElemPart::Tag, PType::Text),
                    _ => return Err(type_err(format!("messages have no component `{name}`"))),
                };
                Ok((Node::Elem(part), ty))
            }
            (PredKind::Elem, None) if name == "block_num" => Ok((Node::Elem(ElemPart::BlockNum), PType::Uint)),
            (PredKind::Step, Some("pre")) => self.state_name(Side::Pre, name),
            (PredKind::Step, Some("post")) => self.state_name(Side::Post, name),
            (PredKind::State | PredKind::Step, None) => self.state_name(Side::Post, name),
            (PredKind::Elem, None) => self.param(name).ok_or_else(|| {
                type_err(format!("unknown name `{name}` (schedule elements offer block_num and msg.val/sender/to/tag)"))
            }),
            (_, Some(q)) => Err(type_err(format!("`{q}.{name}` is not available in a {kind} predicate"))),
        }
    }

    fn state_name(&self, side: Side, name: &str) -> Result<(Node, PType), PropError> {
        if name == BALANCE_FIELD {
            return Ok((Node::Balance(side), PType::Uint));
        }
        if let Some(f) = self.inst.def.field(name) {
            return Ok((Node::Field(side, name.to_string()), ptype(f.ty)));
        }
        self.param(name).ok_or_else(|| type_err(format!("`{name}` is neither a field nor a parameter of {}", self.inst.def.name)))
    }

    fn param(&self, name: &str) -> Option<(Node, PType)> {
        self.inst.param(name).map(|v| (Node::Const(v.clone()), ptype(v.ty())))
    }

    fn resolve(&self, ast: &Ast) -> Result<(Node, PType), PropError> {
        Ok(match ast {
            Ast::Int(n) => (Node::Const(Value::Uint(n.clone())), PType::Uint),
            Ast::Str(s) => (Node::Const(Value::Str(s.clone())), PType::Text),
            Ast::Bool(b) => (Node::Const(Value::Bool(*b)), PType::Bool),
            Ast::Name(q, n) => self.name(q.as_deref(), n)?,
            Ast::Not(x) => {
                let x = self.expect(x, PType::Bool, "operand of `!`")?;
                (Node::Not(Box::new(x)), PType::Bool)
            }
            Ast::Bin(op, l, r) => {
                let (want, result) = match op {
                    Op::Implies | Op::Or | Op::And => (Some(PType::Bool), PType::Bool),
                    Op::Le | Op::Lt | Op::Ge | Op::Gt => (Some(PType::Uint), PType::Bool),
                    Op::Add | Op::Sub => (Some(PType::Uint), PType::Uint),
                    Op::Eq | Op::Ne => (None, PType::Bool),
                };
                let (ln, lt) = self.resolve(l)?;
                let (rn, rt) = self.resolve(r)?;
                match want {
                    Some(w) if lt != w || rt != w => {
                        return Err(type_err(format!("operator {op:?} needs {w} operands, found {lt} and {rt}")))
                    }
                    None if lt != rt => return Err(type_err(format!("cannot compare {lt} with {rt}"))),
                    _ => {}
                }
                (Node::Bin(*op, Box::new(ln), Box::new(rn)), result)
            }
            Ast::Call(name, args) => {
                let f = Func::from_name(name).ok_or_else(|| type_err(format!("unknown function `{name}`")))?;
                let (params, result) = f.signature();
                if params.len() != args.len() {
                    return Err(type_err(format!("`{name}` takes {} arguments, found {}", params.len(), args.len())));
                }
                let args = args
                    .iter()
                    .zip(params)
                    .map(|(a, t)| self.expect(a, *t, &format!("argument of `{name}`")))
                    .collect::<Result<_, _>>()?;
                (Node::Call(f, args), result)
            }
        })
    }

    fn expect(&self, ast: &Ast, ty: PType, what: &str) -> Result<Node, PropError> {
        let (n, t) = self.resolve(ast)?;
        if t != ty {
            return Err(type_err(format!("{what} must be {ty}, found {t}")));
        }
        Ok(n)
    }
}

// ------------------------------------------------------------ evaluation

#[derive(Clone, Debug)]
enum PVal<'a> {
    Uint(Cow<'a, Uint>),
    Bool(bool),
    Text(&'a str),
    Map(&'a MapValue),
}

impl PartialEq for PVal<'_> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PVal::Uint(a), PVal::Uint(b)) => a == b,
            (PVal::Bool(a), PVal::Bool(b)) => a == b,
            (PVal::Text(a), PVal::Text(b)) => a == b,
            (PVal::Map(a), PVal::Map(b)) => a == b,
            _ => false,
        }
    }
}

fn of_value(v: &Value) -> PVal<'_> {
    match v {
        Value::Uint(u) => PVal::Uint(Cow::Borrowed(u)),
        Value::Bool(b) => PVal::Bool(*b),
        Value::Address(a) => PVal::Text(a.as_str()),
        Value::Str(s) => PVal::Text(s),
        Value::Map(m) => PVal::Map(m),
    }
}

struct Ctx<'a> {
    pre: Option<&'a CState>,
    post: Option<&'a CState>,
    elem: Option<&'a ScheduleElem>,
}

impl<'a> Ctx<'a> {
    fn side(&self, side: Side) -> Option<&'a CState> {
        match side {
            Side::Pre => self.pre,
            Side::Post => self.post,
        }
    }
}

fn eval<'a>(n: &'a Node, ctx: &Ctx<'a>) -> Option<PVal<'a>> {
    Some(match n {
        Node::Const(v) => of_value(v),
        Node::Balance(side) => PVal::Uint(Cow::Borrowed(&ctx.side(*side)?.balance)),
        Node::Field(side, name) => of_value(ctx.side(*side)?.fields.get(name)?),
        Node::Elem(part) => {
            let e = ctx.elem?;
            match part {
                ElemPart::BlockNum => PVal::Uint(Cow::Borrowed(&e.bc.block_num)),
                ElemPart::Val => PVal::Uint(Cow::Borrowed(&e.msg.val)),
                ElemPart::Sender => PVal::Text(e.msg.sender.as_str()),
                ElemPart::To => PVal::Text(e.msg.to.as_str()),
                ElemPart::Tag => PVal::Text(e.msg.method.as_str()),
            }
        }
        Node::Not(x) => PVal::Bool(!as_bool(eval(x, ctx)?)?),
        Node::Bin(op, l, r) => match op {
            Op::And => PVal::Bool(as_bool(eval(l, ctx)?)? && as_bool(eval(r, ctx)?)?),
            Op::Or => PVal::Bool(as_bool(eval(l, ctx)?)? || as_bool(eval(r, ctx)?)?),
            Op::Implies => PVal::Bool(!as_bool(eval(l, ctx)?)? || as_bool(eval(r, ctx)?)?),
            Op::Eq => PVal::Bool(eval(l, ctx)? == eval(r, ctx)?),
            Op::Ne => PVal::Bool(eval(l, ctx)? != eval(r, ctx)?),
            _ => {
                let a = as_uint(eval(l, ctx)?)?;
                let b = as_uint(eval(r, ctx)?)?;
                match op {
                    Op::Le => PVal::Bool(a <= b),
                    Op::Lt => PVal::Bool(a < b),
                    Op::Ge => PVal::Bool(a >= b),
                    Op::Gt => PVal::Bool(a > b),
                    Op::Add => PVal::Uint(Cow::Owned(&*a + &*b)),
                    _ => PVal::Uint(Cow::Owned(a.monus(&b))),
                }
            }
        },
        Node::Call(f, args) => {
            let PVal::Map(m) = eval(&args[0], ctx)? else { return None };
            match f {
                Func::SumValues => PVal::Uint(Cow::Owned(m.sum_values())),
                Func::Size => PVal::Uint(Cow::Owned(Uint::from(m.len() as u64))),
                Func::Contains => {
                    let PVal::Text(k) = eval(&args[1], ctx)? else { return None };
                    PVal::Bool(m.entries().iter().any(|(a, _)| a.as_str() == k))
                }
                Func::HasEntry => {
                    let PVal::Text(k) = eval(&args[1], ctx)? else { return None };
                    let d = as_uint(eval(&args[2], ctx)?)?;
                    // exactly one record for k, and it carries d
                    let mut records = m.entries().iter().filter(|(a, _)| a.as_str() == k);
                    let one = records.next().is_some_and(|(_, v)| *v == *d);
                    PVal::Bool(one && records.next().is_none())
                }
            }
        }
    })
}

fn as_bool(v: PVal<'_>) -> Option<bool> {
    match v {
        PVal::Bool(b) => Some(b),
        _ => None,
    }
}

fn as_uint(v: PVal<'_>) -> Option<Cow<'_, Uint>> {
    match v {
        PVal::Uint(u) => Some(u),
        _ => None,
    }
}

impl Predicate {
    /// Parses `source` and resolves it against `inst`. The result must be boolean.
    pub fn compile(source: &str, kind: PredKind, inst: &ContractInstance) -> Result<Predicate, PropError> {
        let toks = lex(source)?;
        let mut p = Parser { toks, pos: 0, end: source.len() };
        let ast = p.pred()?;
        if p.pos < p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        let node = Resolver { kind, inst }.expect(&ast, PType::Bool, "predicate")?;
        Ok(Predicate { kind, source: source.to_string(), node })
    }

    pub fn kind(&self) -> PredKind {
        self.kind
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Fails with a type error unless the predicate was compiled for `kind`.
    pub fn require(&self, kind: PredKind) -> Result<(), PropError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(type_err(format!("`{}` is a {} predicate, a {kind} predicate is needed here", self.source, self.kind)))
        }
    }

    fn run(&self, ctx: Ctx<'_>) -> bool {
        // states of another contract may lack a field; such a state does not satisfy anything
        matches!(eval(&self.node, &ctx), Some(PVal::Bool(true)))
    }

    pub fn holds_state(&self, st: &CState) -> bool {
        self.run(Ctx { pre: Some(st), post: Some(st), elem: None })
    }

    pub fn holds_step(&self, pre: &CState, post: &CState) -> bool {
        self.run(Ctx { pre: Some(pre), post: Some(post), elem: None })
    }

    pub fn holds_elem(&self, e: &ScheduleElem) -> bool {
        self.run(Ctx { pre: None, post: None, elem: Some(e) })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
