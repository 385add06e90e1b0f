//! Recursive-descent parser for contract sources.
//!
//! Grammar (informal):
//!
//! ```text
//! contract   := "contract" IDENT "(" params? ")" "{" field* "}" (transition | continuation)*
//! field      := IDENT ":" type "=" expr ";"
//! transition := "transition" IDENT "(" params? ")" ("if" expr "=>")? block
//! continuation := "continuation" IDENT "(" param ")" block
//! block      := IDENT "<-" "&" IDENT ";" block
//!             | IDENT "<-" "&&" IDENT ";" block
//!             | IDENT ":=" expr ";" block
//!             | "let" IDENT "=" expr "in" block
//!             | "if" expr "then" block "else" block
//!             | "send" "(" msg "," (IDENT | "MT") ")" ";"?
//!             | "return" expr ";"?
//!             | (nothing)
//! msg        := "<" IDENT "->" expr ("," IDENT "->" expr)* ">"
//! expr       := "let" IDENT "=" expr "in" expr | or
//! or         := and ("||" and)*
//! and        := unary ("&&" unary)*
//! unary      := "not" unary | cmp
//! cmp        := add (("==" | "<=" | "<") add)?
//! add        := atom (("+" | "-") atom)*
//! atom       := INT | STRING | "true" | "false" | "[" "]" | "ok_msg" | "no_msg"
//!             | IDENT "(" args ")" | IDENT | "(" expr ")"
//! ```

use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::{ParseError, ParseErrorKind};
use crate::lang::{
    BinOp, Cmd, ContRef, ContinuationDef, ContractDef, Expr, ExprKind, FieldDef, Literal, MapOp, MsgLit, NodeSpan,
    Param, SourceSpan, TransitionDef, Type,
};

pub fn parse_contract(source: &str) -> Result<ContractDef, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(tokens, source);
    let c = p.contract()?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses a standalone expression.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(tokens, source);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(tokens: Vec<Token>, source: &str) -> Self {
        let line = source.split('\n').count().max(1);
        let last = source.rsplit('\n').next().unwrap_or("");
        let eof = SourceSpan::new(line, last.chars().count() + 1, 0);
        Parser { tokens, pos: 0, eof }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> SourceSpan {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        ParseError { kind: ParseErrorKind::UnexpectedToken, span: self.span(), expected: expected.into(), found }
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<SourceSpan> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            Err(self.error(kind.to_string()))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<SourceSpan> {
        self.expect(TokenKind::Keyword(kw))
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let t = self.bump();
                match t.kind {
                    TokenKind::Ident(s) => Ok((s, t.span)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.pos < self.tokens.len() {
            Err(self.error("end of input"))
        } else {
            Ok(())
        }
    }

    fn contract(&mut self) -> PResult<ContractDef> {
        let start = self.expect_kw(Keyword::Contract)?;
        let (name, _) = self.ident("contract name")?;
        let params = self.param_list()?;
        self.expect(TokenKind::LBrace)?;
        let mut fields = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            let (fname, fspan) = self.ident("field name or `}`")?;
            self.expect(TokenKind::Colon)?;
            let ty = self.ty()?;
            self.expect(TokenKind::Assign)?;
            let init = self.expr()?;
            self.expect(TokenKind::Semi)?;
            fields.push(FieldDef { name: fname, ty, init, span: fspan.into() });
        }
        self.expect(TokenKind::RBrace)?;

        let mut transitions = Vec::new();
        let mut continuations = Vec::new();
        loop {
            if self.at_kw(Keyword::Transition) {
                transitions.push(self.transition()?);
            } else if self.at_kw(Keyword::Continuation) {
                continuations.push(self.continuation()?);
            } else if self.peek().is_none() {
                break;
            } else {
                return Err(self.error("`transition`, `continuation` or end of input"));
            }
        }
        Ok(ContractDef { name, params, fields, transitions, continuations, span: start.into() })
    }

    fn param_list(&mut self) -> PResult<Vec<Param>> {
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            params.push(self.param()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(params);
            }
            self.expect(TokenKind::Comma)?;
        }
    }

    fn param(&mut self) -> PResult<Param> {
        let (name, span) = self.ident("parameter name")?;
        self.expect(TokenKind::Colon)?;
        let ty = self.ty()?;
        Ok(Param { name, ty, span: span.into() })
    }

    fn ty(&mut self) -> PResult<Type> {
        let at = self.pos;
        let (name, _) = self.ident("a type")?;
        let ty = match name.as_str() {
            "uint" => Type::Uint,
            "boolean" => Type::Bool,
            "string" => Type::Str,
            "address" => {
                if self.eat(&TokenKind::FatArrow) {
                    let inner = self.pos;
                    let (v, _) = self.ident("`uint`")?;
                    if v != "uint" {
                        self.pos = inner;
                        return Err(self.error("`uint`"));
                    }
                    Type::Map
                } else {
                    Type::Address
                }
            }
            _ => {
                self.pos = at;
                return Err(self.error("`address`, `uint`, `boolean`, `string` or `address => uint`"));
            }
        };
        Ok(ty)
    }

    fn transition(&mut self) -> PResult<TransitionDef> {
        let start = self.expect_kw(Keyword::Transition)?;
        let (tag, _) = self.ident("transition name")?;
        let params = self.param_list()?;
        // `if e =>` is a filter, `if e then` already starts the body
        if self.at_kw(Keyword::If) {
            let span: NodeSpan = self.span().into();
            self.bump();
            let cond = self.expr()?;
            if self.eat(&TokenKind::FatArrow) {
                let body = self.block()?;
                return Ok(TransitionDef { tag, params, filter: Some(cond), body, span: start.into() });
            }
            if !self.at_kw(Keyword::Then) {
                return Err(self.error("`=>` or `then`"));
            }
            let body = self.if_rest(cond, span)?;
            return Ok(TransitionDef { tag, params, filter: None, body, span: start.into() });
        }
        let body = self.block()?;
        Ok(TransitionDef { tag, params, filter: None, body, span: start.into() })
    }

    fn continuation(&mut self) -> PResult<ContinuationDef> {
        let start = self.expect_kw(Keyword::Continuation)?;
        let (name, _) = self.ident("continuation name")?;
        self.expect(TokenKind::LParen)?;
        let param = self.param()?;
        self.expect(TokenKind::RParen)?;
        let body = self.block()?;
        Ok(ContinuationDef { name, param, body, span: start.into() })
    }

    fn if_rest(&mut self, cond: Expr, span: NodeSpan) -> PResult<Cmd> {
        self.expect_kw(Keyword::Then)?;
        let then_branch = Box::new(self.block()?);
        self.expect_kw(Keyword::Else)?;
        let else_branch = Box::new(self.block()?);
        Ok(Cmd::If { cond, then_branch, else_branch, span })
    }

    fn block(&mut self) -> PResult<Cmd> {
        let span: NodeSpan = self.span().into();
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::Let)) => {
                self.bump();
                let (var, _) = self.ident("variable name")?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.expect_kw(Keyword::In)?;
                let rest = Box::new(self.block()?);
                Ok(Cmd::Let { var, value, rest, span })
            }
            Some(TokenKind::Keyword(Keyword::If)) => {
                self.bump();
                let cond = self.expr()?;
                self.if_rest(cond, span)
            }
            Some(TokenKind::Keyword(Keyword::Send)) => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let msg = self.msg_lit()?;
                self.expect(TokenKind::Comma)?;
                let cont = if self.eat(&TokenKind::Keyword(Keyword::Mt)) {
                    ContRef::Empty
                } else {
                    ContRef::Named(self.ident("continuation name or `MT`")?.0)
                };
                self.expect(TokenKind::RParen)?;
                self.eat(&TokenKind::Semi);
                Ok(Cmd::Send { msg, cont, span })
            }
            Some(TokenKind::Keyword(Keyword::Return)) => {
                self.bump();
                let value = self.expr()?;
                self.eat(&TokenKind::Semi);
                Ok(Cmd::Return { value, span })
            }
            Some(TokenKind::Ident(_)) => match self.peek_at(1) {
                Some(TokenKind::LArrow) => {
                    let (var, _) = self.ident("variable name")?;
                    self.bump();
                    let deep = if self.eat(&TokenKind::AmpAmp) {
                        true
                    } else if self.eat(&TokenKind::Amp) {
                        false
                    } else {
                        return Err(self.error("`&` or `&&`"));
                    };
                    let (name, _) = self.ident(if deep { "blockchain aspect" } else { "field name" })?;
                    self.expect(TokenKind::Semi)?;
                    let rest = Box::new(self.block()?);
                    Ok(if deep {
                        Cmd::ChainRead { var, aspect: name, rest, span }
                    } else {
                        Cmd::FieldRead { var, field: name, rest, span }
                    })
                }
                Some(TokenKind::ColonEq) => {
                    let (field, _) = self.ident("field name")?;
                    self.bump();
                    let value = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    let rest = Box::new(self.block()?);
                    Ok(Cmd::FieldWrite { field, value, rest, span })
                }
                _ => {
                    self.pos += 1;
                    Err(self.error("`<-` or `:=`"))
                }
            },
            _ => Ok(Cmd::End),
        }
    }

    fn msg_lit(&mut self) -> PResult<MsgLit> {
        let open = self.expect(TokenKind::Lt)?;
        let mut to = None;
        let mut amount = None;
        let mut tag = None;
        let mut body = None;
        loop {
            let key_at = self.pos;
            let (key, _) = self.ident("message entry name")?;
            self.expect(TokenKind::RArrow)?;
            let value = self.expr()?;
            let slot = match key.as_str() {
                "to" => &mut to,
                "amount" => &mut amount,
                "tag" => &mut tag,
                "msg" => &mut body,
                _ => {
                    self.pos = key_at;
                    return Err(self.error("`to`, `amount`, `tag` or `msg`"));
                }
            };
            if slot.is_some() {
                self.pos = key_at;
                return Err(self.error(format!("a message entry other than duplicate `{key}`")));
            }
            *slot = Some(value);
            if self.eat(&TokenKind::Gt) {
                break;
            }
            self.expect(TokenKind::Comma)?;
        }
        let missing = |what: &str| ParseError {
            kind: ParseErrorKind::UnexpectedToken,
            span: open,
            expected: format!("message entry `{what}`"),
            found: "message literal without it".into(),
        };
        Ok(MsgLit {
            to: to.ok_or_else(|| missing("to"))?,
            amount: amount.ok_or_else(|| missing("amount"))?,
            tag: tag.ok_or_else(|| missing("tag"))?,
            body,
        })
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        if self.at_kw(Keyword::Let) {
            let span = self.bump().span;
            let (var, _) = self.ident("variable name")?;
            self.expect(TokenKind::Assign)?;
            let value = self.expr()?;
            self.expect_kw(Keyword::In)?;
            let body = self.expr()?;
            return Ok(Expr::new(ExprKind::Let(var, Box::new(value), Box::new(body)), span));
        }
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.at(&TokenKind::PipePipe) {
            let span = self.bump().span;
            let rhs = self.and_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.at(&TokenKind::AmpAmp) {
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at_kw(Keyword::Not) {
            let span = self.bump().span;
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), span));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> PResult<Expr> {
        let lhs = self.add()?;
        let op = match self.peek() {
            Some(TokenKind::EqEq) => BinOp::Eq,
            Some(TokenKind::Le) => BinOp::Le,
            Some(TokenKind::Lt) => BinOp::Lt,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.add()?;
        Ok(Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn add(&mut self) -> PResult<Expr> {
        let mut lhs = self.atom()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.atom()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        let lit = |l| Ok(Expr::new(ExprKind::Lit(l), span));
        match self.peek().cloned() {
            Some(TokenKind::Int(n)) => {
                self.bump();
                lit(Literal::Uint(n))
            }
            Some(TokenKind::Str(s)) => {
                self.bump();
                lit(Literal::Str(s))
            }
            Some(TokenKind::Keyword(Keyword::True)) => {
                self.bump();
                lit(Literal::Bool(true))
            }
            Some(TokenKind::Keyword(Keyword::False)) => {
                self.bump();
                lit(Literal::Bool(false))
            }
            Some(TokenKind::Keyword(Keyword::OkMsg)) => {
                self.bump();
                lit(Literal::OkMsg)
            }
            Some(TokenKind::Keyword(Keyword::NoMsg)) => {
                self.bump();
                lit(Literal::NoMsg)
            }
            Some(TokenKind::LBracket) => {
                self.bump();
                self.expect(TokenKind::RBracket)?;
                lit(Literal::EmptyMap)
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Ident(name)) => {
                self.bump();
                if self.at(&TokenKind::LParen) {
                    let Some(op) = MapOp::from_name(&name) else {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnexpectedToken,
                            span,
                            expected: "`put`, `get`, `remove` or `contains`".into(),
                            found: format!("call to `{name}`"),
                        });
                    };
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat(&TokenKind::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(TokenKind::RParen)?;
                    if args.len() != op.arity() {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnexpectedToken,
                            span,
                            expected: format!("{} arguments to `{}`", op.arity(), op.name()),
                            found: format!("{} arguments", args.len()),
                        });
                    }
                    Ok(Expr::new(ExprKind::Map(op, args), span))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), span))
                }
            }
            _ => Err(self.error("an expression")),
        }
    }
}
