//! Canonical source rendering of contract ASTs.

use std::fmt::Write;

use crate::lang::{BinOp, Cmd, ContRef, ContractDef, Expr, ExprKind, Literal, MsgLit, Param};

const INDENT: &str = "  ";

pub fn pretty_print(c: &ContractDef) -> String {
    let mut out = String::new();
    write!(out, "contract {}\n  (", c.name).unwrap();
    for (i, p) in c.params.iter().enumerate() {
        if i > 0 {
            out.push_str(",\n   ");
        }
        out.push_str(&param(p));
    }
    out.push_str(")\n{\n");
    for f in &c.fields {
        writeln!(out, "{INDENT}{} : {} = {};", f.name, f.ty, expr(&f.init)).unwrap();
    }
    out.push_str("}\n");

    for t in &c.transitions {
        let params: Vec<_> = t.params.iter().map(param).collect();
        write!(out, "\ntransition {} ({})\n", t.tag, params.join(", ")).unwrap();
        if let Some(f) = &t.filter {
            writeln!(out, "{INDENT}if {} =>", expr(f)).unwrap();
        }
        block(&mut out, &t.body, 1);
    }
    for k in &c.continuations {
        write!(out, "\ncontinuation {} ({})\n", k.name, param(&k.param)).unwrap();
        block(&mut out, &k.body, 1);
    }
    out
}

fn param(p: &Param) -> String {
    format!("{} : {}", p.name, p.ty)
}

fn block(out: &mut String, cmd: &Cmd, depth: usize) {
    let pad = INDENT.repeat(depth);
    match cmd {
        Cmd::FieldRead { var, field, rest, .. } => {
            writeln!(out, "{pad}{var} <- & {field};").unwrap();
            block(out, rest, depth);
        }
        Cmd::ChainRead { var, aspect, rest, .. } => {
            writeln!(out, "{pad}{var} <- && {aspect};").unwrap();
            block(out, rest, depth);
        }
        Cmd::FieldWrite { field, value, rest, .. } => {
            writeln!(out, "{pad}{field} := {};", expr(value)).unwrap();
            block(out, rest, depth);
        }
        Cmd::Let { var, value, rest, .. } => {
            writeln!(out, "{pad}let {var} = {} in", expr(value)).unwrap();
            block(out, rest, depth);
        }
        Cmd::If { cond, then_branch, else_branch, .. } => {
            writeln!(out, "{pad}if {}", expr(cond)).unwrap();
            writeln!(out, "{pad}then").unwrap();
            block(out, then_branch, depth + 1);
            writeln!(out, "{pad}else").unwrap();
            block(out, else_branch, depth + 1);
        }
        Cmd::Send { msg, cont, .. } => {
            let cont = match cont {
                ContRef::Empty => "MT",
                ContRef::Named(n) => n,
            };
            writeln!(out, "{pad}send ({}, {cont})", msg_lit(msg)).unwrap();
        }
        Cmd::Return { value, .. } => {
            writeln!(out, "{pad}return {}", expr(value)).unwrap();
        }
        Cmd::End => {}
    }
}

fn msg_lit(m: &MsgLit) -> String {
    let mut s = format!("<to -> {}, amount -> {}, tag -> {}", expr(&m.to), expr(&m.amount), expr(&m.tag));
    if let Some(b) = &m.body {
        write!(s, ", msg -> {}", expr(b)).unwrap();
    }
    s.push('>');
    s
}

// Binding strength, loosest first. Atoms sit above everything.
const PREC_LET: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_ADD: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Let(..) => PREC_LET,
        ExprKind::Binary(op, ..) => binop_prec(*op),
        ExprKind::Not(_) => PREC_NOT,
        ExprKind::Lit(_) | ExprKind::Var(_) | ExprKind::Map(..) => PREC_ATOM,
    }
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => PREC_OR,
        BinOp::And => PREC_AND,
        BinOp::Eq | BinOp::Le | BinOp::Lt => PREC_CMP,
        BinOp::Add | BinOp::Sub => PREC_ADD,
    }
}

pub fn expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Lit(l) => literal(l),
        ExprKind::Var(v) => v.clone(),
        ExprKind::Map(op, args) => {
            let args: Vec<_> = args.iter().map(expr).collect();
            format!("{}({})", op.name(), args.join(", "))
        }
        ExprKind::Let(v, val, body) => format!("let {v} = {} in {}", expr(val), expr(body)),
        ExprKind::Not(x) => format!("not {}", operand(x, PREC_NOT)),
        ExprKind::Binary(op, l, r) => {
            let p = binop_prec(*op);
            // left-associative levels accept an equal-precedence left child;
            // comparisons are non-associative
            let left_min = if p == PREC_CMP { p + 1 } else { p };
            format!("{} {} {}", operand(l, left_min), op.symbol(), operand(r, p + 1))
        }
    }
}

fn operand(e: &Expr, min: u8) -> String {
    if prec(e) >= min {
        expr(e)
    } else {
        format!("({})", expr(e))
    }
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Uint(n) => n.to_string(),
        Literal::Bool(b) => b.to_string(),
        Literal::Str(s) => {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
        Literal::EmptyMap => "[]".into(),
        Literal::OkMsg => "ok_msg".into(),
        Literal::NoMsg => "no_msg".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_contract, parse_expr};

    #[test]
    fn empty_contract_canonical_form() {
        let c = parse_contract("contract Empty () {}").unwrap();
        assert_eq!(pretty_print(&c), "contract Empty\n  ()\n{\n}\n");
    }

    #[test]
    fn continuation_block_is_printed() {
        let src = "contract Caller (owner : address) {}
            continuation UseResult (res : uint)
              send (<to -> owner, amount -> 0, tag -> \"main\", msg -> res>, MT)";
        let c = parse_contract(src).unwrap();
        let printed = pretty_print(&c);
        assert!(printed.contains("continuation UseResult (res : uint)"), "{printed}");
        assert_eq!(parse_contract(&printed).unwrap(), c);
    }

    #[test]
    fn parenthesizes_only_where_needed() {
        for src in ["a - (b - c)", "(a - b) - c", "not (a == b)", "(not a) == b", "(let x = 1 in x) + 2", "a && (b || c)"] {
            let e = parse_expr(src).unwrap();
            let printed = expr(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
        assert_eq!(expr(&parse_expr("(a - b) - c").unwrap()), "a - b - c");
        assert_eq!(expr(&parse_expr("((a))").unwrap()), "a");
    }
}
