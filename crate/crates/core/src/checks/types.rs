use super::{CheckReport, Diagnostic, RuleId};
use crate::lang::{
    message_component_type, BinOp, Cmd, ContRef, ContractDef, Expr, ExprKind, Literal, MapOp, MsgLit, Param,
    SourceSpan, Type, BALANCE_FIELD, CHAIN_ASPECTS,
};

/// Static type of an expression. Payload constants only make sense as a
/// message body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Val(Type),
    Payload,
}

impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ty::Val(t) => write!(f, "{t}"),
            Ty::Payload => f.write_str("payload constant"),
        }
    }
}

/// Names in scope while checking one body. Lookups go innermost first.
struct TypeEnv<'c> {
    contract: &'c ContractDef,
    params: Vec<(&'c str, Type)>,
    locals: Vec<(String, Type)>,
    /// Inside a filter, field references are left to the purity check.
    in_filter: bool,
}

impl TypeEnv<'_> {
    fn lookup(&self, name: &str) -> Option<Type> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| *t)
            .or_else(|| self.params.iter().rev().find(|(n, _)| *n == name).map(|(_, t)| *t))
            .or_else(|| self.contract.param(name).map(|p| p.ty))
    }
}

pub fn typecheck(c: &ContractDef) -> CheckReport {
    let mut report = CheckReport::default();
    declarations(c, &mut report);

    for f in &c.fields {
        let mut env = TypeEnv { contract: c, params: Vec::new(), locals: Vec::new(), in_filter: false };
        f.init.free_vars(&mut |name, span| {
            if c.param(name).is_none() {
                report.push(Diagnostic::error(
                    RuleId::FieldInit,
                    span,
                    format!("initializer of `{}` may only use constants and contract parameters, found `{name}`", f.name),
                ));
            }
        });
        // unbound names were reported above
        env.in_filter = true;
        if let Some(t) = infer(&f.init, &mut env, &mut CheckReport::default()) {
            expect_ty(t, f.ty, f.init.span(), &format!("initializer of `{}`", f.name), &mut report);
        }
    }

    for t in &c.transitions {
        let mut env = TypeEnv { contract: c, params: Vec::new(), locals: Vec::new(), in_filter: false };
        for p in &t.params {
            match message_component_type(&p.name) {
                None => report.push(Diagnostic::error(
                    RuleId::UnknownMsgComponent,
                    p.span.0,
                    format!(
                        "`{}` is not a message component (expected one of sender, value, amount, tag, to, msg)",
                        p.name
                    ),
                )),
                Some(allowed) if !allowed.contains(&p.ty) => report.push(Diagnostic::error(
                    RuleId::TypeMismatch,
                    p.span.0,
                    format!("message component `{}` cannot have type {}", p.name, p.ty),
                )),
                Some(_) => {}
            }
            env.params.push((&p.name, p.ty));
        }
        if let Some(filter) = &t.filter {
            env.in_filter = true;
            if let Some(ty) = infer(filter, &mut env, &mut report) {
                expect_ty(ty, Type::Bool, filter.span(), "filter", &mut report);
            }
            env.in_filter = false;
        }
        check_cmd(&t.body, &mut env, &mut report);
    }

    for k in &c.continuations {
        if !matches!(k.param.ty, Type::Uint | Type::Str) {
            report.push(Diagnostic::error(
                RuleId::TypeMismatch,
                k.param.span.0,
                format!("continuation parameter must be uint or string, found {}", k.param.ty),
            ));
        }
        let mut env = TypeEnv { contract: c, params: vec![(&k.param.name, k.param.ty)], locals: Vec::new(), in_filter: false };
        check_cmd(&k.body, &mut env, &mut report);
    }
    report
}

fn declarations(c: &ContractDef, report: &mut CheckReport) {
    duplicates(&c.params, "contract parameter", report);
    for (i, f) in c.fields.iter().enumerate() {
        if let Some(prev) = c.fields[..i].iter().find(|g| g.name == f.name) {
            report.push(
                Diagnostic::error(RuleId::DuplicateName, f.span.0, format!("field `{}` declared twice", f.name))
                    .with_related(prev.span.0),
            );
        }
        if let Some(p) = c.param(&f.name) {
            report.push(
                Diagnostic::error(RuleId::Shadowing, f.span.0, format!("field `{}` shadows a contract parameter", f.name))
                    .with_related(p.span.0),
            );
        }
        if f.name == BALANCE_FIELD {
            report.push(Diagnostic::error(
                RuleId::ReservedName,
                f.span.0,
                "`balance` is an implicit field and cannot be declared",
            ));
        }
    }
    for t in &c.transitions {
        duplicates(&t.params, "transition parameter", report);
        for p in &t.params {
            if let Some(cp) = c.param(&p.name) {
                report.push(
                    Diagnostic::error(
                        RuleId::Shadowing,
                        p.span.0,
                        format!("parameter `{}` shadows a contract parameter", p.name),
                    )
                    .with_related(cp.span.0),
                );
            }
        }
    }
    for k in &c.continuations {
        if let Some(cp) = c.param(&k.param.name) {
            report.push(
                Diagnostic::error(
                    RuleId::Shadowing,
                    k.param.span.0,
                    format!("parameter `{}` shadows a contract parameter", k.param.name),
                )
                .with_related(cp.span.0),
            );
        }
    }
}

fn duplicates(params: &[Param], what: &str, report: &mut CheckReport) {
    for (i, p) in params.iter().enumerate() {
        if let Some(prev) = params[..i].iter().find(|q| q.name == p.name) {
            report.push(
                Diagnostic::error(RuleId::DuplicateName, p.span.0, format!("{what} `{}` declared twice", p.name))
                    .with_related(prev.span.0),
            );
        }
    }
}

fn expect_ty(found: Ty, expected: Type, span: SourceSpan, what: &str, report: &mut CheckReport) -> bool {
    if found == Ty::Val(expected) {
        return true;
    }
    report.push(Diagnostic::error(
        RuleId::TypeMismatch,
        span,
        format!("{what} must be {expected}, found {found}"),
    ));
    false
}

fn check_cmd(cmd: &Cmd, env: &mut TypeEnv<'_>, report: &mut CheckReport) {
    let mark = env.locals.len();
    match cmd {
        Cmd::FieldRead { var, field, rest, span } => {
            let ty = if field == BALANCE_FIELD {
                Some(Type::Uint)
            } else {
                env.contract.field(field).map(|f| f.ty)
            };
            match ty {
                Some(t) => env.locals.push((var.clone(), t)),
                None => {
                    report.push(Diagnostic::error(RuleId::UnknownField, span.0, format!("no field named `{field}`")));
                    // keep checking the rest with the variable unusable
                }
            }
            check_cmd(rest, env, report);
        }
        Cmd::ChainRead { var, aspect, rest, span } => {
            if CHAIN_ASPECTS.contains(&aspect.as_str()) {
                env.locals.push((var.clone(), Type::Uint));
            } else {
                report.push(Diagnostic::error(
                    RuleId::UnknownChainAspect,
                    span.0,
                    format!("unknown blockchain aspect `{aspect}` (known: {})", CHAIN_ASPECTS.join(", ")),
                ));
            }
            check_cmd(rest, env, report);
        }
        Cmd::FieldWrite { field, value, rest, span } => {
            let vt = infer(value, env, report);
            if field == BALANCE_FIELD {
                report.push(Diagnostic::error(
                    RuleId::BalanceWrite,
                    span.0,
                    "`balance` is read-only; funds move only by sending messages",
                ));
            } else if let Some(f) = env.contract.field(field) {
                if let Some(vt) = vt {
                    expect_ty(vt, f.ty, value.span(), &format!("value written to `{field}`"), report);
                }
            } else {
                report.push(Diagnostic::error(RuleId::UnknownField, span.0, format!("no field named `{field}`")));
            }
            check_cmd(rest, env, report);
        }
        Cmd::Let { var, value, rest, .. } => {
            match infer(value, env, report) {
                Some(Ty::Val(t)) => env.locals.push((var.clone(), t)),
                Some(Ty::Payload) => report.push(Diagnostic::error(
                    RuleId::TypeMismatch,
                    value.span(),
                    "payload constants can only appear as a message body",
                )),
                None => {}
            }
            check_cmd(rest, env, report);
        }
        Cmd::If { cond, then_branch, else_branch, .. } => {
            if let Some(t) = infer(cond, env, report) {
                expect_ty(t, Type::Bool, cond.span(), "condition", report);
            }
            check_cmd(then_branch, env, report);
            env.locals.truncate(mark);
            check_cmd(else_branch, env, report);
        }
        Cmd::Send { msg, cont, span } => {
            check_msg(msg, env, report);
            if let ContRef::Named(k) = cont {
                if env.contract.continuation(k).is_none() {
                    report.push(Diagnostic::error(
                        RuleId::UnknownContinuation,
                        span.0,
                        format!("no continuation named `{k}`"),
                    ));
                }
            }
        }
        Cmd::Return { value, .. } => {
            if let Some(t) = infer(value, env, report) {
                if !matches!(t, Ty::Val(Type::Uint | Type::Str)) {
                    report.push(Diagnostic::error(
                        RuleId::TypeMismatch,
                        value.span(),
                        format!("returned value must be uint or string, found {t}"),
                    ));
                }
            }
        }
        Cmd::End => {}
    }
    env.locals.truncate(mark);
}

fn check_msg(m: &MsgLit, env: &mut TypeEnv<'_>, report: &mut CheckReport) {
    for (e, ty, what) in [(&m.to, Type::Address, "`to`"), (&m.amount, Type::Uint, "`amount`"), (&m.tag, Type::Str, "`tag`")] {
        if let Some(t) = infer(e, env, report) {
            expect_ty(t, ty, e.span(), what, report);
        }
    }
    if let Some(body) = &m.body {
        if let Some(t) = infer(body, env, report) {
            if !matches!(t, Ty::Payload | Ty::Val(Type::Str | Type::Uint)) {
                report.push(Diagnostic::error(
                    RuleId::TypeMismatch,
                    body.span(),
                    format!("message body must be ok_msg, no_msg, a string or a uint, found {t}"),
                ));
            }
        }
    }
}

fn infer(e: &Expr, env: &mut TypeEnv<'_>, report: &mut CheckReport) -> Option<Ty> {
    let val = |t| Some(Ty::Val(t));
    match &e.kind {
        ExprKind::Lit(l) => match l {
            Literal::Uint(_) => val(Type::Uint),
            Literal::Bool(_) => val(Type::Bool),
            Literal::Str(_) => val(Type::Str),
            Literal::EmptyMap => val(Type::Map),
            Literal::OkMsg | Literal::NoMsg => Some(Ty::Payload),
        },
        ExprKind::Var(name) => match env.lookup(name) {
            Some(t) => val(t),
            None => {
                let is_state = env.contract.field(name).is_some()
                    || name == BALANCE_FIELD
                    || CHAIN_ASPECTS.contains(&name.as_str());
                if !(env.in_filter && is_state) {
                    let hint = if is_state { format!(" (read it first with `x <- & {name};`)") } else { String::new() };
                    report.push(Diagnostic::error(
                        RuleId::UnboundVariable,
                        e.span(),
                        format!("unbound variable `{name}`{hint}"),
                    ));
                }
                None
            }
        },
        ExprKind::Not(x) => {
            let t = infer(x, env, report)?;
            expect_ty(t, Type::Bool, x.span(), "operand of `not`", report).then_some(Ty::Val(Type::Bool))
        }
        ExprKind::Binary(op, l, r) => {
            let lt = infer(l, env, report);
            let rt = infer(r, env, report);
            match op {
                BinOp::And | BinOp::Or => {
                    let ok_l = lt.map(|t| expect_ty(t, Type::Bool, l.span(), &format!("operand of `{}`", op.symbol()), report));
                    let ok_r = rt.map(|t| expect_ty(t, Type::Bool, r.span(), &format!("operand of `{}`", op.symbol()), report));
                    (ok_l? && ok_r?).then_some(Ty::Val(Type::Bool))
                }
                BinOp::Add | BinOp::Sub | BinOp::Le | BinOp::Lt => {
                    let ok_l = lt.map(|t| expect_ty(t, Type::Uint, l.span(), &format!("operand of `{}`", op.symbol()), report));
                    let ok_r = rt.map(|t| expect_ty(t, Type::Uint, r.span(), &format!("operand of `{}`", op.symbol()), report));
                    if !(ok_l? && ok_r?) {
                        return None;
                    }
                    val(if matches!(op, BinOp::Add | BinOp::Sub) { Type::Uint } else { Type::Bool })
                }
                BinOp::Eq => {
                    let (lt, rt) = (lt?, rt?);
                    if lt == Ty::Payload || lt != rt {
                        report.push(Diagnostic::error(
                            RuleId::TypeMismatch,
                            e.span(),
                            format!("cannot compare {lt} with {rt}"),
                        ));
                        return None;
                    }
                    val(Type::Bool)
                }
            }
        }
        ExprKind::Map(op, args) => {
            let tys: Vec<Option<Ty>> = args.iter().map(|a| infer(a, env, report)).collect();
            let mut expected = vec![Type::Map, Type::Address];
            if *op == MapOp::Put {
                expected.push(Type::Uint);
            }
            let mut ok = args.len() == expected.len();
            for ((a, t), want) in args.iter().zip(&tys).zip(&expected) {
                match t {
                    Some(t) => ok &= expect_ty(*t, *want, a.span(), &format!("argument of `{}`", op.name()), report),
                    None => ok = false,
                }
            }
            if !ok {
                return None;
            }
            val(match op {
                MapOp::Put | MapOp::Remove => Type::Map,
                MapOp::Get => Type::Uint,
                MapOp::Contains => Type::Bool,
            })
        }
        ExprKind::Let(name, value, body) => {
            let vt = infer(value, env, report);
            match vt {
                Some(Ty::Val(t)) => {
                    env.locals.push((name.clone(), t));
                    let bt = infer(body, env, report);
                    env.locals.pop();
                    bt
                }
                Some(Ty::Payload) => {
                    report.push(Diagnostic::error(
                        RuleId::TypeMismatch,
                        value.span(),
                        "payload constants can only appear as a message body",
                    ));
                    None
                }
                None => None,
            }
        }
    }
}
