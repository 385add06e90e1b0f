use super::{CheckReport, Diagnostic, RuleId};
use crate::lang::{Cmd, ContractDef, SourceSpan};

/// Every execution path of every body must end in `send` or `return`.
/// One diagnostic per offending path, at the path's last command.
pub fn check_tail_position(c: &ContractDef) -> CheckReport {
    let mut report = CheckReport::default();
    for t in &c.transitions {
        walk(&t.body, t.span.0, &t.tag, &mut report);
    }
    for k in &c.continuations {
        walk(&k.body, k.span.0, &k.name, &mut report);
    }
    report
}

fn walk(cmd: &Cmd, last: SourceSpan, owner: &str, report: &mut CheckReport) {
    match cmd {
        Cmd::FieldRead { rest, span, .. }
        | Cmd::ChainRead { rest, span, .. }
        | Cmd::FieldWrite { rest, span, .. }
        | Cmd::Let { rest, span, .. } => walk(rest, span.0, owner, report),
        Cmd::If { then_branch, else_branch, span, .. } => {
            walk(then_branch, span.0, owner, report);
            walk(else_branch, span.0, owner, report);
        }
        Cmd::Send { .. } | Cmd::Return { .. } => {}
        Cmd::End => report.push(Diagnostic::error(
            RuleId::TailPosition,
            last,
            format!("a path through `{owner}` ends without `send` or `return`"),
        )),
    }
}
