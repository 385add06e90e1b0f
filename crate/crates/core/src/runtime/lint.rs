use std::fmt;

use super::{ScheduleElem, Step};
use crate::lang::Message;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LintKind {
    /// The outgoing amount exceeded the funds available, so the balance
    /// update truncated at zero.
    Overdraw,
    /// A refusal kept the incoming funds: state unchanged, an answer was
    /// sent, and the balance went up.
    AbsorbedFunds,
}

impl LintKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LintKind::Overdraw => "OVERDRAW",
            LintKind::AbsorbedFunds => "ABSORBED_FUNDS",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lint {
    pub kind: LintKind,
    pub message: String,
}

impl fmt::Display for Lint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning[{}]: {}", self.kind.as_str(), self.message)
    }
}

pub fn overdraw_lint(step: &Step, m: &Message) -> Option<Lint> {
    let out = step.out.as_ref()?;
    let available = &step.pre.balance + &m.val;
    (out.val > available).then(|| Lint {
        kind: LintKind::Overdraw,
        message: format!("sent {} but only {} was available; balance truncated to 0", out.val, available),
    })
}

pub fn absorbed_funds_lint(step: &Step, m: &Message) -> Option<Lint> {
    step.out.as_ref()?;
    let absorbed = !m.val.is_zero() && step.post.fields == step.pre.fields && step.post.balance > step.pre.balance;
    absorbed.then(|| Lint {
        kind: LintKind::AbsorbedFunds,
        message: format!(
            "incoming {} kept although the state did not change (balance {} -> {})",
            m.val, step.pre.balance, step.post.balance
        ),
    })
}

/// All lints of a trace, keyed by step index.
pub fn lint_trace(trace: &[Step], sc: &[ScheduleElem]) -> Vec<(usize, Lint)> {
    let mut out = Vec::new();
    for (i, (step, e)) in trace.iter().zip(sc).enumerate() {
        out.extend(overdraw_lint(step, &e.msg).map(|l| (i, l)));
        out.extend(absorbed_funds_lint(step, &e.msg).map(|l| (i, l)));
    }
    out
}
