//! Well-formedness checks run before a contract is instantiated.
//!
//! Each check is a pure function from a [`ContractDef`] to a [`CheckReport`];
//! [`check_contract`] runs all of them. A contract is accepted iff the merged
//! report has no error-severity diagnostics.

mod filters;
mod tags;
mod tail;
mod types;

use std::fmt;

use crate::lang::{ContractDef, SourceSpan};

pub use filters::check_filter_purity;
pub use tags::check_unique_tags;
pub use tail::check_tail_position;
pub use types::typecheck;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    UniqueTags,
    FilterEffect,
    TailPosition,
    TypeMismatch,
    UnboundVariable,
    UnknownField,
    BalanceWrite,
    FieldInit,
    Shadowing,
    DuplicateName,
    ReservedName,
    UnknownContinuation,
    UnknownChainAspect,
    UnknownMsgComponent,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::UniqueTags => "UNIQUE_TAGS",
            RuleId::FilterEffect => "FILTER_EFFECT",
            RuleId::TailPosition => "TAIL_POSITION",
            RuleId::TypeMismatch => "TYPE_MISMATCH",
            RuleId::UnboundVariable => "UNBOUND_VARIABLE",
            RuleId::UnknownField => "UNKNOWN_FIELD",
            RuleId::BalanceWrite => "BALANCE_WRITE",
            RuleId::FieldInit => "FIELD_INIT",
            RuleId::Shadowing => "SHADOWING",
            RuleId::DuplicateName => "DUPLICATE_NAME",
            RuleId::ReservedName => "RESERVED_NAME",
            RuleId::UnknownContinuation => "UNKNOWN_CONTINUATION",
            RuleId::UnknownChainAspect => "UNKNOWN_CHAIN_ASPECT",
            RuleId::UnknownMsgComponent => "UNKNOWN_MSG_COMPONENT",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub severity: Severity,
    pub rule: RuleId,
    pub message: String,
    /// Secondary location, e.g. the first definition of a duplicated tag.
    pub related: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(rule: RuleId, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic { span, severity: Severity::Error, rule, message: message.into(), related: None }
    }

    pub fn with_related(mut self, span: SourceSpan) -> Self {
        self.related = Some(span);
        self
    }

    /// `file:line:col: severity[RULE]: message`
    pub fn render(&self, file: &str) -> String {
        let mut s = format!(
            "{file}:{}:{}: {}[{}]: {}",
            self.span.line, self.span.column, self.severity, self.rule, self.message
        );
        if let Some(r) = self.related {
            s.push_str(&format!(" (see {file}:{}:{})", r.line, r.column));
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn push(&mut self, d: Diagnostic) {
        self.diagnostics.push(d);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.diagnostics.extend(other.diagnostics);
    }

    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn with_rule(&self, rule: RuleId) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(move |d| d.rule == rule)
    }

    pub fn render(&self, file: &str) -> String {
        self.diagnostics.iter().map(|d| d.render(file) + "\n").collect()
    }
}

/// Runs every check and returns diagnostics sorted by position.
pub fn check_contract(c: &ContractDef) -> CheckReport {
    let mut report = CheckReport::default();
    report.extend(check_unique_tags(c));
    report.extend(check_filter_purity(c));
    report.extend(check_tail_position(c));
    report.extend(typecheck(c));
    report.diagnostics.sort_by(|a, b| {
        (a.span.line, a.span.column, a.rule, &a.message).cmp(&(b.span.line, b.span.column, b.rule, &b.message))
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_contract;

    #[test]
    fn render_format() {
        let d = Diagnostic::error(RuleId::UniqueTags, SourceSpan::new(3, 1, 10), "duplicate tag `Donate`")
            .with_related(SourceSpan::new(1, 1, 10));
        assert_eq!(
            d.render("c.scilla"),
            "c.scilla:3:1: error[UNIQUE_TAGS]: duplicate tag `Donate` (see c.scilla:1:1)"
        );
    }

    #[test]
    fn checks_are_order_independent() {
        let src = "contract C (owner : address) { f : uint = 0; owner : uint = x; }
            transition A (sender : address, value : uint, tag : string)
              if f == 0 => f := true;
            transition A (sender : address, zz : uint)
              if tag == \"a\" then send (<to -> sender, amount -> 0, tag -> \"main\">, K) else return true";
        let c = parse_contract(src).unwrap();
        let runs: [fn(&ContractDef) -> CheckReport; 4] = [check_unique_tags, check_filter_purity, check_tail_position, typecheck];
        let collect = |order: &[usize]| {
            let mut all: Vec<Diagnostic> = order.iter().flat_map(|&i| runs[i](&c).diagnostics).collect();
            all.sort();
            all
        };
        let base = collect(&[0, 1, 2, 3]);
        assert!(base.len() >= 6, "{base:#?}");
        for order in [[3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]] {
            assert_eq!(collect(&order), base);
        }
    }
}
