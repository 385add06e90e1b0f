use super::{CheckReport, Diagnostic, RuleId};
use crate::lang::{ContractDef, BALANCE_FIELD, CHAIN_ASPECTS};

/// Filters may read message components and contract parameters only.
/// Any reference to a field, the balance, or a blockchain aspect is an
/// effect and is rejected.
pub fn check_filter_purity(c: &ContractDef) -> CheckReport {
    let mut report = CheckReport::default();
    for t in &c.transitions {
        let Some(filter) = &t.filter else { continue };
        filter.free_vars(&mut |name, span| {
            let bound = t.params.iter().any(|p| p.name == name) || c.param(name).is_some();
            if bound {
                return;
            }
            let what = if c.field(name).is_some() {
                "field"
            } else if name == BALANCE_FIELD {
                "balance"
            } else if CHAIN_ASPECTS.contains(&name) {
                "blockchain aspect"
            } else {
                return;
            };
            report.push(Diagnostic::error(
                RuleId::FilterEffect,
                span,
                format!("filter of `{}` reads {what} `{name}`; filters may only use message components and contract parameters", t.tag),
            ));
        });
    }
    report
}
