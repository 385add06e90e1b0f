use super::{CheckReport, Diagnostic, RuleId};
use crate::lang::{ContractDef, SourceSpan};

/// Transition and continuation names share one namespace and must be
/// pairwise distinct. Each repeated occurrence is reported against the first.
pub fn check_unique_tags(c: &ContractDef) -> CheckReport {
    let mut report = CheckReport::default();
    let mut seen: Vec<(&str, SourceSpan)> = Vec::new();
    let all = c
        .transitions
        .iter()
        .map(|t| (t.tag.as_str(), t.span.0))
        .chain(c.continuations.iter().map(|k| (k.name.as_str(), k.span.0)));
    for (tag, span) in all {
        match seen.iter().find(|(t, _)| *t == tag) {
            Some(&(_, first)) => report.push(
                Diagnostic::error(RuleId::UniqueTags, span, format!("duplicate tag `{tag}`")).with_related(first),
            ),
            None => seen.push((tag, span)),
        }
    }
    report
}
