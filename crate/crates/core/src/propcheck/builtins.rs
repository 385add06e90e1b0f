use super::{PredKind, PropError};

/// A named predicate template. `{b}` and `{d}` in the template stand for
/// the backer address and amount arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub kind: PredKind,
    pub params: &'static [&'static str],
    pub template: &'static str,
    pub doc: &'static str,
}

impl Builtin {
    /// Predicate source with the arguments substituted.
    pub fn instantiate(&self, args: &[&str]) -> Result<String, PropError> {
        if args.len() != self.params.len() {
            return Err(PropError::PredicateArity {
                name: self.name.to_string(),
                expected: self.params.len(),
                found: args.len(),
            });
        }
        let mut text = self.template.to_string();
        for (p, a) in self.params.iter().zip(args) {
            text = text.replace(&format!("{{{p}}}"), a);
        }
        Ok(text)
    }
}

#[derive(Clone, Debug)]
pub struct BuiltinRegistry {
    entries: Vec<Builtin>,
}

impl BuiltinRegistry {
    pub fn get(&self, name: &str) -> Result<&Builtin, PropError> {
        self.entries
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| PropError::UnknownPredicate(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Builtin> {
        self.entries.iter()
    }
}

pub fn builtin_predicates() -> BuiltinRegistry {
    BuiltinRegistry {
        entries: vec![
            Builtin {
                name: "balance_backed",
                kind: PredKind::State,
                params: &[],
                template: "!funded -> sum_values(backers) <= balance",
                doc: "while not funded, the balance covers every recorded donation",
            },
            Builtin {
                name: "donated",
                kind: PredKind::State,
                params: &["b", "d"],
                template: "has_entry(backers, \"{b}\", {d})",
                doc: "backer b has exactly one record, of amount d",
            },
            Builtin {
                name: "no_claims_from",
                kind: PredKind::Elem,
                params: &["b"],
                template: "msg.sender != \"{b}\"",
                doc: "the schedule element is not a message from b",
            },
        ],
    }
}
