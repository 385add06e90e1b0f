//! Bounded verification of contract properties.
//!
//! Quantification over all schedules is replaced by enumeration over a
//! finite [`Alphabet`] of (block, message) pairs up to a depth bound. Every
//! verdict states its bound; a `Holds` verdict says nothing about longer
//! schedules or inputs outside the alphabet.

mod builtins;
mod enumerate;
mod inductive;
pub mod json;
mod predicate;
mod safe;
mod temporal;

use thiserror::Error;

use crate::lang::{Address, Message, Payload, Tag, Uint};
use crate::runtime::{BState, CState, ScheduleElem, Step};

pub use builtins::{builtin_predicates, Builtin, BuiltinRegistry};
pub use enumerate::{enumerate_schedules, schedule_count, Schedules};
pub use inductive::{check_safe_inductive, StateGenerator, DEFAULT_SEED};
pub use predicate::{PredKind, Predicate};
pub use safe::{check_safe, check_safe_with_jobs};
pub use temporal::{check_can_claim_back, check_since_as_long, reachable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PropError {
    #[error("predicate syntax error at offset {offset}: {message}")]
    PredicateParse { offset: usize, message: String },
    #[error("predicate type error: {0}")]
    PredicateTypeError(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` expects {expected} argument(s), got {found}")]
    PredicateArity { name: String, expected: usize, found: usize },
    #[error("state generator gave up after {attempts} attempts without satisfying the invariant")]
    GeneratorExhausted { attempts: u64 },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

/// Finite input space: every schedule element pairs one block state with one message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub bstates: Vec<BState>,
    pub messages: Vec<Message>,
}

impl Alphabet {
    pub fn new(bstates: Vec<BState>, messages: Vec<Message>) -> Self {
        Alphabet { bstates, messages }
    }

    /// Number of distinct schedule elements.
    pub fn len(&self) -> usize {
        self.bstates.len() * self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element `i` in enumeration order: block-major, message-minor.
    pub fn elem(&self, i: usize) -> ScheduleElem {
        let n = self.messages.len();
        ScheduleElem::new(self.bstates[i / n].clone(), self.messages[i % n].clone())
    }

    pub fn elements(&self) -> Vec<ScheduleElem> {
        (0..self.len()).map(|i| self.elem(i)).collect()
    }

    /// The same alphabet minus every message with method `tag`.
    pub fn without_tag(&self, tag: &str) -> Alphabet {
        let messages = self.messages.iter().filter(|m| m.method.as_str() != tag).cloned().collect();
        Alphabet { bstates: self.bstates.clone(), messages }
    }

    /// The standard crowdfunding alphabet: blocks 1, 10 and 11 around the
    /// deadline, and every message from A1, A2 or the owner A0 carrying 0 or
    /// 5 with tag donate, getfunds or claim, addressed to `to`.
    pub fn astar(to: &Address) -> Alphabet {
        let bstates = [1u64, 10, 11].into_iter().map(BState::at).collect();
        let mut messages = Vec::with_capacity(18);
        for sender in ["A1", "A2", "A0"] {
            for val in [0u64, 5] {
                for tag in ["donate", "getfunds", "claim"] {
                    messages.push(Message::new(
                        Uint::from(val),
                        Address::new(sender),
                        to.clone(),
                        Tag::new(tag).unwrap(),
                        Payload::Text(String::new()),
                    ));
                }
            }
        }
        Alphabet { bstates, messages }
    }
}

/// Replayable counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// State the schedule runs from: the initial state, or a generated state
    /// in inductive mode.
    pub start: CState,
    pub schedule: Vec<ScheduleElem>,
    /// The trace of `schedule` from `start` (the identity step when empty).
    pub trace: Vec<Step>,
    /// Index of the step at which the property fails.
    pub failing_index: usize,
    /// For temporal properties, where the continuation part of the schedule begins.
    pub continuation_from: Option<usize>,
    pub detail: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds {
        /// Schedules (or state/continuation pairs) examined.
        schedules_checked: u64,
        /// Protocol steps executed.
        steps_executed: u64,
        /// States satisfying the property's premise, when it has one.
        premise_states: Option<u64>,
        bound: String,
    },
    Violated(Box<Witness>),
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Violated(w) => Some(w),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Holds { .. } => "holds",
            Verdict::Violated(_) => "violated",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Trace of a witness schedule: the identity step for the empty schedule.
pub(crate) fn witness_trace(inst: &crate::runtime::ContractInstance, start: &CState, sc: &[ScheduleElem]) -> Vec<Step> {
    if sc.is_empty() {
        vec![Step::identity(start.clone())]
    } else {
        crate::runtime::execute(inst, start, sc)
    }
}

pub(crate) fn bound_text(a: &Alphabet, depth: usize) -> String {
    format!("schedules of length <= {depth} over {} alphabet elements", a.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn astar_shape() {
        let a = Alphabet::astar(&Address::new("C"));
        assert_eq!(a.messages.len(), 18);
        assert_eq!(a.len(), 54);
        assert_eq!(a.elem(0).bc, BState::at(1));
        assert_eq!(a.elem(18).bc, BState::at(10));
        assert_eq!(a.elem(53).msg.sender, Address::new("A0"));
        assert_eq!(a.without_tag("claim").len(), 36);
    }
}
