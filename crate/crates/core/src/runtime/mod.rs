//! Contract execution.
//!
//! Protocol mode ([`step_prot`], [`execute`], [`execute0`]) runs one
//! contract against a schedule of environment inputs, one step per
//! incoming message. Network mode ([`run_network`]) wires several
//! contracts together with a shared continuation stack and a step budget.
//!
//! Any failure inside a transition (no matching transition, a missing map
//! key, a malformed outgoing message) is an *exception*: the step has no
//! output and the contract state, balance included, is left unchanged.

mod exec;
mod instance;
pub mod json;
mod lint;
mod network;
mod protocol;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lang::{Address, Message, Uint, Value};

pub use exec::{apply_transition, apply_transition_detailed, Effect, Failure};
pub use instance::{instantiate, ContractInstance};
pub use lint::{absorbed_funds_lint, lint_trace, overdraw_lint, Lint, LintKind};
pub use network::{run_network, NetOutcome, NetworkRun, NetworkState, Node, StackFrame};
pub use protocol::{execute, execute0, step_prot};
pub(crate) use protocol::successor;

/// Method tag of outgoing messages built by `send`.
pub const MAIN_TAG: &str = "main";
/// Method tag of the message produced by `return`.
pub const RETURN_TAG: &str = "return";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("missing contract parameter `{0}`")]
    MissingParam(String),
    #[error("contract parameter `{name}` expects {expected}, got {found}")]
    ParamTypeMismatch { name: String, expected: String, found: String },
    #[error("unknown contract parameter `{0}`")]
    UnknownParam(String),
    #[error("initializer of field `{field}` failed: {reason}")]
    FieldInit { field: String, reason: String },
    #[error("no contract or account registered at address {0}")]
    UnknownAddress(Address),
    #[error("address {0} registered twice")]
    DuplicateAddress(Address),
}

/// Mutable fields of a contract in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FieldStore(Vec<(Arc<str>, Value)>);

impl FieldStore {
    pub fn new(entries: Vec<(Arc<str>, Value)>) -> Self {
        FieldStore(entries)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| &**k == name).map(|(_, v)| v)
    }

    /// Overwrites an existing field. Returns false if there is no such field;
    /// the store's domain never changes.
    pub fn set(&mut self, name: &str, value: Value) -> bool {
        match self.0.iter_mut().find(|(k, _)| &**k == name) {
            Some(slot) => {
                slot.1 = value;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Concrete contract state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CState {
    pub my_id: Address,
    pub balance: Uint,
    pub fields: FieldStore,
}

impl fmt::Display for CState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bal {} {{", self.my_id, self.balance)?;
        for (i, (k, v)) in self.fields.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{k}: {v}")?;
        }
        f.write_str(" }")
    }
}

/// Blockchain snapshot visible to a transition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BState {
    pub block_num: Uint,
}

impl BState {
    pub fn at(block: u64) -> Self {
        BState { block_num: block.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub pre: CState,
    pub post: CState,
    pub out: Option<Message>,
}

impl Step {
    pub fn identity(st: CState) -> Step {
        Step { pre: st.clone(), post: st, out: None }
    }
}

/// One environment input: a block snapshot and an incoming message.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleElem {
    pub bc: BState,
    pub msg: Message,
}

impl ScheduleElem {
    pub fn new(bc: BState, msg: Message) -> Self {
        ScheduleElem { bc, msg }
    }
}

pub type Schedule = Vec<ScheduleElem>;
pub type Trace = Vec<Step>;
