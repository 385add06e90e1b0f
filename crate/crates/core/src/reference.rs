//! Hand-written crowdfunding model, independent of the interpreter.
//!
//! Each transfer function is a direct transcription of the campaign's
//! intended behaviour over a plain Rust state record. Tests run the parsed
//! corpus contract and this model side by side and require identical traces.

use std::sync::Arc;

use crate::lang::{Address, MapValue, Message, Payload, Tag, Uint, Value};
use crate::runtime::{BState, CState, FieldStore, ScheduleElem, Step, MAIN_TAG};

pub const DONATE_TAG: &str = "donate";
pub const GETFUNDS_TAG: &str = "getfunds";
pub const CLAIM_TAG: &str = "claim";

/// Application state: the immutable parameters alongside the two fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrowdState {
    pub owner: Address,
    pub max_block: Uint,
    pub goal: Uint,
    /// Newest backer first.
    pub backers: Vec<(Address, Uint)>,
    pub funded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefCState {
    pub my_id: Address,
    pub balance: Uint,
    pub state: CrowdState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefStep {
    pub pre: RefCState,
    pub post: RefCState,
    pub out: Option<Message>,
}

type TransferFn = fn(&Address, &Uint, &CrowdState, &Message, &BState) -> (CrowdState, Option<Message>);

fn reply(val: Uint, id: &Address, to: &Address, body: Payload) -> Option<Message> {
    Some(Message::new(val, id.clone(), to.clone(), Tag::new(MAIN_TAG).unwrap(), body))
}

fn donate_fun(id: &Address, _bal: &Uint, s: &CrowdState, m: &Message, bc: &BState) -> (CrowdState, Option<Message>) {
    if m.method.as_str() != DONATE_TAG {
        return (s.clone(), None);
    }
    let nxt_block = &bc.block_num + &Uint::from(1);
    let from = &m.sender;
    if s.max_block <= nxt_block {
        (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg))
    } else if s.backers.iter().all(|(b, _)| b != from) {
        let mut s2 = s.clone();
        s2.backers.insert(0, (from.clone(), m.val.clone()));
        (s2, reply(Uint::zero(), id, from, Payload::OkMsg))
    } else {
        (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg))
    }
}

fn getfunds_fun(id: &Address, bal: &Uint, s: &CrowdState, m: &Message, bc: &BState) -> (CrowdState, Option<Message>) {
    let from = &m.sender;
    if !(m.method.as_str() == GETFUNDS_TAG && *from == s.owner) {
        return (s.clone(), None);
    }
    let blk = &bc.block_num + &Uint::from(1);
    if s.max_block < blk {
        if s.goal <= *bal {
            let mut s2 = s.clone();
            s2.funded = true;
            (s2, reply(bal.clone(), id, from, Payload::OkMsg))
        } else {
            (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg))
        }
    } else {
        (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg))
    }
}

fn claim_fun(id: &Address, bal: &Uint, s: &CrowdState, m: &Message, bc: &BState) -> (CrowdState, Option<Message>) {
    let from = &m.sender;
    if m.method.as_str() != CLAIM_TAG {
        return (s.clone(), None);
    }
    if bc.block_num <= s.max_block {
        // too early
        return (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg));
    }
    if s.funded || s.goal <= *bal {
        return (s.clone(), reply(Uint::zero(), id, from, Payload::NoMsg));
    }
    match s.backers.iter().position(|(b, _)| b == from) {
        Some(n) => {
            let v = s.backers[n].1.clone();
            let mut s2 = s.clone();
            s2.backers.retain(|(b, _)| b != from);
            (s2, reply(v, id, from, Payload::OkMsg))
        }
        // never backed, or already refunded
        None => (s.clone(), None),
    }
}

const TRANSITIONS: [(&str, TransferFn); 3] =
    [(DONATE_TAG, donate_fun), (GETFUNDS_TAG, getfunds_fun), (CLAIM_TAG, claim_fun)];

/// The campaign as deployed: address, initial balance and initial state.
#[derive(Clone, Debug)]
pub struct Crowdfunding {
    pub id: Address,
    pub init_bal: Uint,
    pub init: CrowdState,
}

impl Crowdfunding {
    pub fn new(id: Address, init_bal: Uint, owner: Address, max_block: Uint, goal: Uint) -> Self {
        Crowdfunding {
            id,
            init_bal,
            init: CrowdState { owner, max_block, goal, backers: Vec::new(), funded: false },
        }
    }

    /// Same deployment as [`crate::corpus::crowdfunding_instance`].
    pub fn corpus() -> Self {
        Crowdfunding::new(Address::new("C"), Uint::zero(), Address::new("A0"), 10.into(), 100.into())
    }

    pub fn state0(&self) -> RefCState {
        RefCState { my_id: self.id.clone(), balance: self.init_bal.clone(), state: self.init.clone() }
    }

    pub fn apply_transition(
        &self,
        id: &Address,
        bal: &Uint,
        s: &CrowdState,
        m: &Message,
        bc: &BState,
    ) -> (CrowdState, Option<Message>) {
        match TRANSITIONS.iter().find(|(tag, _)| *tag == m.method.as_str()) {
            Some((_, f)) => f(id, bal, s, m, bc),
            None => (s.clone(), None),
        }
    }

    pub fn step_prot(&self, pre: &RefCState, bc: &BState, m: &Message) -> RefStep {
        let (s2, out) = self.apply_transition(&pre.my_id, &pre.balance, &pre.state, m, bc);
        let bal2 = match &out {
            Some(o) => (&pre.balance + &m.val).monus(&o.val),
            None => pre.balance.clone(),
        };
        let post = RefCState { my_id: pre.my_id.clone(), balance: bal2, state: s2 };
        RefStep { pre: pre.clone(), post, out }
    }

    pub fn execute(&self, pre: &RefCState, sc: &[ScheduleElem]) -> Vec<RefStep> {
        let mut cur = pre.clone();
        let mut trace = Vec::with_capacity(sc.len());
        for e in sc {
            let st = self.step_prot(&cur, &e.bc, &e.msg);
            cur = st.post.clone();
            trace.push(st);
        }
        trace
    }

    pub fn execute0(&self, sc: &[ScheduleElem]) -> Vec<RefStep> {
        if sc.is_empty() {
            let s0 = self.state0();
            vec![RefStep { pre: s0.clone(), post: s0, out: None }]
        } else {
            self.execute(&self.state0(), sc)
        }
    }
}

/// Views a model state through the interpreter's field store layout.
pub fn project(s: &RefCState) -> CState {
    let backers = MapValue::from_entries(s.state.backers.iter().cloned());
    CState {
        my_id: s.my_id.clone(),
        balance: s.balance.clone(),
        fields: FieldStore::new(vec![
            (Arc::from("backers"), Value::Map(backers)),
            (Arc::from("funded"), Value::Bool(s.state.funded)),
        ]),
    }
}

pub fn project_step(s: &RefStep) -> Step {
    Step { pre: project(&s.pre), post: project(&s.post), out: s.out.clone() }
}

pub fn project_trace(t: &[RefStep]) -> Vec<Step> {
    t.iter().map(project_step).collect()
}
