use super::{apply_transition, BState, CState, ContractInstance, ScheduleElem, Step, Trace};
use crate::lang::Message;

/// One protocol step. The incoming funds are kept only when the transition
/// produced an output; the outgoing amount is then deducted with monus.
pub fn step_prot(inst: &ContractInstance, pre: &CState, bc: &BState, m: &Message) -> Step {
    let (post, out) = successor(inst, pre, bc, m);
    Step { pre: pre.clone(), post, out }
}

/// Post-state and output of [`step_prot`] without copying the pre-state.
pub(crate) fn successor(inst: &ContractInstance, pre: &CState, bc: &BState, m: &Message) -> (CState, Option<Message>) {
    let (fields, out) = apply_transition(inst, &pre.balance, &pre.fields, m, bc);
    let balance = match &out {
        Some(o) => (&pre.balance + &m.val).monus(&o.val),
        None => pre.balance.clone(),
    };
    (CState { my_id: pre.my_id.clone(), balance, fields }, out)
}

/// Folds [`step_prot`] over a schedule; the empty schedule gives the empty trace.
pub fn execute(inst: &ContractInstance, pre: &CState, sc: &[ScheduleElem]) -> Trace {
    let mut trace = Vec::with_capacity(sc.len());
    let mut cur = pre.clone();
    for e in sc {
        let step = step_prot(inst, &cur, &e.bc, &e.msg);
        cur = step.post.clone();
        trace.push(step);
    }
    trace
}

/// Like [`execute`] from the initial state, except that the empty schedule
/// yields a single identity step rather than an empty trace.
pub fn execute0(inst: &ContractInstance, sc: &[ScheduleElem]) -> Trace {
    if sc.is_empty() {
        vec![Step::identity(inst.state0.clone())]
    } else {
        execute(inst, &inst.state0, sc)
    }
}
