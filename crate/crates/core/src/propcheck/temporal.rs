//! Two-state temporal properties checked by breadth-first exploration.
//!
//! Both checks first collect the states reachable from the initial state
//! within a depth bound, deduplicated, each with a shortest schedule that
//! reaches it. The checks then quantify over those states.

use std::collections::HashMap;

use super::{bound_text, witness_trace, Alphabet, PredKind, Predicate, PropError, Verdict, Witness};
use crate::lang::{Address, Message, Payload, Tag, Uint};
use crate::runtime::{execute, successor, BState, CState, ContractInstance, ScheduleElem, MAIN_TAG};

/// Whether running `sc` from `st` ends in `st2`. The empty schedule
/// reaches exactly `st`.
pub fn reachable(inst: &ContractInstance, st: &CState, st2: &CState, sc: &[ScheduleElem]) -> bool {
    match execute(inst, st, sc).last() {
        Some(step) if !sc.is_empty() => step.post == *st2,
        _ => st == st2,
    }
}

struct Node {
    state: CState,
    /// Predecessor node and the element index that led here.
    parent: Option<(usize, usize)>,
}

/// Distinct states reachable from `root` in at most `depth` steps, in
/// breadth-first order, so the path to each node is a shortest one.
struct Reach {
    nodes: Vec<Node>,
    steps: u64,
}

impl Reach {
    fn explore(inst: &ContractInstance, root: CState, elems: &[ScheduleElem], depth: usize) -> Reach {
        let mut index: HashMap<CState, usize> = HashMap::new();
        index.insert(root.clone(), 0);
        let mut nodes = vec![Node { state: root, parent: None }];
        let mut steps = 0;
        let mut frontier = 0..1;
        for _ in 0..depth {
            let start = nodes.len();
            for n in frontier.clone() {
                for (i, e) in elems.iter().enumerate() {
                    let (post, _) = successor(inst, &nodes[n].state, &e.bc, &e.msg);
                    steps += 1;
                    if !index.contains_key(&post) {
                        index.insert(post.clone(), nodes.len());
                        nodes.push(Node { state: post, parent: Some((n, i)) });
                    }
                }
            }
            if nodes.len() == start {
                break;
            }
            frontier = start..nodes.len();
        }
        Reach { nodes, steps }
    }

    fn path(&self, mut n: usize, elems: &[ScheduleElem]) -> Vec<ScheduleElem> {
        let mut out = Vec::new();
        while let Some((p, i)) = self.nodes[n].parent {
            out.push(elems[i].clone());
            n = p;
        }
        out.reverse();
        out
    }
}

fn temporal_witness(
    inst: &ContractInstance,
    prefix: Vec<ScheduleElem>,
    cont: Vec<ScheduleElem>,
    detail: String,
    bound: String,
) -> Verdict {
    let continuation_from = Some(prefix.len());
    let mut schedule = prefix;
    schedule.extend(cont);
    let trace = witness_trace(inst, &inst.state0, &schedule);
    Verdict::Violated(Box::new(Witness {
        start: inst.state0.clone(),
        failing_index: trace.len() - 1,
        schedule,
        trace,
        continuation_from,
        detail,
        bound,
    }))
}

/// Checks that from every state satisfying `p` reachable within
/// `reach_depth` steps, every continuation of at most `cont_depth` elements
/// that all satisfy `r` leads to a state `st2` with `q(st, st2)`.
///
/// `q` is a step predicate over the pair (p-state, later state), so `pre.x`
/// refers to the state where `p` held. Continuations include the empty one.
pub fn check_since_as_long(
    inst: &ContractInstance,
    p: &Predicate,
    q: &Predicate,
    r: &Predicate,
    a: &Alphabet,
    reach_depth: usize,
    cont_depth: usize,
) -> Result<Verdict, PropError> {
    p.require(PredKind::State)?;
    q.require(PredKind::Step)?;
    r.require(PredKind::Elem)?;
    let bound = format!(
        "reach: {}; continuation: schedules of length <= {cont_depth}",
        bound_text(a, reach_depth)
    );
    let elems = a.elements();
    let allowed: Vec<ScheduleElem> = elems.iter().filter(|e| r.holds_elem(e)).cloned().collect();
    let reach = Reach::explore(inst, inst.state0.clone(), &elems, reach_depth);

    let mut premise = 0u64;
    let mut checked = 0u64;
    let mut steps = reach.steps;
    for (n, node) in reach.nodes.iter().enumerate() {
        if !p.holds_state(&node.state) {
            continue;
        }
        premise += 1;
        let cont = Reach::explore(inst, node.state.clone(), &allowed, cont_depth);
        steps += cont.steps;
        for (c, later) in cont.nodes.iter().enumerate() {
            checked += 1;
            if !q.holds_step(&node.state, &later.state) {
                let detail = format!("`{p}` held, every later input satisfied `{r}`, yet `{q}` failed");
                return Ok(temporal_witness(inst, reach.path(n, &elems), cont.path(c, &allowed), detail, bound));
            }
        }
    }
    Ok(Verdict::Holds { schedules_checked: checked, steps_executed: steps, premise_states: Some(premise), bound })
}

/// Checks that a backer `b` who donated `d` can get it back: in every
/// reachable state where `b` has a record of exactly `d`, the campaign is
/// not funded and below its goal, and at every block of `a` past the
/// deadline, some message from `b` in `a` yields a refund of `d` to `b`.
pub fn check_can_claim_back(
    inst: &ContractInstance,
    b: &Address,
    d: &Uint,
    a: &Alphabet,
    depth: usize,
) -> Result<Verdict, PropError> {
    let state_premise = Predicate::compile(
        &format!("has_entry(backers, \"{b}\", {d}) && !funded && balance < goal"),
        PredKind::State,
        inst,
    )?;
    let block_premise = Predicate::compile("max_block < block_num", PredKind::Elem, inst)?;
    let refund = Message::new(d.clone(), inst.id().clone(), b.clone(), Tag::new(MAIN_TAG).unwrap(), Payload::OkMsg);
    let probe = |bc: &BState| {
        let m = Message::new(Uint::zero(), b.clone(), inst.id().clone(), Tag::new(MAIN_TAG).unwrap(), Payload::Text(String::new()));
        ScheduleElem::new(bc.clone(), m)
    };
    let from_b: Vec<&Message> = a.messages.iter().filter(|m| m.sender == *b).collect();

    let bound = bound_text(a, depth);
    let elems = a.elements();
    let reach = Reach::explore(inst, inst.state0.clone(), &elems, depth);
    let mut premise = 0u64;
    let mut checked = 0u64;
    let mut steps = reach.steps;
    for (n, node) in reach.nodes.iter().enumerate() {
        if !state_premise.holds_state(&node.state) {
            continue;
        }
        for bc in a.bstates.iter().filter(|bc| block_premise.holds_elem(&probe(bc))) {
            premise += 1;
            let mut refunded = false;
            for m in &from_b {
                checked += 1;
                steps += 1;
                if successor(inst, &node.state, bc, m).1.as_ref() == Some(&refund) {
                    refunded = true;
                    break;
                }
            }
            if !refunded {
                let attempt = from_b.first().map(|m| ScheduleElem::new(bc.clone(), (*m).clone()));
                let detail = format!(
                    "{b} has a record of {d} after the deadline (block {}), but no message from {b} refunds it",
                    bc.block_num
                );
                return Ok(temporal_witness(inst, reach.path(n, &elems), attempt.into_iter().collect(), detail, bound));
            }
        }
    }
    Ok(Verdict::Holds { schedules_checked: checked, steps_executed: steps, premise_states: Some(premise), bound })
}
