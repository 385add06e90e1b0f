//! Several contracts talking to each other through one continuation stack.

use super::exec::{apply_transition_detailed, return_message, run_continuation, Effect, Failure};
use super::{BState, CState, ContractInstance, RuntimeError, Step};
use crate::lang::{Address, Message, Uint, Value};

#[derive(Clone, Debug)]
pub struct Node {
    pub inst: ContractInstance,
    pub state: CState,
}

/// A continuation waiting for a callee to return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackFrame {
    pub contract: Address,
    pub continuation: String,
}

#[derive(Clone, Debug)]
pub struct NetworkState {
    pub nodes: Vec<Node>,
    /// Plain accounts: messages to them are delivered and end there.
    pub accounts: Vec<Address>,
    pub stack: Vec<StackFrame>,
}

impl NetworkState {
    pub fn new(contracts: Vec<ContractInstance>, accounts: Vec<Address>) -> Result<Self, RuntimeError> {
        let mut seen: Vec<&Address> = Vec::new();
        for a in contracts.iter().map(|c| c.id()).chain(&accounts) {
            if seen.contains(&a) {
                return Err(RuntimeError::DuplicateAddress(a.clone()));
            }
            seen.push(a);
        }
        let nodes = contracts.into_iter().map(|inst| Node { state: inst.state0.clone(), inst }).collect();
        Ok(NetworkState { nodes, accounts, stack: Vec::new() })
    }

    pub fn node(&self, id: &Address) -> Option<&Node> {
        self.nodes.iter().find(|n| n.inst.id() == id)
    }

    fn node_index(&self, id: &Address) -> Option<usize> {
        self.nodes.iter().position(|n| n.inst.id() == id)
    }

    fn is_account(&self, id: &Address) -> bool {
        self.accounts.contains(id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetOutcome {
    /// Nothing pending and the stack is empty.
    Completed,
    /// The budget ran out with work still pending.
    BudgetExhausted,
    /// Nothing pending, but continuations are still waiting for a return
    /// that will never come (after an exception, or a call to a plain account).
    Stuck { waiting: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkRun {
    /// Contract steps in execution order, across all contracts.
    pub steps: Vec<Step>,
    /// Messages that reached plain accounts.
    pub delivered: Vec<Message>,
    /// Exceptions raised during the run, one line each.
    pub faults: Vec<String>,
    pub outcome: NetOutcome,
}

enum Pending {
    Deliver(Message),
    Resume(StackFrame, Value),
}

/// Runs `initial` to completion or until `budget` contract steps have been
/// taken. Deliveries to plain accounts cost nothing.
pub fn run_network(
    net: &mut NetworkState,
    initial: Message,
    bc: &BState,
    budget: u64,
) -> Result<NetworkRun, RuntimeError> {
    if net.node_index(&initial.to).is_none() {
        return Err(RuntimeError::UnknownAddress(initial.to.clone()));
    }
    let mut run = NetworkRun { steps: Vec::new(), delivered: Vec::new(), faults: Vec::new(), outcome: NetOutcome::Completed };
    let mut pending = Some(Pending::Deliver(initial));

    while let Some(p) = pending.take() {
        if let Pending::Deliver(m) = &p {
            if net.node_index(&m.to).is_none() {
                run.delivered.push(m.clone());
                continue;
            }
        }
        if run.steps.len() as u64 >= budget {
            run.outcome = NetOutcome::BudgetExhausted;
            return Ok(run);
        }

        let (idx, incoming_val, result, reply_to) = match &p {
            Pending::Deliver(m) => {
                let idx = net.node_index(&m.to).expect("checked above");
                let node = &net.nodes[idx];
                let r = apply_transition_detailed(&node.inst, &node.state.balance, &node.state.fields, m, bc);
                (idx, m.val.clone(), r, Some(m.sender.clone()))
            }
            Pending::Resume(frame, v) => {
                let Some(idx) = net.node_index(&frame.contract) else {
                    run.faults.push(format!("continuation owner {} vanished", frame.contract));
                    break;
                };
                let node = &net.nodes[idx];
                let r = run_continuation(&node.inst, &node.state.balance, &node.state.fields, bc, &frame.continuation, v.clone());
                (idx, Uint::zero(), r, None)
            }
        };

        let node = &net.nodes[idx];
        let pre = node.state.clone();
        let outcome = result.and_then(|(fields, effect)| {
            let out = match &effect {
                Effect::Send { msg, .. } => {
                    if net.node_index(&msg.to).is_none() && !net.is_account(&msg.to) {
                        return Err(Failure::BadMessage(format!("no contract or account at {}", msg.to)));
                    }
                    msg.clone()
                }
                Effect::Return(v) => {
                    // a continuation has no caller of its own; answer the contract itself
                    let to = reply_to.clone().unwrap_or_else(|| pre.my_id.clone());
                    return_message(&node.inst, &to, v.clone())?
                }
            };
            Ok((fields, effect, out))
        });

        match outcome {
            Ok((fields, effect, out)) => {
                let balance = (&pre.balance + &incoming_val).monus(&out.val);
                let post = CState { my_id: pre.my_id.clone(), balance, fields };
                net.nodes[idx].state = post.clone();
                run.steps.push(Step { pre, post, out: Some(out.clone()) });
                pending = match effect {
                    Effect::Send { msg, cont } => {
                        if let Some(k) = cont {
                            net.stack.push(StackFrame { contract: msg.sender.clone(), continuation: k });
                        }
                        Some(Pending::Deliver(msg))
                    }
                    Effect::Return(v) => match net.stack.pop() {
                        Some(frame) => Some(Pending::Resume(frame, v)),
                        None => Some(Pending::Deliver(out)),
                    },
                };
            }
            Err(f) => {
                run.faults.push(format!("{}: {f}", pre.my_id));
                run.steps.push(Step::identity(pre));
            }
        }
    }

    run.outcome = if net.stack.is_empty() {
        NetOutcome::Completed
    } else {
        NetOutcome::Stuck { waiting: net.stack.len() }
    };
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lang::{Payload, Tag};
    use crate::runtime::instantiate;

    fn call_pair() -> NetworkState {
        let caller = instantiate(
            corpus::caller(),
            Address::new("Caller"),
            Uint::zero(),
            &[("owner".into(), Value::address("O")), ("server".into(), Value::address("Server"))],
        )
        .unwrap();
        let server = instantiate(corpus::server(), Address::new("Server"), Uint::zero(), &[]).unwrap();
        NetworkState::new(vec![caller, server], vec![Address::new("O")]).unwrap()
    }

    fn call(val: u64) -> Message {
        Message::new(val.into(), Address::new("O"), Address::new("Caller"), Tag::new("call").unwrap(), Payload::Text(String::new()))
    }

    #[test]
    fn caller_server_round_trip() {
        let mut net = call_pair();
        let run = run_network(&mut net, call(10), &BState::at(1), 100).unwrap();
        assert_eq!(run.outcome, NetOutcome::Completed, "{:?}", run.faults);
        assert_eq!(run.steps.len(), 3);
        assert_eq!(run.delivered.len(), 1);
        let m = &run.delivered[0];
        assert_eq!(m.to, Address::new("O"));
        assert_eq!(m.sender, Address::new("Caller"));
        assert_eq!(m.body, Payload::Amount(10.into()));
        // funds ended up with the server
        assert_eq!(net.node(&Address::new("Server")).unwrap().state.balance, Uint::from(10));
        assert!(net.node(&Address::new("Caller")).unwrap().state.balance.is_zero());
        assert!(net.stack.is_empty());
    }

    #[test]
    fn zero_budget_takes_no_steps() {
        let mut net = call_pair();
        let run = run_network(&mut net, call(10), &BState::at(1), 0).unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(run.outcome, NetOutcome::BudgetExhausted);
    }

    #[test]
    fn budget_bounds_the_self_caller() {
        let inst = instantiate(corpus::self_caller(), Address::new("S"), Uint::zero(), &[("me".into(), Value::address("S"))]).unwrap();
        let mut net = NetworkState::new(vec![inst], vec![]).unwrap();
        let m = Message::new(Uint::zero(), Address::new("S"), Address::new("S"), Tag::new("loop").unwrap(), Payload::Text(String::new()));
        let run = run_network(&mut net, m, &BState::at(1), 5).unwrap();
        assert_eq!(run.steps.len(), 5);
        assert_eq!(run.outcome, NetOutcome::BudgetExhausted);
        assert_eq!(net.nodes[0].state.fields.get("count"), Some(&Value::uint(5)));
    }

    #[test]
    fn unknown_addresses() {
        let mut net = call_pair();
        let mut m = call(1);
        m.to = Address::new("Nowhere");
        assert_eq!(run_network(&mut net, m, &BState::at(1), 10).unwrap_err(), RuntimeError::UnknownAddress(Address::new("Nowhere")));

        // caller points at a server that does not exist
        let caller = instantiate(
            corpus::caller(),
            Address::new("Caller"),
            Uint::zero(),
            &[("owner".into(), Value::address("O")), ("server".into(), Value::address("Gone"))],
        )
        .unwrap();
        let mut net = NetworkState::new(vec![caller], vec![Address::new("O")]).unwrap();
        let run = run_network(&mut net, call(3), &BState::at(1), 10).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].pre, run.steps[0].post);
        assert_eq!(run.steps[0].out, None);
        assert_eq!(run.outcome, NetOutcome::Completed);
        assert!(net.stack.is_empty());
        assert_eq!(run.faults.len(), 1);
    }

    #[test]
    fn budget_is_never_exceeded() {
        for budget in 0..8 {
            let mut net = call_pair();
            let run = run_network(&mut net, call(4), &BState::at(1), budget).unwrap();
            assert!(run.steps.len() as u64 <= budget);
        }
    }
}
