//! Exhaustive safety checking over the bounded schedule tree.
//!
//! The tree is walked depth-first, one worker per first schedule element.
//! Prefixes share their execution, so each tree node costs a single step.
//! The reported counterexample is the shortest one, ties broken by
//! enumeration order, whatever the number of workers: a worker that finds
//! a violation of length `L` stops looking at schedules of length `>= L`,
//! and all workers skip schedules longer than the best length found so far.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{bound_text, witness_trace, Alphabet, PredKind, Predicate, PropError, Verdict, Witness};
use crate::runtime::{successor, CState, ContractInstance, ScheduleElem};

/// Checks that `pred` holds on the pre- and post-state of every step of
/// every schedule of length `<= depth`, using the global thread pool.
pub fn check_safe(inst: &ContractInstance, pred: &Predicate, a: &Alphabet, depth: usize) -> Result<Verdict, PropError> {
    check_safe_with_jobs(inst, pred, a, depth, None)
}

/// [`check_safe`] on a dedicated pool of `jobs` workers. The verdict does not
/// depend on `jobs`.
pub fn check_safe_with_jobs(
    inst: &ContractInstance,
    pred: &Predicate,
    a: &Alphabet,
    depth: usize,
    jobs: Option<usize>,
) -> Result<Verdict, PropError> {
    pred.require(PredKind::State)?;
    let bound = bound_text(a, depth);
    let state0 = &inst.state0;
    if !pred.holds_state(state0) {
        return Ok(violation(inst, pred, Vec::new(), bound));
    }
    if depth == 0 {
        return Ok(Verdict::Holds { schedules_checked: 1, steps_executed: 0, premise_states: None, bound });
    }
    if a.is_empty() {
        return Ok(Verdict::Inconclusive { reason: "the alphabet has no elements; only the empty schedule was checked".into() });
    }

    let search = Search { inst, pred, elems: a.elements(), depth, best_len: AtomicUsize::new(usize::MAX) };
    let run = || {
        (0..search.elems.len())
            .into_par_iter()
            .map(|first| {
                let mut part = Partition::default();
                let mut path = Vec::with_capacity(depth);
                search.visit(state0, first, &mut path, &mut part);
                part
            })
            .collect::<Vec<_>>()
    };
    let parts = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| PropError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut nodes = 1;
    let mut steps = 0;
    let mut best: Option<Vec<usize>> = None;
    for p in parts {
        nodes += p.nodes;
        steps += p.steps;
        if let Some(b) = p.best {
            if best.as_ref().is_none_or(|cur| (b.len(), &b) < (cur.len(), cur)) {
                best = Some(b);
            }
        }
    }
    Ok(match best {
        Some(path) => {
            let sc = path.iter().map(|&i| search.elems[i].clone()).collect();
            violation(inst, pred, sc, bound)
        }
        None => Verdict::Holds { schedules_checked: nodes, steps_executed: steps, premise_states: None, bound },
    })
}

fn violation(inst: &ContractInstance, pred: &Predicate, schedule: Vec<ScheduleElem>, bound: String) -> Verdict {
    let trace = witness_trace(inst, &inst.state0, &schedule);
    let failing_index = schedule.len().saturating_sub(1);
    let detail = if schedule.is_empty() {
        format!("`{pred}` fails in the initial state")
    } else {
        format!("`{pred}` fails on the post-state of step {failing_index}")
    };
    Verdict::Violated(Box::new(Witness {
        start: inst.state0.clone(),
        schedule,
        trace,
        failing_index,
        continuation_from: None,
        detail,
        bound,
    }))
}

struct Search<'a> {
    inst: &'a ContractInstance,
    pred: &'a Predicate,
    elems: Vec<ScheduleElem>,
    depth: usize,
    /// Length of the shortest violation found by any worker.
    best_len: AtomicUsize,
}

#[derive(Default)]
struct Partition {
    nodes: u64,
    steps: u64,
    /// This worker's best violating schedule, as element indices.
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    fn limit(&self, part: &Partition) -> usize {
        let local = part.best.as_ref().map_or(usize::MAX, |b| b.len() - 1);
        local.min(self.best_len.load(Ordering::Relaxed)).min(self.depth)
    }

    /// Extends `path` by element `i` from `state`. Returns false once this
    /// subtree can no longer improve on the worker's best violation.
    fn visit(&self, state: &CState, i: usize, path: &mut Vec<usize>, part: &mut Partition) -> bool {
        let len = path.len() + 1;
        if len > self.limit(part) {
            return false;
        }
        let e = &self.elems[i];
        let (post, _) = successor(self.inst, state, &e.bc, &e.msg);
        part.nodes += 1;
        part.steps += 1;
        path.push(i);
        if !self.pred.holds_state(&post) {
            part.best = Some(path.clone());
            self.best_len.fetch_min(len, Ordering::Relaxed);
            path.pop();
            return false;
        }
        for j in 0..self.elems.len() {
            if !self.visit(&post, j, path, part) {
                break;
            }
        }
        path.pop();
        true
    }
}
