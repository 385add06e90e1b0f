//! Inductive safety checking from sampled states.
//!
//! Instead of exploring from the initial state, draw random states that
//! satisfy the invariant and check that one step from each of them keeps
//! it. A counterexample here may start from an unreachable state, so a
//! violation shows the invariant is not inductive, not that it can fail.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::{witness_trace, Alphabet, PredKind, Predicate, PropError, Verdict, Witness};
use crate::lang::{Address, MapValue, Type, Uint, Value};
use crate::runtime::{successor, CState, ContractInstance, FieldStore};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5c11_1a00_c0de;

/// Attempts allowed per requested sample before giving up.
const ATTEMPTS_PER_SAMPLE: u64 = 100;

/// Draws contract states with the field layout of an instance.
///
/// Numbers fall in `0..=2 * m` where `m` is the largest uint parameter (at
/// least 1), and maps hold up to three distinct keys drawn from the
/// alphabet's senders and the instance's address parameters.
#[derive(Clone, Debug)]
pub struct StateGenerator {
    my_id: Address,
    layout: Vec<(Arc<str>, Type)>,
    max_uint: u64,
    addresses: Vec<Address>,
    strings: Vec<String>,
}

impl StateGenerator {
    pub fn new(inst: &ContractInstance, a: &Alphabet) -> StateGenerator {
        let layout = inst
            .state0
            .fields
            .iter()
            .map(|(k, v)| (Arc::from(k), v.ty()))
            .collect();
        let mut max_uint = 1u64;
        let mut addresses: Vec<Address> = Vec::new();
        for (_, v) in inst.params.iter() {
            match v {
                Value::Uint(u) => max_uint = max_uint.max(u.to_u64().unwrap_or(u64::MAX / 2)),
                Value::Address(ad) => addresses.push(ad.clone()),
                _ => {}
            }
        }
        for m in &a.messages {
            addresses.push(m.sender.clone());
        }
        addresses.sort();
        addresses.dedup();
        if addresses.is_empty() {
            addresses.push(inst.id().clone());
        }
        StateGenerator {
            my_id: inst.id().clone(),
            layout,
            max_uint: max_uint.saturating_mul(2),
            addresses,
            strings: vec![String::new(), "a".into()],
        }
    }

    fn uint<R: Rng>(&self, rng: &mut R) -> Uint {
        Uint::from(rng.gen_range(0..=self.max_uint))
    }

    fn value<R: Rng>(&self, ty: Type, rng: &mut R) -> Value {
        match ty {
            Type::Uint => Value::Uint(self.uint(rng)),
            Type::Bool => Value::Bool(rng.gen()),
            Type::Address => Value::Address(self.addresses.choose(rng).unwrap().clone()),
            Type::Str => Value::Str(self.strings.choose(rng).unwrap().clone()),
            Type::Map => {
                let n = rng.gen_range(0..=3.min(self.addresses.len()));
                let keys = self.addresses.choose_multiple(rng, n);
                Value::Map(MapValue::from_entries(keys.map(|k| (k.clone(), self.uint(rng))).collect::<Vec<_>>()))
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> CState {
        let fields = self.layout.iter().map(|(k, ty)| (k.clone(), self.value(*ty, rng))).collect();
        CState { my_id: self.my_id.clone(), balance: self.uint(rng), fields: FieldStore::new(fields) }
    }
}

/// Checks `pred` on the initial state, then on the successor of `samples`
/// random states satisfying `pred` under every element of `a`.
pub fn check_safe_inductive(
    inst: &ContractInstance,
    pred: &Predicate,
    gen: &StateGenerator,
    a: &Alphabet,
    samples: u64,
    seed: u64,
) -> Result<Verdict, PropError> {
    pred.require(PredKind::State)?;
    let bound = format!("{samples} sampled states (seed {seed}), one step over {} alphabet elements", a.len());
    if !pred.holds_state(&inst.state0) {
        return Ok(Verdict::Violated(Box::new(Witness {
            start: inst.state0.clone(),
            schedule: Vec::new(),
            trace: witness_trace(inst, &inst.state0, &[]),
            failing_index: 0,
            continuation_from: None,
            detail: format!("`{pred}` fails in the initial state"),
            bound,
        })));
    }
    if a.is_empty() && samples > 0 {
        return Ok(Verdict::Inconclusive { reason: "the alphabet has no elements; no step can be checked".into() });
    }

    let elems = a.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = samples.saturating_mul(ATTEMPTS_PER_SAMPLE);
    let mut attempts = 0u64;
    let mut steps = 0u64;
    for _ in 0..samples {
        let pre = loop {
            if attempts == budget {
                return Err(PropError::GeneratorExhausted { attempts });
            }
            attempts += 1;
            let st = gen.sample(&mut rng);
            if pred.holds_state(&st) {
                break st;
            }
        };
        for e in &elems {
            let (post, _) = successor(inst, &pre, &e.bc, &e.msg);
            steps += 1;
            if !pred.holds_state(&post) {
                let schedule = vec![e.clone()];
                return Ok(Verdict::Violated(Box::new(Witness {
                    trace: witness_trace(inst, &pre, &schedule),
                    start: pre,
                    schedule,
                    failing_index: 0,
                    continuation_from: None,
                    detail: format!("`{pred}` holds before the step but not after it"),
                    bound,
                })));
            }
        }
    }
    Ok(Verdict::Holds { schedules_checked: steps, steps_executed: steps, premise_states: None, bound })
}
