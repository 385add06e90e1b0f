//! Contract sources shipped with the toolchain.

use crate::lang::{Address, ContractDef, Uint, Value};
use crate::runtime::{instantiate, ContractInstance};
use crate::syntax::parse_contract;

/// Address the crowdfunding contract is deployed at in examples and tests.
pub const CROWDFUNDING_ID: &str = "C";

pub const CROWDFUNDING_SRC: &str = include_str!("../../../corpus/crowdfunding.scilla");
pub const CLAIM_MUTANT_SRC: &str = include_str!("../../../corpus/crowdfunding_claim_mutant.scilla");
pub const CROWDFUNDING_PARAMS: &str = include_str!("../../../corpus/crowdfunding.params.json");
pub const CALLER_SRC: &str = include_str!("../../../corpus/caller.scilla");
pub const SERVER_SRC: &str = include_str!("../../../corpus/server.scilla");
pub const SELF_CALLER_SRC: &str = include_str!("../../../corpus/pingpong.scilla");
pub const DUPLICATE_TAGS_SRC: &str = include_str!("../../../corpus/duplicate_tags.scilla");

fn parse(name: &str, src: &str) -> ContractDef {
    parse_contract(src).unwrap_or_else(|e| panic!("corpus contract {name} does not parse: {e}"))
}

pub fn crowdfunding() -> ContractDef {
    parse("crowdfunding", CROWDFUNDING_SRC)
}

pub fn claim_mutant() -> ContractDef {
    parse("crowdfunding_claim_mutant", CLAIM_MUTANT_SRC)
}

pub fn caller() -> ContractDef {
    parse("caller", CALLER_SRC)
}

pub fn server() -> ContractDef {
    parse("server", SERVER_SRC)
}

pub fn self_caller() -> ContractDef {
    parse("pingpong", SELF_CALLER_SRC)
}

/// Parameters of `crowdfunding.params.json`: owner A0, deadline block 10, goal 100.
pub fn crowdfunding_params() -> Vec<(String, Value)> {
    vec![
        ("owner".into(), Value::address("A0")),
        ("max_block".into(), Value::uint(10)),
        ("goal".into(), Value::uint(100)),
    ]
}

fn deploy(def: ContractDef) -> ContractInstance {
    instantiate(def, Address::new(CROWDFUNDING_ID), Uint::zero(), &crowdfunding_params())
        .expect("corpus parameters match the corpus contract")
}

/// The crowdfunding contract at address `C` with zero initial balance.
pub fn crowdfunding_instance() -> ContractInstance {
    deploy(crowdfunding())
}

pub fn claim_mutant_instance() -> ContractInstance {
    deploy(claim_mutant())
}
