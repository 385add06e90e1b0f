//! Toolchain for a small Scilla contract subset.
//!
//! Contracts are parsed ([`syntax`]), checked for well-formedness
//! ([`checks`]), executed as communicating automata ([`runtime`]) and
//! verified against state and temporal properties by bounded schedule
//! enumeration ([`propcheck`]). [`reference`] holds a hand-written model of
//! the crowdfunding campaign used as a test oracle.

pub mod checks;
pub mod corpus;
pub mod lang;
pub mod propcheck;
pub mod reference;
pub mod runtime;
pub mod syntax;
