//! Compliance checking of business processes against legal norms
//! written as defeasible deontic rules.
//!
//! The pipeline is: parse and validate rule files ([`rules`]), parse a
//! BPMN model and its task annotations ([`process`]), enumerate every
//! execution trace ([`traces`]), then replay each trace through the
//! obligation lifecycle and aggregate a verdict ([`compliance`]).

pub mod compliance;
pub mod ddl;
pub mod error;
pub mod process;
pub mod rules;
pub mod traces;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::*;
