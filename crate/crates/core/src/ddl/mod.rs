//! Propositional defeasible deontic logic: literals, deontic elements,
//! rule sets and the derivation of conclusions in force.

mod deontic;
mod derive;
mod literal;
mod ruleset;

pub use deontic::{conflicts, DeonticElement, Modality};
pub use derive::{
    applicable_rules, derive, Attack, AttackOutcome, BlockReason, ConclusionSet, ProofRecord,
};
pub use literal::{is_atom, Literal};
pub use ruleset::{Rule, RuleSet, Vocabulary};

pub(crate) use ruleset::find_cycle;
