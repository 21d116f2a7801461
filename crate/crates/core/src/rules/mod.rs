//! Rule files: XML reading and writing, formula syntax and validation
//! into a [`RuleSet`](crate::ddl::RuleSet).

mod document;
mod formula;
mod validate;

pub use document::{
    parse_ruleset, parse_ruleset_named, serialize_ruleset, RuleDocument, RuleEntry,
    SuperiorityEntry, TermEntry, DEFEASIBLE_RULE_TYPE,
};
pub use formula::{parse_formula, serialize_formula, Formula};
pub use validate::{validate_merged, validate_ruleset, Diagnostic, Severity};
