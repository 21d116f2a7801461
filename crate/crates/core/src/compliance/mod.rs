//! Obligation lifecycle over traces and the aggregate verdict.
//!
//! Facts persist across a trace: each task's annotations are asserted in
//! order, and asserting a literal retracts its complement. After every
//! step the rule set is re-derived; obligations in the resulting effects
//! enter force, obligations that leave the effects stop being in force,
//! and each in-force obligation is checked against the facts.
//!
//! A literal's content holds when it is asserted; a negative content
//! `-p` also holds whenever `p` is not asserted, so a prohibition is
//! satisfied by the absence of the act.

mod engine;
mod report;

use serde::Serialize;

use crate::ddl::{ConclusionSet, DeonticElement, Literal, ProofRecord};
use crate::traces::{TaskRef, Trace};

pub use engine::{check_trace, check_traces, explain};
pub use report::{aggregate, AggregateVerdict, ComplianceReport, Explanation, ReportMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    InForce,
    Fulfilled,
    /// A perdurant obligation whose content held after its violation.
    FulfilledLate,
    Violated,
    /// Violated, then repaired by the next element of the chain.
    Compensated,
    TerminatedOverridden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObligationInstance {
    pub source_rule: String,
    /// Position in the rule's chain, starting at 1.
    pub chain_index: usize,
    pub element: DeonticElement,
    pub entered_at: usize,
    pub status: Status,
    pub violation_at: Option<usize>,
    pub fulfilled_at: Option<usize>,
    /// Step at which the conclusion dropped out of the effects.
    pub left_force_at: Option<usize>,
    /// Index of the violated instance this one compensates.
    pub compensates: Option<usize>,
}

impl ObligationInstance {
    pub fn is_violated(&self) -> bool {
        self.violation_at.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Index into [`TraceResult::instances`].
    pub instance: usize,
    pub rule: String,
    pub control_objective: String,
    pub element: DeonticElement,
    pub step: usize,
    pub task_id: String,
    pub task_name: String,
    pub compensated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    Compliant,
    CompliantWithWarnings,
    NonCompliant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceResult {
    pub trace: Trace,
    pub instances: Vec<ObligationInstance>,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
    pub verdict: Verdict,
}

/// State of a trace replay right after a step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSnapshot {
    pub position: usize,
    pub facts: Vec<Literal>,
    /// Instances whose obligation is in force at this step.
    pub active: Vec<ObligationInstance>,
    pub conclusions: ConclusionSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofLog {
    pub task: TaskRef,
    pub snapshot: StateSnapshot,
    /// Every candidate conclusion, in effect or blocked.
    pub proofs: Vec<ProofRecord>,
}

/// Whether `content` holds under `facts`.
pub fn holds(content: &Literal, facts: &std::collections::BTreeSet<Literal>) -> bool {
    if content.is_negated() {
        !facts.contains(&content.complement())
    } else {
        facts.contains(content)
    }
}
