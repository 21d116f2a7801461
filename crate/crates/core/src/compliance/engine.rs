use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    holds, ObligationInstance, ProofLog, StateSnapshot, Status, TraceResult, Verdict, Violation,
    Warning,
};
use crate::ddl::{derive, BlockReason, ConclusionSet, DeonticElement, Literal, RuleSet};
use crate::error::EngineError;
use crate::process::AnnotationMap;
use crate::traces::Trace;

/// Replays `trace` and classifies every obligation it meets.
pub fn check_trace(
    trace: &Trace,
    ann: &AnnotationMap,
    rs: &RuleSet,
) -> Result<TraceResult, EngineError> {
    let mut run = Run::new(trace, ann, rs);
    for i in 0..trace.len() {
        run.step(i)?;
    }
    Ok(run.finish())
}

pub fn check_traces(
    traces: &[Trace],
    ann: &AnnotationMap,
    rs: &RuleSet,
) -> Result<Vec<TraceResult>, EngineError> {
    traces.iter().map(|t| check_trace(t, ann, rs)).collect()
}

/// The replay state and derivation proofs right after `step`.
pub fn explain(
    trace: &Trace,
    ann: &AnnotationMap,
    rs: &RuleSet,
    step: usize,
) -> Result<ProofLog, EngineError> {
    if step >= trace.len() {
        return Err(EngineError::IndexOutOfRange { step, len: trace.len() });
    }
    let mut run = Run::new(trace, ann, rs);
    for i in 0..=step {
        run.step(i)?;
    }
    let active = run
        .instances
        .iter()
        .zip(&run.track)
        .filter(|(_, t)| t.active)
        .map(|(inst, _)| inst.clone())
        .collect();
    Ok(ProofLog {
        task: trace.steps[step].clone(),
        proofs: run.conclusions.proofs.values().cloned().collect(),
        snapshot: StateSnapshot {
            position: step,
            facts: run.facts.iter().cloned().collect(),
            active,
            conclusions: run.conclusions,
        },
    })
}

#[derive(Debug, Default)]
struct Track {
    /// In force: attached to a live conclusion, or a pending compensation.
    active: bool,
    /// The content held at some step while in force.
    held: bool,
    successor: Option<usize>,
}

struct Run<'a> {
    trace: &'a Trace,
    ann: &'a AnnotationMap,
    rs: &'a RuleSet,
    facts: BTreeSet<Literal>,
    history: Vec<BTreeSet<Literal>>,
    conclusions: ConclusionSet,
    instances: Vec<ObligationInstance>,
    track: Vec<Track>,
    warnings: Vec<Warning>,
    /// Atoms whose conflict was already reported.
    ambiguous_seen: BTreeSet<String>,
}

impl<'a> Run<'a> {
    fn new(trace: &'a Trace, ann: &'a AnnotationMap, rs: &'a RuleSet) -> Self {
        Self {
            trace,
            ann,
            rs,
            facts: BTreeSet::new(),
            history: Vec::new(),
            conclusions: ConclusionSet::default(),
            instances: Vec::new(),
            track: Vec::new(),
            warnings: Vec::new(),
            ambiguous_seen: BTreeSet::new(),
        }
    }

    fn held_by(&self, content: &Literal, step: usize) -> bool {
        self.history[..=step].iter().any(|f| holds(content, f))
    }

    fn warn(&mut self, code: &'static str, step: usize, message: String) {
        self.warnings.push(Warning { code, message, step });
    }

    fn step(&mut self, i: usize) -> Result<(), EngineError> {
        for lit in self.ann.get(&self.trace.steps[i].id) {
            self.facts.remove(&lit.complement());
            self.facts.insert(lit.clone());
        }
        self.history.push(self.facts.clone());
        self.conclusions =
            derive(&self.facts, self.rs).map_err(|source| EngineError::Derive { step: i, source })?;

        let mut ambiguous: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (e, r) in &self.conclusions.blocked {
            if *r == BlockReason::Ambiguous {
                ambiguous.entry(e.content.atom().to_string()).or_default().push(e.to_string());
            }
        }
        for (atom, sides) in ambiguous {
            if self.ambiguous_seen.insert(atom) {
                self.warn(
                    "ambiguous-conclusion",
                    i,
                    format!("conflict between {} is unresolved; neither holds", sides.join(" and ")),
                );
            }
        }

        // Obligations entering force.
        let entering: Vec<DeonticElement> = self
            .conclusions
            .effects
            .iter()
            .filter(|e| e.modality.is_obligation())
            .filter(|e| {
                !self
                    .instances
                    .iter()
                    .zip(&self.track)
                    .any(|(inst, t)| t.active && inst.chain_index == 1 && &inst.element == *e)
            })
            .cloned()
            .collect();
        for e in entering {
            let rule = self.conclusions.proofs[&e].firing_rule.clone();
            self.spawn(rule, 1, e, i, None);
        }

        // Obligations leaving force.
        for j in 0..self.instances.len() {
            let inst = &self.instances[j];
            if !self.track[j].active
                || inst.chain_index != 1
                || self.conclusions.effects.contains(&inst.element)
            {
                continue;
            }
            self.track[j].active = false;
            self.instances[j].left_force_at = Some(i);
            if self.instances[j].status == Status::InForce {
                if self.instances[j].element.modality.is_maintenance() {
                    self.weak_check(j, i);
                    self.instances[j].status = Status::TerminatedOverridden;
                } else {
                    self.violate(j, i);
                }
            }
        }

        let mut j = 0;
        while j < self.instances.len() {
            self.evaluate(j, i);
            j += 1;
        }
        Ok(())
    }

    fn spawn(
        &mut self,
        rule: String,
        chain_index: usize,
        element: DeonticElement,
        at: usize,
        compensates: Option<usize>,
    ) -> usize {
        let mut inst = ObligationInstance {
            source_rule: rule,
            chain_index,
            element,
            entered_at: at,
            status: Status::InForce,
            violation_at: None,
            fulfilled_at: None,
            left_force_at: None,
            compensates,
        };
        if inst.element.modality.is_preemptive() && self.held_by(&inst.element.content, at) {
            inst.status = Status::Fulfilled;
            inst.fulfilled_at = Some(at);
        }
        self.instances.push(inst);
        self.track.push(Track { active: true, ..Track::default() });
        self.instances.len() - 1
    }

    fn violate(&mut self, j: usize, at: usize) {
        self.instances[j].status = Status::Violated;
        self.instances[j].violation_at = Some(at);
        let inst = &self.instances[j];
        let next = self
            .rs
            .rule(&inst.source_rule)
            .and_then(|r| r.chain.get(inst.chain_index).cloned());
        if let Some(next) = next {
            let rule = inst.source_rule.clone();
            let chain_index = inst.chain_index + 1;
            let s = self.spawn(rule, chain_index, next, at, Some(j));
            self.track[j].successor = Some(s);
        }
    }

    fn weak_check(&mut self, j: usize, at: usize) {
        if !self.track[j].held {
            let e = self.instances[j].element.clone();
            let rule = self.instances[j].source_rule.clone();
            self.warn(
                "weak-non-satisfaction",
                at,
                format!("{e} from {rule} was in force but its content never held"),
            );
        }
    }

    /// Checks instance `j` against the facts of step `i`.
    fn evaluate(&mut self, j: usize, i: usize) {
        let facts = &self.history[i];
        let inst = &self.instances[j];
        let content = inst.element.content.clone();
        let modality = inst.element.modality;
        match inst.status {
            Status::InForce if self.track[j].active => {
                if modality.is_maintenance() {
                    if facts.contains(&content.complement()) {
                        self.violate(j, i);
                    } else if holds(&content, facts) {
                        self.track[j].held = true;
                    }
                } else if holds(&content, facts) {
                    self.instances[j].status = Status::Fulfilled;
                    self.instances[j].fulfilled_at = Some(i);
                }
            }
            Status::Violated
                if modality.is_perdurant()
                    && inst.violation_at.is_some_and(|v| i > v)
                    && holds(&content, facts) =>
            {
                self.instances[j].status = Status::FulfilledLate;
                self.instances[j].fulfilled_at = Some(i);
            }
            _ => {}
        }
    }

    fn finish(mut self) -> TraceResult {
        if let Some(last) = self.trace.len().checked_sub(1) {
            let settled = self.instances.len();
            let mut j = 0;
            while j < self.instances.len() {
                if j >= settled {
                    // Compensation raised at trace end: judge it on the final state.
                    self.evaluate(j, last);
                }
                if self.track[j].active && self.instances[j].status == Status::InForce {
                    if self.instances[j].element.modality.is_maintenance() {
                        self.weak_check(j, last);
                    } else {
                        self.violate(j, last);
                    }
                }
                j += 1;
            }
        }

        // Successors always sit at higher indices.
        let mut repaired = vec![false; self.instances.len()];
        for j in (0..self.instances.len()).rev() {
            if let Some(s) = self.track[j].successor {
                repaired[j] = !self.instances[s].is_violated() || repaired[s];
            }
        }
        let mut violations = Vec::new();
        for (j, inst) in self.instances.iter_mut().enumerate() {
            let Some(step) = inst.violation_at else { continue };
            if repaired[j] {
                inst.status = Status::Compensated;
            }
            let task = &self.trace.steps[step];
            violations.push(Violation {
                instance: j,
                rule: inst.source_rule.clone(),
                control_objective: self
                    .rs
                    .rule(&inst.source_rule)
                    .map(|r| r.control_objective.clone())
                    .unwrap_or_default(),
                element: inst.element.clone(),
                step,
                task_id: task.id.clone(),
                task_name: task.name.clone(),
                compensated: repaired[j],
            });
        }
        for v in violations.iter().filter(|v| v.compensated) {
            self.warnings.push(Warning {
                code: "compensated-violation",
                message: format!("{} from {} violated at {} and compensated", v.element, v.rule, v.task_name),
                step: v.step,
            });
        }

        let verdict = if violations.iter().any(|v| !v.compensated) {
            Verdict::NonCompliant
        } else if !self.warnings.is_empty() {
            Verdict::CompliantWithWarnings
        } else {
            Verdict::Compliant
        };
        TraceResult {
            trace: self.trace.clone(),
            instances: self.instances,
            violations,
            warnings: self.warnings,
            verdict,
        }
    }
}

impl fmt::Display for ProofLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.snapshot;
        writeln!(f, "step {}: {} ({})", s.position, self.task.name, self.task.id)?;
        let facts: Vec<String> = s.facts.iter().map(ToString::to_string).collect();
        writeln!(f, "facts: {}", if facts.is_empty() { "(none)".into() } else { facts.join(", ") })?;
        writeln!(f, "in force:")?;
        if s.active.is_empty() {
            writeln!(f, "  (none)")?;
        }
        for inst in &s.active {
            writeln!(
                f,
                "  {} from {} (entered at step {}, {:?})",
                inst.element, inst.source_rule, inst.entered_at, inst.status
            )?;
        }
        writeln!(f, "conclusions:")?;
        for p in &self.proofs {
            match s.conclusions.blocked.get(&p.conclusion) {
                None => writeln!(f, "  {} in effect via {} (team: {})", p.conclusion, p.firing_rule, p.team.join(", "))?,
                Some(reason) => writeln!(f, "  {} blocked: {} (supported by {})", p.conclusion, reason, p.team.join(", "))?,
            }
            for a in &p.attackers {
                writeln!(f, "    attacked by {} {}: {}", a.rule, a.head, outcome_text(&a.outcome))?;
            }
        }
        Ok(())
    }
}

fn outcome_text(o: &crate::ddl::AttackOutcome) -> String {
    use crate::ddl::AttackOutcome::*;
    match o {
        DefeatedBySuperiority { by } => format!("defeated by {by}"),
        NotApplicable => "not applicable".into(),
        BlockedUs => "survives".into(),
    }
}
