use std::collections::BTreeMap;

use serde::Serialize;

use super::{TraceResult, Verdict};
use crate::error::EngineError;
use crate::traces::{EnumerationConfig, OriginPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AggregateVerdict {
    Green,
    Orange,
    Red,
}

impl AggregateVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregateVerdict::Green => "GREEN",
            AggregateVerdict::Orange => "ORANGE",
            AggregateVerdict::Red => "RED",
        }
    }
}

/// Inputs echoed into the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportMeta {
    pub process_id: String,
    pub rule_files: Vec<String>,
    pub config: EnumerationConfig,
}

/// One violated rule at one task, over all traces where it happens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub rule: String,
    pub control_objective: String,
    pub task_id: String,
    pub task_name: String,
    /// True when every occurrence was compensated.
    pub compensated: bool,
    pub traces: Vec<usize>,
    pub origins: Vec<OriginPath>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceReport {
    pub process_id: String,
    pub rule_files: Vec<String>,
    pub config: EnumerationConfig,
    pub trace_results: Vec<TraceResult>,
    pub verdict: AggregateVerdict,
    pub explanations: Vec<Explanation>,
}

pub fn aggregate(results: Vec<TraceResult>, meta: ReportMeta) -> Result<ComplianceReport, EngineError> {
    if results.is_empty() {
        return Err(EngineError::EmptyResults);
    }
    let verdict = if results.iter().any(|r| r.verdict == Verdict::NonCompliant) {
        AggregateVerdict::Red
    } else if results.iter().all(|r| r.verdict == Verdict::Compliant) {
        AggregateVerdict::Green
    } else {
        AggregateVerdict::Orange
    };

    let mut order: Vec<(String, String)> = Vec::new();
    let mut by_key: BTreeMap<(String, String), Explanation> = BTreeMap::new();
    for (ti, r) in results.iter().enumerate() {
        for v in &r.violations {
            let key = (v.rule.clone(), v.task_id.clone());
            let entry = by_key.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                Explanation {
                    rule: v.rule.clone(),
                    control_objective: v.control_objective.clone(),
                    task_id: v.task_id.clone(),
                    task_name: v.task_name.clone(),
                    compensated: true,
                    traces: Vec::new(),
                    origins: Vec::new(),
                }
            });
            entry.compensated &= v.compensated;
            if entry.traces.last() != Some(&ti) {
                entry.traces.push(ti);
                entry.origins.push(r.trace.origin.clone());
            }
        }
    }
    let explanations = order.into_iter().map(|k| by_key.remove(&k).unwrap()).collect();

    Ok(ComplianceReport {
        process_id: meta.process_id,
        rule_files: meta.rule_files,
        config: meta.config,
        trace_results: results,
        verdict,
        explanations,
    })
}
