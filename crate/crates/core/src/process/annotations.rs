use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ProcessGraph;
use crate::ddl::{Literal, Vocabulary};
use crate::error::AnnotationError;

/// Literals asserted by each task, in assertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AnnotationMap {
    pub process_id: String,
    pub by_task: BTreeMap<String, Vec<Literal>>,
}

impl AnnotationMap {
    pub fn new(process_id: impl Into<String>) -> Self {
        Self {
            process_id: process_id.into(),
            by_task: BTreeMap::new(),
        }
    }

    pub fn get(&self, task: &str) -> &[Literal] {
        self.by_task.get(task).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The assertions that survive once later entries for an atom have
    /// overridden earlier ones, in order of their final assertion.
    pub fn effective(&self, task: &str) -> Vec<Literal> {
        let lits = self.get(task);
        lits.iter()
            .enumerate()
            .filter(|(i, l)| !lits[i + 1..].iter().any(|m| m.atom() == l.atom()))
            .map(|(_, l)| l.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.by_task.values().all(Vec::is_empty)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationFile {
    process: String,
    tasks: BTreeMap<String, Vec<String>>,
}

/// Reads the JSON annotation sidecar:
/// `{"process": "...", "tasks": {"<taskId>": ["Lit", "-Lit", ...]}}`.
pub fn parse_annotations(
    text: &str,
    graph: &ProcessGraph,
    vocab: &Vocabulary,
) -> Result<AnnotationMap, AnnotationError> {
    let file: AnnotationFile =
        serde_json::from_str(text).map_err(|e| AnnotationError::Syntax(e.to_string()))?;
    if file.process != graph.process_id() {
        return Err(AnnotationError::ProcessIdMismatch {
            expected: graph.process_id().to_string(),
            found: file.process,
        });
    }
    let mut map = AnnotationMap::new(file.process);
    for (task, raw) in file.tasks {
        if !graph.is_task(&task) {
            return Err(AnnotationError::UnknownTask(task));
        }
        let mut lits = Vec::with_capacity(raw.len());
        for s in raw {
            let lit: Literal = s
                .parse()
                .map_err(|e| AnnotationError::Syntax(format!("task {task}: {e}")))?;
            if !vocab.contains_key(lit.atom()) {
                return Err(AnnotationError::UnknownAtom(lit.atom().to_string()));
            }
            lits.push(lit);
        }
        map.by_task.insert(task, lits);
    }
    Ok(map)
}
