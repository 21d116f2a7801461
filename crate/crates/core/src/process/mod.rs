//! Process models: BPMN parsing into a checked graph, and the per-task
//! literal annotations that drive compliance checking.

mod annotations;
mod bpmn;
mod graph;

pub use annotations::{parse_annotations, AnnotationMap};
pub use bpmn::parse_bpmn;
pub use graph::{Edge, GraphBuilder, Node, NodeKind, ProcessGraph, RawKind};
