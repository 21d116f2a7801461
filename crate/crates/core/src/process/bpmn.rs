//! BPMN 2.0 XML subset.
//!
//! Elements are matched by local name, so any namespace prefix works.
//! Within `<process>` only start and end events, plain/user/service tasks,
//! exclusive and parallel gateways and sequence flows are accepted; every
//! other flow element is rejected rather than silently dropped. Diagram
//! interchange (`BPMNDiagram`) is layout only and is skipped.

use roxmltree::{Document, Node};

use super::{GraphBuilder, ProcessGraph, RawKind};
use crate::error::ProcessError;

/// Children that carry no semantics we would lose by ignoring them.
const PASSIVE_CHILDREN: [&str; 3] = ["incoming", "outgoing", "documentation"];

pub fn parse_bpmn(xml: &str) -> Result<ProcessGraph, ProcessError> {
    let doc = Document::parse(xml).map_err(|e| ProcessError::XmlSyntax(e.to_string()))?;
    let root = doc.root_element();
    let process = if root.tag_name().name() == "process" {
        root
    } else {
        let mut processes = Vec::new();
        for child in root.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "process" => processes.push(child),
                "BPMNDiagram" | "documentation" => {}
                other => return Err(ProcessError::UnsupportedElement(other.to_string())),
            }
        }
        match processes.as_slice() {
            [p] => *p,
            [] => return Err(ProcessError::Structure("no <process> element".into())),
            _ => {
                return Err(ProcessError::Structure(format!(
                    "{} <process> elements; exactly one is supported",
                    processes.len()
                )))
            }
        }
    };

    let process_id = process.attribute("id").unwrap_or("").to_string();
    let mut builder = GraphBuilder::new(process_id);
    for el in process.children().filter(Node::is_element) {
        let name = el.tag_name().name();
        let kind = match name {
            "startEvent" => Some(RawKind::Start),
            "endEvent" => Some(RawKind::End),
            "task" | "userTask" | "serviceTask" => {
                let label = el
                    .attribute("name")
                    .map(|n| n.split_whitespace().collect::<Vec<_>>().join(" "))
                    .filter(|n| !n.is_empty())
                    .unwrap_or_else(|| el.attribute("id").unwrap_or("").to_string());
                Some(RawKind::Task(label))
            }
            "exclusiveGateway" => Some(RawKind::Exclusive),
            "parallelGateway" => Some(RawKind::Parallel),
            "sequenceFlow" | "documentation" => None,
            other => return Err(ProcessError::UnsupportedElement(other.to_string())),
        };
        match kind {
            Some(kind) => {
                check_children(el, &PASSIVE_CHILDREN)?;
                builder.node(required(el, "id")?, kind);
            }
            None if name == "sequenceFlow" => {
                check_children(el, &["conditionExpression", "documentation"])?;
                let id = required(el, "id")?;
                builder.flow_with_id(id, required(el, "sourceRef")?, required(el, "targetRef")?);
            }
            None => {}
        }
    }
    builder.build()
}

fn required<'a>(el: Node<'a, '_>, attr: &str) -> Result<&'a str, ProcessError> {
    el.attribute(attr).ok_or_else(|| {
        ProcessError::Structure(format!(
            "<{}> without {attr} attribute",
            el.tag_name().name()
        ))
    })
}

fn check_children(el: Node, allowed: &[&str]) -> Result<(), ProcessError> {
    match el
        .children()
        .filter(Node::is_element)
        .find(|c| !allowed.contains(&c.tag_name().name()))
    {
        Some(c) => Err(ProcessError::UnsupportedElement(c.tag_name().name().to_string())),
        None => Ok(()),
    }
}
