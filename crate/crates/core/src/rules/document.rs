//! Reading and writing rule files.
//!
//! The root element name is free. Recognised elements are matched by
//! local name, so namespace prefixes do not matter:
//!
//! ```xml
//! <Vocabulary>
//!   <Term atom="Proc" description="..."/>
//! </Vocabulary>
//! <Rule ruleLabel="Art.6.0" xsi:type="DflRuleType">
//!   <ControlObjective>...</ControlObjective>
//!   <FormalRepresentation>=>[OM]-Proc</FormalRepresentation>
//! </Rule>
//! <SuperiorityRelation superiorRuleLabel="Art.6.1a" inferiorRuleLabel="Art.6.0"/>
//! ```

use std::fmt::Write;

use roxmltree::{Document, Node};
use serde::Serialize;

use super::{Diagnostic, Severity};
use crate::error::FormatError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermEntry {
    pub atom: String,
    pub description: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleEntry {
    pub label: String,
    /// Value of `xsi:type`, if present.
    pub rule_type: Option<String>,
    pub control_objective: String,
    pub formula: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperiorityEntry {
    pub superior: String,
    pub inferior: String,
    pub location: String,
}

/// Raw contents of one rule file, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleDocument {
    pub source_path: String,
    pub vocabulary: Vec<TermEntry>,
    pub rules: Vec<RuleEntry>,
    pub superiorities: Vec<SuperiorityEntry>,
    /// Warnings raised while reading, e.g. unknown elements.
    pub notes: Vec<Diagnostic>,
}

/// Rule type accepted by validation; anything else is skipped.
pub const DEFEASIBLE_RULE_TYPE: &str = "DflRuleType";

pub fn parse_ruleset(xml: &str) -> Result<RuleDocument, FormatError> {
    parse_ruleset_named(xml, "<memory>")
}

pub fn parse_ruleset_named(xml: &str, source_path: &str) -> Result<RuleDocument, FormatError> {
    let doc = Document::parse(xml).map_err(|e| FormatError::XmlSyntax(e.to_string()))?;
    let mut out = RuleDocument {
        source_path: source_path.to_string(),
        vocabulary: Vec::new(),
        rules: Vec::new(),
        superiorities: Vec::new(),
        notes: Vec::new(),
    };
    let root = doc.root_element();
    for node in root.descendants().filter(Node::is_element) {
        if node == root {
            continue;
        }
        let location = locate(&doc, source_path, node);
        match node.tag_name().name() {
            "Vocabulary" | "ControlObjective" | "FormalRepresentation" => {}
            "Term" => out.vocabulary.push(TermEntry {
                atom: required_attr(node, "atom", &location)?.to_string(),
                description: normalize_ws(node.attribute("description").unwrap_or("")),
                location,
            }),
            "Rule" => {
                let label = required_attr(node, "ruleLabel", &location)?.to_string();
                let rule_type = node
                    .attributes()
                    .find(|a| a.name() == "type")
                    .map(|a| a.value().to_string());
                let control_objective = child(node, "ControlObjective")
                    .map(|c| normalize_ws(&text_of(c)))
                    .unwrap_or_default();
                let formula = child(node, "FormalRepresentation")
                    .map(|c| text_of(c).trim().to_string())
                    .ok_or_else(|| FormatError::MissingElement {
                        element: "Rule".into(),
                        child: "FormalRepresentation".into(),
                        location: location.clone(),
                    })?;
                out.rules.push(RuleEntry {
                    label,
                    rule_type,
                    control_objective,
                    formula,
                    location,
                });
            }
            "SuperiorityRelation" => out.superiorities.push(SuperiorityEntry {
                superior: required_attr(node, "superiorRuleLabel", &location)?.to_string(),
                inferior: required_attr(node, "inferiorRuleLabel", &location)?.to_string(),
                location,
            }),
            other => out.notes.push(Diagnostic {
                severity: Severity::Warning,
                code: "unknown-element",
                message: format!("ignored unknown element <{other}>"),
                location,
            }),
        }
    }
    Ok(out)
}

/// Writes a document back out as XML that parses to the same entries.
pub fn serialize_ruleset(doc: &RuleDocument) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<RuleSet xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\">\n");
    out.push_str("  <Vocabulary>\n");
    for t in &doc.vocabulary {
        writeln!(
            out,
            "    <Term atom=\"{}\" description=\"{}\"/>",
            escape(&t.atom),
            escape(&t.description)
        )
        .unwrap();
    }
    out.push_str("  </Vocabulary>\n");
    for r in &doc.rules {
        write!(out, "  <Rule ruleLabel=\"{}\"", escape(&r.label)).unwrap();
        if let Some(ty) = &r.rule_type {
            write!(out, " xsi:type=\"{}\"", escape(ty)).unwrap();
        }
        out.push_str(">\n");
        writeln!(
            out,
            "    <ControlObjective>{}</ControlObjective>",
            escape(&r.control_objective)
        )
        .unwrap();
        writeln!(
            out,
            "    <FormalRepresentation>{}</FormalRepresentation>",
            escape(&r.formula)
        )
        .unwrap();
        out.push_str("  </Rule>\n");
    }
    for s in &doc.superiorities {
        writeln!(
            out,
            "  <SuperiorityRelation superiorRuleLabel=\"{}\" inferiorRuleLabel=\"{}\"/>",
            escape(&s.superior),
            escape(&s.inferior)
        )
        .unwrap();
    }
    out.push_str("</RuleSet>\n");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn locate(doc: &Document, source: &str, node: Node) -> String {
    let pos = doc.text_pos_at(node.range().start);
    format!("{source}:{}:{}", pos.row, pos.col)
}

fn required_attr<'a>(node: Node<'a, '_>, name: &str, location: &str) -> Result<&'a str, FormatError> {
    node.attribute(name)
        .ok_or_else(|| FormatError::MissingAttribute {
            element: node.tag_name().name().to_string(),
            attribute: name.to_string(),
            location: location.to_string(),
        })
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
}

fn text_of(node: Node) -> String {
    node.descendants()
        .filter(Node::is_text)
        .filter_map(|t| t.text())
        .collect()
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
