use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{parse_formula, RuleDocument, DEFEASIBLE_RULE_TYPE};
use crate::ddl::{conflicts, find_cycle, Rule, RuleSet, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub location: String,
}

impl Diagnostic {
    fn error(code: &'static str, message: String, location: &str) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message,
            location: location.to_string(),
        }
    }

    fn warning(code: &'static str, message: String, location: &str) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message,
            location: location.to_string(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}: {}", self.code, self.location, self.message)
    }
}

pub fn validate_ruleset(doc: &RuleDocument) -> (Option<RuleSet>, Vec<Diagnostic>) {
    validate_merged(std::slice::from_ref(doc))
}

/// Validates one or more rule documents as a single rule set.
///
/// A vocabulary atom declared twice in the same file is an error; the
/// same atom declared in several files is merged (first description
/// wins). Rule labels must be unique across all files.
pub fn validate_merged(docs: &[RuleDocument]) -> (Option<RuleSet>, Vec<Diagnostic>) {
    let mut diags: Vec<Diagnostic> = docs.iter().flat_map(|d| d.notes.clone()).collect();

    let mut vocabulary = Vocabulary::new();
    let mut term_locations: BTreeMap<String, String> = BTreeMap::new();
    for doc in docs {
        let mut seen_here = BTreeSet::new();
        for term in &doc.vocabulary {
            if !crate::ddl::is_atom(&term.atom) {
                diags.push(Diagnostic::error(
                    "bad-atom",
                    format!("vocabulary atom {:?} is not a valid identifier", term.atom),
                    &term.location,
                ));
                continue;
            }
            if !seen_here.insert(term.atom.clone()) {
                diags.push(Diagnostic::error(
                    "duplicate-atom",
                    format!("duplicate vocabulary atom {}", term.atom),
                    &term.location,
                ));
                continue;
            }
            vocabulary
                .entry(term.atom.clone())
                .or_insert_with(|| term.description.clone());
            term_locations
                .entry(term.atom.clone())
                .or_insert_with(|| term.location.clone());
        }
    }

    let mut rules: Vec<Rule> = Vec::new();
    let mut locations: HashMap<String, String> = HashMap::new();
    let mut skipped: BTreeSet<String> = BTreeSet::new();
    for doc in docs {
        for entry in &doc.rules {
            if let Some(ty) = &entry.rule_type {
                if ty != DEFEASIBLE_RULE_TYPE {
                    diags.push(Diagnostic::warning(
                        "unsupported-rule-type",
                        format!("rule {} has type {ty}; skipped", entry.label),
                        &entry.location,
                    ));
                    skipped.insert(entry.label.clone());
                    continue;
                }
            }
            if locations.contains_key(&entry.label) {
                diags.push(Diagnostic::error(
                    "duplicate-label",
                    format!("duplicate label {}", entry.label),
                    &entry.location,
                ));
                continue;
            }
            locations.insert(entry.label.clone(), entry.location.clone());
            let formula = match parse_formula(&entry.formula) {
                Ok(f) => f,
                Err(e) => {
                    diags.push(Diagnostic::error(
                        "formula-syntax",
                        format!("rule {}: {e} in {:?}", entry.label, entry.formula),
                        &entry.location,
                    ));
                    continue;
                }
            };
            let rule = Rule {
                label: entry.label.clone(),
                control_objective: entry.control_objective.clone(),
                antecedent: formula.antecedent,
                chain: formula.chain,
            };
            let mut ok = true;
            let unknown: BTreeSet<&str> = rule
                .atoms()
                .filter(|a| !vocabulary.contains_key(*a))
                .collect();
            for atom in unknown {
                diags.push(Diagnostic::error(
                    "unknown-atom",
                    format!("rule {} uses unknown atom {atom}", rule.label),
                    &entry.location,
                ));
                ok = false;
            }
            if rule.chain.len() > 1 && rule.chain.iter().any(|e| e.modality.is_permission()) {
                diags.push(Diagnostic::error(
                    "permission-in-chain",
                    format!(
                        "rule {}: a permission cannot appear in a compensation chain",
                        rule.label
                    ),
                    &entry.location,
                ));
                ok = false;
            }
            if ok {
                rules.push(rule);
            }
        }
    }

    let index: HashMap<&str, usize> = rules
        .iter()
        .enumerate()
        .map(|(i, r)| (r.label.as_str(), i))
        .collect();
    let mut superiorities = Vec::new();
    let mut edges = BTreeSet::new();
    for doc in docs {
        for s in &doc.superiorities {
            if skipped.contains(&s.superior) || skipped.contains(&s.inferior) {
                diags.push(Diagnostic::warning(
                    "skipped-superiority",
                    format!(
                        "superiority {} > {} involves a skipped rule; ignored",
                        s.superior, s.inferior
                    ),
                    &s.location,
                ));
                continue;
            }
            let mut known = true;
            for label in [&s.superior, &s.inferior] {
                if !locations.contains_key(label) {
                    diags.push(Diagnostic::error(
                        "unknown-rule",
                        format!("superiority names unknown rule {label}"),
                        &s.location,
                    ));
                    known = false;
                }
            }
            if !known {
                continue;
            }
            if s.superior == s.inferior {
                diags.push(Diagnostic::error(
                    "superiority-cycle",
                    format!("superiority cycle: rule {} is superior to itself", s.superior),
                    &s.location,
                ));
                continue;
            }
            // Labels of rules dropped for other errors are already reported.
            if let (Some(&a), Some(&b)) = (index.get(s.superior.as_str()), index.get(s.inferior.as_str())) {
                if !conflicts(rules[a].head(), rules[b].head()) {
                    diags.push(Diagnostic::warning(
                        "non-conflicting-superiority",
                        format!(
                            "superiority {} > {}: heads {} and {} cannot conflict",
                            s.superior,
                            s.inferior,
                            rules[a].head(),
                            rules[b].head()
                        ),
                        &s.location,
                    ));
                }
                edges.insert((a, b));
            }
            superiorities.push((s.superior.clone(), s.inferior.clone()));
        }
    }
    if let Some(cycle) = find_cycle(rules.len(), &edges) {
        let labels: Vec<&str> = cycle.iter().map(|&i| rules[i].label.as_str()).collect();
        diags.push(Diagnostic::error(
            "superiority-cycle",
            format!("superiority cycle: {} > {}", labels.join(" > "), labels[0]),
            &locations[labels[0]],
        ));
    }

    let used: BTreeSet<&str> = rules.iter().flat_map(Rule::atoms).collect();
    for (atom, location) in &term_locations {
        if !used.contains(atom.as_str()) {
            diags.push(Diagnostic::warning(
                "unused-atom",
                format!("vocabulary atom {atom} is never used by a rule"),
                location,
            ));
        }
    }

    if diags.iter().any(Diagnostic::is_error) {
        return (None, diags);
    }
    match RuleSet::new(vocabulary, rules, superiorities) {
        Ok(rs) => (Some(rs), diags),
        Err(e) => {
            diags.push(Diagnostic::error("invalid-ruleset", e.to_string(), "<merged>"));
            (None, diags)
        }
    }
}
