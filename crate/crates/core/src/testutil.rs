use std::collections::BTreeSet;

use crate::ddl::{DeonticElement, Literal, Modality, Rule, RuleSet, Vocabulary};

pub fn facts(lits: &[&str]) -> BTreeSet<Literal> {
    lits.iter().map(|s| s.parse().unwrap()).collect()
}

fn rule(label: &str, objective: &str, ante: &[&str], chain: &[(Modality, &str)]) -> Rule {
    Rule {
        label: label.into(),
        control_objective: objective.into(),
        antecedent: ante.iter().map(|s| s.parse().unwrap()).collect(),
        chain: chain
            .iter()
            .map(|(m, l)| DeonticElement::new(*m, l.parse().unwrap()))
            .collect(),
    }
}

/// The five GDPR lawfulness-of-processing rules, built in code.
pub fn gdpr_ruleset() -> RuleSet {
    let vocab: Vocabulary = ["Proc", "GiveConsent", "DemonstrateConsent", "Contract", "VI"]
        .iter()
        .map(|a| (a.to_string(), String::new()))
        .collect();
    let rules = vec![
        rule(
            "Art.6.0",
            "Personal data processing is prohibited.",
            &[],
            &[(Modality::OM, "-Proc")],
        ),
        rule("Art.6.1a", "consent", &["GiveConsent"], &[(Modality::P, "Proc")]),
        rule("Art.6.1b", "contract", &["Contract"], &[(Modality::P, "Proc")]),
        rule("Art.6.1d", "vital interests", &["VI"], &[(Modality::P, "Proc")]),
        rule(
            "Art.7.1",
            "demonstrate consent",
            &["GiveConsent"],
            &[(Modality::OM, "DemonstrateConsent")],
        ),
    ];
    let sup = ["Art.6.1a", "Art.6.1b", "Art.6.1d"]
        .iter()
        .map(|s| (s.to_string(), "Art.6.0".to_string()))
        .collect();
    RuleSet::new(vocab, rules, sup).unwrap()
}

/// Rule set from `(label, formula)` pairs; every atom goes in the vocabulary.
pub fn ruleset(rules: &[(&str, &str)], sup: &[(&str, &str)]) -> RuleSet {
    let mut vocab = Vocabulary::new();
    let rules: Vec<Rule> = rules
        .iter()
        .map(|(label, text)| {
            let f = crate::rules::parse_formula(text).unwrap();
            let r = Rule {
                label: label.to_string(),
                control_objective: format!("objective of {label}"),
                antecedent: f.antecedent,
                chain: f.chain,
            };
            for a in r.atoms() {
                vocab.insert(a.to_string(), String::new());
            }
            r
        })
        .collect();
    let sup = sup.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    RuleSet::new(vocab, rules, sup).unwrap()
}

/// A trace whose task ids and names are both `ids`.
pub fn trace(ids: &[&str]) -> crate::traces::Trace {
    crate::traces::Trace {
        steps: ids
            .iter()
            .map(|id| crate::traces::TaskRef { id: id.to_string(), name: id.to_string() })
            .collect(),
        origin: Default::default(),
    }
}

pub fn annotations(entries: &[(&str, &[&str])]) -> crate::process::AnnotationMap {
    let mut map = crate::process::AnnotationMap::new("p");
    for (task, lits) in entries {
        map.by_task
            .insert(task.to_string(), lits.iter().map(|s| s.parse().unwrap()).collect());
    }
    map
}
