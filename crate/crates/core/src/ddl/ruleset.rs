use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{DeonticElement, Literal};
use crate::error::RuleSetError;

/// Atom name to human-readable description.
pub type Vocabulary = BTreeMap<String, String>;

/// A labelled defeasible rule.
///
/// `chain` is a compensation chain: the first element is the rule's
/// conclusion, each later element is the obligation that takes over when
/// the previous one is violated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub label: String,
    pub control_objective: String,
    pub antecedent: Vec<Literal>,
    pub chain: Vec<DeonticElement>,
}

impl Rule {
    pub fn head(&self) -> &DeonticElement {
        &self.chain[0]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.antecedent
            .iter()
            .chain(self.chain.iter().map(|e| &e.content))
            .map(Literal::atom)
    }
}

/// A validated set of rules with their vocabulary and superiority relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    vocabulary: Vocabulary,
    rules: Vec<Rule>,
    superiorities: Vec<(String, String)>,
    by_label: HashMap<String, usize>,
    superior: BTreeSet<(usize, usize)>,
}

impl RuleSet {
    /// Builds a rule set, checking every structural invariant.
    pub fn new(
        vocabulary: Vocabulary,
        rules: Vec<Rule>,
        superiorities: Vec<(String, String)>,
    ) -> Result<Self, RuleSetError> {
        let mut by_label = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            if by_label.insert(rule.label.clone(), i).is_some() {
                return Err(RuleSetError::DuplicateLabel(rule.label.clone()));
            }
            if rule.chain.is_empty() {
                return Err(RuleSetError::EmptyChain(rule.label.clone()));
            }
            if rule.chain.len() > 1 && rule.chain.iter().any(|e| e.modality.is_permission()) {
                return Err(RuleSetError::PermissionInChain(rule.label.clone()));
            }
            if let Some(atom) = rule.atoms().find(|a| !vocabulary.contains_key(*a)) {
                return Err(RuleSetError::UnknownAtom {
                    rule: rule.label.clone(),
                    atom: atom.to_string(),
                });
            }
        }

        let mut superior = BTreeSet::new();
        for (sup, inf) in &superiorities {
            let s = *by_label
                .get(sup)
                .ok_or_else(|| RuleSetError::UnknownRule(sup.clone()))?;
            let i = *by_label
                .get(inf)
                .ok_or_else(|| RuleSetError::UnknownRule(inf.clone()))?;
            if s == i {
                return Err(RuleSetError::SelfSuperiority(sup.clone()));
            }
            superior.insert((s, i));
        }
        if let Some(cycle) = find_cycle(rules.len(), &superior) {
            let labels = cycle.iter().map(|&i| rules[i].label.clone()).collect();
            return Err(RuleSetError::SuperiorityCycle(labels));
        }

        Ok(Self {
            vocabulary,
            rules,
            superiorities,
            by_label,
            superior,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vocabulary::new(), Vec::new(), Vec::new()).expect("empty rule set is valid")
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn superiorities(&self) -> &[(String, String)] {
        &self.superiorities
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.by_label.get(label).map(|&i| &self.rules[i])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    /// True if rule `a` is declared superior to rule `b` (by index).
    pub fn is_superior(&self, a: usize, b: usize) -> bool {
        self.superior.contains(&(a, b))
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Returns the nodes of some cycle in the directed graph, if any.
pub(crate) fn find_cycle(n: usize, edges: &BTreeSet<(usize, usize)>) -> Option<Vec<usize>> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();

    fn visit(
        v: usize,
        succ: &[Vec<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &w in &succ[v] {
            match state[w] {
                0 => {
                    if let Some(c) = visit(w, succ, state, stack) {
                        return Some(c);
                    }
                }
                1 => {
                    let start = stack.iter().position(|&x| x == w).unwrap();
                    return Some(stack[start..].to_vec());
                }
                _ => {}
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }

    (0..n).find_map(|v| {
        if state[v] == 0 {
            visit(v, &succ, &mut state, &mut stack)
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddl::Modality;

    fn rule(label: &str, ante: &[&str], head: (Modality, &str)) -> Rule {
        Rule {
            label: label.into(),
            control_objective: String::new(),
            antecedent: ante.iter().map(|s| s.parse().unwrap()).collect(),
            chain: vec![DeonticElement::new(head.0, head.1.parse().unwrap())],
        }
    }

    fn vocab(atoms: &[&str]) -> Vocabulary {
        atoms.iter().map(|a| (a.to_string(), String::new())).collect()
    }

    #[test]
    fn rejects_two_cycle() {
        let rules = vec![
            rule("A", &[], (Modality::OM, "p")),
            rule("B", &[], (Modality::OM, "-p")),
        ];
        let err = RuleSet::new(
            vocab(&["p"]),
            rules,
            vec![("A".into(), "B".into()), ("B".into(), "A".into())],
        )
        .unwrap_err();
        assert!(matches!(err, RuleSetError::SuperiorityCycle(_)));
    }

    #[test]
    fn rejects_unknown_atom_and_duplicates() {
        let err = RuleSet::new(vocab(&[]), vec![rule("A", &[], (Modality::OM, "Foo"))], vec![])
            .unwrap_err();
        assert!(matches!(err, RuleSetError::UnknownAtom { .. }));

        let err = RuleSet::new(
            vocab(&["p"]),
            vec![rule("A", &[], (Modality::OM, "p")), rule("A", &[], (Modality::P, "p"))],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, RuleSetError::DuplicateLabel(_)));
    }

    #[test]
    fn rejects_permission_in_chain() {
        let mut r = rule("A", &[], (Modality::OM, "p"));
        r.chain.push(DeonticElement::new(Modality::P, "q".parse().unwrap()));
        let err = RuleSet::new(vocab(&["p", "q"]), vec![r], vec![]).unwrap_err();
        assert!(matches!(err, RuleSetError::PermissionInChain(_)));
    }

    #[test]
    fn cycle_finder_reports_longer_cycles() {
        let edges: BTreeSet<_> = [(0, 1), (1, 2), (2, 0), (3, 0)].into_iter().collect();
        let mut c = find_cycle(4, &edges).unwrap();
        c.sort();
        assert_eq!(c, vec![0, 1, 2]);
        let dag: BTreeSet<_> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert!(find_cycle(3, &dag).is_none());
    }
}
