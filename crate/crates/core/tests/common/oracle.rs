//! Reference implementations recomputed from first principles.

use std::collections::{BTreeMap, BTreeSet};

use normcheck::ddl::{conflicts, DeonticElement, Literal, Modality, Rule, RuleSet, Vocabulary};
use normcheck::process::AnnotationMap;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct BruteConclusions {
    pub effects: BTreeSet<DeonticElement>,
    /// Blocked candidates; `true` when no superiority is involved.
    pub blocked: BTreeMap<DeonticElement, bool>,
}

fn applicable(rule: &Rule, facts: &BTreeSet<Literal>) -> bool {
    rule.antecedent.iter().all(|l| facts.contains(l))
}

/// A candidate holds if some non-empty team of applicable rules with that
/// head beats every applicable attacker: each attacker has a team member
/// superior to it. All subsets are tried.
pub fn brute_derive(facts: &BTreeSet<Literal>, rs: &RuleSet) -> BruteConclusions {
    let rules = rs.rules();
    let sup = |a: usize, b: usize| {
        rs.superiorities()
            .iter()
            .any(|(x, y)| x == &rules[a].label && y == &rules[b].label)
    };
    let candidates: BTreeSet<DeonticElement> = rules
        .iter()
        .filter(|r| applicable(r, facts))
        .map(|r| r.chain[0].clone())
        .collect();
    let mut out = BruteConclusions { effects: BTreeSet::new(), blocked: BTreeMap::new() };
    for c in candidates {
        let supporters: Vec<usize> = (0..rules.len())
            .filter(|&i| rules[i].chain[0] == c && applicable(&rules[i], facts))
            .collect();
        let attackers: Vec<usize> = (0..rules.len())
            .filter(|&i| conflicts(&rules[i].chain[0], &c) && applicable(&rules[i], facts))
            .collect();
        let mut wins = false;
        for mask in 1u32..(1 << supporters.len()) {
            let team: Vec<usize> = supporters
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &i)| i)
                .collect();
            if attackers.iter().all(|&a| team.iter().any(|&t| sup(t, a))) {
                wins = true;
                break;
            }
        }
        if wins {
            out.effects.insert(c);
        } else {
            let survivors: Vec<usize> = attackers
                .iter()
                .copied()
                .filter(|&a| !supporters.iter().any(|&t| sup(t, a)))
                .collect();
            let ranked = survivors.iter().any(|&a| supporters.iter().any(|&t| sup(a, t)));
            out.blocked.insert(c, !ranked);
        }
    }
    out
}

pub const ATOMS: [&str; 5] = ["a", "b", "c", "d", "e"];

fn random_literal(rng: &mut impl Rng, atoms: usize) -> Literal {
    let atom = ATOMS[rng.gen_range(0..atoms)];
    if rng.gen_bool(0.5) {
        Literal::positive(atom).unwrap()
    } else {
        Literal::negative(atom).unwrap()
    }
}

/// Up to `max_rules` rules over the first `atoms` atoms, with compensation
/// chains up to `max_chain` long and a random acyclic superiority relation.
pub fn random_ruleset(rng: &mut impl Rng, max_rules: usize, atoms: usize, max_chain: usize) -> RuleSet {
    let n = rng.gen_range(1..=max_rules);
    let vocab: Vocabulary = ATOMS[..atoms].iter().map(|a| (a.to_string(), String::new())).collect();
    let rules: Vec<Rule> = (0..n)
        .map(|i| {
            let mut antecedent: Vec<Literal> = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                let l = random_literal(rng, atoms);
                if !antecedent.iter().any(|m| m.atom() == l.atom()) {
                    antecedent.push(l);
                }
            }
            let head = DeonticElement::new(
                *Modality::ALL.choose(rng).unwrap(),
                random_literal(rng, atoms),
            );
            let mut chain = vec![head];
            if !chain[0].modality.is_permission() {
                for _ in 1..rng.gen_range(1..=max_chain) {
                    let m = *Modality::ALL[..5].choose(rng).unwrap();
                    chain.push(DeonticElement::new(m, random_literal(rng, atoms)));
                }
            }
            Rule { label: format!("r{i}"), control_objective: format!("objective {i}"), antecedent, chain }
        })
        .collect();
    // Edges only go from earlier to later in a random order: acyclic.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sup = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(0.3) {
                sup.push((rules[order[x]].label.clone(), rules[order[y]].label.clone()));
            }
        }
    }
    RuleSet::new(vocab, rules, sup).expect("generated rule set is valid")
}

/// A consistent fact set: each atom absent, positive or negative.
pub fn random_facts(rng: &mut impl Rng, atoms: usize) -> BTreeSet<Literal> {
    ATOMS[..atoms]
        .iter()
        .filter_map(|a| match rng.gen_range(0..3) {
            0 => None,
            1 => Some(Literal::positive(*a).unwrap()),
            _ => Some(Literal::negative(*a).unwrap()),
        })
        .collect()
}

pub fn random_annotations(rng: &mut impl Rng, tasks: &[String], atoms: usize) -> AnnotationMap {
    let mut map = AnnotationMap::new("gen");
    for t in tasks {
        let k = rng.gen_range(0..=2);
        if k > 0 {
            map.by_task.insert(t.clone(), (0..k).map(|_| random_literal(rng, atoms)).collect());
        }
    }
    map
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: &'static str,
    /// (rule, element, step, compensated)
    pub violations: BTreeSet<(String, String, usize, bool)>,
    pub warning_codes: BTreeSet<&'static str>,
}

fn holds(l: &Literal, facts: &BTreeSet<Literal>) -> bool {
    if l.is_negated() {
        !facts.contains(&l.complement())
    } else {
        facts.contains(l)
    }
}

struct Judge<'f> {
    facts: &'f [BTreeSet<Literal>],
    violations: Vec<(String, String, usize, bool)>,
    warnings: BTreeSet<&'static str>,
}

impl Judge<'_> {
    fn held_in(&self, l: &Literal, from: usize, to: usize) -> bool {
        (from..=to).any(|k| holds(l, &self.facts[k]))
    }

    /// Judges chain element `idx` of `rule`, in force over [from, to];
    /// `open` means the interval runs to the end of the trace. Returns
    /// whether the element was satisfied or repaired.
    fn element(&mut self, rule: &Rule, idx: usize, from: usize, to: usize, open: bool) -> bool {
        let n = self.facts.len();
        let e = &rule.chain[idx];
        let violation = if e.modality.is_maintenance() {
            let v = (from..=to).find(|&k| self.facts[k].contains(&e.content.complement()));
            if v.is_none() && !self.held_in(&e.content, from, to) {
                self.warnings.insert("weak-non-satisfaction");
            }
            v
        } else {
            let ok = self.held_in(&e.content, from, to)
                || (e.modality.is_preemptive() && self.held_in(&e.content, 0, from));
            if ok {
                None
            } else if open {
                Some(n - 1)
            } else {
                Some(to + 1)
            }
        };
        let Some(v) = violation else { return true };
        let repaired = idx + 1 < rule.chain.len() && self.element(rule, idx + 1, v, n - 1, true);
        self.violations.push((rule.label.clone(), e.to_string(), v, repaired));
        repaired
    }
}

/// Judges a trace by recomputing the facts and conclusions of every
/// prefix from scratch, then reading each obligation off the maximal
/// intervals in which its conclusion is in effect.
pub fn interpret(steps: &[String], ann: &AnnotationMap, rs: &RuleSet) -> Outcome {
    let n = steps.len();
    let facts: Vec<BTreeSet<Literal>> = (0..n)
        .map(|k| {
            let mut f = BTreeSet::new();
            for s in &steps[..=k] {
                for l in ann.by_task.get(s).into_iter().flatten() {
                    f.retain(|m: &Literal| m.atom() != l.atom());
                    f.insert(l.clone());
                }
            }
            f
        })
        .collect();
    let concl: Vec<BruteConclusions> = facts.iter().map(|f| brute_derive(f, rs)).collect();

    let mut out = Outcome { verdict: "", violations: BTreeSet::new(), warning_codes: BTreeSet::new() };
    if concl.iter().any(|c| c.blocked.values().any(|&amb| amb)) {
        out.warning_codes.insert("ambiguous-conclusion");
    }

    let mut judge = Judge { facts: &facts, violations: Vec::new(), warnings: BTreeSet::new() };
    let elements: BTreeSet<&DeonticElement> = concl.iter().flat_map(|c| c.effects.iter()).collect();
    for e in elements.into_iter().filter(|e| e.modality.is_obligation()) {
        let mut k = 0;
        while k < n {
            if !concl[k].effects.contains(e) {
                k += 1;
                continue;
            }
            let a = k;
            while k < n && concl[k].effects.contains(e) {
                k += 1;
            }
            let b = k - 1;
            let rule = rs
                .rules()
                .iter()
                .find(|r| &r.chain[0] == e && applicable(r, &facts[a]))
                .unwrap();
            judge.element(rule, 0, a, b, b + 1 == n);
        }
    }
    let violated_uncompensated = judge.violations.iter().any(|v| !v.3);
    if judge.violations.iter().any(|v| v.3) {
        out.warning_codes.insert("compensated-violation");
    }
    out.violations = judge.violations.into_iter().collect();
    out.warning_codes.extend(judge.warnings);
    out.verdict = if violated_uncompensated {
        "NonCompliant"
    } else if !out.warning_codes.is_empty() {
        "CompliantWithWarnings"
    } else {
        "Compliant"
    };
    out
}

/// The five lawfulness-of-processing rules, built without the XML reader.
pub fn gdpr_like() -> RuleSet {
    let vocab: Vocabulary = ["Proc", "GiveConsent", "DemonstrateConsent", "Contract", "VI"]
        .iter()
        .map(|a| (a.to_string(), String::new()))
        .collect();
    let rule = |label: &str, ante: &[&str], m: Modality, content: &str| Rule {
        label: label.into(),
        control_objective: String::new(),
        antecedent: ante.iter().map(|s| s.parse().unwrap()).collect(),
        chain: vec![DeonticElement::new(m, content.parse().unwrap())],
    };
    let rules = vec![
        rule("Art.6.0", &[], Modality::OM, "-Proc"),
        rule("Art.6.1a", &["GiveConsent"], Modality::P, "Proc"),
        rule("Art.6.1b", &["Contract"], Modality::P, "Proc"),
        rule("Art.6.1d", &["VI"], Modality::P, "Proc"),
        rule("Art.7.1", &["GiveConsent"], Modality::OM, "DemonstrateConsent"),
    ];
    let sup = ["Art.6.1a", "Art.6.1b", "Art.6.1d"]
        .iter()
        .map(|s| (s.to_string(), "Art.6.0".to_string()))
        .collect();
    RuleSet::new(vocab, rules, sup).unwrap()
}
