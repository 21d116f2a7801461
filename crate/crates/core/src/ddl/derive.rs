//! Defeasible derivation of deontic conclusions.
//!
//! Only defeasible rules exist. Conflicts are resolved by team defeat with
//! ambiguity blocking: a conclusion `c` holds when every applicable rule
//! attacking `c` is beaten by some applicable rule concluding `c` that is
//! declared superior to the attacker. If any attacker survives, neither
//! side is concluded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{conflicts, DeonticElement, Literal, RuleSet};
use crate::error::DeriveError;

/// Why a supported conclusion did not make it into the effects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlockReason {
    /// An attacker survives and nothing ranks the two sides.
    Ambiguous,
    /// An attacker survives and is declared superior to the supporting rule.
    DefeatedBySuperiority { superior: String, inferior: String },
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockReason::Ambiguous => f.write_str("ambiguous"),
            BlockReason::DefeatedBySuperiority { superior, .. } => {
                write!(f, "defeated-by-superiority({superior})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttackOutcome {
    /// Beaten by the named supporting rule, which is superior to the attacker.
    DefeatedBySuperiority { by: String },
    NotApplicable,
    /// The attacker survives and blocks the conclusion.
    BlockedUs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attack {
    pub rule: String,
    pub head: DeonticElement,
    pub outcome: AttackOutcome,
}

/// Proof (or refutation) trail for one candidate conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofRecord {
    pub conclusion: DeonticElement,
    /// First applicable rule, in rule-set order, that concludes `conclusion`.
    pub firing_rule: String,
    /// Every applicable rule concluding `conclusion`.
    pub team: Vec<String>,
    pub attackers: Vec<Attack>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConclusionSet {
    pub effects: BTreeSet<DeonticElement>,
    pub blocked: BTreeMap<DeonticElement, BlockReason>,
    pub proofs: BTreeMap<DeonticElement, ProofRecord>,
}

impl ConclusionSet {
    pub fn proof(&self, element: &DeonticElement) -> Option<&ProofRecord> {
        self.proofs.get(element)
    }

    pub fn has_ambiguity(&self) -> bool {
        self.blocked.values().any(|r| *r == BlockReason::Ambiguous)
    }
}

/// Rule indices whose antecedent literals are all in `facts`.
pub fn applicable_rules(facts: &BTreeSet<Literal>, rs: &RuleSet) -> Vec<bool> {
    rs.rules()
        .iter()
        .map(|r| r.antecedent.iter().all(|l| facts.contains(l)))
        .collect()
}

/// Derives the deontic conclusions in force given the asserted facts.
///
/// A literal absent from `facts` is unknown: a rule guarded by `-p` fires
/// only when `-p` itself was asserted. Only the first element of each
/// chain is a candidate; compensations are activated by the compliance
/// engine.
pub fn derive(facts: &BTreeSet<Literal>, rs: &RuleSet) -> Result<ConclusionSet, DeriveError> {
    for l in facts {
        if !rs.vocabulary().contains_key(l.atom()) {
            return Err(DeriveError::UnknownAtom(l.atom().to_string()));
        }
        if !l.is_negated() && facts.contains(&l.complement()) {
            return Err(DeriveError::ContradictoryFacts(l.atom().to_string()));
        }
    }

    let rules = rs.rules();
    let applicable = applicable_rules(facts, rs);

    // Candidate conclusion -> supporting team, in rule order.
    let mut teams: BTreeMap<&DeonticElement, Vec<usize>> = BTreeMap::new();
    for (i, rule) in rules.iter().enumerate() {
        if applicable[i] {
            teams.entry(rule.head()).or_default().push(i);
        }
    }

    let mut out = ConclusionSet::default();
    for (candidate, team) in teams {
        let mut attackers = Vec::new();
        let mut surviving = Vec::new();
        for (s, attacker) in rules.iter().enumerate() {
            if !conflicts(attacker.head(), candidate) {
                continue;
            }
            let outcome = if !applicable[s] {
                AttackOutcome::NotApplicable
            } else if let Some(&t) = team.iter().find(|&&t| rs.is_superior(t, s)) {
                AttackOutcome::DefeatedBySuperiority {
                    by: rules[t].label.clone(),
                }
            } else {
                surviving.push(s);
                AttackOutcome::BlockedUs
            };
            attackers.push(Attack {
                rule: attacker.label.clone(),
                head: attacker.head().clone(),
                outcome,
            });
        }

        if surviving.is_empty() {
            out.effects.insert(candidate.clone());
        } else {
            let reason = surviving
                .iter()
                .find_map(|&s| {
                    team.iter()
                        .find(|&&t| rs.is_superior(s, t))
                        .map(|&t| BlockReason::DefeatedBySuperiority {
                            superior: rules[s].label.clone(),
                            inferior: rules[t].label.clone(),
                        })
                })
                .unwrap_or(BlockReason::Ambiguous);
            out.blocked.insert(candidate.clone(), reason);
        }
        out.proofs.insert(
            candidate.clone(),
            ProofRecord {
                conclusion: candidate.clone(),
                firing_rule: rules[team[0]].label.clone(),
                team: team.iter().map(|&t| rules[t].label.clone()).collect(),
                attackers,
            },
        );
    }
    Ok(out)
}
