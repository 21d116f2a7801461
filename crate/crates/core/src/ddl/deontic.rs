use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::Literal;

/// Normative mode of a rule conclusion.
///
/// The five obligation modes are persistent obligations: `OM` is a
/// maintenance obligation, the `OA*` modes are achievement obligations
/// that vary along preemptive (`P`/`NP`) and perdurant (`P`/`NP`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    OM,
    OAPP,
    OAPNP,
    OANPP,
    OANPNP,
    P,
}

impl Modality {
    pub const ALL: [Modality; 6] = [
        Modality::OM,
        Modality::OAPP,
        Modality::OAPNP,
        Modality::OANPP,
        Modality::OANPNP,
        Modality::P,
    ];

    pub fn is_obligation(self) -> bool {
        self != Modality::P
    }

    pub fn is_permission(self) -> bool {
        self == Modality::P
    }

    pub fn is_maintenance(self) -> bool {
        self == Modality::OM
    }

    pub fn is_achievement(self) -> bool {
        matches!(
            self,
            Modality::OAPP | Modality::OAPNP | Modality::OANPP | Modality::OANPNP
        )
    }

    /// Fulfilment before entering into force counts.
    pub fn is_preemptive(self) -> bool {
        matches!(self, Modality::OAPP | Modality::OAPNP)
    }

    /// Stays in force after a violation.
    pub fn is_perdurant(self) -> bool {
        matches!(self, Modality::OAPP | Modality::OANPP)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::OM => "OM",
            Modality::OAPP => "OAPP",
            Modality::OAPNP => "OAPNP",
            Modality::OANPP => "OANPP",
            Modality::OANPNP => "OANPNP",
            Modality::P => "P",
        }
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A modality applied to a literal, e.g. `[OM]-Proc`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeonticElement {
    pub modality: Modality,
    pub content: Literal,
}

impl DeonticElement {
    pub fn new(modality: Modality, content: Literal) -> Self {
        Self { modality, content }
    }
}

impl fmt::Display for DeonticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]{}", self.modality, self.content)
    }
}

impl Serialize for DeonticElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Whether two deontic elements cannot hold together.
///
/// Two obligations over complementary contents conflict, and so does an
/// obligation over `l` with a permission over the complement of `l`.
/// Permissions never conflict with each other.
pub fn conflicts(a: &DeonticElement, b: &DeonticElement) -> bool {
    if a.content != b.content.complement() {
        return false;
    }
    a.modality.is_obligation() || b.modality.is_obligation()
}
