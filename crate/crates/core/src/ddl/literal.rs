use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::LiteralError;

/// A possibly negated propositional atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: String,
    negated: bool,
}

impl Literal {
    pub fn new(atom: impl Into<String>, negated: bool) -> Result<Self, LiteralError> {
        let atom = atom.into();
        if !is_atom(&atom) {
            return Err(LiteralError::BadAtom(atom));
        }
        Ok(Self { atom, negated })
    }

    pub fn positive(atom: impl Into<String>) -> Result<Self, LiteralError> {
        Self::new(atom, false)
    }

    pub fn negative(atom: impl Into<String>) -> Result<Self, LiteralError> {
        Self::new(atom, true)
    }

    pub fn atom(&self) -> &str {
        &self.atom
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// The same atom with the opposite polarity.
    pub fn complement(&self) -> Self {
        Self {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }
}

/// Returns true if `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Literal {
    type Err = LiteralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix('-') {
            Some(rest) => Self::negative(rest),
            None => Self::positive(s),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        f.write_str(&self.atom)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
