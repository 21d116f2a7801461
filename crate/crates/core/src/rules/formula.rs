//! Text form of rule formulas.
//!
//! ```text
//! formula    := [antecedent] "=>" chain
//! antecedent := literal ("," literal)*
//! chain      := element ("(x)" element)*
//! element    := "[" modality "]" literal
//! literal    := ["-"] ATOM
//! ```
//!
//! `(x)` separates the elements of a compensation chain. Whitespace is
//! allowed between tokens.

use std::fmt::Write;

use crate::ddl::{DeonticElement, Literal, Modality};
use crate::error::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub antecedent: Vec<Literal>,
    pub chain: Vec<DeonticElement>,
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { text, pos: 0 };
    let mut antecedent = Vec::new();
    p.skip_ws();
    if !p.at("=>") {
        antecedent.push(p.literal()?);
        loop {
            p.skip_ws();
            if p.eat(",") {
                antecedent.push(p.literal()?);
            } else {
                break;
            }
        }
    }
    p.skip_ws();
    if !p.eat("=>") {
        return Err(p.error("expected \"=>\""));
    }
    let mut chain = vec![p.element()?];
    loop {
        p.skip_ws();
        if p.eat("(x)") {
            chain.push(p.element()?);
        } else {
            break;
        }
    }
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Formula { antecedent, chain })
}

pub fn serialize_formula(f: &Formula) -> String {
    let mut out = String::new();
    for (i, l) in f.antecedent.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{l}").unwrap();
    }
    out.push_str("=>");
    for (i, e) in f.chain.iter().enumerate() {
        if i > 0 {
            out.push_str("(x)");
        }
        write!(out, "{e}").unwrap();
    }
    out
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at(&self, tok: &str) -> bool {
        self.rest().starts_with(tok)
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.at(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        self.pos += len;
        &self.text[start..self.pos]
    }

    fn literal(&mut self) -> Result<Literal, FormulaError> {
        self.skip_ws();
        let negated = self.eat("-");
        self.skip_ws();
        let start = self.pos;
        let atom = self.ident().to_string();
        Literal::new(atom, negated).map_err(|_| FormulaError {
            offset: start,
            message: "expected an atom".into(),
        })
    }

    fn element(&mut self) -> Result<DeonticElement, FormulaError> {
        self.skip_ws();
        if !self.eat("[") {
            return Err(self.error("expected \"[\" opening a modality"));
        }
        self.skip_ws();
        let start = self.pos;
        let name = self.ident().to_string();
        let modality: Modality = name.parse().map_err(|_| FormulaError {
            offset: start,
            message: format!("unknown modality {name:?}"),
        })?;
        self.skip_ws();
        if !self.eat("]") {
            return Err(self.error("expected \"]\""));
        }
        let content = self.literal()?;
        Ok(DeonticElement::new(modality, content))
    }
}
