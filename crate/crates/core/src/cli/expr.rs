//! Arithmetic expressions in `t` and `y` over `F_q`: integers, `+ - * / ^`,
//! parentheses, and juxtaposition as multiplication (`2t`, `t(y+1)`).

use crate::funcfield::{CurveDescriptor, FieldElement};
use crate::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Var(char),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = cs[start..i].iter().collect();
                let n = text.parse().map_err(|_| invalid(format!("integer {text} out of range")))?;
                out.push(Tok::Int(n));
            }
            't' | 'y' => {
                out.push(Tok::Var(c));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            _ => return Err(invalid(format!("unexpected character '{c}' in element"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    curve: &'a CurveDescriptor,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<FieldElement> {
        let mut acc = if self.eat('-') { self.product()?.neg() } else { self.product()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Var(_)) | Some(Tok::Op('(')))
    }

    fn product(&mut self) -> Result<FieldElement> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?)?;
            } else if self.eat('/') {
                let d = self.power()?;
                if d.is_zero() {
                    return Err(invalid("division by zero in element"));
                }
                acc = acc.div(&d)?;
            } else if self.starts_factor() {
                acc = acc.mul(&self.power()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let Some(Tok::Int(e)) = self.peek().cloned() else {
                return Err(invalid("exponent must be an integer"));
            };
            self.pos += 1;
            if base.is_zero() && neg {
                return Err(invalid("division by zero in element"));
            }
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FieldElement> {
        let c = self.curve;
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(FieldElement::constant(c, c.base().from_int(n)))
            }
            Some(Tok::Var('t')) => {
                self.pos += 1;
                Ok(FieldElement::t(c))
            }
            Some(Tok::Var(_)) => {
                self.pos += 1;
                FieldElement::y(c)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(invalid("missing ')' in element"));
                }
                Ok(e)
            }
            _ => Err(invalid("malformed element")),
        }
    }
}

/// Parses an element of the function field of `curve`.
pub fn parse_element(curve: &CurveDescriptor, s: &str) -> Result<FieldElement> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        curve,
    };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(invalid(format!("trailing input in element '{s}'")));
    }
    Ok(e)
}
