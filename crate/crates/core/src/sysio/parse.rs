use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::polyring::{Exponents, Integers, MultiPoly};

/// Location and expectation of a polynomial syntax error. Lines and columns
/// are one-based; columns count characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: expected {}", self.line, self.column, self.expected)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    fn at(text: &str, offset: usize, expected: impl Into<String>) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        ParseError { offset, line, column, expected: expected.into() }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    names: &'a [String],
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, offset: usize, expected: impl Into<String>) -> ParseError {
        // Errors at the end of input point at the last character.
        let offset = if offset >= self.text.len() && !self.text.is_empty() {
            self.text.char_indices().last().map_or(0, |(i, _)| i)
        } else {
            offset
        };
        ParseError::at(self.text, offset, expected)
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek()? {
            '+' => {
                self.bump();
                Some(false)
            }
            '-' | '\u{2212}' => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        (self.pos > start).then(|| &self.text[start..self.pos])
    }

    fn exponent(&mut self, caret: usize) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(d) = self.digits() else {
            return Err(self.err(caret, "a positive integer exponent after '^'"));
        };
        match d.parse::<u32>() {
            Ok(e) if e > 0 => Ok(e),
            _ => Err(self.err(start, "a positive integer exponent below 2^32")),
        }
    }

    fn factor(&mut self, coeff: &mut BigInt, exps: &mut [u32]) -> Result<(), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if let Some(d) = self.digits() {
            *coeff *= d.parse::<BigInt>().expect("ascii digits");
            return Ok(());
        }
        if !self.peek().is_some_and(is_ident_start) {
            return Err(self.err(start, "an integer or a variable name"));
        }
        while self.peek().is_some_and(is_ident_char) {
            self.bump();
        }
        let name = &self.text[start..self.pos];
        let Some(v) = self.names.iter().position(|n| n == name) else {
            return Err(self.err(start, format!("one of the variables {}", self.names.join(", "))));
        };
        self.skip_ws();
        let mut e = 1;
        if self.peek() == Some('^') {
            let caret = self.pos;
            self.bump();
            e = self.exponent(caret)?;
        }
        exps[v] = exps[v]
            .checked_add(e)
            .ok_or_else(|| self.err(start, "exponents whose sum fits in 32 bits"))?;
        Ok(())
    }

    fn term(&mut self, negative: bool) -> Result<(Exponents, BigInt), ParseError> {
        let mut coeff = if negative { -BigInt::one() } else { BigInt::one() };
        let mut exps = vec![0u32; self.names.len()];
        self.factor(&mut coeff, &mut exps)?;
        loop {
            self.skip_ws();
            if self.peek() != Some('*') {
                break;
            }
            self.bump();
            self.factor(&mut coeff, &mut exps)?;
        }
        Ok((Exponents::from_vec(exps), coeff))
    }

    fn poly(&mut self) -> Result<MultiPoly<Integers>, ParseError> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negative = self.sign().unwrap_or(false);
        loop {
            terms.push(self.term(negative)?);
            self.skip_ws();
            if self.pos == self.text.len() {
                break;
            }
            let at = self.pos;
            negative = self.sign().ok_or_else(|| self.err(at, "'+', '-', '*' or end of input"))?;
        }
        Ok(MultiPoly::from_terms(Integers, self.names.len(), terms.into_iter().filter(|(_, c)| !c.is_zero())))
    }
}

/// Parses a sum of signed monomials such as `2*X1*X2^2 - 3*X2 + 4` over the
/// given variable names. Repeated factors multiply and like terms combine.
pub fn parse_polynomial(text: &str, names: &[String]) -> Result<MultiPoly<Integers>, ParseError> {
    Parser { text, pos: 0, names }.poly()
}

/// Canonical text of a polynomial: descending lexicographic term order.
pub fn format_polynomial(p: &MultiPoly<Integers>, names: &[String]) -> String {
    p.to_string_with(names)
}
