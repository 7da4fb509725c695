//! Recursive-descent parser for the lagrangian DSL.
//!
//! ```text
//! lagrangian := term ('+' term)* ('-' 'V(' potential ')')?
//! term       := REAL '*' 'q[' REAL ']'
//! potential  := 'free' | 'harmonic,' REAL | 'poly,' REAL (',' REAL)* | 'well,' REAL
//! ```
//!
//! Whitespace is insignificant. `q[β]` stands for the product of the causal
//! and retrocausal derivatives of order β. An empty input parses to an empty
//! (degenerate) lagrangian.

use num_rational::Rational64;
use thiserror::Error;

use super::{LagrangianSpec, PotentialSpec, ProductTerm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("unexpected character {ch:?} at byte {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("order {order} at byte {offset} duplicates the term at byte {first}")]
    DuplicateOrder { order: String, offset: usize, first: usize },
    #[error("negative order {order} at byte {offset}")]
    NegativeOrder { order: String, offset: usize },
    #[error("number {text:?} at byte {offset} is not representable")]
    InvalidNumber { text: String, offset: usize },
    #[error("invalid potential at byte {offset}: {reason}")]
    InvalidPotential { offset: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    Ident,
    Star,
    Plus,
    Minus,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    kind: Kind,
    text: &'a str,
    offset: usize,
}

impl Token<'_> {
    fn describe(&self) -> String {
        match self.kind {
            Kind::End => "end of input".to_string(),
            _ => format!("{:?}", self.text),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |kind| Token { kind, text: &src[start..start + 1], offset: start };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'*' => tokens.push(single(Kind::Star)),
            b'+' => tokens.push(single(Kind::Plus)),
            b'-' => tokens.push(single(Kind::Minus)),
            b'[' => tokens.push(single(Kind::LBracket)),
            b']' => tokens.push(single(Kind::RBracket)),
            b'(' => tokens.push(single(Kind::LParen)),
            b')' => tokens.push(single(Kind::RParen)),
            b',' => tokens.push(single(Kind::Comma)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                tokens.push(Token { kind: Kind::Number, text: &src[start..i], offset: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { kind: Kind::Ident, text: &src[start..i], offset: start });
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedChar { offset: start, ch });
            }
        }
        i += 1;
    }
    tokens.push(Token { kind: Kind::End, text: "", offset: src.len() });
    Ok(tokens)
}

/// A signed REAL literal, kept both as `f64` and as its source text.
struct Real<'a> {
    value: f64,
    negative: bool,
    digits: &'a str,
    offset: usize,
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token<'a> {
        self.tokens[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> Token<'a> {
        self.tokens[(self.pos + ahead).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token<'a> {
        let t = self.tokens[self.pos];
        if t.kind != Kind::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax { offset: t.offset, expected: expected.to_vec(), found: t.describe() })
    }

    fn expect(&mut self, kind: Kind, label: &'static str) -> Result<Token<'a>, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.fail(&[label])
        }
    }

    fn expect_ident(&mut self, name: &'static str, label: &'static str) -> Result<(), ParseError> {
        let t = self.peek();
        if t.kind == Kind::Ident && t.text == name {
            self.bump();
            Ok(())
        } else {
            self.fail(&[label])
        }
    }

    fn real(&mut self) -> Result<Real<'a>, ParseError> {
        let offset = self.peek().offset;
        let negative = if self.peek().kind == Kind::Minus {
            self.bump();
            true
        } else {
            false
        };
        let t = self.expect(Kind::Number, "number")?;
        let magnitude: f64 = t
            .text
            .parse()
            .map_err(|_| ParseError::InvalidNumber { text: t.text.to_string(), offset: t.offset })?;
        if !magnitude.is_finite() {
            return Err(ParseError::InvalidNumber { text: t.text.to_string(), offset: t.offset });
        }
        let value = if negative { -magnitude } else { magnitude };
        Ok(Real { value, negative, digits: t.text, offset })
    }

    fn lagrangian(&mut self) -> Result<LagrangianSpec, ParseError> {
        let mut raw: Vec<(f64, Rational64, usize)> = Vec::new();
        let mut potential = PotentialSpec::Free;

        let starts_potential = |p: &Self| {
            p.peek().kind == Kind::Minus && p.peek_at(1).kind == Kind::Ident && p.peek_at(1).text == "V"
        };

        if self.peek().kind != Kind::End && !starts_potential(self) {
            raw.push(self.term()?);
            while self.peek().kind == Kind::Plus {
                self.bump();
                raw.push(self.term()?);
            }
        }
        if self.peek().kind == Kind::Minus {
            if !starts_potential(self) {
                self.bump();
                return self.fail(&["'V('"]);
            }
            self.bump();
            self.bump();
            self.expect(Kind::LParen, "'('")?;
            potential = self.potential()?;
            self.expect(Kind::RParen, "')'")?;
        }
        if self.peek().kind != Kind::End {
            return if raw.is_empty() {
                self.fail(&["number", "'-'", "end of input"])
            } else {
                self.fail(&["'+'", "'-'", "end of input"])
            };
        }

        for (i, (_, order, offset)) in raw.iter().enumerate() {
            if let Some((_, _, first)) = raw[..i].iter().find(|(_, o, _)| o == order) {
                return Err(ParseError::DuplicateOrder {
                    order: super::fmt_order(*order),
                    offset: *offset,
                    first: *first,
                });
            }
        }
        let terms = raw
            .into_iter()
            .filter(|(c, _, _)| *c != 0.0)
            .map(|(coeff, order, _)| ProductTerm { coeff, order })
            .collect();
        Ok(LagrangianSpec { terms, potential })
    }

    fn term(&mut self) -> Result<(f64, Rational64, usize), ParseError> {
        let coeff = self.real()?;
        self.expect(Kind::Star, "'*'")?;
        self.expect_ident("q", "'q['")?;
        self.expect(Kind::LBracket, "'['")?;
        let order = self.real()?;
        self.expect(Kind::RBracket, "']'")?;
        if order.negative && order.value != 0.0 {
            return Err(ParseError::NegativeOrder {
                order: format!("-{}", order.digits),
                offset: order.offset,
            });
        }
        let exact = decimal_to_rational(order.digits).ok_or_else(|| ParseError::InvalidNumber {
            text: order.digits.to_string(),
            offset: order.offset,
        })?;
        Ok((coeff.value, exact, coeff.offset))
    }

    fn potential(&mut self) -> Result<PotentialSpec, ParseError> {
        let t = self.peek();
        if t.kind != Kind::Ident {
            return self.fail(&["'free'", "'harmonic,'", "'poly,'", "'well,'"]);
        }
        let spec = match t.text {
            "free" => {
                self.bump();
                PotentialSpec::Free
            }
            "harmonic" => {
                self.bump();
                self.expect(Kind::Comma, "','")?;
                PotentialSpec::Harmonic { k: self.real()?.value }
            }
            "poly" => {
                self.bump();
                self.expect(Kind::Comma, "','")?;
                let mut coeffs = vec![self.real()?.value];
                while self.peek().kind == Kind::Comma {
                    self.bump();
                    coeffs.push(self.real()?.value);
                }
                PotentialSpec::Polynomial { coeffs }
            }
            "well" => {
                self.bump();
                self.expect(Kind::Comma, "','")?;
                PotentialSpec::InfiniteWell { length: self.real()?.value }
            }
            _ => return self.fail(&["'free'", "'harmonic,'", "'poly,'", "'well,'"]),
        };
        spec.validate().map_err(|reason| ParseError::InvalidPotential { offset: t.offset, reason })?;
        Ok(spec)
    }
}

/// Exact value of an unsigned decimal literal such as `0.25` or `5e-1`.
pub(crate) fn decimal_to_rational(text: &str) -> Option<Rational64> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let mut numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let mut denom: i128 = 1;
    let scale = exponent - frac_part.len() as i32;
    let pow = 10_i128.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        numer = numer.checked_mul(pow)?;
    } else {
        denom = pow;
    }
    let g = gcd(numer, denom);
    let (numer, denom) = (numer / g, denom / g);
    Some(Rational64::new(i64::try_from(numer).ok()?, i64::try_from(denom).ok()?))
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs().max(1)
}

pub fn parse_lagrangian(text: &str) -> Result<LagrangianSpec, ParseError> {
    let tokens = lex(text)?;
    Parser { tokens, pos: 0 }.lagrangian()
}

/// Parses only the `potential` production, e.g. `harmonic, 1.0`.
pub fn parse_potential(text: &str) -> Result<PotentialSpec, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let spec = p.potential()?;
    if p.peek().kind != Kind::End {
        return p.fail(&["end of input"]);
    }
    Ok(spec)
}
