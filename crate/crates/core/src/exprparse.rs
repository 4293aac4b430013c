//! Text syntax for rational functions in one indeterminate.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'* atom ('^' integer)?
//! atom   := integer | VAR | '(' expr ')'
//! ```
//!
//! `VAR` is `x` for generating functions and `n` for recurrence
//! coefficients. Whitespace is ignored. Multiplication is always explicit
//! and exponents are nonnegative integer literals, so `-x^2` is `-(x^2)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::ratpoly::{BigRat, Poly, RationalFunction};

/// Exponents above this are rejected.
pub const MAX_EXPONENT: u32 = 1024;
/// Parenthesis nesting limit.
pub const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Integer(BigInt),
    Symbol,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprToken<'a> {
    pub kind: TokenKind,
    pub literal: &'a str,
    /// Character offset into the input.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character '{found}' at offset {position}")]
    Lexical { found: char, position: usize },
    #[error("syntax error at offset {position}: expected {expected}, found {found}")]
    Syntax {
        expected: &'static str,
        found: String,
        position: usize,
    },
    #[error("division by zero at offset {position}")]
    ZeroDenominator { position: usize },
    #[error("exponent at offset {position} exceeds {MAX_EXPONENT}")]
    ExponentTooLarge { position: usize },
    #[error("parentheses nested deeper than {MAX_DEPTH} at offset {position}")]
    TooDeep { position: usize },
    #[error("expected a polynomial in {var}, got a proper rational function")]
    NotPolynomial { var: char },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Lexical { position, .. }
            | ParseError::Syntax { position, .. }
            | ParseError::ZeroDenominator { position }
            | ParseError::ExponentTooLarge { position }
            | ParseError::TooDeep { position } => Some(*position),
            ParseError::NotPolynomial { .. } => None,
        }
    }
}

pub fn tokenize(input: &str, var: char) -> Result<Vec<ExprToken<'_>>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = input.char_indices().enumerate().peekable();
    while let Some((position, (byte, c))) = chars.next() {
        let single = |kind| ExprToken {
            kind,
            literal: &input[byte..byte + c.len_utf8()],
            position,
        };
        let token = match c {
            c if c.is_whitespace() => continue,
            '+' => single(TokenKind::Plus),
            '-' => single(TokenKind::Minus),
            '*' => single(TokenKind::Star),
            '/' => single(TokenKind::Slash),
            '^' => single(TokenKind::Caret),
            '(' => single(TokenKind::LParen),
            ')' => single(TokenKind::RParen),
            c if c == var => single(TokenKind::Symbol),
            '0'..='9' => {
                let mut end = byte + 1;
                while let Some((_, (b, d))) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = b + 1;
                    chars.next();
                }
                let literal = &input[byte..end];
                ExprToken {
                    kind: TokenKind::Integer(literal.parse().expect("ascii digits")),
                    literal,
                    position,
                }
            }
            found => return Err(ParseError::Lexical { found, position }),
        };
        tokens.push(token);
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<ExprToken<'a>>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.position)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = self.tokens.get(self.pos).map_or_else(
            || "end of input".to_string(),
            |t| format!("'{}'", t.literal),
        );
        ParseError::Syntax {
            expected,
            found,
            position: self.offset(),
        }
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(TokenKind::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(TokenKind::Slash) => {
                    let position = self.offset();
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|_| ParseError::ZeroDenominator { position })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction, ParseError> {
        let mut negations = 0usize;
        while self.peek() == Some(&TokenKind::Minus) {
            negations += 1;
            self.pos += 1;
        }
        let mut value = self.atom()?;
        if self.peek() == Some(&TokenKind::Caret) {
            self.pos += 1;
            let position = self.offset();
            let exp = match self.peek() {
                Some(TokenKind::Integer(e)) => e.clone(),
                _ => return Err(self.unexpected("nonnegative integer exponent")),
            };
            self.pos += 1;
            let exp = exp
                .to_u32()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or(ParseError::ExponentTooLarge { position })?;
            value = value.pow(exp);
        }
        Ok(if negations % 2 == 1 {
            value.neg()
        } else {
            value
        })
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek() {
            Some(TokenKind::Integer(v)) => {
                let v = RationalFunction::constant(BigRat::from_integer(v.clone()));
                self.pos += 1;
                Ok(v)
            }
            Some(TokenKind::Symbol) => {
                self.pos += 1;
                Ok(RationalFunction::x())
            }
            Some(TokenKind::LParen) => {
                if self.depth == MAX_DEPTH {
                    return Err(ParseError::TooDeep {
                        position: self.offset(),
                    });
                }
                self.depth += 1;
                self.pos += 1;
                let inner = self.expr()?;
                self.depth -= 1;
                if self.peek() != Some(&TokenKind::RParen) {
                    return Err(self.unexpected("')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected("integer, variable or '('")),
        }
    }
}

/// Parses an expression in the indeterminate `var`.
pub fn parse_ratexpr_in(input: &str, var: char) -> Result<RationalFunction, ParseError> {
    let tokens = tokenize(input, var)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: input.chars().count(),
        depth: 0,
    };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.unexpected("operator or end of input"));
    }
    Ok(value)
}

/// Parses an expression in `x`.
pub fn parse_ratexpr(input: &str) -> Result<RationalFunction, ParseError> {
    parse_ratexpr_in(input, 'x')
}

/// Parses an expression that must reduce to a polynomial in `var`.
pub fn parse_poly_in(input: &str, var: char) -> Result<Poly, ParseError> {
    parse_ratexpr_in(input, var)?
        .to_poly()
        .ok_or(ParseError::NotPolynomial { var })
}

/// Renders `f` so that [`parse_ratexpr`] reads it back exactly.
pub fn format_ratexpr(f: &RationalFunction) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn parses_egf_factor() {
        assert_eq!(parse_ratexpr("-1/(1-2*x)").unwrap(), rf(&[-1], &[1, -2]));
        assert_eq!(parse_ratexpr("x").unwrap(), rf(&[0, 1], &[1]));
        assert_eq!(parse_ratexpr("(1-2*x)^2").unwrap(), rf(&[1, -4, 4], &[1]));
        assert_eq!(parse_ratexpr("-x/(1-2*x)").unwrap(), rf(&[0, -1], &[1, -2]));
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_ratexpr("1-2*x^2").unwrap(), rf(&[1, 0, -2], &[1]));
        assert_eq!(parse_ratexpr("-x^2").unwrap(), rf(&[0, 0, -1], &[1]));
        assert_eq!(parse_ratexpr("--x").unwrap(), rf(&[0, 1], &[1]));
        assert_eq!(parse_ratexpr("1/2/x").unwrap(), rf(&[1], &[0, 2]));
        assert_eq!(
            parse_ratexpr(" 2 * ( x + 1 ) ^ 0 ").unwrap(),
            rf(&[2], &[1])
        );
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(
            parse_ratexpr("1/(x-x)"),
            Err(ParseError::ZeroDenominator { position: 1 })
        );
    }

    #[test]
    fn lexical_and_syntax_errors_carry_positions() {
        assert_eq!(
            parse_ratexpr("1 + y"),
            Err(ParseError::Lexical {
                found: 'y',
                position: 4
            })
        );
        let err = parse_ratexpr("1/(1-2*x").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Syntax {
                position: 8,
                expected: "')'",
                ..
            }
        ));
        // implicit multiplication is rejected
        assert_eq!(parse_ratexpr("2x").unwrap_err().position(), Some(1));
        assert_eq!(parse_ratexpr("x^-1").unwrap_err().position(), Some(2));
        assert_eq!(parse_ratexpr("").unwrap_err().position(), Some(0));
        assert!(matches!(
            parse_ratexpr("x^99999"),
            Err(ParseError::ExponentTooLarge { position: 2 })
        ));
        let deep = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(matches!(
            parse_ratexpr(&deep),
            Err(ParseError::TooDeep { .. })
        ));
    }

    #[test]
    fn polynomial_in_n() {
        assert_eq!(
            parse_poly_in("4*(n-1)^2", 'n').unwrap(),
            Poly::from_ints(&[4, -8, 4])
        );
        assert!(parse_poly_in("1/n", 'n').is_err());
        assert!(parse_poly_in("x", 'n').is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_ratexpr(&rf(&[-1], &[1, -2])), "(-1)/(1 - 2*x)");
        assert_eq!(format_ratexpr(&rf(&[0, 1], &[1])), "x");
        let sq = &Poly::from_ints(&[1, -2]) * &Poly::from_ints(&[1, -2]);
        let f = RationalFunction::new(Poly::from_ints(&[1, -4]), sq).unwrap();
        assert_eq!(format_ratexpr(&f), "(1 - 4*x)/(1 - 4*x + 4*x^2)");
    }
}
