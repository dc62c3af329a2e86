//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' '-'? integer)?
//! base   := integer | name | '(' expr ')' | func '(' expr ')'
//! ```
//!
//! Rational literals are written as a quotient of integers (`1/2`).

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::String;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { pos: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnknownSymbol { pos, .. } => *pos,
        }
    }
}

/// Parses `text` over the coordinate names `coords`.
pub fn parse_expr<S: AsRef<str>>(text: &str, coords: &[S]) -> Result<Expr, ParseError> {
    parse_expr_with::<S, &str>(text, coords, &[])
}

/// Parses `text` over `coords`, substituting each named definition in `defs`
/// wherever its name occurs.
pub fn parse_expr_with<S: AsRef<str>, N: AsRef<str>>(
    text: &str,
    coords: &[S],
    defs: &[(N, Expr)],
) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords,
        defs,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a, S, N> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [S],
    defs: &'a [(N, Expr)],
}

impl<S: AsRef<str>, N: AsRef<str>> Parser<'_, S, N> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos,
                message: alloc::format!("expected `{}`", c as char),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = alloc::vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                acc = match acc {
                    Expr::Product(mut v) => {
                        v.push(rhs);
                        Expr::Product(v)
                    }
                    other => Expr::Product(alloc::vec![other, rhs]),
                };
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                acc = Expr::Quotient(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Num(q) => Expr::Num(-q),
                other => Expr::Neg(Box::new(other)),
            });
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.syntax("expected integer exponent"));
            }
            let k: i32 = digits.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                message: "exponent out of range".to_owned(),
            })?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits().parse().expect("ascii digits");
                Ok(Expr::Num(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let func = match name {
                    "exp" => Some(Func::Exp),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(func) = func {
                    self.expect(b'(')?;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Expr::Apply(func, Box::new(arg)));
                }
                if let Some(i) = self.coords.iter().position(|c| c.as_ref() == name) {
                    return Ok(Expr::Symbol(i));
                }
                if let Some((_, e)) = self.defs.iter().rev().find(|(n, _)| n.as_ref() == name) {
                    return Ok(e.clone());
                }
                Err(ParseError::UnknownSymbol {
                    pos: start,
                    name: name.to_owned(),
                })
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;

    const C3: [&str; 3] = ["x1", "x2", "x3"];

    #[test]
    fn symbols_of_simple_expression() {
        let e = parse_expr("x1^2 + exp(x3)", &C3).unwrap();
        assert_eq!(e.symbols().into_iter().collect::<Vec<_>>(), [0, 2]);
    }

    #[test]
    fn unknown_symbol_reports_position() {
        let err = parse_expr("x1 + x4", &C3).unwrap_err();
        assert_eq!(err, ParseError::UnknownSymbol { pos: 5, name: "x4".to_string() });
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(parse_expr("x1 + ", &C3).unwrap_err().position(), 5);
        assert_eq!(parse_expr("(x1", &C3).unwrap_err().position(), 3);
        assert_eq!(parse_expr("x1 x2", &C3).unwrap_err().position(), 3);
        assert!(parse_expr("x1^", &C3).is_err());
    }

    #[test]
    fn named_subexpression_is_substituted() {
        let f = parse_expr("1 + x1^2", &C3).unwrap();
        let e = parse_expr_with("-(1/f)", &C3, &[("f", f)]).unwrap();
        let printed = e.display(&C3).to_string();
        let again = parse_expr(&printed, &C3).unwrap();
        assert_eq!(
            again.canonicalize().unwrap(),
            e.canonicalize().unwrap()
        );
        assert_eq!(printed, "-(1/(1 + x1^2))");
    }

    #[test]
    fn negative_exponents_and_rationals() {
        let e = parse_expr("x1^-2 * 3/4", &C3).unwrap();
        let v = e.eval(&[2.0, 0.0, 0.0], 1e-9).unwrap();
        assert!((v - 0.1875).abs() < 1e-15);
    }
}
