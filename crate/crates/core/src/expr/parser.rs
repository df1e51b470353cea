//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := base ('^' signed_int)? ;
//! base   := 'z' | number | '(' expr ')' | 'exp' '(' expr ')' | '-' factor ;
//! number := real | '(' real ('+'|'-') real 'i' ')' ;
//! ```
//!
//! Unary minus applies to a whole factor, so `-z^2` is `-(z^2)`. Juxtaposition such as
//! `(z-1)(z-1)` or `2z` is read as multiplication.

use super::Expr;
use crate::{ComplexValue, Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Z,
    Exp,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent only when followed by digits, so `2exp(z)` stays a product.
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
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("malformed number `{lit}`"),
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    match word {
                        "z" => Tok::Z,
                        "exp" => Tok::Exp,
                        _ => Tok::Ident(word.to_string()),
                    },
                    start,
                ));
                continue;
            }
            _ => {
                let c = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        match self.peek() {
            Tok::Ident(name) => Error::UnknownIdentifier {
                name: name.clone(),
                pos: self.offset(),
            },
            Tok::End => Error::Syntax {
                pos: self.offset(),
                msg: format!("expected {what}, found end of input"),
            },
            t => Error::Syntax {
                pos: self.offset(),
                msg: format!("expected {what}, found {t:?}"),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(lhs.into(), self.term()?.into());
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(lhs.into(), self.term()?.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(lhs.into(), self.factor()?.into());
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(lhs.into(), self.factor()?.into());
                }
                Tok::LParen | Tok::Z | Tok::Exp | Tok::Num(_) => {
                    lhs = Expr::Mul(lhs.into(), self.factor()?.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(self.factor()?.into()));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let n = self.signed_int()?;
            return Ok(Expr::Pow(base.into(), n));
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<i32> {
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                let n = v as i32;
                Ok(if negative { -n } else { n })
            }
            _ => Err(Error::Syntax {
                pos: at,
                msg: "exponent must be an integer".into(),
            }),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Z => {
                self.bump();
                Ok(Expr::Var)
            }
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::constant(v, 0.0))
            }
            Tok::Exp => {
                self.bump();
                self.expect(Tok::LParen, "`(` after exp")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Exp(inner.into()))
            }
            Tok::LParen => {
                if let Some(c) = self.complex_literal() {
                    return Ok(Expr::Const(c));
                }
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("an operand")),
        }
    }

    /// `( [-]real (+|-) real i )`; restores the cursor when the lookahead does not match.
    fn complex_literal(&mut self) -> Option<ComplexValue> {
        let save = self.pos;
        let mut attempt = || -> Option<ComplexValue> {
            if self.bump() != Tok::LParen {
                return None;
            }
            let mut re_sign = 1.0;
            if *self.peek() == Tok::Minus {
                self.bump();
                re_sign = -1.0;
            }
            let Tok::Num(re) = self.bump() else {
                return None;
            };
            let im_sign = match self.bump() {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return None,
            };
            let Tok::Num(im) = self.bump() else {
                return None;
            };
            if self.bump() != Tok::Ident("i".into()) {
                return None;
            }
            if self.bump() != Tok::RParen {
                return None;
            }
            Some(ComplexValue::new(re_sign * re, im_sign * im))
        };
        let out = attempt();
        if out.is_none() {
            self.pos = save;
        }
        out
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn reciprocal() {
        assert_eq!(
            parse("1/z").unwrap(),
            Expr::Div(b(Expr::constant(1.0, 0.0)), b(Expr::Var))
        );
    }

    #[test]
    fn negative_power_plus_exp() {
        assert_eq!(
            parse("z^-3 + exp(z)").unwrap(),
            Expr::Add(b(Expr::Pow(b(Expr::Var), -3)), b(Expr::Exp(b(Expr::Var))))
        );
    }

    #[test]
    fn complex_literal_in_denominator() {
        assert_eq!(
            parse("1/(z-(2+0i))").unwrap(),
            Expr::Div(
                b(Expr::constant(1.0, 0.0)),
                b(Expr::Sub(b(Expr::Var), b(Expr::constant(2.0, 0.0))))
            )
        );
        assert_eq!(parse("(-1.5-2e-1i)").unwrap(), Expr::constant(-1.5, -0.2));
    }

    #[test]
    fn parenthesized_real_sum_is_not_a_literal() {
        assert_eq!(
            parse("(1+2)").unwrap(),
            Expr::Add(b(Expr::constant(1.0, 0.0)), b(Expr::constant(2.0, 0.0)))
        );
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(
            parse("-z^2").unwrap(),
            Expr::Neg(b(Expr::Pow(b(Expr::Var), 2)))
        );
    }

    #[test]
    fn juxtaposition_multiplies() {
        assert_eq!(
            parse("(z-1)(z-1)").unwrap(),
            Expr::Mul(
                b(Expr::Sub(b(Expr::Var), b(Expr::constant(1.0, 0.0)))),
                b(Expr::Sub(b(Expr::Var), b(Expr::constant(1.0, 0.0))))
            )
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse(" z ^ - 2 ").unwrap(), parse("z^-2").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("z + log(z)") {
            Err(Error::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "log");
                assert_eq!(pos, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("z * ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("z^1.5"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(z"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("z $"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("z^2^2"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("i"), Err(Error::UnknownIdentifier { .. })));
    }
}
