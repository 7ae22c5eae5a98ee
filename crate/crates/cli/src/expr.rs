//! Expressions in `t` over the rationals.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' INTEGER)?
//! atom  := INTEGER | 't' | '(' expr ')'
//! ```

use std::fmt;

use num_bigint::BigInt;
use polycong::arith::Rat;
use polycong::polyfield::{IntPoly, RatFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprError {
    Syntax { offset: usize, message: String },
    DivisionByZero { offset: usize },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Syntax { offset, message } => write!(f, "syntax error at offset {offset}: {message}"),
            ExprError::DivisionByZero { offset } => write!(f, "division by the zero function at offset {offset}"),
        }
    }
}

impl std::error::Error for ExprError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::T => f.write_str("t"),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::Open => f.write_str("("),
            Tok::Close => f.write_str(")"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            b't' => Tok::T,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::Open,
            b')' => Tok::Close,
            _ => {
                let ch = src[i..].chars().next().expect("in bounds");
                return Err(syntax(i, format!("unexpected character {ch:?}")));
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if t.1 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).ok_or(ExprError::DivisionByZero { offset: at })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            (at, Tok::Int(e)) => {
                let e = u32::try_from(&e).map_err(|_| syntax(at, "exponent too large"))?;
                Ok(base.pow(e))
            }
            (at, tok) => Err(syntax(at, format!("expected a nonnegative integer exponent, found {tok}"))),
        }
    }

    fn atom(&mut self) -> Result<RatFunc, ExprError> {
        match self.bump() {
            (_, Tok::Int(n)) => Ok(RatFunc::constant(Rat::from_integer(n))),
            (_, Tok::T) => Ok(RatFunc::t()),
            (_, Tok::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    (_, Tok::Close) => Ok(inner),
                    (at, tok) => Err(syntax(at, format!("expected ')', found {tok}"))),
                }
            }
            (at, tok) => Err(syntax(at, format!("expected a number, 't' or '(', found {tok}"))),
        }
    }
}

/// A parsed expression and, when it lies in `Z[t]`, its integer form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub value: RatFunc,
    pub integral: Option<IntPoly>,
}

pub fn parse_expression(src: &str) -> Result<Parsed, ExprError> {
    let mut parser = Parser { toks: lex(src)?, pos: 0 };
    let value = parser.expr()?;
    match parser.bump() {
        (_, Tok::End) => {}
        (at, Tok::T | Tok::Int(_) | Tok::Open) => {
            return Err(syntax(at, "expected an operator; multiplication must be written with '*'"))
        }
        (at, tok) => return Err(syntax(at, format!("unexpected {tok}"))),
    }
    let integral = value.to_int_poly();
    Ok(Parsed { value, integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn val(s: &str) -> RatFunc {
        parse_expression(s).unwrap().value
    }

    #[test]
    fn examples() {
        let p = parse_expression("2*t^2 - 2*t").unwrap();
        assert_eq!(p.integral, Some(IntPoly::from_i64s(&[0, -2, 2])));
        let p = parse_expression("(t - t^3)/(1 - t^2)").unwrap();
        assert_eq!(p.value, RatFunc::t());
        assert_eq!(
            parse_expression("2t").unwrap_err(),
            ExprError::Syntax { offset: 1, message: "expected an operator; multiplication must be written with '*'".into() }
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(val("-t^2"), -&RatFunc::t().pow(2));
        assert_eq!(val("(-t)^2"), RatFunc::t().pow(2));
        assert_eq!(val("1 - 2 - 3"), RatFunc::from_i64(-4));
        assert_eq!(val("12/2/3"), RatFunc::from_i64(2));
        assert_eq!(val("2 + 3*t"), IntPoly::from_i64s(&[2, 3]).to_ratfunc());
        assert_eq!(val("--t"), RatFunc::t());
        assert_eq!(val("t^0"), RatFunc::from_i64(1));
        let half = RatFunc::constant(Rat::new(1.into(), 2.into()));
        assert_eq!(val("1/2*t"), &half * &RatFunc::t());
        assert!(parse_expression("1/2*t").unwrap().integral.is_none());
    }

    #[test]
    fn errors() {
        let offset = |s: &str| match parse_expression(s).unwrap_err() {
            ExprError::Syntax { offset, .. } | ExprError::DivisionByZero { offset } => offset,
        };
        assert_eq!(offset("t +"), 3);
        assert_eq!(offset("(t + 1"), 6);
        assert_eq!(offset("t ^ -1"), 4);
        assert_eq!(offset("t ^ t"), 4);
        assert_eq!(offset("x"), 0);
        assert_eq!(offset("3 (t)"), 2);
        assert_eq!(offset("+t"), 0);
        assert_eq!(offset(""), 0);
        assert!(matches!(parse_expression("1/(t - t)"), Err(ExprError::DivisionByZero { offset: 2 })));
    }

    fn ratfunc() -> impl Strategy<Value = RatFunc> {
        let coeff = (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rat::new(n.into(), d.into()));
        let poly = prop::collection::vec(coeff, 1..=4).prop_map(polycong::polyfield::QPoly::new);
        (poly.clone(), poly).prop_filter_map("zero denominator", |(n, d)| RatFunc::new(n, d))
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(h in ratfunc()) {
            let printed = h.to_string();
            let back = parse_expression(&printed).unwrap();
            prop_assert_eq!(back.value, h);
        }
    }
}
