//! Text form of tower elements.
//!
//! Accepted grammar (whitespace is insignificant):
//!
//! ```text
//! ratfun := expr
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' ('-')? uint)?
//! atom   := uint | varname | '(' expr ')'
//! ```
//!
//! This is a superset of `ratfun := expr ('/' expr)?`. Integer literals are
//! reduced mod p. Printing emits a canonical, parenthesized form that parses
//! back to the same element.

use thiserror::Error;

use super::arith::{Level, Value};
use super::{Tower, TowerElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("division by zero at byte {0}")]
    DivisionByZero(usize),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(src[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tower: &'a Tower,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<TowerElement, ParseError> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TowerElement, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                self.pos += 1;
                let at = self.offset();
                let rhs = self.factor()?;
                if rhs.is_zero() {
                    return Err(ParseError::DivisionByZero(at));
                }
                acc = &acc / &rhs;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<TowerElement, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let neg = self.eat('-');
        let e = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                n.parse::<i64>().or_else(|_| self.err("exponent out of range"))?
            }
            _ => return self.err("expected integer exponent"),
        };
        let e = if neg { -e } else { e };
        base.powi(e).map_err(|_| ParseError::DivisionByZero(at))
    }

    fn atom(&mut self) -> Result<TowerElement, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let p = self.tower.p() as u64;
                let r = n.bytes().fold(0u64, |acc, b| (acc * 10 + u64::from(b - b'0')) % p);
                Ok(self.tower.from_int(r as i64))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.tower.var_index(&name) {
                    Some(i) => Ok(self.tower.var(i)),
                    None => Err(ParseError::UnknownVariable(name)),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(_) => self.err("expected number, variable or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub(crate) fn parse_element(tower: &Tower, src: &str) -> Result<TowerElement, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser { tower, toks, pos: 0, end: src.len() };
    let e = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input");
    }
    Ok(e)
}

/// Canonical text for a value at `level`.
pub(crate) fn print_value(tower: &Tower, level: usize, v: &Value) -> String {
    match v {
        Value::Base(x) => x.to_string(),
        Value::Frac(f) => {
            let var = &tower.vars()[level - 1];
            let sub = Level::new(tower.p(), level - 1);
            let num = print_poly(tower, sub, var, &f.num);
            if f.den.len() == 1 {
                num
            } else {
                format!("({})/({})", num, print_poly(tower, sub, var, &f.den))
            }
        }
    }
}

fn is_compound(s: &str) -> bool {
    s.contains([' ', '/', '*', '^'])
}

fn print_poly(tower: &Tower, sub: Level, var: &str, coeffs: &[Value]) -> String {
    if coeffs.is_empty() {
        return "0".to_string();
    }
    let mut terms = Vec::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if sub.is_zero(c) {
            continue;
        }
        let cs = print_value(tower, sub.level, c);
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        let term = if mono.is_empty() {
            if is_compound(&cs) {
                format!("({cs})")
            } else {
                cs
            }
        } else if sub.is_one(c) {
            mono
        } else if cs.bytes().all(|b| b.is_ascii_digit()) {
            format!("{cs}*{mono}")
        } else {
            format!("({cs})*{mono}")
        };
        terms.push(term);
    }
    terms.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_examples() {
        let k2 = Tower::new(2, &["t"]).unwrap();
        let a = k2.parse("t^2 + 1").unwrap();
        assert_eq!(a, &k2.var(0).powi(2).unwrap() + &k2.one());
        assert_eq!(a.to_string(), "t^2 + 1");

        let k3 = Tower::new(3, &["t"]).unwrap();
        let b = k3.parse("(1+t)/(t^3)").unwrap();
        assert_eq!(b.to_string(), "(t + 1)/(t^3)");
        assert_eq!(&b * &k3.var(0).powi(3).unwrap(), k3.parse("t+1").unwrap());

        assert_eq!(k2.parse("t + s").unwrap_err(), ParseError::UnknownVariable("s".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let k = Tower::new(3, &["t"]).unwrap();
        assert_eq!(k.parse("t +").unwrap_err(), ParseError::Syntax { pos: 3, msg: "unexpected end of input".into() });
        assert!(matches!(k.parse("(t"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(k.parse("t $"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(k.parse("t t"), Err(ParseError::Syntax { pos: 2, .. })));
        assert_eq!(k.parse("1/(t-t)").unwrap_err(), ParseError::DivisionByZero(2));
        assert!(matches!(k.parse("t^x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn integers_reduce_and_signs() {
        let k = Tower::new(3, &["t"]).unwrap();
        assert_eq!(k.parse("-1").unwrap(), k.from_int(2));
        assert_eq!(k.parse("10").unwrap(), k.one());
        assert_eq!(k.parse("123456789012345678901234567890").unwrap(), k.zero());
        assert_eq!(k.parse("t^-2").unwrap(), k.parse("1/t^2").unwrap());
        assert_eq!(k.parse("2*t").unwrap().to_string(), "2*t");
    }

    #[test]
    fn nested_printing_round_trips() {
        let k = Tower::new(3, &["t", "u"]).unwrap();
        let a = k.parse("(t+1)/(t^2+2) * u^2 + t*u + 1/(u + t)").unwrap();
        assert_eq!(k.parse(&a.to_string()).unwrap(), a);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = k.random(&mut rng, 2);
            assert_eq!(k.parse(&x.to_string()).unwrap(), x, "{x}");
        }
    }
}
