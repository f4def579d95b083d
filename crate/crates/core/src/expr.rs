//! Text syntax for series and polynomials.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := "-" factor | atom ("^" ["-"] int)?
//! atom   := int ["/" int] | var | "X" | "Y" | "(" expr ")" | "O(" expr ")"
//! ```
//!
//! Session variables name the coordinates of ℤⁿ, most significant first.
//! `X` (and `Y`, for towers) are polynomial indeterminates. `O(m)` sets the
//! precision to the value of the monomial `m`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::{Coeff, CoeffField};
use crate::error::{Error, Result};
use crate::poly::ValPolynomial;
use crate::series::TruncatedSeries;
use crate::value_group::Exponent;

/// The polynomial indeterminate.
pub const INDETERMINATE: &str = "X";
/// The second indeterminate, used for the upper polynomial of a tower.
pub const TOWER_INDETERMINATE: &str = "Y";

/// A polynomial in `Y` whose coefficients are polynomials in `X`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BivariatePolynomial {
    /// `coeffs[i]` is the coefficient of `Y^i`.
    pub coeffs: Vec<ValPolynomial>,
}

impl BivariatePolynomial {
    pub fn degree_y(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Substitutes a value for `X`, leaving a polynomial in `Y`.
    pub fn specialize_x(&self, x: &TruncatedSeries) -> Result<ValPolynomial> {
        let coeffs = self.coeffs.iter().map(|c| c.evaluate(x)).collect();
        ValPolynomial::new(x.rank(), x.field(), coeffs)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Parsed {
    Series(TruncatedSeries),
    Polynomial(ValPolynomial),
    Bivariate(BivariatePolynomial),
}

/// Polynomial in (X, Y) with series coefficients, keyed by `(deg_x, deg_y)`.
#[derive(Clone, Debug)]
struct Multi {
    rank: usize,
    field: CoeffField,
    terms: BTreeMap<(u32, u32), TruncatedSeries>,
}

impl Multi {
    fn series(x: TruncatedSeries) -> Self {
        let mut terms = BTreeMap::new();
        let (rank, field) = (x.rank(), x.field());
        if !x.is_zero() {
            terms.insert((0, 0), x);
        }
        Multi { rank, field, terms }
    }

    fn indeterminate(rank: usize, field: CoeffField, key: (u32, u32)) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(key, TruncatedSeries::one(rank, field));
        Multi { rank, field, terms }
    }

    fn add(mut self, other: Multi) -> Self {
        for (k, c) in other.terms {
            let sum = match self.terms.remove(&k) {
                Some(prev) => &prev + &c,
                None => c,
            };
            if !sum.is_zero() {
                self.terms.insert(k, sum);
            }
        }
        self
    }

    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }

    fn mul(&self, other: &Multi) -> Self {
        let mut out = Multi {
            rank: self.rank,
            field: self.field,
            terms: BTreeMap::new(),
        };
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                let mut single = BTreeMap::new();
                single.insert((a + c, b + d), x * y);
                out = out.add(Multi {
                    rank: self.rank,
                    field: self.field,
                    terms: single,
                });
            }
        }
        out
    }

    fn is_series(&self) -> bool {
        self.terms.keys().all(|&k| k == (0, 0))
    }

    fn as_series(&self) -> Option<TruncatedSeries> {
        if !self.is_series() {
            return None;
        }
        Some(
            self.terms
                .get(&(0, 0))
                .cloned()
                .unwrap_or_else(|| TruncatedSeries::zero(self.rank, self.field)),
        )
    }

    fn into_parsed(self) -> Result<Parsed> {
        if let Some(s) = self.as_series() {
            return Ok(Parsed::Series(s));
        }
        let zero = TruncatedSeries::zero(self.rank, self.field);
        let max_x = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let max_y = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut grid = vec![vec![zero; max_x + 1]; max_y + 1];
        for ((dx, dy), c) in self.terms {
            grid[dy as usize][dx as usize] = c;
        }
        let polys = grid
            .into_iter()
            .map(|row| ValPolynomial::new(self.rank, self.field, row))
            .collect::<Result<Vec<_>>>()?;
        if max_y == 0 {
            Ok(Parsed::Polynomial(polys.into_iter().next().unwrap()))
        } else {
            Ok(Parsed::Bivariate(BivariatePolynomial { coeffs: polys }))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, ch) = bytes[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = bytes[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().unwrap())));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            let s: String = bytes[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(s)));
        } else if "+-*/^()".contains(ch) {
            out.push((pos, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(Error::Parse {
                position: pos,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    names: &'a [String],
    field: CoeffField,
}

impl Parser<'_> {
    fn rank(&self) -> usize {
        self.names.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(n)
            }
            _ => self.error("expected an integer"),
        }
    }

    fn expr(&mut self) -> Result<Multi> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(self.term()?);
            } else if self.eat('-') {
                acc = acc.add(self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Multi> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let rhs = self.factor()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Multi> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let pos = self.pos();
        let k: u32 = self
            .int()?
            .try_into()
            .map_err(|_| Error::Parse {
                position: pos,
                message: "exponent too large".into(),
            })?;
        if !negative {
            let mut acc = Multi::series(TruncatedSeries::one(self.rank(), self.field));
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        match base.as_series() {
            Some(s) if s.is_exact() && s.len() == 1 => {
                Ok(Multi::series(s.invert(&Exponent::Infinity)?.pow(k)))
            }
            _ => Err(Error::Parse {
                position: pos,
                message: "negative powers are only allowed for monomials".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Multi> {
        let rank = self.rank();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut q = BigRational::from_integer(n);
                if self.eat('/') {
                    let pos = self.pos();
                    let d = self.int()?;
                    if d == BigInt::from(0) {
                        return Err(Error::Parse {
                            position: pos,
                            message: "zero denominator".into(),
                        });
                    }
                    q /= BigRational::from_integer(d);
                }
                let c = self.field.from_rational(&q)?;
                Ok(Multi::series(TruncatedSeries::constant(rank, c)))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "O" && self.peek() == Some(&Tok::Sym('(')) {
                    self.at += 1;
                    let pos = self.pos();
                    let inner = self.expr()?;
                    self.expect(')')?;
                    let value = inner
                        .as_series()
                        .filter(|s| s.is_exact() && s.len() == 1)
                        .map(|s| s.leading_term().unwrap().0.clone())
                        .ok_or(Error::Parse {
                            position: pos,
                            message: "O(...) takes a monomial".into(),
                        })?;
                    return Ok(Multi::series(TruncatedSeries::zero_to(
                        rank, self.field, value,
                    )));
                }
                if let Some(i) = self.names.iter().position(|n| n == &name) {
                    return Ok(Multi::series(TruncatedSeries::unit_monomial(
                        rank,
                        self.field,
                        Exponent::unit(rank, i),
                    )));
                }
                match name.as_str() {
                    INDETERMINATE => Ok(Multi::indeterminate(rank, self.field, (1, 0))),
                    TOWER_INDETERMINATE => Ok(Multi::indeterminate(rank, self.field, (0, 1))),
                    _ => Err(Error::UnknownVariable(name)),
                }
            }
            Some(_) => self.error("unexpected token"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a series, polynomial in `X`, or polynomial in `X, Y`.
pub fn parse_expression(text: &str, names: &[String], field: CoeffField) -> Result<Parsed> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        names,
        field,
    };
    let m = p.expr()?;
    if p.at != p.toks.len() {
        return p.error("trailing input");
    }
    m.into_parsed()
}

pub fn parse_series(text: &str, names: &[String], field: CoeffField) -> Result<TruncatedSeries> {
    match parse_expression(text, names, field)? {
        Parsed::Series(s) => Ok(s),
        _ => Err(Error::Parse {
            position: 0,
            message: format!("expected a series, found a polynomial: `{text}`"),
        }),
    }
}

/// Parses a polynomial in `X`; a bare series is read as a constant polynomial.
pub fn parse_polynomial(text: &str, names: &[String], field: CoeffField) -> Result<ValPolynomial> {
    match parse_expression(text, names, field)? {
        Parsed::Series(s) => Ok(ValPolynomial::constant(s)),
        Parsed::Polynomial(p) => Ok(p),
        Parsed::Bivariate(_) => Err(Error::Parse {
            position: 0,
            message: format!("`{TOWER_INDETERMINATE}` is not allowed here: `{text}`"),
        }),
    }
}

pub fn parse_bivariate(
    text: &str,
    names: &[String],
    field: CoeffField,
) -> Result<BivariatePolynomial> {
    match parse_expression(text, names, field)? {
        Parsed::Bivariate(b) => Ok(b),
        Parsed::Polynomial(p) => Ok(BivariatePolynomial { coeffs: vec![p] }),
        Parsed::Series(s) => Ok(BivariatePolynomial {
            coeffs: vec![ValPolynomial::constant(s)],
        }),
    }
}

/// `s^2*t^-1`; the empty string for the zero exponent.
pub fn format_monomial(e: &Exponent, names: &[String]) -> String {
    let Some(coords) = e.coords() else {
        return "inf".into();
    };
    coords
        .iter()
        .zip(names)
        .filter(|(k, _)| **k != 0)
        .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// A single term as (is_negative, body without sign).
fn format_term(e: &Exponent, c: &Coeff, names: &[String]) -> (bool, String) {
    let mono = format_monomial(e, names);
    let neg = c.is_negative();
    let abs = if neg { c.neg() } else { c.clone() };
    let body = match (abs.is_one(), mono.is_empty()) {
        (_, true) => abs.to_string(),
        (true, false) => mono,
        (false, false) => format!("{abs}*{mono}"),
    };
    (neg, body)
}

fn join_terms(parts: Vec<(bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// Ascending lex order, with a trailing `O(...)` when the precision is finite.
pub fn format_series(x: &TruncatedSeries, names: &[String]) -> String {
    let mut parts: Vec<(bool, String)> = x
        .terms()
        .iter()
        .map(|(e, c)| format_term(e, c, names))
        .collect();
    if x.precision().is_finite() {
        let mono = format_monomial(x.precision(), names);
        let mono = if mono.is_empty() { "1".to_string() } else { mono };
        parts.push((false, format!("O({mono})")));
    }
    if parts.is_empty() {
        return "0".into();
    }
    join_terms(parts)
}

/// Descending degree in the indeterminate `var`.
pub fn format_polynomial(f: &ValPolynomial, names: &[String], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let xpow = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if c.is_exact() && c.len() == 1 {
            let (e, k) = c.leading_term().unwrap();
            let (neg, body) = format_term(e, k, names);
            let body = match (body.as_str(), xpow.is_empty()) {
                (_, true) => body,
                ("1", false) => xpow,
                (_, false) => format!("{body}*{xpow}"),
            };
            parts.push((neg, body));
        } else {
            let inner = format!("({})", format_series(c, names));
            let body = if xpow.is_empty() {
                inner
            } else {
                format!("{inner}*{xpow}")
            };
            parts.push((false, body));
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    join_terms(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    const Q: CoeffField = CoeffField::Rational;

    #[test]
    fn parses_running_polynomial() {
        let st = names(&["s", "t"]);
        let f = parse_polynomial("X^2 - X - t", &st, Q).unwrap();
        assert!(f.is_monic());
        assert_eq!(f.degree(), Some(2));
        assert_eq!(format_polynomial(&f, &st, "X"), "X^2 - X - t");
    }

    #[test]
    fn parses_series_literal() {
        let st = names(&["s", "t"]);
        let x = parse_series("s^2*t^-1 + 3*s^3*t^1", &st, Q).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.valuation().known(), Some(&Exponent::new([2, -1])));
        assert_eq!(format_series(&x, &st), "s^2*t^-1 + 3*s^3*t");
    }

    #[test]
    fn parses_shifted_minimal_polynomial() {
        let st = names(&["s", "t"]);
        let f = parse_polynomial("X^2 - (2*s^1+1)*X + (s^2 + s^1 - t^1)", &st, Q).unwrap();
        let g = parse_polynomial("X^2 - X - t", &st, Q).unwrap();
        let s = parse_series("s", &st, Q).unwrap();
        assert_eq!(f, g.shift_argument(&-&s));
    }

    #[test]
    fn precision_marker() {
        let t = names(&["t"]);
        let x = parse_series("1 + t - t^2 + O(t^3)", &t, Q).unwrap();
        assert_eq!(x.precision(), &Exponent::new([3]));
        assert_eq!(format_series(&x, &t), "1 + t - t^2 + O(t^3)");
    }

    #[test]
    fn rationals_and_prime_fields() {
        let t = names(&["t"]);
        let x = parse_series("-3/4*t + 1/2", &t, Q).unwrap();
        assert_eq!(format_series(&x, &t), "1/2 - 3/4*t");
        let f5 = CoeffField::Prime(5);
        let y = parse_series("7*t - 1", &t, f5).unwrap();
        assert_eq!(format_series(&y, &t), "4 + 2*t");
    }

    #[test]
    fn errors_carry_positions() {
        let t = names(&["t"]);
        assert_eq!(
            parse_series("t + u", &t, Q),
            Err(Error::UnknownVariable("u".into()))
        );
        assert!(matches!(
            parse_series("t + * 2", &t, Q),
            Err(Error::Parse { position: 4, .. })
        ));
        assert!(matches!(
            parse_series("(1 + t", &t, Q),
            Err(Error::Parse { position: 6, .. })
        ));
        assert!(matches!(parse_series("(1+t)^-1", &t, Q), Err(Error::Parse { .. })));
    }

    #[test]
    fn bivariate_tower_polynomial() {
        let st = names(&["s", "t"]);
        let b = parse_bivariate("Y^2 - Y - X*t", &st, Q).unwrap();
        assert_eq!(b.degree_y(), Some(2));
        assert_eq!(b.coeffs[0].degree(), Some(1));
    }

    #[test]
    fn zero_formats() {
        let t = names(&["t"]);
        assert_eq!(format_series(&TruncatedSeries::zero(1, Q), &t), "0");
        let z = TruncatedSeries::zero_to(1, Q, Exponent::new([8]));
        assert_eq!(format_series(&z, &t), "O(t^8)");
        assert_eq!(parse_series("O(t^8)", &t, Q).unwrap(), z);
    }
}
