//! Truncated iterated Laurent series with lex-ordered sparse support.
//!
//! A [`TruncatedSeries`] of rank `n` is a finite sum `Σ c_e · x^e` over
//! exponents `e ∈ ℤⁿ` together with a single precision bound: every term at
//! or above the bound is unknown. A precision of `inf` marks an exact element
//! of the base field (finite support). The valuation is the lex-minimal
//! exponent of the support.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::coeff::{Coeff, CoeffField};
use crate::error::{Error, Result};
use crate::value_group::Exponent;

/// The value of an element: known exactly, or only bounded below by the
/// precision when no term is known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Valuation<V = Exponent> {
    Known(V),
    UnknownBelow(V),
}

impl<V: Ord> Valuation<V> {
    pub fn known(&self) -> Option<&V> {
        match self {
            Valuation::Known(v) => Some(v),
            Valuation::UnknownBelow(_) => None,
        }
    }

    /// The exact value, or the precision bound it is known to reach.
    pub fn lower_bound(&self) -> &V {
        match self {
            Valuation::Known(v) | Valuation::UnknownBelow(v) => v,
        }
    }

    /// Whether the value is certainly `≥ bound`.
    pub fn is_at_least(&self, bound: &V) -> bool {
        self.lower_bound() >= bound
    }

    /// Whether the value is certainly `> bound`.
    pub fn exceeds(&self, bound: &V) -> bool {
        match self {
            Valuation::Known(v) => v > bound,
            Valuation::UnknownBelow(v) => v > bound,
        }
    }
}

impl<V: fmt::Display> fmt::Display for Valuation<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Known(v) => write!(f, "{v}"),
            Valuation::UnknownBelow(v) => write!(f, ">={v}"),
        }
    }
}

impl<V: fmt::Display> Serialize for Valuation<V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    rank: usize,
    field: CoeffField,
    /// Ascending in lex order, non-zero, all strictly below `precision`.
    terms: Vec<(Exponent, Coeff)>,
    precision: Exponent,
}

impl TruncatedSeries {
    /// Builds a series from arbitrary terms: duplicates are combined, zeros
    /// and terms at or above `precision` are dropped.
    pub fn from_terms(
        rank: usize,
        field: CoeffField,
        terms: impl IntoIterator<Item = (Exponent, Coeff)>,
        precision: Exponent,
    ) -> Self {
        let mut acc: BTreeMap<Exponent, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.rank(), Some(rank), "term of wrong rank");
            debug_assert!(field.check(&c));
            if e >= precision {
                continue;
            }
            match acc.get_mut(&e) {
                Some(slot) => slot.add_assign(&c),
                None => {
                    acc.insert(e, c);
                }
            }
        }
        TruncatedSeries {
            rank,
            field,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            precision,
        }
    }

    /// Caller guarantees the invariants (sorted, non-zero, below precision).
    fn from_sorted(
        rank: usize,
        field: CoeffField,
        terms: Vec<(Exponent, Coeff)>,
        precision: Exponent,
    ) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(e, c)| !c.is_zero() && e < &precision));
        TruncatedSeries {
            rank,
            field,
            terms,
            precision,
        }
    }

    pub fn zero(rank: usize, field: CoeffField) -> Self {
        Self::from_sorted(rank, field, Vec::new(), Exponent::Infinity)
    }

    /// Zero up to `precision`: nothing is known below the bound.
    pub fn zero_to(rank: usize, field: CoeffField, precision: Exponent) -> Self {
        Self::from_sorted(rank, field, Vec::new(), precision)
    }

    pub fn one(rank: usize, field: CoeffField) -> Self {
        Self::constant(rank, field.one())
    }

    pub fn constant(rank: usize, c: Coeff) -> Self {
        Self::monomial(rank, Exponent::zero(rank), c)
    }

    pub fn from_i64(rank: usize, field: CoeffField, n: i64) -> Self {
        Self::constant(rank, field.from_i64(n))
    }

    pub fn monomial(rank: usize, e: Exponent, c: Coeff) -> Self {
        let field = c.field();
        Self::from_terms(rank, field, [(e, c)], Exponent::Infinity)
    }

    /// The monomial `x^e` with coefficient 1.
    pub fn unit_monomial(rank: usize, field: CoeffField, e: Exponent) -> Self {
        Self::monomial(rank, e, field.one())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn terms(&self) -> &[(Exponent, Coeff)] {
        &self.terms
    }

    pub fn precision(&self) -> &Exponent {
        &self.precision
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.iter().map(|(e, _)| e)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// An exact element of the base field (finite support, precision `inf`).
    pub fn is_exact(&self) -> bool {
        self.precision.is_infinite()
    }

    /// Exactly zero (not merely zero up to precision).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.is_exact()
    }

    pub fn is_one(&self) -> bool {
        self.is_exact()
            && self.terms.len() == 1
            && self.terms[0].0.is_zero()
            && self.terms[0].1.is_one()
    }

    pub fn leading_term(&self) -> Option<&(Exponent, Coeff)> {
        self.terms.first()
    }

    pub fn coeff(&self, e: &Exponent) -> Coeff {
        match self.terms.binary_search_by(|(x, _)| x.cmp(e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Known(e.clone()),
            None if self.is_exact() => Valuation::Known(Exponent::Infinity),
            None => Valuation::UnknownBelow(self.precision.clone()),
        }
    }

    /// Leading exponent, or the precision when no term is known. This is the
    /// value used in precision propagation.
    fn value_or_precision(&self) -> &Exponent {
        self.terms.first().map(|(e, _)| e).unwrap_or(&self.precision)
    }

    pub fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(())
    }

    /// Lowers the precision to `min(self.precision, bound)`.
    pub fn with_precision_cap(&self, bound: &Exponent) -> TruncatedSeries {
        if bound >= &self.precision {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .take_while(|(e, _)| e < bound)
            .cloned()
            .collect();
        Self::from_sorted(self.rank, self.field, terms, bound.clone())
    }

    pub fn try_add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let precision = self.precision.clone().min(other.precision.clone());
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        loop {
            let next = match (a.get(i), b.get(j)) {
                (None, None) => break,
                (Some(x), None) => {
                    i += 1;
                    x.clone()
                }
                (None, Some(y)) => {
                    j += 1;
                    y.clone()
                }
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    std::cmp::Ordering::Less => {
                        i += 1;
                        x.clone()
                    }
                    std::cmp::Ordering::Greater => {
                        j += 1;
                        y.clone()
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (x.0.clone(), x.1.add(&y.1))
                    }
                },
            };
            if next.0 >= precision {
                // both inputs are sorted, so everything after is out of range too
                if a.get(i).is_none_or(|x| x.0 >= precision)
                    && b.get(j).is_none_or(|y| y.0 >= precision)
                {
                    break;
                }
                continue;
            }
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        Ok(Self::from_sorted(self.rank, self.field, out, precision))
    }

    pub fn try_sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.try_add(&-other)
    }

    /// Cauchy product, truncated at `min(v x + prec y, v y + prec x)`.
    pub fn try_mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let p1 = self.value_or_precision() + &other.precision;
        let p2 = other.value_or_precision() + &self.precision;
        let precision = p1.min(p2);
        Ok(self.mul_truncated(other, precision))
    }

    /// Product keeping only terms below `bound`. The precision drops to
    /// `bound` only if some term was actually cut off.
    pub fn mul_truncated(&self, other: &TruncatedSeries, bound: Exponent) -> TruncatedSeries {
        let p1 = self.value_or_precision() + &other.precision;
        let p2 = other.value_or_precision() + &self.precision;
        let natural = p1.min(p2);
        let precision = natural.clone().min(bound);
        let mut dropped = false;
        let mut acc: BTreeMap<Exponent, Coeff> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if e >= precision {
                    dropped = true;
                    break;
                }
                let c = c1.mul(c2);
                match acc.get_mut(&e) {
                    Some(slot) => slot.add_assign(&c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        // nothing was cut off, so the product is as precise as its factors allow
        let precision = if dropped { precision } else { natural };
        Self::from_sorted(self.rank, self.field, terms, precision)
    }

    pub fn scale(&self, c: &Coeff) -> TruncatedSeries {
        if c.is_zero() {
            return Self::zero(self.rank, self.field);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.mul(c)))
            .collect();
        Self::from_sorted(self.rank, self.field, terms, self.precision.clone())
    }

    /// Multiplication by the monomial `x^shift`.
    pub fn shift(&self, shift: &Exponent) -> TruncatedSeries {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e + shift, c.clone()))
            .collect();
        Self::from_sorted(self.rank, self.field, terms, &self.precision + shift)
    }

    pub fn pow(&self, k: u32) -> TruncatedSeries {
        let mut acc = Self::one(self.rank, self.field);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse with `x · invert(x) ≡ 1` modulo terms of value `≥ target`
    /// (or modulo the precision `x` itself supports, if lower).
    ///
    /// Factors `x = c · x^v · (1 − u)` with `v u > 0` and inverts the unit part
    /// by Newton iteration `w ← w + w(1 − y w)`, which squares the error.
    pub fn invert(&self, target: &Exponent) -> Result<TruncatedSeries> {
        let (lead_e, lead_c) = self.leading_term().ok_or_else(|| Error::ZeroLeadingTerm {
            precision: self.precision.clone(),
        })?;
        let c_inv = lead_c.inv().expect("stored coefficients are non-zero");
        let neg_v = -lead_e;
        if self.terms.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(self.rank, neg_v, c_inv));
        }
        let relative = target.clone().min(&self.precision + &neg_v);
        let unit = self.shift(&neg_v).scale(&c_inv);
        let one = Self::one(self.rank, self.field);
        let mut w = one.with_precision_cap(&relative);
        let mut err = (&one - &unit).with_precision_cap(&relative);
        if let Some((eps, _)) = err.leading_term() {
            if !eps.multiple_reaches(&relative) {
                return Err(Error::PrecisionUnreachable {
                    step: eps.clone(),
                    target: relative,
                });
            }
        }
        let mut iterations = 0;
        while !err.is_empty() {
            iterations += 1;
            if iterations > 128 {
                return Err(Error::NonTermination { iterations });
            }
            w = (&w + &w.mul_truncated(&err, relative.clone())).with_precision_cap(&relative);
            err = (&one - &unit.mul_truncated(&w, relative.clone())).with_precision_cap(&relative);
        }
        Ok(w.shift(&neg_v).scale(&c_inv))
    }

    /// Keeps the terms strictly below `gamma`; the result is an exact element
    /// of the base field.
    pub fn truncate_at(&self, gamma: &Exponent) -> Result<TruncatedSeries> {
        if gamma > &self.precision {
            return Err(Error::BeyondPrecision {
                requested: gamma.clone(),
                precision: self.precision.clone(),
            });
        }
        let terms = self
            .terms
            .iter()
            .take_while(|(e, _)| e < gamma)
            .cloned()
            .collect();
        Ok(Self::from_sorted(
            self.rank,
            self.field,
            terms,
            Exponent::Infinity,
        ))
    }

    /// Whether `self − other` has no known term (equal up to the common precision).
    pub fn agrees_with(&self, other: &TruncatedSeries) -> bool {
        self.try_sub(other).is_ok_and(|d| d.is_empty())
    }
}

/// `numer / denom` expanded to absolute precision `target`.
pub fn expand_rational(
    numer: &TruncatedSeries,
    denom: &TruncatedSeries,
    target: &Exponent,
) -> Result<TruncatedSeries> {
    numer.check_compatible(denom)?;
    if !numer.is_exact() || !denom.is_exact() {
        return Err(Error::Precondition(
            "rational expansion needs finite-support numerator and denominator".into(),
        ));
    }
    let vd = denom
        .leading_term()
        .map(|(e, _)| e.clone())
        .ok_or_else(|| Error::ZeroLeadingTerm {
            precision: denom.precision.clone(),
        })?;
    let Some((vn, _)) = numer.leading_term() else {
        return Ok(TruncatedSeries::zero(numer.rank, numer.field));
    };
    if target.is_infinite() {
        let inv = denom.invert(&Exponent::Infinity)?;
        return numer.try_mul(&inv);
    }
    let relative = &(target - vn) + &vd;
    let inv = denom.invert(&relative)?;
    let out = numer.try_mul(&inv)?;
    // a monomial denominator divides exactly; keep the exact quotient
    if out.is_exact() {
        return Ok(out);
    }
    Ok(out.with_precision_cap(target))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for &TruncatedSeries {
            type Output = TruncatedSeries;

            /// Panics on rank or field mismatch; use the `try_` method to handle it.
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$try(rhs).expect("incompatible series operands")
            }
        }

        impl $trait for TruncatedSeries {
            type Output = TruncatedSeries;

            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect();
        TruncatedSeries::from_sorted(self.rank, self.field, terms, self.precision.clone())
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

impl fmt::Display for TruncatedSeries {
    /// Uses generic variable names `x1 … xn`; sessions render with their own names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.rank).map(|i| format!("x{i}")).collect();
        f.write_str(&crate::expr::format_series(self, &names))
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(String, String)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.to_string(), c.to_string()))
            .collect();
        let mut s = serializer.serialize_struct("TruncatedSeries", 2)?;
        s.serialize_field("terms", &terms)?;
        s.serialize_field("precision", &self.precision)?;
        s.end()
    }
}
