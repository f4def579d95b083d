//! Univariate polynomials with truncated-series coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::{Coeff, CoeffField};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::value_group::Exponent;

/// `Σ c_i X^i`, coefficients ascending by degree. Trailing exact zeros are
/// never stored, so the last coefficient is the leading one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValPolynomial {
    rank: usize,
    field: CoeffField,
    coeffs: Vec<TruncatedSeries>,
}

impl ValPolynomial {
    pub fn new(rank: usize, field: CoeffField, coeffs: Vec<TruncatedSeries>) -> Result<Self> {
        for c in &coeffs {
            if c.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: c.rank(),
                });
            }
            if c.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.to_string(),
                    right: c.field().to_string(),
                });
            }
        }
        Ok(Self::normalized(rank, field, coeffs))
    }

    fn normalized(rank: usize, field: CoeffField, mut coeffs: Vec<TruncatedSeries>) -> Self {
        while coeffs.last().is_some_and(TruncatedSeries::is_zero) {
            coeffs.pop();
        }
        ValPolynomial {
            rank,
            field,
            coeffs,
        }
    }

    pub fn zero(rank: usize, field: CoeffField) -> Self {
        Self::normalized(rank, field, Vec::new())
    }

    pub fn constant(c: TruncatedSeries) -> Self {
        Self::normalized(c.rank(), c.field(), vec![c])
    }

    /// The indeterminate `X`.
    pub fn x(rank: usize, field: CoeffField) -> Self {
        Self::monic_linear(&TruncatedSeries::zero(rank, field))
    }

    /// `X − root`.
    pub fn monic_linear(root: &TruncatedSeries) -> Self {
        Self::normalized(
            root.rank(),
            root.field(),
            vec![-root, TruncatedSeries::one(root.rank(), root.field())],
        )
    }

    /// Polynomial with exact constant coefficients (rank 0 allowed).
    pub fn from_constants(rank: usize, coeffs: &[Coeff]) -> Self {
        let field = coeffs.first().map(Coeff::field).unwrap_or(CoeffField::Rational);
        let cs = coeffs
            .iter()
            .map(|c| TruncatedSeries::constant(rank, c.clone()))
            .collect();
        Self::normalized(rank, field, cs)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn coeffs(&self) -> &[TruncatedSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> TruncatedSeries {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(self.rank, self.field))
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&TruncatedSeries> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(TruncatedSeries::is_one)
    }

    pub fn check_monic(&self) -> Result<()> {
        if self.is_monic() {
            Ok(())
        } else {
            Err(Error::NotMonic)
        }
    }

    /// Every coefficient has value `≥ 0`.
    pub fn check_integral(&self) -> Result<()> {
        let zero = Exponent::zero(self.rank);
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.valuation();
            if !v.is_at_least(&zero) {
                return Err(Error::NotIntegral {
                    degree: i,
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(TruncatedSeries::is_exact)
    }

    /// The smallest value any coefficient is known to have (`inf` for zero).
    /// A certificate `f ≡ g h` to precision `T` is `(f − g h).coefficient_floor() ≥ T`.
    pub fn coefficient_floor(&self) -> Exponent {
        self.coeffs
            .iter()
            .map(|c| c.valuation().lower_bound().clone())
            .min()
            .unwrap_or(Exponent::Infinity)
    }

    /// Whether every coefficient has empty known support.
    pub fn vanishes_to_precision(&self) -> bool {
        self.coeffs.iter().all(TruncatedSeries::is_empty)
    }

    pub fn check_compatible(&self, other: &ValPolynomial) -> Result<()> {
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

    pub fn map_coeffs(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> ValPolynomial {
        Self::normalized(self.rank, self.field, self.coeffs.iter().map(f).collect())
    }

    pub fn with_precision_cap(&self, bound: &Exponent) -> ValPolynomial {
        self.map_coeffs(|c| c.with_precision_cap(bound))
    }

    /// Caps every coefficient except an exact leading 1, so monic stays monic.
    pub fn with_precision_cap_monic(&self, bound: &Exponent) -> ValPolynomial {
        let last = self.coeffs.len().saturating_sub(1);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == last && c.is_one() {
                    c.clone()
                } else {
                    c.with_precision_cap(bound)
                }
            })
            .collect();
        Self::normalized(self.rank, self.field, coeffs)
    }

    pub fn scale(&self, c: &TruncatedSeries) -> ValPolynomial {
        self.map_coeffs(|x| x * c)
    }

    /// Horner evaluation at `c`.
    pub fn evaluate(&self, c: &TruncatedSeries) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.rank, self.field);
        for coeff in self.coeffs.iter().rev() {
            acc = &(&acc * c) + coeff;
        }
        acc
    }

    /// Horner evaluation keeping only terms below `bound`.
    pub fn evaluate_truncated(&self, c: &TruncatedSeries, bound: &Exponent) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.rank, self.field);
        for coeff in self.coeffs.iter().rev() {
            acc = &acc.mul_truncated(c, bound.clone()) + coeff;
        }
        acc
    }

    pub fn derivative(&self) -> ValPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&self.field.from_i64(i as i64)))
            .collect();
        Self::normalized(self.rank, self.field, coeffs)
    }

    /// `f(X + shift)`.
    pub fn shift_argument(&self, shift: &TruncatedSeries) -> ValPolynomial {
        let lin = ValPolynomial::monic_linear(&-shift);
        let mut acc = ValPolynomial::zero(self.rank, self.field);
        for coeff in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &ValPolynomial::constant(coeff.clone());
        }
        acc
    }

    /// `d^deg · f(X / d)`: the coefficient of `X^i` is multiplied by `d^(deg−i)`.
    /// A root `z` of `f` becomes the root `d z`.
    pub fn scale_roots(&self, d: &TruncatedSeries) -> ValPolynomial {
        let Some(n) = self.degree() else {
            return self.clone();
        };
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * &d.pow((n - i) as u32))
            .collect();
        Self::normalized(self.rank, self.field, coeffs)
    }

    /// Product keeping only coefficient terms below `bound`.
    pub fn mul_truncated(&self, other: &ValPolynomial, bound: &Exponent) -> ValPolynomial {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.rank, self.field);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![TruncatedSeries::zero(self.rank, self.field); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &a.mul_truncated(b, bound.clone());
            }
        }
        Self::normalized(self.rank, self.field, out)
    }

    /// Division with remainder. The divisor's leading coefficient must be an
    /// exact monomial (always the case for monic divisors and over a residue
    /// field of rank 0).
    pub fn div_rem(&self, divisor: &ValPolynomial) -> Result<(ValPolynomial, ValPolynomial)> {
        self.check_compatible(divisor)?;
        let d = divisor
            .degree()
            .ok_or_else(|| Error::Precondition("division by the zero polynomial".into()))?;
        let lead = divisor.leading().unwrap();
        if !(lead.is_exact() && lead.len() == 1) {
            return Err(Error::Precondition(
                "divisor leading coefficient must be an exact monomial".into(),
            ));
        }
        let lead_inv = lead.invert(&Exponent::Infinity)?;
        let mut rem = self.coeffs.clone();
        let zero = TruncatedSeries::zero(self.rank, self.field);
        let mut quot = vec![zero.clone(); rem.len().saturating_sub(d)];
        while rem.len() > d {
            let k = rem.len() - 1 - d;
            let q = rem.last().unwrap() * &lead_inv;
            for (i, c) in divisor.coeffs.iter().enumerate().take(d) {
                rem[k + i] = &rem[k + i] - &(&q * c);
            }
            // the leading term cancels by construction
            rem.pop();
            quot[k] = q;
        }
        Ok((
            Self::normalized(self.rank, self.field, quot),
            Self::normalized(self.rank, self.field, rem),
        ))
    }

    pub fn rem(&self, divisor: &ValPolynomial) -> Result<ValPolynomial> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Monic version (leading coefficient must be an exact monomial).
    pub fn make_monic(&self) -> Result<ValPolynomial> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::Precondition("zero polynomial has no monic form".into()))?;
        let inv = lead.invert(&Exponent::Infinity)?;
        let mut p = self.scale(&inv);
        let last = p.coeffs.len() - 1;
        p.coeffs[last] = TruncatedSeries::one(self.rank, self.field);
        Ok(p)
    }

    /// Extended Euclid over an exact coefficient field: returns monic `g`
    /// and `s, t` with `s·a + t·b = g`.
    pub fn ext_gcd(
        a: &ValPolynomial,
        b: &ValPolynomial,
    ) -> Result<(ValPolynomial, ValPolynomial, ValPolynomial)> {
        a.check_compatible(b)?;
        if !a.is_exact() || !b.is_exact() {
            return Err(Error::Precondition(
                "extended gcd needs exact coefficients".into(),
            ));
        }
        let (rank, field) = (a.rank, a.field);
        let one = ValPolynomial::constant(TruncatedSeries::one(rank, field));
        let zero = ValPolynomial::zero(rank, field);
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = r0.leading().unwrap().invert(&Exponent::Infinity)?;
        Ok((r0.make_monic()?, s0.scale(&inv), t0.scale(&inv)))
    }

    /// Whether the gcd of two exact polynomials is a unit.
    pub fn coprime(a: &ValPolynomial, b: &ValPolynomial) -> Result<bool> {
        let (g, _, _) = Self::ext_gcd(a, b)?;
        Ok(g.degree() == Some(0))
    }

    /// Coefficients as field elements, for polynomials over a rank-0 series
    /// field (the residue field `k`).
    pub fn constant_coeffs(&self) -> Result<Vec<Coeff>> {
        if self.rank != 0 || !self.is_exact() {
            return Err(Error::Precondition(
                "expected an exact polynomial over the residue field".into(),
            ));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|c| c.coeff(&Exponent::zero(0)))
            .collect())
    }
}

/// Roots in `k` of an exact rank-0 polynomial, without multiplicity, with
/// a flag telling whether each is simple.
pub fn roots_in_residue_field(f: &ValPolynomial) -> Result<Vec<(Coeff, bool)>> {
    let coeffs = f.constant_coeffs()?;
    if coeffs.is_empty() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    let candidates = match f.field() {
        CoeffField::Prime(p) => {
            if p > 100_000 {
                return Err(Error::Precondition(format!(
                    "root search in F_{p} is limited to p <= 100000"
                )));
            }
            (0..p as i64).map(|i| f.field().from_i64(i)).collect()
        }
        CoeffField::Rational => rational_root_candidates(&coeffs)?,
    };
    let df = f.derivative();
    let mut roots = Vec::new();
    for c in candidates {
        let r = TruncatedSeries::constant(0, c.clone());
        if f.evaluate(&r).is_zero() && !roots.iter().any(|(x, _)| x == &c) {
            let simple = !df.evaluate(&r).is_zero();
            roots.push((c, simple));
        }
    }
    Ok(roots)
}

/// Candidates `±p/q` of the rational root theorem (plus 0).
fn rational_root_candidates(coeffs: &[Coeff]) -> Result<Vec<Coeff>> {
    let qs: Vec<BigRational> = coeffs
        .iter()
        .map(|c| c.as_rational().cloned().unwrap())
        .collect();
    let lcm = qs
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = qs.iter().map(|q| (q * &lcm).to_integer()).collect();
    let mut out = vec![Coeff::Rational(BigRational::zero())];
    let Some(lo) = ints.iter().position(|c| !c.is_zero()) else {
        return Ok(out);
    };
    let hi = ints.iter().rposition(|c| !c.is_zero()).unwrap();
    let ps = divisors(&ints[lo].abs())?;
    let qds = divisors(&ints[hi].abs())?;
    for p in &ps {
        for q in &qds {
            let r = BigRational::new(p.clone(), q.clone());
            out.push(Coeff::Rational(r.clone()));
            out.push(Coeff::Rational(-r));
        }
    }
    Ok(out)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .to_u64()
        .filter(|&n| n <= 1_000_000_000_000)
        .ok_or_else(|| Error::Precondition(format!("constant {n} too large for rational root search")))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

impl Add for &ValPolynomial {
    type Output = ValPolynomial;

    fn add(self, rhs: &ValPolynomial) -> ValPolynomial {
        self.check_compatible(rhs).expect("incompatible polynomials");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        ValPolynomial::normalized(self.rank, self.field, coeffs)
    }
}

impl Sub for &ValPolynomial {
    type Output = ValPolynomial;

    fn sub(self, rhs: &ValPolynomial) -> ValPolynomial {
        self + &-rhs
    }
}

impl Neg for &ValPolynomial {
    type Output = ValPolynomial;

    fn neg(self) -> ValPolynomial {
        self.map_coeffs(|c| -c)
    }
}

impl Mul for &ValPolynomial {
    type Output = ValPolynomial;

    fn mul(self, rhs: &ValPolynomial) -> ValPolynomial {
        self.check_compatible(rhs).expect("incompatible polynomials");
        self.mul_truncated(rhs, &Exponent::Infinity)
    }
}

impl fmt::Display for ValPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.rank).map(|i| format!("x{i}")).collect();
        f.write_str(&crate::expr::format_polynomial(self, &names, "X"))
    }
}
