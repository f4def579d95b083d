//! Coefficient fields: exact rationals and prime fields 𝔽_p.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CoeffField {
    Rational,
    Prime(u64),
}

impl CoeffField {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Session(format!("{p} is not prime")));
        }
        Ok(CoeffField::Prime(p))
    }

    pub fn zero(&self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(&self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Coeff {
        match *self {
            CoeffField::Rational => Coeff::Rational(BigRational::from_integer(n.into())),
            CoeffField::Prime(p) => Coeff::Mod {
                value: (n.rem_euclid(p as i64)) as u64,
                p,
            },
        }
    }

    /// Maps a rational number into the field; fails in 𝔽_p when `p` divides
    /// the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Coeff> {
        match *self {
            CoeffField::Rational => Ok(Coeff::Rational(q.clone())),
            CoeffField::Prime(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64().unwrap();
                let den = q.denom().mod_floor(&pb).to_u64().unwrap();
                if den == 0 {
                    return Err(Error::Precondition(format!(
                        "denominator of {q} vanishes modulo {p}"
                    )));
                }
                Ok(Coeff::Mod {
                    value: mul_mod(num, inv_mod(den, p), p),
                    p,
                })
            }
        }
    }

    pub fn check(&self, c: &Coeff) -> bool {
        c.field() == *self
    }
}

impl fmt::Display for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Rational => write!(f, "q"),
            CoeffField::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for CoeffField {
    type Err = Error;

    /// `q` or `fp:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(CoeffField::Rational);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Session(format!("bad prime `{p}`")))?;
            return CoeffField::prime(p);
        }
        Err(Error::Session(format!(
            "unknown field `{s}` (expected `q` or `fp:<p>`)"
        )))
    }
}

/// A field element. Prime-field elements carry their modulus.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Coeff {
    Rational(BigRational),
    Mod { value: u64, p: u64 },
}

impl Coeff {
    pub fn field(&self) -> CoeffField {
        match self {
            Coeff::Rational(_) => CoeffField::Rational,
            Coeff::Mod { p, .. } => CoeffField::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Rational(q) => q.is_zero(),
            Coeff::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Rational(q) => q.is_one(),
            Coeff::Mod { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => Coeff::Rational(a + b),
            (Coeff::Mod { value: a, p }, Coeff::Mod { value: b, p: q }) if p == q => Coeff::Mod {
                value: add_mod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }

    pub fn add_assign(&mut self, other: &Coeff) {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => *a += b,
            (Coeff::Mod { value: a, p }, Coeff::Mod { value: b, p: q }) if p == q => {
                *a = add_mod(*a, *b, *p)
            }
            _ => panic!("coefficient field mismatch"),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Rational(a) => Coeff::Rational(-a),
            Coeff::Mod { value, p } => Coeff::Mod {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
        }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => Coeff::Rational(a * b),
            (Coeff::Mod { value: a, p }, Coeff::Mod { value: b, p: q }) if p == q => Coeff::Mod {
                value: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coeff::Rational(a) => Coeff::Rational(a.recip()),
            Coeff::Mod { value, p } => Coeff::Mod {
                value: inv_mod(*value, *p),
                p: *p,
            },
        })
    }

    pub fn mul_i64(&self, n: i64) -> Coeff {
        self.mul(&self.field().from_i64(n))
    }

    /// Whether the printed form needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Rational(q) => q.is_negative(),
            Coeff::Mod { .. } => false,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Rational(q) => Some(q),
            Coeff::Mod { .. } => None,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Coeff::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = CoeffField::prime(5).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(4);
        assert_eq!(a.add(&b), f.from_i64(2));
        assert_eq!(a.mul(&b), f.from_i64(2));
        assert_eq!(a.inv().unwrap().mul(&a), f.one());
        assert_eq!(f.from_i64(-1), f.from_i64(4));
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rational_reduction_mod_p() {
        let f = CoeffField::prime(7).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.from_rational(&half).unwrap().mul_i64(2), f.one());
        let seventh = BigRational::new(1.into(), 7.into());
        assert!(f.from_rational(&seventh).is_err());
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(CoeffField::prime(9).is_err());
    }

    #[test]
    fn parse_field() {
        assert_eq!("q".parse::<CoeffField>().unwrap(), CoeffField::Rational);
        assert_eq!("fp:5".parse::<CoeffField>().unwrap(), CoeffField::Prime(5));
        assert!("fp:4".parse::<CoeffField>().is_err());
        assert!("z".parse::<CoeffField>().is_err());
    }
}
