//! The lexicographically ordered group ℤⁿ, its convex subgroups and quotients.
//!
//! Exponents are written with the most significant coordinate first, so
//! `(1,0) > (0,999)`. The convex subgroups of ℤⁿ under lex order are exactly
//! the suffix blocks `Δ_j = {0}ⁿ⁻ʲ × ℤʲ`, which form the chain
//! `Δ_0 ⊂ Δ_1 ⊂ … ⊂ Δ_n`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of ℤⁿ, or the sentinel `Infinity` used as the value of zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Exponent {
    Finite(Vec<i64>),
    Infinity,
}

impl Exponent {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Exponent::Finite(coords.into())
    }

    pub fn zero(rank: usize) -> Self {
        Exponent::Finite(vec![0; rank])
    }

    /// The unit vector `e_i` (0-based, `i = 0` most significant).
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Exponent::Finite(c)
    }

    pub fn coords(&self) -> Option<&[i64]> {
        match self {
            Exponent::Finite(c) => Some(c),
            Exponent::Infinity => None,
        }
    }

    /// Rank of a finite exponent; `None` for infinity, which has every rank.
    pub fn rank(&self) -> Option<usize> {
        self.coords().map(<[i64]>::len)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        self.coords().is_some_and(|c| c.iter().all(|&x| x == 0))
    }

    /// Strictly greater than the zero of the group (infinity counts as positive).
    pub fn is_positive(&self) -> bool {
        match self {
            Exponent::Infinity => true,
            Exponent::Finite(c) => c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Exponent::Infinity => false,
            Exponent::Finite(c) => c.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0),
        }
    }

    /// `k · self`; infinity stays infinity for `k > 0`.
    pub fn scale(&self, k: i64) -> Exponent {
        match self {
            Exponent::Infinity => {
                assert!(k > 0, "infinity scaled by non-positive factor");
                Exponent::Infinity
            }
            Exponent::Finite(c) => Exponent::Finite(c.iter().map(|x| x * k).collect()),
        }
    }

    /// Concatenation of coordinate blocks: `(head, tail)`.
    pub fn concat(head: &[i64], tail: &[i64]) -> Exponent {
        let mut c = head.to_vec();
        c.extend_from_slice(tail);
        Exponent::Finite(c)
    }

    /// Index of the first non-zero coordinate.
    fn leading_index(&self) -> Option<usize> {
        self.coords()?.iter().position(|&x| x != 0)
    }

    /// Whether some positive multiple `k · self` reaches `target`.
    ///
    /// This is the reachability test behind every doubling or geometric
    /// iteration: a value stuck in the coset `(0,·)` never reaches `(1,0)`.
    pub fn multiple_reaches(&self, target: &Exponent) -> bool {
        if target.is_infinite() {
            return self.is_infinite();
        }
        if self >= target {
            return true;
        }
        if !self.is_positive() {
            return false;
        }
        match (self.leading_index(), target.leading_index()) {
            // target is zero but self < target is impossible for positive self
            (_, None) => true,
            (Some(i), Some(k)) => {
                if k < i {
                    // target must be positive there, since target > self > 0
                    target.coords().unwrap()[k] < 0
                } else {
                    true
                }
            }
            (None, Some(_)) => false,
        }
    }

    /// Smallest `k ≥ 1` with `k · self ≥ target`, if any.
    pub fn steps_to_reach(&self, target: &Exponent) -> Option<i64> {
        if !self.multiple_reaches(target) {
            return None;
        }
        if self.is_infinite() {
            return Some(1);
        }
        let (i, s) = match self.leading_index() {
            Some(i) => (i, self.coords().unwrap()[i]),
            None => return Some(1),
        };
        let t = target.coords().unwrap();
        let mut k = if t[i] > 0 { (t[i] + s - 1) / s } else { 1 }.max(1);
        while &self.scale(k) < target {
            k += 1;
        }
        Some(k)
    }
}

/// Lexicographic comparison with a rank check.
pub fn lex_compare(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    if let (Some(ra), Some(rb)) = (a.rank(), b.rank()) {
        if ra != rb {
            return Err(Error::RankMismatch {
                left: ra,
                right: rb,
            });
        }
    }
    Ok(a.cmp(b))
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinity, Exponent::Infinity) => Ordering::Equal,
            (Exponent::Infinity, _) => Ordering::Greater,
            (_, Exponent::Infinity) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                debug_assert_eq!(a.len(), b.len(), "comparing exponents of different rank");
                a.cmp(b)
            }
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Exponent {
    type Output = Exponent;

    fn add(self, rhs: &Exponent) -> Exponent {
        match (self, rhs) {
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                debug_assert_eq!(a.len(), b.len());
                Exponent::Finite(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => Exponent::Infinity,
        }
    }
}

impl Add for Exponent {
    type Output = Exponent;

    fn add(self, rhs: Exponent) -> Exponent {
        &self + &rhs
    }
}

impl Sub for &Exponent {
    type Output = Exponent;

    /// `∞ − finite = ∞`. Subtracting infinity is a logic error.
    fn sub(self, rhs: &Exponent) -> Exponent {
        match (self, rhs) {
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                debug_assert_eq!(a.len(), b.len());
                Exponent::Finite(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            (Exponent::Infinity, Exponent::Finite(_)) => Exponent::Infinity,
            (_, Exponent::Infinity) => panic!("cannot subtract infinity"),
        }
    }
}

impl Sub for Exponent {
    type Output = Exponent;

    fn sub(self, rhs: Exponent) -> Exponent {
        &self - &rhs
    }
}

impl Neg for &Exponent {
    type Output = Exponent;

    fn neg(self) -> Exponent {
        match self {
            Exponent::Finite(a) => Exponent::Finite(a.iter().map(|x| -x).collect()),
            Exponent::Infinity => panic!("cannot negate infinity"),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(c) => {
                write!(f, "(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Parses `"(2,-1)"`, `"()"` or `"inf"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Exponent::Infinity);
        }
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse {
                position: 0,
                message: format!("exponent `{s}` must be a parenthesized tuple or `inf`"),
            })?;
        if inner.trim().is_empty() {
            return Ok(Exponent::Finite(Vec::new()));
        }
        inner
            .split(',')
            .map(|part| {
                part.trim().parse::<i64>().map_err(|e| Error::Parse {
                    position: 0,
                    message: format!("bad coordinate `{part}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Exponent::Finite)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The convex subgroup `Δ_j` of ℤⁿ: exponents whose first `n − j`
/// coordinates vanish.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ConvexSubgroup {
    rank: usize,
    j: usize,
}

impl ConvexSubgroup {
    pub fn new(rank: usize, j: usize) -> Result<Self> {
        if j > rank {
            return Err(Error::SubgroupOutOfRange { j, rank });
        }
        Ok(ConvexSubgroup { rank, j })
    }

    pub fn trivial(rank: usize) -> Self {
        ConvexSubgroup { rank, j: 0 }
    }

    pub fn whole(rank: usize) -> Self {
        ConvexSubgroup { rank, j: rank }
    }

    /// The full chain `Δ_0 ⊂ … ⊂ Δ_n`.
    pub fn chain(rank: usize) -> impl Iterator<Item = ConvexSubgroup> {
        (0..=rank).map(move |j| ConvexSubgroup { rank, j })
    }

    pub fn index(&self) -> usize {
        self.j
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank of the quotient ℤⁿ/Δ_j.
    pub fn coarse_rank(&self) -> usize {
        self.rank - self.j
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    pub fn is_subgroup_of(&self, other: &ConvexSubgroup) -> bool {
        self.rank == other.rank && self.j <= other.j
    }

    pub fn contains(&self, a: &Exponent) -> bool {
        match a.coords() {
            None => false,
            Some(c) => c[..self.rank - self.j].iter().all(|&x| x == 0),
        }
    }

    /// Image of `a` in ℤⁿ/Δ_j: the first `n − j` coordinates.
    pub fn project(&self, a: &Exponent) -> CoarseValue {
        CoarseValue(match a.coords() {
            None => Exponent::Infinity,
            Some(c) => Exponent::new(&c[..self.rank - self.j]),
        })
    }

    /// The Δ-block of `a`: its last `j` coordinates, as an element of ℤʲ.
    pub fn component(&self, a: &Exponent) -> Exponent {
        match a.coords() {
            None => Exponent::Infinity,
            Some(c) => Exponent::new(&c[self.rank - self.j..]),
        }
    }

    /// The representative of `a + Δ_j` whose Δ-block is zero.
    pub fn coset_representative(&self, a: &Exponent) -> Exponent {
        match a.coords() {
            None => Exponent::Infinity,
            Some(c) => {
                let k = self.rank - self.j;
                Exponent::concat(&c[..k], &vec![0; self.j])
            }
        }
    }

    /// Embed an element of ℤʲ into Δ_j ⊆ ℤⁿ.
    pub fn embed(&self, delta_part: &Exponent) -> Exponent {
        match delta_part.coords() {
            None => Exponent::Infinity,
            Some(c) => Exponent::concat(&vec![0; self.rank - self.j], c),
        }
    }

    pub fn same_coset(&self, a: &Exponent, b: &Exponent) -> bool {
        self.project(a) == self.project(b)
    }
}

impl fmt::Display for ConvexSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Delta_{}", self.j)
    }
}

impl Serialize for ConvexSubgroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.j as u64)
    }
}

/// An element of a quotient ℤⁿ/Δ_j, stored as its `n − j` leading coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct CoarseValue(pub Exponent);

impl CoarseValue {
    pub fn exponent(&self) -> &Exponent {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for CoarseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Outcome of [`coset_cofinal_in`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CosetVerdict {
    /// Every value lies at or below the coset, and the coset members climb
    /// to the horizon at their own observed spacing.
    CofinalUpToHorizon { horizon: Exponent, in_coset: usize },
    /// A sampled value lies above every element of the coset.
    Exceeds { value: Exponent },
    /// The coset members stop short of the horizon (or the coset lies
    /// entirely below the horizon, so no finite sample can witness it).
    NotReached { top: Option<Exponent>, horizon: Exponent },
}

impl CosetVerdict {
    pub fn is_cofinal(&self) -> bool {
        matches!(self, CosetVerdict::CofinalUpToHorizon { .. })
    }
}

/// At-horizon test of whether `α + Δ` is cofinal in the sampled `values`.
///
/// (a) every value must be `≤` some element of the coset, i.e. project at
/// or below `α`; (b) the members inside the coset must run up to the
/// horizon: the distance from the largest member to the horizon may not
/// exceed the largest spacing between consecutive members (one unit of the
/// finest coordinate when there is a single member).
pub fn coset_cofinal_in(
    values: &[Exponent],
    alpha: &Exponent,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
) -> Result<CosetVerdict> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if delta.is_trivial() {
        return Err(Error::TrivialSubgroup);
    }
    for v in values {
        if v.is_finite() {
            lex_compare(v, alpha)?;
            if v >= horizon {
                return Err(Error::Precondition(format!(
                    "sampled value {v} is not below the horizon {horizon}"
                )));
            }
        }
    }
    let alpha_bar = delta.project(alpha);
    if let Some(v) = values.iter().find(|v| delta.project(v) > alpha_bar) {
        return Ok(CosetVerdict::Exceeds { value: v.clone() });
    }

    let mut members: Vec<&Exponent> = values
        .iter()
        .filter(|v| delta.project(v) == alpha_bar)
        .collect();
    members.sort();
    members.dedup();
    let Some(&top) = members.last() else {
        return Ok(CosetVerdict::NotReached {
            top: None,
            horizon: horizon.clone(),
        });
    };
    if !delta.same_coset(horizon, alpha) {
        return Ok(CosetVerdict::NotReached {
            top: Some(top.clone()),
            horizon: horizon.clone(),
        });
    }
    let rank = delta.rank();
    let spacing = members
        .windows(2)
        .map(|w| w[1] - w[0])
        .max()
        .unwrap_or_else(|| Exponent::unit(rank, rank - 1));
    if &(horizon - top) <= &spacing {
        Ok(CosetVerdict::CofinalUpToHorizon {
            horizon: horizon.clone(),
            in_coset: members.len(),
        })
    } else {
        Ok(CosetVerdict::NotReached {
            top: Some(top.clone()),
            horizon: horizon.clone(),
        })
    }
}
