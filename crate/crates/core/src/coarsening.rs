//! Coarse valuations `v_Δ`, residue maps onto `K v_Δ`, and the composition
//! `v = v_Δ ∘ v̄_Δ`.
//!
//! The residue field of the coarsening by `Δ_j` is again a series field, of
//! rank `j`: the residue of `x` keeps the terms whose coarse coordinates
//! vanish.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::ValPolynomial;
use crate::series::{TruncatedSeries, Valuation};
use crate::value_group::{CoarseValue, ConvexSubgroup, Exponent};

fn check_rank(x: &TruncatedSeries, delta: &ConvexSubgroup) -> Result<()> {
    if x.rank() != delta.rank() {
        return Err(Error::RankMismatch {
            left: x.rank(),
            right: delta.rank(),
        });
    }
    Ok(())
}

/// `v_Δ x`, the image of `v x` in ℤⁿ/Δ.
pub fn coarse_value(x: &TruncatedSeries, delta: &ConvexSubgroup) -> Valuation<CoarseValue> {
    match x.valuation() {
        Valuation::Known(v) => Valuation::Known(delta.project(&v)),
        Valuation::UnknownBelow(p) => Valuation::UnknownBelow(delta.project(&p)),
    }
}

/// The residue `x v_Δ` as a rank-`j` series.
pub fn residue_series(x: &TruncatedSeries, delta: &ConvexSubgroup) -> Result<TruncatedSeries> {
    check_rank(x, delta)?;
    let zero = CoarseValue(Exponent::zero(delta.coarse_rank()));
    let lowest = match x.valuation() {
        Valuation::Known(v) => v,
        Valuation::UnknownBelow(p) => p,
    };
    if delta.project(&lowest) < zero {
        return Err(Error::NegativeCoarseValue { value: lowest });
    }
    let precision = if delta.project(x.precision()) > zero {
        Exponent::Infinity
    } else {
        delta.component(x.precision())
    };
    let terms = x
        .terms()
        .iter()
        .filter(|(e, _)| delta.contains(e))
        .map(|(e, c)| (delta.component(e), c.clone()));
    Ok(TruncatedSeries::from_terms(
        delta.index(),
        x.field(),
        terms,
        precision,
    ))
}

/// Lifts a rank-`j` residue-field element back to rank `n` (the lift whose
/// coarse-positive terms are all zero).
pub fn embed_series(y: &TruncatedSeries, delta: &ConvexSubgroup) -> Result<TruncatedSeries> {
    if y.rank() != delta.index() {
        return Err(Error::RankMismatch {
            left: y.rank(),
            right: delta.index(),
        });
    }
    let terms = y
        .terms()
        .iter()
        .map(|(e, c)| (delta.embed(e), c.clone()));
    Ok(TruncatedSeries::from_terms(
        delta.rank(),
        y.field(),
        terms,
        delta.embed(y.precision()),
    ))
}

pub fn residue_polynomial(f: &ValPolynomial, delta: &ConvexSubgroup) -> Result<ValPolynomial> {
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| residue_series(c, delta))
        .collect::<Result<Vec<_>>>()?;
    ValPolynomial::new(delta.index(), f.field(), coeffs)
}

pub fn embed_polynomial(g: &ValPolynomial, delta: &ConvexSubgroup) -> Result<ValPolynomial> {
    let coeffs = g
        .coeffs()
        .iter()
        .map(|c| embed_series(c, delta))
        .collect::<Result<Vec<_>>>()?;
    ValPolynomial::new(delta.rank(), g.field(), coeffs)
}

/// The decomposition of `v x` into the coarse value and the residue value
/// of the normalized element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComposeReport {
    pub value: Exponent,
    pub delta: ConvexSubgroup,
    pub coarse_value: CoarseValue,
    pub residue_value: Exponent,
    pub reconstructed: Exponent,
    pub pass: bool,
}

/// Recovers `v x` from `v_Δ x` and `v̄_Δ` of the residue of `m⁻¹ x`, where
/// `m` is the monomial carrying the coarse part of `v x`.
pub fn compose_check(x: &TruncatedSeries, delta: &ConvexSubgroup) -> Result<ComposeReport> {
    check_rank(x, delta)?;
    let value = x.valuation().known().cloned().ok_or_else(|| {
        Error::Precondition(format!(
            "valuation unknown (zero up to {})",
            x.precision()
        ))
    })?;
    if value.is_infinite() {
        return Ok(ComposeReport {
            value: Exponent::Infinity,
            delta: *delta,
            coarse_value: CoarseValue(Exponent::Infinity),
            residue_value: Exponent::Infinity,
            reconstructed: Exponent::Infinity,
            pass: true,
        });
    }
    let coarse = match coarse_value(x, delta) {
        Valuation::Known(c) => c,
        Valuation::UnknownBelow(_) => unreachable!("valuation is known"),
    };
    let normalized = x.shift(&-&delta.coset_representative(&value));
    let residue = residue_series(&normalized, delta)?;
    let residue_value = residue.valuation().known().cloned().ok_or_else(|| {
        Error::Invariant("normalized residue has no known leading term".into())
    })?;
    let head = coarse.exponent().coords().unwrap_or(&[]);
    let tail = residue_value.coords().unwrap_or(&[]);
    let reconstructed = if residue_value.is_infinite() {
        Exponent::Infinity
    } else {
        Exponent::concat(head, tail)
    };
    Ok(ComposeReport {
        pass: reconstructed == value && delta.project(&value) == coarse,
        value,
        delta: *delta,
        coarse_value: coarse,
        residue_value,
        reconstructed,
    })
}
