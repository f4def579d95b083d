//! Degree-drop certificates: when `z` lies closer to a henselization element
//! `a` than `K` does, the minimal polynomial of `z` splits over `K^h`.
//!
//! Pipeline (stages in this order): classify `a` to get `(α, Δ)`, scale by
//! `d = x^{-α}`, split the residue polynomial at `Δ` by lifting a simple root
//! from `k`, then lift that split back to rank `n`.

use serde::Serialize;

use crate::coarsening::{residue_polynomial, residue_series};
use crate::diagnostics::{classify, sample_value_set, CheckVerdict, Verdict};
use crate::error::{Error, Result};
use crate::hensel::{hensel_root, lift_factorization, simple_residue_roots};
use crate::poly::ValPolynomial;
use crate::series::TruncatedSeries;
use crate::value_group::{CoarseValue, ConvexSubgroup, Exponent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DropVerdict {
    DegreeDrop,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisEvidence {
    /// `v(z − a) = v(shift)`.
    pub shift_value: Exponent,
    pub max_sampled_gap: Option<Exponent>,
    pub sampled_gaps: usize,
    pub horizon: Exponent,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorReport {
    pub input_degree: usize,
    pub factor_degrees: Vec<usize>,
    pub delta_used: Option<ConvexSubgroup>,
    pub alpha: Option<Exponent>,
    pub scaling_d: Option<TruncatedSeries>,
    pub precision: Exponent,
    /// Smallest coefficient value of `f_d − g h`.
    pub certificate: Option<Exponent>,
    /// Index into `factor_degrees` of the factor vanishing at `d z`.
    pub vanishing_factor: Option<usize>,
    pub hypothesis: HypothesisEvidence,
    pub classify_verdict: Verdict,
    pub verdict: DropVerdict,
    pub notes: Vec<String>,
    /// Factors of `f_d(X) = d^{deg f} f(X / d)`.
    #[serde(skip)]
    pub factors: Vec<ValPolynomial>,
}

impl FactorReport {
    fn inconclusive(
        input_degree: usize,
        precision: &Exponent,
        hypothesis: HypothesisEvidence,
        classify_verdict: Verdict,
        note: String,
    ) -> Self {
        FactorReport {
            input_degree,
            factor_degrees: vec![input_degree],
            delta_used: None,
            alpha: None,
            scaling_d: None,
            precision: precision.clone(),
            certificate: None,
            vanishing_factor: None,
            hypothesis,
            classify_verdict,
            verdict: DropVerdict::Inconclusive,
            notes: vec![note],
            factors: Vec::new(),
        }
    }
}

/// The rank-`j` target matching `precision`; infinite when `precision` lies
/// above the coset `Δ`.
fn residue_target(precision: &Exponent, delta: &ConvexSubgroup) -> Exponent {
    if delta.project(precision) == CoarseValue(Exponent::zero(delta.coarse_rank())) {
        delta.component(precision)
    } else {
        Exponent::Infinity
    }
}

/// The constant term of `x` in `k`.
fn residue_in_k(x: &TruncatedSeries) -> Result<crate::coeff::Coeff> {
    let r = residue_series(x, &ConvexSubgroup::trivial(x.rank()))?;
    Ok(r.coeff(&Exponent::zero(0)))
}

/// Certifies `[K^h(z):K^h] < [K(z):K]` at truncation scale.
///
/// `z = a + shift` with `shift ∈ K` known exactly, so that `v(z − a)` is
/// visible beyond the precision of `a`. `f` is the minimal polynomial of `z`
/// over `K` (verified monic with `f(z) ≡ 0`, not verified irreducible); `a`
/// is a Hensel root known to at least `horizon`. The hypothesis
/// `v(z − a) > v(a − K)` is checked against the sampled gaps only.
pub fn certify_degree_drop(
    f: &ValPolynomial,
    a: &TruncatedSeries,
    shift: &TruncatedSeries,
    horizon: &Exponent,
    precision: &Exponent,
) -> Result<FactorReport> {
    f.check_monic()?;
    shift.check_compatible(a)?;
    if !shift.is_exact() {
        return Err(Error::Precondition("shift must be an element of K (finite support)".into()));
    }
    let z = &(a + shift);
    let input_degree = f.degree().unwrap_or(0);
    if input_degree < 2 {
        return Err(Error::Precondition("minimal polynomial must have degree >= 2".into()));
    }
    if !f.evaluate(z).valuation().known().is_none_or(Exponent::is_infinite) {
        return Err(Error::NotApproximateRoot {
            value: f.evaluate(z).valuation().to_string(),
        });
    }

    let samples = sample_value_set(a, horizon)?;
    let shift_value = shift.valuation().known().cloned().unwrap_or(Exponent::Infinity);
    let max_gap = samples.iter().map(|r| r.gap.clone()).max();
    let hypothesis = HypothesisEvidence {
        shift_value: shift_value.clone(),
        max_sampled_gap: max_gap.clone(),
        sampled_gaps: samples.len(),
        horizon: horizon.clone(),
    };
    if let Some(g) = &max_gap {
        if &shift_value <= g {
            return Err(Error::HypothesisNotMet(format!(
                "v(z - a) = {shift_value} does not exceed the sampled gap {g}"
            )));
        }
    }

    let rep = classify(a, horizon)?;
    let (Some(alpha), Some(delta)) = (rep.candidate_alpha.clone(), rep.candidate_delta) else {
        return Ok(FactorReport::inconclusive(
            input_degree,
            precision,
            hypothesis,
            rep.verdict,
            "classify produced no candidate coset".into(),
        ));
    };
    if !rep.verdict.is_weakly_distinguished() {
        return Ok(FactorReport::inconclusive(
            input_degree,
            precision,
            hypothesis,
            rep.verdict,
            format!("a is {} at this horizon", rep.verdict.as_str()),
        ));
    }

    let d = TruncatedSeries::unit_monomial(a.rank(), a.field(), -&alpha);
    let fd = f.scale_roots(&d);
    let da = &d * a;
    let dz = &d * z;

    // stage A: split the residue polynomial over the rank-j residue field
    let big_f = residue_polynomial(&fd, &delta)?;
    let j = delta.index();
    let to_k = ConvexSubgroup::trivial(j);
    let fk = residue_polynomial(&big_f, &to_k)?;
    let rho = residue_in_k(&da)?;
    let simple = simple_residue_roots(&fk)?;
    if !simple.contains(&rho) {
        return Ok(FactorReport::inconclusive(
            input_degree,
            precision,
            hypothesis,
            rep.verdict,
            format!("residue {rho} of d a is not a simple root of the residue polynomial"),
        ));
    }
    let g0 = ValPolynomial::monic_linear(&TruncatedSeries::constant(0, rho));
    let (h0, rest) = fk.div_rem(&g0)?;
    if !rest.vanishes_to_precision() {
        return Err(Error::Invariant("residue root does not divide".into()));
    }
    let target_j = residue_target(precision, &delta);
    let stage_a = lift_factorization(&big_f, &g0, &h0, &target_j, &to_k)?;

    // stage B: lift from the residue field of v_Δ back to rank n
    let stage_b = lift_factorization(&fd, &stage_a.g, &stage_a.h, precision, &delta)?;
    let factors = vec![stage_b.g, stage_b.h];
    let factor_degrees: Vec<usize> = factors.iter().map(|p| p.degree().unwrap_or(0)).collect();
    let vanishing_factor = factors
        .iter()
        .position(|p| p.evaluate(&dz).valuation().known().is_none_or(Exponent::is_infinite));

    let drop = factor_degrees.iter().all(|&k| k >= 1)
        && factor_degrees.iter().sum::<usize>() == input_degree
        && factor_degrees.len() >= 2
        && &stage_b.certificate >= precision;
    let mut notes = vec!["v(z - a) compared against sampled gaps only".to_string()];
    if vanishing_factor.is_none() {
        notes.push("no lifted factor vanishes at d z to precision".into());
    }
    Ok(FactorReport {
        input_degree,
        factor_degrees,
        delta_used: Some(delta),
        alpha: Some(alpha),
        scaling_d: Some(d),
        precision: precision.clone(),
        certificate: Some(stage_b.certificate),
        vanishing_factor,
        hypothesis,
        classify_verdict: rep.verdict,
        verdict: if drop {
            DropVerdict::DegreeDrop
        } else {
            DropVerdict::Inconclusive
        },
        notes,
        factors,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub delta: ConvexSubgroup,
    pub alpha: Exponent,
    pub residue_horizon: Exponent,
    pub residue: TruncatedSeries,
    /// The residue reappears as a Hensel root of the residue polynomial.
    pub hensel_root_matches: bool,
    /// The residue support runs up to the residue horizon.
    pub support_unbounded: bool,
    pub verdict: CheckVerdict,
}

/// Evidence that `(d a) v_Δ` lies in `K^h v_Δ ∖ K v_Δ`, with `f` the
/// defining polynomial of `a` and `d = x^{-α}` from classification.
pub fn residue_membership_evidence(
    f: &ValPolynomial,
    a: &TruncatedSeries,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
) -> Result<MembershipReport> {
    if delta.is_trivial() {
        return Err(Error::TrivialSubgroup);
    }
    let rep = classify(a, horizon)?;
    let alpha = match rep.candidate_alpha {
        Some(alpha) if rep.verdict.is_weakly_distinguished() => delta.coset_representative(&alpha),
        _ => Exponent::zero(a.rank()),
    };
    let d = TruncatedSeries::unit_monomial(a.rank(), a.field(), -&alpha);
    let da = &d * a;
    let residue = residue_series(&da, delta)?;
    let rh = residue_target(horizon, delta);
    let rh = if rh.is_infinite() { residue.precision().clone() } else { rh };
    let big_f = residue_polynomial(&f.scale_roots(&d), delta)?;

    let start = residue_in_k(&residue)?;
    let hensel_root_matches = !rh.is_infinite()
        && simple_residue_roots(&residue_polynomial(&big_f, &ConvexSubgroup::trivial(delta.index()))?)?
            .contains(&start)
        && {
            let c0 = TruncatedSeries::constant(delta.index(), start);
            let root = hensel_root(&big_f, &c0, &rh)?.root;
            root.truncate_at(&rh)? == residue.truncate_at(&rh)?
        };
    let support: Vec<Exponent> = residue.support().filter(|e| *e < &rh).cloned().collect();
    let support_unbounded = !residue.is_exact()
        && !support.is_empty()
        && !rh.is_infinite()
        && crate::value_group::coset_cofinal_in(
            &support,
            &Exponent::zero(delta.index()),
            &ConvexSubgroup::whole(delta.index()),
            &rh,
        )?
        .is_cofinal();
    let verdict = if hensel_root_matches && support_unbounded {
        CheckVerdict::PassAtHorizon
    } else {
        CheckVerdict::Fail
    };
    Ok(MembershipReport {
        delta: *delta,
        alpha,
        residue_horizon: rh,
        residue,
        hensel_root_matches,
        support_unbounded,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffField;
    use crate::expr::{parse_polynomial, parse_series};

    const Q: CoeffField = CoeffField::Rational;

    fn st() -> Vec<String> {
        vec!["s".into(), "t".into()]
    }

    fn e(c: &[i64]) -> Exponent {
        Exponent::new(c)
    }

    fn poly(text: &str) -> ValPolynomial {
        parse_polynomial(text, &st(), Q).unwrap()
    }

    fn root(target: &Exponent) -> TruncatedSeries {
        hensel_root(&poly("X^2 - X - t"), &TruncatedSeries::one(2, Q), target)
            .unwrap()
            .root
    }

    #[test]
    fn shifted_root_drops_degree() {
        let t = e(&[0, 32]);
        let a = root(&t);
        let s = parse_series("s", &st(), Q).unwrap();
        let f = poly("X^2 - (2*s + 1)*X + (s^2 + s - t)");
        let rep = certify_degree_drop(&f, &a, &s, &t, &t).unwrap();
        assert_eq!(rep.verdict, DropVerdict::DegreeDrop);
        assert_eq!(rep.factor_degrees, vec![1, 1]);
        assert_eq!(rep.hypothesis.shift_value, e(&[1, 0]));
        assert!(rep.certificate.unwrap() >= t);
        assert_eq!(rep.delta_used, Some(ConvexSubgroup::new(2, 1).unwrap()));
        assert!(rep.vanishing_factor.is_some());
        // product certificate, recomputed independently
        let prod = &rep.factors[0] * &rep.factors[1];
        let diff = &f - &prod;
        assert!(diff.coeffs().iter().all(|c| c.valuation().is_at_least(&t)));
    }

    #[test]
    fn root_itself_drops_degree() {
        let t = e(&[0, 32]);
        let a = root(&t);
        let f = poly("X^2 - X - t");
        let rep = certify_degree_drop(&f, &a, &TruncatedSeries::zero(2, Q), &t, &t).unwrap();
        assert_eq!(rep.verdict, DropVerdict::DegreeDrop);
        assert_eq!(rep.factor_degrees, vec![1, 1]);
    }

    #[test]
    fn close_shift_fails_hypothesis() {
        let t = e(&[0, 32]);
        let a = root(&t);
        let shift = parse_series("t^3", &st(), Q).unwrap();
        // minimal polynomial of a + t^3 is f(X - t^3)
        let f = poly("X^2 - X - t").shift_argument(&parse_series("-t^3", &st(), Q).unwrap());
        assert!(matches!(
            certify_degree_drop(&f, &a, &shift, &t, &t),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn non_root_is_rejected() {
        let t = e(&[0, 16]);
        let a = root(&t);
        let f = poly("X^2 - 2");
        assert!(matches!(
            certify_degree_drop(&f, &a, &TruncatedSeries::zero(2, Q), &t, &t),
            Err(Error::NotApproximateRoot { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let h = e(&[0, 30]);
        let d1 = ConvexSubgroup::new(2, 1).unwrap();
        let a = root(&h);
        let f = poly("X^2 - X - t");
        assert_eq!(
            residue_membership_evidence(&f, &a, &d1, &h).unwrap().verdict,
            CheckVerdict::PassAtHorizon
        );

        let b = parse_series("1 + t", &st(), Q).unwrap();
        let rep = residue_membership_evidence(&poly("X - 1 - t"), &b, &d1, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Fail);

        let sa = &parse_series("s", &st(), Q).unwrap() * &a;
        let rep =
            residue_membership_evidence(&poly("X^2 - s*X - s^2*t"), &sa, &d1, &e(&[1, 30])).unwrap();
        assert_eq!(rep.alpha, e(&[1, 0]));
        assert_eq!(rep.verdict, CheckVerdict::PassAtHorizon);
    }
}
