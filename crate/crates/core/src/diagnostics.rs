//! Sampling of approximation value sets `v(z − K)` and horizon-qualified
//! classification of elements as (weakly) distinguished.
//!
//! The approximants are the truncations of `z` at its own support
//! exponents: `v(z − trunc(z, e_k)) = e_k`. For series these realize the
//! final segment of `v(z − K)`, which is all that cofinality sees.

use serde::Serialize;

use crate::coarsening::{coarse_value, residue_polynomial, residue_series};
use crate::error::{Error, Result};
use crate::expr::BivariatePolynomial;
use crate::hensel::{hensel_root, simple_residue_roots};
use crate::poly::ValPolynomial;
use crate::series::{TruncatedSeries, Valuation};
use crate::value_group::{coset_cofinal_in, CoarseValue, ConvexSubgroup, CosetVerdict, Exponent};

/// Minimum number of sampled gaps in the winning coset before a cofinality
/// verdict is issued.
pub const DEFAULT_MIN_IN_COSET: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct ApproximationRecord {
    pub approximant: TruncatedSeries,
    pub gap: Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    WeaklyDistinguishedUpToHorizon,
    DistinguishedUpToHorizon,
    InBaseField,
    Inconclusive,
}

impl Verdict {
    /// Distinguished counts as weakly distinguished.
    pub fn is_weakly_distinguished(&self) -> bool {
        matches!(
            self,
            Verdict::WeaklyDistinguishedUpToHorizon | Verdict::DistinguishedUpToHorizon
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::WeaklyDistinguishedUpToHorizon => "WEAKLY_DISTINGUISHED_UP_TO_HORIZON",
            Verdict::DistinguishedUpToHorizon => "DISTINGUISHED_UP_TO_HORIZON",
            Verdict::InBaseField => "IN_BASE_FIELD",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyConfig {
    pub min_in_coset: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            min_in_coset: DEFAULT_MIN_IN_COSET,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CofinalityReport {
    pub samples: Vec<ApproximationRecord>,
    pub candidate_alpha: Option<Exponent>,
    pub candidate_delta: Option<ConvexSubgroup>,
    pub horizon: Exponent,
    pub verdict: Verdict,
    /// Outcome of the coset test for the candidate, if one was tried.
    pub coset: Option<CosetVerdict>,
    pub in_coset: usize,
    /// The in-coset gaps form a final segment of all sampled gaps.
    pub final_segment: bool,
}

impl CofinalityReport {
    pub fn gaps(&self) -> Vec<Exponent> {
        self.samples.iter().map(|r| r.gap.clone()).collect()
    }
}

/// Gap classification without the samples attached.
#[derive(Clone, Debug, Serialize)]
pub struct GapClassification {
    pub candidate_alpha: Option<Exponent>,
    pub candidate_delta: Option<ConvexSubgroup>,
    pub horizon: Exponent,
    pub verdict: Verdict,
    pub coset: Option<CosetVerdict>,
    pub in_coset: usize,
    pub final_segment: bool,
}

/// The records `(trunc(z, e_k), e_k)` for the support exponents `e_k`
/// below the horizon other than `v z`, plus `(z, inf)` when `z ∈ K`.
pub fn sample_value_set(z: &TruncatedSeries, horizon: &Exponent) -> Result<Vec<ApproximationRecord>> {
    if horizon > z.precision() {
        return Err(Error::BeyondPrecision {
            requested: horizon.clone(),
            precision: z.precision().clone(),
        });
    }
    let mut out = Vec::new();
    for (e, _) in z.terms().iter().skip(1).take_while(|(e, _)| e < horizon) {
        let approximant = z.truncate_at(e)?;
        debug_assert_eq!((z - &approximant).valuation(), Valuation::Known(e.clone()));
        out.push(ApproximationRecord {
            approximant,
            gap: e.clone(),
        });
    }
    if z.is_exact() && z.support().all(|e| e < horizon) {
        out.push(ApproximationRecord {
            approximant: z.clone(),
            gap: Exponent::Infinity,
        });
    }
    Ok(out)
}

/// Searches `Δ_1 ⊂ … ⊂ Δ_n` for the smallest coset `α + Δ_j` cofinal in the
/// gaps up to the horizon, with `α` the top gap with its Δ-block zeroed.
pub fn classify_gaps(
    gaps: &[Exponent],
    horizon: &Exponent,
    rank: usize,
    config: &ClassifyConfig,
) -> Result<GapClassification> {
    let mut report = GapClassification {
        candidate_alpha: None,
        candidate_delta: None,
        horizon: horizon.clone(),
        verdict: Verdict::Inconclusive,
        coset: None,
        in_coset: 0,
        final_segment: false,
    };
    if gaps.iter().any(Exponent::is_infinite) {
        report.verdict = Verdict::InBaseField;
        return Ok(report);
    }
    let Some(top) = gaps.iter().max() else {
        return Ok(report);
    };
    for j in 1..=rank {
        let delta = ConvexSubgroup::new(rank, j)?;
        let alpha = delta.coset_representative(top);
        let coset = coset_cofinal_in(gaps, &alpha, &delta, horizon)?;
        let cofinal = coset.is_cofinal();
        report.candidate_alpha = Some(alpha.clone());
        report.candidate_delta = Some(delta);
        report.coset = Some(coset);
        if !cofinal {
            continue;
        }
        let members: Vec<&Exponent> = gaps.iter().filter(|g| delta.same_coset(g, &alpha)).collect();
        report.in_coset = members.len();
        let lowest = members.iter().min().cloned();
        report.final_segment = lowest
            .is_some_and(|low| gaps.iter().filter(|g| *g >= low).all(|g| delta.same_coset(g, &alpha)));
        report.verdict = if report.in_coset < config.min_in_coset {
            Verdict::Inconclusive
        } else if alpha.is_zero() {
            Verdict::DistinguishedUpToHorizon
        } else {
            Verdict::WeaklyDistinguishedUpToHorizon
        };
        return Ok(report);
    }
    Ok(report)
}

pub fn classify(z: &TruncatedSeries, horizon: &Exponent) -> Result<CofinalityReport> {
    classify_with(z, horizon, &ClassifyConfig::default())
}

pub fn classify_with(
    z: &TruncatedSeries,
    horizon: &Exponent,
    config: &ClassifyConfig,
) -> Result<CofinalityReport> {
    let samples = sample_value_set(z, horizon)?;
    let gaps: Vec<Exponent> = samples.iter().map(|r| r.gap.clone()).collect();
    let g = classify_gaps(&gaps, horizon, z.rank(), config)?;
    Ok(CofinalityReport {
        samples,
        candidate_alpha: g.candidate_alpha,
        candidate_delta: g.candidate_delta,
        horizon: g.horizon,
        verdict: g.verdict,
        coset: g.coset,
        in_coset: g.in_coset,
        final_segment: g.final_segment,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckVerdict {
    Pass,
    PassAtHorizon,
    Fail,
    Inconclusive,
    NotApplicable,
}

impl CheckVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CheckVerdict::Pass | CheckVerdict::PassAtHorizon)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AatReport {
    pub value_b: Exponent,
    pub horizon: Exponent,
    pub shifted_horizon: Exponent,
    /// `v b + gaps(z)`.
    pub expected: Vec<Exponent>,
    /// Gaps of `b z + c` above `v b + v z`.
    pub observed: Vec<Exponent>,
    pub verdict_z: Verdict,
    pub verdict_shifted: Verdict,
    /// The candidate cosets correspond under the shift by `v b`.
    pub shift_consistent: bool,
    pub verdict: CheckVerdict,
}

/// Compares the sampled gaps of `b z + c` with `v b + ` those of `z`, inside
/// the window above `v b + v z` and below `v b + horizon`.
pub fn aat_check(
    z: &TruncatedSeries,
    b: &TruncatedSeries,
    c: &TruncatedSeries,
    horizon: &Exponent,
) -> Result<AatReport> {
    z.check_compatible(b)?;
    z.check_compatible(c)?;
    if !b.is_exact() || !c.is_exact() {
        return Err(Error::Precondition("b and c must be elements of K (finite support)".into()));
    }
    let vb = match b.leading_term() {
        Some((e, _)) => e.clone(),
        None => return Err(Error::Precondition("b must be non-zero".into())),
    };
    let vz = z
        .valuation()
        .known()
        .cloned()
        .ok_or_else(|| Error::Precondition("value of z unknown".into()))?;
    let y = &(b * z) + c;
    let shifted_horizon = &vb + horizon;
    let rz = classify(z, horizon)?;
    let ry = classify(&y, &shifted_horizon)?;
    let expected: Vec<Exponent> = rz.gaps().iter().map(|g| &vb + g).collect();
    let floor = &vb + &vz;
    let observed: Vec<Exponent> = ry.gaps().into_iter().filter(|g| g > &floor).collect();
    let shift_consistent = match (&rz.candidate_alpha, &ry.candidate_alpha) {
        (Some(a), Some(b2)) => {
            rz.candidate_delta == ry.candidate_delta
                && rz
                    .candidate_delta
                    .is_some_and(|d| d.same_coset(&(&vb + a), b2))
        }
        (None, None) => true,
        _ => false,
    } && rz.verdict.is_weakly_distinguished() == ry.verdict.is_weakly_distinguished();
    let verdict = if expected == observed {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    };
    Ok(AatReport {
        value_b: vb,
        horizon: horizon.clone(),
        shifted_horizon,
        expected,
        observed,
        verdict_z: rz.verdict,
        verdict_shifted: ry.verdict,
        shift_consistent,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChardistReport {
    pub delta: ConvexSubgroup,
    pub horizon: Exponent,
    /// The horizon as seen in the residue field (rank `j`).
    pub residue_horizon: Exponent,
    pub residue: TruncatedSeries,
    /// `v̄(r − trunc(r, e))` along the residue's own truncations.
    pub approximation_trace: Vec<Exponent>,
    /// (a) the residue is known to the residue horizon.
    pub in_completion: bool,
    /// (b) no gap lies above Δ and the residue support does not terminate.
    pub not_in_residue_field: bool,
    pub verdict: CheckVerdict,
}

/// The horizon transported to the residue field of `v_Δ`.
fn residue_horizon(horizon: &Exponent, delta: &ConvexSubgroup, residue: &TruncatedSeries) -> Exponent {
    if delta.project(horizon) == CoarseValue(Exponent::zero(delta.coarse_rank())) {
        delta.component(horizon)
    } else {
        residue.precision().clone()
    }
}

/// Whether the exponents run up to `horizon` at their own spacing.
fn climbs_to(values: &[Exponent], horizon: &Exponent, rank: usize) -> Result<bool> {
    if values.is_empty() || horizon.is_infinite() || rank == 0 {
        return Ok(false);
    }
    let whole = ConvexSubgroup::whole(rank);
    Ok(coset_cofinal_in(values, &Exponent::zero(rank), &whole, horizon)?.is_cofinal())
}

/// Checks `z v_Δ ∈ (K v_Δ)^completion ∖ K v_Δ` at the horizon, for `z` with
/// `v_Δ z = 0`.
pub fn chardist_check(
    z: &TruncatedSeries,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
) -> Result<ChardistReport> {
    if delta.is_trivial() {
        return Err(Error::TrivialSubgroup);
    }
    match coarse_value(z, delta) {
        Valuation::Known(c) if c.is_zero() => {}
        other => {
            return Err(Error::Precondition(format!(
                "coarse value of z must be 0, found {}",
                match other {
                    Valuation::Known(c) => c.to_string(),
                    Valuation::UnknownBelow(c) => format!(">={c}"),
                }
            )))
        }
    }
    let residue = residue_series(z, delta)?;
    let rh = residue_horizon(horizon, delta, &residue);
    let in_completion = &rh <= residue.precision();
    let support: Vec<Exponent> = residue.support().filter(|e| *e < &rh).cloned().collect();
    let approximation_trace: Vec<Exponent> = support.iter().skip(1).cloned().collect();

    let samples = sample_value_set(z, horizon)?;
    let gap_above_delta = samples
        .iter()
        .any(|r| delta.project(&r.gap) > CoarseValue(Exponent::zero(delta.coarse_rank())));
    let not_in_residue_field =
        !gap_above_delta && !residue.is_exact() && climbs_to(&support, &rh, delta.index())?;
    let verdict = if in_completion && not_in_residue_field {
        CheckVerdict::PassAtHorizon
    } else {
        CheckVerdict::Fail
    };
    Ok(ChardistReport {
        delta: *delta,
        horizon: horizon.clone(),
        residue_horizon: rh,
        residue,
        approximation_trace,
        in_completion,
        not_in_residue_field,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SdReport {
    pub delta: ConvexSubgroup,
    pub horizon: Exponent,
    pub sd1: CheckVerdict,
    pub sd2: CheckVerdict,
    pub sd3: CheckVerdict,
    pub notes: Vec<String>,
}

/// The three strict-distinction axioms for the coarsening `w = v_Δ`.
///
/// SD3 looks for a root of the residue polynomial `f w` lying in `K w`
/// itself (finite support): such a root means the residue of `z` has degree
/// 1 over `K w`, below `deg f`.
pub fn sd_check(
    z: &TruncatedSeries,
    f: &ValPolynomial,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
) -> Result<SdReport> {
    if delta.is_trivial() {
        return Err(Error::TrivialSubgroup);
    }
    f.check_monic()?;
    f.check_integral()?;
    let mut notes = Vec::new();
    let sd1 = match coarse_value(z, delta) {
        Valuation::Known(c) if c.is_zero() => CheckVerdict::Pass,
        _ => CheckVerdict::Fail,
    };
    let sd2 = if sd1 == CheckVerdict::Pass {
        chardist_check(z, delta, horizon)?.verdict
    } else {
        notes.push("SD2 needs w z = 0".into());
        CheckVerdict::NotApplicable
    };
    let sd3 = if f.degree() == Some(1) {
        CheckVerdict::Pass
    } else {
        sd3_verdict(z, f, delta, horizon, &mut notes)?
    };
    Ok(SdReport {
        delta: *delta,
        horizon: horizon.clone(),
        sd1,
        sd2,
        sd3,
        notes,
    })
}

fn sd3_verdict(
    z: &TruncatedSeries,
    f: &ValPolynomial,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
    notes: &mut Vec<String>,
) -> Result<CheckVerdict> {
    let fres = residue_polynomial(f, delta)?;
    let Ok(zres) = residue_series(z, delta) else {
        notes.push("residue of z undefined (negative coarse value)".into());
        return Ok(CheckVerdict::NotApplicable);
    };
    let rh = residue_horizon(horizon, delta, &zres);
    if rh.is_infinite() {
        notes.push("no finite residue horizon for the SD3 search".into());
        return Ok(CheckVerdict::Inconclusive);
    }
    let j = delta.index();
    let to_k = ConvexSubgroup::trivial(j);
    let zk = residue_series(&zres, &to_k)?;
    let start = zk.coeff(&Exponent::zero(0));
    let roots = simple_residue_roots(&fres)?;
    if !roots.contains(&start) {
        notes.push("the residue of z is not a simple root of the residue polynomial".into());
        return Ok(CheckVerdict::Inconclusive);
    }
    let c0 = TruncatedSeries::constant(j, start);
    let lifted = hensel_root(&fres, &c0, &rh)?;
    let candidate = lifted.root.truncate_at(&rh.clone().min(lifted.root.precision().clone()))?;
    if fres.evaluate(&candidate).is_zero() {
        notes.push(format!(
            "residue polynomial has the root {} in the residue field of w",
            candidate
        ));
        Ok(CheckVerdict::Fail)
    } else {
        Ok(CheckVerdict::PassAtHorizon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Implication {
    ImplicationHolds,
    Vacuous,
    Violated,
}

impl Implication {
    fn from_verdicts(premise: Verdict, conclusion: Verdict) -> Self {
        match (premise.is_weakly_distinguished(), conclusion.is_weakly_distinguished()) {
            (false, _) => Implication::Vacuous,
            (true, true) => Implication::ImplicationHolds,
            (true, false) => Implication::Violated,
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, Implication::Violated)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub delta: ConvexSubgroup,
    pub horizon: Exponent,
    pub coarse_horizon: Exponent,
    /// Gaps as seen by `w = v_Δ`, strictly below the coarse horizon.
    pub coarse_gaps: Vec<Exponent>,
    pub coarse: GapClassification,
    pub fine: GapClassification,
    pub verdict: Implication,
}

/// Weakly distinguished for `w = v_Δ` must imply weakly distinguished for `v`.
pub fn coarsening_transfer_check(
    z: &TruncatedSeries,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
) -> Result<TransferReport> {
    transfer_with(z, delta, horizon, &ClassifyConfig::default())
}

pub fn transfer_with(
    z: &TruncatedSeries,
    delta: &ConvexSubgroup,
    horizon: &Exponent,
    config: &ClassifyConfig,
) -> Result<TransferReport> {
    if delta.is_trivial() || delta.index() == delta.rank() {
        return Err(Error::Precondition(
            "the coarsening needs 0 < j < n so that both valuations are non-trivial".into(),
        ));
    }
    let samples = sample_value_set(z, horizon)?;
    let gaps: Vec<Exponent> = samples.iter().map(|r| r.gap.clone()).collect();
    let fine = classify_gaps(&gaps, horizon, z.rank(), config)?;
    let coarse_horizon = delta.project(horizon).0;
    let mut coarse_gaps: Vec<Exponent> = gaps
        .iter()
        .map(|g| delta.project(g).0)
        .filter(|g| g.is_infinite() || g < &coarse_horizon)
        .collect();
    coarse_gaps.dedup();
    let coarse = classify_gaps(&coarse_gaps, &coarse_horizon, delta.coarse_rank(), config)?;
    let verdict = Implication::from_verdicts(coarse.verdict, fine.verdict);
    Ok(TransferReport {
        delta: *delta,
        horizon: horizon.clone(),
        coarse_horizon,
        coarse_gaps,
        coarse,
        fine,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub horizon: Exponent,
    pub x: TruncatedSeries,
    pub z: TruncatedSeries,
    /// Classification of the intermediate element `x` over `K`.
    pub x_verdict: Verdict,
    /// Gaps `v(z − c)` for the sampled approximants `c ∈ L = K(x)`.
    pub l_gaps: Vec<Exponent>,
    pub over_l: GapClassification,
    pub over_k: GapClassification,
    pub verdict: Implication,
}

/// Reduces `p` modulo the monic `f1` and drops coefficient terms at or
/// above `horizon`, keeping an exact element of `K[X]/(f1)`.
fn reduce_in_l(p: &ValPolynomial, f1: &ValPolynomial, horizon: &Exponent) -> Result<ValPolynomial> {
    let r = p.rem(f1)?;
    let coeffs = r
        .coeffs()
        .iter()
        .map(|c| c.truncate_at(horizon))
        .collect::<Result<Vec<_>>>()?;
    ValPolynomial::new(p.rank(), p.field(), coeffs)
}

/// Transitivity through a tower `K ⊆ L = K(x) ⊆ L(z)`, with `x` a root of
/// `f1` lifted from `x0` and `z` a root of `f2(x, Y)` lifted from `z0`.
///
/// Elements of `L` are polynomials in `x` of degree `< deg f1` with exact
/// coefficients from `K`. The `L`-approximants come from the chord
/// iteration `c ← c − u · f2(X, c)` in `K[X]/(f1)`, with `u` the inverse of
/// the residue of `f2'(z0)`; each step gains at least the value of
/// `1 − u f2'(z)`, so the gaps `v(z − c_k)` fill the final segment densely.
pub fn tower_check(
    f1: &ValPolynomial,
    x0: &TruncatedSeries,
    f2: &BivariatePolynomial,
    z0: &TruncatedSeries,
    horizon: &Exponent,
) -> Result<TowerReport> {
    let config = ClassifyConfig::default();
    f1.check_monic()?;
    let x = hensel_root(f1, x0, horizon)?.root;
    let f2x = f2.specialize_x(&x)?;
    let z = hensel_root(&f2x, z0, horizon)?.root;
    let x_verdict = classify_with(&x, horizon, &config)?.verdict;

    let rank = x.rank();
    let field = x.field();
    let k_level = ConvexSubgroup::trivial(rank);
    let dz0 = f2x.derivative().evaluate(z0);
    let unit = residue_series(&dz0, &k_level)?.coeff(&Exponent::zero(0));
    let u = unit
        .inv()
        .ok_or_else(|| Error::NotSimpleRoot { value: "residue of f2'(z0) is 0".into() })?;
    let u = TruncatedSeries::constant(rank, u);

    let mut c = ValPolynomial::constant(z0.clone());
    let mut l_gaps: Vec<Exponent> = Vec::new();
    for _ in 0..4096 {
        let gap = (&z - &c.evaluate(&x)).valuation();
        match gap {
            Valuation::Known(g) if &g < horizon => {
                if l_gaps.last().is_some_and(|prev| &g <= prev) {
                    return Err(Error::Invariant(format!(
                        "chord iteration did not improve: {g}"
                    )));
                }
                l_gaps.push(g);
            }
            _ => break,
        }
        // f2(X, c) by Horner in K[X]/(f1)
        let mut acc = ValPolynomial::zero(rank, field);
        for coeff in f2.coeffs.iter().rev() {
            acc = reduce_in_l(&(&(&acc * &c) + coeff), f1, horizon)?;
        }
        c = reduce_in_l(&(&c - &acc.scale(&u)), f1, horizon)?;
    }
    // the L-approximant z0 itself plays the role of the zero approximant
    if !l_gaps.is_empty() {
        l_gaps.remove(0);
    }
    let over_l = classify_gaps(&l_gaps, horizon, rank, &config)?;
    let k_samples = sample_value_set(&z, horizon)?;
    let k_gaps: Vec<Exponent> = k_samples.iter().map(|r| r.gap.clone()).collect();
    let over_k = classify_gaps(&k_gaps, horizon, rank, &config)?;
    let verdict = Implication::from_verdicts(over_l.verdict, over_k.verdict);
    Ok(TowerReport {
        horizon: horizon.clone(),
        x,
        z,
        x_verdict,
        l_gaps,
        over_l,
        over_k,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InitialSegmentReport {
    pub horizon: Exponent,
    /// The largest sampled gap is not a witnessed maximum: the gaps run up
    /// to the horizon.
    pub no_maximum: bool,
    /// Number of `c + d` constructions checked.
    pub constructed: usize,
    /// Values `δ` for which `v(z − (c + x^δ)) ≠ δ`.
    pub failures: Vec<Exponent>,
    pub verdict: CheckVerdict,
}

/// For each sampled `(c, γ)` and each probe `δ < γ` (one step down in every
/// coordinate), `d = x^δ` gives `v(z − (c + d)) = δ`: every value below a
/// gap is itself a gap. Also checks that the gaps climb to the horizon.
pub fn initial_segment_check(z: &TruncatedSeries, horizon: &Exponent) -> Result<InitialSegmentReport> {
    let samples = sample_value_set(z, horizon)?;
    let rank = z.rank();
    let mut constructed = 0;
    let mut failures = Vec::new();
    for r in &samples {
        if r.gap.is_infinite() {
            continue;
        }
        for i in 0..rank {
            let delta = &r.gap - &Exponent::unit(rank, i);
            let d = TruncatedSeries::unit_monomial(rank, z.field(), delta.clone());
            let v = (z - &(&r.approximant + &d)).valuation();
            constructed += 1;
            if v != Valuation::Known(delta.clone()) {
                failures.push(delta);
            }
        }
    }
    let gaps: Vec<Exponent> = samples
        .iter()
        .map(|r| r.gap.clone())
        .filter(|g| g.is_finite())
        .collect();
    let in_base_field = samples.iter().any(|r| r.gap.is_infinite());
    let no_maximum = !in_base_field && climbs_to(&gaps, horizon, rank)?;
    let verdict = if failures.is_empty() && (no_maximum || in_base_field) {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    };
    Ok(InitialSegmentReport {
        horizon: horizon.clone(),
        no_maximum,
        constructed,
        failures,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ImmediacyReport {
    pub horizon: Exponent,
    pub samples: usize,
    /// Every gap is a support exponent of `z`, hence a value of `K`.
    pub values_in_value_group: bool,
    /// Every leading coefficient of `z − c` is a residue of an element of `K`.
    pub residues_in_residue_field: bool,
    pub verdict: CheckVerdict,
}

/// Per-sample immediacy evidence: the gaps and the residues of
/// `(z − c) / x^gap` already occur in `K`.
pub fn immediacy_check(z: &TruncatedSeries, horizon: &Exponent) -> Result<ImmediacyReport> {
    let samples = sample_value_set(z, horizon)?;
    let mut values_ok = true;
    let mut residues_ok = true;
    for r in samples.iter().filter(|r| r.gap.is_finite()) {
        values_ok &= z.support().any(|e| e == &r.gap);
        let diff = z - &r.approximant;
        match diff.leading_term() {
            Some((e, c)) => {
                // the monomial c · x^e is an element of K with the same residue
                let witness = TruncatedSeries::monomial(z.rank(), e.clone(), c.clone());
                let ratio_lead = witness.coeff(e);
                residues_ok &= &ratio_lead == c && e == &r.gap;
            }
            None => residues_ok = false,
        }
    }
    let verdict = if values_ok && residues_ok {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    };
    Ok(ImmediacyReport {
        horizon: horizon.clone(),
        samples: samples.len(),
        values_in_value_group: values_ok,
        residues_in_residue_field: residues_ok,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffField;
    use crate::expr::{parse_bivariate, parse_polynomial, parse_series};
    use crate::hensel::hensel_root;

    const Q: CoeffField = CoeffField::Rational;

    fn st() -> Vec<String> {
        vec!["s".into(), "t".into()]
    }

    fn e(c: &[i64]) -> Exponent {
        Exponent::new(c)
    }

    fn ser(text: &str) -> TruncatedSeries {
        parse_series(text, &st(), Q).unwrap()
    }

    fn root(target: &Exponent) -> TruncatedSeries {
        let f = parse_polynomial("X^2 - X - t", &st(), Q).unwrap();
        hensel_root(&f, &TruncatedSeries::one(2, Q), target).unwrap().root
    }

    /// Independent oracle: a_m from a² − a = t by the convolution recurrence
    /// a_m = Σ_{i=1}^{m-1} a_i a_{m-i} (m ≥ 2), a_0 = 1, a_1 = 1.
    fn recurrence_support(n: usize) -> Vec<i64> {
        use num_bigint::BigInt;
        let mut a: Vec<BigInt> = vec![1.into(), 1.into()];
        for m in 2..n {
            let s: BigInt = (1..m).map(|i| &a[i] * &a[m - i]).sum();
            a.push(-s);
        }
        (1..n as i64).filter(|&m| a[m as usize] != BigInt::from(0)).collect()
    }

    #[test]
    fn sample_examples() {
        let z = ser("1 + t - t^2 + 2*t^3 + O(t^4)");
        let gaps: Vec<Exponent> = sample_value_set(&z, &e(&[0, 4]))
            .unwrap()
            .into_iter()
            .map(|r| r.gap)
            .collect();
        assert_eq!(gaps, vec![e(&[0, 1]), e(&[0, 2]), e(&[0, 3])]);

        let s = ser("s");
        let r = sample_value_set(&s, &e(&[2, 0])).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].gap.is_infinite());
        assert_eq!(classify(&s, &e(&[2, 0])).unwrap().verdict, Verdict::InBaseField);

        assert!(matches!(
            sample_value_set(&z, &e(&[0, 9])),
            Err(Error::BeyondPrecision { .. })
        ));
    }

    #[test]
    fn running_root_is_distinguished() {
        let h = e(&[0, 50]);
        let a = root(&h);
        let rep = classify(&a, &h).unwrap();
        assert_eq!(rep.verdict, Verdict::DistinguishedUpToHorizon);
        assert_eq!(rep.candidate_delta, Some(ConvexSubgroup::new(2, 1).unwrap()));
        assert_eq!(rep.candidate_alpha, Some(e(&[0, 0])));
        assert!(rep.final_segment);
        let expected: Vec<Exponent> = recurrence_support(50).into_iter().map(|m| e(&[0, m])).collect();
        assert_eq!(rep.gaps(), expected);
    }

    #[test]
    fn shifted_root_is_weakly_distinguished() {
        let a = root(&e(&[0, 50]));
        let z = &ser("s") * &a;
        let rep = classify(&z, &e(&[1, 50])).unwrap();
        assert_eq!(rep.verdict, Verdict::WeaklyDistinguishedUpToHorizon);
        assert_eq!(rep.candidate_alpha, Some(e(&[1, 0])));
        assert_eq!(rep.candidate_delta, Some(ConvexSubgroup::new(2, 1).unwrap()));
    }

    #[test]
    fn exact_element_is_in_base_field() {
        assert_eq!(
            classify(&ser("1 + t"), &e(&[0, 50])).unwrap().verdict,
            Verdict::InBaseField
        );
    }

    #[test]
    fn sparse_samples_are_inconclusive() {
        let z = ser("1 + t + t^2 + O(t^3)");
        assert_eq!(classify(&z, &e(&[0, 3])).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn aat_examples() {
        let h = e(&[0, 40]);
        let a = root(&h);
        for (b, c, shift) in [("s", "3", e(&[1, 0])), ("1", "0", e(&[0, 0])), ("t^-1", "0", e(&[0, -1]))] {
            let rep = aat_check(&a, &ser(b), &ser(c), &h).unwrap();
            assert_eq!(rep.verdict, CheckVerdict::Pass, "b = {b}, c = {c}");
            assert_eq!(rep.value_b, shift);
            assert!(rep.shift_consistent);
        }
        assert!(aat_check(&a, &ser("0"), &ser("1"), &h).is_err());
    }

    #[test]
    fn chardist_examples() {
        let h = e(&[0, 50]);
        let d1 = ConvexSubgroup::new(2, 1).unwrap();
        let a = root(&h);
        let rep = chardist_check(&a, &d1, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::PassAtHorizon);
        assert_eq!(rep.approximation_trace.len(), 49);

        let rep = chardist_check(&ser("1 + t"), &d1, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Fail);
        assert!(!rep.not_in_residue_field);

        let rep = chardist_check(&ser("s + t"), &d1, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Fail);

        assert!(matches!(
            chardist_check(&ser("s"), &d1, &h),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sd_examples() {
        let h = e(&[0, 40]);
        let d1 = ConvexSubgroup::new(2, 1).unwrap();
        let a = root(&h);
        let f = parse_polynomial("X^2 - X - t", &st(), Q).unwrap();
        let rep = sd_check(&a, &f, &d1, &h).unwrap();
        assert_eq!(
            (rep.sd1, rep.sd2, rep.sd3),
            (CheckVerdict::Pass, CheckVerdict::PassAtHorizon, CheckVerdict::PassAtHorizon)
        );

        let lin = parse_polynomial("X - t", &st(), Q).unwrap();
        let rep = sd_check(&ser("t"), &lin, &d1, &h).unwrap();
        assert_eq!((rep.sd1, rep.sd2), (CheckVerdict::Pass, CheckVerdict::Fail));

        assert!(matches!(
            sd_check(&a, &f, &ConvexSubgroup::trivial(2), &h),
            Err(Error::TrivialSubgroup)
        ));
    }

    #[test]
    fn sd3_detects_root_in_residue_field() {
        // (X − 1)(X − t − s): residue X² − (1+t)X + t splits over K w
        let h = e(&[0, 20]);
        let d1 = ConvexSubgroup::new(2, 1).unwrap();
        let f = parse_polynomial("(X - 1)*(X - t - s)", &st(), Q).unwrap();
        let z = ser("t + s");
        let rep = sd_check(&z, &f, &d1, &h).unwrap();
        assert_eq!(rep.sd3, CheckVerdict::Fail);
    }

    #[test]
    fn transfer_examples() {
        let d1 = ConvexSubgroup::new(2, 1).unwrap();
        let h = e(&[0, 40]);
        let a = root(&h);
        let rep = coarsening_transfer_check(&a, &d1, &h).unwrap();
        assert_eq!(rep.fine.verdict, Verdict::DistinguishedUpToHorizon);
        assert!(rep.verdict.holds());

        let rep = coarsening_transfer_check(&ser("1 + t"), &d1, &h).unwrap();
        assert_eq!(rep.verdict, Implication::Vacuous);

        // a root in the coarse variable is distinguished for both valuations
        let f = parse_polynomial("X^2 - X - s", &st(), Q).unwrap();
        let hs = e(&[40, 0]);
        let b = hensel_root(&f, &TruncatedSeries::one(2, Q), &hs).unwrap().root;
        let rep = coarsening_transfer_check(&b, &d1, &hs).unwrap();
        assert_eq!(rep.coarse.verdict, Verdict::DistinguishedUpToHorizon);
        assert_eq!(rep.verdict, Implication::ImplicationHolds);
    }

    #[test]
    fn tower_example() {
        let f1 = parse_polynomial("X^2 - X - t", &st(), Q).unwrap();
        let f2 = parse_bivariate("Y^2 - Y - X*t", &st(), Q).unwrap();
        let one = TruncatedSeries::one(2, Q);
        let rep = tower_check(&f1, &one, &f2, &one, &e(&[0, 24])).unwrap();
        assert!(rep.over_l.verdict.is_weakly_distinguished());
        assert_eq!(rep.verdict, Implication::ImplicationHolds);
        assert!(rep.l_gaps.len() >= 8);
    }

    #[test]
    fn initial_segment_and_immediacy() {
        let h = e(&[0, 30]);
        let a = root(&h);
        let rep = initial_segment_check(&a, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Pass);
        assert!(rep.no_maximum && rep.constructed > 0);
        let rep = immediacy_check(&a, &h).unwrap();
        assert_eq!(rep.verdict, CheckVerdict::Pass);
    }

    #[test]
    fn cofinal_gaps_example() {
        let gaps: Vec<Exponent> = (1..=50).map(|m| e(&[1, m])).collect();
        let g = classify_gaps(&gaps, &e(&[1, 51]), 2, &ClassifyConfig::default()).unwrap();
        assert_eq!(g.verdict, Verdict::WeaklyDistinguishedUpToHorizon);
        assert_eq!(g.in_coset, 50);
    }
}
