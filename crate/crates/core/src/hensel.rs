//! Newton–Hensel lifting of simple roots and of coprime factorizations.

use serde::Serialize;

use crate::coarsening::{embed_polynomial, embed_series, residue_polynomial};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::poly::{roots_in_residue_field, ValPolynomial};
use crate::series::{TruncatedSeries, Valuation};
use crate::value_group::{ConvexSubgroup, Exponent};

/// Hard cap on Newton iterations; doubling reaches any reachable target far
/// sooner, so hitting it means broken precision bookkeeping.
pub const MAX_ITERATIONS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct HenselRoot {
    /// The final approximant: exact when an exact root was found, otherwise
    /// known to `target`.
    pub root: TruncatedSeries,
    /// `v f(c_k)` for every approximant, the last one certifying the target.
    pub trace: Vec<Valuation>,
    #[serde(skip)]
    pub approximants: Vec<TruncatedSeries>,
    pub target: Exponent,
    /// `v f(root)` (a lower bound when `f(root)` vanishes to precision).
    pub certificate: Valuation,
}

impl HenselRoot {
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

fn check_poly(f: &ValPolynomial, c: &TruncatedSeries) -> Result<()> {
    if f.rank() != c.rank() {
        return Err(Error::RankMismatch {
            left: f.rank(),
            right: c.rank(),
        });
    }
    if f.field() != c.field() {
        return Err(Error::FieldMismatch {
            left: f.field().to_string(),
            right: c.field().to_string(),
        });
    }
    f.check_monic()?;
    f.check_integral()
}

/// `f(c)` and `f'(c)` below `target`, with the Hensel hypotheses checked.
fn hypotheses(
    f: &ValPolynomial,
    df: &ValPolynomial,
    c: &TruncatedSeries,
    target: &Exponent,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let fc = f.evaluate_truncated(c, target);
    let dfc = df.evaluate_truncated(c, target);
    check_hypotheses(&fc, &dfc)?;
    Ok((fc, dfc))
}

/// `v f(c) > 0` and `v f'(c) = 0`.
fn check_hypotheses(fc: &TruncatedSeries, dfc: &TruncatedSeries) -> Result<()> {
    let vf = fc.valuation();
    if !vf.lower_bound().is_positive() {
        return Err(Error::NotApproximateRoot {
            value: vf.to_string(),
        });
    }
    match dfc.valuation() {
        Valuation::Known(v) if v.is_zero() => Ok(()),
        v => Err(Error::NotSimpleRoot {
            value: v.to_string(),
        }),
    }
}

fn step(
    c: &TruncatedSeries,
    fc: &TruncatedSeries,
    dfc: &TruncatedSeries,
    target: &Exponent,
) -> Result<TruncatedSeries> {
    if fc.is_empty() {
        return Ok(c.clone());
    }
    let mu = fc.valuation().lower_bound().clone();
    // f'(c) is a unit, so this budget leaves the quotient known to `target`
    let budget = if target.is_infinite() {
        Exponent::Infinity
    } else {
        target - &mu
    };
    let inv = dfc.invert(&budget)?;
    let q = fc.mul_truncated(&inv, target.clone());
    let next = c - &q;
    let exact_below_target = next.is_exact() && next.support().all(|e| e < target);
    Ok(if exact_below_target {
        next
    } else {
        next.with_precision_cap(target)
    })
}

/// One refinement `c − f(c)/f'(c)`, with quotients budgeted to `target`.
pub fn newton_step(
    f: &ValPolynomial,
    c: &TruncatedSeries,
    target: &Exponent,
) -> Result<TruncatedSeries> {
    check_poly(f, c)?;
    let df = f.derivative();
    let (fc, dfc) = hypotheses(f, &df, c, target)?;
    step(c, &fc, &dfc, target)
}

/// Iterates [`newton_step`] from `c0` until `v f(c) ≥ target`, asserting
/// that `v f(c_k)` at least doubles at every step.
pub fn hensel_root(
    f: &ValPolynomial,
    c0: &TruncatedSeries,
    target: &Exponent,
) -> Result<HenselRoot> {
    check_poly(f, c0)?;
    let df = f.derivative();
    let mut c = c0.clone();
    let mut trace: Vec<Valuation> = Vec::new();
    let mut approximants = Vec::new();
    loop {
        let fc = f.evaluate_truncated(&c, target);
        let v = fc.valuation();
        if let Some(prev) = trace.last() {
            let doubled = prev.lower_bound().scale(2).min(target.clone());
            if !v.is_at_least(&doubled) {
                return Err(Error::Invariant(format!(
                    "value of f(c) grew from {prev} only to {v}"
                )));
            }
        }
        trace.push(v.clone());
        approximants.push(c.clone());
        if v.is_at_least(target) {
            return Ok(HenselRoot {
                root: c,
                trace,
                approximants,
                target: target.clone(),
                certificate: v,
            });
        }
        let dfc = df.evaluate_truncated(&c, target);
        check_hypotheses(&fc, &dfc)?;
        if trace.len() == 1 {
            let mu = v.lower_bound();
            if !mu.multiple_reaches(target) {
                return Err(Error::PrecisionUnreachable {
                    step: mu.clone(),
                    target: target.clone(),
                });
            }
        }
        if trace.len() > MAX_ITERATIONS {
            return Err(Error::NonTermination {
                iterations: trace.len(),
            });
        }
        c = step(&c, &fc, &dfc, target)?;
    }
}

/// Roots of the residue polynomial `f v` in the residue field `k` that are
/// simple, i.e. the admissible starting points for [`hensel_root`].
pub fn simple_residue_roots(f: &ValPolynomial) -> Result<Vec<Coeff>> {
    let fbar = residue_polynomial(f, &ConvexSubgroup::trivial(f.rank()))?;
    Ok(roots_in_residue_field(&fbar)?
        .into_iter()
        .filter(|(_, simple)| *simple)
        .map(|(c, _)| c)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorLift {
    #[serde(skip)]
    pub g: ValPolynomial,
    #[serde(skip)]
    pub h: ValPolynomial,
    pub target: Exponent,
    pub level: ConvexSubgroup,
    /// Smallest value among the coefficients of `f − g h` after each round.
    pub trace: Vec<Exponent>,
    /// Smallest coefficient value of `f − g h`; at least `target`.
    pub certificate: Exponent,
}

/// Lifts a factorization `f v_Δ = g0 · h0` over the residue field of the
/// coarsening by `level` to `f ≡ g h` modulo values `≥ target`.
///
/// Quadratic lifting: with `e = f − g h` and `s g + t h ≡ 1`,
/// `g += (t e) rem g`, `h += (s e) rem h`, then the cofactors are refreshed
/// with `b = s g + t h − 1`. Remainders keep `g`, `h` monic of fixed degree.
pub fn lift_factorization(
    f: &ValPolynomial,
    g0: &ValPolynomial,
    h0: &ValPolynomial,
    target: &Exponent,
    level: &ConvexSubgroup,
) -> Result<FactorLift> {
    if f.rank() != level.rank() {
        return Err(Error::RankMismatch {
            left: f.rank(),
            right: level.rank(),
        });
    }
    for p in [g0, h0] {
        if p.rank() != level.index() {
            return Err(Error::RankMismatch {
                left: p.rank(),
                right: level.index(),
            });
        }
        if !p.is_monic() || p.degree() == Some(0) {
            return Err(Error::Precondition(
                "residue factors must be monic and non-constant".into(),
            ));
        }
    }
    f.check_monic()?;
    f.check_integral()?;
    let fres = residue_polynomial(f, level)?;
    if !(&fres - &(g0 * h0)).vanishes_to_precision() {
        return Err(Error::ResidueMismatch);
    }

    // coprimality is decided in the residue field k of v itself
    let to_k = ConvexSubgroup::trivial(level.index());
    let gk = residue_polynomial(g0, &to_k)?;
    let hk = residue_polynomial(h0, &to_k)?;
    let (gcd, sk, tk) = ValPolynomial::ext_gcd(&gk, &hk)?;
    if gcd.degree() != Some(0) {
        return Err(Error::NotCoprime);
    }
    let embed_k = ConvexSubgroup::trivial(f.rank());

    let mut g = embed_polynomial(g0, level)?;
    let mut h = embed_polynomial(h0, level)?;
    let mut cofactors: Option<(ValPolynomial, ValPolynomial)> = None;
    let one = ValPolynomial::constant(TruncatedSeries::one(f.rank(), f.field()));
    let mut trace = Vec::new();
    loop {
        let e = (f - &g.mul_truncated(&h, target)).with_precision_cap(target);
        let floor = e.coefficient_floor();
        if e.vanishes_to_precision() {
            trace.push(floor.clone());
            return Ok(FactorLift {
                g,
                h,
                target: target.clone(),
                level: *level,
                trace,
                certificate: floor,
            });
        }
        if !floor.is_positive() {
            return Err(Error::Invariant(format!(
                "lifting error {floor} is not in the maximal ideal"
            )));
        }
        let stalled = trace.last().is_some_and(|prev| &floor <= prev);
        if stalled || !floor.multiple_reaches(target) {
            return Err(Error::PrecisionUnreachable {
                step: floor,
                target: target.clone(),
            });
        }
        trace.push(floor);
        if trace.len() > MAX_ITERATIONS {
            return Err(Error::NonTermination {
                iterations: trace.len(),
            });
        }
        let (s, t) = match cofactors.take() {
            Some(st) => st,
            None => (
                embed_polynomial(&sk, &embed_k)?,
                embed_polynomial(&tk, &embed_k)?,
            ),
        };
        let dg = t.mul_truncated(&e, target).rem(&g)?;
        let dh = s.mul_truncated(&e, target).rem(&h)?;
        g = (&g + &dg).with_precision_cap_monic(target);
        h = (&h + &dh).with_precision_cap_monic(target);
        let b = &(&s.mul_truncated(&g, target) + &t.mul_truncated(&h, target)) - &one;
        let b = b.with_precision_cap(target);
        let s2 = (&s - &s.mul_truncated(&b, target).rem(&h)?).with_precision_cap(target);
        let t2 = (&t - &t.mul_truncated(&b, target).rem(&g)?).with_precision_cap(target);
        cofactors = Some((s2, t2));
    }
}

/// Convenience: the residue root `r ∈ k` as a constant series of rank `n`.
pub fn lift_constant(rank: usize, r: &Coeff) -> Result<TruncatedSeries> {
    embed_series(
        &TruncatedSeries::constant(0, r.clone()),
        &ConvexSubgroup::trivial(rank),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffField;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    const Q: CoeffField = CoeffField::Rational;

    fn e2(b: i64) -> Exponent {
        Exponent::new([0, b])
    }

    fn t_pow(field: CoeffField, k: i64) -> TruncatedSeries {
        TruncatedSeries::unit_monomial(2, field, e2(k))
    }

    fn running(field: CoeffField) -> ValPolynomial {
        let n = |k| TruncatedSeries::from_i64(2, field, k);
        ValPolynomial::new(2, field, vec![-t_pow(field, 1), n(-1), n(1)]).unwrap()
    }

    fn series(field: CoeffField, coeffs: &[i64], prec: Exponent) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            2,
            field,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (e2(i as i64), field.from_i64(*c))),
            prec,
        )
    }

    /// Coefficients of (1 + √(1+4t))/2 from the binomial series of √(1+x).
    fn binomial_oracle(n: usize) -> Vec<BigRational> {
        let half = BigRational::new(1.into(), 2.into());
        let mut binom = BigRational::from_integer(1.into());
        let mut out = Vec::new();
        for k in 0..n {
            if k > 0 {
                binom = binom * (&half - BigRational::from_integer(BigInt::from(k as i64 - 1)))
                    / BigRational::from_integer(BigInt::from(k as i64));
            }
            let four_k = BigRational::from_integer(BigInt::from(4).pow(k as u32));
            let mut c = &binom * four_k / BigRational::from_integer(2.into());
            if k == 0 {
                c += &half;
            }
            out.push(c);
        }
        out
    }

    #[test]
    fn newton_step_examples() {
        let f = running(Q);
        let one = TruncatedSeries::one(2, Q);
        let c1 = newton_step(&f, &one, &e2(16)).unwrap();
        assert_eq!(c1, series(Q, &[1, 1], Exponent::Infinity));
        assert!(f.evaluate(&c1).valuation().is_at_least(&e2(2)));

        let c2 = newton_step(&f, &c1, &e2(6)).unwrap();
        assert_eq!(c2, series(Q, &[1, 1, -1, 2, -4, 8], e2(6)));
        assert!(f.evaluate(&c2).valuation().is_at_least(&e2(4)));
    }

    #[test]
    fn newton_step_rejects_double_root() {
        let n = |k| TruncatedSeries::from_i64(2, Q, k);
        let f = ValPolynomial::new(2, Q, vec![-t_pow(Q, 1), n(0), n(1)]).unwrap();
        assert!(matches!(
            newton_step(&f, &n(0), &e2(4)),
            Err(Error::NotSimpleRoot { .. })
        ));
        let g = running(Q);
        assert!(matches!(
            newton_step(&g, &n(3), &e2(4)),
            Err(Error::NotApproximateRoot { .. })
        ));
    }

    #[test]
    fn hensel_root_matches_binomial_oracle() {
        let f = running(Q);
        let r = hensel_root(&f, &TruncatedSeries::one(2, Q), &e2(5)).unwrap();
        assert_eq!(r.root, series(Q, &[1, 1, -1, 2, -5], e2(5)));
        let oracle = binomial_oracle(5);
        for (k, c) in oracle.iter().enumerate() {
            assert_eq!(r.root.coeff(&e2(k as i64)), Coeff::Rational(c.clone()));
        }
    }

    #[test]
    fn hensel_root_over_f5() {
        let f5 = CoeffField::Prime(5);
        let r = hensel_root(&running(f5), &TruncatedSeries::one(2, f5), &e2(5)).unwrap();
        assert_eq!(r.root, series(f5, &[1, 1, 4, 2, 0], e2(5)));
    }

    #[test]
    fn linear_polynomial_is_solved_exactly() {
        let one = TruncatedSeries::one(2, Q);
        let f = ValPolynomial::new(2, Q, vec![-t_pow(Q, 1), one]).unwrap();
        let r = hensel_root(&f, &TruncatedSeries::zero(2, Q), &e2(8)).unwrap();
        assert_eq!(r.root, t_pow(Q, 1));
        assert_eq!(r.iterations(), 1);
        assert_eq!(r.certificate, Valuation::Known(Exponent::Infinity));
    }

    #[test]
    fn trace_doubles_and_gaps_match() {
        let f = running(Q);
        let r = hensel_root(&f, &TruncatedSeries::one(2, Q), &e2(32)).unwrap();
        let known: Vec<Exponent> = r.trace.iter().filter_map(|v| v.known().cloned()).collect();
        assert_eq!(known, vec![e2(1), e2(2), e2(4), e2(8), e2(16)]);
        // v(c_{k+1} − c_k) = v f(c_k)
        for (k, w) in r.approximants.windows(2).enumerate() {
            let gap = (&w[1] - &w[0]).valuation();
            assert!(gap.is_at_least(r.trace[k].lower_bound()));
            if let Valuation::Known(g) = gap {
                assert_eq!(Some(&g), r.trace[k].known());
            }
        }
    }

    #[test]
    fn unreachable_target_is_reported() {
        let f = running(Q);
        let err = hensel_root(&f, &TruncatedSeries::one(2, Q), &Exponent::new([1, 0])).unwrap_err();
        assert!(matches!(err, Error::PrecisionUnreachable { .. }));
    }

    #[test]
    fn lift_running_factorization() {
        let f = running(Q);
        let k = |v: i64| Q.from_i64(v);
        let g0 = ValPolynomial::from_constants(0, &[k(-1), k(1)]);
        let h0 = ValPolynomial::from_constants(0, &[k(0), k(1)]);
        let lift = lift_factorization(&f, &g0, &h0, &e2(4), &ConvexSubgroup::trivial(2)).unwrap();
        let a = series(Q, &[1, 1, -1, 2], e2(4));
        assert_eq!(lift.g.coeff(0), -&a);
        assert_eq!(lift.h.coeff(0), series(Q, &[0, 1, -1, 2], e2(4)));
        assert!(lift.certificate >= e2(4));
        assert_eq!((lift.g.degree(), lift.h.degree()), (Some(1), Some(1)));
    }

    #[test]
    fn lift_rejects_non_coprime_and_mismatch() {
        let n = |v| TruncatedSeries::from_i64(2, Q, v);
        let f = ValPolynomial::new(2, Q, vec![-t_pow(Q, 1), n(0), n(1)]).unwrap();
        let k = |v: i64| Q.from_i64(v);
        let x = ValPolynomial::from_constants(0, &[k(0), k(1)]);
        let lvl = ConvexSubgroup::trivial(2);
        assert!(matches!(
            lift_factorization(&f, &x, &x, &e2(4), &lvl),
            Err(Error::NotCoprime)
        ));
        let xm1 = ValPolynomial::from_constants(0, &[k(-1), k(1)]);
        assert!(matches!(
            lift_factorization(&f, &x, &xm1, &e2(4), &lvl),
            Err(Error::ResidueMismatch)
        ));
    }

    #[test]
    fn lift_exact_split() {
        let n = |v| TruncatedSeries::from_i64(2, Q, v);
        let f = ValPolynomial::new(2, Q, vec![n(2), n(-3), n(1)]).unwrap();
        let k = |v: i64| Q.from_i64(v);
        let g0 = ValPolynomial::from_constants(0, &[k(-1), k(1)]);
        let h0 = ValPolynomial::from_constants(0, &[k(-2), k(1)]);
        let lift = lift_factorization(&f, &g0, &h0, &e2(4), &ConvexSubgroup::trivial(2)).unwrap();
        assert!(lift.g.is_exact() && lift.h.is_exact());
        assert_eq!(&lift.g * &lift.h, f);
    }

    #[test]
    fn residue_roots_of_running_example() {
        let roots = simple_residue_roots(&running(Q)).unwrap();
        assert_eq!(roots.len(), 2);
    }
}
