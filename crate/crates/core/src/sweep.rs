//! Seeded randomized sweeps over the series-field laws and the coarsening
//! round-trip. The seed comes from `HENSELIUM_SEED` when set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coarsening::compose_check;
use crate::coeff::{Coeff, CoeffField};
use crate::series::{TruncatedSeries, Valuation};
use crate::value_group::{ConvexSubgroup, Exponent};

pub const SEED_VAR: &str = "HENSELIUM_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Prime used for the finite-field half of the sweeps.
pub const SWEEP_PRIME: u64 = 101;

pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct SeriesShape {
    pub rank: usize,
    pub max_terms: usize,
    pub exponent_range: (i64, i64),
    /// Probability of a finite precision.
    pub truncated: f64,
}

impl Default for SeriesShape {
    fn default() -> Self {
        SeriesShape {
            rank: 2,
            max_terms: 8,
            exponent_range: (-5, 5),
            truncated: 0.5,
        }
    }
}

pub fn random_coeff(rng: &mut impl Rng, field: CoeffField) -> Coeff {
    match field {
        CoeffField::Rational => loop {
            let n: i64 = rng.gen_range(-9..=9);
            let d: i64 = rng.gen_range(1..=5);
            if n != 0 {
                let q = num_rational::BigRational::new(n.into(), d.into());
                return field.from_rational(&q).expect("rational field");
            }
        },
        CoeffField::Prime(p) => field.from_i64(rng.gen_range(1..p as i64)),
    }
}

pub fn random_exponent(rng: &mut impl Rng, rank: usize, (lo, hi): (i64, i64)) -> Exponent {
    Exponent::new((0..rank).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

pub fn random_series(rng: &mut impl Rng, field: CoeffField, shape: &SeriesShape) -> TruncatedSeries {
    let n = rng.gen_range(0..=shape.max_terms);
    let precision = if rng.gen_bool(shape.truncated) {
        let (lo, hi) = shape.exponent_range;
        random_exponent(rng, shape.rank, (lo + 2, hi + 2))
    } else {
        Exponent::Infinity
    };
    let terms = (0..n).map(|_| {
        (
            random_exponent(rng, shape.rank, shape.exponent_range),
            random_coeff(rng, field),
        )
    });
    TruncatedSeries::from_terms(shape.rank, field, terms, precision)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn known(x: &TruncatedSeries) -> Option<Exponent> {
    x.valuation().known().cloned()
}

/// Checks one triple; returns the names of violated laws. Products and sums
/// are compared with `agrees_with`, i.e. below their common precision.
pub fn check_laws(x: &TruncatedSeries, y: &TruncatedSeries, z: &TruncatedSeries) -> Vec<&'static str> {
    let mut bad = Vec::new();
    if &(x + y) != &(y + x) {
        bad.push("additive commutativity");
    }
    if &(x * y) != &(y * x) {
        bad.push("multiplicative commutativity");
    }
    if !(&(x + y) + z).agrees_with(&(x + &(y + z))) {
        bad.push("additive associativity");
    }
    if !(&(x * y) * z).agrees_with(&(x * &(y * z))) {
        bad.push("multiplicative associativity");
    }
    if !(x * &(y + z)).agrees_with(&(&(x * y) + &(x * z))) {
        bad.push("distributivity");
    }
    if !(x - x).is_empty() {
        bad.push("additive inverse");
    }
    let xy = x * y;
    if let (Some(a), Some(b)) = (known(x), known(y)) {
        if xy.valuation() != Valuation::Known(&a + &b) {
            bad.push("v(xy) = vx + vy");
        }
    }
    let sum = x + y;
    let floor = x.valuation().lower_bound().clone().min(y.valuation().lower_bound().clone());
    if !sum.valuation().is_at_least(&floor) {
        bad.push("v(x+y) >= min(vx, vy)");
    }
    if let (Some(a), Some(b)) = (known(x), known(y)) {
        if a != b && sum.valuation() != Valuation::Known(a.clone().min(b)) {
            bad.push("v(x+y) = min(vx, vy) when vx != vy");
        }
    }
    bad
}

/// `cases` random triples, alternating between ℚ and `F_SWEEP_PRIME`.
pub fn law_sweep(seed: u64, cases: usize, shape: &SeriesShape) -> SweepReport {
    let mut r = rng(seed);
    let fields = [CoeffField::Rational, CoeffField::Prime(SWEEP_PRIME)];
    let mut report = SweepReport {
        seed,
        cases,
        failures: Vec::new(),
    };
    for i in 0..cases {
        let field = fields[i % 2];
        let x = random_series(&mut r, field, shape);
        let y = random_series(&mut r, field, shape);
        let z = random_series(&mut r, field, shape);
        for law in check_laws(&x, &y, &z) {
            report.failures.push(format!("case {i}: {law}: x = {x}, y = {y}, z = {z}"));
        }
    }
    report
}

/// `cases` random non-zero series, each checked against every `Δ_j`.
pub fn compose_sweep(seed: u64, cases: usize, shape: &SeriesShape) -> SweepReport {
    let mut r = rng(seed);
    let fields = [CoeffField::Rational, CoeffField::Prime(SWEEP_PRIME)];
    let mut report = SweepReport {
        seed,
        cases,
        failures: Vec::new(),
    };
    let exact = SeriesShape {
        truncated: 0.0,
        ..shape.clone()
    };
    for i in 0..cases {
        let field = fields[i % 2];
        let x = loop {
            let x = random_series(&mut r, field, &exact);
            if !x.is_zero() {
                break x;
            }
        };
        for delta in ConvexSubgroup::chain(shape.rank) {
            match compose_check(&x, &delta) {
                Ok(rep) if rep.pass => {}
                Ok(rep) => report.failures.push(format!(
                    "case {i}: {x} at {delta}: reconstructed {} != {}",
                    rep.reconstructed, rep.value
                )),
                Err(e) => report.failures.push(format!("case {i}: {x} at {delta}: {e}")),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        let shape = SeriesShape::default();
        let r = law_sweep(7, 200, &shape);
        assert!(r.passed(), "{:?}", r.failures.first());
        let r = compose_sweep(7, 200, &shape);
        assert!(r.passed(), "{:?}", r.failures.first());
    }

    #[test]
    fn seeds_are_reproducible() {
        let shape = SeriesShape::default();
        let a = random_series(&mut rng(3), CoeffField::Rational, &shape);
        let b = random_series(&mut rng(3), CoeffField::Rational, &shape);
        assert_eq!(a, b);
    }
}
