//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test --test acceptance`. Seeded parts honour `HENSELIUM_SEED`.

use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use henselium::coarsening::compose_check;
use henselium::diagnostics::{aat_check, classify, sample_value_set, CheckVerdict, Verdict};
use henselium::disjointness::{certify_degree_drop, DropVerdict};
use henselium::expr::{parse_polynomial, parse_series};
use henselium::hensel::{hensel_root, lift_factorization, simple_residue_roots};
use henselium::scenario::{parse_scenario, run_scenario};
use henselium::sweep::{compose_sweep, law_sweep, rng, seed_from_env, SeriesShape};
use henselium::{Coeff, CoeffField, ConvexSubgroup, Exponent, TruncatedSeries, ValPolynomial};

const NEWTON_TIME_LIMIT: Duration = Duration::from_secs(1);
const LAW_TIME_LIMIT: Duration = Duration::from_secs(10);
const NEWTON_TARGET: i64 = 64;
const CLASSIFY_HORIZON: i64 = 50;
const LIFT_PRECISION: i64 = 32;
const COMPOSE_CASES: usize = 1000;
const LAW_CASES: usize = 10_000;
const CUBICS: usize = 20;
const CUBIC_MAX_PRECISION: i64 = 128;
const TOWER_HORIZON: [i64; 2] = [0, 40];

type Outcome = Result<String, String>;

fn st() -> Vec<String> {
    vec!["s".into(), "t".into()]
}

fn e2(a: i64, b: i64) -> Exponent {
    Exponent::new([a, b])
}

fn running_root(field: CoeffField, target: &Exponent) -> TruncatedSeries {
    let f = parse_polynomial("X^2 - X - t", &st(), field).unwrap();
    hensel_root(&f, &TruncatedSeries::one(2, field), target).unwrap().root
}

/// Coefficients of (1 + sqrt(1 + 4t)) / 2 from the binomial series.
fn binomial_oracle(n: usize) -> Vec<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    let four = BigRational::from_integer(4.into());
    let mut out = vec![BigRational::one()];
    let mut binom = BigRational::one();
    let mut power = BigRational::one();
    for m in 1..n {
        binom = binom * (&half - BigRational::from_integer((m as i64 - 1).into()))
            / BigRational::from_integer((m as i64).into());
        power *= &four;
        out.push(&binom * &power * &half);
    }
    out
}

/// Coefficients of the root of a^2 - a = t with a_0 = 1, from the
/// convolution recurrence.
fn recurrence_oracle(n: usize) -> Vec<BigInt> {
    let mut a: Vec<BigInt> = vec![1.into(), 1.into()];
    for m in 2..n {
        let s: BigInt = (1..m).map(|i| &a[i] * &a[m - i]).sum();
        a.push(-s);
    }
    a.truncate(n);
    a
}

fn criterion_1() -> Outcome {
    let target = e2(0, NEWTON_TARGET);
    let started = Instant::now();
    let mut roots = Vec::new();
    for field in [CoeffField::Rational, CoeffField::Prime(5)] {
        let f = parse_polynomial("X^2 - X - t", &st(), field).unwrap();
        let lift = hensel_root(&f, &TruncatedSeries::one(2, field), &target)
            .map_err(|e| format!("{field}: {e}"))?;
        let values: Vec<i64> = lift
            .trace
            .iter()
            .map(|v| v.lower_bound().coords().unwrap()[1])
            .collect();
        let expected: Vec<i64> = vec![1, 2, 4, 8, 16, 32, 64];
        if values != expected {
            return Err(format!("{field}: trace {values:?}"));
        }
        if values.windows(2).any(|w| w[1] < 2 * w[0]) {
            return Err(format!("{field}: trace does not double"));
        }
        roots.push(lift.root);
    }
    let elapsed = started.elapsed();
    let oracle = binomial_oracle(NEWTON_TARGET as usize);
    for (m, want) in oracle.iter().enumerate() {
        let got = roots[0].coeff(&e2(0, m as i64));
        if got != Coeff::Rational(want.clone()) {
            return Err(format!("Q coefficient of t^{m}: {got} != {want}"));
        }
        let p = BigInt::from(5);
        let reduced = ((want.numer() % &p) + &p) % &p;
        let got5 = roots[1].coeff(&e2(0, m as i64));
        if got5 != CoeffField::Prime(5).from_i64(i64::try_from(reduced).unwrap()) {
            return Err(format!("F_5 coefficient of t^{m}: {got5}"));
        }
    }
    if elapsed >= NEWTON_TIME_LIMIT {
        return Err(format!("took {elapsed:?}, limit {NEWTON_TIME_LIMIT:?}"));
    }
    Ok(format!(
        "trace (0,1),(0,2),...,(0,64) over Q and F_5; t^0..t^63 match the binomial series; {elapsed:?}"
    ))
}

fn criterion_2() -> Outcome {
    let horizon = e2(0, CLASSIFY_HORIZON);
    let a = running_root(CoeffField::Rational, &horizon);
    let r = classify(&a, &horizon).map_err(|e| e.to_string())?;
    if r.verdict != Verdict::DistinguishedUpToHorizon {
        return Err(format!("verdict {}", r.verdict.as_str()));
    }
    if r.candidate_delta != Some(ConvexSubgroup::new(2, 1).unwrap()) || r.candidate_alpha != Some(e2(0, 0)) {
        return Err(format!("coset {:?} + {:?}", r.candidate_alpha, r.candidate_delta));
    }
    let oracle = recurrence_oracle(CLASSIFY_HORIZON as usize);
    let expected: Vec<Exponent> = (1..CLASSIFY_HORIZON)
        .filter(|&m| !oracle[m as usize].is_zero())
        .map(|m| e2(0, m))
        .collect();
    if r.gaps() != expected {
        return Err(format!("gap set differs: {} sampled vs {} expected", r.gaps().len(), expected.len()));
    }
    Ok(format!(
        "DISTINGUISHED_UP_TO_HORIZON, Delta_1, alpha (0,0); {} gaps equal the recurrence support",
        expected.len()
    ))
}

fn criterion_3() -> Outcome {
    let horizon = e2(0, CLASSIFY_HORIZON);
    let a = running_root(CoeffField::Rational, &horizon);
    let gaps_a: Vec<Exponent> = sample_value_set(&a, &horizon)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| r.gap)
        .collect();
    let mut checked = 0;
    for b in ["s", "t^-1", "3"] {
        for c in ["0", "3", "s"] {
            let bs = parse_series(b, &st(), CoeffField::Rational).unwrap();
            let cs = parse_series(c, &st(), CoeffField::Rational).unwrap();
            let rep = aat_check(&a, &bs, &cs, &horizon).map_err(|e| format!("b={b} c={c}: {e}"))?;
            let vb = bs.valuation().known().cloned().unwrap();
            // independent: shift the sampled gaps of a by v b
            let shifted: Vec<Exponent> = gaps_a.iter().map(|g| &vb + g).collect();
            if rep.verdict != CheckVerdict::Pass || rep.observed != shifted || rep.expected != shifted {
                return Err(format!("b={b} c={c}: observed {} gaps", rep.observed.len()));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} (b, c) pairs: gaps of b a + c above v b + v a equal v b + gaps of a exactly"
    ))
}

fn criterion_4() -> Outcome {
    let seed = seed_from_env();
    let report = compose_sweep(seed, COMPOSE_CASES, &SeriesShape::default());
    // spot-check the sweep's own generator against a direct call
    let x = parse_series("s^2*t^-1 + 3*s^3*t", &st(), CoeffField::Rational).unwrap();
    for d in ConvexSubgroup::chain(2) {
        if !compose_check(&x, &d).map_err(|e| e.to_string())?.pass {
            return Err(format!("direct compose_check failed at {d}"));
        }
    }
    if report.passed() {
        Ok(format!("{COMPOSE_CASES} random series x 3 subgroups, 0 failures (seed {seed})"))
    } else {
        Err(format!(
            "{} failures (seed {seed}); first: {}",
            report.failures.len(),
            report.failures[0]
        ))
    }
}

/// Plain product, independent of the lifting code's truncated products.
fn product(g: &ValPolynomial, h: &ValPolynomial) -> ValPolynomial {
    g * h
}

fn criterion_5() -> Outcome {
    let q = CoeffField::Rational;
    let f = parse_polynomial("X^2 - X - t", &st(), q).unwrap();
    let g0 = parse_polynomial("X", &[], q).unwrap();
    let h0 = parse_polynomial("X - 1", &[], q).unwrap();
    let target = e2(0, LIFT_PRECISION);
    let lift = lift_factorization(&f, &g0, &h0, &target, &ConvexSubgroup::trivial(2))
        .map_err(|e| e.to_string())?;
    let degrees = (lift.g.degree(), lift.h.degree());
    if degrees != (Some(1), Some(1)) {
        return Err(format!("degrees {degrees:?}"));
    }
    let diff = &f - &product(&lift.g, &lift.h);
    if let Some(c) = diff.coeffs().iter().find(|c| !c.valuation().is_at_least(&target)) {
        return Err(format!("coefficient of f - g h has value {}", c.valuation()));
    }
    Ok("degrees (1,1); every coefficient of f - g h has value >= (0,32)".into())
}

fn criterion_6() -> Outcome {
    let q = CoeffField::Rational;
    let precision = e2(0, LIFT_PRECISION);
    let a = running_root(q, &precision);
    let f = parse_polynomial("X^2 - (2*s + 1)*X + (s^2 + s - t)", &st(), q).unwrap();
    let s = parse_series("s", &st(), q).unwrap();
    let rep = certify_degree_drop(&f, &a, &s, &precision, &precision).map_err(|e| e.to_string())?;
    if rep.verdict != DropVerdict::DegreeDrop || rep.factor_degrees != vec![1, 1] {
        return Err(format!("{:?} {:?}", rep.verdict, rep.factor_degrees));
    }
    if rep.certificate.as_ref().is_none_or(|c| c < &precision) {
        return Err(format!("certificate {:?}", rep.certificate));
    }
    let gaps = sample_value_set(&a, &precision).map_err(|e| e.to_string())?;
    let shift = e2(1, 0);
    if rep.hypothesis.shift_value != shift || gaps.iter().any(|r| r.gap >= shift) {
        return Err("hypothesis v(z - a) > sampled gaps not confirmed".into());
    }
    // the certificate, recomputed on f_d = f (alpha = 0) with a plain product
    let diff = &f - &product(&rep.factors[0], &rep.factors[1]);
    if diff.coeffs().iter().any(|c| !c.valuation().is_at_least(&precision)) {
        return Err("independent product check failed".into());
    }
    Ok(format!(
        "DEGREE_DROP, factors (1,1), certificate (0,32); v(z - a) = (1,0) > {} sampled gaps",
        gaps.len()
    ))
}

/// Random monic integral cubic over F_p[t] whose residue has a simple root.
fn random_cubic(r: &mut impl Rng, p: u64) -> (ValPolynomial, Coeff) {
    let field = CoeffField::Prime(p);
    loop {
        let mut coeffs: Vec<TruncatedSeries> = (0..3)
            .map(|_| {
                let terms = (0..4).map(|k| (Exponent::new([k]), field.from_i64(r.gen_range(0..p as i64))));
                TruncatedSeries::from_terms(1, field, terms, Exponent::Infinity)
            })
            .collect();
        coeffs.push(TruncatedSeries::one(1, field));
        let f = ValPolynomial::new(1, field, coeffs).unwrap();
        if let Some(root) = simple_residue_roots(&f).unwrap().into_iter().next() {
            return (f, root);
        }
    }
}

fn criterion_7() -> Outcome {
    let seed = seed_from_env();
    let mut r = rng(seed ^ 0xc0b1c);
    let primes = [5u64, 7, 11, 13, 101];
    let targets: Vec<i64> = (0..=7).map(|k| 1i64 << k).collect();
    let mut lifts = 0;
    for i in 0..CUBICS {
        let p = *primes.choose(&mut r).unwrap();
        let (f, root) = random_cubic(&mut r, p);
        let c0 = TruncatedSeries::constant(1, root);
        for &k in &targets {
            let target = Exponent::new([k]);
            let lift = hensel_root(&f, &c0, &target).map_err(|e| format!("cubic {i} over F_{p} to t^{k}: {e}"))?;
            // independent check: f(root) vanishes below the target
            if !f.evaluate(&lift.root).valuation().is_at_least(&target) {
                return Err(format!("cubic {i} over F_{p}: f(root) not small at t^{k}"));
            }
            lifts += 1;
        }
    }
    Ok(format!(
        "{CUBICS} random cubics over F_p, {lifts} lifts to t^1..t^{CUBIC_MAX_PRECISION} (seed {seed})"
    ))
}

fn criterion_8() -> Outcome {
    let seed = seed_from_env();
    let started = Instant::now();
    let report = law_sweep(seed, LAW_CASES, &SeriesShape::default());
    let elapsed = started.elapsed();
    if !report.passed() {
        return Err(format!(
            "{} failures (seed {seed}); first: {}",
            report.failures.len(),
            report.failures[0]
        ));
    }
    if elapsed >= LAW_TIME_LIMIT {
        return Err(format!("took {elapsed:?}, limit {LAW_TIME_LIMIT:?}"));
    }
    Ok(format!("{LAW_CASES} triples, 0 failures, {elapsed:?} (seed {seed})"))
}

fn criterion_9() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let horizon = Exponent::new(TOWER_HORIZON).to_string();
    let mut summary = Vec::new();
    for name in ["tower", "transfer"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.scn"))).map_err(|e| e.to_string())?;
        let run = run_scenario(&parse_scenario(&text).map_err(|e| e.to_string())?, &[]);
        if let Some(e) = run.error {
            return Err(format!("{name}: {e}"));
        }
        if run.mismatches > 0 {
            return Err(format!("{name}: {} expectation mismatches", run.mismatches));
        }
        let at_horizon: Vec<&str> = run
            .reports
            .iter()
            .filter(|r| r["horizon"] == horizon.as_str())
            .filter_map(|r| r["verdict"].as_str())
            .collect();
        if at_horizon.is_empty() {
            return Err(format!("{name}: no report at horizon {horizon}"));
        }
        if let Some(v) = at_horizon
            .iter()
            .find(|v| !matches!(**v, "IMPLICATION_HOLDS" | "VACUOUS"))
        {
            return Err(format!("{name}: verdict {v}"));
        }
        let all: Vec<&str> = run.reports.iter().filter_map(|r| r["verdict"].as_str()).collect();
        summary.push(format!("{name} {}", all.join("/")));
    }
    Ok(format!("implication holds at {horizon}: {}", summary.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("newton doubling and binomial oracle", criterion_1),
        ("distinguished root, recurrence gap set", criterion_2),
        ("affine shift of gap sets", criterion_3),
        ("coarsening round-trip sweep", criterion_4),
        ("factor lifting certificate", criterion_5),
        ("degree drop for z = a + s", criterion_6),
        ("rank-1 cubics lift to t^128", criterion_7),
        ("ring and valuation law sweep", criterion_8),
        ("tower and coarsening transfer", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
