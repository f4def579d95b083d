//! Sampling v(z - K) and classifying z at a horizon: the root of
//! X^2 - X - t is distinguished, s times it only weakly, and 1 + t lies in K.
//!
//! ```bash
//! cargo run --example classify
//! ```

use henselium::diagnostics::classify;
use henselium::expr::{parse_polynomial, parse_series};
use henselium::hensel::hensel_root;
use henselium::{CoeffField, Exponent, TruncatedSeries};

fn main() -> henselium::Result<()> {
    let q = CoeffField::Rational;
    let names = vec!["s".to_string(), "t".to_string()];
    let f = parse_polynomial("X^2 - X - t", &names, q)?;
    let a = hensel_root(&f, &TruncatedSeries::one(2, q), &Exponent::new([0, 50]))?.root;
    let s = parse_series("s", &names, q)?;
    let cases = [
        ("a", a.clone(), Exponent::new([0, 50])),
        ("s*a", &s * &a, Exponent::new([1, 50])),
        ("1 + t", parse_series("1 + t", &names, q)?, Exponent::new([0, 50])),
    ];
    for (label, z, horizon) in cases {
        let r = classify(&z, &horizon)?;
        println!(
            "{label:>6}: {} (alpha {:?}, Delta {:?}, {} in-coset gaps of {})",
            r.verdict.as_str(),
            r.candidate_alpha.map(|e| e.to_string()),
            r.candidate_delta.map(|d| d.index()),
            r.in_coset,
            r.samples.len()
        );
    }
    Ok(())
}
