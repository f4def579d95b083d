//! z = a + s is closer to the Hensel root a than any element of K, so its
//! minimal polynomial X^2 - (2s+1)X + (s^2+s-t) splits over the
//! henselization.
//!
//! ```bash
//! cargo run --example degree_drop
//! ```

use henselium::disjointness::certify_degree_drop;
use henselium::expr::{format_polynomial, parse_polynomial, parse_series};
use henselium::hensel::hensel_root;
use henselium::{CoeffField, Exponent, TruncatedSeries};

fn main() -> henselium::Result<()> {
    let q = CoeffField::Rational;
    let names = vec!["s".to_string(), "t".to_string()];
    let precision = Exponent::new([0, 32]);
    let p = parse_polynomial("X^2 - X - t", &names, q)?;
    let a = hensel_root(&p, &TruncatedSeries::one(2, q), &precision)?.root;
    let f = parse_polynomial("X^2 - (2*s + 1)*X + (s^2 + s - t)", &names, q)?;
    let shift = parse_series("s", &names, q)?;
    let report = certify_degree_drop(&f, &a, &shift, &precision, &precision)?;
    println!(
        "{:?}: degree {} -> factors {:?}, v(z - a) = {} > max sampled gap {:?}",
        report.verdict,
        report.input_degree,
        report.factor_degrees,
        report.hypothesis.shift_value,
        report.hypothesis.max_sampled_gap.as_ref().map(|e| e.to_string())
    );
    for g in &report.factors {
        println!("  {}", format_polynomial(g, &names, "X"));
    }
    Ok(())
}
