//! Transitivity through the tower K ⊆ K(x) ⊆ K(x, z) with x^2 - x = t and
//! z^2 - z = x t.
//!
//! ```bash
//! cargo run --example tower
//! ```

use henselium::diagnostics::tower_check;
use henselium::expr::{parse_bivariate, parse_polynomial};
use henselium::{CoeffField, Exponent, TruncatedSeries};

fn main() -> henselium::Result<()> {
    let q = CoeffField::Rational;
    let names = vec!["s".to_string(), "t".to_string()];
    let f1 = parse_polynomial("X^2 - X - t", &names, q)?;
    let f2 = parse_bivariate("Y^2 - Y - X*t", &names, q)?;
    let one = TruncatedSeries::one(2, q);
    let r = tower_check(&f1, &one, &f2, &one, &Exponent::new([0, 40]))?;
    println!("x over K:   {}", r.x_verdict.as_str());
    println!("z over K(x): {} ({} gaps)", r.over_l.verdict.as_str(), r.l_gaps.len());
    println!("z over K:   {}", r.over_k.verdict.as_str());
    println!("implication: {:?}", r.verdict);
    Ok(())
}
