//! Affine maps z -> b z + c shift the approximation set by v b.
//!
//! ```bash
//! cargo run --example aat_shift
//! ```

use henselium::diagnostics::aat_check;
use henselium::expr::{parse_polynomial, parse_series};
use henselium::hensel::hensel_root;
use henselium::{CoeffField, Exponent, TruncatedSeries};

fn main() -> henselium::Result<()> {
    let q = CoeffField::Rational;
    let names = vec!["s".to_string(), "t".to_string()];
    let horizon = Exponent::new([0, 30]);
    let f = parse_polynomial("X^2 - X - t", &names, q)?;
    let a = hensel_root(&f, &TruncatedSeries::one(2, q), &horizon)?.root;
    for (b, c) in [("s", "0"), ("t^-1", "3"), ("3", "s")] {
        let r = aat_check(
            &a,
            &parse_series(b, &names, q)?,
            &parse_series(c, &names, q)?,
            &horizon,
        )?;
        println!(
            "b = {b:<5} c = {c}: v b = {}, {} gaps, {:?}",
            r.value_b,
            r.observed.len(),
            r.verdict
        );
    }
    Ok(())
}
