//! Newton-Hensel lifting of the simple residue root 1 of X^2 - X - t, over
//! the rationals and over F_5.
//!
//! ```bash
//! cargo run --example newton_lift
//! ```

use henselium::expr::{format_series, parse_polynomial};
use henselium::hensel::hensel_root;
use henselium::{CoeffField, Exponent, TruncatedSeries};

fn main() -> henselium::Result<()> {
    let names = vec!["t".to_string()];
    for field in [CoeffField::Rational, CoeffField::prime(5)?] {
        let f = parse_polynomial("X^2 - X - t", &names, field)?;
        let lift = hensel_root(&f, &TruncatedSeries::one(1, field), &Exponent::new([16]))?;
        let trace: Vec<String> = lift.trace.iter().map(|v| v.to_string()).collect();
        println!("field {field}: v f(c_k) = {}", trace.join(", "));
        println!("  root = {}", format_series(&lift.root, &names));
    }
    Ok(())
}
