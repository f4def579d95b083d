//! Lifting the residue split X (X - 1) of X^2 - X - t to precision (0,32).
//!
//! ```bash
//! cargo run --example factor_lift
//! ```

use henselium::expr::{format_polynomial, parse_polynomial};
use henselium::hensel::lift_factorization;
use henselium::{CoeffField, ConvexSubgroup, Exponent};

fn main() -> henselium::Result<()> {
    let q = CoeffField::Rational;
    let names = vec!["s".to_string(), "t".to_string()];
    let f = parse_polynomial("X^2 - X - t", &names, q)?;
    let g0 = parse_polynomial("X", &[], q)?;
    let h0 = parse_polynomial("X - 1", &[], q)?;
    let target = Exponent::new([0, 32]);
    let lift = lift_factorization(&f, &g0, &h0, &target, &ConvexSubgroup::trivial(2))?;
    let trace: Vec<String> = lift.trace.iter().map(|e| e.to_string()).collect();
    println!("error values per round: {}", trace.join(", "));
    println!("g = {}", format_polynomial(&lift.g, &names, "X"));
    println!("h = {}", format_polynomial(&lift.h, &names, "X"));
    println!("certificate: every coefficient of f - g h has value >= {}", lift.certificate);
    Ok(())
}
