//! Coarse values, residues and the composition check in the (s,t) session.
//!
//! ```bash
//! cargo run --example coarsening
//! ```

use henselium::coarsening::{coarse_value, compose_check, residue_series};
use henselium::expr::{format_series, parse_series};
use henselium::{CoeffField, ConvexSubgroup};

fn main() -> henselium::Result<()> {
    let names = vec!["s".to_string(), "t".to_string()];
    let x = parse_series("t^-1 + 1 + s*t + 2*s^2", &names, CoeffField::Rational)?;
    for delta in ConvexSubgroup::chain(2) {
        let report = compose_check(&x, &delta)?;
        print!(
            "{delta}: v_Delta x = {}, residue value {}",
            coarse_value(&x, &delta),
            report.residue_value
        );
        if let Ok(r) = residue_series(&x, &delta) {
            print!(", residue {}", format_series(&r, &names[2 - delta.index()..]));
        }
        println!(", recomposed {} ({})", report.reconstructed, report.pass);
    }
    Ok(())
}
