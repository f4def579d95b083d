//! Runs every bundled scenario and prints how many expectations failed.
//!
//! ```bash
//! cargo run --example scenario_runner
//! ```

use std::path::Path;

use henselium::scenario::{parse_scenario, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    paths.sort();
    for path in paths {
        let scenario = parse_scenario(&std::fs::read_to_string(&path)?)?;
        let run = run_scenario(&scenario, &[]);
        let name = path.file_stem().unwrap_or_default().to_string_lossy();
        match run.error {
            Some(e) => println!("{name:<22} error: {e}"),
            None => println!(
                "{name:<22} {} reports, {} mismatches",
                run.reports.len(),
                run.mismatches
            ),
        }
    }
    Ok(())
}
