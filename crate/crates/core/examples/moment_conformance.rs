//! Checks the printed moment equations of the rotator spin model against the
//! exact Heisenberg-picture rates and prints the JSON report.
//!
//! cargo run --example moment_conformance -- [l] [samples]

use semiquant::models::{conformance_report, RotatorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let l: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);

    let p = RotatorParams::new(1.15, 0.85, 0.3, l)?;
    let report = conformance_report(&p, samples, 2024)?;
    for e in &report.entries {
        println!(
            "{:<22} {:<4} lambda-terms {:.3e}  delta-terms {:.3e}  (rate scale {:.3e})",
            e.rate_of,
            if e.conforms { "ok" } else { "DIFF" },
            e.lambda_terms_max_dev,
            e.delta_terms_max_dev,
            e.rate_scale
        );
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
