//! Cumulant-closure estimate of the stationary `<l_y^2>` against exact
//! stationary states of the spin model, written as CSV to stdout.
//!
//! cargo run --release --example closure_report -- [l_max]

use semiquant::lindblad::StationaryOptions;
use semiquant::models::{closure_stationary, closure_vs_exact_report, ly2_analytic, RotatorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l_max: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(6.0);

    for n in [2.0, 10.0, 100.0, 1e4] {
        let m = closure_stationary(n)?;
        eprintln!("N = {n:>7}: x = {:.10}  N/8 = {:.4}  <lx> = {:.6}", ly2_analytic(n)?, n / 8.0, m.lx);
    }
    let p = RotatorParams::new(1.0, 1.0, 0.2, l_max)?;
    let report = closure_vs_exact_report(&p, &StationaryOptions::default())?;
    report.to_table().write(std::io::stdout())?;
    Ok(())
}
