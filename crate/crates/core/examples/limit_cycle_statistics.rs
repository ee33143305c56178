//! Stationary photon statistics of the quantum limit cycle: closed forms,
//! the population recurrence, and the full Liouvillian null vector.
//!
//! cargo run --example limit_cycle_statistics

use semiquant::lindblad::stationary;
use semiquant::models::{limit_cycle_lindblad, mandel_q, mean_n, recurrence_stationary, LimitCycleParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>14} {:>14}", "nu", "n_bar", "Q");
    for nu in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        println!("{nu:>6} {:>14.10} {:>+14.10}", mean_n(nu)?, mandel_q(nu)?);
    }

    let p = LimitCycleParams::new(1.0, 2.0, 1.0)?;
    let rec = recurrence_stationary(p.nu(), 40)?;
    let st = stationary(&limit_cycle_lindblad(&p, 20)?)?;
    println!("nu = {}: recurrence vs Liouvillian (dim 20), residual {:.1e}", p.nu(), st.residual);
    for (n, (a, b)) in rec.iter().zip(st.state.populations()).enumerate().take(8) {
        println!("  rho_{n} = {a:.12}  {b:.12}");
    }
    Ok(())
}
