//! Two coupled rotators: Adler locking of the phase difference and the
//! classical spin flow relaxing onto the synchronized state.
//!
//! cargo run --example rotator_synchronization

use semiquant::models::{classical_spin_flow, phase_model_flow, rotator_spin_functions, RotatorParams, LOCK_REL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 0.2;
    for ratio in [0.25, 0.5, 0.9, 1.1, 1.5, 3.0] {
        let delta = ratio * 2.0 * a;
        let traj = phase_model_flow(1.0 + delta, 1.0, a, [0.0, 1.0], 400.0, 1e-2)?;
        println!(
            "|delta|/2a = {ratio:4.2}: locked = {:5}  final d(phi2 - phi1)/dt = {:+.3e}",
            traj.is_locked(LOCK_REL_TOL),
            traj.final_difference_rate()
        );
    }

    let p = RotatorParams::new(1.0, 1.0, 0.2, 5.0)?;
    let (h, r) = rotator_spin_functions(&p);
    let l0 = [2.4, 3.0, 3.2];
    let flow = classical_spin_flow(&h, &r, l0, 50.0 / p.lambda, 1e-3)?;
    println!("spin flow, delta = 0, lambda = {}:", p.lambda);
    for k in (0..flow.times.len()).step_by(25_000) {
        let l = flow.points[k];
        let norm2: f64 = l.iter().map(|c| c * c).sum();
        println!("  t = {:6.1}  l = ({:+.6}, {:+.3e}, {:+.6})  |l|^2 = {norm2:.12}", flow.times[k], l[0], l[1], l[2]);
    }
    Ok(())
}
