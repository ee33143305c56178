//! The damped oscillator in FAQ form: the drift assembled from `H` and `R`
//! against the equation of motion, then a characteristic carrying its
//! phase-space weight.
//!
//! cargo run --example faq_oscillator -- [lambda] [u]

use num_complex::Complex64 as C64;
use semiquant::faq::{ensemble_weights, sample_disc_points, verify_faq, DEFAULT_SAMPLE_RADIUS};
use semiquant::models::{oscillator_faq, oscillator_field, OscillatorParams};
use semiquant::observables::PhasePoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.1);
    let u: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.0);

    let p = OscillatorParams::new(1.0, lambda, u)?;
    let sys = oscillator_faq(&p)?;
    println!("H = {}", sys.hamiltonian());
    println!("R = {}", sys.channels()[0]);

    let pts = sample_disc_points(1, 100, DEFAULT_SAMPLE_RADIUS, 1);
    let report = verify_faq(&sys, |q| oscillator_field(&p, q), &pts, 1e-12)?;
    println!("drift vs field: max |error| {:.2e} over {} points, pass = {}", report.max_abs_error, report.samples, report.pass);

    let z0 = PhasePoint::single(C64::new(2.0, 0.0));
    println!("phase divergence at z0: {}", sys.phase_divergence(&z0)?);
    let path = ensemble_weights(&sys, &[z0], 10.0, 1e-3)?.remove(0);
    for k in (0..path.weights.len()).step_by(2000) {
        let z = path.trajectory.points[k].coords()[0];
        println!("t = {:5.2}  z = {:+.6} {:+.6}i  weight = {:.6}", path.trajectory.times[k], z.re, z.im, path.weights[k]);
    }
    Ok(())
}
