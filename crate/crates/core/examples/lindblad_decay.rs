//! Master-equation evolution: pure decay with the factor-2 dissipator, then
//! the damped oscillator from a coherent state against its classical path.
//!
//! cargo run --example lindblad_decay

use num_complex::Complex64 as C64;
use semiquant::faq::classical_flow;
use semiquant::lindblad::{evolve, DensityMatrix, EvolveOptions, LindbladModel};
use semiquant::models::{oscillator_faq, oscillator_lindblad, OscillatorParams};
use semiquant::observables::PhasePoint;
use semiquant::quantize::{annihilation, number, Basis, FockSpace, OperatorMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dim = 6;
    let basis = Basis::Fock(FockSpace::single(dim)?);
    let decay = LindbladModel::new(OperatorMatrix::zeros(basis.clone()), vec![annihilation(dim)?])?;
    let opts = EvolveOptions::new(1e-3).sample_every(500).observe("n", number(dim)?);
    let (_, traj) = evolve(&decay, &DensityMatrix::basis_state(basis, 1)?, 3.0, &opts)?;
    println!("H = 0, R = a, rho0 = |1><1|:");
    for (t, v) in traj.times.iter().zip(traj.series("n").unwrap()) {
        println!("  t = {t:.1}  <n> = {:.9}  exp(-2t) = {:.9}", v.re, (-2.0 * t).exp());
    }

    let p = OscillatorParams::new(1.0, 0.1, 0.0)?;
    let dim = 40;
    let alpha = C64::new(2.0, 0.0);
    let opts = EvolveOptions::new(1e-3).sample_every(5000).observe("a", annihilation(dim)?);
    let (rho, traj) = evolve(&oscillator_lindblad(&p, dim)?, &DensityMatrix::coherent(dim, alpha)?, 20.0, &opts)?;
    let classical = classical_flow(&oscillator_faq(&p)?, &PhasePoint::single(alpha), 20.0, 1e-3)?;
    println!("damped oscillator, coherent alpha = 2:");
    for (t, a) in traj.times.iter().zip(traj.series("a").unwrap()) {
        let z = classical.points[(t / 1e-3).round() as usize].coords()[0];
        println!("  t = {t:4.1}  <a> = {:+.8} {:+.8}i  |<a> - z| = {:.1e}", a.re, a.im, (a - z).norm());
    }
    let d = rho.diagnostics();
    println!("final state: trace error {:.1e}, min eigenvalue {:.1e}, purity {:.6}", d.trace_error, d.min_eigenvalue, rho.purity());
    Ok(())
}
