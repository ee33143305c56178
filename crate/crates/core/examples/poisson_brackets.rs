//! Polynomial phase-space functions: parsing, printing, Poisson brackets.
//!
//! cargo run --example poisson_brackets

use num_complex::Complex64 as C64;
use semiquant::observables::{PhasePoint, Polynomial, Var};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z: Polynomial = "z1".parse()?;
    let zc: Polynomial = "z1c".parse()?;
    let h: Polynomial = "z1*z1c + 0.5*(z1^2*z1c^2)".parse()?;

    // {z, z*} = −i with the bracket normalized so that dz/dt = {z, H}.
    println!("{{z, z*}}     = {}", z.poisson_bracket(&zc)?);
    println!("{{z, H}}      = {}", z.poisson_bracket(&h)?);
    println!("dH/dz*       = {}", h.partial(0, Var::Zc)?);

    let p = PhasePoint::single(C64::new(0.6, -0.8));
    println!("H(0.6 - 0.8i) = {}", h.evaluate(&p)?);

    let printed = h.to_string();
    let back: Polynomial = printed.parse()?;
    println!("round trip   : {printed}  (exact: {})", back == h);
    Ok(())
}
