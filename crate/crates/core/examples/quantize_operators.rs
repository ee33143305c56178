//! Weyl and normal ordering on a truncated Fock space, and the commutator /
//! Poisson-bracket correspondence away from the truncation edge.
//!
//! cargo run --example quantize_operators

use num_complex::Complex64 as C64;
use semiquant::observables::Polynomial;
use semiquant::quantize::{commutator, quantize, FockSpace, OperatorOrdering};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = FockSpace::single(20)?;
    let n: Polynomial = "z1*z1c".parse()?;
    for ordering in [OperatorOrdering::Weyl, OperatorOrdering::Normal] {
        let q = quantize(&n, &space, ordering)?;
        println!("{ordering:?}: <0|Q(|z|^2)|0> = {}, <3|Q(|z|^2)|3> = {}", q.get(0, 0).re, q.get(3, 3).re);
    }

    // Weyl ordering is exact on every pair; normal ordering misses the
    // pair (z^2, z*^2) by the constant 2, the identity shift between the two
    // orderings of |z|^2.
    let safe = space.safe_indices(3);
    let funcs = ["z1", "z1c", "z1^2", "z1c^2", "z1*z1c"];
    for ordering in [OperatorOrdering::Weyl, OperatorOrdering::Normal] {
        let mut worst = (0.0_f64, "", "");
        for a in funcs {
            for b in funcs {
                let (pa, pb): (Polynomial, Polynomial) = (a.parse()?, b.parse()?);
                let lhs = commutator(&quantize(&pa, &space, ordering)?, &quantize(&pb, &space, ordering)?)?;
                let rhs = quantize(&pa.poisson_bracket(&pb)?, &space, ordering)?.scale(C64::new(0.0, 1.0));
                let dev = lhs.max_abs_diff_on(&rhs, &safe)?;
                if dev > worst.0 {
                    worst = (dev, a, b);
                }
            }
        }
        println!(
            "{ordering:?}: max |[Q(A),Q(B)] - i Q({{A,B}})| on {} safe levels = {:.2e} (A = {}, B = {})",
            safe.len(),
            worst.0,
            worst.1,
            worst.2
        );
    }
    Ok(())
}
