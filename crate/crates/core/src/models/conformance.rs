//! Printed moment equations of the rotator spin model checked against the
//! exact Heisenberg-picture rates.
//!
//! Each printed right-hand side is assembled from exact expectations in
//! random states and compared with `tr(ρ · L†(A))`. The λ- and δ-dependent
//! terms are compared separately (with `δ = 0`, then `λ = 0`) so that a
//! discrepancy can be attributed. Nothing here is corrected: the report
//! records what agrees and what does not.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::rotators::{rotator_spin_model_with_ops, RotatorParams};
use crate::error::{Error, Result};
use crate::lindblad::{adjoint_rate, expectation, DensityMatrix, LindbladModel};
use crate::quantize::{Basis, OperatorMatrix, SpinOperators};

/// Relative agreement required to call a printed equation conforming.
pub const CONFORMANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceEntry {
    /// The observable whose rate is printed, e.g. `d<lx>/dt`.
    pub rate_of: String,
    pub printed: String,
    /// Worst `|exact − printed|` with only the coupling switched on.
    pub lambda_terms_max_dev: f64,
    /// Worst `|exact − printed|` with only the detuning switched on.
    pub delta_terms_max_dev: f64,
    /// Worst deviation with both on.
    pub full_max_dev: f64,
    /// Largest exact rate seen, for scale.
    pub rate_scale: f64,
    pub conforms: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub l: f64,
    pub lambda: f64,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub entries: Vec<ConformanceEntry>,
}

impl ConformanceReport {
    pub fn entry(&self, rate_of: &str) -> Option<&ConformanceEntry> {
        self.entries.iter().find(|e| e.rate_of == rate_of)
    }
}

/// Operator products the printed equations need.
struct Products {
    ops: SpinOperators,
    lx2: OperatorMatrix,
    ly2: OperatorMatrix,
    lz2: OperatorMatrix,
    sxy: OperatorMatrix,
    ly3: OperatorMatrix,
    ly_sxy: OperatorMatrix,
    sxy_ly: OperatorMatrix,
    ly_lx2_sym: OperatorMatrix,
    lx_ly_lz: OperatorMatrix,
}

impl Products {
    fn new(ops: SpinOperators) -> Result<Self> {
        let (x, y, z) = (&ops.x, &ops.y, &ops.z);
        let lx2 = x.mul(x)?;
        let ly2 = y.mul(y)?;
        let lz2 = z.mul(z)?;
        let sxy = x.mul(y)?.add(&y.mul(x)?)?;
        Ok(Products {
            ly3: ly2.mul(y)?,
            ly_sxy: y.mul(&sxy)?,
            sxy_ly: sxy.mul(y)?,
            ly_lx2_sym: y.mul(&lx2)?.add(&lx2.mul(y)?)?,
            lx_ly_lz: x.mul(y)?.mul(z)?,
            lx2,
            ly2,
            lz2,
            sxy,
            ops,
        })
    }
}

type Printed = fn(&dyn Fn(&OperatorMatrix) -> C64, &Products, f64, f64) -> C64;

struct Equation {
    rate_of: &'static str,
    printed: &'static str,
    target: fn(&Products) -> &OperatorMatrix,
    rhs: Printed,
}

fn equations() -> Vec<Equation> {
    vec![
        Equation {
            rate_of: "d<lx>/dt",
            printed: "-2 lambda <lx> + 4 lambda <ly^2> + delta <ly>",
            target: |p| &p.ops.x,
            rhs: |e, p, lam, del| -2.0 * lam * e(&p.ops.x) + 4.0 * lam * e(&p.ly2) + del * e(&p.ops.y),
        },
        Equation {
            rate_of: "d<ly>/dt",
            printed: "-lambda <ly> - 2 lambda <lx ly + ly lx> - delta <lx>",
            target: |p| &p.ops.y,
            rhs: |e, p, lam, del| -lam * e(&p.ops.y) - 2.0 * lam * e(&p.sxy) - del * e(&p.ops.x),
        },
        Equation {
            rate_of: "d<lz>/dt",
            printed: "-lambda <lz>",
            target: |p| &p.ops.z,
            rhs: |e, p, lam, _del| -lam * e(&p.ops.z),
        },
        Equation {
            rate_of: "d<ly^2>/dt",
            printed: "2 lambda (<lx^2> - <lz^2>) - delta <ly lx + lx ly>",
            target: |p| &p.ly2,
            rhs: |e, p, lam, del| 2.0 * lam * (e(&p.lx2) - e(&p.lz2)) - del * e(&p.sxy),
        },
        Equation {
            rate_of: "d<lz^2>/dt",
            printed: "-2 lambda <ly (lx ly + ly lx)> - 2 lambda <(lx ly + ly lx) ly> + 2 lambda (<lx^2> - <ly^2>)",
            target: |p| &p.lz2,
            rhs: |e, p, lam, _del| {
                -2.0 * lam * e(&p.ly_sxy) - 2.0 * lam * e(&p.sxy_ly) + 2.0 * lam * (e(&p.lx2) - e(&p.ly2))
            },
        },
        Equation {
            rate_of: "d<lx ly + ly lx>/dt",
            printed: "8 lambda <ly^3> - 3 lambda <ly lx^2 + lx^2 ly> - 5 lambda <ly lx + lx ly> \
                      - 2 lambda <lx ly lz> + 2 delta (<ly^2> - <lx^2>) - lambda <ly>",
            target: |p| &p.sxy,
            rhs: |e, p, lam, del| {
                8.0 * lam * e(&p.ly3) - 3.0 * lam * e(&p.ly_lx2_sym) - 5.0 * lam * e(&p.sxy)
                    - 2.0 * lam * e(&p.lx_ly_lz)
                    + 2.0 * del * (e(&p.ly2) - e(&p.lx2))
                    - lam * e(&p.ops.y)
            },
        },
    ]
}

fn max_dev(
    eq: &Equation,
    model: &LindbladModel,
    products: &Products,
    states: &[DensityMatrix],
    lambda: f64,
    delta: f64,
) -> Result<(f64, f64)> {
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for rho in states {
        let exact = adjoint_rate((eq.target)(products), model, rho)?;
        let e = |a: &OperatorMatrix| expectation(rho, a).expect("dimensions checked");
        let printed = (eq.rhs)(&e, products, lambda, delta);
        worst = worst.max((exact - printed).norm());
        scale = scale.max(exact.norm());
    }
    Ok((worst, scale))
}

/// Compares every printed rate equation on `samples` random states of the
/// spin-`p.l` model.
pub fn conformance_report(p: &RotatorParams, samples: usize, seed: u64) -> Result<ConformanceReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("conformance needs at least one sample".into()));
    }
    let delta = p.delta();
    let coupling_only = RotatorParams { omega1: 0.0, omega2: 0.0, ..*p };
    let detuning_only = RotatorParams { lambda: 0.0, ..*p };
    let (full, ops) = rotator_spin_model_with_ops(p)?;
    let (lam_model, _) = rotator_spin_model_with_ops(&coupling_only)?;
    let (del_model, _) = rotator_spin_model_with_ops(&detuning_only)?;
    let products = Products::new(ops)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = Basis::Spin(p.spin_rep()?);
    let states: Vec<DensityMatrix> = (0..samples).map(|_| DensityMatrix::random(basis.clone(), &mut rng)).collect();

    let mut entries = Vec::new();
    for eq in equations() {
        let (lam_dev, lam_scale) = max_dev(&eq, &lam_model, &products, &states, p.lambda, 0.0)?;
        let (del_dev, del_scale) = max_dev(&eq, &del_model, &products, &states, 0.0, delta)?;
        let (full_dev, full_scale) = max_dev(&eq, &full, &products, &states, p.lambda, delta)?;
        let rate_scale = lam_scale.max(del_scale).max(full_scale);
        let bound = CONFORMANCE_TOL * rate_scale.max(1.0);
        entries.push(ConformanceEntry {
            rate_of: eq.rate_of.to_string(),
            printed: eq.printed.to_string(),
            lambda_terms_max_dev: lam_dev,
            delta_terms_max_dev: del_dev,
            full_max_dev: full_dev,
            rate_scale,
            conforms: lam_dev <= bound && del_dev <= bound && full_dev <= bound,
        });
    }
    Ok(ConformanceReport { l: p.l, lambda: p.lambda, delta, samples, seed, tol: CONFORMANCE_TOL, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lz_decay_conforms_and_report_is_complete() {
        let p = RotatorParams::new(1.15, 0.85, 0.3, 2.0).unwrap();
        let r = conformance_report(&p, 10, 1).unwrap();
        assert_eq!(r.entries.len(), 6);
        assert!(r.entry("d<lz>/dt").unwrap().conforms);
        for e in &r.entries {
            assert!(e.full_max_dev.is_finite() && e.rate_scale > 0.0);
        }
        assert!(conformance_report(&p, 0, 1).is_err());
    }
}
