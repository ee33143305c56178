//! Harmonic oscillator with linear friction, `dz/dt = −iω₀z − λ(z − z*)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faq::FaqSystem;
use crate::lindblad::LindbladModel;
use crate::observables::{PhasePoint, Polynomial};
use crate::quantize::{normal_quantize, FockSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorParams {
    pub omega0: f64,
    /// Friction over mass.
    pub lambda: f64,
    /// Free parameter of the channel; cancels in the classical drift.
    #[serde(default)]
    pub u: f64,
}

impl OscillatorParams {
    pub fn new(omega0: f64, lambda: f64, u: f64) -> Result<Self> {
        let p = OscillatorParams { omega0, lambda, u };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(Error::InvalidParameter(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !self.u.is_finite() {
            return Err(Error::InvalidParameter("u must be finite".into()));
        }
        Ok(())
    }
}

/// `H = ω₀|z|² + iλ(z*² − z²)/2`
pub fn oscillator_hamiltonian(p: &OscillatorParams) -> Polynomial {
    let half_i_lambda = C64::new(0.0, 0.5 * p.lambda);
    Polynomial::monomial(&[(1, 1)], C64::new(p.omega0, 0.0))
        + Polynomial::monomial(&[(0, 2)], half_i_lambda)
        - Polynomial::monomial(&[(2, 0)], half_i_lambda)
}

/// `R = √λ (z cosh u − z* sinh u)`
pub fn oscillator_channel(p: &OscillatorParams) -> Polynomial {
    let s = p.lambda.sqrt();
    Polynomial::monomial(&[(1, 0)], C64::new(s * p.u.cosh(), 0.0))
        - Polynomial::monomial(&[(0, 1)], C64::new(s * p.u.sinh(), 0.0))
}

pub fn oscillator_faq(p: &OscillatorParams) -> Result<FaqSystem> {
    p.validate()?;
    FaqSystem::new(oscillator_hamiltonian(p), vec![oscillator_channel(p)])
}

/// The equation of motion the decomposition must reproduce.
pub fn oscillator_field(p: &OscillatorParams, point: &PhasePoint) -> Vec<C64> {
    let z = point.coords()[0];
    vec![C64::new(0.0, -p.omega0) * z - (z - z.conj()) * p.lambda]
}

/// Quantum model on `dim` Fock levels, `H` normal-ordered.
pub fn oscillator_lindblad(p: &OscillatorParams, dim: usize) -> Result<LindbladModel> {
    p.validate()?;
    let space = FockSpace::single(dim)?;
    let h = normal_quantize(&oscillator_hamiltonian(p), &space)?;
    let r = normal_quantize(&oscillator_channel(p), &space)?;
    LindbladModel::new(h, vec![r])
}
