//! Oscillator with linear gain and nonlinear damping,
//! `dz/dt = −iωz + λz − 2μz|z|²`, whose orbits settle on `|z|² = λ/2μ`.
//!
//! The stationary photon statistics depend only on `ν = λ/μ`. They are
//! available three ways: the full Liouvillian null vector, the population
//! balance on a truncated ladder, and the closed-form generating function
//! `G(u) = Φ(1, ν, ν(1+u)) / Φ(1, ν, 2ν)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faq::FaqSystem;
use crate::lindblad::LindbladModel;
use crate::observables::{PhasePoint, Polynomial};
use crate::quantize::{normal_quantize, FockSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitCycleParams {
    pub omega: f64,
    /// Linear gain.
    pub lambda: f64,
    /// Nonlinear damping.
    pub mu: f64,
}

impl LimitCycleParams {
    pub fn new(omega: f64, lambda: f64, mu: f64) -> Result<Self> {
        let p = LimitCycleParams { omega, lambda, mu };
        p.validate()?;
        Ok(p)
    }

    /// `λ = 0` is accepted so that the pure-damping limit can be built.
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter("omega must be finite".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        Ok(())
    }

    pub fn nu(&self) -> f64 {
        self.lambda / self.mu
    }
}

pub fn limit_cycle_hamiltonian(p: &LimitCycleParams) -> Polynomial {
    Polynomial::monomial(&[(1, 1)], C64::new(p.omega, 0.0))
}

/// `(√λ z*, √μ z²)`
pub fn limit_cycle_channels(p: &LimitCycleParams) -> Vec<Polynomial> {
    vec![
        Polynomial::monomial(&[(0, 1)], C64::new(p.lambda.sqrt(), 0.0)),
        Polynomial::monomial(&[(2, 0)], C64::new(p.mu.sqrt(), 0.0)),
    ]
}

pub fn limit_cycle_faq(p: &LimitCycleParams) -> Result<FaqSystem> {
    p.validate()?;
    FaqSystem::new(limit_cycle_hamiltonian(p), limit_cycle_channels(p))
}

pub fn limit_cycle_field(p: &LimitCycleParams, point: &PhasePoint) -> Vec<C64> {
    let z = point.coords()[0];
    vec![C64::new(p.lambda, -p.omega) * z - z * (2.0 * p.mu * z.norm_sqr())]
}

pub const MIN_LIMIT_CYCLE_DIM: usize = 4;

/// `H = ω a⁺a`, channels `√λ a⁺` and `√μ a²` on `dim` levels.
pub fn limit_cycle_lindblad(p: &LimitCycleParams, dim: usize) -> Result<LindbladModel> {
    p.validate()?;
    if dim < MIN_LIMIT_CYCLE_DIM {
        return Err(Error::InvalidParameter(format!("limit-cycle model needs dim >= {MIN_LIMIT_CYCLE_DIM}, got {dim}")));
    }
    let space = FockSpace::single(dim)?;
    let h = normal_quantize(&limit_cycle_hamiltonian(p), &space)?;
    let channels = limit_cycle_channels(p)
        .iter()
        .map(|r| normal_quantize(r, &space))
        .collect::<Result<Vec<_>>>()?;
    LindbladModel::new(h, channels)
}

pub const MIN_RECURRENCE_LEVELS: usize = 10;
/// `ρ_{n_max}` must be below this fraction of the largest population.
pub const TAIL_RATIO: f64 = 1e-12;

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
    }
    Ok(())
}

/// Stationary populations `ρ_0..=ρ_{n_max}` from the population balance
///
/// ```text
/// 2λ[nρ_{n−1} − (n+1)ρ_n] + 2μ[(n+2)(n+1)ρ_{n+2} − n(n−1)ρ_n] = 0
/// ```
///
/// cut at `n_max` the way a truncated ladder cuts it (no gain out of the top
/// level), with one balance row replaced by `Σρ_n = 1`.
pub fn recurrence_stationary(nu: f64, n_max: usize) -> Result<Vec<f64>> {
    check_nu(nu)?;
    if n_max < MIN_RECURRENCE_LEVELS {
        return Err(Error::InvalidParameter(format!("n_max must be at least {MIN_RECURRENCE_LEVELS}, got {n_max}")));
    }
    let size = n_max + 1;
    // Rates in units of 2μ; column n holds the flows out of level n.
    let mut g = DMatrix::<f64>::zeros(size, size);
    for n in 0..size {
        if n < n_max {
            let up = nu * (n + 1) as f64;
            g[(n + 1, n)] += up;
            g[(n, n)] -= up;
        }
        if n >= 2 {
            let down = (n * (n - 1)) as f64;
            g[(n - 2, n)] += down;
            g[(n, n)] -= down;
        }
    }
    for col in 0..size {
        g[(0, col)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(size);
    rhs[0] = 1.0;
    let rho = g
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Linalg("population balance is singular".into()))?;

    let peak = rho.iter().copied().fold(0.0_f64, f64::max);
    if rho.iter().any(|&r| r < -1e-13 * peak) {
        return Err(Error::Linalg("population balance produced negative probabilities".into()));
    }
    let ratio = rho[n_max].max(0.0) / peak;
    if ratio >= TAIL_RATIO {
        return Err(Error::TailNotNegligible { n_max, ratio });
    }
    Ok(rho.iter().map(|r| r.max(0.0)).collect())
}

const KUMMER_MAX_TERMS: usize = 10_000;
const KUMMER_REL_TOL: f64 = 1e-16;
pub const KUMMER_MAX_ARG: f64 = 200.0;

fn is_pole(c: f64) -> bool {
    c <= 0.0 && c == c.round()
}

/// Confluent hypergeometric `Φ(a, c, x) = Σ_k (a)_k/(c)_k · x^k/k!`.
///
/// Negative arguments go through `Φ(a, c, x) = e^x Φ(c − a, c, −x)` so the
/// summed series never alternates.
pub fn kummer_phi(a: f64, c: f64, x: f64) -> Result<f64> {
    if is_pole(c) {
        return Err(Error::KummerPole { c });
    }
    if !a.is_finite() || !c.is_finite() || !x.is_finite() || x.abs() > KUMMER_MAX_ARG {
        return Err(Error::InvalidParameter(format!(
            "kummer_phi needs finite a, c and |x| <= {KUMMER_MAX_ARG} (a = {a}, c = {c}, x = {x})"
        )));
    }
    if x < 0.0 {
        return Ok(x.exp() * kummer_series(c - a, c, -x)?);
    }
    kummer_series(a, c, x)
}

fn kummer_series(a: f64, c: f64, x: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (c + kf) * x / (kf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Past the peak the terms shrink at least geometrically.
        let ratio = ((a + kf + 1.0) / (c + kf + 1.0) * x / (kf + 2.0)).abs();
        if ratio < 1.0 && term.abs() <= KUMMER_REL_TOL * sum.abs() * (1.0 - ratio) {
            return Ok(sum);
        }
    }
    Err(Error::KummerNonConvergence { terms: KUMMER_MAX_TERMS })
}

/// `G(u) = Σ ρ_n uⁿ`
pub fn generating_function(nu: f64, u: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(kummer_phi(1.0, nu, nu * (1.0 + u))? / kummer_phi(1.0, nu, 2.0 * nu)?)
}

/// `n̄ = G'(1)`, using `Φ'(a, c, x) = (a/c) Φ(a+1, c+1, x)`.
pub fn mean_n(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(kummer_phi(2.0, nu + 1.0, 2.0 * nu)? / kummer_phi(1.0, nu, 2.0 * nu)?)
}

/// `⟨n(n−1)⟩ = G''(1)`
pub fn second_factorial_moment(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let norm = kummer_phi(1.0, nu, 2.0 * nu)?;
    Ok(2.0 * nu / (nu + 1.0) * kummer_phi(3.0, nu + 2.0, 2.0 * nu)? / norm)
}

/// Mandel parameter `Q = ⟨n(n−1)⟩/n̄ − n̄`.
pub fn mandel_q(nu: f64) -> Result<f64> {
    let n = mean_n(nu)?;
    Ok(second_factorial_moment(nu)? / n - n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faq::{classical_flow, sample_disc_points, verify_faq};
    use crate::lindblad::stationary;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn drift_at_unit_point() {
        let p = LimitCycleParams::new(2.0, 1.0, 0.5).unwrap();
        let d = limit_cycle_faq(&p).unwrap().drift(&PhasePoint::single(C64::new(1.0, 0.0))).unwrap();
        assert!((d[0] - C64::new(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn decomposition_matches_field() {
        let p = LimitCycleParams::new(1.3, 0.4, 0.9).unwrap();
        let pts = sample_disc_points(1, 100, 3.0, 2);
        let r = verify_faq(&limit_cycle_faq(&p).unwrap(), |q| limit_cycle_field(&p, q), &pts, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn orbit_settles_on_cycle() {
        let p = LimitCycleParams::new(1.0, 0.5, 0.5).unwrap();
        let traj = classical_flow(&limit_cycle_faq(&p).unwrap(), &PhasePoint::single(C64::new(0.1, 0.0)), 60.0, 0.01).unwrap();
        let (_, end) = traj.last();
        assert!((end.coords()[0].norm_sqr() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn divergence_changes_sign_across_cycle() {
        let p = LimitCycleParams::new(1.0, 0.5, 0.5).unwrap();
        let sys = limit_cycle_faq(&p).unwrap();
        let r_cycle = (p.lambda / (2.0 * p.mu)).sqrt();
        let inside = sys.phase_divergence(&PhasePoint::single(C64::new(0.5 * r_cycle, 0.0))).unwrap();
        let outside = sys.phase_divergence(&PhasePoint::single(C64::new(1.5 * r_cycle, 0.0))).unwrap();
        assert!(inside > 0.0 && outside < 0.0);
    }

    #[test]
    fn poisson_point() {
        let rho = recurrence_stationary(1.0, 30).unwrap();
        for (n, r) in rho.iter().enumerate() {
            assert!((r - (-1.0_f64).exp() / factorial(n)).abs() < 1e-10, "n = {n}");
        }
        assert!((rho.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recurrence_rejects_short_ladders() {
        assert!(matches!(recurrence_stationary(1.0, 12), Err(Error::TailNotNegligible { n_max: 12, .. })));
        assert!(recurrence_stationary(1.0, 9).is_err());
        assert!(recurrence_stationary(0.0, 30).is_err());
    }

    #[test]
    fn recurrence_matches_liouvillian_null_vector() {
        let p = LimitCycleParams::new(1.0, 1.5, 1.0).unwrap();
        let st = stationary(&limit_cycle_lindblad(&p, 30).unwrap()).unwrap();
        let rho = recurrence_stationary(p.nu(), 30).unwrap();
        for (n, pop) in st.state.populations().iter().enumerate() {
            assert!((pop - rho[n]).abs() < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn kummer_identities() {
        for x in [1.0_f64, 4.0] {
            assert!((kummer_phi(1.0, 2.0, x).unwrap() - (x.exp() - 1.0) / x).abs() < 1e-12 * x.exp());
        }
        assert_eq!(kummer_phi(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert!((kummer_phi(1.0, 1.0, 2.0).unwrap() - 2.0_f64.exp()).abs() < 1e-12 * 2.0_f64.exp());
        assert!((kummer_phi(1.0, 1.0, -3.0).unwrap() - (-3.0_f64).exp()).abs() < 1e-15);
        assert!(matches!(kummer_phi(1.0, -2.0, 1.0), Err(Error::KummerPole { .. })));
        assert!(kummer_phi(1.0, 2.0, 250.0).is_err());
    }

    #[test]
    fn generating_function_closed_forms() {
        for u in [0.0_f64, 0.5, 1.0] {
            assert!((generating_function(1.0, u).unwrap() - (u - 1.0).exp()).abs() < 1e-12);
            let two = 2.0 / 2.0_f64.sinh() * (1.0 + u).sinh() / (1.0 + u) * (u - 1.0).exp();
            assert!((generating_function(2.0, u).unwrap() - two).abs() < 1e-12);
        }
    }

    #[test]
    fn generating_function_matches_recurrence_series() {
        let rho = recurrence_stationary(3.0, 60).unwrap();
        let series: f64 = rho.iter().rev().fold(0.0, |acc, r| acc * 0.7 + r);
        assert!((generating_function(3.0, 0.7).unwrap() - series).abs() < 1e-8);
        let n_bar: f64 = rho.iter().enumerate().map(|(n, r)| n as f64 * r).sum();
        assert!((mean_n(3.0).unwrap() - n_bar).abs() < 1e-8);
    }

    #[test]
    fn mandel_regimes() {
        assert!((mean_n(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(mandel_q(1.0).unwrap().abs() < 1e-10);
        assert!(mandel_q(2.0).unwrap() > 0.0);
        assert!(mandel_q(0.5).unwrap() < 0.0);
    }
}
