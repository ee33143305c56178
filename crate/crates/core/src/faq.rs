//! Classical side of the correspondence.
//!
//! A system in FAQ form is given by a real Hamiltonian `H` and channel
//! functions `R_j`; each mode then moves as
//!
//! ```text
//! dz_α/dt = −i ∂H/∂z*_α + Σ_j (R̄_j ∂R_j/∂z*_α − R_j ∂R̄_j/∂z*_α)
//! ```
//!
//! The decomposition is always supplied by the caller; this module evaluates,
//! checks and integrates it, and carries phase-space density along the
//! characteristics.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::observables::{PhasePoint, Polynomial, Var};
use crate::ode::{rk4_step, step_count, OdeState};
use crate::table::{fmt_num, Table};

/// Seed used by [`sample_disc_points`] callers that need the recorded default.
pub const DEFAULT_SAMPLE_SEED: u64 = 20_240_611;
/// Radius of the per-mode sampling disc.
pub const DEFAULT_SAMPLE_RADIUS: f64 = 3.0;

const REALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FaqSystem {
    mode_count: usize,
    hamiltonian: Polynomial,
    channels: Vec<Polynomial>,
    drift: Vec<Polynomial>,
    divergence: Polynomial,
}

impl FaqSystem {
    pub fn new(hamiltonian: Polynomial, channels: Vec<Polynomial>) -> Result<Self> {
        let mode_count = hamiltonian.mode_count();
        for r in &channels {
            if r.mode_count() != mode_count {
                return Err(Error::ModeMismatch { left: mode_count, right: r.mode_count() });
            }
        }
        // A real function of (z, z*) is exactly one that equals its conjugate.
        let scale = hamiltonian.terms().fold(1.0_f64, |acc, (_, c)| acc.max(c.norm()));
        if hamiltonian.max_coeff_diff(&hamiltonian.conjugate()) > REALITY_TOL * scale {
            return Err(Error::InvalidParameter("hamiltonian is not real-valued".into()));
        }

        let mut drift = Vec::with_capacity(mode_count);
        for alpha in 0..mode_count {
            let mut f = hamiltonian.partial(alpha, Var::Zc)?.scale(C64::new(0.0, -1.0));
            for r in &channels {
                let rbar = r.conjugate();
                let term = &(&rbar * &r.partial(alpha, Var::Zc)?) - &(r * &rbar.partial(alpha, Var::Zc)?);
                f = &f + &term;
            }
            drift.push(f);
        }
        let mut divergence = Polynomial::zero(mode_count);
        for (alpha, f) in drift.iter().enumerate() {
            divergence = &divergence + &f.partial(alpha, Var::Z)?;
        }

        Ok(FaqSystem { mode_count, hamiltonian, channels, drift, divergence })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn hamiltonian(&self) -> &Polynomial {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Polynomial] {
        &self.channels
    }

    /// The drift `dz_α/dt` as one polynomial per mode.
    pub fn drift_polynomials(&self) -> &[Polynomial] {
        &self.drift
    }

    pub fn drift(&self, p: &PhasePoint) -> Result<Vec<C64>> {
        self.check_point(p)?;
        Ok(self.drift_unchecked(p.coords()))
    }

    fn drift_unchecked(&self, z: &[C64]) -> Vec<C64> {
        self.drift.iter().map(|f| f.evaluate_unchecked(z)).collect()
    }

    /// Divergence of the flow in the real coordinates `(x_α, y_α)`.
    ///
    /// The change of variables to `(z, z*)` has constant Jacobian, so the
    /// divergence is `Σ_α (∂ż_α/∂z_α + ∂ż*_α/∂z*_α) = 2 Re Σ_α ∂ż_α/∂z_α`.
    pub fn phase_divergence(&self, p: &PhasePoint) -> Result<f64> {
        self.check_point(p)?;
        Ok(2.0 * self.divergence.evaluate_unchecked(p.coords()).re)
    }

    fn check_point(&self, p: &PhasePoint) -> Result<()> {
        if p.mode_count() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count, found: p.mode_count() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaqReport {
    pub max_abs_error: f64,
    pub tol: f64,
    pub pass: bool,
    pub samples: usize,
}

/// Compares the FAQ drift of `sys` with `field` at every sample, using the
/// ∞-norm over modes.
pub fn verify_faq<F>(sys: &FaqSystem, field: F, samples: &[PhasePoint], tol: f64) -> Result<FaqReport>
where
    F: Fn(&PhasePoint) -> Vec<C64>,
{
    if samples.is_empty() {
        return Err(Error::InvalidParameter("verify_faq needs at least one sample".into()));
    }
    let mut worst = 0.0_f64;
    for p in samples {
        let d = sys.drift(p)?;
        let f = field(p);
        if f.len() != d.len() {
            return Err(Error::DimensionMismatch { expected: d.len(), found: f.len() });
        }
        for (a, b) in d.iter().zip(&f) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(FaqReport { max_abs_error: worst, tol, pass: worst <= tol, samples: samples.len() })
}

/// Points drawn uniformly from a disc of `radius` in each mode.
pub fn sample_disc_points(mode_count: usize, count: usize, radius: f64, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords = (0..mode_count)
                .map(|_| {
                    let r = radius * rng.gen::<f64>().sqrt();
                    let phi = std::f64::consts::TAU * rng.gen::<f64>();
                    C64::from_polar(r, phi)
                })
                .collect();
            PhasePoint::from_vec_unchecked(coords)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &PhasePoint) {
        let n = self.times.len() - 1;
        (self.times[n], &self.points[n])
    }
}

fn check_steps(t_end: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    Ok(())
}

/// Fixed-step RK4 along the drift field.
pub fn classical_flow(sys: &FaqSystem, z0: &PhasePoint, t_end: f64, dt: f64) -> Result<Trajectory> {
    check_steps(t_end, dt)?;
    sys.check_point(z0)?;
    let n = step_count(t_end, dt);
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut y = z0.coords().to_vec();
    let mut f = |_t: f64, z: &Vec<C64>| Ok::<_, Error>(sys.drift_unchecked(z));
    times.push(0.0);
    points.push(z0.clone());
    for k in 0..n {
        let t = k as f64 * dt;
        y = rk4_step(&mut f, t, &y, dt)?;
        if !y.is_finite() {
            return Err(Error::NonFinite { t: t + dt });
        }
        times.push((k + 1) as f64 * dt);
        points.push(PhasePoint::from_vec_unchecked(y.clone()));
    }
    Ok(Trajectory { times, points })
}

#[derive(Debug, Clone)]
struct WeightedState {
    z: Vec<C64>,
    log_w: f64,
}

impl OdeState for WeightedState {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        WeightedState { z: self.z.axpy(a, &x.z), log_w: self.log_w + a * x.log_w }
    }
    fn is_finite(&self) -> bool {
        self.z.is_finite() && self.log_w.is_finite()
    }
}

/// A characteristic together with the density weight carried along it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTrajectory {
    pub trajectory: Trajectory,
    pub weights: Vec<f64>,
}

impl WeightedTrajectory {
    /// Columns `t, re(z1), im(z1), ..., weight`.
    pub fn to_table(&self) -> Table {
        let modes = self.trajectory.points.first().map_or(0, PhasePoint::mode_count);
        let mut header = vec!["t".to_string()];
        for a in 1..=modes {
            header.push(format!("re(z{a})"));
            header.push(format!("im(z{a})"));
        }
        header.push("weight".into());
        let mut table = Table::new(header);
        for ((t, p), w) in self.trajectory.times.iter().zip(&self.trajectory.points).zip(&self.weights) {
            let mut row = vec![fmt_num(*t)];
            for z in p.coords() {
                row.push(fmt_num(z.re));
                row.push(fmt_num(z.im));
            }
            row.push(fmt_num(*w));
            table.push(row);
        }
        table
    }
}

/// Carries each initial point along its characteristic with
/// `d(log w)/dt = −div v`, the continuity equation of the phase liquid.
pub fn ensemble_weights(
    sys: &FaqSystem,
    points: &[PhasePoint],
    t_end: f64,
    dt: f64,
) -> Result<Vec<WeightedTrajectory>> {
    check_steps(t_end, dt)?;
    let n = step_count(t_end, dt);
    let mut rhs = |_t: f64, s: &WeightedState| {
        let z = &s.z;
        let div = 2.0 * sys.divergence.evaluate_unchecked(z).re;
        Ok::<_, Error>(WeightedState { z: sys.drift_unchecked(z), log_w: -div })
    };
    points
        .iter()
        .map(|p0| {
            sys.check_point(p0)?;
            let mut s = WeightedState { z: p0.coords().to_vec(), log_w: 0.0 };
            let mut times = vec![0.0];
            let mut pts = vec![p0.clone()];
            let mut weights = vec![1.0];
            for k in 0..n {
                let t = k as f64 * dt;
                s = rk4_step(&mut rhs, t, &s, dt)?;
                if !s.is_finite() {
                    return Err(Error::NonFinite { t: t + dt });
                }
                times.push((k + 1) as f64 * dt);
                pts.push(PhasePoint::from_vec_unchecked(s.z.clone()));
                weights.push(s.log_w.exp());
            }
            Ok(WeightedTrajectory { trajectory: Trajectory { times, points: pts }, weights })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn circle(omega: f64) -> FaqSystem {
        let h = Polynomial::monomial(&[(1, 1)], c(omega, 0.0));
        FaqSystem::new(h, vec![]).unwrap()
    }

    #[test]
    fn zero_system_has_zero_drift() {
        let sys = FaqSystem::new(Polynomial::zero(2), vec![]).unwrap();
        let p = PhasePoint::new(vec![c(1.0, 2.0), c(-0.5, 0.1)]).unwrap();
        assert_eq!(sys.drift(&p).unwrap(), vec![c(0.0, 0.0); 2]);
        assert_eq!(sys.phase_divergence(&p).unwrap(), 0.0);
    }

    #[test]
    fn complex_hamiltonian_rejected() {
        let h = Polynomial::monomial(&[(2, 0)], c(1.0, 0.0));
        assert!(matches!(FaqSystem::new(h, vec![]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn channel_mode_mismatch_rejected() {
        let h = Polynomial::zero(1);
        assert!(FaqSystem::new(h, vec![Polynomial::z(2, 0)]).is_err());
    }

    #[test]
    fn hamiltonian_circle_conserves_radius() {
        let sys = circle(1.0);
        let traj = classical_flow(&sys, &PhasePoint::single(c(0.6, -0.8)), 100.0, 0.01).unwrap();
        for p in &traj.points {
            assert!((p.coords()[0].norm() - 1.0).abs() < 1e-10);
        }
        let (t, _) = traj.last();
        assert!((t - 100.0).abs() <= 0.01);
    }

    #[test]
    fn hamiltonian_weights_stay_one() {
        let sys = circle(0.7);
        let pts = sample_disc_points(1, 5, 2.0, 7);
        for wt in ensemble_weights(&sys, &pts, 10.0, 0.01).unwrap() {
            assert!(wt.weights.iter().all(|w| (w - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn bad_steps_rejected() {
        let sys = circle(1.0);
        let z0 = PhasePoint::single(c(1.0, 0.0));
        assert!(classical_flow(&sys, &z0, 1.0, 0.0).is_err());
        assert!(classical_flow(&sys, &z0, -1.0, 0.1).is_err());
    }

    #[test]
    fn blow_up_reports_non_finite() {
        // dz/dt = R̄ ∂R/∂z* − R ∂R̄/∂z* with R = z*² gives cubic growth.
        let sys = FaqSystem::new(Polynomial::zero(1), vec![Polynomial::monomial(&[(0, 2)], c(1.0, 0.0))]).unwrap();
        let err = classical_flow(&sys, &PhasePoint::single(c(3.0, 0.0)), 50.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn verify_requires_samples() {
        let sys = circle(1.0);
        assert!(verify_faq(&sys, |_| vec![c(0.0, 0.0)], &[], 1e-12).is_err());
    }

    #[test]
    fn disc_samples_are_seeded_and_bounded() {
        let a = sample_disc_points(2, 50, 3.0, 11);
        let b = sample_disc_points(2, 50, 3.0, 11);
        assert_eq!(a, b);
        assert!(a.iter().flat_map(|p| p.coords()).all(|z| z.norm() <= 3.0));
    }

    #[test]
    fn csv_columns() {
        let sys = circle(1.0);
        let wt = ensemble_weights(&sys, &[PhasePoint::single(c(1.0, 0.0))], 0.02, 0.01).unwrap();
        let csv = wt[0].to_table().to_csv_string().unwrap();
        assert!(csv.starts_with("t,re(z1),im(z1),weight\r\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
