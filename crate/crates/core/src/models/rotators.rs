//! Two weakly coupled auto-oscillators.
//!
//! Three views of the same system: the phase equations
//! `dφ₁/dt = ω₁ + a sin(φ₂ − φ₁)` (and symmetric), the two-mode complex form
//! `dz₁/dt = iω₁z₁ + λz₁(z₁*z₂ − z₂*z₁)` on fixed-amplitude orbits, and the
//! angular-momentum form obtained through the Schwinger bilinears, where the
//! quantum model lives on a single spin-`l` multiplet.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faq::FaqSystem;
use crate::lindblad::LindbladModel;
use crate::observables::{Axis, PhasePoint, Polynomial, SpinPolynomial, Var};
use crate::ode::{rk4_step, step_count};
use crate::quantize::{quantize_spin, spin_operators, SpinOperators, SpinRep};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatorParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Coupling; `λ r₁r₂` is the phase-equation coupling `a`.
    pub lambda: f64,
    /// Spin of the quantum model, `N = 2l` excitations.
    pub l: f64,
}

impl RotatorParams {
    pub fn new(omega1: f64, omega2: f64, lambda: f64, l: f64) -> Result<Self> {
        let p = RotatorParams { omega1, omega2, lambda, l };
        p.validate()?;
        Ok(p)
    }

    /// `λ = 0` (decoupled rotators) is accepted.
    pub fn validate(&self) -> Result<()> {
        if !self.omega1.is_finite() || !self.omega2.is_finite() {
            return Err(Error::InvalidParameter("rotator frequencies must be finite".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        SpinRep::new(self.l)?;
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.omega1 - self.omega2
    }

    pub fn spin_rep(&self) -> Result<SpinRep> {
        SpinRep::new(self.l)
    }
}

fn cc(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rotator_hamiltonian(p: &RotatorParams) -> Polynomial {
    let (z1, z2, c1, c2) = (Polynomial::z(2, 0), Polynomial::z(2, 1), Polynomial::zc(2, 0), Polynomial::zc(2, 1));
    let n1 = &z1 * &c1;
    let n2 = &z2 * &c2;
    let hop = &(&c1 * &z2) - &(&c2 * &z1);
    let half_i_lambda = cc(0.0, 0.5 * p.lambda);
    n1.scale(cc(-p.omega1, 0.0)) + n2.scale(cc(-p.omega2, 0.0)) + (&n1 * &hop).scale(half_i_lambda)
        - (&n2 * &hop).scale(half_i_lambda)
}

pub fn rotator_channel(p: &RotatorParams) -> Polynomial {
    let (z1, z2, c1, c2) = (Polynomial::z(2, 0), Polynomial::z(2, 1), Polynomial::zc(2, 0), Polynomial::zc(2, 1));
    let inner = &(&(&z1 * &c1) - &(&z2 * &c2)) + &(&(&c2 * &z1) - &(&z2 * &c1));
    inner.scale(cc(0.5 * p.lambda.sqrt(), 0.0))
}

pub fn rotator_faq(p: &RotatorParams) -> Result<FaqSystem> {
    p.validate()?;
    FaqSystem::new(rotator_hamiltonian(p), vec![rotator_channel(p)])
}

pub fn rotator_field(p: &RotatorParams, point: &PhasePoint) -> Vec<C64> {
    let (z1, z2) = (point.coords()[0], point.coords()[1]);
    let hop = z1.conj() * z2 - z2.conj() * z1;
    vec![cc(0.0, p.omega1) * z1 + z1 * hop * p.lambda, cc(0.0, p.omega2) * z2 - z2 * hop * p.lambda]
}

/// Phase trajectory of the two rotators.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    pub times: Vec<f64>,
    pub phases: Vec<[f64; 2]>,
    omega: [f64; 2],
    a: f64,
}

impl PhaseTrajectory {
    /// `d(φ₂ − φ₁)/dt` at the last sample.
    pub fn final_difference_rate(&self) -> f64 {
        let [p1, p2] = *self.phases.last().expect("non-empty");
        let psi = p2 - p1;
        (self.omega[1] - self.omega[0]) - 2.0 * self.a * psi.sin()
    }

    /// Whether the phase difference has stopped drifting, relative to the
    /// rates `|δ| + 2a` that drive it.
    pub fn is_locked(&self, rel_tol: f64) -> bool {
        let scale = (self.omega[0] - self.omega[1]).abs() + 2.0 * self.a;
        self.final_difference_rate().abs() <= rel_tol * scale
    }

    /// Final `φ₂ − φ₁` wrapped to `(−π, π]`.
    pub fn final_difference(&self) -> f64 {
        let [p1, p2] = *self.phases.last().expect("non-empty");
        wrap_angle(p2 - p1)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "phi1", "phi2"]);
        for (time, [a, b]) in self.times.iter().zip(&self.phases) {
            t.push_numbers([*time, *a, *b]);
        }
        t
    }
}

pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub const LOCK_REL_TOL: f64 = 1e-6;

/// RK4 on `dφ₁/dt = ω₁ + a sin(φ₂ − φ₁)`, `dφ₂/dt = ω₂ + a sin(φ₁ − φ₂)`.
pub fn phase_model_flow(omega1: f64, omega2: f64, a: f64, phi0: [f64; 2], t_end: f64, dt: f64) -> Result<PhaseTrajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    let n = step_count(t_end, dt);
    let mut f = |_t: f64, p: &[f64; 2]| {
        let s = (p[1] - p[0]).sin();
        Ok::<_, Error>([omega1 + a * s, omega2 - a * s])
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut phases = Vec::with_capacity(n + 1);
    let mut y = phi0;
    times.push(0.0);
    phases.push(y);
    for k in 0..n {
        y = rk4_step(&mut f, k as f64 * dt, &y, dt)?;
        times.push((k + 1) as f64 * dt);
        phases.push(y);
    }
    Ok(PhaseTrajectory { times, phases, omega: [omega1, omega2], a })
}

/// `H = −δ l_z − 2λ l_y l_z` and `R = √λ (l_z − i l_y)`: the two-mode
/// functions rewritten in the bilinears, dropping the conserved total
/// number term.
pub fn rotator_spin_functions(p: &RotatorParams) -> (SpinPolynomial, SpinPolynomial) {
    let ly = SpinPolynomial::component(Axis::Y);
    let lz = SpinPolynomial::component(Axis::Z);
    let h = lz.scale(cc(-p.delta(), 0.0)).add(&ly.mul(&lz).scale(cc(-2.0 * p.lambda, 0.0)));
    let s = p.lambda.sqrt();
    let r = lz.scale(cc(s, 0.0)).add(&ly.scale(cc(0.0, -s)));
    (h, r)
}

/// Quantum model on the spin-`l` multiplet, products symmetrized.
pub fn rotator_spin_model(p: &RotatorParams) -> Result<LindbladModel> {
    let (model, _) = rotator_spin_model_with_ops(p)?;
    Ok(model)
}

pub fn rotator_spin_model_with_ops(p: &RotatorParams) -> Result<(LindbladModel, SpinOperators)> {
    p.validate()?;
    let rep = p.spin_rep()?;
    if rep.twice_l() < 2 {
        return Err(Error::InvalidParameter(format!("rotator spin model needs l >= 1, got {}", p.l)));
    }
    let ops = spin_operators(rep);
    let (h, r) = rotator_spin_functions(p);
    let model = LindbladModel::new(quantize_spin(&h, &ops)?, vec![quantize_spin(&r, &ops)?])?;
    Ok((model, ops))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<[f64; 3]>,
}

impl SpinTrajectory {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "lx", "ly", "lz"]);
        for (time, l) in self.times.iter().zip(&self.points) {
            t.push_numbers([*time, l[0], l[1], l[2]]);
        }
        t
    }
}

fn cross<T>(a: [T; 3], b: [T; 3]) -> [T; 3]
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Sub<Output = T>,
{
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// The right-hand side `dl/dt = −l × ∇H + iR (l × ∇R̄) + c.c.` for
/// polynomial `H` (real on real `l`) and `R`, with gradients prepared once.
#[derive(Debug, Clone)]
pub struct SpinField {
    grad_h: [Polynomial; 3],
    r: Polynomial,
    grad_rbar: [Polynomial; 3],
}

impl SpinField {
    pub fn new(h: &SpinPolynomial, r: &SpinPolynomial) -> Self {
        let grad = |p: &Polynomial| Axis::ALL.map(|a| p.partial(a.index(), Var::Z).expect("three modes"));
        SpinField {
            grad_h: grad(h.as_polynomial()),
            r: r.as_polynomial().clone(),
            grad_rbar: grad(r.conjugate().as_polynomial()),
        }
    }

    pub fn eval(&self, l: [f64; 3]) -> [f64; 3] {
        let lc = l.map(|v| C64::new(v, 0.0));
        let gh = [0, 1, 2].map(|k| self.grad_h[k].evaluate_unchecked(&lc).re);
        let grb = [0, 1, 2].map(|k| self.grad_rbar[k].evaluate_unchecked(&lc));
        let ham = cross(l, gh);
        let ir = C64::new(0.0, 1.0) * self.r.evaluate_unchecked(&lc);
        let diss = cross(lc, grb);
        [0, 1, 2].map(|k| -ham[k] + 2.0 * (ir * diss[k]).re)
    }
}

pub fn classical_spin_flow(
    h: &SpinPolynomial,
    r: &SpinPolynomial,
    l0: [f64; 3],
    t_end: f64,
    dt: f64,
) -> Result<SpinTrajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    if l0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial spin vector must be finite".into()));
    }
    let field = SpinField::new(h, r);
    let n = step_count(t_end, dt);
    let mut f = |_t: f64, l: &[f64; 3]| Ok::<_, Error>(field.eval(*l));
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut y = l0;
    times.push(0.0);
    points.push(y);
    for k in 0..n {
        let t = k as f64 * dt;
        y = rk4_step(&mut f, t, &y, dt)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t + dt });
        }
        times.push((k + 1) as f64 * dt);
        points.push(y);
    }
    Ok(SpinTrajectory { times, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faq::{classical_flow, sample_disc_points, verify_faq};
    use crate::lindblad::{adjoint_generator, stationary};
    use crate::observables::spin_vector;

    fn params(delta: f64) -> RotatorParams {
        RotatorParams::new(1.0 + delta / 2.0, 1.0 - delta / 2.0, 0.2, 5.0).unwrap()
    }

    #[test]
    fn decomposition_matches_field() {
        let p = RotatorParams::new(1.1, 0.9, 0.2, 1.0).unwrap();
        let pts = sample_disc_points(2, 100, 3.0, 9);
        let r = verify_faq(&rotator_faq(&p).unwrap(), |q| rotator_field(&p, q), &pts, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn uncoupled_rotators_spin_freely() {
        let p = RotatorParams::new(1.1, 0.9, 0.0, 1.0).unwrap();
        let q = PhasePoint::new(vec![C64::new(0.3, -1.0), C64::new(2.0, 0.5)]).unwrap();
        let d = rotator_faq(&p).unwrap().drift(&q).unwrap();
        assert!((d[0] - C64::new(0.0, 1.1) * q.coords()[0]).norm() < 1e-15);
        assert!((d[1] - C64::new(0.0, 0.9) * q.coords()[1]).norm() < 1e-15);
    }

    #[test]
    fn amplitudes_are_conserved() {
        let p = RotatorParams::new(1.1, 0.9, 0.2, 1.0).unwrap();
        let z0 = PhasePoint::new(vec![C64::new(0.8, 0.3), C64::new(-0.2, 1.1)]).unwrap();
        let traj = classical_flow(&rotator_faq(&p).unwrap(), &z0, 20.0, 1e-3).unwrap();
        let r0 = [z0.coords()[0].norm_sqr(), z0.coords()[1].norm_sqr()];
        for q in &traj.points {
            assert!((q.coords()[0].norm_sqr() - r0[0]).abs() < 1e-8);
            assert!((q.coords()[1].norm_sqr() - r0[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn phase_locking() {
        let a = 0.2;
        let equal = phase_model_flow(1.0, 1.0, a, [0.0, 2.0], 200.0, 0.01).unwrap();
        assert!(equal.final_difference().abs() < 1e-10);
        let locked = phase_model_flow(1.0 + 0.2, 1.0, a, [0.0, 1.0], 200.0, 0.01).unwrap();
        assert!(locked.is_locked(LOCK_REL_TOL));
        let expect = (-(0.2_f64) / (2.0 * a)).asin();
        assert!((locked.final_difference() - expect).abs() < 1e-6);
        let drifting = phase_model_flow(1.0 + 0.6, 1.0, a, [0.0, 1.0], 200.0, 0.01).unwrap();
        assert!(!drifting.is_locked(LOCK_REL_TOL));
    }

    #[test]
    fn free_phases_advance_linearly() {
        let traj = phase_model_flow(1.3, 0.7, 0.0, [0.1, -0.4], 10.0, 0.01).unwrap();
        for (t, [p1, p2]) in traj.times.iter().zip(&traj.phases) {
            assert!((p1 - (1.3 * t + 0.1)).abs() < 1e-10);
            assert!((p2 - (0.7 * t - 0.4)).abs() < 1e-10);
        }
    }

    #[test]
    fn spin_functions_match_two_mode_functions() {
        let p = RotatorParams::new(1.1, 0.9, 0.2, 1.0).unwrap();
        let (hs, rs) = rotator_spin_functions(&p);
        for q in sample_disc_points(2, 20, 2.0, 4) {
            let l = spin_vector(&q).unwrap();
            let total: f64 = q.coords().iter().map(|z| z.norm_sqr()).sum();
            let dropped = -(p.omega1 + p.omega2) * total / 2.0;
            let h2 = rotator_hamiltonian(&p).evaluate(&q).unwrap();
            assert!((hs.evaluate(l).re + dropped - h2.re).abs() < 1e-12);
            let r2 = rotator_channel(&p).evaluate(&q).unwrap();
            assert!((rs.evaluate(l) - r2).norm() < 1e-12);
        }
    }

    #[test]
    fn larmor_precession() {
        let delta = 0.7;
        let h = SpinPolynomial::component(Axis::Z).scale(C64::new(-delta, 0.0));
        let traj = classical_spin_flow(&h, &SpinPolynomial::zero(), [1.0, 0.0, 0.5], 3.0, 1e-3).unwrap();
        let t = 3.0_f64;
        let end = traj.points.last().unwrap();
        assert!((end[0] - (delta * t).cos()).abs() < 1e-9);
        assert!((end[1] + (delta * t).sin()).abs() < 1e-9);
        assert!((end[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn synchronization_in_spin_form() {
        let p = params(0.0);
        let (h, r) = rotator_spin_functions(&p);
        let l0 = [0.3, 0.8, 0.5];
        let norm0: f64 = l0.iter().map(|v| v * v).sum();
        let traj = classical_spin_flow(&h, &r, l0, 50.0 / p.lambda, 1e-2).unwrap();
        for l in &traj.points {
            let n: f64 = l.iter().map(|v| v * v).sum();
            assert!((n - norm0).abs() < 1e-10);
        }
        assert!(traj.points.last().unwrap()[1].abs() < 1e-4);
    }

    #[test]
    fn spin_model_stationary_and_lz_identity() {
        let p = params(0.0);
        let (m, ops) = rotator_spin_model_with_ops(&p).unwrap();
        assert!(m.hamiltonian().is_hermitian(1e-12));
        let lz_rate = adjoint_generator(&ops.z, &m).unwrap();
        assert!(lz_rate.max_abs_diff(&ops.z.scale_real(-p.lambda)).unwrap() < 1e-12);
        let st = stationary(&m).unwrap();
        assert!(st.residual <= 1e-10);
        let lz = crate::lindblad::expectation(&st.state, &ops.z).unwrap();
        assert!(lz.norm() < 1e-9);
        assert!(rotator_spin_model(&RotatorParams::new(1.0, 1.0, 0.2, 0.5).unwrap()).is_err());
    }
}
