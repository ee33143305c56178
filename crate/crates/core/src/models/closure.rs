//! Stationary second moments of the synchronized rotators from a cumulant
//! closure, and the comparison with the exact spin-`l` stationary state.
//!
//! At zero detuning the stationary moment equations, closed by
//! `⟨ABC⟩ ≈ ⟨AB⟩⟨C⟩ + ⟨A⟩⟨BC⟩ + ⟨AC⟩⟨B⟩ − 2⟨A⟩⟨B⟩⟨C⟩`, read
//!
//! ```text
//! ⟨l_z⟩ = 0,   ⟨l_x l_y⟩ = ⟨l_y l_x⟩ = −⟨l_y⟩/4,   ⟨l_y²⟩ = ⟨l_x⟩/2,   ⟨l_x²⟩ = ⟨l_z²⟩,
//! 4[2⟨l_y⟩⟨l_x l_y⟩ + ⟨l_x⟩⟨l_y²⟩ − 2⟨l_x⟩⟨l_y⟩²] + ⟨l_y²⟩ − ⟨l_x²⟩ = 0,
//! 8[3⟨l_y²⟩⟨l_y⟩ − 2⟨l_y⟩³] − 8[2⟨l_x l_y⟩⟨l_x⟩ + ⟨l_y⟩⟨l_x²⟩ − 2⟨l_y⟩⟨l_x⟩²]
//!     − 10⟨l_x l_y⟩ − ⟨l_y⟩ = 0,
//! ```
//!
//! together with the Casimir budget `⟨l_x²⟩ + ⟨l_y²⟩ + ⟨l_z²⟩ = (N/2)(N/2+1)`.
//! Eliminating everything but `x = ⟨l_y²⟩` leaves `8x² + 3x/2 − N²/8 − N/4 = 0`.

use std::collections::BTreeMap;

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rotators::{rotator_spin_model_with_ops, RotatorParams};
use crate::error::{Error, Result};
use crate::lindblad::{expectation, stationary_with, StationaryOptions};
use crate::table::{fmt_num, Table};

/// First and second moments of `(l_x, l_y, l_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub lx2: f64,
    pub ly2: f64,
    pub lz2: f64,
    /// `⟨l_x l_y + l_y l_x⟩`
    pub sym_xy: f64,
}

impl MomentState {
    fn to_vector(self) -> SVector<f64, 7> {
        SVector::from([self.lx, self.ly, self.lz, self.lx2, self.ly2, self.lz2, 0.5 * self.sym_xy])
    }

    fn from_vector(v: &SVector<f64, 7>) -> Self {
        MomentState { lx: v[0], ly: v[1], lz: v[2], lx2: v[3], ly2: v[4], lz2: v[5], sym_xy: 2.0 * v[6] }
    }

    pub fn max_abs_diff(&self, other: &MomentState) -> f64 {
        (self.to_vector() - other.to_vector()).amax()
    }

    /// `⟨l_x²⟩ + ⟨l_y²⟩ + ⟨l_z²⟩`
    pub fn casimir(&self) -> f64 {
        self.lx2 + self.ly2 + self.lz2
    }
}

/// Named first and ordered second moments for [`cumulant_decouple`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentTable {
    singles: BTreeMap<String, f64>,
    pairs: BTreeMap<(String, String), f64>,
}

impl MomentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(mut self, a: &str, value: f64) -> Self {
        self.singles.insert(a.to_string(), value);
        self
    }

    /// `⟨AB⟩` in this order.
    pub fn pair(mut self, a: &str, b: &str, value: f64) -> Self {
        self.pairs.insert((a.to_string(), b.to_string()), value);
        self
    }

    fn get_single(&self, a: &str) -> Result<f64> {
        self.singles.get(a).copied().ok_or_else(|| Error::MissingMoment(format!("<{a}>")))
    }

    fn get_pair(&self, a: &str, b: &str) -> Result<f64> {
        self.pairs
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .ok_or_else(|| Error::MissingMoment(format!("<{a}{b}>")))
    }
}

/// `⟨ABC⟩ ≈ ⟨AB⟩⟨C⟩ + ⟨A⟩⟨BC⟩ + ⟨AC⟩⟨B⟩ − 2⟨A⟩⟨B⟩⟨C⟩`
pub fn cumulant_decouple(moments: &MomentTable, triple: (&str, &str, &str)) -> Result<f64> {
    let (a, b, c) = triple;
    let (ma, mb, mc) = (moments.get_single(a)?, moments.get_single(b)?, moments.get_single(c)?);
    Ok(moments.get_pair(a, b)? * mc + ma * moments.get_pair(b, c)? + moments.get_pair(a, c)? * mb - 2.0 * ma * mb * mc)
}

fn check_n(n: f64) -> Result<()> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("N must be positive, got {n}")));
    }
    Ok(())
}

/// `(N/2)(N/2 + 1)`
pub fn casimir_budget(n: f64) -> f64 {
    0.5 * n * (0.5 * n + 1.0)
}

/// Positive root of `8x² + 3x/2 − N²/8 − N/4 = 0`,
/// `x = [(N² + 2N + 9/16)^{1/2} − 3/4] / 8`.
pub fn ly2_analytic(n: f64) -> Result<f64> {
    check_n(n)?;
    // Same root as the closed form, written without the subtraction.
    let k = n * n / 8.0 + n / 4.0;
    Ok(2.0 * k / (1.5 + (2.25 + 32.0 * k).sqrt()))
}

/// `|8x² + 3x/2 − N²/8 − N/4|` divided by the constant term, the scale at
/// which the quadratic can be evaluated in floating point.
pub fn ly2_relative_residual(n: f64, x: f64) -> f64 {
    let k = n * n / 8.0 + n / 4.0;
    (8.0 * x * x + 1.5 * x - k).abs() / k.max(1.0)
}

/// The closure's stationary moments from the reduced quadratic.
pub fn closure_stationary(n: f64) -> Result<MomentState> {
    if n < 2.0 {
        return Err(Error::InvalidParameter(format!("closure needs N >= 2, got {n}")));
    }
    let x = ly2_analytic(n)?;
    let side = 0.5 * (casimir_budget(n) - x);
    Ok(MomentState { lx: 2.0 * x, ly: 0.0, lz: 0.0, lx2: side, ly2: x, lz2: side, sym_xy: 0.0 })
}

type Vec7 = SVector<f64, 7>;
type Mat7 = SMatrix<f64, 7, 7>;

/// Unknowns `(lx, ly, lz, lx2, ly2, lz2, s)` with `s = ⟨l_x l_y⟩ = ⟨l_y l_x⟩`.
fn closure_residual(v: &Vec7, budget: f64) -> Vec7 {
    let [lx, ly, lz, lx2, ly2, lz2, s] = [v[0], v[1], v[2], v[3], v[4], v[5], v[6]];
    Vec7::from([
        lz,
        s + ly / 4.0,
        ly2 - lx / 2.0,
        lx2 - lz2,
        4.0 * (2.0 * ly * s + lx * ly2 - 2.0 * lx * ly * ly) + (ly2 - lx2),
        8.0 * (3.0 * ly2 * ly - 2.0 * ly.powi(3)) - 8.0 * (2.0 * s * lx + ly * lx2 - 2.0 * ly * lx * lx) - 10.0 * s - ly,
        lx2 + ly2 + lz2 - budget,
    ])
}

fn closure_jacobian(v: &Vec7) -> Mat7 {
    let [lx, ly, _lz, lx2, ly2, _lz2, s] = [v[0], v[1], v[2], v[3], v[4], v[5], v[6]];
    let mut j = Mat7::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 6)] = 1.0;
    j[(1, 1)] = 0.25;
    j[(2, 4)] = 1.0;
    j[(2, 0)] = -0.5;
    j[(3, 3)] = 1.0;
    j[(3, 5)] = -1.0;
    j[(4, 0)] = 4.0 * (ly2 - 2.0 * ly * ly);
    j[(4, 1)] = 4.0 * (2.0 * s - 4.0 * lx * ly);
    j[(4, 3)] = -1.0;
    j[(4, 4)] = 4.0 * lx + 1.0;
    j[(4, 6)] = 8.0 * ly;
    j[(5, 0)] = -8.0 * (2.0 * s - 4.0 * ly * lx);
    j[(5, 1)] = 8.0 * (3.0 * ly2 - 6.0 * ly * ly) - 8.0 * (lx2 - 2.0 * lx * lx) - 1.0;
    j[(5, 3)] = -8.0 * ly;
    j[(5, 4)] = 24.0 * ly;
    j[(5, 6)] = -16.0 * lx - 10.0;
    j[(6, 3)] = 1.0;
    j[(6, 4)] = 1.0;
    j[(6, 5)] = 1.0;
    j
}

const NEWTON_MAX_ITER: usize = 200;

/// The same stationary moments from a damped Newton solve of the full
/// closed system, independent of the reduction to a quadratic.
pub fn closure_stationary_newton(n: f64) -> Result<MomentState> {
    if n < 2.0 {
        return Err(Error::InvalidParameter(format!("closure needs N >= 2, got {n}")));
    }
    let budget = casimir_budget(n);
    let mut v = Vec7::from([n / 4.0, 0.0, 0.0, n * n / 8.0, n / 8.0, n * n / 8.0, 0.0]);
    let scale = budget.max(1.0);
    let mut res = closure_residual(&v, budget);
    for _ in 0..NEWTON_MAX_ITER {
        let norm = res.amax();
        let step = closure_jacobian(&v)
            .lu()
            .solve(&(-res))
            .ok_or_else(|| Error::Linalg("closure Jacobian is singular".into()))?;
        if norm <= 1e-15 * scale && step.amax() <= 1e-15 * v.amax().max(1.0) {
            break;
        }
        let mut t = 1.0;
        loop {
            let trial = v + step * t;
            let trial_res = closure_residual(&trial, budget);
            if trial_res.amax() < norm || t < 1e-6 {
                v = trial;
                res = trial_res;
                break;
            }
            t *= 0.5;
        }
        if step.amax() <= 4.0 * f64::EPSILON * v.amax().max(1.0) {
            break;
        }
    }
    if res.amax() > 1e-10 * scale {
        return Err(Error::NoPositiveRoot(format!("Newton did not converge (residual {:e})", res.amax())));
    }
    if !(v[4] > 0.0) {
        return Err(Error::NoPositiveRoot(format!("Newton converged to <l_y^2> = {}", v[4])));
    }
    Ok(MomentState::from_vector(&v))
}

/// One row of the closure-versus-exact comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureRow {
    pub n: u32,
    pub x_closure: f64,
    pub x_exact: f64,
    pub relative_deviation: f64,
    pub lz_exact_re: f64,
    pub lz_exact_im: f64,
    pub ly_exact_re: f64,
    pub ly_exact_im: f64,
    pub stationary_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub rows: Vec<ClosureRow>,
}

impl ClosureReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "N",
            "x_closure",
            "x_exact",
            "relative_deviation",
            "lz_exact_re",
            "lz_exact_im",
            "ly_exact_re",
            "ly_exact_im",
            "stationary_residual",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                fmt_num(r.x_closure),
                fmt_num(r.x_exact),
                fmt_num(r.relative_deviation),
                fmt_num(r.lz_exact_re),
                fmt_num(r.lz_exact_im),
                fmt_num(r.ly_exact_re),
                fmt_num(r.ly_exact_im),
                fmt_num(r.stationary_residual),
            ]);
        }
        t
    }
}

/// Largest spin for which the dense stationary solve is offered.
pub const MAX_EXACT_L: f64 = 18.0;

/// Exact stationary `⟨l_y²⟩` at one spin versus the closure estimate.
pub fn closure_vs_exact_row(p: &RotatorParams, opts: &StationaryOptions) -> Result<ClosureRow> {
    if p.l > MAX_EXACT_L {
        return Err(Error::InvalidParameter(format!("exact comparison limited to l <= {MAX_EXACT_L}, got {}", p.l)));
    }
    let n = 2.0 * p.l;
    let (model, ops) = rotator_spin_model_with_ops(p)?;
    let st = stationary_with(&model, opts)?;
    let ly2_op = ops.y.mul(&ops.y)?;
    let x_exact = expectation(&st.state, &ly2_op)?.re;
    let x_closure = ly2_analytic(n)?;
    let lz = expectation(&st.state, &ops.z)?;
    let ly = expectation(&st.state, &ops.y)?;
    Ok(ClosureRow {
        n: p.spin_rep()?.twice_l(),
        x_closure,
        x_exact,
        relative_deviation: (x_closure - x_exact) / x_exact,
        lz_exact_re: lz.re,
        lz_exact_im: lz.im,
        ly_exact_re: ly.re,
        ly_exact_im: ly.im,
        stationary_residual: st.residual,
    })
}

/// Rows for every `N = 2l` from 2 up to `2 p.l`, using `p`'s frequencies
/// and coupling; rows are computed in parallel and returned in order of `N`.
pub fn closure_vs_exact_report(p: &RotatorParams, opts: &StationaryOptions) -> Result<ClosureReport> {
    p.validate()?;
    let top = p.spin_rep()?.twice_l();
    if top < 2 {
        return Err(Error::InvalidParameter(format!("report needs l >= 1, got {}", p.l)));
    }
    let rows = (2..=top)
        .into_par_iter()
        .map(|twice| closure_vs_exact_row(&RotatorParams { l: twice as f64 / 2.0, ..*p }, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosureReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupling_identities() {
        let t = MomentTable::new().single("A", 0.0).single("B", 0.0).pair("A", "B", 3.0).pair("B", "A", 1.0).pair("A", "A", 2.0);
        let t = t.pair("B", "B", 5.0);
        assert_eq!(cumulant_decouple(&t, ("A", "B", "A")).unwrap(), 0.0);
        let (m, s) = (0.7, 1.9);
        let t = MomentTable::new().single("A", m).pair("A", "A", s);
        let got = cumulant_decouple(&t, ("A", "A", "A")).unwrap();
        assert!((got - (3.0 * s * m - 2.0 * m.powi(3))).abs() < 1e-15);
        assert!(matches!(cumulant_decouple(&t, ("A", "B", "A")), Err(Error::MissingMoment(_))));
    }

    #[test]
    fn analytic_root() {
        let x = ly2_analytic(100.0).unwrap();
        assert!((x - 12.530979).abs() < 1e-6, "{x}");
        let closed = ((100.0_f64 * 100.0 + 200.0 + 9.0 / 16.0).sqrt() - 0.75) / 8.0;
        assert!((x - closed).abs() < 1e-12);
        for n in [2.0, 10.0, 100.0, 1e4] {
            assert!(ly2_relative_residual(n, ly2_analytic(n).unwrap()) <= 1e-12);
        }
        let x50 = ly2_analytic(50.0).unwrap();
        assert!((x50 / (50.0 / 8.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn closure_paths_agree() {
        for n in [2.0, 10.0, 100.0, 1e4] {
            let a = closure_stationary(n).unwrap();
            let b = closure_stationary_newton(n).unwrap();
            let scale = a.to_vector().amax().max(1.0);
            assert!(a.max_abs_diff(&b) <= 1e-10 * scale, "N = {n}: {a:?} vs {b:?}");
            assert!((a.casimir() - casimir_budget(n)).abs() <= 1e-10 * casimir_budget(n));
            assert_eq!(a.lz, 0.0);
            assert_eq!(a.sym_xy, 0.0);
            assert!((a.lx - 2.0 * a.ly2).abs() < 1e-15 * a.lx);
        }
        assert!(closure_stationary(1.0).is_err());
    }

    #[test]
    fn exact_report_small() {
        let p = RotatorParams::new(1.0, 1.0, 0.2, 2.0).unwrap();
        let report = closure_vs_exact_report(&p, &StationaryOptions::default()).unwrap();
        assert_eq!(report.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 3, 4]);
        for r in &report.rows {
            assert!(r.lz_exact_re.abs() < 1e-9 && r.ly_exact_im.abs() < 1e-10);
            assert!(r.relative_deviation.is_finite());
            assert!(r.stationary_residual <= 1e-10);
        }
        assert!(report.to_table().to_csv_string().unwrap().starts_with("N,x_closure"));
    }
}
