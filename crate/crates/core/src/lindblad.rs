//! Lindblad dynamics with the unhalved dissipator
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_j ([R_j ρ, R_j⁺] + [R_j, ρ R_j⁺])
//!       = −i[H, ρ] + Σ_j (2 R_j ρ R_j⁺ − R_j⁺R_j ρ − ρ R_j⁺R_j)
//! ```
//!
//! Every rate in the worked models assumes this normalization; divide the
//! channels by `√DISSIPATOR_SCALE` to get the textbook ½-normalized form.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, gemm_into, CMatrix};
use crate::ode::{rk4_step, step_count};
use crate::quantize::{commutator, Basis, OperatorMatrix};
use crate::table::{fmt_num, Table};

/// Ratio between this generator's dissipator and the conventional
/// `R ρ R⁺ − ½{R⁺R, ρ}`.
pub const DISSIPATOR_SCALE: f64 = 2.0;

const HAMILTONIAN_HERMITICITY_TOL: f64 = 1e-12;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Acceptance thresholds for a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DensityTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    /// Most negative eigenvalue tolerated, as a positive number.
    pub positivity: f64,
}

impl Default for DensityTolerances {
    fn default() -> Self {
        DensityTolerances { hermiticity: 1e-10, trace: 1e-10, positivity: 1e-8 }
    }
}

/// Measured departures from a valid state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensityDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn of(m: &CMatrix) -> Self {
        DensityDiagnostics {
            hermiticity_error: linalg::hermiticity_error(m),
            trace_error: (linalg::trace(m) - ONE).norm(),
            min_eigenvalue: linalg::hermitian_eigenvalues(m).first().copied().unwrap_or(0.0),
        }
    }

    pub fn check(&self, tol: &DensityTolerances) -> Result<()> {
        if self.hermiticity_error > tol.hermiticity {
            return Err(Error::InvalidDensity(format!("not Hermitian (error {:e})", self.hermiticity_error)));
        }
        if self.trace_error > tol.trace {
            return Err(Error::InvalidDensity(format!("trace off by {:e}", self.trace_error)));
        }
        if self.min_eigenvalue < -tol.positivity {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {:e}", self.min_eigenvalue)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(OperatorMatrix);

impl DensityMatrix {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        Self::with_tolerances(op, &DensityTolerances::default())
    }

    pub fn with_tolerances(op: OperatorMatrix, tol: &DensityTolerances) -> Result<Self> {
        DensityDiagnostics::of(op.matrix()).check(tol)?;
        Ok(DensityMatrix(op))
    }

    /// `|n⟩⟨n|`
    pub fn basis_state(basis: Basis, n: usize) -> Result<Self> {
        let d = basis.dim();
        if n >= d {
            return Err(Error::InvalidParameter(format!("level {n} outside dimension {d}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(n, n)] = ONE;
        Ok(DensityMatrix(OperatorMatrix::from_parts(m, basis)))
    }

    /// Projector on `psi / |psi|`.
    pub fn pure(basis: Basis, psi: &[C64]) -> Result<Self> {
        if psi.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: psi.len() });
        }
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero or non-finite norm".into()));
        }
        let v = v.unscale(norm);
        let m = &v * v.adjoint();
        Ok(DensityMatrix(OperatorMatrix::from_parts(m, basis)))
    }

    /// Coherent state `|α⟩` on a single truncated mode, renormalized after
    /// truncation.
    pub fn coherent(dim: usize, alpha: C64) -> Result<Self> {
        let space = crate::quantize::FockSpace::single(dim)?;
        let mut psi = Vec::with_capacity(dim);
        let mut amp = ONE;
        for n in 0..dim {
            if n > 0 {
                amp = amp * alpha / (n as f64).sqrt();
            }
            psi.push(amp);
        }
        Self::pure(Basis::Fock(space), &psi)
    }

    /// Diagonal state with the given populations (normalized here).
    pub fn diagonal(basis: Basis, populations: &[f64]) -> Result<Self> {
        if populations.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: populations.len() });
        }
        let total: f64 = populations.iter().sum();
        if populations.iter().any(|p| !(*p >= 0.0)) || !(total > 0.0) {
            return Err(Error::InvalidParameter("populations must be non-negative with positive sum".into()));
        }
        let d = basis.dim();
        let m = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(populations[i] / total, 0.0) } else { ZERO });
        Ok(DensityMatrix(OperatorMatrix::from_parts(m, basis)))
    }

    /// Full-rank random state `G G⁺ / tr(G G⁺)` with Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(basis: Basis, rng: &mut R) -> Self {
        let d = basis.dim();
        let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let m = linalg::matmul(&g, &g.adjoint());
        let tr = linalg::trace(&m).re;
        let mut m = m.unscale(tr);
        hermitize(&mut m);
        DensityMatrix(OperatorMatrix::from_parts(m, basis))
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_operator(self) -> OperatorMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        DensityDiagnostics::of(self.0.matrix())
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        self.0.matrix().diagonal().iter().map(|c| c.re).collect()
    }

    pub fn purity(&self) -> f64 {
        let m = self.0.matrix();
        m.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..=j {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// `H` and channels `R_j` of one open system.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: OperatorMatrix,
    channels: Vec<OperatorMatrix>,
    channel_adjoints: Vec<CMatrix>,
    /// `−iH − Σ R⁺R`, so that the generator is `Kρ + ρK⁺ + 2ΣRρR⁺`.
    drift: CMatrix,
    drift_adjoint: CMatrix,
}

impl LindbladModel {
    pub fn new(hamiltonian: OperatorMatrix, channels: Vec<OperatorMatrix>) -> Result<Self> {
        let d = hamiltonian.dim();
        for r in &channels {
            if r.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.dim() });
            }
        }
        let h = hamiltonian.matrix();
        let scale = linalg::max_abs(h).max(1.0);
        let err = linalg::hermiticity_error(h);
        if err > HAMILTONIAN_HERMITICITY_TOL * scale {
            return Err(Error::InvalidParameter(format!("hamiltonian is not Hermitian (error {err:e})")));
        }
        let mut drift = h * C64::new(0.0, -1.0);
        let channel_adjoints: Vec<CMatrix> = channels.iter().map(|r| r.matrix().adjoint()).collect();
        for (r, rd) in channels.iter().zip(&channel_adjoints) {
            gemm_into(-ONE, rd, r.matrix(), ONE, &mut drift);
        }
        let drift_adjoint = drift.adjoint();
        Ok(LindbladModel { hamiltonian, channels, channel_adjoints, drift, drift_adjoint })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn basis(&self) -> &Basis {
        self.hamiltonian.basis()
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[OperatorMatrix] {
        &self.channels
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }

    fn rhs_matrix(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        gemm_into(ONE, &self.drift, rho, ZERO, &mut out);
        gemm_into(ONE, rho, &self.drift_adjoint, ONE, &mut out);
        let mut tmp = CMatrix::zeros(d, d);
        let two = C64::new(DISSIPATOR_SCALE, 0.0);
        for (r, rd) in self.channels.iter().zip(&self.channel_adjoints) {
            gemm_into(ONE, r.matrix(), rho, ZERO, &mut tmp);
            gemm_into(two, &tmp, rd, ONE, &mut out);
        }
        out
    }

    /// Vectorized generator acting on column-stacked `vec(ρ)`.
    pub fn liouvillian(&self) -> CMatrix {
        let d = self.dim();
        let id = CMatrix::identity(d, d);
        let mut l = linalg::kron(&id, &self.drift) + linalg::kron(&self.drift.conjugate(), &id);
        for r in &self.channels {
            let rm = r.matrix();
            l += linalg::kron(&rm.conjugate(), rm) * C64::new(DISSIPATOR_SCALE, 0.0);
        }
        l
    }
}

/// The generator applied to `rho`, which need not be a valid state.
pub fn lindblad_rhs(m: &LindbladModel, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    m.check_dim(rho.dim())?;
    Ok(OperatorMatrix::from_parts(m.rhs_matrix(rho.matrix()), m.basis().clone()))
}

/// `tr(ρA)`
pub fn expectation(rho: &DensityMatrix, a: &OperatorMatrix) -> Result<C64> {
    operator_expectation(rho.operator(), a)
}

/// `tr(ρA)` for arbitrary matrices.
pub fn operator_expectation(rho: &OperatorMatrix, a: &OperatorMatrix) -> Result<C64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    Ok(trace_product(rho.matrix(), a.matrix()))
}

fn trace_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let d = x.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// The Heisenberg-picture image of `A`:
/// `−i[A, H] + Σ_j (R_j⁺[A, R_j] + [R_j⁺, A]R_j)`.
pub fn adjoint_generator(a: &OperatorMatrix, m: &LindbladModel) -> Result<OperatorMatrix> {
    m.check_dim(a.dim())?;
    let mut out = commutator(a, &m.hamiltonian)?.scale(C64::new(0.0, -1.0));
    for r in &m.channels {
        let rd = r.adjoint();
        out = out.add(&rd.mul(&commutator(a, r)?)?)?;
        out = out.add(&commutator(&rd, a)?.mul(r)?)?;
    }
    Ok(out)
}

/// `d⟨A⟩/dt` in state `rho`.
pub fn adjoint_rate(a: &OperatorMatrix, m: &LindbladModel, rho: &DensityMatrix) -> Result<C64> {
    m.check_dim(rho.dim())?;
    operator_expectation(rho.operator(), &adjoint_generator(a, m)?)
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt: f64,
    /// Record expectations and run the state checks every this many steps.
    pub sample_every: usize,
    /// Abort once an eigenvalue drops below `−abort_positivity`.
    pub abort_positivity: f64,
    /// Applied to the final state.
    pub tolerances: DensityTolerances,
    pub observables: Vec<(String, OperatorMatrix)>,
}

impl EvolveOptions {
    pub fn new(dt: f64) -> Self {
        EvolveOptions {
            dt,
            sample_every: 1,
            abort_positivity: 1e-6,
            tolerances: DensityTolerances::default(),
            observables: Vec::new(),
        }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }

    pub fn observe(mut self, name: impl Into<String>, op: OperatorMatrix) -> Self {
        self.observables.push((name.into(), op));
        self
    }
}

/// Sampled expectations plus the state checks made at the same times.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationTrajectory {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    /// `values[k][i]` is observable `i` at `times[k]`.
    pub values: Vec<Vec<C64>>,
    pub checks: Vec<DensityDiagnostics>,
}

impl ExpectationTrajectory {
    /// Worst departure from a valid state over all samples.
    pub fn worst(&self) -> DensityDiagnostics {
        self.checks.iter().fold(
            DensityDiagnostics { hermiticity_error: 0.0, trace_error: 0.0, min_eigenvalue: f64::INFINITY },
            |acc, c| DensityDiagnostics {
                hermiticity_error: acc.hermiticity_error.max(c.hermiticity_error),
                trace_error: acc.trace_error.max(c.trace_error),
                min_eigenvalue: acc.min_eigenvalue.min(c.min_eigenvalue),
            },
        )
    }

    pub fn series(&self, name: &str) -> Option<Vec<C64>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.values.iter().map(|row| row[i]).collect())
    }

    pub fn to_table(&self) -> Table {
        let mut header = vec!["t".to_string()];
        for n in &self.names {
            header.push(format!("{n}_re"));
            header.push(format!("{n}_im"));
        }
        let mut table = Table::new(header);
        for (t, row) in self.times.iter().zip(&self.values) {
            let mut cells = vec![fmt_num(*t)];
            for v in row {
                cells.push(fmt_num(v.re));
                cells.push(fmt_num(v.im));
            }
            table.push(cells);
        }
        table
    }
}

/// Fixed-step RK4 integration of the master equation from `rho0` to `t_end`.
pub fn evolve(
    m: &LindbladModel,
    rho0: &DensityMatrix,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<(DensityMatrix, ExpectationTrajectory)> {
    m.check_dim(rho0.dim())?;
    let dt = opts.dt;
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    for (_, op) in &opts.observables {
        m.check_dim(op.dim())?;
    }
    let n = step_count(t_end, dt);
    let every = opts.sample_every.max(1);
    let mut traj = ExpectationTrajectory {
        names: opts.observables.iter().map(|(n, _)| n.clone()).collect(),
        times: Vec::new(),
        values: Vec::new(),
        checks: Vec::new(),
    };
    let mut sample = |t: f64, rho: &CMatrix| -> Result<()> {
        let diag = DensityDiagnostics::of(rho);
        if diag.min_eigenvalue < -opts.abort_positivity {
            return Err(Error::Positivity { t, min_eigenvalue: diag.min_eigenvalue });
        }
        traj.times.push(t);
        traj.values.push(opts.observables.iter().map(|(_, a)| trace_product(rho, a.matrix())).collect());
        traj.checks.push(diag);
        Ok(())
    };

    let mut rho = rho0.operator().matrix().clone();
    sample(0.0, &rho)?;
    let mut f = |_t: f64, r: &CMatrix| Ok::<_, Error>(m.rhs_matrix(r));
    for k in 0..n {
        let t = k as f64 * dt;
        rho = rk4_step(&mut f, t, &rho, dt)?;
        if rho.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { t: t + dt });
        }
        if (k + 1) % every == 0 || k + 1 == n {
            sample((k + 1) as f64 * dt, &rho)?;
        }
    }
    hermitize(&mut rho);
    let out = DensityMatrix::with_tolerances(OperatorMatrix::from_parts(rho, m.basis().clone()), &opts.tolerances)?;
    Ok((out, traj))
}

/// Orthonormal basis of the numerical null space of the vectorized
/// generator: right singular vectors whose singular value is at most
/// `null_tol` times the largest one.
pub fn null_space(m: &LindbladModel, null_tol: f64) -> Result<Vec<DVector<C64>>> {
    let l = m.liouvillian();
    let n = l.ncols();
    let svd = l.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Linalg("SVD did not return right singular vectors".into()))?;
    let sigma_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        // Zero generator: every operator is stationary.
        return Ok((0..n).map(|k| DVector::from_fn(n, |i, _| if i == k { ONE } else { ZERO })).collect());
    }
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= null_tol * sigma_max)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect())
}

/// Default relative threshold used by [`stationary`].
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StationaryOptions {
    pub null_tol: f64,
    /// Residual bound on `‖rhs(ρ_st)‖_max`.
    pub residual_tol: f64,
    pub positivity: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions { null_tol: DEFAULT_NULL_TOL, residual_tol: 1e-10, positivity: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct StationaryState {
    pub state: DensityMatrix,
    /// `‖rhs(ρ_st)‖_max`
    pub residual: f64,
}

/// The unique stationary state, found as the null vector of the
/// vectorized generator.
pub fn stationary(m: &LindbladModel) -> Result<StationaryState> {
    stationary_with(m, &StationaryOptions::default())
}

pub fn stationary_with(m: &LindbladModel, opts: &StationaryOptions) -> Result<StationaryState> {
    let null = null_space(m, opts.null_tol)?;
    if null.len() != 1 {
        return Err(Error::Degenerate { dimension: null.len() });
    }
    let d = m.dim();
    let v = &null[0];
    let mut rho = CMatrix::from_column_slice(d, d, v.as_slice());
    let tr = linalg::trace(&rho);
    if tr.norm() < 1e-300 {
        return Err(Error::Linalg("null vector is traceless; no state in the null space".into()));
    }
    rho = rho / tr;
    hermitize(&mut rho);
    let residual = linalg::max_abs(&m.rhs_matrix(&rho));
    if residual > opts.residual_tol {
        return Err(Error::Linalg(format!("stationary residual {residual:e} exceeds {:e}", opts.residual_tol)));
    }
    let min_eigenvalue = linalg::hermitian_eigenvalues(&rho).first().copied().unwrap_or(0.0);
    if min_eigenvalue < -opts.positivity {
        return Err(Error::Truncation { min_eigenvalue });
    }
    let tol = DensityTolerances { positivity: opts.positivity, ..DensityTolerances::default() };
    let state = DensityMatrix::with_tolerances(OperatorMatrix::from_parts(rho, m.basis().clone()), &tol)?;
    Ok(StationaryState { state, residual })
}
