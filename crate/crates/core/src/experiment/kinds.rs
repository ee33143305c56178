//! One runner per experiment kind. `detail` runs write tables; sweep points
//! only report scalars.

use num_complex::Complex64 as C64;
use serde_json::{Map, Value};

use super::config::{typed, ExperimentConfig, ExperimentKind};
use super::{ExperimentError, Outputs, Summary};
use crate::faq::{ensemble_weights, sample_disc_points, verify_faq, FaqSystem, Trajectory, WeightedTrajectory, DEFAULT_SAMPLE_RADIUS};
use crate::lindblad::{evolve, expectation, stationary_with, DensityMatrix, EvolveOptions, StationaryOptions};
use crate::models::limit_cycle::MIN_RECURRENCE_LEVELS;
use crate::models::{
    classical_spin_flow, closure_stationary_newton, closure_vs_exact_report, closure_vs_exact_row, conformance_report,
    limit_cycle_faq, limit_cycle_field, limit_cycle_lindblad, mandel_q, mean_n, oscillator_faq, oscillator_field,
    oscillator_lindblad, recurrence_stationary, rotator_faq, rotator_field, rotator_spin_functions,
    second_factorial_moment, LimitCycleParams, OscillatorParams, RotatorParams,
};
use crate::observables::PhasePoint;
use crate::quantize::{annihilation, number};
use crate::table::{fmt_num, Table};

/// Pass threshold for the drift decomposition check.
pub const FAQ_TOL: f64 = 1e-12;

type Run = Result<Outputs, ExperimentError>;

pub(super) fn run(cfg: &ExperimentConfig, params: &Map<String, Value>, detail: bool) -> Run {
    match cfg.kind {
        ExperimentKind::Oscillator => oscillator(cfg, params, detail),
        ExperimentKind::LimitCycle => limit_cycle(cfg, params, detail),
        ExperimentKind::Rotators => rotators(cfg, params, detail),
        ExperimentKind::ClassicalFlow => classical(cfg, detail),
        ExperimentKind::Conformance => conformance(cfg, params, detail),
    }
}

fn faq_residual<F>(cfg: &ExperimentConfig, sys: &FaqSystem, field: F) -> crate::Result<f64>
where
    F: Fn(&PhasePoint) -> Vec<C64>,
{
    let pts = sample_disc_points(sys.mode_count(), cfg.settings.faq_samples, DEFAULT_SAMPLE_RADIUS, cfg.seed);
    Ok(verify_faq(sys, field, &pts, FAQ_TOL)?.max_abs_error)
}

fn put(summary: &mut Summary, key: &str, v: f64) {
    summary.insert(key.to_string(), v);
}

/// Indices `0, every, 2·every, …` plus the last one.
fn thin(len: usize, every: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).step_by(every.max(1)).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

fn thin_weighted(w: &WeightedTrajectory, idx: &[usize]) -> WeightedTrajectory {
    WeightedTrajectory {
        trajectory: Trajectory {
            times: idx.iter().map(|&i| w.trajectory.times[i]).collect(),
            points: idx.iter().map(|&i| w.trajectory.points[i].clone()).collect(),
        },
        weights: idx.iter().map(|&i| w.weights[i]).collect(),
    }
}

fn stationary_opts(cfg: &ExperimentConfig) -> StationaryOptions {
    StationaryOptions { null_tol: cfg.settings.null_tol, positivity: cfg.settings.pos_tol, ..StationaryOptions::default() }
}

fn oscillator(cfg: &ExperimentConfig, params: &Map<String, Value>, detail: bool) -> Run {
    let p: OscillatorParams = typed(params)?;
    let s = &cfg.settings;
    let (dim, t_end) = (s.dim.expect("schema"), s.t_end.expect("schema"));
    let sys = oscillator_faq(&p)?;
    let mut summary = Summary::new();
    put(&mut summary, "faq_max_residual", faq_residual(cfg, &sys, |q| oscillator_field(&p, q))?);
    put(&mut summary, "phase_divergence", sys.phase_divergence(&PhasePoint::single(s.alpha))?);

    let model = oscillator_lindblad(&p, dim)?;
    let mut opts = EvolveOptions::new(s.dt).sample_every(s.sample_every).observe("a", annihilation(dim)?).observe("n", number(dim)?);
    opts.tolerances.positivity = s.pos_tol;
    let (rho, traj) = evolve(&model, &DensityMatrix::coherent(dim, s.alpha)?, t_end, &opts)?;
    let classical = ensemble_weights(&sys, &[PhasePoint::single(s.alpha)], t_end, s.dt)?.remove(0);

    // Samples sit on whole steps, so they index the classical path directly.
    let idx: Vec<usize> = traj.times.iter().map(|t| (t / s.dt).round() as usize).collect();
    let a = traj.series("a").expect("observed");
    let dev = idx
        .iter()
        .zip(&a)
        .map(|(&i, ak)| (ak - classical.trajectory.points[i].coords()[0]).norm())
        .fold(0.0, f64::max);
    let worst = traj.worst();
    put(&mut summary, "ehrenfest_max_dev", dev);
    put(&mut summary, "final_mean_n", expectation(&rho, &number(dim)?)?.re);
    put(&mut summary, "final_weight", *classical.weights.last().expect("non-empty"));
    put(&mut summary, "max_hermiticity_error", worst.hermiticity_error);
    put(&mut summary, "max_trace_error", worst.trace_error);
    put(&mut summary, "min_eigenvalue", worst.min_eigenvalue);

    let mut files = Vec::new();
    if detail {
        files.push(("expectations.csv".into(), traj.to_table().to_csv_string()?));
        files.push(("classical.csv".into(), thin_weighted(&classical, &idx).to_table().to_csv_string()?));
    }
    Ok(Outputs { summary, files })
}

fn limit_cycle(cfg: &ExperimentConfig, params: &Map<String, Value>, detail: bool) -> Run {
    let p: LimitCycleParams = typed(params)?;
    let s = &cfg.settings;
    let dim = s.dim.expect("schema");
    let nu = p.nu();
    let mut summary = Summary::new();
    put(&mut summary, "nu", nu);
    put(&mut summary, "faq_max_residual", faq_residual(cfg, &limit_cycle_faq(&p)?, |q| limit_cycle_field(&p, q))?);
    let n_bar = mean_n(nu)?;
    put(&mut summary, "n_bar", n_bar);
    put(&mut summary, "second_factorial_moment", second_factorial_moment(nu)?);
    put(&mut summary, "mandel_q", mandel_q(nu)?);

    let n_max = s.n_max.unwrap_or((dim - 1).max(MIN_RECURRENCE_LEVELS));
    let rec = recurrence_stationary(nu, n_max)?;
    let (m1, g2) = rec.iter().enumerate().fold((0.0, 0.0), |(m1, g2), (n, r)| {
        let n = n as f64;
        (m1 + n * r, g2 + n * (n - 1.0) * r)
    });
    put(&mut summary, "n_bar_recurrence", m1);
    put(&mut summary, "mandel_q_recurrence", g2 / m1 - m1);

    let st = stationary_with(&limit_cycle_lindblad(&p, dim)?, &stationary_opts(cfg))?;
    let pops = st.state.populations();
    let pop_dev = pops.iter().zip(&rec).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let op = st.state.operator();
    let mut offdiag = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                offdiag = offdiag.max(op.get(i, j).norm());
            }
        }
    }
    put(&mut summary, "n_bar_liouvillian", pops.iter().enumerate().map(|(n, r)| n as f64 * r).sum());
    put(&mut summary, "max_population_dev", pop_dev);
    put(&mut summary, "max_offdiag", offdiag);
    put(&mut summary, "stationary_residual", st.residual);

    let mut files = Vec::new();
    if detail {
        let mut t = Table::new(["n", "recurrence", "liouvillian"]);
        for n in 0..rec.len().max(pops.len()) {
            let cell = |v: Option<&f64>| v.map(|x| fmt_num(*x)).unwrap_or_default();
            t.push(vec![n.to_string(), cell(rec.get(n)), cell(pops.get(n))]);
        }
        files.push(("populations.csv".into(), t.to_csv_string()?));
        files.push(("stationary.csv".into(), op.to_table().to_csv_string()?));
    }
    Ok(Outputs { summary, files })
}

/// Default initial spin direction for the classical flow, scaled by `l`.
const SPIN_DIRECTION: [f64; 3] = [0.48, 0.6, 0.64];

fn rotators(cfg: &ExperimentConfig, params: &Map<String, Value>, detail: bool) -> Run {
    let p: RotatorParams = typed(params)?;
    let s = &cfg.settings;
    let mut summary = Summary::new();
    put(&mut summary, "delta", p.delta());
    put(&mut summary, "faq_max_residual", faq_residual(cfg, &rotator_faq(&p)?, |q| rotator_field(&p, q))?);

    let opts = stationary_opts(cfg);
    let row = closure_vs_exact_row(&p, &opts)?;
    let newton = closure_stationary_newton(2.0 * p.l)?;
    put(&mut summary, "x_closure", row.x_closure);
    put(&mut summary, "x_exact", row.x_exact);
    put(&mut summary, "relative_deviation", row.relative_deviation);
    put(&mut summary, "x_newton_dev", (newton.ly2 - row.x_closure).abs());
    put(&mut summary, "lz_exact", row.lz_exact_re);
    put(&mut summary, "ly_exact", row.ly_exact_re);
    put(&mut summary, "stationary_residual", row.stationary_residual);

    let mut files = Vec::new();
    if detail {
        files.push(("closure.csv".into(), closure_vs_exact_report(&p, &opts)?.to_table().to_csv_string()?));
        let t_end = s.t_end.unwrap_or(if p.lambda > 0.0 { 50.0 / p.lambda } else { 50.0 });
        let l0 = s.l0.unwrap_or(SPIN_DIRECTION.map(|c| c * p.l));
        let (h, r) = rotator_spin_functions(&p);
        let flow = classical_spin_flow(&h, &r, l0, t_end, s.dt)?;
        let norm2 = |l: &[f64; 3]| l.iter().map(|c| c * c).sum::<f64>();
        let drift = flow.points.iter().map(|l| (norm2(l) - norm2(&l0)).abs()).fold(0.0, f64::max);
        let last = flow.points.last().expect("non-empty");
        put(&mut summary, "spin_norm_drift", drift);
        put(&mut summary, "spin_final_ly", last[1]);
        put(&mut summary, "spin_final_lz", last[2]);
        let mut t = Table::new(["t", "lx", "ly", "lz"]);
        for i in thin(flow.times.len(), s.sample_every) {
            let l = flow.points[i];
            t.push_numbers([flow.times[i], l[0], l[1], l[2]]);
        }
        files.push(("spin_flow.csv".into(), t.to_csv_string()?));
    }
    Ok(Outputs { summary, files })
}

fn classical(cfg: &ExperimentConfig, detail: bool) -> Run {
    let flow = cfg.system.as_ref().expect("schema");
    let s = &cfg.settings;
    let sys = FaqSystem::new(flow.hamiltonian.clone(), flow.channels.clone())?;
    let points = flow.initial_points.iter().map(|z| PhasePoint::new(z.clone())).collect::<crate::Result<Vec<_>>>()?;
    let paths = ensemble_weights(&sys, &points, s.t_end.expect("schema"), s.dt)?;

    let mut summary = Summary::new();
    let mut weight_dev = 0.0_f64;
    let (mut w_min, mut w_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut div0 = 0.0_f64;
    for (p0, w) in points.iter().zip(&paths) {
        weight_dev = w.weights.iter().map(|x| (x - 1.0).abs()).fold(weight_dev, f64::max);
        let last = *w.weights.last().expect("non-empty");
        w_min = w_min.min(last);
        w_max = w_max.max(last);
        div0 = div0.max(sys.phase_divergence(p0)?.abs());
    }
    put(&mut summary, "points", points.len() as f64);
    put(&mut summary, "max_weight_deviation", weight_dev);
    put(&mut summary, "final_weight_min", w_min);
    put(&mut summary, "final_weight_max", w_max);
    put(&mut summary, "max_abs_divergence_at_start", div0);

    let mut files = Vec::new();
    if detail {
        for (k, w) in paths.iter().enumerate() {
            let idx = thin(w.weights.len(), s.sample_every);
            files.push((format!("trajectory_{}.csv", k + 1), thin_weighted(w, &idx).to_table().to_csv_string()?));
        }
    }
    Ok(Outputs { summary, files })
}

fn conformance(cfg: &ExperimentConfig, params: &Map<String, Value>, detail: bool) -> Run {
    let p: RotatorParams = typed(params)?;
    let report = conformance_report(&p, cfg.settings.samples, cfg.seed)?;
    let mut summary = Summary::new();
    put(&mut summary, "equations", report.entries.len() as f64);
    put(&mut summary, "conforming_equations", report.entries.iter().filter(|e| e.conforms).count() as f64);
    put(&mut summary, "max_lambda_terms_dev", report.entries.iter().map(|e| e.lambda_terms_max_dev).fold(0.0, f64::max));
    put(&mut summary, "max_delta_terms_dev", report.entries.iter().map(|e| e.delta_terms_max_dev).fold(0.0, f64::max));

    let mut files = Vec::new();
    if detail {
        let mut t = Table::new(["rate_of", "conforms", "lambda_terms_max_dev", "delta_terms_max_dev", "full_max_dev", "rate_scale"]);
        for e in &report.entries {
            t.push(vec![
                e.rate_of.clone(),
                e.conforms.to_string(),
                fmt_num(e.lambda_terms_max_dev),
                fmt_num(e.delta_terms_max_dev),
                fmt_num(e.full_max_dev),
                fmt_num(e.rate_scale),
            ]);
        }
        files.push(("conformance.csv".into(), t.to_csv_string()?));
        let mut json = serde_json::to_string_pretty(&report).map_err(crate::Error::from)?;
        json.push('\n');
        files.push(("conformance.json".into(), json));
    }
    Ok(Outputs { summary, files })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn thinning_keeps_ends() {
        assert_eq!(thin(10, 4), vec![0, 4, 8, 9]);
        assert_eq!(thin(9, 4), vec![0, 4, 8]);
        assert_eq!(thin(1, 4), vec![0]);
    }

    #[test]
    fn poisson_point_summary() {
        let cfg = ExperimentConfig::from_value(json!({
            "experiment": "limit-cycle",
            "params": {"omega": 1.0, "lambda": 1.0, "mu": 1.0},
            "dim": 30
        }))
        .unwrap();
        let out = run(&cfg, &cfg.params, true).unwrap();
        assert!((out.summary["n_bar"] - 1.0).abs() < 1e-8);
        assert!(out.summary["mandel_q"].abs() < 1e-8);
        assert!(out.summary["max_population_dev"] < 1e-6);
        assert_eq!(out.files.len(), 2);
    }

    #[test]
    fn hamiltonian_flow_keeps_unit_weight() {
        let cfg = ExperimentConfig::from_value(json!({
            "experiment": "classical-flow",
            "system": {"hamiltonian": "z1*z1c + 0.5*z1^2*z1c^2"},
            "initial_points": [[[1.0, 0.5]], [[-0.3, 0.2]]],
            "t_end": 2.0,
            "evolve": {"dt": 0.01, "sample_every": 10}
        }))
        .unwrap();
        let out = run(&cfg, &cfg.params, true).unwrap();
        assert_eq!(out.summary["max_weight_deviation"], 0.0);
        assert_eq!(out.files.len(), 2);
    }
}
