//! The three worked systems and their closed-form baselines.

pub mod closure;
pub mod conformance;
pub mod limit_cycle;
pub mod oscillator;
pub mod rotators;

pub use closure::{
    casimir_budget, closure_stationary, closure_stationary_newton, closure_vs_exact_report, closure_vs_exact_row,
    cumulant_decouple, ly2_analytic, ly2_relative_residual, ClosureReport, ClosureRow, MomentState, MomentTable,
};
pub use conformance::{conformance_report, ConformanceEntry, ConformanceReport};
pub use limit_cycle::{
    generating_function, kummer_phi, limit_cycle_faq, limit_cycle_field, limit_cycle_lindblad, mandel_q, mean_n,
    recurrence_stationary, second_factorial_moment, LimitCycleParams,
};
pub use oscillator::{oscillator_faq, oscillator_field, oscillator_lindblad, OscillatorParams};
pub use rotators::{
    classical_spin_flow, phase_model_flow, rotator_faq, rotator_field, rotator_spin_functions, rotator_spin_model,
    rotator_spin_model_with_ops, wrap_angle, PhaseTrajectory, RotatorParams, SpinField, SpinTrajectory, LOCK_REL_TOL,
};
