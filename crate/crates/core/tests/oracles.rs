//! Library results against independently assembled references.

mod common;

use common::*;
use num_complex::Complex64 as C64;
use semiquant::lindblad::{
    adjoint_generator, evolve, expectation, null_space, stationary, DensityMatrix, EvolveOptions, LindbladModel,
};
use semiquant::models::{
    classical_spin_flow, generating_function, kummer_phi, limit_cycle_lindblad, mandel_q, mean_n, oscillator_lindblad,
    recurrence_stationary, rotator_spin_functions, rotator_spin_model_with_ops, LimitCycleParams, OscillatorParams,
    RotatorParams,
};
use semiquant::observables::{schwinger_bilinears, spin_vector, PhasePoint, Polynomial};
use semiquant::quantize::{
    annihilation, commutator, creation, quantize, schwinger_spin, spin_operators, weyl_quantize, normal_quantize, Basis,
    FockSpace, OperatorMatrix, OperatorOrdering, SpinRep,
};
use semiquant::Error;

#[test]
fn drift_matches_real_coordinate_assembly() {
    for ex in examples() {
        for p in points(&ex.sys, 50, 11) {
            let d = ex.sys.drift(&p).unwrap();
            let a = assembled_drift(&ex.sys, &p);
            let f = (ex.field)(&p);
            for k in 0..d.len() {
                assert!((d[k] - a[k]).norm() < 1e-10, "{}: {} vs {}", ex.name, d[k], a[k]);
                assert!((d[k] - f[k]).norm() < 1e-10, "{}", ex.name);
            }
        }
    }
}

#[test]
fn divergence_matches_c_coefficient_and_finite_differences() {
    for ex in examples() {
        for p in points(&ex.sys, 50, 12) {
            let div = ex.sys.phase_divergence(&p).unwrap();
            let c = assembled_c(&ex.sys, &p);
            assert!(c.im.abs() < 1e-12, "{}: C not real: {c}", ex.name);
            assert!((div - c.re).abs() < 1e-10, "{}: {div} vs {}", ex.name, c.re);
            assert!((div - fd_divergence(&ex.sys, &p, 1e-5)).abs() < 1e-6, "{}", ex.name);
        }
    }
}

const QUADRATICS: [&str; 5] = ["z1", "z1c", "z1^2", "z1c^2", "z1*z1c"];

fn correspondence_gap(a: &str, b: &str, ordering: OperatorOrdering, space: &FockSpace) -> OperatorMatrix {
    let (pa, pb): (Polynomial, Polynomial) = (a.parse().unwrap(), b.parse().unwrap());
    let lhs = commutator(&quantize(&pa, space, ordering).unwrap(), &quantize(&pb, space, ordering).unwrap()).unwrap();
    let rhs = quantize(&pa.poisson_bracket(&pb).unwrap(), space, ordering).unwrap().scale(I);
    lhs.sub(&rhs).unwrap()
}

#[test]
fn weyl_correspondence_is_exact_on_quadratics() {
    let space = FockSpace::single(20).unwrap();
    let safe = space.safe_indices(3);
    let zero = OperatorMatrix::zeros(Basis::Fock(space.clone()));
    for a in QUADRATICS {
        for b in QUADRATICS {
            let gap = correspondence_gap(a, b, OperatorOrdering::Weyl, &space);
            assert!(gap.max_abs_diff_on(&zero, &safe).unwrap() <= 1e-12, "{a}, {b}");
        }
    }
}

#[test]
fn normal_ordering_misses_only_by_identity_shifts() {
    let space = FockSpace::single(20).unwrap();
    let safe = space.safe_indices(3);
    let basis = Basis::Fock(space.clone());
    for a in QUADRATICS {
        for b in QUADRATICS {
            let gap = correspondence_gap(a, b, OperatorOrdering::Normal, &space);
            // [a², a⁺²] = 4a⁺a + 2 while the bracket quantizes to 4a⁺a.
            let shift = match (a, b) {
                ("z1^2", "z1c^2") => 2.0,
                ("z1c^2", "z1^2") => -2.0,
                _ => 0.0,
            };
            let expect = OperatorMatrix::identity(basis.clone()).scale_real(shift);
            assert!(gap.max_abs_diff_on(&expect, &safe).unwrap() <= 1e-12, "{a}, {b}");
        }
    }
}

#[test]
fn orderings_differ_by_half_identity_on_number() {
    let space = FockSpace::single(12).unwrap();
    let n: Polynomial = "z1*z1c".parse().unwrap();
    let diff = weyl_quantize(&n, &space).unwrap().sub(&normal_quantize(&n, &space).unwrap()).unwrap();
    let half = OperatorMatrix::identity(Basis::Fock(space.clone())).scale_real(0.5);
    assert!(diff.max_abs_diff_on(&half, &space.safe_indices(1)).unwrap() < 1e-14);
}

/// Indices of the two-mode Fock states with `n₁ + n₂ = total`.
fn fixed_number_block(space: &FockSpace, total: usize) -> Vec<usize> {
    (0..space.total_dim()).filter(|&i| space.levels(i).iter().sum::<usize>() == total).collect()
}

#[test]
fn schwinger_block_reproduces_spin_multiplet() {
    for total in 1..=6usize {
        let space = FockSpace::new(vec![total + 1, total + 1]).unwrap();
        let ops = schwinger_spin(&space).unwrap();
        let block = fixed_number_block(&space, total);
        let rep = SpinRep::from_twice(total as u32);
        let spin = spin_operators(rep);
        let l = total as f64 / 2.0;
        let expect: Vec<f64> = (0..=total).map(|m| m as f64 - l).collect();
        for (big, small) in [(&ops.x, &spin.x), (&ops.y, &spin.y), (&ops.z, &spin.z)] {
            let mut ev = big.restrict(&block).hermitian_eigenvalues();
            ev.sort_by(f64::total_cmp);
            let mut ev2 = small.hermitian_eigenvalues();
            ev2.sort_by(f64::total_cmp);
            for ((a, b), c) in ev.iter().zip(&ev2).zip(&expect) {
                assert!((a - c).abs() < 1e-10 && (b - c).abs() < 1e-10, "N = {total}");
            }
        }
        let cas = ops.casimir().restrict(&block);
        let target = OperatorMatrix::identity(cas.basis().clone()).scale_real(l * (l + 1.0));
        assert!(cas.max_abs_diff(&target).unwrap() < 1e-10);
        // The fixed-number block is invariant, so the algebra closes on it.
        let xy = commutator(&ops.x, &ops.y).unwrap();
        assert!(xy.max_abs_diff_on(&ops.z.scale(I), &block).unwrap() < 1e-12);
    }
}

#[test]
fn bilinears_match_numeric_spin_vector() {
    let bil = schwinger_bilinears();
    for p in semiquant::faq::sample_disc_points(2, 30, 2.0, 5) {
        let l = spin_vector(&p).unwrap();
        let n = p.coords().iter().map(|z| z.norm_sqr()).sum::<f64>();
        for k in 0..3 {
            let v = bil[k].evaluate(&p).unwrap();
            assert!((v.re - l[k]).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        let norm2: f64 = l.iter().map(|c| c * c).sum();
        assert!((norm2 - n * n / 4.0).abs() < 1e-10);
    }
}

#[test]
fn two_mode_flow_maps_onto_spin_flow() {
    let p = RotatorParams::new(1.0, 1.0, 0.3, 2.0).unwrap();
    let sys = semiquant::models::rotator_faq(&p).unwrap();
    let z0 = PhasePoint::new(vec![C64::new(1.2, 0.3), C64::new(0.4, -0.9)]).unwrap();
    let l0 = spin_vector(&z0).unwrap();
    let two_mode = semiquant::faq::classical_flow(&sys, &z0, 10.0, 1e-3).unwrap();
    let (h, r) = rotator_spin_functions(&p);
    let spin = classical_spin_flow(&h, &r, l0, 10.0, 1e-3).unwrap();
    for k in (0..spin.times.len()).step_by(500) {
        let mapped = spin_vector(&two_mode.points[k]).unwrap();
        for c in 0..3 {
            assert!((mapped[c] - spin.points[k][c]).abs() < 1e-6, "t = {}", spin.times[k]);
        }
    }
}

#[test]
fn oscillator_heisenberg_equation_is_the_classical_one() {
    // Linear drift: L†(â) = −iω₀â − λ(â − â⁺) away from the truncation edge.
    let p = OscillatorParams::new(1.0, 0.3, 0.6).unwrap();
    let dim = 16;
    let m = oscillator_lindblad(&p, dim).unwrap();
    let (a, ad) = (annihilation(dim).unwrap(), creation(dim).unwrap());
    let lhs = adjoint_generator(&a, &m).unwrap();
    let rhs = a.scale(C64::new(-p.lambda, -p.omega0)).add(&ad.scale_real(p.lambda)).unwrap();
    let safe = FockSpace::single(dim).unwrap().safe_indices(3);
    assert!(lhs.max_abs_diff_on(&rhs, &safe).unwrap() < 1e-12);
}

#[test]
fn spin_lz_decays_at_lambda_for_every_l() {
    for twice in 2..=12u32 {
        let p = RotatorParams::new(1.0, 1.0, 0.35, twice as f64 / 2.0).unwrap();
        let (m, ops) = rotator_spin_model_with_ops(&p).unwrap();
        let g = adjoint_generator(&ops.z, &m).unwrap();
        assert!(g.max_abs_diff(&ops.z.scale_real(-p.lambda)).unwrap() < 1e-12, "2l = {twice}");
    }
}

#[test]
fn kummer_closed_forms() {
    for x in [-3.0, -0.5, 0.0, 0.7, 4.0, 25.0] {
        let e = kummer_phi(1.5, 1.5, x).unwrap();
        assert!((e / f64::exp(x) - 1.0).abs() < 1e-13, "x = {x}");
        let phi = kummer_phi(1.0, 2.0, x).unwrap();
        let expect = if x == 0.0 { 1.0 } else { f64::exp_m1(x) / x };
        assert!((phi / expect - 1.0).abs() < 1e-13, "x = {x}");
    }
    assert!(matches!(kummer_phi(1.0, -2.0, 1.0), Err(Error::KummerPole { .. })));
}

#[test]
fn generating_function_at_nu_two() {
    for k in 0..=4 {
        let u = 0.25 * k as f64;
        assert!((generating_function(2.0, u).unwrap() - g_nu2(u)).abs() < 1e-10);
    }
}

#[test]
fn statistics_match_recurrence_moments() {
    for nu in [0.3, 0.8, 1.7, 4.0, 9.0] {
        let rho = recurrence_stationary(nu, 120).unwrap();
        let m1: f64 = rho.iter().enumerate().map(|(n, r)| n as f64 * r).sum();
        let m2: f64 = rho.iter().enumerate().map(|(n, r)| (n * n) as f64 * r).sum();
        assert!((mean_n(nu).unwrap() - m1).abs() < 1e-10, "nu = {nu}");
        assert!((mandel_q(nu).unwrap() - ((m2 - m1 * m1) / m1 - 1.0)).abs() < 1e-9, "nu = {nu}");
    }
}

#[test]
fn poisson_point_in_all_three_forms() {
    let rho = recurrence_stationary(1.0, 40).unwrap();
    for (n, r) in rho.iter().enumerate() {
        assert!((r - poisson(1.0, n)).abs() < 1e-10);
    }
    let st = stationary(&limit_cycle_lindblad(&LimitCycleParams::new(0.7, 1.3, 1.3).unwrap(), 16).unwrap()).unwrap();
    for (n, r) in st.state.populations().iter().enumerate() {
        assert!((r - poisson(1.0, n)).abs() < 1e-6);
    }
}

#[test]
fn undriven_limit_cycle_has_two_dark_states() {
    let p = LimitCycleParams::new(1.0, 0.0, 0.5).unwrap();
    let m = limit_cycle_lindblad(&p, 8).unwrap();
    match stationary(&m) {
        Err(Error::Degenerate { dimension }) => assert_eq!(dimension, 2),
        other => panic!("expected degeneracy, got {other:?}"),
    }
    // |0⟩⟨0| lies in the span of the null vectors.
    let null = null_space(&m, 1e-9).unwrap();
    let mut vac = vec![C64::new(0.0, 0.0); 64];
    vac[0] = C64::new(1.0, 0.0);
    let proj: f64 = null.iter().map(|v| v.iter().zip(&vac).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()).sum();
    assert!((proj - 1.0).abs() < 1e-10);
}

#[test]
fn pure_decay_uses_doubled_rate() {
    let dim = 5;
    let basis = Basis::Fock(FockSpace::single(dim).unwrap());
    let m = LindbladModel::new(OperatorMatrix::zeros(basis.clone()), vec![annihilation(dim).unwrap()]).unwrap();
    let n = semiquant::quantize::number(dim).unwrap();
    let opts = EvolveOptions::new(1e-3).sample_every(100).observe("n", n.clone());
    let (rho, traj) = evolve(&m, &DensityMatrix::basis_state(basis, 1).unwrap(), 2.0, &opts).unwrap();
    for (t, v) in traj.times.iter().zip(traj.series("n").unwrap()) {
        assert!((v.re - (-2.0 * t).exp()).abs() < 1e-10);
    }
    assert!((expectation(&rho, &n).unwrap().re - (-4.0_f64).exp()).abs() < 1e-10);
}
