//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use semiquant::faq::{sample_disc_points, FaqSystem};
use semiquant::models::{
    limit_cycle_faq, limit_cycle_field, oscillator_faq, oscillator_field, rotator_faq, rotator_field, LimitCycleParams,
    OscillatorParams, RotatorParams,
};
use semiquant::observables::{PhasePoint, Polynomial, Var};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub struct Example {
    pub name: &'static str,
    pub sys: FaqSystem,
    pub field: Box<dyn Fn(&PhasePoint) -> Vec<C64>>,
}

pub fn examples() -> Vec<Example> {
    let a = OscillatorParams::new(1.0, 0.3, 0.7).unwrap();
    let b = LimitCycleParams::new(1.3, 0.8, 0.4).unwrap();
    let c = RotatorParams::new(1.1, 0.9, 0.25, 2.0).unwrap();
    vec![
        Example { name: "oscillator", sys: oscillator_faq(&a).unwrap(), field: Box::new(move |q| oscillator_field(&a, q)) },
        Example { name: "limit-cycle", sys: limit_cycle_faq(&b).unwrap(), field: Box::new(move |q| limit_cycle_field(&b, q)) },
        Example { name: "rotators", sys: rotator_faq(&c).unwrap(), field: Box::new(move |q| rotator_field(&c, q)) },
    ]
}

pub fn points(sys: &FaqSystem, count: usize, seed: u64) -> Vec<PhasePoint> {
    sample_disc_points(sys.mode_count(), count, 2.0, seed)
}

fn eval(p: &Polynomial, at: &PhasePoint) -> C64 {
    p.evaluate(at).unwrap()
}

/// `(∂f/∂q, ∂f/∂p)` of mode `alpha` with `z = (q + ip)/√2` (ħ = l₀ = 1).
pub fn real_partials(f: &Polynomial, alpha: usize, at: &PhasePoint) -> (C64, C64) {
    let dz = eval(&f.partial(alpha, Var::Z).unwrap(), at);
    let dzc = eval(&f.partial(alpha, Var::Zc).unwrap(), at);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((dz + dzc) * s, I * (dz - dzc) * s)
}

/// The phase velocity assembled in real coordinates,
/// `q̇ = H_p + i(R̄R_p − RR̄_p)`, `ṗ = −H_q + i(RR̄_q − R̄R_q)`,
/// mapped back to `ż = (q̇ + iṗ)/√2`.
pub fn assembled_drift(sys: &FaqSystem, at: &PhasePoint) -> Vec<C64> {
    (0..sys.mode_count())
        .map(|alpha| {
            let (hq, hp) = real_partials(sys.hamiltonian(), alpha, at);
            let (mut a, mut b) = (hp, -hq);
            for r in sys.channels() {
                let rb = r.conjugate();
                let (rq, rp) = real_partials(r, alpha, at);
                let (rbq, rbp) = real_partials(&rb, alpha, at);
                let (rv, rbv) = (eval(r, at), eval(&rb, at));
                a += I * (rbv * rp - rv * rbp);
                b += I * (rv * rbq - rbv * rq);
            }
            (a + I * b) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

/// `C = Σ 2i(R_p R̄_q − R_q R̄_p)`, the coefficient of `f` in the
/// continuity form.
pub fn assembled_c(sys: &FaqSystem, at: &PhasePoint) -> C64 {
    let mut c = C64::new(0.0, 0.0);
    for alpha in 0..sys.mode_count() {
        for r in sys.channels() {
            let (rq, rp) = real_partials(r, alpha, at);
            let (rbq, rbp) = real_partials(&r.conjugate(), alpha, at);
            c += 2.0 * I * (rp * rbq - rq * rbp);
        }
    }
    c
}

/// Central-difference `Σ_α ∂(Re ż_α)/∂x_α + ∂(Im ż_α)/∂y_α`.
pub fn fd_divergence(sys: &FaqSystem, at: &PhasePoint, h: f64) -> f64 {
    let base = at.coords().to_vec();
    let shifted = |alpha: usize, d: C64| {
        let mut z = base.clone();
        z[alpha] += d;
        sys.drift(&PhasePoint::new(z).unwrap()).unwrap()[alpha]
    };
    (0..base.len())
        .map(|alpha| {
            let dx = (shifted(alpha, C64::new(h, 0.0)).re - shifted(alpha, C64::new(-h, 0.0)).re) / (2.0 * h);
            let dy = (shifted(alpha, C64::new(0.0, h)).im - shifted(alpha, C64::new(0.0, -h)).im) / (2.0 * h);
            dx + dy
        })
        .sum()
}

/// `(2/sinh 2) (sinh(1+u)/(1+u)) e^{u−1}`, the generating function at ν = 2.
pub fn g_nu2(u: f64) -> f64 {
    (2.0 / 2.0_f64.sinh()) * ((1.0 + u).sinh() / (1.0 + u)) * (u - 1.0).exp()
}

/// Poisson weights `e^{−ν} νⁿ/n!`.
pub fn poisson(nu: f64, n: usize) -> f64 {
    let mut p = (-nu).exp();
    for k in 1..=n {
        p *= nu / k as f64;
    }
    p
}
