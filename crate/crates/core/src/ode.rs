//! Classical fixed-step fourth-order Runge–Kutta.

use num_complex::Complex64 as C64;

use crate::linalg::CMatrix;

/// State types the integrator can combine linearly.
pub trait OdeState: Clone {
    /// `self + a * x`
    fn axpy(&self, a: f64, x: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for Vec<f64> {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self.iter().zip(x).map(|(s, v)| s + a * v).collect()
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Vec<C64> {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self.iter().zip(x).map(|(s, v)| s + v * a).collect()
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl OdeState for [f64; 3] {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        [self[0] + a * x[0], self[1] + a * x[1], self[2] + a * x[2]]
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for [f64; 2] {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        [self[0] + a * x[0], self[1] + a * x[1]]
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for CMatrix {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        let mut out = self.clone();
        out.zip_apply(x, |s, v| *s += v * a);
        out
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

pub fn rk4_step<S, E, F>(f: &mut F, t: f64, y: &S, h: f64) -> Result<S, E>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S, E>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k2))?;
    let k4 = f(t + h, &y.axpy(h, &k3))?;
    Ok(y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4))
}

/// Number of fixed steps of size `dt` that lands within `dt/2` of `t_end`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt).round() as usize
}
