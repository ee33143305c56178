use num_complex::Complex64 as C64;

use super::polynomial::{Monomial, PhasePoint, Polynomial, Var};
use crate::error::{Error, Result};

/// Angular-momentum component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Polynomial in the real components `(l_x, l_y, l_z)` with complex
/// coefficients. Stored as a holomorphic three-variable [`Polynomial`]; the
/// `z*` slots are never used.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinPolynomial(Polynomial);

impl SpinPolynomial {
    pub fn zero() -> Self {
        SpinPolynomial(Polynomial::zero(3))
    }

    pub fn constant(c: C64) -> Self {
        SpinPolynomial(Polynomial::constant(3, c))
    }

    pub fn component(axis: Axis) -> Self {
        SpinPolynomial(Polynomial::z(3, axis.index()))
    }

    pub fn from_polynomial(p: Polynomial) -> Result<Self> {
        if p.mode_count() != 3 {
            return Err(Error::ModeMismatch { left: 3, right: p.mode_count() });
        }
        if p.terms().any(|(m, _)| (0..3).any(|a| m.zc_power(a) != 0)) {
            return Err(Error::InvalidParameter("spin polynomial must not contain conjugate slots".into()));
        }
        Ok(SpinPolynomial(p))
    }

    pub fn as_polynomial(&self) -> &Polynomial {
        &self.0
    }

    pub fn add(&self, other: &SpinPolynomial) -> SpinPolynomial {
        SpinPolynomial(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &SpinPolynomial) -> SpinPolynomial {
        SpinPolynomial(&self.0 * &other.0)
    }

    pub fn scale(&self, c: C64) -> SpinPolynomial {
        SpinPolynomial(self.0.scale(c))
    }

    /// Complex conjugate as a function of real `l` (coefficients only).
    pub fn conjugate(&self) -> SpinPolynomial {
        let terms = self.0.terms().map(|(m, c)| (m.clone(), c.conj()));
        SpinPolynomial(Polynomial::from_terms(3, terms).expect("three modes"))
    }

    pub fn evaluate(&self, l: [f64; 3]) -> C64 {
        self.0.evaluate_unchecked(&l.map(|v| C64::new(v, 0.0)))
    }

    pub fn gradient(&self, l: [f64; 3]) -> [C64; 3] {
        let z = l.map(|v| C64::new(v, 0.0));
        Axis::ALL.map(|a| {
            self.0
                .partial(a.index(), Var::Z)
                .expect("three modes")
                .evaluate_unchecked(&z)
        })
    }

    /// Terms as `(coefficient, factor list)`, with factors in `x, y, z` order.
    pub fn factor_lists(&self) -> Vec<(C64, Vec<Axis>)> {
        self.0
            .terms()
            .map(|(m, c)| (*c, expand_factors(m)))
            .collect()
    }
}

fn expand_factors(m: &Monomial) -> Vec<Axis> {
    Axis::ALL
        .iter()
        .flat_map(|&a| std::iter::repeat(a).take(m.z_power(a.index()) as usize))
        .collect()
}

/// The classical bilinears `l_x = (z₁*z₂ + z₂*z₁)/2`, `l_y = i(z₂*z₁ − z₁*z₂)/2`,
/// `l_z = (|z₁|² − |z₂|²)/2` as two-mode polynomials.
pub fn schwinger_bilinears() -> [Polynomial; 3] {
    let z1 = Polynomial::z(2, 0);
    let z2 = Polynomial::z(2, 1);
    let c1 = Polynomial::zc(2, 0);
    let c2 = Polynomial::zc(2, 1);
    let half = C64::new(0.5, 0.0);
    let lx = (&(&c1 * &z2) + &(&c2 * &z1)).scale(half);
    let ly = (&(&c2 * &z1) - &(&c1 * &z2)).scale(C64::new(0.0, 0.5));
    let lz = (&(&z1 * &c1) - &(&z2 * &c2)).scale(half);
    [lx, ly, lz]
}

/// Numeric value of the bilinears at a two-mode phase point.
pub fn spin_vector(p: &PhasePoint) -> Result<[f64; 3]> {
    if p.mode_count() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.mode_count() });
    }
    let [z1, z2] = [p.coords()[0], p.coords()[1]];
    let lx = (z1.conj() * z2).re;
    let ly = (C64::new(0.0, 1.0) * z2.conj() * z1).re;
    let lz = 0.5 * (z1.norm_sqr() - z2.norm_sqr());
    Ok([lx, ly, lz])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinears_satisfy_angular_momentum_brackets() {
        let [lx, ly, lz] = schwinger_bilinears();
        // {l_x, l_y} = l_z and cyclic, under {z, z*} = −i.
        assert!(lx.poisson_bracket(&ly).unwrap().max_coeff_diff(&lz) < 1e-15);
        assert!(ly.poisson_bracket(&lz).unwrap().max_coeff_diff(&lx) < 1e-15);
        assert!(lz.poisson_bracket(&lx).unwrap().max_coeff_diff(&ly) < 1e-15);
    }

    #[test]
    fn spin_vector_matches_polynomials() {
        let p = PhasePoint::new(vec![C64::new(0.3, -1.2), C64::new(0.7, 0.4)]).unwrap();
        let v = spin_vector(&p).unwrap();
        for (poly, val) in schwinger_bilinears().iter().zip(v) {
            let e = poly.evaluate(&p).unwrap();
            assert!((e.re - val).abs() < 1e-14 && e.im.abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_and_factors() {
        let ly = SpinPolynomial::component(Axis::Y);
        let lz = SpinPolynomial::component(Axis::Z);
        let h = ly.mul(&lz).scale(C64::new(-2.0, 0.0));
        let g = h.gradient([1.0, 2.0, 3.0]);
        assert_eq!(g, [C64::new(0.0, 0.0), C64::new(-6.0, 0.0), C64::new(-4.0, 0.0)]);
        assert_eq!(h.factor_lists(), vec![(C64::new(-2.0, 0.0), vec![Axis::Y, Axis::Z])]);
        let r = lz.add(&ly.scale(C64::new(0.0, -1.0)));
        assert_eq!(r.conjugate().evaluate([0.0, 1.0, 2.0]), C64::new(2.0, 1.0));
    }
}
