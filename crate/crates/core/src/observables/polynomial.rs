use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Exponents `(k_α, l_α)` of `z_α` and `z*_α`, stored flat as `[k_0, l_0, k_1, l_1, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(mode_count: usize) -> Self {
        Monomial(vec![0; 2 * mode_count])
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        Monomial(pairs.iter().flat_map(|&(k, l)| [k, l]).collect())
    }

    pub fn mode_count(&self) -> usize {
        self.0.len() / 2
    }

    /// Power of `z_mode`.
    pub fn z_power(&self, mode: usize) -> u32 {
        self.0[2 * mode]
    }

    /// Power of `z*_mode`.
    pub fn zc_power(&self, mode: usize) -> u32 {
        self.0[2 * mode + 1]
    }

    pub fn power(&self, mode: usize, var: Var) -> u32 {
        match var {
            Var::Z => self.z_power(mode),
            Var::Zc => self.zc_power(mode),
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn swapped(&self) -> Monomial {
        Monomial(self.0.chunks_exact(2).flat_map(|c| [c[1], c[0]]).collect())
    }

    fn slot_mut(&mut self, mode: usize, var: Var) -> &mut u32 {
        match var {
            Var::Z => &mut self.0[2 * mode],
            Var::Zc => &mut self.0[2 * mode + 1],
        }
    }
}

/// Which of the two formally independent variables a derivative acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    Zc,
}

/// A point of complex phase space, one coordinate `z_α` per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(Vec<C64>);

impl PhasePoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("phase point has non-finite coordinates".into()));
        }
        Ok(PhasePoint(coords))
    }

    pub fn single(z: C64) -> Self {
        PhasePoint(vec![z])
    }

    /// Builds `z = (x + i y)/√2` from dimensionless real coordinates.
    pub fn from_real(xy: &[(f64, f64)]) -> Self {
        PhasePoint(
            xy.iter()
                .map(|&(x, y)| C64::new(x, y) / std::f64::consts::SQRT_2)
                .collect(),
        )
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<C64>) -> Self {
        PhasePoint(coords)
    }
}

/// Sparse complex polynomial in `(z_α, z*_α)`, with `z` and `z*` treated as
/// independent variables.
///
/// Terms live in a `BTreeMap`, so two polynomials with the same terms compare
/// equal structurally. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    mode_count: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl Polynomial {
    pub fn zero(mode_count: usize) -> Self {
        assert!(mode_count > 0, "a polynomial needs at least one mode");
        Polynomial { mode_count, terms: BTreeMap::new() }
    }

    pub fn constant(mode_count: usize, c: C64) -> Self {
        Self::zero(mode_count).with_term(Monomial::one(mode_count), c)
    }

    /// `z_mode` (0-based mode index).
    pub fn z(mode_count: usize, mode: usize) -> Self {
        Self::variable(mode_count, mode, Var::Z)
    }

    /// `z*_mode` (0-based mode index).
    pub fn zc(mode_count: usize, mode: usize) -> Self {
        Self::variable(mode_count, mode, Var::Zc)
    }

    pub fn variable(mode_count: usize, mode: usize, var: Var) -> Self {
        assert!(mode < mode_count, "mode {mode} out of range");
        let mut m = Monomial::one(mode_count);
        *m.slot_mut(mode, var) = 1;
        Self::zero(mode_count).with_term(m, C64::new(1.0, 0.0))
    }

    /// Single term `c · Π z_α^k_α z*_α^l_α`.
    pub fn monomial(pairs: &[(u32, u32)], c: C64) -> Self {
        let m = Monomial::from_pairs(pairs);
        Self::zero(m.mode_count()).with_term(m, c)
    }

    pub fn from_terms(
        mode_count: usize,
        terms: impl IntoIterator<Item = (Monomial, C64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(mode_count);
        for (m, c) in terms {
            if m.mode_count() != mode_count {
                return Err(Error::ModeMismatch { left: mode_count, right: m.mode_count() });
            }
            p.accumulate(m, c);
        }
        Ok(p)
    }

    fn with_term(mut self, m: Monomial, c: C64) -> Self {
        self.accumulate(m, c);
        self
    }

    fn accumulate(&mut self, m: Monomial, c: C64) {
        let zero = C64::new(0.0, 0.0);
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                if c != zero {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == zero {
                    slot.remove();
                }
            }
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> C64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn check_modes(&self, other: &Polynomial) -> Result<()> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeMismatch { left: self.mode_count, right: other.mode_count });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_modes(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_modes(other)?;
        let mut out = Polynomial::zero(self.mode_count);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.product(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Polynomial {
        let mut out = Polynomial::zero(self.mode_count);
        for (m, v) in &self.terms {
            out.accumulate(m.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.mode_count, C64::new(1.0, 0.0));
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// `z^k z*^l ↦ z^l z*^k` with conjugated coefficient.
    pub fn conjugate(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.mode_count);
        for (m, c) in &self.terms {
            out.accumulate(m.swapped(), c.conj());
        }
        out
    }

    /// Formal derivative with respect to `z_mode` or `z*_mode`.
    pub fn partial(&self, mode: usize, var: Var) -> Result<Polynomial> {
        if mode >= self.mode_count {
            return Err(Error::BadMode { mode, mode_count: self.mode_count });
        }
        let mut out = Polynomial::zero(self.mode_count);
        for (m, c) in &self.terms {
            let k = m.power(mode, var);
            if k == 0 {
                continue;
            }
            let mut dm = m.clone();
            *dm.slot_mut(mode, var) -= 1;
            out.accumulate(dm, c * k as f64);
        }
        Ok(out)
    }

    /// Evaluates at `p`; `z*_α` takes the value `conj(p_α)`.
    pub fn evaluate(&self, p: &PhasePoint) -> Result<C64> {
        if p.mode_count() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count, found: p.mode_count() });
        }
        Ok(self.evaluate_unchecked(p.coords()))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &[C64]) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = *c;
            for (alpha, (k, l)) in m.pairs().enumerate() {
                if k > 0 {
                    v *= z[alpha].powu(k);
                }
                if l > 0 {
                    v *= z[alpha].conj().powu(l);
                }
            }
            total += v;
        }
        total
    }

    /// `{A, B} = −i Σ_α (∂A/∂z_α ∂B/∂z*_α − ∂A/∂z*_α ∂B/∂z_α)`, so that `{z, z*} = −i`.
    pub fn poisson_bracket(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_modes(other)?;
        let mut acc = Polynomial::zero(self.mode_count);
        for alpha in 0..self.mode_count {
            let a_z = self.partial(alpha, Var::Z)?;
            let a_zc = self.partial(alpha, Var::Zc)?;
            let b_z = other.partial(alpha, Var::Z)?;
            let b_zc = other.partial(alpha, Var::Zc)?;
            acc = &acc + &(&(&a_z * &b_zc) - &(&a_zc * &b_z));
        }
        Ok(acc.scale(C64::new(0.0, -1.0)))
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        let mut worst = 0.0_f64;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coefficient(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

macro_rules! panicking_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics on a mode-count mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomial mode counts must match")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

panicking_binop!(Add, add, checked_add);
panicking_binop!(Sub, sub, checked_sub);
panicking_binop!(Mul, mul, checked_mul);

impl Mul<C64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: C64) -> Polynomial {
        self.scale(rhs)
    }
}

impl Mul<C64> for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: C64) -> Polynomial {
        self.scale(rhs)
    }
}

impl Mul<f64> for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn arithmetic_examples() {
        let z = Polynomial::z(1, 0);
        let zc = Polynomial::zc(1, 0);
        let zzc = &z * &zc;
        assert_eq!(zzc.term_count(), 1);
        assert_eq!(zzc.coefficient(&Monomial::from_pairs(&[(1, 1)])), c(1.0, 0.0));
        assert!((&z + &zc).scale(c(0.0, 0.0)).is_zero());
        let z2 = z.pow(2);
        assert!((&z2 + &(-z2.clone())).is_zero());
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = Polynomial::z(1, 0);
        let b = Polynomial::z(2, 1);
        assert!(matches!(a.checked_add(&b), Err(Error::ModeMismatch { .. })));
        assert!(a.poisson_bracket(&b).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let lam: f64 = 0.3;
        let r = Polynomial::zc(1, 0).scale(c(lam.sqrt(), 0.0));
        assert_eq!(r.conjugate(), Polynomial::z(1, 0).scale(c(lam.sqrt(), 0.0)));
        let p = Polynomial::monomial(&[(2, 0)], c(0.0, 1.0));
        assert_eq!(p.conjugate(), Polynomial::monomial(&[(0, 2)], c(0.0, -1.0)));
    }

    #[test]
    fn partial_examples() {
        let zzc = Polynomial::monomial(&[(1, 1)], c(1.0, 0.0));
        assert_eq!(zzc.partial(0, Var::Zc).unwrap(), Polynomial::z(1, 0));
        let zc2 = Polynomial::monomial(&[(0, 2)], c(1.0, 0.0));
        assert_eq!(zc2.partial(0, Var::Zc).unwrap(), Polynomial::zc(1, 0).scale(c(2.0, 0.0)));
        let mixed = Polynomial::monomial(&[(0, 1), (1, 0)], c(1.0, 0.0));
        assert!(mixed.partial(1, Var::Zc).unwrap().is_zero());
        assert!(matches!(mixed.partial(2, Var::Z), Err(Error::BadMode { .. })));
    }

    #[test]
    fn evaluate_examples() {
        let zzc = Polynomial::monomial(&[(1, 1)], c(1.0, 0.0));
        assert_eq!(zzc.evaluate(&PhasePoint::single(c(1.0, 1.0))).unwrap(), c(2.0, 0.0));
        let h = zzc.scale(c(1.7, 0.0));
        assert_eq!(h.evaluate(&PhasePoint::single(c(0.0, 0.0))).unwrap(), c(0.0, 0.0));
        let d = &Polynomial::z(1, 0) - &Polynomial::zc(1, 0);
        assert_eq!(d.evaluate(&PhasePoint::single(c(0.0, 1.0))).unwrap(), c(0.0, 2.0));
        let two = PhasePoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(zzc.evaluate(&two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bracket_examples() {
        let z = Polynomial::z(1, 0);
        let zc = Polynomial::zc(1, 0);
        assert_eq!(z.poisson_bracket(&zc).unwrap(), Polynomial::constant(1, c(0.0, -1.0)));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = (&zc + &z).scale(c(s, 0.0));
        let p = (&zc - &z).scale(c(0.0, s));
        let qp = q.poisson_bracket(&p).unwrap();
        assert!(qp.max_coeff_diff(&Polynomial::constant(1, c(1.0, 0.0))) < 1e-15);

        let z2 = z.pow(2);
        assert_eq!(z2.poisson_bracket(&zc).unwrap(), z.scale(c(0.0, -2.0)));
    }
}
