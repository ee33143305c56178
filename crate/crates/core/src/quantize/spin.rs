use num_complex::Complex64 as C64;

use super::operator::{symmetrize_product, tensor_embed, Basis, FockSpace, OperatorMatrix, SpinRep};
use super::{annihilation, creation};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::observables::{Axis, SpinPolynomial};

/// The triple `(l̂_x, l̂_y, l̂_z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators {
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
    pub z: OperatorMatrix,
}

impl SpinOperators {
    pub fn get(&self, axis: Axis) -> &OperatorMatrix {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    /// `l̂_x² + l̂_y² + l̂_z²`
    pub fn casimir(&self) -> OperatorMatrix {
        let sq = |o: &OperatorMatrix| o.mul(o).expect("same dimension");
        sq(&self.x).add(&sq(&self.y)).and_then(|s| s.add(&sq(&self.z))).expect("same dimension")
    }
}

/// Standard `(2l+1)`-dimensional matrices in the basis `m = l, l−1, ..., −l`.
pub fn spin_operators(rep: SpinRep) -> SpinOperators {
    let d = rep.dim();
    let l = rep.l();
    let m_of = |i: usize| l - i as f64;
    let mut raise = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = m_of(i);
        raise[(i - 1, i)] = C64::new((l * (l + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower).scale(0.5);
    let y = (&raise - &lower) * C64::new(0.0, -0.5);
    let z = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(m_of(i), 0.0) } else { C64::new(0.0, 0.0) });
    let basis = Basis::Spin(rep);
    SpinOperators {
        x: OperatorMatrix::from_parts(x, basis.clone()),
        y: OperatorMatrix::from_parts(y, basis.clone()),
        z: OperatorMatrix::from_parts(z, basis),
    }
}

/// Two-mode bosonic realization `l̂_x = (â₁⁺â₂ + â₂⁺â₁)/2`,
/// `l̂_y = i(â₂⁺â₁ − â₁⁺â₂)/2`, `l̂_z = (â₁⁺â₁ − â₂⁺â₂)/2`.
pub fn schwinger_spin(space: &FockSpace) -> Result<SpinOperators> {
    if space.mode_count() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: space.mode_count() });
    }
    let [d1, d2] = [space.mode_dims()[0], space.mode_dims()[1]];
    let a1 = tensor_embed(&annihilation(d1)?, 0, space)?;
    let a1d = tensor_embed(&creation(d1)?, 0, space)?;
    let a2 = tensor_embed(&annihilation(d2)?, 1, space)?;
    let a2d = tensor_embed(&creation(d2)?, 1, space)?;
    let x = a1d.mul(&a2)?.add(&a2d.mul(&a1)?)?.scale_real(0.5);
    let y = a2d.mul(&a1)?.sub(&a1d.mul(&a2)?)?.scale(C64::new(0.0, 0.5));
    let z = a1d.mul(&a1)?.sub(&a2d.mul(&a2)?)?.scale_real(0.5);
    Ok(SpinOperators { x, y, z })
}

/// Replaces `l_i → l̂_i`, symmetrizing every monomial over all orderings of
/// its factors.
pub fn quantize_spin(p: &SpinPolynomial, ops: &SpinOperators) -> Result<OperatorMatrix> {
    let basis = ops.x.basis().clone();
    let mut acc = OperatorMatrix::zeros(basis.clone());
    for (c, factors) in p.factor_lists() {
        let term = if factors.is_empty() {
            OperatorMatrix::identity(basis.clone())
        } else {
            let list: Vec<OperatorMatrix> = factors.iter().map(|&a| ops.get(a).clone()).collect();
            symmetrize_product(&list)?
        };
        acc = acc.add(&term.scale(c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::commutator;

    #[test]
    fn spin_half_is_half_pauli() {
        let s = spin_operators(SpinRep::from_twice(1));
        let h = |re: f64, im: f64| C64::new(re, im);
        assert_eq!(s.x.get(0, 1), h(0.5, 0.0));
        assert_eq!(s.x.get(1, 0), h(0.5, 0.0));
        assert_eq!(s.y.get(0, 1), h(0.0, -0.5));
        assert_eq!(s.y.get(1, 0), h(0.0, 0.5));
        assert_eq!(s.z.get(0, 0), h(0.5, 0.0));
        assert_eq!(s.z.get(1, 1), h(-0.5, 0.0));
    }

    #[test]
    fn commutation_and_casimir_up_to_l_20() {
        for twice in 1..=40 {
            let rep = SpinRep::from_twice(twice);
            let s = spin_operators(rep);
            let c = commutator(&s.x, &s.y).unwrap();
            let i_lz = s.z.scale(C64::new(0.0, 1.0));
            assert!(c.max_abs_diff(&i_lz).unwrap() < 1e-12, "l = {}", rep.l());
            let cas = s.casimir();
            let expect = OperatorMatrix::identity(Basis::Spin(rep)).scale_real(rep.casimir());
            assert!(cas.max_abs_diff(&expect).unwrap() < 1e-10 * rep.casimir().max(1.0));
        }
    }

    #[test]
    fn schwinger_needs_two_modes() {
        assert!(schwinger_spin(&FockSpace::single(3).unwrap()).is_err());
    }

    #[test]
    fn spin_quantization_symmetrizes() {
        let s = spin_operators(SpinRep::from_twice(4));
        let p = SpinPolynomial::component(Axis::Y)
            .mul(&SpinPolynomial::component(Axis::Z))
            .scale(C64::new(2.0, 0.0));
        let got = quantize_spin(&p, &s).unwrap();
        let expect = s.y.mul(&s.z).unwrap().add(&s.z.mul(&s.y).unwrap()).unwrap();
        assert!(got.max_abs_diff(&expect).unwrap() < 1e-14);
        let one = quantize_spin(&SpinPolynomial::constant(C64::new(3.0, 0.0)), &s).unwrap();
        assert_eq!(one.trace(), C64::new(15.0, 0.0));
    }
}
