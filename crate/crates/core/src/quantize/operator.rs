use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::table::{fmt_num, Table};

/// Truncated bosonic Fock space, levels `0..d` per mode.
///
/// Basis vectors are ordered with mode 0 most significant, matching
/// `A₀ ⊗ A₁ ⊗ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    mode_dims: Vec<usize>,
}

impl FockSpace {
    pub fn new(mode_dims: Vec<usize>) -> Result<Self> {
        if mode_dims.is_empty() {
            return Err(Error::InvalidParameter("Fock space needs at least one mode".into()));
        }
        if let Some(&d) = mode_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidParameter(format!("Fock truncation {d} < 2")));
        }
        Ok(FockSpace { mode_dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn mode_count(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.mode_dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.mode_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, levels: &[usize]) -> usize {
        levels.iter().zip(&self.mode_dims).fold(0, |acc, (&n, &d)| acc * d + n)
    }

    /// Basis indices with every level below `dim − margin`: the subspace on
    /// which identities of operators of degree ≤ `margin` are unaffected by
    /// the truncation.
    pub fn safe_indices(&self, margin: usize) -> Vec<usize> {
        (0..self.total_dim())
            .filter(|&i| {
                self.levels(i)
                    .iter()
                    .zip(&self.mode_dims)
                    .all(|(&n, &d)| n + margin < d)
            })
            .collect()
    }
}

/// Spin representation with `2l` stored as an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinRep {
    twice_l: u32,
}

impl SpinRep {
    pub fn from_twice(twice_l: u32) -> Self {
        SpinRep { twice_l }
    }

    pub fn new(l: f64) -> Result<Self> {
        let twice = 2.0 * l;
        if !(l >= 0.0) || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("spin l = {l} is not a non-negative half-integer")));
        }
        Ok(SpinRep { twice_l: twice.round() as u32 })
    }

    pub fn l(&self) -> f64 {
        self.twice_l as f64 / 2.0
    }

    pub fn twice_l(&self) -> u32 {
        self.twice_l
    }

    pub fn dim(&self) -> usize {
        self.twice_l as usize + 1
    }

    /// `l(l+1)`
    pub fn casimir(&self) -> f64 {
        let l = self.l();
        l * (l + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    Fock(FockSpace),
    Spin(SpinRep),
    /// Anything else, e.g. a block cut out of a larger space.
    Plain(usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Fock(s) => s.total_dim(),
            Basis::Spin(r) => r.dim(),
            Basis::Plain(d) => *d,
        }
    }
}

/// Dense complex operator on a labeled finite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: CMatrix,
    basis: Basis,
}

impl OperatorMatrix {
    pub fn new(mat: CMatrix, basis: Basis) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        if mat.nrows() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: mat.nrows() });
        }
        if mat.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("operator has non-finite entries".into()));
        }
        Ok(OperatorMatrix { mat, basis })
    }

    pub fn plain(mat: CMatrix) -> Result<Self> {
        let d = mat.nrows();
        Self::new(mat, Basis::Plain(d))
    }

    pub(crate) fn from_parts(mat: CMatrix, basis: Basis) -> Self {
        debug_assert_eq!(mat.nrows(), basis.dim());
        OperatorMatrix { mat, basis }
    }

    pub fn identity(basis: Basis) -> Self {
        let d = basis.dim();
        OperatorMatrix { mat: CMatrix::identity(d, d), basis }
    }

    pub fn zeros(basis: Basis) -> Self {
        let d = basis.dim();
        OperatorMatrix { mat: CMatrix::zeros(d, d), basis }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    fn check_dim(&self, other: &OperatorMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix { mat: self.mat.adjoint(), basis: self.basis.clone() }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_dim(other)?;
        Ok(OperatorMatrix { mat: &self.mat + &other.mat, basis: self.basis.clone() })
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_dim(other)?;
        Ok(OperatorMatrix { mat: &self.mat - &other.mat, basis: self.basis.clone() })
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_dim(other)?;
        Ok(OperatorMatrix { mat: linalg::matmul(&self.mat, &other.mat), basis: self.basis.clone() })
    }

    pub fn scale(&self, c: C64) -> OperatorMatrix {
        OperatorMatrix { mat: &self.mat * c, basis: self.basis.clone() }
    }

    pub fn scale_real(&self, c: f64) -> OperatorMatrix {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_error(&self.mat) <= tol
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok(linalg::max_abs_diff(&self.mat, &other.mat))
    }

    /// Largest entry difference restricted to rows and columns in `indices`.
    pub fn max_abs_diff_on(&self, other: &OperatorMatrix, indices: &[usize]) -> Result<f64> {
        self.check_dim(other)?;
        let mut worst = 0.0_f64;
        for &j in indices {
            for &i in indices {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(worst)
    }

    /// Block of rows and columns `indices`, as a plain operator.
    pub fn restrict(&self, indices: &[usize]) -> OperatorMatrix {
        let n = indices.len();
        let mat = DMatrix::from_fn(n, n, |i, j| self.mat[(indices[i], indices[j])]);
        OperatorMatrix { mat, basis: Basis::Plain(n) }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.mat)
    }

    /// Rows `row, col, re, im` for every entry.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["row", "col", "re", "im"]);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let v = self.mat[(i, j)];
                t.push(vec![i.to_string(), j.to_string(), fmt_num(v.re), fmt_num(v.im)]);
            }
        }
        t
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_table().write(out)
    }
}

/// `AB − BA`
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `AB + BA`
pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.mul(b)?.add(&b.mul(a)?)
}

/// Embeds a single-mode operator at position `mode` of `space`, padding the
/// other modes with identities.
pub fn tensor_embed(op: &OperatorMatrix, mode: usize, space: &FockSpace) -> Result<OperatorMatrix> {
    if mode >= space.mode_count() {
        return Err(Error::BadMode { mode, mode_count: space.mode_count() });
    }
    let d = space.mode_dims()[mode];
    if op.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
    }
    let mut mat = CMatrix::identity(1, 1);
    for (alpha, &dim) in space.mode_dims().iter().enumerate() {
        let factor = if alpha == mode { op.mat.clone() } else { CMatrix::identity(dim, dim) };
        mat = linalg::kron(&mat, &factor);
    }
    Ok(OperatorMatrix { mat, basis: Basis::Fock(space.clone()) })
}

/// Average of the products over all orderings of `ops`.
pub fn symmetrize_product(ops: &[OperatorMatrix]) -> Result<OperatorMatrix> {
    use itertools::Itertools;

    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("symmetrize_product needs at least one operator".into()))?;
    for op in ops {
        first.check_dim(op)?;
    }
    if ops.len() > 8 {
        return Err(Error::DegreeTooHigh { degree: ops.len() as u32, max: 8 });
    }
    let mut acc = CMatrix::zeros(first.dim(), first.dim());
    let mut count = 0usize;
    for perm in (0..ops.len()).permutations(ops.len()) {
        let mut prod = ops[perm[0]].mat.clone();
        for &k in &perm[1..] {
            prod = linalg::matmul(&prod, &ops[k].mat);
        }
        acc += prod;
        count += 1;
    }
    Ok(OperatorMatrix { mat: acc / C64::new(count as f64, 0.0), basis: first.basis.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_indexing_round_trips() {
        let s = FockSpace::new(vec![3, 4]).unwrap();
        assert_eq!(s.total_dim(), 12);
        for i in 0..12 {
            assert_eq!(s.index(&s.levels(i)), i);
        }
        assert_eq!(s.levels(5), vec![1, 1]);
        assert!(FockSpace::new(vec![1]).is_err());
        assert_eq!(s.safe_indices(1).len(), 2 * 3);
    }

    #[test]
    fn spin_rep_validation() {
        assert_eq!(SpinRep::new(2.5).unwrap().dim(), 6);
        assert!(SpinRep::new(0.3).is_err());
        assert!(SpinRep::new(-1.0).is_err());
    }

    #[test]
    fn operator_dim_checks() {
        let a = OperatorMatrix::identity(Basis::Plain(2));
        let b = OperatorMatrix::identity(Basis::Plain(3));
        assert!(matches!(commutator(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(OperatorMatrix::new(CMatrix::zeros(2, 2), Basis::Plain(3)).is_err());
        assert!(symmetrize_product(&[a, b]).is_err());
    }

    #[test]
    fn symmetrize_single_and_commuting() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let e = d.map(|v| v * v);
        let a = OperatorMatrix::plain(d).unwrap();
        let b = OperatorMatrix::plain(e).unwrap();
        assert_eq!(symmetrize_product(&[a.clone()]).unwrap(), a);
        let s = symmetrize_product(&[a.clone(), b.clone()]).unwrap();
        assert!(s.max_abs_diff(&a.mul(&b).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn csv_dump_has_one_row_per_entry() {
        let a = OperatorMatrix::identity(Basis::Plain(2));
        let csv = a.to_table().to_csv_string().unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("row,col,re,im\r\n0,0,1.0000000000000000e0,0.0000000000000000e0"));
    }
}
