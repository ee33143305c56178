//! Operators from classical functions: `z → â`, `z* → â⁺` on truncated Fock
//! spaces, and the angular-momentum representation.

mod operator;
mod spin;

use std::collections::HashMap;

use itertools::Itertools;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::observables::Polynomial;

pub use operator::{
    anticommutator, commutator, symmetrize_product, tensor_embed, Basis, FockSpace, OperatorMatrix, SpinRep,
};
pub use spin::{quantize_spin, schwinger_spin, spin_operators, SpinOperators};

/// Highest monomial degree accepted by the quantization maps.
pub const MAX_QUANTIZE_DEGREE: u32 = 8;

/// How products of `â` and `â⁺` coming from one monomial are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorOrdering {
    /// Average over all distinct interleavings (symmetric ordering).
    #[default]
    Weyl,
    /// All `â⁺` to the left of all `â`.
    Normal,
}

pub fn annihilation(dim: usize) -> Result<OperatorMatrix> {
    let space = FockSpace::single(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(OperatorMatrix::from_parts(m, Basis::Fock(space)))
}

pub fn creation(dim: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(dim)?.adjoint())
}

pub fn number(dim: usize) -> Result<OperatorMatrix> {
    let space = FockSpace::single(dim)?;
    let m = CMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    Ok(OperatorMatrix::from_parts(m, Basis::Fock(space)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Lower,
    Raise,
}

/// A single-mode ordered word acts as `|n⟩ ↦ weight[n] |n + shift⟩`.
#[derive(Debug, Clone)]
struct ModeFactor {
    shift: i64,
    weights: Vec<f64>,
}

/// Applies `word` (leftmost operator acts last) to every level of a
/// `dim`-level ladder, with the truncated matrices' semantics.
fn word_weights(word: &[Ladder], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|n| {
            let mut level = n;
            let mut w = 1.0;
            for op in word.iter().rev() {
                match op {
                    Ladder::Lower => {
                        if level == 0 {
                            return 0.0;
                        }
                        w *= (level as f64).sqrt();
                        level -= 1;
                    }
                    Ladder::Raise => {
                        if level + 1 >= dim {
                            return 0.0;
                        }
                        w *= ((level + 1) as f64).sqrt();
                        level += 1;
                    }
                }
            }
            w
        })
        .collect()
}

fn mode_factor(z_pow: u32, zc_pow: u32, dim: usize, ordering: OperatorOrdering) -> ModeFactor {
    let (k, l) = (z_pow as usize, zc_pow as usize);
    let shift = l as i64 - k as i64;
    let weights = match ordering {
        OperatorOrdering::Normal => {
            let word: Vec<Ladder> = std::iter::repeat(Ladder::Raise)
                .take(l)
                .chain(std::iter::repeat(Ladder::Lower).take(k))
                .collect();
            word_weights(&word, dim)
        }
        OperatorOrdering::Weyl => {
            let mut acc = vec![0.0; dim];
            let mut count = 0usize;
            for raise_at in (0..k + l).combinations(l) {
                let mut word = vec![Ladder::Lower; k + l];
                for p in raise_at {
                    word[p] = Ladder::Raise;
                }
                for (a, w) in acc.iter_mut().zip(word_weights(&word, dim)) {
                    *a += w;
                }
                count += 1;
            }
            acc.iter().map(|a| a / count as f64).collect()
        }
    };
    ModeFactor { shift, weights }
}

/// Replaces `z_α → â_α`, `z*_α → â⁺_α` with the chosen ordering within each
/// mode. Distinct modes commute, so multi-mode monomials are tensor products
/// of the per-mode words.
pub fn quantize(p: &Polynomial, space: &FockSpace, ordering: OperatorOrdering) -> Result<OperatorMatrix> {
    if p.mode_count() != space.mode_count() {
        return Err(Error::ModeMismatch { left: p.mode_count(), right: space.mode_count() });
    }
    let dim = space.total_dim();
    let mut mat = CMatrix::zeros(dim, dim);
    let mut cache: HashMap<(u32, u32, usize), ModeFactor> = HashMap::new();
    let column_levels: Vec<Vec<usize>> = (0..dim).map(|i| space.levels(i)).collect();

    for (m, c) in p.terms() {
        if m.degree() > MAX_QUANTIZE_DEGREE {
            return Err(Error::DegreeTooHigh { degree: m.degree(), max: MAX_QUANTIZE_DEGREE });
        }
        let factors: Vec<ModeFactor> = m
            .pairs()
            .zip(space.mode_dims())
            .map(|((k, l), &d)| {
                cache
                    .entry((k, l, d))
                    .or_insert_with(|| mode_factor(k, l, d, ordering))
                    .clone()
            })
            .collect();
        'columns: for (col, levels) in column_levels.iter().enumerate() {
            let mut w = *c;
            let mut target = Vec::with_capacity(levels.len());
            for (f, &n) in factors.iter().zip(levels) {
                let weight = f.weights[n];
                if weight == 0.0 {
                    continue 'columns;
                }
                w *= weight;
                target.push((n as i64 + f.shift) as usize);
            }
            mat[(space.index(&target), col)] += w;
        }
    }
    Ok(OperatorMatrix::from_parts(mat, Basis::Fock(space.clone())))
}

/// Symmetric (Weyl) quantization.
pub fn weyl_quantize(p: &Polynomial, space: &FockSpace) -> Result<OperatorMatrix> {
    quantize(p, space, OperatorOrdering::Weyl)
}

/// Normal-ordered quantization (`â⁺` powers to the left).
pub fn normal_quantize(p: &Polynomial, space: &FockSpace) -> Result<OperatorMatrix> {
    quantize(p, space, OperatorOrdering::Normal)
}
