use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, C64};
use crate::models::hinge::HingeGeometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryKind {
    ChiralLieb,
    ChiralDsm,
    RotationC4,
    GeneralizedReflection,
    SublatticeGauge,
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryKind::ChiralLieb => "chiral-lieb",
            SymmetryKind::ChiralDsm => "chiral-dsm",
            SymmetryKind::RotationC4 => "rotation-c4",
            SymmetryKind::GeneralizedReflection => "generalized-reflection",
            SymmetryKind::SublatticeGauge => "sublattice-gauge",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryOp {
    pub kind: SymmetryKind,
    pub matrix: ComplexMatrix,
}

fn diag(d: &[f64]) -> ComplexMatrix {
    let n = d.len();
    ComplexMatrix::from_mat_unchecked(Mat::from_fn(n, n, |i, j| {
        C64::new(if i == j { d[i] } else { 0.0 }, 0.0)
    }))
}

/// `diag(1, −1, 1)`: anticommutes with every Lieb Bloch matrix.
pub fn chiral_lieb() -> SymmetryOp {
    SymmetryOp {
        kind: SymmetryKind::ChiralLieb,
        matrix: diag(&[1.0, -1.0, 1.0]),
    }
}

/// `diag(1, 1, −1, −1)` for a single cell.
pub fn chiral_dsm() -> SymmetryOp {
    SymmetryOp {
        kind: SymmetryKind::ChiralDsm,
        matrix: diag(&[1.0, 1.0, -1.0, -1.0]),
    }
}

/// Chiral operator of the open system, one `diag(1, 1, −1, −1)` per cell.
pub fn chiral_dsm_open(geom: &HingeGeometry) -> SymmetryOp {
    let d: Vec<f64> = (0..geom.dim())
        .map(|i| if i % 4 < 2 { 1.0 } else { -1.0 })
        .collect();
    SymmetryOp {
        kind: SymmetryKind::ChiralDsm,
        matrix: diag(&d),
    }
}

/// `C4 = [[0, I], [iσ_y, 0]]`, with `C4·H(kx, ky, kz)·C4⁻¹ = H(ky, −kx, kz)`
/// in the Hermitian model and `C4⁴ = −I`.
pub fn rotation_c4() -> SymmetryOp {
    let mut m = Mat::<C64>::zeros(4, 4);
    m[(0, 2)] = C64::new(1.0, 0.0);
    m[(1, 3)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(-1.0, 0.0);
    m[(3, 0)] = C64::new(1.0, 0.0);
    SymmetryOp {
        kind: SymmetryKind::RotationC4,
        matrix: ComplexMatrix::from_mat_unchecked(m),
    }
}

/// `Z_C`: sign flip on every C site of the open system.
pub fn sublattice_gauge(geom: &HingeGeometry) -> SymmetryOp {
    let d: Vec<f64> = (0..geom.dim())
        .map(|i| if i % 4 == 2 { -1.0 } else { 1.0 })
        .collect();
    SymmetryOp {
        kind: SymmetryKind::SublatticeGauge,
        matrix: diag(&d),
    }
}

/// `Z_C·R_a`: reflection about the antidiagonal, `(x, y) → (N−1−y, N−1−x)`
/// with A and B exchanged, followed by the C-sublattice sign flip. Requires
/// a square geometry.
pub fn generalized_reflection(geom: &HingeGeometry) -> Result<SymmetryOp> {
    geom.validate()?;
    if geom.nx != geom.ny {
        return Err(Error::Inapplicable(
            "generalized reflection on a non-square geometry".into(),
        ));
    }
    let n = geom.nx;
    let dim = geom.dim();
    let mut m = Mat::<C64>::zeros(dim, dim);
    let target = [(1usize, 1.0), (0, 1.0), (2, -1.0), (3, 1.0)];
    for x in 0..n {
        for y in 0..n {
            for (a, &(b, sign)) in target.iter().enumerate() {
                let from = geom.site(x, y, a);
                let to = geom.site(n - 1 - y, n - 1 - x, b);
                m[(to, from)] = C64::new(sign, 0.0);
            }
        }
    }
    Ok(SymmetryOp {
        kind: SymmetryKind::GeneralizedReflection,
        matrix: ComplexMatrix::from_mat_unchecked(m),
    })
}
