//! Open-boundary hinge Hamiltonian on an `nx × ny` array of unit cells.
//!
//! Cell `(x, y)` has index `x·ny + y`; within a cell the sites are ordered
//! A, B, C, D, so site `a` of cell `(x, y)` sits at row `4·(x·ny + y) + a`.

use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, C64};
use crate::models::hodsm::{h_addition, HodsmSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HingeGeometry {
    pub nx: usize,
    pub ny: usize,
    pub kz: f64,
}

impl HingeGeometry {
    pub fn square(n: usize, kz: f64) -> Self {
        Self { nx: n, ny: n, kz }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidInput("nx and ny must be positive".into()));
        }
        if !self.kz.is_finite() {
            return Err(Error::InvalidInput("non-finite kz".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        4 * self.nx * self.ny
    }

    pub fn cell(&self, x: usize, y: usize) -> usize {
        x * self.ny + y
    }

    pub fn site(&self, x: usize, y: usize, sublattice: usize) -> usize {
        4 * self.cell(x, y) + sublattice
    }

    /// Cell hosting the given corner.
    pub fn corner_cell(&self, corner: Corner) -> (usize, usize) {
        match corner {
            Corner::A => (self.nx - 1, self.ny - 1),
            Corner::B => (0, 0),
            Corner::C => (0, self.ny - 1),
            Corner::D => (self.nx - 1, 0),
        }
    }
}

/// Corners of the open system, named after the sublattice that terminates
/// there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corner {
    A,
    B,
    C,
    D,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::A, Corner::B, Corner::C, Corner::D];

    pub fn sublattice(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["A", "B", "C", "D"][*self as usize])
    }
}

fn real(rows: [[f64; 4]; 4]) -> Mat<C64> {
    Mat::from_fn(4, 4, |i, j| C64::new(rows[i][j], 0.0))
}

/// Reduced intracell block `(t + (s/2)·cos kz)·M + h`.
pub fn intracell(spec: &HodsmSpec, kz: f64) -> Result<ComplexMatrix> {
    spec.validate()?;
    let m = real([
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, -1.0, 1.0],
        [1.0, -1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
    ]);
    let f = spec.t + 0.5 * spec.s * kz.cos();
    let base = ComplexMatrix::from_mat(Mat::from_fn(4, 4, |i, j| m[(i, j)] * f))?;
    Ok(&base + &h_addition(spec.variant, spec.eps())?)
}

/// Hopping block from cell `(x, y)` to `(x+1, y)`.
pub fn hop_x(spec: &HodsmSpec) -> ComplexMatrix {
    let s = spec.s;
    let mut r = [[0.0; 4]; 4];
    r[0][2] = s;
    r[3][1] = s;
    ComplexMatrix::from_mat_unchecked(real(r))
}

/// Hopping block from cell `(x, y)` to `(x, y+1)`.
pub fn hop_y(spec: &HodsmSpec) -> ComplexMatrix {
    let s = spec.s;
    let mut r = [[0.0; 4]; 4];
    r[0][3] = s;
    r[2][1] = -s;
    ComplexMatrix::from_mat_unchecked(real(r))
}

pub fn hinge_hamiltonian(spec: &HodsmSpec, geom: &HingeGeometry) -> Result<ComplexMatrix> {
    geom.validate()?;
    let h0 = intracell(spec, geom.kz)?;
    let sx = hop_x(spec);
    let sy = hop_y(spec);
    let n = geom.dim();
    let mut m = Mat::<C64>::zeros(n, n);
    let mut put = |i: usize, j: usize, b: &ComplexMatrix, transpose: bool| {
        for a in 0..4 {
            for c in 0..4 {
                m[(4 * i + a, 4 * j + c)] = if transpose { b[(c, a)] } else { b[(a, c)] };
            }
        }
    };
    for x in 0..geom.nx {
        for y in 0..geom.ny {
            let i = geom.cell(x, y);
            put(i, i, &h0, false);
            if x + 1 < geom.nx {
                let j = geom.cell(x + 1, y);
                put(i, j, &sx, false);
                put(j, i, &sx, true);
            }
            if y + 1 < geom.ny {
                let j = geom.cell(x, y + 1);
                put(i, j, &sy, false);
                put(j, i, &sy, true);
            }
        }
    }
    ComplexMatrix::from_mat(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_intracell_block() {
        let spec = HodsmSpec::standard(3, 0.5);
        let g = HingeGeometry::square(1, 0.4);
        let h = hinge_hamiltonian(&spec, &g).unwrap();
        assert_eq!(h, intracell(&spec, 0.4).unwrap());
    }

    #[test]
    fn atomistic_corners_decouple() {
        let spec = HodsmSpec::new(0, -0.5, 1.0, 0.0).unwrap();
        let g = HingeGeometry::square(3, 0.0);
        let h = hinge_hamiltonian(&spec, &g).unwrap();
        for corner in Corner::ALL {
            let (x, y) = g.corner_cell(corner);
            let site = g.site(x, y, corner.sublattice());
            for j in 0..g.dim() {
                assert_eq!(h[(site, j)].norm(), 0.0);
                assert_eq!(h[(j, site)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn hermitian_only_for_variant_zero() {
        let g = HingeGeometry::square(3, 0.7);
        for v in 0..=4 {
            let h = hinge_hamiltonian(&HodsmSpec::standard(v, 0.3), &g).unwrap();
            assert_eq!(h.is_hermitian(0.0), v == 0, "variant {v}");
        }
    }

    #[test]
    fn rejects_empty_geometry() {
        let g = HingeGeometry {
            nx: 0,
            ny: 2,
            kz: 0.0,
        };
        assert!(hinge_hamiltonian(&HodsmSpec::standard(0, 0.0), &g).is_err());
    }
}
