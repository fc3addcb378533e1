//! Lattice model catalog.

pub mod hinge;
pub mod hodsm;
pub mod lieb;
pub mod symmetry;

pub use hinge::{hinge_hamiltonian, intracell, Corner, HingeGeometry};
pub use hodsm::{h_addition, hodsm_bloch, hodsm_closed_dispersion, HodsmSpec};
pub use lieb::{lieb_bloch, lieb_case, lieb_from_pqrs, two_arccot, LiebCase, LiebCaseReport, LiebSpec};
pub use symmetry::{SymmetryKind, SymmetryOp};

use crate::error::{Error, Result};
use crate::matkit::ComplexMatrix;

/// Any Bloch model, addressed by its identifier.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    Lieb(LiebSpec),
    Hodsm(HodsmSpec),
}

impl ModelSpec {
    pub fn id(&self) -> String {
        match self {
            ModelSpec::Lieb(l) => l.id().to_string(),
            ModelSpec::Hodsm(h) => h.id(),
        }
    }

    /// Momentum-space dimension: 2 for Lieb, 3 for HODSM.
    pub fn k_dims(&self) -> usize {
        match self {
            ModelSpec::Lieb(_) => 2,
            ModelSpec::Hodsm(_) => 3,
        }
    }

    /// Nullity of `H(k)` at a generic momentum: the Lieb flat band
    /// contributes one zero mode everywhere.
    pub fn generic_nullity(&self) -> usize {
        match self {
            ModelSpec::Lieb(_) => 1,
            ModelSpec::Hodsm(_) => 0,
        }
    }

    /// Bloch matrix at `k`; the slice length must match [`Self::k_dims`].
    pub fn bloch(&self, k: &[f64]) -> Result<ComplexMatrix> {
        if k.len() != self.k_dims() {
            return Err(Error::InvalidInput(format!(
                "{} expects {} momentum components, got {}",
                self.id(),
                self.k_dims(),
                k.len()
            )));
        }
        match self {
            ModelSpec::Lieb(l) => lieb_bloch(l, [k[0], k[1]]),
            ModelSpec::Hodsm(h) => hodsm_bloch(h, [k[0], k[1], k[2]]),
        }
    }
}

impl From<LiebSpec> for ModelSpec {
    fn from(l: LiebSpec) -> Self {
        ModelSpec::Lieb(l)
    }
}

impl From<HodsmSpec> for ModelSpec {
    fn from(h: HodsmSpec) -> Self {
        ModelSpec::Hodsm(h)
    }
}
