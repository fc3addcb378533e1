//! Classification of non-Hermitian band degeneracies (diabolic points,
//! exceptional points and fragmented exceptional points) from the ranks of
//! the modes of the adjugate matrix, with the Lieb-lattice and higher-order
//! Dirac semimetal model families.

pub mod adjugate;
pub mod classify;
pub mod error;
pub mod matkit;
pub mod models;
pub mod probes;
pub mod scan;
pub mod selftest;
pub mod testgen;

pub use adjugate::{flv_modes, flv_modes_forced, greens_modal, response_strengths, ModeSequence, ResponseStrengths};
pub use classify::{
    algebraic_multiplicity, classify_point, classify_point_with, partial_multiplicities, weyr_oracle,
    DegeneracyReport, Label, PartialMultiplicityFunction, Route,
};
pub use error::{Error, Result};
pub use matkit::{eig, numerical_rank, spectral_norm, ComplexMatrix, EigenDecomposition, TolerancePolicy, C64};
pub use models::{Corner, HingeGeometry, HodsmSpec, LiebSpec, ModelSpec};
