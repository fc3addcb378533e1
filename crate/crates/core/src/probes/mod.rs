//! Numerical experiments on top of the classifier: exponent laws,
//! open-boundary hinge states and symmetry checks.

pub mod exponents;
pub mod hinge;
pub mod symmetry;

pub use exponents::{fit_line, lineshape_exponent, splitting_exponent, ExponentFit, SplittingConfig};
pub use hinge::{
    atomistic_classify, decay_class, decay_rate_fit, expected_decay_ratio, hinge_report, AtomisticReport, Axis,
    DecayClass, DecayFit, DecayProfiler, HingeOptions, HingeReport,
};
pub use symmetry::{expected_to_hold, symmetry_check, CheckKind, SymmetryVerdict};
