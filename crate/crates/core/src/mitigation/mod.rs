//! Error mitigation: CZ folding, Pauli twirling, zero-noise extrapolation
//! and readout correction.

pub mod fold;
pub mod readout;
pub mod twirl;
pub mod zne;

pub use fold::{fold, fold_to_lambda, FoldedCircuit};
pub use readout::{
    apply_readout_mitigation, estimate_calibration, exact_calibration, mitigated_z, CalibrationMatrix,
};
pub use twirl::{twirl, twirl_with, TwirledCircuit};
pub use zne::{zne_fit, FitKind, ZneFit, ZneOptions, ZneSeries};
