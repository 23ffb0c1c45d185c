//! Analog phase estimation with single-mode cavity readout.
//!
//! A cavity prepared in a squeezed coherent state is coupled dispersively to
//! a multi-qubit target register through `n̂ ⊗ H_target`. Each eigenenergy
//! `E_j` of the target rotates the cavity state by `−E_j t` in phase space;
//! the rotations are read back from the Wigner function along a circle.
//!
//! Every numerical module is generic over the scalar type ([`Real`]); the
//! aliases below fix it to `f64`, which is what the command-line harness uses.
//! Internal units: ħ = 1, energies in rad/s, times in seconds.

// `!(x > 0.0)` style checks reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod hamiltonians;
pub mod linalg;
pub mod qstates;
pub mod scalar;
pub mod tomography;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Cavity frequency used by presets when none is given (Hz).
pub const DEFAULT_CAVITY_HZ: f64 = 5.0e9;

pub type Complex64 = C<f64>;
pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type StateVector = linalg::StateVector<f64>;
pub type HermitianEigen = linalg::HermitianEigen<f64>;
pub type SqueezedCoherentSpec = qstates::SqueezedCoherentSpec<f64>;
pub type QubitRegisterState = qstates::QubitRegisterState<f64>;
pub type XYGraph = hamiltonians::XYGraph<f64>;
pub type PhysicalLayout = hamiltonians::PhysicalLayout<f64>;
pub type EngineeredCoeffs = hamiltonians::EngineeredCoeffs<f64>;
pub type EvolutionTrace = evolution::EvolutionTrace<f64>;
pub type SpectrumPopulations = evolution::SpectrumPopulations<f64>;
pub type WignerGrid = tomography::WignerGrid<f64>;
pub type AngularProfile = tomography::AngularProfile<f64>;
pub type SpectralEstimate = tomography::SpectralEstimate<f64>;

pub use linalg::CompositeSpace;
pub use qstates::FockTruncation;
