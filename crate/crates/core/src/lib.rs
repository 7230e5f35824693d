//! Regulated inverse-square potential: spectra, renormalization-group flow,
//! propagator scaling laws, scattering phases and two classical
//! correspondences (Brownian paths and a 1D chain).
//!
//! Units: hbar = 1 and hbar^2/2m = 1, so H = -d^2/dx^2 + V and energies carry
//! units of 1/length^2. The regulator width is `b * x0`.

pub mod classical;
pub mod error;
pub mod model;
pub mod numerics;
pub mod propagator;
pub mod rgflow;
pub mod scattering;
pub mod specfun;
pub mod spectrum;

pub use classical::{
    ChainBoundary, ChainGrid, ChainPhase, ChainSpec, FreeEnergyResult, McEstimate, PathEnsembleSpec, PathPotential,
};
pub use error::{Error, Result};
pub use model::{
    derived_constants, fixed_points, gamma_of_g, GammaCoupling, ModelParams, Mode, Profile, Regulator, RegulatorKind,
};
pub use propagator::{Normalization, PropagatorSample, ScalingFunctionTable, Sign};
pub use rgflow::{Contour, ContourPoint, FixedPointInfo, FlowState, LimitCycleState};
pub use scattering::{PhaseCurve, PhaseShift, ReflectionAmplitude};
pub use spectrum::{BoundState, ContinuumState, CriticalFit};
