//! Fixtures shared by the kernel benchmarks.

use invsq::{ChainGrid, ModelParams, PathEnsembleSpec, Regulator};

/// alpha = -3/16: omega = 1/4, both fixed points inside the main mode.
pub fn params() -> ModelParams {
    invsq::derived_constants(-3.0 / 16.0).expect("valid alpha")
}

/// Square well just above g_-, bound with a shallow level.
pub fn bound_regulator(p: &ModelParams) -> Regulator {
    let (_, g_minus) = p.fixed_points().expect("fixed points");
    Regulator::square_well(1.0, g_minus + 0.05).expect("valid regulator")
}

/// Small Feynman–Kac ensemble against the model potential.
pub fn path_spec() -> PathEnsembleSpec {
    PathEnsembleSpec::new(0.8, 1.0, 1.0, 256, 2048, 7)
}

pub fn chain_grid() -> ChainGrid {
    ChainGrid::aligned(1.0, 0.05, 20.0).expect("aligned grid")
}
