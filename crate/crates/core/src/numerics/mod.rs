//! Generic numerical building blocks shared by the physics modules.

pub mod banded;
pub mod fit;
pub mod ode;
pub mod quad;
pub mod roots;
