//! Stationary scattering of plane waves off a graph with four tails.

mod dd;
mod lu;
mod momentum;
mod real;
mod system;

pub use dd::Dd;
pub use lu::{LuFactors, SingularMatrix};
pub use momentum::{Momentum, MomentumError};
pub use real::{from_c64, modulus, norm_sqr, to_c64, Real};
pub use system::{
    build_system, build_system_at, IncomingSolutions, ScatterError, ScatteringSolution, ScatteringSystem, Wave,
    DEFAULT_FLUX_TOL,
};
