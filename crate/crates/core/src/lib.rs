//! Near-critical percolation, N-frozen percolation and forest fires on the
//! triangular lattice, with the scale machinery used to predict avalanche sizes.

pub mod dynamics;
pub mod error;
pub mod impurities;
pub mod lattice;
pub mod measure;
pub mod percolation;
pub mod rng;
pub mod scales;
pub mod stats;
pub mod union_find;

pub use error::{LabError, Result};
pub use lattice::{Annulus, Ball, DenseRegion, Region, SiteCoord};
pub use percolation::{Color, Configuration, SiteState};
pub use rng::{Purpose, StreamKey};

/// `t_c = ln 2`, the time at which the birth density reaches `p_c = 1/2`.
pub const T_C: f64 = std::f64::consts::LN_2;

/// Occupation density `p(t) = 1 − e^{−t}` of the pure birth process.
pub fn p_of_t(t: f64) -> f64 {
    -(-t).exp_m1()
}

/// Inverse of [`p_of_t`].
pub fn t_of_p(p: f64) -> f64 {
    -(-p).ln_1p()
}
