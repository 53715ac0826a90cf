//! Combining binary-input classical-quantum channels: exact entropies of the
//! combined channels, duality, entropy bounds and polarization.

pub mod bounds;
pub mod channels;
pub mod combine;
pub mod duality;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod polar;

pub use channels::{channel_entropy, symmetric_capacity, CqChannel, JointCqState, PriorMode};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix};
