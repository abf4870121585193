//! Weighted harmonic analysis with the Bessel operator.

pub mod audit;
pub mod besselops;
pub mod error;
pub mod exact;
pub mod fbt;
pub mod field;
pub mod kernels;
pub mod quadrature;
pub mod shiftconv;
pub mod specfun;

pub use error::{Error, Result};
pub use exact::ExactConst;
pub use fbt::PowerLaw;
pub use field::{DecayClass, GaussPoly, GaussTerm, PlaneWave, PositivePoint, ScalarField};
pub use kernels::{KernelFamily, KernelSpec, SignatureSplit};
pub use quadrature::{QuadSpec, WeightVector};
