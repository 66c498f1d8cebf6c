//! Non-uniform hyperbolicity for shear-composed torus endomorphisms.

pub mod certificate;
pub mod combinatorics;
pub mod config;
pub mod curves;
pub mod cone;
pub mod error;
pub mod exact;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod lyapunov;
pub mod map;
pub mod profile;
pub mod report;
pub mod triple;

pub use certificate::{Certificate, Verdict, Witness};
pub use error::{Error, Result};
pub use lattice::IntegerMatrix2;
pub use profile::ShearProfile;
pub use map::{DeltaMode, MapSpec, TorusPoint};
