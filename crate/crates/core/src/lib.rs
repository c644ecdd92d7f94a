//! Quasi-projective resolutions and dimension of complexes over graded
//! quotient algebras `R = F_p[x_1..x_n]/I`.

pub mod error;
pub mod classify;
pub mod complex;
pub mod gb;
pub mod gmod;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod qpd;
pub mod resolution;
pub mod ring;
pub mod suite;
pub mod vnr;

pub use error::{QpdError, Result};
