//! Exact computer algebra for free-field realizations of affine Kac-Moody
//! algebras of rank at most two: Wakimoto modules, screening operators, the
//! center at the critical level and opers with the Miura transformation.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod ope;
pub mod opers;
pub mod lie;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod scalar;
pub mod screening;
pub mod series;
pub mod wakimoto;

pub use error::{Error, Result};
pub use lie::{algebra, build_algebra, AlgebraType, FormLabel, InnerProduct, LieAlgebraData};
pub use ring::{Field, Ring};
pub use scalar::{q, qf, Scalar, Q};
