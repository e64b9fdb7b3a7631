//! Complementary decompositions of `M_p (x) M_p` into MASAs and factors,
//! the mutually unbiased bases they induce, and certificates of strong
//! unextendibility.
//!
//! The exact layer ([`residue`], [`subalgebra`], [`constructions`]) works
//! with planes of `Z_p^4`; the numeric layer ([`weyl`], [`mub`]) realizes
//! them as dense complex matrices and serves as an independent oracle.

pub mod certify;
pub mod constructions;
pub mod error;
pub mod io;
pub mod mub;
pub mod residue;
pub mod subalgebra;
pub mod weyl;

pub use error::{Error, Result};
pub use residue::{Gl2Matrix, Prime, ResidueScalar, Subspace2, Vec4};
pub use subalgebra::{SubalgebraDesc, SubalgebraKind};
