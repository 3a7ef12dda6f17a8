//! Power-series solutions of singular linear differential and
//! q-difference systems `x^k delta(F) = A sigma(F) + C mod x^N` over a prime
//! field.
//!
//! Three engines compute generators of the solution space:
//!
//! * [`oracle::dense_solve`]: Gauss-Jordan on the `nN`-dimensional linear
//!   system, no assumptions, quadratic or worse;
//! * [`dac::dac_solve`]: divide and conquer with placeholder parameters at
//!   singular indices;
//! * [`newton::newton_solve`]: Newton iteration on the associated equation,
//!   valid under the good-spectrum condition.
//!
//! [`oracle::spaces_equal`] compares their outputs as affine spaces.

pub mod dac;
pub mod error;
pub mod field;
pub mod format;
pub mod linalg;
pub mod newton;
pub mod opcount;
pub mod oracle;
pub mod polymat;
pub mod series;
pub mod solution;
pub mod spectrum;
pub mod upoly;

pub mod bench;
pub mod cli;

pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField};
pub use linalg::{AffineSolution, Matrix};
pub use oracle::ProblemInstance;
pub use polymat::SeriesMatrix;
pub use series::{QContext, Series};
pub use solution::SolutionSpace;
