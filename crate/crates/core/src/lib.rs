//! Exact homological algebra over the exterior algebra `Λ` on `r+1`
//! variables: minimal resolutions, Koszulness, cohomology of the associated
//! sheaves on projective `r`-space, local-freeness decisions, and almost split
//! sequences in the category of Koszul modules.

pub mod ar;
pub mod cli;
pub mod comb;
pub mod error;
pub mod gmod;
pub mod koszul;
pub mod linalg;
pub mod oracle;
pub mod resolve;
pub mod sheaf;

pub use error::{Error, Result};
