//! The exterior algebra on `x_0..x_r` and finite-dimensional graded left
//! modules over it.
//!
//! Degree conventions: `x_i` raises degree by one, `(M[s])_d = M_{d+s}`, and
//! the free module `Λ[-g]` has its generator in degree `g`.

mod algebra;
mod decomp;
mod hom;
mod map;
mod module;
mod subspace;

pub use algebra::{Algebra, FreeModule};
pub(crate) use decomp::random_combination;
pub use decomp::{decompose, find_isomorphism, is_indecomposable, is_isomorphic, radical_basis, Summand, Verdict};
pub use hom::{end_algebra, hom_space, hom_space_with, star, star_map, EndAlgebra, Presentation};
pub use map::ModuleMap;
pub use module::{direct_sum_all, GradedModule, Validation, Violation};
pub use subspace::GradedSubspace;

/// Default seed for randomized verdicts.
pub const DEFAULT_SEED: u64 = 0;
/// Default number of random trials for isomorphism and idempotent search.
pub const DEFAULT_TRIALS: usize = 20;
