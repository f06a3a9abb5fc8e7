//! Stack-sorting, uniquely sorted permutations, and bijections between
//! pattern classes and intervals of Catalan posets.

pub mod bijections;
pub mod dyck;
pub mod error;
pub mod gentree;
pub mod harness;
pub mod limits;
pub mod noncross;
pub mod perm;
pub mod series;
pub mod sliding;
pub mod stacksort;

pub use error::{Error, Result};
pub use limits::Limits;
pub use perm::{Pattern, Permutation, Symmetry};
