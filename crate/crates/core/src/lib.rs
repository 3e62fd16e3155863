//! Computational laboratory for ends of groups, splittings over finite
//! subgroups and first rational cohomology with permutation coefficients.

pub mod bass_serre;
pub mod catalog;
pub mod cayley;
pub mod ends;
pub mod error;
pub mod graph;
pub mod group;
pub mod level;
pub mod oracle;
pub mod presets;
pub mod qlinalg;
pub mod rewriting;
pub mod spec;
pub mod union_find;
pub mod witness;

pub use error::{Error, Result};
