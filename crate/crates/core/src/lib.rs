//! Block-transitive 2-(36,6,λ) designs admitting PSL(2,8) ≤ G ≤ PΓL(2,8),
//! built from permutation-group primitives, plus an arithmetic sieve over
//! the point actions of PSL(2,q) for designs with `v = k²` points.

pub mod cli;
pub mod design;
pub mod grouplib;
pub mod isomorph;
pub mod permcore;
pub mod sieve;
