//! Deterministic instance generators used by the verification suites and
//! the `corpus` CLI subcommand.

pub mod groups;
pub mod groupoids;
pub mod mutate;
pub mod presheaves;
pub mod pseudogroups;
pub mod spaces;
