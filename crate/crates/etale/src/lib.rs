//! Executable kernels for finite topological spaces, presheaves and sheaves
//! on them, pseudogroup-style categories of local maps, and topological
//! etale groupoids.
//!
//! Everything is finite and decidable: sheaf conditions are checked by
//! enumerating covers, stalks are attained at minimal open neighborhoods,
//! sheafification is a fixpoint closure inside a product of skyscrapers, and
//! the correspondence between etale groupoids and their categories of local
//! sections is verified by constructing explicit isomorphism witnesses in
//! both directions.

pub mod battery;
pub mod bitset;
pub mod budget;
pub mod corpus;
pub mod presheaf;
pub mod space;

pub use bitset::IndexSet;
pub use space::{
    enumerate_covers, CoverMode, OpenSet, Point, PointMap, Space, SpaceError,
};

pub mod groupoid;
pub mod io;
pub mod pseudogroup;
pub mod report;
pub mod sheafify;
