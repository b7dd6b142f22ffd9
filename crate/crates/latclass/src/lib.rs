//! Exact enumeration and classification of integral Euclidean lattices.
//!
//! The chapters of the book under `book/` are compiled in as the [`book`]
//! module, so their examples run as doctests.

pub mod classify;
pub mod error;
pub mod invariants;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod mod2;
pub mod residue;
pub mod rootsys;
pub mod shortvec;

pub use error::{Error, Result};
pub use lattice::{DualVector, Lattice, Q64};

pub mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    pub mod lattices {}
    #[doc = include_str!("../../../book/src/root-systems.md")]
    pub mod root_systems {}
    #[doc = include_str!("../../../book/src/residues.md")]
    pub mod residues {}
    #[doc = include_str!("../../../book/src/isometries.md")]
    pub mod isometries {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    pub mod invariants {}
    #[doc = include_str!("../../../book/src/unimodular.md")]
    pub mod unimodular {}
    #[doc = include_str!("../../../book/src/genera.md")]
    pub mod genera {}
    #[doc = include_str!("../../../book/src/exceptional.md")]
    pub mod exceptional {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
