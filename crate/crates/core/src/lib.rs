//! Persistent homology of point clouds, kernels on persistence diagrams and
//! kernel SVM classification on top of them.

pub mod diagram;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod persistence;
pub mod svm;
pub mod vspk;

pub use error::{Error, Result};

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/persistence.md")]
    mod persistence {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    mod scaling {}
    #[doc = include_str!("../../../book/src/svm.md")]
    mod svm {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
