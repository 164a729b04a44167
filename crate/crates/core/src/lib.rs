//! Finite quantum groupoids built from finite groupoids and match pairs of
//! groupoids, with every structural identity checked as finite-dimensional
//! linear algebra.
//!
//! The pipeline runs bottom-up: [`groupoid`] tables feed the
//! multiplicative partial isometries of [`mpi`], whose leg algebras carry
//! the weak Hopf structures of [`wha`]; [`action`] covers groupoid actions,
//! crossed products and the match-pair structure maps.

pub mod action;
pub mod groupoid;
pub mod instances;
pub mod io;
pub mod linop;
pub mod mpi;
pub mod report;
pub mod staralg;
pub mod wha;

pub use groupoid::{Groupoid, GroupoidDesc, GroupoidError, MatchPair};
pub use linop::{Mat, C64, TOL};
pub use mpi::Mpi;
pub use report::{Check, Report};
pub use staralg::{BaseRep, FdAlgebra, StarSubspace};
pub use wha::{Side, WeakHopf};
pub use action::{BlockAlgebra, CrossedProduct, GroupoidAction, VNModule};
