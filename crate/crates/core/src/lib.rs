//! Finite directed multigraphs as C*-correspondences: KMS states at the
//! critical inverse temperature, the graph-algebra monomial calculus and
//! quantum automorphism groups.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod correspondence;
pub mod error;
pub mod graph;
pub mod io;
pub mod kms;
pub mod linalg;
pub mod par;
pub mod quantum;

pub use error::{Error, Result};
pub use graph::{classical_automorphisms, structural_report, Graph, GraphAutomorphism, Shape, StructuralReport};
pub use kms::{kms_profile, KmsProfile};
pub use par::Exec;
