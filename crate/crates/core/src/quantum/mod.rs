//! Quantum automorphism groups of graphs: presentations, matrix
//! realizations and the coactions they induce.

pub mod coaction;
pub mod kac;
pub mod magic;
pub mod presentation;

pub use coaction::{build_coactions, state_equivariance_check, verify_equivariance, CoactionMatrices};
pub use kac::{kac_witness, kac_witness_blocks, KacReport};
pub use magic::{verify_magic, wreath_classical, MagicReport, MagicUnitary, RELATION_TOL};
pub use presentation::{
    coincidence_verdict, emit_banica, emit_bichon, emit_wreath, Label, Presentation, RelationClass,
};
