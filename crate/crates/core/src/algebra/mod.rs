//! The graph algebra: monomials `S_μ S_ν*`, coefficient rings, the critical
//! KMS state and the torus coaction demo.

pub mod element;
pub mod nonlinear;
pub mod ring;
pub mod state;

pub use element::{monomials_up_to, paths_up_to, AlgebraElement, Monomial, Path};
pub use nonlinear::{nonlinear_coaction_demo, NonlinearReport};
pub use ring::{Coefficient, Laurent, MatrixCoeff};
pub use state::{kms_condition_check, kms_oracle_sweep, slice_state, state_eval, KmsSweep};
