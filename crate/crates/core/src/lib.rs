//! Numerical Bäcklund transformations of Peterson deformations of quadrics.
//!
//! The crate solves the four totally real sine-Gordon-family equations with
//! their Bäcklund/permutability structure, integrates the attached completely
//! integrable linear systems on confocal quadrics, realizes the transformed
//! surfaces as meshes, and verifies the analytic identities of the theory as
//! numerical residuals.
//!
//! Modules follow the pipeline:
//! - [`sg`]: the scalar equations, solitons, Bäcklund and superposition ops;
//! - [`quadric`]: confocal quadric parametrizations and their invariants;
//! - [`linsys`]: the (α, β, λ, μ) linear systems with prime-integral control;
//! - [`peterson`]: closed-form Peterson deformation seeds;
//! - [`transform`]: the algebraic Bäcklund transform of states and the space
//!   realization of leaves;
//! - [`pendulum`]: the degenerate 0-soliton model and its transform;
//! - [`verify`]: the acceptance checks behind `backlund verify`.

pub mod config;
pub mod error;
pub mod field;
pub mod interp;
pub mod io;
pub mod linsys;
pub mod mesh;
pub mod pendulum;
pub mod peterson;
pub mod quadric;
pub mod report;
pub mod sg;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
