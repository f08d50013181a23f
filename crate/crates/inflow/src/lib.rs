//! Steady incompressible Navier-Stokes flow in 2D channel domains with mixed
//! inflow/wall/outflow boundary conditions, solved by a fixed-point
//! (Picard) iteration over a factorized Stokes operator, plus variational
//! recovery of the inlet velocity profile from partial velocity
//! measurements.
//!
//! The crate is organized along the pipeline:
//!
//! - [`mesh`]: channel triangulations with tagged boundary (`in`/`wall`/`out`)
//! - [`space`]: Taylor-Hood dof layout, norms, boundary profiles and traces
//! - [`assembly`] / [`sparse`]: weak-form operators and the direct solver
//! - [`stokes`] / [`navier`]: the linear solution operator and the
//!   fixed-point nonlinear solver with contraction diagnostics
//! - [`cost`] / [`synthetic`] / [`assimilation`]: tracking functionals over
//!   three observation variants, twin-experiment data, and projected
//!   gradient descent with a discrete adjoint
//! - [`config`] / [`vtk`] / [`report`] / [`cli`]: experiment configuration,
//!   field export, run directories, and the command-line surface
//!
//! The `examples/` directory holds one runnable program per capability; the
//! `inflow` binary exposes the same flows as subcommands.

pub mod assembly;
pub mod assimilation;
pub mod cli;
pub mod config;
pub mod cost;
pub mod error;
pub mod force;
pub mod mesh;
pub mod navier;
pub mod quadrature;
pub mod report;
pub mod space;
pub mod sparse;
pub mod stokes;
pub mod synthetic;
pub mod vtk;

pub use error::{Error, Result};
