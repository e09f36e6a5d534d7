//! Power spectrum signatures of vertex functions on graphs and point-cloud
//! diffusion operators.
//!
//! The signature of a unit function `f` under a symmetric operator `H` is the
//! probability measure on the real line placing mass `<f, P_lambda f>` at
//! each distinct eigenvalue `lambda` of `H`. Signatures are compared with
//! exact 1-D Wasserstein distances or through fixed-length quantile vectors,
//! and they are stable: `W1(mu_f^H, mu_f^H') <= n ||H - H'||_2` for any pair
//! of symmetric matrices, degenerate spectra included. [`stability`] measures
//! that bound empirically, and [`analysis`] runs the quantile/PCA/DBSCAN
//! pipeline over per-point spectra of diffusion operators.

pub mod analysis;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod io;
pub mod measures;
pub mod signatures;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
