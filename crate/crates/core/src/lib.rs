//! Optimal quasi-free dispersions from finite-size ground-state energies.
//!
//! The ground-state energy density of a translation-invariant quasi-free
//! chain is a partial Riemann sum of its one-particle band,
//! `e_L = ε (ν/2) S_L(ω)`. Given `e_L` for a handful of sizes and the bulk
//! value `e_∞`, the residuals `e_L − e_∞` determine the first cosine
//! coefficients of `ω` through a Möbius-type inversion. For an interacting
//! chain the result is the quasi-free band that reproduces the observed
//! energies exactly.
//!
//! - [`number`]: Möbius/Mertens functions and the inverse coefficients `b(n)`.
//! - [`band`], [`forward`]: bands, Riemann sums and synthetic energy series.
//! - [`reconstruct`]: coefficient inversion, hypothesis classification and
//!   the quasi-free criterion.
//! - [`ed`]: Lanczos ground states of small spin chains.
//! - [`io`]: CSV/JSON formats.

pub mod band;
pub mod convergence;
pub mod ed;
pub mod error;
pub mod forward;
pub mod io;
pub mod number;
pub mod reconstruct;
pub mod series;

pub use band::{Band, ClosedFormBand, FourierBand, SampleTable, GRID_POINTS};
pub use error::{Error, Result};
pub use number::{b_coefficients, divisors, mertens, moebius, BCoefficients, Twist};
pub use reconstruct::{
    classify, criterion_check, extrapolate_e_inf, invert_coefficients, reconstruct_band,
    CriterionReport, ExtrapolationModel, Hypothesis, ReconstructionParams, ReconstructionResult,
    SizeSet,
};
pub use series::{EnergySeries, Statistics};
