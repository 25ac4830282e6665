//! Numerical harmonic analysis along curves: anisotropic quasi-norms, oscillatory
//! principal-value quadrature, the analytic multiplier families m_z, anisotropic
//! Calderón–Zygmund kernels and directional Hilbert transforms on periodic grids.

pub mod curves;
pub mod error;
pub mod geometry;
pub mod kernels_lp;
pub mod multipliers;
pub mod parallel;
pub mod pv_quadrature;
pub mod rotations;
pub mod transforms;

mod fft;
mod interp;

pub use curves::{ConvexProfile, ConvexityReport, Curve};
pub use error::{Error, Result};
pub use geometry::{DilationGroup, PolarPoint};

pub use multipliers::{AnalyticParameter, BoundReport, Regime};
pub use pv_quadrature::PVSpec;
