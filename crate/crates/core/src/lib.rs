//! Numerical laboratory for short-interval `L^p` moments of the Riemann
//! zeta-function on the line `Re(s) = 1`.
//!
//! The crate is organised bottom-up:
//!
//! * [`zeta`] evaluates `ζ(s)` and derived quantities on `Re(s) >= 1`.
//! * [`sieve`] builds smallest-prime-factor tables and the coefficient
//!   streams `d_p(n)` and `λ(n) d_p(n)`.
//! * [`kernels`] holds the triangular kernel, its iterated self-convolutions
//!   and their Fourier transforms.
//! * [`moments`] integrates short-interval and triangular-weighted moments.
//! * [`dirichlet`] builds and evaluates smoothed Dirichlet polynomials.
//! * [`diophantine`] finds shifts `T` aligning prime phases.
//! * [`experiments`] binds everything into reproducible reports.

pub mod dirichlet;
pub mod diophantine;
pub mod experiments;
pub mod hp;
pub mod kernels;
pub mod moments;
pub mod quad;
pub mod sieve;
pub mod sum;
pub mod zeta;

pub use num_complex::Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
