//! Critical FK-Ising model on discrete subdomains of Z², with the discrete
//! complex analysis toolkit used to bound its crossing probabilities:
//! random-walk partition functions, discrete extremal length, separators,
//! planar duality, arm events, and the Edwards-Sokal spin coupling.
//!
//! The crate is organized around six areas:
//!
//! * [`domain`], [`rect`], [`dual`] — discrete domains, topological
//!   rectangles, bridges and dual domains;
//! * [`dca`] — conductance networks, harmonic solves, partition functions
//!   `Z`, extremal length and separators;
//! * [`fk`] — the FK-Ising measure: exact enumeration, Swendsen-Wang
//!   sampling, connectivity events, duality checks and the second-moment
//!   pipeline;
//! * [`arms`] — arm events in annuli and half-annuli with a greedy detector
//!   cross-validated by an exact flow oracle;
//! * [`spin`] — Edwards-Sokal coupling to the spin-Ising model;
//! * [`harness`] — corpus generation, seeded reproducible experiments, CSV
//!   output.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod arms;
pub mod dca;
pub mod domain;
pub mod dual;
pub mod fk;
pub mod geom;
pub mod harness;
pub mod rect;
pub mod rng;
pub mod spin;

pub use domain::{DiscreteDomain, DomainError};
pub use geom::{pt, Dir, Pt};
pub use rect::TopologicalRectangle;

/// Critical point of the FK-Ising model on Z²: √2/(√2+1) = 2-√2.
pub const P_CRIT: f64 = 2.0 - std::f64::consts::SQRT_2;

/// Critical inverse temperature of the spin-Ising model: ln(1+√2)/2.
pub fn beta_crit() -> f64 {
    0.5 * (1.0 + std::f64::consts::SQRT_2).ln()
}

/// Boundary conductance 2(√2-1) on external edges.
pub const W_EXT: f64 = 2.0 * (std::f64::consts::SQRT_2 - 1.0);

/// Mass 2√2+1 assigned to external vertices.
pub const M_EXT: f64 = 2.0 * std::f64::consts::SQRT_2 + 1.0;
