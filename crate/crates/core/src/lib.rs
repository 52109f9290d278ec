//! First-order calculus on finite metric measure spaces.
//!
//! A space is a weighted graph with its shortest-path metric and a vertex
//! measure. On it the crate computes
//!
//! - the `(p, lambda)`-modulus of finite curve families, with the dual
//!   optimal plan ([`modulus`]);
//! - barycenters, compression, energies and derivations of plans ([`plans`]);
//! - minimal weak upper gradients, their calculus rules, Lipschitz
//!   approximation in energy, plan certificates and capacity ([`sobolev`]).
//!
//! ```
//! use modcalc::families::family_through;
//! use modcalc::modulus::ModulusOptions;
//! use modcalc::sobolev::n_gradient;
//! use modcalc::space::MetricMeasureSpace;
//!
//! let space = MetricMeasureSpace::path(3);
//! let family = family_through(&space, &space.all_vertices(), 2);
//! let g = n_gradient(&space, &[0.0, 1.0, 2.0], &family, 2.0, &ModulusOptions::default()).unwrap();
//! assert!((g.energy - 8.0 / 3.0).abs() < 1e-6);
//! ```

pub mod cli;
pub mod curve;
pub mod error;
pub mod families;
pub mod io;
pub mod lipschitz;
pub mod modulus;
pub mod plans;
mod shortest;
pub mod sobolev;
mod solver;
pub mod space;

pub use curve::DiscreteCurve;
pub use error::{Error, Result};
pub use families::CurveFamily;
pub use lipschitz::Density;
pub use modulus::{ExtReal, Lambda, ModulusOptions};
pub use plans::Plan;
pub use space::{MetricMeasureSpace, VertexSet};
