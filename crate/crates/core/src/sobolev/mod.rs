//! Minimal weak upper gradients, their calculus rules, Lipschitz
//! approximation in energy, plan certificates, capacity and the report that
//! compares the estimators.

mod calculus;
mod capacity;
mod certificate;
mod energy;
mod equivalence;
mod gradient;

pub use calculus::{ug_calculus, CalculusReport, PiecewiseLinear};
pub use capacity::{capacity, CapacityResult};
pub use certificate::{gradient_dual_plan, w_certificate, w_lower_bound, WCertificate};
pub use energy::{h_gradient_sequence, neighbor_average, HSequence, HStep};
pub use equivalence::{equivalence_report, EquivalenceOptions, EquivalenceReport, EquivalenceRow};
pub use gradient::{n_gradient, Estimator, GradientResult};
