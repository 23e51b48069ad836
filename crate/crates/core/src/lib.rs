//! Exact energy and eigenvalue solvers on metric graphs, with a topology
//! enumerator and a length optimizer for graphs spanning prescribed points.

pub mod graph;
pub mod energy;
pub mod spectral;
pub mod fem;
pub mod topology;
pub mod optimizer;
pub mod report;
