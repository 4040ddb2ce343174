//! Numerical laboratory for singular minimal surfaces: critical points of
//! the weighted area `∫ z^α dA` in the upper half-space.
//!
//! * [`profiles`]: generating curves (α-catenaries, rotational meridians,
//!   winglike meridians) and the quantities derived from them.
//! * [`mesh`]: triangle meshes of those surfaces and their discrete
//!   area, boundary length, weighted mean curvature and conormal flux.
//! * [`graph`]: Newton solver for the Dirichlet problem of the graph
//!   equation `div(Du/W) = α/(u W)`, `W = sqrt(1+|Du|^2)`.
//! * [`estimates`]: checks of the area, height and extremum inequalities
//!   and the non-existence thresholds `h0` and `d0`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimates;
pub mod graph;
pub mod io;
pub mod mesh;
pub mod ode;
pub mod profiles;
pub mod roots;

pub use error::{Error, Result};
pub use profiles::Alpha;
