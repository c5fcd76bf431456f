//! Numerical laboratory for a planar saddle with a homoclinic cubic tangency.
//!
//! The map is a linear saddle `(x, y) -> (mu x, lambda y)` on a square chart
//! around the origin, glued to a polynomial transition map that carries a
//! neighbourhood of `q = (1, 0)` to a neighbourhood of `r = (0, 1)` with a
//! cubic tangency at `r`. Everything else (rectangles around the tangency,
//! return times, box cascades, conjugacy invariants) is built on top of
//! [`model::ModelSystem`].

// NaN must fail these checks, which rules out the suggested rewrites.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod cases;
pub mod config;
pub mod error;
pub mod leaves;
pub mod model;
pub mod moduli;
pub mod numeric;
pub mod poly;
pub mod rects;
pub mod returns;

pub use error::{LabError, Result};
pub use model::{ModelSystem, Rect, SaddleSpec, TransitionSpec};
