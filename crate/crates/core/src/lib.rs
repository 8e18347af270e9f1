#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod meanwidth;
pub mod shear;
pub mod simplex;
pub mod sphere;
pub mod centroid;
pub mod inequalities;
pub mod ascent;
pub mod io;
pub mod suites;
pub mod cli;
