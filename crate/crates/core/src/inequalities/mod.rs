//! The eight-number aggregation lemma and the spherical Prékopa–Leindler
//! inequality.

mod lemma;
mod prekopa;

pub use lemma::{reversed_simpson_antidote, simpson_antidote, EightTuple, LemmaCheck, CONCLUSION_TOLERANCE};
pub use prekopa::{
    geodesic_combine, geodesic_combine_raw, pl_constant, pl_weight, pl_weight_from_dot, sinc, spl_verify, PlReport,
    SphereFunction, SphereGrid, ANTIPODAL_MARGIN,
};
