//! Concentration and small-ball inequalities for polynomials under log-concave measures.

pub mod body;
pub mod checkers;
pub mod gauss;
pub mod isoperim;
pub mod nelder_mead;
pub mod par;
pub mod poly;
pub mod quad;
pub mod report;
pub mod samples;
pub mod search;
pub mod serde_ext;
pub mod weights;
