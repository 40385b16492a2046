//! Closed-form solutions, reductions and numerical checks for the replicator-mutator
//! equation `∂t u = ∂xx u + (x - ū(t)) u` with `ū(t) = ∫ x u(t,x) dx`.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
mod extended;
pub mod grid;
pub mod oracle;
pub mod profiles;
pub mod quad;
pub mod reductions;
pub mod scenario;
pub mod selftest;
pub mod special;
pub mod waves;
