//! Minimax and minimax-projection experimental designs.
//!
//! A minimax design places `n` points in a bounded region so that the largest
//! distance from any point of the region to its nearest design point is as
//! small as possible. This crate generates such designs with minimax
//! clustering (a Lloyd-style alternation that replaces cluster means with
//! power-mean `C_q` centers) hybridized with particle swarm optimization, and
//! refines them block-wise under the MaxPro criterion so they also fill
//! low-dimensional projections well.
//!
//! The region is represented by a large candidate set (a Sobol' sequence
//! pushed through the inverse Rosenblatt transform, or rejection samples for
//! polygons), and every criterion is evaluated over it.
//!
//! Module map:
//!
//! * [`region`]: design spaces, containment, inverse Rosenblatt transforms.
//! * [`lds`]: Sobol' and scrambled Sobol' sequences, candidate sets.
//! * [`cqcenter`]: the `C_q` objective, its constants and the accelerated
//!   gradient solver.
//! * [`mmc`]: minimax clustering.
//! * [`pso`]: minimax clustering with particle swarm optimization.
//! * [`maxpro`]: minimax projection refinement.
//! * [`metrics`]: minimax and projected space-filling metrics.
//! * [`baselines`]: Lloyd principal points, Ward-linkage FFF, greedy cover.
//! * [`cli`]: the `minimax` command line front end.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise. Every reduction
//! uses a fixed chunking so results do not depend on the worker count.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod cqcenter;
pub mod error;
pub mod lds;
pub mod maxpro;
pub mod metrics;
pub mod mmc;
pub mod par;
pub mod points;
pub mod pso;
pub mod region;

pub use error::{Error, Result};
pub use lds::{CandidateSet, RngSeed};
pub use mmc::{Assignment, Design};
pub use points::PointSet;
pub use region::Region;
