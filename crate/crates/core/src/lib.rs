//! Uniformly random binary trees of a fixed size, generated in linear time
//! and space.
//!
//! A tree with `n` internal nodes starts as `n + 1` leaves and `n` binary
//! functions laid out alternately. A Fisher-Yates shuffle driven by a
//! Park-Miller generator randomizes the order, and rotating the buffer to
//! the first minimum of its lattice walk turns the arrangement into a valid
//! preorder tree. Every shape is reached by exactly `2n + 1` arrangements,
//! so shapes are uniform over all Catalan(n) possibilities. Nodes are then
//! labeled from a [`PrimitiveSet`].
//!
//! ```
//! use std::sync::Arc;
//! use randtree::{random_tree, to_sexpr, PrimitiveSet};
//!
//! let prims = Arc::new(PrimitiveSet::default_set());
//! let tree = random_tree(11, &prims, 42).unwrap();
//! assert_eq!(tree.size(), 11);
//! println!("{} (depth {})", to_sexpr(&tree), tree.depth());
//! ```
//!
//! Statistics and timing code is generic over the floating-point type; the
//! `*64` and `*32` aliases below fix it.

pub mod bench;
pub mod error;
pub mod oracle;
pub mod prng;
pub mod shape;
pub mod stats;
pub mod tree;

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};

pub use error::{Error, Result};
pub use prng::{derive_trial_seed, RngState, TrialSeeds, UniformSource};
pub use shape::{random_shape, ShapeSequence, Tag};
pub use tree::{
    random_tree, random_tree_with, to_dot, to_sexpr, wellformed, GenOptions, PrimitiveSet, Tree,
};

/// Floating-point scalar used by the statistics and timing code.
pub trait Real:
    Float + FloatConst + FromPrimitive + FromStr + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + FromStr + Debug + Display + Send + Sync + 'static
{
}

pub type DepthSummary64 = stats::DepthSummary<f64>;
pub type DepthSummary32 = stats::DepthSummary<f32>;
pub type UniformityReport64 = stats::UniformityReport<f64>;
pub type UniformityReport32 = stats::UniformityReport<f32>;
pub type BenchRecord64 = bench::BenchRecord<f64>;
pub type BenchRecord32 = bench::BenchRecord<f32>;
