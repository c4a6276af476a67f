//! Numerical experiments on Birkhoff sums of observables that blow up at a
//! point, `φ(x) = d(x, p)^-k`, and on shrinking-target hit counts, for the
//! LSV, doubling, tent, logistic and Arnold cat maps.

// Negated float comparisons such as `!(x > 0.0)` are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accumulate;
pub mod dynamics;
pub mod error;
pub mod expcli;
pub mod measure;
pub mod observables;
