//! Dynamics of the cosine family `F(z) = a·e^z + b·e^{-z}`, centred on
//! `f(z) = π sinh z`: the symbolic brush model and its pinching relation,
//! dynamic rays and landing points, hyperbolic-orbifold density bounds with
//! expansion estimates, the semiconjugacy from a disjoint-type partner, and
//! the Poincaré function of `z² - 1`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod orbifold;
pub mod poincare;
pub mod render;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/rays.md")]
    mod rays {}
    #[doc = include_str!("../../../book/src/orbifold.md")]
    mod orbifold {}
    #[doc = include_str!("../../../book/src/conjugacy.md")]
    mod conjugacy {}
    #[doc = include_str!("../../../book/src/poincare.md")]
    mod poincare {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
