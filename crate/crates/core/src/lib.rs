//! Exact piecewise-linear homeomorphisms of the real line and their classes
//! in the quasi-isometry group.
//!
//! * [`pl`]: finite PL maps in canonical form and their group operations.
//! * [`qi`]: quasi-isometry constants, the defining inequality, triviality.
//! * [`approx`]: bounded-slope PL representatives of black-box
//!   quasi-isometries.
//! * [`structured`]: `h₀`, `h₁`, circle-map lifts and the conjugation that
//!   embeds lifts into the quasi-isometry group.
//! * [`thompson`]: Thompson's group `F` as dyadic PL maps.
//! * [`text`]: text and CSV formats.
//!
//! All arithmetic is exact; see [`rational`].

#![allow(clippy::result_large_err)]

pub mod approx;
pub mod pl;
pub mod qi;
pub mod rational;
pub mod structured;
pub mod text;
pub mod thompson;

pub use pl::{Interval, PlError, PlMap, Support};
pub use rational::Rational;
