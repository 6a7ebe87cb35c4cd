//! Computational toolkit for the curves X0*(N) = X0(N)/B(N), N square-free.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`], [`classnum`], [`genus`]: multiplicative arithmetic, class
//!   numbers of imaginary quadratic orders, Atkin-Lehner fixed-point counts
//!   and the genus formulas built on them.
//! * [`nfdata`], [`frobenius`]: newform orbit fixtures, the block basis of
//!   S2*(N), and Eichler-Shimura point counts.
//! * [`criteria`], [`petri`], [`hypermodel`]: the involution-exclusion
//!   battery, canonical-embedding quadrics with the sign-pattern search, and
//!   hyperelliptic model extraction.
//!
//! Support modules ([`poly`], [`series`], [`linalg`], [`points`]) hold the
//! exact arithmetic those layers share.

pub mod arith;
pub mod classnum;
pub mod criteria;
pub mod error;
pub mod frobenius;
pub mod genus;
pub mod hypermodel;
pub mod linalg;
pub mod nfdata;
pub mod petri;
pub mod points;
pub mod poly;
pub mod series;

pub use error::{Error, Result};
