//! Exact cohomology of finite effect algebras.
//!
//! Effect algebras are partial commutative structures abstracting the unit
//! interval and the effects of a quantum system. This crate builds finite
//! effect algebras (explicit tables, power sets, products, coproducts,
//! Greechie-diagram pasting), enumerates their tests, and computes cyclic,
//! Hochschild, relative and order cohomology over exact rationals. On top of
//! that it decides state-extension and classical-realizability questions as
//! exact linear programs, including the standard Bell scenario.
//!
//! Everything is exact: no floating point is used anywhere in the
//! mathematical core.

pub mod algebra;
pub mod bell;
pub mod cli;
pub mod cohomology;
pub mod corpus;
pub mod format;
pub mod linalg;
pub mod lp;
pub mod order;
pub mod rational;
pub mod states;
pub mod testspace;

pub use linalg::Matrix;
pub use rational::Rational;
