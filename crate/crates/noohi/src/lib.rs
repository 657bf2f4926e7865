//! Desk-scale computations around van Kampen presentations of fundamental groups:
//! finite-level group towers and G-sets, presentations built from 2-complexes with
//! group data, looplike words, truncated l-adic arithmetic and explicit counterexamples.

pub mod complexes;
pub mod counterexamples;
pub mod error;
pub mod groups;
pub mod looplike;
pub mod gsets;
pub mod padics;
pub mod vankampen;
pub mod words;

pub use error::{Error, Result};
