//! Classification machinery for bounded unitary representations of section
//! Lie algebras with fibre `su_{r+1}`, at desk scale.

pub mod error;
pub mod exact;
pub mod json;
pub mod rootdata;
pub mod irrep;
pub mod evalrep;
pub mod series;
pub mod uhf;
pub mod boundary;
pub mod charfactor;
pub mod selftest;

pub use error::{Error, Result};
