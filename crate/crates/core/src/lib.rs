#![allow(clippy::result_large_err)]

pub mod dist;
pub mod catalog;
pub mod cli;
pub mod cu;
pub mod error;
pub mod fu;
pub mod generate;
pub mod group;
pub mod io;
pub mod lego;
pub mod metric;
pub mod pu;
pub mod resolution;
pub mod space;
pub mod splice;
pub mod union;
mod union_find;

pub use dist::Dist;
pub use error::{Error, Result};
pub use space::{FiniteMetricSpace, Report, Violation};
