//! Capacity bounds, rate regions and random-coding simulation for
//! finite-state multiple-access channels with noisy channel state information.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod information;
pub mod model;
pub mod optimize;
pub mod regions;
pub mod rng;
pub mod simulate;
pub mod spec_file;
pub mod strategies;
pub mod verify;

pub use error::{Error, Result};
