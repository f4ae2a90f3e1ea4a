// SPDX-License-Identifier: Apache-2.0

pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod spin;

pub use error::{Error, Result};
