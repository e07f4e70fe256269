#![no_std]
extern crate alloc;

pub mod channel;
pub mod error;
pub mod link;
pub mod optimizer;
pub mod system;
pub mod traffic;
pub mod units;

pub use error::{Error, Result};
pub use system::{MetricsReport, Scenario, SystemModel};
