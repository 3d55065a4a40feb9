pub mod catalog;
pub mod cli;
pub mod codes;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod fqf;
pub mod glue;
pub mod lattice;
pub mod par;
pub mod report;
pub mod reproduce;
pub mod traces;

pub use error::{Error, Result};
