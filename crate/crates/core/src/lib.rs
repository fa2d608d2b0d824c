pub mod access;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod fss;
pub mod harness;
pub mod lss;
pub mod msp;

pub use error::{Error, Result};
