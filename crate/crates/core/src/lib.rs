pub mod error;
pub mod exact;
pub mod floer;
pub mod plumbing;
pub mod report;
pub mod slopes;
pub mod surgery;

pub use error::{Error, Result};
