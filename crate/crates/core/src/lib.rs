pub mod apps;
pub mod error;
pub mod factor;
pub mod kernels;
pub mod oracle;
pub mod skewcore;

pub use error::{Error, Result};
