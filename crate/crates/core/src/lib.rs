pub mod aggregate;
pub mod bundles;
pub mod error;
pub mod folds;
pub mod ilp;
pub mod model;
pub mod multiclass;
pub mod num;
pub mod oracle;
pub mod regression;
pub mod rint;
pub mod scores;
pub mod single;

pub use error::{Error, Result};
