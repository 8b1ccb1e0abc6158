pub mod arith;
pub mod cyclo;
pub mod error;
pub mod experiments;
pub mod families;
pub mod ff;
pub mod model;
pub mod poly;
pub mod tracefn;

pub use error::{Error, Result};
