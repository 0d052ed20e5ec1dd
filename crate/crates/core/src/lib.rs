pub mod analysis;
pub mod claims;
pub mod cli;
pub mod denjoy;
pub mod emit;
pub mod error;
pub mod exactnum;
pub mod report;
pub mod space;
pub mod sysfile;
pub mod winding;

pub use error::{Error, Result};
