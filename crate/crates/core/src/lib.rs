pub mod algebra;
pub mod corpus;
pub mod error;
pub mod exactla;
pub mod fdmodule;
pub mod gradedhyp;
pub mod resolution;
pub mod rng;
pub mod scan;
pub mod sparse;
pub mod theorems;
pub mod tor;

pub use error::{Error, Result};
