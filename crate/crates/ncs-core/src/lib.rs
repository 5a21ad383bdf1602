pub mod error;
pub mod hyper;
pub mod meijer;
pub mod pho;
pub mod quadrature;
pub mod special;
pub mod states;
pub mod thermal;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
