pub mod alp;
pub mod cli;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod eval;
pub mod io;
pub mod matrix;
pub mod model_io;
pub mod neighbours;
pub mod nnd;
pub mod pipeline;
pub mod synthgen;

pub use error::{Error, Result};
