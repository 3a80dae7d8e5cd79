pub mod analysis;
pub mod analytic;
pub mod entropy;
pub mod error;
pub mod grobner;
pub mod laurent;
pub mod linalg;
pub mod parse;
pub mod report;
pub mod rigidity;
mod serde_util;

pub use analysis::{MixingStatus, ModulePresentation};
pub use error::{Error, Result};
pub use laurent::{LaurentPoly, Monomial, PolyMatrix};
