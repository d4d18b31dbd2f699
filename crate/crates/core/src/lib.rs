//! Finite category theory engine: explicit finite categories, comma and slice
//! constructions, brute-force limits and Kan extensions, and the induced slice
//! functors τ_F and Dyn_F together with exhaustive checks of their universal
//! properties.

pub mod category;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod functor;
pub mod induced;
pub mod instances;
pub mod io;
pub mod limits;
pub mod limpre;

pub use category::{CategoryBuilder, FinCategory, Mor, Ob};
pub use constructions::CommaCategory;
pub use error::{Error, Result};
pub use functor::{FunctorData, NatTransData};
