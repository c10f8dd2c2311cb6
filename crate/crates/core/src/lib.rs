//! Groupoids, spans of groupoids, the `!` comonad and polynomial functors
//! over finite groupoids.

pub mod effective;
pub mod equiv;
pub mod error;
pub mod bang;
pub mod gpd;
pub mod json;
pub mod kleisli;
pub mod laws;
pub mod limits;
pub mod poly;
pub mod span;

pub use effective::{Effective, Mapping, Pair, Terminal};
pub use equiv::{find_equivalence, gcard, skeletalize, Budget, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use gpd::{FinGroupoid, GFunctor, NatIso};
