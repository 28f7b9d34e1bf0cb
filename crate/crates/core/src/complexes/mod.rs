//! Bounded complexes of `A`-modules, chain maps, homotopies and cones.

mod complex;
mod hom;
pub mod modmap;

pub use complex::{cone, cone_inclusion, ChainMap, Complex, Homotopy, Validation};
pub use hom::{hom_dim, is_nullhomotopic, HomSystem};
pub use modmap::{scalar_action, ModMap, Term};
