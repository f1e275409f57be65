//! Radial meshes, fields, and every integral functional of the model.

mod field;
mod functionals;
mod grid;
mod scheme;
mod symmetrized;
mod virial;
mod weights;

pub use field::RadialField;
pub use functionals::{
    energy, energy_unchecked, kinetic_norm_sq, mass, strauss_bound_check, virial_quantities,
    weighted_lp, weinstein_quotient,
};
pub use grid::{sphere_area, GridMap, RadialGrid, DEFAULT_POINTS, DEFAULT_R_MAX};
pub use scheme::{weinstein_from_parts, RadialScheme};
pub use symmetrized::SymmetrizedOperator;
pub use virial::VirialTriple;
pub use weights::{intercritical_plateau, laplacian_data, VirialWeight};
