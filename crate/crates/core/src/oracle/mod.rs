//! Ground truth that does not share code paths with the closed forms.

mod enumerate;
mod grid;
mod subgradient;
mod verify;

pub use enumerate::{brute_force_combinatorial, DEFAULT_BRUTE_FORCE_CAP};
pub use grid::{binomial, duo_resolution, grid_search, lattice_minimum, DEFAULT_GRID_CAP};
pub use subgradient::{
    objective_f64, project_simplex, projected_subgradient, subgradient, SubgradientConfig,
    SubgradientOutcome,
};
pub use verify::{verify_conjecture, VerifyConfig, VerifyReport};
