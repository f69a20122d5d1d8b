//! Multiplicative semigroups on ℕ^d and the decomposition of boxes into chains.

mod census;
mod chains;
mod semigroup;
mod spec;

pub use census::{
    census_J, chain_length_census, chain_length_weights, count_roots_in, density_K_over_J,
    directional_constant, retained_site_density,
};
pub(crate) use census::advance;
pub use chains::{
    b_count, chain_index_j, decompose_box, decompose_box_with, factor_index, is_root,
    BCountTable, Chain, ChainDecomposition, Convention, Factorization, GroupElement,
    LatticeBox, OrderedGroup,
};
pub use semigroup::{
    enumerate_scalar_semigroup, gamma, gamma_partial_sum, ScalarSemigroup, ELEMENT_CEILING,
};
pub use spec::{validate_generators, Direction, SemigroupSpec, Site, SpecFile};
