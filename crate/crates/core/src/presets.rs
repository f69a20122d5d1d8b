//! The two bundled figure setups.

use crate::error::Result;
use crate::lattice::{validate_generators, Direction, SemigroupSpec};
use crate::numerics::linspace;

/// Terms kept in the figure series.
pub const FIGURE_TERMS: usize = 100;

/// Bias values plotted in both figures.
pub const FIGURE_BIASES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// One-dimensional semigroup ⟨2,3,5,7,11⟩.
pub fn fig1() -> SemigroupSpec {
    SemigroupSpec::scalar(&[2, 3, 5, 7, 11]).expect("coprime generators")
}

/// {(2,3),(3,5),(5,7),(7,11),(11,2)} in ℕ², ordered by the first coordinate.
pub fn fig2() -> (SemigroupSpec, Direction) {
    let spec = validate_generators(
        &[vec![2, 3], vec![3, 5], vec![5, 7], vec![7, 11], vec![11, 2]],
        2,
    )
    .expect("coprime generators");
    (spec, Direction::FIRST)
}

/// The β-grid −3..3 in steps of 0.05.
pub fn figure_beta_grid() -> Vec<f64> {
    linspace(-3.0, 3.0, 121)
}

/// Every bundled semigroup with its ordering direction.
pub fn bundled() -> Result<Vec<(&'static str, SemigroupSpec, Direction)>> {
    let (f2, j2) = fig2();
    Ok(vec![
        ("<2>", SemigroupSpec::scalar(&[2])?, Direction::FIRST),
        ("<2,3>", SemigroupSpec::scalar(&[2, 3])?, Direction::FIRST),
        ("fig1", fig1(), Direction::FIRST),
        ("fig2", f2, j2),
        ("<(2,3)>", validate_generators(&[vec![2, 3]], 2)?, Direction::FIRST),
    ])
}
