use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::semigroup::ScalarSemigroup;
use crate::error::{Error, Result};

/// A point of the lattice ℕ^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Site(Vec<u64>);

impl Site {
    pub fn new(coords: Vec<u64>) -> Self {
        Site(coords)
    }

    pub fn scalar(x: u64) -> Self {
        Site(vec![x])
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Coordinate-wise product, `None` on overflow or dimension mismatch.
    pub fn checked_mul(&self, other: &Site) -> Option<Site> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_mul(*b))
            .collect::<Option<Vec<_>>>()
            .map(Site)
    }

    /// Coordinate-wise product with wide factors.
    pub(crate) fn scaled(&self, factors: &[u128]) -> Option<Site> {
        self.0
            .iter()
            .zip(factors)
            .map(|(&a, &f)| {
                (a as u128)
                    .checked_mul(f)
                    .and_then(|x| u64::try_from(x).ok())
            })
            .collect::<Option<Vec<_>>>()
            .map(Site)
    }

    pub(crate) fn within(&self, bounds: &[u64]) -> bool {
        self.0.iter().zip(bounds).all(|(x, n)| x <= n)
    }
}

impl From<u64> for Site {
    fn from(x: u64) -> Self {
        Site::scalar(x)
    }
}

impl From<Vec<u64>> for Site {
    fn from(v: Vec<u64>) -> Self {
        Site(v)
    }
}

impl<const N: usize> From<[u64; N]> for Site {
    fn from(v: [u64; N]) -> Self {
        Site(v.to_vec())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [x] = self.0.as_slice() {
            return write!(f, "{x}");
        }
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A coordinate direction `j` in `1..=d`, used to order chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(usize);

impl Direction {
    pub const FIRST: Direction = Direction(1);

    /// 1-based direction; validated against a spec by [`SemigroupSpec::check_direction`].
    pub fn new(j: usize) -> Self {
        Direction(j)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub(crate) fn index(self) -> usize {
        self.0 - 1
    }
}

impl Default for Direction {
    fn default() -> Self {
        Direction::FIRST
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Generator vectors p₁,…,p_k ∈ ℕ^d whose entries are pairwise coprime in
/// every coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupSpec {
    dim: usize,
    generators: Vec<Vec<u64>>,
}

/// Checks coordinate-wise coprimality and non-degeneracy of `vectors` in ℕ^d.
pub fn validate_generators(vectors: &[Vec<u64>], d: usize) -> Result<SemigroupSpec> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if vectors.is_empty() {
        return Err(Error::NoGenerators);
    }
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                index: index + 1,
                found: v.len(),
                expected: d,
            });
        }
        if v.contains(&0) {
            return Err(Error::ZeroEntry { index: index + 1 });
        }
        if v.iter().all(|&x| x == 1) {
            return Err(Error::DegenerateGenerator { index: index + 1 });
        }
    }
    for s in 0..d {
        for a in 0..vectors.len() {
            for b in a + 1..vectors.len() {
                if vectors[a][s].gcd(&vectors[b][s]) != 1 {
                    return Err(Error::CoprimalityViolation {
                        coordinate: s + 1,
                        first: a + 1,
                        second: b + 1,
                    });
                }
            }
        }
    }
    Ok(SemigroupSpec {
        dim: d,
        generators: vectors.to_vec(),
    })
}

impl SemigroupSpec {
    pub fn new(d: usize, generators: Vec<Vec<u64>>) -> Result<Self> {
        validate_generators(&generators, d)
    }

    /// One-dimensional semigroup ⟨p₁,…,p_k⟩.
    pub fn scalar(generators: &[u64]) -> Result<Self> {
        let vectors: Vec<Vec<u64>> = generators.iter().map(|&p| vec![p]).collect();
        validate_generators(&vectors, 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Entries p_{1s},…,p_{ks} of coordinate `s` (0-based), ones included.
    pub fn coordinate_entries(&self, s: usize) -> Vec<u64> {
        self.generators.iter().map(|p| p[s]).collect()
    }

    /// The coordinate semigroup S^(s) for 0-based `s`.
    pub fn section(&self, s: usize) -> ScalarSemigroup {
        ScalarSemigroup::from_coprime(self.coordinate_entries(s))
    }

    /// Products P_t = p_{t1}⋯p_{td}.
    pub fn norms(&self) -> Result<Vec<u128>> {
        self.generators
            .iter()
            .map(|p| {
                p.iter()
                    .try_fold(1u128, |acc, &x| acc.checked_mul(x as u128))
                    .ok_or(Error::Overflow("generator norm"))
            })
            .collect()
    }

    /// Errors unless `j` is in range and every generator has an entry ≥ 2 at `j`,
    /// which is exactly when the j-order on the semigroup has no ties.
    pub fn check_direction(&self, j: Direction) -> Result<()> {
        if j.get() == 0 || j.get() > self.dim {
            return Err(Error::InvalidDirection {
                direction: j.get(),
                dim: self.dim,
            });
        }
        if let Some(t) = self.generators.iter().position(|p| p[j.index()] == 1) {
            return Err(Error::OrderAmbiguity {
                direction: j.get(),
                generator: t + 1,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SemigroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, p) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", Site(p.clone()))?;
        }
        write!(f, ">")
    }
}

/// On-disk form `{"d": 2, "generators": [[2,3],[3,5]], "direction": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub d: usize,
    pub generators: Vec<Vec<u64>>,
    #[serde(default = "default_direction")]
    pub direction: usize,
}

fn default_direction() -> usize {
    1
}

impl SpecFile {
    pub fn from_spec(spec: &SemigroupSpec, direction: Direction) -> Self {
        SpecFile {
            d: spec.dim(),
            generators: spec.generators().to_vec(),
            direction: direction.get(),
        }
    }

    pub fn into_spec(self) -> Result<(SemigroupSpec, Direction)> {
        let spec = validate_generators(&self.generators, self.d)?;
        let direction = Direction::new(self.direction);
        if direction.get() == 0 || direction.get() > spec.dim() {
            return Err(Error::InvalidDirection {
                direction: direction.get(),
                dim: spec.dim(),
            });
        }
        Ok((spec, direction))
    }
}
