use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// Largest semigroup element materialized by the enumeration routines.
pub const ELEMENT_CEILING: u128 = 1 << 120;

/// A one-dimensional multiplicative semigroup ⟨p₁,…,p_k⟩ of pairwise coprime
/// integers, sorted as 1 = ℓ₁ < ℓ₂ < ⋯.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSemigroup {
    generators: Vec<u64>,
}

impl ScalarSemigroup {
    /// Builds the semigroup from coprime entries; entries equal to 1 generate
    /// nothing and are dropped.
    pub fn from_coprime(entries: Vec<u64>) -> Self {
        let mut generators: Vec<u64> = entries.into_iter().filter(|&p| p >= 2).collect();
        generators.sort_unstable();
        generators.dedup();
        ScalarSemigroup { generators }
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Whether the semigroup is just {1}.
    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// All elements ≤ `bound`, ascending.
    pub fn elements_up_to(&self, bound: u128) -> Vec<u128> {
        let mut out = vec![1u128];
        if bound < 1 {
            return Vec::new();
        }
        for &p in &self.generators {
            let p = p as u128;
            let existing = out.len();
            for idx in 0..existing {
                let mut x = out[idx];
                while let Some(next) = x.checked_mul(p).filter(|&y| y <= bound) {
                    out.push(next);
                    x = next;
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The first `n` elements ℓ₁,…,ℓ_n, or fewer if the semigroup runs out
    /// below [`ELEMENT_CEILING`].
    pub fn first_elements(&self, n: usize) -> Vec<u128> {
        if self.is_trivial() {
            return vec![1];
        }
        let mut bound: u128 = 1 << 16;
        loop {
            let mut elems = self.elements_up_to(bound);
            if elems.len() >= n || bound >= ELEMENT_CEILING {
                elems.truncate(n);
                return elems;
            }
            bound = (bound << 8).min(ELEMENT_CEILING);
        }
    }

    /// Number of elements ≤ `x`, which is the 1-based rank of `x` when `x` is
    /// itself an element.
    pub fn count_up_to(&self, x: u128) -> usize {
        count_smooth(&self.generators, x)
    }

    pub fn contains(&self, mut x: u128) -> bool {
        if x == 0 {
            return false;
        }
        for &p in &self.generators {
            while x.is_multiple_of(p as u128) {
                x /= p as u128;
            }
        }
        x == 1
    }

    /// γ(G) = Σ 1/ℓᵢ = ∏ p/(p−1), exactly.
    pub fn gamma(&self) -> BigRational {
        gamma(&self.generators)
    }

    pub fn gamma_f64(&self) -> f64 {
        self.gamma().to_f64().unwrap_or(f64::NAN)
    }

    /// Σ 1/ℓᵢ over the elements ℓᵢ ≤ `bound`.
    pub fn gamma_partial_sum(&self, bound: u128) -> f64 {
        let mut elems = self.elements_up_to(bound);
        // smallest terms first
        elems.reverse();
        elems.iter().map(|&l| 1.0 / l as f64).sum()
    }
}

fn count_smooth(gens: &[u64], x: u128) -> usize {
    match gens.split_first() {
        None => usize::from(x >= 1),
        Some((&p, rest)) => {
            let mut total = 0;
            let mut y = x;
            while y >= 1 {
                total += count_smooth(rest, y);
                y /= p as u128;
            }
            total
        }
    }
}

/// All products p₁^{a₁}⋯p_k^{a_k} ≤ `bound`, ascending.
pub fn enumerate_scalar_semigroup(generators: &[u64], bound: u64) -> Vec<u64> {
    ScalarSemigroup::from_coprime(generators.to_vec())
        .elements_up_to(bound as u128)
        .into_iter()
        .map(|x| x as u64)
        .collect()
}

/// γ(⟨p₁,…,p_k⟩) = ∏ (1 − 1/pᵢ)⁻¹ in exact arithmetic; unit entries contribute 1.
pub fn gamma(generators: &[u64]) -> BigRational {
    generators
        .iter()
        .filter(|&&p| p >= 2)
        .fold(BigRational::one(), |acc, &p| {
            acc * BigRational::new(BigInt::from(p), BigInt::from(p - 1))
        })
}

/// Σ 1/ℓᵢ over the elements of ⟨generators⟩ not exceeding `bound`.
pub fn gamma_partial_sum(generators: &[u64], bound: u128) -> f64 {
    ScalarSemigroup::from_coprime(generators.to_vec()).gamma_partial_sum(bound)
}
