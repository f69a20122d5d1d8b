use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::chains::{BCountTable, Convention, LatticeBox};
use super::spec::{Direction, SemigroupSpec};
use crate::error::{Error, Result};

/// |J_{N;M}| = ∏ (⌊N_s/ℓ^(s)_{M_s}⌋ − ⌊N_s/ℓ^(s)_{M_s+1}⌋), the number of
/// sites i with ℓ^(s)_{M_s} ≤ N_s/i_s < ℓ^(s)_{M_s+1} in every coordinate.
#[allow(non_snake_case)]
pub fn census_J(lattice_box: &LatticeBox, spec: &SemigroupSpec, m: &[usize]) -> Result<u128> {
    lattice_box.check_dim(spec)?;
    if m.len() != spec.dim() || m.contains(&0) {
        return Err(Error::InvalidParameter(
            "multi-index must have d entries, all at least 1".into(),
        ));
    }
    let mut count = 1u128;
    for (s, (&n, &ms)) in lattice_box.sides().iter().zip(m).enumerate() {
        let (lo, hi) = cell_interval(&spec.section(s).first_elements(ms + 1), n, ms);
        count *= (hi - lo) as u128;
    }
    Ok(count)
}

/// The range (lo, hi] of i_s with ℓ_M ≤ N/i_s < ℓ_{M+1}, given ℓ₁,… as `ell`.
fn cell_interval(ell: &[u128], n: u64, m: usize) -> (u64, u64) {
    let floor_div = |k: usize| -> u64 {
        match ell.get(k - 1) {
            Some(&l) if l <= n as u128 => (n as u128 / l) as u64,
            _ => 0,
        }
    };
    let hi = floor_div(m);
    let lo = floor_div(m + 1).min(hi);
    (lo, hi)
}

/// ∏ₜ (1 − 1/(p_{t1}⋯p_{td})), the asymptotic density of roots.
#[allow(non_snake_case)]
pub fn density_K_over_J(spec: &SemigroupSpec) -> BigRational {
    spec.generators()
        .iter()
        .map(|p| p.iter().fold(BigInt::one(), |acc, &x| acc * BigInt::from(x)))
        .fold(BigRational::one(), |acc, norm| {
            acc * (BigRational::one() - BigRational::new(BigInt::one(), norm))
        })
}

/// ∏ₜ (1 − 1/Pₜ) · ∏_{s≠j} γ(S^(s)).
pub fn directional_constant(spec: &SemigroupSpec, j: Direction) -> Result<BigRational> {
    spec.check_direction(j)?;
    Ok((0..spec.dim())
        .filter(|&s| s != j.index())
        .fold(density_K_over_J(spec), |acc, s| acc * spec.section(s).gamma()))
}

/// Retained sites per unit volume: ∏ₜ (1 − 1/Pₜ) · γ(S^(j)).
pub fn retained_site_density(spec: &SemigroupSpec, j: Direction) -> Result<BigRational> {
    spec.check_direction(j)?;
    Ok(density_K_over_J(spec) * spec.section(j.index()).gamma())
}

/// Density of roots whose chain keeps exactly ℓ members, for ℓ = 1..=`max_len`.
///
/// A single generator p cut off by the whole box gives (P−1)²/P^{ℓ+1} with
/// P = p₁⋯p_d; otherwise the weights are ∏(1 − 1/Pₜ)·(1/ℓ^(j)_ℓ − 1/ℓ^(j)_{ℓ+1}).
pub fn chain_length_weights(
    spec: &SemigroupSpec,
    j: Direction,
    max_len: usize,
) -> Result<Vec<BigRational>> {
    if spec.num_generators() == 1 {
        let p = BigInt::from(
            *spec
                .norms()?
                .first()
                .ok_or(Error::NoGenerators)?,
        );
        let pm1 = &p - BigInt::one();
        let num = &pm1 * &pm1;
        return Ok((1..=max_len)
            .map(|l| BigRational::new(num.clone(), num_traits::pow(p.clone(), l + 1)))
            .collect());
    }
    spec.check_direction(j)?;
    let c = density_K_over_J(spec);
    let ell = spec.section(j.index()).first_elements(max_len + 1);
    Ok((0..max_len)
        .map(|k| {
            let inv = |idx: usize| match ell.get(idx) {
                Some(&l) => BigRational::new(BigInt::one(), BigInt::from(l)),
                None => BigRational::zero(),
            };
            &c * (inv(k) - inv(k + 1))
        })
        .collect())
}

/// Number of roots in the product of half-open ranges (lo_s, hi_s], by
/// inclusion and exclusion over sets of generators.
pub fn count_roots_in(spec: &SemigroupSpec, ranges: &[(u64, u64)]) -> u128 {
    let k = spec.num_generators();
    let gens = spec.generators();
    let mut total: i128 = 0;
    for mask in 0u64..(1u64 << k) {
        let mut term: i128 = 1;
        for (s, &(lo, hi)) in ranges.iter().enumerate() {
            let q = (0..k)
                .filter(|t| mask >> t & 1 == 1)
                .fold(1u128, |acc, t| acc.saturating_mul(gens[t][s] as u128));
            let count = (hi as u128 / q) - (lo as u128 / q);
            term *= count as i128;
            if term == 0 {
                break;
            }
        }
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u128
}

/// Chain length → number of roots in the box whose chain has that length.
///
/// Works from floor-difference cells, so the cost does not grow with the volume.
pub fn chain_length_census(
    lattice_box: &LatticeBox,
    spec: &SemigroupSpec,
    j: Direction,
    convention: Convention,
) -> Result<BTreeMap<usize, u128>> {
    lattice_box.check_dim(spec)?;
    spec.check_direction(j)?;
    let sides = lattice_box.sides();
    let js = j.index();
    let mut census = BTreeMap::new();
    match convention {
        Convention::CoordinateCap => {
            let ell = spec.section(js).elements_up_to(sides[js] as u128);
            let mut ranges: Vec<(u64, u64)> = sides.iter().map(|&n| (0, n)).collect();
            for m in 1..=ell.len() {
                ranges[js] = cell_interval(&ell, sides[js], m);
                let count = count_roots_in(spec, &ranges);
                if count > 0 {
                    *census.entry(m).or_insert(0) += count;
                }
            }
        }
        Convention::RankCap => {
            let caps: Vec<usize> = (0..spec.dim())
                .map(|s| spec.section(s).count_up_to(sides[s] as u128))
                .collect();
            let table = BCountTable::new(spec, j, caps.iter().copied().max().unwrap_or(1))?;
            let cells: Vec<Vec<(u64, u64)>> = (0..spec.dim())
                .map(|s| {
                    let ell = table.section_elements(s);
                    (1..=caps[s]).map(|m| cell_interval(ell, sides[s], m)).collect()
                })
                .collect();
            let mut index = vec![1usize; spec.dim()];
            loop {
                let ranges: Vec<(u64, u64)> =
                    index.iter().enumerate().map(|(s, &m)| cells[s][m - 1]).collect();
                let count = count_roots_in(spec, &ranges);
                if count > 0 {
                    let b = table.get(&index)?;
                    *census.entry(b).or_insert(0) += count;
                }
                if !advance(&mut index, &caps) {
                    break;
                }
            }
        }
    }
    Ok(census)
}

/// Odometer step over 1..=caps[s]; false once every index wrapped.
pub(crate) fn advance(index: &mut [usize], caps: &[usize]) -> bool {
    for s in (0..index.len()).rev() {
        if index[s] < caps[s] {
            index[s] += 1;
            return true;
        }
        index[s] = 1;
    }
    false
}
