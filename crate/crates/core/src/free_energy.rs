//! Free energies F_r(β) of the multiple sums, per summand.
//!
//! Every free energy here is normalized by the number of terms of the sum,
//! i.e. by the number of bonds. For d = 1 that is the volume N.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    advance, chain_length_census, BCountTable, Convention, Direction, LatticeBox, SemigroupSpec,
};
use crate::numerics::CompensatedSum;
use crate::transfer::{
    chain_log_expectation, check_bias, field_from_bias, spectral, spectral_slopes,
};

/// Largest number of series terms ever summed.
pub const TERM_CAP: usize = 100_000;

/// How far to sum a series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Truncation {
    /// Stop once the certified remainder is at most this.
    Tolerance(f64),
    /// Sum exactly this many terms.
    Terms(usize),
}

impl Truncation {
    pub(crate) fn validate(self) -> Result<Self> {
        match self {
            Truncation::Tolerance(tol) if !(tol > 0.0 && tol.is_finite()) => Err(
                Error::InvalidParameter(format!("tolerance {tol} must be positive")),
            ),
            other => Ok(other),
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Tolerance(1e-12)
    }
}

/// F_r(β) together with its truncation data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreeEnergyResult {
    pub value: f64,
    pub beta: f64,
    pub r: f64,
    /// Number of series terms summed.
    pub truncation_k: usize,
    /// Bound on the omitted remainder; infinite when no bound is available.
    pub tail_bound: f64,
    /// Per-term contributions of the series, k = 1..=truncation_k.
    pub terms: Vec<f64>,
    /// Weight 1/γ(S^(j)) of the closed part.
    pub inverse_gamma: f64,
}

/// The directional free energy of a semigroup in a fixed direction.
///
/// With w_k = 1/ℓ_k − 1/ℓ_{k+1} over S^(j) and g = 1/γ(S^(j)),
/// F = (1+g)/2·log(r(1−r)) + g·log|vᵀe₊|² + log Λ₊ + g·Σ w_k log(1 + c ρ^k),
/// where c = 2cosh h/|vᵀe₊|² − 1 and ρ = Λ₋/Λ₊.
#[derive(Clone, Debug)]
pub struct DirectionalModel {
    inverse_gamma: f64,
    /// 1/ℓ_1, 1/ℓ_2, … over S^(j).
    inv_ell: Vec<f64>,
}

impl DirectionalModel {
    pub fn new(spec: &SemigroupSpec, j: Direction) -> Result<Self> {
        spec.check_direction(j)?;
        Ok(Self::from_section(&spec.section(j.index()), TERM_CAP))
    }

    /// The model of ⟨generators⟩ on ℕ.
    pub fn one_dim(generators: &[u64]) -> Result<Self> {
        let spec = SemigroupSpec::scalar(generators)?;
        Self::new(&spec, Direction::FIRST)
    }

    /// Like [`DirectionalModel::new`] but never sums more than `cap` terms.
    pub fn with_cap(spec: &SemigroupSpec, j: Direction, cap: usize) -> Result<Self> {
        spec.check_direction(j)?;
        Ok(Self::from_section(&spec.section(j.index()), cap.min(TERM_CAP)))
    }

    fn from_section(section: &crate::lattice::ScalarSemigroup, cap: usize) -> Self {
        let inv_ell = section
            .first_elements(cap + 1)
            .into_iter()
            .map(|l| 1.0 / l as f64)
            .collect();
        DirectionalModel {
            inverse_gamma: section.gamma().recip().to_f64().unwrap_or(f64::NAN),
            inv_ell,
        }
    }

    pub fn inverse_gamma(&self) -> f64 {
        self.inverse_gamma
    }

    /// w_k = 1/ℓ_k − 1/ℓ_{k+1} for 1-based k.
    pub(crate) fn weight(&self, k: usize) -> f64 {
        self.inv_ell[k - 1] - self.inv_ell.get(k).copied().unwrap_or(0.0)
    }

    /// 1/ℓ_k for 1-based k, zero past the enumerated range.
    pub(crate) fn inv_ell(&self, k: usize) -> f64 {
        self.inv_ell.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Largest k for which w_k is known exactly.
    pub(crate) fn max_terms(&self) -> usize {
        self.inv_ell.len().saturating_sub(1)
    }

    pub fn evaluate(&self, r: f64, beta: f64, truncation: Truncation) -> Result<FreeEnergyResult> {
        let truncation = truncation.validate()?;
        let h = field_from_bias(r)?;
        let sd = spectral(beta, h)?;
        let g = self.inverse_gamma;
        let closed =
            0.5 * (1.0 + g) * (r * (1.0 - r)).ln() + g * sd.overlap.ln() + sd.lambda_plus.ln();
        let (c, rho) = (sd.mixing(), sd.ratio());
        let kmax = match truncation {
            Truncation::Tolerance(_) => self.max_terms(),
            Truncation::Terms(n) => n.min(self.max_terms()),
        };
        let tail = |k: usize, x: f64| -> f64 {
            if c == 0.0 || rho == 0.0 {
                0.0
            } else if x < 1.0 {
                g * self.inv_ell(k + 1) * x / (1.0 - x)
            } else {
                f64::INFINITY
            }
        };
        let mut terms = Vec::new();
        let mut power = 1.0;
        let mut k = 0;
        let mut bound = tail(0, c.abs() * rho.abs());
        while k < kmax {
            if let Truncation::Tolerance(tol) = truncation {
                if bound <= tol {
                    break;
                }
            }
            k += 1;
            power *= rho;
            terms.push(g * self.weight(k) * (c * power).ln_1p());
            bound = tail(k, c.abs() * (power * rho).abs());
        }
        let series: CompensatedSum = terms.iter().rev().copied().collect();
        let result = FreeEnergyResult {
            value: closed + series.value(),
            beta,
            r,
            truncation_k: k,
            tail_bound: bound,
            terms,
            inverse_gamma: g,
        };
        match truncation {
            Truncation::Tolerance(tol) if !(result.tail_bound <= tol) => {
                Err(Error::ToleranceTooTight {
                    requested: tol,
                    achieved: result.tail_bound,
                    best_effort: Box::new(result),
                })
            }
            _ => Ok(result),
        }
    }

    /// dF/dβ by term-wise differentiation.
    pub fn derivative(&self, r: f64, beta: f64, truncation: Truncation) -> Result<f64> {
        let truncation = truncation.validate()?;
        let h = field_from_bias(r)?;
        let sd = spectral(beta, h)?;
        let d = spectral_slopes(&sd);
        let g = self.inverse_gamma;
        let closed = g * d.overlap / sd.overlap + d.log_lambda_plus;
        let (c, rho) = (sd.mixing(), sd.ratio());
        if c == 0.0 && d.mixing == 0.0 {
            return Ok(closed);
        }
        let kmax = match truncation {
            Truncation::Tolerance(_) => self.max_terms(),
            Truncation::Terms(n) => n.min(self.max_terms()),
        };
        // k·|ρ|^{k−1} decreases from here on
        let monotone_from = if rho.abs() < 1.0 && rho != 0.0 {
            (1.0 / -rho.abs().ln()).ceil() as usize + 1
        } else {
            1
        };
        let term_size = |k: usize| -> f64 {
            let x = c.abs() * rho.abs().powi(k as i32);
            if x >= 1.0 {
                return f64::INFINITY;
            }
            (d.mixing.abs() * rho.abs().powi(k as i32)
                + c.abs() * k as f64 * rho.abs().powi(k as i32 - 1) * d.ratio.abs())
                / (1.0 - x)
        };
        let mut sum = CompensatedSum::new();
        let mut k = 0;
        while k < kmax {
            if let Truncation::Tolerance(tol) = truncation {
                let next = k + 1;
                if next >= monotone_from && g * self.inv_ell(next) * term_size(next) <= tol {
                    break;
                }
            }
            k += 1;
            let pk = rho.powi(k as i32);
            let pk1 = rho.powi(k as i32 - 1);
            let num = d.mixing * pk + c * k as f64 * pk1 * d.ratio;
            sum.add(g * self.weight(k) * num / (1.0 + c * pk));
        }
        Ok(closed + sum.value())
    }
}

/// F_r(β) for ⟨generators⟩ on ℕ.
pub fn free_energy_1d(
    r: f64,
    beta: f64,
    generators: &[u64],
    truncation: Truncation,
) -> Result<FreeEnergyResult> {
    DirectionalModel::one_dim(generators)?.evaluate(r, beta, truncation)
}

/// F_r(β) on ℕ^d with chains cut off by the j-th coordinate.
pub fn free_energy_directional(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    truncation: Truncation,
) -> Result<FreeEnergyResult> {
    DirectionalModel::new(spec, j)?.evaluate(r, beta, truncation)
}

/// dF_r/dβ for the directional free energy.
pub fn free_energy_derivative(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    truncation: Truncation,
) -> Result<f64> {
    DirectionalModel::new(spec, j)?.derivative(r, beta, truncation)
}

/// The rank-capped free energy as a d-fold sum over multi-indices k ≤ `k_cap`:
/// Σ W_k log E_{b_k+1} / Σ W_k b_k with W_k = ∏ₛ (1/ℓ^(s)_{k_s} − 1/ℓ^(s)_{k_s+1}).
///
/// The remainder beyond the cap is not bounded, so `tail_bound` is infinite.
pub fn free_energy_general(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    k_cap: usize,
) -> Result<FreeEnergyResult> {
    GeneralModel::new(spec, j, k_cap)?.evaluate(r, beta)
}

/// Precomputed b-counts and weights for [`free_energy_general`].
#[derive(Clone, Debug)]
pub struct GeneralModel {
    k_cap: usize,
    /// (b, W) for every cell with nonzero weight.
    cells: Vec<(usize, f64)>,
    inverse_gamma: f64,
}

impl GeneralModel {
    pub fn new(spec: &SemigroupSpec, j: Direction, k_cap: usize) -> Result<Self> {
        let table = BCountTable::new(spec, j, k_cap)?;
        let caps: Vec<usize> = (0..spec.dim())
            .map(|s| table.max_index(s).min(k_cap))
            .collect();
        let inv: Vec<Vec<f64>> = (0..spec.dim())
            .map(|s| {
                spec.section(s)
                    .first_elements(caps[s] + 1)
                    .iter()
                    .map(|&l| 1.0 / l as f64)
                    .collect()
            })
            .collect();
        let weight = |s: usize, k: usize| inv[s][k - 1] - inv[s].get(k).copied().unwrap_or(0.0);
        let mut cells = Vec::new();
        let mut index = vec![1usize; spec.dim()];
        loop {
            let w: f64 = index.iter().enumerate().map(|(s, &k)| weight(s, k)).product();
            if w > 0.0 {
                cells.push((table.get(&index)?, w));
            }
            if !advance(&mut index, &caps) {
                break;
            }
        }
        Ok(GeneralModel {
            k_cap,
            cells,
            inverse_gamma: spec
                .section(j.index())
                .gamma()
                .recip()
                .to_f64()
                .unwrap_or(f64::NAN),
        })
    }

    pub fn evaluate(&self, r: f64, beta: f64) -> Result<FreeEnergyResult> {
        check_bias(r)?;
        let mut log_e: BTreeMap<usize, f64> = BTreeMap::new();
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for &(b, w) in self.cells.iter().rev() {
            let le = match log_e.get(&b) {
                Some(&x) => x,
                None => {
                    let x = chain_log_expectation(r, beta, b + 1)?;
                    log_e.insert(b, x);
                    x
                }
            };
            num.add(w * le);
            den.add(w * b as f64);
        }
        Ok(FreeEnergyResult {
            value: num.value() / den.value(),
            beta,
            r,
            truncation_k: self.k_cap,
            tail_bound: f64::INFINITY,
            terms: Vec::new(),
            inverse_gamma: self.inverse_gamma,
        })
    }
}

/// log E_r[e^{βS}] over a finite box, with the number of summands of S.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiniteVolumeMgf {
    pub log_expectation: f64,
    /// Number of terms σσ′ in S, i.e. of bonds.
    pub summands: u128,
    /// N₁⋯N_d.
    pub volume: u128,
}

impl FiniteVolumeMgf {
    /// log E_r[e^{βS}] per summand.
    pub fn per_summand(&self) -> f64 {
        self.log_expectation / self.summands as f64
    }

    /// log E_r[e^{βS}] per site of the box.
    pub fn per_volume(&self) -> f64 {
        self.log_expectation / self.volume as f64
    }
}

/// Exact log E_r[e^{βS}] over a box, from the chain-length census.
pub fn finite_log_mgf(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    lattice_box: &LatticeBox,
    j: Direction,
    convention: Convention,
) -> Result<FiniteVolumeMgf> {
    check_bias(r)?;
    let census = chain_length_census(lattice_box, spec, j, convention)?;
    let mut total = CompensatedSum::new();
    let mut summands = 0u128;
    for (&len, &count) in &census {
        total.add(count as f64 * chain_log_expectation(r, beta, len + 1)?);
        summands += count * len as u128;
    }
    Ok(FiniteVolumeMgf {
        log_expectation: total.value(),
        summands,
        volume: lattice_box.volume(),
    })
}

/// (1/T)·log E_r[e^{βS}] with T the number of summands of S, coordinate cap.
pub fn finite_mgf(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    lattice_box: &LatticeBox,
    j: Direction,
) -> Result<f64> {
    Ok(finite_log_mgf(r, beta, spec, lattice_box, j, Convention::CoordinateCap)?.per_summand())
}
