//! Transfer-matrix quantities of the free-boundary Ising chain.
//!
//! The transfer matrix is M = [[e^{β+h}, e^{−β}], [e^{−β}, e^{β−h}]] and the
//! boundary vector is v = (e^{h/2}, e^{−h/2}).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chains up to this many spins are summed by direct iteration.
pub const DIRECT_ITERATION_LIMIT: usize = 64;

/// A single Ising spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn value(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn from_bit(bit: bool) -> Spin {
        if bit {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

impl TryFrom<i64> for Spin {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Spin::Up),
            -1 => Ok(Spin::Down),
            other => Err(Error::InvalidSpin(other)),
        }
    }
}

impl From<Spin> for i64 {
    fn from(s: Spin) -> i64 {
        s.value() as i64
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// h = ½ log(r/(1−r)).
pub fn field_from_bias(r: f64) -> Result<f64> {
    check_bias(r)?;
    Ok(0.5 * (r.ln() - (1.0 - r).ln()))
}

pub(crate) fn check_bias(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::BiasOutOfRange(r))
    }
}

/// Spectral data of M at (β, h).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    pub beta: f64,
    pub h: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// The boundary vector v.
    pub v: [f64; 2],
    /// Unit eigenvector for Λ₊ with positive entries.
    pub e_plus: [f64; 2],
    /// |vᵀe₊|².
    pub overlap: f64,
    /// |vᵀe₋|² = 2cosh h − |vᵀe₊|².
    pub overlap_minus: f64,
    /// e₊ ∝ (1, −t); t < 0.
    t: f64,
    /// √(sinh²h + e^{−4β}).
    root: f64,
}

impl SpectralData {
    /// Λ₋/Λ₊, which lies in (−1, 1) for finite β.
    pub fn ratio(&self) -> f64 {
        self.lambda_minus / self.lambda_plus
    }

    /// 2cosh h/|vᵀe₊|² − 1.
    pub fn mixing(&self) -> f64 {
        self.overlap_minus / self.overlap
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        transfer_matrix(self.beta, self.h)
    }
}

pub(crate) fn transfer_matrix(beta: f64, h: f64) -> [[f64; 2]; 2] {
    [
        [(beta + h).exp(), (-beta).exp()],
        [(-beta).exp(), (beta - h).exp()],
    ]
}

/// Eigen-decomposition of the transfer matrix.
pub fn spectral(beta: f64, h: f64) -> Result<SpectralData> {
    if !beta.is_finite() || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "beta={beta} and h={h} must be finite"
        )));
    }
    let (sh, ch) = (h.sinh(), h.cosh());
    let e4 = (-4.0 * beta).exp();
    let root = (sh * sh + e4).sqrt();
    let eb = beta.exp();
    let lambda_plus = eb * (ch + root);
    let lambda_minus = eb * (-(-4.0 * beta).exp_m1()) / (ch + root);
    let t = if h < 0.0 {
        (2.0 * beta).exp() * (sh - root)
    } else {
        -(-2.0 * beta).exp() / (sh + root)
    };
    let norm = (1.0 + t * t).sqrt();
    if !t.is_finite() || !norm.is_finite() || norm < 1e-30 {
        return Err(Error::DegenerateEigenvector { beta, h });
    }
    let (a, b) = ((0.5 * h).exp(), (-0.5 * h).exp());
    let overlap = (b * t - a).powi(2) / (1.0 + t * t);
    let overlap_minus = (a * t + b).powi(2) / (1.0 + t * t);
    Ok(SpectralData {
        beta,
        h,
        lambda_plus,
        lambda_minus,
        v: [a, b],
        e_plus: [1.0 / norm, -t / norm],
        overlap,
        overlap_minus,
        t,
        root,
    })
}

/// β-derivatives of the spectral quantities that enter the free energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct SpectralSlopes {
    /// d log Λ₊ / dβ.
    pub log_lambda_plus: f64,
    /// d |vᵀe₊|² / dβ.
    pub overlap: f64,
    /// d(Λ₋/Λ₊)/dβ.
    pub ratio: f64,
    /// d(2cosh h/|vᵀe₊|² − 1)/dβ.
    pub mixing: f64,
}

pub(crate) fn spectral_slopes(sd: &SpectralData) -> SpectralSlopes {
    let (beta, h, s, t) = (sd.beta, sd.h, sd.root, sd.t);
    let (sh, ch) = (h.sinh(), h.cosh());
    let e3 = (-3.0 * beta).exp();
    let e4 = (-4.0 * beta).exp();
    let log_lambda_plus = 1.0 - 2.0 * e4 / (s * (ch + s));
    let dlp = sd.lambda_plus - 2.0 * e3 / s;
    let dlm = sd.lambda_minus + 2.0 * e3 / s;
    let ratio = (dlm * sd.lambda_plus - sd.lambda_minus * dlp) / (sd.lambda_plus * sd.lambda_plus);
    let dt = if h < 0.0 {
        2.0 * t + 2.0 * (-2.0 * beta).exp() / s
    } else {
        2.0 * (-2.0 * beta).exp() * sh / (s * (sh + s))
    };
    let (a, b) = ((0.5 * h).exp(), (-0.5 * h).exp());
    let q = 1.0 + t * t;
    let overlap = 2.0 * (b * t - a) * (b + a * t) / (q * q) * dt;
    let mixing = -2.0 * ch * overlap / (sd.overlap * sd.overlap);
    SpectralSlopes {
        log_lambda_plus,
        overlap,
        ratio,
        mixing,
    }
}

/// Z(β,h,n) = vᵀM^{n−1}v, the partition sum of a free chain of n spins.
pub fn chain_partition(beta: f64, h: f64, n_spins: usize) -> Result<f64> {
    Ok(log_chain_partition(beta, h, n_spins)?.exp())
}

/// log Z(β,h,n); direct iteration for short chains, spectral form beyond.
pub fn log_chain_partition(beta: f64, h: f64, n_spins: usize) -> Result<f64> {
    if n_spins == 0 {
        return Err(Error::InvalidParameter("a chain needs at least one spin".into()));
    }
    if n_spins <= DIRECT_ITERATION_LIMIT {
        log_partition_direct(beta, h, n_spins)
    } else {
        let sd = spectral(beta, h)?;
        Ok(log_partition_spectral(&sd, n_spins))
    }
}

/// Iterates x ← Mx with rescaling, no matrix powers.
pub(crate) fn log_partition_direct(beta: f64, h: f64, n_spins: usize) -> Result<f64> {
    if !beta.is_finite() || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "beta={beta} and h={h} must be finite"
        )));
    }
    let m = transfer_matrix(beta, h);
    let v = [(0.5 * h).exp(), (-0.5 * h).exp()];
    let mut x = v;
    let mut log_scale = 0.0;
    for _ in 1..n_spins {
        let y = [
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
        ];
        let scale = y[0].max(y[1]);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Overflow("chain partition sum"));
        }
        x = [y[0] / scale, y[1] / scale];
        log_scale += scale.ln();
    }
    Ok(log_scale + (v[0] * x[0] + v[1] * x[1]).ln())
}

/// log(|vᵀe₊|²Λ₊^{n−1} + |vᵀe₋|²Λ₋^{n−1}).
pub(crate) fn log_partition_spectral(sd: &SpectralData, n_spins: usize) -> f64 {
    let k = (n_spins - 1) as i32;
    sd.overlap.ln()
        + k as f64 * sd.lambda_plus.ln()
        + (sd.mixing() * sd.ratio().powi(k)).ln_1p()
}

/// log E_r[e^{β Σ σᵢσᵢ₊₁}] over n i.i.d. Bernoulli(r) spins:
/// (n/2) log(r(1−r)) + log Z(β, h(r), n).
pub fn chain_log_expectation(r: f64, beta: f64, n_spins: usize) -> Result<f64> {
    let h = field_from_bias(r)?;
    Ok(0.5 * n_spins as f64 * (r * (1.0 - r)).ln() + log_chain_partition(beta, h, n_spins)?)
}

/// Probability that two neighbouring spins agree under the field-free chain
/// measure, q = e^β/(2cosh β).
pub fn bond_agreement(beta: f64) -> f64 {
    if beta >= 0.0 {
        1.0 / (1.0 + (-2.0 * beta).exp())
    } else {
        let e = (2.0 * beta).exp();
        e / (1.0 + e)
    }
}

/// Probability that two spins `gap` bonds apart agree: (1 + tanh^gap β)/2.
pub fn agreement_at_gap(beta: f64, gap: usize) -> f64 {
    0.5 * (1.0 + beta.tanh().powi(gap as i32))
}

/// −q log q − (1−q) log(1−q) in nats.
pub fn binary_entropy(q: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(q) + term(1.0 - q)
}

/// Probability of the block (τ₀,…,τ_{k−1}) under the field-free Ising chain
/// measure with free left boundary.
pub fn ising_block_probability(beta: f64, block: &[Spin]) -> Result<f64> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let q = bond_agreement(beta);
    Ok(block.windows(2).fold(0.5, |acc, w| {
        acc * if w[0] == w[1] { q } else { 1.0 - q }
    }))
}

/// −E log μ(τ₀,…,τ_{k−1}) = log 2 + (k−1)·H(q).
pub fn ising_block_entropy(beta: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::EmptyBlock);
    }
    Ok(std::f64::consts::LN_2 + (k - 1) as f64 * binary_entropy(bond_agreement(beta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn field_values() {
        assert_eq!(field_from_bias(0.5).unwrap(), 0.0);
        assert!(close(field_from_bias(0.75).unwrap(), 0.5 * 3f64.ln(), 1e-15));
        assert!(close(field_from_bias(0.2).unwrap(), -field_from_bias(0.8).unwrap(), 1e-15));
        assert!(matches!(field_from_bias(1.0), Err(Error::BiasOutOfRange(_))));
        assert!(matches!(field_from_bias(0.0), Err(Error::BiasOutOfRange(_))));
    }

    #[test]
    fn zero_field_spectrum() {
        let b = 0.8;
        let sd = spectral(b, 0.0).unwrap();
        assert!(close(sd.lambda_plus, 2.0 * b.cosh(), 1e-14));
        assert!(close(sd.lambda_minus, 2.0 * b.sinh(), 1e-14));
        assert!(close(sd.overlap, 2.0, 1e-14));
    }

    #[test]
    fn zero_beta_spectrum() {
        let h = 0.4;
        let sd = spectral(0.0, h).unwrap();
        assert!(close(sd.lambda_plus, 2.0 * h.cosh(), 1e-14));
        assert!(sd.lambda_minus.abs() < 1e-15);
    }

    #[test]
    fn determinant_identity() {
        let sd = spectral(0.7, 0.3).unwrap();
        assert!(close(
            sd.lambda_plus * sd.lambda_minus,
            1.4f64.exp() - (-1.4f64).exp(),
            1e-14
        ));
    }

    #[test]
    fn short_chains() {
        let (b, h) = (0.6, -0.35);
        assert!(close(chain_partition(b, h, 1).unwrap(), 2.0 * h.cosh(), 1e-14));
        let z2 = (b + 2.0 * h).exp() + 2.0 * (-b).exp() + (b - 2.0 * h).exp();
        assert!(close(chain_partition(b, h, 2).unwrap(), z2, 1e-14));
    }

    #[test]
    fn chain_expectation_examples() {
        for &r in &[0.1, 0.3, 0.5, 0.9] {
            for n in [1, 2, 5, 80] {
                assert!(chain_log_expectation(r, 0.0, n).unwrap().abs() < 1e-13);
            }
        }
        let b = 1.3;
        assert!(close(chain_log_expectation(0.5, b, 2).unwrap(), b.cosh().ln(), 1e-14));
    }

    #[test]
    fn direct_and_spectral_agree_at_switch() {
        for &(b, h) in &[(0.5, 0.2), (-1.0, 0.7), (2.0, -1.5), (-2.5, -0.1)] {
            let sd = spectral(b, h).unwrap();
            for n in [60, 64, 65, 70] {
                let d = log_partition_direct(b, h, n).unwrap();
                let s = log_partition_spectral(&sd, n);
                assert!(close(d, s, 1e-12), "b={b} h={h} n={n}: {d} vs {s}");
            }
        }
    }

    #[test]
    fn huge_chains_stay_finite() {
        let z = log_chain_partition(3.0, 1.0, 1_000_000).unwrap();
        assert!(z.is_finite());
    }

    #[test]
    fn block_probability_examples() {
        assert_eq!(ising_block_probability(1.7, &[Spin::Up]).unwrap(), 0.5);
        let p = ising_block_probability(0.0, &[Spin::Up, Spin::Down, Spin::Up]).unwrap();
        assert!(close(p, 0.125, 1e-15));
        let b = 1.0f64;
        let p = ising_block_probability(b, &[Spin::Up, Spin::Up]).unwrap();
        assert!(close(p, 0.5 * b.exp() / (2.0 * b.cosh()), 1e-15));
        assert!(matches!(ising_block_probability(1.0, &[]), Err(Error::EmptyBlock)));
    }

    #[test]
    fn block_probability_via_pinned_partition_sums() {
        // μ(+,+) = Σ over free chains of length 2 with both spins pinned / Z
        let b = 0.9f64;
        let z = chain_partition(b, 0.0, 2).unwrap();
        let pinned = b.exp();
        let p = ising_block_probability(b, &[Spin::Up, Spin::Up]).unwrap();
        assert!(close(p, pinned / z, 1e-15));
    }

    #[test]
    fn block_entropy_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!(close(ising_block_entropy(0.0, 3).unwrap(), 3.0 * ln2, 1e-15));
        assert!(close(ising_block_entropy(2.3, 1).unwrap(), ln2, 1e-15));
    }

    fn all_blocks(k: usize) -> impl Iterator<Item = Vec<Spin>> {
        (0u32..1 << k).map(move |x| (0..k).map(|i| Spin::from_bit(x >> i & 1 == 1)).collect())
    }

    #[test]
    fn block_entropy_by_enumeration() {
        for k in 1..=12 {
            for &b in &[0.0, 0.4, 1.0, -0.7] {
                let h: f64 = all_blocks(k)
                    .map(|blk| {
                        let p = ising_block_probability(b, &blk).unwrap();
                        -p * p.ln()
                    })
                    .sum();
                assert!(close(h, ising_block_entropy(b, k).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn gap_agreement_matches_marginal() {
        let b = 0.8;
        let q = bond_agreement(b);
        assert!(close(agreement_at_gap(b, 1), q, 1e-15));
        assert!(close(agreement_at_gap(b, 2), q * q + (1.0 - q) * (1.0 - q), 1e-15));
    }

    proptest! {
        #[test]
        fn spectral_invariants(b in -3.0f64..3.0, h in -2.0f64..2.0) {
            let sd = spectral(b, h).unwrap();
            prop_assert!(sd.lambda_plus > 0.0);
            prop_assert!(sd.lambda_plus >= sd.lambda_minus.abs());
            let det = (2.0 * b).exp() - (-2.0 * b).exp();
            prop_assert!(close(sd.lambda_plus * sd.lambda_minus, det, 1e-12));
            prop_assert!(close(sd.overlap + sd.overlap_minus, 2.0 * h.cosh(), 1e-12));
            let m = sd.matrix();
            let e = sd.e_plus;
            let r0 = m[0][0] * e[0] + m[0][1] * e[1] - sd.lambda_plus * e[0];
            let r1 = m[1][0] * e[0] + m[1][1] * e[1] - sd.lambda_plus * e[1];
            prop_assert!(r0.hypot(r1) < 1e-12 * sd.lambda_plus.max(1.0));
            let dot = sd.v[0] * e[0] + sd.v[1] * e[1];
            prop_assert!(close(dot * dot, sd.overlap, 1e-12));
        }

        #[test]
        fn spectral_reconstruction(b in -3.0f64..3.0, h in -2.0f64..2.0, k in 0usize..=50) {
            let sd = spectral(b, h).unwrap();
            let direct = log_partition_direct(b, h, k + 1).unwrap();
            let spec = log_partition_spectral(&sd, k + 1);
            prop_assert!((direct - spec).abs() < 1e-10 * (1.0 + direct.abs()));
        }

        #[test]
        fn block_measure_is_consistent(b in -2.0f64..2.0, k in 1usize..8) {
            let total: f64 = all_blocks(k)
                .map(|blk| ising_block_probability(b, &blk).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for blk in all_blocks(k) {
                let p = ising_block_probability(b, &blk).unwrap();
                let mut up = blk.clone();
                up.push(Spin::Up);
                let mut down = blk.clone();
                down.push(Spin::Down);
                let marg = ising_block_probability(b, &up).unwrap()
                    + ising_block_probability(b, &down).unwrap();
                prop_assert!((p - marg).abs() < 1e-15);
            }
        }
    }
}
