//! Field-free Gibbs measures: cylinder probabilities, sampling and
//! Kolmogorov–Sinai entropy.
//!
//! Under the limit measure every chain carries an independent copy of the
//! Ising chain with a free left end: the first spin is uniform and each bond
//! agrees with probability q = e^β/(2cosh β), independently.

use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::{DirectionalModel, Truncation};
use crate::lattice::{
    chain_index_j, factor_index, Convention, Direction, LatticeBox, OrderedGroup, SemigroupSpec,
    Site,
};
use crate::transfer::{agreement_at_gap, binary_entropy, bond_agreement, ising_block_entropy, Spin};

/// Largest box volume [`sample_box`] accepts.
pub const SAMPLE_VOLUME_LIMIT: u128 = 10_000_000;

/// Prescribed spins at finitely many distinct sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEvent")]
pub struct CylinderEvent {
    sites: Vec<Site>,
    values: Vec<Spin>,
}

#[derive(Deserialize)]
struct RawEvent {
    sites: Vec<Site>,
    values: Vec<i64>,
}

impl TryFrom<RawEvent> for CylinderEvent {
    type Error = Error;

    fn try_from(raw: RawEvent) -> Result<Self> {
        let values = raw
            .values
            .into_iter()
            .map(Spin::try_from)
            .collect::<Result<Vec<_>>>()?;
        CylinderEvent::new(raw.sites, values)
    }
}

impl CylinderEvent {
    pub fn new(sites: Vec<Site>, values: Vec<Spin>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::InvalidEvent(format!(
                "{} sites but {} values",
                sites.len(),
                values.len()
            )));
        }
        if let Some(first) = sites.first() {
            if sites.iter().any(|s| s.dim() != first.dim()) {
                return Err(Error::InvalidEvent("sites of mixed dimension".into()));
            }
        }
        let mut seen = HashSet::new();
        for s in &sites {
            if s.coords().contains(&0) {
                return Err(Error::InvalidEvent(format!("site {s} has a zero coordinate")));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidEvent(format!("site {s} appears twice")));
            }
        }
        Ok(CylinderEvent { sites, values })
    }

    /// Every listed site set to +1.
    pub fn all_up(sites: Vec<Site>) -> Result<Self> {
        let values = vec![Spin::Up; sites.len()];
        Self::new(sites, values)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn values(&self) -> &[Spin] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// The event with every site multiplied coordinate-wise by `m`.
    pub fn scaled(&self, m: &Site) -> Result<Self> {
        let sites = self
            .sites
            .iter()
            .map(|s| s.checked_mul(m).ok_or(Error::Overflow("scaled site")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites, self.values.clone())
    }

    /// The event without its `index`-th site.
    pub fn without(&self, index: usize) -> Self {
        let mut sites = self.sites.clone();
        let mut values = self.values.clone();
        sites.remove(index);
        values.remove(index);
        CylinderEvent { sites, values }
    }

    pub(crate) fn check_dim(&self, spec: &SemigroupSpec) -> Result<()> {
        match self.sites.first() {
            Some(s) if s.dim() != spec.dim() => Err(Error::InvalidEvent(format!(
                "sites have dimension {} but the lattice has {}",
                s.dim(),
                spec.dim()
            ))),
            _ => Ok(()),
        }
    }
}

/// The part of an event lying on one chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerView {
    pub root: Site,
    /// Chain ranks, strictly increasing.
    pub positions: Vec<usize>,
    pub values: Vec<Spin>,
}

impl LayerView {
    /// Probability of the layer's values under the free-end chain measure.
    pub fn probability(&self, beta: f64) -> f64 {
        let mut p = 0.5;
        for w in 0..self.positions.len().saturating_sub(1) {
            let gap = self.positions[w + 1] - self.positions[w];
            let agree = agreement_at_gap(beta, gap);
            p *= if self.values[w] == self.values[w + 1] {
                agree
            } else {
                1.0 - agree
            };
        }
        p
    }
}

/// Splits an event into its chains, ordered by root.
pub fn layers(event: &CylinderEvent, spec: &SemigroupSpec, j: Direction) -> Result<Vec<LayerView>> {
    event.check_dim(spec)?;
    let mut by_root: BTreeMap<Site, Vec<(usize, Spin)>> = BTreeMap::new();
    for (site, &value) in event.sites().iter().zip(event.values()) {
        let root = factor_index(site, spec)?.root;
        let rank = chain_index_j(site, spec, j)?;
        by_root.entry(root).or_default().push((rank, value));
    }
    Ok(by_root
        .into_iter()
        .map(|(root, mut entries)| {
            entries.sort_by_key(|e| e.0);
            LayerView {
                root,
                positions: entries.iter().map(|e| e.0).collect(),
                values: entries.iter().map(|e| e.1).collect(),
            }
        })
        .collect())
}

/// μ∞(event) as a product over independent chains.
pub fn limit_cylinder_probability(
    event: &CylinderEvent,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
) -> Result<f64> {
    Ok(layers(event, spec, j)?
        .iter()
        .map(|l| l.probability(beta))
        .product())
}

/// Number of spins of the chain rooted at `root` that the box couples:
/// the retained members plus the successor of the last one.
fn coupled_spins(
    root: &Site,
    group: &OrderedGroup,
    lattice_box: &LatticeBox,
    j: Direction,
    convention: Convention,
) -> usize {
    let sides = lattice_box.sides();
    if !root.within(sides) {
        return 0;
    }
    let cap = (sides[j.index()] / root.coords()[j.index()]) as u128;
    let capped = group
        .elements()
        .iter()
        .take_while(|g| g.coords[j.index()] <= cap);
    let kept = match convention {
        Convention::CoordinateCap => capped.count(),
        Convention::RankCap => capped
            .enumerate()
            .filter(|(_, g)| {
                root.coords()
                    .iter()
                    .zip(&g.coords)
                    .zip(sides)
                    .all(|((&x, &gs), &n)| (x as u128).saturating_mul(gs) <= n as u128)
            })
            .map(|(rank, _)| rank + 1)
            .last()
            .unwrap_or(0),
    };
    if kept == 0 {
        0
    } else {
        kept + 1
    }
}

/// μ_N(event) for the finite-volume Gibbs measure of the box.
///
/// The coupled spins of each chain form a free-end Ising path; spins the box
/// does not couple are independent and uniform.
pub fn finite_volume_probability(
    event: &CylinderEvent,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    lattice_box: &LatticeBox,
    convention: Convention,
) -> Result<f64> {
    lattice_box.check_dim(spec)?;
    let group = OrderedGroup::up_to(spec, j, lattice_box.sides()[j.index()] as u128)?;
    let mut p = 1.0;
    for layer in layers(event, spec, j)? {
        let coupled = coupled_spins(&layer.root, &group, lattice_box, j, convention);
        let inside = layer.positions.iter().filter(|&&r| r <= coupled).count();
        let path = LayerView {
            root: layer.root.clone(),
            positions: layer.positions[..inside].to_vec(),
            values: layer.values[..inside].to_vec(),
        };
        if inside > 0 {
            p *= path.probability(beta);
        }
        p *= 0.5f64.powi((layer.positions.len() - inside) as i32);
    }
    Ok(p)
}

/// |μ∞(m·event) − μ∞(event)|.
pub fn check_multiplication_invariance(
    event: &CylinderEvent,
    m: &Site,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
) -> Result<f64> {
    let moved = event.scaled(m)?;
    let a = limit_cylinder_probability(event, beta, spec, j)?;
    let b = limit_cylinder_probability(&moved, beta, spec, j)?;
    Ok((a - b).abs())
}

/// Spin configurations of a box drawn from the limit measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSample {
    /// Box sites in lexicographic order.
    pub sites: Vec<Site>,
    /// One row per configuration, aligned with `sites`.
    pub configs: Vec<Vec<Spin>>,
}

/// Draws `count` independent configurations of the box.
///
/// Configuration `i` uses a ChaCha8 stream `i` seeded by `seed`, so the
/// output does not depend on the thread count.
pub fn sample_box(
    lattice_box: &LatticeBox,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    seed: u64,
    count: usize,
) -> Result<BoxSample> {
    lattice_box.check_dim(spec)?;
    spec.check_direction(j)?;
    if lattice_box.volume() > SAMPLE_VOLUME_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "box volume {} exceeds the sampling limit {SAMPLE_VOLUME_LIMIT}",
            lattice_box.volume()
        )));
    }
    let sites: Vec<Site> = lattice_box.sites().collect();
    let mut chains: BTreeMap<Site, Vec<(usize, usize)>> = BTreeMap::new();
    for (idx, site) in sites.iter().enumerate() {
        let root = factor_index(site, spec)?.root;
        let rank = chain_index_j(site, spec, j)?;
        chains.entry(root).or_default().push((rank, idx));
    }
    let chains: Vec<Vec<(usize, usize)>> = chains
        .into_values()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    let configs = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut row = vec![Spin::Up; sites.len()];
            for chain in &chains {
                let mut prev: Option<(usize, Spin)> = None;
                for &(rank, idx) in chain {
                    let spin = match prev {
                        None => Spin::from_bit(rng.random_bool(0.5)),
                        Some((r0, s0)) => {
                            if rng.random_bool(agreement_at_gap(beta, rank - r0)) {
                                s0
                            } else {
                                s0.flipped()
                            }
                        }
                    };
                    row[idx] = spin;
                    prev = Some((rank, spin));
                }
            }
            row
        })
        .collect();
    Ok(BoxSample { sites, configs })
}

/// An entropy series value with its truncation data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsEntropy {
    pub value: f64,
    pub truncation_k: usize,
    /// The omitted remainder (exact up to rounding).
    pub tail_bound: f64,
}

/// Σ_k (P−1)²/P^{k+1}·H_k for a single generator p with P = p₁⋯p_d, where H_k
/// is the entropy of an Ising block of k spins.
pub fn ks_entropy_2multiple(beta: f64, p: &[u64]) -> Result<KsEntropy> {
    if p.is_empty() || p.contains(&0) {
        return Err(Error::InvalidParameter("generator entries must be positive".into()));
    }
    if p.iter().all(|&x| x == 1) {
        return Err(Error::DegenerateGenerator { index: 1 });
    }
    let big_p = p.iter().map(|&x| x as f64).product::<f64>();
    let x = 1.0 / big_p;
    let ln2 = std::f64::consts::LN_2;
    // ln 2 · Σ_{k>K} k·w_k bounds the remainder since H_k ≤ k ln 2
    let tail = |k: usize| -> f64 {
        let kf = k as f64;
        ln2 * (big_p - 1.0).powi(2) * x * x.powi(k as i32 + 1) * ((kf + 1.0) - kf * x)
            / ((1.0 - x) * (1.0 - x))
    };
    let mut terms = Vec::new();
    let mut w = (big_p - 1.0).powi(2) * x * x;
    let mut k = 0;
    while tail(k) > 1e-18 && k < 10_000 {
        k += 1;
        terms.push(w * ising_block_entropy(beta, k)?);
        w *= x;
    }
    let value = terms.iter().rev().sum();
    Ok(KsEntropy {
        value,
        truncation_k: k,
        tail_bound: tail(k),
    })
}

/// ((P−1)/P)·log 2 + H(q)/P.
pub fn ks_entropy_2multiple_closed(beta: f64, p: &[u64]) -> f64 {
    let big_p = p.iter().map(|&x| x as f64).product::<f64>();
    (big_p - 1.0) / big_p * std::f64::consts::LN_2 + binary_entropy(bond_agreement(beta)) / big_p
}

/// Entropy per retained site in direction j: (1/γ(S^(j)))·Σ_k w_k H_k with
/// w_k = 1/ℓ^(j)_k − 1/ℓ^(j)_{k+1}.
pub fn ks_entropy_directional(
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    truncation: Truncation,
) -> Result<KsEntropy> {
    let truncation = truncation.validate()?;
    let model = DirectionalModel::new(spec, j)?;
    let g = model.inverse_gamma();
    let gamma = spec.section(j.index()).gamma().to_f64().unwrap_or(f64::NAN);
    let ln2 = std::f64::consts::LN_2;
    let hq = binary_entropy(bond_agreement(beta));
    // Σ w_k = 1 and Σ (k−1) w_k = γ − 1
    let mut partial_weight = 0.0;
    let mut partial_moment = 0.0;
    let remainder = |pw: f64, pm: f64| -> f64 {
        (g * (ln2 * (1.0 - pw) + hq * (gamma - 1.0 - pm))).max(0.0)
    };
    let kmax = match truncation {
        Truncation::Tolerance(_) => model.max_terms(),
        Truncation::Terms(n) => n.min(model.max_terms()),
    };
    let mut terms = Vec::new();
    let mut k = 0;
    while k < kmax {
        if let Truncation::Tolerance(tol) = truncation {
            if remainder(partial_weight, partial_moment) <= tol {
                break;
            }
        }
        k += 1;
        let w = model.weight(k);
        partial_weight += w;
        partial_moment += (k - 1) as f64 * w;
        terms.push(g * w * ising_block_entropy(beta, k)?);
    }
    let result = KsEntropy {
        value: terms.iter().rev().sum(),
        truncation_k: k,
        tail_bound: remainder(partial_weight, partial_moment),
    };
    match truncation {
        Truncation::Tolerance(tol) if result.tail_bound > tol => {
            Err(Error::EntropyToleranceTooTight {
                requested: tol,
                achieved: result.tail_bound,
                best_effort: result,
            })
        }
        _ => Ok(result),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::validate_generators;

    fn s(x: u64) -> Site {
        Site::scalar(x)
    }

    fn ev(sites: &[u64], values: &[i64]) -> CylinderEvent {
        CylinderEvent::new(
            sites.iter().map(|&x| s(x)).collect(),
            values.iter().map(|&v| Spin::try_from(v).unwrap()).collect(),
        )
        .unwrap()
    }

    fn two() -> SemigroupSpec {
        SemigroupSpec::scalar(&[2]).unwrap()
    }

    const J: Direction = Direction::FIRST;

    #[test]
    fn event_validation() {
        assert!(CylinderEvent::new(vec![s(1), s(1)], vec![Spin::Up, Spin::Up]).is_err());
        assert!(CylinderEvent::new(vec![s(1)], vec![]).is_err());
        let json = r#"{"sites": [[1],[2]], "values": [1, -1]}"#;
        let e: CylinderEvent = serde_json::from_str(json).unwrap();
        assert_eq!(e.values(), &[Spin::Up, Spin::Down]);
        assert!(serde_json::from_str::<CylinderEvent>(r#"{"sites": [[1]], "values": [2]}"#).is_err());
    }

    #[test]
    fn limit_examples() {
        let b = 0.9;
        let q = bond_agreement(b);
        let p = limit_cylinder_probability(&ev(&[1, 2, 4], &[1, 1, 1]), b, &two(), J).unwrap();
        assert!((p - 0.5 * q * q).abs() < 1e-15);
        let p = limit_cylinder_probability(&ev(&[3, 5], &[1, 1]), b, &two(), J).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        let p = limit_cylinder_probability(&ev(&[1, 4], &[1, 1]), b, &two(), J).unwrap();
        assert!((p - 0.5 * (q * q + (1.0 - q) * (1.0 - q))).abs() < 1e-15);
    }

    #[test]
    fn finite_volume_examples() {
        let lb = LatticeBox::new(vec![2]).unwrap();
        let e = ev(&[1, 2, 4], &[1, -1, 1]);
        for conv in [Convention::CoordinateCap, Convention::RankCap] {
            let p = finite_volume_probability(&e, 0.0, &two(), J, &lb, conv).unwrap();
            assert!((p - 0.125).abs() < 1e-15);
            let p = finite_volume_probability(&ev(&[1], &[1]), 1.3, &two(), J, &lb, conv).unwrap();
            assert_eq!(p, 0.5);
        }
        // H = −β(σ₁σ₂ + σ₂σ₄): P(σ₁=σ₂=+1) = e^β·2cosh β / (2·(2cosh β)²)
        let b = 0.7f64;
        let p = finite_volume_probability(
            &ev(&[1, 2], &[1, 1]),
            b,
            &two(),
            J,
            &lb,
            Convention::CoordinateCap,
        )
        .unwrap();
        let expected = b.exp() * 2.0 * b.cosh() / (2.0 * (2.0 * b.cosh()).powi(2));
        assert!((p - expected).abs() < 1e-15);
    }

    #[test]
    fn finite_volume_reaches_the_limit() {
        let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
        let e = ev(&[1, 2, 3, 5, 10, 12], &[1, -1, 1, 1, -1, 1]);
        let limit = limit_cylinder_probability(&e, 0.6, &spec, J).unwrap();
        let lb = LatticeBox::new(vec![5000]).unwrap();
        let fin =
            finite_volume_probability(&e, 0.6, &spec, J, &lb, Convention::CoordinateCap).unwrap();
        assert!((fin - limit).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_consistency() {
        let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
        let e = ev(&[1, 2, 6, 7, 9], &[1, -1, -1, 1, 1]);
        for idx in 0..e.len() {
            let smaller = e.without(idx);
            let mut flipped_values = e.values().to_vec();
            flipped_values[idx] = flipped_values[idx].flipped();
            let flipped = CylinderEvent::new(e.sites().to_vec(), flipped_values).unwrap();
            let a = limit_cylinder_probability(&e, 0.8, &spec, J).unwrap()
                + limit_cylinder_probability(&flipped, 0.8, &spec, J).unwrap();
            let b = limit_cylinder_probability(&smaller, 0.8, &spec, J).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn invariance_examples() {
        let d = check_multiplication_invariance(&ev(&[1, 2], &[1, 1]), &s(3), 0.8, &two(), J)
            .unwrap();
        assert!(d < 1e-12);
        let d = check_multiplication_invariance(
            &ev(&[1, 2, 3, 4, 6], &[1, 1, 1, 1, 1]),
            &s(2),
            0.8,
            &two(),
            J,
        )
        .unwrap();
        assert!(d < 1e-12);
        let d = check_multiplication_invariance(&ev(&[5, 7], &[1, -1]), &s(1), 0.8, &two(), J)
            .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn invariance_fails_for_two_generators() {
        // sites 1,2 sit at ranks 1,2 of ⟨2,3⟩ while 2,4 sit at ranks 2,4
        let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
        let d = check_multiplication_invariance(&ev(&[1, 2], &[1, 1]), &s(2), 0.8, &spec, J)
            .unwrap();
        assert!(d > 1e-3);
    }

    #[test]
    fn sampler_is_reproducible_and_unbiased() {
        let lb = LatticeBox::new(vec![2]).unwrap();
        let a = sample_box(&lb, 1.0, &two(), J, 7, 100_000).unwrap();
        let b = sample_box(&lb, 1.0, &two(), J, 7, 100_000).unwrap();
        assert_eq!(a, b);
        let q = bond_agreement(1.0);
        let n = a.configs.len() as f64;
        let agree = a.configs.iter().filter(|c| c[0] == c[1]).count() as f64 / n;
        assert!((agree - q).abs() < 3.0 * (q * (1.0 - q) / n).sqrt());
    }

    #[test]
    fn sampler_at_zero_beta_is_uniform() {
        let spec = validate_generators(&[vec![2, 3]], 2).unwrap();
        let lb = LatticeBox::new(vec![6, 6]).unwrap();
        let sample = sample_box(&lb, 0.0, &spec, J, 1, 4000).unwrap();
        let total: i64 = sample
            .configs
            .iter()
            .flatten()
            .map(|&s| s.value() as i64)
            .sum();
        let mean = total as f64 / (4000.0 * 36.0);
        assert!(mean.abs() < 0.02);
    }

    #[test]
    fn ks_closed_form() {
        for p in [&[2u64][..], &[3], &[6], &[2, 3]] {
            for &b in &[0.0, 0.5, 1.0, 2.0] {
                let ks = ks_entropy_2multiple(b, p).unwrap();
                assert!((ks.value - ks_entropy_2multiple_closed(b, p)).abs() < 1e-12);
            }
        }
        let ks = ks_entropy_2multiple(0.0, &[2]).unwrap();
        assert!((ks.value - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn ks_directional_matches_single_generator() {
        for p in [2u64, 3, 7] {
            let spec = SemigroupSpec::scalar(&[p]).unwrap();
            for &b in &[0.0, 0.3, 1.5] {
                let a = ks_entropy_directional(b, &spec, J, Truncation::Tolerance(1e-14))
                    .unwrap()
                    .value;
                let e = ks_entropy_2multiple_closed(b, &[p]);
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ks_directional_reports_unreachable_tolerance() {
        // 11-smooth numbers thin out slowly: Σ_{k>10⁵} 1/ℓ_k ≈ 6·10⁻¹¹
        let spec = SemigroupSpec::scalar(&[2, 3, 5, 7, 11]).unwrap();
        match ks_entropy_directional(0.0, &spec, J, Truncation::Tolerance(1e-12)) {
            Err(Error::EntropyToleranceTooTight { achieved, best_effort, .. }) => {
                assert!(achieved > 1e-12 && achieved < 1e-9);
                let ln2 = std::f64::consts::LN_2;
                assert!((best_effort.value + best_effort.tail_bound - ln2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ks_directional_is_bounded_and_monotone() {
        let spec = validate_generators(
            &[vec![2, 3], vec![3, 5], vec![5, 7], vec![7, 11], vec![11, 2]],
            2,
        )
        .unwrap();
        let ln2 = std::f64::consts::LN_2;
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let b = i as f64 * 0.25;
            let ks = ks_entropy_directional(b, &spec, J, Truncation::Tolerance(1e-9)).unwrap();
            assert!(ks.value > 0.0 && ks.value <= ln2 + 1e-12);
            assert!(ks.value <= prev + 1e-12);
            prev = ks.value;
        }
    }
}
