//! Brute-force references by exhaustive enumeration of spin configurations.
//!
//! Nothing here calls the chain, census or transfer-matrix code: site sets
//! come from a naive divisibility test and exponent loops, and every sum runs
//! over all 2^n assignments with definitional weights.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_energy::{finite_log_mgf, FiniteVolumeMgf};
use crate::gibbs::{finite_volume_probability, CylinderEvent};
use crate::lattice::{Convention, Direction, LatticeBox, SemigroupSpec, Site};
use crate::transfer::{chain_log_expectation, ising_block_entropy, Spin};

/// Largest number of spins any oracle enumerates.
pub const ENUMERATION_LIMIT: usize = 24;
/// Largest block length for [`brute_force_block_entropy`].
pub const BLOCK_LIMIT: usize = 20;
/// Spins appended to a block before pinning it.
const PINNING_MARGIN: usize = 2;
const CHUNK_BITS: u32 = 14;

/// Sum with a running error term (Kahan–Babuška).
#[derive(Clone, Copy, Default)]
struct Accumulator {
    hi: f64,
    lo: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        self.lo += (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.push(other.hi);
        self.push(other.lo);
        self
    }

    fn total(self) -> f64 {
        self.hi + self.lo
    }
}

/// Sums `f(config)` over all 2^n configurations in fixed-size chunks, then
/// reduces the chunk totals in index order.
fn enumerate<F>(n: usize, f: F) -> Accumulator
where
    F: Fn(u32) -> f64 + Sync,
{
    let total = 1u64 << n;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks: Vec<Accumulator> = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::default();
            for config in c * chunk..(c + 1) * chunk {
                acc.push(f(config as u32));
            }
            acc
        })
        .collect();
    chunks
        .into_iter()
        .fold(Accumulator::default(), Accumulator::merge)
}

fn spin_of(config: u32, bit: usize) -> i32 {
    if config >> bit & 1 == 1 {
        1
    } else {
        -1
    }
}

/// The spins a finite-volume sum touches and the bonds between them.
#[derive(Clone, Debug)]
pub struct InvolvedSiteSet {
    sites: Vec<Site>,
    index: HashMap<Site, usize>,
    bonds: Vec<(usize, usize)>,
    volume: u128,
}

impl InvolvedSiteSet {
    /// Every box site's chain, cut according to `convention`, plus the
    /// successor of the last kept member.
    pub fn for_box(
        spec: &SemigroupSpec,
        j: Direction,
        lattice_box: &LatticeBox,
        convention: Convention,
    ) -> Result<Self> {
        spec.check_direction(j)?;
        let d = spec.dim();
        if lattice_box.dim() != d {
            return Err(Error::DimensionMismatch {
                index: 0,
                found: lattice_box.dim(),
                expected: d,
            });
        }
        let jx = j.get() - 1;
        for (t, g) in spec.generators().iter().enumerate() {
            if g[jx] == 1 {
                return Err(Error::OrderAmbiguity {
                    direction: j.get(),
                    generator: t + 1,
                });
            }
        }
        let sides = lattice_box.sides().to_vec();
        let mut set = InvolvedSiteSet {
            sites: Vec::new(),
            index: HashMap::new(),
            bonds: Vec::new(),
            volume: sides.iter().map(|&n| n as u128).product(),
        };
        let min_step = spec.generators().iter().map(|g| g[jx]).min().unwrap_or(2);
        let mut point = vec![1u64; d];
        loop {
            if naive_root(&point, spec) {
                let root = point.clone();
                let cap = sides[jx] / root[jx];
                let in_box = |c: &[u64]| c.iter().zip(&sides).all(|(x, n)| x <= n);
                let candidates = chain_members(&root, spec, jx, cap.saturating_mul(min_step))?;
                let kept = match convention {
                    Convention::CoordinateCap => {
                        candidates.iter().filter(|c| c[jx] / root[jx] <= cap).count()
                    }
                    Convention::RankCap => candidates
                        .iter()
                        .rposition(|c| in_box(c))
                        .map_or(0, |p| p + 1),
                };
                let mut prev = None;
                for member in candidates.into_iter().take(kept + 1) {
                    let here = set.insert(Site::new(member));
                    if let Some(p) = prev {
                        set.bonds.push((p, here));
                    }
                    prev = Some(here);
                }
            }
            if !next_point(&mut point, &sides) {
                break;
            }
        }
        set.check()?;
        Ok(set)
    }

    fn insert(&mut self, site: Site) -> usize {
        if let Some(&i) = self.index.get(&site) {
            return i;
        }
        self.sites.push(site.clone());
        self.index.insert(site, self.sites.len() - 1);
        self.sites.len() - 1
    }

    fn check(&self) -> Result<()> {
        if self.sites.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLargeForEnumeration {
                sites: self.sites.len(),
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn position(&self, site: &Site) -> Option<usize> {
        self.index.get(site).copied()
    }

    /// Number of bonds, i.e. of terms in the pair sum.
    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    fn pair_sum(&self, config: u32) -> i32 {
        self.bonds
            .iter()
            .map(|&(a, b)| spin_of(config, a) * spin_of(config, b))
            .sum()
    }
}

/// No generator divides the point coordinate-wise.
fn naive_root(point: &[u64], spec: &SemigroupSpec) -> bool {
    spec.generators()
        .iter()
        .all(|g| g.iter().zip(point).any(|(&p, &x)| x % p != 0))
}

/// Lexicographic successor inside the box.
fn next_point(point: &mut [u64], sides: &[u64]) -> bool {
    for s in (0..point.len()).rev() {
        if point[s] < sides[s] {
            point[s] += 1;
            return true;
        }
        point[s] = 1;
    }
    false
}

/// Members root·∏p_t^{e_t} whose j-coordinate is at most root_j·cap, sorted
/// by j-coordinate.
fn chain_members(root: &[u64], spec: &SemigroupSpec, jx: usize, cap: u64) -> Result<Vec<Vec<u64>>> {
    let gens = spec.generators();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, root.to_vec(), 1u64)];
    while let Some((t, point, scale)) = stack.pop() {
        if t == gens.len() {
            out.push(point);
            continue;
        }
        let mut point = point;
        let mut scale = scale;
        loop {
            stack.push((t + 1, point.clone(), scale));
            let Some(next_scale) = scale.checked_mul(gens[t][jx]).filter(|&s| s <= cap) else {
                break;
            };
            scale = next_scale;
            point = point
                .iter()
                .zip(&gens[t])
                .map(|(&x, &p)| x.checked_mul(p).ok_or(Error::Overflow("chain member")))
                .collect::<Result<_>>()?;
        }
    }
    out.sort_by_key(|c| c[jx]);
    Ok(out)
}

/// log E_r[e^{βS}] over the box by enumerating every configuration of the
/// involved spins; S runs over the bonds of [`InvolvedSiteSet::for_box`].
pub fn brute_force_mgf(
    r: f64,
    beta: f64,
    spec: &SemigroupSpec,
    lattice_box: &LatticeBox,
    j: Direction,
    convention: Convention,
) -> Result<FiniteVolumeMgf> {
    check_prob(r)?;
    let set = InvolvedSiteSet::for_box(spec, j, lattice_box, convention)?;
    let n = set.len();
    let sum = enumerate(n, |config| {
        let up = config.count_ones() as i32;
        r.powi(up) * (1.0 - r).powi(n as i32 - up) * (beta * set.pair_sum(config) as f64).exp()
    });
    Ok(FiniteVolumeMgf {
        log_expectation: sum.total().ln(),
        summands: set.bond_count() as u128,
        volume: set.volume,
    })
}

/// E_r[e^{β Σ σ_kσ_{k+1}}] over a path of n i.i.d. Bernoulli(r) spins.
pub fn brute_force_chain_expectation(r: f64, beta: f64, n: usize) -> Result<f64> {
    check_prob(r)?;
    if n == 0 || n > ENUMERATION_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            sites: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(enumerate(n, |config| {
        let up = config.count_ones() as i32;
        let pairs: i32 = (0..n - 1)
            .map(|k| spin_of(config, k) * spin_of(config, k + 1))
            .sum();
        r.powi(up) * (1.0 - r).powi(n as i32 - up) * (beta * pairs as f64).exp()
    })
    .total())
}

/// μ_N(event) from the Boltzmann weights e^{βS} of all configurations of the
/// involved spins together with the event's own sites.
pub fn brute_force_cylinder(
    event: &CylinderEvent,
    beta: f64,
    spec: &SemigroupSpec,
    j: Direction,
    lattice_box: &LatticeBox,
    convention: Convention,
) -> Result<f64> {
    let mut set = InvolvedSiteSet::for_box(spec, j, lattice_box, convention)?;
    if event.sites().iter().any(|s| s.dim() != spec.dim()) {
        return Err(Error::InvalidEvent("event dimension differs from the lattice".into()));
    }
    let pins: Vec<(usize, Spin)> = event
        .sites()
        .iter()
        .zip(event.values())
        .map(|(s, &v)| (set.insert(s.clone()), v))
        .collect();
    set.check()?;
    let weight = |config: u32| (beta * set.pair_sum(config) as f64).exp();
    let matches = |config: u32| {
        pins.iter()
            .all(|&(bit, v)| spin_of(config, bit) == v.value() as i32)
    };
    let all = enumerate(set.len(), weight).total();
    let hit = enumerate(set.len(), |c| if matches(c) { weight(c) } else { 0.0 }).total();
    Ok(hit / all)
}

/// −Σ p log p over blocks of k spins, where p(τ) is the partition sum of a
/// longer free chain with its first k spins pinned to τ, over the unpinned sum.
pub fn brute_force_block_entropy(beta: f64, k: usize) -> Result<f64> {
    if k == 0 || k > BLOCK_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            sites: k,
            limit: BLOCK_LIMIT,
        });
    }
    let n = k + PINNING_MARGIN;
    let weight = |config: u32| -> f64 {
        let pairs: i32 = (0..n - 1)
            .map(|i| spin_of(config, i) * spin_of(config, i + 1))
            .sum();
        (beta * pairs as f64).exp()
    };
    let z = enumerate(n, weight).total();
    let blocks: Vec<f64> = (0..1u32 << k)
        .into_par_iter()
        .map(|block| {
            let mut pinned = Accumulator::default();
            for tail in 0..1u32 << PINNING_MARGIN {
                pinned.push(weight(block | tail << k));
            }
            pinned.total() / z
        })
        .collect();
    let mut h = Accumulator::default();
    for p in blocks {
        if p > 0.0 {
            h.push(-p * p.ln());
        }
    }
    Ok(h.total())
}

fn check_prob(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::BiasOutOfRange(r))
    }
}

/// One row of the cross-check table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, tolerance: f64, errors: &[f64]) -> Self {
        let max_error = errors.iter().copied().fold(0.0, f64::max);
        Check {
            name: name.to_string(),
            cases: errors.len(),
            max_error,
            tolerance,
            passed: !errors.is_empty() && errors.iter().all(|e| *e <= tolerance),
        }
    }
}

const GRID_R: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const GRID_BETA: [f64; 5] = [-1.5, -0.5, 0.0, 0.7, 2.0];

/// The box cases the oracle can enumerate within `max_sites` spins.
pub fn mgf_cases(max_sites: usize) -> Result<Vec<(SemigroupSpec, LatticeBox, Convention)>> {
    let mut out = Vec::new();
    let one = |g: &[u64]| SemigroupSpec::scalar(g);
    let mut candidates = Vec::new();
    for n in 1..=12 {
        candidates.push((one(&[2])?, LatticeBox::new(vec![n])?));
    }
    for n in 1..=8 {
        candidates.push((one(&[2, 3])?, LatticeBox::new(vec![n])?));
    }
    let diag = SemigroupSpec::new(2, vec![vec![2, 3]])?;
    for sides in [[1, 1], [2, 3], [3, 2], [4, 3], [2, 6], [4, 4]] {
        candidates.push((diag.clone(), LatticeBox::new(sides.to_vec())?));
    }
    for (spec, lb) in candidates {
        for conv in [Convention::CoordinateCap, Convention::RankCap] {
            match InvolvedSiteSet::for_box(&spec, Direction::FIRST, &lb, conv) {
                Ok(set) if set.len() <= max_sites => out.push((spec.clone(), lb.clone(), conv)),
                Ok(_) | Err(Error::TooLargeForEnumeration { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Every analytic quantity with an enumeration reference, compared on all
/// cases with at most `max_sites` spins.
pub fn cross_checks(max_sites: usize) -> Result<Vec<Check>> {
    let max_sites = max_sites.min(ENUMERATION_LIMIT);
    let j = Direction::FIRST;
    let mut checks = Vec::new();

    let mut errs = Vec::new();
    for n in 1..=max_sites.min(12) {
        for &r in &GRID_R {
            for &b in &GRID_BETA {
                let exact = brute_force_chain_expectation(r, b, n)?.ln();
                errs.push((chain_log_expectation(r, b, n)? - exact).abs());
            }
        }
    }
    checks.push(Check::new("chain log-expectation", 1e-12, &errs));

    let cases = mgf_cases(max_sites)?;
    let mut errs = Vec::new();
    for (spec, lb, conv) in &cases {
        for &r in &GRID_R {
            for &b in &GRID_BETA {
                let exact = brute_force_mgf(r, b, spec, lb, j, *conv)?;
                let fast = finite_log_mgf(r, b, spec, lb, j, *conv)?;
                errs.push((fast.log_expectation - exact.log_expectation).abs());
                errs.push(if fast.summands == exact.summands { 0.0 } else { f64::INFINITY });
            }
        }
    }
    checks.push(Check::new("finite-volume log-mgf", 1e-12, &errs));

    let mut errs = Vec::new();
    for (spec, lb, conv) in &cases {
        let set = InvolvedSiteSet::for_box(spec, j, lb, *conv)?;
        if set.len() + 1 > max_sites {
            continue;
        }
        let sites: Vec<Site> = set.sites().iter().take(4).cloned().collect();
        let mut outside = lb.sides().to_vec();
        outside[0] += 7;
        let mut with_free = sites.clone();
        if set.position(&Site::new(outside.clone())).is_none() {
            with_free.push(Site::new(outside));
        }
        for sites in [sites, with_free] {
            for pattern in 0..1u32 << sites.len() {
                let values = (0..sites.len())
                    .map(|i| Spin::from_bit(pattern >> i & 1 == 1))
                    .collect();
                let event = CylinderEvent::new(sites.clone(), values)?;
                for &b in &[-0.9, 0.0, 0.6, 1.7] {
                    let exact = brute_force_cylinder(&event, b, spec, j, lb, *conv)?;
                    let fast = finite_volume_probability(&event, b, spec, j, lb, *conv)?;
                    errs.push((fast - exact).abs());
                }
            }
        }
    }
    checks.push(Check::new("finite-volume cylinder probability", 1e-12, &errs));

    let mut errs = Vec::new();
    for k in 1..=(max_sites.saturating_sub(PINNING_MARGIN)).min(12) {
        for &b in &[0.0, 0.4, 1.0, 2.5, -1.2] {
            errs.push((ising_block_entropy(b, k)? - brute_force_block_entropy(b, k)?).abs());
        }
    }
    checks.push(Check::new("Ising block entropy", 1e-12, &errs));
    Ok(checks)
}
