use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::spec::{Direction, SemigroupSpec, Site};
use crate::error::{Error, Result};

/// A box {1..N₁}×⋯×{1..N_d} of the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeBox(Vec<u64>);

impl LatticeBox {
    pub fn new(sides: Vec<u64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidParameter("box needs at least one side".into()));
        }
        if sides.contains(&0) {
            return Err(Error::InvalidParameter("box sides must be positive".into()));
        }
        Ok(LatticeBox(sides))
    }

    pub fn cube(d: usize, n: u64) -> Result<Self> {
        LatticeBox::new(vec![n; d])
    }

    pub fn sides(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// N₁⋯N_d, saturating.
    pub fn volume(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
    }

    pub fn contains(&self, site: &Site) -> bool {
        site.dim() == self.dim() && site.within(&self.0)
    }

    pub(crate) fn check_dim(&self, spec: &SemigroupSpec) -> Result<()> {
        if self.dim() != spec.dim() {
            return Err(Error::InvalidParameter(format!(
                "box has {} sides but the lattice has dimension {}",
                self.dim(),
                spec.dim()
            )));
        }
        Ok(())
    }

    /// Every site of the box in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let d = self.dim();
        let mut current: Option<Vec<u64>> = Some(vec![1; d]);
        std::iter::from_fn(move || {
            let out = current.clone()?;
            let mut next = out.clone();
            let mut s = d;
            loop {
                if s == 0 {
                    current = None;
                    break;
                }
                s -= 1;
                if next[s] < self.0[s] {
                    next[s] += 1;
                    current = Some(next);
                    break;
                }
                next[s] = 1;
            }
            Some(Site::new(out))
        })
    }
}

impl FromStr for LatticeBox {
    type Err = Error;

    /// Accepts `8`, `4,9` or `4x9`.
    fn from_str(s: &str) -> Result<Self> {
        let sides = s
            .split([',', 'x', 'X'])
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("bad box side `{part}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        LatticeBox::new(sides)
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// How a chain is cut off by a finite box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Keep members whose j-th coordinate fits in N_j.
    #[default]
    CoordinateCap,
    /// Keep the first b members in the j-order, where b is the rank of the
    /// j-largest member lying inside the whole box.
    RankCap,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coordinate-cap" | "coordinate" => Ok(Convention::CoordinateCap),
            "rank-cap" | "rank" => Ok(Convention::RankCap),
            other => Err(Error::Config(format!("unknown convention `{other}`"))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::CoordinateCap => "coordinate-cap",
            Convention::RankCap => "rank-cap",
        })
    }
}

/// A lattice point written as root · p₁^{ℓ₁}⋯p_k^{ℓ_k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub root: Site,
    pub exponents: Vec<u32>,
}

/// True iff for every generator some coordinate of `i` is not divisible by it.
pub fn is_root(i: &Site, spec: &SemigroupSpec) -> bool {
    spec.generators().iter().all(|p| {
        p.iter()
            .zip(i.coords())
            .any(|(&ps, &is)| is % ps != 0)
    })
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Splits `i` into its root and the exponents of each generator.
pub fn factor_index(i: &Site, spec: &SemigroupSpec) -> Result<Factorization> {
    if i.dim() != spec.dim() {
        return Err(Error::InvalidParameter(format!(
            "site {i} does not have dimension {}",
            spec.dim()
        )));
    }
    if i.coords().contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "site {i} has a zero coordinate"
        )));
    }
    let mut root = i.coords().to_vec();
    let mut exponents = Vec::with_capacity(spec.num_generators());
    for p in spec.generators() {
        let ell = p
            .iter()
            .zip(&root)
            .filter(|(&ps, _)| ps >= 2)
            .map(|(&ps, &x)| valuation(x, ps))
            .min()
            .unwrap_or(0);
        for (x, &ps) in root.iter_mut().zip(p) {
            *x /= ps.pow(ell);
        }
        exponents.push(ell);
    }
    Ok(Factorization {
        root: Site::new(root),
        exponents,
    })
}

/// Coordinates of p₁^{e₁}⋯p_k^{e_k}, saturating at `u128::MAX`.
pub(crate) fn element_coords(spec: &SemigroupSpec, exponents: &[u32]) -> Vec<u128> {
    (0..spec.dim())
        .map(|s| {
            spec.generators()
                .iter()
                .zip(exponents)
                .fold(1u128, |acc, (p, &e)| {
                    acc.saturating_mul((p[s] as u128).saturating_pow(e))
                })
        })
        .collect()
}

/// 1-based position of `i` in its chain under the j-order.
pub fn chain_index_j(i: &Site, spec: &SemigroupSpec, j: Direction) -> Result<usize> {
    spec.check_direction(j)?;
    let f = factor_index(i, spec)?;
    let g = element_coords(spec, &f.exponents);
    let gj = g[j.index()];
    if gj == u128::MAX {
        return Err(Error::Overflow("chain position"));
    }
    Ok(spec.section(j.index()).count_up_to(gj))
}

/// An element of G with its exponent vector and coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub exponents: Vec<u32>,
    /// Coordinates, saturating at `u128::MAX`.
    pub coords: Vec<u128>,
}

/// The elements of G listed in increasing j-order, i.e. by j-th coordinate.
#[derive(Clone, Debug)]
pub struct OrderedGroup {
    direction: Direction,
    elements: Vec<GroupElement>,
}

impl OrderedGroup {
    /// All elements whose j-th coordinate is at most `bound`.
    pub fn up_to(spec: &SemigroupSpec, j: Direction, bound: u128) -> Result<Self> {
        spec.check_direction(j)?;
        let js = j.index();
        let entries = spec.coordinate_entries(js);
        let mut elements = Vec::new();
        let mut exps = vec![0u32; entries.len()];
        collect_elements(spec, &entries, bound, 0, 1, &mut exps, &mut elements);
        elements.sort_by_key(|e: &GroupElement| e.coords[js]);
        Ok(OrderedGroup {
            direction: j,
            elements,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn collect_elements(
    spec: &SemigroupSpec,
    entries: &[u64],
    bound: u128,
    t: usize,
    value: u128,
    exps: &mut Vec<u32>,
    out: &mut Vec<GroupElement>,
) {
    if t == entries.len() {
        out.push(GroupElement {
            exponents: exps.clone(),
            coords: element_coords(spec, exps),
        });
        return;
    }
    let p = entries[t] as u128;
    let mut v = value;
    let mut e = 0;
    loop {
        exps[t] = e;
        collect_elements(spec, entries, bound, t + 1, v, exps, out);
        match v.checked_mul(p).filter(|&x| x <= bound) {
            Some(x) => {
                v = x;
                e += 1;
            }
            None => break,
        }
    }
    exps[t] = 0;
}

/// A root together with the members of its chain retained by a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub root: Site,
    /// Members in j-order, starting with the root.
    pub members: Vec<Site>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A finite box split into multiplicative chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub lattice_box: LatticeBox,
    pub direction: Direction,
    pub convention: Convention,
    pub chains: Vec<Chain>,
    /// Chain length → number of chains.
    pub census: BTreeMap<usize, u64>,
}

impl ChainDecomposition {
    pub fn roots(&self) -> impl Iterator<Item = &Site> {
        self.chains.iter().map(|c| &c.root)
    }

    pub fn retained_count(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }
}

/// Decomposes `lattice_box` into chains cut off by the j-th coordinate.
pub fn decompose_box(
    lattice_box: &LatticeBox,
    spec: &SemigroupSpec,
    j: Direction,
) -> Result<ChainDecomposition> {
    decompose_box_with(lattice_box, spec, j, Convention::CoordinateCap)
}

pub fn decompose_box_with(
    lattice_box: &LatticeBox,
    spec: &SemigroupSpec,
    j: Direction,
    convention: Convention,
) -> Result<ChainDecomposition> {
    lattice_box.check_dim(spec)?;
    let js = j.index();
    let group = OrderedGroup::up_to(spec, j, lattice_box.sides()[js] as u128)?;
    let sides = lattice_box.sides();
    let mut chains = Vec::new();
    let mut census = BTreeMap::new();
    for root in lattice_box.sites().filter(|i| is_root(i, spec)) {
        let cap = (sides[js] / root.coords()[js]) as u128;
        let capped = group.elements().iter().take_while(|g| g.coords[js] <= cap);
        let keep = match convention {
            Convention::CoordinateCap => capped.count(),
            Convention::RankCap => capped
                .enumerate()
                .filter(|(_, g)| {
                    root.scaled(&g.coords)
                        .is_some_and(|m| m.within(sides))
                })
                .map(|(rank, _)| rank + 1)
                .last()
                .unwrap_or(0),
        };
        if keep == 0 {
            continue;
        }
        let members = group.elements()[..keep]
            .iter()
            .map(|g| root.scaled(&g.coords).ok_or(Error::Overflow("chain member")))
            .collect::<Result<Vec<_>>>()?;
        *census.entry(members.len()).or_insert(0) += 1;
        chains.push(Chain { root, members });
    }
    Ok(ChainDecomposition {
        lattice_box: lattice_box.clone(),
        direction: j,
        convention,
        chains,
        census,
    })
}

/// Number of elements of G up to the j-largest element of G lying in the box
/// ℓ^(1)_{k₁}×⋯×ℓ^(d)_{k_d}.
pub fn b_count(spec: &SemigroupSpec, j: Direction, k: &[usize]) -> Result<usize> {
    let table = BCountTable::new(spec, j, k.iter().copied().max().unwrap_or(1))?;
    table.get(k)
}

/// Precomputed data for evaluating many b-counts with indices up to a cap.
#[derive(Clone, Debug)]
pub struct BCountTable {
    direction: Direction,
    /// ℓ^(s)_1..ℓ^(s)_{cap} per coordinate (shorter for trivial sections).
    sections: Vec<Vec<u128>>,
    group: OrderedGroup,
}

impl BCountTable {
    pub fn new(spec: &SemigroupSpec, j: Direction, cap: usize) -> Result<Self> {
        spec.check_direction(j)?;
        if cap == 0 {
            return Err(Error::InvalidParameter("index cap must be positive".into()));
        }
        let sections: Vec<Vec<u128>> = (0..spec.dim())
            .map(|s| spec.section(s).first_elements(cap))
            .collect();
        let top = *sections[j.index()].last().unwrap_or(&1);
        let group = OrderedGroup::up_to(spec, j, top)?;
        Ok(BCountTable {
            direction: j,
            sections,
            group,
        })
    }

    /// Largest usable index in coordinate `s` (0-based).
    pub fn max_index(&self, s: usize) -> usize {
        self.sections[s].len()
    }

    pub fn section_elements(&self, s: usize) -> &[u128] {
        &self.sections[s]
    }

    pub fn get(&self, k: &[usize]) -> Result<usize> {
        if k.len() != self.sections.len() {
            return Err(Error::InvalidParameter(format!(
                "multi-index has {} entries, expected {}",
                k.len(),
                self.sections.len()
            )));
        }
        let corner = k
            .iter()
            .enumerate()
            .map(|(s, &ks)| {
                if ks == 0 || ks > self.sections[s].len() {
                    Err(Error::InvalidParameter(format!(
                        "index {ks} in coordinate {} is outside 1..={}",
                        s + 1,
                        self.sections[s].len()
                    )))
                } else {
                    Ok(self.sections[s][ks - 1])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let js = self.direction.index();
        let top = k[js].min(self.group.len());
        let rank = (0..top)
            .rev()
            .find(|&r| {
                self.group.elements()[r]
                    .coords
                    .iter()
                    .zip(&corner)
                    .all(|(g, c)| g <= c)
            })
            .map(|r| r + 1)
            .unwrap_or(1);
        Ok(rank)
    }
}
