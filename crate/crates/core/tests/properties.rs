use proptest::prelude::*;

use multising::free_energy::{finite_log_mgf, DirectionalModel, Truncation};
use multising::gibbs::{finite_volume_probability, limit_cylinder_probability, sample_box, CylinderEvent};
use multising::lattice::{Convention, Direction, LatticeBox, SemigroupSpec, Site};
use multising::oracle::{brute_force_cylinder, brute_force_mgf};
use multising::transfer::Spin;

const J: Direction = Direction::FIRST;

fn spins(bits: u32, n: usize) -> Vec<Spin> {
    (0..n).map(|i| Spin::from_bit(bits >> i & 1 == 1)).collect()
}

fn distinct_sites(raw: Vec<u64>) -> Vec<Site> {
    let mut v = raw;
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(Site::scalar).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn finite_mgf_matches_enumeration(
        r in 0.05f64..0.95,
        beta in -2.5f64..2.5,
        n in 1u64..=10,
        rank in any::<bool>(),
    ) {
        let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
        let lb = LatticeBox::new(vec![n]).unwrap();
        let conv = if rank { Convention::RankCap } else { Convention::CoordinateCap };
        let fast = finite_log_mgf(r, beta, &spec, &lb, J, conv).unwrap();
        let exact = brute_force_mgf(r, beta, &spec, &lb, J, conv).unwrap();
        prop_assert_eq!(fast.summands, exact.summands);
        prop_assert!((fast.log_expectation - exact.log_expectation).abs() < 1e-12);
    }

    #[test]
    fn cylinder_matches_enumeration(
        raw in prop::collection::vec(1u64..=14, 1..5),
        bits in any::<u32>(),
        beta in -2.0f64..2.0,
        n in 1u64..=8,
    ) {
        let spec = SemigroupSpec::scalar(&[2]).unwrap();
        let sites = distinct_sites(raw);
        let k = sites.len();
        let event = CylinderEvent::new(sites, spins(bits, k)).unwrap();
        let lb = LatticeBox::new(vec![n]).unwrap();
        for conv in [Convention::CoordinateCap, Convention::RankCap] {
            let fast = finite_volume_probability(&event, beta, &spec, J, &lb, conv).unwrap();
            let exact = brute_force_cylinder(&event, beta, &spec, J, &lb, conv).unwrap();
            prop_assert!((fast - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn large_boxes_reach_the_limit(
        raw in prop::collection::vec(1u64..=60, 1..8),
        bits in any::<u32>(),
        beta in -2.0f64..2.0,
    ) {
        let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
        let sites = distinct_sites(raw);
        let k = sites.len();
        let event = CylinderEvent::new(sites, spins(bits, k)).unwrap();
        let lb = LatticeBox::new(vec![1 << 16]).unwrap();
        let limit = limit_cylinder_probability(&event, beta, &spec, J).unwrap();
        let fin = finite_volume_probability(&event, beta, &spec, J, &lb, Convention::CoordinateCap)
            .unwrap();
        prop_assert!((fin - limit).abs() < 1e-6);
    }

    #[test]
    fn free_energy_is_symmetric_in_the_bias(r in 0.05f64..0.95, beta in -3.0f64..3.0) {
        let m = DirectionalModel::one_dim(&[2, 3, 5]).unwrap();
        let a = m.evaluate(r, beta, Truncation::Tolerance(1e-13)).unwrap().value;
        let b = m.evaluate(1.0 - r, beta, Truncation::Tolerance(1e-13)).unwrap().value;
        prop_assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn sampled_frequencies_match_the_limit() {
    let spec = SemigroupSpec::scalar(&[2, 3]).unwrap();
    let lb = LatticeBox::new(vec![12]).unwrap();
    let beta = 0.6;
    let count = 40_000;
    let sample = sample_box(&lb, beta, &spec, J, 2024, count).unwrap();
    let pos = |x: u64| sample.sites.iter().position(|s| *s == Site::scalar(x)).unwrap();
    let (a, b, c) = (pos(1), pos(4), pos(9));
    let hits = sample
        .configs
        .iter()
        .filter(|row| row[a] == Spin::Up && row[b] == Spin::Up && row[c] == Spin::Down)
        .count() as f64
        / count as f64;
    let event = CylinderEvent::new(
        vec![Site::scalar(1), Site::scalar(4), Site::scalar(9)],
        vec![Spin::Up, Spin::Up, Spin::Down],
    )
    .unwrap();
    let p = limit_cylinder_probability(&event, beta, &spec, J).unwrap();
    let sd = (p * (1.0 - p) / count as f64).sqrt();
    assert!((hits - p).abs() < 4.0 * sd, "{hits} vs {p}");
}
