//! Acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;

use multising::cli;
use multising::error::Error;
use multising::free_energy::{
    finite_mgf, free_energy_1d, free_energy_derivative, free_energy_directional, DirectionalModel,
    Truncation,
};
use multising::gibbs::{
    check_multiplication_invariance, ks_entropy_2multiple, ks_entropy_2multiple_closed,
    CylinderEvent,
};
use multising::lattice::{
    directional_constant, gamma, validate_generators, Convention, Direction, LatticeBox,
    SemigroupSpec, Site,
};
use multising::ldp::rate_function;
use multising::oracle::{brute_force_mgf, InvolvedSiteSet, ENUMERATION_LIMIT};
use multising::presets;
use multising::transfer::Spin;

type Outcome = Result<String, String>;

const J: Direction = Direction::FIRST;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn scalar(g: &[u64]) -> SemigroupSpec {
    SemigroupSpec::scalar(g).unwrap()
}

fn c1_exact_constants() -> Outcome {
    let g = gamma(&[2, 3, 5, 7, 11]);
    let want = BigRational::new(77.into(), 16.into());
    ensure(g == want, || format!("gamma = {g}"))?;
    let (spec, j) = presets::fig2();
    let c = directional_constant(&spec, j).map_err(err)?;
    let want_c = BigRational::new(2261.into(), 660.into());
    ensure(c == want_c, || format!("C = {c}"))?;
    Ok(format!("gamma = {g}, C = {c}"))
}

fn c2_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (name, spec, j) in presets::bundled().map_err(err)? {
        for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let f = free_energy_directional(r, 0.0, &spec, j, Truncation::default())
                .map_err(err)?
                .value;
            ensure(f.abs() < 1e-12, || format!("{name} r={r}: F(0) = {f:e}"))?;
            worst = worst.max(f.abs());
            n += 1;
        }
    }
    Ok(format!("{n} cases, max |F(0)| = {worst:e}"))
}

fn c3_half_bias() -> Outcome {
    let (fig2, j2) = presets::fig2();
    let specs = [
        ("<2>", scalar(&[2]), J),
        ("<2,3>", scalar(&[2, 3]), J),
        ("fig1", presets::fig1(), J),
        ("fig2", fig2, j2),
    ];
    let mut worst: f64 = 0.0;
    for (name, spec, j) in &specs {
        for b in [-2.0f64, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let f = free_energy_directional(0.5, b, spec, *j, Truncation::default())
                .map_err(err)?
                .value;
            let e = (f - b.cosh().ln()).abs();
            ensure(e < 1e-8, || format!("{name} beta={b}: error {e:e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("max error {worst:e}"))
}

fn c4_oracle() -> Outcome {
    let rs = [0.1, 0.3, 0.5, 0.7, 0.9];
    let betas = [-2.0, -0.8, 0.0, 0.6, 1.5];
    let mut boxes: Vec<(SemigroupSpec, LatticeBox)> = Vec::new();
    for n in 1..=12 {
        boxes.push((scalar(&[2]), LatticeBox::new(vec![n]).unwrap()));
    }
    for n in 1..=8 {
        boxes.push((scalar(&[2, 3]), LatticeBox::new(vec![n]).unwrap()));
    }
    let diag = validate_generators(&[vec![2, 3]], 2).unwrap();
    for sides in [[1, 1], [2, 2], [2, 3], [3, 2], [4, 3], [3, 6], [4, 4], [6, 3]] {
        boxes.push((diag.clone(), LatticeBox::new(sides.to_vec()).unwrap()));
    }
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut feasible_2d = 0;
    for (spec, lb) in &boxes {
        match InvolvedSiteSet::for_box(spec, J, lb, Convention::CoordinateCap) {
            Ok(set) if set.len() <= ENUMERATION_LIMIT => {}
            Err(Error::TooLargeForEnumeration { .. }) if spec.dim() == 2 => continue,
            Ok(_) => unreachable!(),
            Err(e) => return Err(format!("{spec} box {lb}: {e}")),
        }
        if spec.dim() == 2 {
            feasible_2d += 1;
        }
        for &r in &rs {
            for &b in &betas {
                let fast = finite_mgf(r, b, spec, lb, J).map_err(err)?;
                let exact = brute_force_mgf(r, b, spec, lb, J, Convention::CoordinateCap)
                    .map_err(err)?
                    .per_summand();
                let e = (fast - exact).abs();
                ensure(e < 1e-12, || format!("{spec} box {lb} r={r} beta={b}: error {e:e}"))?;
                worst = worst.max(e);
                cases += 1;
            }
        }
    }
    ensure(feasible_2d >= 4, || format!("only {feasible_2d} feasible d=2 boxes"))?;
    Ok(format!("{cases} cases, {feasible_2d} d=2 boxes, max error {worst:e}"))
}

fn c5_convergence() -> Outcome {
    let spec = scalar(&[2]);
    let lb = LatticeBox::new(vec![1 << 20]).unwrap();
    let fin = finite_mgf(0.3, 1.0, &spec, &lb, J).map_err(err)?;
    let lim = free_energy_1d(0.3, 1.0, &[2], Truncation::default())
        .map_err(err)?
        .value;
    let e = (fin - lim).abs();
    ensure(e < 1e-2, || format!("error {e:e}"))?;
    Ok(format!("N=2^20: error {e:e}"))
}

/// Displayed closed form: Λ±, v, e₊ from their definitions, with `weight(ℓ)`
/// multiplying log(1 + c(Λ₋/Λ₊)^ℓ) and the leading terms given by
/// `a log(r(1−r)) + b log|vᵀe₊|² + log Λ₊`.
fn displayed_form(r: f64, beta: f64, a: f64, b: f64, weight: impl Fn(usize) -> f64, k: usize) -> f64 {
    let h = 0.5 * (r / (1.0 - r)).ln();
    let root = (h.sinh().powi(2) + (-4.0 * beta).exp()).sqrt();
    let lp = beta.exp() * (h.cosh() + root);
    let lm = beta.exp() * (h.cosh() - root);
    let w = [-(-beta).exp(), (h + beta).exp() - lp];
    let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let e = [w[0] / norm, w[1] / norm];
    let v = [(h / 2.0).exp(), (-h / 2.0).exp()];
    let ve = (v[0] * e[0] + v[1] * e[1]).abs();
    let c = 2.0 * h.cosh() / (ve * ve) - 1.0;
    let g: f64 = (1..=k)
        .map(|l| weight(l) * (1.0 + c * (lm / lp).powi(l as i32)).ln())
        .sum();
    a * (r * (1.0 - r)).ln() + b * (ve * ve).ln() + lp.ln() + g
}

fn c6_reductions() -> Outcome {
    let k = 100;
    let grid_r = [0.15, 0.3, 0.45, 0.6, 0.85];
    let grid_b = [-2.0, -1.0, -0.3, 0.4, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    for &r in &grid_r {
        for &b in &grid_b {
            let ours = free_energy_1d(r, b, &[2], Truncation::Terms(k)).map_err(err)?.value;
            let theirs = displayed_form(r, b, 0.75, 0.5, |l| 0.5 / 2f64.powi(l as i32), k);
            let e = (ours - theirs).abs();
            ensure(e < 1e-10, || format!("<2> r={r} beta={b}: error {e:e}"))?;
            worst = worst.max(e);
        }
    }
    for gen in [vec![6u64, 1], vec![30, 1, 1], vec![3, 1]] {
        let p: f64 = gen.iter().map(|&x| x as f64).product();
        let spec = validate_generators(std::slice::from_ref(&gen), gen.len()).map_err(err)?;
        for &r in &grid_r {
            for &b in &grid_b {
                let ours = free_energy_directional(r, b, &spec, J, Truncation::Terms(k))
                    .map_err(err)?
                    .value;
                let theirs = displayed_form(
                    r,
                    b,
                    (2.0 * p - 1.0) / (2.0 * p),
                    (p - 1.0) / p,
                    |l| (p - 1.0).powi(2) / p.powi(l as i32 + 1),
                    k,
                );
                let e = (ours - theirs).abs();
                ensure(e < 1e-10, || format!("{gen:?} r={r} beta={b}: error {e:e}"))?;
                worst = worst.max(e);
            }
        }
    }
    Ok(format!("max error {worst:e}"))
}

fn c7_derivative() -> Outcome {
    let spec = scalar(&[2, 3]);
    let r = 0.4;
    let tight = Truncation::Tolerance(1e-14);
    let f = |b: f64| free_energy_directional(r, b, &spec, J, tight).map(|x| x.value);
    let mut worst: f64 = 0.0;
    for i in 0..21 {
        let b = -2.0 + 0.2 * i as f64;
        let h = 1e-5;
        let fd = (f(b + h).map_err(err)? - f(b - h).map_err(err)?) / (2.0 * h);
        let d = free_energy_derivative(r, b, &spec, J, tight).map_err(err)?;
        let e = (d - fd).abs();
        ensure(e < 1e-6, || format!("beta={b}: error {e:e}"))?;
        worst = worst.max(e);
    }
    Ok(format!("21 points, max error {worst:e}"))
}

fn c8_legendre() -> Outcome {
    let (fig2, j2) = presets::fig2();
    let models = [
        ("<2>", DirectionalModel::new(&scalar(&[2]), J).map_err(err)?),
        ("<2,3>", DirectionalModel::new(&scalar(&[2, 3]), J).map_err(err)?),
        ("fig1", DirectionalModel::new(&presets::fig1(), J).map_err(err)?),
        ("fig2", DirectionalModel::new(&fig2, j2).map_err(err)?),
    ];
    let mut worst: f64 = 0.0;
    for (name, m) in &models {
        for x in [-0.8f64, -0.5, -0.2, 0.0, 0.2, 0.5, 0.8] {
            let p = rate_function(m, 0.5, x, 1e-10).map_err(err)?;
            let want = 0.5 * ((1.0 + x) * (1.0 + x).ln() + (1.0 - x) * (1.0 - x).ln());
            let e = (p.rate - want).abs();
            ensure(e < 1e-8, || format!("{name} x={x}: error {e:e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("max error {worst:e}"))
}

fn event(sites: Vec<Site>, pattern: u32) -> CylinderEvent {
    let values = (0..sites.len())
        .map(|i| Spin::from_bit(pattern >> i & 1 == 1))
        .collect();
    CylinderEvent::new(sites, values).unwrap()
}

fn c9_invariance() -> Outcome {
    let s = Site::scalar;
    let v = |a: u64, b: u64| Site::new(vec![a, b]);
    let one_dim = [
        vec![s(1), s(2)],
        vec![s(1), s(2), s(3), s(4), s(6)],
        vec![s(1), s(4), s(8)],
        vec![s(3), s(5), s(12)],
        vec![s(1), s(3), s(6), s(9), s(24)],
    ];
    let two_dim = [
        vec![v(1, 1), v(2, 3)],
        vec![v(1, 1), v(4, 9), v(8, 27)],
        vec![v(1, 2), v(2, 6), v(3, 1)],
        vec![v(5, 7), v(10, 21), v(1, 1)],
    ];
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.8, -1.1] {
        for gens in [&[2u64][..], &[3]] {
            let spec = scalar(gens);
            for sites in &one_dim {
                for m in [2, 3, 5, 7] {
                    for pattern in [0u32, 5, 0b10110] {
                        let e = event(sites.clone(), pattern);
                        let d = check_multiplication_invariance(&e, &s(m), beta, &spec, J)
                            .map_err(err)?;
                        ensure(d < 1e-12, || format!("<{gens:?}> m={m} {sites:?}: {d:e}"))?;
                        worst = worst.max(d);
                        cases += 1;
                    }
                }
            }
        }
        let spec = validate_generators(&[vec![2, 3]], 2).unwrap();
        for sites in &two_dim {
            for m in [v(2, 3), v(3, 5)] {
                for pattern in [0u32, 3, 6] {
                    let e = event(sites.clone(), pattern);
                    let d = check_multiplication_invariance(&e, &m, beta, &spec, J).map_err(err)?;
                    ensure(d < 1e-12, || format!("<(2,3)> m={m} {sites:?}: {d:e}"))?;
                    worst = worst.max(d);
                    cases += 1;
                }
            }
        }
    }
    ensure(cases >= 20, || format!("only {cases} cases"))?;
    Ok(format!("{cases} event/multiplier pairs, max difference {worst:e}"))
}

fn c10_ks() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [&[2u64][..], &[3], &[6]] {
        for b in [0.0, 0.5, 1.0, 2.0] {
            let series = ks_entropy_2multiple(b, p).map_err(err)?.value;
            let e = (series - ks_entropy_2multiple_closed(b, p)).abs();
            ensure(e < 1e-10, || format!("p={p:?} beta={b}: error {e:e}"))?;
            worst = worst.max(e);
        }
        let at0 = ks_entropy_2multiple(0.0, p).map_err(err)?.value;
        let e0 = (at0 - std::f64::consts::LN_2).abs();
        ensure(e0 < 1e-12, || format!("p={p:?} beta=0: {at0} vs log 2"))?;
    }
    Ok(format!("max error {worst:e}"))
}

struct CurvePoint {
    r: f64,
    beta: f64,
    f: f64,
    slope: f64,
}

fn preset_curve(flag: &str, dir: &std::path::Path) -> Result<Vec<CurvePoint>, String> {
    let out = dir.join(format!("{}.csv", flag.trim_start_matches('-')));
    let args = ["multising", "curve", flag, "--out", out.to_str().unwrap()];
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = cli::run(args, &mut stdout, &mut stderr);
    ensure(code == 0, || format!("{flag}: exit {code}: {}", String::from_utf8_lossy(&stderr)))?;
    let text = std::fs::read_to_string(&out).map_err(err)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).ok_or(format!("no {name} column"));
    let (ir, ib, i_f, is) = (col("r")?, col("beta")?, col("F")?, col("slope")?);
    lines
        .map(|l| {
            let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect();
            Ok(CurvePoint {
                r: cells[ir],
                beta: cells[ib],
                f: cells[i_f],
                slope: cells[is],
            })
        })
        .collect()
}

fn c11_figures() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut problems = Vec::new();
    let mut points = 0;
    for flag in ["--fig1", "--fig2"] {
        let curve = preset_curve(flag, dir.path())?;
        points += curve.len();
        let mut rs: Vec<f64> = curve.iter().map(|p| p.r).collect();
        rs.dedup();
        for r in rs {
            let c: Vec<&CurvePoint> = curve.iter().filter(|p| p.r == r).collect();
            let tag = format!("{flag} r={r}");
            if let Some(p) = c.iter().find(|p| p.beta == 0.0) {
                if p.f.abs() > 1e-12 {
                    problems.push(format!("{tag}: F(0) = {:e}", p.f));
                }
            } else {
                problems.push(format!("{tag}: grid misses beta=0"));
            }
            if let Some(p) = c.iter().find(|p| !(p.slope.abs() < 1.0)) {
                problems.push(format!("{tag}: |slope| = {} at beta={}", p.slope.abs(), p.beta));
            }
            for w in c.windows(3) {
                if w[0].f - 2.0 * w[1].f + w[2].f < -1e-12 {
                    problems.push(format!("{tag}: not convex at beta={}", w[1].beta));
                    break;
                }
            }
            // F(β) nondecreasing in |β| on each half-line
            let bad = c.windows(2).find(|w| {
                let (a, b) = (w[0], w[1]);
                if a.beta >= 0.0 {
                    b.f < a.f
                } else if b.beta <= 0.0 {
                    a.f < b.f
                } else {
                    false
                }
            });
            if let Some(w) = bad {
                problems.push(format!(
                    "{tag}: not monotone in |beta| between {} and {} (F = {:.3e}, {:.3e})",
                    w[0].beta, w[1].beta, w[0].f, w[1].f
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("{points} points"))
    } else {
        Err(problems.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact constants", c1_exact_constants),
        ("normalization F_r(0) = 0", c2_normalization),
        ("r = 1/2 universality", c3_half_bias),
        ("oracle equivalence", c4_oracle),
        ("asymptotic convergence", c5_convergence),
        ("corollary reductions", c6_reductions),
        ("derivative check", c7_derivative),
        ("Legendre closed form", c8_legendre),
        ("multiplication invariance", c9_invariance),
        ("KS entropy", c10_ks),
        ("figure reproduction", c11_figures),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
