//! Command-line front end. Exit codes: 0 success, 2 configuration error,
//! 3 computation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::free_energy::{finite_log_mgf, DirectionalModel, GeneralModel, Truncation};
use crate::gibbs::{
    check_multiplication_invariance, finite_volume_probability, ks_entropy_2multiple_closed,
    ks_entropy_directional, layers, limit_cylinder_probability, sample_box,
};
use crate::io::{read_event_file, read_spec_file, write_atomic, Cell, Format, Table};
use crate::lattice::{
    chain_length_census, decompose_box_with, directional_constant, validate_generators,
    Convention, Direction, LatticeBox, SemigroupSpec, Site,
};
use crate::ldp::rate_curve;
use crate::numerics::linspace;
use crate::oracle::cross_checks;
use crate::presets;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// Largest box `decompose --chains` lists member by member.
const CHAIN_LISTING_LIMIT: u128 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "multising", version, about = "Multiplicative Ising model calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Semigroup elements, γ and the directional constant
    Semigroup(SemigroupArgs),
    /// Chain census of a box
    Decompose(DecomposeArgs),
    /// Free energy at one β or over a β-grid
    FreeEnergy(FreeEnergyArgs),
    /// Free-energy curves over r and β (figure presets)
    Curve(CurveArgs),
    /// Rate function over an x-grid
    Rate(RateArgs),
    /// Kolmogorov–Sinai entropy of the field-free limit measure
    KsEntropy(KsArgs),
    /// Cylinder probabilities of an event
    Gibbs(GibbsArgs),
    /// Sample box configurations from the limit measure
    Sample(SampleArgs),
    /// Cross-check analytic results against exhaustive enumeration
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Generators: "2,3,5" for d=1, "(2,3),(3,5)" or "2,3;3,5" otherwise
    #[arg(long)]
    pub gens: Option<String>,
    /// JSON file {"d": .., "generators": [[..]], "direction": ..}
    #[arg(long)]
    pub spec_file: Option<PathBuf>,
    /// Lattice dimension
    #[arg(long)]
    pub d: Option<usize>,
    /// Ordering direction j (1-based)
    #[arg(long)]
    pub dir: Option<usize>,
    /// Use ⟨2,3,5,7,11⟩
    #[arg(long)]
    pub fig1: bool,
    /// Use {(2,3),(3,5),(5,7),(7,11),(11,2)} with j=1
    #[arg(long)]
    pub fig2: bool,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file (written atomically); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SemigroupArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Print γ of each coordinate semigroup as an exact fraction
    #[arg(long)]
    pub gamma: bool,
    /// Print the directional constant C
    #[arg(long)]
    pub constant: bool,
    /// List elements of the j-th coordinate semigroup up to this bound
    #[arg(long, default_value_t = 100)]
    pub bound: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Box sides, e.g. "1000" or "40,60"
    #[arg(long = "box")]
    pub lattice_box: LatticeBox,
    /// coordinate-cap or rank-cap
    #[arg(long, default_value = "coordinate-cap")]
    pub convention: Convention,
    /// List every chain instead of the length census
    #[arg(long)]
    pub chains: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FreeEnergyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// start:stop:count, endpoints included
    #[arg(long, allow_hyphen_values = true)]
    pub beta_grid: Option<String>,
    /// Certified tail tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Fixed number of series terms instead of a tolerance
    #[arg(long)]
    pub terms: Option<usize>,
    /// Evaluate the b-count form with this cap on every index
    #[arg(long)]
    pub k_cap: Option<usize>,
    /// Exact finite-volume value over this box instead of the limit
    #[arg(long = "box")]
    pub lattice_box: Option<LatticeBox>,
    #[arg(long, default_value = "coordinate-cap")]
    pub convention: Convention,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Comma-separated biases
    #[arg(long, default_value = "0.1,0.3,0.5,0.7,0.9")]
    pub r: String,
    #[arg(long, default_value = "-3:3:121", allow_hyphen_values = true)]
    pub beta_grid: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Series terms; the figure presets default to 100
    #[arg(long)]
    pub terms: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub r: f64,
    /// start:stop:count or a comma list
    #[arg(long, default_value = "-0.95:0.95:39", allow_hyphen_values = true)]
    pub x_grid: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_grid: Option<String>,
    /// Bound on the omitted remainder of the series
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// JSON file {"sites": [[..]], "values": [±1, ..]}
    #[arg(long)]
    pub event_file: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Also report the finite-volume probability for this box
    #[arg(long = "box")]
    pub lattice_box: Option<LatticeBox>,
    #[arg(long, default_value = "coordinate-cap")]
    pub convention: Convention,
    /// Also report |μ(m·event) − μ(event)| for this multiplier
    #[arg(long)]
    pub multiplier: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long = "box")]
    pub lattice_box: LatticeBox,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest number of spins enumerated per case
    #[arg(long, default_value_t = 20)]
    pub max_sites: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

impl SpecArgs {
    /// The semigroup and direction named by exactly one of the sources.
    pub fn resolve(&self) -> Result<(SemigroupSpec, Direction)> {
        let sources = [
            self.gens.is_some(),
            self.spec_file.is_some(),
            self.fig1,
            self.fig2,
        ];
        match sources.iter().filter(|&&b| b).count() {
            0 => return Err(Error::Config("give one of --gens, --spec-file, --fig1, --fig2".into())),
            1 => {}
            _ => {
                return Err(Error::Config(
                    "--gens, --spec-file, --fig1 and --fig2 are mutually exclusive".into(),
                ))
            }
        }
        let (spec, file_dir) = if self.fig1 {
            (presets::fig1(), Direction::FIRST)
        } else if self.fig2 {
            presets::fig2()
        } else if let Some(path) = &self.spec_file {
            read_spec_file(path)?
        } else {
            let vectors = parse_generators(self.gens.as_deref().unwrap_or(""), self.d)?;
            let d = self.d.unwrap_or_else(|| vectors.first().map_or(1, Vec::len));
            (validate_generators(&vectors, d)?, Direction::FIRST)
        };
        if let Some(d) = self.d {
            if d != spec.dim() {
                return Err(Error::Config(format!(
                    "--d {d} does not match the {}-dimensional semigroup",
                    spec.dim()
                )));
            }
        }
        let j = self.dir.map_or(file_dir, Direction::new);
        spec.check_direction(j)?;
        Ok((spec, j))
    }
}

/// "2,3,5", "(2,3),(3,5)", "2,3;3,5", or a flat list chunked by `d`.
pub fn parse_generators(text: &str, d: Option<usize>) -> Result<Vec<Vec<u64>>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Config("empty generator list".into()));
    }
    let grouped = cleaned.contains('(') || cleaned.contains(';');
    let groups: Vec<&str> = if grouped {
        cleaned
            .split([';', ')'])
            .map(|g| g.trim_matches(|c| c == '(' || c == ',' || c == ')'))
            .filter(|g| !g.is_empty())
            .collect()
    } else {
        vec![cleaned.as_str()]
    };
    let parse = |g: &str| -> Result<Vec<u64>> {
        g.split(',')
            .map(|x| {
                x.parse::<u64>()
                    .map_err(|_| Error::Config(format!("bad generator entry {x:?}")))
            })
            .collect()
    };
    let mut vectors = groups.into_iter().map(parse).collect::<Result<Vec<_>>>()?;
    if !grouped {
        let flat = vectors.pop().unwrap_or_default();
        let d = d.unwrap_or(1);
        if d == 0 || flat.len() % d != 0 {
            return Err(Error::Config(format!(
                "{} entries do not split into vectors of length {d}",
                flat.len()
            )));
        }
        vectors = flat.chunks(d).map(<[u64]>::to_vec).collect();
    }
    Ok(vectors)
}

/// "start:stop:count" (endpoints included) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad grid {text:?}"));
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let stop: f64 = b.trim().parse().map_err(|_| bad())?;
        let count: usize = n.trim().parse().map_err(|_| bad())?;
        linspace(start, stop, count)
    } else {
        text.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("grid {text:?} must be nonempty and finite")));
    }
    Ok(grid)
}

fn beta_values(beta: Option<f64>, grid: Option<&str>) -> Result<Vec<f64>> {
    match (beta, grid) {
        (Some(b), None) if b.is_finite() => Ok(vec![b]),
        (Some(_), None) => Err(Error::Config("--beta must be finite".into())),
        (None, Some(g)) => parse_grid(g),
        (None, None) => Err(Error::Config("give --beta or --beta-grid".into())),
        (Some(_), Some(_)) => Err(Error::Config("--beta and --beta-grid are exclusive".into())),
    }
}

fn truncation(tol: f64, terms: Option<usize>) -> Result<Truncation> {
    let t = match terms {
        Some(n) => Truncation::Terms(n),
        None => Truncation::Tolerance(tol),
    };
    t.validate().map_err(|e| Error::Config(e.to_string()))
}

fn describe(spec: &SemigroupSpec, j: Direction, table: &mut Table) {
    table.meta("d", spec.dim()).meta("generators", spec).meta("direction", j);
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Output goes to `--out` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let rerun = rerun_line(&args);
    match execute(&cli.command, &rerun, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_COMPUTE
            }
        }
    }
}

/// The invocation without its output options.
fn rerun_line(args: &[OsString]) -> String {
    let mut out = vec!["multising".to_string()];
    let mut skip = false;
    for a in args.iter().skip(1) {
        let a = a.to_string_lossy();
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        out.push(a.into_owned());
    }
    out.join(" ")
}

fn emit(table: &mut Table, rerun: &str, out: &OutArgs, stdout: &mut dyn Write) -> Result<i32> {
    table.meta("rerun", rerun);
    let bytes = table.render(out.format)?;
    match &out.out {
        Some(path) => write_atomic(path, &bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(EXIT_OK)
}

fn emit_text(text: &str, out: &OutArgs, stdout: &mut dyn Write) -> Result<i32> {
    match &out.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn execute(command: &Command, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Semigroup(a) => semigroup(a, rerun, stdout),
        Command::Decompose(a) => decompose(a, rerun, stdout),
        Command::FreeEnergy(a) => free_energy(a, rerun, stdout),
        Command::Curve(a) => curve(a, rerun, stdout),
        Command::Rate(a) => rate(a, rerun, stdout),
        Command::KsEntropy(a) => ks_entropy(a, rerun, stdout),
        Command::Gibbs(a) => gibbs(a, rerun, stdout),
        Command::Sample(a) => sample(a, rerun, stdout),
        Command::Verify(a) => verify(a, rerun, stdout),
    }
}

fn semigroup(a: &SemigroupArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    if a.gamma || a.constant {
        let mut text = String::new();
        if a.gamma {
            if spec.dim() == 1 {
                text.push_str(&format!("{}\n", spec.section(0).gamma()));
            } else {
                for s in 0..spec.dim() {
                    text.push_str(&format!("gamma[{}]={}\n", s + 1, spec.section(s).gamma()));
                }
            }
        }
        if a.constant {
            text.push_str(&format!("C={}\n", directional_constant(&spec, j)?));
        }
        return emit_text(&text, &a.out, stdout);
    }
    let mut table = Table::new(["rank", "element"]);
    table.meta("command", "semigroup");
    describe(&spec, j, &mut table);
    table.meta("bound", a.bound);
    let elements = spec.section(j.index()).elements_up_to(a.bound as u128);
    for (i, e) in elements.iter().enumerate() {
        table.push(vec![(i + 1).into(), Cell::from(*e)])?;
    }
    emit(&mut table, rerun, &a.out, stdout)
}

fn decompose(a: &DecomposeArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    let mut table;
    if a.chains {
        if a.lattice_box.volume() > CHAIN_LISTING_LIMIT {
            return Err(Error::Config(format!(
                "--chains lists at most {CHAIN_LISTING_LIMIT} sites; use the census instead"
            )));
        }
        let dec = decompose_box_with(&a.lattice_box, &spec, j, a.convention)?;
        table = Table::new(["root", "length", "members"]);
        for chain in &dec.chains {
            let members: Vec<String> = chain.members.iter().map(Site::to_string).collect();
            table.push(vec![
                chain.root.to_string().into(),
                chain.members.len().saturating_sub(1).into(),
                members.join(" ").into(),
            ])?;
        }
    } else {
        let census = chain_length_census(&a.lattice_box, &spec, j, a.convention)?;
        table = Table::new(["length", "chains"]);
        for (len, count) in census {
            table.push(vec![len.into(), count.into()])?;
        }
    }
    table.meta("command", "decompose");
    describe(&spec, j, &mut table);
    table.meta("box", &a.lattice_box).meta("convention", a.convention);
    emit(&mut table, rerun, &a.out, stdout)
}

fn free_energy(a: &FreeEnergyArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    let betas = beta_values(a.beta, a.beta_grid.as_deref())?;
    let mut table;
    if let Some(lb) = &a.lattice_box {
        let rows: Vec<_> = betas
            .par_iter()
            .map(|&b| finite_log_mgf(a.r, b, &spec, lb, j, a.convention))
            .collect::<Result<_>>()?;
        table = Table::new(["beta", "log_expectation", "summands", "per_summand"]);
        for (b, m) in betas.iter().zip(rows) {
            table.push(vec![
                (*b).into(),
                m.log_expectation.into(),
                m.summands.into(),
                m.per_summand().into(),
            ])?;
        }
        table.meta("box", lb).meta("convention", a.convention);
    } else if let Some(cap) = a.k_cap {
        let model = GeneralModel::new(&spec, j, cap)?;
        let rows: Vec<_> = betas
            .par_iter()
            .map(|&b| model.evaluate(a.r, b))
            .collect::<Result<_>>()?;
        table = Table::new(["beta", "F"]);
        for (b, f) in betas.iter().zip(rows) {
            table.push(vec![(*b).into(), f.value.into()])?;
        }
        table.meta("k_cap", cap);
    } else {
        let trunc = truncation(a.tol, a.terms)?;
        let model = DirectionalModel::new(&spec, j)?;
        let rows: Vec<_> = betas
            .par_iter()
            .map(|&b| -> Result<_> {
                let f = model.evaluate(a.r, b, trunc)?;
                let slope = model.derivative(a.r, b, trunc)?;
                Ok((f, slope))
            })
            .collect::<Result<_>>()?;
        table = Table::new(["beta", "F", "slope", "truncation_k", "tail_bound"]);
        for (b, (f, slope)) in betas.iter().zip(rows) {
            table.push(vec![
                (*b).into(),
                f.value.into(),
                slope.into(),
                f.truncation_k.into(),
                f.tail_bound.into(),
            ])?;
        }
        table.meta("truncation", format!("{trunc:?}"));
    }
    table.meta("command", "free-energy").meta("r", a.r);
    describe(&spec, j, &mut table);
    emit(&mut table, rerun, &a.out, stdout)
}

fn curve(a: &CurveArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    let biases = parse_grid(&a.r)?;
    let betas = parse_grid(&a.beta_grid)?;
    let terms = a
        .terms
        .or((a.spec.fig1 || a.spec.fig2).then_some(presets::FIGURE_TERMS));
    let trunc = truncation(a.tol, terms)?;
    let model = DirectionalModel::new(&spec, j)?;
    let grid: Vec<(f64, f64)> = biases
        .iter()
        .flat_map(|&r| betas.iter().map(move |&b| (r, b)))
        .collect();
    let rows: Vec<_> = grid
        .par_iter()
        .map(|&(r, b)| -> Result<_> {
            Ok((model.evaluate(r, b, trunc)?, model.derivative(r, b, trunc)?))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(["r", "beta", "F", "slope", "truncation_k", "tail_bound"]);
    for ((r, b), (f, slope)) in grid.iter().zip(rows) {
        table.push(vec![
            (*r).into(),
            (*b).into(),
            f.value.into(),
            slope.into(),
            f.truncation_k.into(),
            f.tail_bound.into(),
        ])?;
    }
    table.meta("command", "curve");
    describe(&spec, j, &mut table);
    table.meta("truncation", format!("{trunc:?}"));
    emit(&mut table, rerun, &a.out, stdout)
}

fn rate(a: &RateArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    let xs = parse_grid(&a.x_grid)?;
    let model = DirectionalModel::new(&spec, j)?;
    let points = rate_curve(&model, a.r, &xs, a.tol)?;
    let mut table = Table::new(["x", "rate", "eta", "capped"]);
    for p in points {
        table.push(vec![p.x.into(), p.rate.into(), p.eta.into(), p.capped.into()])?;
    }
    table.meta("command", "rate").meta("r", a.r).meta("tol", a.tol);
    describe(&spec, j, &mut table);
    emit(&mut table, rerun, &a.out, stdout)
}

fn ks_entropy(a: &KsArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    let betas = beta_values(a.beta, a.beta_grid.as_deref())?;
    let trunc = truncation(a.tol, None)?;
    let single = (spec.num_generators() == 1).then(|| spec.generators()[0].clone());
    let rows: Vec<_> = betas
        .par_iter()
        .map(|&b| ks_entropy_directional(b, &spec, j, trunc))
        .collect::<Result<_>>()?;
    let mut table = Table::new(["beta", "entropy", "truncation_k", "tail_bound", "closed_form"]);
    for (b, ks) in betas.iter().zip(rows) {
        table.push(vec![
            (*b).into(),
            ks.value.into(),
            ks.truncation_k.into(),
            ks.tail_bound.into(),
            single.as_ref().map(|p| ks_entropy_2multiple_closed(*b, p)).into(),
        ])?;
    }
    table.meta("command", "ks-entropy").meta("tol", a.tol);
    describe(&spec, j, &mut table);
    emit(&mut table, rerun, &a.out, stdout)
}

fn gibbs(a: &GibbsArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    if !a.beta.is_finite() {
        return Err(Error::Config("--beta must be finite".into()));
    }
    let event = read_event_file(&a.event_file)?;
    let mut table = Table::new(["quantity", "value"]);
    table.push(vec!["sites".into(), event.len().into()])?;
    table.push(vec!["layers".into(), layers(&event, &spec, j)?.len().into()])?;
    table.push(vec![
        "limit_probability".into(),
        limit_cylinder_probability(&event, a.beta, &spec, j)?.into(),
    ])?;
    if let Some(lb) = &a.lattice_box {
        let p = finite_volume_probability(&event, a.beta, &spec, j, lb, a.convention)?;
        table.push(vec!["finite_volume_probability".into(), p.into()])?;
        table.meta("box", lb).meta("convention", a.convention);
    }
    if let Some(m) = &a.multiplier {
        let m = parse_generators(m, Some(spec.dim()))?;
        let [m] = m.as_slice() else {
            return Err(Error::Config("--multiplier must be a single vector".into()));
        };
        let diff = check_multiplication_invariance(&event, &Site::new(m.clone()), a.beta, &spec, j)?;
        table.push(vec!["invariance_gap".into(), diff.into()])?;
    }
    table.meta("command", "gibbs").meta("beta", a.beta);
    describe(&spec, j, &mut table);
    emit(&mut table, rerun, &a.out, stdout)
}

fn sample(a: &SampleArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let (spec, j) = a.spec.resolve()?;
    if !a.beta.is_finite() {
        return Err(Error::Config("--beta must be finite".into()));
    }
    let s = sample_box(&a.lattice_box, a.beta, &spec, j, a.seed, a.count)?;
    let mut table = Table::new(s.sites.iter().map(Site::to_string));
    for row in s.configs {
        table.push(row.into_iter().map(|v| Cell::from(v.value())).collect())?;
    }
    table.meta("command", "sample");
    describe(&spec, j, &mut table);
    table
        .meta("box", &a.lattice_box)
        .meta("beta", a.beta)
        .meta("seed", a.seed)
        .meta("count", a.count);
    emit(&mut table, rerun, &a.out, stdout)
}

fn verify(a: &VerifyArgs, rerun: &str, stdout: &mut dyn Write) -> Result<i32> {
    let checks = cross_checks(a.max_sites)?;
    let all_passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(["check", "cases", "max_error", "tolerance", "passed"]);
    for c in &checks {
        table.push(vec![
            c.name.clone().into(),
            c.cases.into(),
            c.max_error.into(),
            c.tolerance.into(),
            c.passed.into(),
        ])?;
    }
    table.meta("command", "verify").meta("max_sites", a.max_sites);
    if a.out.out.is_some() {
        emit(&mut table, rerun, &a.out, stdout)?;
    }
    for c in &checks {
        writeln!(
            stdout,
            "{} {:<36} cases={:<5} max_error={:.3e} tol={:.0e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            c.max_error,
            c.tolerance
        )?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_COMPUTE })
}
