//! Argument parsing and command execution for the `dbh` binary.
//!
//! Every command writes one table, either as CSV with a JSON sidecar next to
//! it (`out.csv` → `out.json`) or as a single JSON document.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dbh_core::dressed::{critical_mu_formula, dressed_triple, lobe_boundary_zero_hopping, rabi};
use dbh_core::io::{
    converge_table, lobe_tip_table, mu_crit_table, phase_row, phase_table, rabi_table,
    spectrum_table, MuCritRow, Sidecar, Table, PHASE_COLUMNS,
};
use dbh_core::meanfield::{convergence_study, minimize_over_psi};
use dbh_core::sweep::{lobe_tip_scaling, run_density_map, run_phase_diagram, GridSpec, PhaseGrid};
use dbh_core::{Error, ModelParams};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Environment variable supplying the default `--jobs`.
pub const JOBS_ENV: &str = "DBH_JOBS";

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(
    name = "dbh",
    version,
    about = "Mean-field Dicke-Bose-Hubbard phase diagrams and dressed-state analytics"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Dressed-state energies of two resonant atoms per excitation manifold.
    Spectrum(BranchArgs),
    /// Effective Rabi frequency R(n, ω/β) for two resonant atoms.
    Rabi(BranchArgs),
    /// Critical chemical potential: closed form against the degeneracy solver.
    MuCrit(BranchArgs),
    /// Minimised ground energy against the photon cutoff.
    Converge(ConvergeArgs),
    /// Mean-field solution at a single (κ, μ) point.
    Solve(SolveArgs),
    /// Phase diagram over (κ/β, (μ−ω)/β) with Mott-lobe contours.
    PhaseDiagram(GridArgs),
    /// Mean-excitation map over (κ/β, (μ−ω)/β).
    Density(GridArgs),
    /// Lobe-tip hopping for several atom numbers.
    LobeTips(TipArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Rabi(_) => "rabi",
            Command::MuCrit(_) => "mu-crit",
            Command::Converge(_) => "converge",
            Command::Solve(_) => "solve",
            Command::PhaseDiagram(_) => "phase-diagram",
            Command::Density(_) => "density",
            Command::LobeTips(_) => "lobe-tips",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Spectrum(a) | Command::Rabi(a) | Command::MuCrit(a) => &a.output,
            Command::Converge(a) => &a.output,
            Command::Solve(a) => &a.output,
            Command::PhaseDiagram(a) | Command::Density(a) => &a.output,
            Command::LobeTips(a) => &a.output,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OutputArgs {
    /// Output file.
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for grid sweeps.
    #[arg(long, env = JOBS_ENV, default_value_t = default_jobs(), value_parser = positive)]
    pub jobs: usize,
}

/// Model parameters shared by the mean-field commands, in units of `β`.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct ModelArgs {
    /// Cavity frequency ω/β.
    #[arg(long, default_value_t = 10.0, value_parser = non_negative, allow_negative_numbers = true)]
    pub omega: f64,
    /// Atomic transition energy ε/β; defaults to ω/β (resonance).
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Atom-photon coupling β (sets the energy unit of every other flag).
    #[arg(long, default_value_t = 1.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub beta: f64,
    /// Lattice coordination number.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub z: usize,
    /// Photon cutoff.
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
}

impl ModelArgs {
    fn params(&self, atoms: usize) -> ModelParams {
        ModelParams {
            atoms,
            epsilon: self.epsilon.unwrap_or(self.omega),
            omega: self.omega,
            beta: self.beta,
            n_max: self.n_max,
            z: self.z,
            ..ModelParams::default()
        }
    }
}

/// Chemical potential as either `μ/β` or `(μ−ω)/β`.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct PointArgs {
    /// Hopping κ/β.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Relative chemical potential (μ−ω)/β [default: 0].
    #[arg(long, value_parser = finite, allow_negative_numbers = true, conflicts_with = "mu")]
    pub mu_rel: Option<f64>,
    /// Absolute chemical potential μ/β.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    pub mu: Option<f64>,
}

impl PointArgs {
    fn apply(&self, p: ModelParams) -> ModelParams {
        let p = p.with_kappa(self.kappa);
        match self.mu {
            Some(mu) => p.with_mu(mu),
            None => p.with_mu_rel(self.mu_rel.unwrap_or(0.0)),
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BranchArgs {
    /// Atom number; the closed forms exist for two atoms only.
    #[arg(long, default_value_t = 2)]
    pub atoms: usize,
    /// ω/β as a single value `x` or an inclusive range `start:end:count`.
    #[arg(long, default_value = "0:20:201")]
    pub omega: OmegaSpec,
    /// Smallest excitation manifold.
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    /// Largest excitation manifold.
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ConvergeArgs {
    #[arg(long, default_value_t = 2, value_parser = positive)]
    pub atoms: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Smallest cutoff of the study; the largest is --n-max.
    #[arg(long, default_value_t = 5)]
    pub n_max_start: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 2, value_parser = positive)]
    pub atoms: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct GridFlags {
    #[arg(long, default_value_t = 0.0, value_parser = non_negative, allow_negative_numbers = true)]
    pub kappa_min: f64,
    #[arg(long, default_value_t = 0.2, value_parser = non_negative, allow_negative_numbers = true)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = -1.0, value_parser = finite, allow_negative_numbers = true)]
    pub mu_rel_min: f64,
    #[arg(long, default_value_t = 0.0, value_parser = finite, allow_negative_numbers = true)]
    pub mu_rel_max: f64,
    /// Grid points along κ.
    #[arg(long, default_value_t = 200, value_parser = at_least_two)]
    pub nk: usize,
    /// Grid points along μ.
    #[arg(long, default_value_t = 200, value_parser = at_least_two)]
    pub nmu: usize,
}

impl GridFlags {
    fn spec(&self, params: ModelParams) -> GridSpec {
        GridSpec::new(params)
            .with_kappa_range(self.kappa_min, self.kappa_max, self.nk)
            .with_mu_rel_range(self.mu_rel_min, self.mu_rel_max, self.nmu)
    }
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2, value_parser = positive)]
    pub atoms: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct TipArgs {
    /// Comma-separated atom numbers.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,10", value_parser = positive)]
    pub atoms_list: Vec<usize>,
    /// Mott occupation of the lobe to follow.
    #[arg(long, default_value_t = 1)]
    pub n_lobe: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `ω/β` values: one number, or `start:end:count` with both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaSpec {
    Single(f64),
    Range { start: f64, end: f64, count: usize },
}

impl OmegaSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            OmegaSpec::Single(x) => vec![x],
            OmegaSpec::Range { start, end, count } => (0..count)
                .map(|k| {
                    if k + 1 == count {
                        end
                    } else {
                        start + (end - start) * k as f64 / (count - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for OmegaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| non_negative(t);
        match parts.as_slice() {
            [x] => Ok(OmegaSpec::Single(num(x)?)),
            [a, b, k] => {
                let (start, end) = (num(a)?, num(b)?);
                let count: usize = k
                    .parse()
                    .map_err(|_| format!("'{k}' is not a point count"))?;
                if count < 2 {
                    return Err("a range needs at least 2 points".into());
                }
                if end < start {
                    return Err(format!("range end {end} is below its start {start}"));
                }
                Ok(OmegaSpec::Range { start, end, count })
            }
            _ => Err(format!("expected 'x' or 'start:end:count', got '{s}'")),
        }
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSpec::Single(x) => write!(f, "{x}"),
            OmegaSpec::Range { start, end, count } => write!(f, "{start}:{end}:{count}"),
        }
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} is negative"))
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} is not positive"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("'{s}' is not an integer ≥ 2")),
    }
}

fn usage(flag: &str, reason: impl fmt::Display) -> clap::Error {
    RunConfig::command().error(
        ErrorKind::ValueValidation,
        format!("invalid value for '--{flag}': {reason}"),
    )
}

fn check_grid(g: &GridFlags) -> Result<(), clap::Error> {
    if g.kappa_min > g.kappa_max {
        return Err(usage(
            "kappa-max",
            format!("{} is below --kappa-min {}", g.kappa_max, g.kappa_min),
        ));
    }
    if g.mu_rel_min > g.mu_rel_max {
        return Err(usage(
            "mu-rel-max",
            format!("{} is below --mu-rel-min {}", g.mu_rel_max, g.mu_rel_min),
        ));
    }
    Ok(())
}

fn check_atoms(atoms: usize) -> Result<(), clap::Error> {
    if atoms == 0 {
        return Err(usage("atoms", "need at least one atom"));
    }
    Ok(())
}

/// Parses and validates a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = RunConfig::try_parse_from(argv)?;
    match &config.command {
        Command::Spectrum(a) | Command::Rabi(a) | Command::MuCrit(a) => {
            if a.atoms != 2 {
                return Err(usage(
                    "atoms",
                    format!("{} given, but the closed forms are for two atoms", a.atoms),
                ));
            }
            let lowest = if matches!(config.command, Command::MuCrit(_)) {
                2
            } else {
                1
            };
            if a.n_min < lowest {
                return Err(usage("n-min", format!("must be at least {lowest}")));
            }
            if a.n_max < a.n_min {
                return Err(usage(
                    "n-max",
                    format!("{} is below --n-min {}", a.n_max, a.n_min),
                ));
            }
        }
        Command::Converge(a) => {
            check_atoms(a.atoms)?;
            if a.n_max_start > a.model.n_max {
                return Err(usage(
                    "n-max-start",
                    format!("{} exceeds --n-max {}", a.n_max_start, a.model.n_max),
                ));
            }
        }
        Command::Solve(a) => check_atoms(a.atoms)?,
        Command::PhaseDiagram(a) | Command::Density(a) => {
            check_atoms(a.atoms)?;
            check_grid(&a.grid)?;
        }
        Command::LobeTips(a) => {
            if a.atoms_list.is_empty() {
                return Err(usage("atoms-list", "empty"));
            }
            check_grid(&a.grid)?;
        }
    }
    Ok(config)
}

fn push<T: fmt::Display>(out: &mut Vec<String>, flag: &str, value: T) {
    out.push(format!("--{flag}={value}"));
}

fn push_opt<T: fmt::Display>(out: &mut Vec<String>, flag: &str, value: Option<T>) {
    if let Some(v) = value {
        push(out, flag, v);
    }
}

impl OutputArgs {
    fn render(&self, out: &mut Vec<String>) {
        push(out, "output", self.output.display());
        push(out, "format", self.format.as_str());
        push(out, "jobs", self.jobs);
    }
}

impl ModelArgs {
    fn render(&self, out: &mut Vec<String>) {
        push(out, "omega", self.omega);
        push_opt(out, "epsilon", self.epsilon);
        push(out, "beta", self.beta);
        push(out, "z", self.z);
        push(out, "n-max", self.n_max);
    }
}

impl PointArgs {
    fn render(&self, out: &mut Vec<String>) {
        push(out, "kappa", self.kappa);
        push_opt(out, "mu-rel", self.mu_rel);
        push_opt(out, "mu", self.mu);
    }
}

impl GridFlags {
    fn render(&self, out: &mut Vec<String>) {
        push(out, "kappa-min", self.kappa_min);
        push(out, "kappa-max", self.kappa_max);
        push(out, "mu-rel-min", self.mu_rel_min);
        push(out, "mu-rel-max", self.mu_rel_max);
        push(out, "nk", self.nk);
        push(out, "nmu", self.nmu);
    }
}

impl RunConfig {
    /// Flag rendering that [`parse_args`] maps back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = vec!["dbh".to_string(), self.command.name().to_string()];
        match &self.command {
            Command::Spectrum(a) | Command::Rabi(a) | Command::MuCrit(a) => {
                push(&mut out, "atoms", a.atoms);
                push(&mut out, "omega", a.omega);
                push(&mut out, "n-min", a.n_min);
                push(&mut out, "n-max", a.n_max);
            }
            Command::Converge(a) => {
                push(&mut out, "atoms", a.atoms);
                a.model.render(&mut out);
                a.point.render(&mut out);
                push(&mut out, "n-max-start", a.n_max_start);
            }
            Command::Solve(a) => {
                push(&mut out, "atoms", a.atoms);
                a.model.render(&mut out);
                a.point.render(&mut out);
            }
            Command::PhaseDiagram(a) | Command::Density(a) => {
                push(&mut out, "atoms", a.atoms);
                a.model.render(&mut out);
                a.grid.render(&mut out);
            }
            Command::LobeTips(a) => {
                let list: Vec<String> = a.atoms_list.iter().map(usize::to_string).collect();
                push(&mut out, "atoms-list", list.join(","));
                push(&mut out, "n-lobe", a.n_lobe);
                a.model.render(&mut out);
                a.grid.render(&mut out);
            }
        }
        self.command.output().render(&mut out);
        out
    }
}

/// What a command produced, before it is written out.
struct Product {
    table: Table,
    sidecar: Sidecar,
    summary: String,
}

fn grid_summary(grid: &PhaseGrid) -> String {
    format!(
        "{} cells ({} failed, {} unconverged), {} lobes",
        grid.cells.len(),
        grid.failed_cells(),
        grid.unconverged_cells(),
        grid.boundaries.len()
    )
}

fn compute(command: &Command) -> Result<Product, Error> {
    let name = command.name();
    let product = match command {
        Command::Spectrum(a) => {
            let mut rows = Vec::new();
            for n in a.n_min..=a.n_max {
                for x in a.omega.values() {
                    rows.push((x, dressed_triple(n, x)?));
                }
            }
            let table = spectrum_table(&rows);
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.settings = json!({ "atoms": a.atoms, "omega": a.omega.to_string(), "n_min": a.n_min, "n_max": a.n_max });
            let summary = format!("{} rows", table.rows.len());
            Product {
                table,
                sidecar,
                summary,
            }
        }
        Command::Rabi(a) => {
            let mut rows = Vec::new();
            for n in a.n_min..=a.n_max {
                for x in a.omega.values() {
                    rows.push((n, x, rabi(n, x)?));
                }
            }
            let table = rabi_table(&rows);
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.settings = json!({ "atoms": a.atoms, "omega": a.omega.to_string(), "n_min": a.n_min, "n_max": a.n_max });
            let summary = format!("{} rows", table.rows.len());
            Product {
                table,
                sidecar,
                summary,
            }
        }
        Command::MuCrit(a) => {
            let mut rows = Vec::new();
            let mut missing = 0;
            for n in a.n_min..=a.n_max {
                for x in a.omega.values() {
                    let degeneracy = match lobe_boundary_zero_hopping(n, x) {
                        Ok(mu) => Some(mu),
                        Err(Error::BoundaryNotFound { .. }) => {
                            missing += 1;
                            None
                        }
                        Err(e) => return Err(e),
                    };
                    rows.push(MuCritRow {
                        n,
                        omega_over_beta: x,
                        formula: critical_mu_formula(n, x)?,
                        degeneracy,
                    });
                }
            }
            let table = mu_crit_table(&rows);
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.settings = json!({
                "atoms": a.atoms,
                "omega": a.omega.to_string(),
                "n_min": a.n_min,
                "n_max": a.n_max,
                "mu_c_degeneracy": "absolute mu/beta where manifolds n and n+1 have equal ground energy at zero hopping",
            });
            let summary = format!("{} rows, {missing} without a crossing", table.rows.len());
            Product {
                table,
                sidecar,
                summary,
            }
        }
        Command::Converge(a) => {
            let params = a.point.apply(a.model.params(a.atoms));
            let cutoffs: Vec<usize> = (a.n_max_start..=a.model.n_max).collect();
            let study = convergence_study(&params, &cutoffs)?;
            let table = converge_table(&study);
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.params = Some(params);
            sidecar.settings = json!({ "cutoffs": cutoffs, "converged_at": study.converged_at });
            let summary = match study.converged_at {
                Some(k) => format!("{} cutoffs, converged at n_max = {k}", cutoffs.len()),
                None => format!("{} cutoffs, not converged", cutoffs.len()),
            };
            Product {
                table,
                sidecar,
                summary,
            }
        }
        Command::Solve(a) => {
            let params = a.point.apply(a.model.params(a.atoms));
            let solution = minimize_over_psi(&params)?;
            let mut table = Table::new(&PHASE_COLUMNS);
            table.push(phase_row(params.kappa, params.mu_rel(), &Ok(solution)));
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.params = Some(params);
            sidecar.settings = json!({ "top_manifold_weight": solution.top_manifold_weight });
            let summary = format!(
                "{} with psi = {:.6e}",
                solution.phase.label(),
                solution.psi_min
            );
            Product {
                table,
                sidecar,
                summary,
            }
        }
        Command::PhaseDiagram(a) | Command::Density(a) => {
            let spec = a.grid.spec(a.model.params(a.atoms));
            let jobs = a.output.jobs;
            let grid = if matches!(command, Command::Density(_)) {
                run_density_map(&spec, jobs)?
            } else {
                run_phase_diagram(&spec, jobs)?
            };
            let table = phase_table(&grid);
            let sidecar = Sidecar::new(name, &table).with_grid(&grid);
            Product {
                table,
                sidecar,
                summary: grid_summary(&grid),
            }
        }
        Command::LobeTips(a) => {
            let spec = a.grid.spec(a.model.params(a.atoms_list[0]));
            let entries = lobe_tip_scaling(&a.atoms_list, a.n_lobe, &spec, a.output.jobs)?;
            let table = lobe_tip_table(&entries);
            let mut sidecar = Sidecar::new(name, &table);
            sidecar.grid = Some(spec);
            sidecar.settings = json!({ "atoms_list": a.atoms_list, "n_lobe": a.n_lobe });
            let found = entries.iter().filter(|e| e.kappa_tip.is_some()).count();
            let summary = format!("{} atom numbers, {found} tips found", entries.len());
            Product {
                table,
                sidecar,
                summary,
            }
        }
    };
    Ok(product)
}

/// Where the sidecar of a CSV file goes.
pub fn sidecar_path(output: &Path) -> PathBuf {
    if output.extension().is_some_and(|e| e == "json") {
        let mut name = output.file_stem().unwrap_or_default().to_os_string();
        name.push(".meta.json");
        output.with_file_name(name)
    } else {
        output.with_extension("json")
    }
}

fn write(output: &OutputArgs, product: &Product) -> std::io::Result<()> {
    match output.format {
        Format::Csv => {
            std::fs::write(&output.output, product.table.to_csv())?;
            std::fs::write(sidecar_path(&output.output), product.sidecar.to_json())
        }
        Format::Json => {
            std::fs::write(&output.output, product.sidecar.with_records(&product.table))
        }
    }
}

/// Runs a validated configuration and returns the process exit status.
pub fn execute(config: &RunConfig) -> u8 {
    let started = Instant::now();
    let name = config.command.name();
    let output = config.command.output();
    let product = match compute(&config.command) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("dbh {name}: numerical failure: {e}");
            return EXIT_NUMERIC;
        }
    };
    if let Err(e) = write(output, &product) {
        eprintln!("dbh {name}: cannot write {}: {e}", output.output.display());
        return EXIT_IO;
    }
    eprintln!(
        "dbh {name}: {} in {:.2} s -> {}",
        product.summary,
        started.elapsed().as_secs_f64(),
        output.output.display()
    );
    EXIT_OK
}
