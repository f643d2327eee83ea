//! The `drw` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use drw_core::filters::FilterBank;
use drw_core::render::{cascade, sample_symbol, wavelet_from_scaling};
use drw_core::solver::SolverConfig;
use drw_core::verify::{verify, VerifyOptions, DEFAULT_BOWNIK_GRID, DEFAULT_BOWNIK_MIN};

use crate::error::{Error, Result};
use crate::export;
use crate::formats::{self, BatchJson, FiltersInput, ReportJson, RunResultJson};
use crate::run::{parallel_batch, thread_count, timed_solve};
use crate::table::{self, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ITERATION_CAP: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "drw",
    version,
    about = "Orthogonal wavelets from Douglas–Rachford on matrix ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solve and write the result as JSON.
    Solve(SolveArgs),
    /// Run seeded replications in parallel and print a summary table.
    Batch(BatchArgs),
    /// Check a result or filter file against the wavelet conditions.
    Verify(VerifyArgs),
    /// Write the scaling function, wavelets and symbols as CSV.
    Render(RenderArgs),
    /// Run the preset (M, d) lists of the 1D or 2D experiment table.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Spatial dimension.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Support size per axis (even, at least 4).
    #[arg(long = "M", default_value_t = 4)]
    pub m: usize,
    /// Regularity order.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_stop: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BOWNIK_MIN)]
    pub bownik_min: f64,
    #[arg(long, default_value_t = DEFAULT_BOWNIK_GRID)]
    pub bownik_grid: usize,
    /// Drop the α = 0 moment from the regularity constraint.
    #[arg(long)]
    pub exclude_zero_moment: bool,
    /// Print the step norm to stderr every this many iterations.
    #[arg(long)]
    pub log_every: Option<u64>,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            n: self.n,
            m: self.m,
            d: self.d,
            eps_stop: self.eps_stop,
            max_iter: self.max_iter,
            seed: self.seed,
            bownik_min: self.bownik_min,
            bownik_grid: self.bownik_grid,
            include_zero_moment: !self.exclude_zero_moment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "result.json")]
    pub out: PathBuf,
    /// `csv` writes the filter coefficients instead of the full result.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    #[arg(long, default_value = "batch.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A result from `solve` or a filter bank document.
    #[arg(long)]
    pub input: PathBuf,
    /// Regularity order; defaults to the one recorded in a result, else 1.
    #[arg(long)]
    pub d: Option<usize>,
    /// Largest accepted residual.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// Points per axis for the paraunitarity grid (default 4M).
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BOWNIK_MIN)]
    pub bownik_min: f64,
    #[arg(long, default_value_t = DEFAULT_BOWNIK_GRID)]
    pub bownik_grid: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Resolution `2^{-J}`; defaults to 8 in 1D and 5 in 2D.
    #[arg(long = "J")]
    pub j: Option<u32>,
    #[arg(long, default_value_t = 12)]
    pub iters: usize,
    /// Symbol samples per axis over [0, 1]; defaults to 257 in 1D and 65 in 2D.
    #[arg(long)]
    pub symbol_points: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// 1 for the 1D table, 2 for the 2D table.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub table: u8,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    /// Cap on iterations per run for quick smoke runs.
    #[arg(long)]
    pub scale: Option<u64>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_stop: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub exclude_zero_moment: bool,
    /// Also write every batch as a JSON array.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_input(path: &Path) -> Result<FiltersInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    FiltersInput::parse(&text)
}

fn run_solve(args: &SolveArgs) -> Result<i32> {
    let config = args.solver.config();
    config.validate()?;
    let run = timed_solve(&config, args.solver.log_every)?;
    match args.format {
        Format::Json => write_json(&args.out, &RunResultJson::from_run(&run, &formats::timestamp()))?,
        Format::Csv => export::write_filters_file(&args.out, &run.filters)?,
    }
    let sep = run
        .separability
        .map(|s| format!(" separability {s:.4}"))
        .unwrap_or_default();
    println!(
        "{} after {} iterations: step {:.3e} unitarity {:.3e} consistency {:.3e} regularity {:.3e} bownik {} (min |m0| {:.3e}){sep}",
        if run.converged { "converged" } else { "iteration cap" },
        run.iterations,
        run.final_step_norm,
        run.residuals.unitarity,
        run.residuals.consistency,
        run.residuals.regularity,
        if run.bownik_pass { "pass" } else { "fail" },
        run.bownik_min_abs,
    );
    Ok(if run.converged {
        EXIT_OK
    } else {
        EXIT_ITERATION_CAP
    })
}

fn run_batch(args: &BatchArgs) -> Result<i32> {
    let config = args.solver.config();
    config.validate()?;
    let summary = parallel_batch(&config, args.replications, thread_count()?, args.solver.log_every)?;
    write_json(
        &args.out,
        &BatchJson::from_summary(&config, &summary, &formats::timestamp()),
    )?;
    print!(
        "{}",
        table::render(
            &[Row {
                m: config.m,
                d: config.d,
                summary: &summary
            }],
            config.n == 2
        )
    );
    println!(
        "Solved: {}/{} (Bownik pass: {})",
        summary.solved, summary.replications, summary.solved_bownik
    );
    Ok(EXIT_OK)
}

fn run_verify(args: &VerifyArgs) -> Result<i32> {
    let input = read_input(&args.input)?;
    let bank = input.bank()?;
    let opts = VerifyOptions {
        d: args.d.or(input.order()).unwrap_or(1),
        grid_points: args.grid_points,
        bownik_grid: args.bownik_grid,
        bownik_min: args.bownik_min,
    };
    let report = verify(&bank, &opts);
    if let Some(out) = &args.out {
        write_json(out, &ReportJson::from(&report))?;
    }
    let pass = report.passes(args.tol);
    println!("qmf residual          {:.3e}", report.qmf_residual);
    println!("cross-qmf residual    {:.3e}", report.cross_qmf_residual);
    println!("completeness residual {:.3e}", report.completeness_residual);
    for (alpha, r) in &report.regularity_residuals {
        println!("moment {alpha:?} residual {r:.3e}");
    }
    println!(
        "bownik {} (min |m0| {:.3e})",
        if report.bownik_pass { "pass" } else { "fail" },
        report.bownik_min_abs
    );
    if let Some(s) = report.separability {
        println!("separability {s:.4}");
    }
    println!(
        "{} at tolerance {:e}",
        if pass { "PASS" } else { "FAIL" },
        args.tol
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn run_render(args: &RenderArgs) -> Result<i32> {
    let bank: FilterBank = read_input(&args.input)?.bank()?;
    let n = bank.n();
    let j = args.j.unwrap_or(if n == 1 { 8 } else { 5 });
    let points = args.symbol_points.unwrap_or(if n == 1 { 257 } else { 65 });
    let phi = cascade(&bank, j, args.iters)?;
    let wavelets = (1..bank.dim())
        .map(|eps| wavelet_from_scaling(&bank, eps, &phi))
        .collect::<drw_core::Result<Vec<_>>>()?;
    let symbols = (0..bank.dim())
        .map(|eps| sample_symbol(&bank, eps, points))
        .collect::<drw_core::Result<Vec<_>>>()?;
    std::fs::create_dir_all(&args.out)?;
    export::write_sampled_file(&args.out.join("phi.csv"), &phi)?;
    for (i, psi) in wavelets.iter().enumerate() {
        export::write_sampled_file(&args.out.join(format!("psi_{}.csv", i + 1)), psi)?;
    }
    for (eps, table) in symbols.iter().enumerate() {
        export::write_symbol_file(&args.out.join(format!("m_{eps}.csv")), n, table)?;
    }
    println!(
        "rendered at J = {j} after {} iterations, last step change {:.3e}",
        args.iters,
        phi.step_change.unwrap_or(0.0)
    );
    Ok(EXIT_OK)
}

fn run_tables(args: &TablesArgs) -> Result<i32> {
    let (n, rows) = table::preset(args.table).ok_or_else(|| Error::Usage("unknown table".into()))?;
    let threads = thread_count()?;
    let timestamp = formats::timestamp();
    let mut summaries = Vec::new();
    let mut docs = Vec::new();
    for &(m, d) in rows {
        let defaults = SolverConfig::default();
        let config = SolverConfig {
            n,
            m,
            d,
            eps_stop: args.eps_stop,
            seed: args.seed,
            max_iter: args.scale.map_or(defaults.max_iter, |s| s.min(defaults.max_iter)),
            include_zero_moment: !args.exclude_zero_moment,
            ..defaults
        };
        let summary = parallel_batch(&config, args.replications, threads, None)?;
        docs.push(BatchJson::from_summary(&config, &summary, &timestamp));
        summaries.push((m, d, summary));
    }
    let table_rows: Vec<Row> = summaries
        .iter()
        .map(|(m, d, s)| Row {
            m: *m,
            d: *d,
            summary: s,
        })
        .collect();
    print!("{}", table::render(&table_rows, n == 2));
    if let Some(out) = &args.out {
        write_json(out, &docs)?;
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Batch(a) => run_batch(a),
        Command::Verify(a) => run_verify(a),
        Command::Render(a) => run_render(a),
        Command::Tables(a) => run_tables(a),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flag_defaults_match_solver_defaults() {
        let cli = Cli::try_parse_from(["drw", "solve"]).unwrap();
        let Command::Solve(a) = cli.command else {
            panic!("expected solve")
        };
        assert_eq!(a.solver.config(), SolverConfig::default());
        assert_eq!(a.format, Format::Json);
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "drw",
            "batch",
            "--n",
            "2",
            "--M",
            "6",
            "--d",
            "2",
            "--seed",
            "4",
            "--exclude-zero-moment",
            "--replications",
            "3",
        ])
        .unwrap();
        let Command::Batch(a) = cli.command else {
            panic!("expected batch")
        };
        let c = a.solver.config();
        assert_eq!(
            (c.n, c.m, c.d, c.seed, c.include_zero_moment),
            (2, 6, 2, 4, false)
        );
        assert_eq!(a.replications, 3);
        assert!(Cli::try_parse_from(["drw", "solve", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["drw", "tables", "--table", "3"]).is_err());
    }

    #[test]
    fn exit_codes_for_parse_outcomes() {
        assert_eq!(main_with_args(["drw", "--help"]), EXIT_OK);
        assert_eq!(main_with_args(["drw", "--version"]), EXIT_OK);
        assert_eq!(main_with_args(["drw", "frobnicate"]), EXIT_ERROR);
        assert_eq!(main_with_args(["drw"]), EXIT_ERROR);
    }
}
