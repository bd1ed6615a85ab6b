//! Argument definitions and command implementations.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use sc_rates::estimators::{fit_rate_law, lower_envelope, upper_bound_uc, Measure, TrialRunner};
use sc_rates::{BlockGeometry, FitResult, Variant};

use crate::error::CliError;
use crate::manifest::{manifest_path, Manifest};
use crate::parallel;
use crate::results::{append_csv, read_csv, to_csv_string, write_csv, ResultRow};
use crate::validate;

#[derive(Debug, Parser)]
#[command(
    name = "sc-rates",
    version,
    about = "Monte Carlo rate experiments for sample compression schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one rate at a single (n, k)
    Simulate(SimulateArgs),
    /// Estimate a rate over an (n, k) grid and write a CSV
    Sweep(SweepArgs),
    /// Fit the rate law to a sweep CSV
    Fit(FitArgs),
    /// Tabulate the lower envelope and the upper bound
    Bounds(BoundsArgs),
    /// Run the self-validation suites
    Validate(ValidateArgs),
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: sc_rates::Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: sc_rates::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Reconstruction variant: oi (order-independent) or od (order-dependent)
    #[arg(long, default_value = "oi", value_parser = parse_variant)]
    pub variant: Variant,
    /// ag (excess risk) or uc (uniform deviation)
    #[arg(long, default_value = "ag", value_parser = parse_measure)]
    pub measure: Measure,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Master seed; every trial seed is derived from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Append the row to this CSV and write a manifest beside it
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub n_list: Vec<usize>,
    /// Comma-separated compression sizes
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub k_list: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV produced by `sweep` or `simulate --out`
    pub input: PathBuf,
    /// Only use rows of this variant (required if the file mixes variants)
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Only use rows of this measure (required if the file mixes measures)
    #[arg(long, value_parser = parse_measure)]
    pub measure: Option<Measure>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub n_list: Vec<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "oi", value_parser = parse_variant)]
    pub variant: Variant,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the suites against a deliberately broken bit extractor
    #[arg(long, hide = true)]
    pub inject_bit_fault: bool,
}

/// Output streams for a command.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

fn emit(w: &mut dyn Write, text: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes())
        .map_err(CliError::io("<stdout>"))
}

/// Runs a parsed command. `args` is the argument list without the program
/// name; it is recorded in manifests.
pub fn run(cli: Cli, args: &[String], io: &mut Io<'_>) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => simulate(&a, args, io),
        Command::Sweep(a) => sweep(&a, args, io),
        Command::Fit(a) => fit(&a, io).map(|_| ()),
        Command::Bounds(a) => bounds(&a, io),
        Command::Validate(a) => validate(&a, io),
    }
}

fn estimate(geometry: BlockGeometry, exp: &ExperimentArgs) -> Result<ResultRow, CliError> {
    let runner = TrialRunner::from_geometry(geometry);
    let est = parallel::monte_carlo(&runner, exp.measure, exp.trials, exp.seed)?;
    Ok(ResultRow::from(&est))
}

fn experiment_manifest(command: &str, args: &[String], exp: &ExperimentArgs) -> Manifest {
    let mut m = Manifest::new(command, args);
    m.push("master_seed", exp.seed)
        .push("variant", exp.variant)
        .push("measure", exp.measure)
        .push("trials", exp.trials);
    m
}

pub fn simulate(a: &SimulateArgs, args: &[String], io: &mut Io<'_>) -> Result<(), CliError> {
    let geometry = BlockGeometry::new(a.n, a.k, a.experiment.variant)?;
    let row = estimate(geometry, &a.experiment)?;
    emit(io.out, &to_csv_string(std::slice::from_ref(&row)))?;
    if let Some(path) = &a.out {
        append_csv(path, std::slice::from_ref(&row))?;
        let mut m = experiment_manifest("simulate", args, &a.experiment);
        m.push("n", a.n)
            .push("k", a.k)
            .push("output", path.display());
        m.write(&manifest_path(path))?;
    }
    Ok(())
}

/// Grid points in output order: `k` outer, `n` inner.
pub fn grid(n_list: &[usize], k_list: &[usize]) -> Vec<(usize, usize)> {
    k_list
        .iter()
        .flat_map(|&k| n_list.iter().map(move |&n| (n, k)))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn sweep(a: &SweepArgs, args: &[String], io: &mut Io<'_>) -> Result<(), CliError> {
    // Fail on an unwritable path before spending time on trials.
    write_csv(&a.out, &[])?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (n, k) in grid(&a.n_list, &a.k_list) {
        match BlockGeometry::new(n, k, a.experiment.variant) {
            Ok(g) => rows.push(estimate(g, &a.experiment)?),
            Err(e) => {
                writeln!(io.err, "warning: skipping n={n} k={k}: {e}")
                    .map_err(CliError::io("<stderr>"))?;
                skipped.push(format!("{n}:{k}"));
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("no valid (n, k) points in the grid".into()));
    }
    write_csv(&a.out, &rows)?;
    let mut m = experiment_manifest("sweep", args, &a.experiment);
    m.push("n_list", join(&a.n_list))
        .push("k_list", join(&a.k_list))
        .push("rows", rows.len())
        .push("skipped", skipped.join(","))
        .push("output", a.out.display());
    m.write(&manifest_path(&a.out))?;
    emit(io.out, &to_csv_string(&rows))
}

fn single<T: Ord + Clone + std::fmt::Display>(
    values: impl IntoIterator<Item = T>,
    what: &str,
) -> Result<T, CliError> {
    let set: BTreeSet<T> = values.into_iter().collect();
    let mut it = set.iter();
    match (it.next(), it.next()) {
        (Some(v), None) => Ok(v.clone()),
        (None, _) => Err(CliError::Usage(format!("no rows to fit for this {what}"))),
        _ => Err(CliError::Usage(format!(
            "fit needs rows of a single {what}; found {}",
            set.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// Loads rows for one `(variant, measure, k)` and fits the rate law.
pub fn fit_file(
    path: &Path,
    variant: Option<Variant>,
    measure: Option<Measure>,
) -> Result<FitResult, CliError> {
    let rows = read_csv(path)?;
    let mut selected = Vec::new();
    for row in &rows {
        let (v, me) = (row.variant()?, row.measure()?);
        if variant.is_none_or(|x| x == v) && measure.is_none_or(|x| x == me) {
            selected.push((v, me, row));
        }
    }
    let v = single(selected.iter().map(|s| s.0.flag()), "variant")?;
    single(selected.iter().map(|s| s.1.flag()), "measure")?;
    single(selected.iter().map(|s| s.2.k), "k")?;
    let points: Vec<(usize, usize, f64)> =
        selected.iter().map(|s| (s.2.n, s.2.k, s.2.mean)).collect();
    Ok(fit_rate_law(&points, v.parse()?)?)
}

pub fn fit(a: &FitArgs, io: &mut Io<'_>) -> Result<FitResult, CliError> {
    let res = fit_file(&a.input, a.variant, a.measure)?;
    emit(
        io.out,
        &format!(
            "slope      {}\nintercept  {}\nr_squared  {}\npoints     {}\n",
            res.slope,
            res.intercept,
            res.r_squared,
            res.points.len()
        ),
    )?;
    Ok(res)
}

/// One line of the bounds table.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsRow {
    pub n: usize,
    pub epsilon: f64,
    pub lower_envelope: f64,
    pub upper_bound: f64,
}

pub fn bounds_rows(
    n_list: &[usize],
    k: usize,
    variant: Variant,
    warn: &mut dyn Write,
) -> Result<Vec<BoundsRow>, CliError> {
    let mut rows = Vec::new();
    for &n in n_list {
        let row = BlockGeometry::new(n, k, variant).and_then(|g| {
            Ok(BoundsRow {
                n,
                epsilon: g.epsilon(),
                lower_envelope: lower_envelope(&g),
                upper_bound: upper_bound_uc(n, k, variant)?,
            })
        });
        match row {
            Ok(r) => rows.push(r),
            Err(e) => writeln!(warn, "warning: skipping n={n} k={k}: {e}")
                .map_err(CliError::io("<stderr>"))?,
        }
    }
    Ok(rows)
}

pub fn bounds(a: &BoundsArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let rows = bounds_rows(&a.n_list, a.k, a.variant, io.err)?;
    let mut text = format!(
        "{:>10}  {:>10}  {:>14}  {:>11}\n",
        "n", "epsilon", "lower_envelope", "upper_bound"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:>10}  {:>10.6}  {:>14.6e}  {:>11.6}\n",
            r.n, r.epsilon, r.lower_envelope, r.upper_bound
        ));
    }
    emit(io.out, &text)
}

pub fn validate(a: &ValidateArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let mut opts = validate::Options::new(a.seed);
    if a.inject_bit_fault {
        opts.bit_fn = validate::faulty_bit;
        writeln!(io.err, "warning: running with a corrupted bit extractor")
            .map_err(CliError::io("<stderr>"))?;
    }
    let mut write_err = None;
    let reports = validate::run_all(&opts, |r| {
        if write_err.is_none() {
            if let Err(e) = writeln!(io.out, "{r}").and_then(|_| io.out.flush()) {
                write_err = Some(e);
            }
        }
    });
    if let Some(e) = write_err {
        return Err(CliError::io("<stdout>")(e));
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name)
        .collect();
    emit(
        io.out,
        &format!(
            "{} suites, {} passed, {} failed (seed {})\n",
            reports.len(),
            reports.len() - failed.len(),
            failed.len(),
            a.seed
        ),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_order() {
        assert_eq!(
            grid(&[256, 1024], &[2, 4]),
            vec![(256, 2), (1024, 2), (256, 4), (1024, 4)]
        );
    }

    #[test]
    fn parses_lists_and_defaults() {
        let cli = Cli::try_parse_from([
            "sc-rates", "sweep", "--n-list", "256,1024", "--k-list", "4", "--out", "x.csv",
        ])
        .unwrap();
        let Command::Sweep(a) = cli.command else {
            panic!("expected sweep")
        };
        assert_eq!(a.n_list, vec![256, 1024]);
        assert_eq!(a.experiment.variant, Variant::OrderIndependent);
        assert_eq!(a.experiment.measure, Measure::AgnosticExcess);
        assert_eq!(a.experiment.trials, 1000);
        assert_eq!(a.experiment.seed, 0);
        assert!(Cli::try_parse_from([
            "sc-rates",
            "simulate",
            "--n",
            "32",
            "--k",
            "2",
            "--variant",
            "xx"
        ])
        .is_err());
    }

    #[test]
    fn bounds_skip_invalid() {
        let mut warn = Vec::new();
        let rows = bounds_rows(&[2, 32, 64], 2, Variant::OrderIndependent, &mut warn).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![32, 64]);
        assert!((rows[0].upper_bound - 0.7176).abs() < 5e-5);
        assert_eq!(rows[0].epsilon, 0.5);
        assert!(String::from_utf8(warn).unwrap().contains("n=2"));
    }
}
