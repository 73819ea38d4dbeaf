//! The `convexity` command line.
//!
//! [`run`] parses arguments, dispatches to the library and writes the result.
//! It returns the process exit code: 0 on success, 1 for usage errors and 2
//! for numeric or domain failures.

pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{builtin, BuiltinParams, FieldBody, ScalarField};
use crate::hessian::{BoundaryMode, FdConfig};
use crate::indices::{index_of_increase_1d, pointwise_indices, IncreaseOptions};
use crate::quadrature::{global_convexity_index, region_map, sweep_conv_a, HyperRect, Square, SweepResult};
use crate::symcore::{nuclear_distance_to_psd_oracle, psd_indices, trace_bound_check, OracleBudget, SymmetricMatrix};
use output::{Cell, Report};

/// Asymmetry above which a loaded matrix triggers a warning.
pub const ASYMMETRY_WARNING: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "convexity",
    version,
    about = "Convexity indices of scalar fields from the Hessian spectrum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and LOC/NLOC/CONV at one point.
    Pointwise {
        #[command(flatten)]
        field: FieldArgs,
        /// Evaluation point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, required = true)]
        at: Vec<f64>,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Index of increase of h' on an interval (1-D fields).
    Increase {
        #[command(flatten)]
        field: FieldArgs,
        /// Interval endpoints `a,b`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, num_args = 1, required = true)]
        interval: Vec<f64>,
        /// Simpson nodes (odd).
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Rescale the integrals to the full interval length.
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Global convexity index over a box.
    Global {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        region: RegionArgs,
        /// Simpson nodes per axis (odd).
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CONV(a) over expanding squares around a center.
    Sweep {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Pointwise reports on a lattice.
    Map {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        region: RegionArgs,
        /// Nodes per axis.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// LOPS/NLOPS/PS of a symmetric matrix read from CSV.
    Psd {
        /// CSV file, one matrix row per line.
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Randomized checks of the nuclear-distance identity and the trace bound.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Matrix dimension, 2 or 3.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CONV(a) sweep of the aggregated risk surface.
    RiskDemo {
        /// Mean exponent.
        #[arg(long, allow_hyphen_values = true, value_parser = number)]
        beta: f64,
        /// Quantile level.
        #[arg(long, default_value_t = 0.99, value_parser = number)]
        p: f64,
        /// Penalty exponent.
        #[arg(long, default_value_t = 0.25, value_parser = number)]
        alpha: f64,
        /// Line weights [default: 0.5,0.5]
        #[arg(long, value_delimiter = ',', value_parser = number)]
        weights: Option<Vec<f64>>,
        /// Margin of the [delta, 1-delta] domain.
        #[arg(long, value_parser = number)]
        delta: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field expression in x, y, z (or x1, x2, ...).
    #[arg(long = "fn", conflicts_with = "builtin")]
    expr: Option<String>,
    /// Corpus field: h_cos, g_risk, h_beta, cubic_1d, neg_cos_1d.
    #[arg(long)]
    builtin: Option<String>,
    /// Dimension of an expression field; inferred from the point or region when omitted.
    #[arg(long)]
    dim: Option<usize>,
    /// Mean exponent of h_beta.
    #[arg(long, allow_hyphen_values = true, value_parser = number)]
    beta: Option<f64>,
    /// Quantile level of the risk builtins [default: 0.99]
    #[arg(long, value_parser = number)]
    p: Option<f64>,
    /// Penalty exponent of the risk builtins [default: 0.25]
    #[arg(long, value_parser = number)]
    alpha: Option<f64>,
    /// Line weights of h_beta [default: 0.5,0.5]
    #[arg(long, value_delimiter = ',', value_parser = number)]
    weights: Option<Vec<f64>>,
    /// Margin of the [delta, 1-delta] domain [default: 0.0001]
    #[arg(long, value_parser = number)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Square center (with --a).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, requires = "a")]
    center: Option<Vec<f64>>,
    /// Square half-width (with --center).
    #[arg(long, value_parser = number, requires = "center", conflicts_with_all = ["lo", "hi"])]
    a: Option<f64>,
    /// Lower corner (with --hi).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, requires = "hi")]
    lo: Option<Vec<f64>>,
    /// Upper corner (with --lo).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, requires = "lo")]
    hi: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = number, required = true)]
    center: Vec<f64>,
    /// Largest half-width.
    #[arg(long, value_parser = number)]
    amax: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Simpson nodes per axis (odd).
    #[arg(long, default_value_t = 201)]
    grid: usize,
}

#[derive(Args, Debug)]
struct FdArgs {
    /// Base finite-difference step, in (0, 0.1].
    #[arg(long, default_value_t = 1e-4, value_parser = number)]
    fd_step: f64,
    /// Use the base step as is instead of scaling by max(1, |x|).
    #[arg(long)]
    fd_absolute: bool,
    /// Stencils leaving the domain: halve the step or fail.
    #[arg(long, value_enum, default_value_t = Boundary::Shrink)]
    boundary: Boundary,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for single-record commands (pointwise, psd), csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads for lattice evaluation; all available cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Boundary {
    Shrink,
    Reject,
}

/// Parses a decimal number or a constant expression such as `pi/2`.
fn number(s: &str) -> std::result::Result<f64, String> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(v);
    }
    let field = ScalarField::parse(s, 1).map_err(|e| format!("`{s}` is not a number: {e}"))?;
    match field.body() {
        FieldBody::Expression(e) if e.max_variable().is_none() => {
            field.evaluate(&[0.0]).map_err(|e| format!("`{s}`: {e}"))
        }
        _ => Err(format!("`{s}` is not a number")),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

impl FieldArgs {
    fn build(&self, inferred_dim: Option<usize>) -> Result<ScalarField> {
        match (&self.expr, &self.builtin) {
            (Some(src), None) => {
                let dim = self.dim.or(inferred_dim).unwrap_or(2);
                ScalarField::parse(src, dim)
            }
            (None, Some(name)) => {
                let params = BuiltinParams {
                    beta: self.beta,
                    p: self.p,
                    alpha: self.alpha,
                    weights: self.weights.clone(),
                    delta: self.delta,
                };
                let f = builtin(name, &params)?;
                if let Some(d) = self.dim.filter(|&d| d != f.dimension()) {
                    return Err(usage(format!(
                        "--dim {d} does not match builtin `{name}` of dimension {}",
                        f.dimension()
                    )));
                }
                Ok(f)
            }
            _ => Err(usage("exactly one of --fn or --builtin is required")),
        }
    }
}

impl FdArgs {
    fn build(&self) -> Result<FdConfig> {
        let mut cfg = FdConfig::new(self.fd_step)?;
        cfg.relative_scaling = !self.fd_absolute;
        cfg.boundary = match self.boundary {
            Boundary::Shrink => BoundaryMode::Shrink,
            Boundary::Reject => BoundaryMode::Reject,
        };
        Ok(cfg)
    }

    fn echo(&self, report: &mut Report) {
        report.config("fd-step", self.fd_step);
        report.config("fd-relative", !self.fd_absolute);
    }
}

impl RegionArgs {
    fn dim_hint(&self) -> Option<usize> {
        self.center.as_ref().or(self.lo.as_ref()).map(Vec::len)
    }

    fn build(&self) -> Result<HyperRect> {
        match (&self.center, self.a, &self.lo, &self.hi) {
            (Some(c), Some(a), None, None) => Square::new(c.clone(), a)?.to_rect(),
            (None, None, Some(lo), Some(hi)) => HyperRect::new(lo.clone(), hi.clone()),
            _ => Err(usage("give either --center with --a, or --lo with --hi")),
        }
    }
}

fn coordinate_names(d: usize) -> Vec<String> {
    if d <= 3 {
        ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=d).map(|i| format!("x{i}")).collect()
    }
}

fn point_header(d: usize) -> Vec<String> {
    let mut h = coordinate_names(d);
    h.extend((1..=d).map(|i| format!("lambda{i}")));
    h.extend(["loc", "nloc", "conv", "degenerate"].map(String::from));
    h
}

fn point_row(r: &crate::indices::ConvexityReport) -> Vec<Cell> {
    let mut row: Vec<Cell> = r.point.iter().map(|&v| v.into()).collect();
    row.extend(r.eigenvalues.iter().map(|&v| Cell::from(v)));
    row.extend([r.loc.into(), r.nloc.into(), r.conv.into(), r.degenerate.into()]);
    row
}

fn sweep_report(command: &str, field: &ScalarField, s: &SweepResult, fd: &FdArgs) -> Report {
    let mut rep = Report::new(command, ["a", "conv", "degenerate_fraction"].map(String::from).to_vec());
    rep.config("field", field.describe());
    rep.config("center", format_list(&s.center));
    rep.config("grid", s.nodes);
    fd.echo(&mut rep);
    for r in &s.records {
        rep.push(vec![r.a.into(), r.conv.into(), r.degenerate_fraction.into()]);
    }
    rep
}

fn format_list(v: &[f64]) -> String {
    v.iter().map(|&x| output::format_g17(x)).collect::<Vec<_>>().join(" ")
}

/// Reads a matrix CSV: one row per line, `#` comments and blank lines skipped.
pub fn read_matrix_csv(text: &str) -> Result<(SymmetricMatrix<f64>, f64)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::InvalidInput(e.to_string()))?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("row {}: `{s}` is not a number", line + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("matrix file is empty".into()));
    }
    let asym = if rows.iter().all(|r| r.len() == rows.len()) {
        SymmetricMatrix::max_asymmetry(&rows)
    } else {
        0.0
    };
    Ok((SymmetricMatrix::from_rows(&rows)?, asym))
}

/// Randomized checks behind `verify`; returns `(oracle passes, trace-bound passes)`.
pub fn verify_trials(trials: usize, dim: usize, seed: u64) -> Result<(usize, usize)> {
    if !(2..=3).contains(&dim) {
        return Err(usage(format!("--dim must be 2 or 3, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle_pass = 0;
    let mut trace_pass = 0;
    for t in 0..trials {
        let m = random_symmetric(&mut rng, dim);
        let budget = OracleBudget {
            seed: seed.wrapping_add(t as u64),
            ..Default::default()
        };
        let outcome = nuclear_distance_to_psd_oracle(&m, &budget)?;
        let lops = psd_indices(&m).lops;
        if outcome.distance >= lops - 1e-3 && outcome.distance <= lops + 1e-12 {
            oracle_pass += 1;
        }
        let a = random_psd(&mut rng, dim);
        let b = random_psd(&mut rng, dim);
        if trace_bound_check(&a, &b)? {
            trace_pass += 1;
        }
    }
    Ok((oracle_pass, trace_pass))
}

fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> SymmetricMatrix<f64> {
    let mut e = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = rng.random_range(-1.0..=1.0);
            e[i * dim + j] = v;
            e[j * dim + i] = v;
        }
    }
    SymmetricMatrix::new(dim, e).expect("finite entries")
}

fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> SymmetricMatrix<f64> {
    let a: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
    SymmetricMatrix::gram(dim, &a).expect("square factor")
}

/// Runs one subcommand; returns the report, the requested format and notes for stderr.
fn execute(cmd: &Command) -> Result<(Report, Option<Format>, Vec<String>)> {
    let mut notes = Vec::new();
    let (report, out) = match cmd {
        Command::Pointwise { field, at, fd, out } => {
            let f = field.build(Some(at.len()))?;
            let r = pointwise_indices(&f, at, &fd.build()?)?;
            let mut rep = Report::new("pointwise", point_header(f.dimension()));
            rep.single = true;
            rep.config("field", f.describe());
            fd.echo(&mut rep);
            rep.push(point_row(&r));
            (rep, out)
        }
        Command::Increase {
            field,
            interval,
            grid,
            rescale,
            fd,
            out,
        } => {
            let &[a, b] = interval.as_slice() else {
                return Err(usage("--interval takes exactly two values a,b"));
            };
            let f = field.build(Some(1))?;
            let opts = IncreaseOptions {
                nodes: *grid,
                rescale: *rescale,
            };
            let r = index_of_increase_1d(&f, (a, b), &opts, &fd.build()?)?;
            let header = [
                "a",
                "b",
                "effective_lo",
                "effective_hi",
                "index",
                "positive_integral",
                "absolute_integral",
                "degenerate",
            ];
            let mut rep = Report::new("increase", header.map(String::from).to_vec());
            rep.single = true;
            rep.config("field", f.describe());
            rep.config("grid", *grid);
            rep.config("rescale", *rescale);
            fd.echo(&mut rep);
            rep.push(vec![
                a.into(),
                b.into(),
                r.effective.0.into(),
                r.effective.1.into(),
                r.value.into(),
                r.positive_integral.into(),
                r.absolute_integral.into(),
                r.degenerate.into(),
            ]);
            (rep, out)
        }
        Command::Global {
            field,
            region,
            grid,
            fd,
            out,
        } => {
            let f = field.build(region.dim_hint())?;
            let rect = region.build()?;
            let g = global_convexity_index(&f, &rect, *grid, &fd.build()?)?;
            let header = [
                "conv",
                "degenerate",
                "degenerate_fraction",
                "positive_integral",
                "absolute_integral",
            ];
            let mut rep = Report::new("global", header.map(String::from).to_vec());
            rep.single = true;
            rep.config("field", f.describe());
            rep.config("lo", format_list(rect.lo()));
            rep.config("hi", format_list(rect.hi()));
            rep.config("grid", *grid);
            fd.echo(&mut rep);
            rep.push(vec![
                g.value.into(),
                g.degenerate.into(),
                g.degenerate_fraction.into(),
                g.positive_integral.into(),
                g.absolute_integral.into(),
            ]);
            (rep, out)
        }
        Command::Sweep { field, sweep, fd, out } => {
            let f = field.build(Some(sweep.center.len()))?;
            let s = sweep_conv_a(&f, &sweep.center, sweep.amax, sweep.steps, sweep.grid, &fd.build()?)?;
            (sweep_report("sweep", &f, &s, fd), out)
        }
        Command::Map {
            field,
            region,
            grid,
            fd,
            out,
        } => {
            let f = field.build(region.dim_hint())?;
            let rect = region.build()?;
            let m = region_map(&f, &rect, *grid, &fd.build()?)?;
            let mut header = point_header(f.dimension());
            header.pop();
            let mut rep = Report::new("map", header);
            rep.config("field", f.describe());
            rep.config("lo", format_list(rect.lo()));
            rep.config("hi", format_list(rect.hi()));
            rep.config("grid", *grid);
            fd.echo(&mut rep);
            for r in &m.reports {
                let mut row = point_row(r);
                row.pop();
                rep.push(row);
            }
            (rep, out)
        }
        Command::Psd { matrix, out } => {
            let text = std::fs::read_to_string(matrix).map_err(|e| Error::Io(format!("{}: {e}", matrix.display())))?;
            let (m, asym) = read_matrix_csv(&text)?;
            if asym > ASYMMETRY_WARNING {
                log::warn!("matrix asymmetry {asym:e} exceeds {ASYMMETRY_WARNING:e}; symmetrized");
                notes.push(format!(
                    "warning: matrix asymmetry {asym:e} exceeds {ASYMMETRY_WARNING:e}; symmetrized"
                ));
            }
            let r = psd_indices(&m);
            let mut rep = Report::new("psd", ["lops", "nlops", "ps", "degenerate"].map(String::from).to_vec());
            rep.single = true;
            rep.config("matrix", matrix.display().to_string());
            rep.config("dim", m.dim());
            rep.push(vec![r.lops.into(), r.nlops.into(), r.ps.into(), r.degenerate.into()]);
            (rep, out)
        }
        Command::Verify { trials, dim, out } => {
            let (oracle, trace) = verify_trials(*trials, *dim, out.seed)?;
            let mut rep = Report::new(
                "verify",
                ["check", "trials", "passed", "failed"].map(String::from).to_vec(),
            );
            rep.config("dim", *dim);
            rep.config("seed", out.seed);
            for (name, passed) in [("nuclear_distance_oracle", oracle), ("trace_bound", trace)] {
                rep.push(vec![
                    name.into(),
                    (*trials).into(),
                    passed.into(),
                    (*trials - passed).into(),
                ]);
            }
            notes.push(format!(
                "oracle: {oracle}/{trials} pass; trace bound: {trace}/{trials} pass"
            ));
            (rep, out)
        }
        Command::RiskDemo {
            beta,
            p,
            alpha,
            weights,
            delta,
            sweep,
            fd,
            out,
        } => {
            let params = BuiltinParams {
                beta: Some(*beta),
                p: Some(*p),
                alpha: Some(*alpha),
                weights: weights.clone(),
                delta: *delta,
            };
            let f = builtin("h_beta", &params)?;
            let s = sweep_conv_a(&f, &sweep.center, sweep.amax, sweep.steps, sweep.grid, &fd.build()?)?;
            (sweep_report("risk-demo", &f, &s, fd), out)
        }
    };
    Ok((report, out.format, notes))
}

fn out_args(cmd: &Command) -> &OutArgs {
    match cmd {
        Command::Pointwise { out, .. }
        | Command::Increase { out, .. }
        | Command::Global { out, .. }
        | Command::Sweep { out, .. }
        | Command::Map { out, .. }
        | Command::Psd { out, .. }
        | Command::Verify { out, .. }
        | Command::RiskDemo { out, .. } => out,
    }
}

fn run_command(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let out = out_args(cmd);
    let (mut report, format, notes) = match out.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(|| execute(cmd))?,
        None => execute(cmd)?,
    };
    for note in notes {
        writeln!(stderr, "{note}")?;
    }
    if !matches!(cmd, Command::Verify { .. }) {
        report.config("seed", out.seed);
    }
    let default = match cmd {
        Command::Pointwise { .. } | Command::Psd { .. } => Format::Json,
        _ => Format::Csv,
    };
    let format = format.unwrap_or(default);
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json(),
    };
    match &out.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    let failed = matches!(cmd, Command::Verify { .. }) && report.rows.iter().any(|r| r[3] != Cell::Int(0));
    Ok(if failed { 2 } else { 0 })
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match run_command(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("convexity").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn number_accepts_constants() {
        assert_eq!(number("0.25").unwrap(), 0.25);
        assert_eq!(number("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert!(number("x").is_err());
        assert!(number("abc").is_err());
    }

    #[test]
    fn pointwise_json() {
        let (code, out, _) = run_str(&["pointwise", "--builtin", "h_cos", "--at", "0,0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["conv"], serde_json::json!(1));
    }

    #[test]
    fn negative_coordinates() {
        let (code, out, err) = run_str(&["pointwise", "--fn", "x^2 - y^2", "--at", "-1,-2", "--format", "csv"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("\n-1,-2,"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["pointwise", "--at", "0,0"]).0, 1);
        assert_eq!(run_str(&["pointwise", "--builtin", "nope", "--at", "0,0"]).0, 1);
        assert_eq!(run_str(&["pointwise", "--builtin", "h_cos", "--at", "zero"]).0, 1);
        assert_eq!(run_str(&["verify", "--dim", "4"]).0, 1);
        assert_eq!(run_str(&["frobnicate"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn domain_error_exit_code() {
        let (code, _, err) = run_str(&["pointwise", "--fn", "sqrt(x)", "--dim", "1", "--at", "0"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn matrix_csv_parsing() {
        let (m, asym) = read_matrix_csv("# comment\n3, 0\n\n0,-1\n").unwrap();
        assert_eq!(m, SymmetricMatrix::from_diagonal(&[3.0, -1.0]));
        assert_eq!(asym, 0.0);
        let (_, asym) = read_matrix_csv("1,2\n2.5,1\n").unwrap();
        assert_eq!(asym, 0.5);
        assert!(read_matrix_csv("1,2\n3\n").is_err());
        assert!(read_matrix_csv("1,a\n1,1\n").is_err());
    }
}
