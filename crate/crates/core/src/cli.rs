//! The `fermibath` command-line front end.
//!
//! Every subcommand reads the same parameter record, from flags and/or a
//! JSON file whose keys are the flag names. Flags win over the file. Output
//! files go to `--out` (default `fermibath-out`), each CSV prefixed with a
//! `# config:` line holding the resolved parameters.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::channel_maps::DEFAULT_TOL_SING;
use crate::echo_engine::{
    overlap_two_qubit, trace_over_grid, trace_two_qubit, DecoherenceTrace, TimeGrid, OVERLAP_PAIRS,
};
use crate::error::{Error, Result};
use crate::ising_env::{build_spectrum, build_two_qubit_spectra, IsingParams, TwoQubitParams};
use crate::nonmarkov::{
    eta_heatmap, eta_two_qubit, finite_size_window, negativity_trace, revival_stats,
    two_qubit_cell_spectrum, witness_n, NonMarkovReport,
};
use crate::oracle::{OracleEvolution, OracleTwoQubit, MAX_SITES_TWO_QUBIT};
use crate::output::{fmt_f64, with_header, write_file};
use crate::paired_modes::ModeSpectrum;
use crate::scaling::{
    chaos_onset_sizes, fit_exponent, lambda_scan, log_spaced_sizes, scan_csv, sweep_csv, sweep_eta,
    FitQuantity, GridPolicy, OnsetMetric, ScanMeasure, DEFAULT_EPS_GAMMA,
};
use crate::svg::{heatmap, line_chart, Series};

pub const WORKERS_ENV: &str = "FERMIBATH_WORKERS";
const DEFAULT_OUT: &str = "fermibath-out";
const HEATMAP_POINTS: usize = 512;
const TWO_QUBIT_POINTS: usize = 200;
const ORACLE_T_END: f64 = 20.0;
const ORACLE_POINTS: usize = 200;
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "fermibath", version, about = "Decoherence channels and non-Markovianity of qubits in an Ising bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bogoliubov mode table of the bath pair
    Spectrum(Params),
    /// Decoherence factor and Loschmidt echo over time
    Echo(Params),
    /// Eigenvalue measure η, revival statistics and witness
    Eta(Params),
    /// η or 𝒩 over a list of transverse fields
    ScanLambda(Params),
    /// Negativity of qubit+ancilla and the witness 𝒩
    Witness(Params),
    /// η over lattice sizes with an exponential fit
    Scaling(Params),
    /// Two-qubit overlaps and η
    TwoQubit(Params),
    /// Product formula against dense exact diagonalization
    OracleCheck(Params),
}

/// Flag names double as JSON config keys.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub lattice_size: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j_s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_s: Option<f64>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub tol_sing: Option<f64>,
    #[arg(long)]
    pub eps_gamma: Option<f64>,
    /// End of the witness window (default: light-cone time L / 2v)
    #[arg(long)]
    pub window: Option<f64>,
    /// Emit the (t_m, t_f) grid (eta)
    #[arg(long)]
    #[serde(default)]
    pub heatmap: bool,
    /// Comma-separated lattice sizes (scaling)
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub l_min: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub n_sizes: Option<usize>,
    /// Also estimate the chaos onset Γ(L) from L and 2L (scaling)
    #[arg(long)]
    #[serde(default)]
    pub onset: bool,
    /// Comma-separated fields (scan-lambda)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub lambda_steps: Option<usize>,
    /// neg-eta | one-minus-eta: regress ln(-η) or ln(1-η) on L (scaling)
    #[arg(long)]
    pub fit: Option<String>,
    /// eta | witness (scan-lambda)
    #[arg(long)]
    pub measure: Option<String>,
    /// Custom mode table `k,theta_g,theta_e,eps_g,eps_e` (echo, eta, witness)
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Do not print progress and results to stdout
    #[arg(long, short)]
    #[serde(skip)]
    pub quiet: bool,
}

macro_rules! prefer_flags {
    ($cli:ident, $file:ident, $($f:ident),*) => {
        $( if $cli.$f.is_none() { $cli.$f = $file.$f.take(); } )*
    };
}

impl Params {
    fn merge_file(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let mut file: Params = serde_json::from_str(&text)
            .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?;
        prefer_flags!(
            self, file, lattice_size, lambda, delta, delta1, delta2, j_s, lambda_s, t_start, t_end,
            n_points, tol_sing, eps_gamma, window, sizes, l_min, l_max, n_sizes, lambdas,
            lambda_min, lambda_max, lambda_steps, fit, measure, spectrum, out, workers
        );
        self.heatmap |= file.heatmap;
        self.onset |= file.onset;
        Ok(self)
    }

    fn need<T: Copy>(v: Option<T>, field: &'static str) -> Result<T> {
        v.ok_or_else(|| Error::invalid(field, "required"))
    }

    fn ising(&self) -> Result<IsingParams> {
        IsingParams::new(
            Self::need(self.lattice_size, "L")?,
            Self::need(self.lambda, "lambda")?,
            Self::need(self.delta, "delta")?,
        )
    }

    fn two_qubit(&self) -> Result<TwoQubitParams> {
        let p = TwoQubitParams {
            lattice_size: Self::need(self.lattice_size, "L")?,
            lambda: Self::need(self.lambda, "lambda")?,
            delta1: Self::need(self.delta1, "delta1")?,
            delta2: Self::need(self.delta2, "delta2")?,
            j_s: self.j_s.unwrap_or(1.0),
            lambda_s: self.lambda_s.unwrap_or(0.0),
        };
        p.validate()?;
        Ok(p)
    }

    fn tol_sing(&self) -> Result<f64> {
        let t = self.tol_sing.unwrap_or(DEFAULT_TOL_SING);
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("tol-sing", "must be finite and >= 0"));
        }
        Ok(t)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    /// Grid from flags, defaulting to `[0, 0.75 L]` sampled finely enough to
    /// resolve the fastest mode (`Δt <= π / (4 max ε)`).
    fn grid(&self, lattice_size: usize, max_eps: f64, default_points: Option<usize>) -> Result<TimeGrid> {
        let policy = GridPolicy::default();
        let t_start = self.t_start.unwrap_or(0.0);
        let t_end = self
            .t_end
            .unwrap_or(t_start + policy.t_end_per_site * lattice_size as f64);
        let n = match (self.n_points, default_points) {
            (Some(n), _) => n,
            (None, Some(n)) => n,
            (None, None) => {
                let dt_max = std::f64::consts::PI / (4.0 * max_eps.max(1e-300));
                let resolved = ((t_end - t_start) / dt_max).ceil() as usize + 1;
                policy.grid_for(lattice_size)?.n_points().max(resolved)
            }
        };
        TimeGrid::new(t_start, t_end, n)
    }

    fn one_qubit_spectrum(&self) -> Result<ModeSpectrum> {
        match &self.spectrum {
            Some(path) => ModeSpectrum::from_csv_path(path),
            None => build_spectrum(&self.ising()?),
        }
    }

    fn header(&self, command: &str) -> String {
        let mut shown = self.clone();
        // run location and pool size do not change any number written
        shown.out = None;
        shown.workers = None;
        let mut v = serde_json::to_value(&shown).expect("params serialize");
        if let serde_json::Value::Object(map) = &mut v {
            map.retain(|_, val| !val.is_null());
            map.insert("command".into(), command.into());
        }
        v.to_string()
    }
}

macro_rules! say {
    ($ctx:expr, $($arg:tt)*) => {
        if !$ctx.params.quiet {
            println!($($arg)*);
        }
    };
}

struct Ctx {
    params: Params,
    command: &'static str,
    out: PathBuf,
}

impl Ctx {
    fn write_csv(&self, name: &str, extra: &[(&str, String)], body: &str) -> Result<PathBuf> {
        let mut comments = vec![("config", self.params.header(self.command))];
        comments.extend(extra.iter().map(|(k, v)| (*k, v.clone())));
        let path = self.out.join(name);
        write_file(&path, &with_header(&comments, body))?;
        Ok(path)
    }

    fn show(&self, path: &Path) {
        say!(self, "wrote {}", path.display());
    }

    fn write_svg(&self, name: &str, svg: &str) -> Result<PathBuf> {
        let path = self.out.join(name);
        write_file(&path, svg)?;
        Ok(path)
    }
}

fn worker_count(flag: Option<usize>) -> Result<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid("workers", format!("{WORKERS_ENV}={s} is not a count")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    Ok(n)
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on a
/// validation error, 2 on a numerical error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let (command, params, f): (&'static str, Params, fn(&Ctx) -> Result<()>) = match cli.command {
        Command::Spectrum(p) => ("spectrum", p, cmd_spectrum),
        Command::Echo(p) => ("echo", p, cmd_echo),
        Command::Eta(p) => ("eta", p, cmd_eta),
        Command::ScanLambda(p) => ("scan-lambda", p, cmd_scan_lambda),
        Command::Witness(p) => ("witness", p, cmd_witness),
        Command::Scaling(p) => ("scaling", p, cmd_scaling),
        Command::TwoQubit(p) => ("two-qubit", p, cmd_two_qubit),
        Command::OracleCheck(p) => ("oracle-check", p, cmd_oracle_check),
    };
    let params = params.merge_file()?;
    let workers = worker_count(params.workers)?;
    let ctx = Ctx {
        out: params.out_dir(),
        params,
        command,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| f(&ctx))
}

fn cmd_spectrum(ctx: &Ctx) -> Result<()> {
    let spec = build_spectrum(&ctx.params.ising()?)?;
    let extra = [
        ("ground_energy_g", fmt_f64(spec.ground_energy_g())),
        ("ground_energy_e", fmt_f64(spec.ground_energy_e())),
    ];
    ctx.show(&ctx.write_csv("spectrum.csv", &extra, &spec.to_csv())?);
    say!(ctx, "E_g = {}", fmt_f64(spec.ground_energy_g()));
    say!(ctx, "E_e = {}", fmt_f64(spec.ground_energy_e()));
    Ok(())
}

fn one_qubit_trace(p: &Params) -> Result<(ModeSpectrum, DecoherenceTrace)> {
    let spec = p.one_qubit_spectrum()?;
    let grid = p.grid(spec.lattice_size(), spec.max_eps_e(), None)?;
    let trace = trace_over_grid(&spec, &grid);
    Ok((spec, trace))
}

fn cmd_echo(ctx: &Ctx) -> Result<()> {
    let (_, trace) = one_qubit_trace(&ctx.params)?;
    let echo = trace.echo().expect("one-qubit");
    let mut extra = vec![];
    match revival_stats(&trace) {
        Ok(r) => {
            extra.push(("l_dec", fmt_f64(r.l_dec)));
            extra.push(("l_rev", fmt_f64(r.l_rev)));
            extra.push(("tau", fmt_f64(r.tau)));
            say!(ctx, "L_dec = {}  L_rev = {}  tau = {}", fmt_f64(r.l_dec), fmt_f64(r.l_rev), fmt_f64(r.tau));
        }
        Err(Error::NoRevival { .. }) => say!(ctx, "no revival on this grid"),
        Err(e) => return Err(e),
    }
    ctx.show(&ctx.write_csv("echo.csv", &extra, &trace.to_csv())?);
    let pts: Vec<(f64, f64)> = trace.grid.times().zip(echo).collect();
    let svg = line_chart("Loschmidt echo", "t", "L(t)", &[Series { label: "echo", points: &pts }]);
    ctx.show(&ctx.write_svg("echo.svg", &svg)?);
    Ok(())
}

/// Witness window: the flag, else the light-cone time for Ising baths, else
/// half the revival time of a custom spectrum.
fn witness_window(p: &Params, trace: &DecoherenceTrace) -> Result<f64> {
    if let Some(w) = p.window {
        return Ok(w);
    }
    if p.spectrum.is_none() {
        let ising = p.ising()?;
        return Ok(finite_size_window(ising.lattice_size, ising.lambda_eff(), ising.coupling_j));
    }
    match revival_stats(trace) {
        Ok(r) => Ok(0.5 * r.tau),
        Err(Error::NoRevival { .. }) => Ok(trace.grid.t_end()),
        Err(e) => Err(e),
    }
}

fn cmd_eta(ctx: &Ctx) -> Result<()> {
    let p = &ctx.params;
    let tol = p.tol_sing()?;
    let spec = p.one_qubit_spectrum()?;
    let default_points = p.heatmap.then_some(HEATMAP_POINTS);
    let grid = p.grid(spec.lattice_size(), spec.max_eps_e(), default_points)?;
    let trace = trace_over_grid(&spec, &grid);
    let window = witness_window(p, &trace)?;
    let report = NonMarkovReport::from_trace(&trace, tol, window)?;
    let body = format!("{}\n{}\n", NonMarkovReport::CSV_HEADER, report.csv_row());
    ctx.show(&ctx.write_csv("eta.csv", &[("window", fmt_f64(window))], &body)?);
    say!(ctx, "eta = {}", fmt_f64(report.eta));
    if let (Some(tm), Some(tf)) = (report.argmin_tm, report.argmin_tf) {
        say!(ctx, "argmin (t_m, t_f) = ({}, {})", fmt_f64(tm), fmt_f64(tf));
    }
    if let Some(r) = report.revival {
        say!(ctx, "1 - sqrt(L_rev/L_dec) = {}", fmt_f64(r.implied_eta()));
    }
    say!(ctx, "witness N = {}", fmt_f64(report.witness_n));
    if report.skipped_cells > 0 {
        say!(ctx, "skipped {} singular t_m points", report.skipped_cells);
    }
    if p.heatmap {
        let map = eta_heatmap(&trace, tol)?;
        ctx.show(&ctx.write_csv("heatmap.csv", &[("eta", fmt_f64(report.eta))], &map.to_csv())?);
        let n = grid.n_points();
        let rows: Vec<Vec<f64>> = (0..n).map(|m| (0..n).map(|f| map.get(m, f)).collect()).collect();
        let range = (grid.t_start(), grid.t_end());
        let svg = heatmap("min eigenvalue of D[Φ(t_f, t_m)]", "t_f", "t_m", range, range, &rows);
        ctx.show(&ctx.write_svg("heatmap.svg", &svg)?);
        say!(ctx, "heatmap min = {}", fmt_f64(map.min()));
    }
    Ok(())
}

fn scan_lambdas(p: &Params) -> Result<Vec<f64>> {
    if let Some(l) = &p.lambdas {
        if l.is_empty() {
            return Err(Error::invalid("lambdas", "empty list"));
        }
        return Ok(l.clone());
    }
    let lo = Params::need(p.lambda_min, "lambda-min")?;
    let hi = Params::need(p.lambda_max, "lambda-max")?;
    let steps = Params::need(p.lambda_steps, "lambda-steps")?;
    if steps < 1 || hi < lo {
        return Err(Error::invalid("lambda-steps", "need lambda-min <= lambda-max and steps >= 1"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn cmd_scan_lambda(ctx: &Ctx) -> Result<()> {
    let p = &ctx.params;
    let measure = match p.measure.as_deref().unwrap_or("eta") {
        "eta" => ScanMeasure::Eta,
        "witness" => ScanMeasure::Witness,
        other => return Err(Error::invalid("measure", format!("expected eta or witness, got `{other}`"))),
    };
    let lambdas = scan_lambdas(p)?;
    let l = Params::need(p.lattice_size, "L")?;
    let delta = Params::need(p.delta, "delta")?;
    let rows = lambda_scan(&lambdas, l, delta, measure, &GridPolicy::default(), p.tol_sing()?)?;
    ctx.show(&ctx.write_csv("scan.csv", &[], &scan_csv(&rows))?);
    if let Some(best) = rows.iter().min_by(|a, b| a.value.total_cmp(&b.value)) {
        say!(ctx, "min value {} at lambda = {}", fmt_f64(best.value), fmt_f64(best.lambda));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda_eff, r.value)).collect();
    let ylabel = if measure == ScanMeasure::Eta { "eta" } else { "N" };
    let svg = line_chart("field scan", "lambda + delta", ylabel, &[Series { label: ylabel, points: &pts }]);
    ctx.show(&ctx.write_svg("scan.svg", &svg)?);
    Ok(())
}

fn cmd_witness(ctx: &Ctx) -> Result<()> {
    let (_, trace) = one_qubit_trace(&ctx.params)?;
    let window = witness_window(&ctx.params, &trace)?;
    let ent = negativity_trace(&trace)?;
    let cut = trace.grid.times().take_while(|&t| t <= window).count();
    let n = witness_n(&ent[..cut]);
    let mut body = String::from("t,negativity\n");
    for (t, e) in trace.grid.times().zip(&ent) {
        body.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(*e)));
    }
    let extra = [("window", fmt_f64(window)), ("witness_n", fmt_f64(n))];
    ctx.show(&ctx.write_csv("witness.csv", &extra, &body)?);
    say!(ctx, "witness N = {} on [t_start, {}]", fmt_f64(n), fmt_f64(window));
    let pts: Vec<(f64, f64)> = trace.grid.times().zip(ent).collect();
    let svg = line_chart("system-ancilla negativity", "t", "E_SA", &[Series { label: "E_SA", points: &pts }]);
    ctx.show(&ctx.write_svg("witness.svg", &svg)?);
    Ok(())
}

fn scaling_sizes(p: &Params) -> Result<Vec<usize>> {
    if let Some(s) = &p.sizes {
        return Ok(s.clone());
    }
    log_spaced_sizes(
        Params::need(p.l_min, "l-min")?,
        Params::need(p.l_max, "l-max")?,
        p.n_sizes.unwrap_or(8),
    )
}

fn cmd_scaling(ctx: &Ctx) -> Result<()> {
    let p = &ctx.params;
    let sizes = scaling_sizes(p)?;
    let lambda = Params::need(p.lambda, "lambda")?;
    let delta = Params::need(p.delta, "delta")?;
    let policy = GridPolicy::default();
    let policy_note = serde_json::to_string(&policy).expect("policy serializes");
    let rows = sweep_eta(&sizes, lambda, delta, &policy, p.tol_sing()?)?;
    ctx.show(&ctx.write_csv("sweep.csv", &[("grid_policy", policy_note)], &sweep_csv(&rows))?);

    if p.onset {
        let eps = p.eps_gamma.unwrap_or(DEFAULT_EPS_GAMMA);
        let mut body = String::from("L,gamma\n");
        for &l in &sizes {
            let grid = TimeGrid::new(0.0, 1.5 * l as f64, 16 * l)?;
            let gamma = match chaos_onset_sizes(l, lambda, delta, &grid, eps, OnsetMetric::LogRatio) {
                Ok(g) => g,
                Err(Error::NoOnset { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            body.push_str(&format!("{l},{}\n", fmt_f64(gamma)));
        }
        ctx.show(&ctx.write_csv("onset.csv", &[], &body)?);
    }

    let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.lattice_size, r.eta)).collect();
    let quantity = match p.fit.as_deref().unwrap_or("neg-eta") {
        "neg-eta" => FitQuantity::NegEta,
        "one-minus-eta" => FitQuantity::OneMinusEta,
        other => return Err(Error::invalid("fit", format!("expected neg-eta or one-minus-eta, got `{other}`"))),
    };
    let fit = fit_exponent(&pts, quantity)?;
    ctx.show(&ctx.write_csv("fit.csv", &[], &fit.csv())?);
    say!(ctx, "slope = {}  intercept = {}  R^2 = {}", fmt_f64(fit.slope), fmt_f64(fit.intercept), fmt_f64(fit.r_squared));
    let data: Vec<(f64, f64)> = fit.sizes.iter().zip(&fit.log_neg_eta).map(|(&l, &y)| (l as f64, y)).collect();
    let line: Vec<(f64, f64)> = data.iter().map(|&(l, _)| (l, fit.intercept + fit.slope * l)).collect();
    let ylabel = if quantity == FitQuantity::NegEta { "ln(-eta)" } else { "ln(1-eta)" };
    let svg = line_chart(
        "finite-size scaling",
        "L",
        ylabel,
        &[Series { label: "sweep", points: &data }, Series { label: "fit", points: &line }],
    );
    ctx.show(&ctx.write_svg("scaling.svg", &svg)?);
    Ok(())
}

fn cmd_two_qubit(ctx: &Ctx) -> Result<()> {
    let p = &ctx.params;
    let params = p.two_qubit()?;
    let spectra = build_two_qubit_spectra(&params)?;
    let grid = p.grid(params.lattice_size, spectra.max_eps(), Some(TWO_QUBIT_POINTS))?;
    let trace = trace_two_qubit(&spectra, &grid);
    ctx.show(&ctx.write_csv("two_qubit_trace.csv", &[], &trace.to_csv())?);

    let tol = p.tol_sing()?;
    let phases = params.phases();
    let scan = eta_two_qubit(&trace, &phases, tol)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_f64);
    let times = scan.argmin.map(|(m, f)| (grid.time(m), grid.time(f)));
    let spectrum = match scan.argmin {
        Some((m, f)) => two_qubit_cell_spectrum(&trace, &phases, m, f, tol)?.unwrap_or_default(),
        None => vec![],
    };
    let n_negative = spectrum.iter().filter(|&&v| v < 0.0).count();
    let mut body = String::from("eta,tm_star,tf_star,skipped,n_negative\n");
    body.push_str(&format!(
        "{},{},{},{},{}\n",
        fmt_f64(scan.eta),
        opt(times.map(|t| t.0)),
        opt(times.map(|t| t.1)),
        scan.skipped_cells,
        n_negative
    ));
    ctx.show(&ctx.write_csv("two_qubit_eta.csv", &[], &body)?);
    let mut body = String::from("index,eigenvalue\n");
    for (i, v) in spectrum.iter().enumerate() {
        body.push_str(&format!("{i},{}\n", fmt_f64(*v)));
    }
    ctx.show(&ctx.write_csv("two_qubit_spectrum.csv", &[], &body)?);
    say!(ctx, "eta = {}  ({} negative eigenvalues at the argmin cell)", fmt_f64(scan.eta), n_negative);

    let xs = trace.two_qubit().expect("two-qubit");
    let curves: Vec<Vec<(f64, f64)>> = xs
        .iter()
        .map(|x| grid.times().zip(x.iter().map(|v| v.norm())).collect())
        .collect();
    let svg = line_chart(
        "two-qubit overlaps",
        "t",
        "|x_ab|",
        &[
            Series { label: "|x01|", points: &curves[0] },
            Series { label: "|x02|", points: &curves[1] },
            Series { label: "|x12|", points: &curves[2] },
        ],
    );
    ctx.show(&ctx.write_svg("two_qubit.svg", &svg)?);
    Ok(())
}

fn cmd_oracle_check(ctx: &Ctx) -> Result<()> {
    let p = &ctx.params;
    let ising = p.ising()?;
    let spec = build_spectrum(&ising)?;
    let t_start = p.t_start.unwrap_or(0.0);
    let grid = TimeGrid::new(t_start, p.t_end.unwrap_or(t_start + ORACLE_T_END), p.n_points.unwrap_or(ORACLE_POINTS))?;
    let oracle = OracleEvolution::new(ising.lattice_size, ising.lambda, ising.delta)?;
    let product = trace_over_grid(&spec, &grid);
    let x = product.one_qubit().expect("one-qubit");

    let mut body = String::from("t,re_x,im_x,re_oracle,im_oracle,abs_diff\n");
    let mut worst: f64 = 0.0;
    for (i, t) in grid.times().enumerate() {
        let o = oracle.decoherence_factor(t);
        let d = (x[i] - o).norm();
        worst = worst.max(d);
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(t),
            fmt_f64(x[i].re),
            fmt_f64(x[i].im),
            fmt_f64(o.re),
            fmt_f64(o.im),
            fmt_f64(d)
        ));
    }
    let e_dev = (spec.ground_energy_g() - oracle.ground_energy_g()).abs();
    let mut extra = vec![("max_abs_diff", fmt_f64(worst)), ("ground_energy_diff", fmt_f64(e_dev))];
    say!(ctx, "max |x_product - x_oracle| = {}", fmt_f64(worst));
    say!(ctx, "|E_g analytic - E_g dense| = {}", fmt_f64(e_dev));

    let mut worst2: f64 = 0.0;
    if let (Some(_), Some(_)) = (p.delta1, p.delta2) {
        if ising.lattice_size <= MAX_SITES_TWO_QUBIT {
            let params = p.two_qubit()?;
            let spectra = build_two_qubit_spectra(&params)?;
            let oracle2 = OracleTwoQubit::new(params.lattice_size, params.lambda, params.delta1, params.delta2)?;
            for t in grid.times() {
                let o = oracle2.overlaps(t);
                for (k, (a, b)) in OVERLAP_PAIRS.iter().enumerate() {
                    worst2 = worst2.max((overlap_two_qubit(*a, *b, &spectra, t) - o[k]).norm());
                }
            }
            extra.push(("max_abs_diff_two_qubit", fmt_f64(worst2)));
            say!(ctx, "max |x_ab product - x_ab oracle| = {}", fmt_f64(worst2));
        } else {
            say!(ctx, "two-qubit check skipped: L > {MAX_SITES_TWO_QUBIT}");
        }
    }
    ctx.show(&ctx.write_csv("oracle_check.csv", &extra, &body)?);
    let ok = worst <= ORACLE_TOL && worst2 <= ORACLE_TOL && e_dev <= ORACLE_TOL;
    say!(ctx, "{}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        Err(Error::OracleMismatch { deviation: worst.max(worst2).max(e_dev), tol: ORACLE_TOL })
    }
}
