//! Lattice-size and field sweeps, exponential fits of `-η`, revival period
//! and chaos-onset estimates.

use rayon::prelude::*;

use crate::echo_engine::{trace_over_grid, DecoherenceTrace, TimeGrid};
use crate::error::{Error, Result};
use crate::ising_env::{build_spectrum, IsingParams};
use crate::nonmarkov::{
    eta, finite_size_window, negativity_trace, revival_stats, witness_n, RevivalStats,
};
use crate::output::fmt_f64;

/// Time grid as a function of lattice size: `t_end = t_end_per_site * L`,
/// `n = max(min_points, points_per_site * L)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridPolicy {
    pub t_end_per_site: f64,
    pub points_per_site: usize,
    pub min_points: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        // τ ≈ L/2 at criticality, so 0.75 L brackets the first revival
        GridPolicy {
            t_end_per_site: 0.75,
            points_per_site: 8,
            min_points: 4096,
        }
    }
}

impl GridPolicy {
    pub fn grid_for(&self, lattice_size: usize) -> Result<TimeGrid> {
        if !(self.t_end_per_site.is_finite() && self.t_end_per_site > 0.0) {
            return Err(Error::invalid("t_end_per_site", "must be positive"));
        }
        let n = (self.points_per_site * lattice_size).max(self.min_points);
        TimeGrid::new(0.0, self.t_end_per_site * lattice_size as f64, n)
    }
}

/// One row of an `η` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lattice_size: usize,
    pub lambda: f64,
    pub delta: f64,
    pub eta: f64,
    pub tm_star: Option<f64>,
    pub tf_star: Option<f64>,
    pub revival: Option<RevivalStats>,
    pub skipped: usize,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "L,lambda,delta,eta,tm_star,tf_star,l_dec,l_rev,tau,skipped";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_f64);
        let r = self.revival;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.lattice_size,
            fmt_f64(self.lambda),
            fmt_f64(self.delta),
            fmt_f64(self.eta),
            opt(self.tm_star),
            opt(self.tf_star),
            opt(r.map(|r| r.l_dec)),
            opt(r.map(|r| r.l_rev)),
            opt(r.map(|r| r.tau)),
            self.skipped
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SweepRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// `η` and revival statistics at one `(L, λ, δ)` point.
pub fn eta_point(
    lattice_size: usize,
    lambda: f64,
    delta: f64,
    policy: &GridPolicy,
    tol_sing: f64,
) -> Result<SweepRow> {
    let spec = build_spectrum(&IsingParams::new(lattice_size, lambda, delta)?)?;
    let grid = policy.grid_for(lattice_size)?;
    let trace = trace_over_grid(&spec, &grid);
    let scan = eta(&trace, tol_sing)?;
    let revival = match revival_stats(&trace) {
        Ok(r) => Some(r),
        Err(Error::NoRevival { .. }) => None,
        Err(e) => return Err(e),
    };
    let times = scan.argmin_times(&grid);
    Ok(SweepRow {
        lattice_size,
        lambda,
        delta,
        eta: scan.eta,
        tm_star: times.map(|t| t.0),
        tf_star: times.map(|t| t.1),
        revival,
        skipped: scan.skipped_cells,
    })
}

/// `η` for every size in `sizes`, in input order.
pub fn sweep_eta(
    sizes: &[usize],
    lambda: f64,
    delta: f64,
    policy: &GridPolicy,
    tol_sing: f64,
) -> Result<Vec<SweepRow>> {
    sizes
        .par_iter()
        .map(|&l| eta_point(l, lambda, delta, policy, tol_sing))
        .collect()
}

/// About `n` even sizes spaced logarithmically on `[lo, hi]`, deduplicated.
pub fn log_spaced_sizes(lo: usize, hi: usize, n: usize) -> Result<Vec<usize>> {
    if lo < 2 || hi < lo || n < 2 {
        return Err(Error::invalid("sizes", "need 2 <= lo <= hi and n >= 2"));
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..n)
        .map(|i| {
            let v = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
            2 * ((v / 2.0).round() as usize).max(1)
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Which logarithm of `η` is regressed on `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitQuantity {
    /// `ln(-η)`.
    NegEta,
    /// `ln(1 - η) = ln(|x_f| / |x_m|)`, exactly linear in `L` once the
    /// argmin cell has settled; coincides with `ln(-η)` when `-η >> 1`.
    OneMinusEta,
}

impl FitQuantity {
    fn apply(self, eta: f64) -> f64 {
        match self {
            FitQuantity::NegEta => (-eta).ln(),
            FitQuantity::OneMinusEta => (-eta).ln_1p(),
        }
    }
}

/// Ordinary least-squares line of `ln(-η)` (or `ln(1 - η)`) against `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub quantity: FitQuantity,
    pub sizes: Vec<usize>,
    /// The regressed values, `ln(-η)` or `ln(1 - η)` per `quantity`.
    pub log_neg_eta: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl ScalingFit {
    pub const CSV_HEADER: &'static str = "slope,intercept,r2,n_points";

    pub fn csv(&self) -> String {
        format!(
            "{}\n{},{},{},{}\n",
            Self::CSV_HEADER,
            fmt_f64(self.slope),
            fmt_f64(self.intercept),
            fmt_f64(self.r_squared),
            self.sizes.len()
        )
    }
}

/// `(slope, intercept, R²)` of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// Slope and uncentred `R²` of the line `y = s x` through the origin.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let s = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - s * a).powi(2)).sum();
    (s, 1.0 - ss_res / syy)
}

pub fn fit_log_eta(points: &[(usize, f64)]) -> Result<ScalingFit> {
    fit_exponent(points, FitQuantity::NegEta)
}

pub fn fit_exponent(points: &[(usize, f64)], quantity: FitQuantity) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some(&(size, eta)) = points.iter().find(|p| !(p.1 < 0.0)) {
        return Err(Error::NonNegativeEta { size, eta });
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("sizes", "duplicate lattice size"));
    }
    let sizes: Vec<usize> = pts.iter().map(|p| p.0).collect();
    let log_neg_eta: Vec<f64> = pts.iter().map(|p| quantity.apply(p.1)).collect();
    let xs: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let (slope, intercept, r_squared) = ols(&xs, &log_neg_eta);
    Ok(ScalingFit {
        quantity,
        sizes,
        log_neg_eta,
        slope,
        intercept,
        r_squared,
    })
}

pub const DEFAULT_EPS_GAMMA: f64 = 0.01;

/// How two echoes of sizes `L` and `2L` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnsetMetric {
    /// `|ℒ_L(t) - ℒ_2L(t)|`.
    Raw,
    /// `|ln ℒ_L(t) - ½ ln ℒ_2L(t)| / |ln ℒ_L(t)|`. Before finite-size
    /// effects `ln ℒ` is extensive, so only the amplitude changes with `L`.
    LogRatio,
}

/// Earliest grid time at which the echoes of two traces differ by more than
/// `eps_gamma` under `metric`.
pub fn chaos_onset(
    trace_l: &DecoherenceTrace,
    trace_2l: &DecoherenceTrace,
    eps_gamma: f64,
    metric: OnsetMetric,
) -> Result<f64> {
    if trace_l.grid != trace_2l.grid {
        return Err(Error::GridMismatch);
    }
    let a = trace_l
        .echo()
        .ok_or_else(|| Error::invalid("trace_l", "expected a one-qubit trace"))?;
    let b = trace_2l
        .echo()
        .ok_or_else(|| Error::invalid("trace_2l", "expected a one-qubit trace"))?;
    a.iter()
        .zip(&b)
        .position(|(u, v)| match metric {
            OnsetMetric::Raw => (u - v).abs() > eps_gamma,
            OnsetMetric::LogRatio => {
                let (lu, lv) = (u.ln(), 0.5 * v.ln());
                (lu - lv).abs() > eps_gamma * lu.abs()
            }
        })
        .map(|i| trace_l.grid.time(i))
        .ok_or(Error::NoOnset { eps: eps_gamma })
}

/// Chaos onset between sizes `L` and `2L` on a shared grid.
pub fn chaos_onset_sizes(
    lattice_size: usize,
    lambda: f64,
    delta: f64,
    grid: &TimeGrid,
    eps_gamma: f64,
    metric: OnsetMetric,
) -> Result<f64> {
    let small = build_spectrum(&IsingParams::new(lattice_size, lambda, delta)?)?;
    let large = build_spectrum(&IsingParams::new(2 * lattice_size, lambda, delta)?)?;
    chaos_onset(
        &trace_over_grid(&small, grid),
        &trace_over_grid(&large, grid),
        eps_gamma,
        metric,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMeasure {
    Eta,
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub lambda_eff: f64,
    pub value: f64,
}

pub const SCAN_CSV_HEADER: &str = "lambda,lambda_eff,value";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = format!("{SCAN_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(r.lambda),
            fmt_f64(r.lambda_eff),
            fmt_f64(r.value)
        ));
    }
    out
}

/// `𝒩` accumulated over `[0, finite_size_window]` at one point.
pub fn witness_point(lattice_size: usize, lambda: f64, delta: f64, policy: &GridPolicy) -> Result<f64> {
    let params = IsingParams::new(lattice_size, lambda, delta)?;
    let spec = build_spectrum(&params)?;
    let window = finite_size_window(lattice_size, params.lambda_eff(), params.coupling_j);
    let full = policy.grid_for(lattice_size)?;
    let t_end = window.min(full.t_end());
    let n = ((t_end / full.spacing()).round() as usize + 1).max(2);
    let grid = TimeGrid::new(0.0, t_end, n)?;
    let ent = negativity_trace(&trace_over_grid(&spec, &grid))?;
    Ok(witness_n(&ent))
}

/// The selected measure for every `λ` at fixed `L` and `δ`, in input order.
pub fn lambda_scan(
    lambdas: &[f64],
    lattice_size: usize,
    delta: f64,
    measure: ScanMeasure,
    policy: &GridPolicy,
    tol_sing: f64,
) -> Result<Vec<ScanRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let value = match measure {
                ScanMeasure::Eta => eta_point(lattice_size, lambda, delta, policy, tol_sing)?.eta,
                ScanMeasure::Witness => witness_point(lattice_size, lambda, delta, policy)?,
            };
            Ok(ScanRow {
                lambda,
                lambda_eff: lambda + delta,
                value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn exact_exponential_recovers_slope() {
        let pts: Vec<(usize, f64)> = [100, 300, 1000, 3000]
            .iter()
            .map(|&l| (l, -(0.002 * l as f64).exp()))
            .collect();
        let fit = fit_log_eta(&pts).unwrap();
        assert!((fit.slope - 0.002).abs() <= 1e-12);
        assert!(fit.intercept.abs() <= 1e-9);
        assert!((fit.r_squared - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn one_minus_eta_recovers_growth_rate() {
        let pts: Vec<(usize, f64)> = [1000, 4000, 9000]
            .iter()
            .map(|&l| (l, 1.0 - (1.5e-5 * l as f64).exp()))
            .collect();
        let fit = fit_exponent(&pts, FitQuantity::OneMinusEta).unwrap();
        assert!((fit.slope - 1.5e-5).abs() <= 1e-15);
        assert!(fit.intercept.abs() <= 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_log_eta(&[(10, -1.0), (20, -2.0)]),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
        assert!(matches!(
            fit_log_eta(&[(10, -1.0), (20, 0.0), (30, -2.0)]),
            Err(Error::NonNegativeEta { size: 20, .. })
        ));
    }

    #[test]
    fn zero_delta_sweep_is_zero() {
        let rows = sweep_eta(&[8, 16, 32], 0.7, 0.0, &GridPolicy::default(), 1e-12).unwrap();
        assert!(rows.iter().all(|r| r.eta == 0.0 && r.tm_star.is_none()));
    }

    #[test]
    fn critical_eta_grows_with_size() {
        let rows = sweep_eta(&[20, 40, 80], 0.99, 0.01, &GridPolicy::default(), 1e-12).unwrap();
        assert!(rows[0].eta > rows[1].eta && rows[1].eta > rows[2].eta);
        assert!(rows[2].eta < 0.0);
    }

    #[test]
    fn single_lambda_scan_is_point_measure() {
        let p = GridPolicy::default();
        let row = lambda_scan(&[0.8], 40, 0.05, ScanMeasure::Eta, &p, 1e-12).unwrap();
        assert_eq!(row[0].value, eta_point(40, 0.8, 0.05, &p, 1e-12).unwrap().eta);
    }

    #[test]
    fn onset_trivial_cases() {
        let grid = TimeGrid::new(0.0, 30.0, 300).unwrap();
        let spec = build_spectrum(&IsingParams::new(20, 0.9, 0.1).unwrap()).unwrap();
        let t = trace_over_grid(&spec, &grid);
        assert!(matches!(chaos_onset(&t, &t, 0.01, OnsetMetric::Raw), Err(Error::NoOnset { .. })));
        assert!(matches!(
            chaos_onset_sizes(20, 0.9, 0.0, &grid, 0.01, OnsetMetric::LogRatio),
            Err(Error::NoOnset { .. })
        ));
        let other = TimeGrid::new(0.0, 30.0, 301).unwrap();
        let u = DecoherenceTrace::from_samples(other, vec![Complex64::new(1.0, 0.0); 301]).unwrap();
        assert_eq!(chaos_onset(&t, &u, 0.01, OnsetMetric::Raw), Err(Error::GridMismatch));
    }

    #[test]
    fn log_spacing() {
        let s = log_spaced_sizes(100, 10_000, 5).unwrap();
        assert_eq!(s, vec![100, 316, 1000, 3162, 10_000]);
        assert!(s.iter().all(|l| l % 2 == 0));
    }

    proptest! {
        #[test]
        fn fit_is_order_independent(seed in 0u64..1000) {
            let mut pts: Vec<(usize, f64)> = (1..=6)
                .map(|i| (10 * i, -(0.01 * (10 * i) as f64 + ((seed + i as u64) % 7) as f64 * 0.01).exp()))
                .collect();
            let a = fit_log_eta(&pts).unwrap();
            pts.reverse();
            let b = fit_log_eta(&pts).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
