//! End-to-end analysis runs: JSON config in, deterministic JSON report out,
//! plus CSV outputs for scan grids and parameter sweeps.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{DistSpec, Distribution};
use crate::equilibrium::{
    find_equilibria, log_concavity_check, uniqueness_certificate, EquilibriumSet,
    LogConcavityReport, MarketConfig, UniquenessCertificate,
};
use crate::reliability::{classify, grid_csv, GridConfig, ShapeClassification};
use crate::verify::{best_response_dynamics, identity_battery, mc_expected_price, IdentityReport};
use crate::{Error, Result};

const ORACLE_MC_SAMPLES: usize = 200_000;
const ORACLE_MC_POINTS: usize = 3;
const ORACLE_DYN_MAX_ITERS: usize = 200;
const ORACLE_DYN_TOL: f64 = 1e-8;
const ROOT_MATCH_TOL: f64 = 1e-6;

fn default_solver_tol() -> f64 {
    1e-10
}

/// Market section of an analysis config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarketSpec {
    pub n: u32,
    pub c: f64,
    pub demand: DistSpec,
}

/// Optional output destinations; command-line flags may override them.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub report_path: Option<PathBuf>,
    #[serde(default)]
    pub grid_csv_path: Option<PathBuf>,
}

/// Full configuration of one analysis run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub market: MarketSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub run_oracles: bool,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

// ----- report -----

#[derive(Debug, Clone, Serialize)]
pub struct SupportSummary {
    pub lo: f64,
    /// `None` encodes an unbounded support.
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarketSummary {
    pub n: u32,
    pub c: f64,
    pub demand: DistSpec,
    pub mean_demand: f64,
    pub support: SupportSummary,
    pub density_available: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct McPriceCheck {
    pub x: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
    pub within_four_stderr: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsSummary {
    pub converged: bool,
    pub iterations_used: usize,
    pub limit_total: Option<f64>,
    /// Whether the converged limit matches a root of the scan; `None` when
    /// the dynamics did not converge.
    pub matches_root: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleChecks {
    pub seed: u64,
    pub mc_price: Vec<McPriceCheck>,
    pub dynamics: DynamicsSummary,
    /// Finite-difference identity errors; absent without a density.
    pub identities: Option<IdentityReport>,
}

/// The complete analysis result serialized to the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub market: MarketSummary,
    pub classification: ShapeClassification,
    pub equilibria: EquilibriumSet,
    pub certificate: UniquenessCertificate,
    pub log_concavity: LogConcavityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracles: Option<OracleChecks>,
}

/// In-memory outcome of a run, with the serialized artifacts.
#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub report: AnalysisReport,
    pub report_json: String,
    pub grid_csv: Option<String>,
}

/// Run the full pipeline (classify, solve, certify, check concavity, optional
/// oracles) and write any configured output files.
pub fn run_analyze(cfg: &AnalysisConfig) -> Result<AnalysisOutcome> {
    let outcome = analyze_to_outcome(cfg)?;
    if let Some(path) = &cfg.outputs.report_path {
        std::fs::write(path, outcome.report_json.as_bytes())?;
    }
    if let Some(path) = &cfg.outputs.grid_csv_path {
        let csv = outcome.grid_csv.as_deref().expect("grid csv rendered when a path is set");
        std::fs::write(path, csv.as_bytes())?;
    }
    Ok(outcome)
}

fn analyze_to_outcome(cfg: &AnalysisConfig) -> Result<AnalysisOutcome> {
    let report = analyze_market(cfg)?;
    let report_json = render_report(&report)?;
    let grid_csv = if cfg.outputs.grid_csv_path.is_some() {
        let demand = cfg.market.demand.to_distribution()?;
        Some(grid_csv(&demand, &cfg.grid)?)
    } else {
        None
    };
    Ok(AnalysisOutcome { report, report_json, grid_csv })
}

fn render_report(report: &AnalysisReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::ConfigParse(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Pure analysis: no file IO.
pub fn analyze_market(cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    let demand = cfg.market.demand.to_distribution()?;
    let market = MarketConfig::new(demand, cfg.market.n, cfg.market.c)?;

    let classification = classify(market.demand(), &cfg.grid)?;
    let equilibria = find_equilibria(&market, &cfg.grid, cfg.solver_tol)?;
    let certificate = uniqueness_certificate(&market, &classification, &equilibria);
    let log_concavity = log_concavity_check(&market, &cfg.grid)?;
    let oracles = if cfg.run_oracles {
        Some(run_oracles(&market, &cfg.grid, &equilibria, cfg.seed)?)
    } else {
        None
    };

    let d = market.demand();
    let (lo, hi) = d.support();
    Ok(AnalysisReport {
        market: MarketSummary {
            n: cfg.market.n,
            c: cfg.market.c,
            demand: d.to_spec(),
            mean_demand: d.mean(),
            support: SupportSummary { lo, hi: hi.is_finite().then_some(hi) },
            density_available: d.has_density(),
        },
        classification,
        equilibria,
        certificate,
        log_concavity,
        oracles,
    })
}

fn run_oracles(
    market: &MarketConfig,
    grid: &GridConfig,
    equilibria: &EquilibriumSet,
    seed: u64,
) -> Result<OracleChecks> {
    let d = market.demand();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut mc_price = Vec::with_capacity(ORACLE_MC_POINTS);
    for i in 0..ORACLE_MC_POINTS {
        let u = 0.05 + 0.85 * rng.gen::<f64>();
        let x = d.quantile(u);
        let est = mc_expected_price(d, x, ORACLE_MC_SAMPLES, seed.wrapping_add(i as u64 + 1));
        let quadrature = market.expected_price(x);
        let abs_diff = (est.estimate - quadrature).abs();
        mc_price.push(McPriceCheck {
            x,
            estimate: est.estimate,
            stderr: est.stderr,
            quadrature,
            abs_diff,
            within_four_stderr: abs_diff <= 4.0 * est.stderr || abs_diff == 0.0,
        });
    }

    let n = market.firms() as usize;
    let per_firm_cap = d.mean() / market.firms() as f64;
    let init: Vec<f64> = (0..n).map(|_| per_firm_cap * rng.gen::<f64>()).collect();
    let trace = best_response_dynamics(market, &init, ORACLE_DYN_MAX_ITERS, ORACLE_DYN_TOL);
    let matches_root = trace.limit_total.map(|limit| {
        equilibria
            .roots
            .iter()
            .any(|r| (r.total_output - limit).abs() <= ROOT_MATCH_TOL * r.total_output.abs().max(1.0))
    });
    let dynamics = DynamicsSummary {
        converged: trace.converged,
        iterations_used: trace.iterations_used,
        limit_total: trace.limit_total,
        matches_root,
    };

    let identities = match identity_battery(market, grid, seed) {
        Ok(rep) => Some(rep),
        Err(Error::DensityNotAvailable) => None,
        Err(e) => return Err(e),
    };

    Ok(OracleChecks { seed, mc_price, dynamics, identities })
}

// ----- sweeps -----

/// Which market parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Firms,
    Cost,
    Scale,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParam::Firms),
            "c" => Ok(SweepParam::Cost),
            "scale" => Ok(SweepParam::Scale),
            other => Err(Error::ConfigParse(format!(
                "unknown sweep parameter '{other}' (expected n, c, or scale)"
            ))),
        }
    }
}

/// Run the analysis once per parameter value and render a CSV summary.
/// Row-level failures are recorded in the final column; the sweep continues.
pub fn run_sweep(base: &AnalysisConfig, param: SweepParam, values: &[f64]) -> Result<String> {
    if values.is_empty() {
        return Err(Error::ConfigParse("sweep needs at least one value".into()));
    }
    let mut out = String::new();
    out.push_str(
        "value,root_count,total_output,per_firm,bounded_density,residual_monotone,generalized_residual,certified,consistent,error\n",
    );
    for &value in values {
        let row = sweep_row(base, param, value);
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

fn sweep_row(base: &AnalysisConfig, param: SweepParam, value: f64) -> String {
    match sweep_report(base, param, value) {
        Ok(report) => {
            let cert = &report.certificate;
            let (total, per_firm) = match report.equilibria.unique_root() {
                Some(r) => (r.total_output.to_string(), r.per_firm.to_string()),
                None => (String::new(), String::new()),
            };
            format!(
                "{},{},{},{},{},{},{},{},{},",
                value,
                report.equilibria.roots.len(),
                total,
                per_firm,
                cert.bounded_density.satisfied,
                cert.residual_monotone.satisfied,
                cert.generalized_residual.satisfied,
                cert.certified,
                cert.consistent
            )
        }
        Err(e) => format!("{},,,,,,,,,{}", value, csv_escape(&e.to_string())),
    }
}

fn sweep_report(base: &AnalysisConfig, param: SweepParam, value: f64) -> Result<AnalysisReport> {
    let mut cfg = base.clone();
    cfg.run_oracles = false;
    cfg.outputs = OutputSpec::default();
    match param {
        SweepParam::Firms => {
            if !(value.fract() == 0.0 && value >= 1.0 && value <= f64::from(u32::MAX)) {
                return Err(Error::ConfigParse(format!(
                    "firm count must be a positive integer, got {value}"
                )));
            }
            cfg.market.n = value as u32;
        }
        SweepParam::Cost => {
            cfg.market.c = value;
        }
        SweepParam::Scale => {
            let scaled = cfg.market.demand.to_distribution()?.scale(value)?;
            cfg.market.demand = scaled.to_spec();
        }
    }
    analyze_market(&cfg)
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

// Re-exported for consumers that only need the pure pipeline.
pub use crate::reliability::grid_csv as render_grid_csv;

/// Convenience wrapper: analyze a distribution given directly (not as a spec).
pub fn analyze_distribution(
    demand: &Distribution,
    n: u32,
    c: f64,
    grid: &GridConfig,
    solver_tol: f64,
) -> Result<AnalysisReport> {
    let cfg = AnalysisConfig {
        market: MarketSpec { n, c, demand: demand.to_spec() },
        grid: grid.clone(),
        run_oracles: false,
        outputs: OutputSpec::default(),
        seed: 0,
        solver_tol,
    };
    analyze_market(&cfg)
}
