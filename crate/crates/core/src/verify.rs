//! Independent numerical oracles: Monte-Carlo pricing, best-response search
//! and dynamics, and finite-difference checks of the closed-form derivative
//! identities. These deliberately avoid the closed forms used by the
//! `equilibrium` module so agreement is evidence, not circularity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::equilibrium::MarketConfig;
use crate::reliability::{gfr, hazard, mrd, GridConfig};
use crate::{Error, Result};

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Estimate `E[(A - X)+]` by inverse-cdf sampling; deterministic per seed.
pub fn mc_expected_price(d: &Distribution, x_total: f64, samples: usize, seed: u64) -> McEstimate {
    assert!(samples >= 1000, "need at least 1000 samples, got {samples}");
    if x_total >= d.support_hi() {
        return McEstimate { estimate: 0.0, stderr: 0.0, samples };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let alpha = d.sample(&mut rng);
        let v = (alpha - x_total).max(0.0);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    McEstimate { estimate: mean, stderr: (var / n).sqrt(), samples }
}

/// Profit-maximizing own output against a fixed total of opponent output:
/// coarse scan for a bracket, then golden-section refinement. Returns 0 when
/// no positive output earns a positive payoff.
pub fn best_response(market: &MarketConfig, opponents_total: f64) -> f64 {
    assert!(opponents_total >= 0.0, "opponent output must be nonnegative");
    let cap_total = price_support_cap(market);
    let x_cap = cap_total - opponents_total;
    if x_cap <= 0.0 {
        return 0.0;
    }
    let payoff =
        |x: f64| x * (market.expected_price(x + opponents_total) - market.cost());

    // Coarse scan guards against flat or multi-modal stretches.
    const CELLS: usize = 128;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=CELLS {
        let x = x_cap * i as f64 / CELLS as f64;
        let v = payoff(x);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = x_cap * best_i.saturating_sub(1) as f64 / CELLS as f64;
    let hi = x_cap * (best_i + 1).min(CELLS) as f64 / CELLS as f64;
    let x_star = golden_max(payoff, lo, hi, 1e-10 * x_cap.max(1.0));
    if payoff(x_star) <= 0.0 {
        0.0
    } else {
        x_star
    }
}

/// Largest total output at which the expected price still covers marginal
/// cost (support top, or its quantile surrogate, for costless markets).
fn price_support_cap(market: &MarketConfig) -> f64 {
    let d = market.demand();
    let hi = if d.support_hi().is_finite() { d.support_hi() } else { d.quantile(1.0 - 1e-12) };
    if market.cost() == 0.0 || market.expected_price(hi) >= market.cost() {
        return hi;
    }
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if market.expected_price(mid) > market.cost() {
            lo = mid;
        } else {
            up = mid;
        }
        if up - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + up)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Iterate trace of sequential best-response dynamics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub iterates: Vec<Vec<f64>>,
    pub converged: bool,
    /// Total output at the limit, when converged.
    pub limit_total: Option<f64>,
    pub iterations_used: usize,
}

/// Sequential (Gauss-Seidel) best-response updates from `init`, stopping when
/// the largest componentwise change in a sweep falls below `dyn_tol`.
/// Non-convergence is reported in the trace, never as an error.
pub fn best_response_dynamics(
    market: &MarketConfig,
    init: &[f64],
    max_iters: usize,
    dyn_tol: f64,
) -> DynamicsTrace {
    assert_eq!(
        init.len(),
        market.firms() as usize,
        "need one initial output per firm"
    );
    assert!(init.iter().all(|&x| x >= 0.0), "initial outputs must be nonnegative");
    let mut x: Vec<f64> = init.to_vec();
    let mut iterates = vec![x.clone()];
    let mut converged = false;
    let mut iterations_used = 0;
    for _ in 0..max_iters {
        iterations_used += 1;
        let mut max_change: f64 = 0.0;
        for i in 0..x.len() {
            let others: f64 = x.iter().sum::<f64>() - x[i];
            let updated = best_response(market, others);
            max_change = max_change.max((updated - x[i]).abs());
            x[i] = updated;
        }
        iterates.push(x.clone());
        if max_change < dyn_tol {
            converged = true;
            break;
        }
    }
    let limit_total = converged.then(|| x.iter().sum());
    DynamicsTrace { iterates, converged, limit_total, iterations_used }
}

/// Maximum relative finite-difference error per derivative identity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `m'(x)` vs `h(x) m(x) - 1`.
    pub mrd_derivative: f64,
    /// `L'(x)` vs `h L + (g - (n+1))/n`.
    pub l_derivative: f64,
    /// `(x S(x))'` vs `S(x) (1 - g(x))`.
    pub output_survival_derivative: f64,
    /// `P'(x)` vs `-S(x)`.
    pub price_derivative: f64,
    pub points_used: usize,
}

impl IdentityReport {
    pub fn max_error(&self) -> f64 {
        self.mrd_derivative
            .max(self.l_derivative)
            .max(self.output_survival_derivative)
            .max(self.price_derivative)
    }
}

/// Check the four closed-form derivative identities against central finite
/// differences at randomized smooth interior points.
pub fn identity_battery(market: &MarketConfig, cfg: &GridConfig, seed: u64) -> Result<IdentityReport> {
    cfg.validate()?;
    let d = market.demand();
    if !d.has_density() {
        return Err(Error::DensityNotAvailable);
    }
    let points = sample_smooth_points(d, seed, 20);
    if points.is_empty() {
        return Err(Error::EmptyRegion(
            "no smooth interior points found for finite differencing".into(),
        ));
    }

    let n = f64::from(market.firms());
    let mut report = IdentityReport {
        mrd_derivative: 0.0,
        l_derivative: 0.0,
        output_survival_derivative: 0.0,
        price_derivative: 0.0,
        points_used: points.len(),
    };
    for &x in &points {
        let h = fd_step(x);
        let m = mrd(d, x)?;
        let hz = hazard(d, x)?;
        let g = gfr(d, x)?;
        let s = d.survival(x);

        let fd_m = central_diff(|t| mrd(d, t).expect("interior point"), x, h);
        track(&mut report.mrd_derivative, fd_m, hz * m - 1.0);

        let fd_l = central_diff(|t| market.l_value(t).expect("interior point"), x, h);
        track(&mut report.l_derivative, fd_l, hz * market.l_value(x)? + (g - (n + 1.0)) / n);

        let fd_xs = central_diff(|t| t * d.survival(t), x, h);
        track(&mut report.output_survival_derivative, fd_xs, s * (1.0 - g));

        let fd_p = central_diff(|t| market.expected_price(t), x, h);
        track(&mut report.price_derivative, fd_p, -s);
    }
    Ok(report)
}

fn track(slot: &mut f64, fd: f64, closed: f64) {
    let err = (fd - closed).abs() / closed.abs().max(1.0);
    if err > *slot {
        *slot = err;
    }
}

fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let xp = x + h;
    let xm = x - h;
    (f(xp) - f(xm)) / (xp - xm)
}

/// Draw quantile-mapped points that keep a full finite-difference stencil
/// away from kinks and support edges.
fn sample_smooth_points(d: &Distribution, seed: u64, want: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinks = d.kinks();
    let mut points = Vec::with_capacity(want);
    for _ in 0..2000 {
        if points.len() >= want {
            break;
        }
        let u = 0.02 + 0.94 * rng.gen::<f64>();
        let x = d.quantile(u);
        let h = fd_step(x);
        let clearance = 4.0 * h;
        if x - 2.0 * h <= d.support_lo() {
            continue;
        }
        if d.support_hi().is_finite() && x + 2.0 * h >= d.support_hi() {
            continue;
        }
        if kinks.iter().any(|&k| (x - k).abs() < clearance) {
            continue;
        }
        points.push(x);
    }
    points
}
