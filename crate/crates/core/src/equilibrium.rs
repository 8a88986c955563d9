//! Symmetric market equilibria of the residual-demand condition and the
//! uniqueness certificates that predict when exactly one exists.
//!
//! With `n` identical firms, marginal cost `c`, and stochastic demand
//! intercept `A`, the symmetric first-order condition in total output `X` is
//! equivalent to a root of
//!
//! ```text
//!     L(X) = m(X) - c / S(X) - X / n
//! ```
//!
//! where `m` is the mean residual demand and `S` the survival function.
//! `L` starts at `E[A] - c > 0` and every equilibrium total output is a
//! positive root; per-firm output is `X / n`.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::quad::integrate;
use crate::reliability::{gfr, hazard, mrd, GridConfig, ShapeClassification, Verdict};
use crate::{Error, Result};

/// Tolerance on the log-price second differences accepted as concave.
pub const SECOND_DIFF_TOL: f64 = 1e-7;

/// Relative floor (against `P(0) - c`) defining where the log-concavity scan
/// stops before the price markup underflows.
const PRICE_FLOOR_REL: f64 = 1e-6;

/// A validated symmetric market: `n` firms, marginal cost `c`, demand `d`.
#[derive(Debug, Clone)]
pub struct MarketConfig {
    demand: Distribution,
    n: u32,
    c: f64,
}

impl MarketConfig {
    /// Requires `n >= 1`, `c >= 0`, and mean demand strictly above cost.
    pub fn new(demand: Distribution, n: u32, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("market needs at least one firm".into()));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "marginal cost must be finite and nonnegative, got {c}"
            )));
        }
        let mean = demand.mean();
        if mean.partial_cmp(&c) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::AssumptionViolated { mean, cost: c });
        }
        Ok(MarketConfig { demand, n, c })
    }

    pub fn demand(&self) -> &Distribution {
        &self.demand
    }

    pub fn firms(&self) -> u32 {
        self.n
    }

    pub fn cost(&self) -> f64 {
        self.c
    }

    /// Expected market price `P(X) = E[(A - X)+]` at total output `X`.
    pub fn expected_price(&self, x_total: f64) -> f64 {
        assert!(x_total >= 0.0, "total output must be nonnegative");
        self.demand.integrated_survival(x_total)
    }

    /// `L(X) = m(X) - c/S(X) - X/n`; sign-equivalent to the first-order
    /// condition residual wherever `S(X) > 0`.
    pub fn l_value(&self, x_total: f64) -> Result<f64> {
        assert!(x_total >= 0.0, "total output must be nonnegative");
        let m = mrd(&self.demand, x_total)?;
        let cost_term = if self.c > 0.0 {
            let s = self.demand.survival(x_total);
            if s <= 0.0 {
                return Err(Error::ZeroSurvival(x_total));
            }
            self.c / s
        } else {
            0.0
        };
        Ok(m - cost_term - x_total / f64::from(self.n))
    }

    /// Closed-form derivative `L'(X) = h(X) L(X) + (g(X) - (n+1)) / n`;
    /// requires a density.
    pub fn l_prime(&self, x_total: f64) -> Result<f64> {
        let h = hazard(&self.demand, x_total)?;
        let g = gfr(&self.demand, x_total)?;
        let l = self.l_value(x_total)?;
        let nf = f64::from(self.n);
        Ok(h * l + (g - (nf + 1.0)) / nf)
    }

    /// First-order-condition residual at total output `X`:
    /// `integral_X^H a f(a) da - c - (n+1) (X/n) S(X)`.
    ///
    /// When a density is available the partial mean is recomputed by direct
    /// quadrature of `a f(a)` (an evaluation route independent of the closed
    /// forms behind `l_value`); otherwise it falls back to the closed identity
    /// `E[A 1{A > X}] = P(X) + X S(X)`.
    pub fn foc_residual(&self, x_total: f64) -> Result<f64> {
        assert!(x_total >= 0.0, "total output must be nonnegative");
        let d = &self.demand;
        let nf = f64::from(self.n);
        let markup_term = (nf + 1.0) * (x_total / nf) * d.survival(x_total);
        let partial_mean = if d.has_density() {
            let hi = d.support_hi();
            // The density vanishes below the support, so start there; and stop
            // strictly short of a finite right endpoint (abscissas within one
            // ulp of it round onto the endpoint, where shape<1 densities blow
            // up and the quadrature would drop the mass). Both truncations are
            // made exact by the closed-form tail term.
            let start = x_total.max(d.support_lo());
            let cut = if hi.is_finite() {
                hi - 1e-12 * hi.abs().max(1.0)
            } else {
                d.quantile(1.0 - 1e-12)
            };
            if start >= cut {
                d.integrated_survival(x_total) + x_total * d.survival(x_total)
            } else {
                let tol = 1e-11 * d.mean().max(1.0);
                // Split at interior kinks so no panel straddles a density jump
                // (mixture component boundaries, support edges).
                let mut cuts: Vec<f64> = vec![start];
                for k in d.kinks() {
                    if k > start && k < cut {
                        cuts.push(k);
                    }
                }
                cuts.push(cut);
                cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
                let mut bulk = 0.0;
                for w in cuts.windows(2) {
                    bulk += integrate(
                        |a| a * d.density(a).expect("density checked above"),
                        w[0],
                        w[1],
                        tol,
                    )?
                    .value;
                }
                // Analytic remainder past the cut point.
                let tail = d.integrated_survival(cut) + cut * d.survival(cut);
                bulk + tail
            }
        } else {
            d.integrated_survival(x_total) + x_total * d.survival(x_total)
        };
        Ok(partial_mean - self.c - markup_term)
    }
}

/// One refined root of `L`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumRoot {
    pub total_output: f64,
    pub per_firm: f64,
    /// Sign-change bracket the root was refined from.
    pub bracket: (f64, f64),
    pub l_residual: f64,
    pub foc_residual: f64,
}

/// All roots of `L` found on the scan range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub roots: Vec<EquilibriumRoot>,
    pub scan_range: (f64, f64),
    /// False when the support is unbounded: the scan stops at the
    /// `hi_quantile` surrogate and tail roots past it would be missed.
    pub complete_scan: bool,
}

impl EquilibriumSet {
    pub fn unique_root(&self) -> Option<&EquilibriumRoot> {
        if self.roots.len() == 1 {
            Some(&self.roots[0])
        } else {
            None
        }
    }
}

/// Scan `L` for sign changes on a quantile-spaced grid over `(0, X_max)` and
/// refine each bracket by bisection in per-firm output.
pub fn find_equilibria(
    market: &MarketConfig,
    cfg: &GridConfig,
    solver_tol: f64,
) -> Result<EquilibriumSet> {
    cfg.validate()?;
    assert!(solver_tol > 0.0, "solver tolerance must be positive");
    let d = market.demand();
    let support_hi = d.support_hi();
    let x_max = if support_hi.is_finite() { support_hi } else { d.quantile(cfg.hi_quantile) };

    let mut xs: Vec<f64> = Vec::with_capacity(cfg.points + cfg.points / 2);
    let denom = (cfg.points - 1) as f64;
    for i in 1..cfg.points {
        let x = d.quantile(cfg.hi_quantile * i as f64 / denom);
        if x > 0.0 && x <= x_max {
            xs.push(x);
        }
    }
    // The quantile grid never lands below the support floor; cover (0, lo]
    // linearly since L can cross there (roots below a strictly positive
    // support floor are perfectly legitimate).
    let support_lo = d.support_lo();
    if support_lo > 0.0 {
        let k = (cfg.points / 4).max(64);
        for j in 1..=k {
            xs.push(support_lo * j as f64 / k as f64);
        }
    }
    // Geometric anchor points near zero pin down the positive sign of L(0+).
    if let Some(&first) = xs.iter().min_by(|a, b| a.total_cmp(b)) {
        for scale in [1e-6, 1e-4, 1e-2] {
            xs.push(first * scale);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
    // L is only defined where survival is positive; a top quantile may snap
    // onto a finite endpoint whose true preimage is unrepresentable.
    xs.retain(|&x| d.survival(x) > 0.0);
    if xs.len() < 2 {
        return Err(Error::EmptyRegion("equilibrium scan grid has fewer than 2 points".into()));
    }

    let vals = xs.iter().map(|&x| market.l_value(x)).collect::<Result<Vec<_>>>()?;

    let mut roots: Vec<EquilibriumRoot> = Vec::new();
    for i in 0..xs.len() {
        if vals[i] == 0.0 {
            roots.push(make_root(market, xs[i], (xs[i], xs[i]))?);
        }
    }
    for i in 0..xs.len() - 1 {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == 0.0 || b == 0.0 {
            continue;
        }
        if (a > 0.0) != (b > 0.0) {
            let x_star = bisect_root(market, xs[i], xs[i + 1], a > 0.0, solver_tol)?;
            roots.push(make_root(market, x_star, (xs[i], xs[i + 1]))?);
        }
    }
    roots.sort_by(|r, s| r.total_output.total_cmp(&s.total_output));
    roots.dedup_by(|r, s| {
        (r.total_output - s.total_output).abs() <= 10.0 * solver_tol * s.total_output.abs().max(1.0)
    });

    Ok(EquilibriumSet {
        roots,
        scan_range: (0.0, x_max),
        complete_scan: support_hi.is_finite(),
    })
}

/// Bisection in per-firm output `t = X/n`, so the stored per-firm value times
/// `n` reproduces the stored total exactly.
fn bisect_root(
    market: &MarketConfig,
    x_lo: f64,
    x_hi: f64,
    lo_positive: bool,
    solver_tol: f64,
) -> Result<f64> {
    let n = f64::from(market.firms());
    let mut lo = x_lo / n;
    let mut hi = x_hi / n;
    for _ in 0..200 {
        if (hi - lo) * n <= solver_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = market.l_value(n * mid)?;
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn make_root(market: &MarketConfig, per_firm_or_total: f64, bracket: (f64, f64)) -> Result<EquilibriumRoot> {
    // `bisect_root` returns per-firm output; exact grid hits arrive as totals.
    let n = f64::from(market.firms());
    let per_firm = if bracket.0 == bracket.1 { per_firm_or_total / n } else { per_firm_or_total };
    let total = per_firm * n;
    Ok(EquilibriumRoot {
        total_output: total,
        per_firm,
        bracket,
        l_residual: market.l_value(total)?.abs(),
        foc_residual: market.foc_residual(total)?.abs(),
    })
}

// ----- uniqueness certificates -----

/// Tri-state outcome of one certificate sub-condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Holds,
    Fails,
    NotAvailable,
}

impl Condition {
    pub fn holds(self) -> bool {
        matches!(self, Condition::Holds)
    }

    fn from_verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Holds => Condition::Holds,
            Verdict::Fails { .. } => Condition::Fails,
            Verdict::NotAvailable => Condition::NotAvailable,
        }
    }
}

/// Sufficient condition built on a bounded density at the origin together
/// with a monotone or bathtub-shaped hazard.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundedDensityCriterion {
    /// Density at the origin, when the support starts there and a density exists.
    pub density_at_origin: Option<f64>,
    /// The bound it must stay below: `1 / (E[A] - c)`.
    pub density_bound: f64,
    /// NotAvailable when the support floor is positive or no density exists.
    pub density_at_zero_ok: Condition,
    pub hazard_monotone_or_bathtub: Condition,
    pub satisfied: bool,
}

/// Sufficient condition: mean residual demand decreasing, or generalized
/// failure rate increasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualMonotoneCriterion {
    pub dmrd: Condition,
    pub igfr: Condition,
    pub satisfied: bool,
}

/// Sufficient condition for costless markets: generalized mean residual
/// demand decreasing plus a finite moment of order `n + 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralizedResidualCriterion {
    pub zero_cost: bool,
    pub dgmrd: Condition,
    pub moment_order: u32,
    pub moment_finite: bool,
    pub satisfied: bool,
}

/// Which sufficient conditions hold, cross-checked against the numeric root
/// count: `consistent = !(certified && root_count != 1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessCertificate {
    pub bounded_density: BoundedDensityCriterion,
    pub residual_monotone: ResidualMonotoneCriterion,
    pub generalized_residual: GeneralizedResidualCriterion,
    pub certified: bool,
    pub numeric_root_count: usize,
    pub consistent: bool,
}

pub fn uniqueness_certificate(
    market: &MarketConfig,
    classification: &ShapeClassification,
    equilibria: &EquilibriumSet,
) -> UniquenessCertificate {
    let d = market.demand();
    let mean = d.mean();
    let density_bound = 1.0 / (mean - market.cost());

    let density_at_origin = if d.support_lo() == 0.0 { d.density(0.0) } else { None };
    let density_at_zero_ok = if d.support_lo() > 0.0 || !d.has_density() {
        Condition::NotAvailable
    } else {
        match density_at_origin {
            Some(f0) if f0 < density_bound => Condition::Holds,
            Some(_) => Condition::Fails,
            None => Condition::NotAvailable,
        }
    };
    let hazard_shape = match (&classification.ifr, &classification.bathtub) {
        (Verdict::NotAvailable, _) | (_, Verdict::NotAvailable) => Condition::NotAvailable,
        (ifr, bathtub) => {
            if ifr.holds() || bathtub.holds() {
                Condition::Holds
            } else {
                Condition::Fails
            }
        }
    };
    let bounded_density = BoundedDensityCriterion {
        density_at_origin,
        density_bound,
        density_at_zero_ok,
        hazard_monotone_or_bathtub: hazard_shape,
        satisfied: density_at_zero_ok.holds() && hazard_shape.holds(),
    };

    let dmrd = Condition::from_verdict(&classification.dmrd);
    let igfr = Condition::from_verdict(&classification.igfr);
    let residual_monotone = ResidualMonotoneCriterion {
        dmrd,
        igfr,
        satisfied: dmrd.holds() || igfr.holds(),
    };

    let moment_order = market.firms() + 1;
    let moment_finite = d.moment(moment_order).is_finite();
    let dgmrd = Condition::from_verdict(&classification.dgmrd);
    let zero_cost = market.cost() == 0.0;
    let generalized_residual = GeneralizedResidualCriterion {
        zero_cost,
        dgmrd,
        moment_order,
        moment_finite,
        satisfied: zero_cost && dgmrd.holds() && moment_finite,
    };

    let certified = bounded_density.satisfied
        || residual_monotone.satisfied
        || generalized_residual.satisfied;
    let numeric_root_count = equilibria.roots.len();
    UniquenessCertificate {
        bounded_density,
        residual_monotone,
        generalized_residual,
        certified,
        numeric_root_count,
        consistent: !(certified && numeric_root_count != 1),
    }
}

// ----- log-concavity of the price markup -----

/// Three consecutive grid points whose second difference breaks concavity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConcavityWitness {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub second_difference: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogConcavityReport {
    pub holds: bool,
    pub witness: Option<ConcavityWitness>,
    /// Region actually sampled: markup stays above a relative floor here.
    pub region: (f64, f64),
    pub points: usize,
    pub tol: f64,
}

/// Check concavity of `log(P(X) - c)` by second differences on a uniform grid
/// over the region where the markup is bounded away from zero.
pub fn log_concavity_check(market: &MarketConfig, cfg: &GridConfig) -> Result<LogConcavityReport> {
    cfg.validate()?;
    let markup0 = market.expected_price(0.0) - market.cost();
    if markup0 <= 0.0 {
        return Err(Error::EmptyRegion("price never exceeds marginal cost".into()));
    }
    let d = market.demand();
    let cap = if d.support_hi().is_finite() { d.support_hi() } else { d.quantile(cfg.hi_quantile) };
    let floor = PRICE_FLOOR_REL * markup0;
    // P - c is continuous and decreasing; bisect for the last X where the
    // markup still clears the floor.
    let hi = if market.expected_price(cap) - market.cost() >= floor {
        cap
    } else {
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if market.expected_price(mid) - market.cost() >= floor {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * cap.max(1.0) {
                break;
            }
        }
        lo
    };
    if hi.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::EmptyRegion("markup region collapsed to a point".into()));
    }

    let points = cfg.points.max(512);
    let xs: Vec<f64> = (0..points).map(|i| hi * i as f64 / (points - 1) as f64).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| (market.expected_price(x) - market.cost()).ln())
        .collect();
    for i in 1..points - 1 {
        let d2 = ys[i + 1] - 2.0 * ys[i] + ys[i - 1];
        if d2 > SECOND_DIFF_TOL {
            return Ok(LogConcavityReport {
                holds: false,
                witness: Some(ConcavityWitness {
                    x1: xs[i - 1],
                    x2: xs[i],
                    x3: xs[i + 1],
                    second_difference: d2,
                }),
                region: (0.0, hi),
                points,
                tol: SECOND_DIFF_TOL,
            });
        }
    }
    Ok(LogConcavityReport { holds: true, witness: None, region: (0.0, hi), points, tol: SECOND_DIFF_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::reliability::classify;
    use approx::assert_abs_diff_eq;

    fn market(d: Distribution, n: u32, c: f64) -> MarketConfig {
        MarketConfig::new(d, n, c).unwrap()
    }

    fn uniform01() -> Distribution {
        Distribution::uniform(0.0, 1.0).unwrap()
    }

    fn solve(m: &MarketConfig) -> EquilibriumSet {
        find_equilibria(m, &GridConfig::default(), 1e-10).unwrap()
    }

    #[test]
    fn market_validation() {
        assert!(MarketConfig::new(uniform01(), 0, 0.0).is_err());
        assert!(MarketConfig::new(uniform01(), 2, -0.1).is_err());
        let err = MarketConfig::new(uniform01(), 2, 0.6).unwrap_err();
        assert!(matches!(err, Error::AssumptionViolated { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn l_value_uniform_fixtures() {
        let m = market(uniform01(), 1, 0.0);
        assert_abs_diff_eq!(m.l_value(1.0 / 3.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.l_value(0.2).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.l_value(0.5).unwrap(), -0.25, epsilon = 1e-15);
        // L(0) = mean - c.
        assert_abs_diff_eq!(m.l_value(0.0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn l_prime_uniform_fixture() {
        // At the monopoly equilibrium X = 1/3: h = 3/2, L = 0, g = 1/2,
        // so L' = (1/2 - 2) / 1 = -3/2.
        let m = market(uniform01(), 1, 0.0);
        assert_abs_diff_eq!(m.l_prime(1.0 / 3.0).unwrap(), -1.5, epsilon = 1e-12);
        let blind = market(uniform01().without_density(), 1, 0.0);
        assert!(matches!(blind.l_prime(0.3), Err(Error::DensityNotAvailable)));
    }

    #[test]
    fn expected_price_values() {
        let m = market(uniform01(), 2, 0.0);
        assert_abs_diff_eq!(m.expected_price(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.expected_price(0.5), 0.125, epsilon = 1e-15);
        assert_eq!(m.expected_price(2.0), 0.0);
    }

    #[test]
    fn uniform_equilibria_match_closed_form() {
        // Closed form: per-firm x* = 1/(n+2) for Uniform[0,1], c = 0.
        for (n, want) in [(1u32, 1.0 / 3.0), (2, 0.25), (3, 0.2), (5, 1.0 / 7.0)] {
            let m = market(uniform01(), n, 0.0);
            let eq = solve(&m);
            assert_eq!(eq.roots.len(), 1, "n={n}");
            let root = &eq.roots[0];
            assert_abs_diff_eq!(root.per_firm, want, epsilon = 1e-9);
            assert_eq!(root.per_firm * f64::from(n), root.total_output);
            assert!(root.l_residual < 1e-8);
            assert!(root.foc_residual < 1e-8);
            assert!(eq.complete_scan);
        }
    }

    #[test]
    fn uniform_positive_cost_equilibrium() {
        // 2X^2 - 3X + 1/2 = 0 on (0,1) gives X* = (3 - sqrt(5)) / 4.
        let m = market(uniform01(), 2, 0.25);
        let eq = solve(&m);
        assert_eq!(eq.roots.len(), 1);
        let want = (3.0 - 5.0f64.sqrt()) / 4.0;
        assert_abs_diff_eq!(eq.roots[0].total_output, want, epsilon = 1e-9);
    }

    #[test]
    fn exponential_monopoly_root() {
        let m = market(Distribution::exponential(1.0).unwrap(), 1, 0.0);
        let eq = solve(&m);
        assert_eq!(eq.roots.len(), 1);
        assert_abs_diff_eq!(eq.roots[0].total_output, 1.0, epsilon = 1e-9);
        assert!(!eq.complete_scan, "unbounded support truncates the scan");
    }

    #[test]
    fn pareto_root_below_support_floor() {
        // For Pareto(xm=1, a=4), n=2, c=0 the root sits below the support
        // floor: L(X) = 4/3 - 3X/2 on [0, 1), zero at X = 8/9.
        let m = market(Distribution::pareto(1.0, 4.0).unwrap(), 2, 0.0);
        let eq = solve(&m);
        assert_eq!(eq.roots.len(), 1);
        assert_abs_diff_eq!(eq.roots[0].total_output, 8.0 / 9.0, epsilon = 1e-9);
        assert_abs_diff_eq!(eq.roots[0].per_firm, 4.0 / 9.0, epsilon = 1e-9);
    }

    #[test]
    fn heavy_tail_costless_market_has_no_root() {
        // l(X) = 2/3 > 1/2 = 1/n on the whole tail, so L never crosses zero.
        let m = market(Distribution::pareto(1.0, 2.5).unwrap(), 2, 0.0);
        let eq = solve(&m);
        assert!(eq.roots.is_empty());
        assert!(!eq.complete_scan);
    }

    #[test]
    fn roots_are_sorted_with_exact_per_firm_split() {
        let m = market(Distribution::gamma(2.0, 1.0).unwrap(), 3, 0.1);
        let eq = solve(&m);
        for w in eq.roots.windows(2) {
            assert!(w[0].total_output < w[1].total_output);
        }
        for r in &eq.roots {
            assert_eq!(r.per_firm * 3.0, r.total_output);
            assert!(r.bracket.0 <= r.total_output && r.total_output <= r.bracket.1);
        }
    }

    #[test]
    fn foc_and_l_agree_in_sign() {
        let m = market(uniform01(), 2, 0.25);
        for x in [0.05, 0.1, 0.15, 0.25, 0.4, 0.6, 0.8] {
            let l = m.l_value(x).unwrap();
            let r = m.foc_residual(x).unwrap();
            assert_eq!(l > 0.0, r > 0.0, "sign mismatch at X={x}: L={l}, residual={r}");
        }
    }

    #[test]
    fn certificate_uniform() {
        let m = market(uniform01(), 2, 0.0);
        let class = classify(m.demand(), &GridConfig::default()).unwrap();
        let eq = solve(&m);
        let cert = uniqueness_certificate(&m, &class, &eq);
        assert_eq!(cert.bounded_density.density_at_origin, Some(1.0));
        assert_abs_diff_eq!(cert.bounded_density.density_bound, 2.0, epsilon = 1e-14);
        assert!(cert.bounded_density.satisfied);
        assert!(cert.residual_monotone.satisfied);
        assert_eq!(cert.residual_monotone.dmrd, Condition::Holds);
        assert!(cert.generalized_residual.satisfied);
        assert_eq!(cert.generalized_residual.moment_order, 3);
        assert!(cert.certified && cert.consistent);
        assert_eq!(cert.numeric_root_count, 1);
    }

    #[test]
    fn certificate_exponential_density_bound_is_tight() {
        // f(0) = 1 and 1/(E[A] - c) = 1: the strict inequality fails while
        // the residual criterion still certifies uniqueness.
        let m = market(Distribution::exponential(1.0).unwrap(), 1, 0.0);
        let class = classify(m.demand(), &GridConfig::default()).unwrap();
        let eq = solve(&m);
        let cert = uniqueness_certificate(&m, &class, &eq);
        assert_eq!(cert.bounded_density.density_at_zero_ok, Condition::Fails);
        assert!(!cert.bounded_density.satisfied);
        assert!(cert.residual_monotone.satisfied);
        assert!(cert.certified && cert.consistent);
    }

    #[test]
    fn certificate_pareto_heavy_tail_flags_inconsistency() {
        let m = market(Distribution::pareto(1.0, 2.5).unwrap(), 2, 0.0);
        let class = classify(m.demand(), &GridConfig::default()).unwrap();
        let eq = solve(&m);
        let cert = uniqueness_certificate(&m, &class, &eq);
        assert_eq!(
            cert.bounded_density.density_at_zero_ok,
            Condition::NotAvailable,
            "support floor is positive"
        );
        assert!(cert.residual_monotone.satisfied, "igfr holds");
        assert!(!cert.generalized_residual.satisfied, "third moment diverges");
        assert!(!cert.generalized_residual.moment_finite);
        assert_eq!(cert.numeric_root_count, 0);
        assert!(cert.certified);
        assert!(!cert.consistent, "certified but no root found: existence fails");
    }

    #[test]
    fn log_concavity_fixtures() {
        let cfg = GridConfig::default();
        let uni = market(uniform01(), 2, 0.0);
        assert!(log_concavity_check(&uni, &cfg).unwrap().holds);

        let expo = market(Distribution::exponential(1.0).unwrap(), 1, 0.0);
        assert!(log_concavity_check(&expo, &cfg).unwrap().holds);

        // Pareto tail: log P(X) = const - 3 log X is convex, so the check
        // fails with a concrete witness.
        let par = market(Distribution::pareto(1.0, 4.0).unwrap(), 2, 0.0);
        let rep = log_concavity_check(&par, &cfg).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.expect("violation witness");
        assert!(w.second_difference > SECOND_DIFF_TOL);
        assert!(w.x1 < w.x2 && w.x2 < w.x3);
    }

    #[test]
    fn scaled_market_root_scales_linearly() {
        for k in [0.5, 2.0, 10.0] {
            let base = market(uniform01(), 2, 0.0);
            let scaled = market(uniform01().scale(k).unwrap(), 2, 0.0);
            let x_base = solve(&base).roots[0].total_output;
            let x_scaled = solve(&scaled).roots[0].total_output;
            assert!(
                (x_scaled - k * x_base).abs() <= 1e-8 * (k * x_base).max(1.0),
                "k={k}: {x_scaled} vs {}",
                k * x_base
            );
        }
    }
}
