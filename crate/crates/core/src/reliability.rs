//! Reliability transforms of a demand distribution and their shape classes.
//!
//! The classifier evaluates the hazard rate `h = f / S`, generalized failure
//! rate `g(x) = x h(x)`, mean residual demand `m(x) = E[(X - x)+] / S(x)`, and
//! its generalized form `l(x) = m(x) / x` on a quantile-spaced grid, then
//! scans for monotonicity with a relative slack tolerance. Verdicts that
//! violate the known implications (IFR => IGFR, IFR => DMRD, IGFR => DGMRD,
//! DMRD => DGMRD) abort with an error rather than ship a contradiction.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::{Error, Result};

/// Grid used for monotonicity scans and CSV dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    /// Number of quantile-spaced points (minimum 256).
    #[serde(default = "default_points")]
    pub points: usize,
    /// Upper quantile at which unbounded supports are truncated.
    #[serde(default = "default_hi_quantile")]
    pub hi_quantile: f64,
    /// Relative slack when comparing consecutive grid values.
    #[serde(default = "default_mono_tol")]
    pub mono_tol: f64,
}

fn default_points() -> usize {
    512
}

fn default_hi_quantile() -> f64 {
    1.0 - 1e-9
}

fn default_mono_tol() -> f64 {
    1e-9
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points: default_points(),
            hi_quantile: default_hi_quantile(),
            mono_tol: default_mono_tol(),
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 256 {
            return Err(Error::InvalidParameters(format!(
                "grid needs at least 256 points, got {}",
                self.points
            )));
        }
        if !(self.hi_quantile > 0.0 && self.hi_quantile < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "hi_quantile must lie in (0, 1), got {}",
                self.hi_quantile
            )));
        }
        if !(self.mono_tol >= 0.0 && self.mono_tol.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "mono_tol must be a nonnegative finite number, got {}",
                self.mono_tol
            )));
        }
        Ok(())
    }
}

// ----- pointwise transforms -----

/// Hazard rate `f(x) / S(x)`. Zero inside support gaps; errors past the
/// support or when the distribution carries no density.
pub fn hazard(d: &Distribution, x: f64) -> Result<f64> {
    let f = d.density(x).ok_or(Error::DensityNotAvailable)?;
    let s = d.survival(x);
    if s <= 0.0 {
        return Err(Error::ZeroSurvival(x));
    }
    Ok(f / s)
}

/// Generalized failure rate `x h(x)`, with `g(0) = 0` by continuity.
pub fn gfr(d: &Distribution, x: f64) -> Result<f64> {
    if x == 0.0 {
        // x f(x) -> 0 for every admissible family, even when f blows up at 0.
        d.density(x).ok_or(Error::DensityNotAvailable)?;
        return Ok(0.0);
    }
    Ok(x * hazard(d, x)?)
}

/// Mean residual demand `E[(X - x)+] / S(x)`; zero beyond the support.
pub fn mrd(d: &Distribution, x: f64) -> Result<f64> {
    debug_assert!(x >= 0.0, "mean residual demand is defined for x >= 0");
    if x >= d.support_hi() {
        return Ok(0.0);
    }
    let s = d.survival(x);
    if s <= 0.0 {
        return Err(Error::ZeroSurvival(x));
    }
    Ok(d.integrated_survival(x) / s)
}

/// Generalized mean residual demand `m(x) / x` for strictly positive `x`.
pub fn gmrd(d: &Distribution, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::NonPositivePoint(x));
    }
    Ok(mrd(d, x)? / x)
}

// ----- verdicts -----

/// Two adjacent grid points demonstrating a monotonicity violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x1: f64,
    pub x2: f64,
    pub f_x1: f64,
    pub f_x2: f64,
}

/// Outcome of one shape-class scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { witness: Witness },
    /// The scan needs a density the distribution does not provide.
    NotAvailable,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }
}

/// Shape-class verdicts over the scanned grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeClassification {
    /// Hazard rate non-decreasing (increasing failure rate).
    pub ifr: Verdict,
    /// Generalized failure rate non-decreasing.
    pub igfr: Verdict,
    /// Mean residual demand non-increasing.
    pub dmrd: Verdict,
    /// Generalized mean residual demand non-increasing.
    pub dgmrd: Verdict,
    /// Hazard falls (weakly) then rises (weakly), with at least one strict move.
    pub bathtub: Verdict,
    pub grid_points: usize,
    pub scan_lo: f64,
    pub scan_hi: f64,
    /// True when the support is unbounded and the scan stops at `hi_quantile`.
    pub truncated_scan: bool,
}

/// Quantile-spaced scan grid, augmented with points inside support gaps so
/// zero-density plateaus are actually sampled.
pub fn classification_grid(d: &Distribution, cfg: &GridConfig) -> Vec<f64> {
    let n = cfg.points;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| d.quantile(cfg.hi_quantile * i as f64 / (n - 1) as f64))
        .collect();
    for (lo, hi) in d.support_gaps() {
        let width = hi - lo;
        for k in 1..=3 {
            xs.push(lo + width * k as f64 / 4.0);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
    // The transforms are defined where survival is positive; a top quantile
    // may snap onto a finite endpoint (unrepresentable true quantile), so
    // drop any point at or past the survival boundary.
    xs.retain(|&x| d.survival(x) > 0.0);
    xs
}

/// Classify the distribution's shape on the scan grid.
pub fn classify(d: &Distribution, cfg: &GridConfig) -> Result<ShapeClassification> {
    cfg.validate()?;
    let xs = classification_grid(d, cfg);
    if xs.len() < 2 {
        return Err(Error::EmptyRegion("classification grid has fewer than 2 points".into()));
    }

    let m_vals = xs.iter().map(|&x| mrd(d, x)).collect::<Result<Vec<_>>>()?;
    let dmrd_v = scan_monotone(&xs, &m_vals, cfg.mono_tol, false);

    let positive: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] > 0.0).collect();
    let l_xs: Vec<f64> = positive.iter().map(|&i| xs[i]).collect();
    let l_vals: Vec<f64> = positive.iter().map(|&i| m_vals[i] / xs[i]).collect();
    let dgmrd_v = scan_monotone(&l_xs, &l_vals, cfg.mono_tol, false);

    let (ifr_v, igfr_v, bathtub_v) = if d.has_density() {
        let h_vals = xs.iter().map(|&x| hazard(d, x)).collect::<Result<Vec<_>>>()?;
        let g_vals: Vec<f64> = xs
            .iter()
            .zip(&h_vals)
            .map(|(&x, &h)| if x == 0.0 { 0.0 } else { x * h })
            .collect();
        (
            scan_monotone(&xs, &h_vals, cfg.mono_tol, true),
            scan_monotone(&xs, &g_vals, cfg.mono_tol, true),
            scan_bathtub(&xs, &h_vals, cfg.mono_tol),
        )
    } else {
        (Verdict::NotAvailable, Verdict::NotAvailable, Verdict::NotAvailable)
    };

    let report = ShapeClassification {
        ifr: ifr_v,
        igfr: igfr_v,
        dmrd: dmrd_v,
        dgmrd: dgmrd_v,
        bathtub: bathtub_v,
        grid_points: xs.len(),
        scan_lo: xs[0],
        scan_hi: *xs.last().expect("non-empty grid"),
        truncated_scan: !d.support_hi().is_finite(),
    };
    check_implications(&report)?;
    Ok(report)
}

fn check_implications(r: &ShapeClassification) -> Result<()> {
    let rules: [(&str, &Verdict, &str, &Verdict); 4] = [
        ("ifr", &r.ifr, "igfr", &r.igfr),
        ("ifr", &r.ifr, "dmrd", &r.dmrd),
        ("igfr", &r.igfr, "dgmrd", &r.dgmrd),
        ("dmrd", &r.dmrd, "dgmrd", &r.dgmrd),
    ];
    for (pname, premise, cname, conclusion) in rules {
        if premise.holds() && conclusion.fails() {
            return Err(Error::InconsistentVerdict(format!(
                "{pname} holds but {cname} fails on the same grid"
            )));
        }
    }
    Ok(())
}

/// True when the move from `a` to `b` breaks the required direction by more
/// than the relative slack. Infinite moves in the wrong direction always count.
fn violates(a: f64, b: f64, tol: f64, non_decreasing: bool) -> bool {
    if a.is_nan() || b.is_nan() {
        return true;
    }
    let (prev, next) = if non_decreasing { (a, b) } else { (b, a) };
    if next >= prev {
        return false;
    }
    if !prev.is_finite() || !next.is_finite() {
        return true;
    }
    prev - next > tol * prev.abs().max(next.abs()).max(1.0)
}

fn scan_monotone(xs: &[f64], vals: &[f64], tol: f64, non_decreasing: bool) -> Verdict {
    let mut fallback: Option<Witness> = None;
    for i in 0..vals.len() - 1 {
        if violates(vals[i], vals[i + 1], tol, non_decreasing) {
            let w = Witness { x1: xs[i], x2: xs[i + 1], f_x1: vals[i], f_x2: vals[i + 1] };
            if w.f_x1.is_finite() && w.f_x2.is_finite() {
                return Verdict::Fails { witness: w };
            }
            fallback.get_or_insert(w);
        }
    }
    match fallback {
        Some(w) => Verdict::Fails { witness: w },
        None => Verdict::Holds,
    }
}

/// Bathtub scan: the sequence may fall, then rise, with at least one strict
/// move; monotone non-constant sequences qualify, constants do not.
fn scan_bathtub(xs: &[f64], vals: &[f64], tol: f64) -> Verdict {
    let mut seen_rise = false;
    let mut any_strict = false;
    for i in 0..vals.len() - 1 {
        let (a, b) = (vals[i], vals[i + 1]);
        if a.is_nan() || b.is_nan() {
            return Verdict::Fails {
                witness: Witness { x1: xs[i], x2: xs[i + 1], f_x1: a, f_x2: b },
            };
        }
        let slack = if a.is_finite() && b.is_finite() {
            tol * a.abs().max(b.abs()).max(1.0)
        } else {
            0.0
        };
        if b > a + slack {
            seen_rise = true;
            any_strict = true;
        } else if b < a - slack {
            any_strict = true;
            if seen_rise {
                return Verdict::Fails {
                    witness: Witness { x1: xs[i], x2: xs[i + 1], f_x1: a, f_x2: b },
                };
            }
        }
    }
    if any_strict {
        Verdict::Holds
    } else {
        // Constant hazard: no strict move anywhere; report the first pair.
        Verdict::Fails {
            witness: Witness { x1: xs[0], x2: xs[1], f_x1: vals[0], f_x2: vals[1] },
        }
    }
}

// ----- grid dump -----

/// One row of the diagnostic grid dump.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub survival: f64,
    pub density: Option<f64>,
    pub hazard: Option<f64>,
    pub gfr: Option<f64>,
    pub mrd: f64,
    pub gmrd: Option<f64>,
}

pub fn grid_rows(d: &Distribution, cfg: &GridConfig) -> Result<Vec<GridRow>> {
    cfg.validate()?;
    let xs = classification_grid(d, cfg);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let survival = d.survival(x);
        let density = d.density(x);
        let hazard_v = match density {
            Some(_) => Some(hazard(d, x)?),
            None => None,
        };
        let gfr_v = match density {
            Some(_) => Some(gfr(d, x)?),
            None => None,
        };
        let mrd_v = mrd(d, x)?;
        let gmrd_v = if x > 0.0 { Some(mrd_v / x) } else { None };
        rows.push(GridRow { x, survival, density, hazard: hazard_v, gfr: gfr_v, mrd: mrd_v, gmrd: gmrd_v });
    }
    Ok(rows)
}

/// CSV rendering of the grid, one row per scan point. Fields that are not
/// defined (no density, or `l` at `x = 0`) are left empty.
pub fn grid_csv(d: &Distribution, cfg: &GridConfig) -> Result<String> {
    let rows = grid_rows(d, cfg)?;
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str("x,survival,density,hazard,gfr,mrd,gmrd\n");
    let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.x,
            r.survival,
            fmt(r.density),
            fmt(r.hazard),
            fmt(r.gfr),
            r.mrd,
            fmt(r.gmrd)
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridConfig {
        GridConfig::default()
    }

    fn gap_mixture() -> Distribution {
        Distribution::mixture(
            vec![
                Distribution::uniform(0.0, 1.0).unwrap(),
                Distribution::uniform(1.05, 1.15).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn pointwise_values_uniform() {
        let d = Distribution::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(hazard(&d, 0.5).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gfr(&d, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mrd(&d, 0.5).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(gmrd(&d, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(mrd(&d, 2.0).unwrap(), 0.0, "mean residual vanishes past the support");
        assert!(matches!(gmrd(&d, 0.0), Err(Error::NonPositivePoint(_))));
    }

    #[test]
    fn pointwise_values_pareto() {
        let d = Distribution::pareto(1.0, 4.0).unwrap();
        assert_abs_diff_eq!(hazard(&d, 2.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gfr(&d, 2.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mrd(&d, 2.0).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gmrd(&d, 2.0).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        // Below the support floor the hazard vanishes and residual demand
        // decreases one-for-one.
        assert_eq!(hazard(&d, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(mrd(&d, 0.5).unwrap(), 5.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn exponential_memoryless() {
        let d = Distribution::exponential(2.0).unwrap();
        for x in [0.0, 0.3, 1.7, 5.0] {
            assert_abs_diff_eq!(hazard(&d, x).unwrap(), 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(mrd(&d, x).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn hazard_without_density_is_unavailable() {
        let d = Distribution::uniform(0.0, 1.0).unwrap().without_density();
        assert!(matches!(hazard(&d, 0.5), Err(Error::DensityNotAvailable)));
        assert!(mrd(&d, 0.5).is_ok());
    }

    #[test]
    fn classify_uniform_all_hold() {
        let d = Distribution::uniform(0.0, 1.0).unwrap();
        let r = classify(&d, &grid()).unwrap();
        assert!(r.ifr.holds() && r.igfr.holds() && r.dmrd.holds() && r.dgmrd.holds());
        assert!(r.bathtub.holds(), "monotone increasing hazard counts as bathtub");
        assert!(!r.truncated_scan);
        assert_eq!(r.scan_lo, 0.0);
    }

    #[test]
    fn classify_exponential_constant_hazard() {
        let d = Distribution::exponential(1.0).unwrap();
        let r = classify(&d, &grid()).unwrap();
        assert!(r.ifr.holds());
        assert!(r.igfr.holds());
        assert!(r.dmrd.holds());
        assert!(r.dgmrd.holds());
        assert!(r.bathtub.fails(), "constant hazard has no strict move");
        assert!(r.truncated_scan);
    }

    #[test]
    fn classify_pareto_igfr_not_dmrd() {
        let d = Distribution::pareto(1.0, 4.0).unwrap();
        let r = classify(&d, &grid()).unwrap();
        assert!(r.ifr.fails(), "pareto hazard decreases");
        assert!(r.igfr.holds(), "pareto generalized failure rate is constant");
        assert!(r.dmrd.fails(), "pareto mean residual demand grows linearly");
        assert!(r.dgmrd.holds());
        assert!(r.bathtub.holds(), "monotone decreasing hazard counts as bathtub");
        if let Verdict::Fails { witness } = &r.ifr {
            assert!(witness.x1 < witness.x2);
            assert!(witness.f_x1 > witness.f_x2);
            assert!(witness.f_x1.is_finite() && witness.f_x2.is_finite());
        }
    }

    #[test]
    fn classify_beta_half_is_bathtub() {
        let d = Distribution::beta(0.5, 0.5).unwrap();
        let r = classify(&d, &grid()).unwrap();
        assert!(r.ifr.fails());
        assert!(r.igfr.holds());
        assert!(r.dmrd.fails(), "residual demand rises where the hazard is infinite");
        assert!(r.dgmrd.holds());
        assert!(r.bathtub.holds());
    }

    #[test]
    fn classify_gap_mixture_dmrd_not_igfr() {
        let d = gap_mixture();
        let r = classify(&d, &grid()).unwrap();
        assert!(r.dmrd.holds(), "residual demand decreases through the gap");
        assert!(r.igfr.fails(), "failure rate drops to zero inside the gap");
        assert!(r.ifr.fails());
        assert!(r.dgmrd.holds());
        if let Verdict::Fails { witness } = &r.igfr {
            assert!(
                witness.x2 > 1.0 && witness.x1 < 1.15,
                "witness should straddle the gap region, got {witness:?}"
            );
        }
    }

    #[test]
    fn classify_scaled_matches_base() {
        let base = Distribution::beta(2.0, 2.0).unwrap();
        let scaled = base.scale(2.0).unwrap();
        let rb = classify(&base, &grid()).unwrap();
        let rs = classify(&scaled, &grid()).unwrap();
        assert_eq!(rb.ifr.holds(), rs.ifr.holds());
        assert_eq!(rb.igfr.holds(), rs.igfr.holds());
        assert_eq!(rb.dmrd.holds(), rs.dmrd.holds());
        assert_eq!(rb.dgmrd.holds(), rs.dgmrd.holds());
        assert_eq!(rb.bathtub.holds(), rs.bathtub.holds());
        assert!(rb.ifr.holds(), "beta(2,2) has an increasing hazard");
    }

    #[test]
    fn classify_without_density_degrades() {
        let d = Distribution::uniform(0.0, 1.0).unwrap().without_density();
        let r = classify(&d, &grid()).unwrap();
        assert_eq!(r.ifr, Verdict::NotAvailable);
        assert_eq!(r.igfr, Verdict::NotAvailable);
        assert_eq!(r.bathtub, Verdict::NotAvailable);
        assert!(r.dmrd.holds());
        assert!(r.dgmrd.holds());
    }

    #[test]
    fn grid_includes_gap_interiors() {
        let d = gap_mixture();
        let xs = classification_grid(&d, &grid());
        assert!(xs.iter().any(|&x| x > 1.01 && x < 1.04), "gap interior must be sampled");
        assert!(xs.windows(2).all(|w| w[0] < w[1]), "grid strictly increasing");
    }

    #[test]
    fn grid_csv_shape() {
        let d = Distribution::uniform(0.0, 1.0).unwrap();
        let cfg = grid();
        let csv = grid_csv(&d, &cfg).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,survival,density,hazard,gfr,mrd,gmrd");
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "0");
        assert_eq!(fields[6], "", "l is undefined at x = 0");

        let blind = grid_csv(&d.without_density(), &cfg).unwrap();
        let row = blind.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[2], "");
        assert_eq!(fields[3], "");
        assert_eq!(fields[4], "");
    }

    #[test]
    fn scan_helpers_edge_cases() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        // Tolerated jitter is not a violation.
        let vals = [1.0, 1.0 - 1e-12, 1.0, 1.0 + 1e-12];
        assert!(scan_monotone(&xs, &vals, 1e-9, true).holds());
        // A genuine drop is.
        let vals = [1.0, 0.9, 1.0, 1.1];
        assert!(scan_monotone(&xs, &vals, 1e-9, true).fails());
        // Infinite drop counts even though slack math would produce inf.
        let vals = [f64::INFINITY, 1.0, 2.0, 3.0];
        assert!(scan_monotone(&xs, &vals, 1e-9, true).fails());
        // Bathtub: down then up is fine, up then down is not.
        assert!(scan_bathtub(&xs, &[3.0, 1.0, 2.0, 4.0], 1e-9).holds());
        assert!(scan_bathtub(&xs, &[1.0, 2.0, 1.5, 3.0], 1e-9).fails());
        assert!(scan_bathtub(&xs, &[1.0, 1.0, 1.0, 1.0], 1e-9).fails());
    }
}
