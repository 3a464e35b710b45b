//! Finite evidence for analytic conditions.
//!
//! A condition such as "this supremum is finite" or "this sequence tends to
//! zero" cannot be decided from finitely many terms unless the data make it
//! finitely determined. Everything else is classified from a sweep of
//! partial values, and the classification is reported, never promoted to a
//! theorem.

use std::fmt;

use serde::Serialize;

/// Outcome of checking a condition.
///
/// For "bounded" quantities `EvidenceBounded` means the partial values level
/// off; for "tends to zero" quantities it means they decay. In both cases
/// `EvidenceDiverging` is evidence that the condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    HoldsExactly,
    EvidenceBounded,
    EvidenceDiverging,
    Inconclusive,
}

impl Status {
    /// Holds exactly or evidently.
    pub fn is_positive(self) -> bool {
        matches!(self, Status::HoldsExactly | Status::EvidenceBounded)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::HoldsExactly => "holds-exactly",
            Status::EvidenceBounded => "evidence-bounded",
            Status::EvidenceDiverging => "evidence-diverging",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Slope above which a sweep counts as growing.
pub const DIVERGENCE_SLOPE: f64 = 0.05;
/// Relative change over the last quarter below which a sweep has settled.
pub const SETTLED_REL_INCREMENT: f64 = 1e-6;
/// Successive increments shrinking at least this fast count as summable.
pub const GEOMETRIC_DECAY: f64 = 0.9;
/// Increments decaying like `N^-s` with `s` at least this count as summable.
pub const POWER_DECAY: f64 = 1.2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// `(N, value)` pairs the classification was based on.
    pub sweep: Vec<(usize, f64)>,
    /// Fitted `d log(value) / d log(N)` over the last half of the sweep.
    pub log_slope: Option<f64>,
}

impl Verdict {
    pub fn exact(sweep: Vec<(usize, f64)>) -> Self {
        Verdict {
            status: Status::HoldsExactly,
            sweep,
            log_slope: None,
        }
    }

    pub fn with_status(status: Status, sweep: Vec<(usize, f64)>) -> Self {
        Verdict {
            status,
            sweep,
            log_slope: None,
        }
    }

    /// Conjunction: any failure fails, all exact is exact, any
    /// inconclusive part is inconclusive, otherwise evidence of holding.
    pub fn all<'a>(parts: impl IntoIterator<Item = &'a Verdict>) -> Status {
        let statuses: Vec<Status> = parts.into_iter().map(|v| v.status).collect();
        conjunction(&statuses)
    }
}

pub fn conjunction(statuses: &[Status]) -> Status {
    if statuses.contains(&Status::EvidenceDiverging) {
        Status::EvidenceDiverging
    } else if statuses.iter().all(|s| *s == Status::HoldsExactly) {
        Status::HoldsExactly
    } else if statuses.contains(&Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::EvidenceBounded
    }
}

/// Least-squares slope of `ln y` against `ln x` over points with `y > 0`.
pub fn log_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, v)| *n > 0 && *v > 0.0 && v.is_finite())
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    fit_slope(&pts)
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn last_half(sweep: &[(usize, f64)]) -> &[(usize, f64)] {
    &sweep[sweep.len() / 2..]
}

/// Increments between consecutive points shrink geometrically or like a
/// summable power of `N`.
fn increments_summable(sweep: &[(usize, f64)]) -> bool {
    // at least three increments, from the last half when the sweep is long
    let tail = &sweep[sweep.len().saturating_sub((sweep.len() / 2).max(4))..];
    if tail.len() < 4 {
        return false;
    }
    let inc: Vec<(usize, f64)> = tail
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 - w[0].1).abs()))
        .collect();
    if inc.iter().all(|(_, d)| *d == 0.0) {
        return true;
    }
    // the trailing increments are exactly zero: settled
    if inc.last().is_some_and(|(_, d)| *d == 0.0) && inc.iter().rev().take(2).all(|(_, d)| *d == 0.0)
    {
        return true;
    }
    let geometric = inc
        .windows(2)
        .all(|w| w[0].1 > 0.0 && w[1].1 <= GEOMETRIC_DECAY * w[0].1);
    if geometric {
        return true;
    }
    // power-law decay, normalized by the gap between sweep points
    let per_step: Vec<(f64, f64)> = tail
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| {
            let gap = (w[1].0 - w[0].0) as f64;
            let mid = (w[1].0 as f64 * w[0].0 as f64).sqrt();
            (mid.ln(), ((w[1].1 - w[0].1).abs() / gap).ln())
        })
        .filter(|p| p.1.is_finite())
        .collect();
    // d(partial sum)/dN ~ N^-s with s > 1 is summable
    per_step.len() >= 3 && fit_slope(&per_step).is_some_and(|s| s <= -POWER_DECAY)
}

/// Classifies a sweep of nonnegative partial quantities that should stay bounded.
pub fn classify_bounded(sweep: Vec<(usize, f64)>) -> Verdict {
    let slope = log_log_slope(last_half(&sweep));
    let status = bounded_status(&sweep, slope);
    Verdict {
        status,
        sweep,
        log_slope: slope,
    }
}

fn bounded_status(sweep: &[(usize, f64)], slope: Option<f64>) -> Status {
    if sweep.len() < 2 {
        return Status::Inconclusive;
    }
    if sweep.iter().any(|(_, v)| !v.is_finite()) {
        return Status::EvidenceDiverging;
    }
    let last = sweep.last().expect("nonempty").1;
    let quarter = &sweep[(3 * sweep.len()) / 4..];
    let first_q = quarter.first().expect("nonempty").1;
    let scale = last.abs().max(first_q.abs());
    if scale == 0.0 || (last - first_q).abs() <= SETTLED_REL_INCREMENT * scale {
        return Status::EvidenceBounded;
    }
    if increments_summable(sweep) {
        return Status::EvidenceBounded;
    }
    if slope.is_some_and(|s| s > DIVERGENCE_SLOPE) {
        return Status::EvidenceDiverging;
    }
    Status::Inconclusive
}

/// Classifies a sweep of nonnegative quantities that should tend to zero.
pub fn classify_to_zero(sweep: Vec<(usize, f64)>) -> Verdict {
    let slope = log_log_slope(last_half(&sweep));
    let status = to_zero_status(&sweep, slope);
    Verdict {
        status,
        sweep,
        log_slope: slope,
    }
}

fn to_zero_status(sweep: &[(usize, f64)], slope: Option<f64>) -> Status {
    if sweep.len() < 2 {
        return Status::Inconclusive;
    }
    let peak = sweep.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    if !peak.is_finite() {
        return Status::EvidenceDiverging;
    }
    let last = sweep.last().expect("nonempty").1.abs();
    if peak == 0.0 || last <= SETTLED_REL_INCREMENT * peak {
        return Status::EvidenceBounded;
    }
    let half = last_half(sweep);
    if slope.is_some_and(|s| s < -DIVERGENCE_SLOPE) && half.windows(2).all(|w| w[1].1 <= w[0].1) {
        return Status::EvidenceBounded;
    }
    let floor = half.iter().map(|p| p.1.abs()).fold(f64::INFINITY, f64::min);
    if slope.map_or(true, |s| s >= -DIVERGENCE_SLOPE) && floor >= 0.5 * last && floor > 0.0 {
        return Status::EvidenceDiverging;
    }
    Status::Inconclusive
}

/// Doubling sweep `start, 2 start, ...` capped at `max` (always included).
pub fn doubling_sweep(start: usize, max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = start.max(1);
    while n < max {
        out.push(n);
        n *= 2;
    }
    out.push(max);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(f: impl Fn(usize) -> f64, ns: &[usize]) -> Vec<(usize, f64)> {
        ns.iter().map(|&n| (n, f(n))).collect()
    }

    fn harmonic(n: usize) -> f64 {
        (1..=n).map(|k| 1.0 / k as f64).sum()
    }

    #[test]
    fn harmonic_norm_diverges() {
        let ns = doubling_sweep(8, 256);
        let v = classify_bounded(sweep(|n| harmonic(n).sqrt(), &ns));
        assert_eq!(v.status, Status::EvidenceDiverging);
        assert!(v.log_slope.unwrap() > DIVERGENCE_SLOPE);
    }

    #[test]
    fn summable_power_is_bounded() {
        let ns = doubling_sweep(8, 256);
        let s = |n: usize| (1..=n).map(|k| (k as f64).powf(-1.5)).sum::<f64>().cbrt();
        assert_eq!(classify_bounded(sweep(s, &ns)).status, Status::EvidenceBounded);
        let ns: Vec<usize> = (4..=40).collect();
        let s = |n: usize| (1..=n).map(|k| (k as f64).powf(-3.0)).sum::<f64>();
        assert_eq!(classify_bounded(sweep(s, &ns)).status, Status::EvidenceBounded);
    }

    #[test]
    fn geometric_growth_diverges_and_constants_settle() {
        let ns: Vec<usize> = (4..=24).collect();
        let v = classify_bounded(sweep(|n| 1.6f64.powi(n as i32), &ns));
        assert_eq!(v.status, Status::EvidenceDiverging);
        assert_eq!(classify_bounded(sweep(|_| 1.0, &ns)).status, Status::EvidenceBounded);
        assert_eq!(classify_bounded(sweep(|_| 0.0, &ns)).status, Status::EvidenceBounded);
    }

    #[test]
    fn to_zero_classification() {
        let ns: Vec<usize> = (1..=32).collect();
        assert_eq!(
            classify_to_zero(sweep(|n| 1.0 / n as f64, &ns)).status,
            Status::EvidenceBounded
        );
        assert_eq!(classify_to_zero(sweep(|_| 1.0, &ns)).status, Status::EvidenceDiverging);
        assert_eq!(
            classify_to_zero(sweep(|n| if n > 5 { 0.0 } else { 2.0 }, &ns)).status,
            Status::EvidenceBounded
        );
    }

    #[test]
    fn conjunction_rules() {
        use Status::*;
        assert_eq!(conjunction(&[HoldsExactly, HoldsExactly]), HoldsExactly);
        assert_eq!(conjunction(&[HoldsExactly, EvidenceBounded]), EvidenceBounded);
        assert_eq!(conjunction(&[Inconclusive, EvidenceBounded]), Inconclusive);
        assert_eq!(conjunction(&[Inconclusive, EvidenceDiverging]), EvidenceDiverging);
        assert_eq!(conjunction(&[]), HoldsExactly);
    }

    #[test]
    fn sweep_shape() {
        assert_eq!(doubling_sweep(8, 50), [8, 16, 32, 50]);
        assert_eq!(doubling_sweep(8, 8), [8]);
    }
}
