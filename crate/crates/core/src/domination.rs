//! Taylor domination on truncated series.
//!
//! A series has an `(N, R, S(k))` domination property when
//! `|a_k| R^k <= S(k) max_i |a_i| R^i` for every `k >= N + 1`, the maximum
//! running over `0 <= i <= N` (or `1 <= i <= N` when the constant term is
//! excluded). Everything here is evaluated on a finite window `N+1..=k_max`
//! and in log-magnitude space.

use serde::Serialize;

use crate::series::PowerSeries;
use crate::{Error, Result};

/// The comparison sequence `S(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `S(k) = C`.
    Constant { c: f64 },
    /// `S(k) = A k^m`.
    Power { a: f64, m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationProfile {
    pub n: usize,
    pub radius: f64,
    pub shape: Shape,
    pub include_constant_term: bool,
}

impl DominationProfile {
    pub fn new(n: usize, radius: f64, shape: Shape, include_constant_term: bool) -> Result<Self> {
        if !include_constant_term && n == 0 {
            return Err(Error::invalid("N must be at least 1 when a_0 is excluded"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("R must be positive, got {radius}")));
        }
        let bad = match shape {
            Shape::Constant { c } => c.is_nan() || c < 0.0,
            Shape::Power { a, m } => !(a >= 0.0 && m >= 0.0),
        };
        if bad {
            return Err(Error::invalid("domination shape parameters must be nonnegative"));
        }
        Ok(Self { n, radius, shape, include_constant_term })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationReport {
    pub holds: bool,
    pub worst_k: usize,
    pub worst_ratio: f64,
    pub k_range: (usize, usize),
}

/// Log-magnitudes `ln|a_k| + k ln R - m ln k - head` on `N+1..=k_max`.
fn log_ratios(
    f: &PowerSeries,
    n: usize,
    radius: f64,
    m: f64,
    k_max: usize,
    include_constant_term: bool,
) -> Result<Vec<(usize, f64)>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("R must be positive, got {radius}")));
    }
    if k_max > f.order() {
        return Err(Error::invalid(format!(
            "k_max = {k_max} exceeds the series order {}",
            f.order()
        )));
    }
    if n >= k_max {
        return Err(Error::invalid(format!("N = {n} must be below k_max = {k_max}")));
    }
    if !include_constant_term && n == 0 {
        return Err(Error::invalid("N must be at least 1 when a_0 is excluded"));
    }
    let ln_r = radius.ln();
    let weighted = |k: usize| f.coeff(k).ln_abs() + k as f64 * ln_r;
    let lo = if include_constant_term { 0 } else { 1 };
    let head = (lo..=n).map(weighted).fold(f64::NEG_INFINITY, f64::max);
    if head == f64::NEG_INFINITY {
        return Err(Error::DegenerateHead);
    }
    Ok((n + 1..=k_max)
        .map(|k| (k, weighted(k) - m * (k as f64).ln() - head))
        .collect())
}

/// Largest value in input order; ties keep the first index.
fn worst(ratios: &[(usize, f64)]) -> (usize, f64) {
    ratios
        .iter()
        .copied()
        .fold((ratios[0].0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Smallest `C` with `|a_k| R^k <= C max_i |a_i| R^i` for `N < k <= k_max`.
pub fn minimal_constant(
    f: &PowerSeries,
    n: usize,
    radius: f64,
    k_max: usize,
    include_constant_term: bool,
) -> Result<f64> {
    minimal_power_factor(f, n, radius, 0.0, k_max, include_constant_term)
}

/// Smallest `A` with `|a_k| R^k <= A k^m max_i |a_i| R^i` for `N < k <= k_max`.
pub fn minimal_power_factor(
    f: &PowerSeries,
    n: usize,
    radius: f64,
    m: f64,
    k_max: usize,
    include_constant_term: bool,
) -> Result<f64> {
    if m.is_nan() || m < 0.0 {
        return Err(Error::invalid(format!("exponent m must be nonnegative, got {m}")));
    }
    let ratios = log_ratios(f, n, radius, m, k_max, include_constant_term)?;
    Ok(worst(&ratios).1.exp())
}

/// Evaluates the domination inequality at every `k` in `N+1..=k_max`.
pub fn check_domination(
    f: &PowerSeries,
    profile: &DominationProfile,
    k_max: usize,
) -> Result<DominationReport> {
    let (factor, m) = match profile.shape {
        Shape::Constant { c } => (c, 0.0),
        Shape::Power { a, m } => (a, m),
    };
    let ratios = log_ratios(f, profile.n, profile.radius, m, k_max, profile.include_constant_term)?;
    // divide in linear space so that the fitted minimal factor gives exactly 1
    let linear: Vec<(usize, f64)> = ratios
        .iter()
        .map(|&(k, lr)| {
            let num = lr.exp();
            let r = if num == 0.0 { 0.0 } else { num / factor };
            (k, r)
        })
        .collect();
    let (worst_k, worst_ratio) = worst(&linear);
    Ok(DominationReport {
        holds: worst_ratio <= 1.0,
        worst_k,
        worst_ratio,
        k_range: (profile.n + 1, k_max),
    })
}
