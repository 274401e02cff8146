//! Valency bounds for Borel transforms of `p`-valent functions.
//!
//! For `f` that is `p`-valent on the unit disk and `R >= 1`, coefficient
//! domination with factor `A k^(2p-1)` transfers to the Borel transform with
//! the constant `C = A η / ν`, where
//!
//! * `η = max_{k >= p+1} k^(2p-1) R^k / k!`,
//! * `ν = min{R, R^p / p!}`,
//!
//! and the zero-counting bound `5N + 5 ln(C + 2)` with `N = p` then bounds the
//! valency `q`. `η` is also bounded in closed form by
//! `max{(3p)^(2p-1) R^(3p) / (p+1)!, 3^(2p) R^(2p-1) e^R}`.
//!
//! All quantities are carried as natural logarithms. The base of the
//! logarithm in the zero-counting bound is not fixed by its source; natural
//! log is used throughout and every report says so.

use serde::Serialize;

use crate::special::ln_factorial;
use crate::{Error, Result};

/// Attached to every bound report.
pub const LOG_BASE_NOTE: &str = "log in 5N + 5 log(C + 2) is taken as the natural logarithm";

/// Attached to every valency-bound report.
pub const RADIUS_NOTE: &str =
    "the zero-counting bound only applies on disks of radius below R/4; valid_radius reports R/4";

const DESCENT_STEPS: u32 = 32;
const DESCENT_NATS: f64 = 50.0;
const SCAN_FLOOR: u64 = 2000;
/// Terms within this many nats of the running maximum count as ties.
const TIE_NATS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaScan {
    pub log_eta: f64,
    pub argmax_k: u64,
}

/// `ln(k^(2p-1) R^k / k!)`.
fn ln_eta_term(p: u64, ln_r: f64, k: u64) -> f64 {
    (2 * p - 1) as f64 * (k as f64).ln() + k as f64 * ln_r - ln_factorial(k)
}

fn check_p_r(p: u64, radius: f64) -> Result<()> {
    if p < 1 {
        return Err(Error::invalid("p must be at least 1"));
    }
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("R must be finite and at least 1, got {radius}")));
    }
    Ok(())
}

/// Maximizes `k^(2p-1) R^k / k!` over `k >= p + 1` by forward scan.
///
/// The scan stops once the term has decreased for 32 consecutive steps and
/// sits 50 nats below the running maximum. It gives up at
/// `k = max(3p, 20 ceil(R), 2000)`.
pub fn eta_scan(p: u64, radius: f64) -> Result<EtaScan> {
    check_p_r(p, radius)?;
    let ln_r = radius.ln();
    let cap = (3 * p).max(20 * radius.ceil() as u64).max(SCAN_FLOOR);
    let mut best = EtaScan { log_eta: ln_eta_term(p, ln_r, p + 1), argmax_k: p + 1 };
    let mut prev = best.log_eta;
    let mut falling = 0u32;
    for k in p + 2..=cap {
        let term = ln_eta_term(p, ln_r, k);
        if term > best.log_eta + TIE_NATS {
            best = EtaScan { log_eta: term, argmax_k: k };
        }
        falling = if term < prev { falling + 1 } else { 0 };
        prev = term;
        if falling >= DESCENT_STEPS && term < best.log_eta - DESCENT_NATS {
            return Ok(best);
        }
    }
    Err(Error::ScanNotConverged { cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaClosedBounds {
    /// `ln((3p)^(2p-1) R^(3p) / (p+1)!)`
    pub log_eta1: f64,
    /// `ln(3^(2p) R^(2p-1) e^R)`
    pub log_eta2: f64,
}

impl EtaClosedBounds {
    pub fn log_max(&self) -> f64 {
        self.log_eta1.max(self.log_eta2)
    }
}

pub fn eta_closed_bounds(p: u64, radius: f64) -> Result<EtaClosedBounds> {
    check_p_r(p, radius)?;
    let (pf, ln_r) = (p as f64, radius.ln());
    let log_eta1 = (2.0 * pf - 1.0) * (3.0 * pf).ln() + 3.0 * pf * ln_r - ln_factorial(p + 1);
    let log_eta2 = 2.0 * pf * 3f64.ln() + (2.0 * pf - 1.0) * ln_r + radius;
    Ok(EtaClosedBounds { log_eta1, log_eta2 })
}

/// `ln(min{R, R^p / p!})`.
pub fn nu(p: u64, radius: f64) -> Result<f64> {
    check_p_r(p, radius)?;
    let ln_r = radius.ln();
    Ok(ln_r.min(p as f64 * ln_r - ln_factorial(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroBound {
    pub bound: f64,
    /// The bound holds on disks of radius strictly below this fraction of R.
    pub radius_fraction: f64,
}

/// `5N + 5 ln(C + 2)`: at most this many zeros in `D_{R'}` for `R' < R/4`
/// when `f` has `(N, R, C)` domination.
pub fn ry_zero_bound(n: u64, c: f64) -> Result<ZeroBound> {
    if c.is_nan() || c < 0.0 {
        return Err(Error::invalid(format!("domination constant must be nonnegative, got {c}")));
    }
    Ok(ZeroBound { bound: 5.0 * n as f64 + 5.0 * (c + 2.0).ln(), radius_fraction: 0.25 })
}

/// `ln(exp(x) + 2)` without overflow.
fn ln_exp_plus_two(x: f64) -> f64 {
    if x > 0.0 {
        x + (2.0 * (-x).exp()).ln_1p()
    } else {
        (x.exp() + 2.0).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub p: u64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub log_eta: f64,
    pub eta_argmax_k: u64,
    pub log_eta1_bound: f64,
    pub log_eta2_bound: f64,
    pub log_nu: f64,
    #[serde(rename = "log_C")]
    pub log_c: f64,
    pub q: f64,
    pub valid_radius: f64,
}

impl BoundReport {
    /// `p (1 + ln p + ln R) + R`, the shape the bound grows like.
    pub fn envelope(&self) -> f64 {
        let p = self.p as f64;
        p * (1.0 + p.ln() + self.radius.ln()) + self.radius
    }
}

/// The valency bound `q <= 5p + 5 ln(A η / ν + 2)` with its intermediates.
pub fn q_bound(p: u64, radius: f64, a: f64) -> Result<BoundReport> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("A must be positive, got {a}")));
    }
    let scan = eta_scan(p, radius)?;
    let closed = eta_closed_bounds(p, radius)?;
    let log_nu = nu(p, radius)?;
    let log_c = a.ln() + scan.log_eta - log_nu;
    let q = 5.0 * p as f64 + 5.0 * ln_exp_plus_two(log_c);
    Ok(BoundReport {
        p,
        radius,
        a,
        log_eta: scan.log_eta,
        eta_argmax_k: scan.argmax_k,
        log_eta1_bound: closed.log_eta1,
        log_eta2_bound: closed.log_eta2,
        log_nu,
        log_c,
        q,
        valid_radius: radius / 4.0,
    })
}
