//! Self-check suites behind `tdom verify`.
//!
//! Every check is deterministic for a given seed; the output never contains
//! timings, so two runs with the same seed produce identical reports.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::borel::{borel, inverse_borel_integral, QuadratureSpec};
use crate::bounds::{eta_closed_bounds, eta_scan, nu, q_bound, ry_zero_bound};
use crate::domination::{minimal_constant, minimal_power_factor};
use crate::examples::{analytic_solutions, build, exponential, ExampleId, ExampleName};
use crate::parallel::{self, Execution};
use crate::scaled::ScaledComplex;
use crate::series::PowerSeries;
use crate::special::ln_factorial;
use crate::valency::{count_zeros, valency_lower_bound, ContourSpec};
use crate::{Error, Result};

pub const P_GRID: std::ops::RangeInclusive<u64> = 1..=30;
pub const R_GRID: [f64; 7] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Bounds,
    Domination,
    Valency,
    Borel,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Bounds => "bounds",
            Suite::Domination => "domination",
            Suite::Valency => "valency",
            Suite::Borel => "borel",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Suite::All, Suite::Bounds, Suite::Domination, Suite::Valency, Suite::Borel]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite '{s}'")))
    }
}

/// One line of a verification report. `passed` compares `measured` against
/// `threshold` in the direction stated by `detail`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

fn check(suite: &'static str, name: impl Into<String>, measured: f64, threshold: f64, detail: impl Into<String>) -> Check {
    Check { suite, name: name.into(), passed: measured <= threshold, measured, threshold, detail: detail.into() }
}

fn failed(suite: &'static str, name: impl Into<String>, err: Error) -> Check {
    Check {
        suite,
        name: name.into(),
        passed: false,
        measured: f64::NAN,
        threshold: f64::NAN,
        detail: format!("error: {err}"),
    }
}

/// Independent generator per work item, so parallel and sequential runs agree.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Point uniformly distributed in the disk of the given radius.
pub fn uniform_in_disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

/// Roots uniform in `D_2`, none within 0.05 of the unit circle, degree 1..=12.
pub fn random_roots_off_unit_circle(rng: &mut impl Rng) -> Vec<Complex64> {
    let degree = rng.random_range(1..=12);
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let z = uniform_in_disk(rng, 2.0);
        if (z.norm() - 1.0).abs() > 0.05 {
            roots.push(z);
        }
    }
    roots
}

pub fn run(suite: Suite, seed: u64, exec: Execution) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Bounds) {
        out.extend(bounds_suite(seed, exec));
    }
    if matches!(suite, Suite::All | Suite::Domination) {
        out.extend(domination_suite(seed, exec));
    }
    if matches!(suite, Suite::All | Suite::Valency) {
        out.extend(valency_suite(seed, exec));
    }
    if matches!(suite, Suite::All | Suite::Borel) {
        out.extend(borel_suite());
    }
    out
}

fn bounds_suite(seed: u64, exec: Execution) -> Vec<Check> {
    const S: &str = "bounds";
    let mut out = Vec::new();
    match q_bound(1, 1.0, 1.0) {
        Ok(r) => out.push(check(S, "q(1,1,1) = 5 + 5 ln 3", (r.q - (5.0 + 5.0 * 3f64.ln())).abs(), 1e-9, "abs error")),
        Err(e) => out.push(failed(S, "q(1,1,1) = 5 + 5 ln 3", e)),
    }
    match eta_scan(1, 4.0) {
        Ok(s) => {
            let err = (s.log_eta.exp() - 128.0 / 3.0).abs() + if s.argmax_k == 4 { 0.0 } else { f64::INFINITY };
            out.push(check(S, "eta(1,4) = 128/3 at k = 4", err, 1e-9, format!("abs error, argmax k = {}", s.argmax_k)));
        }
        Err(e) => out.push(failed(S, "eta(1,4) = 128/3 at k = 4", e)),
    }
    match nu(3, 2.0) {
        Ok(v) => out.push(check(S, "nu(3,2) = ln(4/3)", (v - (4.0f64 / 3.0).ln()).abs(), 1e-12, "abs error")),
        Err(e) => out.push(failed(S, "nu(3,2) = ln(4/3)", e)),
    }
    match ry_zero_bound(1, E - 2.0) {
        Ok(b) => out.push(check(S, "zero bound(1, e-2) = 10", (b.bound - 10.0).abs(), 1e-9, "abs error")),
        Err(e) => out.push(failed(S, "zero bound(1, e-2) = 10", e)),
    }

    let grid: Vec<(u64, f64)> = P_GRID.flat_map(|p| R_GRID.map(|r| (p, r))).collect();
    let reports = parallel::map(exec, &grid, |&(p, r)| q_bound(p, r, 1.0));
    let mut chain_gap = f64::NEG_INFINITY;
    let (mut ratio_min, mut ratio_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut grid_error = None;
    for rep in &reports {
        match rep {
            Ok(r) => {
                chain_gap = chain_gap.max(r.log_eta - r.log_eta1_bound.max(r.log_eta2_bound));
                let ratio = r.q / r.envelope();
                ratio_min = ratio_min.min(ratio);
                ratio_max = ratio_max.max(ratio);
            }
            Err(e) => grid_error = Some(e.clone()),
        }
    }
    if let Some(e) = grid_error {
        out.push(failed(S, "grid sweep", e));
    } else {
        out.push(check(S, "eta <= max(eta1, eta2) on grid", chain_gap, 1e-9, "max of log_eta - log max bound"));
        let mut c = check(S, "q / (p(1 + ln p + ln R) + R) in (0, 20]", ratio_max, 20.0, format!("min ratio {ratio_min:.6}"));
        c.passed &= ratio_min > 0.0;
        out.push(c);
    }

    // max_{1<=i<=p} |a_i| R^i / i! >= nu max |a_i|
    let head = parallel::map_range(exec, 1000, |i| {
        let mut rng = item_rng(seed ^ 0x6865_6164, i as u64);
        let (p, r) = grid[rng.random_range(0..grid.len())];
        let ln_a: Vec<f64> = (0..p).map(|_| -10.0 * rng.random::<f64>()).collect();
        let lhs = ln_a
            .iter()
            .enumerate()
            .map(|(j, la)| la + (j + 1) as f64 * r.ln() - ln_factorial(j as u64 + 1))
            .fold(f64::NEG_INFINITY, f64::max);
        let rhs = nu(p, r).map(|v| v + ln_a.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        rhs.map(|rhs| rhs - lhs)
    });
    match head.into_iter().collect::<Result<Vec<_>>>() {
        Ok(gaps) => out.push(check(
            S,
            "head inequality (1000 random vectors)",
            gaps.into_iter().fold(f64::NEG_INFINITY, f64::max),
            1e-12,
            "max of ln(nu max|a_i|) - ln max(|a_i| R^i / i!)",
        )),
        Err(e) => out.push(failed(S, "head inequality (1000 random vectors)", e)),
    }

    let transfer = parallel::map_range(exec, 200, |i| domination_transfer_gap(&mut item_rng(seed ^ 0x7472_616e, i as u64)));
    match transfer.into_iter().collect::<Result<Vec<_>>>() {
        Ok(gaps) => out.push(check(
            S,
            "domination transfer to the Borel side (200 constructions)",
            gaps.into_iter().fold(f64::NEG_INFINITY, f64::max),
            1e-9,
            "max of ln C_measured - ln(A eta / nu)",
        )),
        Err(e) => out.push(failed(S, "domination transfer", e)),
    }
    out
}

/// Builds `f` saturating `|a_k| = A k^(2p-1) max|a_i|` and returns
/// `ln(minimal domination constant of B(f)) - ln(A eta / nu)`.
pub fn domination_transfer_gap(rng: &mut impl Rng) -> Result<f64> {
    let p = rng.random_range(1..=12u64);
    let r = R_GRID[rng.random_range(0..4)];
    let ln_amp = (rng.random::<f64>() * 6.0 - 3.0) * 10f64.ln();
    let report = q_bound(p, r, ln_amp.exp())?;
    let k_max = (report.eta_argmax_k as usize + 64).max(3 * p as usize + 8);
    let mut coeffs = vec![ScaledComplex::ZERO; k_max + 1];
    let mut ln_head = f64::NEG_INFINITY;
    for c in coeffs.iter_mut().take(p as usize + 1).skip(1) {
        let z = uniform_in_disk(rng, 1.0);
        ln_head = ln_head.max(z.norm().ln());
        *c = ScaledComplex::from_complex(z);
    }
    for (k, c) in coeffs.iter_mut().enumerate().skip(p as usize + 1) {
        let ln_mag = ln_amp + (2 * p - 1) as f64 * (k as f64).ln() + ln_head;
        let phase = Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>());
        let e = (ln_mag / std::f64::consts::LN_2).floor();
        let m = (ln_mag - e * std::f64::consts::LN_2).exp();
        *c = ScaledComplex::from_parts(m * phase.re, m * phase.im, e as i64).expect("finite");
    }
    let f = PowerSeries::new("saturated", coeffs);
    let measured = minimal_constant(&borel(&f), p as usize, r, k_max, false)?;
    Ok(measured.ln() - report.log_c)
}

/// Polynomial with all roots in `D_{0.2}`, degree 1..=12.
pub fn random_small_root_polynomial(rng: &mut impl Rng) -> (PowerSeries, usize) {
    let degree = rng.random_range(1..=12);
    let roots: Vec<Complex64> = (0..degree).map(|_| uniform_in_disk(rng, 0.2)).collect();
    (PowerSeries::from_roots("small-roots", &roots), degree)
}

fn domination_suite(seed: u64, exec: Execution) -> Vec<Check> {
    const S: &str = "domination";
    let mut out = Vec::new();
    let fits: Result<Vec<f64>> = (1..=6u64)
        .map(|p| {
            let f = build(&ExampleId::new(ExampleName::FpTilde, p, 400))?;
            minimal_power_factor(&f, p as usize, 0.999, p as f64, 400, false)
        })
        .collect();
    match fits {
        Ok(v) => out.push(check(S, "fp_tilde fit A <= 1.1 for p = 1..6", v.into_iter().fold(0.0, f64::max), 1.1, "max fitted A")),
        Err(e) => out.push(failed(S, "fp_tilde fit", e)),
    }
    let koebe = build(&ExampleId::new(ExampleName::Koebe, 0, 300))
        .and_then(|f| minimal_power_factor(&f, 1, 0.99, 1.0, 300, false));
    match koebe {
        Ok(a) => out.push(check(S, "koebe fit = 0.99", (a - 0.99).abs(), 1e-12, "abs error")),
        Err(e) => out.push(failed(S, "koebe fit", e)),
    }

    let scaling = parallel::map_range(exec, 100, |i| -> Result<f64> {
        let mut rng = item_rng(seed ^ 0x7363_616c, i as u64);
        let order = rng.random_range(8..=80usize);
        let coeffs: Vec<ScaledComplex> = (0..=order)
            .map(|_| {
                let z = uniform_in_disk(&mut rng, 1.0);
                ScaledComplex::from_parts(z.re, z.im, rng.random_range(-30..=30)).expect("finite")
            })
            .collect();
        let f = PowerSeries::new("random", coeffs);
        let n = rng.random_range(1..order / 2);
        let radius = 0.25 * 16f64.powf(rng.random::<f64>());
        let scaled = f.scale_var(radius)?;
        let a = minimal_constant(&f, n, radius, order, true)?;
        let b = minimal_constant(&scaled, n, 1.0, order, true)?;
        let m = rng.random::<f64>() * 5.0;
        let c = minimal_power_factor(&f, n, radius, m, order, false)?;
        let d = minimal_power_factor(&scaled, n, 1.0, m, order, false)?;
        Ok(((a - b).abs() / a.max(b)).max((c - d).abs() / c.max(d)))
    });
    match scaling.into_iter().collect::<Result<Vec<_>>>() {
        Ok(v) => out.push(check(S, "scaling invariance (100 random series)", v.into_iter().fold(0.0, f64::max), 1e-12, "max relative difference")),
        Err(e) => out.push(failed(S, "scaling invariance", e)),
    }

    let ry = parallel::map_range(exec, 200, |i| -> Result<f64> {
        let (f, degree) = random_small_root_polynomial(&mut item_rng(seed ^ 0x7279, i as u64));
        let c = minimal_constant(&f, 0, 1.0, f.order(), true)?;
        Ok(degree as f64 - ry_zero_bound(0, c)?.bound)
    });
    match ry.into_iter().collect::<Result<Vec<_>>>() {
        Ok(v) => out.push(check(
            S,
            "root count <= 5 ln(C + 2) (200 polynomials, roots in D_0.2)",
            v.into_iter().fold(f64::NEG_INFINITY, f64::max),
            0.0,
            "max of degree - bound",
        )),
        Err(e) => out.push(failed(S, "zero bound empirical check", e)),
    }
    out
}

fn valency_suite(seed: u64, exec: Execution) -> Vec<Check> {
    const S: &str = "valency";
    let mut out = Vec::new();
    let spec = ContourSpec::new(1.0);
    let outcomes = parallel::map_range(exec, 500, |i| {
        let roots = random_roots_off_unit_circle(&mut item_rng(seed ^ 0x7769_6e64, i as u64));
        let expected = roots.iter().filter(|z| z.norm() < 1.0).count() as i64;
        let f = PowerSeries::from_roots("random", &roots);
        match count_zeros(&f, &spec) {
            Ok(w) => w.certified && w.count == expected,
            Err(_) => false,
        }
    });
    let mismatches = outcomes.iter().filter(|ok| !**ok).count();
    out.push(check(S, "winding = constructed root count (500 polynomials)", mismatches as f64, 0.0, "mismatched or uncertified"));

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let geometric = ExampleId::new(ExampleName::Geometric, 0, 100);
    let mut cases: Vec<(String, ExampleId, Complex64, f64, PowerSeries)> = [5.0, 10.0, 20.0]
        .into_iter()
        .map(|r| (format!("zeros of e^z - 1, r = {r}"), geometric, one, r, exponential(100).shifted(one)))
        .collect();
    let fp = ExampleId::new(ExampleName::Fp, 3, 120);
    let h = ExampleId::new(ExampleName::ExpPower, 2, 100);
    if let (Ok(fp_series), Ok(h_series)) = (build(&fp), build(&h)) {
        cases.push(("zeros of f_3, r = 7".into(), fp, zero, 7.0, fp_series));
        cases.push(("zeros of e^(z^2) - 1, r = 3".into(), h, one, 3.0, h_series.shifted(one)));
    }
    for (name, id, c, r, series) in cases {
        let outcome = analytic_solutions(&id, c, r).and_then(|sols| {
            let w = count_zeros(&series, &ContourSpec::new(r))?;
            let miss = if w.certified && w.count == sols.len() as i64 { 0.0 } else { 1.0 };
            Ok((miss, sols.len(), w.count))
        });
        match outcome {
            Ok((miss, expected, got)) => {
                out.push(check(S, name, miss, 0.0, format!("oracle {expected}, winding {got}")))
            }
            Err(e) => out.push(failed(S, name, e)),
        }
    }

    let geo = build(&ExampleId::new(ExampleName::Geometric, 0, 200))
        .and_then(|f| valency_lower_bound(&f, &ContourSpec::new(0.9), 16, seed, exec));
    match geo {
        Ok(rep) => out.push(check(
            S,
            "geometric valency on r = 0.9 is 1",
            (rep.max_count - 1).abs() as f64,
            0.0,
            format!("max_count {}", rep.max_count),
        )),
        Err(e) => out.push(failed(S, "geometric valency on r = 0.9 is 1", e)),
    }
    out
}

fn borel_suite() -> Vec<Check> {
    const S: &str = "borel";
    let mut out = Vec::new();
    let ones = PowerSeries::from_real("geometric", &[1.0; 201]);
    let exact = borel(&ones).coeffs() == exponential(200).coeffs();
    out.push(check(S, "borel(all-ones) = exponential coefficients", if exact { 0.0 } else { 1.0 }, 0.0, "exact equality"));

    let worst: Result<f64> = (1..=6u64).try_fold(0.0f64, |acc, p| {
        let tilde = build(&ExampleId::new(ExampleName::FpTilde, p, 200))?;
        let fp = build(&ExampleId::new(ExampleName::Fp, p, 200))?;
        let b = borel(&tilde);
        Ok((0..=200).fold(acc, |acc, k| {
            let (x, y) = (b.coeff(k), fp.coeff(k));
            let s = x.abs().max(y.abs());
            if s == 0.0 { acc } else { acc.max((x - y).abs() / s) }
        }))
    });
    match worst {
        Ok(v) => out.push(check(S, "borel(fp_tilde(p)) = fp(p), p = 1..6, order 200", v, 1e-14, "max relative difference")),
        Err(e) => out.push(failed(S, "borel(fp_tilde) = fp", e)),
    }

    let g = exponential(200);
    let points = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(0.25, 0.25),
    ];
    let errors: Result<Vec<f64>> = points
        .iter()
        .map(|&z| {
            let spec = QuadratureSpec::new(64, 40.0, 20.0)?;
            let r = inverse_borel_integral(&g, z, &spec)?;
            Ok((r.value - 1.0 / (1.0 - z)).norm())
        })
        .collect();
    match errors {
        Ok(v) => out.push(check(S, "integral inverse reproduces 1/(1-z)", v.into_iter().fold(0.0, f64::max), 1e-8, "max abs error over 4 points")),
        Err(e) => out.push(failed(S, "integral inverse reproduces 1/(1-z)", e)),
    }
    out
}

pub fn closed_bounds_dominate(p: u64, r: f64) -> Result<bool> {
    Ok(eta_scan(p, r)?.log_eta <= eta_closed_bounds(p, r)?.log_max() + 1e-9)
}
