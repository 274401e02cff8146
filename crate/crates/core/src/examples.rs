//! Reference series families and their exact solution sets.
//!
//! * `geometric`: `1/(1 - z)`, all-ones coefficients; its Borel transform is `e^z`.
//! * `fp`: `(z^p - 1)(e^z - 1)`.
//! * `fp_tilde`: the series whose Borel transform is `fp`,
//!   `-sum_{k<=p} z^k + sum_{k>p} (k!/(k-p)! - 1) z^k`.
//! * `exp_power`: `e^{z^p}`; its Borel preimage has coefficients `(lp)!/l!`
//!   and diverges for every `z != 0`.
//! * `koebe`: `z/(1 - z)^2`, coefficients `a_k = k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::scaled::{factorial, factorials, ExtendedReal, ScaledComplex};
use crate::series::PowerSeries;
use crate::{Error, Result};

pub use crate::series::DIVERGENT_MARKER;

const BOUNDARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    Geometric,
    Fp,
    FpTilde,
    ExpPower,
    Koebe,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        ExampleName::Geometric,
        ExampleName::Fp,
        ExampleName::FpTilde,
        ExampleName::ExpPower,
        ExampleName::Koebe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Geometric => "geometric",
            ExampleName::Fp => "fp",
            ExampleName::FpTilde => "fp_tilde",
            ExampleName::ExpPower => "exp_power",
            ExampleName::Koebe => "koebe",
        }
    }

    fn uses_p(self) -> bool {
        matches!(self, ExampleName::Fp | ExampleName::FpTilde | ExampleName::ExpPower)
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown example '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExampleId {
    pub name: ExampleName,
    /// Ignored for `geometric` and `koebe`.
    pub p: u64,
    pub order: usize,
}

impl ExampleId {
    pub fn new(name: ExampleName, p: u64, order: usize) -> Self {
        Self { name, p, order }
    }

    fn check(&self) -> Result<()> {
        if self.name.uses_p() && self.p < 1 {
            return Err(Error::invalid(format!("{} needs p >= 1", self.name)));
        }
        Ok(())
    }

    fn label(&self) -> String {
        if self.name.uses_p() {
            format!("{}(p={})", self.name, self.p)
        } else {
            self.name.to_string()
        }
    }
}

fn inverse_factorials(order: usize) -> Vec<ScaledComplex> {
    factorials().take(order + 1).map(|f| ScaledComplex::ONE / f).collect()
}

/// `e^z` truncated at `order`, coefficients `1/k!`.
pub fn exponential(order: usize) -> PowerSeries {
    PowerSeries::new("exp", inverse_factorials(order))
}

/// `k! / (k - m)!` with a correctly rounded mantissa.
fn falling_factorial(k: u64, m: u64) -> ScaledComplex {
    let mut acc = ExtendedReal::ONE;
    for j in k - m + 1..=k {
        acc = acc.mul_f64(j as f64);
    }
    acc.to_scaled()
}

/// Coefficients of the example, truncated at `id.order`.
pub fn build(id: &ExampleId) -> Result<PowerSeries> {
    id.check()?;
    let order = id.order;
    let p = id.p as usize;
    let coeffs: Vec<ScaledComplex> = match id.name {
        ExampleName::Geometric => vec![ScaledComplex::ONE; order + 1],
        ExampleName::Koebe => (0..=order).map(|k| ScaledComplex::from_real(k as f64)).collect(),
        ExampleName::Fp => {
            let inv = inverse_factorials(order);
            (0..=order)
                .map(|k| match k {
                    0 => ScaledComplex::ZERO,
                    k if k <= p => -inv[k],
                    k => inv[k - p] - inv[k],
                })
                .collect()
        }
        ExampleName::FpTilde => (0..=order)
            .map(|k| match k {
                0 => ScaledComplex::ZERO,
                k if k <= p => -ScaledComplex::ONE,
                k => falling_factorial(k as u64, p as u64) - ScaledComplex::ONE,
            })
            .collect(),
        ExampleName::ExpPower => {
            let inv = inverse_factorials(order / p);
            (0..=order)
                .map(|k| if k % p == 0 { inv[k / p] } else { ScaledComplex::ZERO })
                .collect()
        }
    };
    Ok(PowerSeries::new(id.label(), coeffs))
}

/// The series whose Borel transform is `build(id)`, truncated at `order`.
pub fn borel_counterpart(id: &ExampleId, order: usize) -> Result<PowerSeries> {
    id.check()?;
    match id.name {
        ExampleName::Geometric => build(&ExampleId { order, ..*id }),
        ExampleName::Fp => build(&ExampleId { name: ExampleName::FpTilde, order, ..*id }),
        ExampleName::ExpPower => {
            let p = id.p as usize;
            let coeffs = (0..=order)
                .map(|k| {
                    if k % p == 0 {
                        factorial(k as u64) / factorial((k / p) as u64)
                    } else {
                        ScaledComplex::ZERO
                    }
                })
                .collect();
            Ok(PowerSeries::new(format!("{}/hat {DIVERGENT_MARKER}", id.label()), coeffs))
        }
        ExampleName::FpTilde | ExampleName::Koebe => Err(Error::NoCounterpart(id.name.to_string())),
    }
}

fn check_boundary(z: Complex64, radius: f64) -> Result<()> {
    let distance = (z.norm() - radius).abs();
    if distance <= BOUNDARY_TOLERANCE {
        return Err(Error::BoundaryAmbiguous { distance });
    }
    Ok(())
}

/// Integers `k` with `|offset + 2 pi k| <= reach`, padded by one on each side.
fn k_range(offset: f64, reach: f64) -> std::ops::RangeInclusive<i64> {
    let lo = ((-reach - offset) / (2.0 * PI)).floor() as i64 - 1;
    let hi = ((reach - offset) / (2.0 * PI)).ceil() as i64 + 1;
    lo..=hi
}

/// All solutions of the example's equation inside `|z| < radius`, repeated
/// per multiplicity.
///
/// * `geometric`: solutions of `e^z = c` (its Borel transform).
/// * `fp`: zeros of `(z^p - 1)(e^z - 1)`; only `c = 0` is supported.
/// * `exp_power`: solutions of `e^{z^p} = c`.
///
/// The principal logarithm seeds the `2 pi i k` sweep, so the branch does not
/// affect the result. A solution within `1e-9` of the circle is an error.
pub fn analytic_solutions(id: &ExampleId, c: Complex64, radius: f64) -> Result<Vec<Complex64>> {
    id.check()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    let push = |z: Complex64, out: &mut Vec<Complex64>| -> Result<()> {
        check_boundary(z, radius)?;
        if z.norm() < radius {
            out.push(z);
        }
        Ok(())
    };
    match id.name {
        ExampleName::Geometric => {
            if c == zero {
                return Err(Error::invalid("e^z = c needs c != 0"));
            }
            let w = c.ln();
            for k in k_range(w.im, radius) {
                push(w + Complex64::new(0.0, 2.0 * PI * k as f64), &mut out)?;
            }
        }
        ExampleName::Fp => {
            if c != zero {
                return Err(Error::invalid("fp solutions are only enumerated for c = 0"));
            }
            for j in 0..id.p {
                push(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / id.p as f64), &mut out)?;
            }
            for k in k_range(0.0, radius) {
                push(Complex64::new(0.0, 2.0 * PI * k as f64), &mut out)?;
            }
        }
        ExampleName::ExpPower => {
            if c == zero {
                return Err(Error::invalid("e^(z^p) = c needs c != 0"));
            }
            let p = id.p as i32;
            let reach = radius.powi(p);
            if reach / (2.0 * PI) > 1e6 {
                return Err(Error::invalid("solution set too large to enumerate"));
            }
            let w = c.ln();
            for k in k_range(w.im, reach) {
                let u = w + Complex64::new(0.0, 2.0 * PI * k as f64);
                if u == zero {
                    // z^p = 0: a zero of multiplicity p at the origin
                    for _ in 0..p {
                        out.push(zero);
                    }
                    continue;
                }
                let (m, arg) = u.to_polar();
                let modulus = m.powf(1.0 / p as f64);
                for j in 0..p {
                    push(Complex64::from_polar(modulus, (arg + 2.0 * PI * j as f64) / p as f64), &mut out)?;
                }
            }
        }
        ExampleName::FpTilde | ExampleName::Koebe => {
            return Err(Error::invalid(format!("no analytic solution oracle for {}", id.name)));
        }
    }
    Ok(out)
}
