//! The Borel transform `sum a_k z^k -> sum a_k z^k / k!`, its coefficient
//! inverse, and the integral inverse `f(z) = int_0^inf e^-t g(t z) dt`.

use num_complex::Complex64;
use serde::Serialize;

use crate::scaled::factorials;
use crate::series::PowerSeries;
use crate::{Error, Result};

const BOREL_SUFFIX: &str = "/borel";
const INVERSE_SUFFIX: &str = "/inverse-borel";

/// Coefficient `k` becomes `a_k / k!`.
pub fn borel(f: &PowerSeries) -> PowerSeries {
    let coeffs = f.coeffs().iter().zip(factorials()).map(|(&a, fact)| a / fact).collect();
    let label = match f.label().strip_suffix(INVERSE_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{}{BOREL_SUFFIX}", f.label()),
    };
    PowerSeries::new(label, coeffs)
}

/// Coefficient `k` becomes `b_k * k!`.
pub fn inverse_borel_coeff(g: &PowerSeries) -> PowerSeries {
    let coeffs = g.coeffs().iter().zip(factorials()).map(|(&b, fact)| b * fact).collect();
    let label = match g.label().strip_suffix(BOREL_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{}{INVERSE_SUFFIX}", g.label()),
    };
    PowerSeries::new(label, coeffs)
}

/// Parameters of the truncated Laplace-type integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    node_count: usize,
    cutoff: f64,
    trust_radius: f64,
}

impl QuadratureSpec {
    pub const MAX_NODES: usize = 256;

    pub fn new(node_count: usize, cutoff: f64, trust_radius: f64) -> Result<Self> {
        if !(8..=Self::MAX_NODES).contains(&node_count) {
            return Err(Error::invalid(format!(
                "node count must lie in [8, {}], got {node_count}",
                Self::MAX_NODES
            )));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
        }
        if !(trust_radius > 0.0 && trust_radius.is_finite()) {
            return Err(Error::invalid(format!("trust radius must be positive, got {trust_radius}")));
        }
        Ok(Self { node_count, cutoff, trust_radius })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn trust_radius(&self) -> f64 {
        self.trust_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: Complex64,
    /// `|Q_n - Q_{n/2}|` plus the estimated contribution beyond the cutoff.
    pub error_estimate: f64,
    pub quadrature_residual: f64,
    pub tail_estimate: f64,
}

/// Gauss–Laguerre nodes and weights for `int_0^inf e^-t phi(t) dt`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut p2 = 0.0;
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut q2) = (1.0f64, 0.0f64);
            for j in 1..=n {
                let p3 = q2;
                q2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * q2 - (jf - 1.0) * p3) / jf;
            }
            p2 = q2;
            pp = nf * (p1 - p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}

/// Approximates `int_0^T e^-t g(t z) dt` with Gauss–Laguerre nodes, dropping
/// nodes beyond the cutoff `T`.
///
/// Requires `|z| T <= trust_radius` and a finite tail estimate for `g` at the
/// trust radius.
pub fn inverse_borel_integral(
    g: &PowerSeries,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    let required = z.norm() * spec.cutoff;
    if required > spec.trust_radius {
        return Err(Error::TrustRadiusExceeded { required, trust: spec.trust_radius });
    }
    if !g.tail_bound(spec.trust_radius).is_finite() {
        return Err(Error::SeriesNotTrusted { radius: spec.trust_radius });
    }

    let rule = |n: usize| -> Result<(Complex64, f64)> {
        let (nodes, weights) = gauss_laguerre(n);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut max_abs = 0.0f64;
        for (&t, &wt) in nodes.iter().zip(&weights) {
            if t > spec.cutoff {
                break;
            }
            let v = g.evaluate(z * t)?;
            max_abs = max_abs.max(v.norm());
            sum += v * wt;
        }
        Ok((sum, max_abs))
    };
    let (full, max_full) = rule(spec.node_count)?;
    let (half, max_half) = rule(spec.node_count / 2)?;

    // growth rate of |g(t z)| near the cutoff sets the size of the dropped tail
    let t = spec.cutoff;
    let at_cutoff = g.evaluate(z * t)?.norm();
    let at_half = g.evaluate(z * (t / 2.0))?.norm();
    let max_sampled = max_full.max(max_half).max(at_cutoff);
    let rate = if at_cutoff > 0.0 && at_half > 0.0 {
        (at_cutoff / at_half).ln() / (t / 2.0)
    } else {
        0.0
    };
    let decay = (1.0 - rate).max(1.0 / t);
    let tail_estimate = (-t).exp() * max_sampled / decay.min(1.0);
    let quadrature_residual = (full - half).norm();

    Ok(IntegralEstimate {
        value: full,
        error_estimate: quadrature_residual + tail_estimate,
        quadrature_residual,
        tail_estimate,
    })
}
