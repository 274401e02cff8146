//! Truncated complex power series `a_0 + a_1 z + ... + a_K z^K`.

use num_complex::Complex64;

use crate::scaled::{ilog2, ldexp, powers, ScaledComplex};
use crate::{Error, Result};

/// Coefficients `a_0..=a_K` of a truncated power series, with a label.
///
/// The truncation degree `K` is `order()`; there are always `K + 1` stored
/// coefficients, each normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<ScaledComplex>,
    label: String,
}

impl PowerSeries {
    /// Builds a series from its coefficients. An empty vector becomes the
    /// zero series of order 0.
    pub fn new(label: impl Into<String>, mut coeffs: Vec<ScaledComplex>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ScaledComplex::ZERO);
        }
        for c in coeffs.iter_mut() {
            *c = c.normalized();
        }
        Self { coeffs, label: label.into() }
    }

    pub fn zero(order: usize) -> Self {
        Self::new("zero", vec![ScaledComplex::ZERO; order + 1])
    }

    pub fn from_complex(label: impl Into<String>, coeffs: &[Complex64]) -> Self {
        Self::new(label, coeffs.iter().map(|&c| ScaledComplex::from_complex(c)).collect())
    }

    pub fn from_real(label: impl Into<String>, coeffs: &[f64]) -> Self {
        Self::new(label, coeffs.iter().map(|&c| ScaledComplex::from_real(c)).collect())
    }

    /// An exact polynomial. The coefficient vector is zero-padded so that the
    /// last quarter of the stored window is empty, which makes
    /// [`tail_bound`](Self::tail_bound) report a zero tail at every radius.
    pub fn polynomial(label: impl Into<String>, coeffs: &[Complex64]) -> Self {
        let degree = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
        Self::from_complex(label, coeffs).with_order(2 * degree + 4)
    }

    /// Monic polynomial with the given roots (repeated per multiplicity).
    pub fn from_roots(label: impl Into<String>, roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        Self::polynomial(label, &c)
    }

    /// `z^degree`, stored up to `order` (which must be at least `degree`).
    pub fn monomial(degree: usize, order: usize) -> Self {
        let mut coeffs = vec![ScaledComplex::ZERO; order.max(degree) + 1];
        coeffs[degree] = ScaledComplex::ONE;
        Self::new(format!("z^{degree}"), coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn coeffs(&self) -> &[ScaledComplex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ScaledComplex {
        self.coeffs.get(k).copied().unwrap_or(ScaledComplex::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ScaledComplex::is_zero)
    }

    /// Truncates or zero-pads to the given order.
    pub fn with_order(mut self, order: usize) -> Self {
        self.coeffs.resize(order + 1, ScaledComplex::ZERO);
        self
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(usize, ScaledComplex) -> ScaledComplex) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, &a)| f(k, a)).collect();
        Self::new(self.label.clone(), coeffs)
    }

    /// `f - c`: subtracts a constant from `a_0`.
    pub fn shifted(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] - ScaledComplex::from_complex(c);
        out
    }

    /// `alpha * self + beta * other`, at the larger of the two orders.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Self {
        let order = self.order().max(other.order());
        let (a, b) = (ScaledComplex::from_complex(alpha), ScaledComplex::from_complex(beta));
        let coeffs = (0..=order).map(|k| a * self.coeff(k) + b * other.coeff(k)).collect();
        Self::new(self.label.clone(), coeffs)
    }

    /// Horner evaluation in scaled arithmetic.
    pub fn evaluate_scaled(&self, z: Complex64) -> ScaledComplex {
        let mut m = Complex64::new(0.0, 0.0);
        let mut e: i64 = 0;
        for (i, a) in self.coeffs.iter().rev().enumerate() {
            m *= z;
            if !a.is_zero() {
                if m.re == 0.0 && m.im == 0.0 {
                    m = a.mantissa();
                    e = a.exp2();
                } else {
                    let d = a.exp2() - e;
                    if d > 600 {
                        // the accumulator is negligible next to this coefficient
                        m = a.mantissa() + scale_complex(m, -d);
                        e = a.exp2();
                    } else {
                        m += scale_complex(a.mantissa(), d);
                    }
                }
            }
            if i % 16 == 15 || m.norm_sqr() > 1e200 {
                (m, e) = rebalance(m, e);
            }
        }
        ScaledComplex::from_parts(m.re, m.im, e).unwrap_or(ScaledComplex::ZERO)
    }

    /// Evaluates `f(z)`; fails if the result leaves the `f64` range.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let v = self.evaluate_scaled(z).to_complex();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::MagnitudeOutOfRange)
        }
    }

    /// Term-by-term derivative. The derivative of an order-0 series is the
    /// zero series of order 0.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0).with_label(format!("{}'", self.label));
        }
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].scale(k as f64))
            .collect();
        Self::new(format!("{}'", self.label), coeffs)
    }

    /// `f(R z)`: coefficient `k` becomes `a_k R^k`.
    pub fn scale_var(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive and finite, got {radius}")));
        }
        let coeffs = self.coeffs.iter().zip(powers(radius)).map(|(&a, p)| a * p).collect();
        Ok(Self::new(self.label.clone(), coeffs))
    }

    /// Cauchy product truncated at `order`.
    pub fn mul_truncated(&self, other: &Self, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                let lo = k.saturating_sub(other.order());
                let hi = k.min(self.order());
                (lo..=hi).fold(ScaledComplex::ZERO, |acc, i| {
                    acc + self.coeff(i) * other.coeff(k - i)
                })
            })
            .collect();
        Self::new(format!("({})*({})", self.label, other.label), coeffs)
    }

    /// Heuristic estimate of the discarded tail `sum_{k > K} a_k r^k`.
    ///
    /// Fits a geometric envelope `rho = max |a_k|^(1/k)` over the last quarter
    /// of the stored coefficients and sums `(rho r)^k` from `K + 1` on. Returns
    /// `+inf` when `rho r >= 1`, and for any `r > 0` when the label carries
    /// [`DIVERGENT_MARKER`]. This is an estimate, not a certificate.
    pub fn tail_bound(&self, r: f64) -> f64 {
        if r > 0.0 && self.label.contains(DIVERGENT_MARKER) {
            return f64::INFINITY;
        }
        let order = self.order();
        let window = ((order + 1) / 4).max(1);
        let start = (order + 1 - window).max(1);
        let ln_rho = (start..=order)
            .map(|k| self.coeffs[k].ln_abs() / k as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        if ln_rho == f64::NEG_INFINITY {
            return 0.0;
        }
        let ln_x = ln_rho + r.ln();
        if ln_x >= 0.0 {
            return f64::INFINITY;
        }
        // x^(K+1) / (1 - x)
        ((order as f64 + 1.0) * ln_x).exp() / -ln_x.exp_m1()
    }
}

/// Labels containing this marker belong to series known to diverge off the origin.
pub const DIVERGENT_MARKER: &str = "[divergent]";

fn scale_complex(z: Complex64, n: i64) -> Complex64 {
    Complex64::new(ldexp(z.re, n), ldexp(z.im, n))
}

fn rebalance(m: Complex64, e: i64) -> (Complex64, i64) {
    let big = m.re.abs().max(m.im.abs());
    if big == 0.0 || !big.is_finite() {
        return (m, e);
    }
    let s = ilog2(big);
    (scale_complex(m, -s), e + s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn geometric(order: usize) -> PowerSeries {
        PowerSeries::from_real("geometric", &vec![1.0; order + 1])
    }

    fn rel_err(a: ScaledComplex, b: ScaledComplex) -> f64 {
        if a.is_zero() && b.is_zero() {
            return 0.0;
        }
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn geometric_at_half() {
        let v = geometric(60).evaluate(c(0.5, 0.0)).unwrap();
        // truncation error is 0.5^61 / 0.5
        assert!((v.re - 2.0).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn evaluate_at_origin_and_monomial() {
        let f = PowerSeries::from_complex("f", &[c(0.25, -3.0), c(1.0, 1.0), c(7.0, 0.0)]);
        assert_eq!(f.evaluate(c(0.0, 0.0)).unwrap(), c(0.25, -3.0));
        let m = PowerSeries::monomial(3, 3);
        assert_eq!(m.evaluate(c(2.0, 0.0)).unwrap(), c(8.0, 0.0));
    }

    #[test]
    fn evaluate_reports_overflow() {
        let f = PowerSeries::new("big", vec![ScaledComplex::ONE.mul_pow2(2000)]);
        assert_eq!(f.evaluate(c(1.0, 0.0)), Err(Error::MagnitudeOutOfRange));
    }

    #[test]
    fn evaluate_beyond_f64_coefficients() {
        // 2^3000 * sum_{k<=200} 2^-k = 2^3000 * (2 - 2^-200)
        let coeffs = (0..=200).map(|_| ScaledComplex::ONE.mul_pow2(3000)).collect();
        let f = PowerSeries::new("huge", coeffs);
        let v = f.evaluate_scaled(c(0.5, 0.0));
        // 2 - 2^-200 rounds to 2
        assert_eq!(v.exp2(), 3001);
        assert_eq!(v.re_mantissa(), 1.0);
        assert_eq!(f.evaluate(c(0.5, 0.0)), Err(Error::MagnitudeOutOfRange));
    }

    #[test]
    fn exp_series_far_from_origin() {
        // order 400, |z| = 50: intermediate terms reach 50^50/50!
        let coeffs: Vec<_> = crate::scaled::factorials()
            .take(401)
            .map(|f| ScaledComplex::ONE / f)
            .collect();
        let e = PowerSeries::new("exp", coeffs);
        let v = e.evaluate(c(50.0, 0.0)).unwrap();
        assert!((v.re / 50f64.exp() - 1.0).abs() < 1e-13);
        let w = e.evaluate(c(0.0, 50.0)).unwrap();
        // cancellation: the error scales with sum |terms| = e^50
        assert!((w - Complex64::new(0.0, 50.0).exp()).norm() < 1e-13 * 50f64.exp());
    }

    #[test]
    fn derivative_cases() {
        let d = PowerSeries::monomial(3, 3).derivative();
        assert_eq!(d.order(), 2);
        assert_eq!(d.coeff(2), ScaledComplex::from_real(3.0));
        assert!(d.coeff(0).is_zero() && d.coeff(1).is_zero());

        let k = PowerSeries::from_real("five", &[5.0]).derivative();
        assert_eq!(k.order(), 0);
        assert!(k.is_zero());

        let g = geometric(30).derivative();
        assert_eq!(g.order(), 29);
        for k in 0..=29 {
            assert_eq!(g.coeff(k), ScaledComplex::from_real((k + 1) as f64));
        }
    }

    #[test]
    fn scale_var_cases() {
        let f = PowerSeries::from_complex("f", &[c(1.0, 2.0), c(-0.3, 0.1), c(5.0, 5.0)]);
        assert_eq!(f.scale_var(1.0).unwrap(), f);
        let s = geometric(80).scale_var(2.0).unwrap();
        for (k, a) in s.coeffs().iter().enumerate() {
            assert_eq!(a.re_mantissa(), 1.0);
            assert_eq!(a.exp2(), k as i64);
        }
        assert!(f.scale_var(0.0).is_err());
        assert!(f.scale_var(-1.0).is_err());
        assert!(f.scale_var(f64::NAN).is_err());
    }

    #[test]
    fn mul_truncated_cases() {
        let a = PowerSeries::from_real("1+z", &[1.0, 1.0]);
        let b = PowerSeries::from_real("1-z", &[1.0, -1.0]);
        let p = a.mul_truncated(&b, 2);
        assert_eq!(p.coeff(0), ScaledComplex::ONE);
        assert!(p.coeff(1).is_zero());
        assert_eq!(p.coeff(2), ScaledComplex::from_real(-1.0));
        assert!(a.mul_truncated(&PowerSeries::zero(5), 5).is_zero());
    }

    #[test]
    fn tail_bound_cases() {
        let coeffs: Vec<_> = crate::scaled::factorials()
            .take(101)
            .map(|f| ScaledComplex::ONE / f)
            .collect();
        let e = PowerSeries::new("exp", coeffs);
        let t = e.tail_bound(20.0);
        assert!(t < 1e-10, "tail = {t}");
        // the real tail sum of 20^k/k! from k = 101 is far smaller still
        assert!(t > 0.0);
        assert_eq!(geometric(50).tail_bound(1.5), f64::INFINITY);
        assert_eq!(PowerSeries::zero(10).tail_bound(1e6), 0.0);
        assert_eq!(PowerSeries::polynomial("p", &[c(1.0, 0.0), c(2.0, 0.0)]).tail_bound(100.0), 0.0);
    }

    #[test]
    fn tail_bound_geometric_value() {
        let t = geometric(200).tail_bound(0.9);
        let expect = 0.9f64.powi(201) / 0.1;
        assert!((t / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_roots_expands() {
        let f = PowerSeries::from_roots("p", &[c(0.5, 0.0), c(2.0, 0.0)]);
        assert_eq!(f.coeff(0), ScaledComplex::from_real(1.0));
        assert_eq!(f.coeff(1), ScaledComplex::from_real(-2.5));
        assert_eq!(f.coeff(2), ScaledComplex::ONE);
        assert!(f.order() >= 8);
    }

    fn arb_series(max_order: usize) -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -40i64..40), 1..=max_order + 1).prop_map(
            |v| {
                let coeffs = v
                    .into_iter()
                    .map(|(re, im, e)| ScaledComplex::from_parts(re, im, e).unwrap())
                    .collect();
                PowerSeries::new("random", coeffs)
            },
        )
    }

    proptest! {
        #[test]
        fn scale_var_composes(f in arb_series(60), r1 in 0.5f64..4.0, r2 in 0.5f64..4.0) {
            let once = f.scale_var(r1 * r2).unwrap();
            let twice = f.scale_var(r1).unwrap().scale_var(r2).unwrap();
            for k in 0..=f.order() {
                prop_assert!(rel_err(once.coeff(k), twice.coeff(k)) < 1e-14);
            }
        }

        #[test]
        fn scale_roundtrip(f in arb_series(60)) {
            let back = f.scale_var(2.0).unwrap().scale_var(0.5).unwrap();
            for k in 0..=f.order() {
                prop_assert!(rel_err(back.coeff(k), f.coeff(k)) <= 1e-15);
            }
        }

        #[test]
        fn chain_rule(f in arb_series(60), r in 0.25f64..4.0) {
            let lhs = f.scale_var(r).unwrap().derivative();
            let rhs = f.derivative().scale_var(r).unwrap().map_coeffs(|_, a| a.scale(r));
            for k in 0..=lhs.order() {
                prop_assert!(rel_err(lhs.coeff(k), rhs.coeff(k)) < 1e-14);
            }
        }

        #[test]
        fn product_evaluates_to_product(
            a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
            b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
            zr in -1.5f64..1.5, zi in -1.5f64..1.5,
        ) {
            let a: Vec<_> = a.into_iter().map(|(x, y)| c(x, y)).collect();
            let b: Vec<_> = b.into_iter().map(|(x, y)| c(x, y)).collect();
            let f = PowerSeries::from_complex("f", &a);
            let g = PowerSeries::from_complex("g", &b);
            let z = c(zr, zi);
            let fg = f.mul_truncated(&g, f.order() + g.order());
            let lhs = fg.evaluate(z).unwrap();
            let rhs = f.evaluate(z).unwrap() * g.evaluate(z).unwrap();
            let scale = 1.0 + f.evaluate(z).unwrap().norm() * g.evaluate(z).unwrap().norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale * 20.0);
        }
    }
}
