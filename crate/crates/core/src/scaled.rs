//! Complex numbers with an explicit binary exponent.
//!
//! A [`ScaledComplex`] stores `(re + i im) * 2^exp2` with the mantissa modulus
//! kept in `[1, 2)`. Coefficients such as `k!/(k-p)!` or `1/k!` at orders of a
//! few hundred leave the `f64` range long before they stop mattering, so all
//! series coefficients live in this form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// `floor(log2(|x|))` for finite nonzero `x`, subnormals included.
pub(crate) fn ilog2(x: f64) -> i64 {
    debug_assert!(x.is_finite() && x != 0.0);
    let bits = x.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal: lift into the normal range first
        ilog2(x * f64::from_bits(0x43f0_0000_0000_0000)) - 64
    } else {
        biased - 1023
    }
}

/// `x * 2^n`, saturating to zero or infinity like the hardware would.
pub(crate) fn ldexp(mut x: f64, mut n: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    while n > 1023 {
        x *= f64::from_bits(0x7fe0_0000_0000_0000); // 2^1023
        n -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while n < -1022 {
        x *= f64::from_bits(0x0010_0000_0000_0000); // 2^-1022
        n += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((n + 1023) as u64) << 52)
}

/// A complex value `(re + i im) * 2^exp2`.
///
/// Invariant: either the value is the canonical zero (`0, 0, 0`) or
/// `hypot(re, im)` lies in `[1, 2)`.
#[derive(Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    re: f64,
    im: f64,
    exp2: i64,
}

impl fmt::Debug for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)*2^{}", self.re, self.im, self.exp2)
    }
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl ScaledComplex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0, exp2: 0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0, exp2: 0 };

    /// Builds `(re + i im) * 2^exp2` and normalizes it.
    ///
    /// Non-finite mantissas are rejected by returning `None`.
    pub fn from_parts(re: f64, im: f64, exp2: i64) -> Option<Self> {
        if !re.is_finite() || !im.is_finite() {
            return None;
        }
        Some(Self { re, im, exp2 }.normalized())
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::from_parts(z.re, z.im, 0).expect("finite complex value")
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_parts(x, 0.0, 0).expect("finite real value")
    }

    /// Brings the mantissa modulus into `[1, 2)`. Idempotent.
    pub fn normalized(self) -> Self {
        if self.re == 0.0 && self.im == 0.0 {
            return Self::ZERO;
        }
        // Pre-scale so hypot can neither overflow nor lose subnormal bits.
        let big = self.re.abs().max(self.im.abs());
        let shift0 = ilog2(big);
        let (re, im) = (ldexp(self.re, -shift0), ldexp(self.im, -shift0));
        let modulus = re.hypot(im);
        let shift1 = ilog2(modulus);
        Self {
            re: ldexp(re, -shift1),
            im: ldexp(im, -shift1),
            exp2: self.exp2 + shift0 + shift1,
        }
    }

    pub fn is_normalized(&self) -> bool {
        if self.re == 0.0 && self.im == 0.0 {
            return self.exp2 == 0;
        }
        let m = self.re.hypot(self.im);
        (1.0..2.0).contains(&m)
    }

    pub fn re_mantissa(&self) -> f64 {
        self.re
    }

    pub fn im_mantissa(&self) -> f64 {
        self.im
    }

    pub fn mantissa(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    /// Plain complex value; components may be infinite or flush to zero.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.re, self.exp2), ldexp(self.im, self.exp2))
    }

    /// `ln |self|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.re.hypot(self.im).ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// `|self|` as a plain float (may overflow to infinity).
    pub fn abs(&self) -> f64 {
        ldexp(self.re.hypot(self.im), self.exp2)
    }

    pub fn conj(self) -> Self {
        Self { im: -self.im, ..self }
    }

    /// Multiplies by `2^n` exactly.
    pub fn mul_pow2(self, n: i64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self { exp2: self.exp2 + n, ..self }
    }

    pub fn scale(self, x: f64) -> Self {
        self * Self::from_real(x)
    }

    pub fn mul_complex(self, z: Complex64) -> Self {
        self * Self::from_complex(z)
    }
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self { re: -self.re, im: -self.im, exp2: self.exp2 }
    }
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        let m = self.mantissa() * rhs.mantissa();
        Self { re: m.re, im: m.im, exp2: self.exp2 + rhs.exp2 }.normalized()
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    /// Division by zero yields a mantissa of NaN/inf; callers never divide by zero.
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division of ScaledComplex by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        let m = if rhs.im == 0.0 {
            // keep real divisions to a single rounding per component
            Complex64::new(self.re / rhs.re, self.im / rhs.re)
        } else {
            self.mantissa() / rhs.mantissa()
        };
        Self { re: m.re, im: m.im, exp2: self.exp2 - rhs.exp2 }.normalized()
    }
}

impl Add for ScaledComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp2 >= rhs.exp2 { (self, rhs) } else { (rhs, self) };
        let shift = lo.exp2 - hi.exp2;
        let re = hi.re + ldexp(lo.re, shift);
        let im = hi.im + ldexp(lo.im, shift);
        Self { re, im, exp2: hi.exp2 }.normalized()
    }
}

impl Sub for ScaledComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for ScaledComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

/// Positive real accumulator in double-double precision with a binary
/// exponent. Used for running products (factorials, powers) where the final
/// `f64` mantissa must be correctly rounded rather than carry `k` roundings.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExtendedReal {
    hi: f64,
    lo: f64,
    exp2: i64,
}

impl ExtendedReal {
    pub(crate) const ONE: Self = Self { hi: 1.0, lo: 0.0, exp2: 0 };

    pub(crate) fn mul_f64(self, s: f64) -> Self {
        debug_assert!(s > 0.0 && s.is_finite());
        let p = self.hi * s;
        let e = self.hi.mul_add(s, -p) + self.lo * s;
        let hi = p + e;
        let lo = e - (hi - p);
        let shift = ilog2(hi);
        Self {
            hi: ldexp(hi, -shift),
            lo: ldexp(lo, -shift),
            exp2: self.exp2 + shift,
        }
    }

    pub(crate) fn to_scaled(self) -> ScaledComplex {
        ScaledComplex::from_parts(self.hi + self.lo, 0.0, self.exp2).expect("finite")
    }
}

/// `k!` as a scaled value with a correctly rounded mantissa.
pub fn factorial(k: u64) -> ScaledComplex {
    let mut acc = ExtendedReal::ONE;
    for j in 2..=k {
        acc = acc.mul_f64(j as f64);
    }
    acc.to_scaled()
}

/// Iterator over `0!, 1!, 2!, ...` as scaled values.
pub fn factorials() -> impl Iterator<Item = ScaledComplex> {
    let mut acc = ExtendedReal::ONE;
    (0u64..).map(move |k| {
        if k >= 2 {
            acc = acc.mul_f64(k as f64);
        }
        acc.to_scaled()
    })
}

/// Iterator over `x^0, x^1, x^2, ...` for real `x > 0`.
pub(crate) fn powers(x: f64) -> impl Iterator<Item = ScaledComplex> {
    let e = ilog2(x);
    let m = ldexp(x, -e);
    let mut acc = ExtendedReal::ONE;
    (0i64..).map(move |k| {
        if k >= 1 {
            acc = acc.mul_f64(m);
        }
        ExtendedReal { exp2: acc.exp2 + e * k, ..acc }.to_scaled()
    })
}
