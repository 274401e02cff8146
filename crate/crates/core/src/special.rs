//! Log-space factorials.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::scaled::factorials;

const STIRLING_FROM: u64 = 1024;

/// `ln(n!) = lnΓ(n + 1)`.
///
/// Below 1024 this is read off the correctly rounded scaled factorial; above,
/// it uses the Stirling series with three correction terms, whose truncation
/// error is below `1e-21` there.
pub fn ln_factorial(n: u64) -> f64 {
    if n < STIRLING_FROM {
        return table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let corr = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + corr
}

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        factorials()
            .take(STIRLING_FROM as usize)
            .map(|f| f.re_mantissa().ln() + f.exp2() as f64 * LN_2)
            .collect()
    })
}

/// `ln(n! / (n - m)!)`, the log of the falling factorial.
pub fn ln_falling_factorial(n: u64, m: u64) -> f64 {
    debug_assert!(m <= n);
    ln_factorial(n) - ln_factorial(n - m)
}
