//! Zero counts and valency lower bounds on origin-centred disks.
//!
//! Solutions of `f(z) = c` inside `|z| < r` are counted by tracking the
//! continuous argument of `f(z) - c` around the circle `|z| = r`. Sampling
//! doubles until every phase step between neighbouring samples is below
//! `max_phase_step`; the result is only *certified* when the accumulated
//! winding is within `1e-6` of an integer, sampling converged, and no sample
//! came closer to `c` than the guard distance.
//!
//! Phases are computed from scaled mantissas, so magnitudes far outside the
//! `f64` range do not disturb the count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::parallel::{self, Execution};
use crate::scaled::ScaledComplex;
use crate::series::PowerSeries;
use crate::{Error, Result};

const INTEGER_TOLERANCE: f64 = 1e-6;
/// Default guard: this fraction of the largest sampled `|f - c|`.
pub const DEFAULT_RELATIVE_GUARD: f64 = 1e-9;
/// The default guard is never below this multiple of the tail estimate.
const TAIL_GUARD_FACTOR: f64 = 4.0;
const PERTURBATION: f64 = 1e-3;
const DEDUP_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub radius: f64,
    pub initial_samples: usize,
    pub max_samples: usize,
    /// Absolute guard distance. `None` selects the scale-free default
    /// `max(1e-9 * max|f - c|, 4 * tail_bound)`.
    pub min_modulus: Option<f64>,
    pub max_phase_step: f64,
}

impl ContourSpec {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            initial_samples: 1024,
            max_samples: 1 << 20,
            min_modulus: None,
            max_phase_step: PI / 2.0,
        }
    }

    pub fn with_samples(mut self, initial: usize, max: usize) -> Self {
        self.initial_samples = initial;
        self.max_samples = max;
        self
    }

    pub fn with_min_modulus(mut self, m: f64) -> Self {
        self.min_modulus = Some(m);
        self
    }

    pub fn with_max_phase_step(mut self, step: f64) -> Self {
        self.max_phase_step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("contour radius must be positive, got {}", self.radius)));
        }
        if !self.initial_samples.is_power_of_two() || self.initial_samples < 64 {
            return Err(Error::invalid("initial_samples must be a power of two >= 64"));
        }
        if !self.max_samples.is_power_of_two() || self.max_samples < self.initial_samples {
            return Err(Error::invalid("max_samples must be a power of two >= initial_samples"));
        }
        if let Some(m) = self.min_modulus {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::invalid(format!("min_modulus must be positive, got {m}")));
            }
        }
        if !(self.max_phase_step > 0.0 && self.max_phase_step < PI) {
            return Err(Error::invalid("max_phase_step must lie in (0, pi)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub count: i64,
    pub certified: bool,
    /// Total argument change divided by `2 pi`, before rounding.
    pub winding: f64,
    pub samples: usize,
    pub converged: bool,
    pub max_phase_step: f64,
    /// Smallest sampled `|f - c|`.
    pub min_sampled_modulus: f64,
    pub guard: f64,
    pub tail_bound: f64,
}

fn sample(g: &PowerSeries, radius: f64, j: usize, n: usize) -> ScaledComplex {
    let theta = 2.0 * PI * j as f64 / n as f64;
    g.evaluate_scaled(Complex64::from_polar(radius, theta))
}

/// Phase step from `a` to `b`, in `(-pi, pi]`.
fn phase_step(a: &ScaledComplex, b: &ScaledComplex) -> f64 {
    (b.mantissa() * a.mantissa().conj()).arg()
}

/// Number of solutions of `f(z) = c` in `|z| < spec.radius`, with multiplicity.
pub fn winding_number(f: &PowerSeries, c: Complex64, spec: &ContourSpec) -> Result<Winding> {
    spec.validate()?;
    let radius = spec.radius;
    let tail = f.tail_bound(radius);
    if !tail.is_finite() {
        return Err(Error::SeriesNotTrusted { radius });
    }
    if let Some(m) = spec.min_modulus {
        if tail >= m / 2.0 {
            return Err(Error::SeriesNotTrusted { radius });
        }
    }
    let g = f.shifted(c);

    // z^d needs more than 4d samples before a pi/2 step limit can mean anything
    let degree = g.coeffs().iter().rposition(|a| !a.is_zero()).unwrap_or(0);
    let floor = (4 * (degree + 1)).next_power_of_two();
    let mut n = spec.initial_samples.max(floor).min(spec.max_samples);
    let mut values: Vec<ScaledComplex> = (0..n).map(|j| sample(&g, radius, j, n)).collect();
    let (steps, largest) = loop {
        let steps: Vec<f64> = (0..n).map(|j| phase_step(&values[j], &values[(j + 1) % n])).collect();
        let largest = steps.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let any_zero = values.iter().any(ScaledComplex::is_zero);
        if (largest < spec.max_phase_step && !any_zero) || n >= spec.max_samples {
            // converged, or out of budget
            break (steps, largest);
        }
        let m = 2 * n;
        let mut refined = Vec::with_capacity(m);
        for (j, v) in values.iter().enumerate() {
            refined.push(*v);
            refined.push(sample(&g, radius, 2 * j + 1, m));
        }
        values = refined;
        n = m;
    };

    let ln_max = values.iter().map(ScaledComplex::ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let ln_min = values.iter().map(ScaledComplex::ln_abs).fold(f64::INFINITY, f64::min);
    let ln_guard = match spec.min_modulus {
        Some(m) => m.ln(),
        None => (DEFAULT_RELATIVE_GUARD.ln() + ln_max).max((TAIL_GUARD_FACTOR * tail).ln()),
    };
    if ln_min < ln_guard {
        return Err(Error::TargetNearContour { modulus: ln_min.exp(), guard: ln_guard.exp() });
    }
    let winding = steps.iter().sum::<f64>() / (2.0 * PI);
    let count = winding.round();
    let converged = largest < spec.max_phase_step && n >= floor;
    Ok(Winding {
        count: count as i64,
        certified: converged && (winding - count).abs() < INTEGER_TOLERANCE,
        winding,
        samples: n,
        converged,
        max_phase_step: largest,
        min_sampled_modulus: ln_min.exp(),
        guard: ln_guard.exp(),
        tail_bound: tail,
    })
}

/// Zeros of `f` in the disk, with multiplicity.
pub fn count_zeros(f: &PowerSeries, spec: &ContourSpec) -> Result<Winding> {
    winding_number(f, Complex64::new(0.0, 0.0), spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetCount {
    pub c: Complex64,
    pub count: i64,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValencyReport {
    pub radius: f64,
    pub targets: Vec<TargetCount>,
    pub max_count: i64,
    pub grid_description: String,
}

impl ValencyReport {
    pub fn certified_targets(&self) -> impl Iterator<Item = &TargetCount> {
        self.targets.iter().filter(|t| t.certified)
    }
}

/// Base-2 van der Corput radical inverse of `i`.
fn van_der_corput(mut i: u64) -> f64 {
    let mut x = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            x += scale;
        }
        i >>= 1;
        scale *= 0.5;
    }
    x
}

/// Target values `c` sampled from the image of the disk.
///
/// Point `i` is `z_i = r t_i e^{i theta_i}` with `t_i` the van der Corput
/// value of `i + 1` and `theta_i` advancing by the golden angle, so the first
/// `m` points are the same for every `count >= m`. Each image `f(z_i)` is
/// shifted by a seeded random offset of relative size `1e-3`, then targets
/// closer than relative distance `1e-6` to an earlier one are dropped.
pub fn image_targets(f: &PowerSeries, radius: f64, count: usize, seed: u64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut targets: Vec<Complex64> = Vec::with_capacity(count);
    for i in 0..count {
        let t = van_der_corput(i as u64 + 1);
        let z = Complex64::from_polar(radius * t, golden * i as f64);
        // draw before any filtering so the stream stays aligned with i
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let Ok(w) = f.evaluate(z) else { continue };
        let scale = if w.norm() > 0.0 { w.norm() } else { 1.0 };
        let offset = Complex64::from_polar(PERTURBATION * scale * u.sqrt(), 2.0 * PI * v);
        let c = w + offset;
        let duplicate = targets
            .iter()
            .any(|d| (d - c).norm() <= DEDUP_DISTANCE * d.norm().max(c.norm()));
        if !duplicate {
            targets.push(c);
        }
    }
    targets
}

/// Lower bound for the valency of `f` on the disk: the largest certified
/// solution count over a grid of `grid_size^2` image-driven targets.
pub fn valency_lower_bound(
    f: &PowerSeries,
    spec: &ContourSpec,
    grid_size: usize,
    seed: u64,
    exec: Execution,
) -> Result<ValencyReport> {
    spec.validate()?;
    if grid_size == 0 {
        return Err(Error::invalid("grid size must be positive"));
    }
    let targets = image_targets(f, spec.radius, grid_size * grid_size, seed);
    let results = parallel::map(exec, &targets, |&c| match winding_number(f, c, spec) {
        Ok(w) => TargetCount { c, count: w.count, certified: w.certified, error: None },
        Err(e) => TargetCount { c, count: 0, certified: false, error: Some(e.to_string()) },
    });
    let max_count = results
        .iter()
        .filter(|t| t.certified)
        .map(|t| t.count)
        .max()
        .ok_or(Error::NoCertifiedTarget)?;
    Ok(ValencyReport {
        radius: spec.radius,
        targets: results,
        max_count,
        grid_description: format!(
            "{} image targets f(r t e^(i theta)) with t from base-2 van der Corput, theta by golden angle, \
             r = {}, seed {seed}, relative perturbation {PERTURBATION:e}, dedup distance {DEDUP_DISTANCE:e}",
            grid_size * grid_size,
            spec.radius
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build, exponential, ExampleId, ExampleName};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_winding() {
        let f = PowerSeries::monomial(3, 12);
        let w = count_zeros(&f, &ContourSpec::new(1.0)).unwrap();
        assert_eq!(w.count, 3);
        assert!(w.certified);
    }

    #[test]
    fn one_root_inside() {
        let f = PowerSeries::from_roots("p", &[c(0.5, 0.0), c(2.0, 0.0)]);
        let w = count_zeros(&f, &ContourSpec::new(1.0)).unwrap();
        assert_eq!((w.count, w.certified), (1, true));
    }

    #[test]
    fn exp_takes_one_three_times_in_radius_seven() {
        let w = winding_number(&exponential(100), c(1.0, 0.0), &ContourSpec::new(7.0)).unwrap();
        assert_eq!((w.count, w.certified), (3, true));
    }

    #[test]
    fn fp_zero_count() {
        let f = build(&ExampleId::new(ExampleName::Fp, 3, 120)).unwrap();
        let w = count_zeros(&f, &ContourSpec::new(7.0)).unwrap();
        assert_eq!((w.count, w.certified), (6, true));
    }

    #[test]
    fn exp_power_zero_count_with_multiplicity() {
        let f = build(&ExampleId::new(ExampleName::ExpPower, 2, 100)).unwrap().shifted(c(1.0, 0.0));
        let w = count_zeros(&f, &ContourSpec::new(3.0)).unwrap();
        assert_eq!((w.count, w.certified), (6, true));
    }

    #[test]
    fn constant_has_no_zeros() {
        let f = PowerSeries::from_real("k", &[2.5]);
        let w = count_zeros(&f, &ContourSpec::new(4.0)).unwrap();
        assert_eq!((w.count, w.certified), (0, true));
    }

    #[test]
    fn zero_on_contour_is_an_error() {
        let f = PowerSeries::from_roots("p", &[c(1.0, 0.0)]);
        let err = count_zeros(&f, &ContourSpec::new(1.0)).unwrap_err();
        assert!(matches!(err, Error::TargetNearContour { .. }), "{err:?}");
    }

    #[test]
    fn untrusted_series_is_rejected() {
        let f = PowerSeries::from_real("geo", &vec![1.0; 51]);
        let err = count_zeros(&f, &ContourSpec::new(1.5)).unwrap_err();
        assert_eq!(err, Error::SeriesNotTrusted { radius: 1.5 });
        // explicit guard smaller than twice the tail
        let g = PowerSeries::from_real("geo", &vec![1.0; 201]);
        let err = count_zeros(&g, &ContourSpec::new(0.9).with_min_modulus(1e-9)).unwrap_err();
        assert_eq!(err, Error::SeriesNotTrusted { radius: 0.9 });
    }

    #[test]
    fn spec_validation() {
        assert!(ContourSpec::new(1.0).with_samples(100, 1024).validate().is_err());
        assert!(ContourSpec::new(1.0).with_samples(32, 1024).validate().is_err());
        assert!(ContourSpec::new(1.0).with_samples(1024, 512).validate().is_err());
        assert!(ContourSpec::new(-1.0).validate().is_err());
        assert!(ContourSpec::new(1.0).with_max_phase_step(4.0).validate().is_err());
        assert!(ContourSpec::new(1.0).with_min_modulus(0.0).validate().is_err());
    }

    #[test]
    fn refinement_resolves_fast_phase() {
        // z^200 on the unit circle: 2 pi * 200 / 64 per step at first
        let f = PowerSeries::monomial(200, 500);
        let w = count_zeros(&f, &ContourSpec::new(1.0).with_samples(64, 1 << 12)).unwrap();
        assert_eq!((w.count, w.certified), (200, true));
        assert!(w.samples >= 1024);

        let w = count_zeros(&f, &ContourSpec::new(1.0).with_samples(64, 256)).unwrap();
        assert!(!w.certified);
        assert!(!w.converged);
    }

    #[test]
    fn valency_of_exp_in_radius_seven() {
        let f = exponential(100);
        for seed in [0, 1, 42] {
            let r = valency_lower_bound(&f, &ContourSpec::new(7.0), 16, seed, Execution::Parallel).unwrap();
            assert_eq!(r.max_count, 3, "seed {seed}");
        }
    }

    #[test]
    fn valency_of_monomial() {
        let f = PowerSeries::monomial(5, 20);
        let r = valency_lower_bound(&f, &ContourSpec::new(1.0), 8, 0, Execution::Sequential).unwrap();
        assert_eq!(r.max_count, 5);
        assert!(r.certified_targets().all(|t| t.count == 5));
    }

    #[test]
    fn geometric_is_univalent() {
        let f = build(&ExampleId::new(ExampleName::Geometric, 0, 200)).unwrap();
        let r = valency_lower_bound(&f, &ContourSpec::new(0.9), 16, 0, Execution::Parallel).unwrap();
        assert_eq!(r.max_count, 1);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = exponential(80);
        let spec = ContourSpec::new(7.0);
        let a = valency_lower_bound(&f, &spec, 6, 3, Execution::Sequential).unwrap();
        let b = valency_lower_bound(&f, &spec, 6, 3, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn targets_are_prefix_stable() {
        let f = exponential(60);
        let small = image_targets(&f, 5.0, 49, 9);
        let large = image_targets(&f, 5.0, 100, 9);
        assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn van_der_corput_values() {
        assert_eq!(van_der_corput(1), 0.5);
        assert_eq!(van_der_corput(2), 0.25);
        assert_eq!(van_der_corput(3), 0.75);
        assert_eq!(van_der_corput(6), 0.375);
    }
}
