//! Acceptance criteria, one PASS/FAIL line each. Oracles here are computed
//! independently of the library wherever that is possible: exact rationals,
//! brute-force enumeration, and constructed root sets.

use std::f64::consts::{E, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdom_core::borel::{borel, inverse_borel_integral, QuadratureSpec};
use tdom_core::bounds::{eta_scan, nu, q_bound, ry_zero_bound};
use tdom_core::domination::{minimal_constant, minimal_power_factor};
use tdom_core::examples::{analytic_solutions, build, exponential, ExampleId, ExampleName};
use tdom_core::parallel::Execution;
use tdom_core::valency::{count_zeros, valency_lower_bound, winding_number, ContourSpec};
use tdom_core::{Complex64, PowerSeries, ScaledComplex};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn disk_point(rng: &mut impl Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>())
}

/// `ln(k^(2p-1) R^k / k!)` summed term by term.
fn brute_log_eta(p: u64, r: f64) -> (f64, u64) {
    let mut ln_fact = 0.0;
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 1..=5000u64 {
        ln_fact += (k as f64).ln();
        if k <= p {
            continue;
        }
        let term = (2 * p - 1) as f64 * (k as f64).ln() + k as f64 * r.ln() - ln_fact;
        if term > best.0 + 1e-12 {
            best = (term, k);
        }
    }
    best
}

fn criterion_1() -> Outcome {
    let q = q_bound(1, 1.0, 1.0).map_err(|e| e.to_string())?.q;
    ensure((q - (5.0 + 5.0 * 3f64.ln())).abs() <= 1e-9, || format!("q(1,1,1) = {q}"))?;
    // k 4^k / k! as exact rationals num / den; k = 4 and k = 5 tie at 128/3
    let term = |k: u64| -> (u128, u128) { (k as u128 * 4u128.pow(k as u32), (1..=k as u128).product()) };
    let first_max = (2..=30u64)
        .reduce(|best, k| {
            let ((a, b), (c, d)) = (term(best), term(k));
            if c * b > a * d { k } else { best }
        })
        .unwrap();
    let (num, den) = term(first_max);
    ensure(first_max == 4 && num * 3 == den * 128, || format!("enumeration gives k = {first_max}"))?;
    let s = eta_scan(1, 4.0).map_err(|e| e.to_string())?;
    let exact = 128.0 / 3.0;
    ensure(s.argmax_k == first_max && (s.log_eta.exp() - exact).abs() <= 1e-12 * exact, || format!("eta(1,4) = {:?}", s))?;
    // min{2, 2^3 / 3!} = 4/3
    let v = nu(3, 2.0).map_err(|e| e.to_string())?;
    ensure((v - (4.0f64 / 3.0).ln()).abs() <= 1e-15, || format!("ln nu(3,2) = {v}"))?;
    let b = ry_zero_bound(1, E - 2.0).map_err(|e| e.to_string())?.bound;
    ensure((b - 10.0).abs() <= 1e-9, || format!("zero bound = {b}"))?;
    Ok(format!("q = {q:.6}, eta(1,4) = {:.6} at k = 4, bound = {b:.12}", s.log_eta.exp()))
}

fn criterion_2() -> Outcome {
    let mut worst_gap = f64::NEG_INFINITY;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in 1..=30u64 {
        for r in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
            let rep = q_bound(p, r, 1.0).map_err(|e| e.to_string())?;
            let (brute, k) = brute_log_eta(p, r);
            ensure((rep.log_eta - brute).abs() <= 1e-9 && rep.eta_argmax_k == k, || {
                format!("eta scan mismatch at p={p} R={r}: {} at {} vs {brute} at {k}", rep.log_eta, rep.eta_argmax_k)
            })?;
            worst_gap = worst_gap.max(rep.log_eta - rep.log_eta1_bound.max(rep.log_eta2_bound));
            let envelope = p as f64 * (1.0 + (p as f64).ln() + r.ln()) + r;
            lo = lo.min(rep.q / envelope);
            hi = hi.max(rep.q / envelope);
        }
    }
    ensure(worst_gap <= 1e-9, || format!("log_eta exceeds closed bounds by {worst_gap}"))?;
    ensure(lo > 0.0 && hi <= 20.0, || format!("ratio range [{lo}, {hi}]"))?;
    Ok(format!("max log gap {worst_gap:.4}, ratio in [{lo:.4}, {hi:.4}]"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = ContourSpec::new(1.0);
    let mut agree = 0;
    for i in 0..500 {
        let degree = rng.random_range(1..=12);
        let mut roots = Vec::new();
        while roots.len() < degree {
            let z = disk_point(&mut rng, 2.0);
            if (z.norm() - 1.0).abs() > 0.05 {
                roots.push(z);
            }
        }
        let inside = roots.iter().filter(|z| z.norm() < 1.0).count() as i64;
        let w = count_zeros(&PowerSeries::from_roots("random", &roots), &spec)
            .map_err(|e| format!("polynomial {i}: {e}"))?;
        ensure(w.certified && w.count == inside, || {
            format!("polynomial {i}: winding {} (certified {}), constructed {inside}", w.count, w.certified)
        })?;
        agree += 1;
    }
    Ok(format!("{agree}/500 certified agreements"))
}

fn criterion_4() -> Outcome {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // e^z = 1: z = 2 pi i k with 2 pi |k| < r
    let exp_count = |r: f64| (-10i64..=10).filter(|k| 2.0 * PI * (*k as f64).abs() < r).count();
    let mut lines = Vec::new();
    let geometric = ExampleId::new(ExampleName::Geometric, 0, 100);
    for (r, expected) in [(5.0, 1usize), (10.0, 3), (20.0, 7)] {
        ensure(exp_count(r) == expected, || format!("enumeration for r = {r}"))?;
        let sols = analytic_solutions(&geometric, one, r).map_err(|e| e.to_string())?;
        ensure(sols.len() == expected, || format!("oracle e^z = 1, r = {r}: {}", sols.len()))?;
        let w = count_zeros(&exponential(100).shifted(one), &ContourSpec::new(r)).map_err(|e| e.to_string())?;
        ensure(w.certified && w.count as usize == expected, || format!("e^z - 1 at r = {r}: {w:?}"))?;
        lines.push(format!("e^z-1@{r}={}", w.count));
    }
    // f_3: cube roots of unity plus 2 pi i k with |k| <= 1 inside r = 7
    let fp = ExampleId::new(ExampleName::Fp, 3, 120);
    let expected = 3 + exp_count(7.0);
    let sols = analytic_solutions(&fp, zero, 7.0).map_err(|e| e.to_string())?;
    ensure(sols.len() == expected, || format!("oracle f_3: {}", sols.len()))?;
    let w = winding_number(&build(&fp).map_err(|e| e.to_string())?, zero, &ContourSpec::new(7.0))
        .map_err(|e| e.to_string())?;
    ensure(w.certified && w.count as usize == expected, || format!("f_3 at r = 7: {w:?}"))?;
    lines.push(format!("f_3@7={}", w.count));
    // e^{z^2} = 1: z = 0 twice, z^2 = +-2 pi i with |z| = sqrt(2 pi) < 3 < sqrt(4 pi)
    let h = ExampleId::new(ExampleName::ExpPower, 2, 100);
    ensure((2.0 * PI).sqrt() < 3.0 && (4.0 * PI).sqrt() > 3.0, || "enumeration for e^(z^2)".into())?;
    let sols = analytic_solutions(&h, one, 3.0).map_err(|e| e.to_string())?;
    ensure(sols.len() == 6, || format!("oracle e^(z^2) = 1: {}", sols.len()))?;
    let w = winding_number(&build(&h).map_err(|e| e.to_string())?, one, &ContourSpec::new(3.0))
        .map_err(|e| e.to_string())?;
    ensure(w.certified && w.count == 6, || format!("e^(z^2) - 1 at r = 3: {w:?}"))?;
    lines.push(format!("e^(z^2)-1@3={}", w.count));
    let g = build(&ExampleId::new(ExampleName::Geometric, 0, 200)).map_err(|e| e.to_string())?;
    let v = valency_lower_bound(&g, &ContourSpec::new(0.9), 16, 0, Execution::Parallel).map_err(|e| e.to_string())?;
    ensure(v.max_count == 1, || format!("geometric valency {}", v.max_count))?;
    lines.push(format!("geometric valency@0.9={}", v.max_count));
    Ok(lines.join(", "))
}

fn criterion_5() -> Outcome {
    let ones = PowerSeries::from_real("ones", &[1.0; 201]);
    let b = borel(&ones);
    let exact = (0..=200).all(|k| b.coeff(k) == exponential(200).coeff(k));
    ensure(exact, || "borel(all-ones) differs from 1/k!".into())?;
    // 1/k! built independently: exact for k <= 22, and 21! * (21!)^-1 stays at 1
    for k in 0..=22u64 {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        let x = b.coeff(k as usize).to_complex().re;
        ensure((x * fact - 1.0).abs() <= 2.0 * f64::EPSILON, || format!("1/{k}! = {x}"))?;
    }
    let mut worst = 0.0f64;
    for p in 1..=6 {
        let tilde = build(&ExampleId::new(ExampleName::FpTilde, p, 200)).map_err(|e| e.to_string())?;
        let fp = build(&ExampleId::new(ExampleName::Fp, p, 200)).map_err(|e| e.to_string())?;
        let bt = borel(&tilde);
        for k in 0..=200 {
            let (x, y) = (bt.coeff(k), fp.coeff(k));
            let s = x.abs().max(y.abs());
            if s > 0.0 {
                worst = worst.max((x - y).abs() / s);
            }
        }
    }
    ensure(worst <= 1e-14, || format!("borel(fp_tilde) vs fp: {worst:e}"))?;
    let g = exponential(200);
    let mut err = 0.0f64;
    for z in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0), Complex64::new(0.25, 0.25)] {
        let spec = QuadratureSpec::new(64, 40.0, 20.0).map_err(|e| e.to_string())?;
        let v = inverse_borel_integral(&g, z, &spec).map_err(|e| e.to_string())?.value;
        err = err.max((v - 1.0 / (1.0 - z)).norm());
    }
    ensure(err <= 1e-8, || format!("integral error {err:e}"))?;
    Ok(format!("exact 1/k!, fp relative {worst:.2e}, integral {err:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut fits = Vec::new();
    for p in 1..=6u64 {
        let f = build(&ExampleId::new(ExampleName::FpTilde, p, 400)).map_err(|e| e.to_string())?;
        let a = minimal_power_factor(&f, p as usize, 0.999, p as f64, 400, false).map_err(|e| e.to_string())?;
        ensure(a <= 1.1, || format!("fp_tilde({p}) fit {a}"))?;
        fits.push(format!("{a:.3}"));
    }
    let koebe = build(&ExampleId::new(ExampleName::Koebe, 0, 300)).map_err(|e| e.to_string())?;
    let a = minimal_power_factor(&koebe, 1, 0.99, 1.0, 300, false).map_err(|e| e.to_string())?;
    ensure((a - 0.99).abs() <= 1e-12, || format!("koebe fit {a}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let order = rng.random_range(8..=80usize);
        let coeffs: Vec<ScaledComplex> = (0..=order)
            .map(|_| {
                let z = disk_point(&mut rng, 1.0);
                ScaledComplex::from_parts(z.re, z.im, rng.random_range(-20..=20)).expect("finite")
            })
            .collect();
        let f = PowerSeries::new("random", coeffs);
        let n = rng.random_range(1..order / 2);
        let r = 0.25 * 16f64.powf(rng.random::<f64>());
        let scaled = f.scale_var(r).map_err(|e| e.to_string())?;
        let x = minimal_constant(&f, n, r, order, true).map_err(|e| e.to_string())?;
        let y = minimal_constant(&scaled, n, 1.0, order, true).map_err(|e| e.to_string())?;
        worst = worst.max((x - y).abs() / x.max(y));
    }
    ensure(worst <= 1e-12, || format!("scaling invariance {worst:e}"))?;
    Ok(format!("fp_tilde fits [{}], koebe {a:.12}, scaling {worst:.1e}", fits.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut slack = f64::INFINITY;
    for i in 0..200 {
        let d = rng.random_range(1..=12);
        let roots: Vec<Complex64> = (0..d).map(|_| disk_point(&mut rng, 0.2)).collect();
        let f = PowerSeries::from_roots("small", &roots);
        let c = minimal_constant(&f, 0, 1.0, f.order(), true).map_err(|e| e.to_string())?;
        let bound = ry_zero_bound(0, c).map_err(|e| e.to_string())?.bound;
        ensure(d as f64 <= bound, || format!("polynomial {i}: {d} roots > bound {bound}"))?;
        slack = slack.min(bound - d as f64);
    }
    Ok(format!("200 polynomials, smallest slack {slack:.3}"))
}

fn criterion_8() -> Outcome {
    let dir = std::env::temp_dir().join(format!("tdom-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let report = dir.join("report.csv");
    let run = || -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_tdom"))
            .args(["verify", "--suite", "all", "--seed", "0", "--report"])
            .arg(&report)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("verify exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)))?;
        Ok((out.stdout, std::fs::read(&report).map_err(|e| e.to_string())?))
    };
    let (a, ra) = run()?;
    let (b, rb) = run()?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(a == b, || "stdout reports differ".into())?;
    ensure(ra == rb, || "CSV reports differ".into())?;
    Ok(format!("{} bytes JSON, {} bytes CSV, identical", a.len(), ra.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bound pipeline values", criterion_1, Duration::from_secs(1)),
        ("proof-chain envelope", criterion_2, Duration::from_secs(5)),
        ("winding oracle equivalence", criterion_3, Duration::from_secs(30)),
        ("example solution counts", criterion_4, Duration::from_secs(60)),
        ("Borel structure", criterion_5, Duration::from_secs(5)),
        ("domination fits", criterion_6, Duration::from_secs(10)),
        ("zero-count bound on random polynomials", criterion_7, Duration::from_secs(10)),
        ("determinism of verify", criterion_8, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {elapsed:.2?})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
