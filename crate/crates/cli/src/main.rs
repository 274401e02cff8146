use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdom_core::borel::{borel, inverse_borel_coeff, inverse_borel_integral, QuadratureSpec};
use tdom_core::bounds::{eta_closed_bounds, eta_scan, q_bound, LOG_BASE_NOTE, RADIUS_NOTE};
use tdom_core::domination::{check_domination, minimal_power_factor, DominationProfile, Shape};
use tdom_core::examples::{borel_counterpart, build, ExampleId, ExampleName, DIVERGENT_MARKER};
use tdom_core::json::{series_from_json, series_to_json};
use tdom_core::parallel::{with_threads, Execution};
use tdom_core::valency::{valency_lower_bound, winding_number, ContourSpec};
use tdom_core::verify::{self, Suite};
use tdom_core::{Complex64, Error, PowerSeries};

mod report;
use report::RunReport;

#[derive(Parser)]
#[command(name = "tdom", version, about = "Taylor domination and valency bounds")]
struct Cli {
    /// Print the report as key,value CSV rows instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Series file in the JSON series format.
    #[arg(long, conflicts_with = "example")]
    series: Option<PathBuf>,
    #[arg(long, value_parser = parse_example)]
    example: Option<ExampleName>,
    #[arg(long, default_value_t = 1)]
    p: u64,
    /// Truncation order; required with --example, pads or truncates a file.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Valency bound q <= 5p + 5 ln(A eta / nu + 2).
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long = "A", default_value_t = 1.0)]
        a: f64,
    },
    /// eta by scan and its two closed-form bounds.
    Eta {
        #[arg(long)]
        p: u64,
        #[arg(long = "R")]
        radius: f64,
    },
    /// Number of solutions of f(z) = c in |z| < r.
    Zeros {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value = "0,0", value_parser = parse_complex, allow_hyphen_values = true)]
        c: Complex64,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = 1 << 20)]
        max_samples: usize,
    },
    /// Lower bound for the valency on |z| < r from a grid of targets.
    Valency {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Smallest domination factor of a series.
    Dominate {
        #[arg(long)]
        series: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long)]
        kmax: usize,
        /// Fit A k^m instead of a constant.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        exclude_a0: bool,
    },
    /// Borel transform, its coefficient inverse, or the integral inverse.
    Borel {
        #[command(flatten)]
        source: Source,
        #[arg(long, conflicts_with = "integral")]
        inverse: bool,
        #[arg(long, requires_all = ["z", "cutoff", "nodes"])]
        integral: bool,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Option<Complex64>,
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a reference series to a file.
    Example {
        #[arg(long, value_parser = parse_example)]
        name: ExampleName,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Also write the checks as CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Contract(String),
    Uncertified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoCertifiedTarget | Error::ScanNotConverged { .. } => Failure::Uncertified(e.to_string()),
            other => Failure::Contract(other.to_string()),
        }
    }
}

type Outcome = Result<(Emit, bool), Failure>;

/// What goes to standard output. `bool` in [`Outcome`] is false when the
/// result is uncertified or a check failed.
enum Emit {
    Report(RunReport),
    Raw(String),
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got '{s}'"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("bad real part: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("bad imaginary part: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_example(s: &str) -> Result<ExampleName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn threads_or_env(threads: Option<usize>) -> Result<Option<usize>, Failure> {
    if threads.is_some() {
        return Ok(threads);
    }
    match std::env::var("TDOM_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("TDOM_THREADS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn is_stdout(path: &Option<PathBuf>) -> bool {
    match path {
        None => true,
        Some(p) => p == Path::new("-") || p == Path::new("/dev/stdout"),
    }
}

fn load(source: &Source, report: &mut RunReport) -> Result<PowerSeries, Failure> {
    let f = match (&source.series, source.example) {
        (Some(path), None) => {
            report.input("series", path.display().to_string());
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Contract(format!("cannot read {}: {e}", path.display())))?;
            let f = series_from_json(&text)?;
            match source.order {
                Some(order) => f.with_order(order),
                None => f,
            }
        }
        (None, Some(name)) => {
            let order = source
                .order
                .ok_or_else(|| Failure::Usage("--order is required with --example".into()))?;
            report.input("example", name.as_str()).input("p", source.p).input("order", order);
            build(&ExampleId::new(name, source.p, order))?
        }
        _ => return Err(Failure::Usage("exactly one of --series or --example is required".into())),
    };
    if f.label().contains(DIVERGENT_MARKER) {
        report.warn(format!("series '{}' diverges for every z != 0; only its coefficients are meaningful", f.label()));
    }
    Ok(f)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Bounds { p, radius, a } => {
            let mut rep = RunReport::new("bounds");
            rep.input("p", p).input("R", radius).input("A", a);
            rep.outputs_from(q_bound(p, radius, a)?);
            rep.warn(LOG_BASE_NOTE).warn(RADIUS_NOTE);
            Ok((Emit::Report(rep), true))
        }
        Command::Eta { p, radius } => {
            let mut rep = RunReport::new("eta");
            rep.input("p", p).input("R", radius);
            let scan = eta_scan(p, radius)?;
            let closed = eta_closed_bounds(p, radius)?;
            rep.outputs_from(scan).outputs_from(closed).output("log_max_closed", closed.log_max());
            Ok((Emit::Report(rep), true))
        }
        Command::Zeros { source, r, c, samples, max_samples } => {
            let mut rep = RunReport::new("zeros");
            let f = load(&source, &mut rep)?;
            rep.input("r", r).input("c", c).input("samples", samples).input("max_samples", max_samples);
            let spec = ContourSpec::new(r).with_samples(samples, max_samples);
            let w = winding_number(&f, c, &spec)?;
            rep.outputs_from(w);
            if !w.certified {
                rep.warn("winding number is not certified");
            }
            Ok((Emit::Report(rep), w.certified))
        }
        Command::Valency { source, r, grid, seed, threads } => {
            let mut rep = RunReport::new("valency");
            let f = load(&source, &mut rep)?;
            rep.input("r", r).input("grid", grid).input("seed", seed);
            let threads = threads_or_env(threads)?;
            if let Some(t) = threads {
                rep.input("threads", t);
            }
            let spec = ContourSpec::new(r);
            let v = with_threads(threads, || valency_lower_bound(&f, &spec, grid, seed, Execution::Parallel))?;
            let certified = v.certified_targets().count();
            rep.outputs_from(&v).output("certified_targets", certified);
            if certified < v.targets.len() {
                rep.warn(format!("{} of {} targets were not certified", v.targets.len() - certified, v.targets.len()));
            }
            Ok((Emit::Report(rep), true))
        }
        Command::Dominate { series, n, radius, kmax, m, exclude_a0 } => {
            let mut rep = RunReport::new("dominate");
            let source = Source { series: Some(series), example: None, p: 1, order: None };
            let f = load(&source, &mut rep)?;
            rep.input("N", n).input("R", radius).input("kmax", kmax).input("exclude_a0", exclude_a0);
            let exponent = m.unwrap_or(0.0);
            let factor = minimal_power_factor(&f, n, radius, exponent, kmax, !exclude_a0)?;
            let shape = match m {
                Some(m) => {
                    rep.input("m", m);
                    Shape::Power { a: factor, m }
                }
                None => Shape::Constant { c: factor },
            };
            let profile = DominationProfile::new(n, radius, shape, !exclude_a0)?;
            let check = check_domination(&f, &profile, kmax)?;
            rep.output("factor", factor).output("shape", shape).output("worst_k", check.worst_k).output("k_range", check.k_range);
            Ok((Emit::Report(rep), true))
        }
        Command::Borel { source, inverse, integral, z, cutoff, nodes, out } => {
            let mut rep = RunReport::new("borel");
            let f = load(&source, &mut rep)?;
            if integral {
                let (z, cutoff, nodes) = (z.unwrap_or_default(), cutoff.unwrap_or(0.0), nodes.unwrap_or(0));
                rep.input("z", z).input("cutoff", cutoff).input("nodes", nodes);
                // the series is trusted exactly as far as the integral reaches
                let spec = QuadratureSpec::new(nodes, cutoff, (z.norm() * cutoff).max(f64::MIN_POSITIVE))?;
                rep.outputs_from(inverse_borel_integral(&f, z, &spec)?);
                return Ok((Emit::Report(rep), true));
            }
            rep.input("inverse", inverse);
            let g = match (inverse, source.example) {
                (false, _) => borel(&f),
                // named examples have exact counterparts, including the divergent one
                (true, Some(name)) => {
                    let id = ExampleId::new(name, source.p, f.order());
                    match borel_counterpart(&id, f.order()) {
                        Ok(g) => g,
                        Err(Error::NoCounterpart(_)) => inverse_borel_coeff(&f),
                        Err(e) => return Err(e.into()),
                    }
                }
                (true, None) => inverse_borel_coeff(&f),
            };
            if g.label().contains(DIVERGENT_MARKER) && !f.label().contains(DIVERGENT_MARKER) {
                rep.warn(format!("series '{}' diverges for every z != 0", g.label()));
            }
            emit_series(rep, &g, &out)
        }
        Command::Example { name, p, order, out } => {
            let mut rep = RunReport::new("example");
            let source = Source { series: None, example: Some(name), p, order: Some(order) };
            let f = load(&source, &mut rep)?;
            emit_series(rep, &f, &out)
        }
        Command::Verify { suite, report, seed, threads } => {
            let mut rep = RunReport::new("verify");
            rep.input("suite", suite.as_str()).input("seed", seed);
            let threads = threads_or_env(threads)?;
            let checks = with_threads(threads, || verify::run(suite, seed, Execution::Parallel));
            let failed = checks.iter().filter(|c| !c.passed).count();
            if let Some(path) = &report {
                fs::write(path, checks_csv(&checks))
                    .map_err(|e| Failure::Contract(format!("cannot write {}: {e}", path.display())))?;
                rep.input("report", path.display().to_string());
            }
            rep.output("checks", &checks).output("passed", checks.len() - failed).output("failed", failed);
            Ok((Emit::Report(rep), failed == 0))
        }
    }
}

fn emit_series(mut rep: RunReport, f: &PowerSeries, out: &Option<PathBuf>) -> Outcome {
    let text = series_to_json(f);
    if is_stdout(out) {
        return Ok((Emit::Raw(text), true));
    }
    let path = out.as_ref().expect("checked above");
    fs::write(path, &text).map_err(|e| Failure::Contract(format!("cannot write {}: {e}", path.display())))?;
    rep.input("out", path.display().to_string())
        .output("label", f.label())
        .output("order", f.order())
        .output("path", path.display().to_string());
    Ok((Emit::Report(rep), true))
}

fn checks_csv(checks: &[verify::Check]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "check", "passed", "measured", "threshold", "detail"]).expect("in-memory write");
    for c in checks {
        let measured = tdom_core::json::format_f64(c.measured);
        let threshold = tdom_core::json::format_f64(c.threshold);
        let passed = c.passed.to_string();
        w.write_record([c.suite, c.name.as_str(), passed.as_str(), measured.as_str(), threshold.as_str(), c.detail.as_str()])
            .expect("in-memory write");
    }
    w.into_inner().expect("flush")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let csv = cli.csv;
    match run(cli) {
        Ok((emit, ok)) => {
            match emit {
                Emit::Raw(text) => println!("{text}"),
                Emit::Report(rep) if csv => print!("{}", rep.to_csv()),
                Emit::Report(rep) => println!("{}", rep.to_json()),
            }
            ExitCode::from(if ok { 0 } else { 3 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Uncertified(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
