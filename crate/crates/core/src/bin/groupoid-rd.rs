//! Command-line surface: loads groupoids, lengths, cocycles, functions,
//! and metric spaces (from JSON files or `builtin:` specs), runs the
//! norm/seminorm/scan/witness/permanence machinery, and writes CSV
//! reports with a `<out>.manifest` sidecar recording input digests,
//! seeds, and tolerances.
//!
//! Exit codes: 0 when the command passes, 2 when a check fails, 1 on
//! any input or runtime error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use groupoid_rd::algebra::{reduced_norm_report, weighted_seminorm, GFunction, SeminormMode};
use groupoid_rd::error::{Error, Result};
use groupoid_rd::families::DichotomyFamily;
use groupoid_rd::groupoid::{ArrowId, Groupoid, GroupoidHom};
use groupoid_rd::io;
use groupoid_rd::length::{growth_profile, LengthFunction};
use groupoid_rd::metric::{
    metric_dichotomy, mrd_scan_with, space_growth, FiniteMetricSpace, MRDScanConfig, MetricFamily,
    SpaceFamily,
};
use groupoid_rd::permanence::{
    check_product, check_pullback, check_rd_transfer, check_subgroupoid, PermanenceReport,
    EXACT_TOL, NORM_INEQ_TOL,
};
use groupoid_rd::rd::{rd_scan_with, witness_construct, ScanConfig, TestFamily, CERT_TOL};
use groupoid_rd::report::{write_csv, Manifest, ScanRow};
use groupoid_rd::twist::Cocycle;

/// `say!` that stays quiet when stdout is closed early (e.g. the
/// output is piped into `head`) instead of panicking on EPIPE.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Rapid-decay analysis on finite twisted groupoids.
#[derive(Parser)]
#[command(name = "groupoid-rd", version)]
struct Cli {
    /// Worker threads for parallel sections; defaults to the available
    /// parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load inputs and report axiom violations.
    Validate(ValidateArgs),
    /// Print summary statistics for loaded inputs.
    Info(InfoArgs),
    /// Ball-count growth table with its fitted exponent.
    Growth(GrowthArgs),
    /// Reduced C*-norm of a function, one row per computed fiber.
    Norm(NormArgs),
    /// Length-weighted decay seminorm of a function.
    Seminorm(SeminormArgs),
    /// Max RD ratio over a deterministic test-function family.
    RdScan(RdScanArgs),
    /// Build a ball witness and check its certified bounds.
    Witness(WitnessArgs),
    /// Growth/scan/witness dichotomy experiment over a family.
    Dichotomy(DichotomyArgs),
    /// Permanence checks: subgroupoid, product, pullback, transfer.
    #[command(subcommand)]
    CheckPermanence(PermanenceCmd),
    /// Roe-algebra RD scan on a finite metric space.
    MetricRd(MetricRdArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: Option<String>,
    /// Length file or inline spec; needs --groupoid.
    #[arg(long)]
    length: Option<String>,
    /// Cocycle file or inline spec; needs --groupoid.
    #[arg(long)]
    cocycle: Option<String>,
    /// Function file; needs --groupoid.
    #[arg(long)]
    function: Option<PathBuf>,
    /// Homomorphism file; needs --domain and --groupoid (the codomain).
    #[arg(long)]
    hom: Option<PathBuf>,
    /// Domain groupoid for --hom.
    #[arg(long)]
    domain: Option<String>,
    /// Metric-space file or builtin spec.
    #[arg(long)]
    space: Option<String>,
}

#[derive(Args)]
struct InfoArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: Option<String>,
    /// Length file or inline spec; needs --groupoid.
    #[arg(long)]
    length: Option<String>,
    /// Cocycle file or inline spec; needs --groupoid.
    #[arg(long)]
    cocycle: Option<String>,
    /// Metric-space file or builtin spec.
    #[arg(long)]
    space: Option<String>,
}

#[derive(Args)]
struct GrowthArgs {
    /// Groupoid file or builtin spec (with --length).
    #[arg(long, conflicts_with = "space", required_unless_present = "space")]
    groupoid: Option<String>,
    /// Length file or inline spec.
    #[arg(long, requires = "groupoid")]
    length: Option<String>,
    /// Metric-space file or builtin spec.
    #[arg(long)]
    space: Option<String>,
    /// Comma-separated radius grid; defaults to integer radii up to
    /// half the diameter, clamped to [2, 10].
    #[arg(long)]
    radii: Option<String>,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NormArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Function file.
    #[arg(long)]
    function: PathBuf,
    /// Cocycle file or inline spec.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SeminormArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Function file.
    #[arg(long)]
    function: PathBuf,
    /// Length file or inline spec.
    #[arg(long)]
    length: String,
    /// Decay exponent (must be >= 0).
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// symmetric | sup | unit:<id>
    #[arg(long, default_value = "symmetric")]
    mode: String,
}

#[derive(Args)]
struct RdScanArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Length file or inline spec.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Comma-separated decay exponents.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// balls | random | witness
    #[arg(long)]
    family: String,
    /// Function count for the random family.
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Cap on sampled units for the ball and witness families.
    #[arg(long, default_value_t = 32)]
    max_units: usize,
    /// Explicit comma-separated radius grid for ball and witness
    /// families; defaults to quantiles of the observed lengths.
    #[arg(long)]
    radii: Option<String>,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WitnessArgs {
    /// Groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Length file or inline spec.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Unit arrow id at which the ball witness is built.
    #[arg(long)]
    unit: ArrowId,
    /// Ball radius.
    #[arg(long)]
    radius: f64,
    /// Comma-separated decay exponents.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// Slack allowed when re-checking the certified bounds.
    #[arg(long, default_value_t = CERT_TOL)]
    cert_tol: f64,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DichotomyArgs {
    /// Groupoid side: paths | trees | cycles. Metric side (--metric):
    /// paths | grids | trees.
    #[arg(long)]
    family: String,
    /// Comma-separated size parameters (points, depth, or order).
    #[arg(long)]
    sizes: String,
    /// Comma-separated decay exponents.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Run the metric mirror (Roe kernels) instead of the groupoid side.
    #[arg(long)]
    metric: bool,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum PermanenceCmd {
    /// Restriction to the full subgroupoid on chosen units.
    Subgroupoid(SubgroupoidArgs),
    /// Product with a finite groupoid via a bisection cover.
    Product(ProductArgs),
    /// Isometric lift along an n-regular surjection.
    Pullback(PullbackArgs),
    /// RD-constant transfer along an n-regular surjection.
    Transfer(TransferArgs),
}

#[derive(Args)]
struct SubgroupoidArgs {
    /// Ambient groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Comma-separated unit ids kept by the restriction.
    #[arg(long)]
    units: String,
    /// Function file; its support must stay inside the restriction.
    #[arg(long)]
    function: PathBuf,
    /// Length file or inline spec.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Decay exponent.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// Optional output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProductArgs {
    /// Left-factor groupoid (carries the cocycle and length).
    #[arg(long)]
    groupoid: String,
    /// Right-factor groupoid file or builtin spec.
    #[arg(long)]
    other: String,
    /// Length file or inline spec on the left factor.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec on the left factor.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Function file on the product groupoid.
    #[arg(long)]
    function: PathBuf,
    /// RD constant of the left factor at exponent t.
    #[arg(long)]
    constant: f64,
    /// Decay exponent.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// Optional output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PullbackArgs {
    /// Covering (domain) groupoid file or builtin spec.
    #[arg(long)]
    domain: String,
    /// Base (codomain) groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Homomorphism file mapping domain arrows to base arrows.
    #[arg(long)]
    hom: PathBuf,
    /// Length file or inline spec on the base.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec on the base.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Function file on the base.
    #[arg(long)]
    function: PathBuf,
    /// Decay exponent.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// Optional output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransferArgs {
    /// Covering (domain) groupoid file or builtin spec.
    #[arg(long)]
    domain: String,
    /// Base (codomain) groupoid file or builtin spec.
    #[arg(long)]
    groupoid: String,
    /// Homomorphism file mapping domain arrows to base arrows.
    #[arg(long)]
    hom: PathBuf,
    /// Length file or inline spec on the base.
    #[arg(long)]
    length: String,
    /// Cocycle file or inline spec on the base.
    #[arg(long, default_value = "trivial")]
    cocycle: String,
    /// Function file on the base.
    #[arg(long)]
    function: PathBuf,
    /// RD constant of the pulled-back data on the domain at exponent t.
    #[arg(long)]
    constant: f64,
    /// Decay exponent.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// Optional output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricRdArgs {
    /// Metric-space file or builtin spec.
    #[arg(long)]
    space: String,
    /// Comma-separated decay exponents.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// balls | random
    #[arg(long)]
    family: String,
    /// Kernel count for the random family.
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Cap on sampled centers for the ball family.
    #[arg(long, default_value_t = 32)]
    max_centers: usize,
    /// Explicit comma-separated radius grid for the ball family;
    /// defaults to quantiles of the observed distances.
    #[arg(long)]
    radii: Option<String>,
    /// Output CSV path; the manifest lands at <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let workers = cli.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(std::num::NonZeroUsize::get)
            .unwrap_or(1)
    });
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .ok();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Info(a) => cmd_info(a),
        Command::Growth(a) => cmd_growth(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Seminorm(a) => cmd_seminorm(a),
        Command::RdScan(a) => cmd_rd_scan(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Dichotomy(a) => cmd_dichotomy(a),
        Command::CheckPermanence(cmd) => cmd_check_permanence(cmd),
        Command::MetricRd(a) => cmd_metric_rd(a),
    }
}

// ------------------------------------------------------------ helpers

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("{what} entry {part:?} is not a number")))
        })
        .collect()
}

fn parse_u32_list(s: &str, what: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::Schema(format!("{what} entry {part:?} is not an id")))
        })
        .collect()
}

fn guard_t_grid(ts: &[f64]) -> Result<()> {
    for &t in ts {
        if t < 0.0 {
            return Err(Error::NegativeT(t));
        }
    }
    Ok(())
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn manifest_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest", out.display()))
}

fn record_groupoid(
    spec: &str,
    name: &str,
    manifest: &mut Manifest,
) -> Result<(Groupoid, Option<Arc<FiniteMetricSpace>>)> {
    let loaded = io::resolve_groupoid(spec)?;
    if io::is_builtin_spec(spec) {
        manifest.record_inline_input(name, spec);
    } else {
        manifest.record_input(name, Path::new(spec))?;
    }
    Ok(loaded)
}

fn record_length(
    spec: &str,
    g: &Groupoid,
    metric: Option<&Arc<FiniteMetricSpace>>,
    manifest: &mut Manifest,
) -> Result<LengthFunction> {
    let l = io::resolve_length(spec, g, metric)?;
    if io::is_inline_length_spec(spec) {
        manifest.record_inline_input("length", spec);
    } else {
        manifest.record_input("length", Path::new(spec))?;
    }
    Ok(l)
}

fn record_cocycle(spec: &str, g: &Groupoid, manifest: &mut Manifest) -> Result<Cocycle> {
    let sigma = io::resolve_cocycle(spec, g)?;
    if io::is_inline_cocycle_spec(spec) {
        manifest.record_inline_input("cocycle", spec);
    } else {
        manifest.record_input("cocycle", Path::new(spec))?;
    }
    Ok(sigma)
}

fn record_function(path: &Path, g: &Groupoid, manifest: &mut Manifest) -> Result<GFunction> {
    let f = io::load_function(path, g)?;
    manifest.record_input("function", path)?;
    Ok(f)
}

fn record_space(spec: &str, manifest: &mut Manifest) -> Result<FiniteMetricSpace> {
    let space = io::resolve_space(spec)?;
    if io::is_builtin_spec(spec) {
        manifest.record_inline_input("space", spec);
    } else {
        manifest.record_input("space", Path::new(spec))?;
    }
    Ok(space)
}

fn record_hom(
    path: &Path,
    dom: &Groupoid,
    cod: &Groupoid,
    manifest: &mut Manifest,
) -> Result<GroupoidHom> {
    let hom = io::load_hom(path, dom)?;
    let violations = hom.validate(dom, cod);
    if !violations.is_empty() {
        return Err(Error::validation("homomorphism", violations));
    }
    manifest.record_input("hom", path)?;
    Ok(hom)
}

fn integer_radii(limit: f64) -> Vec<f64> {
    let rmax = ((limit / 2.0).floor() as u64).clamp(2, 10);
    (1..=rmax).map(|r| r as f64).collect()
}

// ----------------------------------------------------------- commands

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let mut exit = 0;
    let mut saw_input = false;
    let print_invalid = |name: &str, subject: &str, violations: &[groupoid_rd::Violation]| {
        say!(
            "invalid: {name} ({subject}, {} violation(s))",
            violations.len()
        );
        for v in violations {
            say!("  {v}");
        }
    };

    let mut loaded: Option<(Groupoid, Option<Arc<FiniteMetricSpace>>)> = None;
    if let Some(spec) = &a.groupoid {
        saw_input = true;
        match io::resolve_groupoid(spec) {
            Ok((g, metric)) => {
                say!(
                    "ok: groupoid ({} unit(s), {} arrow(s))",
                    g.num_units(),
                    g.num_arrows()
                );
                loaded = Some((g, metric));
            }
            Err(Error::Validation {
                subject,
                violations,
            }) => {
                print_invalid("groupoid", subject, &violations);
                exit = 2;
            }
            Err(e) => return Err(e),
        }
    }

    let dependent: [(&str, bool); 3] = [
        ("length", a.length.is_some()),
        ("cocycle", a.cocycle.is_some()),
        ("function", a.function.is_some()),
    ];
    for (name, requested) in dependent {
        if requested && a.groupoid.is_none() {
            return Err(Error::Schema(format!("--{name} needs --groupoid")));
        }
    }
    if let Some((g, metric)) = &loaded {
        if let Some(spec) = &a.length {
            saw_input = true;
            match io::resolve_length(spec, g, metric.as_ref()) {
                Ok(_) => say!("ok: length"),
                Err(Error::Validation {
                    subject,
                    violations,
                }) => {
                    print_invalid("length", subject, &violations);
                    exit = 2;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(spec) = &a.cocycle {
            saw_input = true;
            match io::resolve_cocycle(spec, g) {
                Ok(_) => say!("ok: cocycle"),
                Err(Error::Validation {
                    subject,
                    violations,
                }) => {
                    print_invalid("cocycle", subject, &violations);
                    exit = 2;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(path) = &a.function {
            saw_input = true;
            io::load_function(path, g)?;
            say!("ok: function");
        }
        if let Some(path) = &a.hom {
            saw_input = true;
            let dom_spec = a
                .domain
                .as_deref()
                .ok_or_else(|| Error::Schema("--hom needs --domain".into()))?;
            let (dom, _) = io::resolve_groupoid(dom_spec)?;
            let hom = io::load_hom(path, &dom)?;
            let violations = hom.validate(&dom, g);
            if violations.is_empty() {
                say!("ok: hom");
            } else {
                print_invalid("hom", "homomorphism", &violations);
                exit = 2;
            }
        }
    } else if a.hom.is_some() {
        return Err(Error::Schema("--hom needs --groupoid as codomain".into()));
    }

    if let Some(spec) = &a.space {
        saw_input = true;
        match io::resolve_space(spec) {
            Ok(s) => say!("ok: space ({} point(s))", s.len()),
            Err(Error::Validation {
                subject,
                violations,
            }) => {
                print_invalid("space", subject, &violations);
                exit = 2;
            }
            Err(e) => return Err(e),
        }
    }

    if !saw_input {
        return Err(Error::Schema(
            "nothing to validate; pass --groupoid, --space, or companions".into(),
        ));
    }
    say!("{}", if exit == 0 { "PASS" } else { "FAIL" });
    Ok(exit)
}

fn cmd_info(a: InfoArgs) -> Result<i32> {
    let mut saw_input = false;
    if let Some(spec) = &a.groupoid {
        saw_input = true;
        let (g, metric) = io::resolve_groupoid(spec)?;
        say!(
            "groupoid: units={} arrows={}",
            g.num_units(),
            g.num_arrows()
        );
        if let Some(n) = g.pair_points() {
            say!("groupoid: pair groupoid of {n} point(s)");
        }
        if let Some(lspec) = &a.length {
            let l = io::resolve_length(lspec, &g, metric.as_ref())?;
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for arrow in 0..g.num_arrows() as ArrowId {
                let v = l.value(arrow);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            say!("length: min={lo} max={hi}");
        }
        if let Some(cspec) = &a.cocycle {
            let sigma = io::resolve_cocycle(cspec, &g)?;
            let kind = match &sigma {
                Cocycle::Trivial => "trivial".to_owned(),
                Cocycle::Table { entries, .. } => {
                    format!("table with {} entry(ies)", entries.len())
                }
                Cocycle::Coboundary(_) => "coboundary".to_owned(),
            };
            say!("cocycle: {kind}");
        }
    } else if a.length.is_some() || a.cocycle.is_some() {
        return Err(Error::Schema("--length/--cocycle need --groupoid".into()));
    }
    if let Some(spec) = &a.space {
        saw_input = true;
        let s = io::resolve_space(spec)?;
        say!("space: points={} diameter={}", s.len(), s.diameter());
    }
    if !saw_input {
        return Err(Error::Schema(
            "nothing to inspect; pass --groupoid or --space".into(),
        ));
    }
    Ok(0)
}

fn cmd_growth(a: GrowthArgs) -> Result<i32> {
    let mut manifest = Manifest::new();
    manifest.set("command", "growth");
    if let Some(spec) = &a.space {
        let space = record_space(spec, &mut manifest)?;
        let radii = match &a.radii {
            Some(s) => parse_f64_list(s, "radii")?,
            None => integer_radii(space.diameter()),
        };
        manifest.set("radii", join_f64(&radii));
        let growth = space_growth(&space, &radii)?;
        manifest.set("rows", growth.rows.len());
        write_csv(&a.out, &growth.rows)?;
        manifest.write(&manifest_path(&a.out))?;
        say!("growth_exponent={}", growth.exponent);
        return Ok(0);
    }
    let spec = a.groupoid.as_deref().expect("clap enforces the pair");
    let (g, metric) = record_groupoid(spec, "groupoid", &mut manifest)?;
    let lspec = a
        .length
        .as_deref()
        .ok_or_else(|| Error::Schema("--length is required with --groupoid".into()))?;
    let l = record_length(lspec, &g, metric.as_ref(), &mut manifest)?;
    let radii = match &a.radii {
        Some(s) => parse_f64_list(s, "radii")?,
        None => {
            let limit = match l.metric_space() {
                Some(space) => space.diameter(),
                None => (0..g.num_arrows() as ArrowId)
                    .map(|arrow| l.value(arrow))
                    .fold(0.0f64, f64::max),
            };
            integer_radii(limit)
        }
    };
    manifest.set("radii", join_f64(&radii));
    let profile = growth_profile(&g, &l, &radii)?;
    manifest.set("rows", profile.rows.len());
    write_csv(&a.out, &profile.rows)?;
    manifest.write(&manifest_path(&a.out))?;
    say!("growth_exponent={}", profile.exponent);
    Ok(0)
}

fn cmd_norm(a: NormArgs) -> Result<i32> {
    let mut manifest = Manifest::new();
    manifest.set("command", "norm");
    let (g, _) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
    let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
    let f = record_function(&a.function, &g, &mut manifest)?;
    let report = reduced_norm_report(&g, &f, &sigma)?;
    manifest.set("rows", report.rows.len());
    write_csv(&a.out, &report.rows)?;
    manifest.write(&manifest_path(&a.out))?;
    say!("reduced_norm={}", report.value);
    Ok(0)
}

fn cmd_seminorm(a: SeminormArgs) -> Result<i32> {
    guard_t_grid(&[a.t])?;
    let (g, metric) = io::resolve_groupoid(&a.groupoid)?;
    let l = io::resolve_length(&a.length, &g, metric.as_ref())?;
    let f = io::load_function(&a.function, &g)?;
    let mode = match a.mode.as_str() {
        "symmetric" => SeminormMode::Symmetric,
        "sup" => SeminormMode::SupSource,
        other => match other.strip_prefix("unit:").and_then(|id| id.parse().ok()) {
            Some(x) => SeminormMode::AtUnit(x),
            None => {
                return Err(Error::Schema(format!(
                    "unknown seminorm mode {other:?}; expected symmetric, sup, or unit:<id>"
                )))
            }
        },
    };
    let value = weighted_seminorm(&g, &f, &l, a.t, mode)?;
    say!("seminorm={value}");
    Ok(0)
}

fn cmd_rd_scan(a: RdScanArgs) -> Result<i32> {
    let ts = parse_f64_list(&a.t, "t")?;
    guard_t_grid(&ts)?;
    let family = TestFamily::parse(&a.family)?;
    let mut manifest = Manifest::new();
    manifest.set("command", "rd-scan");
    manifest.set("t", join_f64(&ts));
    manifest.set("family", family.name());
    manifest.set("trials", a.trials);
    manifest.set("seed", a.seed);
    manifest.set("max_units", a.max_units);
    let (g, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
    let l = record_length(&a.length, &g, metric.as_ref(), &mut manifest)?;
    let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
    let radii = a
        .radii
        .as_deref()
        .map(|s| parse_f64_list(s, "radii"))
        .transpose()?;
    if let Some(r) = &radii {
        manifest.set("radii", join_f64(r));
    }
    let config = ScanConfig {
        trials: a.trials,
        seed: a.seed,
        max_units: a.max_units,
        radii,
    };
    let mut rows = Vec::new();
    for &t in &ts {
        let scan = rd_scan_with(&g, &sigma, &l, t, family, &config)?;
        say!(
            "t={t} family={} max_ratio={} argmax={}",
            family.name(),
            scan.max_ratio,
            scan.argmax
        );
        rows.extend(scan.rows);
    }
    write_csv(&a.out, &rows)?;
    manifest.write(&manifest_path(&a.out))?;
    Ok(0)
}

fn cmd_witness(a: WitnessArgs) -> Result<i32> {
    let ts = parse_f64_list(&a.t, "t")?;
    guard_t_grid(&ts)?;
    let mut manifest = Manifest::new();
    manifest.set("command", "witness");
    manifest.set("t", join_f64(&ts));
    manifest.set("unit", a.unit);
    manifest.set("radius", a.radius);
    manifest.set("tol.cert", a.cert_tol);
    let (g, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
    let l = record_length(&a.length, &g, metric.as_ref(), &mut manifest)?;
    let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
    let witness = witness_construct(&g, &sigma, &l, a.unit, a.radius)?;
    let fiber = witness.fiber_size();
    say!(
        "witness: unit={} radius={} fiber={} verified_norm={}",
        a.unit, a.radius, fiber, witness.verified_norm_lower
    );
    let mut rows = Vec::with_capacity(ts.len());
    let mut pass = witness.verified_norm_lower >= witness.norm_lower_bound() - a.cert_tol;
    for &t in &ts {
        let seminorm = weighted_seminorm(&g, &witness.function, &l, t, SeminormMode::Symmetric)?;
        let cert_upper = witness.seminorm_upper_bound(t);
        let ratio = witness.verified_norm_lower / seminorm;
        let bound = witness.ratio_lower_bound(t);
        let ok = seminorm <= cert_upper + a.cert_tol;
        pass = pass && ok;
        say!(
            "t={t} seminorm={seminorm} cert_upper={cert_upper} ratio={ratio} bound={bound}"
        );
        rows.push(ScanRow {
            kind: "witness".to_owned(),
            t,
            param: format!("unit={};radius={};fiber={}", a.unit, a.radius, fiber),
            ratio,
            bound,
            residual: ratio - bound,
        });
    }
    write_csv(&a.out, &rows)?;
    manifest.write(&manifest_path(&a.out))?;
    say!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 2 })
}

fn cmd_dichotomy(a: DichotomyArgs) -> Result<i32> {
    let sizes = parse_u32_list(&a.sizes, "sizes")?;
    let ts = parse_f64_list(&a.t, "t")?;
    guard_t_grid(&ts)?;
    let mut manifest = Manifest::new();
    manifest.set("command", "dichotomy");
    manifest.set("sizes", a.sizes.trim());
    manifest.set("t", join_f64(&ts));
    manifest.set("seed", a.seed);
    manifest.set("metric", a.metric);
    let rows = if a.metric {
        let family = SpaceFamily::parse(&a.family)?;
        manifest.set("family", family.name());
        metric_dichotomy(family, &sizes, &ts, a.seed)?
    } else {
        let family = DichotomyFamily::parse(&a.family)?;
        manifest.set("family", family.name());
        groupoid_rd::rd::dichotomy_experiment(family, &sizes, &ts, a.seed)?
    };
    let mut seen = BTreeSet::new();
    for row in &rows {
        if seen.insert(row.t.to_bits()) {
            say!("t={} classification={}", row.t, row.classification);
        }
    }
    write_csv(&a.out, &rows)?;
    manifest.write(&manifest_path(&a.out))?;
    Ok(0)
}

fn finish_permanence(
    report: PermanenceReport,
    manifest: &mut Manifest,
    out: Option<&Path>,
) -> Result<i32> {
    manifest.set("report_digest", &report.digest);
    manifest.set("tol.norm_inequality", NORM_INEQ_TOL);
    manifest.set("tol.exact_identity", EXACT_TOL);
    for row in &report.rows {
        say!(
            "check={} lhs={} rhs={} tol={} pass={}",
            row.check, row.lhs, row.rhs, row.tol, row.pass
        );
    }
    let pass = report.pass();
    if let Some(path) = out {
        write_csv(path, &report.rows)?;
        manifest.write(&manifest_path(path))?;
    }
    say!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 2 })
}

fn cmd_check_permanence(cmd: PermanenceCmd) -> Result<i32> {
    match cmd {
        PermanenceCmd::Subgroupoid(a) => {
            guard_t_grid(&[a.t])?;
            let mut manifest = Manifest::new();
            manifest.set("command", "check-permanence subgroupoid");
            manifest.set("t", a.t);
            manifest.set("units", a.units.trim());
            let (h, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
            let units: BTreeSet<ArrowId> =
                parse_u32_list(&a.units, "units")?.into_iter().collect();
            let l = record_length(&a.length, &h, metric.as_ref(), &mut manifest)?;
            let sigma = record_cocycle(&a.cocycle, &h, &mut manifest)?;
            let f = record_function(&a.function, &h, &mut manifest)?;
            let report = check_subgroupoid(&h, &sigma, &units, &f, &l, a.t)?;
            finish_permanence(report, &mut manifest, a.out.as_deref())
        }
        PermanenceCmd::Product(a) => {
            guard_t_grid(&[a.t])?;
            let mut manifest = Manifest::new();
            manifest.set("command", "check-permanence product");
            manifest.set("t", a.t);
            manifest.set("constant", a.constant);
            let (g, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
            let (h, _) = record_groupoid(&a.other, "other", &mut manifest)?;
            let l = record_length(&a.length, &g, metric.as_ref(), &mut manifest)?;
            let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
            let product = Groupoid::product(&g, &h)?;
            let f = record_function(&a.function, &product, &mut manifest)?;
            let report = check_product(&g, &sigma, &l, &h, &f, a.constant, a.t)?;
            finish_permanence(report, &mut manifest, a.out.as_deref())
        }
        PermanenceCmd::Pullback(a) => {
            guard_t_grid(&[a.t])?;
            let mut manifest = Manifest::new();
            manifest.set("command", "check-permanence pullback");
            manifest.set("t", a.t);
            let (h, _) = record_groupoid(&a.domain, "domain", &mut manifest)?;
            let (g, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
            let phi = record_hom(&a.hom, &h, &g, &mut manifest)?;
            let l = record_length(&a.length, &g, metric.as_ref(), &mut manifest)?;
            let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
            let f = record_function(&a.function, &g, &mut manifest)?;
            let report = check_pullback(&phi, &h, &g, &sigma, &l, &f, a.t)?;
            finish_permanence(report, &mut manifest, a.out.as_deref())
        }
        PermanenceCmd::Transfer(a) => {
            guard_t_grid(&[a.t])?;
            let mut manifest = Manifest::new();
            manifest.set("command", "check-permanence transfer");
            manifest.set("t", a.t);
            manifest.set("constant", a.constant);
            let (h, _) = record_groupoid(&a.domain, "domain", &mut manifest)?;
            let (g, metric) = record_groupoid(&a.groupoid, "groupoid", &mut manifest)?;
            let phi = record_hom(&a.hom, &h, &g, &mut manifest)?;
            let l = record_length(&a.length, &g, metric.as_ref(), &mut manifest)?;
            let sigma = record_cocycle(&a.cocycle, &g, &mut manifest)?;
            let f = record_function(&a.function, &g, &mut manifest)?;
            let report = check_rd_transfer(&phi, &h, &g, &sigma, &l, &f, a.constant, a.t)?;
            finish_permanence(report, &mut manifest, a.out.as_deref())
        }
    }
}

fn cmd_metric_rd(a: MetricRdArgs) -> Result<i32> {
    let ts = parse_f64_list(&a.t, "t")?;
    guard_t_grid(&ts)?;
    let family = MetricFamily::parse(&a.family)?;
    let mut manifest = Manifest::new();
    manifest.set("command", "metric-rd");
    manifest.set("t", join_f64(&ts));
    manifest.set("family", family.name());
    manifest.set("trials", a.trials);
    manifest.set("seed", a.seed);
    manifest.set("max_centers", a.max_centers);
    let space = record_space(&a.space, &mut manifest)?;
    let radii = a
        .radii
        .as_deref()
        .map(|s| parse_f64_list(s, "radii"))
        .transpose()?;
    if let Some(r) = &radii {
        manifest.set("radii", join_f64(r));
    }
    let config = MRDScanConfig {
        trials: a.trials,
        seed: a.seed,
        max_centers: a.max_centers,
        radii,
    };
    let mut rows = Vec::new();
    for &t in &ts {
        let scan = mrd_scan_with(&space, t, family, &config)?;
        say!(
            "t={t} family={} max_ratio={} argmax={}",
            family.name(),
            scan.max_ratio,
            scan.argmax
        );
        rows.extend(scan.rows);
    }
    write_csv(&a.out, &rows)?;
    manifest.write(&manifest_path(&a.out))?;
    Ok(0)
}
