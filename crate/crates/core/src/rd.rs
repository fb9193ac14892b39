//! Rapid-decay diagnostics: norm-to-seminorm ratios, scans over
//! deterministic test-function families, the ball-witness construction
//! that certifies lower bounds on the best decay constant, and the
//! growth/decay dichotomy experiments over parametrized families.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    reduced_norm_report, weighted_seminorm, GFunction, SeminormMode,
};
use crate::error::{Error, Result};
use crate::families::DichotomyFamily;
use crate::groupoid::{ArrowId, Groupoid};
use crate::length::{self, LengthFunction};
use crate::metric;
use crate::report::{DichotomyRow, ScanRow};
use crate::twist::Cocycle;

/// Slack allowed when numerically re-checking certified witness bounds.
pub const CERT_TOL: f64 = 1e-6;
/// Unit sampling cap for scans on many-unit groupoids.
const MAX_SCAN_UNITS: usize = 32;
/// Radius grid cap for ball and witness families.
const MAX_SCAN_RADII: usize = 16;

/// `reduced_norm(f, σ) / weighted_seminorm(f, ℓ, t, symmetric)`.
pub fn rd_ratio(
    g: &Groupoid,
    f: &GFunction,
    sigma: &Cocycle,
    l: &LengthFunction,
    t: f64,
) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let norm = reduced_norm_report(g, f, sigma)?.value;
    let semi = weighted_seminorm(g, f, l, t, SeminormMode::Symmetric)?;
    Ok(norm / semi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFamily {
    /// Indicators of length balls at sampled units.
    BallIndicators,
    /// Dense iid complex draws, one function per trial.
    RandomComplex,
    /// Witness functions from the ball construction at sampled units.
    WitnessSeeded,
}

impl TestFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::BallIndicators => "ball_indicators",
            TestFamily::RandomComplex => "random_complex",
            TestFamily::WitnessSeeded => "witness_seeded",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "balls" | "ball_indicators" => Ok(TestFamily::BallIndicators),
            "random" | "random_complex" => Ok(TestFamily::RandomComplex),
            "witness" | "witness_seeded" => Ok(TestFamily::WitnessSeeded),
            other => Err(Error::Schema(format!(
                "unknown family {other:?}; expected balls, random, or witness"
            ))),
        }
    }
}

/// Knobs for scan generation beyond the spec'd defaults.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Function count for the random family.
    pub trials: u32,
    pub seed: u64,
    /// Cap on sampled units for ball/witness families.
    pub max_units: usize,
    /// Explicit radius grid; defaults to quantiles of observed lengths.
    pub radii: Option<Vec<f64>>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            trials: 100,
            seed: 7,
            max_units: MAX_SCAN_UNITS,
            radii: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RDScanResult {
    pub t: f64,
    pub family: TestFamily,
    /// `(function id, ratio)` for every evaluated function.
    pub ratios: Vec<(u32, f64)>,
    pub max_ratio: f64,
    /// Lowest function id attaining the max.
    pub argmax: u32,
    pub rows: Vec<ScanRow>,
}

fn sampled_units(g: &Groupoid, max_units: usize) -> Vec<ArrowId> {
    let units = g.units();
    if units.len() <= max_units || max_units == 0 {
        return units;
    }
    let stride = units.len().div_ceil(max_units);
    units.into_iter().step_by(stride).collect()
}

/// Distinct quantiles of the lengths seen on the sampled fibers.
fn quantile_radii(
    g: &Groupoid,
    l: &LengthFunction,
    units: &[ArrowId],
) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for &x in units {
        for &gamma in &g.source_fiber(x)? {
            values.push(l.value(gamma));
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("lengths are finite"));
    values.dedup();
    if values.len() <= MAX_SCAN_RADII {
        return Ok(values);
    }
    let mut picks = Vec::with_capacity(MAX_SCAN_RADII);
    for i in 0..MAX_SCAN_RADII {
        let idx = (i * (values.len() - 1)) / (MAX_SCAN_RADII - 1);
        picks.push(values[idx]);
    }
    picks.dedup();
    Ok(picks)
}

struct ScanItem {
    id: u32,
    param: String,
    function: GFunction,
    /// `(fiber size, radius)` when the function carries a certified
    /// witness bound.
    witness_shape: Option<(u64, f64)>,
}

/// Streams the family one function at a time so that large members
/// never coexist in memory. Returns how many functions were produced.
fn for_each_scan_item(
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    family: TestFamily,
    config: &ScanConfig,
    mut visit: impl FnMut(ScanItem) -> Result<()>,
) -> Result<u32> {
    let mut id = 0u32;
    match family {
        TestFamily::BallIndicators => {
            let units = sampled_units(g, config.max_units);
            let radii = match &config.radii {
                Some(r) => r.clone(),
                None => quantile_radii(g, l, &units)?,
            };
            for &x in &units {
                for &r in &radii {
                    let ball = length::ball(g, l, x, r)?;
                    if ball.is_empty() {
                        continue;
                    }
                    let mut f = GFunction::zeros(g);
                    for &a in &ball {
                        f.coeffs[a as usize] = Complex64::ONE;
                    }
                    visit(ScanItem {
                        id,
                        param: format!("unit={x};r={r}"),
                        function: f,
                        witness_shape: None,
                    })?;
                    id += 1;
                }
            }
        }
        TestFamily::RandomComplex => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for trial in 0..config.trials {
                let coeffs = (0..g.num_arrows())
                    .map(|_| {
                        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    })
                    .collect();
                visit(ScanItem {
                    id,
                    param: format!("trial={trial}"),
                    function: GFunction { coeffs },
                    witness_shape: None,
                })?;
                id += 1;
            }
        }
        TestFamily::WitnessSeeded => {
            let units = sampled_units(g, config.max_units);
            let radii = match &config.radii {
                Some(r) => r.clone(),
                None => quantile_radii(g, l, &units)?,
            };
            for &x in &units {
                for &r in &radii {
                    let witness = match witness_construct(g, sigma, l, x, r) {
                        Ok(w) => w,
                        Err(Error::EmptyBall { .. })
                        | Err(Error::RangeNotInjective(_, _)) => continue,
                        Err(e) => return Err(e),
                    };
                    let shape = (witness.fiber_subset.len() as u64, witness.radius);
                    visit(ScanItem {
                        id,
                        param: format!("unit={x};R={r}"),
                        function: witness.function,
                        witness_shape: Some(shape),
                    })?;
                    id += 1;
                }
            }
        }
    }
    Ok(id)
}

/// Max `rd_ratio` over a deterministic test-function family.
pub fn rd_scan(
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    t: f64,
    family: TestFamily,
    trials: u32,
    seed: u64,
) -> Result<RDScanResult> {
    rd_scan_with(
        g,
        sigma,
        l,
        t,
        family,
        &ScanConfig {
            trials,
            seed,
            ..ScanConfig::default()
        },
    )
}

pub fn rd_scan_with(
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    t: f64,
    family: TestFamily,
    config: &ScanConfig,
) -> Result<RDScanResult> {
    l.check_compat(g)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeT(t));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = 0u32;
    for_each_scan_item(g, sigma, l, family, config, |item| {
        if item.function.is_zero() {
            return Ok(());
        }
        let report = reduced_norm_report(g, &item.function, sigma)?;
        let semi = weighted_seminorm(g, &item.function, l, t, SeminormMode::Symmetric)?;
        let ratio = report.value / semi;
        let residual = report
            .rows
            .iter()
            .map(|r| r.residual)
            .fold(0.0f64, f64::max);
        let bound = match item.witness_shape {
            Some((fiber, radius)) => witness_ratio_bound(fiber, radius, t),
            None => 0.0,
        };
        rows.push(ScanRow {
            kind: family.name().to_owned(),
            t,
            param: item.param,
            ratio,
            bound,
            residual,
        });
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = item.id;
        }
        ratios.push((item.id, ratio));
        Ok(())
    })?;
    if ratios.is_empty() {
        return Err(Error::EmptyFamily(format!(
            "family {} produced no admissible functions",
            family.name()
        )));
    }
    Ok(RDScanResult {
        t,
        family,
        ratios,
        max_ratio,
        argmax,
        rows,
    })
}

/// The certified ratio lower bound `|F|^{1/2}·(1+2R)^{−t}` of a witness
/// with fiber subset size `|F|` and radius `R`.
pub fn witness_ratio_bound(fiber_size: u64, radius: f64, t: f64) -> f64 {
    (fiber_size as f64).sqrt() * (1.0 + 2.0 * radius).powf(-t)
}

/// A ball witness: `F = B_ℓ(x,R) ∩ G_x` with injective range map,
/// `Z = F·F⁻¹`, and `f = Σ_{g∈Z} phase(g)·δ_g` with phases chosen so
/// the fiber operator at `x` is exactly 1 on `F × F`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub unit: ArrowId,
    pub radius: f64,
    /// The arrows of `F`, ascending.
    pub fiber_subset: Vec<ArrowId>,
    pub function: GFunction,
    /// `‖λ_x(f)·ξ‖` for `ξ = |F|^{-1/2}·1_F`, computed numerically; a
    /// genuine lower bound for the reduced norm, equal to `|F|` up to
    /// rounding.
    pub verified_norm_lower: f64,
}

impl Witness {
    pub fn fiber_size(&self) -> u64 {
        self.fiber_subset.len() as u64
    }

    /// Certified lower bound `|F|` on the reduced norm.
    pub fn norm_lower_bound(&self) -> f64 {
        self.fiber_size() as f64
    }

    /// Certified upper bound `|F|^{1/2}·(1+2R)^t` on the symmetric
    /// seminorm: every arrow of `Z` has length ≤ 2R and each fiber
    /// meets `Z` in at most `|F|` arrows.
    pub fn seminorm_upper_bound(&self, t: f64) -> f64 {
        (self.fiber_size() as f64).sqrt() * (1.0 + 2.0 * self.radius).powf(t)
    }

    /// Certified lower bound on the RD ratio at exponent `t`.
    pub fn ratio_lower_bound(&self, t: f64) -> f64 {
        witness_ratio_bound(self.fiber_size(), self.radius, t)
    }
}

/// Builds the ball witness at `(x, R)`.
pub fn witness_construct(
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    x: ArrowId,
    radius: f64,
) -> Result<Witness> {
    if !g.is_unit(x) {
        return Err(Error::NotAUnit(x));
    }
    let fiber_subset = length::ball(g, l, x, radius)?;
    if fiber_subset.is_empty() {
        return Err(Error::EmptyBall { unit: x, radius });
    }
    let mut seen: std::collections::BTreeMap<ArrowId, ArrowId> =
        std::collections::BTreeMap::new();
    for &gamma in &fiber_subset {
        if let Some(&first) = seen.get(&g.rng(gamma)) {
            return Err(Error::RangeNotInjective(first, gamma));
        }
        seen.insert(g.rng(gamma), gamma);
    }

    let mut function = GFunction::zeros(g);
    for &g2 in &fiber_subset {
        let g2_inv = g.inv(g2);
        for &g1 in &fiber_subset {
            let z = g.compose(g1, g2_inv).expect("both arrows start at x");
            function.coeffs[z as usize] = sigma.value(g, z, g2).conj();
        }
    }

    // ‖λ_x(f)·ξ‖ with ξ the normalized indicator of F, evaluated
    // without materializing the fiber matrix.
    let fiber = g.source_fiber(x)?;
    let scale = 1.0 / (fiber_subset.len() as f64).sqrt();
    let mut sumsq = 0.0f64;
    for &gamma in &fiber {
        let mut acc = Complex64::ZERO;
        for &eta in &fiber_subset {
            let diff = g.compose(gamma, g.inv(eta)).expect("both start at x");
            let c = function.coeffs[diff as usize];
            if c != Complex64::ZERO {
                acc += c * sigma.value(g, diff, eta);
            }
        }
        sumsq += (acc * scale).norm_sqr();
    }

    Ok(Witness {
        unit: x,
        radius,
        fiber_subset,
        function,
        verified_norm_lower: sumsq.sqrt(),
    })
}

fn growth_exponent_for(inst: &crate::families::FamilyInstance) -> Result<f64> {
    // Stay below the saturation scale (half the diameter), where ball
    // counts stop growing and would flatten the fitted exponent.
    let rmax = ((inst.diameter / 2.0).floor() as u64).clamp(2, 10);
    let radii: Vec<f64> = (1..=rmax).map(|r| r as f64).collect();
    match inst.length.metric_space() {
        Some(space) => {
            let samples: Vec<(f64, u64)> = radii
                .iter()
                .map(|&r| (r, space.max_ball_count(r) as u64))
                .collect();
            metric::fit_growth_exponent(&samples)
        }
        None => Ok(length::growth_profile(&inst.groupoid, &inst.length, &radii)?.exponent),
    }
}

/// Runs the dichotomy experiment for one family over size and exponent
/// grids: growth exponents, scan max ratios, and closed-form witness
/// bounds per size, classified per `t` with the empirical thresholds.
pub fn dichotomy_experiment(
    family: DichotomyFamily,
    sizes: &[u32],
    t_grid: &[f64],
    seed: u64,
) -> Result<Vec<DichotomyRow>> {
    if sizes.is_empty() || t_grid.is_empty() {
        return Err(Error::EmptyFamily(
            "dichotomy needs nonempty size and t grids".into(),
        ));
    }
    let scan_family = match family {
        DichotomyFamily::BinaryTrees => TestFamily::WitnessSeeded,
        _ => TestFamily::BallIndicators,
    };
    let mut growth = Vec::with_capacity(sizes.len());
    let mut witness_bounds_t: Vec<Vec<f64>> = vec![Vec::new(); t_grid.len()];
    let mut scan_max_t: Vec<Vec<f64>> = vec![Vec::new(); t_grid.len()];
    for &size in sizes {
        let inst = family.instance(size)?;
        growth.push(growth_exponent_for(&inst)?);
        let config = ScanConfig {
            seed,
            max_units: if scan_family == TestFamily::WitnessSeeded {
                1
            } else {
                MAX_SCAN_UNITS
            },
            radii: if scan_family == TestFamily::WitnessSeeded {
                Some(vec![inst.witness_radius])
            } else {
                None
            },
            ..ScanConfig::default()
        };
        let fiber_size = match inst.length.metric_space() {
            Some(space) if inst.principal => {
                space.max_ball_count(inst.witness_radius) as u64
            }
            _ => 0,
        };
        for (ti, &t) in t_grid.iter().enumerate() {
            let scan = rd_scan_with(
                &inst.groupoid,
                &Cocycle::trivial(),
                &inst.length,
                t,
                scan_family,
                &config,
            )?;
            scan_max_t[ti].push(scan.max_ratio);
            witness_bounds_t[ti].push(if fiber_size > 0 {
                witness_ratio_bound(fiber_size, inst.witness_radius, t)
            } else {
                0.0
            });
        }
    }
    let mut rows = Vec::with_capacity(sizes.len() * t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let classification =
            crate::report::classify_dichotomy(&scan_max_t[ti], &witness_bounds_t[ti]);
        for (si, &size) in sizes.iter().enumerate() {
            rows.push(DichotomyRow {
                family: family.name().to_owned(),
                size,
                t,
                growth_exponent: growth[si],
                scan_max_ratio: scan_max_t[ti][si],
                witness_bound: witness_bounds_t[ti][si],
                classification: classification.clone(),
            });
        }
    }
    Ok(rows)
}
