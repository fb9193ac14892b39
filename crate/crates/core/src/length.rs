//! Length functions on finite groupoids: axioms, word lengths,
//! pullbacks, balls, and growth profiles.
//!
//! A length function assigns a nonnegative real to every arrow with
//! `ℓ = 0` on units, `ℓ(a⁻¹) = ℓ(a)`, and `ℓ(ab) ≤ ℓ(a) + ℓ(b)` on
//! composable pairs. Values are stored densely per arrow, except for
//! pair groupoids of metric spaces, where `ℓ((y, x)) = d(x, y)` is
//! answered straight from the metric — that keeps tree-sized fibers
//! cheap and makes the groupoid/metric growth identification exact.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{codes, Error, Result, Violation};
use crate::groupoid::{ArrowId, Groupoid, GroupoidHom};
use crate::metric::{fit_growth_exponent, FiniteMetricSpace};
use crate::report::GrowthRow;

/// Tolerance for the unit, inversion, and subadditivity axioms.
pub const LENGTH_TOL: f64 = 1e-12;

/// Largest implicit pair groupoid whose dense lengths get the full
/// cubic subadditivity sweep in `validate` (mirrors the groupoid
/// associativity sweep limit).
const PAIR_SWEEP_LIMIT: u32 = 64;

#[derive(Debug, Clone)]
pub enum LengthFunction {
    /// One value per arrow id.
    Dense(Vec<f64>),
    /// On the pair groupoid of a metric space: `ℓ((y, x)) = d(x, y)`.
    PairMetric(Arc<FiniteMetricSpace>),
}

impl LengthFunction {
    pub fn pair_metric(space: Arc<FiniteMetricSpace>) -> Self {
        LengthFunction::PairMetric(space)
    }

    /// Builds a dense length from `(arrow id, value)` entries; every
    /// arrow must appear exactly once.
    pub fn from_values(g: &Groupoid, entries: &[(ArrowId, f64)]) -> Result<Self> {
        let n = g.num_arrows();
        let mut values = vec![f64::NAN; n];
        for &(a, v) in entries {
            if a as usize >= n {
                return Err(Error::DanglingId(format!(
                    "length entry references missing arrow {a}"
                )));
            }
            if !values[a as usize].is_nan() {
                return Err(Error::Schema(format!("duplicate length entry for arrow {a}")));
            }
            values[a as usize] = v;
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Schema(format!(
                "length value missing for arrow {missing}"
            )));
        }
        Ok(LengthFunction::Dense(values))
    }

    pub fn value(&self, a: ArrowId) -> f64 {
        match self {
            LengthFunction::Dense(v) => v[a as usize],
            LengthFunction::PairMetric(s) => {
                let n = s.len() as u32;
                s.dist(a % n, a / n)
            }
        }
    }

    /// The backing metric space, when this length is metric-derived.
    pub fn metric_space(&self) -> Option<&Arc<FiniteMetricSpace>> {
        match self {
            LengthFunction::PairMetric(s) => Some(s),
            LengthFunction::Dense(_) => None,
        }
    }

    /// Checks that this length is shaped for `g`.
    pub fn check_compat(&self, g: &Groupoid) -> Result<()> {
        match self {
            LengthFunction::Dense(v) => {
                if v.len() != g.num_arrows() {
                    return Err(Error::GroupoidMismatch(format!(
                        "length has {} values but the groupoid has {} arrows",
                        v.len(),
                        g.num_arrows()
                    )));
                }
            }
            LengthFunction::PairMetric(s) => {
                if g.pair_points() != Some(s.len() as u32) {
                    return Err(Error::GroupoidMismatch(
                        "metric-backed length requires the pair groupoid of its space".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Checks the three length axioms, reporting every violation found.
/// For metric-backed lengths the axioms are exactly the metric axioms,
/// so the space's validation is reused; dense lengths on implicit pair
/// groupoids past [`PAIR_SWEEP_LIMIT`] points skip the cubic
/// subadditivity sweep (unit/inversion/sign checks still run).
pub fn validate_length(g: &Groupoid, l: &LengthFunction) -> Result<Vec<Violation>> {
    l.check_compat(g)?;
    if let (LengthFunction::PairMetric(s), Some(n)) = (l, g.pair_points()) {
        let mut out = Vec::new();
        for v in s.validate() {
            let (code, witness, detail) = match v.code {
                codes::METRIC_DIAGONAL => {
                    let x = v.witness[0];
                    (codes::UNIT_NONZERO, vec![x * n + x], v.detail)
                }
                codes::METRIC_SYMMETRY => {
                    let (x, y) = (v.witness[0], v.witness[1]);
                    (codes::INVERSION_SYMMETRY, vec![y * n + x, x * n + y], v.detail)
                }
                codes::METRIC_TRIANGLE => {
                    let (a, b, c) = (v.witness[0], v.witness[1], v.witness[2]);
                    // d(a,b) > d(a,c) + d(c,b): the product (b,c)∘(c,a)
                    // violates subadditivity.
                    (codes::SUBADDITIVITY, vec![b * n + c, c * n + a, b * n + a], v.detail)
                }
                _ => {
                    let (x, y) = (v.witness[0], v.witness[1]);
                    (codes::NEGATIVE_LENGTH, vec![y * n + x], v.detail)
                }
            };
            out.push(Violation::new(code, witness, detail));
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    let n = g.num_arrows() as u32;
    for a in 0..n {
        let v = l.value(a);
        if !v.is_finite() || v < 0.0 {
            out.push(Violation::new(
                codes::NEGATIVE_LENGTH,
                vec![a],
                format!("ℓ = {v}"),
            ));
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    for &u in &g.units() {
        if l.value(u).abs() > LENGTH_TOL {
            out.push(Violation::new(
                codes::UNIT_NONZERO,
                vec![u],
                format!("ℓ(unit) = {}", l.value(u)),
            ));
        }
    }
    for a in 0..n {
        let (va, vi) = (l.value(a), l.value(g.inv(a)));
        if (va - vi).abs() > LENGTH_TOL {
            out.push(Violation::new(
                codes::INVERSION_SYMMETRY,
                vec![a, g.inv(a)],
                format!("ℓ(a) = {va}, ℓ(a⁻¹) = {vi}"),
            ));
        }
    }
    let sweep = match g.pair_points() {
        Some(pts) => pts <= PAIR_SWEEP_LIMIT,
        None => true,
    };
    if sweep {
        'outer: for b in 0..n {
            for a in g.source_fiber(g.rng(b))? {
                let ab = g.compose(a, b).expect("src(a) = rng(b)");
                if l.value(ab) > l.value(a) + l.value(b) + LENGTH_TOL {
                    out.push(Violation::new(
                        codes::SUBADDITIVITY,
                        vec![a, b, ab],
                        format!(
                            "ℓ(ab) = {} > {} + {}",
                            l.value(ab),
                            l.value(a),
                            l.value(b)
                        ),
                    ));
                    if out.len() >= 64 {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Word length over the generating set `K ∪ K⁻¹`: `ℓ(unit) = 0` and
/// `ℓ(γ)` the least number of generators whose product is `γ`,
/// computed by breadth-first search. Arrows no product reaches make
/// the generating set invalid (`NOT_GENERATING`, with the unreachable
/// arrow ids).
pub fn word_length(g: &Groupoid, k: &[ArrowId]) -> Result<LengthFunction> {
    let n = g.num_arrows();
    let mut gens: Vec<ArrowId> = Vec::with_capacity(2 * k.len());
    for &a in k {
        if a as usize >= n {
            return Err(Error::DanglingId(format!(
                "generator references missing arrow {a}"
            )));
        }
        gens.push(a);
        gens.push(g.inv(a));
    }
    gens.sort_unstable();
    gens.dedup();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for u in g.units() {
        dist[u as usize] = 0;
        queue.push_back(u);
    }
    while let Some(gamma) = queue.pop_front() {
        let next_d = dist[gamma as usize] + 1;
        for &s in &gens {
            if let Some(longer) = g.compose(s, gamma) {
                if dist[longer as usize] == u32::MAX {
                    dist[longer as usize] = next_d;
                    queue.push_back(longer);
                }
            }
        }
    }
    let unreachable: Vec<ArrowId> = (0..n as u32)
        .filter(|&a| dist[a as usize] == u32::MAX)
        .collect();
    if !unreachable.is_empty() {
        return Err(Error::NotGenerating(unreachable));
    }
    Ok(LengthFunction::Dense(
        dist.into_iter().map(f64::from).collect(),
    ))
}

/// Pullback `(φ*ℓ)(h) = ℓ(φ(h))` along a homomorphism into the
/// codomain carrying `ℓ`. Always satisfies the axioms when `ℓ` does.
pub fn pullback_length(phi: &GroupoidHom, l: &LengthFunction) -> LengthFunction {
    LengthFunction::Dense(phi.map.iter().map(|&gm| l.value(gm)).collect())
}

/// The closed ball `B_ℓ(x, r) = {γ ∈ G_x : ℓ(γ) ≤ r}`, ascending ids.
pub fn ball(g: &Groupoid, l: &LengthFunction, x: ArrowId, r: f64) -> Result<Vec<ArrowId>> {
    l.check_compat(g)?;
    Ok(g.source_fiber(x)?
        .into_iter()
        .filter(|&a| l.value(a) <= r)
        .collect())
}

/// Growth table plus fitted exponent; see [`fit_growth_exponent`] for
/// the regression (slope of log max-count against log(1 + r)).
#[derive(Debug, Clone)]
pub struct GrowthProfile {
    pub rows: Vec<GrowthRow>,
    pub exponent: f64,
}

pub fn growth_profile(
    g: &Groupoid,
    l: &LengthFunction,
    radii: &[f64],
) -> Result<GrowthProfile> {
    l.check_compat(g)?;
    let units = g.units();
    let mut rows = Vec::with_capacity(units.len() * radii.len());
    let mut maxima = vec![0u64; radii.len()];
    for &x in &units {
        let fiber = g.source_fiber(x)?;
        for (i, &r) in radii.iter().enumerate() {
            let count = fiber.iter().filter(|&&a| l.value(a) <= r).count() as u64;
            rows.push(GrowthRow { unit: x, r, count });
            maxima[i] = maxima[i].max(count);
        }
    }
    let samples: Vec<(f64, u64)> = radii.iter().copied().zip(maxima).collect();
    let exponent = fit_growth_exponent(&samples)?;
    Ok(GrowthProfile { rows, exponent })
}
