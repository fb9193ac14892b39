//! Finite metric spaces, kernels, and coarse-geometric norms.
//!
//! A [`FiniteMetricSpace`] is a finite point set with a metric. Distance
//! matrices are stored densely when loaded from data; the builtin
//! generators (paths, grids, complete binary trees) answer distance
//! queries by formula so large spaces cost nothing to hold.
//!
//! Kernels `k: X × X → ℂ` act on `ℓ²(X)` as matrices. `roe_norm` is the
//! resulting operator norm, `bs_norm` the weighted ℓ²-decay norm
//! `(sup_y Σ_x |k(x,y)|² (1+d(x,y))^{2t})^{1/2}` (star mode symmetrizes
//! with `k*(x,y) = conj(k(y,x))`), and `propagation` the largest
//! distance on the support.
//!
//! Infinite coarse geometry is out of scope throughout: the space `X`
//! stands in for itself, never for a compactification, and every norm
//! here is a finite matrix computation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{codes, Error, Result, Violation};
use crate::report::{classify_dichotomy, DichotomyRow, ScanRow};
use crate::spectral::{operator_norm, SpectralEstimate};

/// Metric axiom tolerance for loaded distance matrices.
pub const METRIC_TOL: f64 = 1e-12;
/// Largest point count accepted for dense distance-matrix input.
pub const DENSE_SPACE_LIMIT: usize = 512;
/// Largest point count accepted for edge-list input (the completed
/// matrix is stored densely).
pub const EDGE_SPACE_LIMIT: usize = 2048;

#[derive(Debug, Clone)]
enum MetricRepr {
    Dense { n: usize, d: Vec<f64> },
    Path { n: u32 },
    Grid { w: u32, h: u32 },
    BinaryTree { depth: u32 },
}

/// A finite metric space with point ids `0..len()`.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    repr: MetricRepr,
}

fn heap_depth(h: u32) -> u32 {
    31 - h.leading_zeros()
}

impl FiniteMetricSpace {
    pub fn len(&self) -> usize {
        match &self.repr {
            MetricRepr::Dense { n, .. } => *n,
            MetricRepr::Path { n } => *n as usize,
            MetricRepr::Grid { w, h } => (*w as usize) * (*h as usize),
            MetricRepr::BinaryTree { depth } => (1usize << (depth + 1)) - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dist(&self, a: u32, b: u32) -> f64 {
        match &self.repr {
            MetricRepr::Dense { n, d } => d[a as usize * n + b as usize],
            MetricRepr::Path { .. } => (a as f64 - b as f64).abs(),
            MetricRepr::Grid { w, .. } => {
                let (xa, ya) = (a % w, a / w);
                let (xb, yb) = (b % w, b / w);
                (xa.abs_diff(xb) + ya.abs_diff(yb)) as f64
            }
            MetricRepr::BinaryTree { .. } => {
                let (mut ha, mut hb) = (a + 1, b + 1);
                let (da, db) = (heap_depth(ha), heap_depth(hb));
                let (mut ua, mut ub) = (da, db);
                while ua > ub {
                    ha >>= 1;
                    ua -= 1;
                }
                while ub > ua {
                    hb >>= 1;
                    ub -= 1;
                }
                while ha != hb {
                    ha >>= 1;
                    hb >>= 1;
                    ua -= 1;
                }
                ((da - ua) + (db - ua)) as f64
            }
        }
    }

    /// The path `P_n`: points `0..n` with `d(i, j) = |i − j|`.
    pub fn path(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Schema("path space needs at least 1 point".into()));
        }
        Ok(Self {
            repr: MetricRepr::Path { n },
        })
    }

    /// The `w × h` grid with the Manhattan metric; point `p` sits at
    /// `(p mod w, p div w)`.
    pub fn grid(w: u32, h: u32) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::Schema("grid space needs positive extents".into()));
        }
        if (w as u64) * (h as u64) > u32::MAX as u64 {
            return Err(Error::Schema("grid too large for 32-bit point ids".into()));
        }
        Ok(Self {
            repr: MetricRepr::Grid { w, h },
        })
    }

    /// The complete binary tree of the given depth with the graph
    /// metric: `2^(depth+1) − 1` points, point `p` being heap node
    /// `p + 1` (point 0 is the root, leaves sit at distance `depth`).
    pub fn binary_tree(depth: u32) -> Result<Self> {
        if depth > 24 {
            return Err(Error::Schema(
                "binary tree deeper than 24 exceeds 32-bit point ids".into(),
            ));
        }
        Ok(Self {
            repr: MetricRepr::BinaryTree { depth },
        })
    }

    /// Builds a space from a full distance matrix, checking the metric
    /// axioms to [`METRIC_TOL`].
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Schema("distance matrix must be nonempty".into()));
        }
        if n > DENSE_SPACE_LIMIT {
            return Err(Error::Schema(format!(
                "distance matrix on {n} points exceeds the dense limit {DENSE_SPACE_LIMIT}"
            )));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Schema("distance matrix must be square".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Schema("distance matrix entries must be finite".into()));
        }
        let mut d = Vec::with_capacity(n * n);
        for r in rows {
            d.extend_from_slice(r);
        }
        let space = Self {
            repr: MetricRepr::Dense { n, d },
        };
        let violations = space.validate();
        if violations.is_empty() {
            Ok(space)
        } else {
            Err(Error::validation("metric space", violations))
        }
    }

    /// Builds a space from an integer-weighted edge list by exact
    /// shortest-path completion. Weights must be ≥ 1; the graph must be
    /// connected.
    pub fn from_edges(n: u32, edges: &[(u32, u32, u64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Schema("edge-list space needs at least 1 point".into()));
        }
        if n as usize > EDGE_SPACE_LIMIT {
            return Err(Error::Schema(format!(
                "edge-list space on {n} points exceeds the limit {EDGE_SPACE_LIMIT}"
            )));
        }
        let n = n as usize;
        let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::DanglingId(format!(
                    "edge ({a}, {b}) references a missing point"
                )));
            }
            if a == b {
                return Err(Error::Schema(format!("self-loop edge at point {a}")));
            }
            if w == 0 {
                return Err(Error::Schema(format!(
                    "edge ({a}, {b}) has weight 0; distinct points need positive distance"
                )));
            }
            adj[a as usize].push((b as usize, w));
            adj[b as usize].push((a as usize, w));
        }
        let mut d = vec![0.0f64; n * n];
        let mut dist = vec![u64::MAX; n];
        let mut heap = std::collections::BinaryHeap::new();
        for s in 0..n {
            dist.fill(u64::MAX);
            dist[s] = 0;
            heap.clear();
            heap.push(std::cmp::Reverse((0u64, s)));
            while let Some(std::cmp::Reverse((du, u))) = heap.pop() {
                if du > dist[u] {
                    continue;
                }
                for &(v, w) in &adj[u] {
                    let nd = du + w;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(std::cmp::Reverse((nd, v)));
                    }
                }
            }
            for v in 0..n {
                if dist[v] == u64::MAX {
                    return Err(Error::Disconnected(format!(
                        "point {v} is unreachable from point {s}"
                    )));
                }
                d[s * n + v] = dist[v] as f64;
            }
        }
        Ok(Self {
            repr: MetricRepr::Dense { n, d },
        })
    }

    /// Checks the metric axioms (zero diagonal, symmetry, nonnegativity,
    /// separation, triangle inequality) to [`METRIC_TOL`]. Spaces past
    /// [`DENSE_SPACE_LIMIT`] points skip the cubic triangle sweep; only
    /// formula-backed generators can be that large.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.len();
        for a in 0..n as u32 {
            let daa = self.dist(a, a);
            if daa.abs() > METRIC_TOL {
                out.push(Violation::new(
                    codes::METRIC_DIAGONAL,
                    vec![a],
                    format!("d(x,x) = {daa}"),
                ));
            }
            for b in 0..n as u32 {
                let dab = self.dist(a, b);
                if dab < -METRIC_TOL {
                    out.push(Violation::new(
                        codes::METRIC_NEGATIVE,
                        vec![a, b],
                        format!("d = {dab}"),
                    ));
                }
                if a != b && dab.abs() <= METRIC_TOL {
                    out.push(Violation::new(
                        codes::METRIC_NEGATIVE,
                        vec![a, b],
                        "distinct points at distance 0",
                    ));
                }
                if (dab - self.dist(b, a)).abs() > METRIC_TOL {
                    out.push(Violation::new(
                        codes::METRIC_SYMMETRY,
                        vec![a, b],
                        format!("d(a,b) = {dab}, d(b,a) = {}", self.dist(b, a)),
                    ));
                }
            }
            if out.len() >= 64 {
                return out;
            }
        }
        if n <= DENSE_SPACE_LIMIT {
            'tri: for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let dab = self.dist(a, b);
                    for c in 0..n as u32 {
                        if dab > self.dist(a, c) + self.dist(c, b) + METRIC_TOL {
                            out.push(Violation::new(
                                codes::METRIC_TRIANGLE,
                                vec![a, b, c],
                                format!(
                                    "d(a,b) = {dab} > {} + {}",
                                    self.dist(a, c),
                                    self.dist(c, b)
                                ),
                            ));
                            if out.len() >= 64 {
                                break 'tri;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of points in the closed ball `B(x, r) = {y : d(x,y) ≤ r}`.
    pub fn ball_count(&self, x: u32, r: f64) -> usize {
        (0..self.len() as u32)
            .filter(|&y| self.dist(x, y) <= r)
            .count()
    }

    /// The points of the closed ball `B(x, r)`, ascending.
    pub fn ball(&self, x: u32, r: f64) -> Vec<u32> {
        (0..self.len() as u32)
            .filter(|&y| self.dist(x, y) <= r)
            .collect()
    }

    /// Points that realize every distinct ball-count profile. For the
    /// complete binary tree the automorphism group is transitive on
    /// depth classes, so one spine node per depth is enough; other
    /// representations enumerate every point.
    fn ball_profile_representatives(&self) -> Vec<u32> {
        match &self.repr {
            MetricRepr::BinaryTree { depth } => (0..=*depth).map(|k| (1u32 << k) - 1).collect(),
            _ => (0..self.len() as u32).collect(),
        }
    }

    pub fn max_ball_count(&self, r: f64) -> usize {
        self.ball_profile_representatives()
            .into_iter()
            .map(|x| self.ball_count(x, r))
            .max()
            .unwrap_or(0)
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len() as u32;
        let mut best = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                best = best.max(self.dist(a, b));
            }
        }
        best
    }
}

/// Ordinary least-squares growth exponent: the slope of
/// `log(count)` against `log(1 + r)` over `(radius, count)` samples.
/// Needs at least two distinct radii, else `DEGENERATE_FIT`.
pub fn fit_growth_exponent(samples: &[(f64, u64)]) -> Result<f64> {
    let mut distinct: Vec<f64> = samples.iter().map(|&(r, _)| r).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateFit("need at least 2 distinct radii".into()));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(r, c)| ((1.0 + r).ln(), (c.max(1) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in &pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::DegenerateFit("need at least 2 distinct radii".into()));
    }
    Ok(num / den)
}

/// Full growth table of a space plus the fitted exponent.
#[derive(Debug, Clone)]
pub struct SpaceGrowth {
    pub rows: Vec<crate::report::GrowthRow>,
    pub exponent: f64,
}

/// Closed-ball counts for every point at every radius, with the
/// least-squares exponent fitted on the per-radius maxima.
pub fn space_growth(space: &FiniteMetricSpace, radii: &[f64]) -> Result<SpaceGrowth> {
    let mut rows = Vec::with_capacity(space.len() * radii.len());
    for x in 0..space.len() as u32 {
        for &r in radii {
            rows.push(crate::report::GrowthRow {
                unit: x,
                r,
                count: space.ball_count(x, r) as u64,
            });
        }
    }
    let samples: Vec<(f64, u64)> = radii
        .iter()
        .map(|&r| {
            let max = rows
                .iter()
                .filter(|row| row.r == r)
                .map(|row| row.count)
                .max()
                .unwrap_or(0);
            (r, max)
        })
        .collect();
    let exponent = fit_growth_exponent(&samples)?;
    Ok(SpaceGrowth { rows, exponent })
}

// ------------------------------------------------------------------ kernels

/// A kernel `k: X × X → ℂ`, stored as the matrix `[k(x, y)]` acting on
/// `ℓ²(X)`.
#[derive(Debug, Clone)]
pub struct Kernel {
    m: DMatrix<Complex64>,
}

impl Kernel {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Schema("kernel matrix must be square".into()));
        }
        Ok(Self { m })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32, u32) -> Complex64) -> Self {
        Self {
            m: DMatrix::from_fn(n, n, |x, y| f(x as u32, y as u32)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, x: u32, y: u32) -> Complex64 {
        self.m[(x as usize, y as usize)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// The adjoint kernel `k*(x, y) = conj(k(y, x))`.
    pub fn adjoint(&self) -> Kernel {
        Kernel {
            m: self.m.adjoint(),
        }
    }

    /// The all-ones kernel on `B(center, r) × B(center, r)`.
    pub fn ball_ones(space: &FiniteMetricSpace, center: u32, r: f64) -> Kernel {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut member = vec![false; space.len()];
        for p in space.ball(center, r) {
            member[p as usize] = true;
        }
        Kernel::from_fn(space.len(), |x, y| {
            if member[x as usize] && member[y as usize] {
                one
            } else {
                zero
            }
        })
    }
}

/// Propagation of a kernel: the largest distance on its support, with
/// an explicit flag for the empty support (value reported as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub value: f64,
    pub empty: bool,
}

pub fn propagation(space: &FiniteMetricSpace, k: &Kernel) -> Result<Propagation> {
    if k.dim() != space.len() {
        return Err(Error::Schema(format!(
            "kernel on {} points does not match space with {} points",
            k.dim(),
            space.len()
        )));
    }
    let mut value = f64::NEG_INFINITY;
    for x in 0..k.dim() as u32 {
        for y in 0..k.dim() as u32 {
            if k.entry(x, y) != Complex64::new(0.0, 0.0) {
                value = value.max(space.dist(x, y));
            }
        }
    }
    if value == f64::NEG_INFINITY {
        Ok(Propagation {
            value: 0.0,
            empty: true,
        })
    } else {
        Ok(Propagation {
            value,
            empty: false,
        })
    }
}

/// Operator norm of the kernel on `ℓ²(X)`.
pub fn roe_norm(k: &Kernel) -> Result<SpectralEstimate> {
    operator_norm(&k.m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsMode {
    Plain,
    Star,
}

/// The weighted decay norm
/// `‖k‖ = (sup_y Σ_x |k(x,y)|² (1 + d(x,y))^{2t})^{1/2}`; star mode
/// takes the max with the same norm of `k*`.
pub fn bs_norm(space: &FiniteMetricSpace, k: &Kernel, t: f64, mode: BsMode) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeT(t));
    }
    if k.dim() != space.len() {
        return Err(Error::Schema(format!(
            "kernel on {} points does not match space with {} points",
            k.dim(),
            space.len()
        )));
    }
    let n = k.dim() as u32;
    let mut sup = 0.0f64;
    for y in 0..n {
        let mut acc = 0.0f64;
        for x in 0..n {
            acc += k.entry(x, y).norm_sqr() * (1.0 + space.dist(x, y)).powf(2.0 * t);
        }
        sup = sup.max(acc);
    }
    match mode {
        BsMode::Plain => Ok(sup.sqrt()),
        BsMode::Star => {
            let mut sup_star = 0.0f64;
            for y in 0..n {
                let mut acc = 0.0f64;
                for x in 0..n {
                    // |k*(x,y)| = |k(y,x)|; d is symmetric.
                    acc += k.entry(y, x).norm_sqr() * (1.0 + space.dist(x, y)).powf(2.0 * t);
                }
                sup_star = sup_star.max(acc);
            }
            Ok(sup.max(sup_star).sqrt())
        }
    }
}

/// Center sampling cap for kernel scans.
const MAX_SCAN_CENTERS: usize = 32;
/// Radius grid cap for ball-kernel scans.
const MAX_SCAN_RADII: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricFamily {
    /// Rank-one all-ones kernels on metric balls.
    BallKernels,
    /// Dense iid complex kernels, one per trial.
    RandomComplex,
}

impl MetricFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MetricFamily::BallKernels => "ball_kernels",
            MetricFamily::RandomComplex => "random_complex",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "balls" | "ball_kernels" => Ok(MetricFamily::BallKernels),
            "random" | "random_complex" => Ok(MetricFamily::RandomComplex),
            other => Err(Error::Schema(format!(
                "unknown kernel family {other:?}; expected balls or random"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MRDScanConfig {
    pub trials: u32,
    pub seed: u64,
    pub max_centers: usize,
    pub radii: Option<Vec<f64>>,
}

impl Default for MRDScanConfig {
    fn default() -> Self {
        MRDScanConfig {
            trials: 100,
            seed: 7,
            max_centers: MAX_SCAN_CENTERS,
            radii: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MRDScanResult {
    pub t: f64,
    pub family: MetricFamily,
    /// `(kernel id, ratio)` for every evaluated kernel.
    pub ratios: Vec<(u32, f64)>,
    pub max_ratio: f64,
    pub argmax: u32,
    pub rows: Vec<ScanRow>,
}

fn sampled_centers(space: &FiniteMetricSpace, max_centers: usize) -> Vec<u32> {
    let n = space.len();
    if n <= max_centers || max_centers == 0 {
        return (0..n as u32).collect();
    }
    let stride = n.div_ceil(max_centers);
    (0..n as u32).step_by(stride).collect()
}

fn quantile_distances(space: &FiniteMetricSpace, centers: &[u32]) -> Vec<f64> {
    let mut values = Vec::new();
    for &c in centers {
        for x in 0..space.len() as u32 {
            values.push(space.dist(x, c));
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    values.dedup();
    if values.len() <= MAX_SCAN_RADII {
        return values;
    }
    let mut picks = Vec::with_capacity(MAX_SCAN_RADII);
    for i in 0..MAX_SCAN_RADII {
        let idx = (i * (values.len() - 1)) / (MAX_SCAN_RADII - 1);
        picks.push(values[idx]);
    }
    picks.dedup();
    picks
}

/// Max `roe_norm / bs_norm(star)` ratio over a deterministic kernel
/// family; the metric mirror of the groupoid scan.
pub fn mrd_scan(
    space: &FiniteMetricSpace,
    t: f64,
    family: MetricFamily,
    trials: u32,
    seed: u64,
) -> Result<MRDScanResult> {
    mrd_scan_with(
        space,
        t,
        family,
        &MRDScanConfig {
            trials,
            seed,
            ..MRDScanConfig::default()
        },
    )
}

pub fn mrd_scan_with(
    space: &FiniteMetricSpace,
    t: f64,
    family: MetricFamily,
    config: &MRDScanConfig,
) -> Result<MRDScanResult> {
    if !(t >= 0.0) {
        return Err(Error::NegativeT(t));
    }
    if space.is_empty() {
        return Err(Error::EmptyFamily("empty metric space".into()));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = 0u32;
    let mut id = 0u32;
    let mut visit = |param: String,
                     kernel: Kernel,
                     bound: f64,
                     rows: &mut Vec<ScanRow>,
                     ratios: &mut Vec<(u32, f64)>|
     -> Result<()> {
        let est = roe_norm(&kernel)?;
        let denom = bs_norm(space, &kernel, t, BsMode::Star)?;
        if denom == 0.0 {
            return Ok(());
        }
        let ratio = est.value / denom;
        rows.push(ScanRow {
            kind: family.name().to_owned(),
            t,
            param,
            ratio,
            bound,
            residual: est.residual,
        });
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = id;
        }
        ratios.push((id, ratio));
        id += 1;
        Ok(())
    };
    match family {
        MetricFamily::BallKernels => {
            let centers = sampled_centers(space, config.max_centers);
            let radii = match &config.radii {
                Some(r) => r.clone(),
                None => quantile_distances(space, &centers),
            };
            for &c in &centers {
                for &r in &radii {
                    let count = space.ball_count(c, r);
                    if count == 0 {
                        continue;
                    }
                    let kernel = Kernel::ball_ones(space, c, r);
                    let bound =
                        (count as f64).sqrt() * (1.0 + 2.0 * r).powf(-t);
                    visit(
                        format!("center={c};r={r}"),
                        kernel,
                        bound,
                        &mut rows,
                        &mut ratios,
                    )?;
                }
            }
        }
        MetricFamily::RandomComplex => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let n = space.len();
            for trial in 0..config.trials {
                let m = DMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                visit(
                    format!("trial={trial}"),
                    Kernel { m },
                    0.0,
                    &mut rows,
                    &mut ratios,
                )?;
            }
        }
    }
    if ratios.is_empty() {
        return Err(Error::EmptyFamily(format!(
            "kernel family {} produced no admissible kernels",
            family.name()
        )));
    }
    Ok(MRDScanResult {
        t,
        family,
        ratios,
        max_ratio,
        argmax,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFamily {
    Paths,
    Grids,
    BinaryTrees,
}

impl SpaceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceFamily::Paths => "paths",
            SpaceFamily::Grids => "grids",
            SpaceFamily::BinaryTrees => "trees",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "paths" => Ok(SpaceFamily::Paths),
            "grids" => Ok(SpaceFamily::Grids),
            "trees" => Ok(SpaceFamily::BinaryTrees),
            other => Err(Error::Schema(format!(
                "unknown space family {other:?}; expected paths, grids, or trees"
            ))),
        }
    }

    /// The space for one size parameter: point count for paths, side
    /// length for square grids, depth for binary trees.
    pub fn instance(&self, size: u32) -> Result<FiniteMetricSpace> {
        match self {
            SpaceFamily::Paths => FiniteMetricSpace::path(size),
            SpaceFamily::Grids => FiniteMetricSpace::grid(size, size),
            SpaceFamily::BinaryTrees => FiniteMetricSpace::binary_tree(size),
        }
    }

    /// Radius at which a ball from the best center saturates the space.
    fn witness_radius(&self, space: &FiniteMetricSpace, size: u32) -> f64 {
        match self {
            SpaceFamily::BinaryTrees => size as f64,
            _ => space.diameter(),
        }
    }
}

/// The metric mirror of the groupoid dichotomy experiment: growth
/// exponents, ball-kernel scan maxima, and closed-form saturated-ball
/// bounds per size, classified with the shared thresholds.
pub fn metric_dichotomy(
    family: SpaceFamily,
    sizes: &[u32],
    t_grid: &[f64],
    seed: u64,
) -> Result<Vec<DichotomyRow>> {
    if sizes.is_empty() || t_grid.is_empty() {
        return Err(Error::EmptyFamily(
            "dichotomy needs nonempty size and t grids".into(),
        ));
    }
    let mut growth = Vec::with_capacity(sizes.len());
    let mut witness_bounds_t: Vec<Vec<f64>> = vec![Vec::new(); t_grid.len()];
    let mut scan_max_t: Vec<Vec<f64>> = vec![Vec::new(); t_grid.len()];
    for &size in sizes {
        let space = family.instance(size)?;
        let rmax = ((space.diameter() / 2.0).floor() as u64).clamp(2, 10);
        let radii: Vec<(f64, u64)> = (1..=rmax)
            .map(|r| (r as f64, space.max_ball_count(r as f64) as u64))
            .collect();
        growth.push(fit_growth_exponent(&radii)?);
        let witness_radius = family.witness_radius(&space, size);
        let fiber = space.max_ball_count(witness_radius) as u64;
        let config = MRDScanConfig {
            seed,
            max_centers: if family == SpaceFamily::BinaryTrees {
                1
            } else {
                MAX_SCAN_CENTERS
            },
            radii: if family == SpaceFamily::BinaryTrees {
                Some(vec![witness_radius])
            } else {
                None
            },
            ..MRDScanConfig::default()
        };
        for (ti, &t) in t_grid.iter().enumerate() {
            let scan =
                mrd_scan_with(&space, t, MetricFamily::BallKernels, &config)?;
            scan_max_t[ti].push(scan.max_ratio);
            witness_bounds_t[ti]
                .push((fiber as f64).sqrt() * (1.0 + 2.0 * witness_radius).powf(-t));
        }
    }
    let mut out = Vec::with_capacity(sizes.len() * t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let classification = classify_dichotomy(&scan_max_t[ti], &witness_bounds_t[ti]);
        for (si, &size) in sizes.iter().enumerate() {
            out.push(DichotomyRow {
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
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn builtin_generators_are_valid_metrics() {
        for space in [
            FiniteMetricSpace::path(6).unwrap(),
            FiniteMetricSpace::grid(3, 4).unwrap(),
            FiniteMetricSpace::binary_tree(3).unwrap(),
        ] {
            assert!(space.validate().is_empty());
        }
    }

    #[test]
    fn path_distances_and_balls() {
        let p = FiniteMetricSpace::path(5).unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.dist(0, 4), 4.0);
        assert_eq!(p.ball_count(0, 2.0), 3); // closed ball {0,1,2}
        assert_eq!(p.ball_count(2, 1.0), 3);
        assert_eq!(p.max_ball_count(1.0), 3);
        assert_eq!(p.diameter(), 4.0);
    }

    #[test]
    fn grid_metric_matches_unit_edge_shortest_paths() {
        let g = FiniteMetricSpace::grid(3, 2).unwrap();
        let mut edges = Vec::new();
        for y in 0..2u32 {
            for x in 0..3u32 {
                let p = y * 3 + x;
                if x + 1 < 3 {
                    edges.push((p, p + 1, 1u64));
                }
                if y + 1 < 2 {
                    edges.push((p, p + 3, 1u64));
                }
            }
        }
        let viaedges = FiniteMetricSpace::from_edges(6, &edges).unwrap();
        for a in 0..6u32 {
            for b in 0..6u32 {
                assert_eq!(g.dist(a, b), viaedges.dist(a, b));
            }
        }
    }

    #[test]
    fn binary_tree_distances_follow_heap_ancestry() {
        let t = FiniteMetricSpace::binary_tree(2).unwrap();
        assert_eq!(t.len(), 7);
        // Points: 0 root; 1,2 its children; 3..6 leaves.
        assert_eq!(t.dist(0, 3), 2.0);
        assert_eq!(t.dist(3, 4), 2.0); // siblings through point 1
        assert_eq!(t.dist(3, 6), 4.0); // across the root
        assert_eq!(t.dist(1, 2), 2.0);
        assert_eq!(t.dist(5, 5), 0.0);
        // Ball at the root of radius depth covers the whole tree.
        assert_eq!(t.ball_count(0, 2.0), 7);
        let deep = FiniteMetricSpace::binary_tree(5).unwrap();
        assert_eq!(deep.ball_count(0, 5.0), (1 << 6) - 1);
    }

    #[test]
    fn matrix_loads_enforce_metric_axioms() {
        // Valid 3-point metric.
        let ok = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]);
        assert!(ok.is_ok());

        // Triangle violation: d(0,2) = 5 > 1 + 1.
        let err = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap_err();
        assert!(err.to_string().contains(codes::METRIC_TRIANGLE));

        // Asymmetry.
        let err = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains(codes::METRIC_SYMMETRY));

        // Nonzero diagonal.
        let err = FiniteMetricSpace::from_matrix(&[vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains(codes::METRIC_DIAGONAL));

        // Negative entry.
        let err =
            FiniteMetricSpace::from_matrix(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains(codes::METRIC_NEGATIVE));
    }

    #[test]
    fn edge_list_loads_need_connectivity_and_positive_integer_weights() {
        assert!(matches!(
            FiniteMetricSpace::from_edges(3, &[(0, 1, 1)]),
            Err(Error::Disconnected(_))
        ));
        assert!(FiniteMetricSpace::from_edges(2, &[(0, 1, 0)]).is_err());
        // Weighted path: distances scale with the weight.
        let s = FiniteMetricSpace::from_edges(3, &[(0, 1, 2), (1, 2, 2)]).unwrap();
        assert_eq!(s.dist(0, 2), 4.0);
        assert!(s.validate().is_empty());
    }

    #[test]
    fn propagation_reports_support_extent_and_emptiness() {
        let p3 = FiniteMetricSpace::path(3).unwrap();
        let diag = Kernel::from_fn(3, |x, y| if x == y { c(2.0, 1.0) } else { c(0.0, 0.0) });
        let pr = propagation(&p3, &diag).unwrap();
        assert_eq!(pr, Propagation { value: 0.0, empty: false });

        let ones = Kernel::from_fn(3, |_, _| c(1.0, 0.0));
        let pr = propagation(&p3, &ones).unwrap();
        assert_eq!(pr, Propagation { value: 2.0, empty: false });

        let zero = Kernel::from_fn(3, |_, _| c(0.0, 0.0));
        let pr = propagation(&p3, &zero).unwrap();
        assert!(pr.empty);
        assert_eq!(pr.value, 0.0);
    }

    #[test]
    fn roe_norm_of_identity_and_all_ones() {
        let id = Kernel::from_fn(5, |x, y| if x == y { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!((roe_norm(&id).unwrap().value - 1.0).abs() < 1e-12);
        let ones = Kernel::from_fn(5, |_, _| c(1.0, 0.0));
        assert!((roe_norm(&ones).unwrap().value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn bs_norm_hand_values() {
        // Two points at distance 1, k ≡ 1, t = 0: each column sums to 2.
        let p2 = FiniteMetricSpace::path(2).unwrap();
        let ones = Kernel::from_fn(2, |_, _| c(1.0, 0.0));
        let v = bs_norm(&p2, &ones, 0.0, BsMode::Plain).unwrap();
        assert!((v - 2.0f64.sqrt()).abs() < 1e-15);

        // Diagonal kernel: every distance on the support is 0, so any t
        // gives sup |k(x,x)|.
        let p3 = FiniteMetricSpace::path(3).unwrap();
        let diag = Kernel::from_fn(3, |x, y| {
            if x == y {
                c(-(x as f64) - 1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        for t in [0.0, 0.7, 3.0] {
            assert!((bs_norm(&p3, &diag, t, BsMode::Star).unwrap() - 3.0).abs() < 1e-15);
        }

        // t = 1 weighting on a single entry at distance 2: (1+2)^{2}.
        let single = Kernel::from_fn(3, |x, y| {
            if (x, y) == (0, 2) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let v = bs_norm(&p3, &single, 1.0, BsMode::Plain).unwrap();
        assert!((v - 3.0).abs() < 1e-15);

        assert!(matches!(
            bs_norm(&p3, &single, -0.5, BsMode::Plain),
            Err(Error::NegativeT(_))
        ));
    }

    #[test]
    fn star_mode_symmetrizes_asymmetric_kernels() {
        let p2 = FiniteMetricSpace::path(2).unwrap();
        let k = Kernel::from_fn(2, |x, y| {
            if (x, y) == (0, 0) {
                c(3.0, 0.0)
            } else if (x, y) == (0, 1) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        // Columns of k at t=0: {9, 1} → plain 3.
        assert!((bs_norm(&p2, &k, 0.0, BsMode::Plain).unwrap() - 3.0).abs() < 1e-15);
        // k* has column 0 = {9, 1} → star √10.
        let star = bs_norm(&p2, &k, 0.0, BsMode::Star).unwrap();
        assert!((star - 10.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ball_ones_kernel_matches_tree_lower_bound_shape() {
        let t = FiniteMetricSpace::binary_tree(3).unwrap();
        let k = Kernel::ball_ones(&t, 0, 3.0);
        let n = t.len() as f64; // 15 points, whole tree
        assert!((roe_norm(&k).unwrap().value - n).abs() < 1e-9);
        let bs = bs_norm(&t, &k, 1.0, BsMode::Star).unwrap();
        // Every column sums over the ball with weights ≤ (1+2·3)²: the
        // norm is at most √(15·49) and at least √15.
        assert!(bs <= (n * 49.0).sqrt() + 1e-12);
        assert!(bs >= n.sqrt() - 1e-12);
        let ratio = roe_norm(&k).unwrap().value / bs;
        assert!(ratio >= n.sqrt() / 7.0 - 1e-12);
    }

    #[test]
    fn tree_depth_class_representatives_cover_all_ball_profiles() {
        let t = FiniteMetricSpace::binary_tree(4).unwrap();
        for r in 0..=8 {
            let brute = (0..t.len() as u32)
                .map(|x| t.ball_count(x, r as f64))
                .max()
                .unwrap();
            assert_eq!(t.max_ball_count(r as f64), brute);
        }
    }

    #[test]
    fn space_growth_counts_trees_exactly() {
        let t = FiniteMetricSpace::binary_tree(5).unwrap();
        let radii: Vec<f64> = (1..=5).map(f64::from).collect();
        let g = space_growth(&t, &radii).unwrap();
        // Root balls: |B(root, r)| = 2^{r+1} − 1 up to the depth.
        for &r in &radii {
            let row = g
                .rows
                .iter()
                .find(|row| row.unit == 0 && row.r == r)
                .unwrap();
            assert_eq!(row.count, (1u64 << (r as u32 + 1)) - 1);
        }
        assert!(g.exponent > 1.5, "tree exponent was {}", g.exponent);
    }

    #[test]
    fn growth_exponent_fits_paths_and_rejects_single_radius() {
        let p = FiniteMetricSpace::path(64).unwrap();
        let samples: Vec<(f64, u64)> = (1..=16)
            .map(|r| (r as f64, p.max_ball_count(r as f64) as u64))
            .collect();
        let e = fit_growth_exponent(&samples).unwrap();
        assert!((e - 1.0).abs() < 0.15, "path growth exponent was {e}");
        assert!(matches!(
            fit_growth_exponent(&[(2.0, 5), (2.0, 5)]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn ball_kernel_scans_respect_their_certified_bounds() {
        let p = FiniteMetricSpace::path(9).unwrap();
        let scan = mrd_scan(&p, 1.0, MetricFamily::BallKernels, 0, 7).unwrap();
        assert!(!scan.rows.is_empty());
        for row in &scan.rows {
            assert!(
                row.ratio >= row.bound - 1e-9,
                "{}: ratio {} below bound {}",
                row.param,
                row.ratio,
                row.bound
            );
        }
        let recorded = scan
            .ratios
            .iter()
            .find(|&&(id, _)| id == scan.argmax)
            .unwrap();
        assert_eq!(recorded.1, scan.max_ratio);
        // Point kernels give ratio exactly 1, and nothing beats it on a
        // path at t = 1.
        assert!((scan.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_scans_are_deterministic() {
        let p = FiniteMetricSpace::path(6).unwrap();
        let a = mrd_scan(&p, 0.5, MetricFamily::RandomComplex, 4, 11).unwrap();
        let b = mrd_scan(&p, 0.5, MetricFamily::RandomComplex, 4, 11).unwrap();
        assert_eq!(
            crate::report::render_csv(&a.rows),
            crate::report::render_csv(&b.rows)
        );
        let c = mrd_scan(&p, 0.5, MetricFamily::RandomComplex, 4, 12).unwrap();
        assert_ne!(
            crate::report::render_csv(&a.rows),
            crate::report::render_csv(&c.rows)
        );
    }

    #[test]
    fn one_point_space_scans_trivially() {
        let p = FiniteMetricSpace::path(1).unwrap();
        let scan = mrd_scan(&p, 1.0, MetricFamily::BallKernels, 0, 7).unwrap();
        assert_eq!(scan.ratios.len(), 1);
        assert!((scan.max_ratio - 1.0).abs() < 1e-12);
        let rows = metric_dichotomy(SpaceFamily::Paths, &[1], &[1.0], 7).unwrap();
        assert_eq!(rows[0].growth_exponent, 0.0);
    }

    #[test]
    fn metric_dichotomy_mirrors_the_groupoid_verdicts() {
        let paths = metric_dichotomy(SpaceFamily::Paths, &[12, 16, 20], &[1.0], 7).unwrap();
        for row in &paths {
            assert!((row.growth_exponent - 1.0).abs() < 0.4);
            assert_eq!(row.classification, "rd_consistent");
        }

        let grids = metric_dichotomy(SpaceFamily::Grids, &[4, 5, 6], &[1.0], 7).unwrap();
        for row in &grids {
            assert!((row.growth_exponent - 2.0).abs() < 0.6, "{}", row.growth_exponent);
            assert_eq!(row.classification, "rd_consistent");
        }

        let trees = metric_dichotomy(SpaceFamily::BinaryTrees, &[3, 4, 5], &[1.0], 7).unwrap();
        let bounds: Vec<f64> = trees.iter().map(|r| r.witness_bound).collect();
        assert!(bounds.windows(2).all(|w| w[1] > w[0]), "{bounds:?}");
        for (row, &d) in trees.iter().zip(&[3u32, 4, 5]) {
            let expect = ((2f64.powi(d as i32 + 1) - 1.0).sqrt())
                / (1.0 + 2.0 * d as f64);
            assert!((row.witness_bound - expect).abs() < 1e-12);
            assert_eq!(row.classification, "rd_violating");
        }
    }

    #[test]
    fn kernel_norms_bridge_to_the_pair_groupoid() {
        use crate::algebra::{self, GFunction, SeminormMode};
        use crate::length::LengthFunction;
        use crate::twist::Cocycle;
        use rand::Rng;

        let n = 8u32;
        let space = std::sync::Arc::new(FiniteMetricSpace::path(n).unwrap());
        let g = crate::groupoid::Groupoid::pair(n).unwrap();
        let l = LengthFunction::pair_metric(space.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..5 {
            let m = DMatrix::from_fn(n as usize, n as usize, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let kernel = Kernel::new(m).unwrap();
            // f(arrow y·n+x) = k(y, x): the fiber operator at any unit
            // is then exactly the kernel matrix.
            let coeffs: Vec<Complex64> = (0..n * n)
                .map(|a| kernel.entry(a / n, a % n))
                .collect();
            let f = GFunction::from_coeffs(&g, coeffs).unwrap();

            let roe = roe_norm(&kernel).unwrap().value;
            let red = algebra::reduced_norm(&g, &f, &Cocycle::trivial()).unwrap();
            assert!((roe - red).abs() < 1e-9, "{roe} vs {red}");

            for t in [0.0, 0.5, 1.0, 2.0] {
                let star = bs_norm(&space, &kernel, t, BsMode::Star).unwrap();
                let semi =
                    algebra::weighted_seminorm(&g, &f, &l, t, SeminormMode::Symmetric)
                        .unwrap();
                assert_eq!(star, semi, "t={t}: {star} vs {semi}");
                let plain = bs_norm(&space, &kernel, t, BsMode::Plain).unwrap();
                let sup =
                    algebra::weighted_seminorm(&g, &f, &l, t, SeminormMode::SupSource)
                        .unwrap();
                assert_eq!(plain, sup, "t={t}: {plain} vs {sup}");
            }
        }
    }

    #[test]
    fn growth_counts_bridge_to_the_pair_groupoid() {
        let n = 6u32;
        let space = std::sync::Arc::new(FiniteMetricSpace::path(n).unwrap());
        let g = crate::groupoid::Groupoid::pair(n).unwrap();
        let l = crate::length::LengthFunction::pair_metric(space.clone());
        let radii: Vec<f64> = (0..=5).map(f64::from).collect();
        let sg = space_growth(&space, &radii).unwrap();
        let gp = crate::length::growth_profile(&g, &l, &radii).unwrap();
        assert_eq!(sg.rows.len(), gp.rows.len());
        for (srow, grow) in sg.rows.iter().zip(&gp.rows) {
            // Space rows carry point ids, groupoid rows unit arrow ids.
            assert_eq!(grow.unit, srow.unit * n + srow.unit);
            assert_eq!(srow.r, grow.r);
            assert_eq!(srow.count, grow.count);
        }
        assert_eq!(sg.exponent, gp.exponent);
    }
}
