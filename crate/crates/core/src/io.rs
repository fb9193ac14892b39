//! JSON loaders for the on-disk object kinds, plus `builtin:` spec
//! strings for generated families that would be unwieldy as files.
//!
//! Error taxonomy at this boundary: unreadable bytes are `Io`,
//! malformed JSON is `Parse`, well-formed JSON with the wrong shape or
//! a dangling id is `Schema`, and structurally sound input that fails
//! the object's axioms is `Validation`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::algebra::GFunction;
use crate::error::{Error, Result};
use crate::groupoid::{Arrow, ArrowId, Groupoid, GroupoidHom};
use crate::length::{validate_length, word_length, LengthFunction};
use crate::metric::FiniteMetricSpace;
use crate::twist::{validate_cocycle, Cocycle};

/// Prefix marking a groupoid or space spec as a generated family
/// rather than a file path.
pub const BUILTIN_PREFIX: &str = "builtin:";

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_value(value).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// File references to missing ids are schema problems, not a detail of
/// whichever constructor noticed them.
fn schema_boundary(e: Error) -> Error {
    match e {
        Error::DanglingId(msg) => Error::Schema(msg),
        other => other,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupoidFile {
    units: Vec<ArrowId>,
    arrows: Vec<ArrowRecord>,
    product: Vec<(ArrowId, ArrowId, ArrowId)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowRecord {
    id: ArrowId,
    src: ArrowId,
    rng: ArrowId,
    inv: ArrowId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomFile {
    map: Vec<(ArrowId, ArrowId)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthFile {
    values: Vec<(ArrowId, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleFile {
    default: ComplexRepr,
    entries: Vec<(ArrowId, ArrowId, f64, f64)>,
}

/// A complex scalar in JSON: a bare real or an `[re, im]` pair.
#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Pair(f64, f64),
}

impl ComplexRepr {
    fn to_complex(&self) -> Complex64 {
        match *self {
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
            ComplexRepr::Pair(re, im) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    coeffs: Vec<(ArrowId, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpaceFile {
    points: Vec<u32>,
    edges: Vec<(u32, u32, u64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseSpaceFile {
    dist: Vec<Vec<f64>>,
}

/// Loads a groupoid file and checks the groupoid axioms.
pub fn load_groupoid(path: &Path) -> Result<Groupoid> {
    let file: GroupoidFile = read_json(path)?;
    let arrows = file
        .arrows
        .iter()
        .map(|r| Arrow {
            id: r.id,
            src: r.src,
            rng: r.rng,
            inv: r.inv,
        })
        .collect();
    let g = Groupoid::from_parts(file.units, arrows, file.product).map_err(schema_boundary)?;
    let violations = g.validate();
    if violations.is_empty() {
        Ok(g)
    } else {
        Err(Error::validation("groupoid", violations))
    }
}

/// Loads a homomorphism file against its domain. The map must name
/// every domain arrow exactly once; semantic validation against the
/// codomain stays with the caller, which has both groupoids.
pub fn load_hom(path: &Path, dom: &Groupoid) -> Result<GroupoidHom> {
    let file: HomFile = read_json(path)?;
    let n = dom.num_arrows();
    let mut map = vec![ArrowId::MAX; n];
    let mut seen = vec![false; n];
    for &(h, g) in &file.map {
        let idx = h as usize;
        if idx >= n {
            return Err(Error::Schema(format!(
                "map entry references arrow {h} outside the domain's 0..{n}"
            )));
        }
        if seen[idx] {
            return Err(Error::Schema(format!("duplicate map entry for arrow {h}")));
        }
        seen[idx] = true;
        map[idx] = g;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Schema(format!(
            "map must cover every domain arrow; arrow {missing} is missing"
        )));
    }
    Ok(GroupoidHom { map })
}

/// Loads a length file: every arrow must carry a value, and the result
/// must satisfy the length axioms.
pub fn load_length(path: &Path, g: &Groupoid) -> Result<LengthFunction> {
    let file: LengthFile = read_json(path)?;
    let l = LengthFunction::from_values(g, &file.values).map_err(schema_boundary)?;
    let violations = validate_length(g, &l)?;
    if violations.is_empty() {
        Ok(l)
    } else {
        Err(Error::validation("length function", violations))
    }
}

/// Loads a cocycle file. Entries must sit on composable pairs of the
/// groupoid; absent pairs take the file's default value; the loaded
/// table must pass the cocycle identity and normalization checks.
pub fn load_cocycle(path: &Path, g: &Groupoid) -> Result<Cocycle> {
    let file: CocycleFile = read_json(path)?;
    let n = g.num_arrows() as u32;
    let mut raw = Vec::with_capacity(file.entries.len());
    for &(a, b, re, im) in &file.entries {
        if a >= n || b >= n {
            return Err(Error::Schema(format!(
                "cocycle entry ({a}, {b}) references arrows outside 0..{n}"
            )));
        }
        if g.compose(a, b).is_none() {
            return Err(Error::Schema(format!(
                "cocycle entry ({a}, {b}) is not a composable pair"
            )));
        }
        raw.push((a, b, Complex64::new(re, im)));
    }
    let sigma = Cocycle::table_from_entries(file.default.to_complex(), &raw)?;
    let violations = validate_cocycle(g, &sigma)?;
    if violations.is_empty() {
        Ok(sigma)
    } else {
        Err(Error::validation("cocycle", violations))
    }
}

/// Loads a function file; omitted arrows are zero.
pub fn load_function(path: &Path, g: &Groupoid) -> Result<GFunction> {
    let file: FunctionFile = read_json(path)?;
    let entries: Vec<(ArrowId, Complex64)> = file
        .coeffs
        .iter()
        .map(|&(a, re, im)| (a, Complex64::new(re, im)))
        .collect();
    GFunction::from_entries(g, &entries).map_err(schema_boundary)
}

/// Loads a metric space file in either encoding: weighted edges with
/// shortest-path completion, or a dense distance matrix.
pub fn load_space(path: &Path) -> Result<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let dense = value.as_object().is_some_and(|o| o.contains_key("dist"));
    if dense {
        let file: DenseSpaceFile = serde_json::from_value(value)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        FiniteMetricSpace::from_matrix(&file.dist)
    } else {
        let file: EdgeSpaceFile = serde_json::from_value(value)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        let n = file.points.len() as u32;
        for (i, &p) in file.points.iter().enumerate() {
            if p != i as u32 {
                return Err(Error::Schema(format!(
                    "points must be exactly 0..{n} in order; saw {p} at position {i}"
                )));
            }
        }
        FiniteMetricSpace::from_edges(n, &file.edges).map_err(schema_boundary)
    }
}

/// `true` when a groupoid or space spec names a generated family.
pub fn is_builtin_spec(spec: &str) -> bool {
    spec.starts_with(BUILTIN_PREFIX)
}

/// `true` when a length spec is inline rather than a file path.
pub fn is_inline_length_spec(spec: &str) -> bool {
    spec == "metric" || spec.starts_with("word:")
}

/// `true` when a cocycle spec is inline rather than a file path.
pub fn is_inline_cocycle_spec(spec: &str) -> bool {
    spec == "trivial" || spec == "heisenberg"
}

fn parse_builtin(spec: &str) -> Result<(&str, u32)> {
    let rest = &spec[BUILTIN_PREFIX.len()..];
    let (kind, arg) = rest.split_once(':').ok_or_else(|| {
        Error::Schema(format!(
            "builtin spec {spec} must look like builtin:<family>:<size>"
        ))
    })?;
    let n: u32 = arg.parse().map_err(|_| {
        Error::Schema(format!("builtin spec {spec} has a non-numeric size {arg}"))
    })?;
    Ok((kind, n))
}

/// Resolves a groupoid spec: a JSON file path, or one of the builtin
/// families `builtin:path:N`, `builtin:grid:N` (an `N x N` grid),
/// `builtin:tree:D` (the full binary tree of depth `D`),
/// `builtin:pair:N`, and `builtin:cyclic:N`. Pair-groupoid families
/// built over a metric space also return that space so a `metric`
/// length spec can reuse it.
pub fn resolve_groupoid(spec: &str) -> Result<(Groupoid, Option<Arc<FiniteMetricSpace>>)> {
    if !is_builtin_spec(spec) {
        return Ok((load_groupoid(Path::new(spec))?, None));
    }
    let (kind, n) = parse_builtin(spec)?;
    match kind {
        "path" => {
            let space = Arc::new(FiniteMetricSpace::path(n)?);
            Ok((Groupoid::pair(n)?, Some(space)))
        }
        "grid" => {
            let space = Arc::new(FiniteMetricSpace::grid(n, n)?);
            let points = space.len() as u32;
            Ok((Groupoid::pair(points)?, Some(space)))
        }
        "tree" => {
            let space = Arc::new(FiniteMetricSpace::binary_tree(n)?);
            let points = space.len() as u32;
            Ok((Groupoid::pair(points)?, Some(space)))
        }
        "pair" => Ok((Groupoid::pair(n)?, None)),
        "cyclic" => Ok((Groupoid::cyclic(n)?, None)),
        other => Err(Error::Schema(format!(
            "unknown builtin groupoid family {other}; expected path, grid, tree, pair, or cyclic"
        ))),
    }
}

/// Resolves a metric-space spec: a JSON file path or `builtin:path:N`,
/// `builtin:grid:N`, `builtin:tree:D`.
pub fn resolve_space(spec: &str) -> Result<FiniteMetricSpace> {
    if !is_builtin_spec(spec) {
        return load_space(Path::new(spec));
    }
    let (kind, n) = parse_builtin(spec)?;
    match kind {
        "path" => FiniteMetricSpace::path(n),
        "grid" => FiniteMetricSpace::grid(n, n),
        "tree" => FiniteMetricSpace::binary_tree(n),
        other => Err(Error::Schema(format!(
            "unknown builtin space family {other}; expected path, grid, or tree"
        ))),
    }
}

/// Resolves a length spec: `metric` (the pair-groupoid length of the
/// family's own metric space), `word:i,j,k` (word length for the given
/// generating arrows), or a JSON file path.
pub fn resolve_length(
    spec: &str,
    g: &Groupoid,
    metric: Option<&Arc<FiniteMetricSpace>>,
) -> Result<LengthFunction> {
    if spec == "metric" {
        let space = metric.ok_or_else(|| {
            Error::Schema(
                "length spec `metric` needs a groupoid family that carries a metric space \
                 (builtin path, grid, or tree)"
                    .into(),
            )
        })?;
        return Ok(LengthFunction::pair_metric(Arc::clone(space)));
    }
    if let Some(list) = spec.strip_prefix("word:") {
        let mut generators = Vec::new();
        for part in list.split(',') {
            let a: ArrowId = part.trim().parse().map_err(|_| {
                Error::Schema(format!("word-length generator {part} is not an arrow id"))
            })?;
            generators.push(a);
        }
        return word_length(g, &generators);
    }
    load_length(Path::new(spec), g)
}

/// Resolves a cocycle spec: `trivial`, `heisenberg` (the sign cocycle
/// on the four-arrow Z2 x Z2 group), or a JSON file path.
pub fn resolve_cocycle(spec: &str, g: &Groupoid) -> Result<Cocycle> {
    match spec {
        "trivial" => Ok(Cocycle::trivial()),
        "heisenberg" => {
            if g.num_arrows() != 4 {
                return Err(Error::Schema(format!(
                    "the heisenberg cocycle lives on the four-arrow Z2 x Z2 group; \
                     this groupoid has {} arrows",
                    g.num_arrows()
                )));
            }
            let (_, sigma) = Cocycle::heisenberg_z2z2();
            let violations = validate_cocycle(g, &sigma)?;
            if violations.is_empty() {
                Ok(sigma)
            } else {
                Err(Error::validation("cocycle", violations))
            }
        }
        path => load_cocycle(Path::new(path), g),
    }
}
