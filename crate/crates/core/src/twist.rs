//! Twists over finite groupoids, realized as normalized circle-valued
//! 2-cocycles.
//!
//! A cocycle assigns a unit-modulus complex number `σ(a, b)` to every
//! composable pair, with `σ(r(a), a) = σ(a, s(a)) = 1` and the cocycle
//! identity `σ(a,b)·σ(ab,c) = σ(b,c)·σ(a,bc)`. For finite groupoids
//! every twist is realized this way, so the section bookkeeping of the
//! general theory collapses into explicit phases.
//!
//! Representations:
//!
//! * `Trivial` — constantly 1.
//! * `Table` — explicit values over composable pairs with a default,
//!   the representation used for loaded files and for materialized
//!   pullback/product/perturbed cocycles.
//! * `Coboundary` — `σ(a,b) = b(a)·b(b)·conj(b(ab))` for a unit-modulus
//!   arrow phase `b` with `b = 1` on units. The phase itself is stored
//!   either densely or, on pair groupoids, as a rank-one phase profile
//!   `b((y,x)) = exp(i·θ_y·φ_x)` so that tree-sized groupoids never
//!   materialize per-arrow data.

use num_complex::Complex64;

use crate::error::{codes, Error, Result, Violation};
use crate::groupoid::{ArrowId, Groupoid, GroupoidHom};

/// Modulus tolerance for validation.
pub const MODULUS_TOL: f64 = 1e-12;
/// Tolerance for the cocycle identity.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Loads renormalize moduli within this deviation and reject beyond it.
pub const LOAD_MODULUS_TOL: f64 = 1e-6;
/// Cap on materialized cocycle tables (composable-pair count).
const TABLE_LIMIT: usize = 4_000_000;
/// Full triple sweeps on implicit pair groupoids stop past this size.
const PAIR_SWEEP_LIMIT: u32 = 64;

fn pack(a: ArrowId, b: ArrowId) -> u64 {
    ((a as u64) << 32) | b as u64
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub enum CoboundaryPhase {
    /// One unit-modulus value per arrow, 1 on units.
    Dense(Vec<Complex64>),
    /// On the pair groupoid of `n = theta.len()` points:
    /// `b((y,x)) = exp(i·theta[y]·phi[x])` off the diagonal, 1 on units.
    PairProduct { theta: Vec<f64>, phi: Vec<f64> },
}

impl CoboundaryPhase {
    fn value(&self, a: ArrowId) -> Complex64 {
        match self {
            CoboundaryPhase::Dense(b) => b[a as usize],
            CoboundaryPhase::PairProduct { theta, phi } => {
                let n = theta.len() as u32;
                let (y, x) = (a / n, a % n);
                if y == x {
                    ONE
                } else {
                    Complex64::from_polar(1.0, theta[y as usize] * phi[x as usize])
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cocycle {
    Trivial,
    Table {
        default: Complex64,
        entries: Vec<(u64, Complex64)>,
    },
    Coboundary(CoboundaryPhase),
}

impl Cocycle {
    pub fn trivial() -> Self {
        Cocycle::Trivial
    }

    /// Builds a table cocycle from `(a, b, value)` entries, as loaded
    /// from files: moduli within [`LOAD_MODULUS_TOL`] of 1 are
    /// renormalized, anything further off is rejected. Pairs without an
    /// entry take the (equally renormalized) default.
    pub fn table_from_entries(
        default: Complex64,
        raw: &[(ArrowId, ArrowId, Complex64)],
    ) -> Result<Self> {
        let normalize = |z: Complex64, what: &str| -> Result<Complex64> {
            let m = z.norm();
            if (m - 1.0).abs() > LOAD_MODULUS_TOL {
                return Err(Error::validation(
                    "cocycle",
                    vec![Violation::new(
                        codes::NOT_UNIMODULAR,
                        vec![],
                        format!("{what} has modulus {m}"),
                    )],
                ));
            }
            Ok(z / Complex64::from(m))
        };
        let default = normalize(default, "default value")?;
        let mut entries = Vec::with_capacity(raw.len());
        for &(a, b, z) in raw {
            entries.push((pack(a, b), normalize(z, &format!("entry ({a}, {b})"))?));
        }
        entries.sort_unstable_by_key(|&(k, _)| k);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Schema("duplicate cocycle entry".into()));
        }
        Ok(Cocycle::Table { default, entries })
    }

    /// The coboundary `σ(a,b) = b(a)·b(b)·conj(b(ab))` of a dense
    /// unit-modulus arrow phase. The phase must be 1 on units.
    pub fn coboundary(g: &Groupoid, b: Vec<Complex64>) -> Result<Self> {
        if b.len() != g.num_arrows() {
            return Err(Error::GroupoidMismatch(format!(
                "phase vector has {} values for {} arrows",
                b.len(),
                g.num_arrows()
            )));
        }
        for (a, z) in b.iter().enumerate() {
            if (z.norm() - 1.0).abs() > LOAD_MODULUS_TOL {
                return Err(Error::Schema(format!(
                    "phase at arrow {a} has modulus {}",
                    z.norm()
                )));
            }
        }
        for &u in &g.units() {
            if (b[u as usize] - ONE).norm() > MODULUS_TOL {
                return Err(Error::Schema(format!(
                    "coboundary phase must be 1 on units; unit {u} carries {}",
                    b[u as usize]
                )));
            }
        }
        let b = b
            .into_iter()
            .map(|z| z / Complex64::from(z.norm()))
            .collect();
        Ok(Cocycle::Coboundary(CoboundaryPhase::Dense(b)))
    }

    /// Rank-one coboundary phases on the pair groupoid of `n` points:
    /// `b((y,x)) = exp(i·theta[y]·phi[x])` off-diagonal. Nothing is
    /// materialized, so this scales to tree-sized groupoids.
    pub fn pair_product_coboundary(g: &Groupoid, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let n = match g.pair_points() {
            Some(n) => n,
            None => {
                return Err(Error::GroupoidMismatch(
                    "rank-one coboundary phases need an implicit pair groupoid".into(),
                ))
            }
        };
        if theta.len() != n as usize || phi.len() != n as usize {
            return Err(Error::GroupoidMismatch(format!(
                "phase profiles need {n} values per side, got {} and {}",
                theta.len(),
                phi.len()
            )));
        }
        if theta.iter().chain(phi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Schema("phase profiles must be finite".into()));
        }
        Ok(Cocycle::Coboundary(CoboundaryPhase::PairProduct {
            theta,
            phi,
        }))
    }

    /// The Heisenberg-type cocycle on `Z₂ × Z₂`, together with the
    /// groupoid it lives on: elements are `(a₁, a₂)` with id `2a₁+a₂`
    /// composing by XOR, and `σ((a₁,a₂),(b₁,b₂)) = (−1)^{a₂·b₁}`.
    pub fn heisenberg_z2z2() -> (Groupoid, Cocycle) {
        let z2 = Groupoid::cyclic(2).expect("Z_2 exists");
        let g = Groupoid::product(&z2, &z2).expect("finite product");
        let mut entries = Vec::with_capacity(16);
        for a in 0..4u32 {
            for b in 0..4u32 {
                let sign = if (a & 1) * ((b >> 1) & 1) == 1 {
                    -1.0
                } else {
                    1.0
                };
                entries.push((pack(a, b), Complex64::new(sign, 0.0)));
            }
        }
        entries.sort_unstable_by_key(|&(k, _)| k);
        (
            g,
            Cocycle::Table {
                default: ONE,
                entries,
            },
        )
    }

    /// σ evaluated on a composable pair. Callers guarantee
    /// `src(a) = rng(b)`; the coboundary representation composes the
    /// pair and fails loudly otherwise.
    pub fn value(&self, g: &Groupoid, a: ArrowId, b: ArrowId) -> Complex64 {
        match self {
            Cocycle::Trivial => ONE,
            Cocycle::Table { default, entries } => {
                let key = pack(a, b);
                match entries.binary_search_by_key(&key, |&(k, _)| k) {
                    Ok(i) => entries[i].1,
                    Err(_) => *default,
                }
            }
            Cocycle::Coboundary(phase) => {
                let ab = g
                    .compose(a, b)
                    .expect("cocycle evaluated on a non-composable pair");
                phase.value(a) * phase.value(b) * phase.value(ab).conj()
            }
        }
    }
}

fn composable_pair_count(g: &Groupoid) -> Result<usize> {
    let mut total = 0usize;
    for x in g.units() {
        let outs = g.source_fiber(x)?.len();
        let ins = g.range_fiber(x)?.len();
        total = total.saturating_add(outs.saturating_mul(ins));
    }
    Ok(total)
}

/// Materializes any cocycle as an explicit table over all composable
/// pairs (capped; large implicit groupoids keep their lazy forms).
pub fn materialize(g: &Groupoid, sigma: &Cocycle) -> Result<Cocycle> {
    if composable_pair_count(g)? > TABLE_LIMIT {
        return Err(Error::Schema(format!(
            "cocycle table over {} composable pairs exceeds the materialization cap",
            composable_pair_count(g)?
        )));
    }
    let mut entries = Vec::new();
    for x in g.units() {
        for &a in &g.source_fiber(x)? {
            for &b in &g.range_fiber(x)? {
                entries.push((pack(a, b), sigma.value(g, a, b)));
            }
        }
    }
    entries.sort_unstable_by_key(|&(k, _)| k);
    Ok(Cocycle::Table {
        default: ONE,
        entries,
    })
}

/// The pullback `(φ*σ)(a, b) = σ(φ(a), φ(b))` along `φ: H → G`,
/// materialized over the domain's composable pairs.
pub fn pullback_cocycle(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    sigma: &Cocycle,
) -> Result<Cocycle> {
    if phi.map.len() != h.num_arrows() {
        return Err(Error::GroupoidMismatch(
            "homomorphism does not cover the domain".into(),
        ));
    }
    if composable_pair_count(h)? > TABLE_LIMIT {
        return Err(Error::Schema(
            "pullback cocycle exceeds the materialization cap".into(),
        ));
    }
    let mut entries = Vec::new();
    for x in h.units() {
        for &a in &h.source_fiber(x)? {
            for &b in &h.range_fiber(x)? {
                entries.push((pack(a, b), sigma.value(g, phi.apply(a), phi.apply(b))));
            }
        }
    }
    entries.sort_unstable_by_key(|&(k, _)| k);
    Ok(Cocycle::Table {
        default: ONE,
        entries,
    })
}

/// The product-twist cocycle on `G × H`:
/// `σ̃((a,h),(a',h')) = σ(a,a')`, materialized.
pub fn product_cocycle(
    g: &Groupoid,
    h: &Groupoid,
    product: &Groupoid,
    sigma_g: &Cocycle,
) -> Result<Cocycle> {
    if product.num_arrows() != g.num_arrows() * h.num_arrows() {
        return Err(Error::GroupoidMismatch(
            "product groupoid does not match the factors".into(),
        ));
    }
    if composable_pair_count(product)? > TABLE_LIMIT {
        return Err(Error::Schema(
            "product cocycle exceeds the materialization cap".into(),
        ));
    }
    let nh = h.num_arrows() as u32;
    let mut entries = Vec::new();
    for x in product.units() {
        for &a in &product.source_fiber(x)? {
            for &b in &product.range_fiber(x)? {
                entries.push((pack(a, b), sigma_g.value(g, a / nh, b / nh)));
            }
        }
    }
    entries.sort_unstable_by_key(|&(k, _)| k);
    Ok(Cocycle::Table {
        default: ONE,
        entries,
    })
}

/// The cohomologous perturbation `σ'(a,b) = b(a)·b(b)·conj(b(ab))·σ(a,b)`
/// for a unit-modulus phase `b` equal to 1 on units, materialized.
pub fn perturb(g: &Groupoid, sigma: &Cocycle, b: &[Complex64]) -> Result<Cocycle> {
    let delta = Cocycle::coboundary(g, b.to_vec())?;
    if composable_pair_count(g)? > TABLE_LIMIT {
        return Err(Error::Schema(
            "perturbed cocycle exceeds the materialization cap".into(),
        ));
    }
    let mut entries = Vec::new();
    for x in g.units() {
        for &a in &g.source_fiber(x)? {
            for &bb in &g.range_fiber(x)? {
                entries.push((
                    pack(a, bb),
                    delta.value(g, a, bb) * sigma.value(g, a, bb),
                ));
            }
        }
    }
    entries.sort_unstable_by_key(|&(k, _)| k);
    Ok(Cocycle::Table {
        default: ONE,
        entries,
    })
}

/// Checks unimodularity (1e-12), normalization on units (1e-12), and
/// the cocycle identity over composable triples (1e-10), reporting
/// witnesses. Trivial and coboundary representations satisfy the
/// identity by construction, so their sweeps reduce to the phase
/// checks; table cocycles on implicit pair groupoids past
/// [`PAIR_SWEEP_LIMIT`] points skip the quartic triple sweep.
pub fn validate_cocycle(g: &Groupoid, sigma: &Cocycle) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    match sigma {
        Cocycle::Trivial => return Ok(out),
        Cocycle::Coboundary(phase) => {
            match phase {
                CoboundaryPhase::Dense(b) => {
                    if b.len() != g.num_arrows() {
                        return Err(Error::GroupoidMismatch(
                            "phase vector does not cover the arrows".into(),
                        ));
                    }
                    for (a, z) in b.iter().enumerate() {
                        if (z.norm() - 1.0).abs() > MODULUS_TOL {
                            out.push(Violation::new(
                                codes::NOT_UNIMODULAR,
                                vec![a as u32],
                                format!("|b| = {}", z.norm()),
                            ));
                        }
                    }
                    for &u in &g.units() {
                        if (b[u as usize] - ONE).norm() > MODULUS_TOL {
                            out.push(Violation::new(
                                codes::NOT_NORMALIZED,
                                vec![u],
                                "phase must be 1 on units",
                            ));
                        }
                    }
                }
                CoboundaryPhase::PairProduct { theta, phi } => {
                    if g.pair_points() != Some(theta.len() as u32) {
                        return Err(Error::GroupoidMismatch(
                            "phase profiles do not match the pair groupoid".into(),
                        ));
                    }
                    if theta.iter().chain(phi.iter()).any(|v| !v.is_finite()) {
                        out.push(Violation::new(
                            codes::NOT_UNIMODULAR,
                            vec![],
                            "non-finite phase profile",
                        ));
                    }
                }
            }
            return Ok(out);
        }
        Cocycle::Table { default, entries } => {
            if (default.norm() - 1.0).abs() > MODULUS_TOL {
                out.push(Violation::new(
                    codes::NOT_UNIMODULAR,
                    vec![],
                    format!("default has modulus {}", default.norm()),
                ));
            }
            for &(key, z) in entries {
                if (z.norm() - 1.0).abs() > MODULUS_TOL {
                    out.push(Violation::new(
                        codes::NOT_UNIMODULAR,
                        vec![(key >> 32) as u32, key as u32],
                        format!("modulus {}", z.norm()),
                    ));
                }
            }
        }
    }
    for a in 0..g.num_arrows() as u32 {
        let left = sigma.value(g, g.rng(a), a);
        let right = sigma.value(g, a, g.src(a));
        if (left - ONE).norm() > MODULUS_TOL || (right - ONE).norm() > MODULUS_TOL {
            out.push(Violation::new(
                codes::NOT_NORMALIZED,
                vec![a],
                format!("σ(r(a),a) = {left}, σ(a,s(a)) = {right}"),
            ));
        }
    }
    let sweep = match g.pair_points() {
        Some(n) => n <= PAIR_SWEEP_LIMIT,
        None => true,
    };
    if sweep {
        'outer: for b in 0..g.num_arrows() as u32 {
            let lefts = g.source_fiber(g.rng(b))?;
            let rights = g.range_fiber(g.src(b))?;
            for &a in &lefts {
                let ab = g.compose(a, b).expect("src(a) = rng(b)");
                let sab = sigma.value(g, a, b);
                for &c in &rights {
                    let bc = g.compose(b, c).expect("src(b) = rng(c)");
                    let lhs = sab * sigma.value(g, ab, c);
                    let rhs = sigma.value(g, b, c) * sigma.value(g, a, bc);
                    if (lhs - rhs).norm() > IDENTITY_TOL {
                        out.push(Violation::new(
                            codes::COCYCLE_IDENTITY,
                            vec![a, b, c],
                            format!("σ(a,b)σ(ab,c) = {lhs} but σ(b,c)σ(a,bc) = {rhs}"),
                        ));
                        if out.len() >= 32 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
