//! Machine checks of the norm-permanence statements: restriction to an
//! open (here: full on a unit subset) subgroupoid, products with a
//! finite second factor, the lift identities along n-regular
//! homomorphisms, and the transfer of rapid-decay bounds along them.
//!
//! Every check returns a [`PermanenceReport`] whose rows list both
//! sides of each verified inequality or identity to full precision,
//! together with the tolerance that decided the pass flag.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    rep_matrix, reduced_norm, weighted_seminorm, GFunction, SeminormMode,
};
use crate::error::{Error, Result};
use crate::groupoid::{
    n_regularity, product_projections, ArrowId, Groupoid, GroupoidHom,
};
use crate::length::{pullback_length, LengthFunction};
use crate::report::{sha256_hex, PermanenceRow};
use crate::twist::{product_cocycle, pullback_cocycle, Cocycle};

/// Slack allowed on inequalities between spectral-norm estimates.
pub const NORM_INEQ_TOL: f64 = 1e-9;
/// Tolerance for the identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Units sampled for the vector-level estimates.
const SAMPLE_UNITS: usize = 4;
/// Random vectors drawn per sampled unit.
const SAMPLE_VECTORS: u32 = 3;
/// Seed for the internal vector sampling, fixed for reproducibility.
const SAMPLE_SEED: u64 = 0x5eed_0002;

/// Outcome of one permanence check: named rows with both sides of every
/// verified inequality or identity, plus a digest of the inputs so runs
/// can be matched to their data.
#[derive(Debug, Clone)]
pub struct PermanenceReport {
    pub check: String,
    pub digest: String,
    pub rows: Vec<PermanenceRow>,
}

impl PermanenceReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn ineq_row(check: &str, lhs: f64, rhs: f64, tol: f64) -> PermanenceRow {
    PermanenceRow {
        check: check.to_owned(),
        lhs,
        rhs,
        pass: lhs <= rhs + tol,
        tol,
    }
}

fn eq_row(check: &str, lhs: f64, rhs: f64, tol: f64) -> PermanenceRow {
    PermanenceRow {
        check: check.to_owned(),
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tol,
        tol,
    }
}

/// Canonical input digest: a SHA-256 over the byte encodings of
/// everything that determines the check's numbers.
struct InputDigest(Vec<u8>);

impl InputDigest {
    fn new(check: &str) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(check.as_bytes());
        buf.push(0xff);
        InputDigest(buf)
    }

    fn u32(&mut self, v: u32) -> &mut Self {
        self.0.extend_from_slice(&v.to_le_bytes());
        self
    }

    fn f64(&mut self, v: f64) -> &mut Self {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
        self
    }

    fn function(&mut self, f: &GFunction) -> &mut Self {
        for z in &f.coeffs {
            self.f64(z.re).f64(z.im);
        }
        self
    }

    fn ids<'a>(&mut self, ids: impl IntoIterator<Item = &'a ArrowId>) -> &mut Self {
        for &a in ids {
            self.u32(a);
        }
        self
    }

    fn finish(&self) -> String {
        sha256_hex(&self.0)
    }
}

fn guard_constants(c: f64, t: f64) -> Result<()> {
    if !c.is_finite() || c < 0.0 || !t.is_finite() || t < 0.0 {
        return Err(Error::BadConstants(format!(
            "need finite C ≥ 0 and t ≥ 0, got C = {c}, t = {t}"
        )));
    }
    Ok(())
}

// --------------------------------------------------------- subgroupoids

/// Restriction permanence: for `f` supported on the restriction of `h`
/// to a unit subset, the restricted reduced norm is dominated by the
/// ambient one, and the symmetric weighted seminorms agree exactly.
///
/// The seminorm row carries tolerance 0: the inclusion is
/// order-preserving on arrow ids and both seminorm sums skip zero
/// coefficients, so the two sides add identical floats in identical
/// order.
pub fn check_subgroupoid(
    h: &Groupoid,
    sigma: &Cocycle,
    units: &BTreeSet<ArrowId>,
    f: &GFunction,
    l: &LengthFunction,
    t: f64,
) -> Result<PermanenceReport> {
    f.check(h)?;
    l.check_compat(h)?;
    let (sub, embed) = h.restrict(units)?;
    for a in f.support() {
        if embed.map.binary_search(&a).is_err() {
            return Err(Error::SupportLeak(a));
        }
    }
    let f_sub = GFunction {
        coeffs: embed
            .map
            .iter()
            .map(|&a| f.coeffs[a as usize])
            .collect(),
    };
    let sigma_sub = pullback_cocycle(&embed, &sub, h, sigma)?;
    let l_sub = pullback_length(&embed, l);

    let norm_sub = reduced_norm(&sub, &f_sub, &sigma_sub)?;
    let norm_full = reduced_norm(h, f, sigma)?;
    let semi_sub = weighted_seminorm(&sub, &f_sub, &l_sub, t, SeminormMode::Symmetric)?;
    let semi_full = weighted_seminorm(h, f, l, t, SeminormMode::Symmetric)?;

    let mut digest = InputDigest::new("subgroupoid");
    digest
        .u32(h.num_arrows() as u32)
        .ids(units.iter())
        .function(f)
        .f64(t);
    Ok(PermanenceReport {
        check: "subgroupoid".to_owned(),
        digest: digest.finish(),
        rows: vec![
            ineq_row("subgroupoid_norm", norm_sub, norm_full, NORM_INEQ_TOL),
            eq_row("subgroupoid_seminorm", semi_sub, semi_full, 0.0),
        ],
    })
}

// -------------------------------------------------------------- products

/// Greedy partition of the arrow set into bisections: classes in which
/// no two arrows share a source or a range unit, filled first-fit in
/// arrow-id order. The cover need not be minimum — its size only enters
/// the product bound as the reported constant `n`.
pub fn bisection_cover(h: &Groupoid) -> Vec<Vec<ArrowId>> {
    let mut classes: Vec<Vec<ArrowId>> = Vec::new();
    let mut sources: Vec<BTreeSet<ArrowId>> = Vec::new();
    let mut ranges: Vec<BTreeSet<ArrowId>> = Vec::new();
    for a in 0..h.num_arrows() as ArrowId {
        let (sa, ra) = (h.src(a), h.rng(a));
        let slot = (0..classes.len())
            .find(|&k| !sources[k].contains(&sa) && !ranges[k].contains(&ra));
        match slot {
            Some(k) => {
                classes[k].push(a);
                sources[k].insert(sa);
                ranges[k].insert(ra);
            }
            None => {
                classes.push(vec![a]);
                sources.push(BTreeSet::from([sa]));
                ranges.push(BTreeSet::from([ra]));
            }
        }
    }
    classes
}

/// Product permanence with a finite second factor: decomposes `f` along
/// an indicator partition subordinate to a bisection cover of `h`,
/// verifies the two vector-level estimates behind the product bound on
/// sampled fibers, and checks the final inequality
/// `‖f‖ ≤ n·C·‖f‖_{ℓ̃,t}` against the supplied constant pair.
///
/// `f` lives on `product(g, h)`; the lifted length is `ℓ̃(γ,η) = ℓ(γ)`.
/// The final inequality is only as good as the constants: it is
/// expected to pass when `C` dominates the decay ratios of `g`.
pub fn check_product(
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    h: &Groupoid,
    f: &GFunction,
    c: f64,
    t: f64,
) -> Result<PermanenceReport> {
    guard_constants(c, t)?;
    l.check_compat(g)?;
    let product = Groupoid::product(g, h)?;
    f.check(&product)?;
    let cover = bisection_cover(h);
    let n = cover.len();
    if n == 0 {
        return Err(Error::HNotFinite(
            "product factor has no arrows to cover".into(),
        ));
    }
    let sigma_tilde = product_cocycle(g, h, &product, sigma)?;
    let (proj_left, _) = product_projections(g, h);
    let l_tilde = pullback_length(&proj_left, l);
    let nh = h.num_arrows() as u32;

    // f = Σ_k f·1_{class k}: re-add each coefficient through its class
    // and measure the honest deviation (a partition, so exactly zero).
    let mut partition_sum = GFunction::zeros(&product);
    for class in &cover {
        for &b in class {
            for a in 0..g.num_arrows() as u32 {
                let ab = (a * nh + b) as usize;
                partition_sum.coeffs[ab] += f.coeffs[ab];
            }
        }
    }
    let partition_dev = partition_sum
        .coeffs
        .iter()
        .zip(&f.coeffs)
        .map(|(s, o)| (s - o).norm())
        .fold(0.0, f64::max);

    // Range-unit lookup per cover class: a bisection has at most one
    // arrow with a given range, which pins down ζ(η, k) = u⁻¹η for the
    // unique u in the class with rng(u) = rng(η).
    let range_maps: Vec<BTreeMap<ArrowId, ArrowId>> = cover
        .iter()
        .map(|class| class.iter().map(|&u| (h.rng(u), u)).collect())
        .collect();

    let units = product.units();
    let stride = units.len().div_ceil(SAMPLE_UNITS).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut worst_split: Option<(f64, f64)> = None;
    let mut worst_zeta: Option<(f64, f64)> = None;
    for up in units.iter().copied().step_by(stride) {
        let (x, y) = (up / nh, up % nh);
        let gx = g.source_fiber(x)?;
        let hy = h.source_fiber(y)?;
        let dim = gx.len() * hy.len();
        let rep_p = rep_matrix(&product, f, up, &sigma_tilde)?;

        // ζ-data at this fiber: (index of ζ in hy, slice arrow u = ηζ⁻¹).
        let mut zeta_pairs: Vec<(usize, ArrowId)> = Vec::new();
        for &eta in &hy {
            for rm in &range_maps {
                if let Some(&u) = rm.get(&h.rng(eta)) {
                    let zeta = h
                        .compose(h.inv(u), eta)
                        .expect("rng(u) = rng(η) makes u⁻¹η composable");
                    let iz = hy.binary_search(&zeta).expect("ζ stays in the fiber");
                    zeta_pairs.push((iz, u));
                }
            }
        }
        let mut slice_reps: BTreeMap<ArrowId, DMatrix<Complex64>> = BTreeMap::new();
        for &(_, u) in &zeta_pairs {
            if !slice_reps.contains_key(&u) {
                let slice = GFunction {
                    coeffs: (0..g.num_arrows() as u32)
                        .map(|a| f.coeffs[(a * nh + u) as usize])
                        .collect(),
                };
                slice_reps.insert(u, rep_matrix(g, &slice, x, sigma)?.matrix);
            }
        }

        for _ in 0..SAMPLE_VECTORS {
            let xi = DVector::from_iterator(
                dim,
                (0..dim).map(|_| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }),
            );
            let lhs_split = (&rep_p.matrix * &xi).norm_squared();
            let mut sum_split = 0.0;
            let mut sum_zeta = 0.0;
            for &(iz, u) in &zeta_pairs {
                let xi_z = DVector::from_iterator(
                    gx.len(),
                    (0..gx.len()).map(|ig| xi[ig * hy.len() + iz]),
                );
                sum_split += (&slice_reps[&u] * &xi_z).norm_squared();
                sum_zeta += xi_z.norm_squared();
            }
            let rhs_split = n as f64 * sum_split;
            let rhs_zeta = n as f64 * xi.norm_squared();
            if worst_split.is_none_or(|(l0, r0)| lhs_split - rhs_split > l0 - r0) {
                worst_split = Some((lhs_split, rhs_split));
            }
            if worst_zeta.is_none_or(|(l0, r0)| sum_zeta - rhs_zeta > l0 - r0) {
                worst_zeta = Some((sum_zeta, rhs_zeta));
            }
        }
    }
    let (split_lhs, split_rhs) = worst_split.unwrap_or((0.0, 0.0));
    let (zeta_lhs, zeta_rhs) = worst_zeta.unwrap_or((0.0, 0.0));

    let norm_product = reduced_norm(&product, f, &sigma_tilde)?;
    let semi_product =
        weighted_seminorm(&product, f, &l_tilde, t, SeminormMode::Symmetric)?;

    let mut digest = InputDigest::new("product");
    digest
        .u32(g.num_arrows() as u32)
        .u32(h.num_arrows() as u32)
        .function(f)
        .f64(c)
        .f64(t);
    Ok(PermanenceReport {
        check: "product".to_owned(),
        digest: digest.finish(),
        rows: vec![
            eq_row("product_cover_size", n as f64, n as f64, 0.0),
            eq_row("product_partition", partition_dev, 0.0, 0.0),
            ineq_row("product_split", split_lhs, split_rhs, NORM_INEQ_TOL),
            ineq_row("product_zeta", zeta_lhs, zeta_rhs, NORM_INEQ_TOL),
            ineq_row(
                "product_final",
                norm_product,
                n as f64 * c * semi_product,
                NORM_INEQ_TOL,
            ),
        ],
    })
}

// ------------------------------------------------------ n-regular lifts

/// The function lift `φ̂f = f∘φ` along an n-regular `φ: H → G`.
pub fn lift_function(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    f: &GFunction,
) -> Result<GFunction> {
    n_regularity(phi, h, g)?;
    f.check(g)?;
    Ok(lift_function_unchecked(phi, f))
}

fn lift_function_unchecked(phi: &GroupoidHom, f: &GFunction) -> GFunction {
    GFunction {
        coeffs: phi.map.iter().map(|&gm| f.coeffs[gm as usize]).collect(),
    }
}

/// The vector lift `φ̂_yξ = ξ∘φ` from `ℓ²G_{φ(y)}` to `ℓ²H_y`; scales
/// every norm by exactly `n^{1/2}`. `ξ` is indexed by the source fiber
/// of `φ(y)` in ascending arrow-id order, the output by the source
/// fiber of `y` likewise.
pub fn lift_vector(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    y: ArrowId,
    xi: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    n_regularity(phi, h, g)?;
    lift_vector_unchecked(phi, h, g, y, xi)
}

fn lift_vector_unchecked(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    y: ArrowId,
    xi: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    if !h.is_unit(y) {
        return Err(Error::NotAUnit(y));
    }
    let gx = g.source_fiber(phi.apply(y))?;
    if xi.len() != gx.len() {
        return Err(Error::GroupoidMismatch(format!(
            "vector of dimension {} lifted from a fiber of dimension {}",
            xi.len(),
            gx.len()
        )));
    }
    let hy = h.source_fiber(y)?;
    Ok(DVector::from_iterator(
        hy.len(),
        hy.iter().map(|&eta| {
            let ig = gx
                .binary_search(&phi.apply(eta))
                .expect("φ maps H_y into G_{φ(y)}");
            xi[ig]
        }),
    ))
}

fn intertwining_deviation(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    sigma: &Cocycle,
    sigma_h: &Cocycle,
    f: &GFunction,
    fhat: &GFunction,
    n: u32,
    y: ArrowId,
) -> Result<f64> {
    let rep_h = rep_matrix(h, fhat, y, sigma_h)?;
    let rep_g = rep_matrix(g, f, phi.apply(y), sigma)?;
    let mut phi_mat = DMatrix::zeros(rep_h.basis.len(), rep_g.basis.len());
    for (ih, &eta) in rep_h.basis.iter().enumerate() {
        let ig = rep_g
            .basis
            .binary_search(&phi.apply(eta))
            .expect("φ maps H_y into G_{φ(y)}");
        phi_mat[(ih, ig)] = Complex64::ONE;
    }
    let lhs = &rep_h.matrix * &phi_mat;
    let rhs = (&phi_mat * &rep_g.matrix) * Complex64::from(f64::from(n));
    Ok((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Fiber-level intertwining `λ_y(φ̂f)·φ̂_y = n·φ̂_y·λ_{φ(y)}(f)` at one
/// unit, checked entrywise on the matrices against [`EXACT_TOL`]. The
/// codomain twist is pulled back to the domain.
pub fn check_intertwining(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    sigma: &Cocycle,
    f: &GFunction,
    y: ArrowId,
) -> Result<PermanenceReport> {
    let n = n_regularity(phi, h, g)?;
    f.check(g)?;
    if !h.is_unit(y) {
        return Err(Error::NotAUnit(y));
    }
    let sigma_h = pullback_cocycle(phi, h, g, sigma)?;
    let fhat = lift_function_unchecked(phi, f);
    let dev = intertwining_deviation(phi, h, g, sigma, &sigma_h, f, &fhat, n, y)?;
    let mut digest = InputDigest::new("intertwining");
    digest
        .u32(h.num_arrows() as u32)
        .u32(g.num_arrows() as u32)
        .u32(y)
        .function(f);
    Ok(PermanenceReport {
        check: "intertwining".to_owned(),
        digest: digest.finish(),
        rows: vec![eq_row("intertwining_identity", dev, 0.0, EXACT_TOL)],
    })
}

/// All three lift identities along an n-regular `φ: H → G`, sampled
/// over units of the domain: the `n^{1/2}` vector-norm scaling on
/// random vectors, the `n^{1/2}` seminorm scaling of `φ̂f`, and the
/// fiber-level intertwining.
pub fn check_pullback(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    f: &GFunction,
    t: f64,
) -> Result<PermanenceReport> {
    let n = n_regularity(phi, h, g)?;
    f.check(g)?;
    l.check_compat(g)?;
    let sigma_h = pullback_cocycle(phi, h, g, sigma)?;
    let l_h = pullback_length(phi, l);
    let fhat = lift_function_unchecked(phi, f);

    let units = h.units();
    let stride = units.len().div_ceil(SAMPLE_UNITS).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut worst_norm: Option<(f64, f64)> = None;
    let mut worst_intertwine = 0.0f64;
    for y in units.iter().copied().step_by(stride) {
        let gx = g.source_fiber(phi.apply(y))?;
        for _ in 0..SAMPLE_VECTORS {
            let xi = DVector::from_iterator(
                gx.len(),
                (0..gx.len()).map(|_| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }),
            );
            let lifted = lift_vector_unchecked(phi, h, g, y, &xi)?;
            let lhs = lifted.norm_squared();
            let rhs = f64::from(n) * xi.norm_squared();
            if worst_norm.is_none_or(|(l0, r0)| (lhs - rhs).abs() > (l0 - r0).abs()) {
                worst_norm = Some((lhs, rhs));
            }
        }
        let dev =
            intertwining_deviation(phi, h, g, sigma, &sigma_h, f, &fhat, n, y)?;
        worst_intertwine = worst_intertwine.max(dev);
    }
    let (norm_lhs, norm_rhs) = worst_norm.unwrap_or((0.0, 0.0));

    let semi_h = weighted_seminorm(h, &fhat, &l_h, t, SeminormMode::Symmetric)?;
    let semi_g = weighted_seminorm(g, f, l, t, SeminormMode::Symmetric)?;

    let mut digest = InputDigest::new("pullback");
    digest
        .u32(h.num_arrows() as u32)
        .u32(g.num_arrows() as u32)
        .function(f)
        .f64(t);
    Ok(PermanenceReport {
        check: "pullback".to_owned(),
        digest: digest.finish(),
        rows: vec![
            eq_row("lift_vector_norm", norm_lhs, norm_rhs, EXACT_TOL),
            eq_row(
                "lift_seminorm",
                semi_h,
                f64::from(n).sqrt() * semi_g,
                EXACT_TOL,
            ),
            eq_row("lift_intertwining", worst_intertwine, 0.0, EXACT_TOL),
        ],
    })
}

// ------------------------------------------------------------- transfer

/// Rapid-decay transfer along an n-regular `φ: H → G`: the norm drop
/// `‖f‖_G ≤ n⁻¹‖φ̂f‖_H` and the composed bound
/// `‖f‖_G ≤ C·n^{-1/2}·‖f‖_{ℓ,t}` for a constant pair `(C, t)` that is
/// empirically valid on the domain.
pub fn check_rd_transfer(
    phi: &GroupoidHom,
    h: &Groupoid,
    g: &Groupoid,
    sigma: &Cocycle,
    l: &LengthFunction,
    f: &GFunction,
    c: f64,
    t: f64,
) -> Result<PermanenceReport> {
    guard_constants(c, t)?;
    let n = n_regularity(phi, h, g)?;
    f.check(g)?;
    l.check_compat(g)?;
    let sigma_h = pullback_cocycle(phi, h, g, sigma)?;
    let fhat = lift_function_unchecked(phi, f);

    let norm_g = reduced_norm(g, f, sigma)?;
    let norm_h = reduced_norm(h, &fhat, &sigma_h)?;
    let semi_g = weighted_seminorm(g, f, l, t, SeminormMode::Symmetric)?;

    let mut digest = InputDigest::new("transfer");
    digest
        .u32(h.num_arrows() as u32)
        .u32(g.num_arrows() as u32)
        .function(f)
        .f64(c)
        .f64(t);
    Ok(PermanenceReport {
        check: "transfer".to_owned(),
        digest: digest.finish(),
        rows: vec![
            ineq_row(
                "transfer_norm",
                norm_g,
                norm_h / f64::from(n),
                NORM_INEQ_TOL,
            ),
            ineq_row(
                "transfer_rd_bound",
                norm_g,
                c * semi_g / f64::from(n).sqrt(),
                NORM_INEQ_TOL,
            ),
        ],
    })
}
