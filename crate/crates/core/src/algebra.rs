//! The twisted convolution algebra of a finite groupoid: products,
//! involution, regular-representation fiber operators, the reduced
//! C*-norm, and the weighted decay seminorms.
//!
//! Functions are dense complex coefficient vectors indexed by arrow id.
//! The fiber operator at a unit `x` acts on `ℓ²(G_x)` by
//! `M[γ,η] = f(γη⁻¹)·σ(γη⁻¹,η)`; with this phase the homomorphism
//! contract `rep(f ∗_σ g) = rep(f)·rep(g)` and the adjoint contract
//! `rep(f*) = rep(f)†` hold exactly for every normalized cocycle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, Groupoid};
use crate::length::LengthFunction;
use crate::report::NormRow;
use crate::spectral;
use crate::twist::Cocycle;

/// A compactly supported function on the arrows, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    pub coeffs: Vec<Complex64>,
}

impl GFunction {
    pub fn zeros(g: &Groupoid) -> Self {
        GFunction {
            coeffs: vec![Complex64::ZERO; g.num_arrows()],
        }
    }

    pub fn from_coeffs(g: &Groupoid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != g.num_arrows() {
            return Err(Error::GroupoidMismatch(format!(
                "{} coefficients for {} arrows",
                coeffs.len(),
                g.num_arrows()
            )));
        }
        Ok(GFunction { coeffs })
    }

    /// Sparse constructor used by file loads; omitted arrows are zero.
    pub fn from_entries(g: &Groupoid, entries: &[(ArrowId, Complex64)]) -> Result<Self> {
        let mut f = GFunction::zeros(g);
        let mut seen = vec![false; g.num_arrows()];
        for &(a, z) in entries {
            let idx = a as usize;
            if idx >= g.num_arrows() {
                return Err(Error::DanglingId(format!(
                    "function entry references arrow {a} outside 0..{}",
                    g.num_arrows()
                )));
            }
            if seen[idx] {
                return Err(Error::Schema(format!("duplicate coefficient for arrow {a}")));
            }
            seen[idx] = true;
            f.coeffs[idx] = z;
        }
        Ok(f)
    }

    pub fn delta(g: &Groupoid, a: ArrowId) -> Result<Self> {
        if (a as usize) >= g.num_arrows() {
            return Err(Error::DanglingId(format!("no arrow {a}")));
        }
        let mut f = GFunction::zeros(g);
        f.coeffs[a as usize] = Complex64::ONE;
        Ok(f)
    }

    /// The indicator of the unit space — the algebra's multiplicative
    /// identity for every normalized cocycle.
    pub fn unit_indicator(g: &Groupoid) -> Self {
        let mut f = GFunction::zeros(g);
        for &u in &g.units() {
            f.coeffs[u as usize] = Complex64::ONE;
        }
        f
    }

    pub fn all_ones(g: &Groupoid) -> Self {
        GFunction {
            coeffs: vec![Complex64::ONE; g.num_arrows()],
        }
    }

    /// The pointwise modulus |f|, used by the twist-domination bound.
    pub fn modulus(&self) -> Self {
        GFunction {
            coeffs: self
                .coeffs
                .iter()
                .map(|z| Complex64::new(z.norm(), 0.0))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == Complex64::ZERO)
    }

    pub fn support(&self) -> Vec<ArrowId> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::ZERO)
            .map(|(i, _)| i as ArrowId)
            .collect()
    }

    pub(crate) fn check(&self, g: &Groupoid) -> Result<()> {
        if self.coeffs.len() != g.num_arrows() {
            return Err(Error::GroupoidMismatch(format!(
                "function over {} arrows used on a groupoid with {}",
                self.coeffs.len(),
                g.num_arrows()
            )));
        }
        Ok(())
    }
}

/// The regular representation of a function on one fiber `ℓ²(G_x)`.
#[derive(Debug, Clone)]
pub struct FiberOperator {
    pub unit: ArrowId,
    /// Source-fiber arrows in ascending id order; row/column `i`
    /// corresponds to `basis[i]`.
    pub basis: Vec<ArrowId>,
    pub matrix: DMatrix<Complex64>,
}

/// Twisted convolution `(f ∗_σ g)(γ) = Σ_{αβ=γ} f(α)g(β)σ(α,β)`.
pub fn convolve(
    g: &Groupoid,
    f: &GFunction,
    h: &GFunction,
    sigma: &Cocycle,
) -> Result<GFunction> {
    f.check(g)?;
    h.check(g)?;
    let mut out = GFunction::zeros(g);
    for alpha in f.support() {
        let fa = f.coeffs[alpha as usize];
        for &beta in &g.range_fiber(g.src(alpha))? {
            let hb = h.coeffs[beta as usize];
            if hb == Complex64::ZERO {
                continue;
            }
            let ab = g.compose(alpha, beta).expect("src(α) = rng(β)");
            out.coeffs[ab as usize] += fa * hb * sigma.value(g, alpha, beta);
        }
    }
    Ok(out)
}

/// Twisted involution `f*(γ) = conj(σ(γ,γ⁻¹))·conj(f(γ⁻¹))`.
pub fn involution(g: &Groupoid, f: &GFunction, sigma: &Cocycle) -> Result<GFunction> {
    f.check(g)?;
    let mut out = GFunction::zeros(g);
    for a in 0..g.num_arrows() as ArrowId {
        let inv = g.inv(a);
        out.coeffs[a as usize] =
            sigma.value(g, a, inv).conj() * f.coeffs[inv as usize].conj();
    }
    Ok(out)
}

/// The fiber operator of `f` at the unit `x`:
/// `M[γ,η] = f(γη⁻¹)·σ(γη⁻¹,η)` over the source fiber `G_x`.
pub fn rep_matrix(
    g: &Groupoid,
    f: &GFunction,
    x: ArrowId,
    sigma: &Cocycle,
) -> Result<FiberOperator> {
    f.check(g)?;
    if !g.is_unit(x) {
        return Err(Error::NotAUnit(x));
    }
    let basis = g.source_fiber(x)?;
    let dim = basis.len();
    let mut matrix = DMatrix::zeros(dim, dim);
    for (j, &eta) in basis.iter().enumerate() {
        let eta_inv = g.inv(eta);
        for (i, &gamma) in basis.iter().enumerate() {
            let diff = g.compose(gamma, eta_inv).expect("both start at x");
            let c = f.coeffs[diff as usize];
            if c != Complex64::ZERO {
                matrix[(i, j)] = c * sigma.value(g, diff, eta);
            }
        }
    }
    Ok(FiberOperator {
        unit: x,
        basis,
        matrix,
    })
}

/// Per-unit spectral norms together with their supremum.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub value: f64,
    pub rows: Vec<NormRow>,
}

/// On an implicit pair groupoid every fiber operator of a trivial or
/// coboundary twist is a diagonal-phase conjugate of the one at the
/// first point, so a single fiber already attains the supremum.
fn single_fiber_suffices(g: &Groupoid, sigma: &Cocycle) -> bool {
    g.pair_points().is_some()
        && matches!(sigma, Cocycle::Trivial | Cocycle::Coboundary(_))
}

/// Reduced C*-norm `sup_x ‖λ_x(f)‖` with one report row per fiber
/// actually computed.
pub fn reduced_norm_report(
    g: &Groupoid,
    f: &GFunction,
    sigma: &Cocycle,
) -> Result<NormReport> {
    f.check(g)?;
    let units = if single_fiber_suffices(g, sigma) {
        vec![g.units()[0]]
    } else {
        g.units()
    };
    let mut rows = Vec::with_capacity(units.len());
    let mut value = 0.0f64;
    for x in units {
        let op = rep_matrix(g, f, x, sigma)?;
        let est = spectral::operator_norm(&op.matrix)?;
        value = value.max(est.value);
        rows.push(NormRow {
            unit: x,
            dim: op.basis.len(),
            spectral_norm: est.value,
            residual: est.residual,
        });
    }
    Ok(NormReport { value, rows })
}

pub fn reduced_norm(g: &Groupoid, f: &GFunction, sigma: &Cocycle) -> Result<f64> {
    Ok(reduced_norm_report(g, f, sigma)?.value)
}

/// Weight evaluation with a cache over the small-integer lengths that
/// word metrics and graph metrics produce; cached values are the same
/// `powf` results, so caching never changes a single bit.
struct WeightTable {
    two_t: f64,
    cache: Vec<f64>,
}

impl WeightTable {
    fn new(t: f64) -> Self {
        WeightTable {
            two_t: 2.0 * t,
            cache: Vec::new(),
        }
    }

    fn get(&mut self, len: f64) -> f64 {
        if len >= 0.0 && len.fract() == 0.0 && len < (1 << 20) as f64 {
            let idx = len as usize;
            if idx >= self.cache.len() {
                self.cache.resize(idx + 1, f64::NAN);
            }
            if self.cache[idx].is_nan() {
                self.cache[idx] = (1.0 + len).powf(self.two_t);
            }
            self.cache[idx]
        } else {
            (1.0 + len).powf(self.two_t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormMode {
    /// `(Σ_{γ ∈ G_x} |f(γ)|²(1+ℓ(γ))^{2t})^{1/2}` at one unit.
    AtUnit(ArrowId),
    /// Supremum of the per-unit values.
    SupSource,
    /// Max over the function and its involution side; the involution's
    /// phases are unimodular, so only `|f(γ⁻¹)|` enters and no cocycle
    /// is needed.
    Symmetric,
}

fn fiber_weighted_sum(
    g: &Groupoid,
    f: &GFunction,
    l: &LengthFunction,
    weights: &mut WeightTable,
    x: ArrowId,
    inverted: bool,
) -> Result<f64> {
    let mut sum = 0.0;
    for &gamma in &g.source_fiber(x)? {
        let idx = if inverted { g.inv(gamma) } else { gamma } as usize;
        let c = f.coeffs[idx].norm_sqr();
        if c != 0.0 {
            sum += c * weights.get(l.value(gamma));
        }
    }
    Ok(sum)
}

/// Length-weighted ℓ²-seminorm of `f` at decay exponent `t ≥ 0`.
pub fn weighted_seminorm(
    g: &Groupoid,
    f: &GFunction,
    l: &LengthFunction,
    t: f64,
    mode: SeminormMode,
) -> Result<f64> {
    f.check(g)?;
    l.check_compat(g)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeT(t));
    }
    let mut weights = WeightTable::new(t);
    match mode {
        SeminormMode::AtUnit(x) => {
            if !g.is_unit(x) {
                return Err(Error::NotAUnit(x));
            }
            Ok(fiber_weighted_sum(g, f, l, &mut weights, x, false)?.sqrt())
        }
        SeminormMode::SupSource => {
            let mut best = 0.0f64;
            for x in g.units() {
                best = best.max(fiber_weighted_sum(g, f, l, &mut weights, x, false)?.sqrt());
            }
            Ok(best)
        }
        SeminormMode::Symmetric => {
            let mut best = 0.0f64;
            for x in g.units() {
                best = best.max(fiber_weighted_sum(g, f, l, &mut weights, x, false)?.sqrt());
                best = best.max(fiber_weighted_sum(g, f, l, &mut weights, x, true)?.sqrt());
            }
            Ok(best)
        }
    }
}

/// Schur-test bound `max(sup_x Σ_{γ∈G_x}|f(γ)|, sup_x Σ_{γ∈G^x}|f(γ)|)`;
/// dominates the reduced norm for every cocycle.
pub fn i_norm_bound(g: &Groupoid, f: &GFunction) -> Result<f64> {
    f.check(g)?;
    let mut best = 0.0f64;
    for x in g.units() {
        let mut row = 0.0;
        for &gamma in &g.source_fiber(x)? {
            row += f.coeffs[gamma as usize].norm();
        }
        let mut col = 0.0;
        for &gamma in &g.range_fiber(x)? {
            col += f.coeffs[gamma as usize].norm();
        }
        best = best.max(row).max(col);
    }
    Ok(best)
}
