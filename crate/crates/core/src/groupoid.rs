//! Finite groupoids with explicit arrow tables, plus constructors.
//!
//! A groupoid is stored as a finite arrow set closed under inversion and
//! partial composition. Units are arrows `u` with `src(u) = rng(u) = u`,
//! and every arrow's `src`/`rng` fields point at unit arrow ids. The
//! composite `compose(a, b)` means "apply `b`, then `a`" and is defined
//! exactly when `src(a) = rng(b)`.
//!
//! Two representations live behind one accessor API:
//!
//! * `Explicit` — arrows, sorted product table, and per-unit fiber lists.
//!   This is what file loading and most constructors produce.
//! * `Pair { n }` — the pair groupoid on `n` points, where the arrow
//!   `(y, x)` (from `x` to `y`) has id `y*n + x` and composition is index
//!   arithmetic. Nothing is materialized, which is what keeps fibers
//!   with thousands of points affordable.
//!
//! Arrow ids are always `0..num_arrows()`, in both representations.

use std::collections::BTreeSet;

use crate::error::{codes, Error, Result, Violation};

pub type ArrowId = u32;

/// One arrow, with its endpoints and inverse resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub id: ArrowId,
    pub src: ArrowId,
    pub rng: ArrowId,
    pub inv: ArrowId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ArrowData {
    src: ArrowId,
    rng: ArrowId,
    inv: ArrowId,
}

#[derive(Debug, Clone)]
struct Explicit {
    arrows: Vec<ArrowData>,
    /// Unit arrow ids, ascending.
    units: Vec<ArrowId>,
    /// Arrow id -> ordinal in `units`, or `u32::MAX` for non-units.
    unit_ordinal: Vec<u32>,
    /// Sorted by packed key `(a << 32) | b`; value is the composite id.
    product: Vec<(u64, ArrowId)>,
    /// Per unit ordinal: arrows with that source, ascending ids.
    src_fibers: Vec<Vec<ArrowId>>,
    /// Per unit ordinal: arrows with that range, ascending ids.
    rng_fibers: Vec<Vec<ArrowId>>,
}

#[derive(Debug, Clone)]
enum Repr {
    Explicit(Explicit),
    Pair { n: u32 },
}

#[derive(Debug, Clone)]
pub struct Groupoid {
    repr: Repr,
}

/// Past this many points, `validate` on the implicit pair representation
/// skips the exhaustive associativity sweep (composition there is index
/// arithmetic and associative identically); all cheaper axioms still run.
const PAIR_VALIDATE_FULL_LIMIT: u32 = 64;

fn pack(a: ArrowId, b: ArrowId) -> u64 {
    ((a as u64) << 32) | b as u64
}

impl Explicit {
    fn lookup(&self, a: ArrowId, b: ArrowId) -> Option<ArrowId> {
        let key = pack(a, b);
        self.product
            .binary_search_by_key(&key, |&(k, _)| k)
            .ok()
            .map(|i| self.product[i].1)
    }
}

impl Groupoid {
    // ---------------------------------------------------------------- basics

    pub fn num_arrows(&self) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.arrows.len(),
            Repr::Pair { n } => (*n as usize) * (*n as usize),
        }
    }

    pub fn num_units(&self) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.units.len(),
            Repr::Pair { n } => *n as usize,
        }
    }

    /// Unit arrow ids in ascending order.
    pub fn units(&self) -> Vec<ArrowId> {
        match &self.repr {
            Repr::Explicit(e) => e.units.clone(),
            Repr::Pair { n } => (0..*n).map(|x| x * n + x).collect(),
        }
    }

    pub fn unit_at(&self, ordinal: usize) -> ArrowId {
        match &self.repr {
            Repr::Explicit(e) => e.units[ordinal],
            Repr::Pair { n } => {
                let x = ordinal as u32;
                x * n + x
            }
        }
    }

    /// Ordinal of a unit arrow in the ascending unit list.
    pub fn unit_ordinal(&self, u: ArrowId) -> Option<usize> {
        match &self.repr {
            Repr::Explicit(e) => {
                let o = *e.unit_ordinal.get(u as usize)?;
                (o != u32::MAX).then_some(o as usize)
            }
            Repr::Pair { n } => {
                let (y, x) = ((u / n), (u % n));
                (u < n * n && y == x).then_some(x as usize)
            }
        }
    }

    pub fn is_unit(&self, a: ArrowId) -> bool {
        self.unit_ordinal(a).is_some()
    }

    pub fn src(&self, a: ArrowId) -> ArrowId {
        match &self.repr {
            Repr::Explicit(e) => e.arrows[a as usize].src,
            Repr::Pair { n } => {
                let x = a % n;
                x * n + x
            }
        }
    }

    pub fn rng(&self, a: ArrowId) -> ArrowId {
        match &self.repr {
            Repr::Explicit(e) => e.arrows[a as usize].rng,
            Repr::Pair { n } => {
                let y = a / n;
                y * n + y
            }
        }
    }

    pub fn inv(&self, a: ArrowId) -> ArrowId {
        match &self.repr {
            Repr::Explicit(e) => e.arrows[a as usize].inv,
            Repr::Pair { n } => {
                let (y, x) = (a / n, a % n);
                x * n + y
            }
        }
    }

    pub fn arrow(&self, a: ArrowId) -> Arrow {
        Arrow {
            id: a,
            src: self.src(a),
            rng: self.rng(a),
            inv: self.inv(a),
        }
    }

    /// The composite `a∘b` (apply `b` first), or `None` when
    /// `src(a) != rng(b)`.
    pub fn compose(&self, a: ArrowId, b: ArrowId) -> Option<ArrowId> {
        match &self.repr {
            Repr::Explicit(e) => e.lookup(a, b),
            Repr::Pair { n } => {
                let (za, wa) = (a / n, a % n);
                let (yb, xb) = (b / n, b % n);
                (wa == yb).then_some(za * n + xb)
            }
        }
    }

    /// Source fiber `G_x`: arrows with `src = x`, ascending ids.
    pub fn source_fiber(&self, x: ArrowId) -> Result<Vec<ArrowId>> {
        match &self.repr {
            Repr::Explicit(e) => {
                let o = self.unit_ordinal(x).ok_or(Error::NotAUnit(x))?;
                Ok(e.src_fibers[o].clone())
            }
            Repr::Pair { n } => {
                let o = self.unit_ordinal(x).ok_or(Error::NotAUnit(x))? as u32;
                Ok((0..*n).map(|y| y * n + o).collect())
            }
        }
    }

    /// Range fiber `G^x`: arrows with `rng = x`, ascending ids.
    pub fn range_fiber(&self, x: ArrowId) -> Result<Vec<ArrowId>> {
        match &self.repr {
            Repr::Explicit(e) => {
                let o = self.unit_ordinal(x).ok_or(Error::NotAUnit(x))?;
                Ok(e.rng_fibers[o].clone())
            }
            Repr::Pair { n } => {
                let o = self.unit_ordinal(x).ok_or(Error::NotAUnit(x))? as u32;
                Ok((o * n..o * n + n).collect())
            }
        }
    }

    /// For the implicit pair representation, the number of points.
    pub fn pair_points(&self) -> Option<u32> {
        match &self.repr {
            Repr::Pair { n } => Some(*n),
            Repr::Explicit(_) => None,
        }
    }

    /// All arrows whose source equals their range (loops), ascending.
    /// Units are included.
    pub fn isotropy_arrows(&self) -> Vec<ArrowId> {
        match &self.repr {
            Repr::Explicit(e) => (0..e.arrows.len() as u32)
                .filter(|&a| e.arrows[a as usize].src == e.arrows[a as usize].rng)
                .collect(),
            Repr::Pair { n } => (0..*n).map(|x| x * n + x).collect(),
        }
    }

    /// A groupoid is principal when its only loops are units.
    pub fn is_principal(&self) -> bool {
        match &self.repr {
            Repr::Explicit(_) => self.isotropy_arrows().iter().all(|&a| self.is_unit(a)),
            Repr::Pair { .. } => true,
        }
    }

    /// The isotropy subgroupoid (all loops, over all units), together
    /// with the inclusion into `self`.
    pub fn isotropy(&self) -> (Groupoid, GroupoidHom) {
        let keep: BTreeSet<ArrowId> = self.isotropy_arrows().into_iter().collect();
        self.subgroupoid(&keep)
            .expect("loops are closed under inversion and composition")
    }

    // ---------------------------------------------------------- constructors

    /// The pair groupoid on `n` points: one arrow `(y, x)` from `x` to
    /// `y` for every ordered pair, `(z, y)∘(y, x) = (z, x)`.
    pub fn pair(n: u32) -> Result<Groupoid> {
        if n == 0 {
            return Err(Error::Schema("pair groupoid needs at least 1 point".into()));
        }
        if n > 46_340 {
            return Err(Error::Schema(format!(
                "pair groupoid on {n} points overflows 32-bit arrow ids"
            )));
        }
        Ok(Groupoid {
            repr: Repr::Pair { n },
        })
    }

    /// A finite group presented by its full Cayley table
    /// (`table[a][b] = a·b`), viewed as a one-unit groupoid.
    pub fn group(table: &[Vec<u32>]) -> Result<Groupoid> {
        let m = table.len();
        if m == 0 {
            return Err(Error::NotAGroup("empty multiplication table".into()));
        }
        if table.iter().any(|row| row.len() != m) {
            return Err(Error::NotAGroup("multiplication table is not square".into()));
        }
        if table
            .iter()
            .any(|row| row.iter().any(|&v| v as usize >= m))
        {
            return Err(Error::DanglingId(
                "multiplication table entry out of range".into(),
            ));
        }
        let is_identity = |e: usize| {
            (0..m).all(|a| table[e][a] == a as u32) && (0..m).all(|a| table[a][e] == a as u32)
        };
        let e = (0..m)
            .find(|&cand| is_identity(cand))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity element".into()))?;
        let mut inv = vec![u32::MAX; m];
        for a in 0..m {
            let i = (0..m).find(|&b| table[a][b] == e as u32 && table[b][a] == e as u32);
            match i {
                Some(b) => inv[a] = b as u32,
                None => {
                    return Err(Error::NotAGroup(format!(
                        "element {a} has no two-sided inverse"
                    )))
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let ab_c = table[table[a][b] as usize][c];
                    let a_bc = table[a][table[b][c] as usize];
                    if ab_c != a_bc {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let eu = e as u32;
        let arrows: Vec<ArrowData> = (0..m)
            .map(|a| ArrowData {
                src: eu,
                rng: eu,
                inv: inv[a],
            })
            .collect();
        let mut product = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                product.push((pack(a as u32, b as u32), table[a][b]));
            }
        }
        Ok(Groupoid::from_tables(arrows, vec![eu], product))
    }

    /// The cyclic group `Z_n` as a one-unit groupoid (element `k` is the
    /// residue class `k`, identity `0`).
    pub fn cyclic(n: u32) -> Result<Groupoid> {
        if n == 0 {
            return Err(Error::NotAGroup("Z_0 is empty".into()));
        }
        let table: Vec<Vec<u32>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Groupoid::group(&table)
    }

    /// The product groupoid `G × H`. The arrow `(a, h)` has id
    /// `a·|H| + h`; everything is componentwise.
    pub fn product(g: &Groupoid, h: &Groupoid) -> Result<Groupoid> {
        let (ng, nh) = (g.num_arrows() as u64, h.num_arrows() as u64);
        if ng * nh > u32::MAX as u64 {
            return Err(Error::Schema(
                "product groupoid overflows 32-bit arrow ids".into(),
            ));
        }
        let nh32 = nh as u32;
        let id = |a: ArrowId, b: ArrowId| a * nh32 + b;
        let mut arrows = Vec::with_capacity((ng * nh) as usize);
        for a in 0..ng as u32 {
            for b in 0..nh32 {
                arrows.push(ArrowData {
                    src: id(g.src(a), h.src(b)),
                    rng: id(g.rng(a), h.rng(b)),
                    inv: id(g.inv(a), h.inv(b)),
                });
            }
        }
        let mut units = Vec::with_capacity(g.num_units() * h.num_units());
        for ug in g.units() {
            for uh in h.units() {
                units.push(id(ug, uh));
            }
        }
        units.sort_unstable();
        let mut product = Vec::new();
        for xg in g.units() {
            // Composable pairs through xg: src(a) = xg = rng(b).
            let (out_g, in_g) = (g.source_fiber(xg)?, g.range_fiber(xg)?);
            for xh in h.units() {
                let (out_h, in_h) = (h.source_fiber(xh)?, h.range_fiber(xh)?);
                for &ag in &out_g {
                    for &bg in &in_g {
                        let cg = g.compose(ag, bg).expect("fiber pairing is composable");
                        for &ah in &out_h {
                            for &bh in &in_h {
                                let ch = h.compose(ah, bh).expect("fiber pairing is composable");
                                product.push((pack(id(ag, ah), id(bg, bh)), id(cg, ch)));
                            }
                        }
                    }
                }
            }
        }
        product.sort_unstable_by_key(|&(k, _)| k);
        Ok(Groupoid::from_tables(arrows, units, product))
    }

    /// Restriction to a subset of units: keeps arrows whose source and
    /// range both lie in `units`. Returns the restricted groupoid and
    /// the inclusion homomorphism into `self`.
    pub fn restrict(&self, units: &BTreeSet<ArrowId>) -> Result<(Groupoid, GroupoidHom)> {
        for &u in units {
            if !self.is_unit(u) {
                return Err(Error::NotAUnit(u));
            }
        }
        let mut keep = BTreeSet::new();
        for a in 0..self.num_arrows() as u32 {
            if units.contains(&self.src(a)) && units.contains(&self.rng(a)) {
                keep.insert(a);
            }
        }
        self.subgroupoid(&keep)
    }

    /// Builds the subgroupoid on an arrow subset that is closed under
    /// inversion and composition (callers guarantee closure; endpoints
    /// of kept arrows are added automatically as units).
    fn subgroupoid(&self, keep: &BTreeSet<ArrowId>) -> Result<(Groupoid, GroupoidHom)> {
        let mut kept: Vec<ArrowId> = keep.iter().copied().collect();
        let mut with_units: BTreeSet<ArrowId> = keep.clone();
        for &a in &kept {
            with_units.insert(self.src(a));
            with_units.insert(self.rng(a));
        }
        kept = with_units.into_iter().collect();
        let index_of = |old: ArrowId| -> ArrowId {
            kept.binary_search(&old).expect("kept arrow present") as ArrowId
        };
        let mut arrows = Vec::with_capacity(kept.len());
        let mut units = Vec::new();
        for &old in &kept {
            arrows.push(ArrowData {
                src: index_of(self.src(old)),
                rng: index_of(self.rng(old)),
                inv: index_of(self.inv(old)),
            });
            if self.is_unit(old) {
                units.push(index_of(old));
            }
        }
        let mut product = Vec::new();
        for (ia, &a) in kept.iter().enumerate() {
            for (ib, &b) in kept.iter().enumerate() {
                if self.src(a) == self.rng(b) {
                    let c = self
                        .compose(a, b)
                        .expect("composable pair in host groupoid");
                    let ic = kept.binary_search(&c).map_err(|_| {
                        Error::DanglingId(format!(
                            "arrow subset not closed under composition: {a}∘{b} = {c}"
                        ))
                    })?;
                    product.push((pack(ia as u32, ib as u32), ic as u32));
                }
            }
        }
        product.sort_unstable_by_key(|&(k, _)| k);
        let sub = Groupoid::from_tables(arrows, units, product);
        let hom = GroupoidHom { map: kept };
        Ok((sub, hom))
    }

    /// The transformation groupoid `G ⋉ Y` of an action, together with
    /// the projection homomorphism `(γ, y) ↦ γ` onto `G`.
    pub fn transformation(g: &Groupoid, action: &GroupoidAction) -> Result<(Groupoid, GroupoidHom)> {
        action.validate(g)?;
        let p = &action.anchor;
        let npts = p.len() as u32;
        // Arrow set {(γ, y) : src(γ) = p(y)}, ordered by (γ, y).
        let mut ids: Vec<(ArrowId, u32)> = Vec::new();
        for a in 0..g.num_arrows() as u32 {
            for y in 0..npts {
                if g.src(a) == p[y as usize] {
                    ids.push((a, y));
                }
            }
        }
        let index_of = |a: ArrowId, y: u32| -> ArrowId {
            ids.binary_search(&(a, y)).expect("arrow present") as ArrowId
        };
        let act = |a: ArrowId, y: u32| -> u32 { action.map[&(a, y)] };
        let mut arrows = Vec::with_capacity(ids.len());
        let mut units = Vec::new();
        let mut map = Vec::with_capacity(ids.len());
        for &(a, y) in &ids {
            let ay = act(a, y);
            let src_unit = index_of(p[y as usize], y);
            let rng_unit = index_of(p[ay as usize], ay);
            arrows.push(ArrowData {
                src: src_unit,
                rng: rng_unit,
                inv: index_of(g.inv(a), ay),
            });
            if g.is_unit(a) {
                units.push(index_of(a, y));
            }
            map.push(a);
        }
        units.sort_unstable();
        let mut product = Vec::new();
        for &(b, y) in &ids {
            let by = act(b, y);
            for a in g.source_fiber(g.rng(b))? {
                // (a, b·y) ∘ (b, y) = (a∘b, y)
                let ab = g.compose(a, b).expect("src(a) = rng(b)");
                product.push((pack(index_of(a, by), index_of(b, y)), index_of(ab, y)));
            }
        }
        product.sort_unstable_by_key(|&(k, _)| k);
        let tg = Groupoid::from_tables(arrows, units, product);
        Ok((tg, GroupoidHom { map }))
    }

    /// The blow-up of `G` along `p: Y → G⁰`: arrows are triples
    /// `(w, γ, y)` with `p(w) = rng(γ)` and `p(y) = src(γ)`, composing as
    /// `(w, γ, y)∘(y, η, z) = (w, γ∘η, z)`. Returns the blow-up and the
    /// middle projection `(w, γ, y) ↦ γ`, which is `k`-regular when every
    /// unit has exactly `k` preimages under `p`.
    pub fn blow_up(g: &Groupoid, p: &[ArrowId]) -> Result<(Groupoid, GroupoidHom)> {
        for &u in p {
            if !g.is_unit(u) {
                return Err(Error::NotAUnit(u));
            }
        }
        let hit: BTreeSet<ArrowId> = p.iter().copied().collect();
        for u in g.units() {
            if !hit.contains(&u) {
                return Err(Error::NotSurjective(format!(
                    "blow-up map misses unit {u}"
                )));
            }
        }
        let npts = p.len() as u32;
        let mut ids: Vec<(ArrowId, u32, u32)> = Vec::new(); // (γ, w, y), lexicographic
        for a in 0..g.num_arrows() as u32 {
            for w in 0..npts {
                if p[w as usize] != g.rng(a) {
                    continue;
                }
                for y in 0..npts {
                    if p[y as usize] == g.src(a) {
                        ids.push((a, w, y));
                    }
                }
            }
        }
        let index_of = |a: ArrowId, w: u32, y: u32| -> ArrowId {
            ids.binary_search(&(a, w, y)).expect("arrow present") as ArrowId
        };
        let mut arrows = Vec::with_capacity(ids.len());
        let mut units = Vec::new();
        let mut map = Vec::with_capacity(ids.len());
        for &(a, w, y) in &ids {
            arrows.push(ArrowData {
                src: index_of(g.src(a), y, y),
                rng: index_of(g.rng(a), w, w),
                inv: index_of(g.inv(a), y, w),
            });
            if g.is_unit(a) && w == y {
                units.push(index_of(a, w, y));
            }
            map.push(a);
        }
        units.sort_unstable();
        let mut product = Vec::new();
        for &(b, wb, yb) in &ids {
            for a in g.source_fiber(g.rng(b))? {
                let ab = g.compose(a, b).expect("src(a) = rng(b)");
                for wa in 0..npts {
                    if p[wa as usize] == g.rng(a) {
                        product.push((
                            pack(index_of(a, wa, wb), index_of(b, wb, yb)),
                            index_of(ab, wa, yb),
                        ));
                    }
                }
            }
        }
        product.sort_unstable_by_key(|&(k, _)| k);
        let bu = Groupoid::from_tables(arrows, units, product);
        Ok((bu, GroupoidHom { map }))
    }

    /// Assembles an explicit groupoid from raw tables. Callers must
    /// supply structurally coherent data; run [`Groupoid::validate`] to
    /// check the axioms.
    fn from_tables(
        arrows: Vec<ArrowData>,
        units: Vec<ArrowId>,
        product: Vec<(u64, ArrowId)>,
    ) -> Groupoid {
        let mut unit_ordinal = vec![u32::MAX; arrows.len()];
        for (o, &u) in units.iter().enumerate() {
            unit_ordinal[u as usize] = o as u32;
        }
        let mut src_fibers = vec![Vec::new(); units.len()];
        let mut rng_fibers = vec![Vec::new(); units.len()];
        for (a, d) in arrows.iter().enumerate() {
            let so = unit_ordinal[d.src as usize];
            let ro = unit_ordinal[d.rng as usize];
            if so != u32::MAX {
                src_fibers[so as usize].push(a as u32);
            }
            if ro != u32::MAX {
                rng_fibers[ro as usize].push(a as u32);
            }
        }
        Groupoid {
            repr: Repr::Explicit(Explicit {
                arrows,
                units,
                unit_ordinal,
                product,
                src_fibers,
                rng_fibers,
            }),
        }
    }

    /// Builds an explicit groupoid from the external-format pieces:
    /// arrow records and a composable-pair product list. Performs shape
    /// and reference checks (`DANGLING_ID`), not axiom validation.
    pub fn from_parts(
        units: Vec<ArrowId>,
        arrows: Vec<Arrow>,
        product_entries: Vec<(ArrowId, ArrowId, ArrowId)>,
    ) -> Result<Groupoid> {
        let n = arrows.len();
        let mut data = vec![
            ArrowData {
                src: u32::MAX,
                rng: u32::MAX,
                inv: u32::MAX
            };
            n
        ];
        let mut seen = vec![false; n];
        for a in &arrows {
            let id = a.id as usize;
            if id >= n {
                return Err(Error::Schema(format!(
                    "arrow ids must be exactly 0..{n}, found {}",
                    a.id
                )));
            }
            if seen[id] {
                return Err(Error::Schema(format!("duplicate arrow id {}", a.id)));
            }
            seen[id] = true;
            for (field, v) in [("src", a.src), ("rng", a.rng), ("inv", a.inv)] {
                if v as usize >= n {
                    return Err(Error::DanglingId(format!(
                        "arrow {}: {field} references missing arrow {v}",
                        a.id
                    )));
                }
            }
            data[id] = ArrowData {
                src: a.src,
                rng: a.rng,
                inv: a.inv,
            };
        }
        let mut units = units;
        units.sort_unstable();
        units.dedup();
        for &u in &units {
            if u as usize >= n {
                return Err(Error::DanglingId(format!("unit {u} is not an arrow id")));
            }
        }
        let mut product = Vec::with_capacity(product_entries.len());
        for (a, b, ab) in product_entries {
            for v in [a, b, ab] {
                if v as usize >= n {
                    return Err(Error::DanglingId(format!(
                        "product entry ({a}, {b}, {ab}) references missing arrow {v}"
                    )));
                }
            }
            product.push((pack(a, b), ab));
        }
        product.sort_unstable_by_key(|&(k, _)| k);
        if product.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Schema("duplicate product entry".into()));
        }
        Ok(Groupoid::from_tables(data, units, product))
    }

    /// Re-materializes the groupoid as explicit tables (identity on
    /// explicit inputs). Arrow ids are unchanged.
    pub fn to_explicit(&self) -> Result<Groupoid> {
        match &self.repr {
            Repr::Explicit(_) => Ok(self.clone()),
            Repr::Pair { n } => {
                let n = *n;
                if n > 256 {
                    return Err(Error::Schema(format!(
                        "refusing to materialize pair groupoid on {n} points ({} product entries)",
                        (n as u64).pow(3)
                    )));
                }
                let mut arrows = Vec::with_capacity((n * n) as usize);
                for a in 0..n * n {
                    arrows.push(ArrowData {
                        src: self.src(a),
                        rng: self.rng(a),
                        inv: self.inv(a),
                    });
                }
                let units = self.units();
                let mut product = Vec::with_capacity((n as usize).pow(3));
                for z in 0..n {
                    for y in 0..n {
                        for x in 0..n {
                            product.push((pack(z * n + y, y * n + x), z * n + x));
                        }
                    }
                }
                product.sort_unstable_by_key(|&(k, _)| k);
                Ok(Groupoid::from_tables(arrows, units, product))
            }
        }
    }

    // ------------------------------------------------------------- validate

    /// Checks every groupoid axiom and returns all violations found.
    ///
    /// Covers: units are idempotent loops and act as identities; sources,
    /// ranges, and inverses are coherent; the product table is defined on
    /// exactly the composable pairs with matching endpoints; composition
    /// is associative. On implicit pair representations past
    /// [`PAIR_VALIDATE_FULL_LIMIT`] points the associativity sweep is
    /// skipped — composition there is index arithmetic.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.num_arrows() as u32;
        for &u in &self.units() {
            if self.src(u) != u || self.rng(u) != u {
                out.push(Violation::new(
                    codes::UNIT_ENDPOINTS,
                    vec![u],
                    "unit arrow must have src = rng = itself",
                ));
            }
            if self.inv(u) != u {
                out.push(Violation::new(
                    codes::INVERSE_MISMATCH,
                    vec![u],
                    "unit arrow must be its own inverse",
                ));
            }
        }
        for a in 0..n {
            let (s, r, i) = (self.src(a), self.rng(a), self.inv(a));
            if !self.is_unit(s) || !self.is_unit(r) {
                out.push(Violation::new(
                    codes::ENDPOINT_NOT_UNIT,
                    vec![a],
                    "src/rng must be unit arrow ids",
                ));
                continue;
            }
            if self.inv(i) != a || self.src(i) != r || self.rng(i) != s {
                out.push(Violation::new(
                    codes::INVERSE_MISMATCH,
                    vec![a, i],
                    "inverse must swap endpoints and be involutive",
                ));
            }
            match self.compose(a, i) {
                Some(u) if u == r => {}
                got => out.push(Violation::new(
                    codes::INVERSE_MISMATCH,
                    vec![a, i],
                    format!("a∘inv(a) must be the unit at rng(a), got {got:?}"),
                )),
            }
            match self.compose(self.rng(a), a) {
                Some(c) if c == a => {}
                got => out.push(Violation::new(
                    codes::UNIT_IDENTITY,
                    vec![a],
                    format!("rng(a)∘a must equal a, got {got:?}"),
                )),
            }
            match self.compose(a, self.src(a)) {
                Some(c) if c == a => {}
                got => out.push(Violation::new(
                    codes::UNIT_IDENTITY,
                    vec![a],
                    format!("a∘src(a) must equal a, got {got:?}"),
                )),
            }
        }
        // Product domain + endpoint checks over all pairs.
        if let Repr::Explicit(e) = &self.repr {
            for &(key, ab) in &e.product {
                let (a, b) = ((key >> 32) as u32, key as u32);
                if a >= n || b >= n || ab >= n {
                    out.push(Violation::new(
                        codes::PRODUCT_DOMAIN,
                        vec![a, b, ab],
                        "product entry references missing arrows",
                    ));
                    continue;
                }
                if self.src(a) != self.rng(b) {
                    out.push(Violation::new(
                        codes::PRODUCT_DOMAIN,
                        vec![a, b],
                        "product defined on a non-composable pair",
                    ));
                } else if self.src(ab) != self.src(b) || self.rng(ab) != self.rng(a) {
                    out.push(Violation::new(
                        codes::PRODUCT_ENDPOINTS,
                        vec![a, b, ab],
                        "composite endpoints must be src(b) → rng(a)",
                    ));
                }
            }
            for x in self.units() {
                let left = &e.rng_fibers[self.unit_ordinal(x).unwrap()];
                let right = &e.src_fibers[self.unit_ordinal(x).unwrap()];
                // composable pairs through x: src(a) = x = rng(b)
                for &a in right {
                    for &b in left {
                        if e.lookup(a, b).is_none() {
                            out.push(Violation::new(
                                codes::PRODUCT_DOMAIN,
                                vec![a, b],
                                "composable pair missing from product table",
                            ));
                        }
                    }
                }
            }
        }
        let sweep_associativity = match &self.repr {
            Repr::Explicit(_) => true,
            Repr::Pair { n } => *n <= PAIR_VALIDATE_FULL_LIMIT,
        };
        if sweep_associativity && out.is_empty() {
            'outer: for b in 0..n {
                let lefts = self.source_fiber(self.rng(b)).expect("endpoints are units");
                let rights = self.range_fiber(self.src(b)).expect("endpoints are units");
                for &a in &lefts {
                    let ab = self.compose(a, b);
                    for &c in &rights {
                        let bc = self.compose(b, c);
                        let l = ab.and_then(|v| self.compose(v, c));
                        let r = bc.and_then(|v| self.compose(a, v));
                        if l != r || l.is_none() {
                            out.push(Violation::new(
                                codes::ASSOCIATIVITY,
                                vec![a, b, c],
                                format!("(a∘b)∘c = {l:?} but a∘(b∘c) = {r:?}"),
                            ));
                            if out.len() >= 32 {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

// ------------------------------------------------------------------- actions

/// A (left) action of a groupoid on a finite point set `Y = {0..len-1}`:
/// an anchor map `p: Y → G⁰` and, for every pair `(γ, y)` with
/// `src(γ) = p(y)`, the moved point `γ·y`.
#[derive(Debug, Clone)]
pub struct GroupoidAction {
    pub anchor: Vec<ArrowId>,
    pub map: std::collections::BTreeMap<(ArrowId, u32), u32>,
}

impl GroupoidAction {
    /// Checks the action axioms against `g`: totality on the anchored
    /// pairs, unit triviality, range compatibility `p(γ·y) = rng(γ)`,
    /// and multiplicativity `(γ∘η)·y = γ·(η·y)`.
    pub fn validate(&self, g: &Groupoid) -> Result<()> {
        let npts = self.anchor.len() as u32;
        if npts == 0 {
            return Err(Error::NotAnAction("empty point set".into()));
        }
        for (y, &u) in self.anchor.iter().enumerate() {
            if !g.is_unit(u) {
                return Err(Error::NotAnAction(format!(
                    "anchor of point {y} is not a unit"
                )));
            }
        }
        for (&(a, y), &ay) in &self.map {
            if a as usize >= g.num_arrows() || y >= npts || ay >= npts {
                return Err(Error::NotAnAction(format!(
                    "action entry ({a}, {y}) → {ay} out of range"
                )));
            }
            if g.src(a) != self.anchor[y as usize] {
                return Err(Error::NotAnAction(format!(
                    "action defined on ({a}, {y}) but src(γ) ≠ p(y)"
                )));
            }
            if self.anchor[ay as usize] != g.rng(a) {
                return Err(Error::NotAnAction(format!(
                    "p(γ·y) ≠ rng(γ) for ({a}, {y})"
                )));
            }
        }
        for y in 0..npts {
            for a in 0..g.num_arrows() as u32 {
                if g.src(a) == self.anchor[y as usize] && !self.map.contains_key(&(a, y)) {
                    return Err(Error::NotAnAction(format!(
                        "action undefined on anchored pair ({a}, {y})"
                    )));
                }
            }
            let u = self.anchor[y as usize];
            if self.map[&(u, y)] != y {
                return Err(Error::NotAnAction(format!(
                    "unit must act trivially on point {y}"
                )));
            }
        }
        for (&(b, y), &by) in &self.map {
            for a in g.source_fiber(g.rng(b))? {
                let ab = g.compose(a, b).expect("composable");
                if self.map[&(ab, y)] != self.map[&(a, by)] {
                    return Err(Error::NotAnAction(format!(
                        "(γ∘η)·y ≠ γ·(η·y) for γ={a}, η={b}, y={y}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The action of a group groupoid on itself by translation — handy
    /// for building principal transformation groupoids in tests.
    pub fn translation(g: &Groupoid) -> Result<GroupoidAction> {
        if g.num_units() != 1 {
            return Err(Error::NotAnAction(
                "translation action needs a one-unit groupoid".into(),
            ));
        }
        let unit = g.units()[0];
        let npts = g.num_arrows() as u32;
        let mut map = std::collections::BTreeMap::new();
        for a in 0..npts {
            for y in 0..npts {
                map.insert((a, y), g.compose(a, y).expect("group is one fiber"));
            }
        }
        Ok(GroupoidAction {
            anchor: vec![unit; npts as usize],
            map,
        })
    }
}

// ----------------------------------------------------------- homomorphisms

/// A groupoid homomorphism, stored as a total arrow map
/// (`map[h] = image of arrow h`). The unit map is induced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidHom {
    pub map: Vec<ArrowId>,
}

impl GroupoidHom {
    pub fn apply(&self, a: ArrowId) -> ArrowId {
        self.map[a as usize]
    }

    /// Structural checks for `φ: dom → cod`: total, in-range, unit- and
    /// inverse-preserving, and multiplicative on composable pairs.
    pub fn validate(&self, dom: &Groupoid, cod: &Groupoid) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.map.len() != dom.num_arrows() {
            out.push(Violation::new(
                codes::HOM_STRUCTURE,
                vec![],
                format!(
                    "arrow map must be total: {} entries for {} arrows",
                    self.map.len(),
                    dom.num_arrows()
                ),
            ));
            return out;
        }
        for (h, &gh) in self.map.iter().enumerate() {
            let h = h as u32;
            if gh as usize >= cod.num_arrows() {
                out.push(Violation::new(
                    codes::HOM_STRUCTURE,
                    vec![h, gh],
                    "image arrow id out of range",
                ));
                return out;
            }
            if self.apply(dom.src(h)) != cod.src(gh)
                || self.apply(dom.rng(h)) != cod.rng(gh)
                || self.apply(dom.inv(h)) != cod.inv(gh)
            {
                out.push(Violation::new(
                    codes::HOM_STRUCTURE,
                    vec![h, gh],
                    "src/rng/inv not preserved",
                ));
            }
            if dom.is_unit(h) && !cod.is_unit(gh) {
                out.push(Violation::new(
                    codes::HOM_STRUCTURE,
                    vec![h, gh],
                    "unit mapped to non-unit",
                ));
            }
        }
        for b in 0..dom.num_arrows() as u32 {
            for a in dom.source_fiber(dom.rng(b)).expect("unit") {
                let ab = dom.compose(a, b).expect("composable");
                match cod.compose(self.apply(a), self.apply(b)) {
                    Some(img) if img == self.apply(ab) => {}
                    got => {
                        out.push(Violation::new(
                            codes::HOM_STRUCTURE,
                            vec![a, b],
                            format!(
                                "φ(a∘b) = {} but φ(a)∘φ(b) = {got:?}",
                                self.apply(ab)
                            ),
                        ));
                        if out.len() >= 32 {
                            return out;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Degree of regularity of `φ: H → G`: the constant `n ≥ 1` such that
/// `φ` maps `H⁰` onto `G⁰` and every source fiber `H_y` covers every
/// arrow of `G_{φ(y)}` exactly `n` times. Errors with `NOT_REGULAR`
/// (carrying a witness) when no such constant exists.
pub fn n_regularity(hom: &GroupoidHom, h: &Groupoid, g: &Groupoid) -> Result<u32> {
    let violations = hom.validate(h, g);
    if !violations.is_empty() {
        return Err(Error::validation("groupoid homomorphism", violations));
    }
    let image_units: BTreeSet<ArrowId> = h.units().iter().map(|&u| hom.apply(u)).collect();
    for u in g.units() {
        if !image_units.contains(&u) {
            return Err(Error::NotRegular(format!(
                "unit map is not onto: unit {u} of the codomain is missed"
            )));
        }
    }
    let mut n: Option<u32> = None;
    for y in h.units() {
        let x = hom.apply(y);
        let mut counts: std::collections::BTreeMap<ArrowId, u32> = g
            .source_fiber(x)?
            .into_iter()
            .map(|gamma| (gamma, 0))
            .collect();
        for eta in h.source_fiber(y)? {
            let img = hom.apply(eta);
            match counts.get_mut(&img) {
                Some(c) => *c += 1,
                None => {
                    return Err(Error::NotRegular(format!(
                        "arrow {eta} over unit {y} maps outside the fiber over {x}"
                    )))
                }
            }
        }
        for (gamma, c) in counts {
            match n {
                None => {
                    if c == 0 {
                        return Err(Error::NotRegular(format!(
                            "arrow {gamma} in the fiber over unit {x} has no preimage over {y}"
                        )));
                    }
                    n = Some(c);
                }
                Some(expected) if c != expected => {
                    return Err(Error::NotRegular(format!(
                        "fiber count over (unit {y}, arrow {gamma}) is {c}, expected {expected}"
                    )));
                }
                _ => {}
            }
        }
    }
    n.ok_or_else(|| Error::NotRegular("domain has no units".into()))
}

/// The two projections of `Groupoid::product(g, h)`.
pub fn product_projections(g: &Groupoid, h: &Groupoid) -> (GroupoidHom, GroupoidHom) {
    let nh = h.num_arrows() as u32;
    let total = g.num_arrows() as u32 * nh;
    let mut left = Vec::with_capacity(total as usize);
    let mut right = Vec::with_capacity(total as usize);
    for ab in 0..total {
        left.push(ab / nh);
        right.push(ab % nh);
    }
    (GroupoidHom { map: left }, GroupoidHom { map: right })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Groupoid {
        Groupoid::cyclic(2).unwrap()
    }

    #[test]
    fn pair_groupoid_algebra_matches_ordered_pair_model() {
        let g = Groupoid::pair(3).unwrap();
        assert_eq!(g.num_arrows(), 9);
        assert_eq!(g.num_units(), 3);
        // Oracle: arrow (y, x) has id y*3 + x, src x, rng y.
        for y in 0..3u32 {
            for x in 0..3u32 {
                let a = y * 3 + x;
                assert_eq!(g.src(a), x * 3 + x);
                assert_eq!(g.rng(a), y * 3 + y);
                assert_eq!(g.inv(a), x * 3 + y);
            }
        }
        // (z,y)∘(y,x) = (z,x); anything else undefined.
        for z in 0..3u32 {
            for y in 0..3u32 {
                for w in 0..3u32 {
                    for x in 0..3u32 {
                        let got = g.compose(z * 3 + y, w * 3 + x);
                        if y == w {
                            assert_eq!(got, Some(z * 3 + x));
                        } else {
                            assert_eq!(got, None);
                        }
                    }
                }
            }
        }
        assert!(g.is_principal());
        assert!(g.validate().is_empty());
    }

    #[test]
    fn pair_explicit_and_implicit_representations_agree() {
        let implicit = Groupoid::pair(4).unwrap();
        let explicit = implicit.to_explicit().unwrap();
        assert_eq!(explicit.num_arrows(), implicit.num_arrows());
        assert_eq!(explicit.units(), implicit.units());
        for a in 0..16u32 {
            assert_eq!(explicit.arrow(a), implicit.arrow(a));
            for b in 0..16u32 {
                assert_eq!(explicit.compose(a, b), implicit.compose(a, b));
            }
        }
        for u in implicit.units() {
            assert_eq!(
                explicit.source_fiber(u).unwrap(),
                implicit.source_fiber(u).unwrap()
            );
            assert_eq!(
                explicit.range_fiber(u).unwrap(),
                implicit.range_fiber(u).unwrap()
            );
        }
        assert!(explicit.validate().is_empty());
    }

    #[test]
    fn cyclic_group_is_a_one_unit_groupoid() {
        let g = Groupoid::cyclic(6).unwrap();
        assert_eq!(g.num_units(), 1);
        assert_eq!(g.num_arrows(), 6);
        assert_eq!(g.compose(2, 5), Some(1));
        assert_eq!(g.inv(4), 2);
        assert!(!g.is_principal());
        assert_eq!(g.isotropy_arrows().len(), 6);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn broken_cayley_tables_are_rejected() {
        // No identity.
        let t = vec![vec![0u32, 0], vec![0, 0]];
        assert!(matches!(Groupoid::group(&t), Err(Error::NotAGroup(_))));
        // Identity exists but 1 has no inverse.
        let t = vec![vec![0u32, 1], vec![1, 1]];
        assert!(matches!(Groupoid::group(&t), Err(Error::NotAGroup(_))));
        // Identity and two-sided inverses, but associativity broken:
        // Z_5 with the cell 1·1 corrupted from 2 to 4.
        let mut t: Vec<Vec<u32>> = (0..5)
            .map(|a| (0..5).map(|b| (a + b) % 5).collect())
            .collect();
        t[1][1] = 4;
        let err = Groupoid::group(&t).unwrap_err();
        assert!(matches!(&err, Error::NotAGroup(m) if m.contains("associativity")));
    }

    #[test]
    fn swap_action_transformation_groupoid_is_principal() {
        let g = z2();
        let unit = g.units()[0];
        let mut map = std::collections::BTreeMap::new();
        for y in 0..2u32 {
            map.insert((unit, y), y);
            map.insert((1, y), 1 - y);
        }
        let action = GroupoidAction {
            anchor: vec![unit, unit],
            map,
        };
        let (tg, proj) = Groupoid::transformation(&g, &action).unwrap();
        assert_eq!(tg.num_arrows(), 4);
        assert_eq!(tg.num_units(), 2);
        assert!(tg.is_principal());
        assert!(tg.validate().is_empty());
        assert!(proj.validate(&tg, &g).is_empty());
        assert_eq!(n_regularity(&proj, &tg, &g).unwrap(), 1);
    }

    #[test]
    fn trivial_action_keeps_isotropy() {
        let g = z2();
        let unit = g.units()[0];
        let mut map = std::collections::BTreeMap::new();
        map.insert((unit, 0u32), 0u32);
        map.insert((1, 0), 0);
        let action = GroupoidAction {
            anchor: vec![unit],
            map,
        };
        let (tg, _) = Groupoid::transformation(&g, &action).unwrap();
        assert_eq!(tg.num_arrows(), 2);
        assert!(!tg.is_principal());
        let (iso, _) = tg.isotropy();
        assert_eq!(iso.num_arrows(), 2);
    }

    #[test]
    fn action_axiom_failures_are_reported() {
        let g = z2();
        let unit = g.units()[0];
        // p(γ·y) mismatch is impossible with one unit; break totality instead.
        let action = GroupoidAction {
            anchor: vec![unit],
            map: std::collections::BTreeMap::new(),
        };
        assert!(matches!(
            Groupoid::transformation(&g, &action),
            Err(Error::NotAnAction(_))
        ));
        // Non-multiplicative: Z_4 acting on 2 points through the quotient
        // map is fine, but sending the generator to identity while its
        // square swaps is not.
        let z4 = Groupoid::cyclic(4).unwrap();
        let u = z4.units()[0];
        let mut map = std::collections::BTreeMap::new();
        for y in 0..2u32 {
            map.insert((u, y), y);
            map.insert((1, y), y);
            map.insert((2, y), 1 - y);
            map.insert((3, y), y);
        }
        let bad = GroupoidAction {
            anchor: vec![u, u],
            map,
        };
        assert!(matches!(
            Groupoid::transformation(&z4, &bad),
            Err(Error::NotAnAction(_))
        ));
    }

    #[test]
    fn product_groupoid_composes_componentwise() {
        let g = Groupoid::pair(2).unwrap();
        let h = z2();
        let p = Groupoid::product(&g, &h).unwrap();
        assert_eq!(p.num_arrows(), 8);
        assert_eq!(p.num_units(), 2);
        assert!(p.validate().is_empty());
        let (pl, pr) = product_projections(&g, &h);
        assert!(pl.validate(&p, &g).is_empty());
        assert!(pr.validate(&p, &h).is_empty());
        // Componentwise oracle on a sample: (a,h)∘(b,k) = (a∘b, h∘k).
        for a in 0..4u32 {
            for hh in 0..2u32 {
                for b in 0..4u32 {
                    for k in 0..2u32 {
                        let lhs = p.compose(a * 2 + hh, b * 2 + k);
                        let rhs = match (g.compose(a, b), h.compose(hh, k)) {
                            (Some(ab), Some(hk)) => Some(ab * 2 + hk),
                            _ => None,
                        };
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_of_pair_4_to_two_units_is_pair_2() {
        let g = Groupoid::pair(4).unwrap();
        let units: BTreeSet<ArrowId> = [g.unit_at(0), g.unit_at(1)].into_iter().collect();
        let (sub, incl) = g.restrict(&units).unwrap();
        assert_eq!(sub.num_arrows(), 4);
        assert_eq!(sub.num_units(), 2);
        assert!(sub.is_principal());
        assert!(sub.validate().is_empty());
        assert!(incl.validate(&sub, &g).is_empty());
        // The inclusion lands on arrows between points 0 and 1 only.
        for &old in &incl.map {
            let (y, x) = (old / 4, old % 4);
            assert!(y < 2 && x < 2);
        }
    }

    #[test]
    fn two_fold_blow_up_projection_is_two_regular() {
        let g = z2();
        let unit = g.units()[0];
        let (bu, p0) = Groupoid::blow_up(&g, &[unit, unit]).unwrap();
        assert_eq!(bu.num_arrows(), 8); // |G| · k² = 2 · 4
        assert_eq!(bu.num_units(), 2);
        assert!(bu.validate().is_empty());
        assert!(p0.validate(&bu, &g).is_empty());
        assert_eq!(n_regularity(&p0, &bu, &g).unwrap(), 2);
        // Oracle: fiber over each blown-up unit has |G_x| · k arrows.
        for y in bu.units() {
            assert_eq!(bu.source_fiber(y).unwrap().len(), 4);
        }
    }

    #[test]
    fn three_fold_blow_up_is_three_regular() {
        let g = z2();
        let unit = g.units()[0];
        let (bu, p0) = Groupoid::blow_up(&g, &[unit, unit, unit]).unwrap();
        assert_eq!(bu.num_arrows(), 18);
        assert_eq!(n_regularity(&p0, &bu, &g).unwrap(), 3);
    }

    #[test]
    fn blow_up_requires_surjective_anchor() {
        let g = Groupoid::pair(2).unwrap();
        let u0 = g.unit_at(0);
        assert!(matches!(
            Groupoid::blow_up(&g, &[u0, u0]),
            Err(Error::NotSurjective(_))
        ));
    }

    #[test]
    fn non_regular_hom_reports_witness() {
        // Inclusion of a unit into pair(2) covers only part of each fiber.
        let g = Groupoid::pair(2).unwrap();
        let (sub, incl) = g
            .restrict(&[g.unit_at(0)].into_iter().collect())
            .unwrap();
        assert_eq!(sub.num_arrows(), 1);
        let err = n_regularity(&incl, &sub, &g).unwrap_err();
        assert!(err.to_string().contains("NOT_REGULAR"));
    }

    #[test]
    fn validate_flags_corrupted_tables() {
        // Break the inverse of a loaded pair(2): say inv((1,0)) = (1,0).
        let base = Groupoid::pair(2).unwrap().to_explicit().unwrap();
        let mut arrows: Vec<Arrow> = (0..4).map(|a| base.arrow(a)).collect();
        arrows[2].inv = 2; // arrow (1,0) declared self-inverse
        let product = match &base.repr {
            Repr::Explicit(e) => e
                .product
                .iter()
                .map(|&(k, v)| ((k >> 32) as u32, k as u32, v))
                .collect::<Vec<_>>(),
            _ => unreachable!(),
        };
        let broken = Groupoid::from_parts(base.units(), arrows, product).unwrap();
        let violations = broken.validate();
        assert!(violations.iter().any(|v| v.code == codes::INVERSE_MISMATCH));

        // Corrupt one product entry to break associativity/endpoints.
        let mut product2: Vec<(ArrowId, ArrowId, ArrowId)> = match &base.repr {
            Repr::Explicit(e) => e
                .product
                .iter()
                .map(|&(k, v)| ((k >> 32) as u32, k as u32, v))
                .collect(),
            _ => unreachable!(),
        };
        // (1,0)∘(0,0): ids 2∘0 = 2; redirect it to the unit 0.
        for entry in product2.iter_mut() {
            if entry.0 == 2 && entry.1 == 0 {
                entry.2 = 0;
            }
        }
        let arrows2: Vec<Arrow> = (0..4).map(|a| base.arrow(a)).collect();
        let broken2 = Groupoid::from_parts(base.units(), arrows2, product2).unwrap();
        let violations2 = broken2.validate();
        assert!(!violations2.is_empty());
    }

    #[test]
    fn from_parts_rejects_dangling_references() {
        let arrows = vec![Arrow {
            id: 0,
            src: 0,
            rng: 0,
            inv: 5,
        }];
        assert!(matches!(
            Groupoid::from_parts(vec![0], arrows, vec![]),
            Err(Error::DanglingId(_))
        ));
    }

    #[test]
    fn translation_action_of_z2_recovers_pair_2() {
        let g = z2();
        let action = GroupoidAction::translation(&g).unwrap();
        let (tg, proj) = Groupoid::transformation(&g, &action).unwrap();
        assert_eq!(tg.num_arrows(), 4);
        assert!(tg.is_principal());
        assert_eq!(n_regularity(&proj, &tg, &g).unwrap(), 1);
    }
}
