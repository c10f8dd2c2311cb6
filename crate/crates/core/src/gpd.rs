//! Explicit finite groupoids, functors between them and natural isomorphisms.
//!
//! Arrows carry dense ids `0..arrow_count`. Composition is stored once per
//! composable pair: the composite `g ∘ f` lives at `row_start[g] + in_pos[f]`,
//! where `in_pos[f]` is the rank of `f` among the arrows ending at `dst(f)`.

use rustc_hash::FxHashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(PartialEq, Eq, Hash)]
struct Tables {
    objects: usize,
    src: Vec<u32>,
    dst: Vec<u32>,
    identity: Vec<u32>,
    inverse: Vec<u32>,
    row_start: Vec<u32>,
    in_pos: Vec<u32>,
    compose: Vec<u32>,
}

/// A finite groupoid given by explicit tables.
///
/// Cloning is cheap: the tables are shared.
#[derive(Clone)]
pub struct FinGroupoid {
    t: Arc<Tables>,
    homs: Arc<Vec<Vec<usize>>>,
}

impl PartialEq for FinGroupoid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t) || self.t == other.t
    }
}
impl Eq for FinGroupoid {}

impl Hash for FinGroupoid {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.t.hash(state)
    }
}

impl fmt::Debug for FinGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinGroupoid({} objects, {} arrows)",
            self.object_count(),
            self.arrow_count()
        )
    }
}

/// A single law violation found by [`FinGroupoid::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IdentityEndpoints { object: usize, arrow: usize },
    CompositeEndpoints { g: usize, f: usize, composite: usize },
    InverseEndpoints { arrow: usize, inverse: usize },
    LeftUnit { arrow: usize },
    RightUnit { arrow: usize },
    LeftInverse { arrow: usize },
    RightInverse { arrow: usize },
    Associativity { h: usize, g: usize, f: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IdentityEndpoints { object, arrow } => {
                write!(f, "identity {arrow} of object {object} is not an endo-arrow")
            }
            Violation::CompositeEndpoints { g, f: ff, composite } => write!(
                f,
                "composite {g}∘{ff} = {composite} has the wrong source or target"
            ),
            Violation::InverseEndpoints { arrow, inverse } => {
                write!(f, "inverse {inverse} of {arrow} has the wrong endpoints")
            }
            Violation::LeftUnit { arrow } => write!(f, "id∘{arrow} ≠ {arrow}"),
            Violation::RightUnit { arrow } => write!(f, "{arrow}∘id ≠ {arrow}"),
            Violation::LeftInverse { arrow } => write!(f, "inv({arrow})∘{arrow} ≠ id"),
            Violation::RightInverse { arrow } => write!(f, "{arrow}∘inv({arrow}) ≠ id"),
            Violation::Associativity { h, g, f: ff } => {
                write!(f, "({h}∘{g})∘{ff} ≠ {h}∘({g}∘{ff})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FinGroupoid {
    /// Builds a groupoid from raw tables, checking only that they are
    /// syntactically complete. Law checking is [`FinGroupoid::validate`].
    ///
    /// `compose` lists `(g, f, g∘f)` for every pair with `src g = dst f`.
    pub fn from_parts(
        objects: usize,
        arrows: &[(usize, usize)],
        compose: &[(usize, usize, usize)],
        identity: &[usize],
        inverse: &[usize],
    ) -> Result<Self> {
        let n = arrows.len();
        if n >= NONE as usize || objects >= NONE as usize {
            return Err(Error::schema("", "groupoid too large"));
        }
        for (i, &(s, d)) in arrows.iter().enumerate() {
            if s >= objects {
                return Err(Error::schema(
                    format!("/arrows/{i}/src"),
                    format!("object index {s} out of range"),
                ));
            }
            if d >= objects {
                return Err(Error::schema(
                    format!("/arrows/{i}/dst"),
                    format!("object index {d} out of range"),
                ));
            }
        }
        if identity.len() != objects {
            return Err(Error::schema(
                "/identity",
                format!("expected {objects} entries, found {}", identity.len()),
            ));
        }
        if let Some(i) = identity.iter().position(|&a| a >= n) {
            return Err(Error::schema(
                format!("/identity/{i}"),
                format!("arrow index {} out of range", identity[i]),
            ));
        }
        if inverse.len() != n {
            return Err(Error::schema(
                "/inverse",
                format!("expected {n} entries, found {}", inverse.len()),
            ));
        }
        if let Some(i) = inverse.iter().position(|&a| a >= n) {
            return Err(Error::schema(
                format!("/inverse/{i}"),
                format!("arrow index {} out of range", inverse[i]),
            ));
        }
        let src: Vec<u32> = arrows.iter().map(|&(s, _)| s as u32).collect();
        let dst: Vec<u32> = arrows.iter().map(|&(_, d)| d as u32).collect();
        let (row_start, in_pos, total) = layout(objects, &src, &dst);
        let mut table = vec![NONE; total];
        for (i, &(g, f, h)) in compose.iter().enumerate() {
            for (k, &a) in [g, f, h].iter().enumerate() {
                if a >= n {
                    return Err(Error::schema(
                        format!("/compose/{i}/{k}"),
                        format!("arrow index {a} out of range"),
                    ));
                }
            }
            if src[g] != dst[f] {
                return Err(Error::schema(
                    format!("/compose/{i}"),
                    format!("arrows {g} and {f} are not composable"),
                ));
            }
            let slot = row_start[g] as usize + in_pos[f] as usize;
            if table[slot] != NONE {
                return Err(Error::schema(
                    format!("/compose/{i}"),
                    format!("duplicate entry for {g}∘{f}"),
                ));
            }
            table[slot] = h as u32;
        }
        if table.iter().any(|&h| h == NONE) {
            // report the first missing pair
            for g in 0..n {
                for f in 0..n {
                    if src[g] == dst[f]
                        && table[row_start[g] as usize + in_pos[f] as usize] == NONE
                    {
                        return Err(Error::schema(
                            "/compose",
                            format!("missing entry for composable pair {g}∘{f}"),
                        ));
                    }
                }
            }
        }
        Ok(Self::from_tables(Tables {
            objects,
            src,
            dst,
            identity: identity.iter().map(|&a| a as u32).collect(),
            inverse: inverse.iter().map(|&a| a as u32).collect(),
            row_start,
            in_pos,
            compose: table,
        }))
    }

    fn from_tables(t: Tables) -> Self {
        let mut homs = vec![Vec::new(); t.objects * t.objects];
        for a in 0..t.src.len() {
            homs[t.src[a] as usize * t.objects + t.dst[a] as usize].push(a);
        }
        FinGroupoid {
            t: Arc::new(t),
            homs: Arc::new(homs),
        }
    }

    pub fn object_count(&self) -> usize {
        self.t.objects
    }

    pub fn arrow_count(&self) -> usize {
        self.t.src.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.t.objects
    }

    pub fn arrows(&self) -> std::ops::Range<usize> {
        0..self.t.src.len()
    }

    pub fn src(&self, a: usize) -> usize {
        self.t.src[a] as usize
    }

    pub fn dst(&self, a: usize) -> usize {
        self.t.dst[a] as usize
    }

    pub fn identity(&self, x: usize) -> usize {
        self.t.identity[x] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.t.inverse[a] as usize
    }

    /// `g ∘ f`, or `None` when `src g ≠ dst f`.
    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.t.src[g] != self.t.dst[f] {
            return None;
        }
        Some(self.t.compose[self.t.row_start[g] as usize + self.t.in_pos[f] as usize] as usize)
    }

    /// `g ∘ f`. Panics when the arrows are not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("arrows {g} and {f} are not composable"))
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        &self.homs[x * self.t.objects + y]
    }

    pub fn is_discrete(&self) -> bool {
        self.arrow_count() == self.object_count()
    }

    /// Every `(g, f, g∘f)` triple, ordered by `(g, f)`.
    pub fn composition_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.t.compose.len());
        for g in self.arrows() {
            let y = self.src(g);
            for x in self.objects() {
                for &f in self.hom(x, y) {
                    out.push((g, f, self.compose(g, f)));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks every groupoid law exhaustively.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for x in self.objects() {
            let i = self.identity(x);
            if self.src(i) != x || self.dst(i) != x {
                v.push(Violation::IdentityEndpoints { object: x, arrow: i });
            }
        }
        for (g, f, h) in self.composition_triples() {
            if self.src(h) != self.src(f) || self.dst(h) != self.dst(g) {
                v.push(Violation::CompositeEndpoints { g, f, composite: h });
            }
        }
        if !v.is_empty() {
            // the unit checks below compose with identities
            return ValidationReport { violations: v };
        }
        for a in self.arrows() {
            let (x, y) = (self.src(a), self.dst(a));
            let inv = self.inverse(a);
            if self.src(inv) != y || self.dst(inv) != x {
                v.push(Violation::InverseEndpoints { arrow: a, inverse: inv });
                continue;
            }
            if self.compose(self.identity(y), a) != a {
                v.push(Violation::LeftUnit { arrow: a });
            }
            if self.compose(a, self.identity(x)) != a {
                v.push(Violation::RightUnit { arrow: a });
            }
            if self.compose(inv, a) != self.identity(x) {
                v.push(Violation::LeftInverse { arrow: a });
            }
            if self.compose(a, inv) != self.identity(y) {
                v.push(Violation::RightInverse { arrow: a });
            }
        }
        if v.is_empty() {
            // Endpoints are consistent, so composites below are defined.
            for f in self.arrows() {
                for z in self.objects() {
                    for &g in self.hom(self.dst(f), z) {
                        let gf = self.compose(g, f);
                        for w in self.objects() {
                            for &h in self.hom(z, w) {
                                if self.compose(self.compose(h, g), f) != self.compose(h, gf) {
                                    v.push(Violation::Associativity { h, g, f });
                                }
                            }
                        }
                    }
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// The discrete groupoid on `n` objects.
    pub fn discrete(n: usize) -> Self {
        let mut b = Builder::new(n);
        for x in 0..n {
            b.arrow(x, x, x);
        }
        b.finish(|g, _| *g, |x| x, |a| *a).groupoid
    }

    /// The terminal groupoid 𝟙.
    pub fn unit() -> Self {
        Self::discrete(1)
    }

    /// The empty groupoid.
    pub fn empty() -> Self {
        Self::discrete(0)
    }

    /// The cyclic group of order `n` as a one-object groupoid.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let mut b = Builder::new(1);
        for k in 0..n {
            b.arrow(k, 0, 0);
        }
        b.finish(|g, f| (g + f) % n, |_| 0, |a| (n - a) % n).groupoid
    }

    /// The indiscrete (codiscrete) groupoid: exactly one arrow between any two objects.
    pub fn indiscrete(n: usize) -> Self {
        let mut b = Builder::new(n);
        for x in 0..n {
            for y in 0..n {
                b.arrow((x, y), x, y);
            }
        }
        b.finish(|&(_, z), &(x, _)| (x, z), |x| (x, x), |&(x, y)| (y, x))
            .groupoid
    }

    /// Disjoint union of one-object groups, one per entry of `orders`.
    pub fn cyclic_blocks(orders: &[usize]) -> Self {
        let mut b = Builder::new(orders.len());
        for (x, &n) in orders.iter().enumerate() {
            for k in 0..n {
                b.arrow((x, k), x, x);
            }
        }
        b.finish(
            |&(x, g), &(_, f)| (x, (g + f) % orders[x]),
            |x| (x, 0),
            |&(x, a)| (x, (orders[x] - a) % orders[x]),
        )
        .groupoid
    }

    /// The full subgroupoid on the listed objects (in the given order).
    pub fn full_subgroupoid(&self, objects: &[usize]) -> Keyed<usize> {
        let mut b = Builder::new(objects.len());
        for (i, &x) in objects.iter().enumerate() {
            for (j, &y) in objects.iter().enumerate() {
                for &a in self.hom(x, y) {
                    b.arrow(a, i, j);
                }
            }
        }
        b.finish(
            |&g, &f| self.compose(g, f),
            |i| self.identity(objects[i]),
            |&a| self.inverse(a),
        )
    }

    /// The connected components' structure: per object, its class
    /// representative (least object index in the class) and a chosen
    /// arrow `rep → object`.
    pub fn connecting_arrows(&self) -> Vec<(usize, usize)> {
        let n = self.object_count();
        let mut out: Vec<Option<(usize, usize)>> = vec![None; n];
        for r in 0..n {
            if out[r].is_some() {
                continue;
            }
            for y in r..n {
                if out[y].is_none() {
                    if let Some(&a) = self.hom(r, y).first() {
                        out[y] = Some((r, a));
                    }
                }
            }
        }
        out.into_iter().map(|o| o.expect("every object reaches itself")).collect()
    }

    /// Least object index of every isomorphism class, in increasing order.
    pub fn class_representatives(&self) -> Vec<usize> {
        self.connecting_arrows()
            .iter()
            .enumerate()
            .filter(|(x, (r, _))| x == r)
            .map(|(x, _)| x)
            .collect()
    }
}

fn layout(objects: usize, src: &[u32], dst: &[u32]) -> (Vec<u32>, Vec<u32>, usize) {
    let mut in_count = vec![0u32; objects];
    let mut in_pos = vec![0u32; src.len()];
    for (a, &d) in dst.iter().enumerate() {
        in_pos[a] = in_count[d as usize];
        in_count[d as usize] += 1;
    }
    let mut row_start = Vec::with_capacity(src.len());
    let mut total = 0usize;
    for &s in src {
        row_start.push(total as u32);
        total += in_count[s as usize] as usize;
    }
    assert!(total < NONE as usize, "composition table too large");
    (row_start, in_pos, total)
}

/// A groupoid built from structured arrow keys, keeping the keys.
#[derive(Clone, Debug)]
pub struct Keyed<K> {
    pub groupoid: FinGroupoid,
    pub keys: Vec<K>,
    pub index: FxHashMap<K, usize>,
}

/// Assembles a groupoid whose arrows are identified by keys `K`, with the
/// algebra supplied on keys. Used by every construction in the crate.
pub struct Builder<K> {
    objects: usize,
    keys: Vec<K>,
    ends: Vec<(usize, usize)>,
    index: FxHashMap<K, usize>,
}

impl<K: Clone + Eq + Hash + fmt::Debug> Builder<K> {
    pub fn new(objects: usize) -> Self {
        Builder {
            objects,
            keys: Vec::new(),
            ends: Vec::new(),
            index: FxHashMap::default(),
        }
    }

    /// Adds an arrow; a key added twice keeps its first id.
    pub fn arrow(&mut self, key: K, src: usize, dst: usize) -> usize {
        if let Some(&i) = self.index.get(&key) {
            debug_assert_eq!(self.ends[i], (src, dst), "arrow key {key:?} reused");
            return i;
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.keys.push(key);
        self.ends.push((src, dst));
        i
    }

    /// Panics if the supplied algebra leaves the key set: that is a bug in
    /// the construction, never a property of the input.
    pub fn finish(
        self,
        mul: impl Fn(&K, &K) -> K,
        unit: impl Fn(usize) -> K,
        inv: impl Fn(&K) -> K,
    ) -> Keyed<K> {
        self.finish_by(mul, unit, inv, |index, k| {
            *index
                .get(k)
                .unwrap_or_else(|| panic!("construction produced unknown arrow {k:?}"))
        })
    }

    /// As [`Builder::finish`], with a caller-supplied key lookup for
    /// constructions whose arrow ids have a closed form.
    pub fn finish_by(
        self,
        mul: impl Fn(&K, &K) -> K,
        unit: impl Fn(usize) -> K,
        inv: impl Fn(&K) -> K,
        find: impl Fn(&FxHashMap<K, usize>, &K) -> usize,
    ) -> Keyed<K> {
        let Builder {
            objects,
            keys,
            ends,
            index,
        } = self;
        let look = |k: &K| -> u32 { find(&index, k) as u32 };
        let src: Vec<u32> = ends.iter().map(|e| e.0 as u32).collect();
        let dst: Vec<u32> = ends.iter().map(|e| e.1 as u32).collect();
        let (row_start, in_pos, total) = layout(objects, &src, &dst);
        let mut by_dst: Vec<Vec<usize>> = vec![Vec::new(); objects];
        for (a, &d) in dst.iter().enumerate() {
            by_dst[d as usize].push(a);
        }
        let mut compose = vec![NONE; total];
        for g in 0..keys.len() {
            let row = row_start[g] as usize;
            for &f in &by_dst[src[g] as usize] {
                compose[row + in_pos[f] as usize] = look(&mul(&keys[g], &keys[f]));
            }
        }
        let identity = (0..objects).map(|x| look(&unit(x))).collect();
        let inverse = keys.iter().map(|k| look(&inv(k))).collect();
        let groupoid = FinGroupoid::from_tables(Tables {
            objects,
            src,
            dst,
            identity,
            inverse,
            row_start,
            in_pos,
            compose,
        });
        Keyed {
            groupoid,
            keys,
            index,
        }
    }
}

/// A functor between finite groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFunctor {
    pub domain: FinGroupoid,
    pub codomain: FinGroupoid,
    pub obj: Vec<usize>,
    pub arr: Vec<usize>,
}

impl GFunctor {
    /// Checks lengths and index ranges; the functor laws are [`GFunctor::check`].
    pub fn new(
        domain: FinGroupoid,
        codomain: FinGroupoid,
        obj: Vec<usize>,
        arr: Vec<usize>,
    ) -> Result<Self> {
        if obj.len() != domain.object_count() {
            return Err(Error::schema(
                "/obj",
                format!("expected {} entries, found {}", domain.object_count(), obj.len()),
            ));
        }
        if arr.len() != domain.arrow_count() {
            return Err(Error::schema(
                "/arr",
                format!("expected {} entries, found {}", domain.arrow_count(), arr.len()),
            ));
        }
        if let Some(i) = obj.iter().position(|&x| x >= codomain.object_count()) {
            return Err(Error::schema(
                format!("/obj/{i}"),
                format!("object index {} out of range", obj[i]),
            ));
        }
        if let Some(i) = arr.iter().position(|&a| a >= codomain.arrow_count()) {
            return Err(Error::schema(
                format!("/arr/{i}"),
                format!("arrow index {} out of range", arr[i]),
            ));
        }
        Ok(GFunctor {
            domain,
            codomain,
            obj,
            arr,
        })
    }

    pub fn identity(g: &FinGroupoid) -> Self {
        GFunctor {
            domain: g.clone(),
            codomain: g.clone(),
            obj: g.objects().collect(),
            arr: g.arrows().collect(),
        }
    }

    /// The functor `𝟙 → g` picking object `x`.
    pub fn point(g: &FinGroupoid, x: usize) -> Self {
        GFunctor {
            domain: FinGroupoid::unit(),
            codomain: g.clone(),
            obj: vec![x],
            arr: vec![g.identity(x)],
        }
    }

    /// The unique functor into 𝟙.
    pub fn to_unit(g: &FinGroupoid) -> Self {
        GFunctor {
            domain: g.clone(),
            codomain: FinGroupoid::unit(),
            obj: vec![0; g.object_count()],
            arr: vec![0; g.arrow_count()],
        }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &GFunctor) -> GFunctor {
        assert_eq!(f.codomain, self.domain, "functors are not composable");
        GFunctor {
            domain: f.domain.clone(),
            codomain: self.codomain.clone(),
            obj: f.obj.iter().map(|&x| self.obj[x]).collect(),
            arr: f.arr.iter().map(|&a| self.arr[a]).collect(),
        }
    }

    /// Lists every violated functor law.
    pub fn check(&self) -> Vec<String> {
        let (d, c) = (&self.domain, &self.codomain);
        let mut v = Vec::new();
        for a in d.arrows() {
            let fa = self.arr[a];
            if c.src(fa) != self.obj[d.src(a)] || c.dst(fa) != self.obj[d.dst(a)] {
                v.push(format!("arrow {a} is mapped to {fa} with wrong endpoints"));
            }
        }
        if !v.is_empty() {
            return v;
        }
        for x in d.objects() {
            if self.arr[d.identity(x)] != c.identity(self.obj[x]) {
                v.push(format!("identity of {x} not preserved"));
            }
        }
        for (g, f, h) in d.composition_triples() {
            if c.compose(self.arr[g], self.arr[f]) != self.arr[h] {
                v.push(format!("composite {g}∘{f} not preserved"));
            }
        }
        v
    }
}

/// A natural isomorphism `source ⇒ target`; `components[x] : source(x) → target(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatIso {
    pub source: GFunctor,
    pub target: GFunctor,
    pub components: Vec<usize>,
}

impl NatIso {
    pub fn identity(f: &GFunctor) -> Self {
        NatIso {
            source: f.clone(),
            target: f.clone(),
            components: f.obj.iter().map(|&y| f.codomain.identity(y)).collect(),
        }
    }

    pub fn check(&self) -> Vec<String> {
        let c = &self.source.codomain;
        let d = &self.source.domain;
        let mut v = Vec::new();
        for x in d.objects() {
            let k = self.components[x];
            if c.src(k) != self.source.obj[x] || c.dst(k) != self.target.obj[x] {
                v.push(format!("component at {x} has wrong endpoints"));
            }
        }
        if !v.is_empty() {
            return v;
        }
        for a in d.arrows() {
            let lhs = c.compose(self.target.arr[a], self.components[d.src(a)]);
            let rhs = c.compose(self.components[d.dst(a)], self.source.arr[a]);
            if lhs != rhs {
                v.push(format!("naturality square at arrow {a} does not commute"));
            }
        }
        v
    }
}

/// `a × b` with its projections. Object `(i, j)` has index `i·|b| + j`.
#[derive(Clone, Debug)]
pub struct Product {
    pub groupoid: FinGroupoid,
    pub proj1: GFunctor,
    pub proj2: GFunctor,
    pub keys: Vec<(usize, usize)>,
}

impl Product {
    pub fn object(&self, i: usize, j: usize) -> usize {
        i * self.proj2.codomain.object_count() + j
    }

    /// The arrow with components `(u, v)`.
    pub fn arrow(&self, u: usize, v: usize) -> usize {
        // Arrows are generated in (u, v) lexicographic order.
        u * self.proj2.codomain.arrow_count() + v
    }

    /// The pairing `⟨f, g⟩ : X → a × b`.
    pub fn pair(&self, f: &GFunctor, g: &GFunctor) -> GFunctor {
        assert_eq!(f.domain, g.domain);
        GFunctor {
            domain: f.domain.clone(),
            codomain: self.groupoid.clone(),
            obj: f.obj.iter().zip(&g.obj).map(|(&i, &j)| self.object(i, j)).collect(),
            arr: f.arr.iter().zip(&g.arr).map(|(&u, &v)| self.arrow(u, v)).collect(),
        }
    }
}

pub fn product(a: &FinGroupoid, b: &FinGroupoid) -> Product {
    let nb = b.object_count();
    let mut bld = Builder::new(a.object_count() * nb);
    for u in a.arrows() {
        for v in b.arrows() {
            bld.arrow(
                (u, v),
                a.src(u) * nb + b.src(v),
                a.dst(u) * nb + b.dst(v),
            );
        }
    }
    let k = bld.finish(
        |&(g1, g2), &(f1, f2)| (a.compose(g1, f1), b.compose(g2, f2)),
        |x| (a.identity(x / nb), b.identity(x % nb)),
        |&(u, v)| (a.inverse(u), b.inverse(v)),
    );
    let g = k.groupoid;
    let proj1 = GFunctor {
        domain: g.clone(),
        codomain: a.clone(),
        obj: g.objects().map(|x| x / nb).collect(),
        arr: k.keys.iter().map(|k| k.0).collect(),
    };
    let proj2 = GFunctor {
        domain: g.clone(),
        codomain: b.clone(),
        obj: g.objects().map(|x| x % nb).collect(),
        arr: k.keys.iter().map(|k| k.1).collect(),
    };
    Product {
        groupoid: g,
        proj1,
        proj2,
        keys: k.keys,
    }
}

/// `a ⊎ b` with its injections: objects and arrows of `a` first.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub groupoid: FinGroupoid,
    pub inj1: GFunctor,
    pub inj2: GFunctor,
}

impl Coproduct {
    /// The copairing `[f, g] : a ⊎ b → Y`.
    pub fn copair(&self, f: &GFunctor, g: &GFunctor) -> GFunctor {
        assert_eq!(f.codomain, g.codomain);
        GFunctor {
            domain: self.groupoid.clone(),
            codomain: f.codomain.clone(),
            obj: f.obj.iter().chain(&g.obj).copied().collect(),
            arr: f.arr.iter().chain(&g.arr).copied().collect(),
        }
    }
}

pub fn coproduct(a: &FinGroupoid, b: &FinGroupoid) -> Coproduct {
    let (na, ma) = (a.object_count(), a.arrow_count());
    let mut bld = Builder::new(na + b.object_count());
    for u in a.arrows() {
        bld.arrow(u, a.src(u), a.dst(u));
    }
    for v in b.arrows() {
        bld.arrow(ma + v, na + b.src(v), na + b.dst(v));
    }
    let k = bld.finish(
        |&g, &f| {
            if g < ma {
                a.compose(g, f)
            } else {
                ma + b.compose(g - ma, f - ma)
            }
        },
        |x| {
            if x < na {
                a.identity(x)
            } else {
                ma + b.identity(x - na)
            }
        },
        |&u| if u < ma { a.inverse(u) } else { ma + b.inverse(u - ma) },
    );
    let g = k.groupoid;
    Coproduct {
        inj1: GFunctor {
            domain: a.clone(),
            codomain: g.clone(),
            obj: a.objects().collect(),
            arr: a.arrows().collect(),
        },
        inj2: GFunctor {
            domain: b.clone(),
            codomain: g.clone(),
            obj: b.objects().map(|x| na + x).collect(),
            arr: b.arrows().map(|v| ma + v).collect(),
        },
        groupoid: g,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bz2_broken() -> FinGroupoid {
        // σ∘σ = σ
        FinGroupoid::from_parts(
            1,
            &[(0, 0), (0, 0)],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
            &[0],
            &[0, 1],
        )
        .unwrap()
    }

    #[test]
    fn basic_groupoids_are_valid() {
        for g in [
            FinGroupoid::discrete(2),
            FinGroupoid::cyclic(2),
            FinGroupoid::cyclic(4),
            FinGroupoid::indiscrete(3),
            FinGroupoid::empty(),
            FinGroupoid::cyclic_blocks(&[1, 3, 2]),
        ] {
            assert!(g.validate().is_valid(), "{g:?}");
        }
    }

    #[test]
    fn broken_bz2_reports_inverse_failure() {
        let r = bz2_broken().validate();
        assert!(!r.is_valid());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::LeftInverse { arrow: 1 } | Violation::RightInverse { arrow: 1 })));
    }

    #[test]
    fn dangling_index_is_schema_error() {
        let e = FinGroupoid::from_parts(1, &[(0, 3)], &[(0, 0, 0)], &[0], &[0]).unwrap_err();
        match e {
            Error::Schema { pointer, message } => {
                assert_eq!(pointer, "/arrows/0/dst");
                assert!(message.contains('3'));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_composite_is_schema_error() {
        let e = FinGroupoid::from_parts(1, &[(0, 0), (0, 0)], &[(0, 0, 0)], &[0], &[0, 1])
            .unwrap_err();
        assert!(matches!(e, Error::Schema { .. }));
    }

    #[test]
    fn products_and_coproducts() {
        let p = product(&FinGroupoid::discrete(2), &FinGroupoid::discrete(3));
        assert_eq!(p.groupoid, FinGroupoid::discrete(6));
        assert!(p.proj1.check().is_empty() && p.proj2.check().is_empty());

        // BZ2 × BZ2: one object, four automorphisms, every element squares to e.
        let k = product(&FinGroupoid::cyclic(2), &FinGroupoid::cyclic(2)).groupoid;
        assert_eq!((k.object_count(), k.arrow_count()), (1, 4));
        let e = k.identity(0);
        for a in k.arrows() {
            assert_eq!(k.compose(a, a), e);
            for b in k.arrows() {
                assert_eq!(k.compose(a, b), k.compose(b, a));
            }
        }

        let c = coproduct(&FinGroupoid::discrete(2), &FinGroupoid::discrete(3));
        assert_eq!(c.groupoid, FinGroupoid::discrete(5));
        let c = coproduct(&FinGroupoid::cyclic(2), &FinGroupoid::empty());
        assert_eq!(c.groupoid, FinGroupoid::cyclic(2));
    }

    #[test]
    fn pairing_commutes_with_projections() {
        let a = FinGroupoid::cyclic(2);
        let b = FinGroupoid::cyclic(3);
        let p = product(&a, &b);
        let x = FinGroupoid::cyclic(6);
        // Z6 → Z2, Z6 → Z3 reductions
        let f = GFunctor::new(x.clone(), a.clone(), vec![0], (0..6).map(|k| k % 2).collect()).unwrap();
        let g = GFunctor::new(x.clone(), b.clone(), vec![0], (0..6).map(|k| k % 3).collect()).unwrap();
        assert!(f.check().is_empty() && g.check().is_empty());
        let h = p.pair(&f, &g);
        assert!(h.check().is_empty());
        assert_eq!(p.proj1.after(&h), f);
        assert_eq!(p.proj2.after(&h), g);
    }

    #[test]
    fn identities_between_objects_are_reported_not_composed() {
        let g = FinGroupoid::from_parts(
            2,
            &[(0, 0), (0, 1), (1, 0), (1, 1)],
            &[
                (0, 0, 0),
                (0, 2, 2),
                (1, 0, 1),
                (1, 2, 3),
                (2, 1, 0),
                (2, 3, 2),
                (3, 1, 1),
                (3, 3, 3),
            ],
            &[1, 3],
            &[0, 2, 1, 3],
        )
        .unwrap();
        let report = g.validate();
        assert!(report
            .violations
            .contains(&Violation::IdentityEndpoints { object: 0, arrow: 1 }));
    }
}
