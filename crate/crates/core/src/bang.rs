//! Bags: finite sets colored by objects of a groupoid, and the monad and
//! Seely structure on them.
//!
//! Objects and arrows are nested terms. A leaf is an object or arrow of the
//! base groupoid; a bag of depth `d` is colored by terms of depth `d - 1`.

use std::collections::HashMap;
use std::fmt;

use crate::effective::{materialize, Effective, Mapping, Materialized, Pair};
use crate::equiv::Budget;
use crate::error::{Error, Result};
use crate::gpd::{Coproduct, FinGroupoid, GFunctor};
use crate::span::Span;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Obj {
    Base(usize),
    Bag(Bag),
}

/// A carrier `{0, …, n-1}` with a color for each element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bag {
    pub colors: Vec<Obj>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Mor {
    Base(usize),
    Bag(BagMorphism),
}

/// A bijection of carriers with, for each `i`, an arrow
/// `colors[i] → colors'[sigma[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BagMorphism {
    pub sigma: Vec<usize>,
    pub components: Vec<Mor>,
}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::Base(x) => write!(f, "{x}"),
            Obj::Bag(b) => f.debug_list().entries(&b.colors).finish(),
        }
    }
}

impl fmt::Debug for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mor::Base(u) => write!(f, "{u}"),
            Mor::Bag(m) => write!(f, "({:?}, {:?})", m.sigma, m.components),
        }
    }
}

impl Obj {
    pub fn bag(colors: Vec<Obj>) -> Obj {
        Obj::Bag(Bag { colors })
    }

    /// A bag of base objects.
    pub fn leaves(colors: &[usize]) -> Obj {
        Obj::bag(colors.iter().map(|&x| Obj::Base(x)).collect())
    }

    pub fn as_bag(&self) -> Option<&Bag> {
        match self {
            Obj::Bag(b) => Some(b),
            Obj::Base(_) => None,
        }
    }

    pub fn as_base(&self) -> Option<usize> {
        match self {
            Obj::Base(x) => Some(*x),
            Obj::Bag(_) => None,
        }
    }

    /// Nesting depth, or `None` if the bag mixes depths. The empty bag fits
    /// every positive depth and reports 1.
    pub fn depth(&self) -> Option<usize> {
        match self {
            Obj::Base(_) => Some(0),
            Obj::Bag(b) => {
                let mut d = None;
                for c in &b.colors {
                    let e = c.depth()?;
                    if d.is_some_and(|d| d != e) {
                        return None;
                    }
                    d = Some(e);
                }
                Some(d.map_or(1, |d| d + 1))
            }
        }
    }

    /// Whether this is a term of exactly depth `depth` over a base with
    /// `n` objects.
    pub fn fits(&self, depth: usize, n: usize) -> bool {
        match (self, depth) {
            (Obj::Base(x), 0) => *x < n,
            (Obj::Bag(b), d) if d > 0 => b.colors.iter().all(|c| c.fits(d - 1, n)),
            _ => false,
        }
    }
}

impl Mor {
    pub fn as_bag(&self) -> Option<&BagMorphism> {
        match self {
            Mor::Bag(m) => Some(m),
            Mor::Base(_) => None,
        }
    }

    pub fn as_base(&self) -> Option<usize> {
        match self {
            Mor::Base(u) => Some(*u),
            Mor::Bag(_) => None,
        }
    }
}

/// The three kinds of span endpoint: a groupoid `A`, `!A` and `!!A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Gpd,
    Bang,
    BangBang,
}

impl Kind {
    pub fn depth(self) -> usize {
        match self {
            Kind::Gpd => 0,
            Kind::Bang => 1,
            Kind::BangBang => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Gpd => "gpd",
            Kind::Bang => "bang",
            Kind::BangBang => "bangbang",
        }
    }
}

/// An endpoint descriptor: `A`, `!A` or `!!A` for a finite `A`, queried
/// through [`Effective`] without enumerating its objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub kind: Kind,
    pub base: FinGroupoid,
}

impl Endpoint {
    pub fn gpd(base: &FinGroupoid) -> Self {
        Endpoint {
            kind: Kind::Gpd,
            base: base.clone(),
        }
    }

    pub fn bang(base: &FinGroupoid) -> Self {
        Endpoint {
            kind: Kind::Bang,
            base: base.clone(),
        }
    }

    pub fn bangbang(base: &FinGroupoid) -> Self {
        Endpoint {
            kind: Kind::BangBang,
            base: base.clone(),
        }
    }

    pub fn is_concrete(&self) -> bool {
        self.kind == Kind::Gpd
    }

    pub fn contains(&self, x: &Obj) -> bool {
        x.fits(self.kind.depth(), self.base.object_count())
    }

    /// Whether `m` is a well-formed arrow of this endpoint.
    pub fn contains_mor(&self, m: &Mor) -> bool {
        fn ok(base: &FinGroupoid, d: usize, m: &Mor) -> bool {
            match (m, d) {
                (Mor::Base(u), 0) => *u < base.arrow_count(),
                (Mor::Bag(b), d) if d > 0 => {
                    let n = b.sigma.len();
                    let mut seen = vec![false; n];
                    b.components.len() == n
                        && b.sigma.iter().all(|&j| j < n && !std::mem::replace(&mut seen[j], true))
                        && b.components.iter().all(|c| ok(base, d - 1, c))
                }
                _ => false,
            }
        }
        ok(&self.base, self.kind.depth(), m)
    }
}

fn base_src(base: &FinGroupoid, m: &Mor) -> Obj {
    match m {
        Mor::Base(u) => Obj::Base(base.src(*u)),
        Mor::Bag(b) => Obj::bag(b.components.iter().map(|c| base_src(base, c)).collect()),
    }
}

fn base_dst(base: &FinGroupoid, m: &Mor) -> Obj {
    match m {
        Mor::Base(u) => Obj::Base(base.dst(*u)),
        Mor::Bag(b) => {
            let mut colors = vec![None; b.sigma.len()];
            for (i, &j) in b.sigma.iter().enumerate() {
                colors[j] = Some(base_dst(base, &b.components[i]));
            }
            Obj::bag(colors.into_iter().map(|c| c.expect("sigma is a bijection")).collect())
        }
    }
}

fn is_iso_terms(base: &FinGroupoid, x: &Obj, y: &Obj) -> bool {
    match (x, y) {
        (Obj::Base(a), Obj::Base(b)) => !base.hom(*a, *b).is_empty(),
        (Obj::Bag(p), Obj::Bag(q)) => {
            if p.colors.len() != q.colors.len() {
                return false;
            }
            // greedy matching is enough: isomorphism is an equivalence relation
            let mut used = vec![false; q.colors.len()];
            p.colors.iter().all(|c| {
                if let Some(j) = (0..q.colors.len())
                    .find(|&j| !used[j] && is_iso_terms(base, c, &q.colors[j]))
                {
                    used[j] = true;
                    true
                } else {
                    false
                }
            })
        }
        _ => false,
    }
}

impl Effective for Endpoint {
    type Obj = Obj;
    type Mor = Mor;

    fn homs(&self, x: &Obj, y: &Obj) -> Vec<Mor> {
        match (x, y) {
            (Obj::Base(a), Obj::Base(b)) => self.base.hom(*a, *b).iter().map(|&u| Mor::Base(u)).collect(),
            (Obj::Bag(p), Obj::Bag(q)) => {
                let n = p.colors.len();
                if n != q.colors.len() {
                    return Vec::new();
                }
                let table: Vec<Vec<Vec<Mor>>> = p
                    .colors
                    .iter()
                    .map(|c| q.colors.iter().map(|d| self.homs(c, d)).collect())
                    .collect();
                let mut out = Vec::new();
                let mut sigma = vec![0; n];
                let mut comps: Vec<Mor> = Vec::with_capacity(n);
                let mut used = vec![false; n];
                enumerate_bag_homs(&table, 0, &mut sigma, &mut comps, &mut used, &mut out);
                out
            }
            _ => Vec::new(),
        }
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Mor {
        match (g, f) {
            (Mor::Base(v), Mor::Base(u)) => Mor::Base(self.base.compose(*v, *u)),
            (Mor::Bag(g), Mor::Bag(f)) => Mor::Bag(BagMorphism {
                sigma: f.sigma.iter().map(|&j| g.sigma[j]).collect(),
                components: f
                    .components
                    .iter()
                    .zip(&f.sigma)
                    .map(|(c, &j)| self.compose(&g.components[j], c))
                    .collect(),
            }),
            _ => panic!("composing arrows of different depths"),
        }
    }

    fn identity(&self, x: &Obj) -> Mor {
        match x {
            Obj::Base(a) => Mor::Base(self.base.identity(*a)),
            Obj::Bag(b) => Mor::Bag(BagMorphism {
                sigma: (0..b.colors.len()).collect(),
                components: b.colors.iter().map(|c| self.identity(c)).collect(),
            }),
        }
    }

    fn inverse(&self, f: &Mor) -> Mor {
        match f {
            Mor::Base(u) => Mor::Base(self.base.inverse(*u)),
            Mor::Bag(b) => {
                let n = b.sigma.len();
                let mut sigma = vec![0; n];
                let mut components = vec![None; n];
                for (i, &j) in b.sigma.iter().enumerate() {
                    sigma[j] = i;
                    components[j] = Some(self.inverse(&b.components[i]));
                }
                Mor::Bag(BagMorphism {
                    sigma,
                    components: components.into_iter().map(Option::unwrap).collect(),
                })
            }
        }
    }

    fn src(&self, f: &Mor) -> Obj {
        base_src(&self.base, f)
    }

    fn dst(&self, f: &Mor) -> Obj {
        base_dst(&self.base, f)
    }

    fn is_iso(&self, x: &Obj, y: &Obj) -> bool {
        is_iso_terms(&self.base, x, y)
    }

    /// Solves `θ ∘ a[k] = b[k] ∘ θ` orbit by orbit: fixing `θ` on one element
    /// of a carrier determines it on the element's whole orbit.
    fn intertwiner(
        &self,
        x: &Obj,
        y: &Obj,
        a: &[Mor],
        b: &[Mor],
        budget: &mut Budget,
    ) -> Result<Option<Mor>> {
        let (Obj::Bag(p), Obj::Bag(q)) = (x, y) else {
            for theta in self.homs(x, y) {
                budget.spend(1)?;
                if a.iter().zip(b).all(|(ak, bk)| {
                    self.compose(&theta, ak) == self.compose(bk, &theta)
                }) {
                    return Ok(Some(theta));
                }
            }
            return Ok(None);
        };
        let n = p.colors.len();
        if n != q.colors.len() {
            return Ok(None);
        }
        let a: Vec<&BagMorphism> = a.iter().map(|m| m.as_bag().expect("bag automorphism")).collect();
        let b: Vec<&BagMorphism> = b.iter().map(|m| m.as_bag().expect("bag automorphism")).collect();
        let a_inv: Vec<Vec<Mor>> = a
            .iter()
            .map(|m| m.components.iter().map(|c| self.inverse(c)).collect())
            .collect();
        let mut st = Orbits {
            ep: self,
            p,
            q,
            a: &a,
            a_inv: &a_inv,
            b: &b,
            sigma: vec![None; n],
            comps: vec![None; n],
            used: vec![false; n],
        };
        if st.solve(budget)? {
            Ok(Some(Mor::Bag(BagMorphism {
                sigma: st.sigma.into_iter().map(Option::unwrap).collect(),
                components: st.comps.into_iter().map(Option::unwrap).collect(),
            })))
        } else {
            Ok(None)
        }
    }
}

fn enumerate_bag_homs(
    table: &[Vec<Vec<Mor>>],
    i: usize,
    sigma: &mut Vec<usize>,
    comps: &mut Vec<Mor>,
    used: &mut Vec<bool>,
    out: &mut Vec<Mor>,
) {
    let n = table.len();
    if i == n {
        out.push(Mor::Bag(BagMorphism {
            sigma: sigma.clone(),
            components: comps.clone(),
        }));
        return;
    }
    for j in 0..n {
        if used[j] || table[i][j].is_empty() {
            continue;
        }
        used[j] = true;
        sigma[i] = j;
        for c in &table[i][j] {
            comps.push(c.clone());
            enumerate_bag_homs(table, i + 1, sigma, comps, used, out);
            comps.pop();
        }
        used[j] = false;
    }
}

struct Orbits<'a> {
    ep: &'a Endpoint,
    p: &'a Bag,
    q: &'a Bag,
    a: &'a [&'a BagMorphism],
    a_inv: &'a [Vec<Mor>],
    b: &'a [&'a BagMorphism],
    sigma: Vec<Option<usize>>,
    comps: Vec<Option<Mor>>,
    used: Vec<bool>,
}

impl Orbits<'_> {
    fn solve(&mut self, budget: &mut Budget) -> Result<bool> {
        let Some(i) = self.sigma.iter().position(Option::is_none) else {
            return Ok(true);
        };
        let n = self.sigma.len();
        for j in 0..n {
            if self.used[j] || !self.ep.is_iso(&self.p.colors[i], &self.q.colors[j]) {
                continue;
            }
            for c in self.ep.homs(&self.p.colors[i], &self.q.colors[j]) {
                budget.spend(1)?;
                let mut assigned = Vec::new();
                if self.propagate(i, j, c, &mut assigned) && self.solve(budget)? {
                    return Ok(true);
                }
                for k in assigned {
                    self.used[self.sigma[k].unwrap()] = false;
                    self.sigma[k] = None;
                    self.comps[k] = None;
                }
            }
        }
        Ok(false)
    }

    fn propagate(&mut self, i: usize, j: usize, c: Mor, assigned: &mut Vec<usize>) -> bool {
        let mut stack = vec![(i, j, c)];
        while let Some((i, j, c)) = stack.pop() {
            match &self.sigma[i] {
                Some(j0) => {
                    if *j0 != j || self.comps[i].as_ref() != Some(&c) {
                        return false;
                    }
                    continue;
                }
                None => {
                    if self.used[j] {
                        return false;
                    }
                    self.sigma[i] = Some(j);
                    self.used[j] = true;
                    self.comps[i] = Some(c.clone());
                    assigned.push(i);
                }
            }
            for k in 0..self.a.len() {
                let i2 = self.a[k].sigma[i];
                let j2 = self.b[k].sigma[j];
                let c2 = self.ep.compose(
                    &self.b[k].components[j],
                    &self.ep.compose(&c, &self.a_inv[k][i]),
                );
                stack.push((i2, j2, c2));
            }
        }
        true
    }
}

/// Every sequence of `n ≤ k` objects of `a`, shortest first and then in
/// lexicographic order.
fn sequences(objects: usize, k: usize, sorted: bool) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &layer {
            let start = if sorted { s.last().copied().unwrap_or(0) } else { 0 };
            for x in start..objects {
                let mut t: Vec<usize> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub type BangMaterialized = Materialized<Obj, Mor>;

/// The full subgroupoid of `!a` on all bags with carrier size at most `k`.
pub fn bang_materialize(a: &FinGroupoid, k: usize) -> BangMaterialized {
    let objs = sequences(a.object_count(), k, false)
        .iter()
        .map(|s| Obj::leaves(s))
        .collect();
    materialize(&Endpoint::bang(a), objs)
}

/// The full subgroupoid of `!a` on bags of size at most `k` whose colors are
/// sorted. Every bag of size at most `k` is isomorphic to one of these.
pub fn bang_materialize_sorted(a: &FinGroupoid, k: usize) -> BangMaterialized {
    let objs = sequences(a.object_count(), k, true)
        .iter()
        .map(|s| Obj::leaves(s))
        .collect();
    materialize(&Endpoint::bang(a), objs)
}

/// Number of automorphisms of a bag over `a`.
pub fn automorphism_count(a: &FinGroupoid, bag: &Obj) -> usize {
    Endpoint::bang(a).homs(bag, bag).len()
}

/// `!f` on a term of any depth: recolor every leaf.
pub fn bang_obj(f: &GFunctor, x: &Obj) -> Obj {
    match x {
        Obj::Base(a) => Obj::Base(f.obj[*a]),
        Obj::Bag(b) => Obj::bag(b.colors.iter().map(|c| bang_obj(f, c)).collect()),
    }
}

pub fn bang_mor(f: &GFunctor, m: &Mor) -> Mor {
    match m {
        Mor::Base(u) => Mor::Base(f.arr[*u]),
        Mor::Bag(b) => Mor::Bag(BagMorphism {
            sigma: b.sigma.clone(),
            components: b.components.iter().map(|c| bang_mor(f, c)).collect(),
        }),
    }
}

/// `!` applied to a mapping into an effective endpoint: wraps every value of
/// a bag's coloring.
pub fn bang_mapping_obj(m: &Mapping<Obj, Mor>, x: &Obj) -> Obj {
    match x {
        Obj::Base(a) => m.obj[*a].clone(),
        Obj::Bag(b) => Obj::bag(b.colors.iter().map(|c| bang_mapping_obj(m, c)).collect()),
    }
}

pub fn bang_mapping_mor(m: &Mapping<Obj, Mor>, f: &Mor) -> Mor {
    match f {
        Mor::Base(u) => m.arr[*u].clone(),
        Mor::Bag(b) => Mor::Bag(BagMorphism {
            sigma: b.sigma.clone(),
            components: b.components.iter().map(|c| bang_mapping_mor(m, c)).collect(),
        }),
    }
}

/// `!f` as a functor `!a → !b`, evaluated on demand.
#[derive(Clone, Debug)]
pub struct BangFunctor {
    pub f: GFunctor,
}

pub fn bang_functor(f: &GFunctor) -> BangFunctor {
    BangFunctor { f: f.clone() }
}

impl BangFunctor {
    pub fn obj(&self, x: &Obj) -> Obj {
        bang_obj(&self.f, x)
    }

    pub fn mor(&self, m: &Mor) -> Mor {
        bang_mor(&self.f, m)
    }

    /// The restriction to a materialized piece of `!a`.
    pub fn on(&self, m: &BangMaterialized) -> Mapping<Obj, Mor> {
        Mapping {
            obj: m.objects.iter().map(|x| self.obj(x)).collect(),
            arr: m.arrows.iter().map(|u| self.mor(u)).collect(),
        }
    }
}

pub fn eta_obj(x: &Obj) -> Obj {
    Obj::bag(vec![x.clone()])
}

pub fn eta_mor(m: &Mor) -> Mor {
    Mor::Bag(BagMorphism {
        sigma: vec![0],
        components: vec![m.clone()],
    })
}

/// `η : a → !a`, singleton bags.
pub fn eta(a: &FinGroupoid) -> Mapping<Obj, Mor> {
    Mapping {
        obj: a.objects().map(|x| eta_obj(&Obj::Base(x))).collect(),
        arr: a.arrows().map(|u| eta_mor(&Mor::Base(u))).collect(),
    }
}

/// `μ` on a bag of bags: concatenation, outer index first.
pub fn mu_obj(x: &Obj) -> Obj {
    let outer = x.as_bag().expect("μ expects a bag of bags");
    let mut colors = Vec::new();
    for inner in &outer.colors {
        colors.extend(inner.as_bag().expect("μ expects a bag of bags").colors.iter().cloned());
    }
    Obj::bag(colors)
}

pub fn mu_mor(m: &Mor) -> Mor {
    let outer = m.as_bag().expect("μ expects a bag morphism of bag morphisms");
    let inner: Vec<&BagMorphism> = outer
        .components
        .iter()
        .map(|c| c.as_bag().expect("μ expects a bag morphism of bag morphisms"))
        .collect();
    // sizes and offsets of the target's inner bags
    let mut size = vec![0; inner.len()];
    for (i, b) in inner.iter().enumerate() {
        size[outer.sigma[i]] = b.sigma.len();
    }
    let mut offset = vec![0; inner.len()];
    for t in 1..inner.len() {
        offset[t] = offset[t - 1] + size[t - 1];
    }
    let mut sigma = Vec::new();
    let mut components = Vec::new();
    for (i, b) in inner.iter().enumerate() {
        for (j, c) in b.components.iter().enumerate() {
            sigma.push(offset[outer.sigma[i]] + b.sigma[j]);
            components.push(c.clone());
        }
    }
    Mor::Bag(BagMorphism { sigma, components })
}

/// `l² : !a × !b → !(a ⊎ b)`: left block then right block.
pub fn seely2_obj(co: &Coproduct, x: &Obj, y: &Obj) -> Obj {
    let (p, q) = (x.as_bag().expect("bag"), y.as_bag().expect("bag"));
    let left = p.colors.iter().map(|c| Obj::Base(co.inj1.obj[c.as_base().expect("leaf")]));
    let right = q.colors.iter().map(|c| Obj::Base(co.inj2.obj[c.as_base().expect("leaf")]));
    Obj::bag(left.chain(right).collect())
}

pub fn seely2_mor(co: &Coproduct, f: &Mor, g: &Mor) -> Mor {
    let (f, g) = (f.as_bag().expect("bag morphism"), g.as_bag().expect("bag morphism"));
    let n = f.sigma.len();
    let sigma = f.sigma.iter().copied().chain(g.sigma.iter().map(|&j| n + j)).collect();
    let left = f.components.iter().map(|c| Mor::Base(co.inj1.arr[c.as_base().expect("leaf")]));
    let right = g.components.iter().map(|c| Mor::Base(co.inj2.arr[c.as_base().expect("leaf")]));
    Mor::Bag(BagMorphism {
        sigma,
        components: left.chain(right).collect(),
    })
}

/// `l⁰ : 𝟙 → !∅`, the empty bag.
pub fn seely0_obj() -> Obj {
    Obj::bag(Vec::new())
}

/// `l²` as a functor out of the effective product `!a × !b`.
#[derive(Clone, Debug)]
pub struct Seely2 {
    pub left: Endpoint,
    pub right: Endpoint,
    pub target: Endpoint,
    pub coproduct: Coproduct,
}

pub fn seely2(a: &FinGroupoid, b: &FinGroupoid) -> Seely2 {
    let coproduct = crate::gpd::coproduct(a, b);
    Seely2 {
        left: Endpoint::bang(a),
        right: Endpoint::bang(b),
        target: Endpoint::bang(&coproduct.groupoid),
        coproduct,
    }
}

impl Seely2 {
    pub fn source(&self) -> Pair<Endpoint, Endpoint> {
        Pair(self.left.clone(), self.right.clone())
    }

    pub fn obj(&self, x: &(Obj, Obj)) -> Obj {
        seely2_obj(&self.coproduct, &x.0, &x.1)
    }

    pub fn mor(&self, m: &(Mor, Mor)) -> Mor {
        seely2_mor(&self.coproduct, &m.0, &m.1)
    }
}

/// Bags of bags: every outer bag of at most `k_outer` inner bags, each
/// drawn from `inner`, with sorted inner indices.
pub fn bags_of(inner: &[Obj], k_outer: usize) -> Vec<Obj> {
    sequences(inner.len(), k_outer, true)
        .into_iter()
        .map(|s| Obj::bag(s.into_iter().map(|i| inner[i].clone()).collect()))
        .collect()
}

/// A lookup from objects of a materialization to their index, tolerating
/// objects outside it.
pub fn index_of(m: &BangMaterialized, x: &Obj) -> Option<usize> {
    m.index.get(x).copied()
}

/// Groups objects by isomorphism class representative in a materialization.
pub fn class_map(m: &BangMaterialized) -> HashMap<Obj, usize> {
    let conn = m.groupoid.connecting_arrows();
    m.objects
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), conn[i].0))
        .collect()
}

/// `!s` for a span of concrete groupoids, with apex `!apex` cut at carrier
/// size `k`.
pub fn bang_span(s: &Span, k: usize) -> Result<Span> {
    if !s.is_concrete() {
        return Err(Error::Unsupported("bang_span needs concrete endpoints".into()));
    }
    let apex = bang_materialize(&s.apex, k);
    let (l, r) = (s.left_functor(), s.right_functor());
    Ok(Span {
        left: Endpoint::bang(&s.left.base),
        right: Endpoint::bang(&s.right.base),
        leg_l: bang_functor(&l).on(&apex),
        leg_r: bang_functor(&r).on(&apex),
        apex: apex.groupoid,
    })
}

/// `ε = R(η) : !a ⇸ a`.
pub fn epsilon(a: &FinGroupoid) -> Span {
    Span {
        left: Endpoint::bang(a),
        right: Endpoint::gpd(a),
        apex: a.clone(),
        leg_l: eta(a),
        leg_r: crate::span::leg_of(&GFunctor::identity(a)),
    }
}

/// `δ = R(μ) : !a ⇸ !!a` with its apex `!!a` restricted to the listed bags
/// of bags.
pub fn delta_on(a: &FinGroupoid, objects: Vec<Obj>) -> Span {
    let m = materialize(&Endpoint::bangbang(a), objects);
    Span {
        left: Endpoint::bang(a),
        right: Endpoint::bangbang(a),
        leg_l: Mapping {
            obj: m.objects.iter().map(mu_obj).collect(),
            arr: m.arrows.iter().map(mu_mor).collect(),
        },
        leg_r: m.inclusion(),
        apex: m.groupoid,
    }
}

/// `(ε, δ)`, with `δ` cut at `k_outer` inner bags of size at most `k_inner`.
pub fn comonad_spans(a: &FinGroupoid, k_outer: usize, k_inner: usize) -> (Span, Span) {
    let inner = bang_materialize_sorted(a, k_inner).objects;
    (epsilon(a), delta_on(a, bags_of(&inner, k_outer)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::check_mapping;
    use crate::equiv::gcard;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn two_self_identifications() {
        let bag = Obj::leaves(&[0, 0, 1]);
        assert_eq!(automorphism_count(&FinGroupoid::discrete(2), &bag), 2);
    }

    #[test]
    fn truncated_exponential_series() {
        let mut want = q(0, 1);
        let mut fact = 1i64;
        for k in 0..=5i64 {
            if k > 0 {
                fact *= k;
            }
            want += q(1, fact);
            let m = bang_materialize(&FinGroupoid::unit(), k as usize);
            assert_eq!(gcard(&m.groupoid), want, "k = {k}");
        }
    }

    #[test]
    fn bags_over_two_points() {
        assert_eq!(gcard(&bang_materialize(&FinGroupoid::discrete(2), 2).groupoid), q(5, 1));
        assert_eq!(
            gcard(&bang_materialize_sorted(&FinGroupoid::discrete(2), 2).groupoid),
            q(5, 1)
        );
        assert_eq!(bang_materialize(&FinGroupoid::empty(), 3).groupoid, FinGroupoid::unit());
    }

    #[test]
    fn materialization_is_valid() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let m = bang_materialize(&a, 3);
        assert!(m.groupoid.validate().is_valid());
        assert!(check_mapping(&Endpoint::bang(&a), &m.groupoid, &m.inclusion()).is_empty());
    }

    #[test]
    fn flattening() {
        let x = Obj::bag(vec![Obj::leaves(&[0]), Obj::leaves(&[0, 1])]);
        assert_eq!(mu_obj(&x), Obj::leaves(&[0, 0, 1]));
    }

    #[test]
    fn mu_is_functorial_on_bags_of_bags() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let inner = bang_materialize_sorted(&a, 2).objects;
        let outer = materialize(&Endpoint::bangbang(&a), bags_of(&inner, 2));
        let ep = Endpoint::bang(&a);
        let m = Mapping {
            obj: outer.objects.iter().map(mu_obj).collect(),
            arr: outer.arrows.iter().map(mu_mor).collect(),
        };
        assert!(check_mapping(&ep, &outer.groupoid, &m).is_empty());
    }

    #[test]
    fn eta_is_functorial_and_separates_colors() {
        let a = FinGroupoid::discrete(2);
        let e = eta(&a);
        let ep = Endpoint::bang(&a);
        assert!(check_mapping(&ep, &a, &e).is_empty());
        assert!(!ep.is_iso(&e.obj[0], &e.obj[1]));
    }

    #[test]
    fn seely_on_singletons() {
        let l2 = seely2(&FinGroupoid::unit(), &FinGroupoid::unit());
        let x = (Obj::leaves(&[0]), Obj::leaves(&[0]));
        assert_eq!(l2.obj(&x), Obj::leaves(&[0, 1]));
        assert_eq!(seely0_obj(), Obj::bag(vec![]));
    }

    #[test]
    fn bang_of_identity_span() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let s = bang_span(&crate::span::span_id(&a), 2).unwrap();
        let m = bang_materialize(&a, 2);
        assert_eq!(s.apex, m.groupoid);
        assert_eq!(s.leg_l, m.inclusion());
        assert_eq!(s.leg_r, m.inclusion());
    }

    #[test]
    fn epsilon_dualizes_to_eta() {
        let a = FinGroupoid::discrete(2);
        let (e, d) = comonad_spans(&a, 2, 2);
        let l = crate::span::dualize(&e);
        assert_eq!(l.leg_r, eta(&a));
        assert!(Span::new(d.left.clone(), d.right.clone(), d.apex.clone(), d.leg_l.clone(), d.leg_r.clone()).is_ok());
    }

    #[test]
    fn intertwiner_agrees_with_brute_force() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let ep = Endpoint::bang(&a);
        let x = Obj::leaves(&[0, 0, 1]);
        let auts = ep.homs(&x, &x);
        let mut budget = Budget::default();
        for g in &auts {
            for h in &auts {
                let fast = ep.intertwiner(&x, &x, &[g.clone()], &[h.clone()], &mut budget).unwrap();
                let slow = auts
                    .iter()
                    .find(|t| ep.compose(t, g) == ep.compose(h, t))
                    .cloned();
                assert_eq!(fast.is_some(), slow.is_some());
                if let Some(t) = fast {
                    assert_eq!(ep.compose(&t, g), ep.compose(h, &t));
                }
            }
        }
    }
}
