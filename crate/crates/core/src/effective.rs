//! Groupoids that are queried rather than enumerated.
//!
//! Legs of spans may target `!A`, which has infinitely many objects. All the
//! constructions here only ever ask for the hom-set between two given objects,
//! so that is the whole interface.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::equiv::Budget;
use crate::error::Result;
use crate::gpd::{Builder, FinGroupoid, GFunctor};

pub trait Effective {
    type Obj: Clone + Eq + Hash + Debug + Send + Sync;
    type Mor: Clone + Eq + Hash + Debug + Send + Sync;

    /// Every arrow `x → y`, in a deterministic order.
    fn homs(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor>;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    fn inverse(&self, f: &Self::Mor) -> Self::Mor;
    fn src(&self, f: &Self::Mor) -> Self::Obj;
    fn dst(&self, f: &Self::Mor) -> Self::Obj;

    fn is_iso(&self, x: &Self::Obj, y: &Self::Obj) -> bool {
        !self.homs(x, y).is_empty()
    }

    /// Finds `θ : x → y` with `θ ∘ a[k] = b[k] ∘ θ` for every `k`, where
    /// `a[k] ∈ Aut(x)` and `b[k] ∈ Aut(y)`.
    fn intertwiner(
        &self,
        x: &Self::Obj,
        y: &Self::Obj,
        a: &[Self::Mor],
        b: &[Self::Mor],
        budget: &mut Budget,
    ) -> Result<Option<Self::Mor>> {
        for theta in self.homs(x, y) {
            budget.spend(1)?;
            if a
                .iter()
                .zip(b)
                .all(|(ak, bk)| self.compose(&theta, ak) == self.compose(bk, &theta))
            {
                return Ok(Some(theta));
            }
        }
        Ok(None)
    }
}

impl Effective for FinGroupoid {
    type Obj = usize;
    type Mor = usize;

    fn homs(&self, x: &usize, y: &usize) -> Vec<usize> {
        self.hom(*x, *y).to_vec()
    }
    fn compose(&self, g: &usize, f: &usize) -> usize {
        FinGroupoid::compose(self, *g, *f)
    }
    fn identity(&self, x: &usize) -> usize {
        FinGroupoid::identity(self, *x)
    }
    fn inverse(&self, f: &usize) -> usize {
        FinGroupoid::inverse(self, *f)
    }
    fn src(&self, f: &usize) -> usize {
        FinGroupoid::src(self, *f)
    }
    fn dst(&self, f: &usize) -> usize {
        FinGroupoid::dst(self, *f)
    }
    fn is_iso(&self, x: &usize, y: &usize) -> bool {
        !self.hom(*x, *y).is_empty()
    }
}

/// The terminal groupoid as an effective target; equivalence over it is
/// plain equivalence.
#[derive(Clone, Copy, Debug, Default)]
pub struct Terminal;

impl Effective for Terminal {
    type Obj = ();
    type Mor = ();
    fn homs(&self, _: &(), _: &()) -> Vec<()> {
        vec![()]
    }
    fn compose(&self, _: &(), _: &()) {}
    fn identity(&self, _: &()) {}
    fn inverse(&self, _: &()) {}
    fn src(&self, _: &()) {}
    fn dst(&self, _: &()) {}
    fn intertwiner(
        &self,
        _: &(),
        _: &(),
        _: &[()],
        _: &[()],
        _: &mut Budget,
    ) -> Result<Option<()>> {
        Ok(Some(()))
    }
}

/// Cartesian product of two effective groupoids.
#[derive(Clone, Debug)]
pub struct Pair<A, B>(pub A, pub B);

impl<A: Effective, B: Effective> Effective for Pair<A, B> {
    type Obj = (A::Obj, B::Obj);
    type Mor = (A::Mor, B::Mor);

    fn homs(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        let hb = self.1.homs(&x.1, &y.1);
        if hb.is_empty() {
            return Vec::new();
        }
        let ha = self.0.homs(&x.0, &y.0);
        let mut out = Vec::with_capacity(ha.len() * hb.len());
        for u in &ha {
            for v in &hb {
                out.push((u.clone(), v.clone()));
            }
        }
        out
    }
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        (self.0.compose(&g.0, &f.0), self.1.compose(&g.1, &f.1))
    }
    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        (self.0.identity(&x.0), self.1.identity(&x.1))
    }
    fn inverse(&self, f: &Self::Mor) -> Self::Mor {
        (self.0.inverse(&f.0), self.1.inverse(&f.1))
    }
    fn src(&self, f: &Self::Mor) -> Self::Obj {
        (self.0.src(&f.0), self.1.src(&f.1))
    }
    fn dst(&self, f: &Self::Mor) -> Self::Obj {
        (self.0.dst(&f.0), self.1.dst(&f.1))
    }
    fn is_iso(&self, x: &Self::Obj, y: &Self::Obj) -> bool {
        self.0.is_iso(&x.0, &y.0) && self.1.is_iso(&x.1, &y.1)
    }
    fn intertwiner(
        &self,
        x: &Self::Obj,
        y: &Self::Obj,
        a: &[Self::Mor],
        b: &[Self::Mor],
        budget: &mut Budget,
    ) -> Result<Option<Self::Mor>> {
        let a0: Vec<_> = a.iter().map(|m| m.0.clone()).collect();
        let b0: Vec<_> = b.iter().map(|m| m.0.clone()).collect();
        let Some(t0) = self.0.intertwiner(&x.0, &y.0, &a0, &b0, budget)? else {
            return Ok(None);
        };
        let a1: Vec<_> = a.iter().map(|m| m.1.clone()).collect();
        let b1: Vec<_> = b.iter().map(|m| m.1.clone()).collect();
        Ok(self
            .1
            .intertwiner(&x.1, &y.1, &a1, &b1, budget)?
            .map(|t1| (t0, t1)))
    }
}

/// A functor from a finite groupoid into an effective groupoid, stored as
/// its values on objects and arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mapping<O, M> {
    pub obj: Vec<O>,
    pub arr: Vec<M>,
}

impl<O: Clone, M: Clone> Mapping<O, M> {
    /// `self ∘ f`.
    pub fn after(&self, f: &GFunctor) -> Self {
        Mapping {
            obj: f.obj.iter().map(|&x| self.obj[x].clone()).collect(),
            arr: f.arr.iter().map(|&a| self.arr[a].clone()).collect(),
        }
    }

    pub fn map<O2, M2>(&self, fo: impl Fn(&O) -> O2, fm: impl Fn(&M) -> M2) -> Mapping<O2, M2> {
        Mapping {
            obj: self.obj.iter().map(fo).collect(),
            arr: self.arr.iter().map(fm).collect(),
        }
    }

    pub fn zip<O2: Clone, M2: Clone>(&self, other: &Mapping<O2, M2>) -> Mapping<(O, O2), (M, M2)> {
        Mapping {
            obj: self.obj.iter().cloned().zip(other.obj.iter().cloned()).collect(),
            arr: self.arr.iter().cloned().zip(other.arr.iter().cloned()).collect(),
        }
    }
}

impl From<&GFunctor> for Mapping<usize, usize> {
    fn from(f: &GFunctor) -> Self {
        Mapping {
            obj: f.obj.clone(),
            arr: f.arr.clone(),
        }
    }
}

/// Lists every violated functor law of `m : domain → target`.
pub fn check_mapping<T: Effective>(
    target: &T,
    domain: &FinGroupoid,
    m: &Mapping<T::Obj, T::Mor>,
) -> Vec<String> {
    let mut v = Vec::new();
    if m.obj.len() != domain.object_count() || m.arr.len() != domain.arrow_count() {
        v.push("mapping has the wrong number of entries".to_string());
        return v;
    }
    for a in domain.arrows() {
        let fa = &m.arr[a];
        if target.src(fa) != m.obj[domain.src(a)] || target.dst(fa) != m.obj[domain.dst(a)] {
            v.push(format!("arrow {a} is mapped with wrong endpoints"));
        }
    }
    if !v.is_empty() {
        return v;
    }
    for x in domain.objects() {
        if m.arr[domain.identity(x)] != target.identity(&m.obj[x]) {
            v.push(format!("identity of {x} not preserved"));
        }
    }
    for (g, f, h) in domain.composition_triples() {
        if target.compose(&m.arr[g], &m.arr[f]) != m.arr[h] {
            v.push(format!("composite {g}∘{f} not preserved"));
        }
    }
    v
}

/// The full subgroupoid of an effective groupoid on a listed set of
/// distinct objects.
#[derive(Clone, Debug)]
pub struct Materialized<O, M> {
    pub groupoid: FinGroupoid,
    pub objects: Vec<O>,
    pub arrows: Vec<M>,
    pub index: HashMap<O, usize>,
}

impl<O: Clone, M: Clone> Materialized<O, M> {
    pub fn inclusion(&self) -> Mapping<O, M> {
        Mapping {
            obj: self.objects.clone(),
            arr: self.arrows.clone(),
        }
    }
}

pub fn materialize<T: Effective>(t: &T, objects: Vec<T::Obj>) -> Materialized<T::Obj, T::Mor> {
    let index: HashMap<T::Obj, usize> = objects
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    assert_eq!(index.len(), objects.len(), "materialize needs distinct objects");
    let mut bld = Builder::new(objects.len());
    for (i, x) in objects.iter().enumerate() {
        for (j, y) in objects.iter().enumerate() {
            for m in t.homs(x, y) {
                bld.arrow(m, i, j);
            }
        }
    }
    let k = bld.finish(
        |g, f| t.compose(g, f),
        |i| t.identity(&objects[i]),
        |f| t.inverse(f),
    );
    Materialized {
        groupoid: k.groupoid,
        arrows: k.keys,
        objects,
        index,
    }
}
