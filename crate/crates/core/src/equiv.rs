//! Deciding equivalence of finite groupoids, optionally over a base.
//!
//! Both sides are cut down to one representative per isomorphism class.
//! Classes are matched by a bipartite matching whose edges are pairs of
//! representatives admitting an isomorphism of automorphism groups together
//! with a compatible arrow in the base. The matched data extends to a full
//! equivalence along the chosen connecting arrows.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::effective::{Effective, Mapping, Terminal};
use crate::error::{Error, Result};
use crate::gpd::{FinGroupoid, GFunctor};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A cap on candidate steps for the exhaustive searches. Running out is an
/// error, never a negative answer.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn spend(&mut self, steps: u64) -> Result<()> {
        self.used += steps;
        if self.used > self.limit {
            Err(Error::BudgetExceeded(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Verification record for a claimed equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub functorial: bool,
    pub full: bool,
    pub faithful: bool,
    pub essentially_surjective: bool,
}

impl Evidence {
    pub fn holds(&self) -> bool {
        self.functorial && self.full && self.faithful && self.essentially_surjective
    }
}

/// Checks exhaustively that `f` is a fully faithful, essentially surjective functor.
pub fn verify_equivalence(f: &GFunctor) -> Evidence {
    let functorial = f.check().is_empty();
    let (d, c) = (&f.domain, &f.codomain);
    let mut full = true;
    let mut faithful = true;
    if functorial {
        for x in d.objects() {
            for y in d.objects() {
                let target = c.hom(f.obj[x], f.obj[y]);
                let mut hit = vec![false; target.len()];
                for &u in d.hom(x, y) {
                    let pos = target.iter().position(|&t| t == f.arr[u]).expect("functorial");
                    if hit[pos] {
                        faithful = false;
                    }
                    hit[pos] = true;
                }
                if hit.iter().any(|h| !h) {
                    full = false;
                }
            }
        }
    }
    let mut reached = vec![false; c.object_count()];
    for &y in &f.obj {
        for z in c.objects() {
            if !c.hom(y, z).is_empty() {
                reached[z] = true;
            }
        }
    }
    Evidence {
        functorial,
        full,
        faithful,
        essentially_surjective: reached.iter().all(|&r| r),
    }
}

/// A functor certified to be an equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub functor: GFunctor,
    pub evidence: Evidence,
}

impl EquivalenceWitness {
    /// Verifies `functor`; `None` if it is not an equivalence.
    pub fn certify(functor: GFunctor) -> Option<Self> {
        let evidence = verify_equivalence(&functor);
        evidence.holds().then_some(EquivalenceWitness { functor, evidence })
    }

    pub fn recheck(&self) -> bool {
        verify_equivalence(&self.functor).holds()
    }
}

/// An equivalence `h : X1 → X2` together with a natural isomorphism
/// `f2 ∘ h ⇒ f1` into the base: `components[x] : f2(h(x)) → f1(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverWitness<M> {
    pub equivalence: EquivalenceWitness,
    pub components: Vec<M>,
}

impl<M: Clone + Eq> OverWitness<M> {
    pub fn recheck<T: Effective<Mor = M>>(
        &self,
        base: &T,
        f1: &Mapping<T::Obj, M>,
        f2: &Mapping<T::Obj, M>,
    ) -> bool {
        if !self.equivalence.recheck() {
            return false;
        }
        let h = &self.equivalence.functor;
        let x1 = &h.domain;
        for x in x1.objects() {
            let c = &self.components[x];
            if base.src(c) != f2.obj[h.obj[x]] || base.dst(c) != f1.obj[x] {
                return false;
            }
        }
        x1.arrows().all(|u| {
            let (x, y) = (x1.src(u), x1.dst(u));
            base.compose(&f1.arr[u], &self.components[x])
                == base.compose(&self.components[y], &f2.arr[h.arr[u]])
        })
    }
}

/// The automorphism group of one object, with local element indices.
#[derive(Clone, Debug)]
pub(crate) struct AutGroup {
    pub elems: Vec<usize>,
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
}

impl AutGroup {
    pub fn of(g: &FinGroupoid, x: usize) -> Self {
        let elems = g.hom(x, x).to_vec();
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mul = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos[&g.compose(a, b)]).collect())
            .collect();
        AutGroup {
            identity: pos[&g.identity(x)],
            elems,
            mul,
        }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut p = a;
        while p != self.identity {
            p = self.mul[a][p];
            k += 1;
        }
        k
    }

    /// Greedy generating set: each new generator is the first element not
    /// yet generated, so the result is deterministic.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order();
        let mut inside = vec![false; n];
        inside[self.identity] = true;
        let mut gens = Vec::new();
        while let Some(g) = (0..n).find(|&a| !inside[a]) {
            gens.push(g);
            let mut stack: Vec<usize> = (0..n).filter(|&a| inside[a]).collect();
            while let Some(a) = stack.pop() {
                for &s in &gens {
                    let b = self.mul[s][a];
                    if !inside[b] {
                        inside[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        gens
    }

    /// Extends an assignment on generators to the subgroup they generate;
    /// `None` if that is not a well-defined injective homomorphism. Elements
    /// outside the subgroup map to `usize::MAX`.
    fn extend(&self, gens: &[usize], other: &AutGroup, images: &[usize]) -> Option<Vec<usize>> {
        let n = self.order();
        let mut map = vec![usize::MAX; n];
        let mut hit = vec![false; other.order()];
        map[self.identity] = other.identity;
        hit[other.identity] = true;
        let mut queue = vec![self.identity];
        let mut head = 0;
        while head < queue.len() {
            let a = queue[head];
            head += 1;
            for (&s, &t) in gens.iter().zip(images) {
                let b = self.mul[s][a];
                let img = other.mul[t][map[a]];
                if map[b] == usize::MAX {
                    if hit[img] {
                        return None;
                    }
                    hit[img] = true;
                    map[b] = img;
                    queue.push(b);
                } else if map[b] != img {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Calls `visit` with every group isomorphism `self → other` (as local
    /// index maps) until it returns `Some`. Generator images are chosen
    /// depth first, dropping prefixes that already fail to be homomorphic
    /// or that `admit` rejects.
    pub fn for_each_iso<R>(
        &self,
        other: &AutGroup,
        budget: &mut Budget,
        mut admit: impl FnMut(&[usize], &mut Budget) -> Result<bool>,
        mut visit: impl FnMut(&[usize], &mut Budget) -> Result<Option<R>>,
    ) -> Result<Option<R>> {
        if self.order() != other.order() {
            return Ok(None);
        }
        let gens = self.generators();
        if gens.is_empty() {
            return visit(&[other.identity], budget);
        }
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let k = self.element_order(g);
                (0..other.order()).filter(|&b| other.element_order(b) == k).collect()
            })
            .collect();
        let mut images = Vec::with_capacity(gens.len());
        self.iso_search(other, &gens, &candidates, &mut images, budget, &mut admit, &mut visit)
    }

    fn iso_search<R>(
        &self,
        other: &AutGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        budget: &mut Budget,
        admit: &mut impl FnMut(&[usize], &mut Budget) -> Result<bool>,
        visit: &mut impl FnMut(&[usize], &mut Budget) -> Result<Option<R>>,
    ) -> Result<Option<R>> {
        let k = images.len();
        for &c in &candidates[k] {
            budget.spend(1)?;
            images.push(c);
            if let Some(map) = self.extend(&gens[..=k], other, images) {
                let found = if k + 1 == gens.len() {
                    visit(&map, budget)?
                } else if admit(images, budget)? {
                    self.iso_search(other, gens, candidates, images, budget, admit, visit)?
                } else {
                    None
                };
                if found.is_some() {
                    return Ok(found);
                }
            }
            images.pop();
        }
        Ok(None)
    }
}

/// Per-class data of a groupoid: representatives, connecting arrows and
/// automorphism groups of the representatives.
pub(crate) struct Classes {
    pub reps: Vec<usize>,
    pub class_of: Vec<usize>,
    pub connect: Vec<usize>,
    pub auts: Vec<AutGroup>,
}

impl Classes {
    pub fn of(g: &FinGroupoid) -> Self {
        let conn = g.connecting_arrows();
        let reps = g.class_representatives();
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        Classes {
            class_of: conn.iter().map(|(r, _)| pos[r]).collect(),
            connect: conn.iter().map(|&(_, a)| a).collect(),
            auts: reps.iter().map(|&r| AutGroup::of(g, r)).collect(),
            reps,
        }
    }

    fn signature(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.auts.iter().map(|a| a.order()).collect();
        s.sort_unstable();
        s
    }
}

/// One candidate match between classes: the group isomorphism (on arrow
/// ids) and the base component at the representative.
struct ClassMatch<M> {
    phi: HashMap<usize, usize>,
    theta: M,
}

/// Searches for an equivalence `X1 ≃ X2` over the base `t`, i.e. commuting
/// with `f1`, `f2` up to a natural isomorphism. Complete: `Ok(None)` means
/// no such equivalence exists.
pub fn equivalence_over<T: Effective>(
    t: &T,
    x1: &FinGroupoid,
    f1: &Mapping<T::Obj, T::Mor>,
    x2: &FinGroupoid,
    f2: &Mapping<T::Obj, T::Mor>,
    budget: &mut Budget,
) -> Result<Option<OverWitness<T::Mor>>> {
    let c1 = Classes::of(x1);
    let c2 = Classes::of(x2);
    if c1.signature() != c2.signature() {
        return Ok(None);
    }
    let n = c1.reps.len();
    let gens: Vec<Vec<usize>> = c1.auts.iter().map(|g| g.generators()).collect();
    // matches[i][j]: how class i of X1 maps onto class j of X2, computed on
    // demand by the matching.
    let mut matches: Vec<Vec<Option<Option<ClassMatch<T::Mor>>>>> =
        (0..n).map(|_| (0..n).map(|_| None).collect()).collect();
    let mut edge = |i: usize, j: usize, budget: &mut Budget| -> Result<bool> {
        if let Some(m) = &matches[i][j] {
            return Ok(m.is_some());
        }
        let (r, s) = (c1.reps[i], c2.reps[j]);
        let (g1, g2) = (&c1.auts[i], &c2.auts[j]);
        let gens = &gens[i];
        budget.spend(1)?;
        let found = if g1.order() != g2.order() || !t.is_iso(&f2.obj[s], &f1.obj[r]) {
            None
        } else {
            let b: Vec<T::Mor> = gens.iter().map(|&k| f1.arr[g1.elems[k]].clone()).collect();
            let admit = |images: &[usize], budget: &mut Budget| -> Result<bool> {
                let a: Vec<T::Mor> = images.iter().map(|&k| f2.arr[g2.elems[k]].clone()).collect();
                Ok(t.intertwiner(&f2.obj[s], &f1.obj[r], &a, &b[..a.len()], budget)?.is_some())
            };
            g1.for_each_iso(g2, budget, admit, |map, budget| {
                let a: Vec<T::Mor> = gens
                    .iter()
                    .map(|&k| f2.arr[g2.elems[map[k]]].clone())
                    .collect();
                let theta = t.intertwiner(&f2.obj[s], &f1.obj[r], &a, &b, budget)?;
                Ok(theta.map(|theta| ClassMatch {
                    phi: (0..g1.order())
                        .map(|k| (g1.elems[k], g2.elems[map[k]]))
                        .collect(),
                    theta,
                }))
            })?
        };
        let ok = found.is_some();
        matches[i][j] = Some(found);
        Ok(ok)
    };
    let Some(assign) = perfect_matching(n, &mut edge, budget)? else {
        return Ok(None);
    };
    let matches: Vec<Vec<Option<ClassMatch<T::Mor>>>> = matches
        .into_iter()
        .map(|row| row.into_iter().map(Option::flatten).collect())
        .collect();

    let mut obj = vec![0; x1.object_count()];
    let mut components = Vec::with_capacity(x1.object_count());
    for x in x1.objects() {
        let i = c1.class_of[x];
        let m = matches[i][assign[i]].as_ref().expect("matched");
        obj[x] = c2.reps[assign[i]];
        components.push(t.compose(&f1.arr[c1.connect[x]], &m.theta));
    }
    let arr = x1
        .arrows()
        .map(|u| {
            let (x, y) = (x1.src(u), x1.dst(u));
            let i = c1.class_of[x];
            let m = matches[i][assign[i]].as_ref().expect("matched");
            let core = x1.compose(x1.inverse(c1.connect[y]), x1.compose(u, c1.connect[x]));
            m.phi[&core]
        })
        .collect();
    let functor = GFunctor {
        domain: x1.clone(),
        codomain: x2.clone(),
        obj,
        arr,
    };
    let equivalence = EquivalenceWitness::certify(functor)
        .ok_or_else(|| Error::Invalid("constructed equivalence failed verification".into()))?;
    let w = OverWitness {
        equivalence,
        components,
    };
    debug_assert!(w.recheck(t, f1, f2));
    Ok(Some(w))
}

type Edge<'a> = dyn FnMut(usize, usize, &mut Budget) -> Result<bool> + 'a;

/// Kuhn's augmenting paths; edges are only evaluated when reached.
fn perfect_matching(n: usize, edge: &mut Edge, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        n: usize,
        edge: &mut Edge,
        budget: &mut Budget,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> Result<bool> {
        for j in 0..n {
            if seen[j] || !edge(i, j, budget)? {
                continue;
            }
            seen[j] = true;
            let free = match owner[j] {
                None => true,
                Some(k) => augment(k, n, edge, budget, seen, owner)?,
            };
            if free {
                owner[j] = Some(i);
                return Ok(true);
            }
        }
        Ok(false)
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, n, edge, budget, &mut seen, &mut owner)? {
            return Ok(None);
        }
    }
    let mut assign = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        assign[o.expect("perfect")] = j;
    }
    Ok(Some(assign))
}

/// Decides whether `a ≃ b`, returning a verified witness `a → b`.
pub fn find_equivalence(
    a: &FinGroupoid,
    b: &FinGroupoid,
    budget: &mut Budget,
) -> Result<Option<EquivalenceWitness>> {
    let fa = Mapping {
        obj: vec![(); a.object_count()],
        arr: vec![(); a.arrow_count()],
    };
    let fb = Mapping {
        obj: vec![(); b.object_count()],
        arr: vec![(); b.arrow_count()],
    };
    Ok(equivalence_over(&Terminal, a, &fa, b, &fb, budget)?.map(|w| w.equivalence))
}

/// The full subgroupoid on class representatives and its (certified)
/// inclusion.
pub fn skeletalize(g: &FinGroupoid) -> (FinGroupoid, EquivalenceWitness) {
    let reps = g.class_representatives();
    let k = g.full_subgroupoid(&reps);
    let inclusion = GFunctor {
        domain: k.groupoid.clone(),
        codomain: g.clone(),
        obj: reps,
        arr: k.keys.clone(),
    };
    let w = EquivalenceWitness::certify(inclusion).expect("skeleton inclusion is an equivalence");
    (k.groupoid, w)
}

/// Groupoid cardinality: the sum of `1/|Aut(x)|` over isomorphism classes.
pub fn gcard(g: &FinGroupoid) -> BigRational {
    let mut total = BigRational::zero();
    for r in g.class_representatives() {
        total += BigRational::new(BigInt::from(1), BigInt::from(g.hom(r, r).len()));
    }
    total
}

/// Sorted automorphism-group orders, one per isomorphism class.
pub fn skeleton_signature(g: &FinGroupoid) -> Vec<usize> {
    let mut s: Vec<usize> = g
        .class_representatives()
        .iter()
        .map(|&r| g.hom(r, r).len())
        .collect();
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpd::{coproduct, product};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gcard_examples() {
        assert_eq!(gcard(&FinGroupoid::discrete(3)), rat(3, 1));
        assert_eq!(gcard(&FinGroupoid::cyclic(2)), rat(1, 2));
        assert_eq!(gcard(&FinGroupoid::indiscrete(2)), rat(1, 1));
        assert_eq!(gcard(&FinGroupoid::empty()), rat(0, 1));
    }

    #[test]
    fn skeleton_of_indiscrete_is_point() {
        let (s, w) = skeletalize(&FinGroupoid::indiscrete(2));
        assert_eq!(s, FinGroupoid::unit());
        assert!(w.recheck());
        let (s, _) = skeletalize(&FinGroupoid::cyclic(2));
        assert_eq!(s, FinGroupoid::cyclic(2));
        let (s, _) = skeletalize(&FinGroupoid::discrete(3));
        assert_eq!(s, FinGroupoid::discrete(3));
    }

    #[test]
    fn equivalence_examples() {
        let mut b = Budget::default();
        let w = find_equivalence(&FinGroupoid::discrete(2), &FinGroupoid::discrete(2), &mut b)
            .unwrap()
            .unwrap();
        assert!(w.recheck());
        assert!(find_equivalence(&FinGroupoid::cyclic(2), &FinGroupoid::discrete(2), &mut b)
            .unwrap()
            .is_none());
        assert!(find_equivalence(&FinGroupoid::indiscrete(3), &FinGroupoid::unit(), &mut b)
            .unwrap()
            .is_some());
        // Z2 × Z2 is not Z4.
        let k4 = product(&FinGroupoid::cyclic(2), &FinGroupoid::cyclic(2)).groupoid;
        assert!(find_equivalence(&k4, &FinGroupoid::cyclic(4), &mut b).unwrap().is_none());
        let z6 = FinGroupoid::cyclic(6);
        let z23 = product(&FinGroupoid::cyclic(2), &FinGroupoid::cyclic(3)).groupoid;
        assert!(find_equivalence(&z6, &z23, &mut b).unwrap().is_some());
    }

    #[test]
    fn coproduct_cardinality_example() {
        let c = coproduct(&FinGroupoid::cyclic(2), &FinGroupoid::unit()).groupoid;
        assert_eq!(skeleton_signature(&c), vec![1, 2]);
        assert_eq!(gcard(&c), rat(3, 2));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let mut b = Budget::new(0);
        let r = find_equivalence(&FinGroupoid::cyclic(3), &FinGroupoid::cyclic(3), &mut b);
        assert!(matches!(r, Err(Error::BudgetExceeded(0))));
    }
}
