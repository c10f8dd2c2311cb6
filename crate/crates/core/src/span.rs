//! Spans of finite groupoids, composed by homotopy pullback.

use crate::bang::{Endpoint, Mor, Obj};
use crate::effective::{check_mapping, Effective, Mapping, Pair};
use crate::equiv::{
    equivalence_over, gcard, skeletalize, skeleton_signature, Budget, EquivalenceWitness, OverWitness,
};
use crate::error::{Error, Result};
use crate::gpd::{coproduct, product, Builder, FinGroupoid, GFunctor};
use crate::limits::{hpullback, HPullback};

pub type Leg = Mapping<Obj, Mor>;

/// `left ← apex → right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub left: Endpoint,
    pub right: Endpoint,
    pub apex: FinGroupoid,
    pub leg_l: Leg,
    pub leg_r: Leg,
}

/// A functor into a concrete groupoid, as a leg.
pub fn leg_of(f: &GFunctor) -> Leg {
    Mapping {
        obj: f.obj.iter().map(|&x| Obj::Base(x)).collect(),
        arr: f.arr.iter().map(|&u| Mor::Base(u)).collect(),
    }
}

/// A leg into a concrete endpoint, as a functor.
pub fn functor_of(leg: &Leg, domain: &FinGroupoid, codomain: &FinGroupoid) -> GFunctor {
    GFunctor {
        domain: domain.clone(),
        codomain: codomain.clone(),
        obj: leg.obj.iter().map(|x| x.as_base().expect("concrete leg")).collect(),
        arr: leg.arr.iter().map(|u| u.as_base().expect("concrete leg")).collect(),
    }
}

impl Span {
    /// Checks that both legs are functors into their endpoints.
    pub fn new(left: Endpoint, right: Endpoint, apex: FinGroupoid, leg_l: Leg, leg_r: Leg) -> Result<Self> {
        for (name, ep, leg) in [("leg_l", &left, &leg_l), ("leg_r", &right, &leg_r)] {
            if leg.obj.len() != apex.object_count() {
                return Err(Error::schema(format!("/{name}/obj"), "one image per apex object expected"));
            }
            if leg.arr.len() != apex.arrow_count() {
                return Err(Error::schema(format!("/{name}/arr"), "one image per apex arrow expected"));
            }
            for (i, x) in leg.obj.iter().enumerate() {
                if !ep.contains(x) {
                    return Err(Error::schema(format!("/{name}/obj/{i}"), "not an object of the endpoint"));
                }
            }
            for (i, m) in leg.arr.iter().enumerate() {
                if !ep.contains_mor(m) {
                    return Err(Error::schema(format!("/{name}/arr/{i}"), "not an arrow of the endpoint"));
                }
            }
            if let Some(v) = check_mapping(ep, &apex, leg).into_iter().next() {
                return Err(Error::Invalid(format!("{name}: {v}")));
            }
        }
        Ok(Span {
            left,
            right,
            apex,
            leg_l,
            leg_r,
        })
    }

    /// A span of concrete groupoids from two functors out of the apex.
    pub fn from_functors(l: &GFunctor, r: &GFunctor) -> Self {
        assert_eq!(l.domain, r.domain, "legs must share the apex");
        Span {
            left: Endpoint::gpd(&l.codomain),
            right: Endpoint::gpd(&r.codomain),
            apex: l.domain.clone(),
            leg_l: leg_of(l),
            leg_r: leg_of(r),
        }
    }

    pub fn is_concrete(&self) -> bool {
        self.left.is_concrete() && self.right.is_concrete()
    }

    pub fn left_functor(&self) -> GFunctor {
        functor_of(&self.leg_l, &self.apex, &self.left.base)
    }

    pub fn right_functor(&self) -> GFunctor {
        functor_of(&self.leg_r, &self.apex, &self.right.base)
    }

    /// Both legs at once, as a functor into `left × right`.
    pub fn joint_leg(&self) -> Mapping<(Obj, Obj), (Mor, Mor)> {
        self.leg_l.zip(&self.leg_r)
    }
}

pub fn span_id(a: &FinGroupoid) -> Span {
    let id = GFunctor::identity(a);
    Span::from_functors(&id, &id)
}

/// `L f = (id, f) : a ⇸ b`.
pub fn l_embed(f: &GFunctor) -> Span {
    Span::from_functors(&GFunctor::identity(&f.domain), f)
}

/// `L(h) ∘ s`, computed on the apex of `s` instead of through a pullback.
pub fn whisker_l(h: &GFunctor, s: &Span) -> Result<Span> {
    concrete(s, "whiskering")?;
    if h.domain != s.right.base {
        return Err(Error::Invalid("whiskering functor does not start at the span's right end".into()));
    }
    Ok(Span::from_functors(&s.left_functor(), &h.after(&s.right_functor())))
}

/// `R f = (f, id) : b ⇸ a`.
pub fn r_embed(f: &GFunctor) -> Span {
    Span::from_functors(f, &GFunctor::identity(&f.domain))
}

pub fn dualize(s: &Span) -> Span {
    Span {
        left: s.right.clone(),
        right: s.left.clone(),
        apex: s.apex.clone(),
        leg_l: s.leg_r.clone(),
        leg_r: s.leg_l.clone(),
    }
}

pub type Pullback = fn(&Endpoint, &FinGroupoid, &Leg, &FinGroupoid, &Leg) -> HPullback<Mor>;

fn standard_pullback(z: &Endpoint, x: &FinGroupoid, f: &Leg, y: &FinGroupoid, g: &Leg) -> HPullback<Mor> {
    hpullback(z, x, f, y, g)
}

/// `g ∘ f`.
pub fn span_compose(g: &Span, f: &Span) -> Result<Span> {
    compose_via(standard_pullback, g, f)
}

/// `g ∘ f` with a caller-supplied pullback construction.
pub fn compose_via(pullback: Pullback, g: &Span, f: &Span) -> Result<Span> {
    if f.right != g.left {
        return Err(Error::Mismatch(
            "right endpoint of the first span differs from the left endpoint of the second".into(),
        ));
    }
    let pb = pullback(&f.right, &f.apex, &f.leg_r, &g.apex, &g.leg_l);
    Ok(Span {
        left: f.left.clone(),
        right: g.right.clone(),
        leg_l: f.leg_l.after(&pb.proj1),
        leg_r: g.leg_r.after(&pb.proj2),
        apex: pb.groupoid,
    })
}

/// The equivalent span on a skeleton of the apex.
pub fn reduce(s: &Span) -> Span {
    let (_, w) = skeletalize(&s.apex);
    let inc = &w.functor;
    Span {
        left: s.left.clone(),
        right: s.right.clone(),
        apex: inc.domain.clone(),
        leg_l: s.leg_l.after(inc),
        leg_r: s.leg_r.after(inc),
    }
}

fn concrete(s: &Span, what: &str) -> Result<()> {
    if s.is_concrete() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} needs concrete endpoints")))
    }
}

/// Pointwise product of spans.
pub fn tensor(s1: &Span, s2: &Span) -> Result<Span> {
    concrete(s1, "tensor")?;
    concrete(s2, "tensor")?;
    let apex = product(&s1.apex, &s2.apex);
    let left = product(&s1.left.base, &s2.left.base);
    let right = product(&s1.right.base, &s2.right.base);
    let l = left.pair(
        &s1.left_functor().after(&apex.proj1),
        &s2.left_functor().after(&apex.proj2),
    );
    let r = right.pair(
        &s1.right_functor().after(&apex.proj1),
        &s2.right_functor().after(&apex.proj2),
    );
    Ok(Span::from_functors(&l, &r))
}

/// `⟨f, g⟩ : x ⇸ a ⊎ b`; the product of `a` and `b` in spans is `a ⊎ b`.
pub fn pairing(f: &Span, g: &Span) -> Result<Span> {
    concrete(f, "pairing")?;
    concrete(g, "pairing")?;
    if f.left != g.left {
        return Err(Error::Mismatch("pairing needs a shared left endpoint".into()));
    }
    let apex = coproduct(&f.apex, &g.apex);
    let target = coproduct(&f.right.base, &g.right.base);
    let l = apex.copair(&f.left_functor(), &g.left_functor());
    let r = apex.copair(
        &target.inj1.after(&f.right_functor()),
        &target.inj2.after(&g.right_functor()),
    );
    Ok(Span::from_functors(&l, &r))
}

/// The projections `R ι1 : a ⊎ b ⇸ a` and `R ι2 : a ⊎ b ⇸ b`.
pub fn projections(a: &FinGroupoid, b: &FinGroupoid) -> (Span, Span) {
    let c = coproduct(a, b);
    (r_embed(&c.inj1), r_embed(&c.inj2))
}

/// The unique span `x ⇸ ∅`.
pub fn terminal_span(x: &FinGroupoid) -> Span {
    let e = FinGroupoid::empty();
    let l = GFunctor {
        domain: e.clone(),
        codomain: x.clone(),
        obj: vec![],
        arr: vec![],
    };
    Span::from_functors(&l, &GFunctor::identity(&e))
}

/// `a ⊗ b ⇸ c` to `a ⇸ b ⊗ c`, with `a ⊗ b` the product groupoid.
pub fn curry(s: &Span, a: &FinGroupoid, b: &FinGroupoid) -> Result<Span> {
    concrete(s, "curry")?;
    let ab = product(a, b);
    if s.left.base != ab.groupoid {
        return Err(Error::Mismatch("left endpoint is not the given product".into()));
    }
    let l = s.left_functor();
    let bc = product(b, &s.right.base);
    let r = bc.pair(&ab.proj2.after(&l), &s.right_functor());
    Ok(Span::from_functors(&ab.proj1.after(&l), &r))
}

/// `a ⇸ b ⊗ c` to `a ⊗ b ⇸ c`.
pub fn uncurry(s: &Span, b: &FinGroupoid, c: &FinGroupoid) -> Result<Span> {
    concrete(s, "uncurry")?;
    let bc = product(b, c);
    if s.right.base != bc.groupoid {
        return Err(Error::Mismatch("right endpoint is not the given product".into()));
    }
    let r = s.right_functor();
    let ab = product(&s.left.base, b);
    let l = ab.pair(&s.left_functor(), &bc.proj1.after(&r));
    Ok(Span::from_functors(&l, &bc.proj2.after(&r)))
}

/// `unit : 𝟙 ⇸ a ⊗ a` and `counit : a ⊗ a ⇸ 𝟙`, both with apex `a` and the
/// diagonal.
pub fn compact_structure(a: &FinGroupoid) -> (Span, Span) {
    let aa = product(a, a);
    let id = GFunctor::identity(a);
    let diag = aa.pair(&id, &id);
    let bang = GFunctor::to_unit(a);
    (Span::from_functors(&bang, &diag), Span::from_functors(&diag, &bang))
}

/// `λ ∘ (counit ⊗ id) ∘ α ∘ (id ⊗ unit) ∘ ρ⁻¹ : a ⇸ a`.
pub fn snake_left(a: &FinGroupoid) -> Result<Span> {
    let one = FinGroupoid::unit();
    let (unit, counit) = compact_structure(a);
    let a1 = product(a, &one);
    let rho_inv = l_embed(&a1.pair(&GFunctor::identity(a), &GFunctor::to_unit(a)));
    let step1 = tensor(&span_id(a), &unit)?;
    let aa = product(a, a);
    let a_aa = product(a, &aa.groupoid);
    let aa_a = product(&aa.groupoid, a);
    let assoc = aa_a.pair(
        &aa.pair(&a_aa.proj1, &aa.proj1.after(&a_aa.proj2)),
        &aa.proj2.after(&a_aa.proj2),
    );
    let step2 = tensor(&counit, &span_id(a))?;
    let one_a = product(&one, a);
    let mut s = reduce(&span_compose(&step1, &rho_inv)?);
    s = whisker_l(&assoc, &s)?;
    s = reduce(&span_compose(&step2, &s)?);
    whisker_l(&one_a.proj2, &s)
}

/// `ρ ∘ (id ⊗ counit) ∘ α⁻¹ ∘ (unit ⊗ id) ∘ λ⁻¹ : a ⇸ a`.
pub fn snake_right(a: &FinGroupoid) -> Result<Span> {
    let one = FinGroupoid::unit();
    let (unit, counit) = compact_structure(a);
    let one_a = product(&one, a);
    let lambda_inv = l_embed(&one_a.pair(&GFunctor::to_unit(a), &GFunctor::identity(a)));
    let step1 = tensor(&unit, &span_id(a))?;
    let aa = product(a, a);
    let a_aa = product(a, &aa.groupoid);
    let aa_a = product(&aa.groupoid, a);
    let assoc_inv = a_aa.pair(
        &aa.proj1.after(&aa_a.proj1),
        &aa.pair(&aa.proj2.after(&aa_a.proj1), &aa_a.proj2),
    );
    let step2 = tensor(&span_id(a), &counit)?;
    let a1 = product(a, &one);
    let mut s = reduce(&span_compose(&step1, &lambda_inv)?);
    s = whisker_l(&assoc_inv, &s)?;
    s = reduce(&span_compose(&step2, &s)?);
    whisker_l(&a1.proj1, &s)
}

/// An apex equivalence `h` with leg components `tri_l[x] : l2(h x) → l1(x)`
/// and `tri_r[x] : r2(h x) → r1(x)`, natural in `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanEquivWitness {
    pub equivalence: EquivalenceWitness,
    pub tri_l: Vec<Mor>,
    pub tri_r: Vec<Mor>,
}

impl SpanEquivWitness {
    pub fn recheck(&self, s1: &Span, s2: &Span) -> bool {
        let h = &self.equivalence.functor;
        if h.domain != s1.apex || h.codomain != s2.apex || s1.left != s2.left || s1.right != s2.right {
            return false;
        }
        if self.tri_l.len() != s1.apex.object_count() || self.tri_r.len() != s1.apex.object_count() {
            return false;
        }
        let w = OverWitness {
            equivalence: self.equivalence.clone(),
            components: self.tri_l.iter().cloned().zip(self.tri_r.iter().cloned()).collect(),
        };
        w.recheck(
            &Pair(s1.left.clone(), s1.right.clone()),
            &s1.joint_leg(),
            &s2.joint_leg(),
        )
    }
}

/// Decides whether two spans with equal endpoints are equivalent.
pub fn span_equiv(s1: &Span, s2: &Span, budget: &mut Budget) -> Result<Option<SpanEquivWitness>> {
    if s1.left != s2.left || s1.right != s2.right {
        return Err(Error::Mismatch("spans have different endpoints".into()));
    }
    if s1 == s2 {
        let id = GFunctor::identity(&s1.apex);
        return Ok(Some(SpanEquivWitness {
            equivalence: EquivalenceWitness::certify(id).expect("identity"),
            tri_l: s1.leg_l.obj.iter().map(|x| s1.left.identity(x)).collect(),
            tri_r: s1.leg_r.obj.iter().map(|x| s1.right.identity(x)).collect(),
        }));
    }
    if skeleton_signature(&s1.apex) != skeleton_signature(&s2.apex) || gcard(&s1.apex) != gcard(&s2.apex) {
        return Ok(None);
    }
    let base = Pair(s1.left.clone(), s1.right.clone());
    let w = equivalence_over(&base, &s1.apex, &s1.joint_leg(), &s2.apex, &s2.joint_leg(), budget)?;
    Ok(w.map(|w| {
        let (tri_l, tri_r) = w.components.into_iter().unzip();
        SpanEquivWitness {
            equivalence: w.equivalence,
            tri_l,
            tri_r,
        }
    }))
}

/// One isomorphism class of the apex, seen over `a × b`: the class
/// representatives of its leg values, the automorphism group in a canonical
/// labeling, and the leg images of the group elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ClassCode {
    left: usize,
    right: usize,
    order: usize,
    mul: Vec<usize>,
    img_l: Vec<usize>,
    img_r: Vec<usize>,
}

/// A representative of the equivalence class of `s`, identical for any two
/// equivalent spans. The apex is skeletal with canonically labeled
/// automorphism groups.
pub fn canonical_form(s: &Span, budget: &mut Budget) -> Result<Span> {
    concrete(s, "canonical_form")?;
    let (a, b) = (&s.left.base, &s.right.base);
    let (ca, cb) = (a.connecting_arrows(), b.connecting_arrows());
    let (l, r) = (s.left_functor(), s.right_functor());
    let g = &s.apex;
    let mut codes = Vec::new();
    for rep in g.class_representatives() {
        let elems: Vec<usize> = g.hom(rep, rep).to_vec();
        let (ya, yb) = (l.obj[rep], r.obj[rep]);
        let (ra, ua) = ca[ya];
        let (rb, ub) = cb[yb];
        // leg images conjugated onto the class representatives
        let to_a: Vec<usize> = elems
            .iter()
            .map(|&e| a.compose(a.inverse(ua), a.compose(l.arr[e], ua)))
            .collect();
        let to_b: Vec<usize> = elems
            .iter()
            .map(|&e| b.compose(b.inverse(ub), b.compose(r.arr[e], ub)))
            .collect();
        codes.push(class_code(g, &elems, ra, &to_a, rb, &to_b, a, b, budget)?);
    }
    codes.sort();
    Ok(span_of_codes(&codes, a, b))
}

#[allow(clippy::too_many_arguments)]
fn class_code(
    g: &FinGroupoid,
    elems: &[usize],
    ra: usize,
    to_a: &[usize],
    rb: usize,
    to_b: &[usize],
    a: &FinGroupoid,
    b: &FinGroupoid,
    budget: &mut Budget,
) -> Result<ClassCode> {
    let n = elems.len();
    let pos = |e: usize| elems.iter().position(|&x| x == e).expect("element of the group");
    let mul: Vec<Vec<usize>> = elems
        .iter()
        .map(|&x| elems.iter().map(|&y| pos(g.compose(x, y))).collect())
        .collect();
    let id = pos(g.identity(g.src(elems[0])));
    // smallest generating tuple length
    let tuples = |d: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat()))
                .collect();
        }
        out
    };
    let label = |gens: &[usize]| -> Option<Vec<usize>> {
        // breadth-first words in the generators give each element a label
        let mut lab = vec![usize::MAX; n];
        let mut order = vec![id];
        lab[id] = 0;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &s in gens {
                let y = mul[x][s];
                if lab[y] == usize::MAX {
                    lab[y] = order.len();
                    order.push(y);
                }
            }
        }
        (order.len() == n).then_some(lab)
    };
    let mut d = 0;
    let labelings: Vec<Vec<usize>> = loop {
        let ls: Vec<Vec<usize>> = tuples(d).iter().filter_map(|t| label(t)).collect();
        budget.spend(ls.len() as u64 + 1)?;
        if !ls.is_empty() {
            break ls;
        }
        d += 1;
    };
    let aut_a: Vec<usize> = a.hom(ra, ra).to_vec();
    let aut_b: Vec<usize> = b.hom(rb, rb).to_vec();
    let mut best: Option<ClassCode> = None;
    for lab in &labelings {
        let mut inv = vec![0; n];
        for (x, &l) in lab.iter().enumerate() {
            inv[l] = x;
        }
        let mul_l: Vec<usize> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| lab[mul[inv[i]][inv[j]]])
            .collect();
        for &c in &aut_a {
            for &e in &aut_b {
                budget.spend(1)?;
                let code = ClassCode {
                    left: ra,
                    right: rb,
                    order: n,
                    mul: mul_l.clone(),
                    img_l: (0..n)
                        .map(|i| a.compose(c, a.compose(to_a[inv[i]], a.inverse(c))))
                        .collect(),
                    img_r: (0..n)
                        .map(|i| b.compose(e, b.compose(to_b[inv[i]], b.inverse(e))))
                        .collect(),
                };
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
        }
    }
    Ok(best.expect("at least one labeling"))
}

fn span_of_codes(codes: &[ClassCode], a: &FinGroupoid, b: &FinGroupoid) -> Span {
    let mut bld = Builder::new(codes.len());
    for (k, c) in codes.iter().enumerate() {
        for e in 0..c.order {
            bld.arrow((k, e), k, k);
        }
    }
    let kd = bld.finish(
        |&(k, x), &(_, y)| (k, codes[k].mul[x * codes[k].order + y]),
        |k| (k, 0),
        |&(k, x)| {
            let n = codes[k].order;
            (k, (0..n).find(|&y| codes[k].mul[x * n + y] == 0).expect("group inverse"))
        },
    );
    let apex = kd.groupoid;
    let l = GFunctor {
        domain: apex.clone(),
        codomain: a.clone(),
        obj: codes.iter().map(|c| c.left).collect(),
        arr: kd.keys.iter().map(|&(k, e)| codes[k].img_l[e]).collect(),
    };
    let r = GFunctor {
        domain: apex.clone(),
        codomain: b.clone(),
        obj: codes.iter().map(|c| c.right).collect(),
        arr: kd.keys.iter().map(|&(k, e)| codes[k].img_r[e]).collect(),
    };
    Span::from_functors(&l, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::DEFAULT_BUDGET;

    fn budget() -> Budget {
        Budget::new(DEFAULT_BUDGET)
    }

    #[test]
    fn whiskering_agrees_with_composition() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let b = FinGroupoid::cyclic(4);
        let x = FinGroupoid::cyclic_blocks(&[2, 2]);
        let l = GFunctor::new(x.clone(), a.clone(), vec![0, 1], vec![0, 1, 2, 2]).unwrap();
        let r = GFunctor::new(x.clone(), b.clone(), vec![0, 0], vec![0, 2, 0, 2]).unwrap();
        let s = Span::from_functors(&l, &r);
        let h = GFunctor::new(b.clone(), a.clone(), vec![0], vec![0, 1, 0, 1]).unwrap();
        let slow = span_compose(&l_embed(&h), &s).unwrap();
        let fast = whisker_l(&h, &s).unwrap();
        assert!(span_equiv(&fast, &slow, &mut budget()).unwrap().is_some());
    }

    fn two_to_one() -> Span {
        let d2 = FinGroupoid::discrete(2);
        let t = GFunctor::to_unit(&d2);
        Span::from_functors(&t, &t)
    }

    #[test]
    fn matrix_product() {
        let s = two_to_one();
        let c = span_compose(&s, &s).unwrap();
        assert_eq!(c.apex, FinGroupoid::discrete(4));
    }

    #[test]
    fn units() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let bz2 = FinGroupoid::cyclic(2);
        let f = GFunctor::new(a.clone(), bz2.clone(), vec![0, 0], vec![0, 1, 0]).unwrap();
        let s = l_embed(&f);
        let c = span_compose(&span_id(&bz2), &s).unwrap();
        assert!(span_equiv(&c, &s, &mut budget()).unwrap().unwrap().recheck(&c, &s));
        let c = span_compose(&s, &span_id(&a)).unwrap();
        assert!(span_equiv(&c, &s, &mut budget()).unwrap().is_some());
        assert_eq!(l_embed(&GFunctor::identity(&a)), span_id(&a));
        assert_eq!(dualize(&l_embed(&f)), r_embed(&f));
        assert_eq!(dualize(&span_id(&a)), span_id(&a));
    }

    #[test]
    fn endpoint_mismatch() {
        let s = two_to_one();
        let t = span_id(&FinGroupoid::discrete(2));
        assert!(matches!(span_compose(&t, &s), Err(Error::Mismatch(_))));
    }

    #[test]
    fn pairing_projects_back() {
        let s = two_to_one();
        let t = span_id(&FinGroupoid::discrete(1));
        let p = pairing(&s, &t).unwrap();
        let (p1, p2) = projections(&s.right.base, &t.right.base);
        let back1 = span_compose(&p1, &p).unwrap();
        let back2 = span_compose(&p2, &p).unwrap();
        assert!(span_equiv(&back1, &s, &mut budget()).unwrap().is_some());
        assert!(span_equiv(&back2, &t, &mut budget()).unwrap().is_some());
        assert_eq!(terminal_span(&FinGroupoid::discrete(3)).apex, FinGroupoid::empty());
    }

    #[test]
    fn tensor_multiplies() {
        let s = two_to_one();
        let t = tensor(&s, &s).unwrap();
        assert_eq!(t.apex.object_count(), 4);
        let u = tensor(&s, &span_id(&FinGroupoid::unit())).unwrap();
        let unit_l = span_compose(
            &l_embed(&product(&FinGroupoid::unit(), &FinGroupoid::unit()).proj1),
            &u,
        )
        .unwrap();
        let unit_l = span_compose(
            &unit_l,
            &l_embed(&product(&FinGroupoid::unit(), &FinGroupoid::unit()).pair(
                &GFunctor::identity(&FinGroupoid::unit()),
                &GFunctor::identity(&FinGroupoid::unit()),
            )),
        )
        .unwrap();
        assert!(span_equiv(&unit_l, &s, &mut budget()).unwrap().is_some());
    }

    #[test]
    fn curry_round_trip() {
        let a = FinGroupoid::discrete(2);
        let b = FinGroupoid::cyclic(2);
        let ab = product(&a, &b);
        let c = FinGroupoid::discrete(1);
        let s = Span::from_functors(&GFunctor::identity(&ab.groupoid), &GFunctor::to_unit(&ab.groupoid));
        let cu = curry(&s, &a, &b).unwrap();
        assert_eq!(uncurry(&cu, &b, &c).unwrap(), s);
    }

    #[test]
    fn snakes() {
        for a in [FinGroupoid::discrete(2), FinGroupoid::cyclic(2), FinGroupoid::unit()] {
            for s in [snake_left(&a).unwrap(), snake_right(&a).unwrap()] {
                let w = span_equiv(&s, &span_id(&a), &mut budget()).unwrap();
                assert!(w.is_some_and(|w| w.recheck(&s, &span_id(&a))));
            }
        }
        let (unit, _) = compact_structure(&FinGroupoid::unit());
        assert_eq!(unit.apex, FinGroupoid::unit());
    }

    #[test]
    fn gcard_fast_path() {
        let s = two_to_one();
        let d1 = FinGroupoid::discrete(1);
        let t = span_id(&d1);
        assert!(span_equiv(&s, &t, &mut budget()).unwrap().is_none());
    }

    #[test]
    fn canonical_forms() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let bz2 = FinGroupoid::cyclic(2);
        let f = GFunctor::new(a.clone(), bz2.clone(), vec![0, 0], vec![0, 1, 0]).unwrap();
        let s = l_embed(&f);
        let c1 = canonical_form(&s, &mut budget()).unwrap();
        let c2 = canonical_form(&span_compose(&s, &span_id(&a)).unwrap(), &mut budget()).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(canonical_form(&c1, &mut budget()).unwrap(), c1);
        assert!(span_equiv(&c1, &s, &mut budget()).unwrap().is_some());
        // two labelings of the same discrete span
        let d2 = FinGroupoid::discrete(2);
        let swap = GFunctor::new(d2.clone(), d2.clone(), vec![1, 0], vec![1, 0]).unwrap();
        let t1 = Span::from_functors(&GFunctor::identity(&d2), &GFunctor::to_unit(&d2));
        let t2 = Span::from_functors(&swap, &GFunctor::to_unit(&d2));
        assert_eq!(
            canonical_form(&t1, &mut budget()).unwrap(),
            canonical_form(&t2, &mut budget()).unwrap()
        );
    }
}
