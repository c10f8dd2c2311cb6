//! Polynomials `I ← E → B → J` between finite groupoids.

use crate::effective::Mapping;
use crate::equiv::{equivalence_over, skeletalize, Budget, EquivalenceWitness};
use crate::error::{Error, Result};
use crate::gpd::{FinGroupoid, GFunctor};
use crate::limits::{dependent_product, fiber_family, grothendieck, hfiber, FamilyOfGroupoids};
use crate::span::{span_equiv, Span};

/// `I ←s– E –p→ B –t→ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub i: FinGroupoid,
    pub j: FinGroupoid,
    pub e: FinGroupoid,
    pub b: FinGroupoid,
    pub s: GFunctor,
    pub p: GFunctor,
    pub t: GFunctor,
}

impl Polynomial {
    /// Checks that the three maps are functors with matching ends.
    pub fn new(s: GFunctor, p: GFunctor, t: GFunctor) -> Result<Self> {
        if s.domain != p.domain {
            return Err(Error::schema("/p", "s and p must share their domain E"));
        }
        if p.codomain != t.domain {
            return Err(Error::schema("/t", "the codomain of p must be the domain of t"));
        }
        for (name, f) in [("s", &s), ("p", &p), ("t", &t)] {
            if let Some(v) = f.check().into_iter().next() {
                return Err(Error::Invalid(format!("{name}: {v}")));
            }
        }
        Ok(Polynomial {
            i: s.codomain.clone(),
            j: t.codomain.clone(),
            e: s.domain.clone(),
            b: t.domain.clone(),
            s,
            p,
            t,
        })
    }

    /// The monomial `x^n` over `𝟙`.
    pub fn monomial(n: usize) -> Self {
        let e = FinGroupoid::discrete(n);
        let one = FinGroupoid::unit();
        Polynomial::new(
            GFunctor::to_unit(&e),
            GFunctor::to_unit(&e),
            GFunctor::identity(&one),
        )
        .expect("monomial")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arity {
    /// Every fiber of `p` is contractible.
    Linear,
    /// Every fiber is empty or contractible.
    Affine,
    /// Every fiber is a finite set.
    Finitary,
    /// Some fiber has an object with a nontrivial automorphism, so it is not
    /// a finite set and cannot be the carrier of a bag.
    NotFinitary,
}

/// The homotopy fiber of `p` over one object of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub base: usize,
    /// Number of isomorphism classes.
    pub classes: usize,
    /// Largest automorphism group in the fiber.
    pub max_automorphisms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityClass {
    pub class: Arity,
    pub fibers: Vec<FiberReport>,
}

impl ArityClass {
    pub fn is_linear(&self) -> bool {
        self.class == Arity::Linear
    }

    pub fn is_affine(&self) -> bool {
        self.class <= Arity::Affine
    }

    pub fn is_finitary(&self) -> bool {
        self.class <= Arity::Finitary
    }
}

pub fn classify_arity(poly: &Polynomial) -> ArityClass {
    let m = Mapping::from(&poly.p);
    let fibers: Vec<FiberReport> = poly
        .b
        .objects()
        .map(|b| {
            let f = hfiber(&poly.b, &poly.e, &m, &b).groupoid;
            let reps = f.class_representatives();
            FiberReport {
                base: b,
                classes: reps.len(),
                max_automorphisms: reps.iter().map(|&r| f.hom(r, r).len()).max().unwrap_or(1),
            }
        })
        .collect();
    let class = if fibers.iter().any(|f| f.max_automorphisms > 1) {
        Arity::NotFinitary
    } else if fibers.iter().all(|f| f.classes == 1) {
        Arity::Linear
    } else if fibers.iter().all(|f| f.classes <= 1) {
        Arity::Affine
    } else {
        Arity::Finitary
    };
    ArityClass { class, fibers }
}

pub fn poly_id(a: &FinGroupoid) -> Polynomial {
    let id = GFunctor::identity(a);
    Polynomial::new(id.clone(), id.clone(), id).expect("identity polynomial")
}

/// `Q ∘ P` for `P : I → J` and `Q : J → K`.
///
/// With `Q = (J ←u– F –q→ C –v→ K)`, the middle groupoid is
/// `D = Σ_{c:C} Π_{x:F_c} B_{u(x)}` and the top one is
/// `Σ_{(c,α):D} Σ_{x:F_c} E_{α(x)}`.
pub fn poly_compose(q: &Polynomial, p: &Polynomial) -> Result<Polynomial> {
    if p.j != q.i {
        return Err(Error::Mismatch("the target of the first polynomial is not the source of the second".into()));
    }
    let c = &q.b;
    // B_j = hfiber(t, j), transported by post-composition
    let (fam_b, fib_b) = fiber_family(&p.t);
    let dp = dependent_product(&q.p, &GFunctor::identity(c), &fam_b.pullback(&q.s))?;
    let d = grothendieck(&dp.family);
    // both total spaces project by opfibrations, so restricting them to
    // skeletons gives an equivalent polynomial
    let ds = skeletalize(&d.groupoid).1.functor;
    let d_proj = d.proj.after(&ds);
    // Σ_{d} F_{c(d)}
    let (fam_f, _) = fiber_family(&q.p);
    let g1 = grothendieck(&fam_f.pullback(&d_proj));
    // the B-object α(x) picked by each (d, x), as a functor G1 → B
    let pick_obj = |(dd, z): (usize, usize)| -> usize {
        let (cc, sec) = d.points[ds.obj[dd]];
        let section = &dp.sections[cc].objects[sec];
        let j = q.s.obj[dp.fibers[cc].points[z].0];
        fib_b[j].points[section.x[z]].0
    };
    let phi_obj: Vec<usize> = g1.points.iter().map(|&pt| pick_obj(pt)).collect();
    let phi_arr: Vec<usize> = g1
        .groupoid
        .arrows()
        .map(|a| {
            let (wd, wf) = g1.arrows[a];
            let wd = ds.arr[wd];
            let (beta, m) = d.arrows[wd];
            let c1 = c.dst(beta);
            let (_, z) = g1.points[g1.groupoid.src(a)];
            let tz = fam_f.transport[beta].obj[z];
            let sec1 = &dp.sections[c1];
            let fib1 = &dp.fibers[c1];
            // m[T_β z] : σ(z) → σ'(T_β z) in B_{u(T_β z)}
            let under_m = fib_b[q.s.obj[fib1.points[tz].0]].under[sec1.arrows[m][tz]];
            // α'_w : T_w(σ'(T_β z)) → σ'(z') in B_{u(z')}
            let dst_sec = d.points[d.groupoid.dst(wd)].1;
            let alpha = sec1.objects[dst_sec].alpha[wf];
            let z1 = fib1.groupoid.dst(wf);
            let under_a = fib_b[q.s.obj[fib1.points[z1].0]].under[alpha];
            p.b.compose(under_a, under_m)
        })
        .collect();
    let phi = GFunctor {
        domain: g1.groupoid.clone(),
        codomain: p.b.clone(),
        obj: phi_obj,
        arr: phi_arr,
    };
    debug_assert!(phi.check().is_empty(), "{:?}", phi.check());
    let gs = skeletalize(&g1.groupoid).1.functor;
    let phi = phi.after(&gs);
    let (fam_e, fib_e) = fiber_family(&p.p);
    let fam_top = fam_e.pullback(&phi);
    let top = grothendieck(&fam_top);
    let s_top = GFunctor {
        domain: top.groupoid.clone(),
        codomain: p.i.clone(),
        obj: top
            .points
            .iter()
            .map(|&(g, y)| p.s.obj[fib_e[phi.obj[g]].points[y].0])
            .collect(),
        arr: top
            .groupoid
            .arrows()
            .map(|a| {
                let (w, m) = top.arrows[a];
                let g2 = gs.domain.dst(w);
                p.s.arr[fib_e[phi.obj[g2]].under[m]]
            })
            .collect(),
    };
    let p_top = GFunctor {
        domain: top.groupoid.clone(),
        codomain: ds.domain.clone(),
        obj: top.proj.obj.iter().map(|&g| g1.proj.obj[gs.obj[g]]).collect(),
        arr: top.proj.arr.iter().map(|&g| g1.proj.arr[gs.arr[g]]).collect(),
    };
    let t_top = q.t.after(&d_proj);
    Polynomial::new(s_top, p_top, t_top)
}

/// `F_P(X)(j) = Σ_{b : B_j} Π_{e : E_b} X(s(e))` for a strict family `X`
/// over `I`.
pub fn eval_at(poly: &Polynomial, x: &FamilyOfGroupoids, j: usize) -> Result<FinGroupoid> {
    if j >= poly.j.object_count() {
        return Err(Error::Invalid(format!("object {j} is not in J")));
    }
    if x.base != poly.i {
        return Err(Error::Mismatch("family is not over the source of the polynomial".into()));
    }
    let k = hfiber(&poly.j, &poly.b, &Mapping::from(&poly.t), &j);
    let incl = k.inclusion(&poly.b);
    let dp = dependent_product(&poly.p, &incl, &x.pullback(&poly.s))?;
    Ok(grothendieck(&dp.family).groupoid)
}

/// The linear polynomial `(X, X, f, id, g)` of a span `f, g` out of `X`.
pub fn linear_from_span(s: &Span) -> Result<Polynomial> {
    if !s.is_concrete() {
        return Err(Error::Unsupported("linear_from_span needs concrete endpoints".into()));
    }
    Polynomial::new(s.left_functor(), GFunctor::identity(&s.apex), s.right_functor())
}

/// The span `I ← E → J` of a linear polynomial.
pub fn span_from_linear(poly: &Polynomial) -> Result<Span> {
    let a = classify_arity(poly);
    if !a.is_linear() {
        let bad = a.fibers.iter().find(|f| f.classes != 1 || f.max_automorphisms != 1).expect("some fiber");
        return Err(Error::NotLinear {
            base: bad.base,
            classes: bad.classes,
        });
    }
    Ok(Span::from_functors(&poly.s, &poly.t.after(&poly.p)))
}

/// Equivalences `E1 ≃ E2` and `B1 ≃ B2` commuting with `s`, `p`, `t` up to
/// natural isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyEquivWitness {
    pub on_b: EquivalenceWitness,
    pub on_e: EquivalenceWitness,
    /// `t2(h_B b) → t1(b)`.
    pub over_j: Vec<usize>,
    /// `(s2(h_E e) → s1(e), p2(h_E e) → h_B(p1(e)))`.
    pub over_e: Vec<(usize, usize)>,
}

impl PolyEquivWitness {
    pub fn recheck(&self, p1: &Polynomial, p2: &Polynomial) -> bool {
        let (hb, he) = (&self.on_b.functor, &self.on_e.functor);
        if !self.on_b.recheck() || !self.on_e.recheck() {
            return false;
        }
        if hb.domain != p1.b || hb.codomain != p2.b || he.domain != p1.e || he.codomain != p2.e {
            return false;
        }
        let nat = |cod: &FinGroupoid, f1: &GFunctor, f2h: &GFunctor, comps: &[usize]| -> bool {
            let dom = &f1.domain;
            dom.objects().all(|x| {
                let c = comps[x];
                cod.src(c) == f2h.obj[x] && cod.dst(c) == f1.obj[x]
            }) && dom.arrows().all(|u| {
                cod.compose(f1.arr[u], comps[dom.src(u)]) == cod.compose(comps[dom.dst(u)], f2h.arr[u])
            })
        };
        let s_comps: Vec<usize> = self.over_e.iter().map(|c| c.0).collect();
        let p_comps: Vec<usize> = self.over_e.iter().map(|c| c.1).collect();
        nat(&p1.j, &p1.t, &p2.t.after(hb), &self.over_j)
            && nat(&p1.i, &p1.s, &p2.s.after(he), &s_comps)
            && nat(&p2.b, &hb.after(&p1.p), &p2.p.after(he), &p_comps)
    }
}

/// Decides whether two finitary polynomials with the same ends are
/// equivalent.
pub fn poly_equiv(p1: &Polynomial, p2: &Polynomial, budget: &mut Budget) -> Result<Option<PolyEquivWitness>> {
    if p1.i != p2.i || p1.j != p2.j {
        return Err(Error::Mismatch("polynomials have different ends".into()));
    }
    for p in [p1, p2] {
        let a = classify_arity(p);
        if let Some(f) = a.fibers.iter().find(|f| f.max_automorphisms > 1) {
            return Err(Error::NotFinitary(f.base));
        }
    }
    // A finitary polynomial is determined up to equivalence by its span
    // !I ← B → J; an equivalence of those fixes h_B.
    let k1 = crate::kleisli::poly_to_span(p1)?;
    let k2 = crate::kleisli::poly_to_span(p2)?;
    let Some(w) = span_equiv(&k1.carrier, &k2.carrier, budget)? else {
        return Ok(None);
    };
    let hb = w.equivalence.functor.clone();
    let over_j: Vec<usize> = w.tri_r.iter().map(|m| m.as_base().expect("concrete")).collect();
    // E-level: equivalence over I × B2 of (s1, h_B p1) and (s2, p2)
    let pair = crate::effective::Pair(p1.i.clone(), p2.b.clone());
    let f1 = Mapping::from(&p1.s).zip(&Mapping::from(&hb.after(&p1.p)));
    let f2 = Mapping::from(&p2.s).zip(&Mapping::from(&p2.p));
    let Some(we) = equivalence_over(&pair, &p1.e, &f1, &p2.e, &f2, budget)? else {
        return Err(Error::Invalid(
            "span-equivalent finitary polynomials without an equivalence of their E parts".into(),
        ));
    };
    Ok(Some(PolyEquivWitness {
        on_b: w.equivalence,
        on_e: we.equivalence,
        over_j,
        over_e: we.components,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{find_equivalence, gcard};
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// The symmetric square: `Z2` acting on two points by swapping.
    fn symmetric_square() -> Polynomial {
        let e = FinGroupoid::indiscrete(2);
        let b = FinGroupoid::cyclic(2);
        // indiscrete(2) arrows: one per ordered pair; the swaps map to σ
        let p = GFunctor {
            domain: e.clone(),
            codomain: b.clone(),
            obj: vec![0, 0],
            arr: e.arrows().map(|a| usize::from(e.src(a) != e.dst(a))).collect(),
        };
        assert!(p.check().is_empty());
        Polynomial::new(GFunctor::to_unit(&e), p, GFunctor::to_unit(&b)).unwrap()
    }

    #[test]
    fn arity_examples() {
        assert!(classify_arity(&poly_id(&FinGroupoid::cyclic(2))).is_linear());
        let sq = classify_arity(&Polynomial::monomial(2));
        assert_eq!(sq.class, Arity::Finitary);
        assert_eq!(sq.fibers[0].classes, 2);
        assert_eq!(classify_arity(&Polynomial::monomial(0)).class, Arity::Affine);
        assert_eq!(classify_arity(&symmetric_square()).class, Arity::Finitary);
    }

    #[test]
    fn monomial_composition() {
        let c = poly_compose(&Polynomial::monomial(3), &Polynomial::monomial(2)).unwrap();
        assert_eq!(c.e.object_count(), 6);
        assert!(find_equivalence(&c.b, &FinGroupoid::unit(), &mut Budget::default()).unwrap().is_some());
        assert!(poly_equiv(&c, &Polynomial::monomial(6), &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn evaluation() {
        let x = FamilyOfGroupoids::constant(&FinGroupoid::unit(), &FinGroupoid::discrete(3));
        assert_eq!(gcard(&eval_at(&Polynomial::monomial(2), &x, 0).unwrap()), rat(9, 1));
        let x2 = FamilyOfGroupoids::constant(&FinGroupoid::unit(), &FinGroupoid::discrete(2));
        assert_eq!(gcard(&eval_at(&symmetric_square(), &x2, 0).unwrap()), rat(2, 1));
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let fam = FamilyOfGroupoids::constant(&a, &FinGroupoid::discrete(2));
        for j in a.objects() {
            let v = eval_at(&poly_id(&a), &fam, j).unwrap();
            assert!(find_equivalence(&v, &fam.fibers[j], &mut Budget::default()).unwrap().is_some());
        }
        assert!(eval_at(&poly_id(&a), &fam, 7).is_err());
    }

    #[test]
    fn units_and_linear() {
        let mut budget = Budget::default();
        let sq = symmetric_square();
        let one = FinGroupoid::unit();
        let l = poly_compose(&sq, &poly_id(&one)).unwrap();
        let w = poly_equiv(&l, &sq, &mut budget).unwrap().unwrap();
        assert!(w.recheck(&l, &sq));
        let r = poly_compose(&poly_id(&one), &sq).unwrap();
        assert!(poly_equiv(&r, &sq, &mut budget).unwrap().is_some());
        assert!(poly_equiv(&Polynomial::monomial(2), &Polynomial::monomial(3), &mut budget)
            .unwrap()
            .is_none());
        let a = FinGroupoid::cyclic(2);
        assert_eq!(linear_from_span(&crate::span::span_id(&a)).unwrap(), poly_id(&a));
        assert!(matches!(span_from_linear(&Polynomial::monomial(2)), Err(Error::NotLinear { .. })));
    }
}
