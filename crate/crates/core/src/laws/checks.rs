//! One instance builder per catalog entry.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::gen::{blocks_json, functor_json, Blocks, Gen};
use super::ops::{identity_at, PullbackIndex};
use super::{Claim, Exact, Instance, LawId, Ops, SuiteConfig};
use crate::bang::{
    bags_of, bang_materialize, bang_materialize_sorted, bang_mapping_mor, bang_mapping_obj, bang_mor, bang_obj, epsilon,
    eta, eta_mor, eta_obj, seely0_obj, BagMorphism, Endpoint, Mor, Obj,
};
use crate::effective::{materialize, Effective, Mapping, Materialized, Pair};
use crate::equiv::gcard;
use crate::error::{Error, Result};
use crate::gpd::{coproduct, product, FinGroupoid, GFunctor, NatIso};
use crate::json::{mor_to_json, obj_to_json, Artifact};
use crate::kleisli::{kleisli_compose, kleisli_compose_general, poly_to_span, span_to_poly, KleisliMorphism};
use crate::limits::{fiber_family, grothendieck, hfiber};
use crate::poly::{poly_compose, poly_id};
use crate::span::{
    curry, dualize, l_embed, leg_of, pairing, projections, r_embed, snake_left, snake_right, span_id, terminal_span,
    uncurry, Span,
};

pub(super) fn build(law: LawId, g: &mut Gen, cfg: &SuiteConfig, ops: &Ops) -> Result<Instance> {
    let mut b = Builder {
        g,
        cfg,
        ops,
        inputs: serde_json::Map::new(),
        claims: Vec::new(),
    };
    match law {
        LawId::SpanAssoc => b.span_assoc()?,
        LawId::SpanUnit => b.span_unit()?,
        LawId::SpanFunctorLift => b.span_functor_lift()?,
        LawId::SpanNatLift => b.span_nat_lift()?,
        LawId::ProductUp => b.product_up()?,
        LawId::Terminal => b.terminal()?,
        LawId::CurryRoundtrip => b.curry_roundtrip()?,
        LawId::Snake => b.snake()?,
        LawId::MonadTriangles => b.monad_triangles(),
        LawId::MonadSquare => b.monad_square(),
        LawId::EtaNatural => b.eta_natural(),
        LawId::MuNatural => b.mu_natural(),
        LawId::EtaCartesian => b.eta_cartesian()?,
        LawId::MuCartesian => b.mu_cartesian()?,
        LawId::BangPreservesPullback => b.bang_preserves_pullback()?,
        LawId::SeelySquare => b.seely_square(),
        LawId::Monoidal1 => b.monoidal_1(),
        LawId::Monoidal2 => b.monoidal_2(),
        LawId::Monoidal3 => b.monoidal_3(),
        LawId::Monoidal4 => b.monoidal_4(),
        LawId::KleisliUnit => b.kleisli_unit()?,
        LawId::KleisliPolyEquiv => b.kleisli_poly_equiv()?,
        LawId::FiberedIndexedRoundtrip => b.fibered_indexed_roundtrip()?,
        LawId::GcardMultiplicative => b.gcard_multiplicative(),
    }
    Ok(Instance {
        inputs: Value::Object(b.inputs),
        claims: b.claims,
    })
}

/// Random arrows sampled per exact law.
const ARROW_SAMPLES: usize = 64;
/// Inner and outer bag bounds for the `!!` laws.
const K2: usize = 2;

struct Builder<'a> {
    g: &'a mut Gen,
    cfg: &'a SuiteConfig,
    ops: &'a Ops,
    inputs: serde_json::Map<String, Value>,
    claims: Vec<Claim>,
}

fn leaves(a: &FinGroupoid) -> Vec<Obj> {
    a.objects().map(Obj::Base).collect()
}

fn arrow_index(m: &Materialized<Obj, Mor>) -> HashMap<Mor, usize> {
    m.arrows.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect()
}

fn dedup(mut xs: Vec<Obj>) -> Vec<Obj> {
    xs.sort();
    xs.dedup();
    xs
}

fn total_size(x: &Obj) -> usize {
    x.as_bag()
        .map_or(1, |b| b.colors.iter().map(|c| c.as_bag().map_or(1, |i| i.colors.len())).sum())
}

fn rational(q: &BigRational) -> Value {
    json!(q.to_string())
}

impl Builder<'_> {
    fn base(&mut self, name: &str) -> Blocks {
        let b = self.g.blocks(self.cfg.max_objects, 4, self.cfg.max_arrows);
        self.inputs.insert(name.into(), blocks_json(&b));
        b
    }

    /// A base of at most two objects with groups of order at most two.
    fn small(&mut self, name: &str) -> Blocks {
        let b = self.g.blocks(self.cfg.max_objects.min(2), 2, self.cfg.max_arrows);
        self.inputs.insert(name.into(), blocks_json(&b));
        b
    }

    fn functor(&mut self, name: &str, a: &Blocks, b: &Blocks) -> GFunctor {
        let f = self.g.functor(a, b);
        self.inputs.insert(name.into(), functor_json(&f));
        f
    }

    fn span(&mut self, name: &str, a: &Blocks, b: &Blocks) -> Span {
        let s = self.g.span(a, b, 2, 2);
        self.inputs.insert(name.into(), s.to_json());
        s
    }

    fn equiv(&mut self, what: &str, lhs: Span, rhs: Span) {
        self.claims.push(Claim::SpanEquiv {
            what: what.into(),
            lhs,
            rhs,
        });
    }

    fn exact(&mut self, e: Exact) {
        self.claims.push(e.done());
    }

    // ---- spans ----

    fn span_assoc(&mut self) -> Result<()> {
        let bs: Vec<Blocks> = ["A", "B", "C", "D"].iter().map(|n| self.small(n)).collect();
        let f = self.span("f", &bs[0], &bs[1]);
        let g = self.span("g", &bs[1], &bs[2]);
        let h = self.span("h", &bs[2], &bs[3]);
        let o = self.ops;
        let lhs = o.compose(&o.compose(&h, &g)?, &f)?;
        let rhs = o.compose(&h, &o.compose(&g, &f)?)?;
        self.equiv("(h ∘ g) ∘ f ≃ h ∘ (g ∘ f)", lhs, rhs);
        Ok(())
    }

    fn span_unit(&mut self) -> Result<()> {
        let a = self.base("A");
        let b = self.base("B");
        let f = self.span("f", &a, &b);
        let o = self.ops;
        self.equiv("id ∘ f ≃ f", o.compose(&span_id(&b.g), &f)?, f.clone());
        self.equiv("f ∘ id ≃ f", o.compose(&f, &span_id(&a.g))?, f);
        Ok(())
    }

    fn span_functor_lift(&mut self) -> Result<()> {
        let a = self.base("A");
        let b = self.base("B");
        let c = self.base("C");
        let f = self.functor("f", &a, &b);
        let h = self.functor("g", &b, &c);
        let o = self.ops;
        let hf = h.after(&f);
        self.equiv("L(g ∘ f) ≃ L(g) ∘ L(f)", l_embed(&hf), o.compose(&l_embed(&h), &l_embed(&f))?);
        self.equiv("R(g ∘ f) ≃ R(f) ∘ R(g)", r_embed(&hf), o.compose(&r_embed(&f), &r_embed(&h))?);
        self.equiv("L(id) ≃ id", l_embed(&GFunctor::identity(&a.g)), span_id(&a.g));
        let mut e = Exact::new("dual of L(f) is R(f)");
        e.eq(&dualize(&l_embed(&f)), &r_embed(&f), |s| s.to_json());
        self.exact(e);
        Ok(())
    }

    fn span_nat_lift(&mut self) -> Result<()> {
        let a = self.base("A");
        let b = self.base("B");
        let f = self.functor("f", &a, &b);
        // two copies of f, a codiscrete step apart
        let two = FinGroupoid::indiscrete(2);
        let bt = product(&b.g, &two);
        let constant = |j: usize| GFunctor {
            domain: a.g.clone(),
            codomain: two.clone(),
            obj: vec![j; a.g.object_count()],
            arr: vec![two.identity(j); a.g.arrow_count()],
        };
        let f0 = bt.pair(&f, &constant(0));
        let f1 = bt.pair(&f, &constant(1));
        let step = two.hom(0, 1)[0];
        let alpha = NatIso {
            source: f0.clone(),
            target: f1.clone(),
            components: a.g.objects().map(|x| bt.arrow(b.g.identity(f.obj[x]), step)).collect(),
        };
        let mut e = Exact::new("the components form a natural isomorphism");
        let problems = alpha.check();
        e.holds(problems.is_empty(), || (json!(problems), json!([])));
        self.exact(e);
        self.equiv("L(f) ≃ L(f')", l_embed(&f0), l_embed(&f1));
        self.equiv("R(f) ≃ R(f')", r_embed(&f0), r_embed(&f1));
        Ok(())
    }

    fn product_up(&mut self) -> Result<()> {
        let x = self.small("X");
        let a = self.small("A");
        let b = self.small("B");
        let f = self.span("f", &x, &a);
        let h = self.span("g", &x, &b);
        let o = self.ops;
        let (p1, p2) = projections(&a.g, &b.g);
        let pair = pairing(&f, &h)?;
        self.equiv("π1 ∘ ⟨f, g⟩ ≃ f", o.compose(&p1, &pair)?, f);
        self.equiv("π2 ∘ ⟨f, g⟩ ≃ g", o.compose(&p2, &pair)?, h);
        let orders: Vec<usize> = a.orders.iter().chain(&b.orders).copied().collect();
        let ab = Blocks::new(&orders);
        if ab.g != coproduct(&a.g, &b.g).groupoid {
            return Err(Error::Invalid("block coproduct layout changed".into()));
        }
        let q = self.span("q", &x, &ab);
        let back = pairing(&o.compose(&p1, &q)?, &o.compose(&p2, &q)?)?;
        self.equiv("⟨π1 ∘ q, π2 ∘ q⟩ ≃ q", back, q);
        Ok(())
    }

    fn terminal(&mut self) -> Result<()> {
        let x = self.base("X");
        let y = self.base("Y");
        let s = self.span("s", &x, &y);
        let t = terminal_span(&x.g);
        let mut e = Exact::new("the span into ∅ has an empty apex");
        e.eq(&(t.apex.object_count(), t.right.base.object_count()), &(0, 0), |p| json!([p.0, p.1]));
        self.exact(e);
        self.equiv("! ∘ s ≃ !", self.ops.compose(&terminal_span(&y.g), &s)?, t);
        Ok(())
    }

    fn curry_roundtrip(&mut self) -> Result<()> {
        let a = self.small("A");
        let b = self.small("B");
        let c = self.small("C");
        let s = self.g.span_into_product(&a, &b, &c, true);
        let t = self.g.span_into_product(&b, &c, &a, false);
        self.inputs.insert("s".into(), s.to_json());
        self.inputs.insert("t".into(), t.to_json());
        let s2 = uncurry(&curry(&s, &a.g, &b.g)?, &b.g, &c.g)?;
        self.equiv("uncurry(curry(s)) ≃ s", s2, s);
        let t2 = curry(&uncurry(&t, &b.g, &c.g)?, &a.g, &b.g)?;
        self.equiv("curry(uncurry(t)) ≃ t", t2, t);
        Ok(())
    }

    fn snake(&mut self) -> Result<()> {
        let a = self.base("A");
        self.equiv("left snake ≃ id", snake_left(&a.g)?, span_id(&a.g));
        self.equiv("right snake ≃ id", snake_right(&a.g)?, span_id(&a.g));
        Ok(())
    }

    // ---- the monad ----

    fn monad_triangles(&mut self) {
        let a = self.base("A");
        let k = self.cfg.bang_bound.min(3);
        let m = bang_materialize(&a.g, k);
        let et = eta(&a.g);
        let o = self.ops;
        let mut left = Exact::new("μ ∘ η! = id");
        let mut right = Exact::new("μ ∘ !η = id");
        for x in &m.objects {
            left.eq(&o.mu_obj(&eta_obj(x)), x, obj_to_json);
            right.eq(&o.mu_obj(&bang_mapping_obj(&et, x)), x, obj_to_json);
        }
        for u in &m.arrows {
            left.eq(&o.mu_mor(&eta_mor(u)), u, mor_to_json);
            right.eq(&o.mu_mor(&bang_mapping_mor(&et, u)), u, mor_to_json);
        }
        self.exact(left);
        self.exact(right);
    }

    fn monad_square(&mut self) {
        let a = self.small("A");
        let o = self.ops;
        let l1 = bags_of(&leaves(&a.g), K2);
        let l3 = bags_of(&bags_of(&l1, K2), K2);
        let bang_mu_obj = |x: &Obj| Obj::bag(x.as_bag().expect("bag").colors.iter().map(|c| o.mu_obj(c)).collect());
        let mut e = Exact::new("μ ∘ μ! = μ ∘ !μ");
        for x in &l3 {
            e.eq(&o.mu_obj(&o.mu_obj(x)), &o.mu_obj(&bang_mu_obj(x)), obj_to_json);
        }
        for _ in 0..ARROW_SAMPLES {
            let x = self.g.pick(&l3).clone();
            let (u, _) = self.g.arrow_from(&a.g, &x);
            let b = u.as_bag().expect("bag morphism");
            let bang_mu = Mor::Bag(BagMorphism {
                sigma: b.sigma.clone(),
                components: b.components.iter().map(|c| o.mu_mor(c)).collect(),
            });
            e.eq(&o.mu_mor(&o.mu_mor(&u)), &o.mu_mor(&bang_mu), mor_to_json);
        }
        self.exact(e);
    }

    fn eta_natural(&mut self) {
        let a = self.base("A");
        let b = self.base("B");
        let f = self.functor("f", &a, &b);
        let mut e = Exact::new("!f ∘ η = η ∘ f");
        for x in a.g.objects() {
            e.eq(&bang_obj(&f, &eta_obj(&Obj::Base(x))), &eta_obj(&Obj::Base(f.obj[x])), obj_to_json);
        }
        for u in a.g.arrows() {
            e.eq(&bang_mor(&f, &eta_mor(&Mor::Base(u))), &eta_mor(&Mor::Base(f.arr[u])), mor_to_json);
        }
        self.exact(e);
    }

    fn mu_natural(&mut self) {
        let a = self.small("A");
        let b = self.small("B");
        let f = self.functor("f", &a, &b);
        let o = self.ops;
        let l2 = bags_of(&bags_of(&leaves(&a.g), K2), K2);
        let mut e = Exact::new("!f ∘ μ = μ ∘ !!f");
        for x in &l2 {
            e.eq(&bang_obj(&f, &o.mu_obj(x)), &o.mu_obj(&bang_obj(&f, x)), obj_to_json);
        }
        for _ in 0..ARROW_SAMPLES {
            let x = self.g.pick(&l2).clone();
            let (u, _) = self.g.arrow_from(&a.g, &x);
            e.eq(&bang_mor(&f, &o.mu_mor(&u)), &o.mu_mor(&bang_mor(&f, &u)), mor_to_json);
        }
        self.exact(e);
    }

    /// Records a comparison functor, or the first point or arrow that falls
    /// outside the pullback.
    fn comparison(&mut self, what: &str, domain: &FinGroupoid, codomain: &FinGroupoid, obj: Vec<Option<usize>>, arr: Vec<Option<usize>>) {
        let mut e = Exact::new(format!("{what}: the comparison lands in the pullback"));
        for (i, x) in obj.iter().enumerate() {
            e.holds(x.is_some(), || (json!({"object": i}), json!(null)));
        }
        for (i, x) in arr.iter().enumerate() {
            e.holds(x.is_some(), || (json!({"arrow": i}), json!(null)));
        }
        let complete = obj.iter().chain(&arr).all(Option::is_some);
        self.exact(e);
        if complete {
            let obj = obj.into_iter().map(Option::unwrap).collect();
            let arr = arr.into_iter().map(Option::unwrap).collect();
            match GFunctor::new(domain.clone(), codomain.clone(), obj, arr) {
                Ok(functor) => self.claims.push(Claim::Equivalence {
                    what: format!("{what} (bounded)"),
                    functor,
                }),
                Err(err) => self.claims.push(Claim::Exact {
                    what: format!("{what}: comparison is well formed"),
                    checked: 1,
                    mismatch: Some((json!(err.to_string()), json!(null))),
                }),
            }
        }
    }

    fn eta_cartesian(&mut self) -> Result<()> {
        let a = self.base("A");
        let b = self.base("B");
        let f = self.functor("f", &a, &b);
        let k = self.cfg.bang_bound.min(2);
        let ba = bang_materialize_sorted(&a.g, k);
        let bang_f = Mapping {
            obj: ba.objects.iter().map(|x| bang_obj(&f, x)).collect(),
            arr: ba.arrows.iter().map(|u| bang_mor(&f, u)).collect(),
        };
        let pb = self.ops.hpullback(&Endpoint::bang(&b.g), &ba.groupoid, &bang_f, &b.g, &eta(&b.g));
        let idx = PullbackIndex::new(&pb);
        let arrows = arrow_index(&ba);
        let obj: Vec<Option<usize>> = a
            .g
            .objects()
            .map(|x| {
                let e = ba.index.get(&eta_obj(&Obj::Base(x)))?;
                let gamma = identity_at(&b.g, &eta_obj(&Obj::Base(f.obj[x])));
                idx.point(*e, f.obj[x], &gamma)
            })
            .collect();
        let arr: Vec<Option<usize>> = a
            .g
            .arrows()
            .map(|u| {
                let (s, d) = (obj[a.g.src(u)]?, obj[a.g.dst(u)]?);
                let m = arrows.get(&eta_mor(&Mor::Base(u)))?;
                idx.arrow(s, d, *m, f.arr[u])
            })
            .collect();
        self.comparison("A → !A ×_{!B} B", &a.g, &pb.groupoid, obj, arr);
        Ok(())
    }

    fn mu_cartesian(&mut self) -> Result<()> {
        let a = self.small("A");
        let b = self.small("B");
        let f = self.functor("f", &a, &b);
        let o = self.ops;
        let cap = self.cfg.bang_bound.max(1);
        let bounded = |g: &FinGroupoid| -> Vec<Obj> {
            bags_of(&bags_of(&leaves(g), K2), K2)
                .into_iter()
                .filter(|x| total_size(x) <= cap)
                .collect()
        };
        let xs = bounded(&a.g);
        let aa = materialize(&Endpoint::bangbang(&a.g), xs.clone());
        let flat: Vec<Obj> = xs.iter().map(|x| o.mu_obj(x)).collect();
        let ba = materialize(
            &Endpoint::bang(&a.g),
            dedup(bang_materialize_sorted(&a.g, cap).objects.into_iter().chain(flat.iter().cloned()).collect()),
        );
        let ys: Vec<Obj> = xs.iter().map(|x| bang_obj(&f, x)).collect();
        let bb = materialize(&Endpoint::bangbang(&b.g), dedup(bounded(&b.g).into_iter().chain(ys.iter().cloned()).collect()));
        let bang_f = Mapping {
            obj: ba.objects.iter().map(|x| bang_obj(&f, x)).collect(),
            arr: ba.arrows.iter().map(|u| bang_mor(&f, u)).collect(),
        };
        let mu_b = Mapping {
            obj: bb.objects.iter().map(|x| o.mu_obj(x)).collect(),
            arr: bb.arrows.iter().map(|u| o.mu_mor(u)).collect(),
        };
        let pb = o.hpullback(&Endpoint::bang(&b.g), &ba.groupoid, &bang_f, &bb.groupoid, &mu_b);
        let idx = PullbackIndex::new(&pb);
        let (arr_a, arr_b) = (arrow_index(&ba), arrow_index(&bb));
        let obj: Vec<Option<usize>> = xs
            .iter()
            .zip(&flat)
            .zip(&ys)
            .map(|((_, m), y)| {
                let gamma = identity_at(&b.g, &bang_obj(&f, m));
                idx.point(ba.index[m], bb.index[y], &gamma)
            })
            .collect();
        let arr: Vec<Option<usize>> = aa
            .groupoid
            .arrows()
            .map(|u| {
                let (s, d) = (obj[aa.groupoid.src(u)]?, obj[aa.groupoid.dst(u)]?);
                let m = &aa.arrows[u];
                idx.arrow(s, d, *arr_a.get(&o.mu_mor(m))?, *arr_b.get(&bang_mor(&f, m))?)
            })
            .collect();
        self.comparison("!!A → !A ×_{!B} !!B", &aa.groupoid, &pb.groupoid, obj, arr);
        Ok(())
    }

    fn bang_preserves_pullback(&mut self) -> Result<()> {
        let a = self.small("A");
        let b = self.small("B");
        let c = self.small("C");
        let f = self.functor("f", &a, &c);
        let h = self.functor("g", &b, &c);
        let k = self.cfg.bang_bound.min(2);
        let o = self.ops;
        let p0 = o.hpullback(&Endpoint::gpd(&c.g), &a.g, &leg_of(&f), &b.g, &leg_of(&h));
        let bp = bang_materialize_sorted(&p0.groupoid, k);
        let es: Vec<Obj> = bp.objects.iter().map(|w| bang_obj(&p0.proj1, w)).collect();
        let fs: Vec<Obj> = bp.objects.iter().map(|w| bang_obj(&p0.proj2, w)).collect();
        let side = |g: &FinGroupoid, extra: &[Obj]| {
            let objs = bang_materialize_sorted(g, k).objects.into_iter().chain(extra.iter().cloned());
            materialize(&Endpoint::bang(g), dedup(objs.collect()))
        };
        let (ba, bb) = (side(&a.g, &es), side(&b.g, &fs));
        let lift = |m: &Materialized<Obj, Mor>, f: &GFunctor| Mapping {
            obj: m.objects.iter().map(|x| bang_obj(f, x)).collect(),
            arr: m.arrows.iter().map(|u| bang_mor(f, u)).collect(),
        };
        let q = o.hpullback(&Endpoint::bang(&c.g), &ba.groupoid, &lift(&ba, &f), &bb.groupoid, &lift(&bb, &h));
        let idx = PullbackIndex::new(&q);
        let (arr_a, arr_b) = (arrow_index(&ba), arrow_index(&bb));
        let obj: Vec<Option<usize>> = bp
            .objects
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let pts = &w.as_bag().expect("bag").colors;
                let gamma = Mor::Bag(BagMorphism {
                    sigma: (0..pts.len()).collect(),
                    components: pts.iter().map(|p| p0.points[p.as_base().expect("leaf")].2.clone()).collect(),
                });
                idx.point(ba.index[&es[i]], bb.index[&fs[i]], &gamma)
            })
            .collect();
        let arr: Vec<Option<usize>> = bp
            .groupoid
            .arrows()
            .map(|u| {
                let (s, d) = (obj[bp.groupoid.src(u)]?, obj[bp.groupoid.dst(u)]?);
                let m = &bp.arrows[u];
                let u1 = *arr_a.get(&bang_mor(&p0.proj1, m))?;
                let u2 = *arr_b.get(&bang_mor(&p0.proj2, m))?;
                idx.arrow(s, d, u1, u2)
            })
            .collect();
        self.comparison("!(A ×_C B) → !A ×_{!C} !B", &bp.groupoid, &q.groupoid, obj, arr);
        Ok(())
    }

    // ---- Seely structure ----

    fn seely_square(&mut self) {
        let a = self.small("A");
        let b = self.small("B");
        let o = self.ops;
        let co = coproduct(&a.g, &b.g);
        let xs = bags_of(&bags_of(&leaves(&a.g), K2), K2);
        let ys = bags_of(&bags_of(&leaves(&b.g), K2), K2);
        let lhs_obj = |x: &Obj, y: &Obj| o.l2_obj(&o.mu_obj(x), &o.mu_obj(y), &co);
        let rhs_obj = |x: &Obj, y: &Obj| o.mu_obj(&o.l2_obj(x, y, &co));
        let lhs_mor = |u: &Mor, v: &Mor, y: &Obj| o.l2_mor(&o.mu_mor(u), &o.mu_mor(v), &o.mu_obj(y), &co);
        let rhs_mor = |u: &Mor, v: &Mor, y: &Obj| o.mu_mor(&o.l2_mor(u, v, y, &co));
        let mut e = Exact::new("l² ∘ (μ × μ) = μ ∘ !⟨!ι1, !ι2⟩ ∘ l²");
        for x in &xs {
            for y in &ys {
                e.eq(&lhs_obj(x, y), &rhs_obj(x, y), obj_to_json);
            }
        }
        for _ in 0..ARROW_SAMPLES {
            let x = self.g.pick(&xs).clone();
            let y = self.g.pick(&ys).clone();
            let (u, _) = self.g.arrow_from(&a.g, &x);
            let (v, _) = self.g.arrow_from(&b.g, &y);
            e.eq(&lhs_mor(&u, &v, &y), &rhs_mor(&u, &v, &y), mor_to_json);
        }
        self.exact(e);
        // both routes as spans out of a small piece of !!A × !!B
        let small = |zs: &[Obj], g: &mut Gen| -> Vec<Obj> {
            let mut c: Vec<Obj> = zs.iter().filter(|z| total_size(z) <= 2).cloned().collect();
            while c.len() > 3 {
                let i = g.below(c.len());
                c.remove(i);
            }
            c
        };
        let (sx, sy) = (small(&xs, self.g), small(&ys, self.g));
        let pairs: Vec<(Obj, Obj)> = sx.iter().flat_map(|x| sy.iter().map(move |y| (x.clone(), y.clone()))).collect();
        let src = Pair(Endpoint::bangbang(&a.g), Endpoint::bangbang(&b.g));
        let m = materialize(&src, pairs);
        let route = |obj: &dyn Fn(&Obj, &Obj) -> Obj, mor: &dyn Fn(&Mor, &Mor, &Obj) -> Mor| Span {
            left: Endpoint::bang(&co.groupoid),
            right: Endpoint::gpd(&m.groupoid),
            apex: m.groupoid.clone(),
            leg_l: Mapping {
                obj: m.objects.iter().map(|(x, y)| obj(x, y)).collect(),
                arr: m
                    .groupoid
                    .arrows()
                    .map(|i| {
                        let (u, v) = &m.arrows[i];
                        mor(u, v, &m.objects[m.groupoid.src(i)].1)
                    })
                    .collect(),
            },
            leg_r: leg_of(&GFunctor::identity(&m.groupoid)),
        };
        let l = route(&lhs_obj, &lhs_mor);
        let r = route(&rhs_obj, &rhs_mor);
        self.equiv("both routes around the square are equivalent spans", l, r);
    }

    fn bang_objects(&mut self, b: &Blocks) -> Vec<Obj> {
        bang_materialize_sorted(&b.g, self.cfg.bang_bound.min(2)).objects
    }

    fn monoidal_1(&mut self) {
        let (a, b, c) = (self.small("A"), self.small("B"), self.small("C"));
        let o = self.ops;
        let ab = coproduct(&a.g, &b.g);
        let ab_c = coproduct(&ab.groupoid, &c.g);
        let bc = coproduct(&b.g, &c.g);
        let a_bc = coproduct(&a.g, &bc.groupoid);
        let alpha = ab_c.copair(
            &ab.copair(&a_bc.inj1, &a_bc.inj2.after(&bc.inj1)),
            &a_bc.inj2.after(&bc.inj2),
        );
        let (xa, xb, xc) = (self.bang_objects(&a), self.bang_objects(&b), self.bang_objects(&c));
        let mut e = Exact::new("!α ∘ l² ∘ (l² × id) = l² ∘ (id × l²)");
        for x in &xa {
            for y in &xb {
                for z in &xc {
                    let lhs = bang_obj(&alpha, &o.l2_obj(&o.l2_obj(x, y, &ab), z, &ab_c));
                    let rhs = o.l2_obj(x, &o.l2_obj(y, z, &bc), &a_bc);
                    e.eq(&lhs, &rhs, obj_to_json);
                }
            }
        }
        for _ in 0..ARROW_SAMPLES {
            let (x, y, z) = (self.g.pick(&xa).clone(), self.g.pick(&xb).clone(), self.g.pick(&xc).clone());
            let (u, _) = self.g.arrow_from(&a.g, &x);
            let (v, _) = self.g.arrow_from(&b.g, &y);
            let (w, _) = self.g.arrow_from(&c.g, &z);
            let lhs = bang_mor(&alpha, &o.l2_mor(&o.l2_mor(&u, &v, &y, &ab), &w, &z, &ab_c));
            let rhs = o.l2_mor(&u, &o.l2_mor(&v, &w, &z, &bc), &o.l2_obj(&y, &z, &bc), &a_bc);
            e.eq(&lhs, &rhs, mor_to_json);
        }
        self.exact(e);
    }

    fn unitor(&mut self, right: bool) {
        let a = self.small("A");
        let o = self.ops;
        let empty = FinGroupoid::empty();
        let from_empty = GFunctor {
            domain: empty.clone(),
            codomain: a.g.clone(),
            obj: vec![],
            arr: vec![],
        };
        let id = GFunctor::identity(&a.g);
        let co = if right { coproduct(&a.g, &empty) } else { coproduct(&empty, &a.g) };
        let unitor = if right { co.copair(&id, &from_empty) } else { co.copair(&from_empty, &id) };
        let l0 = seely0_obj();
        let l0_id = identity_at(&empty, &l0);
        let xs = self.bang_objects(&a);
        let mut e = Exact::new(if right { "!ρ ∘ l² ∘ (id × l⁰) = ρ" } else { "!λ ∘ l² ∘ (l⁰ × id) = λ" });
        for x in &xs {
            let v = if right { o.l2_obj(x, &l0, &co) } else { o.l2_obj(&l0, x, &co) };
            e.eq(&bang_obj(&unitor, &v), x, obj_to_json);
        }
        for _ in 0..ARROW_SAMPLES {
            let x = self.g.pick(&xs).clone();
            let (u, _) = self.g.arrow_from(&a.g, &x);
            let v = if right { o.l2_mor(&u, &l0_id, &l0, &co) } else { o.l2_mor(&l0_id, &u, &x, &co) };
            e.eq(&bang_mor(&unitor, &v), &u, mor_to_json);
        }
        self.exact(e);
    }

    fn monoidal_2(&mut self) {
        self.unitor(true)
    }

    fn monoidal_3(&mut self) {
        self.unitor(false)
    }

    fn monoidal_4(&mut self) {
        let (a, b) = (self.small("A"), self.small("B"));
        let o = self.ops;
        let ab = coproduct(&a.g, &b.g);
        let ba = coproduct(&b.g, &a.g);
        let gamma = ab.copair(&ba.inj2, &ba.inj1);
        let target = Endpoint::bang(&ba.groupoid);
        let swap = |x: &Obj, y: &Obj| -> Mor {
            let (n, m) = (x.as_bag().expect("bag").colors.len(), y.as_bag().expect("bag").colors.len());
            let start = bang_obj(&gamma, &o.l2_obj(x, y, &ab));
            let colors = &start.as_bag().expect("bag").colors;
            Mor::Bag(BagMorphism {
                sigma: (0..n + m).map(|i| if i < n { m + i } else { i - n }).collect(),
                components: colors.iter().map(|c| identity_at(&ba.groupoid, c)).collect(),
            })
        };
        let (xa, xb) = (self.bang_objects(&a), self.bang_objects(&b));
        let mut e = Exact::new("the carrier swap is a natural isomorphism !γ ∘ l² ≅ l² ∘ γ");
        for x in &xa {
            for y in &xb {
                let w = swap(x, y);
                let lhs = bang_obj(&gamma, &o.l2_obj(x, y, &ab));
                let rhs = o.l2_obj(y, x, &ba);
                let ok = target.contains_mor(&w) && target.src(&w) == lhs && target.dst(&w) == rhs;
                e.holds(ok, || (json!({"swap": mor_to_json(&w), "from": obj_to_json(&lhs)}), obj_to_json(&rhs)));
            }
        }
        for _ in 0..ARROW_SAMPLES {
            let (x, y) = (self.g.pick(&xa).clone(), self.g.pick(&xb).clone());
            let (u, x2) = self.g.arrow_from(&a.g, &x);
            let (v, y2) = self.g.arrow_from(&b.g, &y);
            let lhs = target.compose(&swap(&x2, &y2), &bang_mor(&gamma, &o.l2_mor(&u, &v, &y, &ab)));
            let rhs = target.compose(&o.l2_mor(&v, &u, &x, &ba), &swap(&x, &y));
            e.eq(&lhs, &rhs, mor_to_json);
        }
        self.exact(e);
    }

    // ---- Kleisli and polynomials ----

    fn poly_ends(&mut self, name: &str) -> Blocks {
        let b = self.g.blocks(self.cfg.max_objects.min(3), 2, self.cfg.max_arrows);
        self.inputs.insert(name.into(), blocks_json(&b));
        b
    }

    fn polynomial(&mut self, name: &str, i: &Blocks, j: &Blocks) -> crate::poly::Polynomial {
        let fiber = self.cfg.bang_bound.min(3);
        let p = self.g.polynomial(i, j, self.cfg.max_objects.min(3), fiber);
        self.inputs.insert(name.into(), p.to_json());
        p
    }

    fn kleisli_unit(&mut self) -> Result<()> {
        let i = self.poly_ends("I");
        let j = self.poly_ends("J");
        let p = self.polynomial("P", &i, &j);
        let f = poly_to_span(&p)?;
        let (ei, ej) = (KleisliMorphism::identity(&i.g), KleisliMorphism::identity(&j.g));
        self.equiv("ε ∘ f ≃ f", kleisli_compose(&ej, &f)?.carrier, f.carrier.clone());
        self.equiv("f ∘ ε ≃ f", kleisli_compose(&f, &ei)?.carrier, f.carrier.clone());
        self.equiv("ε ∘ f ≃ f, through δ", kleisli_compose_general(&ej, &f)?.carrier, f.carrier.clone());
        self.equiv("f ∘ ε ≃ f, through δ", kleisli_compose_general(&f, &ei)?.carrier, f.carrier);
        Ok(())
    }

    fn kleisli_poly_equiv(&mut self) -> Result<()> {
        let i = self.poly_ends("I");
        let j = self.poly_ends("J");
        let k = self.poly_ends("K");
        let p = self.polynomial("P", &i, &j);
        let q = self.polynomial("Q", &j, &k);
        let lhs = poly_to_span(&poly_compose(&q, &p)?)?;
        let rhs = kleisli_compose(&poly_to_span(&q)?, &poly_to_span(&p)?)?;
        self.equiv("span(Q ∘ P) ≃ span(Q) ∘ span(P)", lhs.carrier, rhs.carrier);
        self.equiv("span(id) ≃ ε", poly_to_span(&poly_id(&i.g))?.carrier, epsilon(&i.g));
        self.claims.push(Claim::PolyEquiv {
            what: "poly(span(P)) ≃ P".into(),
            lhs: span_to_poly(&poly_to_span(&p)?)?,
            rhs: p,
        });
        Ok(())
    }

    // ---- fibers and cardinality ----

    fn fibered_indexed_roundtrip(&mut self) -> Result<()> {
        let e = self.base("E");
        let b = self.base("B");
        let p = self.functor("p", &e, &b);
        let (fam, _) = fiber_family(&p);
        let total = grothendieck(&fam);
        self.equiv(
            "E ≃ Σ_b fiber(b) over B",
            Span::from_functors(&p, &GFunctor::to_unit(&e.g)),
            Span::from_functors(&total.proj, &GFunctor::to_unit(&total.groupoid)),
        );
        let family = self.g.family(&b);
        self.inputs.insert("family".into(), family.to_json());
        let t = grothendieck(&family);
        let (back, _) = fiber_family(&t.proj);
        for x in b.g.objects() {
            self.claims.push(Claim::GroupoidEquiv {
                what: format!("fiber of the total space over {x}"),
                lhs: family.fibers[x].clone(),
                rhs: back.fibers[x].clone(),
            });
        }
        Ok(())
    }

    fn gcard_multiplicative(&mut self) {
        let a = self.base("A");
        let b = self.base("B");
        let c = self.base("C");
        let f = self.functor("f", &a, &c);
        let h = self.functor("g", &b, &c);
        let mut e = Exact::new("|A × B| = |A| |B|");
        e.eq(&gcard(&product(&a.g, &b.g).groupoid), &(gcard(&a.g) * gcard(&b.g)), rational);
        self.exact(e);
        let pb = self.ops.hpullback(&Endpoint::gpd(&c.g), &a.g, &leg_of(&f), &b.g, &leg_of(&h));
        let (lf, lh) = (Mapping::from(&f), Mapping::from(&h));
        let mut expected = BigRational::from_integer(BigInt::from(0));
        for z in c.g.class_representatives() {
            let fa = hfiber(&c.g, &a.g, &lf, &z);
            let fb = hfiber(&c.g, &b.g, &lh, &z);
            let aut = BigRational::from_integer(BigInt::from(c.g.hom(z, z).len()));
            expected += gcard(&fa.groupoid) * gcard(&fb.groupoid) / aut;
        }
        let mut e = Exact::new("|A ×_C B| = Σ_c |fiber_f(c)| |fiber_g(c)| / |Aut c|");
        e.eq(&gcard(&pb.groupoid), &expected, rational);
        self.exact(e);
    }
}
