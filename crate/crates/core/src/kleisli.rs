//! Kleisli morphisms of `!` on spans, `!I ⇸ J`, and their correspondence
//! with polynomials.

use crate::bang::{
    bang_mapping_mor, bang_mapping_obj, bang_materialize_sorted, bang_obj, bang_mor, delta_on,
    epsilon, mu_mor, mu_obj, BagMorphism, Endpoint, Mor, Obj,
};
use crate::effective::Mapping;
use crate::equiv::Budget;
use crate::error::{Error, Result};
use crate::gpd::{FinGroupoid, GFunctor};
use crate::limits::{fiber_family, grothendieck, hpullback, FamilyOfGroupoids};
use crate::poly::{classify_arity, poly_compose, poly_id, Polynomial};
use crate::span::{leg_of, reduce, span_compose, span_equiv, Span, SpanEquivWitness};

/// A span `!domain ⇸ codomain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleisliMorphism {
    pub domain: FinGroupoid,
    pub codomain: FinGroupoid,
    pub carrier: Span,
}

impl KleisliMorphism {
    pub fn new(carrier: Span) -> Result<Self> {
        if carrier.left.kind != crate::bang::Kind::Bang || !carrier.right.is_concrete() {
            return Err(Error::schema("/left", "a Kleisli morphism is a span from a bang endpoint to a groupoid"));
        }
        Ok(KleisliMorphism {
            domain: carrier.left.base.clone(),
            codomain: carrier.right.base.clone(),
            carrier,
        })
    }

    /// The Kleisli identity `ε`.
    pub fn identity(a: &FinGroupoid) -> Self {
        KleisliMorphism::new(epsilon(a)).expect("ε")
    }

    /// Largest bag in the image of the left leg.
    pub fn max_bag(&self) -> usize {
        self.carrier
            .leg_l
            .obj
            .iter()
            .map(|x| x.as_bag().map_or(0, |b| b.colors.len()))
            .max()
            .unwrap_or(0)
    }
}

/// `b ↦ (E_b, s|E_b)`: the bag of isomorphism classes of the fiber of `p`
/// over `b`, colored by `s`.
pub fn poly_to_span(poly: &Polynomial) -> Result<KleisliMorphism> {
    let arity = classify_arity(poly);
    if let Some(f) = arity.fibers.iter().find(|f| f.max_automorphisms > 1) {
        return Err(Error::NotFinitary(f.base));
    }
    let (fam, fibers) = fiber_family(&poly.p);
    let b = &poly.b;
    // carrier of each bag: class representatives of the fiber
    let carriers: Vec<Vec<usize>> = fam.fibers.iter().map(|f| f.class_representatives()).collect();
    let conns: Vec<Vec<(usize, usize)>> = fam.fibers.iter().map(|f| f.connecting_arrows()).collect();
    let obj: Vec<Obj> = b
        .objects()
        .map(|x| {
            Obj::bag(
                carriers[x]
                    .iter()
                    .map(|&z| Obj::Base(poly.s.obj[fibers[x].points[z].0]))
                    .collect(),
            )
        })
        .collect();
    let arr: Vec<Mor> = b
        .arrows()
        .map(|beta| {
            let (x, y) = (b.src(beta), b.dst(beta));
            let fy = &fam.fibers[y];
            let mut sigma = Vec::new();
            let mut components = Vec::new();
            for &z in &carriers[x] {
                let tz = fam.transport[beta].obj[z];
                let (rep, c) = conns[y][tz];
                // the unique fiber arrow T_β z → rep
                let u = fy.inverse(c);
                sigma.push(carriers[y].binary_search(&rep).expect("representative"));
                components.push(Mor::Base(poly.s.arr[fibers[y].under[u]]));
            }
            Mor::Bag(BagMorphism { sigma, components })
        })
        .collect();
    KleisliMorphism::new(Span {
        left: Endpoint::bang(&poly.i),
        right: Endpoint::gpd(&poly.j),
        apex: b.clone(),
        leg_l: Mapping { obj, arr },
        leg_r: leg_of(&poly.t),
    })
}

/// `E = Σ_{b : apex} carrier(b)`, with `s` the coloring, `p` the projection
/// and `t` the right leg.
pub fn span_to_poly(m: &KleisliMorphism) -> Result<Polynomial> {
    let s = &m.carrier;
    let b = &s.apex;
    let bags: Vec<&crate::bang::Bag> = s.leg_l.obj.iter().map(|x| x.as_bag().expect("bag")).collect();
    let fibers: Vec<FinGroupoid> = bags.iter().map(|g| FinGroupoid::discrete(g.colors.len())).collect();
    let transport: Vec<GFunctor> = b
        .arrows()
        .map(|beta| {
            let sigma = &s.leg_l.arr[beta].as_bag().expect("bag morphism").sigma;
            GFunctor {
                domain: fibers[b.src(beta)].clone(),
                codomain: fibers[b.dst(beta)].clone(),
                obj: sigma.clone(),
                arr: sigma.clone(),
            }
        })
        .collect();
    let fam = FamilyOfGroupoids::new(b.clone(), fibers, transport)?;
    let total = grothendieck(&fam);
    let s_fun = GFunctor {
        domain: total.groupoid.clone(),
        codomain: m.domain.clone(),
        obj: total
            .points
            .iter()
            .map(|&(x, i)| bags[x].colors[i].as_base().expect("leaf"))
            .collect(),
        arr: total
            .groupoid
            .arrows()
            .map(|a| {
                let (beta, _) = total.arrows[a];
                let (_, i) = total.points[total.groupoid.src(a)];
                let bm = s.leg_l.arr[beta].as_bag().expect("bag morphism");
                bm.components[i].as_base().expect("leaf")
            })
            .collect(),
    };
    Polynomial::new(s_fun, total.proj.clone(), s.right_functor())
}

/// `g ∘ f` in the reduced form: the pullback of `!t` (on bags of `B` up
/// to the largest bag size in `g`'s left leg) against `g`'s left leg, with
/// left leg `μ ∘ !s̄` and right leg `v`.
pub fn kleisli_compose(g: &KleisliMorphism, f: &KleisliMorphism) -> Result<KleisliMorphism> {
    kleisli_compose_bounded(g, f, g.max_bag())
}

/// The reduced form with an explicit bag bound for `!B`.
pub fn kleisli_compose_bounded(g: &KleisliMorphism, f: &KleisliMorphism, k: usize) -> Result<KleisliMorphism> {
    if f.codomain != g.domain {
        return Err(Error::Mismatch("Kleisli morphisms are not composable".into()));
    }
    let fs = &f.carrier;
    let t = fs.right_functor();
    let bb = bang_materialize_sorted(&fs.apex, k);
    let bang_t = Mapping {
        obj: bb.objects.iter().map(|x| bang_obj(&t, x)).collect(),
        arr: bb.arrows.iter().map(|m| bang_mor(&t, m)).collect(),
    };
    let over = Endpoint::bang(&f.codomain);
    let pb = hpullback(&over, &bb.groupoid, &bang_t, &g.carrier.apex, &g.carrier.leg_l);
    let left = Mapping {
        obj: pb
            .proj1
            .obj
            .iter()
            .map(|&x| mu_obj(&bang_mapping_obj(&fs.leg_l, &bb.objects[x])))
            .collect(),
        arr: pb
            .proj1
            .arr
            .iter()
            .map(|&a| mu_mor(&bang_mapping_mor(&fs.leg_l, &bb.arrows[a])))
            .collect(),
    };
    KleisliMorphism::new(Span {
        left: Endpoint::bang(&f.domain),
        right: g.carrier.right.clone(),
        leg_l: left,
        leg_r: g.carrier.leg_r.after(&pb.proj2),
        apex: pb.groupoid,
    })
}

/// `g ∘ Span(!)(f) ∘ δ`, with `δ` restricted to the bags of bags hit by
/// `!s̄`.
pub fn kleisli_compose_general(g: &KleisliMorphism, f: &KleisliMorphism) -> Result<KleisliMorphism> {
    if f.codomain != g.domain {
        return Err(Error::Mismatch("Kleisli morphisms are not composable".into()));
    }
    let fs = &f.carrier;
    let bb = bang_materialize_sorted(&fs.apex, g.max_bag());
    let t = fs.right_functor();
    let lifted = Span {
        left: Endpoint::bangbang(&f.domain),
        right: Endpoint::bang(&f.codomain),
        leg_l: Mapping {
            obj: bb.objects.iter().map(|x| bang_mapping_obj(&fs.leg_l, x)).collect(),
            arr: bb.arrows.iter().map(|m| bang_mapping_mor(&fs.leg_l, m)).collect(),
        },
        leg_r: Mapping {
            obj: bb.objects.iter().map(|x| bang_obj(&t, x)).collect(),
            arr: bb.arrows.iter().map(|m| bang_mor(&t, m)).collect(),
        },
        apex: bb.groupoid.clone(),
    };
    let mut image: Vec<Obj> = lifted.leg_l.obj.clone();
    image.sort();
    image.dedup();
    let delta = delta_on(&f.domain, image);
    let step = reduce(&span_compose(&lifted, &delta)?);
    KleisliMorphism::new(span_compose(&g.carrier, &step)?)
}

/// The outcome of comparing both routes around the Kleisli/polynomial
/// square for one pair.
#[derive(Clone, Debug)]
pub struct KleisliVerdict {
    pub composite: Option<SpanEquivWitness>,
    pub identity: Option<SpanEquivWitness>,
}

impl KleisliVerdict {
    pub fn holds(&self) -> bool {
        self.composite.is_some() && self.identity.is_some()
    }
}

/// Compares `poly_to_span(Q ∘ P)` with `poly_to_span(Q) ∘ poly_to_span(P)`,
/// and `poly_to_span(poly_id(I))` with `ε_I`.
pub fn check_kleisli_poly_equiv(q: &Polynomial, p: &Polynomial, budget: &mut Budget) -> Result<KleisliVerdict> {
    let lhs = poly_to_span(&poly_compose(q, p)?)?;
    let rhs = kleisli_compose(&poly_to_span(q)?, &poly_to_span(p)?)?;
    let composite = span_equiv(&lhs.carrier, &rhs.carrier, budget)?;
    let id = poly_to_span(&poly_id(&p.i))?;
    let identity = span_equiv(&id.carrier, &epsilon(&p.i), budget)?;
    Ok(KleisliVerdict { composite, identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::poly_equiv;

    #[test]
    fn identity_is_epsilon() {
        for a in [FinGroupoid::discrete(2), FinGroupoid::cyclic(2), FinGroupoid::indiscrete(2)] {
            let k = poly_to_span(&poly_id(&a)).unwrap();
            assert!(span_equiv(&k.carrier, &epsilon(&a), &mut Budget::default()).unwrap().is_some());
            assert!(k.carrier.leg_l.obj.iter().all(|x| x.as_bag().unwrap().colors.len() == 1));
            let back = span_to_poly(&KleisliMorphism::identity(&a)).unwrap();
            assert!(poly_equiv(&back, &poly_id(&a), &mut Budget::default()).unwrap().is_some());
        }
    }

    #[test]
    fn square_monomial() {
        let k = poly_to_span(&Polynomial::monomial(2)).unwrap();
        assert_eq!(k.carrier.apex, FinGroupoid::unit());
        assert_eq!(k.carrier.leg_l.obj[0], Obj::leaves(&[0, 0]));
    }

    #[test]
    fn x3_after_x2() {
        let mut budget = Budget::default();
        let v = check_kleisli_poly_equiv(&Polynomial::monomial(3), &Polynomial::monomial(2), &mut budget).unwrap();
        assert!(v.holds());
        let c = kleisli_compose(&poly_to_span(&Polynomial::monomial(3)).unwrap(), &poly_to_span(&Polynomial::monomial(2)).unwrap()).unwrap();
        let six = poly_to_span(&Polynomial::monomial(6)).unwrap();
        assert!(span_equiv(&c.carrier, &six.carrier, &mut budget).unwrap().is_some());
        let gen = kleisli_compose_general(&poly_to_span(&Polynomial::monomial(3)).unwrap(), &poly_to_span(&Polynomial::monomial(2)).unwrap()).unwrap();
        assert!(span_equiv(&gen.carrier, &six.carrier, &mut budget).unwrap().is_some());
    }

    #[test]
    fn kleisli_units() {
        let mut budget = Budget::default();
        let m = poly_to_span(&Polynomial::monomial(2)).unwrap();
        let one = FinGroupoid::unit();
        let l = kleisli_compose(&KleisliMorphism::identity(&one), &m).unwrap();
        let r = kleisli_compose(&m, &KleisliMorphism::identity(&one)).unwrap();
        assert!(span_equiv(&l.carrier, &m.carrier, &mut budget).unwrap().is_some());
        assert!(span_equiv(&r.carrier, &m.carrier, &mut budget).unwrap().is_some());
    }

    #[test]
    fn round_trips() {
        let mut budget = Budget::default();
        let p = Polynomial::monomial(3);
        let back = span_to_poly(&poly_to_span(&p).unwrap()).unwrap();
        assert!(poly_equiv(&back, &p, &mut budget).unwrap().is_some());
    }
}
