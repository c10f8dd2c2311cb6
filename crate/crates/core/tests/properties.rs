use gpdlab::bang::bang_span;
use gpdlab::equiv::verify_equivalence;
use gpdlab::gpd::{coproduct, product};
use gpdlab::kleisli::{
    kleisli_compose, kleisli_compose_bounded, kleisli_compose_general, poly_to_span, span_to_poly,
};
use gpdlab::laws::gen::{Blocks, Gen};
use gpdlab::laws::{run_suite, LawId, SuiteConfig};
use gpdlab::limits::{fiber_family, grothendieck, hfiber, hpullback, FamilyOfGroupoids};
use gpdlab::poly::{classify_arity, eval_at, linear_from_span, poly_compose, poly_equiv};
use gpdlab::span::{reduce, span_compose, span_equiv, span_id, tensor, Span};
use gpdlab::{find_equivalence, gcard, skeletalize, Budget, FinGroupoid, GFunctor, Mapping};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn equivalent(a: &FinGroupoid, b: &FinGroupoid) -> bool {
    find_equivalence(a, b, &mut Budget::default())
        .expect("within budget")
        .is_some()
}

fn spans_equivalent(a: &Span, b: &Span) -> bool {
    span_equiv(a, b, &mut Budget::default())
        .expect("within budget")
        .is_some()
}

/// Every functor `a → b`, by exhaustive search.
fn all_functors(a: &FinGroupoid, b: &FinGroupoid) -> Vec<GFunctor> {
    let (n, m) = (a.object_count(), b.object_count());
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(GFunctor::new(a.clone(), b.clone(), vec![], vec![]).expect("empty"));
        }
        return out;
    }
    let mut obj = vec![0; n];
    loop {
        let mut arr = vec![0; a.arrow_count()];
        assign(a, b, &obj, 0, &mut arr, &mut out);
        let mut i = 0;
        while i < n && obj[i] + 1 == m {
            obj[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        obj[i] += 1;
    }
    out
}

fn assign(a: &FinGroupoid, b: &FinGroupoid, obj: &[usize], u: usize, arr: &mut Vec<usize>, out: &mut Vec<GFunctor>) {
    if u == a.arrow_count() {
        if let Ok(f) = GFunctor::new(a.clone(), b.clone(), obj.to_vec(), arr.clone()) {
            out.push(f);
        }
        return;
    }
    for &v in b.hom(obj[a.src(u)], obj[a.dst(u)]) {
        arr[u] = v;
        assign(a, b, obj, u + 1, arr, out);
    }
}

/// `f ⊎ id_g`.
fn plus(f: &GFunctor, g: &FinGroupoid) -> GFunctor {
    let dom = coproduct(&f.domain, g);
    let cod = coproduct(&f.codomain, g);
    let (n, m) = (f.codomain.object_count(), f.codomain.arrow_count());
    GFunctor {
        domain: dom.groupoid,
        codomain: cod.groupoid,
        obj: f.obj.iter().copied().chain(g.objects().map(|x| x + n)).collect(),
        arr: f.arr.iter().copied().chain(g.arrows().map(|u| u + m)).collect(),
    }
}

fn plus_span(s: &Span, g: &FinGroupoid) -> Span {
    Span::from_functors(&plus(&s.left_functor(), g), &plus(&s.right_functor(), g))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn generated_groupoids_are_valid(seed in any::<u64>()) {
        let g = Gen::new(seed).blocks(4, 4, 12).g;
        prop_assert!(g.validate().is_valid());
        for u in g.arrows() {
            let v = g.inverse(u);
            prop_assert_eq!(g.compose(v, u), g.identity(g.src(u)));
            prop_assert_eq!(g.compose(u, v), g.identity(g.dst(u)));
        }
    }

    #[test]
    fn pullback_objects_are_counted_by_homs(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let z = g.blocks(3, 3, 8);
        let x = g.blocks(3, 2, 6);
        let y = g.blocks(3, 2, 6);
        let f = g.functor(&x, &z);
        let h = g.functor(&y, &z);
        let pb = hpullback(&z.g, &x.g, &Mapping::from(&f), &y.g, &Mapping::from(&h));
        let mut expected = 0;
        for a in x.g.objects() {
            for b in y.g.objects() {
                expected += z.g.hom(f.obj[a], h.obj[b]).len();
            }
        }
        prop_assert_eq!(pb.groupoid.object_count(), expected);
        prop_assert!(pb.groupoid.validate().is_valid());
    }

    #[test]
    fn fiber_is_pullback_along_a_point(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let b = g.blocks(3, 3, 8);
        let e = g.blocks(3, 2, 6);
        let f = g.functor(&e, &b);
        let one = FinGroupoid::unit();
        for y in b.g.objects() {
            let fib = hfiber(&b.g, &e.g, &Mapping::from(&f), &y);
            let pt = GFunctor::point(&b.g, y);
            let pb = hpullback(&b.g, &e.g, &Mapping::from(&f), &one, &Mapping::from(&pt));
            prop_assert!(equivalent(&fib.groupoid, &pb.groupoid));
        }
    }

    #[test]
    fn total_space_of_fibers_recovers_the_domain(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let b = g.blocks(3, 3, 8);
        let e = g.blocks(3, 2, 6);
        let f = g.functor(&e, &b);
        let total = grothendieck(&fiber_family(&f).0);
        let lhs = Span::from_functors(&GFunctor::to_unit(&e.g), &f);
        let rhs = Span::from_functors(&GFunctor::to_unit(&total.groupoid), &total.proj);
        prop_assert!(spans_equivalent(&lhs, &rhs));
    }

    #[test]
    fn cardinality_respects_structure(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(3, 4, 10).g;
        let b = g.blocks(3, 4, 10).g;
        prop_assert_eq!(gcard(&skeletalize(&a).0), gcard(&a));
        prop_assert_eq!(gcard(&product(&a, &b).groupoid), gcard(&a) * gcard(&b));
        prop_assert_eq!(gcard(&coproduct(&a, &b).groupoid), gcard(&a) + gcard(&b));
        let fat = product(&a, &FinGroupoid::indiscrete(2)).groupoid;
        prop_assert_eq!(gcard(&fat), gcard(&a));
    }

    #[test]
    fn equivalence_search_is_sound_and_complete(seed in any::<u64>(), fatten in any::<bool>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(2, 2, 4).g;
        let b0 = g.blocks(2, 2, 4).g;
        let b = if fatten { product(&b0, &FinGroupoid::indiscrete(2)).groupoid } else { b0 };
        let found = find_equivalence(&a, &b, &mut Budget::default()).expect("within budget");
        if let Some(w) = &found {
            prop_assert_eq!(&w.functor.domain, &a);
            prop_assert_eq!(&w.functor.codomain, &b);
            prop_assert!(w.functor.check().is_empty());
            prop_assert!(verify_equivalence(&w.functor).holds());
        }
        let brute = all_functors(&a, &b).iter().any(|f| verify_equivalence(f).holds());
        prop_assert_eq!(found.is_some(), brute);
    }

    #[test]
    fn tensor_and_sum_are_functorial_on_spans(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(2, 2, 4);
        let b = g.blocks(2, 2, 4);
        let c = g.blocks(2, 2, 4);
        let k = g.blocks(2, 2, 4).g;
        let f = g.span(&a, &b, 2, 2);
        let h = g.span(&b, &c, 2, 2);
        let hf = span_compose(&h, &f).unwrap();
        let id = span_id(&k);
        let lhs = tensor(&hf, &id).unwrap();
        let rhs = span_compose(&tensor(&h, &id).unwrap(), &tensor(&f, &id).unwrap()).unwrap();
        prop_assert!(spans_equivalent(&lhs, &rhs));
        let lhs = plus_span(&hf, &k);
        let rhs = span_compose(&plus_span(&h, &k), &plus_span(&f, &k)).unwrap();
        prop_assert!(spans_equivalent(&lhs, &rhs));
    }

    #[test]
    fn bang_is_functorial_on_spans(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(2, 2, 4);
        let b = g.blocks(2, 2, 4);
        let c = g.blocks(2, 2, 4);
        let f = g.span(&a, &b, 2, 2);
        let h = g.span(&b, &c, 2, 2);
        let lhs = reduce(&bang_span(&span_compose(&h, &f).unwrap(), 2).unwrap());
        let rhs = reduce(&span_compose(&bang_span(&h, 2).unwrap(), &bang_span(&f, 2).unwrap()).unwrap());
        prop_assert!(spans_equivalent(&lhs, &rhs));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn laws_hold_for_arbitrary_seeds(seed in any::<u64>()) {
        let cfg = SuiteConfig { seed, instance_count: 1, ..SuiteConfig::default() };
        let report = run_suite(&cfg, LawId::ALL, None);
        for law in &report.laws {
            prop_assert!(law.passed(), "{} failed at seed {}", law.law.name(), seed);
        }
    }

    #[test]
    fn polynomial_composition_is_associative(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let obs: Vec<Blocks> = (0..4).map(|_| g.blocks(2, 2, 4)).collect();
        let p = g.polynomial(&obs[0], &obs[1], 2, 2);
        let q = g.polynomial(&obs[1], &obs[2], 2, 2);
        let r = g.polynomial(&obs[2], &obs[3], 2, 2);
        let left = poly_compose(&r, &poly_compose(&q, &p).unwrap()).unwrap();
        let right = poly_compose(&poly_compose(&r, &q).unwrap(), &p).unwrap();
        prop_assert!(poly_equiv(&left, &right, &mut Budget::default()).unwrap().is_some());
    }

    #[test]
    fn linear_polynomials_compose_linearly(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(2, 2, 4);
        let b = g.blocks(2, 2, 4);
        let c = g.blocks(2, 2, 4);
        let p = linear_from_span(&g.span(&a, &b, 2, 2)).unwrap();
        let q = linear_from_span(&g.span(&b, &c, 2, 2)).unwrap();
        prop_assert!(classify_arity(&p).is_linear());
        prop_assert!(classify_arity(&poly_compose(&q, &p).unwrap()).is_linear());
    }

    #[test]
    fn evaluation_respects_the_kleisli_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let i = g.blocks(2, 2, 4);
        let j = g.blocks(2, 2, 4);
        let p = g.polynomial(&i, &j, 3, 2);
        let back = span_to_poly(&poly_to_span(&p).unwrap()).unwrap();
        prop_assert!(poly_equiv(&p, &back, &mut Budget::default()).unwrap().is_some());
        let x = g.family(&i);
        for y in j.g.objects() {
            prop_assert!(equivalent(&eval_at(&p, &x, y).unwrap(), &eval_at(&back, &x, y).unwrap()));
        }
    }

    #[test]
    fn spans_survive_the_polynomial_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let i = g.blocks(2, 2, 4);
        let j = g.blocks(2, 2, 4);
        let m = poly_to_span(&g.polynomial(&i, &j, 3, 2)).unwrap();
        let again = poly_to_span(&span_to_poly(&m).unwrap()).unwrap();
        prop_assert!(spans_equivalent(&m.carrier, &again.carrier));
    }

    #[test]
    fn evaluation_of_a_composite_is_iterated_evaluation(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let i = g.blocks(2, 2, 4);
        let j = Blocks::new(&[1, 1]);
        let k = g.blocks(2, 2, 4);
        let p = g.polynomial(&i, &j, 2, 2);
        let q = g.polynomial(&j, &k, 2, 2);
        let x = g.family(&i);
        let fibers: Vec<FinGroupoid> = j.g.objects().map(|y| eval_at(&p, &x, y).unwrap()).collect();
        let transport = j.g.arrows().map(|u| GFunctor::identity(&fibers[j.g.src(u)])).collect();
        let px = FamilyOfGroupoids::new(j.g.clone(), fibers, transport).unwrap();
        let qp = poly_compose(&q, &p).unwrap();
        for z in k.g.objects() {
            prop_assert!(equivalent(&eval_at(&qp, &x, z).unwrap(), &eval_at(&q, &px, z).unwrap()));
        }
    }

    #[test]
    fn reduced_kleisli_composition_matches_the_general_one(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.blocks(2, 2, 4);
        let b = g.blocks(2, 2, 4);
        let c = g.blocks(2, 2, 4);
        let f = poly_to_span(&g.polynomial(&a, &b, 2, 2)).unwrap();
        let h = poly_to_span(&g.polynomial(&b, &c, 2, 2)).unwrap();
        let reduced = kleisli_compose(&h, &f).unwrap();
        let general = kleisli_compose_general(&h, &f).unwrap();
        prop_assert!(spans_equivalent(&reduced.carrier, &general.carrier));
        let wider = kleisli_compose_bounded(&h, &f, h.max_bag() + 1).unwrap();
        prop_assert!(spans_equivalent(&reduced.carrier, &wider.carrier));
    }
}
