//! The acceptance criteria, one line each. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gpdlab::bang::{bang_materialize, Endpoint, Obj};
use gpdlab::effective::Effective;
use gpdlab::equiv::{gcard, Budget};
use gpdlab::gpd::{FinGroupoid, GFunctor};
use gpdlab::json::Artifact;
use gpdlab::kleisli::{check_kleisli_poly_equiv, poly_to_span};
use gpdlab::laws::gen::Gen;
use gpdlab::laws::ops::Ops;
use gpdlab::laws::{instance, recheck, run_suite, Defect, LawId, SuiteConfig, SuiteReport, Verdict};
use gpdlab::limits::FamilyOfGroupoids;
use gpdlab::poly::{eval_at, poly_compose, poly_id, Polynomial};
use gpdlab::span::{span_compose, span_equiv, Span};

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("Kleisli and polynomial composition agree", secs(60), kleisli_poly),
        ("monad laws hold exactly", secs(10), monad_laws),
        ("! preserves pullbacks on bounded pieces", secs(30), pullback_preservation),
        ("η and μ are cartesian on bounded pieces", secs(30), cartesian),
        ("Seely square and monoidal diagrams", secs(30), seely),
        ("span category structure", secs(60), span_structure),
        ("discrete instances match set counts", secs(30), decategorified),
        ("bag symmetries and truncated exponential", secs(10), symmetry),
        ("seeded defects are detected", secs(60), mutations),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > *limit => Err(format!("{d}; over the {}s limit", limit.as_secs())),
            o => o,
        };
        match outcome {
            Ok(d) => println!("criterion {}: pass: {name} ({d}; {:.1}s)", i + 1, took.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL: {name} ({d}; {:.1}s)", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

/// Runs laws through the suite and re-verifies every witness from JSON.
fn suite(laws: &[LawId], instances: usize) -> Result<SuiteReport, String> {
    let cfg = SuiteConfig {
        instance_count: instances,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg, laws, None);
    for l in &report.laws {
        if let Some(f) = l.first_failure() {
            return Err(format!("{} instance {}: {:?} {:?}", l.law.name(), f.seed_index, f.verdict, f.message));
        }
    }
    let reparsed = SuiteReport::from_json(&gpdlab::json::parse_value(&report.render()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let bad = recheck(&reparsed);
    ensure(bad.is_empty(), || format!("witnesses failed to recheck: {bad:?}"))?;
    Ok(report)
}

fn kleisli_poly() -> Outcome {
    let mut g = Gen::new(42);
    let mut budget = Budget::default();
    for n in 0..100 {
        let i = g.blocks(3, 4, 12);
        let j = g.blocks(3, 4, 12);
        let k = g.blocks(3, 4, 12);
        let p = g.polynomial(&i, &j, 3, 3);
        let q = g.polynomial(&j, &k, 3, 3);
        let v = check_kleisli_poly_equiv(&q, &p, &mut budget).map_err(|e| format!("pair {n}: {e}"))?;
        ensure(v.holds(), || format!("pair {n} has no equivalence"))?;
        budget = Budget::default();
    }
    for n in 0..20 {
        let a = g.blocks(3, 4, 12);
        let id = poly_to_span(&poly_id(&a.g)).map_err(|e| e.to_string())?;
        let w = span_equiv(&id.carrier, &gpdlab::bang::epsilon(&a.g), &mut budget).map_err(|e| e.to_string())?;
        ensure(w.is_some(), || format!("identity {n} is not ε"))?;
    }
    Ok("100 pairs, 20 identities".into())
}

/// Ordered bags over `items` with at most `len` elements and at most
/// `leaves` leaves in total.
fn bags(items: &[Obj], len: usize, leaves: usize) -> Vec<Obj> {
    fn size(x: &Obj) -> usize {
        match x {
            Obj::Base(_) => 1,
            Obj::Bag(b) => b.colors.iter().map(size).sum(),
        }
    }
    let mut out = vec![];
    let mut frontier: Vec<(Vec<Obj>, usize)> = vec![(vec![], 0)];
    while let Some((cur, used)) = frontier.pop() {
        out.push(Obj::bag(cur.clone()));
        if cur.len() == len {
            continue;
        }
        for x in items {
            let s = size(x);
            if used + s <= leaves {
                let mut next = cur.clone();
                next.push(x.clone());
                frontier.push((next, used + s));
            }
        }
    }
    out
}

fn monad_laws() -> Outcome {
    let law_cfg = SuiteConfig::default();
    let ops = Ops::default();
    let mut g = Gen::new(42);
    let mut checked = 0usize;
    for base in 0..10 {
        let a = g.blocks(law_cfg.max_objects, 4, law_cfg.max_arrows);
        let leaves: Vec<Obj> = a.g.objects().map(Obj::Base).collect();
        // triangles on every bag of size at most 3 and every arrow between them
        let m = bang_materialize(&a.g, 3);
        let et = gpdlab::bang::eta(&a.g);
        for x in &m.objects {
            ensure(ops.mu_obj(&gpdlab::bang::eta_obj(x)) == *x, || format!("base {base}: μη at {x:?}"))?;
            let bang_eta = gpdlab::bang::bang_mapping_obj(&et, x);
            ensure(ops.mu_obj(&bang_eta) == *x, || format!("base {base}: μ!η at {x:?}"))?;
            checked += 2;
        }
        for u in &m.arrows {
            ensure(ops.mu_mor(&gpdlab::bang::eta_mor(u)) == *u, || format!("base {base}: μη at {u:?}"))?;
            let bang_eta = gpdlab::bang::bang_mapping_mor(&et, u);
            ensure(ops.mu_mor(&bang_eta) == *u, || format!("base {base}: μ!η at {u:?}"))?;
            checked += 2;
        }
        // the square on every three-level bag with at most 3 leaves
        let l1 = bags(&leaves, 3, 3);
        let l2 = bags(&l1, 3, 3);
        let l3 = bags(&l2, 3, 3);
        for x in &l3 {
            let inner = x.as_bag().unwrap().colors.iter().map(|c| ops.mu_obj(c)).collect();
            ensure(ops.mu_obj(&ops.mu_obj(x)) == ops.mu_obj(&Obj::bag(inner)), || {
                format!("base {base}: square at {x:?}")
            })?;
            let (u, _) = g.arrow_from(&a.g, x);
            let b = u.as_bag().unwrap();
            let bang_mu = gpdlab::bang::Mor::Bag(gpdlab::bang::BagMorphism {
                sigma: b.sigma.clone(),
                components: b.components.iter().map(|c| ops.mu_mor(c)).collect(),
            });
            ensure(ops.mu_mor(&ops.mu_mor(&u)) == ops.mu_mor(&bang_mu), || format!("base {base}: square at {u:?}"))?;
            checked += 2;
        }
    }
    Ok(format!("10 bases, {checked} equalities"))
}

fn pullback_preservation() -> Outcome {
    suite(&[LawId::BangPreservesPullback], 30)?;
    Ok("30 cospans, comparisons full, faithful and essentially surjective".into())
}

fn cartesian() -> Outcome {
    suite(&[LawId::EtaCartesian, LawId::MuCartesian], 30)?;
    Ok("30 maps each".into())
}

fn seely() -> Outcome {
    let laws = [LawId::SeelySquare, LawId::Monoidal1, LawId::Monoidal2, LawId::Monoidal3, LawId::Monoidal4];
    suite(&laws, 20)?;
    Ok("20 pairs for the square, 20 instances per diagram".into())
}

fn span_structure() -> Outcome {
    suite(&[LawId::SpanAssoc, LawId::SpanUnit], 50)?;
    suite(&[LawId::ProductUp, LawId::Terminal], 20)?;
    suite(&[LawId::Snake], 10)?;
    Ok("50 triples, 20 product and terminal checks, 10 snakes".into())
}

// ---- decategorified oracle ----

fn random_map(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..m)).collect()
}

fn disc_functor(obj: &[usize], m: usize) -> GFunctor {
    let dom = FinGroupoid::discrete(obj.len());
    let cod = FinGroupoid::discrete(m);
    let arr = obj.iter().map(|&y| cod.identity(y)).collect();
    GFunctor::new(dom, cod, obj.to_vec(), arr).expect("map of sets")
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Counts pairs `(x, y)` with `r(x) = l'(y)` by listing them.
fn span_count(r: &[usize], l2: &[usize]) -> usize {
    let mut n = 0;
    for &a in r {
        for &b in l2 {
            if a == b {
                n += 1;
            }
        }
    }
    n
}

/// A discrete polynomial as plain maps.
struct SetPoly {
    s: Vec<usize>,
    p: Vec<usize>,
    t: Vec<usize>,
}

/// Every function from `n` positions into `0..m`.
fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..m).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}

/// `(|B|, |E|)` of `q ∘ p`: a base is a `c ∈ B_q` with a choice of `p`-base
/// for each element over `c` matching it in the middle set.
fn composite_counts(p: &SetPoly, q: &SetPoly) -> (usize, usize) {
    let (mut bases, mut elements) = (0, 0);
    for c in 0..q.t.len() {
        let over: Vec<usize> = (0..q.p.len()).filter(|&e| q.p[e] == c).collect();
        for choice in functions(over.len(), p.t.len()) {
            if over.iter().zip(&choice).all(|(&e, &b)| p.t[b] == q.s[e]) {
                bases += 1;
                elements += choice.iter().map(|&b| p.p.iter().filter(|&&x| x == b).count()).sum::<usize>();
            }
        }
    }
    (bases, elements)
}

/// `|P(X)_j|` by listing every base over `j` with a point of `X` for each
/// element of its fiber.
fn eval_count(p: &SetPoly, sizes: &[usize], j: usize) -> usize {
    let mut n = 0;
    for b in (0..p.t.len()).filter(|&b| p.t[b] == j) {
        let over: Vec<usize> = (0..p.p.len()).filter(|&e| p.p[e] == b).collect();
        let widest = sizes.iter().copied().max().unwrap_or(0);
        n += functions(over.len(), widest)
            .iter()
            .filter(|f| over.iter().zip(f.iter()).all(|(&e, &x)| x < sizes[p.s[e]]))
            .count();
    }
    n
}

fn set_poly(rng: &mut ChaCha8Rng, i: usize, j: usize) -> SetPoly {
    let b = rng.gen_range(1..=3);
    let e = rng.gen_range(0..=3);
    SetPoly {
        s: random_map(rng, e, i),
        p: random_map(rng, e, b),
        t: random_map(rng, b, j),
    }
}

fn as_poly(sp: &SetPoly, i: usize, j: usize) -> Polynomial {
    let b = sp.t.len();
    Polynomial::new(disc_functor(&sp.s, i), disc_functor(&sp.p, b), disc_functor(&sp.t, j)).expect("polynomial")
}

fn decategorified() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 0..70 {
        let (a, b, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (x, y) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
        let (l1, r1) = (random_map(&mut rng, x, a), random_map(&mut rng, x, b));
        let (l2, r2) = (random_map(&mut rng, y, b), random_map(&mut rng, y, c));
        let f = Span::from_functors(&disc_functor(&l1, a), &disc_functor(&r1, b));
        let g = Span::from_functors(&disc_functor(&l2, b), &disc_functor(&r2, c));
        let apex = span_compose(&g, &f).map_err(|e| e.to_string())?.apex;
        let expected = span_count(&r1, &l2);
        ensure(gcard(&apex) == int(expected), || format!("span pair {n}: {} vs {expected}", gcard(&apex)))?;
    }
    for n in 0..70 {
        let (i, j, k) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let (sp, sq) = (set_poly(&mut rng, i, j), set_poly(&mut rng, j, k));
        let c = poly_compose(&as_poly(&sq, j, k), &as_poly(&sp, i, j)).map_err(|e| e.to_string())?;
        let (bases, elements) = composite_counts(&sp, &sq);
        ensure(gcard(&c.b) == int(bases) && gcard(&c.e) == int(elements), || {
            format!("poly pair {n}: ({}, {}) vs ({bases}, {elements})", gcard(&c.b), gcard(&c.e))
        })?;
    }
    for n in 0..60 {
        let (i, j) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let sp = set_poly(&mut rng, i, j);
        let sizes: Vec<usize> = (0..i).map(|_| rng.gen_range(0..=3)).collect();
        let base = FinGroupoid::discrete(i);
        let fibers: Vec<FinGroupoid> = sizes.iter().map(|&s| FinGroupoid::discrete(s)).collect();
        let transport = (0..i).map(|x| GFunctor::identity(&fibers[x])).collect();
        let fam = FamilyOfGroupoids::new(base, fibers, transport).map_err(|e| e.to_string())?;
        let at = rng.gen_range(0..j);
        let v = eval_at(&as_poly(&sp, i, j), &fam, at).map_err(|e| e.to_string())?;
        let expected = eval_count(&sp, &sizes, at);
        ensure(gcard(&v) == int(expected), || format!("evaluation {n}: {} vs {expected}", gcard(&v)))?;
    }
    Ok("70 span compositions, 70 polynomial compositions, 60 evaluations".into())
}

fn symmetry() -> Outcome {
    let d2 = FinGroupoid::discrete(2);
    let aab = Obj::leaves(&[0, 0, 1]);
    let autos = Endpoint::bang(&d2).homs(&aab, &aab).len();
    ensure(autos == 2, || format!("[a, a, b] has {autos} automorphisms"))?;
    let mut expected = BigRational::from_integer(BigInt::from(0));
    let mut factorial = BigInt::from(1);
    for k in 0..=5usize {
        if k > 0 {
            factorial *= k;
        }
        expected += BigRational::new(BigInt::from(1), factorial.clone());
        let got = gcard(&bang_materialize(&FinGroupoid::unit(), k).groupoid);
        ensure(got == expected, || format!("bound {k}: {got} vs {expected}"))?;
    }
    Ok("2 automorphisms; Σ 1/n! up to 5".into())
}

fn mutations() -> Outcome {
    let cfg = SuiteConfig {
        instance_count: 5,
        ..SuiteConfig::default()
    };
    let mut caught = vec![];
    for d in Defect::ALL {
        let r = run_suite(&cfg, LawId::ALL, Some(d));
        let hit = r.laws.iter().find_map(|l| {
            l.instances
                .iter()
                .find(|i| i.verdict == Verdict::Fail && i.counterexample.is_some())
                .map(|i| (l.law, i))
        });
        let (law, inst) = hit.ok_or_else(|| format!("{} was not detected", d.name()))?;
        // the counterexample carries the generated inputs, which regenerate
        let again = instance(law, &cfg, inst.seed_index, &Ops::with(Some(d))).map_err(|e| e.to_string())?;
        let ce = inst.counterexample.as_ref().unwrap();
        ensure(ce["inputs"] == again.inputs, || format!("{}: counterexample inputs do not regenerate", d.name()))?;
        caught.push(format!("{} by {}", d.name(), law.name()));
    }
    Ok(caught.join(", "))
}
