//! Homotopy pullbacks and fibers, families of groupoids, total spaces and
//! groupoids of sections.

use std::collections::HashMap;

use crate::effective::{Effective, Mapping};
use crate::error::{Error, Result};
use crate::gpd::{Builder, FinGroupoid, GFunctor};

/// `X ×_Z Y` with its projections and the filler `γ : f∘π1 ⇒ g∘π2`.
#[derive(Clone, Debug)]
pub struct HPullback<M> {
    pub groupoid: FinGroupoid,
    pub proj1: GFunctor,
    pub proj2: GFunctor,
    /// `points[o] = (x, y, γ)` with `γ : f(x) → g(y)`.
    pub points: Vec<(usize, usize, M)>,
}

impl<M: Clone> HPullback<M> {
    pub fn filler(&self) -> Vec<M> {
        self.points.iter().map(|p| p.2.clone()).collect()
    }
}

/// The homotopy pullback of `f : X → Z` and `g : Y → Z`.
///
/// Objects are triples `(x, y, γ : f(x) → g(y))`; arrows are pairs `(u, v)`
/// with `γ' ∘ f(u) = g(v) ∘ γ`.
pub fn hpullback<T: Effective>(
    z: &T,
    x: &FinGroupoid,
    f: &Mapping<T::Obj, T::Mor>,
    y: &FinGroupoid,
    g: &Mapping<T::Obj, T::Mor>,
) -> HPullback<T::Mor> {
    let mut points = Vec::new();
    let mut index = HashMap::new();
    for a in x.objects() {
        for b in y.objects() {
            for gamma in z.homs(&f.obj[a], &g.obj[b]) {
                index.insert((a, b, gamma.clone()), points.len());
                points.push((a, b, gamma));
            }
        }
    }
    let mut bld = Builder::new(points.len());
    for (o, (a, b, gamma)) in points.iter().enumerate() {
        for a2 in x.objects() {
            for &u in x.hom(*a, a2) {
                let back = z.compose(gamma, &z.inverse(&f.arr[u]));
                for b2 in y.objects() {
                    for &v in y.hom(*b, b2) {
                        let gamma2 = z.compose(&g.arr[v], &back);
                        let o2 = index[&(a2, b2, gamma2)];
                        bld.arrow((o, o2, u, v), o, o2);
                    }
                }
            }
        }
    }
    // arrows out of `o` were added in (u, v) order, so ids have a closed form
    let (xpos, xdeg) = out_positions(x);
    let (ypos, ydeg) = out_positions(y);
    let mut start = Vec::with_capacity(points.len());
    let mut total = 0;
    for (a, b, _) in &points {
        start.push(total);
        total += xdeg[*a] * ydeg[*b];
    }
    let k = bld.finish_by(
        |&(_, d, u2, v2), &(s, _, u, v)| (s, d, x.compose(u2, u), y.compose(v2, v)),
        |o| {
            let (a, b, _) = &points[o];
            (o, o, x.identity(*a), y.identity(*b))
        },
        |&(s, d, u, v)| (d, s, x.inverse(u), y.inverse(v)),
        |_, &(s, _, u, v)| start[s] + xpos[u] * ydeg[points[s].1] + ypos[v],
    );
    let g_ = k.groupoid;
    HPullback {
        proj1: GFunctor {
            domain: g_.clone(),
            codomain: x.clone(),
            obj: points.iter().map(|p| p.0).collect(),
            arr: k.keys.iter().map(|k| k.2).collect(),
        },
        proj2: GFunctor {
            domain: g_.clone(),
            codomain: y.clone(),
            obj: points.iter().map(|p| p.1).collect(),
            arr: k.keys.iter().map(|k| k.3).collect(),
        },
        groupoid: g_,
        points,
    }
}

/// Position of each arrow among the arrows out of its source, and out-degrees.
fn out_positions(g: &FinGroupoid) -> (Vec<usize>, Vec<usize>) {
    let mut pos = vec![0; g.arrow_count()];
    let mut deg = vec![0; g.object_count()];
    for a in g.objects() {
        for b in g.objects() {
            for &u in g.hom(a, b) {
                pos[u] = deg[a];
                deg[a] += 1;
            }
        }
    }
    (pos, deg)
}

/// The homotopy fiber of `f : E → B` over a point `b`.
#[derive(Clone, Debug)]
pub struct Fiber<M> {
    pub groupoid: FinGroupoid,
    /// `points[o] = (e, γ)` with `γ : f(e) → b`.
    pub points: Vec<(usize, M)>,
    /// Underlying arrow of `E` for every arrow of the fiber.
    pub under: Vec<usize>,
    pub index: HashMap<(usize, M), usize>,
    /// `(source object, underlying arrow) ↦ arrow`.
    pub arr_index: HashMap<(usize, usize), usize>,
}

impl<M> Fiber<M> {
    /// The forgetful functor into `E`.
    pub fn inclusion(&self, e: &FinGroupoid) -> GFunctor {
        GFunctor {
            domain: self.groupoid.clone(),
            codomain: e.clone(),
            obj: self.points.iter().map(|p| p.0).collect(),
            arr: self.under.clone(),
        }
    }
}

/// Objects `(e, γ : f(e) → b)`; arrows `u : e → e'` with `γ' ∘ f(u) = γ`.
pub fn hfiber<T: Effective>(
    base: &T,
    e: &FinGroupoid,
    f: &Mapping<T::Obj, T::Mor>,
    b: &T::Obj,
) -> Fiber<T::Mor> {
    let mut points = Vec::new();
    let mut index = HashMap::new();
    for x in e.objects() {
        for gamma in base.homs(&f.obj[x], b) {
            index.insert((x, gamma.clone()), points.len());
            points.push((x, gamma));
        }
    }
    let mut bld = Builder::new(points.len());
    for (o, (x, gamma)) in points.iter().enumerate() {
        for x2 in e.objects() {
            for &u in e.hom(*x, x2) {
                let gamma2 = base.compose(gamma, &base.inverse(&f.arr[u]));
                let o2 = index[&(x2, gamma2)];
                bld.arrow((o, u), o, o2);
            }
        }
    }
    // The target object of (o, u) is needed for inverses.
    let targets: HashMap<(usize, usize), usize> = {
        let mut t = HashMap::new();
        for (o, (x, gamma)) in points.iter().enumerate() {
            for x2 in e.objects() {
                for &u in e.hom(*x, x2) {
                    let gamma2 = base.compose(gamma, &base.inverse(&f.arr[u]));
                    t.insert((o, u), index[&(x2, gamma2)]);
                }
            }
        }
        t
    };
    let k = bld.finish(
        |&(_, u2), &(o, u)| (o, e.compose(u2, u)),
        |o| (o, e.identity(points[o].0)),
        |&(o, u)| (targets[&(o, u)], e.inverse(u)),
    );
    Fiber {
        groupoid: k.groupoid,
        under: k.keys.iter().map(|k| k.1).collect(),
        arr_index: k.index.into_iter().collect(),
        points,
        index,
    }
}

/// A strict functor from a finite groupoid into finite groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyOfGroupoids {
    pub base: FinGroupoid,
    pub fibers: Vec<FinGroupoid>,
    /// `transport[a] : fibers[src a] → fibers[dst a]`.
    pub transport: Vec<GFunctor>,
}

impl FamilyOfGroupoids {
    /// Checks endpoint shapes and strict functoriality.
    pub fn new(
        base: FinGroupoid,
        fibers: Vec<FinGroupoid>,
        transport: Vec<GFunctor>,
    ) -> Result<Self> {
        if fibers.len() != base.object_count() {
            return Err(Error::schema("/fibers", "one fiber per base object expected"));
        }
        if transport.len() != base.arrow_count() {
            return Err(Error::schema("/transport", "one functor per base arrow expected"));
        }
        for a in base.arrows() {
            let t = &transport[a];
            if t.domain != fibers[base.src(a)] || t.codomain != fibers[base.dst(a)] {
                return Err(Error::schema(
                    format!("/transport/{a}"),
                    "transport has the wrong domain or codomain",
                ));
            }
            if let Some(m) = t.check().into_iter().next() {
                return Err(Error::Invalid(format!("transport along {a}: {m}")));
            }
        }
        for x in base.objects() {
            if transport[base.identity(x)] != GFunctor::identity(&fibers[x]) {
                return Err(Error::Invalid(format!(
                    "transport along the identity of {x} is not the identity"
                )));
            }
        }
        for (g, f, h) in base.composition_triples() {
            let t = &transport;
            if t[g].after(&t[f]) != t[h] {
                return Err(Error::Invalid(format!(
                    "transport is not strictly functorial at {g}∘{f}"
                )));
            }
        }
        Ok(FamilyOfGroupoids {
            base,
            fibers,
            transport,
        })
    }

    pub fn constant(base: &FinGroupoid, fiber: &FinGroupoid) -> Self {
        FamilyOfGroupoids {
            base: base.clone(),
            fibers: vec![fiber.clone(); base.object_count()],
            transport: vec![GFunctor::identity(fiber); base.arrow_count()],
        }
    }

    /// Reindexes along `s : X → base`.
    pub fn pullback(&self, s: &GFunctor) -> Self {
        assert_eq!(s.codomain, self.base, "pullback along a functor into another base");
        FamilyOfGroupoids {
            base: s.domain.clone(),
            fibers: s.obj.iter().map(|&x| self.fibers[x].clone()).collect(),
            transport: s.arr.iter().map(|&a| self.transport[a].clone()).collect(),
        }
    }
}

/// The family `b ↦ hfiber(t, b)` over the codomain of `t`, transported by
/// post-composition. Returns the fibers' bookkeeping alongside.
pub fn fiber_family(t: &GFunctor) -> (FamilyOfGroupoids, Vec<Fiber<usize>>) {
    let (e, b) = (&t.domain, &t.codomain);
    let m = Mapping::from(t);
    let fibers: Vec<Fiber<usize>> = b.objects().map(|y| hfiber(b, e, &m, &y)).collect();
    let transport = b
        .arrows()
        .map(|beta| {
            let (from, to) = (&fibers[b.src(beta)], &fibers[b.dst(beta)]);
            let obj: Vec<usize> = from
                .points
                .iter()
                .map(|&(x, gamma)| to.index[&(x, b.compose(beta, gamma))])
                .collect();
            let arr = from
                .groupoid
                .arrows()
                .map(|w| to.arr_index[&(obj[from.groupoid.src(w)], from.under[w])])
                .collect();
            GFunctor {
                domain: from.groupoid.clone(),
                codomain: to.groupoid.clone(),
                obj,
                arr,
            }
        })
        .collect();
    let fam = FamilyOfGroupoids {
        base: b.clone(),
        fibers: fibers.iter().map(|f| f.groupoid.clone()).collect(),
        transport,
    };
    (fam, fibers)
}

/// The total groupoid `Σ_{g} fiber(g)` with its projection.
#[derive(Clone, Debug)]
pub struct Total {
    pub groupoid: FinGroupoid,
    pub proj: GFunctor,
    /// `(base object, fiber object)` per object.
    pub points: Vec<(usize, usize)>,
    /// `(base arrow u, fiber arrow m : transport_u(x) → x')` per arrow.
    pub arrows: Vec<(usize, usize)>,
    pub index: HashMap<(usize, usize), usize>,
}

/// Objects `(g, x)`; arrows `(u : g → g', m : transport_u(x) → x')`.
pub fn grothendieck(fam: &FamilyOfGroupoids) -> Total {
    let base = &fam.base;
    let mut points = Vec::new();
    let mut index = HashMap::new();
    for g in base.objects() {
        for x in fam.fibers[g].objects() {
            index.insert((g, x), points.len());
            points.push((g, x));
        }
    }
    let mut bld = Builder::new(points.len());
    for (o, &(g, x)) in points.iter().enumerate() {
        for g2 in base.objects() {
            for &u in base.hom(g, g2) {
                let tx = fam.transport[u].obj[x];
                let fib = &fam.fibers[g2];
                for x2 in fib.objects() {
                    for &m in fib.hom(tx, x2) {
                        bld.arrow((o, u, m), o, index[&(g2, x2)]);
                    }
                }
            }
        }
    }
    let k = bld.finish(
        |&(_, u2, m2), &(o, u, m)| {
            (
                o,
                base.compose(u2, u),
                fam.fibers[base.dst(u2)].compose(m2, fam.transport[u2].arr[m]),
            )
        },
        |o| {
            let (g, x) = points[o];
            (o, base.identity(g), fam.fibers[g].identity(x))
        },
        |&(o, u, m)| {
            let (g, _) = points[o];
            let g2 = base.dst(u);
            let ui = base.inverse(u);
            let fib2 = &fam.fibers[g2];
            let x2 = fib2.dst(m);
            let back = fam.transport[ui].arr[m];
            let mi = fam.fibers[g].inverse(back);
            (index[&(g2, x2)], ui, mi)
        },
    );
    let groupoid = k.groupoid;
    let arrows: Vec<(usize, usize)> = k.keys.iter().map(|&(_, u, m)| (u, m)).collect();
    Total {
        proj: GFunctor {
            domain: groupoid.clone(),
            codomain: base.clone(),
            obj: points.iter().map(|p| p.0).collect(),
            arr: arrows.iter().map(|a| a.0).collect(),
        },
        groupoid,
        points,
        arrows,
        index,
    }
}

/// A section of a family: an object per base object and a connecting arrow
/// `alpha[u] : transport_u(x[src u]) → x[dst u]` per base arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub x: Vec<usize>,
    pub alpha: Vec<usize>,
}

/// The groupoid of sections of a strict family.
#[derive(Clone, Debug)]
pub struct Sections {
    pub groupoid: FinGroupoid,
    pub objects: Vec<Section>,
    /// Per arrow, its component `m[g] : x[g] → x'[g]` at every base object.
    pub arrows: Vec<Vec<usize>>,
    pub index: HashMap<Section, usize>,
    /// `(source section, components) ↦ arrow`.
    pub arr_index: HashMap<(usize, Vec<usize>), usize>,
}

struct Component {
    rep: usize,
    members: Vec<usize>,
    arrows: Vec<usize>,
}

fn components(base: &FinGroupoid) -> (Vec<Component>, Vec<(usize, usize)>) {
    let conn = base.connecting_arrows();
    let mut comps: Vec<Component> = Vec::new();
    let mut which = vec![0; base.object_count()];
    for (x, &(r, _)) in conn.iter().enumerate() {
        if x == r {
            which[x] = comps.len();
            comps.push(Component {
                rep: r,
                members: Vec::new(),
                arrows: Vec::new(),
            });
        }
        which[x] = which[r];
        comps[which[r]].members.push(x);
    }
    for a in base.arrows() {
        comps[which[base.src(a)]].arrows.push(a);
    }
    (comps, conn)
}

/// Sections of `fam` restricted to one connected component of the base.
/// Each local section stores `x` and `alpha` on the component only (as
/// full-length vectors with entries outside the component left at 0).
fn local_sections(
    fam: &FamilyOfGroupoids,
    comp: &Component,
    conn: &[(usize, usize)],
) -> Keyed2 {
    let base = &fam.base;
    let r = comp.rep;
    let aut: Vec<usize> = base.hom(r, r).to_vec();
    // generators of Aut(r)
    let gens = {
        let g = crate::equiv::AutGroup::of(base, r);
        g.generators().into_iter().map(|k| g.elems[k]).collect::<Vec<_>>()
    };
    let fr = &fam.fibers[r];
    let mut sections: Vec<Section> = Vec::new();
    for xr in fr.objects() {
        // candidates for alpha on generators
        let cands: Vec<Vec<usize>> = gens
            .iter()
            .map(|&s| fr.hom(fam.transport[s].obj[xr], xr).to_vec())
            .collect();
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut choice = vec![0; gens.len()];
        'odometer: loop {
            if let Some(alpha_aut) = propagate_cocycle(fam, r, xr, &aut, &gens, &cands, &choice) {
                extend_over_component(fam, comp, conn, xr, &alpha_aut, &mut sections);
            }
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break 'odometer;
                }
                choice[k] += 1;
                if choice[k] < cands[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
    // arrows between local sections
    let mut index = HashMap::new();
    for (i, s) in sections.iter().enumerate() {
        index.insert(s.clone(), i);
    }
    let mut bld = Builder::new(sections.len());
    for (i, s) in sections.iter().enumerate() {
        for (j, s2) in sections.iter().enumerate() {
            for &mr in fr.hom(s.x[r], s2.x[r]) {
                let mut m = vec![0; base.object_count()];
                let mut ok = true;
                for &g in &comp.members {
                    let c = conn[g].1;
                    let fg = &fam.fibers[g];
                    m[g] = fg.compose(
                        s2.alpha[c],
                        fg.compose(fam.transport[c].arr[mr], fg.inverse(s.alpha[c])),
                    );
                }
                for &u in &comp.arrows {
                    let (g, g2) = (base.src(u), base.dst(u));
                    let f2 = &fam.fibers[g2];
                    if f2.compose(m[g2], s.alpha[u])
                        != f2.compose(s2.alpha[u], fam.transport[u].arr[m[g]])
                    {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    bld.arrow((i, j, m), i, j);
                }
            }
        }
    }
    let members = comp.members.clone();
    let k = bld.finish(
        |(_, d, m2), (s, _, m)| {
            let mut out = vec![0; m.len()];
            for &g in &members {
                out[g] = fam.fibers[g].compose(m2[g], m[g]);
            }
            (*s, *d, out)
        },
        |i| {
            let mut out = vec![0; base.object_count()];
            for &g in &members {
                out[g] = fam.fibers[g].identity(sections[i].x[g]);
            }
            (i, i, out)
        },
        |(s, d, m)| {
            let mut out = vec![0; m.len()];
            for &g in &members {
                out[g] = fam.fibers[g].inverse(m[g]);
            }
            (*d, *s, out)
        },
    );
    Keyed2 {
        groupoid: k.groupoid,
        sections,
        arrows: k.keys.into_iter().map(|k| k.2).collect(),
    }
}

struct Keyed2 {
    groupoid: FinGroupoid,
    sections: Vec<Section>,
    arrows: Vec<Vec<usize>>,
}

/// Extends a choice of `alpha` on generators of `Aut(r)` to all of `Aut(r)`
/// via `alpha[s∘w] = alpha[s] ∘ transport_s(alpha[w])`; `None` if the
/// choice is not a cocycle.
fn propagate_cocycle(
    fam: &FamilyOfGroupoids,
    r: usize,
    xr: usize,
    aut: &[usize],
    gens: &[usize],
    cands: &[Vec<usize>],
    choice: &[usize],
) -> Option<HashMap<usize, usize>> {
    let base = &fam.base;
    let fr = &fam.fibers[r];
    let mut alpha: HashMap<usize, usize> = HashMap::new();
    let id = base.identity(r);
    alpha.insert(id, fr.identity(xr));
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let w = queue[head];
        head += 1;
        for (k, &s) in gens.iter().enumerate() {
            let sw = base.compose(s, w);
            let val = fr.compose(cands[k][choice[k]], fam.transport[s].arr[alpha[&w]]);
            match alpha.get(&sw) {
                Some(&old) if old != val => return None,
                Some(_) => {}
                None => {
                    alpha.insert(sw, val);
                    queue.push(sw);
                }
            }
        }
    }
    // full cocycle check
    for &v in aut {
        for &w in aut {
            let vw = base.compose(v, w);
            if alpha[&vw] != fr.compose(alpha[&v], fam.transport[v].arr[alpha[&w]]) {
                return None;
            }
        }
    }
    Some(alpha)
}

fn extend_over_component(
    fam: &FamilyOfGroupoids,
    comp: &Component,
    conn: &[(usize, usize)],
    xr: usize,
    alpha_aut: &HashMap<usize, usize>,
    out: &mut Vec<Section>,
) {
    let base = &fam.base;
    let r = comp.rep;
    let others: Vec<usize> = comp.members.iter().copied().filter(|&g| g != r).collect();
    // choices of alpha on the connecting arrow into each non-representative
    let cands: Vec<Vec<usize>> = others
        .iter()
        .map(|&g| {
            let c = conn[g].1;
            let fg = &fam.fibers[g];
            let start = fam.transport[c].obj[xr];
            fg.objects().flat_map(|y| fg.hom(start, y).to_vec()).collect()
        })
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut choice = vec![0; others.len()];
    loop {
        let n = base.object_count();
        let mut x = vec![0; n];
        let mut alpha = vec![0; base.arrow_count()];
        let mut ac = vec![0; n]; // alpha on connecting arrows
        x[r] = xr;
        ac[r] = fam.fibers[r].identity(xr);
        for (k, &g) in others.iter().enumerate() {
            let a = cands[k][choice[k]];
            ac[g] = a;
            x[g] = fam.fibers[g].dst(a);
        }
        for &u in &comp.arrows {
            let (g, g2) = (base.src(u), base.dst(u));
            let (cg, cg2) = (conn[g].1, conn[g2].1);
            let w = base.compose(base.inverse(cg2), base.compose(u, cg));
            let f2 = &fam.fibers[g2];
            let back = fam.transport[u].arr[ac[g]];
            alpha[u] = f2.compose(
                ac[g2],
                f2.compose(fam.transport[cg2].arr[alpha_aut[&w]], f2.inverse(back)),
            );
        }
        out.push(Section { x, alpha });
        let mut k = 0;
        loop {
            if k == choice.len() {
                return;
            }
            choice[k] += 1;
            if choice[k] < cands[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// The groupoid of (homotopy) sections: objects are `x` and `alpha` with
/// `alpha[id] = id` and `alpha[v∘u] = alpha[v] ∘ transport_v(alpha[u])`;
/// arrows are families `m[g]` commuting with the `alpha`s.
pub fn hsections(fam: &FamilyOfGroupoids) -> Sections {
    let base = &fam.base;
    let (comps, conn) = components(base);
    let locals: Vec<Keyed2> = comps.iter().map(|c| local_sections(fam, c, &conn)).collect();
    let radix: Vec<usize> = locals.iter().map(|l| l.sections.len()).collect();
    let total: usize = radix.iter().product();
    let decode = |mut i: usize| -> Vec<usize> {
        let mut out = vec![0; radix.len()];
        for k in (0..radix.len()).rev() {
            out[k] = i % radix[k];
            i /= radix[k];
        }
        out
    };
    let encode = |v: &[usize]| -> usize { v.iter().zip(&radix).fold(0, |acc, (&d, &r)| acc * r + d) };
    let merge_section = |parts: &[usize]| -> Section {
        let mut s = Section {
            x: vec![0; base.object_count()],
            alpha: vec![0; base.arrow_count()],
        };
        for (c, (&p, comp)) in parts.iter().zip(&comps).enumerate() {
            let l = &locals[c].sections[p];
            for &g in &comp.members {
                s.x[g] = l.x[g];
            }
            for &u in &comp.arrows {
                s.alpha[u] = l.alpha[u];
            }
        }
        s
    };
    let objects: Vec<Section> = (0..total).map(|i| merge_section(&decode(i))).collect();

    // Arrows: products of local arrows, enumerated per source object.
    let mut bld = Builder::new(total);
    for i in 0..total {
        let parts = decode(i);
        let outs: Vec<Vec<usize>> = parts
            .iter()
            .zip(&locals)
            .map(|(&p, l)| {
                l.groupoid
                    .objects()
                    .flat_map(|q| l.groupoid.hom(p, q).to_vec())
                    .collect()
            })
            .collect();
        if outs.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut choice = vec![0; outs.len()];
        loop {
            let key: Vec<usize> = choice.iter().zip(&outs).map(|(&c, o)| o[c]).collect();
            let dst: Vec<usize> = key
                .iter()
                .zip(&locals)
                .map(|(&a, l)| l.groupoid.dst(a))
                .collect();
            bld.arrow(key, i, encode(&dst));
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < outs[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    let k = bld.finish(
        |g, f| {
            g.iter()
                .zip(f)
                .zip(&locals)
                .map(|((&a, &b), l)| l.groupoid.compose(a, b))
                .collect()
        },
        |i| {
            decode(i)
                .iter()
                .zip(&locals)
                .map(|(&p, l)| l.groupoid.identity(p))
                .collect()
        },
        |f| f.iter().zip(&locals).map(|(&a, l)| l.groupoid.inverse(a)).collect(),
    );
    let arrows: Vec<Vec<usize>> = k
        .keys
        .iter()
        .map(|key| {
            let mut m = vec![0; base.object_count()];
            for (c, (&a, comp)) in key.iter().zip(&comps).enumerate() {
                for &g in &comp.members {
                    m[g] = locals[c].arrows[a][g];
                }
            }
            m
        })
        .collect();
    let groupoid = k.groupoid;
    let index = objects.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let arr_index = arrows
        .iter()
        .enumerate()
        .map(|(a, m)| ((groupoid.src(a), m.clone()), a))
        .collect();
    Sections {
        groupoid,
        objects,
        arrows,
        index,
        arr_index,
    }
}

/// `κ ↦ Π_{z ∈ hfiber(p, k(κ))} Y(z)` as a strict family over `K`, where
/// `Y` is a family over the domain of `p`. Transport along `a : κ → κ'`
/// reindexes sections by `(e, ε') ↦ (e, k(a)⁻¹ ∘ ε')`.
#[derive(Clone, Debug)]
pub struct DependentProduct {
    pub family: FamilyOfGroupoids,
    pub fibers: Vec<Fiber<usize>>,
    pub sections: Vec<Sections>,
}

pub fn dependent_product(
    p: &GFunctor,
    k: &GFunctor,
    y: &FamilyOfGroupoids,
) -> Result<DependentProduct> {
    assert_eq!(p.codomain, k.codomain);
    assert_eq!(y.base, p.domain);
    let b = &p.codomain;
    let kk = &k.domain;
    let pm = Mapping::from(p);
    let fibers: Vec<Fiber<usize>> = kk
        .objects()
        .map(|kappa| hfiber(b, &p.domain, &pm, &k.obj[kappa]))
        .collect();
    let sections: Vec<Sections> = fibers
        .iter()
        .map(|f| hsections(&y.pullback(&f.inclusion(&p.domain))))
        .collect();
    let transport = kk
        .arrows()
        .map(|a| {
            let (from, to) = (kk.src(a), kk.dst(a));
            let beta_inv = b.inverse(k.arr[a]);
            let (ff, ft) = (&fibers[from], &fibers[to]);
            // rho: objects of the target fiber back to the source fiber
            let rho: Vec<usize> = ft
                .points
                .iter()
                .map(|&(e, eps)| ff.index[&(e, b.compose(beta_inv, eps))])
                .collect();
            let rho_arr: Vec<usize> = ft
                .groupoid
                .arrows()
                .map(|w| ff.arr_index[&(rho[ft.groupoid.src(w)], ft.under[w])])
                .collect();
            let (sf, st) = (&sections[from], &sections[to]);
            let obj: Vec<usize> = sf
                .objects
                .iter()
                .map(|s| {
                    let moved = Section {
                        x: rho.iter().map(|&z| s.x[z]).collect(),
                        alpha: rho_arr.iter().map(|&w| s.alpha[w]).collect(),
                    };
                    st.index[&moved]
                })
                .collect();
            let arr = sf
                .groupoid
                .arrows()
                .map(|m| {
                    let moved: Vec<usize> = rho.iter().map(|&z| sf.arrows[m][z]).collect();
                    st.arr_index[&(obj[sf.groupoid.src(m)], moved)]
                })
                .collect();
            GFunctor {
                domain: sf.groupoid.clone(),
                codomain: st.groupoid.clone(),
                obj,
                arr,
            }
        })
        .collect();
    let family = FamilyOfGroupoids::new(
        kk.clone(),
        sections.iter().map(|s| s.groupoid.clone()).collect(),
        transport,
    )?;
    Ok(DependentProduct {
        family,
        fibers,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{find_equivalence, gcard, Budget};

    fn swap_family() -> FamilyOfGroupoids {
        // Disc(2) over BZ2 with σ acting by swapping the two objects.
        let base = FinGroupoid::cyclic(2);
        let d2 = FinGroupoid::discrete(2);
        let swap = GFunctor::new(d2.clone(), d2.clone(), vec![1, 0], vec![1, 0]).unwrap();
        FamilyOfGroupoids::new(base, vec![d2.clone()], vec![GFunctor::identity(&d2), swap])
            .unwrap()
    }

    #[test]
    fn discrete_pullback_is_set_pullback() {
        let d2 = FinGroupoid::discrete(2);
        let d3 = FinGroupoid::discrete(3);
        let one = FinGroupoid::unit();
        let f = Mapping::from(&GFunctor::to_unit(&d2));
        let g = Mapping::from(&GFunctor::to_unit(&d3));
        let p = hpullback(&one, &d2, &f, &d3, &g);
        assert_eq!(p.groupoid, FinGroupoid::discrete(6));
    }

    #[test]
    fn loop_space_of_bz2() {
        let bz2 = FinGroupoid::cyclic(2);
        let pt = Mapping::from(&GFunctor::point(&bz2, 0));
        let one = FinGroupoid::unit();
        let p = hpullback(&bz2, &one, &pt, &one, &pt);
        assert_eq!(p.groupoid, FinGroupoid::discrete(2));
        let fib = hfiber(&bz2, &one, &pt, &0);
        assert_eq!(fib.groupoid, FinGroupoid::discrete(2));
    }

    #[test]
    fn pullback_along_identity() {
        let mut budget = Budget::default();
        let x = FinGroupoid::cyclic_blocks(&[2, 1]);
        let z = FinGroupoid::cyclic(2);
        let f = GFunctor::new(x.clone(), z.clone(), vec![0, 0], vec![0, 1, 0]).unwrap();
        assert!(f.check().is_empty());
        let p = hpullback(&z, &x, &Mapping::from(&f), &z, &Mapping::from(&GFunctor::identity(&z)));
        assert!(find_equivalence(&p.groupoid, &x, &mut budget).unwrap().is_some());
    }

    #[test]
    fn fiber_of_identity_is_contractible() {
        let mut budget = Budget::default();
        let a = FinGroupoid::cyclic_blocks(&[3, 1]);
        for b in a.objects() {
            let fib = hfiber(&a, &a, &Mapping::from(&GFunctor::identity(&a)), &b);
            assert!(find_equivalence(&fib.groupoid, &FinGroupoid::unit(), &mut budget)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn grothendieck_examples() {
        let mut budget = Budget::default();
        let fam = FamilyOfGroupoids::constant(&FinGroupoid::discrete(2), &FinGroupoid::discrete(3));
        assert_eq!(grothendieck(&fam).groupoid, FinGroupoid::discrete(6));
        let total = grothendieck(&swap_family());
        assert!(find_equivalence(&total.groupoid, &FinGroupoid::unit(), &mut budget)
            .unwrap()
            .is_some());
        assert!(total.proj.check().is_empty());
    }

    #[test]
    fn non_strict_family_rejected() {
        let base = FinGroupoid::cyclic(2);
        let d2 = FinGroupoid::discrete(2);
        let swap = GFunctor::new(d2.clone(), d2.clone(), vec![1, 0], vec![1, 0]).unwrap();
        // transport along the identity must be the identity
        let r = FamilyOfGroupoids::new(base, vec![d2.clone()], vec![swap.clone(), swap]);
        assert!(r.is_err());
    }

    #[test]
    fn section_examples() {
        let s = hsections(&FamilyOfGroupoids::constant(
            &FinGroupoid::discrete(3),
            &FinGroupoid::discrete(2),
        ));
        assert_eq!(s.groupoid, FinGroupoid::discrete(8));
        let s = hsections(&FamilyOfGroupoids::constant(
            &FinGroupoid::cyclic(2),
            &FinGroupoid::discrete(2),
        ));
        assert_eq!(s.groupoid, FinGroupoid::discrete(2));
        let s = hsections(&swap_family());
        assert_eq!(s.groupoid.object_count(), 0);
        // sections over the empty base: one
        let s = hsections(&FamilyOfGroupoids::constant(
            &FinGroupoid::empty(),
            &FinGroupoid::discrete(2),
        ));
        assert_eq!(s.groupoid, FinGroupoid::unit());
    }

    #[test]
    fn homotopy_fixed_points_of_trivial_action_on_bz2() {
        // Sections of the constant family BZ2 over BZ2 are Hom(Z2, Z2) as a
        // groupoid under conjugation: two objects with two automorphisms each.
        let s = hsections(&FamilyOfGroupoids::constant(
            &FinGroupoid::cyclic(2),
            &FinGroupoid::cyclic(2),
        ));
        assert_eq!(gcard(&s.groupoid), num_rational::BigRational::from_integer(1.into()));
        assert_eq!(s.groupoid.object_count(), 2);
    }

    #[test]
    fn fiber_family_is_strict() {
        let e = FinGroupoid::cyclic_blocks(&[1, 2]);
        let b = FinGroupoid::cyclic(2);
        let t = GFunctor::new(e.clone(), b.clone(), vec![0, 0], vec![0, 0, 1]).unwrap();
        assert!(t.check().is_empty());
        let (fam, _) = fiber_family(&t);
        let fam = FamilyOfGroupoids::new(fam.base, fam.fibers, fam.transport).unwrap();
        // round trip: the total space of the fibers is equivalent to E
        let total = grothendieck(&fam);
        let mut budget = Budget::default();
        assert!(find_equivalence(&total.groupoid, &e, &mut budget).unwrap().is_some());
    }
}
