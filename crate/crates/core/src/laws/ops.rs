//! The primitives the law checks go through, with switchable defects.

use serde::{Deserialize, Serialize};

use crate::bang::{mu_mor, mu_obj, BagMorphism, Endpoint, Mor, Obj};
use crate::effective::Effective;
use crate::error::Result;
use crate::gpd::{Coproduct, FinGroupoid, GFunctor};
use crate::limits::{hpullback, HPullback};
use crate::span::{compose_via, Leg, Span};

/// A deliberately wrong variant of one primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Defect {
    /// `μ` concatenates the inner bags in reverse outer order.
    MuReversedOuter,
    /// `l²` keeps the right block's permutation but replaces its components
    /// by identities.
    SeelyDropsRight,
    /// Pullbacks keep only the points whose filler is an identity.
    StrictPullback,
}

impl Defect {
    pub const ALL: [Defect; 3] = [Defect::MuReversedOuter, Defect::SeelyDropsRight, Defect::StrictPullback];

    pub fn name(self) -> &'static str {
        match self {
            Defect::MuReversedOuter => "mu-reversed-outer",
            Defect::SeelyDropsRight => "seely-drops-right",
            Defect::StrictPullback => "strict-pullback",
        }
    }

    pub fn parse(s: &str) -> Option<Defect> {
        Defect::ALL.into_iter().find(|d| d.name() == s)
    }
}

/// The primitives used by the law checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ops {
    pub defect: Option<Defect>,
}

fn reverse_outer_obj(x: &Obj) -> Obj {
    let b = x.as_bag().expect("bag");
    Obj::bag(b.colors.iter().rev().cloned().collect())
}

fn reverse_outer_mor(m: &Mor) -> Mor {
    let b = m.as_bag().expect("bag morphism");
    let n = b.sigma.len();
    Mor::Bag(BagMorphism {
        sigma: (0..n).map(|i| n - 1 - b.sigma[n - 1 - i]).collect(),
        components: b.components.iter().rev().cloned().collect(),
    })
}

/// The identity arrow on an object of any depth.
pub fn identity_at(base: &FinGroupoid, x: &Obj) -> Mor {
    match x {
        Obj::Base(a) => Mor::Base(base.identity(*a)),
        Obj::Bag(b) => Mor::Bag(BagMorphism {
            sigma: (0..b.colors.len()).collect(),
            components: b.colors.iter().map(|c| identity_at(base, c)).collect(),
        }),
    }
}

/// Recolors every leaf.
pub fn map_leaves_obj(x: &Obj, f: &impl Fn(usize) -> usize) -> Obj {
    match x {
        Obj::Base(a) => Obj::Base(f(*a)),
        Obj::Bag(b) => Obj::bag(b.colors.iter().map(|c| map_leaves_obj(c, f)).collect()),
    }
}

pub fn map_leaves_mor(m: &Mor, f: &impl Fn(usize) -> usize) -> Mor {
    match m {
        Mor::Base(u) => Mor::Base(f(*u)),
        Mor::Bag(b) => Mor::Bag(BagMorphism {
            sigma: b.sigma.clone(),
            components: b.components.iter().map(|c| map_leaves_mor(c, f)).collect(),
        }),
    }
}

fn strict_pullback(z: &Endpoint, x: &FinGroupoid, f: &Leg, y: &FinGroupoid, g: &Leg) -> HPullback<Mor> {
    let full = hpullback(z, x, f, y, g);
    let keep: Vec<usize> = (0..full.points.len())
        .filter(|&o| {
            let (a, _, gamma) = &full.points[o];
            *gamma == z.identity(&f.obj[*a])
        })
        .collect();
    let sub = full.groupoid.full_subgroupoid(&keep);
    let restrict = |p: &GFunctor| GFunctor {
        domain: sub.groupoid.clone(),
        codomain: p.codomain.clone(),
        obj: keep.iter().map(|&o| p.obj[o]).collect(),
        arr: sub.keys.iter().map(|&a| p.arr[a]).collect(),
    };
    HPullback {
        proj1: restrict(&full.proj1),
        proj2: restrict(&full.proj2),
        points: keep.iter().map(|&o| full.points[o].clone()).collect(),
        groupoid: sub.groupoid,
    }
}

fn standard(z: &Endpoint, x: &FinGroupoid, f: &Leg, y: &FinGroupoid, g: &Leg) -> HPullback<Mor> {
    hpullback(z, x, f, y, g)
}

/// Looks up pullback objects by point and arrows by their projections.
pub struct PullbackIndex {
    points: std::collections::HashMap<(usize, usize, Mor), usize>,
    arrows: std::collections::HashMap<(usize, usize, usize, usize), usize>,
}

impl PullbackIndex {
    pub fn new(pb: &HPullback<Mor>) -> Self {
        let points = pb.points.iter().enumerate().map(|(o, p)| (p.clone(), o)).collect();
        let g = &pb.groupoid;
        let arrows = g
            .arrows()
            .map(|a| ((g.src(a), g.dst(a), pb.proj1.arr[a], pb.proj2.arr[a]), a))
            .collect();
        PullbackIndex { points, arrows }
    }

    pub fn point(&self, x: usize, y: usize, gamma: &Mor) -> Option<usize> {
        self.points.get(&(x, y, gamma.clone())).copied()
    }

    pub fn arrow(&self, src: usize, dst: usize, u: usize, v: usize) -> Option<usize> {
        self.arrows.get(&(src, dst, u, v)).copied()
    }
}

impl Ops {
    pub fn with(defect: Option<Defect>) -> Self {
        Ops { defect }
    }

    fn is(&self, d: Defect) -> bool {
        self.defect == Some(d)
    }

    pub fn mu_obj(&self, x: &Obj) -> Obj {
        if self.is(Defect::MuReversedOuter) {
            mu_obj(&reverse_outer_obj(x))
        } else {
            mu_obj(x)
        }
    }

    pub fn mu_mor(&self, m: &Mor) -> Mor {
        if self.is(Defect::MuReversedOuter) {
            mu_mor(&reverse_outer_mor(m))
        } else {
            mu_mor(m)
        }
    }

    /// `l²` on bags of any depth: left block then right block, leaves sent
    /// through the injections of `co`.
    pub fn l2_obj(&self, x: &Obj, y: &Obj, co: &Coproduct) -> Obj {
        let (p, q) = (x.as_bag().expect("bag"), y.as_bag().expect("bag"));
        let left = p.colors.iter().map(|c| map_leaves_obj(c, &|a| co.inj1.obj[a]));
        let right = q.colors.iter().map(|c| map_leaves_obj(c, &|a| co.inj2.obj[a]));
        Obj::bag(left.chain(right).collect())
    }

    /// `l²` on arrows `f`, `g`, where `g` starts at `y`.
    pub fn l2_mor(&self, f: &Mor, g: &Mor, y: &Obj, co: &Coproduct) -> Mor {
        let (f, g) = (f.as_bag().expect("bag morphism"), g.as_bag().expect("bag morphism"));
        let n = f.sigma.len();
        let sigma = f.sigma.iter().copied().chain(g.sigma.iter().map(|&j| n + j)).collect();
        let left = f.components.iter().map(|c| map_leaves_mor(c, &|u| co.inj1.arr[u]));
        let right: Vec<Mor> = if self.is(Defect::SeelyDropsRight) {
            let colors = &y.as_bag().expect("bag").colors;
            colors
                .iter()
                .map(|c| identity_at(&co.groupoid, &map_leaves_obj(c, &|a| co.inj2.obj[a])))
                .collect()
        } else {
            g.components.iter().map(|c| map_leaves_mor(c, &|u| co.inj2.arr[u])).collect()
        };
        Mor::Bag(BagMorphism {
            sigma,
            components: left.chain(right).collect(),
        })
    }

    pub fn pullback(&self) -> crate::span::Pullback {
        if self.is(Defect::StrictPullback) {
            strict_pullback
        } else {
            standard
        }
    }

    pub fn hpullback(&self, z: &Endpoint, x: &FinGroupoid, f: &Leg, y: &FinGroupoid, g: &Leg) -> HPullback<Mor> {
        (self.pullback())(z, x, f, y, g)
    }

    pub fn compose(&self, g: &Span, f: &Span) -> Result<Span> {
        compose_via(self.pullback(), g, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bang::{seely2_mor, seely2_obj};
    use crate::gpd::coproduct;

    #[test]
    fn generic_l2_agrees_with_the_base_level_one() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        let b = FinGroupoid::cyclic(3);
        let co = coproduct(&a, &b);
        let ops = Ops::default();
        let x = Obj::leaves(&[0, 1, 0]);
        let y = Obj::leaves(&[0, 0]);
        assert_eq!(ops.l2_obj(&x, &y, &co), seely2_obj(&co, &x, &y));
        let f = Mor::Bag(BagMorphism {
            sigma: vec![2, 1, 0],
            components: vec![Mor::Base(1), Mor::Base(2), Mor::Base(0)],
        });
        let g = Mor::Bag(BagMorphism {
            sigma: vec![1, 0],
            components: vec![Mor::Base(1), Mor::Base(2)],
        });
        assert_eq!(
            ops.l2_mor(&f, &g, &y, &co),
            seely2_mor(&co, &f, &g)
        );
    }

    #[test]
    fn reversed_mu_differs_only_on_several_blocks() {
        let ops = Ops::with(Some(Defect::MuReversedOuter));
        let one = Obj::bag(vec![Obj::leaves(&[0, 1])]);
        assert_eq!(ops.mu_obj(&one), mu_obj(&one));
        let two = Obj::bag(vec![Obj::leaves(&[0]), Obj::leaves(&[1])]);
        assert_ne!(ops.mu_obj(&two), mu_obj(&two));
    }

    #[test]
    fn strict_pullback_loses_the_loop_space() {
        let z = FinGroupoid::cyclic(2);
        let pt = FinGroupoid::unit();
        let f = crate::span::leg_of(&GFunctor::point(&z, 0));
        let full = standard(&Endpoint::gpd(&z), &pt, &f, &pt, &f);
        let strict = strict_pullback(&Endpoint::gpd(&z), &pt, &f, &pt, &f);
        assert_eq!(full.groupoid.object_count(), 2);
        assert_eq!(strict.groupoid.object_count(), 1);
    }
}
