//! Seeded instance generators.
//!
//! Groupoids are disjoint unions of cyclic groups, so every generated
//! groupoid is valid by construction and its automorphism groups stay small.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bang::{Bag, BagMorphism, Mor, Obj};
use crate::gpd::{product, FinGroupoid, GFunctor};
use crate::json::{functor_to_json, groupoid_to_json};
use crate::limits::{fiber_family, FamilyOfGroupoids};
use crate::poly::Polynomial;
use crate::span::Span;

/// A groupoid presented as cyclic blocks, remembering the block orders.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub orders: Vec<usize>,
    pub offset: Vec<usize>,
    pub g: FinGroupoid,
}

impl Blocks {
    pub fn new(orders: &[usize]) -> Self {
        let mut offset = Vec::with_capacity(orders.len());
        let mut total = 0;
        for &n in orders {
            offset.push(total);
            total += n;
        }
        Blocks {
            orders: orders.to_vec(),
            offset,
            g: FinGroupoid::cyclic_blocks(orders),
        }
    }

    /// The arrow `generator^k` at block `x`.
    pub fn arrow(&self, x: usize, k: usize) -> usize {
        self.offset[x] + k % self.orders[x]
    }

    /// `(block, exponent)` of an arrow.
    pub fn locate(&self, a: usize) -> (usize, usize) {
        let x = self.g.src(a);
        (x, a - self.offset[x])
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A deterministic stream of instances.
pub struct Gen {
    pub rng: ChaCha8Rng,
}

/// Splits one suite seed into independent per-instance streams.
pub fn stream_seed(seed: u64, law: usize, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add((law as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Between 1 and `max_objects` blocks of order at most `max_order`, with
    /// about a third of the blocks trivial, and at most `max_arrows` arrows.
    pub fn blocks(&mut self, max_objects: usize, max_order: usize, max_arrows: usize) -> Blocks {
        let n = self.rng.gen_range(1..=max_objects.max(1));
        let mut orders = Vec::with_capacity(n);
        let mut budget = max_arrows.max(n);
        for i in 0..n {
            let room = budget - (n - i - 1);
            let cap = max_order.min(room).max(1);
            let k = if self.rng.gen_bool(1.0 / 3.0) {
                1
            } else {
                self.rng.gen_range(1..=cap)
            };
            budget -= k;
            orders.push(k);
        }
        Blocks::new(&orders)
    }

    /// A random functor: each block goes to a block, its generator to an
    /// element whose order divides the source order.
    pub fn functor(&mut self, a: &Blocks, b: &Blocks) -> GFunctor {
        let mut obj = Vec::with_capacity(a.orders.len());
        let mut mult = Vec::with_capacity(a.orders.len());
        for &m in &a.orders {
            let y = self.below(b.orders.len());
            let n = b.orders[y];
            let step = n / gcd(m, n);
            obj.push(y);
            mult.push(step * self.below(n / step) % n);
        }
        self.assemble(a, b, obj, mult)
    }

    /// A faithful functor, if every block of `a` has an order dividing some
    /// block order of `b`.
    pub fn faithful(&mut self, a: &Blocks, b: &Blocks) -> Option<GFunctor> {
        let mut obj = Vec::with_capacity(a.orders.len());
        let mut mult = Vec::with_capacity(a.orders.len());
        for &m in &a.orders {
            let ys: Vec<usize> = (0..b.orders.len()).filter(|&y| b.orders[y] % m == 0).collect();
            let &y = ys.choose(&mut self.rng)?;
            let n = b.orders[y];
            let units: Vec<usize> = (1..=m).filter(|&u| gcd(u, m) == 1).collect();
            obj.push(y);
            mult.push((n / m) * units.choose(&mut self.rng).copied().unwrap_or(1) % n);
        }
        Some(self.assemble(a, b, obj, mult))
    }

    fn assemble(&self, a: &Blocks, b: &Blocks, obj: Vec<usize>, mult: Vec<usize>) -> GFunctor {
        let arr = a
            .g
            .arrows()
            .map(|u| {
                let (x, k) = a.locate(u);
                b.arrow(obj[x], k * mult[x])
            })
            .collect();
        GFunctor::new(a.g.clone(), b.g.clone(), obj, arr).expect("generated functor")
    }

    /// A span `a ⇸ b` with a generated apex.
    pub fn span(&mut self, a: &Blocks, b: &Blocks, apex_objects: usize, max_order: usize) -> Span {
        let x = self.blocks(apex_objects, max_order, 8);
        let l = self.functor(&x, a);
        let r = self.functor(&x, b);
        Span::from_functors(&l, &r)
    }

    /// A span `a × b ⇸ c` (`left_product`) or `c ⇸ a × b`.
    pub fn span_into_product(&mut self, a: &Blocks, b: &Blocks, c: &Blocks, left_product: bool) -> Span {
        let x = self.blocks(2, 2, 8);
        let ab = product(&a.g, &b.g);
        let pair = ab.pair(&self.functor(&x, a), &self.functor(&x, b));
        let other = self.functor(&x, c);
        if left_product {
            Span::from_functors(&pair, &other)
        } else {
            Span::from_functors(&other, &pair)
        }
    }

    /// A finitary polynomial `i → j` whose fibers have at most `max_fiber`
    /// elements, with `e` and `b` of at most `max_objects` objects.
    pub fn polynomial(&mut self, i: &Blocks, j: &Blocks, max_objects: usize, max_fiber: usize) -> Polynomial {
        let b = self.blocks(max_objects, 2, 8);
        // E lists, per base object, elements whose orders divide the base order
        let mut orders = Vec::new();
        let mut over = Vec::new();
        for (y, &n) in b.orders.iter().enumerate() {
            let mut fiber = 0;
            let tries = self.below(max_fiber + 1);
            for _ in 0..tries {
                if orders.len() >= max_objects {
                    break;
                }
                let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
                let &m = divisors.choose(&mut self.rng).expect("1 divides n");
                if fiber + n / m > max_fiber {
                    continue;
                }
                fiber += n / m;
                orders.push(m);
                over.push(y);
            }
        }
        let e = Blocks::new(&orders);
        let mut p_obj = Vec::new();
        let mut p_mult = Vec::new();
        for (x, &m) in orders.iter().enumerate() {
            let n = b.orders[over[x]];
            let units: Vec<usize> = (1..=m).filter(|&u| gcd(u, m) == 1).collect();
            p_obj.push(over[x]);
            p_mult.push((n / m) * units.choose(&mut self.rng).copied().unwrap_or(1) % n);
        }
        let p = self.assemble(&e, &b, p_obj, p_mult);
        let s = self.functor(&e, i);
        let t = self.functor(&b, j);
        Polynomial::new(s, p, t).expect("generated polynomial")
    }

    /// A strict family over `base`: the fibers of a random functor into it.
    pub fn family(&mut self, base: &Blocks) -> FamilyOfGroupoids {
        let e = self.blocks(3, 2, 8);
        fiber_family(&self.functor(&e, base)).0
    }

    /// A random arrow out of `x`, with `base` the groupoid at the leaves.
    pub fn arrow_from(&mut self, base: &FinGroupoid, x: &Obj) -> (Mor, Obj) {
        match x {
            Obj::Base(a) => {
                let outs: Vec<usize> = base.objects().flat_map(|b| base.hom(*a, b).iter().copied()).collect();
                let &u = outs.choose(&mut self.rng).expect("identity");
                (Mor::Base(u), Obj::Base(base.dst(u)))
            }
            Obj::Bag(bag) => {
                let n = bag.colors.len();
                let mut sigma: Vec<usize> = (0..n).collect();
                sigma.shuffle(&mut self.rng);
                let mut target = vec![Obj::Base(0); n];
                let mut components = Vec::with_capacity(n);
                for (i, c) in bag.colors.iter().enumerate() {
                    let (m, t) = self.arrow_from(base, c);
                    components.push(m);
                    target[sigma[i]] = t;
                }
                (
                    Mor::Bag(BagMorphism { sigma, components }),
                    Obj::Bag(Bag { colors: target }),
                )
            }
        }
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("nonempty")
    }
}

pub fn blocks_json(b: &Blocks) -> Value {
    groupoid_to_json(&b.g)
}

pub fn functor_json(f: &GFunctor) -> Value {
    json!({
        "domain": groupoid_to_json(&f.domain),
        "codomain": groupoid_to_json(&f.codomain),
        "functor": functor_to_json(f),
    })
}
