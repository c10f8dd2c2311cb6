//! JSON codecs for groupoids, functors, spans, polynomials, families and
//! equivalence witnesses.
//!
//! Output is pretty-printed with sorted keys and a trailing newline, so a
//! file written by [`render`] parses and re-renders to the same bytes.

use serde_json::{json, Map, Value};

use crate::bang::{Bag, BagMorphism, Endpoint, Kind, Mor, Obj};
use crate::effective::Mapping;
use crate::equiv::EquivalenceWitness;
use crate::error::{Error, Result};
use crate::gpd::{FinGroupoid, GFunctor};
use crate::limits::FamilyOfGroupoids;
use crate::poly::{PolyEquivWitness, Polynomial};
use crate::span::{Span, SpanEquivWitness};

/// Pretty JSON with sorted keys and a final newline.
pub fn to_text(v: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("", format!("malformed JSON: {e}")))
}

/// A self-describing artifact file.
pub trait Artifact: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

pub fn render<T: Artifact>(x: &T) -> String {
    to_text(&x.to_json())
}

pub fn parse<T: Artifact>(text: &str) -> Result<T> {
    T::from_json(&parse_value(text)?)
}

// ---- field access with JSON pointers ----

fn at(ptr: &str, key: &str) -> String {
    format!("{ptr}/{key}")
}

fn prefixed(ptr: &str, e: Error) -> Error {
    match e {
        Error::Schema { pointer, message } => Error::Schema {
            pointer: format!("{ptr}{pointer}"),
            message,
        },
        Error::Invalid(m) if !ptr.is_empty() => Error::Invalid(format!("{ptr}: {m}")),
        e => e,
    }
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(ptr, "expected an object"))
}

fn field<'a>(v: &'a Value, ptr: &str, key: &str) -> Result<&'a Value> {
    object(v, ptr)?
        .get(key)
        .ok_or_else(|| Error::schema(ptr, format!("missing field \"{key}\"")))
}

fn no_extra(v: &Value, ptr: &str, keys: &[&str]) -> Result<()> {
    for k in object(v, ptr)?.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(Error::schema(at(ptr, k), "unknown field"));
        }
    }
    Ok(())
}

fn index(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| Error::schema(ptr, "expected a non-negative integer"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(ptr, "expected an array"))
}

fn indices(v: &Value, ptr: &str) -> Result<Vec<usize>> {
    array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| index(x, &format!("{ptr}/{i}")))
        .collect()
}

fn list<T>(v: &Value, ptr: &str, f: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| f(x, &format!("{ptr}/{i}")))
        .collect()
}

// ---- groupoids ----

pub fn groupoid_to_json(g: &FinGroupoid) -> Value {
    let arrows: Vec<Value> = g
        .arrows()
        .map(|a| json!({"id": a, "src": g.src(a), "dst": g.dst(a)}))
        .collect();
    let compose: Vec<Value> = g
        .composition_triples()
        .into_iter()
        .map(|(a, b, c)| json!([a, b, c]))
        .collect();
    json!({
        "objects": g.object_count(),
        "arrows": arrows,
        "compose": compose,
        "identity": g.objects().map(|x| g.identity(x)).collect::<Vec<_>>(),
        "inverse": g.arrows().map(|a| g.inverse(a)).collect::<Vec<_>>(),
    })
}

pub fn groupoid_from_json(v: &Value, ptr: &str) -> Result<FinGroupoid> {
    no_extra(v, ptr, &["objects", "arrows", "compose", "identity", "inverse"])?;
    let objects = index(field(v, ptr, "objects")?, &at(ptr, "objects"))?;
    let arrows = list(field(v, ptr, "arrows")?, &at(ptr, "arrows"), |a, p| {
        no_extra(a, p, &["id", "src", "dst"])?;
        let id = index(field(a, p, "id")?, &at(p, "id"))?;
        let src = index(field(a, p, "src")?, &at(p, "src"))?;
        let dst = index(field(a, p, "dst")?, &at(p, "dst"))?;
        Ok((id, src, dst))
    })?;
    for (i, &(id, _, _)) in arrows.iter().enumerate() {
        if id != i {
            return Err(Error::schema(
                format!("{ptr}/arrows/{i}/id"),
                format!("arrow ids must be listed in order; expected {i}, found {id}"),
            ));
        }
    }
    let compose = list(field(v, ptr, "compose")?, &at(ptr, "compose"), |t, p| {
        let xs = indices(t, p)?;
        match xs[..] {
            [a, b, c] => Ok((a, b, c)),
            _ => Err(Error::schema(p, "expected a triple [g, f, g∘f]")),
        }
    })?;
    let identity = indices(field(v, ptr, "identity")?, &at(ptr, "identity"))?;
    let inverse = indices(field(v, ptr, "inverse")?, &at(ptr, "inverse"))?;
    let ends: Vec<(usize, usize)> = arrows.iter().map(|&(_, s, d)| (s, d)).collect();
    let g = FinGroupoid::from_parts(objects, &ends, &compose, &identity, &inverse)
        .map_err(|e| prefixed(ptr, e))?;
    if let Some(v) = g.validate().violations.first() {
        return Err(prefixed(ptr, Error::Invalid(v.to_string())));
    }
    Ok(g)
}

impl Artifact for FinGroupoid {
    fn to_json(&self) -> Value {
        groupoid_to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        groupoid_from_json(v, "")
    }
}

// ---- functors between concrete groupoids ----

pub fn functor_to_json(f: &GFunctor) -> Value {
    json!({"obj": f.obj, "arr": f.arr})
}

pub fn functor_from_json(v: &Value, ptr: &str, domain: &FinGroupoid, codomain: &FinGroupoid) -> Result<GFunctor> {
    no_extra(v, ptr, &["obj", "arr"])?;
    let obj = indices(field(v, ptr, "obj")?, &at(ptr, "obj"))?;
    let arr = indices(field(v, ptr, "arr")?, &at(ptr, "arr"))?;
    let f = GFunctor::new(domain.clone(), codomain.clone(), obj, arr).map_err(|e| prefixed(ptr, e))?;
    if let Some(m) = f.check().into_iter().next() {
        return Err(prefixed(ptr, Error::Invalid(m)));
    }
    Ok(f)
}

// ---- bags ----

pub fn obj_to_json(x: &Obj) -> Value {
    match x {
        Obj::Base(i) => json!(i),
        Obj::Bag(b) => json!({
            "size": b.colors.len(),
            "colors": b.colors.iter().map(obj_to_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn obj_from_json(v: &Value, ptr: &str) -> Result<Obj> {
    if v.is_object() {
        no_extra(v, ptr, &["size", "colors"])?;
        let size = index(field(v, ptr, "size")?, &at(ptr, "size"))?;
        let colors = list(field(v, ptr, "colors")?, &at(ptr, "colors"), obj_from_json)?;
        if colors.len() != size {
            return Err(Error::schema(
                at(ptr, "colors"),
                format!("bag of size {size} has {} colors", colors.len()),
            ));
        }
        Ok(Obj::Bag(Bag { colors }))
    } else {
        Ok(Obj::Base(index(v, ptr)?))
    }
}

pub fn mor_to_json(m: &Mor) -> Value {
    match m {
        Mor::Base(a) => json!(a),
        Mor::Bag(b) => json!({
            "sigma": b.sigma,
            "components": b.components.iter().map(mor_to_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn mor_from_json(v: &Value, ptr: &str) -> Result<Mor> {
    if v.is_object() {
        no_extra(v, ptr, &["sigma", "components"])?;
        let sigma = indices(field(v, ptr, "sigma")?, &at(ptr, "sigma"))?;
        let components = list(field(v, ptr, "components")?, &at(ptr, "components"), mor_from_json)?;
        if components.len() != sigma.len() {
            return Err(Error::schema(at(ptr, "components"), "one component per carrier element expected"));
        }
        let mut seen = vec![false; sigma.len()];
        for (i, &s) in sigma.iter().enumerate() {
            if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::schema(format!("{ptr}/sigma/{i}"), "sigma is not a permutation"));
            }
        }
        Ok(Mor::Bag(BagMorphism { sigma, components }))
    } else {
        Ok(Mor::Base(index(v, ptr)?))
    }
}

pub fn leg_to_json(m: &Mapping<Obj, Mor>) -> Value {
    json!({
        "obj": m.obj.iter().map(obj_to_json).collect::<Vec<_>>(),
        "arr": m.arr.iter().map(mor_to_json).collect::<Vec<_>>(),
    })
}

pub fn leg_from_json(v: &Value, ptr: &str) -> Result<Mapping<Obj, Mor>> {
    no_extra(v, ptr, &["obj", "arr"])?;
    Ok(Mapping {
        obj: list(field(v, ptr, "obj")?, &at(ptr, "obj"), obj_from_json)?,
        arr: list(field(v, ptr, "arr")?, &at(ptr, "arr"), mor_from_json)?,
    })
}

// ---- spans ----

pub fn endpoint_to_json(e: &Endpoint) -> Value {
    json!({"kind": e.kind.name(), "base": groupoid_to_json(&e.base)})
}

pub fn endpoint_from_json(v: &Value, ptr: &str) -> Result<Endpoint> {
    no_extra(v, ptr, &["kind", "base"])?;
    let base = groupoid_from_json(field(v, ptr, "base")?, &at(ptr, "base"))?;
    match field(v, ptr, "kind")?.as_str() {
        Some("gpd") => Ok(Endpoint::gpd(&base)),
        Some("bang") => Ok(Endpoint::bang(&base)),
        Some("bangbang") => Ok(Endpoint::bangbang(&base)),
        _ => Err(Error::schema(at(ptr, "kind"), "expected \"gpd\", \"bang\" or \"bangbang\"")),
    }
}

impl Artifact for Span {
    fn to_json(&self) -> Value {
        json!({
            "left": endpoint_to_json(&self.left),
            "right": endpoint_to_json(&self.right),
            "apex": groupoid_to_json(&self.apex),
            "leg_l": leg_to_json(&self.leg_l),
            "leg_r": leg_to_json(&self.leg_r),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        span_from_json(v, "")
    }
}

pub fn span_from_json(v: &Value, ptr: &str) -> Result<Span> {
    no_extra(v, ptr, &["left", "right", "apex", "leg_l", "leg_r"])?;
    let left = endpoint_from_json(field(v, ptr, "left")?, &at(ptr, "left"))?;
    let right = endpoint_from_json(field(v, ptr, "right")?, &at(ptr, "right"))?;
    let apex = groupoid_from_json(field(v, ptr, "apex")?, &at(ptr, "apex"))?;
    let leg_l = leg_from_json(field(v, ptr, "leg_l")?, &at(ptr, "leg_l"))?;
    let leg_r = leg_from_json(field(v, ptr, "leg_r")?, &at(ptr, "leg_r"))?;
    Span::new(left, right, apex, leg_l, leg_r).map_err(|e| prefixed(ptr, e))
}

// ---- polynomials and families ----

impl Artifact for Polynomial {
    fn to_json(&self) -> Value {
        json!({
            "I": groupoid_to_json(&self.i),
            "J": groupoid_to_json(&self.j),
            "E": groupoid_to_json(&self.e),
            "B": groupoid_to_json(&self.b),
            "s": functor_to_json(&self.s),
            "p": functor_to_json(&self.p),
            "t": functor_to_json(&self.t),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        poly_from_json(v, "")
    }
}

pub fn poly_from_json(v: &Value, ptr: &str) -> Result<Polynomial> {
    no_extra(v, ptr, &["I", "J", "E", "B", "s", "p", "t"])?;
    let g = |k: &str| groupoid_from_json(field(v, ptr, k)?, &at(ptr, k));
    let (i, j, e, b) = (g("I")?, g("J")?, g("E")?, g("B")?);
    let f = |k: &str, d: &FinGroupoid, c: &FinGroupoid| functor_from_json(field(v, ptr, k)?, &at(ptr, k), d, c);
    let s = f("s", &e, &i)?;
    let p = f("p", &e, &b)?;
    let t = f("t", &b, &j)?;
    Polynomial::new(s, p, t).map_err(|e| prefixed(ptr, e))
}

impl Artifact for FamilyOfGroupoids {
    fn to_json(&self) -> Value {
        json!({
            "base": groupoid_to_json(&self.base),
            "fibers": self.fibers.iter().map(groupoid_to_json).collect::<Vec<_>>(),
            "transport": self.transport.iter().map(functor_to_json).collect::<Vec<_>>(),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        family_from_json(v, "")
    }
}

pub fn family_from_json(v: &Value, ptr: &str) -> Result<FamilyOfGroupoids> {
    no_extra(v, ptr, &["base", "fibers", "transport"])?;
    let base = groupoid_from_json(field(v, ptr, "base")?, &at(ptr, "base"))?;
    let fibers = list(field(v, ptr, "fibers")?, &at(ptr, "fibers"), groupoid_from_json)?;
    if fibers.len() != base.object_count() {
        return Err(Error::schema(at(ptr, "fibers"), "one fiber per base object expected"));
    }
    let tp = at(ptr, "transport");
    let raw = array(field(v, ptr, "transport")?, &tp)?;
    if raw.len() != base.arrow_count() {
        return Err(Error::schema(tp, "one functor per base arrow expected"));
    }
    let transport = base
        .arrows()
        .map(|a| {
            functor_from_json(
                &raw[a],
                &format!("{tp}/{a}"),
                &fibers[base.src(a)],
                &fibers[base.dst(a)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    FamilyOfGroupoids::new(base, fibers, transport).map_err(|e| prefixed(ptr, e))
}

// ---- witnesses ----

pub fn span_witness_to_json(w: &SpanEquivWitness) -> Value {
    json!({
        "equivalence": functor_to_json(&w.equivalence.functor),
        "tri_l": w.tri_l.iter().map(mor_to_json).collect::<Vec<_>>(),
        "tri_r": w.tri_r.iter().map(mor_to_json).collect::<Vec<_>>(),
    })
}

/// Decodes a witness between `s1` and `s2` and re-verifies it.
pub fn span_witness_from_json(v: &Value, s1: &Span, s2: &Span) -> Result<SpanEquivWitness> {
    no_extra(v, "", &["equivalence", "tri_l", "tri_r"])?;
    let f = functor_from_json(field(v, "", "equivalence")?, "/equivalence", &s1.apex, &s2.apex)?;
    let equivalence = EquivalenceWitness::certify(f)
        .ok_or_else(|| Error::Invalid("/equivalence is not an equivalence".into()))?;
    let w = SpanEquivWitness {
        equivalence,
        tri_l: list(field(v, "", "tri_l")?, "/tri_l", mor_from_json)?,
        tri_r: list(field(v, "", "tri_r")?, "/tri_r", mor_from_json)?,
    };
    if !w.recheck(s1, s2) {
        return Err(Error::Invalid("witness does not verify".into()));
    }
    Ok(w)
}

pub fn poly_witness_to_json(w: &PolyEquivWitness) -> Value {
    json!({
        "on_b": functor_to_json(&w.on_b.functor),
        "on_e": functor_to_json(&w.on_e.functor),
        "over_j": w.over_j,
        "over_e": w.over_e.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

/// Decodes a witness between `p1` and `p2` and re-verifies it.
pub fn poly_witness_from_json(v: &Value, p1: &Polynomial, p2: &Polynomial) -> Result<PolyEquivWitness> {
    no_extra(v, "", &["on_b", "on_e", "over_j", "over_e"])?;
    let cert = |k: &str, d: &FinGroupoid, c: &FinGroupoid| -> Result<EquivalenceWitness> {
        let f = functor_from_json(field(v, "", k)?, &at("", k), d, c)?;
        EquivalenceWitness::certify(f).ok_or_else(|| Error::Invalid(format!("/{k} is not an equivalence")))
    };
    let w = PolyEquivWitness {
        on_b: cert("on_b", &p1.b, &p2.b)?,
        on_e: cert("on_e", &p1.e, &p2.e)?,
        over_j: indices(field(v, "", "over_j")?, "/over_j")?,
        over_e: list(field(v, "", "over_e")?, "/over_e", |t, p| match indices(t, p)?[..] {
            [a, b] => Ok((a, b)),
            _ => Err(Error::schema(p, "expected a pair")),
        })?,
    };
    if w.over_j.len() != p1.b.object_count() || w.over_e.len() != p1.e.object_count() || !w.recheck(p1, p2) {
        return Err(Error::Invalid("witness does not verify".into()));
    }
    Ok(w)
}

// ---- dispatch on shape ----

/// Any artifact file, recognised by its fields.
#[derive(Clone, Debug)]
pub enum AnyArtifact {
    Groupoid(FinGroupoid),
    Span(Span),
    Polynomial(Polynomial),
    Family(FamilyOfGroupoids),
}

impl AnyArtifact {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyArtifact::Groupoid(_) => "groupoid",
            AnyArtifact::Span(s) if s.left.kind == Kind::Bang && s.right.is_concrete() => "kleisli",
            AnyArtifact::Span(_) => "span",
            AnyArtifact::Polynomial(_) => "polynomial",
            AnyArtifact::Family(_) => "family",
        }
    }
}

impl Artifact for AnyArtifact {
    fn to_json(&self) -> Value {
        match self {
            AnyArtifact::Groupoid(g) => g.to_json(),
            AnyArtifact::Span(s) => s.to_json(),
            AnyArtifact::Polynomial(p) => p.to_json(),
            AnyArtifact::Family(f) => f.to_json(),
        }
    }
    fn from_json(v: &Value) -> Result<Self> {
        let o = object(v, "")?;
        if o.contains_key("objects") {
            FinGroupoid::from_json(v).map(AnyArtifact::Groupoid)
        } else if o.contains_key("apex") {
            Span::from_json(v).map(AnyArtifact::Span)
        } else if o.contains_key("E") {
            Polynomial::from_json(v).map(AnyArtifact::Polynomial)
        } else if o.contains_key("fibers") {
            FamilyOfGroupoids::from_json(v).map(AnyArtifact::Family)
        } else {
            Err(Error::schema("", "not a groupoid, span, polynomial or family"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bang::{bang_span, epsilon};
    use crate::span::span_id;

    fn round_trip<T: Artifact + PartialEq + std::fmt::Debug>(x: &T) {
        let text = render(x);
        let back: T = parse(&text).unwrap();
        assert_eq!(&back, x);
        assert_eq!(render(&back), text);
    }

    #[test]
    fn groupoids_round_trip() {
        for g in [
            FinGroupoid::empty(),
            FinGroupoid::unit(),
            FinGroupoid::cyclic(3),
            FinGroupoid::indiscrete(3),
            FinGroupoid::cyclic_blocks(&[2, 1, 4]),
        ] {
            round_trip(&g);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = render(&FinGroupoid::unit());
        let keys: Vec<usize> = ["arrows", "compose", "identity", "inverse", "objects"]
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn spans_round_trip() {
        let a = FinGroupoid::cyclic_blocks(&[2, 1]);
        round_trip(&span_id(&a));
        let e = epsilon(&a);
        round_trip(&e);
        round_trip(&bang_span(&span_id(&a), 2).unwrap());
        let back = parse::<AnyArtifact>(&render(&e)).unwrap();
        assert_eq!(back.kind(), "kleisli");
    }

    #[test]
    fn polynomials_and_families_round_trip() {
        round_trip(&Polynomial::monomial(3));
        round_trip(&FamilyOfGroupoids::constant(&FinGroupoid::cyclic(2), &FinGroupoid::discrete(3)));
    }

    #[test]
    fn dangling_arrow_names_the_index() {
        let text = r#"{"objects": 1, "arrows": [{"id": 0, "src": 0, "dst": 4}],
            "compose": [[0, 0, 0]], "identity": [0], "inverse": [0]}"#;
        match parse::<FinGroupoid>(text) {
            Err(Error::Schema { pointer, message }) => {
                assert_eq!(pointer, "/arrows/0/dst");
                assert!(message.contains('4'));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_pointer_in_span() {
        let mut v = span_id(&FinGroupoid::unit()).to_json();
        v["apex"]["inverse"] = json!([7]);
        match Span::from_json(&v) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/apex/inverse/0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn law_violations_are_rejected() {
        // two arrows on one object, both claiming to be inverse to themselves,
        // with a non-associative table
        let text = r#"{"objects": 1,
            "arrows": [{"id": 0, "src": 0, "dst": 0}, {"id": 1, "src": 0, "dst": 0}],
            "compose": [[0,0,0],[0,1,1],[1,0,1],[1,1,1]],
            "identity": [0], "inverse": [0, 1]}"#;
        assert!(matches!(parse::<FinGroupoid>(text), Err(Error::Invalid(_))));
    }

    #[test]
    fn witnesses_round_trip_and_recheck() {
        let a = FinGroupoid::cyclic(2);
        let s = span_id(&a);
        let w = crate::span::span_equiv(&s, &s, &mut Default::default()).unwrap().unwrap();
        let back = span_witness_from_json(&span_witness_to_json(&w), &s, &s).unwrap();
        assert_eq!(back, w);
        let p = Polynomial::monomial(2);
        let w = crate::poly::poly_equiv(&p, &p, &mut Default::default()).unwrap().unwrap();
        let back = poly_witness_from_json(&poly_witness_to_json(&w), &p, &p).unwrap();
        assert_eq!(back, w);
    }
}
