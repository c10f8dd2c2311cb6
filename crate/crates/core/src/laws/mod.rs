//! The law catalog: seeded instances, checks with re-verifiable witnesses,
//! and JSON reports.

mod checks;
pub mod gen;
pub mod ops;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equiv::{find_equivalence, verify_equivalence, Budget, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::gpd::{FinGroupoid, GFunctor};
use crate::json::{functor_from_json, functor_to_json, poly_witness_from_json, poly_witness_to_json, span_witness_from_json, span_witness_to_json, to_text, Artifact};
use crate::poly::{poly_equiv, Polynomial};
use crate::span::{span_equiv, Span};

pub use ops::{Defect, Ops};

macro_rules! catalog {
    ($($v:ident = $name:literal, $gen:literal, $stmt:literal;)*) => {
        /// Every law the suite can check.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum LawId { $(#[serde(rename = $name)] $v,)* }

        impl LawId {
            pub const ALL: &'static [LawId] = &[$(LawId::$v,)*];

            pub fn name(self) -> &'static str {
                match self { $(LawId::$v => $name,)* }
            }

            /// The instance generator the law draws from.
            pub fn generator(self) -> &'static str {
                match self { $(LawId::$v => $gen,)* }
            }

            /// What is checked, in one line.
            pub fn statement(self) -> &'static str {
                match self { $(LawId::$v => $stmt,)* }
            }
        }
    };
}

catalog! {
    SpanAssoc = "span-assoc", "three composable spans",
        "(h ∘ g) ∘ f and h ∘ (g ∘ f) are equivalent spans";
    SpanUnit = "span-unit", "one span",
        "identity spans are units for composition up to equivalence";
    SpanFunctorLift = "span-functor-lift", "two composable functors",
        "L and R send composites and identities to composites and identities; R is L dualized";
    SpanNatLift = "span-nat-lift", "a functor and a naturally isomorphic copy",
        "naturally isomorphic functors give equivalent spans under L and R";
    ProductUp = "product-UP", "two spans with a shared source, one span into a coproduct",
        "disjoint union is the product of spans: pairing then projecting, and projecting then pairing, are identities";
    Terminal = "terminal", "one span",
        "the empty groupoid is terminal and the unique span into it has an empty apex";
    CurryRoundtrip = "curry-roundtrip", "spans out of and into a product",
        "curry and uncurry are mutually inverse up to equivalence";
    Snake = "snake", "one groupoid",
        "both snake composites of the compact structure are the identity up to equivalence";
    MonadTriangles = "monad-triangles", "one base, all bags within the bound",
        "μ ∘ η! and μ ∘ !η are the identity, exactly on bag values and bag morphisms";
    MonadSquare = "monad-square", "one base, bags of bags of bags within the bound",
        "μ ∘ μ! equals μ ∘ !μ, exactly";
    EtaNatural = "eta-natural", "one functor",
        "!f ∘ η equals η ∘ f, exactly";
    MuNatural = "mu-natural", "one functor, bags of bags within the bound",
        "!f ∘ μ equals μ ∘ !!f, exactly";
    EtaCartesian = "eta-cartesian", "one functor",
        "bounded: the naturality square of η is a homotopy pullback";
    MuCartesian = "mu-cartesian", "one functor",
        "bounded: the naturality square of μ is a homotopy pullback";
    BangPreservesPullback = "bang-preserves-pullback", "one cospan",
        "bounded: ! of a homotopy pullback is the homotopy pullback of the !-images";
    SeelySquare = "seely-square", "two bases, bags of bags within the bound",
        "l² ∘ (μ × μ) equals μ ∘ !⟨!ι1, !ι2⟩ ∘ l², exactly and as equivalent spans";
    Monoidal1 = "monoidal-1", "three bases",
        "l² is associative up to the reassociation of coproducts";
    Monoidal2 = "monoidal-2", "one base",
        "l² with the empty bag on the right is the right unitor";
    Monoidal3 = "monoidal-3", "one base",
        "l² with the empty bag on the left is the left unitor";
    Monoidal4 = "monoidal-4", "two bases",
        "l² is symmetric, witnessed by the natural carrier swap";
    KleisliUnit = "kleisli-unit", "one finitary polynomial",
        "ε is a two-sided unit for Kleisli composition, in both composition forms";
    KleisliPolyEquiv = "kleisli-poly-equiv", "two composable finitary polynomials",
        "polynomial composition matches Kleisli composition of the associated spans, and identities match ε";
    FiberedIndexedRoundtrip = "fibered-indexed-roundtrip", "one functor and one family",
        "a functor is its total space of fibers, and a family is the fibers of its total space";
    GcardMultiplicative = "gcard-multiplicative", "one cospan",
        "cardinality multiplies over products and over fibers of homotopy pullbacks";
}

impl LawId {
    pub fn parse(s: &str) -> Option<LawId> {
        LawId::ALL.iter().copied().find(|l| l.name() == s)
    }

    /// Checks whose comparison is taken on bounded pieces of `!`.
    pub fn bounded(self) -> bool {
        matches!(
            self,
            LawId::EtaCartesian | LawId::MuCartesian | LawId::BangPreservesPullback | LawId::SeelySquare
        )
    }

    fn position(self) -> usize {
        LawId::ALL.iter().position(|&l| l == self).expect("catalog entry")
    }
}

/// Suite parameters. All fields are positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Largest generated base groupoid.
    pub max_objects: usize,
    /// Arrow cap for generated base groupoids.
    pub max_arrows: usize,
    /// Largest bag used by the `!` laws and the Kleisli generators.
    pub bang_bound: usize,
    /// Instances per law.
    pub instance_count: usize,
    /// Candidate steps per equivalence search.
    pub search_budget: u64,
}

impl Default for SuiteConfig {
    /// Seed 42, at most 3 objects and 12 arrows, bags of at most 3 elements,
    /// 10 instances per law, and the default search budget.
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            max_objects: 3,
            max_arrows: 12,
            bang_bound: 3,
            instance_count: 10,
            search_budget: DEFAULT_BUDGET,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("max_objects", self.max_objects as u64),
            ("max_arrows", self.max_arrows as u64),
            ("bang_bound", self.bang_bound as u64),
            ("instance_count", self.instance_count as u64),
            ("search_budget", self.search_budget),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(Error::schema(format!("/{name}"), "must be positive"));
            }
        }
        Ok(())
    }
}

/// One assertion made by an instance.
#[derive(Clone, Debug)]
pub enum Claim {
    SpanEquiv { what: String, lhs: Span, rhs: Span },
    PolyEquiv { what: String, lhs: Polynomial, rhs: Polynomial },
    GroupoidEquiv { what: String, lhs: FinGroupoid, rhs: FinGroupoid },
    /// A comparison functor that must be an equivalence.
    Equivalence { what: String, functor: GFunctor },
    /// Exact value comparisons; `mismatch` holds the first disagreement.
    Exact { what: String, checked: usize, mismatch: Option<(Value, Value)> },
}

impl Claim {
    pub fn what(&self) -> &str {
        match self {
            Claim::SpanEquiv { what, .. }
            | Claim::PolyEquiv { what, .. }
            | Claim::GroupoidEquiv { what, .. }
            | Claim::Equivalence { what, .. }
            | Claim::Exact { what, .. } => what,
        }
    }
}

/// Accumulates exact comparisons, keeping the first mismatch.
pub struct Exact {
    what: String,
    checked: usize,
    mismatch: Option<(Value, Value)>,
}

impl Exact {
    pub fn new(what: impl Into<String>) -> Self {
        Exact {
            what: what.into(),
            checked: 0,
            mismatch: None,
        }
    }

    pub fn eq<T: PartialEq>(&mut self, lhs: &T, rhs: &T, show: impl Fn(&T) -> Value) {
        self.checked += 1;
        if self.mismatch.is_none() && lhs != rhs {
            self.mismatch = Some((show(lhs), show(rhs)));
        }
    }

    pub fn holds(&mut self, ok: bool, show: impl FnOnce() -> (Value, Value)) {
        self.checked += 1;
        if self.mismatch.is_none() && !ok {
            self.mismatch = Some(show());
        }
    }

    pub fn done(self) -> Claim {
        Claim::Exact {
            what: self.what,
            checked: self.checked,
            mismatch: self.mismatch,
        }
    }
}

/// A generated instance: its serialized inputs and its claims.
#[derive(Clone, Debug)]
pub struct Instance {
    pub inputs: Value,
    pub claims: Vec<Claim>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    BudgetExceeded,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub seed_index: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
    pub millis: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_exceeded: usize,
    pub errors: usize,
}

impl Summary {
    fn add(&mut self, v: Verdict) {
        self.total += 1;
        match v {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::BudgetExceeded => self.budget_exceeded += 1,
            Verdict::Error => self.errors += 1,
        }
    }

    fn merge(&mut self, o: &Summary) {
        self.total += o.total;
        self.passed += o.passed;
        self.failed += o.failed;
        self.budget_exceeded += o.budget_exceeded;
        self.errors += o.errors;
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: LawId,
    pub bounded: bool,
    pub statement: String,
    pub instances: Vec<InstanceReport>,
    pub summary: Summary,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.summary.all_passed()
    }

    pub fn first_failure(&self) -> Option<&InstanceReport> {
        self.instances.iter().find(|i| i.verdict != Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub defect: Option<Defect>,
    pub laws: Vec<LawReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.all_passed()
    }

    /// 3 if only budget overruns kept the suite from passing, 1 on any
    /// failure, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        let s = &self.summary;
        if s.failed + s.errors > 0 {
            1
        } else if s.budget_exceeded > 0 {
            3
        } else {
            0
        }
    }
}

macro_rules! json_artifact {
    ($t:ty) => {
        impl Artifact for $t {
            fn to_json(&self) -> Value {
                serde_json::to_value(self).expect("reports serialize")
            }
            fn from_json(v: &Value) -> Result<Self> {
                serde_json::from_value(v.clone()).map_err(|e| Error::schema("", e.to_string()))
            }
        }
    };
}
json_artifact!(SuiteReport);
json_artifact!(LawReport);
json_artifact!(SuiteConfig);

impl SuiteReport {
    /// The report with every timing zeroed, for determinism comparisons.
    pub fn without_timings(&self) -> SuiteReport {
        let mut r = self.clone();
        for l in &mut r.laws {
            for i in &mut l.instances {
                i.millis = 0;
            }
        }
        r
    }

    pub fn render(&self) -> String {
        to_text(&self.to_json())
    }
}

/// Builds instance `index` of `law`.
pub fn instance(law: LawId, cfg: &SuiteConfig, index: u64, ops: &Ops) -> Result<Instance> {
    let mut g = gen::Gen::new(gen::stream_seed(cfg.seed, law.position(), index));
    checks::build(law, &mut g, cfg, ops)
}

enum Settled {
    Pass(Value),
    Fail(Value),
}

fn settle(claim: &Claim, budget: &mut Budget) -> Result<Settled> {
    let what = claim.what().to_string();
    Ok(match claim {
        Claim::SpanEquiv { lhs, rhs, .. } => match span_equiv(lhs, rhs, budget)? {
            Some(w) => Settled::Pass(json!({"what": what, "kind": "span-equivalence", "witness": span_witness_to_json(&w)})),
            None => Settled::Fail(json!({"what": what, "lhs": lhs.to_json(), "rhs": rhs.to_json()})),
        },
        Claim::PolyEquiv { lhs, rhs, .. } => match poly_equiv(lhs, rhs, budget)? {
            Some(w) => Settled::Pass(json!({"what": what, "kind": "polynomial-equivalence", "witness": poly_witness_to_json(&w)})),
            None => Settled::Fail(json!({"what": what, "lhs": lhs.to_json(), "rhs": rhs.to_json()})),
        },
        Claim::GroupoidEquiv { lhs, rhs, .. } => match find_equivalence(lhs, rhs, budget)? {
            Some(w) => Settled::Pass(json!({"what": what, "kind": "groupoid-equivalence", "witness": functor_to_json(&w.functor)})),
            None => Settled::Fail(json!({"what": what, "lhs": lhs.to_json(), "rhs": rhs.to_json()})),
        },
        Claim::Equivalence { functor, .. } => {
            let e = verify_equivalence(functor);
            let evidence = json!({
                "functorial": e.functorial,
                "full": e.full,
                "faithful": e.faithful,
                "essentially_surjective": e.essentially_surjective,
            });
            if e.holds() {
                Settled::Pass(json!({"what": what, "kind": "comparison", "evidence": evidence, "functor": functor_to_json(functor)}))
            } else {
                Settled::Fail(json!({
                    "what": what,
                    "evidence": evidence,
                    "domain": functor.domain.to_json(),
                    "codomain": functor.codomain.to_json(),
                    "functor": functor_to_json(functor),
                }))
            }
        }
        Claim::Exact { checked, mismatch, .. } => match mismatch {
            None => Settled::Pass(json!({"what": what, "kind": "exact", "checked": checked})),
            Some((l, r)) => Settled::Fail(json!({"what": what, "lhs": l, "rhs": r})),
        },
    })
}

fn run_instance(law: LawId, cfg: &SuiteConfig, index: u64, ops: &Ops) -> InstanceReport {
    let start = Instant::now();
    let mut budget = Budget::new(cfg.search_budget);
    let outcome = instance(law, cfg, index, ops).and_then(|inst| {
        let mut passed = Vec::new();
        for c in &inst.claims {
            match settle(c, &mut budget)? {
                Settled::Pass(w) => passed.push(w),
                Settled::Fail(detail) => {
                    return Ok(Err(json!({"inputs": inst.inputs, "claim": detail})));
                }
            }
        }
        Ok(Ok(json!({"claims": passed})))
    });
    let (verdict, witness, counterexample, message) = match outcome {
        Ok(Ok(w)) => (Verdict::Pass, Some(w), None, None),
        Ok(Err(c)) => (Verdict::Fail, None, Some(c), None),
        Err(Error::BudgetExceeded(n)) => (
            Verdict::BudgetExceeded,
            None,
            None,
            Some(Error::BudgetExceeded(n).to_string()),
        ),
        Err(e) => (Verdict::Error, None, None, Some(e.to_string())),
    };
    InstanceReport {
        seed_index: index,
        verdict,
        witness,
        counterexample,
        message,
        millis: start.elapsed().as_millis() as u64,
    }
}

/// Runs `cfg.instance_count` instances of one law.
pub fn check_law(law: LawId, cfg: &SuiteConfig) -> LawReport {
    check_law_with(law, cfg, &Ops::default())
}

pub fn check_law_with(law: LawId, cfg: &SuiteConfig, ops: &Ops) -> LawReport {
    let instances: Vec<InstanceReport> = (0..cfg.instance_count as u64)
        .into_par_iter()
        .map(|i| run_instance(law, cfg, i, ops))
        .collect();
    let mut summary = Summary::default();
    for i in &instances {
        summary.add(i.verdict);
    }
    LawReport {
        law,
        bounded: law.bounded(),
        statement: law.statement().to_string(),
        instances,
        summary,
    }
}

/// Runs the given laws (all of them if `laws` is empty).
pub fn run_suite(cfg: &SuiteConfig, laws: &[LawId], defect: Option<Defect>) -> SuiteReport {
    let ops = Ops::with(defect);
    let selected: Vec<LawId> = if laws.is_empty() { LawId::ALL.to_vec() } else { laws.to_vec() };
    let mut reports: Vec<LawReport> = selected.par_iter().map(|&l| check_law_with(l, cfg, &ops)).collect();
    reports.sort_by_key(|r| r.law);
    let mut summary = Summary::default();
    for r in &reports {
        summary.merge(&r.summary);
    }
    SuiteReport {
        config: cfg.clone(),
        defect,
        laws: reports,
        summary,
    }
}

/// Re-verifies every witness of a loaded report against regenerated
/// instances. Returns the `(law, seed_index)` pairs that did not verify.
pub fn recheck(report: &SuiteReport) -> Vec<(LawId, u64)> {
    let ops = Ops::with(report.defect);
    let mut bad = Vec::new();
    for l in &report.laws {
        for i in &l.instances {
            if i.verdict != Verdict::Pass {
                continue;
            }
            let ok = i.witness.as_ref().is_some_and(|w| {
                instance(l.law, &report.config, i.seed_index, &ops)
                    .map(|inst| recheck_instance(&inst, w))
                    .unwrap_or(false)
            });
            if !ok {
                bad.push((l.law, i.seed_index));
            }
        }
    }
    bad
}

fn recheck_instance(inst: &Instance, witness: &Value) -> bool {
    let Some(items) = witness.get("claims").and_then(Value::as_array) else {
        return false;
    };
    if items.len() != inst.claims.len() {
        return false;
    }
    inst.claims.iter().zip(items).all(|(c, w)| {
        if w.get("what").and_then(Value::as_str) != Some(c.what()) {
            return false;
        }
        let body = w.get("witness").cloned().unwrap_or(Value::Null);
        match c {
            Claim::SpanEquiv { lhs, rhs, .. } => span_witness_from_json(&body, lhs, rhs).is_ok(),
            Claim::PolyEquiv { lhs, rhs, .. } => poly_witness_from_json(&body, lhs, rhs).is_ok(),
            Claim::GroupoidEquiv { lhs, rhs, .. } => functor_from_json(&body, "", lhs, rhs)
                .map(|f| verify_equivalence(&f).holds())
                .unwrap_or(false),
            Claim::Equivalence { functor, .. } => {
                w.get("functor") == Some(&functor_to_json(functor)) && verify_equivalence(functor).holds()
            }
            Claim::Exact { checked, mismatch, .. } => {
                mismatch.is_none() && w.get("checked").and_then(Value::as_u64) == Some(*checked as u64)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteConfig {
        SuiteConfig {
            instance_count: 3,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn every_law_holds_on_the_correct_primitives() {
        for &law in LawId::ALL.iter() {
            let t = Instant::now();
            let r = check_law(law, &quick());
            let bad = r.instances.iter().find(|i| i.verdict != Verdict::Pass);
            assert!(bad.is_none(), "{}: {:?}", law.name(), bad);
            eprintln!("{} {:?}", law.name(), t.elapsed());
        }
    }

    #[test]
    fn every_defect_is_caught() {
        for d in Defect::ALL {
            let r = run_suite(&quick(), LawId::ALL, Some(d));
            let caught: Vec<&str> = r.laws.iter().filter(|l| l.summary.failed > 0).map(|l| l.law.name()).collect();
            eprintln!("{} caught by {:?}", d.name(), caught);
            assert!(!caught.is_empty(), "{} slipped through", d.name());
            let fail = r.laws.iter().flat_map(|l| &l.instances).find(|i| i.verdict == Verdict::Fail).unwrap();
            assert!(fail.counterexample.is_some());
            assert_eq!(r.exit_code(), 1);
        }
    }

    #[test]
    fn reports_round_trip_and_recheck() {
        let laws = [LawId::SpanUnit, LawId::KleisliPolyEquiv, LawId::EtaCartesian, LawId::GcardMultiplicative];
        let r = run_suite(&quick(), &laws, None);
        assert_eq!(r.exit_code(), 0);
        let text = r.render();
        let back = SuiteReport::from_json(&crate::json::parse_value(&text).unwrap()).unwrap();
        assert_eq!(back.render(), text);
        assert!(recheck(&back).is_empty());
    }

    #[test]
    fn kleisli_laws_hold_on_affine_instances() {
        let cfg = SuiteConfig {
            bang_bound: 1,
            ..quick()
        };
        let r = run_suite(&cfg, &[LawId::KleisliUnit, LawId::KleisliPolyEquiv], None);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn runs_are_reproducible() {
        let laws = [LawId::SpanAssoc, LawId::MonadSquare];
        let a = run_suite(&quick(), &laws, None).without_timings();
        let b = run_suite(&quick(), &laws, None).without_timings();
        assert_eq!(a.render(), b.render());
    }
}
