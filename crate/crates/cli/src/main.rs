//! `gpdlab`: validate artifacts, run constructions and the law suite.
//!
//! Exit codes: 0 success, 1 law or comparison failure, 2 parse or validation
//! error, 3 search budget exceeded. `GPDLAB_BUDGET` overrides the search
//! budget of `compare` and `check`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gpdlab::bang::{bang_materialize, bang_materialize_sorted};
use gpdlab::equiv::{find_equivalence, gcard, Budget, DEFAULT_BUDGET};
use gpdlab::error::Error;
use gpdlab::gpd::FinGroupoid;
use gpdlab::json::{
    functor_to_json, parse_value, poly_witness_to_json, span_witness_to_json, to_text, AnyArtifact, Artifact,
};
use gpdlab::kleisli::{kleisli_compose, kleisli_compose_general, poly_to_span, span_to_poly, KleisliMorphism};
use gpdlab::laws::{recheck, run_suite, Defect, LawId, SuiteConfig, SuiteReport};
use gpdlab::limits::FamilyOfGroupoids;
use gpdlab::poly::{eval_at, poly_compose, poly_equiv, Polynomial};
use gpdlab::span::{reduce, span_compose, span_equiv, Span};

#[derive(Parser)]
#[command(name = "gpdlab", version, about = "Finite groupoids, spans, bags and polynomials")]
struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an artifact or a suite report.
    Validate { file: PathBuf },
    /// `second ∘ first` for spans.
    ComposeSpan {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        /// Replace the apex by a skeleton.
        #[arg(long)]
        reduce: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// `second ∘ first` for polynomials.
    ComposePoly {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// `second ∘ first` for Kleisli spans `!I ⇸ J`.
    KleisliCompose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        /// Compose through `δ` and the lifted span instead of directly.
        #[arg(long)]
        general: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Bags of at most `bound` elements over a groupoid.
    Bang {
        #[arg(long)]
        groupoid: PathBuf,
        #[arg(long)]
        bound: usize,
        /// Keep only bags with sorted colors, one per isomorphism class.
        #[arg(long)]
        sorted: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The value of a polynomial on a family, at one object of the target.
    EvalPoly {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        at: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The Kleisli span of a finitary polynomial.
    PolyToSpan {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The polynomial of a Kleisli span.
    SpanToPoly {
        #[arg(long)]
        span: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search for an equivalence between two artifacts of the same kind.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Run the law suite.
    Check {
        /// `all` or a comma-separated list of law names.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        max_objects: Option<usize>,
        #[arg(long)]
        max_arrows: Option<usize>,
        #[arg(long)]
        bang_bound: Option<usize>,
        /// Run against a deliberately broken primitive.
        #[arg(long)]
        defect: Option<String>,
        /// Write the report here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Re-emit an artifact in canonical form.
    Canon {
        file: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List the law catalog.
    Laws,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn budget() -> Result<u64, Failure> {
    match std::env::var("GPDLAB_BUDGET") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(usage(format!("GPDLAB_BUDGET must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_value(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load<T: Artifact>(path: &Path) -> Result<T, Failure> {
    T::from_json(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn kleisli(path: &Path) -> Result<KleisliMorphism, Failure> {
    Ok(KleisliMorphism::new(load::<Span>(path)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn emit_artifact<T: Artifact>(x: &T, out: Option<&Path>) -> Outcome {
    emit(&to_text(&x.to_json()), out)
}

fn is_report(v: &Value) -> bool {
    v.get("laws").is_some() && v.get("config").is_some()
}

fn describe(a: &AnyArtifact) -> Value {
    match a {
        AnyArtifact::Groupoid(g) => json!({
            "objects": g.object_count(),
            "arrows": g.arrow_count(),
            "gcard": gcard(g).to_string(),
        }),
        AnyArtifact::Span(s) => json!({
            "left": s.left.kind.name(),
            "right": s.right.kind.name(),
            "apex_objects": s.apex.object_count(),
            "apex_arrows": s.apex.arrow_count(),
        }),
        AnyArtifact::Polynomial(p) => json!({
            "E": p.e.object_count(),
            "B": p.b.object_count(),
        }),
        AnyArtifact::Family(f) => json!({
            "base_objects": f.base.object_count(),
        }),
    }
}

fn validate(file: &Path, as_json: bool) -> Outcome {
    let v = read(file)?;
    if is_report(&v) {
        let report = SuiteReport::from_json(&v)?;
        let bad = recheck(&report);
        let ok = bad.is_empty();
        if as_json {
            let bad: Vec<Value> = bad.iter().map(|(l, i)| json!({"law": l.name(), "seed_index": i})).collect();
            print!("{}", to_text(&json!({"kind": "report", "valid": ok, "unverified": bad})));
        } else if ok {
            println!("valid report: every witness rechecked");
        } else {
            for (l, i) in &bad {
                println!("witness does not recheck: {} instance {i}", l.name());
            }
        }
        return Ok(if ok { 0 } else { 1 });
    }
    let a = AnyArtifact::from_json(&v).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", file.display(), f.message);
        f
    })?;
    if as_json {
        let mut d = describe(&a);
        d["kind"] = json!(a.kind());
        d["valid"] = json!(true);
        print!("{}", to_text(&d));
    } else {
        println!("valid {}", a.kind());
    }
    Ok(0)
}

fn compare(a: &Path, b: &Path, as_json: bool) -> Outcome {
    let (x, y) = (AnyArtifact::from_json(&read(a)?)?, AnyArtifact::from_json(&read(b)?)?);
    let mut budget = Budget::new(budget()?);
    let (kind, witness) = match (&x, &y) {
        (AnyArtifact::Groupoid(g), AnyArtifact::Groupoid(h)) => (
            "groupoid",
            find_equivalence(g, h, &mut budget)?.map(|w| functor_to_json(&w.functor)),
        ),
        (AnyArtifact::Span(s), AnyArtifact::Span(t)) => {
            if s.left != t.left || s.right != t.right {
                return Err(Error::Mismatch("spans have different endpoints".into()).into());
            }
            ("span", span_equiv(s, t, &mut budget)?.map(|w| span_witness_to_json(&w)))
        }
        (AnyArtifact::Polynomial(p), AnyArtifact::Polynomial(q)) => (
            "polynomial",
            poly_equiv(p, q, &mut budget)?.map(|w| poly_witness_to_json(&w)),
        ),
        _ => return Err(usage(format!("cannot compare a {} with a {}", x.kind(), y.kind()))),
    };
    let equivalent = witness.is_some();
    if as_json {
        print!(
            "{}",
            to_text(&json!({"kind": kind, "equivalent": equivalent, "witness": witness}))
        );
    } else if let Some(w) = witness {
        println!("equivalent {kind}s; witness:");
        print!("{}", to_text(&w));
    } else {
        println!("not equivalent");
    }
    Ok(if equivalent { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn check(
    suite: &str,
    seed: u64,
    instances: Option<usize>,
    max_objects: Option<usize>,
    max_arrows: Option<usize>,
    bang_bound: Option<usize>,
    defect: Option<&str>,
    out: Option<&Path>,
    as_json: bool,
) -> Outcome {
    let d = SuiteConfig::default();
    let cfg = SuiteConfig {
        seed,
        max_objects: max_objects.unwrap_or(d.max_objects),
        max_arrows: max_arrows.unwrap_or(d.max_arrows),
        bang_bound: bang_bound.unwrap_or(d.bang_bound),
        instance_count: instances.unwrap_or(d.instance_count),
        search_budget: budget()?,
    };
    cfg.validate()?;
    let laws: Vec<LawId> = if suite == "all" {
        LawId::ALL.to_vec()
    } else {
        suite
            .split(',')
            .map(|s| LawId::parse(s.trim()).ok_or_else(|| usage(format!("unknown law {s:?}"))))
            .collect::<Result<_, _>>()?
    };
    let defect = match defect {
        Some(s) => Some(Defect::parse(s).ok_or_else(|| usage(format!("unknown defect {s:?}")))?),
        None => None,
    };
    let report = run_suite(&cfg, &laws, defect);
    let text = report.render();
    if let Some(p) = out {
        emit(&text, Some(p))?;
    }
    if as_json {
        print!("{text}");
    } else {
        for l in &report.laws {
            let s = &l.summary;
            let label = if l.passed() { "pass" } else { "FAIL" };
            let bounded = if l.bounded { " (bounded)" } else { "" };
            println!("{label} {}{bounded}: {}/{} instances", l.law.name(), s.passed, s.total);
            if let Some(f) = l.first_failure() {
                let why = f.message.clone().unwrap_or_else(|| format!("{:?}", f.verdict));
                println!("    first failure at instance {}: {why}", f.seed_index);
            }
        }
        let s = &report.summary;
        println!(
            "{} passed, {} failed, {} over budget, {} errors",
            s.passed, s.failed, s.budget_exceeded, s.errors
        );
    }
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Outcome {
    let j = cli.json;
    match cli.command {
        Command::Validate { file } => validate(&file, j),
        Command::ComposeSpan {
            first,
            second,
            reduce: r,
            out,
        } => {
            let (f, g) = (load::<Span>(&first)?, load::<Span>(&second)?);
            let c = span_compose(&g, &f)?;
            emit_artifact(&if r { reduce(&c) } else { c }, out.as_deref())
        }
        Command::ComposePoly { first, second, out } => {
            let (p, q) = (load::<Polynomial>(&first)?, load::<Polynomial>(&second)?);
            emit_artifact(&poly_compose(&q, &p)?, out.as_deref())
        }
        Command::KleisliCompose {
            first,
            second,
            general,
            out,
        } => {
            let (f, g) = (kleisli(&first)?, kleisli(&second)?);
            let c = if general {
                kleisli_compose_general(&g, &f)?
            } else {
                kleisli_compose(&g, &f)?
            };
            emit_artifact(&c.carrier, out.as_deref())
        }
        Command::Bang {
            groupoid,
            bound,
            sorted,
            out,
        } => {
            let g = load::<FinGroupoid>(&groupoid)?;
            let m = if sorted {
                bang_materialize_sorted(&g, bound)
            } else {
                bang_materialize(&g, bound)
            };
            emit_artifact(&m.groupoid, out.as_deref())
        }
        Command::EvalPoly { poly, family, at, out } => {
            let p = load::<Polynomial>(&poly)?;
            let x = load::<FamilyOfGroupoids>(&family)?;
            emit_artifact(&eval_at(&p, &x, at)?, out.as_deref())
        }
        Command::PolyToSpan { poly, out } => emit_artifact(&poly_to_span(&load(&poly)?)?.carrier, out.as_deref()),
        Command::SpanToPoly { span, out } => emit_artifact(&span_to_poly(&kleisli(&span)?)?, out.as_deref()),
        Command::Compare { a, b } => compare(&a, &b, j),
        Command::Check {
            suite,
            seed,
            instances,
            max_objects,
            max_arrows,
            bang_bound,
            defect,
            out,
        } => check(
            &suite,
            seed,
            instances,
            max_objects,
            max_arrows,
            bang_bound,
            defect.as_deref(),
            out.as_deref(),
            j,
        ),
        Command::Canon { file, out } => {
            let v = read(&file)?;
            if is_report(&v) {
                emit(&SuiteReport::from_json(&v)?.render(), out.as_deref())
            } else {
                emit_artifact(&AnyArtifact::from_json(&v)?, out.as_deref())
            }
        }
        Command::Laws => {
            if j {
                let laws: Vec<Value> = LawId::ALL
                    .iter()
                    .map(|l| json!({"law": l.name(), "bounded": l.bounded(), "statement": l.statement(), "generator": l.generator()}))
                    .collect();
                print!("{}", to_text(&json!(laws)));
            } else {
                for l in LawId::ALL {
                    println!("{:<28} {}", l.name(), l.statement());
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
