//! The `locsys` command line. Every input is a document file; every
//! result is a document or a flat JSON record.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use locsys_core::chain::{self, ChainComplex};
use locsys_core::codec::{self, Document};
use locsys_core::groupoid::{classify_functor, skeletize};
use locsys_core::integral;
use locsys_core::linalg::Scalar;
use locsys_core::local::{self, LocalSystem, SystemClassification};
use locsys_core::simplicial::{is_total_we, tot, tot_map};
use locsys_core::verify;
use locsys_core::{Error, Field};
use serde_json::{json, Value};
use thiserror::Error as ThisError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Decode { path: PathBuf, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(name = "locsys", version, about = "Local systems over finite groupoids")]
struct Cli {
    /// Reinterpret every input over this field ("Fp:5", "Q") before use.
    #[arg(long, global = true)]
    field: Option<Field>,
    /// Write the result here instead of returning it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Chain,
    Groupoid,
    System,
    Integral,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    Left,
    Pull,
    Right,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti numbers of a complex, or of each fiber of a system.
    Homology { input: PathBuf },
    /// Weak equivalence, fibration and cofibration flags of a map.
    Classify {
        #[arg(long, value_enum)]
        kind: Kind,
        input: PathBuf,
    },
    /// Tensor product of complexes, chain maps, systems or system maps.
    Tensor { left: PathBuf, right: PathBuf },
    /// Mapping complex, or internal hom of systems.
    Hom { source: PathBuf, target: PathBuf },
    /// Pushout-product of chain maps, system maps or integral morphisms.
    PushoutProduct { left: PathBuf, right: PathBuf },
    /// Base change of a system along a functor.
    Kan {
        #[arg(long, value_enum)]
        dir: Direction,
        functor: PathBuf,
        system: PathBuf,
    },
    /// Skeleton inclusion of a groupoid, or a system restricted to it.
    Skeletize { input: PathBuf },
    /// External tensor product of objects or morphisms.
    ExternalTensor { left: PathBuf, right: PathBuf },
    /// External hom out of a system over a discrete groupoid.
    ExternalHom { source: PathBuf, target: PathBuf },
    /// Total complex of a simplicial object or map.
    Tot { input: PathBuf },
    /// Whether a simplicial map is a total weak equivalence.
    TotalWe { input: PathBuf },
    /// Every morphism between two objects, budget from LOCSYS_BUDGET.
    EnumerateHom { source: PathBuf, target: PathBuf },
    /// Run a randomized law suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit
/// code and the text to print.
pub fn run_command<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    match execute(&cli) {
        Ok((code, text)) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => (code, String::new()),
                Err(source) => (EXIT_INPUT, CliError::Io { path: path.clone(), source }.to_string()),
            },
            None => (code, text),
        },
        Err(e) => (EXIT_INPUT, format!("error: {e}")),
    }
}

fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    let load = |p: &Path| load(p, cli.field);
    let doc = |d: Document| Ok((EXIT_OK, codec::encode(&d)));
    match &cli.command {
        Command::Homology { input } => {
            let betti = |c: &ChainComplex| -> Value { chain::homology(c).0.iter().map(|(n, d)| (n.to_string(), json!(d))).collect() };
            match load(input)? {
                Document::Complex(c) => Ok((EXIT_OK, record(&betti(&c)))),
                Document::System(v) | Document::LocObject(v) => {
                    let per: serde_json::Map<String, Value> =
                        (0..v.base().object_count()).map(|o| (v.base().object_label(o).to_string(), betti(v.at(o)))).collect();
                    Ok((EXIT_OK, pretty(&Value::Object(per))))
                }
                other => Err(wrong(input, &other, "complex or system")),
            }
        }
        Command::Classify { kind, input } => {
            let d = load(input)?;
            let out = match (kind, d) {
                (Kind::Chain, Document::ChainMap(m)) => {
                    let c = chain::classify_chain_map(&m);
                    json!({ "cof": c.cof, "fib": c.fib, "we": c.we })
                }
                (Kind::Groupoid, Document::Functor(f)) => {
                    let c = classify_functor(&f);
                    json!({ "cof": c.cof, "fib": c.fib, "we": c.we })
                }
                (Kind::System, Document::SystemMap(m)) => system_record(&local::classify_system_map(&m)),
                (Kind::Integral, Document::LocMorphism(m)) => system_record(&integral::classify_integral(&m)?),
                (_, other) => return Err(wrong(input, &other, expected_for(*kind))),
            };
            Ok((EXIT_OK, record(&out)))
        }
        Command::Tensor { left, right } => match (load(left)?, load(right)?) {
            (Document::Complex(a), Document::Complex(b)) => doc(Document::Complex(chain::tensor(&a, &b)?)),
            (Document::ChainMap(a), Document::ChainMap(b)) => doc(Document::ChainMap(chain::tensor_map(&a, &b)?)),
            (Document::System(a), Document::System(b)) => doc(Document::System(local::cup_tensor(&a, &b)?)),
            (Document::SystemMap(a), Document::SystemMap(b)) => doc(Document::SystemMap(local::cup_tensor_map(&a, &b)?)),
            (a, _) => Err(wrong(left, &a, "matching complexes, chain maps, systems or system maps")),
        },
        Command::Hom { source, target } => match (load(source)?, load(target)?) {
            (Document::Complex(a), Document::Complex(b)) => doc(Document::Complex(chain::hom_complex(&a, &b)?)),
            (Document::System(a), Document::System(b)) => doc(Document::System(local::internal_hom(&a, &b)?)),
            (a, _) => Err(wrong(source, &a, "matching complexes or systems")),
        },
        Command::PushoutProduct { left, right } => match (load(left)?, load(right)?) {
            (Document::ChainMap(a), Document::ChainMap(b)) => doc(Document::ChainMap(chain::pushout_product_chain(&a, &b)?)),
            (Document::SystemMap(a), Document::SystemMap(b)) => doc(Document::SystemMap(integral::system_pushout_product(&a, &b)?)),
            (Document::LocMorphism(a), Document::LocMorphism(b)) => doc(Document::LocMorphism(integral::external_pushout_product(&a, &b)?)),
            (a, _) => Err(wrong(left, &a, "matching chain maps, system maps or integral morphisms")),
        },
        Command::Kan { dir, functor, system } => {
            let f = match load(functor)? {
                Document::Functor(f) => f,
                other => return Err(wrong(functor, &other, "functor")),
            };
            let v = as_system(system, load(system)?)?;
            let out = match dir {
                Direction::Left => local::push_left(&f, &v.rebased(f.source())?)?.system,
                Direction::Right => local::push_right(&f, &v.rebased(f.source())?)?.system,
                Direction::Pull => local::pull_system(&f, &v.rebased(f.target())?)?,
            };
            doc(Document::System(out))
        }
        Command::Skeletize { input } => match load(input)? {
            Document::Groupoid(x) => doc(Document::Functor(skeletize(&x).iota)),
            Document::System(v) => {
                let sk = skeletize(v.base());
                doc(Document::System(local::pull_system(&sk.iota, &v)?))
            }
            other => Err(wrong(input, &other, "groupoid or system")),
        },
        Command::ExternalTensor { left, right } => match (load(left)?, load(right)?) {
            (Document::LocMorphism(a), Document::LocMorphism(b)) => doc(Document::LocMorphism(integral::external_tensor_map(&a, &b)?)),
            (a, b) => {
                let (a, b) = (as_system(left, a)?, as_system(right, b)?);
                doc(Document::LocObject(integral::external_tensor(&a, &b)?))
            }
        },
        Command::ExternalHom { source, target } => {
            let (r, w) = (as_system(source, load(source)?)?, as_system(target, load(target)?)?);
            doc(Document::LocObject(integral::external_hom(&r, &w)?.0))
        }
        Command::Tot { input } => match load(input)? {
            Document::Simplicial(s) => doc(Document::Complex(tot(&s))),
            Document::SimplicialMap(m) => doc(Document::ChainMap(tot_map(&m))),
            other => Err(wrong(input, &other, "simplicial object or map")),
        },
        Command::TotalWe { input } => match load(input)? {
            Document::SimplicialMap(m) => Ok((EXIT_OK, record(&json!({ "we": is_total_we(&m) })))),
            other => Err(wrong(input, &other, "simplicial map")),
        },
        Command::EnumerateHom { source, target } => {
            let (a, b) = (as_system(source, load(source)?)?, as_system(target, load(target)?)?);
            let homs = integral::hom_enumerate(&a, &b, budget()?)?;
            let docs: Vec<Value> = homs.into_iter().map(|m| envelope(Document::LocMorphism(m))).collect();
            Ok((EXIT_OK, pretty(&json!({ "count": docs.len(), "morphisms": docs }))))
        }
        Command::Verify { suite, seed, trials, size } => {
            Ok(report_output(&verify::verify(suite, *seed, *trials, *size)?))
        }
    }
}

fn report_output(report: &verify::SuiteReport) -> (i32, String) {
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
    (code, pretty(&report.to_json()))
}

fn budget() -> Result<u128, CliError> {
    match std::env::var("LOCSYS_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("LOCSYS_BUDGET must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(path: &Path, field: Option<Field>) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let text = match field {
        Some(f) => change_field(&text, f).map_err(|source| CliError::Decode { path: path.into(), source })?,
        None => text,
    };
    codec::decode(&text).map_err(|source| CliError::Decode { path: path.into(), source })
}

fn as_system(path: &Path, d: Document) -> Result<LocalSystem, CliError> {
    match d {
        Document::System(v) | Document::LocObject(v) => Ok(v),
        other => Err(wrong(path, &other, "system")),
    }
}

fn wrong(path: &Path, got: &Document, want: &str) -> CliError {
    CliError::Usage(format!("{}: expected {want}, found a {} document", path.display(), got.kind()))
}

fn expected_for(kind: Kind) -> &'static str {
    match kind {
        Kind::Chain => "chain_map",
        Kind::Groupoid => "functor",
        Kind::System => "system_map",
        Kind::Integral => "loc_morphism",
    }
}

fn system_record(c: &SystemClassification) -> Value {
    json!({ "cof": c.cof.as_str(), "fib": c.fib, "we": c.we })
}

fn envelope(d: Document) -> Value {
    serde_json::from_str(&codec::encode(&d)).expect("encoder emits JSON")
}

/// One-line rendering of a flat record: `{"cof": true, "we": false}`.
fn record(v: &Value) -> String {
    match v {
        Value::Object(m) => {
            let body: Vec<String> = m.iter().map(|(k, v)| format!("{}: {}", Value::String(k.clone()), v)).collect();
            format!("{{{}}}\n", body.join(", "))
        }
        other => format!("{other}\n"),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Rewrites a document over another field: every field tag is replaced and
/// every scalar is read as a rational and reduced (residues lift to
/// `0..p`). Fails on a denominator divisible by the new characteristic.
pub fn change_field(text: &str, field: Field) -> Result<String, Error> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), reason: e.to_string() })?;
    rewrite(&mut v, field)?;
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    Ok(s)
}

fn rewrite(v: &mut Value, field: Field) -> Result<(), Error> {
    match v {
        Value::Object(m) => {
            if m.get("field").is_some_and(Value::is_string) {
                m.insert("field".into(), json!(field.to_string()));
            }
            if let Some(Value::Array(rows)) = m.get_mut("entries") {
                for row in rows.iter_mut() {
                    if let Value::Array(row) = row {
                        for e in row.iter_mut() {
                            *e = convert(e, field)?;
                        }
                    }
                }
            }
            for (k, child) in m.iter_mut() {
                if k != "entries" {
                    rewrite(child, field)?;
                }
            }
        }
        Value::Array(items) => items.iter_mut().try_for_each(|c| rewrite(c, field))?,
        _ => {}
    }
    Ok(())
}

fn convert(e: &Value, field: Field) -> Result<Value, Error> {
    let text = match e {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::Parse { line: 0, reason: format!("invalid scalar {other}") }),
    };
    let Scalar::Rational(q) = Scalar::parse(Field::Rational, &text)? else { unreachable!("rational parse yields a rational") };
    let s = field.reduce(&q).ok_or_else(|| Error::Parse { line: 0, reason: format!("{text} has no image in {field}") })?;
    Ok(match s {
        Scalar::Residue(r) => json!(r),
        Scalar::Rational(_) => json!(s.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_reports_exit_with_one() {
        let mut report = verify::SuiteReport { suite: "s".into(), trials: 2, failures: Vec::new() };
        assert_eq!(report_output(&report).0, EXIT_OK);
        let doc = codec::encode(&Document::Field(Field::Prime(2)));
        report.failures.push(verify::Failure { seed: 5, reason: "broken".into(), counterexample: Some(doc) });
        let (code, text) = report_output(&report);
        assert_eq!(code, EXIT_FAILED);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["failures"][0]["counterexample"]["payload"], "Fp:2");
    }

    #[test]
    fn field_change_reduces_rationals() {
        let text = codec::encode(&Document::Complex(ChainComplex::sphere(Field::Rational, 0)));
        let moved = change_field(&text, Field::Prime(7)).unwrap();
        assert_eq!(codec::decode(&moved).unwrap(), Document::Complex(ChainComplex::sphere(Field::Prime(7), 0)));
    }
}
