//! JSON documents for every domain type. Keys are emitted in sorted order
//! (serde_json's default map), so encoding is canonical.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::chain::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::groupoid::{FinGroupoid, GroupoidFunctor, Morphism};
use crate::integral::LocMorphism;
use crate::linalg::{Field, Matrix, Scalar};
use crate::local::{LocalSystem, SystemMap};
use crate::simplicial::{TruncSimplicialComplex, TruncSimplicialMap};

pub const FORMAT_VERSION: &str = "locsys/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Field(Field),
    Complex(ChainComplex),
    ChainMap(ChainMap),
    Groupoid(Arc<FinGroupoid>),
    Functor(GroupoidFunctor),
    System(LocalSystem),
    SystemMap(SystemMap),
    Simplicial(TruncSimplicialComplex),
    SimplicialMap(TruncSimplicialMap),
    LocObject(LocalSystem),
    LocMorphism(LocMorphism),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Field(_) => "field",
            Document::Complex(_) => "complex",
            Document::ChainMap(_) => "chain_map",
            Document::Groupoid(_) => "groupoid",
            Document::Functor(_) => "functor",
            Document::System(_) => "system",
            Document::SystemMap(_) => "system_map",
            Document::Simplicial(_) => "simplicial",
            Document::SimplicialMap(_) => "simplicial_map",
            Document::LocObject(_) => "loc_object",
            Document::LocMorphism(_) => "loc_morphism",
        }
    }
}

fn bad(reason: impl Into<String>) -> Error {
    Error::Parse { line: 0, reason: reason.into() }
}

/// Wraps errors raised while rebuilding values so they surface as parse
/// errors naming the offending part of the document.
fn at<T>(what: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => bad(format!("{what}: {other}")),
    })
}

// ---------------------------------------------------------------------------
// Encoding.

pub fn encode(doc: &Document) -> String {
    let payload = match doc {
        Document::Field(f) => json!(f.to_string()),
        Document::Complex(c) => complex_value(c),
        Document::ChainMap(m) => chain_map_value(m),
        Document::Groupoid(g) => groupoid_value(g),
        Document::Functor(f) => functor_value(f),
        Document::System(v) | Document::LocObject(v) => system_value(v),
        Document::SystemMap(m) => system_map_value(m),
        Document::Simplicial(s) => simplicial_value(s),
        Document::SimplicialMap(m) => json!({
            "source": simplicial_value(m.source()),
            "target": simplicial_value(m.target()),
            "levels": (0..=m.source().skeletal_degree()).map(|n| components_value(m.level(n))).collect::<Vec<_>>(),
        }),
        Document::LocMorphism(m) => json!({
            "source": system_value(m.source()),
            "target": system_value(m.target()),
            "base_map": { "objects": m.base_map().object_map(), "morphisms": m.base_map().morphism_map() },
            "component": system_components_value(m.component()),
        }),
    };
    let doc = json!({ "format_version": FORMAT_VERSION, "kind": doc.kind(), "payload": payload });
    let mut out = serde_json::to_string_pretty(&doc).expect("documents serialize");
    out.push('\n');
    out
}

fn scalar_value(s: &Scalar) -> Value {
    match s {
        Scalar::Residue(r) => json!(r),
        Scalar::Rational(_) => json!(s.to_string()),
    }
}

fn matrix_value(m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| scalar_value(&m.get(i, j))).collect())).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": rows })
}

fn degree_map<T>(m: &BTreeMap<i64, T>, f: impl Fn(&T) -> Value) -> Value {
    Value::Object(m.iter().map(|(n, v)| (n.to_string(), f(v))).collect())
}

fn complex_value(c: &ChainComplex) -> Value {
    json!({
        "field": c.field().to_string(),
        "dims": degree_map(&c.dims(), |d| json!(d)),
        "differentials": degree_map(&c.differentials(), matrix_value),
    })
}

fn components_value(m: &ChainMap) -> Value {
    degree_map(m.components(), matrix_value)
}

fn chain_map_value(m: &ChainMap) -> Value {
    json!({
        "source": complex_value(m.source()),
        "target": complex_value(m.target()),
        "components": components_value(m),
    })
}

fn groupoid_value(g: &FinGroupoid) -> Value {
    let morphisms: Vec<Value> = g.morphisms().iter().map(|m| json!({ "label": m.label, "src": m.src, "tgt": m.tgt })).collect();
    let mut compose = Vec::new();
    for a in 0..g.morphism_count() {
        for b in 0..g.morphism_count() {
            if let Some(c) = g.try_compose(a, b) {
                compose.push(json!([a, b, c]));
            }
        }
    }
    json!({ "objects": g.objects(), "morphisms": morphisms, "compose": compose })
}

fn functor_value(f: &GroupoidFunctor) -> Value {
    json!({
        "source": groupoid_value(f.source()),
        "target": groupoid_value(f.target()),
        "objects": f.object_map(),
        "morphisms": f.morphism_map(),
    })
}

fn system_value(v: &LocalSystem) -> Value {
    let x = v.base();
    let at: Map<String, Value> = (0..x.object_count()).map(|o| (x.object_label(o).to_string(), complex_value(v.at(o)))).collect();
    let along: Map<String, Value> =
        (0..x.morphism_count()).map(|m| (x.morphism_label(m).to_string(), components_value(v.along(m)))).collect();
    json!({ "base": groupoid_value(x), "field": v.field().to_string(), "at": at, "along": along })
}

fn system_components_value(m: &SystemMap) -> Value {
    let x = m.base();
    Value::Object((0..x.object_count()).map(|o| (x.object_label(o).to_string(), components_value(m.component(o)))).collect())
}

fn system_map_value(m: &SystemMap) -> Value {
    json!({
        "source": system_value(m.source()),
        "target": system_value(m.target()),
        "components": system_components_value(m),
    })
}

fn simplicial_value(s: &TruncSimplicialComplex) -> Value {
    let top = s.skeletal_degree();
    let mut faces = Map::new();
    let mut degens = Map::new();
    for n in 0..=top {
        if n > 0 {
            for i in 0..=n {
                faces.insert(format!("{n}:{i}"), components_value(s.face(n, i)));
            }
        }
        if n < top {
            for i in 0..=n {
                degens.insert(format!("{n}:{i}"), components_value(s.degeneracy(n, i)));
            }
        }
    }
    json!({
        "field": s.field().to_string(),
        "levels": s.levels().iter().map(complex_value).collect::<Vec<_>>(),
        "faces": faces,
        "degeneracies": degens,
    })
}

// ---------------------------------------------------------------------------
// Decoding.

pub fn decode(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), reason: e.to_string() })?;
    let obj = value.as_object().ok_or_else(|| bad("document is not an object"))?;
    match obj.get("format_version") {
        Some(Value::String(v)) if v == FORMAT_VERSION => {}
        Some(v) => return Err(Error::VersionMismatch(format!("expected {FORMAT_VERSION:?}, found {v}"))),
        None => return Err(Error::VersionMismatch("missing format_version".into())),
    }
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
    let p = obj.get("payload").ok_or_else(|| bad("missing payload"))?;
    Ok(match kind {
        "field" => Document::Field(parse_field(p)?),
        "complex" => Document::Complex(parse_complex(p)?),
        "chain_map" => Document::ChainMap(parse_chain_map(p)?),
        "groupoid" => Document::Groupoid(Arc::new(parse_groupoid(p)?)),
        "functor" => Document::Functor(parse_functor(p)?),
        "system" => Document::System(parse_system(p)?),
        "system_map" => Document::SystemMap(parse_system_map(p)?),
        "simplicial" => Document::Simplicial(parse_simplicial(p)?),
        "simplicial_map" => {
            let source = parse_simplicial(get(p, "source")?)?;
            let target = parse_simplicial(get(p, "target")?)?;
            let levels = array(get(p, "levels")?)?
                .iter()
                .enumerate()
                .map(|(n, c)| parse_components(c, source.level(n), target.level(n)))
                .collect::<Result<Vec<_>>>()?;
            Document::SimplicialMap(at("simplicial map", TruncSimplicialMap::new(source, target, levels))?)
        }
        "loc_object" => Document::LocObject(parse_system(p)?),
        "loc_morphism" => Document::LocMorphism(parse_loc_morphism(p)?),
        other => return Err(bad(format!("unknown kind {other:?}"))),
    })
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing key {key:?}")))
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("expected an array, found {v}")))
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(format!("expected an object, found {v}")))
}

fn index(v: &Value) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| bad(format!("expected a nonnegative integer, found {v}")))
}

fn indices(v: &Value) -> Result<Vec<usize>> {
    array(v)?.iter().map(index).collect()
}

fn degree(key: &str) -> Result<i64> {
    key.parse().map_err(|_| bad(format!("invalid degree {key:?}")))
}

fn parse_field(v: &Value) -> Result<Field> {
    let s = v.as_str().ok_or_else(|| bad("field must be a string"))?;
    at("field", s.parse())
}

fn parse_scalar(field: Field, v: &Value) -> Result<Scalar> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(bad(format!("invalid scalar {v}"))),
    };
    at("scalar", Scalar::parse(field, &text))
}

fn parse_matrix(field: Field, v: &Value) -> Result<Matrix> {
    let rows = index(get(v, "rows")?)?;
    let cols = index(get(v, "cols")?)?;
    let entries = array(get(v, "entries")?)?;
    if entries.len() != rows {
        return Err(bad(format!("matrix declares {rows} rows but lists {}", entries.len())));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for row in entries {
        let row = array(row)?;
        if row.len() != cols {
            return Err(bad(format!("matrix declares {cols} columns but a row has {}", row.len())));
        }
        for e in row {
            flat.push(parse_scalar(field, e)?);
        }
    }
    at("matrix", Matrix::from_scalars(field, rows, cols, flat))
}

fn parse_degree_matrices(field: Field, v: &Value) -> Result<BTreeMap<i64, Matrix>> {
    object(v)?.iter().map(|(k, m)| Ok((degree(k)?, parse_matrix(field, m)?))).collect()
}

fn parse_complex(v: &Value) -> Result<ChainComplex> {
    let field = parse_field(get(v, "field")?)?;
    let dims = object(get(v, "dims")?)?.iter().map(|(k, d)| Ok((degree(k)?, index(d)?))).collect::<Result<BTreeMap<_, _>>>()?;
    let diffs = parse_degree_matrices(field, get(v, "differentials")?)?;
    at("complex", ChainComplex::new(field, &dims, &diffs))
}

fn parse_components(v: &Value, source: &ChainComplex, target: &ChainComplex) -> Result<ChainMap> {
    let comps = parse_degree_matrices(source.field(), v)?;
    at("chain map", ChainMap::new(source.clone(), target.clone(), comps))
}

fn parse_chain_map(v: &Value) -> Result<ChainMap> {
    let source = parse_complex(get(v, "source")?)?;
    let target = parse_complex(get(v, "target")?)?;
    parse_components(get(v, "components")?, &source, &target)
}

fn parse_groupoid(v: &Value) -> Result<FinGroupoid> {
    let objects = array(get(v, "objects")?)?
        .iter()
        .map(|o| o.as_str().map(str::to_string).ok_or_else(|| bad("object labels must be strings")))
        .collect::<Result<Vec<_>>>()?;
    let morphisms = array(get(v, "morphisms")?)?
        .iter()
        .map(|m| {
            Ok(Morphism {
                label: get(m, "label")?.as_str().ok_or_else(|| bad("morphism labels must be strings"))?.to_string(),
                src: index(get(m, "src")?)?,
                tgt: index(get(m, "tgt")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = morphisms.len();
    let mut table = vec![None; n * n];
    for entry in array(get(v, "compose")?)? {
        let t = indices(entry)?;
        let [g, f, gf] = t[..] else {
            return Err(bad("composition entries are triples [g, f, g∘f]"));
        };
        if g >= n || f >= n || gf >= n {
            return Err(bad("composition entry out of range"));
        }
        table[g * n + f] = Some(gf);
    }
    at("groupoid", FinGroupoid::new(objects, morphisms, table))
}

fn parse_functor(v: &Value) -> Result<GroupoidFunctor> {
    let source = Arc::new(parse_groupoid(get(v, "source")?)?);
    let target = Arc::new(parse_groupoid(get(v, "target")?)?);
    at("functor", GroupoidFunctor::new(source, target, indices(get(v, "objects")?)?, indices(get(v, "morphisms")?)?))
}

fn labelled<'a>(v: &'a Value, labels: &[&str], what: &str) -> Result<Vec<&'a Value>> {
    let map = object(v)?;
    if map.len() != labels.len() {
        return Err(bad(format!("{what}: expected {} entries, found {}", labels.len(), map.len())));
    }
    labels.iter().map(|l| map.get(*l).ok_or_else(|| bad(format!("{what}: missing entry for {l:?}")))).collect()
}

fn parse_system(v: &Value) -> Result<LocalSystem> {
    let base = Arc::new(parse_groupoid(get(v, "base")?)?);
    let field = parse_field(get(v, "field")?)?;
    let obj_labels: Vec<&str> = base.objects().iter().map(String::as_str).collect();
    let at_vals = labelled(get(v, "at")?, &obj_labels, "fibers")?;
    let fibers = at_vals.into_iter().map(parse_complex).collect::<Result<Vec<_>>>()?;
    let mor_labels: Vec<&str> = base.morphisms().iter().map(|m| m.label.as_str()).collect();
    let along_vals = labelled(get(v, "along")?, &mor_labels, "transports")?;
    let along = along_vals
        .into_iter()
        .enumerate()
        .map(|(m, c)| parse_components(c, &fibers[base.src(m)], &fibers[base.tgt(m)]))
        .collect::<Result<Vec<_>>>()?;
    at("system", LocalSystem::new(base, field, fibers, along))
}

fn parse_system_components(v: &Value, source: &LocalSystem, target: &LocalSystem) -> Result<Vec<ChainMap>> {
    let x = source.base();
    let labels: Vec<&str> = x.objects().iter().map(String::as_str).collect();
    labelled(v, &labels, "components")?
        .into_iter()
        .enumerate()
        .map(|(o, c)| parse_components(c, source.at(o), target.at(o)))
        .collect()
}

fn parse_system_map(v: &Value) -> Result<SystemMap> {
    let source = parse_system(get(v, "source")?)?;
    let target = parse_system(get(v, "target")?)?;
    let target = at("system map", target.rebased(source.base()))?;
    let comps = parse_system_components(get(v, "components")?, &source, &target)?;
    at("system map", SystemMap::new(source, target, comps))
}

fn parse_simplicial(v: &Value) -> Result<TruncSimplicialComplex> {
    let field = parse_field(get(v, "field")?)?;
    let levels = array(get(v, "levels")?)?.iter().map(parse_complex).collect::<Result<Vec<_>>>()?;
    if levels.is_empty() {
        return Err(bad("a simplicial object needs at least level 0"));
    }
    let top = levels.len() - 1;
    let faces_v = object(get(v, "faces")?)?;
    let degens_v = object(get(v, "degeneracies")?)?;
    let mut faces = vec![Vec::new(); top + 1];
    let mut degens = vec![Vec::new(); top + 1];
    for n in 0..=top {
        if n > 0 {
            for i in 0..=n {
                let c = faces_v.get(&format!("{n}:{i}")).ok_or_else(|| bad(format!("missing face {n}:{i}")))?;
                faces[n].push(parse_components(c, &levels[n], &levels[n - 1])?);
            }
        }
        if n < top {
            for i in 0..=n {
                let c = degens_v.get(&format!("{n}:{i}")).ok_or_else(|| bad(format!("missing degeneracy {n}:{i}")))?;
                degens[n].push(parse_components(c, &levels[n], &levels[n + 1])?);
            }
        }
    }
    at("simplicial object", TruncSimplicialComplex::new(field, levels, faces, degens))
}

fn parse_loc_morphism(v: &Value) -> Result<LocMorphism> {
    let source = parse_system(get(v, "source")?)?;
    let target = parse_system(get(v, "target")?)?;
    let bm = get(v, "base_map")?;
    let f = at(
        "base map",
        GroupoidFunctor::new(source.base().clone(), target.base().clone(), indices(get(bm, "objects")?)?, indices(get(bm, "morphisms")?)?),
    )?;
    let pulled = at("loc morphism", crate::local::pull_system(&f, &target))?;
    let comps = parse_system_components(get(v, "component")?, &source, &pulled)?;
    let component = at("loc morphism", SystemMap::new(source.clone(), pulled, comps))?;
    at("loc morphism", LocMorphism::new(source, target, f, component))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::Group;

    fn round_trip(doc: Document) {
        let text = encode(&doc);
        let back = decode(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(encode(&back), text);
    }

    #[test]
    fn round_trips() {
        let q = Field::Rational;
        round_trip(Document::Field(Field::Prime(7)));
        round_trip(Document::Complex(ChainComplex::sphere(q, 2)));
        round_trip(Document::Complex(ChainComplex::zero(q)));
        let m = Matrix::from_scalars(q, 1, 1, vec![Scalar::parse(q, "-3/4").unwrap()]).unwrap();
        let c = ChainComplex::sphere(q, 0);
        round_trip(Document::ChainMap(ChainMap::new(c.clone(), c, [(0, m)].into()).unwrap()));
        round_trip(Document::Groupoid(Arc::new(FinGroupoid::delooping(&Group::symmetric3()))));
        round_trip(Document::System(LocalSystem::sign(Field::Prime(3))));
        round_trip(Document::LocObject(LocalSystem::regular(&Group::cyclic(2), Field::Prime(2))));
        round_trip(Document::Simplicial(TruncSimplicialComplex::standard_simplex(q, 1, 2)));
    }

    #[test]
    fn errors() {
        let text = encode(&Document::Complex(ChainComplex::disk(Field::Prime(3), 1)));
        let broken = text.replace("\"rows\": 1", "\"rows\": 2");
        assert!(matches!(decode(&broken), Err(Error::Parse { .. })));
        let unversioned = text.replace("\"format_version\": \"locsys/1\",", "");
        assert!(matches!(decode(&unversioned), Err(Error::VersionMismatch(_))));
        assert!(matches!(decode("{ not json"), Err(Error::Parse { line: 1, .. })));
    }
}
