use std::path::{Path, PathBuf};
use std::sync::Arc;

use locsys_cli::{run_command, EXIT_INPUT, EXIT_OK};
use locsys_core::chain::{gen_acyclic_cof, gen_cof, ChainComplex};
use locsys_core::codec::{decode, encode, Document};
use locsys_core::groupoid::{FinGroupoid, Group, GroupoidFunctor};
use locsys_core::local::LocalSystem;
use locsys_core::simplicial::{TruncSimplicialComplex, TruncSimplicialMap};
use locsys_core::{Field, Matrix};
use tempfile::TempDir;

const Q: Field = Field::Rational;
const F3: Field = Field::Prime(3);

fn write(dir: &TempDir, name: &str, doc: &Document) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, encode(doc)).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String) {
    run_command(std::iter::once("locsys").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_generating_cofibration() {
    let dir = TempDir::new().unwrap();
    let i1 = write(&dir, "i1.doc", &Document::ChainMap(gen_cof(Q, 1)));
    assert_eq!(run(&["classify", "--kind", "chain", s(&i1)]), (EXIT_OK, "{\"cof\": true, \"fib\": false, \"we\": false}\n".into()));
    let j1 = write(&dir, "j1.doc", &Document::ChainMap(gen_acyclic_cof(Q, 1)));
    assert_eq!(run(&["classify", "--kind", "chain", s(&j1)]).1, "{\"cof\": true, \"fib\": false, \"we\": true}\n");
    // the wrong kind of document is an input error
    assert_eq!(run(&["classify", "--kind", "groupoid", s(&i1)]).0, EXIT_INPUT);
}

#[test]
fn homology_of_a_sphere() {
    let dir = TempDir::new().unwrap();
    let sphere = write(&dir, "sphere2.doc", &Document::Complex(ChainComplex::sphere(Q, 2)));
    assert_eq!(run(&["homology", s(&sphere)]), (EXIT_OK, "{\"2\": 1}\n".into()));
}

#[test]
fn field_flag_changes_coefficients() {
    let dir = TempDir::new().unwrap();
    let two = Matrix::from_int_rows(Q, &[vec![2]]);
    let c = ChainComplex::new(Q, &[(0, 1), (1, 1)].into(), &[(1, two)].into()).unwrap();
    let path = write(&dir, "times2.doc", &Document::Complex(c));
    assert_eq!(run(&["homology", s(&path)]).1, "{}\n");
    assert_eq!(run(&["homology", "--field", "Fp:2", s(&path)]).1, "{\"0\": 1, \"1\": 1}\n");
    let half = Matrix::from_scalars(Q, 1, 1, vec![locsys_core::Scalar::parse(Q, "1/2").unwrap()]).unwrap();
    let c = ChainComplex::new(Q, &[(0, 1), (1, 1)].into(), &[(1, half)].into()).unwrap();
    let path = write(&dir, "half.doc", &Document::Complex(c));
    assert_eq!(run(&["homology", "--field", "Fp:2", s(&path)]).0, EXIT_INPUT);
    assert_eq!(run(&["homology", "--field", "Fp:4", s(&path)]).0, EXIT_INPUT);
}

#[test]
fn verify_reports() {
    let (code, out) = run(&["verify", "projection-formula", "--seed", "7", "--trials", "25"]);
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["trials"], 25);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    assert_eq!(run(&["verify", "pushout-product-generators", "--seed", "123", "--trials", "9"]).0, EXIT_OK);
    assert_eq!(run(&["verify", "no-such-suite"]).0, EXIT_INPUT);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.doc");
    assert_eq!(run(&["homology", s(&missing)]).0, EXIT_INPUT);
    let garbage = dir.path().join("garbage.doc");
    std::fs::write(&garbage, "{\"format_version\": \"locsys/1\", ").unwrap();
    let (code, msg) = run(&["homology", s(&garbage)]);
    assert_eq!(code, EXIT_INPUT);
    assert!(msg.contains("parse error"));
    assert_eq!(run(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn out_flag_writes_a_document() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.doc", &Document::Complex(ChainComplex::sphere(F3, 1)));
    let b = write(&dir, "b.doc", &Document::Complex(ChainComplex::disk(F3, 1)));
    let out = dir.path().join("t.doc");
    assert_eq!(run(&["tensor", s(&a), s(&b), "--out", s(&out)]), (EXIT_OK, String::new()));
    let Document::Complex(t) = decode(&std::fs::read_to_string(&out).unwrap()).unwrap() else { panic!() };
    assert_eq!(t.dims(), [(1, 1), (2, 1)].into());
    let (code, hom) = run(&["hom", s(&b), s(&a)]);
    assert_eq!(code, EXIT_OK);
    assert!(matches!(decode(&hom).unwrap(), Document::Complex(_)));
}

#[test]
fn base_change_and_external_operations() {
    let dir = TempDir::new().unwrap();
    let f = GroupoidFunctor::from_group_hom(&Group::cyclic(2), &Group::cyclic(4), &[0, 2]).unwrap();
    let sign = LocalSystem::sign(Field::Prime(5)).rebased(f.source()).unwrap();
    let fpath = write(&dir, "f.doc", &Document::Functor(f.clone()));
    let vpath = write(&dir, "v.doc", &Document::System(sign));
    for dir_flag in ["left", "right"] {
        let (code, out) = run(&["kan", "--dir", dir_flag, s(&fpath), s(&vpath)]);
        assert_eq!(code, EXIT_OK, "{out}");
        let Document::System(pushed) = decode(&out).unwrap() else { panic!() };
        assert_eq!(pushed.at(0).dims(), [(0, 2)].into());
    }
    let c4 = Arc::new(FinGroupoid::delooping(&Group::cyclic(4)));
    let w = write(&dir, "w.doc", &Document::System(LocalSystem::unit(&c4, Field::Prime(5))));
    let (code, out) = run(&["kan", "--dir", "pull", s(&fpath), s(&w)]);
    assert_eq!(code, EXIT_OK);
    assert!(matches!(decode(&out).unwrap(), Document::System(_)));
    assert_eq!(run(&["kan", "--dir", "pull", s(&fpath), s(&vpath)]).0, EXIT_INPUT);

    let (code, out) = run(&["external-tensor", s(&vpath), s(&w)]);
    assert_eq!(code, EXIT_OK);
    let Document::LocObject(ext) = decode(&out).unwrap() else { panic!() };
    assert_eq!(ext.base().morphism_count(), 8);
    assert_eq!(run(&["external-hom", s(&vpath), s(&w)]).0, EXIT_INPUT);
    let pt = Arc::new(FinGroupoid::discrete(2));
    let r = write(&dir, "r.doc", &Document::LocObject(LocalSystem::unit(&pt, Field::Prime(5))));
    let (code, out) = run(&["external-hom", s(&r), s(&w)]);
    assert_eq!(code, EXIT_OK);
    let Document::LocObject(h) = decode(&out).unwrap() else { panic!() };
    assert_eq!(h.base().object_count(), 1);

    let (code, out) = run(&["skeletize", s(&w)]);
    assert_eq!(code, EXIT_OK);
    assert!(matches!(decode(&out).unwrap(), Document::System(_)));
    let cod = write(&dir, "cod.doc", &Document::Groupoid(Arc::new(FinGroupoid::codiscrete(3))));
    let Document::Functor(iota) = decode(&run(&["skeletize", s(&cod)]).1).unwrap() else { panic!() };
    assert_eq!(iota.source().object_count(), 1);
    let (code, out) = run(&["classify", "--kind", "groupoid", s(&write(&dir, "iota.doc", &Document::Functor(iota)))]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "{\"cof\": true, \"fib\": false, \"we\": true}\n"));
}

#[test]
fn pushout_products_and_simplicial_commands() {
    let dir = TempDir::new().unwrap();
    let i0 = write(&dir, "i0.doc", &Document::ChainMap(gen_cof(F3, 0)));
    let pp = dir.path().join("pp.doc");
    assert_eq!(run(&["pushout-product", s(&i0), s(&i0), "--out", s(&pp)]).0, EXIT_OK);
    assert_eq!(run(&["classify", "--kind", "chain", s(&pp)]).1, "{\"cof\": true, \"fib\": false, \"we\": false}\n");

    let simplex = TruncSimplicialComplex::standard_simplex(F3, 1, 2);
    let sp = write(&dir, "simplex.doc", &Document::Simplicial(simplex.clone()));
    let (code, out) = run(&["tot", s(&sp)]);
    assert_eq!(code, EXIT_OK);
    assert!(matches!(decode(&out).unwrap(), Document::Complex(_)));
    let id = write(&dir, "id.doc", &Document::SimplicialMap(TruncSimplicialMap::identity(&simplex)));
    assert_eq!(run(&["total-we", s(&id)]).1, "{\"we\": true}\n");
    assert!(matches!(decode(&run(&["tot", s(&id)]).1).unwrap(), Document::ChainMap(_)));
}

#[test]
fn enumeration_respects_the_budget() {
    let dir = TempDir::new().unwrap();
    let pt = Arc::new(FinGroupoid::point());
    let c2 = Arc::new(FinGroupoid::delooping(&Group::cyclic(2)));
    let one = write(&dir, "one.doc", &Document::LocObject(LocalSystem::unit(&pt, Field::Prime(2))));
    let reg = LocalSystem::regular(&Group::cyclic(2), Field::Prime(2)).rebased(&c2).unwrap();
    let reg = write(&dir, "reg.doc", &Document::LocObject(reg));
    let (code, out) = run(&["enumerate-hom", s(&one), s(&reg)]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 4);
    let first = serde_json::to_string_pretty(&v["morphisms"][0]).unwrap() + "\n";
    assert!(matches!(decode(&first).unwrap(), Document::LocMorphism(_)));
    // the only test touching LOCSYS_BUDGET
    std::env::set_var("LOCSYS_BUDGET", "3");
    let (code, msg) = run(&["enumerate-hom", s(&one), s(&reg)]);
    std::env::remove_var("LOCSYS_BUDGET");
    assert_eq!(code, EXIT_INPUT);
    assert!(msg.contains("budget"));
}
