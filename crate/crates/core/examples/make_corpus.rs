//! Regenerates `tests/corpus`: `cargo run -p locsys-core --example make_corpus`.

use std::path::Path;
use std::sync::Arc;

use locsys_core::chain::{gen_acyclic_cof, gen_cof, ChainComplex, ChainMap};
use locsys_core::codec::{encode, Document};
use locsys_core::groupoid::{FinGroupoid, Group, GroupoidFunctor};
use locsys_core::integral::LocMorphism;
use locsys_core::local::{pull_system, LocalSystem, SystemMap};
use locsys_core::simplicial::{TruncSimplicialComplex, TruncSimplicialMap};
use locsys_core::{Field, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    std::fs::create_dir_all(&dir)?;
    let (f2, f3, q) = (Field::Prime(2), Field::Prime(3), Field::Rational);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let c2 = Arc::new(FinGroupoid::delooping(&Group::cyclic(2)));
    let pt = Arc::new(FinGroupoid::point());
    let reg = LocalSystem::regular(&Group::cyclic(2), f3).rebased(&c2)?;
    let one = LocalSystem::unit(&pt, f3);
    let incl = GroupoidFunctor::constant(&pt, &c2, 0);
    let e = ChainMap::new(one.at(0).clone(), reg.at(0).clone(), [(0, Matrix::from_int_rows(f3, &[vec![1], vec![0]]))].into())?;
    let basis_vector = LocMorphism::new(one.clone(), reg.clone(), incl.clone(), SystemMap::new(one.clone(), pull_system(&incl, &reg)?, vec![e])?)?;
    let x = Arc::new(FinGroupoid::random(3, &mut rng));
    let random_system = LocalSystem::random(&x, q, 0, 1, 2, &mut rng);
    let simplex = TruncSimplicialComplex::standard_simplex(f2, 1, 2);

    let docs = vec![
        ("field_f5", Document::Field(Field::Prime(5))),
        ("field_q", Document::Field(q)),
        ("sphere2", Document::Complex(ChainComplex::sphere(q, 2))),
        ("disk1_f3", Document::Complex(ChainComplex::disk(f3, 1))),
        ("random_complex", Document::Complex(ChainComplex::random(q, -1, 2, 3, &mut rng))),
        ("i1", Document::ChainMap(gen_cof(q, 1))),
        ("j1", Document::ChainMap(gen_acyclic_cof(f2, 1))),
        ("s3", Document::Groupoid(Arc::new(FinGroupoid::delooping(&Group::symmetric3())))),
        ("codiscrete2", Document::Groupoid(Arc::new(FinGroupoid::codiscrete(2)))),
        ("random_groupoid", Document::Groupoid(x.clone())),
        ("c2_in_c4", Document::Functor(GroupoidFunctor::from_group_hom(&Group::cyclic(2), &Group::cyclic(4), &[0, 2])?)),
        ("regular_c2_f3", Document::System(reg.clone())),
        ("sign_f3", Document::System(LocalSystem::sign(f3))),
        ("random_system", Document::System(random_system.clone())),
        ("identity_regular", Document::SystemMap(SystemMap::identity(&reg))),
        ("simplex1", Document::Simplicial(simplex.clone())),
        ("simplex1_identity", Document::SimplicialMap(TruncSimplicialMap::identity(&simplex))),
        ("unit_pt", Document::LocObject(one)),
        ("regular_object", Document::LocObject(reg)),
        ("basis_vector", Document::LocMorphism(basis_vector)),
        ("random_identity", Document::LocMorphism(LocMorphism::identity(&random_system))),
    ];
    for (name, doc) in docs {
        std::fs::write(dir.join(format!("{name}.json")), encode(&doc))?;
    }
    Ok(())
}
