//! Seeded randomized law suites. Trial `i` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s + i)`, so a failing trial reruns alone with
//! `--seed s+i --trials 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chain::{self, gen_acyclic_cof, gen_cof, ChainComplex, ChainMap};
use crate::codec::{self, Document};
use crate::error::{Error, Result};
use crate::groupoid::{
    classify_functor, groupoid_pullback, product_functor, product_with_projections, pushout_product_fiber_census, random_functor,
    set_pushout_product, skeletize, FinGroupoid, Group, GroupoidFunctor, SetMap,
};
use crate::integral::{self, LocMorphism};
use crate::linalg::{Field, Matrix};
use crate::local::{self, LocalSystem, SystemMap};
use crate::simplicial::{tot, TruncSimplicialComplex};

/// A law that does not hold on a trial.
#[derive(Clone, Debug)]
pub struct Violation(pub String);

impl From<Error> for Violation {
    fn from(e: Error) -> Self {
        Violation(e.to_string())
    }
}

pub type Outcome = std::result::Result<(), Violation>;

/// One law check applied to a single trial.
pub type Law = fn(&mut Trial) -> Outcome;

/// State handed to a law: its random source, the size knob and the most
/// recent reproducer document.
pub struct Trial {
    pub rng: ChaCha8Rng,
    pub size: usize,
    witness: Option<Document>,
}

impl Trial {
    /// Records the document to dump if the trial fails from here on.
    pub fn witness(&mut self, doc: Document) {
        self.witness = Some(doc);
    }

    fn groupoid(&mut self, cap: usize) -> Arc<FinGroupoid> {
        Arc::new(FinGroupoid::random(self.size.min(cap), &mut self.rng))
    }

    fn system(&mut self, base: &Arc<FinGroupoid>, field: Field) -> LocalSystem {
        LocalSystem::random(base, field, 0, 1, 2, &mut self.rng)
    }

    fn functor(&mut self, x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>) -> std::result::Result<GroupoidFunctor, Violation> {
        random_functor(x, y, &mut self.rng).ok_or_else(|| Violation("no functor between nonempty groupoids".into()))
    }
}

pub fn ensure(cond: bool, what: &str) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(Violation(what.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub seed: u64,
    pub reason: String,
    /// The encoded reproducer, when the trial got far enough to build one.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| {
                let doc = f.counterexample.as_deref().map_or(Value::Null, |s| serde_json::from_str(s).unwrap_or(Value::Null));
                json!({ "seed": f.seed, "reason": f.reason, "counterexample": doc })
            })
            .collect();
        json!({ "suite": self.suite, "trials": self.trials, "failures": failures })
    }
}

pub const SUITES: &[(&str, Law)] = &[
    ("pushout-product-generators", pushout_product_generators),
    ("mapping-complex", mapping_complex),
    ("tot-const", tot_const),
    ("skeletization", skeletization),
    ("triangle-identities", triangle_identities),
    ("induction", induction),
    ("projection-formula", projection_formula),
    ("beck-chevalley", beck_chevalley),
    ("homotopical-tensor", homotopical_tensor),
    ("quillen-bifunctor", quillen_bifunctor),
    ("external-hom-adjunction", external_hom_adjunction),
    ("homotopy-quotient", homotopy_quotient),
    ("coproducts", coproducts),
    ("push-pull-products", push_pull_products),
    ("set-pushout-product", set_pushout_product_oracle),
    ("codec-round-trip", codec_round_trip),
];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(n, _)| *n)
}

pub fn verify(suite: &str, seed: u64, trials: usize, size: usize) -> Result<SuiteReport> {
    let law = SUITES.iter().find(|(n, _)| *n == suite).ok_or_else(|| Error::UnknownSuite(suite.to_string()))?.1;
    Ok(run_law(suite, law, seed, trials, size))
}

/// Runs `law` over `trials` independent seeds in parallel; failures come back
/// in trial order.
pub fn run_law(name: &str, law: Law, seed: u64, trials: usize, size: usize) -> SuiteReport {
    let failures = (0..trials)
        .into_par_iter()
        .filter_map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut t = Trial { rng: ChaCha8Rng::seed_from_u64(s), size, witness: None };
            law(&mut t).err().map(|Violation(reason)| Failure { seed: s, reason, counterexample: t.witness.as_ref().map(codec::encode) })
        })
        .collect();
    SuiteReport { suite: name.to_string(), trials, failures }
}

// ---------------------------------------------------------------------------
// Chain-level laws.

fn pushout_product_generators(t: &mut Trial) -> Outcome {
    let field = *[Field::Prime(2), Field::Prime(3), Field::Rational].choose(&mut t.rng).unwrap();
    let (m, n) = (t.rng.gen_range(0..=2), t.rng.gen_range(0..=2));
    let pp = chain::pushout_product_chain(&gen_cof(field, m), &gen_cof(field, n))?;
    t.witness(Document::ChainMap(pp.clone()));
    let c = chain::classify_chain_map(&pp);
    ensure(c.cof && !c.we, "generating cofibrations: pushout-product is not a non-acyclic cofibration")?;
    let pp = chain::pushout_product_chain(&gen_cof(field, m), &gen_acyclic_cof(field, n))?;
    t.witness(Document::ChainMap(pp.clone()));
    let c = chain::classify_chain_map(&pp);
    ensure(c.cof && c.we, "with an acyclic generator: pushout-product is not an acyclic cofibration")
}

fn mapping_complex(t: &mut Trial) -> Outcome {
    let f5 = Field::Prime(5);
    let v = ChainComplex::random(f5, -2, 2, 3, &mut t.rng);
    let w = ChainComplex::random(f5, -2, 2, 3, &mut t.rng);
    t.witness(Document::Complex(v.clone()));
    let h = chain::hom_complex(&v, &w)?;
    let cycles = h.dim(0) - h.d(0).rank();
    let maps = chain::chain_map_space(&v, &w)?;
    ensure(cycles == maps.len(), &format!("dim Z_0 = {cycles} but the chain-map equations have {} solutions", maps.len()))
}

fn tot_const(t: &mut Trial) -> Outcome {
    let field = *[Field::Prime(3), Field::Rational].choose(&mut t.rng).unwrap();
    let v = ChainComplex::random(field, 0, 2, 2, &mut t.rng);
    let d = t.rng.gen_range(1..=3);
    let s = TruncSimplicialComplex::constant(&v, d);
    t.witness(Document::Simplicial(s.clone()));
    ensure(chain::homology(&tot(&s)) == chain::homology(&v), "tot of a constant object changes homology")
}

// ---------------------------------------------------------------------------
// Groupoids and local systems.

fn skeletization(t: &mut Trial) -> Outcome {
    let x = t.groupoid(6);
    t.witness(Document::Groupoid(x.clone()));
    let sk = skeletize(&x);
    ensure(sk.p.compose(&sk.iota)? == GroupoidFunctor::identity(&sk.skeleton), "p ∘ ι is not the identity")?;
    for m in 0..x.morphism_count() {
        let (a, b) = (x.src(m), x.tgt(m));
        let lhs = x.compose(sk.gamma[b], sk.iota.on_morphism(sk.p.on_morphism(m)));
        ensure(lhs == x.compose(m, sk.gamma[a]), &format!("γ is not natural at {}", x.morphism_label(m)))?;
    }
    ensure(classify_functor(&sk.iota).we, "the skeleton inclusion is not an equivalence")?;
    let v = t.system(&x, Field::Prime(3));
    t.witness(Document::System(v.clone()));
    ensure(local::skeletal_transport(&v)?.is_iso(), "skeletal transport is not an isomorphism")
}

fn triangle_identities(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let (x, y) = (t.groupoid(4), t.groupoid(4));
    let f = t.functor(&x, &y)?;
    let v = t.system(&x, f3);
    let w = t.system(&y, f3);
    t.witness(Document::System(v.clone()));
    let kan = local::push_left(&f, &v)?;
    let fv = &kan.unit.target().clone();
    let kan2 = local::push_left(&f, fv)?;
    let eps = kan2.transpose_into(&SystemMap::identity(fv), &kan.system)?;
    ensure(eps.compose(&kan.push_map(&kan2, &kan.unit)?)? == SystemMap::identity(&kan.system), "ε f_! ∘ f_! η ≠ id")?;
    let fw = local::pull_system(&f, &w)?;
    let kw = local::push_left(&f, &fw)?;
    let eps_w = kw.transpose_into(&SystemMap::identity(&fw), &w)?;
    ensure(local::pull_map(&f, &eps_w)?.compose(&kw.unit)? == SystemMap::identity(&fw), "f^* ε ∘ η f^* ≠ id")?;
    let psi = local::random_system_map(&kan.system, &w, &mut t.rng)?;
    ensure(kan.transpose_into(&kan.untranspose(&psi)?, &w)? == psi, "left transposes are not inverse")?;

    let rk = local::push_right(&f, &v)?;
    // ε f^* ∘ f^* η at w
    let eta = rk_unit(&f, &w)?;
    let fw_rk = local::push_right(&f, &fw)?;
    ensure(fw_rk.counit.compose(&local::pull_map(&f, &eta)?)? == SystemMap::identity(&fw), "ε f^* ∘ f^* η ≠ id")?;
    let phi = local::random_system_map(&fw, &v, &mut t.rng)?;
    let hat = rk.transpose_from(&phi, &w)?;
    ensure(rk.untranspose(&hat)? == phi, "right transposes are not inverse")
}

/// The unit `w -> f_* f^* w` of `f^* ⊣ f_*`.
fn rk_unit(f: &GroupoidFunctor, w: &LocalSystem) -> Result<SystemMap> {
    let fw = local::pull_system(f, w)?;
    local::push_right(f, &fw)?.transpose_from(&SystemMap::identity(&fw), w)
}

/// `C2 ≤ C4` or `C3 ≤ S3`, as a group homomorphism image list.
pub fn induction_pair(which: usize) -> (Group, Group, Vec<usize>) {
    if which == 0 {
        (Group::cyclic(2), Group::cyclic(4), vec![0, 2])
    } else {
        (Group::cyclic(3), Group::symmetric3(), vec![0, 3, 4])
    }
}

fn induction(t: &mut Trial) -> Outcome {
    let f5 = Field::Prime(5);
    let (h, g, images) = induction_pair(t.rng.gen_range(0..2));
    let f = GroupoidFunctor::from_group_hom(&h, &g, &images)?;
    let v = t.system(f.source(), f5);
    t.witness(Document::System(v.clone()));
    check_induction(&f, &v)
}

pub fn check_induction(f: &GroupoidFunctor, v: &LocalSystem) -> Outcome {
    let field = v.field();
    let index = f.target().morphism_count() / f.source().morphism_count();
    let pushed = local::push_left(f, v)?.system;
    for (n, d) in v.at(0).dims() {
        ensure(pushed.at(0).dim(n) == index * d, &format!("degree {n}: dim f_! V ≠ [G:H] dim V"))?;
    }
    let cmp = local::induction_comparison(f, v)?;
    ensure(cmp.index == index, "wrong number of cosets")?;
    for (n, fwd) in &cmp.forward {
        let back = &cmp.backward[n];
        let id = Matrix::identity(field, fwd.rows());
        ensure(fwd * back == id && back * fwd == Matrix::identity(field, fwd.cols()), &format!("degree {n}: comparison is not invertible"))?;
    }
    Ok(())
}

fn projection_formula(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let (x, y) = (t.groupoid(3), t.groupoid(3));
    let f = t.functor(&x, &y)?;
    let r = t.system(&x, f3);
    let v = t.system(&y, f3);
    let w = t.system(&y, f3);
    t.witness(Document::System(r.clone()));
    ensure(local::projection_formula_map(&f, &r, &v)?.is_iso(), "projection formula comparison is not an isomorphism")?;
    let lhs = local::pull_system(&f, &local::cup_tensor(&v, &w)?)?;
    let rhs = local::cup_tensor(&local::pull_system(&f, &v)?, &local::pull_system(&f, &w)?)?;
    ensure(lhs == rhs, "f^* is not strong monoidal")?;
    let lhs = local::pull_system(&f, &local::internal_hom(&v, &w)?)?;
    let rhs = local::internal_hom(&local::pull_system(&f, &v)?, &local::pull_system(&f, &w)?)?;
    ensure(lhs == rhs, "f^* does not preserve internal homs")
}

fn beck_chevalley(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let (x, z) = (t.groupoid(3), t.groupoid(2));
    let y = t.groupoid(3);
    let f = t.functor(&x, &y)?;
    let v = t.system(&x, f3);
    t.witness(Document::System(v.clone()));
    ensure(local::beck_chevalley_product(&f, &z, &v)?.is_iso(), "product Beck–Chevalley map is not an isomorphism")?;

    let y = Arc::new(FinGroupoid::disjoint_union(&t.groupoid(2), &t.groupoid(2)));
    let f = t.functor(&x, &y)?;
    let comps = y.pi0();
    let pick = t.rng.gen_range(0..comps.len());
    let (y_sub, iota_y) = FinGroupoid::full_subgroupoid(&y, &comps[pick]);
    let (x_sub, iota_x, f_prime) = groupoid_pullback(&f, &iota_y)?;
    let f_prime = f_prime.with_endpoints(x_sub, y_sub)?;
    ensure(local::beck_chevalley_embedding(&f, &f_prime, &iota_x, &iota_y, &v)?.is_iso(), "embedding Beck–Chevalley map is not an isomorphism")
}

// ---------------------------------------------------------------------------
// The integral structure.

/// A weak equivalence: a basis change over the identity, or the inclusion
/// of the restriction to a skeleton.
fn random_we(t: &mut Trial, field: Field) -> Result<LocMorphism> {
    let x = t.groupoid(3);
    let v = t.system(&x, field);
    if t.rng.gen_bool(0.5) {
        let bases: Vec<BTreeMap<i64, Matrix>> =
            v.fibers().iter().map(|c| c.dims().into_iter().map(|(n, d)| (n, Matrix::random_invertible(field, d, &mut t.rng))).collect()).collect();
        let (_, iso) = v.conjugate(&bases);
        Ok(LocMorphism::over_identity(&iso))
    } else {
        let sk = skeletize(&x);
        let sv = local::pull_system(&sk.iota, &v)?;
        LocMorphism::new(sv.clone(), v, sk.iota, SystemMap::identity(&sv))
    }
}

fn homotopical_tensor(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let phi = random_we(t, f3)?;
    let gamma = random_we(t, f3)?;
    ensure(integral::classify_integral(&phi)?.we && integral::classify_integral(&gamma)?.we, "generated inputs are not weak equivalences")?;
    let pp = integral::external_tensor_map(&phi, &gamma)?;
    t.witness(Document::LocMorphism(pp.clone()));
    ensure(integral::classify_integral(&pp)?.we, "⊠ of weak equivalences is not a weak equivalence")
}

/// A cofibration over the identity of `base`: a constant generator, or
/// `0 -> V`. The flag says whether it is acyclic.
fn random_cof(t: &mut Trial, base: &Arc<FinGroupoid>, field: Field) -> Result<(LocMorphism, bool)> {
    let n = t.rng.gen_range(0..=2);
    let (m, acyclic) = match t.rng.gen_range(0..3) {
        0 => (gen_cof(field, n), false),
        1 => (gen_acyclic_cof(field, n), true),
        _ => {
            let v = t.system(base, field);
            let zero = LocalSystem::zero(base, field);
            return Ok((LocMorphism::over_identity(&SystemMap::zero(&zero, &v)?), false));
        }
    };
    let s = LocalSystem::constant(base, m.source());
    let tg = LocalSystem::constant(base, m.target());
    let map = SystemMap::new(s, tg, vec![m; base.object_count()])?;
    Ok((LocMorphism::over_identity(&map), acyclic))
}

fn quillen_bifunctor(t: &mut Trial) -> Outcome {
    let field = *[Field::Rational, Field::Prime(5), Field::Prime(7)].choose(&mut t.rng).unwrap();
    let (x, y) = (t.groupoid(2), t.groupoid(2));
    let (phi, a) = random_cof(t, &x, field)?;
    let (gamma, b) = random_cof(t, &y, field)?;
    ensure(integral::classify_integral(&phi)?.cof.is_yes() && integral::classify_integral(&gamma)?.cof.is_yes(), "inputs are not certified cofibrations")?;
    let pp = integral::external_pushout_product(&phi, &gamma)?;
    t.witness(Document::LocMorphism(pp.clone()));
    let c = integral::classify_integral(&pp)?;
    ensure(c.cof.is_yes(), "pushout-product of cofibrations is not a certified cofibration")?;
    ensure(!(a || b) || c.we, "pushout-product with an acyclic cofibration is not acyclic")
}

fn external_hom_adjunction(t: &mut Trial) -> Outcome {
    let f2 = Field::Prime(2);
    let (x, z) = (t.groupoid(2), t.groupoid(2));
    let y = Arc::new(FinGroupoid::discrete(t.rng.gen_range(0..=2)));
    let v = LocalSystem::random(&x, f2, 0, 0, 1, &mut t.rng);
    let r = LocalSystem::random(&y, f2, 0, 0, 1, &mut t.rng);
    let w = LocalSystem::random(&z, f2, 0, 0, 1, &mut t.rng);
    t.witness(Document::LocObject(w.clone()));
    check_external_hom_adjunction(&v, &r, &w, 1 << 20)
}

pub fn check_external_hom_adjunction(v: &LocalSystem, r: &LocalSystem, w: &LocalSystem, budget: u128) -> Outcome {
    let lhs = integral::hom_enumerate(&integral::external_tensor(v, r)?, w, budget)?;
    let (h, _) = integral::external_hom(r, w)?;
    let rhs = integral::hom_enumerate(v, &h, budget)?;
    ensure(lhs.len() == rhs.len(), &format!("hom-set sizes differ: {} vs {}", lhs.len(), rhs.len()))?;
    for phi in &lhs {
        let tr = integral::external_hom_transpose(phi, v, r)?;
        ensure(rhs.contains(&tr), "transpose leaves the enumerated hom-set")?;
        ensure(&integral::external_hom_untranspose(&tr, r, w)? == phi, "transposes are not inverse")?;
    }
    Ok(())
}

fn homotopy_quotient(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let g = Group::cyclic(t.rng.gen_range(2..=3));
    let bg = Arc::new(FinGroupoid::delooping(&g));
    let v = t.system(&bg, f3);
    t.witness(Document::System(v.clone()));
    let sq = integral::homotopy_quotient_square(&g, &v)?;
    ensure(sq.commutes()?, "square does not commute")?;
    ensure(sq.is_pullback()?, "square is not a pullback")?;
    ensure(integral::classify_integral(&sq.right)?.fib, "right leg is not a fibration")?;
    let y = t.groupoid(2);
    let w = t.system(&y, f3);
    let tsq = sq.tensored(&w)?;
    ensure(tsq.commutes()? && tsq.is_pullback()?, "⊠ W does not preserve the pullback square")
}

fn coproducts(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let k = t.rng.gen_range(1..=3);
    let parts: Vec<LocalSystem> = (0..k)
        .map(|_| {
            let x = t.groupoid(2);
            t.system(&x, f3)
        })
        .collect();
    let y = t.groupoid(2);
    let w = t.system(&y, f3);
    t.witness(Document::LocObject(w.clone()));
    let (sum, inj) = integral::loc_coproduct(f3, &parts)?;
    for (p, i) in parts.iter().zip(&inj) {
        ensure(&local::pull_system(i.base_map(), &sum)? == p, "restriction to a summand does not recover it")?;
    }
    ensure(integral::coproduct_as_pushforward_sum(f3, &parts)?.1.is_iso(), "coproduct is not the sum of pushforwards")?;
    ensure(integral::is_loc_iso(&integral::coproduct_tensor_iso(f3, &parts, &w)?), "⊠ does not preserve coproducts")?;
    ensure(integral::is_loc_iso(&integral::tensor_coproduct_iso(f3, &w, &parts)?), "⊠ does not distribute over coproducts")
}

fn push_pull_products(t: &mut Trial) -> Outcome {
    let f3 = Field::Prime(3);
    let (x, xp, y, yp) = (t.groupoid(2), t.groupoid(2), t.groupoid(2), t.groupoid(2));
    let f = t.functor(&x, &xp)?;
    let g = t.functor(&y, &yp)?;
    let (v, w, vp, wp) = (t.system(&x, f3), t.system(&y, f3), t.system(&xp, f3), t.system(&yp, f3));
    t.witness(Document::System(v.clone()));
    let ext = integral::external_tensor(&vp, &wp)?;
    let (pxy, _, _) = product_with_projections(&x, &y);
    let fg = product_functor(&f, &g, &pxy, ext.base());
    let pulled = integral::external_tensor(&local::pull_system(&f, &vp)?, &local::pull_system(&g, &wp)?)?;
    ensure(local::pull_system(&fg, &ext)? == pulled, "(f×g)^* does not commute with ⊠")?;
    let cmp = integral::push_external_comparison(&f, &g, &v, &w)?;
    ensure(cmp.is_iso(), "(f×g)_! comparison is not an isomorphism")?;
    let phi = LocMorphism::new(v.clone(), vp.clone(), f.clone(), local::random_system_map(&v, &local::pull_system(&f, &vp)?, &mut t.rng)?)?;
    let gamma = LocMorphism::new(w.clone(), wp.clone(), g.clone(), local::random_system_map(&w, &local::pull_system(&g, &wp)?, &mut t.rng)?)?;
    t.witness(Document::LocMorphism(phi.clone()));
    let lhs = integral::external_tensor_map(&phi, &gamma)?.adjunct()?;
    let rhs = integral::external_tensor_system_map(&phi.adjunct()?, &gamma.adjunct()?)?.compose(&cmp)?;
    ensure(lhs == rhs, "adjunct of ⊠ is not ⊠ of adjuncts")
}

// ---------------------------------------------------------------------------
// Sets and codecs.

/// Fiber sizes of the set pushout-product by naive relabelling to a fixed
/// point, independent of the union-find implementation.
fn brute_pushout_fibers(f: &SetMap, g: &SetMap) -> (usize, Vec<usize>) {
    let (x, xp, y, yp) = (f.domain(), f.codomain, g.domain(), g.codomain);
    let left = x * yp;
    let mut label: Vec<usize> = (0..left + xp * y).collect();
    loop {
        let mut changed = false;
        for a in 0..x {
            for b in 0..y {
                let (i, j) = (a * yp + g.map[b], left + f.map[a] * y + b);
                let (lo, hi) = (label[i].min(label[j]), label[i].max(label[j]));
                if lo != hi {
                    label.iter_mut().filter(|l| **l == hi).for_each(|l| *l = lo);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let image = |i: usize| if i < left { f.map[i / yp] * yp + i % yp } else { (i - left) / y * yp + g.map[(i - left) % y] };
    let mut fibers = vec![0; xp * yp];
    let mut classes = 0;
    for i in 0..label.len() {
        if label[i] == i {
            classes += 1;
            fibers[image(i)] += 1;
        }
    }
    (classes, fibers)
}

fn set_pushout_product_oracle(t: &mut Trial) -> Outcome {
    let f = SetMap::random(6, &mut t.rng);
    let g = SetMap::random(6, &mut t.rng);
    let pp = set_pushout_product(&f, &g);
    let (classes, fibers) = brute_pushout_fibers(&f, &g);
    ensure(pp.classes.len() == classes, "class count differs from brute force")?;
    ensure(pp.fibers == fibers, "fibers differ from brute force")?;
    ensure(pushout_product_fiber_census(&f, &g) == fibers, "three-case census disagrees")
}

fn codec_round_trip(t: &mut Trial) -> Outcome {
    let field = *[Field::Prime(3), Field::Rational].choose(&mut t.rng).unwrap();
    let (x, y) = (t.groupoid(3), t.groupoid(3));
    let v = t.system(&x, field);
    let w = t.system(&y, field);
    let f = t.functor(&x, &y)?;
    let phi = LocMorphism::new(v.clone(), w.clone(), f.clone(), local::random_system_map(&v, &local::pull_system(&f, &w)?, &mut t.rng)?)?;
    let c = ChainComplex::random(field, -1, 2, 3, &mut t.rng);
    let docs = [
        Document::System(v),
        Document::Functor(f),
        Document::Complex(c.clone()),
        Document::ChainMap(ChainMap::identity(&c)),
        Document::LocMorphism(phi),
    ];
    for doc in docs {
        let text = codec::encode(&doc);
        t.witness(doc.clone());
        let back = codec::decode(&text)?;
        ensure(back == doc, &format!("{} does not round-trip", doc.kind()))?;
        ensure(codec::encode(&back) == text, &format!("{} re-encodes differently", doc.kind()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_briefly() {
        for name in suite_names() {
            let r = verify(name, 1, 2, 3).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(verify("projection-formula", 7, 3, 3).unwrap(), verify("projection-formula", 7, 3, 3).unwrap());
        assert!(matches!(verify("no-such-suite", 0, 1, 1), Err(Error::UnknownSuite(_))));
    }
}
