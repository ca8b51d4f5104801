//! The category of local systems over varying finite groupoids: objects are
//! pairs (base, system), a morphism `V_X -> W_Y` is a functor `f : X -> Y`
//! with a natural map `V -> f^* W`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::{self, hom_complex, hom_map, tensor_map, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::groupoid::{
    classify_functor, coproduct_with_injections, enumerate_functors, functor_groupoid, groupoid_pullback, product_functor,
    product_with_projections, FinGroupoid, GroupoidFunctor, Group,
};
use crate::linalg::{Field, Matrix, Scalar};
use crate::local::{
    classify_system_map, cup_tensor, cup_tensor_map, direct_sum_systems, natural_map_space, pull_map, pull_system, push_left,
    push_right, sum_of_maps, system_pullback, system_pushout, CofAnswer, LocalSystem, SystemClassification, SystemMap,
    SystemPullback,
};

/// An object of the integral category: a local system together with its base.
pub type LocObject = LocalSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocMorphism {
    source: LocObject,
    target: LocObject,
    base_map: GroupoidFunctor,
    component: SystemMap,
}

fn check_base(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

impl LocMorphism {
    pub fn new(source: LocObject, target: LocObject, base_map: GroupoidFunctor, component: SystemMap) -> Result<LocMorphism> {
        let m = Self::assemble(source, target, base_map, component)?;
        m.validate()?;
        Ok(m)
    }

    /// Checks endpoints only.
    pub fn assemble(source: LocObject, target: LocObject, base_map: GroupoidFunctor, component: SystemMap) -> Result<LocMorphism> {
        check_base(base_map.source(), source.base())?;
        check_base(base_map.target(), target.base())?;
        if component.source() != &source {
            return Err(Error::ObjectMismatch("component does not start at the source system".into()));
        }
        if component.target() != &pull_system(&base_map, &target)? {
            return Err(Error::ObjectMismatch("component does not land in the pulled-back target".into()));
        }
        Ok(LocMorphism { source, target, base_map, component })
    }

    pub fn validate(&self) -> Result<()> {
        self.base_map.validate()?;
        self.source.validate()?;
        self.target.validate()?;
        self.component.validate()
    }

    pub fn identity(a: &LocObject) -> LocMorphism {
        LocMorphism {
            source: a.clone(),
            target: a.clone(),
            base_map: GroupoidFunctor::identity(a.base()),
            component: SystemMap::identity(a),
        }
    }

    /// A map of systems over a fixed base, as a morphism over the identity.
    pub fn over_identity(phi: &SystemMap) -> LocMorphism {
        LocMorphism {
            source: phi.source().clone(),
            target: phi.target().clone(),
            base_map: GroupoidFunctor::identity(phi.base()),
            component: phi.clone(),
        }
    }

    pub fn source(&self) -> &LocObject {
        &self.source
    }

    pub fn target(&self) -> &LocObject {
        &self.target
    }

    pub fn base_map(&self) -> &GroupoidFunctor {
        &self.base_map
    }

    pub fn component(&self) -> &SystemMap {
        &self.component
    }

    /// `self ∘ first`: base `g ∘ f`, component `f^* ψ ∘ φ`.
    pub fn compose(&self, first: &LocMorphism) -> Result<LocMorphism> {
        if first.target != self.source {
            return Err(Error::ObjectMismatch("middle objects differ".into()));
        }
        let base_map = self.base_map.compose(&first.base_map)?;
        let component = pull_map(&first.base_map, &self.component)?.compose(&first.component)?;
        Ok(LocMorphism { source: first.source.clone(), target: self.target.clone(), base_map, component })
    }

    /// The adjunct `f_! V -> W`.
    pub fn adjunct(&self) -> Result<SystemMap> {
        push_left(&self.base_map, &self.source)?.transpose_into(&self.component, &self.target)
    }

    /// The morphism whose adjunct is `psi : f_! V -> W`.
    pub fn from_adjunct(f: &GroupoidFunctor, source: &LocObject, psi: &SystemMap) -> Result<LocMorphism> {
        let kan = push_left(f, source)?;
        if psi.source() != &kan.system {
            return Err(Error::ShapeMismatch("map does not start at f_! V".into()));
        }
        let component = kan.untranspose(psi)?;
        Ok(LocMorphism { source: source.clone(), target: psi.target().clone(), base_map: f.clone(), component })
    }
}

// ---------------------------------------------------------------------------
// Classification.

/// Weak equivalences, fibrations and cofibrations of the integral model
/// structure. Every fiber object is fibrant, so a weak equivalence is an
/// equivalence of bases with an objectwise quasi-isomorphic component.
pub fn classify_integral(phi: &LocMorphism) -> Result<SystemClassification> {
    let base = classify_functor(&phi.base_map);
    let comp = classify_system_map(&phi.component);
    let cof = if !base.cof {
        CofAnswer::No("base functor is not injective on objects".into())
    } else {
        classify_system_map(&phi.adjunct()?).cof
    };
    Ok(SystemClassification { we: base.we && comp.we, fib: base.fib && comp.fib, cof })
}

// ---------------------------------------------------------------------------
// External tensor product.

/// `V ⊠ W = pr_X^* V ⊗ pr_Y^* W` over `X × Y`.
pub fn external_tensor(a: &LocObject, b: &LocObject) -> Result<LocObject> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    let (_, px, py) = product_with_projections(a.base(), b.base());
    cup_tensor(&pull_system(&px, a)?, &pull_system(&py, b)?)
}

/// `φ ⊠ γ` over `f × g`, with components `φ_x ⊗ γ_y`.
pub fn external_tensor_map(phi: &LocMorphism, gamma: &LocMorphism) -> Result<LocMorphism> {
    let source = external_tensor(&phi.source, &gamma.source)?;
    let target = external_tensor(&phi.target, &gamma.target)?;
    let fg = product_functor(&phi.base_map, &gamma.base_map, source.base(), target.base());
    let pulled = pull_system(&fg, &target)?;
    let ky = gamma.source.base().object_count();
    let comps = (0..source.base().object_count())
        .map(|o| tensor_map(phi.component.component(o / ky), gamma.component.component(o % ky)))
        .collect::<Result<Vec<_>>>()?;
    let component = SystemMap::assemble(source.clone(), pulled, comps)?;
    Ok(LocMorphism { source, target, base_map: fg, component })
}

/// `φ ⊠ γ` for maps over fixed bases, as a map over the product base.
pub fn external_tensor_system_map(phi: &SystemMap, gamma: &SystemMap) -> Result<SystemMap> {
    Ok(external_tensor_map(&LocMorphism::over_identity(phi), &LocMorphism::over_identity(gamma))?.component)
}

/// The comparison `(f × g)_!(V ⊠ W) -> f_! V ⊠ g_! W`, the adjunct of
/// `η_V ⊠ η_W`.
pub fn push_external_comparison(f: &GroupoidFunctor, g: &GroupoidFunctor, v: &LocObject, w: &LocObject) -> Result<SystemMap> {
    let kv = push_left(f, v)?;
    let kw = push_left(g, w)?;
    let eta_v = LocMorphism { source: v.clone(), target: kv.system.clone(), base_map: f.clone(), component: kv.unit.clone() };
    let eta_w = LocMorphism { source: w.clone(), target: kw.system.clone(), base_map: g.clone(), component: kw.unit.clone() };
    external_tensor_map(&eta_v, &eta_w)?.adjunct()
}

/// True when `f` is injective on objects and morphisms, full, and its image
/// is a union of connected components.
pub fn is_component_embedding(f: &GroupoidFunctor) -> bool {
    let (x, y) = (f.source(), f.target());
    let objs = f.object_map();
    let mut seen = objs.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != objs.len() {
        return false;
    }
    let mut mors = f.morphism_map().to_vec();
    mors.sort();
    mors.dedup();
    if mors.len() != x.morphism_count() {
        return false;
    }
    let full = (0..x.object_count())
        .all(|a| (0..x.object_count()).all(|b| x.hom(a, b).len() == y.hom(objs[a], objs[b]).len()));
    let comp = y.component_of();
    let closed = (0..y.object_count()).all(|o| !objs.iter().any(|&i| comp[i] == comp[o]) || objs.contains(&o));
    full && closed
}

/// The pushout-product `φ ×̂ γ` of morphisms whose base functors embed onto
/// unions of components. The base pushout is then the full subgroupoid `P`
/// of `X' × Y'` on pairs with a coordinate in an image; the result is the
/// morphism over `P ↪ X' × Y'` whose adjunct is the objectwise
/// pushout-product of `pr^* φ̃` and `pr^* γ̃`.
pub fn external_pushout_product(phi: &LocMorphism, gamma: &LocMorphism) -> Result<LocMorphism> {
    if phi.source.field() != gamma.source.field() {
        return Err(Error::FieldMismatch);
    }
    for (name, m) in [("first", phi), ("second", gamma)] {
        if !is_component_embedding(&m.base_map) {
            return Err(Error::UnsupportedBasePushout(format!(
                "the {name} base functor is not an embedding onto a union of components"
            )));
        }
    }
    let target = external_tensor(&phi.target, &gamma.target)?;
    let base = target.base().clone();
    let (_, pxp, pyp) = product_with_projections(phi.target.base(), gamma.target.base());
    let pxp = pxp.with_endpoints(base.clone(), phi.target.base().clone())?;
    let pyp = pyp.with_endpoints(base.clone(), gamma.target.base().clone())?;
    let a = pull_map(&pxp, &phi.adjunct()?)?;
    let b = pull_map(&pyp, &gamma.adjunct()?)?;
    let ppm = system_pushout_product(&a, &b)?;
    let (fi, gi) = (phi.base_map.object_map(), gamma.base_map.object_map());
    let ky = gamma.target.base().object_count();
    let objs: Vec<usize> = (0..base.object_count()).filter(|o| fi.contains(&(o / ky)) || gi.contains(&(o % ky))).collect();
    let (_, iota) = FinGroupoid::full_subgroupoid(&base, &objs);
    let source = pull_system(&iota, ppm.source())?;
    let component = pull_map(&iota, &ppm)?;
    Ok(LocMorphism { source, target, base_map: iota, component })
}

/// Objectwise pushout-product of two maps over a common base.
pub fn system_pushout_product(a: &SystemMap, b: &SystemMap) -> Result<SystemMap> {
    let id = SystemMap::identity;
    let left = cup_tensor_map(a, &id(b.source()))?;
    let top = cup_tensor_map(&id(a.source()), b)?;
    let po = system_pushout(&left, &top)?;
    po.universal(&cup_tensor_map(&id(a.target()), b)?, &cup_tensor_map(a, &id(b.target()))?)
}

// ---------------------------------------------------------------------------
// External hom over a discrete base.

/// `R ⊣□ W` over `Z^Y` for `R` over a discrete `Y`: at a tuple `(z_y)` the
/// sum `⊕_y [R_y, W_{z_y}]`, with the evaluation functors.
pub fn external_hom(r: &LocObject, w: &LocObject) -> Result<(LocObject, Vec<GroupoidFunctor>)> {
    if !r.base().is_discrete() {
        return Err(Error::NotDiscreteBase);
    }
    if r.field() != w.field() {
        return Err(Error::FieldMismatch);
    }
    let field = r.field();
    let (zy, evs) = functor_groupoid(r.base(), w.base()).map_err(|_| Error::NotDiscreteBase)?;
    let n = r.base().object_count();
    let at: Vec<ChainComplex> = (0..zy.object_count())
        .map(|o| {
            let parts = (0..n).map(|y| hom_complex(r.at(y), w.at(evs[y].on_object(o)))).collect::<Result<Vec<_>>>()?;
            Ok(ChainComplex::sum_of(field, &parts.iter().collect::<Vec<_>>()))
        })
        .collect::<Result<_>>()?;
    let along: Vec<ChainMap> = (0..zy.morphism_count())
        .map(|m| {
            let parts = (0..n)
                .map(|y| hom_map(&ChainMap::identity(r.at(y)), w.along(evs[y].on_morphism(m))))
                .collect::<Result<Vec<_>>>()?;
            Ok(sum_of_maps(field, &parts.iter().collect::<Vec<_>>()))
        })
        .collect::<Result<_>>()?;
    Ok((LocalSystem::assemble(zy, field, at, along)?, evs))
}

fn power_index(base: usize, digits: impl Iterator<Item = usize>) -> usize {
    digits.fold(0, |acc, d| acc * base + d)
}

/// Transposes `φ : V ⊠ R -> W` into `V -> R ⊣□ W`.
pub fn external_hom_transpose(phi: &LocMorphism, v: &LocObject, r: &LocObject) -> Result<LocMorphism> {
    if phi.source != external_tensor(v, r)? {
        return Err(Error::ShapeMismatch("source is not V ⊠ R".into()));
    }
    let w = &phi.target;
    let (hom, _) = external_hom(r, w)?;
    let field = v.field();
    let (x, z) = (v.base(), w.base());
    let n = r.base().object_count();
    let f = &phi.base_map;
    let objects: Vec<usize> = (0..x.object_count())
        .map(|a| power_index(z.object_count(), (0..n).map(|y| f.on_object(a * n + y))))
        .collect();
    // Y discrete: morphism y of Y is id_y, so (m, id_y) has index m n + y
    let morphisms: Vec<usize> = (0..x.morphism_count())
        .map(|m| power_index(z.morphism_count(), (0..n).map(|y| f.on_morphism(m * n + y))))
        .collect();
    let base_map = GroupoidFunctor::new(x.clone(), hom.base().clone(), objects, morphisms)?;
    let pulled = pull_system(&base_map, &hom)?;
    let comps = (0..x.object_count())
        .map(|a| {
            let curried = (0..n)
                .map(|y| chain::curry(phi.component.component(a * n + y), v.at(a), r.at(y)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ChainMap::from_fn(v.at(a), pulled.at(a), |t| {
                let blocks: Vec<Matrix> = curried.iter().map(|c| c.at(t)).collect();
                Matrix::vstack(field, v.at(a).dim(t), &blocks.iter().collect::<Vec<_>>())
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let component = SystemMap::assemble(v.clone(), pulled, comps)?;
    Ok(LocMorphism { source: v.clone(), target: hom, base_map, component })
}

/// Inverse of [`external_hom_transpose`].
pub fn external_hom_untranspose(psi: &LocMorphism, r: &LocObject, w: &LocObject) -> Result<LocMorphism> {
    let (hom, evs) = external_hom(r, w)?;
    if psi.target != hom {
        return Err(Error::ShapeMismatch("target is not R ⊣□ W".into()));
    }
    let v = &psi.source;
    let source = external_tensor(v, r)?;
    let z = w.base();
    let n = r.base().object_count();
    let g = &psi.base_map;
    let objects: Vec<usize> = (0..source.base().object_count()).map(|o| evs[o % n].on_object(g.on_object(o / n))).collect();
    let morphisms: Vec<usize> = (0..source.base().morphism_count()).map(|m| evs[m % n].on_morphism(g.on_morphism(m / n))).collect();
    let base_map = GroupoidFunctor::new(source.base().clone(), z.clone(), objects, morphisms)?;
    let pulled = pull_system(&base_map, w)?;
    let comps = (0..source.base().object_count())
        .map(|o| {
            let (a, y) = (o / n, o % n);
            let zo = evs[y].on_object(g.on_object(a));
            let blocks: Vec<ChainComplex> = (0..n).map(|k| hom_complex(r.at(k), w.at(evs[k].on_object(g.on_object(a))))).collect::<Result<_>>()?;
            let block = &blocks[y];
            let full = psi.component.component(a);
            let piece = ChainMap::from_fn(v.at(a), block, |t| {
                let off: usize = blocks[..y].iter().map(|b| b.dim(t)).sum();
                full.at(t).submatrix(off..off + block.dim(t), 0..v.at(a).dim(t))
            });
            chain::uncurry(&piece, r.at(y), w.at(zo))
        })
        .collect::<Result<Vec<_>>>()?;
    let component = SystemMap::assemble(source.clone(), pulled, comps)?;
    Ok(LocMorphism { source, target: w.clone(), base_map, component })
}

/// The restriction of `R ⊣□ W` along a tuple of objects `f : Y -> Z`,
/// computed as `(p_Y)_* [R, f^* W]`, together with the explicit isomorphism
/// onto the fiber of `R ⊣□ W` at `f`.
pub fn restriction_at(r: &LocObject, w: &LocObject, images: &[usize]) -> Result<(ChainComplex, ChainMap)> {
    let (hom, _) = external_hom(r, w)?;
    let y = r.base();
    let z = w.base();
    if images.len() != y.object_count() || images.iter().any(|&o| o >= z.object_count()) {
        return Err(Error::ShapeMismatch("one object of Z per object of Y is required".into()));
    }
    let f = GroupoidFunctor::new(y.clone(), z.clone(), images.to_vec(), images.iter().map(|&o| z.identity(o)).collect())?;
    let inner = crate::local::internal_hom(r, &pull_system(&f, w)?)?;
    let kan = push_right(&GroupoidFunctor::terminal(y), &inner)?;
    let restricted = kan.system.at(0).clone();
    let fiber = hom.at(power_index(z.object_count(), images.iter().copied()));
    let iso = ChainMap::new(restricted.clone(), fiber.clone(), {
        (restricted.lo()..=restricted.hi())
            .filter(|&t| restricted.dim(t) > 0 && fiber.dim(t) > 0)
            .map(|t| (t, kan.inclusion(0, t)))
            .collect()
    })?;
    Ok((restricted, iso))
}

// ---------------------------------------------------------------------------
// Limits and colimits.

/// The coproduct over the disjoint union of the bases, with its injections.
pub fn loc_coproduct(field: Field, parts: &[LocObject]) -> Result<(LocObject, Vec<LocMorphism>)> {
    if parts.iter().any(|p| p.field() != field) {
        return Err(Error::FieldMismatch);
    }
    let mut base = Arc::new(FinGroupoid::empty());
    for p in parts {
        base = coproduct_with_injections(&base, p.base()).0;
    }
    let at = parts.iter().flat_map(|p| p.fibers().iter().cloned()).collect();
    let along = parts.iter().flat_map(|p| p.transports().iter().cloned()).collect();
    let object = LocalSystem::assemble(base.clone(), field, at, along)?;
    let mut injections = Vec::new();
    let (mut ko, mut km) = (0, 0);
    for p in parts {
        let (no, nm) = (p.base().object_count(), p.base().morphism_count());
        let f = GroupoidFunctor::new(p.base().clone(), base.clone(), (ko..ko + no).collect(), (km..km + nm).collect())?;
        let component = SystemMap::identity(p);
        let component = SystemMap::assemble(p.clone(), pull_system(&f, &object)?, component.components().to_vec())?;
        injections.push(LocMorphism { source: p.clone(), target: object.clone(), base_map: f, component });
        ko += no;
        km += nm;
    }
    Ok((object, injections))
}

/// The coproduct expressed as `⊕_i (ι_i)_! V_i` over the union, with the
/// explicit isomorphism from the coproduct built from the units.
pub fn coproduct_as_pushforward_sum(field: Field, parts: &[LocObject]) -> Result<(LocObject, SystemMap)> {
    let (object, injections) = loc_coproduct(field, parts)?;
    let base = object.base().clone();
    let kans = injections.iter().map(|i| push_left(&i.base_map, &i.source)).collect::<Result<Vec<_>>>()?;
    let sum = direct_sum_systems(&base, field, &kans.iter().map(|k| &k.system).collect::<Vec<_>>())?;
    let mut owner = vec![(0, 0); base.object_count()];
    for (i, inj) in injections.iter().enumerate() {
        for (a, &o) in inj.base_map.object_map().iter().enumerate() {
            owner[o] = (i, a);
        }
    }
    let comps = (0..base.object_count())
        .map(|o| {
            let (i, a) = owner[o];
            let eta = kans[i].unit.component(a);
            ChainMap::from_fn(object.at(o), sum.at(o), |t| {
                let off: usize = kans[..i].iter().map(|k| k.system.at(o).dim(t)).sum();
                let mut m = Matrix::zeros(field, sum.at(o).dim(t), object.at(o).dim(t));
                m.put(off, 0, &eta.at(t));
                m
            })
        })
        .collect();
    Ok((sum.clone(), SystemMap::new(object, sum, comps)?))
}

/// The product over `X × Y` with fibers `V_x ⊕ W_y`, with its projections.
pub fn loc_product(a: &LocObject, b: &LocObject) -> Result<(LocObject, LocMorphism, LocMorphism)> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    let field = a.field();
    let (base, px, py) = product_with_projections(a.base(), b.base());
    let (va, wb) = (pull_system(&px, a)?, pull_system(&py, b)?);
    let object = direct_sum_systems(&base, field, &[&va, &wb])?;
    let proj = |first: bool, f: &GroupoidFunctor, tgt: &LocObject| -> Result<LocMorphism> {
        let pulled = pull_system(f, tgt)?;
        let comps = (0..base.object_count())
            .map(|o| {
                ChainMap::from_fn(object.at(o), pulled.at(o), |t| {
                    let (da, db) = (va.at(o).dim(t), wb.at(o).dim(t));
                    let rows = if first { da } else { db };
                    let mut m = Matrix::zeros(field, rows, da + db);
                    m.put(0, if first { 0 } else { da }, &Matrix::identity(field, rows));
                    m
                })
            })
            .collect();
        let component = SystemMap::new(object.clone(), pulled, comps)?;
        Ok(LocMorphism { source: object.clone(), target: tgt.clone(), base_map: f.clone(), component })
    };
    let pa = proj(true, &px, a)?;
    let pb = proj(false, &py, b)?;
    Ok((object, pa, pb))
}

/// The pullback of a cospan `A -> C <- B`: base the groupoid pullback,
/// fibers the chain pullbacks of the pulled-back legs.
#[derive(Clone, Debug)]
pub struct LocPullback {
    pub object: LocObject,
    pub pr1: LocMorphism,
    pub pr2: LocMorphism,
    pairs: BTreeMap<(usize, usize), usize>,
    mor_pairs: BTreeMap<(usize, usize), usize>,
    fibers: SystemPullback,
}

impl LocPullback {
    /// The morphism into the pullback induced by a commuting cone.
    pub fn universal(&self, alpha: &LocMorphism, beta: &LocMorphism) -> Result<LocMorphism> {
        if alpha.source != beta.source {
            return Err(Error::ObjectMismatch("cone legs have different sources".into()));
        }
        let t = &alpha.source;
        let x = t.base();
        let lookup = |table: &BTreeMap<(usize, usize), usize>, key| {
            table.get(&key).copied().ok_or_else(|| Error::ObjectMismatch("cone does not commute on bases".into()))
        };
        let objects = (0..x.object_count())
            .map(|o| lookup(&self.pairs, (alpha.base_map.on_object(o), beta.base_map.on_object(o))))
            .collect::<Result<Vec<_>>>()?;
        let morphisms = (0..x.morphism_count())
            .map(|m| lookup(&self.mor_pairs, (alpha.base_map.on_morphism(m), beta.base_map.on_morphism(m))))
            .collect::<Result<Vec<_>>>()?;
        let u = GroupoidFunctor::new(x.clone(), self.object.base().clone(), objects, morphisms)?;
        let comps = (0..x.object_count())
            .map(|o| self.fibers.fiber_universal(u.on_object(o), alpha.component.component(o), beta.component.component(o)))
            .collect::<Result<Vec<_>>>()?;
        let component = SystemMap::new(t.clone(), pull_system(&u, &self.object)?, comps)?;
        Ok(LocMorphism { source: t.clone(), target: self.object.clone(), base_map: u, component })
    }
}

pub fn loc_pullback(phi: &LocMorphism, gamma: &LocMorphism) -> Result<LocPullback> {
    if phi.target != gamma.target {
        return Err(Error::ObjectMismatch("cospan legs have different targets".into()));
    }
    let (base, p1, p2) = groupoid_pullback(&phi.base_map, &gamma.base_map)?;
    let left = pull_map(&p1, &phi.component)?;
    let right = pull_map(&p2, &gamma.component)?;
    let fibers = system_pullback(&left, &right)?;
    let object = fibers.object.clone();
    let pr1 = LocMorphism { source: object.clone(), target: phi.source.clone(), base_map: p1.clone(), component: fibers.pr1.clone() };
    let pr2 = LocMorphism { source: object.clone(), target: gamma.source.clone(), base_map: p2.clone(), component: fibers.pr2.clone() };
    let pairs = (0..base.object_count()).map(|o| ((p1.on_object(o), p2.on_object(o)), o)).collect();
    let mor_pairs = (0..base.morphism_count()).map(|m| ((p1.on_morphism(m), p2.on_morphism(m)), m)).collect();
    Ok(LocPullback { object, pr1, pr2, pairs, mor_pairs, fibers })
}

/// True when `f` is bijective on objects and on morphisms.
pub fn is_groupoid_iso(f: &GroupoidFunctor) -> bool {
    let bij = |map: &[usize], n: usize| {
        let mut v = map.to_vec();
        v.sort();
        v.dedup();
        map.len() == n && v.len() == n
    };
    bij(f.object_map(), f.target().object_count()) && bij(f.morphism_map(), f.target().morphism_count())
}

/// True when `φ` is an isomorphism of the integral category.
pub fn is_loc_iso(phi: &LocMorphism) -> bool {
    is_groupoid_iso(&phi.base_map) && phi.component.is_iso()
}

/// A commutative square `tl -> tr`, `tl -> bl`, `tr -> br`, `bl -> br`.
#[derive(Clone, Debug)]
pub struct LocSquare {
    pub top: LocMorphism,
    pub left: LocMorphism,
    pub right: LocMorphism,
    pub bottom: LocMorphism,
}

impl LocSquare {
    pub fn commutes(&self) -> Result<bool> {
        Ok(self.right.compose(&self.top)? == self.bottom.compose(&self.left)?)
    }

    /// Whether the comparison into the pullback of `right` and `bottom` is
    /// an isomorphism.
    pub fn is_pullback(&self) -> Result<bool> {
        let pb = loc_pullback(&self.right, &self.bottom)?;
        Ok(is_loc_iso(&pb.universal(&self.top, &self.left)?))
    }

    /// The square tensored with `w` on the right, using identities on `w`.
    pub fn tensored(&self, w: &LocObject) -> Result<LocSquare> {
        let id = LocMorphism::identity(w);
        Ok(LocSquare {
            top: external_tensor_map(&self.top, &id)?,
            left: external_tensor_map(&self.left, &id)?,
            right: external_tensor_map(&self.right, &id)?,
            bottom: external_tensor_map(&self.bottom, &id)?,
        })
    }
}

/// The square exhibiting `V // G` as a pullback: `pt^* V -> V` over
/// `pt -> BG`, mapping to the zero systems over `pt` and `BG`.
pub fn homotopy_quotient_square(group: &Group, v: &LocalSystem) -> Result<LocSquare> {
    let bg = v.base().clone();
    if bg.object_count() != 1 || bg.morphism_count() != group.order() {
        return Err(Error::ShapeMismatch("system must live over the delooping of the group".into()));
    }
    let field = v.field();
    let pt = Arc::new(FinGroupoid::point());
    let incl = GroupoidFunctor::constant(&pt, &bg, 0);
    let tl = pull_system(&incl, v)?;
    let bl = LocalSystem::zero(&pt, field);
    let br = LocalSystem::zero(&bg, field);
    let top = LocMorphism::new(tl.clone(), v.clone(), incl.clone(), SystemMap::identity(&tl))?;
    let left = LocMorphism::over_identity(&SystemMap::zero(&tl, &bl)?);
    let right = LocMorphism::over_identity(&SystemMap::zero(v, &br)?);
    let bottom = LocMorphism::new(bl.clone(), br.clone(), incl, SystemMap::identity(&bl))?;
    Ok(LocSquare { top, left, right, bottom })
}

// ---------------------------------------------------------------------------
// Coproduct comparisons.

/// The explicit isomorphism `⊔_i (V_i ⊠ W) -> (⊔_i V_i) ⊠ W`.
pub fn coproduct_tensor_iso(field: Field, parts: &[LocObject], w: &LocObject) -> Result<LocMorphism> {
    let tensored = parts.iter().map(|p| external_tensor(p, w)).collect::<Result<Vec<_>>>()?;
    let (source, _) = loc_coproduct(field, &tensored)?;
    let (sum, _) = loc_coproduct(field, parts)?;
    let target = external_tensor(&sum, w)?;
    let (ky, ny) = (w.base().object_count(), w.base().morphism_count());
    // summand i of the source is X_i × Y; in the target X_i sits at an offset
    let (mut objects, mut morphisms) = (Vec::new(), Vec::new());
    let (mut ko, mut km) = (0, 0);
    for p in parts {
        let (no, nm) = (p.base().object_count(), p.base().morphism_count());
        objects.extend((0..no * ky).map(|o| (ko + o / ky) * ky + o % ky));
        morphisms.extend((0..nm * ny).map(|m| (km + m / ny) * ny + m % ny));
        ko += no;
        km += nm;
    }
    identity_component_morphism(source, target, objects, morphisms)
}

/// The explicit isomorphism `⊔_i (V ⊠ W_i) -> V ⊠ (⊔_i W_i)`.
pub fn tensor_coproduct_iso(field: Field, v: &LocObject, parts: &[LocObject]) -> Result<LocMorphism> {
    let tensored = parts.iter().map(|p| external_tensor(v, p)).collect::<Result<Vec<_>>>()?;
    let (source, _) = loc_coproduct(field, &tensored)?;
    let (sum, _) = loc_coproduct(field, parts)?;
    let target = external_tensor(v, &sum)?;
    let (ky, ny) = (sum.base().object_count(), sum.base().morphism_count());
    let (mut objects, mut morphisms) = (Vec::new(), Vec::new());
    let (mut ko, mut km) = (0, 0);
    for p in parts {
        let (no, nm) = (p.base().object_count(), p.base().morphism_count());
        objects.extend((0..v.base().object_count() * no).map(|o| (o / no) * ky + ko + o % no));
        morphisms.extend((0..v.base().morphism_count() * nm).map(|m| (m / nm) * ny + km + m % nm));
        ko += no;
        km += nm;
    }
    identity_component_morphism(source, target, objects, morphisms)
}

fn identity_component_morphism(source: LocObject, target: LocObject, objects: Vec<usize>, morphisms: Vec<usize>) -> Result<LocMorphism> {
    let f = GroupoidFunctor::new(source.base().clone(), target.base().clone(), objects, morphisms)?;
    let pulled = pull_system(&f, &target)?;
    let comps = (0..source.base().object_count())
        .map(|o| ChainMap::new(source.at(o).clone(), pulled.at(o).clone(), ChainMap::identity(source.at(o)).components().clone()))
        .collect::<Result<Vec<_>>>()?;
    LocMorphism::new(source.clone(), target, f, SystemMap::assemble(source, pulled, comps)?)
}

// ---------------------------------------------------------------------------
// Enumeration.

/// Every morphism `a -> b` over a finite field: all base functors in
/// enumeration order, each with every natural map `V -> f^* W` in
/// coordinate order of the solution-space basis.
pub fn hom_enumerate(a: &LocObject, b: &LocObject, budget: u128) -> Result<Vec<LocMorphism>> {
    let p = match a.field() {
        Field::Prime(p) => p,
        Field::Rational => return Err(Error::RationalFieldUnsupported),
    };
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    let functors = enumerate_functors(a.base(), b.base());
    let mut spaces = Vec::new();
    let mut needed: u128 = 0;
    for f in functors {
        let pulled = pull_system(&f, b)?;
        let basis = natural_map_space(a, &pulled)?;
        let count = (p as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
        needed = needed.saturating_add(count);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        spaces.push((f, pulled, basis));
    }
    let mut out = Vec::with_capacity(needed as usize);
    for (f, pulled, basis) in spaces {
        let k = basis.len();
        let mut digits = vec![0u32; k];
        loop {
            let mut acc = SystemMap::zero(a, &pulled)?;
            for (d, e) in digits.iter().zip(&basis) {
                if *d != 0 {
                    acc = acc.add(&e.scale(&Scalar::Residue(*d)))?;
                }
            }
            out.push(LocMorphism { source: a.clone(), target: b.clone(), base_map: f.clone(), component: acc });
            // odometer, last coordinate fastest
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if k == 0 || i == usize::MAX {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{gen_acyclic_cof, gen_cof};
    use crate::groupoid::random_functor;
    use crate::local::{random_system_map, CofCertificate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const F2: Field = Field::Prime(2);
    const F3: Field = Field::Prime(3);

    fn pt() -> Arc<FinGroupoid> {
        Arc::new(FinGroupoid::point())
    }

    fn c2() -> Arc<FinGroupoid> {
        Arc::new(FinGroupoid::delooping(&Group::cyclic(2)))
    }

    fn regular(field: Field) -> LocalSystem {
        LocalSystem::regular(&Group::cyclic(2), field).rebased(&c2()).unwrap()
    }

    #[test]
    fn composition_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<Arc<FinGroupoid>> = (0..4).map(|_| Arc::new(FinGroupoid::random(3, &mut rng))).collect();
        let vs: Vec<LocalSystem> = xs.iter().map(|x| LocalSystem::random(x, F3, 0, 1, 2, &mut rng)).collect();
        let mut maps = Vec::new();
        for i in 0..3 {
            let f = random_functor(&xs[i], &xs[i + 1], &mut rng).unwrap();
            let phi = random_system_map(&vs[i], &pull_system(&f, &vs[i + 1]).unwrap(), &mut rng).unwrap();
            maps.push(LocMorphism::new(vs[i].clone(), vs[i + 1].clone(), f, phi).unwrap());
        }
        let left = maps[2].compose(&maps[1]).unwrap().compose(&maps[0]).unwrap();
        let right = maps[2].compose(&maps[1].compose(&maps[0]).unwrap()).unwrap();
        assert_eq!(left, right);
        left.validate().unwrap();
        assert_eq!(maps[0].compose(&LocMorphism::identity(&vs[0])).unwrap(), maps[0]);
        assert_eq!(LocMorphism::identity(&vs[1]).compose(&maps[0]).unwrap(), maps[0]);
    }

    #[test]
    fn composite_over_point_and_delooping() {
        // K over pt -> regular over BC2 -> K[C2]_{C2} over pt
        let one = LocalSystem::unit(&pt(), F3);
        let reg = regular(F3);
        let f = GroupoidFunctor::constant(&pt(), &c2(), 0);
        let e = ChainMap::new(one.at(0).clone(), reg.at(0).clone(), [(0, Matrix::from_int_rows(F3, &[vec![1], vec![0]]))].into()).unwrap();
        let pulled = pull_system(&f, &reg).unwrap();
        let first = LocMorphism::new(one.clone(), reg.clone(), f, SystemMap::new(one.clone(), pulled, vec![e]).unwrap()).unwrap();
        let g = GroupoidFunctor::terminal(&c2());
        let sum = Matrix::from_int_rows(F3, &[vec![1, 1]]);
        let s = ChainMap::new(reg.at(0).clone(), one.at(0).clone(), [(0, sum)].into()).unwrap();
        let triv = pull_system(&g, &one).unwrap();
        let second = LocMorphism::new(reg.clone(), one.clone(), g, SystemMap::new(reg.clone(), triv, vec![s]).unwrap()).unwrap();
        let c = second.compose(&first).unwrap();
        assert_eq!(c.component().component(0).at(0), Matrix::identity(F3, 1));
    }

    #[test]
    fn adjunct_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Arc::new(FinGroupoid::random(3, &mut rng));
        let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
        let id = LocMorphism::identity(&v);
        let adj = id.adjunct().unwrap();
        assert!(adj.is_iso());
        let unit = push_left(id.base_map(), &v).unwrap().unit;
        assert_eq!(adj.compose(&unit).unwrap(), SystemMap::identity(&v));
        let y = Arc::new(FinGroupoid::random(3, &mut rng));
        let f = random_functor(&x, &y, &mut rng).unwrap();
        let kan = push_left(&f, &v).unwrap();
        let unit = LocMorphism::new(v.clone(), kan.system.clone(), f.clone(), kan.unit.clone()).unwrap();
        assert_eq!(unit.adjunct().unwrap(), SystemMap::identity(&kan.system));
        let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
        let psi = random_system_map(&kan.system, &w, &mut rng).unwrap();
        assert_eq!(LocMorphism::from_adjunct(&f, &v, &psi).unwrap().adjunct().unwrap(), psi);
    }

    #[test]
    fn classification_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Arc::new(FinGroupoid::random(3, &mut rng));
        let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
        let c = classify_integral(&LocMorphism::identity(&v)).unwrap();
        assert!(c.we && c.fib && c.cof.is_yes());

        let sq = homotopy_quotient_square(&Group::cyclic(2), &regular(F3)).unwrap();
        assert!(classify_integral(&sq.right).unwrap().fib);

        let one = LocalSystem::unit(&pt(), F3);
        let reg = regular(F3);
        let f = GroupoidFunctor::constant(&pt(), &c2(), 0);
        let e = ChainMap::new(one.at(0).clone(), reg.at(0).clone(), [(0, Matrix::from_int_rows(F3, &[vec![1], vec![0]]))].into()).unwrap();
        let phi = LocMorphism::new(one.clone(), reg.clone(), f.clone(), SystemMap::new(one, pull_system(&f, &reg).unwrap(), vec![e]).unwrap()).unwrap();
        assert!(phi.adjunct().unwrap().is_iso());
        assert_eq!(classify_integral(&phi).unwrap().cof, CofAnswer::Yes(CofCertificate::Semisimple));
    }

    #[test]
    fn external_tensor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = Arc::new(FinGroupoid::random(3, &mut rng));
        let y = Arc::new(FinGroupoid::random(3, &mut rng));
        let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
        let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
        let vw = external_tensor(&v, &w).unwrap();
        let ky = y.object_count();
        for o in 0..vw.base().object_count() {
            assert_eq!(vw.at(o), &chain::tensor(v.at(o / ky), w.at(o % ky)).unwrap());
        }
        let (_, px, _) = product_with_projections(&x, &y);
        assert_eq!(external_tensor(&v, &LocalSystem::unit(&y, F3)).unwrap(), pull_system(&px, &v).unwrap());
        let a = LocalSystem::constant(&pt(), &ChainComplex::disk(F3, 1));
        let b = LocalSystem::constant(&pt(), &ChainComplex::sphere(F3, 2));
        assert_eq!(external_tensor(&a, &b).unwrap().at(0), &chain::tensor(a.at(0), b.at(0)).unwrap());
    }

    #[test]
    fn pushout_product_over_fixed_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Arc::new(FinGroupoid::random(2, &mut rng));
        let y = Arc::new(FinGroupoid::random(2, &mut rng));
        let gen = |b: &Arc<FinGroupoid>, m: ChainMap| {
            let s = LocalSystem::constant(b, m.source());
            let t = LocalSystem::constant(b, m.target());
            LocMorphism::over_identity(&SystemMap::new(s.clone(), t, vec![m; b.object_count()]).unwrap())
        };
        let q = Field::Rational;
        let pp = external_pushout_product(&gen(&x, gen_cof(q, 1)), &gen(&y, gen_cof(q, 1))).unwrap();
        pp.validate().unwrap();
        let c = classify_integral(&pp).unwrap();
        assert!(c.cof.is_yes());
        assert!(!c.we);
        let pp = external_pushout_product(&gen(&x, gen_cof(q, 1)), &gen(&y, gen_acyclic_cof(q, 1))).unwrap();
        let c = classify_integral(&pp).unwrap();
        assert!(c.cof.is_yes() && c.we);
    }

    #[test]
    fn pushout_product_base_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let xp = Arc::new(FinGroupoid::random(2, &mut rng));
        let yp = Arc::new(FinGroupoid::disjoint_union(&FinGroupoid::random(2, &mut rng), &FinGroupoid::random(2, &mut rng)));
        let v = LocalSystem::random(&xp, F3, 0, 1, 2, &mut rng);
        let w = LocalSystem::random(&yp, F3, 0, 1, 2, &mut rng);
        // f : ∅ -> X', g : component -> Y'
        let empty = Arc::new(FinGroupoid::empty());
        let f = GroupoidFunctor::initial(&xp);
        let phi = LocMorphism::new(LocalSystem::zero(&empty, F3), v.clone(), f.clone(), SystemMap::identity(&LocalSystem::zero(&empty, F3))).unwrap();
        let comp = yp.pi0()[0].clone();
        let (ysub, g) = FinGroupoid::full_subgroupoid(&yp, &comp);
        let wsub = pull_system(&g, &w).unwrap();
        let gamma = LocMorphism::new(wsub.clone(), w.clone(), g.clone(), SystemMap::identity(&wsub)).unwrap();
        let pp = external_pushout_product(&phi, &gamma).unwrap();
        pp.validate().unwrap();
        // the base map is id_{X'} × g
        assert_eq!(pp.base_map().source().object_count(), xp.object_count() * ysub.object_count());
        assert!(pp.component().is_iso());

        // an identity morphism in one slot gives an isomorphism
        let id_v = LocMorphism::identity(&v);
        let pp = external_pushout_product(&id_v, &gamma).unwrap();
        assert!(is_loc_iso(&pp));

        let h = GroupoidFunctor::constant(&pt(), &c2(), 0);
        let zero = LocalSystem::zero(&pt(), F3);
        let to_reg = SystemMap::zero(&zero, &pull_system(&h, &regular(F3)).unwrap()).unwrap();
        let bad = LocMorphism::new(zero, regular(F3), h, to_reg).unwrap();
        assert!(matches!(external_pushout_product(&bad, &id_v), Err(Error::UnsupportedBasePushout(_))));
    }

    #[test]
    fn external_hom_examples() {
        let y = Arc::new(FinGroupoid::discrete(2));
        let r = LocalSystem::assemble(
            y.clone(),
            F3,
            vec![ChainComplex::unit(F3), ChainComplex::unit(F3).set_tensor(2)],
            vec![ChainMap::identity(&ChainComplex::unit(F3)), ChainMap::identity(&ChainComplex::unit(F3).set_tensor(2))],
        )
        .unwrap();
        let w = LocalSystem::unit(&pt(), F3);
        let (h, _) = external_hom(&r, &w).unwrap();
        assert_eq!(h.base().object_count(), 1);
        assert_eq!(h.at(0).dims(), [(0, 3)].into());
        let (restricted, iso) = restriction_at(&r, &w, &[0, 0]).unwrap();
        assert_eq!(restricted.dims(), [(0, 3)].into());
        assert!(iso.is_iso());

        let none = LocalSystem::zero(&Arc::new(FinGroupoid::empty()), F3);
        let (h, _) = external_hom(&none, &regular(F3)).unwrap();
        assert_eq!(h.base().object_count(), 1);
        assert!(h.at(0).is_zero());
        assert!(matches!(external_hom(&regular(F3), &w), Err(Error::NotDiscreteBase)));
    }

    #[test]
    fn external_hom_adjunction_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let x = Arc::new(FinGroupoid::random(2, &mut rng));
            let z = Arc::new(FinGroupoid::random(2, &mut rng));
            let y = Arc::new(FinGroupoid::discrete(rng.gen_range(0..=2)));
            let v = LocalSystem::random(&x, F2, 0, 0, 1, &mut rng);
            let r = LocalSystem::random(&y, F2, 0, 0, 1, &mut rng);
            let w = LocalSystem::random(&z, F2, 0, 0, 1, &mut rng);
            let lhs = hom_enumerate(&external_tensor(&v, &r).unwrap(), &w, 1 << 20).unwrap();
            let (h, _) = external_hom(&r, &w).unwrap();
            let rhs = hom_enumerate(&v, &h, 1 << 20).unwrap();
            assert_eq!(lhs.len(), rhs.len());
            for phi in &lhs {
                let t = external_hom_transpose(phi, &v, &r).unwrap();
                t.validate().unwrap();
                assert!(rhs.contains(&t));
                assert_eq!(&external_hom_untranspose(&t, &r, &w).unwrap(), phi);
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let one = LocalSystem::unit(&pt(), F2);
        assert_eq!(hom_enumerate(&one, &one, 100).unwrap().len(), 2);
        assert_eq!(hom_enumerate(&one, &regular(F2), 100).unwrap().len(), 4);
        let empty = LocalSystem::zero(&Arc::new(FinGroupoid::empty()), F2);
        assert_eq!(hom_enumerate(&empty, &regular(F2), 100).unwrap().len(), 1);
        assert!(matches!(hom_enumerate(&one, &regular(F2), 3), Err(Error::BudgetExceeded { .. })));
        let q = LocalSystem::unit(&pt(), Field::Rational);
        assert!(matches!(hom_enumerate(&q, &q, 100), Err(Error::RationalFieldUnsupported)));
    }

    #[test]
    fn limits_and_colimits() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let parts: Vec<LocalSystem> = (0..3)
            .map(|_| {
                let x = Arc::new(FinGroupoid::random(2, &mut rng));
                LocalSystem::random(&x, F3, 0, 1, 2, &mut rng)
            })
            .collect();
        let (sum, inj) = loc_coproduct(F3, &parts).unwrap();
        sum.validate().unwrap();
        for (p, i) in parts.iter().zip(&inj) {
            i.validate().unwrap();
            assert_eq!(&pull_system(i.base_map(), &sum).unwrap(), p);
        }
        let (_, iso) = coproduct_as_pushforward_sum(F3, &parts).unwrap();
        assert!(iso.is_iso());
        let w = parts[0].clone();
        assert!(is_loc_iso(&coproduct_tensor_iso(F3, &parts, &w).unwrap()));
        assert!(is_loc_iso(&tensor_coproduct_iso(F3, &w, &parts).unwrap()));

        let a = LocalSystem::constant(&pt(), &ChainComplex::disk(F3, 1));
        let b = LocalSystem::constant(&pt(), &ChainComplex::sphere(F3, 0));
        let (p, pa, pb) = loc_product(&a, &b).unwrap();
        assert_eq!(p.at(0), &a.at(0).direct_sum(b.at(0)).unwrap());
        pa.validate().unwrap();
        pb.validate().unwrap();

        let id = LocMorphism::identity(&parts[1]);
        let pb = loc_pullback(&id, &id).unwrap();
        assert!(is_loc_iso(&pb.universal(&id, &id).unwrap()));
    }

    #[test]
    fn homotopy_quotient_squares() {
        for g in [Group::cyclic(2), Group::cyclic(3), Group::trivial()] {
            let v = LocalSystem::regular(&g, F3);
            let sq = homotopy_quotient_square(&g, &v).unwrap();
            assert!(sq.commutes().unwrap());
            assert!(sq.is_pullback().unwrap());
            if g.order() == 2 {
                assert_eq!(sq.top.source().at(0).dims(), [(0, 2)].into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let y = Arc::new(FinGroupoid::random(2, &mut rng));
            let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
            let t = sq.tensored(&w).unwrap();
            assert!(t.commutes().unwrap());
            assert!(t.is_pullback().unwrap());
        }
    }

    #[test]
    fn push_and_pull_through_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..3 {
            let bases: Vec<Arc<FinGroupoid>> = (0..4).map(|_| Arc::new(FinGroupoid::random(2, &mut rng))).collect();
            let (x, xp, y, yp) = (&bases[0], &bases[1], &bases[2], &bases[3]);
            let f = random_functor(x, xp, &mut rng).unwrap();
            let g = random_functor(y, yp, &mut rng).unwrap();
            let v = LocalSystem::random(x, F3, 0, 1, 2, &mut rng);
            let w = LocalSystem::random(y, F3, 0, 1, 2, &mut rng);
            let vp = LocalSystem::random(xp, F3, 0, 1, 2, &mut rng);
            let wp = LocalSystem::random(yp, F3, 0, 1, 2, &mut rng);
            let ext = external_tensor(&vp, &wp).unwrap();
            let (pxy, _, _) = product_with_projections(x, y);
            let fg = product_functor(&f, &g, &pxy, ext.base());
            assert_eq!(pull_system(&fg, &ext).unwrap(), external_tensor(&pull_system(&f, &vp).unwrap(), &pull_system(&g, &wp).unwrap()).unwrap());
            let cmp = push_external_comparison(&f, &g, &v, &w).unwrap();
            cmp.validate().unwrap();
            assert!(cmp.is_iso());
            let phi = LocMorphism::new(v.clone(), vp.clone(), f.clone(), random_system_map(&v, &pull_system(&f, &vp).unwrap(), &mut rng).unwrap()).unwrap();
            let gamma = LocMorphism::new(w.clone(), wp.clone(), g.clone(), random_system_map(&w, &pull_system(&g, &wp).unwrap(), &mut rng).unwrap()).unwrap();
            let lhs = external_tensor_map(&phi, &gamma).unwrap().adjunct().unwrap();
            let rhs = external_tensor_system_map(&phi.adjunct().unwrap(), &gamma.adjunct().unwrap()).unwrap().compose(&cmp).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
