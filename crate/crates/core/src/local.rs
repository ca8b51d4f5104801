//! Local systems of chain complexes over finite groupoids, natural maps
//! between them, and the base-change functors `f_!`, `f^*`, `f_*`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chain::{self, classify_chain_map, hom_complex, hom_map, tensor, tensor_map, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::groupoid::{skeletize, FinGroupoid, Group, GroupoidFunctor};
use crate::linalg::{Field, Matrix, Scalar};

/// A functor from a finite groupoid to chain complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystem {
    base: Arc<FinGroupoid>,
    field: Field,
    at: Vec<ChainComplex>,
    along: Vec<ChainMap>,
}

fn same_base(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl LocalSystem {
    pub fn new(base: Arc<FinGroupoid>, field: Field, at: Vec<ChainComplex>, along: Vec<ChainMap>) -> Result<LocalSystem> {
        let v = Self::assemble(base, field, at, along)?;
        v.validate()?;
        Ok(v)
    }

    /// Checks shapes only.
    pub fn assemble(base: Arc<FinGroupoid>, field: Field, at: Vec<ChainComplex>, along: Vec<ChainMap>) -> Result<LocalSystem> {
        if at.len() != base.object_count() || along.len() != base.morphism_count() {
            return Err(Error::ShapeMismatch("one complex per object and one map per morphism are required".into()));
        }
        if at.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        for (m, a) in along.iter().enumerate() {
            if a.source() != &at[base.src(m)] || a.target() != &at[base.tgt(m)] {
                return Err(Error::ShapeMismatch(format!("map along {} has the wrong endpoints", base.morphism_label(m))));
            }
        }
        Ok(LocalSystem { base, field, at, along })
    }

    pub fn validate(&self) -> Result<()> {
        let x = &*self.base;
        for c in &self.at {
            c.validate()?;
        }
        for (m, a) in self.along.iter().enumerate() {
            a.validate().map_err(|_| Error::FunctorialityViolation { morphism: x.morphism_label(m).into() })?;
        }
        for o in 0..x.object_count() {
            if self.along[x.identity(o)] != ChainMap::identity(&self.at[o]) {
                return Err(Error::FunctorialityViolation { morphism: x.morphism_label(x.identity(o)).into() });
            }
        }
        for g in 0..x.morphism_count() {
            for a in 0..x.object_count() {
                for &f in x.hom(a, x.src(g)) {
                    let gf = x.compose(g, f);
                    if self.along[gf] != self.along[g].compose(&self.along[f])? {
                        return Err(Error::FunctorialityViolation {
                            morphism: format!("{} ∘ {}", x.morphism_label(g), x.morphism_label(f)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn constant(base: &Arc<FinGroupoid>, c: &ChainComplex) -> LocalSystem {
        LocalSystem {
            base: base.clone(),
            field: c.field(),
            at: vec![c.clone(); base.object_count()],
            along: vec![ChainMap::identity(c); base.morphism_count()],
        }
    }

    /// The tensor unit: `K` in degree 0 everywhere.
    pub fn unit(base: &Arc<FinGroupoid>, field: Field) -> LocalSystem {
        Self::constant(base, &ChainComplex::unit(field))
    }

    pub fn zero(base: &Arc<FinGroupoid>, field: Field) -> LocalSystem {
        Self::constant(base, &ChainComplex::zero(field))
    }

    /// A representation of `G` on `K^n` in degree `d` over `BG`, given by
    /// one matrix per group element.
    pub fn representation(group: &Group, field: Field, degree: i64, matrices: &[Matrix]) -> Result<LocalSystem> {
        let base = Arc::new(FinGroupoid::delooping(group));
        let n = matrices.first().map_or(0, |m| m.rows());
        let c = ChainComplex::unit(field).set_tensor(n).shifted(degree);
        let along = matrices
            .iter()
            .map(|m| ChainMap::assemble(c.clone(), c.clone(), [(degree, m.clone())].into()))
            .collect::<Result<Vec<_>>>()?;
        LocalSystem::new(base, field, vec![c; 1], along)
    }

    /// The regular representation `K[G]` in degree 0, basis the group
    /// elements, `g` acting by left multiplication.
    pub fn regular(group: &Group, field: Field) -> LocalSystem {
        let n = group.order();
        let mats: Vec<Matrix> = (0..n)
            .map(|g| {
                let mut m = Matrix::zeros(field, n, n);
                for h in 0..n {
                    m.set(group.mul(g, h), h, field.one());
                }
                m
            })
            .collect();
        Self::representation(group, field, 0, &mats).expect("regular representation is a functor")
    }

    /// The sign representation of `C2` in degree 0.
    pub fn sign(field: Field) -> LocalSystem {
        let mats = [Matrix::identity(field, 1), Matrix::identity(field, 1).signed(1)];
        Self::representation(&Group::cyclic(2), field, 0, &mats).expect("sign is a representation")
    }

    pub fn base(&self) -> &Arc<FinGroupoid> {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn at(&self, x: usize) -> &ChainComplex {
        &self.at[x]
    }

    pub fn along(&self, m: usize) -> &ChainMap {
        &self.along[m]
    }

    pub fn fibers(&self) -> &[ChainComplex] {
        &self.at
    }

    pub fn transports(&self) -> &[ChainMap] {
        &self.along
    }

    /// Union of the windows of all fibers, if any fiber is nonzero.
    pub fn window(&self) -> Option<(i64, i64)> {
        let nz: Vec<&ChainComplex> = self.at.iter().filter(|c| !c.is_zero()).collect();
        Some((nz.iter().map(|c| c.lo()).min()?, nz.iter().map(|c| c.hi()).max()?))
    }

    /// The same system over an equal groupoid held in a different `Arc`.
    pub fn rebased(&self, base: &Arc<FinGroupoid>) -> Result<LocalSystem> {
        if !same_base(&self.base, base) {
            return Err(Error::BaseMismatch);
        }
        Ok(LocalSystem { base: base.clone(), ..self.clone() })
    }

    /// Conjugates every fiber by a degreewise change of basis, returning the
    /// new system and the isomorphism from `self`.
    pub fn conjugate(&self, bases: &[BTreeMap<i64, Matrix>]) -> (LocalSystem, SystemMap) {
        let x = &*self.base;
        let at: Vec<ChainComplex> = self.at.iter().zip(bases).map(|(c, b)| c.change_basis(b)).collect();
        let get = |o: usize, t: i64| bases[o].get(&t).cloned().unwrap_or_else(|| Matrix::identity(self.field, self.at[o].dim(t)));
        let along = (0..x.morphism_count())
            .map(|m| {
                let (s, d) = (x.src(m), x.tgt(m));
                ChainMap::from_fn(&at[s], &at[d], |t| &(&get(d, t) * &self.along[m].at(t)) * &get(s, t).inverse().unwrap())
            })
            .collect();
        let new = LocalSystem { base: self.base.clone(), field: self.field, at, along };
        let iso = SystemMap {
            source: self.clone(),
            target: new.clone(),
            components: (0..x.object_count()).map(|o| ChainMap::from_fn(&self.at[o], &new.at[o], |t| get(o, t))).collect(),
        };
        (new, iso)
    }

    /// A random system: on each component, a sum of permutation
    /// representations on cosets of the basepoint automorphism group tensored
    /// with random complexes, transported along the skeleton paths and then
    /// conjugated by random changes of basis. Fibers have dimension at most
    /// `max_dim` in each degree of `[lo, hi]`.
    pub fn random<R: Rng + ?Sized>(base: &Arc<FinGroupoid>, field: Field, lo: i64, hi: i64, max_dim: usize, rng: &mut R) -> LocalSystem {
        let x = &**base;
        let sk = skeletize(base);
        let comps = x.pi0();
        let mut at = vec![ChainComplex::zero(field); x.object_count()];
        let mut along = vec![None; x.morphism_count()];
        for comp in &comps {
            let b = comp[0];
            let (group, elems) = x.aut(b);
            let (fiber, action) = random_representation(&group, field, lo, hi, max_dim, rng);
            for &o in comp {
                at[o] = fiber.clone();
            }
            for &s in comp {
                for &t in comp {
                    for &m in x.hom(s, t) {
                        let loop_ = x.compose(x.inverse(sk.gamma[t]), x.compose(m, sk.gamma[s]));
                        let g = elems.iter().position(|&e| e == loop_).unwrap();
                        along[m] = Some(action[g].clone());
                    }
                }
            }
        }
        let sys = LocalSystem { base: base.clone(), field, at, along: along.into_iter().map(Option::unwrap).collect() };
        let bases: Vec<BTreeMap<i64, Matrix>> = sys
            .at
            .iter()
            .map(|c| (c.lo()..=c.hi()).map(|t| (t, Matrix::random_invertible(field, c.dim(t), rng))).collect())
            .collect();
        sys.conjugate(&bases).0
    }
}

/// A permutation representation on `G/H` for a random cyclic or full
/// subgroup `H`, tensored with a random complex; possibly summed with a
/// second such piece when room permits.
fn random_representation<R: Rng + ?Sized>(
    group: &Group,
    field: Field,
    lo: i64,
    hi: i64,
    max_dim: usize,
    rng: &mut R,
) -> (ChainComplex, Vec<ChainMap>) {
    let mut fiber = ChainComplex::zero(field);
    let mut action: Vec<ChainMap> = (0..group.order()).map(|_| ChainMap::identity(&fiber)).collect();
    let mut room = max_dim;
    for _ in 0..2 {
        let subgroups = subgroups(group);
        let admissible: Vec<&Vec<usize>> = subgroups.iter().filter(|h| group.order() / h.len() <= room).collect();
        let Some(h) = admissible.choose(rng) else { break };
        let cosets = cosets(group, h);
        let k = cosets.len();
        let c = ChainComplex::random(field, lo, hi, room / k, rng);
        if c.is_zero() {
            continue;
        }
        let perm = ChainComplex::unit(field).set_tensor(k);
        let piece = tensor(&perm, &c).unwrap();
        let piece_action: Vec<ChainMap> = (0..group.order())
            .map(|g| {
                let mut p = Matrix::zeros(field, k, k);
                for (i, coset) in cosets.iter().enumerate() {
                    let image = group.mul(g, coset[0]);
                    let j = cosets.iter().position(|c| c.contains(&image)).unwrap();
                    p.set(j, i, field.one());
                }
                let pm = ChainMap::assemble(perm.clone(), perm.clone(), [(0, p)].into()).unwrap();
                tensor_map(&pm, &ChainMap::identity(&c)).unwrap()
            })
            .collect();
        let new_fiber = fiber.direct_sum(&piece).unwrap();
        action = action.iter().zip(&piece_action).map(|(a, b)| a.direct_sum(b).unwrap()).collect();
        fiber = new_fiber;
        room -= k;
        if room == 0 {
            break;
        }
    }
    (fiber, action)
}

/// All subgroups generated by a single element, plus the whole group.
pub fn subgroups(group: &Group) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a in 0..group.order() {
        let mut h = vec![group.identity()];
        let mut x = a;
        while x != group.identity() {
            h.push(x);
            x = group.mul(x, a);
        }
        h.sort();
        if !out.contains(&h) {
            out.push(h);
        }
    }
    let all: Vec<usize> = (0..group.order()).collect();
    if !out.contains(&all) {
        out.push(all);
    }
    out
}

/// Left cosets `gH`, each sorted, ordered by least element.
pub fn cosets(group: &Group, h: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for g in 0..group.order() {
        if out.iter().any(|c| c.contains(&g)) {
            continue;
        }
        let mut c: Vec<usize> = h.iter().map(|&k| group.mul(g, k)).collect();
        c.sort();
        out.push(c);
    }
    out
}

// ---------------------------------------------------------------------------
// Natural maps.

/// A natural map of local systems over a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMap {
    source: LocalSystem,
    target: LocalSystem,
    components: Vec<ChainMap>,
}

impl SystemMap {
    pub fn new(source: LocalSystem, target: LocalSystem, components: Vec<ChainMap>) -> Result<SystemMap> {
        let m = Self::assemble(source, target, components)?;
        m.validate()?;
        Ok(m)
    }

    pub fn assemble(source: LocalSystem, target: LocalSystem, components: Vec<ChainMap>) -> Result<SystemMap> {
        if !same_base(&source.base, &target.base) {
            return Err(Error::BaseMismatch);
        }
        if source.field != target.field {
            return Err(Error::FieldMismatch);
        }
        if components.len() != source.base.object_count() {
            return Err(Error::ShapeMismatch("one component per object is required".into()));
        }
        for (o, c) in components.iter().enumerate() {
            if c.source() != &source.at[o] || c.target() != &target.at[o] {
                return Err(Error::ShapeMismatch(format!("component at {} has the wrong endpoints", source.base.object_label(o))));
            }
        }
        Ok(SystemMap { source, target, components })
    }

    pub fn validate(&self) -> Result<()> {
        let x = &*self.source.base;
        for c in &self.components {
            c.validate()?;
        }
        for m in 0..x.morphism_count() {
            let lhs = self.target.along[m].compose(&self.components[x.src(m)])?;
            let rhs = self.components[x.tgt(m)].compose(&self.source.along[m])?;
            if lhs != rhs {
                return Err(Error::NaturalityViolation { morphism: x.morphism_label(m).into() });
            }
        }
        Ok(())
    }

    pub fn identity(v: &LocalSystem) -> SystemMap {
        SystemMap { source: v.clone(), target: v.clone(), components: v.at.iter().map(ChainMap::identity).collect() }
    }

    pub fn zero(v: &LocalSystem, w: &LocalSystem) -> Result<SystemMap> {
        let comps = v.at.iter().zip(&w.at).map(|(a, b)| ChainMap::zero(a, b)).collect();
        Self::assemble(v.clone(), w.clone(), comps)
    }

    pub fn source(&self) -> &LocalSystem {
        &self.source
    }

    pub fn target(&self) -> &LocalSystem {
        &self.target
    }

    pub fn base(&self) -> &Arc<FinGroupoid> {
        &self.source.base
    }

    pub fn component(&self, x: usize) -> &ChainMap {
        &self.components[x]
    }

    pub fn components(&self) -> &[ChainMap] {
        &self.components
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SystemMap) -> Result<SystemMap> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("composing system maps with mismatched middle system".into()));
        }
        let comps = self.components.iter().zip(&first.components).map(|(g, f)| g.compose(f)).collect::<Result<_>>()?;
        Ok(SystemMap { source: first.source.clone(), target: self.target.clone(), components: comps })
    }

    pub fn add(&self, other: &SystemMap) -> Result<SystemMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("adding system maps between different systems".into()));
        }
        let comps = self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(SystemMap { components: comps, ..self.clone() })
    }

    pub fn scale(&self, s: &Scalar) -> SystemMap {
        SystemMap { components: self.components.iter().map(|c| c.scale(s)).collect(), ..self.clone() }
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(ChainMap::is_iso)
    }

    pub fn inverse(&self) -> Option<SystemMap> {
        let comps = self.components.iter().map(ChainMap::inverse).collect::<Option<Vec<_>>>()?;
        Some(SystemMap { source: self.target.clone(), target: self.source.clone(), components: comps })
    }
}

/// A basis of the space of natural maps `v -> w`, by solving the chain-map
/// and naturality equations on all component entries at once.
pub fn natural_map_space(v: &LocalSystem, w: &LocalSystem) -> Result<Vec<SystemMap>> {
    if !same_base(&v.base, &w.base) {
        return Err(Error::BaseMismatch);
    }
    if v.field != w.field {
        return Err(Error::FieldMismatch);
    }
    let field = v.field;
    let x = &*v.base;
    // unknown blocks (object, degree)
    let mut offsets: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    let mut total = 0;
    for o in 0..x.object_count() {
        let (a, b) = (&v.at[o], &w.at[o]);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        for t in a.lo().max(b.lo())..=a.hi().min(b.hi()) {
            if a.dim(t) * b.dim(t) > 0 {
                offsets.insert((o, t), total);
                total += a.dim(t) * b.dim(t);
            }
        }
    }
    let mut eqs: Vec<Matrix> = Vec::new();
    // left * φ_{o1,t1} - φ_{o2,t2} * right = 0
    let mut push = |left: Matrix, o1: usize, t1: i64, right: Matrix, o2: usize, t2: i64, rows: usize, cols: usize| {
        if rows * cols == 0 {
            return;
        }
        let mut eq = Matrix::zeros(field, rows * cols, total);
        if let Some(&off) = offsets.get(&(o1, t1)) {
            eq.put(0, off, &left.kron(&Matrix::identity(field, cols)));
        }
        if let Some(&off) = offsets.get(&(o2, t2)) {
            let block = Matrix::identity(field, rows).kron(&right.transpose());
            let cur = eq.submatrix(0..block.rows(), off..off + block.cols());
            eq.put(0, off, &(&cur - &block));
        }
        eqs.push(eq);
    };
    for o in 0..x.object_count() {
        let (a, b) = (&v.at[o], &w.at[o]);
        let Some((lo, hi)) = joint_window(a, b) else { continue };
        for t in lo..=hi {
            push(b.d(t), o, t, a.d(t), o, t - 1, b.dim(t - 1), a.dim(t));
        }
    }
    // naturality along generators implies it along every morphism
    for m in x.generating_morphisms() {
        let (s, d) = (x.src(m), x.tgt(m));
        let Some((lo, hi)) = joint_window(&v.at[s], &w.at[d]) else { continue };
        for t in lo..=hi {
            push(w.along[m].at(t), s, t, v.along[m].at(t), d, t, w.at[d].dim(t), v.at[s].dim(t));
        }
    }
    let system = Matrix::vstack(field, total, &eqs.iter().collect::<Vec<_>>());
    let basis = system.kernel_basis();
    Ok((0..basis.cols())
        .map(|k| {
            let comps = (0..x.object_count())
                .map(|o| {
                    ChainMap::from_fn(&v.at[o], &w.at[o], |t| {
                        let (r, c) = (w.at[o].dim(t), v.at[o].dim(t));
                        let off = offsets[&(o, t)];
                        let mut m = Matrix::zeros(field, r, c);
                        for i in 0..r {
                            for j in 0..c {
                                m.set(i, j, basis.get(off + i * c + j, k));
                            }
                        }
                        m
                    })
                })
                .collect();
            SystemMap { source: v.clone(), target: w.clone(), components: comps }
        })
        .collect())
}

fn joint_window(a: &ChainComplex, b: &ChainComplex) -> Option<(i64, i64)> {
    let spans: Vec<(i64, i64)> = [a, b].iter().filter(|c| !c.is_zero()).map(|c| (c.lo(), c.hi())).collect();
    Some((spans.iter().map(|s| s.0).min()?, spans.iter().map(|s| s.1).max()? + 1))
}

/// A random natural map `v -> w`.
pub fn random_system_map<R: Rng + ?Sized>(v: &LocalSystem, w: &LocalSystem, rng: &mut R) -> Result<SystemMap> {
    let mut acc = SystemMap::zero(v, w)?;
    for b in natural_map_space(v, w)? {
        let s = Matrix::random(v.field, 1, 1, rng).get(0, 0);
        acc = acc.add(&b.scale(&s))?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Monoidal closed structure.

pub fn cup_tensor(v: &LocalSystem, w: &LocalSystem) -> Result<LocalSystem> {
    if !same_base(&v.base, &w.base) {
        return Err(Error::BaseMismatch);
    }
    let at = v.at.iter().zip(&w.at).map(|(a, b)| tensor(a, b)).collect::<Result<_>>()?;
    let along = v.along.iter().zip(&w.along).map(|(a, b)| tensor_map(a, b)).collect::<Result<_>>()?;
    Ok(LocalSystem { base: v.base.clone(), field: v.field, at, along })
}

pub fn cup_tensor_map(phi: &SystemMap, psi: &SystemMap) -> Result<SystemMap> {
    let s = cup_tensor(&phi.source, &psi.source)?;
    let t = cup_tensor(&phi.target, &psi.target)?;
    let comps = phi.components.iter().zip(&psi.components).map(|(a, b)| tensor_map(a, b)).collect::<Result<_>>()?;
    Ok(SystemMap { source: s, target: t, components: comps })
}

/// `[v, w]`, fiberwise mapping complexes with `m` acting by
/// `f ↦ w(m) ∘ f ∘ v(m⁻¹)`.
pub fn internal_hom(v: &LocalSystem, w: &LocalSystem) -> Result<LocalSystem> {
    if !same_base(&v.base, &w.base) {
        return Err(Error::BaseMismatch);
    }
    let x = &*v.base;
    let at = v.at.iter().zip(&w.at).map(|(a, b)| hom_complex(a, b)).collect::<Result<_>>()?;
    let along = (0..x.morphism_count())
        .map(|m| hom_map(&v.along[x.inverse(m)], &w.along[m]))
        .collect::<Result<_>>()?;
    Ok(LocalSystem { base: v.base.clone(), field: v.field, at, along })
}

/// Curries `φ : t ⊗ v -> w` into `t -> [v, w]`.
pub fn tensor_hom_transpose(phi: &SystemMap, t: &LocalSystem, v: &LocalSystem) -> Result<SystemMap> {
    if cup_tensor(t, v)? != phi.source {
        return Err(Error::ShapeMismatch("source is not t ⊗ v".into()));
    }
    let target = internal_hom(v, &phi.target)?;
    let comps = (0..t.at.len())
        .map(|o| chain::curry(&phi.components[o], &t.at[o], &v.at[o]))
        .collect::<Result<_>>()?;
    Ok(SystemMap { source: t.clone(), target, components: comps })
}

/// Inverse of [`tensor_hom_transpose`].
pub fn tensor_hom_untranspose(psi: &SystemMap, v: &LocalSystem, w: &LocalSystem) -> Result<SystemMap> {
    if internal_hom(v, w)? != psi.target {
        return Err(Error::ShapeMismatch("target is not [v, w]".into()));
    }
    let source = cup_tensor(&psi.source, v)?;
    let comps = (0..v.at.len())
        .map(|o| chain::uncurry(&psi.components[o], &v.at[o], &w.at[o]))
        .collect::<Result<_>>()?;
    Ok(SystemMap { source, target: w.clone(), components: comps })
}

/// Evaluation `[v, w] ⊗ v -> w`.
pub fn evaluation(v: &LocalSystem, w: &LocalSystem) -> Result<SystemMap> {
    let h = internal_hom(v, w)?;
    tensor_hom_untranspose(&SystemMap::identity(&h), v, w)
}

// ---------------------------------------------------------------------------
// Pullback.

/// `f^* w = w ∘ f`.
pub fn pull_system(f: &GroupoidFunctor, w: &LocalSystem) -> Result<LocalSystem> {
    if !same_base(f.target(), &w.base) {
        return Err(Error::BaseMismatch);
    }
    Ok(LocalSystem {
        base: f.source().clone(),
        field: w.field,
        at: f.object_map().iter().map(|&y| w.at[y].clone()).collect(),
        along: f.morphism_map().iter().map(|&m| w.along[m].clone()).collect(),
    })
}

pub fn pull_map(f: &GroupoidFunctor, phi: &SystemMap) -> Result<SystemMap> {
    Ok(SystemMap {
        source: pull_system(f, &phi.source)?,
        target: pull_system(f, &phi.target)?,
        components: f.object_map().iter().map(|&y| phi.components[y].clone()).collect(),
    })
}

// ---------------------------------------------------------------------------
// Sums, pushouts and pullbacks of systems.

/// Degreewise direct sum of systems over a common base, summands in order.
pub fn direct_sum_systems(base: &Arc<FinGroupoid>, field: Field, parts: &[&LocalSystem]) -> Result<LocalSystem> {
    if parts.iter().any(|p| !same_base(&p.base, base)) {
        return Err(Error::BaseMismatch);
    }
    if parts.iter().any(|p| p.field != field) {
        return Err(Error::FieldMismatch);
    }
    let at = (0..base.object_count())
        .map(|o| ChainComplex::sum_of(field, &parts.iter().map(|p| &p.at[o]).collect::<Vec<_>>()))
        .collect();
    let along = (0..base.morphism_count())
        .map(|m| sum_of_maps(field, &parts.iter().map(|p| &p.along[m]).collect::<Vec<_>>()))
        .collect();
    Ok(LocalSystem { base: base.clone(), field, at, along })
}

/// Block-diagonal sum of chain maps, laid out like `ChainComplex::sum_of`.
pub(crate) fn sum_of_maps(field: Field, parts: &[&ChainMap]) -> ChainMap {
    let src = ChainComplex::sum_of(field, &parts.iter().map(|p| p.source()).collect::<Vec<_>>());
    let tgt = ChainComplex::sum_of(field, &parts.iter().map(|p| p.target()).collect::<Vec<_>>());
    ChainMap::from_fn(&src, &tgt, |t| {
        let blocks: Vec<Matrix> = parts.iter().map(|p| p.at(t)).collect();
        Matrix::block_diag(field, &blocks.iter().collect::<Vec<_>>())
    })
}

/// The objectwise pushout of a span of systems.
#[derive(Clone, Debug)]
pub struct SystemPushout {
    pub object: LocalSystem,
    pub inl: SystemMap,
    pub inr: SystemMap,
    fibers: Vec<chain::Pushout>,
}

impl SystemPushout {
    pub fn universal(&self, u: &SystemMap, v: &SystemMap) -> Result<SystemMap> {
        if u.target != v.target {
            return Err(Error::ShapeMismatch("cocone legs have different targets".into()));
        }
        let comps = self.fibers.iter().enumerate().map(|(o, po)| po.universal(&u.components[o], &v.components[o])).collect::<Result<_>>()?;
        Ok(SystemMap { source: self.object.clone(), target: u.target.clone(), components: comps })
    }
}

pub fn system_pushout(phi: &SystemMap, psi: &SystemMap) -> Result<SystemPushout> {
    if phi.source != psi.source {
        return Err(Error::ShapeMismatch("pushout legs have different sources".into()));
    }
    let x = phi.base().clone();
    let fibers = (0..x.object_count())
        .map(|o| chain::chain_pushout(&phi.components[o], &psi.components[o]))
        .collect::<Result<Vec<_>>>()?;
    let at: Vec<ChainComplex> = fibers.iter().map(|p| p.object.clone()).collect();
    let along = (0..x.morphism_count())
        .map(|m| {
            let (s, t) = (x.src(m), x.tgt(m));
            let u = fibers[t].inl.compose(&phi.target.along[m])?;
            let v = fibers[t].inr.compose(&psi.target.along[m])?;
            fibers[s].universal(&u, &v)
        })
        .collect::<Result<_>>()?;
    let object = LocalSystem { base: x.clone(), field: phi.source.field, at, along };
    let inl = SystemMap { source: phi.target.clone(), target: object.clone(), components: fibers.iter().map(|p| p.inl.clone()).collect() };
    let inr = SystemMap { source: psi.target.clone(), target: object.clone(), components: fibers.iter().map(|p| p.inr.clone()).collect() };
    Ok(SystemPushout { object, inl, inr, fibers })
}

/// The objectwise pullback of a cospan of systems.
#[derive(Clone, Debug)]
pub struct SystemPullback {
    pub object: LocalSystem,
    pub pr1: SystemMap,
    pub pr2: SystemMap,
    fibers: Vec<chain::Pullback>,
}

impl SystemPullback {
    pub fn universal(&self, u: &SystemMap, v: &SystemMap) -> Result<SystemMap> {
        if u.source != v.source {
            return Err(Error::ShapeMismatch("cone legs have different sources".into()));
        }
        let comps = self.fibers.iter().enumerate().map(|(o, pb)| pb.universal(&u.components[o], &v.components[o])).collect::<Result<_>>()?;
        Ok(SystemMap { source: u.source.clone(), target: self.object.clone(), components: comps })
    }

    /// The universal map into the fiber at `o` from a cone of chain maps.
    pub fn fiber_universal(&self, o: usize, u: &ChainMap, v: &ChainMap) -> Result<ChainMap> {
        self.fibers[o].universal(u, v)
    }
}

pub fn system_pullback(phi: &SystemMap, psi: &SystemMap) -> Result<SystemPullback> {
    if phi.target != psi.target {
        return Err(Error::ShapeMismatch("pullback legs have different targets".into()));
    }
    let x = phi.base().clone();
    let fibers = (0..x.object_count())
        .map(|o| chain::chain_pullback(&phi.components[o], &psi.components[o]))
        .collect::<Result<Vec<_>>>()?;
    let at: Vec<ChainComplex> = fibers.iter().map(|p| p.object.clone()).collect();
    let along = (0..x.morphism_count())
        .map(|m| {
            let (s, t) = (x.src(m), x.tgt(m));
            let u = phi.source.along[m].compose(&fibers[s].pr1)?;
            let v = psi.source.along[m].compose(&fibers[s].pr2)?;
            fibers[t].universal(&u, &v)
        })
        .collect::<Result<_>>()?;
    let object = LocalSystem { base: x.clone(), field: phi.source.field, at, along };
    let pr1 = SystemMap { source: object.clone(), target: phi.source.clone(), components: fibers.iter().map(|p| p.pr1.clone()).collect() };
    let pr2 = SystemMap { source: object.clone(), target: psi.source.clone(), components: fibers.iter().map(|p| p.pr2.clone()).collect() };
    Ok(SystemPullback { object, pr1, pr2, fibers })
}

// ---------------------------------------------------------------------------
// Presented complexes: quotients and subcomplexes of a generator complex.

struct Quotient {
    complex: ChainComplex,
    proj: BTreeMap<i64, Matrix>,
    section: BTreeMap<i64, Matrix>,
}

/// Quotient of a complex with the given dimensions and differentials by the
/// subcomplex spanned by the relation columns in each degree.
fn quotient(
    field: Field,
    window: Option<(i64, i64)>,
    dim: impl Fn(i64) -> usize,
    d: impl Fn(i64) -> Matrix,
    relations: impl Fn(i64) -> Matrix,
) -> Quotient {
    let Some((lo, hi)) = window else {
        return Quotient { complex: ChainComplex::zero(field), proj: BTreeMap::new(), section: BTreeMap::new() };
    };
    let mut proj = BTreeMap::new();
    let mut section = BTreeMap::new();
    for t in lo..=hi {
        let rel = relations(t);
        debug_assert_eq!(rel.rows(), dim(t));
        let (p, k) = rel.cokernel();
        section.insert(t, p.solve_known(&Matrix::identity(field, k)));
        proj.insert(t, p);
    }
    let dims = (lo..=hi).map(|t| proj[&t].rows()).collect();
    let diffs = (lo + 1..=hi).map(|t| &(&proj[&(t - 1)] * &d(t)) * &section[&t]).collect();
    Quotient { complex: ChainComplex::from_window(field, lo, dims, diffs), proj, section }
}

struct Sub {
    complex: ChainComplex,
    incl: BTreeMap<i64, Matrix>,
}

/// The subcomplex cut out by the constraint rows in each degree.
fn subcomplex(
    field: Field,
    window: Option<(i64, i64)>,
    dim: impl Fn(i64) -> usize,
    d: impl Fn(i64) -> Matrix,
    constraints: impl Fn(i64) -> Matrix,
) -> Sub {
    let Some((lo, hi)) = window else {
        return Sub { complex: ChainComplex::zero(field), incl: BTreeMap::new() };
    };
    let mut incl = BTreeMap::new();
    for t in lo..=hi {
        let c = constraints(t);
        debug_assert_eq!(c.cols(), dim(t));
        incl.insert(t, c.kernel_basis());
    }
    let dims = (lo..=hi).map(|t| incl[&t].cols()).collect();
    let diffs = (lo + 1..=hi).map(|t| incl[&(t - 1)].solve_known(&(&d(t) * &incl[&t]))).collect();
    Sub { complex: ChainComplex::from_window(field, lo, dims, diffs), incl }
}

// ---------------------------------------------------------------------------
// Left Kan extension.

/// `f_! v` computed by the coend formula, with everything needed to
/// transpose maps along `f_! ⊣ f^*`.
#[derive(Clone, Debug)]
pub struct LeftKan {
    functor: GroupoidFunctor,
    source: LocalSystem,
    pub system: LocalSystem,
    pub unit: SystemMap,
    // per y: generator labels (x, α) with α : f x -> y, x-major then α
    gens: Vec<Vec<(usize, usize)>>,
    quots: Vec<QuotData>,
}

#[derive(Clone, Debug)]
struct QuotData {
    proj: BTreeMap<i64, Matrix>,
    section: BTreeMap<i64, Matrix>,
}

fn block_offsets(v: &LocalSystem, labels: &[(usize, usize)], t: i64) -> Vec<usize> {
    let mut out = Vec::with_capacity(labels.len() + 1);
    let mut acc = 0;
    for &(x, _) in labels {
        out.push(acc);
        acc += v.at[x].dim(t);
    }
    out.push(acc);
    out
}

impl LeftKan {
    pub fn functor(&self) -> &GroupoidFunctor {
        &self.functor
    }

    pub fn source(&self) -> &LocalSystem {
        &self.source
    }

    fn proj(&self, y: usize, t: i64) -> Matrix {
        self.quots[y].proj.get(&t).cloned().unwrap_or_else(|| Matrix::zeros(self.source.field, 0, 0))
    }

    fn section(&self, y: usize, t: i64) -> Matrix {
        self.quots[y].section.get(&t).cloned().unwrap_or_else(|| Matrix::zeros(self.source.field, 0, 0))
    }

    /// Generator-level matrix `gens_y(t) -> target` assembled from one block
    /// per generator label.
    fn from_generators(&self, y: usize, t: i64, rows: usize, block: impl Fn(usize, usize) -> Matrix) -> Matrix {
        let labels = &self.gens[y];
        let offs = block_offsets(&self.source, labels, t);
        let mut g = Matrix::zeros(self.source.field, rows, offs[labels.len()]);
        for (i, &(x, a)) in labels.iter().enumerate() {
            if self.source.at[x].dim(t) > 0 {
                g.put(0, offs[i], &block(x, a));
            }
        }
        g
    }

    /// The left adjunct `f_! v -> w` of `φ : v -> f^* w`.
    pub fn transpose(&self, phi: &SystemMap) -> Result<SystemMap> {
        let w = phi_target_guess(phi, &self.functor)?;
        self.transpose_into(phi, &w)
    }

    /// The left adjunct `f_! v -> w` of `φ : v -> f^* w` for a given `w`.
    pub fn transpose_into(&self, phi: &SystemMap, w: &LocalSystem) -> Result<SystemMap> {
        if phi.source != self.source || phi.target != pull_system(&self.functor, w)? {
            return Err(Error::ShapeMismatch("map is not of the form v -> f^* w".into()));
        }
        let comps = (0..w.base.object_count())
            .map(|y| {
                ChainMap::from_fn(&self.system.at[y], &w.at[y], |t| {
                    let g = self.from_generators(y, t, w.at[y].dim(t), |x, a| &w.along[a].at(t) * &phi.components[x].at(t));
                    &g * &self.section(y, t)
                })
            })
            .collect();
        Ok(SystemMap { source: self.system.clone(), target: w.clone(), components: comps })
    }

    /// The right adjunct `v -> f^* w` of `ψ : f_! v -> w`.
    pub fn untranspose(&self, psi: &SystemMap) -> Result<SystemMap> {
        if psi.source != self.system {
            return Err(Error::ShapeMismatch("map does not start at f_! v".into()));
        }
        pull_map(&self.functor, psi)?.compose(&self.unit)
    }

    /// `f_! φ : f_! v -> f_! v'` for `φ : v -> v'`, where `other` is `f_! v'`.
    pub fn push_map(&self, other: &LeftKan, phi: &SystemMap) -> Result<SystemMap> {
        if phi.source != self.source || phi.target != other.source || self.functor != other.functor {
            return Err(Error::ShapeMismatch("map does not match the two pushforwards".into()));
        }
        let comps = (0..self.system.base.object_count())
            .map(|y| {
                ChainMap::from_fn(&self.system.at[y], &other.system.at[y], |t| {
                    let labels = &other.gens[y];
                    let offs = block_offsets(&other.source, labels, t);
                    let pos: BTreeMap<(usize, usize), usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
                    let rows = offs[labels.len()];
                    let g = self.from_generators(y, t, rows, |x, a| {
                        let mut m = Matrix::zeros(self.source.field, rows, self.source.at[x].dim(t));
                        m.put(offs[pos[&(x, a)]], 0, &phi.components[x].at(t));
                        m
                    });
                    &(&other.proj(y, t) * &g) * &self.section(y, t)
                })
            })
            .collect();
        Ok(SystemMap { source: self.system.clone(), target: other.system.clone(), components: comps })
    }

    /// The class of the generator `(x, α, u)` for `u` running over the basis
    /// of `v_x` in degree `t`, as columns.
    pub fn generator_classes(&self, x: usize, alpha: usize, t: i64) -> Matrix {
        let y = self.functor.target().tgt(alpha);
        let dim = self.system.at[y].dim(t);
        let g = self.from_generators(y, t, self.source.at[x].dim(t), |x2, a2| {
            if (x2, a2) == (x, alpha) {
                Matrix::identity(self.source.field, self.source.at[x].dim(t))
            } else {
                Matrix::zeros(self.source.field, self.source.at[x].dim(t), self.source.at[x2].dim(t))
            }
        });
        // g is the projection onto the (x, α) block; its transpose inserts
        let insert = g.transpose();
        let p = self.proj(y, t);
        if p.rows() == 0 {
            return Matrix::zeros(self.source.field, dim, self.source.at[x].dim(t));
        }
        &p * &insert
    }

    /// Generator-level map into `target` given by a block per label, pushed
    /// through the section: used to define maps out of `f_! v`.
    pub fn map_out(&self, y: usize, t: i64, rows: usize, block: impl Fn(usize, usize) -> Matrix) -> Matrix {
        let g = self.from_generators(y, t, rows, block);
        &g * &self.section(y, t)
    }
}

fn phi_target_guess(phi: &SystemMap, f: &GroupoidFunctor) -> Result<LocalSystem> {
    // recover w on the image of f; objects outside the image are not
    // determined, so this only succeeds when f is surjective on objects
    let y = f.target();
    let mut at: Vec<Option<ChainComplex>> = vec![None; y.object_count()];
    for (x, &fx) in f.object_map().iter().enumerate() {
        at[fx] = Some(phi.target.at[x].clone());
    }
    let mut along: Vec<Option<ChainMap>> = vec![None; y.morphism_count()];
    for (m, &fm) in f.morphism_map().iter().enumerate() {
        along[fm] = Some(phi.target.along[m].clone());
    }
    if at.iter().any(Option::is_none) || along.iter().any(Option::is_none) {
        return Err(Error::ShapeMismatch("target system is not determined by its pullback; use transpose_into".into()));
    }
    Ok(LocalSystem {
        base: y.clone(),
        field: phi.target.field,
        at: at.into_iter().map(Option::unwrap).collect(),
        along: along.into_iter().map(Option::unwrap).collect(),
    })
}

pub fn push_left(f: &GroupoidFunctor, v: &LocalSystem) -> Result<LeftKan> {
    if !same_base(f.source(), &v.base) {
        return Err(Error::BaseMismatch);
    }
    let (x, y) = (&**f.source(), &**f.target());
    let field = v.field;
    let window = v.window();
    let gen_mors = x.generating_morphisms();
    let gens: Vec<Vec<(usize, usize)>> = (0..y.object_count())
        .map(|b| {
            (0..x.object_count())
                .flat_map(|a| y.hom(f.on_object(a), b).iter().map(move |&al| (a, al)))
                .collect()
        })
        .collect();
    let mut quots = Vec::new();
    let mut at = Vec::new();
    for b in 0..y.object_count() {
        let labels = &gens[b];
        let pos: BTreeMap<(usize, usize), usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let dim = |t: i64| block_offsets(v, labels, t)[labels.len()];
        let d = |t: i64| {
            let blocks: Vec<Matrix> = labels.iter().map(|&(a, _)| v.at[a].d(t)).collect();
            Matrix::block_diag(field, &blocks.iter().collect::<Vec<_>>())
        };
        let relations = |t: i64| {
            let offs = block_offsets(v, labels, t);
            let mut cols: Vec<Matrix> = Vec::new();
            for &m in &gen_mors {
                let (s, tg) = (x.src(m), x.tgt(m));
                let ds = v.at[s].dim(t);
                if ds == 0 {
                    continue;
                }
                for &al in y.hom(f.on_object(tg), b) {
                    // (s, α∘f(m), u) - (tg, α, v(m) u)
                    let mut r = Matrix::zeros(field, offs[labels.len()], ds);
                    let lhs = pos[&(s, y.compose(al, f.on_morphism(m)))];
                    r.put(offs[lhs], 0, &Matrix::identity(field, ds));
                    let rhs = pos[&(tg, al)];
                    if v.at[tg].dim(t) > 0 {
                        let cur = r.submatrix(offs[rhs]..offs[rhs + 1], 0..ds);
                        r.put(offs[rhs], 0, &(&cur - &v.along[m].at(t)));
                    }
                    cols.push(r);
                }
            }
            Matrix::hstack(field, offs[labels.len()], &cols.iter().collect::<Vec<_>>())
        };
        let q = quotient(field, window, dim, d, relations);
        at.push(q.complex.clone());
        quots.push(QuotData { proj: q.proj, section: q.section });
    }
    let mut kan = LeftKan {
        functor: f.clone(),
        source: v.clone(),
        system: LocalSystem { base: f.target().clone(), field, at: at.clone(), along: Vec::new() },
        unit: SystemMap { source: v.clone(), target: v.clone(), components: Vec::new() },
        gens,
        quots,
    };
    let along: Vec<ChainMap> = (0..y.morphism_count())
        .map(|n| {
            let (b0, b1) = (y.src(n), y.tgt(n));
            ChainMap::from_fn(&at[b0], &at[b1], |t| {
                // n relabels generators (a, α) ↦ (a, n∘α) bijectively, so the
                // generator-level map is a block permutation: gather rows
                let (labels0, labels1) = (&kan.gens[b0], &kan.gens[b1]);
                let pos0: BTreeMap<(usize, usize), usize> = labels0.iter().enumerate().map(|(i, &l)| (l, i)).collect();
                let (offs0, offs1) = (block_offsets(v, labels0, t), block_offsets(v, labels1, t));
                let mut rows = vec![0; offs1[labels1.len()]];
                for (j, &(a, be)) in labels1.iter().enumerate() {
                    let i = pos0[&(a, y.compose(y.inverse(n), be))];
                    for k in 0..v.at[a].dim(t) {
                        rows[offs1[j] + k] = offs0[i] + k;
                    }
                }
                &kan.proj(b1, t) * &kan.section(b0, t).select_rows(&rows)
            })
        })
        .collect();
    kan.system.along = along;
    let pulled = pull_system(f, &kan.system)?;
    let unit_comps = (0..x.object_count())
        .map(|a| {
            let fa = f.on_object(a);
            ChainMap::from_fn(&v.at[a], &pulled.at[a], |t| kan.generator_classes(a, y.identity(fa), t))
        })
        .collect();
    kan.unit = SystemMap { source: v.clone(), target: pulled, components: unit_comps };
    Ok(kan)
}

// ---------------------------------------------------------------------------
// Right Kan extension.

/// `f_* v` computed by the end formula, with the counit and transposes for
/// `f^* ⊣ f_*`.
#[derive(Clone, Debug)]
pub struct RightKan {
    functor: GroupoidFunctor,
    source: LocalSystem,
    pub system: LocalSystem,
    pub counit: SystemMap,
    // per y: labels (x, β) with β : y -> f x
    labels: Vec<Vec<(usize, usize)>>,
    incls: Vec<BTreeMap<i64, Matrix>>,
}

impl RightKan {
    pub fn functor(&self) -> &GroupoidFunctor {
        &self.functor
    }

    pub fn source(&self) -> &LocalSystem {
        &self.source
    }

    /// The inclusion of `(f_* v)_y` into `⊕_{x, β : y -> f x} v_x` in degree `t`.
    pub fn inclusion(&self, y: usize, t: i64) -> Matrix {
        self.incl(y, t)
    }

    fn incl(&self, y: usize, t: i64) -> Matrix {
        self.incls[y].get(&t).cloned().unwrap_or_else(|| {
            let rows = block_offsets(&self.source, &self.labels[y], t)[self.labels[y].len()];
            Matrix::zeros(self.source.field, rows, 0)
        })
    }

    /// Ambient-level matrix `source -> families at y` from one block per label.
    fn into_ambient(&self, y: usize, t: i64, cols: usize, block: impl Fn(usize, usize) -> Matrix) -> Matrix {
        let labels = &self.labels[y];
        let offs = block_offsets(&self.source, labels, t);
        let mut g = Matrix::zeros(self.source.field, offs[labels.len()], cols);
        for (i, &(x, b)) in labels.iter().enumerate() {
            if self.source.at[x].dim(t) > 0 {
                g.put(offs[i], 0, &block(x, b));
            }
        }
        g
    }

    /// The right adjunct `w -> f_* v` of `φ : f^* w -> v`.
    pub fn transpose_from(&self, phi: &SystemMap, w: &LocalSystem) -> Result<SystemMap> {
        if phi.target != self.source || phi.source != pull_system(&self.functor, w)? {
            return Err(Error::ShapeMismatch("map is not of the form f^* w -> v".into()));
        }
        let comps = (0..w.base.object_count())
            .map(|y| {
                ChainMap::from_fn(&w.at[y], &self.system.at[y], |t| {
                    let g = self.into_ambient(y, t, w.at[y].dim(t), |x, b| &phi.components[x].at(t) * &w.along[b].at(t));
                    self.incl(y, t).solve_known(&g)
                })
            })
            .collect();
        Ok(SystemMap { source: w.clone(), target: self.system.clone(), components: comps })
    }

    /// The left adjunct `f^* w -> v` of `ψ : w -> f_* v`.
    pub fn untranspose(&self, psi: &SystemMap) -> Result<SystemMap> {
        if psi.target != self.system {
            return Err(Error::ShapeMismatch("map does not land in f_* v".into()));
        }
        self.counit.compose(&pull_map(&self.functor, psi)?)
    }

    /// `f_* φ : f_* v -> f_* v'` for `φ : v -> v'`, where `other` is `f_* v'`.
    pub fn push_map(&self, other: &RightKan, phi: &SystemMap) -> Result<SystemMap> {
        if phi.source != self.source || phi.target != other.source || self.functor != other.functor {
            return Err(Error::ShapeMismatch("map does not match the two pushforwards".into()));
        }
        let field = self.source.field;
        let comps = (0..self.system.base.object_count())
            .map(|y| {
                ChainMap::from_fn(&self.system.at[y], &other.system.at[y], |t| {
                    let labels = &self.labels[y];
                    let offs = block_offsets(&self.source, labels, t);
                    let cols = offs[labels.len()];
                    let g = other.into_ambient(y, t, cols, |x, b| {
                        let i = labels.iter().position(|&l| l == (x, b)).unwrap();
                        let mut m = Matrix::zeros(field, other.source.at[x].dim(t), cols);
                        m.put(0, offs[i], &phi.components[x].at(t));
                        m
                    });
                    other.incl(y, t).solve_known(&(&g * &self.incl(y, t)))
                })
            })
            .collect();
        Ok(SystemMap { source: self.system.clone(), target: other.system.clone(), components: comps })
    }
}

pub fn push_right(f: &GroupoidFunctor, v: &LocalSystem) -> Result<RightKan> {
    if !same_base(f.source(), &v.base) {
        return Err(Error::BaseMismatch);
    }
    let (x, y) = (&**f.source(), &**f.target());
    let field = v.field;
    let window = v.window();
    let gen_mors = x.generating_morphisms();
    let labels: Vec<Vec<(usize, usize)>> = (0..y.object_count())
        .map(|b| {
            (0..x.object_count())
                .flat_map(|a| y.hom(b, f.on_object(a)).iter().map(move |&be| (a, be)))
                .collect()
        })
        .collect();
    let mut incls = Vec::new();
    let mut at = Vec::new();
    for b in 0..y.object_count() {
        let labs = &labels[b];
        let pos: BTreeMap<(usize, usize), usize> = labs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let dim = |t: i64| block_offsets(v, labs, t)[labs.len()];
        let d = |t: i64| {
            let blocks: Vec<Matrix> = labs.iter().map(|&(a, _)| v.at[a].d(t)).collect();
            Matrix::block_diag(field, &blocks.iter().collect::<Vec<_>>())
        };
        let constraints = |t: i64| {
            let offs = block_offsets(v, labs, t);
            let total = offs[labs.len()];
            let mut rows: Vec<Matrix> = Vec::new();
            for &m in &gen_mors {
                let (s, tg) = (x.src(m), x.tgt(m));
                let dt = v.at[tg].dim(t);
                if dt == 0 {
                    continue;
                }
                for &be in y.hom(b, f.on_object(s)) {
                    // v(m) u_{s,β} - u_{tg, f(m)∘β}
                    let mut r = Matrix::zeros(field, dt, total);
                    let i = pos[&(s, be)];
                    if v.at[s].dim(t) > 0 {
                        r.put(0, offs[i], &v.along[m].at(t));
                    }
                    let j = pos[&(tg, y.compose(f.on_morphism(m), be))];
                    let cur = r.submatrix(0..dt, offs[j]..offs[j + 1]);
                    r.put(0, offs[j], &(&cur - &Matrix::identity(field, dt)));
                    rows.push(r);
                }
            }
            Matrix::vstack(field, total, &rows.iter().collect::<Vec<_>>())
        };
        let s = subcomplex(field, window, dim, d, constraints);
        at.push(s.complex);
        incls.push(s.incl);
    }
    let mut kan = RightKan {
        functor: f.clone(),
        source: v.clone(),
        system: LocalSystem { base: f.target().clone(), field, at: at.clone(), along: Vec::new() },
        counit: SystemMap { source: v.clone(), target: v.clone(), components: Vec::new() },
        labels,
        incls,
    };
    let along: Vec<ChainMap> = (0..y.morphism_count())
        .map(|n| {
            let (b0, b1) = (y.src(n), y.tgt(n));
            ChainMap::from_fn(&at[b0], &at[b1], |t| {
                // (n·u)_{x,β'} = u_{x, β'∘n}
                let labs0 = &kan.labels[b0];
                let offs0 = block_offsets(v, labs0, t);
                let cols = offs0[labs0.len()];
                let g = kan.into_ambient(b1, t, cols, |a, be1| {
                    let i = labs0.iter().position(|&l| l == (a, y.compose(be1, n))).unwrap();
                    let mut m = Matrix::zeros(field, v.at[a].dim(t), cols);
                    m.put(0, offs0[i], &Matrix::identity(field, v.at[a].dim(t)));
                    m
                });
                kan.incl(b1, t).solve_known(&(&g * &kan.incl(b0, t)))
            })
        })
        .collect();
    kan.system.along = along;
    let pulled = pull_system(f, &kan.system)?;
    let counit_comps = (0..x.object_count())
        .map(|a| {
            let fa = f.on_object(a);
            ChainMap::from_fn(&pulled.at[a], &v.at[a], |t| {
                let labs = &kan.labels[fa];
                let offs = block_offsets(v, labs, t);
                let i = labs.iter().position(|&l| l == (a, y.identity(fa))).unwrap();
                let pick = kan.incl(fa, t).submatrix(offs[i]..offs[i + 1], 0..pulled.at[a].dim(t));
                pick
            })
        })
        .collect();
    kan.counit = SystemMap { source: pulled, target: v.clone(), components: counit_comps };
    Ok(kan)
}

// ---------------------------------------------------------------------------
// Classification.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CofCertificate {
    /// The characteristic divides no automorphism-group order.
    Semisimple,
    /// Every cokernel degree admits an equivariant splitting of its free cover.
    ProjectiveCokernel,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CofAnswer {
    Yes(CofCertificate),
    No(String),
    Unknown,
}

impl CofAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, CofAnswer::Yes(_))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CofAnswer::Yes(_) => "yes",
            CofAnswer::No(_) => "no",
            CofAnswer::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemClassification {
    pub we: bool,
    pub fib: bool,
    pub cof: CofAnswer,
}

pub fn is_semisimple(base: &FinGroupoid, field: Field) -> bool {
    let p = field.characteristic();
    p == 0 || (0..base.object_count()).all(|x| base.hom(x, x).len() % p as usize != 0)
}

pub fn classify_system_map(phi: &SystemMap) -> SystemClassification {
    let x = &*phi.source.base;
    let flags: Vec<_> = phi.components.iter().map(classify_chain_map).collect();
    let we = flags.iter().all(|f| f.we);
    let fib = flags.iter().all(|f| f.fib);
    let cof = if let Some(o) = flags.iter().position(|f| !f.cof) {
        CofAnswer::No(format!("component at {} is not injective", x.object_label(o)))
    } else if is_semisimple(x, phi.source.field) {
        CofAnswer::Yes(CofCertificate::Semisimple)
    } else if projective_cokernels(phi) {
        CofAnswer::Yes(CofCertificate::ProjectiveCokernel)
    } else {
        CofAnswer::Unknown
    };
    SystemClassification { we, fib, cof }
}

/// At every basepoint `b` and degree, decides whether the cokernel of `φ_b`
/// is a projective `K[aut b]`-module by solving for an equivariant section
/// of `K[G] ⊗ M -> M`.
fn projective_cokernels(phi: &SystemMap) -> bool {
    let x = &phi.source.base;
    let field = phi.source.field;
    for comp in x.pi0() {
        let b = comp[0];
        let (group, elems) = x.aut(b);
        let w = &phi.target.at[b];
        for t in w.lo()..=w.hi() {
            let (p, d) = phi.components[b].at(t).cokernel();
            if d == 0 {
                continue;
            }
            let s = p.solve_known(&Matrix::identity(field, d));
            let rho: Vec<Matrix> = elems.iter().map(|&g| &(&p * &phi.target.along[g].at(t)) * &s).collect();
            if !module_is_projective(&group, &rho, field, d) {
                return false;
            }
        }
    }
    true
}

fn module_is_projective(group: &Group, rho: &[Matrix], field: Field, d: usize) -> bool {
    let n = group.order();
    // free module F = K[G] ⊗ M, basis (g, i) at g * d + i; h acts on the
    // first factor; π(g ⊗ m) = ρ(g) m
    let pi = Matrix::hstack(field, d, &rho.iter().collect::<Vec<_>>());
    let rho_f = |h: usize| {
        let mut perm = Matrix::zeros(field, n, n);
        for g in 0..n {
            perm.set(group.mul(h, g), g, field.one());
        }
        perm.kron(&Matrix::identity(field, d))
    };
    // unknown σ : M -> F, (n d) x d, vectorized row-major
    let id_d = Matrix::identity(field, d);
    let mut eqs = vec![pi.kron(&id_d)];
    let mut rhs = vec![vec_row_major(&id_d)];
    for h in group.generators() {
        let lhs = &rho_f(h).kron(&id_d) - &Matrix::identity(field, n * d).kron(&rho[h].transpose());
        rhs.push(Matrix::zeros(field, lhs.rows(), 1));
        eqs.push(lhs);
    }
    let a = Matrix::vstack(field, n * d * d, &eqs.iter().collect::<Vec<_>>());
    let b = Matrix::vstack(field, 1, &rhs.iter().collect::<Vec<_>>());
    matches!(a.solve_right(&b), Ok(Some(_)))
}

fn vec_row_major(m: &Matrix) -> Matrix {
    let mut v = Matrix::zeros(m.field(), m.rows() * m.cols(), 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            v.set(i * m.cols() + j, 0, m.get(i, j));
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Canonical comparison maps.

/// The projection-formula map `f_!(r ⊗ f^* v) -> (f_! r) ⊗ v`: the adjunct
/// of `η_r ⊗ id`.
pub fn projection_formula_map(f: &GroupoidFunctor, r: &LocalSystem, v: &LocalSystem) -> Result<SystemMap> {
    let fv = pull_system(f, v)?;
    let src = cup_tensor(r, &fv)?;
    let kan_src = push_left(f, &src)?;
    let kan_r = push_left(f, r)?;
    let target = cup_tensor(&kan_r.system, v)?;
    let eta_id = cup_tensor_map(&kan_r.unit, &SystemMap::identity(&fv))?;
    // f^*(f_! r) ⊗ f^* v is literally f^*((f_! r) ⊗ v)
    let eta_id = SystemMap { target: pull_system(f, &target)?, ..eta_id };
    kan_src.transpose_into(&eta_id, &target)
}

/// Beck–Chevalley along a product projection: the comparison
/// `(f × id)_! pr_X^* v -> pr_{X'}^* f_! v` over `X' × Y`.
pub fn beck_chevalley_product(f: &GroupoidFunctor, y: &Arc<FinGroupoid>, v: &LocalSystem) -> Result<SystemMap> {
    use crate::groupoid::{product_functor, product_with_projections};
    let (xy, pr_x, _) = product_with_projections(f.source(), y);
    let (xpy, pr_xp, _) = product_with_projections(f.target(), y);
    let fxid = product_functor(f, &GroupoidFunctor::identity(y), &xy, &xpy);
    let pulled = pull_system(&pr_x, v)?;
    let kan = push_left(&fxid, &pulled)?;
    let kan_v = push_left(f, v)?;
    let target = pull_system(&pr_xp, &kan_v.system)?;
    let eta = pull_map(&pr_x, &kan_v.unit)?;
    // pr_X^* f^* f_! v = (f × id)^* pr_{X'}^* f_! v
    let eta = SystemMap { target: pull_system(&fxid, &target)?, ..eta };
    kan.transpose_into(&eta, &target)
}

/// Beck–Chevalley along a pullback of full embeddings: for
/// `f' : X' -> Y'`, `ι_X : X' -> X`, `ι_Y : Y' -> Y` with `f ι_X = ι_Y f'`,
/// the comparison `f'_! ι_X^* v -> ι_Y^* f_! v`.
pub fn beck_chevalley_embedding(
    f: &GroupoidFunctor,
    f_prime: &GroupoidFunctor,
    iota_x: &GroupoidFunctor,
    iota_y: &GroupoidFunctor,
    v: &LocalSystem,
) -> Result<SystemMap> {
    if f.compose(iota_x)? != iota_y.compose(f_prime)? {
        return Err(Error::ShapeMismatch("square does not commute".into()));
    }
    let kan_v = push_left(f, v)?;
    let target = pull_system(iota_y, &kan_v.system)?;
    let kan = push_left(f_prime, &pull_system(iota_x, v)?)?;
    let eta = pull_map(iota_x, &kan_v.unit)?;
    let eta = SystemMap { target: pull_system(f_prime, &target)?, ..eta };
    kan.transpose_into(&eta, &target)
}

/// The transport isomorphism `p^* ι^* v -> v` with components `v(γ_x)`.
pub fn skeletal_transport(v: &LocalSystem) -> Result<SystemMap> {
    let sk = skeletize(&v.base);
    let source = pull_system(&sk.p, &pull_system(&sk.iota, v)?)?;
    let comps = sk.gamma.iter().map(|&g| v.along[g].clone()).collect();
    SystemMap::new(source, v.clone(), comps)
}

/// Induction along `H ≤ G`: the comparison `⊕_{G/H} v -> (f_! v)_•` sending
/// `(c, u)` to `[σ(c), u]` with `σ(c)` the least element of the coset, and
/// the map back `[g, u] ↦ ([g], σ[g]⁻¹ g · u)`, degree by degree.
#[derive(Clone, Debug)]
pub struct InductionComparison {
    pub forward: BTreeMap<i64, Matrix>,
    pub backward: BTreeMap<i64, Matrix>,
    pub index: usize,
}

pub fn induction_comparison(f: &GroupoidFunctor, v: &LocalSystem) -> Result<InductionComparison> {
    let (h, g) = (f.source(), f.target());
    if h.object_count() != 1 || g.object_count() != 1 {
        return Err(Error::ShapeMismatch("induction needs one-object groupoids".into()));
    }
    let image: Vec<usize> = {
        let mut im: Vec<usize> = f.morphism_map().to_vec();
        im.sort();
        im.dedup();
        im
    };
    if image.len() != h.morphism_count() {
        return Err(Error::ShapeMismatch("induction needs an injective group homomorphism".into()));
    }
    let (group, elems) = g.aut(0);
    let sub: Vec<usize> = image.iter().map(|m| elems.iter().position(|e| e == m).unwrap()).collect();
    let cos = cosets(&group, &sub);
    let kan = push_left(f, v)?;
    let field = v.field;
    let fiber = &v.at[0];
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for t in fiber.lo()..=fiber.hi() {
        let k = fiber.dim(t);
        let cols: Vec<Matrix> = cos.iter().map(|c| kan.generator_classes(0, elems[c[0]], t)).collect();
        let fwd = Matrix::hstack(field, kan.system.at[0].dim(t), &cols.iter().collect::<Vec<_>>());
        let rows = cos.len() * k;
        let back = kan.map_out(0, t, rows, |_, alpha| {
            let gi = elems.iter().position(|&e| e == alpha).unwrap();
            let ci = cos.iter().position(|c| c.contains(&gi)).unwrap();
            let hel = group.mul(group.inverse(cos[ci][0]), gi);
            let hm = f.morphism_map().iter().position(|&m| m == elems[hel]).unwrap();
            let mut m = Matrix::zeros(field, rows, k);
            m.put(ci * k, 0, &v.along[hm].at(t));
            m
        });
        forward.insert(t, fwd);
        backward.insert(t, back);
    }
    Ok(InductionComparison { forward, backward, index: cos.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::enumerate_functors;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const F2: Field = Field::Prime(2);
    const F3: Field = Field::Prime(3);

    fn c2() -> Arc<FinGroupoid> {
        Arc::new(FinGroupoid::delooping(&Group::cyclic(2)))
    }

    fn pt() -> Arc<FinGroupoid> {
        Arc::new(FinGroupoid::point())
    }

    #[test]
    fn validation() {
        let x = Arc::new(FinGroupoid::codiscrete(2));
        LocalSystem::constant(&x, &ChainComplex::disk(F3, 1)).validate().unwrap();
        LocalSystem::sign(F3).validate().unwrap();
        let s = LocalSystem::sign(F3);
        let bad = LocalSystem::assemble(s.base.clone(), F3, s.at.clone(), vec![s.along[1].clone(), s.along[1].clone()]).unwrap();
        assert!(matches!(bad.validate(), Err(Error::FunctorialityViolation { .. })));
    }

    #[test]
    fn cup_tensor_examples() {
        let s = LocalSystem::sign(F3);
        let one = LocalSystem::unit(s.base(), F3);
        assert_eq!(cup_tensor(&one, &s).unwrap(), s);
        let ss = cup_tensor(&s, &s).unwrap();
        let isos: Vec<SystemMap> = natural_map_space(&ss, &one).unwrap();
        assert_eq!(isos.len(), 1);
        assert!(isos[0].is_iso());
    }

    #[test]
    fn internal_hom_examples() {
        let s = LocalSystem::sign(F3);
        let one = LocalSystem::unit(s.base(), F3);
        assert_eq!(internal_hom(&one, &s).unwrap(), s);
        assert_eq!(internal_hom(&s, &one).unwrap(), s);
    }

    /// `[v, w]_x` as the end over all `α : x -> x'` of families
    /// `f_{x',α} : v_{x'} -> w_{x'}` with `w(n) f_{x',α} v(n)⁻¹ = f_{x'', n α}`.
    fn end_formula_dims(v: &LocalSystem, w: &LocalSystem, x: usize) -> BTreeMap<i64, usize> {
        let g = &*v.base;
        let field = v.field;
        let labels: Vec<(usize, usize)> = (0..g.object_count()).flat_map(|b| g.hom(x, b).iter().map(move |&a| (b, a))).collect();
        let mut out = BTreeMap::new();
        for k in -6..=6 {
            let blocks: Vec<Vec<(i64, usize)>> = labels
                .iter()
                .map(|&(b, _)| {
                    let h = hom_complex(&v.at[b], &w.at[b]).unwrap();
                    vec![(k, h.dim(k))]
                })
                .collect();
            let sizes: Vec<usize> = blocks.iter().map(|b| b[0].1).collect();
            let offs: Vec<usize> = sizes.iter().scan(0, |acc, &s| { let o = *acc; *acc += s; Some(o) }).collect();
            let total: usize = sizes.iter().sum();
            let mut rows = Vec::new();
            for n in 0..g.morphism_count() {
                for (i, &(b, a)) in labels.iter().enumerate() {
                    if g.src(n) != b {
                        continue;
                    }
                    let j = labels.iter().position(|&l| l == (g.tgt(n), g.compose(n, a))).unwrap();
                    let conj = hom_map(&v.along[g.inverse(n)], &w.along[n]).unwrap().at(k);
                    let mut r = Matrix::zeros(field, sizes[j], total);
                    if sizes[i] > 0 {
                        r.put(0, offs[i], &conj);
                    }
                    let cur = r.submatrix(0..sizes[j], offs[j]..offs[j] + sizes[j]);
                    r.put(0, offs[j], &(&cur - &Matrix::identity(field, sizes[j])));
                    rows.push(r);
                }
            }
            let c = Matrix::vstack(field, total, &rows.iter().collect::<Vec<_>>());
            let dim = total - c.rank();
            if dim > 0 {
                out.insert(k, dim);
            }
        }
        out
    }

    #[test]
    fn internal_hom_matches_end_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..6 {
            let x = Arc::new(FinGroupoid::random(3, &mut rng));
            let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
            let w = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
            let h = internal_hom(&v, &w).unwrap();
            h.validate().unwrap();
            for o in 0..x.object_count() {
                let dims: BTreeMap<i64, usize> = h.at(o).dims().into_iter().filter(|(_, d)| *d > 0).collect();
                assert_eq!(dims, end_formula_dims(&v, &w, o));
            }
        }
    }

    #[test]
    fn tensor_hom_transposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Arc::new(FinGroupoid::random(3, &mut rng));
        let t = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
        let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
        let w = LocalSystem::random(&x, F3, 0, 2, 2, &mut rng);
        let tv = cup_tensor(&t, &v).unwrap();
        let phi = random_system_map(&tv, &w, &mut rng).unwrap();
        let psi = tensor_hom_transpose(&phi, &t, &v).unwrap();
        psi.validate().unwrap();
        assert_eq!(tensor_hom_untranspose(&psi, &v, &w).unwrap(), phi);
        let h = internal_hom(&v, &w).unwrap();
        let ev = evaluation(&v, &w).unwrap();
        ev.validate().unwrap();
        assert_eq!(tensor_hom_transpose(&ev, &h, &v).unwrap(), SystemMap::identity(&h));
    }

    #[test]
    fn transpose_spaces_have_equal_size() {
        let base = c2();
        let t = LocalSystem::regular(&Group::cyclic(2), F2);
        let v = LocalSystem::sign(F2).rebased(&base).unwrap_or_else(|_| LocalSystem::unit(&base, F2));
        let t = t.rebased(&base).unwrap();
        let w = LocalSystem::regular(&Group::cyclic(2), F2).rebased(&base).unwrap();
        let lhs = natural_map_space(&cup_tensor(&t, &v).unwrap(), &w).unwrap().len();
        let rhs = natural_map_space(&t, &internal_hom(&v, &w).unwrap()).unwrap().len();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = Arc::new(FinGroupoid::random(3, &mut rng));
        let y = Arc::new(FinGroupoid::random(3, &mut rng));
        let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
        assert_eq!(pull_system(&GroupoidFunctor::identity(&y), &w).unwrap(), w);
        let f = crate::groupoid::random_functor(&x, &y, &mut rng).unwrap();
        let g = GroupoidFunctor::terminal(&y);
        let one = LocalSystem::unit(g.target(), F3);
        assert_eq!(pull_system(&f, &pull_system(&g, &one).unwrap()).unwrap(), pull_system(&g.compose(&f).unwrap(), &one).unwrap());
        assert_eq!(pull_system(&f, &LocalSystem::unit(&y, F3)).unwrap(), LocalSystem::unit(&x, F3));
    }

    #[test]
    fn left_kan_examples() {
        let v = LocalSystem::unit(&pt(), F3);
        let kan = push_left(&GroupoidFunctor::identity(&pt()), &v).unwrap();
        assert!(kan.unit.is_iso());

        let base = c2();
        let f = GroupoidFunctor::constant(&pt(), &base, 0);
        let kan = push_left(&f, &LocalSystem::unit(&pt(), F3)).unwrap();
        kan.system.validate().unwrap();
        assert_eq!(kan.system.at(0).dims(), [(0, 2)].into());
        assert!(natural_map_space(&kan.system, &LocalSystem::regular(&Group::cyclic(2), F3).rebased(&base).unwrap())
            .unwrap()
            .iter()
            .any(SystemMap::is_iso));

        let s = LocalSystem::sign(F3);
        let kan = push_left(&GroupoidFunctor::terminal(s.base()), &s).unwrap();
        assert!(kan.system.at(0).is_zero());
    }

    #[test]
    fn right_kan_examples() {
        let s = LocalSystem::sign(F3);
        let kan = push_right(&GroupoidFunctor::terminal(s.base()), &s).unwrap();
        assert!(kan.system.at(0).is_zero());
        let r = LocalSystem::regular(&Group::cyclic(2), F3);
        let to_pt = GroupoidFunctor::terminal(r.base());
        assert_eq!(push_right(&to_pt, &r).unwrap().system.at(0).total_dim(), 1);
        assert_eq!(push_left(&to_pt, &r).unwrap().system.at(0).total_dim(), 1);
        let v = LocalSystem::unit(&pt(), F3);
        assert!(push_right(&GroupoidFunctor::identity(&pt()), &v).unwrap().counit.is_iso());
    }

    #[test]
    fn base_change_transposes() {
        // K -> f^*(regular) picking the identity basis vector
        let base = c2();
        let f = GroupoidFunctor::constant(&pt(), &base, 0);
        let reg = LocalSystem::regular(&Group::cyclic(2), F3).rebased(&base).unwrap();
        let one = LocalSystem::unit(&pt(), F3);
        let pulled = pull_system(&f, &reg).unwrap();
        let e = Matrix::from_int_rows(F3, &[vec![1], vec![0]]);
        let phi = SystemMap::new(one.clone(), pulled, vec![ChainMap::assemble(one.at[0].clone(), reg.at[0].clone(), [(0, e)].into()).unwrap()]).unwrap();
        let kan = push_left(&f, &one).unwrap();
        let t = kan.transpose_into(&phi, &reg).unwrap();
        assert!(t.is_iso());
        assert_eq!(t.components[0].at(0), Matrix::identity(F3, 2));
        assert_eq!(kan.untranspose(&t).unwrap(), phi);
        // the transpose of the unit is the identity
        let id = kan.transpose_into(&kan.unit, &kan.system).unwrap();
        assert_eq!(id, SystemMap::identity(&kan.system));
    }

    #[test]
    fn triangle_identities_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..6 {
            let x = Arc::new(FinGroupoid::random(3, &mut rng));
            let y = Arc::new(FinGroupoid::random(3, &mut rng));
            let f = crate::groupoid::random_functor(&x, &y, &mut rng).unwrap();
            let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
            let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
            let kan = push_left(&f, &v).unwrap();
            kan.system.validate().unwrap();
            kan.unit.validate().unwrap();
            // ε_{f_! v} ∘ f_!(η_v) = id
            let fv_pulled = &kan.unit.target;
            let kan2 = push_left(&f, fv_pulled).unwrap();
            let eps = kan2.transpose_into(&SystemMap::identity(fv_pulled), &kan.system).unwrap();
            let push_eta = kan.push_map(&kan2, &kan.unit).unwrap();
            assert_eq!(eps.compose(&push_eta).unwrap(), SystemMap::identity(&kan.system));
            // f^* ε_w ∘ η_{f^* w} = id
            let fw = pull_system(&f, &w).unwrap();
            let kw = push_left(&f, &fw).unwrap();
            let eps_w = kw.transpose_into(&SystemMap::identity(&fw), &w).unwrap();
            assert_eq!(pull_map(&f, &eps_w).unwrap().compose(&kw.unit).unwrap(), SystemMap::identity(&fw));

            let rk = push_right(&f, &v).unwrap();
            rk.system.validate().unwrap();
            rk.counit.validate().unwrap();
            // ε_v ∘ ... : f^*(η^R_{f_* v})... use round trips
            let phi = random_system_map(&fw, &v, &mut rng).unwrap();
            let hat = rk.transpose_from(&phi, &w).unwrap();
            hat.validate().unwrap();
            assert_eq!(rk.untranspose(&hat).unwrap(), phi);
            let psi = random_system_map(&kan.system, &w, &mut rng).unwrap();
            assert_eq!(kan.transpose_into(&kan.untranspose(&psi).unwrap(), &w).unwrap(), psi);
        }
    }

    #[test]
    fn classification_examples() {
        let base = c2();
        let reg = LocalSystem::regular(&Group::cyclic(2), F3).rebased(&base).unwrap();
        let one = LocalSystem::unit(&base, F3);
        let maps = natural_map_space(&one, &reg).unwrap();
        let incl = maps.into_iter().find(|m| m.components[0].is_injective()).unwrap();
        assert_eq!(classify_system_map(&incl).cof, CofAnswer::Yes(CofCertificate::Semisimple));

        let reg2 = LocalSystem::regular(&Group::cyclic(2), F2).rebased(&base).unwrap();
        let one2 = LocalSystem::unit(&base, F2);
        let incl = natural_map_space(&one2, &reg2).unwrap().into_iter().find(|m| m.components[0].is_injective()).unwrap();
        assert!(!classify_system_map(&incl).cof.is_yes());
        // 0 -> K[C2] has free cokernel
        let zero = LocalSystem::zero(&base, F2);
        let z = SystemMap::zero(&zero, &reg2).unwrap();
        assert_eq!(classify_system_map(&z).cof, CofAnswer::Yes(CofCertificate::ProjectiveCokernel));

        let d = LocalSystem::constant(&base, &ChainComplex::disk(F2, 1));
        let j = SystemMap::zero(&LocalSystem::zero(&base, F2), &d).unwrap();
        let c = classify_system_map(&j);
        assert!(c.we);
        assert!(matches!(c.cof, CofAnswer::Yes(_)) || c.cof == CofAnswer::Unknown);
    }

    #[test]
    fn induction_examples() {
        let c4 = Group::cyclic(4);
        let f = GroupoidFunctor::from_group_hom(&Group::cyclic(2), &c4, &[0, 2]).unwrap();
        let v = LocalSystem::sign(Field::Prime(5)).rebased(f.source()).unwrap();
        let cmp = induction_comparison(&f, &v).unwrap();
        assert_eq!(cmp.index, 2);
        let fw = &cmp.forward[&0];
        assert!(fw.is_invertible());
        assert_eq!(&cmp.backward[&0] * fw, Matrix::identity(Field::Prime(5), 2));
    }

    #[test]
    fn comparisons_are_isomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = Arc::new(FinGroupoid::random(3, &mut rng));
            let y = Arc::new(FinGroupoid::random(3, &mut rng));
            let z = Arc::new(FinGroupoid::random(2, &mut rng));
            let f = crate::groupoid::random_functor(&x, &y, &mut rng).unwrap();
            let r = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
            let v = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
            let pf = projection_formula_map(&f, &r, &v).unwrap();
            pf.validate().unwrap();
            assert!(pf.is_iso());
            let bc = beck_chevalley_product(&f, &z, &r).unwrap();
            bc.validate().unwrap();
            assert!(bc.is_iso());
            let tr = skeletal_transport(&v).unwrap();
            assert!(tr.is_iso());
            let w = LocalSystem::random(&y, F3, 0, 1, 2, &mut rng);
            assert_eq!(pull_system(&f, &cup_tensor(&v, &w).unwrap()).unwrap(), cup_tensor(&pull_system(&f, &v).unwrap(), &pull_system(&f, &w).unwrap()).unwrap());
        }
    }

    #[test]
    fn beck_chevalley_for_component_embeddings() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut checked = 0;
        while checked < 5 {
            let x = Arc::new(FinGroupoid::random(3, &mut rng));
            let y = Arc::new(FinGroupoid::disjoint_union(&FinGroupoid::random(2, &mut rng), &FinGroupoid::random(2, &mut rng)));
            let f = crate::groupoid::random_functor(&x, &y, &mut rng).unwrap();
            let comp = &y.pi0()[0];
            let (y_sub, iota_y) = FinGroupoid::full_subgroupoid(&y, comp);
            let (x_sub, f_prime, iota_x) = {
                let (p, pr1, pr2) = crate::groupoid::groupoid_pullback(&f, &iota_y).unwrap();
                (p, pr2, pr1)
            };
            let f_prime = f_prime.with_endpoints(x_sub.clone(), y_sub.clone()).unwrap();
            let v = LocalSystem::random(&x, F3, 0, 1, 2, &mut rng);
            let bc = beck_chevalley_embedding(&f, &f_prime, &iota_x, &iota_y, &v).unwrap();
            bc.validate().unwrap();
            assert!(bc.is_iso());
            checked += 1;
        }
        // dropping an object hit by f breaks the square's hypotheses
        let y = Arc::new(FinGroupoid::codiscrete(2));
        let f = GroupoidFunctor::constant(&pt(), &y, 0);
        let (y_sub, iota_y) = FinGroupoid::full_subgroupoid(&y, &[1]);
        let (p, pr1, pr2) = crate::groupoid::groupoid_pullback(&f, &iota_y).unwrap();
        let f_prime = pr2.with_endpoints(p, y_sub).unwrap();
        let bc = beck_chevalley_embedding(&f, &f_prime, &pr1, &iota_y, &LocalSystem::unit(&pt(), F3)).unwrap();
        assert!(!bc.is_iso());
    }

    #[test]
    fn functors_enumerate_for_kan_tests() {
        assert_eq!(enumerate_functors(&pt(), &c2()).len(), 1);
    }
}
