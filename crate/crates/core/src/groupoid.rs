//! Finite groupoids given by full composition tables, functors between them,
//! and the constructions used as bases for local systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Groups.

/// A finite group as a multiplication table, `table[a][b] = a·b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl Group {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Group> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if names.len() != n {
            return Err(Error::NotAGroup("one name per element is required".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::NotAGroup("table is not square over its elements".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a][b] == identity && table[b][a] == identity)
                    .ok_or_else(|| Error::NotAGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Group { names, table, identity, inverse })
    }

    pub fn trivial() -> Group {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Group {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Group::new((0..n).map(|k| k.to_string()).collect(), table).unwrap()
    }

    /// `S_3` with elements the permutations of `{0,1,2}` in lexicographic
    /// order and product `(στ)(i) = σ(τ(i))`.
    pub fn symmetric3() -> Group {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| index([s[t[0]], s[t[1]], s[t[2]]])).collect())
            .collect();
        let names = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        Group::new(names, table).unwrap()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Greedy generating set: each element not yet generated is added.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = [self.identity].into();
        for a in 0..self.order() {
            if !span.contains(&a) {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut span: BTreeSet<usize> = [self.identity].into();
        let mut queue: VecDeque<usize> = [self.identity].into();
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.mul(a, g);
                if span.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        span
    }

    /// All homomorphisms `self -> h`, as image vectors, in lexicographic
    /// order of generator images.
    pub fn homomorphisms_to(&self, h: &Group) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let mut out = Vec::new();
        let mut images = vec![0usize; gens.len()];
        loop {
            if let Some(map) = self.extend_hom(h, &gens, &images) {
                out.push(map);
            }
            // odometer
            let mut k = gens.len();
            loop {
                if k == 0 {
                    out.sort();
                    return out;
                }
                k -= 1;
                images[k] += 1;
                if images[k] < h.order() {
                    break;
                }
                images[k] = 0;
            }
        }
    }

    fn extend_hom(&self, h: &Group, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order()];
        map[self.identity] = h.identity;
        let mut queue: VecDeque<usize> = [self.identity].into();
        while let Some(a) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let b = self.mul(a, g);
                let want = h.mul(map[a], img);
                if map[b] == usize::MAX {
                    map[b] = want;
                    queue.push_back(b);
                } else if map[b] != want {
                    return None;
                }
            }
        }
        let ok = (0..self.order()).all(|a| (0..self.order()).all(|b| map[self.mul(a, b)] == h.mul(map[a], map[b])));
        ok.then_some(map)
    }
}

// ---------------------------------------------------------------------------
// Groupoids.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

const NONE: u32 = u32::MAX;

/// A finite groupoid. Composition is stored as a full table indexed by
/// `g * n + f` for `g ∘ f` (apply `f` first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinGroupoid {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    table: Vec<u32>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
    homs: Vec<Vec<usize>>,
}

impl fmt::Debug for FinGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinGroupoid({} objects, {} morphisms)", self.objects.len(), self.morphisms.len())
    }
}

fn law(which: &'static str, witness: String) -> Error {
    Error::LawViolation { which, witness }
}

impl FinGroupoid {
    /// Builds a groupoid from labelled objects and morphisms and a full
    /// composition table (`table[g * n + f] = Some(g ∘ f)` exactly on
    /// composable pairs). Identities and inverses are derived and every law
    /// is checked.
    pub fn new(objects: Vec<String>, morphisms: Vec<Morphism>, table: Vec<Option<usize>>) -> Result<FinGroupoid> {
        let n = morphisms.len();
        if table.len() != n * n {
            return Err(law("composition", format!("table has {} entries, expected {}", table.len(), n * n)));
        }
        let labels: BTreeSet<&String> = objects.iter().collect();
        if labels.len() != objects.len() {
            return Err(law("labels", "object labels are not unique".into()));
        }
        let labels: BTreeSet<&String> = morphisms.iter().map(|m| &m.label).collect();
        if labels.len() != n {
            return Err(law("labels", "morphism labels are not unique".into()));
        }
        for m in &morphisms {
            if m.src >= objects.len() || m.tgt >= objects.len() {
                return Err(law("endpoints", format!("morphism {} has an endpoint out of range", m.label)));
            }
        }
        for g in 0..n {
            for f in 0..n {
                let composable = morphisms[g].src == morphisms[f].tgt;
                match table[g * n + f] {
                    Some(h) if composable => {
                        if h >= n || morphisms[h].src != morphisms[f].src || morphisms[h].tgt != morphisms[g].tgt {
                            return Err(law(
                                "composition",
                                format!("{} ∘ {} has the wrong endpoints", morphisms[g].label, morphisms[f].label),
                            ));
                        }
                    }
                    None if !composable => {}
                    _ => {
                        return Err(law(
                            "composition",
                            format!(
                                "{} ∘ {} is {} but the pair is {}composable",
                                morphisms[g].label,
                                morphisms[f].label,
                                if composable { "undefined" } else { "defined" },
                                if composable { "" } else { "not " }
                            ),
                        ))
                    }
                }
            }
        }
        let raw = Self::raw(objects, morphisms, |g, f| table[g * n + f]);
        raw.check_laws()
    }

    fn raw(objects: Vec<String>, morphisms: Vec<Morphism>, compose: impl Fn(usize, usize) -> Option<usize>) -> RawGroupoid {
        let n = morphisms.len();
        let mut table = vec![NONE; n * n];
        let k = objects.len();
        let mut homs = vec![Vec::new(); k * k];
        for (i, m) in morphisms.iter().enumerate() {
            homs[m.src * k + m.tgt].push(i);
        }
        for g in 0..n {
            for x in 0..k {
                for &f in &homs[x * k + morphisms[g].src] {
                    if let Some(h) = compose(g, f) {
                        table[g * n + f] = h as u32;
                    }
                }
            }
        }
        RawGroupoid { objects, morphisms, table, homs }
    }

    /// Internal constructor for groupoids whose laws hold by construction.
    fn build(objects: Vec<String>, morphisms: Vec<Morphism>, compose: impl Fn(usize, usize) -> usize) -> FinGroupoid {
        let raw = Self::raw(objects, morphisms, |g, f| Some(compose(g, f)));
        let g = raw.derive().expect("constructed groupoid satisfies the laws");
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn validate(&self) -> Result<()> {
        let raw = RawGroupoid {
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
            table: self.table.clone(),
            homs: self.homs.clone(),
        };
        let checked = raw.check_laws()?;
        if checked.identities != self.identities || checked.inverses != self.inverses {
            return Err(law("identity", "stored identities or inverses disagree with the table".into()));
        }
        Ok(())
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn src(&self, m: usize) -> usize {
        self.morphisms[m].src
    }

    pub fn tgt(&self, m: usize) -> usize {
        self.morphisms[m].tgt
    }

    pub fn object_label(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn morphism_label(&self, m: usize) -> &str {
        &self.morphisms[m].label
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn morphism_index(&self, label: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.label == label)
    }

    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        let h = self.table[g * self.morphisms.len() + f];
        (h != NONE).then_some(h as usize)
    }

    /// `g ∘ f`; panics when the pair is not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("{} ∘ {} is not composable", self.morphisms[g].label, self.morphisms[f].label))
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn inverse(&self, m: usize) -> usize {
        self.inverses[m]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.src(m)] == m
    }

    /// Morphisms `a -> b` in increasing index order.
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a * self.objects.len() + b]
    }

    /// Morphisms out of `a`, in increasing index order.
    pub fn out_of(&self, a: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&m| self.src(m) == a).collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.objects.len() && (0..self.morphisms.len()).all(|m| self.is_identity(m))
    }

    /// Connected components, each sorted, ordered by least object.
    pub fn pi0(&self) -> Vec<Vec<usize>> {
        let k = self.objects.len();
        let mut uf = UnionFind::<usize>::new(k);
        for m in &self.morphisms {
            uf.union(m.src, m.tgt);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..k {
            by_root.entry(uf.find(x)).or_default().push(x);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort();
        comps
    }

    /// Component index of every object, numbered as in [`FinGroupoid::pi0`].
    pub fn component_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.objects.len()];
        for (c, comp) in self.pi0().iter().enumerate() {
            for &x in comp {
                out[x] = c;
            }
        }
        out
    }

    /// The automorphism group at `x`, elements listed in increasing
    /// morphism index.
    pub fn aut(&self, x: usize) -> (Group, Vec<usize>) {
        let elems = self.hom(x, x).to_vec();
        let pos = |m: usize| elems.iter().position(|&e| e == m).unwrap();
        let table = elems.iter().map(|&a| elems.iter().map(|&b| pos(self.compose(a, b))).collect()).collect();
        let names = elems.iter().map(|&m| self.morphisms[m].label.clone()).collect();
        (Group::new(names, table).expect("automorphisms form a group"), elems)
    }

    /// Morphisms generating the groupoid under composition and inverses:
    /// per component, a path from the least object to each other object and
    /// group generators of the automorphisms there. Sorted.
    pub fn generating_morphisms(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for comp in self.pi0() {
            let b = comp[0];
            out.extend(comp[1..].iter().map(|&o| self.hom(b, o)[0]));
            let (group, elems) = self.aut(b);
            out.extend(group.generators().into_iter().map(|g| elems[g]));
        }
        out.sort();
        out
    }

    // -- constructors --------------------------------------------------------

    pub fn empty() -> FinGroupoid {
        Self::discrete(0)
    }

    pub fn point() -> FinGroupoid {
        Self::discrete(1)
    }

    pub fn discrete(n: usize) -> FinGroupoid {
        let objects = (0..n).map(|k| k.to_string()).collect();
        let morphisms = (0..n).map(|k| Morphism { label: format!("id{k}"), src: k, tgt: k }).collect();
        Self::build(objects, morphisms, |g, _| g)
    }

    /// The codiscrete (pair) groupoid: exactly one morphism between any two
    /// of `n` objects; morphism `a -> b` has index `a * n + b`.
    pub fn codiscrete(n: usize) -> FinGroupoid {
        let objects = (0..n).map(|k| k.to_string()).collect();
        let morphisms = (0..n * n).map(|i| Morphism { label: format!("{}>{}", i / n, i % n), src: i / n, tgt: i % n }).collect();
        Self::build(objects, morphisms, |g, f| (f / n) * n + g % n)
    }

    pub fn delooping(group: &Group) -> FinGroupoid {
        let morphisms = group.names.iter().map(|l| Morphism { label: l.clone(), src: 0, tgt: 0 }).collect();
        Self::build(vec!["*".into()], morphisms, |g, f| group.mul(g, f))
    }

    /// `X ⊔ Y` with the objects and morphisms of `X` first.
    pub fn disjoint_union(x: &FinGroupoid, y: &FinGroupoid) -> FinGroupoid {
        let (kx, nx) = (x.objects.len(), x.morphisms.len());
        let objects = x.objects.iter().map(|o| format!("0:{o}")).chain(y.objects.iter().map(|o| format!("1:{o}"))).collect();
        let morphisms = x
            .morphisms
            .iter()
            .map(|m| Morphism { label: format!("0:{}", m.label), src: m.src, tgt: m.tgt })
            .chain(y.morphisms.iter().map(|m| Morphism { label: format!("1:{}", m.label), src: m.src + kx, tgt: m.tgt + kx }))
            .collect();
        Self::build(objects, morphisms, |g, f| if g < nx { x.compose(g, f) } else { y.compose(g - nx, f - nx) + nx })
    }

    /// `X × Y`; object `(a, b)` has index `a * |Obj Y| + b`, morphism
    /// `(m, n)` has index `m * |Mor Y| + n`.
    pub fn product(x: &FinGroupoid, y: &FinGroupoid) -> FinGroupoid {
        let (ky, ny) = (y.objects.len(), y.morphisms.len());
        let mut objects = Vec::new();
        for a in &x.objects {
            for b in &y.objects {
                objects.push(format!("({a},{b})"));
            }
        }
        let mut morphisms = Vec::new();
        for m in &x.morphisms {
            for n in &y.morphisms {
                morphisms.push(Morphism {
                    label: format!("({},{})", m.label, n.label),
                    src: m.src * ky + n.src,
                    tgt: m.tgt * ky + n.tgt,
                });
            }
        }
        Self::build(objects, morphisms, |g, f| x.compose(g / ny, f / ny) * ny + y.compose(g % ny, f % ny))
    }

    /// `Z^n`: objects and morphisms are `n`-tuples, first coordinate most
    /// significant. `Z^0` is the point.
    pub fn power(z: &FinGroupoid, n: usize) -> FinGroupoid {
        let (kz, nz) = (z.objects.len(), z.morphisms.len());
        let obj_tuples = tuples(kz, n);
        let mor_tuples = tuples(nz, n);
        let objects = obj_tuples
            .iter()
            .map(|t| format!("({})", t.iter().map(|&a| z.objects[a].as_str()).collect::<Vec<_>>().join(",")))
            .collect();
        let morphisms = mor_tuples
            .iter()
            .map(|t| Morphism {
                label: format!("({})", t.iter().map(|&m| z.morphisms[m].label.as_str()).collect::<Vec<_>>().join(",")),
                src: encode_tuple(kz, t.iter().map(|&m| z.src(m))),
                tgt: encode_tuple(kz, t.iter().map(|&m| z.tgt(m))),
            })
            .collect();
        Self::build(objects, morphisms, |g, f| {
            let (tg, tf) = (&mor_tuples[g], &mor_tuples[f]);
            encode_tuple(nz, tg.iter().zip(tf).map(|(&a, &b)| z.compose(a, b)))
        })
    }

    /// The full subgroupoid on the given objects (kept in the given order)
    /// together with its inclusion.
    pub fn full_subgroupoid(x: &Arc<FinGroupoid>, objs: &[usize]) -> (Arc<FinGroupoid>, GroupoidFunctor) {
        let pos: BTreeMap<usize, usize> = objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let kept: Vec<usize> = (0..x.morphisms.len())
            .filter(|&m| pos.contains_key(&x.src(m)) && pos.contains_key(&x.tgt(m)))
            .collect();
        let mpos: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let objects = objs.iter().map(|&o| x.objects[o].clone()).collect();
        let morphisms = kept
            .iter()
            .map(|&m| Morphism { label: x.morphisms[m].label.clone(), src: pos[&x.src(m)], tgt: pos[&x.tgt(m)] })
            .collect();
        let sub = Arc::new(Self::build(objects, morphisms, |g, f| mpos[&x.compose(kept[g], kept[f])]));
        let incl = GroupoidFunctor { source: sub.clone(), target: x.clone(), objects: objs.to_vec(), morphisms: kept };
        (sub, incl)
    }

    /// Renumbers objects and morphisms: old object `o` becomes
    /// `obj_perm[o]`, old morphism `m` becomes `mor_perm[m]`.
    pub fn permuted(&self, obj_perm: &[usize], mor_perm: &[usize]) -> FinGroupoid {
        let mut objects = vec![String::new(); self.objects.len()];
        for (o, &p) in obj_perm.iter().enumerate() {
            objects[p] = self.objects[o].clone();
        }
        let mut old_of = vec![0; self.morphisms.len()];
        let mut morphisms = vec![Morphism { label: String::new(), src: 0, tgt: 0 }; self.morphisms.len()];
        for (m, &p) in mor_perm.iter().enumerate() {
            old_of[p] = m;
            let mm = &self.morphisms[m];
            morphisms[p] = Morphism { label: mm.label.clone(), src: obj_perm[mm.src], tgt: obj_perm[mm.tgt] };
        }
        Self::build(objects, morphisms, |g, f| mor_perm[self.compose(old_of[g], old_of[f])])
    }

    /// A random groupoid with at most `max_objects` objects: a disjoint union
    /// of components `codiscrete(k) × BG`, `G ∈ {1, C2, C3, S3}`, with
    /// shuffled object and morphism indices.
    pub fn random<R: Rng + ?Sized>(max_objects: usize, rng: &mut R) -> FinGroupoid {
        let groups = [Group::trivial(), Group::cyclic(2), Group::cyclic(3), Group::symmetric3()];
        let total = rng.gen_range(1..=max_objects.max(1));
        let mut left = total;
        let mut g = FinGroupoid::empty();
        let mut first = true;
        while left > 0 {
            let k = rng.gen_range(1..=left);
            left -= k;
            let comp = Self::product(&Self::codiscrete(k), &Self::delooping(groups.choose(rng).unwrap()));
            g = if first { comp } else { Self::disjoint_union(&g, &comp) };
            first = false;
        }
        let mut op: Vec<usize> = (0..g.objects.len()).collect();
        op.shuffle(rng);
        let mut mp: Vec<usize> = (0..g.morphisms.len()).collect();
        mp.shuffle(rng);
        g.permuted(&op, &mp)
    }
}

struct RawGroupoid {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    table: Vec<u32>,
    homs: Vec<Vec<usize>>,
}

impl RawGroupoid {
    fn at(&self, g: usize, f: usize) -> usize {
        self.table[g * self.morphisms.len() + f] as usize
    }

    fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a * self.objects.len() + b]
    }

    fn derive(self) -> Result<FinGroupoid> {
        let k = self.objects.len();
        let identities = (0..k)
            .map(|x| {
                self.hom(x, x)
                    .iter()
                    .copied()
                    .find(|&e| self.at(e, e) == e)
                    .ok_or_else(|| law("identity", format!("object {} has no identity", self.objects[x])))
            })
            .collect::<Result<Vec<_>>>()?;
        let inverses = (0..self.morphisms.len())
            .map(|f| {
                let m = &self.morphisms[f];
                self.hom(m.tgt, m.src)
                    .iter()
                    .copied()
                    .find(|&g| self.at(g, f) == identities[m.src] && self.at(f, g) == identities[m.tgt])
                    .ok_or_else(|| law("inverse", format!("morphism {} has no inverse", m.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinGroupoid {
            objects: self.objects,
            morphisms: self.morphisms,
            table: self.table,
            identities,
            inverses,
            homs: self.homs,
        })
    }

    fn check_laws(self) -> Result<FinGroupoid> {
        let k = self.objects.len();
        let n = self.morphisms.len();
        // associativity over all composable triples h ∘ g ∘ f
        for f in 0..n {
            for b in 0..k {
                for &g in self.hom(self.morphisms[f].tgt, b) {
                    let gf = self.at(g, f);
                    for c in 0..k {
                        for &h in self.hom(b, c) {
                            if self.at(self.at(h, g), f) != self.at(h, gf) {
                                return Err(law(
                                    "associativity",
                                    format!(
                                        "({} ∘ {}) ∘ {}",
                                        self.morphisms[h].label, self.morphisms[g].label, self.morphisms[f].label
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }
        let g = self.derive()?;
        for f in 0..n {
            let (s, t) = (g.src(f), g.tgt(f));
            if g.compose(f, g.identities[s]) != f || g.compose(g.identities[t], f) != f {
                return Err(law("unit", format!("identities do not act trivially on {}", g.morphisms[f].label)));
            }
        }
        Ok(g)
    }
}

fn tuples(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

fn encode_tuple(base: usize, digits: impl Iterator<Item = usize>) -> usize {
    digits.fold(0, |acc, d| acc * base + d)
}

// ---------------------------------------------------------------------------
// Functors.

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupoidFunctor {
    source: Arc<FinGroupoid>,
    target: Arc<FinGroupoid>,
    objects: Vec<usize>,
    morphisms: Vec<usize>,
}

impl fmt::Debug for GroupoidFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupoidFunctor").field("objects", &self.objects).field("morphisms", &self.morphisms).finish()
    }
}

impl GroupoidFunctor {
    pub fn new(source: Arc<FinGroupoid>, target: Arc<FinGroupoid>, objects: Vec<usize>, morphisms: Vec<usize>) -> Result<Self> {
        let f = GroupoidFunctor { source, target, objects, morphisms };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let (x, y) = (&*self.source, &*self.target);
        if self.objects.len() != x.object_count() || self.morphisms.len() != x.morphism_count() {
            return Err(law("functor shape", "object or morphism map has the wrong length".into()));
        }
        if self.objects.iter().any(|&o| o >= y.object_count()) || self.morphisms.iter().any(|&m| m >= y.morphism_count()) {
            return Err(law("functor shape", "image out of range".into()));
        }
        for m in 0..x.morphism_count() {
            let fm = self.morphisms[m];
            if y.src(fm) != self.objects[x.src(m)] || y.tgt(fm) != self.objects[x.tgt(m)] {
                return Err(law("functor endpoints", x.morphism_label(m).to_string()));
            }
        }
        for o in 0..x.object_count() {
            if self.morphisms[x.identity(o)] != y.identity(self.objects[o]) {
                return Err(law("functor identities", x.object_label(o).to_string()));
            }
        }
        for g in 0..x.morphism_count() {
            for a in 0..x.object_count() {
                for &f in x.hom(a, x.src(g)) {
                    if self.morphisms[x.compose(g, f)] != y.compose(self.morphisms[g], self.morphisms[f]) {
                        return Err(law(
                            "functor composition",
                            format!("{} ∘ {}", x.morphism_label(g), x.morphism_label(f)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: &Arc<FinGroupoid>) -> GroupoidFunctor {
        GroupoidFunctor {
            source: x.clone(),
            target: x.clone(),
            objects: (0..x.object_count()).collect(),
            morphisms: (0..x.morphism_count()).collect(),
        }
    }

    /// The unique functor out of the empty groupoid.
    pub fn initial(y: &Arc<FinGroupoid>) -> GroupoidFunctor {
        GroupoidFunctor { source: Arc::new(FinGroupoid::empty()), target: y.clone(), objects: Vec::new(), morphisms: Vec::new() }
    }

    /// The unique functor to the point.
    pub fn terminal(x: &Arc<FinGroupoid>) -> GroupoidFunctor {
        Self::constant(x, &Arc::new(FinGroupoid::point()), 0)
    }

    /// The functor sending everything to the identity at `obj`.
    pub fn constant(x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>, obj: usize) -> GroupoidFunctor {
        GroupoidFunctor {
            source: x.clone(),
            target: y.clone(),
            objects: vec![obj; x.object_count()],
            morphisms: vec![y.identity(obj); x.morphism_count()],
        }
    }

    /// `BG -> BH` from a homomorphism given by element images.
    pub fn from_group_hom(g: &Group, h: &Group, images: &[usize]) -> Result<GroupoidFunctor> {
        Self::new(
            Arc::new(FinGroupoid::delooping(g)),
            Arc::new(FinGroupoid::delooping(h)),
            vec![0],
            images.to_vec(),
        )
    }

    pub fn source(&self) -> &Arc<FinGroupoid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinGroupoid> {
        &self.target
    }

    pub fn on_object(&self, x: usize) -> usize {
        self.objects[x]
    }

    pub fn on_morphism(&self, m: usize) -> usize {
        self.morphisms[m]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.objects
    }

    pub fn morphism_map(&self) -> &[usize] {
        &self.morphisms
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GroupoidFunctor) -> Result<GroupoidFunctor> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("composing functors with mismatched middle groupoid".into()));
        }
        Ok(GroupoidFunctor {
            source: first.source.clone(),
            target: self.target.clone(),
            objects: first.objects.iter().map(|&o| self.objects[o]).collect(),
            morphisms: first.morphisms.iter().map(|&m| self.morphisms[m]).collect(),
        })
    }

    /// Same underlying maps with source and target replaced by equal groupoids.
    pub fn with_endpoints(&self, source: Arc<FinGroupoid>, target: Arc<FinGroupoid>) -> Result<GroupoidFunctor> {
        if *source != *self.source || *target != *self.target {
            return Err(Error::ShapeMismatch("replacement endpoints differ".into()));
        }
        Ok(GroupoidFunctor { source, target, ..self.clone() })
    }
}

/// Flags of the canonical model structure on groupoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidClassification {
    pub we: bool,
    pub fib: bool,
    pub cof: bool,
}

pub fn is_equivalence(f: &GroupoidFunctor) -> bool {
    let (x, y) = (&*f.source, &*f.target);
    let comp = y.component_of();
    let hit: BTreeSet<usize> = f.objects.iter().map(|&o| comp[o]).collect();
    if hit.len() != y.pi0().len() {
        return false;
    }
    (0..x.object_count()).all(|a| {
        (0..x.object_count()).all(|b| {
            let images: BTreeSet<usize> = x.hom(a, b).iter().map(|&m| f.morphisms[m]).collect();
            images.len() == x.hom(a, b).len() && images.len() == y.hom(f.objects[a], f.objects[b]).len()
        })
    })
}

/// Every target morphism out of an image object lifts to a morphism out of
/// each preimage object.
pub fn is_isofibration(f: &GroupoidFunctor) -> bool {
    let (x, y) = (&*f.source, &*f.target);
    (0..x.object_count()).all(|a| {
        let lifts: BTreeSet<usize> = x.out_of(a).into_iter().map(|m| f.morphisms[m]).collect();
        y.out_of(f.objects[a]).iter().all(|m| lifts.contains(m))
    })
}

pub fn classify_functor(f: &GroupoidFunctor) -> GroupoidClassification {
    let distinct: BTreeSet<usize> = f.objects.iter().copied().collect();
    GroupoidClassification { we: is_equivalence(f), fib: is_isofibration(f), cof: distinct.len() == f.objects.len() }
}

// ---------------------------------------------------------------------------
// Skeleta.

/// A skeleton `ι : S ⇄ X : p` with `p ∘ ι = id` and paths `γ_x : ι p x -> x`.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub skeleton: Arc<FinGroupoid>,
    pub iota: GroupoidFunctor,
    pub p: GroupoidFunctor,
    /// `gamma[x]` is a morphism from the basepoint of `x`'s component to `x`.
    pub gamma: Vec<usize>,
}

impl Skeleton {
    pub fn basepoint(&self, x: usize) -> usize {
        self.iota.on_object(self.p.on_object(x))
    }
}

/// Basepoints are least objects of components; `γ_x` is the identity at a
/// basepoint and the least-index morphism from the basepoint otherwise.
pub fn skeletize(x: &Arc<FinGroupoid>) -> Skeleton {
    let comps = x.pi0();
    let comp_of = x.component_of();
    let base: Vec<usize> = comps.iter().map(|c| c[0]).collect();
    let gamma: Vec<usize> = (0..x.object_count())
        .map(|o| {
            let b = base[comp_of[o]];
            if o == b {
                x.identity(o)
            } else {
                x.hom(b, o)[0]
            }
        })
        .collect();
    let auts: Vec<Vec<usize>> = base.iter().map(|&b| x.hom(b, b).to_vec()).collect();
    let mut objects = Vec::new();
    let mut morphisms = Vec::new();
    let mut offset = Vec::new();
    for (c, &b) in base.iter().enumerate() {
        objects.push(x.object_label(b).to_string());
        offset.push(morphisms.len());
        for &m in &auts[c] {
            morphisms.push(Morphism { label: x.morphism_label(m).to_string(), src: c, tgt: c });
        }
    }
    let index_in = |c: usize, m: usize| offset[c] + auts[c].iter().position(|&a| a == m).unwrap();
    let owner: Vec<usize> = (0..morphisms.len()).map(|i| offset.iter().rposition(|&o| o <= i).unwrap()).collect();
    let skel = Arc::new(FinGroupoid::build(objects, morphisms, |g, f| {
        let c = owner[g];
        index_in(c, x.compose(auts[c][g - offset[c]], auts[c][f - offset[c]]))
    }));
    let iota = GroupoidFunctor {
        source: skel.clone(),
        target: x.clone(),
        objects: base.clone(),
        morphisms: (0..skel.morphism_count()).map(|i| auts[owner[i]][i - offset[owner[i]]]).collect(),
    };
    let p = GroupoidFunctor {
        source: x.clone(),
        target: skel.clone(),
        objects: comp_of.clone(),
        morphisms: (0..x.morphism_count())
            .map(|m| {
                let (s, t) = (x.src(m), x.tgt(m));
                let loop_ = x.compose(x.inverse(gamma[t]), x.compose(m, gamma[s]));
                index_in(comp_of[s], loop_)
            })
            .collect(),
    };
    Skeleton { skeleton: skel, iota, p, gamma }
}

// ---------------------------------------------------------------------------
// Products, coproducts, pullbacks, functor groupoids.

/// `X × Y` with its two projections.
pub fn product_with_projections(x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>) -> (Arc<FinGroupoid>, GroupoidFunctor, GroupoidFunctor) {
    let p = Arc::new(FinGroupoid::product(x, y));
    let (ky, ny) = (y.object_count(), y.morphism_count());
    let pr1 = GroupoidFunctor {
        source: p.clone(),
        target: x.clone(),
        objects: (0..p.object_count()).map(|o| o / ky).collect(),
        morphisms: (0..p.morphism_count()).map(|m| m / ny).collect(),
    };
    let pr2 = GroupoidFunctor {
        source: p.clone(),
        target: y.clone(),
        objects: (0..p.object_count()).map(|o| o % ky).collect(),
        morphisms: (0..p.morphism_count()).map(|m| m % ny).collect(),
    };
    (p, pr1, pr2)
}

/// `f × g : X × Y -> X' × Y'`.
pub fn product_functor(f: &GroupoidFunctor, g: &GroupoidFunctor, source: &Arc<FinGroupoid>, target: &Arc<FinGroupoid>) -> GroupoidFunctor {
    let (ky, ny) = (g.source.object_count(), g.source.morphism_count());
    let (ky2, ny2) = (g.target.object_count(), g.target.morphism_count());
    GroupoidFunctor {
        source: source.clone(),
        target: target.clone(),
        objects: (0..source.object_count()).map(|o| f.objects[o / ky] * ky2 + g.objects[o % ky]).collect(),
        morphisms: (0..source.morphism_count()).map(|m| f.morphisms[m / ny] * ny2 + g.morphisms[m % ny]).collect(),
    }
}

/// `X ⊔ Y` with its two coprojections.
pub fn coproduct_with_injections(x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>) -> (Arc<FinGroupoid>, GroupoidFunctor, GroupoidFunctor) {
    let u = Arc::new(FinGroupoid::disjoint_union(x, y));
    let (kx, nx) = (x.object_count(), x.morphism_count());
    let inl = GroupoidFunctor {
        source: x.clone(),
        target: u.clone(),
        objects: (0..kx).collect(),
        morphisms: (0..nx).collect(),
    };
    let inr = GroupoidFunctor {
        source: y.clone(),
        target: u.clone(),
        objects: (kx..kx + y.object_count()).collect(),
        morphisms: (nx..nx + y.morphism_count()).collect(),
    };
    (u, inl, inr)
}

/// The strict pullback `X ×_B Y` with its projections; object pairs and
/// morphism pairs in lexicographic order.
pub fn groupoid_pullback(f: &GroupoidFunctor, g: &GroupoidFunctor) -> Result<(Arc<FinGroupoid>, GroupoidFunctor, GroupoidFunctor)> {
    if f.target != g.target {
        return Err(Error::ShapeMismatch("pullback legs have different targets".into()));
    }
    let (x, y) = (&f.source, &g.source);
    let mut obj_pairs = Vec::new();
    for a in 0..x.object_count() {
        for b in 0..y.object_count() {
            if f.objects[a] == g.objects[b] {
                obj_pairs.push((a, b));
            }
        }
    }
    let mut mor_pairs = Vec::new();
    for m in 0..x.morphism_count() {
        for n in 0..y.morphism_count() {
            if f.morphisms[m] == g.morphisms[n] {
                mor_pairs.push((m, n));
            }
        }
    }
    let opos: BTreeMap<(usize, usize), usize> = obj_pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mpos: BTreeMap<(usize, usize), usize> = mor_pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let objects = obj_pairs.iter().map(|&(a, b)| format!("({},{})", x.object_label(a), y.object_label(b))).collect();
    let morphisms = mor_pairs
        .iter()
        .map(|&(m, n)| Morphism {
            label: format!("({},{})", x.morphism_label(m), y.morphism_label(n)),
            src: opos[&(x.src(m), y.src(n))],
            tgt: opos[&(x.tgt(m), y.tgt(n))],
        })
        .collect();
    let p = Arc::new(FinGroupoid::build(objects, morphisms, |a, b| {
        let ((m1, n1), (m2, n2)) = (mor_pairs[a], mor_pairs[b]);
        mpos[&(x.compose(m1, m2), y.compose(n1, n2))]
    }));
    let pr1 = GroupoidFunctor {
        source: p.clone(),
        target: x.clone(),
        objects: obj_pairs.iter().map(|p| p.0).collect(),
        morphisms: mor_pairs.iter().map(|p| p.0).collect(),
    };
    let pr2 = GroupoidFunctor {
        source: p.clone(),
        target: y.clone(),
        objects: obj_pairs.iter().map(|p| p.1).collect(),
        morphisms: mor_pairs.iter().map(|p| p.1).collect(),
    };
    Ok((p, pr1, pr2))
}

/// `Z^Y` for a discrete `Y`, with the evaluation functors `ev_y`.
pub fn functor_groupoid(y: &FinGroupoid, z: &Arc<FinGroupoid>) -> Result<(Arc<FinGroupoid>, Vec<GroupoidFunctor>)> {
    if !y.is_discrete() {
        return Err(Error::NotDiscrete);
    }
    let n = y.object_count();
    let p = Arc::new(FinGroupoid::power(z, n));
    let (kz, nz) = (z.object_count(), z.morphism_count());
    let digit = |idx: usize, base: usize, i: usize| (idx / base.pow((n - 1 - i) as u32)) % base;
    let evs = (0..n)
        .map(|i| GroupoidFunctor {
            source: p.clone(),
            target: z.clone(),
            objects: (0..p.object_count()).map(|o| digit(o, kz, i)).collect(),
            morphisms: (0..p.morphism_count()).map(|m| digit(m, nz, i)).collect(),
        })
        .collect();
    Ok((p, evs))
}

// ---------------------------------------------------------------------------
// Functor enumeration.

/// All functors `X -> Y`, sorted by object images then morphism images.
pub fn enumerate_functors(x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>) -> Vec<GroupoidFunctor> {
    let sk = skeletize(x);
    let comps = x.pi0();
    // per component, every admissible (base image, hom on aut(b), γ images)
    let mut per_comp: Vec<Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)>> = Vec::new();
    for comp in &comps {
        let b = comp[0];
        let (gb, elems_b) = x.aut(b);
        let mut choices = Vec::new();
        for y0 in 0..y.object_count() {
            let (gy, elems_y) = y.aut(y0);
            let out = y.out_of(y0);
            let others: Vec<usize> = comp.iter().copied().filter(|&o| o != b).collect();
            for hom in gb.homomorphisms_to(&gy) {
                let loops: Vec<(usize, usize)> = elems_b.iter().zip(&hom).map(|(&m, &i)| (m, elems_y[i])).collect();
                for paths in tuples(out.len(), others.len()) {
                    let gammas: Vec<(usize, usize)> = others.iter().zip(&paths).map(|(&o, &k)| (o, out[k])).collect();
                    choices.push((loops.clone(), gammas));
                }
            }
        }
        per_comp.push(choices);
    }
    let mut result = Vec::new();
    let sizes: Vec<usize> = per_comp.iter().map(|c| c.len()).collect();
    if sizes.contains(&0) {
        return result;
    }
    let mut idx = vec![0usize; per_comp.len()];
    loop {
        let mut loop_img: BTreeMap<usize, usize> = BTreeMap::new();
        let mut gamma_img: BTreeMap<usize, usize> = BTreeMap::new();
        for (c, &i) in idx.iter().enumerate() {
            let (loops, gammas) = &per_comp[c][i];
            loop_img.extend(loops.iter().copied());
            let b = comps[c][0];
            let base_img = y.src(loops[0].1);
            gamma_img.insert(b, y.identity(base_img));
            gamma_img.extend(gammas.iter().copied());
        }
        let objects: Vec<usize> = (0..x.object_count()).map(|o| y.tgt(gamma_img[&o])).collect();
        let morphisms: Vec<usize> = (0..x.morphism_count())
            .map(|m| {
                let (s, t) = (x.src(m), x.tgt(m));
                let loop_ = x.compose(x.inverse(sk.gamma[t]), x.compose(m, sk.gamma[s]));
                y.compose(gamma_img[&t], y.compose(loop_img[&loop_], y.inverse(gamma_img[&s])))
            })
            .collect();
        result.push(GroupoidFunctor { source: x.clone(), target: y.clone(), objects, morphisms });
        let mut k = idx.len();
        loop {
            if k == 0 {
                result.sort_by(|a, b| (&a.objects, &a.morphisms).cmp(&(&b.objects, &b.morphisms)));
                debug_assert!(result.iter().all(|f| f.validate().is_ok()));
                return result;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// A uniformly random functor `X -> Y`, if any exists.
pub fn random_functor<R: Rng + ?Sized>(x: &Arc<FinGroupoid>, y: &Arc<FinGroupoid>, rng: &mut R) -> Option<GroupoidFunctor> {
    enumerate_functors(x, y).choose(rng).cloned()
}

// ---------------------------------------------------------------------------
// Set-level pushout-products.

/// A map of finite sets `{0..domain} -> {0..codomain}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetMap {
    pub codomain: usize,
    pub map: Vec<usize>,
}

impl SetMap {
    pub fn new(codomain: usize, map: Vec<usize>) -> Result<SetMap> {
        if map.iter().any(|&v| v >= codomain) {
            return Err(Error::Shape("set map value out of range".into()));
        }
        Ok(SetMap { codomain, map })
    }

    pub fn identity(n: usize) -> SetMap {
        SetMap { codomain: n, map: (0..n).collect() }
    }

    pub fn domain(&self) -> usize {
        self.map.len()
    }

    pub fn preimage_size(&self, v: usize) -> usize {
        self.map.iter().filter(|&&x| x == v).count()
    }

    pub fn random<R: Rng + ?Sized>(max: usize, rng: &mut R) -> SetMap {
        let codomain = rng.gen_range(0..=max);
        let domain = if codomain == 0 { 0 } else { rng.gen_range(0..=max) };
        SetMap { codomain, map: (0..domain).map(|_| rng.gen_range(0..codomain)).collect() }
    }
}

/// The pushout-product `f ×̂ g` of set maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPushoutProduct {
    /// Class representatives of the domain: `Left(x, y')` stands for `[x, y']`
    /// and `Right(x', y)` for `[x', y]`, keeping the representative first met.
    pub classes: Vec<PushoutElement>,
    /// The map into `X' × Y'`, indexed `x' * |Y'| + y'`.
    pub map: SetMap,
    /// Fiber size over each point of `X' × Y'`.
    pub fibers: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PushoutElement {
    Left(usize, usize),
    Right(usize, usize),
}

pub fn set_pushout_product(f: &SetMap, g: &SetMap) -> SetPushoutProduct {
    let (x, xp, y, yp) = (f.domain(), f.codomain, g.domain(), g.codomain);
    let left = x * yp;
    let elem = |i: usize| {
        if i < left {
            PushoutElement::Left(i / yp, i % yp)
        } else {
            PushoutElement::Right((i - left) / y, (i - left) % y)
        }
    };
    let mut uf = UnionFind::<usize>::new(left + xp * y);
    for a in 0..x {
        for b in 0..y {
            // (a, g b) ~ (f a, b)
            uf.union(a * yp + g.map[b], left + f.map[a] * y + b);
        }
    }
    let mut classes = Vec::new();
    let mut seen = BTreeSet::new();
    let mut images = Vec::new();
    for i in 0..left + xp * y {
        if seen.insert(uf.find(i)) {
            let e = elem(i);
            classes.push(e);
            images.push(match e {
                PushoutElement::Left(a, b) => f.map[a] * yp + b,
                PushoutElement::Right(a, b) => a * yp + g.map[b],
            });
        }
    }
    let mut fibers = vec![0; xp * yp];
    for &v in &images {
        fibers[v] += 1;
    }
    SetPushoutProduct { classes, map: SetMap { codomain: xp * yp, map: images }, fibers }
}

/// The fiber sizes predicted by the three-case census: a point over
/// `im f × im g`, `|f⁻¹(x')|` when `y' ∉ im g`, `|g⁻¹(y')|` when `x' ∉ im f`.
pub fn pushout_product_fiber_census(f: &SetMap, g: &SetMap) -> Vec<usize> {
    let (xp, yp) = (f.codomain, g.codomain);
    let mut out = vec![0; xp * yp];
    for a in 0..xp {
        for b in 0..yp {
            let (fa, gb) = (f.preimage_size(a), g.preimage_size(b));
            out[a * yp + b] = if fa > 0 && gb > 0 {
                1
            } else if gb == 0 {
                fa
            } else {
                gb
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc(g: FinGroupoid) -> Arc<FinGroupoid> {
        Arc::new(g)
    }

    #[test]
    fn groups() {
        assert_eq!(Group::cyclic(4).generators(), vec![1]);
        let s3 = Group::symmetric3();
        assert_eq!(s3.identity(), 0);
        assert_eq!(s3.generators().len(), 2);
        assert_eq!(Group::cyclic(2).homomorphisms_to(&Group::cyclic(4)).len(), 2);
        assert_eq!(Group::cyclic(3).homomorphisms_to(&s3).len(), 3);
        assert_eq!(s3.homomorphisms_to(&Group::cyclic(2)).len(), 2);
        assert!(matches!(Group::new(vec!["a".into(), "b".into()], vec![vec![0, 0], vec![0, 0]]), Err(Error::NotAGroup(_))));
    }

    #[test]
    fn deloopings() {
        let c2 = FinGroupoid::delooping(&Group::cyclic(2));
        assert!(c2.validate().is_ok());
        assert_eq!((c2.object_count(), c2.morphism_count()), (1, 2));
        assert_eq!(FinGroupoid::delooping(&Group::trivial()), FinGroupoid::delooping(&Group::trivial()));
        assert_eq!(FinGroupoid::delooping(&Group::trivial()).morphism_count(), 1);
        let s3 = FinGroupoid::delooping(&Group::symmetric3());
        assert_eq!(s3.aut(0).0.table(), Group::symmetric3().table());
    }

    #[test]
    fn missing_inverse_is_a_law_violation() {
        // a monoid {e, z} with z∘z = z is not a groupoid
        let objects = vec!["*".to_string()];
        let morphisms = vec![
            Morphism { label: "e".into(), src: 0, tgt: 0 },
            Morphism { label: "z".into(), src: 0, tgt: 0 },
        ];
        let table = vec![Some(0), Some(1), Some(1), Some(1)];
        assert!(matches!(FinGroupoid::new(objects, morphisms, table), Err(Error::LawViolation { which: "inverse", .. })));
    }

    #[test]
    fn table_validation() {
        let objects = vec!["a".to_string(), "b".to_string()];
        let morphisms = vec![
            Morphism { label: "ia".into(), src: 0, tgt: 0 },
            Morphism { label: "ib".into(), src: 1, tgt: 1 },
        ];
        let good = vec![Some(0), None, None, Some(1)];
        let g = FinGroupoid::new(objects.clone(), morphisms.clone(), good).unwrap();
        assert!(g.is_discrete());
        assert_eq!((g.identity(1), g.inverse(0)), (1, 0));
        let bad = vec![Some(0), Some(0), None, Some(1)];
        assert!(matches!(FinGroupoid::new(objects, morphisms, bad), Err(Error::LawViolation { which: "composition", .. })));
    }

    #[test]
    fn products_and_unions() {
        let c2 = FinGroupoid::delooping(&Group::cyclic(2));
        let c3 = FinGroupoid::delooping(&Group::cyclic(3));
        let p = FinGroupoid::product(&c2, &c3);
        assert!(p.validate().is_ok());
        assert_eq!((p.object_count(), p.morphism_count()), (1, 6));
        // C2 × C3 is cyclic of order 6: some element has order 6
        let (g, _) = p.aut(0);
        assert!((0..6).any(|a| {
            let mut x = a;
            let mut k = 1;
            while x != g.identity() {
                x = g.mul(x, a);
                k += 1;
            }
            k == 6
        }));
        let x = FinGroupoid::codiscrete(2);
        let px = FinGroupoid::product(&FinGroupoid::point(), &x);
        assert_eq!(px.morphisms().iter().map(|m| (m.src, m.tgt)).collect::<Vec<_>>(), x.morphisms().iter().map(|m| (m.src, m.tgt)).collect::<Vec<_>>());
        let u = FinGroupoid::disjoint_union(&x, &FinGroupoid::discrete(2));
        assert_eq!(u.pi0().len(), 3);
        assert!(u.validate().is_ok());
    }

    #[test]
    fn components_and_automorphisms() {
        assert_eq!(FinGroupoid::codiscrete(2).pi0().len(), 1);
        assert_eq!(FinGroupoid::discrete(3).pi0().len(), 3);
        let s3 = FinGroupoid::delooping(&Group::symmetric3());
        assert_eq!(s3.aut(0).0.order(), 6);
    }

    #[test]
    fn classification_examples() {
        let pair = arc(FinGroupoid::codiscrete(2));
        let flags = |we, fib, cof| GroupoidClassification { we, fib, cof };
        assert_eq!(classify_functor(&GroupoidFunctor::terminal(&pair)), flags(true, true, false));
        let c2 = arc(FinGroupoid::delooping(&Group::cyclic(2)));
        let pt = arc(FinGroupoid::point());
        assert_eq!(classify_functor(&GroupoidFunctor::constant(&pt, &c2, 0)), flags(false, false, true));
        let (_, inl, _) = coproduct_with_injections(&c2, &pt);
        assert_eq!(classify_functor(&inl), flags(false, true, true));
        assert_eq!(classify_functor(&GroupoidFunctor::identity(&c2)), flags(true, true, true));
    }

    #[test]
    fn skeleton_examples() {
        let pair = arc(FinGroupoid::codiscrete(2));
        let sk = skeletize(&pair);
        assert_eq!(sk.skeleton.object_count(), 1);
        assert_eq!(sk.skeleton.morphism_count(), 1);
        assert_eq!(sk.p.on_object(1), 0);
        assert_eq!(sk.gamma[1], pair.hom(0, 1)[0]);

        let c2 = arc(FinGroupoid::delooping(&Group::cyclic(2)));
        let sk = skeletize(&c2);
        assert_eq!(*sk.skeleton, *c2);
        assert!(sk.gamma.iter().all(|&g| c2.is_identity(g)));

        let two = arc(FinGroupoid::disjoint_union(&pair, &pair));
        let sk = skeletize(&two);
        assert!(sk.skeleton.is_discrete());
        assert_eq!(sk.skeleton.object_count(), 2);
    }

    #[test]
    fn skeleton_contract_on_random_groupoids() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = arc(FinGroupoid::random(5, &mut rng));
            let sk = skeletize(&x);
            assert_eq!(sk.p.compose(&sk.iota).unwrap(), GroupoidFunctor::identity(&sk.skeleton));
            assert!(classify_functor(&sk.iota).we);
            sk.iota.validate().unwrap();
            sk.p.validate().unwrap();
            for m in 0..x.morphism_count() {
                let (s, t) = (x.src(m), x.tgt(m));
                let ip = sk.iota.on_morphism(sk.p.on_morphism(m));
                assert_eq!(x.compose(m, sk.gamma[s]), x.compose(sk.gamma[t], ip));
            }
        }
    }

    #[test]
    fn functor_groupoids() {
        let c2 = arc(FinGroupoid::delooping(&Group::cyclic(2)));
        let (p, evs) = functor_groupoid(&FinGroupoid::empty(), &c2).unwrap();
        assert_eq!((p.object_count(), p.morphism_count(), evs.len()), (1, 1, 0));
        let (p, _) = functor_groupoid(&FinGroupoid::point(), &c2).unwrap();
        assert_eq!(p.morphism_count(), 2);
        let (p, evs) = functor_groupoid(&FinGroupoid::discrete(2), &c2).unwrap();
        assert_eq!((p.object_count(), p.morphism_count()), (1, 4));
        for ev in &evs {
            ev.validate().unwrap();
        }
        assert!(matches!(functor_groupoid(&c2, &c2), Err(Error::NotDiscrete)));
    }

    #[test]
    fn pullbacks() {
        let x = arc(FinGroupoid::codiscrete(2));
        let id = GroupoidFunctor::identity(&x);
        let (p, pr1, _) = groupoid_pullback(&id, &id).unwrap();
        assert_eq!((p.object_count(), p.morphism_count()), (2, 4));
        assert!(classify_functor(&pr1).we);

        let c3 = arc(FinGroupoid::delooping(&Group::cyclic(3)));
        let pt = arc(FinGroupoid::point());
        let e = GroupoidFunctor::constant(&pt, &c3, 0);
        let (p, _, _) = groupoid_pullback(&e, &e).unwrap();
        assert_eq!(*p, FinGroupoid::product(&pt, &pt));

        let (_, inl, inr) = coproduct_with_injections(&pt, &pt);
        let (p, _, _) = groupoid_pullback(&inl, &inr).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn functor_enumeration() {
        let pt = arc(FinGroupoid::point());
        let c2 = arc(FinGroupoid::delooping(&Group::cyclic(2)));
        let c4 = arc(FinGroupoid::delooping(&Group::cyclic(4)));
        assert_eq!(enumerate_functors(&arc(FinGroupoid::empty()), &c2).len(), 1);
        assert_eq!(enumerate_functors(&pt, &arc(FinGroupoid::empty())).len(), 0);
        assert_eq!(enumerate_functors(&c2, &c4).len(), 2);
        // functors pair(2) -> pair(2): choose images of both objects
        let pair = arc(FinGroupoid::codiscrete(2));
        assert_eq!(enumerate_functors(&pair, &pair).len(), 4);
        // brute force over all object/morphism assignments on a small case
        let x = arc(FinGroupoid::disjoint_union(&FinGroupoid::codiscrete(2), &FinGroupoid::delooping(&Group::cyclic(2))));
        let y = arc(FinGroupoid::product(&FinGroupoid::codiscrete(2), &FinGroupoid::delooping(&Group::cyclic(2))));
        let mut brute = 0;
        for objs in tuples(y.object_count(), x.object_count()) {
            let options: Vec<&[usize]> = (0..x.morphism_count()).map(|m| y.hom(objs[x.src(m)], objs[x.tgt(m)])).collect();
            let mut idx = vec![0; options.len()];
            'outer: loop {
                let mors = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
                let f = GroupoidFunctor { source: x.clone(), target: y.clone(), objects: objs.clone(), morphisms: mors };
                if f.validate().is_ok() {
                    brute += 1;
                }
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < options[k].len() {
                        continue 'outer;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        assert_eq!(enumerate_functors(&x, &y).len(), brute);
    }

    #[test]
    fn set_pushout_product_examples() {
        let f = SetMap::new(2, vec![0]).unwrap();
        let g = SetMap::new(2, vec![0]).unwrap();
        let pp = set_pushout_product(&f, &g);
        assert_eq!(pp.classes.len(), 3);
        assert_eq!(pp.map.codomain, 4);
        assert_eq!(pp.fibers, vec![1, 1, 1, 0]);

        let id = SetMap::identity(3);
        let g = SetMap::new(3, vec![1, 1]).unwrap();
        let pp = set_pushout_product(&id, &g);
        assert_eq!(pp.map, SetMap::identity(9));

        let empty = SetMap::new(2, vec![]).unwrap();
        let pp = set_pushout_product(&empty, &g);
        // id_{X'} × g
        let expected: Vec<usize> = (0..2).flat_map(|a| g.map.iter().map(move |&b| a * 3 + b)).collect();
        assert_eq!(pp.map.map, expected);
    }
}
