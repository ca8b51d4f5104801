//! Truncated simplicial objects in chain complexes and their normalized
//! total complex.

use crate::chain::{is_quasi_iso, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};

/// Levels `V_0 ... V_D` with faces `d_i : V_n -> V_{n-1}` and degeneracies
/// `s_i : V_n -> V_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSimplicialComplex {
    field: Field,
    levels: Vec<ChainComplex>,
    // faces[n][i] for 1 <= n <= D; faces[0] is empty
    faces: Vec<Vec<ChainMap>>,
    // degens[n][i] for n < D
    degens: Vec<Vec<ChainMap>>,
}

impl TruncSimplicialComplex {
    /// Checks shapes and every simplicial identity among the stored maps.
    pub fn new(
        field: Field,
        levels: Vec<ChainComplex>,
        faces: Vec<Vec<ChainMap>>,
        degens: Vec<Vec<ChainMap>>,
    ) -> Result<TruncSimplicialComplex> {
        let v = Self::assemble(field, levels, faces, degens)?;
        v.validate()?;
        Ok(v)
    }

    /// Checks shapes only.
    pub fn assemble(
        field: Field,
        levels: Vec<ChainComplex>,
        faces: Vec<Vec<ChainMap>>,
        degens: Vec<Vec<ChainMap>>,
    ) -> Result<TruncSimplicialComplex> {
        if levels.is_empty() {
            return Err(Error::Shape("a simplicial object needs at least level 0".into()));
        }
        let top = levels.len() - 1;
        if faces.len() != top + 1 || degens.len() != top + 1 {
            return Err(Error::Shape("face/degeneracy tables do not match the number of levels".into()));
        }
        if levels.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        for n in 0..=top {
            let want_faces = if n == 0 { 0 } else { n + 1 };
            let want_degens = if n == top { 0 } else { n + 1 };
            if faces[n].len() != want_faces || degens[n].len() != want_degens {
                return Err(Error::Shape(format!("level {n} has the wrong number of structure maps")));
            }
            for (i, d) in faces[n].iter().enumerate() {
                if d.source() != &levels[n] || d.target() != &levels[n - 1] {
                    return Err(Error::Shape(format!("face d_{i} on level {n} has the wrong endpoints")));
                }
            }
            for (i, s) in degens[n].iter().enumerate() {
                if s.source() != &levels[n] || s.target() != &levels[n + 1] {
                    return Err(Error::Shape(format!("degeneracy s_{i} on level {n} has the wrong endpoints")));
                }
            }
        }
        Ok(TruncSimplicialComplex { field, levels, faces, degens })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn skeletal_degree(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &ChainComplex {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[ChainComplex] {
        &self.levels
    }

    /// `d_i : V_n -> V_{n-1}`.
    pub fn face(&self, n: usize, i: usize) -> &ChainMap {
        &self.faces[n][i]
    }

    /// `s_i : V_n -> V_{n+1}`.
    pub fn degeneracy(&self, n: usize, i: usize) -> &ChainMap {
        &self.degens[n][i]
    }

    pub fn validate(&self) -> Result<()> {
        let top = self.skeletal_degree();
        let violation = |identity, i, j, n| Error::SimplicialIdentityViolation { identity, i, j, n };
        let compose = |a: &ChainMap, b: &ChainMap| a.compose(b).expect("endpoints checked on assembly");
        for m in self.faces.iter().flatten().chain(self.degens.iter().flatten()) {
            m.validate()?;
        }
        // d_i d_j = d_{j-1} d_i on V_n, i < j
        for n in 2..=top {
            for j in 1..=n {
                for i in 0..j {
                    if compose(self.face(n - 1, i), self.face(n, j)) != compose(self.face(n - 1, j - 1), self.face(n, i)) {
                        return Err(violation("d_i d_j = d_{j-1} d_i", i, j, n));
                    }
                }
            }
        }
        // d_i s_j on V_n, with s_j : V_n -> V_{n+1}
        for n in 0..top {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = compose(self.face(n + 1, i), self.degeneracy(n, j));
                    let rhs = if i < j {
                        compose(self.degeneracy(n - 1, j - 1), self.face(n, i))
                    } else if i == j || i == j + 1 {
                        ChainMap::identity(&self.levels[n])
                    } else {
                        compose(self.degeneracy(n - 1, j), self.face(n, i - 1))
                    };
                    if lhs != rhs {
                        return Err(violation("d_i s_j", i, j, n));
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i on V_n, i <= j
        for n in 0..top.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    if compose(self.degeneracy(n + 1, i), self.degeneracy(n, j))
                        != compose(self.degeneracy(n + 1, j + 1), self.degeneracy(n, i))
                    {
                        return Err(violation("s_i s_j = s_{j+1} s_i", i, j, n));
                    }
                }
            }
        }
        Ok(())
    }

    /// The constant object: every level `c`, every structure map the identity.
    pub fn constant(c: &ChainComplex, top: usize) -> TruncSimplicialComplex {
        let id = ChainMap::identity(c);
        let faces = (0..=top).map(|n| vec![id.clone(); if n == 0 { 0 } else { n + 1 }]).collect();
        let degens = (0..=top).map(|n| vec![id.clone(); if n == top { 0 } else { n + 1 }]).collect();
        TruncSimplicialComplex { field: c.field(), levels: vec![c.clone(); top + 1], faces, degens }
    }

    pub fn ev0(&self) -> &ChainComplex {
        &self.levels[0]
    }

    /// Chains on the standard `k`-simplex, truncated at level `top`: level `n`
    /// has one basis vector in chain degree 0 per non-decreasing sequence of
    /// length `n+1` in `{0..k}`, in lexicographic order.
    pub fn standard_simplex(field: Field, k: usize, top: usize) -> TruncSimplicialComplex {
        let simplices: Vec<Vec<Vec<usize>>> = (0..=top).map(|n| monotone_sequences(n + 1, k)).collect();
        let level = |n: usize| ChainComplex::unit(field).set_tensor(simplices[n].len());
        let levels: Vec<ChainComplex> = (0..=top).map(level).collect();
        let set_map = |from: usize, to: usize, f: &dyn Fn(&[usize]) -> Vec<usize>| {
            let mut m = Matrix::zeros(field, simplices[to].len(), simplices[from].len());
            for (c, s) in simplices[from].iter().enumerate() {
                let image = f(s);
                let r = simplices[to].iter().position(|t| *t == image).unwrap();
                m.set(r, c, field.one());
            }
            ChainMap::assemble(levels[from].clone(), levels[to].clone(), [(0, m)].into()).unwrap()
        };
        let faces = (0..=top)
            .map(|n| {
                if n == 0 {
                    return Vec::new();
                }
                (0..=n)
                    .map(|i| {
                        set_map(n, n - 1, &|s: &[usize]| {
                            let mut t = s.to_vec();
                            t.remove(i);
                            t
                        })
                    })
                    .collect()
            })
            .collect();
        let degens = (0..=top)
            .map(|n| {
                if n == top {
                    return Vec::new();
                }
                (0..=n)
                    .map(|i| {
                        set_map(n, n + 1, &|s: &[usize]| {
                            let mut t = s.to_vec();
                            t.insert(i, s[i]);
                            t
                        })
                    })
                    .collect()
            })
            .collect();
        TruncSimplicialComplex { field, levels, faces, degens }
    }

    fn map_levels(&self, other: &TruncSimplicialComplex, f: impl Fn(&ChainMap, &ChainMap) -> Result<ChainMap>) -> Result<(Vec<Vec<ChainMap>>, Vec<Vec<ChainMap>>)> {
        let zip = |a: &Vec<Vec<ChainMap>>, b: &Vec<Vec<ChainMap>>| -> Result<Vec<Vec<ChainMap>>> {
            a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| f(p, q)).collect()).collect()
        };
        Ok((zip(&self.faces, &other.faces)?, zip(&self.degens, &other.degens)?))
    }
}

fn monotone_sequences(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, min: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in min..=k {
            prefix.push(v);
            go(len, v, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Levelwise tensor product.
pub fn level_tensor(v: &TruncSimplicialComplex, w: &TruncSimplicialComplex) -> Result<TruncSimplicialComplex> {
    if v.field != w.field {
        return Err(Error::FieldMismatch);
    }
    if v.skeletal_degree() != w.skeletal_degree() {
        return Err(Error::ShapeMismatch("level_tensor needs equal skeletal degree".into()));
    }
    let levels = v
        .levels
        .iter()
        .zip(&w.levels)
        .map(|(a, b)| crate::chain::tensor(a, b))
        .collect::<Result<Vec<_>>>()?;
    let (faces, degens) = v.map_levels(w, crate::chain::tensor_map)?;
    Ok(TruncSimplicialComplex { field: v.field, levels, faces, degens })
}

/// A levelwise chain map commuting with all faces and degeneracies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSimplicialMap {
    source: TruncSimplicialComplex,
    target: TruncSimplicialComplex,
    levels: Vec<ChainMap>,
}

impl TruncSimplicialMap {
    pub fn new(source: TruncSimplicialComplex, target: TruncSimplicialComplex, levels: Vec<ChainMap>) -> Result<Self> {
        let top = source.skeletal_degree();
        if target.skeletal_degree() != top || levels.len() != top + 1 {
            return Err(Error::ShapeMismatch("simplicial map levels do not match".into()));
        }
        for (n, m) in levels.iter().enumerate() {
            if m.source() != source.level(n) || m.target() != target.level(n) {
                return Err(Error::ShapeMismatch(format!("level {n} of the simplicial map has the wrong endpoints")));
            }
            m.validate()?;
        }
        let f = TruncSimplicialMap { source, target, levels };
        for n in 0..=top {
            for i in 0..f.source.faces[n].len() {
                let lhs = f.target.face(n, i).compose(&f.levels[n])?;
                let rhs = f.levels[n - 1].compose(f.source.face(n, i))?;
                if lhs != rhs {
                    return Err(Error::NotAChainMap(format!("does not commute with d_{i} on level {n}")));
                }
            }
            for i in 0..f.source.degens[n].len() {
                let lhs = f.target.degeneracy(n, i).compose(&f.levels[n])?;
                let rhs = f.levels[n + 1].compose(f.source.degeneracy(n, i))?;
                if lhs != rhs {
                    return Err(Error::NotAChainMap(format!("does not commute with s_{i} on level {n}")));
                }
            }
        }
        Ok(f)
    }

    pub fn identity(v: &TruncSimplicialComplex) -> TruncSimplicialMap {
        let levels = v.levels.iter().map(ChainMap::identity).collect();
        TruncSimplicialMap { source: v.clone(), target: v.clone(), levels }
    }

    pub fn constant(phi: &ChainMap, top: usize) -> TruncSimplicialMap {
        TruncSimplicialMap {
            source: TruncSimplicialComplex::constant(phi.source(), top),
            target: TruncSimplicialComplex::constant(phi.target(), top),
            levels: vec![phi.clone(); top + 1],
        }
    }

    pub fn source(&self) -> &TruncSimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &TruncSimplicialComplex {
        &self.target
    }

    pub fn level(&self, n: usize) -> &ChainMap {
        &self.levels[n]
    }

    pub fn compose(&self, first: &TruncSimplicialMap) -> Result<TruncSimplicialMap> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("composing simplicial maps with mismatched middle object".into()));
        }
        let levels = self.levels.iter().zip(&first.levels).map(|(g, f)| g.compose(f)).collect::<Result<_>>()?;
        Ok(TruncSimplicialMap { source: first.source.clone(), target: self.target.clone(), levels })
    }
}

// ---------------------------------------------------------------------------
// Normalized total complex.

/// For each level `s`, the inclusion of `N_s = ∩_{i<s} ker d_i` in every
/// chain degree, as a matrix whose columns span the subspace.
fn normalized_inclusions(v: &TruncSimplicialComplex) -> Vec<std::collections::BTreeMap<i64, Matrix>> {
    v.levels
        .iter()
        .enumerate()
        .map(|(s, c)| {
            (c.lo()..=c.hi())
                .map(|t| {
                    let faces: Vec<Matrix> = (0..s).map(|i| v.face(s, i).at(t)).collect();
                    let stacked = Matrix::vstack(v.field, c.dim(t), &faces.iter().collect::<Vec<_>>());
                    (t, stacked.kernel_basis())
                })
                .collect()
        })
        .collect()
}

struct TotLayout {
    // incl[s][t]
    incl: Vec<std::collections::BTreeMap<i64, Matrix>>,
}

impl TotLayout {
    fn n_dim(&self, s: usize, t: i64) -> usize {
        self.incl[s].get(&t).map_or(0, |m| m.cols())
    }

    fn dim(&self, k: i64) -> usize {
        (0..self.incl.len()).map(|s| self.n_dim(s, k - s as i64)).sum()
    }

    fn offset(&self, k: i64, s: usize) -> usize {
        (0..s).map(|a| self.n_dim(a, k - a as i64)).sum()
    }

    fn incl(&self, field: Field, rows: usize, s: usize, t: i64) -> Matrix {
        self.incl[s].get(&t).cloned().unwrap_or_else(|| Matrix::zeros(field, rows, 0))
    }
}

fn tot_window(v: &TruncSimplicialComplex) -> Option<(i64, i64)> {
    let spans: Vec<(i64, i64)> = v
        .levels
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| (c.lo() + s as i64, c.hi() + s as i64))
        .collect();
    let lo = spans.iter().map(|p| p.0).min()?;
    let hi = spans.iter().map(|p| p.1).max()?;
    Some((lo, hi))
}

/// `Tot_k = ⊕_{s+t=k} N_{s,t}`, summands in increasing `s`, with differential
/// `∂ + (-1)^t δ` where `δ = (-1)^s d_s` on `N_s`.
pub fn tot(v: &TruncSimplicialComplex) -> ChainComplex {
    let field = v.field;
    let Some((lo, hi)) = tot_window(v) else {
        return ChainComplex::zero(field);
    };
    let lay = TotLayout { incl: normalized_inclusions(v) };
    let dims = (lo..=hi).map(|k| lay.dim(k)).collect();
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let mut m = Matrix::zeros(field, lay.dim(k - 1), lay.dim(k));
            for s in 0..v.levels.len() {
                let t = k - s as i64;
                if lay.n_dim(s, t) == 0 {
                    continue;
                }
                let c = &v.levels[s];
                let k_st = lay.incl(field, c.dim(t), s, t);
                let col = lay.offset(k, s);
                if lay.n_dim(s, t - 1) > 0 {
                    let below = lay.incl(field, c.dim(t - 1), s, t - 1);
                    let internal = below.solve_known(&(&c.d(t) * &k_st));
                    m.put(lay.offset(k - 1, s), col, &internal);
                }
                if s > 0 && lay.n_dim(s - 1, t) > 0 {
                    let prev = lay.incl(field, v.levels[s - 1].dim(t), s - 1, t);
                    let delta = prev.solve_known(&(&v.face(s, s).at(t) * &k_st));
                    m.put(lay.offset(k - 1, s - 1), col, &delta.signed(s as i64 + t));
                }
            }
            m
        })
        .collect();
    ChainComplex::from_window(field, lo, dims, diffs)
}

/// The map induced on normalized total complexes.
pub fn tot_map(phi: &TruncSimplicialMap) -> ChainMap {
    let field = phi.source.field;
    let s_tot = tot(&phi.source);
    let t_tot = tot(&phi.target);
    let sl = TotLayout { incl: normalized_inclusions(&phi.source) };
    let tl = TotLayout { incl: normalized_inclusions(&phi.target) };
    ChainMap::from_fn(&s_tot, &t_tot, |k| {
        let mut m = Matrix::zeros(field, t_tot.dim(k), s_tot.dim(k));
        for s in 0..phi.levels.len() {
            let t = k - s as i64;
            if sl.n_dim(s, t) == 0 || tl.n_dim(s, t) == 0 {
                continue;
            }
            let ks = sl.incl(field, phi.source.levels[s].dim(t), s, t);
            let kt = tl.incl(field, phi.target.levels[s].dim(t), s, t);
            let block = kt.solve_known(&(&phi.levels[s].at(t) * &ks));
            m.put(tl.offset(k, s), sl.offset(k, s), &block);
        }
        m
    })
}

pub fn is_total_we(phi: &TruncSimplicialMap) -> bool {
    is_quasi_iso(&tot_map(phi))
}

pub fn is_homotopically_constant(v: &TruncSimplicialComplex) -> bool {
    v.faces.iter().flatten().chain(v.degens.iter().flatten()).all(is_quasi_iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{homology, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const F3: Field = Field::Prime(3);

    #[test]
    fn constants_validate() {
        let c = TruncSimplicialComplex::constant(&ChainComplex::unit(F3), 2);
        assert!(c.validate().is_ok());
        let point = TruncSimplicialComplex::constant(&ChainComplex::disk(F3, 1), 0);
        assert!(point.validate().is_ok());
        assert_eq!(tot(&point), ChainComplex::disk(F3, 1));
    }

    #[test]
    fn swapped_degeneracies_are_rejected() {
        let mut v = TruncSimplicialComplex::standard_simplex(F3, 1, 2);
        assert!(v.validate().is_ok());
        v.degens[1].swap(0, 1);
        assert!(matches!(v.validate(), Err(Error::SimplicialIdentityViolation { .. })));
    }

    #[test]
    fn ev0_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = ChainComplex::random(F3, 0, 2, 2, &mut rng);
        assert_eq!(TruncSimplicialComplex::constant(&c, 3).ev0(), &c);
        let z = TruncSimplicialComplex::constant(&ChainComplex::zero(F3), 2);
        assert!(tot(&z).is_zero());
    }

    #[test]
    fn constants_tensor_levelwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ChainComplex::random(F3, 0, 1, 2, &mut rng);
        let b = ChainComplex::random(F3, -1, 1, 2, &mut rng);
        let lhs = level_tensor(&TruncSimplicialComplex::constant(&a, 2), &TruncSimplicialComplex::constant(&b, 2)).unwrap();
        assert_eq!(lhs, TruncSimplicialComplex::constant(&tensor(&a, &b).unwrap(), 2));
        let unit = TruncSimplicialComplex::constant(&ChainComplex::unit(F3), 2);
        let v = TruncSimplicialComplex::standard_simplex(F3, 2, 2);
        assert_eq!(level_tensor(&unit, &v).unwrap(), v);
    }

    #[test]
    fn tot_of_constant_has_the_same_homology() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for top in 0..4 {
            let c = ChainComplex::random(F3, -1, 2, 3, &mut rng);
            let t = tot(&TruncSimplicialComplex::constant(&c, top));
            t.validate().unwrap();
            assert_eq!(homology(&t), homology(&c));
        }
    }

    #[test]
    fn standard_simplex_is_contractible() {
        for k in 0..3 {
            let v = TruncSimplicialComplex::standard_simplex(F3, k, k + 1);
            v.validate().unwrap();
            let t = tot(&v);
            t.validate().unwrap();
            assert_eq!(homology(&t), homology(&ChainComplex::unit(F3)), "Δ^{k}");
        }
    }

    #[test]
    fn total_we_examples() {
        let c = ChainComplex::disk(F3, 1).direct_sum(&ChainComplex::sphere(F3, 0)).unwrap();
        assert!(is_total_we(&TruncSimplicialMap::identity(&TruncSimplicialComplex::constant(&c, 2))));
        assert!(!is_total_we(&TruncSimplicialMap::constant(&ChainMap::zero(&c, &c), 2)));
    }

    #[test]
    fn acyclic_levels_are_homotopically_constant() {
        let c = ChainComplex::disk(F3, 2);
        let mut v = TruncSimplicialComplex::constant(&c, 1);
        v.faces[1][0] = ChainMap::zero(&c, &c);
        assert!(is_homotopically_constant(&v));
        let s = ChainComplex::sphere(F3, 0);
        let mut w = TruncSimplicialComplex::constant(&s, 1);
        w.faces[1][1] = ChainMap::zero(&s, &s);
        assert!(!is_homotopically_constant(&w));
    }
}
