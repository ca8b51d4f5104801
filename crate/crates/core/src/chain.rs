//! Bounded chain complexes of finite-dimensional vector spaces.
//!
//! A complex stores its nonzero window `[lo, hi]`, the dimension in each
//! degree and the differentials `d_n : C_n -> C_{n-1}` as matrices of shape
//! `dim(n-1) x dim(n)`. Complexes are always trimmed, so two complexes are
//! equal exactly when they have the same window, dimensions and matrices.
//!
//! Sign conventions:
//! * tensor: `∂(v⊗w) = ∂v⊗w + (-1)^|v| v⊗∂w`, summands of `(C⊗D)_k`
//!   ordered by the degree of the `C` factor, each block ordered `(i, j)`
//!   with `i` indexing `C_m` and `j` indexing `D_n`;
//! * mapping complex: `∂f = ∂∘f - (-1)^|f| f∘∂`, summands of `[C,D]_k`
//!   ordered by the source degree, each `Hom(C_n, D_{n+k})` flattened
//!   row-major.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    field: Field,
    lo: i64,
    dims: Vec<usize>,
    // diffs[i] = d_{lo+i+1}
    diffs: Vec<Matrix>,
}

impl fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainComplex[{}]{{", self.field)?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", self.lo + i as i64, d)?;
        }
        write!(f, "}}")
    }
}

impl ChainComplex {
    pub fn zero(field: Field) -> ChainComplex {
        ChainComplex { field, lo: 0, dims: Vec::new(), diffs: Vec::new() }
    }

    /// Builds and validates a complex from dimensions and differentials
    /// keyed by source degree. Missing differentials are zero.
    pub fn new(field: Field, dims: &BTreeMap<i64, usize>, diffs: &BTreeMap<i64, Matrix>) -> Result<ChainComplex> {
        let c = Self::assemble(field, dims, diffs)?;
        c.validate()?;
        Ok(c)
    }

    /// Like [`ChainComplex::new`] but only checks matrix shapes.
    pub fn assemble(field: Field, dims: &BTreeMap<i64, usize>, diffs: &BTreeMap<i64, Matrix>) -> Result<ChainComplex> {
        let keys: Vec<i64> = dims.iter().filter(|(_, &d)| d > 0).map(|(&n, _)| n).collect();
        let (Some(&lo), Some(&hi)) = (keys.first(), keys.last()) else {
            if let Some((n, m)) = diffs.iter().find(|(_, m)| m.rows() * m.cols() > 0) {
                return Err(Error::Shape(format!("differential {n} is {}x{} on a zero complex", m.rows(), m.cols())));
            }
            return Ok(ChainComplex::zero(field));
        };
        let dim = |n: i64| dims.get(&n).copied().unwrap_or(0);
        let mut out_dims = Vec::new();
        for n in lo..=hi {
            out_dims.push(dim(n));
        }
        for (&n, m) in diffs {
            if m.field() != field {
                return Err(Error::FieldMismatch);
            }
            if m.shape() != (dim(n - 1), dim(n)) {
                return Err(Error::Shape(format!(
                    "d_{n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dim(n - 1),
                    dim(n)
                )));
            }
        }
        let out_diffs = (lo + 1..=hi)
            .map(|n| diffs.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(field, dim(n - 1), dim(n))))
            .collect();
        Ok(ChainComplex { field, lo, dims: out_dims, diffs: out_diffs })
    }

    /// Internal constructor from a dense window; trims zero ends.
    pub(crate) fn from_window(field: Field, lo: i64, dims: Vec<usize>, diffs: Vec<Matrix>) -> ChainComplex {
        debug_assert_eq!(diffs.len(), dims.len().saturating_sub(1));
        let first = dims.iter().position(|&d| d > 0);
        let Some(first) = first else {
            return ChainComplex::zero(field);
        };
        let last = dims.iter().rposition(|&d| d > 0).unwrap();
        let dims_t = dims[first..=last].to_vec();
        let diffs_t = diffs[first..last].to_vec();
        ChainComplex { field, lo: lo + first as i64, dims: dims_t, diffs: diffs_t }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Lowest degree with nonzero dimension (0 for the zero complex).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree with nonzero dimension (`lo - 1` for the zero complex).
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        (self.lo..=self.hi()).map(|n| (n, self.dim(n))).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The differential `d_n : C_n -> C_{n-1}`, zero outside the window.
    pub fn d(&self, n: i64) -> Matrix {
        if n > self.lo && n <= self.hi() {
            self.diffs[(n - self.lo - 1) as usize].clone()
        } else {
            Matrix::zeros(self.field, self.dim(n - 1), self.dim(n))
        }
    }

    pub fn differentials(&self) -> BTreeMap<i64, Matrix> {
        (self.lo + 1..=self.hi()).map(|n| (n, self.d(n))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for n in self.lo + 1..=self.hi() {
            let m = &self.diffs[(n - self.lo - 1) as usize];
            if m.field() != self.field {
                return Err(Error::FieldMismatch);
            }
            if m.shape() != (self.dim(n - 1), self.dim(n)) {
                return Err(Error::Shape(format!("d_{n} has the wrong shape")));
            }
        }
        for n in self.lo + 2..=self.hi() {
            if !(&self.d(n - 1) * &self.d(n)).is_zero() {
                return Err(Error::NotAComplex { degree: n });
            }
        }
        Ok(())
    }

    /// `K` in degree `d`.
    pub fn sphere(field: Field, d: i64) -> ChainComplex {
        ChainComplex { field, lo: d, dims: vec![1], diffs: Vec::new() }
    }

    /// `K` in degrees `n` and `n-1` with identity differential.
    pub fn disk(field: Field, n: i64) -> ChainComplex {
        ChainComplex { field, lo: n - 1, dims: vec![1, 1], diffs: vec![Matrix::identity(field, 1)] }
    }

    /// The tensor unit, `K` in degree 0.
    pub fn unit(field: Field) -> ChainComplex {
        Self::sphere(field, 0)
    }

    /// `V ⊕ W`, with the basis of `V` first in each degree.
    pub fn direct_sum(&self, other: &ChainComplex) -> Result<ChainComplex> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(Self::sum_of(self.field, &[self, other]))
    }

    pub(crate) fn sum_of(field: Field, parts: &[&ChainComplex]) -> ChainComplex {
        let nonzero: Vec<&&ChainComplex> = parts.iter().filter(|c| !c.is_zero()).collect();
        if nonzero.is_empty() {
            return ChainComplex::zero(field);
        }
        let lo = nonzero.iter().map(|c| c.lo).min().unwrap();
        let hi = nonzero.iter().map(|c| c.hi()).max().unwrap();
        let dims = (lo..=hi).map(|n| parts.iter().map(|c| c.dim(n)).sum()).collect();
        let diffs = (lo + 1..=hi)
            .map(|n| {
                let blocks: Vec<Matrix> = parts.iter().map(|c| c.d(n)).collect();
                Matrix::block_diag(field, &blocks.iter().collect::<Vec<_>>())
            })
            .collect();
        Self::from_window(field, lo, dims, diffs)
    }

    /// The `k`-fold direct sum, i.e. tensoring with a `k`-element set.
    pub fn set_tensor(&self, k: usize) -> ChainComplex {
        let parts: Vec<&ChainComplex> = std::iter::repeat_n(self, k).collect();
        Self::sum_of(self.field, &parts)
    }

    /// Shift so that `shifted(s).dim(n + s) = dim(n)`; differentials unchanged.
    pub fn shifted(&self, s: i64) -> ChainComplex {
        let mut c = self.clone();
        if !c.is_zero() {
            c.lo += s;
        }
        c
    }

    /// Conjugate the differentials by a change of basis in every degree:
    /// `d'_n = A_{n-1} d_n A_n^{-1}`.
    pub fn change_basis(&self, bases: &BTreeMap<i64, Matrix>) -> ChainComplex {
        let get = |n: i64| bases.get(&n).cloned().unwrap_or_else(|| Matrix::identity(self.field, self.dim(n)));
        let diffs = (self.lo + 1..=self.hi())
            .map(|n| {
                let inv = get(n).inverse().expect("change of basis must be invertible");
                &(&get(n - 1) * &self.d(n)) * &inv
            })
            .collect();
        ChainComplex { diffs, ..self.clone() }
    }

    /// Random complex: shifted disks and spheres in `[lo, hi]` with at most
    /// `max_dim` in each degree, conjugated by random changes of basis.
    pub fn random<R: Rng + ?Sized>(field: Field, lo: i64, hi: i64, max_dim: usize, rng: &mut R) -> ChainComplex {
        if hi < lo || max_dim == 0 {
            return ChainComplex::zero(field);
        }
        // disks[n] = number of disks occupying degrees n and n-1
        let mut disks: BTreeMap<i64, usize> = BTreeMap::new();
        let mut parts = Vec::new();
        for n in (lo..=hi).rev() {
            let used = disks.get(&(n + 1)).copied().unwrap_or(0);
            let room = max_dim - used;
            let total = rng.gen_range(0..=room);
            let d = if n > lo { rng.gen_range(0..=total) } else { 0 };
            disks.insert(n, d);
            for _ in 0..d {
                parts.push(Self::disk(field, n));
            }
            for _ in 0..total - d {
                parts.push(Self::sphere(field, n));
            }
        }
        let sum = Self::sum_of(field, &parts.iter().collect::<Vec<_>>());
        let bases = (sum.lo..=sum.hi()).map(|n| (n, Matrix::random_invertible(field, sum.dim(n), rng))).collect();
        sum.change_basis(&bases)
    }
}

/// A chain map `source -> target`. Components are stored only in degrees
/// where both sides are nonzero; elsewhere they are the empty zero map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<i64, Matrix>,
}

fn union_window(a: &ChainComplex, b: &ChainComplex) -> std::ops::RangeInclusive<i64> {
    match (a.is_zero(), b.is_zero()) {
        #[allow(clippy::reversed_empty_ranges)]
        (true, true) => 0..=-1,
        (true, false) => b.lo..=b.hi(),
        (false, true) => a.lo..=a.hi(),
        (false, false) => a.lo.min(b.lo)..=a.hi().max(b.hi()),
    }
}

impl ChainMap {
    /// Builds and validates a chain map from its components.
    pub fn new(source: ChainComplex, target: ChainComplex, components: BTreeMap<i64, Matrix>) -> Result<ChainMap> {
        let m = Self::assemble(source, target, components)?;
        m.validate()?;
        Ok(m)
    }

    /// Checks shapes only.
    pub fn assemble(source: ChainComplex, target: ChainComplex, components: BTreeMap<i64, Matrix>) -> Result<ChainMap> {
        if source.field != target.field {
            return Err(Error::FieldMismatch);
        }
        let mut kept = BTreeMap::new();
        for (n, m) in components {
            if m.field() != source.field {
                return Err(Error::FieldMismatch);
            }
            if m.shape() != (target.dim(n), source.dim(n)) {
                return Err(Error::Shape(format!(
                    "component {n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(n),
                    source.dim(n)
                )));
            }
            if m.rows() > 0 && m.cols() > 0 {
                kept.insert(n, m);
            }
        }
        for n in union_window(&source, &target) {
            if source.dim(n) > 0 && target.dim(n) > 0 && !kept.contains_key(&n) {
                kept.insert(n, Matrix::zeros(source.field, target.dim(n), source.dim(n)));
            }
        }
        Ok(ChainMap { source, target, components: kept })
    }

    pub(crate) fn from_fn(source: &ChainComplex, target: &ChainComplex, mut f: impl FnMut(i64) -> Matrix) -> ChainMap {
        let mut components = BTreeMap::new();
        for n in union_window(source, target) {
            if source.dim(n) > 0 && target.dim(n) > 0 {
                let m = f(n);
                debug_assert_eq!(m.shape(), (target.dim(n), source.dim(n)), "component {n}");
                components.insert(n, m);
            }
        }
        ChainMap { source: source.clone(), target: target.clone(), components }
    }

    pub fn validate(&self) -> Result<()> {
        for n in union_window(&self.source, &self.target) {
            let lhs = &self.target.d(n) * &self.at(n);
            let rhs = &self.at(n - 1) * &self.source.d(n);
            if lhs != rhs {
                return Err(Error::NotAChainMap(format!("square at degree {n} does not commute")));
            }
        }
        Ok(())
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        Self::from_fn(c, c, |n| Matrix::identity(c.field, c.dim(n)))
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> ChainMap {
        Self::from_fn(source, target, |n| Matrix::zeros(source.field, target.dim(n), source.dim(n)))
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn field(&self) -> Field {
        self.source.field
    }

    pub fn components(&self) -> &BTreeMap<i64, Matrix> {
        &self.components
    }

    /// The component in degree `n` (an empty or zero matrix where not stored).
    pub fn at(&self, n: i64) -> Matrix {
        self.components
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.source.field, self.target.dim(n), self.source.dim(n)))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("composing chain maps with mismatched middle complex".into()));
        }
        Ok(Self::from_fn(&first.source, &self.target, |n| &self.at(n) * &first.at(n)))
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("adding chain maps between different complexes".into()));
        }
        Ok(Self::from_fn(&self.source, &self.target, |n| &self.at(n) + &other.at(n)))
    }

    pub fn scale(&self, s: &crate::linalg::Scalar) -> ChainMap {
        Self::from_fn(&self.source, &self.target, |n| self.at(n).scale(s))
    }

    pub fn is_iso(&self) -> bool {
        union_window(&self.source, &self.target).all(|n| self.at(n).is_invertible())
    }

    pub fn is_injective(&self) -> bool {
        union_window(&self.source, &self.target).all(|n| self.at(n).is_injective())
    }

    pub fn is_surjective(&self) -> bool {
        union_window(&self.source, &self.target).all(|n| self.at(n).is_surjective())
    }

    pub fn inverse(&self) -> Option<ChainMap> {
        if !self.is_iso() {
            return None;
        }
        Some(Self::from_fn(&self.target, &self.source, |n| self.at(n).inverse().unwrap()))
    }

    /// `φ ⊕ γ : V ⊕ W -> V' ⊕ W'`.
    pub fn direct_sum(&self, other: &ChainMap) -> Result<ChainMap> {
        let s = self.source.direct_sum(&other.source)?;
        let t = self.target.direct_sum(&other.target)?;
        Ok(Self::from_fn(&s, &t, |n| Matrix::block_diag(s.field, &[&self.at(n), &other.at(n)])))
    }
}

// ---------------------------------------------------------------------------
// Generating (acyclic) cofibrations.

/// `i_n : S^{n-1} -> D^n`, the identity in degree `n-1`.
pub fn gen_cof(field: Field, n: i64) -> ChainMap {
    let s = ChainComplex::sphere(field, n - 1);
    let d = ChainComplex::disk(field, n);
    ChainMap::from_fn(&s, &d, |_| Matrix::identity(field, 1))
}

/// `j_n : 0 -> D^n`.
pub fn gen_acyclic_cof(field: Field, n: i64) -> ChainMap {
    ChainMap::zero(&ChainComplex::zero(field), &ChainComplex::disk(field, n))
}

// ---------------------------------------------------------------------------
// Homology.

/// Betti numbers; only nonzero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BettiTable(pub BTreeMap<i64, usize>);

impl BettiTable {
    pub fn get(&self, n: i64) -> usize {
        self.0.get(&n).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_counts(counts: impl IntoIterator<Item = (i64, usize)>) -> BettiTable {
        BettiTable(counts.into_iter().filter(|(_, h)| *h > 0).collect())
    }
}

/// Pivot-deterministic homology basis in one degree: `cycles` spans `Z_n`,
/// `proj` maps cycle coordinates onto `H_n`, `section` picks representatives.
#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub cycles: Matrix,
    pub proj: Matrix,
    pub section: Matrix,
}

impl HomologyDegree {
    pub fn dim(&self) -> usize {
        self.proj.rows()
    }

    /// Homology class coordinates of a matrix of cycles (columns).
    pub fn classes_of(&self, cycles: &Matrix) -> Matrix {
        let coords = self.cycles.solve_known(cycles);
        &self.proj * &coords
    }
}

pub fn homology_degree(c: &ChainComplex, n: i64) -> HomologyDegree {
    let cycles = c.d(n).kernel_basis();
    let boundaries = c.d(n + 1);
    let coords = cycles.solve_known(&boundaries);
    let (proj, h) = coords.cokernel();
    let section = proj.solve_known(&Matrix::identity(c.field, h));
    HomologyDegree { cycles, proj, section }
}

pub fn homology(c: &ChainComplex) -> BettiTable {
    BettiTable::from_counts((c.lo..=c.hi()).map(|n| {
        let z = c.dim(n) - c.d(n).rank();
        (n, z - c.d(n + 1).rank())
    }))
}

/// The matrices of `H_n(φ)` in the pivot-deterministic homology bases, for
/// every degree in the union of the two windows.
pub fn induced_homology_map(phi: &ChainMap) -> BTreeMap<i64, Matrix> {
    union_window(&phi.source, &phi.target)
        .map(|n| {
            let hs = homology_degree(&phi.source, n);
            let ht = homology_degree(&phi.target, n);
            let reps = &hs.cycles * &hs.section;
            let image = &phi.at(n) * &reps;
            (n, ht.classes_of(&image))
        })
        .collect()
}

pub fn is_quasi_iso(phi: &ChainMap) -> bool {
    induced_homology_map(phi).values().all(|m| m.is_invertible())
}

/// Flags of the projective model structure on chain complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChainClassification {
    pub we: bool,
    pub fib: bool,
    pub cof: bool,
}

pub fn classify_chain_map(phi: &ChainMap) -> ChainClassification {
    ChainClassification { we: is_quasi_iso(phi), fib: phi.is_surjective(), cof: phi.is_injective() }
}

// ---------------------------------------------------------------------------
// Tensor product.

/// Offsets of the summands `C_m ⊗ D_{k-m}` inside `(C⊗D)_k`.
struct TensorLayout<'a> {
    c: &'a ChainComplex,
    d: &'a ChainComplex,
}

impl TensorLayout<'_> {
    fn offset(&self, k: i64, m: i64) -> usize {
        (self.c.lo..m).map(|a| self.c.dim(a) * self.d.dim(k - a)).sum()
    }

    fn summands(&self, k: i64) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.c.lo..=self.c.hi()).map(move |m| (m, k - m)).filter(|&(m, n)| self.c.dim(m) * self.d.dim(n) > 0)
    }

    fn dim(&self, k: i64) -> usize {
        (self.c.lo..=self.c.hi()).map(|m| self.c.dim(m) * self.d.dim(k - m)).sum()
    }
}

pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex> {
    if c.field != d.field {
        return Err(Error::FieldMismatch);
    }
    let field = c.field;
    if c.is_zero() || d.is_zero() {
        return Ok(ChainComplex::zero(field));
    }
    let lay = TensorLayout { c, d };
    let (lo, hi) = (c.lo + d.lo, c.hi() + d.hi());
    let dims = (lo..=hi).map(|k| lay.dim(k)).collect();
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let mut m = Matrix::zeros(field, lay.dim(k - 1), lay.dim(k));
            for (a, b) in lay.summands(k) {
                let col = lay.offset(k, a);
                if c.dim(a - 1) > 0 {
                    let block = c.d(a).kron(&Matrix::identity(field, d.dim(b)));
                    m.put(lay.offset(k - 1, a - 1), col, &block);
                }
                if d.dim(b - 1) > 0 {
                    let block = Matrix::identity(field, c.dim(a)).kron(&d.d(b)).signed(a);
                    m.put(lay.offset(k - 1, a), col, &block);
                }
            }
            m
        })
        .collect();
    Ok(ChainComplex::from_window(field, lo, dims, diffs))
}

/// `φ ⊗ γ`, acting summand by summand.
pub fn tensor_map(phi: &ChainMap, gamma: &ChainMap) -> Result<ChainMap> {
    let s = tensor(&phi.source, &gamma.source)?;
    let t = tensor(&phi.target, &gamma.target)?;
    let sl = TensorLayout { c: &phi.source, d: &gamma.source };
    let tl = TensorLayout { c: &phi.target, d: &gamma.target };
    Ok(ChainMap::from_fn(&s, &t, |k| {
        let mut m = Matrix::zeros(s.field, t.dim(k), s.dim(k));
        for (a, b) in sl.summands(k) {
            if phi.target.dim(a) * gamma.target.dim(b) == 0 {
                continue;
            }
            let block = phi.at(a).kron(&gamma.at(b));
            m.put(tl.offset(k, a), sl.offset(k, a), &block);
        }
        m
    }))
}

// ---------------------------------------------------------------------------
// Mapping complex.

struct HomLayout<'a> {
    c: &'a ChainComplex,
    d: &'a ChainComplex,
}

impl HomLayout<'_> {
    fn block(&self, n: i64, k: i64) -> usize {
        self.d.dim(n + k) * self.c.dim(n)
    }

    fn offset(&self, k: i64, n: i64) -> usize {
        (self.c.lo..n).map(|a| self.block(a, k)).sum()
    }

    fn dim(&self, k: i64) -> usize {
        (self.c.lo..=self.c.hi()).map(|n| self.block(n, k)).sum()
    }

    fn window(&self) -> (i64, i64) {
        (self.d.lo - self.c.hi(), self.d.hi() - self.c.lo)
    }
}

pub fn hom_complex(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex> {
    if c.field != d.field {
        return Err(Error::FieldMismatch);
    }
    let field = c.field;
    if c.is_zero() || d.is_zero() {
        return Ok(ChainComplex::zero(field));
    }
    let lay = HomLayout { c, d };
    let (lo, hi) = lay.window();
    let dims = (lo..=hi).map(|k| lay.dim(k)).collect();
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let mut m = Matrix::zeros(field, lay.dim(k - 1), lay.dim(k));
            for n in c.lo..=c.hi() {
                if lay.block(n, k) == 0 {
                    continue;
                }
                let col = lay.offset(k, n);
                if d.dim(n + k - 1) > 0 {
                    let post = d.d(n + k).kron(&Matrix::identity(field, c.dim(n)));
                    m.put(lay.offset(k - 1, n), col, &post);
                }
                if c.dim(n + 1) > 0 {
                    let pre = Matrix::identity(field, d.dim(n + k)).kron(&c.d(n + 1).transpose()).signed(k + 1);
                    m.put(lay.offset(k - 1, n + 1), col, &pre);
                }
            }
            m
        })
        .collect();
    Ok(ChainComplex::from_window(field, lo, dims, diffs))
}

/// `[a, b] : [A, B] -> [A', B']`, `f ↦ b ∘ f ∘ a`, for `a : A' -> A`, `b : B -> B'`.
pub fn hom_map(a: &ChainMap, b: &ChainMap) -> Result<ChainMap> {
    let s = hom_complex(&a.target, &b.source)?;
    let t = hom_complex(&a.source, &b.target)?;
    let sl = HomLayout { c: &a.target, d: &b.source };
    let tl = HomLayout { c: &a.source, d: &b.target };
    Ok(ChainMap::from_fn(&s, &t, |k| {
        let mut m = Matrix::zeros(s.field, t.dim(k), s.dim(k));
        for n in a.target.lo..=a.target.hi() {
            if sl.block(n, k) == 0 || tl.block(n, k) == 0 {
                continue;
            }
            let block = b.at(n + k).kron(&a.at(n).transpose());
            m.put(tl.offset(k, n), sl.offset(k, n), &block);
        }
        m
    }))
}

/// Curries `φ : T ⊗ V -> W` into `T -> [V, W]`.
pub fn curry(phi: &ChainMap, t: &ChainComplex, v: &ChainComplex) -> Result<ChainMap> {
    if &tensor(t, v)? != phi.source() {
        return Err(Error::ShapeMismatch("curry: source is not T ⊗ V".into()));
    }
    let w = phi.target();
    let hv = hom_complex(v, w)?;
    let tl = TensorLayout { c: t, d: v };
    let hl = HomLayout { c: v, d: w };
    Ok(ChainMap::from_fn(t, &hv, |k| {
        let mut m = Matrix::zeros(t.field, hv.dim(k), t.dim(k));
        for n in v.lo..=v.hi() {
            let (vn, wn) = (v.dim(n), w.dim(n + k));
            if vn * wn == 0 {
                continue;
            }
            let comp = phi.at(n + k);
            let base = tl.offset(n + k, k);
            for a in 0..t.dim(k) {
                for r in 0..wn {
                    for i in 0..vn {
                        m.set(hl.offset(k, n) + r * vn + i, a, comp.get(r, base + a * vn + i));
                    }
                }
            }
        }
        m
    }))
}

/// Inverse of [`curry`]: `ψ : T -> [V, W]` becomes `T ⊗ V -> W`.
pub fn uncurry(psi: &ChainMap, v: &ChainComplex, w: &ChainComplex) -> Result<ChainMap> {
    if &hom_complex(v, w)? != psi.target() {
        return Err(Error::ShapeMismatch("uncurry: target is not [V, W]".into()));
    }
    let t = psi.source();
    let tv = tensor(t, v)?;
    let tl = TensorLayout { c: t, d: v };
    let hl = HomLayout { c: v, d: w };
    Ok(ChainMap::from_fn(&tv, w, |deg| {
        let mut m = Matrix::zeros(t.field, w.dim(deg), tv.dim(deg));
        for (k, n) in tl.summands(deg) {
            let comp = psi.at(k);
            let (vn, wn) = (v.dim(n), w.dim(deg));
            let base = tl.offset(deg, k);
            for a in 0..t.dim(k) {
                for r in 0..wn {
                    for i in 0..vn {
                        m.set(r, base + a * vn + i, comp.get(hl.offset(k, n) + r * vn + i, a));
                    }
                }
            }
        }
        m
    }))
}

/// A basis of the space of chain maps `V -> W`, found by solving the
/// commutation equations `d φ_n = φ_{n-1} d` directly.
pub fn chain_map_space(v: &ChainComplex, w: &ChainComplex) -> Result<Vec<ChainMap>> {
    if v.field != w.field {
        return Err(Error::FieldMismatch);
    }
    let field = v.field;
    let degrees: Vec<i64> = union_window(v, w).filter(|&n| v.dim(n) * w.dim(n) > 0).collect();
    let mut offsets = BTreeMap::new();
    let mut total = 0;
    for &n in &degrees {
        offsets.insert(n, total);
        total += v.dim(n) * w.dim(n);
    }
    let mut rows: Vec<Matrix> = Vec::new();
    for n in union_window(v, w) {
        // d^W_n φ_n - φ_{n-1} d^V_n = 0, as a map on vec(φ)
        let (r, c) = (w.dim(n - 1), v.dim(n));
        if r * c == 0 {
            continue;
        }
        let mut eq = Matrix::zeros(field, r * c, total);
        if let Some(&off) = offsets.get(&n) {
            eq.put(0, off, &w.d(n).kron(&Matrix::identity(field, c)));
        }
        if let Some(&off) = offsets.get(&(n - 1)) {
            eq.put(0, off, &-&Matrix::identity(field, r).kron(&v.d(n).transpose()));
        }
        rows.push(eq);
    }
    let system = Matrix::vstack(field, total, &rows.iter().collect::<Vec<_>>());
    let basis = system.kernel_basis();
    Ok((0..basis.cols())
        .map(|b| {
            ChainMap::from_fn(v, w, |n| {
                let off = offsets[&n];
                let (r, c) = (w.dim(n), v.dim(n));
                let mut m = Matrix::zeros(field, r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, basis.get(off + i * c + j, b));
                    }
                }
                m
            })
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Finite (co)limits.

/// Degreewise pushout `(B ⊕ C) / im(φ, -ψ)`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: ChainComplex,
    pub inl: ChainMap,
    pub inr: ChainMap,
    sections: BTreeMap<i64, Matrix>,
}

impl Pushout {
    /// The map out of the pushout induced by a cocone `u : B -> Q`,
    /// `v : C -> Q`.
    pub fn universal(&self, u: &ChainMap, v: &ChainMap) -> Result<ChainMap> {
        if u.source() != self.inl.source() || v.source() != self.inr.source() || u.target() != v.target() {
            return Err(Error::ShapeMismatch("cocone does not match the pushout span".into()));
        }
        let q = u.target();
        let field = q.field;
        Ok(ChainMap::from_fn(&self.object, q, |n| {
            let both = Matrix::hstack(field, q.dim(n), &[&u.at(n), &v.at(n)]);
            &both * &self.sections[&n]
        }))
    }
}

pub fn chain_pushout(phi: &ChainMap, psi: &ChainMap) -> Result<Pushout> {
    if phi.field() != psi.field() {
        return Err(Error::FieldMismatch);
    }
    if phi.source() != psi.source() {
        return Err(Error::ShapeMismatch("pushout legs have different sources".into()));
    }
    let field = phi.field();
    let (b, c) = (phi.target(), psi.target());
    let window = union_window(b, c);
    let mut projs = BTreeMap::new();
    let mut sections = BTreeMap::new();
    for n in window.clone() {
        let rel = Matrix::vstack(field, phi.source().dim(n), &[&phi.at(n), &-&psi.at(n)]);
        let (p, dim) = rel.cokernel();
        sections.insert(n, p.solve_known(&Matrix::identity(field, dim)));
        projs.insert(n, p);
    }
    let lo = *window.start();
    let dims: Vec<usize> = window.clone().map(|n| projs[&n].rows()).collect();
    let diffs = window
        .clone()
        .skip(1)
        .map(|n| {
            let d = Matrix::block_diag(field, &[&b.d(n), &c.d(n)]);
            &(&projs[&(n - 1)] * &d) * &sections[&n]
        })
        .collect();
    let object = ChainComplex::from_window(field, lo, dims, diffs);
    let inl = ChainMap::from_fn(b, &object, |n| projs[&n].submatrix(0..object.dim(n), 0..b.dim(n)));
    let inr = ChainMap::from_fn(c, &object, |n| projs[&n].submatrix(0..object.dim(n), b.dim(n)..b.dim(n) + c.dim(n)));
    let sections = sections.into_iter().filter(|(n, _)| object.dim(*n) > 0).collect();
    Ok(Pushout { object, inl, inr, sections })
}

/// Degreewise pullback `ker(φ - ψ) ⊂ B ⊕ C`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: ChainComplex,
    pub pr1: ChainMap,
    pub pr2: ChainMap,
    inclusions: BTreeMap<i64, Matrix>,
}

impl Pullback {
    /// The map into the pullback induced by a cone `u : Q -> B`, `v : Q -> C`.
    pub fn universal(&self, u: &ChainMap, v: &ChainMap) -> Result<ChainMap> {
        if u.target() != self.pr1.target() || v.target() != self.pr2.target() || u.source() != v.source() {
            return Err(Error::ShapeMismatch("cone does not match the pullback cospan".into()));
        }
        let q = u.source();
        let field = q.field;
        let mut failed = None;
        let m = ChainMap::from_fn(q, &self.object, |n| {
            let both = Matrix::vstack(field, q.dim(n), &[&u.at(n), &v.at(n)]);
            match self.inclusions[&n].solve_right(&both) {
                Ok(Some(x)) => x,
                _ => {
                    failed = Some(n);
                    Matrix::zeros(field, self.object.dim(n), q.dim(n))
                }
            }
        });
        match failed {
            Some(n) => Err(Error::NotAChainMap(format!("cone does not commute in degree {n}"))),
            None => Ok(m),
        }
    }
}

pub fn chain_pullback(phi: &ChainMap, psi: &ChainMap) -> Result<Pullback> {
    if phi.field() != psi.field() {
        return Err(Error::FieldMismatch);
    }
    if phi.target() != psi.target() {
        return Err(Error::ShapeMismatch("pullback legs have different targets".into()));
    }
    let field = phi.field();
    let (b, c) = (phi.source(), psi.source());
    let window = union_window(b, c);
    let mut incl = BTreeMap::new();
    for n in window.clone() {
        let diff = Matrix::hstack(field, phi.target().dim(n), &[&phi.at(n), &-&psi.at(n)]);
        incl.insert(n, diff.kernel_basis());
    }
    let lo = *window.start();
    let dims: Vec<usize> = window.clone().map(|n| incl[&n].cols()).collect();
    let diffs = window
        .clone()
        .skip(1)
        .map(|n| {
            let d = Matrix::block_diag(field, &[&b.d(n), &c.d(n)]);
            incl[&(n - 1)].solve_known(&(&d * &incl[&n]))
        })
        .collect();
    let object = ChainComplex::from_window(field, lo, dims, diffs);
    let pr1 = ChainMap::from_fn(&object, b, |n| incl[&n].submatrix(0..b.dim(n), 0..object.dim(n)));
    let pr2 = ChainMap::from_fn(&object, c, |n| incl[&n].submatrix(b.dim(n)..b.dim(n) + c.dim(n), 0..object.dim(n)));
    let inclusions = incl.into_iter().filter(|(n, _)| object.dim(*n) > 0).collect();
    Ok(Pullback { object, pr1, pr2, inclusions })
}

/// The pushout-product `(X'⊗Y) ⊔_{X⊗Y} (X⊗Y') -> X'⊗Y'` of `φ : X -> X'`
/// and `γ : Y -> Y'`.
pub fn pushout_product_chain(phi: &ChainMap, gamma: &ChainMap) -> Result<ChainMap> {
    if phi.field() != gamma.field() {
        return Err(Error::FieldMismatch);
    }
    let id_x = ChainMap::identity(phi.source());
    let id_xp = ChainMap::identity(phi.target());
    let id_y = ChainMap::identity(gamma.source());
    let id_yp = ChainMap::identity(gamma.target());
    let left = tensor_map(phi, &id_y)?;
    let top = tensor_map(&id_x, gamma)?;
    let po = chain_pushout(&left, &top)?;
    let u = tensor_map(&id_xp, gamma)?;
    let v = tensor_map(phi, &id_yp)?;
    po.universal(&u, &v)
}

/// A random element of the space of chain maps `V -> W`.
pub fn random_chain_map<R: Rng + ?Sized>(v: &ChainComplex, w: &ChainComplex, rng: &mut R) -> Result<ChainMap> {
    let basis = chain_map_space(v, w)?;
    let mut acc = ChainMap::zero(v, w);
    for b in &basis {
        let s = Matrix::random(v.field, 1, 1, rng).get(0, 0);
        acc = acc.add(&b.scale(&s))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const F2: Field = Field::Prime(2);
    const F3: Field = Field::Prime(3);

    fn complex(field: Field, dims: &[(i64, usize)], diffs: &[(i64, Vec<Vec<i64>>)]) -> Result<ChainComplex> {
        let dims = dims.iter().copied().collect();
        let diffs = diffs.iter().map(|(n, rows)| (*n, Matrix::from_int_rows(field, rows))).collect();
        ChainComplex::new(field, &dims, &diffs)
    }

    #[test]
    fn validation() {
        assert!(ChainComplex::disk(F2, 1).validate().is_ok());
        let bad = complex(F3, &[(1, 1), (0, 1), (-1, 1)], &[(1, vec![vec![1]]), (0, vec![vec![1]])]);
        assert!(matches!(bad, Err(Error::NotAComplex { .. })));
        assert!(ChainComplex::zero(F2).validate().is_ok());
        let shape = complex(F3, &[(1, 2), (0, 1)], &[(1, vec![vec![1]])]);
        assert!(matches!(shape, Err(Error::Shape(_))));
    }

    #[test]
    fn not_a_complex_reports_degree() {
        let bad = complex(F3, &[(1, 1), (0, 1), (-1, 1)], &[(1, vec![vec![1]]), (0, vec![vec![1]])]).unwrap_err();
        // d_0 ∘ d_1 ≠ 0 is reported at the source degree of the composite
        assert_eq!(bad, Error::NotAComplex { degree: 1 });
    }

    #[test]
    fn generators() {
        assert_eq!(ChainComplex::sphere(F3, 0), ChainComplex::unit(F3));
        assert!(homology(&ChainComplex::disk(F3, 3)).is_zero());
        let i1 = gen_cof(F3, 1);
        assert!(i1.is_injective());
        assert!(i1.validate().is_ok());
        assert!(gen_acyclic_cof(F3, 2).validate().is_ok());
    }

    #[test]
    fn homology_examples() {
        assert_eq!(homology(&ChainComplex::sphere(F2, 2)), BettiTable([(2, 1)].into()));
        assert!(homology(&ChainComplex::disk(F2, 5)).is_zero());
        let c = complex(F2, &[(1, 1), (0, 1)], &[]).unwrap();
        assert_eq!(homology(&c), BettiTable([(1, 1), (0, 1)].into()));
    }

    #[test]
    fn induced_maps() {
        let c = ChainComplex::random(F3, -1, 2, 3, &mut ChaCha8Rng::seed_from_u64(5));
        for (n, m) in induced_homology_map(&ChainMap::identity(&c)) {
            assert_eq!(m, Matrix::identity(F3, homology(&c).get(n)));
        }
        let h = induced_homology_map(&gen_cof(F2, 1));
        assert_eq!(h[&0].shape(), (0, 1));
        let z = ChainMap::zero(&c, &c);
        assert!(induced_homology_map(&z).values().all(|m| m.is_zero()));
    }

    #[test]
    fn classification_examples() {
        let flags = |cof, fib, we| ChainClassification { we, fib, cof };
        assert_eq!(classify_chain_map(&gen_cof(F2, 1)), flags(true, false, false));
        assert_eq!(classify_chain_map(&gen_acyclic_cof(F2, 1)), flags(true, false, true));
        let c = ChainComplex::disk(F3, 0).direct_sum(&ChainComplex::sphere(F3, 4)).unwrap();
        assert_eq!(classify_chain_map(&ChainMap::identity(&c)), flags(true, true, true));
    }

    #[test]
    fn tensor_examples() {
        let t = tensor(&ChainComplex::sphere(F3, 2), &ChainComplex::sphere(F3, -5)).unwrap();
        assert_eq!(t, ChainComplex::sphere(F3, -3));
        let v = ChainComplex::random(F3, 0, 3, 2, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(tensor(&ChainComplex::unit(F3), &v).unwrap(), v);
        let dd = tensor(&ChainComplex::disk(F2, 1), &ChainComplex::disk(F2, 1)).unwrap();
        assert_eq!(dd.dims(), [(0, 1), (1, 2), (2, 1)].into());
        assert!(homology(&dd).is_zero());
        assert!(matches!(tensor(&v, &ChainComplex::unit(F2)), Err(Error::FieldMismatch)));
    }

    #[test]
    fn hom_examples() {
        let w = ChainComplex::random(F3, -1, 2, 2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(hom_complex(&ChainComplex::unit(F3), &w).unwrap(), w);
        let h = hom_complex(&ChainComplex::sphere(F3, 1), &ChainComplex::sphere(F3, 3)).unwrap();
        assert_eq!(h, ChainComplex::sphere(F3, 2));
        // chain maps S^0 -> D^1: only the degree-0 component is free
        let h = hom_complex(&ChainComplex::sphere(F3, 0), &ChainComplex::disk(F3, 1)).unwrap();
        assert_eq!(h.dim(0) - h.d(0).rank(), 1);
        assert_eq!(chain_map_space(&ChainComplex::sphere(F3, 0), &ChainComplex::disk(F3, 1)).unwrap().len(), 1);
    }

    #[test]
    fn set_tensor_examples() {
        assert!(ChainComplex::disk(F2, 1).set_tensor(0).is_zero());
        assert_eq!(ChainComplex::unit(F2).set_tensor(3).dims(), [(0, 3)].into());
        let a = ChainComplex::random(F3, 0, 2, 2, &mut ChaCha8Rng::seed_from_u64(8));
        let b = ChainComplex::random(F3, 1, 3, 2, &mut ChaCha8Rng::seed_from_u64(9));
        let s = a.direct_sum(&b).unwrap();
        for n in -1..5 {
            assert_eq!(homology(&s).get(n), homology(&a).get(n) + homology(&b).get(n));
        }
    }

    #[test]
    fn pushouts() {
        let c = ChainComplex::random(F3, 0, 2, 2, &mut ChaCha8Rng::seed_from_u64(4));
        let a = ChainComplex::disk(F3, 1);
        let phi = ChainMap::identity(&a);
        let psi = ChainMap::zero(&a, &c);
        let po = chain_pushout(&phi, &psi).unwrap();
        assert_eq!(po.object.dims(), c.dims());
        assert!(po.inr.is_iso());

        let i1 = gen_cof(F2, 1);
        let po = chain_pushout(&i1, &i1).unwrap();
        assert_eq!(po.object.dims(), [(0, 1), (1, 2)].into());
        assert_eq!(homology(&po.object), BettiTable([(1, 1)].into()));
        po.object.validate().unwrap();

        let zero = ChainComplex::zero(F2);
        let w = ChainComplex::disk(F2, 2);
        let pb = chain_pullback(&ChainMap::zero(&zero, &w), &ChainMap::zero(&zero, &w)).unwrap();
        assert!(pb.object.is_zero());
    }

    #[test]
    fn pushout_product_examples() {
        for field in [F2, F3, Field::Rational] {
            let i1 = gen_cof(field, 1);
            let pp = pushout_product_chain(&i1, &i1).unwrap();
            assert_eq!(pp.source().dims(), [(0, 1), (1, 2)].into());
            assert_eq!(pp.target(), &tensor(&ChainComplex::disk(field, 1), &ChainComplex::disk(field, 1)).unwrap());
            let fl = classify_chain_map(&pp);
            assert!(fl.cof && !fl.fib && !fl.we);
            // cokernel is K in degree 2
            let cok: Vec<usize> = (0..=2).map(|n| pp.at(n).cokernel().1).collect();
            assert_eq!(cok, vec![0, 0, 1]);

            let pp = pushout_product_chain(&i1, &gen_acyclic_cof(field, 1)).unwrap();
            let fl = classify_chain_map(&pp);
            assert!(fl.cof && fl.we);

            let id = ChainMap::identity(&ChainComplex::disk(field, 2));
            let pp = pushout_product_chain(&i1, &id).unwrap();
            assert!(pp.is_iso());
        }
    }
}
