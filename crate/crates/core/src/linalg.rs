//! Exact dense linear algebra over prime fields and the rationals.
//!
//! Every other module reduces its questions (is this map injective, what is
//! the homology, is there a splitting) to the handful of primitives here:
//! products, reduced row echelon form, kernels, particular solutions and
//! cokernels. Elimination always pivots on the first nonzero entry in column
//! order, so bases are reproducible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// The ground field: a prime field `F_p` or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Prime(u32),
    Rational,
}

impl Field {
    /// `F_p`, checking that `p` is a prime below `2^31`.
    pub fn prime(p: u32) -> Result<Field> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Residue(0),
            Field::Rational => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Residue(1),
            Field::Rational => Scalar::Rational(BigRational::one()),
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Residue(n.rem_euclid(*p as i64) as u32),
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// The image of a rational number, if its denominator is invertible.
    pub fn reduce(&self, q: &BigRational) -> Option<Scalar> {
        match self {
            Field::Rational => Some(Scalar::Rational(q.clone())),
            Field::Prime(p) => {
                let ops = Fp(*p as u64);
                let p = BigInt::from(*p);
                let residue = |n: &BigInt| -> u32 { ((n % &p + &p) % &p).try_into().expect("residue below p") };
                let den = residue(q.denom());
                if den == 0 {
                    return None;
                }
                Some(Scalar::Residue(ops.mul(&residue(q.numer()), &ops.inv(&den))))
            }
        }
    }

    /// Checks that a scalar is a canonical element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Prime(p), Scalar::Residue(r)) => r < p,
            (Field::Rational, Scalar::Rational(q)) => q.denom().is_positive(),
            _ => false,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "Fp:{p}"),
            Field::Rational => write!(f, "Q"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("Fp:")
            .and_then(|p| p.parse::<u32>().ok())
            .ok_or_else(|| Error::InvalidField(format!("expected \"Fp:<p>\" or \"Q\", got {s:?}")))?;
        Field::prime(p)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. Rationals are always kept in lowest terms with a
/// positive denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Residue(u32),
    Rational(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Residue(r) => *r == 0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }

    /// Parses a scalar in the text format of `field`: a decimal residue for
    /// `F_p`, or `"a"` / `"a/b"` for the rationals.
    pub fn parse(field: Field, s: &str) -> Result<Scalar> {
        let bad = || Error::Shape(format!("invalid scalar {s:?} for field {field}"));
        match field {
            Field::Prime(p) => {
                let r: u32 = s.trim().parse().map_err(|_| bad())?;
                if r >= p {
                    return Err(bad());
                }
                Ok(Scalar::Residue(r))
            }
            Field::Rational => {
                let s = s.trim();
                let q = match s.split_once('/') {
                    Some((a, b)) => {
                        let a: BigInt = a.parse().map_err(|_| bad())?;
                        let b: BigInt = b.parse().map_err(|_| bad())?;
                        if b.is_zero() {
                            return Err(bad());
                        }
                        BigRational::new(a, b)
                    }
                    None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
                };
                Ok(Scalar::Rational(q))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Residue(r) => write!(f, "{r}"),
            Scalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

// ---------------------------------------------------------------------------
// Arithmetic kernels, generic over the two backends.

trait Arith {
    type Elem: Clone + PartialEq;
    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

struct Fp(u64);

impl Arith for Fp {
    type Elem = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.0) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.0 - *b as u64) % self.0) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.0) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        ((self.0 - *a as u64) % self.0) as u32
    }
    fn inv(&self, a: &u32) -> u32 {
        // Fermat: a^(p-2)
        let (mut base, mut exp, mut acc) = (*a as u64, self.0 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            exp >>= 1;
        }
        acc as u32
    }
}

struct Qf;

impl Arith for Qf {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
}

fn mul_kernel<A: Arith>(ar: &A, a: &[A::Elem], b: &[A::Elem], n: usize, k: usize, m: usize) -> Vec<A::Elem> {
    let mut out = vec![ar.zero(); n * m];
    for i in 0..n {
        for l in 0..k {
            let x = &a[i * k + l];
            if ar.is_zero(x) {
                continue;
            }
            for j in 0..m {
                let y = &b[l * m + j];
                if !ar.is_zero(y) {
                    out[i * m + j] = ar.add(&out[i * m + j], &ar.mul(x, y));
                }
            }
        }
    }
    out
}

/// In-place reduced row echelon form; returns pivot columns.
fn rref_kernel<A: Arith>(ar: &A, data: &mut [A::Elem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !ar.is_zero(&data[i * cols + c])) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = ar.inv(&data[r * cols + c]);
        for j in c..cols {
            data[r * cols + j] = ar.mul(&data[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r || ar.is_zero(&data[i * cols + c]) {
                continue;
            }
            let factor = data[i * cols + c].clone();
            for j in c..cols {
                if !ar.is_zero(&data[r * cols + j]) {
                    let t = ar.mul(&factor, &data[r * cols + j]);
                    data[i * cols + j] = ar.sub(&data[i * cols + j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Data {
    Fp(Vec<u32>),
    Q(Vec<BigRational>),
}

/// A dense matrix acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Data,
}

macro_rules! with_arith {
    ($field:expr, $data:expr, |$ar:ident, $v:ident| $body:expr) => {
        match ($field, $data) {
            (Field::Prime(p), Data::Fp($v)) => {
                let $ar = Fp(p as u64);
                Data::Fp($body)
            }
            (Field::Rational, Data::Q($v)) => {
                let $ar = Qf;
                Data::Q($body)
            }
            _ => unreachable!("matrix data does not match its field"),
        }
    };
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}; {}x{}](", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, ")")
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = match field {
            Field::Prime(_) => Data::Fp(vec![0; rows * cols]),
            Field::Rational => Data::Q(vec![BigRational::zero(); rows * cols]),
        };
        Matrix { field, rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from integer rows, reducing into the field.
    pub fn from_int_rows(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, field.from_int(x));
            }
        }
        m
    }

    /// Builds a matrix from row-major scalars, checking length and field.
    pub fn from_scalars(field: Field, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut m = Matrix::zeros(field, rows, cols);
        for (k, s) in entries.into_iter().enumerate() {
            if !field.contains(&s) {
                return Err(Error::FieldMismatch);
            }
            m.set(k / cols.max(1), k % cols.max(1), s);
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.data {
            Data::Fp(v) => Scalar::Residue(v[i * self.cols + j]),
            Data::Q(v) => Scalar::Rational(v[i * self.cols + j].clone()),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let k = i * self.cols + j;
        match (&mut self.data, s) {
            (Data::Fp(v), Scalar::Residue(r)) => v[k] = r,
            (Data::Q(v), Scalar::Rational(q)) => v[k] = q,
            _ => panic!("scalar from a different field"),
        }
    }

    /// Row-major entries.
    pub fn entries(&self) -> Vec<Scalar> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Fp(v) => v.iter().all(|x| *x == 0),
            Data::Q(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    /// Entry at `(i, j)` as a small integer, when the field is `F_p`.
    pub fn residue(&self, i: usize, j: usize) -> Option<u32> {
        match &self.data {
            Data::Fp(v) => Some(v[i * self.cols + j]),
            Data::Q(_) => None,
        }
    }

    /// The checked product `self * rhs`.
    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let data = match (self.field, &self.data, &rhs.data) {
            (Field::Prime(p), Data::Fp(a), Data::Fp(b)) => Data::Fp(mul_kernel(&Fp(p as u64), a, b, n, k, m)),
            (Field::Rational, Data::Q(a), Data::Q(b)) => Data::Q(mul_kernel(&Qf, a, b, n, k, m)),
            _ => unreachable!(),
        };
        Ok(Matrix { field: self.field, rows: n, cols: m, data })
    }

    fn zip_with(&self, rhs: &Matrix, f_fp: impl Fn(&Fp, &u32, &u32) -> u32, f_q: impl Fn(&BigRational, &BigRational) -> BigRational) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        let data = match (self.field, &self.data, &rhs.data) {
            (Field::Prime(p), Data::Fp(a), Data::Fp(b)) => {
                let ar = Fp(p as u64);
                Data::Fp(a.iter().zip(b).map(|(x, y)| f_fp(&ar, x, y)).collect())
            }
            (Field::Rational, Data::Q(a), Data::Q(b)) => Data::Q(a.iter().zip(b).map(|(x, y)| f_q(x, y)).collect()),
            _ => unreachable!(),
        };
        Matrix { data, ..*self }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let data = match (self.field, &self.data, s) {
            (Field::Prime(p), Data::Fp(v), Scalar::Residue(r)) => {
                let ar = Fp(p as u64);
                Data::Fp(v.iter().map(|x| ar.mul(x, r)).collect())
            }
            (Field::Rational, Data::Q(v), Scalar::Rational(q)) => Data::Q(v.iter().map(|x| x * q).collect()),
            _ => panic!("scalar from a different field"),
        };
        Matrix { data, ..*self }
    }

    /// Multiplies by `(-1)^k`.
    pub fn signed(&self, k: i64) -> Matrix {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            -self
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut m = Matrix::zeros(self.field, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (b, &j) in cols.iter().enumerate() {
                m.set(i, b, self.get(i, j));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, rows.len(), self.cols);
        for (a, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j));
            }
        }
        m
    }

    pub fn hstack(field: Field, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let mut c = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            m.put(0, c, b);
            c += b.cols;
        }
        m
    }

    pub fn vstack(field: Field, cols: usize, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let mut r = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            m.put(r, 0, b);
            r += b.rows;
        }
        m
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            m.put(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        m
    }

    /// Kronecker product; row `(i, k)` sits at `i * rhs.rows + k`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch");
        let mut m = Matrix::zeros(self.field, self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                m.put(i * rhs.rows, j * rhs.cols, &rhs.scale(&a));
            }
        }
        m
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (rows, cols) = (self.rows, self.cols);
        let pivots;
        let data = with_arith!(self.field, self.data.clone(), |ar, v| {
            let mut v = v;
            pivots = rref_kernel(&ar, &mut v, rows, cols);
            v
        });
        (Matrix { data, ..*self }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns spanning the kernel: one column per free variable, in
    /// increasing column order, with a 1 at the free position.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (b, &j) in free.iter().enumerate() {
            k.set(j, b, self.field.one());
            for (row, &pc) in pivots.iter().enumerate() {
                let e = r.get(row, j);
                if !e.is_zero() {
                    k.set(pc, b, Self::neg_scalar(self.field, &e));
                }
            }
        }
        k
    }

    fn neg_scalar(field: Field, s: &Scalar) -> Scalar {
        match (field, s) {
            (Field::Prime(p), Scalar::Residue(r)) => Scalar::Residue(Fp(p as u64).neg(r)),
            (Field::Rational, Scalar::Rational(q)) => Scalar::Rational(-q),
            _ => panic!("scalar from a different field"),
        }
    }

    /// A solution `x` of `self * x = b` if one exists; free variables are set
    /// to zero, so the answer is the reduced-echelon particular solution.
    pub fn solve_right(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if self.field != b.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: {} rows against {} rows",
                self.rows, b.rows
            )));
        }
        let aug = Matrix::hstack(self.field, self.rows, &[self, b]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for k in 0..b.cols {
                x.set(pc, k, r.get(row, self.cols + k));
            }
        }
        Ok(Some(x))
    }

    /// Solves `self * x = b` when the caller already knows it is solvable.
    pub fn solve_known(&self, b: &Matrix) -> Matrix {
        self.solve_right(b)
            .expect("shape mismatch in solve")
            .expect("system expected to be solvable")
    }

    /// A full-row-rank projection `P` with `P * self = 0` whose kernel is
    /// exactly the column span of `self`; returns `(P, dim)`.
    pub fn cokernel(&self) -> (Matrix, usize) {
        let p = self.transpose().kernel_basis().transpose();
        let dim = p.rows;
        (p, dim)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = Matrix::identity(self.field, self.rows);
        match self.solve_right(&id) {
            Ok(Some(x)) if (self * &x) == id => Some(x),
            _ => None,
        }
    }

    /// Uniformly random entries for `F_p`; small integers or halves for `Q`.
    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let s = match field {
                    Field::Prime(p) => Scalar::Residue(rng.gen_range(0..p)),
                    Field::Rational => {
                        let n: i64 = rng.gen_range(-2..=2);
                        let d: i64 = rng.gen_range(1..=2);
                        Scalar::Rational(BigRational::new(n.into(), d.into()))
                    }
                };
                m.set(i, j, s);
            }
        }
        m
    }

    /// A random invertible matrix, by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(field, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |ar, a, b| ar.add(a, b), |a, b| a + b)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |ar, a, b| ar.sub(a, b), |a, b| a - b)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        let data = with_arith!(self.field, self.data.clone(), |ar, v| v.iter().map(|x| ar.neg(x)).collect());
        Matrix { data, ..*self }
    }
}
