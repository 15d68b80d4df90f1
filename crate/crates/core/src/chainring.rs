//! Arithmetic in the chain ring `Z/p^n` and linear algebra over it.
//!
//! Every ideal of `Z/p^n` is of the form `(p^k)`, so a matrix over it can be
//! brought into *Howell form*: a row echelon form whose pivots are powers of
//! `p`, whose entries above a pivot `p^k` lie in `[0, p^k)`, and which has the
//! extra property that for every pivot row, the rows below it span every
//! vector of the row span that vanishes up to and including that pivot column.
//! The Howell form is unique, so two row spans are equal exactly when their
//! Howell forms are.
//!
//! Row vectors act on the left: the kernel of `M` is `{v : vM = 0}`.

use std::fmt;

use crate::error::{Error, Result};

/// The ring `Z/p^n` for an odd prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PModulus {
    p: u64,
    n: u32,
    order: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PModulus {
    /// `p` must be an odd prime and `p^n` must fit in 32 bits.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModulus(format!("{p} is not prime")));
        }
        if p == 2 {
            return Err(Error::InvalidModulus("p must be odd".into()));
        }
        if n == 0 {
            return Err(Error::InvalidModulus("length must be at least 1".into()));
        }
        let order = p
            .checked_pow(n)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidModulus(format!("{p}^{n} does not fit in 32 bits")))?;
        Ok(PModulus { p, n, order })
    }

    /// The residue field `F_p`.
    pub fn field(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Same prime, different length.
    pub fn with_length(&self, n: u32) -> Result<Self> {
        Self::new(self.p, n)
    }

    pub fn p_pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    pub fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.order as i128) as u64
    }

    pub fn reduce_u64(&self, v: u64) -> u64 {
        v % self.order
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.order - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.order
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.order;
        a %= self.order;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Largest `v ≤ n` with `p^v | a`; zero has valuation `n`.
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.order;
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn inv_unit(&self, a: u64) -> Option<u64> {
        let a = a % self.order;
        if a % self.p == 0 {
            return None;
        }
        // extended Euclid on (a, p^n)
        let (mut r0, mut r1) = (self.order as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce(t0))
    }
}

impl fmt::Debug for PModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.n)
    }
}

impl fmt::Display for PModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An element of `Z/p^n`, stored by its canonical representative in `[0, p^n)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ZpnScalar {
    modulus: PModulus,
    value: u64,
}

/// The operations of [`ZpnScalar::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Negate,
    InvertUnit,
}

impl ZpnScalar {
    pub fn new(modulus: PModulus, value: i128) -> Self {
        ZpnScalar {
            modulus,
            value: modulus.reduce(value),
        }
    }

    pub fn zero(modulus: PModulus) -> Self {
        ZpnScalar { modulus, value: 0 }
    }

    pub fn one(modulus: PModulus) -> Self {
        ZpnScalar::new(modulus, 1)
    }

    pub fn modulus(&self) -> PModulus {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn valuation(&self) -> u32 {
        self.modulus.valuation(self.value)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    fn check(&self, other: &ZpnScalar) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: other.modulus.to_string(),
            });
        }
        Ok(())
    }

    /// Dispatches one of the basic operations; `other` is ignored by the
    /// unary ones.
    pub fn arith(&self, other: &ZpnScalar, op: ScalarOp) -> Result<ZpnScalar> {
        match op {
            ScalarOp::Add => self.checked_add(other),
            ScalarOp::Sub => self.checked_sub(other),
            ScalarOp::Mul => self.checked_mul(other),
            ScalarOp::Negate => Ok(-*self),
            ScalarOp::InvertUnit => self.invert(),
        }
    }

    pub fn checked_add(&self, other: &ZpnScalar) -> Result<ZpnScalar> {
        self.check(other)?;
        Ok(self.with(self.modulus.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &ZpnScalar) -> Result<ZpnScalar> {
        self.check(other)?;
        Ok(self.with(self.modulus.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &ZpnScalar) -> Result<ZpnScalar> {
        self.check(other)?;
        Ok(self.with(self.modulus.mul(self.value, other.value)))
    }

    pub fn invert(&self) -> Result<ZpnScalar> {
        self.modulus
            .inv_unit(self.value)
            .map(|v| self.with(v))
            .ok_or(Error::NotUnit(self.value))
    }

    /// Divides by `p^m`, landing in `Z/p^(n-m)`. Requires `valuation ≥ m` and `m < n`.
    pub fn exact_divide_by_p_power(&self, m: u32) -> Result<ZpnScalar> {
        let n = self.modulus.n;
        if m >= n {
            return Err(Error::LevelOutOfRange { level: m, max: n - 1 });
        }
        let v = self.valuation();
        if v < m {
            return Err(Error::InsufficientValuation {
                valuation: v,
                requested: m,
            });
        }
        let target = self.modulus.with_length(n - m)?;
        Ok(ZpnScalar {
            modulus: target,
            value: (self.value / self.modulus.p_pow(m)) % target.order,
        })
    }

    /// Image under `Z/p^n -> Z/p^m`.
    pub fn reduce_to(&self, m: u32) -> Result<ZpnScalar> {
        if m == 0 || m > self.modulus.n {
            return Err(Error::LevelOutOfRange {
                level: m,
                max: self.modulus.n,
            });
        }
        let target = self.modulus.with_length(m)?;
        Ok(ZpnScalar {
            modulus: target,
            value: self.value % target.order,
        })
    }

    fn with(&self, value: u64) -> ZpnScalar {
        ZpnScalar {
            modulus: self.modulus,
            value,
        }
    }
}

impl fmt::Display for ZpnScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr for ZpnScalar {
            type Output = ZpnScalar;
            /// Panics on a modulus mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: ZpnScalar) -> ZpnScalar {
                self.$checked(&rhs).expect("scalar modulus mismatch")
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for ZpnScalar {
    type Output = ZpnScalar;
    fn neg(self) -> ZpnScalar {
        self.with(self.modulus.neg(self.value))
    }
}

/// A dense matrix over `Z/p^n` with canonical entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZpnMatrix {
    modulus: PModulus,
    cols: usize,
    rows: Vec<Vec<u64>>,
}

/// Below this fill ratio [`ZpnMatrix::kernel`] splits the matrix into
/// independent blocks first.
pub const SPARSE_DENSITY: f64 = 0.10;

impl ZpnMatrix {
    pub fn zero(modulus: PModulus, rows: usize, cols: usize) -> Self {
        ZpnMatrix {
            modulus,
            cols,
            rows: vec![vec![0; cols]; rows],
        }
    }

    pub fn empty(modulus: PModulus, cols: usize) -> Self {
        ZpnMatrix {
            modulus,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn identity(modulus: PModulus, size: usize) -> Self {
        let mut m = Self::zero(modulus, size, size);
        for i in 0..size {
            m.rows[i][i] = 1 % modulus.order;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry.
    pub fn from_rows<R: AsRef<[i64]>>(modulus: PModulus, cols: usize, rows: &[R]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            out.push(r.iter().map(|&e| modulus.reduce(e as i128)).collect());
        }
        Ok(ZpnMatrix {
            modulus,
            cols,
            rows: out,
        })
    }

    /// Rows must already be canonical.
    pub fn from_raw_rows(modulus: PModulus, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.len() == cols && r.iter().all(|&e| e < modulus.order)));
        ZpnMatrix {
            modulus,
            cols,
            rows,
        }
    }

    pub fn modulus(&self) -> PModulus {
        self.modulus
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<u64>> {
        self.rows
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> ZpnScalar {
        ZpnScalar {
            modulus: self.modulus,
            value: self.rows[i][j],
        }
    }

    pub fn push_row(&mut self, row: Vec<u64>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&e| e == 0))
    }

    pub fn density(&self) -> f64 {
        let total = self.rows.len() * self.cols;
        if total == 0 {
            return 0.0;
        }
        let nz: usize = self
            .rows
            .iter()
            .map(|r| r.iter().filter(|&&e| e != 0).count())
            .sum();
        nz as f64 / total as f64
    }

    /// `v · M` for a row vector `v`.
    pub fn left_mul(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: v.len(),
            });
        }
        let md = self.modulus;
        let mut out = vec![0; self.cols];
        for (c, row) in v.iter().zip(&self.rows) {
            if *c == 0 {
                continue;
            }
            for (o, e) in out.iter_mut().zip(row) {
                *o = md.add(*o, md.mul(*c, *e));
            }
        }
        Ok(out)
    }

    /// Entrywise image in `Z/p^m`, `m ≤ n`.
    pub fn reduce_to(&self, m: u32) -> Result<ZpnMatrix> {
        if m == 0 || m > self.modulus.n {
            return Err(Error::LevelOutOfRange {
                level: m,
                max: self.modulus.n,
            });
        }
        let target = self.modulus.with_length(m)?;
        Ok(ZpnMatrix {
            modulus: target,
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&e| e % target.order).collect())
                .collect(),
        })
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_slice(&self, start: usize, end: usize) -> ZpnMatrix {
        ZpnMatrix {
            modulus: self.modulus,
            cols: end - start,
            rows: self.rows.iter().map(|r| r[start..end].to_vec()).collect(),
        }
    }

    /// Leading nonzero column of a row.
    pub fn pivot_of(row: &[u64]) -> Option<usize> {
        row.iter().position(|&e| e != 0)
    }

    /// The unique Howell basis of the row span.
    pub fn howell_form(&self) -> ZpnMatrix {
        howell(self.modulus, self.cols, self.rows.clone())
    }

    pub fn same_span(&self, other: &ZpnMatrix) -> bool {
        self.modulus == other.modulus
            && self.cols == other.cols
            && self.howell_form() == other.howell_form()
    }

    /// Howell basis of `{v : vM = 0}`.
    pub fn kernel(&self) -> ZpnMatrix {
        if self.density() < SPARSE_DENSITY && self.rows.len() > 1 {
            self.kernel_blockwise()
        } else {
            self.kernel_dense()
        }
    }

    fn kernel_dense(&self) -> ZpnMatrix {
        let nr = self.rows.len();
        let one = 1 % self.modulus.order;
        let aug: Vec<Vec<u64>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = r.clone();
                v.resize(self.cols + nr, 0);
                v[self.cols + i] = one;
                v
            })
            .collect();
        let h = howell(self.modulus, self.cols + nr, aug);
        let rows = h
            .rows
            .into_iter()
            .filter(|r| r[..self.cols].iter().all(|&e| e == 0))
            .map(|r| r[self.cols..].to_vec())
            .collect();
        howell(self.modulus, nr, rows)
    }

    /// Rows that share no column interact with nothing; the kernel is the
    /// direct sum of the kernels of the connected blocks.
    fn kernel_blockwise(&self) -> ZpnMatrix {
        let nr = self.rows.len();
        let mut parent: Vec<usize> = (0..nr).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, &e) in r.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match owner[j] {
                    None => owner[j] = Some(i),
                    Some(o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, i));
                        if a != b {
                            parent[a] = b;
                        }
                    }
                }
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..nr {
            let root = find(&mut parent, i);
            blocks.entry(root).or_default().push(i);
        }
        let mut out = Vec::new();
        for members in blocks.values() {
            let cols: Vec<usize> = (0..self.cols)
                .filter(|&j| members.iter().any(|&i| self.rows[i][j] != 0))
                .collect();
            let sub = ZpnMatrix {
                modulus: self.modulus,
                cols: cols.len(),
                rows: members
                    .iter()
                    .map(|&i| cols.iter().map(|&j| self.rows[i][j]).collect())
                    .collect(),
            };
            for k in sub.kernel_dense().rows {
                let mut full = vec![0; nr];
                for (local, &i) in members.iter().enumerate() {
                    full[i] = k[local];
                }
                out.push(full);
            }
        }
        howell(self.modulus, nr, out)
    }

    /// Decides whether `v` lies in the row span; on success returns
    /// coefficients `c` with `c · M = v`.
    pub fn in_row_span(&self, v: &[ZpnScalar]) -> Result<Option<Vec<ZpnScalar>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        for s in v {
            if s.modulus != self.modulus {
                return Err(Error::ModulusMismatch {
                    left: self.modulus.to_string(),
                    right: s.modulus.to_string(),
                });
            }
        }
        let raw: Vec<u64> = v.iter().map(|s| s.value).collect();
        Ok(self.certificate(&raw).map(|c| {
            c.into_iter()
                .map(|value| ZpnScalar {
                    modulus: self.modulus,
                    value,
                })
                .collect()
        }))
    }

    fn certificate(&self, v: &[u64]) -> Option<Vec<u64>> {
        let md = self.modulus;
        let nr = self.rows.len();
        let one = 1 % md.order;
        let aug: Vec<Vec<u64>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut w = r.clone();
                w.resize(self.cols + nr, 0);
                w[self.cols + i] = one;
                w
            })
            .collect();
        let h = howell(md, self.cols + nr, aug);
        let mut residual = v.to_vec();
        let mut cert = vec![0; nr];
        for row in &h.rows {
            let Some(c) = Self::pivot_of(row) else { continue };
            if c >= self.cols {
                break;
            }
            let e = residual[c];
            if e == 0 {
                continue;
            }
            let pivot = row[c];
            if e % pivot != 0 {
                return None;
            }
            let t = e / pivot;
            for j in c..self.cols {
                residual[j] = md.sub(residual[j], md.mul(t, row[j]));
            }
            for i in 0..nr {
                cert[i] = md.add(cert[i], md.mul(t, row[self.cols + i]));
            }
        }
        if residual.iter().any(|&e| e != 0) {
            return None;
        }
        debug_assert_eq!(self.left_mul(&cert).ok().as_deref(), Some(v));
        Some(cert)
    }

    /// Howell basis of the intersection of the two row spans.
    pub fn span_intersection(&self, other: &ZpnMatrix) -> Result<ZpnMatrix> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: other.modulus.to_string(),
            });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let c = self.cols;
        let mut aug = Vec::with_capacity(self.rows.len() + other.rows.len());
        for r in &self.rows {
            let mut w = r.clone();
            w.extend_from_slice(r);
            aug.push(w);
        }
        for r in &other.rows {
            let mut w = r.clone();
            w.resize(2 * c, 0);
            aug.push(w);
        }
        let h = howell(self.modulus, 2 * c, aug);
        let rows = h
            .rows
            .into_iter()
            .filter(|r| r[..c].iter().all(|&e| e == 0))
            .map(|r| r[c..].to_vec())
            .collect();
        Ok(howell(self.modulus, c, rows))
    }
}

/// Membership tests against a fixed Howell basis.
#[derive(Clone, Debug)]
pub struct HowellBasis {
    basis: ZpnMatrix,
}

impl HowellBasis {
    pub fn new(m: &ZpnMatrix) -> Self {
        HowellBasis {
            basis: m.howell_form(),
        }
    }

    pub fn matrix(&self) -> &ZpnMatrix {
        &self.basis
    }

    /// Sequential reduction; exact because of the Howell property.
    pub fn contains(&self, v: &[u64]) -> bool {
        let md = self.basis.modulus;
        let mut residual = v.to_vec();
        for row in &self.basis.rows {
            let c = ZpnMatrix::pivot_of(row).expect("Howell rows are nonzero");
            let e = residual[c];
            if e == 0 {
                continue;
            }
            if e % row[c] != 0 {
                return false;
            }
            let t = e / row[c];
            for j in c..residual.len() {
                residual[j] = md.sub(residual[j], md.mul(t, row[j]));
            }
        }
        residual.iter().all(|&e| e == 0)
    }
}

fn howell(md: PModulus, cols: usize, rows: Vec<Vec<u64>>) -> ZpnMatrix {
    let mut work: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|&e| e != 0))
        .collect();
    let mut out: Vec<Vec<u64>> = Vec::new();
    for col in 0..cols {
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| md.valuation(r[col]))
            .map(|(i, _)| i);
        let Some(idx) = best else { continue };
        let mut pivot = work.swap_remove(idx);
        let k = md.valuation(pivot[col]);
        let pk = md.p_pow(k);
        let unit = md.inv_unit(pivot[col] / pk).expect("unit part");
        if unit != 1 {
            for e in pivot[col..].iter_mut() {
                *e = md.mul(*e, unit);
            }
        }
        debug_assert_eq!(pivot[col], pk);
        for r in work.iter_mut() {
            let e = r[col];
            if e == 0 {
                continue;
            }
            let t = e / pk;
            for j in col..cols {
                r[j] = md.sub(r[j], md.mul(t, pivot[j]));
            }
        }
        work.retain(|r| r.iter().any(|&e| e != 0));
        if k > 0 {
            let s = md.p_pow(md.n - k);
            let extra: Vec<u64> = pivot.iter().map(|&e| md.mul(e, s)).collect();
            if extra.iter().any(|&e| e != 0) {
                work.push(extra);
            }
        }
        out.push(pivot);
    }
    debug_assert!(work.is_empty());
    let pivots: Vec<usize> = out
        .iter()
        .map(|r| ZpnMatrix::pivot_of(r).unwrap())
        .collect();
    for h in (0..out.len()).rev() {
        for i in h + 1..out.len() {
            let c = pivots[i];
            let pk = out[i][c];
            let t = out[h][c] / pk;
            if t == 0 {
                continue;
            }
            let (upper, lower) = out.split_at_mut(i);
            let target = &mut upper[h];
            for j in c..cols {
                target[j] = md.sub(target[j], md.mul(t, lower[0][j]));
            }
        }
    }
    ZpnMatrix {
        modulus: md,
        cols,
        rows: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn z9() -> PModulus {
        PModulus::new(3, 2).unwrap()
    }

    fn s(md: PModulus, v: i128) -> ZpnScalar {
        ZpnScalar::new(md, v)
    }

    /// Every vector in the row span, by enumerating all coefficient tuples.
    fn enumerate_span(m: &ZpnMatrix) -> BTreeSet<Vec<u64>> {
        let q = m.modulus().order();
        let nr = m.nrows();
        let mut out = BTreeSet::new();
        let mut coeffs = vec![0u64; nr];
        loop {
            out.insert(m.left_mul(&coeffs).unwrap());
            let mut i = 0;
            loop {
                if i == nr {
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    fn all_vectors(md: PModulus, len: usize) -> Vec<Vec<u64>> {
        let q = md.order();
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..q).map(move |e| {
                        let mut w = v.clone();
                        w.push(e);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn modulus_validation() {
        assert!(PModulus::new(2, 3).is_err());
        assert!(PModulus::new(9, 1).is_err());
        assert!(PModulus::new(3, 0).is_err());
        assert!(PModulus::new(7, 40).is_err());
        assert_eq!(PModulus::new(5, 3).unwrap().order(), 125);
    }

    #[test]
    fn scalar_examples() {
        let md = z9();
        assert_eq!((s(md, 4) + s(md, 7)).value(), 2);
        assert_eq!(s(md, 2).invert().unwrap().value(), 5);
        assert_eq!(s(md, 3).invert(), Err(Error::NotUnit(3)));
        assert_eq!(s(md, 0).valuation(), 2);
        assert_eq!(s(md, 6).valuation(), 1);
        let other = ZpnScalar::new(PModulus::new(3, 3).unwrap(), 1);
        assert!(matches!(
            s(md, 1).arith(&other, ScalarOp::Add),
            Err(Error::ModulusMismatch { .. })
        ));
        assert_eq!(s(md, 1).arith(&s(md, 0), ScalarOp::Negate).unwrap().value(), 8);
    }

    #[test]
    fn exact_division_examples() {
        let md = z9();
        let d = s(md, 6).exact_divide_by_p_power(1).unwrap();
        assert_eq!((d.value(), d.modulus()), (2, PModulus::new(3, 1).unwrap()));
        let md3 = PModulus::new(3, 3).unwrap();
        let d = s(md3, 9).exact_divide_by_p_power(2).unwrap();
        assert_eq!((d.value(), d.modulus().n()), (1, 1));
        assert!(matches!(
            s(md, 4).exact_divide_by_p_power(1),
            Err(Error::InsufficientValuation { valuation: 0, requested: 1 })
        ));
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for n in 1..=2 {
            let md = PModulus::new(3, n).unwrap();
            let q = md.order() as i128;
            let els: Vec<_> = (0..q).map(|v| s(md, v)).collect();
            for &a in &els {
                assert_eq!(a + ZpnScalar::zero(md), a);
                assert_eq!(a * ZpnScalar::one(md), a);
                assert_eq!(a + (-a), ZpnScalar::zero(md));
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!((a - b) + b, a);
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
                if a.is_unit() {
                    assert_eq!(a * a.invert().unwrap(), ZpnScalar::one(md));
                }
            }
        }
    }

    #[test]
    fn howell_examples() {
        let md = z9();
        let m = ZpnMatrix::from_rows(md, 2, &[[3, 0], [0, 3]]).unwrap();
        assert_eq!(m.howell_form(), m);
        let m = ZpnMatrix::from_rows(md, 2, &[[2, 0]]).unwrap();
        assert_eq!(m.howell_form(), ZpnMatrix::from_rows(md, 2, &[[1, 0]]).unwrap());

        let a = ZpnMatrix::from_rows(md, 2, &[[1, 1], [0, 3]]).unwrap();
        let b = ZpnMatrix::from_rows(md, 2, &[[1, 4], [0, 3]]).unwrap();
        // oracle: enumerate both spans
        assert_eq!(enumerate_span(&a), enumerate_span(&b));
        assert_eq!(a.howell_form(), b.howell_form());
    }

    #[test]
    fn howell_property_needs_extra_rows() {
        // [3, 1] alone: 3 * row = (0, 3) must appear in the basis
        let md = z9();
        let m = ZpnMatrix::from_rows(md, 2, &[[3, 1]]).unwrap();
        let h = m.howell_form();
        assert_eq!(h, ZpnMatrix::from_rows(md, 2, &[[3, 1], [0, 3]]).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let md = z9();
        let k = ZpnMatrix::from_rows(md, 1, &[[3]]).unwrap().kernel();
        assert_eq!(
            enumerate_span(&k),
            [0, 3, 6].iter().map(|&e| vec![e]).collect()
        );
        let k = ZpnMatrix::identity(md, 2).kernel();
        assert_eq!(k.nrows(), 0);

        let m = ZpnMatrix::from_rows(md, 1, &[[1], [3]]).unwrap();
        let brute: BTreeSet<Vec<u64>> = all_vectors(md, 2)
            .into_iter()
            .filter(|v| m.left_mul(v).unwrap() == vec![0])
            .collect();
        assert_eq!(brute.len(), 9);
        assert_eq!(enumerate_span(&m.kernel()), brute);
    }

    #[test]
    fn in_row_span_examples() {
        let md = z9();
        let m = ZpnMatrix::from_rows(md, 2, &[[3, 0]]).unwrap();
        let zero = [s(md, 0), s(md, 0)];
        assert!(m.in_row_span(&zero).unwrap().is_some());
        let cert = m.in_row_span(&[s(md, 6), s(md, 0)]).unwrap().unwrap();
        assert_eq!(cert[0].value() % 3, 2);
        assert_eq!(m.in_row_span(&[s(md, 1), s(md, 0)]).unwrap(), None);
        // every multiple c*(3,0) misses (1,0)
        assert!((0..9).all(|c| m.left_mul(&[c]).unwrap() != vec![1, 0]));
        assert!(matches!(
            m.in_row_span(&[s(md, 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn span_intersection_small() {
        let md = z9();
        let a = ZpnMatrix::from_rows(md, 2, &[[1, 0], [0, 3]]).unwrap();
        let b = ZpnMatrix::from_rows(md, 2, &[[1, 1]]).unwrap();
        let i = a.span_intersection(&b).unwrap();
        let sa = enumerate_span(&a);
        let expect: BTreeSet<_> = enumerate_span(&b).intersection(&sa).cloned().collect();
        assert_eq!(enumerate_span(&i), expect);
    }

    #[test]
    fn blockwise_kernel_matches_dense() {
        let md = z9();
        let mut m = ZpnMatrix::zero(md, 12, 12);
        m.rows[0][3] = 3;
        m.rows[1][3] = 1;
        m.rows[5][7] = 6;
        m.rows[9][9] = 2;
        assert!(m.density() < SPARSE_DENSITY);
        assert_eq!(m.kernel(), m.kernel_dense());
    }

    /// Every matrix over Z/9 with at most 2 rows and 2 columns.
    fn small_matrices() -> Vec<ZpnMatrix> {
        let md = z9();
        let mut out = Vec::new();
        for nr in 1..=2 {
            for nc in 1..=2 {
                for flat in all_vectors(md, nr * nc) {
                    let rows = flat.chunks(nc).map(|c| c.to_vec()).collect();
                    out.push(ZpnMatrix::from_raw_rows(md, nc, rows));
                }
            }
        }
        out
    }

    #[test]
    fn span_membership_agrees_with_enumeration() {
        let md = z9();
        for m in small_matrices() {
            let span = enumerate_span(&m);
            for v in all_vectors(md, m.ncols()) {
                let sv: Vec<_> = v.iter().map(|&e| s(md, e as i128)).collect();
                let got = m.in_row_span(&sv).unwrap();
                assert_eq!(got.is_some(), span.contains(&v), "{m:?} {v:?}");
                assert_eq!(HowellBasis::new(&m).contains(&v), span.contains(&v));
                if let Some(c) = got {
                    let raw: Vec<u64> = c.iter().map(|x| x.value()).collect();
                    assert_eq!(m.left_mul(&raw).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn kernel_cardinality_exhaustive() {
        // |ker| * |span| = q^rows, checked on every 2x2 and some 3x2 matrices
        let md = z9();
        for m in small_matrices() {
            let k = m.kernel();
            for r in k.rows() {
                assert!(m.left_mul(r).unwrap().iter().all(|&e| e == 0));
            }
            let ks = enumerate_span(&k).len() as u64;
            let ss = enumerate_span(&m).len() as u64;
            assert_eq!(ks * ss, md.order().pow(m.nrows() as u32));
        }
        let three_rows = [[1i64, 3], [3, 0], [6, 6]];
        let m = ZpnMatrix::from_rows(md, 2, &three_rows).unwrap();
        let ks = enumerate_span(&m.kernel()).len() as u64;
        let ss = enumerate_span(&m).len() as u64;
        assert_eq!(ks * ss, 729);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = ZpnMatrix> {
            (prop_oneof![Just(3u64), Just(5u64)], 1u32..=3, 1usize..=4, 1usize..=4)
                .prop_flat_map(|(p, n, r, c)| {
                    let md = PModulus::new(p, n).unwrap();
                    proptest::collection::vec(0..md.order(), r * c).prop_map(move |flat| {
                        ZpnMatrix::from_raw_rows(md, c, flat.chunks(c).map(|x| x.to_vec()).collect())
                    })
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn howell_is_idempotent(m in matrix()) {
                let h = m.howell_form();
                prop_assert_eq!(h.howell_form(), h.clone());
                for r in m.rows() {
                    prop_assert!(HowellBasis::new(&h).contains(r));
                }
            }

            #[test]
            fn kernel_rows_annihilate(m in matrix()) {
                for k in m.kernel().rows() {
                    prop_assert!(m.left_mul(k).unwrap().iter().all(|&e| e == 0));
                }
            }
        }
    }
}
