//! Small dense complex linear algebra for the Dirac block machinery.
//!
//! Every matrix in the crate is at most 4 x 4 (spinor dimension
//! `2^floor((d+1)/2)` for d = 2, 3), so vectors and matrices are stored
//! inline with a runtime dimension and are `Copy`. Indexing is row
//! major. Dimension mismatches are programming errors and panic.

use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Largest supported vector/matrix dimension.
pub const MAX_DIM: usize = 4;

/// Shorthand for a real complex scalar.
#[inline]
pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Shorthand for a purely imaginary complex scalar.
#[inline]
pub fn ci(y: f64) -> C64 {
    C64::new(0.0, y)
}

/// Complex vector of dimension 1..=4.
#[derive(Clone, Copy, Debug)]
pub struct CVec {
    n: usize,
    a: [C64; MAX_DIM],
}

impl CVec {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n}");
        CVec { n, a: [C64::ZERO; MAX_DIM] }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        assert!(i < n);
        v.a[i] = cr(1.0);
        v
    }

    pub fn from_slice(xs: &[C64]) -> Self {
        let mut v = Self::zero(xs.len());
        v.a[..xs.len()].copy_from_slice(xs);
        v
    }

    pub fn from_real(xs: &[f64]) -> Self {
        let mut v = Self::zero(xs.len());
        for (slot, &x) in v.a.iter_mut().zip(xs) {
            *slot = cr(x);
        }
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.a[..self.n]
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for x in out.a[..out.n].iter_mut() {
            *x *= c;
        }
        out
    }

    /// Inner product, conjugate linear in `self`.
    pub fn dot(&self, other: &CVec) -> C64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut acc = C64::ZERO;
        for i in 0..self.n {
            acc += self.a[i].conj() * other.a[i];
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.a[..self.n].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction. Panics on the zero vector.
    pub fn normalize(&self) -> Self {
        let norm = self.norm();
        assert!(norm > 0.0, "cannot normalize the zero vector");
        self.scale(cr(1.0 / norm))
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for x in out.a[..out.n].iter_mut() {
            *x = x.conj();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a[..self.n].iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl std::ops::Index<usize> for CVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        assert!(i < self.n);
        &self.a[i]
    }
}

impl std::ops::IndexMut<usize> for CVec {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        assert!(i < self.n);
        &mut self.a[i]
    }
}

impl std::ops::Add for CVec {
    type Output = CVec;
    fn add(self, rhs: CVec) -> CVec {
        assert_eq!(self.n, rhs.n);
        let mut out = self;
        for i in 0..out.n {
            out.a[i] += rhs.a[i];
        }
        out
    }
}

impl std::ops::Sub for CVec {
    type Output = CVec;
    fn sub(self, rhs: CVec) -> CVec {
        assert_eq!(self.n, rhs.n);
        let mut out = self;
        for i in 0..out.n {
            out.a[i] -= rhs.a[i];
        }
        out
    }
}

/// Complex square matrix of dimension 1..=4, row major.
#[derive(Clone, Copy, Debug)]
pub struct CMat {
    n: usize,
    a: [[C64; MAX_DIM]; MAX_DIM],
}

impl CMat {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n}");
        CMat { n, a: [[C64::ZERO; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.a[i][i] = cr(1.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i][j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have length `n`.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} length");
            m.a[i][..n].copy_from_slice(row);
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "row {i} length");
            cr(rows[i][j])
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[CVec]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(cols[j].dim(), n, "column {j} dimension");
            cols[j][i]
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn col(&self, j: usize) -> CVec {
        assert!(j < self.n);
        let mut v = CVec::zero(self.n);
        for i in 0..self.n {
            v[i] = self.a[i][j];
        }
        v
    }

    pub fn row(&self, i: usize) -> CVec {
        assert!(i < self.n);
        CVec::from_slice(&self.a[i][..self.n])
    }

    pub fn set_col(&mut self, j: usize, v: &CVec) {
        assert!(j < self.n && v.dim() == self.n);
        for i in 0..self.n {
            self.a[i][j] = v[i];
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for row in out.a[..out.n].iter_mut() {
            for x in row[..out.n].iter_mut() {
                *x *= c;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.a[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.a[i][j].conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.a[j][i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += self.a[i][j].norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].norm());
            }
        }
        m
    }

    /// Largest entry of `M - M^dagger`; zero for Hermitian matrices.
    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// Largest entry of `M^dagger M - I`; zero for unitary matrices.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self - CMat::identity(self.n)).max_abs()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.n && j < self.n);
        &self.a[i][j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.n && j < self.n);
        &mut self.a[i][j]
    }
}

impl std::ops::Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        CMat::from_fn(self.n, |i, j| self.a[i][j] + rhs.a[i][j])
    }
}

impl std::ops::Sub for CMat {
    type Output = CMat;
    fn sub(self, rhs: CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        CMat::from_fn(self.n, |i, j| self.a[i][j] - rhs.a[i][j])
    }
}

impl std::ops::Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat::from_fn(self.n, |i, j| -self.a[i][j])
    }
}

impl std::ops::Mul for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = CMat::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let lik = self.a[i][k];
                if lik == C64::ZERO {
                    continue;
                }
                for j in 0..self.n {
                    out.a[i][j] += lik * rhs.a[k][j];
                }
            }
        }
        out
    }
}

impl std::ops::Mul<CVec> for CMat {
    type Output = CVec;
    fn mul(self, rhs: CVec) -> CVec {
        assert_eq!(self.n, rhs.dim(), "dimension mismatch");
        let mut out = CVec::zero(self.n);
        for i in 0..self.n {
            let mut acc = C64::ZERO;
            for j in 0..self.n {
                acc += self.a[i][j] * rhs[j];
            }
            out[i] = acc;
        }
        out
    }
}

/// Pauli matrix `sigma_j`, j in {1, 2, 3}.
pub fn pauli(j: usize) -> CMat {
    match j {
        1 => CMat::from_rows(&[&[C64::ZERO, cr(1.0)], &[cr(1.0), C64::ZERO]]),
        2 => CMat::from_rows(&[&[C64::ZERO, ci(-1.0)], &[ci(1.0), C64::ZERO]]),
        3 => CMat::from_rows(&[&[cr(1.0), C64::ZERO], &[C64::ZERO, cr(-1.0)]]),
        _ => panic!("pauli index {j} not in 1..=3"),
    }
}

/// Kronecker product of two 2 x 2 matrices, yielding a 4 x 4 matrix in
/// the basis ordering `e1 = a1 (x) b1, e2 = a1 (x) b2, e3 = a2 (x) b1,
/// e4 = a2 (x) b2`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.dim(), 2);
    assert_eq!(b.dim(), 2);
    CMat::from_fn(4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `ab + ba`.
pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    *a * *b + *b * *a
}

/// Orthonormalizes the given vectors by the modified Gram-Schmidt
/// process; vectors falling below `1e-12` of their original norm after
/// projection are dropped.
pub fn gram_schmidt(vectors: &[CVec]) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = *v;
        for b in &basis {
            let c = b.dot(&w);
            w = w - b.scale(c);
        }
        if w.norm() > 1e-12 * v.norm().max(1.0) {
            basis.push(w.normalize());
        }
    }
    basis
}
