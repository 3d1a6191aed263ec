//! Dense exact linear algebra over a prime field `F_p`.
//!
//! Matrices act on column vectors. Every routine is deterministic; kernel and
//! image bases come out in a canonical order determined by the reduced row
//! echelon form.

use std::fmt;

/// Default characteristic.
pub const DEFAULT_P: u32 = 32003;

#[inline]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1u32 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse; panics on zero.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a, p as u64 - 2, p)
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returned by [`Matrix::solve`] when the right-hand side is not in the image.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent linear system")]
pub struct Inconsistent;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} mod {}]", self.rows, self.cols, self.p)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Matrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Build from row-major signed entries, reducing mod `p`.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(p, nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * ncols + j] = reduce(x, p);
            }
        }
        m
    }

    /// Build from row-major residues already in `[0, p)`.
    pub fn from_vec(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| x < p));
        Matrix {
            p,
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * m.cols + j] = c[i];
            }
        }
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        debug_assert!(v < self.p);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `self · other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let p = self.p;
        let mut out = Matrix::zeros(p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        // Accumulate without reducing until the sum could overflow.
        let bound = u64::MAX - (p as u64 - 1) * (p as u64 - 1);
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot += a * b as u64;
                    if *slot > bound {
                        *slot %= p as u64;
                    }
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (a % p as u64) as u32;
            }
        }
        out
    }

    /// Alias of [`Matrix::mul`] reading as map composition `self ∘ other`.
    pub fn compose(&self, other: &Matrix) -> Matrix {
        self.mul(other)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let mut s = 0u64;
                for (a, b) in self.row(i).iter().zip(v) {
                    s = (s + *a as u64 * *b as u64) % p;
                }
                s as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| add_mod(a, b, p))
            .collect();
        Matrix::from_vec(p, self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| sub_mod(a, b, p))
            .collect();
        Matrix::from_vec(p, self.rows, self.cols, data)
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let p = self.p;
        let data = self.data.iter().map(|&a| mul_mod(a, c, p)).collect();
        Matrix::from_vec(p, self.rows, self.cols, data)
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.p - 1)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.p, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            m.data[i * m.cols..i * m.cols + self.cols].copy_from_slice(self.row(i));
            m.data[i * m.cols + self.cols..(i + 1) * m.cols].copy_from_slice(other.row(i));
        }
        m
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::from_vec(self.p, self.rows + other.rows, self.cols, data)
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.p, self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.p, rows, cols);
        for i in 0..rows {
            let src = (r0 + i) * self.cols + c0;
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&self.data[src..src + cols]);
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.p, self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = self.data[i * self.cols + j];
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_vec(self.p, idx.len(), self.cols, data)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c], p);
            if inv != 1 {
                for j in c..cols {
                    let x = &mut self.data[r * cols + j];
                    *x = mul_mod(*x, inv, p);
                }
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (prow, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u32]| {
                let f = row[c];
                if f == 0 {
                    return;
                }
                let nf = (p - f) as u64;
                for j in c..cols {
                    let b = prow[j];
                    if b != 0 {
                        row[j] = ((row[j] as u64 + nf * b as u64) % p as u64) as u32;
                    }
                }
            };
            for row in before.chunks_mut(cols) {
                eliminate(row);
            }
            for row in after.chunks_mut(cols) {
                eliminate(row);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns form a basis of the null space, one per free column of the rref,
    /// with a 1 in that free position.
    pub fn kernel_basis(&self) -> Matrix {
        self.kernel_with_free().0
    }

    /// Kernel basis together with its free columns: restricted to those rows
    /// the basis is the identity, so kernel coordinates of a null vector are
    /// read off at the free positions.
    pub fn kernel_with_free(&self) -> (Matrix, Vec<usize>) {
        let (rr, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Matrix::zeros(self.p, self.cols, free.len());
        for (t, &f) in free.iter().enumerate() {
            k.set(f, t, 1 % self.p);
            for (i, &pc) in pivots.iter().enumerate() {
                let v = rr.get(i, f);
                if v != 0 {
                    k.set(pc, t, neg_mod(v, self.p));
                }
            }
        }
        (k, free)
    }

    /// The pivot columns of `self`: a basis of the column space drawn from the
    /// original columns.
    pub fn image_basis(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// One solution of `self · x = b`.
    pub fn solve(&self, b: &[u32]) -> Result<Vec<u32>, Inconsistent> {
        assert_eq!(b.len(), self.rows);
        let bm = Matrix::from_columns(self.p, self.rows, &[b.to_vec()]);
        self.solve_matrix(&bm).map(|x| x.column(0))
    }

    /// One solution `X` of `self · X = b` (all columns at once).
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix, Inconsistent> {
        assert_eq!(b.rows, self.rows);
        let aug = self.hstack(b);
        let (rr, pivots) = aug.rref();
        let mut x = Matrix::zeros(self.p, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            if pc >= self.cols {
                return Err(Inconsistent);
            }
            for j in 0..b.cols {
                x.set(pc, j, rr.get(i, self.cols + j));
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve_matrix(&Matrix::identity(self.p, self.rows)).ok()?;
        if self.mul(&x) == Matrix::identity(self.p, self.rows) {
            Some(x)
        } else {
            None
        }
    }

    /// Indices of standard basis vectors that extend the column space of
    /// `self` to the whole ambient space.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        let (_, pivots) = self.transpose().rref();
        let mut is_pivot = vec![false; self.rows];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.rows).filter(|&i| !is_pivot[i]).collect()
    }

    /// Whether every column of `other` lies in the column space of `self`.
    pub fn spans(&self, other: &Matrix) -> bool {
        self.solve_matrix(other).is_ok()
    }
}

/// Basis (as columns) of the intersection of two column spaces in the same
/// ambient space.
pub fn intersect_columns(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows(), b.rows());
    let p = a.p();
    if a.cols() == 0 || b.cols() == 0 {
        return Matrix::zeros(p, a.rows(), 0);
    }
    let k = a.hstack(&b.neg()).kernel_basis();
    let coeffs = k.block(0, 0, a.cols(), k.cols());
    a.mul(&coeffs).image_basis()
}

/// Basis of the sum of two column spaces.
pub fn sum_columns(a: &Matrix, b: &Matrix) -> Matrix {
    a.hstack(b).image_basis()
}

/// Whether two column spaces coincide.
pub fn same_span(a: &Matrix, b: &Matrix) -> bool {
    let ra = a.rank();
    ra == b.rank() && ra == a.hstack(b).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u32, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let id = Matrix::identity(7, 2);
        let (r, piv) = id.rref();
        assert_eq!(r, id);
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one_mod_five() {
        let (r, piv) = m(5, &[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r, m(5, &[&[1, 2], &[0, 0]]));
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn rref_empty() {
        let z = Matrix::zeros(7, 0, 3);
        let (r, piv) = z.rref();
        assert_eq!(r, z);
        assert!(piv.is_empty());
        assert_eq!(z.kernel_basis().cols(), 3);
    }

    #[test]
    fn kernels() {
        assert_eq!(Matrix::identity(7, 3).kernel_basis().cols(), 0);
        assert_eq!(Matrix::zeros(7, 2, 3).kernel_basis().cols(), 3);
        let k = m(3, &[&[1, 1]]).kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![2, 1]);
    }

    #[test]
    fn solves() {
        assert_eq!(Matrix::zeros(7, 2, 2).solve(&[0, 0]).unwrap(), vec![0, 0]);
        let x = m(7, &[&[1, 0]]).solve(&[1]).unwrap();
        assert_eq!(x, vec![1, 0]);
        assert_eq!(m(7, &[&[1, 0], &[2, 0]]).solve(&[1, 1]), Err(Inconsistent));
        assert_eq!(Matrix::identity(5, 3).image_basis(), Matrix::identity(5, 3));
    }

    #[test]
    fn inverse_and_direct_sum() {
        let a = m(11, &[&[2, 1], &[1, 1]]);
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), Matrix::identity(11, 2));
        let s = a.direct_sum(&Matrix::identity(11, 1));
        assert_eq!(s.rows(), 3);
        assert_eq!(s.get(2, 2), 1);
        assert_eq!(s.get(0, 2), 0);
        assert!(m(11, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn subspace_operations() {
        let p = 13;
        let a = m(p, &[&[1, 0], &[0, 1], &[0, 0]]);
        let b = m(p, &[&[0, 0], &[1, 0], &[0, 1]]);
        let i = intersect_columns(&a, &b);
        assert_eq!(i.cols(), 1);
        assert!(same_span(&i, &m(p, &[&[0], &[1], &[0]])));
        assert_eq!(sum_columns(&a, &b).cols(), 3);
        assert_eq!(a.complement_coordinates(), vec![2]);
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (0usize..7, 0usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u32..5, r * c)
                .prop_map(move |d| Matrix::from_vec(5, r, c, d))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 200, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

        #[test]
        fn rank_nullity(a in arb_matrix()) {
            prop_assert_eq!(a.cols(), a.rank() + a.kernel_basis().cols());
        }

        #[test]
        fn kernel_is_annihilated(a in arb_matrix()) {
            let k = a.kernel_basis();
            prop_assert!(a.mul(&k).is_zero());
            prop_assert_eq!(k.rank(), k.cols());
        }

        #[test]
        fn rref_idempotent(a in arb_matrix()) {
            let (r, _) = a.rref();
            prop_assert_eq!(r.rref().0, r);
        }

        #[test]
        fn solve_recovers_image(a in arb_matrix(), seed in 0u32..1000) {
            let x: Vec<u32> = (0..a.cols()).map(|j| (seed + j as u32 * 3) % 5).collect();
            let b = a.mul_vec(&x);
            let y = a.solve(&b).unwrap();
            prop_assert_eq!(a.mul_vec(&y), b);
        }
    }
}
