//! Dense linear algebra over an exact [`Field`].
//!
//! Vectors are plain `Vec<F::Elem>`; subspaces are handled through spanning
//! lists, reduced to echelon bases when needed.

use crate::field::Field;

pub type Vector<E> = Vec<E>;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let n = rows.len();
        Self { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    let mut m = Matrix::filled(n, n, f.zero());
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn mat_mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "dimension mismatch");
    let mut out = Matrix::filled(a.rows, b.cols, f.zero());
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.add(out.get(i, j), &f.mul(aik, b.get(k, j)));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(f: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vector<F::Elem> {
    assert_eq!(a.cols, v.len(), "dimension mismatch");
    (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(f.zero(), |acc, (x, y)| if f.is_zero(x) { acc } else { f.add(&acc, &f.mul(x, y)) })
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(piv) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else { continue };
        m.swap_rows(r, piv);
        let inv = f.inv(m.get(r, c));
        for j in c..m.cols {
            let v = f.mul(m.get(r, j), &inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r || f.is_zero(m.get(i, c)) {
                continue;
            }
            let factor = m.get(i, c).clone();
            for j in c..m.cols {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    let mut m = m.clone();
    rref(f, &mut m).len()
}

/// Basis of the null space `{x : m x = 0}`.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<Vector<F::Elem>> {
    let mut r = m.clone();
    let pivots = rref(f, &mut r);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); m.cols];
            v[fc] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, fc));
            }
            v
        })
        .collect()
}

/// Determinant by elimination.
pub fn det<F: Field>(f: &F, m: &Matrix<F::Elem>) -> F::Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let mut a = m.clone();
    let n = a.rows;
    let mut acc = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !f.is_zero(a.get(i, c))) else { return f.zero() };
        if piv != c {
            a.swap_rows(piv, c);
            acc = f.neg(&acc);
        }
        let p = a.get(c, c).clone();
        acc = f.mul(&acc, &p);
        let inv = f.inv(&p);
        for i in c + 1..n {
            if f.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = f.mul(a.get(i, c), &inv);
            for j in c..n {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(c, j)));
                a.set(i, j, v);
            }
        }
    }
    acc
}

/// Inverse of a square matrix; `None` when singular.
pub fn inverse<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert_eq!(m.rows, m.cols, "inverse of a non-square matrix");
    let n = m.rows;
    let mut aug = Matrix::filled(n, 2 * n, f.zero());
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, n + r, f.one());
    }
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let rows = (0..n).map(|r| aug.row(r)[n..].to_vec()).collect();
    Some(Matrix::from_rows(rows, n))
}

/// Echelon basis of the span of `vecs` (all of length `dim`).
pub fn span_basis<F: Field>(f: &F, vecs: &[Vector<F::Elem>], dim: usize) -> Vec<Vector<F::Elem>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_rows(vecs.to_vec(), dim);
    let k = rref(f, &mut m).len();
    (0..k).map(|r| m.row(r).to_vec()).collect()
}

pub fn span_dim<F: Field>(f: &F, vecs: &[Vector<F::Elem>], dim: usize) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    rank(f, &Matrix::from_rows(vecs.to_vec(), dim))
}

/// Basis of `span(a) ∩ span(b)`.
pub fn intersect<F: Field>(f: &F, a: &[Vector<F::Elem>], b: &[Vector<F::Elem>], dim: usize) -> Vec<Vector<F::Elem>> {
    let a = span_basis(f, a, dim);
    let b = span_basis(f, b, dim);
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve Σ x_i a_i = Σ y_j b_j: kernel of the dim × (|a|+|b|) matrix [A | −B].
    let cols = a.len() + b.len();
    let mut m = Matrix::filled(dim, cols, f.zero());
    for (i, v) in a.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            m.set(r, i, x.clone());
        }
    }
    for (j, v) in b.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            m.set(r, a.len() + j, f.neg(x));
        }
    }
    let ker = kernel(f, &m);
    let vecs: Vec<Vector<F::Elem>> = ker
        .iter()
        .map(|k| {
            let mut v = vec![f.zero(); dim];
            for (i, ai) in a.iter().enumerate() {
                if f.is_zero(&k[i]) {
                    continue;
                }
                for r in 0..dim {
                    v[r] = f.add(&v[r], &f.mul(&k[i], &ai[r]));
                }
            }
            v
        })
        .collect();
    span_basis(f, &vecs, dim)
}

/// Whether every vector of `sub` lies in `span(sup)`.
pub fn is_subspace<F: Field>(f: &F, sub: &[Vector<F::Elem>], sup: &[Vector<F::Elem>], dim: usize) -> bool {
    let base = span_dim(f, sup, dim);
    let mut all = sup.to_vec();
    all.extend(sub.iter().cloned());
    span_dim(f, &all, dim) == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{EisensteinExt, RationalField};
    use crate::rational::int;

    fn q(rows: &[&[i64]]) -> Matrix<crate::Rational> {
        let cols = rows[0].len();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(), cols)
    }

    #[test]
    fn rank_kernel_det() {
        let f = RationalField;
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&f, &m), 2);
        let ker = kernel(&f, &m);
        assert_eq!(ker.len(), 1);
        assert!(mat_vec(&f, &m, &ker[0]).iter().all(|x| *x == int(0)));
        assert_eq!(det(&f, &q(&[&[0, 3], &[1, 0]])), int(-3));
        assert_eq!(det(&f, &m), int(0));
        let a = q(&[&[2, 1], &[1, 1]]);
        assert_eq!(mat_mul(&f, &a, &inverse(&f, &a).unwrap()), identity(&f, 2));
        assert!(inverse(&f, &m).is_none());
    }

    #[test]
    fn intersections() {
        let f = RationalField;
        let a = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        let b = vec![vec![int(0), int(1), int(1)], vec![int(0), int(0), int(1)]];
        let i = intersect(&f, &a, &b, 3);
        assert_eq!(i, vec![vec![int(0), int(1), int(0)]]);
        assert!(is_subspace(&f, &i, &a, 3));
    }

    #[test]
    fn eigenvectors_over_sqrt_p() {
        // π: e1 ↦ e2, e2 ↦ p e1 has eigenvalues ±√p over Q(√p).
        let k = EisensteinExt::sqrt_p(3).unwrap();
        let w = k.uniformizer();
        let pi = Matrix::from_rows(vec![vec![k.zero(), k.from_rational(&int(3))], vec![k.one(), k.zero()]], 2);
        let mut shifted = pi.clone();
        for i in 0..2 {
            let v = k.sub(shifted.get(i, i), &w);
            shifted.set(i, i, v);
        }
        let ker = kernel(&k, &shifted);
        assert_eq!(ker.len(), 1);
        let image = mat_vec(&k, &pi, &ker[0]);
        let scaled: Vec<_> = ker[0].iter().map(|x| k.mul(x, &w)).collect();
        assert_eq!(image, scaled);
    }
}
