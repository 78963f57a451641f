//! Dense matrices over a [`Field`].

use super::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![e; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, e: E) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Matrix<F::E> {
    Matrix::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::E> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn mul<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    assert_eq!(a.cols, b.rows);
    let mut c = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if !f.is_zero(y) {
                    let v = f.add(c.get(i, j), &f.mul(x, y));
                    c.set(i, j, v);
                }
            }
        }
    }
    c
}

pub fn add<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| f.add(x, y))
            .collect(),
    }
}

pub fn sub<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| f.sub(x, y))
            .collect(),
    }
}

pub fn scale<F: Field>(f: &F, s: &F::E, a: &Matrix<F::E>) -> Matrix<F::E> {
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|x| f.mul(s, x)).collect(),
    }
}

pub fn kron<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    let mut c = zeros(f, a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a.get(i, j);
            if f.is_zero(x) {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    c.set(i * b.rows + k, j * b.cols + l, f.mul(x, b.get(k, l)));
                }
            }
        }
    }
    c
}

pub fn is_zero<F: Field>(f: &F, a: &Matrix<F::E>) -> bool {
    a.data.iter().all(|x| f.is_zero(x))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(f: &F, a: &mut Matrix<F::E>) -> Vec<usize> {
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
        for j in c..cols {
            let v = f.mul(&inv, a.get(r, j));
            a.set(r, j, v);
        }
        let prow: Vec<F::E> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            let base = i * cols + c;
            for (k, pv) in prow.iter().enumerate() {
                if !f.is_zero(pv) {
                    let v = f.sub(&a.data[base + k], &f.mul(&factor, pv));
                    a.data[base + k] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination only.
pub fn rank<F: Field>(f: &F, a: &Matrix<F::E>) -> usize {
    let mut a = a.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
        let prow: Vec<F::E> = a.row(r)[c..].iter().map(|x| f.mul(&inv, x)).collect();
        for i in r + 1..rows {
            let factor = a.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            let base = i * cols + c;
            for (k, pv) in prow.iter().enumerate() {
                if !f.is_zero(pv) {
                    let v = f.sub(&a.data[base + k], &f.mul(&factor, pv));
                    a.data[base + k] = v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right kernel, as the columns of the returned matrix.
pub fn kernel<F: Field>(f: &F, a: &Matrix<F::E>) -> Matrix<F::E> {
    let mut r = a.clone();
    let pivots = rref(f, &mut r);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = zeros(f, a.cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k.set(fc, j, f.one());
        for (i, &pc) in pivots.iter().enumerate() {
            k.set(pc, j, f.neg(r.get(i, fc)));
        }
    }
    k
}

/// A basis of the column space: the pivot columns of `a`.
pub fn column_basis<F: Field>(f: &F, a: &Matrix<F::E>) -> Matrix<F::E> {
    let mut r = a.clone();
    let pivots = rref(f, &mut r);
    a.columns(&pivots)
}
