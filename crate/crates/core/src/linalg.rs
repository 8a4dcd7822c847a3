//! Small dense matrices and exact Gaussian elimination.

use crate::ring::{Field, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<R> {
    n: usize,
    data: Vec<R>,
}

impl<R: Ring> Mat<R> {
    pub fn zero(n: usize) -> Self {
        Mat { n, data: vec![R::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.data[i * n + i] = R::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn plus(&self, o: &Self) -> Self {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn minus(&self, o: &Self) -> Self {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect() }
    }

    pub fn scale(&self, c: &R) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|a| a.times(c)).collect() }
    }

    pub fn negated(&self) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|a| a.negated()).collect() }
    }

    pub fn times(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Mat::<R>::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = &self.data[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[l * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j].add_to(&a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, o: &Self) -> Self {
        self.times(o).minus(&o.times(self))
    }

    pub fn trace(&self) -> R {
        let mut t = R::zero();
        for i in 0..self.n {
            t.add_to(self.get(i, i));
        }
        t
    }

    /// exp of a nilpotent matrix (the series is cut once powers vanish).
    pub fn exp_nilpotent(&self) -> Self {
        let mut acc = Mat::identity(self.n);
        let mut term = Mat::identity(self.n);
        for j in 1..=self.n {
            term = term.times(self).scale(&R::from_q(&crate::scalar::qf(1, j as i64)));
            if term.is_zero() {
                break;
            }
            acc = acc.plus(&term);
        }
        acc
    }

    /// log of a unipotent matrix.
    pub fn log_unipotent(&self) -> Self {
        let nmat = self.minus(&Mat::identity(self.n));
        let mut acc = Mat::zero(self.n);
        let mut term = Mat::identity(self.n);
        for j in 1..=self.n {
            term = term.times(&nmat);
            if term.is_zero() {
                break;
            }
            let c = crate::scalar::qf(if j % 2 == 1 { 1 } else { -1 }, j as i64);
            acc = acc.plus(&term.scale(&R::from_q(&c)));
        }
        acc
    }

    /// Inverse of a unipotent matrix via the finite geometric series.
    pub fn inv_unipotent(&self) -> Self {
        let nmat = Mat::identity(self.n).minus(self);
        let mut acc = Mat::identity(self.n);
        let mut term = Mat::identity(self.n);
        for _ in 0..self.n {
            term = term.times(&nmat);
            if term.is_zero() {
                break;
            }
            acc = acc.plus(&term);
        }
        acc
    }
}

/// Row-reduce in place; returns pivot columns.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.times(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.minus(&f.times(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Field>(rows: &[Vec<F>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}` where `A` is given by rows of length `ncols`.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = row[free].negated();
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = b`; `None` if inconsistent. Free variables are set to zero.
pub fn solve<F: Field>(rows: &[Vec<F>], rhs: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix given by rows.
pub fn invert<F: Field>(rows: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = rows.len();
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            for j in 0..n {
                r.push(if i == j { F::one() } else { F::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut m, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}
