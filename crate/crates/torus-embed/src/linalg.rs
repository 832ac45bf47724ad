//! Small dense matrices and symmetric eigenvalue routines.
//!
//! Everything here is sized for the low dimensions this crate works in
//! (n ≤ 3 domains, ambient dimensions in the tens). Eigenvalues of symmetric
//! matrices use closed forms for n ∈ {1, 2} and cyclic Jacobi sweeps above.

use crate::scalar::{real, Real};

/// Dense row-major matrix; used for Jacobians and holonomy actions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j]))
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn frob_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Gram matrix JᵀJ; symmetric by construction since only the upper
    /// triangle is computed.
    pub fn gram(&self) -> SymMat<T> {
        let n = self.cols;
        let mut g = SymMat::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for k in 0..self.rows {
                    acc += self.get(k, i) * self.get(k, j);
                }
                g.set(i, j, acc);
            }
        }
        g
    }
}

/// Symmetric matrix stored as its upper triangle (row-major), so evaluated
/// values are symmetric exactly, not just up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat<T> {
    n: usize,
    upper: Vec<T>,
}

impl<T: Real> SymMat<T> {
    pub fn zeros(n: usize) -> Self {
        SymMat { n, upper: vec![T::zero(); n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diag(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from the upper triangle in row-major order
    /// (length n(n+1)/2: rows i, columns j ≥ i).
    pub fn from_upper(n: usize, upper: Vec<T>) -> Self {
        assert_eq!(upper.len(), n * (n + 1) / 2, "upper triangle length");
        SymMat { n, upper }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.upper[k] = v;
    }

    pub fn add_scaled_identity(&self, s: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i, m.get(i, i) + s);
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        SymMat {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Frobenius norm (off-diagonal entries counted twice).
    pub fn frob_norm(&self) -> T {
        let two = real::<T>(2.0);
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                acc += if i == j { v * v } else { two * v * v };
            }
        }
        acc.sqrt()
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// Congruence AᵀMA with an integer matrix A (row-major, n×n); this is how
    /// a holonomy part acts on metric values.
    pub fn congruence_int(&self, a: &[i64]) -> SymMat<T> {
        let n = self.n;
        assert_eq!(a.len(), n * n, "holonomy size");
        let at = |i: usize, j: usize| real::<T>(a[i * n + j] as f64);
        let mut out = SymMat::zeros(n);
        for p in 0..n {
            for q in p..n {
                let mut acc = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += at(i, p) * self.get(i, j) * at(j, q);
                    }
                }
                out.set(p, q, acc);
            }
        }
        out
    }

    /// Eigenvalues sorted ascending. Closed form for n ≤ 2, cyclic Jacobi
    /// sweeps otherwise (relative off-diagonal tolerance 1e-12, floored at a
    /// few machine epsilons for narrow scalar types).
    pub fn eigenvalues(&self) -> Vec<T> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.get(0, 0)],
            2 => {
                let a = self.get(0, 0);
                let c = self.get(1, 1);
                let b = self.get(0, 1);
                let half = real::<T>(0.5);
                let mean = (a + c) * half;
                let r = ((a - c) * half * (a - c) * half + b * b).sqrt();
                vec![mean - r, mean + r]
            }
            _ => jacobi_eigenvalues(self),
        }
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()
            .into_iter()
            .fold(T::infinity(), T::min)
    }
}

fn jacobi_eigenvalues<T: Real>(m: &SymMat<T>) -> Vec<T> {
    let n = m.n();
    let mut a = m.to_dense();
    let tol = real::<T>(1e-12).max(T::epsilon() * real::<T>(8.0));
    let scale = m.frob_norm().max(T::min_positive_value());

    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (real::<T>(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }

    let mut eigen: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
    eigen.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigen
}
