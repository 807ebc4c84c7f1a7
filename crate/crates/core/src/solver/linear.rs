use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Accepted backward error of a solve, relative to the right-hand side.
pub const SOLVE_RTOL: f64 = 1e-10;

/// Square matrix in coordinate form.
///
/// Entries are kept in insertion order; callers that reuse a sparsity
/// pattern across solves push the same `(row, col)` sequence every time.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        SparseMatrix {
            n,
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        SparseMatrix {
            n,
            rows: Vec::with_capacity(nnz),
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::with_capacity(n, n);
        for i in 0..n {
            m.push(i, i, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Adds an entry. Each `(row, col)` may appear once.
    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(val);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    /// Multiplies row `i` by `row_scale[i]` and column `j` by `col_scale[j]`.
    pub fn scale(&mut self, row_scale: &[f64], col_scale: &[f64]) {
        for k in 0..self.vals.len() {
            self.vals[k] *= row_scale[self.rows[k]] * col_scale[self.cols[k]];
        }
    }

    /// Puts a unit diagonal on columns without any nonzero entry, so the
    /// corresponding unknowns stay at zero.
    pub fn fix_empty_columns(&mut self) -> usize {
        let mut used = vec![false; self.n];
        for (_, c, v) in self.entries() {
            used[c] |= v != 0.0;
        }
        let mut fixed = 0;
        for k in 0..self.vals.len() {
            if self.rows[k] == self.cols[k] && !used[self.cols[k]] {
                self.vals[k] = 1.0;
                fixed += 1;
            }
        }
        fixed
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
        }
        y
    }

    /// `(lower, upper)` bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.entries().fold((0, 0), |(kl, ku), (r, c, _)| {
            (kl.max(r.saturating_sub(c)), ku.max(c.saturating_sub(r)))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, c, v) in self.entries() {
            d[r][c] += v;
        }
        d
    }

    fn same_pattern(&self, rows: &[usize], cols: &[usize]) -> bool {
        self.rows == rows && self.cols == cols
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gaussian elimination with partial pivoting on a band matrix.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns
/// hold fill produced by row interchanges.
pub fn banded_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    let (kl, ku) = a.bandwidths();
    let w = 2 * kl + ku + 1;
    let mut ab = vec![0.0; n * w];
    let at = |i: usize, j: usize| i * w + (j + kl - i);
    for (r, c, v) in a.entries() {
        ab[at(r, c)] += v;
    }
    let mut x = b.to_vec();
    let reach = kl + ku;

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + reach).min(n - 1);
        let mut p = k;
        let mut best = ab[at(k, k)].abs();
        for i in k + 1..=last_row {
            let v = ab[at(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !(best > 0.0) || !best.is_finite() {
            return Err(Error::SingularMatrix(format!("zero pivot in column {k}")));
        }
        if p != k {
            for j in k..=last_col {
                ab.swap(at(k, j), at(p, j));
            }
            x.swap(k, p);
        }
        let pivot = ab[at(k, k)];
        for i in k + 1..=last_row {
            let l = ab[at(i, k)] / pivot;
            if l == 0.0 {
                continue;
            }
            ab[at(i, k)] = 0.0;
            for j in k + 1..=last_col {
                ab[at(i, j)] -= l * ab[at(k, j)];
            }
            x[i] -= l * x[k];
        }
    }
    for k in (0..n).rev() {
        let last_col = (k + reach).min(n - 1);
        let mut s = x[k];
        for j in k + 1..=last_col {
            s -= ab[at(k, j)] * x[j];
        }
        x[k] = s / ab[at(k, k)];
    }
    Ok(x)
}

/// General sparse LU (fill-reducing ordering, partial pivoting).
#[derive(Debug, Default)]
pub struct SparseLuSolver {
    cached: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl SparseLuSolver {
    pub fn solve(&mut self, a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
        let n = a.n();
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.entries().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::SingularMatrix(format!("invalid sparse matrix: {e:?}")))?;

        let reuse = matches!(&self.cached, Some((rows, cols, _)) if a.same_pattern(rows, cols));
        if !reuse {
            let symbolic = SymbolicLu::try_new(mat.symbolic())
                .map_err(|e| Error::SingularMatrix(format!("symbolic factorization: {e:?}")))?;
            self.cached = Some((a.rows.clone(), a.cols.clone(), symbolic));
        }
        let symbolic = self.cached.as_ref().map(|(_, _, s)| s.clone()).expect("cached above");
        let lu = Lu::try_new_with_symbolic(symbolic, mat.as_ref())
            .map_err(|e| Error::SingularMatrix(format!("numeric factorization: {e:?}")))?;
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
        lu.solve_in_place(rhs.as_mut());
        Ok((0..n).map(|i| rhs[(i, 0)]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolverKind {
    Banded,
    Sparse,
}

/// Direct solver with the residual check and one refinement pass.
#[derive(Debug)]
pub struct LinearSolver {
    kind: LinearSolverKind,
    sparse: SparseLuSolver,
}

impl LinearSolver {
    pub fn new(kind: LinearSolverKind) -> Self {
        LinearSolver {
            kind,
            sparse: SparseLuSolver::default(),
        }
    }

    pub fn kind(&self) -> LinearSolverKind {
        self.kind
    }

    fn raw_solve(&mut self, a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
        match self.kind {
            LinearSolverKind::Banded => banded_solve(a, b),
            LinearSolverKind::Sparse => self.sparse.solve(a, b),
        }
    }

    /// Solves `a x = b` with `‖a x - b‖∞ <= 1e-10 ‖b‖∞`.
    pub fn solve(&mut self, a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
        if a.n() != b.len() {
            return Err(Error::SingularMatrix(format!(
                "dimension mismatch: {} unknowns, {} right-hand side entries",
                a.n(),
                b.len()
            )));
        }
        let b_norm = inf_norm(b);
        if b_norm == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        let mut x = self.raw_solve(a, b)?;
        let mut res = residual(a, &x, b);
        if inf_norm(&res) > SOLVE_RTOL * b_norm {
            let dx = self.raw_solve(a, &res)?;
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            res = residual(a, &x, b);
        }
        let r_norm = inf_norm(&res);
        if !(r_norm <= SOLVE_RTOL * b_norm) {
            return Err(Error::SingularMatrix(format!(
                "solve residual {r_norm:e} exceeds {SOLVE_RTOL:e} x {b_norm:e}"
            )));
        }
        Ok(x)
    }
}

/// `b - a x`
fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

/// Picks the banded solver when the band is narrow, the sparse one otherwise.
pub fn linear_solve(a: &SparseMatrix, r: &[f64]) -> Result<Vec<f64>> {
    let (kl, ku) = a.bandwidths();
    let kind = if kl + ku <= 16 {
        LinearSolverKind::Banded
    } else {
        LinearSolverKind::Sparse
    };
    LinearSolver::new(kind).solve(a, r)
}
