use std::fmt;

use thiserror::Error;

use crate::coefficients::{FieldTag, Rational, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("Novikov precision exhausted: {0}")]
    NovikovPrecision(String),
    #[error("operation {0} is only available over exact fields")]
    ExactFieldRequired(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix over a tagged field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldTag,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &FieldTag, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &FieldTag, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &FieldTag, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn field(&self) -> &FieldTag {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        self.data[r * self.cols + c] = x;
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::Dimension(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    fn require_exact(&self, op: &'static str) -> Result<(), LinAlgError> {
        if self.field.is_novikov() {
            Err(LinAlgError::ExactFieldRequired(op))
        } else {
            Ok(())
        }
    }

    /// Reduced row echelon form with the lexicographically earliest pivot columns.
    pub fn rref(&self) -> Result<(Matrix, Vec<usize>), LinAlgError> {
        self.require_exact("rref")?;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inverse().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for c in col..m.cols {
                        let sub = &f * m.get(row, c);
                        if !sub.is_zero() {
                            let v = m.get(r, c) - &sub;
                            m.set(r, c, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((m, pivots))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Rank; over Novikov fields elimination tracks the precision lost to pivots.
    pub fn rank(&self) -> Result<usize, LinAlgError> {
        if self.field.is_novikov() {
            self.novikov_rank()
        } else {
            Ok(self.rref()?.1.len())
        }
    }

    fn novikov_rank(&self) -> Result<usize, LinAlgError> {
        let cutoff = self.field.cutoff().expect("Novikov field").clone();
        let zero = Rational::from_integer(0.into());
        let mut precision = cutoff.clone();
        let mut m = self.clone();
        let mut exact = vec![true; m.rows];
        let mut live_rows: Vec<usize> = (0..m.rows).collect();
        let mut live_cols: Vec<usize> = (0..m.cols).collect();
        let mut rank = 0;
        loop {
            let mut best: Option<(Rational, usize, usize)> = None;
            for &r in &live_rows {
                let limit = if exact[r] { &cutoff } else { &precision };
                for &c in &live_cols {
                    let entry = m.get(r, c).truncated(limit);
                    if let Valuation::Finite(v) = entry.valuation().expect("Novikov entry") {
                        if best.as_ref().map_or(true, |(bv, _, _)| &v < bv) {
                            best = Some((v, r, c));
                        }
                    }
                }
            }
            let Some((v, pr, pc)) = best else {
                if !live_cols.is_empty() && live_rows.iter().any(|&r| !exact[r]) {
                    return Err(LinAlgError::NovikovPrecision(format!(
                        "{}x{} block vanishes only modulo T^{}",
                        live_rows.len(),
                        live_cols.len(),
                        precision
                    )));
                }
                return Ok(rank);
            };
            let pivot = m.get(pr, pc).clone();
            let next_precision = if v > zero { &precision - &v } else { precision.clone() };
            let pivot_top = m.row_max_exponent(pr, &live_cols);
            for &r in &live_rows {
                if r == pr {
                    continue;
                }
                let entry = m.get(r, pc).clone();
                if entry.is_zero() {
                    continue;
                }
                let exact_step = exact[r]
                    && exact[pr]
                    && pivot.is_monomial()
                    && match (entry.max_exponent(), &pivot_top) {
                        (Some(e), Some(t)) => &(&e - &v) + t < cutoff,
                        _ => true,
                    };
                if exact_step {
                    let f = entry.div_to_precision(&pivot, &cutoff).map_err(|e| LinAlgError::NovikovPrecision(e.to_string()))?;
                    for &c in &live_cols {
                        let val = m.get(r, c) - &(&f * m.get(pr, c));
                        m.set(r, c, val);
                    }
                } else {
                    let f = entry
                        .div_to_precision(&pivot, &next_precision)
                        .map_err(|e| LinAlgError::NovikovPrecision(e.to_string()))?;
                    for &c in &live_cols {
                        let val = (m.get(r, c) - &(&f * m.get(pr, c))).truncated(&next_precision);
                        m.set(r, c, val);
                    }
                    exact[r] = false;
                }
            }
            live_rows.retain(|&r| r != pr);
            live_cols.retain(|&c| c != pc);
            precision = next_precision;
            rank += 1;
        }
    }

    fn row_max_exponent(&self, r: usize, cols: &[usize]) -> Option<Rational> {
        cols.iter().filter_map(|&c| self.get(r, c).max_exponent()).max()
    }

    /// Basis of the right kernel, one vector per free column of the rref.
    pub fn kernel(&self) -> Result<Vec<Vec<Scalar>>, LinAlgError> {
        let (r, pivots) = self.rref()?;
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free);
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Some solution of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinAlgError> {
        self.require_exact("solve")?;
        if b.len() != self.rows {
            return Err(LinAlgError::Dimension(format!("rhs length {} for {} rows", b.len(), self.rows)));
        }
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref()?;
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Option<Matrix>, LinAlgError> {
        self.require_exact("inverse")?;
        if self.rows != self.cols {
            return Ok(None);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, self.field.one());
        }
        let (red, pivots) = aug.rref()?;
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c).clone());
            }
        }
        Ok(Some(inv))
    }
}
