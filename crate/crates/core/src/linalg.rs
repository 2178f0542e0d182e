//! Dense exact matrices.
//!
//! Rows and columns of the form-preserving groups are labelled by signed
//! indices. [`Layout`] fixes the translation to machine positions:
//!
//! | size   | labels                   | machine positions      |
//! |--------|--------------------------|------------------------|
//! | `2l`   | `1..=l`, `-1..=-l`       | `0..l`, `l..2l`        |
//! | `2l+1` | `0`, `1..=l`, `-1..=-l`  | `0`, `1..=l`, `l+1..=2l` |

use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{Field, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrices are over different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square")]
    NotSquare,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed matrix JSON: {0}")]
    Json(String),
}

/// Signed-index layout for `2l` (even) or `2l + 1` (odd) dimensional spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub l: usize,
    pub odd: bool,
}

impl Layout {
    pub fn even(l: usize) -> Layout {
        Layout { l, odd: false }
    }

    pub fn odd(l: usize) -> Layout {
        Layout { l, odd: true }
    }

    pub fn dim(&self) -> usize {
        2 * self.l + self.odd as usize
    }

    /// Machine position of a signed label.
    ///
    /// # Panics
    /// If the label is out of range for this layout.
    pub fn pos(&self, label: i32) -> usize {
        let l = self.l as i32;
        assert!(label.abs() <= l && (label != 0 || self.odd), "index {label} out of range");
        let off = self.odd as i32;
        let p = match label {
            0 => 0,
            i if i > 0 => i - 1 + off,
            i => l - i - 1 + off,
        };
        p as usize
    }

    /// Inverse of [`Layout::pos`].
    pub fn label(&self, pos: usize) -> i32 {
        let (l, p) = (self.l as i32, pos as i32);
        if self.odd {
            match p {
                0 => 0,
                p if p <= l => p,
                p => -(p - l),
            }
        } else if p < l {
            p + 1
        } else {
            -(p - l + 1)
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> std::fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.field.format(self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn diagonal(field: &F, entries: &[F::Elem]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zero(field, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Matrix unit `e_{i,j}`.
    pub fn unit(field: &F, n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        m.data[i * n + j] = field.one();
        m
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<F::Elem> = rows.into_iter().flatten().collect();
        if let Some(bad) = data.iter().find(|e| !field.contains(e)) {
            return Err(FieldError::NotInField(format!("{bad:?}")).into());
        }
        Ok(Matrix { field: field.clone(), rows: r, cols: c, data })
    }

    /// Builds a matrix from small integers, reduced into the field.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let data = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Matrix::from_rows(field, data).expect("rectangular integer matrix")
    }

    pub fn column(field: &F, entries: Vec<F::Elem>) -> Self {
        let n = entries.len();
        Matrix { field: field.clone(), rows: n, cols: 1, data: entries }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn from_columns(field: &F, rows: usize, cols: &[Vec<F::Elem>]) -> Self {
        let mut m = Matrix::zero(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, e) in c.iter().enumerate() {
                m.set(i, j, e.clone());
            }
        }
        m
    }

    fn check_field(&self, other: &Self) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch("vector length".into()));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&F, &F::Elem, &F::Elem) -> F::Elem) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch("shapes differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(&self.field, a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        self.map(|f, a| f.mul(s, a))
    }

    pub fn map(&self, op: impl Fn(&F, &F::Elem) -> F::Elem) -> Self {
        let data = self.data.iter().map(|a| op(&self.field, a)).collect();
        Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zero(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        self.field.is_one(e)
                    } else {
                        self.field.is_zero(e)
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.field.is_zero(e))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.field.is_zero(self.get(r, c))))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Matrix::zero(&self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    ///
    /// Pivots are chosen in the leftmost unfinished column, taking the first
    /// nonzero entry from the top.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else { continue };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
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
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// The pivot columns of `self`, i.e. a basis of its column space.
    pub fn column_basis(&self) -> Vec<Vec<F::Elem>> {
        self.rref().1.into_iter().map(|c| self.col(c)).collect()
    }

    /// Some `y` with `self * y = v`, free variables set to zero.
    pub fn solve_preimage(&self, v: &[F::Elem]) -> Result<Option<Vec<F::Elem>>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch("right-hand side length".into()));
        }
        let f = &self.field;
        let mut aug = Matrix::zero(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, v[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut y = vec![f.zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            y[c] = red.get(r, self.cols).clone();
        }
        Ok(Some(y))
    }

    pub fn det(&self) -> Result<F::Elem, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let f = &self.field;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else { return Ok(f.zero()) };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(&det);
            }
            let pivot = m.get(c, c).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).expect("nonzero pivot");
            for i in c + 1..m.rows {
                if f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.mul(m.get(i, c), &inv);
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Matrix::zero(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, f.one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Ok(red.submatrix(&(0..n).collect::<Vec<_>>(), &cols))
    }

    pub fn pow(&self, mut e: u64) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `{"field": <spec>, "rows": [[...], ...]}`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|r| Value::Array(self.row(r).iter().map(|e| self.field.elem_to_json(e)).collect()))
            .collect();
        json!({ "field": self.field.spec().to_json(), "rows": rows })
    }

    /// Reads the `rows` array of a matrix JSON object. A `field` entry, when
    /// present, must describe `field`.
    pub fn from_json(field: &F, v: &Value) -> Result<Self, LinalgError> {
        if let Some(spec) = v.get("field") {
            let spec = FieldSpec::from_json(spec)?;
            if !spec_matches(&spec, &field.spec()) {
                return Err(LinalgError::FieldMismatch);
            }
        }
        let rows = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| LinalgError::Json("missing `rows` array".into()))?;
        let parsed = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| LinalgError::Json("rows must be arrays".into()))?
                    .iter()
                    .map(|e| field.elem_from_json(e).map_err(LinalgError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(field, parsed)
    }
}

/// Field specs agree, treating an omitted modulus as the default one.
pub fn spec_matches(given: &FieldSpec, actual: &FieldSpec) -> bool {
    match (given, actual) {
        (FieldSpec::Rational, FieldSpec::Rational) => true,
        (FieldSpec::Finite { p: p1, m: m1, modulus: a }, FieldSpec::Finite { p: p2, m: m2, modulus: b }) => {
            p1 == p2 && m1 == m2 && (a.is_none() || *m1 == 1 || a == b)
        }
        _ => false,
    }
}
