use crate::error::{check_len, Error, Result};

/// Storage for the design matrix. Dense storage is column-major; sparse
/// storage is compressed sparse columns with sorted row indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Dense(Vec<f64>),
    Sparse {
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    },
}

/// Regression data `(X, y)` with cached squared column norms.
///
/// Immutable after construction, so one instance can back any number of
/// concurrent solves.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    d: usize,
    design: Design,
    y: Vec<f64>,
    column_norms_sq: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from a column-major dense buffer of length `n * d`.
    pub fn from_dense_columns(
        name: impl Into<String>,
        n: usize,
        d: usize,
        data: Vec<f64>,
        y: Vec<f64>,
    ) -> Result<Self> {
        check_len("dense design buffer", n * d, data.len())?;
        Self::build(name.into(), n, d, Design::Dense(data), y)
    }

    /// Builds a dataset from row-major nested rows.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = vec![0.0; n * d];
        for (i, row) in rows.iter().enumerate() {
            check_len("row length", d, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        Self::from_dense_columns(name, n, d, data, y)
    }

    /// Builds a sparse dataset from CSC arrays.
    pub fn from_csc(
        name: impl Into<String>,
        n: usize,
        d: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
        y: Vec<f64>,
    ) -> Result<Self> {
        check_len("csc indptr", d + 1, indptr.len())?;
        check_len("csc values", indices.len(), values.len())?;
        if indptr[0] != 0 || *indptr.last().unwrap_or(&0) != indices.len() {
            return Err(Error::Invalid("csc indptr does not span the entries".into()));
        }
        for j in 0..d {
            if indptr[j] > indptr[j + 1] {
                return Err(Error::Invalid(format!("csc indptr decreases at column {j}")));
            }
            let rows = &indices[indptr[j]..indptr[j + 1]];
            if rows.windows(2).any(|w| w[0] >= w[1]) || rows.iter().any(|&r| r >= n) {
                return Err(Error::Invalid(format!("bad row indices in column {j}")));
            }
        }
        Self::build(
            name.into(),
            n,
            d,
            Design::Sparse {
                indptr,
                indices,
                values,
            },
            y,
        )
    }

    fn build(name: String, n: usize, d: usize, design: Design, y: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Invalid(format!("empty dataset (n={n}, d={d})")));
        }
        check_len("target vector", n, y.len())?;
        let finite = match &design {
            Design::Dense(v) => v.iter().all(|x| x.is_finite()),
            Design::Sparse { values, .. } => values.iter().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(Error::NonFinite("design matrix".into()));
        }
        if !y.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("target vector".into()));
        }
        let mut ds = Dataset {
            name,
            n,
            d,
            design,
            y,
            column_norms_sq: Vec::new(),
        };
        ds.column_norms_sq = (0..d)
            .map(|j| ds.column(j).map(|(_, v)| v * v).sum())
            .collect();
        Ok(ds)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.design, Design::Sparse { .. })
    }

    pub fn column_norms_sq(&self) -> &[f64] {
        &self.column_norms_sq
    }

    /// Iterates the stored `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> ColumnIter<'_> {
        match &self.design {
            Design::Dense(data) => ColumnIter::Dense {
                values: &data[j * self.n..(j + 1) * self.n],
                pos: 0,
            },
            Design::Sparse {
                indptr,
                indices,
                values,
            } => {
                let (a, b) = (indptr[j], indptr[j + 1]);
                ColumnIter::Sparse {
                    rows: &indices[a..b],
                    values: &values[a..b],
                    pos: 0,
                }
            }
        }
    }

    /// `x_jᵀ v`
    #[inline]
    pub fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        match &self.design {
            Design::Dense(data) => {
                let col = &data[j * self.n..(j + 1) * self.n];
                col.iter().zip(v).map(|(a, b)| a * b).sum()
            }
            Design::Sparse {
                indptr,
                indices,
                values,
            } => {
                let (a, b) = (indptr[j], indptr[j + 1]);
                indices[a..b]
                    .iter()
                    .zip(&values[a..b])
                    .map(|(&i, &x)| x * v[i])
                    .sum()
            }
        }
    }

    /// `v += alpha * x_j`
    #[inline]
    pub fn col_axpy(&self, j: usize, alpha: f64, v: &mut [f64]) {
        match &self.design {
            Design::Dense(data) => {
                let col = &data[j * self.n..(j + 1) * self.n];
                for (vi, &x) in v.iter_mut().zip(col) {
                    *vi += alpha * x;
                }
            }
            Design::Sparse {
                indptr,
                indices,
                values,
            } => {
                let (a, b) = (indptr[j], indptr[j + 1]);
                for (&i, &x) in indices[a..b].iter().zip(&values[a..b]) {
                    v[i] += alpha * x;
                }
            }
        }
    }

    /// `x_iᵀ x_j`
    pub fn col_col_dot(&self, i: usize, j: usize) -> f64 {
        match &self.design {
            Design::Dense(data) => {
                let a = &data[i * self.n..(i + 1) * self.n];
                let b = &data[j * self.n..(j + 1) * self.n];
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            Design::Sparse { .. } => {
                let mut a = self.column(i).peekable();
                let mut b = self.column(j).peekable();
                let mut acc = 0.0;
                while let (Some(&(ra, va)), Some(&(rb, vb))) = (a.peek(), b.peek()) {
                    match ra.cmp(&rb) {
                        std::cmp::Ordering::Less => {
                            a.next();
                        }
                        std::cmp::Ordering::Greater => {
                            b.next();
                        }
                        std::cmp::Ordering::Equal => {
                            acc += va * vb;
                            a.next();
                            b.next();
                        }
                    }
                }
                acc
            }
        }
    }

    /// `X β`
    pub fn matvec(&self, beta: &[f64]) -> Result<Vec<f64>> {
        check_len("coefficient vector", self.d, beta.len())?;
        let mut out = vec![0.0; self.n];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                self.col_axpy(j, b, &mut out);
            }
        }
        Ok(out)
    }

    /// `y − X β`
    pub fn residual(&self, beta: &[f64]) -> Result<Vec<f64>> {
        let xb = self.matvec(beta)?;
        Ok(self.y.iter().zip(&xb).map(|(y, p)| y - p).collect())
    }

    /// Returns a new dataset holding the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let m = rows.len();
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n) {
            return Err(Error::Invalid(format!("row {bad} out of range")));
        }
        let y: Vec<f64> = rows.iter().map(|&r| self.y[r]).collect();
        match &self.design {
            Design::Dense(data) => {
                let mut out = Vec::with_capacity(m * self.d);
                for j in 0..self.d {
                    let col = &data[j * self.n..(j + 1) * self.n];
                    out.extend(rows.iter().map(|&r| col[r]));
                }
                Dataset::from_dense_columns(self.name.clone(), m, self.d, out, y)
            }
            Design::Sparse { .. } => {
                let mut map = vec![usize::MAX; self.n];
                for (new, &old) in rows.iter().enumerate() {
                    map[old] = new;
                }
                let mut indptr = Vec::with_capacity(self.d + 1);
                let mut indices = Vec::new();
                let mut values = Vec::new();
                indptr.push(0);
                let mut buf: Vec<(usize, f64)> = Vec::new();
                for j in 0..self.d {
                    buf.clear();
                    buf.extend(
                        self.column(j)
                            .filter(|&(r, _)| map[r] != usize::MAX)
                            .map(|(r, v)| (map[r], v)),
                    );
                    buf.sort_unstable_by_key(|&(r, _)| r);
                    for &(r, v) in &buf {
                        indices.push(r);
                        values.push(v);
                    }
                    indptr.push(indices.len());
                }
                Dataset::from_csc(self.name.clone(), m, self.d, indptr, indices, values, y)
            }
        }
    }

    /// Converts sparse storage to dense; dense datasets are returned as is.
    pub fn to_dense(&self) -> Dataset {
        match &self.design {
            Design::Dense(_) => self.clone(),
            Design::Sparse { .. } => {
                let mut data = vec![0.0; self.n * self.d];
                for j in 0..self.d {
                    for (r, v) in self.column(j) {
                        data[j * self.n + r] = v;
                    }
                }
                Dataset {
                    name: self.name.clone(),
                    n: self.n,
                    d: self.d,
                    design: Design::Dense(data),
                    y: self.y.clone(),
                    column_norms_sq: self.column_norms_sq.clone(),
                }
            }
        }
    }

    /// Replaces the target vector, keeping the design.
    pub fn with_target(&self, y: Vec<f64>) -> Result<Dataset> {
        check_len("target vector", self.n, y.len())?;
        if !y.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("target vector".into()));
        }
        let mut out = self.clone();
        out.y = y;
        Ok(out)
    }

    /// Reorders feature columns so that new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Dataset> {
        check_len("permutation", self.d, perm.len())?;
        let mut data = Vec::with_capacity(self.n * self.d);
        for &j in perm {
            let mut col = vec![0.0; self.n];
            for (r, v) in self.column(j) {
                col[r] = v;
            }
            data.extend(col);
        }
        Dataset::from_dense_columns(self.name.clone(), self.n, self.d, data, self.y.clone())
    }

    /// `‖y‖²`
    pub fn y_norm_sq(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum()
    }
}

pub enum ColumnIter<'a> {
    Dense {
        values: &'a [f64],
        pos: usize,
    },
    Sparse {
        rows: &'a [usize],
        values: &'a [f64],
        pos: usize,
    },
}

impl Iterator for ColumnIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColumnIter::Dense { values, pos } => {
                let v = *values.get(*pos)?;
                *pos += 1;
                Some((*pos - 1, v))
            }
            ColumnIter::Sparse { rows, values, pos } => {
                let r = *rows.get(*pos)?;
                let v = values[*pos];
                *pos += 1;
                Some((r, v))
            }
        }
    }
}

/// Per-feature penalty exponents: feature `j` is penalized by `exp(lam[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyVector(Vec<f64>);

impl PenaltyVector {
    pub fn new(lam: Vec<f64>) -> Result<Self> {
        if let Some(j) = lam.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("penalty entry {j}")));
        }
        Ok(PenaltyVector(lam))
    }

    pub fn uniform(value: f64, d: usize) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `exp(lam_j)` for every feature.
    pub fn weights(&self) -> Vec<f64> {
        self.0.iter().map(|l| l.exp()).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for PenaltyVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
