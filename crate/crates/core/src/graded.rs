use std::collections::BTreeMap;

use thiserror::Error;

use crate::coefficients::{FieldTag, Scalar};
use crate::linalg::{LinAlgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("map of degree {degree} sends basis vector {name} to an element of the wrong degree")]
    Inhomogeneous { degree: i64, name: String },
    #[error("differential does not square to zero")]
    NotADifferential,
    #[error("differential must have degree 1, got {0}")]
    WrongDegree(i64),
    #[error("duplicate basis name {0}")]
    DuplicateName(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Sparse vector: basis index to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(BTreeMap<usize, Scalar>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn basis(idx: usize, one: Scalar) -> Self {
        let mut v = SparseVec::new();
        v.add_term(idx, &one);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<&Scalar> {
        self.0.get(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn add_term(&mut self, idx: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let new = match self.0.get(&idx) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if new.is_zero() {
            self.0.remove(&idx);
        } else {
            self.0.insert(idx, new);
        }
    }

    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let one = c.is_one();
        for (k, v) in other.iter() {
            if one {
                self.add_term(k, v);
            } else {
                self.add_term(k, &(v * c));
            }
        }
    }

    pub fn add_signed(&mut self, other: &SparseVec, odd: bool) {
        for (k, v) in other.iter() {
            self.add_term(k, &v.signed(odd));
        }
    }

    pub fn add(&mut self, other: &SparseVec) {
        self.add_signed(other, false);
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        let mut out = SparseVec::new();
        out.add_scaled(self, c);
        out
    }

    pub fn signed(&self, odd: bool) -> SparseVec {
        if !odd {
            return self.clone();
        }
        SparseVec(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }

    pub fn to_dense(&self, dim: usize, field: &FieldTag) -> Vec<Scalar> {
        let mut out = vec![field.zero(); dim];
        for (k, v) in self.iter() {
            out[k] = v.clone();
        }
        out
    }

    pub fn from_dense(v: &[Scalar]) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, x) in v.iter().enumerate() {
            out.add_term(k, x);
        }
        out
    }

    /// Keeps only the coordinates `lo..hi`, reindexed from zero.
    pub fn slice(&self, lo: usize, hi: usize) -> SparseVec {
        SparseVec(self.0.range(lo..hi).map(|(k, v)| (k - lo, v.clone())).collect())
    }

    pub fn shifted(&self, by: usize) -> SparseVec {
        SparseVec(self.0.iter().map(|(k, v)| (k + by, v.clone())).collect())
    }
}

impl FromIterator<(usize, Scalar)> for SparseVec {
    fn from_iter<I: IntoIterator<Item = (usize, Scalar)>>(iter: I) -> Self {
        let mut v = SparseVec::new();
        for (k, c) in iter {
            v.add_term(k, &c);
        }
        v
    }
}

/// Finite-dimensional Z-graded vector space with a named homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    pub field: FieldTag,
    basis: Vec<(String, i64)>,
}

impl GradedSpace {
    pub fn new(field: &FieldTag, basis: Vec<(String, i64)>) -> Result<Self, GradedError> {
        let mut seen = std::collections::BTreeSet::new();
        for (n, _) in &basis {
            if !seen.insert(n.clone()) {
                return Err(GradedError::DuplicateName(n.clone()));
            }
        }
        Ok(GradedSpace { field: field.clone(), basis })
    }

    pub fn zero(field: &FieldTag) -> Self {
        GradedSpace { field: field.clone(), basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].0
    }

    pub fn basis(&self) -> &[(String, i64)] {
        &self.basis
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|(n, _)| n == name)
    }

    pub fn degrees(&self) -> std::collections::BTreeSet<i64> {
        self.basis.iter().map(|b| b.1).collect()
    }

    pub fn indices_in_degree(&self, p: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == p).collect()
    }

    /// Degree of a vector if it is homogeneous and nonzero.
    pub fn homogeneous_degree(&self, v: &SparseVec) -> Option<i64> {
        let mut degs = v.iter().map(|(k, _)| self.degree(k));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, v: &SparseVec, deg: i64) -> bool {
        v.iter().all(|(k, _)| self.degree(k) == deg)
    }

    /// `V[n]`: every degree lowered by `n`.
    pub fn shift(&self, n: i64) -> GradedSpace {
        GradedSpace { field: self.field.clone(), basis: self.basis.iter().map(|(s, d)| (s.clone(), d - n)).collect() }
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> GradedSpace {
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        GradedSpace { field: self.field.clone(), basis }
    }

    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for (a, da) in &self.basis {
            for (b, db) in &other.basis {
                basis.push((format!("{a}⊗{b}"), da + db));
            }
        }
        GradedSpace { field: self.field.clone(), basis }
    }

    pub fn format_vec(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.iter()
            .map(|(k, c)| if c.is_one() { self.name(k).to_string() } else { format!("({c})*{}", self.name(k)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Homogeneous linear map stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i64,
    columns: Vec<SparseVec>,
}

impl GradedMap {
    pub fn new(source: GradedSpace, target: GradedSpace, degree: i64, columns: Vec<SparseVec>) -> Result<Self, GradedError> {
        assert_eq!(columns.len(), source.dim(), "one column per source basis vector");
        for (i, col) in columns.iter().enumerate() {
            if !target.is_homogeneous_of(col, source.degree(i) + degree) {
                return Err(GradedError::Inhomogeneous { degree, name: source.name(i).to_string() });
            }
        }
        Ok(GradedMap { source, target, degree, columns })
    }

    pub fn zero(source: &GradedSpace, target: &GradedSpace, degree: i64) -> Self {
        GradedMap { source: source.clone(), target: target.clone(), degree, columns: vec![SparseVec::new(); source.dim()] }
    }

    pub fn identity(v: &GradedSpace) -> Self {
        let one = v.field.one();
        let columns = (0..v.dim()).map(|i| SparseVec::basis(i, one.clone())).collect();
        GradedMap { source: v.clone(), target: v.clone(), degree: 0, columns }
    }

    pub fn column(&self, i: usize) -> &SparseVec {
        &self.columns[i]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, c) in v.iter() {
            out.add_scaled(&self.columns[k], c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(other.target.dim(), self.source.dim());
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        GradedMap { source: other.source.clone(), target: self.target.clone(), degree: self.degree + other.degree, columns }
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(self.degree, other.degree);
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.add(b);
                c
            })
            .collect();
        GradedMap { source: self.source.clone(), target: self.target.clone(), degree: self.degree, columns }
    }

    pub fn scaled(&self, c: &Scalar) -> GradedMap {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().map(|v| v.scaled(c)).collect(),
        }
    }

    pub fn signed(&self, odd: bool) -> GradedMap {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().map(|v| v.signed(odd)).collect(),
        }
    }

    pub fn sub(&self, other: &GradedMap) -> GradedMap {
        self.add(&other.signed(true))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    /// Block from source degree `p` to target degree `p + degree`.
    pub fn block(&self, p: i64) -> (Vec<usize>, Vec<usize>, Matrix) {
        let cols = self.source.indices_in_degree(p);
        let rows = self.target.indices_in_degree(p + self.degree);
        let mut m = Matrix::zeros(&self.source.field, rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for (k, x) in self.columns[c].iter() {
                let i = rows.iter().position(|&r| r == k).expect("homogeneous column");
                m.set(i, j, x.clone());
            }
        }
        (rows, cols, m)
    }

    /// Full matrix in the given bases.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(&self.source.field, self.target.dim(), self.source.dim());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col.iter() {
                m.set(i, j, x.clone());
            }
        }
        m
    }
}

/// Koszul tensor product: `(f ⊗ g)(v ⊗ w) = (-1)^{|g||v|} f(v) ⊗ g(w)`.
pub fn koszul_tensor(f: &GradedMap, g: &GradedMap) -> GradedMap {
    let source = f.source.tensor(&g.source);
    let target = f.target.tensor(&g.target);
    let m = g.target.dim();
    let mut columns = Vec::with_capacity(source.dim());
    for i in 0..f.source.dim() {
        let odd = (g.degree * f.source.degree(i)).rem_euclid(2) == 1;
        for j in 0..g.source.dim() {
            let mut col = SparseVec::new();
            for (a, ca) in f.columns[i].iter() {
                for (b, cb) in g.columns[j].iter() {
                    col.add_term(a * m + b, &(ca * cb).signed(odd));
                }
            }
            columns.push(col);
        }
    }
    GradedMap { source, target, degree: f.degree + g.degree, columns }
}

/// `d f = d_W ∘ f - (-1)^{|f|} f ∘ d_V`.
pub fn map_differential(f: &GradedMap, dv: &GradedMap, dw: &GradedMap) -> GradedMap {
    dw.compose(f).sub(&f.compose(dv).signed(f.degree.rem_euclid(2) == 1))
}

/// Cochain complex with a degree +1 differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub space: GradedSpace,
    pub d: GradedMap,
}

/// Cohomology in one degree: dimension and, over exact fields, cocycle representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub dim: usize,
    pub representatives: Vec<SparseVec>,
}

impl Complex {
    pub fn new(d: GradedMap) -> Result<Self, GradedError> {
        if d.degree != 1 {
            return Err(GradedError::WrongDegree(d.degree));
        }
        if !d.compose(&d).is_zero() {
            return Err(GradedError::NotADifferential);
        }
        Ok(Complex { space: d.source.clone(), d })
    }

    pub fn zero_differential(space: &GradedSpace) -> Self {
        Complex { space: space.clone(), d: GradedMap::zero(space, space, 1) }
    }

    pub fn field(&self) -> &FieldTag {
        &self.space.field
    }

    /// Cohomology in every degree carrying basis vectors.
    pub fn cohomology(&self) -> Result<BTreeMap<i64, CohomologyGroup>, GradedError> {
        let mut out = BTreeMap::new();
        for p in self.space.degrees() {
            out.insert(p, self.cohomology_at(p)?);
        }
        Ok(out)
    }

    pub fn cohomology_at(&self, p: i64) -> Result<CohomologyGroup, GradedError> {
        let (_, cols, dp) = self.d.block(p);
        let (_, _, dprev) = self.d.block(p - 1);
        if self.field().is_novikov() {
            let dim = cols.len() - dp.rank()? - dprev.rank()?;
            return Ok(CohomologyGroup { dim, representatives: Vec::new() });
        }
        let basis = CohomologyBasis::from_blocks(self.field(), &cols, &dp, &dprev)?;
        Ok(CohomologyGroup { dim: basis.reps.len(), representatives: basis.reps.clone() })
    }

    pub fn total_dim(&self) -> Result<usize, GradedError> {
        Ok(self.cohomology()?.values().map(|g| g.dim).sum())
    }

    pub fn is_acyclic(&self) -> Result<bool, GradedError> {
        Ok(self.total_dim()? == 0)
    }

    /// Basis of cohomology in degree `p` able to classify cocycles (exact fields only).
    pub fn cohomology_basis(&self, p: i64) -> Result<CohomologyBasis, GradedError> {
        let (_, cols, dp) = self.d.block(p);
        let (_, _, dprev) = self.d.block(p - 1);
        CohomologyBasis::from_blocks(self.field(), &cols, &dp, &dprev)
    }
}

/// Representatives of `H^p` together with the data needed to express classes in them.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    field: FieldTag,
    /// Global indices of degree-`p` basis vectors.
    indices: Vec<usize>,
    pub reps: Vec<SparseVec>,
    coboundaries: Vec<Vec<Scalar>>,
    d_block: Matrix,
}

impl CohomologyBasis {
    fn from_blocks(field: &FieldTag, cols: &[usize], dp: &Matrix, dprev: &Matrix) -> Result<Self, GradedError> {
        let n = cols.len();
        let kernel = if dp.rows() == 0 {
            (0..n)
                .map(|i| {
                    let mut v = vec![field.zero(); n];
                    v[i] = field.one();
                    v
                })
                .collect()
        } else {
            dp.kernel()?
        };
        let coboundaries: Vec<Vec<Scalar>> = (0..dprev.cols()).map(|c| dprev.column(c)).collect();
        // extend a basis of the image by kernel vectors
        let mut stacked: Vec<Vec<Scalar>> = coboundaries.clone();
        let base_rank = rank_of(field, &stacked, n)?;
        let mut current = base_rank;
        let mut reps = Vec::new();
        for k in kernel {
            stacked.push(k.clone());
            let r = rank_of(field, &stacked, n)?;
            if r > current {
                current = r;
                let mut v = SparseVec::new();
                for (i, x) in k.iter().enumerate() {
                    v.add_term(cols[i], x);
                }
                reps.push(v);
            } else {
                stacked.pop();
            }
        }
        Ok(CohomologyBasis { field: field.clone(), indices: cols.to_vec(), reps, coboundaries, d_block: dp.clone() })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn contains_index(&self, k: usize) -> bool {
        self.indices.contains(&k)
    }

    /// Coordinates of the class of a degree-`p` cocycle; `None` if not a cocycle.
    pub fn classify(&self, v: &SparseVec) -> Result<Option<Vec<Scalar>>, GradedError> {
        let n = self.indices.len();
        let mut dense = vec![self.field.zero(); n];
        for (k, x) in v.iter() {
            match self.indices.iter().position(|&i| i == k) {
                Some(pos) => dense[pos] = x.clone(),
                None => return Ok(None),
            }
        }
        if self.d_block.rows() > 0 && !self.d_block.mul_vec(&dense).iter().all(Scalar::is_zero) {
            return Ok(None);
        }
        let mut cols: Vec<Vec<Scalar>> = self.reps.iter().map(|r| {
            let mut d = vec![self.field.zero(); n];
            for (k, x) in r.iter() {
                d[self.indices.iter().position(|&i| i == k).expect("rep in degree")] = x.clone();
            }
            d
        }).collect();
        cols.extend(self.coboundaries.iter().cloned());
        if cols.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let m = matrix_from_columns(&self.field, &cols, n);
        let x = m.solve(&dense)?.expect("cocycles lie in the span of reps and coboundaries");
        Ok(Some(x[..self.reps.len()].to_vec()))
    }
}

pub fn matrix_from_columns(field: &FieldTag, cols: &[Vec<Scalar>], rows: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m
}

fn rank_of(field: &FieldTag, cols: &[Vec<Scalar>], rows: usize) -> Result<usize, LinAlgError> {
    if cols.is_empty() || rows == 0 {
        return Ok(0);
    }
    matrix_from_columns(field, cols, rows).rank()
}
