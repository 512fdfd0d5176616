use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ainf_core::{all_compositions, AInfCategory, AInfError, Elem, Gen};
use crate::ainf_fun::{functor_blocks, AInfFunctor, Prenat};
use crate::coefficients::Scalar;
use crate::graded::{Complex, GradedError, GradedMap, GradedSpace, SparseVec};
use crate::linalg::{LinAlgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("contraction on hom({src},{tgt}) violates {reason}")]
    Contraction { src: String, tgt: String, reason: String },
    #[error("missing contraction data for hom({src},{tgt})")]
    Missing { src: String, tgt: String },
    #[error("automatic contractions need F2 or Q coefficients")]
    NovikovPrecision,
    #[error(transparent)]
    AInf(#[from] AInfError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Contraction data for one hom complex: `f1: small -> big`, `g1: big -> small`, `t1: big -> big`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomContraction {
    pub small: GradedSpace,
    pub f1: GradedMap,
    pub g1: GradedMap,
    pub t1: GradedMap,
}

impl HomContraction {
    /// `F1 = G1 = id`, `T1 = 0`.
    pub fn trivial(big: &GradedSpace) -> Self {
        HomContraction {
            small: big.clone(),
            f1: GradedMap::identity(big),
            g1: GradedMap::identity(big),
            t1: GradedMap::zero(big, big, -1),
        }
    }

    /// Differential on the small side, `G1 mu^1 F1`.
    pub fn small_differential(&self, mu1: &GradedMap) -> GradedMap {
        self.g1.compose(&mu1.compose(&self.f1))
    }

    /// First violated identity, if any.
    pub fn violation(&self, mu1: &GradedMap) -> Option<String> {
        let big = &self.t1.source;
        let lhs = mu1.compose(&self.t1).add(&self.t1.compose(mu1));
        let rhs = self.f1.compose(&self.g1).sub(&GradedMap::identity(big));
        if lhs != rhs {
            return Some("mu1 T1 + T1 mu1 = F1 G1 - id".into());
        }
        if self.g1.compose(&self.f1) != GradedMap::identity(&self.small) {
            return Some("G1 F1 = id".into());
        }
        let d_small = self.small_differential(mu1);
        if mu1.compose(&self.f1) != self.f1.compose(&d_small) {
            return Some("F1 is a chain map".into());
        }
        if self.g1.compose(mu1) != d_small.compose(&self.g1) {
            return Some("G1 is a chain map".into());
        }
        None
    }

    /// Side conditions `T1 F1 = 0`, `G1 T1 = 0`, `T1 T1 = 0` that fail.
    pub fn side_condition_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.t1.compose(&self.f1).is_zero() {
            out.push("T1 F1 = 0");
        }
        if !self.g1.compose(&self.t1).is_zero() {
            out.push("G1 T1 = 0");
        }
        if !self.t1.compose(&self.t1).is_zero() {
            out.push("T1 T1 = 0");
        }
        out
    }
}

/// Contraction of every hom complex of a category.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Contraction {
    pub pairs: BTreeMap<(usize, usize), HomContraction>,
}

impl Contraction {
    pub fn trivial(b: &AInfCategory) -> Self {
        Contraction { pairs: b.homs().map(|(&k, space)| (k, HomContraction::trivial(space))).collect() }
    }

    /// Contraction of each hom complex onto its cohomology.
    pub fn auto(b: &AInfCategory) -> Result<Self, TransferError> {
        let mut pairs = BTreeMap::new();
        for (&(x, y), _) in b.homs() {
            pairs.insert((x, y), auto_contraction(&b.hom_complex(x, y)?)?);
        }
        Ok(Contraction { pairs })
    }
}

/// Splits `C = B ⊕ H ⊕ K` degreewise (coboundaries, representatives, complement of
/// cocycles); `F1` includes `H`, `G1` projects onto it and `T1 = -d^{-1}` on `B`.
pub fn auto_contraction(c: &Complex) -> Result<HomContraction, TransferError> {
    let field = c.field().clone();
    if field.is_novikov() {
        return Err(TransferError::NovikovPrecision);
    }
    let big = &c.space;
    let mut small_basis: Vec<(String, i64)> = Vec::new();
    let mut f_cols: Vec<SparseVec> = Vec::new();
    let mut g_cols: Vec<SparseVec> = vec![SparseVec::new(); big.dim()];
    let mut t_cols: Vec<SparseVec> = vec![SparseVec::new(); big.dim()];
    for p in big.degrees() {
        let (_, cols, dp) = c.d.block(p);
        let (_, prev_cols, dprev) = c.d.block(p - 1);
        let n = cols.len();
        let (prev_pivots, boundaries) = if dprev.cols() == 0 || dprev.rows() == 0 {
            (Vec::new(), Vec::new())
        } else {
            let (_, piv) = dprev.rref()?;
            let b: Vec<Vec<Scalar>> = piv.iter().map(|&k| dprev.column(k)).collect();
            (piv, b)
        };
        let (pivots, kernel) = if dp.rows() == 0 {
            let unit = |i: usize| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect::<Vec<_>>();
            (Vec::new(), (0..n).map(|i| (i, unit(i))).collect::<Vec<_>>())
        } else {
            let (_, piv) = dp.rref()?;
            let free: Vec<usize> = (0..n).filter(|k| !piv.contains(k)).collect();
            (piv, free.into_iter().zip(dp.kernel()?).collect())
        };
        let mut stacked = boundaries.clone();
        let mut rank = boundaries.len();
        let mut reps: Vec<(usize, Vec<Scalar>)> = Vec::new();
        for (free, k) in kernel {
            stacked.push(k.clone());
            let r = crate::graded::matrix_from_columns(&field, &stacked, n).rank()?;
            if r > rank {
                rank = r;
                reps.push((free, k));
            } else {
                stacked.pop();
            }
        }
        let mut basis_cols = boundaries.clone();
        basis_cols.extend(reps.iter().map(|(_, k)| k.clone()));
        for &k in &pivots {
            basis_cols.push((0..n).map(|j| if j == k { field.one() } else { field.zero() }).collect());
        }
        debug_assert_eq!(basis_cols.len(), n);
        let inv = if n == 0 {
            Matrix::zeros(&field, 0, 0)
        } else {
            crate::graded::matrix_from_columns(&field, &basis_cols, n).inverse()?.expect("decomposition spans the degree")
        };
        let first_small = small_basis.len();
        for (free, k) in &reps {
            let pure = k.iter().filter(|x| !x.is_zero()).count() == 1;
            let name = big.name(cols[*free]);
            small_basis.push((if pure { name.to_string() } else { format!("[{name}]") }, p));
            let mut v = SparseVec::new();
            for (i, x) in k.iter().enumerate() {
                v.add_term(cols[i], x);
            }
            f_cols.push(v);
        }
        let nb = boundaries.len();
        for (j, &col) in cols.iter().enumerate() {
            let coords = inv.column(j);
            let mut g = SparseVec::new();
            for (r, x) in coords[nb..nb + reps.len()].iter().enumerate() {
                g.add_term(first_small + r, x);
            }
            g_cols[col] = g;
            let mut t = SparseVec::new();
            for (r, x) in coords[..nb].iter().enumerate() {
                t.add_term(prev_cols[prev_pivots[r]], &-x);
            }
            t_cols[col] = t;
        }
    }
    let small = GradedSpace::new(&field, small_basis)?;
    Ok(HomContraction {
        f1: GradedMap::new(small.clone(), big.clone(), 0, f_cols)?,
        g1: GradedMap::new(big.clone(), small.clone(), 0, g_cols)?,
        t1: GradedMap::new(big.clone(), big.clone(), -1, t_cols)?,
        small,
    })
}

#[derive(Clone, Debug)]
pub struct TransferResult {
    pub a: AInfCategory,
    pub f: AInfFunctor,
    /// Order-one homotopy `F ∘ G ≃ Id`: degree 0, only `T^1` set.
    pub t: Prenat,
    pub cap: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferSummary {
    pub cap: usize,
    pub dims: BTreeMap<String, usize>,
    pub nonzero_terms: BTreeMap<usize, usize>,
    pub warnings: Vec<String>,
}

/// Transfers the structure of `b` along `c`, computing `F^d` and `mu_A^d` for `d <= cap`.
pub fn transfer(b: &AInfCategory, c: &Contraction, cap: usize) -> Result<TransferResult, TransferError> {
    b.validate()?;
    let field = b.field.clone();
    let mut warnings = Vec::new();
    for (&(x, y), _) in b.homs() {
        let hc = c.pairs.get(&(x, y)).ok_or_else(|| TransferError::Missing { src: b.objects[x].clone(), tgt: b.objects[y].clone() })?;
        let mu1 = b.mu1_map(x, y);
        if let Some(reason) = hc.violation(&mu1) {
            return Err(TransferError::Contraction { src: b.objects[x].clone(), tgt: b.objects[y].clone(), reason });
        }
        for s in hc.side_condition_failures() {
            warnings.push(format!("hom({},{}): side condition {s} fails", b.objects[x], b.objects[y]));
        }
    }
    let mut a = AInfCategory::new(&field, b.objects.clone(), cap.max(1));
    let mut f = AInfFunctor { object_map: (0..b.num_objects()).collect(), terms: BTreeMap::new(), max_d: cap.max(1) };
    let mut t = Prenat::zero(0, 1);
    for (&(x, y), hc) in &c.pairs {
        a.set_hom(x, y, hc.small.clone());
        let d_small = hc.small_differential(&b.mu1_map(x, y));
        for i in 0..hc.small.dim() {
            let g = Gen { src: x, tgt: y, idx: i };
            a.set_comp(vec![g], d_small.column(i).clone());
            f.set_term(vec![g], hc.f1.column(i).clone());
        }
        for i in 0..hc.t1.source.dim() {
            t.set_term(vec![Gen { src: x, tgt: y, idx: i }], hc.t1.column(i).clone());
        }
    }
    for d in 2..=cap {
        for tuple in a.composable_tuples(d) {
            let mut s = SparseVec::new();
            for sizes in all_compositions(d) {
                if sizes.len() < 2 || sizes.len() > b.max_d {
                    continue;
                }
                let blocks = functor_blocks(&f, &tuple, &sizes);
                if blocks.iter().any(|e| e.vec.is_zero()) {
                    continue;
                }
                let refs: Vec<&Elem> = blocks.iter().collect();
                s.add(&b.mu(&refs).vec);
            }
            if s.is_zero() {
                continue;
            }
            let hc = &c.pairs[&(tuple[0].src, tuple[d - 1].tgt)];
            f.set_term(tuple.clone(), hc.t1.apply(&s));
            a.set_comp(tuple, hc.g1.apply(&s));
        }
    }
    Ok(TransferResult { a, f, t, cap, warnings })
}

impl TransferResult {
    pub fn summary(&self) -> TransferSummary {
        let mut dims = BTreeMap::new();
        for (&(x, y), space) in self.a.homs() {
            dims.insert(format!("{}->{}", self.a.objects[x], self.a.objects[y]), space.dim());
        }
        let mut nonzero_terms = BTreeMap::new();
        for k in self.a.comps().keys() {
            *nonzero_terms.entry(k.len()).or_insert(0) += 1;
        }
        TransferSummary { cap: self.cap, dims, nonzero_terms, warnings: self.warnings.clone() }
    }
}

/// Default cap: `max_d` of the source plus two.
pub fn default_cap(b: &AInfCategory) -> usize {
    b.max_d + 2
}
