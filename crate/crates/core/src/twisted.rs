use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ainf_core::{AInfCategory, AInfError, Elem};
use crate::coefficients::Scalar;
use crate::graded::{Complex, GradedError, GradedMap, GradedSpace, SparseVec};
use crate::linalg::{LinAlgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistedError {
    #[error("delta entry ({row},{col}) of {name} is not strictly lower triangular")]
    Triangularity { name: String, row: usize, col: usize },
    #[error("{0} is not a cocycle")]
    NotCocycle(String),
    #[error("expected degree {expected}, found {found}")]
    Degree { expected: i64, found: i64 },
    #[error("exactness checks need F2 or Q coefficients")]
    NovikovPrecision,
    #[error("invalid twisted data: {0}")]
    Invalid(String),
    #[error(transparent)]
    AInf(#[from] AInfError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Formal sum of shifted objects `⊕ S^{s_i} X^i`, stored as `(X^i, s_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumObject {
    pub summands: Vec<(usize, i64)>,
}

impl SumObject {
    pub fn single(x: usize) -> Self {
        SumObject { summands: vec![(x, 0)] }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn object(&self, i: usize) -> usize {
        self.summands[i].0
    }

    pub fn shift(&self, i: usize) -> i64 {
        self.summands[i].1
    }
}

/// Matrix of morphisms: `(target summand, source summand)` to a vector of `hom_A`.
pub type SigmaMorphism = BTreeMap<(usize, usize), SparseVec>;

/// Degree of a block entry of `hom_A` degree `p` from summand shift `s0` to summand shift `s1`.
pub fn block_degree(p: i64, s0: i64, s1: i64) -> i64 {
    p + s0 - s1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedComplex {
    pub name: String,
    pub carrier: SumObject,
    /// Strictly lower triangular in the summand order: entries `(j, i)` with `j > i`.
    pub delta: SigmaMorphism,
}

impl TwistedComplex {
    pub fn object(a: &AInfCategory, x: usize) -> Self {
        TwistedComplex { name: a.objects[x].clone(), carrier: SumObject::single(x), delta: BTreeMap::new() }
    }

    pub fn sum(name: &str, carrier: SumObject) -> Self {
        TwistedComplex { name: name.to_string(), carrier, delta: BTreeMap::new() }
    }

    /// `S^n X`: every summand shifted, `delta` unchanged.
    pub fn shifted(&self, n: i64) -> Self {
        let summands = self.carrier.summands.iter().map(|&(x, s)| (x, s + n)).collect();
        let name = match n {
            0 => self.name.clone(),
            1 => format!("S{}", self.name),
            _ => format!("S^{n}{}", self.name),
        };
        TwistedComplex { name, carrier: SumObject { summands }, delta: self.delta.clone() }
    }

    /// Structural checks: non-empty carrier, strict triangularity, degree-one entries.
    pub fn validate(&self, a: &AInfCategory) -> Result<(), TwistedError> {
        if self.carrier.is_empty() {
            return Err(TwistedError::Invalid(format!("{} has no summands", self.name)));
        }
        for (&(j, i), v) in &self.delta {
            if j <= i || j >= self.carrier.len() {
                return Err(TwistedError::Triangularity { name: self.name.clone(), row: j, col: i });
            }
            if v.is_zero() {
                continue;
            }
            let space = a.hom(self.carrier.object(i), self.carrier.object(j));
            let p = space.homogeneous_degree(v).ok_or_else(|| TwistedError::Invalid(format!("inhomogeneous delta entry in {}", self.name)))?;
            let found = block_degree(p, self.carrier.shift(i), self.carrier.shift(j));
            if found != 1 {
                return Err(TwistedError::Degree { expected: 1, found });
            }
        }
        Ok(())
    }
}

/// Sum over all delta insertions of `(-1)^{s_{i_0}} mu_A(...)`; `xs` are `X_0, ..., X_d`,
/// `args` chronological block morphisms `a_k: X_{k-1} -> X_k`.
fn twisted_sum(a: &AInfCategory, xs: &[&TwistedComplex], args: &[&SigmaMorphism], with_delta: bool) -> SigmaMorphism {
    struct Walk<'w> {
        a: &'w AInfCategory,
        xs: &'w [&'w TwistedComplex],
        args: &'w [&'w SigmaMorphism],
        with_delta: bool,
        stack: Vec<Elem>,
        out: SigmaMorphism,
    }
    impl Walk<'_> {
        fn go(&mut self, k: usize, cur: usize, start: usize) {
            let d = self.args.len();
            let x = self.xs[k];
            if k == d {
                if !self.stack.is_empty() {
                    let refs: Vec<&Elem> = self.stack.iter().collect();
                    let v = self.a.mu(&refs).vec;
                    if !v.is_zero() {
                        let odd = self.xs[0].carrier.shift(start).rem_euclid(2) == 1;
                        self.out.entry((cur, start)).or_default().add_signed(&v, odd);
                    }
                }
            } else {
                let y = self.xs[k + 1];
                for (&(j, i), v) in self.args[k].iter() {
                    if i != cur || v.is_zero() {
                        continue;
                    }
                    self.stack.push(Elem::new(x.carrier.object(i), y.carrier.object(j), v.clone()));
                    self.go(k + 1, j, start);
                    self.stack.pop();
                }
            }
            if self.with_delta && self.stack.len() < self.a.max_d {
                for (&(j, i), v) in x.delta.iter() {
                    if i != cur || v.is_zero() {
                        continue;
                    }
                    self.stack.push(Elem::new(x.carrier.object(i), x.carrier.object(j), v.clone()));
                    self.go(k, j, start);
                    self.stack.pop();
                }
            }
        }
    }
    let mut walk = Walk { a, xs, args, with_delta, stack: Vec::new(), out: BTreeMap::new() };
    for start in 0..xs[0].carrier.len() {
        walk.go(0, start, start);
    }
    walk.out.retain(|_, v| !v.is_zero());
    walk.out
}

/// `mu_Σ^d(a_d, ..., a_1)` blockwise with sign `(-1)^{s_{i_0}}`; `objs` are `X_0, ..., X_d`.
pub fn sigma_compose(a: &AInfCategory, objs: &[&SumObject], args: &[&SigmaMorphism]) -> SigmaMorphism {
    let xs: Vec<TwistedComplex> = objs.iter().map(|o| TwistedComplex::sum("", (*o).clone())).collect();
    let refs: Vec<&TwistedComplex> = xs.iter().collect();
    twisted_sum(a, &refs, args, false)
}

/// `mu_Tw^d(a_d, ..., a_1)` with all delta insertions; `xs` are `X_0, ..., X_d`.
pub fn tw_compose(a: &AInfCategory, xs: &[&TwistedComplex], args: &[&SigmaMorphism]) -> SigmaMorphism {
    twisted_sum(a, xs, args, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub pass: bool,
    pub residual: Vec<String>,
}

/// Maurer–Cartan check `sum_r mu_Σ^r(delta, ..., delta) = 0`.
pub fn check_mc(a: &AInfCategory, x: &TwistedComplex) -> Result<McReport, TwistedError> {
    x.validate(a)?;
    let res = twisted_sum(a, &[x], &[], true);
    let residual = res
        .iter()
        .map(|(&(j, i), v)| format!("({j},{i}): {}", a.hom(x.carrier.object(i), x.carrier.object(j)).format_vec(v)))
        .collect::<Vec<_>>();
    Ok(McReport { pass: residual.is_empty(), residual })
}

/// Basis element of a twisted hom space: block `(j, i)` and index in `hom_A(X_0^i, X_1^j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockGen {
    pub row: usize,
    pub col: usize,
    pub idx: usize,
}

/// Finite full subcategory of twisted complexes with `mu_Tw` tabulated as an `AInfCategory`.
#[derive(Clone, Debug)]
pub struct TwCategory<'a> {
    pub base: &'a AInfCategory,
    pub complexes: Vec<TwistedComplex>,
    pub cat: AInfCategory,
    blocks: BTreeMap<(usize, usize), Vec<BlockGen>>,
}

impl<'a> TwCategory<'a> {
    pub fn new(base: &'a AInfCategory, complexes: Vec<TwistedComplex>) -> Result<Self, TwistedError> {
        let mut names = std::collections::BTreeSet::new();
        for x in &complexes {
            x.validate(base)?;
            if !names.insert(x.name.clone()) {
                return Err(TwistedError::Invalid(format!("duplicate twisted complex {}", x.name)));
            }
            let mc = check_mc(base, x)?;
            if !mc.pass {
                return Err(TwistedError::Invalid(format!("{} fails the Maurer–Cartan equation", x.name)));
            }
        }
        let mut cat = AInfCategory::new(&base.field, complexes.iter().map(|x| x.name.clone()).collect(), base.max_d);
        let mut blocks = BTreeMap::new();
        for (p, x0) in complexes.iter().enumerate() {
            for (q, x1) in complexes.iter().enumerate() {
                let plain = x0.carrier.len() == 1 && x1.carrier.len() == 1;
                let mut basis = Vec::new();
                let mut gens = Vec::new();
                for j in 0..x1.carrier.len() {
                    for i in 0..x0.carrier.len() {
                        let space = base.hom(x0.carrier.object(i), x1.carrier.object(j));
                        for (idx, (name, deg)) in space.basis().iter().enumerate() {
                            let name = if plain { name.clone() } else { format!("{name}^{j},{i}") };
                            basis.push((name, block_degree(*deg, x0.carrier.shift(i), x1.carrier.shift(j))));
                            gens.push(BlockGen { row: j, col: i, idx });
                        }
                    }
                }
                if !basis.is_empty() {
                    cat.set_hom(p, q, GradedSpace::new(&base.field, basis)?);
                    blocks.insert((p, q), gens);
                }
            }
        }
        let mut tw = TwCategory { base, complexes, cat, blocks };
        let one = base.field.one();
        for d in 1..=base.max_d {
            for tuple in tw.cat.composable_tuples(d) {
                let morphs: Vec<SigmaMorphism> = tuple.iter().map(|g| tw.to_blocks(g.src, g.tgt, &SparseVec::basis(g.idx, one.clone()))).collect();
                let v = tw.compose_vec(&tuple.iter().map(|g| g.src).chain([tuple[d - 1].tgt]).collect::<Vec<_>>(), &morphs);
                tw.cat.set_comp(tuple, v);
            }
        }
        Ok(tw)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.complexes.iter().position(|x| x.name == name)
    }

    /// Block form of a vector of `hom_Tw(X_p, X_q)`.
    pub fn to_blocks(&self, p: usize, q: usize, v: &SparseVec) -> SigmaMorphism {
        let mut out: SigmaMorphism = BTreeMap::new();
        if let Some(gens) = self.blocks.get(&(p, q)) {
            for (k, c) in v.iter() {
                let g = gens[k];
                out.entry((g.row, g.col)).or_default().add_term(g.idx, c);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Vector of `hom_Tw(X_p, X_q)` from block form.
    pub fn from_blocks(&self, p: usize, q: usize, m: &SigmaMorphism) -> SparseVec {
        let mut out = SparseVec::new();
        let Some(gens) = self.blocks.get(&(p, q)) else { return out };
        for (k, g) in gens.iter().enumerate() {
            if let Some(c) = m.get(&(g.row, g.col)).and_then(|v| v.get(g.idx)) {
                out.add_term(k, c);
            }
        }
        out
    }

    fn compose_vec(&self, objs: &[usize], morphs: &[SigmaMorphism]) -> SparseVec {
        let xs: Vec<&TwistedComplex> = objs.iter().map(|&o| &self.complexes[o]).collect();
        let refs: Vec<&SigmaMorphism> = morphs.iter().collect();
        let out = tw_compose(self.base, &xs, &refs);
        self.from_blocks(objs[0], objs[objs.len() - 1], &out)
    }

    /// Strict units `E_X = diag((-1)^{s_i} e_{X^i})` from units of the base category.
    pub fn units(&self, base_units: &BTreeMap<usize, SparseVec>) -> Result<BTreeMap<usize, SparseVec>, TwistedError> {
        let mut out = BTreeMap::new();
        for (p, x) in self.complexes.iter().enumerate() {
            let mut m = SigmaMorphism::new();
            for i in 0..x.carrier.len() {
                let e = base_units.get(&x.carrier.object(i)).ok_or_else(|| TwistedError::Invalid(format!("no unit for {}", self.base.objects[x.carrier.object(i)])))?;
                m.insert((i, i), e.signed(x.carrier.shift(i).rem_euclid(2) == 1));
            }
            out.insert(p, self.from_blocks(p, p, &m));
        }
        Ok(out)
    }

    /// Twisted mapping cone `(S Y0 ⊕ Y1, [[delta_Y0, 0], [c, delta_Y1]])` of a degree-0 cocycle.
    pub fn cone(&self, y0: usize, y1: usize, c: &SparseVec, name: &str) -> Result<TwistedComplex, TwistedError> {
        let space = self.cat.hom(y0, y1);
        if !c.is_zero() {
            let found = space.homogeneous_degree(c).ok_or_else(|| TwistedError::Invalid("inhomogeneous cone morphism".into()))?;
            if found != 0 {
                return Err(TwistedError::Degree { expected: 0, found });
            }
        }
        if !self.cat.mu1(&Elem::new(y0, y1, c.clone())).vec.is_zero() {
            return Err(TwistedError::NotCocycle(space.format_vec(c)));
        }
        let x0 = self.complexes[y0].shifted(1);
        let x1 = &self.complexes[y1];
        let n0 = x0.carrier.len();
        let mut summands = x0.carrier.summands.clone();
        summands.extend(x1.carrier.summands.iter().cloned());
        let mut delta = x0.delta.clone();
        for (&(j, i), v) in &x1.delta {
            delta.insert((j + n0, i + n0), v.clone());
        }
        for ((j, i), v) in self.to_blocks(y0, y1, c) {
            delta.insert((j + n0, i), v);
        }
        Ok(TwistedComplex { name: name.to_string(), carrier: SumObject { summands }, delta })
    }

    /// Canonical `i: Y1 -> C` and `p: C -> Y0` in `hom^1(C, Y0)`, built from the signed units of each summand.
    pub fn cone_maps(&self, y0: usize, y1: usize, cone: usize, base_units: &BTreeMap<usize, SparseVec>) -> Result<(SparseVec, SparseVec), TwistedError> {
        let x0 = &self.complexes[y0];
        let x1 = &self.complexes[y1];
        let n0 = x0.carrier.len();
        let unit = |x: usize| base_units.get(&x).cloned().ok_or_else(|| TwistedError::Invalid(format!("no unit for {}", self.base.objects[x])));
        let mut i_map = SigmaMorphism::new();
        for k in 0..x1.carrier.len() {
            i_map.insert((k + n0, k), unit(x1.carrier.object(k))?.signed(x1.carrier.shift(k).rem_euclid(2) == 1));
        }
        let mut p_map = SigmaMorphism::new();
        for k in 0..n0 {
            p_map.insert((k, k), unit(x0.carrier.object(k))?.signed((x0.carrier.shift(k) + 1).rem_euclid(2) == 1));
        }
        Ok((self.from_blocks(y1, cone, &i_map), self.from_blocks(cone, y0, &p_map)))
    }

    pub fn h0_hom(&self, x0: usize, x1: usize) -> Result<HomSummary, TwistedError> {
        h0_hom(&self.cat, x0, x1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomSummary {
    pub dims: BTreeMap<i64, usize>,
    pub h0: usize,
}

/// Cohomology dimensions of `(hom(X0, X1), mu^1)`.
pub fn h0_hom(cat: &AInfCategory, x0: usize, x1: usize) -> Result<HomSummary, TwistedError> {
    if cat.field.is_novikov() {
        return Err(TwistedError::NovikovPrecision);
    }
    let dims: BTreeMap<i64, usize> = cat.hom_complex(x0, x1)?.cohomology()?.into_iter().filter(|(_, g)| g.dim > 0).map(|(p, g)| (p, g.dim)).collect();
    let h0 = dims.get(&0).copied().unwrap_or(0);
    Ok(HomSummary { dims, h0 })
}

/// `h1 ∈ hom^0(Y1, Y0)`, `h2 ∈ hom^0(Y2, Y1)`, `k ∈ hom^{-1}(Y1, Y1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessCertificate {
    pub h1: SparseVec,
    pub h2: SparseVec,
    pub k: SparseVec,
}

impl ExactnessCertificate {
    pub fn zero() -> Self {
        ExactnessCertificate { h1: SparseVec::new(), h2: SparseVec::new(), k: SparseVec::new() }
    }
}

/// Triangle `Y0 -c1-> Y1 -c2-> Y2 -c3-> Y0[1]` in a category.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub y: [usize; 3],
    pub c1: SparseVec,
    pub c2: SparseVec,
    pub c3: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcyclicityEntry {
    pub object: String,
    pub acyclic: bool,
    pub cohomology: BTreeMap<i64, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub pass: bool,
    pub equations: [bool; 3],
    pub objects: Vec<AcyclicityEntry>,
}

fn elem(x: usize, y: usize, v: &SparseVec) -> Elem {
    Elem::new(x, y, v.clone())
}

/// Residuals of the three certificate equations.
fn certificate_residuals(cat: &AInfCategory, t: &Triangle, cert: &ExactnessCertificate, e_y1: &SparseVec) -> [SparseVec; 3] {
    let [y0, y1, y2] = t.y;
    let c1 = elem(y0, y1, &t.c1);
    let c2 = elem(y1, y2, &t.c2);
    let c3 = elem(y2, y0, &t.c3);
    let h1 = elem(y1, y0, &cert.h1);
    let h2 = elem(y2, y1, &cert.h2);
    let k = elem(y1, y1, &cert.k);
    let mut r1 = cat.mu1(&h1).vec;
    r1.add_signed(&cat.mu2(&c3, &c2).vec, true);
    let mut r2 = cat.mu1(&h2).vec;
    r2.add(&cat.mu2(&c1, &c3).vec);
    let mut r3 = cat.mu1(&k).vec;
    r3.add(&cat.mu2(&c1, &h1).vec);
    r3.add_signed(&cat.mu2(&h2, &c2).vec, true);
    r3.add_signed(&cat.mu(&[&c2, &c3, &c1]).vec, true);
    r3.add(e_y1);
    [r1, r2, r3]
}

fn check_degree(space: &GradedSpace, v: &SparseVec, expected: i64) -> Result<(), TwistedError> {
    if v.is_zero() {
        return Ok(());
    }
    match space.homogeneous_degree(v) {
        Some(found) if found == expected => Ok(()),
        Some(found) => Err(TwistedError::Degree { expected, found }),
        None => Err(TwistedError::Invalid(format!("inhomogeneous element {}", space.format_vec(v)))),
    }
}

/// Complex `Y2(X)[1] ⊕ Y0(X)[1] ⊕ Y1(X)` with the lower triangular boundary built from the triangle.
pub fn triangle_complex(cat: &AInfCategory, t: &Triangle, h2: &SparseVec, x: usize) -> Result<Complex, TwistedError> {
    let [y0, y1, y2] = t.y;
    let rename = |s: &GradedSpace, tag: &str, shift: i64| {
        GradedSpace::new(&cat.field, s.shift(shift).basis().iter().map(|(n, d)| (format!("{tag}:{n}"), *d)).collect())
    };
    let s2 = rename(cat.hom(x, y2), "Y2", 1)?;
    let s0 = rename(cat.hom(x, y0), "Y0", 1)?;
    let s1 = rename(cat.hom(x, y1), "Y1", 0)?;
    let (n2, n0) = (s2.dim(), s0.dim());
    let space = s2.direct_sum(&s0).direct_sum(&s1);
    let one = cat.field.one();
    let c1 = elem(y0, y1, &t.c1);
    let c3 = elem(y2, y0, &t.c3);
    let h2 = elem(y2, y1, h2);
    let mut cols = Vec::with_capacity(space.dim());
    for i in 0..n2 {
        let a = Elem::new(x, y2, SparseVec::basis(i, one.clone()));
        let mut col = cat.mu1(&a).vec;
        col.add(&cat.mu2(&c3, &a).vec.shifted(n2));
        let mut last = cat.mu2(&h2, &a).vec;
        last.add(&cat.mu(&[&a, &c3, &c1]).vec);
        col.add(&last.shifted(n2 + n0));
        cols.push(col);
    }
    for i in 0..n0 {
        let b = Elem::new(x, y0, SparseVec::basis(i, one.clone()));
        let mut col = cat.mu1(&b).vec.shifted(n2);
        col.add(&cat.mu2(&c1, &b).vec.shifted(n2 + n0));
        cols.push(col);
    }
    for i in 0..cat.hom(x, y1).dim() {
        let y = Elem::new(x, y1, SparseVec::basis(i, one.clone()));
        cols.push(cat.mu1(&y).vec.shifted(n2 + n0));
    }
    Ok(Complex::new(GradedMap::new(space.clone(), space, 1, cols)?)?)
}

/// Verifies the certificate equations and acyclicity of the triangle complex for every object.
pub fn check_exact_triangle(cat: &AInfCategory, t: &Triangle, cert: &ExactnessCertificate, e_y1: &SparseVec) -> Result<TriangleReport, TwistedError> {
    if cat.field.is_novikov() {
        return Err(TwistedError::NovikovPrecision);
    }
    let [y0, y1, y2] = t.y;
    check_degree(cat.hom(y0, y1), &t.c1, 0)?;
    check_degree(cat.hom(y1, y2), &t.c2, 0)?;
    check_degree(cat.hom(y2, y0), &t.c3, 1)?;
    check_degree(cat.hom(y1, y0), &cert.h1, 0)?;
    check_degree(cat.hom(y2, y1), &cert.h2, 0)?;
    check_degree(cat.hom(y1, y1), &cert.k, -1)?;
    let residuals = certificate_residuals(cat, t, cert, e_y1);
    let equations = [residuals[0].is_zero(), residuals[1].is_zero(), residuals[2].is_zero()];
    let mut objects = Vec::new();
    for x in 0..cat.num_objects() {
        let cx = triangle_complex(cat, t, &cert.h2, x)?;
        let cohomology: BTreeMap<i64, usize> = cx.cohomology()?.into_iter().filter(|(_, g)| g.dim > 0).map(|(p, g)| (p, g.dim)).collect();
        objects.push(AcyclicityEntry { object: cat.objects[x].clone(), acyclic: cohomology.is_empty(), cohomology });
    }
    let pass = equations.iter().all(|&b| b) && objects.iter().all(|o| o.acyclic);
    Ok(TriangleReport { pass, equations, objects })
}

/// Solves the certificate equations for `(h1, h2, k)` jointly.
pub fn solve_certificate(cat: &AInfCategory, t: &Triangle, e_y1: &SparseVec) -> Result<Option<ExactnessCertificate>, TwistedError> {
    let field = &cat.field;
    if field.is_novikov() {
        return Err(TwistedError::NovikovPrecision);
    }
    let [y0, y1, y2] = t.y;
    let unknowns: Vec<(usize, usize)> = [(cat.hom(y1, y0), 0), (cat.hom(y2, y1), 0), (cat.hom(y1, y1), -1)]
        .iter()
        .enumerate()
        .flat_map(|(slot, (space, deg))| space.indices_in_degree(*deg).into_iter().map(move |i| (slot, i)))
        .collect();
    let zero = ExactnessCertificate::zero();
    let flatten = |r: &[SparseVec; 3]| -> Vec<Scalar> {
        let dims = [cat.hom(y1, y0).dim(), cat.hom(y2, y1).dim(), cat.hom(y1, y1).dim()];
        let mut out = Vec::new();
        for (slot, v) in r.iter().enumerate() {
            for i in 0..dims[slot] {
                out.push(v.get(i).cloned().unwrap_or_else(|| field.zero()));
            }
        }
        out
    };
    let base = flatten(&certificate_residuals(cat, t, &zero, e_y1));
    let rhs: Vec<Scalar> = base.iter().map(|x| -x.clone()).collect();
    if unknowns.is_empty() {
        return Ok(rhs.iter().all(Scalar::is_zero).then_some(zero));
    }
    let mut mat = Matrix::zeros(field, rhs.len(), unknowns.len());
    for (col, &(slot, i)) in unknowns.iter().enumerate() {
        let mut cert = ExactnessCertificate::zero();
        let v = SparseVec::basis(i, field.one());
        match slot {
            0 => cert.h1 = v,
            1 => cert.h2 = v,
            _ => cert.k = v,
        }
        let r = flatten(&certificate_residuals(cat, t, &cert, e_y1));
        for (row, (x, b)) in r.iter().zip(&base).enumerate() {
            mat.set(row, col, x - b);
        }
    }
    let Some(x) = mat.solve(&rhs)? else { return Ok(None) };
    let mut cert = ExactnessCertificate::zero();
    for (&(slot, i), c) in unknowns.iter().zip(x) {
        let target = match slot {
            0 => &mut cert.h1,
            1 => &mut cert.h2,
            _ => &mut cert.k,
        };
        target.add_term(i, &c);
    }
    Ok(Some(cert))
}

/// Triangle from a cone: `Y0 -c-> Y1 -i-> C -p-> Y0[1]`, inside a twisted category containing all three.
pub fn cone_triangle(tw: &TwCategory, y0: usize, y1: usize, cone: usize, c: &SparseVec, base_units: &BTreeMap<usize, SparseVec>) -> Result<Triangle, TwistedError> {
    let (i, p) = tw.cone_maps(y0, y1, cone, base_units)?;
    Ok(Triangle { y: [y0, y1, cone], c1: c.clone(), c2: i, c3: p })
}
