use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ainf_core::{dagger_parity, expand_multilinear, AInfCategory, AInfError, Elem, Gen};
use crate::coefficients::Scalar;
use crate::graded::{Complex, GradedError, GradedMap, GradedSpace, SparseVec};
use crate::linalg::{LinAlgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("{0} is not a cocycle")]
    NotCocycle(String),
    #[error("expected degree {expected}, found {found}")]
    Degree { expected: i64, found: i64 },
    #[error("module cohomology maps need F2 or Q coefficients")]
    NovikovPrecision,
    #[error("invalid module data: {0}")]
    Invalid(String),
    #[error(transparent)]
    AInf(#[from] AInfError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Module input on basis vectors: object of `b`, index of `b`, chronological `a_1, ..., a_{d-1}`.
pub type ModKey = (usize, usize, Vec<Gen>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// Explicit actions `mu^d(b, a_{d-1}, ..., a_1)` on basis keys.
    Table(BTreeMap<ModKey, SparseVec>),
    /// `hom(-, y)` with `mu_A`.
    Yoneda(usize),
    /// `hom(-, y0)[1] ⊕ hom(-, y1)` for a cocycle `c` in `hom(y0, y1)`.
    Cone { y0: usize, y1: usize, c: SparseVec },
}

/// Right A∞ module over `base`.
#[derive(Clone, Debug)]
pub struct AInfModule<'a> {
    pub base: &'a AInfCategory,
    pub spaces: Vec<GradedSpace>,
    pub kind: ModuleKind,
    pub max_d: usize,
}

/// Element `b` of `M(obj)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModElem {
    pub obj: usize,
    pub vec: SparseVec,
}

impl ModElem {
    pub fn new(obj: usize, vec: SparseVec) -> Self {
        ModElem { obj, vec }
    }
}

/// Expands `f` over the basis of `b` and of each `a_i`.
fn expand_module<F>(b: &ModElem, args: &[&Elem], mut f: F) -> SparseVec
where
    F: FnMut(usize, &[Gen]) -> SparseVec,
{
    let mut out = SparseVec::new();
    for (bi, cb) in b.vec.iter() {
        let v = expand_multilinear(args, |t| f(bi, t));
        out.add_scaled(&v, cb);
    }
    out
}

impl<'a> AInfModule<'a> {
    pub fn yoneda(base: &'a AInfCategory, y: usize) -> Self {
        let spaces = (0..base.num_objects()).map(|x| base.hom(x, y).clone()).collect();
        AInfModule { base, spaces, kind: ModuleKind::Yoneda(y), max_d: base.max_d }
    }

    pub fn zero(base: &'a AInfCategory) -> Self {
        let spaces = (0..base.num_objects()).map(|_| GradedSpace::zero(&base.field)).collect();
        AInfModule { base, spaces, kind: ModuleKind::Table(BTreeMap::new()), max_d: base.max_d }
    }

    pub fn table(base: &'a AInfCategory, spaces: Vec<GradedSpace>, actions: BTreeMap<ModKey, SparseVec>, max_d: usize) -> Result<Self, ModuleError> {
        if spaces.len() != base.num_objects() {
            return Err(ModuleError::Invalid("one space per object required".into()));
        }
        let m = AInfModule { base, spaces, kind: ModuleKind::Table(actions), max_d };
        m.validate()?;
        Ok(m)
    }

    /// Abstract mapping cone of `c` in `hom(y0, y1)` without the cocycle check.
    pub fn cone_unchecked(base: &'a AInfCategory, y0: usize, y1: usize, c: SparseVec) -> Self {
        let spaces = (0..base.num_objects())
            .map(|x| {
                let s0 = base.hom(x, y0).shift(1);
                let s1 = base.hom(x, y1);
                let basis = s0
                    .basis()
                    .iter()
                    .map(|(n, d)| (format!("{n}[1]"), *d))
                    .chain(s1.basis().iter().cloned())
                    .collect();
                GradedSpace::new(&base.field, basis).expect("distinct basis names")
            })
            .collect();
        AInfModule { base, spaces, kind: ModuleKind::Cone { y0, y1, c }, max_d: base.max_d }
    }

    pub fn space(&self, x: usize) -> &GradedSpace {
        &self.spaces[x]
    }

    pub fn deg(&self, x: usize, idx: usize) -> i64 {
        self.spaces[x].degree(idx)
    }

    /// `mu_M^d(b, a_{d-1}, ..., a_1)` on basis inputs; `args` chronological.
    pub fn act_basis(&self, xb: usize, bi: usize, args: &[Gen]) -> SparseVec {
        let d = args.len() + 1;
        if d > self.max_d {
            return SparseVec::new();
        }
        let a = self.base;
        let tuple_with = |g: Gen| {
            let mut t = args.to_vec();
            t.push(g);
            t
        };
        let mu = |t: &[Gen]| a.mu_basis(t).cloned().unwrap_or_default();
        match &self.kind {
            ModuleKind::Table(actions) => actions.get(&(xb, bi, args.to_vec())).cloned().unwrap_or_default(),
            ModuleKind::Yoneda(y) => mu(&tuple_with(Gen { src: xb, tgt: *y, idx: bi })),
            ModuleKind::Cone { y0, y1, c } => {
                let x0 = args.first().map_or(xb, |g| g.src);
                let off = a.hom(x0, *y0).dim();
                let n0 = a.hom(xb, *y0).dim();
                if bi < n0 {
                    let b0 = Gen { src: xb, tgt: *y0, idx: bi };
                    let mut out = mu(&tuple_with(b0));
                    let mut t = tuple_with(b0);
                    t.push(Gen { src: *y0, tgt: *y1, idx: 0 });
                    let last = t.len() - 1;
                    let mut second = SparseVec::new();
                    for (k, ck) in c.iter() {
                        t[last] = Gen { src: *y0, tgt: *y1, idx: k };
                        second.add_scaled(&mu(&t), ck);
                    }
                    out.add(&second.shifted(off));
                    out
                } else {
                    mu(&tuple_with(Gen { src: xb, tgt: *y1, idx: bi - n0 })).shifted(off)
                }
            }
        }
    }

    /// `mu_M^d(b, a_{d-1}, ..., a_1)` on elements.
    pub fn act(&self, b: &ModElem, args: &[&Elem]) -> SparseVec {
        expand_module(b, args, |bi, t| self.act_basis(b.obj, bi, t))
    }

    /// Object `X_0` receiving the output for input `b` in `M(xb)` and chronological `args`.
    pub fn output_object(xb: usize, args: &[Gen]) -> usize {
        args.first().map_or(xb, |g| g.src)
    }

    /// `mu_M^1` on `M(x)`.
    pub fn differential(&self, x: usize) -> GradedMap {
        let space = self.spaces[x].clone();
        let cols = (0..space.dim()).map(|i| self.act_basis(x, i, &[])).collect();
        GradedMap::new(space.clone(), space, 1, cols).expect("module differential has degree 1")
    }

    pub fn complex(&self, x: usize) -> Result<Complex, ModuleError> {
        Ok(Complex::new(self.differential(x))?)
    }

    /// Basis keys of total length `d` (the module input counts).
    pub fn keys(&self, d: usize) -> Vec<ModKey> {
        let mut out = Vec::new();
        if d == 1 {
            for (x, s) in self.spaces.iter().enumerate() {
                for i in 0..s.dim() {
                    out.push((x, i, Vec::new()));
                }
            }
            return out;
        }
        for t in self.base.composable_tuples(d - 1) {
            let xb = t[d - 2].tgt;
            for i in 0..self.spaces[xb].dim() {
                out.push((xb, i, t.clone()));
            }
        }
        out
    }

    /// Degree check `|mu^d| = 2 - d` on all keys up to `max_d`.
    pub fn validate(&self) -> Result<(), ModuleError> {
        for d in 1..=self.max_d {
            for (xb, bi, args) in self.keys(d) {
                let out = self.act_basis(xb, bi, &args);
                if out.is_zero() {
                    continue;
                }
                let x0 = Self::output_object(xb, &args);
                let expected = self.deg(xb, bi) + args.iter().map(|g| self.base.deg(*g)).sum::<i64>() + 2 - d as i64;
                if let Some(found) = self.spaces[x0].homogeneous_degree(&out) {
                    if found != expected {
                        return Err(ModuleError::Degree { expected, found });
                    }
                } else {
                    return Err(ModuleError::Invalid(format!("inhomogeneous action of length {d}")));
                }
            }
        }
        Ok(())
    }

    /// Residual of the module equation on one basis key.
    pub fn relation_residual(&self, xb: usize, bi: usize, args: &[Gen]) -> SparseVec {
        let d = args.len() + 1;
        let degs: Vec<i64> = args.iter().map(|g| self.base.deg(*g)).collect();
        let mut res = SparseVec::new();
        for n in 0..d {
            let inner = self.act_basis(xb, bi, &args[n..]);
            if inner.is_zero() {
                continue;
            }
            let xn = Self::output_object(xb, &args[n..]);
            let outer = self.act_vec(xn, &inner, &args[..n]);
            res.add_signed(&outer, dagger_parity(&degs[..n]));
        }
        for m in 1..d {
            for n in 0..d - m {
                let Some(inner) = self.base.mu_basis(&args[n..n + m]) else { continue };
                let (src, tgt) = (args[n].src, args[n + m - 1].tgt);
                let mut t: Vec<Gen> = args.to_vec();
                t.splice(n..n + m, [Gen { src, tgt, idx: 0 }]);
                for (k, c) in inner.iter() {
                    t[n] = Gen { src, tgt, idx: k };
                    res.add_scaled(&self.act_basis(xb, bi, &t), &c.signed(dagger_parity(&degs[..n])));
                }
            }
        }
        res
    }

    /// `mu_M(v, args)` for a vector `v` in `M(x)` and basis arguments.
    pub fn act_vec(&self, x: usize, v: &SparseVec, args: &[Gen]) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, c) in v.iter() {
            out.add_scaled(&self.act_basis(x, i, args), c);
        }
        out
    }

    pub fn format_key(&self, key: &ModKey) -> Vec<String> {
        let (xb, bi, args) = key;
        let mut out = vec![self.spaces[*xb].name(*bi).to_string()];
        out.extend(args.iter().rev().map(|g| self.base.gen_name(*g).to_string()));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub pass: bool,
    pub checked: BTreeMap<usize, usize>,
    pub failure: Option<ModuleFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleFailure {
    pub d: usize,
    pub inputs_written: Vec<String>,
    pub residual_text: String,
}

/// Checks the module equations of total length `1..=up_to`.
pub fn check_module(m: &AInfModule, up_to: usize) -> Result<ModuleReport, ModuleError> {
    m.validate()?;
    let mut checked = BTreeMap::new();
    for d in 1..=up_to {
        let keys = m.keys(d);
        checked.insert(d, keys.len());
        for key in keys {
            let res = m.relation_residual(key.0, key.1, &key.2);
            if !res.is_zero() {
                let x0 = AInfModule::output_object(key.0, &key.2);
                return Ok(ModuleReport {
                    pass: false,
                    checked,
                    failure: Some(ModuleFailure { d, inputs_written: m.format_key(&key), residual_text: m.spaces[x0].format_vec(&res) }),
                });
            }
        }
    }
    Ok(ModuleReport { pass: true, checked, failure: None })
}

/// Pre-module homomorphism `t^d(b, a_{d-1}, ..., a_1)` tabulated on basis keys of length `<= max_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreModuleHom {
    pub degree: i64,
    pub terms: BTreeMap<ModKey, SparseVec>,
    pub max_d: usize,
}

impl PreModuleHom {
    pub fn zero(degree: i64, max_d: usize) -> Self {
        PreModuleHom { degree, terms: BTreeMap::new(), max_d }
    }

    pub fn term(&self, xb: usize, bi: usize, args: &[Gen]) -> SparseVec {
        if args.len() + 1 > self.max_d {
            return SparseVec::new();
        }
        self.terms.get(&(xb, bi, args.to_vec())).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, key: ModKey, v: SparseVec) {
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn apply_vec(&self, x: usize, v: &SparseVec, args: &[Gen]) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, c) in v.iter() {
            out.add_scaled(&self.term(x, i, args), c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PreModuleHom) -> PreModuleHom {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let mut cur = out.terms.get(k).cloned().unwrap_or_default();
            cur.add(v);
            out.set(k.clone(), cur);
        }
        out
    }

    pub fn scaled(&self, c: &Scalar) -> PreModuleHom {
        let mut out = PreModuleHom::zero(self.degree, self.max_d);
        for (k, v) in &self.terms {
            out.set(k.clone(), v.scaled(c));
        }
        out
    }

    pub fn truncated(&self, max_d: usize) -> PreModuleHom {
        PreModuleHom {
            degree: self.degree,
            terms: self.terms.iter().filter(|(k, _)| k.2.len() < max_d).map(|(k, v)| (k.clone(), v.clone())).collect(),
            max_d,
        }
    }

    /// Tabulates a term function over all keys of `m0` up to `max_d`.
    pub fn tabulate<F>(m0: &AInfModule, degree: i64, max_d: usize, mut f: F) -> PreModuleHom
    where
        F: FnMut(usize, usize, &[Gen]) -> SparseVec,
    {
        let mut out = PreModuleHom::zero(degree, max_d);
        for d in 1..=max_d {
            for (xb, bi, args) in m0.keys(d) {
                let v = f(xb, bi, &args);
                out.set((xb, bi, args), v);
            }
        }
        out
    }
}

/// `♮_n = |b| + sum_{k > n} (|a_k| - 1)` parity; `args` chronological.
fn natural_parity(b_deg: i64, a_degs: &[i64], n: usize) -> bool {
    (b_deg + a_degs[n..].iter().map(|d| d - 1).sum::<i64>()).rem_euclid(2) == 1
}

/// `mu_Q^1(t)` for `t: M0 -> M1`.
pub fn module_hom_differential(m0: &AInfModule, m1: &AInfModule, t: &PreModuleHom) -> PreModuleHom {
    PreModuleHom::tabulate(m0, t.degree + 1, t.max_d, |xb, bi, args| {
        let h = args.len() + 1;
        let a = m0.base;
        let degs: Vec<i64> = args.iter().map(|g| a.deg(*g)).collect();
        let bd = m0.deg(xb, bi);
        let mut out = SparseVec::new();
        for n in 0..h {
            let odd = natural_parity(bd, &degs, n);
            let xn = AInfModule::output_object(xb, &args[n..]);
            let inner = t.term(xb, bi, &args[n..]);
            if !inner.is_zero() {
                out.add_signed(&m1.act_vec(xn, &inner, &args[..n]), odd);
            }
            let inner = m0.act_basis(xb, bi, &args[n..]);
            if !inner.is_zero() {
                out.add_signed(&t.apply_vec(xn, &inner, &args[..n]), odd);
            }
        }
        for m in 1..h {
            for n in 0..h - m {
                let Some(inner) = a.mu_basis(&args[n..n + m]) else { continue };
                let odd = natural_parity(bd, &degs, n);
                let (src, tgt) = (args[n].src, args[n + m - 1].tgt);
                let mut s: Vec<Gen> = args.to_vec();
                s.splice(n..n + m, [Gen { src, tgt, idx: 0 }]);
                for (k, c) in inner.iter() {
                    s[n] = Gen { src, tgt, idx: k };
                    out.add_scaled(&t.term(xb, bi, &s), &c.signed(odd));
                }
            }
        }
        out
    })
}

/// `mu_Q^2(t2, t1)` for `t1: M0 -> M1`, `t2: M1 -> M2`.
pub fn module_hom_compose(m0: &AInfModule, t2: &PreModuleHom, t1: &PreModuleHom) -> PreModuleHom {
    let max_d = t1.max_d.min(t2.max_d);
    PreModuleHom::tabulate(m0, t1.degree + t2.degree, max_d, |xb, bi, args| {
        let h = args.len() + 1;
        let degs: Vec<i64> = args.iter().map(|g| m0.base.deg(*g)).collect();
        let bd = m0.deg(xb, bi);
        let mut out = SparseVec::new();
        for n in 0..h {
            let inner = t1.term(xb, bi, &args[n..]);
            if inner.is_zero() {
                continue;
            }
            let xn = AInfModule::output_object(xb, &args[n..]);
            out.add_signed(&t2.apply_vec(xn, &inner, &args[..n]), natural_parity(bd, &degs, n));
        }
        out
    })
}

/// Strict unit `e_M^1(b) = (-1)^{|b|} b`.
pub fn module_unit(m: &AInfModule, max_d: usize) -> PreModuleHom {
    let one = m.base.field.one();
    PreModuleHom::tabulate(m, 0, max_d, |xb, bi, args| {
        if args.is_empty() {
            SparseVec::basis(bi, one.signed(m.deg(xb, bi).rem_euclid(2) == 1))
        } else {
            SparseVec::new()
        }
    })
}

/// `lambda(c)^d(b, a_{d-1}, ..., a_1) = mu_M^{d+1}(c, b, a_{d-1}, ..., a_1)` for `c` in `M(y)`.
pub fn lambda_map(m: &AInfModule, y: usize, c: &SparseVec, max_d: usize) -> PreModuleHom {
    let base = m.base;
    let yon = AInfModule::yoneda(base, y);
    let degree = m.space(y).homogeneous_degree(c).unwrap_or(0);
    PreModuleHom::tabulate(&yon, degree, max_d, |xb, bi, args| {
        let mut t = args.to_vec();
        t.push(Gen { src: xb, tgt: y, idx: bi });
        m.act_vec(y, c, &t)
    })
}

/// `Upsilon^1(c)` for `c` in `hom(y0, y1)`: `lambda` of the Yoneda module of `y1`.
pub fn upsilon1(base: &AInfCategory, y0: usize, y1: usize, c: &SparseVec, max_d: usize) -> PreModuleHom {
    lambda_map(&AInfModule::yoneda(base, y1), y0, c, max_d)
}

/// Abstract mapping cone with inclusion `iota: Y1 -> C` and projection `pi: C -> Y0`.
pub struct AbstractCone<'a> {
    pub module: AInfModule<'a>,
    pub iota: PreModuleHom,
    pub pi: PreModuleHom,
}

pub fn abstract_cone<'a>(base: &'a AInfCategory, y0: usize, y1: usize, c: &SparseVec, max_d: usize) -> Result<AbstractCone<'a>, ModuleError> {
    let space = base.hom(y0, y1);
    if !c.is_zero() && space.homogeneous_degree(c) != Some(0) {
        return Err(ModuleError::Degree { expected: 0, found: space.homogeneous_degree(c).unwrap_or(i64::MIN) });
    }
    if !base.mu1(&Elem::new(y0, y1, c.clone())).vec.is_zero() {
        return Err(ModuleError::NotCocycle(space.format_vec(c)));
    }
    let module = AInfModule::cone_unchecked(base, y0, y1, c.clone());
    let one = base.field.one();
    let yon1 = AInfModule::yoneda(base, y1);
    let iota = PreModuleHom::tabulate(&yon1, 0, max_d, |xb, bi, args| {
        if !args.is_empty() {
            return SparseVec::new();
        }
        let off = base.hom(xb, y0).dim();
        SparseVec::basis(off + bi, one.signed(base.hom(xb, y1).degree(bi).rem_euclid(2) == 1))
    });
    let pi = PreModuleHom::tabulate(&module, 1, max_d, |xb, bi, args| {
        let n0 = base.hom(xb, y0).dim();
        if !args.is_empty() || bi >= n0 {
            return SparseVec::new();
        }
        SparseVec::basis(bi, one.signed((base.hom(xb, y0).degree(bi) - 1).rem_euclid(2) == 1))
    });
    Ok(AbstractCone { module, iota, pi })
}

/// Some `s` of degree `g` with `mu_Q^1(s) = target` on keys of length `<= max_d`.
pub fn find_hom_primitive(m0: &AInfModule, m1: &AInfModule, g: i64, target: &PreModuleHom, max_d: usize) -> Result<Option<PreModuleHom>, ModuleError> {
    let field = &m0.base.field;
    if field.is_novikov() {
        return Err(ModuleError::NovikovPrecision);
    }
    let coords = |deg: i64| -> Vec<(ModKey, usize)> {
        let mut out = Vec::new();
        for d in 1..=max_d {
            for key in m0.keys(d) {
                let x0 = AInfModule::output_object(key.0, &key.2);
                let total = deg + m0.deg(key.0, key.1) + key.2.iter().map(|g| m0.base.deg(*g)).sum::<i64>() + 1 - d as i64;
                for i in m1.space(x0).indices_in_degree(total) {
                    out.push((key.clone(), i));
                }
            }
        }
        out
    };
    let unknowns = coords(g);
    let equations = coords(g + 1);
    let index: BTreeMap<(ModKey, usize), usize> = equations.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let flatten = |p: &PreModuleHom| -> Result<Vec<Scalar>, ModuleError> {
        let mut v = vec![field.zero(); equations.len()];
        for (k, vec) in &p.terms {
            if k.2.len() + 1 > max_d {
                continue;
            }
            for (i, c) in vec.iter() {
                let r = index.get(&(k.clone(), i)).ok_or_else(|| ModuleError::Invalid("target outside the equation space".into()))?;
                v[*r] = c.clone();
            }
        }
        Ok(v)
    };
    let rhs = flatten(target)?;
    if unknowns.is_empty() {
        return Ok(rhs.iter().all(Scalar::is_zero).then(|| PreModuleHom::zero(g, max_d)));
    }
    let mut mat = Matrix::zeros(field, equations.len(), unknowns.len());
    for (j, (key, i)) in unknowns.iter().enumerate() {
        let mut s = PreModuleHom::zero(g, max_d);
        s.set(key.clone(), SparseVec::basis(*i, field.one()));
        for (r, c) in flatten(&module_hom_differential(m0, m1, &s))?.into_iter().enumerate() {
            mat.set(r, j, c);
        }
    }
    let Some(x) = mat.solve(&rhs)? else { return Ok(None) };
    let mut s = PreModuleHom::zero(g, max_d);
    for ((key, i), c) in unknowns.into_iter().zip(x) {
        if !c.is_zero() {
            let mut cur = s.terms.get(&key).cloned().unwrap_or_default();
            cur.add_term(i, &c);
            s.set(key, cur);
        }
    }
    Ok(Some(s))
}

/// Whether `a - b` is exact in the truncated hom complex.
pub fn cohomologous(m0: &AInfModule, m1: &AInfModule, a: &PreModuleHom, b: &PreModuleHom, max_d: usize) -> Result<bool, ModuleError> {
    let diff = a.truncated(max_d).add(&b.truncated(max_d).scaled(&m0.base.field.from_int(-1)));
    Ok(find_hom_primitive(m0, m1, a.degree - 1, &diff, max_d)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyMapReport {
    pub source_dims: BTreeMap<i64, usize>,
    pub target_dims: BTreeMap<i64, usize>,
    pub ranks: BTreeMap<i64, usize>,
    pub iso: bool,
}

/// Rank of the induced map on cohomology, degree by degree, for a degree-0 chain map.
pub fn cohomology_map_report(src: &Complex, tgt: &Complex, f: &GradedMap) -> Result<CohomologyMapReport, ModuleError> {
    if src.field().is_novikov() {
        return Err(ModuleError::NovikovPrecision);
    }
    let mut source_dims = BTreeMap::new();
    let mut target_dims = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let mut degrees = src.space.degrees();
    degrees.extend(tgt.space.degrees());
    let mut iso = true;
    for p in degrees {
        let hs = src.cohomology_basis(p)?;
        let ht = tgt.cohomology_basis(p + f.degree)?;
        let mut cols = Vec::new();
        for r in &hs.reps {
            let coords = ht.classify(&f.apply(r))?.ok_or_else(|| ModuleError::Invalid("map does not send cocycles to cocycles".into()))?;
            cols.push(coords);
        }
        let rank = if cols.is_empty() || ht.dim() == 0 { 0 } else { crate::graded::matrix_from_columns(src.field(), &cols, ht.dim()).rank()? };
        if hs.dim() > 0 {
            source_dims.insert(p, hs.dim());
        }
        if ht.dim() > 0 {
            target_dims.insert(p + f.degree, ht.dim());
        }
        if rank > 0 {
            ranks.insert(p, rank);
        }
        iso &= rank == hs.dim() && rank == ht.dim();
    }
    Ok(CohomologyMapReport { source_dims, target_dims, ranks, iso })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiRepObject {
    pub object: String,
    pub report: CohomologyMapReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiRepReport {
    pub holds: bool,
    pub objects: Vec<QuasiRepObject>,
}

/// Tests whether `b ↦ (-1)^{|b|} mu_M^2(c, b)` is a quasi-isomorphism `hom(X, y) -> M(X)` for every `X`.
pub fn quasi_represents(m: &AInfModule, y: usize, c: &SparseVec) -> Result<QuasiRepReport, ModuleError> {
    let base = m.base;
    if base.field.is_novikov() {
        return Err(ModuleError::NovikovPrecision);
    }
    if !m.act_vec(y, c, &[]).is_zero() {
        return Err(ModuleError::NotCocycle(m.space(y).format_vec(c)));
    }
    let mut objects = Vec::new();
    let mut holds = true;
    for x in 0..base.num_objects() {
        let hom = base.hom(x, y).clone();
        let cols = (0..hom.dim())
            .map(|i| {
                let v = m.act_vec(y, c, &[Gen { src: x, tgt: y, idx: i }]);
                v.signed(hom.degree(i).rem_euclid(2) == 1)
            })
            .collect();
        let f = GradedMap::new(hom, m.space(x).clone(), 0, cols)?;
        let report = cohomology_map_report(&base.hom_complex(x, y)?, &m.complex(x)?, &f)?;
        holds &= report.iso;
        objects.push(QuasiRepObject { object: base.objects[x].clone(), report });
    }
    Ok(QuasiRepReport { holds, objects })
}
