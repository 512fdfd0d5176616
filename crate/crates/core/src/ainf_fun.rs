use std::collections::BTreeMap;

use serde::Serialize;

use crate::ainf_core::{all_compositions, dagger_parity, AInfCategory, AInfError, Elem, Gen};
use crate::coefficients::{FieldTag, Scalar};
use crate::graded::SparseVec;
use crate::linalg::Matrix;

/// A∞ functor given by an object map and terms `F^d` on chronological basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfFunctor {
    pub object_map: Vec<usize>,
    pub terms: BTreeMap<Vec<Gen>, SparseVec>,
    pub max_d: usize,
}

impl AInfFunctor {
    pub fn identity(a: &AInfCategory) -> Self {
        let mut terms = BTreeMap::new();
        for (&(x, y), space) in a.homs() {
            for idx in 0..space.dim() {
                terms.insert(vec![Gen { src: x, tgt: y, idx }], SparseVec::basis(idx, a.field.one()));
            }
        }
        AInfFunctor { object_map: (0..a.num_objects()).collect(), terms, max_d: usize::MAX }
    }

    /// Length of the longest nonzero term.
    pub fn longest(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(1)
    }

    pub fn term(&self, inputs: &[Gen]) -> SparseVec {
        if inputs.len() > self.max_d {
            return SparseVec::new();
        }
        self.terms.get(inputs).cloned().unwrap_or_default()
    }

    /// `F^s` on chronological element arguments.
    pub fn apply(&self, args: &[&Elem]) -> Elem {
        let src = self.object_map[args[0].src];
        let tgt = self.object_map[args[args.len() - 1].tgt];
        Elem::new(src, tgt, crate::ainf_core::expand_multilinear(args, |t| self.term(t)))
    }

    pub fn set_term(&mut self, inputs: Vec<Gen>, value: SparseVec) {
        if value.is_zero() {
            self.terms.remove(&inputs);
        } else {
            self.terms.insert(inputs, value);
        }
    }

    /// Validates object map, composability and degrees `|F^d| = 1 - d`.
    pub fn validate(&self, a: &AInfCategory, b: &AInfCategory) -> Result<(), AInfError> {
        if self.object_map.len() != a.num_objects() {
            return Err(AInfError::Invalid("object map does not cover the source objects".into()));
        }
        if let Some(&bad) = self.object_map.iter().find(|&&y| y >= b.num_objects()) {
            return Err(AInfError::UnknownObject(bad));
        }
        for (inputs, out) in &self.terms {
            let d = inputs.len();
            let space = b.hom(self.object_map[inputs[0].src], self.object_map[inputs[d - 1].tgt]);
            let expected = inputs.iter().map(|g| a.deg(*g)).sum::<i64>() + 1 - d as i64;
            if !space.is_homogeneous_of(out, expected) {
                return Err(AInfError::Degree { d, inputs: a.format_tuple(inputs), expected, found: space.homogeneous_degree(out).unwrap_or(i64::MIN) });
            }
        }
        Ok(())
    }
}

/// Outputs of functor blocks `F^{s_1}, ..., F^{s_r}` applied to consecutive argument runs.
pub fn functor_blocks(f: &AInfFunctor, args: &[Gen], sizes: &[usize]) -> Vec<Elem> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        let block = &args[start..start + s];
        let src = f.object_map[block[0].src];
        let tgt = f.object_map[block[s - 1].tgt];
        let v = f.term(block);
        out.push(Elem::new(src, tgt, v));
        start += s;
    }
    out
}

/// Objects `X_0, ..., X_d` visited by a chronological tuple.
pub fn tuple_objects(args: &[Gen]) -> Vec<usize> {
    let mut objs = Vec::with_capacity(args.len() + 1);
    if let Some(first) = args.first() {
        objs.push(first.src);
    }
    objs.extend(args.iter().map(|g| g.tgt));
    objs
}

/// Sum over insertions of `mu_A^m` into a multilinear map `h`:
/// `sum_{m,n} (-1)^{✝_n + shift} h(a_d, ..., mu^m(a_{n+m}, ..., a_{n+1}), ..., a_1)`.
fn insert_mu<H>(a: &AInfCategory, args: &[Gen], shift_odd: bool, min_outer: usize, mut h: H) -> SparseVec
where
    H: FnMut(&[Gen]) -> SparseVec,
{
    let d = args.len();
    let degs: Vec<i64> = args.iter().map(|g| a.deg(*g)).collect();
    let mut res = SparseVec::new();
    for m in 1..=d.min(a.max_d) {
        if d - m + 1 < min_outer {
            continue;
        }
        for n in 0..=d - m {
            let Some(inner) = a.mu_basis(&args[n..n + m]) else { continue };
            let odd = dagger_parity(&degs[..n]) ^ shift_odd;
            let (src, tgt) = (args[n].src, args[n + m - 1].tgt);
            let mut outer: Vec<Gen> = args[..n].to_vec();
            outer.push(Gen { src, tgt, idx: 0 });
            outer.extend_from_slice(&args[n + m..]);
            for (k, c) in inner.iter() {
                outer[n] = Gen { src, tgt, idx: k };
                let v = h(&outer);
                res.add_scaled(&v, &c.signed(odd));
            }
        }
    }
    res
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorReport {
    pub pass: bool,
    pub checked: BTreeMap<usize, usize>,
    pub failure: Option<FunctorFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorFailure {
    pub d: usize,
    pub inputs_written: Vec<String>,
    pub residual_text: String,
}

/// Residual of the functor equation on one chronological basis tuple.
pub fn functor_residual(a: &AInfCategory, b: &AInfCategory, f: &AInfFunctor, args: &[Gen]) -> SparseVec {
    let d = args.len();
    let mut lhs = SparseVec::new();
    for sizes in all_compositions(d) {
        if sizes.len() > b.max_d || sizes.iter().any(|&s| s > f.max_d) {
            continue;
        }
        let blocks = functor_blocks(f, args, &sizes);
        let refs: Vec<&Elem> = blocks.iter().collect();
        lhs.add(&b.mu(&refs).vec);
    }
    let rhs = insert_mu(a, args, false, 1, |t| f.term(t));
    lhs.add_signed(&rhs, true);
    lhs
}

/// Checks the functor equations on all composable tuples up to length `up_to`.
pub fn check_functor(a: &AInfCategory, b: &AInfCategory, f: &AInfFunctor, up_to: usize) -> Result<FunctorReport, AInfError> {
    a.validate()?;
    b.validate()?;
    f.validate(a, b)?;
    let mut checked = BTreeMap::new();
    for d in 1..=up_to {
        let tuples = a.composable_tuples(d);
        checked.insert(d, tuples.len());
        for t in tuples {
            let res = functor_residual(a, b, f, &t);
            if !res.is_zero() {
                let objs = tuple_objects(&t);
                let space = b.hom(f.object_map[objs[0]], f.object_map[objs[d]]);
                return Ok(FunctorReport {
                    pass: false,
                    checked,
                    failure: Some(FunctorFailure {
                        d,
                        inputs_written: t.iter().rev().map(|g| a.gen_name(*g).to_string()).collect(),
                        residual_text: space.format_vec(&res),
                    }),
                });
            }
        }
    }
    Ok(FunctorReport { pass: true, checked, failure: None })
}

/// `(G ∘ F)^d = sum G^r(F^{s_r}, ..., F^{s_1})`.
pub fn compose_functors(a: &AInfCategory, f: &AInfFunctor, g: &AInfFunctor) -> AInfFunctor {
    let max_d = f.max_d.min(g.max_d).max(1);
    let mut out = AInfFunctor {
        object_map: f.object_map.iter().map(|&y| g.object_map[y]).collect(),
        terms: BTreeMap::new(),
        max_d,
    };
    for d in 1..=max_d.min(f.longest() * g.longest()) {
        for t in a.composable_tuples(d) {
            let mut v = SparseVec::new();
            for sizes in all_compositions(d) {
                if sizes.len() > g.max_d {
                    continue;
                }
                let blocks = functor_blocks(f, &t, &sizes);
                let refs: Vec<&Elem> = blocks.iter().collect();
                v.add(&g.apply(&refs).vec);
            }
            out.set_term(t, v);
        }
    }
    out
}

/// Pre-natural transformation between functors with equal object maps up to `F0, F1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prenat {
    pub degree: i64,
    /// `T^0_X` in `hom_B(F0 X, F1 X)`.
    pub t0: BTreeMap<usize, SparseVec>,
    pub terms: BTreeMap<Vec<Gen>, SparseVec>,
    pub max_d: usize,
}

impl Prenat {
    pub fn zero(degree: i64, max_d: usize) -> Self {
        Prenat { degree, t0: BTreeMap::new(), terms: BTreeMap::new(), max_d }
    }

    pub fn term(&self, inputs: &[Gen]) -> SparseVec {
        if inputs.len() > self.max_d {
            return SparseVec::new();
        }
        self.terms.get(inputs).cloned().unwrap_or_default()
    }

    pub fn at_object(&self, x: usize) -> SparseVec {
        self.t0.get(&x).cloned().unwrap_or_default()
    }

    pub fn set_term(&mut self, inputs: Vec<Gen>, value: SparseVec) {
        if value.is_zero() {
            self.terms.remove(&inputs);
        } else {
            self.terms.insert(inputs, value);
        }
    }

    pub fn set_t0(&mut self, x: usize, value: SparseVec) {
        if value.is_zero() {
            self.t0.remove(&x);
        } else {
            self.t0.insert(x, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.t0.is_empty() && self.terms.is_empty()
    }

    pub fn add(&self, other: &Prenat) -> Prenat {
        let mut out = self.clone();
        out.max_d = self.max_d.max(other.max_d);
        for (x, v) in &other.t0 {
            let mut cur = out.at_object(*x);
            cur.add(v);
            out.set_t0(*x, cur);
        }
        for (k, v) in &other.terms {
            let mut cur = out.terms.get(k).cloned().unwrap_or_default();
            cur.add(v);
            out.set_term(k.clone(), cur);
        }
        out
    }

    pub fn scaled(&self, c: &Scalar) -> Prenat {
        Prenat {
            degree: self.degree,
            t0: self.t0.iter().map(|(k, v)| (*k, v.scaled(c))).filter(|(_, v)| !v.is_zero()).collect(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scaled(c))).filter(|(_, v)| !v.is_zero()).collect(),
            max_d: self.max_d,
        }
    }

    /// `F0 - F1` as a degree-1 pre-natural transformation.
    pub fn difference(f0: &AInfFunctor, f1: &AInfFunctor, field: &FieldTag) -> Prenat {
        let known = f0.max_d.min(f1.max_d);
        let mut p = Prenat::zero(1, known.min(f0.longest().max(f1.longest())));
        for (k, v) in &f0.terms {
            p.set_term(k.clone(), v.clone());
        }
        let minus = Prenat { degree: 1, t0: BTreeMap::new(), terms: f1.terms.clone(), max_d: p.max_d }.scaled(&field.from_int(-1));
        truncate(&p.add(&minus), p.max_d)
    }

    /// Identity transformation `T^0_X = e_{F X}`, higher terms zero.
    pub fn unit(f: &AInfFunctor, units_b: &BTreeMap<usize, SparseVec>, max_d: usize) -> Prenat {
        let mut p = Prenat::zero(0, max_d);
        for (x, &fx) in f.object_map.iter().enumerate() {
            if let Some(e) = units_b.get(&fx) {
                p.set_t0(x, e.clone());
            }
        }
        p
    }
}

/// Pre-natural transformation setting: source, target and the functors involved.
pub struct TransformationSpace<'a> {
    pub a: &'a AInfCategory,
    pub b: &'a AInfCategory,
}

impl<'a> TransformationSpace<'a> {
    pub fn new(a: &'a AInfCategory, b: &'a AInfCategory) -> Self {
        TransformationSpace { a, b }
    }

    /// Tuples of length `0..=max_d`; length 0 is encoded by the object alone.
    fn tuples(&self, max_d: usize) -> Vec<(usize, Vec<Gen>)> {
        let mut out: Vec<(usize, Vec<Gen>)> = (0..self.a.num_objects()).map(|x| (x, Vec::new())).collect();
        for d in 1..=max_d {
            for t in self.a.composable_tuples(d) {
                out.push((t[0].src, t));
            }
        }
        out
    }

    fn chain_elems(&self, slots: &[(SlotKind, usize)], args: &[Gen], f: &[&AInfFunctor], t: &[&Prenat]) -> Option<Vec<Elem>> {
        let objs = tuple_objects(args);
        let mut elems = Vec::with_capacity(slots.len());
        let mut pos = 0;
        for &(kind, s) in slots {
            let (x0, x1) = (objs[pos], objs[pos + s]);
            let e = match kind {
                SlotKind::F(i) => {
                    let v = f[i].term(&args[pos..pos + s]);
                    Elem::new(f[i].object_map[x0], f[i].object_map[x1], v)
                }
                SlotKind::T(i) => {
                    let v = if s == 0 { t[i].at_object(x0) } else { t[i].term(&args[pos..pos + s]) };
                    // T_i goes from F_i to F_{i+1}
                    Elem::new(f[i].object_map[x0], f[i + 1].object_map[x1], v)
                }
            };
            if e.vec.is_zero() {
                return None;
            }
            elems.push(e);
            pos += s;
        }
        Some(elems)
    }

    /// `mu_Q^1(T)` for `T: F0 -> F1`.
    pub fn differential(&self, f0: &AInfFunctor, f1: &AInfFunctor, t: &Prenat) -> Prenat {
        self.differential_on(f0, f1, t, |_, _| true)
    }

    /// `mu_Q^1(T)` evaluated only on tuples accepted by `keep`.
    fn differential_on<K>(&self, f0: &AInfFunctor, f1: &AInfFunctor, t: &Prenat, keep: K) -> Prenat
    where
        K: Fn(usize, &[Gen]) -> bool,
    {
        let fs = [f0, f1];
        let ts = [t];
        let mut out = Prenat::zero(t.degree + 1, t.max_d);
        let t_shift = (t.degree - 1).rem_euclid(2) == 1;
        for (x, args) in self.tuples(t.max_d) {
            if !keep(x, &args) {
                continue;
            }
            let h = args.len();
            let degs: Vec<i64> = args.iter().map(|g| self.a.deg(*g)).collect();
            let mut v = SparseVec::new();
            for p in 0..=h {
                let prefix_odd = t_shift && dagger_parity(&degs[..p]);
                for s in 0..=h - p {
                    let q = h - p - s;
                    for c0 in all_compositions(p) {
                        for c1 in all_compositions(q) {
                            let r = c0.len() + 1 + c1.len();
                            if r > self.b.max_d {
                                continue;
                            }
                            let mut slots: Vec<(SlotKind, usize)> = c0.iter().map(|&k| (SlotKind::F(0), k)).collect();
                            slots.push((SlotKind::T(0), s));
                            slots.extend(c1.iter().map(|&k| (SlotKind::F(1), k)));
                            if let Some(elems) = self.chain_elems_obj(&slots, &args, x, &fs, &ts) {
                                let refs: Vec<&Elem> = elems.iter().collect();
                                v.add_signed(&self.b.mu(&refs).vec, prefix_odd);
                            }
                        }
                    }
                }
            }
            if h > 0 {
                // - sum (-1)^{✝_n + |T| - 1} T(..., mu_A^m, ...)
                let ins = insert_mu(self.a, &args, !t_shift, 1, |u| t.term(u));
                v.add(&ins);
            }
            if h == 0 {
                out.set_t0(x, v);
            } else {
                out.set_term(args, v);
            }
        }
        out
    }

    /// `mu_Q^2(T2, T1)` with `T1: F0 -> F1`, `T2: F1 -> F2`.
    pub fn compose(&self, f0: &AInfFunctor, f1: &AInfFunctor, f2: &AInfFunctor, t2: &Prenat, t1: &Prenat) -> Prenat {
        let fs = [f0, f1, f2];
        let ts = [t1, t2];
        let max_d = t1.max_d.min(t2.max_d);
        let mut out = Prenat::zero(t1.degree + t2.degree, max_d);
        let s1_shift = (t1.degree - 1).rem_euclid(2) == 1;
        let s2_shift = (t2.degree - 1).rem_euclid(2) == 1;
        for (x, args) in self.tuples(max_d) {
            let h = args.len();
            let degs: Vec<i64> = args.iter().map(|g| self.a.deg(*g)).collect();
            let mut v = SparseVec::new();
            for p0 in 0..=h {
                for s1 in 0..=h - p0 {
                    for p1 in 0..=h - p0 - s1 {
                        for s2 in 0..=h - p0 - s1 - p1 {
                            let p2 = h - p0 - s1 - p1 - s2;
                            let odd = (s1_shift && dagger_parity(&degs[..p0])) ^ (s2_shift && dagger_parity(&degs[..p0 + s1 + p1]));
                            for c0 in all_compositions(p0) {
                                for c1 in all_compositions(p1) {
                                    for c2 in all_compositions(p2) {
                                        let r = c0.len() + c1.len() + c2.len() + 2;
                                        if r > self.b.max_d {
                                            continue;
                                        }
                                        let mut slots: Vec<(SlotKind, usize)> = c0.iter().map(|&k| (SlotKind::F(0), k)).collect();
                                        slots.push((SlotKind::T(0), s1));
                                        slots.extend(c1.iter().map(|&k| (SlotKind::F(1), k)));
                                        slots.push((SlotKind::T(1), s2));
                                        slots.extend(c2.iter().map(|&k| (SlotKind::F(2), k)));
                                        if let Some(elems) = self.chain_elems_obj(&slots, &args, x, &fs, &ts) {
                                            let refs: Vec<&Elem> = elems.iter().collect();
                                            v.add_signed(&self.b.mu(&refs).vec, odd);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if h == 0 {
                out.set_t0(x, v);
            } else {
                out.set_term(args, v);
            }
        }
        out
    }

    fn chain_elems_obj(&self, slots: &[(SlotKind, usize)], args: &[Gen], x: usize, f: &[&AInfFunctor], t: &[&Prenat]) -> Option<Vec<Elem>> {
        if args.is_empty() {
            let mut elems = Vec::new();
            for &(kind, _) in slots {
                let e = match kind {
                    SlotKind::F(_) => unreachable!("empty tuples have no functor blocks"),
                    SlotKind::T(i) => Elem::new(f[i].object_map[x], f[i + 1].object_map[x], t[i].at_object(x)),
                };
                if e.vec.is_zero() {
                    return None;
                }
                elems.push(e);
            }
            return Some(elems);
        }
        self.chain_elems(slots, args, f, t)
    }

    /// Flattened unknowns of degree-`g` transformations up to length `max_d`.
    fn coordinates(&self, g: i64, max_d: usize, f0: &AInfFunctor, f1: &AInfFunctor, with_t0: bool) -> Vec<(Option<Vec<Gen>>, usize, usize)> {
        let mut out = Vec::new();
        for (x, args) in self.tuples(max_d) {
            if args.is_empty() {
                if !with_t0 {
                    continue;
                }
                let space = self.b.hom(f0.object_map[x], f1.object_map[x]);
                for i in space.indices_in_degree(g) {
                    out.push((None, x, i));
                }
                continue;
            }
            let objs = tuple_objects(&args);
            let space = self.b.hom(f0.object_map[objs[0]], f1.object_map[objs[args.len()]]);
            let deg = g + args.iter().map(|a| self.a.deg(*a)).sum::<i64>() - args.len() as i64;
            for i in space.indices_in_degree(deg) {
                out.push((Some(args.clone()), x, i));
            }
        }
        out
    }

    /// Some `T` of degree `g` with `mu_Q^1(T) = target` through length `max_d`.
    pub fn find_primitive(
        &self,
        f0: &AInfFunctor,
        f1: &AInfFunctor,
        g: i64,
        target: &Prenat,
        max_d: usize,
        with_t0: bool,
    ) -> Result<Option<Prenat>, AInfError> {
        let field = &self.a.field;
        if field.is_novikov() {
            return Err(AInfError::ExactFieldRequired("transformation solve".into()));
        }
        let unknowns = self.coordinates(g, max_d, f0, f1, with_t0);
        let equations = self.coordinates(g + 1, max_d, f0, f1, true);
        let eq_index: BTreeMap<(Option<Vec<Gen>>, usize, usize), usize> =
            equations.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let flatten = |p: &Prenat| -> Result<Vec<Scalar>, AInfError> {
            let mut v = vec![field.zero(); equations.len()];
            for (x, vec) in &p.t0 {
                for (i, c) in vec.iter() {
                    let k = eq_index.get(&(None, *x, i)).ok_or_else(|| AInfError::Invalid("target outside the equation space".into()))?;
                    v[*k] = c.clone();
                }
            }
            for (args, vec) in &p.terms {
                if args.len() > max_d {
                    continue;
                }
                for (i, c) in vec.iter() {
                    let k = eq_index
                        .get(&(Some(args.clone()), args[0].src, i))
                        .ok_or_else(|| AInfError::Invalid("target outside the equation space".into()))?;
                    v[*k] = c.clone();
                }
            }
            Ok(v)
        };
        let mut m = Matrix::zeros(field, equations.len(), unknowns.len());
        for (j, (args, x, i)) in unknowns.iter().enumerate() {
            let mut t = Prenat::zero(g, max_d);
            match args {
                None => t.set_t0(*x, SparseVec::basis(*i, field.one())),
                Some(a) => t.set_term(a.clone(), SparseVec::basis(*i, field.one())),
            }
            let dt = match args {
                None => self.differential_on(f0, f1, &t, |y, s| if s.is_empty() { y == *x } else { tuple_objects(s).contains(x) }),
                Some(u) => self.differential_on(f0, f1, &t, |_, s| reaches(u, s)),
            };
            let col = flatten(&dt)?;
            for (r, c) in col.into_iter().enumerate() {
                m.set(r, j, c);
            }
        }
        let rhs = flatten(target)?;
        if unknowns.is_empty() {
            return Ok(rhs.iter().all(Scalar::is_zero).then(|| Prenat::zero(g, max_d)));
        }
        let Some(x) = m.solve(&rhs)? else { return Ok(None) };
        let mut t = Prenat::zero(g, max_d);
        for ((args, obj, i), c) in unknowns.iter().zip(x) {
            if c.is_zero() {
                continue;
            }
            match args {
                None => {
                    let mut cur = t.at_object(*obj);
                    cur.add_term(*i, &c);
                    t.set_t0(*obj, cur);
                }
                Some(a) => {
                    let mut cur = t.term(a);
                    cur.add_term(*i, &c);
                    t.set_term(a.clone(), cur);
                }
            }
        }
        Ok(Some(t))
    }

    /// True when `T^0 = 0`, `|T| = 0` and `mu_Q^1(T) = F0 - F1` through length `max_d`.
    pub fn check_homotopy(&self, f0: &AInfFunctor, f1: &AInfFunctor, t: &Prenat, max_d: usize) -> bool {
        if t.degree != 0 || !t.t0.is_empty() {
            return false;
        }
        let diff = Prenat::difference(f0, f1, &self.a.field);
        let lhs = self.differential(f0, f1, &Prenat { max_d, ..t.clone() });
        truncate(&lhs, max_d) == truncate(&diff, max_d)
    }
}

#[derive(Clone, Copy, Debug)]
enum SlotKind {
    F(usize),
    T(usize),
}

/// Matrix of `H(F^1)` from `H(hom_A(x, y))` to `H(hom_B(F x, F y))` on chosen representatives.
pub fn cohomology_map(a: &AInfCategory, b: &AInfCategory, f: &AInfFunctor, x: usize, y: usize) -> Result<Vec<Vec<Scalar>>, AInfError> {
    let ha = a.cohomological_category()?;
    let hb = b.cohomological_category()?;
    let (fx, fy) = (f.object_map[x], f.object_map[y]);
    let mut cols = Vec::new();
    for (_, rep) in ha.reps(x, y) {
        let img = f.apply(&[&Elem::new(x, y, rep)]);
        let coords = hb.classify(fx, fy, &img.vec)?.ok_or_else(|| AInfError::Invalid("F^1 does not map cocycles to cocycles".into()))?;
        cols.push(coords);
    }
    Ok(cols)
}

impl<'a> TransformationSpace<'a> {
    /// A homotopy `T` (degree 0, `T^0 = 0`) with `mu_Q^1(T) = F0 - F1` through length `max_d`, if one exists.
    pub fn find_homotopy(&self, f0: &AInfFunctor, f1: &AInfFunctor, max_d: usize) -> Result<Option<Prenat>, AInfError> {
        if f0.object_map != f1.object_map {
            return Err(AInfError::Invalid("homotopic functors must agree on objects".into()));
        }
        let diff = truncate(&Prenat::difference(f0, f1, &self.a.field), max_d);
        self.find_primitive(f0, f1, 0, &diff, max_d, false)
    }
}

/// Whether a term on `u` can contribute to `mu_Q^1` on `s`: `u` occurs as a block
/// of `s`, or arises from `s` by collapsing one block.
fn reaches(u: &[Gen], s: &[Gen]) -> bool {
    if s.len() < u.len() {
        return false;
    }
    if s.windows(u.len()).any(|w| w == u) {
        return true;
    }
    (0..u.len()).any(|n| s[..n] == u[..n] && s[s.len() - (u.len() - n - 1)..] == u[n + 1..])
}

/// Restriction to tuples of length at most `max_d`.
pub fn truncate(p: &Prenat, max_d: usize) -> Prenat {
    Prenat {
        degree: p.degree,
        t0: p.t0.clone(),
        terms: p.terms.iter().filter(|(k, _)| k.len() <= max_d).map(|(k, v)| (k.clone(), v.clone())).collect(),
        max_d,
    }
}

/// Formal diffeomorphism: identity on objects, `Phi^1` invertible.
/// Returns `B` on the same spaces, truncated at `max_d`, with `Phi: A -> B` an A∞ functor.
pub fn formal_pushforward(a: &AInfCategory, phi: &AInfFunctor, max_d: usize) -> Result<(AInfCategory, AInfFunctor), AInfError> {
    let mut b = a.clone();
    for d in 1..=a.max_d {
        b.clear_comps_of_length(d);
    }
    b.max_d = max_d;
    let inv1 = invert_linear_part(a, phi)?;
    for d in 1..=max_d {
        for t in a.composable_tuples(d) {
            // mu_B^d(t) = [RHS - sum_{r<d} mu_B^r(Phi blocks)] evaluated on Phi1^{-1}(t)
            let pre: Vec<Elem> = t.iter().map(|g| Elem::new(g.src, g.tgt, inv1[g].clone())).collect();
            let pre_refs: Vec<&Elem> = pre.iter().collect();
            let value = crate::ainf_core::expand_multilinear(&pre_refs, |s| {
                let mut rhs = insert_mu(a, s, false, 1, |u| phi.term(u));
                for sizes in all_compositions(d) {
                    if sizes.len() == d {
                        continue;
                    }
                    let blocks = functor_blocks(phi, s, &sizes);
                    let refs: Vec<&Elem> = blocks.iter().collect();
                    rhs.add_signed(&b.mu(&refs).vec, true);
                }
                rhs
            });
            b.set_comp(t, value);
        }
    }
    Ok((b, phi.clone()))
}

fn invert_linear_part(a: &AInfCategory, phi: &AInfFunctor) -> Result<BTreeMap<Gen, SparseVec>, AInfError> {
    let mut out = BTreeMap::new();
    for (&(x, y), space) in a.homs() {
        let n = space.dim();
        let mut m = Matrix::zeros(&a.field, n, n);
        for j in 0..n {
            for (i, c) in phi.term(&[Gen { src: x, tgt: y, idx: j }]).iter() {
                m.set(i, j, c.clone());
            }
        }
        let inv = m.inverse()?.ok_or_else(|| AInfError::Invalid(format!("Phi^1 is not invertible on hom({x},{y})")))?;
        for j in 0..n {
            out.insert(Gen { src: x, tgt: y, idx: j }, SparseVec::from_dense(&inv.column(j)));
        }
    }
    Ok(out)
}

/// Inverse formal diffeomorphism `G` with `G ∘ Phi = Id`.
pub fn inverse_diffeo(a: &AInfCategory, phi: &AInfFunctor) -> Result<AInfFunctor, AInfError> {
    let inv1 = invert_linear_part(a, phi)?;
    let mut g = AInfFunctor { object_map: phi.object_map.clone(), terms: BTreeMap::new(), max_d: phi.max_d };
    for (gen, v) in &inv1 {
        g.set_term(vec![*gen], v.clone());
    }
    for d in 2..=phi.max_d.min(a.max_d.max(phi.longest())) {
        for t in a.composable_tuples(d) {
            let pre: Vec<Elem> = t.iter().map(|gn| Elem::new(gn.src, gn.tgt, inv1[gn].clone())).collect();
            let pre_refs: Vec<&Elem> = pre.iter().collect();
            let value = crate::ainf_core::expand_multilinear(&pre_refs, |s| {
                let mut acc = SparseVec::new();
                for sizes in all_compositions(d) {
                    if sizes.len() == d {
                        continue;
                    }
                    let blocks = functor_blocks(phi, s, &sizes);
                    let refs: Vec<&Elem> = blocks.iter().collect();
                    acc.add_signed(&g.apply(&refs).vec, true);
                }
                acc
            });
            g.set_term(t, value);
        }
    }
    Ok(g)
}

/// Truncated Hochschild complex `CC(A)` restricted to cochain lengths `<= length_cap`.
pub struct Hochschild<'a> {
    pub a: &'a AInfCategory,
    pub length_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HochschildDegree {
    pub degree: i64,
    pub dim: usize,
    /// False at window edges where the neighbouring differential is not computed.
    pub exact: bool,
    pub cochains: usize,
}

impl<'a> Hochschild<'a> {
    pub fn new(a: &'a AInfCategory, length_cap: usize) -> Self {
        Hochschild { a, length_cap }
    }

    /// Basis of `CC^r`: (tuple or object, output index).
    pub fn basis(&self, r: i64) -> Vec<(usize, Vec<Gen>, usize)> {
        let mut out = Vec::new();
        for x in 0..self.a.num_objects() {
            for i in self.a.hom(x, x).indices_in_degree(r) {
                out.push((x, Vec::new(), i));
            }
        }
        for d in 1..=self.length_cap {
            for t in self.a.composable_tuples(d) {
                let space = self.a.hom(t[0].src, t[d - 1].tgt);
                let deg = r + t.iter().map(|g| self.a.deg(*g)).sum::<i64>() - d as i64;
                for i in space.indices_in_degree(deg) {
                    out.push((t[0].src, t.clone(), i));
                }
            }
        }
        out
    }

    /// `(dh)` for a cochain `h` of degree `r`.
    pub fn differential(&self, h: &Prenat) -> Prenat {
        let a = self.a;
        let r = h.degree;
        let mut out = Prenat::zero(r + 1, self.length_cap);
        for x in 0..a.num_objects() {
            // (dh)^0 = mu^1(h^0)
            let e = Elem::new(x, x, h.at_object(x));
            if !e.vec.is_zero() {
                out.set_t0(x, a.mu1(&e).vec);
            }
        }
        for d in 1..=self.length_cap {
            for args in a.composable_tuples(d) {
                let degs: Vec<i64> = args.iter().map(|g| a.deg(*g)).collect();
                let objs = tuple_objects(&args);
                let mut v = SparseVec::new();
                for j in 0..=d {
                    if d + 1 - j > a.max_d {
                        continue;
                    }
                    for i in 0..=d - j {
                        let odd = (r + 1).rem_euclid(2) == 1 && dagger_parity(&degs[..i]);
                        let hv = if j == 0 { h.at_object(objs[i]) } else { h.term(&args[i..i + j]) };
                        if hv.is_zero() {
                            continue;
                        }
                        let mut elems: Vec<Elem> = args[..i].iter().map(|g| Elem::gen(*g, a.field.one())).collect();
                        elems.push(Elem::new(objs[i], objs[i + j], hv));
                        elems.extend(args[i + j..].iter().map(|g| Elem::gen(*g, a.field.one())));
                        let refs: Vec<&Elem> = elems.iter().collect();
                        v.add_signed(&a.mu(&refs).vec, odd);
                    }
                }
                let shift = r.rem_euclid(2) == 1;
                v.add(&insert_mu(a, &args, shift, 1, |u| h.term(u)));
                out.set_term(args, v);
            }
        }
        out
    }

    fn matrix(&self, r: i64) -> (Matrix, usize, usize) {
        let src = self.basis(r);
        let tgt = self.basis(r + 1);
        let index: BTreeMap<(usize, Vec<Gen>, usize), usize> = tgt.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut m = Matrix::zeros(&self.a.field, tgt.len(), src.len());
        for (j, (x, args, i)) in src.iter().enumerate() {
            let mut h = Prenat::zero(r, self.length_cap);
            if args.is_empty() {
                h.set_t0(*x, SparseVec::basis(*i, self.a.field.one()));
            } else {
                h.set_term(args.clone(), SparseVec::basis(*i, self.a.field.one()));
            }
            let dh = self.differential(&h);
            for (y, v) in &dh.t0 {
                for (k, c) in v.iter() {
                    m.set(index[&(*y, Vec::new(), k)], j, c.clone());
                }
            }
            for (t, v) in &dh.terms {
                for (k, c) in v.iter() {
                    m.set(index[&(t[0].src, t.clone(), k)], j, c.clone());
                }
            }
        }
        (m, src.len(), tgt.len())
    }

    /// Cohomology dimensions in degrees `lo..=hi`; edge degrees are flagged inexact.
    pub fn cohomology(&self, lo: i64, hi: i64) -> Result<Vec<HochschildDegree>, AInfError> {
        let mut ranks = BTreeMap::new();
        for r in lo - 1..=hi {
            let (m, _, _) = self.matrix(r);
            ranks.insert(r, if m.rows() == 0 || m.cols() == 0 { 0 } else { m.rank()? });
        }
        let mut out = Vec::new();
        for r in lo..=hi {
            let n = self.basis(r).len();
            let dim = n - ranks[&r] - ranks[&(r - 1)];
            out.push(HochschildDegree { degree: r, dim, exact: r != lo && r != hi, cochains: n });
        }
        Ok(out)
    }
}
