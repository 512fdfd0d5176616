use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{FieldTag, Scalar};
use crate::graded::{CohomologyBasis, Complex, GradedError, GradedMap, GradedSpace, SparseVec};
use crate::linalg::LinAlgError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AInfError {
    #[error("unknown object index {0}")]
    UnknownObject(usize),
    #[error("basis index {idx} out of range for hom({src},{tgt})")]
    UnknownGenerator { src: usize, tgt: usize, idx: usize },
    #[error("inputs are not composable at position {0}")]
    NotComposable(usize),
    #[error("mu^{d} on {inputs}: output has degree {found}, expected {expected}")]
    Degree { d: usize, inputs: String, expected: i64, found: i64 },
    #[error("mu^{d} exceeds max_d = {max_d}")]
    AboveMaxD { d: usize, max_d: usize },
    #[error("operation needs an exact field: {0}")]
    ExactFieldRequired(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Basis morphism: the `idx`-th basis vector of `hom(src, tgt)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub src: usize,
    pub tgt: usize,
    pub idx: usize,
}

/// Element of `hom(src, tgt)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    pub src: usize,
    pub tgt: usize,
    pub vec: SparseVec,
}

impl Elem {
    pub fn new(src: usize, tgt: usize, vec: SparseVec) -> Self {
        Elem { src, tgt, vec }
    }

    pub fn gen(g: Gen, one: Scalar) -> Self {
        Elem { src: g.src, tgt: g.tgt, vec: SparseVec::basis(g.idx, one) }
    }

    pub fn zero(src: usize, tgt: usize) -> Self {
        Elem { src, tgt, vec: SparseVec::new() }
    }
}

/// Expands a multilinear operation given on basis tuples to element arguments.
pub fn expand_multilinear<F>(args: &[&Elem], mut f: F) -> SparseVec
where
    F: FnMut(&[Gen]) -> SparseVec,
{
    let mut out = SparseVec::new();
    if args.iter().any(|a| a.vec.is_zero()) {
        return out;
    }
    let mut tuple: Vec<Gen> = Vec::with_capacity(args.len());
    fn rec<F: FnMut(&[Gen]) -> SparseVec>(
        args: &[&Elem],
        tuple: &mut Vec<Gen>,
        coeff: Option<Scalar>,
        f: &mut F,
        out: &mut SparseVec,
    ) {
        let k = tuple.len();
        if k == args.len() {
            let v = f(tuple);
            match coeff {
                Some(c) => out.add_scaled(&v, &c),
                None => out.add(&v),
            }
            return;
        }
        let a = args[k];
        for (idx, c) in a.vec.iter() {
            tuple.push(Gen { src: a.src, tgt: a.tgt, idx });
            let next = match &coeff {
                Some(prev) => Some(prev * c),
                None => Some(c.clone()),
            };
            rec(args, tuple, next, f, out);
            tuple.pop();
        }
    }
    rec(args, &mut tuple, None, &mut f, &mut out);
    out
}

/// `✝_n = sum_{i<=n} |a_i| - n` parity for chronological arguments.
pub fn dagger_parity(degrees: &[i64]) -> bool {
    degrees.iter().map(|d| d - 1).sum::<i64>().rem_euclid(2) == 1
}

/// All ordered compositions of `n` into `parts` positive integers.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if n < parts {
            return;
        }
        for first in 1..=n - (parts - 1) {
            cur.push(first);
            rec(n - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(n, parts, &mut Vec::new(), &mut out);
    out
}

/// All ordered compositions of `n` into any number of positive parts.
pub fn all_compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n).flat_map(|r| compositions(n, r)).collect()
}

/// Finite A∞ category with structure constants on basis tuples.
///
/// Tuples are stored chronologically: `inputs[0]` is `a_1`, the morphism
/// applied first, so `mu^d(a_d, ..., a_1)` is keyed by `[a_1, ..., a_d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfCategory {
    pub field: FieldTag,
    pub objects: Vec<String>,
    pub max_d: usize,
    homs: BTreeMap<(usize, usize), GradedSpace>,
    comps: BTreeMap<Vec<Gen>, SparseVec>,
    empty: GradedSpace,
}

impl AInfCategory {
    pub fn new(field: &FieldTag, objects: Vec<String>, max_d: usize) -> Self {
        AInfCategory {
            field: field.clone(),
            objects,
            max_d,
            homs: BTreeMap::new(),
            comps: BTreeMap::new(),
            empty: GradedSpace::zero(field),
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn set_hom(&mut self, x: usize, y: usize, space: GradedSpace) {
        if space.dim() == 0 {
            self.homs.remove(&(x, y));
        } else {
            self.homs.insert((x, y), space);
        }
    }

    pub fn hom(&self, x: usize, y: usize) -> &GradedSpace {
        self.homs.get(&(x, y)).unwrap_or(&self.empty)
    }

    pub fn homs(&self) -> impl Iterator<Item = (&(usize, usize), &GradedSpace)> {
        self.homs.iter()
    }

    pub fn deg(&self, g: Gen) -> i64 {
        self.hom(g.src, g.tgt).degree(g.idx)
    }

    pub fn gen_name(&self, g: Gen) -> &str {
        self.hom(g.src, g.tgt).name(g.idx)
    }

    pub fn gens(&self, x: usize, y: usize) -> Vec<Gen> {
        (0..self.hom(x, y).dim()).map(|idx| Gen { src: x, tgt: y, idx }).collect()
    }

    pub fn comps(&self) -> &BTreeMap<Vec<Gen>, SparseVec> {
        &self.comps
    }

    /// Sets `mu^d` on chronological basis inputs, replacing any previous value.
    pub fn set_comp(&mut self, inputs: Vec<Gen>, output: SparseVec) {
        if output.is_zero() {
            self.comps.remove(&inputs);
        } else {
            self.comps.insert(inputs, output);
        }
    }

    pub fn add_comp(&mut self, inputs: Vec<Gen>, output: &SparseVec) {
        let mut cur = self.comps.remove(&inputs).unwrap_or_default();
        cur.add(output);
        self.set_comp(inputs, cur);
    }

    pub fn clear_comps_of_length(&mut self, d: usize) {
        self.comps.retain(|k, _| k.len() != d);
    }

    /// `mu^d` on a chronological basis tuple.
    pub fn mu_basis(&self, inputs: &[Gen]) -> Option<&SparseVec> {
        if inputs.len() > self.max_d {
            return None;
        }
        self.comps.get(inputs)
    }

    /// `mu^d` on chronological element arguments.
    pub fn mu(&self, args: &[&Elem]) -> Elem {
        let src = args[0].src;
        let tgt = args[args.len() - 1].tgt;
        let vec = if args.len() > self.max_d {
            SparseVec::new()
        } else {
            expand_multilinear(args, |t| self.comps.get(t).cloned().unwrap_or_default())
        };
        Elem { src, tgt, vec }
    }

    pub fn mu1(&self, e: &Elem) -> Elem {
        self.mu(&[e])
    }

    /// `mu^2(a2, a1)`.
    pub fn mu2(&self, a2: &Elem, a1: &Elem) -> Elem {
        self.mu(&[a1, a2])
    }

    pub fn elem_degree(&self, e: &Elem) -> Option<i64> {
        self.hom(e.src, e.tgt).homogeneous_degree(&e.vec)
    }

    /// Differential `mu^1` on `hom(x, y)` as a graded map.
    pub fn mu1_map(&self, x: usize, y: usize) -> GradedMap {
        let space = self.hom(x, y).clone();
        let columns = self
            .gens(x, y)
            .into_iter()
            .map(|g| self.mu_basis(&[g]).cloned().unwrap_or_default())
            .collect();
        GradedMap::new(space.clone(), space, 1, columns).expect("validated degrees")
    }

    pub fn hom_complex(&self, x: usize, y: usize) -> Result<Complex, AInfError> {
        Ok(Complex::new(self.mu1_map(x, y))?)
    }

    pub fn format_tuple(&self, chronological: &[Gen]) -> String {
        let names: Vec<&str> = chronological.iter().rev().map(|g| self.gen_name(*g)).collect();
        format!("({})", names.join(", "))
    }

    /// Checks composability, degrees and `d <= max_d` of every structure constant.
    pub fn validate(&self) -> Result<(), AInfError> {
        for (&(x, y), _) in &self.homs {
            if x >= self.objects.len() {
                return Err(AInfError::UnknownObject(x));
            }
            if y >= self.objects.len() {
                return Err(AInfError::UnknownObject(y));
            }
        }
        for (inputs, out) in &self.comps {
            let d = inputs.len();
            if d == 0 {
                return Err(AInfError::Invalid("mu^0 is not part of the structure".into()));
            }
            if d > self.max_d {
                return Err(AInfError::AboveMaxD { d, max_d: self.max_d });
            }
            for (i, g) in inputs.iter().enumerate() {
                if g.idx >= self.hom(g.src, g.tgt).dim() {
                    return Err(AInfError::UnknownGenerator { src: g.src, tgt: g.tgt, idx: g.idx });
                }
                if i > 0 && inputs[i - 1].tgt != g.src {
                    return Err(AInfError::NotComposable(i));
                }
            }
            let target = self.hom(inputs[0].src, inputs[d - 1].tgt);
            let expected: i64 = inputs.iter().map(|g| self.deg(*g)).sum::<i64>() + 2 - d as i64;
            for (k, _) in out.iter() {
                if k >= target.dim() {
                    return Err(AInfError::Invalid(format!("output index {k} out of range")));
                }
                if target.degree(k) != expected {
                    return Err(AInfError::Degree {
                        d,
                        inputs: self.format_tuple(inputs),
                        expected,
                        found: target.degree(k),
                    });
                }
            }
        }
        Ok(())
    }

    /// Composable chronological basis tuples of length `d`, sorted in written order.
    pub fn composable_tuples(&self, d: usize) -> Vec<Vec<Gen>> {
        let mut from: BTreeMap<usize, Vec<Gen>> = BTreeMap::new();
        for (&(x, y), space) in &self.homs {
            for idx in 0..space.dim() {
                from.entry(x).or_default().push(Gen { src: x, tgt: y, idx });
            }
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(d);
        fn rec(from: &BTreeMap<usize, Vec<Gen>>, d: usize, cur: &mut Vec<Gen>, out: &mut Vec<Vec<Gen>>) {
            if cur.len() == d {
                out.push(cur.clone());
                return;
            }
            let candidates: Vec<Gen> = match cur.last() {
                None => from.values().flatten().copied().collect(),
                Some(g) => from.get(&g.tgt).cloned().unwrap_or_default(),
            };
            for g in candidates {
                cur.push(g);
                rec(from, d, cur, out);
                cur.pop();
            }
        }
        if d > 0 {
            rec(&from, d, &mut cur, &mut out);
        }
        out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        out
    }

    /// Left side of the A∞ relation of order `d` on a chronological basis tuple.
    pub fn relation_residual(&self, args: &[Gen]) -> SparseVec {
        let d = args.len();
        let one = self.field.one();
        let degs: Vec<i64> = args.iter().map(|g| self.deg(*g)).collect();
        let mut res = SparseVec::new();
        for m in 1..=d.min(self.max_d) {
            let outer_len = d - m + 1;
            if outer_len > self.max_d {
                continue;
            }
            for n in 0..=d - m {
                let Some(inner) = self.mu_basis(&args[n..n + m]) else { continue };
                let odd = dagger_parity(&degs[..n]);
                let src = args[n].src;
                let tgt = args[n + m - 1].tgt;
                let mut outer: Vec<Gen> = Vec::with_capacity(outer_len);
                outer.extend_from_slice(&args[..n]);
                outer.push(Gen { src, tgt, idx: 0 });
                outer.extend_from_slice(&args[n + m..]);
                for (k, c) in inner.iter() {
                    outer[n] = Gen { src, tgt, idx: k };
                    if let Some(v) = self.mu_basis(&outer) {
                        let coeff = if c.is_one() && !odd { one.clone() } else { c.signed(odd) };
                        res.add_scaled(v, &coeff);
                    }
                }
            }
        }
        res
    }

    /// Checks the A∞ relations of orders `1..=up_to`; reports the first failure in
    /// (order, written-order tuple) lexicographic order.
    pub fn check_relations(&self, up_to: usize) -> Result<RelationReport, AInfError> {
        self.check_relations_on(up_to, |_| true)
    }

    /// Relations on the tuples whose object sequence `X_0, ..., X_d` satisfies `keep`.
    pub fn check_relations_on<P: Fn(&[usize]) -> bool>(&self, up_to: usize, keep: P) -> Result<RelationReport, AInfError> {
        self.validate()?;
        let mut checked = BTreeMap::new();
        for d in 1..=up_to {
            let mut tuples = self.composable_tuples(d);
            tuples.retain(|t| keep(&crate::ainf_fun::tuple_objects(t)));
            checked.insert(d, tuples.len());
            for t in tuples {
                let res = self.relation_residual(&t);
                if !res.is_zero() {
                    return Ok(RelationReport {
                        pass: false,
                        checked,
                        failure: Some(RelationFailure {
                            d,
                            inputs_written: t.iter().rev().map(|g| self.gen_name(*g).to_string()).collect(),
                            inputs: t.clone(),
                            residual: res.clone(),
                            residual_text: self.hom(t[0].src, t[d - 1].tgt).format_vec(&res),
                        }),
                    });
                }
            }
        }
        Ok(RelationReport { pass: true, checked, failure: None })
    }

    /// Strict or cohomological unitality of the supplied units `e_X`.
    pub fn check_units(&self, units: &BTreeMap<usize, SparseVec>, mode: UnitMode) -> Result<UnitReport, AInfError> {
        self.validate()?;
        let one = self.field.one();
        let fail = |msg: String| Ok(UnitReport { pass: false, failure: Some(msg) });
        for x in 0..self.objects.len() {
            let Some(e) = units.get(&x) else {
                return fail(format!("no unit supplied for {}", self.objects[x]));
            };
            let space = self.hom(x, x);
            if !space.is_homogeneous_of(e, 0) || e.is_zero() {
                return fail(format!("unit of {} is not a nonzero degree-0 element", self.objects[x]));
            }
        }
        let unit = |x: usize| Elem::new(x, x, units[&x].clone());
        match mode {
            UnitMode::Strict => {
                for x in 0..self.objects.len() {
                    if !self.mu1(&unit(x)).vec.is_zero() {
                        return fail(format!("mu^1(e_{}) != 0", self.objects[x]));
                    }
                }
                for (&(x, y), _) in &self.homs {
                    for g in self.gens(x, y) {
                        let a = Elem::gen(g, one.clone());
                        let left = self.mu2(&unit(y), &a).vec.signed(self.deg(g).rem_euclid(2) == 1);
                        if left != a.vec {
                            return fail(format!("(-1)^|a| mu^2(e, {}) != {}", self.gen_name(g), self.gen_name(g)));
                        }
                        if self.mu2(&a, &unit(x)).vec != a.vec {
                            return fail(format!("mu^2({}, e) != {}", self.gen_name(g), self.gen_name(g)));
                        }
                    }
                }
                for d in 3..=self.max_d {
                    for t in self.composable_tuples(d - 1) {
                        let objs: Vec<usize> = std::iter::once(t[0].src).chain(t.iter().map(|g| g.tgt)).collect();
                        for slot in 0..d {
                            let ex = unit(objs[slot]);
                            let elems: Vec<Elem> = t.iter().map(|g| Elem::gen(*g, one.clone())).collect();
                            let mut args: Vec<&Elem> = elems.iter().collect();
                            args.insert(slot, &ex);
                            if !self.mu(&args).vec.is_zero() {
                                return fail(format!(
                                    "mu^{d} with the unit of {} in slot {} on {} is nonzero",
                                    self.objects[objs[slot]],
                                    d - slot,
                                    self.format_tuple(&t)
                                ));
                            }
                        }
                    }
                }
                Ok(UnitReport { pass: true, failure: None })
            }
            UnitMode::Cohomological => {
                let h = self.cohomological_category()?;
                for x in 0..self.objects.len() {
                    if h.classify(x, x, &units[&x])?.is_none() {
                        return fail(format!("e_{} is not a cocycle", self.objects[x]));
                    }
                }
                for (&(x, y), _) in &self.homs {
                    let reps = h.reps(x, y);
                    for (i, (deg, r)) in reps.iter().enumerate() {
                        let a = Elem::new(x, y, r.clone());
                        let left = self.mu2(&unit(y), &a).vec.signed(deg.rem_euclid(2) == 1);
                        let right = self.mu2(&a, &unit(x)).vec;
                        let expect: Vec<Scalar> =
                            (0..reps.len()).map(|j| if i == j { one.clone() } else { self.field.zero() }).collect();
                        if h.classify(x, y, &left)?.as_ref() != Some(&expect) {
                            return fail(format!("[e_{}] is not a left unit in cohomology", self.objects[y]));
                        }
                        if h.classify(x, y, &right)?.as_ref() != Some(&expect) {
                            return fail(format!("[e_{}] is not a right unit in cohomology", self.objects[x]));
                        }
                    }
                }
                Ok(UnitReport { pass: true, failure: None })
            }
        }
    }

    /// `H(A)`: cohomology of every hom complex with the composition `[a2][a1] = (-1)^{|a1|} [mu^2(a2, a1)]`.
    pub fn cohomological_category(&self) -> Result<CohomCategory, AInfError> {
        if self.field.is_novikov() {
            return Err(AInfError::ExactFieldRequired("cohomology representatives".into()));
        }
        let mut groups = BTreeMap::new();
        for x in 0..self.objects.len() {
            for y in 0..self.objects.len() {
                let c = self.hom_complex(x, y)?;
                let mut by_degree = BTreeMap::new();
                for p in c.space.degrees() {
                    by_degree.insert(p, c.cohomology_basis(p)?);
                }
                groups.insert((x, y), by_degree);
            }
        }
        Ok(CohomCategory { field: self.field.clone(), objects: self.objects.clone(), groups })
    }

    /// Structure maps of the bar construction and the one-object sign convention.
    pub fn suspend_dictionary(&self) -> SuspensionDictionary {
        let mut b = BTreeMap::new();
        let mut m = BTreeMap::new();
        for (inputs, out) in &self.comps {
            let n = inputs.len();
            // m_n(a_1, ..., a_n) = (-1)^{n + sum (n-i)|a_i|} mu^n(a_n, ..., a_1)
            let exp: i64 = n as i64 + inputs.iter().enumerate().map(|(i, g)| (n - 1 - i) as i64 * self.deg(*g)).sum::<i64>();
            m.insert(inputs.clone(), out.signed(exp.rem_euclid(2) == 1));
            b.insert(inputs.clone(), out.clone());
        }
        SuspensionDictionary { category: self.clone(), b, m }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnitMode {
    Strict,
    Cohomological,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitReport {
    pub pass: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationFailure {
    pub d: usize,
    /// Chronological basis tuple.
    #[serde(skip)]
    pub inputs: Vec<Gen>,
    /// The same tuple as written, `a_d` first.
    pub inputs_written: Vec<String>,
    #[serde(skip)]
    pub residual: SparseVec,
    pub residual_text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub pass: bool,
    pub checked: BTreeMap<usize, usize>,
    pub failure: Option<RelationFailure>,
}

/// Cohomology category with class coordinates over exact fields.
#[derive(Clone, Debug)]
pub struct CohomCategory {
    pub field: FieldTag,
    pub objects: Vec<String>,
    groups: BTreeMap<(usize, usize), BTreeMap<i64, CohomologyBasis>>,
}

impl CohomCategory {
    /// Representatives of `H(hom(x, y))` in degree order, with their degrees.
    pub fn reps(&self, x: usize, y: usize) -> Vec<(i64, SparseVec)> {
        self.groups
            .get(&(x, y))
            .map(|g| g.iter().flat_map(|(p, b)| b.reps.iter().map(move |r| (*p, r.clone()))).collect())
            .unwrap_or_default()
    }

    pub fn dims(&self, x: usize, y: usize) -> BTreeMap<i64, usize> {
        self.groups
            .get(&(x, y))
            .map(|g| g.iter().map(|(p, b)| (*p, b.dim())).filter(|(_, d)| *d > 0).collect())
            .unwrap_or_default()
    }

    pub fn total_dim(&self, x: usize, y: usize) -> usize {
        self.dims(x, y).values().sum()
    }

    /// Coordinates of a cocycle's class in the flattened basis of [`Self::reps`].
    pub fn classify(&self, x: usize, y: usize, v: &SparseVec) -> Result<Option<Vec<Scalar>>, AInfError> {
        let Some(groups) = self.groups.get(&(x, y)) else {
            return Ok(if v.is_zero() { Some(Vec::new()) } else { None });
        };
        let mut out = Vec::new();
        for (&p, basis) in groups {
            let part: SparseVec = v
                .iter()
                .filter(|(k, _)| basis_degree_matches(groups, p, *k))
                .map(|(k, c)| (k, c.clone()))
                .collect();
            match basis.classify(&part)? {
                Some(coords) => out.extend(coords),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

fn basis_degree_matches(groups: &BTreeMap<i64, CohomologyBasis>, p: i64, k: usize) -> bool {
    groups.get(&p).map_or(false, |b| b.contains_index(k))
}

/// Bar-construction maps `b_n` and one-object maps `m_n` attached to the
/// stored structure constants, keyed by chronological inputs.
#[derive(Clone, Debug)]
pub struct SuspensionDictionary {
    category: AInfCategory,
    pub b: BTreeMap<Vec<Gen>, SparseVec>,
    pub m: BTreeMap<Vec<Gen>, SparseVec>,
}

impl SuspensionDictionary {
    fn apply(&self, table: &BTreeMap<Vec<Gen>, SparseVec>, args: &[Gen]) -> SparseVec {
        table.get(args).cloned().unwrap_or_default()
    }

    /// `sum b(1^r ⊗ b_s ⊗ 1^t)` with Koszul signs on suspended inputs; `None` when all vanish.
    pub fn b_relations_fail(&self, up_to: usize) -> Option<(usize, Vec<Gen>)> {
        let cat = &self.category;
        for n in 1..=up_to {
            for t in cat.composable_tuples(n) {
                let sdeg: Vec<i64> = t.iter().map(|g| cat.deg(*g) - 1).collect();
                let mut res = SparseVec::new();
                for s in 1..=n {
                    for r in 0..=n - s {
                        let inner = self.apply(&self.b, &t[r..r + s]);
                        let sign = sdeg[..r].iter().sum::<i64>().rem_euclid(2) == 1;
                        for (k, c) in inner.iter() {
                            let mut outer = t[..r].to_vec();
                            outer.push(Gen { src: t[r].src, tgt: t[r + s - 1].tgt, idx: k });
                            outer.extend_from_slice(&t[r + s..]);
                            res.add_scaled(&self.apply(&self.b, &outer), &c.signed(sign));
                        }
                    }
                }
                if !res.is_zero() {
                    return Some((n, t));
                }
            }
        }
        None
    }

    /// `sum (-1)^{r+st} m(1^r ⊗ m_s ⊗ 1^t)` with Koszul signs; `None` when all vanish.
    pub fn m_relations_fail(&self, up_to: usize) -> Option<(usize, Vec<Gen>)> {
        let cat = &self.category;
        for n in 1..=up_to {
            for tup in cat.composable_tuples(n) {
                let deg: Vec<i64> = tup.iter().map(|g| cat.deg(*g)).collect();
                let mut res = SparseVec::new();
                for s in 1..=n {
                    for r in 0..=n - s {
                        let t = n - r - s;
                        let inner = self.apply(&self.m, &tup[r..r + s]);
                        let koszul = (2 - s as i64) * deg[..r].iter().sum::<i64>();
                        let sign = (r as i64 + (s * t) as i64 + koszul).rem_euclid(2) == 1;
                        for (k, c) in inner.iter() {
                            let mut outer = tup[..r].to_vec();
                            outer.push(Gen { src: tup[r].src, tgt: tup[r + s - 1].tgt, idx: k });
                            outer.extend_from_slice(&tup[r + s..]);
                            res.add_scaled(&self.apply(&self.m, &outer), &c.signed(sign));
                        }
                    }
                }
                if !res.is_zero() {
                    return Some((n, tup));
                }
            }
        }
        None
    }
}

/// Builds a category from globally unique basis names.
#[derive(Clone, Debug)]
pub struct CategoryBuilder {
    cat: AInfCategory,
    names: BTreeMap<String, Gen>,
}

impl CategoryBuilder {
    pub fn new(field: &FieldTag, objects: &[&str], max_d: usize) -> Self {
        CategoryBuilder { cat: AInfCategory::new(field, objects.iter().map(|s| s.to_string()).collect(), max_d), names: BTreeMap::new() }
    }

    pub fn field(&self) -> &FieldTag {
        &self.cat.field
    }

    fn object(&self, name: &str) -> Result<usize, AInfError> {
        self.cat.object_index(name).ok_or_else(|| AInfError::Invalid(format!("unknown object {name}")))
    }

    pub fn hom(&mut self, x: &str, y: &str, basis: &[(&str, i64)]) -> Result<&mut Self, AInfError> {
        let (xi, yi) = (self.object(x)?, self.object(y)?);
        if self.cat.hom(xi, yi).dim() > 0 {
            return Err(AInfError::Invalid(format!("hom({x},{y}) declared twice")));
        }
        for (idx, (n, _)) in basis.iter().enumerate() {
            if self.names.insert(n.to_string(), Gen { src: xi, tgt: yi, idx }).is_some() {
                return Err(AInfError::Invalid(format!("basis name {n} used twice")));
            }
        }
        let space = GradedSpace::new(&self.cat.field, basis.iter().map(|(n, d)| (n.to_string(), *d)).collect())?;
        self.cat.set_hom(xi, yi, space);
        Ok(self)
    }

    pub fn gen(&self, name: &str) -> Result<Gen, AInfError> {
        self.names.get(name).copied().ok_or_else(|| AInfError::Invalid(format!("unknown basis element {name}")))
    }

    /// Vector in `hom(x, y)` from named coefficients.
    pub fn vector(&self, terms: &[(&str, Scalar)]) -> Result<(usize, usize, SparseVec), AInfError> {
        let mut ends = None;
        let mut v = SparseVec::new();
        for (n, c) in terms {
            let g = self.gen(n)?;
            match ends {
                None => ends = Some((g.src, g.tgt)),
                Some(e) if e != (g.src, g.tgt) => {
                    return Err(AInfError::Invalid(format!("{n} lies in a different hom space")));
                }
                _ => {}
            }
            v.add_term(g.idx, c);
        }
        let (x, y) = ends.ok_or_else(|| AInfError::Invalid("empty linear combination".into()))?;
        Ok((x, y, v))
    }

    /// Sets `mu^d(inputs)`, inputs written `a_d` first.
    pub fn comp(&mut self, written: &[&str], output: &[(&str, Scalar)]) -> Result<&mut Self, AInfError> {
        let mut chrono: Vec<Gen> = written.iter().map(|n| self.gen(n)).collect::<Result<_, _>>()?;
        chrono.reverse();
        if chrono.is_empty() {
            return Err(AInfError::Invalid("composition with no inputs".into()));
        }
        for i in 1..chrono.len() {
            if chrono[i - 1].tgt != chrono[i].src {
                return Err(AInfError::NotComposable(i));
            }
        }
        let (src, tgt) = (chrono[0].src, chrono[chrono.len() - 1].tgt);
        let mut out = SparseVec::new();
        for (n, c) in output {
            let g = self.gen(n)?;
            if (g.src, g.tgt) != (src, tgt) {
                return Err(AInfError::Invalid(format!("output {n} is not in hom({}, {})", self.cat.objects[src], self.cat.objects[tgt])));
            }
            out.add_term(g.idx, c);
        }
        self.cat.set_comp(chrono, out);
        Ok(self)
    }

    pub fn names(&self) -> &BTreeMap<String, Gen> {
        &self.names
    }

    pub fn category(&self) -> &AInfCategory {
        &self.cat
    }

    pub fn build(self) -> AInfCategory {
        self.cat
    }
}

/// Chronological tuple of element arguments from basis generators.
pub fn gens_to_elems(gens: &[Gen], one: &Scalar) -> Vec<Elem> {
    gens.iter().map(|g| Elem::gen(*g, one.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(all_compositions(4).len(), 8);
        assert_eq!(all_compositions(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn dagger_is_reduced_degree_sum() {
        assert!(!dagger_parity(&[]));
        assert!(dagger_parity(&[0]));
        assert!(!dagger_parity(&[0, 2]));
        assert!(!dagger_parity(&[1]));
    }
}
