use std::collections::BTreeMap;

use rand::Rng;

use crate::ainf_core::{AInfCategory, CategoryBuilder, Gen};
use crate::ainf_fun::{AInfFunctor, Prenat};
use crate::coefficients::{FieldTag, Scalar};
use crate::graded::{GradedSpace, SparseVec};
use crate::modules_yoneda::{AInfModule, PreModuleHom};
use crate::linalg::Matrix;

/// Three objects `Z0, Z1, Z2` with `x1: Z0 -> Z1`, `x2: Z1 -> Z2` (degree 0),
/// `x3: Z2 -> Z0` (degree 1), strict units and cyclic `mu^3` onto the units.
pub fn fixture_d(field: &FieldTag) -> AInfCategory {
    fixture_d_builder(field).build()
}

pub fn fixture_d_builder(field: &FieldTag) -> CategoryBuilder {
    let one = field.one();
    let mut b = CategoryBuilder::new(field, &["Z0", "Z1", "Z2"], 3);
    b.hom("Z0", "Z0", &[("e_Z0", 0)]).unwrap();
    b.hom("Z1", "Z1", &[("e_Z1", 0)]).unwrap();
    b.hom("Z2", "Z2", &[("e_Z2", 0)]).unwrap();
    b.hom("Z0", "Z1", &[("x1", 0)]).unwrap();
    b.hom("Z1", "Z2", &[("x2", 0)]).unwrap();
    b.hom("Z2", "Z0", &[("x3", 1)]).unwrap();
    for e in ["e_Z0", "e_Z1", "e_Z2"] {
        b.comp(&[e, e], &[(e, one.clone())]).unwrap();
    }
    for (a, src_unit, tgt_unit, deg) in [("x1", "e_Z0", "e_Z1", 0), ("x2", "e_Z1", "e_Z2", 0), ("x3", "e_Z2", "e_Z0", 1)] {
        b.comp(&[a, src_unit], &[(a, one.clone())]).unwrap();
        b.comp(&[tgt_unit, a], &[(a, one.signed(deg % 2 == 1))]).unwrap();
    }
    b.comp(&["x3", "x2", "x1"], &[("e_Z0", one.clone())]).unwrap();
    b.comp(&["x1", "x3", "x2"], &[("e_Z1", one.clone())]).unwrap();
    b.comp(&["x2", "x1", "x3"], &[("e_Z2", one.clone())]).unwrap();
    b
}

/// Units `e_X` of a category whose identity basis vectors are named `e_<object>`.
pub fn named_units(cat: &AInfCategory) -> BTreeMap<usize, SparseVec> {
    let mut out = BTreeMap::new();
    for (x, name) in cat.objects.iter().enumerate() {
        if let Some(i) = cat.hom(x, x).index_of(&format!("e_{name}")) {
            out.insert(x, SparseVec::basis(i, cat.field.one()));
        }
    }
    out
}

/// Differential graded matrix category.
///
/// Object `i` is a graded space `V_i` with a strictly upper triangular
/// differential. Morphisms `i -> j` are all graded maps when `i < j` in the
/// order, upper triangular maps when `i = j`, and zero otherwise.
#[derive(Clone, Debug)]
pub struct DgMatrixCategory {
    pub field: FieldTag,
    pub degrees: Vec<Vec<i64>>,
    pub differentials: Vec<Matrix>,
    /// `order[i][j]` for `i != j` enables morphisms `i -> j`.
    pub order: Vec<Vec<bool>>,
}

/// Elementary map `v_a -> v_b` between object spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Elementary {
    b: usize,
    a: usize,
}

impl DgMatrixCategory {
    fn allowed(&self, i: usize, j: usize) -> Vec<Elementary> {
        let mut out = Vec::new();
        if i != j && !self.order[i][j] {
            return out;
        }
        for b in 0..self.degrees[j].len() {
            for a in 0..self.degrees[i].len() {
                if i == j && b > a {
                    continue;
                }
                out.push(Elementary { b, a });
            }
        }
        out
    }

    fn names(&self) -> Vec<String> {
        (0..self.degrees.len()).map(|i| format!("V{i}")).collect()
    }

    /// Translates to an A∞ category: `mu^1(f) = (-1)^{|f|} d f` and
    /// `mu^2(g, f) = (-1)^{|f|} g ∘ f`, strict units `e_<object>`.
    pub fn to_ainf(&self) -> AInfCategory {
        let n = self.degrees.len();
        let names = self.names();
        let mut cat = AInfCategory::new(&self.field, names.clone(), 2);
        let mut index: BTreeMap<(usize, usize), Vec<Elementary>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let elems = self.allowed(i, j);
                if elems.is_empty() {
                    continue;
                }
                let basis = elems
                    .iter()
                    .map(|e| {
                        let name = if i == j && e.a == e.b && self.degrees[i].len() == 1 {
                            format!("e_{}", names[i])
                        } else {
                            format!("E{i}{j}_{}{}", e.b, e.a)
                        };
                        (name, self.degrees[j][e.b] - self.degrees[i][e.a])
                    })
                    .collect();
                cat.set_hom(i, j, GradedSpace::new(&self.field, basis).expect("distinct names"));
                index.insert((i, j), elems);
            }
        }
        let pos = |i: usize, j: usize, e: Elementary| index[&(i, j)].iter().position(|x| *x == e);
        for (&(i, j), elems) in &index {
            for (idx, &e) in elems.iter().enumerate() {
                let deg = self.degrees[j][e.b] - self.degrees[i][e.a];
                let odd = deg.rem_euclid(2) == 1;
                // d f = d_j f - (-1)^{|f|} f d_i
                let mut df = SparseVec::new();
                for c in 0..self.degrees[j].len() {
                    let x = self.differentials[j].get(c, e.b);
                    if !x.is_zero() {
                        let p = pos(i, j, Elementary { b: c, a: e.a }).expect("closed under d");
                        df.add_term(p, x);
                    }
                }
                for a2 in 0..self.degrees[i].len() {
                    let x = self.differentials[i].get(e.a, a2);
                    if !x.is_zero() {
                        let p = pos(i, j, Elementary { b: e.b, a: a2 }).expect("closed under d");
                        df.add_term(p, &x.signed(!odd));
                    }
                }
                cat.set_comp(vec![Gen { src: i, tgt: j, idx }], df.signed(odd));
                for k in 0..n {
                    let Some(second) = index.get(&(j, k)) else { continue };
                    for (idx2, &e2) in second.iter().enumerate() {
                        if e2.a != e.b {
                            continue;
                        }
                        let p = pos(i, k, Elementary { b: e2.b, a: e.a }).expect("closed under composition");
                        let out = SparseVec::basis(p, self.field.one().signed(odd));
                        cat.set_comp(vec![Gen { src: i, tgt: j, idx }, Gen { src: j, tgt: k, idx: idx2 }], out);
                    }
                }
            }
        }
        cat
    }

    /// Strict units: the identity map of each object space.
    pub fn units(&self, cat: &AInfCategory) -> BTreeMap<usize, SparseVec> {
        let mut out = BTreeMap::new();
        for i in 0..self.degrees.len() {
            let elems = self.allowed(i, i);
            let mut v = SparseVec::new();
            for (idx, e) in elems.iter().enumerate() {
                if e.a == e.b {
                    v.add_term(idx, &cat.field.one());
                }
            }
            out.insert(i, v);
        }
        out
    }

    /// Random instance with object spaces of dimension at most `max_dim`.
    pub fn random<R: Rng>(rng: &mut R, field: &FieldTag, objects: usize, max_dim: usize) -> Self {
        let mut degrees = Vec::new();
        let mut differentials = Vec::new();
        for _ in 0..objects {
            let dim = rng.gen_range(1..=max_dim);
            let mut degs: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=1)).collect();
            degs.sort_unstable_by(|a, b| b.cmp(a));
            let d = random_differential(rng, field, &degs);
            degrees.push(degs);
            differentials.push(d);
        }
        let mut order = vec![vec![false; objects]; objects];
        for i in 0..objects {
            for j in i + 1..objects {
                order[i][j] = rng.gen_bool(0.7);
            }
        }
        // transitivity keeps composition closed
        for k in 0..objects {
            for i in 0..objects {
                for j in 0..objects {
                    if order[i][k] && order[k][j] {
                        order[i][j] = true;
                    }
                }
            }
        }
        DgMatrixCategory { field: field.clone(), degrees, differentials, order }
    }
}

/// Strictly upper triangular degree-1 differential squaring to zero on a
/// basis sorted by decreasing degree.
fn random_differential<R: Rng>(rng: &mut R, field: &FieldTag, degs: &[i64]) -> Matrix {
    let n = degs.len();
    for _ in 0..20 {
        let mut d = Matrix::zeros(field, n, n);
        for a in 0..n {
            for b in 0..a {
                if degs[b] == degs[a] + 1 && rng.gen_bool(0.6) {
                    d.set(b, a, random_nonzero(rng, field));
                }
            }
        }
        if d.mul(&d).expect("square").is_zero() {
            return d;
        }
    }
    Matrix::zeros(field, n, n)
}

pub fn random_nonzero<R: Rng>(rng: &mut R, field: &FieldTag) -> Scalar {
    match field {
        FieldTag::Q => {
            let n: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            field.from_int(n)
        }
        _ => field.one(),
    }
}

pub fn random_scalar<R: Rng>(rng: &mut R, field: &FieldTag) -> Scalar {
    if rng.gen_bool(0.4) {
        field.zero()
    } else {
        random_nonzero(rng, field)
    }
}

/// Random vector of the given degree in `space`.
pub fn random_vector<R: Rng>(rng: &mut R, space: &GradedSpace, degree: i64) -> SparseVec {
    let field = space.field.clone();
    space.indices_in_degree(degree).into_iter().map(|i| (i, random_scalar(rng, &field))).collect()
}

/// Formal diffeomorphism of `a`: identity linear part, random terms of lengths `2..=max_d`.
pub fn random_diffeo<R: Rng>(rng: &mut R, a: &AInfCategory, max_d: usize) -> AInfFunctor {
    let mut f = AInfFunctor::identity(a);
    f.max_d = max_d;
    for d in 2..=max_d {
        for t in a.composable_tuples(d) {
            let space = a.hom(t[0].src, t[d - 1].tgt);
            let deg = t.iter().map(|g| a.deg(*g)).sum::<i64>() + 1 - d as i64;
            let v = random_vector(rng, space, deg);
            f.set_term(t, v);
        }
    }
    f
}

/// Strict dg functor scaling `hom(x, y)` by `lambda[y] / lambda[x]`.
pub fn scaling_functor(a: &AInfCategory, lambda: &[Scalar]) -> AInfFunctor {
    let mut f = AInfFunctor::identity(a);
    f.terms.clear();
    for (&(x, y), space) in a.homs() {
        let c = lambda[y].try_div(&lambda[x]).expect("nonzero scalars");
        for idx in 0..space.dim() {
            f.set_term(vec![Gen { src: x, tgt: y, idx }], SparseVec::basis(idx, c.clone()));
        }
    }
    f
}

/// Random pre-natural transformation `F0 -> F1` of degree `g` into `b`.
pub fn random_prenat<R: Rng>(
    rng: &mut R,
    a: &AInfCategory,
    b: &AInfCategory,
    f0: &AInfFunctor,
    f1: &AInfFunctor,
    g: i64,
    max_d: usize,
) -> Prenat {
    let mut t = Prenat::zero(g, max_d);
    for x in 0..a.num_objects() {
        let v = random_vector(rng, b.hom(f0.object_map[x], f1.object_map[x]), g);
        t.set_t0(x, v);
    }
    for d in 1..=max_d {
        for args in a.composable_tuples(d) {
            let space = b.hom(f0.object_map[args[0].src], f1.object_map[args[d - 1].tgt]);
            let deg = g + args.iter().map(|x| a.deg(*x)).sum::<i64>() - d as i64;
            let v = random_vector(rng, space, deg);
            t.set_term(args, v);
        }
    }
    t
}

/// `span{1, u, v}` with `|u| = 0`, `|v| = 1`, `d u = v`, `u u = u`, `u v = v`,
/// `v u = 0`, translated to A∞ signs.
pub fn span_uv(field: &FieldTag) -> AInfCategory {
    let one = field.one();
    let mut b = CategoryBuilder::new(field, &["A"], 2);
    b.hom("A", "A", &[("e_A", 0), ("u", 0), ("v", 1)]).unwrap();
    // mu^1(u) = (-1)^0 d u
    b.comp(&["u"], &[("v", one.clone())]).unwrap();
    // mu^2(a2, a1) = (-1)^{|a1|} a2 a1
    let products: [(&str, &str, &str); 8] = [
        ("e_A", "e_A", "e_A"),
        ("e_A", "u", "u"),
        ("u", "e_A", "u"),
        ("e_A", "v", "v"),
        ("v", "e_A", "v"),
        ("u", "u", "u"),
        ("u", "v", "v"),
        ("v", "u", ""),
    ];
    for (a2, a1, out) in products {
        if out.is_empty() {
            continue;
        }
        let odd = a1 == "v";
        b.comp(&[a2, a1], &[(out, one.signed(odd))]).unwrap();
    }
    b.build()
}

/// `X -> Y` with one arrow `a` of degree 0, strict units, zero differential.
pub fn a2_quiver(field: &FieldTag) -> AInfCategory {
    let one = field.one();
    let mut b = CategoryBuilder::new(field, &["X", "Y"], 2);
    b.hom("X", "X", &[("e_X", 0)]).unwrap();
    b.hom("Y", "Y", &[("e_Y", 0)]).unwrap();
    b.hom("X", "Y", &[("a", 0)]).unwrap();
    b.comp(&["e_X", "e_X"], &[("e_X", one.clone())]).unwrap();
    b.comp(&["e_Y", "e_Y"], &[("e_Y", one.clone())]).unwrap();
    b.comp(&["a", "e_X"], &[("a", one.clone())]).unwrap();
    b.comp(&["e_Y", "a"], &[("a", one.clone())]).unwrap();
    b.build()
}


/// Random pre-module homomorphism `m0 -> m1` of degree `g` on keys of length `<= max_d`.
pub fn random_module_hom<R: Rng>(rng: &mut R, m0: &AInfModule, m1: &AInfModule, g: i64, max_d: usize) -> PreModuleHom {
    PreModuleHom::tabulate(m0, g, max_d, |xb, bi, args| {
        let x0 = AInfModule::output_object(xb, args);
        let deg = g + m0.deg(xb, bi) + args.iter().map(|a| m0.base.deg(*a)).sum::<i64>() - args.len() as i64;
        random_vector(rng, m1.space(x0), deg)
    })
}

/// Random degree-`p` cocycle of `hom(x, y)`: a random class plus a random coboundary.
pub fn random_cocycle<R: Rng>(rng: &mut R, a: &AInfCategory, x: usize, y: usize, p: i64) -> SparseVec {
    let c = a.hom_complex(x, y).expect("hom complex");
    let field = a.field.clone();
    let mut v = SparseVec::new();
    for r in c.cohomology_basis(p).expect("exact field").reps {
        v.add_scaled(&r, &random_scalar(rng, &field));
    }
    let pre = random_vector(rng, a.hom(x, y), p - 1);
    v.add(&c.d.apply(&pre));
    v
}
