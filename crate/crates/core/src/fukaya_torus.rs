use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::rational::Ratio;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ainf_core::{AInfCategory, AInfError, Gen};
use crate::coefficients::{CoeffError, FieldTag, Scalar};
use crate::graded::{GradedError, GradedSpace, SparseVec};
use crate::linalg::{LinAlgError, Matrix};

/// Exact rationals for plane geometry.
pub type Q = Ratio<i128>;
pub type Point = (Q, Q);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("direction ({0},{1}) is not a primitive integer vector")]
    NotPrimitive(i64, i64),
    #[error("lines {0} and {1} are parallel")]
    Parallel(String, String),
    #[error("lines {lines:?} pass through one point {point}; change the offsets")]
    ConcurrentLines { lines: [String; 3], point: String },
    #[error("cannot parse line spec {0:?}: expected p/q@offset#grading")]
    Parse(String),
    #[error("{0} and {1} meet in {2} points, surgery needs exactly one")]
    NotSingleIntersection(String, String, usize),
    #[error("Novikov precision exhausted ({0}); raise the area cap")]
    NovikovPrecision(String),
    #[error("area cap must be positive")]
    Cap,
    #[error(transparent)]
    AInf(#[from] AInfError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

impl From<LinAlgError> for TorusError {
    fn from(e: LinAlgError) -> Self {
        match e {
            LinAlgError::NovikovPrecision(s) => TorusError::NovikovPrecision(s),
            other => TorusError::AInf(AInfError::from(other)),
        }
    }
}

fn frac(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

fn cross(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn qcross(a: &Point, b: &Point) -> Q {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: &Point, b: &Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

pub fn to_big(x: &Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn from_big(x: &BigRational) -> Option<Q> {
    Some(Q::new(x.numer().to_i128()?, x.denom().to_i128()?))
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_point(p: &Point) -> String {
    format!("({},{})", fmt_q(&p.0), fmt_q(&p.1))
}

/// Geodesic `{x : n·x ∈ offset + Z}` with `n = (-q, p)`, graded by `shift + frac`,
/// where `frac ∈ [0,1)` is the phase of the direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusLine {
    pub p: i64,
    pub q: i64,
    pub offset: Q,
    pub shift: i64,
}

impl TorusLine {
    pub fn new(p: i64, q: i64, offset: Q, shift: i64) -> Result<Self, TorusError> {
        if p.gcd(&q) != 1 {
            return Err(TorusError::NotPrimitive(p, q));
        }
        let flip = p < 0 || (p == 0 && q < 0);
        let (p, q, offset) = if flip { (-p, -q, frac(&-offset)) } else { (p, q, frac(&offset)) };
        Ok(TorusLine { p, q, offset, shift })
    }

    /// Parses `p/q@offset#grading`; offset and grading default to 0.
    pub fn parse(s: &str) -> Result<Self, TorusError> {
        let err = || TorusError::Parse(s.to_string());
        let (rest, shift) = match s.split_once('#') {
            Some((r, g)) => (r, g.trim().parse::<i64>().map_err(|_| err())?),
            None => (s, 0),
        };
        let (dir, offset) = match rest.split_once('@') {
            Some((d, o)) => (d, parse_q(o.trim()).ok_or_else(err)?),
            None => (rest, Q::zero()),
        };
        let (p, q) = dir.split_once('/').ok_or_else(err)?;
        let p = p.trim().parse::<i64>().map_err(|_| err())?;
        let q = q.trim().parse::<i64>().map_err(|_| err())?;
        TorusLine::new(p, q, offset, shift)
    }

    pub fn direction(&self) -> (i128, i128) {
        (self.p as i128, self.q as i128)
    }

    pub fn normal(&self) -> (i128, i128) {
        (-(self.q as i128), self.p as i128)
    }

    /// Direction representative with angle in `[0, π)`.
    pub fn upper(&self) -> (i128, i128) {
        let (p, q) = self.direction();
        if q > 0 || (q == 0 && p > 0) {
            (p, q)
        } else {
            (-p, -q)
        }
    }

    /// Direction at angle `π·φ̃`.
    pub fn oriented(&self) -> (i128, i128) {
        let u = self.upper();
        if self.shift.rem_euclid(2) == 1 {
            (-u.0, -u.1)
        } else {
            u
        }
    }

    /// Compares the fractional phases of two lines.
    pub fn phase_cmp(&self, other: &TorusLine) -> Ordering {
        0.cmp(&cross(self.upper(), other.upper()))
    }

    pub fn level(&self, x: &Point) -> Q {
        let n = self.normal();
        x.0 * n.0 + x.1 * n.1
    }

    pub fn contains(&self, x: &Point) -> bool {
        (self.level(x) - self.offset).is_integer()
    }

    pub fn regraded(&self, by: i64) -> TorusLine {
        TorusLine { shift: self.shift + by, ..self.clone() }
    }

    pub fn translated(&self, t: &Point) -> TorusLine {
        let offset = frac(&(self.offset + self.level(t)));
        TorusLine { offset, ..self.clone() }
    }
}

impl fmt::Display for TorusLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}@{}#{}", self.p, self.q, fmt_q(&self.offset), self.shift)
    }
}

fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((a, b)) => {
            let b: i128 = b.trim().parse().ok()?;
            let a: i128 = a.trim().parse().ok()?;
            (b != 0).then(|| Q::new(a, b))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Degree of an intersection point as a generator of `CF(L0, L1)`: `⌈φ̃1 − φ̃0⌉`.
pub fn degree(l0: &TorusLine, l1: &TorusLine) -> i64 {
    l1.shift - l0.shift + i64::from(l1.phase_cmp(l0) == Ordering::Greater)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    #[serde(serialize_with = "ser_point")]
    pub point: Point,
    pub degree: i64,
}

fn ser_point<S: serde::Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_point(p))
}

fn intersect(n0: (i128, i128), l0: &Q, n1: (i128, i128), l1: &Q) -> Point {
    let det = Q::from_integer(cross(n0, n1));
    ((l0 * n1.1 - l1 * n0.1) / det, (l1 * n0.0 - l0 * n1.0) / det)
}

/// Points of `L0 ∩ L1` in `[0,1)²`, sorted.
pub fn intersection_points(l0: &TorusLine, l1: &TorusLine) -> Result<Vec<Point>, TorusError> {
    let (n0, n1) = (l0.normal(), l1.normal());
    let det = cross(n0, n1).abs();
    if det == 0 {
        return Err(TorusError::Parallel(l0.to_string(), l1.to_string()));
    }
    let mut pts = std::collections::BTreeSet::new();
    for a in 0..det {
        for b in 0..det {
            let x = intersect(n0, &(l0.offset + a), n1, &(l1.offset + b));
            pts.insert((frac(&x.0), frac(&x.1)));
        }
    }
    Ok(pts.into_iter().collect())
}

/// Generators of `CF(L0, L1)`.
pub fn intersections(l0: &TorusLine, l1: &TorusLine) -> Result<Vec<Generator>, TorusError> {
    let deg = degree(l0, l1);
    Ok(intersection_points(l0, l1)?.into_iter().map(|point| Generator { point, degree: deg }).collect())
}

/// Pairwise transverse lines without triple points, with their Floer generators.
#[derive(Clone, Debug)]
pub struct TorusScene {
    pub lines: Vec<TorusLine>,
    points: BTreeMap<(usize, usize), Vec<Point>>,
    lookup: BTreeMap<(usize, usize), BTreeMap<Point, usize>>,
}

impl TorusScene {
    pub fn new(lines: Vec<TorusLine>) -> Result<Self, TorusError> {
        let mut points = BTreeMap::new();
        let mut lookup = BTreeMap::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let pts = intersection_points(&lines[i], &lines[j])?;
                for (k, l) in lines.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    if let Some(x) = pts.iter().find(|x| l.contains(x)) {
                        let mut names = [i, j, k];
                        names.sort();
                        return Err(TorusError::ConcurrentLines {
                            lines: names.map(|n| lines[n].to_string()),
                            point: fmt_point(x),
                        });
                    }
                }
                let idx: BTreeMap<Point, usize> = pts.iter().cloned().enumerate().map(|(a, b)| (b, a)).collect();
                for key in [(i, j), (j, i)] {
                    points.insert(key, pts.clone());
                    lookup.insert(key, idx.clone());
                }
            }
        }
        Ok(TorusScene { lines, points, lookup })
    }

    pub fn parse(specs: &[&str]) -> Result<Self, TorusError> {
        TorusScene::new(specs.iter().map(|s| TorusLine::parse(s)).collect::<Result<_, _>>()?)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn generators(&self, i: usize, j: usize) -> Vec<Generator> {
        let deg = degree(&self.lines[i], &self.lines[j]);
        self.points.get(&(i, j)).map_or_else(Vec::new, |pts| pts.iter().map(|p| Generator { point: p.clone(), degree: deg }).collect())
    }

    pub fn num_generators(&self, i: usize, j: usize) -> usize {
        self.points.get(&(i, j)).map_or(0, Vec::len)
    }

    pub fn generator_degree(&self, i: usize, j: usize) -> i64 {
        degree(&self.lines[i], &self.lines[j])
    }

    pub fn generator_name(i: usize, j: usize, k: usize) -> String {
        format!("p{i}_{j}_{k}")
    }

    fn find(&self, i: usize, j: usize, x: &Point) -> Option<usize> {
        self.lookup.get(&(i, j))?.get(&(frac(&x.0), frac(&x.1))).copied()
    }

    /// Smallest positive distance, times `|n|`, from a lift of `line` through `v` to
    /// the intersection points of lines `a` and `b`.
    fn min_gap(&self, line: usize, v: &Point, a: usize, b: usize) -> Q {
        let l = &self.lines[line];
        let base = l.level(v);
        let pts = &self.points[&(a, b)];
        let mut best = Q::one();
        for x in pts {
            let r = frac(&(l.level(x) - base));
            if !r.is_zero() {
                let r = r.min(Q::one() - r);
                if r < best {
                    best = r;
                }
            }
        }
        best
    }
}

/// A convex polygon with boundary on lifts of `objects[0], ..., objects[d]`,
/// traversed counterclockwise from the output corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolygonWitness {
    pub objects: Vec<usize>,
    /// Chronological inputs `p_1, ..., p_d`, as generator indices.
    pub corners: Vec<usize>,
    pub output: usize,
    /// `v_0 = q`, then `v_k = p_k`.
    #[serde(serialize_with = "ser_points")]
    pub vertices: Vec<Point>,
    #[serde(serialize_with = "ser_q")]
    pub area: Q,
    /// `deg(q) − Σ deg(p_i)`.
    pub index: i64,
}

fn ser_points<S: serde::Serializer>(ps: &[Point], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(fmt_point))
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

/// Twice the signed area.
fn shoelace2(vs: &[Point]) -> Q {
    let n = vs.len();
    (0..n).map(|i| qcross(&vs[i], &vs[(i + 1) % n])).fold(Q::zero(), |a, b| a + b)
}

struct Walk<'a> {
    scene: &'a TorusScene,
    objects: &'a [usize],
    cap: Q,
    levels: Vec<Q>,
    end: Q,
    verts: Vec<Point>,
    area2: Q,
    out: Vec<PolygonWitness>,
}

impl Walk<'_> {
    fn normal(&self, k: usize) -> (i128, i128) {
        self.scene.lines[self.objects[k]].normal()
    }

    fn dir(&self, k: usize) -> (i128, i128) {
        self.scene.lines[self.objects[k]].direction()
    }

    /// Levels of lifts of line `k+1` whose meeting point with lift `k` lies
    /// within parameter `bound` of `from` along line `k`.
    fn candidates(&self, k: usize, from: &Point, bound: &Q) -> Vec<Q> {
        let n1 = self.normal(k + 1);
        let u = self.dir(k);
        let slope = Q::from_integer((n1.0 * u.0 + n1.1 * u.1).abs());
        let centre = from.0 * n1.0 + from.1 * n1.1;
        let lo = centre - bound * slope;
        let hi = centre + bound * slope;
        let off = self.scene.lines[self.objects[k + 1]].offset;
        let first = (lo - off).ceil().to_integer();
        let last = (hi - off).floor().to_integer();
        (first..=last).map(|m| off + m).collect()
    }

    fn push_vertex(&mut self, k: usize, level: Q) -> bool {
        let v = intersect(self.normal(k), &self.levels[k], self.normal(k + 1), &level);
        let v0 = &self.verts[0];
        let n = self.verts.len();
        if n >= 2 {
            let prev = &self.verts[n - 2];
            let last = &self.verts[n - 1];
            if qcross(&sub(last, prev), &sub(&v, last)) <= Q::zero() {
                return false;
            }
            let fan = qcross(&sub(last, v0), &sub(&v, v0));
            if fan <= Q::zero() || qcross(&sub(&self.verts[1], v0), &sub(&v, v0)) <= Q::zero() {
                return false;
            }
            if self.area2 + fan > self.cap * 2 {
                return false;
            }
            self.area2 += fan;
        } else if v == *v0 {
            return false;
        }
        self.levels.push(level);
        self.verts.push(v);
        true
    }

    fn pop_vertex(&mut self) {
        self.levels.pop();
        let v = self.verts.pop().expect("vertex");
        let n = self.verts.len();
        if n >= 2 {
            self.area2 -= qcross(&sub(&self.verts[n - 1], &self.verts[0]), &sub(&v, &self.verts[0]));
        }
    }

    fn run(&mut self, k: usize) {
        let d = self.objects.len() - 1;
        if k + 1 == d {
            if self.push_vertex(k, self.end) {
                self.close();
                self.pop_vertex();
            }
            return;
        }
        let last = self.verts[k].clone();
        let bound = if k == 0 {
            let o = self.objects;
            self.cap * 2 / self.scene.min_gap(o[0], &last, o[1], o[2])
        } else {
            let u = self.dir(k);
            let h = qcross(&(Q::from_integer(u.0), Q::from_integer(u.1)), &sub(&self.verts[0], &last)).abs();
            if h.is_zero() {
                return;
            }
            (self.cap * 2 - self.area2) / h
        };
        for level in self.candidates(k, &last, &bound) {
            if self.push_vertex(k, level) {
                self.run(k + 1);
                self.pop_vertex();
            }
        }
    }

    fn close(&mut self) {
        let d = self.objects.len() - 1;
        let vs = &self.verts;
        if qcross(&sub(&vs[d], &vs[d - 1]), &sub(&vs[0], &vs[d])) <= Q::zero() || qcross(&sub(&vs[0], &vs[d]), &sub(&vs[1], &vs[0])) <= Q::zero() {
            return;
        }
        let area = shoelace2(vs) / 2;
        if area > self.cap {
            return;
        }
        let o = self.objects;
        let mut corners = Vec::with_capacity(d);
        for k in 1..=d {
            let Some(i) = self.scene.find(o[k - 1], o[k], &vs[k]) else { return };
            corners.push(i);
        }
        let output = self.scene.find(o[0], o[d], &vs[0]).expect("output corner");
        let lines = &self.scene.lines;
        let index = degree(&lines[o[0]], &lines[o[d]]) - (1..=d).map(|k| degree(&lines[o[k - 1]], &lines[o[k]])).sum::<i64>();
        let w = PolygonWitness { objects: o.to_vec(), corners, output, vertices: vs.clone(), area, index };
        self.out.push(w);
    }
}

/// All polygons with boundary on `objects` (`L_0, ..., L_d`) and area at most `cap`,
/// sorted by area then vertices.
pub fn polygons(scene: &TorusScene, objects: &[usize], cap: &Q) -> Vec<PolygonWitness> {
    let d = objects.len().saturating_sub(1);
    if d < 2 || objects[0] == objects[d] || objects.windows(2).any(|w| w[0] == w[1]) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for q in &scene.points[&(objects[0], objects[d])] {
        let first = &scene.lines[objects[0]];
        let end = &scene.lines[objects[d]];
        let mut walk = Walk {
            scene,
            objects,
            cap: *cap,
            levels: vec![first.level(q)],
            end: end.level(q),
            verts: vec![q.clone()],
            area2: Q::zero(),
            out: Vec::new(),
        };
        walk.run(0);
        out.append(&mut walk.out);
    }
    out.sort_by(|a, b| a.area.cmp(&b.area).then_with(|| a.vertices.cmp(&b.vertices)));
    out
}

/// Polygons with prescribed corners `p_1, ..., p_d` and output `q`.
pub fn enumerate_polygons(scene: &TorusScene, objects: &[usize], corners: &[usize], output: usize, cap: &Q) -> Vec<PolygonWitness> {
    polygons(scene, objects, cap).into_iter().filter(|w| w.corners == corners && w.output == output).collect()
}

/// Object sequences of length `d + 1` with distinct neighbours and distinct ends.
pub fn object_sequences(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..=d {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                (0..n).filter(|&o| s.last() != Some(&o)).map(|o| {
                    let mut t = s.clone();
                    t.push(o);
                    t
                }).collect::<Vec<_>>()
            })
            .collect();
    }
    out.retain(|s| s[0] != s[d]);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuTable {
    pub d: usize,
    /// Chronological input tuple to output, each term `T^area` summed mod 2.
    pub entries: BTreeMap<Vec<Gen>, SparseVec>,
    pub rigid_violations: usize,
    pub warnings: Vec<String>,
}

/// `mu^d` of the scene over `NovikovF2(cap)`, from rigid polygons of area below the cap.
pub fn mu_d(scene: &TorusScene, d: usize, cap: &Q) -> Result<MuTable, TorusError> {
    let field = novikov_field(cap)?;
    let mut entries: BTreeMap<Vec<Gen>, SparseVec> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut rigid_violations = 0;
    for objs in object_sequences(scene.len(), d) {
        for w in polygons(scene, &objs, cap) {
            if w.index != 2 - d as i64 {
                rigid_violations += 1;
                continue;
            }
            if w.area == *cap {
                warnings.push(format!("a polygon on {:?} has area equal to the cap {}", objs, fmt_q(cap)));
                continue;
            }
            let key: Vec<Gen> = (1..=d).map(|k| Gen { src: objs[k - 1], tgt: objs[k], idx: w.corners[k - 1] }).collect();
            let term = field.monomial(to_big(&w.area), 1)?;
            entries.entry(key).or_default().add_term(w.output, &term);
        }
    }
    entries.retain(|_, v| !v.is_zero());
    Ok(MuTable { d, entries, rigid_violations, warnings })
}

pub fn novikov_field(cap: &Q) -> Result<FieldTag, TorusError> {
    if !cap.is_positive() {
        return Err(TorusError::Cap);
    }
    Ok(FieldTag::novikov_f2(to_big(cap))?)
}

#[derive(Clone, Debug)]
pub struct ExportedCategory {
    pub category: AInfCategory,
    pub warnings: Vec<String>,
}

/// The Fukaya category of the scene over `NovikovF2(cap)`, with `mu^d` for `d <= max_d`.
pub fn export_category(scene: &TorusScene, cap: &Q, max_d: usize) -> Result<ExportedCategory, TorusError> {
    let field = novikov_field(cap)?;
    let mut cat = AInfCategory::new(&field, scene.lines.iter().map(|l| l.to_string()).collect(), max_d);
    for i in 0..scene.len() {
        for j in 0..scene.len() {
            if i == j {
                continue;
            }
            let deg = scene.generator_degree(i, j);
            let basis = (0..scene.num_generators(i, j)).map(|k| (TorusScene::generator_name(i, j, k), deg)).collect();
            cat.set_hom(i, j, GradedSpace::new(&field, basis)?);
        }
    }
    let mut warnings = Vec::new();
    for d in 2..=max_d {
        let table = mu_d(scene, d, cap)?;
        if table.rigid_violations > 0 {
            warnings.push(format!("{} non-rigid polygons skipped at d = {d}", table.rigid_violations));
        }
        warnings.extend(table.warnings);
        for (k, v) in table.entries {
            cat.set_comp(k, v);
        }
    }
    cat.validate()?;
    Ok(ExportedCategory { category: cat, warnings })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryReport {
    pub l1: String,
    pub l2: String,
    pub gamma: String,
    #[serde(serialize_with = "ser_point")]
    pub p: Point,
    /// `dim CF(γ, L1)`, `dim CF(γ, L2)`.
    pub dims: (usize, usize),
    pub map_rank: usize,
    pub cone_rank: usize,
    /// `|γ · (w1 + w2)|` with `w1, w2` oriented so that `det(w1, w2) < 0`.
    pub expected: usize,
    pub equal: bool,
    pub triangles: Vec<PolygonWitness>,
}

/// Compares the rank of `H(Cone(mu^2(p, ·)): CF(γ, L2) → CF(γ, L1))` with the
/// intersection number of `γ` and the class of the surgery.
pub fn surgery_rank_check(l1: &TorusLine, l2: &TorusLine, gamma: &TorusLine, cap: &Q) -> Result<SurgeryReport, TorusError> {
    let scene = TorusScene::new(vec![l1.clone(), l2.clone(), gamma.clone()])?;
    let pts = &scene.points[&(0, 1)];
    if pts.len() != 1 {
        return Err(TorusError::NotSingleIntersection(l1.to_string(), l2.to_string(), pts.len()));
    }
    let field = novikov_field(cap)?;
    let (n1, n2) = (scene.num_generators(2, 0), scene.num_generators(2, 1));
    let mut m = Matrix::zeros(&field, n1, n2);
    let triangles = polygons(&scene, &[2, 1, 0], cap);
    for w in &triangles {
        if w.index != 0 || w.area == *cap {
            continue;
        }
        let t = field.monomial(to_big(&w.area), 1)?;
        let cur = m.get(w.output, w.corners[0]).clone();
        m.set(w.output, w.corners[0], &cur + &t);
    }
    let map_rank = m.rank()?;
    let w1 = l1.upper();
    let mut w2 = l2.upper();
    if cross(w1, w2) > 0 {
        w2 = (-w2.0, -w2.1);
    }
    let expected = cross(gamma.direction(), (w1.0 + w2.0, w1.1 + w2.1)).unsigned_abs() as usize;
    let cone_rank = n1 + n2 - 2 * map_rank;
    Ok(SurgeryReport {
        l1: l1.to_string(),
        l2: l2.to_string(),
        gamma: gamma.to_string(),
        p: pts[0].clone(),
        dims: (n1, n2),
        map_rank,
        cone_rank,
        expected,
        equal: cone_rank == expected,
        triangles,
    })
}

/// Number of intersection points by the determinant.
pub fn determinant_count(l0: &TorusLine, l1: &TorusLine) -> usize {
    cross(l0.direction(), l1.direction()).unsigned_abs() as usize
}

pub fn scalar_area(s: &Scalar) -> Vec<Q> {
    match s {
        Scalar::Nov(series) => series.terms().iter().filter_map(|(e, _)| from_big(e)).collect(),
        _ => Vec::new(),
    }
}
