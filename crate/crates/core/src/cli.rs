use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ainf_core::{AInfCategory, CategoryBuilder, Gen, UnitMode};
use crate::ainf_fun::{check_functor, cohomology_map, Hochschild};
use crate::coefficients::{parse_rational, FieldTag, Scalar};
use crate::fixtures::random_nonzero;
use crate::fukaya_torus::{self as torus, from_big, to_big, TorusError, TorusLine, TorusScene, Q};
use crate::graded::{matrix_from_columns, GradedMap, GradedSpace, SparseVec};
use crate::modules_yoneda::{check_module, AInfModule, ModKey};
use crate::transfer::{default_cap, transfer, Contraction, HomContraction};
use crate::twisted::{check_exact_triangle, check_mc, cone_triangle, solve_certificate, TwCategory, TwistedComplex};

pub const SCHEMA: &str = "ainf/1";
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{path}{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Schema { path: String, line: Option<usize>, msg: String },
    #[error("{0}")]
    Input(String),
    #[error("{msg}; {hint}")]
    Compute { msg: String, hint: String },
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        let hint = match &e {
            TorusError::NovikovPrecision(_) => "rerun with a larger --area-cap",
            TorusError::ConcurrentLines { .. } => "change the offsets so no three lines meet",
            TorusError::Parallel(..) => "use pairwise non-parallel slopes",
            TorusError::Parse(_) | TorusError::NotPrimitive(..) => "lines are written p/q@offset#grading with gcd(p,q) = 1",
            _ => "",
        };
        if hint.is_empty() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute { msg: e.to_string(), hint: hint.into() }
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    let msg = e.to_string();
    let hint = if msg.contains("Novikov") { "raise the Novikov cutoff" } else { "check the input structure" };
    CliError::Compute { msg, hint: hint.into() }
}

/// Explicit module table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDef {
    pub name: String,
    pub spaces: Vec<GradedSpace>,
    pub actions: BTreeMap<ModKey, SparseVec>,
    pub max_d: usize,
}

impl ModuleDef {
    pub fn module<'a>(&self, base: &'a AInfCategory) -> Result<AInfModule<'a>, CliError> {
        AInfModule::table(base, self.spaces.clone(), self.actions.clone(), self.max_d).map_err(|e| CliError::Input(format!("module {}: {e}", self.name)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractionDef {
    Auto,
    Trivial,
    Explicit(Contraction),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDef {
    pub lines: Vec<TorusLine>,
    pub area_cap: Q,
    pub max_d: usize,
}

impl TorusDef {
    pub fn to_json(&self) -> Value {
        json!({
            "lines": self.lines.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "area_cap": fmt_q(&self.area_cap),
            "max_d": self.max_d,
        })
    }
}

fn fmt_q(q: &Q) -> String {
    to_big(q).to_string()
}

/// A parsed definition file.
#[derive(Clone, Debug)]
pub struct Definition {
    pub category: AInfCategory,
    pub units: Option<BTreeMap<usize, SparseVec>>,
    pub modules: Vec<ModuleDef>,
    pub contraction: Option<ContractionDef>,
    pub torus: Option<TorusDef>,
    pub warnings: Vec<String>,
}

impl Definition {
    pub fn from_category(category: AInfCategory) -> Self {
        Definition { category, units: None, modules: Vec::new(), contraction: None, torus: None, warnings: Vec::new() }
    }

    /// Normalized document: fixed key order, compositions in basis order, zero terms dropped.
    pub fn to_json(&self) -> Value {
        let cat = &self.category;
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA));
        doc.insert("field".into(), cat.field.to_json());
        doc.insert("objects".into(), json!(cat.objects));
        doc.insert("max_d".into(), json!(cat.max_d));
        let homs: Vec<Value> = cat
            .homs()
            .filter(|(_, s)| s.dim() > 0)
            .map(|(&(x, y), s)| json!({"from": cat.objects[x], "to": cat.objects[y], "basis": basis_json(s)}))
            .collect();
        doc.insert("homs".into(), Value::Array(homs));
        let comps: Vec<Value> = cat
            .comps()
            .iter()
            .map(|(t, v)| {
                let written: Vec<&str> = t.iter().rev().map(|g| cat.gen_name(*g)).collect();
                json!({"d": t.len(), "inputs": written, "output": lincomb_json(cat.hom(t[0].src, t[t.len() - 1].tgt), v)})
            })
            .collect();
        doc.insert("comps".into(), Value::Array(comps));
        if let Some(units) = &self.units {
            let m: Map<String, Value> = units.iter().map(|(&x, v)| (cat.objects[x].clone(), lincomb_json(cat.hom(x, x), v))).collect();
            doc.insert("units".into(), Value::Object(m));
        }
        if !self.modules.is_empty() {
            doc.insert("modules".into(), Value::Array(self.modules.iter().map(|m| module_json(cat, m)).collect()));
        }
        if let Some(c) = &self.contraction {
            let v = match c {
                ContractionDef::Auto => json!("auto"),
                ContractionDef::Trivial => json!("trivial"),
                ContractionDef::Explicit(c) => Value::Array(c.pairs.iter().map(|(&(x, y), hc)| contraction_json(cat, x, y, hc)).collect()),
            };
            doc.insert("contraction".into(), v);
        }
        if let Some(t) = &self.torus {
            doc.insert("torus".into(), t.to_json());
        }
        Value::Object(doc)
    }

    pub fn normalized(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("json")
    }

    pub fn digest(&self) -> String {
        digest_of(&self.to_json())
    }
}

pub fn digest_of(v: &Value) -> String {
    hex::encode(Sha256::digest(serde_json::to_string(v).expect("json").as_bytes()))
}

fn basis_json(s: &GradedSpace) -> Value {
    Value::Array(s.basis().iter().map(|(n, d)| json!([n, d])).collect())
}

fn lincomb_json(space: &GradedSpace, v: &SparseVec) -> Value {
    Value::Object(v.iter().map(|(i, c)| (space.name(i).to_string(), c.to_json())).collect())
}

fn module_json(cat: &AInfCategory, m: &ModuleDef) -> Value {
    let spaces: Map<String, Value> =
        m.spaces.iter().enumerate().filter(|(_, s)| s.dim() > 0).map(|(x, s)| (cat.objects[x].clone(), basis_json(s))).collect();
    let actions: Vec<Value> = m
        .actions
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(key, v)| {
            let (xb, bi, args) = key;
            let mut inputs = vec![m.spaces[*xb].name(*bi).to_string()];
            inputs.extend(args.iter().rev().map(|g| cat.gen_name(*g).to_string()));
            let out = AInfModule::output_object(*xb, args);
            json!({"inputs": inputs, "output": lincomb_json(&m.spaces[out], v)})
        })
        .collect();
    json!({"name": m.name, "max_d": m.max_d, "spaces": spaces, "actions": actions})
}

fn map_json(source: &GradedSpace, target: &GradedSpace, f: &GradedMap) -> Value {
    Value::Object(
        (0..source.dim()).filter(|&i| !f.column(i).is_zero()).map(|i| (source.name(i).to_string(), lincomb_json(target, f.column(i)))).collect(),
    )
}

fn contraction_json(cat: &AInfCategory, x: usize, y: usize, hc: &HomContraction) -> Value {
    let big = cat.hom(x, y);
    json!({
        "from": cat.objects[x],
        "to": cat.objects[y],
        "small": basis_json(&hc.small),
        "f1": map_json(&hc.small, big, &hc.f1),
        "g1": map_json(big, &hc.small, &hc.g1),
        "t1": map_json(big, big, &hc.t1),
    })
}

/// Source text with helpers locating schema errors.
struct Cx<'s> {
    src: &'s str,
}

impl<'s> Cx<'s> {
    /// Line of the `n`-th occurrence of each quoted needle in turn.
    fn line(&self, anchors: &[(&str, usize)]) -> Option<usize> {
        let mut pos = 0;
        let mut found = None;
        for (needle, n) in anchors {
            let quoted = format!("\"{needle}\"");
            let mut at = pos;
            let mut hit = None;
            for _ in 0..=*n {
                match self.src[at..].find(&quoted) {
                    Some(i) => {
                        hit = Some(at + i);
                        at = at + i + quoted.len();
                    }
                    None => {
                        hit = None;
                        break;
                    }
                }
            }
            match hit {
                Some(h) => {
                    pos = h;
                    found = Some(h);
                }
                None => break,
            }
        }
        found.map(|h| self.src[..h].matches('\n').count() + 1)
    }

    fn err(&self, path: impl Into<String>, anchors: &[(&str, usize)], msg: impl Into<String>) -> CliError {
        CliError::Schema { path: path.into(), line: self.line(anchors), msg: msg.into() }
    }
}

fn as_str<'v>(cx: &Cx, v: &'v Value, path: &str, anchors: &[(&str, usize)]) -> Result<&'v str, CliError> {
    v.as_str().ok_or_else(|| cx.err(path, anchors, "expected a string"))
}

fn as_array<'v>(cx: &Cx, v: &'v Value, path: &str, anchors: &[(&str, usize)]) -> Result<&'v Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| cx.err(path, anchors, "expected an array"))
}

fn as_usize(cx: &Cx, v: &Value, path: &str, anchors: &[(&str, usize)]) -> Result<usize, CliError> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| cx.err(path, anchors, "expected a non-negative integer"))
}

fn check_keys(cx: &Cx, obj: &Map<String, Value>, allowed: &[&str], path: &str, anchors: &[(&str, usize)]) -> Result<(), CliError> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            let mut a = anchors.to_vec();
            a.push((k.as_str(), 0));
            return Err(cx.err(path, &a, format!("unknown key {k:?}")));
        }
    }
    Ok(())
}

fn basis_of(cx: &Cx, v: &Value, path: &str, anchors: &[(&str, usize)]) -> Result<Vec<(String, i64)>, CliError> {
    let mut out = Vec::new();
    for (i, e) in as_array(cx, v, path, anchors)?.iter().enumerate() {
        let pair = e.as_array().filter(|p| p.len() == 2);
        let parsed = pair.and_then(|p| Some((p[0].as_str()?.to_string(), p[1].as_i64()?)));
        out.push(parsed.ok_or_else(|| cx.err(format!("{path}[{i}]"), anchors, "basis entries are [name, degree]"))?);
    }
    Ok(out)
}

fn lincomb_of(cx: &Cx, field: &FieldTag, v: &Value, path: &str, anchors: &[(&str, usize)]) -> Result<Vec<(String, Scalar)>, CliError> {
    let pairs: Vec<(String, &Value)> = match v {
        Value::Object(m) => m.iter().map(|(k, c)| (k.clone(), c)).collect(),
        Value::Array(a) => {
            let mut out = Vec::new();
            for (i, e) in a.iter().enumerate() {
                let p = e.as_array().filter(|p| p.len() == 2).and_then(|p| Some((p[0].as_str()?.to_string(), &p[1])));
                out.push(p.ok_or_else(|| cx.err(format!("{path}[{i}]"), anchors, "terms are [name, coefficient]"))?);
            }
            out
        }
        _ => return Err(cx.err(path, anchors, "expected a linear combination")),
    };
    pairs
        .into_iter()
        .map(|(n, c)| {
            let s = field.parse_json(c).map_err(|e| {
                let mut a = anchors.to_vec();
                a.push((n.as_str(), 0));
                cx.err(format!("{path}.{n}"), &a, e.to_string())
            })?;
            Ok((n, s))
        })
        .collect()
}

fn refs(v: &[(String, Scalar)]) -> Vec<(&str, Scalar)> {
    v.iter().map(|(n, c)| (n.as_str(), c.clone())).collect()
}

/// Parses and validates a definition file.
pub fn parse_definition(src: &str) -> Result<Definition, CliError> {
    let v: Value = serde_json::from_str(src).map_err(|e| CliError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })?;
    let cx = Cx { src };
    let top = v.as_object().ok_or_else(|| cx.err("$", &[], "the document must be an object"))?;
    check_keys(&cx, top, &["schema", "field", "objects", "max_d", "homs", "comps", "units", "modules", "contraction", "torus"], "$", &[])?;
    match top.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => {}
        Some(s) => return Err(cx.err("schema", &[("schema", 0)], format!("unsupported schema {s:?}, expected {SCHEMA:?}"))),
        None => return Err(cx.err("schema", &[], format!("missing schema version {SCHEMA:?}"))),
    }
    let field_v = top.get("field").ok_or_else(|| cx.err("field", &[], "missing field"))?;
    let field = FieldTag::from_json(field_v).map_err(|e| cx.err("field", &[("field", 0)], e.to_string()))?;
    let objects: Vec<String> = as_array(&cx, top.get("objects").unwrap_or(&Value::Null), "objects", &[("objects", 0)])?
        .iter()
        .enumerate()
        .map(|(i, o)| as_str(&cx, o, &format!("objects[{i}]"), &[("objects", 0)]).map(str::to_string))
        .collect::<Result<_, _>>()?;
    if objects.is_empty() {
        return Err(cx.err("objects", &[("objects", 0)], "at least one object is required"));
    }
    let mut seen = BTreeSet::new();
    for o in &objects {
        if !seen.insert(o) {
            return Err(cx.err("objects", &[("objects", 0), (o, 0)], format!("object {o} listed twice")));
        }
    }
    let empty = Vec::new();
    let comps_v = match top.get("comps") {
        Some(c) => as_array(&cx, c, "comps", &[("comps", 0)])?,
        None => &empty,
    };
    let longest = comps_v.iter().filter_map(|c| c.get("inputs").and_then(Value::as_array).map(Vec::len)).max().unwrap_or(0);
    let max_d = match top.get("max_d") {
        Some(m) => as_usize(&cx, m, "max_d", &[("max_d", 0)])?,
        None => longest.max(2),
    };
    if max_d == 0 {
        return Err(cx.err("max_d", &[("max_d", 0)], "max_d must be at least 1"));
    }
    let names: Vec<&str> = objects.iter().map(String::as_str).collect();
    let mut b = CategoryBuilder::new(&field, &names, max_d);
    if let Some(h) = top.get("homs") {
        for (i, e) in as_array(&cx, h, "homs", &[("homs", 0)])?.iter().enumerate() {
            let path = format!("homs[{i}]");
            let anchors = [("homs", 0), ("basis", i)];
            let o = e.as_object().ok_or_else(|| cx.err(&path, &anchors, "expected an object"))?;
            check_keys(&cx, o, &["from", "to", "basis"], &path, &anchors)?;
            let from = as_str(&cx, o.get("from").unwrap_or(&Value::Null), &format!("{path}.from"), &anchors)?;
            let to = as_str(&cx, o.get("to").unwrap_or(&Value::Null), &format!("{path}.to"), &anchors)?;
            let basis = basis_of(&cx, o.get("basis").unwrap_or(&Value::Null), &format!("{path}.basis"), &anchors)?;
            let basis_ref: Vec<(&str, i64)> = basis.iter().map(|(n, d)| (n.as_str(), *d)).collect();
            b.hom(from, to, &basis_ref).map_err(|e| cx.err(&path, &anchors, e.to_string()))?;
        }
    }
    let mut done = BTreeSet::new();
    for (i, e) in comps_v.iter().enumerate() {
        let path = format!("comps[{i}]");
        let anchors = [("comps", 0), ("inputs", i)];
        let o = e.as_object().ok_or_else(|| cx.err(&path, &anchors, "expected an object"))?;
        check_keys(&cx, o, &["d", "inputs", "output"], &path, &anchors)?;
        let inputs: Vec<&str> = as_array(&cx, o.get("inputs").unwrap_or(&Value::Null), &format!("{path}.inputs"), &anchors)?
            .iter()
            .map(|n| as_str(&cx, n, &format!("{path}.inputs"), &anchors))
            .collect::<Result<_, _>>()?;
        if let Some(d) = o.get("d") {
            if as_usize(&cx, d, &format!("{path}.d"), &anchors)? != inputs.len() {
                return Err(cx.err(format!("{path}.d"), &anchors, format!("d does not match the {} inputs", inputs.len())));
            }
        }
        if inputs.len() > max_d {
            return Err(cx.err(&path, &anchors, format!("mu^{} exceeds max_d = {max_d}", inputs.len())));
        }
        if !done.insert(inputs.clone()) {
            return Err(cx.err(&path, &anchors, "inputs listed twice"));
        }
        let output = lincomb_of(&cx, &field, o.get("output").unwrap_or(&Value::Null), &format!("{path}.output"), &anchors)?;
        b.comp(&inputs, &refs(&output)).map_err(|e| cx.err(&path, &anchors, e.to_string()))?;
    }
    let name_map = b.names().clone();
    let category = b.build();
    category.validate().map_err(|e| {
        let anchor = match &e {
            crate::ainf_core::AInfError::Degree { inputs, .. } => inputs.trim_matches(|c| c == '(' || c == ')').split(',').next().unwrap_or("").trim().to_string(),
            _ => String::new(),
        };
        cx.err("comps", &[("comps", 0), (anchor.as_str(), 0)], e.to_string())
    })?;
    let mut warnings = Vec::new();
    if category.comps().is_empty() {
        warnings.push("no compositions: every relation holds vacuously".into());
    }
    let units = match top.get("units") {
        None => None,
        Some(u) => {
            let o = u.as_object().ok_or_else(|| cx.err("units", &[("units", 0)], "expected an object keyed by object name"))?;
            let mut out = BTreeMap::new();
            for (name, lc) in o {
                let anchors = [("units", 0), (name.as_str(), 0)];
                let x = category.object_index(name).ok_or_else(|| cx.err(format!("units.{name}"), &anchors, "unknown object"))?;
                let terms = lincomb_of(&cx, &field, lc, &format!("units.{name}"), &anchors)?;
                let mut v = SparseVec::new();
                for (n, c) in &terms {
                    match name_map.get(n) {
                        Some(g) if (g.src, g.tgt) == (x, x) => v.add_term(g.idx, c),
                        _ => return Err(cx.err(format!("units.{name}"), &anchors, format!("{n} is not in hom({name},{name})"))),
                    }
                }
                out.insert(x, v);
            }
            Some(out)
        }
    };
    let mut modules = Vec::new();
    if let Some(m) = top.get("modules") {
        for (i, e) in as_array(&cx, m, "modules", &[("modules", 0)])?.iter().enumerate() {
            modules.push(parse_module(&cx, &category, &name_map, e, i)?);
        }
    }
    let contraction = match top.get("contraction") {
        None => None,
        Some(Value::String(s)) if s == "auto" => Some(ContractionDef::Auto),
        Some(Value::String(s)) if s == "trivial" => Some(ContractionDef::Trivial),
        Some(c) => Some(ContractionDef::Explicit(parse_contraction(&cx, &category, c)?)),
    };
    let torus = match top.get("torus") {
        None => None,
        Some(t) => Some(parse_torus(&cx, t)?),
    };
    Ok(Definition { category, units, modules, contraction, torus, warnings })
}

fn parse_module(cx: &Cx, cat: &AInfCategory, names: &BTreeMap<String, Gen>, v: &Value, i: usize) -> Result<ModuleDef, CliError> {
    let path = format!("modules[{i}]");
    let anchors = [("modules", 0), ("spaces", i)];
    let o = v.as_object().ok_or_else(|| cx.err(&path, &anchors, "expected an object"))?;
    check_keys(cx, o, &["name", "max_d", "spaces", "actions"], &path, &anchors)?;
    let name = as_str(cx, o.get("name").unwrap_or(&Value::Null), &format!("{path}.name"), &anchors)?.to_string();
    let max_d = match o.get("max_d") {
        Some(m) => as_usize(cx, m, &format!("{path}.max_d"), &anchors)?,
        None => cat.max_d,
    };
    let mut spaces = vec![GradedSpace::zero(&cat.field); cat.num_objects()];
    let mut elems: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let sp = o.get("spaces").and_then(Value::as_object).ok_or_else(|| cx.err(format!("{path}.spaces"), &anchors, "expected an object keyed by object name"))?;
    for (obj, basis) in sp {
        let a = [("modules", 0), ("spaces", i), (obj.as_str(), 0)];
        let x = cat.object_index(obj).ok_or_else(|| cx.err(format!("{path}.spaces.{obj}"), &a, "unknown object"))?;
        let basis = basis_of(cx, basis, &format!("{path}.spaces.{obj}"), &a)?;
        for (k, (n, _)) in basis.iter().enumerate() {
            if elems.insert(n.clone(), (x, k)).is_some() {
                return Err(cx.err(format!("{path}.spaces.{obj}"), &a, format!("module element {n} named twice")));
            }
        }
        spaces[x] = GradedSpace::new(&cat.field, basis).map_err(|e| cx.err(format!("{path}.spaces.{obj}"), &a, e.to_string()))?;
    }
    let mut actions = BTreeMap::new();
    let empty = Vec::new();
    let acts = match o.get("actions") {
        Some(a) => as_array(cx, a, &format!("{path}.actions"), &anchors)?,
        None => &empty,
    };
    for (k, e) in acts.iter().enumerate() {
        let apath = format!("{path}.actions[{k}]");
        let a = [("modules", 0), ("spaces", i), ("inputs", k)];
        let inputs: Vec<&str> = as_array(cx, e.get("inputs").unwrap_or(&Value::Null), &apath, &a)?
            .iter()
            .map(|n| as_str(cx, n, &apath, &a))
            .collect::<Result<_, _>>()?;
        let Some((b, rest)) = inputs.split_first() else {
            return Err(cx.err(&apath, &a, "inputs must start with a module element"));
        };
        let &(xb, bi) = elems.get(*b).ok_or_else(|| cx.err(&apath, &a, format!("unknown module element {b}")))?;
        let mut args: Vec<Gen> = rest.iter().map(|n| names.get(*n).copied().ok_or_else(|| cx.err(&apath, &a, format!("unknown morphism {n}")))).collect::<Result<_, _>>()?;
        args.reverse();
        let chain_ok = args.windows(2).all(|w| w[0].tgt == w[1].src) && args.last().is_none_or(|g| g.tgt == xb);
        if !chain_ok {
            return Err(cx.err(&apath, &a, "inputs are not composable"));
        }
        let out_obj = AInfModule::output_object(xb, &args);
        let mut out = SparseVec::new();
        for (n, c) in lincomb_of(cx, &cat.field, e.get("output").unwrap_or(&Value::Null), &format!("{apath}.output"), &a)? {
            match elems.get(&n) {
                Some(&(x, idx)) if x == out_obj => out.add_term(idx, &c),
                _ => return Err(cx.err(&apath, &a, format!("{n} is not an element of {name}({})", cat.objects[out_obj]))),
            }
        }
        if actions.insert((xb, bi, args), out).is_some() {
            return Err(cx.err(&apath, &a, "inputs listed twice"));
        }
    }
    let def = ModuleDef { name, spaces, actions, max_d };
    def.module(cat).map_err(|e| cx.err(&path, &anchors, e.to_string()))?;
    Ok(def)
}

fn parse_contraction(cx: &Cx, cat: &AInfCategory, v: &Value) -> Result<Contraction, CliError> {
    let mut pairs = BTreeMap::new();
    for (i, e) in as_array(cx, v, "contraction", &[("contraction", 0)])?.iter().enumerate() {
        let path = format!("contraction[{i}]");
        let anchors = [("contraction", 0), ("small", i)];
        let o = e.as_object().ok_or_else(|| cx.err(&path, &anchors, "expected an object"))?;
        check_keys(cx, o, &["from", "to", "small", "f1", "g1", "t1"], &path, &anchors)?;
        let obj = |k: &str| -> Result<usize, CliError> {
            let n = as_str(cx, o.get(k).unwrap_or(&Value::Null), &format!("{path}.{k}"), &anchors)?;
            cat.object_index(n).ok_or_else(|| cx.err(format!("{path}.{k}"), &anchors, format!("unknown object {n}")))
        };
        let (x, y) = (obj("from")?, obj("to")?);
        let big = cat.hom(x, y).clone();
        let small = GradedSpace::new(&cat.field, basis_of(cx, o.get("small").unwrap_or(&Value::Null), &format!("{path}.small"), &anchors)?)
            .map_err(|e| cx.err(&path, &anchors, e.to_string()))?;
        let map = |k: &str, src: &GradedSpace, tgt: &GradedSpace, deg: i64| -> Result<GradedMap, CliError> {
            let mut cols = vec![SparseVec::new(); src.dim()];
            if let Some(m) = o.get(k) {
                let m = m.as_object().ok_or_else(|| cx.err(format!("{path}.{k}"), &anchors, "expected an object keyed by source basis name"))?;
                for (n, lc) in m {
                    let c = src.index_of(n).ok_or_else(|| cx.err(format!("{path}.{k}"), &anchors, format!("{n} is not a source basis element")))?;
                    for (t, s) in lincomb_of(cx, &cat.field, lc, &format!("{path}.{k}.{n}"), &anchors)? {
                        let r = tgt.index_of(&t).ok_or_else(|| cx.err(format!("{path}.{k}.{n}"), &anchors, format!("{t} is not a target basis element")))?;
                        cols[c].add_term(r, &s);
                    }
                }
            }
            GradedMap::new(src.clone(), tgt.clone(), deg, cols).map_err(|e| cx.err(format!("{path}.{k}"), &anchors, e.to_string()))
        };
        let hc = HomContraction { f1: map("f1", &small, &big, 0)?, g1: map("g1", &big, &small, 0)?, t1: map("t1", &big, &big, -1)?, small: small.clone() };
        if pairs.insert((x, y), hc).is_some() {
            return Err(cx.err(&path, &anchors, "pair listed twice"));
        }
    }
    Ok(Contraction { pairs })
}

fn parse_torus(cx: &Cx, v: &Value) -> Result<TorusDef, CliError> {
    let anchors = [("torus", 0)];
    let o = v.as_object().ok_or_else(|| cx.err("torus", &anchors, "expected an object"))?;
    check_keys(cx, o, &["lines", "area_cap", "max_d"], "torus", &anchors)?;
    let lines = as_array(cx, o.get("lines").unwrap_or(&Value::Null), "torus.lines", &anchors)?
        .iter()
        .map(|l| {
            let s = as_str(cx, l, "torus.lines", &anchors)?;
            TorusLine::parse(s).map_err(|e| cx.err("torus.lines", &[("torus", 0), (s, 0)], e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cap = o.get("area_cap").ok_or_else(|| cx.err("torus.area_cap", &anchors, "missing area_cap"))?;
    let area_cap = crate::coefficients::parse_rational_json(cap)
        .ok()
        .and_then(|r| from_big(&r))
        .ok_or_else(|| cx.err("torus.area_cap", &[("torus", 0), ("area_cap", 0)], "expected a rational"))?;
    let max_d = as_usize(cx, o.get("max_d").unwrap_or(&json!(3)), "torus.max_d", &anchors)?;
    Ok(TorusDef { lines, area_cap, max_d })
}

/// Machine-readable outcome of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Value,
    pub digest: String,
    pub pass: bool,
    pub failure: Option<Value>,
    pub tables: BTreeMap<String, Value>,
    pub witnesses: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(command: Value, digest: String) -> Self {
        Report { schema: SCHEMA, command, digest, pass: true, failure: None, tables: BTreeMap::new(), witnesses: BTreeMap::new(), warnings: Vec::new() }
    }

    fn fail(&mut self, locus: Value) {
        if self.pass {
            self.failure = Some(locus);
        }
        self.pass = false;
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("json")
    }

    /// Indented text tables.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        out += &format!("command  {}\n", self.command);
        out += &format!("digest   {}\n", self.digest);
        out += &format!("result   {}\n", if self.pass { "PASS" } else { "FAIL" });
        if let Some(f) = &self.failure {
            out += &format!("failure  {f}\n");
        }
        for w in &self.warnings {
            out += &format!("warning  {w}\n");
        }
        for (title, section) in [("table", &self.tables), ("witness", &self.witnesses)] {
            for (name, v) in section {
                out += &format!("\n[{title} {name}]\n");
                match v {
                    Value::Object(m) => m.iter().for_each(|(k, x)| pretty_value(&mut out, k, x)),
                    _ => pretty_value(&mut out, "", v),
                }
            }
        }
        out
    }
}

fn pretty_value(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(m) if !m.is_empty() && m.values().any(|x| x.is_object() || x.is_array()) => {
            for (k, x) in m {
                pretty_value(out, &join(prefix, k), x);
            }
        }
        Value::Array(a) if a.iter().any(Value::is_object) => {
            for (i, x) in a.iter().enumerate() {
                pretty_value(out, &join(prefix, &i.to_string()), x);
            }
        }
        _ => *out += &format!("  {:<40} {}\n", prefix, v),
    }
}

fn join(prefix: &str, k: &str) -> String {
    if prefix.is_empty() {
        k.to_string()
    } else {
        format!("{prefix}.{k}")
    }
}

/// Seed from the flag, else `AINF_SEED`, else the fixed default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("AINF_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Input(format!("AINF_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn pair_name(cat: &AInfCategory, x: usize, y: usize) -> String {
    format!("{}->{}", cat.objects[x], cat.objects[y])
}

fn dims_json(dims: &BTreeMap<i64, usize>) -> Value {
    Value::Object(dims.iter().map(|(p, d)| (p.to_string(), json!(d))).collect())
}

fn relation_locus(kind: &str, d: usize, inputs: &[String], residual: &str) -> Value {
    json!({"kind": kind, "d": d, "inputs": inputs, "residual": residual})
}

/// A single structure constant `mu^d(tuple)` at output index `out`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub inputs: Vec<Gen>,
    pub out: usize,
    pub delta: Scalar,
}

/// Degree-compatible structure constants of `cat` up to `max_d`.
pub fn mutation_sites(cat: &AInfCategory) -> Vec<(Vec<Gen>, usize)> {
    let mut out = Vec::new();
    for d in 1..=cat.max_d {
        for t in cat.composable_tuples(d) {
            let deg: i64 = t.iter().map(|g| cat.deg(*g)).sum::<i64>() + 2 - d as i64;
            let space = cat.hom(t[0].src, t[d - 1].tgt);
            for j in space.indices_in_degree(deg) {
                out.push((t.clone(), j));
            }
        }
    }
    out
}

pub fn random_mutations(cat: &AInfCategory, n: usize, seed: u64) -> Vec<Mutation> {
    let sites = mutation_sites(cat);
    if sites.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = if n <= sites.len() {
        rand::seq::index::sample(&mut rng, sites.len(), n).into_vec()
    } else {
        (0..n).map(|_| rng.gen_range(0..sites.len())).collect()
    };
    picks
        .into_iter()
        .map(|i| {
            let (inputs, out) = sites[i].clone();
            Mutation { inputs, out, delta: random_nonzero(&mut rng, &cat.field) }
        })
        .collect()
}

pub fn apply_mutation(cat: &AInfCategory, m: &Mutation) -> AInfCategory {
    let mut c = cat.clone();
    c.add_comp(m.inputs.clone(), &SparseVec::basis(m.out, m.delta.clone()));
    c
}

/// First failure of the relations (orders up to `2 max_d - 1`) and, if given, the strict units.
pub fn mutation_locus(cat: &AInfCategory, units: Option<&BTreeMap<usize, SparseVec>>) -> Result<Option<Value>, CliError> {
    let rel = cat.check_relations(2 * cat.max_d - 1).map_err(compute)?;
    if let Some(f) = rel.failure {
        return Ok(Some(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text)));
    }
    if let Some(u) = units {
        let rep = cat.check_units(u, UnitMode::Strict).map_err(compute)?;
        if let Some(msg) = rep.failure {
            return Ok(Some(json!({"kind": "unit", "message": msg})));
        }
    }
    Ok(None)
}

fn describe_mutation(cat: &AInfCategory, m: &Mutation) -> String {
    let space = cat.hom(m.inputs[0].src, m.inputs[m.inputs.len() - 1].tgt);
    format!("mu^{}{} += {}", m.inputs.len(), cat.format_tuple(&m.inputs), space.format_vec(&SparseVec::basis(m.out, m.delta.clone())))
}

#[derive(Clone, Debug)]
pub struct CheckOpts {
    pub max_d: Option<usize>,
    pub mutations: usize,
    pub seed: u64,
    pub units: UnitMode,
}

impl Default for CheckOpts {
    fn default() -> Self {
        CheckOpts { max_d: None, mutations: 0, seed: DEFAULT_SEED, units: UnitMode::Strict }
    }
}

pub fn cmd_check(def: &Definition, opts: &CheckOpts) -> Result<Report, CliError> {
    let cat = &def.category;
    let up_to = opts.max_d.unwrap_or(cat.max_d);
    let mut rep = Report::new(
        json!({"name": "check", "max_d": up_to, "mutations": opts.mutations, "seed": opts.seed, "units": format!("{:?}", opts.units)}),
        def.digest(),
    );
    rep.warnings.extend(def.warnings.iter().cloned());
    let rel = cat.check_relations(up_to).map_err(compute)?;
    rep.tables.insert("relations".into(), json!({"pass": rel.pass, "checked": rel.checked}));
    if let Some(f) = &rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
    }
    if let Some(units) = &def.units {
        let u = cat.check_units(units, opts.units).map_err(compute)?;
        rep.tables.insert("units".into(), json!({"mode": format!("{:?}", opts.units), "pass": u.pass}));
        if let Some(msg) = u.failure {
            rep.fail(json!({"kind": "unit", "message": msg}));
        }
    }
    for m in &def.modules {
        let module = m.module(cat)?;
        let r = check_module(&module, up_to.max(m.max_d)).map_err(compute)?;
        rep.tables.insert(format!("module {}", m.name), json!({"pass": r.pass, "checked": r.checked}));
        if let Some(f) = r.failure {
            let mut locus = relation_locus("module", f.d, &f.inputs_written, &f.residual_text);
            locus["module"] = json!(m.name);
            rep.fail(locus);
        }
    }
    if opts.mutations > 0 {
        let mut rows = Vec::new();
        let mut detected = 0;
        for m in random_mutations(cat, opts.mutations, opts.seed) {
            let mutated = apply_mutation(cat, &m);
            let locus = mutation_locus(&mutated, def.units.as_ref())?;
            detected += usize::from(locus.is_some());
            rows.push(json!({"mutation": describe_mutation(cat, &m), "failure": locus}));
        }
        rep.tables.insert("mutations".into(), json!({"total": rows.len(), "detected": detected}));
        rep.witnesses.insert("mutations".into(), Value::Array(rows));
    }
    Ok(rep)
}

pub fn cmd_cohomology(def: &Definition) -> Result<Report, CliError> {
    let cat = &def.category;
    let mut rep = Report::new(json!({"name": "cohomology"}), def.digest());
    rep.warnings.extend(def.warnings.iter().cloned());
    let rel = cat.check_relations(1).map_err(compute)?;
    if let Some(f) = rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
        return Ok(rep);
    }
    let mut dims = Map::new();
    for (&(x, y), space) in cat.homs() {
        if space.dim() == 0 {
            continue;
        }
        let groups = cat.hom_complex(x, y).map_err(compute)?.cohomology().map_err(compute)?;
        let d: BTreeMap<i64, usize> = groups.into_iter().filter(|(_, g)| g.dim > 0).map(|(p, g)| (p, g.dim)).collect();
        dims.insert(pair_name(cat, x, y), dims_json(&d));
    }
    rep.tables.insert("cohomology".into(), Value::Object(dims));
    if !cat.field.is_novikov() {
        let h = cat.cohomological_category().map_err(compute)?;
        let mut reps = Map::new();
        for (&(x, y), space) in cat.homs() {
            let r: Vec<Value> = h.reps(x, y).iter().map(|(p, v)| json!({"degree": p, "representative": space.format_vec(v)})).collect();
            if !r.is_empty() {
                reps.insert(pair_name(cat, x, y), Value::Array(r));
            }
        }
        rep.witnesses.insert("representatives".into(), Value::Object(reps));
    }
    Ok(rep)
}

pub fn cmd_transfer(def: &Definition, cap: Option<usize>) -> Result<Report, CliError> {
    let b = &def.category;
    let cap = cap.unwrap_or_else(|| default_cap(b));
    let mut rep = Report::new(json!({"name": "transfer", "cap": cap}), def.digest());
    rep.warnings.extend(def.warnings.iter().cloned());
    let rel = b.check_relations(b.max_d).map_err(compute)?;
    if let Some(f) = rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
        return Ok(rep);
    }
    let c = match def.contraction.as_ref().unwrap_or(&ContractionDef::Auto) {
        ContractionDef::Auto => Contraction::auto(b).map_err(compute)?,
        ContractionDef::Trivial => Contraction::trivial(b),
        ContractionDef::Explicit(c) => c.clone(),
    };
    let res = transfer(b, &c, cap).map_err(|e| CliError::Input(e.to_string()))?;
    let summary = res.summary();
    rep.warnings.extend(summary.warnings.iter().cloned());
    let minimal = res.a.comps().keys().all(|k| k.len() != 1);
    rep.tables.insert("summary".into(), json!({"dims": summary.dims, "nonzero_terms": summary.nonzero_terms, "minimal": minimal}));
    let ra = res.a.check_relations(cap).map_err(compute)?;
    rep.tables.insert("relations".into(), json!({"pass": ra.pass, "checked": ra.checked}));
    if let Some(f) = &ra.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
    }
    let rf = check_functor(&res.a, b, &res.f, cap).map_err(compute)?;
    rep.tables.insert("functor".into(), json!({"pass": rf.pass, "checked": rf.checked}));
    if let Some(f) = &rf.failure {
        rep.fail(json!({"kind": "functor", "failure": serde_json::to_value(f).expect("json")}));
    }
    if !b.field.is_novikov() {
        let mut iso = Map::new();
        for (&(x, y), _) in b.homs() {
            let cols = cohomology_map(&res.a, b, &res.f, x, y).map_err(compute)?;
            let n = cols.len();
            let target = b.cohomological_category().map_err(compute)?.total_dim(x, y);
            let ok = n == target && (n == 0 || matrix_from_columns(&b.field, &cols, n).rank().map_err(compute)? == n);
            iso.insert(pair_name(b, x, y), json!(ok));
            if !ok {
                rep.fail(json!({"kind": "cohomology", "pair": pair_name(b, x, y)}));
            }
        }
        rep.tables.insert("h_f1_isomorphism".into(), Value::Object(iso));
    }
    let mut out = Definition::from_category(res.a.clone());
    out.category.max_d = cap.max(1);
    rep.witnesses.insert("minimal_model".into(), out.to_json());
    Ok(rep)
}

/// Parses `name`, `c*name + ...` or a JSON linear combination.
pub fn parse_cocycle(cat: &AInfCategory, x: usize, y: usize, s: &str) -> Result<SparseVec, CliError> {
    let space = cat.hom(x, y);
    let bad = |m: String| CliError::Input(format!("--cocycle: {m}"));
    let terms: Vec<(String, Scalar)> = if s.trim_start().starts_with(['{', '[']) {
        let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        lincomb_of(&Cx { src: s }, &cat.field, &v, "cocycle", &[]).map_err(|e| bad(e.to_string()))?
    } else {
        s.split('+')
            .map(|t| {
                let t = t.trim();
                let (c, n) = match t.split_once('*') {
                    Some((c, n)) => (c.trim(), n.trim()),
                    None => ("1", t),
                };
                let r = parse_rational(c).map_err(|e| bad(e.to_string()))?;
                Ok((n.to_string(), cat.field.from_rational(&r).map_err(|e| bad(e.to_string()))?))
            })
            .collect::<Result<_, CliError>>()?
    };
    let mut v = SparseVec::new();
    for (n, c) in terms {
        let i = space.index_of(&n).ok_or_else(|| bad(format!("{n} is not in hom({},{})", cat.objects[x], cat.objects[y])))?;
        v.add_term(i, &c);
    }
    Ok(v)
}

pub fn cmd_cone(def: &Definition, from: &str, to: &str, cocycle: &str) -> Result<Report, CliError> {
    let a = &def.category;
    let obj = |n: &str| a.object_index(n).ok_or_else(|| CliError::Input(format!("unknown object {n}")));
    let (y0, y1) = (obj(from)?, obj(to)?);
    let c = parse_cocycle(a, y0, y1, cocycle)?;
    let mut rep = Report::new(json!({"name": "cone", "from": from, "to": to, "cocycle": a.hom(y0, y1).format_vec(&c)}), def.digest());
    rep.warnings.extend(def.warnings.iter().cloned());
    let rel = a.check_relations(a.max_d).map_err(compute)?;
    if let Some(f) = rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
        return Ok(rep);
    }
    let plain: Vec<TwistedComplex> = (0..a.num_objects()).map(|x| TwistedComplex::object(a, x)).collect();
    let tw = TwCategory::new(a, plain.clone()).map_err(compute)?;
    let name = format!("Cone({})", a.hom(y0, y1).format_vec(&c));
    let cone = tw.cone(y0, y1, &c, &name).map_err(|e| CliError::Input(e.to_string()))?;
    let mc = check_mc(a, &cone).map_err(compute)?;
    rep.tables.insert("maurer_cartan".into(), json!({"pass": mc.pass, "residual": mc.residual}));
    if !mc.pass {
        rep.fail(json!({"kind": "maurer_cartan", "residual": mc.residual}));
        return Ok(rep);
    }
    let mut objs = plain;
    objs.push(cone);
    let big = TwCategory::new(a, objs).map_err(compute)?;
    let ci = a.num_objects();
    if !a.field.is_novikov() {
        let mut into = Map::new();
        let mut out_of = Map::new();
        for x in 0..a.num_objects() {
            into.insert(a.objects[x].clone(), dims_json(&big.h0_hom(x, ci).map_err(compute)?.dims));
            out_of.insert(a.objects[x].clone(), dims_json(&big.h0_hom(ci, x).map_err(compute)?.dims));
        }
        rep.tables.insert("hom_into_cone".into(), Value::Object(into));
        rep.tables.insert("hom_out_of_cone".into(), Value::Object(out_of));
    }
    if let (Some(units), false) = (&def.units, a.field.is_novikov()) {
        let t = cone_triangle(&big, y0, y1, ci, &c, units).map_err(compute)?;
        let tw_units = big.units(units).map_err(compute)?;
        match solve_certificate(&big.cat, &t, &tw_units[&y1]).map_err(compute)? {
            Some(cert) => {
                let r = check_exact_triangle(&big.cat, &t, &cert, &tw_units[&y1]).map_err(compute)?;
                rep.tables.insert("exact_triangle".into(), serde_json::to_value(&r).expect("json"));
                rep.witnesses.insert(
                    "certificate".into(),
                    json!({
                        "h1": big.cat.hom(y1, y0).format_vec(&cert.h1),
                        "h2": big.cat.hom(ci, y1).format_vec(&cert.h2),
                        "k": big.cat.hom(y1, y1).format_vec(&cert.k),
                    }),
                );
                if !r.pass {
                    rep.fail(json!({"kind": "exact_triangle", "report": serde_json::to_value(&r).expect("json")}));
                }
            }
            None => rep.fail(json!({"kind": "exact_triangle", "message": "no exactness certificate exists"})),
        }
    } else {
        rep.warnings.push("no units over an exact field: exact triangle not checked".into());
    }
    Ok(rep)
}

pub fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Input(format!("--window {s:?}: expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn cmd_hochschild(def: &Definition, window: (i64, i64), length_cap: usize) -> Result<Report, CliError> {
    let a = &def.category;
    let mut rep = Report::new(json!({"name": "hochschild", "window": [window.0, window.1], "length_cap": length_cap}), def.digest());
    rep.warnings.extend(def.warnings.iter().cloned());
    let rel = a.check_relations(a.max_d).map_err(compute)?;
    if let Some(f) = rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
        return Ok(rep);
    }
    let hh = Hochschild::new(a, length_cap).cohomology(window.0, window.1).map_err(compute)?;
    let rows: Map<String, Value> = hh.iter().map(|h| (h.degree.to_string(), json!({"dim": h.dim, "exact": h.exact, "cochains": h.cochains}))).collect();
    if hh.iter().any(|h| !h.exact) {
        rep.warnings.push("window edge degrees are upper bounds: the neighbouring differential is outside the window".into());
    }
    rep.tables.insert("hochschild".into(), Value::Object(rows));
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct TorusOpts {
    pub scene: TorusDef,
    pub surgery: Option<[String; 3]>,
}

/// Torus scene, the exported category and the report.
pub fn cmd_torus(opts: &TorusOpts) -> Result<(Report, Definition), CliError> {
    let t = &opts.scene;
    let scene = TorusScene::new(t.lines.clone())?;
    let mut input = t.to_json();
    if let Some(s) = &opts.surgery {
        input["surgery"] = json!(s);
    }
    let mut command = input.clone();
    command["name"] = json!("torus");
    let mut rep = Report::new(command, digest_of(&input));
    let exported = torus::export_category(&scene, &t.area_cap, t.max_d)?;
    rep.warnings.extend(exported.warnings.iter().cloned());
    let cat = &exported.category;
    let mut gens = Map::new();
    for i in 0..scene.len() {
        for j in 0..scene.len() {
            if i == j {
                continue;
            }
            let rows: Vec<Value> = scene
                .generators(i, j)
                .iter()
                .enumerate()
                .map(|(k, g)| json!({"name": TorusScene::generator_name(i, j, k), "point": torus::fmt_point(&g.point), "degree": g.degree}))
                .collect();
            gens.insert(pair_name(cat, i, j), Value::Array(rows));
        }
    }
    rep.tables.insert("generators".into(), Value::Object(gens));
    let mut counts = Map::new();
    let mut polys = Map::new();
    for d in 2..=t.max_d {
        let mut all = Vec::new();
        for objs in torus::object_sequences(scene.len(), d) {
            all.extend(torus::polygons(&scene, &objs, &t.area_cap));
        }
        counts.insert(d.to_string(), json!(all.len()));
        polys.insert(d.to_string(), serde_json::to_value(&all).expect("json"));
    }
    rep.tables.insert("polygons".into(), Value::Object(counts));
    rep.witnesses.insert("polygons".into(), Value::Object(polys));
    let rel = cat.check_relations(t.max_d).map_err(compute)?;
    rep.tables.insert("relations".into(), json!({"pass": rel.pass, "checked": rel.checked}));
    if let Some(f) = &rel.failure {
        rep.fail(relation_locus("relation", f.d, &f.inputs_written, &f.residual_text));
    }
    if let Some([l1, l2, g]) = &opts.surgery {
        let parse = |s: &str| TorusLine::parse(s).map_err(CliError::from);
        let (l1, l2, g) = (parse(l1)?, parse(l2)?, parse(g)?);
        let s = torus::surgery_rank_check(&l1, &l2, &g, &t.area_cap)?;
        rep.tables.insert(
            "surgery".into(),
            json!({"dims": [s.dims.0, s.dims.1], "map_rank": s.map_rank, "cone_rank": s.cone_rank, "expected": s.expected, "equal": s.equal, "point": torus::fmt_point(&s.p)}),
        );
        rep.witnesses.insert("surgery_triangles".into(), serde_json::to_value(&s.triangles).expect("json"));
        if !s.equal {
            rep.fail(json!({"kind": "surgery", "cone_rank": s.cone_rank, "expected": s.expected}));
        }
    }
    let mut def = Definition::from_category(exported.category);
    def.torus = Some(t.clone());
    Ok((rep, def))
}

/// Parses an area cap flag.
pub fn parse_cap(s: &str) -> Result<Q, CliError> {
    parse_rational(s).ok().and_then(|r| from_big(&r)).ok_or_else(|| CliError::Input(format!("--area-cap {s:?}: expected a rational")))
}
