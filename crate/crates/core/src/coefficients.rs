use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

pub type Rational = BigRational;

/// Coefficient field of a structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldTag {
    F2,
    Q,
    /// Universal Novikov field over F2, truncated at `T^cutoff`.
    NovikovF2(Rational),
    /// Universal Novikov field over Q, truncated at `T^cutoff`.
    NovikovQ(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("field mismatch: {0} and {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("quotient not determined below the cutoff (divisor valuation {0})")]
    NotRepresentable(String),
    #[error("operation requires a Novikov field")]
    NotNovikov,
    #[error("invalid cutoff {0}: must be positive")]
    InvalidCutoff(String),
    #[error("cannot parse scalar: {0}")]
    Parse(String),
}

impl FieldTag {
    pub fn novikov_f2(cutoff: Rational) -> Result<Self, CoeffError> {
        if !cutoff.is_positive() {
            return Err(CoeffError::InvalidCutoff(cutoff.to_string()));
        }
        Ok(FieldTag::NovikovF2(cutoff))
    }

    pub fn novikov_q(cutoff: Rational) -> Result<Self, CoeffError> {
        if !cutoff.is_positive() {
            return Err(CoeffError::InvalidCutoff(cutoff.to_string()));
        }
        Ok(FieldTag::NovikovQ(cutoff))
    }

    pub fn is_novikov(&self) -> bool {
        matches!(self, FieldTag::NovikovF2(_) | FieldTag::NovikovQ(_))
    }

    /// True when every coefficient equals its negative.
    pub fn is_char2(&self) -> bool {
        matches!(self, FieldTag::F2 | FieldTag::NovikovF2(_))
    }

    pub fn cutoff(&self) -> Option<&Rational> {
        match self {
            FieldTag::NovikovF2(c) | FieldTag::NovikovQ(c) => Some(c),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldTag::F2 => Scalar::F2(false),
            FieldTag::Q => Scalar::Q(Rational::zero()),
            FieldTag::NovikovF2(c) => Scalar::Nov(Series::zero(false, c.clone())),
            FieldTag::NovikovQ(c) => Scalar::Nov(Series::zero(true, c.clone())),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(&Rational::from_integer(BigInt::from(n)))
            .expect("integers embed in every field")
    }

    /// Image of a rational number; over F2 only integers are accepted.
    pub fn from_rational(&self, r: &Rational) -> Result<Scalar, CoeffError> {
        match self {
            FieldTag::F2 => Ok(Scalar::F2(f2_of(r)?)),
            FieldTag::Q => Ok(Scalar::Q(r.clone())),
            FieldTag::NovikovF2(c) => {
                let b = f2_of(r)?;
                Ok(Scalar::Nov(Series::monomial(false, c.clone(), Rational::zero(), rat_of_bool(b))))
            }
            FieldTag::NovikovQ(c) => Ok(Scalar::Nov(Series::monomial(true, c.clone(), Rational::zero(), r.clone()))),
        }
    }

    /// The monomial `coeff * T^exp`; truncated to zero when `exp >= cutoff`.
    pub fn monomial(&self, exp: Rational, coeff: i64) -> Result<Scalar, CoeffError> {
        match self {
            FieldTag::NovikovF2(c) => {
                let b = coeff.rem_euclid(2) == 1;
                Ok(Scalar::Nov(Series::monomial(false, c.clone(), exp, rat_of_bool(b))))
            }
            FieldTag::NovikovQ(c) => Ok(Scalar::Nov(Series::monomial(true, c.clone(), exp, Rational::from_integer(coeff.into())))),
            _ => Err(CoeffError::NotNovikov),
        }
    }

    /// Parses the JSON form of a scalar in this field.
    pub fn parse_json(&self, v: &Value) -> Result<Scalar, CoeffError> {
        match self {
            FieldTag::F2 | FieldTag::Q => self.from_rational(&parse_rational_json(v)?),
            FieldTag::NovikovF2(c) | FieldTag::NovikovQ(c) => {
                let over_q = matches!(self, FieldTag::NovikovQ(_));
                let arr = match v {
                    Value::Array(a) => a,
                    _ => {
                        let r = parse_rational_json(v)?;
                        return self.from_rational(&r);
                    }
                };
                let mut s = Series::zero(over_q, c.clone());
                for term in arr {
                    let pair = term
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| CoeffError::Parse(format!("expected [exponent, coefficient], got {term}")))?;
                    let e = parse_rational_json(&pair[0])?;
                    let k = parse_rational_json(&pair[1])?;
                    let k = if over_q { k } else { rat_of_bool(f2_of(&k)?) };
                    s = s.add(&Series::monomial(over_q, c.clone(), e, k));
                }
                Ok(Scalar::Nov(s))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FieldTag::F2 => "F2".into(),
            FieldTag::Q => "Q".into(),
            FieldTag::NovikovF2(c) => format!("NovikovF2({c})"),
            FieldTag::NovikovQ(c) => format!("NovikovQ({c})"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FieldTag::F2 => serde_json::json!({"tag": "F2"}),
            FieldTag::Q => serde_json::json!({"tag": "Q"}),
            FieldTag::NovikovF2(c) => serde_json::json!({"tag": "NovikovF2", "cutoff": c.to_string()}),
            FieldTag::NovikovQ(c) => serde_json::json!({"tag": "NovikovQ", "cutoff": c.to_string()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, CoeffError> {
        let tag = v
            .get("tag")
            .and_then(Value::as_str)
            .or_else(|| v.as_str())
            .ok_or_else(|| CoeffError::Parse(format!("field must be an object with a tag, got {v}")))?;
        let cutoff = || -> Result<Rational, CoeffError> {
            let c = v.get("cutoff").ok_or_else(|| CoeffError::Parse("Novikov field needs a cutoff".into()))?;
            parse_rational_json(c)
        };
        match tag {
            "F2" => Ok(FieldTag::F2),
            "Q" => Ok(FieldTag::Q),
            "NovikovF2" => FieldTag::novikov_f2(cutoff()?),
            "NovikovQ" => FieldTag::novikov_q(cutoff()?),
            other => Err(CoeffError::Parse(format!("unknown field tag {other}"))),
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn f2_of(r: &Rational) -> Result<bool, CoeffError> {
    if !r.is_integer() {
        return Err(CoeffError::Parse(format!("{r} is not an element of F2")));
    }
    let two = BigInt::from(2);
    let m = ((r.to_integer() % &two) + &two) % &two;
    Ok(!m.is_zero())
}

fn rat_of_bool(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Parses `"p/q"`, `"p"`, or a JSON integer.
pub fn parse_rational(s: &str) -> Result<Rational, CoeffError> {
    let s = s.trim();
    let bad = || CoeffError::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn parse_rational_json(v: &Value) -> Result<Rational, CoeffError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(CoeffError::Parse(format!("non-integer number {n}; write rationals as \"p/q\""))),
        },
        _ => Err(CoeffError::Parse(format!("expected a rational, got {v}"))),
    }
}

/// Truncated Novikov series `sum c_i T^{e_i}` with exponents below the cutoff.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    over_q: bool,
    cutoff: Rational,
    /// Sorted by exponent, nonzero coefficients only.
    terms: Vec<(Rational, Rational)>,
}

impl Series {
    fn zero(over_q: bool, cutoff: Rational) -> Self {
        Series { over_q, cutoff, terms: Vec::new() }
    }

    fn monomial(over_q: bool, cutoff: Rational, exp: Rational, coeff: Rational) -> Self {
        let mut s = Series::zero(over_q, cutoff);
        if !coeff.is_zero() && exp < s.cutoff {
            s.terms.push((exp, coeff));
        }
        s
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    fn reduce_coeff(&self, c: Rational) -> Rational {
        if self.over_q {
            c
        } else {
            rat_of_bool(f2_of(&c).expect("F2 coefficients are integers"))
        }
    }

    fn from_map(&self, map: BTreeMap<Rational, Rational>, limit: &Rational) -> Series {
        let terms = map
            .into_iter()
            .filter(|(e, _)| e < limit)
            .map(|(e, c)| (e, self.reduce_coeff(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Series { over_q: self.over_q, cutoff: self.cutoff.clone(), terms }
    }

    fn add(&self, other: &Series) -> Series {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            *map.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        self.from_map(map, &self.cutoff)
    }

    fn neg(&self) -> Series {
        let mut s = self.clone();
        if self.over_q {
            for t in s.terms.iter_mut() {
                t.1 = -t.1.clone();
            }
        }
        s
    }

    fn mul_limited(&self, other: &Series, limit: &Rational) -> Series {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if &e < limit {
                    *map.entry(e).or_insert_with(Rational::zero) += c1 * c2;
                }
            }
        }
        self.from_map(map, limit)
    }

    fn truncate(&self, limit: &Rational) -> Series {
        Series {
            over_q: self.over_q,
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().filter(|(e, _)| e < limit).cloned().collect(),
        }
    }

    fn shift(&self, by: &Rational, scale: &Rational) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e + by, self.reduce_coeff(c * scale)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Series { over_q: self.over_q, cutoff: self.cutoff.clone(), terms }
    }

    /// `self / other`, correct for all exponents below `limit`.
    fn div_limited(&self, other: &Series, limit: &Rational) -> Result<Series, CoeffError> {
        let (v, c0) = other.terms.first().cloned().ok_or(CoeffError::DivisionByZero)?;
        let inv_c0 = c0.recip();
        // other = c0 T^v (1 + r) with r of positive valuation
        let r: Series = Series {
            over_q: self.over_q,
            cutoff: self.cutoff.clone(),
            terms: other.terms[1..]
                .iter()
                .map(|(e, c)| (e - &v, self.reduce_coeff(c * &inv_c0)))
                .collect(),
        };
        let base = match self.terms.first() {
            Some((e, _)) => e - &v,
            None => return Ok(Series::zero(self.over_q, self.cutoff.clone())),
        };
        // terms of (1 + r)^{-1} matter only below limit - base
        let need = limit - &base;
        let one = Series::monomial(self.over_q, self.cutoff.clone(), Rational::zero(), Rational::one());
        let mut inv = one.truncate(&need);
        let minus_r = r.neg();
        let mut power = one;
        loop {
            power = power.mul_limited(&minus_r, &need);
            if power.terms.is_empty() {
                break;
            }
            inv = inv.add_unbounded(&power, &need);
        }
        let shifted = self.shift(&(-v), &inv_c0);
        Ok(shifted.mul_limited(&inv, limit))
    }

    fn add_unbounded(&self, other: &Series, limit: &Rational) -> Series {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            *map.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        self.from_map(map, limit)
    }
}

/// Valuation of a Novikov element; zero has valuation `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational),
    Infinity,
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    F2(bool),
    Q(Rational),
    Nov(Series),
}

impl Scalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            Scalar::F2(_) => FieldTag::F2,
            Scalar::Q(_) => FieldTag::Q,
            Scalar::Nov(s) if s.over_q => FieldTag::NovikovQ(s.cutoff.clone()),
            Scalar::Nov(s) => FieldTag::NovikovF2(s.cutoff.clone()),
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<(), CoeffError> {
        let same = match (self, other) {
            (Scalar::F2(_), Scalar::F2(_)) | (Scalar::Q(_), Scalar::Q(_)) => true,
            (Scalar::Nov(a), Scalar::Nov(b)) => a.over_q == b.over_q && a.cutoff == b.cutoff,
            _ => false,
        };
        if same {
            Ok(())
        } else {
            Err(CoeffError::FieldMismatch(self.tag().name(), other.tag().name()))
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::F2(b) => !b,
            Scalar::Q(r) => r.is_zero(),
            Scalar::Nov(s) => s.terms.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::F2(b) => *b,
            Scalar::Q(r) => r.is_one(),
            Scalar::Nov(s) => s.terms.len() == 1 && s.terms[0].0.is_zero() && s.terms[0].1.is_one(),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::F2(a), Scalar::F2(b)) => Scalar::F2(a ^ b),
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Nov(a), Scalar::Nov(b)) => Scalar::Nov(a.add(b)),
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::F2(a), Scalar::F2(b)) => Scalar::F2(a & b),
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Nov(a), Scalar::Nov(b)) => Scalar::Nov(a.mul_limited(b, &a.cutoff)),
            _ => unreachable!(),
        })
    }

    /// Division; Novikov divisors must have valuation `<= 0` so the quotient is
    /// determined below the cutoff.
    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check_same(other)?;
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(match (self, other) {
            (Scalar::F2(a), Scalar::F2(_)) => Scalar::F2(*a),
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a / b),
            (Scalar::Nov(a), Scalar::Nov(b)) => {
                let v = &b.terms[0].0;
                if v.is_positive() {
                    return Err(CoeffError::NotRepresentable(v.to_string()));
                }
                Scalar::Nov(a.div_limited(b, &a.cutoff)?)
            }
            _ => unreachable!(),
        })
    }

    /// Novikov quotient whose terms are kept only below `limit`.
    pub fn div_to_precision(&self, other: &Scalar, limit: &Rational) -> Result<Scalar, CoeffError> {
        self.check_same(other)?;
        match (self, other) {
            (Scalar::Nov(a), Scalar::Nov(b)) => {
                let lim = if limit < &a.cutoff { limit.clone() } else { a.cutoff.clone() };
                Ok(Scalar::Nov(a.div_limited(b, &lim)?))
            }
            _ => self.try_div(other),
        }
    }

    /// Drops Novikov terms with exponent `>= limit`.
    pub fn truncated(&self, limit: &Rational) -> Scalar {
        match self {
            Scalar::Nov(s) => Scalar::Nov(s.truncate(limit)),
            other => other.clone(),
        }
    }

    pub fn is_monomial(&self) -> bool {
        match self {
            Scalar::Nov(s) => s.terms.len() == 1,
            other => !other.is_zero(),
        }
    }

    /// Largest exponent present in a Novikov element.
    pub fn max_exponent(&self) -> Option<Rational> {
        match self {
            Scalar::Nov(s) => s.terms.last().map(|t| t.0.clone()),
            _ => None,
        }
    }

    pub fn inverse(&self) -> Result<Scalar, CoeffError> {
        self.tag().one().try_div(self)
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::F2(a) => Scalar::F2(*a),
            Scalar::Q(a) => Scalar::Q(-a.clone()),
            Scalar::Nov(s) => Scalar::Nov(s.neg()),
        }
    }

    /// `(-1)^parity * self`.
    pub fn signed(&self, odd: bool) -> Scalar {
        if odd {
            self.neg_ref()
        } else {
            self.clone()
        }
    }

    pub fn valuation(&self) -> Result<Valuation, CoeffError> {
        match self {
            Scalar::Nov(s) => Ok(match s.terms.first() {
                Some((e, _)) => Valuation::Finite(e.clone()),
                None => Valuation::Infinity,
            }),
            _ => Err(CoeffError::NotNovikov),
        }
    }

    /// Exact rational value for F2 and Q scalars.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Scalar::F2(b) => Some(rat_of_bool(*b)),
            Scalar::Q(r) => Some(r.clone()),
            Scalar::Nov(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::F2(b) => Value::from(u8::from(*b)),
            Scalar::Q(r) => Value::from(r.to_string()),
            Scalar::Nov(s) => Value::Array(
                s.terms
                    .iter()
                    .map(|(e, c)| {
                        let c = if s.over_q { Value::from(c.to_string()) } else { Value::from(1u8) };
                        Value::Array(vec![Value::from(e.to_string()), c])
                    })
                    .collect(),
            ),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::F2(b) => write!(f, "{}", u8::from(*b)),
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::Nov(s) => {
                if s.terms.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = s
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        let mono = if e.is_zero() { String::new() } else { format!("T^{e}") };
                        match (c.is_one(), mono.is_empty()) {
                            (true, true) => "1".to_string(),
                            (true, false) => mono,
                            (false, true) => format!("{c}"),
                            (false, false) => format!("{c}*{mono}"),
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition across fields")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction across fields")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication across fields")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
