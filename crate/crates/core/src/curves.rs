//! Address curves `y_b(t)`, the horns `D_w = f_w(D)` and their borders, the
//! entry parameter `t*`, and intersections of curves and of horn borders.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::polynomial::IntegerPolynomial;
use crate::rational::Rational;
use crate::sequence::BinarySequence;

/// Roots closer than this are reported once by [`landmark_scan`].
pub const DEDUP_TOL: f64 = 1e-10;
/// Largest word length accepted by [`landmark_scan`].
pub const MAX_SCAN_LEVEL: usize = 8;

/// The address curve `y_b(t) = (1-t)/t * sum b_k t^k` as a ratio of integer
/// polynomials in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddressCurve {
    numerator: IntegerPolynomial,
    denominator: IntegerPolynomial,
    source: BinarySequence,
}

impl AddressCurve {
    pub fn numerator(&self) -> &IntegerPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntegerPolynomial {
        &self.denominator
    }

    pub fn source(&self) -> &BinarySequence {
        &self.source
    }

    /// Value at `t` in `[1/2, 1)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.5..1.0).contains(&t) {
            return domain(format!("address curves are evaluated on [1/2, 1), got t = {t}"));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Value at any `t` where the denominator does not vanish.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        self.numerator.eval(t) / self.denominator.eval(t)
    }

    /// Exact value at a rational parameter.
    pub fn eval_rational(&self, t: &Rational) -> Rational {
        let n = self.numerator.eval_rational(t);
        let d = self.denominator.eval_rational(t);
        Rational::from_inner(n.inner() / d.inner())
    }

    /// Whether both curves are the same rational function.
    pub fn same_function(&self, other: &AddressCurve) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }

    /// Numerator of `y_self - y_other` over the common denominator.
    pub fn cleared_difference(&self, other: &AddressCurve) -> IntegerPolynomial {
        &(&self.numerator * &other.denominator) - &(&other.numerator * &self.denominator)
    }
}

impl fmt::Display for AddressCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

/// Builds the address curve of `b`.
///
/// With preperiod `u` of length `p` and period `v` of length `q`,
/// `sum b_k t^k = P_u(t) + t^p P_v(t) / (1 - t^q)`; common cyclotomic factors
/// of numerator and denominator are cancelled.
pub fn curve_of(b: &BinarySequence) -> AddressCurve {
    let word_poly = |w: &[u8]| {
        let mut c = vec![0i64; w.len() + 1];
        for (i, &d) in w.iter().enumerate() {
            c[i + 1] = d as i64;
        }
        IntegerPolynomial::new(c)
    };
    let p = b.preperiod_len();
    let q = b.period_len();
    let one_minus_tq = &IntegerPolynomial::constant(1) - &IntegerPolynomial::monomial(1, q);
    let series = &(&word_poly(b.preperiod()) * &one_minus_tq)
        + &word_poly(b.period()).shift_up(p);
    // series has no constant term, so dividing by t is exact
    let series_over_t = IntegerPolynomial::new(series.coeffs().iter().skip(1).copied().collect());
    let one_minus_t = IntegerPolynomial::new(vec![1, -1]);
    let mut numerator = &one_minus_t * &series_over_t;
    let mut denominator = one_minus_tq;

    for d in (1..=q).filter(|d| q.is_multiple_of(*d)) {
        let phi = cyclotomic(d);
        while let (Some(n), Some(m)) = (numerator.div_exact(&phi), denominator.div_exact(&phi)) {
            numerator = n;
            denominator = m;
        }
    }
    if denominator.constant_term() < 0 {
        numerator = -numerator;
        denominator = -denominator;
    }
    AddressCurve {
        numerator,
        denominator,
        source: b.clone(),
    }
}

/// The cyclotomic polynomial `Phi_n`.
pub fn cyclotomic(n: usize) -> IntegerPolynomial {
    assert!(n >= 1);
    let mut cache: HashMap<usize, IntegerPolynomial> = HashMap::new();
    cyclotomic_cached(n, &mut cache)
}

fn cyclotomic_cached(n: usize, cache: &mut HashMap<usize, IntegerPolynomial>) -> IntegerPolynomial {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    let mut p = &IntegerPolynomial::monomial(1, n) - &IntegerPolynomial::constant(1);
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi = cyclotomic_cached(d, cache);
        p = p.div_exact(&phi).expect("Phi_d divides t^n - 1");
    }
    cache.insert(n, p.clone());
    p
}

/// Entry parameter of an itinerary: where its kneading sequence's curve
/// reaches the border of the central horn.
#[derive(Clone, Debug, PartialEq)]
pub struct TStar {
    pub t: f64,
    pub kneading: BinarySequence,
    /// Further roots in `(1/2, 1)` of the boundary equation. Non-empty means
    /// the smallest root was chosen out of several.
    pub extra_roots: Vec<f64>,
}

impl TStar {
    pub fn is_unique(&self) -> bool {
        self.extra_roots.is_empty()
    }
}

/// Solves `y_k(t) = 1 - t` (first digit 0) or `y_k(t) = t` (first digit 1)
/// on `(1/2, 1)`, where `k` is the kneading sequence of `b`.
pub fn t_star(b: &BinarySequence) -> Result<TStar> {
    let k = b.kneading_of()?;
    let curve = curve_of(&k);
    let border = if k.digit(1) == 0 {
        IntegerPolynomial::new(vec![1, -1])
    } else {
        IntegerPolynomial::t()
    };
    let eq = curve.numerator() - &(&border * curve.denominator());
    let mut roots = eq.roots_in_unit_half().into_iter();
    let t = roots
        .next()
        .ok_or_else(|| Error::Domain(format!("no entry parameter in (1/2, 1) for {b}")))?;
    Ok(TStar {
        t,
        kneading: k,
        extra_roots: roots.collect(),
    })
}

/// A finite 01-word indexing the horn `D_w = f_w(D)`; the empty word is `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HornWord(Vec<u8>);

impl HornWord {
    pub fn new(word: &[u8]) -> Result<Self> {
        if word.iter().any(|&d| d > 1) {
            return domain("horn words use digits 0 and 1");
        }
        Ok(HornWord(word.to_vec()))
    }

    pub fn central() -> Self {
        HornWord(Vec::new())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `f_w(x)` for `x` a polynomial in `t`.
    pub fn apply(&self, x: &IntegerPolynomial) -> IntegerPolynomial {
        let t = IntegerPolynomial::t();
        let one_minus_t = IntegerPolynomial::new(vec![1, -1]);
        self.0.iter().rev().fold(x.clone(), |acc, &d| {
            let scaled = &t * &acc;
            if d == 0 {
                scaled
            } else {
                &scaled + &one_minus_t
            }
        })
    }
}

impl fmt::Display for HornWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("D")?;
        if !self.0.is_empty() {
            f.write_str("_")?;
            for d in &self.0 {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for HornWord {
    type Err = Error;

    /// Accepts `D`, `D_01` or a bare word such as `01`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let w = s.strip_prefix('D').unwrap_or(s);
        let w = w.strip_prefix('_').unwrap_or(w);
        let digits = w
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad horn word {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(HornWord(digits))
    }
}

/// All words of length `0..=max_level`, shortest first.
pub fn horn_words(max_level: usize) -> Vec<HornWord> {
    let mut out = vec![HornWord::central()];
    let mut layer = vec![Vec::<u8>::new()];
    for _ in 0..max_level {
        layer = layer
            .iter()
            .flat_map(|w| {
                [0u8, 1].into_iter().map(move |d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(HornWord));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornBorders {
    pub lower: IntegerPolynomial,
    pub upper: IntegerPolynomial,
}

/// Borders `f_w(1-t)` and `f_w(t)` of `D_w`, ordered by their values at
/// `t = 0.75`.
pub fn horn_borders(w: &HornWord) -> HornBorders {
    let a = w.apply(&IntegerPolynomial::new(vec![1, -1]));
    let b = w.apply(&IntegerPolynomial::t());
    if a.eval(0.75) <= b.eval(0.75) {
        HornBorders { lower: a, upper: b }
    } else {
        HornBorders { lower: b, upper: a }
    }
}

/// Whether `(t, y)` lies in the closed horn `D_w`.
pub fn horn_contains(w: &HornWord, t: f64, y: f64) -> Result<bool> {
    if !(0.5..1.0).contains(&t) {
        return domain(format!("t = {t} outside [1/2, 1)"));
    }
    let HornBorders { lower, upper } = horn_borders(w);
    let (a, b) = (lower.eval(t), upper.eval(t));
    Ok(a.min(b) <= y && y <= a.max(b))
}

/// What an intersection was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectionSources {
    Curves(BinarySequence, BinarySequence),
    /// Upper border of the first horn meets the lower border of the second.
    Horns(HornWord, HornWord),
}

impl Serialize for IntersectionSources {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        match self {
            IntersectionSources::Curves(b, c) => {
                map.serialize_entry("b", &b.to_string())?;
                map.serialize_entry("c", &c.to_string())?;
            }
            IntersectionSources::Horns(u, l) => {
                map.serialize_entry("upper", &u.to_string())?;
                map.serialize_entry("lower", &l.to_string())?;
            }
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionRecord {
    pub s: f64,
    pub z: f64,
    #[serde(rename = "inside_D")]
    pub inside_d: bool,
    #[serde(rename = "poly")]
    pub cleared_polynomial: IntegerPolynomial,
    pub sources: IntersectionSources,
}

fn inside_d(s: f64, z: f64) -> bool {
    1.0 - s <= z && z <= s
}

/// Intersections of upper borders with lower borders of all pairs of distinct
/// horns of level at most `max_level`, sorted by `(s, polynomial)` and
/// deduplicated by root.
pub fn landmark_scan(max_level: usize) -> Result<Vec<IntersectionRecord>> {
    if max_level > MAX_SCAN_LEVEL {
        return Err(Error::Resource(format!(
            "landmark scan limited to level {MAX_SCAN_LEVEL}, got {max_level}"
        )));
    }
    let horns: Vec<(HornWord, HornBorders)> = horn_words(max_level)
        .into_iter()
        .map(|w| {
            let b = horn_borders(&w);
            (w, b)
        })
        .collect();
    let mut records: Vec<IntersectionRecord> = horns
        .par_iter()
        .flat_map_iter(|(v, bv)| {
            horns
                .iter()
                .filter(move |(w, _)| w != v)
                .flat_map(move |(w, bw)| {
                    let poly = &bv.upper - &bw.lower;
                    poly.roots_in_unit_half().into_iter().map(move |s| {
                        let z = bv.upper.eval(s);
                        IntersectionRecord {
                            s,
                            z,
                            inside_d: inside_d(s, z),
                            cleared_polynomial: poly.clone(),
                            sources: IntersectionSources::Horns(v.clone(), w.clone()),
                        }
                    })
                })
        })
        .collect();
    records.sort_by(|a, b| {
        a.s.total_cmp(&b.s)
            .then_with(|| a.cleared_polynomial.cmp(&b.cleared_polynomial))
            .then_with(|| source_key(&a.sources).cmp(&source_key(&b.sources)))
    });
    let mut out: Vec<IntersectionRecord> = Vec::new();
    for r in records {
        if let Some(last) = out.last() {
            if (r.s - last.s).abs() < DEDUP_TOL {
                continue;
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn source_key(s: &IntersectionSources) -> (Vec<u8>, Vec<u8>) {
    match s {
        IntersectionSources::Horns(a, b) => (a.0.clone(), b.0.clone()),
        IntersectionSources::Curves(a, b) => (a.to_string().into_bytes(), b.to_string().into_bytes()),
    }
}

/// All intersections of `y_b` and `y_c` with `s` in `(1/2, 1)`, ascending.
pub fn curve_intersection(b: &BinarySequence, c: &BinarySequence) -> Result<Vec<IntersectionRecord>> {
    if b == c {
        return Err(Error::Degenerate(format!("both sequences are {b}")));
    }
    let yb = curve_of(b);
    let yc = curve_of(c);
    let cleared = yb.cleared_difference(&yc);
    if cleared.is_zero() {
        return Err(Error::Degenerate(format!("curves of {b} and {c} coincide")));
    }
    Ok(cleared
        .roots_in_unit_half()
        .into_iter()
        .map(|s| {
            let z = yb.eval_unchecked(s);
            IntersectionRecord {
                s,
                z,
                inside_d: inside_d(s, z),
                cleared_polynomial: cleared.clone(),
                sources: IntersectionSources::Curves(b.clone(), c.clone()),
            }
        })
        .collect())
}

/// Whether the forward orbit of `z` under the two-valued map `g_s` avoids the
/// open overlap interval `(1-s, s)`.
///
/// The orbit consists of the values at `s` of the curves of all shifts of
/// `b` and `c`. Shifts that return to `b` or `c` themselves come back to `z`
/// and are skipped.
pub fn orbit_outside_d(record: &IntersectionRecord) -> Result<bool> {
    match &record.sources {
        IntersectionSources::Curves(b, c) => Ok(orbit_outside_d_at(b, c, record.s)),
        IntersectionSources::Horns(..) => {
            domain("orbit test needs an intersection of address curves")
        }
    }
}

pub fn orbit_outside_d_at(b: &BinarySequence, c: &BinarySequence, s: f64) -> bool {
    forward_orbit_values(b, c, s)
        .into_iter()
        .all(|(_, y)| !(1.0 - s < y && y < s))
}

/// Distinct forward shifts of `b` and `c` (excluding `b`, `c`) with their
/// curve values at `s`.
pub fn forward_orbit_values(
    b: &BinarySequence,
    c: &BinarySequence,
    s: f64,
) -> Vec<(BinarySequence, f64)> {
    let mut seen: Vec<BinarySequence> = Vec::new();
    for x in [b, c] {
        for k in 1..=x.preperiod_len() + x.period_len() {
            let y = x.shift(k);
            if &y != b && &y != c && !seen.contains(&y) {
                seen.push(y);
            }
        }
    }
    seen.into_iter()
        .map(|y| {
            let v = curve_of(&y).eval_unchecked(s);
            (y, v)
        })
        .collect()
}
