//! Eventually periodic 01-sequences, the doubling map acting on them, and the
//! itinerary / kneading predicates.
//!
//! Everything here is exact. Values are compared through the digit words
//! themselves (lexicographic order on infinite words, after rewriting the
//! dyadic `...0111...` tails into `...1000...`), so no big-number arithmetic
//! is needed except in [`BinarySequence::value`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An eventually periodic binary sequence `.u v v v ...` with preperiod `u`
/// and period `v`, stored in canonical form: the period is primitive and the
/// preperiod is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySequence {
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

/// Result of the bounded-run test for itineraries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunCheck {
    pub is_itinerary: bool,
    /// Longest run of equal symbols, `None` when the run is infinite.
    pub max_run: Option<usize>,
}

impl BinarySequence {
    /// Builds a sequence from digit slices (each entry 0 or 1).
    pub fn new(preperiod: &[u8], period: &[u8]) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("period must be non-empty".into()));
        }
        if preperiod.iter().chain(period).any(|&d| d > 1) {
            return Err(Error::Domain("digits must be 0 or 1".into()));
        }
        Ok(Self::canonical(preperiod.to_vec(), period.to_vec()))
    }

    /// Builds a sequence from two words of `'0'`/`'1'` characters.
    pub fn from_words(preperiod: &str, period: &str) -> Result<Self> {
        let pre = parse_word(preperiod)?;
        let per = parse_word(period)?;
        Self::new(&pre, &per)
    }

    fn canonical(mut preperiod: Vec<u8>, mut period: Vec<u8>) -> Self {
        let q = period.len();
        let d = (1..=q)
            .find(|&d| q.is_multiple_of(d) && (d..q).all(|i| period[i] == period[i % d]))
            .unwrap_or(q);
        period.truncate(d);
        while let Some(&last) = preperiod.last() {
            if last != *period.last().unwrap() {
                break;
            }
            preperiod.pop();
            period.rotate_right(1);
        }
        BinarySequence { preperiod, period }
    }

    /// The binary expansion of `p/q`, `0 <= p < q`.
    pub fn from_rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 || p < 0 || p >= q {
            return Err(Error::Domain(format!(
                "from_rational needs 0 <= p < q, got {p}/{q}"
            )));
        }
        let g = p.gcd(&q);
        let (mut r, q) = ((p / g) as u128, (q / g) as u128);
        let mut seen: HashMap<u128, usize> = HashMap::new();
        let mut digits = Vec::new();
        loop {
            if let Some(&start) = seen.get(&r) {
                let period = digits.split_off(start);
                return Ok(Self::canonical(digits, period));
            }
            seen.insert(r, digits.len());
            r *= 2;
            if r >= q {
                digits.push(1);
                r -= q;
            } else {
                digits.push(0);
            }
        }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Purely periodic under the doubling map (empty preperiod).
    pub fn is_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// Digit `b_k`, 1-indexed.
    pub fn digit(&self, k: usize) -> u8 {
        assert!(k >= 1, "digits are 1-indexed");
        let p = self.preperiod.len();
        if k <= p {
            self.preperiod[k - 1]
        } else {
            self.period[(k - p - 1) % self.period.len()]
        }
    }

    /// Exact value `sum b_k 2^-k`.
    pub fn value(&self) -> Rational {
        let word = |w: &[u8]| {
            w.iter()
                .fold(BigInt::zero(), |acc, &d| (acc << 1usize) + BigInt::from(d))
        };
        let p = self.preperiod.len();
        let q = self.period.len();
        let cycle = (BigInt::one() << q) - 1;
        let numerator = word(&self.preperiod) * &cycle + word(&self.period);
        let denominator = (BigInt::one() << p) * cycle;
        Rational::from_big(numerator, denominator).expect("non-zero denominator")
    }

    /// Value as a float, for plotting and numerical checks.
    pub fn value_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// The doubling map applied `k` times (drops the first `k` digits).
    pub fn shift(&self, k: usize) -> Self {
        let p = self.preperiod.len();
        if k <= p {
            Self::canonical(self.preperiod[k..].to_vec(), self.period.clone())
        } else {
            let mut period = self.period.clone();
            let r = (k - p) % period.len();
            period.rotate_left(r);
            Self::canonical(Vec::new(), period)
        }
    }

    /// Digitwise flip, i.e. `1 - b`.
    pub fn complement(&self) -> Self {
        let flip = |w: &[u8]| w.iter().map(|d| 1 - d).collect::<Vec<_>>();
        Self::canonical(flip(&self.preperiod), flip(&self.period))
    }

    /// The distinct points of the forward orbit, starting with `self`.
    pub fn orbit(&self) -> Vec<Self> {
        (0..self.preperiod.len() + self.period.len())
            .map(|k| self.shift(k))
            .collect()
    }

    /// Bounded-run test: a sequence is an itinerary iff it has no infinite
    /// run of equal symbols.
    pub fn run_check(&self) -> RunCheck {
        let constant = self.period.iter().all(|&d| d == self.period[0]);
        if constant {
            return RunCheck {
                is_itinerary: false,
                max_run: None,
            };
        }
        let mut longest = 0;
        let mut run = 0;
        let mut prev = None;
        for &d in self
            .preperiod
            .iter()
            .chain(&self.period)
            .chain(&self.period)
        {
            run = if prev == Some(d) { run + 1 } else { 1 };
            prev = Some(d);
            longest = longest.max(run);
        }
        RunCheck {
            is_itinerary: true,
            max_run: Some(longest),
        }
    }

    pub fn is_itinerary(&self) -> bool {
        self.run_check().is_itinerary
    }

    /// No shift of the sequence lies nearer to 1/2 than the sequence itself.
    pub fn is_kneading(&self) -> bool {
        let own = self.distance_to_half();
        (1..=self.preperiod.len() + self.period.len())
            .all(|k| cmp_value(&self.shift(k).distance_to_half(), &own) != Ordering::Less)
    }

    /// The orbit point nearest to 1/2. On an exact tie between `x` and
    /// `1 - x` the point below 1/2 is returned.
    pub fn kneading_of(&self) -> Result<Self> {
        if !self.is_itinerary() {
            return Err(Error::Domain(format!("{self} is not an itinerary")));
        }
        let half = Self::half();
        let best = self
            .orbit()
            .into_iter()
            .map(|x| (x.distance_to_half(), x))
            .min_by(|(da, a), (db, b)| {
                cmp_value(da, db)
                    .then_with(|| cmp_value(a, &half).cmp(&cmp_value(b, &half)))
            })
            .map(|(_, x)| x)
            .expect("orbit is never empty");
        Ok(best)
    }

    /// `|b - 1/2|` as a sequence.
    fn distance_to_half(&self) -> Self {
        let tail = self.shift(1);
        let tail = if self.digit(1) == 1 {
            tail
        } else {
            tail.complement()
        };
        let mut pre = Vec::with_capacity(tail.preperiod.len() + 1);
        pre.push(0);
        pre.extend_from_slice(&tail.preperiod);
        Self::canonical(pre, tail.period)
    }

    fn half() -> Self {
        BinarySequence {
            preperiod: vec![1],
            period: vec![0],
        }
    }

    /// Rewrites a `...0(1)` tail as `...1(0)`. Returns `None` for `.(1) = 1`.
    fn without_one_tail(&self) -> Option<Self> {
        if self.period != [1] {
            return Some(self.clone());
        }
        let i = self.preperiod.iter().rposition(|&d| d == 0)?;
        let mut pre = self.preperiod[..i].to_vec();
        pre.push(1);
        Some(Self::canonical(pre, vec![0]))
    }
}

/// Exact numeric comparison of the values of two sequences.
pub fn cmp_value(a: &BinarySequence, b: &BinarySequence) -> Ordering {
    let (a, b) = match (a.without_one_tail(), b.without_one_tail()) {
        (None, None) => return Ordering::Equal,
        (None, Some(_)) => return Ordering::Greater,
        (Some(_), None) => return Ordering::Less,
        (Some(a), Some(b)) => (a, b),
    };
    let qa = a.period.len();
    let qb = b.period.len();
    let horizon = a.preperiod.len().max(b.preperiod.len()) + qa.lcm(&qb);
    for k in 1..=horizon {
        match a.digit(k).cmp(&b.digit(k)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("invalid binary digit {c:?} in {s:?}"))),
        })
        .collect()
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.preperiod {
            write!(f, "{d}")?;
        }
        f.write_str("(")?;
        for d in &self.period {
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for BinarySequence {
    type Err = Error;

    /// Accepts either the word form `01(10)` or a rational `5/12`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: i64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Self::from_rational(p, q);
        }
        let s = s.strip_prefix('.').unwrap_or(s);
        let (pre, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Parse(format!("expected pre(period) form, got {s:?}")))?;
        let per = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        if per.is_empty() {
            return Err(Error::Parse(format!("empty period in {s:?}")));
        }
        Self::from_words(pre, per)
    }
}
