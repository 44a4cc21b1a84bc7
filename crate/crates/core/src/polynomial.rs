//! Integer polynomials in one variable, with exact arithmetic, real root
//! isolation on an interval and a simultaneous (Aberth-Ehrlich) complex root
//! finder.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Number of uniform subintervals used to bracket real roots.
pub const ROOT_GRID: usize = 4096;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-13;

/// Polynomial with integer coefficients, stored in ascending degree order
/// without trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct IntegerPolynomial {
    coeffs: Vec<i64>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntegerPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`
    pub fn monomial(c: i64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c as f64)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let x = x.inner();
        let v = self
            .coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, &c| {
                acc * x + BigRational::from_integer(c.into())
            });
        Rational::from_inner(v)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as i64)
                .collect(),
        )
    }

    /// Multiplies by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Divides by the largest power of `t` dividing the polynomial.
    pub fn strip_t_factors(&self) -> Self {
        let k = self.coeffs.iter().take_while(|&&c| c == 0).count();
        Self::new(self.coeffs[k..].to_vec())
    }

    /// `t^deg * p(1/t)`, after removing factors of `t`.
    pub fn reciprocal(&self) -> Self {
        let mut c = self.strip_t_factors().coeffs;
        c.reverse();
        Self::new(c)
    }

    /// Multiplies by -1 if needed so the leading coefficient is positive.
    pub fn sign_normalized(&self) -> Self {
        if self.leading() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn content(&self) -> i64 {
        self.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g == 0 {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|c| c / g).collect()).sign_normalized()
    }

    /// Exact division over the integers, `None` when `divisor` does not
    /// divide `self` in `Z[t]`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dl = divisor.leading();
        let dd = divisor.degree();
        let mut quot = vec![0i64; self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let top = rem[i + dd];
            if top % dl != 0 {
                return None;
            }
            let q = top / dl;
            quot[i] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * c;
            }
        }
        if rem.iter().all(|&c| c == 0) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Rational roots `p/q` (lowest terms, `q > 0`), each listed once.
    pub fn rational_roots(&self) -> Vec<(i64, i64)> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut roots = Vec::new();
        if self.constant_term() == 0 {
            roots.push((0, 1));
        }
        let p = self.strip_t_factors();
        if p.degree() == 0 {
            return roots;
        }
        let a0 = p.constant_term().abs();
        let an = p.leading().abs();
        for num in divisors(a0) {
            for den in divisors(an) {
                if num.gcd(&den) != 1 {
                    continue;
                }
                for sign in [1, -1] {
                    let r = (sign * num, den);
                    if p.vanishes_at(r) && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots
    }

    fn vanishes_at(&self, (num, den): (i64, i64)) -> bool {
        let n = self.degree();
        let num = BigInt::from(num);
        let den = BigInt::from(den);
        let mut acc = BigInt::zero();
        let mut num_pow = BigInt::from(1);
        for (i, &c) in self.coeffs.iter().enumerate() {
            acc += BigInt::from(c) * &num_pow * den.pow((n - i) as u32);
            num_pow *= &num;
        }
        acc.is_zero()
    }

    /// Removes every linear factor with a rational root, and the content.
    pub fn without_rational_roots(&self) -> Self {
        let mut p = self.primitive();
        loop {
            let roots = p.rational_roots();
            if roots.is_empty() || p.degree() == 0 {
                return p;
            }
            for (num, den) in roots {
                let lin = Self::new(vec![-num, den]);
                while let Some(q) = p.div_exact(&lin) {
                    p = q;
                }
            }
            p = p.primitive();
        }
    }

    /// Real roots in the open interval `(lo, hi)`, bracketed on a uniform grid
    /// of `grid` subintervals and refined by bisection. Roots of even
    /// multiplicity that do not change sign are not reported.
    pub fn real_roots_in(&self, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        let step = (hi - lo) / grid as f64;
        let node = |i: usize| if i == grid { hi } else { lo + step * i as f64 };
        let mut roots = Vec::new();
        let mut prev = self.eval(lo);
        for i in 1..=grid {
            let x = node(i);
            let v = self.eval(x);
            if v == 0.0 && i < grid {
                roots.push(x);
            } else if prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0) {
                roots.push(self.bisect(node(i - 1), x, prev));
            }
            prev = v;
        }
        roots
    }

    /// Real roots in `(1/2, 1)` with the default grid.
    pub fn roots_in_unit_half(&self) -> Vec<f64> {
        self.real_roots_in(0.5, 1.0, ROOT_GRID)
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        while b - a > ROOT_TOL {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// All complex roots, see [`all_roots`].
    pub fn all_roots(&self) -> Result<Vec<Complex64>> {
        all_roots(self)
    }
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs();
    (1..=n).filter(|d| n % d == 0).collect()
}

impl Ord for IntegerPolynomial {
    /// Orders by degree, then coefficients from the constant term upward.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for IntegerPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn add(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntegerPolynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0) + rhs.coeffs.get(i).copied().unwrap_or(0)
                })
                .collect(),
        )
    }
}

impl Sub for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn sub(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        self + &(-rhs.clone())
    }
}

impl Mul for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn mul(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntegerPolynomial::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntegerPolynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntegerPolynomial {
            type Output = IntegerPolynomial;
            fn $m(self, rhs: IntegerPolynomial) -> IntegerPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn neg(self) -> IntegerPolynomial {
        IntegerPolynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntegerPolynomial {
    /// Ascending terms in `t`, e.g. `t - t^3 + t^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("t")?,
                (1, m) => write!(f, "{m}t")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, m) => write!(f, "{m}t^{k}")?,
            }
        }
        Ok(())
    }
}

const ABERTH_MAX_ITER: usize = 500;
const RESIDUAL_TOL: f64 = 1e-10;

/// All complex roots of `p` by Aberth-Ehrlich simultaneous iteration.
///
/// Initial guesses sit on the circle of radius `|a_0/a_n|^(1/n)` at fixed
/// angles, so results are reproducible bit for bit. Near-real roots are
/// snapped onto the real axis and the remaining roots are paired into exact
/// conjugates. Every returned root satisfies
/// `|p(r)| / (1 + |r|^n) < 1e-10` for the monic normalization of `p`.
pub fn all_roots(p: &IntegerPolynomial) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::Domain("all_roots needs degree >= 1".into()));
    }
    let zeros_at_origin = p.coeffs.iter().take_while(|&&c| c == 0).count();
    let q = p.strip_t_factors();
    let mut roots = vec![Complex64::zero(); zeros_at_origin];
    if q.degree() > 0 {
        roots.extend(aberth(&q)?);
    }
    Ok(roots)
}

fn aberth(p: &IntegerPolynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading() as f64;
    let a: Vec<f64> = p.coeffs.iter().map(|&c| c as f64 / lead).collect();
    let da: Vec<f64> = (1..=n).map(|i| a[i] * i as f64).collect();
    let horner = |cs: &[f64], z: Complex64| {
        cs.iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c)
    };

    let radius = a[0].abs().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < ABERTH_MAX_ITER {
        iterations += 1;
        last_step = 0.0;
        for k in 0..n {
            let pz = horner(&a, z[k]);
            if pz == Complex64::zero() {
                continue;
            }
            let ratio = pz / horner(&da, z[k]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[k] -= w;
                last_step = last_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if last_step < 1e-15 {
            break;
        }
    }

    if z.iter().any(|r| !r.is_finite()) {
        return Err(Error::Numeric {
            iterations,
            detail: "non-finite iterate".into(),
        });
    }

    let z = pair_conjugates(z, &a, &da);
    let worst = z
        .iter()
        .map(|&r| horner(&a, r).norm() / (1.0 + r.norm().powi(n as i32)))
        .fold(0.0, f64::max);
    if worst >= RESIDUAL_TOL {
        return Err(Error::Numeric {
            iterations,
            detail: format!("worst scaled residual {worst:e}, last step {last_step:e}"),
        });
    }
    Ok(z)
}

fn pair_conjugates(z: Vec<Complex64>, a: &[f64], da: &[f64]) -> Vec<Complex64> {
    let horner = |cs: &[f64], x: f64| cs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for r in z {
        if r.im.abs() <= 1e-9 * (1.0 + r.norm()) {
            let mut x = r.re;
            for _ in 0..3 {
                let d = horner(da, x);
                if d == 0.0 {
                    break;
                }
                let nx = x - horner(a, x) / d;
                if !nx.is_finite() || (nx - x).abs() > 1e-6 * (1.0 + x.abs()) {
                    break;
                }
                x = nx;
            }
            real.push(Complex64::new(x, 0.0));
        } else if r.im > 0.0 {
            upper.push(r);
        } else {
            lower.push(r);
        }
    }
    if upper.len() != lower.len() {
        let mut all = real;
        all.extend(upper);
        all.extend(lower);
        return all;
    }
    let mut out = real;
    let mut lower_left = lower;
    for u in upper {
        let (idx, _) = lower_left
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l.conj() - u).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("equal counts");
        let l = lower_left.swap_remove(idx);
        let re = 0.5 * (u.re + l.re);
        let im = 0.5 * (u.im - l.im);
        out.push(Complex64::new(re, im));
        out.push(Complex64::new(re, -im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntegerPolynomial {
        IntegerPolynomial::new(c.to_vec())
    }

    #[test]
    fn trims_and_displays() {
        let p = poly(&[0, 1, 0, -1, 1, 0, 0]);
        assert_eq!(p.degree(), 4);
        assert_eq!(p.to_string(), "t - t^3 + t^4");
        assert_eq!(poly(&[-1, 2, 0, 3]).to_string(), "-1 + 2t + 3t^3");
        assert_eq!(IntegerPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn arithmetic() {
        let a = poly(&[1, 1]);
        let b = poly(&[1, -1]);
        assert_eq!(&a * &b, poly(&[1, 0, -1]));
        assert_eq!(&a + &b, poly(&[2]));
        assert_eq!(&a - &a, IntegerPolynomial::zero());
        assert_eq!(poly(&[1, 0, -1]).div_exact(&b), Some(a.clone()));
        assert_eq!(poly(&[1, 0, 1]).div_exact(&b), None);
        assert_eq!(poly(&[0, 0, 1, 2]).reciprocal(), poly(&[2, 1]));
    }

    #[test]
    fn rational_root_removal() {
        // (2t - 1)(t^2 + t - 1)(t + 1)
        let p = &(&poly(&[-1, 2]) * &poly(&[-1, 1, 1])) * &poly(&[1, 1]);
        let mut r = p.rational_roots();
        r.sort();
        assert_eq!(r, vec![(-1, 1), (1, 2)]);
        assert_eq!(p.without_rational_roots(), poly(&[-1, 1, 1]));
    }

    #[test]
    fn isolates_golden_root() {
        let roots = poly(&[-1, 1, 1]).roots_in_unit_half();
        assert_eq!(roots.len(), 1);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((roots[0] - golden).abs() < 1e-12);
    }

    #[test]
    fn quadratic_roots_match_formula() {
        let mut r = all_roots(&poly(&[-1, -1, 1])).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        let s5 = 5f64.sqrt();
        assert!((r[0].re - (1.0 - s5) / 2.0).abs() < 1e-12);
        assert!((r[1].re - (1.0 + s5) / 2.0).abs() < 1e-12);
        assert!(r.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn tribonacci_roots() {
        let r = all_roots(&poly(&[-1, -1, -1, 1])).unwrap();
        let real: Vec<_> = r.iter().filter(|z| z.im == 0.0).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].re - 1.839_286_755_214_161).abs() < 1e-12);
        let complex: Vec<_> = r.iter().filter(|z| z.im != 0.0).collect();
        assert_eq!(complex.len(), 2);
        assert_eq!(complex[0].conj(), *complex[1]);
        let modulus = (1.0 / real[0].re).sqrt();
        assert!((complex[0].norm() - modulus).abs() < 1e-12);
        assert!((complex[0].norm() - 0.7374).abs() < 1e-4);
    }

    #[test]
    fn sqrt_two() {
        let mut r = all_roots(&poly(&[-2, 0, 1])).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[1].re - 2f64.sqrt()).abs() < 1e-14);
        assert!((r[0].re + 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn roots_at_origin_and_degree_zero() {
        let r = all_roots(&poly(&[0, 0, -1, 1])).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!(all_roots(&poly(&[3])).is_err());
    }
}
