//! Numerical approximations of the Bernoulli convolution `nu_t` and the
//! quantities read off from them.
//!
//! `nu_t` is the invariant measure of the two contractions `f_0(x) = t x` and
//! `f_1(x) = t x + 1 - t`, each applied with probability 1/2. Three
//! independent algorithms produce binned approximations:
//!
//! * [`transfer_measure`] iterates the binned push-forward operator to its
//!   fixed point, splitting each bin's mass over the target bins in
//!   proportion to interval overlap;
//! * [`chaos_measure`] follows one random orbit (the chaos game);
//! * [`inverse_measure`] enumerates all `2^depth` images `f_w(1/2)`.
//!
//! Bins are `[i/N, (i+1)/N)`, the last one closed.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Identifier of the generator driving [`chaos_measure`].
pub const CHAOS_RNG_ALGORITHM: &str = "chacha8";
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 2000;
pub const DEFAULT_BURN_IN: usize = 1000;
pub const DEFAULT_BINS: usize = 20000;
/// Largest depth accepted by [`inverse_measure`].
pub const MAX_INVERSE_DEPTH: u32 = 26;

/// `1/sqrt 2`: upper end of phase 2.
pub const SQRT_HALF_T: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// `(sqrt 5 - 1)/2`: the golden mean parameter.
pub const GOLDEN_T: f64 = 0.618_033_988_749_894_8;
/// The Komornik-Loreti constant `beta_KL = 1.7872...`.
pub const KOMORNIK_LORETI_BETA: f64 = 1.787_231_650_182_965;
/// Reciprocal of the tribonacci number (root of `t^3 + t^2 + t - 1`).
pub const TRIBONACCI_T: f64 = 0.543_689_012_692_076_4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureMethod {
    TransferOperator,
    ChaosGame,
    InverseIteration,
}

impl fmt::Display for MeasureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureMethod::TransferOperator => "transfer",
            MeasureMethod::ChaosGame => "chaos",
            MeasureMethod::InverseIteration => "inverse",
        })
    }
}

impl FromStr for MeasureMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transfer" => Ok(MeasureMethod::TransferOperator),
            "chaos" => Ok(MeasureMethod::ChaosGame),
            "inverse" => Ok(MeasureMethod::InverseIteration),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// Binned approximation of `nu_t`: `weights[i]` is the mass of bin `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub t: f64,
    pub method: MeasureMethod,
    pub weights: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    /// Density value (mass divided by bin width) of bin `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.weights[i] * self.bins() as f64
    }

    pub fn bin_of(&self, y: f64) -> usize {
        bin_index(y, self.bins())
    }

    pub fn l1_distance(&self, other: &Histogram) -> f64 {
        assert_eq!(self.bins(), other.bins(), "bin counts differ");
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// L1 distance to the mirror image `y -> 1 - y`.
    pub fn reversal_l1(&self) -> f64 {
        let n = self.bins();
        (0..n)
            .map(|i| (self.weights[i] - self.weights[n - 1 - i]).abs())
            .sum()
    }

    /// Largest density value.
    pub fn peak_density(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max) * self.bins() as f64
    }

    pub fn cdf(&self) -> CdfTable {
        let mut values = Vec::with_capacity(self.bins() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for w in &self.weights {
            acc += w;
            values.push(acc);
        }
        // enforce the invariants F_0 = 0 <= ... <= F_N = 1 against rounding
        let last = values.len() - 1;
        for v in values.iter_mut() {
            *v = v.min(1.0);
        }
        values[last] = 1.0;
        CdfTable { t: self.t, values }
    }

    /// CSV: a `t,method,N` header line and its values, then `bin_lo,weight`
    /// and one row per bin.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.bins();
        writeln!(out, "t,method,N")?;
        writeln!(out, "{:.17},{},{}", self.t, self.method, n)?;
        writeln!(out, "bin_lo,weight")?;
        for (i, w) in self.weights.iter().enumerate() {
            writeln!(out, "{:.17},{:.17e}", i as f64 / n as f64, w)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .map_err(|e| Error::Parse(e.to_string()))
        };
        if next("header")?.trim() != "t,method,N" {
            return Err(Error::Parse("expected header t,method,N".into()));
        }
        let meta = next("metadata")?;
        let fields: Vec<&str> = meta.trim().split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad metadata line {meta:?}")));
        }
        let t: f64 = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad t in {meta:?}")))?;
        let method: MeasureMethod = fields[1].parse()?;
        let n: usize = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad N in {meta:?}")))?;
        if next("column header")?.trim() != "bin_lo,weight" {
            return Err(Error::Parse("expected bin_lo,weight".into()));
        }
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            let row = next("bin row")?;
            let w = row
                .trim()
                .split(',')
                .nth(1)
                .and_then(|w| w.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad row {row:?}")))?;
            weights.push(w);
        }
        Ok(Histogram { t, method, weights })
    }
}

fn bin_index(y: f64, n: usize) -> usize {
    if y <= 0.0 {
        0
    } else {
        ((y * n as f64) as usize).min(n - 1)
    }
}

fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(0.5..1.0).contains(&t) {
        return domain(format!("t = {t} outside [1/2, 1)"));
    }
    Ok(())
}

/// Where the image of one source bin lands: `frac` of the mass goes to bin
/// `first`, the rest to `first + 1`.
#[derive(Clone, Copy)]
struct Split {
    first: usize,
    frac: f64,
}

fn image_splits(t: f64, n: usize, offset: f64) -> Vec<Split> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let a = t * i as f64 + offset * nf;
            let b = t * (i + 1) as f64 + offset * nf;
            let first = (a.floor() as usize).min(n - 1);
            let edge = (first + 1) as f64;
            let frac = if b <= edge || first == n - 1 {
                1.0
            } else {
                ((edge - a) / (b - a)).clamp(0.0, 1.0)
            };
            Split { first, frac }
        })
        .collect()
}

/// Internal grids are refined to at least this many bins before being
/// summed back down; proration smears mass by up to one bin per step, which
/// visibly blurs coarse histograms of nearly singular measures.
pub const MIN_INTERNAL_BINS: usize = 16384;

/// Fixed point of the binned operator `mu -> (f_0 mu + f_1 mu) / 2`,
/// iterated from the uniform distribution until the L1 change drops below
/// `tol`. Runs on `k * n` bins with `k = ceil(MIN_INTERNAL_BINS / n)` and
/// aggregates.
pub fn transfer_measure(t: f64, n: usize, tol: f64, max_iter: usize) -> Result<Histogram> {
    let refine = MIN_INTERNAL_BINS.div_ceil(n.max(1)).max(1);
    transfer_measure_refined(t, n, refine, tol, max_iter)
}

/// [`transfer_measure`] with an explicit refinement factor; `refine = 1`
/// returns the fixed point of the operator binned at resolution `n`.
pub fn transfer_measure_refined(
    t: f64,
    n: usize,
    refine: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Histogram> {
    check_t(t)?;
    if n < 2 {
        return domain("need at least 2 bins");
    }
    if refine < 1 {
        return domain("refinement factor must be at least 1");
    }
    let coarse = n;
    let n = coarse * refine;
    if tol <= 0.0 {
        return domain("tolerance must be positive");
    }
    let left = image_splits(t, n, 0.0);
    let right = image_splits(t, n, 1.0 - t);
    let mut cur = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (i, &w) in cur.iter().enumerate() {
            let m = 0.5 * w;
            for s in [left[i], right[i]] {
                let a = m * s.frac;
                next[s.first] += a;
                if s.frac < 1.0 {
                    next[s.first + 1] += m - a;
                }
            }
        }
        residual = cur.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut cur, &mut next);
        if residual < tol {
            let mut weights: Vec<f64> = cur.chunks(refine).map(|c| c.iter().sum()).collect();
            normalize(&mut weights);
            return Ok(Histogram {
                t,
                method: MeasureMethod::TransferOperator,
                weights,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}

/// Chaos game: histogram of `samples` points of a random orbit
/// `x <- f_s(x)` with fair coin flips `s`, after `burn_in` discarded steps.
/// The orbit starts at 1/2 and the coin is a [`CHAOS_RNG_ALGORITHM`] stream
/// seeded with `seed`, one bit per step.
pub fn chaos_measure(
    t: f64,
    n: usize,
    samples: u64,
    seed: u64,
    burn_in: usize,
) -> Result<Histogram> {
    check_t(t)?;
    if n < 1 || samples < 1 {
        return domain("need at least one bin and one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = 1.0 - t;
    let mut bits = 0u64;
    let mut left = 0u32;
    let mut coin = move || {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        let b = bits & 1;
        bits >>= 1;
        left -= 1;
        b == 1
    };
    let mut x = 0.5f64;
    for _ in 0..burn_in {
        x = t * x + if coin() { shift } else { 0.0 };
    }
    let mut counts = vec![0u64; n];
    for _ in 0..samples {
        x = t * x + if coin() { shift } else { 0.0 };
        counts[bin_index(x, n)] += 1;
    }
    let weights = counts
        .iter()
        .map(|&c| c as f64 / samples as f64)
        .collect();
    Ok(Histogram {
        t,
        method: MeasureMethod::ChaosGame,
        weights,
    })
}

/// All `2^depth` points `f_w(1/2)`, each with weight `2^-depth`.
pub fn inverse_measure(t: f64, n: usize, depth: u32) -> Result<Histogram> {
    check_t(t)?;
    if n < 1 {
        return domain("need at least one bin");
    }
    if depth > MAX_INVERSE_DEPTH {
        return Err(Error::Resource(format!(
            "inverse iteration depth {depth} exceeds {MAX_INVERSE_DEPTH}"
        )));
    }
    // f_w(x0) = sum_k w_k (1-t) t^(k-1) + t^depth x0; split the word into a
    // leading and a trailing half and combine the two partial sums.
    let head_len = depth / 2;
    let tail_len = depth - head_len;
    let partial_sums = |len: u32, start: u32| {
        let mut sums = vec![0.0f64];
        for k in 0..len {
            let step = (1.0 - t) * t.powi((start + k) as i32);
            let mut more = Vec::with_capacity(sums.len() * 2);
            for &s in &sums {
                more.push(s);
                more.push(s + step);
            }
            sums = more;
        }
        sums
    };
    let head = partial_sums(head_len, 0);
    let x0_term = t.powi(depth as i32) * 0.5;
    let tail: Vec<f64> = partial_sums(tail_len, head_len)
        .into_iter()
        .map(|s| s + x0_term)
        .collect();
    let mut counts = vec![0u64; n];
    for &h in &head {
        for &l in &tail {
            counts[bin_index(h + l, n)] += 1;
        }
    }
    let total = (1u64 << depth) as f64;
    Ok(Histogram {
        t,
        method: MeasureMethod::InverseIteration,
        weights: counts.iter().map(|&c| c as f64 / total).collect(),
    })
}

/// Cumulative distribution `F_t` on the grid `i/N`, `i = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    pub t: f64,
    pub values: Vec<f64>,
}

impl CdfTable {
    pub fn bins(&self) -> usize {
        self.values.len() - 1
    }

    /// `F_t(y)` by linear interpolation between grid points.
    pub fn eval(&self, y: f64) -> f64 {
        let n = self.bins();
        if y <= 0.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        let x = y * n as f64;
        let i = (x as usize).min(n - 1);
        let frac = x - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Smallest `y` with `F_t(y) = p`, interpolating linearly inside the
    /// bin where the CDF crosses `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.bins();
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        // first i with F_{i+1} >= p
        let i = self.values[1..].partition_point(|&v| v < p).min(n - 1);
        let (lo, hi) = (self.values[i], self.values[i + 1]);
        let frac = if hi > lo { (p - lo) / (hi - lo) } else { 0.0 };
        (i as f64 + frac) / n as f64
    }

    pub fn write_csv<W: Write>(&self, method: MeasureMethod, mut out: W) -> std::io::Result<()> {
        let n = self.bins();
        writeln!(out, "t,method,N")?;
        writeln!(out, "{:.17},{},{}", self.t, method, n)?;
        writeln!(out, "y,F")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.17},{:.17e}", i as f64 / n as f64, v)?;
        }
        Ok(())
    }
}

/// `max |F_t(g_i(x)) - (2 F_t(x) - i)|` over the sample points, with branch
/// `i = 0` for `x <= 1-t` and `i = 1` for `x >= t`. Away from the endpoints
/// `2 F_t(x) - i` is `frac(2 F_t(x))`, the doubling map.
pub fn conjugacy_residual(t: f64, cdf: &CdfTable, sample_points: &[f64]) -> Result<f64> {
    check_t(t)?;
    let beta = 1.0 / t;
    let mut worst = 0.0f64;
    for &x in sample_points {
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("sample {x} outside [0, 1]"));
        }
        let (image, branch) = if x <= 1.0 - t {
            (beta * x, 0.0)
        } else if x >= t {
            (beta * x + 1.0 - beta, 1.0)
        } else {
            return domain(format!("sample {x} lies inside the overlap ({}, {t})", 1.0 - t));
        };
        let lhs = cdf.eval(image.clamp(0.0, 1.0));
        let rhs = 2.0 * cdf.eval(x) - branch;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Result of the log-log regression behind [`local_dimension`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalDimension {
    /// Regression slope; `+inf` when some ball had measure zero.
    pub slope: f64,
    pub zero_mass: bool,
    pub log_eps: Vec<f64>,
    pub log_mass: Vec<f64>,
    /// `log_mass - fitted line`, one per ladder point.
    pub residuals: Vec<f64>,
}

/// Least-squares slope of `log nu(B(y, eps))` against `log eps` over
/// `points` geometrically spaced radii in `[eps_lo, eps_hi]`.
pub fn local_dimension(
    cdf: &CdfTable,
    y: f64,
    eps_lo: f64,
    eps_hi: f64,
    points: usize,
) -> Result<LocalDimension> {
    let n = cdf.bins() as f64;
    if eps_lo < 2.0 / n * (1.0 - 1e-12) {
        return domain(format!("eps_lo = {eps_lo} below two bin widths"));
    }
    if eps_hi > 0.1 || eps_hi <= eps_lo {
        return domain(format!("need eps_lo < eps_hi <= 0.1, got [{eps_lo}, {eps_hi}]"));
    }
    if points < 8 {
        return domain("need at least 8 ladder points");
    }
    let ratio = (eps_hi / eps_lo).ln() / (points - 1) as f64;
    let log_eps: Vec<f64> = (0..points)
        .map(|k| eps_lo.ln() + ratio * k as f64)
        .collect();
    let masses: Vec<f64> = log_eps
        .iter()
        .map(|&le| {
            let e = le.exp();
            cdf.eval(y + e) - cdf.eval(y - e)
        })
        .collect();
    if masses.iter().any(|&m| m <= 0.0) {
        return Ok(LocalDimension {
            slope: f64::INFINITY,
            zero_mass: true,
            log_eps,
            log_mass: masses.iter().map(|m| m.max(0.0).ln()).collect(),
            residuals: Vec::new(),
        });
    }
    let log_mass: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
    let k = points as f64;
    let mx = log_eps.iter().sum::<f64>() / k;
    let my = log_mass.iter().sum::<f64>() / k;
    let sxy: f64 = log_eps
        .iter()
        .zip(&log_mass)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = log_eps.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = log_eps
        .iter()
        .zip(&log_mass)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    Ok(LocalDimension {
        slope,
        zero_mass: false,
        log_eps,
        log_mass,
        residuals,
    })
}

/// Maximal runs of bins whose density is below `threshold`, as `[lo, hi)`.
pub fn zero_regions(h: &Histogram, threshold: f64) -> Result<Vec<(f64, f64)>> {
    if threshold <= 0.0 {
        return domain("threshold must be positive");
    }
    let n = h.bins();
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..=n {
        let low = i < n && h.density(i) < threshold;
        match (low, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s as f64 / n as f64, i as f64 / n as f64));
                start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitStatus {
    UniqueUpToDepth,
    EntersOverlap,
    OnBoundary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub point: f64,
    /// Orbit values starting with the point itself.
    pub steps: Vec<f64>,
    pub status: OrbitStatus,
}

const BOUNDARY_TOL: f64 = 1e-12;

/// Follows `x <- g_0(x)` below `1-t` and `x <- g_1(x)` above `t` until the
/// orbit enters the overlap `(1-t, t)`, touches its boundary, or `depth`
/// steps have been taken.
pub fn unique_address_check(t: f64, y: f64, depth: usize) -> Result<OrbitReport> {
    check_t(t)?;
    if !(0.0..=1.0).contains(&y) {
        return domain(format!("y = {y} outside [0, 1]"));
    }
    if depth == 0 {
        return domain("depth must be at least 1");
    }
    let beta = 1.0 / t;
    let lo = 1.0 - t;
    let mut x = y;
    let mut steps = vec![x];
    let mut status = OrbitStatus::UniqueUpToDepth;
    for step in 0..=depth {
        if (x - lo).abs() < BOUNDARY_TOL || (x - t).abs() < BOUNDARY_TOL {
            status = OrbitStatus::OnBoundary;
            break;
        }
        if lo < x && x < t {
            status = OrbitStatus::EntersOverlap;
            break;
        }
        if step == depth {
            break;
        }
        x = if x < lo { beta * x } else { beta * x + 1.0 - beta };
        x = x.clamp(0.0, 1.0);
        steps.push(x);
    }
    Ok(OrbitReport {
        point: y,
        steps,
        status,
    })
}

/// Rough phase label 1..=5 of the parameter `t`.
pub fn phase_of(t: f64) -> Result<u8> {
    check_t(t)?;
    let kl_t = 1.0 / KOMORNIK_LORETI_BETA;
    Ok(if t >= SQRT_HALF_T {
        1
    } else if t > GOLDEN_T {
        2
    } else if t >= kl_t {
        3
    } else if t > TRIBONACCI_T {
        4
    } else {
        5
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_at_one_half() {
        let h = transfer_measure(0.5, 1000, 1e-12, 100).unwrap();
        assert!(h.weights.iter().all(|&w| (w - 1e-3).abs() < 1e-14));
        let h = transfer_measure_refined(0.5, 1000, 1, 1e-12, 100).unwrap();
        assert!(h.weights.iter().all(|&w| (w - 1e-3).abs() < 1e-15));
        let h = inverse_measure(0.5, 1 << 12, 12).unwrap();
        assert!(h.weights.iter().all(|&w| w == 1.0 / 4096.0));
    }

    #[test]
    fn convergence_error_carries_residual() {
        match transfer_measure(0.7, 500, 1e-300, 3) {
            Err(Error::Convergence { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn inverse_depth_one() {
        let h = inverse_measure(0.6, 10, 1).unwrap();
        assert_eq!(h.weights[3], 0.5);
        assert_eq!(h.weights[7], 0.5);
        assert!(matches!(
            inverse_measure(0.6, 10, 27),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn chaos_is_reproducible() {
        let a = chaos_measure(0.618, 200, 100_000, 7, 1000).unwrap();
        let b = chaos_measure(0.618, 200, 100_000, 7, 1000).unwrap();
        assert_eq!(a, b);
        let c = chaos_measure(0.618, 200, 100_000, 8, 1000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn normalized() {
        for h in [
            transfer_measure(0.6, 777, 1e-10, 2000).unwrap(),
            chaos_measure(0.6, 777, 10_000, 1, 10).unwrap(),
            inverse_measure(0.6, 777, 10).unwrap(),
        ] {
            assert!((h.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_edges_and_cdf_invariants() {
        let h = transfer_measure(0.6, 500, 1e-10, 2000).unwrap();
        let c = h.cdf();
        assert_eq!(c.values[0], 0.0);
        assert_eq!(*c.values.last().unwrap(), 1.0);
        assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(c.quantile(0.0), 0.0);
        assert_eq!(c.quantile(1.0), 1.0);
        assert!((c.quantile(0.5) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn conjugacy_at_zero_and_domain() {
        let c = transfer_measure(0.6, 1000, 1e-10, 2000).unwrap().cdf();
        assert_eq!(conjugacy_residual(0.6, &c, &[0.0]).unwrap(), 0.0);
        assert!(conjugacy_residual(0.6, &c, &[0.5]).is_err());
    }

    #[test]
    fn local_dimension_preconditions() {
        let c = transfer_measure(0.5, 1000, 1e-12, 10).unwrap().cdf();
        assert!(local_dimension(&c, 0.5, 1e-3, 0.1, 8).is_err());
        assert!(local_dimension(&c, 0.5, 2e-3, 0.2, 8).is_err());
        assert!(local_dimension(&c, 0.5, 2e-3, 0.1, 7).is_err());
        let d = local_dimension(&c, 0.4, 2e-3, 0.1, 12).unwrap();
        assert!((d.slope - 1.0).abs() < 1e-9);
        assert_eq!(d.residuals.len(), 12);
    }

    #[test]
    fn zero_regions_flags_empty_bins() {
        let h = Histogram {
            t: 0.6,
            method: MeasureMethod::ChaosGame,
            weights: vec![0.25, 0.0, 0.0, 0.25, 0.5, 0.0, 0.0, 0.0],
        };
        let z = zero_regions(&h, 0.1).unwrap();
        assert_eq!(z, vec![(0.125, 0.375), (0.625, 1.0)]);
        assert!(zero_regions(&h, 0.0).is_err());
        let u = transfer_measure(0.5, 100, 1e-12, 10).unwrap();
        assert!(zero_regions(&u, 0.01).unwrap().is_empty());
    }

    #[test]
    fn unique_address_examples() {
        let r = unique_address_check(0.6, 0.375, 40).unwrap();
        assert_eq!(r.status, OrbitStatus::UniqueUpToDepth);
        assert!((r.steps[1] - 0.625).abs() < 1e-12);
        assert!((r.steps[2] - 0.375).abs() < 1e-12);
        let r = unique_address_check(0.7, 0.5, 10).unwrap();
        assert_eq!(r.status, OrbitStatus::EntersOverlap);
        assert_eq!(r.steps.len(), 1);
        let t = 0.63;
        let r = unique_address_check(t, t / (1.0 + t), 10).unwrap();
        assert_eq!(r.status, OrbitStatus::EntersOverlap);
        let r = unique_address_check(0.6, 0.4, 10).unwrap();
        assert_eq!(r.status, OrbitStatus::OnBoundary);
        assert!(r.steps.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn phases() {
        assert_eq!(phase_of(0.75).unwrap(), 1);
        assert_eq!(phase_of(0.65).unwrap(), 2);
        assert_eq!(phase_of(0.56).unwrap(), 3);
        assert_eq!(phase_of(0.55).unwrap(), 4);
        assert_eq!(phase_of(0.52).unwrap(), 5);
        assert_eq!(phase_of(0.5).unwrap(), 5);
        assert_eq!(phase_of(GOLDEN_T).unwrap(), 3);
        assert_eq!(phase_of(SQRT_HALF_T).unwrap(), 1);
        assert_eq!(phase_of(TRIBONACCI_T).unwrap(), 5);
        assert!(phase_of(1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let h = transfer_measure(0.61, 50, 1e-10, 2000).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = Histogram::read_csv(&buf[..]).unwrap();
        assert_eq!(back, h);
        assert!(Histogram::read_csv(&b"t,N\n"[..]).is_err());
    }
}
