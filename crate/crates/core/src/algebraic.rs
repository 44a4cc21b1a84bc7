//! Classification of algebraic integers by the moduli of their conjugates,
//! and the quantitative singularity criteria for intersection parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::IntegerPolynomial;

/// Tolerance on conjugate moduli near the unit circle and near `beta`.
pub const MODULUS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumberTag {
    Pisot,
    Salem,
    Garsia,
    Perron,
    WeakPerron,
    None,
}

impl std::fmt::Display for NumberTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NumberTag::Pisot => "Pisot",
            NumberTag::Salem => "Salem",
            NumberTag::Garsia => "Garsia",
            NumberTag::Perron => "Perron",
            NumberTag::WeakPerron => "WeakPerron",
            NumberTag::None => "None",
        };
        f.write_str(s)
    }
}

/// Which real root of the polynomial plays the role of `beta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootSelector {
    LargestReal,
    NearestTo(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberClass {
    pub tag: NumberTag,
    pub beta: f64,
    /// Moduli of the conjugates of `beta`, sorted descending.
    #[serde(rename = "moduli")]
    pub conjugate_moduli: Vec<f64>,
    /// `true` when the polynomial is provably irreducible (degree at most 3
    /// without rational roots, or degree 1).
    pub minimality_verified: bool,
}

/// Classifies the selected real root `beta > 1` of `p`.
///
/// Tags are tried in the order Pisot, Salem, Garsia, Perron, weak Perron;
/// the first that fits is reported. Non-monic polynomials (after fixing the
/// sign) do not define algebraic integers and get [`NumberTag::None`].
pub fn classify(p: &IntegerPolynomial, which_root: RootSelector) -> Result<NumberClass> {
    if p.degree() == 0 {
        return Err(Error::Domain("classify needs degree >= 1".into()));
    }
    let p = p.sign_normalized();
    let roots = p.all_roots()?;
    let candidates = roots
        .iter()
        .enumerate()
        .filter(|(_, z)| z.im == 0.0 && z.re > 1.0);
    let chosen = match which_root {
        RootSelector::LargestReal => candidates.max_by(|a, b| a.1.re.total_cmp(&b.1.re)),
        RootSelector::NearestTo(x) => {
            candidates.min_by(|a, b| (a.1.re - x).abs().total_cmp(&(b.1.re - x).abs()))
        }
    };
    let (idx, beta) = match chosen {
        Some((i, z)) => (i, z.re),
        None => return Err(Error::Domain(format!("{p} has no real root > 1"))),
    };
    let mut moduli: Vec<f64> = roots
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, z)| z.norm())
        .collect();
    moduli.sort_by(|a, b| b.total_cmp(a));

    let tag = if p.is_monic() {
        tag_for(beta, &moduli, p.constant_term())
    } else {
        NumberTag::None
    };
    let minimality_verified =
        p.degree() == 1 || (p.degree() <= 3 && p.rational_roots().is_empty());
    Ok(NumberClass {
        tag,
        beta,
        conjugate_moduli: moduli,
        minimality_verified,
    })
}

fn tag_for(beta: f64, moduli: &[f64], constant: i64) -> NumberTag {
    let eps = MODULUS_EPS;
    let max = moduli.first().copied().unwrap_or(0.0);
    if moduli.iter().all(|&m| m < 1.0 - eps) {
        NumberTag::Pisot
    } else if moduli.iter().all(|&m| m <= 1.0 + eps)
        && moduli.iter().any(|&m| (m - 1.0).abs() <= eps)
    {
        NumberTag::Salem
    } else if moduli.iter().all(|&m| m > 1.0 + eps) && constant.abs() == 2 {
        NumberTag::Garsia
    } else if beta > max + eps {
        NumberTag::Perron
    } else if beta >= max - eps {
        NumberTag::WeakPerron
    } else {
        NumberTag::None
    }
}

/// Classifies `beta = 1/t` for the smallest root `t` of `p_t` in `(1/2, 1)`.
pub fn classify_from_t_polynomial(p_t: &IntegerPolynomial) -> Result<NumberClass> {
    let t = *p_t
        .roots_in_unit_half()
        .first()
        .ok_or_else(|| Error::Domain(format!("{p_t} has no root in (1/2, 1)")))?;
    classify_t_root(p_t, t)
}

/// Classifies `beta = 1/t` where `t` is (close to) a root of `p_t`.
pub fn classify_t_root(p_t: &IntegerPolynomial, t: f64) -> Result<NumberClass> {
    if !(t > 0.5 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} outside (1/2, 1)")));
    }
    let beta_poly = p_t.reciprocal().sign_normalized();
    classify(&beta_poly, RootSelector::NearestTo(1.0 / t))
}

/// The root `r > 1` of `r^-m + r^-n = 1`, a lower bound for the growth of the
/// number of addresses at an intersection of two cycles of lengths `m`, `n`.
///
/// Panics if `m` or `n` is zero.
pub fn growth_rate(m: u32, n: u32) -> f64 {
    assert!(m >= 1 && n >= 1, "cycle lengths must be positive");
    let f = |r: f64| r.powi(-(m as i32)) + r.powi(-(n as i32)) - 1.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    if f(hi) >= 0.0 {
        return hi;
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `log(2/rho) / log(beta)`.
pub fn local_dim_bound(rho: f64, beta: f64) -> f64 {
    (2.0 / rho).ln() / beta.ln()
}

/// `2^(-n/(n+1))`.
pub fn feng_wang_threshold(degree: u32) -> f64 {
    2f64.powf(-(degree as f64) / (degree as f64 + 1.0))
}

/// Whether `t < 2^(-n/(n+1))` for a root of a degree-`n` polynomial.
pub fn feng_wang_test(degree: u32, t: f64) -> bool {
    t < feng_wang_threshold(degree)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub singular: bool,
    pub growth_rate: f64,
    pub dim_bound: f64,
}

/// Tests `(2s)^-m + (2s)^-n > 1` and bounds the local dimension at the
/// intersection point by `log(2/rho)/log(1/s)`.
pub fn singularity_test(m: u32, n: u32, s: f64) -> SingularityReport {
    let two_s = 2.0 * s;
    let singular = two_s.powi(-(m as i32)) + two_s.powi(-(n as i32)) > 1.0;
    let rho = growth_rate(m, n);
    SingularityReport {
        singular,
        growth_rate: rho,
        dim_bound: local_dim_bound(rho, 1.0 / s),
    }
}
