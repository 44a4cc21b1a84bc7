//! Raster output of a [`DensityField`]: binary PGM (`P5`) or PPM (`P6`),
//! one pixel column per parameter, `y = 1` at the top.

use std::str::FromStr;

use crate::curves::{curve_of, horn_borders, horn_words, HornWord};
use crate::error::{domain, Error, Result};
use crate::field::DensityField;
use crate::polynomial::IntegerPolynomial;
use crate::sequence::BinarySequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Colormap {
    /// Dark blue, green, yellow, red.
    Heat,
    Gray,
}

impl FromStr for Colormap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(Colormap::Heat),
            "gray" | "grey" => Ok(Colormap::Gray),
            _ => Err(Error::Parse(format!("unknown colormap {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Overlay {
    Curve(BinarySequence),
    Horn(HornWord),
    /// Every horn of level at most the given one.
    HornLevels(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub colormap: Colormap,
    /// Densities at or above this percentile of all pixels saturate.
    pub clip_percentile: f64,
    pub gamma: f64,
    /// Image height; bins are averaged in groups when it is below the bin
    /// count. `None` keeps one row per bin.
    pub height: Option<usize>,
    pub overlays: Vec<Overlay>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            colormap: Colormap::Heat,
            clip_percentile: 99.5,
            gamma: 0.8,
            height: None,
            overlays: Vec::new(),
        }
    }
}

const OVERLAY_RGB: [u8; 3] = [255, 255, 255];

/// The 256-entry heat ramp.
pub fn heat_ramp() -> [[u8; 3]; 256] {
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [0.0, 0.0, 64.0]),
        (85.0, [0.0, 170.0, 60.0]),
        (170.0, [255.0, 255.0, 0.0]),
        (255.0, [255.0, 0.0, 0.0]),
    ];
    let mut ramp = [[0u8; 3]; 256];
    for (i, px) in ramp.iter_mut().enumerate() {
        let x = i as f64;
        let k = STOPS.iter().rposition(|s| s.0 <= x).unwrap().min(2);
        let (x0, c0) = STOPS[k];
        let (x1, c1) = STOPS[k + 1];
        let f = (x - x0) / (x1 - x0);
        for ch in 0..3 {
            px[ch] = (c0[ch] + f * (c1[ch] - c0[ch])).round() as u8;
        }
    }
    ramp
}

/// Greyscale levels, `rows x cols` row-major with the top row first, before
/// overlays.
pub fn intensities(field: &DensityField, spec: &RenderSpec) -> Result<(usize, Vec<u8>)> {
    validate(spec)?;
    let n = field.y_bins();
    let rows = spec.height.unwrap_or(n).clamp(1, n);
    let cols = field.cols();
    // density[r][c] with r counted from y = 0
    let mut density = vec![0.0; rows * cols];
    for c in 0..cols {
        let col = field.column(c);
        for r in 0..rows {
            let (lo, hi) = (r * n / rows, (r + 1) * n / rows);
            let mean = col[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
            density[r * cols + c] = mean * n as f64;
        }
    }
    let clip = percentile(&density, spec.clip_percentile);
    let mut levels = vec![0u8; rows * cols];
    for r in 0..rows {
        let top = rows - 1 - r;
        for c in 0..cols {
            let v = if clip > 0.0 {
                (density[r * cols + c] / clip).min(1.0).powf(spec.gamma)
            } else {
                0.0
            };
            levels[top * cols + c] = (v * 255.0).round() as u8;
        }
    }
    Ok((rows, levels))
}

fn validate(spec: &RenderSpec) -> Result<()> {
    if !(spec.clip_percentile > 90.0 && spec.clip_percentile <= 100.0) {
        return domain(format!(
            "clip percentile {} outside (90, 100]",
            spec.clip_percentile
        ));
    }
    if !(spec.gamma > 0.0) {
        return domain(format!("gamma {} must be positive", spec.gamma));
    }
    if spec.height == Some(0) {
        return domain("image height must be positive");
    }
    Ok(())
}

fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    let rank = ((p / 100.0 * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    let (_, x, _) = v.select_nth_unstable_by(rank, |a, b| a.total_cmp(b));
    *x
}

/// Polynomials or rational functions to trace, as `y(t)` closures.
fn overlay_paths(spec: &RenderSpec) -> Vec<Box<dyn Fn(f64) -> f64>> {
    let mut paths: Vec<Box<dyn Fn(f64) -> f64>> = Vec::new();
    let add_horn = |w: &HornWord, paths: &mut Vec<Box<dyn Fn(f64) -> f64>>| {
        let b = horn_borders(w);
        for p in [b.lower, b.upper] {
            paths.push(Box::new(move |t| IntegerPolynomial::eval(&p, t)));
        }
    };
    for o in &spec.overlays {
        match o {
            Overlay::Curve(b) => {
                let c = curve_of(b);
                paths.push(Box::new(move |t| c.eval_unchecked(t)));
            }
            Overlay::Horn(w) => add_horn(w, &mut paths),
            Overlay::HornLevels(l) => {
                for w in horn_words(*l) {
                    add_horn(&w, &mut paths);
                }
            }
        }
    }
    paths
}

/// Encodes the field as a binary PGM (gray) or PPM (heat) image.
pub fn render(field: &DensityField, spec: &RenderSpec) -> Result<Vec<u8>> {
    let (rows, levels) = intensities(field, spec)?;
    let cols = field.cols();
    let channels = match spec.colormap {
        Colormap::Gray => 1,
        Colormap::Heat => 3,
    };
    let mut pixels = Vec::with_capacity(rows * cols * channels);
    let ramp = heat_ramp();
    for &l in &levels {
        match spec.colormap {
            Colormap::Gray => pixels.push(l),
            Colormap::Heat => pixels.extend_from_slice(&ramp[l as usize]),
        }
    }
    for path in overlay_paths(spec) {
        for (c, &t) in field.t_grid().iter().enumerate() {
            let y = path(t);
            if !(0.0..=1.0).contains(&y) {
                continue;
            }
            let r = rows - 1 - ((y * rows as f64) as usize).min(rows - 1);
            let at = (r * cols + c) * channels;
            pixels[at..at + channels].copy_from_slice(&OVERLAY_RGB[..channels]);
        }
    }
    let magic = if channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{compute_field, MeasureParams};

    fn uniform() -> DensityField {
        DensityField::from_columns(vec![0.5, 0.6], vec![vec![0.25; 4], vec![0.25; 4]]).unwrap()
    }

    #[test]
    fn uniform_field_is_constant() {
        let spec = RenderSpec {
            colormap: Colormap::Gray,
            ..RenderSpec::default()
        };
        let img = render(&uniform(), &spec).unwrap();
        let header = b"P5\n2 4\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert!(img[header.len()..].iter().all(|&p| p == 255));
        let color = render(&uniform(), &RenderSpec::default()).unwrap();
        assert!(color.starts_with(b"P6\n2 4\n255\n"));
        assert_eq!(color.len(), 11 + 2 * 4 * 3);
    }

    #[test]
    fn row_averaging() {
        let f = DensityField::from_columns(vec![0.5, 0.6], vec![vec![0.5, 0.0, 0.25, 0.25]; 2])
            .unwrap();
        let spec = RenderSpec {
            colormap: Colormap::Gray,
            clip_percentile: 100.0,
            gamma: 1.0,
            height: Some(2),
            overlays: vec![],
        };
        let (rows, levels) = intensities(&f, &spec).unwrap();
        assert_eq!(rows, 2);
        assert_eq!(levels, vec![255, 255, 255, 255]);
    }

    #[test]
    fn bad_specs_rejected() {
        for spec in [
            RenderSpec { clip_percentile: 90.0, ..RenderSpec::default() },
            RenderSpec { clip_percentile: 100.5, ..RenderSpec::default() },
            RenderSpec { gamma: 0.0, ..RenderSpec::default() },
        ] {
            assert!(render(&uniform(), &spec).is_err());
        }
    }

    #[test]
    fn ramp_endpoints() {
        let r = heat_ramp();
        assert_eq!(r[0], [0, 0, 64]);
        assert_eq!(r[255], [255, 0, 0]);
        assert_eq!(r[170], [255, 255, 0]);
    }

    #[test]
    fn deterministic_with_overlays() {
        let f = compute_field(0.5, 0.7, 5, 64, &MeasureParams::default(), 2).unwrap();
        let spec = RenderSpec {
            overlays: vec![
                Overlay::HornLevels(2),
                Overlay::Curve(BinarySequence::from_rational(1, 3).unwrap()),
            ],
            ..RenderSpec::default()
        };
        let a = render(&f, &spec).unwrap();
        assert_eq!(a, render(&f, &spec).unwrap());
        assert_ne!(a, render(&f, &RenderSpec::default()).unwrap());
    }
}
