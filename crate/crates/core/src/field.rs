//! The discretized two-dimensional density `Phi(t, y)`: one histogram of
//! `nu_t` per parameter on a uniform `t`-grid.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::AddressCurve;
use crate::error::{domain, Error, Result};
use crate::measure::{
    chaos_measure, inverse_measure, transfer_measure, Histogram, MeasureMethod, DEFAULT_BURN_IN,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

/// Magic bytes opening the raw field format.
pub const RAW_MAGIC: &[u8; 5] = b"BATL1";
/// Size of the fixed part of the raw header: magic, column count, bin count.
pub const RAW_HEADER_LEN: usize = 5 + 8 + 8;

/// Parameters of the per-column measure computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureParams {
    pub method: MeasureMethod,
    pub tol: f64,
    pub max_iter: usize,
    pub samples: u64,
    /// Seed of column 0; column `i` uses `seed + i`.
    pub seed: u64,
    pub burn_in: usize,
    pub depth: u32,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            method: MeasureMethod::TransferOperator,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            samples: 1_000_000,
            seed: 0,
            burn_in: DEFAULT_BURN_IN,
            depth: 20,
        }
    }
}

impl MeasureParams {
    /// The histogram of column `index` at parameter `t`.
    pub fn histogram(&self, t: f64, bins: usize, index: usize) -> Result<Histogram> {
        match self.method {
            MeasureMethod::TransferOperator => transfer_measure(t, bins, self.tol, self.max_iter),
            MeasureMethod::ChaosGame => chaos_measure(
                t,
                bins,
                self.samples,
                self.seed.wrapping_add(index as u64),
                self.burn_in,
            ),
            MeasureMethod::InverseIteration => inverse_measure(t, bins, self.depth),
        }
    }
}

/// How a field was produced and is meant to be displayed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub params: MeasureParams,
    /// Always `"probability"`: each column sums to 1.
    pub column_normalization: &'static str,
    /// Always `"global"`: one color scale for the whole image.
    pub color_scaling: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    t_grid: Vec<f64>,
    y_bins: usize,
    /// Column-major: column `i` occupies `i * y_bins .. (i + 1) * y_bins`.
    matrix: Vec<f64>,
    /// `None` for fields read back from raw files.
    provenance: Option<Provenance>,
}

/// `cols` equally spaced parameters from `t_lo` to `t_hi` inclusive.
pub fn t_grid(t_lo: f64, t_hi: f64, cols: usize) -> Vec<f64> {
    let step = (t_hi - t_lo) / (cols - 1) as f64;
    (0..cols)
        .map(|i| if i + 1 == cols { t_hi } else { t_lo + step * i as f64 })
        .collect()
}

/// Computes every column on a pool of `workers` threads. Columns are
/// independent, so the result does not depend on `workers`.
pub fn compute_field(
    t_lo: f64,
    t_hi: f64,
    cols: usize,
    y_bins: usize,
    params: &MeasureParams,
    workers: usize,
) -> Result<DensityField> {
    if !(0.5 <= t_lo && t_lo < t_hi && t_hi < 1.0) {
        return domain(format!("need 1/2 <= t_lo < t_hi < 1, got [{t_lo}, {t_hi}]"));
    }
    if cols < 2 {
        return domain("need at least 2 columns");
    }
    if y_bins < 2 {
        return domain("need at least 2 bins per column");
    }
    if workers == 0 {
        return domain("need at least one worker");
    }
    let grid = t_grid(t_lo, t_hi, cols);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    let mut matrix = vec![0.0; cols * y_bins];
    let outcomes: Vec<Result<()>> = pool.install(|| {
        matrix
            .par_chunks_mut(y_bins)
            .zip(grid.par_iter())
            .enumerate()
            .map(|(i, (slot, &t))| {
                let h = params.histogram(t, y_bins, i)?;
                slot.copy_from_slice(&h.weights);
                Ok(())
            })
            .collect()
    });
    if let Some(failed) = outcomes.iter().position(|r| r.is_err()) {
        let completed = outcomes
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_ok())
            .map(|(i, _)| i)
            .collect();
        let source = outcomes.into_iter().nth(failed).unwrap().unwrap_err();
        return Err(Error::Column {
            column: failed,
            t: grid[failed],
            source: Box::new(source),
            completed,
        });
    }
    Ok(DensityField {
        t_grid: grid,
        y_bins,
        matrix,
        provenance: Some(Provenance {
            params: params.clone(),
            column_normalization: "probability",
            color_scaling: "global",
        }),
    })
}

impl DensityField {
    /// Assembles a field from precomputed columns of equal length.
    pub fn from_columns(t_grid: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if t_grid.len() != columns.len() || columns.is_empty() {
            return domain("need one non-empty column per parameter");
        }
        if t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return domain("parameters must be strictly increasing");
        }
        let y_bins = columns[0].len();
        if y_bins == 0 || columns.iter().any(|c| c.len() != y_bins) {
            return domain("columns must have the same positive length");
        }
        Ok(DensityField {
            t_grid,
            y_bins,
            matrix: columns.concat(),
            provenance: None,
        })
    }

    pub fn cols(&self) -> usize {
        self.t_grid.len()
    }

    pub fn y_bins(&self) -> usize {
        self.y_bins
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.y_bins..(i + 1) * self.y_bins]
    }

    pub fn column_histogram(&self, i: usize) -> Histogram {
        Histogram {
            t: self.t_grid[i],
            method: self
                .provenance
                .as_ref()
                .map_or(MeasureMethod::TransferOperator, |p| p.params.method),
            weights: self.column(i).to_vec(),
        }
    }

    pub fn write_column_csv<W: Write>(&self, i: usize, out: W) -> std::io::Result<()> {
        self.column_histogram(i).write_csv(out)
    }

    /// Exact size in bytes of [`DensityField::export_raw`] for a field of
    /// the given shape.
    pub fn raw_len(cols: usize, y_bins: usize) -> usize {
        RAW_HEADER_LEN + 8 * cols + 8 * cols * y_bins
    }

    /// `BATL1`, then little-endian `u64` column and bin counts, the `t`-grid
    /// as `f64`, and the column-major matrix as `f64`.
    pub fn export_raw(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::raw_len(self.cols(), self.y_bins));
        out.extend_from_slice(RAW_MAGIC);
        out.extend_from_slice(&(self.cols() as u64).to_le_bytes());
        out.extend_from_slice(&(self.y_bins as u64).to_le_bytes());
        for v in self.t_grid.iter().chain(&self.matrix) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn import_raw(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < RAW_HEADER_LEN {
            return Err(Error::Parse("raw field shorter than its header".into()));
        }
        if &bytes[..5] != RAW_MAGIC {
            return Err(Error::Parse(format!(
                "bad raw field magic {:?}",
                String::from_utf8_lossy(&bytes[..5])
            )));
        }
        let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let (cols, y_bins) = (word(5), word(13));
        let expected = usize::try_from(cols)
            .ok()
            .zip(usize::try_from(y_bins).ok())
            .and_then(|(c, y)| c.checked_mul(y)?.checked_add(c)?.checked_mul(8))
            .and_then(|n| n.checked_add(RAW_HEADER_LEN));
        if expected != Some(bytes.len()) || cols == 0 || y_bins == 0 {
            return Err(Error::Parse(format!(
                "raw field of {} bytes does not match header {cols} x {y_bins}",
                bytes.len()
            )));
        }
        let floats: Vec<f64> = bytes[RAW_HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let (t, m) = floats.split_at(cols as usize);
        Ok(DensityField {
            t_grid: t.to_vec(),
            y_bins: y_bins as usize,
            matrix: m.to_vec(),
            provenance: None,
        })
    }
}

/// Outcome of [`curve_darkness`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveDarkness {
    pub columns_checked: usize,
    pub columns_below_median: usize,
}

impl CurveDarkness {
    pub fn fraction(&self) -> f64 {
        if self.columns_checked == 0 {
            0.0
        } else {
            self.columns_below_median as f64 / self.columns_checked as f64
        }
    }
}

/// For each column with `t < t_max`, compares the mean weight of the three
/// bins centred on `y_b(t)` with the column's median weight.
pub fn curve_darkness(field: &DensityField, curve: &AddressCurve, t_max: f64) -> CurveDarkness {
    let n = field.y_bins;
    let mut out = CurveDarkness {
        columns_checked: 0,
        columns_below_median: 0,
    };
    for (i, &t) in field.t_grid.iter().enumerate() {
        if t >= t_max {
            continue;
        }
        let Ok(y) = curve.eval(t) else { continue };
        let col = field.column(i);
        let centre = ((y * n as f64) as usize).min(n - 1);
        let lo = centre.saturating_sub(1);
        let hi = (centre + 1).min(n - 1);
        let window = col[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
        out.columns_checked += 1;
        if window < median(col) {
            out.columns_below_median += 1;
        }
    }
    out
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(workers: usize) -> DensityField {
        compute_field(0.5, 0.7, 6, 300, &MeasureParams::default(), workers).unwrap()
    }

    #[test]
    fn grid_is_inclusive() {
        let g = t_grid(0.5, 0.76, 27);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[26], 0.76);
        assert!((g[1] - 0.51).abs() < 1e-15);
    }

    #[test]
    fn first_column_uniform_and_columns_normalized() {
        let f = small(2);
        assert!(f.column(0).iter().all(|&w| (w - 1.0 / 300.0).abs() < 1e-12));
        for i in 0..f.cols() {
            assert!((f.column(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        assert_eq!(small(1).export_raw(), small(4).export_raw());
    }

    #[test]
    fn raw_round_trip_and_rejections() {
        let f = small(1);
        let raw = f.export_raw();
        assert_eq!(raw.len(), DensityField::raw_len(6, 300));
        let back = DensityField::import_raw(&raw).unwrap();
        assert_eq!(back.matrix(), f.matrix());
        assert_eq!(back.t_grid(), f.t_grid());
        let mut bad = raw.clone();
        bad[4] = b'2';
        assert!(matches!(DensityField::import_raw(&bad), Err(Error::Parse(_))));
        assert!(DensityField::import_raw(&raw[..raw.len() - 1]).is_err());
        assert_eq!(DensityField::raw_len(1000, 20000), 160_008_021);
    }

    #[test]
    fn invalid_ranges() {
        let p = MeasureParams::default();
        assert!(compute_field(0.4, 0.7, 4, 10, &p, 1).is_err());
        assert!(compute_field(0.6, 0.6, 4, 10, &p, 1).is_err());
        assert!(compute_field(0.6, 1.0, 4, 10, &p, 1).is_err());
        assert!(compute_field(0.6, 0.7, 1, 10, &p, 1).is_err());
    }

    #[test]
    fn failing_column_is_reported() {
        let p = MeasureParams {
            max_iter: 2,
            ..MeasureParams::default()
        };
        match compute_field(0.55, 0.7, 3, 50, &p, 2) {
            Err(Error::Column { column, completed, .. }) => {
                assert_eq!(column, 0);
                assert!(completed.is_empty());
            }
            other => panic!("expected column error, got {other:?}"),
        }
    }

    #[test]
    fn chaos_columns_use_distinct_seeds() {
        let p = MeasureParams {
            method: MeasureMethod::ChaosGame,
            samples: 10_000,
            ..MeasureParams::default()
        };
        let f = compute_field(0.6, 0.6000001, 2, 50, &p, 1).unwrap();
        assert_ne!(f.column(0), f.column(1));
        let again = p.histogram(f.t_grid()[1], 50, 1).unwrap();
        assert_eq!(again.weights, f.column(1));
    }
}
