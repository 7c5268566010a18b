//! Dependence removal: transforms a feature X so that it carries no
//! information about a protected feature Z, while preserving as much of X's
//! own structure as possible.
//!
//! Two backends:
//! * optimal transport — maps each value through the conditional CDF of X
//!   within its Z-rank bin and back through the inverse *marginal* CDF of
//!   X, so the output is independent of Z's bin yet keeps X's quantiles;
//! * linear regression — replaces X with OLS residuals X − β₀ − β₁Z, but
//!   only when the slope is statistically significant (two-sided t-test),
//!   leaving X untouched otherwise.

use rand::Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::seed::SeedStream;
use crate::stats::{midranks, sample_variance};

/// Which removal algorithm to apply, plus its knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalBackend {
    pub kind: RemovalKind,
    /// Target rows per Z-bin for optimal transport.
    pub ot_bin_target: usize,
    /// Slope-significance level below which regression residuals replace X.
    pub lr_alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalKind {
    LinearRegression,
    OptimalTransport,
}

impl RemovalBackend {
    pub fn new(kind: RemovalKind, ot_bin_target: usize, lr_alpha: f64) -> Result<Self> {
        if ot_bin_target < 2 {
            return Err(Error::InvalidInput(format!(
                "ot_bin_target must be at least 2, got {ot_bin_target}"
            )));
        }
        if !(lr_alpha > 0.0 && lr_alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "lr_alpha must lie strictly between 0 and 1, got {lr_alpha}"
            )));
        }
        Ok(Self {
            kind,
            ot_bin_target,
            lr_alpha,
        })
    }

    pub fn linear_regression() -> Self {
        Self::new(RemovalKind::LinearRegression, 100, 0.01).unwrap()
    }

    pub fn optimal_transport() -> Self {
        Self::new(RemovalKind::OptimalTransport, 100, 0.01).unwrap()
    }
}

/// The fitted optimal-transport map for one (X, Z) pair.
#[derive(Debug, Clone)]
pub struct TransportMap {
    /// Inner thresholds between consecutive Z bins (length = bins − 1).
    pub z_bin_edges: Vec<f64>,
    /// Sorted X values of each bin: the empirical conditional CDF support.
    pub per_bin_cdf: Vec<Vec<f64>>,
    /// Sorted full X sample: the marginal quantile function's knots.
    pub marginal_quantile: Vec<f64>,
}

/// Inverse empirical CDF at probability `u` by linear interpolation between
/// order statistics at plotting positions (k − 0.5)/n, clamped to the
/// observed range.
fn marginal_inverse(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    let t = u * n as f64 - 0.5;
    if t <= 0.0 {
        return sorted[0];
    }
    if t >= (n - 1) as f64 {
        return sorted[n - 1];
    }
    let k = t.floor() as usize;
    let frac = t - k as f64;
    sorted[k] + frac * (sorted[k + 1] - sorted[k])
}

/// Removes Z's influence from X by pairwise optimal transport and returns
/// both the transformed vector and the fitted map.
///
/// Rows are ranked by Z (ties broken by the seed stream) and cut into
/// contiguous bins of about `ot_bin_target` rows (a single bin when Z is
/// constant or n is too small for two full bins). Within a bin, each X
/// value's smoothed conditional CDF position u = (midrank − 0.5)/bin_size
/// is mapped back through the inverse marginal CDF of the full X sample.
pub fn ot_fit(
    x: &[f64],
    z: &[f64],
    cfg: &RemovalBackend,
    tiebreak: &SeedStream,
) -> Result<(Vec<f64>, TransportMap)> {
    let n = x.len();
    if z.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: z.len(),
        });
    }
    if n < 4 {
        return Err(Error::TooFewPoints { got: n, min: 4 });
    }

    let z_constant = sample_variance(z) == 0.0;
    let n_bins = if z_constant || n < 2 * cfg.ot_bin_target {
        1
    } else {
        n / cfg.ot_bin_target
    };

    // Z-rank order with seeded random tie-breaking, so tied Z values do not
    // systematically pile into one bin.
    let mut rng = tiebreak.rng();
    let keys: Vec<u64> = (0..n).map(|_| rng.random()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(keys[a].cmp(&keys[b])));

    // Bin sizes: n/n_bins each, remainder spread over the leading bins.
    let base = n / n_bins;
    let extra = n % n_bins;
    let mut marginal = x.to_vec();
    marginal.sort_by(f64::total_cmp);

    let mut out = vec![0.0; n];
    let mut per_bin_cdf = Vec::with_capacity(n_bins);
    let mut z_bin_edges = Vec::with_capacity(n_bins.saturating_sub(1));
    let mut start = 0;
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        let members = &order[start..start + size];
        if b > 0 {
            let prev_last = z[order[start - 1]];
            let first = z[members[0]];
            z_bin_edges.push(prev_last + (first - prev_last) / 2.0);
        }
        let bin_x: Vec<f64> = members.iter().map(|&i| x[i]).collect();
        let ranks = midranks(&bin_x);
        for (pos, &i) in members.iter().enumerate() {
            let u = (ranks[pos] - 0.5) / size as f64;
            out[i] = marginal_inverse(&marginal, u);
        }
        let mut sorted_bin = bin_x;
        sorted_bin.sort_by(f64::total_cmp);
        per_bin_cdf.push(sorted_bin);
        start += size;
    }

    Ok((
        out,
        TransportMap {
            z_bin_edges,
            per_bin_cdf,
            marginal_quantile: marginal,
        },
    ))
}

/// [`ot_fit`] without the fitted map.
pub fn ot_remove(
    x: &[f64],
    z: &[f64],
    cfg: &RemovalBackend,
    tiebreak: &SeedStream,
) -> Result<Vec<f64>> {
    ot_fit(x, z, cfg, tiebreak).map(|(out, _)| out)
}

/// The fitted (or skipped) simple linear regression of X on Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualModel {
    pub intercept: f64,
    pub slope: f64,
    pub slope_p_value: f64,
    /// True when residuals replaced X; false means the output is X itself.
    pub applied: bool,
}

/// Regresses X on Z (with intercept) and returns the residuals when the
/// slope is significant at `cfg.lr_alpha` (two-sided t-test, n−2 degrees of
/// freedom); otherwise returns X unchanged. A constant Z is never
/// significant (p-value reported as 1).
pub fn lr_remove(x: &[f64], z: &[f64], cfg: &RemovalBackend) -> Result<(Vec<f64>, ResidualModel)> {
    let n = x.len();
    if z.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: z.len(),
        });
    }
    if n < 3 {
        return Err(Error::TooFewPoints { got: n, min: 3 });
    }

    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_z = z.iter().sum::<f64>() / nf;
    let szz: f64 = z.iter().map(|&v| (v - mean_z) * (v - mean_z)).sum();
    if szz == 0.0 {
        let model = ResidualModel {
            intercept: 0.0,
            slope: 0.0,
            slope_p_value: 1.0,
            applied: false,
        };
        return Ok((x.to_vec(), model));
    }
    let sxz: f64 = x
        .iter()
        .zip(z)
        .map(|(&xv, &zv)| (xv - mean_x) * (zv - mean_z))
        .sum();
    let slope = sxz / szz;
    let intercept = mean_x - slope * mean_z;
    let residuals: Vec<f64> = x
        .iter()
        .zip(z)
        .map(|(&xv, &zv)| xv - intercept - slope * zv)
        .collect();

    let df = nf - 2.0;
    let sse: f64 = residuals.iter().map(|&e| e * e).sum();
    let se = (sse / df / szz).sqrt();
    let p_value = if se == 0.0 {
        // Perfect fit: the slope is exact. A zero slope on a perfect fit
        // means X never depended on Z at all.
        if slope == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        let t = slope / se;
        let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
        2.0 * (1.0 - dist.cdf(t.abs()))
    };

    if p_value < cfg.lr_alpha {
        let model = ResidualModel {
            intercept,
            slope,
            slope_p_value: p_value,
            applied: true,
        };
        Ok((residuals, model))
    } else {
        let model = ResidualModel {
            intercept,
            slope,
            slope_p_value: p_value,
            applied: false,
        };
        Ok((x.to_vec(), model))
    }
}

/// Per-column seed derivation: a column's tie-break randomness depends on
/// the (X, Z) content, not on column position, so reordering features
/// reorders outputs without changing them.
fn pair_stream(base: &SeedStream, x: &[f64], z: &[f64]) -> SeedStream {
    let mut h = Sha256::new();
    for v in x {
        h.update(v.to_le_bytes());
    }
    h.update([0xff]);
    for v in z {
        h.update(v.to_le_bytes());
    }
    let digest: [u8; 32] = h.finalize().into();
    base.child_bytes(&digest)
}

/// Builds S*: every column of `matrix` except the protected one,
/// transformed by the chosen backend to remove dependence on the protected
/// column. Output columns keep their original relative order. The response
/// plays no part here — removal is unsupervised.
pub fn build_s_star(
    matrix: &Matrix,
    protected: usize,
    backend: &RemovalBackend,
    stream: &SeedStream,
) -> Result<Matrix> {
    let p = matrix.n_cols();
    if protected >= p {
        return Err(Error::IndexOutOfRange { index: protected, p });
    }
    if p < 2 {
        return Err(Error::EmptyFeatureSet);
    }
    let z = matrix.col(protected);
    let others: Vec<usize> = (0..p).filter(|&j| j != protected).collect();
    let cols: Vec<Result<Vec<f64>>> = others
        .par_iter()
        .map(|&j| {
            let x = matrix.col(j);
            match backend.kind {
                RemovalKind::LinearRegression => lr_remove(x, z, backend).map(|(v, _)| v),
                RemovalKind::OptimalTransport => {
                    ot_remove(x, z, backend, &pair_stream(stream, x, z))
                }
            }
        })
        .collect();
    Matrix::from_columns(cols.into_iter().collect::<Result<Vec<_>>>()?)
}
