//! Maximal-information-coefficient approximation on equal-frequency grids.
//!
//! For every grid shape (a, b) with a·b within the budget, both vectors
//! are cut into equal-frequency rank bins and the normalized mutual
//! information of the induced contingency table is computed; the maximum
//! over shapes is returned. Rank-based binning makes the value invariant
//! under strictly monotone transforms of either argument.

use crate::error::{Error, Result};

/// Order of each element by value, ties resolved by original position, so
/// the assignment is deterministic and preserved by strictly monotone maps.
fn rank_positions(xs: &[f64]) -> Vec<usize> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let mut pos = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        pos[i] = rank;
    }
    pos
}

/// Equal-frequency bin index of each element for `bins` bins.
fn bin_assignment(positions: &[usize], bins: usize) -> Vec<usize> {
    let n = positions.len();
    positions.iter().map(|&r| r * bins / n).collect()
}

fn table_nmi(xb: &[usize], yb: &[usize], a: usize, b: usize) -> f64 {
    let n = xb.len() as f64;
    let mut counts = vec![0.0f64; a * b];
    for (&i, &j) in xb.iter().zip(yb) {
        counts[i * b + j] += 1.0;
    }
    let mut row = vec![0.0; a];
    let mut col = vec![0.0; b];
    for i in 0..a {
        for j in 0..b {
            row[i] += counts[i * b + j];
            col[j] += counts[i * b + j];
        }
    }
    let mut mi = 0.0;
    for i in 0..a {
        for j in 0..b {
            let c = counts[i * b + j];
            if c > 0.0 {
                mi += c / n * (c * n / (row[i] * col[j])).log2();
            }
        }
    }
    mi / (a.min(b) as f64).log2()
}

/// MIC-style dependence in [0, 1] between two numeric vectors. The grid
/// budget defaults to ⌊n^0.6⌋.
pub fn mic_approx(x: &[f64], y: &[f64], grid_budget: Option<usize>) -> Result<f64> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if n < 20 {
        return Err(Error::TooFewPoints { got: n, min: 20 });
    }
    let budget = grid_budget.unwrap_or_else(|| (n as f64).powf(0.6).floor() as usize);
    if budget < 4 {
        return Err(Error::InvalidInput(format!(
            "grid budget {budget} cannot fit even a 2×2 grid"
        )));
    }
    let x_pos = rank_positions(x);
    let y_pos = rank_positions(y);
    let mut best = 0.0f64;
    for a in 2..=budget / 2 {
        let max_b = budget / a;
        if max_b < 2 {
            break;
        }
        let xb = bin_assignment(&x_pos, a);
        for b in 2..=max_b {
            let yb = bin_assignment(&y_pos, b);
            best = best.max(table_nmi(&xb, &yb, a, b));
        }
    }
    Ok(best.clamp(0.0, 1.0))
}
