//! Small statistics helpers used across modules and tests.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the n-1 denominator.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Sample covariance with the n-1 denominator.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1) as f64
}

/// Pearson correlation; 0 when either argument is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let sx = sample_variance(xs).sqrt();
    let sy = sample_variance(ys).sqrt();
    if sx == 0.0 || sy == 0.0 {
        return 0.0;
    }
    sample_covariance(xs, ys) / (sx * sy)
}

/// Mid-ranks (1-based, ties averaged).
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 averaged
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson of mid-ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&midranks(xs), &midranks(ys))
}

/// Linear-interpolation quantile of unsorted data, `q` in [0, 1]
/// (R type 7, the convention used for the box-plot summaries).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty());
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let i = pos.floor() as usize;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    let frac = pos - i as f64;
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d = 0.0f64;
    while ia < sa.len() && ib < sb.len() {
        let v = sa[ia].min(sb[ib]);
        while ia < sa.len() && sa[ia] == v {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] == v {
            ib += 1;
        }
        d = d.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    d
}

/// Binomial coefficient, saturating; fine for the audit-sized inputs used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}
