//! Two-sample Mann-Whitney U test.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest `n * m` for which the p-value is computed by exact enumeration of
/// the null distribution.
pub const EXACT_LIMIT: usize = 10_000;

/// How equal pairs `x_i == y_j` enter the statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Ties count one half.
    #[default]
    Midrank,
    /// Ties count zero: the literal `bool(x_i < y_j)` indicator.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitneyResult {
    /// `U = #(x_i < y_j)`, plus one half per tie under [`TieRule::Midrank`].
    pub u: f64,
    /// Two-sided p-value. Always computed from the midrank statistic.
    pub p_value: f64,
    pub n: usize,
    pub m: usize,
    /// Whether `p_value` comes from the exact null distribution.
    pub exact: bool,
    pub tie_rule: TieRule,
}

impl MannWhitneyResult {
    /// The statistic with the roles of the samples swapped, `n·m − U`.
    /// Only meaningful under [`TieRule::Midrank`].
    pub fn u_swapped(&self) -> f64 {
        (self.n * self.m) as f64 - self.u
    }
}

pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<MannWhitneyResult> {
    mann_whitney_u_with(x, y, TieRule::Midrank)
}

pub fn mann_whitney_u_with(x: &[f64], y: &[f64], tie_rule: TieRule) -> Result<MannWhitneyResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("Mann-Whitney samples must be finite".into()));
    }
    let (n, m) = (x.len(), y.len());
    let (less, ties) = count_pairs(x, y);
    let u2 = 2 * less + ties;
    let u = match tie_rule {
        TieRule::Midrank => u2 as f64 / 2.0,
        TieRule::Strict => less as f64,
    };
    let exact = n * m <= EXACT_LIMIT;
    let p_value = if exact { exact_p(x, y, u2) } else { normal_p(x, y, u2) };
    Ok(MannWhitneyResult { u, p_value, n, m, exact, tie_rule })
}

/// `(#(x < y), #(x == y))` by a merge over the sorted samples.
fn count_pairs(x: &[f64], y: &[f64]) -> (usize, usize) {
    let mut ys = y.to_vec();
    ys.sort_by(f64::total_cmp);
    let mut less = 0;
    let mut ties = 0;
    for &v in x {
        let above = ys.partition_point(|&w| w <= v);
        let at_or_above = ys.partition_point(|&w| w < v);
        less += ys.len() - above;
        ties += above - at_or_above;
    }
    (less, ties)
}

/// Tie group sizes of the pooled sample, in ascending value order.
fn tie_groups(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

/// Exact two-sided p-value of the doubled statistic `u2`, conditional on the
/// observed tie pattern.
fn exact_p(x: &[f64], y: &[f64], u2: usize) -> f64 {
    let (n, m) = (x.len(), y.len());
    if n > m {
        // The tables are sized by the first sample; the test is symmetric.
        return exact_p(y, x, 2 * n * m - u2);
    }
    let groups = tie_groups(x, y);
    let dist = if groups.len() == n + m {
        untied_distribution(n, m)
    } else {
        tied_distribution(n, m, &groups)
    };
    two_sided(&dist, u2)
}

fn two_sided(dist: &[f64], u2: usize) -> f64 {
    let total: f64 = dist.iter().sum();
    let lower: f64 = dist[..=u2].iter().sum();
    let upper: f64 = dist[u2..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Counts of the doubled statistic without ties: the coefficients of the
/// Gaussian binomial `[n+m choose n]_q`, spread onto even indices.
fn untied_distribution(n: usize, m: usize) -> Vec<f64> {
    let (s, l) = if n <= m { (n, m) } else { (m, n) };
    let top = s * l;
    let mut c = vec![0.0f64; top + 1];
    c[0] = 1.0;
    // [l+i choose i]_q = [l+i-1 choose i-1]_q (1 - q^(l+i)) / (1 - q^i)
    for i in 1..=s {
        for k in i..=top {
            c[k] += c[k - i];
        }
        for k in (l + i..=top).rev() {
            c[k] -= c[k - l - i];
        }
    }
    let mut out = vec![0.0; 2 * top + 1];
    for (k, v) in c.into_iter().enumerate() {
        out[2 * k] = v.max(0.0);
    }
    out
}

/// Counts of the doubled statistic under a tie pattern, by dynamic
/// programming over tie groups on the midrank sum of the first sample.
fn tied_distribution(n: usize, m: usize, groups: &[usize]) -> Vec<f64> {
    let total = n + m;
    let max_r2 = 2 * total * n;
    // ways[k][r2]: choices of k first-sample members with doubled rank sum r2
    let mut ways = vec![vec![0.0f64; max_r2 + 1]; n + 1];
    ways[0][0] = 1.0;
    let mut below = 0;
    for &c in groups {
        let rank2 = 2 * below + c + 1;
        let binom = binomials(c);
        let upto = (below).min(n);
        for k in (0..=upto).rev() {
            let (lo, hi) = rank_sum_range(k, below);
            for r2 in lo..=hi {
                let w = ways[k][r2];
                if w == 0.0 {
                    continue;
                }
                for j in 1..=c.min(n - k) {
                    ways[k + j][r2 + j * rank2] += w * binom[j];
                }
            }
        }
        below += c;
    }
    // U2 = 2nm + n(n+1) - R2 for U = #(x < y) + ties / 2
    let base = 2 * n * m + n * (n + 1);
    let mut out = vec![0.0; 2 * n * m + 1];
    for (r2, &w) in ways[n].iter().enumerate() {
        if w != 0.0 {
            out[base - r2] += w;
        }
    }
    out
}

/// Bounds of the doubled rank sum of `k` members drawn from the first `below`
/// pooled positions.
fn rank_sum_range(k: usize, below: usize) -> (usize, usize) {
    if k == 0 {
        return (0, 0);
    }
    (k * (k + 1), k * (2 * below - k + 1))
}

fn binomials(c: usize) -> Vec<f64> {
    let mut b = vec![1.0; c + 1];
    for j in 1..=c {
        b[j] = b[j - 1] * (c - j + 1) as f64 / j as f64;
    }
    b
}

/// Normal approximation with continuity and tie correction.
fn normal_p(x: &[f64], y: &[f64], u2: usize) -> f64 {
    let (n, m) = (x.len() as f64, y.len() as f64);
    let total = n + m;
    let tie_term: f64 = tie_groups(x, y).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n * m / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let dev = ((u2 as f64 / 2.0) - n * m / 2.0).abs() - 0.5;
    let z = dev.max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_examples() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.u, 4.0);
        let s = mann_whitney_u(&[3.0, 4.0], &[1.0, 2.0]).unwrap();
        assert_eq!(s.u, 0.0);
        assert_eq!(r.u + s.u, 4.0);
        assert!((r.p_value - s.p_value).abs() < 1e-15);
        // 1 of C(4,2)=6 arrangements is this extreme on each side
        assert!((r.p_value - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ties_count_half_unless_strict() {
        let x = [1.0, 2.0];
        let y = [2.0, 3.0];
        assert_eq!(mann_whitney_u(&x, &y).unwrap().u, 3.5);
        let strict = mann_whitney_u_with(&x, &y, TieRule::Strict).unwrap();
        assert_eq!(strict.u, 3.0);
        assert_eq!(strict.p_value, mann_whitney_u(&x, &y).unwrap().p_value);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(mann_whitney_u(&[], &[1.0]).unwrap_err(), Error::EmptySample);
        assert_eq!(mann_whitney_u(&[1.0], &[]).unwrap_err(), Error::EmptySample);
    }

    #[test]
    fn all_tied_gives_p_one() {
        let r = mann_whitney_u(&[2.0; 3], &[2.0; 4]).unwrap();
        assert_eq!(r.u, 6.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn untied_distribution_matches_tie_dp() {
        for (n, m) in [(1, 1), (2, 5), (7, 3), (12, 12), (30, 40)] {
            let groups = vec![1; n + m];
            let a = untied_distribution(n, m);
            let b = tied_distribution(n, m, &groups);
            let ta: f64 = a.iter().sum();
            let tb: f64 = b.iter().sum();
            for (u, (p, q)) in a.iter().zip(&b).enumerate() {
                assert!((p / ta - q / tb).abs() < 1e-12, "n={n} m={m} u2={u}");
            }
        }
    }

    #[test]
    fn singleton_against_large_sample() {
        let y: Vec<f64> = (0..40).map(|i| i as f64).collect();
        // above every value: U = 0, the single most extreme of 41 positions
        let r = mann_whitney_u(&[100.0], &y).unwrap();
        assert_eq!(r.u, 0.0);
        assert!((r.p_value - 2.0 / 41.0).abs() < 1e-12);
        let mid = mann_whitney_u(&[19.5], &y).unwrap();
        assert_eq!(mid.p_value, 1.0);
    }

    #[test]
    fn approximation_near_the_switchover() {
        let x: Vec<f64> = (0..100).map(|i| (i * 7 % 101) as f64 + 0.25).collect();
        let y: Vec<f64> = (0..100).map(|i| (i * 13 % 97) as f64 + 3.5).collect();
        let (less, ties) = count_pairs(&x, &y);
        let u2 = 2 * less + ties;
        let exact = exact_p(&x, &y, u2);
        let approx = normal_p(&x, &y, u2);
        assert!((exact - approx).abs() < 0.01, "{exact} vs {approx}");
    }
}
