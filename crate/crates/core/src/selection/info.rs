//! Discretization and information-theoretic scores (entropies in bits).

use crate::error::{Error, Result};

/// Equal-frequency binning by rank.
///
/// A value's bin is `floor(rank * num_bins / n)`, where `rank` is the
/// position of the first occurrence of that value in sorted order, so tied
/// values always share the lowest bin they touch.
pub fn discretize(column: &[f64], num_bins: usize) -> Vec<usize> {
    let n = column.len();
    let bins = num_bins.max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    let mut out = vec![0; n];
    let mut run_rank = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && column[i] != column[order[pos - 1]] {
            run_rank = pos;
        }
        out[i] = run_rank * bins / n;
    }
    out
}

fn entropy_of_counts(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    // Summing in sorted order makes equal histograms give bit-identical
    // entropies, so exact ties stay ties.
    let mut counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    counts.sort_unstable();
    let total = total as f64;
    counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

fn histogram(codes: &[usize]) -> Vec<usize> {
    let size = codes.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0; size];
    for &c in codes {
        counts[c] += 1;
    }
    counts
}

pub fn entropy(codes: &[usize]) -> f64 {
    entropy_of_counts(histogram(codes), codes.len())
}

fn joint_entropy(x: &[usize], y: &[usize]) -> f64 {
    let width = y.iter().max().map_or(0, |&m| m + 1);
    let height = x.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0; width * height];
    for (&a, &b) in x.iter().zip(y) {
        counts[a * width + b] += 1;
    }
    entropy_of_counts(counts, x.len())
}

fn check_lengths(x: &[usize], y: &[usize]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::invalid("information scores need at least one sample"));
    }
    Ok(())
}

/// I(x;y) in bits, clamped at zero.
pub fn mutual_information(x: &[usize], y: &[usize]) -> Result<f64> {
    check_lengths(x, y)?;
    Ok((entropy(x) + entropy(y) - joint_entropy(x, y)).max(0.0))
}

/// 2·I(x;y) / (H(x) + H(y)), or 0 when both variables are constant.
pub fn symmetrical_uncertainty(x: &[usize], y: &[usize]) -> Result<f64> {
    check_lengths(x, y)?;
    let hx = entropy(x);
    let hy = entropy(y);
    let denom = hx + hy;
    if denom <= 0.0 {
        return Ok(0.0);
    }
    let mi = (hx + hy - joint_entropy(x, y)).max(0.0);
    Ok((2.0 * mi / denom).clamp(0.0, 1.0))
}
