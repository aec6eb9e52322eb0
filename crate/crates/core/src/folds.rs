//! Fold-shape generators for k-fold schemes.
//!
//! Fold shapes are per-class count vectors; a binary fold is `[p, n]`.

use crate::error::{Error, Result};

/// Deterministic even split: for each class independently, the first
/// `count mod k` folds receive `ceil(count / k)` samples and the rest
/// `floor(count / k)`. Folds are paired by index across classes.
pub fn stratified_split(class_counts: &[u64], k: u64) -> Result<Vec<Vec<u64>>> {
    let total: u64 = class_counts.iter().sum();
    if k == 0 || k > total {
        return Err(Error::InvalidFoldCount { k, total });
    }
    let folds: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            class_counts
                .iter()
                .map(|&c| c / k + u64::from(j < c % k))
                .collect()
        })
        .collect();
    if folds.iter().any(|f| f.iter().all(|&c| c == 0)) {
        return Err(Error::InvalidFoldCount { k, total });
    }
    Ok(folds)
}

/// All multisets of `k` nonempty folds whose per-class counts sum to
/// `class_counts`. Each configuration lists its folds in nonincreasing
/// lexicographic order; configurations are themselves sorted in
/// nonincreasing lexicographic order.
pub fn fold_configurations(class_counts: &[u64], k: u64, cap: u64) -> Result<Vec<Vec<Vec<u64>>>> {
    let total: u64 = class_counts.iter().sum();
    if k == 0 || k > total {
        return Err(Error::InvalidFoldCount { k, total });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k as usize);
    let mut count = 0u64;
    extend(class_counts, k as usize, None, &mut current, &mut out, &mut count, cap)?;
    Ok(out)
}

fn extend(
    remaining: &[u64],
    folds_left: usize,
    upper: Option<&[u64]>,
    current: &mut Vec<Vec<u64>>,
    out: &mut Vec<Vec<Vec<u64>>>,
    count: &mut u64,
    cap: u64,
) -> Result<()> {
    if folds_left == 1 {
        let last = remaining.to_vec();
        let nonempty = last.iter().any(|&c| c > 0);
        let ordered = upper.map_or(true, |u| last.as_slice() <= u);
        if nonempty && ordered {
            *count += 1;
            if *count > cap {
                return Err(Error::TooManyConfigurations { count: *count, cap });
            }
            current.push(last);
            out.push(current.clone());
            current.pop();
        }
        return Ok(());
    }
    // candidate folds in descending lexicographic order, bounded by `upper`
    let mut candidates = Vec::new();
    vectors_desc(remaining, 0, &mut Vec::new(), upper, &mut candidates);
    for fold in candidates {
        if fold.iter().all(|&c| c == 0) {
            continue;
        }
        let rest: Vec<u64> = remaining.iter().zip(&fold).map(|(r, f)| r - f).collect();
        // the remaining folds are each <= fold and nonempty; skip when impossible
        let rest_total: u64 = rest.iter().sum();
        if rest_total < (folds_left - 1) as u64 {
            continue;
        }
        current.push(fold.clone());
        extend(&rest, folds_left - 1, Some(&fold), current, out, count, cap)?;
        current.pop();
    }
    Ok(())
}

/// Vectors `v <= remaining` componentwise, `v <= upper` lexicographically,
/// emitted in descending lexicographic order.
fn vectors_desc(
    remaining: &[u64],
    idx: usize,
    prefix: &mut Vec<u64>,
    upper: Option<&[u64]>,
    out: &mut Vec<Vec<u64>>,
) {
    if idx == remaining.len() {
        out.push(prefix.clone());
        return;
    }
    // while the prefix equals upper's prefix, this coordinate is capped by upper
    let tight = upper.is_some_and(|u| prefix.as_slice() == &u[..idx]);
    let max = if tight {
        remaining[idx].min(upper.unwrap()[idx])
    } else {
        remaining[idx]
    };
    for v in (0..=max).rev() {
        prefix.push(v);
        vectors_desc(remaining, idx + 1, prefix, upper, out);
        prefix.pop();
    }
}
