use crate::error::{MrError, Result};

/// Sample median; even lengths return the midpoint of the two central values.
pub fn median(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(MrError::EmptyInput("median of an empty vector"));
    }
    let mut v = xs.to_vec();
    let mid = v.len() / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if xs.len() % 2 == 1 {
        return Ok(upper);
    }
    let lower = v[..mid]
        .iter()
        .copied()
        .max_by(f64::total_cmp)
        .expect("even length >= 2");
    Ok(0.5 * (lower + upper))
}

/// Weighted median with linear interpolation between order statistics.
///
/// Each sorted value sits at the centre of its weight mass,
/// `s_k = (Σ_{l≤k} w_l - w_k/2) / Σ w`, and the estimate is read off at
/// `s = 0.5` by interpolating between the neighbouring points.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(MrError::EmptyInput("weighted median of an empty vector"));
    }
    if values.len() != weights.len() {
        return Err(MrError::DimensionMismatch(
            "values and weights differ in length".into(),
        ));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(MrError::InvalidValue {
            row: 0,
            column: "weight".into(),
            reason: "weights must sum to a positive value".into(),
        });
    }

    let mut cum = 0.0;
    let positions: Vec<f64> = order
        .iter()
        .map(|&i| {
            cum += weights[i];
            (cum - 0.5 * weights[i]) / total
        })
        .collect();

    let Some(below) = positions.iter().rposition(|&s| s < 0.5) else {
        return Ok(values[order[0]]);
    };
    if below + 1 == order.len() {
        return Ok(values[order[below]]);
    }
    let (x0, x1) = (values[order[below]], values[order[below + 1]]);
    let (s0, s1) = (positions[below], positions[below + 1]);
    Ok(x0 + (x1 - x0) * (0.5 - s0) / (s1 - s0))
}
