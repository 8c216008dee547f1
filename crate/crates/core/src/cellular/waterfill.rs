/// Maximizes `sum_n log2(1 + p_n a_n)` subject to `sum_n p_n = budget`,
/// `p_n >= 0`. Entries with `a_n <= 0` get no power.
pub fn water_fill(effective_gain: &[f64], budget: f64) -> Vec<f64> {
    weighted_water_fill(effective_gain, &vec![1.0; effective_gain.len()], budget)
}

/// Maximizes `sum_n w_n log2(1 + p_n a_n)` under the same constraints:
/// `p_n = max(0, w_n L - 1 / a_n)` with the level `L` spending the budget.
pub fn weighted_water_fill(effective_gain: &[f64], weight: &[f64], budget: f64) -> Vec<f64> {
    let mut order: Vec<usize> =
        (0..effective_gain.len()).filter(|&i| effective_gain[i] > 0.0 && weight[i] > 0.0).collect();
    let mut power = vec![0.0; effective_gain.len()];
    if order.is_empty() || budget <= 0.0 {
        return power;
    }
    // channels enter in order of the level at which they open
    let opens = |i: usize| 1.0 / (weight[i] * effective_gain[i]);
    order.sort_by(|&i, &j| opens(i).total_cmp(&opens(j)).then(i.cmp(&j)));
    let mut active = order.len();
    let mut sum_floor: f64 = order.iter().map(|&i| 1.0 / effective_gain[i]).sum();
    let mut sum_weight: f64 = order.iter().map(|&i| weight[i]).sum();
    let mut level = 0.0;
    while active > 0 {
        level = (budget + sum_floor) / sum_weight;
        if level > opens(order[active - 1]) {
            break;
        }
        active -= 1;
        sum_floor -= 1.0 / effective_gain[order[active]];
        sum_weight -= weight[order[active]];
    }
    for &i in &order[..active] {
        power[i] = weight[i] * level - 1.0 / effective_gain[i];
    }
    power
}
