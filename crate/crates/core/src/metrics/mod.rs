//! Fairness, empirical distributions and per-trial aggregation.

use crate::error::{Error, Result};
use crate::model::SliceSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub per_sp_throughput: Vec<f64>,
    pub jain_index: f64,
}

/// `(sum T)^2 / (K sum T^2)` over all `K` entries.
pub fn jain_index(throughput: &[f64]) -> Result<f64> {
    if throughput.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::config("throughputs must be finite and non-negative"));
    }
    let sum: f64 = throughput.iter().sum();
    if sum <= 0.0 {
        return Err(Error::UndefinedFairness);
    }
    let squares: f64 = throughput.iter().map(|t| t * t).sum();
    Ok((sum * sum / (throughput.len() as f64 * squares)).min(1.0))
}

/// Step CDF over a sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub values: Vec<f64>,
    /// `probabilities[i] = (i + 1) / N`.
    pub probabilities: Vec<f64>,
}

impl CdfTable {
    /// `F(x)`: the fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= x);
        if count == self.values.len() {
            1.0
        } else {
            count as f64 / self.values.len() as f64
        }
    }

    /// Smallest sample with `F >= q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.values.len();
        let k = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.values[k - 1]
    }

    /// Lower median.
    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }
}

pub fn empirical_cdf(values: &[f64]) -> Result<CdfTable> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::config("sample contains NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut probabilities: Vec<f64> = (1..=sorted.len()).map(|i| i as f64 / n).collect();
    *probabilities.last_mut().unwrap() = 1.0;
    Ok(CdfTable { values: sorted, probabilities })
}

/// Lower median, or 0 for an empty sample.
fn median_or_zero(values: &[f64]) -> f64 {
    empirical_cdf(values).map_or(0.0, |c| c.median())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub total_throughput: f64,
    /// In slice order.
    pub per_sp_throughput: Vec<f64>,
    /// Over slices with at least one member; 1 with fewer than two such
    /// slices and 0 when nobody gets any throughput.
    pub jain_index: f64,
    pub edge_median_rate: f64,
    pub center_median_rate: f64,
}

/// Aggregates one trial from per-user throughput.
///
/// Edge and centre medians are over per-user rates of flagged and unflagged
/// users; without flags both are 0.
pub fn aggregate_trial(per_user: &[f64], slices: &[SliceSpec], edge_flags: Option<&[bool]>) -> Result<TrialMetrics> {
    if per_user.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::config("per-user throughput must be finite and non-negative"));
    }
    if let Some(flags) = edge_flags {
        if flags.len() != per_user.len() {
            return Err(Error::config("edge flags do not match the user count"));
        }
    }
    let mut seen = vec![false; per_user.len()];
    for s in slices {
        for &u in &s.user_ids {
            if u >= per_user.len() {
                return Err(Error::config(format!("slice {} references unknown user {u}", s.slice_id)));
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(Error::config(format!("user {u} belongs to two slices")));
            }
        }
    }
    let per_sp: Vec<f64> = slices.iter().map(|s| s.user_ids.iter().map(|&u| per_user[u]).sum()).collect();
    let active: Vec<f64> =
        slices.iter().zip(&per_sp).filter(|(s, _)| !s.user_ids.is_empty()).map(|(_, t)| *t).collect();
    let jain = if active.is_empty() {
        1.0
    } else if active.iter().sum::<f64>() == 0.0 {
        0.0
    } else {
        jain_index(&active)?
    };
    let (edge, center): (Vec<f64>, Vec<f64>) = match edge_flags {
        Some(flags) => {
            let pick = |want: bool| (0..per_user.len()).filter(|&u| flags[u] == want).map(|u| per_user[u]).collect();
            (pick(true), pick(false))
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(TrialMetrics {
        total_throughput: per_user.iter().sum(),
        per_sp_throughput: per_sp,
        jain_index: jain,
        edge_median_rate: median_or_zero(&edge),
        center_median_rate: median_or_zero(&center),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn jain_values() {
        assert_eq!(jain_index(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(jain_index(&[1.0, 0.0]).unwrap(), 0.5);
        assert!((jain_index(&[2.5, 1.5]).unwrap() - 16.0 / 17.0).abs() < 1e-15);
        assert_eq!(jain_index(&[0.0, 0.0]), Err(Error::UndefinedFairness));
        assert!(jain_index(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn cdf_counts() {
        let c = empirical_cdf(&[3.0, 1.0, 2.0]).unwrap();
        assert!((c.eval(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.median(), 2.0);
        assert_eq!(empirical_cdf(&[1.0, 2.0, 3.0, 4.0]).unwrap().median(), 2.0);
        assert_eq!(empirical_cdf(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn constant_sample_jumps_once() {
        let c = empirical_cdf(&[4.0; 5]).unwrap();
        assert_eq!(c.eval(4.0 - 1e-12), 0.0);
        assert_eq!(c.eval(4.0), 1.0);
    }

    #[test]
    fn uniform_sample_matches_its_law() {
        let mut rng = crate::model::seed::rng(17);
        let sample: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let c = empirical_cdf(&sample).unwrap();
        // the supremum is attained at sample points, from either side
        let gap = c
            .values
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (i, &x)| m.max((c.probabilities[i] - x).abs()).max((x - i as f64 / 1e4).abs()));
        assert!(gap < 0.02, "{gap}");
    }

    #[test]
    fn aggregation() {
        let slices = vec![SliceSpec::new(0, 0.0, vec![0, 2]), SliceSpec::new(1, 0.0, vec![1, 3])];
        let m = aggregate_trial(&[1.0, 2.0, 3.0, 2.0], &slices, Some(&[true, false, true, false])).unwrap();
        assert_eq!(m.per_sp_throughput, vec![4.0, 4.0]);
        assert_eq!(m.jain_index, 1.0);
        assert_eq!(m.total_throughput, 8.0);
        assert_eq!((m.edge_median_rate, m.center_median_rate), (1.0, 2.0));
    }

    #[test]
    fn degenerate_slices() {
        let one = vec![SliceSpec::new(0, 0.0, vec![0, 1])];
        assert_eq!(aggregate_trial(&[1.0, 0.0], &one, None).unwrap().jain_index, 1.0);
        let empty_second = vec![SliceSpec::new(0, 0.0, vec![0]), SliceSpec::new(1, 0.0, vec![])];
        assert_eq!(aggregate_trial(&[2.0], &empty_second, None).unwrap().jain_index, 1.0);
        let starved = vec![SliceSpec::new(0, 0.0, vec![0]), SliceSpec::new(1, 0.0, vec![1])];
        assert_eq!(aggregate_trial(&[0.0, 0.0], &starved, None).unwrap().jain_index, 0.0);
        assert_eq!(aggregate_trial(&[3.0, 0.0], &starved, None).unwrap().jain_index, 0.5);
        let unknown = vec![SliceSpec::new(0, 0.0, vec![5])];
        assert!(aggregate_trial(&[1.0], &unknown, None).is_err());
    }

    proptest! {
        #[test]
        fn jain_bounds_and_invariance(t in prop::collection::vec(0.0f64..100.0, 1..8), c in 0.01f64..100.0, rot in 0usize..8) {
            prop_assume!(t.iter().sum::<f64>() > 1e-9);
            let j = jain_index(&t).unwrap();
            let k = t.len() as f64;
            prop_assert!(j <= 1.0 && j >= 1.0 / k - 1e-12);
            let scaled: Vec<f64> = t.iter().map(|x| x * c).collect();
            prop_assert!((jain_index(&scaled).unwrap() - j).abs() < 1e-12);
            let mut rotated = t.clone();
            rotated.rotate_left(rot % t.len());
            prop_assert!((jain_index(&rotated).unwrap() - j).abs() < 1e-12);
        }

        #[test]
        fn cdf_ends_at_one(v in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            let c = empirical_cdf(&v).unwrap();
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(c.eval(max), 1.0);
            prop_assert!(c.probabilities.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn aggregation_conserves_throughput(t in prop::collection::vec(0.0f64..50.0, 0..12), split in any::<u64>()) {
            let members = |k: u64| (0..t.len()).filter(|&u| (split >> (u % 64)) & 1 == k).collect::<Vec<_>>();
            let slices = vec![SliceSpec::new(0, 0.0, members(0)), SliceSpec::new(1, 0.0, members(1))];
            let m = aggregate_trial(&t, &slices, None).unwrap();
            let sum: f64 = m.per_sp_throughput.iter().sum();
            prop_assert!((sum - m.total_throughput).abs() <= 1e-9 * m.total_throughput.max(1.0));
        }
    }
}
