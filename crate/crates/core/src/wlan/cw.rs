use super::TauMatrix;

/// Minimum contention window per `(user, ap)`; `None` where the user does
/// not attempt at that AP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CwTable {
    pub windows: Vec<Vec<Option<u32>>>,
}

impl CwTable {
    pub fn get(&self, user: usize, ap: usize) -> Option<u32> {
        self.windows[user][ap]
    }

    /// Attempt probability realized by window `w` under `tau = 2 / (w + 1)`.
    pub fn realized_tau(w: u32) -> f64 {
        2.0 / (f64::from(w) + 1.0)
    }
}

/// `W = ceil(2 / tau - 1)`, at least 1. Rounding up keeps the realized
/// probability at or below the target.
pub fn tau_to_cwmin(tau: &TauMatrix) -> CwTable {
    let windows = (0..tau.users())
        .map(|i| {
            tau.row(i)
                .iter()
                .map(|&t| {
                    (t > 0.0).then(|| {
                        let w = 2.0 / t - 1.0;
                        // absorb representation error such as 2 / 0.4 - 1 = 4.000000000000001
                        let w = (w - 1e-9 * w.abs()).ceil();
                        w.max(1.0).min(f64::from(u32::MAX)) as u32
                    })
                })
                .collect()
        })
        .collect();
    CwTable { windows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cw(t: f64) -> Option<u32> {
        tau_to_cwmin(&TauMatrix::from_rows(&[vec![t]]).unwrap()).get(0, 0)
    }

    #[test]
    fn table_values() {
        assert_eq!(cw(1.0), Some(1));
        assert_eq!(cw(0.4), Some(4));
        assert_eq!(cw(0.5528), Some(3));
        assert_eq!(CwTable::realized_tau(3), 0.5);
        assert_eq!(cw(0.4472), Some(4));
    }

    #[test]
    fn zero_is_unassociated() {
        assert_eq!(cw(0.0), None);
    }

    proptest! {
        #[test]
        fn realized_probability_is_conservative(t in 1e-4f64..=1.0) {
            let w = cw(t).unwrap();
            prop_assert!(w >= 1);
            prop_assert!(CwTable::realized_tau(w) <= t * (1.0 + 1e-8));
        }
    }
}
