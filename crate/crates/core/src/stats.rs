//! Mann-Whitney U test with midranks, tie-corrected variance and a
//! continuity-corrected normal approximation for the two-sided p-value.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `R_a - n_a (n_a + 1) / 2`: pairs with `a > b`, ties counting half.
    pub u_a: f64,
    /// `n_a n_b - u_a`: pairs with `a < b`, ties counting half.
    pub u_b: f64,
    pub z: f64,
    pub p_value: f64,
}

impl MannWhitney {
    /// The smaller of the two U statistics.
    pub fn u(&self) -> f64 {
        self.u_a.min(self.u_b)
    }
}

/// Midranks (1-based) of `values`, plus `sum(t^3 - t)` over tie groups.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end share the average of ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    (ranks, tie_term)
}

pub fn mann_whitney_u(sample_a: &[f64], sample_b: &[f64]) -> Result<MannWhitney> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::invalid("Mann-Whitney needs two non-empty samples"));
    }
    if sample_a.iter().chain(sample_b).any(|v| v.is_nan()) {
        return Err(Error::invalid("Mann-Whitney samples contain NaN"));
    }
    let na = sample_a.len() as f64;
    let nb = sample_b.len() as f64;
    let n = na + nb;
    let pooled: Vec<f64> = sample_a.iter().chain(sample_b).copied().collect();
    let (ranks, tie_term) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..sample_a.len()].iter().sum();
    let u_a = rank_sum_a - na * (na + 1.0) / 2.0;
    let u_b = na * nb - u_a;

    let mean = na * nb / 2.0;
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        // Every value identical: no evidence either way.
        return Ok(MannWhitney {
            u_a,
            u_b,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let z = ((u_a - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::standard();
    let p_value = (2.0 * normal.sf(z)).min(1.0);
    Ok(MannWhitney {
        u_a,
        u_b,
        z: z.copysign(u_a - mean),
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn midranks_average_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn disjoint_samples() {
        let mw = mann_whitney_u(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(mw.u_a, 0.0);
        assert_eq!(mw.u_b, 9.0);
        assert_eq!(mw.u(), 0.0);
        // |0 - 4.5| - 0.5 = 4 over sqrt(9 * 7 / 12): z = 1.7457, p = 0.0809.
        assert!((mw.p_value - 0.080_856).abs() < 1e-5, "{}", mw.p_value);
        let bigger = mann_whitney_u(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            &[10.0, 11.0, 12.0, 13.0, 14.0, 15.0],
        )
        .unwrap();
        assert!(bigger.p_value < 0.01);
    }

    #[test]
    fn identical_samples() {
        assert_eq!(
            mann_whitney_u(&[2.0, 2.0], &[2.0, 2.0, 2.0])
                .unwrap()
                .p_value,
            1.0
        );
        assert_eq!(
            mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0])
                .unwrap()
                .p_value,
            1.0
        );
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn u_matches_pairwise_count(
            a in prop::collection::vec(0u8..8, 1..15),
            b in prop::collection::vec(0u8..8, 1..15),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let mut below = 0.0;
            for x in &a {
                for y in &b {
                    if x < y { below += 1.0 } else if x == y { below += 0.5 }
                }
            }
            let mw = mann_whitney_u(&a, &b).unwrap();
            prop_assert_eq!(mw.u_b, below);
            prop_assert_eq!(mw.u_a + mw.u_b, (a.len() * b.len()) as f64);
            prop_assert!((0.0..=1.0).contains(&mw.p_value));
        }
    }
}
