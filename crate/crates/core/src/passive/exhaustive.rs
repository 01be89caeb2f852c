use crate::error::{Error, Result};
use crate::mimo::PhaseConfig;

/// Largest search space [`exhaustive`] will enumerate.
pub const EXHAUSTIVE_BUDGET: u64 = 1_000_000;

/// Brute-force argmax of `objective` over all `K^N` phase arrays.
///
/// Arrays are visited in lexicographic order (element 0 most significant) and
/// the first maximizer wins ties. NaN objective values never win.
pub fn exhaustive<F>(mut objective: F, n: usize, k: usize) -> Result<PhaseConfig>
where
    F: FnMut(&PhaseConfig) -> f64,
{
    let size = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            size,
            budget: EXHAUSTIVE_BUDGET,
        });
    }
    let mut current = PhaseConfig::zeros(n, k)?;
    let mut levels = vec![0usize; n];
    let mut best = (current.clone(), objective(&current));
    for _ in 1..size {
        // odometer increment, last element fastest
        for slot in levels.iter_mut().rev() {
            *slot += 1;
            if *slot < k {
                break;
            }
            *slot = 0;
        }
        current = PhaseConfig::new(levels.clone(), k)?;
        let v = objective(&current);
        if v > best.1 || (best.1.is_nan() && !v.is_nan()) {
            best = (current.clone(), v);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective_gives_zeros() {
        assert_eq!(exhaustive(|_| 1.0, 3, 4).unwrap().levels(), &[0, 0, 0]);
    }

    #[test]
    fn single_element_is_linear_scan() {
        let values = [0.3, 2.0, -1.0, 2.0];
        let best = exhaustive(|t| values[t.level(0)], 1, 4).unwrap();
        assert_eq!(best.levels(), &[1]);
    }

    #[test]
    fn visits_every_array_once() {
        let mut seen = std::collections::HashSet::new();
        exhaustive(
            |t| {
                assert!(seen.insert(t.levels().to_vec()));
                0.0
            },
            3,
            3,
        )
        .unwrap();
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn finds_planted_optimum() {
        let target = [2usize, 0, 1, 1];
        let best = exhaustive(
            |t| -(t.levels().iter().zip(&target).filter(|(a, b)| a != b).count() as f64),
            4,
            3,
        )
        .unwrap();
        assert_eq!(best.levels(), &target);
    }

    #[test]
    fn refuses_large_spaces() {
        assert!(matches!(exhaustive(|_| 0.0, 21, 2), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(exhaustive(|_| 0.0, 100, 4), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(exhaustive(|_| 0.0, 10, 4), Err(Error::BudgetExceeded { .. })));
        assert!(exhaustive(|_| 0.0, 9, 4).is_ok());
    }
}
