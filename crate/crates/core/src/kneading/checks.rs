//! Classification and admissibility checks on a finite range of `k`.

use serde::Serialize;

use super::KneadingMap;
use crate::error::Result;

/// Default lookahead for the lexicographic admissibility comparison.
pub const DEFAULT_WINDOW: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Admissibility {
    Pass,
    /// `Q(k + j) < Q(Q²(k) + j)` at the first differing `j`.
    Violation {
        k: usize,
        j: usize,
    },
    /// The two tails agree through the whole window for this `k` (first such `k`).
    Undecided {
        k: usize,
        window: usize,
    },
}

fn q2(map: &KneadingMap, k: usize) -> Result<usize> {
    let qk = map.q_checked(k)?;
    map.q_checked(qk)
}

/// Lexicographic check `{Q(k+j)} ⪰ {Q(Q²(k)+j)}` for `1 <= k <= count`.
pub fn check_admissible(map: &KneadingMap, count: usize, window: usize) -> Result<Admissibility> {
    check_admissible_range(map, 1, count, window)
}

/// Same as [`check_admissible`] restricted to `from <= k <= to`.
pub fn check_admissible_range(
    map: &KneadingMap,
    from: usize,
    to: usize,
    window: usize,
) -> Result<Admissibility> {
    let mut undecided = None;
    for k in from.max(1)..=to {
        let base = q2(map, k)?;
        let mut decided = false;
        for j in 1..=window {
            let a = map.q_checked(k + j)?;
            let b = map.q_checked(base + j)?;
            if a != b {
                if a < b {
                    return Ok(Admissibility::Violation { k, j });
                }
                decided = true;
                break;
            }
        }
        if !decided && undecided.is_none() {
            undecided = Some(k);
        }
    }
    Ok(match undecided {
        Some(k) => Admissibility::Undecided { k, window },
        None => Admissibility::Pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrictHofbauer {
    pub pass: bool,
    /// Least `k0` with `Q(k+1) > Q(Q²(k)+1)` for every `k0 < k <= K`.
    pub k0: usize,
    pub largest_violation: Option<usize>,
}

/// Strict form `Q(k+1) > Q(Q²(k)+1)`. The sampled range counts as passing when
/// every violation sits in its lower half, i.e. `k0 <= K / 2`.
pub fn check_strict_hofbauer(map: &KneadingMap, count: usize) -> Result<StrictHofbauer> {
    let mut largest = None;
    for k in 1..=count {
        let lhs = map.q_checked(k + 1)?;
        let rhs = map.q_checked(q2(map, k)? + 1)?;
        if lhs <= rhs {
            largest = Some(k);
        }
    }
    let k0 = largest.unwrap_or(0);
    Ok(StrictHofbauer {
        pass: count > 0 && k0 <= count / 2,
        k0,
        largest_violation: largest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FibonacciLike {
    /// `max_{1<=k<=K} (k - Q(k))`.
    pub n: usize,
    /// The maximum over the upper half exceeds the maximum over the lower half.
    pub growing: bool,
}

pub fn check_fibonacci_like(map: &KneadingMap, count: usize) -> Result<FibonacciLike> {
    let half = count / 2;
    let mut lower = 0;
    let mut all = 0;
    for k in 1..=count {
        let gap = k - map.q_checked(k)?;
        all = all.max(gap);
        if k <= half.max(1) {
            lower = lower.max(gap);
        }
    }
    Ok(FibonacciLike {
        n: all,
        growing: all > lower,
    })
}

/// Least `(k0, p)` (ordered by `k0`, then `p`) with `Q(k0) = k0 - 1`,
/// `Q(k) >= k0 - 1` and `Q(k + p) = Q(k) + p` on `k0 <= k <= K - p`.
/// At least `p` shifts must be observable, so `k0 + 2p <= K`.
pub fn check_feigenbaum_periodic(
    map: &KneadingMap,
    count: usize,
) -> Result<Option<(usize, usize)>> {
    let q: Vec<usize> = (0..=count)
        .map(|k| map.q_checked(k))
        .collect::<Result<_>>()?;
    for k0 in 1..=count {
        if q[k0] != k0 - 1 || q[k0..=count].iter().any(|&v| v + 1 < k0) {
            continue;
        }
        for p in 1..=(count - k0) / 2 {
            if (k0..=count - p).all(|k| q[k + p] == q[k] + p) {
                return Ok(Some((k0, p)));
            }
        }
    }
    Ok(None)
}

/// Renormalization candidates `2 <= k0 <= K` with `Q(k0) = k0 - 1` and
/// `Q(k) >= k0` for all `k0 < k <= K`.
pub fn check_renormalizable(map: &KneadingMap, count: usize) -> Result<Vec<usize>> {
    let q: Vec<usize> = (0..=count)
        .map(|k| map.q_checked(k))
        .collect::<Result<_>>()?;
    Ok((2..=count)
        .filter(|&k0| q[k0] == k0 - 1 && q[k0 + 1..=count].iter().all(|&v| v >= k0))
        .collect())
}

/// The literal criterion: `Q(k0) = k0 - 1` and `Q(k) >= k0 - 1` for `k >= k0`.
/// `k0 = 1` always qualifies.
pub fn check_renormalizable_literal(map: &KneadingMap, count: usize) -> Result<Vec<usize>> {
    let q: Vec<usize> = (0..=count)
        .map(|k| map.q_checked(k))
        .collect::<Result<_>>()?;
    Ok((1..=count)
        .filter(|&k0| q[k0] == k0 - 1 && q[k0..=count].iter().all(|&v| v + 1 >= k0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn floor_half() -> KneadingMap {
        KneadingMap::explicit((1..=400).map(|k| k / 2).collect())
    }

    #[test]
    fn fibonacci_and_feigenbaum_are_admissible() {
        assert_eq!(
            check_admissible(&KneadingMap::fibonacci(), 30, 50).unwrap(),
            Admissibility::Pass
        );
        assert_eq!(
            check_admissible(&KneadingMap::feigenbaum(), 30, 50).unwrap(),
            Admissibility::Pass
        );
    }

    #[test]
    fn constant_zero_is_undecided_not_pass() {
        let v = check_admissible(&KneadingMap::constant(0), 10, 16).unwrap();
        assert_eq!(v, Admissibility::Undecided { k: 1, window: 16 });
    }

    #[test]
    fn perturbed_feigenbaum_violates() {
        let mut table: Vec<usize> = (1..=80).map(|k| k - 1).collect();
        table[3] = 0; // Q(4) = 0
        let v = check_admissible(&KneadingMap::explicit(table), 10, 50).unwrap();
        assert_eq!(v, Admissibility::Violation { k: 3, j: 1 });
    }

    #[test]
    fn short_table_is_reported() {
        assert!(check_admissible(&KneadingMap::explicit(vec![0, 0, 0]), 2, 5).is_err());
    }

    #[test]
    fn strict_hofbauer_examples() {
        let fib = check_strict_hofbauer(&KneadingMap::fibonacci(), 40).unwrap();
        assert!(fib.pass && fib.k0 <= 4, "{fib:?}");
        let feig = check_strict_hofbauer(&KneadingMap::feigenbaum(), 40).unwrap();
        assert!(feig.pass);
        let zero = check_strict_hofbauer(&KneadingMap::constant(0), 40).unwrap();
        assert!(!zero.pass);
        assert_eq!(zero.largest_violation, Some(40));
    }

    #[test]
    fn fibonacci_like_bounds() {
        assert_eq!(
            check_fibonacci_like(&KneadingMap::fibonacci(), 100).unwrap(),
            FibonacciLike {
                n: 2,
                growing: false
            }
        );
        assert_eq!(
            check_fibonacci_like(&KneadingMap::feigenbaum(), 100).unwrap(),
            FibonacciLike {
                n: 1,
                growing: false
            }
        );
        assert_eq!(
            check_fibonacci_like(&floor_half(), 100).unwrap(),
            FibonacciLike {
                n: 50,
                growing: true
            }
        );
    }

    #[test]
    fn feigenbaum_periodicity() {
        assert_eq!(
            check_feigenbaum_periodic(&KneadingMap::feigenbaum(), 50).unwrap(),
            Some((1, 1))
        );
        assert_eq!(
            check_feigenbaum_periodic(&KneadingMap::fibonacci(), 50).unwrap(),
            None
        );
        let ep = KneadingMap::eventually_periodic(4, 2, vec![3, 3], vec![]).unwrap();
        assert_eq!(check_feigenbaum_periodic(&ep, 50).unwrap(), Some((4, 2)));
        // With table [3, 4] the tail is Q(k) = k - 1, so a period-1 witness exists.
        let ep = KneadingMap::eventually_periodic(4, 2, vec![3, 4], vec![]).unwrap();
        assert_eq!(check_feigenbaum_periodic(&ep, 50).unwrap(), Some((4, 1)));
    }

    #[test]
    fn renormalizability() {
        assert_eq!(
            check_renormalizable(&KneadingMap::feigenbaum(), 50).unwrap(),
            (2..=50).collect::<Vec<_>>()
        );
        assert!(check_renormalizable(&KneadingMap::fibonacci(), 50)
            .unwrap()
            .is_empty());
        assert!(check_renormalizable(&KneadingMap::constant(0), 50)
            .unwrap()
            .is_empty());
        assert_eq!(
            check_renormalizable_literal(&KneadingMap::constant(0), 50).unwrap(),
            vec![1]
        );
    }
}
