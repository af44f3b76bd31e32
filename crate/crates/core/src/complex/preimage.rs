use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use super::Complex;
use crate::error::{KneadError, Result};
use crate::map::UnicriticalMap;
use crate::precision::{self, sign_threshold};
use crate::table::{num, Table};

/// Drops subtrees whose weight `|Df^m|^{-δ}` falls below `eps`. The discarded
/// mass of a subtree rooted at weight `w` on level `m` is bounded by
/// `w Σ_{i=1}^{n-m} (ℓ min_deriv^{-δ})^i`, which is only honest when `min_deriv`
/// really bounds `|Df|` from below on the region the tree visits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pruning {
    pub eps: f64,
    pub delta: f64,
    pub min_deriv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    /// Root indices from the base point outward, one base-`ℓ` digit per level.
    pub path: Vec<u32>,
    pub value: Complex,
    /// `ln |Df^n(y)|`.
    pub log_deriv: f64,
}

impl Leaf {
    pub fn path_string(&self) -> String {
        self.path
            .iter()
            .map(|d| char::from_digit(*d, 36).unwrap_or('?'))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageTree {
    pub depth: u32,
    /// `levels[m]` lists the kept nodes on level `m`, sorted by path.
    pub levels: Vec<Vec<Leaf>>,
    /// Bound on the weight discarded on each level.
    pub pruned: Vec<f64>,
}

impl PreimageTree {
    pub fn leaves(&self) -> &[Leaf] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

fn children(map: &UnicriticalMap, node: &Leaf, c: &Complex) -> Result<Vec<Leaf>> {
    let w = &node.value - c;
    if w.is_zero() {
        return Err(KneadError::CriticalCollision {
            path: format!("{} (value - c = 0)", node_path(node)),
        });
    }
    let ell = map.ell();
    let mut out = Vec::with_capacity(ell as usize);
    for (j, y) in w.roots(ell).into_iter().enumerate() {
        // |Df(y)| = ℓ |y|^{ℓ-1}; |y| = |w|^{1/ℓ} is never zero here.
        let ln_abs = precision::ln_abs_f64(&y.abs());
        let mut path = node.path.clone();
        path.push(j as u32);
        out.push(Leaf {
            path,
            log_deriv: node.log_deriv + (ell as f64).ln() + (ell - 1) as f64 * ln_abs,
            value: y,
        });
    }
    Ok(out)
}

fn node_path(node: &Leaf) -> String {
    if node.path.is_empty() {
        "<root>".into()
    } else {
        node.path_string()
    }
}

/// All `y` with `f^m(y) = z`, `m <= depth`, built level by level. Root `j` of
/// `w = y_parent - c` is `|w|^{1/ℓ} e^{i(arg w + 2πj)/ℓ}` with the principal
/// argument, so paths are deterministic; each level fans out in parallel and is
/// collected in path order.
pub fn preimages(
    map: &UnicriticalMap,
    z: &Complex,
    depth: u32,
    pruning: Option<Pruning>,
) -> Result<PreimageTree> {
    let bits = map.bits();
    let c = Complex::real(map.c());
    let root = Leaf {
        path: Vec::new(),
        value: Complex::new(Float::with_val(bits, &z.re), Float::with_val(bits, &z.im)),
        log_deriv: 0.0,
    };
    let mut levels = vec![vec![root]];
    let mut pruned = vec![0.0];
    let growth = pruning.map(|p| map.ell() as f64 * p.min_deriv.powf(-p.delta));
    for m in 1..=depth {
        let parents = levels.last().unwrap();
        let next: Vec<Leaf> = parents
            .par_iter()
            .map(|p| children(map, p, &c))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut mass = 0.0;
        let kept = match (pruning, growth) {
            (Some(p), Some(g)) => {
                let remaining = (depth - m) as i32;
                let tail: f64 = (1..=remaining).map(|i| g.powi(i)).sum::<f64>() + 1.0;
                next.into_iter()
                    .filter(|leaf| {
                        let w = (-p.delta * leaf.log_deriv).exp();
                        if w < p.eps {
                            mass += w * tail;
                            false
                        } else {
                            true
                        }
                    })
                    .collect()
            }
            _ => next,
        };
        levels.push(kept);
        pruned.push(mass);
    }
    Ok(PreimageTree {
        depth,
        levels,
        pruned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: u32,
    pub count: usize,
    pub level_sum: f64,
    pub cumulative: f64,
    pub pruned_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSummary {
    pub z: (String, String),
    pub delta: f64,
    pub rows: Vec<LevelRow>,
    pub pruned_mass_bound: f64,
}

impl PoincareSummary {
    pub fn total(&self) -> f64 {
        self.rows.last().map(|r| r.cumulative).unwrap_or(0.0)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "poincare",
            &["level", "count", "level_sum", "cumulative", "pruned_bound"],
        );
        for r in &self.rows {
            t.push(vec![
                r.level.to_string(),
                r.count.to_string(),
                num(r.level_sum),
                num(r.cumulative),
                num(r.pruned_bound),
            ]);
        }
        t
    }
}

/// Rejects base points within `2^{-bits/2}` of `f^n(0)`, `1 <= n <= depth`.
fn check_base_point(map: &UnicriticalMap, z: &Complex, depth: u32) -> Result<()> {
    let bits = map.bits();
    let tol = sign_threshold(bits);
    let mut y = map.zero();
    for n in 1..=depth.max(1) {
        map.step(&mut y);
        let d = (z - &Complex::real(&y)).abs();
        if d.cmp_abs(&tol) != Some(Ordering::Greater) {
            return Err(KneadError::PostcriticalBasePoint { step: n as u64 });
        }
        if !y.is_finite() {
            break;
        }
    }
    Ok(())
}

/// Per-level sums `Σ_{f^n(y)=z} |Df^n(y)|^{-δ}` for `n <= depth` and their
/// cumulative totals.
pub fn poincare_partial(
    map: &UnicriticalMap,
    z: &Complex,
    delta: f64,
    depth: u32,
    pruning: Option<Pruning>,
) -> Result<PoincareSummary> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(KneadError::InvalidInput(format!(
            "delta must be positive, got {delta}"
        )));
    }
    check_base_point(map, z, depth)?;
    let pruning = pruning.map(|p| Pruning { delta, ..p });
    let tree = preimages(map, z, depth, pruning)?;
    let mut cumulative = 0.0;
    let rows = tree
        .levels
        .iter()
        .zip(&tree.pruned)
        .enumerate()
        .map(|(m, (level, &pruned_bound))| {
            let level_sum: f64 = level.iter().map(|l| (-delta * l.log_deriv).exp()).sum();
            cumulative += level_sum;
            LevelRow {
                level: m as u32,
                count: level.len(),
                level_sum,
                cumulative,
                pruned_bound,
            }
        })
        .collect();
    let digits = precision::decimal_digits(map.bits()).min(40);
    Ok(PoincareSummary {
        z: (
            precision::to_decimal_digits(&z.re, digits),
            precision::to_decimal_digits(&z.im, digits),
        ),
        delta,
        rows,
        pruned_mass_bound: tree.pruned.iter().sum(),
    })
}
