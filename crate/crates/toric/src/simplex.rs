//! Dense exact-rational simplex for small certification problems.
//!
//! Standard form only: maximize `c . x` subject to `A x <= b`, `x >= 0`,
//! with `b >= 0` entrywise so the slack basis is feasible and no first
//! phase is needed. Callers encode free variables as differences and
//! equalities as inequality pairs. Instances here stay small (at most a
//! few hundred rows), so a dense tableau is the simplest exact choice.

use crate::error::{Error, Result};
use crate::rat::Rat;

pub(crate) struct LpSolution {
    pub value: Rat,
    pub x: Vec<Rat>,
    /// One multiplier per constraint row, nonnegative at optimality.
    pub duals: Vec<Rat>,
}

/// After this many consecutive degenerate pivots the pivot rule switches to
/// Bland's, which cannot cycle.
const DEGENERATE_LIMIT: usize = 50;

pub(crate) fn solve_standard(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    let width = n + m;

    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "ragged constraint row");
        assert!(!b[i].is_negative(), "standard form needs b >= 0");
        let mut r: Vec<Rat> = Vec::with_capacity(width + 1);
        r.extend(row.iter().cloned());
        for j in 0..m {
            r.push(if j == i { Rat::one() } else { Rat::zero() });
        }
        r.push(b[i].clone());
        tab.push(r);
    }
    // Reduced-cost row, kept as z_j - c_j: optimal when all entries >= 0.
    let mut obj: Vec<Rat> = c.iter().map(|x| -x).collect();
    obj.extend(std::iter::repeat_with(Rat::zero).take(m + 1));
    let mut basis: Vec<usize> = (n..width).collect();

    let mut bland = false;
    let mut degenerate_run = 0usize;
    let max_iter = 2000 + 200 * (m + n);
    for _ in 0..max_iter {
        let enter = if bland {
            (0..width).find(|&j| obj[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..width {
                if obj[j].is_negative() && best.map_or(true, |k| obj[j] < obj[k]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(j) = enter else {
            let mut x = vec![Rat::zero(); n];
            for (r, &bj) in basis.iter().enumerate() {
                if bj < n {
                    x[bj] = tab[r][width].clone();
                }
            }
            let duals = (0..m).map(|i| obj[n + i].clone()).collect();
            return Ok(LpSolution {
                value: obj[width].clone(),
                x,
                duals,
            });
        };

        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..m {
            if !tab[r][j].is_positive() {
                continue;
            }
            let ratio = &tab[r][width] / &tab[r][j];
            let better = match &leave {
                None => true,
                // Ties go to the smallest basic label, which keeps the
                // Bland phase cycle-free and the whole run deterministic.
                Some((lr, lv)) => ratio < *lv || (ratio == *lv && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // An unbounded column cannot arise from the capped problems built in
        // this crate; treat it as the same internal failure as cycling.
        let Some((r, _)) = leave else {
            return Err(Error::LpStalled);
        };

        if tab[r][width].is_zero() {
            degenerate_run += 1;
            if degenerate_run > DEGENERATE_LIMIT {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        pivot(&mut tab, &mut obj, &mut basis, r, j);
    }
    Err(Error::LpStalled)
}

fn pivot(tab: &mut [Vec<Rat>], obj: &mut [Rat], basis: &mut [usize], r: usize, j: usize) {
    let piv = tab[r][j].clone();
    for v in tab[r].iter_mut() {
        *v = &*v / &piv;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for (v, p) in row.iter_mut().zip(&prow) {
            *v -= &(&f * p);
        }
    }
    if !obj[j].is_zero() {
        let f = obj[j].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            *v -= &(&f * p);
        }
    }
    basis[r] = j;
}
