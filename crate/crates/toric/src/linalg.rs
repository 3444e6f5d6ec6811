//! Tiny exact dense linear algebra over `Rat`: row reduction, rank,
//! nullspace bases and small square solves. Everything here runs on matrices
//! with at most a few dozen rows, so simplicity beats asymptotics.

use crate::rat::Rat;

/// Reduced row echelon form, in place. Returns the pivot column of each
/// produced row.
pub(crate) fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in &mut rows[r] {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for cc in 0..ncols {
                    let t = &rows[r][cc] * &f;
                    rows[i][cc] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    rref(&mut rows).len()
}

/// Basis of `{ x : M x = 0 }` for the matrix with the given rows.
pub(crate) fn nullspace(mut rows: Vec<Vec<Rat>>, ncols: usize) -> Vec<Vec<Rat>> {
    let pivots = rref(&mut rows);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -&rows[row][free];
        }
        basis.push(v);
    }
    basis
}

/// Exact solution of a square system; `None` when singular.
pub(crate) fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut rows: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some((0..n).map(|i| rows[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Rat::int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        assert_eq!(rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(m(&[&[1, 0], &[0, 1]])), 2);
        // Second differences of {0,1,2,3}: kernel of [points; ones].
        let basis = nullspace(m(&[&[0, 1, 2, 3], &[1, 1, 1, 1]]), 4);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let dot: Rat = v
                .iter()
                .enumerate()
                .fold(Rat::zero(), |acc, (i, x)| acc + &(&Rat::int(i as i64) * x));
            assert!(dot.is_zero());
            let sum: Rat = v.iter().fold(Rat::zero(), |acc, x| acc + x);
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn solve_small_system() {
        let a = m(&[&[2, 1], &[1, -1]]);
        let b = vec![Rat::int(5), Rat::int(1)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![Rat::int(2), Rat::int(1)]);
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &b).is_none());
    }
}
