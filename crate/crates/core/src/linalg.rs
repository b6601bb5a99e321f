//! Exact linear solving over a coefficient ring.
//!
//! The default coefficients are Laurent polynomials, which form a ring rather
//! than a field. Elimination pivots only on units; whatever remains is
//! eliminated fraction-free, which still decides consistency over the field
//! of fractions but may not produce a solution inside the ring.

use num_traits::Zero;

use crate::scalar::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub enum Solution<R> {
    /// A solution with entries in the ring (free variables set to zero).
    Found(Vec<R>),
    /// No solution even over the field of fractions; `row` is an original
    /// equation index that reduces to `0 = nonzero`.
    Inconsistent { row: usize },
    /// Solvable over the field of fractions, but unit pivots did not suffice.
    Undetermined,
}

struct Echelon<R> {
    rows: Vec<Vec<R>>,
    rhs: Vec<R>,
    origin: Vec<usize>,
    pivots: Vec<(usize, usize)>,
}

fn unit_eliminate<R: Coeff>(rows: Vec<Vec<R>>, rhs: Vec<R>, ncols: usize) -> Echelon<R> {
    let mut e = Echelon { origin: (0..rows.len()).collect(), rows, rhs, pivots: Vec::new() };
    let mut next = 0;
    for col in 0..ncols {
        let Some(p) = (next..e.rows.len()).find(|&r| e.rows[r][col].is_unit()) else {
            continue;
        };
        e.rows.swap(next, p);
        e.rhs.swap(next, p);
        e.origin.swap(next, p);
        let inv = e.rows[next][col].try_inverse().expect("unit pivot");
        for v in e.rows[next].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        e.rhs[next] = e.rhs[next].clone() * inv;
        for r in 0..e.rows.len() {
            if r == next || e.rows[r][col].is_zero() {
                continue;
            }
            let f = e.rows[r][col].clone();
            for c in 0..ncols {
                let sub = f.clone() * e.rows[next][c].clone();
                e.rows[r][c] = e.rows[r][c].clone() - sub;
            }
            e.rhs[r] = e.rhs[r].clone() - f * e.rhs[next].clone();
        }
        e.pivots.push((next, col));
        next += 1;
    }
    e
}

/// Solves `rows * x = rhs`.
pub fn solve<R: Coeff>(rows: Vec<Vec<R>>, rhs: Vec<R>, ncols: usize) -> Solution<R> {
    let e = unit_eliminate(rows, rhs, ncols);
    let npiv = e.pivots.len();
    // rows below the pivots, restricted to the remaining columns
    let mut rest: Vec<(Vec<R>, R, usize)> = (npiv..e.rows.len())
        .map(|r| (e.rows[r].clone(), e.rhs[r].clone(), e.origin[r]))
        .collect();
    let mut fraction_free_needed = false;
    let mut col_used = vec![false; ncols];
    for &(_, c) in &e.pivots {
        col_used[c] = true;
    }
    // fraction-free elimination on what is left
    let mut next = 0;
    for col in 0..ncols {
        if col_used[col] {
            continue;
        }
        let Some(p) = (next..rest.len()).find(|&r| !rest[r].0[col].is_zero()) else {
            continue;
        };
        fraction_free_needed = true;
        rest.swap(next, p);
        let (prow, prhs, _) = rest[next].clone();
        let a = prow[col].clone();
        for r in next + 1..rest.len() {
            let b = rest[r].0[col].clone();
            if b.is_zero() {
                continue;
            }
            for c in 0..ncols {
                rest[r].0[c] = a.clone() * rest[r].0[c].clone() - b.clone() * prow[c].clone();
            }
            rest[r].1 = a.clone() * rest[r].1.clone() - b.clone() * prhs.clone();
        }
        next += 1;
    }
    for (row, rhs, origin) in &rest {
        if row.iter().all(Zero::is_zero) && !rhs.is_zero() {
            return Solution::Inconsistent { row: *origin };
        }
    }
    if fraction_free_needed {
        return Solution::Undetermined;
    }
    let mut x = vec![R::zero(); ncols];
    for &(r, c) in &e.pivots {
        x[c] = e.rhs[r].clone();
    }
    Solution::Found(x)
}

/// Basis of the kernel of `rows` (one vector per free column), available
/// when unit pivots reduce the matrix completely.
pub fn nullspace<R: Coeff>(rows: Vec<Vec<R>>, ncols: usize) -> Option<Vec<Vec<R>>> {
    let n = rows.len();
    let e = unit_eliminate(rows, vec![R::zero(); n], ncols);
    let npiv = e.pivots.len();
    if e.rows[npiv..].iter().any(|r| r.iter().any(|v| !v.is_zero())) {
        return None;
    }
    let mut pivot_cols = vec![None; ncols];
    for &(r, c) in &e.pivots {
        pivot_cols[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..ncols {
        if pivot_cols[free].is_some() {
            continue;
        }
        let mut v = vec![R::zero(); ncols];
        v[free] = R::one();
        for &(r, c) in &e.pivots {
            v[c] = -e.rows[r][free].clone();
        }
        out.push(v);
    }
    Some(out)
}
