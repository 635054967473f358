//! Exact linear feasibility via phase-one simplex.
//!
//! Used by the two-player mixed-equilibrium search, which has to decide, for
//! a candidate pair of supports, whether the indifference system has a
//! non-negative solution. Bland's rule keeps the pivoting finite; all
//! arithmetic is rational, so degenerate systems are decided exactly.

use num_traits::Zero;

use crate::rat::{rat, Rat};

/// Finds some `x >= 0` with `rows * x = rhs`, or `None` if the system is
/// infeasible. `rows` must be rectangular.
pub(crate) fn feasible_point(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    if m == 0 {
        return Some(Vec::new());
    }
    debug_assert!(rows.iter().all(|r| r.len() == n));
    debug_assert_eq!(rhs.len(), m);

    // Tableau columns: n structural variables, m artificials, then the rhs.
    // Rows are sign-flipped so every rhs entry is non-negative.
    let cols = n + m;
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let flip = rhs[i] < rat(0);
        let mut t: Vec<Rat> = Vec::with_capacity(cols + 1);
        for v in row {
            t.push(if flip { -v.clone() } else { v.clone() });
        }
        for j in 0..m {
            t.push(if j == i { rat(1) } else { rat(0) });
        }
        t.push(if flip { -rhs[i].clone() } else { rhs[i].clone() });
        tab.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase one: minimise the sum of artificial variables.
    loop {
        // Reduced cost of column j under cost 1 on artificials, 0 elsewhere.
        let reduced = |tab: &[Vec<Rat>], basis: &[usize], j: usize| -> Rat {
            let direct = if j >= n { rat(1) } else { rat(0) };
            let mut carried = rat(0);
            for (i, &b) in basis.iter().enumerate() {
                if b >= n {
                    carried += &tab[i][j];
                }
            }
            direct - carried
        };
        // Bland: entering column is the lowest index with negative reduced cost.
        let mut entering = None;
        for j in 0..cols {
            if basis.contains(&j) {
                continue;
            }
            if reduced(&tab, &basis, j) < rat(0) {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { break };
        // Ratio test; ties go to the smallest basis index (Bland again).
        let mut leaving: Option<(usize, Rat)> = None;
        for i in 0..m {
            if tab[i][e] > rat(0) {
                let ratio = &tab[i][cols] / &tab[i][e];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leaving else {
            // Unbounded phase-one objective cannot happen (it is bounded below
            // by zero); treat defensively as infeasible.
            return None;
        };
        pivot(&mut tab, l, e);
        basis[l] = e;
    }

    // Feasible iff every artificial basic variable sits at zero.
    for (i, &b) in basis.iter().enumerate() {
        if b >= n && !tab[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![rat(0); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i][cols].clone();
        }
    }
    Some(x)
}

fn pivot(tab: &mut [Vec<Rat>], row: usize, col: usize) {
    let pivot_value = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v /= &pivot_value;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (v, p) in r.iter_mut().zip(pivot_row.iter()) {
            *v -= &factor * p;
        }
    }
}
