//! Exact rational linear programming.
//!
//! A small dictionary-based simplex (Chvátal style) over `BigRational` with
//! Bland's anti-cycling rule.  Problem sizes in this crate are tiny (tens of
//! variables and constraints), so the implementation favours an auditable
//! textbook structure over speed.  Two-phase: an auxiliary variable drives a
//! feasibility phase when some right-hand side is negative.

use crate::num::{sign_q, Q};
use num::{One, Signed, Zero};

/// Constraint relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// Variable domain for all variables of a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarMode {
    /// All variables constrained to be non-negative.
    NonNegative,
    /// All variables free (encoded internally as differences of
    /// non-negative pairs).
    Free,
}

/// Outcome of an LP solve.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { value: Q, point: Vec<Q> },
    Unbounded,
    Infeasible,
}

/// Maximise `objective . x` subject to the given constraints.
///
/// Each constraint is `(coefficients, relation, rhs)`.
pub fn maximize(
    objective: &[Q],
    constraints: &[(Vec<Q>, Rel, Q)],
    mode: VarMode,
) -> LpOutcome {
    let n = objective.len();
    for (coef, _, _) in constraints {
        assert_eq!(coef.len(), n, "constraint arity mismatch");
    }
    match mode {
        VarMode::NonNegative => maximize_nonneg(objective, constraints),
        VarMode::Free => {
            // x_j = u_j - w_j with u, w >= 0.
            let obj2: Vec<Q> = objective
                .iter()
                .cloned()
                .chain(objective.iter().map(|c| -c.clone()))
                .collect();
            let cons2: Vec<(Vec<Q>, Rel, Q)> = constraints
                .iter()
                .map(|(coef, rel, rhs)| {
                    let c2: Vec<Q> = coef
                        .iter()
                        .cloned()
                        .chain(coef.iter().map(|c| -c.clone()))
                        .collect();
                    (c2, *rel, rhs.clone())
                })
                .collect();
            match maximize_nonneg(&obj2, &cons2) {
                LpOutcome::Optimal { value, point } => {
                    let x: Vec<Q> = (0..n).map(|j| &point[j] - &point[n + j]).collect();
                    LpOutcome::Optimal { value, point: x }
                }
                other => other,
            }
        }
    }
}

/// Core simplex on `max c.x, A x <= b (after normalisation), x >= 0`.
fn maximize_nonneg(objective: &[Q], constraints: &[(Vec<Q>, Rel, Q)]) -> LpOutcome {
    let n = objective.len();
    // Normalise to <= form.
    let mut rows: Vec<(Vec<Q>, Q)> = Vec::new();
    for (coef, rel, rhs) in constraints {
        match rel {
            Rel::Le => rows.push((coef.clone(), rhs.clone())),
            Rel::Ge => rows.push((coef.iter().map(|c| -c.clone()).collect(), -rhs.clone())),
            Rel::Eq => {
                rows.push((coef.clone(), rhs.clone()));
                rows.push((coef.iter().map(|c| -c.clone()).collect(), -rhs.clone()));
            }
        }
    }
    let m = rows.len();

    // Dictionary: basic[i] = id of the variable expressed by row i;
    // row i reads  basic_i = const_i + sum_j tab[i][j] * nonbasic_j.
    // Variable ids: 0..n originals, n..n+m slacks, n+m auxiliary.
    let aux_id = n + m;
    let needs_phase1 = rows.iter().any(|(_, b)| b.is_negative());

    let mut nonbasic: Vec<usize> = (0..n).collect();
    let mut basic: Vec<usize> = (n..n + m).collect();
    let mut tab: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut consts: Vec<Q> = Vec::with_capacity(m);
    for (coef, b) in &rows {
        tab.push(coef.iter().map(|c| -c.clone()).collect());
        consts.push(b.clone());
    }

    // Objective row over nonbasic variables.
    let mut zcoef: Vec<Q>;
    let mut zconst = Q::zero();

    if needs_phase1 {
        // Add the auxiliary column (+1 in every row), objective w = -x0.
        for row in tab.iter_mut() {
            row.push(Q::one());
        }
        nonbasic.push(aux_id);
        zcoef = vec![Q::zero(); n];
        zcoef.push(-Q::one());
        // Make feasible: pivot x0 into the most negative row.
        let leave = (0..m)
            .min_by(|&a, &b| consts[a].cmp(&consts[b]))
            .expect("phase 1 requires at least one row");
        let enter_col = nonbasic.len() - 1;
        pivot(
            &mut tab, &mut consts, &mut zcoef, &mut zconst, &mut basic, &mut nonbasic, leave,
            enter_col,
        );
        if !run_simplex(&mut tab, &mut consts, &mut zcoef, &mut zconst, &mut basic, &mut nonbasic)
        {
            unreachable!("phase 1 objective is bounded above by zero");
        }
        if !zconst.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive x0 out of the basis if it lingers at value zero.
        if let Some(r) = basic.iter().position(|&id| id == aux_id) {
            if let Some(c) = (0..nonbasic.len()).find(|&c| !tab[r][c].is_zero()) {
                pivot(
                    &mut tab, &mut consts, &mut zcoef, &mut zconst, &mut basic, &mut nonbasic, r,
                    c,
                );
            } else {
                // Row says x0 = 0 identically; drop it.
                tab.remove(r);
                consts.remove(r);
                basic.remove(r);
            }
        }
        // Remove the auxiliary column.
        if let Some(c) = nonbasic.iter().position(|&id| id == aux_id) {
            nonbasic.remove(c);
            for row in tab.iter_mut() {
                row.remove(c);
            }
        }
        // Rebuild the true objective in terms of the current nonbasics.
        zconst = Q::zero();
        zcoef = vec![Q::zero(); nonbasic.len()];
        for (j, &id) in nonbasic.iter().enumerate() {
            if id < n {
                zcoef[j] += objective[id].clone();
            }
        }
        for (i, &id) in basic.iter().enumerate() {
            if id < n && !objective[id].is_zero() {
                let c = objective[id].clone();
                zconst += &c * &consts[i];
                for j in 0..nonbasic.len() {
                    let add = &c * &tab[i][j];
                    zcoef[j] += add;
                }
            }
        }
    } else {
        zcoef = objective.to_vec();
    }

    if !run_simplex(&mut tab, &mut consts, &mut zcoef, &mut zconst, &mut basic, &mut nonbasic) {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![Q::zero(); n];
    for (i, &id) in basic.iter().enumerate() {
        if id < n {
            point[id] = consts[i].clone();
        }
    }
    LpOutcome::Optimal { value: zconst, point }
}

/// Bland-rule simplex loop.  Returns false when unbounded.
fn run_simplex(
    tab: &mut Vec<Vec<Q>>,
    consts: &mut Vec<Q>,
    zcoef: &mut Vec<Q>,
    zconst: &mut Q,
    basic: &mut Vec<usize>,
    nonbasic: &mut Vec<usize>,
) -> bool {
    loop {
        // Entering: positive reduced cost with the smallest variable id.
        let enter = (0..nonbasic.len())
            .filter(|&j| sign_q(&zcoef[j]) > 0)
            .min_by_key(|&j| nonbasic[j]);
        let Some(enter) = enter else { return true };
        // Leaving: tightest ratio bound; ties by smallest variable id.
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..tab.len() {
            if sign_q(&tab[i][enter]) < 0 {
                let ratio = -&consts[i] / &tab[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basic[i] < basic[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((leave, _)) = leave else { return false };
        pivot(tab, consts, zcoef, zconst, basic, nonbasic, leave, enter);
    }
}

/// Pivot: nonbasic column `enter` enters the basis, row `leave` leaves.
#[allow(clippy::too_many_arguments)]
fn pivot(
    tab: &mut [Vec<Q>],
    consts: &mut [Q],
    zcoef: &mut [Q],
    zconst: &mut Q,
    basic: &mut [usize],
    nonbasic: &mut [usize],
    leave: usize,
    enter: usize,
) {
    let m = tab.len();
    let piv = tab[leave][enter].clone();
    assert!(!piv.is_zero(), "zero pivot");
    // Solve row `leave` for the entering variable.
    let inv = piv.recip();
    let mut new_row: Vec<Q> = tab[leave].iter().map(|c| -(c * &inv)).collect();
    let new_const = &consts[leave] * &inv;
    new_row[enter] = inv;
    // The leaving variable appears with coefficient +1/piv... sign handled:
    // basic_leave = const + sum tab_j x_j  =>
    // x_enter = -const/piv - sum_{j != enter} (tab_j/piv) x_j + (1/piv) basic_leave
    let new_const = -new_const;
    tab[leave] = new_row;
    consts[leave] = new_const;
    std::mem::swap(&mut basic[leave], &mut nonbasic[enter]);
    // Substitute into the other rows.
    for i in 0..m {
        if i == leave {
            continue;
        }
        let c = tab[i][enter].clone();
        if c.is_zero() {
            continue;
        }
        tab[i][enter] = Q::zero();
        let add_const = &c * &consts[leave];
        consts[i] += add_const;
        for j in 0..tab[leave].len() {
            let add = &c * &tab[leave][j];
            tab[i][j] += add;
        }
    }
    // And into the objective.
    let c = zcoef[enter].clone();
    if !c.is_zero() {
        zcoef[enter] = Q::zero();
        *zconst += &c * &consts[leave];
        for j in 0..tab[leave].len() {
            let add = &c * &tab[leave][j];
            zcoef[j] += add;
        }
    }
}

/// Find a point with `G x > 0` componentwise (all variables free), by
/// maximising a margin `delta <= 1`.  Returns the certificate point if one
/// exists.
pub fn strictly_positive_point(gram_rows: &[Vec<Q>]) -> Option<Vec<Q>> {
    if gram_rows.is_empty() {
        return Some(Vec::new());
    }
    let n = gram_rows[0].len();
    // Variables: x_0..x_{n-1}, delta.
    let mut objective = vec![Q::zero(); n + 1];
    objective[n] = Q::one();
    let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
    for row in gram_rows {
        assert_eq!(row.len(), n, "row arity mismatch");
        let mut coef = row.clone();
        coef.push(-Q::one());
        cons.push((coef, Rel::Ge, Q::zero()));
    }
    let mut cap = vec![Q::zero(); n + 1];
    cap[n] = Q::one();
    cons.push((cap, Rel::Le, Q::one()));
    match maximize(&objective, &cons, VarMode::Free) {
        LpOutcome::Optimal { value, point } if value.is_positive() => {
            Some(point[..n].to_vec())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qr};

    #[test]
    fn bounded_optimum() {
        // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x,y >= 0  => (8/5, 6/5), value 14/5.
        let out = maximize(
            &[q(1), q(1)],
            &[
                (vec![q(1), q(2)], Rel::Le, q(4)),
                (vec![q(3), q(1)], Rel::Le, q(6)),
            ],
            VarMode::NonNegative,
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, qr(14, 5));
                assert_eq!(point, vec![qr(8, 5), qr(6, 5)]);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let out = maximize(
            &[q(1)],
            &[
                (vec![q(1)], Rel::Le, q(-1)),
            ],
            VarMode::NonNegative,
        );
        assert!(matches!(out, LpOutcome::Infeasible));
    }

    #[test]
    fn unbounded_detected() {
        let out = maximize(
            &[q(1)],
            &[(vec![q(-1)], Rel::Le, q(0))],
            VarMode::NonNegative,
        );
        assert!(matches!(out, LpOutcome::Unbounded));
    }

    #[test]
    fn free_variables_and_equalities() {
        // max -x  s.t.  x + y = 3, y <= 1, free vars  => x = 2.
        let out = maximize(
            &[q(-1), q(0)],
            &[
                (vec![q(1), q(1)], Rel::Eq, q(3)),
                (vec![q(0), q(1)], Rel::Le, q(1)),
            ],
            VarMode::Free,
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, q(-2));
                assert_eq!(&point[0] + &point[1], q(3));
                assert!(point[1] <= q(1));
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn strict_positivity_certificate() {
        // Rows of a 2D cone that admits a strictly positive functional.
        let rows = vec![vec![q(1), q(0)], vec![q(1), q(1)], vec![q(0), q(1)]];
        let x = strictly_positive_point(&rows).expect("cone is pointed");
        for r in &rows {
            let v: Q = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(v.is_positive());
        }
        // Opposite rows admit none.
        let bad = vec![vec![q(1), q(0)], vec![q(-1), q(0)]];
        assert!(strictly_positive_point(&bad).is_none());
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let out = maximize(
            &[qr(3, 4), q(-150), qr(1, 50), q(-6)],
            &[
                (vec![qr(1, 4), q(-60), qr(-1, 25), q(9)], Rel::Le, q(0)),
                (vec![qr(1, 2), q(-90), qr(-1, 50), q(3)], Rel::Le, q(0)),
                (vec![q(0), q(0), q(1), q(0)], Rel::Le, q(1)),
            ],
            VarMode::NonNegative,
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, qr(1, 20)),
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}
