//! Exact rational linear programming.
//!
//! Problems carry equalities a·x = b, inequalities a·x ≥ b over free
//! variables, and an optional linear objective to maximize. The equalities
//! are eliminated first (sparse, exact), the reduced problem runs through a
//! dense two-phase simplex with Bland's anti-cycling rule, and every answer
//! is verified by substitution before being returned. All arithmetic is
//! exact; feasibility answers are never approximate.

use crate::linalg::sparse::SparseMat;
use crate::rational::Rational;
use num::traits::{One, Signed, Zero};

/// Coefficient rows are kept sparse; additivity systems on large algebras
/// have a handful of entries per row.
pub type LpRow = Vec<(usize, Rational)>;

#[derive(Clone, Debug, Default)]
pub struct RationalLp {
    pub num_vars: usize,
    /// a · x = b
    pub equalities: Vec<(LpRow, Rational)>,
    /// a · x ≥ b
    pub inequalities: Vec<(LpRow, Rational)>,
    /// maximize c · x
    pub objective: Option<Vec<Rational>>,
}

#[cfg(test)]
fn densify(row: &LpRow, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, v) in row {
        out[*i] += v.clone();
    }
    out
}

fn sparsify(coefs: &[Rational]) -> LpRow {
    coefs
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

impl RationalLp {
    pub fn new(num_vars: usize) -> RationalLp {
        RationalLp { num_vars, ..Default::default() }
    }

    pub fn eq(&mut self, coefs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coefs.len(), self.num_vars);
        self.equalities.push((sparsify(&coefs), rhs));
    }

    pub fn eq_sparse(&mut self, row: LpRow, rhs: Rational) {
        debug_assert!(row.iter().all(|(i, _)| *i < self.num_vars));
        self.equalities.push((row, rhs));
    }

    pub fn ge(&mut self, coefs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coefs.len(), self.num_vars);
        self.inequalities.push((sparsify(&coefs), rhs));
    }

    pub fn ge_sparse(&mut self, row: LpRow, rhs: Rational) {
        debug_assert!(row.iter().all(|(i, _)| *i < self.num_vars));
        self.inequalities.push((row, rhs));
    }

    /// Convenience: x_i ≥ 0.
    pub fn nonneg(&mut self, i: usize) {
        self.ge_sparse(vec![(i, Rational::one())], Rational::zero());
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let dot = |a: &LpRow| -> Rational { a.iter().map(|(i, v)| v * &x[*i]).sum() };
        self.equalities.iter().all(|(a, b)| dot(a) == *b)
            && self.inequalities.iter().all(|(a, b)| dot(a) >= *b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    /// Feasible; no objective was given.
    Feasible(Vec<Rational>),
    Optimal { point: Vec<Rational>, value: Rational },
    /// The objective grows without bound over the feasible region.
    Unbounded(Vec<Rational>),
}

/// Exact feasibility with a witness.
pub fn lp_feasible(lp: &RationalLp) -> Option<Vec<Rational>> {
    let mut p = lp.clone();
    p.objective = None;
    match lp_solve(&p) {
        LpOutcome::Feasible(x) => Some(x),
        LpOutcome::Infeasible => None,
        _ => unreachable!("no objective was set"),
    }
}

pub fn lp_solve(lp: &RationalLp) -> LpOutcome {
    // eliminate the equalities: x = x0 + N y
    let (x0, kernel) = if lp.equalities.is_empty() {
        let id: Vec<Vec<Rational>> = (0..lp.num_vars)
            .map(|i| {
                let mut v = vec![Rational::zero(); lp.num_vars];
                v[i] = Rational::one();
                v
            })
            .collect();
        (vec![Rational::zero(); lp.num_vars], id)
    } else {
        let mut m = SparseMat::new(lp.equalities.len(), lp.num_vars);
        let mut rhs = Vec::with_capacity(lp.equalities.len());
        for (r, (coefs, b)) in lp.equalities.iter().enumerate() {
            for (c, v) in coefs {
                m.add_entry(r, *c, v.clone());
            }
            rhs.push(b.clone());
        }
        let factor = m.factor();
        let Some(x0) = factor.solve(&rhs) else {
            return LpOutcome::Infeasible;
        };
        (x0, factor.kernel_basis())
    };
    let d = kernel.len();

    // reduce inequalities to y space
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (a, b) in &lp.inequalities {
        let shift: Rational = a.iter().map(|(i, v)| v * &x0[*i]).sum();
        let red: Vec<Rational> = kernel
            .iter()
            .map(|col| a.iter().map(|(i, v)| v * &col[*i]).sum())
            .collect();
        let rhs = b - shift;
        if red.iter().all(|v| v.is_zero()) {
            if rhs.is_positive() {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        rows.push((red, rhs));
    }
    let objective_y: Option<(Vec<Rational>, Rational)> = lp.objective.as_ref().map(|c| {
        let base: Rational = c.iter().zip(x0.iter()).map(|(p, q)| p * q).sum();
        let red = kernel
            .iter()
            .map(|col| c.iter().zip(col.iter()).map(|(p, q)| p * q).sum())
            .collect();
        (red, base)
    });

    let assemble = |y: &[Rational]| -> Vec<Rational> {
        let mut x = x0.clone();
        for (col, yi) in kernel.iter().zip(y.iter()) {
            if yi.is_zero() {
                continue;
            }
            for (xi, ci) in x.iter_mut().zip(col.iter()) {
                *xi += yi * ci;
            }
        }
        x
    };

    match simplex(d, &rows, objective_y.as_ref().map(|o| o.0.as_slice())) {
        SimplexResult::Infeasible => LpOutcome::Infeasible,
        SimplexResult::Feasible(y) => {
            let x = assemble(&y);
            debug_assert!({
                let mut f = lp.clone();
                f.objective = None;
                f.satisfied_by(&x)
            });
            match &objective_y {
                None => LpOutcome::Feasible(x),
                Some(_) => unreachable!(),
            }
        }
        SimplexResult::Optimal(y) => {
            let x = assemble(&y);
            let (cy, base) = objective_y.unwrap();
            let value: Rational =
                cy.iter().zip(y.iter()).map(|(p, q)| p * q).sum::<Rational>() + base;
            debug_assert!({
                let mut f = lp.clone();
                f.objective = None;
                f.satisfied_by(&x)
            });
            LpOutcome::Optimal { point: x, value }
        }
        SimplexResult::Unbounded(y) => LpOutcome::Unbounded(assemble(&y)),
    }
}

enum SimplexResult {
    Infeasible,
    Feasible(Vec<Rational>),
    Optimal(Vec<Rational>),
    Unbounded(Vec<Rational>),
}

/// Two-phase dense simplex over the rationals on `rows`: a·y ≥ b with free
/// y. Free variables are split into differences of nonnegatives, slacks turn
/// inequalities into equations, artificials seed the basis, and Bland's rule
/// picks pivots in both phases.
fn simplex(d: usize, rows: &[(Vec<Rational>, Rational)], objective: Option<&[Rational]>) -> SimplexResult {
    let m = rows.len();
    if m == 0 {
        // unconstrained: feasible at the origin; any nonzero objective is unbounded
        let y = vec![Rational::zero(); d];
        return match objective {
            None => SimplexResult::Feasible(y),
            Some(c) if c.iter().all(|v| v.is_zero()) => SimplexResult::Optimal(y),
            Some(c) => {
                let dir: Vec<Rational> =
                    c.iter().map(|v| if v.is_zero() { Rational::zero() } else { v.clone() }).collect();
                let _ = dir;
                SimplexResult::Unbounded(y)
            }
        };
    }
    // columns: y+ (d), y- (d), slacks (m), artificials (m)
    let n = 2 * d + m;
    let total = n + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (i, (a, b)) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); total + 1];
        let negate = b.is_negative();
        let sgn = if negate { -Rational::one() } else { Rational::one() };
        for j in 0..d {
            row[j] = &a[j] * &sgn;
            row[d + j] = -&a[j] * &sgn;
        }
        // slack: a·y − s = b
        row[2 * d + i] = -&sgn;
        row[n + i] = Rational::one();
        row[total] = b * &sgn;
        t.push(row);
        basis.push(n + i);
    }

    // phase 1: maximize −Σ artificials
    let mut cost = vec![Rational::zero(); total];
    for j in n..total {
        cost[j] = -Rational::one();
    }
    match run_simplex(&mut t, &mut basis, &cost, total) {
        PhaseEnd::Unbounded => unreachable!("phase-1 objective is bounded above by zero"),
        PhaseEnd::Optimal(value) => {
            if value.is_negative() {
                return SimplexResult::Infeasible;
            }
        }
    }
    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            }
            // a row with no non-artificial support is redundant; its rhs is
            // zero after a feasible phase 1 and it can simply stay
        }
    }

    let read_point = |t: &Vec<Vec<Rational>>, basis: &Vec<usize>| -> Vec<Rational> {
        let mut y = vec![Rational::zero(); d];
        for (i, &b) in basis.iter().enumerate() {
            if b < d {
                y[b] += &t[i][total];
            } else if b < 2 * d {
                y[b - d] -= &t[i][total];
            }
        }
        y
    };

    match objective {
        None => SimplexResult::Feasible(read_point(&t, &basis)),
        Some(c) => {
            let mut cost = vec![Rational::zero(); total];
            for j in 0..d {
                cost[j] = c[j].clone();
                cost[d + j] = -c[j].clone();
            }
            // artificials keep cost zero and are never entered again
            match run_simplex(&mut t, &mut basis, &cost, n) {
                PhaseEnd::Optimal(_) => SimplexResult::Optimal(read_point(&t, &basis)),
                PhaseEnd::Unbounded => SimplexResult::Unbounded(read_point(&t, &basis)),
            }
        }
    }
}

enum PhaseEnd {
    Optimal(Rational),
    Unbounded,
}

/// Maximizes cost·vars with Bland's rule; columns ≥ `enter_limit` never
/// enter the basis. The tableau rows keep basic columns at identity.
fn run_simplex(
    t: &mut Vec<Vec<Rational>>,
    basis: &mut Vec<usize>,
    cost: &[Rational],
    enter_limit: usize,
) -> PhaseEnd {
    let m = t.len();
    let total = cost.len();
    loop {
        // reduced costs r_j = c_j − c_B · column_j
        let mut entering = None;
        for j in 0..enter_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost[j].clone();
            for i in 0..m {
                if !t[i][j].is_zero() && !cost[basis[i]].is_zero() {
                    r -= &cost[basis[i]] * &t[i][j];
                }
            }
            if r.is_positive() {
                entering = Some(j);
                break; // Bland: first improving index
            }
        }
        let Some(j) = entering else {
            let mut value = Rational::zero();
            for i in 0..m {
                if !cost[basis[i]].is_zero() {
                    value += &cost[basis[i]] * &t[i][total];
                }
            }
            return PhaseEnd::Optimal(value);
        };
        // ratio test with Bland tie-breaking on the leaving variable index
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][j].is_positive() {
                let ratio = &t[i][total] / &t[i][j];
                match &leaving {
                    None => leaving = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leaving = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leaving else {
            return PhaseEnd::Unbounded;
        };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut Vec<Vec<Rational>>, basis: &mut Vec<usize>, r: usize, c: usize) {
    let inv = Rational::one() / t[r][c].clone();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v = &*v * &inv;
        }
    }
    for i in 0..t.len() {
        if i == r || t[i][c].is_zero() {
            continue;
        }
        let f = t[i][c].clone();
        let (row_r, row_i) = if i < r {
            let (lo, hi) = t.split_at_mut(r);
            (&hi[0], &mut lo[i])
        } else {
            let (lo, hi) = t.split_at_mut(i);
            (&lo[r], &mut hi[0])
        };
        for (vi, vr) in row_i.iter_mut().zip(row_r.iter()) {
            if !vr.is_zero() {
                *vi -= &f * vr;
            }
        }
    }
    basis[r] = c;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn trivial_feasible() {
        // x ≥ 0, x = 1
        let mut lp = RationalLp::new(1);
        lp.eq(vec![int(1)], int(1));
        lp.nonneg(0);
        assert_eq!(lp_feasible(&lp), Some(vec![int(1)]));
    }

    #[test]
    fn trivial_infeasible() {
        // x ≥ 0, x = −1
        let mut lp = RationalLp::new(1);
        lp.eq(vec![int(1)], int(-1));
        lp.nonneg(0);
        assert_eq!(lp_feasible(&lp), None);
    }

    #[test]
    fn optimal_value_is_exact() {
        // maximize x + y subject to x + 2y ≤ 3, 2x + y ≤ 3, x, y ≥ 0
        let mut lp = RationalLp::new(2);
        lp.ge(vec![int(-1), int(-2)], int(-3));
        lp.ge(vec![int(-2), int(-1)], int(-3));
        lp.nonneg(0);
        lp.nonneg(1);
        lp.objective = Some(vec![int(1), int(1)]);
        match lp_solve(&lp) {
            LpOutcome::Optimal { point, value } => {
                assert_eq!(value, int(2));
                assert_eq!(point, vec![int(1), int(1)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = RationalLp::new(1);
        lp.nonneg(0);
        lp.objective = Some(vec![int(1)]);
        assert!(matches!(lp_solve(&lp), LpOutcome::Unbounded(_)));
    }

    #[test]
    fn degenerate_equalities_reduce() {
        // x + y = 1 twice, x − y = 0, both nonnegative
        let mut lp = RationalLp::new(2);
        lp.eq(vec![int(1), int(1)], int(1));
        lp.eq(vec![int(1), int(1)], int(1));
        lp.eq(vec![int(1), int(-1)], int(0));
        lp.nonneg(0);
        lp.nonneg(1);
        let x = lp_feasible(&lp).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    /// Brute-force oracle: a bounded polytope is nonempty iff some vertex
    /// (top-dimensional intersection of tight constraints) satisfies all
    /// constraints. Used to cross-check the simplex on random boxed systems.
    fn feasible_by_vertex_enumeration(lp: &RationalLp) -> bool {
        use crate::linalg::Matrix;
        let n = lp.num_vars;
        let mut all_rows: Vec<(Vec<Rational>, Rational)> =
            lp.equalities.iter().map(|(r, b)| (super::densify(r, n), b.clone())).collect();
        all_rows.extend(lp.inequalities.iter().map(|(r, b)| (super::densify(r, n), b.clone())));
        let idx: Vec<usize> = (0..all_rows.len()).collect();
        fn subsets(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for (i, &x) in idx.iter().enumerate() {
                for mut rest in subsets(&idx[i + 1..], k - 1) {
                    rest.insert(0, x);
                    out.push(rest);
                }
            }
            out
        }
        for sub in subsets(&idx, n) {
            let a = Matrix::from_rows(sub.iter().map(|&i| all_rows[i].0.clone()).collect());
            let b: Vec<Rational> = sub.iter().map(|&i| all_rows[i].1.clone()).collect();
            if let Ok(Some(x)) = a.solve(&b) {
                if lp.satisfied_by(&x) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn simplex_matches_vertex_enumeration_on_random_boxed_lps() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut feasible_count = 0;
        for _ in 0..100 {
            let n = (next() % 3 + 1) as usize;
            let mut lp = RationalLp::new(n);
            // box −2 ≤ x_i ≤ 2 keeps the region bounded so the vertex oracle
            // is complete
            for i in 0..n {
                let mut c = vec![int(0); n];
                c[i] = int(1);
                lp.ge(c.clone(), int(-2));
                let mut c2 = vec![int(0); n];
                c2[i] = int(-1);
                lp.ge(c2, int(-2));
            }
            let extra = next() % 4;
            for _ in 0..extra {
                let coefs: Vec<Rational> =
                    (0..n).map(|_| int((next() % 5) as i64 - 2)).collect();
                let rhs = int((next() % 7) as i64 - 3);
                if next() % 3 == 0 {
                    lp.eq(coefs, rhs);
                } else {
                    lp.ge(coefs, rhs);
                }
            }
            let simplex_says = lp_feasible(&lp);
            let oracle_says = feasible_by_vertex_enumeration(&lp);
            assert_eq!(simplex_says.is_some(), oracle_says, "lp: {lp:?}");
            if let Some(x) = simplex_says {
                assert!(lp.satisfied_by(&x));
                feasible_count += 1;
            }
        }
        assert!(feasible_count > 10, "sample should contain feasible cases");
        assert!(feasible_count < 100, "sample should contain infeasible cases");
    }

    #[test]
    fn maximin_objective() {
        // maximize t with t ≤ x, t ≤ y, x + y = 1, x,y ≥ 0 → t = 1/2
        let mut lp = RationalLp::new(3);
        lp.eq(vec![int(1), int(1), int(0)], int(1));
        lp.ge(vec![int(1), int(0), int(-1)], int(0));
        lp.ge(vec![int(0), int(1), int(-1)], int(0));
        lp.nonneg(0);
        lp.nonneg(1);
        lp.objective = Some(vec![int(0), int(0), int(1)]);
        match lp_solve(&lp) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
