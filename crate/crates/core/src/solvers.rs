//! Exact linear programming and linear algebra over rationals.
//!
//! The simplex implementation is a dense two-phase tableau. The entering
//! column is chosen by most-negative reduced cost, switching permanently to
//! Bland's rule if degenerate pivots pile up, so every solve is fully
//! deterministic and guaranteed to terminate. All arithmetic is
//! arbitrary-precision rational, so returned optima are exact vertices of
//! the feasible region.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rat;
use crate::Result;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One linear constraint `coeffs . x REL rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

/// A linear program over variables that default to `x >= 0`; variables marked
/// free are unbounded in both directions. The objective is maximized.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub maximize: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub free: Vec<bool>,
}

impl LinearProgram {
    pub fn new(maximize: Vec<Rat>) -> Self {
        let n = maximize.len();
        LinearProgram {
            maximize,
            constraints: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<(Rat, Vec<Rat>)> {
        match self {
            LpOutcome::Optimal { value, point } => Ok((value, point)),
            LpOutcome::Infeasible => Err(Error::InfeasibleProgram(
                "expected a bounded optimum".to_string(),
            )),
            LpOutcome::Unbounded => Err(Error::UnexpectedUnbounded),
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    zrow: Vec<Rat>,
    zval: Rat,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        if !inv.is_one() {
            for x in self.rows[row].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            self.rhs[row] = &self.rhs[row] * &inv;
        }
        let (prow, prhs) = (self.rows[row].clone(), self.rhs[row].clone());
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
            self.rhs[i] = &self.rhs[i] - &(&f * &prhs);
        }
        if !self.zrow[col].is_zero() {
            let f = self.zrow[col].clone();
            for (x, p) in self.zrow.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
            self.zval = &self.zval - &(&f * &prhs);
        }
        self.basis[row] = col;
    }

    /// Runs simplex until optimal or unbounded. The entering column is the
    /// most negative reduced cost (lowest index on ties); after a long run
    /// of degenerate pivots the rule switches permanently to Bland's, which
    /// cannot cycle, so termination is guaranteed either way. Returns false
    /// on unboundedness.
    fn optimize(&mut self, allowed_cols: usize) -> bool {
        let stall_limit = 2 * (self.rows.len() + allowed_cols);
        let mut stalled = 0usize;
        let mut bland = false;
        loop {
            let mut entering: Option<usize> = None;
            for j in 0..allowed_cols {
                if !self.zrow[j].is_negative() {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if entering.is_none_or(|best| self.zrow[j] < self.zrow[best]) {
                    entering = Some(j);
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][col];
                let replace = match &leaving {
                    None => true,
                    Some((best, r)) => {
                        ratio < *r || (ratio == *r && self.basis[i] < self.basis[*best])
                    }
                };
                if replace {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, ratio)) = leaving else {
                return false;
            };
            if ratio.is_zero() {
                stalled += 1;
                if stalled >= stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            self.pivot(row, col);
        }
    }
}

/// Solves a linear program exactly. The returned point is a vertex of the
/// feasible region (a basic feasible solution).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.maximize.len();
    if lp.free.len() != n {
        return Err(Error::Dimension(format!(
            "free markers: {} for {} variables",
            lp.free.len(),
            n
        )));
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::Dimension(format!(
                "constraint {i}: {} coefficients for {} variables",
                c.coeffs.len(),
                n
            )));
        }
    }

    // Column layout: split structural columns, then one slack/surplus per
    // inequality row, then artificials for rows that need them.
    let mut col_of_var = Vec::with_capacity(n);
    let mut neg_col_of_var = vec![None; n];
    let mut ncols = 0usize;
    for j in 0..n {
        col_of_var.push(ncols);
        ncols += 1;
        if lp.free[j] {
            neg_col_of_var[j] = Some(ncols);
            ncols += 1;
        }
    }
    let n_struct = ncols;

    let m = lp.constraints.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut rels = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![Rat::zero(); n_struct];
        for j in 0..n {
            if c.coeffs[j].is_zero() {
                continue;
            }
            row[col_of_var[j]] = c.coeffs[j].clone();
            if let Some(neg) = neg_col_of_var[j] {
                row[neg] = -c.coeffs[j].clone();
            }
        }
        let mut b = c.rhs.clone();
        let mut rel = c.rel;
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -std::mem::take(x);
            }
            b = -b;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
        }
        rows.push(row);
        rhs.push(b);
        rels.push(rel);
    }

    let n_slack = rels.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = rels.iter().filter(|r| **r != Relation::Le).count();
    let total = n_struct + n_slack + n_art;
    let mut basis = vec![usize::MAX; m];
    let mut slack_cursor = n_struct;
    let mut art_cursor = n_struct + n_slack;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total, Rat::zero());
        match rels[i] {
            Relation::Le => {
                row[slack_cursor] = Rat::one();
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            Relation::Ge => {
                row[slack_cursor] = -Rat::one();
                slack_cursor += 1;
                row[art_cursor] = Rat::one();
                basis[i] = art_cursor;
                art_cursor += 1;
            }
            Relation::Eq => {
                row[art_cursor] = Rat::one();
                basis[i] = art_cursor;
                art_cursor += 1;
            }
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        zrow: vec![Rat::zero(); total],
        zval: Rat::zero(),
    };

    // Phase 1: maximize minus the sum of artificials.
    if n_art > 0 {
        for j in n_struct + n_slack..total {
            t.zrow[j] = Rat::one();
        }
        for i in 0..m {
            if t.basis[i] >= n_struct + n_slack {
                let f = t.zrow[t.basis[i]].clone();
                debug_assert!(f.is_one());
                for (x, p) in t.zrow.iter_mut().zip(&t.rows[i]) {
                    if !p.is_zero() {
                        *x = &*x - &(&f * p);
                    }
                }
                t.zval = &t.zval - &(&f * &t.rhs[i]);
            }
        }
        if !t.optimize(total) {
            return Err(Error::Invalid(
                "phase-1 objective reported unbounded".to_string(),
            ));
        }
        if !t.zval.is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive any degenerate artificial out of the basis, dropping rows
        // that turn out redundant.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n_struct + n_slack {
                let col = (0..n_struct + n_slack).find(|&j| !t.rows[i][j].is_zero());
                match col {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase 2: original objective over structural and slack columns only.
    let allowed = n_struct + n_slack;
    for row in t.rows.iter_mut() {
        row.truncate(allowed);
    }
    t.zrow = vec![Rat::zero(); allowed];
    t.zval = Rat::zero();
    for j in 0..n {
        t.zrow[col_of_var[j]] = -lp.maximize[j].clone();
        if let Some(neg) = neg_col_of_var[j] {
            t.zrow[neg] = lp.maximize[j].clone();
        }
    }
    for i in 0..t.rows.len() {
        let b = t.basis[i];
        if !t.zrow[b].is_zero() {
            let f = t.zrow[b].clone();
            for (x, p) in t.zrow.iter_mut().zip(&t.rows[i]) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
            t.zval = &t.zval - &(&f * &t.rhs[i]);
        }
    }
    if !t.optimize(allowed) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut ext = vec![Rat::zero(); allowed];
    for (i, &b) in t.basis.iter().enumerate() {
        ext[b] = t.rhs[i].clone();
    }
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = ext[col_of_var[j]].clone();
        if let Some(neg) = neg_col_of_var[j] {
            v = &v - &ext[neg];
        }
        point.push(v);
    }
    Ok(LpOutcome::Optimal {
        value: t.zval,
        point,
    })
}

/// Exact intersection of `k` hyperplanes `normals[i] . q = offsets[i]` in
/// `R^k`. Returns `None` when the system is singular.
pub fn intersect_hyperplanes(normals: &[Vec<Rat>], offsets: &[Rat]) -> Result<Option<Vec<Rat>>> {
    let k = normals.len();
    if offsets.len() != k {
        return Err(Error::Dimension(format!(
            "{k} normals with {} offsets",
            offsets.len()
        )));
    }
    for (i, row) in normals.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Dimension(format!(
                "normal {i} has length {} in dimension {k}",
                row.len()
            )));
        }
    }
    let mut a: Vec<Vec<Rat>> = normals.to_vec();
    let mut b: Vec<Rat> = offsets.to_vec();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero());
        let Some(pivot) = pivot else {
            return Ok(None);
        };
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        b[col] = &b[col] * &inv;
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut a[r][col], Rat::zero());
            for c in col + 1..k {
                if !a[col][c].is_zero() {
                    a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                }
            }
            b[r] = &b[r] - &(&f * &b[col]);
        }
    }
    Ok(Some(b))
}

/// Dot product of equal-length rational slices.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn lp(obj: Vec<Rat>) -> LinearProgram {
        LinearProgram::new(obj)
    }

    #[test]
    fn box_maximum() {
        let mut p = lp(vec![int(1), int(1)]);
        p.constrain(vec![int(1), int(0)], Relation::Le, int(2));
        p.constrain(vec![int(0), int(1)], Relation::Le, int(3));
        let (value, point) = solve_lp(&p).unwrap().optimal().unwrap();
        assert_eq!(value, int(5));
        assert_eq!(point, vec![int(2), int(3)]);
    }

    #[test]
    fn infeasible_detected() {
        let mut p = lp(vec![int(1)]);
        p.constrain(vec![int(1)], Relation::Le, int(-1));
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = lp(vec![int(1)]);
        p.constrain(vec![int(-1)], Relation::Le, int(1));
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // max -t  s.t.  x - t <= 0, x free, x = -5  ->  t = 0? No: t >= x
        // forces t >= -5 but t >= 0 binds, so t = 0 and value 0.
        let mut p = lp(vec![int(0), int(-1)]);
        p.free = vec![true, false];
        p.constrain(vec![int(1), int(-1)], Relation::Le, int(0));
        p.constrain(vec![int(1), int(0)], Relation::Eq, int(-5));
        let (value, point) = solve_lp(&p).unwrap().optimal().unwrap();
        assert_eq!(value, int(0));
        assert_eq!(point[0], int(-5));
        assert_eq!(point[1], int(0));
    }

    #[test]
    fn degenerate_cycling_guarded() {
        // A classic degenerate instance; Bland's rule must terminate.
        let mut p = lp(vec![rat(3, 4), int(-150), rat(1, 50), int(-6)]);
        p.constrain(
            vec![rat(1, 4), int(-60), rat(-1, 25), int(9)],
            Relation::Le,
            int(0),
        );
        p.constrain(
            vec![rat(1, 2), int(-90), rat(-1, 50), int(3)],
            Relation::Le,
            int(0),
        );
        p.constrain(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let (value, _) = solve_lp(&p).unwrap().optimal().unwrap();
        assert_eq!(value, rat(1, 20));
    }

    #[test]
    fn intersection_basic() {
        let point = intersect_hyperplanes(
            &[vec![int(1), int(1)], vec![int(1), int(-1)]],
            &[int(2), int(0)],
        )
        .unwrap()
        .unwrap();
        assert_eq!(point, vec![int(1), int(1)]);
    }

    #[test]
    fn intersection_singular() {
        let out = intersect_hyperplanes(
            &[vec![int(1), int(1)], vec![int(2), int(2)]],
            &[int(2), int(4)],
        )
        .unwrap();
        assert!(out.is_none());
    }

    /// Builds the dual of `max c.x  s.t. A x <= b, x >= 0` as another LP in
    /// primal form: `max -b.y  s.t. -A^T y <= -c, y >= 0`.
    fn dual(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LinearProgram {
        let m = a.len();
        let n = c.len();
        let mut d = LinearProgram::new(b.iter().map(|x| -x.clone()).collect());
        for j in 0..n {
            let coeffs: Vec<Rat> = (0..m).map(|i| -a[i][j].clone()).collect();
            d.constrain(coeffs, Relation::Le, -c[j].clone());
        }
        d
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn duality_gap_is_zero(
            entries in proptest::collection::vec(-4i64..5, 6),
            bs in proptest::collection::vec(0i64..6, 2),
            cs in proptest::collection::vec(-3i64..4, 3),
        ) {
            let a: Vec<Vec<Rat>> = vec![
                entries[..3].iter().map(|&v| int(v)).collect(),
                entries[3..].iter().map(|&v| int(v)).collect(),
            ];
            let b: Vec<Rat> = bs.iter().map(|&v| int(v)).collect();
            let c: Vec<Rat> = cs.iter().map(|&v| int(v)).collect();
            let mut primal = LinearProgram::new(c.clone());
            for i in 0..2 {
                primal.constrain(a[i].clone(), Relation::Le, b[i].clone());
            }
            let p = solve_lp(&primal).unwrap();
            let d = solve_lp(&dual(&a, &b, &c)).unwrap();
            match (p, d) {
                (LpOutcome::Optimal { value: vp, .. }, LpOutcome::Optimal { value: vd, .. }) => {
                    // Dual was negated into max form.
                    prop_assert_eq!(vp, -vd);
                }
                (LpOutcome::Unbounded, d) => prop_assert_eq!(d, LpOutcome::Infeasible),
                (LpOutcome::Infeasible, LpOutcome::Optimal { .. }) => {
                    prop_assert!(false, "primal infeasible but dual bounded-feasible");
                }
                _ => {}
            }
        }

        #[test]
        fn optimum_is_feasible_vertex(
            entries in proptest::collection::vec(-3i64..4, 9),
            bs in proptest::collection::vec(0i64..5, 3),
            cs in proptest::collection::vec(-3i64..4, 3),
        ) {
            let mut p = LinearProgram::new(cs.iter().map(|&v| int(v)).collect());
            for i in 0..3 {
                let row: Vec<Rat> = entries[3 * i..3 * i + 3].iter().map(|&v| int(v)).collect();
                p.constrain(row, Relation::Le, int(bs[i]));
            }
            if let LpOutcome::Optimal { value, point } = solve_lp(&p).unwrap() {
                for (i, c) in p.constraints.iter().enumerate() {
                    prop_assert!(dot(&c.coeffs, &point) <= c.rhs, "constraint {} violated", i);
                }
                for x in &point {
                    prop_assert!(!x.is_negative());
                }
                prop_assert_eq!(dot(&p.maximize, &point), value);
            }
        }
    }
}
