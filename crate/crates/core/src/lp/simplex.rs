//! Dense two-phase simplex for small problems of the form
//! `maximize c·x subject to A x ≤ b`, with `x` free.
//!
//! The solver works on the dual standard form `minimize bᵀy subject to
//! Aᵀy = c, y ≥ 0`, which has one equality row per primal variable. For the
//! bounding programs here that is 16 rows no matter how many facets the
//! polytope has. Primal values are the simplex multipliers of those rows,
//! read off the reduced costs of the phase-one artificial columns.

use thiserror::Error;

/// Pivot and feasibility tolerance.
pub const SIMPLEX_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 100_000;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("simplex did not converge within {0} iterations")]
    IterationLimit(usize),
    #[error("non-finite value in problem data")]
    NonFinite,
    #[error("constraint matrix has {found} columns, expected {expected}")]
    Shape { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows × (cols + 1)`; last column is the right-hand side.
    t: Vec<Vec<f64>>,
    /// Reduced costs, `cols + 1` entries; last entry is minus the objective.
    d: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r][c];
        for j in 0..w {
            self.t[r][j] /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..w {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for j in 0..w {
                self.d[j] -= f * pivot_row[j];
            }
            self.d[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current cost row. Columns with
    /// `allowed[j] == false` never enter. Returns `false` on unboundedness.
    fn optimize(&mut self, allowed: &[bool]) -> Result<bool, SimplexError> {
        let mut bland = false;
        let mut streak = 0usize;
        for _ in 0..MAX_ITERS {
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && self.d[j] < -SIMPLEX_TOL)
            } else {
                (0..self.cols)
                    .filter(|&j| allowed[j] && self.d[j] < -SIMPLEX_TOL)
                    .min_by(|&a, &b| self.d[a].total_cmp(&self.d[b]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[c];
                if a > SIMPLEX_TOL {
                    let ratio = row[self.cols] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - SIMPLEX_TOL
                                || (ratio <= br + SIMPLEX_TOL && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = best else {
                return Ok(false);
            };
            if ratio <= SIMPLEX_TOL {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
        Err(SimplexError::IterationLimit(MAX_ITERS))
    }
}

/// Maximizes `c·x` over `{x : A x ≤ b}`.
///
/// `Unbounded` is returned when the objective has no finite maximum and
/// `Infeasible` when the constraint set is empty. A problem that is both
/// infeasible and would be unbounded reports `Infeasible`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpStatus, SimplexError> {
    let n = c.len();
    let m = b.len();
    if a.len() != m {
        return Err(SimplexError::Shape {
            expected: m,
            found: a.len(),
        });
    }
    for row in a {
        if row.len() != n {
            return Err(SimplexError::Shape {
                expected: n,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(SimplexError::NonFinite);
        }
    }
    if c.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(SimplexError::NonFinite);
    }

    // Dual rows: for each primal variable i, Σ_k A[k][i] y_k = c_i.
    // Columns 0..m are y, columns m..m+n are artificials.
    let cols = m + n;
    let mut sign = vec![1.0; n];
    let mut t = vec![vec![0.0; cols + 1]; n];
    for i in 0..n {
        sign[i] = if c[i] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..m {
            t[i][k] = sign[i] * a[k][i];
        }
        t[i][m + i] = 1.0;
        t[i][cols] = sign[i] * c[i];
    }
    let mut d = vec![0.0; cols + 1];
    for row in &t {
        for k in 0..m {
            d[k] -= row[k];
        }
        d[cols] -= row[cols];
    }
    let mut tab = Tableau {
        t,
        d,
        basis: (m..m + n).collect(),
        cols,
    };

    let all = vec![true; cols];
    tab.optimize(&all)?;
    let phase1 = -tab.d[cols];
    if phase1 > SIMPLEX_TOL * (1.0 + c.iter().map(|v| v.abs()).sum::<f64>()) {
        // The dual is infeasible, so the primal is infeasible or unbounded.
        // Decide by testing primal feasibility with a zero objective.
        return if c.iter().all(|&v| v == 0.0) {
            Ok(LpStatus::Infeasible)
        } else {
            match maximize(&vec![0.0; n], a, b)? {
                LpStatus::Infeasible => Ok(LpStatus::Infeasible),
                _ => Ok(LpStatus::Unbounded),
            }
        };
    }

    // Drive zero-level artificials out of the basis where possible.
    for r in 0..n {
        if tab.basis[r] >= m {
            if let Some(col) = (0..m).max_by(|&x, &y| tab.t[r][x].abs().total_cmp(&tab.t[r][y].abs())) {
                if tab.t[r][col].abs() > SIMPLEX_TOL {
                    tab.pivot(r, col);
                }
            }
        }
    }

    // Phase two cost row: minimize bᵀy.
    let mut d = vec![0.0; cols + 1];
    d[..m].copy_from_slice(b);
    for (r, row) in tab.t.iter().enumerate() {
        let cb = if tab.basis[r] < m { b[tab.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..=cols {
                d[j] -= cb * row[j];
            }
        }
    }
    tab.d = d;
    let mut allowed = vec![true; cols];
    allowed[m..].iter_mut().for_each(|v| *v = false);
    if !tab.optimize(&allowed)? {
        return Ok(LpStatus::Infeasible);
    }
    let objective = -tab.d[cols];
    let x = (0..n).map(|i| -sign[i] * tab.d[m + i]).collect();
    Ok(LpStatus::Optimal(LpSolution { objective, x }))
}
