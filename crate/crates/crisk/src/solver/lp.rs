//! Dense two-phase primal simplex for small linear programs.
//!
//! Problems are stated as `maximize c . x` over free variables subject to
//! inequality rows `a . x <= b`.  Free variables are split into positive
//! parts internally.  Bland's rule keeps the method deterministic and free
//! of cycling; unbounded problems return an improving ray usable as a
//! recession certificate.

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

#[derive(Debug, Clone)]
pub(crate) struct LpProblem {
    /// Number of (free) variables.
    pub n: usize,
    /// Objective to maximize.
    pub objective: Vec<f64>,
    /// Rows `a . x <= b`.
    pub rows: Vec<(Vec<f64>, f64)>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            n: objective.len(),
            objective,
            rows: Vec::new(),
        }
    }

    pub fn leq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.n);
        self.rows.push((coeffs, rhs));
        self
    }

    pub fn geq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.leq(coeffs.iter().map(|c| -c).collect(), -rhs)
    }

    pub fn eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.leq(coeffs.clone(), rhs);
        self.leq(coeffs.iter().map(|c| -c).collect(), -rhs)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum LpSolution {
    Optimal {
        x: Vec<f64>,
        value: f64,
    },
    /// Feasible but unbounded along `ray` (`A ray <= 0`, `c . ray > 0`).
    Unbounded {
        /// The feasible point the certificate ray emanates from.
        #[allow(dead_code)]
        x: Vec<f64>,
        ray: Vec<f64>,
    },
    Infeasible,
    /// The pivot cap was hit without a certificate; callers surface this as
    /// solver non-convergence.
    Stalled,
}

#[cfg(test)]
impl LpSolution {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpSolution::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

struct Tableau {
    /// Constraint rows over all columns.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for j in 0..self.ncols {
                    let delta = factor * self.rows[row][j];
                    self.rows[i][j] -= delta;
                }
                self.rhs[i] -= factor * self.rhs[row];
            }
        }
        self.basis[row] = col;
    }

    fn column_value(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(0.0, |i| self.rhs[i])
    }

    /// Runs primal simplex with Bland's rule on the objective `costs`
    /// (maximization), skipping `banned` columns.
    fn run(&mut self, costs: &[f64], banned: &[bool]) -> RunOutcome {
        for _ in 0..MAX_PIVOTS {
            // reduced costs of nonbasic columns: c_j - c_B . B^-1 A_j
            let mut entering = None;
            for j in 0..self.ncols {
                if banned[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut zj = 0.0;
                for (i, &b) in self.basis.iter().enumerate() {
                    zj += costs[b] * self.rows[i][j];
                }
                if costs[j] - zj > EPS {
                    entering = Some(j);
                    break; // Bland: lowest improving index
                }
            }
            let Some(col) = entering else {
                return RunOutcome::Optimal;
            };
            // ratio test
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > EPS {
                    let ratio = self.rhs[i] / a;
                    let better = match leaving {
                        None => true,
                        Some((best_row, best_ratio)) => {
                            ratio < best_ratio - 1e-12
                                || (ratio < best_ratio + 1e-12
                                    && self.basis[i] < self.basis[best_row])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return RunOutcome::Unbounded(col),
            }
        }
        // Bland's rule cannot cycle in exact arithmetic; report a stall
        // rather than looping forever on a pathological float instance.
        RunOutcome::Stalled
    }
}

enum RunOutcome {
    Optimal,
    Unbounded(usize),
    Stalled,
}

/// Solves the LP.  Deterministic for a fixed input.
pub(crate) fn solve(p: &LpProblem) -> LpSolution {
    let n = p.n;
    let r = p.rows.len();
    // columns: u_0..u_{n-1}, v_0..v_{n-1}, s_0..s_{r-1}, artificials
    let nstruct = 2 * n + r;
    let mut rows = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    let mut needs_artificial = Vec::new();
    for (i, (coeffs, b)) in p.rows.iter().enumerate() {
        let mut row = vec![0.0; nstruct];
        for j in 0..n {
            row[j] = coeffs[j];
            row[n + j] = -coeffs[j];
        }
        row[2 * n + i] = 1.0;
        let mut b = *b;
        if b < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            b = -b;
            needs_artificial.push(i);
        }
        rows.push(row);
        rhs.push(b);
    }
    let nart = needs_artificial.len();
    let ncols = nstruct + nart;
    let mut basis = vec![0usize; r];
    for (a, &i) in needs_artificial.iter().enumerate() {
        for row in rows.iter_mut() {
            row.push(0.0);
        }
        rows[i][nstruct + a] = 1.0;
        basis[i] = nstruct + a;
    }
    for (i, b) in basis.iter_mut().enumerate() {
        if !needs_artificial.contains(&i) {
            *b = 2 * n + i;
        }
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        ncols,
    };

    // Phase 1: drive artificials to zero.
    if nart > 0 {
        let mut costs = vec![0.0; ncols];
        for a in 0..nart {
            costs[nstruct + a] = -1.0;
        }
        let banned = vec![false; ncols];
        match t.run(&costs, &banned) {
            RunOutcome::Optimal => {}
            // the phase-1 objective is bounded above by zero
            RunOutcome::Unbounded(_) | RunOutcome::Stalled => return LpSolution::Stalled,
        }
        let art_sum: f64 = (0..nart).map(|a| t.column_value(nstruct + a)).sum();
        if art_sum > 1e-7 {
            return LpSolution::Infeasible;
        }
        // pivot zero-level artificials out of the basis where possible
        let mut drop_rows = Vec::new();
        for i in 0..t.rows.len() {
            if t.basis[i] >= nstruct {
                let col = (0..nstruct).find(|&j| t.rows[i][j].abs() > EPS);
                match col {
                    Some(j) => t.pivot(i, j),
                    None => drop_rows.push(i), // redundant constraint
                }
            }
        }
        for &i in drop_rows.iter().rev() {
            t.rows.remove(i);
            t.rhs.remove(i);
            t.basis.remove(i);
        }
    }

    // Phase 2: original objective; artificials banned.
    let mut costs = vec![0.0; ncols];
    for j in 0..n {
        costs[j] = p.objective[j];
        costs[n + j] = -p.objective[j];
    }
    let mut banned = vec![false; ncols];
    for a in 0..nart {
        banned[nstruct + a] = true;
    }
    let extract_x = |t: &Tableau| -> Vec<f64> {
        (0..n)
            .map(|j| t.column_value(j) - t.column_value(n + j))
            .collect()
    };
    match t.run(&costs, &banned) {
        RunOutcome::Stalled => LpSolution::Stalled,
        RunOutcome::Optimal => {
            let x = extract_x(&t);
            let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpSolution::Optimal { x, value }
        }
        RunOutcome::Unbounded(entering) => {
            // improving ray: entering column moves up, basics compensate
            let mut d = vec![0.0; ncols];
            d[entering] = 1.0;
            for (i, &b) in t.basis.iter().enumerate() {
                d[b] = -t.rows[i][entering];
            }
            let ray: Vec<f64> = (0..n).map(|j| d[j] - d[n + j]).collect();
            LpSolution::Unbounded {
                x: extract_x(&t),
                ray,
            }
        }
    }
}
