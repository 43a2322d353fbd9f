//! Fenchel conjugates, the robust representation of risk, attainment
//! certificates, the scalarization bridge, and penalty sublevel diagnostics.
//!
//! Dual variables are stored in density form `y` (one value per atom,
//! admissible when `y <= 0` pointwise and `E[y|F] = -1` blockwise); solvers
//! work in the equivalent blockwise-weight form `w_i = -p_i y_i / P(b)`,
//! which lives on a compact probability simplex per block.  Values that can
//! be infinite use a dedicated extended-real representation, never a large
//! float sentinel.

use crate::analysis::cond_expectation;
use crate::error::{Error, Result};
use crate::l0::{CondScalar, ExtCondScalar, ExtReal, RandomVariable};
use crate::risk::{RiskKind, RiskMeasure};
use crate::solver::{ascent, fw, lp};
use crate::space::FilteredSpace;
use rand::Rng;
use serde::Serialize;
use std::cell::RefCell;

/// Tolerance on `E[y|F] = -1` for admissibility.
pub const ADMISSIBILITY_MEAN_TOL: f64 = 1e-9;
/// Slack allowed on the sign constraint `y <= 0`.
pub const ADMISSIBILITY_SIGN_TOL: f64 = 1e-12;
/// Simplex constraints on block weights hold to this tolerance.
pub const WEIGHT_SIMPLEX_TOL: f64 = 1e-12;
/// A representation maximizer certifies attainment when its objective value
/// is within this tolerance of the primal value.
pub const ATTAINMENT_TOL: f64 = 1e-8;

/// Density-form dual variable.  Candidates need not be admissible; the
/// conjugate is `+inf` on blocks where admissibility fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualVariable {
    y: RandomVariable,
}

impl DualVariable {
    pub fn new(y: RandomVariable) -> Self {
        Self { y }
    }

    pub fn y(&self) -> &RandomVariable {
        &self.y
    }

    /// Per-block admissibility: `y <= 0` pointwise and `E[y|F] = -1`.
    pub fn admissible_blocks(&self, space: &FilteredSpace) -> Result<Vec<bool>> {
        if self.y.len() != space.n() {
            return Err(Error::Dimension {
                context: "dual variable",
                expected: space.n(),
                got: self.y.len(),
            });
        }
        let mean = cond_expectation(&self.y, space)?;
        Ok((0..space.m())
            .map(|k| {
                let sign_ok = space
                    .algebra()
                    .block(k)
                    .iter()
                    .all(|&i| self.y.get(i) <= ADMISSIBILITY_SIGN_TOL);
                sign_ok && (mean.get(k) + 1.0).abs() <= ADMISSIBILITY_MEAN_TOL
            })
            .collect())
    }

    pub fn is_admissible(&self, space: &FilteredSpace) -> Result<bool> {
        Ok(self.admissible_blocks(space)?.into_iter().all(|b| b))
    }

    /// Draws an admissible dual variable with weights bounded away from the
    /// simplex boundary.
    pub fn sample_admissible<R: Rng>(space: &FilteredSpace, rng: &mut R) -> Self {
        let weights = (0..space.m())
            .map(|k| {
                let raw: Vec<f64> = (0..space.algebra().block(k).len())
                    .map(|_| rng.gen_range(0.05..1.0))
                    .collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        BlockWeights::new(space, weights)
            .expect("sampled weights satisfy the simplex constraints")
            .to_dual(space)
    }
}

/// Per-block probability weights over block atoms, the solver-side
/// coordinates for dual variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockWeights {
    weights: Vec<Vec<f64>>,
}

impl BlockWeights {
    pub fn new(space: &FilteredSpace, weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.len() != space.m() {
            return Err(Error::Dimension {
                context: "block weights",
                expected: space.m(),
                got: weights.len(),
            });
        }
        for (k, w) in weights.iter().enumerate() {
            if w.len() != space.algebra().block(k).len() {
                return Err(Error::Dimension {
                    context: "block weight entries",
                    expected: space.algebra().block(k).len(),
                    got: w.len(),
                });
            }
            if w.iter().any(|&v| v < -WEIGHT_SIMPLEX_TOL) {
                return Err(Error::Validation {
                    field: "block weights",
                    index: Some(k),
                    message: "weights must be nonnegative".into(),
                });
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_SIMPLEX_TOL {
                return Err(Error::Validation {
                    field: "block weights",
                    index: Some(k),
                    message: format!("weights sum to {sum}, expected 1"),
                });
            }
        }
        Ok(Self { weights })
    }

    /// The conditional probabilities themselves (the barycentric density).
    pub fn conditional(space: &FilteredSpace) -> Self {
        Self {
            weights: (0..space.m()).map(|k| space.block_cond_probs(k)).collect(),
        }
    }

    /// Change of variables from an admissible dual variable:
    /// `w_i = -p_i y_i / P(b)`.
    pub fn from_dual(dual: &DualVariable, space: &FilteredSpace) -> Result<Self> {
        let blocks = dual.admissible_blocks(space)?;
        if let Some(k) = blocks.iter().position(|&ok| !ok) {
            return Err(Error::Validation {
                field: "dual variable",
                index: Some(k),
                message: "not admissible on this block".into(),
            });
        }
        let weights = (0..space.m())
            .map(|k| {
                let pb = space.algebra().block_prob(k);
                space
                    .algebra()
                    .block(k)
                    .iter()
                    .map(|&i| (-space.atoms().prob(i) * dual.y().get(i) / pb).max(0.0))
                    .collect()
            })
            .collect();
        Ok(Self { weights })
    }

    /// Inverse change of variables: `y_i = -w_i P(b) / p_i`.
    pub fn to_dual(&self, space: &FilteredSpace) -> DualVariable {
        let mut y = vec![0.0; space.n()];
        for (k, w) in self.weights.iter().enumerate() {
            let pb = space.algebra().block_prob(k);
            for (j, &i) in space.algebra().block(k).iter().enumerate() {
                y[i] = -w[j] * pb / space.atoms().prob(i);
            }
        }
        DualVariable::new(RandomVariable::new(y).expect("finite weights"))
    }

    pub fn block(&self, k: usize) -> &[f64] {
        &self.weights[k]
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

/// Weights of a dual candidate on one block, clamped and renormalized.
fn weights_on_block(y: &RandomVariable, space: &FilteredSpace, k: usize) -> Vec<f64> {
    let pb = space.algebra().block_prob(k);
    let mut w: Vec<f64> = space
        .algebra()
        .block(k)
        .iter()
        .map(|&i| (-space.atoms().prob(i) * y.get(i) / pb).max(0.0))
        .collect();
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        for v in &mut w {
            *v /= sum;
        }
    }
    w
}

/// Relative entropy `KL(w || q)` in nats, with `0 ln 0 = 0`.
fn relative_entropy(w: &[f64], q: &[f64]) -> f64 {
    w.iter()
        .zip(q)
        .map(|(&wi, &qi)| if wi > 0.0 { wi * (wi / qi).ln() } else { 0.0 })
        .sum()
}

/// The penalty of a measure evaluated at block weights: the conjugate in
/// weight coordinates.  Closed forms for the entropic, worst-case and AV@R
/// families; the oracle itself for penalty measures; a concave ascent on the
/// defining supremum for custom evaluators.
pub(crate) fn measure_penalty(
    measure: &RiskMeasure,
    space: &FilteredSpace,
    k: usize,
    w: &[f64],
) -> ExtReal {
    match measure.kind() {
        RiskKind::Entropic { gamma } => {
            let q = space.block_cond_probs(k);
            ExtReal::Finite(relative_entropy(w, &q) / gamma)
        }
        RiskKind::WorstCase => ExtReal::Finite(0.0),
        RiskKind::Avar { lambda } => {
            let q = space.block_cond_probs(k);
            let inside = w.iter().zip(&q).all(|(&wi, &qi)| wi <= qi / lambda + 1e-9);
            if inside {
                ExtReal::Finite(0.0)
            } else {
                ExtReal::PosInf
            }
        }
        RiskKind::Penalty(oracle) => oracle.eval(k, w),
        RiskKind::Custom(_) => {
            conjugate_by_ascent(measure, space, k, w, &ascent::AscentOptions::default())
        }
    }
}

/// `sup_x  -sum_j w_j x_j - rho_b(x)` by concave ascent over the block's
/// coordinates (Danskin direction for custom conjugates).
fn conjugate_by_ascent(
    measure: &RiskMeasure,
    space: &FilteredSpace,
    k: usize,
    w: &[f64],
    opts: &ascent::AscentOptions,
) -> ExtReal {
    let block = space.algebra().block(k).to_vec();
    let objective = |xb: &[f64]| -> f64 {
        let mut full = vec![0.0; space.n()];
        for (j, &i) in block.iter().enumerate() {
            full[i] = xb[j];
        }
        let Ok(x) = RandomVariable::new(full) else {
            return f64::NEG_INFINITY;
        };
        let Ok(rho) = measure.eval(&x, space) else {
            return f64::NEG_INFINITY;
        };
        let pairing: f64 = w.iter().zip(xb).map(|(wi, xi)| -wi * xi).sum();
        pairing - rho.get(k)
    };
    let result = ascent::maximize(&objective, &vec![0.0; block.len()], opts);
    if result.diverged {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(result.value)
    }
}

/// Fenchel conjugate of the measure at a dual candidate: `+inf` on blocks
/// where admissibility fails, otherwise `sup_x E[xy|F] - rho(x)` per block.
pub fn conjugate(
    measure: &RiskMeasure,
    candidate: &DualVariable,
    space: &FilteredSpace,
) -> Result<ExtCondScalar> {
    let admissible = candidate.admissible_blocks(space)?;
    let mut values = Vec::with_capacity(space.m());
    for (k, &ok) in admissible.iter().enumerate() {
        if !ok {
            values.push(ExtReal::PosInf);
            continue;
        }
        let w = weights_on_block(candidate.y(), space, k);
        let value = match measure.kind() {
            RiskKind::Entropic { .. } | RiskKind::WorstCase => {
                measure_penalty(measure, space, k, &w)
            }
            RiskKind::Avar { lambda } => avar_conjugate_lp(*lambda, candidate.y(), space, k)?,
            RiskKind::Penalty(_) | RiskKind::Custom(_) => {
                conjugate_by_ascent(measure, space, k, &w, &ascent::AscentOptions::default())
            }
        };
        values.push(value);
    }
    Ok(ExtCondScalar::new(values))
}

/// AV@R conjugate by linear programming: the joint epigraph LP over a unit
/// box decides whether the positively homogeneous objective can be positive
/// (then the supremum is `+inf`), otherwise the conjugate is zero.
fn avar_conjugate_lp(
    lambda: f64,
    y: &RandomVariable,
    space: &FilteredSpace,
    k: usize,
) -> Result<ExtReal> {
    let block = space.algebra().block(k);
    let d = block.len();
    // variables: x_0..x_{d-1}, t, u_0..u_{d-1}
    let nvars = 2 * d + 1;
    let mut objective = vec![0.0; nvars];
    for (j, &i) in block.iter().enumerate() {
        objective[j] = space.cond_prob(i) * y.get(i);
        objective[d + 1 + j] = -space.cond_prob(i) / lambda;
    }
    objective[d] = -1.0;
    let mut p = lp::LpProblem::new(objective);
    for j in 0..d {
        // u_j >= 0 and u_j >= -x_j - t
        let mut row = vec![0.0; nvars];
        row[d + 1 + j] = 1.0;
        p.geq(row.clone(), 0.0);
        let mut row = vec![0.0; nvars];
        row[d + 1 + j] = 1.0;
        row[j] = 1.0;
        row[d] = 1.0;
        p.geq(row, 0.0);
        // |x_j| <= 1
        let mut row = vec![0.0; nvars];
        row[j] = 1.0;
        p.leq(row.clone(), 1.0);
        p.geq(row, -1.0);
    }
    match lp::solve(&p) {
        lp::LpSolution::Optimal { value, .. } => Ok(if value > 1e-9 {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(0.0)
        }),
        lp::LpSolution::Unbounded { .. } => Ok(ExtReal::PosInf),
        lp::LpSolution::Infeasible | lp::LpSolution::Stalled => Err(Error::SolverNonConvergence {
            block: k,
            residual: f64::NAN,
        }),
    }
}

/// How a representation maximizer was certified.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Closed-form density (entropic Gibbs weights).
    ClosedFormDensity,
    /// Unit mass on one atom.
    Vertex { atom: usize },
    /// LP solution supported on the listed atoms.
    Support { atoms: Vec<usize> },
    /// Iterative solve with its final duality gap.
    Iterative { iterations: usize, gap: f64 },
}

/// Result of the robust representation solve.
#[derive(Debug, Clone, Serialize)]
pub struct RepresentationResult {
    /// Blockwise optimal value of `E_w[-x] - penalty(w)`.
    pub value: CondScalar,
    /// The maximizing dual variable in density form.
    pub maximizer: DualVariable,
    /// `|value - rho(x)|` per block; never hidden.
    pub gap: CondScalar,
    /// Iterations spent per block (zero for closed forms and direct LPs).
    pub iterations: Vec<usize>,
    #[serde(skip)]
    pub(crate) weights: BlockWeights,
    pub certificates: Vec<Certificate>,
}

/// Solves the representation problem `max_w E_w[-x] - penalty(w)` blockwise
/// and reports the gap against the direct evaluation.
pub fn represent(
    measure: &RiskMeasure,
    x: &RandomVariable,
    space: &FilteredSpace,
) -> Result<RepresentationResult> {
    if x.len() != space.n() {
        return Err(Error::Dimension {
            context: "representation",
            expected: space.n(),
            got: x.len(),
        });
    }
    let primal = measure.eval(x, space)?;
    let mut values = Vec::with_capacity(space.m());
    let mut weights = Vec::with_capacity(space.m());
    let mut iterations = Vec::with_capacity(space.m());
    let mut certificates = Vec::with_capacity(space.m());

    for k in 0..space.m() {
        let block = space.algebra().block(k);
        let losses: Vec<f64> = block.iter().map(|&i| -x.get(i)).collect();
        match measure.kind() {
            RiskKind::Entropic { gamma } => {
                let q = space.block_cond_probs(k);
                let z_max = losses
                    .iter()
                    .map(|l| gamma * l)
                    .fold(f64::NEG_INFINITY, f64::max);
                let raw: Vec<f64> = q
                    .iter()
                    .zip(&losses)
                    .map(|(&qi, &l)| qi * (gamma * l - z_max).exp())
                    .collect();
                let z: f64 = raw.iter().sum();
                let w: Vec<f64> = raw.into_iter().map(|v| v / z).collect();
                let value = expected_loss(&w, &losses) - relative_entropy(&w, &q) / gamma;
                values.push(value);
                weights.push(w);
                iterations.push(0);
                certificates.push(Certificate::ClosedFormDensity);
            }
            RiskKind::WorstCase => {
                let mut best = 0usize;
                for (j, &l) in losses.iter().enumerate() {
                    if l > losses[best] {
                        best = j; // strict: ties keep the lowest index
                    }
                }
                let mut w = vec![0.0; block.len()];
                w[best] = 1.0;
                values.push(losses[best]);
                weights.push(w);
                iterations.push(0);
                certificates.push(Certificate::Vertex { atom: block[best] });
            }
            RiskKind::Avar { lambda } => {
                let q = space.block_cond_probs(k);
                let d = block.len();
                let mut p = lp::LpProblem::new(losses.clone());
                p.eq(vec![1.0; d], 1.0);
                for j in 0..d {
                    let mut row = vec![0.0; d];
                    row[j] = 1.0;
                    p.geq(row.clone(), 0.0);
                    p.leq(row, q[j] / lambda);
                }
                let (w, value) = match lp::solve(&p) {
                    lp::LpSolution::Optimal { x, value } => (x, value),
                    _ => {
                        return Err(Error::SolverNonConvergence {
                            block: k,
                            residual: f64::NAN,
                        })
                    }
                };
                let support: Vec<usize> = block
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| w[*j] > 1e-9)
                    .map(|(_, &i)| i)
                    .collect();
                certificates.push(if support.len() == 1 {
                    Certificate::Vertex { atom: support[0] }
                } else {
                    Certificate::Support { atoms: support }
                });
                values.push(value);
                weights.push(clamp_simplex(w));
                iterations.push(0);
            }
            RiskKind::Penalty(oracle) => {
                let concave = |w: &[f64]| oracle.eval(k, w).mul_scalar(-1.0).to_f64();
                let grad_holder = oracle.grad_fn(k);
                let neg_grad;
                let problem = fw::SimplexProblem {
                    linear: &losses,
                    concave: &concave,
                    concave_grad: match &grad_holder {
                        Some(g) => {
                            neg_grad =
                                move |w: &[f64]| g(w).iter().map(|v| -v).collect::<Vec<f64>>();
                            Some(&neg_grad)
                        }
                        None => None,
                    },
                };
                let opts = fw::FwOptions {
                    gap_tol: oracle.tol(),
                    ..Default::default()
                };
                let result = match fw::maximize(&problem, None, &opts) {
                    Err(fw::FwError::NoFiniteStart) => {
                        return Err(Error::InfeasiblePenalty { block: k })
                    }
                    Ok(r) => r,
                };
                if !result.converged && result.gap > oracle.tol() * 100.0 {
                    return Err(Error::SolverNonConvergence {
                        block: k,
                        residual: result.gap,
                    });
                }
                values.push(result.value);
                weights.push(clamp_simplex(result.w));
                iterations.push(result.iterations);
                certificates.push(Certificate::Iterative {
                    iterations: result.iterations,
                    gap: result.gap,
                });
            }
            RiskKind::Custom(_) => {
                // Frank-Wolfe on E_w[-x] - rho*(y(w)); the conjugate and its
                // Danskin gradient come from a warm-started inner ascent.
                let warm: RefCell<Vec<f64>> = RefCell::new(vec![0.0; block.len()]);
                let inner_opts = ascent::AscentOptions {
                    max_iters: 500,
                    ..Default::default()
                };
                let solve_inner = |w: &[f64]| -> (f64, Vec<f64>) {
                    let block_atoms = space.algebra().block(k).to_vec();
                    let objective = |xb: &[f64]| -> f64 {
                        let mut full = vec![0.0; space.n()];
                        for (j, &i) in block_atoms.iter().enumerate() {
                            full[i] = xb[j];
                        }
                        let Ok(xv) = RandomVariable::new(full) else {
                            return f64::NEG_INFINITY;
                        };
                        let Ok(rho) = measure.eval(&xv, space) else {
                            return f64::NEG_INFINITY;
                        };
                        let pairing: f64 = w.iter().zip(xb).map(|(wi, xi)| -wi * xi).sum();
                        pairing - rho.get(k)
                    };
                    let start = warm.borrow().clone();
                    let result = ascent::maximize(&objective, &start, &inner_opts);
                    if result.diverged {
                        (f64::INFINITY, result.x)
                    } else {
                        *warm.borrow_mut() = result.x.clone();
                        (result.value, result.x)
                    }
                };
                let concave = |w: &[f64]| -solve_inner(w).0;
                let danskin = |w: &[f64]| solve_inner(w).1;
                let problem = fw::SimplexProblem {
                    linear: &losses,
                    concave: &concave,
                    concave_grad: Some(&danskin),
                };
                let opts = fw::FwOptions {
                    max_iters: 1_000,
                    gap_tol: 1e-8,
                };
                let result = match fw::maximize(&problem, None, &opts) {
                    Err(fw::FwError::NoFiniteStart) => {
                        return Err(Error::InfeasiblePenalty { block: k })
                    }
                    Ok(r) => r,
                };
                values.push(result.value);
                weights.push(clamp_simplex(result.w));
                iterations.push(result.iterations);
                certificates.push(Certificate::Iterative {
                    iterations: result.iterations,
                    gap: result.gap,
                });
            }
        }
    }

    let value = CondScalar::new(values)?;
    let gap = CondScalar::new(
        (0..space.m())
            .map(|k| (value.get(k) - primal.get(k)).abs())
            .collect(),
    )?;
    let weights = BlockWeights { weights };
    Ok(RepresentationResult {
        maximizer: weights.to_dual(space),
        value,
        gap,
        iterations,
        weights,
        certificates,
    })
}

fn expected_loss(w: &[f64], losses: &[f64]) -> f64 {
    w.iter().zip(losses).map(|(a, b)| a * b).sum()
}

fn clamp_simplex(mut w: Vec<f64>) -> Vec<f64> {
    let mut sum = 0.0;
    for v in &mut w {
        if *v < 0.0 {
            *v = 0.0;
        }
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Attainment report: does the representation maximizer achieve the primal
/// value on every block?
#[derive(Debug, Clone, Serialize)]
pub struct AttainmentReport {
    pub attained: Vec<bool>,
    /// `|E_w[-x] - penalty(w) - rho(x)|` at the witness, per block.
    pub residual: CondScalar,
    pub tolerance: f64,
    pub witness: Option<DualVariable>,
    pub certificates: Vec<Certificate>,
}

/// Checks attainment of the robust representation at `x` by re-evaluating
/// the witness objective against the direct evaluation, at the default
/// tolerance [`ATTAINMENT_TOL`].
pub fn attainment_check(
    measure: &RiskMeasure,
    x: &RandomVariable,
    space: &FilteredSpace,
) -> Result<AttainmentReport> {
    attainment_check_with(measure, x, space, ATTAINMENT_TOL)
}

/// Same as [`attainment_check`] with an explicit tolerance.
pub fn attainment_check_with(
    measure: &RiskMeasure,
    x: &RandomVariable,
    space: &FilteredSpace,
    tolerance: f64,
) -> Result<AttainmentReport> {
    let representation = represent(measure, x, space)?;
    let primal = measure.eval(x, space)?;
    let mut residuals = Vec::with_capacity(space.m());
    let mut attained = Vec::with_capacity(space.m());
    for k in 0..space.m() {
        let block = space.algebra().block(k);
        let losses: Vec<f64> = block.iter().map(|&i| -x.get(i)).collect();
        let w = representation.weights.block(k);
        let objective = match measure_penalty(measure, space, k, w) {
            ExtReal::Finite(alpha) => expected_loss(w, &losses) - alpha,
            // an infinite penalty at the witness can never attain
            _ => f64::NEG_INFINITY,
        };
        let residual = (objective - primal.get(k)).abs();
        attained.push(residual <= tolerance);
        residuals.push(if residual.is_finite() {
            residual
        } else {
            f64::MAX
        });
    }
    Ok(AttainmentReport {
        attained,
        residual: CondScalar::new(residuals)?,
        tolerance,
        witness: Some(representation.maximizer.clone()),
        certificates: representation.certificates.clone(),
    })
}

/// The scalarized (static) risk functional `x -> E_P[rho(x)]`.
pub struct ScalarizedRisk<'a> {
    measure: &'a RiskMeasure,
    space: &'a FilteredSpace,
}

/// Builds the scalarization of a conditional measure.
pub fn scalarize<'a>(measure: &'a RiskMeasure, space: &'a FilteredSpace) -> ScalarizedRisk<'a> {
    ScalarizedRisk { measure, space }
}

impl ScalarizedRisk<'_> {
    pub fn eval(&self, x: &RandomVariable) -> Result<f64> {
        let blockwise = self.measure.eval(x, self.space)?;
        Ok((0..self.space.m())
            .map(|k| self.space.algebra().block_prob(k) * blockwise.get(k))
            .sum())
    }

    /// Conjugate of the scalarized functional at `y`, by concave ascent on
    /// `E_P[xy] - rho'(x)` over the full space.
    pub fn conjugate(&self, y: &RandomVariable) -> Result<f64> {
        let space = self.space;
        let objective = |xv: &[f64]| -> f64 {
            let Ok(x) = RandomVariable::new(xv.to_vec()) else {
                return f64::NEG_INFINITY;
            };
            let pairing: f64 = (0..space.n())
                .map(|i| space.atoms().prob(i) * xv[i] * y.get(i))
                .sum();
            match self.eval(&x) {
                Ok(v) => pairing - v,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let result = ascent::maximize(
            &objective,
            &vec![0.0; space.n()],
            &ascent::AscentOptions::default(),
        );
        if result.diverged {
            return Err(Error::SolverNonConvergence {
                block: 0,
                residual: f64::INFINITY,
            });
        }
        Ok(result.value)
    }
}

/// One sample of the scalarization identity check.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarIdentitySample {
    /// `E_P[conjugate(rho, y)]`.
    pub expected_conjugate: f64,
    /// `(rho')*(y)` by independent concave ascent.
    pub scalar_conjugate: f64,
    pub residual: f64,
}

/// Report of the identity `E_P[rho*(y)] = (rho')*(y)` over sampled
/// admissible dual variables.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarIdentityReport {
    pub samples: Vec<ScalarIdentitySample>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Checks the scalarization identity on `samples` admissible duals drawn
/// from `seed`.
pub fn scalar_conjugate_identity_check(
    measure: &RiskMeasure,
    space: &FilteredSpace,
    samples: usize,
    seed: u64,
) -> Result<ScalarIdentityReport> {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let scalarized = scalarize(measure, space);
    let mut out = Vec::with_capacity(samples);
    let tolerance = 1e-6;
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let dual = DualVariable::sample_admissible(space, &mut rng);
        let conj = conjugate(measure, &dual, space)?;
        let expected_conjugate: f64 = (0..space.m())
            .map(|k| {
                space.algebra().block_prob(k)
                    * conj
                        .get(k)
                        .finite()
                        .expect("admissible dual has finite conjugate")
            })
            .sum();
        let scalar_conjugate = scalarized.conjugate(dual.y())?;
        let residual = (expected_conjugate - scalar_conjugate).abs();
        max_residual = max_residual.max(residual);
        out.push(ScalarIdentitySample {
            expected_conjugate,
            scalar_conjugate,
            residual,
        });
    }
    Ok(ScalarIdentityReport {
        samples: out,
        max_residual,
        tolerance,
        pass: max_residual <= tolerance,
        seed,
    })
}

/// Diagnostics of the penalty sublevel set `{w : penalty(w) <= c}` per
/// block.  On a finite space the set is always compact; nonemptiness and the
/// probed diameter are the informative parts.
#[derive(Debug, Clone, Serialize)]
pub struct SublevelReport {
    pub nonempty: Vec<bool>,
    /// Always true on finite spaces; reported for the record.
    pub bounded: Vec<bool>,
    /// Euclidean diameter of the probed feasible points.
    pub diameter: Vec<f64>,
    pub probes: Vec<usize>,
}

/// Probes the sublevel sets of the measure's penalty at level `c` on a grid
/// over each block simplex, plus the vertices and the conditional density.
pub fn sublevel_diagnostics(
    measure: &RiskMeasure,
    c: &CondScalar,
    space: &FilteredSpace,
) -> Result<SublevelReport> {
    c.check_len(space.m(), "sublevel level")?;
    let mut nonempty = Vec::with_capacity(space.m());
    let mut diameter = Vec::with_capacity(space.m());
    let mut probes_out = Vec::with_capacity(space.m());
    for k in 0..space.m() {
        let d = space.algebra().block(k).len();
        let expensive = matches!(measure.kind(), RiskKind::Custom(_));
        let mut probes = simplex_grid(d, grid_resolution(d, expensive));
        probes.push(space.block_cond_probs(k));
        let mut feasible: Vec<&Vec<f64>> = Vec::new();
        for w in &probes {
            match measure_penalty(measure, space, k, w) {
                ExtReal::Finite(alpha) if alpha <= c.get(k) + 1e-12 => feasible.push(w),
                ExtReal::NegInf => feasible.push(w),
                _ => {}
            }
        }
        nonempty.push(!feasible.is_empty());
        let mut diam = 0.0f64;
        for (a, wa) in feasible.iter().enumerate() {
            for wb in feasible.iter().skip(a + 1) {
                let dist: f64 = wa
                    .iter()
                    .zip(wb.iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                diam = diam.max(dist);
            }
        }
        diameter.push(diam);
        probes_out.push(probes.len());
    }
    Ok(SublevelReport {
        bounded: vec![true; space.m()],
        nonempty,
        diameter,
        probes: probes_out,
    })
}

fn grid_resolution(dim: usize, expensive: bool) -> usize {
    // diameter quantization error is about 2 sqrt(2) / steps
    let base = match dim {
        0 | 1 => 1,
        2 => 400,
        3 => 100,
        4 => 30,
        5 => 15,
        6 => 10,
        _ => 6,
    };
    if expensive {
        base.min(6)
    } else {
        base
    }
}

/// All points of the simplex in `R^dim` with coordinates that are multiples
/// of `1/steps`.
pub(crate) fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; dim];
    fn recurse(
        out: &mut Vec<Vec<f64>>,
        current: &mut Vec<usize>,
        pos: usize,
        left: usize,
        steps: usize,
    ) {
        if pos + 1 == current.len() {
            current[pos] = left;
            out.push(current.iter().map(|&c| c as f64 / steps as f64).collect());
            return;
        }
        for take in 0..=left {
            current[pos] = take;
            recurse(out, current, pos + 1, left - take, steps);
        }
    }
    if dim == 0 {
        return out;
    }
    recurse(&mut out, &mut current, 0, steps, steps);
    out
}
