//! Conditional convex risk measures: blockwise evaluators from bounded
//! positions to conditional scalars, with built-in entropic, worst-case,
//! average-value-at-risk and penalty-defined families, plus a randomized
//! axiom checker.
//!
//! Evaluators are total on finite vectors.  `rho(0) = 0` is *not* enforced;
//! the axiom report states `rho(0)` instead.

use crate::analysis::{cond_norm, Lp};
use crate::error::{Error, Result};
use crate::l0::{CondScalar, ExtReal, RandomVariable};
use crate::solver::fw;
use crate::space::{Condition, FilteredSpace};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

/// Monotonicity and cash-invariance must hold to near machine precision.
pub const MONOTONICITY_TOL: f64 = 1e-12;
pub const CASH_INVARIANCE_TOL: f64 = 1e-12;
/// Convexity and the Lipschitz bound tolerate mild float noise.
pub const CONVEXITY_TOL: f64 = 1e-10;
pub const LIPSCHITZ_TOL: f64 = 1e-10;
pub const LOCALITY_TOL: f64 = 1e-12;

type PenaltyFn = Arc<dyn Fn(usize, &[f64]) -> ExtReal + Send + Sync>;
type PenaltyGradFn = Arc<dyn Fn(usize, &[f64]) -> Vec<f64> + Send + Sync>;
type EvaluatorFn = Arc<dyn Fn(&RandomVariable, &FilteredSpace) -> Result<CondScalar> + Send + Sync>;

/// Blockwise penalty: a proper extended-real function of probability weights
/// on each block, used by penalty-defined measures and by sublevel
/// diagnostics.
#[derive(Clone)]
pub struct PenaltyOracle {
    eval: PenaltyFn,
    grad: Option<PenaltyGradFn>,
    tol: f64,
}

impl PenaltyOracle {
    pub fn new(eval: impl Fn(usize, &[f64]) -> ExtReal + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            grad: None,
            tol: 1e-8,
        }
    }

    /// Attaches an exact gradient, sharpening the solver's gap certificate.
    pub fn with_grad(
        mut self,
        grad: impl Fn(usize, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn eval(&self, block: usize, weights: &[f64]) -> ExtReal {
        (self.eval)(block, weights)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub(crate) fn grad_fn(&self, block: usize) -> Option<impl Fn(&[f64]) -> Vec<f64> + '_> {
        self.grad
            .as_ref()
            .map(move |g| move |w: &[f64]| g(block, w))
    }
}

impl std::fmt::Debug for PenaltyOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PenaltyOracle")
            .field("tol", &self.tol)
            .field("has_grad", &self.grad.is_some())
            .finish()
    }
}

/// A user-supplied evaluator.
#[derive(Clone)]
pub struct CustomRisk {
    name: String,
    eval: EvaluatorFn,
}

impl CustomRisk {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&RandomVariable, &FilteredSpace) -> Result<CondScalar> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl std::fmt::Debug for CustomRisk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomRisk")
            .field("name", &self.name)
            .finish()
    }
}

/// The measure families.
#[derive(Debug, Clone)]
pub enum RiskKind {
    /// `(1/gamma) log E[exp(-gamma x) | F]`, `gamma > 0`.
    Entropic { gamma: f64 },
    /// Blockwise maximum loss.
    WorstCase,
    /// Average value at risk at level `lambda` in `(0, 1]`
    /// (Rockafellar-Uryasev form, solved exactly by sorting).
    Avar { lambda: f64 },
    /// `sup_w E_w[-x] - alpha(w)` over blockwise probability weights.
    Penalty(PenaltyOracle),
    /// Arbitrary blockwise evaluator; the axiom checker tells whether it is
    /// actually a risk measure.
    Custom(CustomRisk),
}

/// A conditional risk measure: an evaluator together with its family tag.
#[derive(Debug, Clone)]
pub struct RiskMeasure {
    kind: RiskKind,
}

impl RiskMeasure {
    pub fn entropic(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Parameter(format!(
                "entropic risk aversion must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            kind: RiskKind::Entropic { gamma },
        })
    }

    pub fn worst_case() -> Self {
        Self {
            kind: RiskKind::WorstCase,
        }
    }

    pub fn avar(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Parameter(format!(
                "AV@R level must lie in (0, 1], got {lambda}"
            )));
        }
        Ok(Self {
            kind: RiskKind::Avar { lambda },
        })
    }

    pub fn penalty(oracle: PenaltyOracle) -> Self {
        Self {
            kind: RiskKind::Penalty(oracle),
        }
    }

    pub fn custom(custom: CustomRisk) -> Self {
        Self {
            kind: RiskKind::Custom(custom),
        }
    }

    pub fn kind(&self) -> &RiskKind {
        &self.kind
    }

    /// A short family name for reports.
    pub fn family(&self) -> String {
        match &self.kind {
            RiskKind::Entropic { gamma } => format!("entropic(gamma={gamma})"),
            RiskKind::WorstCase => "worst_case".into(),
            RiskKind::Avar { lambda } => format!("avar(lambda={lambda})"),
            RiskKind::Penalty(_) => "penalty".into(),
            RiskKind::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Evaluates the measure blockwise.
    pub fn eval(&self, x: &RandomVariable, space: &FilteredSpace) -> Result<CondScalar> {
        if x.len() != space.n() {
            return Err(Error::Dimension {
                context: "risk evaluation",
                expected: space.n(),
                got: x.len(),
            });
        }
        match &self.kind {
            RiskKind::Entropic { gamma } => {
                let values = (0..space.m())
                    .map(|k| entropic_block(*gamma, x, space, k))
                    .collect();
                CondScalar::new(values)
            }
            RiskKind::WorstCase => {
                let values = (0..space.m())
                    .map(|k| {
                        space
                            .algebra()
                            .block(k)
                            .iter()
                            .map(|&i| -x.get(i))
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect();
                CondScalar::new(values)
            }
            RiskKind::Avar { lambda } => {
                let values = (0..space.m())
                    .map(|k| avar_block(*lambda, x, space, k))
                    .collect();
                CondScalar::new(values)
            }
            RiskKind::Penalty(oracle) => {
                let mut values = Vec::with_capacity(space.m());
                for k in 0..space.m() {
                    values.push(penalty_block(oracle, x, space, k)?);
                }
                CondScalar::new(values)
            }
            RiskKind::Custom(custom) => {
                let out = (custom.eval)(x, space)?;
                out.check_len(space.m(), "custom risk evaluation")?;
                Ok(out)
            }
        }
    }

    /// Evaluates at `x + eta` for a block-measurable cash amount `eta`.
    /// Contract: equals `eval(x) - eta` for any risk measure.
    pub fn cash_shift(
        &self,
        x: &RandomVariable,
        eta: &CondScalar,
        space: &FilteredSpace,
    ) -> Result<CondScalar> {
        let shifted = x.add(&eta.as_rv(space)?)?;
        self.eval(&shifted, space)
    }
}

/// Entropic certainty equivalent on one block, via a shifted log-sum-exp.
fn entropic_block(gamma: f64, x: &RandomVariable, space: &FilteredSpace, k: usize) -> f64 {
    let block = space.algebra().block(k);
    let z_max = block
        .iter()
        .map(|&i| -gamma * x.get(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = block
        .iter()
        .map(|&i| space.cond_prob(i) * (-gamma * x.get(i) - z_max).exp())
        .sum();
    (z_max + sum.ln()) / gamma
}

/// AV@R on one block: sort losses descending (ties by lowest atom index) and
/// average the top `lambda` probability mass.
fn avar_block(lambda: f64, x: &RandomVariable, space: &FilteredSpace, k: usize) -> f64 {
    let block = space.algebra().block(k);
    let mut losses: Vec<(f64, usize, f64)> = block
        .iter()
        .map(|&i| (-x.get(i), i, space.cond_prob(i)))
        .collect();
    losses.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite losses")
            .then(a.1.cmp(&b.1))
    });
    let mut remaining = lambda;
    let mut acc = 0.0;
    for &(loss, _, q) in &losses {
        let take = q.min(remaining);
        acc += take * loss;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    acc / lambda
}

/// Penalty-defined evaluation on one block by away-step Frank-Wolfe.
fn penalty_block(
    oracle: &PenaltyOracle,
    x: &RandomVariable,
    space: &FilteredSpace,
    k: usize,
) -> Result<f64> {
    let block = space.algebra().block(k);
    let linear: Vec<f64> = block.iter().map(|&i| -x.get(i)).collect();
    let concave = |w: &[f64]| oracle.eval(k, w).mul_scalar(-1.0).to_f64();
    let grad_holder = oracle.grad_fn(k);
    let neg_grad;
    let problem = fw::SimplexProblem {
        linear: &linear,
        concave: &concave,
        concave_grad: match &grad_holder {
            Some(g) => {
                neg_grad = move |w: &[f64]| g(w).iter().map(|v| -v).collect::<Vec<f64>>();
                Some(&neg_grad)
            }
            None => None,
        },
    };
    let opts = fw::FwOptions {
        gap_tol: oracle.tol(),
        ..Default::default()
    };
    match fw::maximize(&problem, None, &opts) {
        Err(fw::FwError::NoFiniteStart) => Err(Error::InfeasiblePenalty { block: k }),
        Ok(result) => {
            if !result.converged && result.gap > oracle.tol() * 100.0 {
                return Err(Error::SolverNonConvergence {
                    block: k,
                    residual: result.gap,
                });
            }
            Ok(result.value)
        }
    }
}

/// Outcome of one axiom's randomized check.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub pass: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
}

impl AxiomCheck {
    fn from_worst(worst: f64, tolerance: f64) -> Self {
        Self {
            pass: worst <= tolerance,
            worst_violation: worst,
            tolerance,
        }
    }
}

/// Report of the randomized axiom suite.  Failures are data, not errors.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub measure: String,
    pub trials: usize,
    pub seed: u64,
    pub monotonicity: AxiomCheck,
    pub cash_invariance: AxiomCheck,
    /// Convexity with real coefficients.
    pub convexity: AxiomCheck,
    /// Convexity with block-measurable coefficients, reported separately.
    pub conditional_convexity: AxiomCheck,
    /// `1_a rho(x) = 1_a rho(1_a x)`.
    pub locality: AxiomCheck,
    /// `|rho(x) - rho(y)| <= ||x - y | F||_inf`.
    pub lipschitz: AxiomCheck,
    /// The measure's value at zero (normalization is not enforced).
    pub rho_zero: CondScalar,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.monotonicity.pass
            && self.cash_invariance.pass
            && self.convexity.pass
            && self.conditional_convexity.pass
            && self.locality.pass
            && self.lipschitz.pass
    }

    /// Names of failing axioms.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.monotonicity.pass {
            out.push("monotonicity");
        }
        if !self.cash_invariance.pass {
            out.push("cash_invariance");
        }
        if !self.convexity.pass {
            out.push("convexity");
        }
        if !self.conditional_convexity.pass {
            out.push("conditional_convexity");
        }
        if !self.locality.pass {
            out.push("locality");
        }
        if !self.lipschitz.pass {
            out.push("lipschitz");
        }
        out
    }
}

/// Per-axiom pass thresholds.  The defaults are the pinned constants; the
/// CLI derives scaled copies from its `--tol` flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxiomTolerances {
    pub monotonicity: f64,
    pub cash_invariance: f64,
    pub convexity: f64,
    pub locality: f64,
    pub lipschitz: f64,
}

impl Default for AxiomTolerances {
    fn default() -> Self {
        Self {
            monotonicity: MONOTONICITY_TOL,
            cash_invariance: CASH_INVARIANCE_TOL,
            convexity: CONVEXITY_TOL,
            locality: LOCALITY_TOL,
            lipschitz: LIPSCHITZ_TOL,
        }
    }
}

fn random_rv(rng: &mut ChaCha8Rng, n: usize) -> RandomVariable {
    RandomVariable::new((0..n).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .expect("finite samples")
}

/// Randomized verification of the risk-measure axioms with `trials`
/// independent draws per axiom, at the default tolerances.  Samples use
/// atom values uniform on `[-10, 10]`; the seed makes reports reproducible.
pub fn check_axioms(
    measure: &RiskMeasure,
    space: &FilteredSpace,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    check_axioms_with(measure, space, trials, seed, &AxiomTolerances::default())
}

/// Same as [`check_axioms`] with explicit pass thresholds.
pub fn check_axioms_with(
    measure: &RiskMeasure,
    space: &FilteredSpace,
    trials: usize,
    seed: u64,
    tols: &AxiomTolerances,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::Parameter(
            "axiom check needs at least one trial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.n();
    let m = space.m();
    let mut worst = [0.0f64; 6];

    for _ in 0..trials {
        // monotonicity: y dominates x, so rho(x) >= rho(y)
        let x = random_rv(&mut rng, n);
        let bump = RandomVariable::new((0..n).map(|_| rng.gen_range(0.0..10.0)).collect()).unwrap();
        let y = x.add(&bump)?;
        let rx = measure.eval(&x, space)?;
        let ry = measure.eval(&y, space)?;
        for k in 0..m {
            worst[0] = worst[0].max(ry.get(k) - rx.get(k));
        }

        // cash invariance: rho(x + eta) = rho(x) - eta
        let eta = CondScalar::new((0..m).map(|_| rng.gen_range(-10.0..10.0)).collect())?;
        let shifted = measure.cash_shift(&x, &eta, space)?;
        for k in 0..m {
            worst[1] = worst[1].max((shifted.get(k) - (rx.get(k) - eta.get(k))).abs());
        }

        // convexity, real coefficient
        let z = random_rv(&mut rng, n);
        let rz = measure.eval(&z, space)?;
        let r: f64 = rng.gen_range(0.0..=1.0);
        let mix = x.scale(r).add(&z.scale(1.0 - r))?;
        let rmix = measure.eval(&mix, space)?;
        for k in 0..m {
            worst[2] = worst[2].max(rmix.get(k) - (r * rx.get(k) + (1.0 - r) * rz.get(k)));
        }

        // conditional convexity, block-measurable coefficient
        let rc = CondScalar::new((0..m).map(|_| rng.gen_range(0.0..=1.0)).collect())?;
        let one_minus = CondScalar::new(rc.values().iter().map(|v| 1.0 - v).collect())?;
        let cmix = x
            .scalar_mul(&rc, space)?
            .add(&z.scalar_mul(&one_minus, space)?)?;
        let rcmix = measure.eval(&cmix, space)?;
        for k in 0..m {
            worst[3] = worst[3]
                .max(rcmix.get(k) - (rc.get(k) * rx.get(k) + (1.0 - rc.get(k)) * rz.get(k)));
        }

        // locality on a random condition
        let a = Condition::from_mask((0..m).map(|_| rng.gen_bool(0.5)).collect());
        let masked = measure.eval(&x.indicator_mul(&a, space)?, space)?;
        for k in 0..m {
            if a.contains(k) {
                worst[4] = worst[4].max((masked.get(k) - rx.get(k)).abs());
            }
        }

        // Lipschitz with respect to the conditional sup norm
        let lip_bound = cond_norm(&x.sub(&z)?, Lp::Inf, space)?;
        for k in 0..m {
            worst[5] = worst[5].max((rx.get(k) - rz.get(k)).abs() - lip_bound.get(k));
        }
    }

    Ok(AxiomReport {
        measure: measure.family(),
        trials,
        seed,
        monotonicity: AxiomCheck::from_worst(worst[0], tols.monotonicity),
        cash_invariance: AxiomCheck::from_worst(worst[1], tols.cash_invariance),
        convexity: AxiomCheck::from_worst(worst[2], tols.convexity),
        conditional_convexity: AxiomCheck::from_worst(worst[3], tols.convexity),
        locality: AxiomCheck::from_worst(worst[4], tols.locality),
        lipschitz: AxiomCheck::from_worst(worst[5], tols.lipschitz),
        rho_zero: measure.eval(&RandomVariable::zero(n), space)?,
    })
}
