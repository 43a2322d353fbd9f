//! Desk-scale compactness diagnostics: supremum attainment over block
//! polytopes against an independent boundedness check, a perturbed variant
//! for proper convex block functions, a sup-limsup checker for eventually
//! periodic families, and a Fatou/Lebesgue harness for risk evaluators along
//! convergent sequences.
//!
//! Blockwise sets stand in for stable sets: a conditional subset of a finite
//! product is exactly one set per block.  "Compact" means closed and bounded
//! per block, and boundedness is decided independently of attainment by
//! probing the recession cone with LPs on normalized directions, so the
//! attainment/compactness equivalence is a genuine two-route check.

use crate::error::{Error, Result};
use crate::l0::{CondScalar, RandomVariable};
use crate::risk::RiskMeasure;
use crate::solver::lp;
use crate::space::FilteredSpace;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tolerance for recession-direction detection.
pub const RECESSION_TOL: f64 = 1e-9;
/// LP witnesses must satisfy their constraints and value to this tolerance.
pub const WITNESS_TOL: f64 = 1e-9;

/// Closed halfspace `normal . w <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(rename = "a")]
    pub normal: Vec<f64>,
    #[serde(rename = "b")]
    pub offset: f64,
}

/// One block's convex set, in vertex or halfspace representation.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockSet {
    Vertices(Vec<Vec<f64>>),
    Halfspaces(Vec<Halfspace>),
}

/// A stable convex set: one convex set per block, living in the block's
/// weight space.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPolytope {
    sets: Vec<BlockSet>,
}

impl BlockPolytope {
    /// Validates dimensions against the block sizes and checks H-rep
    /// feasibility by LP.
    pub fn new(space: &FilteredSpace, sets: Vec<BlockSet>) -> Result<Self> {
        if sets.len() != space.m() {
            return Err(Error::Dimension {
                context: "block polytope",
                expected: space.m(),
                got: sets.len(),
            });
        }
        for (k, set) in sets.iter().enumerate() {
            let dim = space.algebra().block(k).len();
            match set {
                BlockSet::Vertices(vs) => {
                    if vs.is_empty() {
                        return Err(Error::Validation {
                            field: "polytope vertices",
                            index: Some(k),
                            message: "vertex list must be nonempty".into(),
                        });
                    }
                    for v in vs {
                        if v.len() != dim {
                            return Err(Error::Dimension {
                                context: "polytope vertex",
                                expected: dim,
                                got: v.len(),
                            });
                        }
                    }
                }
                BlockSet::Halfspaces(hs) => {
                    for h in hs {
                        if h.normal.len() != dim {
                            return Err(Error::Dimension {
                                context: "halfspace normal",
                                expected: dim,
                                got: h.normal.len(),
                            });
                        }
                    }
                    let mut p = lp::LpProblem::new(vec![0.0; dim]);
                    for h in hs {
                        p.leq(h.normal.clone(), h.offset);
                    }
                    if matches!(lp::solve(&p), lp::LpSolution::Infeasible) {
                        return Err(Error::InfeasibleBlock { block: k });
                    }
                }
            }
        }
        Ok(Self { sets })
    }

    /// The probability simplex on every block.
    pub fn simplex(space: &FilteredSpace) -> Self {
        let sets = (0..space.m())
            .map(|k| {
                let dim = space.algebra().block(k).len();
                let mut hs = Vec::with_capacity(dim + 2);
                for j in 0..dim {
                    let mut normal = vec![0.0; dim];
                    normal[j] = -1.0;
                    hs.push(Halfspace {
                        normal,
                        offset: 0.0,
                    });
                }
                hs.push(Halfspace {
                    normal: vec![1.0; dim],
                    offset: 1.0,
                });
                hs.push(Halfspace {
                    normal: vec![-1.0; dim],
                    offset: -1.0,
                });
                BlockSet::Halfspaces(hs)
            })
            .collect();
        Self { sets }
    }

    pub fn sets(&self) -> &[BlockSet] {
        &self.sets
    }

    pub fn set(&self, k: usize) -> &BlockSet {
        &self.sets[k]
    }
}

/// Outcome of one functional's attainment solve.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FunctionalOutcome {
    Attained { value: f64, witness: Vec<f64> },
    Unbounded { ray: Vec<f64> },
}

impl FunctionalOutcome {
    pub fn is_attained(&self) -> bool {
        matches!(self, FunctionalOutcome::Attained { .. })
    }
}

/// Per-block result of the attainment/compactness check.
#[derive(Debug, Clone, Serialize)]
pub struct JamesBlockReport {
    pub outcomes: Vec<FunctionalOutcome>,
    /// Recession directions appended to the probe list (0 when bounded).
    pub ray_probes: usize,
    /// Independent boundedness verdict from the recession-cone LPs.
    pub bounded: bool,
    pub all_attained: bool,
    /// `all_attained == bounded`; a discrepancy is a bug, not data.
    pub consistent: bool,
}

/// Report of the attainment/compactness equivalence check.
#[derive(Debug, Clone, Serialize)]
pub struct JamesReport {
    pub blocks: Vec<JamesBlockReport>,
    /// Bounded (hence compact) on every block.
    pub compact: bool,
    pub verdict_consistent: bool,
}

fn maximize_over_set(set: &BlockSet, c: &[f64], block: usize) -> Result<FunctionalOutcome> {
    match set {
        BlockSet::Vertices(vs) => {
            // LP over convex-combination weights; the vertex oracle in the
            // tests recomputes this by direct enumeration
            let scores: Vec<f64> = vs
                .iter()
                .map(|v| v.iter().zip(c).map(|(a, b)| a * b).sum())
                .collect();
            let mut p = lp::LpProblem::new(scores);
            p.eq(vec![1.0; vs.len()], 1.0);
            for j in 0..vs.len() {
                let mut row = vec![0.0; vs.len()];
                row[j] = 1.0;
                p.geq(row, 0.0);
            }
            match lp::solve(&p) {
                lp::LpSolution::Optimal { x: lambda, value } => {
                    let dim = vs[0].len();
                    let mut witness = vec![0.0; dim];
                    for (l, v) in lambda.iter().zip(vs) {
                        for (wi, vi) in witness.iter_mut().zip(v) {
                            *wi += l * vi;
                        }
                    }
                    Ok(FunctionalOutcome::Attained { value, witness })
                }
                _ => Err(Error::SolverNonConvergence {
                    block,
                    residual: f64::NAN,
                }),
            }
        }
        BlockSet::Halfspaces(hs) => {
            let mut p = lp::LpProblem::new(c.to_vec());
            for h in hs {
                p.leq(h.normal.clone(), h.offset);
            }
            match lp::solve(&p) {
                lp::LpSolution::Optimal { x, value } => {
                    Ok(FunctionalOutcome::Attained { value, witness: x })
                }
                lp::LpSolution::Unbounded { ray, .. } => Ok(FunctionalOutcome::Unbounded { ray }),
                lp::LpSolution::Infeasible => Err(Error::InfeasibleBlock { block }),
                lp::LpSolution::Stalled => Err(Error::SolverNonConvergence {
                    block,
                    residual: f64::NAN,
                }),
            }
        }
    }
}

/// Nonzero directions of the cone `{d : rows . d <= 0}`, found by LPs on
/// normalized coordinates.  Empty exactly when the cone is trivial.
fn recession_directions(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut rays = Vec::new();
    for j in 0..dim {
        for sign in [1.0, -1.0] {
            let mut objective = vec![0.0; dim];
            objective[j] = sign;
            let mut p = lp::LpProblem::new(objective);
            for row in rows {
                p.leq(row.clone(), 0.0);
            }
            for i in 0..dim {
                let mut bound = vec![0.0; dim];
                bound[i] = 1.0;
                p.leq(bound.clone(), 1.0);
                p.geq(bound, -1.0);
            }
            if let lp::LpSolution::Optimal { x, value } = lp::solve(&p) {
                if value > RECESSION_TOL {
                    let norm = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                    rays.push(x.iter().map(|v| v / norm).collect());
                }
            }
        }
    }
    rays
}

/// Checks, per block and functional, whether the supremum over the set is
/// attained; independently decides boundedness via the recession cone; and
/// reports the equivalence verdict.  When the recession cone is nontrivial,
/// its directions are appended to the probe list so unboundedness is always
/// witnessed by some functional.
pub fn james_check(
    polytope: &BlockPolytope,
    functionals: &[RandomVariable],
    space: &FilteredSpace,
) -> Result<JamesReport> {
    if polytope.sets.len() != space.m() {
        return Err(Error::Dimension {
            context: "james check",
            expected: space.m(),
            got: polytope.sets.len(),
        });
    }
    for y in functionals {
        if y.len() != space.n() {
            return Err(Error::Dimension {
                context: "james functional",
                expected: space.n(),
                got: y.len(),
            });
        }
    }
    let mut blocks = Vec::with_capacity(space.m());
    for k in 0..space.m() {
        let atoms = space.algebra().block(k);
        let dim = atoms.len();
        let set = polytope.set(k);
        let rays = match set {
            BlockSet::Vertices(_) => Vec::new(),
            BlockSet::Halfspaces(hs) => {
                let rows: Vec<Vec<f64>> = hs.iter().map(|h| h.normal.clone()).collect();
                recession_directions(&rows, dim)
            }
        };
        let bounded = rays.is_empty();
        let mut probes: Vec<Vec<f64>> = functionals
            .iter()
            .map(|y| atoms.iter().map(|&i| y.get(i)).collect())
            .collect();
        probes.extend(rays.iter().cloned());
        let mut outcomes = Vec::with_capacity(probes.len());
        for c in &probes {
            outcomes.push(maximize_over_set(set, c, k)?);
        }
        let all_attained = outcomes.iter().all(FunctionalOutcome::is_attained);
        blocks.push(JamesBlockReport {
            ray_probes: rays.len(),
            consistent: all_attained == bounded,
            outcomes,
            bounded,
            all_attained,
        });
    }
    Ok(JamesReport {
        compact: blocks.iter().all(|b| b.bounded),
        verdict_consistent: blocks.iter().all(|b| b.consistent),
        blocks,
    })
}

/// Affine function `gradient . x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

/// One block of a proper convex function: the max of finitely many affine
/// pieces on an H-represented domain (`+inf` outside).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFn {
    pub pieces: Vec<AffinePiece>,
    /// Empty means the whole space.
    pub domain: Vec<Halfspace>,
}

impl BlockFn {
    /// The L1 norm as a max of sign-pattern affine pieces.
    pub fn l1_norm(dim: usize) -> Self {
        let mut pieces = Vec::with_capacity(1 << dim);
        for mask in 0..(1u32 << dim) {
            let gradient = (0..dim)
                .map(|j| if mask & (1 << j) != 0 { 1.0 } else { -1.0 })
                .collect();
            pieces.push(AffinePiece {
                gradient,
                offset: 0.0,
            });
        }
        Self {
            pieces,
            domain: Vec::new(),
        }
    }

    /// The indicator of an H-represented set: zero inside, `+inf` outside.
    pub fn indicator(domain: Vec<Halfspace>, dim: usize) -> Self {
        Self {
            pieces: vec![AffinePiece {
                gradient: vec![0.0; dim],
                offset: 0.0,
            }],
            domain,
        }
    }
}

/// A proper convex function given blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperConvexBlockFn {
    blocks: Vec<BlockFn>,
}

impl ProperConvexBlockFn {
    /// Validates properness: affine pieces exist and the domain is feasible.
    pub fn new(space: &FilteredSpace, blocks: Vec<BlockFn>) -> Result<Self> {
        if blocks.len() != space.m() {
            return Err(Error::Dimension {
                context: "block function",
                expected: space.m(),
                got: blocks.len(),
            });
        }
        for (k, block) in blocks.iter().enumerate() {
            let dim = space.algebra().block(k).len();
            if block.pieces.is_empty() {
                return Err(Error::Improper {
                    block: k,
                    message: "no affine pieces: the function is -inf".into(),
                });
            }
            for piece in &block.pieces {
                if piece.gradient.len() != dim {
                    return Err(Error::Dimension {
                        context: "affine piece",
                        expected: dim,
                        got: piece.gradient.len(),
                    });
                }
            }
            for h in &block.domain {
                if h.normal.len() != dim {
                    return Err(Error::Dimension {
                        context: "domain halfspace",
                        expected: dim,
                        got: h.normal.len(),
                    });
                }
            }
            if !block.domain.is_empty() {
                let mut p = lp::LpProblem::new(vec![0.0; dim]);
                for h in &block.domain {
                    p.leq(h.normal.clone(), h.offset);
                }
                if matches!(lp::solve(&p), lp::LpSolution::Infeasible) {
                    return Err(Error::Improper {
                        block: k,
                        message: "empty domain: the function is +inf everywhere".into(),
                    });
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[BlockFn] {
        &self.blocks
    }
}

/// Per-block result of the perturbed attainment check.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbedBlockReport {
    pub outcomes: Vec<FunctionalOutcome>,
    pub ray_probes: usize,
    /// Sublevel sets `{f <= y}` bounded (recession cone of the epigraph
    /// system trivial); independent of the attainment solves.
    pub sublevel_bounded: bool,
    pub all_attained: bool,
    /// `all attained and finite  =>  sublevels bounded`.
    pub implication_holds: bool,
}

/// Report of the perturbed attainment check.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbedJamesReport {
    pub blocks: Vec<PerturbedBlockReport>,
    pub consistent: bool,
}

/// For each functional `c`, solves `sup_x c.x - f(x)` by the epigraph LP and
/// reports attainment; independently decides whether the sublevel sets of
/// `f` are bounded.  Sublevel recession directions are appended as probe
/// functionals, so an unbounded sublevel always produces an unattained
/// perturbation.
pub fn james_perturbed_check(
    f: &ProperConvexBlockFn,
    functionals: &[RandomVariable],
    space: &FilteredSpace,
) -> Result<PerturbedJamesReport> {
    if f.blocks.len() != space.m() {
        return Err(Error::Dimension {
            context: "perturbed james check",
            expected: space.m(),
            got: f.blocks.len(),
        });
    }
    let mut blocks = Vec::with_capacity(space.m());
    for k in 0..space.m() {
        let atoms = space.algebra().block(k);
        let dim = atoms.len();
        let block_fn = &f.blocks[k];
        // recession cone of the sublevel system
        let mut rows: Vec<Vec<f64>> = block_fn
            .pieces
            .iter()
            .map(|piece| piece.gradient.clone())
            .collect();
        rows.extend(block_fn.domain.iter().map(|h| h.normal.clone()));
        let rays = recession_directions(&rows, dim);
        let sublevel_bounded = rays.is_empty();

        let mut probes: Vec<Vec<f64>> = functionals
            .iter()
            .map(|y| atoms.iter().map(|&i| y.get(i)).collect())
            .collect();
        probes.extend(rays.iter().cloned());

        let mut outcomes = Vec::with_capacity(probes.len());
        for c in &probes {
            // variables (x, r): maximize c.x - r over the epigraph
            let mut objective = c.clone();
            objective.push(-1.0);
            let mut p = lp::LpProblem::new(objective);
            for piece in &block_fn.pieces {
                let mut row = piece.gradient.clone();
                row.push(-1.0);
                p.leq(row, -piece.offset);
            }
            for h in &block_fn.domain {
                let mut row = h.normal.clone();
                row.push(0.0);
                p.leq(row, h.offset);
            }
            let outcome = match lp::solve(&p) {
                lp::LpSolution::Optimal { x, value } => FunctionalOutcome::Attained {
                    value,
                    witness: x[..dim].to_vec(),
                },
                lp::LpSolution::Unbounded { ray, .. } => FunctionalOutcome::Unbounded {
                    ray: ray[..dim].to_vec(),
                },
                lp::LpSolution::Infeasible => {
                    return Err(Error::Improper {
                        block: k,
                        message: "epigraph is empty".into(),
                    })
                }
                lp::LpSolution::Stalled => {
                    return Err(Error::SolverNonConvergence {
                        block: k,
                        residual: f64::NAN,
                    })
                }
            };
            outcomes.push(outcome);
        }
        let all_attained = outcomes.iter().all(FunctionalOutcome::is_attained);
        blocks.push(PerturbedBlockReport {
            ray_probes: rays.len(),
            implication_holds: !all_attained || sublevel_bounded,
            outcomes,
            sublevel_bounded,
            all_attained,
        });
    }
    Ok(PerturbedJamesReport {
        consistent: blocks.iter().all(|b| b.implication_holds),
        blocks,
    })
}

/// Values of one function of the sequence: `values[point][block]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionTable {
    pub values: Vec<Vec<f64>>,
}

impl FunctionTable {
    pub fn get(&self, point: usize, block: usize) -> f64 {
        self.values[point][block]
    }
}

/// An eventually periodic sequence of functions on a finite domain, with a
/// per-block subset of candidate maximizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimonsInstance {
    pub domain_size: usize,
    pub prefix: Vec<FunctionTable>,
    /// Repeats forever after the prefix; must be nonempty.
    pub cycle: Vec<FunctionTable>,
    /// Per block, the points of the candidate subset.
    pub subset: Vec<Vec<usize>>,
}

impl SimonsInstance {
    fn validate(&self, m: usize) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::Validation {
                field: "simons cycle",
                index: None,
                message: "the cycle must be nonempty".into(),
            });
        }
        for table in self.prefix.iter().chain(&self.cycle) {
            if table.values.len() != self.domain_size {
                return Err(Error::Dimension {
                    context: "function table points",
                    expected: self.domain_size,
                    got: table.values.len(),
                });
            }
            for row in &table.values {
                if row.len() != m {
                    return Err(Error::Dimension {
                        context: "function table blocks",
                        expected: m,
                        got: row.len(),
                    });
                }
            }
        }
        if self.subset.len() != m {
            return Err(Error::Dimension {
                context: "simons subset",
                expected: m,
                got: self.subset.len(),
            });
        }
        for (k, points) in self.subset.iter().enumerate() {
            if points.is_empty() {
                return Err(Error::Validation {
                    field: "simons subset",
                    index: Some(k),
                    message: "the subset must be nonempty on every block".into(),
                });
            }
            for &z in points {
                if z >= self.domain_size {
                    return Err(Error::Dimension {
                        context: "simons subset point",
                        expected: self.domain_size,
                        got: z,
                    });
                }
            }
        }
        Ok(())
    }

    /// The table of term `j` of the infinite sequence.
    fn term(&self, j: usize) -> &FunctionTable {
        if j < self.prefix.len() {
            &self.prefix[j]
        } else {
            &self.cycle[(j - self.prefix.len()) % self.cycle.len()]
        }
    }

    fn period(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }
}

/// How sigma-convex combinations of the sequence are sampled when checking
/// the hypothesis.  The default enumerates all supports of size up to 4 on
/// the first period with weights on a quarter grid, plus geometric tails
/// with ratios 0.5 and 0.9 from every starting offset.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaConvexSampling {
    pub max_support: usize,
    /// Weights are positive multiples of `1/grid_steps`.
    pub grid_steps: usize,
    pub tail_ratios: Vec<f64>,
}

impl Default for SigmaConvexSampling {
    fn default() -> Self {
        Self {
            max_support: 4,
            grid_steps: 4,
            tail_ratios: vec![0.5, 0.9],
        }
    }
}

/// Verdict of the sup-limsup check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimonsFlag {
    /// Equality holds (the hypothesis sampling is informational).
    Ok,
    /// Equality fails and some sampled combination peaks off the subset:
    /// the hypothesis is violated, the theorem is not contradicted.
    HypothesisViolated,
    /// Equality fails although every sampled combination peaked on the
    /// subset; on finite exact tables this indicates a bug.
    TheoremViolation,
}

/// Report of the sup-limsup equality check.
#[derive(Debug, Clone, Serialize)]
pub struct SimonsReport {
    /// `sup over the domain of limsup f_n`, per block.
    pub sup_domain: Vec<f64>,
    /// `sup over the subset of limsup f_n`, per block.
    pub sup_subset: Vec<f64>,
    /// `sup_domain - sup_subset`, always nonnegative.
    pub equality_residual: Vec<f64>,
    /// Fraction of sampled combinations whose supremum is attained on the
    /// subset, per block.
    pub hypothesis_pass_rate: Vec<f64>,
    pub combinations_sampled: usize,
    pub equality_holds: bool,
    pub hypothesis_holds: bool,
    pub flag: SimonsFlag,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    // positive integer compositions of `total` into `parts` parts
    let mut out = Vec::new();
    let mut current = vec![0usize; parts];
    fn recurse(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, left: usize) {
        let remaining_parts = current.len() - pos;
        if remaining_parts == 1 {
            if left >= 1 {
                current[pos] = left;
                out.push(current.clone());
            }
            return;
        }
        for take in 1..=(left - (remaining_parts - 1)) {
            current[pos] = take;
            recurse(out, current, pos + 1, left - take);
        }
    }
    if parts >= 1 && total >= parts {
        recurse(&mut out, &mut current, 0, total);
    }
    out
}

/// Weights per term index (on `0..period`) of the sampled combinations.
fn sampled_weights(instance: &SimonsInstance, sampling: &SigmaConvexSampling) -> Vec<Vec<f64>> {
    let period = instance.period();
    let mut combos: Vec<Vec<f64>> = Vec::new();
    // finite supports on the first period
    let indices: Vec<usize> = (0..period).collect();
    let max_support = sampling.max_support.min(period);
    for size in 1..=max_support {
        for support in subsets_of_size(&indices, size) {
            for composition in compositions(sampling.grid_steps, size) {
                let mut weights = vec![0.0; period];
                for (slot, &steps) in support.iter().zip(&composition) {
                    weights[*slot] = steps as f64 / sampling.grid_steps as f64;
                }
                combos.push(weights);
            }
        }
    }
    // geometric tails folded onto the period slots
    for &q in &sampling.tail_ratios {
        for start in 0..period {
            let mut weights = vec![0.0; period];
            let mut j = start;
            let mut w = 1.0 - q;
            while w > 1e-18 {
                let slot = if j < instance.prefix.len() {
                    j
                } else {
                    instance.prefix.len() + (j - instance.prefix.len()) % instance.cycle.len()
                };
                weights[slot] += w;
                w *= q;
                j += 1;
            }
            // truncation leaves a deficit below 1e-18; renormalize
            let sum: f64 = weights.iter().sum();
            for v in &mut weights {
                *v /= sum;
            }
            combos.push(weights);
        }
    }
    combos
}

fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn recurse(
        items: &[usize],
        size: usize,
        from: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in from..items.len() {
            current.push(items[i]);
            recurse(items, size, i + 1, current, out);
            current.pop();
        }
    }
    recurse(items, size, 0, &mut current, &mut out);
    out
}

/// Computes both sides of the sup-limsup equality exactly and samples
/// sigma-convex combinations to check the attainment hypothesis.  Weights
/// are sampled per block independently, which realizes blockwise (stable)
/// scalar coefficients.
pub fn simons_check(
    instance: &SimonsInstance,
    sampling: &SigmaConvexSampling,
    space: &FilteredSpace,
) -> Result<SimonsReport> {
    let m = space.m();
    instance.validate(m)?;
    let period = instance.period();
    let combos = sampled_weights(instance, sampling);

    // limsup over the sequence = pointwise max over cycle members
    let mut sup_domain = Vec::with_capacity(m);
    let mut sup_subset = Vec::with_capacity(m);
    let mut residual = Vec::with_capacity(m);
    let mut pass_rate = Vec::with_capacity(m);
    for k in 0..m {
        let limsup: Vec<f64> = (0..instance.domain_size)
            .map(|e| {
                instance
                    .cycle
                    .iter()
                    .map(|table| table.get(e, k))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let sup_e = limsup.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sup_c = instance.subset[k]
            .iter()
            .map(|&z| limsup[z])
            .fold(f64::NEG_INFINITY, f64::max);
        sup_domain.push(sup_e);
        sup_subset.push(sup_c);
        residual.push(sup_e - sup_c);

        let mut passes = 0usize;
        for weights in &combos {
            // g = sum of weighted terms, on this block
            let g: Vec<f64> = (0..instance.domain_size)
                .map(|e| {
                    (0..period)
                        .map(|j| weights[j] * instance.term(j).get(e, k))
                        .sum()
                })
                .collect();
            let sup_g = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let on_subset = instance.subset[k].iter().any(|&z| g[z] >= sup_g - 1e-12);
            if on_subset {
                passes += 1;
            }
        }
        pass_rate.push(passes as f64 / combos.len() as f64);
    }

    let equality_holds = residual.iter().all(|&r| r == 0.0);
    let hypothesis_holds = pass_rate.iter().all(|&r| r == 1.0);
    let flag = if equality_holds {
        SimonsFlag::Ok
    } else if !hypothesis_holds {
        SimonsFlag::HypothesisViolated
    } else {
        SimonsFlag::TheoremViolation
    };
    Ok(SimonsReport {
        sup_domain,
        sup_subset,
        equality_residual: residual,
        hypothesis_pass_rate: pass_rate,
        combinations_sampled: combos.len(),
        equality_holds,
        hypothesis_holds,
        flag,
    })
}

/// Shape of the perturbations driving the sequence `x_n -> x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationKind {
    /// `x + (scale/n) * 1`.
    Constant,
    /// `x + (scale/n) * (-1)^n * 1`.
    Alternating,
    /// `x + (scale/n) * u_n` with `u_n` uniform in `[-1, 1]^n`, seeded.
    Random { seed: u64 },
}

/// Configuration of the Fatou/Lebesgue harness.  Evaluation happens along
/// the dyadic subsequence `n = 2^0 .. 2^max_exponent`; limits are checked on
/// the last two evaluations, where the Lipschitz bound `scale / n` is below
/// both tolerances.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationSpec {
    pub scale: f64,
    pub kinds: Vec<PerturbationKind>,
    pub max_exponent: u32,
    pub fatou_tol: f64,
    pub lebesgue_tol: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            scale: 1.0,
            kinds: vec![
                PerturbationKind::Constant,
                PerturbationKind::Alternating,
                PerturbationKind::Random { seed: 1 },
            ],
            max_exponent: 32,
            fatou_tol: 1e-9,
            lebesgue_tol: 1e-7,
        }
    }
}

/// Result of one perturbation family.
#[derive(Debug, Clone, Serialize)]
pub struct FatouKindReport {
    pub kind: PerturbationKind,
    pub fatou_ok: bool,
    pub lebesgue_ok: bool,
    /// Worst positive part of `rho(x) - rho(x_n)` on the tail.
    pub worst_fatou_violation: f64,
    /// Worst `|rho(x_n) - rho(x)|` on the tail.
    pub worst_lebesgue_gap: f64,
}

/// Report of the sequence-continuity harness.
#[derive(Debug, Clone, Serialize)]
pub struct FatouReport {
    pub limit: CondScalar,
    pub kinds: Vec<FatouKindReport>,
    pub pass: bool,
}

/// Evaluates the measure along bounded sequences converging to `x` and
/// checks the Fatou inequality and the Lebesgue limit blockwise.
pub fn fatou_lebesgue_harness(
    measure: &RiskMeasure,
    x: &RandomVariable,
    spec: &PerturbationSpec,
    space: &FilteredSpace,
) -> Result<FatouReport> {
    let limit = measure.eval(x, space)?;
    let mut kinds = Vec::with_capacity(spec.kinds.len());
    for &kind in &spec.kinds {
        let mut worst_fatou = 0.0f64;
        let mut worst_lebesgue = 0.0f64;
        let tail_start = spec.max_exponent.saturating_sub(1);
        for exponent in 0..=spec.max_exponent {
            if exponent < tail_start {
                continue; // only the tail is compared against the limit
            }
            let n = (2.0f64).powi(exponent as i32);
            let direction = match kind {
                PerturbationKind::Constant => RandomVariable::constant(space.n(), 1.0),
                PerturbationKind::Alternating => {
                    let sign = if exponent % 2 == 0 { 1.0 } else { -1.0 };
                    RandomVariable::constant(space.n(), sign)
                }
                PerturbationKind::Random { seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(exponent));
                    RandomVariable::new(
                        (0..space.n())
                            .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
                            .collect(),
                    )
                    .expect("finite samples")
                }
            };
            let x_n = x.add(&direction.scale(spec.scale / n))?;
            let value = measure.eval(&x_n, space)?;
            for k in 0..space.m() {
                worst_fatou = worst_fatou.max(limit.get(k) - value.get(k));
                worst_lebesgue = worst_lebesgue.max((value.get(k) - limit.get(k)).abs());
            }
        }
        kinds.push(FatouKindReport {
            kind,
            fatou_ok: worst_fatou <= spec.fatou_tol,
            lebesgue_ok: worst_lebesgue <= spec.lebesgue_tol,
            worst_fatou_violation: worst_fatou,
            worst_lebesgue_gap: worst_lebesgue,
        });
    }
    Ok(FatouReport {
        limit,
        pass: kinds.iter().all(|k| k.fatou_ok && k.lebesgue_ok),
        kinds,
    })
}
