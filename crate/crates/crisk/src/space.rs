//! Finite probability space, sub-σ-algebra blocks, and the Boolean algebra of
//! conditions.
//!
//! The fine σ-algebra is given by `n` atoms with strictly positive
//! probabilities; the coarse one by a partition of those atoms into `m`
//! blocks.  A [`Condition`] is an element of the measure algebra generated by
//! the blocks, i.e. a subset of blocks, acting on vectors through its
//! indicator.  Almost-sure statements are exact statements here because null
//! atoms are rejected at construction.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute slack allowed on `sum(atom probabilities) == 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Finite probability space: atoms of the fine σ-algebra with strictly
/// positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSpace {
    probs: Vec<f64>,
    labels: Vec<String>,
}

impl ProbSpace {
    /// Builds a space from probabilities and labels of equal length.
    pub fn new(probs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation {
                field: "atoms",
                index: None,
                message: "a probability space needs at least one atom".into(),
            });
        }
        if labels.len() != probs.len() {
            return Err(Error::Dimension {
                context: "atom labels",
                expected: probs.len(),
                got: labels.len(),
            });
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::Validation {
                    field: "atoms.prob",
                    index: Some(i),
                    message: format!("atom probability must be strictly positive, got {p}"),
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Validation {
                field: "atoms.prob",
                index: None,
                message: format!("probabilities sum to {sum}, expected 1"),
            });
        }
        Ok(Self { probs, labels })
    }

    /// Uniform space on `n` atoms labelled `w0..w{n-1}`.
    pub fn uniform(n: usize) -> Self {
        let probs = vec![1.0 / n as f64; n];
        let labels = (0..n).map(|i| format!("w{i}")).collect();
        Self::new(probs, labels).expect("uniform space is valid")
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one atom by construction
    }

    pub fn prob(&self, atom: usize) -> f64 {
        self.probs[atom]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Partition of the atom indices into the blocks of the coarse σ-algebra.
///
/// Block probabilities are derived from the [`ProbSpace`] at construction, so
/// a value of this type is always consistent with the space it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SubAlgebra {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_probs: Vec<f64>,
}

impl SubAlgebra {
    /// Validates that `blocks` partitions `0..space.len()` exactly.  Atom
    /// indices within each block are canonicalized to ascending order; the
    /// "lowest atom index" tie-breaking rules elsewhere rely on this.
    pub fn new(space: &ProbSpace, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.len();
        let mut block_of = vec![usize::MAX; n];
        for (k, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Validation {
                    field: "blocks",
                    index: Some(k),
                    message: "blocks must be nonempty".into(),
                });
            }
            for &i in block {
                if i >= n {
                    return Err(Error::Dimension {
                        context: "block atom index",
                        expected: n,
                        got: i,
                    });
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::Validation {
                        field: "blocks",
                        index: Some(i),
                        message: format!("atom {i} appears in more than one block"),
                    });
                }
                block_of[i] = k;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::Validation {
                field: "blocks",
                index: Some(i),
                message: format!("atom {i} is not covered by any block"),
            });
        }
        let mut blocks = blocks;
        for block in &mut blocks {
            block.sort_unstable();
        }
        let block_probs = blocks
            .iter()
            .map(|b| b.iter().map(|&i| space.prob(i)).sum())
            .collect();
        Ok(Self {
            blocks,
            block_of,
            block_probs,
        })
    }

    /// The trivial sub-σ-algebra: one block holding every atom.
    pub fn trivial(space: &ProbSpace) -> Self {
        Self::new(space, vec![(0..space.len()).collect()]).expect("trivial algebra is valid")
    }

    /// Number of blocks `m`.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of atoms `n`.
    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn block_prob(&self, k: usize) -> f64 {
        self.block_probs[k]
    }

    pub fn block_probs(&self) -> &[f64] {
        &self.block_probs
    }
}

/// A probability space together with a sub-σ-algebra over it.  Almost every
/// operation in the crate conditions on the blocks, so the pair travels
/// together.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSpace {
    atoms: ProbSpace,
    algebra: SubAlgebra,
}

impl FilteredSpace {
    pub fn new(atoms: ProbSpace, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let algebra = SubAlgebra::new(&atoms, blocks)?;
        Ok(Self { atoms, algebra })
    }

    /// Uniform atoms, blocks as given.
    pub fn uniform(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(ProbSpace::uniform(n), blocks)
    }

    pub fn atoms(&self) -> &ProbSpace {
        &self.atoms
    }

    pub fn algebra(&self) -> &SubAlgebra {
        &self.algebra
    }

    /// Number of atoms.
    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    /// Number of blocks.
    pub fn m(&self) -> usize {
        self.algebra.block_count()
    }

    /// Conditional probability of `atom` given its block.
    pub fn cond_prob(&self, atom: usize) -> f64 {
        self.atoms.prob(atom) / self.algebra.block_prob(self.algebra.block_of(atom))
    }

    /// Conditional probabilities of the atoms of block `k`, in block order.
    pub fn block_cond_probs(&self, k: usize) -> Vec<f64> {
        let pb = self.algebra.block_prob(k);
        self.algebra
            .block(k)
            .iter()
            .map(|&i| self.atoms.prob(i) / pb)
            .collect()
    }
}

/// Element of the measure algebra: a set of blocks, stored as a mask.
///
/// The full mask is the unit `1`, the empty mask the zero `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    mask: Vec<bool>,
}

impl Condition {
    /// Condition selecting the given blocks out of `m`.
    pub fn from_blocks(m: usize, blocks: &[usize]) -> Result<Self> {
        let mut mask = vec![false; m];
        for &k in blocks {
            if k >= m {
                return Err(Error::Dimension {
                    context: "condition block index",
                    expected: m,
                    got: k,
                });
            }
            mask[k] = true;
        }
        Ok(Self { mask })
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// The unit condition (all blocks).
    pub fn one(m: usize) -> Self {
        Self {
            mask: vec![true; m],
        }
    }

    /// The zero condition (no blocks).
    pub fn zero(m: usize) -> Self {
        Self {
            mask: vec![false; m],
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, block: usize) -> bool {
        self.mask[block]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_one(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn is_zero(&self) -> bool {
        self.mask.iter().all(|&b| !b)
    }

    fn check_len(&self, other: &Condition) -> Result<()> {
        if self.mask.len() != other.mask.len() {
            return Err(Error::Dimension {
                context: "condition",
                expected: self.mask.len(),
                got: other.mask.len(),
            });
        }
        Ok(())
    }

    /// Blockwise AND.
    pub fn meet(&self, other: &Condition) -> Result<Condition> {
        self.check_len(other)?;
        Ok(Condition {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a && b)
                .collect(),
        })
    }

    /// Blockwise OR.
    pub fn join(&self, other: &Condition) -> Result<Condition> {
        self.check_len(other)?;
        Ok(Condition {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a || b)
                .collect(),
        })
    }

    /// Blockwise NOT.
    pub fn complement(&self) -> Condition {
        Condition {
            mask: self.mask.iter().map(|&a| !a).collect(),
        }
    }
}

/// Pairwise-disjoint conditions joining to the unit.  Zero parts are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    parts: Vec<Condition>,
}

impl PartitionOfUnity {
    /// Validates disjointness and cover; see the errors for the failure modes.
    pub fn new(parts: Vec<Condition>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Validation {
                field: "partition",
                index: None,
                message: "a partition of unity needs at least one part".into(),
            });
        }
        let m = parts[0].len();
        for (i, part) in parts.iter().enumerate() {
            if part.len() != m {
                return Err(Error::Dimension {
                    context: "partition part",
                    expected: m,
                    got: part.len(),
                });
            }
            for (j, later) in parts.iter().enumerate().skip(i + 1) {
                for k in 0..m {
                    if part.contains(k) && later.contains(k) {
                        return Err(Error::PartitionOverlap {
                            first: i,
                            second: j,
                            block: k,
                        });
                    }
                }
            }
        }
        for k in 0..m {
            if !parts.iter().any(|p| p.contains(k)) {
                return Err(Error::PartitionCover { block: k });
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[Condition] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The part index owning each block.
    pub fn owner_of_blocks(&self) -> Vec<usize> {
        let m = self.parts[0].len();
        (0..m)
            .map(|k| {
                self.parts
                    .iter()
                    .position(|p| p.contains(k))
                    .expect("partition covers every block")
            })
            .collect()
    }
}

/// Comparison relation for carving conditions out of conditional scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Gt => value > threshold,
            Relation::Ge => value >= threshold,
            Relation::Lt => value < threshold,
            Relation::Le => value <= threshold,
            Relation::Eq => value == threshold,
            Relation::Ne => value != threshold,
        }
    }
}

impl std::str::FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            ">" | "gt" => Ok(Relation::Gt),
            ">=" | "ge" => Ok(Relation::Ge),
            "<" | "lt" => Ok(Relation::Lt),
            "<=" | "le" => Ok(Relation::Le),
            "==" | "eq" => Ok(Relation::Eq),
            "!=" | "ne" => Ok(Relation::Ne),
            other => Err(Error::Parameter(format!("unknown relation `{other}`"))),
        }
    }
}
