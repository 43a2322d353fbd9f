//! Vectors of the module layer: atomwise random variables, blockwise
//! conditional scalars, extended conditional scalars, and the operations that
//! make them a module over the block-measurable scalars — concatenation along
//! partitions, stable hulls, essential suprema and conditional limits of
//! eventually periodic sequences.
//!
//! Stability and membership tests use exact equality of floats; the numeric
//! tolerances of the crate live in the analysis and duality layers.

use crate::error::{Error, Result};
use crate::space::{Condition, FilteredSpace, PartitionOfUnity, Relation, SubAlgebra};
use serde::{Deserialize, Serialize};

/// Default cap on the number of blockwise selections a stable-hull
/// enumeration may produce.
pub const HULL_ENUMERATION_CAP: u128 = 1_000_000;

/// An element of the big module: one real value per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation {
                field: "random variable",
                index: Some(i),
                message: format!("entry must be finite, got {}", values[i]),
            });
        }
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.values[atom]
    }

    fn check_len(&self, n: usize, context: &'static str) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::Dimension {
                context,
                expected: n,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Pointwise sum.
    pub fn add(&self, other: &RandomVariable) -> Result<RandomVariable> {
        other.check_len(self.len(), "random variable sum")?;
        Ok(RandomVariable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &RandomVariable) -> Result<RandomVariable> {
        other.check_len(self.len(), "random variable difference")?;
        Ok(RandomVariable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &RandomVariable) -> Result<RandomVariable> {
        other.check_len(self.len(), "random variable product")?;
        Ok(RandomVariable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Product with a real scalar.
    pub fn scale(&self, r: f64) -> RandomVariable {
        RandomVariable {
            values: self.values.iter().map(|a| a * r).collect(),
        }
    }

    pub fn neg(&self) -> RandomVariable {
        self.scale(-1.0)
    }

    /// Exact blockwise-constancy test: does this vector belong to the small
    /// module of block-measurable elements?
    pub fn is_measurable_for(&self, algebra: &SubAlgebra) -> Result<bool> {
        self.check_len(algebra.atom_count(), "measurability test")?;
        Ok(algebra.blocks().iter().all(|block| {
            let v = self.values[block[0]];
            block.iter().all(|&i| self.values[i] == v)
        }))
    }

    /// Restriction to a condition: atoms of blocks outside `a` are zeroed.
    pub fn indicator_mul(&self, a: &Condition, space: &FilteredSpace) -> Result<RandomVariable> {
        self.check_len(space.n(), "indicator action")?;
        if a.len() != space.m() {
            return Err(Error::Dimension {
                context: "indicator action",
                expected: space.m(),
                got: a.len(),
            });
        }
        let mut values = self.values.clone();
        for (i, v) in values.iter_mut().enumerate() {
            if !a.contains(space.algebra().block_of(i)) {
                *v = 0.0;
            }
        }
        Ok(RandomVariable { values })
    }

    /// Product with a block-measurable scalar.
    pub fn scalar_mul(&self, s: &CondScalar, space: &FilteredSpace) -> Result<RandomVariable> {
        self.check_len(space.n(), "scalar action")?;
        s.check_len(space.m(), "scalar action")?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * s.get(space.algebra().block_of(i)))
            .collect();
        Ok(RandomVariable { values })
    }
}

/// An element of the small module: one real value per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CondScalar {
    values: Vec<f64>,
}

impl CondScalar {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation {
                field: "conditional scalar",
                index: Some(i),
                message: format!("entry must be finite, got {}", values[i]),
            });
        }
        Ok(Self { values })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            values: vec![0.0; m],
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Self { values: vec![c; m] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, block: usize) -> f64 {
        self.values[block]
    }

    pub(crate) fn check_len(&self, m: usize, context: &'static str) -> Result<()> {
        if self.values.len() != m {
            return Err(Error::Dimension {
                context,
                expected: m,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Block-constant expansion into the big module.
    pub fn as_rv(&self, space: &FilteredSpace) -> Result<RandomVariable> {
        self.check_len(space.m(), "block-constant expansion")?;
        let values = (0..space.n())
            .map(|i| self.values[space.algebra().block_of(i)])
            .collect();
        Ok(RandomVariable { values })
    }

    pub fn add(&self, other: &CondScalar) -> Result<CondScalar> {
        other.check_len(self.len(), "conditional scalar sum")?;
        Ok(CondScalar {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &CondScalar) -> Result<CondScalar> {
        other.check_len(self.len(), "conditional scalar difference")?;
        Ok(CondScalar {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, r: f64) -> CondScalar {
        CondScalar {
            values: self.values.iter().map(|a| a * r).collect(),
        }
    }

    /// Blockwise restriction: entries of blocks outside `a` are zeroed.
    pub fn indicator_mul(&self, a: &Condition) -> Result<CondScalar> {
        if a.len() != self.len() {
            return Err(Error::Dimension {
                context: "indicator action",
                expected: self.len(),
                got: a.len(),
            });
        }
        Ok(CondScalar {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| if a.contains(k) { v } else { 0.0 })
                .collect(),
        })
    }

    /// Mask of blocks whose value satisfies `relation threshold`.
    pub fn condition_where(&self, relation: Relation, threshold: f64) -> Condition {
        Condition::from_mask(
            self.values
                .iter()
                .map(|&v| relation.holds(v, threshold))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Extended real: finite value or a signed infinity.  Multiplication by zero
/// follows the convention `0 * inf = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Scalar multiple with the `0 * inf = 0` convention.
    pub fn mul_scalar(self, r: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * r),
            inf => {
                if r == 0.0 {
                    ExtReal::Finite(0.0)
                } else if (r > 0.0) == inf.is_pos_inf() {
                    ExtReal::PosInf
                } else {
                    ExtReal::NegInf
                }
            }
        }
    }

    /// As an IEEE float (`±inf` map to the float infinities).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl Serialize for RandomVariable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RandomVariable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let values = Vec::<f64>::deserialize(d)?;
        RandomVariable::new(values).map_err(D::Error::custom)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(ExtReal::PosInf),
                "-inf" => Ok(ExtReal::NegInf),
                other => Err(D::Error::custom(format!("not an extended real: {other}"))),
            },
        }
    }
}

/// One extended-real value per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtCondScalar {
    values: Vec<ExtReal>,
}

impl ExtCondScalar {
    pub fn new(values: Vec<ExtReal>) -> Self {
        Self { values }
    }

    pub fn finite(values: &CondScalar) -> Self {
        Self {
            values: values
                .values()
                .iter()
                .map(|&v| ExtReal::Finite(v))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn get(&self, block: usize) -> ExtReal {
        self.values[block]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// The finite vector, if every entry is finite.
    pub fn as_cond_scalar(&self) -> Option<CondScalar> {
        self.values
            .iter()
            .map(|v| v.finite())
            .collect::<Option<Vec<_>>>()
            .map(|values| CondScalar { values })
    }
}

/// Finite encoding of a conditional sequence: an initial segment followed by
/// a cycle that repeats forever.
#[derive(Debug, Clone, PartialEq)]
pub struct EventuallyPeriodicSeq {
    prefix: Vec<RandomVariable>,
    cycle: Vec<RandomVariable>,
}

impl EventuallyPeriodicSeq {
    pub fn new(prefix: Vec<RandomVariable>, cycle: Vec<RandomVariable>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Validation {
                field: "sequence cycle",
                index: None,
                message: "the cycle of an eventually periodic sequence must be nonempty".into(),
            });
        }
        let n = cycle[0].len();
        for member in prefix.iter().chain(&cycle) {
            member.check_len(n, "sequence member")?;
        }
        Ok(Self { prefix, cycle })
    }

    pub fn constant(x: RandomVariable) -> Self {
        Self {
            prefix: Vec::new(),
            cycle: vec![x],
        }
    }

    pub fn prefix(&self) -> &[RandomVariable] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[RandomVariable] {
        &self.cycle
    }

    /// The `k`-th member (0-based).
    pub fn member(&self, k: usize) -> &RandomVariable {
        if k < self.prefix.len() {
            &self.prefix[k]
        } else {
            &self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Pointwise comparison outcome in the almost-sure order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsOrder {
    Equal,
    Leq,
    Geq,
    Incomparable,
}

/// Exact pointwise comparison of two vectors.
pub fn as_order(x: &RandomVariable, y: &RandomVariable) -> Result<AsOrder> {
    y.check_len(x.len(), "order comparison")?;
    let mut le = true;
    let mut ge = true;
    for (a, b) in x.values().iter().zip(y.values()) {
        if a > b {
            le = false;
        }
        if a < b {
            ge = false;
        }
    }
    Ok(match (le, ge) {
        (true, true) => AsOrder::Equal,
        (true, false) => AsOrder::Leq,
        (false, true) => AsOrder::Geq,
        (false, false) => AsOrder::Incomparable,
    })
}

/// Glues `xs[k]` over the blocks of `parts[k]`: the unique vector agreeing
/// with each member on its part.
pub fn concatenate(
    xs: &[RandomVariable],
    parts: &PartitionOfUnity,
    space: &FilteredSpace,
) -> Result<RandomVariable> {
    if xs.len() != parts.len() {
        return Err(Error::Dimension {
            context: "concatenation",
            expected: parts.len(),
            got: xs.len(),
        });
    }
    if parts.parts()[0].len() != space.m() {
        return Err(Error::Dimension {
            context: "concatenation partition",
            expected: space.m(),
            got: parts.parts()[0].len(),
        });
    }
    for x in xs {
        x.check_len(space.n(), "concatenation member")?;
    }
    let owner = parts.owner_of_blocks();
    let values = (0..space.n())
        .map(|i| xs[owner[space.algebra().block_of(i)]].get(i))
        .collect();
    Ok(RandomVariable { values })
}

/// Membership in the stable hull of `generators`: on every block, `q` must
/// coincide exactly with some generator.
pub fn stable_hull_member(
    generators: &[RandomVariable],
    q: &RandomVariable,
    space: &FilteredSpace,
) -> Result<bool> {
    if generators.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for g in generators {
        g.check_len(space.n(), "stable hull generator")?;
    }
    q.check_len(space.n(), "stable hull candidate")?;
    Ok(space.algebra().blocks().iter().all(|block| {
        generators
            .iter()
            .any(|g| block.iter().all(|&i| g.get(i) == q.get(i)))
    }))
}

/// Enumerates the stable hull of `generators`: all blockwise selections,
/// deduplicated.  Fails if `|generators|^m` exceeds `cap` (use
/// [`HULL_ENUMERATION_CAP`] for the default).
pub fn stable_hull_enumerate(
    generators: &[RandomVariable],
    space: &FilteredSpace,
    cap: u128,
) -> Result<Vec<RandomVariable>> {
    if generators.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for g in generators {
        g.check_len(space.n(), "stable hull generator")?;
    }
    let k = generators.len() as u128;
    let m = space.m() as u32;
    let required = k.checked_pow(m).ok_or(Error::EnumerationCap {
        required: u128::MAX,
        cap,
    })?;
    if required > cap {
        return Err(Error::EnumerationCap { required, cap });
    }

    let mut out: Vec<RandomVariable> = Vec::new();
    let mut selection = vec![0usize; space.m()];
    loop {
        let values: Vec<f64> = (0..space.n())
            .map(|i| generators[selection[space.algebra().block_of(i)]].get(i))
            .collect();
        let candidate = RandomVariable { values };
        if !out.contains(&candidate) {
            out.push(candidate);
        }
        // odometer over selections
        let mut pos = 0;
        loop {
            if pos == selection.len() {
                return Ok(out);
            }
            selection[pos] += 1;
            if selection[pos] < generators.len() {
                break;
            }
            selection[pos] = 0;
            pos += 1;
        }
    }
}

/// Pointwise maximum of a nonempty finite family.
pub fn ess_sup_set(family: &[RandomVariable]) -> Result<RandomVariable> {
    pointwise_extreme(family, f64::max)
}

/// Pointwise minimum of a nonempty finite family.
pub fn ess_inf_set(family: &[RandomVariable]) -> Result<RandomVariable> {
    pointwise_extreme(family, f64::min)
}

fn pointwise_extreme(
    family: &[RandomVariable],
    pick: fn(f64, f64) -> f64,
) -> Result<RandomVariable> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    let mut values = first.values().to_vec();
    for member in &family[1..] {
        member.check_len(values.len(), "essential extremum")?;
        for (v, &w) in values.iter_mut().zip(member.values()) {
            *v = pick(*v, w);
        }
    }
    Ok(RandomVariable { values })
}

/// Pointwise limsup of an eventually periodic sequence: the prefix never
/// matters, only the cycle.
pub fn seq_limsup(seq: &EventuallyPeriodicSeq) -> RandomVariable {
    ess_sup_set(seq.cycle()).expect("cycle is nonempty")
}

/// Pointwise liminf of an eventually periodic sequence.
pub fn seq_liminf(seq: &EventuallyPeriodicSeq) -> RandomVariable {
    ess_inf_set(seq.cycle()).expect("cycle is nonempty")
}
