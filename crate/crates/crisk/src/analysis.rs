//! Conditional expectation, conditional Lᵖ norms, the Lᵖ–Lᵠ pairing, and
//! seminorm neighbourhoods with their gauge functionals.
//!
//! Everything here is blockwise: a conditional quantity is one number per
//! block.  The dual norm is deliberately *not* computed as the conjugate
//! norm formula — it builds the extremal pairing vector and evaluates the
//! pairing, so that the isometry `dual_norm(y, q) == norm(y, q)` remains a
//! two-route check.

use crate::error::{Error, Result};
use crate::l0::{CondScalar, ExtCondScalar, ExtReal, RandomVariable};
use crate::space::FilteredSpace;
use std::collections::BTreeMap;

/// Exponent of a conditional Lᵖ norm: a finite `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lp {
    Finite(f64),
    Inf,
}

impl Lp {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            return Ok(Lp::Inf);
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::Parameter(format!(
                "Lp exponent must satisfy p >= 1, got {p}"
            )));
        }
        Ok(Lp::Finite(p))
    }

    /// Conjugate exponent: `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Lp {
        match self {
            Lp::Inf => Lp::Finite(1.0),
            Lp::Finite(p) => {
                if p == 1.0 {
                    Lp::Inf
                } else {
                    Lp::Finite(p / (p - 1.0))
                }
            }
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Lp::Finite(p) => p,
            Lp::Inf => f64::INFINITY,
        }
    }
}

/// Conditional expectation: per block, the probability-weighted average.
pub fn cond_expectation(x: &RandomVariable, space: &FilteredSpace) -> Result<CondScalar> {
    if x.len() != space.n() {
        return Err(Error::Dimension {
            context: "conditional expectation",
            expected: space.n(),
            got: x.len(),
        });
    }
    let values = (0..space.m())
        .map(|k| {
            let num: f64 = space
                .algebra()
                .block(k)
                .iter()
                .map(|&i| space.atoms().prob(i) * x.get(i))
                .sum();
            num / space.algebra().block_prob(k)
        })
        .collect();
    CondScalar::new(values)
}

/// Conditional Lᵖ norm: `E[|x|^p | F]^{1/p}` per block, blockwise max at
/// `p = inf`.
pub fn cond_norm(x: &RandomVariable, p: Lp, space: &FilteredSpace) -> Result<CondScalar> {
    if x.len() != space.n() {
        return Err(Error::Dimension {
            context: "conditional norm",
            expected: space.n(),
            got: x.len(),
        });
    }
    let values = (0..space.m())
        .map(|k| match p {
            Lp::Inf => space
                .algebra()
                .block(k)
                .iter()
                .map(|&i| x.get(i).abs())
                .fold(0.0, f64::max),
            Lp::Finite(p) => {
                let moment: f64 = space
                    .algebra()
                    .block(k)
                    .iter()
                    .map(|&i| space.cond_prob(i) * x.get(i).abs().powf(p))
                    .sum();
                moment.powf(1.0 / p)
            }
        })
        .collect();
    CondScalar::new(values)
}

/// Dual norm of `y` as a functional on the conjugate Lᵖ module, `q` in
/// `(1, inf]`: per block, the supremum of `E[xy|F]` over the unit ball of the
/// conjugate norm, computed by building the extremal `x` and evaluating the
/// pairing.
pub fn cond_dual_norm(y: &RandomVariable, q: Lp, space: &FilteredSpace) -> Result<CondScalar> {
    if y.len() != space.n() {
        return Err(Error::Dimension {
            context: "conditional dual norm",
            expected: space.n(),
            got: y.len(),
        });
    }
    match q {
        Lp::Finite(q) if q <= 1.0 => {
            return Err(Error::Parameter(format!(
                "dual norm exponent must satisfy q > 1, got {q}"
            )))
        }
        _ => {}
    }
    let values = (0..space.m())
        .map(|k| {
            let block = space.algebra().block(k);
            if block.iter().all(|&i| y.get(i) == 0.0) {
                return 0.0;
            }
            // extremal x in the unit ball of the conjugate norm
            let mut x = vec![0.0; block.len()];
            match q {
                Lp::Inf => {
                    // conjugate p = 1: point mass at the largest |y_i|
                    let mut best = 0usize;
                    for (j, &i) in block.iter().enumerate() {
                        if y.get(i).abs() > y.get(block[best]).abs() {
                            best = j;
                        }
                    }
                    let i = block[best];
                    x[best] = y.get(i).signum() / space.cond_prob(i);
                }
                Lp::Finite(q) => {
                    let p = q / (q - 1.0);
                    for (j, &i) in block.iter().enumerate() {
                        x[j] = y.get(i).signum() * y.get(i).abs().powf(q - 1.0);
                    }
                    let norm_p: f64 = block
                        .iter()
                        .enumerate()
                        .map(|(j, &i)| space.cond_prob(i) * x[j].abs().powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p);
                    for v in &mut x {
                        *v /= norm_p;
                    }
                }
            }
            // pairing E[xy | F] on this block
            block
                .iter()
                .enumerate()
                .map(|(j, &i)| space.cond_prob(i) * x[j] * y.get(i))
                .sum()
        })
        .collect();
    CondScalar::new(values)
}

/// A conditional seminorm usable in neighbourhood definitions: either a
/// conditional Lᵖ norm or the pairing seminorm `x -> |E[xy|F]|` against a
/// fixed dual element (the building block of the weak topologies).
#[derive(Debug, Clone)]
pub enum Seminorm {
    Lp(Lp),
    Pairing(RandomVariable),
}

impl Seminorm {
    pub fn evaluate(&self, x: &RandomVariable, space: &FilteredSpace) -> Result<CondScalar> {
        match self {
            Seminorm::Lp(p) => cond_norm(x, *p, space),
            Seminorm::Pairing(y) => {
                let product = x.mul(y)?;
                let pairing = cond_expectation(&product, space)?;
                CondScalar::new(pairing.values().iter().map(|v| v.abs()).collect())
            }
        }
    }
}

/// Named seminorms.  The default registry carries `lp:1`, `lp:2` and
/// `lp:inf`; pairing seminorms are registered by the caller.
#[derive(Debug, Clone, Default)]
pub struct SeminormRegistry {
    map: BTreeMap<String, Seminorm>,
}

impl SeminormRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with the conditional Lᵖ norms for `p` in `{1, 2, inf}`.
    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        reg.insert("lp:1", Seminorm::Lp(Lp::Finite(1.0)));
        reg.insert("lp:2", Seminorm::Lp(Lp::Finite(2.0)));
        reg.insert("lp:inf", Seminorm::Lp(Lp::Inf));
        reg
    }

    pub fn insert(&mut self, id: impl Into<String>, seminorm: Seminorm) {
        self.map.insert(id.into(), seminorm);
    }

    pub fn get(&self, id: &str) -> Result<&Seminorm> {
        self.map
            .get(id)
            .ok_or_else(|| Error::UnknownSeminorm(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

/// A stable seminorm neighbourhood of zero: per block, a finite family of
/// seminorm ids and a strictly positive radius.
#[derive(Debug, Clone)]
pub struct CondSeminormBall {
    families: Vec<Vec<String>>,
    radius: CondScalar,
}

impl CondSeminormBall {
    pub fn new(families: Vec<Vec<String>>, radius: CondScalar) -> Result<Self> {
        if families.len() != radius.len() {
            return Err(Error::Dimension {
                context: "seminorm ball",
                expected: radius.len(),
                got: families.len(),
            });
        }
        for (k, family) in families.iter().enumerate() {
            if family.is_empty() {
                return Err(Error::Validation {
                    field: "seminorm families",
                    index: Some(k),
                    message: "each block needs a nonempty seminorm family".into(),
                });
            }
        }
        if let Some(k) = radius.values().iter().position(|&r| r <= 0.0) {
            return Err(Error::Validation {
                field: "ball radius",
                index: Some(k),
                message: format!("radius must be strictly positive, got {}", radius.get(k)),
            });
        }
        Ok(Self { families, radius })
    }

    /// Same seminorm family and radius on every block.
    pub fn homogeneous(ids: &[&str], radius: f64, m: usize) -> Result<Self> {
        let family: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
        Self::new(vec![family; m], CondScalar::constant(m, radius))
    }

    pub fn families(&self) -> &[Vec<String>] {
        &self.families
    }

    pub fn radius(&self) -> &CondScalar {
        &self.radius
    }
}

fn family_sup(
    x: &RandomVariable,
    family: &[String],
    block: usize,
    registry: &SeminormRegistry,
    space: &FilteredSpace,
) -> Result<f64> {
    let mut sup = f64::NEG_INFINITY;
    for id in family {
        let value = registry.get(id)?.evaluate(x, space)?;
        sup = sup.max(value.get(block));
    }
    Ok(sup)
}

/// Membership of `x` in a seminorm ball: on each block the family supremum
/// must not exceed the radius.
pub fn ball_member(
    x: &RandomVariable,
    ball: &CondSeminormBall,
    registry: &SeminormRegistry,
    space: &FilteredSpace,
) -> Result<bool> {
    if ball.families.len() != space.m() {
        return Err(Error::Dimension {
            context: "ball membership",
            expected: space.m(),
            got: ball.families.len(),
        });
    }
    for k in 0..space.m() {
        if family_sup(x, &ball.families[k], k, registry, space)? > ball.radius.get(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gauge (Minkowski functional) of the seminorm ball at `x`: per block, the
/// family supremum divided by the radius.  Finite for every finite `x`, but
/// typed as extended because gauges of general sets need not be.
pub fn gauge(
    x: &RandomVariable,
    ball: &CondSeminormBall,
    registry: &SeminormRegistry,
    space: &FilteredSpace,
) -> Result<ExtCondScalar> {
    if ball.families.len() != space.m() {
        return Err(Error::Dimension {
            context: "gauge",
            expected: space.m(),
            got: ball.families.len(),
        });
    }
    let mut values = Vec::with_capacity(space.m());
    for k in 0..space.m() {
        let sup = family_sup(x, &ball.families[k], k, registry, space)?;
        values.push(ExtReal::Finite(sup / ball.radius.get(k)));
    }
    Ok(ExtCondScalar::new(values))
}
