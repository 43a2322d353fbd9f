//! Scenario files, validated scenarios, tolerance plumbing, and the
//! consolidated run report.
//!
//! A scenario is one JSON document holding the space, named positions,
//! named measure specs, and named block polytopes.  Reports are plain
//! serde-serializable structures; all maps are ordered, so a report is
//! byte-deterministic given the same inputs, seed and tolerance (the
//! `timing` object is the only nondeterministic part).

use crate::diagnostics::{BlockPolytope, BlockSet, Halfspace};
use crate::duality::{attainment_check_with, represent, DualVariable};
use crate::error::{Error, Result};
use crate::l0::{CondScalar, RandomVariable};
use crate::risk::{check_axioms_with, AxiomReport, AxiomTolerances, RiskKind, RiskMeasure};
use crate::space::{FilteredSpace, ProbSpace};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

/// One atom of the scenario space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub label: String,
    pub prob: f64,
}

/// File-representable risk measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Entropic { gamma: f64 },
    WorstCase,
    Avar { lambda: f64 },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<RiskMeasure> {
        match self {
            MeasureSpec::Entropic { gamma } => RiskMeasure::entropic(*gamma),
            MeasureSpec::WorstCase => Ok(RiskMeasure::worst_case()),
            MeasureSpec::Avar { lambda } => RiskMeasure::avar(*lambda),
        }
    }
}

/// One block of a named polytope: exactly one of `vertices`/`halfspaces`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSetSpec {
    pub block: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Halfspace>>,
}

/// The on-disk scenario model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub atoms: Vec<AtomSpec>,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub positions: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSpec>,
    #[serde(default)]
    pub polytopes: BTreeMap<String, Vec<BlockSetSpec>>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validates the model into usable domain values.
    pub fn validate(&self) -> Result<Scenario> {
        let probs = self.atoms.iter().map(|a| a.prob).collect();
        let labels = self.atoms.iter().map(|a| a.label.clone()).collect();
        let atoms = ProbSpace::new(probs, labels)?;
        let space = FilteredSpace::new(atoms, self.blocks.clone())?;

        let mut positions = BTreeMap::new();
        for (name, values) in &self.positions {
            if values.len() != space.n() {
                return Err(Error::Validation {
                    field: "positions",
                    index: None,
                    message: format!(
                        "position `{name}` has length {}, expected {}",
                        values.len(),
                        space.n()
                    ),
                });
            }
            positions.insert(name.clone(), RandomVariable::new(values.clone())?);
        }

        let mut measures = BTreeMap::new();
        for (name, spec) in &self.measures {
            measures.insert(name.clone(), spec.build()?);
        }

        let mut polytopes = BTreeMap::new();
        for (name, entries) in &self.polytopes {
            let mut sets: Vec<Option<BlockSet>> = vec![None; space.m()];
            for entry in entries {
                if entry.block >= space.m() {
                    return Err(Error::Dimension {
                        context: "polytope block index",
                        expected: space.m(),
                        got: entry.block,
                    });
                }
                let set = match (&entry.vertices, &entry.halfspaces) {
                    (Some(vs), None) => BlockSet::Vertices(vs.clone()),
                    (None, Some(hs)) => BlockSet::Halfspaces(hs.clone()),
                    _ => {
                        return Err(Error::Validation {
                            field: "polytopes",
                            index: Some(entry.block),
                            message: format!(
                                "polytope `{name}` block {} must carry exactly one of \
                                 `vertices` or `halfspaces`",
                                entry.block
                            ),
                        })
                    }
                };
                if sets[entry.block].replace(set).is_some() {
                    return Err(Error::Validation {
                        field: "polytopes",
                        index: Some(entry.block),
                        message: format!("polytope `{name}` defines block {} twice", entry.block),
                    });
                }
            }
            let sets: Vec<BlockSet> = sets
                .into_iter()
                .enumerate()
                .map(|(k, set)| {
                    set.ok_or(Error::Validation {
                        field: "polytopes",
                        index: Some(k),
                        message: format!("polytope `{name}` is missing block {k}"),
                    })
                })
                .collect::<Result<_>>()?;
            polytopes.insert(name.clone(), BlockPolytope::new(&space, sets)?);
        }

        Ok(Scenario {
            space,
            positions,
            measures,
            polytopes,
        })
    }
}

/// A validated in-memory scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: FilteredSpace,
    pub positions: BTreeMap<String, RandomVariable>,
    pub measures: BTreeMap<String, RiskMeasure>,
    pub polytopes: BTreeMap<String, BlockPolytope>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::UnknownName {
        kind,
        name: name.to_string(),
        available: map.keys().cloned().collect(),
    })
}

impl Scenario {
    pub fn position(&self, name: &str) -> Result<&RandomVariable> {
        lookup(&self.positions, "position", name)
    }

    pub fn measure(&self, name: &str) -> Result<&RiskMeasure> {
        lookup(&self.measures, "measure", name)
    }

    pub fn polytope(&self, name: &str) -> Result<&BlockPolytope> {
        lookup(&self.polytopes, "polytope", name)
    }

    /// Reconstructs the on-disk model.  Fails for measures that have no file
    /// representation (penalty oracles, custom evaluators).
    pub fn to_file(&self) -> Result<ScenarioFile> {
        let atoms = self
            .space
            .atoms()
            .labels()
            .iter()
            .zip(self.space.atoms().probs())
            .map(|(label, &prob)| AtomSpec {
                label: label.clone(),
                prob,
            })
            .collect();
        let mut measures = BTreeMap::new();
        for (name, measure) in &self.measures {
            let spec = match measure.kind() {
                RiskKind::Entropic { gamma } => MeasureSpec::Entropic { gamma: *gamma },
                RiskKind::WorstCase => MeasureSpec::WorstCase,
                RiskKind::Avar { lambda } => MeasureSpec::Avar { lambda: *lambda },
                RiskKind::Penalty(_) | RiskKind::Custom(_) => {
                    return Err(Error::Validation {
                        field: "measures",
                        index: None,
                        message: format!("measure `{name}` has no file representation"),
                    })
                }
            };
            measures.insert(name.clone(), spec);
        }
        let mut polytopes = BTreeMap::new();
        for (name, polytope) in &self.polytopes {
            let entries = polytope
                .sets()
                .iter()
                .enumerate()
                .map(|(block, set)| match set {
                    BlockSet::Vertices(vs) => BlockSetSpec {
                        block,
                        vertices: Some(vs.clone()),
                        halfspaces: None,
                    },
                    BlockSet::Halfspaces(hs) => BlockSetSpec {
                        block,
                        vertices: None,
                        halfspaces: Some(hs.clone()),
                    },
                })
                .collect();
            polytopes.insert(name.clone(), entries);
        }
        Ok(ScenarioFile {
            atoms,
            blocks: self.space.algebra().blocks().to_vec(),
            positions: self
                .positions
                .iter()
                .map(|(name, x)| (name.clone(), x.values().to_vec()))
                .collect(),
            measures,
            polytopes,
        })
    }
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    ScenarioFile::parse(&text)?.validate()
}

/// Every check tolerance, derived from one base value.  The defaults
/// (base `1e-8`) reproduce the pinned constants used across the crate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// The base value (the CLI's `--tol`).
    pub base: f64,
    /// Representation gap bound: `10 * base`.
    pub represent_gap: f64,
    /// Attainment residual bound: `base`.
    pub attainment: f64,
    /// Monotonicity/cash-invariance/locality bound: `1e-4 * base`.
    pub exact_axioms: f64,
    /// Convexity/Lipschitz bound: `1e-2 * base`.
    pub soft_axioms: f64,
    /// Scalarization identity bound: `100 * base`.
    pub identity: f64,
}

impl Tolerances {
    pub fn from_base(base: f64) -> Self {
        Self {
            base,
            represent_gap: 10.0 * base,
            attainment: base,
            exact_axioms: 1e-4 * base,
            soft_axioms: 1e-2 * base,
            identity: 100.0 * base,
        }
    }

    pub fn axiom_tolerances(&self) -> AxiomTolerances {
        AxiomTolerances {
            monotonicity: self.exact_axioms,
            cash_invariance: self.exact_axioms,
            convexity: self.soft_axioms,
            locality: self.exact_axioms,
            lipschitz: self.soft_axioms,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::from_base(1e-8)
    }
}

/// Wall time and timestamp, excluded from determinism comparisons.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub wall_ms: f64,
    /// Seconds since the Unix epoch at report completion.
    pub unix_seconds: f64,
}

impl Timing {
    pub fn since(start: std::time::Instant) -> Self {
        Self {
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            unix_seconds: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
        }
    }
}

/// The envelope of every CLI run: command echo, inputs, payload, timing.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub scenario: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub results: serde_json::Value,
    /// The only nondeterministic field.
    pub timing: Timing,
}

/// Evaluation, representation and attainment for one (measure, position)
/// pair; errors are carried, not raised.
#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub measure: String,
    pub position: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<CondScalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub represent: Option<RepresentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attainment: Option<AttainmentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentSummary {
    pub value: CondScalar,
    pub gap: CondScalar,
    pub gap_tolerance: f64,
    pub gap_ok: bool,
    pub maximizer: DualVariable,
    pub iterations: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttainmentSummary {
    pub attained: Vec<bool>,
    pub residual: CondScalar,
    pub tolerance: f64,
}

/// Axiom suite outcome for one named measure.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureAxioms {
    pub measure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<AxiomReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The consolidated report: axioms per measure, then one block per
/// (measure, position) pair in name order.
#[derive(Debug, Clone, Serialize)]
pub struct ConsolidatedReport {
    pub axioms: Vec<MeasureAxioms>,
    pub pairs: Vec<PairReport>,
}

fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("CRISK_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
        {
            builder = builder.num_threads(n);
        }
        builder.build().expect("report thread pool")
    })
}

fn pair_report(
    scenario: &Scenario,
    measure_name: &str,
    position_name: &str,
    tolerances: &Tolerances,
) -> PairReport {
    let mut out = PairReport {
        measure: measure_name.to_string(),
        position: position_name.to_string(),
        value: None,
        represent: None,
        attainment: None,
        error: None,
    };
    let measure = &scenario.measures[measure_name];
    let position = &scenario.positions[position_name];
    let run = || -> Result<(CondScalar, RepresentSummary, AttainmentSummary)> {
        let value = measure.eval(position, &scenario.space)?;
        let representation = represent(measure, position, &scenario.space)?;
        let attainment =
            attainment_check_with(measure, position, &scenario.space, tolerances.attainment)?;
        Ok((
            value,
            RepresentSummary {
                gap_ok: representation.gap.max_abs() <= tolerances.represent_gap,
                gap_tolerance: tolerances.represent_gap,
                value: representation.value,
                gap: representation.gap,
                maximizer: representation.maximizer,
                iterations: representation.iterations,
            },
            AttainmentSummary {
                attained: attainment.attained,
                residual: attainment.residual,
                tolerance: attainment.tolerance,
            },
        ))
    };
    match run() {
        Ok((value, represent, attainment)) => {
            out.value = Some(value);
            out.represent = Some(represent);
            out.attainment = Some(attainment);
        }
        Err(err) => out.error = Some(err.to_string()),
    }
    out
}

/// Runs eval + represent + attain for every (measure, position) pair and the
/// axiom suite for every measure.  Items run in parallel (capped by the
/// `CRISK_THREADS` environment variable); output order is by name,
/// independent of scheduling.  Per-item errors are embedded.
pub fn consolidated_report(
    scenario: &Scenario,
    trials: usize,
    seed: u64,
    tolerances: &Tolerances,
) -> ConsolidatedReport {
    use rayon::prelude::*;

    let measure_names: Vec<&String> = scenario.measures.keys().collect();
    let position_names: Vec<&String> = scenario.positions.keys().collect();
    let pairs: Vec<(usize, usize)> = (0..measure_names.len())
        .flat_map(|i| (0..position_names.len()).map(move |j| (i, j)))
        .collect();

    let (axioms, pair_reports) = thread_pool().install(|| {
        let axioms: Vec<MeasureAxioms> = measure_names
            .par_iter()
            .map(|name| {
                match check_axioms_with(
                    &scenario.measures[*name],
                    &scenario.space,
                    trials,
                    seed,
                    &tolerances.axiom_tolerances(),
                ) {
                    Ok(report) => MeasureAxioms {
                        measure: (*name).clone(),
                        report: Some(report),
                        error: None,
                    },
                    Err(err) => MeasureAxioms {
                        measure: (*name).clone(),
                        report: None,
                        error: Some(err.to_string()),
                    },
                }
            })
            .collect();
        let pair_reports: Vec<PairReport> = pairs
            .par_iter()
            .map(|&(i, j)| pair_report(scenario, measure_names[i], position_names[j], tolerances))
            .collect();
        (axioms, pair_reports)
    });

    ConsolidatedReport {
        axioms,
        pairs: pair_reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::CustomRisk;

    fn sample_json() -> &'static str {
        r#"{
            "atoms": [
                {"label": "uu", "prob": 0.25},
                {"label": "ud", "prob": 0.25},
                {"label": "du", "prob": 0.25},
                {"label": "dd", "prob": 0.25}
            ],
            "blocks": [[0, 1], [2, 3]],
            "positions": {"x": [1.0, 3.0, 2.0, 6.0], "flat": [0.0, 0.0, 0.0, 0.0]},
            "measures": {
                "ent": {"kind": "entropic", "gamma": 1.0},
                "wc": {"kind": "worst_case"},
                "tail": {"kind": "avar", "lambda": 0.5}
            },
            "polytopes": {
                "box": [
                    {"block": 0, "vertices": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]},
                    {"block": 1, "halfspaces": [
                        {"a": [1.0, 0.0], "b": 1.0},
                        {"a": [-1.0, 0.0], "b": 0.0},
                        {"a": [0.0, 1.0], "b": 1.0},
                        {"a": [0.0, -1.0], "b": 0.0}
                    ]}
                ]
            }
        }"#
    }

    #[test]
    fn loads_and_validates() {
        let scenario = ScenarioFile::parse(sample_json())
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(scenario.space.n(), 4);
        assert_eq!(scenario.space.m(), 2);
        assert_eq!(scenario.positions.len(), 2);
        assert_eq!(scenario.measures.len(), 3);
        assert!(scenario.polytope("box").is_ok());
    }

    #[test]
    fn minimal_single_block_scenario() {
        let text = r#"{
            "atoms": [{"label": "u", "prob": 0.5}, {"label": "d", "prob": 0.5}],
            "blocks": [[0, 1]]
        }"#;
        let scenario = ScenarioFile::parse(text).unwrap().validate().unwrap();
        assert_eq!(scenario.space.m(), 1);
    }

    #[test]
    fn bad_probability_sum_names_the_field() {
        let text = r#"{
            "atoms": [{"label": "u", "prob": 0.5}, {"label": "d", "prob": 0.4}],
            "blocks": [[0, 1]]
        }"#;
        let err = ScenarioFile::parse(text).unwrap().validate().unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "atoms.prob"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn out_of_range_block_index_is_a_dimension_error() {
        let text = r#"{
            "atoms": [{"label": "u", "prob": 0.5}, {"label": "d", "prob": 0.5}],
            "blocks": [[0, 7]]
        }"#;
        let err = ScenarioFile::parse(text).unwrap().validate().unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn unknown_names_list_alternatives() {
        let scenario = ScenarioFile::parse(sample_json())
            .unwrap()
            .validate()
            .unwrap();
        let err = scenario.measure("nope").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("ent") && message.contains("wc") && message.contains("tail"));
    }

    #[test]
    fn round_trip_is_semantically_identical() {
        let parsed = ScenarioFile::parse(sample_json()).unwrap();
        let rebuilt = parsed.validate().unwrap().to_file().unwrap();
        assert_eq!(parsed, rebuilt);
    }

    #[test]
    fn consolidated_report_covers_all_pairs_in_order() {
        let scenario = ScenarioFile::parse(sample_json())
            .unwrap()
            .validate()
            .unwrap();
        let report = consolidated_report(&scenario, 50, 7, &Tolerances::default());
        assert_eq!(report.pairs.len(), 6); // 3 measures x 2 positions
        assert_eq!(report.axioms.len(), 3);
        let keys: Vec<(String, String)> = report
            .pairs
            .iter()
            .map(|p| (p.measure.clone(), p.position.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for pair in &report.pairs {
            assert!(pair.error.is_none(), "{:?}", pair.error);
            assert!(pair.represent.as_ref().unwrap().gap_ok);
        }
    }

    #[test]
    fn failing_measure_is_isolated_in_the_batch() {
        let mut scenario = ScenarioFile::parse(sample_json())
            .unwrap()
            .validate()
            .unwrap();
        scenario.measures.insert(
            "broken".into(),
            RiskMeasure::custom(CustomRisk::new("broken", |_, _| {
                Err(Error::Parameter("always fails".into()))
            })),
        );
        let report = consolidated_report(&scenario, 10, 7, &Tolerances::default());
        let broken: Vec<&PairReport> = report
            .pairs
            .iter()
            .filter(|p| p.measure == "broken")
            .collect();
        assert_eq!(broken.len(), 2);
        for pair in broken {
            assert!(pair.error.is_some());
        }
        // the rest still succeed
        assert!(report
            .pairs
            .iter()
            .filter(|p| p.measure != "broken")
            .all(|p| p.error.is_none()));
    }

    #[test]
    fn empty_positions_make_an_empty_pair_list() {
        let text = r#"{
            "atoms": [{"label": "u", "prob": 0.5}, {"label": "d", "prob": 0.5}],
            "blocks": [[0], [1]],
            "measures": {"wc": {"kind": "worst_case"}}
        }"#;
        let scenario = ScenarioFile::parse(text).unwrap().validate().unwrap();
        let report = consolidated_report(&scenario, 10, 7, &Tolerances::default());
        assert!(report.pairs.is_empty());
        assert_eq!(report.axioms.len(), 1);
    }

    #[test]
    fn report_json_is_deterministic() {
        let scenario = ScenarioFile::parse(sample_json())
            .unwrap()
            .validate()
            .unwrap();
        let a = consolidated_report(&scenario, 25, 7, &Tolerances::default());
        let b = consolidated_report(&scenario, 25, 7, &Tolerances::default());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn tolerances_default_matches_pinned_constants() {
        let t = Tolerances::default();
        assert_eq!(t.represent_gap, 1e-7);
        assert_eq!(t.attainment, 1e-8);
        assert_eq!(t.exact_axioms, 1e-12);
        assert_eq!(t.soft_axioms, 1e-10);
        assert_eq!(t.identity, 1e-6);
    }
}
