//! The bounds pipeline: exclusivity graph, independence number, Lovász
//! number, clique-constrained packing, optional two-copy bound, and the
//! requirement check, assembled into one [`BoundsReport`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{fixtures, parse_scenario, DocumentErrors, ScenarioDocument};
use crate::exact::{format_rational, to_f64, Rational};
use crate::graphs::{
    fractional_packing, independence_number, two_copy_e_bound, ExactLimits, ExclusivityGraph, GraphError,
    PackingResult, TwoCopyBound,
};
use crate::optics::{self, BunchingEventSpec, BunchingTerm, OpticsConfig, OpticsError};
use crate::scenario::{check_requirements, RequirementReport, ScenarioError};
use crate::theta::{kcbs_realization_check, lovasz_theta, KcbsRealization, SolverConfig, ThetaError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{stage}: {source}")]
    Graph { stage: &'static str, source: GraphError },
    #[error("{stage}: {source}")]
    Theta { stage: &'static str, source: ThetaError },
    #[error("{stage}: {source}")]
    Scenario { stage: &'static str, source: ScenarioError },
    #[error("{stage}: {source}")]
    Optics { stage: &'static str, source: OpticsError },
    #[error(transparent)]
    Document(#[from] DocumentErrors),
    #[error("unknown built-in scenario {0:?} (expected kcbs, specker, bunching-kcbs or bunching-specker)")]
    UnknownBuiltin(String),
    #[error("simulation: no optical event matches inequality term {0}")]
    UnmatchedTerm(String),
}

impl AnalysisError {
    /// Capacity limits and non-convergence, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            AnalysisError::Graph { source, .. } => {
                matches!(source, GraphError::Capacity { .. } | GraphError::WeightOverflow)
            }
            AnalysisError::Theta { source, .. } => {
                matches!(source, ThetaError::Capacity { .. } | ThetaError::Convergence { .. })
            }
            AnalysisError::Optics { source, .. } => matches!(source, OpticsError::Capacity { .. }),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub solver: SolverConfig,
    pub limits: ExactLimits,
    pub two_copy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusivitySummary {
    /// Event label per vertex.
    pub vertices: Vec<String>,
    pub events: Vec<String>,
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub weights: Vec<Rational>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NchvBound {
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
    pub witness: Vec<usize>,
    pub witness_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmUpperBound {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub dual_gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub message: String,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub experiment: String,
    pub terms: Vec<BunchingTerm>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub scenario: String,
    pub exclusivity: ExclusivitySummary,
    pub nchv_bound: NchvBound,
    pub qm_upper: QmUpperBound,
    pub single_copy_e_bound: PackingResult,
    pub two_copy_e_bound: Option<TwoCopyBound>,
    pub requirements: RequirementReport,
    pub verdicts: Vec<Verdict>,
    pub simulation: Option<SimulationReport>,
    pub kcbs_realization: Option<KcbsRealization>,
}

impl BoundsReport {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn from_machine(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }
}

/// The exclusivity graph of a document's inequality, without any bounds.
pub fn exclusivity_summary(doc: &ScenarioDocument) -> Result<ExclusivitySummary, AnalysisError> {
    let graph = doc
        .inequality
        .weighted_graph(&doc.scenario)
        .map_err(|source| AnalysisError::Scenario {
            stage: "exclusivity",
            source,
        })?;
    Ok(summarize(doc, &graph))
}

fn summarize(doc: &ScenarioDocument, graph: &ExclusivityGraph) -> ExclusivitySummary {
    ExclusivitySummary {
        vertices: doc.term_labels.clone(),
        events: doc.inequality.events().iter().map(ToString::to_string).collect(),
        weights: graph.weights(),
        edges: graph.edges().collect(),
    }
}

pub fn analyze(doc: &ScenarioDocument, opts: &AnalysisOptions) -> Result<BoundsReport, AnalysisError> {
    let scenario = &doc.scenario;
    let inequality = &doc.inequality;
    let graph = inequality
        .weighted_graph(scenario)
        .map_err(|source| AnalysisError::Scenario {
            stage: "exclusivity",
            source,
        })?;

    let alpha = independence_number(&graph, &opts.limits).map_err(|source| AnalysisError::Graph {
        stage: "independence_number",
        source,
    })?;
    let theta = lovasz_theta(&graph, &opts.solver).map_err(|source| AnalysisError::Theta {
        stage: "lovasz_theta",
        source,
    })?;
    let packing = fractional_packing(&graph, &opts.limits).map_err(|source| AnalysisError::Graph {
        stage: "fractional_packing",
        source,
    })?;
    let two_copy = if opts.two_copy {
        Some(
            two_copy_e_bound(&graph, &opts.limits).map_err(|source| AnalysisError::Graph {
                stage: "two_copy_e_bound",
                source,
            })?,
        )
    } else {
        None
    };
    let requirements = check_requirements(scenario, inequality).map_err(|source| AnalysisError::Scenario {
        stage: "requirements",
        source,
    })?;

    let label = |v: usize| doc.term_labels[v].clone();
    let exclusivity = summarize(doc, &graph);
    let nchv_bound = NchvBound {
        value: alpha.value.clone(),
        witness_labels: alpha.witness.iter().map(|&v| label(v)).collect(),
        witness: alpha.witness,
    };
    let qm_upper = QmUpperBound {
        value: theta.value,
        lower: theta.lower,
        upper: theta.upper,
        dual_gap: theta.dual_gap,
        iterations: theta.iterations,
    };

    let mut verdicts = vec![contextuality_verdict(&requirements)];
    if let Some(claimed) = &inequality.claimed_nchv_bound {
        let passed = *claimed == nchv_bound.value;
        verdicts.push(Verdict {
            check: "claimed-nchv-bound".into(),
            passed,
            message: if passed {
                format!(
                    "claimed bound {} equals the independence number",
                    format_rational(claimed)
                )
            } else {
                format!(
                    "claimed bound {} but the exclusivity graph ({} edge(s)) has independence number {}",
                    format_rational(claimed),
                    exclusivity.edges.len(),
                    format_rational(&nchv_bound.value)
                )
            },
            witnesses: vec![format!(
                "independent set {{{}}} of weight {}",
                nchv_bound.witness_labels.join(", "),
                format_rational(&nchv_bound.value)
            )],
        });
    }
    if let Some(claimed) = inequality.claimed_qm_bound {
        let slack = opts.solver.tolerance;
        let passed = claimed >= qm_upper.lower - slack && claimed <= qm_upper.upper + slack;
        verdicts.push(Verdict {
            check: "claimed-qm-bound".into(),
            passed,
            message: if passed {
                format!("claimed bound {claimed} matches the Lovász number")
            } else {
                format!("claimed bound {claimed} differs from the Lovász number")
            },
            witnesses: vec![format!("Lovász number in [{}, {}]", qm_upper.lower, qm_upper.upper)],
        });
    }

    Ok(BoundsReport {
        scenario: doc.name.clone(),
        exclusivity,
        nchv_bound,
        qm_upper,
        single_copy_e_bound: packing,
        two_copy_e_bound: two_copy,
        requirements,
        verdicts,
        simulation: None,
        kcbs_realization: None,
    })
}

fn contextuality_verdict(req: &RequirementReport) -> Verdict {
    let failures = req.failures();
    if failures.is_empty() {
        return Verdict {
            check: "contextuality-test".into(),
            passed: true,
            message: "all three requirements hold; violations of the NCHV bound are meaningful".into(),
            witnesses: Vec::new(),
        };
    }
    let names: Vec<&str> = failures.iter().map(|(name, _)| *name).collect();
    Verdict {
        check: "contextuality-test".into(),
        passed: false,
        message: format!("not a contextuality test: requirement(s) {} fail", names.join(", ")),
        witnesses: failures
            .iter()
            .flat_map(|(name, check)| check.witnesses.iter().map(move |w| format!("{name}: {w}")))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Kcbs,
    Specker,
    BunchingKcbs,
    BunchingSpecker,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::Kcbs,
        Builtin::Specker,
        Builtin::BunchingKcbs,
        Builtin::BunchingSpecker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Kcbs => "kcbs",
            Builtin::Specker => "specker",
            Builtin::BunchingKcbs => "bunching-kcbs",
            Builtin::BunchingSpecker => "bunching-specker",
        }
    }

    pub fn document_text(self) -> &'static str {
        match self {
            Builtin::Kcbs => fixtures::KCBS,
            Builtin::Specker => fixtures::SPECKER,
            Builtin::BunchingKcbs => fixtures::BUNCHING_KCBS,
            Builtin::BunchingSpecker => fixtures::BUNCHING_SPECKER,
        }
    }

    pub fn document(self) -> ScenarioDocument {
        parse_scenario(self.document_text()).expect("shipped fixtures are valid")
    }

    /// Optical events behind the bunching scenarios.
    pub fn optical_specs(self) -> Option<Vec<BunchingEventSpec>> {
        match self {
            Builtin::BunchingKcbs => Some(optics::bunching_kcbs_specs()),
            Builtin::BunchingSpecker => Some(optics::bunching_specker_specs()),
            _ => None,
        }
    }
}

impl FromStr for Builtin {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| AnalysisError::UnknownBuiltin(s.to_string()))
    }
}

/// Simulates the optical events of a bunching scenario and evaluates the
/// inequality on the resulting probabilities.
pub fn simulate(builtin: Builtin) -> Result<Option<SimulationReport>, AnalysisError> {
    let Some(specs) = builtin.optical_specs() else {
        return Ok(None);
    };
    let doc = builtin.document();
    let sum = optics::simulate_events(&specs, &OpticsConfig::default()).map_err(|source| AnalysisError::Optics {
        stage: "simulation",
        source,
    })?;
    let probabilities: HashMap<_, _> = specs
        .iter()
        .zip(&sum.terms)
        .map(|(spec, term)| (spec.as_event(), term.probability))
        .collect();
    for term in doc.inequality.terms() {
        if !probabilities.contains_key(&term.event) {
            return Err(AnalysisError::UnmatchedTerm(term.event.to_string()));
        }
    }
    let total = doc
        .inequality
        .evaluate(&probabilities)
        .map_err(|source| AnalysisError::Scenario {
            stage: "simulation",
            source,
        })?;
    Ok(Some(SimulationReport {
        experiment: builtin.name().into(),
        terms: sum.terms,
        total,
    }))
}

pub fn run_builtin(builtin: Builtin, opts: &AnalysisOptions) -> Result<BoundsReport, AnalysisError> {
    let doc = builtin.document();
    let mut report = analyze(&doc, opts)?;
    if builtin == Builtin::Kcbs {
        report.kcbs_realization = Some(kcbs_realization_check());
    }
    if let Some(sim) = simulate(builtin)? {
        report.verdicts.push(simulated_value_verdict(&report, &doc, &sim));
        report.simulation = Some(sim);
    }
    Ok(report)
}

/// Compares a simulated value with the bound the inequality was presented
/// with. The comparison only counts as a violation when every requirement
/// holds.
fn simulated_value_verdict(report: &BoundsReport, doc: &ScenarioDocument, sim: &SimulationReport) -> Verdict {
    let (bound_text, bound) = match &doc.inequality.claimed_nchv_bound {
        Some(b) => (format_rational(b), to_f64(b)),
        None => (
            format_rational(&report.nchv_bound.value),
            to_f64(&report.nchv_bound.value),
        ),
    };
    let relation = if sim.total > bound {
        "exceeds"
    } else {
        "does not exceed"
    };
    if report.requirements.all_pass() {
        let message = if sim.total > bound {
            format!("simulated value {} violates NCHV bound {bound_text}", sim.total)
        } else {
            format!("simulated value {} respects NCHV bound {bound_text}", sim.total)
        };
        return Verdict {
            check: "simulated-value".into(),
            passed: true,
            message,
            witnesses: Vec::new(),
        };
    }
    let contextuality = report.verdict("contextuality-test").expect("always emitted");
    Verdict {
        check: "simulated-value".into(),
        passed: false,
        message: format!(
            "simulated value {} {relation} the bound {bound_text}, but requirements fail; comparison meaningless",
            sim.total
        ),
        witnesses: contextuality.witnesses.clone(),
    }
}

/// Human-readable rendering of an exclusivity graph.
pub fn render_exclusivity(ex: &ExclusivitySummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "exclusivity graph: {} vertices, {} edges",
        ex.vertices.len(),
        ex.edges.len()
    );
    for (i, (label, event)) in ex.vertices.iter().zip(&ex.events).enumerate() {
        let _ = writeln!(
            out,
            "  {i:>3}  {label:<12} {event}  weight {}",
            format_rational(&ex.weights[i])
        );
    }
    if !ex.edges.is_empty() {
        let edges: Vec<String> = ex.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = writeln!(out, "  edges: {}", edges.join(" "));
    }
    out
}

/// Human-readable rendering of an optical simulation.
pub fn render_simulation(sim: &SimulationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "simulation ({})", sim.experiment);
    for t in &sim.terms {
        let _ = writeln!(
            out,
            "  {:<10} {:<15} input {}  {:<8} P = {:.12}",
            t.label,
            t.preparation,
            t.input,
            t.predicate.outcome_label(),
            t.probability
        );
    }
    let _ = writeln!(out, "  total {:.12}", sim.total);
    out
}

/// Human-readable rendering.
pub fn render_text(report: &BoundsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}\n", report.scenario);
    out.push_str(&render_exclusivity(&report.exclusivity));

    let _ = writeln!(out, "\nbounds");
    let _ = writeln!(
        out,
        "  NCHV (independence number)     {}   witness {{{}}}",
        format_rational(&report.nchv_bound.value),
        report.nchv_bound.witness_labels.join(", ")
    );
    let q = &report.qm_upper;
    let _ = writeln!(
        out,
        "  QM upper (Lovász number)       {:.10} ± {:.1e}   ({} iterations)",
        q.value, q.dual_gap, q.iterations
    );
    let _ = writeln!(
        out,
        "  exclusivity, single copy       {}",
        format_rational(&report.single_copy_e_bound.value)
    );
    if let Some(t) = &report.two_copy_e_bound {
        let _ = writeln!(
            out,
            "  exclusivity, two copies        {:.10}   (α of square = {})",
            t.value,
            format_rational(&t.product_independence.value)
        );
    }
    if let Some(k) = &report.kcbs_realization {
        let _ = writeln!(
            out,
            "  qutrit realization             {:.10}   (max consecutive overlap {:.1e})",
            k.value, k.max_consecutive_overlap
        );
    }

    let _ = writeln!(out, "\nrequirements");
    let r = &report.requirements;
    for (name, check) in [
        ("(i)   same state", &r.same_state),
        ("(ii)  compatible tests only", &r.compatible_tests_only),
        ("(iii) tests in >= 2 contexts", &r.tests_in_multiple_contexts),
    ] {
        let _ = writeln!(out, "  {name:<30} {}", if check.passed { "pass" } else { "FAIL" });
        if !check.passed {
            for w in &check.witnesses {
                let _ = writeln!(out, "      {w}");
            }
        }
    }

    if let Some(sim) = &report.simulation {
        out.push('\n');
        out.push_str(&render_simulation(sim));
    }

    let _ = writeln!(out, "\nverdicts");
    for v in &report.verdicts {
        let _ = writeln!(
            out,
            "  [{}] {}: {}",
            if v.passed { "ok" } else { "!!" },
            v.check,
            v.message
        );
        if !v.passed {
            for w in &v.witnesses {
                let _ = writeln!(out, "       - {w}");
            }
        }
    }
    out
}
