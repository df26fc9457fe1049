//! Event algebra for compatibility scenarios.
//!
//! A scenario declares tests (each with a finite set of opaque outcome
//! labels), contexts (sets of mutually compatible tests) and preparations.
//! An [`Event`] is a preparation together with an outcome assignment to a
//! handful of tests. Two events are exclusive only when exclusivity can be
//! decided by running a shared test: same preparation, and some test that
//! both events assign with different outcomes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Rational;
use crate::graphs::ExclusivityGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("duplicate test id {0:?}")]
    DuplicateTest(String),
    #[error("test {0:?} must have at least 2 outcomes")]
    TooFewOutcomes(String),
    #[error("test {test:?} lists outcome {outcome:?} twice")]
    DuplicateOutcome { test: String, outcome: String },
    #[error("context #{0} is empty")]
    EmptyContext(usize),
    #[error("context #{context} references unknown test {test:?}")]
    UnknownTestInContext { context: usize, test: String },
    #[error("context #{0} duplicates an earlier context")]
    DuplicateContext(usize),
    #[error("duplicate preparation id {0:?}")]
    DuplicatePreparation(String),
    #[error("event {event} has an empty assignment")]
    EmptyAssignment { event: String },
    #[error("event {event} references unknown test {test:?}")]
    UnknownTest { event: String, test: String },
    #[error("event {event} assigns {outcome:?} to test {test:?}, which is not one of its outcomes")]
    UnknownOutcome {
        event: String,
        test: String,
        outcome: String,
    },
    #[error("event {event} references unknown preparation {preparation:?}")]
    UnknownPreparation { event: String, preparation: String },
    #[error("an exclusivity graph needs at least one event")]
    NoEvents,
    #[error("inequality has no terms")]
    EmptyInequality,
    #[error("term #{0} has a negative coefficient")]
    NegativeCoefficient(usize),
    #[error("no probability given for event {0}")]
    MissingProbability(String),
    #[error("probability {value} for event {event} is outside [0, 1]")]
    ProbabilityOutOfRange { event: String, value: String },
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Test {
    pub id: String,
    pub outcomes: Vec<String>,
}

impl Test {
    pub fn new(id: impl Into<String>, outcomes: &[&str]) -> Self {
        Test {
            id: id.into(),
            outcomes: outcomes.iter().map(|o| o.to_string()).collect(),
        }
    }

    pub fn has_outcome(&self, outcome: &str) -> bool {
        self.outcomes.iter().any(|o| o == outcome)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Context {
    pub tests: BTreeSet<String>,
}

impl Context {
    pub fn new<I, S>(tests: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Context {
            tests: tests.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, test: &str) -> bool {
        self.tests.contains(test)
    }
}

/// A preparation label plus a partial outcome assignment. Equality is
/// structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    pub preparation: String,
    pub assignment: BTreeMap<String, String>,
}

impl Event {
    pub fn new<'a, I>(preparation: impl Into<String>, assignment: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        Event {
            preparation: preparation.into(),
            assignment: assignment
                .into_iter()
                .map(|(t, o)| (t.to_string(), o.to_string()))
                .collect(),
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }

    /// The operational criterion: a shared test with differing outcomes
    /// under the same preparation. Nothing else certifies exclusivity.
    pub fn exclusivity(&self, other: &Event) -> Exclusivity {
        if self.preparation != other.preparation {
            return Exclusivity::NotExclusive;
        }
        let witnessed = self
            .assignment
            .iter()
            .any(|(test, outcome)| other.assignment.get(test).is_some_and(|o| o != outcome));
        if witnessed {
            Exclusivity::Exclusive
        } else {
            Exclusivity::NotExclusive
        }
    }

    /// Shared tests whose outcomes differ; empty unless the events are exclusive
    /// or differ only in preparation.
    pub fn deciding_tests<'a>(&'a self, other: &'a Event) -> Vec<&'a str> {
        self.assignment
            .iter()
            .filter(|(test, outcome)| other.assignment.get(*test).is_some_and(|o| o != *outcome))
            .map(|(test, _)| test.as_str())
            .collect()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.preparation)?;
        for (i, (test, outcome)) in self.assignment.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{test}={outcome}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusivity {
    Exclusive,
    NotExclusive,
}

impl Exclusivity {
    pub fn is_exclusive(self) -> bool {
        self == Exclusivity::Exclusive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    tests: Vec<Test>,
    contexts: Vec<Context>,
    preparations: Vec<String>,
}

impl Scenario {
    pub fn new(tests: Vec<Test>, contexts: Vec<Context>, preparations: Vec<String>) -> Result<Self> {
        let errors = Self::integrity_errors(&tests, &contexts, &preparations);
        match errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(Scenario {
                tests,
                contexts,
                preparations,
            }),
        }
    }

    /// Skips integrity checks; used to keep validating events while
    /// collecting every error in a document.
    pub(crate) fn new_unchecked(tests: Vec<Test>, contexts: Vec<Context>, preparations: Vec<String>) -> Self {
        Scenario {
            tests,
            contexts,
            preparations,
        }
    }

    /// Every declaration-level integrity violation, in declaration order.
    pub fn integrity_errors(tests: &[Test], contexts: &[Context], preparations: &[String]) -> Vec<ScenarioError> {
        let mut errors = Vec::new();
        let mut seen = BTreeSet::new();
        for test in tests {
            if !seen.insert(test.id.as_str()) {
                errors.push(ScenarioError::DuplicateTest(test.id.clone()));
            }
            if test.outcomes.len() < 2 {
                errors.push(ScenarioError::TooFewOutcomes(test.id.clone()));
            }
            let mut outcomes = BTreeSet::new();
            for o in &test.outcomes {
                if !outcomes.insert(o) {
                    errors.push(ScenarioError::DuplicateOutcome {
                        test: test.id.clone(),
                        outcome: o.clone(),
                    });
                }
            }
        }
        let mut seen_contexts = BTreeSet::new();
        for (i, ctx) in contexts.iter().enumerate() {
            if ctx.tests.is_empty() {
                errors.push(ScenarioError::EmptyContext(i));
            }
            for t in &ctx.tests {
                if !seen.contains(t.as_str()) {
                    errors.push(ScenarioError::UnknownTestInContext {
                        context: i,
                        test: t.clone(),
                    });
                }
            }
            if !seen_contexts.insert(ctx) {
                errors.push(ScenarioError::DuplicateContext(i));
            }
        }
        let mut seen_preps = BTreeSet::new();
        for p in preparations {
            if !seen_preps.insert(p) {
                errors.push(ScenarioError::DuplicatePreparation(p.clone()));
            }
        }
        errors
    }

    pub fn tests(&self) -> &[Test] {
        &self.tests
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn preparations(&self) -> &[String] {
        &self.preparations
    }

    pub fn test(&self, id: &str) -> Option<&Test> {
        self.tests.iter().find(|t| t.id == id)
    }

    /// Checks that the event names a declared preparation and assigns
    /// declared outcomes to declared tests. Whether its domain fits a context
    /// is not checked here; see [`check_requirements`].
    pub fn validate_event(&self, event: &Event) -> Result<()> {
        self.event_errors(event).into_iter().next().map_or(Ok(()), Err)
    }

    pub fn event_errors(&self, event: &Event) -> Vec<ScenarioError> {
        let label = event.to_string();
        let mut errors = Vec::new();
        if event.assignment.is_empty() {
            errors.push(ScenarioError::EmptyAssignment { event: label.clone() });
        }
        if !self.preparations.contains(&event.preparation) {
            errors.push(ScenarioError::UnknownPreparation {
                event: label.clone(),
                preparation: event.preparation.clone(),
            });
        }
        for (test, outcome) in &event.assignment {
            match self.test(test) {
                None => errors.push(ScenarioError::UnknownTest {
                    event: label.clone(),
                    test: test.clone(),
                }),
                Some(t) if !t.has_outcome(outcome) => errors.push(ScenarioError::UnknownOutcome {
                    event: label.clone(),
                    test: test.clone(),
                    outcome: outcome.clone(),
                }),
                Some(_) => {}
            }
        }
        errors
    }

    /// True if the event's domain lies inside at least one declared context.
    pub fn fits_context(&self, event: &Event) -> bool {
        self.contexts.iter().any(|ctx| event.domain().all(|t| ctx.contains(t)))
    }

    pub fn contexts_containing(&self, test: &str) -> usize {
        self.contexts.iter().filter(|c| c.contains(test)).count()
    }

    pub fn decide_exclusivity(&self, e1: &Event, e2: &Event) -> Result<Exclusivity> {
        self.validate_event(e1)?;
        self.validate_event(e2)?;
        Ok(e1.exclusivity(e2))
    }

    /// Vertex `i` is `events[i]`; edges are the exclusive pairs.
    pub fn exclusivity_graph(&self, events: &[Event]) -> Result<ExclusivityGraph> {
        if events.is_empty() {
            return Err(ScenarioError::NoEvents);
        }
        for e in events {
            self.validate_event(e)?;
        }
        let mut edges = Vec::new();
        for i in 0..events.len() {
            for j in (i + 1)..events.len() {
                if events[i].exclusivity(&events[j]).is_exclusive() {
                    edges.push((i, j));
                }
            }
        }
        Ok(ExclusivityGraph::new(events.len(), edges).expect("pairs are in range and loop-free"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::exact::serde_rational")]
    pub coefficient: Rational,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    terms: Vec<Term>,
    #[serde(with = "crate::exact::serde_rational_opt", default)]
    pub claimed_nchv_bound: Option<Rational>,
    #[serde(default)]
    pub claimed_qm_bound: Option<f64>,
}

impl Inequality {
    pub fn new(scenario: &Scenario, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(ScenarioError::EmptyInequality);
        }
        for (i, term) in terms.iter().enumerate() {
            if term.coefficient < Rational::zero() {
                return Err(ScenarioError::NegativeCoefficient(i));
            }
            scenario.validate_event(&term.event)?;
        }
        Ok(Inequality {
            terms,
            claimed_nchv_bound: None,
            claimed_qm_bound: None,
        })
    }

    /// Unit-coefficient inequality over the given events.
    pub fn unit(scenario: &Scenario, events: Vec<Event>) -> Result<Self> {
        let terms = events
            .into_iter()
            .map(|event| Term {
                coefficient: Rational::one(),
                event,
            })
            .collect();
        Self::new(scenario, terms)
    }

    pub fn with_claims(mut self, nchv: Option<Rational>, qm: Option<f64>) -> Self {
        self.claimed_nchv_bound = nchv;
        self.claimed_qm_bound = qm;
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn events(&self) -> Vec<Event> {
        self.terms.iter().map(|t| t.event.clone()).collect()
    }

    /// Exclusivity graph of the terms with coefficients attached as weights.
    pub fn weighted_graph(&self, scenario: &Scenario) -> Result<ExclusivityGraph> {
        let graph = scenario.exclusivity_graph(&self.events())?;
        let weights = self.terms.iter().map(|t| t.coefficient.clone()).collect();
        Ok(graph
            .with_weights(weights)
            .expect("one weight per term, all nonnegative"))
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient.is_one())
    }

    /// Σ coefficient · P(event), exactly.
    pub fn evaluate_exact(&self, probabilities: &HashMap<Event, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for term in &self.terms {
            let p = probabilities
                .get(&term.event)
                .ok_or_else(|| ScenarioError::MissingProbability(term.event.to_string()))?;
            if *p < Rational::zero() || *p > Rational::one() {
                return Err(ScenarioError::ProbabilityOutOfRange {
                    event: term.event.to_string(),
                    value: p.to_string(),
                });
            }
            total += &term.coefficient * p;
        }
        Ok(total)
    }

    pub fn evaluate(&self, probabilities: &HashMap<Event, f64>) -> Result<f64> {
        let mut total = 0.0;
        for term in &self.terms {
            let p = *probabilities
                .get(&term.event)
                .ok_or_else(|| ScenarioError::MissingProbability(term.event.to_string()))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(ScenarioError::ProbabilityOutOfRange {
                    event: term.event.to_string(),
                    value: p.to_string(),
                });
            }
            total += crate::exact::to_f64(&term.coefficient) * p;
        }
        Ok(total)
    }
}

/// Something concrete a requirement verdict points at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Preparation { id: String },
    Event { index: usize, event: String },
    Test { id: String, contexts: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Preparation { id } => write!(f, "preparation {id}"),
            Witness::Event { index, event } => write!(f, "event #{index} {event}"),
            Witness::Test { id, contexts } => write!(f, "test {id} (in {contexts} context(s))"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementCheck {
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

/// Verdicts for the three conditions any contextuality experiment must meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementReport {
    /// (i) every event uses the same preparation. Witnesses list the
    /// preparations in use.
    pub same_state: RequirementCheck,
    /// (ii) every event involves only tests from one declared context.
    pub compatible_tests_only: RequirementCheck,
    /// (iii) every test used appears in two or more contexts.
    pub tests_in_multiple_contexts: RequirementCheck,
}

impl RequirementReport {
    pub fn all_pass(&self) -> bool {
        self.same_state.passed && self.compatible_tests_only.passed && self.tests_in_multiple_contexts.passed
    }

    pub fn failures(&self) -> Vec<(&'static str, &RequirementCheck)> {
        [
            ("same-state", &self.same_state),
            ("compatible-tests-only", &self.compatible_tests_only),
            ("tests-in-multiple-contexts", &self.tests_in_multiple_contexts),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .collect()
    }
}

pub fn check_requirements(scenario: &Scenario, inequality: &Inequality) -> Result<RequirementReport> {
    let events = inequality.events();
    for e in &events {
        scenario.validate_event(e)?;
    }

    let preparations: BTreeSet<&str> = events.iter().map(|e| e.preparation.as_str()).collect();
    let same_state = RequirementCheck {
        passed: preparations.len() == 1,
        witnesses: preparations
            .iter()
            .map(|p| Witness::Preparation { id: p.to_string() })
            .collect(),
    };

    let offending: Vec<Witness> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| !scenario.fits_context(e))
        .map(|(index, e)| Witness::Event {
            index,
            event: e.to_string(),
        })
        .collect();
    let compatible_tests_only = RequirementCheck {
        passed: offending.is_empty(),
        witnesses: offending,
    };

    let used: BTreeSet<&str> = events.iter().flat_map(|e| e.domain()).collect();
    let under_used: Vec<Witness> = used
        .iter()
        .map(|t| (t, scenario.contexts_containing(t)))
        .filter(|(_, n)| *n < 2)
        .map(|(t, contexts)| Witness::Test {
            id: t.to_string(),
            contexts,
        })
        .collect();
    let tests_in_multiple_contexts = RequirementCheck {
        passed: under_used.is_empty(),
        witnesses: under_used,
    };

    Ok(RequirementReport {
        same_state,
        compatible_tests_only,
        tests_in_multiple_contexts,
    })
}
