//! Scenario documents: the TOML input format.
//!
//! ```toml
//! name = "kcbs"
//! contexts = [["A", "B"], ["B", "C"]]
//! preparations = ["rho"]
//!
//! [[tests]]
//! id = "A"
//! outcomes = ["+1", "-1"]
//!
//! [[events]]
//! label = "e1"
//! preparation = "rho"
//! assignment = { A = "+1", B = "-1" }
//!
//! [inequality]
//! claimed_nchv_bound = "2"
//! claimed_qm_bound = 2.2360679775
//! terms = [{ event = "e1", coefficient = "1" }]
//! ```
//!
//! Outcome labels are strings. Coefficients and `claimed_nchv_bound` are
//! rationals written as integers or strings (`"5/2"`, `"0.5"`); a term
//! without a coefficient has coefficient 1. Omitting `[inequality]` gives
//! the unit-coefficient inequality over all events in declaration order.
//!
//! Validation reports every problem it finds, each with a line number and
//! a field path. An event whose tests do not fit inside any declared context
//! is accepted with a warning: such events are what the requirement checker
//! exists to flag.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::exact::{parse_rational, Rational};
use crate::scenario::{Context, Event, Inequality, Scenario, Term, Test};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: Option<usize>,
    pub field: String,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, {}", self.field),
            None => write!(f, "{}", self.field),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct DocumentErrors(pub Vec<Diagnostic>);

impl fmt::Display for DocumentErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error(s) in scenario document", self.0.len())?;
        for d in &self.0 {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEvent {
    pub label: String,
    pub event: Event,
}

/// A validated scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDocument {
    pub name: String,
    pub description: Option<String>,
    pub scenario: Scenario,
    pub events: Vec<LabeledEvent>,
    pub inequality: Inequality,
    /// Label of the event behind each inequality term.
    pub term_labels: Vec<String>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    name: Option<String>,
    description: Option<String>,
    #[serde(default)]
    tests: Vec<Spanned<RawTest>>,
    #[serde(default)]
    contexts: Vec<Spanned<Vec<String>>>,
    #[serde(default)]
    preparations: Vec<Spanned<String>>,
    #[serde(default)]
    events: Vec<Spanned<RawEvent>>,
    inequality: Option<Spanned<RawInequality>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTest {
    id: String,
    outcomes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    label: String,
    preparation: String,
    assignment: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInequality {
    #[serde(default)]
    terms: Vec<Spanned<RawTerm>>,
    claimed_nchv_bound: Option<RawRational>,
    claimed_qm_bound: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    event: String,
    coefficient: Option<RawRational>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn parse(&self) -> Option<Rational> {
        match self {
            RawRational::Int(i) => Some(crate::exact::int(*i)),
            RawRational::Text(t) => parse_rational(t),
        }
    }

    fn text(&self) -> String {
        match self {
            RawRational::Int(i) => i.to_string(),
            RawRational::Text(t) => t.clone(),
        }
    }
}

struct Collector<'a> {
    text: &'a str,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

impl Collector<'_> {
    fn line(&self, span: std::ops::Range<usize>) -> Option<usize> {
        let start = span.start.min(self.text.len());
        Some(self.text[..start].bytes().filter(|&b| b == b'\n').count() + 1)
    }

    fn error(&mut self, span: std::ops::Range<usize>, field: String, message: impl Into<String>) {
        let line = self.line(span);
        self.errors.push(Diagnostic {
            location: Location { line, field },
            message: message.into(),
        });
    }

    fn warn(&mut self, span: std::ops::Range<usize>, field: String, message: impl Into<String>) {
        let line = self.line(span);
        self.warnings.push(Diagnostic {
            location: Location { line, field },
            message: message.into(),
        });
    }
}

/// Parses and validates a scenario document, reporting all errors found.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, DocumentErrors> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        DocumentErrors(vec![Diagnostic {
            location: Location {
                line,
                field: "document".into(),
            },
            message: e.message().to_string(),
        }])
    })?;
    let mut c = Collector {
        text,
        errors: Vec::new(),
        warnings: Vec::new(),
    };

    let mut test_ids = BTreeSet::new();
    let mut tests = Vec::new();
    for (i, t) in raw.tests.iter().enumerate() {
        let span = t.span();
        let t = t.get_ref();
        if !test_ids.insert(t.id.clone()) {
            c.error(
                span.clone(),
                format!("tests[{i}].id"),
                format!("duplicate test id {:?}", t.id),
            );
        }
        if t.outcomes.len() < 2 {
            c.error(
                span.clone(),
                format!("tests[{i}].outcomes"),
                format!("test {:?} needs at least 2 outcomes", t.id),
            );
        }
        let mut seen = BTreeSet::new();
        for o in &t.outcomes {
            if !seen.insert(o) {
                c.error(
                    span.clone(),
                    format!("tests[{i}].outcomes"),
                    format!("test {:?} lists outcome {o:?} twice", t.id),
                );
            }
        }
        tests.push(Test {
            id: t.id.clone(),
            outcomes: t.outcomes.clone(),
        });
    }

    let mut contexts = Vec::new();
    let mut seen_contexts = BTreeSet::new();
    for (i, ctx) in raw.contexts.iter().enumerate() {
        let span = ctx.span();
        if ctx.get_ref().is_empty() {
            c.error(span.clone(), format!("contexts[{i}]"), "context is empty");
        }
        for t in ctx.get_ref() {
            if !test_ids.contains(t) {
                c.error(span.clone(), format!("contexts[{i}]"), format!("unknown test {t:?}"));
            }
        }
        let context = Context::new(ctx.get_ref().iter().cloned());
        if !seen_contexts.insert(context.clone()) {
            c.error(span, format!("contexts[{i}]"), "duplicates an earlier context");
        }
        contexts.push(context);
    }

    let mut preparations = Vec::new();
    for (i, p) in raw.preparations.iter().enumerate() {
        if preparations.contains(p.get_ref()) {
            c.error(
                p.span(),
                format!("preparations[{i}]"),
                format!("duplicate preparation id {:?}", p.get_ref()),
            );
        }
        preparations.push(p.get_ref().clone());
    }

    let scenario = Scenario::new_unchecked(tests, contexts, preparations);

    let mut events = Vec::new();
    let mut labels = BTreeMap::new();
    for (i, e) in raw.events.iter().enumerate() {
        let span = e.span();
        let raw_event = e.get_ref();
        if labels.insert(raw_event.label.clone(), i).is_some() {
            c.error(
                span.clone(),
                format!("events[{i}].label"),
                format!("duplicate event label {:?}", raw_event.label),
            );
        }
        let event = Event {
            preparation: raw_event.preparation.clone(),
            assignment: raw_event.assignment.clone(),
        };
        let problems = scenario.event_errors(&event);
        for p in &problems {
            c.error(
                span.clone(),
                format!("events[{i}]"),
                format!("event {:?}: {p}", raw_event.label),
            );
        }
        if problems.is_empty() && !scenario.fits_context(&event) {
            c.warn(
                span,
                format!("events[{i}].assignment"),
                format!(
                    "event {:?} involves tests outside every declared context",
                    raw_event.label
                ),
            );
        }
        events.push(LabeledEvent {
            label: raw_event.label.clone(),
            event,
        });
    }

    let mut terms = Vec::new();
    let mut term_labels = Vec::new();
    let mut claimed_nchv = None;
    let mut claimed_qm = None;
    match &raw.inequality {
        None => {
            if events.is_empty() {
                c.error(0..0, "events".into(), "document declares no events");
            }
            for e in &events {
                terms.push(Term {
                    coefficient: crate::exact::one(),
                    event: e.event.clone(),
                });
                term_labels.push(e.label.clone());
            }
        }
        Some(ineq) => {
            let span = ineq.span();
            let ineq = ineq.get_ref();
            if ineq.terms.is_empty() {
                c.error(span.clone(), "inequality.terms".into(), "inequality has no terms");
            }
            for (i, t) in ineq.terms.iter().enumerate() {
                let tspan = t.span();
                let t = t.get_ref();
                let coefficient = match &t.coefficient {
                    None => Some(crate::exact::one()),
                    Some(raw) => match raw.parse() {
                        Some(q) if q >= crate::exact::zero() => Some(q),
                        Some(_) => {
                            c.error(
                                tspan.clone(),
                                format!("inequality.terms[{i}].coefficient"),
                                format!("coefficient {} is negative", raw.text()),
                            );
                            None
                        }
                        None => {
                            c.error(
                                tspan.clone(),
                                format!("inequality.terms[{i}].coefficient"),
                                format!("{:?} is not a rational number", raw.text()),
                            );
                            None
                        }
                    },
                };
                let event = labels.get(&t.event).map(|&k| events[k].event.clone());
                if event.is_none() {
                    c.error(
                        tspan,
                        format!("inequality.terms[{i}].event"),
                        format!("unknown event label {:?}", t.event),
                    );
                }
                if let (Some(coefficient), Some(event)) = (coefficient, event) {
                    terms.push(Term { coefficient, event });
                    term_labels.push(t.event.clone());
                }
            }
            if let Some(raw) = &ineq.claimed_nchv_bound {
                match raw.parse() {
                    Some(q) => claimed_nchv = Some(q),
                    None => c.error(
                        span.clone(),
                        "inequality.claimed_nchv_bound".into(),
                        format!("{:?} is not a rational number", raw.text()),
                    ),
                }
            }
            claimed_qm = ineq.claimed_qm_bound;
        }
    }

    if !c.errors.is_empty() {
        return Err(DocumentErrors(c.errors));
    }

    let (tests, contexts, preparations) = (
        scenario.tests().to_vec(),
        scenario.contexts().to_vec(),
        scenario.preparations().to_vec(),
    );
    let scenario = Scenario::new(tests, contexts, preparations).expect("integrity already checked");
    let inequality = Inequality::new(&scenario, terms)
        .expect("terms already validated")
        .with_claims(claimed_nchv, claimed_qm);

    Ok(ScenarioDocument {
        name: raw.name.unwrap_or_else(|| "unnamed".into()),
        description: raw.description,
        scenario,
        events,
        inequality,
        term_labels,
        warnings: c.warnings,
    })
}

/// Shipped scenario files, embedded.
pub mod fixtures {
    pub const KCBS: &str = include_str!("../scenarios/kcbs.toml");
    pub const SPECKER: &str = include_str!("../scenarios/specker.toml");
    pub const BUNCHING_KCBS: &str = include_str!("../scenarios/bunching-kcbs.toml");
    pub const BUNCHING_SPECKER: &str = include_str!("../scenarios/bunching-specker.toml");
}
