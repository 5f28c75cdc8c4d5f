use serde::{Deserialize, Serialize};

use crate::ns;

/// Which edges a step may follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateSel {
    /// `"*"`: any non-schema predicate.
    Any(AnyPredicate),
    /// A single predicate IRI (CURIEs like `core:cites` are expanded on load).
    /// `relation:related` is special: it follows tag associations from their
    /// owner (the graph) to the tagged object.
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnyPredicate {
    #[serde(rename = "*")]
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepDirection {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    /// Target differs from the node visited before the current one.
    ExcludePrevious,
    ExcludeSeeds,
    RequireType(String),
    /// For association steps, the association's concept; otherwise the
    /// target must have been tagged with this concept by someone.
    RequireTagConcept(String),
    /// Target differs from the current node.
    NotSelf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emit {
    pub sign: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_restriction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDecay {
    /// Half-life in seconds.
    pub half_life_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarStep {
    pub predicate: PredicateSel,
    pub direction: StepDirection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filters: Vec<Filter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<Emit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_decay: Option<TimeDecay>,
}

impl GrammarStep {
    pub fn new(predicate: impl Into<String>, direction: StepDirection) -> Self {
        GrammarStep {
            predicate: PredicateSel::Named(ns::expand(&predicate.into())),
            direction,
            filters: Vec::new(),
            emit: None,
            time_decay: None,
        }
    }

    pub fn any(direction: StepDirection) -> Self {
        GrammarStep {
            predicate: PredicateSel::Any(AnyPredicate::Any),
            direction,
            filters: Vec::new(),
            emit: None,
            time_decay: None,
        }
    }

    pub fn filter(mut self, filter: Filter) -> Self {
        self.filters.push(filter);
        self
    }

    pub fn emit(mut self, sign: Sign, type_restriction: Option<&str>) -> Self {
        self.emit = Some(Emit {
            sign,
            type_restriction: type_restriction.map(ns::expand),
        });
        self
    }

    pub fn time_decay(mut self, half_life_secs: f64) -> Self {
        self.time_decay = Some(TimeDecay { half_life_secs });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub back_to_step: usize,
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grammar {
    #[serde(default)]
    pub description: String,
    pub steps: Vec<GrammarStep>,
    #[serde(default, rename = "loop", skip_serializing_if = "Option::is_none")]
    pub repeat: Option<Loop>,
    /// Shipped but not validated against real use.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub experimental: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrammarError {
    #[error("grammar has no steps")]
    Empty,
    #[error("loop target {0} is past the last step ({1} steps)")]
    LoopTarget(usize, usize),
    #[error("decay {0} outside [0, 1]")]
    Decay(f64),
    #[error("half-life must be positive, got {0}")]
    HalfLife(f64),
    #[error("malformed grammar: {0}")]
    Malformed(String),
}

impl Grammar {
    pub fn new(description: impl Into<String>, steps: Vec<GrammarStep>) -> Self {
        Grammar {
            description: description.into(),
            steps,
            repeat: None,
            experimental: false,
        }
    }

    pub fn looping(mut self, back_to_step: usize, decay: f64) -> Self {
        self.repeat = Some(Loop {
            back_to_step,
            decay,
        });
        self
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        if self.steps.is_empty() {
            return Err(GrammarError::Empty);
        }
        if let Some(l) = &self.repeat {
            if l.back_to_step >= self.steps.len() {
                return Err(GrammarError::LoopTarget(l.back_to_step, self.steps.len()));
            }
            if !(0.0..=1.0).contains(&l.decay) {
                return Err(GrammarError::Decay(l.decay));
            }
        }
        for step in &self.steps {
            if let Some(td) = &step.time_decay {
                if !(td.half_life_secs > 0.0 && td.half_life_secs.is_finite()) {
                    return Err(GrammarError::HalfLife(td.half_life_secs));
                }
            }
        }
        Ok(())
    }

    /// Parses the JSON grammar format, expanding CURIEs, and validates it.
    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let mut grammar: Grammar =
            serde_json::from_str(text).map_err(|e| GrammarError::Malformed(e.to_string()))?;
        grammar.expand_names();
        grammar.validate()?;
        Ok(grammar)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grammar serializes")
    }

    fn expand_names(&mut self) {
        for step in &mut self.steps {
            if let PredicateSel::Named(p) = &mut step.predicate {
                *p = ns::expand(p);
            }
            for f in &mut step.filters {
                match f {
                    Filter::RequireType(c) | Filter::RequireTagConcept(c) => *c = ns::expand(c),
                    _ => {}
                }
            }
            if let Some(Emit {
                type_restriction: Some(c),
                ..
            }) = &mut step.emit
            {
                *c = ns::expand(c);
            }
        }
    }
}
