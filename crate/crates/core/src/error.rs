use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("bad atom {0:?}: expected [A-Za-z_][A-Za-z0-9_]*")]
    BadAtom(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleSetError {
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("rule {0} has an empty consequent")]
    EmptyChain(String),
    #[error("rule {0} uses a permission inside a compensation chain")]
    PermissionInChain(String),
    #[error("rule {rule} uses unknown atom {atom}")]
    UnknownAtom { rule: String, atom: String },
    #[error("superiority names unknown rule {0}")]
    UnknownRule(String),
    #[error("rule {0} is declared superior to itself")]
    SelfSuperiority(String),
    #[error("superiority cycle: {}", .0.join(" > "))]
    SuperiorityCycle(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("facts contain both {0} and -{0}")]
    ContradictoryFacts(String),
    #[error("fact atom {0} is not in the vocabulary")]
    UnknownAtom(String),
}

/// Failure to read a rule file. Semantic problems are reported as
/// diagnostics by validation instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("XML syntax error: {0}")]
    XmlSyntax(String),
    #[error("{element} at {location}: missing attribute {attribute}")]
    MissingAttribute {
        element: String,
        attribute: String,
        location: String,
    },
    #[error("{element} at {location}: missing child element <{child}>")]
    MissingElement {
        element: String,
        child: String,
        location: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at offset {offset}: {message}")]
pub struct FormulaError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessError {
    #[error("XML syntax error: {0}")]
    XmlSyntax(String),
    #[error("unsupported BPMN element <{0}>")]
    UnsupportedElement(String),
    #[error("structure error: {0}")]
    Structure(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("annotation syntax error: {0}")]
    Syntax(String),
    #[error("annotation names unknown task {0}")]
    UnknownTask(String),
    #[error("annotation uses unknown atom {0}")]
    UnknownAtom(String),
    #[error("annotations are for process {found}, model is {expected}")]
    ProcessIdMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Traces,
    Interleavings,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("unstructured parallelism: {0}")]
    UnstructuredParallelism(String),
    #[error("{} limit exceeded: reached {reached}, limit {limit}", match .limit_kind { Limit::Traces => "trace", Limit::Interleavings => "interleaving" })]
    ExplosionLimit {
        limit_kind: Limit,
        reached: u128,
        limit: usize,
    },
    #[error("invalid enumeration config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("engine invariant breached at step {step}: {source}")]
    Derive {
        step: usize,
        #[source]
        source: DeriveError,
    },
    #[error("step {step} out of range for a trace of {len} steps")]
    IndexOutOfRange { step: usize, len: usize },
    #[error("cannot aggregate an empty result list")]
    EmptyResults,
}
