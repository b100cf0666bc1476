//! Compiler from FRETISH controlled-natural-language requirements to metric
//! temporal logic, with three trace semantics (past, finite future, infinite
//! future), a bounded trace-enumeration equivalence checker, and structural
//! formula metrics.

pub mod equiv;
pub mod fretish;
pub mod mtl;
pub mod text;
pub mod traces;
pub mod translator;

pub use equiv::{check_equiv, check_implication, CheckConfig, CheckError, Verdict};
pub use fretish::{
    enumerate_templates, parse_requirement, parse_requirements_file, render_requirement,
    BoolExpr, Condition, FretishError, Requirement, Scope, Timing,
};
pub use mtl::{atoms, metrics, Interval, MetricsReport, MtlFormula};
pub use text::{parse_formula, print_formula, Dialect, ParseError};
pub use traces::{
    eval, eval_lasso, format_trace, holds_globally, parse_trace_text, EvalError, LassoTrace,
    Trace, TraceData, TraceFormatError,
};
pub use translator::{mtl_of_scope, timed_response, translate, triggers, Semantics};
