//! Crate-wide error type.

use thiserror::Error;

use crate::ocel::{EventId, ObjectId, ObjectType};

/// Errors produced by log parsing, net validation, semantics, and the
/// experiment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    // --- event log construction ---
    #[error("duplicate event id `{0}`")]
    DuplicateEvent(EventId),
    #[error("duplicate object id `{0}`")]
    DuplicateObject(ObjectId),
    #[error("event `{event}` references unknown object `{object}`")]
    UnknownObjectRef { event: EventId, object: ObjectId },
    #[error("object `{object}` has type `{object_type}` not listed in object_types")]
    UndeclaredType {
        object: ObjectId,
        object_type: ObjectType,
    },
    #[error("event `{0}` is linked to no objects")]
    OwnerlessEvent(EventId),
    #[error("event `{event}` has unreadable timestamp `{value}`")]
    BadTimestamp { event: EventId, value: String },
    #[error("trace of object `{object}` references unknown event `{event}`")]
    UnknownEventRef { object: ObjectId, event: EventId },
    #[error("trace key `{0}` does not name an object of the log")]
    UnknownTraceKey(ObjectId),
    #[error("trace of object `{object}` violates timestamp order at event `{event}`")]
    UnorderedTrace { object: ObjectId, event: EventId },
    #[error("event `{event}` appears more than once in the trace of object `{object}`")]
    RepeatedTraceEvent { object: ObjectId, event: EventId },
    #[error("empty event log")]
    EmptyLog,
    #[error("unknown object type `{0}`")]
    UnknownType(ObjectType),

    // --- net construction ---
    #[error("duplicate node id `{0}` in net")]
    DuplicateNode(String),
    #[error("arc endpoint `{0}` is neither a place nor a transition")]
    DanglingArcEndpoint(String),
    #[error("arc {from} -> {to} does not connect a place with a transition")]
    NonBipartiteArc { from: String, to: String },
    #[error("duplicate arc {from} -> {to}")]
    DuplicateArc { from: String, to: String },
    #[error("marking token refers to unknown place `{0}`")]
    UnknownPlace(String),
    #[error("object `{object}` appears with conflicting types `{first}` and `{second}`")]
    InconsistentObjectType {
        object: ObjectId,
        first: ObjectType,
        second: ObjectType,
    },
    #[error("accepting net needs at least one initial and one final marking")]
    MissingMarkings,

    // --- semantics ---
    #[error("binding of `{transition}` is malformed: {reason}")]
    InvalidBinding { transition: String, reason: String },
    #[error("binding of `{transition}` is not enabled; missing tokens: {missing}")]
    NotEnabled { transition: String, missing: String },
    #[error("binding enumeration exceeded the cap of {limit} bindings in one marking (transition `{transition}`)")]
    BindingCap { transition: String, limit: usize },
    #[error("state budget of {limit} marking visits exceeded")]
    StateBudget { limit: usize },

    // --- metrics and discovery ---
    #[error("transition `{0}` has no input places")]
    EmptyPreset(String),
    #[error("model language is empty")]
    EmptyLanguage,
    #[error("precision undefined: the discovered model has an empty language")]
    EmptyDiscoveredLanguage,
    #[error("sampling rate {0} outside (0, 1]")]
    InvalidRate(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
