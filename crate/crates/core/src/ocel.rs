//! Object-centric event logs: data model, JSON parsing/serialization,
//! process-execution extraction, and flattening.
//!
//! A log maps every object to a timestamp-ordered sequence of events; an
//! event may belong to several objects at once. Flattening collapses each
//! connected component of co-appearing objects into a single fresh case
//! object whose trace is the component's events in timestamp order.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type EventId = String;
pub type ObjectId = String;
pub type ObjectType = String;
pub type Activity = String;

/// Event timestamps are integer ticks; ISO-8601 strings in parsed documents
/// are mapped to epoch milliseconds.
pub type Timestamp = i64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    pub activity: Activity,
    pub timestamp: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub object_type: ObjectType,
}

/// An object-centric event log.
///
/// Values are immutable after construction; every operation on them is a
/// pure function of its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ocel {
    events: BTreeMap<EventId, Event>,
    objects: BTreeMap<ObjectId, ObjectInstance>,
    traces: BTreeMap<ObjectId, Vec<EventId>>,
    /// Derived object map: for each event, the objects whose trace contains it.
    event_objects: BTreeMap<EventId, BTreeSet<ObjectId>>,
}

impl Ocel {
    /// Builds a log and checks every structural invariant: unique ids,
    /// resolvable references, timestamp-monotone traces, and no event
    /// outside all traces.
    pub fn new(
        events: Vec<Event>,
        objects: Vec<ObjectInstance>,
        traces: BTreeMap<ObjectId, Vec<EventId>>,
    ) -> Result<Self> {
        let mut event_map = BTreeMap::new();
        for event in events {
            if event_map.insert(event.id.clone(), event.clone()).is_some() {
                return Err(Error::DuplicateEvent(event.id));
            }
        }
        let mut object_map = BTreeMap::new();
        for object in objects {
            if object_map
                .insert(object.id.clone(), object.clone())
                .is_some()
            {
                return Err(Error::DuplicateObject(object.id));
            }
        }

        let mut event_objects: BTreeMap<EventId, BTreeSet<ObjectId>> = BTreeMap::new();
        for (object, trace) in &traces {
            if !object_map.contains_key(object) {
                return Err(Error::UnknownTraceKey(object.clone()));
            }
            let mut seen = BTreeSet::new();
            let mut last: Option<Timestamp> = None;
            for event_id in trace {
                let event = event_map
                    .get(event_id)
                    .ok_or_else(|| Error::UnknownEventRef {
                        object: object.clone(),
                        event: event_id.clone(),
                    })?;
                if !seen.insert(event_id.clone()) {
                    return Err(Error::RepeatedTraceEvent {
                        object: object.clone(),
                        event: event_id.clone(),
                    });
                }
                if let Some(prev) = last {
                    if event.timestamp < prev {
                        return Err(Error::UnorderedTrace {
                            object: object.clone(),
                            event: event_id.clone(),
                        });
                    }
                }
                last = Some(event.timestamp);
                event_objects
                    .entry(event_id.clone())
                    .or_default()
                    .insert(object.clone());
            }
        }
        for id in event_map.keys() {
            if !event_objects.contains_key(id) {
                return Err(Error::OwnerlessEvent(id.clone()));
            }
        }

        Ok(Self {
            events: event_map,
            objects: object_map,
            traces,
            event_objects,
        })
    }

    pub fn empty() -> Self {
        Self {
            events: BTreeMap::new(),
            objects: BTreeMap::new(),
            traces: BTreeMap::new(),
            event_objects: BTreeMap::new(),
        }
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.events.values()
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.get(id)
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectInstance> {
        self.objects.values()
    }

    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects.get(id)
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    /// The trace of an object: its events in timestamp order.
    pub fn trace(&self, object: &str) -> Option<&[EventId]> {
        self.traces.get(object).map(Vec::as_slice)
    }

    pub fn traces(&self) -> impl Iterator<Item = (&ObjectId, &Vec<EventId>)> {
        self.traces.iter()
    }

    /// Objects whose trace contains the event (the derived object map).
    pub fn objects_of(&self, event: &str) -> Option<&BTreeSet<ObjectId>> {
        self.event_objects.get(event)
    }

    /// Object types present in the log (the image of the typing function).
    pub fn object_types(&self) -> BTreeSet<ObjectType> {
        self.objects
            .values()
            .map(|o| o.object_type.clone())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// JSON representation
// ---------------------------------------------------------------------------

// Struct fields are ordered alphabetically so serialization emits sorted keys.
#[derive(Serialize, Deserialize)]
struct LogDoc {
    events: Vec<EventDoc>,
    object_types: Vec<String>,
    objects: Vec<ObjectDoc>,
}

#[derive(Serialize, Deserialize)]
struct EventDoc {
    activity: String,
    id: String,
    objects: Vec<String>,
    timestamp: TimeValue,
}

#[derive(Serialize, Deserialize)]
struct ObjectDoc {
    id: String,
    #[serde(rename = "type")]
    object_type: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TimeValue {
    Ticks(i64),
    Text(String),
}

fn parse_timestamp(event: &str, value: &TimeValue) -> Result<Timestamp> {
    match value {
        TimeValue::Ticks(t) => Ok(*t),
        TimeValue::Text(s) => {
            if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
                return Ok(dt.timestamp_millis());
            }
            for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
                if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                    return Ok(naive.and_utc().timestamp_millis());
                }
            }
            Err(Error::BadTimestamp {
                event: event.to_string(),
                value: s.clone(),
            })
        }
    }
}

/// Parses a JSON event log document.
///
/// Traces are derived by sorting each object's events by
/// `(timestamp, event id)`. Events linked to no objects are rejected: the
/// object map is derived from traces, so an ownerless event would be
/// unreachable.
pub fn parse_ocel(bytes: &[u8]) -> Result<Ocel> {
    let doc: LogDoc = serde_json::from_slice(bytes)?;

    let declared: BTreeSet<&str> = doc.object_types.iter().map(String::as_str).collect();
    let mut objects = Vec::with_capacity(doc.objects.len());
    let mut object_ids = BTreeSet::new();
    for obj in &doc.objects {
        if !declared.contains(obj.object_type.as_str()) {
            return Err(Error::UndeclaredType {
                object: obj.id.clone(),
                object_type: obj.object_type.clone(),
            });
        }
        if !object_ids.insert(obj.id.clone()) {
            return Err(Error::DuplicateObject(obj.id.clone()));
        }
        objects.push(ObjectInstance {
            id: obj.id.clone(),
            object_type: obj.object_type.clone(),
        });
    }

    let mut events = Vec::with_capacity(doc.events.len());
    let mut per_object: BTreeMap<ObjectId, Vec<(Timestamp, EventId)>> = BTreeMap::new();
    let mut event_ids = BTreeSet::new();
    for ev in &doc.events {
        if !event_ids.insert(ev.id.clone()) {
            return Err(Error::DuplicateEvent(ev.id.clone()));
        }
        if ev.objects.is_empty() {
            return Err(Error::OwnerlessEvent(ev.id.clone()));
        }
        let timestamp = parse_timestamp(&ev.id, &ev.timestamp)?;
        for obj in &ev.objects {
            if !object_ids.contains(obj) {
                return Err(Error::UnknownObjectRef {
                    event: ev.id.clone(),
                    object: obj.clone(),
                });
            }
            per_object
                .entry(obj.clone())
                .or_default()
                .push((timestamp, ev.id.clone()));
        }
        events.push(Event {
            id: ev.id.clone(),
            activity: ev.activity.clone(),
            timestamp,
        });
    }

    let mut traces: BTreeMap<ObjectId, Vec<EventId>> = BTreeMap::new();
    for obj in &objects {
        let mut entries = per_object.remove(&obj.id).unwrap_or_default();
        entries.sort();
        traces.insert(
            obj.id.clone(),
            entries.into_iter().map(|(_, e)| e).collect(),
        );
    }

    Ocel::new(events, objects, traces)
}

/// Serializes a log to canonical JSON: sorted keys, arrays sorted by id,
/// integer timestamps, trailing newline.
///
/// `parse_ocel(serialize_ocel(log))` reconstructs the log whenever its
/// traces break timestamp ties by event id, which holds for every log this
/// crate produces.
pub fn serialize_ocel(log: &Ocel) -> Vec<u8> {
    let doc = LogDoc {
        events: log
            .events()
            .map(|e| EventDoc {
                activity: e.activity.clone(),
                id: e.id.clone(),
                objects: log
                    .objects_of(&e.id)
                    .map(|s| s.iter().cloned().collect())
                    .unwrap_or_default(),
                timestamp: TimeValue::Ticks(e.timestamp),
            })
            .collect(),
        object_types: log.object_types().into_iter().collect(),
        objects: log
            .objects()
            .map(|o| ObjectDoc {
                id: o.id.clone(),
                object_type: o.object_type.clone(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("log serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

// ---------------------------------------------------------------------------
// Object graph and process executions
// ---------------------------------------------------------------------------

/// Undirected graph of object co-appearances: two objects are adjacent iff
/// some event belongs to both traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectGraph {
    adjacency: BTreeMap<ObjectId, BTreeSet<ObjectId>>,
}

impl ObjectGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &ObjectId> {
        self.adjacency.keys()
    }

    pub fn neighbors(&self, object: &str) -> Option<&BTreeSet<ObjectId>> {
        self.adjacency.get(object)
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.adjacency.get(a).is_some_and(|n| n.contains(b))
    }

    /// Edges as ordered pairs with `a < b`.
    pub fn edges(&self) -> Vec<(ObjectId, ObjectId)> {
        let mut edges = Vec::new();
        for (a, neighbors) in &self.adjacency {
            for b in neighbors {
                if a < b {
                    edges.push((a.clone(), b.clone()));
                }
            }
        }
        edges
    }

    /// Connected components, sorted by their smallest object id.
    pub fn connected_components(&self) -> Vec<BTreeSet<ObjectId>> {
        let mut components = Vec::new();
        let mut seen: BTreeSet<&ObjectId> = BTreeSet::new();
        for start in self.adjacency.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut component = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(node) = stack.pop() {
                if !seen.insert(node) {
                    continue;
                }
                component.insert(node.clone());
                if let Some(neighbors) = self.adjacency.get(node) {
                    stack.extend(neighbors.iter());
                }
            }
            components.push(component);
        }
        components
    }
}

pub fn object_graph(log: &Ocel) -> ObjectGraph {
    let mut adjacency: BTreeMap<ObjectId, BTreeSet<ObjectId>> = BTreeMap::new();
    for object in log.objects() {
        adjacency.entry(object.id.clone()).or_default();
    }
    for event in log.events() {
        let members = log
            .objects_of(&event.id)
            .expect("validated log has owners for every event");
        for a in members {
            for b in members {
                if a != b {
                    adjacency.entry(a.clone()).or_default().insert(b.clone());
                }
            }
        }
    }
    ObjectGraph { adjacency }
}

/// One process execution: the event graph spanned by a connected component
/// of interdependent objects. Edges are the directly-follows pairs of the
/// member objects' traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessExecution {
    pub objects: BTreeSet<ObjectId>,
    pub events: BTreeSet<EventId>,
    pub edges: BTreeSet<(EventId, EventId)>,
}

pub fn process_executions(log: &Ocel) -> Vec<ProcessExecution> {
    let graph = object_graph(log);
    graph
        .connected_components()
        .into_iter()
        .map(|objects| {
            let mut events = BTreeSet::new();
            let mut edges = BTreeSet::new();
            for object in &objects {
                let trace = log.trace(object).expect("component object has a trace");
                events.extend(trace.iter().cloned());
                for pair in trace.windows(2) {
                    edges.insert((pair[0].clone(), pair[1].clone()));
                }
            }
            ProcessExecution {
                objects,
                events,
                edges,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

/// A new object type not present in the log's type set.
fn fresh_case_type(log: &Ocel) -> ObjectType {
    let taken = log.object_types();
    if !taken.contains("case") {
        return "case".to_string();
    }
    let mut k = 1usize;
    loop {
        let candidate = format!("case{k}");
        if !taken.contains(&candidate) {
            return candidate;
        }
        k += 1;
    }
}

/// Flattens a log into a traditional one: a single fresh object type, one
/// fresh object per process execution, and each new trace holding the
/// component's events in timestamp order (ties broken by event id).
///
/// Case objects are named `case_<k>` with `k` assigned by sorting components
/// on their minimal event id, which makes the operation deterministic.
pub fn flatten(log: &Ocel) -> Ocel {
    let case_type = fresh_case_type(log);
    let executions = process_executions(log);

    // Sort keys: components with events by minimal event id, event-less
    // components afterwards by minimal object id.
    let mut keyed: Vec<(Option<EventId>, ObjectId, &ProcessExecution)> = executions
        .iter()
        .map(|px| {
            let min_event = px.events.iter().next().cloned();
            let min_object = px.objects.iter().next().cloned().unwrap_or_default();
            (min_event, min_object, px)
        })
        .collect();
    keyed.sort_by(|a, b| match (&a.0, &b.0) {
        (Some(x), Some(y)) => x.cmp(y).then_with(|| a.1.cmp(&b.1)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.1.cmp(&b.1),
    });

    let events: Vec<Event> = log.events().cloned().collect();
    let mut objects = Vec::new();
    let mut traces = BTreeMap::new();
    for (k, (_, _, px)) in keyed.iter().enumerate() {
        let case_id = format!("case_{k}");
        let mut ordered: Vec<(Timestamp, EventId)> = px
            .events
            .iter()
            .map(|e| {
                (
                    log.event(e).expect("member event exists").timestamp,
                    e.clone(),
                )
            })
            .collect();
        ordered.sort();
        objects.push(ObjectInstance {
            id: case_id.clone(),
            object_type: case_type.clone(),
        });
        traces.insert(case_id, ordered.into_iter().map(|(_, e)| e).collect());
    }

    Ocel::new(events, objects, traces).expect("flattening preserves log validity")
}

/// True iff the log has exactly one object type and every event belongs to
/// exactly one object.
pub fn is_traditional_log(log: &Ocel) -> bool {
    log.object_types().len() == 1
        && log
            .events()
            .all(|e| log.objects_of(&e.id).map(BTreeSet::len) == Some(1))
}
