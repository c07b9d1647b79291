//! Discovery of accepting object-centric Petri nets from event logs:
//! per-object-type projection, inductive mining, and merging of the
//! per-type nets at transitions with shared activity labels.

mod dfg;
mod im;
mod net_build;
mod tree;

pub use dfg::{dfg, Dfg};
pub use im::inductive_miner;
pub use net_build::tree_to_net;
pub use tree::ProcessTree;

pub(crate) use net_build::{assemble_accepting, compile_tree, CompiledNet};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ocel::{Activity, ObjectType, Ocel};
use crate::ocpn::AcceptingOcpn;

/// The traces of one object type, projected to activity labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedLog {
    pub object_type: ObjectType,
    /// Trace multiset in sorted order.
    pub traces: Vec<Vec<Activity>>,
}

/// Projects a log onto one object type: one activity trace per object of
/// that type.
pub fn project(log: &Ocel, object_type: &str) -> Result<TypedLog> {
    if !log.object_types().contains(object_type) {
        return Err(Error::UnknownType(object_type.to_string()));
    }
    let mut traces: Vec<Vec<Activity>> = log
        .objects()
        .filter(|o| o.object_type == object_type)
        .map(|o| {
            log.trace(&o.id)
                .expect("every object has a trace")
                .iter()
                .map(|e| log.event(e).expect("trace events exist").activity.clone())
                .collect()
        })
        .collect();
    traces.sort();
    Ok(TypedLog {
        object_type: object_type.to_string(),
        traces,
    })
}

/// Observed object counts of one type per event of one activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityRange {
    pub min: usize,
    pub max: usize,
}

/// For every (activity, type) pair that ever co-occurs: the minimum and
/// maximum number of objects of that type over all events of the activity.
/// Events without the type count as zero towards the minimum.
pub fn cardinalities(log: &Ocel) -> BTreeMap<(Activity, ObjectType), CardinalityRange> {
    let mut counts_per_activity: BTreeMap<Activity, Vec<BTreeMap<ObjectType, usize>>> =
        BTreeMap::new();
    for event in log.events() {
        let mut counts: BTreeMap<ObjectType, usize> = BTreeMap::new();
        for object in log.objects_of(&event.id).expect("owned event") {
            let ty = log
                .object(object)
                .expect("object exists")
                .object_type
                .clone();
            *counts.entry(ty).or_insert(0) += 1;
        }
        counts_per_activity
            .entry(event.activity.clone())
            .or_default()
            .push(counts);
    }

    let mut result = BTreeMap::new();
    for (activity, per_event) in counts_per_activity {
        let mut types: Vec<ObjectType> = per_event.iter().flat_map(|c| c.keys().cloned()).collect();
        types.sort();
        types.dedup();
        for ty in types {
            let counts = per_event.iter().map(|c| c.get(&ty).copied().unwrap_or(0));
            let min = counts.clone().min().expect("activity has events");
            let max = counts.max().expect("activity has events");
            result.insert((activity.clone(), ty), CardinalityRange { min, max });
        }
    }
    result
}

/// Discovers an accepting object-centric Petri net: per type, project, mine
/// a process tree, compile it to a workflow net typed with that type; then
/// fuse transitions with equal activity labels across types. Arcs of a type
/// at a fused transition are variable iff the type's maximum cardinality at
/// that activity exceeds one. A type joins the fusion for an activity only
/// when it participates in every event of it (minimum cardinality at least
/// one); otherwise its transition keeps a per-type identity.
pub fn discover(log: &Ocel) -> Result<AcceptingOcpn> {
    if log.num_events() == 0 || log.num_objects() == 0 {
        return Err(Error::EmptyLog);
    }
    let cards = cardinalities(log);
    let mut parts = Vec::new();
    for object_type in log.object_types() {
        let typed = project(log, &object_type)?;
        let tree = inductive_miner(&typed);
        let mut part = net_build::compile_tree(&tree, &object_type, &format!("{object_type}::"));

        // Sometimes-absent activities stay out of the fusion for this type.
        let mut renames: BTreeMap<String, String> = BTreeMap::new();
        for transition in &mut part.transitions {
            if let Some(label) = &transition.label {
                let range = cards
                    .get(&(label.clone(), object_type.clone()))
                    .copied()
                    .unwrap_or(CardinalityRange { min: 0, max: 0 });
                if range.min == 0 {
                    let new_id = format!("{object_type}::{}", transition.id);
                    renames.insert(transition.id.clone(), new_id.clone());
                    transition.id = new_id;
                }
            }
        }
        if !renames.is_empty() {
            for arc in &mut part.arcs {
                if let Some(new_id) = renames.get(&arc.source) {
                    arc.source = new_id.clone();
                }
                if let Some(new_id) = renames.get(&arc.target) {
                    arc.target = new_id.clone();
                }
            }
        }
        parts.push((object_type, part));
    }

    net_build::assemble_accepting(&parts, |label, object_type| {
        cards
            .get(&(label.clone(), object_type.clone()))
            .is_some_and(|range| range.max > 1)
    })
}
