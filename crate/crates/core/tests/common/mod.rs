//! Shared helpers for integration tests: a random log generator, an
//! independent classical Petri-net language oracle, and random playouts.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ocpd_core::ocel::{Event, ObjectInstance, Ocel};
use ocpd_core::ocpn::{enabled_bindings, fire, AcceptingOcpn, EnumerationLimits, Marking};

/// A random valid log: 1-3 object types, 1-6 objects, 1-15 events, each
/// event linked to 1-3 distinct objects, timestamps with deliberate ties.
pub fn arbitrary_log(seed: u64) -> Ocel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_types = rng.gen_range(1..=3usize);
    let types: Vec<String> = (0..num_types).map(|i| format!("T{i}")).collect();
    let num_objects = rng.gen_range(1..=6usize);
    let objects: Vec<ObjectInstance> = (0..num_objects)
        .map(|i| ObjectInstance {
            id: format!("o{i}"),
            object_type: types[rng.gen_range(0..num_types)].clone(),
        })
        .collect();
    let activities = ["a", "b", "c", "d", "e"];
    let num_events = rng.gen_range(1..=15usize);

    let mut events = Vec::new();
    let mut membership: BTreeMap<String, Vec<(i64, String)>> = BTreeMap::new();
    for i in 0..num_events {
        let id = format!("e{i}");
        let timestamp = rng.gen_range(0..8i64);
        events.push(Event {
            id: id.clone(),
            activity: activities[rng.gen_range(0..activities.len())].to_string(),
            timestamp,
        });
        let linked = rng.gen_range(1..=num_objects.min(3));
        let mut owners: Vec<usize> = (0..num_objects).collect();
        owners.shuffle(&mut rng);
        for &owner in owners.iter().take(linked) {
            membership
                .entry(format!("o{owner}"))
                .or_default()
                .push((timestamp, id.clone()));
        }
    }

    let mut traces: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for object in &objects {
        let mut entries = membership.remove(&object.id).unwrap_or_default();
        entries.sort();
        traces.insert(
            object.id.clone(),
            entries.into_iter().map(|(_, e)| e).collect(),
        );
    }
    Ocel::new(events, objects, traces).expect("generated log is valid")
}

/// Loop-free language of a traditional net computed over place-multiset
/// markings with the classical token game; an implementation independent of
/// the object-centric semantics. Only meaningful for nets whose markings
/// carry one object.
pub fn classical_language(model: &AcceptingOcpn) -> BTreeSet<Vec<String>> {
    type PlaceMarking = BTreeMap<String, u32>;

    fn as_places(marking: &Marking) -> PlaceMarking {
        let mut places: PlaceMarking = BTreeMap::new();
        for (token, count) in marking.entries() {
            *places.entry(token.place.clone()).or_insert(0) += count;
        }
        places
    }

    struct ClassicalTransition {
        label: Option<String>,
        pre: Vec<String>,
        post: Vec<String>,
    }

    fn enabled(marking: &PlaceMarking, transition: &ClassicalTransition) -> bool {
        let mut needed: PlaceMarking = BTreeMap::new();
        for p in &transition.pre {
            *needed.entry(p.clone()).or_insert(0) += 1;
        }
        needed
            .iter()
            .all(|(p, n)| marking.get(p).copied().unwrap_or(0) >= *n)
    }

    fn fire_classical(marking: &PlaceMarking, transition: &ClassicalTransition) -> PlaceMarking {
        let mut next = marking.clone();
        for p in &transition.pre {
            let count = next.get_mut(p).expect("enabled");
            *count -= 1;
            if *count == 0 {
                next.remove(p);
            }
        }
        for p in &transition.post {
            *next.entry(p.clone()).or_insert(0) += 1;
        }
        next
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        marking: &PlaceMarking,
        transitions: &[ClassicalTransition],
        finals: &BTreeSet<PlaceMarking>,
        on_path: &mut HashSet<PlaceMarking>,
        labels: &mut Vec<String>,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        if finals.contains(marking) {
            out.insert(labels.clone());
        }
        for transition in transitions {
            if !enabled(marking, transition) {
                continue;
            }
            let next = fire_classical(marking, transition);
            if on_path.contains(&next) {
                continue;
            }
            on_path.insert(next.clone());
            if let Some(label) = &transition.label {
                labels.push(label.clone());
            }
            dfs(&next, transitions, finals, on_path, labels, out);
            if transition.label.is_some() {
                labels.pop();
            }
            on_path.remove(&next);
        }
    }

    let net = model.net();
    let transitions: Vec<ClassicalTransition> = net
        .transitions()
        .map(|(id, label)| ClassicalTransition {
            label: label.clone(),
            pre: net.preset(id).iter().cloned().collect(),
            post: net.postset(id).iter().cloned().collect(),
        })
        .collect();
    let finals: BTreeSet<PlaceMarking> = model.final_markings().iter().map(as_places).collect();

    let mut out = BTreeSet::new();
    for initial in model.initial_markings() {
        let start = as_places(initial);
        let mut on_path = HashSet::from([start.clone()]);
        let mut labels = Vec::new();
        dfs(
            &start,
            &transitions,
            &finals,
            &mut on_path,
            &mut labels,
            &mut out,
        );
    }
    out
}

/// One random loop-free walk; `Some(labels)` when it stops in a final
/// marking without ever revisiting a marking.
pub fn random_playout(
    model: &AcceptingOcpn,
    rng: &mut ChaCha8Rng,
    limits: &EnumerationLimits,
) -> Option<Vec<String>> {
    let net = model.net();
    let initials: Vec<&Marking> = model.initial_markings().iter().collect();
    let mut marking = initials[rng.gen_range(0..initials.len())].clone();
    let mut visited: HashSet<Marking> = HashSet::from([marking.clone()]);
    let mut labels = Vec::new();

    for _ in 0..10_000 {
        if model.is_final(&marking) && rng.gen_bool(0.4) {
            return Some(labels);
        }
        let bindings = enabled_bindings(net, &marking, limits).ok()?;
        let moves: Vec<(_, Marking)> = bindings
            .into_iter()
            .filter_map(|b| fire(net, &marking, &b).ok().map(|m| (b, m)))
            .filter(|(_, m)| !visited.contains(m))
            .collect();
        if moves.is_empty() {
            return model.is_final(&marking).then_some(labels);
        }
        let (binding, next) = moves[rng.gen_range(0..moves.len())].clone();
        if let Some(label) = net.label(&binding.transition) {
            labels.push(label.clone());
        }
        visited.insert(next.clone());
        marking = next;
    }
    None
}
