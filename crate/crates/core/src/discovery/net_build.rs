//! Compiling process trees to accepting nets, and assembling per-type nets
//! into one object-centric net by fusing equally-labeled transitions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::ocel::{Activity, ObjectId, ObjectType};
use crate::ocpn::{
    AcceptingOcpn, Arc, Marking, Ocpn, Place, PlaceId, Token, Transition, TransitionId,
};

use super::tree::ProcessTree;

/// A compiled workflow net fragment with unique source and sink places.
#[derive(Debug, Clone)]
pub(crate) struct CompiledNet {
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    pub arcs: Vec<Arc>,
    pub source: PlaceId,
    pub sink: PlaceId,
}

struct Builder {
    namespace: String,
    object_type: ObjectType,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<Arc>,
    place_counter: usize,
    tau_counter: usize,
    label_counts: BTreeMap<Activity, usize>,
}

impl Builder {
    fn new(object_type: &str, namespace: &str) -> Self {
        Self {
            namespace: namespace.to_string(),
            object_type: object_type.to_string(),
            places: Vec::new(),
            transitions: Vec::new(),
            arcs: Vec::new(),
            place_counter: 0,
            tau_counter: 0,
            label_counts: BTreeMap::new(),
        }
    }

    fn add_place(&mut self, id: String) -> PlaceId {
        self.places.push(Place {
            id: id.clone(),
            object_type: self.object_type.clone(),
        });
        id
    }

    fn fresh_place(&mut self) -> PlaceId {
        let id = format!("{}p{}", self.namespace, self.place_counter);
        self.place_counter += 1;
        self.add_place(id)
    }

    fn fresh_tau(&mut self) -> TransitionId {
        let id = format!("{}tau{}", self.namespace, self.tau_counter);
        self.tau_counter += 1;
        self.transitions.push(Transition {
            id: id.clone(),
            label: None,
        });
        id
    }

    /// Labeled transitions are keyed by label (`t:<label>`) so equal labels
    /// from different per-type nets fuse on assembly. Duplicate labels within
    /// one tree get a numeric suffix and stay separate.
    fn labeled(&mut self, label: &Activity) -> TransitionId {
        let n = self.label_counts.entry(label.clone()).or_insert(0);
        *n += 1;
        let id = if *n == 1 {
            format!("t:{label}")
        } else {
            format!("t:{label}#{n}")
        };
        self.transitions.push(Transition {
            id: id.clone(),
            label: Some(label.clone()),
        });
        id
    }

    fn arc(&mut self, source: &str, target: &str) {
        self.arcs.push(Arc::new(source, target));
    }

    fn compile(&mut self, tree: &ProcessTree, input: &PlaceId, output: &PlaceId) {
        match tree {
            ProcessTree::Activity(label) => {
                let t = self.labeled(label);
                self.arc(input, &t);
                self.arc(&t, output);
            }
            ProcessTree::Silent => {
                let t = self.fresh_tau();
                self.arc(input, &t);
                self.arc(&t, output);
            }
            ProcessTree::Sequence(children) => {
                let mut current = input.clone();
                for (i, child) in children.iter().enumerate() {
                    let next = if i + 1 == children.len() {
                        output.clone()
                    } else {
                        self.fresh_place()
                    };
                    self.compile(child, &current, &next);
                    current = next;
                }
            }
            ProcessTree::Xor(children) => {
                for child in children {
                    self.compile(child, input, output);
                }
            }
            ProcessTree::Parallel(children) => {
                let split = self.fresh_tau();
                let join = self.fresh_tau();
                self.arc(input, &split);
                self.arc(&join, output);
                for child in children {
                    let branch_in = self.fresh_place();
                    let branch_out = self.fresh_place();
                    self.arc(&split, &branch_in);
                    self.compile(child, &branch_in, &branch_out);
                    self.arc(&branch_out, &join);
                }
            }
            ProcessTree::Loop(body, redo) => {
                let enter = self.fresh_tau();
                let exit = self.fresh_tau();
                let loop_in = self.fresh_place();
                let loop_out = self.fresh_place();
                self.arc(input, &enter);
                self.arc(&enter, &loop_in);
                self.compile(body, &loop_in, &loop_out);
                self.compile(redo, &loop_out, &loop_in);
                self.arc(&loop_out, &exit);
                self.arc(&exit, output);
            }
        }
    }
}

/// Compiles a tree into a workflow net whose places carry `object_type`
/// and whose internal ids are prefixed by `namespace`.
pub(crate) fn compile_tree(tree: &ProcessTree, object_type: &str, namespace: &str) -> CompiledNet {
    let mut builder = Builder::new(object_type, namespace);
    let source = builder.add_place(format!("{namespace}source"));
    let sink = builder.add_place(format!("{namespace}sink"));
    builder.compile(tree, &source, &sink);
    CompiledNet {
        places: builder.places,
        transitions: builder.transitions,
        arcs: builder.arcs,
        source,
        sink,
    }
}

/// Canonical marking object for a type: nets carry one object per type.
pub(crate) fn canonical_object(object_type: &str) -> ObjectId {
    format!("{object_type}:1")
}

/// Merges per-type fragments into one accepting net. Transitions sharing an
/// id (equal labels) fuse and keep the union of their arcs; `is_variable`
/// decides per (label, place type) whether the touching arcs are variable.
/// The initial (final) marking holds one token per type in its source
/// (sink) place.
pub(crate) fn assemble_accepting<F>(
    parts: &[(ObjectType, CompiledNet)],
    is_variable: F,
) -> Result<AcceptingOcpn>
where
    F: Fn(&Activity, &ObjectType) -> bool,
{
    let mut places = Vec::new();
    let mut place_types: BTreeMap<PlaceId, ObjectType> = BTreeMap::new();
    let mut transitions: BTreeMap<TransitionId, Option<Activity>> = BTreeMap::new();
    let mut arc_endpoints: BTreeSet<(String, String)> = BTreeSet::new();
    let mut initial = Marking::empty();
    let mut final_marking = Marking::empty();

    for (object_type, part) in parts {
        for place in &part.places {
            place_types.insert(place.id.clone(), place.object_type.clone());
            places.push(place.clone());
        }
        for transition in &part.transitions {
            let existing = transitions
                .entry(transition.id.clone())
                .or_insert_with(|| transition.label.clone());
            debug_assert_eq!(
                existing, &transition.label,
                "fused transitions agree on labels"
            );
        }
        for arc in &part.arcs {
            arc_endpoints.insert((arc.source.clone(), arc.target.clone()));
        }
        initial.add(
            Token::new(part.source.clone(), canonical_object(object_type)),
            1,
        );
        final_marking.add(
            Token::new(part.sink.clone(), canonical_object(object_type)),
            1,
        );
    }

    let arcs = arc_endpoints
        .into_iter()
        .map(|(source, target)| {
            let (place, transition) = if place_types.contains_key(&source) {
                (&source, &target)
            } else {
                (&target, &source)
            };
            let variable = match transitions.get(transition).and_then(Option::as_ref) {
                Some(label) => is_variable(label, &place_types[place]),
                None => false,
            };
            Arc {
                source: source.clone(),
                target: target.clone(),
                variable,
            }
        })
        .collect();

    let net = Ocpn::new(
        places,
        transitions
            .into_iter()
            .map(|(id, label)| Transition { id, label })
            .collect(),
        arcs,
    )?;
    AcceptingOcpn::new(
        net,
        BTreeSet::from([initial]),
        BTreeSet::from([final_marking]),
    )
}

/// Compiles a tree into an accepting traditional net over a single
/// anonymous object type with one case object.
pub fn tree_to_net(tree: &ProcessTree) -> Result<AcceptingOcpn> {
    let part = compile_tree(tree, "case", "");
    assemble_accepting(&[("case".to_string(), part)], |_, _| false)
}
