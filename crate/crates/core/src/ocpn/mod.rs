//! Object-centric Petri nets: typed places, variable arcs, markings over
//! (place, object) tokens, and accepting nets with initial/final markings.

mod dot;
mod json;
mod semantics;

pub use dot::to_dot;
pub use json::{parse_net, serialize_net};
pub use semantics::{
    consumed, enabled_bindings, fire, language, language_with_witnesses,
    loop_free_binding_sequences, produced, replays_trace, EnumerationLimits,
};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ocel::{Activity, ObjectId, ObjectType};

pub type PlaceId = String;
pub type TransitionId = String;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Place {
    pub id: PlaceId,
    pub object_type: ObjectType,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub id: TransitionId,
    /// Silent transitions carry no label and never appear in the language.
    pub label: Option<Activity>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arc {
    pub source: String,
    pub target: String,
    /// Variable arcs may move more than one object of the place's type.
    pub variable: bool,
}

impl Arc {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            variable: false,
        }
    }

    pub fn variable(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            variable: true,
        }
    }
}

/// An object-centric Petri net. Place and transition ids share one
/// namespace so arcs can name their endpoints unambiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ocpn {
    places: BTreeMap<PlaceId, ObjectType>,
    transitions: BTreeMap<TransitionId, Option<Activity>>,
    arcs: BTreeSet<Arc>,
    preset: BTreeMap<TransitionId, BTreeSet<PlaceId>>,
    postset: BTreeMap<TransitionId, BTreeSet<PlaceId>>,
}

impl Ocpn {
    pub fn new(places: Vec<Place>, transitions: Vec<Transition>, arcs: Vec<Arc>) -> Result<Self> {
        let mut place_map = BTreeMap::new();
        let mut transition_map = BTreeMap::new();
        for place in places {
            if place_map
                .insert(place.id.clone(), place.object_type)
                .is_some()
            {
                return Err(Error::DuplicateNode(place.id));
            }
        }
        for transition in transitions {
            if place_map.contains_key(&transition.id)
                || transition_map
                    .insert(transition.id.clone(), transition.label)
                    .is_some()
            {
                return Err(Error::DuplicateNode(transition.id));
            }
        }

        let mut preset: BTreeMap<TransitionId, BTreeSet<PlaceId>> = transition_map
            .keys()
            .map(|t| (t.clone(), BTreeSet::new()))
            .collect();
        let mut postset = preset.clone();
        let mut arc_set = BTreeSet::new();
        let mut endpoints = BTreeSet::new();
        for arc in arcs {
            let source_is_place = place_map.contains_key(&arc.source);
            let source_is_transition = transition_map.contains_key(&arc.source);
            let target_is_place = place_map.contains_key(&arc.target);
            let target_is_transition = transition_map.contains_key(&arc.target);
            if !source_is_place && !source_is_transition {
                return Err(Error::DanglingArcEndpoint(arc.source));
            }
            if !target_is_place && !target_is_transition {
                return Err(Error::DanglingArcEndpoint(arc.target));
            }
            if source_is_place && target_is_transition {
                preset
                    .get_mut(&arc.target)
                    .expect("transition registered")
                    .insert(arc.source.clone());
            } else if source_is_transition && target_is_place {
                postset
                    .get_mut(&arc.source)
                    .expect("transition registered")
                    .insert(arc.target.clone());
            } else {
                return Err(Error::NonBipartiteArc {
                    from: arc.source,
                    to: arc.target,
                });
            }
            if !endpoints.insert((arc.source.clone(), arc.target.clone())) {
                return Err(Error::DuplicateArc {
                    from: arc.source,
                    to: arc.target,
                });
            }
            arc_set.insert(arc);
        }

        Ok(Self {
            places: place_map,
            transitions: transition_map,
            arcs: arc_set,
            preset,
            postset,
        })
    }

    pub fn places(&self) -> impl Iterator<Item = (&PlaceId, &ObjectType)> {
        self.places.iter()
    }

    pub fn place_type(&self, place: &str) -> Option<&ObjectType> {
        self.places.get(place)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&TransitionId, &Option<Activity>)> {
        self.transitions.iter()
    }

    pub fn label(&self, transition: &str) -> Option<&Activity> {
        self.transitions.get(transition).and_then(Option::as_ref)
    }

    pub fn has_transition(&self, transition: &str) -> bool {
        self.transitions.contains_key(transition)
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter()
    }

    pub fn preset(&self, transition: &str) -> &BTreeSet<PlaceId> {
        static EMPTY: BTreeSet<PlaceId> = BTreeSet::new();
        self.preset.get(transition).unwrap_or(&EMPTY)
    }

    pub fn postset(&self, transition: &str) -> &BTreeSet<PlaceId> {
        static EMPTY: BTreeSet<PlaceId> = BTreeSet::new();
        self.postset.get(transition).unwrap_or(&EMPTY)
    }

    /// Object types of the places surrounding a transition.
    pub fn transition_types(&self, transition: &str) -> BTreeSet<ObjectType> {
        self.preset(transition)
            .iter()
            .chain(self.postset(transition))
            .map(|p| self.places[p].clone())
            .collect()
    }

    /// Object types connected to a transition by at least one non-variable arc.
    /// Bindings assign exactly one object to each of these types.
    pub fn non_variable_types(&self, transition: &str) -> BTreeSet<ObjectType> {
        self.arcs
            .iter()
            .filter(|a| !a.variable)
            .filter_map(|a| {
                if a.source == transition {
                    Some(&a.target)
                } else if a.target == transition {
                    Some(&a.source)
                } else {
                    None
                }
            })
            .filter_map(|p| self.places.get(p).cloned())
            .collect()
    }

    /// Object types present in the net (the range of the place typing).
    pub fn object_types(&self) -> BTreeSet<ObjectType> {
        self.places.values().cloned().collect()
    }

    /// Labeled (non-silent) transition count.
    pub fn num_labeled(&self) -> usize {
        self.transitions.values().filter(|l| l.is_some()).count()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn has_variable_arcs(&self) -> bool {
        self.arcs.iter().any(|a| a.variable)
    }
}

/// True iff the net has a single place type and no variable arcs.
pub fn is_traditional_net(net: &Ocpn) -> bool {
    net.object_types().len() == 1 && !net.has_variable_arcs()
}

/// A token puts an object into a place of the object's type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub place: PlaceId,
    pub object: ObjectId,
}

impl Token {
    pub fn new(place: impl Into<String>, object: impl Into<String>) -> Self {
        Self {
            place: place.into(),
            object: object.into(),
        }
    }
}

/// A multiset of tokens. The sorted map keeps equality and hashing
/// canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<Token, u32>);

impl Marking {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_tokens<I: IntoIterator<Item = Token>>(tokens: I) -> Self {
        let mut marking = Self::default();
        for token in tokens {
            marking.add(token, 1);
        }
        marking
    }

    pub fn add(&mut self, token: Token, count: u32) {
        if count > 0 {
            *self.0.entry(token).or_insert(0) += count;
        }
    }

    pub fn count(&self, token: &Token) -> u32 {
        self.0.get(token).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total token count, multiplicities included.
    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Token, u32)> {
        self.0.iter().map(|(t, c)| (t, *c))
    }

    /// Multiset inclusion: `other` fits into `self`.
    pub fn includes(&self, other: &Marking) -> bool {
        other.entries().all(|(t, c)| self.count(t) >= c)
    }

    pub fn plus(&self, other: &Marking) -> Marking {
        let mut result = self.clone();
        for (token, count) in other.entries() {
            result.add(token.clone(), count);
        }
        result
    }

    /// Multiset difference; `None` when `other` is not included in `self`.
    pub fn minus(&self, other: &Marking) -> Option<Marking> {
        if !self.includes(other) {
            return None;
        }
        let mut result = self.clone();
        for (token, count) in other.entries() {
            let remaining = result.0.get_mut(token).expect("inclusion checked");
            *remaining -= count;
            if *remaining == 0 {
                result.0.remove(token);
            }
        }
        Some(result)
    }

    /// Tokens of `other` that are missing from `self`.
    pub fn missing_from(&self, other: &Marking) -> Vec<Token> {
        other
            .entries()
            .filter(|(t, c)| self.count(t) < *c)
            .map(|(t, _)| t.clone())
            .collect()
    }
}

/// A transition plus a per-type object assignment; the unit of firing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub transition: TransitionId,
    pub assignment: BTreeMap<ObjectType, BTreeSet<ObjectId>>,
}

/// An object-centric Petri net with initial and final marking sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptingOcpn {
    net: Ocpn,
    initial_markings: BTreeSet<Marking>,
    final_markings: BTreeSet<Marking>,
    /// Object typing derived from the places objects occupy in the markings.
    object_types: BTreeMap<ObjectId, ObjectType>,
}

impl AcceptingOcpn {
    pub fn new(
        net: Ocpn,
        initial_markings: BTreeSet<Marking>,
        final_markings: BTreeSet<Marking>,
    ) -> Result<Self> {
        if initial_markings.is_empty() || final_markings.is_empty() {
            return Err(Error::MissingMarkings);
        }
        let mut object_types: BTreeMap<ObjectId, ObjectType> = BTreeMap::new();
        for marking in initial_markings.iter().chain(&final_markings) {
            for (token, _) in marking.entries() {
                let place_type = net
                    .place_type(&token.place)
                    .ok_or_else(|| Error::UnknownPlace(token.place.clone()))?;
                match object_types.get(&token.object) {
                    None => {
                        object_types.insert(token.object.clone(), place_type.clone());
                    }
                    Some(existing) if existing == place_type => {}
                    Some(existing) => {
                        return Err(Error::InconsistentObjectType {
                            object: token.object.clone(),
                            first: existing.clone(),
                            second: place_type.clone(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            net,
            initial_markings,
            final_markings,
            object_types,
        })
    }

    pub fn net(&self) -> &Ocpn {
        &self.net
    }

    pub fn initial_markings(&self) -> &BTreeSet<Marking> {
        &self.initial_markings
    }

    pub fn final_markings(&self) -> &BTreeSet<Marking> {
        &self.final_markings
    }

    pub fn is_final(&self, marking: &Marking) -> bool {
        self.final_markings.contains(marking)
    }

    /// Type of an object from the marking universe.
    pub fn object_type_of(&self, object: &str) -> Option<&ObjectType> {
        self.object_types.get(object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn place(id: &str, ty: &str) -> Place {
        Place {
            id: id.to_string(),
            object_type: ty.to_string(),
        }
    }

    fn transition(id: &str, label: Option<&str>) -> Transition {
        Transition {
            id: id.to_string(),
            label: label.map(str::to_string),
        }
    }

    #[test]
    fn construction_builds_presets_and_postsets() {
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "X")],
            vec![transition("t", Some("a"))],
            vec![Arc::new("p1", "t"), Arc::new("t", "p2")],
        )
        .unwrap();
        assert_eq!(net.preset("t").len(), 1);
        assert_eq!(net.postset("t").len(), 1);
        assert_eq!(net.transition_types("t").len(), 1);
        assert!(is_traditional_net(&net));
    }

    #[test]
    fn rejects_non_bipartite_and_dangling_arcs() {
        let err = Ocpn::new(
            vec![place("p1", "X"), place("p2", "X")],
            vec![],
            vec![Arc::new("p1", "p2")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonBipartiteArc { .. }));

        let err = Ocpn::new(
            vec![place("p1", "X")],
            vec![],
            vec![Arc::new("p1", "nowhere")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingArcEndpoint(e) if e == "nowhere"));
    }

    #[test]
    fn one_variable_arc_breaks_traditionality() {
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "X")],
            vec![transition("t", Some("a"))],
            vec![Arc::variable("p1", "t"), Arc::new("t", "p2")],
        )
        .unwrap();
        assert!(!is_traditional_net(&net));
        assert!(net.non_variable_types("t").contains("X"));
    }

    #[test]
    fn multiple_place_types_break_traditionality() {
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "Y")],
            vec![transition("t", Some("a"))],
            vec![Arc::new("p1", "t"), Arc::new("t", "p2")],
        )
        .unwrap();
        assert!(!is_traditional_net(&net));
    }

    #[test]
    fn marking_arithmetic() {
        let mut m = Marking::from_tokens(vec![Token::new("p", "o1"), Token::new("p", "o2")]);
        m.add(Token::new("p", "o1"), 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.count(&Token::new("p", "o1")), 2);

        let sub = Marking::from_tokens(vec![Token::new("p", "o1")]);
        let rest = m.minus(&sub).unwrap();
        assert_eq!(rest.total(), 2);
        assert!(rest.includes(&sub));
        assert_eq!(rest.plus(&sub).total(), 3);

        let too_much = Marking::from_tokens(vec![Token::new("p", "o3")]);
        assert!(m.minus(&too_much).is_none());
        assert_eq!(m.missing_from(&too_much), vec![Token::new("p", "o3")]);
    }

    #[test]
    fn accepting_net_rejects_conflicting_object_types() {
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "Y")],
            vec![transition("t", Some("a"))],
            vec![Arc::new("p1", "t"), Arc::new("t", "p2")],
        )
        .unwrap();
        let initial = Marking::from_tokens(vec![Token::new("p1", "o")]);
        let final_marking = Marking::from_tokens(vec![Token::new("p2", "o")]);
        let err = AcceptingOcpn::new(
            net,
            BTreeSet::from([initial]),
            BTreeSet::from([final_marking]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentObjectType { .. }));
    }

    #[test]
    fn accepting_net_requires_markings() {
        let net = Ocpn::new(vec![place("p1", "X")], vec![], vec![]).unwrap();
        let err = AcceptingOcpn::new(net, BTreeSet::new(), BTreeSet::new()).unwrap_err();
        assert!(matches!(err, Error::MissingMarkings));
    }
}
