//! Model complexity and quality metrics: inter-/intra-object complexity of
//! object-centric nets and language-based fitness/precision of discovered
//! models against system models.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ocel::{Activity, ObjectType};
use crate::ocpn::{
    language, AcceptingOcpn, Arc, EnumerationLimits, Marking, Ocpn, Place, Token, Transition,
};

/// Structural and behavioral complexity of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityProfile {
    /// Labeled (non-silent) transitions.
    pub numt: usize,
    /// Object types in the net.
    pub numot: usize,
    pub inter: f64,
    pub intra: f64,
}

/// Language-based fitness and precision per the quality definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityScore {
    pub fitness: f64,
    pub precision: f64,
}

/// Inter-object complexity: the normalized average number of extra place
/// types per transition preset,
/// `1/max(1, |OT|-1) * sum_t (|types(preset(t))| - 1) / |T|`.
/// Nets with a single object type score 1 by convention (a traditional
/// process couples everything through its one object).
pub fn inter_complexity(net: &Ocpn) -> Result<f64> {
    for (transition, _) in net.transitions() {
        if net.preset(transition).is_empty() {
            return Err(Error::EmptyPreset(transition.clone()));
        }
    }
    let num_types = net.object_types().len();
    if num_types <= 1 {
        return Ok(1.0);
    }
    if net.num_transitions() == 0 {
        return Ok(0.0);
    }
    let extra_types: usize = net
        .transitions()
        .map(|(transition, _)| {
            let preset_types: BTreeSet<&ObjectType> = net
                .preset(transition)
                .iter()
                .map(|p| net.place_type(p).expect("place exists"))
                .collect();
            preset_types.len() - 1
        })
        .sum();
    Ok(extra_types as f64 / net.num_transitions() as f64 / (num_types - 1) as f64)
}

/// The subnet of one object type: its places, every transition touching
/// them, the induced arcs, retained labels, and the markings restricted to
/// tokens of that type's places.
pub fn subnet(model: &AcceptingOcpn, object_type: &str) -> Result<AcceptingOcpn> {
    let net = model.net();
    if !net.object_types().contains(object_type) {
        return Err(Error::UnknownType(object_type.to_string()));
    }
    let places: Vec<Place> = net
        .places()
        .filter(|(_, ty)| ty.as_str() == object_type)
        .map(|(id, ty)| Place {
            id: id.clone(),
            object_type: ty.clone(),
        })
        .collect();
    let place_ids: BTreeSet<&String> = places.iter().map(|p| &p.id).collect();
    let transitions: Vec<Transition> = net
        .transitions()
        .filter(|(id, _)| {
            net.preset(id)
                .iter()
                .chain(net.postset(id))
                .any(|p| place_ids.contains(p))
        })
        .map(|(id, label)| Transition {
            id: id.clone(),
            label: label.clone(),
        })
        .collect();
    let transition_ids: BTreeSet<&String> = transitions.iter().map(|t| &t.id).collect();
    let arcs: Vec<Arc> = net
        .arcs()
        .filter(|a| {
            (place_ids.contains(&a.source) && transition_ids.contains(&a.target))
                || (transition_ids.contains(&a.source) && place_ids.contains(&a.target))
        })
        .cloned()
        .collect();

    let restrict = |markings: &BTreeSet<Marking>| -> BTreeSet<Marking> {
        markings
            .iter()
            .map(|m| {
                let mut restricted = Marking::empty();
                for (token, count) in m.entries() {
                    if place_ids.contains(&token.place) {
                        restricted
                            .add(Token::new(token.place.clone(), token.object.clone()), count);
                    }
                }
                restricted
            })
            .collect()
    };

    let initial = restrict(model.initial_markings());
    let final_markings = restrict(model.final_markings());
    AcceptingOcpn::new(
        Ocpn::new(places, transitions, arcs)?,
        initial,
        final_markings,
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Intra-object complexity of one type: the subnet's loop-free language
/// size over the factorial of its labeled transition count.
pub fn type_intra_complexity(
    model: &AcceptingOcpn,
    object_type: &str,
    limits: &EnumerationLimits,
) -> Result<f64> {
    let sub = subnet(model, object_type)?;
    let lang = language(&sub, limits)?;
    Ok(lang.len() as f64 / factorial(sub.net().num_labeled()))
}

/// Mean intra-object complexity over all object types of the model.
pub fn intra_complexity(model: &AcceptingOcpn, limits: &EnumerationLimits) -> Result<f64> {
    let types = model.net().object_types();
    if types.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for ty in &types {
        sum += type_intra_complexity(model, ty, limits)?;
    }
    Ok(sum / types.len() as f64)
}

pub fn complexity_profile(
    model: &AcceptingOcpn,
    limits: &EnumerationLimits,
) -> Result<ComplexityProfile> {
    Ok(ComplexityProfile {
        numt: model.net().num_labeled(),
        numot: model.net().object_types().len(),
        inter: inter_complexity(model.net())?,
        intra: intra_complexity(model, limits)?,
    })
}

/// Quality from already-enumerated languages: fitness is the covered share
/// of the system language, precision the valid share of the discovered one.
pub fn quality_from_languages(
    system: &BTreeSet<Vec<Activity>>,
    discovered: &BTreeSet<Vec<Activity>>,
) -> Result<QualityScore> {
    if system.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    if discovered.is_empty() {
        return Err(Error::EmptyDiscoveredLanguage);
    }
    let shared = system.intersection(discovered).count() as f64;
    Ok(QualityScore {
        fitness: shared / system.len() as f64,
        precision: shared / discovered.len() as f64,
    })
}

/// Enumerates both languages and scores the discovered model against the
/// system model.
pub fn quality(
    system: &AcceptingOcpn,
    discovered: &AcceptingOcpn,
    limits: &EnumerationLimits,
) -> Result<QualityScore> {
    let system_language = language(system, limits)?;
    let discovered_language = language(discovered, limits)?;
    quality_from_languages(&system_language, &discovered_language)
}

/// Cached languages keyed by label sequences; used by the experiment runner
/// to avoid re-enumerating the system model.
pub type Language = BTreeSet<Vec<Activity>>;

/// Convenience for building languages in tests and callers.
pub fn language_of(sequences: &[&[&str]]) -> Language {
    sequences
        .iter()
        .map(|t| t.iter().map(|s| s.to_string()).collect())
        .collect()
}
