//! Canonical JSON format for accepting object-centric Petri nets.
//!
//! Places carry `{id, type}`, transitions `{id, label?}`, arcs
//! `{source, target, variable}`, and each marking is a token list of
//! `{object, place}` entries (tokens with multiplicity appear repeatedly).
//! Serialization sorts keys and arrays so equal nets produce equal bytes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::{AcceptingOcpn, Arc, Marking, Ocpn, Place, Token, Transition};

#[derive(Serialize, Deserialize)]
struct NetDoc {
    arcs: Vec<ArcDoc>,
    final_markings: Vec<Vec<TokenDoc>>,
    initial_markings: Vec<Vec<TokenDoc>>,
    places: Vec<PlaceDoc>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
struct ArcDoc {
    source: String,
    target: String,
    variable: bool,
}

#[derive(Serialize, Deserialize)]
struct PlaceDoc {
    id: String,
    #[serde(rename = "type")]
    object_type: String,
}

#[derive(Serialize, Deserialize)]
struct TransitionDoc {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TokenDoc {
    object: String,
    place: String,
}

fn marking_doc(marking: &Marking) -> Vec<TokenDoc> {
    let mut tokens = Vec::new();
    for (token, count) in marking.entries() {
        for _ in 0..count {
            tokens.push(TokenDoc {
                object: token.object.clone(),
                place: token.place.clone(),
            });
        }
    }
    tokens
}

fn marking_from_doc(tokens: &[TokenDoc]) -> Marking {
    Marking::from_tokens(
        tokens
            .iter()
            .map(|t| Token::new(t.place.clone(), t.object.clone())),
    )
}

pub fn serialize_net(model: &AcceptingOcpn) -> Vec<u8> {
    let net = model.net();
    let markings_doc = |markings: &BTreeSet<Marking>| -> Vec<Vec<TokenDoc>> {
        markings.iter().map(marking_doc).collect()
    };
    let doc = NetDoc {
        arcs: net
            .arcs()
            .map(|a| ArcDoc {
                source: a.source.clone(),
                target: a.target.clone(),
                variable: a.variable,
            })
            .collect(),
        final_markings: markings_doc(model.final_markings()),
        initial_markings: markings_doc(model.initial_markings()),
        places: net
            .places()
            .map(|(id, ty)| PlaceDoc {
                id: id.clone(),
                object_type: ty.clone(),
            })
            .collect(),
        transitions: net
            .transitions()
            .map(|(id, label)| TransitionDoc {
                id: id.clone(),
                label: label.clone(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("net serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

pub fn parse_net(bytes: &[u8]) -> Result<AcceptingOcpn> {
    let doc: NetDoc = serde_json::from_slice(bytes)?;
    let net = Ocpn::new(
        doc.places
            .iter()
            .map(|p| Place {
                id: p.id.clone(),
                object_type: p.object_type.clone(),
            })
            .collect(),
        doc.transitions
            .iter()
            .map(|t| Transition {
                id: t.id.clone(),
                label: t.label.clone(),
            })
            .collect(),
        doc.arcs
            .iter()
            .map(|a| Arc {
                source: a.source.clone(),
                target: a.target.clone(),
                variable: a.variable,
            })
            .collect(),
    )?;
    let initial: BTreeSet<Marking> = doc
        .initial_markings
        .iter()
        .map(|m| marking_from_doc(m))
        .collect();
    let final_markings: BTreeSet<Marking> = doc
        .final_markings
        .iter()
        .map(|m| marking_from_doc(m))
        .collect();
    AcceptingOcpn::new(net, initial, final_markings)
}
