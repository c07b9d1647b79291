//! DOT export: places colored by object type, silent transitions filled
//! black, variable arcs drawn as double lines.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::ocel::ObjectType;

use super::AcceptingOcpn;

const PALETTE: [&str; 10] = [
    "#a6cee3", "#fdbf6f", "#b2df8a", "#fb9a99", "#cab2d6", "#ffff99", "#1f78b4", "#33a02c",
    "#ff7f00", "#e31a1c",
];

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(model: &AcceptingOcpn) -> String {
    let net = model.net();
    let colors: BTreeMap<&ObjectType, &str> = net
        .places()
        .map(|(_, ty)| ty)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, ty)| (ty, PALETTE[i % PALETTE.len()]))
        .collect();

    let mut out = String::from("digraph ocpn {\n    rankdir=LR;\n");
    for (id, ty) in net.places() {
        writeln!(
            out,
            "    \"{}\" [shape=circle style=filled fillcolor=\"{}\" label=\"{}\" xlabel=\"{}\"];",
            escape(id),
            colors[ty],
            escape(ty),
            escape(id)
        )
        .unwrap();
    }
    for (id, label) in net.transitions() {
        match label {
            Some(label) => writeln!(
                out,
                "    \"{}\" [shape=box label=\"{}\"];",
                escape(id),
                escape(label)
            )
            .unwrap(),
            None => writeln!(
                out,
                "    \"{}\" [shape=box style=filled fillcolor=black label=\"\" width=0.15 height=0.4];",
                escape(id)
            )
            .unwrap(),
        }
    }
    for arc in net.arcs() {
        if arc.variable {
            writeln!(
                out,
                "    \"{}\" -> \"{}\" [color=\"black:invis:black\"];",
                escape(&arc.source),
                escape(&arc.target)
            )
            .unwrap();
        } else {
            writeln!(
                out,
                "    \"{}\" -> \"{}\";",
                escape(&arc.source),
                escape(&arc.target)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocpn::{Arc, Marking, Ocpn, Place, Token, Transition};
    use std::collections::BTreeSet;

    #[test]
    fn dot_renders_types_variability_and_silence() {
        let net = Ocpn::new(
            vec![
                Place {
                    id: "p1".into(),
                    object_type: "Tire".into(),
                },
                Place {
                    id: "p2".into(),
                    object_type: "Wheel".into(),
                },
            ],
            vec![
                Transition {
                    id: "t1".into(),
                    label: Some("mount".into()),
                },
                Transition {
                    id: "tau0".into(),
                    label: None,
                },
            ],
            vec![Arc::variable("p1", "t1"), Arc::new("t1", "p2")],
        )
        .unwrap();
        let model = AcceptingOcpn::new(
            net,
            BTreeSet::from([Marking::from_tokens(vec![Token::new("p1", "t")])]),
            BTreeSet::from([Marking::from_tokens(vec![Token::new("p2", "w")])]),
        )
        .unwrap();
        let dot = to_dot(&model);
        assert!(dot.starts_with("digraph ocpn {"));
        assert!(
            dot.contains("black:invis:black"),
            "variable arc missing: {dot}"
        );
        assert!(
            dot.contains("fillcolor=black"),
            "silent transition missing: {dot}"
        );
        // Distinct types get distinct colors.
        assert!(dot.contains(PALETTE[0]) && dot.contains(PALETTE[1]));
        assert!(dot.contains("label=\"mount\""));
    }
}
