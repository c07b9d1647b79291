//! Directly-follows graphs with start and end activity sets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ocel::Activity;

use super::TypedLog;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfg {
    pub alphabet: BTreeSet<Activity>,
    pub edges: BTreeSet<(Activity, Activity)>,
    pub starts: BTreeSet<Activity>,
    pub ends: BTreeSet<Activity>,
}

impl Dfg {
    pub(crate) fn from_traces<'a, I>(traces: I) -> Self
    where
        I: IntoIterator<Item = &'a Vec<Activity>>,
    {
        let mut dfg = Dfg {
            alphabet: BTreeSet::new(),
            edges: BTreeSet::new(),
            starts: BTreeSet::new(),
            ends: BTreeSet::new(),
        };
        for trace in traces {
            if let (Some(first), Some(last)) = (trace.first(), trace.last()) {
                dfg.starts.insert(first.clone());
                dfg.ends.insert(last.clone());
            }
            dfg.alphabet.extend(trace.iter().cloned());
            for pair in trace.windows(2) {
                dfg.edges.insert((pair[0].clone(), pair[1].clone()));
            }
        }
        dfg
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges
            .iter()
            .any(|(a, b)| a.as_str() == from && b.as_str() == to)
    }
}

/// The directly-follows graph of a typed log. Empty traces contribute
/// nothing; a log without traces is an error.
pub fn dfg(log: &TypedLog) -> Result<Dfg> {
    if log.traces.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(Dfg::from_traces(&log.traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::TypedLog;

    fn typed(traces: &[&[&str]]) -> TypedLog {
        TypedLog {
            object_type: "X".to_string(),
            traces: traces
                .iter()
                .map(|t| t.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    #[test]
    fn chain_produces_chain_edges() {
        let graph = dfg(&typed(&[&["A", "B", "C"]])).unwrap();
        assert_eq!(graph.edges.len(), 2);
        assert!(graph.has_edge("A", "B"));
        assert!(graph.has_edge("B", "C"));
        assert_eq!(graph.starts, BTreeSet::from(["A".to_string()]));
        assert_eq!(graph.ends, BTreeSet::from(["C".to_string()]));
    }

    #[test]
    fn both_orders_produce_both_edges() {
        let graph = dfg(&typed(&[&["A", "B"], &["B", "A"]])).unwrap();
        assert!(graph.has_edge("A", "B"));
        assert!(graph.has_edge("B", "A"));
    }

    #[test]
    fn singleton_trace_has_no_edges() {
        let graph = dfg(&typed(&[&["A"]])).unwrap();
        assert!(graph.edges.is_empty());
        assert_eq!(graph.starts, graph.ends);
    }

    #[test]
    fn empty_log_is_an_error() {
        assert!(matches!(dfg(&typed(&[])), Err(Error::EmptyLog)));
    }
}
