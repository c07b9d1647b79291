//! The basic, noise-free Inductive Miner: recursive cut detection on the
//! directly-follows graph in the order exclusive-choice, sequence,
//! parallel, loop, with a flower-model fall-through. The discovered tree
//! replays every input trace.

use std::collections::{BTreeMap, BTreeSet};

use crate::ocel::Activity;

use super::dfg::Dfg;
use super::tree::ProcessTree;
use super::TypedLog;

pub fn inductive_miner(log: &TypedLog) -> ProcessTree {
    mine(&log.traces)
}

fn mine(traces: &[Vec<Activity>]) -> ProcessTree {
    if traces.is_empty() {
        return ProcessTree::Silent;
    }
    let non_empty: Vec<Vec<Activity>> = traces.iter().filter(|t| !t.is_empty()).cloned().collect();
    if non_empty.is_empty() {
        return ProcessTree::Silent;
    }
    if non_empty.len() < traces.len() {
        // Empty traces make the rest optional.
        return ProcessTree::Xor(vec![ProcessTree::Silent, mine(&non_empty)]);
    }

    let dfg = Dfg::from_traces(&non_empty);
    if dfg.alphabet.len() == 1 {
        let activity = dfg.alphabet.iter().next().expect("non-empty").clone();
        if non_empty.iter().all(|t| t.len() == 1) {
            return ProcessTree::Activity(activity);
        }
        // The activity repeats within a trace.
        return ProcessTree::Loop(
            Box::new(ProcessTree::Activity(activity)),
            Box::new(ProcessTree::Silent),
        );
    }

    if let Some(classes) = xor_cut(&dfg) {
        let sublogs = split_by_class(&non_empty, &classes);
        return ProcessTree::Xor(sublogs.iter().map(|l| mine(l)).collect());
    }
    if let Some(classes) = sequence_cut(&dfg) {
        let sublogs = split_by_projection(&non_empty, &classes);
        return ProcessTree::Sequence(sublogs.iter().map(|l| mine(l)).collect());
    }
    if let Some(classes) = parallel_cut(&dfg) {
        let sublogs = split_by_projection(&non_empty, &classes);
        return ProcessTree::Parallel(sublogs.iter().map(|l| mine(l)).collect());
    }
    if let Some(body) = loop_cut(&dfg) {
        let (body_log, redo_log) = split_loop(&non_empty, &body);
        return ProcessTree::Loop(Box::new(mine(&body_log)), Box::new(mine(&redo_log)));
    }

    // Flower model: any activity, any number of times, in any order.
    ProcessTree::Loop(
        Box::new(ProcessTree::Silent),
        Box::new(ProcessTree::Xor(
            dfg.alphabet
                .iter()
                .map(|a| ProcessTree::Activity(a.clone()))
                .collect(),
        )),
    )
}

fn undirected_components(
    nodes: &BTreeSet<Activity>,
    edges: &BTreeSet<(Activity, Activity)>,
) -> Vec<BTreeSet<Activity>> {
    let mut adjacency: BTreeMap<&Activity, BTreeSet<&Activity>> =
        nodes.iter().map(|n| (n, BTreeSet::new())).collect();
    for (a, b) in edges {
        if nodes.contains(a) && nodes.contains(b) {
            adjacency.get_mut(a).expect("node").insert(b);
            adjacency.get_mut(b).expect("node").insert(a);
        }
    }
    let mut components = Vec::new();
    let mut seen: BTreeSet<&Activity> = BTreeSet::new();
    for start in nodes {
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
            stack.extend(adjacency[node].iter());
        }
        components.push(component);
    }
    components
}

fn xor_cut(dfg: &Dfg) -> Option<Vec<BTreeSet<Activity>>> {
    let components = undirected_components(&dfg.alphabet, &dfg.edges);
    (components.len() >= 2).then_some(components)
}

/// Maximal ordered partition where earlier classes reach later ones and
/// never vice versa. Mutually reachable or mutually unreachable activities
/// fall into the same class.
fn sequence_cut(dfg: &Dfg) -> Option<Vec<BTreeSet<Activity>>> {
    let activities: Vec<&Activity> = dfg.alphabet.iter().collect();
    let n = activities.len();
    let index: BTreeMap<&Activity, usize> = activities
        .iter()
        .enumerate()
        .map(|(i, a)| (*a, i))
        .collect();

    let mut reach = vec![vec![false; n]; n];
    for (a, b) in &dfg.edges {
        reach[index[a]][index[b]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via: Vec<usize> = (0..n).filter(|&j| reach[k][j]).collect();
                for j in via {
                    reach[i][j] = true;
                }
            }
        }
    }

    let mut classes: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
    let forward = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        a.iter().any(|&x| b.iter().any(|&y| reach[x][y]))
    };
    loop {
        let mut merged = false;
        'pairs: for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                if forward(&classes[i], &classes[j]) == forward(&classes[j], &classes[i]) {
                    let absorbed = classes.remove(j);
                    classes[i].extend(absorbed);
                    merged = true;
                    break 'pairs;
                }
            }
        }
        if !merged {
            break;
        }
    }
    if classes.len() < 2 {
        return None;
    }

    // Exactly one direction holds between any two classes; a transitive
    // tournament has predecessor counts 0..m-1.
    let m = classes.len();
    let mut predecessor_counts = vec![0usize; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && forward(&classes[j], &classes[i]) {
                predecessor_counts[i] += 1;
            }
        }
    }
    let mut sorted_counts = predecessor_counts.clone();
    sorted_counts.sort_unstable();
    if sorted_counts != (0..m).collect::<Vec<_>>() {
        return None;
    }

    let mut ordered: Vec<(usize, BTreeSet<usize>)> =
        predecessor_counts.into_iter().zip(classes).collect();
    ordered.sort_by_key(|(count, _)| *count);
    Some(
        ordered
            .into_iter()
            .map(|(_, class)| class.iter().map(|&i| activities[i].clone()).collect())
            .collect(),
    )
}

/// Partition where every cross-class activity pair directly follows in both
/// orders and every class holds a start and an end activity.
fn parallel_cut(dfg: &Dfg) -> Option<Vec<BTreeSet<Activity>>> {
    let mut conflict_edges: BTreeSet<(Activity, Activity)> = BTreeSet::new();
    for a in &dfg.alphabet {
        for b in &dfg.alphabet {
            if a < b {
                let both_ways = dfg.edges.contains(&(a.clone(), b.clone()))
                    && dfg.edges.contains(&(b.clone(), a.clone()));
                if !both_ways {
                    conflict_edges.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    let components = undirected_components(&dfg.alphabet, &conflict_edges);
    if components.len() < 2 {
        return None;
    }
    let (mut anchored, unanchored): (Vec<BTreeSet<Activity>>, Vec<BTreeSet<Activity>>) =
        components.into_iter().partition(|c| {
            c.iter().any(|a| dfg.starts.contains(a)) && c.iter().any(|a| dfg.ends.contains(a))
        });
    if anchored.len() < 2 {
        return None;
    }
    // Classes lacking a start or end cannot stand alone; absorbing them
    // into another class keeps all cross-pairs bidirectional.
    for class in unanchored {
        anchored[0].extend(class);
    }
    anchored.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
    Some(anchored)
}

/// Loop cut: the body holds all start and end activities; redo components
/// re-enter the body only through start activities and are entered only
/// from end activities, completely.
fn loop_cut(dfg: &Dfg) -> Option<BTreeSet<Activity>> {
    let mut body: BTreeSet<Activity> = dfg.starts.union(&dfg.ends).cloned().collect();
    let rest: BTreeSet<Activity> = dfg.alphabet.difference(&body).cloned().collect();
    if rest.is_empty() {
        return None;
    }
    let candidates = undirected_components(&rest, &dfg.edges);
    let mut redo_found = false;
    for component in candidates {
        let mut entries: BTreeSet<&Activity> = BTreeSet::new();
        let mut exits: BTreeSet<&Activity> = BTreeSet::new();
        let mut valid = true;
        for (a, b) in &dfg.edges {
            match (component.contains(a), component.contains(b)) {
                (false, true) => {
                    if !dfg.ends.contains(a) {
                        valid = false;
                        break;
                    }
                    entries.insert(b);
                }
                (true, false) => {
                    if !dfg.starts.contains(b) {
                        valid = false;
                        break;
                    }
                    exits.insert(a);
                }
                _ => {}
            }
        }
        if valid {
            valid = entries.iter().all(|c| {
                dfg.ends
                    .iter()
                    .all(|e| dfg.edges.contains(&(e.clone(), (*c).clone())))
            }) && exits.iter().all(|c| {
                dfg.starts
                    .iter()
                    .all(|s| dfg.edges.contains(&((*c).clone(), s.clone())))
            });
        }
        if valid {
            redo_found = true;
        } else {
            body.extend(component);
        }
    }
    redo_found.then_some(body)
}

/// Every trace lies entirely in one class; group traces by it.
fn split_by_class(
    traces: &[Vec<Activity>],
    classes: &[BTreeSet<Activity>],
) -> Vec<Vec<Vec<Activity>>> {
    let mut sublogs = vec![Vec::new(); classes.len()];
    for trace in traces {
        let first = trace.first().expect("empty traces were stripped");
        let class = classes
            .iter()
            .position(|c| c.contains(first))
            .expect("classes cover the alphabet");
        sublogs[class].push(trace.clone());
    }
    sublogs
}

/// Project every trace onto each class alphabet; empty projections stay in
/// the sublog and make that part optional.
fn split_by_projection(
    traces: &[Vec<Activity>],
    classes: &[BTreeSet<Activity>],
) -> Vec<Vec<Vec<Activity>>> {
    classes
        .iter()
        .map(|class| {
            traces
                .iter()
                .map(|trace| {
                    trace
                        .iter()
                        .filter(|a| class.contains(*a))
                        .cloned()
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Cut each trace into maximal body/redo segments; bodies and redos feed
/// the two child logs.
fn split_loop(
    traces: &[Vec<Activity>],
    body: &BTreeSet<Activity>,
) -> (Vec<Vec<Activity>>, Vec<Vec<Activity>>) {
    let mut body_log = Vec::new();
    let mut redo_log = Vec::new();
    for trace in traces {
        let mut segment: Vec<Activity> = Vec::new();
        let mut in_body = true;
        for activity in trace {
            let here = body.contains(activity);
            if here != in_body && !segment.is_empty() {
                if in_body {
                    body_log.push(std::mem::take(&mut segment));
                } else {
                    redo_log.push(std::mem::take(&mut segment));
                }
            }
            in_body = here;
            segment.push(activity.clone());
        }
        if !segment.is_empty() {
            if in_body {
                body_log.push(segment);
            } else {
                redo_log.push(segment);
            }
        }
    }
    (body_log, redo_log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(traces: &[&[&str]]) -> TypedLog {
        TypedLog {
            object_type: "X".to_string(),
            traces: traces
                .iter()
                .map(|t| t.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    #[test]
    fn single_activity_is_a_leaf() {
        assert_eq!(inductive_miner(&log(&[&["A"]])), ProcessTree::activity("A"));
    }

    #[test]
    fn repeated_single_activity_becomes_a_loop() {
        let tree = inductive_miner(&log(&[&["A", "A"], &["A"]]));
        assert_eq!(
            tree,
            ProcessTree::Loop(
                Box::new(ProcessTree::activity("A")),
                Box::new(ProcessTree::Silent)
            )
        );
    }

    #[test]
    fn both_orders_mine_to_parallel() {
        let tree = inductive_miner(&log(&[&["A", "B"], &["B", "A"]]));
        assert_eq!(
            tree,
            ProcessTree::Parallel(vec![ProcessTree::activity("A"), ProcessTree::activity("B")])
        );
    }

    #[test]
    fn choice_after_prefix_mines_to_sequence_of_xor() {
        let tree = inductive_miner(&log(&[&["A", "B"], &["A", "C"]]));
        assert_eq!(
            tree,
            ProcessTree::Sequence(vec![
                ProcessTree::activity("A"),
                ProcessTree::Xor(vec![ProcessTree::activity("B"), ProcessTree::activity("C")]),
            ])
        );
    }

    #[test]
    fn disconnected_activities_mine_to_xor() {
        let tree = inductive_miner(&log(&[&["A"], &["B"]]));
        assert_eq!(
            tree,
            ProcessTree::Xor(vec![ProcessTree::activity("A"), ProcessTree::activity("B")])
        );
    }

    #[test]
    fn empty_trace_makes_rest_optional() {
        let tree = inductive_miner(&log(&[&[], &["A"]]));
        assert_eq!(
            tree,
            ProcessTree::Xor(vec![ProcessTree::Silent, ProcessTree::activity("A")])
        );
    }

    #[test]
    fn all_empty_traces_mine_to_silent() {
        assert_eq!(inductive_miner(&log(&[&[], &[]])), ProcessTree::Silent);
    }

    #[test]
    fn plain_loop_is_rediscovered() {
        // A, then any number of (B, A).
        let tree = inductive_miner(&log(&[
            &["A"],
            &["A", "B", "A"],
            &["A", "B", "A", "B", "A"],
        ]));
        assert_eq!(
            tree,
            ProcessTree::Loop(
                Box::new(ProcessTree::activity("A")),
                Box::new(ProcessTree::activity("B"))
            )
        );
    }

    #[test]
    fn unstructured_log_falls_through_to_flower() {
        // Pairwise relations that admit no xor/sequence/parallel/loop cut.
        let tree = inductive_miner(&log(&[
            &["A", "B", "C", "D"],
            &["B", "D", "A", "C"],
            &["B", "A", "C", "D"],
        ]));
        match &tree {
            ProcessTree::Loop(body, redo) => {
                assert_eq!(**body, ProcessTree::Silent);
                match &**redo {
                    ProcessTree::Xor(children) => assert_eq!(children.len(), 4),
                    other => panic!("expected xor redo, got {other:?}"),
                }
            }
            other => panic!("expected flower, got {other:?}"),
        }
    }

    #[test]
    fn mining_is_deterministic() {
        let input = log(&[&["A", "B", "C"], &["B", "A", "C"], &["A", "C"]]);
        assert_eq!(inductive_miner(&input), inductive_miner(&input));
    }
}
