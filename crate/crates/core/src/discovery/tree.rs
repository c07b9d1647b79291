//! Process trees: the intermediate representation produced by the miner.

use std::collections::BTreeSet;

use crate::ocel::Activity;

/// A block-structured process model. Operator nodes have at least two
/// children; a loop has exactly a body and a redo part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProcessTree {
    Activity(Activity),
    Silent,
    Sequence(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    Parallel(Vec<ProcessTree>),
    Loop(Box<ProcessTree>, Box<ProcessTree>),
}

impl ProcessTree {
    pub fn activity(label: impl Into<String>) -> Self {
        Self::Activity(label.into())
    }

    /// All activity labels occurring in the tree.
    pub fn activities(&self) -> BTreeSet<Activity> {
        let mut set = BTreeSet::new();
        self.collect_activities(&mut set);
        set
    }

    fn collect_activities(&self, into: &mut BTreeSet<Activity>) {
        match self {
            Self::Activity(a) => {
                into.insert(a.clone());
            }
            Self::Silent => {}
            Self::Sequence(children) | Self::Xor(children) | Self::Parallel(children) => {
                for child in children {
                    child.collect_activities(into);
                }
            }
            Self::Loop(body, redo) => {
                body.collect_activities(into);
                redo.collect_activities(into);
            }
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Self::Activity(_) | Self::Silent => false,
            Self::Sequence(children) | Self::Xor(children) | Self::Parallel(children) => {
                children.iter().any(Self::contains_loop)
            }
            Self::Loop(_, _) => true,
        }
    }

    /// Checks the structural invariants: operator nodes need at least two
    /// children and leaves none (guaranteed by the enum shape).
    pub fn is_well_formed(&self) -> bool {
        match self {
            Self::Activity(_) | Self::Silent => true,
            Self::Sequence(children) | Self::Xor(children) | Self::Parallel(children) => {
                children.len() >= 2 && children.iter().all(Self::is_well_formed)
            }
            Self::Loop(body, redo) => body.is_well_formed() && redo.is_well_formed(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activities_and_shape() {
        let tree = ProcessTree::Sequence(vec![
            ProcessTree::activity("a"),
            ProcessTree::Xor(vec![ProcessTree::activity("b"), ProcessTree::Silent]),
        ]);
        assert!(tree.is_well_formed());
        assert!(!tree.contains_loop());
        assert_eq!(
            tree.activities(),
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );

        let degenerate = ProcessTree::Parallel(vec![ProcessTree::activity("a")]);
        assert!(!degenerate.is_well_formed());

        let looped = ProcessTree::Loop(
            Box::new(ProcessTree::Silent),
            Box::new(ProcessTree::activity("a")),
        );
        assert!(looped.contains_loop());
    }
}
