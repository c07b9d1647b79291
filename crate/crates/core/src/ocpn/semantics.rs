//! Token-game semantics: binding enumeration, firing, exact loop-free
//! language computation, and trace replay.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::ocel::{Activity, ObjectId, ObjectType};

use super::{AcceptingOcpn, Binding, Marking, Ocpn, PlaceId, Token, TransitionId};

/// Budgets for state-space work. Exceeding a budget is a hard error so a
/// partial language is never reported as complete.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    /// Marking visits (DFS node expansions) allowed per model.
    pub max_marking_visits: usize,
    /// Bindings enumerated in a single marking.
    pub max_bindings_per_marking: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_marking_visits: 1_000_000,
            max_bindings_per_marking: 1 << 12,
        }
    }
}

impl EnumerationLimits {
    pub fn with_marking_visits(max_marking_visits: usize) -> Self {
        Self {
            max_marking_visits,
            ..Self::default()
        }
    }
}

fn objects_at_places(marking: &Marking) -> BTreeMap<PlaceId, BTreeSet<ObjectId>> {
    let mut map: BTreeMap<PlaceId, BTreeSet<ObjectId>> = BTreeMap::new();
    for (token, _) in marking.entries() {
        map.entry(token.place.clone())
            .or_default()
            .insert(token.object.clone());
    }
    map
}

fn objects_by_type(net: &Ocpn, marking: &Marking) -> BTreeMap<ObjectType, BTreeSet<ObjectId>> {
    let mut map: BTreeMap<ObjectType, BTreeSet<ObjectId>> = BTreeMap::new();
    for (token, _) in marking.entries() {
        if let Some(ty) = net.place_type(&token.place) {
            map.entry(ty.clone())
                .or_default()
                .insert(token.object.clone());
        }
    }
    map
}

/// Static per-transition data reused across markings during enumeration.
struct TypePlan {
    object_type: ObjectType,
    input_places: Vec<PlaceId>,
    single_object: bool,
}

struct TransitionPlan {
    id: TransitionId,
    types: Vec<TypePlan>,
}

fn transition_plans(net: &Ocpn) -> Vec<TransitionPlan> {
    net.transitions()
        .map(|(id, _)| {
            let non_variable = net.non_variable_types(id);
            let types = net
                .transition_types(id)
                .into_iter()
                .map(|ty| TypePlan {
                    input_places: net
                        .preset(id)
                        .iter()
                        .filter(|p| net.place_type(p) == Some(&ty))
                        .cloned()
                        .collect(),
                    single_object: non_variable.contains(&ty),
                    object_type: ty,
                })
                .collect();
            TransitionPlan {
                id: id.clone(),
                types,
            }
        })
        .collect()
}

/// Non-empty subsets of `candidates` in a fixed order.
fn non_empty_subsets(
    candidates: &BTreeSet<ObjectId>,
    transition: &str,
    limit: usize,
) -> Result<Vec<BTreeSet<ObjectId>>> {
    let items: Vec<&ObjectId> = candidates.iter().collect();
    if items.len() > 20 || (1usize << items.len()) - 1 > limit {
        return Err(Error::BindingCap {
            transition: transition.to_string(),
            limit,
        });
    }
    let mut subsets = Vec::with_capacity((1 << items.len()) - 1);
    for mask in 1u32..(1u32 << items.len()) {
        let subset: BTreeSet<ObjectId> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, o)| (*o).clone())
            .collect();
        subsets.push(subset);
    }
    Ok(subsets)
}

fn enabled_bindings_planned(
    net: &Ocpn,
    plans: &[TransitionPlan],
    marking: &Marking,
    limits: &EnumerationLimits,
) -> Result<Vec<Binding>> {
    let at_place = objects_at_places(marking);
    let by_type = objects_by_type(net, marking);
    let mut bindings = Vec::new();

    for plan in plans {
        let mut per_type: Vec<(&ObjectType, Vec<BTreeSet<ObjectId>>)> = Vec::new();
        let mut feasible = true;
        for type_plan in &plan.types {
            let candidates: BTreeSet<ObjectId> = if type_plan.input_places.is_empty() {
                by_type
                    .get(&type_plan.object_type)
                    .cloned()
                    .unwrap_or_default()
            } else {
                let mut iter = type_plan.input_places.iter();
                let mut acc = at_place
                    .get(iter.next().expect("non-empty"))
                    .cloned()
                    .unwrap_or_default();
                for place in iter {
                    match at_place.get(place) {
                        Some(here) => acc = acc.intersection(here).cloned().collect(),
                        None => acc.clear(),
                    }
                }
                acc
            };
            if candidates.is_empty() {
                feasible = false;
                break;
            }
            let choices = if type_plan.single_object {
                candidates
                    .iter()
                    .map(|o| BTreeSet::from([o.clone()]))
                    .collect()
            } else {
                non_empty_subsets(&candidates, &plan.id, limits.max_bindings_per_marking)?
            };
            per_type.push((&type_plan.object_type, choices));
        }
        if !feasible {
            continue;
        }

        let mut assignments: Vec<BTreeMap<ObjectType, BTreeSet<ObjectId>>> = vec![BTreeMap::new()];
        for (ty, choices) in &per_type {
            let mut extended = Vec::with_capacity(assignments.len() * choices.len());
            for assignment in &assignments {
                for choice in choices {
                    let mut next = assignment.clone();
                    next.insert((*ty).clone(), choice.clone());
                    extended.push(next);
                }
            }
            assignments = extended;
            if bindings.len() + assignments.len() > limits.max_bindings_per_marking {
                return Err(Error::BindingCap {
                    transition: plan.id.clone(),
                    limit: limits.max_bindings_per_marking,
                });
            }
        }
        bindings.extend(assignments.into_iter().map(|assignment| Binding {
            transition: plan.id.clone(),
            assignment,
        }));
    }
    Ok(bindings)
}

/// All bindings enabled in a marking, exhaustive over the objects present
/// in the marking. Types on non-variable arcs receive exactly one object;
/// the remaining types range over all non-empty subsets of the available
/// objects.
pub fn enabled_bindings(
    net: &Ocpn,
    marking: &Marking,
    limits: &EnumerationLimits,
) -> Result<Vec<Binding>> {
    enabled_bindings_planned(net, &transition_plans(net), marking, limits)
}

fn validate_binding(net: &Ocpn, binding: &Binding) -> Result<()> {
    if !net.has_transition(&binding.transition) {
        return Err(Error::InvalidBinding {
            transition: binding.transition.clone(),
            reason: "unknown transition".into(),
        });
    }
    let types = net.transition_types(&binding.transition);
    let domain: BTreeSet<ObjectType> = binding.assignment.keys().cloned().collect();
    if domain != types {
        return Err(Error::InvalidBinding {
            transition: binding.transition.clone(),
            reason: format!("assignment domain {domain:?} differs from transition types {types:?}"),
        });
    }
    for (ty, objects) in &binding.assignment {
        if objects.is_empty() {
            return Err(Error::InvalidBinding {
                transition: binding.transition.clone(),
                reason: format!("empty object set for type {ty}"),
            });
        }
    }
    for ty in net.non_variable_types(&binding.transition) {
        if binding.assignment[&ty].len() != 1 {
            return Err(Error::InvalidBinding {
                transition: binding.transition.clone(),
                reason: format!("type {ty} is on a non-variable arc but binds several objects"),
            });
        }
    }
    Ok(())
}

/// Tokens consumed by a binding: each bound object of an input place's type,
/// once per input place.
pub fn consumed(net: &Ocpn, binding: &Binding) -> Marking {
    let mut marking = Marking::empty();
    for place in net.preset(&binding.transition) {
        let ty = net.place_type(place).expect("place exists");
        if let Some(objects) = binding.assignment.get(ty) {
            for object in objects {
                marking.add(Token::new(place.clone(), object.clone()), 1);
            }
        }
    }
    marking
}

/// Tokens produced by a binding, mirroring [`consumed`] on the postset.
pub fn produced(net: &Ocpn, binding: &Binding) -> Marking {
    let mut marking = Marking::empty();
    for place in net.postset(&binding.transition) {
        let ty = net.place_type(place).expect("place exists");
        if let Some(objects) = binding.assignment.get(ty) {
            for object in objects {
                marking.add(Token::new(place.clone(), object.clone()), 1);
            }
        }
    }
    marking
}

/// Fires an enabled binding: the successor marking is
/// `marking - consumed + produced`.
pub fn fire(net: &Ocpn, marking: &Marking, binding: &Binding) -> Result<Marking> {
    validate_binding(net, binding)?;
    let consumed = consumed(net, binding);
    match marking.minus(&consumed) {
        Some(rest) => Ok(rest.plus(&produced(net, binding))),
        None => {
            let missing: Vec<String> = marking
                .missing_from(&consumed)
                .into_iter()
                .map(|t| format!("({}, {})", t.place, t.object))
                .collect();
            Err(Error::NotEnabled {
                transition: binding.transition.clone(),
                missing: missing.join(", "),
            })
        }
    }
}

/// The reachable marking graph: bindings are enumerated once per distinct
/// marking, then path enumeration works on indices only.
struct MarkingGraph {
    successors: Vec<Vec<(Binding, usize)>>,
    initial: Vec<usize>,
    is_final: Vec<bool>,
}

fn build_marking_graph(model: &AcceptingOcpn, limits: &EnumerationLimits) -> Result<MarkingGraph> {
    let net = model.net();
    let plans = transition_plans(net);
    let mut markings: Vec<Marking> = Vec::new();
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let mut intern = |marking: Marking,
                      markings: &mut Vec<Marking>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize> {
        if let Some(&i) = index.get(&marking) {
            return Ok(i);
        }
        let i = markings.len();
        if i >= limits.max_marking_visits {
            return Err(Error::StateBudget {
                limit: limits.max_marking_visits,
            });
        }
        index.insert(marking.clone(), i);
        markings.push(marking);
        queue.push_back(i);
        Ok(i)
    };

    let mut initial = Vec::new();
    for marking in model.initial_markings() {
        initial.push(intern(marking.clone(), &mut markings, &mut queue)?);
    }
    let mut successors: Vec<Vec<(Binding, usize)>> = Vec::new();
    while let Some(current) = queue.pop_front() {
        debug_assert_eq!(successors.len(), current);
        let marking = markings[current].clone();
        let mut edges = Vec::new();
        for binding in enabled_bindings_planned(net, &plans, &marking, limits)? {
            let consumed = consumed(net, &binding);
            let Some(rest) = marking.minus(&consumed) else {
                continue;
            };
            let next = rest.plus(&produced(net, &binding));
            let target = intern(next, &mut markings, &mut queue)?;
            edges.push((binding, target));
        }
        successors.push(edges);
    }

    let is_final = markings.iter().map(|m| model.is_final(m)).collect();
    Ok(MarkingGraph {
        successors,
        initial,
        is_final,
    })
}

impl MarkingGraph {
    /// Depth-first enumeration of loop-free paths: all markings along a
    /// path pairwise distinct, including the initial one. Every visit of a
    /// final marking reports the path so far and the search extends past it.
    fn each_accepting_path<F: FnMut(&[Binding])>(
        &self,
        limits: &EnumerationLimits,
        mut on_accept: F,
    ) -> Result<()> {
        let mut on_path = vec![false; self.successors.len()];
        let mut path: Vec<&Binding> = Vec::new();
        let mut owned: Vec<Binding> = Vec::new();
        let mut visits = 0usize;
        for &start in &self.initial {
            on_path[start] = true;
            self.dfs(
                start,
                limits,
                &mut visits,
                &mut on_path,
                &mut path,
                &mut owned,
                &mut on_accept,
            )?;
            on_path[start] = false;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<'a, F: FnMut(&[Binding])>(
        &'a self,
        node: usize,
        limits: &EnumerationLimits,
        visits: &mut usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<&'a Binding>,
        owned: &mut Vec<Binding>,
        on_accept: &mut F,
    ) -> Result<()> {
        *visits += 1;
        if *visits > limits.max_marking_visits {
            return Err(Error::StateBudget {
                limit: limits.max_marking_visits,
            });
        }
        if self.is_final[node] {
            owned.clear();
            owned.extend(path.iter().map(|b| (*b).clone()));
            on_accept(owned);
        }
        for (binding, target) in &self.successors[node] {
            if on_path[*target] {
                continue;
            }
            on_path[*target] = true;
            path.push(binding);
            self.dfs(*target, limits, visits, on_path, path, owned, on_accept)?;
            path.pop();
            on_path[*target] = false;
        }
        Ok(())
    }
}

fn explore<F: FnMut(&[Binding])>(
    model: &AcceptingOcpn,
    limits: &EnumerationLimits,
    on_accept: F,
) -> Result<()> {
    build_marking_graph(model, limits)?.each_accepting_path(limits, on_accept)
}

/// All loop-free valid binding sequences: sequences leading from an initial
/// to a final marking in which all visited markings are pairwise distinct.
pub fn loop_free_binding_sequences(
    model: &AcceptingOcpn,
    limits: &EnumerationLimits,
) -> Result<BTreeSet<Vec<Binding>>> {
    let mut sequences = BTreeSet::new();
    explore(model, limits, |path| {
        sequences.insert(path.to_vec());
    })?;
    Ok(sequences)
}

fn visible_labels(net: &Ocpn, path: &[Binding]) -> Vec<Activity> {
    path.iter()
        .filter_map(|b| net.label(&b.transition).cloned())
        .collect()
}

/// The language: loop-free binding sequences projected to the labels of
/// their non-silent transitions, collected as a set.
pub fn language(
    model: &AcceptingOcpn,
    limits: &EnumerationLimits,
) -> Result<BTreeSet<Vec<Activity>>> {
    let mut language = BTreeSet::new();
    explore(model, limits, |path| {
        language.insert(visible_labels(model.net(), path));
    })?;
    Ok(language)
}

/// The language together with, per visible sequence, its lexicographically
/// least witnessing binding sequence.
pub fn language_with_witnesses(
    model: &AcceptingOcpn,
    limits: &EnumerationLimits,
) -> Result<BTreeMap<Vec<Activity>, Vec<Binding>>> {
    let mut witnesses: BTreeMap<Vec<Activity>, Vec<Binding>> = BTreeMap::new();
    explore(model, limits, |path| {
        let visible = visible_labels(model.net(), path);
        match witnesses.get(&visible) {
            Some(existing) if existing.as_slice() <= path => {}
            _ => {
                witnesses.insert(visible, path.to_vec());
            }
        }
    })?;
    Ok(witnesses)
}

/// Whether the model can replay a label sequence from an initial to a final
/// marking, with silent transitions interleaved freely and markings allowed
/// to repeat. Breadth-first search over (marking, position) pairs with
/// successor lists cached per marking.
pub fn replays_trace(
    model: &AcceptingOcpn,
    trace: &[Activity],
    limits: &EnumerationLimits,
) -> Result<bool> {
    /// Outgoing edges of one marking: the fired transition's label and the
    /// successor's index.
    type Edges = Vec<(Option<Activity>, usize)>;

    let net = model.net();
    let plans = transition_plans(net);
    let mut markings: Vec<Marking> = Vec::new();
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut successors: Vec<Option<Edges>> = Vec::new();

    fn intern(
        marking: Marking,
        markings: &mut Vec<Marking>,
        index: &mut HashMap<Marking, usize>,
        successors: &mut Vec<Option<Edges>>,
        limit: usize,
    ) -> Result<usize> {
        if let Some(&i) = index.get(&marking) {
            return Ok(i);
        }
        let i = markings.len();
        if i >= limit {
            return Err(Error::StateBudget { limit });
        }
        index.insert(marking.clone(), i);
        markings.push(marking);
        successors.push(None);
        Ok(i)
    }

    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for initial in model.initial_markings() {
        let i = intern(
            initial.clone(),
            &mut markings,
            &mut index,
            &mut successors,
            limits.max_marking_visits,
        )?;
        if seen.insert((i, 0)) {
            queue.push_back((i, 0));
        }
    }

    let mut visits = 0usize;
    while let Some((node, position)) = queue.pop_front() {
        visits += 1;
        if visits > limits.max_marking_visits {
            return Err(Error::StateBudget {
                limit: limits.max_marking_visits,
            });
        }
        if position == trace.len() && model.is_final(&markings[node]) {
            return Ok(true);
        }
        if successors[node].is_none() {
            let marking = markings[node].clone();
            let mut edges = Vec::new();
            for binding in enabled_bindings_planned(net, &plans, &marking, limits)? {
                let consumed = consumed(net, &binding);
                let Some(rest) = marking.minus(&consumed) else {
                    continue;
                };
                let next = rest.plus(&produced(net, &binding));
                let target = intern(
                    next,
                    &mut markings,
                    &mut index,
                    &mut successors,
                    limits.max_marking_visits,
                )?;
                edges.push((net.label(&binding.transition).cloned(), target));
            }
            successors[node] = Some(edges);
        }
        for (label, target) in successors[node].as_ref().expect("filled above").clone() {
            let next_position = match label {
                None => position,
                Some(ref l) if position < trace.len() && *l == trace[position] => position + 1,
                Some(_) => continue,
            };
            if seen.insert((target, next_position)) {
                queue.push_back((target, next_position));
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocpn::{Arc, Place, Transition};

    fn place(id: &str, ty: &str) -> Place {
        Place {
            id: id.to_string(),
            object_type: ty.to_string(),
        }
    }

    fn labeled(id: &str, label: &str) -> Transition {
        Transition {
            id: id.to_string(),
            label: Some(label.to_string()),
        }
    }

    fn silent(id: &str) -> Transition {
        Transition {
            id: id.to_string(),
            label: None,
        }
    }

    fn accepting(net: Ocpn, initial: Marking, final_marking: Marking) -> AcceptingOcpn {
        AcceptingOcpn::new(
            net,
            BTreeSet::from([initial]),
            BTreeSet::from([final_marking]),
        )
        .unwrap()
    }

    /// p1 -a-> p2 -b-> p3 -c-> p4 with one object.
    fn sequential_net() -> AcceptingOcpn {
        let net = Ocpn::new(
            vec![
                place("p1", "X"),
                place("p2", "X"),
                place("p3", "X"),
                place("p4", "X"),
            ],
            vec![labeled("ta", "a"), labeled("tb", "b"), labeled("tc", "c")],
            vec![
                Arc::new("p1", "ta"),
                Arc::new("ta", "p2"),
                Arc::new("p2", "tb"),
                Arc::new("tb", "p3"),
                Arc::new("p3", "tc"),
                Arc::new("tc", "p4"),
            ],
        )
        .unwrap();
        accepting(
            net,
            Marking::from_tokens(vec![Token::new("p1", "o")]),
            Marking::from_tokens(vec![Token::new("p4", "o")]),
        )
    }

    /// k concurrent labeled transitions, one object per branch.
    fn concurrent_net(k: usize) -> AcceptingOcpn {
        let mut places = Vec::new();
        let mut transitions = Vec::new();
        let mut arcs = Vec::new();
        let mut initial = Marking::empty();
        let mut final_marking = Marking::empty();
        for i in 0..k {
            places.push(place(&format!("src{i}"), "X"));
            places.push(place(&format!("snk{i}"), "X"));
            transitions.push(labeled(&format!("t{i}"), &format!("A{i}")));
            arcs.push(Arc::new(format!("src{i}"), format!("t{i}")));
            arcs.push(Arc::new(format!("t{i}"), format!("snk{i}")));
            initial.add(Token::new(format!("src{i}"), format!("o{i}")), 1);
            final_marking.add(Token::new(format!("snk{i}"), format!("o{i}")), 1);
        }
        accepting(
            Ocpn::new(places, transitions, arcs).unwrap(),
            initial,
            final_marking,
        )
    }

    #[test]
    fn empty_marking_enables_nothing() {
        let model = sequential_net();
        let bindings = enabled_bindings(
            model.net(),
            &Marking::empty(),
            &EnumerationLimits::default(),
        )
        .unwrap();
        assert!(bindings.is_empty());
    }

    #[test]
    fn forced_binding_is_unique() {
        let model = sequential_net();
        let bindings = enabled_bindings(
            model.net(),
            model.initial_markings().iter().next().unwrap(),
            &EnumerationLimits::default(),
        )
        .unwrap();
        assert_eq!(bindings.len(), 1);
        let binding = &bindings[0];
        assert_eq!(binding.transition, "ta");
        assert_eq!(binding.assignment["X"], BTreeSet::from(["o".to_string()]));
    }

    #[test]
    fn variable_arc_enumerates_non_empty_subsets() {
        // Brute-force oracle: every non-empty subset of {o1, o2} must appear.
        let net = Ocpn::new(
            vec![place("p", "X"), place("q", "X")],
            vec![labeled("t", "a")],
            vec![Arc::variable("p", "t"), Arc::variable("t", "q")],
        )
        .unwrap();
        let marking = Marking::from_tokens(vec![Token::new("p", "o1"), Token::new("p", "o2")]);
        let model = accepting(net, marking.clone(), Marking::empty());
        let bindings =
            enabled_bindings(model.net(), &marking, &EnumerationLimits::default()).unwrap();
        let got: BTreeSet<BTreeSet<String>> =
            bindings.iter().map(|b| b.assignment["X"].clone()).collect();
        let expected: BTreeSet<BTreeSet<String>> = [vec!["o1"], vec!["o2"], vec!["o1", "o2"]]
            .into_iter()
            .map(|v| v.into_iter().map(str::to_string).collect())
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn firing_moves_the_token() {
        let model = sequential_net();
        let initial = model.initial_markings().iter().next().unwrap();
        let bindings =
            enabled_bindings(model.net(), initial, &EnumerationLimits::default()).unwrap();
        let next = fire(model.net(), initial, &bindings[0]).unwrap();
        assert_eq!(next, Marking::from_tokens(vec![Token::new("p2", "o")]));
    }

    #[test]
    fn firing_token_count_arithmetic() {
        let model = concurrent_net(3);
        let initial = model.initial_markings().iter().next().unwrap();
        let bindings =
            enabled_bindings(model.net(), initial, &EnumerationLimits::default()).unwrap();
        for binding in &bindings {
            let next = fire(model.net(), initial, binding).unwrap();
            let consumed = consumed(model.net(), binding);
            let produced = produced(model.net(), binding);
            assert_eq!(
                next.total(),
                initial.total() - consumed.total() + produced.total()
            );
        }
    }

    #[test]
    fn firing_disabled_binding_names_missing_tokens() {
        let model = sequential_net();
        let binding = Binding {
            transition: "tb".to_string(),
            assignment: BTreeMap::from([("X".to_string(), BTreeSet::from(["o".to_string()]))]),
        };
        let err = fire(
            model.net(),
            model.initial_markings().iter().next().unwrap(),
            &binding,
        )
        .unwrap_err();
        match err {
            Error::NotEnabled {
                transition,
                missing,
            } => {
                assert_eq!(transition, "tb");
                assert!(missing.contains("p2"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn variable_assembly_consumes_all_bound_objects() {
        // Two tires move over a variable arc, one frame over a normal arc.
        let net = Ocpn::new(
            vec![
                place("tires", "Tire"),
                place("frames", "Frame"),
                place("done_t", "Tire"),
                place("done_f", "Frame"),
            ],
            vec![labeled("assemble", "assemble")],
            vec![
                Arc::variable("tires", "assemble"),
                Arc::new("frames", "assemble"),
                Arc::variable("assemble", "done_t"),
                Arc::new("assemble", "done_f"),
            ],
        )
        .unwrap();
        let marking = Marking::from_tokens(vec![
            Token::new("tires", "t1"),
            Token::new("tires", "t2"),
            Token::new("frames", "f1"),
        ]);
        let binding = Binding {
            transition: "assemble".to_string(),
            assignment: BTreeMap::from([
                (
                    "Tire".to_string(),
                    BTreeSet::from(["t1".to_string(), "t2".to_string()]),
                ),
                ("Frame".to_string(), BTreeSet::from(["f1".to_string()])),
            ]),
        };
        // Oracle: consumed/produced per definition, one token per (place, object).
        let cons = consumed(&net, &binding);
        assert_eq!(cons.total(), 3);
        let prod = produced(&net, &binding);
        assert_eq!(prod.total(), 3);
        let model = accepting(net, marking.clone(), Marking::empty());
        let next = fire(model.net(), &marking, &binding).unwrap();
        assert_eq!(next.total(), 3);
        assert_eq!(next.count(&Token::new("done_t", "t1")), 1);
        assert_eq!(next.count(&Token::new("done_t", "t2")), 1);
        assert_eq!(next.count(&Token::new("done_f", "f1")), 1);
    }

    #[test]
    fn sequential_net_has_one_binding_sequence() {
        let model = sequential_net();
        let sequences = loop_free_binding_sequences(&model, &EnumerationLimits::default()).unwrap();
        assert_eq!(sequences.len(), 1);
        assert_eq!(sequences.iter().next().unwrap().len(), 3);
    }

    #[test]
    fn self_loop_never_fires() {
        // b loops on p2: firing it would repeat the marking.
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "X")],
            vec![labeled("ta", "a"), labeled("tb", "b")],
            vec![
                Arc::new("p1", "ta"),
                Arc::new("ta", "p2"),
                Arc::new("p2", "tb"),
                Arc::new("tb", "p2"),
            ],
        )
        .unwrap();
        let model = accepting(
            net,
            Marking::from_tokens(vec![Token::new("p1", "o")]),
            Marking::from_tokens(vec![Token::new("p2", "o")]),
        );
        let language = language(&model, &EnumerationLimits::default()).unwrap();
        assert_eq!(language, BTreeSet::from([vec!["a".to_string()]]));
    }

    #[test]
    fn two_independent_components_interleave() {
        let model = concurrent_net(2);
        let sequences = loop_free_binding_sequences(&model, &EnumerationLimits::default()).unwrap();
        assert_eq!(sequences.len(), 2);
    }

    #[test]
    fn concurrency_counts_factorially() {
        for k in [2usize, 3, 4] {
            let model = concurrent_net(k);
            let language = language(&model, &EnumerationLimits::default()).unwrap();
            let expected: usize = (1..=k).product();
            assert_eq!(language.len(), expected, "k = {k}");
        }
    }

    #[test]
    fn state_budget_is_a_hard_error() {
        let model = concurrent_net(4);
        let err = language(&model, &EnumerationLimits::with_marking_visits(10)).unwrap_err();
        assert!(matches!(err, Error::StateBudget { limit: 10 }));
    }

    #[test]
    fn binding_cap_is_a_hard_error() {
        let net = Ocpn::new(
            vec![place("p", "X"), place("q", "X")],
            vec![labeled("t", "a")],
            vec![Arc::variable("p", "t"), Arc::variable("t", "q")],
        )
        .unwrap();
        let marking = Marking::from_tokens(
            (0..6)
                .map(|i| Token::new("p", format!("o{i}")))
                .collect::<Vec<_>>(),
        );
        let limits = EnumerationLimits {
            max_bindings_per_marking: 8,
            ..Default::default()
        };
        let err = enabled_bindings(&net, &marking, &limits).unwrap_err();
        assert!(matches!(err, Error::BindingCap { .. }));
    }

    #[test]
    fn silent_transitions_drop_from_language() {
        let net = Ocpn::new(
            vec![place("p1", "X"), place("p2", "X"), place("p3", "X")],
            vec![silent("tau"), labeled("ta", "a")],
            vec![
                Arc::new("p1", "tau"),
                Arc::new("tau", "p2"),
                Arc::new("p2", "ta"),
                Arc::new("ta", "p3"),
            ],
        )
        .unwrap();
        let model = accepting(
            net,
            Marking::from_tokens(vec![Token::new("p1", "o")]),
            Marking::from_tokens(vec![Token::new("p3", "o")]),
        );
        let language = language(&model, &EnumerationLimits::default()).unwrap();
        assert_eq!(language, BTreeSet::from([vec!["a".to_string()]]));
    }

    #[test]
    fn witnesses_pick_lexicographically_least() {
        let model = concurrent_net(2);
        let witnesses = language_with_witnesses(&model, &EnumerationLimits::default()).unwrap();
        assert_eq!(witnesses.len(), 2);
        for (visible, witness) in &witnesses {
            assert_eq!(
                visible,
                &witness
                    .iter()
                    .map(|b| model.net().label(&b.transition).unwrap().clone())
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn replay_accepts_language_members_and_rejects_others() {
        let model = sequential_net();
        let limits = EnumerationLimits::default();
        let trace: Vec<Activity> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert!(replays_trace(&model, &trace, &limits).unwrap());
        let wrong: Vec<Activity> = ["b", "a"].iter().map(|s| s.to_string()).collect();
        assert!(!replays_trace(&model, &wrong, &limits).unwrap());
    }
}
