//! Random generation of loop-free two-object-type system models spanning
//! the inter/intra complexity plane.
//!
//! Each object type gets a random process tree over the operators
//! sequence, exclusive-choice, and parallel; activities marked as shared
//! fuse across the type nets. Candidates whose exact language is empty or
//! exceeds the state budget are discarded and resampled.

use std::ops::RangeInclusive;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discovery::ProcessTree;
use crate::error::Result;
use crate::metrics::{complexity_profile, ComplexityProfile};
use crate::ocel::{Activity, ObjectType};
use crate::ocpn::{language, serialize_net, AcceptingOcpn, EnumerationLimits};

/// Relative weights for the tree operators. Loops are not available: the
/// sampled event logs must come from finite languages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorWeights {
    pub sequence: f64,
    pub xor: f64,
    pub parallel: f64,
}

impl Default for OperatorWeights {
    fn default() -> Self {
        Self {
            sequence: 0.6,
            xor: 0.2,
            parallel: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Labeled transitions of the model.
    pub visible_activities: usize,
    pub num_types: usize,
    /// Probability that an activity is shared by all types.
    pub sharing_prob: f64,
    pub weights: OperatorWeights,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            visible_activities: 6,
            num_types: 2,
            sharing_prob: 0.3,
            weights: OperatorWeights::default(),
            seed: 0,
        }
    }
}

/// A generated ground-truth model together with its complexity profile.
#[derive(Debug, Clone)]
pub struct SystemModel {
    /// Stable hash of the net structure.
    pub id: String,
    pub seed: u64,
    pub params: GenParams,
    pub model: AcceptingOcpn,
    pub profile: ComplexityProfile,
    pub language_size: usize,
}

/// Deterministic seed derivation for independent RNG streams.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn activity_name(index: usize) -> Activity {
    if index < 26 {
        char::from(b'A' + index as u8).to_string()
    } else {
        format!("A{index}")
    }
}

fn type_name(index: usize) -> ObjectType {
    format!("T{index}")
}

fn sample_tree(
    activities: &[Activity],
    weights: &OperatorWeights,
    rng: &mut ChaCha8Rng,
) -> ProcessTree {
    if activities.len() == 1 {
        return ProcessTree::Activity(activities[0].clone());
    }
    let total = weights.sequence + weights.xor + weights.parallel;
    let pick = if total > 0.0 {
        rng.gen::<f64>() * total
    } else {
        0.0
    };
    let mut shuffled = activities.to_vec();
    shuffled.shuffle(rng);
    let part_count = rng.gen_range(2..=shuffled.len().min(4));
    let mut cut_points: Vec<usize> = (1..shuffled.len()).collect();
    cut_points.shuffle(rng);
    cut_points.truncate(part_count - 1);
    cut_points.sort_unstable();

    let mut parts = Vec::with_capacity(part_count);
    let mut begin = 0;
    for cut in cut_points.into_iter().chain([shuffled.len()]) {
        parts.push(shuffled[begin..cut].to_vec());
        begin = cut;
    }
    let children: Vec<ProcessTree> = parts
        .iter()
        .map(|part| sample_tree(part, weights, rng))
        .collect();

    if total <= 0.0 || pick < weights.sequence {
        ProcessTree::Sequence(children)
    } else if pick < weights.sequence + weights.xor {
        ProcessTree::Xor(children)
    } else {
        ProcessTree::Parallel(children)
    }
}

fn sequence_tree(activities: &[Activity], rng: &mut ChaCha8Rng) -> ProcessTree {
    if activities.len() == 1 {
        return ProcessTree::Activity(activities[0].clone());
    }
    let mut shuffled = activities.to_vec();
    shuffled.shuffle(rng);
    ProcessTree::Sequence(shuffled.into_iter().map(ProcessTree::Activity).collect())
}

/// Per-type activity sets: shared activities go to every type, the rest to
/// one random type each, with every type guaranteed at least one activity.
fn assign_activities(
    params: &GenParams,
    sharing_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<Activity>> {
    let activities: Vec<Activity> = (0..params.visible_activities).map(activity_name).collect();
    for _ in 0..64 {
        let mut per_type: Vec<Vec<Activity>> = vec![Vec::new(); params.num_types];
        for activity in &activities {
            if rng.gen_bool(sharing_prob.clamp(0.0, 1.0)) {
                for owned in &mut per_type {
                    owned.push(activity.clone());
                }
            } else {
                per_type[rng.gen_range(0..params.num_types)].push(activity.clone());
            }
        }
        if per_type.iter().all(|a| !a.is_empty()) {
            return per_type;
        }
    }
    // Round-robin keeps every type inhabited regardless of the draw.
    let mut per_type: Vec<Vec<Activity>> = vec![Vec::new(); params.num_types];
    for (i, activity) in activities.iter().enumerate() {
        per_type[i % params.num_types].push(activity.clone());
    }
    per_type
}

fn model_id(model: &AcceptingOcpn) -> String {
    let digest = Sha256::digest(serialize_net(model));
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn try_sample(
    params: &GenParams,
    sharing_prob: f64,
    sequences_only: bool,
    rng: &mut ChaCha8Rng,
    limits: &EnumerationLimits,
) -> Option<SystemModel> {
    let per_type = assign_activities(params, sharing_prob, rng);
    let parts: Vec<(ObjectType, crate::discovery::CompiledNet)> = per_type
        .iter()
        .enumerate()
        .map(|(i, activities)| {
            let mut sorted = activities.clone();
            sorted.sort();
            let tree = if sequences_only {
                sequence_tree(&sorted, rng)
            } else {
                sample_tree(&sorted, &params.weights, rng)
            };
            let ty = type_name(i);
            let compiled = crate::discovery::compile_tree(&tree, &ty, &format!("{ty}::"));
            (ty, compiled)
        })
        .collect();
    let model = crate::discovery::assemble_accepting(&parts, |_, _| false).ok()?;

    let language = language(&model, limits).ok()?;
    if language.is_empty() {
        return None;
    }
    let profile = complexity_profile(&model, limits).ok()?;
    Some(SystemModel {
        id: model_id(&model),
        seed: params.seed,
        params: *params,
        model,
        profile,
        language_size: language.len(),
    })
}

/// Generates one system model. Candidates are resampled until their exact
/// language is non-empty and fits the state budget; if that keeps failing
/// the sampler falls back to unshared and finally to purely sequential
/// trees, whose languages stay small.
///
/// Deterministic: the same parameters (including the seed) produce the
/// same model.
pub fn generate_model(params: &GenParams, limits: &EnumerationLimits) -> SystemModel {
    assert!(
        params.visible_activities >= params.num_types.max(1),
        "need at least one activity per object type"
    );
    assert!(params.num_types >= 1, "need at least one object type");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..48 {
        if let Some(model) = try_sample(params, params.sharing_prob, false, &mut rng, limits) {
            return model;
        }
    }
    for _ in 0..16 {
        if let Some(model) = try_sample(params, 0.0, false, &mut rng, limits) {
            return model;
        }
    }
    try_sample(params, 0.0, true, &mut rng, limits)
        .expect("sequence-only fallback stays within any reasonable state budget")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub count: usize,
    /// Visible activities sampled uniformly from this range per model.
    pub activities: RangeInclusive<usize>,
    /// Sharing probability sampled uniformly from this range per model.
    pub sharing: RangeInclusive<f64>,
    pub num_types: usize,
    pub weights: OperatorWeights,
    pub seed: u64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            count: 100,
            activities: 6..=8,
            sharing: 0.0..=1.0,
            num_types: 2,
            weights: OperatorWeights::default(),
            seed: 0,
        }
    }
}

/// Distribution summary of a corpus: counts on a 10x10 grid over
/// (inter, intra), both axes split into tenths of [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub count: usize,
    pub histogram: Vec<Vec<usize>>,
}

fn histogram_bin(value: f64) -> usize {
    ((value * 10.0).floor() as usize).min(9)
}

/// Generates a corpus; model `i` derives its own RNG stream from
/// `(seed, i)`, so generation parallelizes without changing results.
pub fn generate_corpus(
    params: &CorpusParams,
    limits: &EnumerationLimits,
) -> (Vec<SystemModel>, CorpusSummary) {
    let models: Vec<SystemModel> = (0..params.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, i as u64));
            let visible = rng.gen_range(*params.activities.start()..=*params.activities.end());
            let (sharing_lo, sharing_hi) = (*params.sharing.start(), *params.sharing.end());
            let sharing = if sharing_hi > sharing_lo {
                rng.gen_range(sharing_lo..=sharing_hi)
            } else {
                sharing_lo
            };
            let gen_params = GenParams {
                visible_activities: visible,
                num_types: params.num_types,
                sharing_prob: sharing,
                weights: params.weights,
                seed: rng.gen(),
            };
            generate_model(&gen_params, limits)
        })
        .collect();

    let mut histogram = vec![vec![0usize; 10]; 10];
    for model in &models {
        histogram[histogram_bin(model.profile.inter)][histogram_bin(model.profile.intra)] += 1;
    }
    let summary = CorpusSummary {
        count: models.len(),
        histogram,
    };
    (models, summary)
}

/// One manifest line per model: corpus files pair this with the net JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub seed: u64,
    pub params: GenParams,
    pub numt: usize,
    pub inter: f64,
    pub intra: f64,
    pub language_size: usize,
}

impl ManifestEntry {
    pub fn from_model(model: &SystemModel) -> Self {
        Self {
            id: model.id.clone(),
            seed: model.seed,
            params: model.params,
            numt: model.profile.numt,
            inter: model.profile.inter,
            intra: model.profile.intra,
            language_size: model.language_size,
        }
    }
}

/// Rebuilds a [`SystemModel`] from a manifest entry and its net.
pub fn model_from_manifest(entry: &ManifestEntry, model: AcceptingOcpn) -> Result<SystemModel> {
    Ok(SystemModel {
        id: entry.id.clone(),
        seed: entry.seed,
        params: entry.params,
        profile: ComplexityProfile {
            numt: entry.numt,
            numot: model.net().object_types().len(),
            inter: entry.inter,
            intra: entry.intra,
        },
        language_size: entry.language_size,
        model,
    })
}
