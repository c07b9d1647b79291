//! The evaluation pipeline: sample a system model's language, materialize
//! an event log, discover models from the object-centric and the flattened
//! log, score both against the system model, and aggregate results into
//! quadrant summaries and CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discovery::discover;
use crate::error::{Error, Result};
use crate::metrics::{quality_from_languages, Language};
use crate::modelgen::{mix_seed, SystemModel};
use crate::ocel::{flatten, Activity, Event, ObjectInstance, Ocel};
use crate::ocpn::{language, language_with_witnesses, AcceptingOcpn, Binding, EnumerationLimits};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    /// Sampling rates, each in (0, 1].
    pub rates: Vec<f64>,
    /// Replications per (model, rate).
    pub replications: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    ObjectCentric,
    Flattened,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::ObjectCentric, Method::Flattened];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ObjectCentric => "object-centric",
            Method::Flattened => "flattened",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluation result row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub model_id: String,
    pub numt: usize,
    pub numot: usize,
    pub inter: f64,
    pub intra: f64,
    pub sample_rate: f64,
    pub replication: u32,
    pub method: Method,
    pub fitness: f64,
    pub precision: f64,
    pub lang_sys: usize,
    pub lang_disc: usize,
    pub runtime_ms: u64,
}

/// A run that could not produce a record, with the reason preserved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRun {
    pub model_id: String,
    pub sample_rate: f64,
    pub replication: u32,
    pub method: Option<Method>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Record(ExperimentRecord),
    Skipped(SkippedRun),
}

/// Uniformly samples, without replacement, `ceil(rate * |language|)`
/// distinct visible sequences, each with its witnessing binding sequence.
/// A rate of 1 returns the full language without consuming randomness.
pub fn sample_language(
    model: &AcceptingOcpn,
    rate: f64,
    rng: &mut ChaCha8Rng,
    limits: &EnumerationLimits,
) -> Result<Vec<(Vec<Activity>, Vec<Binding>)>> {
    let witnessed = language_with_witnesses(model, limits)?;
    sample_from_witnesses(&witnessed, rate, rng)
}

fn sample_from_witnesses(
    witnessed: &BTreeMap<Vec<Activity>, Vec<Binding>>,
    rate: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Vec<Activity>, Vec<Binding>)>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    if witnessed.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let entries: Vec<(&Vec<Activity>, &Vec<Binding>)> = witnessed.iter().collect();
    let wanted = ((rate * entries.len() as f64).ceil() as usize).min(entries.len());
    let chosen: Vec<usize> = if wanted == entries.len() {
        (0..entries.len()).collect()
    } else {
        let mut indices = rand::seq::index::sample(rng, entries.len(), wanted).into_vec();
        indices.sort_unstable();
        indices
    };
    Ok(chosen
        .into_iter()
        .map(|i| (entries[i].0.clone(), entries[i].1.clone()))
        .collect())
}

/// Materializes sampled binding sequences as an event log: one process
/// execution per sequence with fresh objects (one per type), one event per
/// visible binding carrying the bound objects, and integer timestamps equal
/// to the binding's position in its sequence.
pub fn gen_log(samples: &[(Vec<Activity>, Vec<Binding>)], model: &AcceptingOcpn) -> Ocel {
    let net = model.net();
    let mut events = Vec::new();
    let mut objects: BTreeMap<String, ObjectInstance> = BTreeMap::new();
    let mut traces: BTreeMap<String, Vec<String>> = BTreeMap::new();

    for (execution, (_, witness)) in samples.iter().enumerate() {
        let mut local_names: BTreeMap<(String, String), String> = BTreeMap::new();
        for (position, binding) in witness.iter().enumerate() {
            let Some(label) = net.label(&binding.transition) else {
                continue;
            };
            let event_id = format!("e{execution}:{position}");
            let mut linked = Vec::new();
            for (object_type, bound) in &binding.assignment {
                for original in bound {
                    let fresh = local_names
                        .entry((object_type.clone(), original.clone()))
                        .or_insert_with(|| {
                            let nth = objects
                                .values()
                                .filter(|o| {
                                    o.object_type == *object_type
                                        && o.id.starts_with(&format!("c{execution}:"))
                                })
                                .count();
                            if nth == 0 {
                                format!("c{execution}:{object_type}")
                            } else {
                                format!("c{execution}:{object_type}~{nth}")
                            }
                        })
                        .clone();
                    objects
                        .entry(fresh.clone())
                        .or_insert_with(|| ObjectInstance {
                            id: fresh.clone(),
                            object_type: object_type.clone(),
                        });
                    linked.push(fresh);
                }
            }
            events.push(Event {
                id: event_id.clone(),
                activity: label.clone(),
                timestamp: position as i64,
            });
            for object in linked {
                traces.entry(object).or_default().push(event_id.clone());
            }
        }
    }

    Ocel::new(events, objects.into_values().collect(), traces)
        .expect("materialized logs are valid by construction")
}

/// Runs the full pipeline for one system model: per (rate, replication),
/// sample, materialize, discover from the object-centric and the flattened
/// log, and score both. State-space overflows become skipped runs.
pub fn run_experiment(
    system: &SystemModel,
    config: &SampleConfig,
    limits: &EnumerationLimits,
    record_timings: bool,
) -> Vec<Outcome> {
    let mut outcomes = Vec::new();
    let witnessed = match language_with_witnesses(&system.model, limits) {
        Ok(witnessed) => witnessed,
        Err(err) => {
            for rate in &config.rates {
                for replication in 0..config.replications {
                    outcomes.push(Outcome::Skipped(SkippedRun {
                        model_id: system.id.clone(),
                        sample_rate: *rate,
                        replication,
                        method: None,
                        reason: format!("system language enumeration failed: {err}"),
                    }));
                }
            }
            return outcomes;
        }
    };
    let system_language: Language = witnessed.keys().cloned().collect();

    for (rate_index, rate) in config.rates.iter().enumerate() {
        for replication in 0..config.replications {
            let task_seed = mix_seed(
                mix_seed(config.seed, system.seed),
                mix_seed(rate_index as u64 + 1, replication as u64),
            );
            let mut rng = ChaCha8Rng::seed_from_u64(task_seed);
            let samples = match sample_from_witnesses(&witnessed, *rate, &mut rng) {
                Ok(samples) => samples,
                Err(err) => {
                    for method in Method::ALL {
                        outcomes.push(Outcome::Skipped(SkippedRun {
                            model_id: system.id.clone(),
                            sample_rate: *rate,
                            replication,
                            method: Some(method),
                            reason: format!("sampling failed: {err}"),
                        }));
                    }
                    continue;
                }
            };
            let log = gen_log(&samples, &system.model);

            for method in Method::ALL {
                let started = Instant::now();
                let scored = (|| -> Result<(f64, f64, usize)> {
                    let input = match method {
                        Method::ObjectCentric => log.clone(),
                        Method::Flattened => flatten(&log),
                    };
                    let discovered = discover(&input)?;
                    let discovered_language = language(&discovered, limits)?;
                    let score = quality_from_languages(&system_language, &discovered_language)?;
                    Ok((score.fitness, score.precision, discovered_language.len()))
                })();
                match scored {
                    Ok((fitness, precision, lang_disc)) => {
                        let runtime_ms = if record_timings {
                            started.elapsed().as_millis() as u64
                        } else {
                            0
                        };
                        outcomes.push(Outcome::Record(ExperimentRecord {
                            model_id: system.id.clone(),
                            numt: system.profile.numt,
                            numot: system.profile.numot,
                            inter: system.profile.inter,
                            intra: system.profile.intra,
                            sample_rate: *rate,
                            replication,
                            method,
                            fitness,
                            precision,
                            lang_sys: system_language.len(),
                            lang_disc,
                            runtime_ms,
                        }));
                    }
                    Err(err) => outcomes.push(Outcome::Skipped(SkippedRun {
                        model_id: system.id.clone(),
                        sample_rate: *rate,
                        replication,
                        method: Some(method),
                        reason: err.to_string(),
                    })),
                }
            }
        }
    }
    outcomes
}

/// Process taxonomy quadrants: inter-object complexity above 0.2 counts as
/// high, intra-object complexity below 0.15 as low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    LowInterLowIntra,
    LowInterHighIntra,
    HighInterLowIntra,
    HighInterHighIntra,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::LowInterLowIntra,
        Quadrant::LowInterHighIntra,
        Quadrant::HighInterLowIntra,
        Quadrant::HighInterHighIntra,
    ];

    pub fn of(inter: f64, intra: f64) -> Self {
        let high_inter = inter > 0.2;
        let low_intra = intra < 0.15;
        match (high_inter, low_intra) {
            (false, true) => Quadrant::LowInterLowIntra,
            (false, false) => Quadrant::LowInterHighIntra,
            (true, true) => Quadrant::HighInterLowIntra,
            (true, false) => Quadrant::HighInterHighIntra,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Quadrant::LowInterLowIntra => "low_inter_low_intra",
            Quadrant::LowInterHighIntra => "low_inter_high_intra",
            Quadrant::HighInterLowIntra => "high_inter_low_intra",
            Quadrant::HighInterHighIntra => "high_inter_high_intra",
        }
    }
}

/// Mean fitness/precision for one (quadrant, rate, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantCell {
    pub quadrant: Quadrant,
    pub rate: f64,
    pub method: Method,
    pub mean_fitness: f64,
    pub mean_precision: f64,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantSummary {
    pub rates: Vec<f64>,
    pub cells: Vec<QuadrantCell>,
}

impl QuadrantSummary {
    pub fn cell(&self, quadrant: Quadrant, rate: f64, method: Method) -> Option<&QuadrantCell> {
        self.cells
            .iter()
            .find(|c| c.quadrant == quadrant && c.rate == rate && c.method == method)
    }
}

/// Averages records into the four (inter, intra) quadrants per rate and
/// method. Every record lands in exactly one quadrant.
pub fn bin_records(records: &[ExperimentRecord]) -> QuadrantSummary {
    let mut rates: Vec<f64> = records.iter().map(|r| r.sample_rate).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();

    let mut sums: BTreeMap<(Quadrant, usize, Method), (f64, f64, usize)> = BTreeMap::new();
    for record in records {
        let rate_index = rates
            .iter()
            .position(|r| *r == record.sample_rate)
            .expect("rate collected above");
        let quadrant = Quadrant::of(record.inter, record.intra);
        let cell = sums
            .entry((quadrant, rate_index, record.method))
            .or_insert((0.0, 0.0, 0));
        cell.0 += record.fitness;
        cell.1 += record.precision;
        cell.2 += 1;
    }
    let cells = sums
        .into_iter()
        .map(
            |((quadrant, rate_index, method), (fit, prec, n))| QuadrantCell {
                quadrant,
                rate: rates[rate_index],
                method,
                mean_fitness: fit / n as f64,
                mean_precision: prec / n as f64,
                records: n,
            },
        )
        .collect();
    QuadrantSummary { rates, cells }
}

pub const CSV_HEADER: &str =
    "model_id,numt,numot,inter,intra,sample_rate,replication,method,fitness,precision,lang_sys,lang_disc,runtime_ms";

/// Renders records as CSV (UTF-8, LF line endings, header included).
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model_id,
            r.numt,
            r.numot,
            r.inter,
            r.intra,
            r.sample_rate,
            r.replication,
            r.method,
            r.fitness,
            r.precision,
            r.lang_sys,
            r.lang_disc,
            r.runtime_ms
        )
        .expect("writing to a string cannot fail");
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CampaignOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Record wall-clock runtimes. Off by default so reruns with equal
    /// seeds emit byte-identical CSV.
    pub record_timings: bool,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub records: Vec<ExperimentRecord>,
    pub skipped: Vec<SkippedRun>,
    pub summary: QuadrantSummary,
    pub csv: String,
}

impl CampaignResult {
    /// Per-quadrant mean curves over the sample rates, plus skipped runs.
    pub fn summary_json(&self) -> serde_json::Value {
        let mut quadrants = serde_json::Map::new();
        for quadrant in Quadrant::ALL {
            let mut methods = serde_json::Map::new();
            for method in Method::ALL {
                let fitness: Vec<serde_json::Value> = self
                    .summary
                    .rates
                    .iter()
                    .map(|rate| {
                        self.summary
                            .cell(quadrant, *rate, method)
                            .map(|c| serde_json::json!(c.mean_fitness))
                            .unwrap_or(serde_json::Value::Null)
                    })
                    .collect();
                let precision: Vec<serde_json::Value> = self
                    .summary
                    .rates
                    .iter()
                    .map(|rate| {
                        self.summary
                            .cell(quadrant, *rate, method)
                            .map(|c| serde_json::json!(c.mean_precision))
                            .unwrap_or(serde_json::Value::Null)
                    })
                    .collect();
                methods.insert(
                    method.as_str().replace('-', "_"),
                    serde_json::json!({ "fitness": fitness, "precision": precision }),
                );
            }
            let records: usize = self
                .summary
                .cells
                .iter()
                .filter(|c| c.quadrant == quadrant)
                .map(|c| c.records)
                .sum();
            let mut entry = serde_json::Map::new();
            entry.insert("records".into(), serde_json::json!(records));
            entry.extend(methods);
            quadrants.insert(
                quadrant.label().to_string(),
                serde_json::Value::Object(entry),
            );
        }
        serde_json::json!({
            "rates": self.summary.rates,
            "quadrants": quadrants,
            "skipped": self.skipped,
        })
    }
}

/// Runs the experiment over a corpus. Tasks are distributed per model;
/// results are ordered deterministically before aggregation, so equal
/// seeds produce byte-identical CSV output.
pub fn run_campaign(
    corpus: &[SystemModel],
    config: &SampleConfig,
    limits: &EnumerationLimits,
    options: &CampaignOptions,
) -> Result<CampaignResult> {
    let run_all = || -> Vec<Vec<Outcome>> {
        corpus
            .par_iter()
            .map(|model| run_experiment(model, config, limits, options.record_timings))
            .collect()
    };
    let outcomes: Vec<Vec<Outcome>> = match options.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?
            .install(run_all),
        None => run_all(),
    };

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Outcome::Record(record) => records.push(record),
            Outcome::Skipped(skip) => skipped.push(skip),
        }
    }
    records.sort_by(|a, b| {
        a.model_id
            .cmp(&b.model_id)
            .then(a.sample_rate.total_cmp(&b.sample_rate))
            .then(a.replication.cmp(&b.replication))
            .then(a.method.cmp(&b.method))
    });
    skipped.sort_by(|a, b| {
        a.model_id
            .cmp(&b.model_id)
            .then(a.sample_rate.total_cmp(&b.sample_rate))
            .then(a.replication.cmp(&b.replication))
    });
    let summary = bin_records(&records);
    let csv = records_to_csv(&records);
    Ok(CampaignResult {
        records,
        skipped,
        summary,
        csv,
    })
}
