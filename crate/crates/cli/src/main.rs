//! `ocpd`: generate system models, sample event logs from their languages,
//! discover object-centric or flattened process models, and run the full
//! discovery-quality campaign.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use ocpd_core::discovery::discover;
use ocpd_core::experiment::{
    gen_log, run_campaign, sample_language, CampaignOptions, SampleConfig,
};
use ocpd_core::metrics::{complexity_profile, quality};
use ocpd_core::modelgen::{
    generate_corpus, model_from_manifest, CorpusParams, ManifestEntry, OperatorWeights, SystemModel,
};
use ocpd_core::ocel::{flatten, parse_ocel, serialize_ocel};
use ocpd_core::ocpn::{language, parse_net, serialize_net, to_dot, EnumerationLimits};

#[derive(Parser)]
#[command(
    name = "ocpd",
    about = "Object-centric process discovery toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of random loop-free system models.
    Generate {
        #[arg(long)]
        count: usize,
        /// Visible activities per model, as an inclusive range like 6..8.
        #[arg(long, default_value = "6..8")]
        activities: String,
        /// Sharing probability range, like 0..1 or 0.2..0.6.
        #[arg(long, default_value = "0..1")]
        sharing: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for corpus.jsonl, summary.json, and net files.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        types: usize,
        /// Operator weights sequence,xor,parallel.
        #[arg(long, default_value = "0.6,0.2,0.2")]
        weights: String,
    },
    /// Sample an event log from a model's language.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discover a model from an event log.
    Discover {
        #[arg(long)]
        log: PathBuf,
        /// Flatten the log before discovery.
        #[arg(long)]
        flatten: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also write a DOT rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print complexity metrics and the language size of a model.
    Metrics {
        #[arg(long)]
        model: PathBuf,
    },
    /// Score a discovered model against a system model.
    Quality {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        discovered: PathBuf,
    },
    /// Run the sampling/discovery/quality campaign over a corpus.
    Campaign {
        /// Corpus directory produced by `generate`.
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated sampling rates.
        #[arg(long, default_value = "0.05,0.1,0.25,0.5,1.0")]
        rates: String,
        #[arg(long, default_value_t = 3)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path; a summary JSON lands next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Record wall-clock runtimes (makes the CSV non-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

/// The marking-graph budget, overridable through OCPD_STATE_BUDGET.
fn limits_from_env() -> Result<EnumerationLimits> {
    let mut limits = EnumerationLimits::default();
    if let Ok(value) = std::env::var("OCPD_STATE_BUDGET") {
        limits.max_marking_visits = value
            .parse()
            .with_context(|| format!("OCPD_STATE_BUDGET must be an integer, got `{value}`"))?;
    }
    Ok(limits)
}

fn parse_usize_range(text: &str) -> Result<(usize, usize)> {
    let (lo, hi) = text
        .split_once("..")
        .with_context(|| format!("expected a range like 6..8, got `{text}`"))?;
    let lo: usize = lo.trim().parse().context("range start")?;
    let hi: usize = hi.trim().parse().context("range end")?;
    if lo > hi {
        bail!("empty range `{text}`");
    }
    Ok((lo, hi))
}

fn parse_f64_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once("..")
        .with_context(|| format!("expected a range like 0..1, got `{text}`"))?;
    let lo: f64 = lo.trim().parse().context("range start")?;
    let hi: f64 = hi.trim().parse().context("range end")?;
    if lo > hi {
        bail!("empty range `{text}`");
    }
    Ok((lo, hi))
}

fn parse_weights(text: &str) -> Result<OperatorWeights> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        bail!("expected weights as sequence,xor,parallel, got `{text}`");
    }
    Ok(OperatorWeights {
        sequence: parts[0].trim().parse().context("sequence weight")?,
        xor: parts[1].trim().parse().context("xor weight")?,
        parallel: parts[2].trim().parse().context("parallel weight")?,
    })
}

fn parse_rates(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .with_context(|| format!("bad rate `{r}`"))
        })
        .collect()
}

fn load_model(path: &Path) -> Result<ocpd_core::ocpn::AcceptingOcpn> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_net(&bytes).with_context(|| format!("parsing net {}", path.display()))
}

fn load_corpus(dir: &Path) -> Result<Vec<SystemModel>> {
    let manifest_path = dir.join("corpus.jsonl");
    let manifest = fs::read_to_string(&manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let mut models = Vec::new();
    for (line_no, line) in manifest.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(line).with_context(|| format!("manifest line {}", line_no + 1))?;
        let net_path = dir.join(format!("{}.net.json", entry.id));
        let model = load_model(&net_path)?;
        models.push(model_from_manifest(&entry, model)?);
    }
    if models.is_empty() {
        bail!("corpus at {} is empty", dir.display());
    }
    Ok(models)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let limits = limits_from_env()?;

    match cli.command {
        Command::Generate {
            count,
            activities,
            sharing,
            seed,
            out,
            types,
            weights,
        } => {
            let (act_lo, act_hi) = parse_usize_range(&activities)?;
            let (share_lo, share_hi) = parse_f64_range(&sharing)?;
            let params = CorpusParams {
                count,
                activities: act_lo..=act_hi,
                sharing: share_lo..=share_hi,
                num_types: types,
                weights: parse_weights(&weights)?,
                seed,
            };
            let (models, summary) = generate_corpus(&params, &limits);
            fs::create_dir_all(&out)?;
            let mut manifest = String::new();
            for model in &models {
                let entry = ManifestEntry::from_model(model);
                manifest.push_str(&serde_json::to_string(&entry)?);
                manifest.push('\n');
                fs::write(
                    out.join(format!("{}.net.json", model.id)),
                    serialize_net(&model.model),
                )?;
            }
            fs::write(out.join("corpus.jsonl"), manifest)?;
            fs::write(
                out.join("summary.json"),
                serde_json::to_string_pretty(&summary)? + "\n",
            )?;
            println!("generated {} models into {}", models.len(), out.display());
        }
        Command::Sample {
            model,
            rate,
            seed,
            out,
        } => {
            let model = load_model(&model)?;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let samples = sample_language(&model, rate, &mut rng, &limits)?;
            let log = gen_log(&samples, &model);
            fs::write(&out, serialize_ocel(&log))?;
            println!(
                "sampled {} of {} sequences into {}",
                samples.len(),
                language(&model, &limits)?.len(),
                out.display()
            );
        }
        Command::Discover {
            log,
            flatten: flatten_first,
            out,
            dot,
        } => {
            let bytes = fs::read(&log).with_context(|| format!("reading {}", log.display()))?;
            let parsed = parse_ocel(&bytes)?;
            let input = if flatten_first {
                flatten(&parsed)
            } else {
                parsed
            };
            let model = discover(&input)?;
            fs::write(&out, serialize_net(&model))?;
            if let Some(dot_path) = dot {
                fs::write(&dot_path, to_dot(&model))?;
            }
            println!("discovered net written to {}", out.display());
        }
        Command::Metrics { model } => {
            let model = load_model(&model)?;
            let profile = complexity_profile(&model, &limits)?;
            let language_size = language(&model, &limits)?.len();
            println!("numt: {}", profile.numt);
            println!("numot: {}", profile.numot);
            println!("inter: {}", profile.inter);
            println!("intra: {}", profile.intra);
            println!("language_size: {language_size}");
        }
        Command::Quality { system, discovered } => {
            let system = load_model(&system)?;
            let discovered = load_model(&discovered)?;
            let score = quality(&system, &discovered, &limits)?;
            println!("fitness: {}", score.fitness);
            println!("precision: {}", score.precision);
        }
        Command::Campaign {
            corpus,
            rates,
            reps,
            seed,
            out,
            workers,
            timings,
        } => {
            let corpus = load_corpus(&corpus)?;
            let config = SampleConfig {
                rates: parse_rates(&rates)?,
                replications: reps,
                seed,
            };
            let options = CampaignOptions {
                workers,
                record_timings: timings,
            };
            let result = run_campaign(&corpus, &config, &limits, &options)?;
            fs::write(&out, &result.csv)?;
            let summary_path = out.with_extension("summary.json");
            fs::write(
                &summary_path,
                serde_json::to_string_pretty(&result.summary_json())? + "\n",
            )?;
            println!(
                "campaign: {} records, {} skipped -> {} and {}",
                result.records.len(),
                result.skipped.len(),
                out.display(),
                summary_path.display()
            );
        }
    }
    Ok(())
}
