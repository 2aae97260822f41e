//! Scenario parameter resolution. Precedence, lowest to highest: the
//! COUNTCHAIN_SEED environment variable (seed only), a key=value config
//! file, explicit command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use countchain::{ScenarioSpec, SimDuration};

use crate::CliError;

/// Scenario parameters shared by `simulate`, `sweep`, and `sybil`.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Master RNG seed [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Total registered nodes [default: 100]
    #[arg(long)]
    pub nodes: Option<u32>,
    /// Committee size per proposition [default: 14]
    #[arg(long)]
    pub verifiers: Option<u32>,
    /// Per-action honesty probability of uncorrupted nodes [default: 0.85]
    #[arg(long)]
    pub honesty: Option<f64>,
    /// Fraction of nodes that never submit and always vote False [default: 0]
    #[arg(long = "corrupted-frac")]
    pub corrupted_frac: Option<f64>,
    /// Number of broadcast events [default: 1000]
    #[arg(long)]
    pub events: Option<u32>,
    /// Events per simulated second [default: 10]
    #[arg(long)]
    pub rate: Option<f64>,
    /// Stake escrowed per submission and per vote [default: 1]
    #[arg(long)]
    pub price: Option<u64>,
    /// Voting deadline in seconds after submission [default: 2]
    #[arg(long)]
    pub deadline: Option<f64>,
    /// Verification window half-width in seconds [default: 1]
    #[arg(long)]
    pub delay: Option<f64>,
    /// Ban when points fall to this value or below [default: -5]
    #[arg(long)]
    pub threshold: Option<i64>,
    /// Stake deposited per player at registration [default: 1000]
    #[arg(long)]
    pub stake: Option<u64>,
    /// key=value file (# comments) supplying defaults for the flags above
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

const KNOWN_KEYS: [&str; 12] = [
    "seed",
    "nodes",
    "verifiers",
    "honesty",
    "corrupted-frac",
    "events",
    "rate",
    "price",
    "deadline",
    "delay",
    "threshold",
    "stake",
];

/// Parsed config file contents.
#[derive(Debug, Default)]
struct FileValues {
    path: String,
    entries: BTreeMap<String, String>,
}

impl FileValues {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Domain(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Domain(format!(
                    "{} line {}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Domain(format!(
                    "{} line {}: unknown key '{key}'",
                    path.display(),
                    lineno + 1
                )));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileValues {
            path: path.display().to_string(),
            entries,
        })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                CliError::Domain(format!("{}: {key}={raw} is invalid: {e}", self.path))
            }),
        }
    }
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var("COUNTCHAIN_SEED") {
        Ok(raw) => raw.parse().map(Some).map_err(|_| {
            CliError::Domain(format!("COUNTCHAIN_SEED '{raw}' is not a valid seed"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Domain(format!("COUNTCHAIN_SEED: {e}"))),
    }
}

/// Merges flags, the optional config file, and the environment into a
/// runnable scenario. Precedence: flags, then file keys, then defaults;
/// the seed alone also consults COUNTCHAIN_SEED before its default.
pub fn resolve(args: &ScenarioArgs) -> Result<ScenarioSpec, CliError> {
    let file = match &args.config {
        Some(path) => FileValues::load(path)?,
        None => FileValues::default(),
    };
    let seed = match args.seed.or(file.get("seed")?) {
        Some(seed) => seed,
        None => seed_from_env()?.unwrap_or(42),
    };
    let nodes = args.nodes.or(file.get("nodes")?).unwrap_or(100);
    let verifiers = args.verifiers.or(file.get("verifiers")?).unwrap_or(14);
    let honesty = args.honesty.or(file.get("honesty")?).unwrap_or(0.85);
    let corrupted = args
        .corrupted_frac
        .or(file.get("corrupted-frac")?)
        .unwrap_or(0.0);
    let events = args.events.or(file.get("events")?).unwrap_or(1000);
    let rate = args.rate.or(file.get("rate")?).unwrap_or(10.0);
    let price = args.price.or(file.get("price")?).unwrap_or(1);
    let deadline = args.deadline.or(file.get("deadline")?).unwrap_or(2.0);
    let delay = args.delay.or(file.get("delay")?).unwrap_or(1.0);
    let threshold = args.threshold.or(file.get("threshold")?).unwrap_or(-5);
    let stake = args.stake.or(file.get("stake")?).unwrap_or(1000);

    if !(deadline > 0.0 && deadline.is_finite()) {
        return Err(CliError::Domain(format!(
            "deadline must be a positive number of seconds, got {deadline}"
        )));
    }
    if !(delay >= 0.0 && delay.is_finite()) {
        return Err(CliError::Domain(format!(
            "delay must be a non-negative number of seconds, got {delay}"
        )));
    }

    ScenarioSpec::builder(nodes, verifiers)
        .honesty_rate(honesty)
        .corrupted_fraction(corrupted)
        .num_events(events)
        .event_rate(rate)
        .seed(seed)
        .proposition_price(price)
        .proposition_deadline(SimDuration::from_secs_f64(deadline))
        .window_half_width(SimDuration::from_secs_f64(delay))
        .ban_threshold(threshold)
        .initial_player_stake(stake)
        .build()
        .map_err(|e| CliError::Domain(e.to_string()))
}
