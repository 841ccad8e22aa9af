//! Flag parsing, config files and resolution of the effective settings.
//!
//! Values are resolved in three layers: per-command defaults, then the
//! optional `--config` JSON file, then explicit flags. The config file is a
//! flat object whose keys are the long flag names (`"users"`,
//! `"group-size"`, ...). Lists may be JSON arrays or comma-separated strings.
//! A JSON table written by `cf-sim` is also accepted; its
//! `metadata.config` object is used, which reproduces the table exactly.

use std::fs;
use std::path::{Path, PathBuf};

use cf_core::experiments::ExperimentConfig;
use cf_core::search::{Solver, DEFAULT_NODE_BUDGET};
use clap::Args;
use serde_json::{json, Map, Value};

use crate::table::Format;
use crate::CliError;

fn parse_solver(s: &str) -> Result<Solver, String> {
    s.parse::<Solver>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report progress on stderr.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    /// Channel vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Option<Vec<f64>>,
    /// Integer coefficient vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<i64>>,
    #[arg(long)]
    pub power: Option<f64>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Option<Vec<f64>>,
    #[arg(long)]
    pub power: Option<f64>,
    /// exhaustive, candidate or auto.
    #[arg(long, value_parser = parse_solver)]
    pub solver: Option<Solver>,
    /// Node budget for the exhaustive solver.
    #[arg(long)]
    pub budget: Option<u64>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CampaignArgs {
    /// Numbers of users, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub users: Option<Vec<usize>>,
    #[arg(long)]
    pub relays: Option<usize>,
    /// Transmit powers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub power: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Users scheduled per slot.
    #[arg(long)]
    pub group_size: Option<usize>,
    #[arg(long)]
    pub slots: Option<u64>,
    /// exhaustive, candidate or auto.
    #[arg(long, value_parser = parse_solver)]
    pub solver: Option<Solver>,
    /// Values of |a|^2 for the bound curves, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub norm_sq: Option<Vec<u64>>,
    /// Node budget for the exhaustive solver.
    #[arg(long)]
    pub budget: Option<u64>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a config file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub h: Option<Vec<f64>>,
    pub a: Option<Vec<i64>>,
    pub users: Option<Vec<usize>>,
    pub relays: Option<usize>,
    pub power: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub group_size: Option<usize>,
    pub slots: Option<u64>,
    pub solver: Option<Solver>,
    pub norm_sq: Option<Vec<u64>>,
    pub budget: Option<u64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn items(key: &str, v: &Value) -> Result<Vec<Value>, CliError> {
    match v {
        Value::Array(xs) => Ok(xs.clone()),
        Value::String(s) => s
            .split(',')
            .map(|p| {
                let p = p.trim();
                serde_json::from_str::<Value>(p).map_err(|_| usage(format!("config key {key:?}: bad list item {p:?}")))
            })
            .collect(),
        Value::Number(_) => Ok(vec![v.clone()]),
        _ => Err(usage(format!("config key {key:?}: expected a list"))),
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64()
        .ok_or_else(|| usage(format!("config key {key:?}: expected a number, got {v}")))
}

fn as_u64(key: &str, v: &Value) -> Result<u64, CliError> {
    if let Some(x) = v.as_u64() {
        return Ok(x);
    }
    if let Some(s) = v.as_str() {
        if let Ok(x) = s.trim().parse() {
            return Ok(x);
        }
    }
    Err(usage(format!(
        "config key {key:?}: expected a non-negative integer, got {v}"
    )))
}

fn as_i64(key: &str, v: &Value) -> Result<i64, CliError> {
    v.as_i64()
        .ok_or_else(|| usage(format!("config key {key:?}: expected an integer, got {v}")))
}

fn as_usize(key: &str, v: &Value) -> Result<usize, CliError> {
    usize::try_from(as_u64(key, v)?).map_err(|_| usage(format!("config key {key:?}: value too large")))
}

fn list<T>(key: &str, v: &Value, f: fn(&str, &Value) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    items(key, v)?.iter().map(|x| f(key, x)).collect()
}

impl FileConfig {
    pub fn from_json(value: &Value) -> Result<Self, CliError> {
        let obj = value.as_object().ok_or_else(|| usage("config must be a JSON object"))?;
        let obj = match obj.get("metadata") {
            Some(meta) => meta
                .get("config")
                .and_then(Value::as_object)
                .ok_or_else(|| usage("table metadata has no config object"))?,
            None => obj,
        };
        let mut cfg = FileConfig::default();
        for (key, v) in obj {
            let k = key.as_str();
            match k.replace('_', "-").as_str() {
                "h" => cfg.h = Some(list(k, v, as_f64)?),
                "a" => cfg.a = Some(list(k, v, as_i64)?),
                "users" => cfg.users = Some(list(k, v, as_usize)?),
                "relays" => cfg.relays = Some(as_usize(k, v)?),
                "power" => cfg.power = Some(list(k, v, as_f64)?),
                "trials" => cfg.trials = Some(as_u64(k, v)?),
                "seed" => cfg.seed = Some(as_u64(k, v)?),
                "group-size" => cfg.group_size = Some(as_usize(k, v)?),
                "slots" => cfg.slots = Some(as_u64(k, v)?),
                "solver" => {
                    let s = v
                        .as_str()
                        .ok_or_else(|| usage("config key \"solver\": expected a string"))?;
                    cfg.solver = Some(parse_solver(s).map_err(usage)?);
                }
                "norm-sq" => cfg.norm_sq = Some(list(k, v, as_u64)?),
                "budget" => cfg.budget = Some(as_u64(k, v)?),
                _ => return Err(usage(format!("unknown config key {k:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
        Self::from_json(&value)
    }

    fn load_opt(path: Option<&PathBuf>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), |p| Self::load(p))
    }
}

/// Settings for `rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSettings {
    pub h: Vec<f64>,
    pub a: Vec<i64>,
    pub power: f64,
}

impl RateSettings {
    pub fn resolve(args: &RateArgs) -> Result<Self, CliError> {
        let file = FileConfig::load_opt(args.config.as_ref())?;
        let h = args.h.clone().or(file.h).ok_or_else(|| usage("--h is required"))?;
        let a = args.a.clone().or(file.a).ok_or_else(|| usage("--a is required"))?;
        let power = match (args.power, file.power) {
            (Some(p), _) => p,
            (None, Some(ps)) => single_power(&ps)?,
            (None, None) => return Err(usage("--power is required")),
        };
        Ok(RateSettings { h, a, power })
    }

    pub fn echo(&self) -> Value {
        json!({ "h": self.h, "a": self.a, "power": self.power })
    }
}

/// Settings for `search`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSettings {
    pub h: Vec<f64>,
    pub power: f64,
    pub solver: Solver,
    pub budget: u64,
}

impl SearchSettings {
    pub fn resolve(args: &SearchArgs) -> Result<Self, CliError> {
        let file = FileConfig::load_opt(args.config.as_ref())?;
        let h = args.h.clone().or(file.h).ok_or_else(|| usage("--h is required"))?;
        let power = match (args.power, file.power) {
            (Some(p), _) => p,
            (None, Some(ps)) => single_power(&ps)?,
            (None, None) => return Err(usage("--power is required")),
        };
        Ok(SearchSettings {
            h,
            power,
            solver: args.solver.or(file.solver).unwrap_or(Solver::Auto),
            budget: args.budget.or(file.budget).unwrap_or(DEFAULT_NODE_BUDGET),
        })
    }

    pub fn echo(&self) -> Value {
        json!({ "h": self.h, "power": self.power, "solver": self.solver.name(), "budget": self.budget })
    }
}

fn single_power(ps: &[f64]) -> Result<f64, CliError> {
    match ps {
        [p] => Ok(*p),
        _ => Err(usage("expected a single power")),
    }
}

/// Campaigns with their own default grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Campaign {
    ProbUnit,
    SumRate,
    Schedule,
    Bounds,
    Validate,
}

impl Campaign {
    pub fn name(self) -> &'static str {
        match self {
            Campaign::ProbUnit => "prob-unit",
            Campaign::SumRate => "sumrate",
            Campaign::Schedule => "schedule",
            Campaign::Bounds => "bounds",
            Campaign::Validate => "validate",
        }
    }

    pub fn defaults(self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        match self {
            Campaign::ProbUnit => ExperimentConfig {
                users: vec![4, 8, 16, 32],
                powers: vec![10.0],
                trials: 10_000,
                ..base
            },
            Campaign::SumRate => ExperimentConfig {
                users: vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 24, 32, 48, 64],
                relays: 4,
                powers: vec![10.0, 100.0],
                trials: 1000,
                ..base
            },
            Campaign::Schedule => ExperimentConfig {
                users: vec![12, 24, 48, 120],
                relays: 3,
                group_size: 3,
                slots: 10_000,
                powers: vec![10.0],
                ..base
            },
            Campaign::Bounds => ExperimentConfig {
                relays: 4,
                powers: vec![10.0, 100.0],
                trials: 1000,
                ..base
            },
            Campaign::Validate => ExperimentConfig {
                users: vec![4, 16],
                powers: vec![1.0, 10.0, 100.0],
                trials: 10_000,
                ..base
            },
        }
    }
}

/// Layers defaults, the config file and flags into one configuration.
pub fn resolve_campaign(campaign: Campaign, args: &CampaignArgs) -> Result<ExperimentConfig, CliError> {
    let file = FileConfig::load_opt(args.config.as_ref())?;
    if file.h.is_some() || file.a.is_some() {
        return Err(usage(format!(
            "config keys \"h\" and \"a\" do not apply to {}",
            campaign.name()
        )));
    }
    let mut cfg = campaign.defaults();
    macro_rules! layer {
        ($field:ident, $target:ident) => {
            if let Some(v) = args.$field.clone().or(file.$field) {
                cfg.$target = v;
            }
        };
    }
    layer!(users, users);
    layer!(relays, relays);
    layer!(power, powers);
    layer!(trials, trials);
    layer!(seed, seed);
    layer!(group_size, group_size);
    layer!(slots, slots);
    layer!(solver, solver);
    layer!(norm_sq, norm_sq);
    layer!(budget, budget);
    cfg.validate()?;
    Ok(cfg)
}

/// The config echo stored in table metadata. Keys mirror the flag names.
pub fn echo_campaign(cfg: &ExperimentConfig) -> Value {
    let mut m = Map::new();
    m.insert("users".into(), json!(cfg.users));
    m.insert("relays".into(), json!(cfg.relays));
    m.insert("power".into(), json!(cfg.powers));
    m.insert("trials".into(), json!(cfg.trials));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("group-size".into(), json!(cfg.group_size));
    m.insert("slots".into(), json!(cfg.slots));
    m.insert("solver".into(), json!(cfg.solver.name()));
    m.insert("norm-sq".into(), json!(cfg.norm_sq));
    m.insert("budget".into(), json!(cfg.budget));
    Value::Object(m)
}
