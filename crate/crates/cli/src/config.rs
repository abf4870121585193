//! Run configuration: `key = value` files merged under command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use besselkit_core::audit::BudgetOverride;
use besselkit_core::{QuadSpec, SignatureSplit, WeightVector};
use serde::Serialize;

use crate::CliError;

/// Keys a config file may set.
const KNOWN_KEYS: [&str; 13] =
    ["n", "v", "p", "q", "k", "nodes", "radius", "eps_schedule", "suite", "out", "grid", "kernel", "field"];

/// Flags shared by every subcommand, all optional so a file can supply them.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Number of coordinates
    #[arg(long)]
    pub n: Option<usize>,
    /// Bessel weights, comma separated; a single value is repeated n times
    #[arg(long)]
    pub v: Option<String>,
    /// Number of positive signs in the quadratic form
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of negative signs in the quadratic form
    #[arg(long)]
    pub q: Option<usize>,
    /// Operator order
    #[arg(long)]
    pub k: Option<usize>,
    /// Gauss nodes per axis and per panel
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Truncation radius of the half-line integrals
    #[arg(long)]
    pub radius: Option<f64>,
    /// Abel damping exponents, comma separated and decreasing
    #[arg(long = "eps-schedule")]
    pub eps_schedule: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("invalid value for {key}: `{s}`")))
}

pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|part| parse_num(key, part)).collect()
}

/// Flags and file values after precedence has been applied.
#[derive(Debug, Clone)]
pub struct Merged {
    file: BTreeMap<String, String>,
    pub args: CommonArgs,
}

impl Merged {
    pub fn new(args: CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        Ok(Self { file, args })
    }

    /// A string setting not covered by [`CommonArgs`], flag first.
    pub fn text(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string).or_else(|| self.file.get(key).cloned())
    }

    fn num<T: std::str::FromStr + Copy>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        match flag {
            Some(x) => Ok(Some(x)),
            None => self.file.get(key).map(|s| parse_num(key, s)).transpose(),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.args.out.clone().or_else(|| self.file.get("out").map(PathBuf::from))
    }

    /// Resolve dimension, weights, split and order; fails before any numerics.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let n_flag = self.num("n", self.args.n)?;
        let v_list = self.text("v", self.args.v.as_deref()).map(|s| parse_list("v", &s)).transpose()?;
        let p = self.num("p", self.args.p)?;
        let q = self.num("q", self.args.q)?;
        let k = self.num("k", self.args.k)?.unwrap_or(1);
        let n = n_flag
            .or_else(|| v_list.as_ref().filter(|l| l.len() > 1).map(Vec::len))
            .or_else(|| p.map(|p| p + q.unwrap_or(0)))
            .unwrap_or(1);
        if n == 0 {
            return Err(CliError::Usage("n must be >= 1".into()));
        }
        let weights = match v_list {
            None => vec![0.5; n],
            Some(l) if l.len() == 1 => vec![l[0]; n],
            Some(l) if l.len() == n => l,
            Some(l) => return Err(CliError::Usage(format!("--v has {} entries but n = {n}", l.len()))),
        };
        let p = p.unwrap_or_else(|| n - q.unwrap_or(0).min(n));
        let q = q.unwrap_or(n.saturating_sub(p));
        if p + q != n {
            return Err(CliError::Usage(format!("p + q = {} does not equal n = {n}", p + q)));
        }
        let v = WeightVector::new(weights)?;
        let split = SignatureSplit::new(p, q)?;
        if k == 0 {
            return Err(CliError::Usage("k must be >= 1".into()));
        }
        Ok(Problem { n, v, split, k })
    }

    pub fn budget(&self) -> Result<BudgetOverride, CliError> {
        let schedule = self
            .text("eps_schedule", self.args.eps_schedule.as_deref())
            .map(|s| parse_list("eps-schedule", &s))
            .transpose()?;
        let budget = BudgetOverride {
            nodes: self.num("nodes", self.args.nodes)?,
            radius: self.num("radius", self.args.radius)?,
            schedule,
        };
        budget.apply(QuadSpec::default()).validate()?;
        Ok(budget)
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub n: usize,
    pub v: WeightVector,
    pub split: SignatureSplit,
    pub k: usize,
}

/// What the audit JSON echoes back.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub v: Vec<f64>,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub nodes: Option<usize>,
    pub radius: Option<f64>,
    pub eps_schedule: Option<Vec<f64>>,
    pub suites: Vec<String>,
}

impl ConfigEcho {
    pub fn new(problem: &Problem, budget: &BudgetOverride, suites: &[String]) -> Self {
        Self {
            n: problem.n,
            v: problem.v.values().to_vec(),
            p: problem.split.p,
            q: problem.split.q,
            k: problem.k,
            nodes: budget.nodes,
            radius: budget.radius,
            eps_schedule: budget.schedule.clone(),
            suites: suites.to_vec(),
        }
    }
}
