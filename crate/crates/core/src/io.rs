//! Configuration files and CSV/manifest output.
//!
//! Config files are flat `key=value` text. Keys are the long CLI flag names
//! without the leading dashes; `#` starts a comment line. Command-line flags
//! override file values.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::scenario::{AggregateResult, Algorithm, RunResult, ScenarioConfig};

/// Factorial axes for `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub virulences: Vec<f64>,
    pub gds: Vec<u32>,
    pub algorithms: Vec<Algorithm>,
}

impl Default for SweepAxes {
    fn default() -> Self {
        Self {
            virulences: vec![0.3, 1.0],
            gds: vec![1, 5, 25],
            algorithms: vec![Algorithm::Genetic, Algorithm::Cultural],
        }
    }
}

/// Everything the command line can configure.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub scenario: ScenarioConfig,
    pub sweep: SweepAxes,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            sweep: SweepAxes::default(),
            out: PathBuf::from("out"),
            jobs: None,
        }
    }
}

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "virulence",
    "gd",
    "algorithm",
    "days",
    "replications",
    "seed",
    "out",
    "jobs",
    "increment",
    "contacts",
    "effect",
    "window",
    "treatments",
    "threshold",
    "society-size",
    "zombie-fraction",
    "human-range",
    "zombie-range",
    "pop-size",
    "tournament",
    "mutation",
    "influence",
    "virulences",
    "gds",
    "algorithms",
];

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items = value
        .split(',')
        .map(|v| num(key, v))
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(items)
}

fn unit(key: &str, value: &str) -> Result<f64> {
    let v: f64 = num(key, value)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(key, format!("{v} is outside [0, 1]")));
    }
    Ok(v)
}

fn at_least_one<T: FromStr + PartialOrd + From<u8>>(key: &str, value: &str) -> Result<T> {
    let v: T = num(key, value)?;
    if v < T::from(1) {
        return Err(invalid(key, "must be at least 1"));
    }
    Ok(v)
}

fn range(key: &str, value: &str) -> Result<(f64, f64)> {
    match *list::<f64>(key, value)?.as_slice() {
        [lo, hi] if 0.0 <= lo && lo <= hi && hi <= 1.0 => Ok((lo, hi)),
        [_, _] => Err(invalid(key, "need 0 <= lo <= hi <= 1")),
        _ => Err(invalid(key, "expected `lo,hi`")),
    }
}

fn algorithm(key: &str, value: &str) -> Result<Algorithm> {
    value.parse().map_err(|e: String| invalid(key, e))
}

impl Settings {
    /// Applies one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.scenario;
        match key {
            "virulence" => s.epidemic.virulence = unit(key, value)?,
            "gd" => s.gd = at_least_one(key, value)?,
            "algorithm" => s.algorithm = algorithm(key, value)?,
            "days" => s.horizon = at_least_one(key, value)?,
            "replications" => s.replications = at_least_one(key, value)?,
            "seed" => s.base_seed = num(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "jobs" => self.jobs = Some(at_least_one::<u32>(key, value)? as usize),
            "increment" => {
                let v = unit(key, value)?;
                if v == 0.0 {
                    return Err(invalid(key, "must be positive"));
                }
                s.epidemic.increment = v;
            }
            "contacts" => s.epidemic.contacts_per_zombie = at_least_one(key, value)?,
            "effect" => s.treatments.effect = unit(key, value)?,
            "window" => s.treatments.halfwidth = unit(key, value)?,
            "treatments" => s.treatments.count = at_least_one::<u32>(key, value)? as usize,
            "threshold" => {
                let v = unit(key, value)?;
                if v == 0.0 || v == 1.0 {
                    return Err(invalid(key, "must lie strictly inside (0, 1)"));
                }
                s.society.threshold = v;
            }
            "society-size" => s.society.size = at_least_one::<u32>(key, value)? as usize,
            "zombie-fraction" => s.society.zombie_fraction = unit(key, value)?,
            "human-range" => s.society.human_range = range(key, value)?,
            "zombie-range" => s.society.zombie_range = range(key, value)?,
            "pop-size" => s.optimizer.population_size = at_least_one::<u32>(key, value)? as usize,
            "tournament" => s.optimizer.tournament_size = at_least_one::<u32>(key, value)? as usize,
            "mutation" => s.optimizer.mutation_probability = unit(key, value)?,
            "influence" => s.optimizer.belief_influence = num(key, value)?,
            "virulences" => {
                let vs = list::<String>(key, value)?
                    .iter()
                    .map(|v| unit(key, v))
                    .collect::<Result<Vec<_>>>()?;
                self.sweep.virulences = vs;
            }
            "gds" => {
                let gds = list::<u32>(key, value)?;
                if gds.contains(&0) {
                    return Err(invalid(key, "every gd must be at least 1"));
                }
                self.sweep.gds = gds;
            }
            "algorithms" => {
                self.sweep.algorithms = value
                    .split(',')
                    .map(|v| algorithm(key, v))
                    .collect::<Result<Vec<_>>>()?;
            }
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Checks cross-field constraints that single assignments cannot.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        let cross = |key: &str, r: Result<()>| r.map_err(|e| invalid(key, e.to_string()));
        cross("tournament", s.optimizer.validate())?;
        cross("human-range", s.society.validate())?;
        cross("treatments", s.treatments.validate())?;
        s.validate()
    }

    /// `key=value` lines for every scenario and sweep setting. Parsing the
    /// output reproduces the same configuration.
    pub fn echo(&self) -> String {
        let s = &self.scenario;
        let join = |v: Vec<String>| v.join(",");
        let pairs: Vec<(&str, String)> = vec![
            ("virulence", s.epidemic.virulence.to_string()),
            ("gd", s.gd.to_string()),
            ("algorithm", s.algorithm.to_string()),
            ("days", s.horizon.to_string()),
            ("replications", s.replications.to_string()),
            ("seed", s.base_seed.to_string()),
            ("increment", s.epidemic.increment.to_string()),
            ("contacts", s.epidemic.contacts_per_zombie.to_string()),
            ("effect", s.treatments.effect.to_string()),
            ("window", s.treatments.halfwidth.to_string()),
            ("treatments", s.treatments.count.to_string()),
            ("threshold", s.society.threshold.to_string()),
            ("society-size", s.society.size.to_string()),
            ("zombie-fraction", s.society.zombie_fraction.to_string()),
            (
                "human-range",
                format!("{},{}", s.society.human_range.0, s.society.human_range.1),
            ),
            (
                "zombie-range",
                format!("{},{}", s.society.zombie_range.0, s.society.zombie_range.1),
            ),
            ("pop-size", s.optimizer.population_size.to_string()),
            ("tournament", s.optimizer.tournament_size.to_string()),
            ("mutation", s.optimizer.mutation_probability.to_string()),
            ("influence", s.optimizer.belief_influence.to_string()),
            (
                "virulences",
                join(self.sweep.virulences.iter().map(f64::to_string).collect()),
            ),
            (
                "gds",
                join(self.sweep.gds.iter().map(u32::to_string).collect()),
            ),
            (
                "algorithms",
                join(self.sweep.algorithms.iter().map(Algorithm::to_string).collect()),
            ),
        ];
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Parses `key=value` text. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Syntax {
            path: origin.to_string(),
            line: i + 1,
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Builds settings from defaults, then `file` (if any), then `overrides`.
pub fn parse_config(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Settings> {
    let mut settings = Settings::default();
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|e| {
            invalid("config", format!("cannot read {}: {e}", path.display()))
        })?;
        for (k, v) in parse_key_values(&text, &path.display().to_string())? {
            settings.set(&k, &v)?;
        }
    }
    for (k, v) in overrides {
        settings.set(k, v)?;
    }
    settings.validate()?;
    Ok(settings)
}

const TREATMENT_COLUMNS: [&str; 3] = ["dose", "applied", "effective"];

fn run_header(count: usize) -> String {
    let mut h = String::from("replication,day,mir,humans,zombies,best_fitness");
    for prefix in TREATMENT_COLUMNS {
        for j in 1..=count {
            let _ = write!(h, ",{prefix}_{j}");
        }
    }
    h
}

fn write_run_rows<W: Write>(w: &mut W, result: &RunResult) -> io::Result<()> {
    for d in &result.days {
        let mut line = format!(
            "{},{},{:.6},{},{},",
            result.replication, d.day, d.mir, d.humans, d.zombies
        );
        if let Some(f) = d.best_fitness {
            let _ = write!(line, "{f:.6}");
        }
        let count = d.applied_counts.len();
        match &d.committed_doses {
            Some(doses) => doses.iter().for_each(|x| {
                let _ = write!(line, ",{x:.6}");
            }),
            None => line.push_str(&",".repeat(count)),
        }
        for c in d.applied_counts.iter().chain(&d.effective_counts) {
            let _ = write!(line, ",{c}");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Writes per-day rows of every run in `results` under one header.
pub fn write_runs_csv<W: Write>(w: &mut W, results: &[RunResult]) -> io::Result<()> {
    let count = results
        .first()
        .and_then(|r| r.days.first())
        .map_or(10, |d| d.applied_counts.len());
    writeln!(w, "{}", run_header(count))?;
    for r in results {
        write_run_rows(w, r)?;
    }
    Ok(())
}

pub fn emit_run_csv(result: &RunResult, path: &Path) -> Result<()> {
    emit_runs_csv(std::slice::from_ref(result), path)
}

pub fn emit_runs_csv(results: &[RunResult], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_runs_csv(&mut w, results)?;
    w.flush()?;
    Ok(())
}

/// Identifies one scenario of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioKey {
    pub virulence: f64,
    pub gd: Option<u32>,
    pub algorithm: Algorithm,
}

impl ScenarioKey {
    pub fn of(config: &ScenarioConfig) -> Self {
        Self {
            virulence: config.epidemic.virulence,
            gd: (config.algorithm != Algorithm::None).then_some(config.gd),
            algorithm: config.algorithm,
        }
    }

    /// File-name tag, e.g. `v1_gd25_ca` or `v0.3_none`.
    pub fn tag(&self) -> String {
        match self.gd {
            Some(gd) => format!("v{}_gd{}_{}", self.virulence, gd, self.algorithm),
            None => format!("v{}_{}", self.virulence, self.algorithm),
        }
    }
}

pub const SUMMARY_HEADER: &str = "virulence,gd,algorithm,lowest_mir_mean,lowest_mir_sd,stability,\
first_neighborhood_day,last_human_day_mean,last_human_day_sd,mean_mir_mean,mean_mir_sd";

pub fn write_summary<W: Write>(w: &mut W, rows: &[(ScenarioKey, AggregateResult)]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for (k, a) in rows {
        let gd = k.gd.map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{:.6},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            k.virulence,
            gd,
            k.algorithm,
            a.lowest_mir_mean,
            a.lowest_mir_sd,
            a.stability,
            a.first_neighborhood_day,
            a.last_human_day_mean,
            a.last_human_day_sd,
            a.mean_mir_mean,
            a.mean_mir_sd
        )?;
    }
    Ok(())
}

pub fn emit_summary(rows: &[(ScenarioKey, AggregateResult)], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InsufficientReplications {
            required: 1,
            found: 0,
        });
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_summary(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

pub const MANIFEST_NAME: &str = "manifest.txt";

/// Writes `manifest.txt` into `dir`: version, creation time and file
/// inventory as comments, followed by the full configuration echo, so the
/// manifest can be passed back as `--config`.
pub fn emit_manifest(dir: &Path, settings: &Settings, files: &[String]) -> Result<PathBuf> {
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = format!(
        "# cvirus {}\n# created={created}\n",
        env!("CARGO_PKG_VERSION")
    );
    for f in files {
        let _ = writeln!(text, "# file={f}");
    }
    let _ = writeln!(text, "# file={MANIFEST_NAME}");
    text.push_str(&settings.echo());
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, text)?;
    Ok(path)
}
