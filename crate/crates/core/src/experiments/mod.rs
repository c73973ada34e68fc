//! Monte Carlo experiment suites: configuration, orchestration, persistence
//! and replay.
//!
//! Every trial draws from the stream `(seed, [suite id, N, L, trial])`, so a
//! record's `seed_path` is enough to regenerate it in isolation and results
//! do not depend on the number of workers.

mod plots;
mod suites;
mod summary;

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::constants_json;
use crate::error::{invalid, Error, Result};
use crate::haar::{RngStream, GAUSSIAN_METHOD};
use crate::search::{DEFAULT_MAX_ENUMERATIONS, DEFAULT_MAX_SWAPS, DEFAULT_RESTARTS};

pub use plots::emit_plots;
pub use summary::{summarize, Verdict};

pub const CSV_HEADER: [&str; 9] = ["experiment", "N", "L", "trial", "seed_path", "statistic", "value", "certified", "wall_time_ms"];
pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    MuAsymptotics,
    CpAsymptotics,
    HqCeiling,
    Harmonic,
    OneColumnLaw,
    FixedBlockLaw,
    SkEnvelope,
    BoundDuel,
    MultiMeasurement,
    Jones,
    Concentration,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::MuAsymptotics,
        Experiment::CpAsymptotics,
        Experiment::HqCeiling,
        Experiment::Harmonic,
        Experiment::OneColumnLaw,
        Experiment::FixedBlockLaw,
        Experiment::SkEnvelope,
        Experiment::BoundDuel,
        Experiment::MultiMeasurement,
        Experiment::Jones,
        Experiment::Concentration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::MuAsymptotics => "mu-asymptotics",
            Experiment::CpAsymptotics => "cp-asymptotics",
            Experiment::HqCeiling => "hq-ceiling",
            Experiment::Harmonic => "harmonic",
            Experiment::OneColumnLaw => "one-column-law",
            Experiment::FixedBlockLaw => "fixed-block-law",
            Experiment::SkEnvelope => "sk-envelope",
            Experiment::BoundDuel => "bound-duel",
            Experiment::MultiMeasurement => "multi-measurement",
            Experiment::Jones => "jones",
            Experiment::Concentration => "concentration",
        }
    }

    /// Stable numeric id used in stream paths.
    pub fn id(self) -> u64 {
        Self::ALL.iter().position(|&e| e == self).expect("registered") as u64 + 1
    }

    pub fn from_id(id: u64) -> Option<Self> {
        id.checked_sub(1).and_then(|i| Self::ALL.get(i as usize).copied())
    }

    /// Suites whose verdicts are only meaningful on exact profiles.
    pub fn requires_certification(self) -> bool {
        matches!(self, Experiment::BoundDuel | Experiment::MultiMeasurement | Experiment::FixedBlockLaw)
    }

    /// Default trials per suite, sized for a few minutes on a desktop.
    pub fn default_trials(self) -> usize {
        match self {
            Experiment::Harmonic | Experiment::Jones => 10_000,
            Experiment::MuAsymptotics | Experiment::CpAsymptotics | Experiment::Concentration => 200,
            Experiment::HqCeiling | Experiment::BoundDuel => 200,
            Experiment::OneColumnLaw | Experiment::SkEnvelope | Experiment::FixedBlockLaw => 100,
            Experiment::MultiMeasurement => 50,
        }
    }

    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Experiment::MuAsymptotics | Experiment::CpAsymptotics => vec![256, 1024],
            Experiment::HqCeiling | Experiment::BoundDuel => vec![4, 5, 6],
            Experiment::Harmonic | Experiment::Jones | Experiment::SkEnvelope => vec![64],
            Experiment::OneColumnLaw => vec![256],
            Experiment::FixedBlockLaw => vec![16, 32],
            Experiment::MultiMeasurement => vec![3, 4],
            Experiment::Concentration => vec![32, 64],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dims: Vec<usize>,
    #[serde(rename = "L")]
    pub l: usize,
    pub trials: usize,
    pub seed: u64,
    pub enum_budget: u64,
    pub restarts: usize,
    pub max_swaps: usize,
    pub allow_heuristic: bool,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 picks the machine default.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        // sk-envelope searches ~N²/2 splits per trial; a single greedy start
        // with warm seeds keeps the default run in minutes
        let (restarts, max_swaps) = match experiment {
            Experiment::SkEnvelope => (1, 0),
            _ => (DEFAULT_RESTARTS, DEFAULT_MAX_SWAPS),
        };
        Self {
            experiment,
            dims: experiment.default_dims(),
            l: 2,
            trials: experiment.default_trials(),
            seed: 42,
            enum_budget: DEFAULT_MAX_ENUMERATIONS,
            restarts,
            max_swaps,
            allow_heuristic: false,
            output_dir: None,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.dims.is_empty() {
            return invalid("dims must not be empty");
        }
        if self.enum_budget == 0 || self.restarts == 0 {
            return invalid("enum budget and restarts must be at least 1");
        }
        let min_dim = suites::min_dim(self.experiment);
        if let Some(&n) = self.dims.iter().find(|&&n| n < min_dim) {
            return invalid(format!("{} needs N >= {min_dim}, got {n}", self.experiment));
        }
        if self.experiment == Experiment::MultiMeasurement && self.l < 2 {
            return invalid("multi-measurement needs L >= 2");
        }
        if self.experiment.requires_certification() && !self.allow_heuristic {
            for &n in &self.dims {
                if !suites::certifiable(self, n) {
                    return invalid(format!(
                        "{} needs exact profiles but N={n} exceeds the enumeration budget {}; \
                         raise --enum-budget or pass --allow-heuristic",
                        self.experiment, self.enum_budget
                    ));
                }
            }
        }
        Ok(())
    }

    /// Measurements per trial as recorded in the `L` column.
    pub fn measurements(&self) -> usize {
        match self.experiment {
            Experiment::MultiMeasurement => self.l,
            Experiment::BoundDuel | Experiment::HqCeiling | Experiment::MuAsymptotics | Experiment::CpAsymptotics => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: Experiment,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub trial: usize,
    pub seed_path: String,
    pub statistic: String,
    pub value: f64,
    pub certified: bool,
    pub wall_time_ms: u64,
}

impl ExperimentRecord {
    fn csv_fields(&self) -> [String; 9] {
        [
            self.experiment.name().to_string(),
            self.n.to_string(),
            self.l.to_string(),
            self.trial.to_string(),
            self.seed_path.clone(),
            self.statistic.clone(),
            // Display is the shortest representation that round-trips
            self.value.to_string(),
            self.certified.to_string(),
            self.wall_time_ms.to_string(),
        ]
    }
}

/// One named number produced by a trial.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Stat {
    pub name: String,
    pub value: f64,
    pub certified: bool,
}

impl Stat {
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, certified: true }
    }

    pub fn flagged(name: impl Into<String>, value: f64, certified: bool) -> Self {
        Self { name: name.into(), value, certified }
    }
}

/// `seed:suite-id:N:L:trial`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPath {
    pub seed: u64,
    pub experiment: Experiment,
    pub n: usize,
    pub l: usize,
    pub trial: usize,
}

impl SeedPath {
    pub fn stream(&self) -> RngStream {
        RngStream::new(self.seed, vec![self.experiment.id(), self.n as u64, self.l as u64, self.trial as u64])
    }
}

impl fmt::Display for SeedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}:{}", self.seed, self.experiment.id(), self.n, self.l, self.trial)
    }
}

impl FromStr for SeedPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidInput(format!("malformed seed path `{s}`, expected seed:suite:N:L:trial"));
        if parts.len() != 5 {
            return Err(bad());
        }
        let num = |p: &str| p.parse::<u64>().map_err(|_| bad());
        let experiment = Experiment::from_id(num(parts[1])?).ok_or_else(bad)?;
        Ok(Self {
            seed: num(parts[0])?,
            experiment,
            n: num(parts[2])? as usize,
            l: num(parts[3])? as usize,
            trial: num(parts[4])? as usize,
        })
    }
}

fn run_trial(cfg: &ExperimentConfig, path: SeedPath) -> Result<Vec<ExperimentRecord>> {
    let start = Instant::now();
    let stats = suites::run(cfg, path.n, path.stream())?;
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let seed_path = path.to_string();
    Ok(stats
        .into_iter()
        .map(|s| ExperimentRecord {
            experiment: cfg.experiment,
            n: path.n,
            l: path.l,
            trial: path.trial,
            seed_path: seed_path.clone(),
            statistic: s.name,
            value: s.value,
            certified: s.certified,
            wall_time_ms,
        })
        .collect())
}

pub fn csv_path(dir: &Path, experiment: Experiment) -> PathBuf {
    dir.join(format!("{}.csv", experiment.name()))
}

fn write_rows(out: &mut impl Write, records: &[ExperimentRecord], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(out: &mut impl Write, records: &[ExperimentRecord]) -> Result<()> {
    write_rows(out, records, true)
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return invalid(format!("{} does not have the record header", path.display()));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Records from every suite CSV in `dir`, in file-name order.
pub fn read_dir_records(dir: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "csv")
                && p.file_stem().and_then(|s| s.to_str()).is_some_and(|s| s.parse::<Experiment>().is_ok())
        })
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(read_records(&f)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct RunHeader<'a> {
    schema: u32,
    version: &'static str,
    gaussian_method: &'static str,
    config: &'a ExperimentConfig,
}

fn write_run_header(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let header = RunHeader { schema: SUMMARY_SCHEMA, version: env!("CARGO_PKG_VERSION"), gaussian_method: GAUSSIAN_METHOD, config: cfg };
    fs::write(dir.join(format!("{}.run.json", cfg.experiment.name())), serde_json::to_string_pretty(&header)? + "\n")?;
    fs::write(dir.join("constants.json"), serde_json::to_string_pretty(&constants_json())? + "\n")?;
    Ok(())
}

/// Reads the configuration stored next to a suite's CSV.
pub fn read_run_config(dir: &Path, experiment: Experiment) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(dir.join(format!("{}.run.json", experiment.name())))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(v["config"].clone())?)
}

/// Runs the suite over `dims × trials`. Trials of one dimension run in
/// parallel; their records are appended to `<out>/<suite>.csv` in trial
/// order once the dimension completes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let mut sink = match &cfg.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_run_header(cfg, dir)?;
            let mut f = File::create(csv_path(dir, cfg.experiment))?;
            write_rows(&mut f, &[], true)?;
            Some(OpenOptions::new().append(true).open(csv_path(dir, cfg.experiment))?)
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let mut all = Vec::new();
    for &n in &cfg.dims {
        let paths: Vec<SeedPath> = (0..cfg.trials)
            .map(|trial| SeedPath { seed: cfg.seed, experiment: cfg.experiment, n, l: cfg.measurements(), trial })
            .collect();
        let batches: Vec<Vec<ExperimentRecord>> =
            pool.install(|| paths.par_iter().map(|&p| run_trial(cfg, p)).collect::<Result<_>>())?;
        let batch: Vec<ExperimentRecord> = batches.into_iter().flatten().collect();
        if let Some(f) = sink.as_mut() {
            write_rows(f, &batch, false)?;
        }
        all.extend(batch);
    }
    Ok(all)
}

/// Regenerates the records of one trial from its seed path. Search and
/// minimizer settings come from `cfg`; dimension and trial come from the
/// path.
pub fn replay_trial(cfg: &ExperimentConfig, path: SeedPath) -> Result<Vec<ExperimentRecord>> {
    if cfg.experiment != path.experiment {
        return invalid(format!("seed path belongs to {}, config is for {}", path.experiment, cfg.experiment));
    }
    let mut single = cfg.clone();
    single.dims = vec![path.n];
    single.trials = path.trial + 1;
    single.validate()?;
    run_trial(&single, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(Experiment::from_id(e.id()), Some(e));
        }
        assert!("nope".parse::<Experiment>().is_err());
        assert_eq!(Experiment::from_id(0), None);
    }

    #[test]
    fn seed_paths_round_trip() {
        let p = SeedPath { seed: 7, experiment: Experiment::Jones, n: 64, l: 1, trial: 12 };
        assert_eq!(p.to_string(), "7:10:64:1:12");
        assert_eq!(p.to_string().parse::<SeedPath>().unwrap(), p);
        assert!("7:10:64".parse::<SeedPath>().is_err());
        assert!("7:99:64:1:0".parse::<SeedPath>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::new(Experiment::Jones);
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Experiment::BoundDuel);
        c.dims = vec![16];
        assert!(c.validate().is_err());
        c.allow_heuristic = true;
        assert!(c.validate().is_ok());
        let mut c = ExperimentConfig::new(Experiment::MultiMeasurement);
        c.l = 1;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Experiment::CpAsymptotics);
        c.dims = vec![1];
        assert!(c.validate().is_err());
        c.dims = vec![];
        assert!(c.validate().is_err());
    }

    #[test]
    fn records_round_trip_through_csv() {
        let mut c = ExperimentConfig::new(Experiment::Jones);
        c.dims = vec![3];
        c.trials = 3;
        let recs = run_experiment(&c).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,N,L,trial,seed_path,statistic,value,certified,wall_time_ms\n"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("jones.csv");
        fs::write(&path, &text).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);
    }

    #[test]
    fn replay_matches_run() {
        let mut c = ExperimentConfig::new(Experiment::BoundDuel);
        c.dims = vec![3];
        c.trials = 2;
        let recs = run_experiment(&c).unwrap();
        let path: SeedPath = recs.last().unwrap().seed_path.parse().unwrap();
        let again = replay_trial(&c, path).unwrap();
        let values = |r: &[ExperimentRecord]| r.iter().map(|x| (x.statistic.clone(), x.value.to_bits())).collect::<Vec<_>>();
        assert_eq!(values(&again), values(&recs[recs.len() - again.len()..]));
    }
}
