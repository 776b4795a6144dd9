//! Experiment runner: flat key-value configs in, CSV tables and a JSON
//! manifest out.
//!
//! Every experiment writes one header-bearing CSV per quantity with the
//! fixed column order
//!
//! ```text
//! epsilon,realization_count,t,D_or_L,mean,std_error
//! ```
//!
//! floats printed with 12 significant digits so regression diffs are
//! meaningful, and rows ordered by (epsilon, t, D) exactly as configured.
//! A `manifest.json` is written before any computation with `"partial":
//! true` and rewritten at the end with `"partial": false`, the full config
//! echo, seed, code version and wall time; a crash therefore can never
//! leave result files behind without a manifest marking them partial.
//! Re-running an identical config reproduces identical CSV bytes; only
//! the manifest timestamp and wall-time fields change.

use crate::assembly2d::{assemble_entropy, wilson_loop, Sector};
use crate::chain::{ChainSpec, DisorderModel, ParitySector};
use crate::cleantheory::{
    gge, max_group_velocity, revival_period, semiclassical_correlation, semiclassical_entropy,
    static_laws, CleanQuenchSpec, StaticLaw,
};
use crate::freefermion::{diagonalize_chain, Quench};
use crate::localization::{fit_decay, sup_norm_profile, TimeGrid};
use crate::numeric::{jackknife_stderr, mean_and_stderr};
use crate::observables::{correlation_xx, entanglement_entropy};
use crate::oracle::{dense_correlation, dense_entropy, dense_evolve, dense_ground_state};
use crate::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// What a run computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// Clean-chain quench: correlation and entropy versus (t, D).
    QuenchClean,
    /// Disorder-averaged correlation and entropy versus (epsilon, t, D).
    DisorderSweep,
    /// Wilson loops assembled from independent row realizations.
    WilsonLoop,
    /// Cylinder-cut entropy of the assembled 2D state with sector rule.
    Entropy2d,
    /// Sup-over-time propagator block norms and the decay-law fit.
    LocalizationProbe,
    /// Dual-route gate: free-fermion results against dense diagonalization.
    OracleCheck,
    /// Closed-form clean theory tables: semiclassical growth and GGE.
    CleanAnalytics,
}

impl Experiment {
    fn parse(value: &str) -> Result<Self> {
        Ok(match value {
            "quench_clean" => Experiment::QuenchClean,
            "disorder_sweep" => Experiment::DisorderSweep,
            "wilson_loop" => Experiment::WilsonLoop,
            "entropy_2d" => Experiment::Entropy2d,
            "localization_probe" => Experiment::LocalizationProbe,
            "oracle_check" => Experiment::OracleCheck,
            "clean_analytics" => Experiment::CleanAnalytics,
            _ => {
                return Err(Error::Config {
                    key: "experiment".into(),
                    message: format!(
                        "unknown experiment {value:?}; expected one of quench_clean, \
                         disorder_sweep, wilson_loop, entropy_2d, localization_probe, \
                         oracle_check, clean_analytics"
                    ),
                })
            }
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Experiment::QuenchClean => "quench_clean",
            Experiment::DisorderSweep => "disorder_sweep",
            Experiment::WilsonLoop => "wilson_loop",
            Experiment::Entropy2d => "entropy_2d",
            Experiment::LocalizationProbe => "localization_probe",
            Experiment::OracleCheck => "oracle_check",
            Experiment::CleanAnalytics => "clean_analytics",
        }
    }
}

/// Unit for entropy columns; Wilson-loop logs are always natural.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyBase {
    Bits,
    Nats,
}

/// A parsed experiment description.
///
/// Configs are flat `key = value` text: `#` starts a comment, lists are
/// comma-separated. Times come either as an explicit `t_list` or as the
/// pair `t_max`, `t_step` (uniform grid from 0); the localization probe
/// reads `t_max` as its sup horizon and `t_step` as an optional cap on
/// the grid step. `m_rows` and `sector` only matter for `entropy_2d`.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_sites: usize,
    pub h: f64,
    pub h0: f64,
    pub epsilon_list: Vec<f64>,
    pub t_list: Vec<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub d_list: Vec<usize>,
    pub realizations: usize,
    pub master_seed: u64,
    pub output_path: PathBuf,
    pub entropy_base: EntropyBase,
    pub m_rows: usize,
    pub sector: Sector,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| Error::Config {
        key: key.into(),
        message: format!("{value:?} is not a number"),
    })
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value.trim().parse::<u64>().map_err(|_| Error::Config {
        key: key.into(),
        message: format!("{value:?} is not a nonnegative integer"),
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| Error::Config {
        key: key.into(),
        message: format!("{value:?} is not a nonnegative integer"),
    })
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_usize_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_usize(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Parses a config file; every assignment goes through [`Self::set`].
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    /// Parses flat `key = value` text.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig {
            experiment: Experiment::OracleCheck,
            n_sites: 0,
            h: 0.5,
            h0: 0.0,
            epsilon_list: vec![0.0],
            t_list: Vec::new(),
            t_max: None,
            t_step: None,
            d_list: Vec::new(),
            realizations: 1,
            master_seed: 1,
            output_path: PathBuf::from("out"),
            entropy_base: EntropyBase::Bits,
            m_rows: 4,
            sector: Sector::ZSector,
        };
        let mut saw_experiment = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            if key == "experiment" {
                saw_experiment = true;
            }
            config.set(key, value.trim())?;
        }
        if !saw_experiment {
            return Err(Error::Config {
                key: "experiment".into(),
                message: "config never names an experiment".into(),
            });
        }
        Ok(config)
    }

    /// Applies one `key = value` assignment; used by both the file parser
    /// and `--set` command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = Experiment::parse(value)?,
            "n_sites" => self.n_sites = parse_usize(key, value)?,
            "h" => self.h = parse_f64(key, value)?,
            "h0" => self.h0 = parse_f64(key, value)?,
            "epsilon_list" => self.epsilon_list = parse_f64_list(key, value)?,
            "t_list" => self.t_list = parse_f64_list(key, value)?,
            "t_max" => self.t_max = Some(parse_f64(key, value)?),
            "t_step" => self.t_step = Some(parse_f64(key, value)?),
            "d_list" => self.d_list = parse_usize_list(key, value)?,
            "realizations" => self.realizations = parse_usize(key, value)?,
            "master_seed" => self.master_seed = parse_u64(key, value)?,
            "output_path" => self.output_path = PathBuf::from(value),
            "entropy_base" => {
                self.entropy_base = match value {
                    "bits" => EntropyBase::Bits,
                    "nats" => EntropyBase::Nats,
                    _ => {
                        return Err(Error::Config {
                            key: key.into(),
                            message: format!("{value:?} is neither `bits` nor `nats`"),
                        })
                    }
                }
            }
            "m_rows" => self.m_rows = parse_usize(key, value)?,
            "sector" => {
                self.sector = match value {
                    "x" | "x_sector" => Sector::XSector,
                    "z" | "z_sector" => Sector::ZSector,
                    _ => {
                        return Err(Error::Config {
                            key: key.into(),
                            message: format!("{value:?} is neither `x` nor `z`"),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Config {
                    key: key.into(),
                    message: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    /// The time points an experiment sweeps: an explicit `t_list`, or the
    /// uniform grid `0, t_step, ..., <= t_max`.
    pub fn effective_times(&self) -> Result<Vec<f64>> {
        if !self.t_list.is_empty() {
            return Ok(self.t_list.clone());
        }
        match (self.t_max, self.t_step) {
            (Some(t_max), Some(step)) if step > 0.0 && t_max >= 0.0 => {
                let n = (t_max / step).floor() as usize;
                Ok((0..=n).map(|i| i as f64 * step).collect())
            }
            _ => Err(Error::Config {
                key: "t_list".into(),
                message: "needs a nonempty t_list, or t_max with a positive t_step".into(),
            }),
        }
    }

    /// Checks everything the selected experiment will read.
    pub fn validate(&self) -> Result<()> {
        let need = |cond: bool, key: &str, message: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::Config {
                    key: key.into(),
                    message: message.into(),
                })
            }
        };
        need(self.realizations >= 1, "realizations", "must be at least 1")?;
        need(self.n_sites >= 2, "n_sites", "must be at least 2")?;
        match self.experiment {
            Experiment::QuenchClean | Experiment::DisorderSweep => {
                need(!self.d_list.is_empty(), "d_list", "must be nonempty")?;
                self.effective_times()?;
                need(
                    self.d_list.iter().all(|&d| d >= 1 && d < self.n_sites),
                    "d_list",
                    "every D must satisfy 1 <= D < n_sites",
                )?;
            }
            Experiment::WilsonLoop | Experiment::Entropy2d => {
                need(!self.d_list.is_empty(), "d_list", "must be nonempty")?;
                self.effective_times()?;
                need(
                    self.d_list.iter().all(|&d| d >= 1 && d < self.n_sites),
                    "d_list",
                    "every D must satisfy 1 <= D < n_sites",
                )?;
                if self.experiment == Experiment::Entropy2d {
                    need(self.m_rows >= 1, "m_rows", "must be at least 1")?;
                }
            }
            Experiment::LocalizationProbe => {
                need(!self.d_list.is_empty(), "d_list", "must be nonempty")?;
                need(self.t_max.is_some(), "t_max", "required for the probe horizon")?;
                need(
                    self.realizations >= 2,
                    "realizations",
                    "disorder averaging needs at least 2",
                )?;
                need(
                    self.d_list.iter().all(|&d| d + 21 <= self.n_sites),
                    "d_list",
                    "every separation needs n_sites >= D + 21 for bulk anchors",
                )?;
                need(
                    self.d_list.iter().all(|&d| 2 * d <= self.n_sites),
                    "d_list",
                    "every separation must be at most n_sites / 2; beyond that \
                     the ring's wrap path is shorter",
                )?;
            }
            Experiment::OracleCheck => {
                self.effective_times()?;
                need(!self.epsilon_list.is_empty(), "epsilon_list", "must be nonempty")?;
            }
            Experiment::CleanAnalytics => {
                need(!self.d_list.is_empty(), "d_list", "must be nonempty")?;
                self.effective_times()?;
                need(
                    self.d_list.iter().all(|&d| d >= 1),
                    "d_list",
                    "semiclassical laws need D >= 1",
                )?;
            }
        }
        Ok(())
    }

    fn scale_entropy(&self, bits: f64) -> f64 {
        match self.entropy_base {
            EntropyBase::Bits => bits,
            EntropyBase::Nats => bits * std::f64::consts::LN_2,
        }
    }

    fn echo_json(&self) -> Value {
        json!({
            "experiment": self.experiment.name(),
            "n_sites": self.n_sites,
            "h": self.h,
            "h0": self.h0,
            "epsilon_list": self.epsilon_list,
            "t_list": self.t_list,
            "t_max": self.t_max,
            "t_step": self.t_step,
            "d_list": self.d_list,
            "realizations": self.realizations,
            "master_seed": self.master_seed,
            "output_path": self.output_path.display().to_string(),
            "entropy_base": match self.entropy_base {
                EntropyBase::Bits => "bits",
                EntropyBase::Nats => "nats",
            },
            "m_rows": self.m_rows,
            "sector": match self.sector {
                Sector::XSector => "x",
                Sector::ZSector => "z",
            },
        })
    }
}

/// One CSV row in the fixed column order.
#[derive(Clone, Copy, Debug)]
struct CsvRow {
    epsilon: f64,
    realization_count: usize,
    t: f64,
    d_or_l: usize,
    mean: f64,
    std_error: f64,
}

fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut out = String::from("epsilon,realization_count,t,D_or_L,mean,std_error\n");
    for r in rows {
        writeln!(
            out,
            "{:.11e},{},{:.11e},{},{:.11e},{:.11e}",
            r.epsilon, r.realization_count, r.t, r.d_or_l, r.mean, r.std_error
        )
        .expect("writing to String cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

/// What `run` produced, for the caller to report.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub csv_paths: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    /// `Some(false)` means the oracle gate failed; callers should exit
    /// nonzero.
    pub gate_passed: Option<bool>,
    pub wall_seconds: f64,
    /// Human-readable result lines for the terminal.
    pub summary: Vec<String>,
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_manifest(
    path: &Path,
    config: &ExperimentConfig,
    partial: bool,
    wall_seconds: Option<f64>,
    extra: &Map<String, Value>,
) -> Result<()> {
    let mut doc = Map::new();
    doc.insert("config".into(), config.echo_json());
    doc.insert("seed".into(), json!(config.master_seed));
    doc.insert("code_version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("partial".into(), json!(partial));
    doc.insert("timestamp_unix".into(), json!(unix_timestamp()));
    doc.insert("wall_time_seconds".into(), json!(wall_seconds));
    for (k, v) in extra {
        doc.insert(k.clone(), v.clone());
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// The quench every experiment evolves: given the bond pattern, ground
/// state of the chain at uniform field `h0`, evolved at uniform field `h`.
fn quench_for(couplings: &[f64], h0: f64, h: f64) -> Result<Quench> {
    let n = couplings.len();
    let initial = ChainSpec::new(couplings.to_vec(), vec![h0; n])?;
    let fin = ChainSpec::new(couplings.to_vec(), vec![h; n])?;
    Quench::new(&diagonalize_chain(&initial)?, &diagonalize_chain(&fin)?)
}

/// Symmetric placement of a separation-`d` pair on the ring.
fn centered_pair(n: usize, d: usize) -> (usize, usize) {
    let j = ((n - d) / 2).max(1);
    (j, j + d)
}

/// Symmetric placement of an `len`-site cut on the ring (1-based start).
fn centered_cut(n: usize, len: usize) -> usize {
    ((n - len) / 2 + 1).max(1)
}

/// Mean and jackknife error bar, with a guard for `-inf` samples (a loop
/// with a vanished row factor): those force the mean to `-inf` and make
/// the error bar meaningless, so it is reported as 0.
fn summarize(xs: &[f64]) -> (f64, f64) {
    if xs.iter().any(|x| !x.is_finite()) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (mean, _) = mean_and_stderr(xs);
    let se = jackknife_stderr(xs, |ys| ys.iter().sum::<f64>() / ys.len() as f64);
    (mean, se)
}

type CsvTables = Vec<(&'static str, Vec<CsvRow>)>;

fn run_quench_clean(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let n = config.n_sites;
    let times = config.effective_times()?;
    let quench = quench_for(&vec![1.0; n], config.h0, config.h)?;
    let per_time: Vec<(Vec<f64>, Vec<f64>)> = times
        .par_iter()
        .map(|&t| -> Result<(Vec<f64>, Vec<f64>)> {
            let prop = quench.propagator(t);
            let mut corr = Vec::with_capacity(config.d_list.len());
            let mut ent = Vec::with_capacity(config.d_list.len());
            for &d in &config.d_list {
                let (j, l) = centered_pair(n, d);
                corr.push(correlation_xx(&prop, j, l)?.magnitude);
                ent.push(entanglement_entropy(&prop, centered_cut(n, d), d)?.bits);
            }
            Ok((corr, ent))
        })
        .collect::<Result<_>>()?;
    let mut corr_rows = Vec::new();
    let mut ent_rows = Vec::new();
    for (ti, &t) in times.iter().enumerate() {
        for (di, &d) in config.d_list.iter().enumerate() {
            corr_rows.push(CsvRow {
                epsilon: 0.0,
                realization_count: 1,
                t,
                d_or_l: d,
                mean: per_time[ti].0[di],
                std_error: 0.0,
            });
            ent_rows.push(CsvRow {
                epsilon: 0.0,
                realization_count: 1,
                t,
                d_or_l: d,
                mean: config.scale_entropy(per_time[ti].1[di]),
                std_error: 0.0,
            });
        }
    }
    Ok((
        vec![("correlation.csv", corr_rows), ("entropy.csv", ent_rows)],
        Map::new(),
    ))
}

fn run_disorder_sweep(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let n = config.n_sites;
    let times = config.effective_times()?;
    let mut corr_rows = Vec::new();
    let mut ent_rows = Vec::new();
    for &epsilon in &config.epsilon_list {
        let model = DisorderModel::new(epsilon, config.h, n, config.master_seed)?;
        // per_real[r][t][d] = (correlation magnitude, entropy bits)
        let per_real: Vec<Vec<Vec<(f64, f64)>>> = (0..config.realizations as u64)
            .into_par_iter()
            .map(|r| -> Result<Vec<Vec<(f64, f64)>>> {
                let spec = model.sample_chain(r);
                let quench = quench_for(&spec.couplings, config.h0, config.h)?;
                times
                    .iter()
                    .map(|&t| {
                        let prop = quench.propagator(t);
                        config
                            .d_list
                            .iter()
                            .map(|&d| {
                                let (j, l) = centered_pair(n, d);
                                let c = correlation_xx(&prop, j, l)?.magnitude;
                                let s =
                                    entanglement_entropy(&prop, centered_cut(n, d), d)?.bits;
                                Ok((c, s))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (ti, &t) in times.iter().enumerate() {
            for (di, &d) in config.d_list.iter().enumerate() {
                let cs: Vec<f64> = per_real.iter().map(|r| r[ti][di].0).collect();
                let ss: Vec<f64> = per_real
                    .iter()
                    .map(|r| config.scale_entropy(r[ti][di].1))
                    .collect();
                let (cm, cse) = summarize(&cs);
                let (sm, sse) = summarize(&ss);
                corr_rows.push(CsvRow {
                    epsilon,
                    realization_count: config.realizations,
                    t,
                    d_or_l: d,
                    mean: cm,
                    std_error: cse,
                });
                ent_rows.push(CsvRow {
                    epsilon,
                    realization_count: config.realizations,
                    t,
                    d_or_l: d,
                    mean: sm,
                    std_error: sse,
                });
            }
        }
    }
    Ok((
        vec![("correlation.csv", corr_rows), ("entropy.csv", ent_rows)],
        Map::new(),
    ))
}

fn run_wilson_loop(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let n = config.n_sites;
    let times = config.effective_times()?;
    let mut rows = Vec::new();
    for &epsilon in &config.epsilon_list {
        let model = DisorderModel::new(epsilon, config.h, n, config.master_seed)?;
        for &d in &config.d_list {
            // Loop sample s draws its D row factors from realizations
            // s*D .. s*D+D-1; rows are independent chains, so stacking
            // realizations is exact, not an approximation.
            let per_sample: Vec<Vec<f64>> = (0..config.realizations as u64)
                .into_par_iter()
                .map(|s| -> Result<Vec<f64>> {
                    let mut logs = Vec::with_capacity(times.len());
                    let mut factors = vec![vec![0.0; d]; times.len()];
                    for l in 0..d as u64 {
                        let spec = model.sample_chain(s * d as u64 + l);
                        let quench = quench_for(&spec.couplings, config.h0, config.h)?;
                        for (ti, &t) in times.iter().enumerate() {
                            let prop = quench.propagator(t);
                            let (j, k) = centered_pair(n, d);
                            factors[ti][l as usize] = correlation_xx(&prop, j, k)?.magnitude;
                        }
                    }
                    for f in &factors {
                        logs.push(wilson_loop(f)?.log_value);
                    }
                    Ok(logs)
                })
                .collect::<Result<_>>()?;
            for (ti, &t) in times.iter().enumerate() {
                let xs: Vec<f64> = per_sample.iter().map(|s| s[ti]).collect();
                let (mean, se) = summarize(&xs);
                rows.push(CsvRow {
                    epsilon,
                    realization_count: config.realizations,
                    t,
                    d_or_l: d,
                    mean,
                    std_error: se,
                });
            }
        }
    }
    // Row order is (epsilon, t, D) like every other table.
    rows.sort_by(|a, b| {
        (a.epsilon, a.t, a.d_or_l)
            .partial_cmp(&(b.epsilon, b.t, b.d_or_l))
            .expect("finite keys")
    });
    Ok((vec![("wilson.csv", rows)], Map::new()))
}

fn run_entropy_2d(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let n = config.n_sites;
    let times = config.effective_times()?;
    let rows_per_sample = 2 * config.m_rows;
    let mut rows = Vec::new();
    let mut gamma = None;
    for &epsilon in &config.epsilon_list {
        let model = DisorderModel::new(epsilon, config.h, n, config.master_seed)?;
        // per_real[r][t][d] = row entropy in bits; sample s consumes
        // realizations s*2M .. s*2M+2M-1, one independent chain per row.
        let n_real = config.realizations * rows_per_sample;
        let per_real: Vec<Vec<Vec<f64>>> = (0..n_real as u64)
            .into_par_iter()
            .map(|r| -> Result<Vec<Vec<f64>>> {
                let spec = model.sample_chain(r);
                let quench = quench_for(&spec.couplings, config.h0, config.h)?;
                times
                    .iter()
                    .map(|&t| {
                        let prop = quench.propagator(t);
                        config
                            .d_list
                            .iter()
                            .map(|&d| {
                                Ok(entanglement_entropy(&prop, centered_cut(n, d), d)?.bits)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (ti, &t) in times.iter().enumerate() {
            for (di, &d) in config.d_list.iter().enumerate() {
                let mut totals = Vec::with_capacity(config.realizations);
                for s in 0..config.realizations {
                    let row_entropies: Vec<f64> = (0..rows_per_sample)
                        .map(|l| per_real[s * rows_per_sample + l][ti][di])
                        .collect();
                    let assembled = assemble_entropy(&row_entropies, config.sector)?;
                    gamma.get_or_insert(assembled.gamma_topo);
                    totals.push(config.scale_entropy(assembled.total_bits));
                }
                let (mean, se) = summarize(&totals);
                rows.push(CsvRow {
                    epsilon,
                    realization_count: config.realizations,
                    t,
                    d_or_l: d,
                    mean,
                    std_error: se,
                });
            }
        }
    }
    let mut extra = Map::new();
    extra.insert("gamma_topo".into(), json!(gamma));
    extra.insert("rows_per_cut".into(), json!(rows_per_sample));
    Ok((vec![("entropy2d.csv", rows)], extra))
}

fn run_localization_probe(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let t_max = config.t_max.ok_or_else(|| Error::Config {
        key: "t_max".into(),
        message: "required for the probe horizon".into(),
    })?;
    let grid = match config.t_step {
        Some(step) => TimeGrid::with_max_step(t_max, step),
        None => TimeGrid::new(t_max),
    };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &epsilon in &config.epsilon_list {
        let model = DisorderModel::new(epsilon, config.h, config.n_sites, config.master_seed)?;
        let samples = sup_norm_profile(&model, &grid, &config.d_list, config.realizations)?;
        for s in &samples {
            rows.push(CsvRow {
                epsilon,
                realization_count: config.realizations,
                t: t_max,
                d_or_l: s.d,
                mean: s.mean,
                std_error: s.std_error,
            });
        }
        let fit_json = match fit_decay(&samples) {
            Ok(fit) => json!({
                "epsilon": epsilon,
                "status": "fitted",
                "c_fit": fit.c_fit,
                "eta_fit": fit.eta_fit,
                "zeta_fit": fit.zeta_fit,
                "eta_stderr": fit.eta_stderr,
                "residual": fit.residual,
                "zeta1": {
                    "c_fit": fit.zeta1.c_fit,
                    "eta_fit": fit.zeta1.eta_fit,
                    "eta_stderr": fit.zeta1.eta_stderr,
                    "residual": fit.zeta1.residual,
                },
            }),
            Err(Error::DecayFitRejected(reason)) => json!({
                "epsilon": epsilon,
                "status": "rejected",
                "reason": reason,
            }),
            Err(other) => return Err(other),
        };
        fits.push(fit_json);
    }
    let mut extra = Map::new();
    extra.insert("decay_fits".into(), json!(fits));
    extra.insert("sup_horizon".into(), json!(t_max));
    Ok((vec![("profile.csv", rows)], extra))
}

/// Sizes the oracle gate cycles through; all small enough for dense
/// diagonalization, large enough to exercise bulk and wrap bonds.
const ORACLE_SIZES: [usize; 3] = [6, 8, 10];

fn run_oracle_check(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let times = config.effective_times()?;
    let epsilon = config.epsilon_list[0];
    let mut corr_rows = Vec::new();
    let mut ent_rows = Vec::new();
    let mut worst_corr = 0.0f64;
    let mut worst_ent = 0.0f64;
    for inst in 0..config.realizations {
        let n = ORACLE_SIZES[inst % ORACLE_SIZES.len()];
        let model = DisorderModel::new(epsilon, config.h, n, config.master_seed)?;
        let spec = model.sample_chain(inst as u64);
        let initial = ChainSpec::new(spec.couplings.clone(), vec![config.h0; n])?;
        let fin = ChainSpec::new(spec.couplings.clone(), vec![config.h; n])?;
        let quench = quench_for(&spec.couplings, config.h0, config.h)?;
        let ground = dense_ground_state(&initial, ParitySector::EvenParity)?;
        for &t in &times {
            let prop = quench.propagator(t);
            let dense = dense_evolve(&ground.state, &fin, t)?;
            let mut dc = 0.0f64;
            for j in 1..n {
                for l in (j + 1)..=n {
                    let free = correlation_xx(&prop, j, l)?.magnitude;
                    let exact = dense_correlation(&dense, j, l)?.abs();
                    dc = dc.max((free - exact).abs());
                }
            }
            let mut ds = 0.0f64;
            for (first, len) in [(1, 1), (1, 2), (2, 2), (1, n / 2)] {
                let free = entanglement_entropy(&prop, first, len)?.bits;
                let exact = dense_entropy(&dense, first, len)?;
                ds = ds.max((free - exact).abs());
            }
            worst_corr = worst_corr.max(dc);
            worst_ent = worst_ent.max(ds);
            corr_rows.push(CsvRow {
                epsilon,
                realization_count: inst + 1,
                t,
                d_or_l: n,
                mean: dc,
                std_error: 0.0,
            });
            ent_rows.push(CsvRow {
                epsilon,
                realization_count: inst + 1,
                t,
                d_or_l: n,
                mean: ds,
                std_error: 0.0,
            });
        }
    }
    let pass = worst_corr < 1e-8 && worst_ent < 1e-7;
    let mut extra = Map::new();
    extra.insert("oracle_max_correlation_deviation".into(), json!(worst_corr));
    extra.insert("oracle_max_entropy_deviation_bits".into(), json!(worst_ent));
    extra.insert("oracle_pass".into(), json!(pass));
    extra.insert(
        "oracle_tolerances".into(),
        json!({"correlation": 1e-8, "entropy_bits": 1e-7}),
    );
    Ok((
        vec![
            ("oracle_correlation.csv", corr_rows),
            ("oracle_entropy.csv", ent_rows),
        ],
        extra,
    ))
}

fn run_clean_analytics(config: &ExperimentConfig) -> Result<(CsvTables, Map<String, Value>)> {
    let spec = CleanQuenchSpec::new(config.h0, config.h, Some(config.n_sites))?;
    let times = config.effective_times()?;
    let mut corr_rows = Vec::new();
    let mut ent_rows = Vec::new();
    for &t in &times {
        for &d in &config.d_list {
            // The correlation table carries the log of the decay factor
            // (natural units by definition); entropy follows entropy_base.
            corr_rows.push(CsvRow {
                epsilon: 0.0,
                realization_count: 1,
                t,
                d_or_l: d,
                mean: semiclassical_correlation(&spec, d, t)?,
                std_error: 0.0,
            });
            ent_rows.push(CsvRow {
                epsilon: 0.0,
                realization_count: 1,
                t,
                d_or_l: d,
                mean: config.scale_entropy(semiclassical_entropy(&spec, d, t)?),
                std_error: 0.0,
            });
        }
    }
    let summary = gge(&spec)?;
    let (p_star, v_max) = max_group_velocity(config.h);
    let mut extra = Map::new();
    extra.insert(
        "gge".into(),
        json!({
            "inverse_xi_eff": summary.inverse_xi_eff,
            "entropy_density_bits": summary.entropy_density_bits,
            "total_bits": summary.total_bits,
        }),
    );
    extra.insert(
        "max_group_velocity".into(),
        json!({"p_star": p_star, "v_max": v_max}),
    );
    extra.insert(
        "revival_period".into(),
        json!(revival_period(config.n_sites, config.h)?),
    );
    let law = match static_laws(1.0, config.h)? {
        StaticLaw::Perimeter {
            limit_correlator,
            alpha,
        } => json!({
            "kind": "perimeter",
            "limit_correlator": limit_correlator,
            "alpha": alpha,
        }),
        StaticLaw::Area { xi } => json!({"kind": "area", "xi": xi}),
    };
    extra.insert("static_law".into(), law);
    Ok((
        vec![
            ("clean_correlation.csv", corr_rows),
            ("clean_entropy.csv", ent_rows),
        ],
        extra,
    ))
}

/// Runs one experiment into `out_dir`, writing CSVs plus `manifest.json`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let manifest_path = out_dir.join("manifest.json");
    write_manifest(&manifest_path, config, true, None, &Map::new())?;
    let started = Instant::now();
    let (tables, mut extra) = match config.experiment {
        Experiment::QuenchClean => run_quench_clean(config),
        Experiment::DisorderSweep => run_disorder_sweep(config),
        Experiment::WilsonLoop => run_wilson_loop(config),
        Experiment::Entropy2d => run_entropy_2d(config),
        Experiment::LocalizationProbe => run_localization_probe(config),
        Experiment::OracleCheck => run_oracle_check(config),
        Experiment::CleanAnalytics => run_clean_analytics(config),
    }?;
    let mut csv_paths = Vec::new();
    for (name, rows) in &tables {
        let path = out_dir.join(name);
        write_csv(&path, rows)?;
        csv_paths.push(path);
    }
    let gate_passed = extra
        .get("oracle_pass")
        .and_then(Value::as_bool);
    let wall_seconds = started.elapsed().as_secs_f64();
    let mut summary = Vec::new();
    for path in &csv_paths {
        summary.push(format!("wrote {}", path.display()));
    }
    if let Some(pass) = gate_passed {
        let corr = extra
            .get("oracle_max_correlation_deviation")
            .and_then(Value::as_f64)
            .unwrap_or(f64::NAN);
        let ent = extra
            .get("oracle_max_entropy_deviation_bits")
            .and_then(Value::as_f64)
            .unwrap_or(f64::NAN);
        summary.push(format!(
            "oracle gate: {} (max correlation deviation {corr:.3e}, max entropy deviation {ent:.3e} bits)",
            if pass { "PASS" } else { "FAIL" }
        ));
    }
    extra.insert("csv_files".into(), {
        let names: Vec<String> = tables.iter().map(|(n, _)| n.to_string()).collect();
        json!(names)
    });
    write_manifest(&manifest_path, config, false, Some(wall_seconds), &extra)?;
    summary.push(format!("wrote {}", manifest_path.display()));
    Ok(RunReport {
        csv_paths,
        manifest_path,
        gate_passed,
        wall_seconds,
        summary,
    })
}

/// Thread count resolution: explicit flag, then `QUENCH_ISING_THREADS`,
/// then `RAYON_NUM_THREADS`, then every core.
pub fn resolve_threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("QUENCH_ISING_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .or_else(|| {
        std::env::var("RAYON_NUM_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

/// Installs the global worker pool. Safe to call once; later calls are
/// ignored by rayon, which is fine because results never depend on the
/// worker count.
pub fn install_thread_pool(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
