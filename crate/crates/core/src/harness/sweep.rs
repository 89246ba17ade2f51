//! Survival-versus-depth sweeps written as canonical CSV.
//!
//! For each `(n, gamma)` one circuit is generated at the largest depth in the
//! grid and truncated for smaller depths, so curves are measured on nested
//! circuits. Every point uses the master seed for its trials, which makes
//! the sampled error configurations nested too; `p_hat` is then
//! non-increasing in depth for each series.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::Bloch;
use crate::circuit::{gen_brickwork, gen_repetition_refresh, idle_circuit, Circuit};
use crate::engine::{survival_probability, McOptions};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "family,n,gamma,depth,trials,survivors,p_hat,ci_lo,ci_hi,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Brickwork,
    Idle,
    RepetitionRefresh,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Brickwork => "brickwork",
            Family::Idle => "idle",
            Family::RepetitionRefresh => "repetition_refresh",
        }
    }
}

/// A reset state given by name or as an explicit Bloch vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResetState {
    Named(String),
    Vector([f64; 3]),
}

impl Default for ResetState {
    fn default() -> Self {
        ResetState::Named("zero".into())
    }
}

impl ResetState {
    pub fn bloch(&self) -> Result<Bloch<f64>> {
        let b = match self {
            ResetState::Vector([a, b, c]) => Bloch::new(*a, *b, *c),
            ResetState::Named(name) => match name.as_str() {
                "zero" => Bloch::zero_state(),
                "one" => Bloch::one_state(),
                "plus" => Bloch::plus_state(),
                "magic" => Bloch::magic_state(),
                "t_magic" => Bloch::t_magic_state(),
                "mixed" => Bloch::maximally_mixed(),
                other => return Err(Error::InvalidArgument(format!("unknown reset state `{other}`"))),
            },
        };
        b.validate()?;
        Ok(b)
    }
}

fn default_confidence() -> f64 {
    0.99
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    pub n: Vec<usize>,
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub reset_rate: f64,
    #[serde(default)]
    pub reset_state: ResetState,
    /// Circuit layers; for the repetition family a round is three layers
    /// and the circuit is cut after `depth` layers.
    pub depths: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub plot: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return bad("depth grid must be strictly increasing".into());
        }
        if self.trials < 100 {
            return bad(format!("trials must be at least 100, got {}", self.trials));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad(format!("confidence {} outside (0, 1)", self.confidence));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return bad(format!("gamma {g} outside [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.reset_rate) {
            return bad(format!("reset rate {} outside [0, 1]", self.reset_rate));
        }
        self.reset_state.bloch()?;
        for &n in &self.n {
            let ok = match self.family {
                Family::Idle => n >= 1,
                Family::Brickwork => n >= 2,
                Family::RepetitionRefresh => n >= 3 && n % 2 == 1,
            };
            if !ok {
                return bad(format!("n = {n} not supported by the {} family", self.family.name()));
            }
        }
        Ok(())
    }

    /// The circuit measured at `depth`.
    pub fn circuit(&self, n: usize, gamma: f64, depth: usize) -> Result<Circuit<f64>> {
        Ok(self.full_circuit(n, gamma, depth)?.truncated(depth))
    }

    fn full_circuit(&self, n: usize, gamma: f64, depth: usize) -> Result<Circuit<f64>> {
        match self.family {
            Family::Idle => idle_circuit(n, depth, gamma),
            Family::Brickwork => {
                // depends on (seed, n) only, so every gamma and depth sees the same gates
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(n as u64);
                gen_brickwork(n, depth, gamma, self.reset_rate, self.reset_state.bloch()?, &mut rng)
            }
            Family::RepetitionRefresh => gen_repetition_refresh(n, depth.div_ceil(3), gamma),
        }
    }
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub gamma: f64,
    pub depth: usize,
    pub trials: u64,
    pub survivors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

type Key = (String, usize, u64, usize);

impl SweepRow {
    fn key(&self) -> Key {
        (self.family.clone(), self.n, self.gamma.to_bits(), self.depth)
    }
}

/// Canonical order: family, n, gamma, depth.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.family
            .cmp(&b.family)
            .then(a.n.cmp(&b.n))
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.depth.cmp(&b.depth))
    });
}

pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in &sorted {
        w.serialize(r)?;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    if sorted.is_empty() {
        bytes = format!("{CSV_HEADER}\n").into_bytes();
    }
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!(
            "{}: unexpected header `{}`",
            path.display(),
            header.join(",")
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?)
}

/// Runs every grid point not already in `existing`; returns all rows in
/// canonical order. When `out` is given the CSV is rewritten after each
/// `(n, gamma)` series, so an interrupted sweep resumes where it stopped.
pub fn run_sweep(
    cfg: &SweepConfig,
    existing: &[SweepRow],
    threads: Option<usize>,
    out: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut rows: BTreeMap<Key, SweepRow> = BTreeMap::new();
    for r in existing {
        rows.insert(r.key(), r.clone());
    }
    let family = cfg.family.name();
    let Some(&max_depth) = cfg.depths.last() else {
        let all = collect(rows);
        if let Some(out) = out {
            write_csv(&all, out)?;
        }
        return Ok(all);
    };
    for &n in &cfg.n {
        for &gamma in &cfg.gamma {
            let mut pending = Vec::new();
            for &depth in &cfg.depths {
                let key = (family.to_string(), n, gamma.to_bits(), depth);
                match rows.get(&key) {
                    Some(r) if r.trials == cfg.trials && r.seed == cfg.seed => {}
                    Some(r) => {
                        return Err(Error::InvalidArgument(format!(
                            "existing row for {family} n={n} gamma={gamma} depth={depth} used trials={} seed={}",
                            r.trials, r.seed
                        )))
                    }
                    None => pending.push(depth),
                }
            }
            if pending.is_empty() {
                continue;
            }
            let full = cfg.full_circuit(n, gamma, max_depth)?;
            for depth in pending {
                let c = full.truncated(depth);
                let est = survival_probability(
                    &c,
                    &McOptions {
                        trials: cfg.trials,
                        seed: cfg.seed,
                        confidence: cfg.confidence,
                        threads,
                    },
                )?;
                let row = SweepRow {
                    family: family.to_string(),
                    n,
                    gamma,
                    depth,
                    trials: est.trials,
                    survivors: est.survivors,
                    p_hat: est.p_hat,
                    ci_lo: est.ci_lo,
                    ci_hi: est.ci_hi,
                    seed: cfg.seed,
                };
                rows.insert(row.key(), row);
            }
            if let Some(out) = out {
                write_csv(&collect(rows.clone()), out)?;
            }
        }
    }
    let all = collect(rows);
    if let Some(out) = out {
        write_csv(&all, out)?;
    }
    Ok(all)
}

fn collect(rows: BTreeMap<Key, SweepRow>) -> Vec<SweepRow> {
    let mut v: Vec<SweepRow> = rows.into_values().collect();
    sort_rows(&mut v);
    v
}

/// Splits rows into `(family, n, gamma)` series, each sorted by depth.
pub fn series(rows: &[SweepRow]) -> Vec<Vec<SweepRow>> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut out: Vec<Vec<SweepRow>> = Vec::new();
    for r in sorted {
        match out.last_mut() {
            Some(s) if s[0].family == r.family && s[0].n == r.n && s[0].gamma.to_bits() == r.gamma.to_bits() => {
                s.push(r)
            }
            _ => out.push(vec![r]),
        }
    }
    out
}
