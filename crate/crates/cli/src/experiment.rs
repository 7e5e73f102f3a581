//! Seeded instance families and the batch runner behind `immersion run`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use immersion_core::budget::SearchBudget;
use immersion_core::generators::{caterpillar_of_cliques, complete, complete_bipartite, cycle_multi, grid, ladder, path_multi, random_k_edge_connected, GenError, KConnectedParams};
use immersion_core::immersion::{verify_immersion, ImmersionCertificate};
use immersion_core::packing::find_ctr_traced;
use immersion_core::MultiGraph;

use crate::envelope::{Envelope, IMMERSION};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", rename_all_fields = "camelCase", tag = "family")]
pub enum Family {
    Grid { size: usize },
    CycleMulti { t: usize, r: usize },
    PathMulti { t: usize, r: usize },
    Complete { size: usize },
    CompleteBipartite { t: usize, r: usize },
    RandomK {
        n: usize,
        k: usize,
        #[serde(default)]
        extra_edges: usize,
        #[serde(default)]
        max_degree: Option<usize>,
    },
    Caterpillar { spine: usize, size: usize, overlap: usize, legs: usize },
    Ladder { rungs: usize },
}

impl Family {
    /// The instance for `seed`. Only the random family looks at the seed.
    pub fn instance(&self, seed: u64) -> Result<MultiGraph, GenError> {
        Ok(match *self {
            Family::Grid { size } => grid(size)?,
            Family::CycleMulti { t, r } => cycle_multi(t, r)?,
            Family::PathMulti { t, r } => path_multi(t, r)?,
            Family::Complete { size } => complete(size),
            Family::CompleteBipartite { t, r } => complete_bipartite(t, r)?,
            Family::RandomK { n, k, extra_edges, max_degree } => random_k_edge_connected(KConnectedParams { n, k, extra_edges, max_degree }, seed)?,
            Family::Caterpillar { spine, size, overlap, legs } => caterpillar_of_cliques(spine, size, overlap, legs)?.graph,
            Family::Ladder { rungs } => ladder(rungs)?.graph,
        })
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub seed: u64,
    pub instance: Family,
    #[serde(default = "one")]
    pub trials: usize,
    pub t: usize,
    pub r: usize,
    #[serde(default)]
    pub budget: SearchBudget,
    /// Certificates (and DOT renders when `dot` is set) are written here per trial.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub dot: bool,
    /// Worker threads; defaults to the rayon pool size.
    #[serde(default)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TrialStatus {
    Found,
    NotFound,
    /// A certificate came back and failed verification.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub host: MultiGraph,
    pub status: TrialStatus,
    pub stage: Option<String>,
    pub certificate: Option<ImmersionCertificate>,
    pub certificate_path: Option<PathBuf>,
    pub millis: u128,
    pub log: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialReport>,
    pub found: usize,
    pub not_found: usize,
    pub invalid: usize,
}

fn trial(config: &ExperimentConfig, index: usize) -> Result<TrialReport, CliError> {
    let seed = config.seed.wrapping_add(index as u64);
    let host = config.instance.instance(seed).map_err(|e| CliError::Input(e.to_string()))?;
    let started = Instant::now();
    let run = find_ctr_traced(&host, config.t, config.r, config.budget);
    let millis = started.elapsed().as_millis();
    let status = match &run.certificate {
        Some(c) if verify_immersion(&host, c).is_ok() => TrialStatus::Found,
        Some(_) => TrialStatus::Invalid,
        None => TrialStatus::NotFound,
    };
    let mut certificate_path = None;
    if let (Some(dir), Some(cert)) = (&config.output_dir, &run.certificate) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        let path = dir.join(format!("trial-{index}.json"));
        let text = Envelope::wrap(IMMERSION, cert)?.to_json()?;
        fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        if config.dot {
            let dot = dir.join(format!("trial-{index}.dot"));
            fs::write(&dot, cert.to_dot(&host)).map_err(|source| CliError::Io { path: dot.display().to_string(), source })?;
        }
        certificate_path = Some(path);
    }
    Ok(TrialReport { index, seed, host, status, stage: run.failed_stage, certificate: run.certificate, certificate_path, millis, log: run.log })
}

/// Run every trial (in parallel) and collect the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    if config.t == 0 || config.r < 3 {
        return Err(CliError::Input(format!("target needs t >= 1 and r >= 3, got t={}, r={}", config.t, config.r)));
    }
    let work = || (0..config.trials).into_par_iter().map(|i| trial(config, i)).collect::<Result<Vec<_>, _>>();
    let trials = match config.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let count = |s: TrialStatus| trials.iter().filter(|t| t.status == s).count();
    Ok(ExperimentReport {
        found: count(TrialStatus::Found),
        not_found: count(TrialStatus::NotFound),
        invalid: count(TrialStatus::Invalid),
        config: config.clone(),
        trials,
    })
}

/// Re-check every certificate in a report against its host.
pub fn verify_report(report: &ExperimentReport) -> Result<(), String> {
    for t in &report.trials {
        match (&t.status, &t.certificate) {
            (TrialStatus::Found, Some(c)) => verify_immersion(&t.host, c).map_err(|v| format!("trial {}: {v}", t.index))?,
            (TrialStatus::Found, None) => return Err(format!("trial {} is marked found without a certificate", t.index)),
            _ => {}
        }
    }
    let found = report.trials.iter().filter(|t| t.status == TrialStatus::Found).count();
    if found != report.found {
        return Err(format!("summary says {} found, trials say {found}", report.found));
    }
    Ok(())
}
