//! Seeded Monte-Carlo sweeps over SNR, active ports or port count.
//!
//! Each trial owns its channel draw, derived from `(master_seed, trial)` only,
//! and every sweep point and strategy of that trial reuses it. Trials may run on
//! any number of workers; per-trial values are collected by index and reduced in
//! order, so results do not depend on scheduling.

use std::fmt;

use fama_core::{
    build_pair, correlation_matrix, design_strategy, sample_channels, ChannelRealization, CorrelationMatrix,
    FamaError, GeportOptions, PortTopology, Strategy, SystemConfig, TopologyKind,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("trial {trial}, {axis} = {value}, strategy {strategy}: {source}")]
    Receiver {
        trial: u64,
        axis: &'static str,
        value: f64,
        strategy: Strategy,
        #[source]
        source: FamaError,
    },
    #[error("channel model for {ports} ports: {source}")]
    Channel {
        ports: usize,
        #[source]
        source: FamaError,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Values swept by an experiment. SNRs are linear power ratios.
#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Snr(Vec<f64>),
    ActivePorts(Vec<usize>),
    /// Port count on a line of the base aperture.
    Ports(Vec<usize>),
}

impl Sweep {
    pub fn axis(&self) -> &'static str {
        match self {
            Self::Snr(_) => "snr",
            Self::ActivePorts(_) => "active_ports",
            Self::Ports(_) => "ports",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Snr(v) => v.len(),
            Self::ActivePorts(v) => v.len(),
            Self::Ports(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        match self {
            Self::Snr(v) => v[i],
            Self::ActivePorts(v) => v[i] as f64,
            Self::Ports(v) => v[i] as f64,
        }
    }

    fn strictly_increasing(&self) -> bool {
        (1..self.len()).all(|i| self.value(i - 1) < self.value(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetUser {
    /// Mean SE over all users of a trial.
    All,
    Index(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    pub sweep: Sweep,
    pub strategies: Vec<Strategy>,
    pub trials: u64,
    pub master_seed: u64,
    pub target_user: TargetUser,
    pub geport: GeportOptions,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Spec(m.to_string()));
        self.base.validate().map_err(|e| HarnessError::Spec(e.to_string()))?;
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required");
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return bad("strategies must not repeat");
        }
        if self.sweep.is_empty() {
            return bad("sweep needs at least one value");
        }
        if !self.sweep.strictly_increasing() {
            return bad("sweep values must be strictly increasing");
        }
        if let TargetUser::Index(k) = self.target_user {
            if k >= self.base.users {
                return bad("target user index out of range");
            }
        }
        match &self.sweep {
            Sweep::Snr(v) if v.iter().any(|s| !(*s > 0.0) || !s.is_finite()) => {
                bad("snr values must be positive and finite")
            }
            Sweep::ActivePorts(v) if v[0] == 0 || *v.last().unwrap() > self.base.num_ports() => {
                bad("active ports must satisfy 1 <= L <= N")
            }
            Sweep::Ports(v) => {
                if self.base.topology.kind() != TopologyKind::Line {
                    return bad("port-count sweeps need a line topology");
                }
                if v[0] < self.base.active_ports {
                    return bad("every swept N must be at least L");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `(snr, L, N)` at sweep point `i`.
    fn point(&self, i: usize) -> (f64, usize, usize) {
        let b = &self.base;
        match &self.sweep {
            Sweep::Snr(v) => (v[i], b.active_ports, b.num_ports()),
            Sweep::ActivePorts(v) => (b.snr, v[i], b.num_ports()),
            Sweep::Ports(v) => (b.snr, b.active_ports, v[i]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellStats {
    pub sweep_value: f64,
    pub strategy: Strategy,
    pub mean_se: f64,
    pub std_se: f64,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub spec: ExperimentSpec,
    /// Point-major: cell `p * strategies + s`.
    pub cells: Vec<CellStats>,
    /// Per-trial SE of each cell, in trial order.
    pub samples: Vec<Vec<f64>>,
}

impl SweepResult {
    /// Aggregates per-cell samples (layout as in [`SweepResult::cells`]).
    pub fn from_samples(spec: ExperimentSpec, samples: Vec<Vec<f64>>) -> Self {
        let ns = spec.strategies.len();
        let cells = samples
            .iter()
            .enumerate()
            .map(|(c, xs)| {
                let (mean, std) = mean_std(xs);
                CellStats {
                    sweep_value: spec.sweep.value(c / ns),
                    strategy: spec.strategies[c % ns],
                    mean_se: mean,
                    std_se: std,
                    trials: xs.len() as u64,
                }
            })
            .collect();
        Self { spec, cells, samples }
    }

    pub fn cell(&self, point: usize, strategy: Strategy) -> Option<&CellStats> {
        let s = self.spec.strategies.iter().position(|&x| x == strategy)?;
        self.cells.get(point * self.spec.strategies.len() + s)
    }

    pub fn samples_of(&self, point: usize, strategy: Strategy) -> Option<&[f64]> {
        let s = self.spec.strategies.iter().position(|&x| x == strategy)?;
        self.samples
            .get(point * self.spec.strategies.len() + s)
            .map(Vec::as_slice)
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    let correlations = correlations(spec)?;
    let per_trial: Vec<Result<Vec<f64>, HarnessError>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, &correlations, t))
        .collect();
    let cells = spec.sweep.len() * spec.strategies.len();
    let mut samples = vec![Vec::with_capacity(spec.trials as usize); cells];
    for row in per_trial {
        for (cell, se) in row?.into_iter().enumerate() {
            samples[cell].push(se);
        }
    }
    Ok(SweepResult::from_samples(spec.clone(), samples))
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(spec: &ExperimentSpec, workers: usize) -> Result<SweepResult, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    pool.install(|| run_experiment(spec))
}

/// One correlation matrix per distinct topology of the sweep.
fn correlations(spec: &ExperimentSpec) -> Result<Vec<CorrelationMatrix>, HarnessError> {
    let build = |t: &PortTopology| {
        correlation_matrix(t).map_err(|source| HarnessError::Channel {
            ports: t.num_ports(),
            source,
        })
    };
    match &spec.sweep {
        Sweep::Ports(ns) => {
            let w = spec.base.topology.extent().0;
            ns.par_iter()
                .map(|&n| {
                    let t = PortTopology::line(n, w).map_err(|source| HarnessError::Channel { ports: n, source })?;
                    build(&t)
                })
                .collect()
        }
        _ => Ok(vec![build(&spec.base.topology)?]),
    }
}

fn run_trial(spec: &ExperimentSpec, correlations: &[CorrelationMatrix], trial: u64) -> Result<Vec<f64>, HarnessError> {
    let users = spec.base.users;
    let draw = |corr: &CorrelationMatrix| {
        sample_channels(corr, users, users, spec.master_seed, trial).map_err(|source| HarnessError::Channel {
            ports: corr.dim(),
            source,
        })
    };
    let shared = match spec.sweep {
        Sweep::Ports(_) => None,
        _ => Some(draw(&correlations[0])?),
    };
    let targets: Vec<usize> = match spec.target_user {
        TargetUser::All => (0..users).collect(),
        TargetUser::Index(k) => vec![k],
    };
    let mut out = Vec::with_capacity(spec.sweep.len() * spec.strategies.len());
    for p in 0..spec.sweep.len() {
        let (snr, l, _) = spec.point(p);
        let own;
        let channels: &ChannelRealization = match &shared {
            Some(h) => h,
            None => {
                own = draw(&correlations[p])?;
                &own
            }
        };
        let mut se = vec![Vec::with_capacity(targets.len()); spec.strategies.len()];
        for &k in &targets {
            let fail = |strategy, source| HarnessError::Receiver {
                trial,
                axis: spec.sweep.axis(),
                value: spec.sweep.value(p),
                strategy,
                source,
            };
            let pair = build_pair(channels, k, snr).map_err(|e| fail(spec.strategies[0], e))?;
            for (s, &strategy) in spec.strategies.iter().enumerate() {
                let d = design_strategy(strategy, &pair, channels, k, snr, l, &spec.geport)
                    .map_err(|e| fail(strategy, e))?;
                se[s].push(d.spectral_efficiency());
            }
        }
        out.extend(se.iter().map(|v| compensated_sum(v.iter().copied()) / v.len() as f64));
    }
    Ok(out)
}

/// Mean difference of two strategies at one sweep point, with the standard error of
/// the per-trial (paired) difference.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseDifference {
    pub better: Strategy,
    pub worse: Strategy,
    pub mean_diff: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointComparison {
    pub sweep_value: f64,
    /// Strategies by decreasing mean SE; ties keep the requested order.
    pub ranking: Vec<(Strategy, f64)>,
    /// Every pair, ordered as in `ranking`.
    pub differences: Vec<PairwiseDifference>,
}

impl PointComparison {
    pub fn difference(&self, better: Strategy, worse: Strategy) -> Option<&PairwiseDifference> {
        self.differences
            .iter()
            .find(|d| d.better == better && d.worse == worse)
    }
}

impl fmt::Display for PointComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.sweep_value)?;
        for (s, m) in &self.ranking {
            write!(f, " {s}={m:.4}")?;
        }
        Ok(())
    }
}

pub fn compare_strategies(result: &SweepResult) -> Vec<PointComparison> {
    let spec = &result.spec;
    (0..spec.sweep.len())
        .map(|p| {
            let mut ranking: Vec<(Strategy, f64)> = spec
                .strategies
                .iter()
                .map(|&s| (s, result.cell(p, s).expect("cell per strategy").mean_se))
                .collect();
            ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
            let mut differences = Vec::new();
            for i in 0..ranking.len() {
                for j in (i + 1)..ranking.len() {
                    let (a, b) = (ranking[i].0, ranking[j].0);
                    let xa = result.samples_of(p, a).expect("samples");
                    let xb = result.samples_of(p, b).expect("samples");
                    let diff: Vec<f64> = xa.iter().zip(xb).map(|(x, y)| x - y).collect();
                    let (mean_diff, std) = mean_std(&diff);
                    differences.push(PairwiseDifference {
                        better: a,
                        worse: b,
                        mean_diff,
                        std_err: std / (diff.len() as f64).sqrt(),
                    });
                }
            }
            PointComparison {
                sweep_value: spec.sweep.value(p),
                ranking,
                differences,
            }
        })
        .collect()
}
