//! Numerical probes near the apex of the cone: minimizing the sum of
//! single-party entropies under vanishing mutual information with one party,
//! and searching for states whose entropy vector approaches a given target.
//!
//! The search is a Hooke-Jeeves pattern search over the real and imaginary
//! parts of the amplitudes, renormalized after every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{tip_bounds, TipReport, DEFAULT_MEMBERSHIP_TOL};
use crate::entropy::{entropy_vector, EntropyVector};
use crate::error::{QecError, Result};
use crate::io::StateJson;
use crate::lemma_lab::to_eigenbasis;
use crate::linalg::{self, C64};
use crate::qstate::{random_pure, PartyDims, PureState, SubsystemMask, DEFAULT_DIM_CAP};

pub const DEFAULT_H_MIN: f64 = 0.1;
/// `10^1 .. 10^12`. With an `I^2` penalty the stationary residual scales like
/// `w^(-2/3)`, so reaching `|I| <= 1e-6` needs weights of order `1e9`.
pub const DEFAULT_PENALTY_WEIGHTS: [f64; 12] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12];
/// Smallest marginal eigenvalue accepted by the finite-difference check.
pub const FD_EIGEN_FLOOR: f64 = 1e-6;
const FD_DIRECTIONS: usize = 24;
const START_ATTEMPTS: u64 = 64;

fn default_weights() -> Vec<f64> {
    DEFAULT_PENALTY_WEIGHTS.to_vec()
}
fn default_restarts() -> usize {
    20
}
fn default_max_iterations() -> usize {
    80
}
fn default_initial_step() -> f64 {
    0.05
}
fn default_step_tol() -> f64 {
    1e-7
}
fn default_constraint_tol() -> f64 {
    1e-6
}
fn default_parallel() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub dims: Vec<usize>,
    #[serde(default = "default_weights")]
    pub penalty_weights: Vec<f64>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Pattern-search sweeps per penalty stage.
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    #[serde(default = "default_step_tol")]
    pub step_tol: f64,
    #[serde(default = "default_constraint_tol")]
    pub constraint_tol: f64,
    #[serde(default)]
    pub seed: u64,
    /// Starting amplitudes for restart 0; the remaining restarts start from
    /// seeded random states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

impl ProbeConfig {
    pub fn new(dims: Vec<usize>) -> Self {
        Self {
            dims,
            penalty_weights: default_weights(),
            restarts: default_restarts(),
            max_iterations: default_max_iterations(),
            initial_step: default_initial_step(),
            step_tol: default_step_tol(),
            constraint_tol: default_constraint_tol(),
            seed: 0,
            warm_start: None,
            parallel: default_parallel(),
        }
    }

    pub fn with_warm_start(mut self, psi: &PureState) -> Self {
        self.warm_start = Some(psi.amplitudes().iter().map(|c| [c.re, c.im]).collect());
        self
    }

    pub fn validate(&self) -> Result<PartyDims> {
        let dims = PartyDims::with_cap(self.dims.clone(), DEFAULT_DIM_CAP)?;
        if self.restarts == 0 {
            return Err(QecError::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.penalty_weights.is_empty() {
            return Err(QecError::InvalidArgument("penalty schedule is empty".into()));
        }
        if self.penalty_weights.windows(2).any(|w| w[1] <= w[0]) || self.penalty_weights[0] <= 0.0 {
            return Err(QecError::InvalidArgument("penalty weights must be positive and strictly increasing".into()));
        }
        for (name, v) in [("initial_step", self.initial_step), ("step_tol", self.step_tol), ("constraint_tol", self.constraint_tol)] {
            if !(v > 0.0) {
                return Err(QecError::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if let Some(w) = &self.warm_start {
            if w.len() != dims.total() {
                return Err(QecError::LengthMismatch { expected: dims.total(), got: w.len() });
            }
        }
        Ok(dims)
    }

    fn restart_seeds(&self) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.restarts).map(|_| rng.random()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObjectiveValue {
    /// Penalized objective; infinite when `H(X_c) < h_min`.
    pub value: f64,
    pub entropy_sum: f64,
    pub constrained_entropy: f64,
    /// `I(X_c : X_j)` for `j != c`, in party order.
    pub mutual_informations: Vec<f64>,
    /// `max_j |I(X_c : X_j)|`.
    pub residual: f64,
}

/// `sum_i H(X_i) + weight * sum_{j != c} I(X_c:X_j)^2`, with the barrier
/// `H(X_c) >= h_min` (pass `0.0` to disable it).
pub fn objective(psi: &PureState, constrained_party: usize, penalty_weight: f64, h_min: f64) -> Result<ObjectiveValue> {
    let n = psi.party_count();
    if constrained_party >= n {
        return Err(QecError::PartyOutOfRange { party: constrained_party, n });
    }
    let singles: Vec<f64> =
        (0..n).map(|i| psi.subsystem_entropy(SubsystemMask::single(i))).collect::<Result<_>>()?;
    let c = constrained_party;
    let mut mis = Vec::with_capacity(n.saturating_sub(1));
    for j in (0..n).filter(|&j| j != c) {
        let pair = psi.subsystem_entropy(SubsystemMask::from_parties(&[c, j]))?;
        mis.push(singles[c] + singles[j] - pair);
    }
    let entropy_sum: f64 = singles.iter().sum();
    let penalty: f64 = mis.iter().map(|i| i * i).sum();
    let residual = mis.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let value = if singles[c] < h_min { f64::INFINITY } else { entropy_sum + penalty_weight * penalty };
    Ok(ObjectiveValue { value, entropy_sum, constrained_entropy: singles[c], mutual_informations: mis, residual })
}

fn to_params(psi: &PureState) -> Vec<f64> {
    psi.amplitudes().iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_params(dims: &PartyDims, x: &[f64]) -> Result<PureState> {
    let amps = x.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    PureState::normalized(dims.clone(), amps)
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective after every sweep; non-increasing.
    pub trace: Vec<f64>,
    pub final_step: f64,
}

/// Hooke-Jeeves pattern search on the unit sphere. Exploratory moves visit the
/// coordinates in a seeded random order; a successful sweep is followed by a
/// pattern move along the accumulated displacement. A sweep without improvement
/// polls random directions of the same length before halving the step.
pub fn pattern_search(
    x0: &[f64],
    f: &dyn Fn(&[f64]) -> f64,
    initial_step: f64,
    step_tol: f64,
    max_sweeps: usize,
    rng: &mut ChaCha8Rng,
) -> SearchOutcome {
    let mut x = x0.to_vec();
    normalize(&mut x);
    let mut fx = f(&x);
    let mut step = initial_step;
    let mut trace = vec![fx];
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut trial = x.clone();
    let random_polls = x.len();
    let scale = (x.len() as f64).sqrt();
    for _ in 0..max_sweeps {
        if step < step_tol || !fx.is_finite() {
            break;
        }
        let base = x.clone();
        for k in (1..order.len()).rev() {
            order.swap(k, rng.random_range(0..=k));
        }
        for &k in &order {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[k] += sign * step;
                normalize(&mut trial);
                let ft = f(&trial);
                if ft < fx {
                    x.copy_from_slice(&trial);
                    fx = ft;
                    break;
                }
            }
        }
        if x == base {
            // Coordinate moves stall against the h_min wall; random directions
            // can still slide along it.
            for _ in 0..random_polls {
                for (t, xi) in trial.iter_mut().zip(&x) {
                    let g: f64 = rng.sample(StandardNormal);
                    *t = xi + step * g / scale;
                }
                normalize(&mut trial);
                let ft = f(&trial);
                if ft < fx {
                    x.copy_from_slice(&trial);
                    fx = ft;
                    break;
                }
            }
        }
        if x == base {
            step *= 0.5;
        } else {
            for (t, (xi, bi)) in trial.iter_mut().zip(x.iter().zip(&base)) {
                *t = 2.0 * xi - bi;
            }
            normalize(&mut trial);
            let ft = f(&trial);
            if ft < fx {
                x.copy_from_slice(&trial);
                fx = ft;
            }
        }
        trace.push(fx);
    }
    SearchOutcome { x, value: fx, trace, final_step: step }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    pub weight: f64,
    pub trace: Vec<f64>,
    pub objective: f64,
    pub entropy_sum: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestartReport {
    pub restart: usize,
    pub seed: u64,
    pub stages: Vec<StageTrace>,
    /// Sum of single entropies at the end of the last stage.
    pub entropy_sum: f64,
    pub residual: f64,
    pub constrained_entropy: f64,
    pub feasible: bool,
    /// Lowest entropy sum among this restart's feasible stage endpoints.
    pub best_feasible: Option<f64>,
    #[serde(skip)]
    best_state: Option<PureState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Feasible,
    InfeasibleAtTolerance,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub status: ProbeStatus,
    pub constrained_party: usize,
    pub h_min: f64,
    pub best_objective: Option<f64>,
    pub constraint_residual: Option<f64>,
    pub best_restart: Option<usize>,
    /// `ε = sum_i (1 - λ_1^i)` at the best state.
    pub best_eps_total: Option<f64>,
    #[serde(skip)]
    pub best_state: Option<PureState>,
    pub restarts: Vec<RestartReport>,
}

impl ProbeResult {
    pub fn best_state_json(&self) -> Option<StateJson> {
        self.best_state.as_ref().map(StateJson::from)
    }

    /// Entropy sums of all feasible restarts.
    pub fn feasible_objectives(&self) -> Vec<f64> {
        self.restarts.iter().filter_map(|r| r.best_feasible).collect()
    }
}

fn start_point(dims: &PartyDims, cfg: &ProbeConfig, restart: usize, seed: u64, accept: &dyn Fn(&PureState) -> bool) -> Result<PureState> {
    if restart == 0 {
        if let Some(w) = &cfg.warm_start {
            let amps = w.iter().map(|&[re, im]| C64::new(re, im)).collect();
            return PureState::normalized(dims.clone(), amps);
        }
    }
    let mut last = random_pure(dims, seed);
    for k in 1..START_ATTEMPTS {
        if accept(&last) {
            return Ok(last);
        }
        last = random_pure(dims, seed.wrapping_add(k));
    }
    Ok(last)
}

fn run_restart(dims: &PartyDims, cfg: &ProbeConfig, c: usize, h_min: f64, restart: usize, seed: u64) -> Result<RestartReport> {
    let accept = |psi: &PureState| objective(psi, c, 0.0, h_min).map(|o| o.value.is_finite()).unwrap_or(false);
    let start = start_point(dims, cfg, restart, seed, &accept)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut x = to_params(&start);
    let mut best: Option<(f64, PureState)> = None;
    let mut consider = |psi: &PureState, o: &ObjectiveValue| {
        let feasible = o.residual <= cfg.constraint_tol && o.constrained_entropy >= h_min;
        if feasible && best.as_ref().is_none_or(|(b, _)| o.entropy_sum < *b) {
            best = Some((o.entropy_sum, psi.clone()));
        }
    };
    let o0 = objective(&start, c, 0.0, h_min)?;
    consider(&start, &o0);

    let mut stages = Vec::with_capacity(cfg.penalty_weights.len());
    let mut last = o0;
    for (s, &w) in cfg.penalty_weights.iter().enumerate() {
        let f = |p: &[f64]| match from_params(dims, p).and_then(|psi| objective(&psi, c, w, h_min)) {
            Ok(o) => o.value,
            Err(_) => f64::INFINITY,
        };
        let step = if s == 0 { cfg.initial_step } else { cfg.initial_step * 0.1 };
        let out = pattern_search(&x, &f, step, cfg.step_tol, cfg.max_iterations, &mut rng);
        x = out.x;
        let psi = from_params(dims, &x)?;
        let o = objective(&psi, c, w, h_min)?;
        consider(&psi, &o);
        stages.push(StageTrace { weight: w, trace: out.trace, objective: o.value, entropy_sum: o.entropy_sum, residual: o.residual });
        last = o;
    }
    let feasible = last.residual <= cfg.constraint_tol && last.constrained_entropy >= h_min;
    Ok(RestartReport {
        restart,
        seed,
        stages,
        entropy_sum: last.entropy_sum,
        residual: last.residual,
        constrained_entropy: last.constrained_entropy,
        feasible,
        best_feasible: best.as_ref().map(|(b, _)| *b),
        best_state: best.map(|(_, s)| s),
    })
}

/// Minimizes `sum_i H(X_i)` subject to `I(X_c : X_j) = 0` for all `j` and
/// `H(X_c) >= h_min`, under the graduated penalty schedule. A point counts as
/// feasible when every `|I(X_c:X_j)|` is within `cfg.constraint_tol`.
pub fn minimize(cfg: &ProbeConfig, constrained_party: usize, h_min: f64) -> Result<ProbeResult> {
    let dims = cfg.validate()?;
    if constrained_party >= dims.len() {
        return Err(QecError::PartyOutOfRange { party: constrained_party, n: dims.len() });
    }
    if !(h_min > 0.0) {
        return Err(QecError::InvalidArgument("h_min must be positive".into()));
    }
    let seeds = cfg.restart_seeds();
    let run = |(k, &seed): (usize, &u64)| run_restart(&dims, cfg, constrained_party, h_min, k, seed);
    let restarts: Vec<RestartReport> = if cfg.parallel {
        seeds.par_iter().enumerate().map(run).collect::<Result<_>>()?
    } else {
        seeds.iter().enumerate().map(run).collect::<Result<_>>()?
    };

    let best = restarts
        .iter()
        .filter(|r| r.best_feasible.is_some())
        .min_by(|a, b| a.best_feasible.unwrap().total_cmp(&b.best_feasible.unwrap()).then(a.restart.cmp(&b.restart)));
    let (status, best_objective, constraint_residual, best_restart, best_eps_total, best_state) = match best {
        Some(r) => {
            let psi = r.best_state.clone().expect("feasible restart keeps its state");
            let o = objective(&psi, constrained_party, 0.0, 0.0)?;
            let es = to_eigenbasis(&psi)?;
            let eps: f64 = es.spectra.iter().map(|s| 1.0 - s.largest()).sum();
            (ProbeStatus::Feasible, Some(o.entropy_sum), Some(o.residual), Some(r.restart), Some(eps), Some(psi))
        }
        None => (ProbeStatus::InfeasibleAtTolerance, None, None, None, None, None),
    };
    Ok(ProbeResult {
        status,
        constrained_party,
        h_min,
        best_objective,
        constraint_residual,
        best_restart,
        best_eps_total,
        best_state,
        restarts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleRestart {
    pub restart: usize,
    pub seed: u64,
    pub distance: f64,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleReport {
    pub target: EntropyVector,
    pub best_distance: f64,
    pub best_vector: EntropyVector,
    pub best_restart: usize,
    #[serde(skip)]
    pub best_state: PureState,
    /// Bound evaluation on the target itself. Evidence only: a large distance
    /// does not prove the target unrealizable.
    pub target_bounds: TipReport,
    pub restarts: Vec<ScaleRestart>,
}

impl ScaleReport {
    pub fn best_state_json(&self) -> StateJson {
        StateJson::from(&self.best_state)
    }
}

/// Euclidean distance between the entropy vector of the first `N` parties of
/// `psi` (the last party purifies them) and `target`.
fn marginal_distance(psi: &PureState, target: &EntropyVector) -> Result<(f64, EntropyVector)> {
    let n = target.party_count();
    let full = entropy_vector(psi)?;
    let v = full.restrict(SubsystemMask::full(n))?;
    let d = v.values().iter().zip(target.values()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok((d, v))
}

/// Searches over pure states on `dims` (the last party purifies the others)
/// for an entropy vector of the first parties close to `target`. Uses a single
/// stage with `cfg.max_iterations` sweeps; the penalty schedule is ignored.
pub fn scale_feasibility(target: &EntropyVector, dims: &PartyDims, cfg: &ProbeConfig) -> Result<ScaleReport> {
    let n = target.party_count();
    if dims.len() != n + 1 {
        return Err(QecError::InvalidArgument(format!(
            "a {n}-party target needs {} dimensions (the last one purifies), got {}",
            n + 1,
            dims.len()
        )));
    }
    let mut cfg = cfg.clone();
    cfg.dims = dims.as_slice().to_vec();
    let dims = cfg.validate()?;
    let seeds = cfg.restart_seeds();
    let run = |(k, &seed): (usize, &u64)| -> Result<(ScaleRestart, PureState)> {
        let start = start_point(&dims, &cfg, k, seed, &|_| true)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let f = |p: &[f64]| match from_params(&dims, p).and_then(|psi| marginal_distance(&psi, target)) {
            Ok((d, _)) => d,
            Err(_) => f64::INFINITY,
        };
        let out = pattern_search(&to_params(&start), &f, cfg.initial_step, cfg.step_tol, cfg.max_iterations, &mut rng);
        let psi = from_params(&dims, &out.x)?;
        Ok((ScaleRestart { restart: k, seed, distance: out.value, trace: out.trace }, psi))
    };
    let runs: Vec<(ScaleRestart, PureState)> = if cfg.parallel {
        seeds.par_iter().enumerate().map(run).collect::<Result<_>>()?
    } else {
        seeds.iter().enumerate().map(run).collect::<Result<_>>()?
    };
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.distance.total_cmp(&b.0.distance).then(i.cmp(j)))
        .expect("at least one restart");
    let best_state = runs[best_idx].1.clone();
    let (best_distance, best_vector) = marginal_distance(&best_state, target)?;
    Ok(ScaleReport {
        target: target.clone(),
        best_distance,
        best_vector,
        best_restart: best_idx,
        best_state,
        target_bounds: tip_bounds(target, DEFAULT_MEMBERSHIP_TOL),
        restarts: runs.into_iter().map(|(r, _)| r).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteDifferenceReport {
    pub h: f64,
    /// `(D(h) - D(h/2)) / (D(h/2) - D(h/4))` per direction, with `D` the
    /// central difference quotient.
    pub ratios: Vec<f64>,
    pub fraction_within: f64,
    /// Largest `|D(h) - D(h/2)|` over the directions.
    pub max_deviation: f64,
    pub consistent: bool,
}

/// Checks that central differences of the smooth objective (unit penalty
/// weight, no barrier) converge at second order along seeded random
/// directions. Rejects states whose marginals have eigenvalues near zero,
/// where the entropy is not smooth.
pub fn finite_difference_consistency(psi: &PureState, constrained_party: usize, h: f64) -> Result<FiniteDifferenceReport> {
    let n = psi.party_count();
    if constrained_party >= n {
        return Err(QecError::PartyOutOfRange { party: constrained_party, n });
    }
    if !(h > 0.0) {
        return Err(QecError::InvalidArgument("step must be positive".into()));
    }
    let mut masks: Vec<SubsystemMask> = (0..n).map(SubsystemMask::single).collect();
    masks.extend((0..n).filter(|&j| j != constrained_party).map(|j| SubsystemMask::from_parties(&[constrained_party, j])));
    for m in masks {
        let rest = m.complement(n);
        if rest.is_empty() {
            continue;
        }
        let side = if psi.dims().subsystem_dim(m) <= psi.dims().subsystem_dim(rest) { m } else { rest };
        let low = linalg::hermitian_eigenvalues(psi.marginal(side)?.matrix())?.last().copied().unwrap_or(0.0);
        if low < FD_EIGEN_FLOOR {
            return Err(QecError::Degenerate(format!(
                "marginal on {} has eigenvalue {low:e} below {FD_EIGEN_FLOOR:e}",
                side.label()
            )));
        }
    }
    let dims = psi.dims().clone();
    let x0 = to_params(psi);
    let f = |dir: &[f64], t: f64| -> Result<f64> {
        let x: Vec<f64> = x0.iter().zip(dir).map(|(a, d)| a + t * d).collect();
        Ok(objective(&from_params(&dims, &x)?, constrained_party, 1.0, 0.0)?.value)
    };
    let central = |dir: &[f64], t: f64| -> Result<f64> { Ok((f(dir, t)? - f(dir, -t)?) / (2.0 * t)) };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut ratios = Vec::with_capacity(FD_DIRECTIONS);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..FD_DIRECTIONS {
        let mut dir: Vec<f64> = (0..x0.len()).map(|_| rng.sample(StandardNormal)).collect();
        normalize(&mut dir);
        let (d1, d2, d4) = (central(&dir, h)?, central(&dir, h / 2.0)?, central(&dir, h / 4.0)?);
        max_deviation = max_deviation.max((d1 - d2).abs());
        ratios.push((d1 - d2) / (d2 - d4));
    }
    let within = ratios.iter().filter(|r| (3.5..=4.5).contains(*r)).count();
    let fraction_within = within as f64 / ratios.len() as f64;
    Ok(FiniteDifferenceReport { h, ratios, fraction_within, max_deviation, consistent: fraction_within >= 0.9 })
}
