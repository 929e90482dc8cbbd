//! Adaptive parallel tempering.
//!
//! Preprocessing builds the inverse-temperature ladder by stepping
//! `β_{t+1} = β_t + α/σ_E`, where `σ_E` is the mean per-chain energy spread
//! of `N_chains` independent chains at `β_t`, until `σ_E ≤ σ_min`. The solve
//! loop runs one replica per rung, checks every replica against the ground
//! energy before each swap attempt and exchanges neighboring states with the
//! Metropolis rule on alternating even/odd pairs.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{color_model, ColorSchedule};
use crate::error::{Error, Result};
use crate::instance::{Convention, IsingModel};
use crate::sampler::{unit_f64, Layout, Mode, PbitNetwork, PbitRng};
use crate::seed::{derive, Stream};

/// Hard cap on ladder length during preprocessing.
pub const MAX_RUNGS: usize = 200;

/// Which energy spread drives the ladder step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spread {
    #[default]
    Std,
    Variance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AptParams {
    pub alpha: f64,
    pub beta0: f64,
    pub sigma_min: f64,
    pub n_chains: usize,
    pub sweeps_per_chain: usize,
    pub sweeps_per_swap: usize,
    pub max_swap_attempts: usize,
    pub spread: Spread,
}

impl Default for AptParams {
    fn default() -> Self {
        AptParams {
            alpha: 1.0,
            beta0: 1.0,
            sigma_min: 0.5,
            n_chains: 100,
            sweeps_per_chain: 2000,
            sweeps_per_swap: 100,
            max_swap_attempts: 3000,
            spread: Spread::Std,
        }
    }
}

impl AptParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.alpha) || !positive(self.beta0) || !positive(self.sigma_min) {
            return Err(Error::InvalidParams(
                "alpha, beta0 and sigma_min must be positive and finite".into(),
            ));
        }
        if self.n_chains == 0
            || self.sweeps_per_chain < 2
            || self.sweeps_per_swap == 0
            || self.max_swap_attempts == 0
        {
            return Err(Error::InvalidParams(
                "n_chains, sweeps_per_swap and max_swap_attempts must be positive, sweeps_per_chain at least 2"
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: AptParams = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }
}

/// Strictly increasing inverse-temperature ladder, one replica per rung.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleDoc", into = "ScheduleDoc")]
pub struct AptSchedule {
    betas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    betas: Vec<f64>,
}

impl TryFrom<ScheduleDoc> for AptSchedule {
    type Error = Error;
    fn try_from(d: ScheduleDoc) -> Result<Self> {
        AptSchedule::new(d.betas)
    }
}

impl From<AptSchedule> for ScheduleDoc {
    fn from(s: AptSchedule) -> Self {
        ScheduleDoc { betas: s.betas }
    }
}

impl AptSchedule {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidParams("empty schedule".into()));
        }
        if betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidParams("betas must be finite and non-negative".into()));
        }
        if betas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("betas must be strictly increasing".into()));
        }
        Ok(AptSchedule { betas })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn num_replicas(&self) -> usize {
        self.betas.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        AptSchedule::from_json(&std::fs::read_to_string(path)?)
    }
}

fn spread_of(trace: &[f64], spread: Spread) -> f64 {
    let n = trace.len() as f64;
    let mean = trace.iter().sum::<f64>() / n;
    let var = trace.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    match spread {
        Spread::Std => var.sqrt(),
        Spread::Variance => var,
    }
}

/// `n_chains` independent chains from random states, seeded by
/// `derive(seed, Schedule, [c, 0])` (streams) and `[c, 1]` (start).
pub fn preprocessing_chains(
    layout: &Arc<Layout>,
    slot: usize,
    params: &AptParams,
    seed: u64,
) -> Result<Vec<PbitNetwork>> {
    (0..params.n_chains as u64)
        .map(|c| {
            PbitNetwork::new(
                Arc::clone(layout),
                slot,
                params.beta0,
                derive(seed, Stream::Schedule, &[c, 0]),
                derive(seed, Stream::Schedule, &[c, 1]),
            )
        })
        .collect()
}

/// Runs every chain for `sweeps_per_chain` sweeps at `beta` and returns the
/// mean over chains of the per-chain energy spread.
pub fn measure_spread(chains: &mut [PbitNetwork], beta: f64, params: &AptParams) -> f64 {
    let spreads: Vec<f64> = chains
        .par_iter_mut()
        .map(|net| {
            net.set_beta(beta);
            let trace: Vec<f64> = (0..params.sweeps_per_chain)
                .map(|_| {
                    net.sweep();
                    net.energy()
                })
                .collect();
            spread_of(&trace, params.spread)
        })
        .collect();
    spreads.iter().sum::<f64>() / spreads.len() as f64
}

/// Builds the ladder on `model`, coloring it strongly first.
pub fn preprocess_schedule(model: &IsingModel, params: &AptParams, seed: u64) -> Result<AptSchedule> {
    params.validate()?;
    let schedule = color_model(model);
    let layout = Arc::new(Layout::new(std::slice::from_ref(model), &[schedule])?);
    preprocess_on(&layout, 0, params, seed)
}

/// Chains are randomized once and carry their states from rung to rung.
pub fn preprocess_on(
    layout: &Arc<Layout>,
    slot: usize,
    params: &AptParams,
    seed: u64,
) -> Result<AptSchedule> {
    params.validate()?;
    let mut chains = preprocessing_chains(layout, slot, params, seed)?;
    let mut betas = vec![params.beta0];
    loop {
        let beta = *betas.last().unwrap();
        let sigma = measure_spread(&mut chains, beta, params);
        if sigma <= params.sigma_min {
            break;
        }
        if betas.len() == MAX_RUNGS {
            return Err(Error::ScheduleOverflow(MAX_RUNGS));
        }
        let next = beta + params.alpha / sigma;
        if next <= beta {
            // α/σ underflowed against β.
            return Err(Error::ScheduleOverflow(betas.len()));
        }
        betas.push(next);
    }
    AptSchedule::new(betas)
}

/// `min(1, exp(ΔE·Δβ))` with `ΔE = E_{i+1} − E_i`, `Δβ = β_{i+1} − β_i`.
pub fn metropolis_swap_probability(e_i: f64, e_ip1: f64, beta_i: f64, beta_ip1: f64) -> f64 {
    let x = (e_ip1 - e_i) * (beta_ip1 - beta_i);
    if x >= 0.0 || x.is_nan() {
        1.0
    } else {
        x.exp()
    }
}

/// First pair index proposed at swap attempt `attempt`.
pub fn pair_offset(attempt: usize) -> usize {
    attempt % 2
}

/// Number of pairs proposed at `attempt` with `replicas` rungs.
pub fn proposals_at(attempt: usize, replicas: usize) -> usize {
    let start = pair_offset(attempt);
    replicas.saturating_sub(start) / 2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub success: bool,
    /// Swap attempts completed before the ground state was seen.
    pub swap_attempts_used: usize,
    /// Sweeps per replica until success, or the full horizon.
    pub sweeps_used: u64,
    pub best_energy: f64,
    /// Lowest-energy state seen, in bipolar spins.
    pub best_state: Vec<i8>,
    /// Energies at each check point, indexed `[attempt][replica]`. Empty
    /// unless tracing was requested.
    pub energy_trace: Vec<Vec<f64>>,
    /// Proposals and acceptances per adjacent pair `(i, i + 1)`.
    pub swap_proposals: Vec<u64>,
    pub swap_accepts: Vec<u64>,
}

impl SolveOutcome {
    pub fn acceptance_rates(&self) -> Vec<f64> {
        self.swap_proposals
            .iter()
            .zip(&self.swap_accepts)
            .map(|(&p, &a)| if p == 0 { 0.0 } else { a as f64 / p as f64 })
            .collect()
    }
}

fn reached(energy: f64, ground: f64) -> bool {
    energy <= ground + 1e-9 * ground.abs().max(1.0)
}

/// Solves a single model on a fresh standalone network with energy traces.
pub fn solve(
    model: &IsingModel,
    schedule: &AptSchedule,
    params: &AptParams,
    seed: u64,
) -> Result<SolveOutcome> {
    let coloring = color_model(model);
    let layout = Arc::new(Layout::new(std::slice::from_ref(model), &[coloring])?);
    solve_on(&layout, 0, Mode::Float, schedule, params, seed, true)
}

/// Replica-exchange solve of instance `slot` in `layout`.
///
/// Replica `r` uses p-bit streams `derive(seed, Replicas, [r])` and a random
/// start from `derive(seed, InitialState, [r])`; swap decisions draw from
/// `derive(seed, Swaps, [])`, one variate per proposed pair.
pub fn solve_on(
    layout: &Arc<Layout>,
    slot: usize,
    mode: Mode,
    schedule: &AptSchedule,
    params: &AptParams,
    seed: u64,
    record_trace: bool,
) -> Result<SolveOutcome> {
    params.validate()?;
    let ground = layout
        .model(slot)
        .ground_energy
        .ok_or_else(|| Error::InvalidModel("ground energy unknown".into()))?;
    let layout = match mode {
        Mode::Hardware if layout.convention() == Convention::Bipolar => Arc::new(layout.to_binary()?),
        _ => Arc::clone(layout),
    };
    let betas = schedule.betas();
    let r = betas.len();
    let mut replicas = betas
        .iter()
        .enumerate()
        .map(|(i, &beta)| -> Result<PbitNetwork> {
            let i = i as u64;
            let mut net = PbitNetwork::new(
                Arc::clone(&layout),
                slot,
                beta,
                derive(seed, Stream::Replicas, &[i]),
                derive(seed, Stream::InitialState, &[i]),
            )?;
            if mode == Mode::Hardware {
                net.quantize_hardware()?;
            }
            Ok(net)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut swap_rng = PbitRng::seed_from_u64(derive(seed, Stream::Swaps, &[]));

    let mut outcome = SolveOutcome {
        success: false,
        swap_attempts_used: params.max_swap_attempts,
        sweeps_used: (params.max_swap_attempts * params.sweeps_per_swap) as u64,
        best_energy: f64::INFINITY,
        best_state: Vec::new(),
        energy_trace: Vec::new(),
        swap_proposals: vec![0; r.saturating_sub(1)],
        swap_accepts: vec![0; r.saturating_sub(1)],
    };
    let mut best_replica = None;

    for attempt in 0..params.max_swap_attempts {
        replicas
            .par_iter_mut()
            .for_each(|net| net.sweeps(params.sweeps_per_swap));
        let energies: Vec<f64> = replicas.iter().map(PbitNetwork::energy).collect();
        debug_assert!(energies.iter().all(|&e| e >= ground - 1e-9 * ground.abs().max(1.0)));
        for (i, &e) in energies.iter().enumerate() {
            if e < outcome.best_energy {
                outcome.best_energy = e;
                best_replica = Some(i);
            }
        }
        if let Some(i) = best_replica.take() {
            outcome.best_state = replicas[i].bipolar_state();
        }
        if record_trace {
            outcome.energy_trace.push(energies.clone());
        }
        if energies.iter().any(|&e| reached(e, ground)) {
            outcome.success = true;
            outcome.swap_attempts_used = attempt;
            outcome.sweeps_used = ((attempt + 1) * params.sweeps_per_swap) as u64;
            break;
        }
        let mut energies = energies;
        for i in (pair_offset(attempt)..r.saturating_sub(1)).step_by(2) {
            let p = metropolis_swap_probability(energies[i], energies[i + 1], betas[i], betas[i + 1]);
            outcome.swap_proposals[i] += 1;
            if unit_f64(&mut swap_rng) < p {
                outcome.swap_accepts[i] += 1;
                let (lo, hi) = replicas.split_at_mut(i + 1);
                lo[i].swap_state(&mut hi[0]);
                energies.swap(i, i + 1);
            }
        }
    }
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Standalone,
    Mastergraph,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub backend: Backend,
    pub mode: Mode,
    pub runs: usize,
    pub params: AptParams,
}

/// One solve within a campaign; a row of the outcome log.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: usize,
    pub run: usize,
    pub swap_attempts_used: usize,
    pub success: bool,
    pub sweeps_used: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuccessCurve {
    pub instance_id: usize,
    /// `p[t_f - 1]` for `t_f = 1..=max_swap_attempts`.
    pub p: Vec<f64>,
}

impl SuccessCurve {
    pub fn at(&self, t_f: usize) -> f64 {
        self.p[t_f - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignResult {
    pub num_instances: usize,
    pub runs: usize,
    pub max_swap_attempts: usize,
    pub sweeps_per_swap: usize,
    /// Sorted by `(instance_id, run)`.
    pub records: Vec<RunRecord>,
}

impl CampaignResult {
    /// `p_i(t_f)`: fraction of runs whose ground state was seen within the
    /// first `t_f` sweep blocks, i.e. `swap_attempts_used + 1 ≤ t_f`.
    pub fn success_curves(&self) -> Vec<SuccessCurve> {
        success_curves(&self.records, self.num_instances, self.max_swap_attempts)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_outcomes(&self.records, out)
    }
}

pub fn success_curves(records: &[RunRecord], num_instances: usize, max_swap_attempts: usize) -> Vec<SuccessCurve> {
    let mut hits = vec![vec![0u64; max_swap_attempts]; num_instances];
    let mut runs = vec![0u64; num_instances];
    for r in records {
        runs[r.instance_id] += 1;
        if r.success && r.swap_attempts_used < max_swap_attempts {
            hits[r.instance_id][r.swap_attempts_used] += 1;
        }
    }
    hits.into_iter()
        .zip(runs)
        .enumerate()
        .map(|(instance_id, (h, n))| {
            let mut acc = 0;
            let p = h
                .into_iter()
                .map(|c| {
                    acc += c;
                    if n == 0 {
                        0.0
                    } else {
                        acc as f64 / n as f64
                    }
                })
                .collect();
            SuccessCurve { instance_id, p }
        })
        .collect()
}

/// Seeded choice of the instance that defines a size's shared schedule.
pub fn pick_schedule_instance(num_instances: usize, seed: u64) -> usize {
    (derive(seed, Stream::InstancePick, &[num_instances as u64]) % num_instances.max(1) as u64) as usize
}

/// Runs `config.runs` independent solves of every instance on one shared
/// schedule. Solve `(i, run)` is seeded by `derive(seed, Replicas, [i, run])`,
/// so results do not depend on the backend or the worker count.
pub fn run_campaign(
    instances: &[IsingModel],
    schedule: &AptSchedule,
    config: &CampaignConfig,
    seed: u64,
) -> Result<CampaignResult> {
    config.params.validate()?;
    if instances.is_empty() {
        return Err(Error::NoData("campaign without instances".into()));
    }
    let n = instances[0].num_spins;
    if instances.iter().any(|m| m.num_spins != n) {
        return Err(Error::SizeMismatch("campaign instances differ in size".into()));
    }
    if let Some(i) = instances.iter().position(|m| m.ground_energy.is_none()) {
        return Err(Error::InvalidModel(format!("instance {i} has no ground energy")));
    }
    let colorings: Vec<ColorSchedule> = instances.iter().map(color_model).collect();
    // Hardware runs share one binary conversion per layout instead of one
    // per replica.
    let prepare = |layout: Layout| -> Result<Arc<Layout>> {
        Ok(Arc::new(match config.mode {
            Mode::Hardware => layout.to_binary()?,
            Mode::Float => layout,
        }))
    };
    let layouts: Vec<(Arc<Layout>, usize)> = match config.backend {
        Backend::Mastergraph => {
            let shared = prepare(Layout::new(instances, &colorings)?)?;
            (0..instances.len()).map(|i| (Arc::clone(&shared), i)).collect()
        }
        Backend::Standalone => instances
            .iter()
            .zip(&colorings)
            .map(|(m, c)| -> Result<_> {
                let layout = Layout::new(std::slice::from_ref(m), std::slice::from_ref(c))?;
                Ok((prepare(layout)?, 0))
            })
            .collect::<Result<_>>()?,
    };

    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..config.runs).map(move |r| (i, r)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(i, run)| -> Result<RunRecord> {
            let (layout, slot) = &layouts[i];
            let s = derive(seed, Stream::Replicas, &[i as u64, run as u64]);
            let o = solve_on(layout, *slot, config.mode, schedule, &config.params, s, false)?;
            Ok(RunRecord {
                instance_id: i,
                run,
                swap_attempts_used: o.swap_attempts_used,
                success: o.success,
                sweeps_used: o.sweeps_used,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CampaignResult {
        num_instances: instances.len(),
        runs: config.runs,
        max_swap_attempts: config.params.max_swap_attempts,
        sweeps_per_swap: config.params.sweeps_per_swap,
        records,
    })
}

const OUTCOME_HEADER: &str = "instance_id,run,swap_attempts_used,success,sweeps_used";

pub fn write_outcomes<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    writeln!(out, "{OUTCOME_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.instance_id, r.run, r.swap_attempts_used, r.success as u8, r.sweeps_used
        )?;
    }
    Ok(())
}

pub fn read_outcomes<R: BufRead>(input: R) -> Result<Vec<RunRecord>> {
    let bad = |line: usize, message: String| Error::Parse {
        path: "outcomes".into(),
        line,
        column: 1,
        message,
    };
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != OUTCOME_HEADER {
                return Err(bad(1, format!("expected header `{OUTCOME_HEADER}`")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(idx + 1, format!("expected 5 fields, found {}", f.len())));
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(idx + 1, e.to_string()));
        records.push(RunRecord {
            instance_id: num(f[0])? as usize,
            run: num(f[1])? as usize,
            swap_attempts_used: num(f[2])? as usize,
            success: match f[3].trim() {
                "1" => true,
                "0" => false,
                other => return Err(bad(idx + 1, format!("bad success flag `{other}`"))),
            },
            sweeps_used: num(f[4])?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{cubicize, generate_3r3x, quadratize};

    fn quick() -> AptParams {
        AptParams {
            n_chains: 8,
            sweeps_per_chain: 200,
            sweeps_per_swap: 10,
            max_swap_attempts: 200,
            ..AptParams::default()
        }
    }

    #[test]
    fn defaults_match_protocol() {
        let p = AptParams::default();
        assert_eq!((p.alpha, p.beta0, p.sigma_min), (1.0, 1.0, 0.5));
        assert_eq!((p.n_chains, p.sweeps_per_chain), (100, 2000));
        assert_eq!((p.sweeps_per_swap, p.max_swap_attempts), (100, 3000));
        p.validate().unwrap();
        let partial = AptParams::from_json(r#"{"n_chains": 10}"#).unwrap();
        assert_eq!(partial.n_chains, 10);
        assert_eq!(partial.sweeps_per_chain, 2000);
        assert!(AptParams::from_json(r#"{"alpha": 0}"#).is_err());
        assert!(AptParams::from_json(r#"{"gamma": 1}"#).is_err());
    }

    #[test]
    fn swap_probability_examples() {
        assert_eq!(metropolis_swap_probability(0.0, 5.0, 1.0, 2.0), 1.0);
        assert_eq!(metropolis_swap_probability(3.0, 3.0, 2.0, 1.0), 1.0);
        let p = metropolis_swap_probability(0.0, 10.0, 1.0, 0.9);
        assert!((p - (-1f64).exp()).abs() < 1e-15);
        assert!((p - 0.36788).abs() < 1e-5);
        assert_eq!(metropolis_swap_probability(0.0, -1e300, 0.0, 1e300), 0.0);
        assert_eq!(metropolis_swap_probability(0.0, 1e300, 0.0, 1e300), 1.0);
    }

    #[test]
    fn schedule_rejects_bad_ladders_and_round_trips() {
        assert!(AptSchedule::new(vec![]).is_err());
        assert!(AptSchedule::new(vec![1.0, 1.0]).is_err());
        assert!(AptSchedule::new(vec![1.0, 0.5]).is_err());
        let s = AptSchedule::new(vec![1.0, 1.5, 2.25]).unwrap();
        assert_eq!(AptSchedule::from_json(&s.to_json().unwrap()).unwrap(), s);
        assert!(AptSchedule::from_json(r#"{"betas":[2.0,1.0]}"#).is_err());
    }

    #[test]
    fn ladder_is_increasing_and_starts_at_beta0() {
        let model = quadratize(&generate_3r3x(16, 1).unwrap());
        let s = preprocess_schedule(&model, &quick(), 9).unwrap();
        assert_eq!(s.betas()[0], 1.0);
        assert!(s.betas().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(preprocess_schedule(&model, &quick(), 9).unwrap(), s);
    }

    #[test]
    fn unreachable_tolerance_overflows() {
        // Steps too small to ever cool the chains below σ_min.
        let model = quadratize(&generate_3r3x(8, 1).unwrap());
        let params = AptParams {
            alpha: 1e-9,
            ..quick()
        };
        assert!(matches!(
            preprocess_schedule(&model, &params, 1),
            Err(Error::ScheduleOverflow(_))
        ));
    }

    #[test]
    fn ground_state_start_succeeds_at_attempt_zero() {
        // One free spin with a huge bias: every sweep lands in the ground state.
        let mut m = IsingModel::new(2, Convention::Bipolar, 1);
        m.h[0] = 1e6;
        m.ground_energy = Some(-1e6);
        let schedule = AptSchedule::new(vec![1.0, 2.0]).unwrap();
        let o = solve(&m, &schedule, &quick(), 3).unwrap();
        assert!(o.success);
        assert_eq!(o.swap_attempts_used, 0);
        assert_eq!(o.sweeps_used, 10);
        assert_eq!(o.best_energy, -1e6);
        assert_eq!(o.best_state, vec![1]);
    }

    #[test]
    fn solve_finds_ground_state_and_traces_stay_above_it() {
        let inst = generate_3r3x(8, 5).unwrap();
        for model in [cubicize(&inst), quadratize(&inst)] {
            let schedule = AptSchedule::new(vec![0.5, 1.0, 1.5, 2.0, 3.0]).unwrap();
            let o = solve(&model, &schedule, &quick(), 11).unwrap();
            assert!(o.success);
            assert_eq!(o.best_energy, -8.0);
            assert_eq!(model.energy(&o.best_state), -8.0);
            assert_eq!(o.energy_trace.len(), o.swap_attempts_used + 1);
            assert!(o.energy_trace.iter().flatten().all(|&e| e >= -8.0));
            // Pair proposal counts follow the even/odd alternation.
            let a = o.swap_attempts_used;
            let total: u64 = o.swap_proposals.iter().sum();
            let expected: usize = (0..a).map(|t| proposals_at(t, 5)).sum();
            assert_eq!(total as usize, expected);
        }
    }

    #[test]
    fn proposal_counts_alternate() {
        assert_eq!((proposals_at(0, 5), proposals_at(1, 5)), (2, 2));
        assert_eq!((proposals_at(0, 4), proposals_at(1, 4)), (2, 1));
        assert_eq!((proposals_at(0, 1), proposals_at(1, 1)), (0, 0));
    }

    #[test]
    fn missing_ground_energy_is_an_error() {
        let mut model = cubicize(&generate_3r3x(8, 5).unwrap());
        model.ground_energy = None;
        let s = AptSchedule::new(vec![1.0]).unwrap();
        assert!(matches!(solve(&model, &s, &quick(), 1), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn curves_are_cumulative() {
        let rec = |instance_id, run, a, success| RunRecord {
            instance_id,
            run,
            swap_attempts_used: a,
            success,
            sweeps_used: 0,
        };
        let records = vec![rec(0, 0, 0, true), rec(0, 1, 2, true), rec(0, 2, 4, false), rec(1, 0, 9, true)];
        let c = success_curves(&records, 2, 4);
        assert_eq!(c[0].p, vec![1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(c[1].p, vec![0.0; 4]);
        assert_eq!(c[0].at(3), 2.0 / 3.0);
    }

    #[test]
    fn campaign_backends_and_modes_agree_and_log_round_trips() {
        let models: Vec<_> = (0..3).map(|s| quadratize(&generate_3r3x(8, 40 + s).unwrap())).collect();
        let schedule = AptSchedule::new(vec![0.8, 1.4, 2.2]).unwrap();
        let mut config = CampaignConfig {
            backend: Backend::Standalone,
            mode: Mode::Float,
            runs: 4,
            params: quick(),
        };
        let a = run_campaign(&models, &schedule, &config, 5).unwrap();
        config.backend = Backend::Mastergraph;
        let b = run_campaign(&models, &schedule, &config, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.records.iter().all(|r| r.success));
        let curves = a.success_curves();
        assert!(curves.iter().all(|c| c.p.windows(2).all(|w| w[1] >= w[0])));
        assert!(curves.iter().all(|c| *c.p.last().unwrap() == 1.0));

        config.mode = Mode::Hardware;
        let h = run_campaign(&models, &schedule, &config, 5).unwrap();
        config.backend = Backend::Standalone;
        assert_eq!(run_campaign(&models, &schedule, &config, 5).unwrap(), h);

        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"instance_id,run,swap_attempts_used,success,sweeps_used\n"));
        assert_eq!(read_outcomes(&buf[..]).unwrap(), a.records);
    }

    #[test]
    fn campaign_rejects_mixed_sizes() {
        let models = vec![
            cubicize(&generate_3r3x(8, 1).unwrap()),
            cubicize(&generate_3r3x(10, 1).unwrap()),
        ];
        let config = CampaignConfig {
            backend: Backend::Standalone,
            mode: Mode::Float,
            runs: 1,
            params: quick(),
        };
        let s = AptSchedule::new(vec![1.0]).unwrap();
        assert!(matches!(run_campaign(&models, &s, &config, 1), Err(Error::SizeMismatch(_))));
        assert!(matches!(run_campaign(&[], &s, &config, 1), Err(Error::NoData(_))));
    }
}
