//! Invariant suites: exact Boltzmann checks, coloring structure, encoding
//! exactness and ground-energy oracles. Shared by the CLI `validate`
//! command and the acceptance tests.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::coloring::{color_graph, color_hypergraph, color_model, verify_coloring, ColorSchedule, Strength};
use crate::error::{Error, Result};
use crate::instance::{
    bipolar_to_binary, cubicize, generate_3r3x, ground_energy_gf2, quadratize, Convention, IsingModel,
    XorsatInstance, GADGET_OFFSET,
};
use crate::sampler::{build_master_graph, Layout, Mode, PbitNetwork, PbitRng};
use crate::seed::{derive, Stream};

/// Weak coloring of a single clause on spins `(0, 1, 2)`: spin 0 alone,
/// spins 1 and 2 together.
pub const WEAK_CLAUSE_COLORS: [usize; 3] = [0, 1, 1];
pub const BOLTZMANN_TV_MAX: f64 = 0.02;
pub const WEAK_TV_RATIO_MIN: f64 = 5.0;
pub const BOLTZMANN_BURN_IN: usize = 100;

/// `state` with bit `i` set iff spin `i` is up.
pub fn state_index(state: &[i8]) -> usize {
    state
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 1)
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

pub fn state_from_index(index: usize, n: usize, convention: Convention) -> Vec<i8> {
    (0..n)
        .map(|i| convention.from_bipolar(if index >> i & 1 == 1 { 1 } else { -1 }))
        .collect()
}

/// `exp(−βE) / Z` over all `2^n` states by enumeration.
pub fn exact_boltzmann(model: &IsingModel, beta: f64) -> Result<Vec<f64>> {
    let n = model.num_spins;
    if n > 24 {
        return Err(Error::InvalidModel(format!("{n} spins is too many to enumerate")));
    }
    let energies: Vec<f64> = (0..1usize << n)
        .map(|s| model.energy(&state_from_index(s, n, model.convention)))
        .collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

/// Lowest energy over all states.
pub fn brute_force_ground(model: &IsingModel) -> Result<f64> {
    let n = model.num_spins;
    if n > 24 {
        return Err(Error::InvalidModel(format!("{n} spins is too many to enumerate")));
    }
    Ok((0..1usize << n)
        .map(|s| model.energy(&state_from_index(s, n, model.convention)))
        .fold(f64::INFINITY, f64::min))
}

/// Fewest unsatisfied clauses over all assignments, as a cubic energy.
pub fn brute_force_instance_ground(inst: &XorsatInstance) -> i64 {
    let k = inst.num_vars;
    let mut spins = vec![-1i8; k];
    (0..1usize << k)
        .map(|s| {
            for (i, m) in spins.iter_mut().enumerate() {
                *m = if s >> i & 1 == 1 { 1 } else { -1 };
            }
            inst.cubic_energy(&spins)
        })
        .min()
        .unwrap_or(0)
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical state distribution of `net`, one sample after every sweep
/// following a burn-in.
pub fn empirical_distribution(net: &mut PbitNetwork, samples: usize, burn_in: usize) -> Vec<f64> {
    net.sweeps(burn_in);
    let mut counts = vec![0u64; 1 << net.num_pbits()];
    for _ in 0..samples {
        net.sweep();
        counts[state_index(net.state())] += 1;
    }
    counts.into_iter().map(|c| c as f64 / samples as f64).collect()
}

/// TV distance between sampled and exact distributions for `model` under
/// `schedule`, which may be a weak coloring.
pub fn boltzmann_tv(
    model: &IsingModel,
    schedule: &ColorSchedule,
    beta: f64,
    samples: usize,
    seed: u64,
    mode: Mode,
) -> Result<f64> {
    let layout = Layout::new_unchecked_weak(std::slice::from_ref(model), std::slice::from_ref(schedule))?;
    let mut net = PbitNetwork::new(
        Arc::new(layout),
        0,
        beta,
        derive(seed, Stream::Validation, &[0]),
        derive(seed, Stream::Validation, &[1]),
    )?;
    if mode == Mode::Hardware {
        net.quantize_hardware()?;
    }
    let empirical = empirical_distribution(&mut net, samples, BOLTZMANN_BURN_IN);
    let exact = exact_boltzmann(model, beta)?;
    Ok(total_variation(&empirical, &exact))
}

/// The fully connected XORSAT clause `E = −m0 m1 m2`.
pub fn single_clause() -> IsingModel {
    let mut m = IsingModel::new(3, Convention::Bipolar, 3);
    m.add_triple(0, 1, 2, 1.0);
    m.ground_energy = Some(-1.0);
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Boltzmann,
    Coloring,
    Conversion,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Boltzmann, Suite::Coloring, Suite::Conversion, Suite::Oracle];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Boltzmann => "boltzmann",
            Suite::Coloring => "coloring",
            Suite::Conversion => "conversion",
            Suite::Oracle => "oracle",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    /// Counts mismatches; passes at zero.
    fn exact(name: impl Into<String>, mismatches: usize, cases: usize) -> Self {
        Check {
            name: name.into(),
            passed: mismatches == 0,
            value: mismatches as f64,
            threshold: 0.0,
            detail: format!("{mismatches} mismatches in {cases} cases"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub samples: usize,
    pub beta: f64,
    pub oracle_sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub conversion_models: usize,
    pub coloring_sizes: Vec<usize>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            samples: 100_000,
            beta: 1.0,
            oracle_sizes: vec![8, 10, 12, 14],
            instances_per_size: 50,
            conversion_models: 100,
            coloring_sizes: vec![8, 16, 24, 32, 40, 48, 56],
            seed: 0,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Boltzmann => boltzmann_suite(opts)?,
        Suite::Coloring => coloring_suite(opts)?,
        Suite::Conversion => conversion_suite(opts)?,
        Suite::Oracle => oracle_suite(opts)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn boltzmann_suite(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let clause = single_clause();
    let strong = color_hypergraph(&clause);
    let weak = ColorSchedule::from_colors(WEAK_CLAUSE_COLORS.to_vec());
    let (beta, n, seed) = (opts.beta, opts.samples, opts.seed);
    let tv_strong = boltzmann_tv(&clause, &strong, beta, n, seed, Mode::Float)?;
    let tv_weak = boltzmann_tv(&clause, &weak, beta, n, seed, Mode::Float)?;
    let gadget = quadratize(&clause_instance(1));
    let tv_gadget = boltzmann_tv(&gadget, &color_model(&gadget), beta, n, seed, Mode::Float)?;
    let binary = bipolar_to_binary(&clause)?;
    let tv_hw = boltzmann_tv(&binary, &strong, beta, n, seed, Mode::Hardware)?;
    Ok(vec![
        Check::at_most(
            "strong-coloring clause TV",
            tv_strong,
            BOLTZMANN_TV_MAX,
            format!("{n} samples at beta {beta}"),
        ),
        Check::at_least(
            "weak-coloring clause TV ratio",
            tv_weak / tv_strong.max(f64::MIN_POSITIVE),
            WEAK_TV_RATIO_MIN,
            format!("weak TV {tv_weak:.4} vs strong {tv_strong:.4}; weak coloring flagged as non-Boltzmann"),
        ),
        Check::at_most("quadratized clause TV", tv_gadget, BOLTZMANN_TV_MAX, "gadget with auxiliary spin"),
        Check::at_most("hardware-mode clause TV", tv_hw, BOLTZMANN_TV_MAX, "s{6}{6} weights, logistic table"),
    ])
}

/// An instance-shaped wrapper around one clause, for the encoders.
fn clause_instance(parity: i8) -> XorsatInstance {
    XorsatInstance {
        num_vars: 3,
        clauses: vec![[0, 1, 2]],
        parities: vec![parity],
        planted: None,
        seed: 0,
    }
}

fn coloring_suite(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut invalid = 0;
    let mut max_colors = 0;
    let mut cubic_worse = 0;
    let mut cases = 0;
    for &k in &opts.coloring_sizes {
        for i in 0..opts.instances_per_size.max(1) as u64 {
            let inst = generate_3r3x(k, derive(opts.seed, Stream::Validation, &[k as u64, i]))?;
            let quad = quadratize(&inst);
            let cubic = cubicize(&inst);
            let qc = color_graph(&quad)?;
            let cc = color_hypergraph(&cubic);
            invalid += !verify_coloring(&quad, &qc, Strength::Strong)? as usize;
            invalid += !verify_coloring(&cubic, &cc, Strength::Strong)? as usize;
            max_colors = max_colors.max(qc.num_colors);
            cubic_worse += (cc.num_colors > qc.num_colors) as usize;
            cases += 1;
        }
    }
    checks.push(Check::exact("strong colorings verify", invalid, 2 * cases));
    checks.push(Check::at_most(
        "quadratized color count",
        max_colors as f64,
        6.0,
        format!("max over {cases} instances"),
    ));
    checks.push(Check::exact("cubic palette within quadratized palette", cubic_worse, cases));

    let models: Vec<IsingModel> = (0..100u64)
        .map(|i| generate_3r3x(16, derive(opts.seed, Stream::Validation, &[999, i])).map(|x| quadratize(&x)))
        .collect::<Result<_>>()?;
    let schedules: Vec<ColorSchedule> = models.iter().map(color_graph).collect::<Result<_>>()?;
    let mg = build_master_graph(&models, &schedules)?;
    checks.push(Check::at_most(
        "master graph phase blocks (100 instances, n=32)",
        mg.num_phase_blocks() as f64,
        6.0,
        "",
    ));

    let clause = single_clause();
    let weak = ColorSchedule::from_colors(WEAK_CLAUSE_COLORS.to_vec());
    let weak_ok = verify_coloring(&clause, &weak, Strength::Weak)? && !verify_coloring(&clause, &weak, Strength::Strong)?;
    checks.push(Check::exact("weak clause coloring is weak only", !weak_ok as usize, 1));
    Ok(checks)
}

/// Random bipolar model with dyadic weights, so conversions are exact in
/// floating point.
pub fn random_dyadic_model(rng: &mut PbitRng, n: usize, order: u8) -> IsingModel {
    let mut m = IsingModel::new(order, Convention::Bipolar, n);
    let w = |rng: &mut PbitRng| rng.random_range(-8i32..=8) as f64 / 4.0;
    for i in 0..n {
        m.h[i] = w(rng);
        for j in i + 1..n {
            if rng.random::<bool>() {
                m.add_pair(i, j, w(rng));
            }
            if order == 3 {
                for k in j + 1..n {
                    if rng.random_range(0..3) == 0 {
                        m.add_triple(i, j, k, w(rng));
                    }
                }
            }
        }
    }
    m.energy_offset = w(rng);
    m.prune_zeros();
    m
}

fn conversion_suite(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = PbitRng::seed_from_u64(derive(opts.seed, Stream::Validation, &[7]));
    let mut mismatches = 0;
    let mut states = 0;
    for i in 0..opts.conversion_models {
        let n = 3 + i % 6;
        let model = random_dyadic_model(&mut rng, n, 2 + (i % 2) as u8);
        let binary = bipolar_to_binary(&model)?;
        for s in 0..1usize << n {
            let m = state_from_index(s, n, Convention::Bipolar);
            let b = state_from_index(s, n, Convention::Binary);
            mismatches += (model.energy(&m) != binary.energy(&b)) as usize;
            states += 1;
        }
    }
    let mut checks = vec![Check::exact("binary conversion energies", mismatches, states)];

    let mut gadget_bad = 0;
    for parity in [1i8, -1] {
        let quad = quadratize(&clause_instance(parity));
        for s in 0..8usize {
            let m = state_from_index(s, 3, Convention::Bipolar);
            let with_aux = |a: i8| {
                let mut full = m.clone();
                full.push(a);
                quad.energy(&full)
            };
            let min = with_aux(1).min(with_aux(-1));
            let cubic = -(parity as f64) * (m[0] * m[1] * m[2]) as f64;
            gadget_bad += (min != cubic + quad.energy_offset - GADGET_OFFSET) as usize;
        }
    }
    checks.push(Check::exact("quadratization gadget (16 states)", gadget_bad, 16));
    Ok(checks)
}

fn oracle_suite(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = PbitRng::seed_from_u64(derive(opts.seed, Stream::Validation, &[11]));
    let mut mismatches = 0;
    let mut unsat_seen = 0;
    let mut cases = 0;
    for &k in &opts.oracle_sizes {
        for i in 0..opts.instances_per_size as u64 {
            let mut inst = generate_3r3x(k, derive(opts.seed, Stream::Validation, &[k as u64, i]))?;
            // Every other instance gets random parities, which are often
            // unsatisfiable.
            if i % 2 == 1 {
                inst.planted = None;
                for p in &mut inst.parities {
                    *p = if rng.random::<bool>() { 1 } else { -1 };
                }
            }
            let gf2 = ground_energy_gf2(&inst);
            let brute = brute_force_instance_ground(&inst);
            let agree = match gf2.ground_energy {
                Some(e) => gf2.satisfiable && e == brute as f64,
                None => !gf2.satisfiable && brute > -(k as i64),
            };
            mismatches += !agree as usize;
            unsat_seen += !gf2.satisfiable as usize;
            cases += 1;
        }
    }
    let mut checks = vec![Check::exact("GF(2) vs enumeration", mismatches, cases)];
    checks.push(Check::at_least(
        "unsatisfiable cases exercised",
        unsat_seen as f64,
        1.0,
        format!("{unsat_seen} of {cases}"),
    ));

    let mut encoded_bad = 0;
    for i in 0..4u64 {
        let inst = generate_3r3x(6, derive(opts.seed, Stream::Validation, &[6, i]))?;
        let quad = quadratize(&inst);
        let cubic = cubicize(&inst);
        encoded_bad += (brute_force_ground(&quad)? != -6.0) as usize;
        encoded_bad += (brute_force_ground(&cubic)? != -6.0) as usize;
    }
    checks.push(Check::exact("encoded ground energies (k=6)", encoded_bad, 8));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_distribution_of_single_clause() {
        let p = exact_boltzmann(&single_clause(), 1.0).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Satisfying states have m0 m1 m2 = +1: indices with an odd number
        // of down spins are unsatisfied.
        let e = 1f64.exp();
        let z = 4.0 * e + 4.0 / e;
        assert!((p[0b111] - e / z).abs() < 1e-15);
        assert!((p[0b011] - 1.0 / e / z).abs() < 1e-15);
    }

    #[test]
    fn index_round_trip() {
        for s in 0..16 {
            for c in [Convention::Bipolar, Convention::Binary] {
                assert_eq!(state_index(&state_from_index(s, 4, c)), s);
            }
        }
    }

    #[test]
    fn suites_pass_at_reduced_size() {
        let opts = SuiteOptions {
            samples: 30_000,
            oracle_sizes: vec![8, 10],
            instances_per_size: 6,
            conversion_models: 20,
            coloring_sizes: vec![8, 16],
            ..SuiteOptions::default()
        };
        for suite in [Suite::Coloring, Suite::Conversion, Suite::Oracle] {
            let r = run_suite(suite, &opts).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let r = run_suite(Suite::Boltzmann, &opts).unwrap();
        // The strong TV bound is stated at 1e5 samples; only the ordering
        // is asserted here.
        assert!(r.checks[1].passed, "{r:?}");
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
