//! The p-bit Gibbs-sampling core.
//!
//! A [`PbitNetwork`] holds spins, one RNG stream per p-bit and an inverse
//! temperature, and updates its p-bits color block by color block. Within a
//! block every p-bit reads the state as it was before the block started, so
//! the result does not depend on how the block's work is split across
//! threads; with a proper coloring this is exact Gibbs sampling.
//!
//! Bipolar float mode implements `m_i = sgn[tanh(β I_i) - u]`, `u ~ U(-1, 1)`,
//! written as the equivalent `m_i = +1 iff (1 + tanh(β I_i)) / 2 > u'` with
//! `u' = (u + 1) / 2 ~ U[0, 1)`. Binary float mode uses `σ(β I')` with the
//! same `u'`, computed as `(1 + tanh(β I' / 2)) / 2`, so a bipolar model and its
//! binary conversion follow identical trajectories from coupled streams.
//! Hardware mode accumulates β-scaled s{6}{6} weights in integers, gates
//! cubic terms on both partner bits being 1, and compares a 32-bit uniform
//! word against a tabulated logistic.

mod fixed;
mod master;
mod rng;
mod tables;
mod trajectory;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

pub use fixed::{
    logistic_threshold, FixedPointWeight, FRAC_BITS, LUT_ENTRIES, LUT_HALF_RANGE, MAX_RAW,
};
pub use master::{build_master_graph, MasterGraph};
pub use rng::{pbit_streams, unit_f64, unit_u32, PbitRng};
pub use tables::SynapseTables;
pub use trajectory::{read_trajectory, TrajectoryFrame, TrajectoryWriter};

use crate::coloring::{verify_coloring, ColorSchedule, Strength};
use crate::error::{Error, Result};
use crate::instance::{bipolar_to_binary, Convention, IsingModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Hardware,
}

/// Couplings and schedules of one or more instances over a common p-bit set.
#[derive(Debug)]
pub struct Layout {
    convention: Convention,
    num_pbits: usize,
    models: Vec<IsingModel>,
    schedules: Vec<ColorSchedule>,
    tables: SynapseTables<f64>,
}

impl Layout {
    /// Pads every model and schedule to the largest spin count and builds
    /// the interleaved tables. Each schedule must be a valid coloring of its
    /// model (strong for cubic terms).
    pub fn new(models: &[IsingModel], schedules: &[ColorSchedule]) -> Result<Self> {
        Self::build(models, schedules, Strength::Strong)
    }

    /// Like [`Layout::new`] but accepts weak colorings, which break exact
    /// Gibbs sampling; used only for negative controls.
    pub fn new_unchecked_weak(models: &[IsingModel], schedules: &[ColorSchedule]) -> Result<Self> {
        Self::build(models, schedules, Strength::Weak)
    }

    fn build(models: &[IsingModel], schedules: &[ColorSchedule], strength: Strength) -> Result<Self> {
        if models.is_empty() || models.len() != schedules.len() {
            return Err(Error::SizeMismatch(format!(
                "{} models and {} schedules",
                models.len(),
                schedules.len()
            )));
        }
        let convention = models[0].convention;
        if models.iter().any(|m| m.convention != convention) {
            return Err(Error::InvalidModel("mixed spin conventions".into()));
        }
        let n = models.iter().map(|m| m.num_spins).max().unwrap();
        let mut padded = Vec::with_capacity(models.len());
        let mut padded_schedules = Vec::with_capacity(models.len());
        for (idx, (m, s)) in models.iter().zip(schedules).enumerate() {
            m.validate()?;
            if !verify_coloring(m, s, strength)? {
                return Err(Error::InvalidModel(format!(
                    "schedule {idx} is not a valid coloring of its model"
                )));
            }
            padded.push(m.padded(n)?);
            padded_schedules.push(s.padded(n));
        }
        let tables = SynapseTables::build(&padded);
        Ok(Layout {
            convention,
            num_pbits: n,
            models: padded,
            schedules: padded_schedules,
            tables,
        })
    }

    /// Same instances and schedules over binary spins.
    pub fn to_binary(&self) -> Result<Layout> {
        if self.convention == Convention::Binary {
            return Err(Error::InvalidConvention("binary"));
        }
        let models = self
            .models
            .iter()
            .map(bipolar_to_binary)
            .collect::<Result<Vec<_>>>()?;
        let tables = SynapseTables::build(&models);
        Ok(Layout {
            convention: Convention::Binary,
            num_pbits: self.num_pbits,
            models,
            schedules: self.schedules.clone(),
            tables,
        })
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn num_pbits(&self) -> usize {
        self.num_pbits
    }

    pub fn num_instances(&self) -> usize {
        self.models.len()
    }

    pub fn model(&self, slot: usize) -> &IsingModel {
        &self.models[slot]
    }

    pub fn schedule(&self, slot: usize) -> &ColorSchedule {
        &self.schedules[slot]
    }

    pub fn tables(&self) -> &SynapseTables<f64> {
        &self.tables
    }
}

#[derive(Clone, Debug)]
struct HardwareTables {
    weights: SynapseTables<i32>,
    saturations: u64,
}

#[derive(Clone, Debug)]
pub struct PbitNetwork {
    layout: Arc<Layout>,
    slot: usize,
    state: Vec<i8>,
    beta: f64,
    rngs: Vec<PbitRng>,
    mode: Mode,
    hardware: Option<HardwareTables>,
    scratch: Vec<i8>,
}

impl PbitNetwork {
    /// Network over instance `slot` of `layout`, with p-bit streams derived
    /// from `seed` and a uniformly random initial state drawn from
    /// `init_seed`.
    pub fn new(layout: Arc<Layout>, slot: usize, beta: f64, seed: u64, init_seed: u64) -> Result<Self> {
        if slot >= layout.num_instances() {
            return Err(Error::IndexOutOfRange {
                index: slot,
                len: layout.num_instances(),
            });
        }
        let n = layout.num_pbits;
        let mut net = PbitNetwork {
            rngs: pbit_streams(seed, n),
            state: vec![0; n],
            scratch: Vec::with_capacity(n),
            layout,
            slot,
            beta,
            mode: Mode::Float,
            hardware: None,
        };
        net.randomize(init_seed);
        Ok(net)
    }

    pub fn standalone(
        model: &IsingModel,
        schedule: &ColorSchedule,
        beta: f64,
        seed: u64,
        init_seed: u64,
    ) -> Result<Self> {
        let layout = Layout::new(std::slice::from_ref(model), std::slice::from_ref(schedule))?;
        PbitNetwork::new(Arc::new(layout), 0, beta, seed, init_seed)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn num_pbits(&self) -> usize {
        self.state.len()
    }

    pub fn convention(&self) -> Convention {
        self.layout.convention
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn schedule(&self) -> &ColorSchedule {
        self.layout.schedule(self.slot)
    }

    pub fn model(&self) -> &IsingModel {
        self.layout.model(self.slot)
    }

    pub fn ground_energy(&self) -> Option<f64> {
        self.model().ground_energy
    }

    /// Spins in the network's own convention.
    pub fn state(&self) -> &[i8] {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut Vec<i8> {
        &mut self.state
    }

    pub fn bipolar_state(&self) -> Vec<i8> {
        let c = self.convention();
        self.state.iter().map(|&s| c.to_bipolar(s)).collect()
    }

    pub fn set_state(&mut self, state: &[i8]) -> Result<()> {
        if state.len() != self.state.len() {
            return Err(Error::SizeMismatch(format!(
                "state of {} spins for {} p-bits",
                state.len(),
                self.state.len()
            )));
        }
        let (lo, hi) = self.spin_values();
        if let Some(bad) = state.iter().find(|&&s| s != lo && s != hi) {
            return Err(Error::InvalidModel(format!(
                "spin value {bad} in {} convention",
                self.convention()
            )));
        }
        self.state.copy_from_slice(state);
        Ok(())
    }

    /// Uniformly random state from a dedicated stream.
    pub fn randomize(&mut self, init_seed: u64) {
        let (lo, hi) = self.spin_values();
        let mut rng = PbitRng::seed_from_u64(init_seed);
        for s in &mut self.state {
            *s = if rng.random::<bool>() { hi } else { lo };
        }
    }

    fn spin_values(&self) -> (i8, i8) {
        match self.convention() {
            Convention::Bipolar => (-1, 1),
            Convention::Binary => (0, 1),
        }
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
        if self.mode == Mode::Hardware {
            self.requantize();
        }
    }

    /// Switches the instance selector. Spins, streams and β are untouched;
    /// only the neighbor, weight and color multiplexers change.
    pub fn select(&mut self, slot: usize) -> Result<()> {
        if slot >= self.layout.num_instances() {
            return Err(Error::IndexOutOfRange {
                index: slot,
                len: self.layout.num_instances(),
            });
        }
        self.slot = slot;
        if self.mode == Mode::Hardware {
            self.requantize();
        }
        Ok(())
    }

    /// Stores round-to-nearest-even s{6}{6} copies of β·(weights, biases)
    /// for the selected instance and switches to hardware mode. A bipolar
    /// network is first converted to binary spins.
    pub fn quantize_hardware(&mut self) -> Result<()> {
        if self.convention() == Convention::Bipolar {
            let binary = self.layout.to_binary()?;
            for s in &mut self.state {
                *s = Convention::Binary.from_bipolar(*s);
            }
            self.layout = Arc::new(binary);
        }
        self.mode = Mode::Hardware;
        self.requantize();
        Ok(())
    }

    fn requantize(&mut self) {
        let beta = self.beta;
        let mut saturations = 0u64;
        let weights = self.layout.tables.extract_slot(self.slot, |w| {
            let (q, sat) = FixedPointWeight::quantize(beta * w);
            saturations += sat as u64;
            q.raw()
        });
        let previous = self.hardware.as_ref().map_or(0, |h| h.saturations);
        self.hardware = Some(HardwareTables {
            weights,
            saturations: previous + saturations,
        });
    }

    /// Weights that hit the s{6}{6} range limit, summed over quantizations.
    pub fn saturation_count(&self) -> u64 {
        self.hardware.as_ref().map_or(0, |h| h.saturations)
    }

    /// Exact input `I_i = Σ J3 s_j s_k + Σ J2 s_j + h_i` in the network's
    /// convention (unscaled by β).
    pub fn synapse(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(float_input(&self.layout.tables, self.slot, &self.state, i))
    }

    /// Hardware accumulator value `β I'_i` in raw 1/64 units.
    pub fn hardware_input(&self, i: usize) -> Result<Option<i32>> {
        self.check_index(i)?;
        Ok(self
            .hardware
            .as_ref()
            .map(|h| hardware_input(&h.weights, &self.state, i)))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.state.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.state.len(),
            });
        }
        Ok(())
    }

    /// Updates p-bit `i` alone from the current state; one stream draw.
    pub fn pbit_update(&mut self, i: usize) -> Result<i8> {
        self.check_index(i)?;
        let kernel = Kernel::select(&self.layout, &self.hardware, self.mode, self.slot, self.beta);
        let s = kernel.next_spin(&self.state, &mut self.rngs[i], i);
        self.state[i] = s;
        Ok(s)
    }

    /// One attempted flip of every p-bit, block by block.
    pub fn sweep(&mut self) {
        let layout = Arc::clone(&self.layout);
        let kernel = Kernel::select(&layout, &self.hardware, self.mode, self.slot, self.beta);
        for block in &layout.schedules[self.slot].blocks {
            self.scratch.clear();
            for &i in block {
                let s = kernel.next_spin(&self.state, &mut self.rngs[i], i);
                self.scratch.push(s);
            }
            for (&i, &s) in block.iter().zip(&self.scratch) {
                self.state[i] = s;
            }
        }
    }

    pub fn sweeps(&mut self, count: usize) {
        for _ in 0..count {
            self.sweep();
        }
    }

    /// [`sweep`](Self::sweep) with each block's p-bits distributed over the
    /// current rayon pool. Bit-identical to the sequential sweep.
    pub fn sweep_parallel(&mut self) {
        let layout = Arc::clone(&self.layout);
        let kernel = Kernel::select(&layout, &self.hardware, self.mode, self.slot, self.beta);
        let schedule = &layout.schedules[self.slot];
        for (color, block) in schedule.blocks.iter().enumerate() {
            let state = &self.state;
            let mut members: Vec<(usize, &mut PbitRng)> = self
                .rngs
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| schedule.color_of[*i] == color)
                .collect();
            debug_assert_eq!(members.len(), block.len());
            let updates: Vec<(usize, i8)> = members
                .par_iter_mut()
                .map(|(i, rng)| (*i, kernel.next_spin(state, rng, *i)))
                .collect();
            for (i, s) in updates {
                self.state[i] = s;
            }
        }
    }

    /// Hamiltonian of the selected instance at the current state, including
    /// its energy offset.
    pub fn energy(&self) -> f64 {
        let t = &self.layout.tables;
        let slot = self.slot;
        let s = &self.state;
        let mut e = self.layout.models[slot].energy_offset;
        for i in 0..s.len() {
            let si = s[i] as f64;
            if si == 0.0 {
                continue;
            }
            // Each term is counted once, at its smallest spin index.
            let mut local = t.bias(i, slot);
            for &(j, w) in t.pairs(i, slot) {
                if j as usize > i {
                    local += w * s[j as usize] as f64;
                }
            }
            for &(j, k, w) in t.triples(i, slot) {
                if j as usize > i && k as usize > i {
                    local += w * (s[j as usize] * s[k as usize]) as f64;
                }
            }
            e -= si * local;
        }
        e
    }

    /// Hands both networks' spin vectors to each other.
    pub fn swap_state(&mut self, other: &mut PbitNetwork) {
        std::mem::swap(&mut self.state, &mut other.state);
    }
}

#[derive(Clone, Copy)]
enum Kernel<'a> {
    Float {
        tables: &'a SynapseTables<f64>,
        slot: usize,
        beta: f64,
        convention: Convention,
    },
    Hardware(&'a SynapseTables<i32>),
}

impl<'a> Kernel<'a> {
    fn select(
        layout: &'a Layout,
        hardware: &'a Option<HardwareTables>,
        mode: Mode,
        slot: usize,
        beta: f64,
    ) -> Self {
        match (hardware, mode) {
            (Some(h), Mode::Hardware) => Kernel::Hardware(&h.weights),
            _ => Kernel::Float {
                tables: &layout.tables,
                slot,
                beta,
                convention: layout.convention,
            },
        }
    }

    #[inline]
    fn next_spin(&self, state: &[i8], rng: &mut PbitRng, i: usize) -> i8 {
        match *self {
            Kernel::Float {
                tables,
                slot,
                beta,
                convention,
            } => {
                let input = float_input(tables, slot, state, i);
                let u = unit_f64(rng);
                match convention {
                    Convention::Bipolar => {
                        if 0.5 + 0.5 * (beta * input).tanh() > u {
                            1
                        } else {
                            -1
                        }
                    }
                    Convention::Binary => (0.5 + 0.5 * (0.5 * beta * input).tanh() > u) as i8,
                }
            }
            Kernel::Hardware(weights) => {
                let acc = hardware_input(weights, state, i);
                ((unit_u32(rng) as u64) < logistic_threshold(acc)) as i8
            }
        }
    }
}

#[inline]
fn float_input(tables: &SynapseTables<f64>, slot: usize, state: &[i8], i: usize) -> f64 {
    let mut acc = tables.bias(i, slot);
    for &(j, w) in tables.pairs(i, slot) {
        acc += w * state[j as usize] as f64;
    }
    for &(j, k, w) in tables.triples(i, slot) {
        acc += w * (state[j as usize] * state[k as usize]) as f64;
    }
    acc
}

/// Integer accumulation over binary spins: pair weights pass when the
/// neighbor bit is 1, cubic weights when both partner bits are 1. Masks
/// replace multiplications.
#[inline]
fn hardware_input(weights: &SynapseTables<i32>, state: &[i8], i: usize) -> i32 {
    let mut acc = weights.bias(i, 0);
    for &(j, w) in weights.pairs(i, 0) {
        acc += w & -(state[j as usize] as i32);
    }
    for &(j, k, w) in weights.triples(i, 0) {
        let gate = (state[j as usize] & state[k as usize]) as i32;
        acc += w & -gate;
    }
    acc
}
