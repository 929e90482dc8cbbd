//! Master graph: many sparse instances multiplexed onto one p-bit set.
//!
//! Every p-bit knows its neighbors and color in every instance ahead of
//! time; selecting an instance only switches those multiplexers. The
//! synaptic fan-in of a p-bit stays bounded by its largest per-instance
//! degree no matter how many instances are housed.

use std::sync::Arc;

use super::{Layout, PbitNetwork};
use crate::coloring::ColorSchedule;
use crate::error::{Error, Result};
use crate::instance::IsingModel;

#[derive(Clone, Debug)]
pub struct MasterGraph {
    layout: Arc<Layout>,
}

pub fn build_master_graph(
    instances: &[IsingModel],
    schedules: &[ColorSchedule],
) -> Result<MasterGraph> {
    if let Some(first) = instances.first() {
        if instances.iter().any(|m| m.order != first.order) {
            return Err(Error::SizeMismatch("instances of mixed order".into()));
        }
    }
    Ok(MasterGraph {
        layout: Arc::new(Layout::new(instances, schedules)?),
    })
}

impl MasterGraph {
    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn num_instances(&self) -> usize {
        self.layout.num_instances()
    }

    pub fn num_pbits(&self) -> usize {
        self.layout.num_pbits()
    }

    /// Phase-shifted clocks needed: the largest color count of any instance.
    pub fn num_phase_blocks(&self) -> usize {
        (0..self.num_instances())
            .map(|s| self.layout.schedule(s).num_colors)
            .max()
            .unwrap_or(0)
    }

    /// Color of p-bit `i` under instance `slot` (the color multiplexer).
    pub fn color(&self, i: usize, slot: usize) -> usize {
        self.layout.schedule(slot).color_of[i]
    }

    /// Largest per-instance fan-in of p-bit `i`.
    pub fn fan_in(&self, i: usize) -> usize {
        (0..self.num_instances())
            .map(|s| self.layout.tables().fan_in(i, s))
            .max()
            .unwrap_or(0)
    }

    /// Distinct potential neighbors of `i` over all instances: the edges of
    /// the dense master graph.
    pub fn potential_neighbors(&self, i: usize) -> Vec<usize> {
        let t = self.layout.tables();
        let mut all: Vec<usize> = (0..self.num_instances())
            .flat_map(|s| {
                t.pairs(i, s)
                    .iter()
                    .map(|e| e.0 as usize)
                    .chain(t.triples(i, s).iter().flat_map(|e| [e.0 as usize, e.1 as usize]))
                    .collect::<Vec<_>>()
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Same master graph over binary spins (for hardware-mode replicas).
    pub fn to_binary(&self) -> Result<MasterGraph> {
        Ok(MasterGraph {
            layout: Arc::new(self.layout.to_binary()?),
        })
    }

    /// Network view with the instance selector set to `idx`.
    pub fn select_instance(&self, idx: usize, beta: f64, seed: u64, init_seed: u64) -> Result<PbitNetwork> {
        PbitNetwork::new(Arc::clone(&self.layout), idx, beta, seed, init_seed)
    }
}
