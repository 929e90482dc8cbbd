//! Fixtures for the criterion benches: seeded networks at a given size.

use pbit_core::apt::Backend;
use pbit_core::coloring::color_model;
use pbit_core::instance::{bipolar_to_binary, cubicize, generate_3r3x, quadratize};
use pbit_core::sampler::{build_master_graph, Mode, PbitNetwork};
use pbit_core::{IsingModel, Result};

/// Instances packed into the master graph for the multiplexed fixture.
pub const MASTER_INSTANCES: usize = 8;

pub fn model(order: u8, k: usize, seed: u64) -> Result<IsingModel> {
    let inst = generate_3r3x(k, seed)?;
    Ok(if order == 3 { cubicize(&inst) } else { quadratize(&inst) })
}

/// A network at inverse temperature 1 over instance seed 0.
pub fn network(order: u8, k: usize, mode: Mode, backend: Backend) -> Result<PbitNetwork> {
    let mut net = match backend {
        Backend::Standalone => {
            let m = model(order, k, 0)?;
            let m = if mode == Mode::Hardware { bipolar_to_binary(&m)? } else { m };
            PbitNetwork::standalone(&m, &color_model(&m), 1.0, 1, 2)?
        }
        Backend::Mastergraph => {
            let models = (0..MASTER_INSTANCES as u64)
                .map(|s| model(order, k, s))
                .collect::<Result<Vec<_>>>()?;
            let schedules: Vec<_> = models.iter().map(color_model).collect();
            let mut graph = build_master_graph(&models, &schedules)?;
            if mode == Mode::Hardware {
                graph = graph.to_binary()?;
            }
            graph.select_instance(0, 1.0, 1, 2)?
        }
    };
    if mode == Mode::Hardware {
        net.quantize_hardware()?;
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build_in_every_configuration() {
        for order in [2, 3] {
            for mode in [Mode::Float, Mode::Hardware] {
                for backend in [Backend::Standalone, Backend::Mastergraph] {
                    let mut net = network(order, 8, mode, backend).unwrap();
                    net.sweeps(3);
                    assert_eq!(net.mode(), mode);
                    assert_eq!(net.num_pbits(), if order == 3 { 8 } else { 16 });
                }
            }
        }
    }
}
