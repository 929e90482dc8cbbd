//! Statistical checks of the sampler, the solver and the bootstrap.

use pbit_core::apt::{
    preprocess_schedule, run_campaign, solve, AptParams, AptSchedule, Backend, CampaignConfig, SuccessCurve,
};
use pbit_core::benchmark::{optimal_quartile_tts, quantile, sweep_time_report, TimeModel};
use pbit_core::coloring::color_model;
use pbit_core::instance::{bipolar_to_binary, cubicize, generate_3r3x, quadratize};
use pbit_core::sampler::{Mode, PbitRng};
use pbit_core::validate::boltzmann_tv;
use rand::{Rng, SeedableRng};

#[test]
fn hardware_mode_samples_boltzmann_at_non_dyadic_beta() {
    let model = cubicize(&generate_3r3x(6, 3).unwrap());
    let binary = bipolar_to_binary(&model).unwrap();
    let schedule = color_model(&binary);
    for beta in [0.3, 0.7] {
        let hw = boltzmann_tv(&binary, &schedule, beta, 200_000, 1, Mode::Hardware).unwrap();
        let float = boltzmann_tv(&model, &color_model(&model), beta, 200_000, 1, Mode::Float).unwrap();
        assert!(hw < 0.03, "hardware TV {hw} at beta {beta}");
        assert!(float < 0.03, "float TV {float} at beta {beta}");
    }
}

#[test]
fn quadratized_chain_samples_boltzmann() {
    let model = quadratize(&generate_3r3x(4, 11).unwrap());
    let tv = boltzmann_tv(&model, &color_model(&model), 0.5, 200_000, 2, Mode::Float).unwrap();
    assert!(tv < 0.03, "TV {tv}");
}

#[test]
fn solver_finds_planted_ground_states() {
    for order in [2, 3] {
        for seed in 0..5 {
            let inst = generate_3r3x(10, seed).unwrap();
            let model = if order == 3 { cubicize(&inst) } else { quadratize(&inst) };
            let params = AptParams { n_chains: 20, sweeps_per_chain: 300, ..AptParams::default() };
            let schedule = preprocess_schedule(&model, &params, seed).unwrap();
            let out = solve(&model, &schedule, &params, seed + 100).unwrap();
            assert!(out.success, "order {order} seed {seed}");
            assert_eq!(out.best_energy, model.ground_energy.unwrap());
            let spins = &out.best_state[..inst.num_vars];
            assert!(inst.is_satisfied_by(spins));
            assert_eq!(out.energy_trace.len(), out.swap_attempts_used + 1);
        }
    }
}

#[test]
fn hardware_campaign_solves_small_instances() {
    let models: Vec<_> = (0..4).map(|s| cubicize(&generate_3r3x(8, s).unwrap())).collect();
    let params = AptParams { n_chains: 20, sweeps_per_chain: 300, ..AptParams::default() };
    let schedule = preprocess_schedule(&models[0], &params, 1).unwrap();
    for backend in [Backend::Standalone, Backend::Mastergraph] {
        let config = CampaignConfig { backend, mode: Mode::Hardware, runs: 10, params: params.clone() };
        let result = run_campaign(&models, &schedule, &config, 9).unwrap();
        assert!(result.records.iter().all(|r| r.success));
    }
}

/// Curves with `p_i(t) = 1 − (1 − r_i)^t` have a TTS independent of `t`,
/// so the population median TTS is known in closed form.
#[test]
fn bootstrap_intervals_cover_the_population_median() {
    let time = TimeModel::sweeps();
    let tts_of = |r: f64| 100.0 * (0.01f64).ln() / (1.0 - r).ln();
    // r ~ 10^U(−3, −1): the median is 10^−2.
    let truth = tts_of(0.01);
    let experiments = 200;
    let mut rng = PbitRng::seed_from_u64(2024);
    let mut covered = 0;
    for e in 0..experiments {
        let curves: Vec<SuccessCurve> = (0..31)
            .map(|i| {
                let r = 10f64.powf(rng.random_range(-3.0..-1.0));
                SuccessCurve { instance_id: i, p: (1..=4).map(|t| 1.0 - (1.0 - r).powi(t)).collect() }
            })
            .collect();
        let res = optimal_quartile_tts(&curves, 0.5, &time, 100, 400, e).unwrap();
        covered += (res.ci_lo <= truth && truth <= res.ci_hi) as usize;
    }
    let coverage = covered as f64 / experiments as f64;
    assert!((0.88..=0.995).contains(&coverage), "coverage {coverage}");
}

#[test]
fn bootstrap_intervals_contain_the_plug_in_median() {
    let time = TimeModel::sweeps();
    let mut rng = PbitRng::seed_from_u64(7);
    let experiments = 200;
    let mut contained = 0;
    for e in 0..experiments {
        let rs: Vec<f64> = (0..25).map(|_| 10f64.powf(rng.random_range(-3.0..-1.0))).collect();
        let curves: Vec<SuccessCurve> = rs
            .iter()
            .enumerate()
            .map(|(i, &r)| SuccessCurve { instance_id: i, p: vec![r] })
            .collect();
        let mut tts: Vec<f64> = rs.iter().map(|&r| 100.0 * (0.01f64).ln() / (1.0 - r).ln()).collect();
        let plug_in = quantile(&mut tts, 0.5);
        let res = optimal_quartile_tts(&curves, 0.5, &time, 100, 400, e).unwrap();
        contained += (res.ci_lo <= plug_in && plug_in <= res.ci_hi) as usize;
    }
    assert!(contained as f64 >= 0.95 * experiments as f64, "{contained} of {experiments}");
}

/// Hardware and float modes at n = 32 agree within binomial error at 1000
/// runs per instance.
#[test]
fn hardware_and_float_success_rates_agree() {
    let runs = 1000;
    let models: Vec<_> = (0..2).map(|s| quadratize(&generate_3r3x(16, 40 + s).unwrap())).collect();
    let params = AptParams { max_swap_attempts: 30, ..AptParams::default() };
    let schedule = preprocess_schedule(&models[0], &params, 5).unwrap();
    let curves: Vec<_> = [Mode::Float, Mode::Hardware]
        .into_iter()
        .map(|mode| {
            let config = CampaignConfig { backend: Backend::Standalone, mode, runs, params: params.clone() };
            run_campaign(&models, &schedule, &config, 6).unwrap().success_curves()
        })
        .collect();
    for i in 0..models.len() {
        for t_f in [1, 3, 10, 30] {
            let (a, b) = (curves[0][i].at(t_f), curves[1][i].at(t_f));
            let p = (a + b) / 2.0;
            let sigma = (2.0 * p * (1.0 - p) / runs as f64).sqrt();
            assert!((a - b).abs() <= 3.0 * sigma + 1e-12, "instance {i} t_f {t_f}: float {a} hardware {b}");
        }
    }
}

#[test]
fn adaptive_ladder_equalizes_pair_acceptance() {
    let mut model = quadratize(&generate_3r3x(40, 12).unwrap());
    let schedule = preprocess_schedule(&model, &AptParams::default(), 13).unwrap();
    model.ground_energy = Some(-1e6);
    let params = AptParams { max_swap_attempts: 2000, ..AptParams::default() };
    let out = solve(&model, &schedule, &params, 14).unwrap();
    let rates = out.acceptance_rates();
    eprintln!("{} rungs, acceptance {rates:.3?}", schedule.num_replicas());
    let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rates.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 3.0, "{rates:?}");
}

/// A colder extra rung does not lower success at a fixed horizon.
#[test]
fn extending_the_ladder_does_not_hurt() {
    let models: Vec<_> = (0..8).map(|s| cubicize(&generate_3r3x(14, 60 + s).unwrap())).collect();
    let params = AptParams { max_swap_attempts: 10, ..AptParams::default() };
    let base = preprocess_schedule(&models[0], &params, 2).unwrap();
    let mut betas = base.betas().to_vec();
    betas.push(betas[betas.len() - 1] + 1.0);
    let extended = AptSchedule::new(betas).unwrap();
    let runs = 300;
    let mean_at = |schedule: &AptSchedule| {
        let config = CampaignConfig { backend: Backend::Standalone, mode: Mode::Float, runs, params: params.clone() };
        let curves = run_campaign(&models, schedule, &config, 3).unwrap().success_curves();
        curves.iter().map(|c| c.at(5)).sum::<f64>() / curves.len() as f64
    };
    let (a, b) = (mean_at(&base), mean_at(&extended));
    let sigma = (2.0 * a * (1.0 - a) / (runs * models.len()) as f64).sqrt();
    eprintln!("base {a:.3} extended {b:.3} sigma {sigma:.3}");
    assert!(b >= a - 3.0 * sigma, "base {a} extended {b}");
}

#[test]
fn software_sweep_time_grows_with_size() {
    let rows = sweep_time_report(2, Backend::Standalone, &[16, 112], 10_000, 0).unwrap();
    assert!(rows[1].software_seconds > rows[0].software_seconds);
    assert!(rows.iter().all(|r| r.fpga_seconds == 66.67e-9));
}
