use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use pbit_core::apt::{
    pick_schedule_instance, preprocess_schedule, run_campaign, AptParams, AptSchedule, CampaignConfig,
};
use pbit_core::benchmark::{emit_report, render_pcurves, sweep_time_report, ReportConfig, SizeCurves, TimeMode, TimeModel};
use pbit_core::coloring::color_model;
use pbit_core::instance::{
    cubicize, generate_3r3x, ground_energy_gf2, quadratize, read_instance, write_instance, IsingModel, ProblemSize,
    XorsatInstance,
};
use pbit_core::seed::{derive, Stream};
use pbit_core::validate::{run_suite, SuiteOptions};
use serde_json::json;

use crate::args::{
    AptArgs, BenchmarkArgs, CampaignArgs, GenerateArgs, OrderArg, PreprocessArgs, SolveArgs, SweepTimeArgs,
    ValidateArgs,
};
use crate::manifest::{hash_files, prepare_out_dir, RunManifest};

pub const INSTANCE_EXT: &str = "3r3x";

/// Everything a command needs besides its own arguments.
pub struct RunContext {
    pub argv: Vec<String>,
    pub workers: usize,
}

pub fn generate(args: &GenerateArgs, ctx: &RunContext) -> Result<()> {
    prepare_out_dir(&args.out, args.force)?;
    let k = args.vars as usize;
    let mut manifest = RunManifest::new("generate", ctx.argv.clone(), ctx.workers)?;
    let mut files = Vec::new();
    for i in 0..args.count {
        let inst = generate_3r3x(k, derive(args.seed, Stream::Generation, &[k as u64, i as u64]))?;
        let name = format!("k{k:03}_{i:04}.{INSTANCE_EXT}");
        write_instance(&inst, args.out.join(&name))?;
        files.push(name);
    }
    manifest.params = json!({ "vars": k, "count": args.count });
    manifest.seeds.insert("master".into(), args.seed);
    manifest.note("problem_size", ProblemSize::from_vars(k).0);
    manifest.note("files", files);
    manifest.finish(&args.out)
}

pub fn load_instances(dir: &Path) -> Result<Vec<(PathBuf, XorsatInstance)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == INSTANCE_EXT))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .{INSTANCE_EXT} instances in {}", dir.display());
    }
    let instances = paths
        .into_iter()
        .map(|p| {
            let inst = read_instance(&p)?;
            Ok((p, inst))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = instances[0].1.num_vars;
    if let Some((p, _)) = instances.iter().find(|(_, i)| i.num_vars != k) {
        bail!("{} has a different size than the rest of {}", p.display(), dir.display());
    }
    Ok(instances)
}

/// Encodes an instance, checking its ground energy with GF(2) elimination.
pub fn encode(inst: &XorsatInstance, order: OrderArg) -> Result<IsingModel> {
    let sol = ground_energy_gf2(inst);
    if !sol.satisfiable {
        bail!("instance with seed {} is unsatisfiable; ground energy unknown", inst.seed);
    }
    Ok(match order {
        OrderArg::Second => quadratize(inst),
        OrderArg::Third => cubicize(inst),
    })
}

pub fn apt_params(args: &AptArgs) -> Result<AptParams> {
    let mut p = match &args.params {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            AptParams::from_json(&text)?
        }
        None => AptParams::default(),
    };
    if let Some(v) = args.n_chains {
        p.n_chains = v;
    }
    if let Some(v) = args.sweeps_per_chain {
        p.sweeps_per_chain = v;
    }
    if let Some(v) = args.sweeps_per_swap {
        p.sweeps_per_swap = v;
    }
    if let Some(v) = args.max_swaps {
        p.max_swap_attempts = v;
    }
    p.validate()?;
    Ok(p)
}

fn schedule_seed(seed: u64, order: OrderArg, k: usize) -> u64 {
    derive(seed, Stream::Schedule, &[order.value() as u64, k as u64])
}

/// Ladder from the seeded pick among `instances`.
fn build_schedule(
    instances: &[(PathBuf, XorsatInstance)],
    order: OrderArg,
    params: &AptParams,
    seed: u64,
) -> Result<(AptSchedule, usize)> {
    let pick = pick_schedule_instance(instances.len(), seed);
    let inst = &instances[pick].1;
    let model = encode(inst, order)?;
    let schedule = preprocess_schedule(&model, params, schedule_seed(seed, order, inst.num_vars))?;
    Ok((schedule, pick))
}

pub fn preprocess(args: &PreprocessArgs, ctx: &RunContext) -> Result<()> {
    let instances = load_instances(&args.input)?;
    let params = apt_params(&args.apt)?;
    prepare_out_dir(&args.out, args.force)?;
    let mut manifest = RunManifest::new("preprocess", ctx.argv.clone(), ctx.workers)?;
    let (schedule, pick) = build_schedule(&instances, args.order, &params, args.seed)?;
    schedule.write_json(args.out.join("schedule.json"))?;
    manifest.params = json!({ "order": args.order.value(), "apt": params });
    manifest.seeds.insert("master".into(), args.seed);
    manifest.inputs = hash_files(&[instances[pick].0.clone()])?;
    manifest.note("picked_instance", instances[pick].0.display().to_string());
    manifest.note("num_replicas", schedule.num_replicas());
    manifest.finish(&args.out)
}

struct SizeRun {
    curves: SizeCurves,
    outcomes_csv: Vec<u8>,
    schedule: AptSchedule,
    notes: serde_json::Value,
    inputs: Vec<PathBuf>,
}

fn run_size(
    dir: &Path,
    order: OrderArg,
    args: &CampaignArgs,
    params: &AptParams,
    fixed_schedule: Option<&AptSchedule>,
) -> Result<SizeRun> {
    let instances = load_instances(dir)?;
    let k = instances[0].1.num_vars;
    let n = ProblemSize::from_vars(k).0;
    let models: Vec<IsingModel> = instances
        .iter()
        .map(|(_, i)| encode(i, order))
        .collect::<Result<_>>()?;
    let (schedule, pick) = match fixed_schedule {
        Some(s) => (s.clone(), None),
        None => {
            let (s, p) = build_schedule(&instances, order, params, args.seed)?;
            (s, Some(p))
        }
    };
    let config = CampaignConfig {
        backend: args.backend.into(),
        mode: args.mode.into(),
        runs: args.runs,
        params: params.clone(),
    };
    let seed = derive(args.seed, Stream::Replicas, &[order.value() as u64, k as u64]);
    let start = Instant::now();
    let result = run_campaign(&models, &schedule, &config, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let total_sweeps: u64 = result.records.iter().map(|r| r.sweeps_used).sum();
    let mut outcomes_csv = Vec::new();
    result.write_csv(&mut outcomes_csv)?;
    let max_colors = models.iter().map(|m| color_model(m).num_colors).max().unwrap_or(0);
    let notes = json!({
        "order": order.value(),
        "n": n,
        "k": k,
        "num_pbits": models[0].num_spins,
        "num_instances": models.len(),
        "num_replicas": schedule.num_replicas(),
        "betas": schedule.betas(),
        "max_colors": max_colors,
        "schedule_instance": pick.map(|p| instances[p].0.display().to_string()),
        "solved_runs": result.records.iter().filter(|r| r.success).count(),
    });
    Ok(SizeRun {
        curves: SizeCurves {
            order: order.value(),
            n,
            curves: result.success_curves(),
            sweep_time: (total_sweeps > 0).then(|| elapsed / total_sweeps as f64),
        },
        outcomes_csv,
        schedule,
        notes,
        inputs: instances.into_iter().map(|(p, _)| p).collect(),
    })
}

fn campaign_manifest(
    command: &str,
    ctx: &RunContext,
    args: &CampaignArgs,
    params: &AptParams,
    extra: serde_json::Value,
) -> Result<RunManifest> {
    let mut m = RunManifest::new(command, ctx.argv.clone(), ctx.workers)?;
    m.params = json!({
        "backend": format!("{:?}", args.backend).to_lowercase(),
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "runs": args.runs,
        "apt": params,
        "schedule_file": args.schedule.as_ref().map(|p| p.display().to_string()),
        "extra": extra,
    });
    m.seeds.insert("master".into(), args.seed);
    Ok(m)
}

fn load_fixed_schedule(args: &CampaignArgs) -> Result<Option<AptSchedule>> {
    args.schedule
        .as_ref()
        .map(|p| AptSchedule::read_json(p).with_context(|| format!("reading schedule {}", p.display())))
        .transpose()
}

pub fn solve(args: &SolveArgs, ctx: &RunContext) -> Result<()> {
    let c = &args.campaign;
    let params = apt_params(&c.apt)?;
    let fixed = load_fixed_schedule(c)?;
    prepare_out_dir(&c.out, c.force)?;
    let mut manifest = campaign_manifest("solve", ctx, c, &params, json!({ "order": args.order.value() }))?;
    let mut run = run_size(&args.input, args.order, c, &params, fixed.as_ref())?;
    run.curves.sweep_time = None;
    fs::write(c.out.join("outcomes.csv"), &run.outcomes_csv)?;
    run.schedule.write_json(c.out.join("schedule.json"))?;
    fs::write(c.out.join("pcurves.csv"), render_pcurves(std::slice::from_ref(&run.curves)))?;
    let mut inputs = run.inputs.clone();
    inputs.extend(c.schedule.clone());
    manifest.inputs = hash_files(&inputs)?;
    manifest.note("size", run.notes);
    manifest.finish(&c.out)
}

pub fn benchmark(args: &BenchmarkArgs, ctx: &RunContext) -> Result<()> {
    let c = &args.campaign;
    let params = apt_params(&c.apt)?;
    let fixed = load_fixed_schedule(c)?;
    prepare_out_dir(&c.out, c.force)?;
    let time_model = match TimeMode::from(args.time_model) {
        TimeMode::Fpga => TimeModel::fpga(),
        TimeMode::Sweeps => TimeModel::sweeps(),
        TimeMode::Wallclock => TimeModel::wallclock(1.0),
    };
    let mut manifest = campaign_manifest(
        "benchmark",
        ctx,
        c,
        &params,
        json!({
            "orders": args.order.iter().map(|o| o.value()).collect::<Vec<_>>(),
            "time_model": time_model,
            "bootstrap": args.bootstrap,
        }),
    )?;
    let mut sizes = Vec::new();
    let mut notes = Vec::new();
    let mut inputs = Vec::new();
    for &order in &args.order {
        for dir in &args.input {
            let mut run = run_size(dir, order, c, &params, fixed.as_ref())?;
            if time_model.mode != TimeMode::Wallclock {
                run.curves.sweep_time = None;
            }
            let tag = format!("o{}_n{:03}", order.value(), run.curves.n);
            fs::write(c.out.join(format!("outcomes_{tag}.csv")), &run.outcomes_csv)?;
            run.schedule.write_json(c.out.join(format!("schedule_{tag}.json")))?;
            notes.push(run.notes);
            inputs.extend(run.inputs);
            sizes.push(run.curves);
        }
    }
    let cfg = ReportConfig {
        bootstrap_n: args.bootstrap,
        ..ReportConfig::new(time_model, params.sweeps_per_swap, derive(c.seed, Stream::Bootstrap, &[]))
    };
    let report = emit_report(&sizes, &cfg, &c.out)?;
    inputs.sort();
    inputs.dedup();
    inputs.extend(c.schedule.clone());
    manifest.inputs = hash_files(&inputs)?;
    manifest.note("sizes", notes);
    manifest.note(
        "fits",
        report
            .fits
            .iter()
            .map(|f| json!({ "order": f.order, "q": f.fit.q, "gamma": f.fit.gamma_display(), "eta": f.fit.eta_display(), "r_squared": f.fit.r_squared }))
            .collect::<Vec<_>>(),
    );
    manifest.finish(&c.out)
}

/// Returns whether every suite passed.
pub fn validate(args: &ValidateArgs) -> Result<bool> {
    let opts = SuiteOptions {
        samples: args.samples,
        seed: args.seed,
        ..SuiteOptions::default()
    };
    let reports = args
        .suite
        .suites()
        .into_iter()
        .map(|s| run_suite(s, &opts))
        .collect::<pbit_core::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed());
    let summary = json!({ "passed": passed, "suites": reports });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(passed)
}

pub fn sweep_time(args: &SweepTimeArgs) -> Result<()> {
    let rows = sweep_time_report(args.order.value(), args.backend.into(), &args.sizes, args.sweeps, args.seed)?;
    println!("n,software_seconds,fpga_seconds");
    for r in rows {
        println!("{},{:e},{:e}", r.n, r.software_seconds, r.fpga_seconds);
    }
    Ok(())
}
