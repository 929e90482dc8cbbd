//! Time-to-solution analysis.
//!
//! `TTS_i(t_f) = wall(t_f) · ln(0.01) / ln(1 − p_i(t_f)) / f_p`. For every
//! `t_f` the q-quantile of `TTS_i(t_f)` across instances is bootstrapped; the
//! bootstrap mean is `⟨TTS(t_f)⟩_q` and its minimum over `t_f` is the optimal
//! `⟨TTS⟩_q`. Scaling is fitted as `log10 ⟨TTS⟩_q = γ n + η`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::apt::{Backend, SuccessCurve};
use crate::coloring::color_model;
use crate::error::{Error, Result};
use crate::instance::{cubicize, generate_3r3x, quadratize, IsingModel, ProblemSize};
use crate::sampler::{build_master_graph, PbitNetwork, PbitRng};
use crate::seed::{derive, Stream};

/// Modeled FPGA sweep time: one 15 MHz clock cycle per sweep.
pub const FPGA_SWEEP_SECONDS: f64 = 66.67e-9;
/// Sweeps charged per replica swap on the modeled hardware.
pub const SWAP_OVERHEAD_SWEEPS: f64 = 2.0;
pub const DEFAULT_BOOTSTRAP: usize = 1000;
pub const QUARTILES: [f64; 3] = [0.25, 0.5, 0.75];

/// Reference scaling constants of the FPGA p-computer per quartile, as
/// `(q, γ, γ_se, η, η_se)`.
pub const REFERENCE_SECOND_ORDER: [(f64, f64, f64, f64, f64); 3] = [
    (0.25, 0.0194, 0.0001, -3.70, 0.04),
    (0.5, 0.0206, 0.0002, -3.76, 0.06),
    (0.75, 0.0210, 0.0003, -3.74, 0.02),
];
pub const REFERENCE_THIRD_ORDER: [(f64, f64, f64, f64, f64); 3] = [
    (0.25, 0.0182, 0.0006, -4.13, 0.06),
    (0.5, 0.0201, 0.0002, -4.30, 0.00),
    (0.75, 0.0202, 0.0001, -4.23, 0.01),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeMode {
    /// Measured seconds per sweep on this machine.
    Wallclock,
    /// Constant modeled hardware sweep time plus swap overhead.
    Fpga,
    /// Unit sweep time: TTS counts sweeps per replica.
    Sweeps,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    pub mode: TimeMode,
    pub sweep_time: f64,
    pub swap_overhead_sweeps: f64,
    pub f_p: f64,
}

impl TimeModel {
    pub fn fpga() -> Self {
        TimeModel {
            mode: TimeMode::Fpga,
            sweep_time: FPGA_SWEEP_SECONDS,
            swap_overhead_sweeps: SWAP_OVERHEAD_SWEEPS,
            f_p: 1.0,
        }
    }

    pub fn sweeps() -> Self {
        TimeModel {
            mode: TimeMode::Sweeps,
            sweep_time: 1.0,
            swap_overhead_sweeps: 0.0,
            f_p: 1.0,
        }
    }

    pub fn wallclock(seconds_per_sweep: f64) -> Self {
        TimeModel {
            mode: TimeMode::Wallclock,
            sweep_time: seconds_per_sweep,
            swap_overhead_sweeps: 0.0,
            f_p: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.sweep_time) || !ok(self.f_p) || self.swap_overhead_sweeps.is_nan() || self.swap_overhead_sweeps < 0.0 {
            return Err(Error::InvalidParams(
                "sweep_time and f_p must be positive, swap overhead non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Duration of `t_f` swap attempts of `sweeps_per_swap` sweeps each.
    pub fn wall_time(&self, t_f: usize, sweeps_per_swap: usize) -> f64 {
        t_f as f64 * (sweeps_per_swap as f64 + self.swap_overhead_sweeps) * self.sweep_time
    }

    pub fn unit(&self) -> &'static str {
        match self.mode {
            TimeMode::Sweeps => "sweeps",
            _ => "seconds",
        }
    }
}

/// `None` when `p ≤ 0` (the instance is excluded at this `t_f`); `p ≥ 1`
/// clamps the repetition factor to one.
pub fn tts_point(t_f: usize, p: f64, time: &TimeModel, sweeps_per_swap: usize) -> Option<f64> {
    if p.is_nan() || p <= 0.0 {
        return None;
    }
    let wall = time.wall_time(t_f, sweeps_per_swap);
    let ratio = if p >= 1.0 { 1.0 } else { (0.01f64).ln() / (1.0 - p).ln() };
    Some(wall * ratio / time.f_p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TtsCurve {
    pub instance_id: usize,
    /// `(t_f, TTS_i(t_f))`, `None` where the instance is still unsolved.
    pub points: Vec<(usize, Option<f64>)>,
}

pub fn tts_curve(curve: &SuccessCurve, time: &TimeModel, sweeps_per_swap: usize) -> TtsCurve {
    TtsCurve {
        instance_id: curve.instance_id,
        points: curve
            .p
            .iter()
            .enumerate()
            .map(|(i, &p)| (i + 1, tts_point(i + 1, p, time, sweeps_per_swap)))
            .collect(),
    }
}

/// Linear-interpolation (type 7) quantile of `values`, sorted in place.
/// Infinite values sort last and propagate when they carry weight.
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let h = (values.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(values.len() - 1);
    interpolate(values[lo], values[hi], h - lo as f64)
}

fn interpolate(lo: f64, hi: f64, frac: f64) -> f64 {
    if frac == 0.0 || lo == hi {
        lo
    } else {
        lo + frac * (hi - lo)
    }
}

/// Quantile of the multiset where sorted value `j` appears `counts[order[j]]`
/// times, `total` elements in all.
fn weighted_quantile(sorted: &[(f64, usize)], counts: &[u32], total: usize, q: f64) -> f64 {
    let h = (total - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let mut cum = 0usize;
    let mut x_lo = None;
    for &(v, idx) in sorted {
        cum += counts[idx] as usize;
        if x_lo.is_none() && cum > lo {
            x_lo = Some(v);
        }
        if cum > lo + 1 || (frac == 0.0 && x_lo.is_some()) {
            return interpolate(x_lo.unwrap(), v, frac);
        }
    }
    x_lo.expect("counts sum to total")
}

/// Shared bootstrap resamples: `counts[b][i]` is how often instance `i` is
/// drawn in resample `b`.
pub fn bootstrap_counts(instances: usize, resamples: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = PbitRng::seed_from_u64(seed);
    (0..resamples)
        .map(|_| {
            let mut c = vec![0u32; instances];
            for _ in 0..instances {
                c[rng.random_range(0..instances)] += 1;
            }
            c
        })
        .collect()
}

/// Mean of `p_i(t_f)` over instances with a 95% percentile bootstrap
/// interval from resampling instances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSuccess {
    pub t_f: usize,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn mean_success_probability(
    curves: &[SuccessCurve],
    t_f: usize,
    bootstrap_n: usize,
    seed: u64,
) -> Result<MeanSuccess> {
    if curves.is_empty() || bootstrap_n == 0 {
        return Err(Error::NoData("mean success needs instances and resamples".into()));
    }
    if t_f == 0 || curves.iter().any(|c| c.p.len() < t_f) {
        return Err(Error::InvalidParams(format!("t_f = {t_f} outside the recorded horizon")));
    }
    let p: Vec<f64> = curves.iter().map(|c| c.at(t_f)).collect();
    let m = p.len() as f64;
    let mut means: Vec<f64> = bootstrap_counts(p.len(), bootstrap_n, seed)
        .iter()
        .map(|c| c.iter().zip(&p).map(|(&k, &x)| k as f64 * x).sum::<f64>() / m)
        .collect();
    Ok(MeanSuccess {
        t_f,
        mean: p.iter().sum::<f64>() / m,
        ci_lo: quantile(&mut means, 0.025),
        ci_hi: quantile(&mut means, 0.975),
    })
}

/// Mean computed around the first sample, exact when all samples agree.
fn shifted_mean(xs: &[f64]) -> f64 {
    if xs.iter().any(|x| x.is_infinite()) {
        return f64::INFINITY;
    }
    let x0 = xs[0];
    x0 + xs.iter().map(|x| x - x0).sum::<f64>() / xs.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileTts {
    pub q: f64,
    pub tts: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub t_f_opt: usize,
}

/// Run lengths where some instance's success probability changes. Between
/// two of them every `TTS_i` grows linearly in `t_f`, so the optimum always
/// sits on one.
pub fn change_points(curves: &[SuccessCurve]) -> Vec<usize> {
    let len = curves.first().map_or(0, |c| c.p.len());
    (1..=len)
        .filter(|&t| t == 1 || curves.iter().any(|c| c.p[t - 1] != c.p[t - 2]))
        .collect()
}

fn tts_values(curves: &[SuccessCurve], t_f: usize, time: &TimeModel, sps: usize) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = curves
        .iter()
        .enumerate()
        .map(|(i, c)| (tts_point(t_f, c.at(t_f), time, sps).unwrap_or(f64::INFINITY), i))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    v
}

/// Optimal bootstrapped q-quantile TTS with its 95% percentile interval.
///
/// Unsolved instances count as infinite TTS, so a quantile stays infinite
/// until enough instances are solved. `seed` fixes the resamples, which
/// are shared across `t_f` and across `q`.
pub fn optimal_quartile_tts(
    curves: &[SuccessCurve],
    q: f64,
    time: &TimeModel,
    sweeps_per_swap: usize,
    bootstrap_n: usize,
    seed: u64,
) -> Result<QuantileTts> {
    time.validate()?;
    if !(0.0..=1.0).contains(&q) || bootstrap_n == 0 || sweeps_per_swap == 0 {
        return Err(Error::InvalidParams(
            "q must lie in [0, 1]; bootstrap_n and sweeps_per_swap must be positive".into(),
        ));
    }
    if curves.len() < 2 {
        return Err(Error::NoData(format!("{} instance curves, need at least 2", curves.len())));
    }
    let len = curves[0].p.len();
    if len == 0 || curves.iter().any(|c| c.p.len() != len) {
        return Err(Error::SizeMismatch("success curves of unequal or zero length".into()));
    }
    let m = curves.len();
    let counts = bootstrap_counts(m, bootstrap_n, seed);
    let resample_quantiles = |t_f: usize| -> Vec<f64> {
        let sorted = tts_values(curves, t_f, time, sweeps_per_swap);
        counts.iter().map(|c| weighted_quantile(&sorted, c, m, q)).collect()
    };
    let means: Vec<(usize, f64)> = change_points(curves)
        .into_par_iter()
        .map(|t_f| {
            (t_f, shifted_mean(&resample_quantiles(t_f)))
        })
        .collect();
    let (t_f_opt, tts) = means
        .into_iter()
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    if !tts.is_finite() {
        return Err(Error::NoData(format!("quantile {q} never solved within the horizon")));
    }
    let mut qs = resample_quantiles(t_f_opt);
    let ci_lo = quantile(&mut qs, 0.025);
    let ci_hi = quantile(&mut qs, 0.975);
    Ok(QuantileTts { q, tts, ci_lo, ci_hi, t_f_opt })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub q: f64,
    pub gamma: f64,
    pub eta: f64,
    pub gamma_se: f64,
    pub eta_se: f64,
    pub cov_gamma_eta: f64,
    pub r_squared: f64,
    pub num_points: usize,
}

impl ScalingFit {
    /// Two-sided confidence interval on γ from the Student t law with
    /// `num_points − 2` degrees of freedom.
    pub fn gamma_ci(&self, level: f64) -> (f64, f64) {
        let dof = (self.num_points - 2).max(1) as f64;
        let t = StudentsT::new(0.0, 1.0, dof)
            .map(|d| d.inverse_cdf(0.5 + level / 2.0))
            .unwrap_or(f64::INFINITY);
        (self.gamma - t * self.gamma_se, self.gamma + t * self.gamma_se)
    }

    /// Whether the two fits' γ intervals at `level` overlap.
    pub fn gamma_agrees(&self, other: &ScalingFit, level: f64) -> bool {
        let (a_lo, a_hi) = self.gamma_ci(level);
        let (b_lo, b_hi) = other.gamma_ci(level);
        a_lo <= b_hi && b_lo <= a_hi
    }

    pub fn gamma_display(&self) -> String {
        format_paren(self.gamma, self.gamma_se)
    }

    pub fn eta_display(&self) -> String {
        format_paren(self.eta, self.eta_se)
    }
}

/// Ordinary least squares of `log10 TTS` on `n`.
pub fn fit_scaling(points: &[(usize, f64)], q: f64) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} sizes, need at least 3", points.len())));
    }
    if points.iter().any(|&(_, t)| !(t.is_finite() && t > 0.0)) {
        return Err(Error::DegenerateFit("TTS values must be positive and finite".into()));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.log10()).collect();
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let gamma = sxy / sxx;
    let eta = y_mean - gamma * x_mean;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - gamma * x - eta).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let s2 = ssr / (k - 2.0);
    Ok(ScalingFit {
        q,
        gamma,
        eta,
        gamma_se: (s2 / sxx).sqrt(),
        eta_se: (s2 * (1.0 / k + x_mean * x_mean / sxx)).sqrt(),
        cov_gamma_eta: -x_mean * s2 / sxx,
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy },
        num_points: points.len(),
    })
}

/// `value(d)` where `d` is the standard error in units of the last shown
/// digit, rounded to one significant digit: `0.0206(2)`, `-3.76(6)`.
/// A zero error keeps four decimals.
pub fn format_paren(value: f64, se: f64) -> String {
    if !se.is_finite() || se <= 0.0 {
        return format!("{value:.4}(0)");
    }
    let mut decimals = (-se.log10().floor()).max(0.0) as usize;
    let mut digit = (se * 10f64.powi(decimals as i32)).round();
    if digit >= 10.0 && decimals > 0 {
        decimals -= 1;
        digit = (se * 10f64.powi(decimals as i32)).round();
    }
    format!("{value:.decimals$}({digit})")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTimeRow {
    pub n: usize,
    pub software_seconds: f64,
    pub fpga_seconds: f64,
}

/// Mean wall-clock seconds per sweep of the software sampler at each size,
/// beside the constant modeled hardware sweep time. Sizes are on the
/// problem-size axis `n = 2k`.
pub fn sweep_time_report(
    order: u8,
    backend: Backend,
    sizes: &[usize],
    sweeps: usize,
    seed: u64,
) -> Result<Vec<SweepTimeRow>> {
    if sweeps == 0 {
        return Err(Error::InvalidParams("sweeps must be positive".into()));
    }
    sizes
        .iter()
        .map(|&n| {
            let k = ProblemSize(n).num_vars();
            let count = match backend {
                Backend::Standalone => 1,
                Backend::Mastergraph => 10,
            };
            let models: Vec<IsingModel> = (0..count as u64)
                .map(|i| -> Result<IsingModel> {
                    let inst = generate_3r3x(k, derive(seed, Stream::Generation, &[n as u64, i]))?;
                    match order {
                        2 => Ok(quadratize(&inst)),
                        3 => Ok(cubicize(&inst)),
                        o => Err(Error::InvalidParams(format!("order must be 2 or 3, got {o}"))),
                    }
                })
                .collect::<Result<_>>()?;
            let colorings: Vec<_> = models.iter().map(color_model).collect();
            let mut net = match backend {
                Backend::Standalone => PbitNetwork::standalone(&models[0], &colorings[0], 1.0, seed, seed)?,
                Backend::Mastergraph => build_master_graph(&models, &colorings)?.select_instance(0, 1.0, seed, seed)?,
            };
            net.sweeps(sweeps.min(100));
            let start = Instant::now();
            net.sweeps(sweeps);
            Ok(SweepTimeRow {
                n,
                software_seconds: start.elapsed().as_secs_f64() / sweeps as f64,
                fpga_seconds: FPGA_SWEEP_SECONDS,
            })
        })
        .collect()
}

/// Success curves of every instance at one size and order.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeCurves {
    pub order: u8,
    pub n: usize,
    pub curves: Vec<SuccessCurve>,
    /// Measured seconds per sweep at this size, replacing the time model's
    /// sweep time.
    pub sweep_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub quantiles: Vec<f64>,
    pub time_model: TimeModel,
    pub sweeps_per_swap: usize,
    pub bootstrap_n: usize,
    pub seed: u64,
}

impl ReportConfig {
    pub fn new(time_model: TimeModel, sweeps_per_swap: usize, seed: u64) -> Self {
        ReportConfig {
            quantiles: QUARTILES.to_vec(),
            time_model,
            sweeps_per_swap,
            bootstrap_n: DEFAULT_BOOTSTRAP,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsRow {
    pub order: u8,
    pub n: usize,
    pub result: QuantileTts,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub order: u8,
    pub fit: ScalingFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub tts: Vec<TtsRow>,
    pub fits: Vec<FitRow>,
}

impl BenchReport {
    pub fn tts_at(&self, order: u8, n: usize, q: f64) -> Option<&QuantileTts> {
        self.tts
            .iter()
            .find(|r| r.order == order && r.n == n && r.result.q == q)
            .map(|r| &r.result)
    }

    pub fn fit(&self, order: u8, q: f64) -> Option<&ScalingFit> {
        self.fits.iter().find(|f| f.order == order && f.fit.q == q).map(|f| &f.fit)
    }
}

/// Optimal quantile TTS per (order, size, q) and a scaling fit per
/// (order, q) wherever at least three sizes are available. Each size uses
/// one set of resamples for all quantiles, so quartiles stay ordered.
pub fn analyze(sizes: &[SizeCurves], cfg: &ReportConfig) -> Result<BenchReport> {
    if sizes.is_empty() || sizes.iter().all(|s| s.curves.is_empty()) {
        return Err(Error::NoData("empty campaign".into()));
    }
    let mut sorted: Vec<&SizeCurves> = sizes.iter().collect();
    sorted.sort_by_key(|s| (s.order, s.n));
    let mut tts = Vec::new();
    for s in &sorted {
        let seed = derive(cfg.seed, Stream::Bootstrap, &[s.order as u64, s.n as u64]);
        let time = match s.sweep_time {
            Some(sweep_time) => TimeModel { sweep_time, ..cfg.time_model },
            None => cfg.time_model,
        };
        for &q in &cfg.quantiles {
            let result = optimal_quartile_tts(
                &s.curves,
                q,
                &time,
                cfg.sweeps_per_swap,
                cfg.bootstrap_n,
                seed,
            )?;
            tts.push(TtsRow { order: s.order, n: s.n, result });
        }
    }
    let mut fits = Vec::new();
    let mut orders: Vec<u8> = sorted.iter().map(|s| s.order).collect();
    orders.dedup();
    for order in orders {
        for &q in &cfg.quantiles {
            let points: Vec<(usize, f64)> = tts
                .iter()
                .filter(|r| r.order == order && r.result.q == q)
                .map(|r| (r.n, r.result.tts))
                .collect();
            if points.len() >= 3 {
                fits.push(FitRow { order, fit: fit_scaling(&points, q)? });
            }
        }
    }
    Ok(BenchReport { tts, fits })
}

/// `pcurves.csv` body: every instance's `p_i(t_f)` at every `t_f`.
pub fn render_pcurves(sizes: &[SizeCurves]) -> String {
    let mut out = String::from("order,n,instance_id,t_f,p\n");
    let mut sorted: Vec<&SizeCurves> = sizes.iter().collect();
    sorted.sort_by_key(|s| (s.order, s.n));
    for s in sorted {
        for c in &s.curves {
            for (i, p) in c.p.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", s.order, s.n, c.instance_id, i + 1, p);
            }
        }
    }
    out
}

fn render_tts(report: &BenchReport) -> String {
    let mut out = String::from("order,n,q,tts_seconds,ci_lo,ci_hi,t_f_opt\n");
    for r in &report.tts {
        let t = &r.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.order, r.n, t.q, t.tts, t.ci_lo, t.ci_hi, t.t_f_opt
        );
    }
    out
}

fn render_fits(report: &BenchReport) -> String {
    let mut out = String::from("order,q,gamma,gamma_se,eta,eta_se,r_squared,gamma_paren,eta_paren\n");
    for f in &report.fits {
        let s = &f.fit;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            f.order,
            s.q,
            s.gamma,
            s.gamma_se,
            s.eta,
            s.eta_se,
            s.r_squared,
            s.gamma_display(),
            s.eta_display()
        );
    }
    out
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 600.0;
const PLOT: (f64, f64, f64, f64) = (80.0, 40.0, 760.0, 520.0);

fn series_color(order: u8) -> &'static str {
    if order == 3 {
        "#c0392b"
    } else {
        "#1f5fa8"
    }
}

/// Chart of `log10 ⟨TTS⟩_{0.5}` against `n` with error bars, fitted lines
/// and the hardware reference lines.
pub fn render_svg(report: &BenchReport, unit: &str) -> String {
    let median: Vec<&TtsRow> = report.tts.iter().filter(|r| r.result.q == 0.5).collect();
    let mut orders: Vec<u8> = median.iter().map(|r| r.order).collect();
    orders.dedup();
    let (mut x0, mut x1) = median
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.n as f64), b.max(r.n as f64)));
    if x0 == x1 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let pad = 0.05 * (x1 - x0);
    let (x0, x1) = (x0 - pad, x1 + pad);
    let references: Vec<(u8, f64, f64)> = orders
        .iter()
        .map(|&o| {
            let r = if o == 3 { REFERENCE_THIRD_ORDER[1] } else { REFERENCE_SECOND_ORDER[1] };
            (o, r.1, r.3)
        })
        .collect();
    let mut ys: Vec<f64> = Vec::new();
    for r in &median {
        ys.extend([r.result.tts, r.result.ci_lo, r.result.ci_hi].iter().filter(|v| **v > 0.0).map(|v| v.log10()));
    }
    for f in report.fits.iter().filter(|f| f.fit.q == 0.5) {
        ys.extend([f.fit.gamma * x0 + f.fit.eta, f.fit.gamma * x1 + f.fit.eta]);
    }
    for &(_, g, e) in &references {
        ys.extend([g * x0 + e, g * x1 + e]);
    }
    let (mut y0, mut y1) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if y0.partial_cmp(&y1) != Some(std::cmp::Ordering::Less) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let (y0, y1) = (y0.floor(), y1.ceil());
    let (left, top, right, bottom) = PLOT;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_W} {SVG_H}" width="{SVG_W}" height="{SVG_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r##"<rect width="{SVG_W}" height="{SVG_H}" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#000000"/>"##,
        right - left,
        bottom - top
    );
    let mut y = y0;
    while y <= y1 + 1e-9 {
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{py:.2}" x2="{right}" y2="{py:.2}" stroke="#dddddd"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{y}</text>"##,
            py = py(y),
            tx = left - 6.0,
            ty = py(y) + 4.0
        );
        y += 1.0;
    }
    let mut ns: Vec<usize> = median.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y}" text-anchor="middle">{n}</text>"#,
            x = px(n as f64),
            y = bottom + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle">problem size n</text>"#,
        x = (left + right) / 2.0,
        y = bottom + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">log10 median TTS ({unit})</text>"#,
        y = (top + bottom) / 2.0
    );
    for &(o, g, e) in &references {
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-dasharray="6 4" stroke-opacity="0.6"/>"##,
            px(x0),
            py(g * x0 + e),
            px(x1),
            py(g * x1 + e),
            series_color(o)
        );
    }
    for f in report.fits.iter().filter(|f| f.fit.q == 0.5) {
        let (g, e) = (f.fit.gamma, f.fit.eta);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5"/>"#,
            px(x0),
            py(g * x0 + e),
            px(x1),
            py(g * x1 + e),
            series_color(f.order)
        );
    }
    for r in &median {
        let color = series_color(r.order);
        let x = px(r.n as f64);
        let t = &r.result;
        if t.ci_lo > 0.0 {
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                py(t.ci_lo.log10()),
                py(t.ci_hi.log10())
            );
        }
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
            py(t.tts.log10())
        );
    }
    for (i, &o) in orders.iter().enumerate() {
        let y = top + 18.0 + 36.0 * i as f64;
        let color = series_color(o);
        let label = if o == 3 { "3rd order" } else { "2nd order" };
        let fit = report
            .fits
            .iter()
            .find(|f| f.order == o && f.fit.q == 0.5)
            .map(|f| format!(": gamma {} eta {}", f.fit.gamma_display(), f.fit.eta_display()))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<circle cx="{cx}" cy="{cy}" r="4" fill="{color}"/><text x="{tx}" y="{ty}">{label}{fit}</text>"#,
            cx = left + 16.0,
            cy = y - 4.0,
            tx = left + 28.0,
            ty = y
        );
        let _ = writeln!(
            s,
            r##"<line x1="{a}" y1="{yy}" x2="{b}" y2="{yy}" stroke="{color}" stroke-dasharray="6 4"/><text x="{tx}" y="{ty}" fill="#555555">{label} hardware reference</text>"##,
            a = left + 8.0,
            b = left + 24.0,
            yy = y + 10.0,
            tx = left + 28.0,
            ty = y + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `pcurves.csv`, `tts.csv`, `fit.csv` and `tts.svg` into `dir`.
/// Everything is computed before the first file is created, so a failed
/// analysis leaves no partial output.
pub fn emit_report(sizes: &[SizeCurves], cfg: &ReportConfig, dir: impl AsRef<Path>) -> Result<BenchReport> {
    let report = analyze(sizes, cfg)?;
    let files = [
        ("pcurves.csv", render_pcurves(sizes)),
        ("tts.csv", render_tts(&report)),
        ("fit.csv", render_fits(&report)),
        ("tts.svg", render_svg(&report, cfg.time_model.unit())),
    ];
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(report)
}
