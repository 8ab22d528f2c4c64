use crate::config::{self, usage};
use crate::emit::{self, Csv};
use crate::svg;
use anyhow::{Context as _, Result};
use clap::{Args, Subcommand};
use num_complex::Complex64;
use ostrovsky_core::evolution::{self, InitialData, InitialKind, InitialParams, NonlinearOptions};
use ostrovsky_core::fourier::periodic_grid;
use ostrovsky_core::halfline::{self, HalflineFunction, HalflineGrid};
use ostrovsky_core::spectra::{self, LambdaGrid};
use ostrovsky_core::spectral_ops::{assemble_operator, assemble_operator_from_coefficients, OperatorMatrix};
use ostrovsky_core::waves::{self, peaked_fourier, smooth_wave_solve_with};
use ostrovsky_core::{FourierVector, ModeSet, Power, PseudospectrumField};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Context {
    pub out: PathBuf,
    pub file: Map<String, Value>,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn print(v: &Value) {
    println!("{v}");
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn finish(command: &str, data: &Path, cfg: &Value, start: Instant, summary: Value) -> Result<()> {
    emit::write_sidecar(data, command, cfg, start.elapsed().as_secs_f64(), summary.clone())?;
    print(&summary);
    Ok(())
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct WaveArgs {
    /// Nonlinearity power (1 or 2).
    #[arg(long)]
    pub p: Option<u32>,
    /// Wave speed; omit for the peaked wave.
    #[arg(long)]
    pub c: Option<f64>,
    /// Grid size over one period.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Residual tolerance for smooth waves.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn wave(ctx: &Context, flags: &WaveArgs) -> Result<()> {
    let start = Instant::now();
    let a: WaveArgs = config::merge(flags, &ctx.file)?;
    let power = config::power(a.p)?;
    let n = a.samples.unwrap_or(512);
    let (profile, extra) = match a.c {
        None => (waves::peaked_profile(power, n)?, json!({})),
        Some(c) => {
            let w = smooth_wave_solve_with(c, power, a.tol.unwrap_or(1e-10), n)?;
            let extra = json!({ "u_min": w.u_min, "xi_period": w.xi_period, "residual": w.residual });
            (w.profile, extra)
        }
    };
    let mut csv = Csv::new(&["z", "u"]);
    for (z, u) in profile.grid.iter().zip(&profile.values) {
        csv.row(&[*z, *u]);
    }
    let path = ctx.path(&format!("wave_p{}.csv", power.exponent()));
    csv.write(&path)?;
    let summary = json!({
        "kind": profile.kind,
        "p": power.exponent(),
        "speed": profile.speed,
        "max": profile.max(),
        "mean": profile.mean(),
        "details": extra,
        "file": path,
    });
    finish("wave", &path, &to_value(&a), start, summary)
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct OperatorArgs {
    /// Nonlinearity power (1 or 2).
    #[arg(long)]
    pub p: Option<u32>,
    /// Mode cutoff N.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Floquet exponent κ in [−1/2, 1/2].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Linearise at the smooth wave of this speed instead of the peaked wave.
    #[arg(long)]
    pub c: Option<f64>,
    /// Drop the compact part and use A₀.
    #[arg(long)]
    pub a0: Option<bool>,
}

fn build_operator(a: &OperatorArgs, default_n: usize) -> Result<(Power, OperatorMatrix)> {
    let power = config::power(a.p)?;
    let n = a.n.unwrap_or(default_n);
    if n == 0 {
        return Err(usage("--N must be at least 1"));
    }
    let kappa = a.kappa.unwrap_or(0.0);
    let include_k = !a.a0.unwrap_or(false);
    let m = match a.c {
        None => assemble_operator_from_coefficients(&peaked_fourier(power, 2 * n)?, n, kappa, include_k)?,
        Some(c) => {
            let w = smooth_wave_solve_with(c, power, 1e-10, (8 * n).next_power_of_two().max(512))?;
            assemble_operator(&w.profile, n, kappa, include_k)?
        }
    };
    Ok((power, m))
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,
}

fn sorted(mut v: Vec<(Complex64, f64)>) -> Vec<(Complex64, f64)> {
    v.sort_by(|a, b| a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)));
    v
}

pub fn spectrum(ctx: &Context, flags: &SpectrumArgs) -> Result<()> {
    let start = Instant::now();
    let a: SpectrumArgs = config::merge(flags, &ctx.file)?;
    let (power, m) = build_operator(&a.op, 128)?;
    let s = spectra::eigenvalues(&m)?;
    let mut csv = Csv::new(&["re", "im", "residual"]);
    for (l, r) in sorted(s.eigenvalues.iter().copied().zip(s.residuals.iter().copied()).collect()) {
        csv.row(&[l.re, l.im, r]);
    }
    let path = ctx.path(&format!("spectrum_p{}_N{}.csv", power.exponent(), m.cutoff()));
    csv.write(&path)?;
    let nearest = s.nearest_to(Complex64::default()).map(|(_, l)| l.norm());
    let summary = json!({
        "p": power.exponent(),
        "N": m.cutoff(),
        "count": s.eigenvalues.len(),
        "abscissa": s.abscissa(),
        "max_residual": s.residuals.iter().copied().fold(0.0, f64::max),
        "nearest_to_zero": nearest,
        "file": path,
    });
    finish("spectrum", &path, &to_value(&a), start, summary)
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PseudoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,
    /// re_min re_max im_min im_max
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"])]
    pub window: Option<Vec<f64>>,
    /// Grid points along Re λ (and along Im λ unless --res-im is given).
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long)]
    pub res_im: Option<usize>,
    /// Level ε for the strip estimate.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Skip the eigenvalue overlay on the portrait.
    #[arg(long)]
    pub no_eigenvalues: Option<bool>,
}

struct Portrait {
    field: PseudospectrumField,
    eigenvalues: Vec<Complex64>,
    strip: Option<(f64, f64)>,
}

fn portrait(power: Power, m: &OperatorMatrix, a: &PseudoArgs) -> Result<Portrait> {
    let (r0, r1, i0, i1) = config::window(a.window.as_deref())?;
    let res = a.res.unwrap_or(41);
    let grid = LambdaGrid::new((r0, r1), (i0, i1), res, a.res_im.unwrap_or(res)).map_err(|e| usage(e.to_string()))?;
    let eps = config::positive("--eps", a.eps.unwrap_or(0.02))?;
    let field = spectra::pseudospectrum_field(m, &grid)?;
    let eigenvalues = if a.no_eigenvalues.unwrap_or(false) { Vec::new() } else { spectra::eigenvalues(m)?.eigenvalues };
    let strip = spectra::strip_estimate(&field, eps);
    let _ = power;
    Ok(Portrait { field, eigenvalues, strip })
}

fn write_portrait(ctx: &Context, stem: &str, power: Power, p: &Portrait) -> Result<(PathBuf, PathBuf)> {
    let mut csv = Csv::new(&["re", "im", "sigma_min"]);
    for (k, s) in p.field.sigma_min.iter().enumerate() {
        let l = p.field.lambda(k);
        csv.row(&[l.re, l.im, *s]);
    }
    let data = ctx.path(&format!("{stem}.csv"));
    csv.write(&data)?;
    let w = power.strip_half_width();
    let title = format!("σ_min(A − λ), p = {}, N = {}, κ = {}", power.exponent(), p.field.cutoff, p.field.kappa);
    let picture = ctx.path(&format!("{stem}.svg"));
    emit::write_text(&picture, &svg::portrait(&p.field, &[-w, w], &p.eigenvalues, &title))?;
    Ok((data, picture))
}

pub fn pseudo(ctx: &Context, flags: &PseudoArgs) -> Result<()> {
    let start = Instant::now();
    let a: PseudoArgs = config::merge(flags, &ctx.file)?;
    let (power, m) = build_operator(&a.op, 128)?;
    let p = portrait(power, &m, &a)?;
    let stem = format!("pseudo_p{}_N{}", power.exponent(), m.cutoff());
    let (data, picture) = write_portrait(ctx, &stem, power, &p)?;
    let summary = json!({
        "p": power.exponent(),
        "N": m.cutoff(),
        "points": p.field.sigma_min.len(),
        "strip_estimate": p.strip,
        "strip_half_width": power.strip_half_width(),
        "file": data,
        "svg": picture,
    });
    finish("pseudo", &data, &to_value(&a), start, summary)
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct MuArgs {
    /// Re μ
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Im μ
    #[arg(long, allow_negative_numbers = true)]
    pub mu_im: Option<f64>,
}

impl MuArgs {
    fn value(&self) -> Result<Complex64> {
        let re = self.mu.ok_or_else(|| usage("--mu is required"))?;
        Ok(Complex64::new(re, self.mu_im.unwrap_or(0.0)))
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mu: MuArgs,
    /// Right-hand side: sech_tanh or gauss (a centred Gaussian with its sech component removed).
    #[arg(long)]
    pub rhs: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum HalflineCommand {
    /// Region of μ: residual, continuous or resolvent.
    Classify(MuArgs),
    /// Solve (B₀ − μ)w = f with the closed-form resolvent.
    Solve(SolveArgs),
    /// Decay of the kernel and adjoint-kernel solutions.
    Kernel(MuArgs),
}

pub fn halfline(ctx: &Context, cmd: &HalflineCommand) -> Result<()> {
    match cmd {
        HalflineCommand::Classify(flags) => {
            let a: MuArgs = config::merge(flags, &ctx.file)?;
            let c = halfline::classify_mu(a.value()?);
            print(&json!({ "region": c.region }));
            Ok(())
        }
        HalflineCommand::Kernel(flags) => {
            let a: MuArgs = config::merge(flags, &ctx.file)?;
            let mu = a.value()?;
            let g = HalflineGrid::for_mu(mu);
            print(&json!({
                "region": halfline::classify_mu(mu).region,
                "kernel_decays": halfline::kernel_solution(mu, &g).decay_flag,
                "adjoint_decays": halfline::adjoint_kernel(mu, &g).decay_flag,
                "y_max": g.y_max,
            }));
            Ok(())
        }
        HalflineCommand::Solve(flags) => {
            let start = Instant::now();
            let a: SolveArgs = config::merge(flags, &ctx.file)?;
            let mu = a.mu.value()?;
            let g = HalflineGrid::for_mu(mu);
            let rhs = a.rhs.clone().unwrap_or_else(|| "sech_tanh".into());
            let f = match rhs.as_str() {
                "sech_tanh" => HalflineFunction::from_real_fn(&g, |y| halfline::sech(y) * y.tanh()),
                "gauss" => {
                    let raw = HalflineFunction::from_real_fn(&g, |y| (-y * y).exp());
                    let k = raw.sech_moment() / HalflineFunction::from_real_fn(&g, halfline::sech).sech_moment();
                    HalflineFunction::from_fn(&g, |y| (-y * y).exp() - k * halfline::sech(y))
                }
                other => return Err(usage(format!("--rhs must be sech_tanh or gauss, got {other}"))),
            };
            let w = halfline::resolvent_solve(mu, &f)?;
            let mut csv = Csv::new(&["y", "re", "im"]);
            for (y, v) in w.grid.iter().zip(&w.values).step_by(10) {
                csv.row(&[*y, v.re, v.im]);
            }
            let path = ctx.path("halfline_solve.csv");
            csv.write(&path)?;
            let summary = json!({
                "mu": [mu.re, mu.im],
                "rhs": rhs,
                "ode_residual": halfline::ode_residual(mu, &w, &f),
                "norm_ratio": w.l2_norm() / f.l2_norm(),
                "bound": halfline::resolvent_bound(mu),
                "file": path,
            });
            finish("halfline solve", &path, &to_value(&a), start, summary)
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PointspecArgs {
    #[arg(long)]
    pub p: Option<u32>,
    /// Candidate λ as `re` or `re,im`; repeatable.
    #[arg(long = "lambda", allow_negative_numbers = true)]
    pub lambdas: Option<Vec<String>>,
}

fn default_candidates() -> Vec<Complex64> {
    let t = 2.0 * PI / 3.0;
    [(0.0, 0.0), (t, 0.0), (-t, 0.0), (0.1, 0.0), (-0.1, 0.0), (0.3, 0.0), (-0.3, 0.0), (0.0, 0.5), (0.2, 0.4), (-0.2, 0.4), (0.6, 1.0), (-0.4, -0.7)]
        .iter()
        .map(|&(a, b)| Complex64::new(a, b))
        .collect()
}

fn parse_lambda(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| usage(format!("cannot read λ from {s:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(usage(format!("λ must be `re` or `re,im`, got {s:?}"))),
    }
}

pub fn pointspec(ctx: &Context, flags: &PointspecArgs) -> Result<()> {
    let start = Instant::now();
    let a: PointspecArgs = config::merge(flags, &ctx.file)?;
    let power = config::power(a.p)?;
    let lambdas = match &a.lambdas {
        Some(list) => list.iter().map(|s| parse_lambda(s)).collect::<Result<Vec<_>>>()?,
        None => default_candidates(),
    };
    let rep = ostrovsky_core::pointspec::point_spectrum_scan(&lambdas, power)?;
    let mut csv = Csv::new(&["re", "im", "admissible", "candidates", "members"]);
    for e in &rep.entries {
        let members = e.candidates.iter().filter(|c| c.membership.member).count();
        csv.row(&[e.lambda.re, e.lambda.im, f64::from(u8::from(e.admissible)), e.candidates.len() as f64, members as f64]);
    }
    let path = ctx.path(&format!("pointspec_p{}.csv", power.exponent()));
    csv.write(&path)?;
    emit::write_json(&ctx.path(&format!("pointspec_p{}.json", power.exponent())), &rep)?;
    let admitted: Vec<[f64; 2]> = rep.admissible.iter().map(|l| [l.re, l.im]).collect();
    let summary = json!({ "p": power.exponent(), "scanned": lambdas.len(), "admissible": admitted, "file": path });
    finish("pointspec", &path, &to_value(&a), start, summary)
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvolveArgs {
    /// linear or nonlinear
    #[arg(long)]
    pub mode: Option<String>,
    /// peaked_perturbed, smooth_wave or random_zero_mean
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub p: Option<u32>,
    /// Mode cutoff for linear runs.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Grid size for nonlinear runs (power of two ≥ 256).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon T.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Required for random initial data.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Trailing fraction of the run used for the growth fit.
    #[arg(long)]
    pub fit_window: Option<f64>,
    /// Breaking when max|u_x| exceeds this multiple of its initial value.
    #[arg(long)]
    pub breaking_factor: Option<f64>,
}

fn initial_kind(s: &str) -> Result<InitialKind> {
    serde_json::from_value(Value::String(s.into()))
        .map_err(|_| usage(format!("--initial must be peaked_perturbed, smooth_wave or random_zero_mean, got {s}")))
}

pub fn evolve(ctx: &Context, flags: &EvolveArgs) -> Result<()> {
    let start = Instant::now();
    let a: EvolveArgs = config::merge(flags, &ctx.file)?;
    let power = config::power(a.p)?;
    let mode = a.mode.clone().unwrap_or_else(|| "nonlinear".into());
    let linear = match mode.as_str() {
        "linear" => true,
        "nonlinear" => false,
        other => return Err(usage(format!("--mode must be linear or nonlinear, got {other}"))),
    };
    let kind = initial_kind(a.initial.as_deref().unwrap_or(if linear { "random_zero_mean" } else { "peaked_perturbed" }))?;
    let seed = match (kind, a.seed) {
        (InitialKind::RandomZeroMean, None) => return Err(usage("--seed is required for random initial data")),
        (_, s) => s.unwrap_or(0),
    };
    let cutoff = a.n.unwrap_or(64);
    let samples = a.samples.unwrap_or(512);
    let horizon = config::positive("--T", a.t.unwrap_or(if linear { 40.0 } else { 20.0 }))?;
    let params = InitialParams {
        power,
        n_samples: samples,
        amplitude: a.amplitude.unwrap_or(0.01),
        speed: a.speed.unwrap_or(1.05),
        cutoff,
        kappa: a.kappa.unwrap_or(0.0),
    };
    let data = evolution::make_initial_data(kind, &params, seed)?;
    let stem = format!("evolve_{mode}_p{}", power.exponent());
    let path = ctx.path(&format!("{stem}.csv"));
    let summary = if linear {
        let v0 = match data {
            InitialData::Coefficients(v) => v,
            InitialData::Samples(s) => FourierVector::from_real_samples(&s, ModeSet::new(cutoff, 0.0)?)?,
        };
        let m = assemble_operator_from_coefficients(&peaked_fourier(power, 2 * cutoff)?, cutoff, v0.kappa(), true)?;
        let dt = config::positive("--dt", a.dt.unwrap_or(evolution::default_linear_step(cutoff)))?;
        let tr = evolution::evolve_linear(&m, &v0, dt, horizon)?;
        let window = a.fit_window.unwrap_or(0.5);
        let fit = evolution::growth_rate_fit(&tr, window).map_err(|e| usage(e.to_string()))?;
        let mut csv = Csv::new(&["t", "norm"]);
        for (t, n) in tr.times.iter().zip(&tr.norms) {
            csv.row(&[*t, *n]);
        }
        csv.write(&path)?;
        json!({
            "mode": mode, "p": power.exponent(), "N": cutoff, "dt": dt, "T": horizon,
            "fitted_rate": fit.rate, "r_squared": fit.r_squared, "poor_fit": fit.poor_fit,
            "strip_half_width": power.strip_half_width(), "diagnostics": tr.diagnostics, "file": path,
        })
    } else {
        let u0 = match data {
            InitialData::Samples(s) => s,
            InitialData::Coefficients(v) => v.to_real_samples(samples)?,
        };
        let n = u0.len();
        let umax = u0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // default step sits at 0.8 of the CFL limit for the initial data
        let dt = a.dt.unwrap_or(0.4 / (n as f64 * power.pow(umax).abs().max(1.0)));
        let opts = NonlinearOptions { breaking_factor: a.breaking_factor.unwrap_or(evolution::BREAKING_FACTOR), ..NonlinearOptions::default() };
        let tr = evolution::evolve_nonlinear_with(&u0, power, config::positive("--dt", dt)?, horizon, &opts)?;
        let mut csv = Csv::new(&["t", "norm"]);
        for (t, v) in tr.times.iter().zip(&tr.norms) {
            csv.row(&[*t, *v]);
        }
        csv.write(&path)?;
        if let Some(last) = tr.snapshots.last() {
            let mut fin = Csv::new(&["z", "u"]);
            for (z, u) in periodic_grid(n).iter().zip(&last.values) {
                fin.row(&[*z, *u]);
            }
            fin.write(&ctx.path(&format!("{stem}_final.csv")))?;
        }
        json!({
            "mode": mode, "p": power.exponent(), "samples": n, "dt": dt, "T": horizon,
            "final_time": tr.final_time(), "breaking_time": tr.diagnostics.breaking_time,
            "diagnostics": tr.diagnostics, "file": path,
        })
    };
    finish("evolve", &path, &to_value(&a), start, summary)
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportArgs {
    /// Mode cutoff N.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"])]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long)]
    pub res_im: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
}

pub fn report(ctx: &Context, flags: &ReportArgs) -> Result<()> {
    let start = Instant::now();
    let a: ReportArgs = config::merge(flags, &ctx.file)?;
    let n = a.n.unwrap_or(128);
    let mut rows = Vec::new();
    let mut table = Csv::new(&["p", "N", "strip_lo", "strip_hi", "predicted", "abscissa", "nearest_to_zero"]);
    for p in [1u32, 2] {
        let op = OperatorArgs { p: Some(p), n: Some(n), ..OperatorArgs::default() };
        let (power, m) = build_operator(&op, n)?;
        let pa = PseudoArgs { op, window: a.window.clone(), res: a.res, res_im: a.res_im, eps: a.eps, no_eigenvalues: None };
        let portrait = portrait(power, &m, &pa)?;
        let stem = format!("report_p{p}_N{n}");
        let (data, picture) = write_portrait(ctx, &stem, power, &portrait).context("writing report portrait")?;
        let abscissa = portrait.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        let nearest = portrait.eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
        let (lo, hi) = portrait.strip.map_or((f64::NAN, f64::NAN), |s| s);
        table.row(&[p as f64, n as f64, lo, hi, power.strip_half_width(), abscissa, nearest]);
        rows.push(json!({
            "p": p, "N": n, "strip_estimate": portrait.strip, "predicted": power.strip_half_width(),
            "abscissa": abscissa, "nearest_to_zero": nearest, "file": data, "svg": picture,
        }));
    }
    let path = ctx.path(&format!("report_N{n}.csv"));
    table.write(&path)?;
    finish("report", &path, &to_value(&a), start, json!({ "runs": rows, "file": path }))
}
