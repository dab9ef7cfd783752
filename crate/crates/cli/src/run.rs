//! Subcommand execution.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use displacemon::decoherence::{dephasing_monte_carlo, pplus_dephased, DephasingSpec, ThermalAddSpec};
use displacemon::device::flux_sweep;
use displacemon::hilbert::{FockSpace, ResonatorState};
use displacemon::phasespace::{
    classical_map, marginal, marginal_grid, ratio_axis, theta_axis, wavenumber_spectrum, wigner,
    ClassicalCheckerboard, MapFeature, PPlusMap, SpectralPeak, WignerSpec, DEFAULT_PEAK_FLOOR,
};
use displacemon::protocol::{
    cool, pplus, run_protocol, sample_readout, GratingSpec, Outcome, ProtocolRecord, Step,
};

use crate::config::{load, ScenarioConfig};
use crate::error::CliError;
use crate::output::{grid_csv, sha256_hex, table_csv, OutputDir, RunManifest};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DISPLACEMON_OUT";
pub const DEFAULT_OUT: &str = "displacemon-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    DeviceReport,
    Cool,
    Interfere,
    PplusMap,
    ClassicalMap,
    Wigner,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::DeviceReport => "device-report",
            Self::Cool => "cool",
            Self::Interfere => "interfere",
            Self::PplusMap => "pplus-map",
            Self::ClassicalMap => "classical-map",
            Self::Wigner => "wigner",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub subcommand: Subcommand,
    pub config_text: String,
    pub overrides: Vec<String>,
    /// Output directory from the command line; wins over config and
    /// environment.
    pub out: Option<PathBuf>,
    /// Value of the output environment variable, if set.
    pub env_out: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub directory: PathBuf,
    pub manifest: RunManifest,
    /// Key scalars for smoke tests, in print order.
    pub summary: Vec<(String, String)>,
}

/// Collected while a subcommand runs.
struct Context<'a> {
    cfg: &'a ScenarioConfig,
    out: OutputDir,
    summary: Vec<(String, String)>,
    step_probabilities: Vec<f64>,
    config_hash: String,
}

impl Context<'_> {
    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }
}

pub fn output_directory(flag: Option<&Path>, cfg: &ScenarioConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.directory.as_ref().map(PathBuf::from))
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn run(req: &RunRequest) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let cfg = load(&req.config_text, &req.overrides)?;
    let effective = cfg.to_toml();
    let directory = output_directory(req.out.as_deref(), &cfg, req.env_out.as_deref());
    let out = OutputDir::prepare(&directory)?;
    let mut ctx = Context {
        cfg: &cfg,
        out,
        summary: Vec::new(),
        step_probabilities: Vec::new(),
        config_hash: sha256_hex(effective.as_bytes()),
    };
    ctx.out.write("effective.toml", effective.as_bytes())?;
    match req.subcommand {
        Subcommand::DeviceReport => device_report(&mut ctx)?,
        Subcommand::Cool => cooling(&mut ctx)?,
        Subcommand::Interfere => interfere(&mut ctx)?,
        Subcommand::PplusMap => pplus_map(&mut ctx)?,
        Subcommand::ClassicalMap => classical(&mut ctx)?,
        Subcommand::Wigner => wigner_grid(&mut ctx)?,
    }
    let Context {
        out,
        summary,
        step_probabilities,
        config_hash,
        ..
    } = ctx;
    let manifest = out.finish(RunManifest {
        tool: "displacemon".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: req.subcommand.name().into(),
        config_hash,
        seed: cfg.decoherence.seed,
        step_probabilities,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        effective_config: effective,
    })?;
    Ok(RunOutcome {
        directory,
        manifest,
        summary,
    })
}

fn device_report(ctx: &mut Context) -> Result<(), CliError> {
    let params = ctx.cfg.device.params()?;
    let report = params.report()?;
    let sweep = &ctx.cfg.sweep;
    let points = flux_sweep(&params, sweep.start, sweep.end, sweep.points)
        .map_err(|e| CliError::Config(format!("sweep: {e}")))?;
    #[derive(Serialize)]
    struct DeviceJson<'a> {
        device: &'a displacemon::device::DeviceParams,
        report: &'a displacemon::device::DeviceReport,
    }
    ctx.out.write_json("device_report.json", &DeviceJson {
        device: &params,
        report: &report,
    })?;
    let col = |f: fn(&displacemon::device::FluxPoint) -> f64| points.iter().map(f).collect::<Vec<f64>>();
    let csv = table_csv(
        &["flux", "omega_q", "omega_q_hz", "lambda", "lambda_hz", "displacement"],
        &[
            &col(|p| p.flux),
            &col(|p| p.omega_q),
            &col(|p| p.omega_q_hz),
            &col(|p| p.lambda),
            &col(|p| p.lambda_hz),
            &col(|p| p.displacement),
        ],
    );
    ctx.out.write("flux_sweep.csv", csv.as_bytes())?;
    ctx.note("omega_mhz", format!("{:.6}", report.mode.omega_hz / 1e6));
    ctx.note("x_zp_pm", format!("{:.6}", report.mode.x_zp * 1e12));
    ctx.note("omega_q0_ghz", format!("{:.6}", report.omega_q_max_hz / 1e9));
    ctx.note("omega_q_ghz", format!("{:.6}", report.omega_q_hz / 1e9));
    ctx.note("lambda_mhz", format!("{:.6}", report.coupling.magnitude_hz / 1e6));
    ctx.note("nbar", format!("{:.6}", report.figures.nbar));
    Ok(())
}

fn cooling(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let cooling = cfg
        .cooling
        .as_ref()
        .ok_or_else(|| CliError::Config("cooling: missing section".into()))?;
    let space = cfg.numerics.space()?;
    let initial = cfg.state.initial(&space)?;
    let omega = cfg.device.omega()?;
    let rec = cool(&space, &initial, &cooling.pulse(), cooling.repetitions, cooling.mode, omega)?;
    ctx.step_probabilities = rec.step_probabilities.clone();
    let filter = table_csv(&["x", "transmission"], &[&rec.curve.x, &rec.curve.transmission]);
    ctx.out.write("filter.csv", filter.as_bytes())?;
    let n: Vec<f64> = (0..space.dim()).map(|k| k as f64).collect();
    let pops = table_csv(
        &["n", "before", "after"],
        &[&n, &initial.normalized().populations(), &rec.state.normalized().populations()],
    );
    ctx.out.write("populations.csv", pops.as_bytes())?;
    #[derive(Serialize)]
    struct CoolJson<'a> {
        initial: String,
        mode: displacemon::protocol::FilterMode,
        repetitions: usize,
        probability: f64,
        step_probabilities: &'a [f64],
        filter_fwhm: Option<f64>,
        before: displacemon::hilbert::Moments,
        after: displacemon::hilbert::Moments,
    }
    let fwhm = rec.curve.fwhm();
    ctx.out.write_json("cool.json", &CoolJson {
        initial: cfg.state.describe(),
        mode: cooling.mode,
        repetitions: cooling.repetitions,
        probability: rec.probability,
        step_probabilities: &rec.step_probabilities,
        filter_fwhm: fwhm,
        before: rec.before,
        after: rec.after,
    })?;
    ctx.note("probability", format!("{:.6}", rec.probability));
    ctx.note("filter_fwhm", fwhm.map_or("none".into(), |f| format!("{f:.4}")));
    ctx.note("var_x", format!("{:.6} -> {:.6}", rec.before.var_x, rec.after.var_x));
    ctx.note("var_p", format!("{:.6} -> {:.6}", rec.before.var_p, rec.after.var_p));
    ctx.note("mean_n", format!("{:.6} -> {:.6}", rec.before.mean_n, rec.after.mean_n));
    Ok(())
}

/// Protocol steps of the config up to the second grating's free evolution,
/// with the kicks used.
fn protocol_steps(cfg: &ScenarioConfig) -> Result<(Vec<Step>, [f64; 2]), CliError> {
    let protocol = cfg.protocol()?;
    let omega = cfg.device.omega()?;
    let spec = protocol.spec(omega)?;
    let mut steps = Vec::new();
    if let Some(c) = &cfg.cooling {
        steps.push(Step::Cool {
            pulse: c.pulse(),
            repetitions: c.repetitions,
            mode: c.mode,
            omega,
        });
    }
    steps.extend(spec.steps());
    let d = &cfg.decoherence;
    if d.n_added > 0.0 {
        steps.push(Step::ThermalAdd(ThermalAddSpec {
            n_added: d.n_added,
            quadrature_points: d.quadrature_points,
        }));
    }
    Ok((steps, [spec.alpha1.im, spec.alpha2.im]))
}

fn run_steps(ctx: &mut Context, space: &FockSpace, steps: &[Step]) -> Result<ProtocolRecord, CliError> {
    let initial = ctx.cfg.state.initial(space)?;
    let rec = run_protocol(space, &initial, steps)?;
    ctx.step_probabilities = rec
        .steps
        .iter()
        .filter(|s| matches!(s.step, Step::Grate(_) | Step::Cool { .. }))
        .map(|s| s.probability)
        .collect();
    Ok(rec)
}

fn steps_csv(rec: &ProtocolRecord) -> String {
    let mut out = String::from("step,kind,probability,cumulative,mean_n,var_x,var_p\n");
    let mut cumulative = 1.0;
    for (i, s) in rec.steps.iter().enumerate() {
        cumulative *= s.probability;
        let m = s.state.normalized().moments();
        out.push_str(&format!(
            "{i},{},{:.16e},{cumulative:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.step.label(),
            s.probability,
            m.mean_n,
            m.var_x,
            m.var_p
        ));
    }
    out
}

#[derive(Serialize)]
struct WignerSidecar<'a> {
    convention: &'a str,
    grid: WignerSpec,
    step: f64,
    layout: &'static str,
    state: String,
    config_hash: &'a str,
    weight: f64,
    integral: f64,
    min: f64,
    max: f64,
    negativity: f64,
}

#[derive(Serialize)]
struct MarginalPeaks {
    theta: f64,
    peaks: Vec<SpectralPeak>,
}

/// Wigner grid with sidecar, marginals and their wave-number peaks. Returns
/// the peaks and the Wigner minimum.
fn write_phase_space(
    ctx: &mut Context,
    stem: &str,
    state: &ResonatorState,
    provenance: String,
) -> Result<(Vec<MarginalPeaks>, f64), CliError> {
    let wcfg = &ctx.cfg.wigner;
    let spec = match (wcfg.half_width, wcfg.points) {
        (Some(h), Some(n)) => WignerSpec { half_width: h, points: n },
        (Some(h), None) => WignerSpec::for_half_width(h),
        (None, Some(n)) => WignerSpec {
            points: n,
            ..WignerSpec::for_state(state)
        },
        (None, None) => WignerSpec::for_state(state),
    };
    let w = wigner(state, &spec)?;
    ctx.out.write(&format!("wigner_{stem}.csv"), grid_csv("x", "p", &w.x, &w.p, &w.values).as_bytes())?;
    let sidecar = WignerSidecar {
        convention: &w.convention,
        grid: spec,
        step: w.step,
        layout: "rows x, columns p",
        state: provenance,
        config_hash: &ctx.config_hash,
        weight: w.weight,
        integral: w.integral(),
        min: w.min(),
        max: w.max(),
        negativity: w.negativity(),
    };
    ctx.out.write_json(&format!("wigner_{stem}.json"), &sidecar)?;

    let grid = marginal_grid(state);
    let mut header = vec!["x".to_string()];
    let mut columns = vec![grid.values()];
    let mut peaks = Vec::new();
    for &theta in &wcfg.marginal_thetas {
        let curve = marginal(state, theta, &grid)?;
        let spectrum = wavenumber_spectrum(&curve, wcfg.k_max, DEFAULT_PEAK_FLOOR)?;
        header.push(format!("P_theta_{theta:.6}"));
        columns.push(curve.density);
        peaks.push(MarginalPeaks {
            theta,
            peaks: spectrum.peaks,
        });
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    ctx.out.write(&format!("marginals_{stem}.csv"), table_csv(&header, &cols).as_bytes())?;
    ctx.out.write_json(&format!("peaks_{stem}.json"), &peaks)?;
    Ok((peaks, w.min()))
}

fn fmt_peaks(peaks: &[MarginalPeaks]) -> String {
    peaks
        .iter()
        .map(|m| {
            let ks: Vec<String> = m.peaks.iter().map(|p| format!("{:.4}", p.k)).collect();
            format!("theta {:.4}: [{}]", m.theta, ks.join(" "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn interfere(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let space = cfg.numerics.space()?;
    let (steps, kicks) = protocol_steps(cfg)?;
    let rec = run_steps(ctx, &space, &steps)?;
    ctx.out.write("steps.csv", steps_csv(&rec).as_bytes())?;

    // the three moments of the protocol: after the first grating, just
    // before the second, after the second
    let gratings: Vec<usize> = rec
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.step, Step::Grate(_)))
        .map(|(i, _)| i)
        .collect();
    let insets = [
        ("after_grating1", gratings[0]),
        ("before_grating2", gratings[1] - 1),
        ("after_grating2", gratings[1]),
    ];
    let mut final_peaks = Vec::new();
    for (stem, index) in insets {
        let state = rec.steps[index].state.clone();
        let provenance = format!("{} after step {index} ({})", cfg.state.describe(), rec.steps[index].step.label());
        final_peaks = write_phase_space(ctx, stem, &state, provenance)?.0;
    }

    let r = &cfg.readout;
    let a3 = r.alpha3.unwrap_or(kicks[1]);
    let alpha3 = Complex64::from_polar(a3, 0.5 * PI + r.theta);
    let state = rec.final_state();
    let p = pplus(state, alpha3, r.phi)?;
    let d = &cfg.decoherence;
    let dephased = if d.gamma_t > 0.0 {
        Some(pplus_dephased(state, alpha3, r.phi, d.gamma_t)?)
    } else {
        None
    };
    #[derive(Serialize)]
    struct MonteCarlo {
        probability: f64,
        standard_error: f64,
        n_traj: usize,
        seed: u64,
    }
    let monte_carlo = if d.n_traj > 0 {
        let spec = GratingSpec {
            alpha: alpha3,
            phi: r.phi,
            outcome: Outcome::Plus,
            general_alpha: true,
        };
        let dephasing = DephasingSpec {
            gamma: d.gamma_t,
            t: 1.0,
            n_traj: d.n_traj,
            seed: d.seed,
        };
        let mc = dephasing_monte_carlo(&space, state, &spec, &dephasing)?;
        Some(MonteCarlo {
            probability: mc.probability,
            standard_error: mc.standard_error,
            n_traj: mc.n_traj,
            seed: mc.seed,
        })
    } else {
        None
    };
    let sample = if r.shots > 0 {
        Some(sample_readout(dephased.unwrap_or(p), r.shots, d.seed)?)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Readout {
        alpha1: f64,
        alpha2: f64,
        alpha3: Complex64,
        phi: f64,
        cumulative_probability: f64,
        pplus: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        pplus_dephased: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        monte_carlo: Option<MonteCarlo>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sample: Option<displacemon::protocol::ReadoutSample>,
    }
    let readout = Readout {
        alpha1: kicks[0],
        alpha2: kicks[1],
        alpha3,
        phi: r.phi,
        cumulative_probability: rec.cumulative_probability(),
        pplus: p,
        pplus_dephased: dephased,
        monte_carlo,
        sample,
    };
    ctx.out.write_json("readout.json", &readout)?;

    ctx.note("alpha", format!("{:.6}, {:.6}", kicks[0], kicks[1]));
    let probs: Vec<String> = ctx.step_probabilities.iter().map(|p| format!("{p:.6}")).collect();
    ctx.note("step_probabilities", probs.join(", "));
    ctx.note("cumulative_probability", format!("{:.6}", readout.cumulative_probability));
    ctx.note("pplus", format!("{p:.6}"));
    if let Some(v) = dephased {
        ctx.note("pplus_dephased", format!("{v:.6}"));
    }
    if let Some(mc) = &readout.monte_carlo {
        ctx.note("pplus_monte_carlo", format!("{:.6} +/- {:.6}", mc.probability, mc.standard_error));
    }
    ctx.note("peaks", fmt_peaks(&final_peaks));
    Ok(())
}

#[derive(Serialize)]
struct MapSidecar<'a> {
    kind: &'static str,
    layout: &'static str,
    alpha_ref: f64,
    phi: f64,
    threshold: f64,
    config_hash: &'a str,
    #[serde(flatten)]
    extra: serde_json::Value,
    features: Vec<MapFeature>,
}

fn write_map(ctx: &mut Context, stem: &str, kind: &'static str, map: &PPlusMap, extra: serde_json::Value) -> Result<(), CliError> {
    let threshold = ctx.cfg.map.threshold;
    ctx.out.write(
        &format!("{stem}.csv"),
        grid_csv("theta", "ratio", &map.theta, &map.ratio, &map.values).as_bytes(),
    )?;
    let features = map.features(threshold);
    let listed: Vec<String> = features
        .iter()
        .map(|f| format!("({:.4}, {:.4}, {:.4})", f.theta, f.ratio, f.amplitude))
        .collect();
    let sidecar = MapSidecar {
        kind,
        layout: "rows theta = Omega tau2, columns |alpha3| / alpha_ref; values p+",
        alpha_ref: map.alpha_ref,
        phi: map.phi,
        threshold,
        config_hash: &ctx.config_hash,
        extra,
        features,
    };
    ctx.out.write_json(&format!("{stem}.json"), &sidecar)?;
    ctx.note("features", listed.join(" "));
    Ok(())
}

fn pplus_map(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    cfg.map.validate()?;
    let space = cfg.numerics.space()?;
    let (steps, kicks) = protocol_steps(cfg)?;
    let rec = run_steps(ctx, &space, &steps)?;
    let state = rec.final_state();
    let alpha_ref = cfg.map.alpha_ref.unwrap_or(kicks[1]);
    let phi = cfg.readout.phi;
    let gamma_t = cfg.decoherence.gamma_t;
    let mut failure = None;
    let map = PPlusMap::build(
        theta_axis(cfg.map.theta_points),
        ratio_axis(cfg.map.ratio_points, cfg.map.ratio_max),
        alpha_ref,
        phi,
        |t, a3| {
            let alpha3 = Complex64::from_polar(a3, 0.5 * PI + t);
            let value = if gamma_t > 0.0 {
                pplus_dephased(state, alpha3, phi, gamma_t)
            } else {
                pplus(state, alpha3, phi)
            };
            value.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        },
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let extra = serde_json::json!({
        "state": cfg.state.describe(),
        "alphas": kicks,
        "n_added": cfg.decoherence.n_added,
        "gamma_t": gamma_t,
        "cumulative_probability": rec.cumulative_probability(),
    });
    write_map(ctx, "pplus_map", "quantum", &map, extra)?;
    ctx.note("alpha_ref", format!("{alpha_ref:.6}"));
    ctx.note("cumulative_probability", format!("{:.6}", rec.cumulative_probability()));
    Ok(())
}

fn classical(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    cfg.map.validate()?;
    let c = cfg
        .classical
        .as_ref()
        .ok_or_else(|| CliError::Config("classical: missing section; give classical.alpha".into()))?;
    let sigma = c.sigma.unwrap_or_else(|| (2.0 * cfg.state.nbar + 1.0).sqrt());
    let cb = ClassicalCheckerboard::new(sigma, c.alpha)
        .map_err(|e| CliError::Config(format!("classical: {e}")))?;
    let map = classical_map(
        &cb,
        theta_axis(cfg.map.theta_points),
        ratio_axis(cfg.map.ratio_points, cfg.map.ratio_max),
        cfg.readout.phi,
    );
    let extra = serde_json::json!({
        "sigma": cb.sigma,
        "alpha": cb.alpha,
        "normalization": cb.normalization,
    });
    write_map(ctx, "classical_map", "classical", &map, extra)?;
    ctx.note("sigma", format!("{sigma:.6}"));
    ctx.note("normalization", format!("{:.6e}", cb.normalization));
    Ok(())
}

fn wigner_grid(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let space = cfg.numerics.space()?;
    let (state, provenance) = if cfg.protocol.is_some() {
        let (steps, _) = protocol_steps(cfg)?;
        let rec = run_steps(ctx, &space, &steps)?;
        let labels: Vec<&str> = rec.steps.iter().map(|s| s.step.label()).collect();
        (rec.final_state().clone(), format!("{} after {}", cfg.state.describe(), labels.join(", ")))
    } else {
        (cfg.state.initial(&space)?, cfg.state.describe())
    };
    let (peaks, w_min) = write_phase_space(ctx, "state", &state, provenance)?;
    ctx.note("wigner_min", format!("{w_min:.6e}"));
    ctx.note("peaks", fmt_peaks(&peaks));
    Ok(())
}
