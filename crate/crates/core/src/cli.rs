//! `holobias` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bias::{
    bias_constant, geometric_bias_sum, load_geodesics, trace_rhs_spectral, Parity, SignalModel,
    Weighting, TRACE_DROPPED_ERROR,
};
use crate::catalog::{
    format_rational, load_catalog, relation_lattice, relation_lattice_from_frequencies,
    validate_weyl, ExactFrequency, RelationLattice, SpectrumCatalog,
};
use crate::dihedral::{export_progression, scanned_characters, solve_hecke, standard_characters};
use crate::distribution::{
    default_grid, density_inversion, sample_distribution, time_average_model, AmplitudeSet,
    BiasDistribution, CoordinateMode, Functional, SamplingOptions, DEFAULT_BINS,
    DEFAULT_TAIL_EPSILON,
};
use crate::error::{Error, Result};
use crate::kernels::{HolonomyTestFunction, KernelKind, KernelScale, SmoothingKernel};

#[derive(Debug, Parser)]
#[command(name = "holobias", version, about = "Holonomy bias of closed geodesics from spectral data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bias constant b_{f,η} and its components.
    Bias(BiasArgs),
    /// Truncated signal E^(T) on a y-grid (CSV "y,E").
    Signal(SignalArgs),
    /// Limit density by characteristic-function inversion.
    Density(DensityArgs),
    /// Empirical limit law by torus sampling.
    Sample(SampleArgs),
    /// Time averages of h(E^(T)) over [η₀, Y].
    Timeavg(TimeavgArgs),
    /// Geometric sums over a geodesic table.
    Geodesics(GeodesicsArgs),
    /// Dihedral construction: unit conditions and catalog export.
    Dihedral(DihedralArgs),
    /// Catalog checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectralArgs {
    /// Spectral catalog (JSON or CSV); empty when omitted.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Holonomy test function: cos:k, sin:k or a JSON coefficient table.
    #[arg(long = "f", default_value = "cos:1")]
    pub f: String,
    #[arg(long, default_value = "bump")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Defaults to η.
    #[arg(long)]
    pub eta0: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BiasArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spectral: SpectralArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spectral: SpectralArgs,
    /// Spectral cutoff T (no cutoff when omitted).
    #[arg(long = "T")]
    pub cutoff: Option<f64>,
    /// First grid point; defaults to η₀.
    #[arg(long)]
    pub y_min: Option<f64>,
    #[arg(long = "Y")]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AmplitudeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spectral: SpectralArgs,
    #[arg(long = "T")]
    pub cutoff: Option<f64>,
    /// Synthetic amplitudes on independent coordinates, replacing the catalog.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub amplitudes: Option<Vec<f64>>,
    /// Centre b for synthetic amplitudes.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    /// per-class or shared-frequency.
    #[arg(long, default_value = "per-class")]
    pub mode: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: AmplitudeArgs,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Relative padding of the grid beyond b ± Σa.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    #[arg(long, default_value_t = DEFAULT_TAIL_EPSILON)]
    pub tail_eps: f64,
    /// CSV "x,p".
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: AmplitudeArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub qmc: bool,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Functionals: identity, square, one, indicator>c, clipped-exp:c.
    #[arg(long = "h")]
    pub functionals: Vec<String>,
    /// CSV "x,p" histogram.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimeavgArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spectral: SpectralArgs,
    #[arg(long = "T")]
    pub cutoff: Option<f64>,
    #[arg(long = "Y")]
    pub horizon: f64,
    /// Defaults to π/(8 s_max).
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long = "h", default_values_t = vec!["identity".to_string()])]
    pub functionals: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeodesicsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spectral: SpectralArgs,
    /// CSV "length,holonomy,primitive_length".
    #[arg(long)]
    pub geodesics: PathBuf,
    #[arg(long = "Y")]
    pub y: f64,
    /// plain, length-times-f or weyl-tilde.
    #[arg(long, default_value = "plain")]
    pub weighting: String,
    #[arg(long)]
    pub primitive_only: bool,
    /// even, odd or full; used with --catalog for the spectral side.
    #[arg(long, default_value = "full")]
    pub parity: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DihedralArgs {
    /// Progression range, e.g. n=0..9 (inclusive).
    #[arg(long)]
    pub export: Option<String>,
    /// Weight p of the exported lines; defaults to the k₁ residue.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub mult: u64,
    /// Use the first generators in lexicographic order instead of ζ+3 and 7+ζ.
    #[arg(long)]
    pub scan_generators: bool,
    /// Exported catalog JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    /// Volume for the multiplicity bound check.
    #[arg(long)]
    pub volume: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` and runs; returns the process exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a subcommand, writes any requested files and returns stdout text.
pub fn run(command: &Command) -> Result<String> {
    let out = match command {
        Command::Bias(a) => run_bias(a)?,
        Command::Signal(a) => run_signal(a)?,
        Command::Density(a) => run_density(a)?,
        Command::Sample(a) => run_sample(a)?,
        Command::Timeavg(a) => run_timeavg(a)?,
        Command::Geodesics(a) => run_geodesics(a)?,
        Command::Dihedral(a) => run_dihedral(a)?,
        Command::Validate(a) => run_validate(a)?,
    };
    Ok(out)
}

fn config<A: Serialize>(name: &str, args: &A) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(m) = &mut v {
        m.insert("subcommand".into(), Value::String(name.into()));
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

/// JSON document on stdout, also written to `out` when given.
fn emit_json(v: &Value, out: Option<&PathBuf>) -> Result<String> {
    let text = pretty(v);
    if let Some(p) = out {
        write_file(p, &text)?;
    }
    Ok(text)
}

struct Spectral {
    catalog: SpectrumCatalog,
    f: HolonomyTestFunction<f64>,
    kernel: SmoothingKernel<f64>,
    scale: KernelScale<f64>,
}

fn load_spectral(a: &SpectralArgs) -> Result<Spectral> {
    let catalog = match &a.catalog {
        Some(p) => load_catalog(p, None)?,
        None => SpectrumCatalog::empty(),
    };
    let f = HolonomyTestFunction::parse_spec(&a.f)?;
    let kind: KernelKind = a.kernel.parse()?;
    let kernel = SmoothingKernel::new(kind)?;
    let scale = KernelScale::new(a.eta, a.eta0.unwrap_or(a.eta))?;
    Ok(Spectral {
        catalog,
        f,
        kernel,
        scale,
    })
}

fn cutoff_value(t: Option<f64>) -> Result<f64> {
    match t {
        None => Ok(f64::INFINITY),
        Some(t) if t > 0.0 => Ok(t),
        Some(t) => Err(Error::Config(format!("cutoff T must be positive, got {t}"))),
    }
}

fn signal_model(sp: &Spectral, cutoff: Option<f64>) -> Result<SignalModel<f64>> {
    SignalModel::new(&sp.catalog, &sp.f, &sp.kernel, &sp.scale, cutoff_value(cutoff)?)
}

fn run_bias(a: &BiasArgs) -> Result<String> {
    let sp = load_spectral(&a.spectral)?;
    let b = bias_constant(&sp.catalog, &sp.f, &sp.kernel, &sp.scale)?;
    let v = json!({
        "config": config("bias", a),
        "bias": b,
    });
    emit_json(&v, a.out.as_ref())
}

fn run_signal(a: &SignalArgs) -> Result<String> {
    let sp = load_spectral(&a.spectral)?;
    let model = signal_model(&sp, a.cutoff)?;
    let y0 = a.y_min.unwrap_or(sp.scale.eta0);
    if !(a.grid_step > 0.0) {
        return Err(Error::Config(format!("grid step must be positive, got {}", a.grid_step)));
    }
    if !(a.horizon >= y0) {
        return Err(Error::Config(format!("Y = {} is below the first grid point {y0}", a.horizon)));
    }
    let count = ((a.horizon - y0) / a.grid_step + 1e-9).floor() as usize + 1;
    let mut ys = Vec::with_capacity(count);
    let mut es = Vec::with_capacity(count);
    for k in 0..count {
        let y = y0 + a.grid_step * k as f64;
        ys.push(y);
        es.push(model.eval(y)?);
    }
    let csv = xy_csv(("y", "E"), &ys, &es)?;
    if let Some(p) = &a.svg {
        write_file(p, &svg_line_chart(&ys, &es, "E(y)"))?;
    }
    match &a.out {
        Some(p) => {
            write_file(p, &csv)?;
            let v = json!({
                "config": config("signal", a),
                "points": count,
                "bias": model.bias.value,
                "terms": model.terms.len(),
                "total_amplitude": model.total_amplitude(),
            });
            Ok(pretty(&v))
        }
        None => Ok(csv),
    }
}

fn xy_csv(header: (&str, &str), xs: &[f64], ys: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([header.0, header.1])?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Amplitude set and the relation lattice of its coordinates.
fn amplitude_source(a: &AmplitudeArgs) -> Result<(AmplitudeSet<f64>, RelationLattice)> {
    if let Some(amps) = &a.amplitudes {
        let set = AmplitudeSet::synthetic(amps.clone(), a.center)?;
        let n = set.coordinate_count();
        return Ok((set, RelationLattice::identity(n)));
    }
    let mode: CoordinateMode = a.mode.parse()?;
    let sp = load_spectral(&a.spectral)?;
    let model = signal_model(&sp, a.cutoff)?;
    let set = AmplitudeSet::from_signal(&model, mode);
    let truncated = sp.catalog.truncated(cutoff_value(a.cutoff)?);
    let lattice = match mode {
        CoordinateMode::PerClass => relation_lattice(&truncated)?,
        CoordinateMode::SharedFrequency => shared_lattice(&truncated, set.coordinate_count())?,
    };
    Ok((set, lattice))
}

/// Lattice over distinct frequencies in first-occurrence order.
fn shared_lattice(catalog: &SpectrumCatalog, n: usize) -> Result<RelationLattice> {
    if catalog.independence_declared {
        return Ok(RelationLattice::identity(n));
    }
    let mut seen: Vec<f64> = Vec::new();
    let mut freqs: Vec<ExactFrequency> = Vec::new();
    for l in &catalog.lines {
        if seen.contains(&l.s) {
            continue;
        }
        seen.push(l.s);
        match &l.exact {
            Some(e) => freqs.push(e.clone()),
            None => return relation_lattice(catalog),
        }
    }
    Ok(relation_lattice_from_frequencies(&freqs))
}

fn distribution_summary(d: &BiasDistribution<f64>) -> Value {
    json!({
        "mass": d.mass,
        "mean": d.mean,
        "center": d.center,
        "positive_probability": d.positive_probability,
        "symmetry_defect": d.symmetry_defect,
        "method": d.method,
        "clipped_min": d.clipped_min,
        "clipped_points": d.clipped_points,
        "fitted_constant": d.fitted_constant,
        "xi_max": d.xi_max,
        "panels": d.panels,
    })
}

fn amplitude_summary(set: &AmplitudeSet<f64>, lattice: &RelationLattice) -> Value {
    json!({
        "count": set.len(),
        "amplitudes": set.amplitudes,
        "total_amplitude": set.total_amplitude(),
        "mode": set.mode,
        "repeated_frequency_terms": set.repeated_frequency_terms,
        "torus_dimension": lattice.n,
        "subtorus_rank": lattice.rank,
        "relations": lattice.relations.iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn run_density(a: &DensityArgs) -> Result<String> {
    let (set, lattice) = amplitude_source(&a.source)?;
    if a.points < 3 {
        return Err(Error::Config("density grid needs at least 3 points".into()));
    }
    let grid = default_grid(&set, a.points, a.margin);
    let d = density_inversion(&set, &grid, a.tail_eps)?;
    if let Some(p) = &a.out {
        write_file(p, &xy_csv(("x", "p"), &d.grid, &d.density)?)?;
    }
    if let Some(p) = &a.svg {
        write_file(p, &svg_line_chart(&d.grid, &d.density, "density"))?;
    }
    let v = json!({
        "config": config("density", a),
        "amplitudes": amplitude_summary(&set, &lattice),
        "summary": distribution_summary(&d),
    });
    Ok(pretty(&v))
}

fn run_sample(a: &SampleArgs) -> Result<String> {
    let (set, lattice) = amplitude_source(&a.source)?;
    let functionals = a
        .functionals
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<Functional>>>()?;
    let options = SamplingOptions {
        qmc: a.qmc,
        bins: a.bins,
        keep_samples: false,
        functionals,
    };
    let r = sample_distribution(&set, &lattice, a.samples, a.seed, &options)?;
    let d = &r.distribution;
    if let Some(p) = &a.out {
        write_file(p, &xy_csv(("x", "p"), &d.grid, &d.density)?)?;
    }
    if let Some(p) = &a.svg {
        write_file(p, &svg_line_chart(&d.grid, &d.density, "empirical density"))?;
    }
    let v = json!({
        "config": config("sample", a),
        "amplitudes": amplitude_summary(&set, &lattice),
        "summary": distribution_summary(d),
        "n_samples": r.n_samples,
        "sample_mean": r.sample_mean,
        "sample_std": r.sample_std,
        "min": r.min,
        "max": r.max,
        "support": [set.support().0, set.support().1],
        "support_violations": r.support_violations,
        "functionals": r.functionals,
    });
    Ok(pretty(&v))
}

fn run_timeavg(a: &TimeavgArgs) -> Result<String> {
    let sp = load_spectral(&a.spectral)?;
    if !(sp.scale.eta0 < a.horizon) {
        return Err(Error::Config(format!(
            "time averaging needs eta0 < Y (eta0 = {}, Y = {})",
            sp.scale.eta0, a.horizon
        )));
    }
    let model = signal_model(&sp, a.cutoff)?;
    let step = match a.grid_step {
        Some(h) => h,
        None => {
            let s = model.max_frequency();
            if s > 0.0 {
                std::f64::consts::PI / (8.0 * s)
            } else {
                0.01
            }
        }
    };
    let mut averages = Vec::new();
    for name in &a.functionals {
        let h: Functional = name.parse()?;
        let value = time_average_model(&model, h, a.horizon, step)?;
        averages.push(json!({"h": h, "value": value}));
    }
    let v = json!({
        "config": config("timeavg", a),
        "grid_step_used_max": step,
        "bias": model.bias.value,
        "averages": averages,
    });
    emit_json(&v, a.out.as_ref())
}

fn run_geodesics(a: &GeodesicsArgs) -> Result<String> {
    let sp = load_spectral(&a.spectral)?;
    let records = load_geodesics(&a.geodesics)?;
    let weighting: Weighting = a.weighting.parse()?;
    let parity: Parity = a.parity.parse()?;
    let f = sp.f.clone();
    let sum = geometric_bias_sum(
        &records,
        |t| f.eval(t),
        &sp.kernel,
        &sp.scale,
        a.y,
        a.primitive_only,
        weighting,
    )?;
    let spectral = match &a.spectral.catalog {
        Some(_) => {
            let t = trace_rhs_spectral(&sp.catalog, &sp.f, &sp.kernel, &sp.scale, a.y, parity)?;
            json!(t)
        }
        None => Value::Null,
    };
    let v = json!({
        "config": config("geodesics", a),
        "records": records.len(),
        "geometric": sum,
        "spectral_main_terms": spectral,
        "dropped_error": TRACE_DROPPED_ERROR,
    });
    emit_json(&v, a.out.as_ref())
}

/// `n=a..b` or `a..b`, inclusive.
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let body = text.trim().strip_prefix("n=").unwrap_or(text.trim());
    let bad = || Error::Config(format!("bad range `{text}`; expected n=a..b"));
    let (lo, hi) = body.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn run_dihedral(a: &DihedralArgs) -> Result<String> {
    let (c1, c2) = if a.scan_generators {
        scanned_characters()?
    } else {
        standard_characters()?
    };
    let sol = solve_hecke(&c1, &c2)?;
    let mut v = json!({
        "config": config("dihedral", a),
        "solution": sol.to_json_value(),
    });
    if let Some(range) = &a.export {
        let range = parse_range(range)?;
        let p = a.p.unwrap_or(sol.k1_residue as i64);
        let cat = export_progression(&sol, range.clone(), p, a.mult)?;
        let offsets: Vec<String> = range
            .map(|n| format_rational(&(num_rational::BigRational::from_integer(n.into()) + &sol.t_offset)))
            .collect();
        if let Some(path) = &a.out {
            write_file(path, &cat.to_json())?;
        }
        v["catalog"] = cat.to_json_value();
        v["offsets"] = json!(offsets);
    }
    Ok(pretty(&v))
}

fn run_validate(a: &ValidateArgs) -> Result<String> {
    let cat = load_catalog(&a.catalog, None)?;
    let relations = match relation_lattice(&cat) {
        Ok(l) => json!({
            "rank": l.rank,
            "n": l.n,
            "relations": l.relations.iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "subtorus_basis": l.subtorus_basis.iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        Err(Error::RelationRefused(msg)) => json!({"refused": msg}),
        Err(e) => return Err(e),
    };
    let weyl = match a.volume {
        Some(vol) => json!(validate_weyl(&cat, vol, a.slack)?),
        None => Value::Null,
    };
    let v = json!({
        "config": config("validate", a),
        "lines": cat.lines.len(),
        "zero_lines": cat.zero_lines.len(),
        "independence_declared": cat.independence_declared,
        "exact_frequencies": cat.has_exact_frequencies(),
        "repeated_frequencies": cat.repeated_frequencies(),
        "relation_lattice": relations,
        "weyl": weyl,
        "catalog": cat.to_json_value(),
    });
    emit_json(&v, a.out.as_ref())
}

/// Minimal static SVG polyline chart.
pub fn svg_line_chart(xs: &[f64], ys: &[f64], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let finite = |v: &[f64]| {
        v.iter()
            .filter(|x| x.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    };
    let (x0, x1) = finite(xs);
    let (y0, y1) = finite(ys);
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (dx, dy) = (span(x0, x1), span(y0, y1));
    let mut points = String::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x.is_finite() && y.is_finite()) {
            continue;
        }
        let px = PAD + (x - x0) / dx * (W - 2.0 * PAD);
        let py = H - PAD - (y - y0) / dy * (H - 2.0 * PAD);
        let _ = write!(points, "{px:.2},{py:.2} ");
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.trim_end()
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="24" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="11">{x0:.4}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{x1:.4}</text>"#,
        H - 22.0,
        W - PAD,
        H - 22.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("n=0..9").unwrap(), 0..=9);
        assert_eq!(parse_range("-2..=3").unwrap(), -2..=3);
        assert!(parse_range("n=3..1").is_err());
        assert!(parse_range("0-9").is_err());
    }

    #[test]
    fn svg_is_closed() {
        let s = svg_line_chart(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], "a<b");
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a&lt;b"));
    }
}
