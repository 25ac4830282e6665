//! Command-line experiments: every run writes a JSON report (schema version,
//! config echo, result, verdict) and CSV fields where there are any.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anisohilbert::curves::{validate_convex_curve, TGrid};
use anisohilbert::kernels_lp::{
    annulus_nodes, h_z_field, homogeneity_error, hormander_sweep, k_z_field, lp_suite, BandTable, GridSpec, HzEvaluator,
    HzKernel, KzKernel, KzRoute, LPSystem,
};
use anisohilbert::multipliers::{default_curve_spec, m_z_convex, m_z_homogeneous, ml_bound_report, BoundGrid, DEFAULT_C0};
use anisohilbert::rotations::{cancellation_warning, rotation_identity, Parity, RotationWeight, SphereFunction};
use anisohilbert::transforms::{
    hilbert_direct, hilbert_fourier, lp_norm, op_norm_estimate, relative_l2, DirectHilbert, FourierHilbert, GridField,
    GridOperator, GridShape, MultiplierCache, ValueSpace,
};
use anisohilbert::{AnalyticParameter, ConvexProfile, Curve, DilationGroup, PVSpec};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "anisohilbert-report/1";
const OUT_ENV: &str = "ANISOHILBERT_OUT";

const EXIT_CHECK: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser, Serialize)]
#[command(name = "anisohilbert", version, about = "Hilbert transforms along curves and anisotropic kernels")]
struct Cli {
    /// Worker thread cap; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory (default: $ANISOHILBERT_OUT, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Anisotropic quasi-norm ρ(x).
    Rho(RhoArgs),
    /// Convexity hypotheses for γ on a log grid.
    CurveCheck(CurveCheckArgs),
    /// m_z at one frequency.
    Multiplier(MultiplierArgs),
    /// Marcinkiewicz–Lizorkin bound reports for the convex family.
    MlBounds(MlBoundsArgs),
    /// Littlewood–Paley partition checks.
    LpSystem(LpArgs),
    /// h_z or K_z on a grid with its homogeneity defect.
    Kernel(KernelArgs),
    /// Weighted Hörmander ratios over several z.
    Hormander(HormanderArgs),
    /// Hilbert transform of a grid field along a homogeneous curve.
    Transform(TransformArgs),
    /// Empirical operator norms across grid resolutions.
    Opnorm(OpnormArgs),
    /// Method of rotations identity check.
    Rotations(RotationsArgs),
}

#[derive(Args, Serialize)]
struct RhoArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args, Serialize)]
struct CurveCheckArgs {
    /// pow:<exponent> or texpinv.
    #[arg(long, default_value = "pow:2")]
    gamma: String,
    /// log:<min>:<max>:<count>.
    #[arg(long, default_value = "log:1e-3:1e3:241")]
    grid: String,
}

#[derive(Args, Serialize)]
struct MultiplierArgs {
    /// Homogeneous curve exponents; mutually exclusive with --gamma.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, allow_hyphen_values = true)]
    xi: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Serialize)]
struct MlBoundsArgs {
    #[arg(long, default_value = "pow:2")]
    gamma: String,
    /// One or more z as re,im.
    #[arg(long, allow_hyphen_values = true, required = true)]
    z: Vec<String>,
    #[arg(long, default_value = "log:1e-2:1e2:33")]
    grid: String,
    #[arg(long, default_value_t = DEFAULT_C0)]
    c0: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Serialize)]
struct LpArgs {
    #[arg(long, default_value = "1,2")]
    alpha: String,
    #[arg(long, default_value_t = 6)]
    jmax: i32,
    #[arg(long, default_value_t = 2000)]
    count: usize,
}

#[derive(Args, Serialize)]
struct KernelArgs {
    #[arg(long, default_value = "1,2")]
    alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-0.5,0")]
    z: String,
    /// hz or kz.
    #[arg(long, default_value = "hz")]
    kind: String,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 2.0)]
    half_width: f64,
    /// Angles of the K_z profile; 0 evaluates every node directly.
    #[arg(long, default_value_t = 256)]
    angles: usize,
}

#[derive(Args, Serialize)]
struct HormanderArgs {
    #[arg(long, default_value = "1,2")]
    alpha: String,
    #[arg(long, allow_hyphen_values = true, default_values_t = ["-0.5,0".to_string(), "-0.5,2".into(), "-0.5,4".into()])]
    z: Vec<String>,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value_t = 256)]
    angles: usize,
}

#[derive(Args, Serialize)]
struct FieldArgs {
    #[arg(long, default_value = "1,3")]
    alpha: String,
    /// real, lq:<q>:<m> or sp:<p>:<m>.
    #[arg(long, default_value = "real")]
    space: String,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long = "R", default_value_t = 2.0)]
    r: f64,
}

#[derive(Args, Serialize)]
struct TransformArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// direct, fourier or both.
    #[arg(long, default_value = "both")]
    route: String,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// CSV field with a JSON sidecar of the same stem; a seeded field otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct OpnormArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// direct or fourier.
    #[arg(long, default_value = "direct")]
    route: String,
    #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
    grids: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    /// Allowed growth between successive grids.
    #[arg(long, default_value_t = 0.05)]
    growth: f64,
}

#[derive(Args, Serialize)]
struct RotationsArgs {
    #[arg(long, default_value = "1,2")]
    alpha: String,
    /// cos, sin, cos3, one or odd:<seed>; ignored when coefficients are given.
    #[arg(long, default_value = "cos")]
    omega: String,
    /// Coefficients a_k of cos kθ, k = 1, 2, ….
    #[arg(long, allow_hyphen_values = true)]
    omega_cos: Option<String>,
    /// Coefficients b_k of sin kθ.
    #[arg(long, allow_hyphen_values = true)]
    omega_sin: Option<String>,
    #[arg(long, default_value_t = 64)]
    dirs: usize,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 512)]
    direct_nodes: usize,
    #[arg(long = "R", default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

enum Failure {
    Usage(String),
    Io(String),
    Compute(String),
}

impl From<anisohilbert::Error> for Failure {
    fn from(e: anisohilbert::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Run = Result<bool, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(|v| v.trim().parse::<f64>().or_else(|_| usage(format!("not a number list: '{s}'")))).collect()
}

fn parse_group(s: &str) -> Result<DilationGroup, Failure> {
    DilationGroup::new(parse_list(s)?).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_z(s: &str) -> Result<(f64, f64), Failure> {
    match parse_list(s)?[..] {
        [re] => Ok((re, 0.0)),
        [re, im] => Ok((re, im)),
        _ => usage(format!("z must be re or re,im, got '{s}'")),
    }
}

fn parse_gamma(s: &str) -> Result<ConvexProfile, Failure> {
    match s.split_once(':') {
        Some(("pow", e)) => Ok(ConvexProfile::Pow { exponent: e.parse().or_else(|_| usage(format!("bad exponent in '{s}'")))? }),
        None if s == "texpinv" => Ok(ConvexProfile::TExpInv),
        _ => usage(format!("unknown profile '{s}' (pow:<e> or texpinv)")),
    }
}

/// log:<min>:<max>:<count>.
fn parse_log_grid(s: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 || parts[0] != "log" {
        return usage(format!("grid must be log:<min>:<max>:<count>, got '{s}'"));
    }
    let num = |p: &str| p.parse::<f64>().or_else(|_| usage(format!("bad number '{p}' in '{s}'")));
    let count = parts[3].parse::<usize>().or_else(|_| usage(format!("bad count in '{s}'")))?;
    Ok((num(parts[1])?, num(parts[2])?, count))
}

fn parse_space(s: &str) -> Result<ValueSpace, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.parse::<f64>().or_else(|_| usage(format!("bad number '{p}' in '{s}'")));
    let dim = |p: &str| p.parse::<usize>().or_else(|_| usage(format!("bad dimension '{p}' in '{s}'")));
    let space = match parts[..] {
        ["real"] => ValueSpace::Real,
        ["lq", q, m] => ValueSpace::SequenceLq { q: num(q)?, m: dim(m)? },
        ["sp", p, m] => ValueSpace::SchattenP { p: num(p)?, m: dim(m)? },
        _ => return usage(format!("value space must be real, lq:<q>:<m> or sp:<p>:<m>, got '{s}'")),
    };
    space.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(space)
}

fn parse_omega(a: &RotationsArgs) -> Result<SphereFunction, Failure> {
    if a.omega_cos.is_some() || a.omega_sin.is_some() {
        let list = |v: &Option<String>| v.as_deref().map(parse_list).transpose().map(Option::unwrap_or_default);
        let (cos, sin) = (list(&a.omega_cos)?, list(&a.omega_sin)?);
        // Index k carries frequency k+1; only odd frequencies give Ω(−ω) = −Ω(ω).
        let odd = cos.iter().enumerate().chain(sin.iter().enumerate()).all(|(k, c)| k % 2 == 0 || *c == 0.0);
        let parity = if odd { Parity::Odd } else { Parity::Mixed };
        return SphereFunction::new(0.0, cos, sin, parity).map_err(|e| Failure::Usage(e.to_string()));
    }
    let s = a.omega.as_str();
    match s.split_once(':') {
        Some(("odd", seed)) => Ok(SphereFunction::seeded_odd(seed.parse().or_else(|_| usage(format!("bad seed in '{s}'")))?)),
        _ => Ok(SphereFunction::named(s).map_err(|e| Failure::Usage(e.to_string()))?),
    }
}

struct Output {
    dir: PathBuf,
    config: Value,
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::Io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }

    /// `<stem>.csv` plus a `<stem>.json` sidecar holding the schema tag, the
    /// config echo and the fields of `meta`.
    fn csv(&self, stem: &str, csv: &str, meta: Value) -> Result<(), Failure> {
        let mut side = json!({ "schema": SCHEMA, "config": self.config });
        if let (Value::Object(m), Some(side)) = (meta, side.as_object_mut()) {
            side.extend(m);
        }
        self.write(&format!("{stem}.csv"), csv)?;
        self.write(&format!("{stem}.json"), &serde_json::to_string_pretty(&side).expect("reports serialize"))
    }

    /// A grid field whose sidecar can be read back with `transform --input`.
    fn field(&self, stem: &str, f: &GridField) -> Result<(), Failure> {
        self.csv(stem, &f.to_csv(), to_value(f))
    }

    /// Writes `<name>.json` with the schema tag and config echo, prints it and
    /// passes the verdict through.
    fn report(&self, name: &str, result: Value, pass: bool) -> Run {
        let doc = json!({ "schema": SCHEMA, "command": name, "config": self.config, "pass": pass, "result": result });
        let text = serde_json::to_string_pretty(&doc).expect("reports serialize");
        self.write(&format!("{name}.json"), &text)?;
        println!("{text}");
        Ok(pass)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn rho(a: &RhoArgs) -> Result<f64, Failure> {
    Ok(parse_group(&a.alpha)?.rho(&parse_list(&a.x)?)?)
}

fn curve_check(o: &Output, a: &CurveCheckArgs) -> Run {
    let gamma = parse_gamma(&a.gamma)?;
    let (lo, hi, n) = parse_log_grid(&a.grid)?;
    let rep = validate_convex_curve(&gamma, &TGrid::log_spaced(lo, hi, n))?;
    o.report("curve-check", to_value(&rep), rep.all_hold())
}

fn multiplier(o: &Output, a: &MultiplierArgs) -> Run {
    let (re, im) = parse_z(&a.z)?;
    let xi = parse_list(&a.xi)?;
    let (m, curve) = match (&a.alpha, &a.gamma) {
        (Some(al), None) => {
            let z = AnalyticParameter::unrestricted(re, im);
            let curve = Curve::homogeneous(parse_group(al)?);
            let spec = default_curve_spec(&z)?.with_tolerance(a.tol);
            (m_z_homogeneous(&curve, &z, &xi, &spec)?, to_value(&curve))
        }
        (None, Some(g)) => {
            let gamma = parse_gamma(g)?;
            if xi.len() != 2 {
                return usage("the convex family lives in the plane: --xi needs two coordinates");
            }
            let z = AnalyticParameter::section4(re, im).map_err(|e| Failure::Usage(e.to_string()))?;
            (m_z_convex(&gamma, &z, xi[0], xi[1], a.tol)?, to_value(&gamma))
        }
        _ => return usage("give exactly one of --alpha and --gamma"),
    };
    o.report("multiplier", json!({ "curve": curve, "xi": xi, "z": [re, im], "re": m.re, "im": m.im, "abs": m.norm() }), true)
}

fn ml_bounds(o: &Output, a: &MlBoundsArgs) -> Run {
    let gamma = parse_gamma(&a.gamma)?;
    let (min, max, per_axis) = parse_log_grid(&a.grid)?;
    let grid = BoundGrid { min, max, per_axis, all_quadrants: true };
    let mut reports = Vec::new();
    let mut pass = true;
    for (k, zs) in a.z.iter().enumerate() {
        let (re, im) = parse_z(zs)?;
        let z = AnalyticParameter::section4(re, im).map_err(|e| Failure::Usage(e.to_string()))?;
        let sweep = ml_bound_report(&gamma, &z, &grid, a.c0, a.tol)?;
        let mut csv = String::from("xi,eta,re,im\n");
        for e in &sweep.evaluations {
            csv.push_str(&format!("{:e},{:e},{:e},{:e}\n", e.xi, e.eta, e.m.re, e.m.im));
        }
        o.csv(&format!("ml-bounds-{k}"), &csv, json!({ "z": [re, im], "gamma": to_value(&gamma) }))?;
        pass &= sweep.reports.iter().all(|r| r.pass);
        reports.push(json!({ "z": [re, im], "reports": to_value(&sweep.reports), "failures": sweep.failures }));
    }
    o.report("ml-bounds", Value::Array(reports), pass)
}

fn lp_system(o: &Output, a: &LpArgs, seed: u64) -> Run {
    let sys = LPSystem::new(parse_group(&a.alpha)?, a.jmax)?;
    let rep = lp_suite(&sys, a.count, seed)?;
    o.report("lp-system", to_value(&rep), rep.pass())
}

/// Kernel fields pass when the λ=2 homogeneity defect on 1/4 ≤ ρ ≤ 1 is at most 5%.
const KERNEL_HOMOGENEITY_TOL: f64 = 0.05;

fn kernel(o: &Output, a: &KernelArgs) -> Run {
    let g = parse_group(&a.alpha)?;
    let (re, im) = parse_z(&a.z)?;
    let z = AnalyticParameter::unrestricted(re, im);
    let grid = GridSpec::square(a.half_width, a.grid);
    let h = HzKernel::new(&g, &z, BandTable::default())?;
    let stride = (a.grid / 32).max(1);
    let pts = annulus_nodes(&g, &grid, 0.25, 1.0, stride);
    let (field, hom) = match a.kind.as_str() {
        "hz" => {
            let field = h_z_field(&h, &grid)?;
            let hom = homogeneity_error(&g, |x| h.eval(x), h.degree(), 2.0, &pts);
            (field, hom)
        }
        "kz" => {
            let kz = KzKernel::new(HzEvaluator::LpSum(h), Curve::homogeneous(g.clone()), &z)?;
            let route = if a.angles == 0 { KzRoute::Direct } else { KzRoute::Profile { angles: a.angles } };
            let field = k_z_field(&kz, &grid, route)?;
            let deg = num_complex::Complex64::new(g.delta_cap(), 0.0);
            let vals: Vec<_> = pts.iter().map(|&x| kz.eval(x)).collect::<Result<_, _>>()?;
            let hom = homogeneity_error(
                &g,
                |x| match pts.iter().position(|p| *p == x) {
                    Some(k) => vals[k],
                    None => kz.eval(x).unwrap_or(num_complex::Complex64::new(f64::NAN, 0.0)),
                },
                deg,
                2.0,
                &pts,
            );
            (field, hom)
        }
        other => return usage(format!("--kind must be hz or kz, got '{other}'")),
    };
    o.csv("kernel", &field.to_csv(), to_value(&field))?;
    let pass = hom.max_relative <= KERNEL_HOMOGENEITY_TOL;
    o.report("kernel", json!({ "field": to_value(&field), "homogeneity": to_value(&hom) }), pass)
}

fn hormander(o: &Output, a: &HormanderArgs, seed: u64) -> Run {
    let g = parse_group(&a.alpha)?;
    let zs: Vec<AnalyticParameter> =
        a.z.iter().map(|s| parse_z(s).map(|(re, im)| AnalyticParameter::unrestricted(re, im))).collect::<Result<_, _>>()?;
    let sweep = hormander_sweep(&g, &zs, a.samples, seed, a.angles)?;
    let pass = sweep.pass();
    o.report(
        "hormander",
        json!({
            "sweep": to_value(&sweep),
            "refinement_stable": sweep.refinement_stable(),
            "within_envelope": sweep.within_envelope(),
            "polynomial_growth": sweep.polynomial_growth(),
        }),
        pass,
    )
}

fn field_setup(a: &FieldArgs) -> Result<(Curve, ValueSpace, PVSpec), Failure> {
    let curve = Curve::homogeneous(parse_group(&a.alpha)?);
    let space = parse_space(&a.space)?;
    let spec = PVSpec::default().with_cutoffs(a.eps, a.r);
    spec.validate()?;
    Ok((curve, space, spec))
}

/// Reads `<stem>.csv` (coordinates then components per row) and the JSON
/// sidecar `<stem>.json` holding the GridField metadata.
fn read_field(path: &Path) -> Result<GridField, Failure> {
    let io = |p: &Path, e: std::io::Error| Failure::Io(format!("{}: {e}", p.display()));
    let side = path.with_extension("json");
    let meta: GridField = serde_json::from_str(&fs::read_to_string(&side).map_err(|e| io(&side, e))?)
        .or_else(|e| usage(format!("{}: {e}", side.display())))?;
    let text = fs::read_to_string(path).map_err(|e| io(path, e))?;
    let skip = meta.shape.dim();
    let mut values = Vec::new();
    for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        for v in line.split(',').skip(skip) {
            values.push(v.trim().parse::<f64>().or_else(|_| usage(format!("bad value '{v}' in {}", path.display())))?);
        }
    }
    Ok(GridField::new(meta.shape, meta.space, values)?)
}

fn transform(o: &Output, a: &TransformArgs, seed: u64) -> Run {
    let (curve, space, spec) = field_setup(&a.field)?;
    let f = match &a.input {
        Some(p) => read_field(p)?,
        None => GridField::random_band_limited(GridShape::unit(curve.dim(), a.grid), space, seed)?,
    };
    let norm_in = lp_norm(&f, a.p)?;
    let mut outs = Vec::new();
    if matches!(a.route.as_str(), "direct" | "both") {
        outs.push(("direct", hilbert_direct(&f, &curve, &spec)?));
    }
    if matches!(a.route.as_str(), "fourier" | "both") {
        let cache = MultiplierCache::new(curve.clone(), spec, f.shape.clone())?;
        outs.push(("fourier", hilbert_fourier(&f, &cache)?));
    }
    if outs.is_empty() {
        return usage(format!("--route must be direct, fourier or both, got '{}'", a.route));
    }
    let mut rows = Vec::new();
    for (route, g) in &outs {
        o.field(&format!("transform-{route}"), g)?;
        let norm_out = lp_norm(g, a.p)?;
        rows.push(json!({
            "route": route, "p": a.p, "value_space": space.label(),
            "norm_in": norm_in, "norm_out": norm_out, "ratio": norm_out / norm_in,
        }));
    }
    o.field("transform-input", &f)?;
    let discrepancy = if outs.len() == 2 { Some(relative_l2(&outs[0].1, &outs[1].1)?) } else { None };
    let pass = discrepancy.is_none_or(|d| d <= 1e-2);
    o.report("transform", json!({ "routes": rows, "route_discrepancy": discrepancy }), pass)
}

fn opnorm(o: &Output, a: &OpnormArgs, seed: u64) -> Run {
    let (curve, space, spec) = field_setup(&a.field)?;
    let mut rows = Vec::new();
    for &n in &a.grids {
        let shape = GridShape::unit(curve.dim(), n);
        let op: Box<dyn GridOperator> = match a.route.as_str() {
            "direct" => Box::new(DirectHilbert::new(curve.clone(), spec)?),
            "fourier" => Box::new(FourierHilbert { cache: MultiplierCache::new(curve.clone(), spec, shape.clone())? }),
            other => return usage(format!("--route must be direct or fourier, got '{other}'")),
        };
        rows.push(op_norm_estimate(op.as_ref(), a.p, space, &shape, a.trials, seed)?);
    }
    let growth: Vec<f64> = rows.windows(2).map(|w| w[1].estimate / w[0].estimate - 1.0).collect();
    let pass = growth.iter().all(|g| *g < a.growth);
    o.report("opnorm", json!({ "estimates": to_value(&rows), "growth": growth }), pass)
}

fn rotations(o: &Output, a: &RotationsArgs, seed: u64) -> Run {
    let g = parse_group(&a.alpha)?;
    let omega = parse_omega(a)?;
    let warning = cancellation_warning(&omega, &g, 256)?;
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let f = GridField::random_band_limited(GridShape::unit(2, a.grid), ValueSpace::Real, seed)?;
    let spec = PVSpec::default().with_cutoffs(1e-6, a.r);
    let (rep, direct, rot) = rotation_identity(&f, &omega, &g, &spec, a.dirs, a.direct_nodes, RotationWeight::Jacobian)?;
    o.field("rotations-direct", &direct)?;
    o.field("rotations-rot", &rot)?;
    let pass = rep.rel_discrepancy <= a.tol;
    o.report("rotations", json!({ "identity": to_value(&rep), "warning": warning }), pass)
}

fn run(cli: &Cli) -> Run {
    anisohilbert::parallel::set_max_threads(cli.threads);
    let dir = cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let o = Output { dir, config: to_value(cli) };
    match &cli.command {
        Command::Rho(a) => {
            let r = rho(a)?;
            println!("{r}");
            o.write("rho.json", &serde_json::to_string_pretty(&json!({ "schema": SCHEMA, "command": "rho", "config": o.config, "result": r })).expect("reports serialize"))?;
            Ok(true)
        }
        Command::CurveCheck(a) => curve_check(&o, a),
        Command::Multiplier(a) => multiplier(&o, a),
        Command::MlBounds(a) => ml_bounds(&o, a),
        Command::LpSystem(a) => lp_system(&o, a, cli.seed),
        Command::Kernel(a) => kernel(&o, a),
        Command::Hormander(a) => hormander(&o, a, cli.seed),
        Command::Transform(a) => transform(&o, a, cli.seed),
        Command::Opnorm(a) => opnorm(&o, a, cli.seed),
        Command::Rotations(a) => rotations(&o, a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
