//! The `bernoulli` command line.
//!
//! Exit codes: 0 on success, 1 when the library rejects an input or a file
//! cannot be written, 2 on usage errors (nothing is written in that case).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebraic::{
    classify, classify_t_root, feng_wang_test, feng_wang_threshold, singularity_test,
    RootSelector,
};
use crate::curves::{
    curve_intersection, curve_of, horn_borders, horn_words, landmark_scan, orbit_outside_d,
    t_star, HornWord, IntersectionRecord,
};
use crate::error::{Error, Result};
use crate::field::{compute_field, DensityField, MeasureParams};
use crate::measure::{
    local_dimension, phase_of, unique_address_check, MeasureMethod, DEFAULT_BINS,
    DEFAULT_BURN_IN, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::polynomial::IntegerPolynomial;
use crate::render::{render, Colormap, Overlay, RenderSpec};
use crate::sequence::BinarySequence;

/// Environment variable overriding the default worker count of `field`.
pub const WORKERS_ENV: &str = "BERNOULLI_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "bernoulli", version, about = "Bernoulli convolutions and their density field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Histogram of nu_t.
    Measure(MeasureArgs),
    /// Density field over a t-range, written in raw BATL1 format.
    Field(FieldArgs),
    /// Render a raw field to PGM/PPM.
    Render(RenderArgs),
    /// Address curve y_b(t).
    Curve(CurveArgs),
    /// Entry parameter t* of an itinerary.
    Tstar(SeqArgs),
    /// Border polynomials of all horns up to a level.
    Horns(HornsArgs),
    /// Intersections of horn borders.
    Landmarks(LandmarksArgs),
    /// Intersection of two address curves.
    Intersect(IntersectArgs),
    /// Classify an algebraic integer.
    Classify(ClassifyArgs),
    /// Local dimension estimate at a point.
    Dim(DimArgs),
    /// Phase label of a parameter.
    Phase(PhaseArgs),
}

#[derive(Args, Debug, Clone)]
struct MethodArgs {
    /// transfer, chaos or inverse.
    #[arg(long, default_value = "transfer")]
    method: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Chaos game sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Inverse iteration depth.
    #[arg(long, default_value_t = 20)]
    depth: u32,
}

impl MethodArgs {
    fn params(&self) -> Result<MeasureParams> {
        Ok(MeasureParams {
            method: self.method.parse::<MeasureMethod>()?,
            tol: self.tol,
            max_iter: self.max_iter,
            samples: self.samples,
            seed: self.seed,
            burn_in: self.burn_in,
            depth: self.depth,
        })
    }
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    method: MethodArgs,
    /// Histogram CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CDF CSV output.
    #[arg(long)]
    cdf_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long, default_value_t = 0.5)]
    t_lo: f64,
    #[arg(long, default_value_t = 0.76)]
    t_hi: f64,
    #[arg(long, default_value_t = 1000)]
    cols: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    method: MethodArgs,
    /// Worker threads; defaults to $BERNOULLI_WORKERS or the core count.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Also export this column as CSV (needs --column-out).
    #[arg(long, requires = "column_out")]
    column: Option<usize>,
    #[arg(long, requires = "column")]
    column_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Raw field produced by `field`.
    #[arg(long)]
    input: PathBuf,
    /// Output image; .pgm selects grayscale unless --colormap is given.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    colormap: Option<String>,
    #[arg(long, default_value_t = 99.5)]
    clip: f64,
    #[arg(long, default_value_t = 0.8)]
    gamma: f64,
    #[arg(long)]
    height: Option<usize>,
    /// Address curve overlay (repeatable), e.g. 1/3 or 01(10).
    #[arg(long = "curve")]
    curves: Vec<String>,
    /// Horn overlay (repeatable), e.g. D_01.
    #[arg(long = "horn")]
    horns: Vec<String>,
    /// Overlay every horn up to this level.
    #[arg(long)]
    horn_level: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SeqArgs {
    /// Sequence as p/q or pre(per).
    #[arg(long)]
    b: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    b: String,
    /// Evaluate the curve at this parameter.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct HornsArgs {
    #[arg(long, default_value_t = 2)]
    level: usize,
    /// Evaluate the borders at this parameter.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct LandmarksArgs {
    #[arg(long, default_value_t = 3)]
    level: usize,
    /// Only intersections inside the central horn.
    #[arg(long)]
    inside: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct IntersectArgs {
    #[arg(long)]
    b: String,
    #[arg(long)]
    c: String,
    /// Add the full case report: classification and singularity criteria.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Ascending integer coefficients of a polynomial in beta.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "tpoly", required_unless_present = "tpoly")]
    poly: Option<String>,
    /// Ascending integer coefficients of a polynomial in t = 1/beta.
    #[arg(long, allow_hyphen_values = true)]
    tpoly: Option<String>,
    /// Pick the root nearest to this value (beta for --poly, t for --tpoly).
    #[arg(long)]
    near: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[arg(long)]
    t: f64,
    #[arg(long)]
    y: f64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 1e-4)]
    eps_lo: f64,
    #[arg(long, default_value_t = 1e-2)]
    eps_hi: f64,
    #[arg(long, default_value_t = 16)]
    points: usize,
    /// Orbit depth of the unique-address check.
    #[arg(long, default_value_t = 60)]
    orbit_depth: usize,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long)]
    t: f64,
    #[arg(long)]
    json: bool,
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Measure(a) => measure(a),
        Command::Field(a) => field(a),
        Command::Render(a) => render_cmd(a),
        Command::Curve(a) => curve(a),
        Command::Tstar(a) => tstar(a),
        Command::Horns(a) => horns(a),
        Command::Landmarks(a) => landmarks(a),
        Command::Intersect(a) => intersect(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Dim(a) => dim(a),
        Command::Phase(a) => phase(a),
    }
}

fn emit(json: bool, value: &Value, plain: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        print!("{}", plain());
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Domain(format!("cannot write {}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn parse_seq(flag: &str, s: &str) -> Result<BinarySequence> {
    s.parse::<BinarySequence>()
        .map_err(|e| Error::Domain(format!("--{flag} {s:?}: {e}")))
}

fn parse_poly(flag: &str, s: &str) -> Result<IntegerPolynomial> {
    let coeffs = s
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Domain(format!("--{flag} {s:?}: expected comma-separated integers")))?;
    Ok(IntegerPolynomial::new(coeffs))
}

fn measure(a: MeasureArgs) -> Result<()> {
    let params = a.method.params()?;
    let h = params.histogram(a.t, a.bins, 0)?;
    let cdf = h.cdf();
    if let Some(path) = &a.out {
        let mut buf = Vec::new();
        h.write_csv(&mut buf).map_err(|e| io_err(path, e))?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &a.cdf_out {
        let mut buf = Vec::new();
        cdf.write_csv(h.method, &mut buf).map_err(|e| io_err(path, e))?;
        write_file(path, &buf)?;
    }
    let q = cdf.quantile(1.0 / 3.0);
    let peak = h.peak_density();
    let v = json!({
        "t": a.t,
        "method": h.method.to_string(),
        "bins": h.bins(),
        "quantile_1_3": q,
        "peak_density": peak,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    emit(a.json, &v, || {
        format!(
            "t = {:.6}  method = {}  bins = {}\n1/3-quantile = {q:.6}\npeak density = {peak:.6}\n",
            a.t,
            h.method,
            h.bins()
        )
    });
    Ok(())
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn field(a: FieldArgs) -> Result<()> {
    let params = a.method.params()?;
    let workers = a.workers.unwrap_or_else(default_workers);
    let f = compute_field(a.t_lo, a.t_hi, a.cols, a.bins, &params, workers)?;
    if let Some(c) = a.column {
        if c >= f.cols() {
            return Err(Error::Domain(format!("--column {c}: field has {} columns", f.cols())));
        }
    }
    let raw = f.export_raw();
    write_file(&a.out, &raw)?;
    if let (Some(c), Some(path)) = (a.column, &a.column_out) {
        let mut buf = Vec::new();
        f.write_column_csv(c, &mut buf).map_err(|e| io_err(path, e))?;
        write_file(path, &buf)?;
    }
    let v = json!({
        "cols": f.cols(),
        "y_bins": f.y_bins(),
        "t_lo": a.t_lo,
        "t_hi": a.t_hi,
        "workers": workers,
        "bytes": raw.len(),
        "out": a.out.display().to_string(),
        "provenance": f.provenance(),
    });
    emit(a.json, &v, || {
        format!(
            "field {} x {} over [{:.6}, {:.6}] with {workers} workers\nwrote {} bytes to {}\n",
            f.cols(),
            f.y_bins(),
            a.t_lo,
            a.t_hi,
            raw.len(),
            a.out.display()
        )
    });
    Ok(())
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let bytes = fs::read(&a.input)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", a.input.display())))?;
    let f = DensityField::import_raw(&bytes)?;
    let colormap = match &a.colormap {
        Some(c) => c.parse::<Colormap>()?,
        None if a.out.extension().is_some_and(|e| e == "pgm") => Colormap::Gray,
        None => Colormap::Heat,
    };
    let mut overlays = Vec::new();
    for c in &a.curves {
        overlays.push(Overlay::Curve(parse_seq("curve", c)?));
    }
    for h in &a.horns {
        overlays.push(Overlay::Horn(h.parse::<HornWord>()?));
    }
    if let Some(l) = a.horn_level {
        overlays.push(Overlay::HornLevels(l));
    }
    let spec = RenderSpec {
        colormap,
        clip_percentile: a.clip,
        gamma: a.gamma,
        height: a.height,
        overlays,
    };
    let img = render(&f, &spec)?;
    write_file(&a.out, &img)?;
    let v = json!({
        "width": f.cols(),
        "height": a.height.unwrap_or(f.y_bins()).min(f.y_bins()),
        "format": if colormap == Colormap::Gray { "P5" } else { "P6" },
        "bytes": img.len(),
        "out": a.out.display().to_string(),
    });
    emit(a.json, &v, || format!("wrote {} bytes to {}\n", img.len(), a.out.display()));
    Ok(())
}

fn curve(a: CurveArgs) -> Result<()> {
    let b = parse_seq("b", &a.b)?;
    let c = curve_of(&b);
    let y = a.t.map(|t| c.eval(t)).transpose()?;
    let v = json!({
        "b": b.to_string(),
        "value": b.value().to_string(),
        "numerator": c.numerator(),
        "denominator": c.denominator(),
        "t": a.t,
        "y": y,
    });
    emit(a.json, &v, || {
        let mut s = format!("b = {b} = {}\ny_b(t) = {c}\n", b.value());
        if let (Some(t), Some(y)) = (a.t, y) {
            s += &format!("y_b({t:.6}) = {y:.10}\n");
        }
        s
    });
    Ok(())
}

fn tstar(a: SeqArgs) -> Result<()> {
    let b = parse_seq("b", &a.b)?;
    let ts = t_star(&b)?;
    let v = json!({
        "b": b.to_string(),
        "kneading": ts.kneading.to_string(),
        "t_star": ts.t,
        "unique": ts.is_unique(),
        "extra_roots": ts.extra_roots,
    });
    emit(a.json, &v, || {
        let mut s = format!("b = {b}\nkneading = {}\nt* = {:.10}\n", ts.kneading, ts.t);
        if !ts.is_unique() {
            s += &format!("further roots: {:?}\n", ts.extra_roots);
        }
        s
    });
    Ok(())
}

fn horns(a: HornsArgs) -> Result<()> {
    if let Some(t) = a.t {
        if !(0.5..1.0).contains(&t) {
            return Err(Error::Domain(format!("--t {t} outside [1/2, 1)")));
        }
    }
    let rows: Vec<Value> = horn_words(a.level)
        .iter()
        .map(|w| {
            let b = horn_borders(w);
            json!({
                "horn": w.to_string(),
                "lower": b.lower,
                "upper": b.upper,
                "lower_at_t": a.t.map(|t| b.lower.eval(t)),
                "upper_at_t": a.t.map(|t| b.upper.eval(t)),
            })
        })
        .collect();
    let v = json!({ "level": a.level, "t": a.t, "horns": rows });
    emit(a.json, &v, || {
        horn_words(a.level)
            .iter()
            .map(|w| {
                let b = horn_borders(w);
                let mut s = format!("{w}: lower {}, upper {}", b.lower, b.upper);
                if let Some(t) = a.t {
                    s += &format!("  [{:.6}, {:.6}]", b.lower.eval(t), b.upper.eval(t));
                }
                s + "\n"
            })
            .collect()
    });
    Ok(())
}

fn landmarks(a: LandmarksArgs) -> Result<()> {
    let records: Vec<IntersectionRecord> = landmark_scan(a.level)?
        .into_iter()
        .filter(|r| !a.inside || r.inside_d)
        .collect();
    let tags: Vec<Option<String>> = records
        .iter()
        .map(|r| {
            classify_t_root(&r.cleared_polynomial.without_rational_roots(), r.s)
                .ok()
                .map(|c| c.tag.to_string())
        })
        .collect();
    let rows: Vec<Value> = records
        .iter()
        .zip(&tags)
        .map(|(r, tag)| {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["tag"] = json!(tag);
            v
        })
        .collect();
    let v = json!({ "level": a.level, "records": rows });
    emit(a.json, &v, || {
        records
            .iter()
            .zip(&tags)
            .map(|(r, tag)| {
                format!(
                    "s = {:.6}  z = {:.6}  {}  {:<10} {}\n",
                    r.s,
                    r.z,
                    if r.inside_d { "in D " } else { "     " },
                    tag.as_deref().unwrap_or("-"),
                    r.cleared_polynomial
                )
            })
            .collect()
    });
    Ok(())
}

fn intersect(a: IntersectArgs) -> Result<()> {
    let b = parse_seq("b", &a.b)?;
    let c = parse_seq("c", &a.c)?;
    let records = curve_intersection(&b, &c)?;
    let Some(rec) = records.iter().find(|r| r.inside_d) else {
        let v = json!({ "b": b.to_string(), "c": c.to_string(), "case": null, "records": records });
        emit(a.json, &v, || format!("no intersection of {b} and {c} inside D\n"));
        return Ok(());
    };
    let case = match (b.is_periodic(), c.is_periodic()) {
        (true, true) => "iii",
        (false, false) => "i",
        _ => "ii",
    };
    let addresses = match case {
        "i" => json!(2),
        "ii" => json!("countable"),
        _ => json!("uncountable"),
    };
    let orbit_ok = orbit_outside_d(rec)?;
    let mut v = json!({
        "b": b.to_string(),
        "c": c.to_string(),
        "s": rec.s,
        "z": rec.z,
        "case": case,
        "addresses": addresses,
        "orbit_outside_D": orbit_ok,
        "assumption_violated": case != "iii" && !orbit_ok,
        "poly": rec.cleared_polynomial,
    });
    let mut plain = format!(
        "s = {:.6}  z = {:.6}\ncase ({case}), addresses: {}\norbit outside D: {orbit_ok}\ncleared polynomial: {}\n",
        rec.s,
        rec.z,
        match case {
            "i" => "2",
            "ii" => "countable",
            _ => "uncountable",
        },
        rec.cleared_polynomial
    );
    if case != "iii" && !orbit_ok {
        plain += "assumption violated: the orbit of z enters D\n";
    }
    if a.full {
        let reduced = rec.cleared_polynomial.without_rational_roots();
        let class = classify_t_root(&reduced, rec.s).ok();
        v["reduced_poly"] = json!(reduced);
        v["class"] = json!(class);
        v["records"] = json!(records);
        plain += &format!("after removing rational roots: {reduced}\n");
        if let Some(cl) = &class {
            plain += &format!("beta = {:.10} is {}\n", cl.beta, cl.tag);
        }
        if case == "iii" {
            let (m, n) = (b.period_len() as u32, c.period_len() as u32);
            let rep = singularity_test(m, n, rec.s);
            let degree = reduced.degree() as u32;
            let fw = feng_wang_test(degree, rec.s);
            v["singularity"] = json!({
                "m": m,
                "n": n,
                "singular": rep.singular,
                "growth_rate": rep.growth_rate,
                "dim_bound": rep.dim_bound,
            });
            v["feng_wang"] = json!({
                "degree": degree,
                "threshold": feng_wang_threshold(degree),
                "applies": fw,
            });
            plain += &format!(
                "periods m = {m}, n = {n}: growth rate {:.6}, singular {}, local dimension <= {:.6}\nFeng-Wang (degree {degree}, threshold {:.6}): {}\n",
                rep.growth_rate,
                rep.singular,
                rep.dim_bound,
                feng_wang_threshold(degree),
                if fw { "applies" } else { "does not apply" }
            );
        }
    }
    emit(a.json, &v, || plain);
    Ok(())
}

fn classify_cmd(a: ClassifyArgs) -> Result<()> {
    let class = match (&a.poly, &a.tpoly) {
        (Some(p), _) => {
            let p = parse_poly("poly", p)?;
            let sel = a.near.map_or(RootSelector::LargestReal, RootSelector::NearestTo);
            classify(&p, sel)?
        }
        (None, Some(p)) => {
            let p = parse_poly("tpoly", p)?;
            let t = match a.near {
                Some(t) => t,
                None => *p.roots_in_unit_half().first().ok_or_else(|| {
                    Error::Domain(format!("--tpoly {p} has no root in (1/2, 1)"))
                })?,
            };
            classify_t_root(&p, t)?
        }
        (None, None) => unreachable!("clap requires one of --poly, --tpoly"),
    };
    let mut v = serde_json::to_value(&class).expect("serializable");
    v["t"] = json!(1.0 / class.beta);
    emit(a.json, &v, || {
        format!(
            "{}: beta = {:.10}, t = {:.10}\nconjugate moduli: {}\nminimality verified: {}\n",
            class.tag,
            class.beta,
            1.0 / class.beta,
            class
                .conjugate_moduli
                .iter()
                .map(|m| format!("{m:.6}"))
                .collect::<Vec<_>>()
                .join(", "),
            class.minimality_verified
        )
    });
    Ok(())
}

fn dim(a: DimArgs) -> Result<()> {
    let params = a.method.params()?;
    let h = params.histogram(a.t, a.bins, 0)?;
    let d = local_dimension(&h.cdf(), a.y, a.eps_lo, a.eps_hi, a.points)?;
    let orbit = unique_address_check(a.t, a.y, a.orbit_depth)?;
    let unique_dim = 2f64.ln() / (1.0 / a.t).ln();
    let v = json!({
        "t": a.t,
        "y": a.y,
        "slope": if d.zero_mass { Value::Null } else { json!(d.slope) },
        "zero_mass": d.zero_mass,
        "residuals": d.residuals,
        "unique_address_dimension": unique_dim,
        "orbit_status": orbit.status,
        "orbit_steps": orbit.steps.len() - 1,
    });
    emit(a.json, &v, || {
        let slope = if d.zero_mass {
            "+inf (a ball of measure zero)".to_string()
        } else {
            format!("{:.6}", d.slope)
        };
        format!(
            "local dimension at y = {:.6}, t = {:.6}: {slope}\nlog 2 / log beta = {unique_dim:.6}\norbit: {:?} after {} steps\n",
            a.y,
            a.t,
            orbit.status,
            orbit.steps.len() - 1
        )
    });
    Ok(())
}

fn phase(a: PhaseArgs) -> Result<()> {
    let p = phase_of(a.t)?;
    let v = json!({ "t": a.t, "phase": p });
    emit(a.json, &v, || format!("t = {:.6}: phase {p}\n", a.t));
    Ok(())
}

/// Flushes stdout; used by the binary before exiting.
pub fn flush() {
    let _ = std::io::stdout().flush();
}
