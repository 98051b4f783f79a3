//! Batch front end. Every subcommand writes one report
//! `{config, result, timestamp}`; only `timestamp` varies between runs with
//! the same arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::automorphism::AutomorphismFamily;
use crate::catalog::{self, CatalogEntry};
use crate::domain::{limit_along_filter, sample_balls, Domain, DoublingProfile, FilterBase, PointKind, SpaceFunction};
use crate::error::{Error, Result};
use crate::hardy::{
    check_h1_bound, h1q_norm_upper, n_bound, random_atom, transform_atom, verify_atom, AtomSampler,
    AtomicDecomposition,
};
use crate::operator::{check_lp_contraction, check_regularity, trial_rng, ApplyAt, HausdorffOperator};
use crate::point::Point;

#[derive(Debug, Parser)]
#[command(name = "hausdorff", version, about = "Hausdorff-type operators: evaluation, bounds and checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
struct OpArgs {
    /// Catalog entry name.
    #[arg(long = "op")]
    op: String,
    /// JSON object overriding the entry's default parameters.
    #[arg(long, default_value = "null")]
    params: String,
}

#[derive(Debug, Clone, Args)]
struct AtomArgs {
    /// Atom exponent, a number > 1 or `inf`.
    #[arg(long, default_value = "2", value_parser = parse_q)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Support radius range `lo,hi`; defaults to 25 to 40 grid spacings.
    #[arg(long, value_parser = parse_pair)]
    radius: Option<(f64, f64)>,
    /// Centers lie within this distance of the origin per coordinate.
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate H f at points, or on every domain node.
    Apply {
        #[command(flatten)]
        op: OpArgs,
        /// one, constant:<c>, gaussian, lorentzian, delta, monomial:<m,...>, offset-gaussian:<l>
        #[arg(long, default_value = "gaussian")]
        input: String,
        /// Evaluation point: a number, an array of numbers, or a point in JSON.
        #[arg(long = "at", allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Symbol quantities: the L^p bound, ∫Φ, ∫|Φ| and, given q, the H^1 constant.
    Bounds {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        p: f64,
        #[arg(long, value_parser = parse_q)]
        q: Option<f64>,
    },
    /// Largest ||H f||_p / ||f||_p over random test functions against the bound.
    Contraction {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Regularity defect and the spread of H f about a limit along a filter base.
    Regularity {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value = "one")]
        input: String,
        /// Limit of the input along the filter base.
        #[arg(long, default_value_t = 1.0)]
        limit: f64,
        /// beyond (|x| > k, the default) or shrinking:<n> (|z| < 1/k on n coordinates).
        #[arg(long, default_value = "beyond")]
        base: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Fail when the spread exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Random atoms, their transforms under sampled parameters, and the atom checks.
    Atoms {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        atom: AtomArgs,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        per_atom: usize,
    },
    /// H^{1,q} bookkeeping on a random finite decomposition.
    H1 {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        atom: AtomArgs,
        #[arg(long, default_value_t = 5)]
        terms: usize,
    },
    /// Empirical doubling constant and the extended doubling inequality.
    Doubling {
        /// Domain descriptor JSON.
        #[arg(long)]
        domain: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        centers: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0])]
        ks: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        slack: f64,
    },
    /// Operator catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    Build {
        name: String,
        #[arg(long, default_value = "null")]
        params: String,
    },
    Selftest {
        name: String,
        /// Shorthand for `--params '{"n": N}'`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "null")]
        params: String,
    },
}

fn parse_q(s: &str) -> std::result::Result<f64, String> {
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    match s.parse::<f64>() {
        Ok(q) if q >= 1.0 => Ok(q),
        _ => Err(format!("expected a number >= 1 or `inf`, got {s:?}")),
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => match (a.trim().parse(), b.trim().parse()) {
            (Ok(a), Ok(b)) if 0.0 < a && a <= b => Ok((a, b)),
            _ => Err(format!("expected `lo,hi` with 0 < lo <= hi, got {s:?}")),
        },
        _ => Err(format!("expected `lo,hi`, got {s:?}")),
    }
}

/// JSON-safe exponent: `inf` becomes the string "inf".
fn q_json(q: f64) -> Value {
    if q.is_infinite() {
        json!("inf")
    } else {
        json!(q)
    }
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

#[derive(Serialize)]
struct Report {
    config: Value,
    result: Value,
    timestamp: String,
}

enum Outcome {
    Json(Value),
    Csv(Vec<(Point, Complex64)>),
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Descriptor(_) | Error::InvalidParameter(_) | Error::PointKind { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// The entry's defaults overlaid with the given object.
fn resolve_params(entry: &CatalogEntry, given: &str) -> std::result::Result<Value, Failure> {
    let given: Value = serde_json::from_str(given).map_err(|e| {
        usage(format!("--params is not JSON ({e}); expected fields: {}", entry.default_params()))
    })?;
    let mut params = entry.default_params();
    match (&mut params, given) {
        (_, Value::Null) => {}
        (Value::Object(base), Value::Object(over)) => base.extend(over),
        (_, other) => return Err(usage(format!("--params must be an object, got {other}"))),
    }
    Ok(params)
}

fn build(op: &OpArgs) -> std::result::Result<(HausdorffOperator, Value), Failure> {
    let entry = catalog::find(&op.op).map_err(|e| {
        let names: Vec<&str> = catalog::entries().iter().map(|e| e.name).collect();
        usage(format!("{e}; available: {}", names.join(", ")))
    })?;
    let params = resolve_params(entry, &op.params)?;
    let built = entry.build(&params).map_err(|e| {
        let mut f = Failure::from(e);
        if f.code == 2 {
            f.message = format!("{}; expected fields: {}", f.message, entry.default_params());
        }
        f
    })?;
    Ok((built, json!({ "name": entry.name, "params": params })))
}

type Input = Arc<dyn SpaceFunction>;

fn coords(p: &Point) -> Vec<f64> {
    match p {
        Point::Int(k) => vec![*k as f64],
        Point::Real(v) => v.to_vec(),
        Point::Complex(z) => z.iter().map(|z| z.norm()).collect(),
        Point::Matrix { data, .. } => data.clone(),
        Point::Perm(s) => s.iter().map(|&i| i as f64).collect(),
    }
}

/// Named input functions; see the `--input` help.
fn input_function(spec: &str) -> Result<Input> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad number in {spec:?}")));
    let f: Input = match name {
        "one" => Arc::new(|_: &Point| Complex64::new(1.0, 0.0)),
        "constant" => {
            let c = number(arg)?;
            Arc::new(move |_: &Point| Complex64::new(c, 0.0))
        }
        "gaussian" => Arc::new(|p: &Point| Complex64::new((-coords(p).iter().map(|t| t * t).sum::<f64>()).exp(), 0.0)),
        "offset-gaussian" => {
            let l = number(arg)?;
            Arc::new(move |p: &Point| Complex64::new(l + (-coords(p).iter().map(|t| t * t).sum::<f64>()).exp(), 0.0))
        }
        "lorentzian" => Arc::new(|p: &Point| Complex64::new(1.0 / (1.0 + coords(p).first().map_or(f64::NAN, |t| t * t)), 0.0)),
        "delta" => Arc::new(|p: &Point| Complex64::new(if coords(p).iter().all(|&t| t == 0.0) { 1.0 } else { 0.0 }, 0.0)),
        "monomial" => {
            let m = arg
                .split(',')
                .map(|s| s.trim().parse::<i32>().map_err(|_| Error::InvalidParameter(format!("bad exponent in {spec:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Arc::new(catalog::monomial(m))
        }
        _ => return Err(Error::InvalidParameter(format!("unknown input {spec:?}"))),
    };
    Ok(f)
}

fn parse_point(s: &str, kind: PointKind) -> Result<Point> {
    let v: Value = serde_json::from_str(s)?;
    match (&v, kind) {
        (Value::Number(n), PointKind::Integer) if n.is_i64() => Ok(Point::Int(n.as_i64().unwrap_or_default())),
        // bare numbers on the torus are angles
        (Value::Number(_) | Value::Array(_), PointKind::TorusAngles(_)) => {
            let angles: Vec<f64> = match &v {
                Value::Array(xs) => xs.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect(),
                n => vec![n.as_f64().unwrap_or(f64::NAN)],
            };
            Ok(Point::complex_vec(&angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>()))
        }
        (Value::Number(n), _) => Ok(Point::real(n.as_f64().unwrap_or(f64::NAN))),
        (Value::Array(xs), _) if xs.iter().all(Value::is_number) => {
            Ok(Point::real_vec(&xs.iter().filter_map(Value::as_f64).collect::<Vec<_>>()))
        }
        _ => Ok(serde_json::from_value(v)?),
    }
}

fn profile_for(dom: &Domain) -> Result<DoublingProfile> {
    match dom.analytic_doubling() {
        Some(c) => DoublingProfile::new(c),
        None => {
            let h = dom.resolution();
            dom.estimate_doubling(&sample_balls(dom, &[4.0 * h, 8.0 * h], 3))
        }
    }
}

fn sampler_for(dom: &Domain, a: &AtomArgs) -> AtomSampler {
    let h = dom.resolution();
    let radius = a.radius.unwrap_or(if dom.point_kind() == PointKind::Integer { (2.0, 6.0) } else { (25.0 * h, 40.0 * h) });
    AtomSampler { center_spread: a.spread, radius }
}

fn require_bounds_data(fam: &AutomorphismFamily) -> Result<()> {
    if !fam.has_modulus() {
        return Err(Error::MissingModulus);
    }
    if !fam.has_metric_factor() {
        return Err(Error::MissingMetricFactor);
    }
    Ok(())
}

fn execute(command: &Command, config: &mut Value) -> std::result::Result<(Outcome, i32), Failure> {
    let ok = |v: Value| Ok((Outcome::Json(v), 0));
    match command {
        Command::Apply { op, input, at } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["input"] = json!(input);
            let f = input_function(input)?;
            let points = if at.is_empty() {
                h.domain().nodes()?.to_vec()
            } else {
                at.iter().map(|s| parse_point(s, h.domain().point_kind())).collect::<Result<Vec<_>>>()?
            };
            config["points"] = json!(points.len());
            let values = h.apply_grid(&*f, &points)?;
            Ok((Outcome::Csv(points.into_iter().zip(values).collect()), 0))
        }
        Command::Bounds { op, p, q } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["p"] = q_json(*p);
            let mut result = json!({
                "operator": h.name(),
                "p": q_json(*p),
                "bound": h.phi_norm_ap(*p)?,
                "phi_l1": h.phi_l1()?,
                "symbol_integral": cjson(h.symbol_integral()?),
                "regularity_defect": h.regularity_defect()?,
                "principal_value": h.is_principal_value(),
            });
            if let Some(q) = q {
                config["q"] = q_json(*q);
                let profile = profile_for(h.domain())?;
                result["q"] = q_json(*q);
                result["doubling"] = json!(profile);
                result["n_bound"] = json!(n_bound(&h, *q, &profile)?);
            }
            ok(result)
        }
        Command::Contraction { op, p, trials, seed } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["p"] = q_json(*p);
            config["trials"] = json!(trials);
            config["seed"] = json!(seed);
            match check_lp_contraction(&h, *p, *trials, *seed) {
                Ok(report) => {
                    let mut v = serde_json::to_value(&report).map_err(Error::from)?;
                    v["p"] = q_json(*p);
                    ok(v)
                }
                Err(Error::ViolatedBound { ratio, bound, descriptor }) => Ok((
                    Outcome::Json(json!({ "violated": true, "empirical": ratio, "bound": bound, "worst": descriptor })),
                    1,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Regularity { op, input, limit, base, depth, tolerance } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["input"] = json!(input);
            config["limit"] = json!(limit);
            config["base"] = json!(base);
            config["depth"] = json!(depth);
            config["tolerance"] = json!(tolerance);
            if tolerance.is_some_and(|t| !(t > 0.0)) {
                return Err(usage("--tolerance must be positive"));
            }
            let filter = match (base.split_once(':'), h.domain().point_kind()) {
                (Some(("shrinking", n)), _) => {
                    FilterBase::shrinking_balls(n.parse().map_err(|_| usage(format!("bad base {base:?}")))?)
                }
                (None, PointKind::Integer) if base == "beyond" => FilterBase::beyond_radius_integer(),
                (None, PointKind::RealVector(1)) if base == "beyond" => FilterBase::beyond_radius_real(),
                _ => return Err(usage(format!("filter base {base:?} does not fit this operator's points"))),
            };
            let f = input_function(input)?;
            let l = Complex64::new(*limit, 0.0);
            let (defect, spread) = check_regularity(&h, &filter, &*f, l, *depth)?;
            let estimate = limit_along_filter(&ApplyAt { op: &h, f: &*f }, &filter, *depth)?;
            let passed = tolerance.is_none_or(|t| spread <= t);
            Ok((
                Outcome::Json(json!({
                    "operator": h.name(),
                    "filter": filter.label(),
                    "defect": defect,
                    "symbol_integral": cjson(h.symbol_integral()?),
                    "spread": spread,
                    "limit_estimate": cjson(estimate.estimate),
                    "passed": passed,
                })),
                if passed { 0 } else { 1 },
            ))
        }
        Command::Atoms { op, atom, count, per_atom } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["q"] = q_json(atom.q);
            config["seed"] = json!(atom.seed);
            config["count"] = json!(count);
            config["per_atom"] = json!(per_atom);
            require_bounds_data(h.family())?;
            let dom = h.domain().clone();
            let profile = profile_for(&dom)?;
            let sampler = sampler_for(&dom, atom);
            config["radius"] = json!(sampler.radius);
            config["spread"] = json!(sampler.center_spread);
            let nodes = h.omega().nodes();
            let (mut checked, mut failed, mut first_failure) = (0usize, 0usize, None);
            for i in 0..*count {
                let mut rng = trial_rng(atom.seed, i);
                let a = random_atom(&dom, atom.q, &sampler, &mut rng)?;
                let mut outcomes = vec![verify_atom(&a)?];
                for _ in 0..*per_atom {
                    let u = &nodes[rng.gen_range(0..nodes.len())];
                    match transform_atom(&a, u, h.family(), &profile) {
                        Ok(t) => outcomes.push(verify_atom(&t)?),
                        Err(Error::WindowEscape(_)) => {}
                        Err(e) => {
                            failed += 1;
                            first_failure.get_or_insert(format!("atom {i}, u = {u}: {e}"));
                        }
                    }
                }
                for c in outcomes {
                    checked += 1;
                    if let Some(why) = c.failure() {
                        failed += 1;
                        first_failure.get_or_insert(format!("atom {i}: {why}"));
                    }
                }
            }
            Ok((
                Outcome::Json(json!({
                    "operator": h.name(),
                    "doubling": profile,
                    "checked": checked,
                    "failed": failed,
                    "first_failure": first_failure,
                })),
                if failed == 0 { 0 } else { 1 },
            ))
        }
        Command::H1 { op, atom, terms } => {
            let (h, descriptor) = build(op)?;
            config["operator"] = descriptor;
            config["q"] = q_json(atom.q);
            config["seed"] = json!(atom.seed);
            config["terms"] = json!(terms);
            let dom = h.domain().clone();
            let profile = profile_for(&dom)?;
            let sampler = sampler_for(&dom, atom);
            let mut rng = trial_rng(atom.seed, 0);
            let parts = (0..*terms)
                .map(|_| {
                    let alpha = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    Ok((alpha, random_atom(&dom, atom.q, &sampler, &mut rng)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let dec = AtomicDecomposition::new(parts, 0.0)?;
            match check_h1_bound(&h, &dec, &profile) {
                Ok(r) => {
                    let mut v = serde_json::to_value(&r).map_err(Error::from)?;
                    v["operator"] = json!(h.name());
                    v["coefficient_sum"] = json!(h1q_norm_upper(&dec));
                    v["n_bound"] = json!(n_bound(&h, atom.q, &profile)?);
                    v["doubling"] = json!(profile);
                    ok(v)
                }
                Err(Error::ViolatedBound { ratio, bound, descriptor }) => Ok((
                    Outcome::Json(json!({ "violated": true, "ratio": ratio, "bound": bound, "worst": descriptor })),
                    1,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Doubling { domain, radii, centers, ks, slack } => {
            let desc: Value = serde_json::from_str(domain).map_err(|e| usage(format!("--domain is not JSON: {e}")))?;
            config["domain"] = desc;
            config["radii"] = json!(radii);
            config["centers"] = json!(centers);
            config["ks"] = json!(ks);
            config["slack"] = json!(slack);
            let dom = Domain::from_json(domain)?;
            let balls = sample_balls(&dom, radii, *centers);
            let estimated = dom.estimate_doubling(&balls)?;
            let profile = match dom.analytic_doubling() {
                Some(c) => DoublingProfile::new(c)?,
                None => estimated,
            };
            let ratio = dom.extended_doubling_ratio(&profile, &balls, ks)?;
            let passed = ratio <= 1.0 + slack;
            Ok((
                Outcome::Json(json!({
                    "estimated": estimated,
                    "analytic": dom.analytic_doubling(),
                    "relative_gap": dom.analytic_doubling().map(|c| (estimated.c_nu - c).abs() / c),
                    "extended_ratio": ratio,
                    "passed": passed,
                })),
                if passed { 0 } else { 1 },
            ))
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                config["action"] = json!("list");
                ok(json!(catalog::entries()
                    .iter()
                    .map(|e| json!({ "name": e.name, "summary": e.summary, "defaults": e.default_params() }))
                    .collect::<Vec<_>>()))
            }
            CatalogAction::Build { name, params } => {
                config["action"] = json!("build");
                let (h, descriptor) = build(&OpArgs { op: name.clone(), params: params.clone() })?;
                config["operator"] = descriptor;
                let fam = h.family();
                ok(json!({
                    "operator": h.name(),
                    "parameter_nodes": h.omega().len(),
                    "principal_value": h.is_principal_value(),
                    "family": fam.name(),
                    "has_modulus": fam.has_modulus(),
                    "has_metric_factor": fam.has_metric_factor(),
                    "domain": h.domain().point_kind(),
                    "domain_nodes": h.domain().node_count(),
                    "symbol_integral": cjson(h.symbol_integral()?),
                    "phi_l1": h.phi_l1()?,
                }))
            }
            CatalogAction::Selftest { name, n, params } => {
                config["action"] = json!("selftest");
                let entry = catalog::find(name).map_err(Failure::from)?;
                let mut resolved = resolve_params(entry, params)?;
                if let Some(n) = n {
                    resolved["n"] = json!(n);
                }
                config["operator"] = json!({ "name": entry.name, "params": resolved });
                let report = entry.selftest(&resolved)?;
                let code = if report.passed { 0 } else { 1 };
                Ok((Outcome::Json(serde_json::to_value(&report).map_err(Error::from)?), code))
            }
        },
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Apply { .. } => "apply",
        Command::Bounds { .. } => "bounds",
        Command::Contraction { .. } => "contraction",
        Command::Regularity { .. } => "regularity",
        Command::Atoms { .. } => "atoms",
        Command::H1 { .. } => "h1",
        Command::Doubling { .. } => "doubling",
        Command::Catalog { .. } => "catalog",
    }
}

fn point_label(p: &Point) -> String {
    match p {
        Point::Int(k) => k.to_string(),
        Point::Real(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
        Point::Complex(z) => z.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn render(outcome: &Outcome, config: Value, format: Format) -> std::result::Result<Vec<u8>, Failure> {
    let result = match (outcome, format) {
        (Outcome::Csv(rows), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure { code: 1, message: e.to_string() };
            w.write_record(["x", "re", "im"]).map_err(io)?;
            for (x, v) in rows {
                w.write_record([point_label(x), v.re.to_string(), v.im.to_string()]).map_err(io)?;
            }
            return w.into_inner().map_err(|e| Failure { code: 1, message: e.to_string() });
        }
        (Outcome::Csv(rows), Format::Json) => {
            json!(rows.iter().map(|(x, v)| json!({ "x": x, "value": cjson(*v) })).collect::<Vec<_>>())
        }
        (Outcome::Json(v), Format::Json) => v.clone(),
        (Outcome::Json(_), Format::Csv) => return Err(usage("CSV output is only available for `apply`")),
    };
    let report = Report { config, result, timestamp: chrono::Utc::now().to_rfc3339() };
    let mut out = serde_json::to_vec_pretty(&report).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    out.push(b'\n');
    Ok(out)
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report. Returns the process exit code: 0 on success, 1 when a check
/// fails, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut config = json!({
        "subcommand": subcommand_name(&cli.command),
        "format": cli.format,
        "output": cli.output,
    });
    let outcome = execute(&cli.command, &mut config).and_then(|(o, code)| Ok((render(&o, config, cli.format)?, code)));
    let (bytes, code) = match outcome {
        Ok(x) => x,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return 1;
    }
    code
}
