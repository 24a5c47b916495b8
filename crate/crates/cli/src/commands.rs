use std::str::FromStr;

use mstat::geometry::{limiting_normal_cone, regular_normal_cone, tangent_cone, ConvexPolyhedron, PolyUnion};
use mstat::mappings::PolyMapping;
use mstat::problems::{
    ccmp_cross_check, oracle_relate, BilevelLq, Ccmp, EmopLinear, GridAxes, GridOracleConfig, Instance, Loaded,
};
use mstat::scalar::{parse_scalar, parse_vector, to_strings};
use mstat::stationarity::{check_cq, check_stationarity, pipeline, CheckKind, Session};
use mstat::{Error, Program, Rational, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::render;

type R = Rational;

/// 0 completed, 1 unreadable input, 2 precondition violated, 3 resource limit.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 1,
        Error::Dimension(_) | Error::Precondition(_) | Error::NoData(_) => 2,
        Error::Resource(_) => 3,
    }
}

enum Source {
    Instance(Box<Loaded<R>>),
    Set(PolyUnion<R>),
    Mapping(PolyMapping<R>),
}

fn load(path: &str) -> Result<Source> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{path}: line {}, column {}: {e}", e.line(), e.column())))?;
    let field = |k: &str| value.get(k).is_some();
    if field("type") {
        let instance = Instance::from_json_str(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{path}: {msg}")),
            other => other,
        })?;
        Ok(Source::Instance(Box::new(instance.build()?)))
    } else if field("pieces") {
        Ok(Source::Set(PolyUnion::from_json(&value).map_err(|e| Error::Parse(format!("{path}: {e}")))?))
    } else if field("graph") {
        Ok(Source::Mapping(PolyMapping::from_json(&value).map_err(|e| Error::Parse(format!("{path}: {e}")))?))
    } else {
        Err(Error::Parse(format!("{path}: expected a problem instance (with \"type\"), a set (with \"pieces\") or a mapping (with \"graph\")")))
    }
}

fn load_instance(path: &str) -> Result<Loaded<R>> {
    match load(path)? {
        Source::Instance(l) => Ok(*l),
        _ => Err(Error::Parse(format!("{path}: expected a problem instance with a \"type\" field"))),
    }
}

fn polyhedral(loaded: &Loaded<R>) -> Result<&Program> {
    loaded
        .program()
        .ok_or_else(|| Error::Precondition("this instance has no polyhedral encoding; only `relate` applies".into()))
}

fn vector(text: &str) -> Result<Vec<R>> {
    parse_vector(text)
}

fn output(json: bool, value: Value, text: String) -> String {
    if json {
        serde_json::to_string_pretty(&value).expect("serializable")
    } else {
        text
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Check { common, lambda, kind } => {
            let loaded = load_instance(&common.problem)?;
            let program = polyhedral(&loaded)?;
            let z = vector(&common.point)?;
            let lambda = lambda.as_deref().map(vector).transpose()?;
            let kind = CheckKind::from_str(kind)?;
            let v = if kind.is_stationarity() {
                check_stationarity(program, &z, kind, lambda.as_deref())?
            } else {
                check_cq(program, &z, lambda.as_deref(), kind)?
            };
            Ok(output(common.json, v.to_json(), render::verdict(&v)))
        }
        Command::Pipeline { common } => {
            let loaded = load_instance(&common.problem)?;
            let program = polyhedral(&loaded)?;
            let report = pipeline(program, &vector(&common.point)?)?;
            Ok(output(common.json, report.to_json(), render::pipeline(&report)))
        }
        Command::Cones { common, map, seed, samples } => {
            let set = select_set(load(&common.problem)?, map.as_deref())?;
            let x = vector(&common.point)?;
            cones(&set, &x, *seed, *samples, common.json)
        }
        Command::Coderiv { common, map, value, eta } => {
            let mapping = select_mapping(load(&common.problem)?, map.as_deref())?;
            let z = vector(&common.point)?;
            let w = match value {
                Some(v) => vector(v)?,
                None => vec![R::from_integer(0.into()); mapping.n_out()],
            };
            let eta = eta.as_deref().map(vector).transpose()?;
            coderiv(&mapping, &z, &w, eta.as_deref(), common.json)
        }
        Command::Relate { problem, grid_step, r#box, radius, json } => {
            let loaded = load_instance(problem)?;
            let oracle = loaded.oracle();
            let dim = oracle.n() + oracle.m();
            let (lo, hi) = parse_box(r#box, dim)?;
            let config = GridOracleConfig { lo, hi, step: parse_scalar(grid_step)?, radius: *radius };
            let report = oracle_relate(oracle, &config)?;
            Ok(output(*json, report.to_json(), render::relation(&report)))
        }
        Command::Crosscheck { problem, point, lambda, grid_step, json } => {
            let loaded = load_instance(problem)?;
            let point = point.as_deref().map(vector).transpose()?;
            let lambda = lambda.as_deref().map(vector).transpose()?;
            match &loaded {
                Loaded::Ccmp(c) => crosscheck_ccmp(c, point, *json),
                Loaded::Bilevel(b) => crosscheck_bilevel(b, point, lambda, *json),
                Loaded::Emop(e) => crosscheck_emop(e, &parse_scalar(grid_step)?, *json),
                _ => Err(Error::Precondition("crosscheck applies to ccmp, bilevel_lq and emop_linear instances".into())),
            }
        }
    }
}

fn parse_box(text: &str, dim: usize) -> Result<(Vec<R>, Vec<R>)> {
    let ranges: Vec<(R, R)> = text
        .split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once("..")
                .ok_or_else(|| Error::Parse(format!("box side '{part}' is not of the form lo..hi")))?;
            Ok((parse_scalar(lo)?, parse_scalar(hi)?))
        })
        .collect::<Result<_>>()?;
    let ranges = match ranges.len() {
        1 => vec![ranges[0].clone(); dim],
        k if k == dim => ranges,
        k => return Err(Error::Parse(format!("--box lists {k} ranges, expected 1 or {dim}"))),
    };
    Ok(ranges.into_iter().unzip())
}

fn select_set(source: Source, which: Option<&str>) -> Result<PolyUnion<R>> {
    match source {
        Source::Set(u) => Ok(u),
        Source::Mapping(m) => Ok(m.graph().clone()),
        Source::Instance(loaded) => {
            let p = polyhedral(&loaded)?;
            let d = p.derived();
            match which.unwrap_or("m").to_ascii_lowercase().replace('_', "-").as_str() {
                "m" => Ok(p.m_set().clone()),
                "gph-f" => Ok(p.f().graph().clone()),
                "gph-g" => Ok(p.g().graph().clone()),
                "gph-h" => Ok(d.h.graph().clone()),
                "gph-k" => Ok(d.k.graph().clone()),
                "dom-k" => d.k.domain(),
                other => Err(Error::Parse(format!("unknown set '{other}'"))),
            }
        }
    }
}

fn select_mapping(source: Source, which: Option<&str>) -> Result<PolyMapping<R>> {
    match source {
        Source::Mapping(m) => Ok(m),
        Source::Set(_) => Err(Error::Parse("coderiv needs a mapping or a problem instance".into())),
        Source::Instance(loaded) => {
            let p = polyhedral(&loaded)?;
            let d = p.derived();
            let key = which.ok_or_else(|| Error::Parse("--map is required for problem instances".into()))?;
            Ok(match key.to_ascii_lowercase().replace('_', "-").as_str() {
                "f" => p.f().clone(),
                "g" => p.g().clone(),
                "h" => d.h.clone(),
                "h-m" => d.h_m.clone(),
                "k" => d.k.clone(),
                "k-hat" => d.k_hat.clone(),
                "cal-h" => d.cal_h.clone(),
                "cal-h-m" => d.cal_h_m.clone(),
                "frak-h-m" => d.frak_h_m.clone(),
                "hat-h" => d.hat_h.clone(),
                "aux" => d.aux.clone(),
                other => return Err(Error::Parse(format!("unknown mapping '{other}'"))),
            })
        }
    }
}

/// Regular normals of the tangent cone at sampled points, each of which must
/// lie in the limiting normal cone. The tangent cone is the local model of
/// the set, so its normals at any point are regular normals of the set at
/// points arbitrarily close to `x`.
fn sample_normals(set: &PolyUnion<R>, x: &[R], limiting: &PolyUnion<R>, seed: u64, samples: usize) -> Result<(usize, Option<Vec<R>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tangent = tangent_cone(set, x)?;
    let d = set.dim();
    let unit_box = |d: usize| {
        ConvexPolyhedron::boxed(&vec![R::from_integer((-1).into()); d], &vec![R::from_integer(1.into()); d])
    };
    let random_objective = |rng: &mut ChaCha8Rng| -> Vec<R> { (0..d).map(|_| R::from_integer(rng.gen_range(-5i64..=5).into())).collect() };
    let mut checked = 0;
    for _ in 0..samples {
        let piece = &tangent.pieces()[rng.gen_range(0..tangent.pieces().len())];
        let c = random_objective(&mut rng);
        let Some(y) = piece.intersect(&unit_box(d))?.maximize(&c).point().map(|p| p.to_vec()) else { continue };
        let normal = regular_normal_cone(&tangent, &y)?;
        let c = random_objective(&mut rng);
        let Some(v) = normal.intersect(&unit_box(d))?.maximize(&c).point().map(|p| p.to_vec()) else { continue };
        checked += 1;
        if !limiting.contains(&v) {
            return Ok((checked, Some(v)));
        }
    }
    Ok((checked, None))
}

fn cones(set: &PolyUnion<R>, x: &[R], seed: Option<u64>, samples: usize, json: bool) -> Result<String> {
    let tangent = tangent_cone(set, x)?;
    let regular = regular_normal_cone(set, x)?;
    let limiting = limiting_normal_cone(set, x)?;
    let sampled = seed.map(|s| sample_normals(set, x, &limiting, s, samples)).transpose()?;
    let mut value = json!({
        "point": to_strings(x),
        "tangent": tangent.to_json(),
        "regular_normal": regular.to_json(),
        "limiting_normal": limiting.to_json(),
    });
    if let Some((checked, bad)) = &sampled {
        value["sampling"] = json!({
            "seed": seed,
            "checked": checked,
            "counterexample": bad.as_ref().map(|v| to_strings(v)),
        });
    }
    Ok(output(json, value, render::cones(x, &tangent, &regular, &limiting, seed.zip(sampled))))
}

fn coderiv(mapping: &PolyMapping<R>, z: &[R], w: &[R], eta: Option<&[R]>, json: bool) -> Result<String> {
    let g = mapping.coderivative_graph(z, w)?;
    let image = eta.map(|e| g.apply(e)).transpose()?;
    let aubin = g.aubin();
    let kernel = g.kernel_trivial();
    let value = json!({
        "point": to_strings(z),
        "value": to_strings(w),
        "graph": g.cone.to_json(),
        "aubin": aubin,
        "metric_regularity": kernel,
        "eta": eta.map(to_strings),
        "image": image.as_ref().map(|u| u.to_json()),
    });
    Ok(output(json, value, render::coderiv(z, w, &g, aubin, kernel, eta.zip(image.as_ref()))))
}

fn crosscheck_ccmp(c: &Ccmp<R>, point: Option<Vec<R>>, json: bool) -> Result<String> {
    let points: Vec<Vec<R>> = match point {
        Some(z) => vec![z],
        None => {
            let n = c.n();
            let total = 3usize.pow(n as u32);
            (0..total)
                .map(|mut k| {
                    (0..n)
                        .map(|_| {
                            let v = (k % 3) as i64 - 1;
                            k /= 3;
                            R::from_integer(v.into())
                        })
                        .collect::<Vec<R>>()
                })
                .filter(|z| c.program().is_feasible(z).unwrap_or(false))
                .collect()
        }
    };
    let reports = points.iter().map(|z| ccmp_cross_check(c, z)).collect::<Result<Vec<_>>>()?;
    let value = json!({ "n": c.n(), "kappa": c.kappa(), "reports": reports, "all_pass": reports.iter().all(|r| r.all_pass()) });
    Ok(output(json, value, render::ccmp(c, &reports)))
}

fn crosscheck_bilevel(b: &BilevelLq<R>, point: Option<Vec<R>>, lambda: Option<Vec<R>>, json: bool) -> Result<String> {
    let z = point.ok_or_else(|| Error::Precondition("bilevel crosscheck needs --point (x, y)".into()))?;
    let lambda = lambda.ok_or_else(|| Error::Precondition("bilevel crosscheck needs --lambda".into()))?;
    let conditions = b.multiplier_conditions(&z, &lambda)?;
    let fully = b.fully_explicit(&z, &lambda)?;
    let engine = Session::new(b.program(), &z)?.check_at(CheckKind::Explicit, &lambda)?;
    let value = json!({
        "point": to_strings(&z),
        "lambda": to_strings(&lambda),
        "conditions": conditions,
        "fully_explicit": fully.holds,
        "engine_explicit": engine.holds,
        "agree": fully.holds == engine.holds,
    });
    Ok(output(json, value, render::bilevel(&z, &lambda, &conditions, fully.holds, engine.holds)))
}

fn crosscheck_emop(e: &EmopLinear<R>, step: &R, json: bool) -> Result<String> {
    let gamma = &e.gamma;
    let n = gamma.dim();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = vec![R::from_integer(0.into()); n];
        c[k] = R::from_integer(1.into());
        hi.push(gamma.sup(&c).ok_or_else(|| Error::Precondition("Γ is unbounded".into()))?);
        c[k] = R::from_integer((-1).into());
        lo.push(-gamma.sup(&c).ok_or_else(|| Error::Precondition("Γ is unbounded".into()))?);
    }
    let axes = GridAxes::new(&lo, &hi, step)?;
    let dom = e.weakly_efficient_set()?;
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for flat in 0..axes.len() {
        let z = axes.point(flat);
        if !gamma.contains(&z) {
            continue;
        }
        checked += 1;
        let grid = e.grid_weakly_efficient(&z, &lo, &hi, step)?;
        if grid != dom.contains(&z) {
            mismatches.push(z);
        }
    }
    let value = json!({
        "weakly_efficient_set": dom.to_json(),
        "grid_points": checked,
        "mismatches": mismatches.iter().map(|z| to_strings(z)).collect::<Vec<_>>(),
        "agree": mismatches.is_empty(),
    });
    Ok(output(json, value, render::emop(&dom, checked, &mismatches)))
}

