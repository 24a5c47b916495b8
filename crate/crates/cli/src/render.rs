//! Plain-text reports.

use std::fmt::Write;

use mstat::geometry::{ConvexPolyhedron, PolyUnion};
use mstat::mappings::CoderivativeGraph;
use mstat::problems::{Ccmp, CcmpCrossCheck, MultiplierConditions, RelationReport};
use mstat::scalar::format_vector;
use mstat::stationarity::{PipelineReport, Verdict};
use mstat::Rational;

type R = Rational;

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict_word(v: &Verdict<R>) -> &'static str {
    if v.holds {
        "HOLDS"
    } else {
        "FAILS"
    }
}

fn witnesses(out: &mut String, v: &Verdict<R>, indent: &str) {
    let w = &v.witnesses;
    for (name, part) in [("λ", &w.lambda), ("μ", &w.mu), ("ν", &w.nu), ("ξ", &w.xi)] {
        if let Some(p) = part {
            let _ = writeln!(out, "{indent}{name:<10} {}", format_vector(p));
        }
    }
    for (name, p) in &w.extra {
        let _ = writeln!(out, "{indent}{name:<10} {}", format_vector(p));
    }
}

pub fn verdict(v: &Verdict<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {}", "check", v.kind);
    let _ = writeln!(out, "{:<12} {}", "point", format_vector(&v.point));
    let _ = writeln!(out, "{:<12} {}", "verdict", verdict_word(v));
    if let Some(all) = v.holds_for_all {
        let _ = writeln!(out, "{:<12} some stratum: {}, every stratum: {}", "aggregate", yes(v.holds), yes(all));
    }
    if let Some(s) = v.stratum {
        let _ = writeln!(out, "{:<12} {s}", "stratum");
    }
    if !v.witnesses.is_empty() {
        let label = if v.kind.is_stationarity() || v.holds { "witnesses" } else { "counterexample" };
        let _ = writeln!(out, "{label}");
        witnesses(&mut out, v, "  ");
    }
    if !v.strata.is_empty() {
        let _ = writeln!(out, "strata");
        let _ = writeln!(out, "  {:<4} {:<28} {}", "id", "λ̄", "verdict");
        for s in &v.strata {
            let lam = s.witnesses.lambda.as_deref().map(format_vector).unwrap_or_default();
            let _ = writeln!(out, "  {:<4} {:<28} {}", s.stratum.map(|i| i.to_string()).unwrap_or_default(), lam, verdict_word(s));
        }
    }
    if !v.certificates.is_empty() {
        let _ = writeln!(out, "certificates");
        for c in &v.certificates {
            let _ = writeln!(out, "  [{c}]");
        }
        for s in &v.certified {
            let _ = writeln!(out, "  - {s}");
        }
    }
    out.trim_end().to_string()
}

pub fn pipeline(r: &PipelineReport<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "point {}", format_vector(&r.point));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<28} {:<14} {}", "node", "status", "certificates");
    for n in &r.nodes {
        let status = serde_json::to_value(n.status).expect("serializable");
        let certs: Vec<String> = n.certificates.iter().map(|c| format!("[{c}]")).collect();
        let _ = writeln!(out, "{:<28} {:<14} {}", n.id, status.as_str().unwrap_or(""), certs.join(" "));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<60} {:<14} {}", "implication", "status", "anchor");
    for e in &r.edges {
        let status = serde_json::to_value(e.status).expect("serializable");
        let arrow = format!("{} ⇒ {}", e.from.join(" ∧ "), e.to);
        let _ = writeln!(out, "{:<60} {:<14} [{}]", arrow, status.as_str().unwrap_or(""), e.anchor);
    }
    let _ = writeln!(out);
    for c in &r.conclusions {
        let _ = writeln!(out, "conclusion: {c}");
    }
    let _ = writeln!(out, "consistent: {}", yes(r.consistent));
    out.trim_end().to_string()
}

pub fn cones(
    x: &[R],
    tangent: &PolyUnion<R>,
    regular: &ConvexPolyhedron<R>,
    limiting: &PolyUnion<R>,
    sampling: Option<(u64, (usize, Option<Vec<R>>))>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<16} {}", "point", format_vector(x));
    let _ = writeln!(out, "{:<16} {tangent}", "tangent");
    let _ = writeln!(out, "{:<16} {{{regular}}}", "regular normal");
    let _ = writeln!(out, "{:<16} {limiting}", "limiting normal");
    if let Some((seed, (checked, bad))) = sampling {
        match bad {
            None => {
                let _ = writeln!(out, "{:<16} seed {seed}: {checked} sampled regular normals, all in the limiting cone", "sampling");
            }
            Some(v) => {
                let _ = writeln!(out, "{:<16} seed {seed}: {} is not in the limiting cone", "sampling", format_vector(&v));
            }
        }
    }
    out.trim_end().to_string()
}

pub fn coderiv(
    z: &[R],
    w: &[R],
    g: &CoderivativeGraph<R>,
    aubin: bool,
    kernel: bool,
    query: Option<(&[R], &PolyUnion<R>)>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20} {} ↦ {}", "graph point", format_vector(z), format_vector(w));
    let _ = writeln!(out, "{:<20} {} (coordinates: η then ξ)", "gph D*", g.cone);
    let _ = writeln!(out, "{:<20} {}", "Aubin criterion", yes(aubin));
    let _ = writeln!(out, "{:<20} {}", "kernel trivial", yes(kernel));
    if let Some((eta, image)) = query {
        let _ = writeln!(out, "{:<20} {}", format!("D*({})", format_vector(eta)), image);
    }
    out.trim_end().to_string()
}

pub fn relation(r: &RelationReport<R>) -> String {
    let mut out = String::new();
    let list = |v: Vec<&[R]>| -> String {
        if v.len() > 12 {
            format!("{} points, first {}", v.len(), v[..12].iter().map(|p| format_vector(p)).collect::<Vec<_>>().join(" "))
        } else {
            v.iter().map(|p| format_vector(p)).collect::<Vec<_>>().join(" ")
        }
    };
    let _ = writeln!(out, "grid step {}, locality radius {}", r.step, r.radius);
    for (name, s) in [("implicit (z)", &r.p), ("explicit (z,λ)", &r.q)] {
        let _ = writeln!(out, "{name}");
        let _ = writeln!(out, "  grid points {}, feasible {}", s.grid_points, s.rows.len());
        let _ = writeln!(out, "  minimal value {}", s.min_value);
        let _ = writeln!(out, "  global minimizers {}", list(s.global_minimizers()));
        let _ = writeln!(out, "  local minimizers  {}", list(s.local_minimizers()));
    }
    let _ = writeln!(out, "global minimizers correspond: {}", yes(r.global_correspondence()));
    for z in &r.global_missing_in_q {
        let _ = writeln!(out, "  {} has no explicit partner", format_vector(z));
    }
    for z in &r.global_missing_in_p {
        let _ = writeln!(out, "  {} is an explicit global minimizer only", format_vector(z));
    }
    let _ = writeln!(out, "implicit local ⇒ explicit local violations: {}", r.direction_violations.len());
    for (z, l) in r.direction_violations.iter().take(12) {
        let _ = writeln!(out, "  z = {}, λ = {}", format_vector(z), format_vector(l));
    }
    let _ = writeln!(out, "explicit local minimizers whose z is not an implicit one: {}", r.counterexamples.len());
    for (z, l) in r.counterexamples.iter().take(12) {
        let _ = writeln!(out, "  (z, λ) = ({}, {})", format_vector(z), format_vector(l));
    }
    out.trim_end().to_string()
}

pub fn ccmp(c: &Ccmp<R>, reports: &[CcmpCrossCheck]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cardinality problem n = {}, κ = {}", c.n(), c.kappa());
    let _ = writeln!(out, "{:<16} {:<8} {:<8} {:<8} {:<8} {:<10} {:<8} {}", "point", "N_D", "K", "dom K", "strata", "explicit", "uniform", "bounded");
    for r in reports {
        let explicit: String = r.explicit_per_stratum.iter().map(|&h| if h { '+' } else { '-' }).collect();
        let _ = writeln!(
            out,
            "{:<16} {:<8} {:<8} {:<8} {:<8} {:<10} {:<8} {}",
            format!("({})", r.point.join(", ")),
            yes(r.normal_cone_equal),
            yes(r.k_equal),
            yes(r.domain_equal),
            r.strata,
            explicit,
            yes(r.explicit_uniform && r.explicit_matches_closed_form),
            yes(r.k_locally_bounded)
        );
    }
    let _ = writeln!(out, "all equalities pass: {}", yes(reports.iter().all(|r| r.all_pass())));
    out.trim_end().to_string()
}

pub fn bilevel(z: &[R], lambda: &[R], c: &MultiplierConditions, fully: bool, engine: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<34} {}", "point (x, y)", format_vector(z));
    let _ = writeln!(out, "{:<34} {}", "multiplier λ̄", format_vector(lambda));
    let _ = writeln!(out, "{:<34} {:?}", "active constraints", c.active);
    let _ = writeln!(out, "{:<34} {}", "strict MF condition", yes(c.strict_mf));
    let _ = writeln!(out, "{:<34} {}", "LICQ", yes(c.licq));
    let _ = writeln!(out, "{:<34} {}", "K(x̄, ȳ) = {λ̄}", yes(c.singleton));
    let _ = writeln!(out, "{:<34} {}", "fully explicit system", yes(fully));
    let _ = writeln!(out, "{:<34} {}", "engine explicit verdict", yes(engine));
    let _ = writeln!(out, "{:<34} {}", "agree", yes(fully == engine));
    out.trim_end().to_string()
}

pub fn emop(dom: &PolyUnion<R>, checked: usize, mismatches: &[Vec<R>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "weakly efficient set {dom}");
    let _ = writeln!(out, "grid points of Γ checked {checked}");
    let _ = writeln!(out, "mismatches with the grid dominance test {}", mismatches.len());
    for z in mismatches.iter().take(12) {
        let _ = writeln!(out, "  {}", format_vector(z));
    }
    out.trim_end().to_string()
}
