//! Subcommand implementations. Each returns a [`Report`]: text for the
//! terminal, JSON for `--format json` and `--out`, and a pass flag.

use std::fmt::Display;
use std::fs;

use mixquiv::generators::{model_quiver, suitable_generator, sigma_rs, YoungLayout, DEFAULT_R_CAP};
use mixquiv::hat::{HatQuiver, Multidegree};
use mixquiv::paths::enumerate_cycles;
use mixquiv::perm::ClassIntervals;
use mixquiv::quiver::DVertex;
use mixquiv::relations::{
    graded_span_dimension, paths_between, substitute_sigma_rs, verify_invariance, verify_vanishing,
};
use mixquiv::rep::derive_seed;
use mixquiv::special::identities::{check_eq_t, check_generalized_vanishing, check_sigma_shift, IdentityCheck};
use mixquiv::special::ortho::{invariance_suite, ortho_quiver};
use mixquiv::trstar::{contract, trstar_blocks};
use mixquiv::{
    DimensionVector, FieldSpec, Flavor, PathElement, Permutation, PrimeField, Quiver, Rationals,
    TraceExpression, VerificationReport,
};
use serde_json::{json, Value};

pub type Res<T> = Result<T, String>;

pub fn err(e: impl Display) -> String {
    e.to_string()
}

pub struct Report {
    pub text: String,
    pub json: Value,
    pub passed: bool,
}

impl Report {
    fn info(text: String, json: Value) -> Self {
        Report { text, json, passed: true }
    }
}

/// Expected outcome of a randomized vanishing check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Expect {
    Auto,
    Vanish,
    Nonvanish,
}

/// A JSON file path or one of `builtin:loops:<m>`, `builtin:model`, `builtin:ortho:<m>`.
pub fn load_quiver(spec: &str) -> Res<(Quiver, Option<DimensionVector>)> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let (name, arg) = rest.split_once(':').unwrap_or((rest, ""));
        let count = || -> Res<usize> {
            match arg.parse::<usize>() {
                Ok(m) if m > 0 => Ok(m),
                _ => Err(format!("builtin:{name} needs a positive arrow count, got `{arg}`")),
            }
        };
        return match name {
            "loops" => Ok((Quiver::loops(count()?), None)),
            "ortho" => Ok((ortho_quiver(count()?), None)),
            "model" => Ok((model_quiver(), None)),
            _ => Err(format!("unknown builtin quiver `{name}`")),
        };
    }
    let text = fs::read_to_string(spec).map_err(|e| format!("cannot read quiver {spec}: {e}"))?;
    Quiver::from_json(&text).map_err(err)
}

/// `--dims` if given (`"1:2,2:2"` or a single uniform dimension), else the quiver file's.
pub fn resolve_dims(q: &Quiver, dims: Option<&str>, from_file: Option<DimensionVector>) -> Res<DimensionVector> {
    match dims {
        Some(text) => match text.trim().parse::<usize>() {
            Ok(d) => Ok(DimensionVector::uniform(q, d)),
            Err(_) => DimensionVector::parse(q, text, None).map_err(err),
        },
        None => from_file.ok_or_else(|| "no dimension vector: pass --dims or add `dims` to the quiver file".into()),
    }
}

/// `2` or `2*`.
pub fn parse_vertex(q: &Quiver, text: &str) -> Res<DVertex> {
    let t = text.trim();
    let (num, star) = match t.strip_suffix('*') {
        Some(n) => (n, true),
        None => (t, false),
    };
    let v: usize = num.parse().map_err(|_| format!("bad vertex `{text}`"))?;
    if v == 0 || v > q.vertex_count() {
        return Err(format!("vertex {v} outside 1..={}", q.vertex_count()));
    }
    if star {
        if q.is_starred(v) || !q.ordinary().contains(&v) {
            return Err(format!("vertex {v} has no starred copy"));
        }
        Ok(DVertex::Star(v))
    } else {
        Ok(DVertex::Base(v))
    }
}

fn show_vertex(v: DVertex) -> String {
    match v {
        DVertex::Base(u) => u.to_string(),
        DVertex::Star(u) => format!("{u}*"),
    }
}

pub fn parse_multidegree(text: &str) -> Res<Multidegree> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad multidegree entry `{p}`")))
        .collect::<Res<Vec<_>>>()
        .map(Multidegree)
}

fn parse_usize_list(text: &str) -> Res<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad entry `{p}`")))
        .collect()
}

fn check_cap(cap: usize) -> Res<Vec<String>> {
    if cap == 0 {
        return Err("--cap must be positive".into());
    }
    Ok(if cap > DEFAULT_R_CAP {
        vec![format!("warning: r cap {cap} exceeds the default {DEFAULT_R_CAP}; sums over S_r grow factorially")]
    } else {
        Vec::new()
    })
}

pub fn cycles(quiver: &str, max_len: usize, vertex: Option<&str>) -> Res<Report> {
    if max_len == 0 {
        return Err("--max-len must be positive".into());
    }
    let (q, _) = load_quiver(quiver)?;
    let base = vertex.map(|v| parse_vertex(&q, v)).transpose()?;
    let list: Vec<String> = enumerate_cycles(&q, max_len, base).iter().map(|c| c.display(&q)).collect();
    Ok(Report::info(list.join("\n"), json!({ "max_len": max_len, "count": list.len(), "cycles": list })))
}

pub fn trstar(r: usize, s: usize, perm: &str, passive: Option<&str>) -> Res<Report> {
    if 2 * s > r {
        return Err(format!("need 2s <= r, got r = {r}, s = {s}"));
    }
    let iv = ClassIntervals { t: r - 2 * s, s };
    let tau = Permutation::parse_cycles(perm, r).map_err(err)?;
    let by_contract = contract(&tau, iv).map_err(err)?;
    let (word, method) = match passive {
        Some(b) => {
            let set: Vec<usize> = parse_usize_list(b)?
                .into_iter()
                .map(|x| x.checked_sub(1).ok_or_else(|| "passive positions are 1-based".to_string()))
                .collect::<Res<_>>()?;
            (trstar_blocks(&tau, &set, iv).map_err(err)?, "blocks")
        }
        None => (by_contract.clone(), "contract"),
    };
    let agrees = word.equivalent(&by_contract);
    let mut text = word.to_string();
    if !agrees {
        text.push_str(&format!("\nmismatch: contracting rules give {by_contract}"));
    }
    Ok(Report {
        text,
        json: json!({
            "r": r, "s": s, "perm": tau.to_string(), "method": method,
            "word": word.to_string(), "contract": by_contract.to_string(), "agrees": agrees,
        }),
        passed: agrees,
    })
}

pub fn sigma_rs_cmd(r: usize, s: usize, cap: usize, latex: bool) -> Res<Report> {
    let warnings = check_cap(cap)?;
    let q = model_quiver();
    let e = sigma_rs(r, s, cap).map_err(err)?;
    let shown = if latex { e.latex(&q) } else { e.display(&q) };
    let mut lines = warnings;
    lines.push(shown.clone());
    Ok(Report::info(
        lines.join("\n"),
        json!({ "r": r, "s": s, "terms": e.len(), "expr": shown, "emit": if latex { "latex" } else { "expr" } }),
    ))
}

fn with_field<T>(
    spec: &str,
    run_q: impl FnOnce(&Rationals) -> Res<T>,
    run_p: impl FnOnce(&PrimeField) -> Res<T>,
) -> Res<T> {
    match spec.parse::<FieldSpec>().map_err(err)? {
        FieldSpec::Rationals => run_q(&Rationals::default()),
        FieldSpec::Prime(p) => run_p(&PrimeField::new(p).map_err(err)?),
    }
}

fn check_trials(trials: usize) -> Res<()> {
    if trials == 0 {
        return Err("--trials must be positive".into());
    }
    Ok(())
}

fn verification_report(name: &str, rep: &VerificationReport, expect_vanish: bool) -> Report {
    let vanished = rep.passed();
    let passed = vanished == expect_vanish;
    let mut json = serde_json::to_value(rep).expect("report serializes");
    let obj = json.as_object_mut().expect("object");
    obj.insert("expect".into(), json!(if expect_vanish { "vanish" } else { "nonvanish" }));
    obj.insert("passed".into(), json!(passed));
    let mut text = format!(
        "{} {name}: {} in {} trials over {}, seed {} (expected {})\n  expr: {}\n  bound: {:.3e} per trial, log2 total {:.1}",
        if passed { "PASS" } else { "FAIL" },
        if vanished { "all zero" } else { "counterexample" },
        rep.trials,
        rep.field,
        rep.seed,
        if expect_vanish { "vanish" } else { "nonvanish" },
        rep.expr,
        rep.prob_bound,
        rep.prob_bound_log2_total,
    );
    if let Some(w) = &rep.witness {
        text.push_str(&format!("\n  witness: trial {}, value {}{}", w.trial, w.value, if w.shrunk { " (small entries)" } else { "" }));
        for (arrow, rows) in &w.point {
            let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(" "))).collect();
            text.push_str(&format!("\n    {arrow} = {}", rows.join(" ")));
        }
    }
    Report { text, json, passed }
}

/// Path elements for `σ_{r,s}`; missing ones default to the first shortest path.
pub struct Elements<'a> {
    pub f1: Option<&'a str>,
    pub f2: Option<&'a str>,
    pub f3: Option<&'a str>,
    pub vertex: Option<&'a str>,
}

const DEFAULT_PATH_LEN: usize = 4;

fn resolve_elements(
    q: &Quiver,
    el: &Elements,
    t: usize,
    s: usize,
) -> Res<(DVertex, Option<PathElement>, Option<PathElement>, Option<PathElement>)> {
    let parse = |f: Option<&str>| f.map(|t| PathElement::parse(q, t).map_err(err)).transpose();
    let (g1, g2, g3) = (parse(el.f1)?, parse(el.f2)?, parse(el.f3)?);
    let fixed = match el.vertex {
        Some(v) => Some(parse_vertex(q, v)?),
        None => g1.as_ref().map(|f| f.source()).or(g2.as_ref().map(|f| f.source())).or(g3.as_ref().map(|f| f.target())),
    };
    let candidates: Vec<DVertex> = match fixed {
        Some(u) => vec![u],
        None => (1..=q.vertex_count()).filter(|&v| !q.is_starred(v)).map(DVertex::Base).collect(),
    };
    let first = |from: DVertex, to: DVertex| paths_between(q, from, to, DEFAULT_PATH_LEN).into_iter().next();
    for u in candidates {
        let pick = |given: &Option<PathElement>, needed: bool, from: DVertex, to: DVertex| -> Res<Option<Option<PathElement>>> {
            if let Some(f) = given {
                return Ok(Some(Some(f.clone())));
            }
            if !needed {
                return Ok(Some(None));
            }
            match first(from, to) {
                Some(p) => Ok(Some(Some(PathElement::path(q, p).map_err(err)?))),
                None => Ok(None),
            }
        };
        let partner = q.star(u);
        if let (Some(h1), Some(h2), Some(h3)) =
            (pick(&g1, t > 0, u, u)?, pick(&g2, s > 0, u, partner)?, pick(&g3, s > 0, partner, u)?)
        {
            return Ok((u, h1, h2, h3));
        }
    }
    Err(format!("no vertex carries the paths needed for r = {}, s = {s}; pass --f1/--f2/--f3", t + 2 * s))
}

fn substituted(q: &Quiver, el: &Elements, r: usize, s: usize, cap: usize) -> Res<(DVertex, TraceExpression)> {
    let t = r.checked_sub(2 * s).ok_or_else(|| format!("need 2s <= r, got r = {r}, s = {s}"))?;
    let (u, f1, f2, f3) = resolve_elements(q, el, t, s)?;
    let e = substitute_sigma_rs(q, f1.as_ref(), f2.as_ref(), f3.as_ref(), r, s, cap).map_err(err)?;
    Ok((u, e))
}

pub struct RandomRun<'a> {
    pub quiver: &'a str,
    pub dims: Option<&'a str>,
    pub field: &'a str,
    pub trials: usize,
    pub seed: u64,
    pub expect: Expect,
}

pub fn verify_relations(run: &RandomRun, r: usize, s: usize, cap: usize, el: &Elements) -> Res<Report> {
    check_trials(run.trials)?;
    let warnings = check_cap(cap)?;
    let (q, file_dims) = load_quiver(run.quiver)?;
    let dv = resolve_dims(&q, run.dims, file_dims)?;
    let (u, e) = substituted(&q, el, r, s, cap)?;
    let expect_vanish = match run.expect {
        Expect::Auto => r > dv.at_doubled(u),
        Expect::Vanish => true,
        Expect::Nonvanish => false,
    };
    let rep = with_field(
        run.field,
        |f| verify_vanishing(f, &q, &e, &dv, run.trials, run.seed).map_err(err),
        |f| verify_vanishing(f, &q, &e, &dv, run.trials, run.seed).map_err(err),
    )?;
    let mut out = verification_report(&format!("relations r={r} s={s} at vertex {}", show_vertex(u)), &rep, expect_vanish);
    prepend(&mut out, warnings);
    Ok(out)
}

fn prepend(report: &mut Report, lines: Vec<String>) {
    if !lines.is_empty() {
        report.text = format!("{}\n{}", lines.join("\n"), report.text);
    }
}

/// `full`, `singletons`, or size lists per cell such as `2,1;3`.
fn parse_layout(hq: &HatQuiver, text: &str) -> Res<YoungLayout> {
    let sets = hq.admissibility_sets();
    match text.trim() {
        "full" => Ok(YoungLayout::full(&sets)),
        "singletons" => Ok(YoungLayout::singletons(&sets)),
        other => {
            let sizes = other.split(';').map(parse_usize_list).collect::<Res<Vec<_>>>()?;
            YoungLayout::from_sizes(&sets, &sizes).map_err(err)
        }
    }
}

pub fn verify_suitable(run: &RandomRun, multidegree: &str, sigma1: Option<&str>, layout: &str, cap: usize) -> Res<Report> {
    check_trials(run.trials)?;
    let warnings = check_cap(cap)?;
    let (q, file_dims) = load_quiver(run.quiver)?;
    let dv = resolve_dims(&q, run.dims, file_dims)?;
    let rbar = parse_multidegree(multidegree)?;
    let hq = HatQuiver::build(&q, &rbar, None).map_err(err)?;
    let sets = hq.admissibility_sets();
    let sigma1 = match sigma1 {
        Some(text) => Permutation::parse_cycles(text, hq.r()).map_err(err)?,
        None => sets.admissible().into_iter().next().ok_or("no admissible permutation for this multidegree")?,
    };
    let layout = parse_layout(&hq, layout)?;
    let large = layout.sufficiently_large(&sets, &dv);
    let e = suitable_generator(&hq, &sigma1, &layout, cap).map_err(err)?;
    let expect_vanish = match run.expect {
        Expect::Auto => large,
        Expect::Vanish => true,
        Expect::Nonvanish => false,
    };
    let rep = with_field(
        run.field,
        |f| verify_vanishing(f, &q, &e, &dv, run.trials, run.seed).map_err(err),
        |f| verify_vanishing(f, &q, &e, &dv, run.trials, run.seed).map_err(err),
    )?;
    let layers: Vec<String> = layout
        .layers()
        .iter()
        .map(|l| format!("{{{}}}", l.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let name = format!(
        "suitable sigma1={sigma1} layers={} ({})",
        layers.join(""),
        if large { "sufficiently large" } else { "insufficient" }
    );
    let mut out = verification_report(&name, &rep, expect_vanish);
    prepend(&mut out, warnings);
    Ok(out)
}

pub fn verify_invariance_cmd(
    run: &RandomRun,
    max_len: usize,
    sigma: Option<(usize, usize)>,
    cap: usize,
    el: &Elements,
) -> Res<Report> {
    check_trials(run.trials)?;
    let (q, file_dims) = load_quiver(run.quiver)?;
    let dv = resolve_dims(&q, run.dims, file_dims)?;
    let mut exprs: Vec<(String, TraceExpression)> = enumerate_cycles(&q, max_len, None)
        .into_iter()
        .map(|c| (c.display(&q), TraceExpression::cycle(c)))
        .collect();
    if let Some((r, s)) = sigma {
        check_cap(cap)?;
        let (_, e) = substituted(&q, el, r, s, cap)?;
        exprs.push((format!("sigma_{{{r},{s}}}"), e));
    }
    if exprs.is_empty() {
        return Err("nothing to check: the quiver has no cycles up to --max-len".into());
    }
    let mut texts = Vec::new();
    let mut jsons = Vec::new();
    let mut all = true;
    for (k, (name, e)) in exprs.iter().enumerate() {
        let seed = derive_seed(run.seed, k as u64);
        let rep = with_field(
            run.field,
            |f| verify_invariance(f, &q, e, &dv, run.trials, seed).map_err(err),
            |f| verify_invariance(f, &q, e, &dv, run.trials, seed).map_err(err),
        )?;
        let out = verification_report(&format!("invariance {name}"), &rep, true);
        all &= out.passed;
        texts.push(out.text);
        jsons.push(out.json);
    }
    Ok(Report { text: texts.join("\n"), json: json!({ "seed": run.seed, "passed": all, "reports": jsons }), passed: all })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Shift,
    Eqt,
    Genvanish,
    All,
}

pub fn identities(which: Which, big: usize, n: usize, r: usize, trials: usize, seed: u64) -> Res<Report> {
    let mut checks: Vec<IdentityCheck> = Vec::new();
    if matches!(which, Which::Shift | Which::All) {
        check_trials(trials)?;
        checks.extend(check_sigma_shift(big, trials, seed).map_err(err)?);
    }
    if matches!(which, Which::Eqt | Which::All) {
        checks.extend(check_eq_t(big, n, r).map_err(err)?);
    }
    if matches!(which, Which::Genvanish | Which::All) {
        checks.extend(check_generalized_vanishing(big, n, r).map_err(err)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let text = checks
        .iter()
        .map(|c| {
            let mut line = format!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.which, c.instance);
            if !c.detail.is_empty() {
                line.push_str(&format!(" ({})", c.detail));
            }
            line
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report { text, json: json!({ "passed": passed, "checks": checks }), passed })
}

pub fn ortho(flavor: Option<Flavor>, m: usize, d: usize, len: usize, trials: usize, seed: u64) -> Res<Report> {
    check_trials(trials)?;
    if m == 0 || d == 0 || len == 0 {
        return Err("--m, --d and --len must be positive".into());
    }
    let flavors = match flavor {
        Some(f) => vec![f],
        None if d % 2 == 0 => vec![Flavor::Orthogonal, Flavor::Symplectic],
        None => vec![Flavor::Orthogonal],
    };
    let mut texts = Vec::new();
    let mut jsons = Vec::new();
    let mut all = true;
    for f in flavors {
        let rep = invariance_suite(f, m, d, len, trials, seed).map_err(err)?;
        all &= rep.passed();
        let mut line = format!(
            "{} {f} m={m} d={d} len<={len}: {} words, {} generators, {} trials, {} failures",
            if rep.passed() { "PASS" } else { "FAIL" },
            rep.words,
            rep.generators,
            rep.trials,
            rep.failures
        );
        if let Some(first) = &rep.first_failure {
            line.push_str(&format!(" (first: {first})"));
        }
        texts.push(line);
        jsons.push(serde_json::to_value(&rep).expect("report serializes"));
    }
    Ok(Report { text: texts.join("\n"), json: json!({ "passed": all, "suites": jsons }), passed: all })
}

pub fn span(run: &RandomRun, multidegree: &str, samples: usize, expect_rank: Option<usize>) -> Res<Report> {
    if samples == 0 {
        return Err("--samples must be positive".into());
    }
    let (q, file_dims) = load_quiver(run.quiver)?;
    let dv = resolve_dims(&q, run.dims, file_dims)?;
    let rbar = parse_multidegree(multidegree)?;
    rbar.totals(&q).map_err(err)?;
    let rank = with_field(
        run.field,
        |f| graded_span_dimension(f, &q, &dv, &rbar, samples, run.seed).map_err(err),
        |f| graded_span_dimension(f, &q, &dv, &rbar, samples, run.seed).map_err(err),
    )?;
    let passed = expect_rank.is_none_or(|e| e == rank);
    let mut text = format!("rank {rank} at multidegree ({multidegree}) from {samples} samples over {}", run.field);
    if let Some(e) = expect_rank {
        text = format!("{} {text} (expected {e})", if passed { "PASS" } else { "FAIL" });
    }
    Ok(Report {
        text,
        json: json!({
            "multidegree": rbar.0, "dims": dv.as_slice(), "samples": samples, "field": run.field,
            "seed": run.seed, "rank": rank, "expected": expect_rank, "passed": passed,
        }),
        passed,
    })
}
