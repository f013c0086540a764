use std::collections::BTreeMap;
use std::sync::Arc;

use classfield::cft::scenario::{run_scenario, ScenarioSpec};
use classfield::group::{double_coset_reps_in, FiniteGroup, GroupSpec, Subgroup, SubgroupSpec};
use classfield::hrv::{
    project_valuation, rank_n_valuation, sample_rng, stack_roundtrip, valuation_axiom_sampler, ElementSpec,
    LaurentElement, LaurentField, RankNValuation,
};
use classfield::mackey::{full_check, FunctorSource};
use classfield::report::Report;
use classfield::transfer::{transfer_via_lambda, Transfer};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed input: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

/// A rendered report and whether every check in it passed.
pub struct Outcome {
    pub value: Value,
    pub passed: bool,
}

impl Outcome {
    fn new(value: Value) -> Outcome {
        let passed = !has_failure(&value);
        Outcome { value, passed }
    }
}

fn has_failure(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.get("status").and_then(Value::as_str) == Some("fail") || m.values().any(has_failure),
        Value::Array(a) => a.iter().any(has_failure),
        _ => false,
    }
}

fn checks(r: &Report) -> Value {
    serde_json::to_value(&r.checks).expect("checks serialize")
}

// ---------------------------------------------------------------- group

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub group: GroupSpec,
    #[serde(default)]
    pub subgroups: Option<Vec<SubgroupSpec>>,
}

fn transfer_entry(g: &FiniteGroup, h: &Subgroup, k: usize, report: &mut Report) -> Result<Value, CliError> {
    let whole = g.whole();
    let source = g.abelianization();
    let target = g.abelian_quotient(h, &g.commutator_subgroup(h)).map_err(invalid)?;
    let ver = Transfer::new(g, source, target.clone()).map_err(invalid)?;
    let table: Vec<Value> = g.elements().map(|x| json!([x, ver.of_element(g, x)])).collect();
    let hom = g.elements().find_map(|x| {
        g.elements().find_map(|y| {
            let lhs = ver.of_element(g, g.mul(x, y));
            let rhs = target.group.add(&ver.of_element(g, x), &ver.of_element(g, y));
            (lhs != rhs).then(|| format!("x={x} y={y}"))
        })
    });
    report.record(format!("transfer[{k}].homomorphism"), hom);
    let mut lambda = None;
    for x in g.elements() {
        let reps = double_coset_reps_in(g, &whole, h, &g.cyclic_subgroup(x));
        match transfer_via_lambda(g, &whole, &target, x, &reps) {
            Ok(l) if l.value == ver.of_element(g, x) => {}
            Ok(_) => lambda = Some(format!("x={x}")),
            Err(e) => lambda = Some(format!("x={x}: {e}")),
        }
        if lambda.is_some() {
            break;
        }
    }
    report.record(format!("transfer[{k}].lambda"), lambda);
    Ok(json!({
        "subgroup": h.elements(),
        "index": g.order() / h.order(),
        "target": target.group,
        "table": table,
    }))
}

pub fn run_group(input: &GroupInput) -> Result<Outcome, CliError> {
    let g = input.group.build().map_err(invalid)?;
    let all = g.all_subgroups();
    let mut by_order: BTreeMap<usize, usize> = BTreeMap::new();
    for h in &all {
        *by_order.entry(h.order()).or_default() += 1;
    }
    let normal = all.iter().filter(|h| g.is_normal(h)).count();
    let requested = match &input.subgroups {
        Some(specs) => specs.iter().map(|s| s.build(&g)).collect::<Result<Vec<_>, _>>().map_err(invalid)?,
        None => all.clone(),
    };
    let mut report = Report::new();
    let transfers = requested
        .iter()
        .enumerate()
        .map(|(k, h)| transfer_entry(&g, h, k, &mut report))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome::new(json!({
        "order": g.order(),
        "name": g.name(),
        "abelian": g.is_abelian(),
        "abelianization": g.abelianization().group,
        "subgroups": {"count": all.len(), "normal": normal, "by_order": by_order},
        "transfers": transfers,
        "checks": checks(&report),
    })))
}

// ---------------------------------------------------------------- mackey

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MackeyInput {
    pub group: GroupSpec,
    pub functor: FunctorSource,
}

pub fn run_mackey(input: &MackeyInput) -> Result<Outcome, CliError> {
    let g = Arc::new(input.group.build().map_err(invalid)?);
    let f = input.functor.build(g).map_err(invalid)?;
    let s = f.system();
    let values: Vec<Value> =
        s.ids().map(|h| json!({"id": h, "subgroup": s.subgroup(h).elements(), "value": f.value(h)})).collect();
    Ok(Outcome::new(json!({
        "mackey_system": s.is_mackey(),
        "values": values,
        "checks": checks(&full_check(&f)),
    })))
}

// ---------------------------------------------------------------- cft

pub fn run_cft(spec: &ScenarioSpec, certify: bool) -> Result<Outcome, CliError> {
    let r = run_scenario(spec, certify).map_err(invalid)?;
    Ok(Outcome::new(serde_json::to_value(&r)?))
}

// ---------------------------------------------------------------- hrv

fn default_radius() -> i64 {
    4
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripTask {
    pub p: u64,
    pub rank: usize,
    #[serde(default = "default_radius")]
    pub radius: i64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub uniformizer: Option<ElementSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomTask {
    pub p: u64,
    pub rank: usize,
    #[serde(default = "default_radius")]
    pub radius: i64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Check `v^{(r)}` instead of `v`.
    #[serde(default)]
    pub project: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HrvInput {
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
    #[serde(default)]
    pub project: Option<usize>,
    #[serde(default)]
    pub roundtrips: Vec<RoundtripTask>,
    #[serde(default)]
    pub axioms: Vec<AxiomTask>,
}

pub fn run_hrv(input: &HrvInput, seed: u64) -> Result<Outcome, CliError> {
    let mut report = Report::new();
    let mut elements = Vec::new();
    for (i, spec) in input.elements.iter().enumerate() {
        let x = LaurentElement::from_spec(spec).map_err(|e| CliError::Invalid(format!("element {i}: {e}")))?;
        match rank_n_valuation(&x) {
            Ok(v) => {
                let projected = match input.project {
                    Some(r) => {
                        Some(project_valuation(&v, r).map_err(|e| CliError::Invalid(format!("element {i}: {e}")))?)
                    }
                    None => None,
                };
                report.pass(format!("element[{i}].valuation"));
                elements.push(json!({"value": v, "projected": projected, "exact": x.is_exact()}));
            }
            Err(e) => {
                report.fail(format!("element[{i}].valuation"), e.to_string());
                elements.push(json!({"error": e.to_string()}));
            }
        }
    }
    let mut rng = sample_rng(seed);
    let mut roundtrips = Vec::new();
    for (i, task) in input.roundtrips.iter().enumerate() {
        let field = LaurentField::symmetric(task.p, task.rank, task.radius).map_err(invalid)?;
        let t = match &task.uniformizer {
            Some(spec) => Some(LaurentElement::from_spec(spec).map_err(invalid)?),
            None => None,
        };
        let out = stack_roundtrip(&field, t.as_ref(), task.samples, &mut rng).map_err(invalid)?;
        let passed = out.report.passed();
        report.extend_prefixed(&format!("roundtrip[{i}]"), out.report);
        roundtrips.push(json!({"p": task.p, "rank": task.rank, "samples": out.samples, "passed": passed}));
    }
    let mut axioms = Vec::new();
    for (i, task) in input.axioms.iter().enumerate() {
        let field = LaurentField::symmetric(task.p, task.rank, task.radius).map_err(invalid)?;
        let mut v = RankNValuation::standard(task.rank);
        if let Some(r) = task.project {
            v = v.projected(r).map_err(invalid)?;
        }
        let out = valuation_axiom_sampler(&v, &field, task.samples, &mut rng);
        let passed = out.report.passed();
        report.extend_prefixed(&format!("axioms[{i}]"), out.report);
        axioms.push(
            json!({"p": task.p, "rank": task.rank, "pairs": out.pairs, "skipped": out.skipped, "passed": passed}),
        );
    }
    Ok(Outcome::new(json!({
        "seed": seed,
        "elements": elements,
        "roundtrips": roundtrips,
        "axioms": axioms,
        "checks": checks(&report),
    })))
}

// ---------------------------------------------------------------- text rendering

pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    let Value::Object(m) = v else {
        return format!("{v}\n");
    };
    for (k, val) in m {
        if k == "checks" {
            continue;
        }
        match val {
            Value::Array(items) if !items.is_empty() => {
                out.push_str(&format!("{k}:\n"));
                for item in items {
                    out.push_str(&format!("  {item}\n"));
                }
            }
            _ => out.push_str(&format!("{k}: {val}\n")),
        }
    }
    if let Some(Value::Array(cs)) = m.get("checks") {
        let width = cs.iter().filter_map(|c| c["name"].as_str()).map(|s| s.chars().count()).max().unwrap_or(0);
        out.push_str("checks:\n");
        for c in cs {
            let status = match c["status"].as_str() {
                Some("pass") => "PASS",
                Some("fail") => "FAIL",
                _ => "SKIP",
            };
            let name = c["name"].as_str().unwrap_or_default();
            let pad = width - name.chars().count();
            match c.get("witness").and_then(Value::as_str) {
                Some(w) => out.push_str(&format!("  {status}  {name}{}  {w}\n", " ".repeat(pad))),
                None => out.push_str(&format!("  {status}  {name}\n")),
            }
        }
    }
    out
}
