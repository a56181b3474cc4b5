use std::fmt::Write;

use mirrorpf_core::exact::Rational;
use mirrorpf_core::griffiths::{
    assemble_pf, check_max_unipotent, derive as derive_family, verify_c3, Derivation, DerivationRecord, FamilyRecord,
    PFOperator,
};
use mirrorpf_core::groebner::MonomialOrder;
use mirrorpf_core::mirror::{
    curve_counts, default_c2, extract_n, invert_multicover, mirror_data, q_expansion, schubert_tangent_lines,
    YukawaExpansion,
};
use mirrorpf_core::multipoly::FamilySpec;
use mirrorpf_core::series::apply_log_operator;
use mirrorpf_core::Error;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{reference, Format, RunConfig};

/// A non-success outcome carrying its exit code and stderr JSON body.
pub enum Failure {
    Input(Value),
    Verification(Value),
    Internal(Value),
}

fn error_body(e: &Error, family: Option<&FamilySpec>) -> Value {
    let mut body = json!({"error": e.kind(), "message": e.to_string()});
    if let Some(spec) = family {
        body["family"] = json!(format!("k{}", spec.k()));
    }
    match e {
        Error::NonIntegralInstanton { index, value } => {
            body["index"] = json!(index);
            body["value"] = json!(value.to_string());
        }
        Error::NotMaximallyUnipotent { index, value } => {
            body["index"] = json!(index);
            body["value"] = json!(value.to_string());
        }
        Error::OrderExhausted { requested, valid } => {
            body["requested"] = json!(requested);
            body["valid"] = json!(valid);
        }
        _ => {}
    }
    body
}

impl Failure {
    pub fn input(e: Error, family: Option<&FamilySpec>) -> Self {
        Failure::Input(error_body(&e, family))
    }

    fn pipeline(e: Error, family: &FamilySpec) -> Self {
        let body = error_body(&e, Some(family));
        match e {
            Error::InvalidFamily(_)
            | Error::Parse(_)
            | Error::UnsupportedSingularityStructure(_)
            | Error::OrderExhausted { .. } => Failure::Input(body),
            Error::NonIntegralInstanton { .. } | Error::NotMaximallyUnipotent { .. } => {
                Failure::Verification(body)
            }
            _ => Failure::Internal(body),
        }
    }

    pub fn into_parts(self) -> (u8, Option<String>) {
        match self {
            Failure::Input(b) => (2, Some(b.to_string())),
            Failure::Verification(b) => (3, Some(b.to_string())),
            Failure::Internal(b) => (4, Some(b.to_string())),
        }
    }
}

struct Pipeline {
    spec: FamilySpec,
    derivation: Derivation,
    pf: PFOperator,
}

fn pipeline(spec: &FamilySpec) -> Result<Pipeline, Failure> {
    let derivation = derive_family(spec, MonomialOrder::Grevlex).map_err(|e| Failure::pipeline(e, spec))?;
    let pf = assemble_pf(spec, &derivation.epsilons).map_err(|e| Failure::pipeline(e, spec))?;
    Ok(Pipeline {
        spec: *spec,
        derivation,
        pf,
    })
}

/// Runs `f` on every family concurrently and returns results in input order.
fn per_family<T: Send>(
    families: &[FamilySpec],
    f: impl Fn(&FamilySpec) -> Result<T, Failure> + Sync,
) -> Result<Vec<T>, Failure> {
    let results: Vec<Result<T, Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = families.iter().map(|spec| s.spawn(|| f(spec))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("family worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn to_json<T: Serialize>(items: &[T]) -> String {
    let mut s = if items.len() == 1 {
        serde_json::to_string_pretty(&items[0])
    } else {
        serde_json::to_string_pretty(items)
    }
    .expect("records serialize");
    s.push('\n');
    s
}

pub fn derive(config: &RunConfig) -> Result<String, Failure> {
    let records = per_family(&config.families, |spec| {
        let p = pipeline(spec)?;
        Ok(DerivationRecord::new(&p.spec, &p.derivation.epsilons, &p.pf))
    })?;
    let mut out = String::new();
    match config.format {
        Format::Json => out = to_json(&records),
        Format::Tsv => {
            out.push_str("k\tquantity\tvalue\n");
            for r in &records {
                for (name, value) in derive_rows(r) {
                    writeln!(out, "{}\t{name}\t{value}", r.family.k).unwrap();
                }
            }
        }
        Format::Text => {
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                writeln!(out, "{}", family_heading(&r.family)).unwrap();
                for (name, value) in derive_rows(r) {
                    writeln!(out, "  {name} = {value}").unwrap();
                }
            }
        }
    }
    Ok(out)
}

fn family_heading(f: &FamilyRecord) -> String {
    let w: Vec<String> = f.weights.iter().map(u32::to_string).collect();
    format!("k{} ({})", f.k, w.join(","))
}

fn derive_rows(r: &DerivationRecord) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    for (i, e) in r.epsilons.iter().enumerate() {
        rows.push((format!("eps{}", i + 1), e.text.clone()));
    }
    for (i, b) in r.b.iter().enumerate() {
        rows.push((format!("B{i}"), b.text.clone()));
    }
    rows.push(("lambda".into(), r.lambda.clone()));
    rows.push(("unipotent".into(), r.unipotent.to_string()));
    rows
}

#[derive(Serialize)]
struct CurvesRecord {
    family: FamilyRecord,
    #[serde(flatten)]
    expansion: YukawaExpansion,
}

pub fn curves(config: &RunConfig) -> Result<String, Failure> {
    let records = per_family(&config.families, |spec| {
        let p = pipeline(spec)?;
        let expansion = curve_counts(spec, &p.pf, config.depth, config.order, config.c2.clone())
            .map_err(|e| Failure::pipeline(e, spec))?;
        Ok(CurvesRecord {
            family: FamilyRecord {
                k: spec.k(),
                weights: *spec.weights(),
            },
            expansion,
        })
    })?;
    let n_of = |r: &CurvesRecord| -> Vec<String> {
        r.expansion.n.as_ref().expect("extracted").iter().map(BigInt::to_string).collect()
    };
    let mut out = String::new();
    match config.format {
        Format::Json => out = to_json(&records),
        Format::Tsv => {
            out.push('k');
            for j in 0..=config.depth {
                write!(out, "\tn{j}").unwrap();
            }
            out.push('\n');
            for r in &records {
                writeln!(out, "{}\t{}", r.family.k, n_of(r).join("\t")).unwrap();
            }
        }
        Format::Text => {
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                writeln!(out, "{}", family_heading(&r.family)).unwrap();
                for (j, n) in n_of(r).iter().enumerate() {
                    writeln!(out, "  n{j} = {n}").unwrap();
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Serialize)]
struct CheckRecord {
    family: String,
    check: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn family_checks(spec: &FamilySpec, config: &RunConfig) -> Result<Vec<CheckRecord>, Failure> {
    let p = pipeline(spec)?;
    let k = spec.k();
    let fail = |e: Error| Failure::pipeline(e, spec);
    let mut checks: Vec<(String, Status, Option<String>)> = Vec::new();

    let reduction_ok = match reference::epsilons(k) {
        Some(expected) if spec == &FamilySpec::builtin(k).expect("built-in") => {
            Status::of(expected == p.derivation.epsilons && p.derivation.certificates_hold())
        }
        _ => Status::Skip,
    };
    checks.push(("reduction coefficients match reference values".into(), reduction_ok, None));

    checks.push(("B_j(0) = 0, maximally unipotent".into(), Status::of(check_max_unipotent(&p.pf)), None));

    let lambda_ok = reference::lambda(k).is_none_or(|l| p.pf.lambda == Rational::from_integer(l.into()));
    checks.push((
        "C3 = 6/z + 2/(z - lambda)".into(),
        Status::of(verify_c3(&p.pf) && lambda_ok),
        Some(format!("lambda = {}", p.pf.lambda)),
    ));

    let data = mirror_data(&p.pf, config.order).map_err(fail)?;
    let residual = apply_log_operator(&p.pf.b, &data.f0).map_err(fail)?;
    let through = config.order.saturating_sub(4);
    checks.push((
        "operator annihilates f0".into(),
        Status::of(residual.vanishes_through(through)),
        Some(format!("through order {through}")),
    ));

    let c2 = config.c2.clone().unwrap_or_else(|| default_c2(spec));
    let y = q_expansion(spec, &p.pf, config.depth, config.order, Some(c2)).map_err(fail)?;
    let candidates = invert_multicover(&y.a);
    let bad = candidates.iter().enumerate().skip(1).find(|(_, v)| !v.is_integer());
    checks.push((
        format!("integrality n1..n{}", config.depth),
        Status::of(bad.is_none()),
        bad.map(|(j, v)| format!("n{j} = {v}")),
    ));

    let n = extract_n(&y.a).ok();
    let counts_ok = match (reference::curves(k), &n) {
        (Some(expected), Some(n)) if spec == &FamilySpec::builtin(k).expect("built-in") => {
            let shown = expected.len().min(n.len());
            Status::of((0..shown).all(|j| n[j].to_string() == expected[j]))
        }
        (Some(_), None) => Status::Fail,
        _ => Status::Skip,
    };
    checks.push(("instanton numbers match reference values".into(), counts_ok, None));

    if k == 8 && spec == &FamilySpec::builtin(8).expect("built-in") {
        let expected: BigInt = BigInt::from(2) * schubert_tangent_lines(8);
        let ok = n.as_ref().and_then(|n| n.get(1)).is_some_and(|n1| *n1 == expected);
        checks.push(("n1 = 2 * schubert(8)".into(), Status::of(ok), Some(format!("2 * 14752 = {expected}"))));
    }

    Ok(checks
        .into_iter()
        .map(|(check, status, detail)| CheckRecord {
            family: format!("k{k}"),
            check,
            status,
            detail,
        })
        .collect())
}

pub fn verify(config: &RunConfig) -> Result<(String, Result<(), Failure>), Failure> {
    let checks: Vec<CheckRecord> = per_family(&config.families, |spec| family_checks(spec, config))?
        .into_iter()
        .flatten()
        .collect();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .map(|c| format!("{} {}", c.family, c.check))
        .collect();
    let mut out = String::new();
    match config.format {
        Format::Json => {
            out = serde_json::to_string_pretty(&checks).expect("checks serialize");
            out.push('\n');
        }
        Format::Tsv => {
            out.push_str("family\tcheck\tstatus\tdetail\n");
            for c in &checks {
                let detail = c.detail.as_deref().unwrap_or("");
                writeln!(out, "{}\t{}\t{}\t{detail}", c.family, c.check, c.status.as_str()).unwrap();
            }
        }
        Format::Text => {
            for c in &checks {
                write!(out, "{} {}: {}", c.family, c.check, c.status.as_str()).unwrap();
                if let Some(d) = &c.detail {
                    write!(out, " ({d})").unwrap();
                }
                out.push('\n');
            }
            let passed = checks.iter().filter(|c| c.status == Status::Pass).count();
            writeln!(out, "{passed}/{} checks passed", checks.len()).unwrap();
        }
    }
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(json!({"error": "VerificationFailed", "failed": failed})))
    };
    Ok((out, verdict))
}
