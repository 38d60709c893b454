//! The validate / convolve / predict / simulate / fit subcommands.

use std::io::Read;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use ttesum::numeric::linspace;
use ttesum::{
    confidence_band, fit_clayton_pareto, quantile_curve, validate_generator, BandKind,
    ConditionalLaw, Direction, MethodTag, SamplePairs, SumLaw, SumMethod,
};

use crate::output::{csv_line, emit, sig10};
use crate::spec::ModelSpecFile;
use crate::{BandKindArg, CliError, DirectionArg};

fn method_str(tag: MethodTag) -> &'static str {
    match tag {
        MethodTag::ClosedForm => "closed_form",
        MethodTag::RootFind => "root_find",
    }
}

fn sum_method_str(method: SumMethod) -> &'static str {
    match method {
        SumMethod::ClosedForm => "closed_form",
        SumMethod::Quadrature => "quadrature",
    }
}

// ---------------------------------------------------------------------------
// validate

struct CheckLine {
    name: String,
    passed: bool,
    value: String,
}

/// Validate a spec file end to end: parse, generator admissibility grid,
/// model construction, and a closed-form-vs-quadrature consistency probe.
/// Every problem is reported and turns the exit code to 1.
pub fn validate(spec_path: &Path, json_mode: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", spec_path.display())))?;

    let mut gen_label = String::new();
    let mut model_label = String::new();
    let mut checks: Vec<CheckLine> = Vec::new();
    let mut fatal: Option<String> = None;

    let push = |checks: &mut Vec<CheckLine>, name: &str, passed: bool, value: String| {
        checks.push(CheckLine {
            name: name.to_string(),
            passed,
            value,
        });
    };

    match ModelSpecFile::parse(&text) {
        Err(e) => fatal = Some(format!("parse: {e}")),
        Ok(file) => {
            model_label = file.model_label();
            match file.generator_spec() {
                Err(e) => fatal = Some(format!("generator construction: {e}")),
                Ok(gen) => {
                    gen_label = gen.label.clone();
                    match validate_generator(&gen) {
                        Err(e) => fatal = Some(format!("generator probe grid: {e}")),
                        Ok(report) => {
                            for (name, passed, value) in report.checks() {
                                push(&mut checks, name, passed, sig10(value));
                            }
                        }
                    }
                    if fatal.is_none() {
                        match file.model() {
                            Err(e) => fatal = Some(format!("model construction: {e}")),
                            Ok(m) => match consistency_probe(&m) {
                                Err(e) => fatal = Some(format!("consistency probe: {e}")),
                                Ok(probe) => {
                                    for (name, passed, value) in probe {
                                        push(&mut checks, &name, passed, sig10(value));
                                    }
                                }
                            },
                        }
                    }
                }
            }
        }
    }

    let passed = fatal.is_none() && checks.iter().all(|c| c.passed);
    if json_mode {
        let rendered: Vec<_> = checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "value": c.value }))
            .collect();
        println!(
            "{}",
            json!({
                "spec": spec_path.display().to_string(),
                "generator": gen_label,
                "model": model_label,
                "checks": rendered,
                "error": fatal,
                "passed": passed,
            })
        );
    } else {
        println!("spec: {}", spec_path.display());
        if !gen_label.is_empty() {
            println!("generator: {gen_label}");
        }
        if !model_label.is_empty() {
            println!("model: {model_label}");
        }
        for c in &checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            println!("  {:<34} {verdict}  {}", c.name, c.value);
        }
        if let Some(msg) = &fatal {
            println!("  {msg}");
        }
        println!("result: {}", if passed { "PASS" } else { "FAIL" });
    }

    if passed {
        Ok(())
    } else {
        let mut failing: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        if let Some(msg) = fatal {
            failing.push(msg);
        }
        Err(CliError::Check(format!(
            "validation failed: {}",
            failing.join(", ")
        )))
    }
}

/// Cheap cross-checks that the assembled model is self-consistent: closed
/// forms against quadrature for scale models, the copula-convolution route
/// against direct quadrature otherwise.
fn consistency_probe(m: &ttesum::TteModel) -> ttesum::Result<Vec<(String, bool, f64)>> {
    let law = SumLaw::new(m);
    let q99 = law.quantile(0.99)?;
    let mut out = Vec::new();
    if m.gk_params().is_some() {
        let mut worst_sv = 0.0f64;
        let mut worst_de = 0.0f64;
        for j in 1..=12 {
            let s = q99 * j as f64 / 12.0;
            worst_sv = worst_sv
                .max((ttesum::sum_survival_gk(m, s)? - ttesum::sum_survival_quadrature(m, s)?).abs());
            worst_de =
                worst_de.max((ttesum::sum_pdf_gk(m, s)? - ttesum::sum_pdf_quadrature(m, s)?).abs());
        }
        out.push(("closed_vs_quadrature_survival".to_string(), worst_sv <= 1e-8, worst_sv));
        out.push(("closed_vs_quadrature_density".to_string(), worst_de <= 1e-8, worst_de));
    } else {
        let mut worst = 0.0f64;
        for j in 1..=4 {
            let s = q99 * j as f64 / 4.0;
            worst = worst
                .max((law.survival(s)? - ttesum::copula_convolution_oracle(m, s)?).abs());
        }
        out.push(("quadrature_vs_copula_oracle".to_string(), worst <= 1e-6, worst));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// convolve

pub fn convolve(
    spec_path: &Path,
    s_min: f64,
    s_max: Option<f64>,
    s_steps: usize,
    json_mode: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = ModelSpecFile::load(spec_path)?;
    let m = file.model()?;
    let law = SumLaw::new(&m);
    if s_steps < 2 {
        return Err(CliError::Usage("--s-steps must be at least 2".to_string()));
    }
    let s_max = match s_max {
        Some(v) => v,
        None => law.quantile(0.99)?,
    };
    if !(s_min.is_finite() && s_min >= 0.0 && s_max.is_finite() && s_max > s_min) {
        return Err(CliError::Usage(
            "require 0 <= --s-min < --s-max (both finite)".to_string(),
        ));
    }
    let tag = sum_method_str(law.method());

    #[derive(Serialize)]
    struct Row {
        s: f64,
        survival: f64,
        pdf: f64,
        hazard: f64,
        method_tag: &'static str,
    }

    let mut bytes = String::new();
    if !json_mode {
        bytes.push_str(&csv_line(&["s", "survival", "pdf", "hazard", "method_tag"]));
    }
    for s in linspace(s_min, s_max, s_steps) {
        let survival = law.survival(s)?;
        let pdf = law.density(s)?;
        let hazard = law.hazard(s)?;
        if json_mode {
            let row = Row { s, survival, pdf, hazard, method_tag: tag };
            bytes.push_str(&serde_json::to_string(&row).expect("row serializes"));
            bytes.push('\n');
        } else {
            bytes.push_str(&csv_line(&[
                sig10(s),
                sig10(survival),
                sig10(pdf),
                sig10(hazard),
                tag.to_string(),
            ]));
        }
    }
    emit(out, if json_mode { "convolve.jsonl" } else { "convolve.csv" }, &bytes)
}

// ---------------------------------------------------------------------------
// predict

#[derive(Serialize)]
struct AtRecord {
    direction: &'static str,
    at: f64,
    median: f64,
    lower50: f64,
    upper50: f64,
    lower90: f64,
    upper90: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bottom_lower50: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bottom_upper50: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bottom_lower90: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bottom_upper90: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantile: Option<f64>,
    method_tag: &'static str,
}

#[allow(clippy::too_many_arguments)]
pub fn predict(
    spec_path: &Path,
    direction_arg: DirectionArg,
    at: Option<f64>,
    q: Option<f64>,
    kind_arg: BandKindArg,
    steps: usize,
    json_mode: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = ModelSpecFile::load(spec_path)?;
    let m = file.model()?;
    let direction = direction_arg.direction();
    if let Some(level) = q {
        if !(level > 0.0 && level < 1.0) {
            return Err(CliError::Usage("--q must lie strictly in (0, 1)".to_string()));
        }
    }
    let bottom = kind_arg == BandKindArg::Bottom;

    if let Some(c) = at {
        let law = ConditionalLaw::new(&m, direction, c)?;
        let bottom_lower = match direction {
            Direction::SGivenX1 => c,
            Direction::X1GivenS => 0.0,
        };
        let record = AtRecord {
            direction: direction_arg.as_str(),
            at: c,
            median: law.quantile(0.5)?,
            lower50: law.quantile(0.25)?,
            upper50: law.quantile(0.75)?,
            lower90: law.quantile(0.05)?,
            upper90: law.quantile(0.95)?,
            bottom_lower50: bottom.then_some(bottom_lower),
            bottom_upper50: if bottom { Some(law.quantile(0.5)?) } else { None },
            bottom_lower90: bottom.then_some(bottom_lower),
            bottom_upper90: if bottom { Some(law.quantile(0.9)?) } else { None },
            q,
            quantile: match q {
                Some(level) => Some(law.quantile(level)?),
                None => None,
            },
            method_tag: method_str(law.method()),
        };
        let mut line = serde_json::to_string(&record).expect("record serializes");
        line.push('\n');
        return emit(out, "predict.json", &line);
    }

    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".to_string()));
    }
    let median = quantile_curve(&m, direction, 0.5, steps)?;
    let band50 = confidence_band(&m, direction, BandKind::Centered, 0.5, steps)?;
    let band90 = confidence_band(&m, direction, BandKind::Centered, 0.9, steps)?;
    let bottoms = if bottom {
        Some((
            confidence_band(&m, direction, BandKind::Bottom, 0.5, steps)?,
            confidence_band(&m, direction, BandKind::Bottom, 0.9, steps)?,
        ))
    } else {
        None
    };
    let extra = match q {
        Some(level) => Some(quantile_curve(&m, direction, level, steps)?),
        None => None,
    };
    let tag = method_str(median.method);

    let mut header: Vec<String> = ["conditioning_value", "median", "lower50", "upper50", "lower90", "upper90"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if bottom {
        for name in ["bottom_lower50", "bottom_upper50", "bottom_lower90", "bottom_upper90"] {
            header.push(name.to_string());
        }
    }
    if let Some(level) = q {
        header.push(format!("q_{level}"));
    }
    header.push("method_tag".to_string());

    let mut bytes = String::new();
    if !json_mode {
        bytes.push_str(&csv_line(&header));
    }
    for i in 0..median.conditioning.len() {
        let mut values = vec![
            median.conditioning[i],
            median.predicted[i],
            band50.lower[i],
            band50.upper[i],
            band90.lower[i],
            band90.upper[i],
        ];
        if let Some((b50, b90)) = &bottoms {
            values.extend([b50.lower[i], b50.upper[i], b90.lower[i], b90.upper[i]]);
        }
        if let Some(curve) = &extra {
            values.push(curve.predicted[i]);
        }
        if json_mode {
            let mut obj = serde_json::Map::new();
            for (name, value) in header[..header.len() - 1].iter().zip(&values) {
                obj.insert(name.clone(), json!(value));
            }
            obj.insert("method_tag".to_string(), json!(tag));
            bytes.push_str(&serde_json::Value::Object(obj).to_string());
            bytes.push('\n');
        } else {
            let mut fields: Vec<String> = values.iter().map(|&v| sig10(v)).collect();
            fields.push(tag.to_string());
            bytes.push_str(&csv_line(&fields));
        }
    }
    emit(out, if json_mode { "predict.jsonl" } else { "predict.csv" }, &bytes)
}

// ---------------------------------------------------------------------------
// simulate

pub fn simulate(
    spec_path: &Path,
    n: usize,
    seed: Option<u64>,
    json_mode: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = ModelSpecFile::load(spec_path)?;
    let m = file.model()?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let sample = ttesum::sample_pairs(&m, n, seed)?;
    #[derive(Serialize)]
    struct Row {
        x1: f64,
        x2: f64,
        s: f64,
    }

    let mut bytes = String::new();
    if json_mode {
        let spec_value = serde_json::to_value(&file).expect("spec file serializes");
        bytes.push_str(&json!({ "model": spec_value, "seed": seed, "n": n }).to_string());
        bytes.push('\n');
        for i in 0..n {
            let row = Row { x1: sample.x1[i], x2: sample.x2[i], s: sample.s[i] };
            bytes.push_str(&serde_json::to_string(&row).expect("row serializes"));
            bytes.push('\n');
        }
    } else {
        bytes.push_str(&format!("# model: {} seed: {seed}\r\n", file.compact_json()));
        bytes.push_str(&csv_line(&["x1", "x2", "s"]));
        for i in 0..n {
            bytes.push_str(&csv_line(&[
                sig10(sample.x1[i]),
                sig10(sample.x2[i]),
                sig10(sample.s[i]),
            ]));
        }
    }
    emit(out, if json_mode { "simulate.jsonl" } else { "simulate.csv" }, &bytes)
}

// ---------------------------------------------------------------------------
// fit

#[derive(Serialize)]
struct FitRecord {
    n: usize,
    tau_hat: f64,
    gamma_hat: f64,
    alpha_hat: f64,
    beta_hat: f64,
    mean_x1: f64,
    mean_x2: f64,
}

/// Parse a `simulate` CSV (comment lines allowed, header `x1,x2,s`).
fn parse_sample_csv(text: &str) -> Result<SamplePairs, CliError> {
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    let mut s = Vec::new();
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "x1,x2,s" {
                return Err(CliError::Usage(format!(
                    "line {}: expected header \"x1,x2,s\", found \"{line}\"",
                    lineno + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Usage(format!(
                "line {}: expected 3 comma-separated values, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut parsed = [0.0f64; 3];
        for (k, f) in fields.iter().enumerate() {
            parsed[k] = f.trim().parse::<f64>().map_err(|e| {
                CliError::Usage(format!("line {}: cannot parse \"{f}\": {e}", lineno + 1))
            })?;
        }
        x1.push(parsed[0]);
        x2.push(parsed[1]);
        s.push(parsed[2]);
    }
    if !saw_header {
        return Err(CliError::Usage("no header line \"x1,x2,s\" found".to_string()));
    }
    if x1.is_empty() {
        return Err(CliError::Usage("no data rows after the header".to_string()));
    }
    Ok(SamplePairs { seed: 0, x1, x2, s })
}

pub fn fit(file: Option<&Path>, _json_mode: bool) -> Result<(), CliError> {
    let text = match file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let pairs = parse_sample_csv(&text)?;
    let fit = fit_clayton_pareto(&pairs)?;
    let record = FitRecord {
        n: pairs.n(),
        tau_hat: fit.tau_hat,
        gamma_hat: fit.gamma_hat,
        alpha_hat: fit.alpha_hat,
        beta_hat: fit.beta_hat,
        mean_x1: fit.mean_x1,
        mean_x2: fit.mean_x2,
    };
    println!("{}", serde_json::to_string(&record).expect("fit record serializes"));
    Ok(())
}
