//! Batch commands over the library. Each command parses its inputs, calls
//! library operations and serializes what they return.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::PFormValue;
use crate::field::manufactured::{self, Expectation, RandomSmoothForm};
use crate::field::verify::{self, VariationField};
use crate::field::{AnalyticField, FieldSource, GridField, GridSpec};
use crate::models::registry::{self, ModelParams};
use crate::models::{encoding, DensityLaw, EMState, GasState, LagrangianModel, ModelKind, RelativisticState};
use crate::report::{self, OutputFormat};
use crate::symmetry::{self, MetricSignature};
use crate::tensor::{self, rows_of};

/// Exit status for a check that ran but did not pass.
pub const EXIT_FAILED: i32 = 2;
/// Exit status for usage and input errors.
pub const EXIT_ERROR: i32 = 1;

#[derive(Parser, Debug, Clone)]
#[command(name = "formtensor", version, about = "Divergence-free tensors of closed-form Lagrangians")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Assemble T at one state
    Tensor,
    /// Compare invariance of L with symmetry of S^{-1} T
    Invariance,
    /// Closedness and divergence residuals of a field or a catalog case
    Verify,
    /// First variation along a compactly supported flow against the tensor pairing
    Variation,
    /// Jump of T nu across a planar interface
    Jump,
    /// List registered models and catalog cases
    Models,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Registered model name
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Model parameters `k=v,...`
    #[arg(long, global = true, default_value = "")]
    pub params: String,
    /// Density expression for `user-expr`
    #[arg(long, global = true)]
    pub expr: Option<String>,
    /// State as inline JSON or a path to a JSON file
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Grid field manifest (`.json`) or CSV file
    #[arg(long, global = true)]
    pub field: Option<PathBuf>,
    /// `euclidean`, `minkowski` or `custom PATH`
    #[arg(long, global = true, num_args = 1..=2)]
    pub metric: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerances `name=v,...`
    #[arg(long, global = true, default_value = "")]
    pub tol: String,
    /// Grid spacing; the unit cube gets `round(1/h)` cells per axis
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Number of halvings of `h`
    #[arg(long, global = true, default_value_t = 0)]
    pub refine: usize,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json, csv or pretty
    #[arg(long, global = true, default_value = "json")]
    pub output: String,
    /// Manufactured case for `verify`
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// Random states for `invariance`
    #[arg(long, global = true, default_value_t = 100)]
    pub states: usize,
    /// Flow parameter for `variation`; defaults to `h / 4`
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Left state of a jump
    #[arg(long, global = true)]
    pub left: Option<String>,
    /// Right state of a jump
    #[arg(long, global = true)]
    pub right: Option<String>,
    /// Interface normal `a,b,...`
    #[arg(long, global = true)]
    pub nu: Option<String>,
    /// Grid spacings `h0,h1,...` for CSV fields
    #[arg(long, global = true)]
    pub spacing: Option<String>,
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

/// A report and whether its checks passed.
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

pub fn execute(cfg: &RunConfig) -> Outcome {
    let result = report_for(cfg).and_then(|rep| {
        let format: OutputFormat = cfg.options.output.parse()?;
        let text = report::render(&rep.value, format)?;
        Ok((rep.passed, text))
    });
    match result {
        Ok((passed, text)) => {
            let code = if passed { 0 } else { EXIT_FAILED };
            let stderr = if passed { String::new() } else { "verification failed\n".to_string() };
            match &cfg.options.out {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Outcome { code, stdout: String::new(), stderr },
                    Err(e) => error_outcome(&e.into()),
                },
                None => Outcome { code, stdout: text, stderr },
            }
        }
        Err(e) => error_outcome(&e),
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

/// Runs the command and returns its report without serializing it.
pub fn report_for(cfg: &RunConfig) -> Result<Report> {
    let o = &cfg.options;
    match cfg.command {
        Command::Models => Ok(Report {
            value: json!({
                "models": registry::catalog(),
                "cases": manufactured::CASE_NAMES,
            }),
            passed: true,
        }),
        Command::Tensor => tensor_report(&model_from(o)?, o),
        Command::Invariance => invariance_report(&model_from(o)?, o),
        Command::Verify => verify_report(o),
        Command::Variation => variation_report(&model_from(o)?, o),
        Command::Jump => jump_report(&model_from(o)?, o),
    }
}

/// Builds the model named by `--model`, `--params` and `--expr`.
pub fn model_from(o: &Options) -> Result<LagrangianModel> {
    let name = o
        .model
        .as_deref()
        .ok_or_else(|| Error::Input("--model is required".into()))?;
    let mut params = ModelParams::parse(&o.params)?;
    if let Some(expr) = &o.expr {
        params = params.set("expr", expr);
    }
    registry::build(name, &params)
}

#[derive(Clone, Debug)]
struct Tolerances(ModelParams);

impl Tolerances {
    fn parse(text: &str) -> Result<Self> {
        let t = ModelParams::parse(text)?;
        t.check_known("--tol", &["residual", "order", "jump", "variation"])?;
        Ok(Tolerances(t))
    }

    fn get(&self, key: &str, default: f64) -> Result<f64> {
        self.0.f64_or(key, default)
    }
}

fn json_input(text: &str) -> Result<Value> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(serde_json::from_str(trimmed)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(text)?)?)
    }
}

fn f64_list(v: &Value, key: &str) -> Result<Option<Vec<f64>>> {
    match v.get(key) {
        None => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::Input(format!("`{key}` must hold numbers"))))
            .collect::<Result<Vec<_>>>()
            .map(Some),
        Some(_) => Err(Error::Input(format!("`{key}` must be an array"))),
    }
}

fn f64_field(v: &Value, key: &str) -> Result<Option<f64>> {
    match v.get(key) {
        None => Ok(None),
        Some(x) => x
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::Input(format!("`{key}` must be a number"))),
    }
}

fn array3(v: Vec<f64>, key: &str) -> Result<[f64; 3]> {
    v.try_into()
        .map_err(|_| Error::Input(format!("`{key}` needs 3 entries")))
}

/// Reads a state in the variables natural to the model:
/// `{"coeffs": [...], "s": ..}` always, `{"rho", "q", "s"}` for gas,
/// `{"m", "s"}` for `n`-forms, `{"E", "B"}` for electromagnetism.
pub fn parse_state(model: &LagrangianModel, v: &Value) -> Result<PFormValue> {
    if !v.is_object() {
        return Err(Error::Input("state must be a JSON object".into()));
    }
    let s = f64_field(v, "s")?;
    let with_s = |mut alpha: PFormValue| {
        if s.is_some() || model.uses_entropy() {
            alpha.set_entropy(Some(s.unwrap_or(0.0)));
        }
        alpha
    };
    if let Some(c) = f64_list(v, "coeffs")? {
        return Ok(with_s(PFormValue::from_coeffs(model.dim, model.degree, c)?));
    }
    let alpha = match &model.kind {
        ModelKind::Gas(g) if v.get("rho").is_some() => {
            let rho = f64_field(v, "rho")?.unwrap_or(f64::NAN);
            let q = f64_list(v, "q")?.unwrap_or_else(|| vec![0.0; g.n]);
            if q.len() != g.n {
                return Err(Error::DimensionMismatch { expected: g.n, got: q.len() });
            }
            GasState::new(rho, q, s.unwrap_or(0.0)).encode()
        }
        ModelKind::Maxwell(_) => {
            let e = array3(f64_list(v, "E")?.unwrap_or(vec![0.0; 3]), "E")?;
            let b = array3(f64_list(v, "B")?.unwrap_or(vec![0.0; 3]), "B")?;
            EMState::new(e, b).encode()
        }
        _ if model.degree + 1 == model.dim && v.get("m").is_some() => {
            let m = f64_list(v, "m")?.unwrap_or_default();
            if m.len() != model.dim {
                return Err(Error::DimensionMismatch { expected: model.dim, got: m.len() });
            }
            encoding::encode_nform(&m)
        }
        _ => {
            return Err(Error::Input(
                "state needs `coeffs`, or `rho`/`q` (gas), `m` (n-forms), `E`/`B` (electromagnetism)".into(),
            ))
        }
    };
    Ok(with_s(alpha))
}

fn tensor_report(model: &LagrangianModel, o: &Options) -> Result<Report> {
    let text = o
        .state
        .as_deref()
        .ok_or_else(|| Error::Input("--state is required".into()))?;
    let alpha = parse_state(model, &json_input(text)?)?;
    let t = tensor::assemble_general(model, &alpha)?;
    let mut out = json!({
        "model": model.name,
        "dim": model.dim,
        "degree": model.degree,
        "coeffs": alpha.coeffs(),
        "s": alpha.entropy(),
        "lagrangian": model.evaluate(&alpha)?,
        "T": t.rows(),
    });
    if let Some(hint) = &model.metric_hint {
        out["metric_hint"] = json!(rows_of(hint));
        out["symmetry_defect"] = json!(tensor::symmetry_defect(&t.entries, hint)?);
    }
    match &model.kind {
        ModelKind::Gas(g) => {
            let gt = tensor::assemble_gas(g, &GasState::decode(&alpha)?)?;
            out["T_prime"] = json!(gt.t_prime.rows());
            out["pressure"] = json!(gt.pressure);
        }
        ModelKind::Relativistic(r) => {
            let rt = tensor::assemble_relativistic(r, &RelativisticState::decode(&alpha, r.c)?)?;
            out["T_prime"] = json!(rt.t_prime.rows());
            out["energy_density"] = json!(rt.energy_density);
            out["pressure"] = json!(rt.pressure);
        }
        ModelKind::Maxwell(m) => {
            let mt = tensor::assemble_maxwell(m, &EMState::decode(&alpha)?)?;
            out["T_tilde"] = json!(mt.t_tilde.rows());
            out["energy_density"] = json!(mt.energy_density);
            out["poynting"] = json!(mt.poynting);
        }
        _ => {}
    }
    Ok(Report { value: out, passed: true })
}

/// Resolves `--metric`; without the flag the model's hint, else Euclidean.
pub fn metric_from(model: &LagrangianModel, spec: &[String]) -> Result<MetricSignature> {
    let c = match &model.kind {
        ModelKind::Relativistic(r) => r.c,
        _ => 1.0,
    };
    match spec.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        [] => match &model.metric_hint {
            Some(s) => MetricSignature::new(s.clone()),
            None => Ok(MetricSignature::euclidean(model.dim)),
        },
        ["euclidean"] => Ok(MetricSignature::euclidean(model.dim)),
        ["minkowski"] => MetricSignature::minkowski(model.dim, c),
        ["custom", path] => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(Error::Input("custom metric must be a square array of rows".into()));
            }
            let flat: Vec<f64> = rows.concat();
            MetricSignature::new(DMatrix::from_row_slice(d, d, &flat))
        }
        other => Err(Error::Input(format!(
            "unknown metric `{}` (euclidean, minkowski, custom PATH)",
            other.join(" ")
        ))),
    }
}

fn invariance_report(model: &LagrangianModel, o: &Options) -> Result<Report> {
    let metric = metric_from(model, &o.metric)?;
    let states = symmetry::sample_states(model, o.states, o.seed);
    let rep = symmetry::equivalence_on(model, &metric, &states, o.seed)?;
    let mut trace: f64 = 0.0;
    for alpha in &states {
        trace = trace.max(symmetry::trace_identity(model, &metric, alpha)?);
    }
    let passed = rep.agree && rep.verdict != "inconclusive";
    let mut value = report::to_value(&rep)?;
    value["model"] = json!(model.name);
    value["metric"] = json!(rows_of(metric.matrix()));
    value["trace_identity"] = json!(trace);
    value["states_checked"] = json!(states.len());
    Ok(Report { value, passed })
}

fn cells_from(h: Option<f64>, default: usize) -> Result<usize> {
    match h {
        None => Ok(default),
        Some(h) if h > 0.0 && h <= 0.5 => Ok((1.0 / h).round() as usize),
        Some(h) => Err(Error::Input(format!("--h {h} must lie in (0, 1/2]"))),
    }
}

#[derive(Serialize)]
struct Level {
    cells: usize,
    h: f64,
    closedness: f64,
    divergence_rows: Vec<f64>,
    divergence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropy_transport: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poynting_gap: Option<f64>,
}

fn measure<S: FieldSource + ?Sized>(model: &LagrangianModel, f: &S, cells: usize) -> Result<Level> {
    let div = verify::div_t_residual(model, f)?;
    let has_entropy = f.value_at(&vec![0; f.dim()]).entropy().is_some();
    let entropy_transport = if has_entropy && model.degree + 1 == model.dim {
        Some(verify::entropy_transport_residual(model, f)?.residual)
    } else {
        None
    };
    let poynting_gap = if model.as_maxwell().is_some() {
        Some(verify::poynting_consistency(model, f)?.0)
    } else {
        None
    };
    Ok(Level {
        cells,
        h: f.spec().spacing().iter().copied().fold(0.0, f64::max),
        closedness: verify::closedness_residual(f)?,
        divergence_rows: div.rows,
        divergence: div.max,
        entropy_transport,
        poynting_gap,
    })
}

/// Passes when the finest value is within `tol`, or when refinement shows
/// the residual shrinking at order at least `order`.
fn converged(series: &[f64], tol: f64, order: f64) -> bool {
    let last = *series.last().expect("at least one level");
    if last <= tol {
        return true;
    }
    series.len() >= 2 && verify::observed_order(series[series.len() - 2], last) >= order
}

fn orders(series: &[f64]) -> Vec<f64> {
    series.windows(2).map(|w| verify::observed_order(w[0], w[1])).collect()
}

fn verify_report(o: &Options) -> Result<Report> {
    let tol = Tolerances::parse(&o.tol)?;
    let (res_tol, order_tol) = (tol.get("residual", 1e-8)?, tol.get("order", 1.9)?);
    let mut levels = Vec::new();
    let mut out = json!({});
    if let Some(name) = &o.case {
        let n0 = cells_from(o.h, 8)?;
        let mut model_name = String::new();
        let mut expect: Option<Expectation> = None;
        for k in 0..=o.refine {
            let c = manufactured::case(name, n0 << k)?;
            levels.push(measure(&c.model, &c.field, n0 << k)?);
            model_name = c.model.name.clone();
            expect = Some(c.expect);
        }
        let e = expect.expect("one level");
        out["case"] = json!(name);
        out["model"] = json!(model_name);
        out["expected"] = json!({
            "closed": e.closed,
            "divergence_free": e.divergence_free,
            "entropy_transported": e.entropy_transported,
        });
    } else {
        let path = o
            .field
            .as_ref()
            .ok_or_else(|| Error::Input("verify needs --case or --field".into()))?;
        if o.refine > 0 {
            return Err(Error::Input("--refine applies to catalog cases only".into()));
        }
        let model = model_from(o)?;
        let field = read_field(path, model.degree, o)?;
        let cells = field.spec().dims()[0] - 1;
        levels.push(measure(&model, &field, cells)?);
        out["field"] = json!(path.display().to_string());
        out["model"] = json!(model.name);
    }
    let closed: Vec<f64> = levels.iter().map(|l| l.closedness).collect();
    let rows = levels[0].divergence_rows.len();
    let mut passed = converged(&closed, res_tol, order_tol);
    let mut row_orders = Vec::new();
    for i in 0..rows {
        let series: Vec<f64> = levels.iter().map(|l| l.divergence_rows[i]).collect();
        passed &= converged(&series, res_tol, order_tol);
        row_orders.push(orders(&series));
    }
    let mut order_report = json!({"closedness": orders(&closed), "divergence_rows": row_orders});
    if levels[0].entropy_transport.is_some() {
        let series: Vec<f64> = levels.iter().map(|l| l.entropy_transport.unwrap_or(f64::NAN)).collect();
        passed &= converged(&series, res_tol, order_tol);
        order_report["entropy_transport"] = json!(orders(&series));
    }
    out["levels"] = json!(levels);
    out["orders"] = order_report;
    out["tolerances"] = json!({"residual": res_tol, "order": order_tol});
    out["passed"] = json!(passed);
    Ok(Report { value: out, passed })
}

/// Reads a manifest, or a CSV file when the extension is `.csv`.
pub fn read_field(path: &std::path::Path, degree: usize, o: &Options) -> Result<GridField> {
    if path.extension().is_some_and(|e| e == "csv") {
        let spacing: Vec<f64> = o
            .spacing
            .as_deref()
            .ok_or_else(|| Error::Input("CSV fields need --spacing".into()))?
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Input(format!("spacing: {e}"))))
            .collect::<Result<_>>()?;
        let origin = vec![0.0; spacing.len()];
        GridField::from_csv(std::fs::File::open(path)?, degree, spacing, origin)
    } else {
        GridField::read(path)
    }
}

#[derive(Serialize)]
struct VariationLevel {
    cells: usize,
    #[serde(flatten)]
    values: verify::FirstVariation,
    gap: f64,
    summation_by_parts_gap: f64,
}

fn variation_report(model: &LagrangianModel, o: &Options) -> Result<Report> {
    let tol = Tolerances::parse(&o.tol)?;
    let (var_tol, order_tol) = (tol.get("variation", 1e-8)?, tol.get("order", 1.9)?);
    let n0 = cells_from(o.h, 12)?;
    let eps0 = o.epsilon.unwrap_or(0.25 / n0 as f64);
    let form = RandomSmoothForm::new(model, o.seed)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(o.seed.wrapping_add(1));
    let xi0 = VariationField::random(GridSpec::cube(model.dim, n0, 0.0, 1.0)?, &mut rng)?;
    let mut levels = Vec::new();
    for k in 0..=o.refine {
        let n = n0 << k;
        let spec = GridSpec::cube(model.dim, n, 0.0, 1.0)?;
        let field = AnalyticField::new(spec.clone(), model.degree, |y: &[f64]| form.eval(y));
        let xi = xi0.on(spec)?;
        let fv = verify::first_variation(model, &field, &xi, eps0 / (1u64 << k) as f64)?;
        levels.push(VariationLevel {
            cells: n,
            gap: (fv.numeric_derivative - fv.tensor_pairing).abs(),
            summation_by_parts_gap: (fv.tensor_pairing - fv.divergence_pairing).abs(),
            values: fv,
        });
    }
    let gaps: Vec<f64> = levels.iter().map(|l| l.gap).collect();
    let sbp: Vec<f64> = levels.iter().map(|l| l.summation_by_parts_gap).collect();
    let passed = converged(&gaps, var_tol, order_tol);
    Ok(Report {
        value: json!({
            "model": model.name,
            "seed": o.seed,
            "levels": levels,
            "orders": orders(&gaps),
            "summation_by_parts_orders": orders(&sbp),
            "tolerances": {"variation": var_tol, "order": order_tol},
            "passed": passed,
        }),
        passed,
    })
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Input(format!("`{x}`: {e}"))))
        .collect()
}

fn jump_report(model: &LagrangianModel, o: &Options) -> Result<Report> {
    let tol = Tolerances::parse(&o.tol)?;
    let jump_tol = tol.get("jump", 1e-10)?;
    let nu = parse_list(
        o.nu
            .as_deref()
            .ok_or_else(|| Error::Input("--nu is required".into()))?,
    )?;
    let left = parse_state(
        model,
        &json_input(o.left.as_deref().ok_or_else(|| Error::Input("--left is required".into()))?)?,
    )?;
    match (o.right.as_deref(), model.as_relativistic()) {
        (Some(right), _) => {
            let right = parse_state(model, &json_input(right)?)?;
            let jump = verify::JumpInterface::new(nu, left, right)?;
            let rep = verify::rankine_hugoniot(model, &jump)?;
            let passed = rep.max <= jump_tol;
            let mut value = report::to_value(&rep)?;
            value["model"] = json!(model.name);
            value["nu"] = json!(jump.nu());
            value["passed"] = json!(passed);
            Ok(Report { value, passed })
        }
        (None, Some(gas)) if gas.law == DensityLaw::Limit => {
            let nu: [f64; 4] = nu
                .try_into()
                .map_err(|_| Error::Input("--nu needs 4 entries".into()))?;
            let st = RelativisticState::decode(&left, gas.c)?;
            let lambdas: Vec<f64> = (-2000..=2000).map(|i| i as f64 * 1e-3).collect();
            let found = verify::limit_jump_search(gas, st.m, st.s, nu, &lambdas, 1e-3)?;
            let passed = found.best_residual <= jump_tol;
            let mut value = report::to_value(&found)?;
            value["model"] = json!(model.name);
            value["passed"] = json!(passed);
            Ok(Report { value, passed })
        }
        _ => Err(Error::Input("--right is required".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("formtensor".to_string())
            .chain(shell_split(s))
            .collect()
    }

    // single-quoted segments stay whole
    fn shell_split(s: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        for ch in s.chars() {
            match ch {
                '\'' => quoted = !quoted,
                ' ' if !quoted => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }

    #[test]
    fn gas_tensor_hand_values() {
        let out = run(args(r#"tensor --model gas --params g=polytropic,gamma=2 --state '{"rho":1,"q":[1]}'"#));
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let t: Vec<Vec<f64>> = serde_json::from_value(v["T"].clone()).unwrap();
        let want = [[-1.0, -1.5], [1.0, 1.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t[i][j] - want[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(args("tensor --model nope --state '{}'")).code, EXIT_ERROR);
        assert_eq!(run(args("frobnicate")).code, EXIT_ERROR);
        assert_eq!(run(args("models")).code, 0);
        assert_eq!(run(args("--help")).code, 0);
        assert_eq!(run(args("verify --case gas-static-nonuniform")).code, EXIT_FAILED);
        assert_eq!(run(args("verify --case gas-uniform")).code, 0);
    }

    #[test]
    fn metric_flag_forms() {
        let model = registry::build("relativistic", &ModelParams::parse("c=2").unwrap()).unwrap();
        let m = metric_from(&model, &["minkowski".into()]).unwrap();
        assert_eq!(m.matrix()[(0, 0)], -4.0);
        assert!(metric_from(&model, &["hyperbolic".into()]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, "[[2,0],[0,1]]").unwrap();
        let iso = registry::build("iso-p1", &ModelParams::parse("d=2").unwrap()).unwrap();
        let s = metric_from(&iso, &["custom".into(), path.display().to_string()]).unwrap();
        assert_eq!(s.matrix()[(0, 0)], 2.0);
    }

    #[test]
    fn states_in_natural_variables() {
        let mx = registry::build("maxwell-linear", &ModelParams::default()).unwrap();
        let a = parse_state(&mx, &json!({"E": [1, 2, 3], "B": [4, 5, 6]})).unwrap();
        assert_eq!(a, EMState::new([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]).encode());
        let iso = registry::build("iso-p1", &ModelParams::default()).unwrap();
        assert!(parse_state(&iso, &json!({"coeffs": [1, 2]})).is_err());
        assert!(parse_state(&iso, &json!({"rho": 1})).is_err());
    }

    #[test]
    fn csv_output_has_header() {
        let out = run(args("invariance --model iso-p1 --states 5 --output csv"));
        assert_eq!(out.code, 0, "{}", out.stderr);
        let header = out.stdout.lines().next().unwrap();
        assert!(header.split(',').any(|k| k == "verdict"));
    }
}
