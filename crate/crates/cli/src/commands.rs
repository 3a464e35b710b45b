use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use fibdomain::arith::{format_rational, rational_to_decimal, rational_to_f64, Exponent, Rational, Real};
use fibdomain::duals::{dual_membership, DualKind, SpaceKind};
use fibdomain::error::Error;
use fibdomain::exec::{EvalOptions, Exec};
use fibdomain::golden::{verify_paper, GoldenOptions};
use fibdomain::matclass::{class_check, compactness_verdict, op_norm, Target};
use fibdomain::matrices::{
    basis_vector, forward_transform, forward_transform_real, inverse_transform, inverse_transform_real, make_E,
    parse_matrix_json, read_matrix_file, triangle_invert_with, DenseWindow, RowSource, Triangle,
};
use fibdomain::sequences::{LambdaSeq, Provenance, SeqGenerator, SeqSpec, SeqWindow, SpecGenerator};
use fibdomain::spaces::{inclusion_bounds_check, membership_evidence, space_norm, space_norm_real, working_precision};
use fibdomain::subset::SubsetStrategy;
use fibdomain::verdict::doubling_sweep;

use crate::{Cli, Command, Common, Mode, SweepKind};

const DEFAULT_WINDOW: usize = 32;
/// Digits after the point when printing irrational values.
const DIGITS: usize = 30;

pub struct Report {
    pub command: &'static str,
    pub text: String,
    pub json: Value,
    /// False when a verification ran and failed.
    pub passed: bool,
}

impl Report {
    fn ok(command: &'static str, text: String, json: Value) -> Self {
        Report { command, text, json, passed: true }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_input_error() { 2 } else { 3 }, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Result<T> = std::result::Result<T, Failure>;

struct Ctx<'a> {
    common: &'a Common,
    lambda: LambdaSeq,
    p: Option<Exponent>,
}

impl Ctx<'_> {
    fn window(&self) -> usize {
        self.common.window.unwrap_or(DEFAULT_WINDOW)
    }

    fn p_or_two(&self) -> Exponent {
        self.p.clone().unwrap_or_else(|| Exponent::integer(2))
    }

    fn exec(&self) -> Exec {
        if self.common.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    fn opts(&self) -> EvalOptions {
        EvalOptions {
            window: self.window(),
            strategy: SubsetStrategy::Auto { seed: self.common.seed },
            precision: self.common.precision,
            exec: self.exec(),
        }
    }

    fn sequence(&self, spec: &str) -> Result<SpecGenerator> {
        let spec: SeqSpec = spec.parse()?;
        Ok(SpecGenerator::new(spec, self.lambda.clone(), self.p.clone()))
    }

    fn space(&self, given: Option<&str>) -> Result<SpaceKind> {
        match given {
            Some(s) => Ok(s.parse()?),
            None => Ok(SpaceKind::Lp(self.p_or_two()).normalized()),
        }
    }

    /// `--A`: inline JSON, a JSON file, or a bare kind name.
    fn matrix(&self, given: &str) -> Result<Arc<dyn RowSource>> {
        let given = given.trim();
        if given.starts_with('{') {
            return Ok(parse_matrix_json(given, &self.lambda)?);
        }
        let path = Path::new(given);
        if path.exists() {
            return Ok(read_matrix_file(path, &self.lambda)?);
        }
        parse_matrix_json(&json!({ "kind": given }).to_string(), &self.lambda)
            .map_err(|_| input_error(format!("{given}: no such matrix file or kind")))
    }
}

trait Normalize {
    fn normalized(self) -> Self;
}

impl Normalize for SpaceKind {
    fn normalized(self) -> Self {
        match self {
            SpaceKind::Lp(p) if p.is_one() => SpaceKind::L1,
            SpaceKind::Lp(p) if p.is_infinite() => SpaceKind::Linf,
            other => other,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let common = &cli.common;
    let ctx = Ctx {
        common,
        lambda: common.lambda.parse()?,
        p: common.p.as_deref().map(str::parse).transpose()?,
    };
    match &cli.command {
        Command::Transform { x, y, inverse } => transform(&ctx, x.as_deref(), y.as_deref(), *inverse),
        Command::Invert { a } => invert(&ctx, a.as_deref()),
        Command::Norm { x, bounds } => norm(&ctx, x, *bounds),
        Command::Basis { k } => basis(&ctx, *k),
        Command::Dual { a, space, kind } => dual(&ctx, a, space.as_deref(), kind),
        Command::Class { a, x, y } => class(&ctx, a, x.as_deref(), y),
        Command::Opnorm { a, y } => opnorm(&ctx, a, y),
        Command::Mnc { a, y, rmax } => mnc(&ctx, a, y, *rmax),
        Command::VerifyPaper { only } => verify(&ctx, only.as_deref()),
        Command::PlotData { sweep, input, a, y, rmax, x } => match input {
            Some(path) => plot_from_file(*sweep, path),
            None => plot_run(&ctx, *sweep, a.as_deref(), y, *rmax, x.as_deref()),
        },
    }
}

fn real_json(r: &Real) -> Value {
    json!({
        "value": r.to_f64(),
        "decimal": rational_to_decimal(r.mid(), DIGITS),
        "exact": r.is_exact(),
        "error_bound": r.error_f64(),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---- transform ------------------------------------------------------------

enum Column {
    Exact(Vec<Rational>),
    Real(Vec<Real>),
    Float(Vec<f64>),
}

impl Column {
    fn cells(&self) -> Vec<String> {
        match self {
            Column::Exact(v) => v.iter().map(format_rational).collect(),
            Column::Real(v) => v.iter().map(|r| rational_to_decimal(r.mid(), DIGITS)).collect(),
            Column::Float(v) => v.iter().map(f64::to_string).collect(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Column::Exact(v) => json!(v.iter().map(format_rational).collect::<Vec<_>>()),
            Column::Real(v) => json!(v.iter().map(real_json).collect::<Vec<_>>()),
            Column::Float(v) => json!(v),
        }
    }
}

fn e_window_f64(l: &LambdaSeq, n: usize) -> Vec<Vec<f64>> {
    make_E(l).window(n).rows().iter().map(|r| r.iter().map(rational_to_f64).collect()).collect()
}

fn float_transform(l: &LambdaSeq, x: &[f64], inverse: bool) -> Vec<f64> {
    let e = e_window_f64(l, x.len());
    if inverse {
        let mut out: Vec<f64> = Vec::with_capacity(x.len());
        for (i, row) in e.iter().enumerate() {
            let s: f64 = (0..i).map(|j| row[j] * out[j]).sum();
            out.push((x[i] - s) / row[i]);
        }
        out
    } else {
        e.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

fn transform(ctx: &Ctx, x: Option<&str>, y: Option<&str>, inverse: bool) -> Result<Report> {
    let (spec, in_name, out_name) = match (inverse, x, y) {
        (false, Some(s), _) => (s, "x", "y"),
        (true, _, Some(s)) => (s, "y", "x"),
        (false, None, _) => return Err(input_error("transform needs --x (or --inverse with --y)")),
        (true, _, None) => return Err(input_error("transform --inverse needs --y")),
    };
    let n = ctx.window();
    if n == 0 {
        return Err(Error::EmptyWindow.into());
    }
    let gen = ctx.sequence(spec)?;
    let l = &ctx.lambda;
    let (input, output) = match gen.exact_prefix(n) {
        Ok(v) => {
            if ctx.common.mode == Mode::Float {
                let xf: Vec<f64> = v.iter().map(rational_to_f64).collect();
                let yf = float_transform(l, &xf, inverse);
                (Column::Float(xf), Column::Float(yf))
            } else {
                let w = SeqWindow::new(v, Provenance::new(gen.describe()))?;
                let out = if inverse { inverse_transform(&w, l)? } else { forward_transform(&w, l)? };
                (Column::Exact(w.into_values()), Column::Exact(out.into_values()))
            }
        }
        Err(Error::RealOnlyWitness(_)) => {
            let work = working_precision(ctx.common.precision, n);
            let v = gen.real_prefix(n, work)?;
            if ctx.common.mode == Mode::Float {
                let xf: Vec<f64> = v.iter().map(Real::to_f64).collect();
                let yf = float_transform(l, &xf, inverse);
                (Column::Float(xf), Column::Float(yf))
            } else {
                let out = if inverse { inverse_transform_real(&v, l, work)? } else { forward_transform_real(&v, l, work)? };
                (Column::Real(v), Column::Real(out))
            }
        }
        Err(e) => return Err(e.into()),
    };
    let (xs, ys) = (input.cells(), output.cells());
    let text = csv(
        &format!("n,{in_name},{out_name}"),
        (0..n).map(|i| vec![i.to_string(), xs[i].clone(), ys[i].clone()]),
    );
    let json = json!({
        "lambda": l.to_string(),
        "inverse": inverse,
        "mode": if ctx.common.mode == Mode::Float { "float" } else { "exact" },
        "input_spec": spec,
        "window": n,
        in_name: input.json(),
        out_name: output.json(),
    });
    Ok(Report::ok("transform", text, json))
}

// ---- matrices and sequences ----------------------------------------------

fn dense_rows_json(w: &DenseWindow, mode: Mode) -> Value {
    let rows: Vec<Value> = w
        .rows()
        .iter()
        .map(|r| match mode {
            Mode::Exact => json!(r.iter().map(format_rational).collect::<Vec<_>>()),
            Mode::Float => json!(r.iter().map(rational_to_f64).collect::<Vec<_>>()),
        })
        .collect();
    json!(rows)
}

fn invert(ctx: &Ctx, a: Option<&str>) -> Result<Report> {
    let n = ctx.window();
    let source: Arc<dyn RowSource> = match a {
        Some(a) => ctx.matrix(a)?,
        None => Arc::new(make_E(&ctx.lambda)),
    };
    let rows: Vec<Vec<Rational>> = (0..n).map(|i| source.row_prefix(i, n)).collect();
    let tri = Triangle::from_dense(DenseWindow::from_rows(rows)?, true);
    let inv = triangle_invert_with(&tri, n, ctx.exec())?;
    let cell = |v: &Rational| match ctx.common.mode {
        Mode::Exact => format_rational(v),
        Mode::Float => rational_to_f64(v).to_string(),
    };
    let header = (0..n).map(|k| format!("k{k}")).collect::<Vec<_>>().join(",");
    let text = csv(
        &format!("n,{header}"),
        (0..n).map(|i| std::iter::once(i.to_string()).chain((0..n).map(|k| cell(&inv.entry(i, k)))).collect()),
    );
    let json = json!({
        "matrix": source.describe(),
        "lambda": ctx.lambda.to_string(),
        "window": n,
        "inverse": dense_rows_json(&inv, ctx.common.mode),
    });
    Ok(Report::ok("invert", text, json))
}

fn basis(ctx: &Ctx, k: usize) -> Result<Report> {
    let n = ctx.window();
    let b = basis_vector(k, &ctx.lambda, n)?;
    let col = match ctx.common.mode {
        Mode::Exact => Column::Exact(b.into_values()),
        Mode::Float => Column::Float(b.values().iter().map(rational_to_f64).collect()),
    };
    let cells = col.cells();
    let text = csv("n,b", cells.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.clone()]));
    let json = json!({ "lambda": ctx.lambda.to_string(), "k": k, "window": n, "b": col.json() });
    Ok(Report::ok("basis", text, json))
}

fn norm(ctx: &Ctx, x: &str, bounds: bool) -> Result<Report> {
    let n = ctx.window();
    let p = ctx.p_or_two();
    let gen = ctx.sequence(x)?;
    let l = &ctx.lambda;
    let prec = ctx.common.precision;
    let exact = match gen.exact_prefix(n) {
        Ok(v) => Some(SeqWindow::new(v, Provenance::new(gen.describe()))?),
        Err(Error::RealOnlyWitness(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let estimate = match &exact {
        Some(w) => space_norm(w, l, &p, prec)?,
        None => {
            let work = working_precision(prec, n);
            space_norm_real(&gen.real_prefix(n, work)?, l, &p, prec)?
        }
    };
    let membership = membership_evidence(&gen, l, &p, &doubling_sweep(1, n), prec, ctx.exec())?;
    let inclusion = match (&exact, bounds) {
        (Some(w), true) => Some(inclusion_bounds_check(w, l, &p, prec)?),
        (None, true) => return Err(Error::RealOnlyWitness(x.to_string()).into()),
        _ => None,
    };
    let mut text = format!(
        "norm (p = {p}, N = {n}) = {}\nmembership: {}\n",
        estimate.value, membership.status
    );
    if let Some(t) = estimate.tail_fraction {
        text += &format!("tail fraction: {t:.6}\n");
    }
    if let Some(r) = &inclusion {
        text += &format!("sup bound holds: {}\n", r.sup_bound.holds);
        if let Some(b) = &r.p_bound {
            text += &format!("p bound holds: {}\n", b.holds);
        }
    }
    let json = json!({
        "lambda": l.to_string(),
        "p": p.to_string(),
        "x": x,
        "window": n,
        "norm": real_json(&estimate.value),
        "tail_fraction": estimate.tail_fraction,
        "sup_index": estimate.sup_index,
        "membership": to_value(&membership),
        "inclusion": inclusion.as_ref().map(to_value),
    });
    Ok(Report::ok("norm", text, json))
}

fn dual(ctx: &Ctx, a: &str, space: Option<&str>, kind: &str) -> Result<Report> {
    let kind: DualKind = kind.parse()?;
    let space = ctx.space(space)?;
    let gen = ctx.sequence(a)?;
    let m = dual_membership(&gen, &ctx.lambda, &space, kind, ctx.opts())?;
    let kind_name = to_value(&kind);
    let mut text = format!("{a} in {}-dual of {space}: {}\n", kind_name.as_str().unwrap_or_default(), m.status);
    for r in &m.reports {
        let value = r.value.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        text += &format!("  {}: {} (value {value})\n", r.condition, r.verdict.status);
    }
    Ok(Report::ok("dual", text, to_value(&m)))
}

// ---- matrix classes --------------------------------------------------------

fn class(ctx: &Ctx, a: &str, x: Option<&str>, y: &str) -> Result<Report> {
    let source = ctx.matrix(a)?;
    let x = ctx.space(x)?;
    let y: Target = y.parse()?;
    let r = class_check(source, &ctx.lambda, &x, &y, ctx.opts())?;
    let mut text = format!("A in ({x} : {y}) over {} rows: {}\n", r.rows, r.status);
    for c in &r.conditions {
        let value = c.value.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let bound = if c.lower_bound { " (lower bound)" } else { "" };
        text += &format!("  {}: {} (value {value}{bound})\n", c.id.as_str(), c.verdict.status);
    }
    Ok(Report::ok("class", text, to_value(&r)))
}

fn opnorm(ctx: &Ctx, a: &str, y: &str) -> Result<Report> {
    let source = ctx.matrix(a)?;
    let y: Target = y.parse()?;
    let p = ctx.p_or_two();
    let r = op_norm(source, &ctx.lambda, &p, &y, ctx.opts())?;
    let text = format!(
        "||L_A|| (p = {p}, Y = {y}) in [{}, {}]{}\nmembership: {}\n",
        r.low,
        r.high,
        if r.exact { " (exact)" } else { "" },
        r.verdict.status
    );
    Ok(Report::ok("opnorm", text, to_value(&r)))
}

fn mnc(ctx: &Ctx, a: &str, y: &str, rmax: usize) -> Result<Report> {
    let source = ctx.matrix(a)?;
    let y: Target = y.parse()?;
    let p = ctx.p_or_two();
    let r = compactness_verdict(source, &ctx.lambda, &p, &y, rmax, ctx.opts())?;
    let e = &r.estimate;
    let mut text = format!(
        "||L_A||_chi (p = {p}, Y = {y}) in [{}, {}]{}\ncompactness: {}\n",
        e.low,
        e.high,
        if e.exact { " (exact)" } else { "" },
        to_value(&r.compactness).as_str().unwrap_or_default()
    );
    text += "r,s\n";
    for (r, s) in &e.sweep {
        text += &format!("{r},{s}\n");
    }
    Ok(Report::ok("mnc", text, to_value(&r)))
}

// ---- verification and plotting --------------------------------------------

fn verify(ctx: &Ctx, only: Option<&str>) -> Result<Report> {
    let opts = GoldenOptions {
        n: ctx.common.window,
        p: ctx.p.clone(),
        seed: ctx.common.seed,
        precision: ctx.common.precision,
        exec: ctx.exec(),
    };
    let checks = verify_paper(only, &opts)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut text = String::new();
    for c in &checks {
        text += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.anchor);
        if only.is_some() {
            text += &format!("  {}\n", c.details);
        }
    }
    text += &format!("{} of {} passed\n", checks.iter().filter(|c| c.passed).count(), checks.len());
    let json = json!({ "passed": passed, "checks": to_value(&checks) });
    Ok(Report { command: "verify-paper", text, json, passed })
}

fn plot_header(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Mnc => "r,s",
        SweepKind::Norm => "N,norm",
    }
}

fn plot_report(kind: SweepKind, sweep: Vec<(usize, f64)>) -> Report {
    let text = csv(plot_header(kind), sweep.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]));
    let json = json!({ "columns": plot_header(kind).split(',').collect::<Vec<_>>(), "rows": sweep });
    Report::ok("plot-data", text, json)
}

fn plot_run(ctx: &Ctx, kind: SweepKind, a: Option<&str>, y: &str, rmax: usize, x: Option<&str>) -> Result<Report> {
    let p = ctx.p_or_two();
    let sweep = match kind {
        SweepKind::Mnc => {
            let a = a.ok_or_else(|| input_error("plot-data --sweep mnc needs --A"))?;
            let y: Target = y.parse()?;
            let est = fibdomain::matclass::mnc_estimate(ctx.matrix(a)?, &ctx.lambda, &p, &y, rmax, ctx.opts())?;
            est.sweep
        }
        SweepKind::Norm => {
            let x = x.ok_or_else(|| input_error("plot-data --sweep norm needs --x"))?;
            let gen = ctx.sequence(x)?;
            let n = ctx.window();
            if n == 0 {
                Vec::new()
            } else {
                let ns: Vec<usize> = (1..=n).collect();
                membership_evidence(&gen, &ctx.lambda, &p, &ns, ctx.common.precision, ctx.exec())?.sweep
            }
        }
    };
    Ok(plot_report(kind, sweep))
}

/// Finds the sweep in a saved report: a bare array of pairs, or an object
/// whose `sweep` (possibly under `estimate` or `membership`) holds one.
fn find_sweep(v: &Value) -> Option<&Value> {
    if v.is_array() {
        return Some(v);
    }
    ["sweep", "rows"]
        .iter()
        .find_map(|k| v.get(k).filter(|s| s.is_array()))
        .or_else(|| ["estimate", "membership", "verdict"].iter().find_map(|k| v.get(k).and_then(find_sweep)))
}

fn plot_from_file(kind: SweepKind, path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let sweep = find_sweep(&value).ok_or_else(|| input_error(format!("{}: no sweep found", path.display())))?;
    let pairs: Vec<(usize, f64)> = serde_json::from_value(sweep.clone())
        .map_err(|e| input_error(format!("{}: sweep must be [[index, value], ...]: {e}", path.display())))?;
    Ok(plot_report(kind, pairs))
}
