//! The golden-identity suite behind `verify-paper`: each check recomputes a
//! published identity or bound and reports whether it holds.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{rat, ratio, rational_to_f64, rpow, Exponent, Rational, DEFAULT_PRECISION};
use crate::duals::{alpha_matrix_b, beta_matrix_t, dual_membership, DualKind, SpaceKind};
use crate::error::{Error, Result};
use crate::exec::{EvalOptions, Exec};
use crate::matclass::{compactness_verdict, mnc_estimate, op_norm, class_check, Compactness, Target};
use crate::matrices::{
    basis_vector, forward_transform, forward_transform_real, inverse_transform, make_E, make_E_inverse, make_fhat,
    make_lambda_matrix, triangle_apply, triangle_compose, triangle_invert, triangle_solve, RowSource, WindowMatrix,
};
use crate::sequences::{cassini, fib, gen_witness, gen_witness_real, LambdaSeq, Provenance, SeqSpec, SeqWindow, SpecGenerator, WitnessId};
use crate::spaces::{inclusion_bounds_check, lambda_m, parallelogram_check, working_precision};
use crate::verdict::Status;

pub const CHECKS: [&str; 10] = [
    "inverse-identity",
    "composition",
    "witnesses",
    "oracle-equivalence",
    "parallelogram",
    "basis-reconstruction",
    "norm-inequalities",
    "dual-machinery",
    "matrix-class",
    "fibonacci",
];

#[derive(Clone, Debug, Serialize)]
pub struct GoldenCheck {
    pub name: &'static str,
    /// What the identity states, in words.
    pub anchor: &'static str,
    pub passed: bool,
    pub details: Value,
}

#[derive(Clone, Debug)]
pub struct GoldenOptions {
    /// Overrides the window size of checks that take one.
    pub n: Option<usize>,
    /// Restricts the parallelogram check to one exponent.
    pub p: Option<Exponent>,
    pub seed: u64,
    pub precision: u32,
    pub exec: Exec,
}

impl Default for GoldenOptions {
    fn default() -> Self {
        GoldenOptions {
            n: None,
            p: None,
            seed: 0,
            precision: DEFAULT_PRECISION,
            exec: Exec::default(),
        }
    }
}

fn lam(s: &str) -> LambdaSeq {
    s.parse().expect("built-in lambda spec")
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

fn random_window(rng: &mut ChaCha8Rng, n: usize) -> SeqWindow {
    let v = (0..n).map(|_| random_rational(rng)).collect();
    SeqWindow::new(v, Provenance::new("random")).expect("nonempty")
}

/// Runs every check, or just `only`.
pub fn verify_paper(only: Option<&str>, opts: &GoldenOptions) -> Result<Vec<GoldenCheck>> {
    match only {
        Some(name) => Ok(vec![run_check(name, opts)?]),
        None => CHECKS.iter().map(|name| run_check(name, opts)).collect(),
    }
}

pub fn run_check(name: &str, opts: &GoldenOptions) -> Result<GoldenCheck> {
    match name {
        "inverse-identity" => inverse_identity(opts),
        "composition" => composition(opts),
        "witnesses" => witnesses(opts),
        "oracle-equivalence" => oracle_equivalence(opts),
        "parallelogram" => parallelogram(opts),
        "basis-reconstruction" => basis_reconstruction(opts),
        "norm-inequalities" => norm_inequalities(opts),
        "dual-machinery" => dual_machinery(opts),
        "matrix-class" => matrix_class(opts),
        "fibonacci" => fibonacci(opts),
        _ => Err(Error::parse("check", name, format!("expected one of {}", CHECKS.join(", ")))),
    }
}

const LAMBDAS: [&str; 3] = ["linear:1,1", "linear:2,3", "geometric:2,1"];

fn inverse_identity(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let n = opts.n.unwrap_or(64);
    let mut details = Vec::new();
    let mut passed = true;
    for s in LAMBDAS {
        let l = lam(s);
        let (e, inv) = (make_E(&l), make_E_inverse(&l));
        let right = triangle_compose(&e, &inv).window_with(n, opts.exec).is_identity();
        let left = triangle_compose(&inv, &e).window_with(n, opts.exec).is_identity();
        passed &= right && left;
        details.push(json!({"lambda": s, "n": n, "E*Einv": right, "Einv*E": left}));
    }
    Ok(GoldenCheck {
        name: "inverse-identity",
        anchor: "E is a triangle with a unique two-sided inverse",
        passed,
        details: Value::Array(details),
    })
}

fn composition(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let n = opts.n.unwrap_or(40);
    let mut details = Vec::new();
    let mut passed = true;
    for s in LAMBDAS {
        let l = lam(s);
        let lf = triangle_compose(&make_lambda_matrix(&l), &make_fhat()).window_with(n, opts.exec);
        let ok = make_E(&l).window_with(n, opts.exec) == lf;
        passed &= ok;
        details.push(json!({"lambda": s, "n": n, "equal": ok}));
    }
    Ok(GoldenCheck {
        name: "composition",
        anchor: "E is the product of the weighted-mean and Fibonacci difference triangles",
        passed,
        details: Value::Array(details),
    })
}

fn image(id: WitnessId, l: &LambdaSeq, n: usize) -> Result<Vec<Rational>> {
    Ok(forward_transform(&gen_witness(id, l, None, n)?, l)?.into_values())
}

fn witnesses(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let l = lam("linear:1,1");
    let n = opts.n.unwrap_or(64);
    let short = n.min(32);
    let mut results = Vec::new();
    let mut record = |name: &str, ok: bool| {
        results.push((name.to_string(), ok));
    };

    let u = image(WitnessId::U, &l, short)?;
    record("Eu = (1, 1, 0, ...)", u.iter().enumerate().all(|(i, v)| *v == rat((i < 2) as i64)));
    let v = image(WitnessId::VHilbert, &l, short)?;
    record(
        "Ev = (1, -1, 0, ...)",
        v.iter().enumerate().all(|(i, x)| *x == [rat(1), rat(-1)].get(i).cloned().unwrap_or_else(Rational::zero)),
    );
    let t = image(WitnessId::T, &l, n + 1)?;
    record("E_n(t) = 1", t.iter().all(One::is_one));

    // the closed form holds from n = 1; at n = 0 the entry is 1
    let e0 = forward_transform(&gen_witness(WitnessId::Unit(0), &l, None, n + 1)?, &l)?.into_values();
    let c = rat(3) * l.get(0) - rat(2) * l.get(1);
    let closed = (1..=n).all(|i| e0[i] == &c / l.get(i));
    record("E_n(e0) = (3 l_0 - 2 l_1) / l_n for n >= 1", closed);
    record("E_0(e0) = 1", e0[0].is_one());

    let alt = image(WitnessId::Alternating, &l, n + 1)?;
    record("E_n(y) = (-1)^n", alt.iter().enumerate().all(|(i, v)| *v == rat(if i % 2 == 0 { 1 } else { -1 })));

    let p = Exponent::integer(2);
    let prec = working_precision(opts.precision, n + 1);
    let x = gen_witness_real(WitnessId::PowerLaw, &l, Some(&p), n + 1, prec)?;
    let y = forward_transform_real(&x.values, &l, prec)?;
    let tol = Rational::new(1.into(), num_bigint::BigInt::one() << 128usize);
    let mut worst = 0.0f64;
    let mut power_ok = true;
    for (i, yi) in y.iter().enumerate() {
        let want = rpow(&rat(i as i64 + 1), &ratio(-1, 2), prec)?;
        let err = (yi.mid() - want.mid()).abs() + yi.rad() + want.rad();
        worst = worst.max(rational_to_f64(&err));
        power_ok &= err <= tol;
    }
    record("E_n(x) = (n+1)^(-1/2) within 2^-128", power_ok);

    let passed = results.iter().all(|r| r.1);
    Ok(GoldenCheck {
        name: "witnesses",
        anchor: "the separating witnesses have the stated images under E",
        passed,
        details: json!({
            "n": n,
            "identities": results.iter().map(|(k, v)| json!({"identity": k, "holds": v})).collect::<Vec<_>>(),
            "power_law_max_error": worst,
        }),
    })
}

fn oracle_equivalence(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let n = opts.n.unwrap_or(32);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let l = lam("linear:1,1");
    let e = make_E(&l);
    let mut solves = true;
    for _ in 0..100 {
        let y = random_window(&mut rng, n);
        solves &= inverse_transform(&y, &l)?.values() == triangle_solve(&e, y.values())?.as_slice();
    }
    let closed = make_E_inverse(&l).window_with(n, opts.exec) == triangle_invert(&e, n)?;
    Ok(GoldenCheck {
        name: "oracle-equivalence",
        anchor: "the closed-form inverse agrees with forward substitution",
        passed: solves && closed,
        details: json!({"n": n, "inverse_transform_vs_solve": solves, "closed_form_vs_substitution": closed}),
    })
}

fn parallelogram(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let l = lam("linear:1,1");
    let ps: Vec<Exponent> = match &opts.p {
        Some(p) => vec![p.clone()],
        None => ["1", "3/2", "2", "3", "4"].iter().map(|s| s.parse().expect("exponent")).collect(),
    };
    let mut passed = true;
    let mut details = Vec::new();
    for p in &ps {
        let r = parallelogram_check(&l, p, opts.precision)?;
        let lhs_ok = r.lhs.mid() == &rat(8) && r.lhs.is_exact();
        let ok = if *p == Exponent::integer(2) {
            lhs_ok && r.equal && r.rhs.mid() == &rat(8)
        } else {
            lhs_ok && !r.equal && r.lhs.separated_by(&r.rhs, &rat(10))
        };
        passed &= ok;
        details.push(json!({
            "p": p.to_string(),
            "lhs": r.lhs.to_f64(),
            "rhs": r.rhs.to_f64(),
            "rhs_error_bound": r.rhs.error_f64(),
            "verdict": if r.equal { "equal" } else { "not-equal" },
            "expected": ok,
        }));
    }
    Ok(GoldenCheck {
        name: "parallelogram",
        anchor: "the parallelogram identity holds only for p = 2",
        passed,
        details: Value::Array(details),
    })
}

fn basis_reconstruction(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let m = opts.n.unwrap_or(24);
    let l = lam("linear:1,1");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut inputs = vec![gen_witness(WitnessId::T, &l, None, m + 1)?];
    inputs.extend((0..10).map(|_| random_window(&mut rng, m + 1)));
    let basis = (0..=m).map(|k| basis_vector(k, &l, m + 1)).collect::<Result<Vec<_>>>()?;
    let mut passed = true;
    for x in &inputs {
        let coeffs = forward_transform(x, &l)?;
        let sum: Vec<Rational> = (0..=m)
            .map(|i| (0..=m).map(|k| &coeffs.values()[k] * &basis[k].values()[i]).sum())
            .collect();
        passed &= sum == x.values();
    }
    Ok(GoldenCheck {
        name: "basis-reconstruction",
        anchor: "every element has a unique expansion in the basis b^(k)",
        passed,
        details: json!({"m": m, "inputs": inputs.len()}),
    })
}

fn norm_inequalities(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.n.unwrap_or(32);
    let lin = lam("linear:1,1");
    let geo = lam("geometric:2,1");
    let p = Exponent::integer(2);
    let mut sup_ok = true;
    let mut p_ok = true;
    for _ in 0..100 {
        let x = random_window(&mut rng, n);
        sup_ok &= inclusion_bounds_check(&x, &lin, &Exponent::Infinity, opts.precision)?.sup_bound.holds;
        let r = inclusion_bounds_check(&x, &geo, &p, opts.precision)?;
        p_ok &= r.sup_bound.holds && r.p_bound.is_some_and(|b| b.holds);
    }
    let m = lambda_m(&geo, 8)?;
    let m_ok = m.value == rat(2) && m.verdict.status == Status::HoldsExactly;
    Ok(GoldenCheck {
        name: "norm-inequalities",
        anchor: "||Ex||_inf <= 4 ||x||_inf and ||Ex||_p <= 4 M^(1/p) ||x||_p",
        passed: sup_ok && p_ok && m_ok,
        details: json!({"sup_bound": sup_ok, "p_bound": p_ok, "M": m.value.to_string()}),
    })
}

fn dual_machinery(opts: &GoldenOptions) -> Result<GoldenCheck> {
    const N: usize = 24;
    let l = lam("linear:1,1");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut abel = true;
    let mut pairing = true;
    for _ in 0..100 {
        let a = random_window(&mut rng, N);
        let x = random_window(&mut rng, N);
        let y = forward_transform(&x, &l)?;
        let ty = triangle_apply(&beta_matrix_t(&a, &l)?, &y)?;
        let by = triangle_apply(&alpha_matrix_b(&a, &l)?, &y)?;
        let mut partial = Rational::zero();
        for n in 0..N {
            let term = &a.values()[n] * &x.values()[n];
            partial += &term;
            abel &= ty.values()[n] == partial;
            pairing &= by.values()[n] == term;
        }
    }
    let e0 = SpecGenerator::new(SeqSpec::Unit(0), l.clone(), None);
    let mut eval = EvalOptions::new(16);
    eval.exec = opts.exec;
    let beta = dual_membership(&e0, &l, &SpaceKind::Lp(Exponent::integer(2)), DualKind::Beta, eval)?;
    let beta_ok = beta.status == Status::HoldsExactly;
    Ok(GoldenCheck {
        name: "dual-machinery",
        anchor: "sum_{k<=n} a_k x_k = T_n(Ex) and a_n x_n = B_n(Ex)",
        passed: abel && pairing && beta_ok,
        details: json!({"abel_identity": abel, "alpha_pairing": pairing, "e0_in_beta_dual_of_l2": beta.status}),
    })
}

fn matrix_class(opts: &GoldenOptions) -> Result<GoldenCheck> {
    let l = lam("linear:1,1");
    let p = Exponent::integer(2);
    let mut eval = EvalOptions::new(16);
    eval.exec = opts.exec;
    eval.precision = opts.precision;
    let single: Arc<dyn RowSource> = Arc::new(WindowMatrix::new(vec![vec![rat(1)]]).named("single-row"));
    let class = class_check(single.clone(), &l, &SpaceKind::Lp(p.clone()), &Target::Linf, eval)?;
    let norm = op_norm(single.clone(), &l, &p, &Target::Linf, eval)?;
    let mnc = mnc_estimate(single.clone(), &l, &p, &Target::C0, 32, eval)?;
    let compact = compactness_verdict(single, &l, &p, &Target::C0, 32, eval)?;
    let hat_identity: Arc<dyn RowSource> = Arc::new(make_E(&l));
    let noncompact = compactness_verdict(hat_identity, &l, &p, &Target::C0, 32, eval)?;
    let checks = [
        ("single row in (l_p : l_inf), exactly", class.status == Status::HoldsExactly),
        ("||L_A|| = 1", norm.exact && norm.low.mid().is_one() && norm.high.mid().is_one()),
        ("||L_A||_chi = 0", mnc.exact && mnc.limit.mid().is_zero()),
        ("L_A compact", compact.compactness == Compactness::Compact),
        ("mnc <= norm", !norm.high.certainly_lt(&mnc.high)),
        (
            "ehat = I gives s(r) = 1",
            noncompact.estimate.sweep.iter().all(|s| s.1 == 1.0) && noncompact.compactness == Compactness::EvidenceNoncompact,
        ),
    ];
    Ok(GoldenCheck {
        name: "matrix-class",
        anchor: "L_A is compact iff the measure of noncompactness vanishes",
        passed: checks.iter().all(|c| c.1),
        details: Value::Array(checks.iter().map(|(k, v)| json!({"identity": k, "holds": v})).collect()),
    })
}

fn fibonacci(_: &GoldenOptions) -> Result<GoldenCheck> {
    let cassini_ok = (1..=200usize).all(|n| cassini(n) == if n % 2 == 1 { 1.into() } else { (-1).into() });
    let ratios_ok = (0..=200usize).all(|k| {
        let (a, b) = (fib(k), fib(k + 1));
        a <= b && b <= &a * 2
    });
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let r = rational_to_f64(&Rational::new(fib(101), fib(100)));
    let gap = (r - phi).abs();
    Ok(GoldenCheck {
        name: "fibonacci",
        anchor: "Cassini's identity, the ratio bounds, and f_(k+1)/f_k -> golden ratio",
        passed: cassini_ok && ratios_ok && gap < 1e-12,
        details: json!({"cassini": cassini_ok, "ratio_bounds": ratios_ok, "golden_ratio_gap": gap}),
    })
}
