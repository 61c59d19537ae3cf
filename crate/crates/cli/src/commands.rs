//! Subcommand implementations. Each returns a JSON report, its text
//! rendering, and whether every check it ran passed.

use std::collections::HashSet;
use std::fmt::Write;

use padic_analysis::calculus::{
    classify_point, directional_derivative, strict_derivative, DiffEstimate, PointClass, Verdict,
};
use padic_analysis::certify::{
    certify_jacobian_with, certify_monotone_with, local_solve_estimated, partition_domain_with,
    JacobianCertificate, MonotoneMode, MonotonicityCertificate,
};
use padic_analysis::cosets::build_coset_table_with_cap;
use padic_analysis::func::{eval, image_map, load_function, FuncExpr};
use padic_analysis::measure::{
    integrate_abs_df_with, verify_change_of_variables_with, MeasureValue,
};
use padic_analysis::padic::{parse_point, Ball, Padic};
use padic_analysis::{Error, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::Command;

pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub pass: bool,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load(spec: &str, cfg: &RunConfig) -> Result<FuncExpr> {
    load_function(spec, cfg.prime)
}

fn point(s: &str, cfg: &RunConfig) -> Result<Padic> {
    parse_point(s, cfg.prime, cfg.precision)
}

fn ball(s: &str, cfg: &RunConfig) -> Result<Ball> {
    Ball::parse_short(s, cfg.prime)
}

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Converged { value } => format!("Converged: {}", value.to_compact_string()),
        Verdict::Unbounded => "Unbounded".into(),
        Verdict::DirectionalDisagreement { values } => {
            let parts: Vec<String> = values
                .iter()
                .map(|d| format!("λ={}: {}", d.lambda, d.value.to_compact_string()))
                .collect();
            format!("DirectionalDisagreement ({})", parts.join(", "))
        }
        Verdict::Undetermined { reason } => format!("Undetermined: {reason}"),
    }
}

fn estimate_text(est: &DiffEstimate) -> String {
    let mut t = String::new();
    writeln!(t, "verdict: {}", verdict_line(&est.verdict)).unwrap();
    writeln!(t, "certified scale: {}", est.certified_scale).unwrap();
    writeln!(t, "exhaustive: {}, seed: {}", est.exhaustive, est.seed).unwrap();
    writeln!(
        t,
        "{:>4} {:>7} {:>9} {:>8} {:>7} {:>6}",
        "j", "points", "quotients", "min_val", "spread", "cross"
    )
    .unwrap();
    for s in &est.scales {
        let cross = s
            .cross_agreement
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".into());
        writeln!(
            t,
            "{:>4} {:>7} {:>9} {:>8} {:>7} {:>6}",
            s.scale, s.points, s.quotients, s.min_valuation, s.spread, cross
        )
        .unwrap();
    }
    t
}

fn jacobian_text(c: &JacobianCertificate) -> String {
    let mut t = String::new();
    let p = c.ball.prime();
    writeln!(
        t,
        "{} Jacobian property on {} mod {p}^{}",
        if c.pass { "PASS" } else { "FAIL" },
        c.ball,
        c.k
    )
    .unwrap();
    writeln!(
        t,
        "|Df| = {}",
        c.abs_df.as_deref().unwrap_or("undetermined")
    )
    .unwrap();
    let img = c
        .check_a
        .image_ball
        .as_ref()
        .map(|b| b.to_string())
        .unwrap_or_else(|| "none".into());
    writeln!(
        t,
        "(a) {}: {} inputs, {} image residues, image ball {img}, {} solve witnesses, {} failures",
        mark(c.check_a.pass),
        c.check_a.input_count,
        c.check_a.image_count,
        c.check_a.solve_witnesses,
        c.check_a.solve_failures.len()
    )
    .unwrap();
    writeln!(
        t,
        "(b) {}: center {}",
        mark(c.check_b.pass),
        verdict_line(&c.check_b.center.verdict)
    )
    .unwrap();
    writeln!(
        t,
        "(c) {}: v(Df) at sampled points {:?}",
        mark(c.check_c.pass),
        c.check_c.valuations
    )
    .unwrap();
    write!(
        t,
        "(d) {}: {} pairs, {} violations",
        mark(c.check_d.pass),
        c.check_d.pairs_checked,
        c.check_d.violations
    )
    .unwrap();
    if let Some(w) = &c.check_d.counterexample {
        write!(
            t,
            "; witness x = {}, y = {}: v(f(x) - f(y)) = {}, expected {}",
            w.x.to_compact_string(),
            w.y.to_compact_string(),
            w.image_valuation,
            w.expected
                .map(|e| e.to_string())
                .unwrap_or_else(|| "-".into())
        )
        .unwrap();
    }
    writeln!(t).unwrap();
    t
}

fn monotone_text(c: &MonotonicityCertificate) -> String {
    let mut t = format!(
        "{} {:?} monotonicity on {} mod {}^{} ({} points)\n",
        if c.pass { "PASS" } else { "FAIL" },
        c.mode,
        c.ball,
        c.ball.prime(),
        c.k,
        c.points
    );
    if let Some(w) = &c.witness {
        writeln!(
            t,
            "witness x = {}, y = {}, z = {}: v(x-y) = {}, v(x-z) = {}, v(f(x)-f(y)) = {}, v(f(x)-f(z)) = {}",
            w.x.to_compact_string(),
            w.y.to_compact_string(),
            w.z.to_compact_string(),
            w.input_valuations.0,
            w.input_valuations.1,
            w.image_valuations.0,
            w.image_valuations.1
        )
        .unwrap();
    }
    t
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Eval { f, at } => {
            let func = load(&f.function, cfg)?;
            let x = point(at, cfg)?;
            let y = eval(&func, &x, cfg.precision)?;
            Ok(Outcome {
                json: json!({ "function": func.to_string(), "point": x, "value": y }),
                text: format!("{}\n", y.to_compact_string()),
                pass: true,
            })
        }
        Command::Diff { f, at, n, lambda } => {
            let func = load(&f.function, cfg)?;
            let a = point(at, cfg)?;
            let est = match (n, lambda) {
                (Some(n), Some(i)) => {
                    let table = build_coset_table_with_cap(cfg.prime, *n, cfg.budget)?;
                    directional_derivative(&func, &a, *n, &table.label(*i)?, &cfg.diff())?
                }
                (Some(_), None) => {
                    return Err(Error::InvalidArgument(
                        "a directional derivative needs --lambda".into(),
                    ))
                }
                _ => strict_derivative(&func, &a, &cfg.diff())?,
            };
            Ok(Outcome {
                pass: est.verdict.converged_value().is_some(),
                text: estimate_text(&est),
                json: json!({ "function": func.to_string(), "estimate": est }),
            })
        }
        Command::ClassifyPoint { f, at, n } => {
            let func = load(&f.function, cfg)?;
            let a = point(at, cfg)?;
            let class = classify_point(&func, &a, *n, &cfg.diff())?;
            let mut text = match &class {
                PointClass::Differentiable { value, .. } => {
                    format!("Differentiable: Df = {}\n", value.to_compact_string())
                }
                PointClass::InS { n, .. } => format!("in S_{n}\n"),
                PointClass::InT { n, .. } => format!("in T_{n}\n"),
                PointClass::Undetermined { reason, .. } => format!("Undetermined: {reason}\n"),
            };
            for e in &class.report().estimates {
                let l = e.direction.expect("directional");
                writeln!(
                    text,
                    "  λ = {:>6}: {}",
                    l.lambda(),
                    verdict_line(&e.verdict)
                )
                .unwrap();
            }
            Ok(Outcome {
                pass: !matches!(class, PointClass::Undetermined { .. }),
                text,
                json: json!({ "function": func.to_string(), "classification": class }),
            })
        }
        Command::Cosets { n } => {
            let table = build_coset_table_with_cap(cfg.prime, *n, cfg.budget)?;
            let mut text = format!(
                "p = {}, n = {n}, m = {}, |Λ| = {}\n{:>5} {:>9} {:>5} {:>8}\n",
                cfg.prime,
                table.hensel_m(),
                table.len(),
                "index",
                "valuation",
                "unit",
                "lambda"
            );
            for l in table.labels() {
                writeln!(
                    text,
                    "{:>5} {:>9} {:>5} {:>8}",
                    l.index,
                    l.valuation,
                    l.unit,
                    l.lambda()
                )
                .unwrap();
            }
            Ok(Outcome {
                json: to_json(&table),
                text,
                pass: true,
            })
        }
        Command::Solve {
            f,
            at,
            target,
            tol,
            max_iter,
        } => {
            let func = load(&f.function, cfg)?;
            let a = point(at, cfg)?;
            let c = parse_point(target, cfg.prime, tol.abs() + cfg.precision + 16)?;
            let r = local_solve_estimated(&func, &a, &c, *tol, *max_iter, &cfg.diff())?;
            let steps: Vec<i64> = r.log.iter().filter_map(|s| s.step_valuation).collect();
            let text = format!(
                "z = {}\nv(f(z) - c) = {} after {} iterations\nstep valuations: {steps:?}\n",
                r.z.truncate(r.root_precision).to_compact_string(),
                r.residual_valuation,
                r.iterations
            );
            Ok(Outcome {
                json: json!({ "function": func.to_string(), "solve": r }),
                text,
                pass: true,
            })
        }
        Command::CertifyJacobian { f, ball: b, k } => {
            let func = load(&f.function, cfg)?;
            let cert = certify_jacobian_with(&func, &ball(&b.ball, cfg)?, *k, &cfg.certify())?;
            Ok(Outcome {
                pass: cert.pass,
                text: jacobian_text(&cert),
                json: json!({ "function": func.to_string(), "certificate": cert }),
            })
        }
        Command::CertifyMonotone {
            f,
            ball: b,
            k,
            weak,
        } => {
            let func = load(&f.function, cfg)?;
            let mode = if *weak {
                MonotoneMode::Weak
            } else {
                MonotoneMode::Strict
            };
            let cert =
                certify_monotone_with(&func, &ball(&b.ball, cfg)?, *k, mode, &cfg.certify())?;
            Ok(Outcome {
                pass: cert.pass,
                text: monotone_text(&cert),
                json: json!({ "function": func.to_string(), "certificate": cert }),
            })
        }
        Command::Partition { f, ball: b, k, n } => {
            let func = load(&f.function, cfg)?;
            let part = partition_domain_with(&func, &ball(&b.ball, cfg)?, *k, *n, &cfg.certify())?;
            let mut text = format!(
                "partition of {} at scale {k} (certified mod p^{})\n",
                part.domain, part.certification_precision
            );
            for e in &part.entries {
                write!(text, "{:?}  {}", e.tag, e.ball).unwrap();
                if let Some(e) = e.e {
                    write!(text, "  |Df| = {}^{}", cfg.prime, -e).unwrap();
                }
                if let Some(note) = &e.note {
                    write!(text, "  ({note})").unwrap();
                }
                writeln!(text).unwrap();
            }
            Ok(Outcome {
                json: json!({ "function": func.to_string(), "partition": part }),
                text,
                pass: true,
            })
        }
        Command::Integrate { f, ball: b, k } => {
            let func = load(&f.function, cfg)?;
            let r = integrate_abs_df_with(&func, &ball(&b.ball, cfg)?, *k, &cfg.certify())?;
            let mut text = format!(
                "integral of |Df| = {}\ncertified measure {}, flat measure {}, uncovered measure {}\n",
                r.value, r.certified_measure, r.flat_measure, r.uncovered_measure
            );
            for b in &r.decomposition.certified {
                writeln!(text, "  {}  |Df| = {}^{}", b.ball, cfg.prime, -b.e).unwrap();
            }
            Ok(Outcome {
                pass: r.uncovered_measure.is_zero(),
                text,
                json: json!({ "function": func.to_string(), "integral": r }),
            })
        }
        Command::VerifyCov {
            f,
            ball: b,
            k_in,
            k_out,
        } => {
            let func = load(&f.function, cfg)?;
            let r = verify_change_of_variables_with(
                &func,
                &ball(&b.ball, cfg)?,
                *k_in,
                *k_out,
                &cfg.certify(),
            )?;
            let pass = r.difference.is_zero();
            let text = format!(
                "{}\nlhs = {}\nrhs = {}\ndifference = {}\n",
                if pass { "PASS" } else { "FAIL" },
                r.lhs,
                r.rhs,
                r.difference
            );
            Ok(Outcome {
                pass,
                text,
                json: json!({
                    "function": func.to_string(),
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "difference": r.difference,
                    "decomposition": r.decomposition,
                    "report": r,
                }),
            })
        }
        Command::Demo { name } => match name.as_str() {
            "pathological" => demo_pathological(cfg),
            other => Err(Error::InvalidArgument(format!("unknown demo `{other}`"))),
        },
    }
}

/// The digit-spreading map `Σ a_i p^i ↦ Σ a_i p^(2i)`: zero derivative
/// everywhere, injective, and its image has measure zero.
fn demo_pathological(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.prime;
    let g = load("spread2(x)", cfg)?;
    let diff = cfg.diff();

    let mut zero_points = 0;
    let mut readings = Vec::new();
    for t in 0..50i64 {
        let a = Padic::from_integer(t, p, cfg.precision)?;
        let est = strict_derivative(&g, &a, &diff)?;
        let ok = est.verdict.converged_value().is_some_and(|v| v.is_zero());
        zero_points += ok as usize;
        readings.push(json!({ "point": t, "verdict": est.verdict }));
    }
    let part1 = zero_points == 50;

    let k = 4;
    let pairs = image_map(&g, &Ball::integers(p), k, 2 * k, cfg.budget)?;
    let distinct: HashSet<&Padic> = pairs.iter().map(|(_, y)| y).collect();
    let part2 = distinct.len() == pairs.len();

    let mut measures = Vec::new();
    let mut part3 = true;
    for k in 2..=4 {
        let r = verify_change_of_variables_with(&g, &Ball::integers(p), k, 2 * k, &cfg.certify())?;
        let expected = MeasureValue::p_power(p, k);
        let ok = r.lhs == expected && r.rhs.is_zero();
        part3 &= ok;
        measures.push(json!({ "k": k, "image_measure": r.lhs, "expected": expected, "integral": r.rhs, "pass": ok }));
    }

    let text = format!(
        "{} zero derivative: Converged(0) at {zero_points}/50 points\n\
         {} injective: {} residues mod {p}^{k} have {} distinct images mod {p}^{}\n\
         {} shrinking image: measure of the image at input scale k = 2, 3, 4 is {}\n",
        if part1 { "PASS" } else { "FAIL" },
        if part2 { "PASS" } else { "FAIL" },
        pairs.len(),
        distinct.len(),
        2 * k,
        if part3 { "PASS" } else { "FAIL" },
        measures
            .iter()
            .map(|m| m["image_measure"].as_str().unwrap_or("?").to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(Outcome {
        pass: part1 && part2 && part3,
        text,
        json: json!({
            "prime": p,
            "zero_derivative": { "pass": part1, "points": readings },
            "injective": { "pass": part2, "inputs": pairs.len(), "images": distinct.len(), "k": k },
            "image_measure": { "pass": part3, "scales": measures },
        }),
    })
}
