//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::time::{Duration, Instant};

use common::{bidiagonal, hessenberg, matches_decimals, matrix, rv, tridiagonal};
use regex::Regex;
use toda_pencil::batch::{isospectral_sweep, RandomPencils, SweepSummary};
use toda_pencil::demo::Example;
use toda_pencil::par::Execution;
use toda_pencil::pencil::{assemble_pencil, assemble_result, PencilSpec};
use toda_pencil::polyseq::{
    build_family_general, check_identities, verification_steps, CHRISTOFFEL_D, CHRISTOFFEL_F, GEOMETRIC_SHIFT,
    MERGED_THREE_TERM, PERIODICITY, TRIDIAGONAL_EVP,
};
use toda_pencil::scalar::{Field, Rational};
use toda_pencil::transform::{elementary_toda, evolve, hungry_toda, relativistic_toda, required_steps, transform, Algorithm};
use toda_pencil::verify::{check_tau_formulas, isospectral_report};

const TRANSFORM_SOURCE: &str = include_str!("../src/transform.rs");

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn golden(ex: Example, q_hat: Vec<Vec<Rational>>, e_hat: Vec<Rational>, matrix_rows: &[&[&str]], limit: Duration) -> Verdict {
    let spec = ex.spec();
    let (outcome, elapsed) = timed(|| {
        let (res, _) = transform(&spec, Algorithm::Auto).map_err(|e| e.to_string())?;
        let m = assemble_result(&res);
        Ok::<_, String>((res, m))
    });
    let (res, assembled) = outcome?;
    ensure(res.q_hat == q_hat, "upper factor diagonals differ")?;
    ensure(res.e_hat == e_hat, "lower factor entries differ")?;
    ensure(assembled == matrix(matrix_rows), "assembled matrix differs")?;
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))?;
    Ok(format!("exact match in {elapsed:.2?}"))
}

fn criterion_1() -> Verdict {
    golden(
        Example::Bidiagonal,
        vec![rv(&bidiagonal::Q_HAT)],
        rv(&bidiagonal::E_HAT),
        &bidiagonal::T_HAT,
        Duration::from_millis(100),
    )
}

fn criterion_2() -> Verdict {
    let (a, b) = assemble_pencil(&Example::Tridiagonal.spec());
    ensure(a == matrix(&tridiagonal::A) && b == matrix(&tridiagonal::B), "input pencil differs")?;
    golden(
        Example::Tridiagonal,
        vec![rv(&tridiagonal::Q_HAT)],
        rv(&tridiagonal::E_HAT),
        &tridiagonal::T_HAT,
        Duration::from_millis(100),
    )
}

fn criterion_3() -> Verdict {
    let (a, _) = assemble_pencil(&Example::Hessenberg.spec());
    ensure(a == matrix(&hessenberg::A), "recomputed input product differs")?;
    golden(
        Example::Hessenberg,
        hessenberg::R_HAT.iter().map(|r| rv(r)).collect(),
        rv(&hessenberg::L_HAT),
        &hessenberg::H_HAT,
        Duration::from_millis(500),
    )
}

fn criterion_4() -> Verdict {
    let reference: [&[&str]; 3] = [&bidiagonal::EIGENVALUES, &tridiagonal::EIGENVALUES, &hessenberg::EIGENVALUES];
    for (ex, eig) in Example::ALL.into_iter().zip(reference) {
        let spec = ex.spec();
        let (res, _) = transform(&spec, Algorithm::Auto).map_err(|e| e.to_string())?;
        let rep = isospectral_report(&spec, &res, Some(1e-10));
        ensure(rep.equal, format!("{ex:?}: charpolys differ"))?;
        let roots = rep.roots.expect("roots requested");
        ensure(roots.all_real_simple(), format!("{ex:?}: roots not all real and simple"))?;
        let values = roots.values();
        matches_decimals(&values, eig).map_err(|e| format!("{ex:?}: {e}"))?;
        // relative agreement to six significant digits as well
        let mut want: Vec<f64> = eig.iter().map(|s| s.parse().unwrap()).collect();
        want.sort_by(f64::total_cmp);
        for (x, v) in values.iter().zip(&want) {
            ensure(((x - v) / v).abs() < 1e-6, format!("{ex:?}: {x} vs {v}"))?;
        }
    }
    Ok("all 17 reference eigenvalues reproduced".into())
}

fn criterion_5() -> Verdict {
    let specs = RandomPencils::default().generate(0x5eed_0005, 200);
    let (outcomes, elapsed) = timed(|| isospectral_sweep(&specs, Execution::Parallel));
    let s = SweepSummary::from_outcomes(&outcomes);
    ensure(s.failures == 0, format!("{} breakdowns on positive input", s.failures))?;
    ensure(s.mismatches == 0, format!("{} charpoly mismatches", s.mismatches))?;
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    let multi = specs.iter().filter(|s| s.m > 1).count();
    Ok(format!("{}/{} isospectral ({multi} with M > 1) in {elapsed:.2?}", s.isospectral, s.total))
}

fn single_factor(seed: u64, count: usize, eps: Option<bool>) -> Vec<PencilSpec<Rational>> {
    let mut cfg = RandomPencils::single_factor(1..=8);
    cfg.epsilon = eps;
    cfg.generate(seed, count)
}

fn criterion_6() -> Verdict {
    for spec in single_factor(0x5eed_0006, 100, Some(true)) {
        let a = elementary_toda(&spec.q[0], &spec.e, &spec.epsilon).map_err(|e| e.to_string())?;
        let b = relativistic_toda(&spec.q[0], &spec.e).map_err(|e| e.to_string())?;
        ensure(a.0 == b.0, "elementary differs from relativistic")?;
    }
    for spec in single_factor(0x5eed_0106, 100, None) {
        let a = hungry_toda(&spec).map_err(|e| e.to_string())?;
        let b = elementary_toda(&spec.q[0], &spec.e, &spec.epsilon).map_err(|e| e.to_string())?;
        ensure(a.0 == b.0, "hungry differs from elementary")?;
    }
    Ok("200 exact agreements".into())
}

fn criterion_7() -> Verdict {
    for spec in single_factor(0x5eed_0007, 50, Some(false)) {
        let (res, _) = transform(&spec, Algorithm::Auto).map_err(|e| e.to_string())?;
        ensure(assemble_result(&res) == assemble_pencil(&spec).0, "output differs from input")?;
    }
    Ok("50 instances reproduce their input".into())
}

fn identity_run(spec: &PencilSpec<Rational>) -> Result<toda_pencil::polyseq::IdentityReport, String> {
    let (res, _) = transform(spec, Algorithm::Auto).map_err(|e| e.to_string())?;
    let traj = evolve(spec, verification_steps(spec.n, spec.m, &spec.epsilon)).map_err(|p| p.breakdown.to_string())?;
    Ok(check_identities(&build_family_general(&traj), &traj, &res))
}

fn criterion_8() -> Verdict {
    let mut checks = 0;
    for ex in Example::ALL {
        let rep = identity_run(&ex.spec())?;
        ensure(rep.all_passed(), format!("{ex:?}:\n{rep}"))?;
        let mut required = vec![GEOMETRIC_SHIFT, CHRISTOFFEL_F, CHRISTOFFEL_D, PERIODICITY];
        if ex.spec().m == 1 {
            required.extend([MERGED_THREE_TERM, TRIDIAGONAL_EVP]);
        }
        for name in required {
            let c = rep.get(name).ok_or(format!("{name} missing"))?;
            ensure(c.checked > 0, format!("{ex:?}: {name} never exercised"))?;
        }
        checks += rep.checks.iter().map(|c| c.checked).sum::<usize>();
    }
    let cfg = RandomPencils {
        orders: 1..=6,
        ..Default::default()
    };
    for spec in cfg.generate(0x5eed_0008, 50) {
        let rep = identity_run(&spec)?;
        ensure(rep.all_passed(), format!("random N={} M={}:\n{rep}", spec.n, spec.m))?;
        checks += rep.checks.iter().map(|c| c.checked).sum::<usize>();
    }
    Ok(format!("{checks} coefficientwise identities hold"))
}

fn criterion_9() -> Verdict {
    let mut specs = vec![Example::Bidiagonal.spec(), Example::Tridiagonal.spec()];
    specs.extend(RandomPencils::single_factor(1..=5).generate(0x5eed_0009, 25));
    let mut checks = 0;
    for spec in &specs {
        let (res, _) = transform(spec, Algorithm::Auto).map_err(|e| e.to_string())?;
        let rep = check_tau_formulas(&res).map_err(|e| e.to_string())?;
        ensure(rep.all_passed(), format!("N={}:\n{rep}", spec.n))?;
        checks += rep.checks.len();
    }
    Ok(format!("{checks} Hankel ratios on {} instances", specs.len()))
}

/// Static scan of the transform source. The compiler already rejects scalar
/// subtraction because every routine is generic over `Field`; this checks
/// that nothing sneaks around that bound.
fn audit_source(src: &str) -> Result<usize, String> {
    let code: String = src
        .lines()
        .map(|l| l.split("//").next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let code = Regex::new(r#""[^"]*""#).unwrap().replace_all(&code, "\"\"").into_owned();

    for banned in ["SignedField", "Neg", "Sub<", "std::ops", ".sub(", ".neg(", "Rational", "f64", "f32", "BigInt"] {
        ensure(!code.contains(banned), format!("transform source mentions `{banned}`"))?;
    }
    let bound = Regex::new(r"<S:\s*([A-Za-z_]+)").unwrap();
    for cap in bound.captures_iter(&code) {
        ensure(&cap[1] == "Field", format!("generic bound `{}` is not Field", &cap[1]))?;
    }
    // every minus must be an index decrement `x - 1`; `->` and `-=` excluded
    let allowed = Regex::new(r"[\w\)\]] - 1\b").unwrap();
    let mut decrements = 0;
    for (i, ch) in code.char_indices() {
        if ch != '-' || code[i + 1..].starts_with('>') {
            continue;
        }
        let start = code[..i].char_indices().rev().nth(1).map_or(0, |(j, _)| j);
        let end = (i + 4).min(code.len());
        ensure(
            allowed.is_match(&code[start..end]) && !code[i + 1..].starts_with('='),
            format!("minus outside index arithmetic near `{}`", &code[start..end]),
        )?;
        decrements += 1;
    }
    Ok(decrements)
}

fn criterion_10() -> Verdict {
    let decrements = audit_source(TRANSFORM_SOURCE)?;
    // the audit must catch a smuggled scalar subtraction
    ensure(audit_source("fn f<S: Field>(a: S, b: &S) { a - b }").is_err(), "audit misses `a - b`")?;
    ensure(audit_source("fn f<S: SignedField>(a: S) { a }").is_err(), "audit misses SignedField")?;
    ensure(audit_source("fn f(a: i64) -> i64 { -a }").is_err(), "audit misses unary minus")?;

    let mut specs: Vec<PencilSpec<Rational>> = Example::ALL.iter().map(|e| e.spec()).collect();
    specs.extend(RandomPencils::default().generate(0x5eed_0010, 100));
    for spec in &specs {
        let traj = evolve(spec, required_steps(&spec.epsilon, spec.m)).map_err(|p| p.breakdown.to_string())?;
        ensure(traj.all_positive(), format!("non-positive trajectory value, N={} M={}", spec.n, spec.m))?;
    }
    let mut worst = 0f64;
    for ex in Example::ALL {
        let spec = ex.spec();
        let (exact, _) = transform(&spec, Algorithm::Auto).map_err(|e| e.to_string())?;
        let (float, _) = transform(&spec.map(Field::to_f64), Algorithm::Auto).map_err(|e| e.to_string())?;
        let xs = exact.q_hat.iter().flatten().chain(&exact.e_hat);
        let ys = float.q_hat.iter().flatten().chain(&float.e_hat);
        for (x, y) in xs.zip(ys) {
            let want = x.to_f64();
            worst = worst.max(((y - want) / want).abs());
        }
    }
    ensure(worst <= 1e-13, format!("float mode relative error {worst:e}"))?;
    Ok(format!(
        "audit ok ({decrements} index decrements), {} trajectories positive, worst float rel. error {worst:.1e}",
        specs.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("bidiagonal example reproduced exactly", criterion_1),
        ("tridiagonal-bidiagonal example reproduced exactly", criterion_2),
        ("Hessenberg example reproduced exactly", criterion_3),
        ("reference eigenvalue lists", criterion_4),
        ("isospectrality on 200 random pencils", criterion_5),
        ("consistency between the three evolutions", criterion_6),
        ("all-zero mask is the identity", criterion_7),
        ("polynomial identity suite", criterion_8),
        ("Hankel ratio oracle", criterion_9),
        ("subtraction-free and positive", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
