//! Acceptance criteria 1-8, one line each. Runs without the libtest harness
//! so the lines are printed by a plain `cargo test`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fixlab::gallery::{self, list_gallery};
use fixlab::output::report_json;
use fixlab::runner::{run, Options, Outcome, RunReport};
use fixlab::scenario::{RunKind, Scenario, Suite};
use fixlab_core::certificates::{
    check_acf_mapping, check_asf1, check_asf2, check_asmk, check_c5, AsmkVariant,
};
use fixlab_core::solvers::{
    certify_cauchy, picard_trace, solve_fixed_point, NonCauchyOutcome, RouteSpec,
};
use fixlab_core::{
    CertificateReport, Gauge, IterationTrace, Premetric, PremetricKind, Profile, SelfMap, Space,
    Verdict,
};

const LIMIT: Duration = Duration::from_secs(10);

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn entry(name: &str) -> Result<Scenario, String> {
    gallery::find(name)
        .map(|e| e.scenario)
        .ok_or_else(|| format!("no gallery entry {}", name))
}

fn run_entry(name: &str) -> Result<Outcome, String> {
    run(&entry(name)?, &Options::default()).map_err(|e| format!("{}: {}", name, e))
}

fn verdict_of(r: &RunReport, run: RunKind, id: &str) -> Result<Verdict, String> {
    r.section(run)
        .and_then(|s| s.report(id))
        .map(|rep| rep.verdict)
        .ok_or_else(|| format!("{}: no {} report in {}", r.scenario, id, run.name()))
}

fn has_witness(r: &RunReport, run: RunKind, id: &str) -> bool {
    r.section(run)
        .and_then(|s| s.report(id))
        .is_some_and(|rep| !rep.witnesses.is_empty())
}

fn line() -> Space {
    Space::real_line()
}

fn banach() -> SelfMap {
    SelfMap::scalar("x/2", |x: f64| x / 2.0)
}

fn criterion_1() -> Check {
    let p = Premetric::metric(line());
    let x0 = line().scalar(1.0).unwrap();
    let r = solve_fixed_point(&banach(), &x0, 1e-10, 60, &p).map_err(|e| e.to_string())?;
    let z = r.point.value();
    ensure(r.converged && z.abs() <= 1e-9, format!("z = {:e}", z))?;
    ensure(r.iterations <= 60, format!("{} iterations", r.iterations))?;
    // each step halves x, so z is an exact power of two
    ensure(
        z == 0.5f64.powi(r.iterations as i32),
        format!("z = {:e} is not 2^-n", z),
    )?;
    let out = run_entry("banach-half")?;
    let rep = &out.report;
    for id in ["C1", "C2", "C3", "C4", "C5", "D1", "D2", "D3", "D4"] {
        ensure(
            verdict_of(rep, RunKind::Certify, id)? == Verdict::Pass,
            format!("{} did not pass", id),
        )?;
    }
    Ok(format!(
        "|z| = {:e} after {} iterations; C1-C5, D1-D4 pass",
        z, r.iterations
    ))
}

fn criterion_2() -> Check {
    let p = Premetric::metric(line());
    let t = SelfMap::scalar("x/(1+x)", |x: f64| x / (1.0 + x));
    let tr = picard_trace(&t, &line().scalar(1.0).unwrap(), 1000, &p).map_err(|e| e.to_string())?;
    ensure(tr.len() == 1001, format!("trace has {} points", tr.len()))?;
    let worst = (0..tr.len())
        .map(|n| (tr.coords(n)[0] - 1.0 / (1.0 + n as f64)).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, format!("closed form error {:e}", worst))?;
    let out = run_entry("meir-keeler")?;
    let rep = &out.report;
    ensure(
        verdict_of(rep, RunKind::Certify, "D3")? == Verdict::Pass,
        "D3 did not pass",
    )?;
    ensure(
        verdict_of(rep, RunKind::Certify, "BANACH-RATE")? == Verdict::Fail,
        "the Banach rate check did not fail",
    )?;
    Ok(format!(
        "max |x_n - 1/(1+n)| = {:e} for n <= 1000; D3 pass, BANACH-RATE fail",
        worst
    ))
}

fn criterion_3() -> Check {
    let out = run_entry("cyclic-line")?;
    let sec = out
        .report
        .section(RunKind::Cyclic)
        .ok_or("no cyclic section")?;
    let starts: Vec<f64> = sec.solutions.iter().map(|s| s.start[0]).collect();
    ensure(starts == [1.0, 3.0, 10.0], format!("starts {:?}", starts))?;
    let mut zs = Vec::new();
    for s in &sec.solutions {
        let z = s.result.point.value();
        let d = s.distance.ok_or("missing d(z, Tz)")?;
        // oracle: T z = -(z+1)/2 on A, so d(z, Tz) = (3z+1)/2
        let oracle = (3.0 * z + 1.0) / 2.0;
        ensure(
            (z - 1.0).abs() <= 1e-6,
            format!("z = {} from {}", z, s.start[0]),
        )?;
        ensure((d - 2.0).abs() <= 1e-6, format!("d(z, Tz) = {}", d))?;
        ensure(
            (d - oracle).abs() <= 1e-12,
            format!("d(z, Tz) = {} != {}", d, oracle),
        )?;
        zs.push(z);
    }
    let collapse = sec
        .reports
        .iter()
        .filter(|r| r.condition_id.to_string() == "EVEN-COLLAPSE")
        .collect::<Vec<_>>();
    ensure(
        collapse.len() == 3 && collapse.iter().all(|r| r.passed()),
        "even collapse did not pass for every start",
    )?;
    let spread = zs
        .iter()
        .flat_map(|a| zs.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    ensure(spread <= 2e-6, format!("spread {:e}", spread))?;
    Ok(format!("z = {:?}; pairwise spread {:e}", zs, spread))
}

fn criterion_4() -> Check {
    let sc = entry("alternating-45")?;
    let alt = &sc.alternate;
    ensure(alt.samples >= 1000, format!("{} samples", alt.samples))?;
    ensure(alt.eta == 1e-12, format!("eta {:e}", alt.eta))?;
    let out = run(&sc, &Options::default()).map_err(|e| e.to_string())?;
    let rep = &out.report;
    for id in ["FPSI", "FPSI-POINT", "FPSI-STEP", "COMMON-FIXED-POINT"] {
        ensure(
            verdict_of(rep, RunKind::Alternate, id)? == Verdict::Pass,
            format!("{} did not pass", id),
        )?;
    }
    let sec = rep
        .section(RunKind::Alternate)
        .ok_or("no alternate section")?;
    let sol = sec.solutions.first().ok_or("no common fixed point")?;
    ensure(
        sol.result.residual <= 1e-9 && sol.result.iterations <= 40,
        format!(
            "residual {:e} after {} steps",
            sol.result.residual, sol.result.iterations
        ),
    )?;
    // oracle for the exported trace: x_0 = S seed, then x/4 and x/5 alternate
    let (_, tr) = out
        .traces
        .iter()
        .find(|(n, _)| n == "alternate")
        .ok_or("no alternate trace")?;
    let seed = alt.seed_point.as_ref().ok_or("no seed point")?[0];
    let mut x = seed / 5.0;
    for n in 0..tr.len() {
        ensure(
            tr.coords(n)[0] == x,
            format!("x_{} = {} != {}", n, tr.coords(n)[0], x),
        )?;
        x = if n % 2 == 0 { x / 4.0 } else { x / 5.0 };
    }
    Ok(format!(
        "{} pairs; residual {:e} after {} steps; ineqfp over {} points",
        alt.samples,
        sol.result.residual,
        sol.result.iterations,
        tr.len()
    ))
}

fn criterion_5() -> Check {
    let tr_out = run_entry("translation")?;
    let tr = &tr_out.report;
    for id in ["C3", "D3"] {
        ensure(
            verdict_of(tr, RunKind::Certify, id)? == Verdict::Fail
                && has_witness(tr, RunKind::Certify, id),
            format!("translation: {} has no failing witness", id),
        )?;
    }
    let per = run_entry("periodic")?;
    ensure(
        verdict_of(&per.report, RunKind::Certify, "C4")? == Verdict::Fail,
        "periodic: C4 did not fail",
    )?;
    ensure(
        verdict_of(&per.report, RunKind::Falsify, "CAUCHY")? == Verdict::Fail,
        "periodic: the Cauchy diagnostic did not fail",
    )?;
    let sc = entry("harmonic-divergent")?;
    let out = run(&sc, &Options::default()).map_err(|e| e.to_string())?;
    let sec = out
        .report
        .section(RunKind::Falsify)
        .ok_or("no falsify section")?;
    let Some(NonCauchyOutcome::Found(w)) = &sec.noncauchy else {
        return Err(format!("harmonic: {:?}", sec.noncauchy));
    };
    let (_, trace) = out
        .traces
        .iter()
        .find(|(n, _)| n == "orbit")
        .ok_or("no orbit trace")?;
    // the premetric compares the harmonic coordinate only
    let h = |i: usize, j: usize| (trace.coords(i)[1] - trace.coords(j)[1]).abs();
    for o in &w.occurrences {
        ensure(
            o.sigma < o.k && o.k <= o.rho && o.sigma >= w.settled_from,
            format!("indices {} {} {}", o.sigma, o.k, o.rho),
        )?;
        ensure(
            (o.k - o.sigma) % 2 == 1,
            format!("k = {} has the parity of sigma", o.k),
        )?;
        ensure(
            h(o.sigma, o.rho) > 2.0 * w.eps && h(o.sigma, o.k) > w.eps,
            format!("gaps at sigma = {}", o.sigma),
        )?;
        ensure(
            h(o.sigma, o.k - 2) <= w.eps,
            format!("straddle fails at sigma = {}", o.sigma),
        )?;
    }
    Ok(format!(
        "translation C3/D3 fail with witnesses; periodic C4/CAUCHY fail; {} harmonic witnesses verified",
        w.occurrences.len()
    ))
}

#[derive(Default)]
struct Tally {
    checked: usize,
    violations: Vec<String>,
}

impl Tally {
    fn implication(&mut self, who: &str, what: &str, antecedent: bool, consequent: bool) {
        if antecedent {
            self.checked += 1;
            if !consequent {
                self.violations.push(format!("{}: {}", who, what));
            }
        }
    }
}

fn all_pass(r: &[CertificateReport]) -> bool {
    r.iter().all(|r| r.passed())
}

fn criterion_6() -> Check {
    let mut tally = Tally::default();
    let mut agreements = 0;
    for e in list_gallery() {
        let sc = &e.scenario;
        let b = sc.build(1.0).map_err(|d| d.to_string())?;
        let (Some(t), Some(x0)) = (&b.t, &sc.iterate.x0) else {
            continue;
        };
        if b.setting.is_some() {
            continue;
        }
        let pt = |c: &[f64]| b.space.point(c.to_vec()).map_err(|e| e.to_string());
        let steps = sc.iterate.steps.unwrap_or(0).max(b.budget.required_len());
        let x = picard_trace(t, &pt(x0)?, steps, &b.p).map_err(|e| e.to_string())?;
        let y = match &sc.iterate.y0 {
            Some(y0) => picard_trace(t, &pt(y0)?, steps, &b.p).map_err(|e| e.to_string())?,
            None => x.shifted(1),
        };
        if x.len() < b.budget.required_len() || y.len() < b.budget.required_len() {
            continue;
        }
        let err = |e: fixlab_core::Error| e.to_string();
        let asf1 = check_asf1(&x, &y, &b.p, &b.budget).map_err(err)?;
        let c4 = check_asf2(&x, &b.p, &b.budget).map_err(err)?;
        let c5 = check_c5(&x, &b.p, &b.budget).map_err(err)?;
        if let (Some(f), Some(fam)) = (&b.f, &b.family) {
            let m1 =
                check_asmk(&x, &y, &b.p, f, fam, &b.budget, AsmkVariant::Asmk1).map_err(err)?;
            tally.implication(
                e.name,
                "ASMK-1 without ASF-1",
                all_pass(&m1),
                all_pass(&asf1),
            );
            let m2 =
                check_asmk(&x, &y, &b.p, f, fam, &b.budget, AsmkVariant::Asmk2).map_err(err)?;
            tally.implication(
                e.name,
                "ASMK-2 without C4 and C5",
                all_pass(&m2),
                c4.passed() && c5.passed(),
            );
        }
        if let PremetricKind::Composed { q, .. } = b.p.kind() {
            let q: &Premetric = q;
            let xq: IterationTrace = x.with_premetric(q).map_err(err)?;
            let c4q = check_asf2(&xq, q, &b.budget).map_err(err)?;
            tally.implication(
                e.name,
                "C4 and C5 under G(q) without C4 under q",
                c4.passed() && c5.passed(),
                c4q.passed(),
            );
        }
        if sc.has_suite(Suite::Acf) {
            let mut rng = fixlab_core::rng(sc.seed);
            let d = check_acf_mapping(t, &b.space, &b.region, &b.budget, &mut rng).map_err(err)?;
            let mut c = asf1.clone();
            c.push(c4.clone());
            for (dk, ck) in d.iter().zip(&c) {
                agreements += 1;
                let clash = matches!(
                    (dk.verdict, ck.verdict),
                    (Verdict::Pass, Verdict::Fail) | (Verdict::Fail, Verdict::Pass)
                );
                if clash {
                    tally.violations.push(format!(
                        "{}: {} {} but {} {}",
                        e.name, dk.condition_id, dk.verdict, ck.condition_id, ck.verdict
                    ));
                }
            }
        }
    }
    ensure(
        tally.violations.is_empty(),
        format!("violations: {}", tally.violations.join("; ")),
    )?;
    ensure(
        tally.checked > 0 && agreements > 0,
        "no implication was exercised",
    )?;
    Ok(format!(
        "{} implications with a true antecedent, {} D/C pairs compared, 0 violations",
        tally.checked, agreements
    ))
}

fn criterion_7() -> Check {
    let d = Premetric::metric(line());
    let g = Gauge::from_expr("t/(1+t)", Profile::of(&[])).map_err(|e| e.to_string())?;
    let composed = Premetric::composed(g, d.clone());
    let budget = fixlab_core::SearchBudget::default();
    let x0 = line().scalar(1.0).unwrap();
    let steps = budget.required_len().max(200);
    let mut tails = Vec::new();
    let routes = [
        RouteSpec::TauDistance { p: d.clone() },
        RouteSpec::Composed {
            p: composed.clone(),
        },
        RouteSpec::MixedTriangle {
            p: d.clone(),
            r: d.clone(),
        },
    ];
    for spec in &routes {
        let p = match spec {
            RouteSpec::Composed { p } => p,
            RouteSpec::TauDistance { p } | RouteSpec::MixedTriangle { p, .. } => p,
        };
        let tr = picard_trace(&banach(), &x0, steps, p).map_err(|e| e.to_string())?;
        let cert = certify_cauchy(&tr, spec, &budget, 1e-6).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::Pass, cert.summary())?;
        let tail = cert
            .diagnostic
            .witnesses
            .first()
            .and_then(|w| w.values.last().copied())
            .ok_or("diagnostic without tail")?;
        ensure(tail < 1e-6, format!("{:?} tail {:e}", spec.route(), tail))?;
        tails.push(tail);
    }
    Ok(format!(
        "routes tau, composed, mixed pass; tails {:?}",
        tails
    ))
}

fn gallery_reports() -> Result<Vec<String>, String> {
    list_gallery()
        .iter()
        .map(|e| {
            let out = run(&e.scenario, &Options::default())
                .map_err(|err| format!("{}: {}", e.name, err))?;
            report_json(&out.report).map_err(|err| err.to_string())
        })
        .collect()
}

fn criterion_8() -> Check {
    let a = gallery_reports()?;
    let b = gallery_reports()?;
    ensure(a.len() == b.len(), "different entry counts")?;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        ensure(x == y, format!("report {} differs", i))?;
    }
    let bytes: usize = a.iter().map(String::len).sum();
    Ok(format!("{} reports, {} bytes, identical", a.len(), bytes))
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Check); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let mut r = f();
        let took = start.elapsed();
        if r.is_ok() && took > LIMIT {
            r = Err(format!("took {:.1?}", took));
        }
        match r {
            Ok(msg) => println!("criterion {}: PASS ({:.2?}) {}", n, took, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL ({:.2?}) {}", n, took, msg);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
