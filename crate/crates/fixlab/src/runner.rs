//! Executes a validated scenario and evaluates its expectations.

use anyhow::{anyhow, Context, Result};
use fixlab_core::certificates::{
    check_acf_mapping, check_asf1, check_asf2, check_asmk, check_banach_rate, check_c5,
    check_cyclic, check_f_psi_contraction, verify_ineqfp, verify_point_steps, AsmkVariant,
    ContractionProfile, BANACH_MARGIN,
};
use fixlab_core::gauge::verify_gauge_regularity;
use fixlab_core::premetric::{sample_triples, verify_premetric_axioms};
use fixlab_core::report::overall;
use fixlab_core::solvers::{
    alternating_trace, cauchy_diagnostic, certify_cauchy, cyclic_even_trace,
    even_collapse_diagnostic, extract_noncauchy_witness, picard_trace_bounded,
    solve_best_proximity, solve_common_fixed_point, solve_fixed_point, AlternatingSchedule,
    CauchyCertificate, NonCauchyOutcome, RouteSpec, SolveResult,
};
use fixlab_core::{
    CertificateReport, ConditionId, Gauge, Grid, IterationTrace, Point, PremetricKind,
    SearchBudget, SelfMap, Verdict, Witness,
};
use serde::Serialize;

use crate::scenario::{
    self, Built, Diagnostic, RouteName, RunKind, Scenario, SolutionExpectation, Suite,
};

/// Sampling half-width for unbounded regions.
const SAMPLE_WINDOW: f64 = 10.0;
/// Tail target of the even-step collapse diagnostic.
const COLLAPSE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub seed: Option<u64>,
    pub budget_scale: f64,
    pub strict: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: None,
            budget_scale: 1.0,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub kind: &'static str,
    pub start: Vec<f64>,
    #[serde(flatten)]
    pub result: SolveResult,
    /// `d(z, Tz)` for best proximity points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub run: RunKind,
    pub reports: Vec<CertificateReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub routes: Vec<CauchyCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<Solution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncauchy: Option<NonCauchyOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    fn new(run: RunKind) -> Self {
        Section {
            run,
            reports: Vec::new(),
            routes: Vec::new(),
            solutions: Vec::new(),
            noncauchy: None,
            artifacts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.routes
            .iter()
            .fold(overall(&self.reports), |v, r| v.and(r.verdict))
    }

    /// First report with the given id (as displayed, e.g. `D3`).
    pub fn report(&self, id: &str) -> Option<&CertificateReport> {
        self.reports.iter().find(|r| r.condition_id.to_string() == id)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationResult {
    pub what: String,
    pub met: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub description: String,
    pub seed: u64,
    pub budget_scale: f64,
    pub budget: SearchBudget,
    pub sections: Vec<Section>,
    pub expectations: Vec<ExpectationResult>,
    pub verdict: Verdict,
    pub exit_code: i32,
}

impl RunReport {
    pub fn section(&self, run: RunKind) -> Option<&Section> {
        self.sections.iter().find(|s| s.run == run)
    }

    pub fn expectations_met(&self) -> bool {
        self.expectations.iter().all(|e| e.met)
    }
}

/// A finished run: the report plus the traces to export.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub traces: Vec<(String, IterationTrace)>,
}

/// Scenario problems (exit code 1) versus failures while running.
#[derive(Debug)]
pub enum RunError {
    Invalid(Vec<Diagnostic>),
    Input(anyhow::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(d) => {
                let lines: Vec<String> = d.iter().map(|d| d.to_string()).collect();
                write!(f, "invalid scenario:\n  {}", lines.join("\n  "))
            }
            RunError::Input(e) => write!(f, "{:#}", e),
        }
    }
}

impl std::error::Error for RunError {}

/// Exit code from verdicts alone: 2 on any fail, 3 on inconclusive when
/// strict, 0 otherwise.
pub fn verdict_code(v: Verdict, strict: bool) -> i32 {
    match v {
        Verdict::Fail => 2,
        Verdict::Inconclusive if strict => 3,
        _ => 0,
    }
}

struct Ctx<'a> {
    sc: &'a Scenario,
    b: Built,
    seed: u64,
    orbit: Option<(IterationTrace, IterationTrace)>,
    traces: Vec<(String, IterationTrace)>,
}

fn point(b: &Built, coords: &[f64]) -> Result<Point> {
    Ok(b.space.point(coords.to_vec())?)
}

fn need<'b, T>(v: &'b Option<T>, what: &str) -> Result<&'b T> {
    v.as_ref().ok_or_else(|| anyhow!("missing {}", what))
}

fn inconclusive_short(id: ConditionId, trace: &IterationTrace, needed: usize) -> CertificateReport {
    CertificateReport::new(
        id,
        Verdict::Inconclusive,
        format!(
            "orbit stopped ({:?}) after {} points; the budget needs {}",
            trace.status(),
            trace.len(),
            needed
        ),
    )
}

impl<'a> Ctx<'a> {
    fn rng(&self) -> fixlab_core::Rng {
        fixlab_core::rng(self.seed)
    }

    fn t(&self) -> Result<&SelfMap> {
        need(&self.b.t, "map T")
    }

    /// Orbits of `x0` and `y0` (default `T x0`), long enough for the budget.
    fn orbit(&mut self) -> Result<(IterationTrace, IterationTrace)> {
        if let Some(o) = &self.orbit {
            return Ok(o.clone());
        }
        let it = &self.sc.iterate;
        let x0 = point(&self.b, need(&it.x0, "iterate.x0")?)?;
        let steps = it.steps.unwrap_or(0).max(self.b.budget.required_len());
        let t = self.t()?.clone();
        let x = picard_trace_bounded(&t, &x0, steps, &self.b.p, it.escape_bound)?;
        let y = match &it.y0 {
            Some(y0) => picard_trace_bounded(&t, &point(&self.b, y0)?, steps, &self.b.p, it.escape_bound)?,
            None => x.shifted(1),
        };
        self.traces.push(("orbit".into(), x.clone()));
        if it.y0.is_some() {
            self.traces.push(("orbit_y".into(), y.clone()));
        }
        self.orbit = Some((x.clone(), y.clone()));
        Ok((x, y))
    }

    fn iterate(&mut self) -> Result<Section> {
        let mut sec = Section::new(RunKind::Iterate);
        let (x, _) = self.orbit()?;
        sec.artifacts.push("trace_orbit.csv".into());
        let it = &self.sc.iterate;
        let x0 = point(&self.b, need(&it.x0, "iterate.x0")?)?;
        let r = solve_fixed_point(self.t()?, &x0, it.tol, it.max_steps, &self.b.p)?;
        let continuity = match self.sc.maps.continuous_power {
            Some(l) => format!("T^{} asserted continuous by the scenario (not verified)", l),
            None => "no continuity assertion for T".into(),
        };
        let note = format!(
            "stop at p(x_n, T x_n) <= {:e} within {} steps; {}",
            it.tol, it.max_steps, continuity
        );
        let verdict = if r.converged { Verdict::Pass } else { Verdict::Fail };
        let mut rep = CertificateReport::new(ConditionId::FixedPoint, verdict, note);
        if !r.converged {
            rep = rep.with_witness(
                Witness::new()
                    .indices(&[r.iterations])
                    .values(&[r.residual])
                    .note("residual p(z, Tz) at the last iterate"),
            );
        }
        sec.reports.push(rep);
        sec.notes.push(format!("orbit has {} points ({:?})", x.len(), x.status()));
        sec.solutions.push(Solution {
            kind: "fixed_point",
            start: x0.coords().to_vec(),
            result: r,
            distance: None,
        });
        Ok(sec)
    }

    fn certify(&mut self) -> Result<Section> {
        let mut sec = Section::new(RunKind::Certify);
        let (x, y) = self.orbit()?;
        let budget = self.b.budget.clone();
        let p = self.b.p.clone();
        let needed = budget.required_len();
        let long = x.len() >= needed && y.len() >= needed;
        for suite in self.sc.certify.suites.clone() {
            match suite {
                Suite::Asf1 if long => sec.reports.extend(check_asf1(&x, &y, &p, &budget)?),
                Suite::Asf1 => {
                    for id in [ConditionId::C1, ConditionId::C2, ConditionId::C3] {
                        sec.reports.push(inconclusive_short(id, &x, needed));
                    }
                }
                Suite::Asf2 if x.len() >= needed => sec.reports.push(check_asf2(&x, &p, &budget)?),
                Suite::Asf2 => sec.reports.push(inconclusive_short(ConditionId::C4, &x, needed)),
                Suite::C5 if x.len() >= needed => sec.reports.push(check_c5(&x, &p, &budget)?),
                Suite::C5 => sec.reports.push(inconclusive_short(ConditionId::C5, &x, needed)),
                Suite::Acf => {
                    let mut rng = self.rng();
                    sec.reports.extend(check_acf_mapping(
                        self.t()?,
                        &self.b.space,
                        &self.b.region,
                        &budget,
                        &mut rng,
                    )?);
                }
                Suite::BanachRate => {
                    let mut rng = self.rng();
                    sec.reports.push(check_banach_rate(
                        self.t()?,
                        &self.b.space,
                        &self.b.region,
                        &budget,
                        BANACH_MARGIN,
                        &mut rng,
                    )?);
                }
                Suite::Asmk1 | Suite::Asmk2 => {
                    let variant = if suite == Suite::Asmk1 {
                        AsmkVariant::Asmk1
                    } else {
                        AsmkVariant::Asmk2
                    };
                    if long {
                        let f = need(&self.b.f, "gauges.F")?;
                        let fam = need(&self.b.family, "gauges.family")?;
                        sec.reports
                            .extend(check_asmk(&x, &y, &p, f, fam, &budget, variant)?);
                    } else {
                        let last = if variant == AsmkVariant::Asmk1 {
                            ConditionId::C8
                        } else {
                            ConditionId::C9
                        };
                        for id in [ConditionId::C6, ConditionId::C7, last] {
                            sec.reports.push(inconclusive_short(id, &x, needed));
                        }
                    }
                }
                Suite::Transfer => {
                    let q = match p.kind() {
                        PremetricKind::Composed { q, .. } => (**q).clone(),
                        _ => return Err(anyhow!("the transfer suite needs a composed premetric")),
                    };
                    if x.len() >= needed {
                        let mut r = check_asf2(&x.with_premetric(&q)?, &q, &budget)?;
                        r.resolution_note = format!("under q = {}: {}", q.describe(), r.resolution_note);
                        sec.reports.push(r);
                    } else {
                        sec.reports.push(inconclusive_short(ConditionId::C4, &x, needed));
                    }
                }
                Suite::Cauchy => {
                    for route in self.sc.certify.routes.clone() {
                        let spec = match route {
                            RouteName::Tau => RouteSpec::TauDistance { p: p.clone() },
                            RouteName::Composed => RouteSpec::Composed { p: p.clone() },
                            RouteName::Mixed => RouteSpec::MixedTriangle {
                                p: p.clone(),
                                r: need(&p.companion().cloned(), "premetric.companion")?.clone(),
                            },
                        };
                        if x.len() > needed {
                            sec.routes
                                .push(certify_cauchy(&x, &spec, &budget, self.sc.certify.tol)?);
                        } else {
                            sec.reports.push(inconclusive_short(ConditionId::Cauchy, &x, needed + 1));
                        }
                    }
                }
                Suite::Axioms => {
                    let mut rng = self.rng();
                    let triples = sample_triples(
                        &self.b.space,
                        &self.b.region,
                        self.sc.certify.axiom_samples,
                        SAMPLE_WINDOW,
                        &mut rng,
                    )?;
                    sec.reports
                        .extend(verify_premetric_axioms(&p, &triples, budget.slack)?);
                }
                Suite::Gauges => {
                    let mut gauges: Vec<(&str, Gauge)> = Vec::new();
                    if let Some(f) = &self.b.f {
                        gauges.push(("F", f.clone()));
                    }
                    if let Some(psi) = &self.b.psi {
                        gauges.push(("psi", psi.clone()));
                    }
                    if let PremetricKind::Composed { g, .. } = p.kind() {
                        gauges.push(("G", g.clone()));
                    }
                    for (name, g) in gauges {
                        for mut r in verify_gauge_regularity(&g, &Grid::standard(g.t_max()), budget.slack) {
                            r.resolution_note = format!("{} = {}: {}", name, g.name(), r.resolution_note);
                            sec.reports.push(r);
                        }
                    }
                }
            }
        }
        Ok(sec)
    }

    fn cyclic(&mut self) -> Result<Section> {
        let mut sec = Section::new(RunKind::Cyclic);
        let spec = need(&self.sc.cyclic, "[cyclic]")?;
        let setting = need(&self.b.setting, "cyclic setting")?.clone();
        let t = self.t()?.clone();
        let mut rng = self.rng();
        sec.reports.push(check_cyclic(&t, &setting, spec.samples, &mut rng)?);
        let starts: Vec<Vec<f64>> = if spec.starts.is_empty() {
            vec![need(&self.sc.iterate.x0, "iterate.x0")?.clone()]
        } else {
            spec.starts.clone()
        };
        let space = setting.space().clone();
        for (k, s) in starts.iter().enumerate() {
            let x0 = point(&self.b, s)?;
            let run = cyclic_even_trace(&t, &setting, &x0, spec.pairs, &self.b.p)?;
            let name = format!("cyclic_even_{}", k);
            sec.artifacts.push(format!("trace_{}.csv", name));
            self.traces.push((name, run.even.clone()));
            let r = solve_best_proximity(&t, &setting, &x0, spec.tol, spec.pairs)?;
            let z = r.point.coords().to_vec();
            let dist = space.dist(&z, &t.apply_raw(&z));
            let verdict = if r.converged { Verdict::Pass } else { Verdict::Fail };
            let mut rep = CertificateReport::new(
                ConditionId::BestProximity,
                verdict,
                format!(
                    "start {:?}: T^2 steps until d(x_2n, x_2n+2) <= {:e}; residual |d(z, Tz) - d(A, B)| = {:e}",
                    s, spec.tol, r.residual
                ),
            );
            if !r.converged {
                rep = rep.with_witness(Witness::new().indices(&[r.iterations]).values(&[r.residual, dist]));
            }
            sec.reports.push(rep);
            sec.reports
                .push(even_collapse_diagnostic(&run.orbit, &setting, COLLAPSE_TOL)?);
            sec.solutions.push(Solution {
                kind: "best_proximity",
                start: s.clone(),
                result: r,
                distance: Some(dist),
            });
        }
        if sec.solutions.len() > 1 {
            let mut spread: f64 = 0.0;
            for a in &sec.solutions {
                for b in &sec.solutions {
                    spread = spread.max(space.dist(a.result.point.coords(), b.result.point.coords()));
                }
            }
            sec.notes
                .push(format!("largest distance between best proximity points: {:e}", spread));
        }
        Ok(sec)
    }

    fn alternate(&mut self) -> Result<Section> {
        let mut sec = Section::new(RunKind::Alternate);
        let spec = &self.sc.alternate;
        let t = self.t()?.clone();
        let s = need(&self.b.s, "map S")?.clone();
        let f = need(&self.b.f, "gauges.F")?.clone();
        let psi = need(&self.b.psi, "gauges.psi")?.clone();
        let p = self.b.p.clone();
        let profile = if spec.profile == "zhang" {
            ContractionProfile::Zhang
        } else {
            ContractionProfile::Standard
        };
        let mut rng = self.rng();
        let region = &self.b.alt_region;
        let mut draw = || -> Result<Point> {
            let c = region
                .sample(&self.b.space, &mut rng, SAMPLE_WINDOW)
                .ok_or_else(|| anyhow!("alternate.region sampler produced no member"))?;
            point(&self.b, &c)
        };
        let mut pairs = Vec::with_capacity(spec.samples);
        for _ in 0..spec.samples {
            pairs.push((draw()?, draw()?));
        }
        let alphas = (0..spec.samples).map(|_| draw()).collect::<Result<Vec<_>>>()?;
        sec.reports.push(check_f_psi_contraction(
            &t, &s, &p, &f, &psi, &pairs, spec.eta, profile,
        )?);
        sec.reports
            .push(verify_point_steps(&t, &s, &p, &f, &psi, &alphas, spec.eta)?);
        let sched = AlternatingSchedule::new(t, s);
        let seed = point(&self.b, need(&spec.seed_point, "alternate.seed_point")?)?;
        let trace = alternating_trace(&sched, &seed, spec.steps, &p)?;
        sec.reports.push(verify_ineqfp(&trace, &p, &f, &psi, spec.eta)?);
        sec.artifacts.push("trace_alternate.csv".into());
        self.traces.push(("alternate".into(), trace));
        let r = solve_common_fixed_point(&sched, &seed, spec.tol, spec.steps, &p)?;
        let verdict = if r.converged { Verdict::Pass } else { Verdict::Fail };
        let mut rep = CertificateReport::new(
            ConditionId::CommonFixedPoint,
            verdict,
            format!(
                "x_0 = S(seed), x_(n+1) = Gamma_n x_n until max(p(x, Tx), p(x, Sx)) <= {:e} within {} steps",
                spec.tol, spec.steps
            ),
        );
        if !r.converged {
            rep = rep.with_witness(Witness::new().indices(&[r.iterations]).values(&[r.residual]));
        }
        sec.reports.push(rep);
        sec.solutions.push(Solution {
            kind: "common_fixed_point",
            start: seed.coords().to_vec(),
            result: r,
            distance: None,
        });
        Ok(sec)
    }

    fn falsify(&mut self) -> Result<Section> {
        let mut sec = Section::new(RunKind::Falsify);
        let (x, _) = self.orbit()?;
        let spec = &self.sc.falsify;
        if x.len() >= 4 {
            sec.reports.push(cauchy_diagnostic(&x, &self.b.p, spec.tol)?);
        } else {
            sec.reports.push(inconclusive_short(ConditionId::Cauchy, &x, 4));
        }
        let outcome = extract_noncauchy_witness(&x, &self.b.p, spec.eps, spec.gap_tol);
        let mut rep = outcome.report();
        if let NonCauchyOutcome::Found(w) = &outcome {
            let o = &w.occurrences[0];
            rep = rep.with_witness(
                Witness::new()
                    .eps(w.eps)
                    .indices(&[o.sigma, o.k, o.rho])
                    .values(&[o.gap_k, o.gap_rho, o.straddle])
                    .note("first occurrence: indices sigma, k, rho; values p(x_sigma, x_k), p(x_sigma, x_rho), straddle"),
            );
        }
        sec.reports.push(rep);
        sec.noncauchy = Some(outcome);
        Ok(sec)
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn check_solution(what: &str, sol: &Solution, e: &SolutionExpectation) -> ExpectationResult {
    let mut problems = Vec::new();
    if !sol.result.converged {
        problems.push("did not converge".to_string());
    }
    if !close(sol.result.point.coords(), &e.point, e.tol) {
        problems.push(format!(
            "z = {:?} not within {:e} of {:?}",
            sol.result.point.coords(),
            e.tol,
            e.point
        ));
    }
    if let Some(m) = e.max_iterations {
        if sol.result.iterations > m {
            problems.push(format!("{} iterations > {}", sol.result.iterations, m));
        }
    }
    if let (Some(want), Some(got)) = (e.distance, sol.distance) {
        if (want - got).abs() > e.tol {
            problems.push(format!("d(z, Tz) = {} not within {:e} of {}", got, e.tol, want));
        }
    }
    ExpectationResult {
        what: format!("{} from {:?}", what, sol.start),
        met: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "z = {:?} after {} iterations",
                sol.result.point.coords(),
                sol.result.iterations
            )
        } else {
            problems.join("; ")
        },
    }
}

fn evaluate(sc: &Scenario, sections: &[Section], code: i32) -> Vec<ExpectationResult> {
    let e = &sc.expect;
    let mut out = Vec::new();
    if let Some(want) = e.exit_code {
        out.push(ExpectationResult {
            what: "exit code".into(),
            met: want == code,
            detail: format!("expected {}, verdicts give {}", want, code),
        });
    }
    let find = |run: RunKind| sections.iter().find(|s| s.run == run);
    for v in &e.verdicts {
        let got = find(v.run).and_then(|s| s.report(&v.id)).map(|r| r.verdict.to_string());
        out.push(ExpectationResult {
            what: format!("{} {} is {}", v.run.name(), v.id, v.verdict),
            met: got.as_deref() == Some(v.verdict.as_str()),
            detail: match got {
                Some(g) => format!("got {}", g),
                None => "no such report".into(),
            },
        });
    }
    let sols = [
        ("fixed point", RunKind::Iterate, &e.fixed_point),
        ("best proximity point", RunKind::Cyclic, &e.best_proximity),
        ("common fixed point", RunKind::Alternate, &e.common_fixed_point),
    ];
    for (what, run, exp) in sols {
        if let Some(exp) = exp {
            match find(run).filter(|s| !s.solutions.is_empty()) {
                Some(s) => out.extend(s.solutions.iter().map(|sol| check_solution(what, sol, exp))),
                None => out.push(ExpectationResult {
                    what: what.into(),
                    met: false,
                    detail: format!("no {} run", run.name()),
                }),
            }
        }
    }
    if let Some(want) = &e.noncauchy {
        let got = find(RunKind::Falsify).and_then(|s| s.noncauchy.as_ref()).map(|o| match o {
            NonCauchyOutcome::Found(_) => "found",
            NonCauchyOutcome::None => "none",
            NonCauchyOutcome::NotApplicable { .. } => "not_applicable",
        });
        out.push(ExpectationResult {
            what: format!("non-Cauchy witness {}", want),
            met: got == Some(want.as_str()),
            detail: format!("got {}", got.unwrap_or("no falsify run")),
        });
    }
    out
}

/// Validates, builds and executes `sc`.
pub fn run(sc: &Scenario, opts: &Options) -> std::result::Result<Outcome, RunError> {
    let diags = scenario::validate(sc);
    if !diags.is_empty() {
        return Err(RunError::Invalid(diags));
    }
    if !(opts.budget_scale > 0.0 && opts.budget_scale.is_finite()) {
        return Err(RunError::Invalid(vec![Diagnostic {
            field: "--budget-scale".into(),
            message: "must be positive and finite".into(),
        }]));
    }
    let b = sc
        .build(opts.budget_scale)
        .map_err(|d| RunError::Invalid(vec![d]))?;
    let seed = opts.seed.unwrap_or(sc.seed);
    let mut ctx = Ctx {
        sc,
        b,
        seed,
        orbit: None,
        traces: Vec::new(),
    };
    let mut sections = Vec::new();
    for r in sc.ordered_runs() {
        let sec = match r {
            RunKind::Iterate => ctx.iterate(),
            RunKind::Certify => ctx.certify(),
            RunKind::Cyclic => ctx.cyclic(),
            RunKind::Alternate => ctx.alternate(),
            RunKind::Falsify => ctx.falsify(),
        }
        .with_context(|| format!("{} run of scenario '{}'", r.name(), sc.name))
        .map_err(RunError::Input)?;
        sections.push(sec);
    }
    let verdict = sections
        .iter()
        .fold(Verdict::Pass, |v, s| v.and(s.verdict()));
    let base = verdict_code(verdict, false);
    let expectations = evaluate(sc, &sections, base);
    let met = expectations.iter().all(|e| e.met);
    let exit_code = if met {
        verdict_code(verdict, opts.strict)
    } else {
        2
    };
    let report = RunReport {
        scenario: sc.name.clone(),
        description: sc.description.clone(),
        seed,
        budget_scale: opts.budget_scale,
        budget: ctx.b.budget.clone(),
        sections,
        expectations,
        verdict,
        exit_code,
    };
    Ok(Outcome {
        report,
        traces: ctx.traces,
    })
}
