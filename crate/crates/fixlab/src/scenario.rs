//! Declarative scenario files (TOML) and their translation into core objects.

use std::fmt;

use fixlab_core::Regularity;
use fixlab_core::premetric::Claims;
use fixlab_core::{
    CyclicSetting, Expr, Gauge, GaugeFamily, Norm, Premetric, Profile, Region, SearchBudget,
    SelfMap, Space, SpaceId,
};
use serde::{Deserialize, Serialize};

/// Runs in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Iterate,
    Certify,
    Cyclic,
    Alternate,
    Falsify,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Iterate => "iterate",
            RunKind::Certify => "certify",
            RunKind::Cyclic => "cyclic",
            RunKind::Alternate => "alternate",
            RunKind::Falsify => "falsify",
        }
    }
}

/// Condition suites the certify run can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// C1-C3 on the orbits of `x0` and `y0`.
    Asf1,
    /// C4 on the orbit of `x0`.
    Asf2,
    C5,
    /// D1-D4 on the sampling region.
    Acf,
    BanachRate,
    Asmk1,
    Asmk2,
    /// C4 under `q` for a composed premetric.
    Transfer,
    /// Cauchy certification along the listed routes.
    Cauchy,
    Axioms,
    Gauges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    Tau,
    Composed,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Scalar(String),
    Coords(Vec<String>),
}

impl MapSpec {
    fn sources(&self) -> Vec<&str> {
        match self {
            MapSpec::Scalar(s) => vec![s.as_str()],
            MapSpec::Coords(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GaugeSpec {
    /// Built-in name: `half`, `mk`, `id`, `step01`.
    Builtin(String),
    Linear {
        linear: f64,
    },
    Expr {
        expr: String,
        #[serde(default)]
        profile: Vec<String>,
        t_max: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// `iterated` (powers of `base`) or `explicit` (`members`).
    pub kind: String,
    pub base: Option<GaugeSpec>,
    #[serde(default)]
    pub members: Vec<GaugeSpec>,
    #[serde(default = "yes")]
    pub zero_fixed: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionSpec {
    Whole,
    Interval([f64; 2]),
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Custom {
        predicate: String,
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default)]
        convex: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default = "one")]
    pub dimension: usize,
    /// `euclidean`, `l1`, `max`, `p:<exponent>` or an expression in `x[i]`, `y[i]`.
    #[serde(default = "euclidean")]
    pub norm: String,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec {
            dimension: 1,
            norm: euclidean(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsSpec {
    #[serde(rename = "T")]
    pub t: Option<MapSpec>,
    #[serde(rename = "S")]
    pub s: Option<MapSpec>,
    /// User assertion that `T^l` is continuous for this `l`; recorded, not verified.
    pub continuous_power: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremetricSpec {
    /// `metric`, `shifted_cyclic`, `composed` or `custom`.
    #[serde(default = "metric")]
    pub kind: String,
    #[serde(rename = "G")]
    pub g: Option<GaugeSpec>,
    pub q: Option<Box<PremetricSpec>>,
    pub expr: Option<String>,
    /// Declared properties: `symmetric`, `triangle`, `tau_distance`.
    pub claims: Option<Vec<String>>,
    /// Companion `r` of the mixed triangle inequalities.
    pub companion: Option<Box<PremetricSpec>>,
}

impl Default for PremetricSpec {
    fn default() -> Self {
        PremetricSpec {
            kind: metric(),
            g: None,
            q: None,
            expr: None,
            claims: None,
            companion: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugesSpec {
    #[serde(rename = "F")]
    pub f: Option<GaugeSpec>,
    pub psi: Option<GaugeSpec>,
    pub family: Option<FamilySpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub eps_grid: Option<Vec<f64>>,
    pub delta_candidates: Option<Vec<f64>>,
    pub nu_horizon: Option<usize>,
    pub index_horizon: Option<usize>,
    pub pair_samples: Option<usize>,
    pub slack: Option<f64>,
    pub probes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSpec {
    pub x0: Option<Vec<f64>>,
    /// Second starting point for pair conditions; defaults to `T x0`.
    pub y0: Option<Vec<f64>>,
    /// Trace length; at least what the budget needs.
    pub steps: Option<usize>,
    #[serde(default = "tight_tol")]
    pub tol: f64,
    #[serde(default = "max_steps")]
    pub max_steps: usize,
    #[serde(default = "escape")]
    pub escape_bound: f64,
}

impl Default for IterateSpec {
    fn default() -> Self {
        IterateSpec {
            x0: None,
            y0: None,
            steps: None,
            tol: tight_tol(),
            max_steps: max_steps(),
            escape_bound: escape(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub routes: Vec<RouteName>,
    /// Sampling region for mapping-level checks.
    pub region: Option<RegionSpec>,
    /// Tail target of the Cauchy diagnostic.
    #[serde(default = "loose_tol")]
    pub tol: f64,
    #[serde(default = "axiom_samples")]
    pub axiom_samples: usize,
}

impl Default for CertifySpec {
    fn default() -> Self {
        CertifySpec {
            suites: default_suites(),
            routes: Vec::new(),
            region: None,
            tol: loose_tol(),
            axiom_samples: axiom_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicSpec {
    #[serde(rename = "A")]
    pub a: Option<RegionSpec>,
    #[serde(rename = "B")]
    pub b: Option<RegionSpec>,
    /// Starting points in `A`; defaults to `iterate.x0`.
    #[serde(default)]
    pub starts: Vec<Vec<f64>>,
    #[serde(default = "pairs")]
    pub pairs: usize,
    #[serde(default = "tight_tol")]
    pub tol: f64,
    #[serde(default = "cyclic_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternateSpec {
    pub seed_point: Option<Vec<f64>>,
    #[serde(default = "alt_steps")]
    pub steps: usize,
    #[serde(default = "tight_tol")]
    pub tol: f64,
    /// Pair sampling region of the contraction check.
    pub region: Option<RegionSpec>,
    #[serde(default = "alt_samples")]
    pub samples: usize,
    #[serde(default = "alt_eta")]
    pub eta: f64,
    /// `standard` or `zhang`.
    #[serde(default = "standard")]
    pub profile: String,
}

impl Default for AlternateSpec {
    fn default() -> Self {
        AlternateSpec {
            seed_point: None,
            steps: alt_steps(),
            tol: tight_tol(),
            region: None,
            samples: alt_samples(),
            eta: alt_eta(),
            profile: standard(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalsifySpec {
    #[serde(default = "falsify_eps")]
    pub eps: f64,
    /// Consecutive gaps below this count as settled.
    #[serde(default = "falsify_eps")]
    pub gap_tol: f64,
    #[serde(default = "loose_tol")]
    pub tol: f64,
}

impl Default for FalsifySpec {
    fn default() -> Self {
        FalsifySpec {
            eps: falsify_eps(),
            gap_tol: falsify_eps(),
            tol: loose_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictExpectation {
    pub run: RunKind,
    pub id: String,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionExpectation {
    pub point: Vec<f64>,
    pub tol: f64,
    pub max_iterations: Option<usize>,
    /// Expected `d(z, Tz)` (best proximity).
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub exit_code: Option<i32>,
    #[serde(default)]
    pub verdicts: Vec<VerdictExpectation>,
    pub fixed_point: Option<SolutionExpectation>,
    pub best_proximity: Option<SolutionExpectation>,
    pub common_fixed_point: Option<SolutionExpectation>,
    /// `found`, `none` or `not_applicable`.
    pub noncauchy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub runs: Vec<RunKind>,
    #[serde(default)]
    pub space: SpaceSpec,
    #[serde(default)]
    pub maps: MapsSpec,
    #[serde(default)]
    pub premetric: PremetricSpec,
    #[serde(default)]
    pub gauges: GaugesSpec,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default)]
    pub iterate: IterateSpec,
    #[serde(default)]
    pub certify: CertifySpec,
    pub cyclic: Option<CyclicSpec>,
    #[serde(default)]
    pub alternate: AlternateSpec,
    #[serde(default)]
    pub falsify: FalsifySpec,
    #[serde(default)]
    pub expect: Expectations,
}

fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}
fn euclidean() -> String {
    "euclidean".into()
}
fn metric() -> String {
    "metric".into()
}
fn standard() -> String {
    "standard".into()
}
fn tight_tol() -> f64 {
    1e-10
}
fn loose_tol() -> f64 {
    1e-6
}
fn max_steps() -> usize {
    10_000
}
fn escape() -> f64 {
    fixlab_core::solvers::DEFAULT_ESCAPE_BOUND
}
fn axiom_samples() -> usize {
    500
}
fn pairs() -> usize {
    200
}
fn cyclic_samples() -> usize {
    200
}
fn alt_steps() -> usize {
    40
}
fn alt_samples() -> usize {
    1000
}
fn alt_eta() -> f64 {
    1e-12
}
fn falsify_eps() -> f64 {
    0.1
}
fn default_suites() -> Vec<Suite> {
    vec![Suite::Asf1, Suite::Asf2, Suite::C5, Suite::Acf]
}

/// One schema problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn diag(field: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses a scenario; a syntax or type error becomes a single diagnostic.
pub fn parse(source: &str) -> Result<Scenario, Vec<Diagnostic>> {
    toml::from_str::<Scenario>(source).map_err(|e| {
        let msg = e.message().to_string();
        let field = e
            .span()
            .map(|s| {
                let line = source[..s.start].matches('\n').count() + 1;
                format!("line {}", line)
            })
            .unwrap_or_else(|| "document".into());
        vec![diag(field, msg)]
    })
}

/// Parses and validates; the diagnostics list every problem found.
pub fn validate_source(source: &str) -> Vec<Diagnostic> {
    match parse(source) {
        Ok(s) => validate(&s),
        Err(d) => d,
    }
}

/// Core objects a scenario resolves to.
#[derive(Debug, Clone)]
pub struct Built {
    pub space: Space,
    pub t: Option<SelfMap>,
    pub s: Option<SelfMap>,
    pub p: Premetric,
    pub f: Option<Gauge>,
    pub psi: Option<Gauge>,
    pub family: Option<GaugeFamily>,
    pub setting: Option<CyclicSetting>,
    pub budget: SearchBudget,
    pub region: Region,
    pub alt_region: Region,
}

impl Scenario {
    pub fn has_run(&self, r: RunKind) -> bool {
        self.runs.contains(&r)
    }

    pub fn has_suite(&self, s: Suite) -> bool {
        self.has_run(RunKind::Certify) && self.certify.suites.contains(&s)
    }

    /// Runs present, in execution order.
    pub fn ordered_runs(&self) -> Vec<RunKind> {
        let mut r = self.runs.clone();
        r.sort();
        r.dedup();
        r
    }

    /// Budget after overrides and `scale` (horizons and sample counts).
    pub fn budget(&self, scale: f64) -> SearchBudget {
        let d = SearchBudget::default();
        let b = &self.budget;
        SearchBudget {
            eps_grid: b.eps_grid.clone().unwrap_or(d.eps_grid),
            delta_candidates: b.delta_candidates.clone().unwrap_or(d.delta_candidates),
            nu_horizon: b.nu_horizon.unwrap_or(d.nu_horizon),
            index_horizon: b.index_horizon.unwrap_or(d.index_horizon),
            pair_samples: b.pair_samples.unwrap_or(d.pair_samples),
            slack: b.slack.unwrap_or(d.slack),
            probes: b.probes.unwrap_or(d.probes),
        }
        .scaled(scale)
    }

    /// Resolves every ingredient; the first failure is returned.
    pub fn build(&self, budget_scale: f64) -> Result<Built, Diagnostic> {
        let space = build_space(&self.space)?;
        let dim = space.dimension();
        let map = |spec: &Option<MapSpec>, field: &str| -> Result<Option<SelfMap>, Diagnostic> {
            spec.as_ref()
                .map(|m| SelfMap::from_exprs(dim, &m.sources()).map_err(|e| diag(field, e.to_string())))
                .transpose()
        };
        let t = map(&self.maps.t, "maps.T")?;
        let s = map(&self.maps.s, "maps.S")?;
        let setting = match &self.cyclic {
            Some(c) => {
                let a = c.a.as_ref().ok_or_else(|| diag("cyclic.A", "missing set A"))?;
                let b = c.b.as_ref().ok_or_else(|| diag("cyclic.B", "missing set B"))?;
                let a = build_region(a, "cyclic.A")?;
                let b = build_region(b, "cyclic.B")?;
                Some(CyclicSetting::new(space.clone(), a, b).map_err(|e| diag("cyclic", e.to_string()))?)
            }
            None => None,
        };
        let p = build_premetric(&self.premetric, "premetric", &space, setting.as_ref())?;
        let gauge = |g: &Option<GaugeSpec>, field: &str| g.as_ref().map(|g| build_gauge(g, field)).transpose();
        let f = gauge(&self.gauges.f, "gauges.F")?;
        let psi = gauge(&self.gauges.psi, "gauges.psi")?;
        let family = self
            .gauges
            .family
            .as_ref()
            .map(|fam| build_family(fam, "gauges.family"))
            .transpose()?;
        let budget = self.budget(budget_scale);
        budget.validate().map_err(|e| diag("budget", e.to_string()))?;
        let region = match &self.certify.region {
            Some(r) => build_region(r, "certify.region")?,
            None => Region::Whole,
        };
        region.validate(&space).map_err(|e| diag("certify.region", e.to_string()))?;
        let alt_region = match &self.alternate.region {
            Some(r) => build_region(r, "alternate.region")?,
            None => Region::Whole,
        };
        alt_region
            .validate(&space)
            .map_err(|e| diag("alternate.region", e.to_string()))?;
        Ok(Built {
            space,
            t,
            s,
            p,
            f,
            psi,
            family,
            setting,
            budget,
            region,
            alt_region,
        })
    }
}

fn build_space(spec: &SpaceSpec) -> Result<Space, Diagnostic> {
    let norm = match spec.norm.as_str() {
        "euclidean" | "l2" => Norm::Euclidean,
        "l1" => Norm::P(1.0),
        "max" | "linf" => Norm::P(f64::INFINITY),
        other => match other.strip_prefix("p:") {
            Some(e) => Norm::P(
                e.trim()
                    .parse()
                    .map_err(|_| diag("space.norm", format!("bad exponent '{}'", e)))?,
            ),
            None => Norm::Custom(Expr::parse(other).map_err(|e| diag("space.norm", e.to_string()))?),
        },
    };
    Space::new(SpaceId(0), spec.dimension, norm).map_err(|e| diag("space", e.to_string()))
}

fn build_region(spec: &RegionSpec, field: &str) -> Result<Region, Diagnostic> {
    Ok(match spec {
        RegionSpec::Whole => Region::Whole,
        RegionSpec::Interval([lo, hi]) => Region::Interval { lo: *lo, hi: *hi },
        RegionSpec::Ball { center, radius } => Region::Ball {
            center: center.clone(),
            radius: *radius,
        },
        RegionSpec::Box { lo, hi } => Region::Cuboid {
            lo: lo.clone(),
            hi: hi.clone(),
        },
        RegionSpec::HalfSpace { normal, offset } => Region::HalfSpace {
            normal: normal.clone(),
            offset: *offset,
        },
        RegionSpec::Custom {
            predicate,
            lo,
            hi,
            convex,
        } => Region::Custom {
            predicate: Expr::parse(predicate).map_err(|e| diag(format!("{}.predicate", field), e.to_string()))?,
            lo: lo.clone(),
            hi: hi.clone(),
            convex: *convex,
        },
    })
}

fn build_gauge(spec: &GaugeSpec, field: &str) -> Result<Gauge, Diagnostic> {
    match spec {
        GaugeSpec::Builtin(name) => Gauge::builtin(name).ok_or_else(|| {
            diag(
                field,
                format!("unknown built-in gauge '{}' (half, mk, id, step01)", name),
            )
        }),
        GaugeSpec::Linear { linear } => {
            if *linear >= 0.0 && linear.is_finite() {
                Ok(Gauge::linear(*linear))
            } else {
                Err(diag(field, "linear factor must be finite and nonnegative"))
            }
        }
        GaugeSpec::Expr { expr, profile, t_max } => {
            let mut regs = Vec::new();
            for (k, name) in profile.iter().enumerate() {
                regs.push(Regularity::from_name(name).ok_or_else(|| {
                    diag(
                        format!("{}.profile[{}]", field, k),
                        format!("unknown regularity '{}'", name),
                    )
                })?);
            }
            let g = Gauge::from_expr(expr, Profile::of(&regs)).map_err(|e| diag(field, e.to_string()))?;
            Ok(match t_max {
                Some(m) => g.with_t_max(*m),
                None => g,
            })
        }
    }
}

fn build_family(spec: &FamilySpec, field: &str) -> Result<GaugeFamily, Diagnostic> {
    let fam = match spec.kind.as_str() {
        "iterated" => {
            let base = spec
                .base
                .as_ref()
                .ok_or_else(|| diag(format!("{}.base", field), "iterated family needs a base gauge"))?;
            GaugeFamily::iterated(build_gauge(base, &format!("{}.base", field))?)
        }
        "explicit" => {
            if spec.members.is_empty() {
                return Err(diag(format!("{}.members", field), "explicit family needs members"));
            }
            let members = spec
                .members
                .iter()
                .enumerate()
                .map(|(k, m)| build_gauge(m, &format!("{}.members[{}]", field, k)))
                .collect::<Result<Vec<_>, _>>()?;
            GaugeFamily::explicit(members)
        }
        other => {
            return Err(diag(
                format!("{}.kind", field),
                format!("unknown family kind '{}' (iterated, explicit)", other),
            ))
        }
    };
    Ok(fam.with_zero_fixed(spec.zero_fixed))
}

fn build_claims(names: &[String], field: &str) -> Result<Claims, Diagnostic> {
    let mut c = Claims::default();
    for (k, n) in names.iter().enumerate() {
        match n.as_str() {
            "symmetric" => c.symmetric = true,
            "triangle" => c.triangle = true,
            "tau_distance" => c.tau_distance = true,
            other => {
                return Err(diag(
                    format!("{}.claims[{}]", field, k),
                    format!("unknown claim '{}' (symmetric, triangle, tau_distance)", other),
                ))
            }
        }
    }
    Ok(c)
}

fn build_premetric(
    spec: &PremetricSpec,
    field: &str,
    space: &Space,
    setting: Option<&CyclicSetting>,
) -> Result<Premetric, Diagnostic> {
    let base = match spec.kind.as_str() {
        "metric" => Premetric::metric(space.clone()),
        "shifted_cyclic" => {
            let s = setting.ok_or_else(|| diag("cyclic", "shifted_cyclic premetric needs a cyclic setting"))?;
            Premetric::shifted_cyclic(s.clone())
        }
        "composed" => {
            let g = spec
                .g
                .as_ref()
                .ok_or_else(|| diag(format!("{}.G", field), "composed premetric needs the gauge G"))?;
            let g = build_gauge(g, &format!("{}.G", field))?;
            let q = match &spec.q {
                Some(q) => build_premetric(q, &format!("{}.q", field), space, setting)?,
                None => Premetric::metric(space.clone()),
            };
            Premetric::composed(g, q)
        }
        "custom" => {
            let e = spec
                .expr
                .as_ref()
                .ok_or_else(|| diag(format!("{}.expr", field), "custom premetric needs an expression"))?;
            Premetric::custom(space.clone(), e).map_err(|err| diag(format!("{}.expr", field), err.to_string()))?
        }
        other => {
            return Err(diag(
                format!("{}.kind", field),
                format!("unknown premetric kind '{}'", other),
            ))
        }
    };
    let with_claims = match &spec.claims {
        Some(names) => base.with_claims(build_claims(names, field)?),
        None => base,
    };
    Ok(match &spec.companion {
        Some(r) => {
            let r = build_premetric(r, &format!("{}.companion", field), space, setting)?;
            with_claims.with_companion(r)
        }
        None => with_claims,
    })
}

fn check_point(v: &Option<Vec<f64>>, dim: usize, field: &str, out: &mut Vec<Diagnostic>) {
    if let Some(v) = v {
        if v.len() != dim {
            out.push(diag(
                field,
                format!("has {} coordinates, space has dimension {}", v.len(), dim),
            ));
        } else if v.iter().any(|c| !c.is_finite()) {
            out.push(diag(field, "coordinates must be finite"));
        }
    }
}

fn check_tol(v: f64, field: &str, out: &mut Vec<Diagnostic>) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(diag(field, "must be positive and finite"));
    }
}

fn check_premetric(spec: &PremetricSpec, field: &str, has_cyclic: bool, out: &mut Vec<Diagnostic>) {
    match spec.kind.as_str() {
        "metric" => {}
        "shifted_cyclic" => {
            if !has_cyclic {
                out.push(diag("cyclic", "shifted_cyclic premetric needs a [cyclic] section with A and B"));
            }
        }
        "composed" => match &spec.g {
            None => out.push(diag(format!("{}.G", field), "composed premetric needs the gauge G")),
            Some(g) => {
                if let Err(d) = build_gauge(g, &format!("{}.G", field)) {
                    out.push(d);
                }
            }
        },
        "custom" => match &spec.expr {
            None => out.push(diag(format!("{}.expr", field), "custom premetric needs an expression")),
            Some(e) => {
                if let Err(err) = Expr::parse(e) {
                    out.push(diag(format!("{}.expr", field), err.to_string()));
                }
            }
        },
        other => out.push(diag(
            format!("{}.kind", field),
            format!("unknown premetric kind '{}' (metric, shifted_cyclic, composed, custom)", other),
        )),
    }
    if spec.kind != "composed" {
        if spec.g.is_some() {
            out.push(diag(format!("{}.G", field), "G is only used by the composed kind"));
        }
        if spec.q.is_some() {
            out.push(diag(format!("{}.q", field), "q is only used by the composed kind"));
        }
    }
    if let Some(q) = &spec.q {
        check_premetric(q, &format!("{}.q", field), has_cyclic, out);
    }
    if let Some(r) = &spec.companion {
        check_premetric(r, &format!("{}.companion", field), has_cyclic, out);
    }
    if let Some(names) = &spec.claims {
        if let Err(d) = build_claims(names, field) {
            out.push(d);
        }
    }
}

/// Schema and consistency checks without executing anything.
pub fn validate(s: &Scenario) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if s.name.trim().is_empty() {
        out.push(diag("name", "must not be empty"));
    }
    if s.runs.is_empty() {
        out.push(diag("runs", "list at least one of iterate, certify, cyclic, alternate, falsify"));
    }
    let dim = s.space.dimension;
    if dim == 0 {
        out.push(diag("space.dimension", "must be positive"));
    } else if let Err(d) = build_space(&s.space) {
        out.push(d);
    }
    for (spec, field) in [(&s.maps.t, "maps.T"), (&s.maps.s, "maps.S")] {
        if let Some(m) = spec {
            if dim > 0 {
                if let Err(e) = SelfMap::from_exprs(dim, &m.sources()) {
                    out.push(diag(field, e.to_string()));
                }
            }
        }
    }
    if let Some(c) = &s.cyclic {
        if c.a.is_none() {
            out.push(diag("cyclic.A", "missing set A"));
        }
        if c.b.is_none() {
            out.push(diag("cyclic.B", "missing set B"));
        }
    }
    let has_cyclic = s.cyclic.as_ref().is_some_and(|c| c.a.is_some() && c.b.is_some());
    check_premetric(&s.premetric, "premetric", has_cyclic, &mut out);
    for (g, field) in [(&s.gauges.f, "gauges.F"), (&s.gauges.psi, "gauges.psi")] {
        if let Some(g) = g {
            if let Err(d) = build_gauge(g, field) {
                out.push(d);
            }
        }
    }
    if let Some(fam) = &s.gauges.family {
        if let Err(d) = build_family(fam, "gauges.family") {
            out.push(d);
        }
    }
    if let Err(e) = s.budget(1.0).validate() {
        out.push(diag("budget", e.to_string()));
    }

    let needs_t = s.runs.iter().any(|r| *r != RunKind::Alternate);
    if needs_t && s.maps.t.is_none() {
        out.push(diag("maps.T", "the listed runs need the map T"));
    }
    let needs_x0 = [RunKind::Iterate, RunKind::Certify, RunKind::Falsify]
        .iter()
        .any(|r| s.has_run(*r));
    if needs_x0 && s.iterate.x0.is_none() {
        out.push(diag("iterate.x0", "the listed runs need a starting point"));
    }
    check_point(&s.iterate.x0, dim, "iterate.x0", &mut out);
    check_point(&s.iterate.y0, dim, "iterate.y0", &mut out);
    check_tol(s.iterate.tol, "iterate.tol", &mut out);
    check_tol(s.iterate.escape_bound, "iterate.escape_bound", &mut out);
    check_tol(s.certify.tol, "certify.tol", &mut out);

    if s.has_run(RunKind::Certify) {
        if s.certify.suites.is_empty() {
            out.push(diag("certify.suites", "list at least one suite"));
        }
        let asmk = s.has_suite(Suite::Asmk1) || s.has_suite(Suite::Asmk2);
        if asmk && s.gauges.f.is_none() {
            out.push(diag("gauges.F", "asmk suites need the gauge F"));
        }
        if asmk && s.gauges.family.is_none() {
            out.push(diag("gauges.family", "asmk suites need the family psi_n"));
        }
        if s.has_suite(Suite::Transfer) && s.premetric.kind != "composed" {
            out.push(diag("certify.suites", "transfer needs a composed premetric"));
        }
        if s.has_suite(Suite::Cauchy) && s.certify.routes.is_empty() {
            out.push(diag("certify.routes", "the cauchy suite needs at least one route"));
        }
        for (k, r) in s.certify.routes.iter().enumerate() {
            match r {
                RouteName::Composed if s.premetric.kind != "composed" => out.push(diag(
                    format!("certify.routes[{}]", k),
                    "the composed route needs a composed premetric",
                )),
                RouteName::Mixed if s.premetric.companion.is_none() => out.push(diag(
                    format!("certify.routes[{}]", k),
                    "the mixed route needs premetric.companion",
                )),
                _ => {}
            }
        }
        if let Some(r) = &s.certify.region {
            if let Err(d) = build_region(r, "certify.region") {
                out.push(d);
            }
        }
    }

    if s.has_run(RunKind::Cyclic) {
        match &s.cyclic {
            None => out.push(diag("cyclic", "the cyclic run needs a [cyclic] section with A and B")),
            Some(c) => {
                if c.starts.is_empty() && s.iterate.x0.is_none() {
                    out.push(diag("cyclic.starts", "give starting points in A or iterate.x0"));
                }
                for (k, p) in c.starts.iter().enumerate() {
                    check_point(&Some(p.clone()), dim, &format!("cyclic.starts[{}]", k), &mut out);
                }
                check_tol(c.tol, "cyclic.tol", &mut out);
                if c.pairs == 0 {
                    out.push(diag("cyclic.pairs", "must be positive"));
                }
            }
        }
    }

    if s.has_run(RunKind::Alternate) {
        if s.maps.t.is_none() {
            out.push(diag("maps.T", "the alternate run needs T"));
        }
        if s.maps.s.is_none() {
            out.push(diag("maps.S", "the alternate run needs S"));
        }
        if s.gauges.f.is_none() {
            out.push(diag("gauges.F", "the alternate run needs F"));
        }
        if s.gauges.psi.is_none() {
            out.push(diag("gauges.psi", "the alternate run needs psi"));
        }
        if s.alternate.seed_point.is_none() {
            out.push(diag("alternate.seed_point", "the alternate run needs a seed point"));
        }
        check_point(&s.alternate.seed_point, dim, "alternate.seed_point", &mut out);
        check_tol(s.alternate.tol, "alternate.tol", &mut out);
        check_tol(s.alternate.eta, "alternate.eta", &mut out);
        if !matches!(s.alternate.profile.as_str(), "standard" | "zhang") {
            out.push(diag("alternate.profile", "must be 'standard' or 'zhang'"));
        }
        if let Some(r) = &s.alternate.region {
            if let Err(d) = build_region(r, "alternate.region") {
                out.push(d);
            }
        }
    }

    if s.has_run(RunKind::Falsify) {
        check_tol(s.falsify.eps, "falsify.eps", &mut out);
        check_tol(s.falsify.gap_tol, "falsify.gap_tol", &mut out);
        check_tol(s.falsify.tol, "falsify.tol", &mut out);
    }

    for (k, v) in s.expect.verdicts.iter().enumerate() {
        if !matches!(v.verdict.as_str(), "pass" | "fail" | "inconclusive") {
            out.push(diag(
                format!("expect.verdicts[{}].verdict", k),
                "must be pass, fail or inconclusive",
            ));
        }
        if !s.has_run(v.run) {
            out.push(diag(
                format!("expect.verdicts[{}].run", k),
                format!("run '{}' is not listed in runs", v.run.name()),
            ));
        }
    }
    if let Some(n) = &s.expect.noncauchy {
        if !matches!(n.as_str(), "found" | "none" | "not_applicable") {
            out.push(diag("expect.noncauchy", "must be found, none or not_applicable"));
        }
    }

    if out.is_empty() {
        if let Err(d) = s.build(1.0) {
            out.push(d);
        }
    }
    out
}
