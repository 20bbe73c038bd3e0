//! Scalar gauges `F`, `G`, `psi`, iterated families `{psi_n}`, and their
//! numeric regularity checks.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, Scope};
use crate::math::{strictly_less, tail_start};
use crate::report::{CertificateReport, ConditionId, Regularity, Verdict, Witness};

/// Default upper end of a gauge's working range.
pub const DEFAULT_T_MAX: f64 = 1e3;
/// Dyadic refinement steps for one-sided limit sampling.
pub const REFINEMENT_STEPS: u32 = 20;

/// Declared regularity set of a gauge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Profile(u16);

impl Profile {
    pub const EMPTY: Profile = Profile(0);

    pub fn of(entries: &[Regularity]) -> Profile {
        entries.iter().fold(Profile::EMPTY, |p, r| p.with(*r))
    }

    pub fn with(self, r: Regularity) -> Profile {
        Profile(self.0 | (1 << r as u16))
    }

    pub fn contains(self, r: Regularity) -> bool {
        self.0 & (1 << r as u16) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Regularity> {
        Regularity::ALL
            .into_iter()
            .filter(move |r| self.contains(*r))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Profile of the continuous, increasing contractions `t/2` and `t/(1+t)`.
fn contraction_profile() -> Profile {
    Profile::of(&Regularity::ALL)
}

#[derive(Clone)]
pub enum GaugeFn {
    /// `t / 2`
    Half,
    /// `t / (1 + t)`
    MeirKeeler,
    /// `t`
    Identity,
    /// `0` for `t < 1`, `1` for `t >= 1`.
    Step01,
    /// `c * t`
    Linear(f64),
    Expr(Expr),
    Native(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for GaugeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeFn::Half => f.write_str("Half"),
            GaugeFn::MeirKeeler => f.write_str("MeirKeeler"),
            GaugeFn::Identity => f.write_str("Identity"),
            GaugeFn::Step01 => f.write_str("Step01"),
            GaugeFn::Linear(c) => write!(f, "Linear({})", c),
            GaugeFn::Expr(e) => write!(f, "Expr({})", e),
            GaugeFn::Native(_) => f.write_str("Native(..)"),
        }
    }
}

impl GaugeFn {
    fn apply(&self, t: f64) -> f64 {
        match self {
            GaugeFn::Half => t / 2.0,
            GaugeFn::MeirKeeler => t / (1.0 + t),
            GaugeFn::Identity => t,
            GaugeFn::Step01 => {
                if t < 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            GaugeFn::Linear(c) => c * t,
            GaugeFn::Expr(e) => e.eval(&Bindings::scalar(t)),
            GaugeFn::Native(f) => f(t),
        }
    }
}

/// A function `[0, t_max] -> [0, inf)` with a declared regularity profile.
#[derive(Debug, Clone)]
pub struct Gauge {
    name: String,
    func: GaugeFn,
    profile: Profile,
    t_max: f64,
}

impl Gauge {
    pub fn new(name: impl Into<String>, func: GaugeFn, profile: Profile) -> Self {
        Gauge {
            name: name.into(),
            func,
            profile,
            t_max: DEFAULT_T_MAX,
        }
    }

    pub fn from_expr(source: &str, profile: Profile) -> Result<Self> {
        let e = Expr::parse_in(source, Scope::Scalar)?;
        Ok(Gauge::new(
            e.source().to_string(),
            GaugeFn::Expr(e),
            profile,
        ))
    }

    /// Built-in gallery gauges: `half`, `mk`, `id`, `step01`.
    pub fn builtin(name: &str) -> Option<Gauge> {
        let (func, profile) = match name {
            "half" => (GaugeFn::Half, contraction_profile()),
            "mk" => (GaugeFn::MeirKeeler, contraction_profile()),
            "id" => (
                GaugeFn::Identity,
                Profile::of(&Regularity::ALL).without(Regularity::StrictlyBelowIdentity),
            ),
            "step01" => (
                GaugeFn::Step01,
                Profile::of(&[
                    Regularity::Nondecreasing,
                    Regularity::RightContinuous,
                    Regularity::ZeroAtZero,
                    Regularity::UpperSemicontinuous,
                    Regularity::RightUpperSemicontinuous,
                ]),
            ),
            _ => return None,
        };
        Some(Gauge::new(name, func, profile))
    }

    pub fn half() -> Gauge {
        Gauge::builtin("half").unwrap()
    }

    pub fn meir_keeler() -> Gauge {
        Gauge::builtin("mk").unwrap()
    }

    pub fn identity() -> Gauge {
        Gauge::builtin("id").unwrap()
    }

    pub fn step01() -> Gauge {
        Gauge::builtin("step01").unwrap()
    }

    /// `c * t`; with `0 < c < 1` it carries the full contraction profile.
    pub fn linear(c: f64) -> Gauge {
        let profile = if c > 0.0 && c < 1.0 {
            contraction_profile()
        } else if c >= 1.0 {
            contraction_profile().without(Regularity::StrictlyBelowIdentity)
        } else {
            Profile::EMPTY
        };
        Gauge::new(format!("{}*t", c), GaugeFn::Linear(c), profile)
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Evaluates inside the working range; the value must be finite and >= 0.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.t_max) {
            return Err(Error::OutOfRange {
                t,
                t_max: self.t_max,
            });
        }
        let v = self.func.apply(t);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Evaluation(format!(
                "gauge `{}` evaluated to {} at t = {}",
                self.name, v, t
            )));
        }
        Ok(v)
    }

    /// Evaluation without range or sign checks.
    pub fn eval_raw(&self, t: f64) -> f64 {
        self.func.apply(t)
    }
}

impl Profile {
    pub fn without(self, r: Regularity) -> Profile {
        Profile(self.0 & !(1 << r as u16))
    }
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// Member `n` is `list[n - 1]`.
    Explicit(Vec<Gauge>),
    /// Member `n` is the `n`-fold composition of the base.
    Iterated(Gauge),
}

/// A sequence of gauges `{psi_n}`, `n >= 1`.
#[derive(Debug, Clone)]
pub struct GaugeFamily {
    kind: FamilyKind,
    zero_fixed: bool,
}

impl GaugeFamily {
    pub fn iterated(base: Gauge) -> Self {
        GaugeFamily {
            kind: FamilyKind::Iterated(base),
            zero_fixed: true,
        }
    }

    pub fn explicit(members: Vec<Gauge>) -> Self {
        GaugeFamily {
            kind: FamilyKind::Explicit(members),
            zero_fixed: true,
        }
    }

    pub fn with_zero_fixed(mut self, zero_fixed: bool) -> Self {
        self.zero_fixed = zero_fixed;
        self
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn zero_fixed(&self) -> bool {
        self.zero_fixed
    }

    pub fn base(&self) -> Option<&Gauge> {
        match &self.kind {
            FamilyKind::Iterated(g) => Some(g),
            FamilyKind::Explicit(_) => None,
        }
    }

    /// Largest member index available (`usize::MAX` for iterated families).
    pub fn len(&self) -> usize {
        match &self.kind {
            FamilyKind::Explicit(list) => list.len(),
            FamilyKind::Iterated(_) => usize::MAX,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[psi_1(t), ..., psi_n(t)]`, computed incrementally for iterated families.
    pub fn values(&self, t: f64, n: usize) -> Result<Vec<f64>> {
        match &self.kind {
            FamilyKind::Iterated(base) => {
                let mut out = Vec::with_capacity(n);
                let mut v = t;
                for _ in 0..n {
                    v = base.eval(v)?;
                    out.push(v);
                }
                Ok(out)
            }
            FamilyKind::Explicit(list) => list.iter().take(n).map(|g| g.eval(t)).collect(),
        }
    }
}

/// `psi_n(t)`. Families start at `n = 1`; the identity is not a member.
pub fn iterate_gauge(family: &GaugeFamily, n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Input("gauge families are indexed from 1".into()));
    }
    match &family.kind {
        FamilyKind::Iterated(base) => {
            let mut v = t;
            for _ in 0..n {
                v = base.eval(v)?;
            }
            Ok(v)
        }
        FamilyKind::Explicit(list) => list
            .get(n - 1)
            .ok_or_else(|| {
                Error::Input(format!(
                    "family has {} members, asked for {}",
                    list.len(),
                    n
                ))
            })?
            .eval(t),
    }
}

/// A strictly increasing sample of `[0, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Input("grid needs at least two points".into()));
        }
        if points.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Input(
                "grid points must be finite and nonnegative".into(),
            ));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("grid must be strictly increasing".into()));
        }
        Ok(Grid(points))
    }

    /// `0`, a logarithmic sweep of `[1e-6, 1)`, the integers `1..=10`, then a
    /// geometric sweep up to `t_max`.
    pub fn standard(t_max: f64) -> Grid {
        let mut pts = alloc::vec![0.0];
        for k in 0..48 {
            pts.push(libm::pow(10.0, -6.0 + k as f64 / 8.0));
        }
        for i in 1..=10 {
            pts.push(i as f64);
        }
        if t_max > 10.0 {
            let steps = 24;
            let ratio = libm::pow(t_max / 10.0, 1.0 / steps as f64);
            for k in 1..=steps {
                pts.push(10.0 * libm::pow(ratio, k as f64));
            }
        }
        pts.retain(|t| *t <= t_max);
        if let Some(last) = pts.last_mut() {
            if (*last - t_max).abs() < 1e-9 * t_max.max(1.0) {
                *last = t_max;
            }
        }
        pts.dedup_by(|a, b| *a <= *b);
        Grid(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

struct Probe<'a> {
    g: &'a Gauge,
}

impl Probe<'_> {
    fn at(&self, t: f64) -> core::result::Result<f64, Witness> {
        let v = self.g.eval_raw(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Witness::new()
                .values(&[t, v])
                .note(format!("evaluation of `{}` is not finite", self.g.name)))
        }
    }

    /// Values at `t + side * h * 2^-k`, `k = 1..=K`.
    fn approach(&self, t: f64, h: f64, side: f64) -> core::result::Result<Vec<f64>, Witness> {
        (1..=REFINEMENT_STEPS)
            .map(|k| self.at(t + side * h * libm::ldexp(1.0, -(k as i32))))
            .collect()
    }
}

/// True when `devs` (nonnegative deviations along a dyadic approach) fails to
/// vanish: the final deviation exceeds `eta` and has not shrunk over the
/// last four refinements.
fn persistent(devs: &[f64], eta: f64) -> bool {
    let k = devs.len();
    let last = devs[k - 1];
    last > eta && (k < 5 || last > 0.9 * devs[k - 5])
}

/// Numerically validates every declared profile entry of `g` on `grid`.
///
/// One report per declared entry. Pass means no violation was found at the
/// grid resolution (one-sided limits are sampled to `h * 2^-20`).
pub fn verify_gauge_regularity(g: &Gauge, grid: &Grid, eta: f64) -> Vec<CertificateReport> {
    g.profile()
        .iter()
        .map(|r| check_regularity(g, r, grid, eta))
        .collect()
}

/// Checks a single regularity property, declared or not.
pub fn check_regularity(g: &Gauge, r: Regularity, grid: &Grid, eta: f64) -> CertificateReport {
    let probe = Probe { g };
    let pts = grid.points();
    let id = ConditionId::Regularity(r);
    let note = format!(
        "gauge `{}` on {} grid points in [{}, {}], slack {}, one-sided sampling to h*2^-{}",
        g.name,
        pts.len(),
        pts[0],
        pts[pts.len() - 1],
        eta,
        REFINEMENT_STEPS
    );
    let outcome: core::result::Result<(), Witness> = (|| {
        match r {
            Regularity::Nondecreasing => {
                for (k, w) in pts.windows(2).enumerate() {
                    let (a, b) = (probe.at(w[0])?, probe.at(w[1])?);
                    if b < a - eta {
                        return Err(Witness::new()
                            .indices(&[k, k + 1])
                            .values(&[w[0], w[1], a, b])
                            .note("g decreases between adjacent grid points"));
                    }
                }
            }
            Regularity::ZeroAtZero => {
                let v = probe.at(0.0)?;
                if v.abs() > eta {
                    return Err(Witness::new().values(&[0.0, v]).note("g(0) != 0"));
                }
            }
            Regularity::PositiveOnPositive => {
                for &t in pts.iter().filter(|t| **t > 0.0) {
                    let v = probe.at(t)?;
                    if !(v > 0.0) {
                        return Err(Witness::new().values(&[t, v]).note("g(t) <= 0 at t > 0"));
                    }
                }
            }
            Regularity::StrictlyBelowIdentity => {
                for &t in pts.iter().filter(|t| **t > eta) {
                    let v = probe.at(t)?;
                    if !strictly_less(v, t, eta) {
                        return Err(Witness::new().values(&[t, v]).note("g(t) is not below t"));
                    }
                }
            }
            Regularity::RightContinuous
            | Regularity::Continuous
            | Regularity::UpperSemicontinuous
            | Regularity::RightUpperSemicontinuous => {
                let two_sided =
                    matches!(r, Regularity::Continuous | Regularity::UpperSemicontinuous);
                let upper_only = matches!(
                    r,
                    Regularity::UpperSemicontinuous | Regularity::RightUpperSemicontinuous
                );
                for k in 0..pts.len() {
                    let t = pts[k];
                    let base = probe.at(t)?;
                    let mut sides: Vec<(f64, f64)> = Vec::new();
                    if k + 1 < pts.len() {
                        sides.push((pts[k + 1] - t, 1.0));
                    }
                    if two_sided && k > 0 {
                        sides.push((t - pts[k - 1], -1.0));
                    }
                    for (h, side) in sides {
                        let vals = probe.approach(t, h, side)?;
                        let devs: Vec<f64> = vals
                            .iter()
                            .map(|v| {
                                if upper_only {
                                    (v - base).max(0.0)
                                } else {
                                    (v - base).abs()
                                }
                            })
                            .collect();
                        if persistent(&devs, eta) {
                            let s = t + side * h * libm::ldexp(1.0, -(REFINEMENT_STEPS as i32));
                            return Err(Witness::new()
                                .indices(&[k])
                                .values(&[t, base, s, vals[vals.len() - 1]])
                                .note(if side > 0.0 {
                                    "one-sided limit from the right differs from g(t)"
                                } else {
                                    "one-sided limit from the left differs from g(t)"
                                }));
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => CertificateReport::new(id, Verdict::Pass, note),
        Err(w) => CertificateReport::new(id, Verdict::Fail, note).with_witness(w),
    }
}

/// Refuses unless every entry of `required` is declared by `g` and passes
/// numeric validation.
pub fn require_profile(g: &Gauge, required: &[Regularity], grid: &Grid, eta: f64) -> Result<()> {
    for &r in required {
        if !g.profile().contains(r) {
            return Err(Error::Precondition(format!(
                "gauge `{}` does not declare {}",
                g.name(),
                r
            )));
        }
        let rep = check_regularity(g, r, grid, eta);
        if !rep.passed() {
            return Err(Error::Precondition(format!(
                "gauge `{}` fails {} ({})",
                g.name(),
                r,
                rep.witnesses
                    .first()
                    .and_then(|w| w.note.clone())
                    .unwrap_or_default()
            )));
        }
    }
    Ok(())
}

/// `limsup_n psi_n(eps) < eps` for every `eps` in the grid.
///
/// The limsup is the maximum over the last quarter of `1..=n_horizon`. A tail
/// that is neither flat (variation <= eta) nor nonincreasing is unstable and
/// yields inconclusive.
pub fn check_family_c6(
    family: &GaugeFamily,
    eps_grid: &[f64],
    n_horizon: usize,
    eta: f64,
) -> Result<CertificateReport> {
    let horizon = n_horizon.min(family.len());
    if horizon == 0 {
        return Err(Error::Input("C6 needs at least one family member".into()));
    }
    let mut verdict = Verdict::Pass;
    let mut witnesses = Vec::new();
    for &eps in eps_grid {
        let vals = family.values(eps, horizon)?;
        let tail = &vals[tail_start(vals.len())..];
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let monotone = tail.windows(2).all(|w| w[1] <= w[0] + eta);
        let stable = hi - lo <= eta || monotone;
        let w = Witness::new().eps(eps).nu(horizon).values(&[hi]);
        if strictly_less(hi, eps, eta) && stable {
            witnesses.push(w);
        } else if !stable {
            verdict = verdict.and(Verdict::Inconclusive);
            witnesses.push(w.note("tail of psi_n(eps) has not stabilized"));
        } else {
            verdict = Verdict::Fail;
            witnesses.push(w.note("limsup estimate is not below eps"));
        }
    }
    Ok(CertificateReport::new(
        ConditionId::C6,
        verdict,
        format!(
            "limsup estimated as max of psi_n(eps) over the last quarter of n <= {}; slack {}",
            horizon, eta
        ),
    )
    .with_witnesses(witnesses))
}

/// For `eps`, search a `delta` such that every sampled `t` in
/// `[eps, eps + delta]` has some `nu <= nu_horizon` with `psi_nu(t) < eps`.
///
/// A finite search cannot refute the existence of `delta`, so exhausting the
/// candidates yields inconclusive (with the defeating `t` as evidence).
pub fn check_family_c7(
    family: &GaugeFamily,
    eps: f64,
    delta_search: &[f64],
    t_samples: usize,
    nu_horizon: usize,
    eta: f64,
) -> Result<CertificateReport> {
    let horizon = nu_horizon.min(family.len());
    let samples = t_samples.max(2);
    let note = format!(
        "{} samples per interval, nu <= {}, slack {}",
        samples, horizon, eta
    );
    let mut defeat = None;
    for &delta in delta_search {
        let mut max_nu = 0;
        let mut ok = true;
        for s in 0..samples {
            let t = eps + delta * s as f64 / (samples - 1) as f64;
            let vals = family.values(t, horizon)?;
            match vals.iter().position(|v| strictly_less(*v, eps, eta)) {
                Some(p) => max_nu = max_nu.max(p + 1),
                None => {
                    ok = false;
                    defeat = Some(
                        Witness::new()
                            .eps(eps)
                            .delta(delta)
                            .values(&[t])
                            .note("no nu brings psi_nu(t) below eps"),
                    );
                    break;
                }
            }
        }
        if ok {
            return Ok(CertificateReport::new(ConditionId::C7, Verdict::Pass, note)
                .with_witness(Witness::new().eps(eps).delta(delta).nu(max_nu)));
        }
    }
    Ok(
        CertificateReport::new(ConditionId::C7, Verdict::Inconclusive, note)
            .with_witnesses(defeat.into_iter().collect()),
    )
}

/// C7 over every `eps` of a grid, merged into one report.
pub fn check_family_c7_grid(
    family: &GaugeFamily,
    eps_grid: &[f64],
    delta_search: &[f64],
    t_samples: usize,
    nu_horizon: usize,
    eta: f64,
) -> Result<CertificateReport> {
    let mut verdict = Verdict::Pass;
    let mut witnesses = Vec::new();
    let mut note = String::new();
    for &eps in eps_grid {
        let r = check_family_c7(family, eps, delta_search, t_samples, nu_horizon, eta)?;
        verdict = verdict.and(r.verdict);
        witnesses.extend(r.witnesses);
        note = r.resolution_note;
    }
    Ok(CertificateReport::new(ConditionId::C7, verdict, note).with_witnesses(witnesses))
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn is<T: Send + Sync>() {}
    is::<Gauge>();
    is::<GaugeFamily>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid() -> Grid {
        Grid::standard(DEFAULT_T_MAX)
    }

    #[test]
    fn iterate_examples() {
        let half = GaugeFamily::iterated(Gauge::half());
        assert_eq!(iterate_gauge(&half, 3, 8.0).unwrap(), 1.0);
        let mk = GaugeFamily::iterated(Gauge::meir_keeler());
        // closed form psi_n(t) = t / (1 + n t)
        assert!((iterate_gauge(&mk, 4, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(iterate_gauge(&mk, 7, 0.0).unwrap(), 0.0);
        assert!(matches!(iterate_gauge(&half, 0, 1.0), Err(Error::Input(_))));
    }

    #[test]
    fn explicit_family_bounds() {
        let fam = GaugeFamily::explicit(vec![Gauge::half(), Gauge::linear(0.25)]);
        assert_eq!(iterate_gauge(&fam, 2, 4.0).unwrap(), 1.0);
        assert!(iterate_gauge(&fam, 3, 4.0).is_err());
    }

    #[test]
    fn out_of_range_evaluation() {
        let g = Gauge::half();
        assert!(matches!(g.eval(2e3), Err(Error::OutOfRange { .. })));
        assert!(matches!(g.eval(-1.0), Err(Error::OutOfRange { .. })));
        let neg = Gauge::from_expr("t - 1", Profile::EMPTY).unwrap();
        assert!(matches!(neg.eval(0.0), Err(Error::Evaluation(_))));
    }

    #[test]
    fn regularity_examples() {
        let g = Gauge::half().with_profile(Profile::of(&[
            Regularity::Nondecreasing,
            Regularity::StrictlyBelowIdentity,
            Regularity::ZeroAtZero,
        ]));
        let reps = verify_gauge_regularity(&g, &grid(), 1e-9);
        assert_eq!(reps.len(), 3);
        assert!(reps.iter().all(|r| r.passed()));

        let id = Gauge::identity().with_profile(Profile::of(&[Regularity::StrictlyBelowIdentity]));
        let reps = verify_gauge_regularity(&id, &grid(), 1e-9);
        assert!(reps[0].failed());
        assert!(reps[0].witnesses[0].values[0] > 0.0);
    }

    #[test]
    fn step_gauge_is_right_continuous_not_continuous() {
        let g = Gauge::step01();
        let rc = check_regularity(&g, Regularity::RightContinuous, &grid(), 1e-9);
        assert!(rc.passed(), "{:?}", rc);
        let c = check_regularity(&g, Regularity::Continuous, &grid(), 1e-9);
        assert!(c.failed());
        assert_eq!(c.witnesses[0].values[0], 1.0);
        let usc = check_regularity(&g, Regularity::UpperSemicontinuous, &grid(), 1e-9);
        assert!(usc.passed());
        // left-continuous step: 0 for t <= 1, 1 after; not right continuous at 1
        let lc = Gauge::new(
            "left-step",
            GaugeFn::Native(Arc::new(|t| if t <= 1.0 { 0.0 } else { 1.0 })),
            Profile::EMPTY,
        );
        assert!(check_regularity(&lc, Regularity::RightContinuous, &grid(), 1e-9).failed());
        assert!(
            check_regularity(&lc, Regularity::RightUpperSemicontinuous, &grid(), 1e-9).failed()
        );
    }

    #[test]
    fn sqrt_is_continuous_at_zero() {
        let g = Gauge::from_expr("sqrt(t)", Profile::EMPTY).unwrap();
        assert!(check_regularity(&g, Regularity::Continuous, &grid(), 1e-9).passed());
    }

    #[test]
    fn c6_examples() {
        let eps = [0.1, 1.0, 10.0];
        let half = GaugeFamily::iterated(Gauge::half());
        assert!(check_family_c6(&half, &eps, 50, 1e-9).unwrap().passed());
        let id = GaugeFamily::iterated(Gauge::identity());
        assert!(check_family_c6(&id, &eps, 50, 1e-9).unwrap().failed());
        let mk = GaugeFamily::iterated(Gauge::meir_keeler());
        assert!(check_family_c6(&mk, &[1.0], 100, 1e-9).unwrap().passed());
    }

    #[test]
    fn c6_unstable_tail_is_inconclusive() {
        let members = (1..=40)
            .map(|n| Gauge::linear(if n % 2 == 0 { 0.1 } else { 0.5 }))
            .collect();
        let fam = GaugeFamily::explicit(members);
        let r = check_family_c6(&fam, &[1.0], 40, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn c7_examples() {
        let deltas: Vec<f64> = (0..=20).map(|k| libm::ldexp(1.0, -k)).collect();
        let half = GaugeFamily::iterated(Gauge::half());
        let r = check_family_c7(&half, 1.0, &deltas[1..], 17, 64, 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.witnesses[0].nu, Some(1));

        let id = GaugeFamily::iterated(Gauge::identity());
        let r = check_family_c7(&id, 1.0, &deltas, 17, 64, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(!r.witnesses.is_empty());

        // t/(1+t) < 1/2 for t < 1: delta below 1/2 needs only nu = 1
        let mk = GaugeFamily::iterated(Gauge::meir_keeler());
        let r = check_family_c7(&mk, 0.5, &[0.4, 0.2, 0.1], 33, 10, 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.witnesses[0].nu, Some(1));
        assert_eq!(r.witnesses[0].delta, Some(0.4));
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::new(vec![1.0, 0.5]).is_err());
        let g = Grid::standard(1e3);
        assert!(g.points().contains(&1.0));
        assert_eq!(*g.points().last().unwrap(), 1e3);
    }

    #[test]
    fn iterated_composition_matches_base() {
        let fam = GaugeFamily::iterated(Gauge::meir_keeler());
        let base = Gauge::meir_keeler();
        for &t in grid().points().iter().step_by(5) {
            for n in 1..20 {
                let next = iterate_gauge(&fam, n + 1, t).unwrap();
                let composed = base.eval(iterate_gauge(&fam, n, t).unwrap()).unwrap();
                assert_eq!(next, composed);
            }
        }
    }
}
