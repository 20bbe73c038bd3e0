//! Premetrics: nonnegative two-argument functions generalizing `d`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, Scope};
use crate::gauge::Gauge;
use crate::report::{Axiom, CertificateReport, ConditionId, Verdict, Witness};
use crate::space::{CyclicSetting, GapProvenance, Point, Region, Space};

#[derive(Debug, Clone)]
pub enum PremetricKind {
    /// The space distance `d`.
    Metric,
    /// `max(0, d(x, y) - d(A, B))`.
    ShiftedCyclic(Arc<CyclicSetting>),
    /// `G(q(x, y))`.
    Composed { g: Gauge, q: Box<Premetric> },
    /// Evaluable expression in `x[i]`, `y[i]`.
    Custom(Expr),
}

/// Declared structural properties.
#[derive(Debug, Clone, Default)]
pub struct Claims {
    pub symmetric: bool,
    pub triangle: bool,
    pub tau_distance: bool,
    pub mixed_triangle: bool,
    /// Companion `r` of the mixed triangle inequalities.
    pub companion: Option<Box<Premetric>>,
}

#[derive(Debug, Clone)]
pub struct Premetric {
    space: Space,
    kind: PremetricKind,
    claims: Claims,
}

impl Premetric {
    pub fn metric(space: Space) -> Self {
        Premetric {
            space,
            kind: PremetricKind::Metric,
            claims: Claims {
                symmetric: true,
                triangle: true,
                tau_distance: true,
                ..Claims::default()
            },
        }
    }

    /// The clamped cyclic gap, with the mixed triangle claim against `d`.
    pub fn shifted_cyclic(setting: CyclicSetting) -> Self {
        let space = setting.space().clone();
        Premetric {
            kind: PremetricKind::ShiftedCyclic(Arc::new(setting)),
            claims: Claims {
                symmetric: true,
                mixed_triangle: true,
                companion: Some(Box::new(Premetric::metric(space.clone()))),
                ..Claims::default()
            },
            space,
        }
    }

    pub fn composed(g: Gauge, q: Premetric) -> Self {
        Premetric {
            space: q.space.clone(),
            claims: Claims {
                symmetric: q.claims.symmetric,
                ..Claims::default()
            },
            kind: PremetricKind::Composed { g, q: Box::new(q) },
        }
    }

    pub fn custom(space: Space, source: &str) -> Result<Self> {
        let e = Expr::parse_in(
            source,
            Scope::Pair {
                dim: space.dimension(),
            },
        )?;
        Ok(Premetric {
            space,
            kind: PremetricKind::Custom(e),
            claims: Claims::default(),
        })
    }

    pub fn with_claims(mut self, claims: Claims) -> Self {
        self.claims = claims;
        self
    }

    /// Adds the mixed triangle claim with companion `r`.
    pub fn with_companion(mut self, r: Premetric) -> Self {
        self.claims.mixed_triangle = true;
        self.claims.companion = Some(Box::new(r));
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn kind(&self) -> &PremetricKind {
        &self.kind
    }

    pub fn claims(&self) -> &Claims {
        &self.claims
    }

    pub fn companion(&self) -> Option<&Premetric> {
        self.claims.companion.as_deref()
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            PremetricKind::Metric => "d".into(),
            PremetricKind::ShiftedCyclic(s) => format!("max(0, d - {})", s.gap()),
            PremetricKind::Composed { g, q } => format!("{}({})", g.name(), q.describe()),
            PremetricKind::Custom(e) => format!("custom({})", e),
        }
    }

    /// Whether any ingredient relies on a sampled (not closed-form) set gap.
    pub fn uses_estimated_gap(&self) -> bool {
        match &self.kind {
            PremetricKind::ShiftedCyclic(s) => s.provenance() == GapProvenance::Estimated,
            PremetricKind::Composed { q, .. } => q.uses_estimated_gap(),
            _ => false,
        }
    }

    /// Raw evaluation on coordinate slices. No membership or sign checks.
    pub fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.kind {
            PremetricKind::Metric => self.space.dist(x, y),
            PremetricKind::ShiftedCyclic(s) => (self.space.dist(x, y) - s.gap()).max(0.0),
            PremetricKind::Composed { g, q } => g.eval_raw(q.eval_raw(x, y)),
            PremetricKind::Custom(e) => e.eval(&Bindings::pair(x, y)),
        }
    }

    /// `p(x, y)` with membership checks; the value must be finite and >= 0.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        self.space.contains(x)?;
        self.space.contains(y)?;
        self.eval_checked(x.coords(), y.coords())
    }

    /// As [`Premetric::eval`], refusing sampled set gaps.
    pub fn eval_strict(&self, x: &Point, y: &Point) -> Result<f64> {
        if self.uses_estimated_gap() {
            return Err(Error::EstimatedGap);
        }
        self.eval(x, y)
    }

    fn eval_checked(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let v = match &self.kind {
            PremetricKind::Composed { g, q } => g.eval(q.eval_checked(x, y)?)?,
            _ => self.eval_raw(x, y),
        };
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Evaluation(format!(
                "premetric {} evaluated to {}",
                self.describe(),
                v
            )));
        }
        Ok(v)
    }
}

/// `p(x, y)`; `strict` refuses premetrics built on an estimated gap.
pub fn eval_premetric(p: &Premetric, x: &Point, y: &Point, strict: bool) -> Result<f64> {
    if strict {
        p.eval_strict(x, y)
    } else {
        p.eval(x, y)
    }
}

/// A sample triple `(x, y, z)` of coordinates.
pub type Triple = [Vec<f64>; 3];

/// `count` triples with every point drawn from `region`.
pub fn sample_triples<R: Rng + ?Sized>(
    space: &Space,
    region: &Region,
    count: usize,
    window: f64,
    rng: &mut R,
) -> Result<Vec<Triple>> {
    let mut draw = || {
        region
            .sample(space, rng, window)
            .ok_or_else(|| Error::Config("region sampler produced no member".into()))
    };
    (0..count)
        .map(|_| Ok([draw()?, draw()?, draw()?]))
        .collect()
}

struct AxiomScan {
    axiom: Axiom,
    worst: Option<(usize, f64)>,
    nonfinite: Option<usize>,
}

impl AxiomScan {
    fn new(axiom: Axiom) -> Self {
        AxiomScan {
            axiom,
            worst: None,
            nonfinite: None,
        }
    }

    /// Records `lhs <= rhs` at triple `k`.
    fn record(&mut self, k: usize, lhs: f64, rhs: f64, eta: f64) {
        if !(lhs.is_finite() && rhs.is_finite()) {
            self.nonfinite.get_or_insert(k);
            return;
        }
        let excess = lhs - rhs;
        if excess > eta && self.worst.is_none_or(|(_, e)| excess > e) {
            self.worst = Some((k, excess));
        }
    }

    fn report(self, triples: &[Triple], eta: f64) -> CertificateReport {
        let id = ConditionId::Axiom(self.axiom);
        let note = format!("{} sampled triples, slack {}", triples.len(), eta);
        if let Some(k) = self.nonfinite {
            return CertificateReport::new(id, Verdict::Fail, note)
                .with_witness(triple_witness(&triples[k], k).note("non-finite evaluation"));
        }
        match self.worst {
            None => CertificateReport::new(id, Verdict::Pass, note),
            Some((k, excess)) => CertificateReport::new(id, Verdict::Fail, note).with_witness(
                triple_witness(&triples[k], k).note(format!("violation magnitude {}", excess)),
            ),
        }
    }
}

fn triple_witness(t: &Triple, k: usize) -> Witness {
    let mut values = t[0].clone();
    values.extend_from_slice(&t[1]);
    values.extend_from_slice(&t[2]);
    Witness::new().indices(&[k]).values(&values)
}

/// Checks nonnegativity and every claimed axiom of `p` on sampled triples.
///
/// The two mixed triangle inequalities are reported separately. One report
/// per property.
pub fn verify_premetric_axioms(
    p: &Premetric,
    triples: &[Triple],
    eta: f64,
) -> Result<Vec<CertificateReport>> {
    if triples.is_empty() {
        return Err(Error::Input("axiom check needs at least one triple".into()));
    }
    let dim = p.space.dimension();
    if let Some(t) = triples.iter().flatten().find(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: t.len(),
        });
    }
    let claims = &p.claims;
    let companion = if claims.mixed_triangle {
        Some(claims.companion.as_deref().ok_or_else(|| {
            Error::Config("mixed triangle claimed without a companion premetric".into())
        })?)
    } else {
        None
    };

    let mut nonneg = AxiomScan::new(Axiom::Nonnegative);
    let mut sym = claims.symmetric.then(|| AxiomScan::new(Axiom::Symmetric));
    let mut tri = (claims.triangle || claims.tau_distance).then(|| AxiomScan::new(Axiom::Triangle));
    let mut left = companion.map(|_| AxiomScan::new(Axiom::MixedLeft));
    let mut right = companion.map(|_| AxiomScan::new(Axiom::MixedRight));
    let mut ctri = companion.map(|_| AxiomScan::new(Axiom::CompanionTriangle));

    for (k, [x, y, z]) in triples.iter().enumerate() {
        let pxy = p.eval_raw(x, y);
        nonneg.record(k, 0.0, pxy, eta);
        if let Some(s) = sym.as_mut() {
            let pyx = p.eval_raw(y, x);
            s.record(k, (pxy - pyx).abs(), 0.0, eta);
        }
        if let Some(s) = tri.as_mut() {
            s.record(k, pxy, p.eval_raw(x, z) + p.eval_raw(z, y), eta);
        }
        if let Some(r) = companion {
            left.as_mut()
                .unwrap()
                .record(k, pxy, p.eval_raw(x, z) + r.eval_raw(z, y), eta);
            right
                .as_mut()
                .unwrap()
                .record(k, pxy, r.eval_raw(x, z) + p.eval_raw(z, y), eta);
            ctri.as_mut().unwrap().record(
                k,
                r.eval_raw(x, y),
                r.eval_raw(x, z) + r.eval_raw(z, y),
                eta,
            );
        }
    }

    Ok([Some(nonneg), sym, tri, left, right, ctri]
        .into_iter()
        .flatten()
        .map(|s| s.report(triples, eta))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use alloc::vec;

    fn cyclic_line() -> CyclicSetting {
        CyclicSetting::new(
            Space::real_line(),
            Region::Interval {
                lo: 1.0,
                hi: f64::INFINITY,
            },
            Region::Interval {
                lo: f64::NEG_INFINITY,
                hi: -1.0,
            },
        )
        .unwrap()
    }

    fn pt(v: f64) -> Point {
        Space::real_line().scalar(v).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = Premetric::shifted_cyclic(cyclic_line());
        assert_eq!(p.eval(&pt(1.0), &pt(-1.0)).unwrap(), 0.0);
        assert_eq!(p.eval(&pt(2.0), &pt(-1.0)).unwrap(), 1.0);
        // same-set pair is clamped
        assert_eq!(p.eval(&pt(1.0), &pt(1.5)).unwrap(), 0.0);

        let g = Premetric::composed(Gauge::meir_keeler(), Premetric::metric(Space::real_line()));
        assert_eq!(p.eval_strict(&pt(2.0), &pt(-1.0)).unwrap(), 1.0);
        assert_eq!(g.eval(&pt(1.0), &pt(0.0)).unwrap(), 0.5);
    }

    #[test]
    fn strict_mode_refuses_estimated_gap() {
        let mut r = rng(4);
        let a = Region::Custom {
            predicate: Expr::parse("1 - x").unwrap(),
            lo: vec![1.0],
            hi: vec![5.0],
            convex: true,
        };
        let s = CyclicSetting::estimated(
            Space::real_line(),
            a,
            Region::Interval { lo: -5.0, hi: -1.0 },
            500,
            &mut r,
        )
        .unwrap();
        assert_eq!(s.provenance(), GapProvenance::Estimated);
        let p = Premetric::shifted_cyclic(s);
        assert!(p.eval(&pt(2.0), &pt(-2.0)).is_ok());
        assert!(matches!(
            eval_premetric(&p, &pt(2.0), &pt(-2.0), true),
            Err(Error::EstimatedGap)
        ));
    }

    #[test]
    fn composed_is_g_of_q_bitwise() {
        let q = Premetric::metric(Space::real_line());
        let g = Gauge::meir_keeler();
        let p = Premetric::composed(g.clone(), q.clone());
        for (x, y) in [(0.3, 1.7), (-4.0, 2.5), (1e-9, 0.0), (7.0, 7.0)] {
            let direct = g.eval(q.eval(&pt(x), &pt(y)).unwrap()).unwrap();
            assert_eq!(p.eval(&pt(x), &pt(y)).unwrap().to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn metric_axioms_hold() {
        let space = Space::euclidean(3);
        let p = Premetric::metric(space.clone());
        let mut r = rng(11);
        let triples = sample_triples(&space, &Region::Whole, 1000, 10.0, &mut r).unwrap();
        let reps = verify_premetric_axioms(&p, &triples, 1e-12).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(reps.iter().all(|r| r.passed()));
    }

    #[test]
    fn shifted_mixed_triangle_holds() {
        let p = Premetric::shifted_cyclic(cyclic_line());
        let mut r = rng(12);
        let triples = sample_triples(
            p.space(),
            &Region::Interval {
                lo: -20.0,
                hi: 20.0,
            },
            10_000,
            100.0,
            &mut r,
        )
        .unwrap();
        let reps = verify_premetric_axioms(&p, &triples, 1e-9).unwrap();
        for rep in &reps {
            assert!(rep.passed(), "{:?}", rep);
        }
        let ids: Vec<_> = reps.iter().map(|r| r.condition_id).collect();
        assert!(ids.contains(&ConditionId::Axiom(Axiom::MixedLeft)));
        assert!(ids.contains(&ConditionId::Axiom(Axiom::MixedRight)));
    }

    #[test]
    fn squared_metric_breaks_triangle() {
        let line = Space::real_line();
        let p = Premetric::custom(line, "(x-y)*(x-y)")
            .unwrap()
            .with_claims(Claims {
                symmetric: true,
                triangle: true,
                ..Claims::default()
            });
        let triples = vec![[vec![0.0], vec![2.0], vec![1.0]]];
        let reps = verify_premetric_axioms(&p, &triples, 1e-9).unwrap();
        let tri = reps
            .iter()
            .find(|r| r.condition_id == ConditionId::Axiom(Axiom::Triangle))
            .unwrap();
        assert!(tri.failed());
        assert_eq!(tri.witnesses[0].values, vec![0.0, 2.0, 1.0]);
        assert!(tri.witnesses[0]
            .note
            .as_deref()
            .unwrap()
            .contains("magnitude 2"));
    }

    #[test]
    fn companion_missing_is_config_error() {
        let p = Premetric::metric(Space::real_line()).with_claims(Claims {
            mixed_triangle: true,
            ..Claims::default()
        });
        let triples = vec![[vec![0.0], vec![1.0], vec![2.0]]];
        assert!(matches!(
            verify_premetric_axioms(&p, &triples, 1e-9),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            verify_premetric_axioms(&p, &[], 1e-9),
            Err(Error::Input(_))
        ));
    }
}
