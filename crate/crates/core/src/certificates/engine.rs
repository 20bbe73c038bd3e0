//! Search loops shared by the trace-level and mapping-level checkers.
//!
//! Sequence conditions (C1-C3, D2, D3) work on gap sequences
//! `g(i) = p(x_i, y_i)`; single-sequence conditions (C4, C5, D4) work on a
//! [`GapMatrix`] `g(i, j) = p(x_i, x_j)`.

use alloc::format;
use alloc::vec::Vec;

use crate::math::{at_most, strictly_less, tail_start};
use crate::premetric::Premetric;
use crate::report::{SearchBudget, Verdict, Witness};

/// `eps` values to probe: the grid, then up to `budget.probes` values just
/// below observed gaps.
///
/// A probe sits at `g - min(delta_min, g) / 16`, so every `delta` candidate
/// puts `g` inside the band `(eps, eps + delta)`. Without probes a sequence
/// whose gaps never move (translation, periodic orbits) would slip through
/// the grid.
pub fn eps_schedule(
    budget: &SearchBudget,
    observed: impl IntoIterator<Item = f64>,
) -> Vec<(f64, bool)> {
    let mut out: Vec<(f64, bool)> = budget.eps_grid.iter().map(|e| (*e, false)).collect();
    if budget.probes == 0 {
        return out;
    }
    let floor = 10.0 * budget.slack;
    let mut gaps: Vec<f64> = observed
        .into_iter()
        .filter(|g| g.is_finite() && *g > floor)
        .collect();
    gaps.sort_by(f64::total_cmp);
    gaps.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    if gaps.is_empty() {
        return out;
    }
    let k = budget.probes.min(gaps.len());
    let dmin = budget.smallest_delta();
    for r in 0..k {
        // evenly spaced ranks, always including the largest gap
        let idx = if k == 1 {
            gaps.len() - 1
        } else {
            r * (gaps.len() - 1) / (k - 1)
        };
        let g = gaps[idx];
        let eps = g - dmin.min(g) / 16.0;
        if eps > 0.0 && !out.iter().any(|(e, _)| *e == eps) {
            out.push((eps, true));
        }
    }
    out
}

fn probe_note(w: Witness, probe: bool) -> Witness {
    if probe {
        w.note("eps probe below an observed gap")
    } else {
        w
    }
}

/// Outcome of one condition: verdict and witnesses.
pub(crate) struct Outcome {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
        }
    }

    fn pass(&mut self, w: Witness) {
        self.witnesses.push(w);
    }

    fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fail;
        self.witnesses.push(w);
    }

    fn exhausted(&mut self, w: Witness) {
        self.verdict = self.verdict.and(Verdict::Inconclusive);
        self.witnesses.push(w);
    }
}

/// `max` of the last quarter of `g`.
pub(crate) fn tail_limsup(g: &[f64]) -> f64 {
    g[tail_start(g.len())..].iter().copied().fold(0.0, f64::max)
}

/// C1 on one gap sequence: for each `eps` some `delta` such that an index
/// `i <= H` with `g(i) < delta` forces the tail limsup to be `<= eps`.
pub(crate) fn c1(g: &[f64], budget: &SearchBudget) -> Outcome {
    let h = budget.index_horizon.min(g.len() - 1);
    let limsup = tail_limsup(g);
    let mut out = Outcome::new();
    for &eps in &budget.eps_grid {
        let mut found = None;
        let mut defeat = None;
        for &delta in &budget.delta_candidates {
            let hit = (0..=h).find(|&i| g[i] < delta);
            match hit {
                Some(i) if !at_most(limsup, eps, budget.slack) => defeat = Some(i),
                _ => {
                    found = Some((delta, hit));
                    break;
                }
            }
        }
        match (found, defeat) {
            (Some((delta, hit)), _) => {
                let w = Witness::new().eps(eps).delta(delta).values(&[limsup]);
                out.pass(match hit {
                    Some(i) => w.indices(&[i]),
                    None => w.note("no index below delta"),
                });
            }
            (None, Some(i)) => out.fail(
                Witness::new()
                    .eps(eps)
                    .delta(budget.smallest_delta())
                    .indices(&[i])
                    .values(&[g[i], limsup])
                    .note("tail limsup exceeds eps at the smallest delta"),
            ),
            (None, None) => unreachable!(),
        }
    }
    out
}

/// C2 (and D2) over several gap sequences at once: for each `eps`, a `delta`
/// such that every start `i <= starts` of every sequence with
/// `eps < g(i) < eps + delta` reaches `g(nu + i) <= eps` for some
/// `1 <= nu <= nu_horizon`.
///
/// When every `delta` is defeated the verdict is fail if the defeating gap
/// never strictly decreased within the horizon, and inconclusive if it was
/// still shrinking (the horizon, not the sequence, ran out).
pub(crate) fn c2(seqs: &[Vec<f64>], starts: usize, budget: &SearchBudget) -> Outcome {
    let observed = seqs
        .iter()
        .flat_map(|g| g[..=starts.min(g.len() - 1)].iter().copied());
    let schedule = eps_schedule(budget, observed);
    let mut out = Outcome::new();
    for (eps, probe) in schedule {
        let mut defeat = None;
        let mut found = None;
        'delta: for &delta in &budget.delta_candidates {
            let mut max_nu = 0;
            for (k, g) in seqs.iter().enumerate() {
                let h = starts.min(g.len() - 1);
                for i in 0..=h {
                    if !(eps < g[i] && g[i] < eps + delta) {
                        continue;
                    }
                    let future = || (1..=budget.nu_horizon).take_while(|nu| nu + i < g.len());
                    match future().find(|nu| at_most(g[nu + i], eps, budget.slack)) {
                        Some(nu) => max_nu = max_nu.max(nu),
                        None => {
                            let least = future().map(|nu| g[nu + i]).fold(f64::INFINITY, f64::min);
                            let stalled = !strictly_less(least, g[i], budget.slack);
                            defeat = Some((k, i, g[i], least, stalled));
                            continue 'delta;
                        }
                    }
                }
            }
            found = Some((delta, max_nu));
            break;
        }
        match found {
            Some((delta, nu)) => {
                let w = Witness::new().eps(eps).delta(delta);
                let w = if nu == 0 {
                    w.note("band empty")
                } else {
                    w.nu(nu)
                };
                out.pass(probe_note(w, probe));
            }
            None => {
                let (k, i, gi, least, stalled) = defeat.expect("defeated search records an index");
                let w = Witness::new()
                    .eps(eps)
                    .delta(budget.smallest_delta())
                    .indices(&[k, i])
                    .values(&[gi, least]);
                if stalled {
                    out.fail(w.note(format!(
                        "sequence {} index {}: the gap does not decrease within nu <= {}",
                        k, i, budget.nu_horizon
                    )));
                } else {
                    out.exhausted(w.note(format!(
                        "sequence {} index {}: the gap is shrinking but stays above eps for nu <= {}",
                        k, i, budget.nu_horizon
                    )));
                }
            }
        }
    }
    out
}

/// C3 (and D3): every start `i <= starts` with `g(i) > slack` has some `nu`
/// with `g(nu + i) < g(i)`.
pub(crate) fn c3(seqs: &[Vec<f64>], starts: usize, budget: &SearchBudget) -> Outcome {
    let mut out = Outcome::new();
    let mut max_nu = 0;
    for (k, g) in seqs.iter().enumerate() {
        let h = starts.min(g.len() - 1);
        for i in 0..=h {
            if g[i] <= budget.slack {
                continue;
            }
            let reach = (1..=budget.nu_horizon)
                .take_while(|nu| nu + i < g.len())
                .find(|nu| strictly_less(g[nu + i], g[i], budget.slack));
            match reach {
                Some(nu) => max_nu = max_nu.max(nu),
                None => {
                    let later = (1..=budget.nu_horizon)
                        .take_while(|nu| nu + i < g.len())
                        .map(|nu| g[nu + i])
                        .fold(f64::INFINITY, f64::min);
                    out.fail(
                        Witness::new()
                            .indices(&[k, i])
                            .values(&[g[i], later])
                            .note(format!(
                                "sequence {} index {}: no nu <= {} decreases the gap",
                                k, i, budget.nu_horizon
                            )),
                    );
                    return out;
                }
            }
        }
    }
    out.pass(Witness::new().nu(max_nu.max(1)));
    out
}

/// `g(i, j) = p(x_i, x_j)` for `i, j < n`.
#[derive(Debug, Clone)]
pub struct GapMatrix {
    n: usize,
    data: Vec<f64>,
    symmetric: bool,
}

impl GapMatrix {
    pub fn from_points(points: &[&[f64]], p: &Premetric) -> Self {
        let n = points.len();
        let symmetric = p.claims().symmetric;
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if symmetric && j < i {
                    data[i * n + j] = data[j * n + i];
                } else {
                    data[i * n + j] = p.eval_raw(points[i], points[j]);
                }
            }
        }
        GapMatrix { n, data, symmetric }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-budget index pairs: `i < j` when symmetric, `i != j` otherwise.
    fn pairs(&self, h: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let sym = self.symmetric;
        (0..=h).flat_map(move |i| {
            (0..=h).filter_map(move |j| {
                let keep = if sym { i < j } else { i != j };
                keep.then_some((i, j))
            })
        })
    }
}

/// C4 (and D4): for each `eps`, a `delta` and a single `nu` such that every
/// in-budget pair in the band `(eps, eps + delta)` has `g(nu + i, nu + j) <= eps`.
pub(crate) fn c4(m: &GapMatrix, budget: &SearchBudget) -> Outcome {
    let h = budget
        .index_horizon
        .min(m.len().saturating_sub(budget.nu_horizon + 1));
    let nu_max = budget.nu_horizon.min(m.len() - 1 - h);
    let mut sorted: Vec<(f64, usize, usize)> =
        m.pairs(h).map(|(i, j)| (m.get(i, j), i, j)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let schedule = eps_schedule(budget, sorted.iter().map(|s| s.0));
    let mut out = Outcome::new();
    for (eps, probe) in schedule {
        let lo = sorted.partition_point(|s| s.0 <= eps);
        let mut found = None;
        let mut defeat = None;
        for &delta in &budget.delta_candidates {
            let hi = sorted.partition_point(|s| s.0 < eps + delta);
            let band = &sorted[lo..hi.max(lo)];
            if band.is_empty() {
                found = Some((delta, None));
                break;
            }
            // largest gaps first: they are the likeliest to defeat a given nu
            let nu = (1..=nu_max).find(|&nu| {
                band.iter()
                    .rev()
                    .all(|&(_, i, j)| at_most(m.get(nu + i, nu + j), eps, budget.slack))
            });
            match nu {
                Some(nu) => {
                    found = Some((delta, Some(nu)));
                    break;
                }
                None => defeat = Some(band),
            }
        }
        match found {
            Some((delta, nu)) => {
                let w = Witness::new().eps(eps).delta(delta);
                let w = match nu {
                    Some(nu) => w.nu(nu),
                    None => w.note("band empty"),
                };
                out.pass(probe_note(w, probe));
            }
            None => {
                let band = defeat.expect("defeated search records a band");
                // prefer a pair that never decreases: it refutes rather than exhausts
                let stuck = band.iter().rev().find(|&&(g, i, j)| {
                    !(1..=nu_max).any(|nu| strictly_less(m.get(nu + i, nu + j), g, budget.slack))
                });
                let stalled = stuck.is_some();
                let &(g, i, j) = stuck.unwrap_or(band.last().unwrap());
                let shifted = (1..=nu_max)
                    .map(|nu| m.get(nu + i, nu + j))
                    .fold(f64::INFINITY, f64::min);
                let w = Witness::new()
                    .eps(eps)
                    .delta(budget.smallest_delta())
                    .indices(&[i, j])
                    .values(&[g, shifted]);
                if stalled {
                    out.fail(w.note(format!(
                        "pair never decreases under shifts nu <= {}, so no uniform nu clears the band",
                        nu_max
                    )));
                } else {
                    out.exhausted(w.note(format!(
                        "no uniform nu <= {} clears the band; gaps are still shrinking",
                        nu_max
                    )));
                }
            }
        }
    }
    out
}

/// C5: every in-budget pair with `g(i, j) > slack` strictly decreases under
/// some shift `nu <= nu_horizon`.
pub(crate) fn c5(m: &GapMatrix, budget: &SearchBudget) -> Outcome {
    let h = budget
        .index_horizon
        .min(m.len().saturating_sub(budget.nu_horizon + 1));
    let nu_max = budget.nu_horizon.min(m.len() - 1 - h);
    let mut out = Outcome::new();
    let mut worst_nu = 0;
    for (i, j) in m.pairs(h) {
        let g = m.get(i, j);
        if g <= budget.slack {
            continue;
        }
        match (1..=nu_max).find(|&nu| strictly_less(m.get(nu + i, nu + j), g, budget.slack)) {
            Some(nu) => worst_nu = worst_nu.max(nu),
            None => {
                out.fail(
                    Witness::new()
                        .indices(&[i, j])
                        .values(&[g])
                        .note(format!("no nu <= {} decreases the gap", nu_max)),
                );
                return out;
            }
        }
    }
    out.pass(Witness::new().nu(worst_nu.max(1)));
    out
}
