//! Numerical check of the limit lemma: if `F(alpha_n) <= psi(F(beta_n))`,
//! `alpha_n, beta_n -> gamma` and `beta_n >= gamma`, then `gamma = 0`.

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::gauge::{check_regularity, require_profile, Gauge, GaugeFamily, Grid};
use crate::math::{strictly_less, tail_start};
use crate::report::{CertificateReport, ConditionId, Regularity, Verdict, Witness};

/// Iterates searched for `psi_nu(t) < t` under E2.
const E2_NU: usize = 64;

/// `psi` for E1 (`psi(t) < t`) or a family for E2 (`psi` nondecreasing and
/// some `psi_nu(t) < t`); under E2 the inequality uses `psi_1`.
#[derive(Debug, Clone)]
pub enum PsiSpec {
    E1(Gauge),
    E2(GaugeFamily),
}

fn not_applicable(id: ConditionId, reason: String, w: Witness) -> CertificateReport {
    CertificateReport::new(
        id,
        Verdict::Inconclusive,
        format!("not applicable: {}", reason),
    )
    .with_witness(w)
}

/// Verifies the hypotheses on the supplied data, then asserts `gamma <= eta`.
///
/// `F` must declare and pass continuity and monotonicity (otherwise a
/// precondition error). A violated hypothesis of the lemma yields an
/// inconclusive report marked "not applicable"; a fail means the data meet
/// every hypothesis yet `gamma > eta`. Convergence is judged on the last
/// quarter of each sequence against `limit_tol`.
pub fn check_e_conditions(
    f: &Gauge,
    psi: &PsiSpec,
    alpha: &[f64],
    beta: &[f64],
    gamma: f64,
    eta: f64,
    limit_tol: f64,
) -> Result<CertificateReport> {
    let id = match psi {
        PsiSpec::E1(_) => ConditionId::E1,
        PsiSpec::E2(_) => ConditionId::E2,
    };
    require_profile(
        f,
        &[Regularity::Continuous, Regularity::Nondecreasing],
        &Grid::standard(f.t_max()),
        eta,
    )?;
    if alpha.len() != beta.len() || alpha.is_empty() {
        return Err(Error::Input(
            "alpha and beta must be non-empty and aligned".into(),
        ));
    }
    let psi1 = |t: f64| -> Result<f64> {
        match psi {
            PsiSpec::E1(g) => g.eval(t),
            PsiSpec::E2(fam) => crate::gauge::iterate_gauge(fam, 1, t),
        }
    };
    // property of psi
    match psi {
        PsiSpec::E1(g) => {
            let grid = Grid::standard(g.t_max());
            let r = check_regularity(g, Regularity::StrictlyBelowIdentity, &grid, eta);
            if !r.passed() {
                let w = r.witnesses.into_iter().next().unwrap_or_default();
                return Ok(not_applicable(id, "psi(t) < t fails".into(), w));
            }
        }
        PsiSpec::E2(fam) => {
            if let Some(base) = fam.base() {
                let grid = Grid::standard(base.t_max());
                let r = check_regularity(base, Regularity::Nondecreasing, &grid, eta);
                if !r.passed() {
                    let w = r.witnesses.into_iter().next().unwrap_or_default();
                    return Ok(not_applicable(id, "psi is not nondecreasing".into(), w));
                }
            }
            let grid = Grid::standard(
                fam.base()
                    .map_or(crate::gauge::DEFAULT_T_MAX, |b| b.t_max()),
            );
            for &t in grid.points().iter().filter(|t| **t > eta) {
                let vals = fam.values(t, E2_NU.min(fam.len()))?;
                if !vals.iter().any(|v| strictly_less(*v, t, eta)) {
                    return Ok(not_applicable(
                        id,
                        format!("no nu <= {} gives psi_nu(t) < t", E2_NU),
                        Witness::new().values(&[t]),
                    ));
                }
            }
        }
    }
    for (n, (a, b)) in alpha.iter().zip(beta).enumerate() {
        let lhs = f.eval(*a)?;
        let rhs = psi1(f.eval(*b)?)?;
        if lhs > rhs + eta {
            return Ok(not_applicable(
                id,
                format!("F(alpha_n) <= psi(F(beta_n)) fails at n = {}", n),
                Witness::new().indices(&[n]).values(&[lhs, rhs]),
            ));
        }
        if *b < gamma - eta {
            return Ok(not_applicable(
                id,
                format!("beta_n >= gamma fails at n = {}", n),
                Witness::new().indices(&[n]).values(&[*b, gamma]),
            ));
        }
    }
    let tail = |v: &[f64]| {
        v[tail_start(v.len())..]
            .iter()
            .map(|x| (x - gamma).abs())
            .fold(0.0, f64::max)
    };
    let (ta, tb) = (tail(alpha), tail(beta));
    if ta > limit_tol || tb > limit_tol {
        return Ok(not_applicable(
            id,
            format!("sequences do not approach gamma within {:e}", limit_tol),
            Witness::new().values(&[ta, tb]),
        ));
    }
    let verdict = if gamma <= eta {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CertificateReport::new(
        id,
        verdict,
        format!(
            "hypotheses hold on {} terms (tails {:e}, {:e}); conclusion gamma = {} against slack {:e}",
            alpha.len(),
            ta,
            tb,
            gamma,
            eta
        ),
    )
    .with_witness(Witness::new().values(&[gamma])))
}
