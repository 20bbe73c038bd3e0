//! Three-valued checkers for the asymptotic conditions on sequences (C1-C9),
//! on mappings (D1-D4), the `(F, psi)`-contraction inequality, cyclic
//! structure and the p-controls-d uniqueness hypothesis.
//!
//! Searches over `eps`, `delta` and `nu` are bounded by a [`SearchBudget`].
//! Conditions of the form "for each eps there is delta" pass when a witness
//! was found for every probed `eps`, and fail when some `eps` defeats every
//! `delta` down to the smallest candidate.

mod acf;
mod asf;
mod asmk;
mod contraction;
mod engine;
mod structure;

pub use acf::{check_acf_mapping, check_banach_rate, BANACH_MARGIN};
pub use asf::{check_asf1, check_asf2, check_c5};
pub use asmk::{check_asmk, AsmkVariant};
pub use contraction::{check_f_psi_contraction, compute_m, verify_ineqfp, verify_point_steps, ContractionProfile};
pub use engine::{eps_schedule, GapMatrix};
pub use structure::{check_cyclic, check_p_controls_d};
