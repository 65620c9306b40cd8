//! The cone `Sigma`, the sets `A_alpha` and `K_alpha`, reduced polynomials
//! `Q_alpha` with their nilpotence indices, and the M-functional.

mod basis;
mod cone;
mod lemmas;
mod sets;
pub mod simplex;

pub use basis::{ReducedBasis, ReducedPolynomial};
pub use cone::{Certificate, ConeSigma};
pub use lemmas::{
    check_critical_case, check_l1, check_m_a_alpha, check_m_alpha_sigma, check_nilpotence_bounds,
    cone_descriptions_agree, in_f_alpha, m_functional, verify_stability, CheckReport, StabilityReport,
};
pub use sets::{a_minus_sigma_nonneg, a_set, compute_power_sets, in_a_minus_sigma, PowerSets};
