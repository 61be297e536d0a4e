//! Special functions used by the closed-form propagators.

mod erf;
mod hermite;
mod theta;

pub use erf::{erf_complex, erfc_complex, erfcx_complex, exp_erfc, faddeeva};
pub use hermite::{hermite_p, hermite_p_all, MAX_HERMITE_ORDER};
pub use theta::{theta3, theta3_jet, ThetaArgs};
