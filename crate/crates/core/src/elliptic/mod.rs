//! Elliptic integrals, Jacobi elliptic functions (real and complex argument),
//! the Jacobi zeta function and the Jacobi theta functions.

mod carlson;
mod jacobi;
mod modulus;
mod theta;
mod zeta;

pub use carlson::{carlson_rd, carlson_rf, carlson_rf_complex, incomplete_e, incomplete_f};
pub use jacobi::{inverse_sn, jacobi, jacobi_real, JacobiTriple};
pub use modulus::{complete_integrals, make_modulus, EllipticModulus};
pub use theta::{theta_suite, theta_suite_complex, ThetaSuite};
pub use zeta::{jacobi_zeta, jacobi_zeta_real};
