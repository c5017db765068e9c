//! Linear systems, Riccati equations, closed-form rod transfer matrices and
//! the search for closing spectral parameters.

pub mod closed_form;
pub mod floquet;
pub mod linear;
pub mod riccati;
pub mod su2;

use serde::{Deserialize, Serialize};

use crate::C64;

pub use closed_form::{
    a_from_nu, beta_rod_closed_form, eigenvectors_vpm, riccati_rod_closed_form,
    transfer_eigenvalues, transfer_matrix_rod, transfer_matrix_rod_numeric, Eigenvectors,
};
pub use floquet::{
    find_floquet_roots, refine_floquet_root, FloquetRoot, RootKind, RootRecord, RootSearch, SearchBox,
};
pub use linear::{gauge_matrix, Gauge, M2, V2};
pub use riccati::{
    beta_solve, integrate_linear_system, riccati_solve, FundamentalSolution, SpectralSolution,
};

/// The spectral parameter in its several normalizations: sigma = 2 i nu,
/// lambda = nu for the Backlund eigenvalue, and C = nu when nu is real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub lambda: C64,
    pub nu: C64,
    pub sigma: C64,
    #[serde(rename = "C")]
    pub c: Option<f64>,
}

impl SpectralParam {
    pub fn from_nu(nu: C64) -> Self {
        SpectralParam {
            lambda: nu,
            nu,
            sigma: nu * C64::new(0.0, 2.0),
            c: (nu.im == 0.0).then_some(nu.re),
        }
    }

    pub fn from_sigma(sigma: C64) -> Self {
        Self::from_nu(sigma * C64::new(0.0, -0.5))
    }

    /// Single-transformation constant: nu = C real.
    pub fn from_c(c: f64) -> Self {
        Self::from_nu(C64::new(c, 0.0))
    }

    /// lambda = -i tau, where the linear system reconstructs the curve.
    pub fn curve_reconstruction(tau: f64) -> Self {
        Self::from_nu(C64::new(0.0, -tau))
    }
}
