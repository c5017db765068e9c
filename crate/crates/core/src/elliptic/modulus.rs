use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// An elliptic modulus `p` together with its complete integrals and theta nome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus {
    pub p: f64,
    pub p_prime: f64,
    /// K(p)
    pub complete_k: f64,
    /// E(p)
    pub complete_e: f64,
    /// K(p')
    pub complete_k_prime: f64,
    /// E(p')
    pub complete_e_prime: f64,
    /// q = exp(-pi K'/K)
    pub q_nome: f64,
}

/// Complete integrals (K, E) of modulus `k` by the arithmetic-geometric mean.
pub fn complete_integrals(k: f64) -> (f64, f64) {
    let mut a = 1.0f64;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut weight = 0.5;
    let mut sum = weight * k * k;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() <= 1e-17 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let kk = PI / (2.0 * a);
    (kk, kk * (1.0 - sum))
}

pub fn make_modulus(p: f64) -> Result<EllipticModulus> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("elliptic modulus p = {p} outside (0, 1)")));
    }
    let p_prime = ((1.0 - p) * (1.0 + p)).sqrt();
    let (complete_k, complete_e) = complete_integrals(p);
    let (complete_k_prime, complete_e_prime) = complete_integrals(p_prime);
    let q_nome = (-PI * complete_k_prime / complete_k).exp();
    Ok(EllipticModulus {
        p,
        p_prime,
        complete_k,
        complete_e,
        complete_k_prime,
        complete_e_prime,
        q_nome,
    })
}

impl EllipticModulus {
    /// Residual of Legendre's relation E K' + E' K - K K' = pi/2.
    pub fn legendre_residual(&self) -> f64 {
        self.complete_e * self.complete_k_prime + self.complete_e_prime * self.complete_k
            - self.complete_k * self.complete_k_prime
            - FRAC_PI_2
    }

    pub fn m(&self) -> f64 {
        self.p * self.p
    }
}
