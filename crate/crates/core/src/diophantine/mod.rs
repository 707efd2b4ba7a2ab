//! Diophantine tools: closed forms for unipotent powers, small values of
//! real polynomials at integers, and badly approximable points for growing
//! sequences.

mod cook;
mod growth;
mod lacunary;
mod power;

pub use cook::{cook_search, CookGridPoint, CookResult, COOK_GRID};
pub use growth::{eigen_growth_sequence, expanding_complex_eigen, GrowthSequence};
pub use lacunary::{
    badly_approximable, lacunary_badly_approximable, verify_badly_approximable, Attempt,
    BadlyApproxCertificate, BuilderOptions, Growth, Term,
};
pub use power::{
    binomial, is_upper_unitriangular, orbit_phase_polys, unipotent_normal_form,
    unipotent_power_polys, BinomialPoly, PowerPolys, UnipotentNormalForm,
};

use serde::{Serialize, Serializer};

use crate::numeric::{format_real, is_zero_real, to_f64, Real};

/// Real polynomial with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    pub coeffs: Vec<Real>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<Real>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| is_zero_real(c)) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| is_zero_real(c))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }
}

impl Serialize for RealPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| format_real(c, 20)).collect();
        v.serialize(s)
    }
}

