//! Monic integer polynomials: arithmetic, factorization over Z,
//! cyclotomic machinery and the all-powers irreducibility certificate.

mod cyclotomic;
mod factor;
mod poly;
mod powers;

pub use cyclotomic::{
    cyclotomic, cyclotomic_via_kernel, indices_with_totient_at_most, is_quasi_unipotent, totient,
    QuasiUnipotenceCertificate,
};
pub use factor::{factor_over_z, is_irreducible};
pub use poly::{IntPoly, MonicIntPoly};
pub use powers::{
    all_powers_irreducible, ratio_polynomial, PowersIrreducibilityCertificate, PowersVerdict,
    DEFAULT_DIRECT_BOUND,
};
