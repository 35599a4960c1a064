//! Spectrum of the sphere's GJMS operator on spherical harmonics, in exact integers.

use crate::constants::ExactConstants;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectralCheck {
    pub m: u32,
    pub k_index: u32,
    /// `λ_k = k(k + 2m - 1)`.
    pub lambda: i128,
    /// `Π_{j<m} (λ_k + j(2m - j - 1))`.
    pub product: i128,
    pub t_m: i128,
    pub matches: bool,
}

pub fn sphere_spectral_check(m: u32, k_index: u32) -> Result<SpectralCheck> {
    if m == 0 || m > 6 {
        return Err(Error::InvalidOrder(m as i64));
    }
    if k_index > 10 {
        return Err(Error::IndexOutOfRange(format!("k_index {k_index} > 10")));
    }
    let (mi, k) = (m as i128, k_index as i128);
    let lambda = k * (k + 2 * mi - 1);
    let product = (0..mi).map(|j| lambda + j * (2 * mi - j - 1)).product();
    let t_m = ExactConstants::for_order(m)?.tm;
    Ok(SpectralCheck { m, k_index, lambda, product, t_m, matches: product == t_m })
}

/// All checks for `1 ≤ m ≤ m_max`, `0 ≤ k ≤ k_max`.
pub fn spectral_table(m_max: u32, k_max: u32) -> Result<Vec<SpectralCheck>> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        for k in 0..=k_max {
            out.push(sphere_spectral_check(m, k)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let c = sphere_spectral_check(1, 1).unwrap();
        assert_eq!((c.lambda, c.product, c.t_m, c.matches), (2, 2, 2, true));
        let c = sphere_spectral_check(2, 1).unwrap();
        assert_eq!((c.lambda, c.product, c.t_m), (4, 24, 24));
        let c = sphere_spectral_check(2, 2).unwrap();
        assert_eq!((c.lambda, c.product, c.matches), (10, 120, false));
    }

    #[test]
    fn match_iff_first_harmonics() {
        for c in spectral_table(6, 10).unwrap() {
            assert_eq!(c.matches, c.k_index == 1, "{c:?}");
        }
    }
}
