//! Concentration configurations `(ξ, μ, ε)` and the admissible set `M`.

use crate::constants::rho_from_eps;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::greens::GreenModel;
use crate::potential::Potential;
use crate::scalar::dist2;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleConfig {
    pub m: u32,
    pub xi: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub eps: f64,
    pub rho: f64,
    pub delta0: f64,
}

/// Membership in `M`: `dist(ξ_i, ∂Ω) ≥ 2δ₀` and `|ξ_i - ξ_j| ≥ 2δ₀`.
pub fn check_admissible(domain: &Domain, xi: &[Vec<f64>], delta0: f64) -> Result<()> {
    if xi.is_empty() {
        return Err(Error::InvalidConfig("at least one concentration point is required".into()));
    }
    if !(delta0 > 0.0) {
        return Err(Error::InvalidConfig("delta0 must be positive".into()));
    }
    for (i, p) in xi.iter().enumerate() {
        if p.len() != domain.dim {
            return Err(Error::InvalidConfig(format!("point {i} has dimension {}", p.len())));
        }
        let d = domain.signed_distance(p);
        if d < 2.0 * delta0 {
            return Err(Error::NotAdmissible(format!(
                "point {i} is {d:.4} from the boundary (needs {:.4})",
                2.0 * delta0
            )));
        }
        for (j, q) in xi.iter().enumerate().skip(i + 1) {
            let s = dist2(p, q).sqrt();
            if s < 2.0 * delta0 {
                return Err(Error::NotAdmissible(format!(
                    "points {i} and {j} are {s:.4} apart (needs {:.4})",
                    2.0 * delta0
                )));
            }
        }
    }
    Ok(())
}

/// Heights `2m log μ_i = H(ξ_i, ξ_i) + log V(ξ_i) + Σ_{j≠i} G(ξ_j, ξ_i)`.
pub fn select_mu(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>]) -> Result<Vec<f64>> {
    let two_m = 2.0 * green.m as f64;
    (0..xi.len())
        .map(|i| {
            let mut s = green.robin(&xi[i])? + potential.log_value(&xi[i])?;
            for (j, q) in xi.iter().enumerate() {
                if j != i {
                    s += green.green(q, &xi[i])?;
                }
            }
            let mu = (s / two_m).exp();
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::NotAdmissible(format!("height of bubble {i} is not finite")));
            }
            Ok(mu)
        })
        .collect()
}

impl BubbleConfig {
    pub fn new(m: u32, xi: Vec<Vec<f64>>, mu: Vec<f64>, eps: f64, delta0: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if xi.len() != mu.len() || xi.is_empty() {
            return Err(Error::InvalidConfig("need one height per concentration point".into()));
        }
        if mu.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidConfig("heights must be positive".into()));
        }
        Ok(Self { m, rho: rho_from_eps(m, eps), xi, mu, eps, delta0 })
    }

    /// Admissible configuration with heights chosen by [`select_mu`].
    pub fn select(green: &GreenModel, potential: &Potential, xi: Vec<Vec<f64>>, eps: f64, delta0: f64) -> Result<Self> {
        check_admissible(&green.domain, &xi, delta0)?;
        let mu = select_mu(green, potential, &xi)?;
        Self::new(green.m, xi, mu, eps, delta0)
    }

    pub fn k(&self) -> usize {
        self.xi.len()
    }

    /// `δ_i = μ_i ε`.
    pub fn delta(&self, i: usize) -> f64 {
        self.mu[i] * self.eps
    }

    /// Concentration points in the expanded frame (first two coordinates).
    pub fn xi_prime(&self) -> Vec<[f64; 2]> {
        self.xi.iter().map(|p| [p[0] / self.eps, p[1] / self.eps]).collect()
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.m, self.xi.clone(), self.mu.clone(), eps, self.delta0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_heights() {
        let g = GreenModel::unit_disc();
        let v = Potential::constant(1.0);
        assert_eq!(select_mu(&g, &v, &[vec![0.0, 0.0]]).unwrap(), vec![1.0]);
        let mu = select_mu(&g, &v, &[vec![0.5, 0.0]]).unwrap();
        assert!((mu[0] - 0.5625).abs() < 1e-14);
        let pair = select_mu(&g, &v, &[vec![0.5, 0.0], vec![-0.5, 0.0]]).unwrap();
        let expected = ((4.0 * 0.75f64.ln() + 4.0 * 1.25f64.ln()) / 2.0).exp();
        assert!((pair[0] - pair[1]).abs() < 1e-15 && (pair[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn admissibility() {
        let d = Domain::unit_disc();
        assert!(check_admissible(&d, &[vec![0.5, 0.0], vec![-0.5, 0.0]], 0.1).is_ok());
        assert!(matches!(check_admissible(&d, &[vec![0.85, 0.0]], 0.1), Err(Error::NotAdmissible(_))));
        assert!(matches!(check_admissible(&d, &[vec![0.1, 0.0], vec![0.2, 0.0]], 0.1), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn rho_relation() {
        let c = BubbleConfig::new(1, vec![vec![0.0, 0.0]], vec![1.0], 0.1, 0.1).unwrap();
        assert!((c.rho.powi(2) - 8.0 * 0.01 / 1.01f64.powi(2)).abs() < 1e-15);
    }
}
