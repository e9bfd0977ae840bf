//! Library of analytic initial immersions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::{reproject_conformal, FlowState};
use crate::geometry::ImmersionField;
use crate::grid::{FlatModulus, Grid};
use crate::{Error, Result};

fn clifford_point(x: [f64; 2]) -> Vec<f64> {
    let (t1, t2) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
    vec![
        FRAC_1_SQRT_2 * t1.cos(),
        FRAC_1_SQRT_2 * t1.sin(),
        FRAC_1_SQRT_2 * t2.cos(),
        FRAC_1_SQRT_2 * t2.sin(),
    ]
}

/// `2^{-1/2}(cos 2 pi x1, sin 2 pi x1, cos 2 pi x2, sin 2 pi x2)` at `tau = i`.
pub fn clifford(n: usize) -> Result<FlowState> {
    let grid = Grid::new(n, FlatModulus::square())?;
    let phi = ImmersionField::sample(&grid, 4, clifford_point)?;
    FlowState::new(phi, grid)
}

/// Product of circles of radii `r1`, `r2` in `R^4`; conformal at `tau = i r2 / r1`.
pub fn product_torus(n: usize, r1: f64, r2: f64) -> Result<FlowState> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::BadParameters("radii must be positive".into()));
    }
    let grid = Grid::new(n, FlatModulus::new(0.0, r2 / r1)?)?;
    let phi = ImmersionField::sample(&grid, 4, |x| {
        let (t1, t2) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        vec![r1 * t1.cos(), r1 * t1.sin(), r2 * t2.cos(), r2 * t2.sin()]
    })?;
    FlowState::new(phi, grid)
}

/// Torus of revolution in `R^3` with radii ratio `c = R / r > 1`, conformally
/// parametrized: `x1` follows the meridian through `d sigma = d phi / (c + cos phi)`
/// and `x2` the rotation, which gives `tau = i sqrt(c^2 - 1)`.
pub fn revolution(n: usize, c: f64) -> Result<FlowState> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::BadParameters(format!("c_over_r = {c} must exceed 1")));
    }
    let b = (c * c - 1.0).sqrt();
    let k = ((c + 1.0) / (c - 1.0)).sqrt();
    let grid = Grid::new(n, FlatModulus::new(0.0, b)?)?;
    let phi = ImmersionField::sample(&grid, 3, |x| {
        let s = PI * x[0];
        let (sn, cs) = s.sin_cos();
        let den = cs * cs + k * k * sn * sn;
        let cos_phi = (cs * cs - k * k * sn * sn) / den;
        let sin_phi = 2.0 * k * sn * cs / den;
        let theta = 2.0 * PI * x[1];
        let rho = c + cos_phi;
        vec![rho * theta.cos(), rho * theta.sin(), sin_phi]
    })?;
    FlowState::new(phi, grid)
}

/// Random trigonometric polynomial with modes `|k_i| <= kmax` and coefficient
/// envelope `rho^{|k1| + |k2|}`, scaled so that its coefficient sum is 1 (an
/// upper bound for the sup norm that does not depend on the grid).
fn random_field(grid: &Grid, rng: &mut ChaCha8Rng, kmax: i32, rho: f64) -> Vec<f64> {
    let mut terms = Vec::new();
    let mut total = 0.0;
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            let w = rho.powi(k1.abs() + k2.abs());
            let (a, b) = (w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0));
            total += f64::abs(a) + f64::abs(b);
            terms.push((k1 as f64, k2 as f64, a, b));
        }
    }
    (0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            terms
                .iter()
                .map(|(k1, k2, a, b)| {
                    let p = 2.0 * PI * (k1 * x[0] + k2 * x[1]);
                    a * p.cos() + b * p.sin()
                })
                .sum::<f64>()
                / total
        })
        .collect()
}

/// Spectral content of a random normal perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub seed: u64,
    pub amplitude: f64,
    pub kmax: i32,
    pub rho: f64,
}

impl Perturbation {
    /// Smooth low-mode perturbation: `|k_i| <= 3`, envelope `2^{-|k|_1}`.
    pub fn smooth(seed: u64, amplitude: f64) -> Self {
        Self {
            seed,
            amplitude,
            kmax: 3,
            rho: 0.5,
        }
    }
}

/// Clifford torus plus `amplitude` times a random normal field, made conformal again.
pub fn clifford_perturbed(n: usize, seed: u64, amplitude: f64) -> Result<FlowState> {
    clifford_with(n, &Perturbation::smooth(seed, amplitude))
}

pub fn clifford_with(n: usize, p: &Perturbation) -> Result<FlowState> {
    reproject_conformal(&clifford_perturbed_raw(n, p)?)
}

/// The perturbed Clifford torus before reprojection (not conformal).
pub fn clifford_perturbed_raw(n: usize, p: &Perturbation) -> Result<FlowState> {
    if !(p.amplitude.is_finite() && p.amplitude.abs() < 0.2) {
        return Err(Error::BadParameters(format!(
            "amplitude {} must be below 0.2",
            p.amplitude
        )));
    }
    if !(p.kmax >= 0 && p.rho > 0.0 && p.rho <= 1.0) {
        return Err(Error::BadParameters("bad perturbation spectrum".into()));
    }
    let grid = Grid::new(n, FlatModulus::square())?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let f = random_field(&grid, &mut rng, p.kmax, p.rho);
    let g = random_field(&grid, &mut rng, p.kmax, p.rho);
    let mut phi = vec![vec![0.0; grid.len()]; 4];
    for i in 0..grid.len() {
        let c = clifford_point(grid.node(i));
        // Unit normals of the Clifford torus: c itself and its reflection.
        let q = [c[0], c[1], -c[2], -c[3]];
        let (s, t) = (p.amplitude * f[i], p.amplitude * g[i]);
        for k in 0..4 {
            phi[k][i] = c[k] * (1.0 + s) + t * q[k];
        }
    }
    FlowState::new(ImmersionField::new(phi)?, grid)
}

/// Clifford torus precomposed with the diffeomorphism
/// `x -> x + s (sin 2 pi x2, sin 2 pi x1) / (2 pi)`, still at `tau = i`.
pub fn clifford_sheared(n: usize, s: f64) -> Result<FlowState> {
    let grid = Grid::new(n, FlatModulus::square())?;
    let phi = ImmersionField::sample(&grid, 4, |x| {
        let y = [
            x[0] + s * (2.0 * PI * x[1]).sin() / (2.0 * PI),
            x[1] + s * (2.0 * PI * x[0]).sin() / (2.0 * PI),
        ];
        clifford_point(y)
    })?;
    FlowState::new(phi, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compute_geometry, willmore_energy};

    #[test]
    fn revolution_is_conformal_at_sqrt2() {
        let s = revolution(64, 2f64.sqrt()).unwrap();
        assert!((s.modulus().b - 1.0).abs() < 1e-15);
        let b = compute_geometry(&s.phi, &s.grid).unwrap();
        assert!(b.defect_sup() < 1e-8, "{}", b.defect_sup());
        assert!((willmore_energy(&b) / (2.0 * PI * PI) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn product_torus_is_conformal() {
        let s = product_torus(16, 1.0, 1.7).unwrap();
        let b = compute_geometry(&s.phi, &s.grid).unwrap();
        assert!(b.defect_sup() < 1e-13);
    }

    #[test]
    fn bad_parameters() {
        assert!(revolution(16, 0.9).is_err());
        assert!(product_torus(16, -1.0, 1.0).is_err());
    }
}
