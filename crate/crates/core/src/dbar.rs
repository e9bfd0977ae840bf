//! Inversion of the Cauchy-Riemann operator on `(0,1)` vector fields `u d_wbar`.

use num_complex::Complex64;

use crate::grid::{mean_complex, sup_norm_complex, ComplexField, Deriv, Grid, RealVectorField};
use crate::{Error, Result};

/// `U^{0,1} = u d_wbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField01 {
    pub u: ComplexField,
}

impl TangentField01 {
    pub fn zero(len: usize) -> Self {
        Self {
            u: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Ambient vector `Phi_*(U + conj U) = 2 Re(u d_wbar Phi)`.
    pub fn pushforward(&self, dphi_w: &[ComplexField]) -> RealVectorField {
        dphi_w
            .iter()
            .map(|pw| {
                pw.iter()
                    .zip(&self.u)
                    .map(|(p, u)| 2.0 * (u * p.conj()).re)
                    .collect()
            })
            .collect()
    }
}

/// Solves `d_w u = f` with `mean(u) = 0`.
pub fn dbar_solve(f: &[Complex64], grid: &Grid) -> Result<TangentField01> {
    let mean = mean_complex(f);
    if mean.norm() > 1e-10 * sup_norm_complex(f).max(f64::MIN_POSITIVE) {
        return Err(Error::NonSolvable { mean: mean.norm() });
    }
    Ok(solve_mean_free(f, grid))
}

/// As [`dbar_solve`] for a right-hand side known to be mean-free; any
/// round-off left in the zero mode is discarded.
pub(crate) fn solve_mean_free(f: &[Complex64], grid: &Grid) -> TangentField01 {
    let mut c = grid.forward(f);
    c[0] = Complex64::new(0.0, 0.0);
    for (idx, v) in c.iter_mut().enumerate().skip(1) {
        *v /= grid.symbol(idx, Deriv::W);
    }
    TangentField01 {
        u: grid.inverse(&c),
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    pub phi: ComplexField,
    pub residual: f64,
    /// Mean of `u` removed before solving (obstruction to a potential).
    pub removed_mode: Complex64,
}

/// Potential `phi` with `u = 2 b d_w phi` (the `h`-dual of `d phi`), together
/// with the residual of `(1/4) Delta_h^2 phi = 2 b d_wbar^2 (d_w u)`.
pub fn potential_of(field: &TangentField01, grid: &Grid) -> Potential {
    let b = grid.modulus().b;
    let removed_mode = mean_complex(&field.u);
    let mut uc = grid.forward(&field.u);
    uc[0] = Complex64::new(0.0, 0.0);
    let mut phi = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut lhs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut rhs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in 1..grid.len() {
        let mu = grid.symbol(idx, Deriv::W);
        let nu = grid.symbol(idx, Deriv::WBar);
        phi[idx] = uc[idx] / (2.0 * b * mu);
        let lap_h = 4.0 * b * mu * nu;
        lhs[idx] = 0.25 * lap_h * lap_h * phi[idx];
        rhs[idx] = 2.0 * b * nu * nu * mu * uc[idx];
    }
    let lhs = grid.inverse(&lhs);
    let rhs = grid.inverse(&rhs);
    let scale = sup_norm_complex(&lhs).max(sup_norm_complex(&rhs));
    let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let residual = if scale > 0.0 {
        sup_norm_complex(&diff) / scale
    } else {
        0.0
    };
    Potential {
        phi: grid.inverse(&phi),
        residual,
        removed_mode,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Pair {
    pub l1_u: f64,
    pub l1_dbar_u: f64,
}

/// `int |u d_wbar|_h dvol_h` and `int |(d_w u) dw (x) d_wbar|_h dvol_h`.
/// The vector norm is `|d_wbar|_h = sqrt(2 b)`; the mixed tensor has unit weight.
pub fn l1_norm_pair(field: &TangentField01, grid: &Grid) -> L1Pair {
    let b = grid.modulus().b;
    let n = field.u.len() as f64;
    let du = grid.derivative(&field.u, Deriv::W);
    L1Pair {
        l1_u: (2.0 * b).sqrt() * field.u.iter().map(|z| z.norm()).sum::<f64>() / n,
        l1_dbar_u: du.iter().map(|z| z.norm()).sum::<f64>() / n,
    }
}

/// The kinked test field `u = b min(x2, 1 - x2)` on the rectangular torus
/// `tau = i b`, i.e. `min(y, b - y)` in the Euclidean chart.
pub fn tent_field(n: usize, b: f64) -> Vec<f64> {
    (0..n * n)
        .map(|idx| {
            let x2 = (idx % n) as f64 / n as f64;
            b * x2.min(1.0 - x2)
        })
        .collect()
}

/// Trapezoidal `L^1` values for the tent field, bypassing the spectral path.
/// `d_w u = (1/2) d_y u`, with `|d_y u| = 1` almost everywhere.
pub fn tent_l1_pair(n: usize, b: f64) -> L1Pair {
    let u = tent_field(n, b);
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    L1Pair {
        l1_u: (2.0 * b).sqrt() * mean,
        l1_dbar_u: 0.5,
    }
}
