//! First variation of the Willmore energy in conservative chart form, and the
//! Codazzi-Mainardi residual checks.

use num_complex::Complex64;

use crate::geometry::GeometryBundle;
use crate::grid::{ComplexVectorField, Deriv, RealVectorField};

#[derive(Debug, Clone)]
pub struct WillmoreGradient {
    /// `delta W = -4 e^{-2 lambda} Re d_wbar[flux]`; the flow velocity direction.
    pub delta_w: RealVectorField,
    /// `d_w H + |H|^2 d_w Phi + 2 (H.H0) d_wbar Phi`.
    pub assembled_flux: ComplexVectorField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodazziResidual {
    pub r1: f64,
    pub r2: f64,
}

fn to_complex(f: &[f64]) -> Vec<Complex64> {
    f.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `d_w` of each component of `H`, dealiased.
fn dh_w(bundle: &GeometryBundle) -> ComplexVectorField {
    bundle
        .h
        .iter()
        .map(|c| bundle.grid.derivative_dealiased(&to_complex(c), Deriv::W))
        .collect()
}

/// Bilinear `H . H0` at every node.
fn h_dot_h0(bundle: &GeometryBundle) -> Vec<Complex64> {
    (0..bundle.grid.len())
        .map(|i| {
            bundle
                .h
                .iter()
                .zip(&bundle.h0)
                .map(|(h, h0)| h0[i] * h[i])
                .sum()
        })
        .collect()
}

pub fn willmore_gradient(bundle: &GeometryBundle) -> WillmoreGradient {
    let grid = &bundle.grid;
    let len = grid.len();
    let dh = dh_w(bundle);
    let hh0 = h_dot_h0(bundle);
    let hsq = bundle.h_sq();
    let mut flux = Vec::with_capacity(bundle.m());
    let mut delta_w = Vec::with_capacity(bundle.m());
    for c in 0..bundle.m() {
        let pw = &bundle.dphi_w[c];
        let f: Vec<Complex64> = (0..len)
            .map(|i| dh[c][i] + pw[i] * hsq[i] + 2.0 * hh0[i] * pw[i].conj())
            .collect();
        let d = grid.derivative_dealiased(&f, Deriv::WBar);
        delta_w.push(
            (0..len)
                .map(|i| -4.0 * (-2.0 * bundle.lambda[i]).exp() * d[i].re)
                .collect(),
        );
        flux.push(f);
    }
    WillmoreGradient {
        delta_w,
        assembled_flux: flux,
    }
}

/// L2(dvol_g) pairing of two ambient vector fields.
pub fn pairing(bundle: &GeometryBundle, a: &RealVectorField, b: &RealVectorField) -> f64 {
    let f: Vec<f64> = (0..bundle.grid.len())
        .map(|i| a.iter().zip(b).map(|(x, y)| x[i] * y[i]).sum())
        .collect();
    bundle.integrate(&f)
}

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

/// Residuals of the conformal-chart Codazzi identity for the Weingarten
/// coefficient `A = e^{-2 lambda} d_wwbar Phi . pi_n d_ww Phi`, and of the
/// pointwise bound on `dbar[(H . f0) d_wbar Phi]`, each scaled by the size of
/// its terms.
pub fn codazzi_residual(bundle: &GeometryBundle) -> CodazziResidual {
    let grid = &bundle.grid;
    let len = grid.len();
    let m = bundle.m();
    let b = grid.modulus().b;
    let sigma: Vec<f64> = (0..len).map(|i| bundle.sigma(i)).collect();
    // pi_n d_ww Phi = (e^{2 lambda} / 2) H0.
    let n_ww: ComplexVectorField = (0..m)
        .map(|c| (0..len).map(|i| 0.5 * sigma[i] * bundle.h0[c][i]).collect())
        .collect();
    let a_coef: Vec<Complex64> = (0..len)
        .map(|i| {
            let s: Complex64 = (0..m).map(|c| n_ww[c][i] * bundle.dphi_wwbar[c][i]).sum();
            s / sigma[i]
        })
        .collect();
    let lhs = grid.derivative_dealiased(&a_coef, Deriv::WBar);
    let dh = dh_w(bundle);
    let dhb: ComplexVectorField = dh.iter().map(|c| c.iter().map(|z| z.conj()).collect()).collect();

    let mut r1 = 0.0f64;
    let mut scale1 = 0.0f64;
    for i in 0..len {
        let t1: Complex64 = (0..m).map(|c| 0.5 * dhb[c][i] * n_ww[c][i]).sum();
        let t2: Complex64 = (0..m).map(|c| 0.25 * sigma[i] * dh[c][i] * bundle.h[c][i]).sum();
        r1 = r1.max((lhs[i] - t1 - t2).norm());
        scale1 = scale1.max(lhs[i].norm()).max(t1.norm()).max(t2.norm());
    }
    let hsq = bundle.h_sq();
    let curv_scale = sup((0..len).map(|i| (sigma[i] * hsq[i]).powf(1.5)));
    let r1 = r1 / scale1.max(curv_scale).max(f64::MIN_POSITIVE);

    // f0 = H0/2 is the (2,0) Weingarten coefficient; dbar of (H.f0) d_wbar Phi.
    let hf0: Vec<Complex64> = (0..len)
        .map(|i| (0..m).map(|c| 0.5 * bundle.h0[c][i] * bundle.h[c][i]).sum())
        .collect();
    let mut lhs2 = vec![0.0; len];
    for c in 0..m {
        let v: Vec<Complex64> = (0..len).map(|i| hf0[i] * bundle.dphi_w[c][i].conj()).collect();
        let d = grid.derivative_dealiased(&v, Deriv::WBar);
        for i in 0..len {
            lhs2[i] += d[i].norm_sqr();
        }
    }
    let mut r2 = 0.0f64;
    let mut scale2 = 0.0f64;
    for i in 0..len {
        let lhs = b * lhs2[i].sqrt();
        let e_alpha = sigma[i].sqrt() * b.sqrt();
        let f0 = (0..m)
            .map(|c| 0.25 * bundle.h0[c][i].norm_sqr())
            .sum::<f64>()
            .sqrt();
        let dh_norm = (0..m).map(|c| dh[c][i].norm_sqr()).sum::<f64>().sqrt();
        let hn = hsq[i].sqrt();
        let rhs = e_alpha
            * (b.sqrt() * dh_norm * f0 + hn * b.sqrt() * dh_norm + 2.0 * e_alpha * hn * f0 * f0);
        r2 = r2.max(lhs - rhs);
        scale2 = scale2.max(lhs).max(rhs);
    }
    let r2 = r2.max(0.0) / scale2.max(f64::MIN_POSITIVE);
    CodazziResidual { r1, r2 }
}
