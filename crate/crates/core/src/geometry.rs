//! Pointwise first and second order geometry of an immersion in the chart `w`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::{ComplexVectorField, Deriv, FlatModulus, Grid, RealField, RealVectorField};
use crate::{Error, Result};

/// Nodal samples of `Phi : T^2 -> R^m`, component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionField {
    pub phi: RealVectorField,
}

impl ImmersionField {
    pub fn new(phi: RealVectorField) -> Result<Self> {
        if phi.len() < 3 {
            return Err(Error::BadParameters(format!(
                "ambient dimension {} must be at least 3",
                phi.len()
            )));
        }
        let len = phi[0].len();
        if len == 0 || phi.iter().any(|c| c.len() != len) {
            return Err(Error::BadParameters("ragged immersion components".into()));
        }
        Ok(Self { phi })
    }

    /// Samples `f` on the grid nodes.
    pub fn sample<F: Fn([f64; 2]) -> Vec<f64>>(grid: &Grid, m: usize, f: F) -> Result<Self> {
        let mut phi = vec![vec![0.0; grid.len()]; m];
        for idx in 0..grid.len() {
            let v = f(grid.node(idx));
            for c in 0..m {
                phi[c][idx] = v[c];
            }
        }
        Self::new(phi)
    }

    pub fn m(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.phi[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.phi.iter().map(|c| c[idx]).collect()
    }
}

/// Everything derived pointwise from `Phi` that the flow and diagnostics need.
#[derive(Debug, Clone)]
pub struct GeometryBundle {
    pub grid: Grid,
    pub dphi_w: ComplexVectorField,
    pub dphi_ww: ComplexVectorField,
    pub dphi_wwbar: RealVectorField,
    /// `e^{2 lambda} = 2 |d_w Phi|^2`.
    pub lambda: RealField,
    pub alpha: RealField,
    pub q: Vec<Complex64>,
    pub h: RealVectorField,
    pub h0: ComplexVectorField,
    /// Orthonormal tangent frame; `pi_n = I - e1 e1^T - e2 e2^T`.
    pub e1: RealVectorField,
    pub e2: RealVectorField,
    pub k_gauss: RealField,
    pub sff_sq: RealField,
    /// `sqrt(det g)` in the chart; `dvol_g = area_density * dA_w`.
    pub area_density: RealField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentities {
    pub gauss_bonnet_defect: f64,
    pub sff_energy: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_normal(v: &mut [f64], e1: &[f64], e2: &[f64]) {
    let (p1, p2) = (dot(v, e1), dot(v, e2));
    for c in 0..v.len() {
        v[c] -= p1 * e1[c] + p2 * e2[c];
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

struct NodeGeometry {
    sigma: f64,
    q: Complex64,
    det: f64,
    h: Vec<f64>,
    h0: Vec<Complex64>,
    e1: Vec<f64>,
    e2: Vec<f64>,
    sff_sq: f64,
}

fn node_geometry(dw: &[Complex64], dww: &[Complex64], dwwb: &[f64]) -> NodeGeometry {
    let m = dw.len();
    let pu: Vec<f64> = dw.iter().map(|z| 2.0 * z.re).collect();
    let pv: Vec<f64> = dw.iter().map(|z| -2.0 * z.im).collect();
    let puu: Vec<f64> = (0..m).map(|c| 2.0 * dww[c].re + 2.0 * dwwb[c]).collect();
    let pvv: Vec<f64> = (0..m).map(|c| -2.0 * dww[c].re + 2.0 * dwwb[c]).collect();
    let puv: Vec<f64> = dww.iter().map(|z| -2.0 * z.im).collect();

    let (e, f, g) = (dot(&pu, &pu), dot(&pu, &pv), dot(&pv, &pv));
    let sigma = 0.5 * (e + g);
    let q = Complex64::new(0.25 * (e - g), -0.5 * f);
    let det = e * g - f * f;

    let nu = e.sqrt();
    let e1: Vec<f64> = pu.iter().map(|x| x / nu).collect();
    let p = dot(&pv, &e1);
    let mut e2: Vec<f64> = (0..m).map(|c| pv[c] - p * e1[c]).collect();
    let n2 = dot(&e2, &e2).sqrt();
    e2.iter_mut().for_each(|x| *x /= n2);

    let mut ii = [puu, puv, pvv];
    for v in ii.iter_mut() {
        project_normal(v, &e1, &e2);
    }
    let (guu, guv, gvv) = (g / det, -f / det, e / det);
    let h: Vec<f64> = (0..m)
        .map(|c| 0.5 * (guu * ii[0][c] + 2.0 * guv * ii[1][c] + gvv * ii[2][c]))
        .collect();

    // |II|^2 = g^{ik} g^{jl} II_ij . II_kl with index pairs (uu, uv, vv).
    let ginv = [[guu, guv], [guv, gvv]];
    let slot = |i: usize, j: usize| i + j;
    let mut sff_sq = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    sff_sq += ginv[i][k] * ginv[j][l] * dot(&ii[slot(i, j)], &ii[slot(k, l)]);
                }
            }
        }
    }

    let mut re: Vec<f64> = dww.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = dww.iter().map(|z| z.im).collect();
    project_normal(&mut re, &e1, &e2);
    project_normal(&mut im, &e1, &e2);
    let s = 2.0 / sigma;
    let h0 = (0..m).map(|c| Complex64::new(s * re[c], s * im[c])).collect();

    NodeGeometry {
        sigma,
        q,
        det,
        h,
        h0,
        e1,
        e2,
        sff_sq,
    }
}

fn transpose<T: Copy>(rows: &[Vec<T>], m: usize) -> Vec<Vec<T>> {
    (0..m).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

/// Computes the full geometry bundle. Fails on non-immersive nodes.
pub fn compute_geometry(phi: &ImmersionField, grid: &Grid) -> Result<GeometryBundle> {
    if phi.len() != grid.len() {
        return Err(Error::BadParameters(format!(
            "immersion has {} samples, grid expects {}",
            phi.len(),
            grid.len()
        )));
    }
    let m = phi.m();
    let mut dphi_w = Vec::with_capacity(m);
    let mut dphi_ww = Vec::with_capacity(m);
    let mut dphi_wwbar = Vec::with_capacity(m);
    for comp in &phi.phi {
        let c = grid.forward_real(comp);
        dphi_w.push(grid.inverse(&grid.derivative_coeffs(&c, Deriv::W)));
        dphi_ww.push(grid.inverse(&grid.d_ww_coeffs(&c)));
        let lap: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (0.25 * grid.laplacian_symbol(idx)))
            .collect();
        dphi_wwbar.push(grid.inverse_real(&lap));
    }

    let nodes: Vec<NodeGeometry> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let dw: Vec<Complex64> = dphi_w.iter().map(|c: &Vec<Complex64>| c[i]).collect();
            let dww: Vec<Complex64> = dphi_ww.iter().map(|c: &Vec<Complex64>| c[i]).collect();
            let dwwb: Vec<f64> = dphi_wwbar.iter().map(|c: &Vec<f64>| c[i]).collect();
            node_geometry(&dw, &dww, &dwwb)
        })
        .collect();

    let sigma: RealField = nodes.iter().map(|n| n.sigma).collect();
    let eps = 1e-10 * median(&sigma);
    for (idx, n) in nodes.iter().enumerate() {
        let min_eig = n.sigma - 2.0 * n.q.norm();
        if !(min_eig > eps) || !n.det.is_finite() {
            return Err(Error::DegenerateImmersion {
                i1: idx / grid.n(),
                i2: idx % grid.n(),
            });
        }
    }

    let lambda: RealField = sigma.iter().map(|s| 0.5 * s.ln()).collect();
    let nu = grid.modulus().chart_log_factor();
    let alpha = lambda.iter().map(|l| l - nu).collect();
    let lap_lambda = filtered_laplacian(grid, &lambda);
    let k_gauss = lap_lambda
        .iter()
        .zip(&sigma)
        .map(|(l, s)| -l / s)
        .collect();

    let h: Vec<Vec<f64>> = nodes.iter().map(|n| n.h.clone()).collect();
    let h0: Vec<Vec<Complex64>> = nodes.iter().map(|n| n.h0.clone()).collect();
    let e1: Vec<Vec<f64>> = nodes.iter().map(|n| n.e1.clone()).collect();
    let e2: Vec<Vec<f64>> = nodes.iter().map(|n| n.e2.clone()).collect();

    Ok(GeometryBundle {
        grid: grid.clone(),
        q: nodes.iter().map(|n| n.q).collect(),
        sff_sq: nodes.iter().map(|n| n.sff_sq).collect(),
        area_density: nodes.iter().map(|n| n.det.sqrt()).collect(),
        h: transpose(&h, m),
        h0: transpose(&h0, m),
        e1: transpose(&e1, m),
        e2: transpose(&e2, m),
        dphi_w,
        dphi_ww,
        dphi_wwbar,
        lambda,
        alpha,
        k_gauss,
    })
}

/// Laplacian of a field of nonlinear origin, 2/3-truncated.
pub(crate) fn filtered_laplacian(grid: &Grid, f: &[f64]) -> RealField {
    let mut c = grid.forward_real(f);
    for (idx, v) in c.iter_mut().enumerate() {
        *v *= if grid.keeps(idx) {
            grid.laplacian_symbol(idx)
        } else {
            0.0
        };
    }
    grid.inverse_real(&c)
}

impl GeometryBundle {
    pub fn modulus(&self) -> FlatModulus {
        self.grid.modulus()
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    /// `e^{2 lambda}` at node `i`.
    pub fn sigma(&self, i: usize) -> f64 {
        (2.0 * self.lambda[i]).exp()
    }

    /// Quadrature of `f dvol_g`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.area_density)
            .map(|(x, d)| x * d)
            .sum::<f64>()
            * self.grid.cell_area()
    }

    pub fn h_sq(&self) -> RealField {
        (0..self.grid.len())
            .map(|i| self.h.iter().map(|c| c[i] * c[i]).sum())
            .collect()
    }

    /// Conformality defect `|Q| e^{-2 lambda}` at each node.
    pub fn defect_field(&self) -> RealField {
        self.q
            .iter()
            .zip(&self.lambda)
            .map(|(q, l)| q.norm() * (-2.0 * l).exp())
            .collect()
    }

    pub fn defect_sup(&self) -> f64 {
        crate::grid::sup_norm(&self.defect_field())
    }

    /// Applies `pi_n` at node `i` to `v`.
    pub fn normal_part(&self, i: usize, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        let e1: Vec<f64> = self.e1.iter().map(|c| c[i]).collect();
        let e2: Vec<f64> = self.e2.iter().map(|c| c[i]).collect();
        project_normal(&mut out, &e1, &e2);
        out
    }

    /// The normal projector `pi_n` at node `i` as a dense `m x m` matrix.
    pub fn normal_proj(&self, i: usize) -> Vec<Vec<f64>> {
        let m = self.m();
        (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| {
                        let id = if r == c { 1.0 } else { 0.0 };
                        id - self.e1[r][i] * self.e1[c][i] - self.e2[r][i] * self.e2[c][i]
                    })
                    .collect()
            })
            .collect()
    }
}

/// `W = int |H|^2 dvol_g`.
pub fn willmore_energy(bundle: &GeometryBundle) -> f64 {
    bundle.integrate(&bundle.h_sq())
}

/// Gauss-Bonnet defect (`chi = 0`) and `int |II|^2 dvol_g`.
pub fn energy_identities(bundle: &GeometryBundle) -> EnergyIdentities {
    EnergyIdentities {
        gauss_bonnet_defect: bundle.integrate(&bundle.k_gauss),
        sff_energy: bundle.integrate(&bundle.sff_sq),
    }
}
