//! Monitored scalars of a flow, the flat-torus Green function and the
//! existence-time report.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::flow::{FlowState, Velocity};
use crate::geometry::{energy_identities, willmore_energy, GeometryBundle};
use crate::grid::{sup_norm, Deriv, FlatModulus, Grid, RealField};
use crate::moduli::{self, concentration};
use crate::willmore::codazzi_residual;
use crate::{Error, Result};

/// One row of the per-step ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub retries: usize,
    pub w: f64,
    pub sff_energy: f64,
    pub gauss_bonnet_defect: f64,
    pub defect_sup: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_osc: f64,
    pub l_star: f64,
    pub a: f64,
    pub b: f64,
    /// `sup_x0 E(R, x0)` for each configured radius.
    pub e_sup: Vec<f64>,
    /// `(log b_n - log b_{n-1}) / dt` across the step that produced this state.
    pub dlogb_dt: f64,
    /// `|dh/dt|_h = b |c|` of the current metric velocity.
    pub dh_dt_norm: f64,
    pub tangential_l1: f64,
    pub dh_dt_l1: f64,
    pub alpha_rate_residual: f64,
    pub codazzi_r1: f64,
    pub codazzi_r2: f64,
}

impl DiagnosticsRecord {
    /// Column names in serialization order; `e_sup` expands to one column per radius.
    pub fn scalar_columns() -> [&'static str; 21] {
        [
            "step",
            "t",
            "dt",
            "retries",
            "W",
            "sff_energy",
            "gauss_bonnet_defect",
            "defect_sup",
            "alpha_min",
            "alpha_max",
            "alpha_osc",
            "l_star",
            "a",
            "b",
            "dlogb_dt",
            "dh_dt_norm",
            "tangential_L1",
            "dh_dt_L1",
            "alpha_rate_residual",
            "codazzi_r1",
            "codazzi_r2",
        ]
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.dt,
            self.w,
            self.sff_energy,
            self.gauss_bonnet_defect,
            self.defect_sup,
            self.alpha_min,
            self.alpha_max,
            self.alpha_osc,
            self.l_star,
            self.a,
            self.b,
            self.dlogb_dt,
            self.dh_dt_norm,
            self.tangential_l1,
            self.dh_dt_l1,
            self.alpha_rate_residual,
            self.codazzi_r1,
            self.codazzi_r2,
        ]
        .iter()
        .chain(&self.e_sup)
        .all(|x| x.is_finite())
    }
}

/// Optional context for [`record`].
#[derive(Debug, Clone)]
pub struct RecordExtras<'a> {
    pub prev: Option<(&'a FlowState, &'a GeometryBundle, &'a Velocity)>,
    pub dt: f64,
    pub retries: usize,
    pub radii: Vec<f64>,
    pub stride: usize,
}

impl Default for RecordExtras<'_> {
    fn default() -> Self {
        Self {
            prev: None,
            dt: 0.0,
            retries: 0,
            radii: Vec::new(),
            stride: 4,
        }
    }
}

/// Right-hand side of the conformal factor evolution,
/// `alpha' = -V.H + 2 e^{-2 lambda} Re d_wbar(V . d_w Phi)`.
pub fn alpha_rate(bundle: &GeometryBundle, v: &[Vec<f64>]) -> RealField {
    let grid = &bundle.grid;
    let len = grid.len();
    let flux: Vec<Complex64> = (0..len)
        .map(|i| v.iter().zip(&bundle.dphi_w).map(|(vc, pw)| pw[i] * vc[i]).sum())
        .collect();
    let div = grid.derivative_dealiased(&flux, Deriv::WBar);
    (0..len)
        .map(|i| {
            let vh: f64 = v.iter().zip(&bundle.h).map(|(vc, hc)| vc[i] * hc[i]).sum();
            -vh + 2.0 * (-2.0 * bundle.lambda[i]).exp() * div[i].re
        })
        .collect()
}

/// `sup |(alpha_next - alpha_prev) / dt - alpha_rate(prev, v)|` across one step.
pub fn alpha_rate_residual_with(
    prev: &GeometryBundle,
    next: &GeometryBundle,
    v: &[Vec<f64>],
    dt: f64,
) -> f64 {
    let rhs = alpha_rate(prev, v);
    let diff: Vec<f64> = (0..rhs.len())
        .map(|i| (next.alpha[i] - prev.alpha[i]) / dt - rhs[i])
        .collect();
    sup_norm(&diff)
}

pub fn alpha_rate_residual(prev: &FlowState, next: &FlowState, vel: &Velocity) -> Result<f64> {
    let pb = prev.geometry()?;
    let nb = next.geometry()?;
    Ok(alpha_rate_residual_with(&pb, &nb, &vel.dphi_dt, next.t - prev.t))
}

/// `int |pi_T v| dvol_h` (unit volume, so the grid mean).
pub fn tangential_l1(bundle: &GeometryBundle, v: &[Vec<f64>]) -> f64 {
    let len = bundle.grid.len();
    let total: f64 = (0..len)
        .map(|i| {
            let p: Vec<f64> = v.iter().map(|c| c[i]).collect();
            let n = bundle.normal_part(i, &p);
            p.iter()
                .zip(&n)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    total / len as f64
}

/// Aggregates all monitored quantities for one state.
pub fn record(
    state: &FlowState,
    bundle: &GeometryBundle,
    vel: &Velocity,
    extras: &RecordExtras<'_>,
) -> DiagnosticsRecord {
    let modulus = state.modulus();
    let ids = energy_identities(bundle);
    let codazzi = codazzi_residual(bundle);
    let amin = bundle.alpha.iter().cloned().fold(f64::INFINITY, f64::min);
    let amax = bundle.alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (dlogb_dt, alpha_res) = match extras.prev {
        Some((ps, pb, pv)) if extras.dt > 0.0 => (
            (modulus.b.ln() - ps.modulus().b.ln()) / extras.dt,
            alpha_rate_residual_with(pb, bundle, &pv.dphi_dt, extras.dt),
        ),
        _ => (0.0, 0.0),
    };
    let e_sup = extras
        .radii
        .iter()
        .map(|&r| concentration(bundle, r, extras.stride).sup_value)
        .collect();
    let dh = vel.qdot.norm_h(&modulus);
    DiagnosticsRecord {
        step: state.step_count,
        t: state.t,
        dt: extras.dt,
        retries: extras.retries,
        w: willmore_energy(bundle),
        sff_energy: ids.sff_energy,
        gauss_bonnet_defect: ids.gauss_bonnet_defect,
        defect_sup: bundle.defect_sup(),
        alpha_min: amin,
        alpha_max: amax,
        alpha_osc: amax - amin,
        l_star: modulus.systole(),
        a: modulus.a,
        b: modulus.b,
        e_sup,
        dlogb_dt,
        dh_dt_norm: dh,
        tangential_l1: tangential_l1(bundle, &vel.dphi_dt),
        dh_dt_l1: dh * modulus.volume(),
        alpha_rate_residual: alpha_res,
        codazzi_r1: codazzi.r1,
        codazzi_r2: codazzi.r2,
    }
}

/// `G_h(., y)` with its `d_w` derivative, for a grid node `y`.
#[derive(Debug, Clone)]
pub struct GreenField {
    pub source: [f64; 2],
    pub values: RealField,
    pub grad_w: Vec<Complex64>,
}

impl GreenField {
    /// Pointwise `|dG|_h = 2 sqrt(b) |d_w G|`.
    pub fn grad_norm(&self, modulus: &FlatModulus) -> RealField {
        let s = 2.0 * modulus.b.sqrt();
        self.grad_w.iter().map(|z| s * z.norm()).collect()
    }
}

/// Zero-mean solution of `-Delta_h G = delta_y - 1` on the unit-volume torus.
pub fn green_function(grid: &Grid, source: usize) -> GreenField {
    let b = grid.modulus().b;
    let y = grid.node(source);
    let n = grid.n();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, v) in c.iter_mut().enumerate().skip(1) {
        let k1 = grid.freq(idx / n) as f64;
        let k2 = grid.freq(idx % n) as f64;
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (k1 * y[0] + k2 * y[1]));
        *v = phase / (-b * grid.laplacian_symbol(idx));
    }
    GreenField {
        source: y,
        values: grid.inverse_real(&c),
        grad_w: grid.inverse(&grid.derivative_coeffs(&c, Deriv::W)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenL1Report {
    pub l1_grad: f64,
    pub l1_g: f64,
    /// `int |d g_bar|_h` for the source averaged over the `x1` circle, evaluated
    /// for the doubled metric of the matching finite cylinder.
    pub averaged_cyl_check: f64,
    /// `1 / (2 l)` with `l` the systole of that cylinder metric.
    pub cyl_target: f64,
    pub l_star: f64,
}

/// Rectangular modulus whose doubled metric is the cylinder `S^1 x [-L, L]`
/// with `h = (2 pi L)^{-1} (d theta^2 + dt^2)`.
pub fn cylinder_modulus(half_length: f64) -> Result<FlatModulus> {
    FlatModulus::new(0.0, half_length / PI)
}

pub fn green_l1_report(grid: &Grid) -> GreenL1Report {
    let modulus = grid.modulus();
    let b = modulus.b;
    let g = green_function(grid, 0);
    let len = grid.len() as f64;
    let l1_grad = g.grad_norm(&modulus).iter().sum::<f64>() / len;
    let l1_g = g.values.iter().map(|x| x.abs()).sum::<f64>() / len;

    // Averaging the source over x1 keeps only the k1 = 0 modes.
    let n = grid.n();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i2, v) in c.iter_mut().enumerate().take(n).skip(1) {
        *v = Complex64::new(1.0 / (-b * grid.laplacian_symbol(i2)), 0.0);
    }
    let dg = grid.inverse(&grid.derivative_coeffs(&c, Deriv::W));
    let unit = dg.iter().map(|z| 2.0 * b.sqrt() * z.norm()).sum::<f64>() / len;
    let l_star = modulus.systole();
    let cyl_l = SQRT_2 * l_star;
    GreenL1Report {
        l1_grad,
        l1_g,
        averaged_cyl_check: SQRT_2 * unit,
        cyl_target: 1.0 / (2.0 * cyl_l),
        l_star,
    }
}

/// Largest `R` in `(0, l_*/2]` with `sup_x0 E(R, x0) <= beta`, by bisection.
pub fn admissible_radius(bundle: &GeometryBundle, beta: f64, stride: usize) -> Result<f64> {
    let sup = |r: f64| concentration(bundle, r, stride).sup_value;
    let hi0 = 0.5 * bundle.modulus().systole();
    if sup(hi0) <= beta {
        return Ok(hi0);
    }
    let lo0 = hi0 / 1024.0;
    let e = sup(lo0);
    if e > beta {
        return Err(Error::NoAdmissibleR {
            radius: lo0,
            energy: e,
        });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    while hi / lo > 1.0 + 1e-4 {
        let mid = (lo * hi).sqrt();
        if sup(mid) <= beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceReport {
    pub radius: f64,
    /// Heuristic `lambda_hat R^4`; not a certified bound.
    pub t_pred: f64,
    /// Root of `l exp(c_hat l^30) = l_*(0)`.
    pub l_lower: f64,
    pub l_star: f64,
}

/// Solves `ln l + c l^30 = ln target` on `(0, target]`.
pub fn systole_lower_bound(target: f64, c_hat: f64) -> f64 {
    let f = |l: f64| l.ln() + c_hat * l.powi(30) - target.ln();
    let (mut lo, mut hi) = (0.0f64, target);
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn existence_time_report(
    initial: &FlowState,
    beta: f64,
    lambda_hat: f64,
    c_hat: f64,
) -> Result<ExistenceReport> {
    if !(beta > 0.0 && beta < 8.0 * PI / 3.0) {
        return Err(Error::BadParameters(format!(
            "beta = {beta} must lie in (0, 8 pi / 3)"
        )));
    }
    if !(lambda_hat > 0.0 && c_hat >= 0.0) {
        return Err(Error::BadParameters("lambda and C must be positive".into()));
    }
    let bundle = initial.geometry()?;
    let radius = admissible_radius(&bundle, beta, 4)?;
    let l_star = moduli::systole(&initial.modulus());
    Ok(ExistenceReport {
        radius,
        t_pred: lambda_hat * radius.powi(4),
        l_lower: systole_lower_bound(l_star, c_hat),
        l_star,
    })
}
