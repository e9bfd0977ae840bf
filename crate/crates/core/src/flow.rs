//! Coupled time integration of the immersion and the flat conformal structure.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dbar::{solve_mean_free, TangentField01};
use crate::diagnostics::{self, DiagnosticsRecord, RecordExtras};
use crate::geometry::{compute_geometry, willmore_energy, GeometryBundle, ImmersionField};
use crate::grid::{mean_complex, sup_norm_complex, ComplexField, Deriv, FlatModulus, Grid, RealVectorField};
use crate::moduli::{self, modulus_velocity, project_quadratic, QuadDifferential};
use crate::willmore::willmore_gradient;
use crate::{Error, Result};

/// `(Phi, tau, t)` with the grid carrying the current modulus.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub phi: ImmersionField,
    pub grid: Grid,
    pub t: f64,
    pub step_count: usize,
}

impl FlowState {
    pub fn new(phi: ImmersionField, grid: Grid) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::BadParameters("immersion does not match grid".into()));
        }
        Ok(Self {
            phi,
            grid,
            t: 0.0,
            step_count: 0,
        })
    }

    pub fn modulus(&self) -> FlatModulus {
        self.grid.modulus()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn m(&self) -> usize {
        self.phi.m()
    }

    pub fn geometry(&self) -> Result<GeometryBundle> {
        compute_geometry(&self.phi, &self.grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = lambda_cfl * h_g^4` with `h_g = e^{lambda_min} min(1, b) / N`.
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RPolicy {
    Off,
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub dt_policy: DtPolicy,
    pub t_end: f64,
    pub reproject_every: usize,
    pub beta: f64,
    pub r_policy: RPolicy,
    pub tangential: bool,
    pub tol_energy: f64,
    pub max_retries: usize,
    pub defect_guard: f64,
    pub modulus_eps: f64,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub guard_every: usize,
    pub concentration_stride: usize,
    pub radii: Vec<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            dt_policy: DtPolicy::Fixed(1e-4),
            t_end: 0.01,
            reproject_every: 0,
            beta: 8.0 * PI / 3.0,
            r_policy: RPolicy::Off,
            tangential: true,
            tol_energy: 1e-8,
            max_retries: 20,
            defect_guard: 0.1,
            modulus_eps: 1e-6,
            record_every: 1,
            snapshot_every: 0,
            guard_every: 10,
            concentration_stride: 4,
            radii: Vec::new(),
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::BadParameters(s.to_string()));
        match self.dt_policy {
            DtPolicy::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => return bad("dt must be positive"),
            DtPolicy::Cfl(l) if !(l > 0.0 && l.is_finite()) => return bad("lambda_cfl must be positive"),
            _ => {}
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be finite and non-negative");
        }
        if !(self.beta > 0.0 && self.beta <= 8.0 * PI / 3.0) {
            return bad("beta must lie in (0, 8 pi / 3]");
        }
        if let RPolicy::Fixed(r) = self.r_policy {
            if !(r > 0.0) {
                return bad("R must be positive");
            }
        }
        if !(self.modulus_eps > 0.0 && self.modulus_eps < 1.0) {
            return bad("modulus_eps must lie in (0, 1)");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Velocity {
    pub dphi_dt: RealVectorField,
    pub delta_w: RealVectorField,
    pub tangential: RealVectorField,
    pub u01: TangentField01,
    /// Chart coefficient `psi` of the pairing `delta W . h0`.
    pub psi: ComplexField,
    /// Metric velocity `dh/dt = Re[qdot.c dw^2]`.
    pub qdot: QuadDifferential,
    pub da_dt: f64,
    pub db_dt: f64,
    /// Mean of the dbar right-hand side; zero up to round-off.
    pub f_mean: f64,
}

/// Assembles `(d Phi/dt, d tau/dt)` for a state whose geometry is known.
pub fn assemble_velocity_with(
    state: &FlowState,
    bundle: &GeometryBundle,
    tangential: bool,
) -> Result<Velocity> {
    let gw = willmore_gradient(bundle);
    couple(state, bundle, gw.delta_w, tangential)
}

/// Completes a driving field `v0` with the conformality-preserving tangential
/// field and modulus motion.
///
/// With `psi = -e^{-2 lambda} d_w Phi . d_w v0` (for normal `v0` this is
/// `v0 . H0 / 2`) and `c = mean(psi)`, conformality is preserved by
/// `d_w u = 2 (psi - c)` together with `dh/dt = Re[(-4 c / b) dw^2]`. In terms
/// of `H^0 = h0 contracted with h`, whose chart coefficient is `psi / (2 b)`, the
/// metric line reads `dh/dt = -8 Re P_h(v0 . H^0)`.
pub fn couple(
    state: &FlowState,
    bundle: &GeometryBundle,
    v0: RealVectorField,
    tangential: bool,
) -> Result<Velocity> {
    let grid = &state.grid;
    let len = grid.len();
    let m = state.m();
    let mut psi = vec![Complex64::new(0.0, 0.0); len];
    for c in 0..m {
        let dv = grid.derivative_real(&v0[c], Deriv::W);
        for i in 0..len {
            psi[i] -= (-2.0 * bundle.lambda[i]).exp() * bundle.dphi_w[c][i] * dv[i];
        }
    }
    let proj = project_quadratic(&psi);
    let modulus = state.modulus();
    let pairing_h = QuadDifferential {
        c: proj.q.c / (2.0 * modulus.b),
    };
    let qdot = QuadDifferential {
        c: -8.0 * pairing_h.c,
    };
    let mv = modulus_velocity(&qdot, &modulus)?;

    let f: ComplexField = proj.complement.iter().map(|z| 2.0 * z).collect();
    let f_mean = mean_complex(&f).norm();
    let psi_scale = sup_norm_complex(&psi);
    assert!(
        f_mean <= 1e-10 * psi_scale.max(f64::MIN_POSITIVE),
        "dbar right-hand side lost its projection"
    );
    let u01 = if tangential {
        solve_mean_free(&f, grid)
    } else {
        TangentField01::zero(len)
    };
    let tangential_field = u01.pushforward(&bundle.dphi_w);
    let dphi_dt = (0..m)
        .map(|c| (0..len).map(|i| v0[c][i] + tangential_field[c][i]).collect())
        .collect();
    Ok(Velocity {
        dphi_dt,
        delta_w: v0,
        tangential: tangential_field,
        u01,
        psi,
        qdot,
        da_dt: mv.da_dt,
        db_dt: mv.db_dt,
        f_mean,
    })
}

pub fn assemble_velocity(state: &FlowState) -> Result<Velocity> {
    let bundle = state.geometry()?;
    assemble_velocity_with(state, &bundle, true)
}

/// Accepted step together with the geometry of the new state.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: FlowState,
    pub bundle: GeometryBundle,
    pub w_before: f64,
    pub w_after: f64,
}

/// Coefficient of the implicit biharmonic drag: the largest principal symbol
/// coefficient `e^{-4 lambda} / 2` of the linearised flow.
fn stiffness(bundle: &GeometryBundle) -> f64 {
    bundle
        .lambda
        .iter()
        .map(|l| 0.5 * (-4.0 * l).exp())
        .fold(0.0, f64::max)
}

/// One IMEX step. The biharmonic drag `(I + dt s Delta^2)^{-1}` acts on the
/// driving field `delta W`; the tangential field and modulus motion are then
/// rebuilt from the damped field so that the step stays conformal to first
/// order. `Phi` advances by explicit Euler with that velocity, as does `tau`.
pub fn step_with(
    state: &FlowState,
    bundle: &GeometryBundle,
    vel: &Velocity,
    dt: f64,
    config: &FlowConfig,
) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::BadParameters("dt must be positive".into()));
    }
    let grid = &state.grid;
    let s = stiffness(bundle);
    let damped: RealVectorField = vel
        .delta_w
        .iter()
        .map(|v| {
            let mut c = grid.forward_real(v);
            for (idx, z) in c.iter_mut().enumerate() {
                let l = grid.laplacian_symbol(idx);
                *z /= 1.0 + dt * s * l * l;
            }
            grid.inverse_real(&c)
        })
        .collect();
    let svel = couple(state, bundle, damped, config.tangential)?;
    let mut phi = Vec::with_capacity(state.m());
    for (comp, v) in state.phi.phi.iter().zip(&svel.dphi_dt) {
        let pc = grid.forward_real(comp);
        let vc = grid.forward_real(v);
        let next: ComplexField = (0..grid.len())
            .map(|idx| {
                if grid.keeps(idx) {
                    pc[idx] + dt * vc[idx]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        phi.push(grid.inverse_real(&next));
    }
    let old = state.modulus();
    let a = old.a + dt * svel.da_dt;
    let b = old.b + dt * svel.db_dt;
    if !(b > config.modulus_eps && b < 1.0 / config.modulus_eps) {
        return Err(Error::SingularModulus { b });
    }
    let modulus = FlatModulus::new(a, b)?;
    let next = FlowState {
        phi: ImmersionField::new(phi)?,
        grid: grid.with_modulus(modulus),
        t: state.t + dt,
        step_count: state.step_count + 1,
    };
    let new_bundle = compute_geometry(&next.phi, &next.grid)
        .map_err(|e| Error::StepRejected(e.to_string()))?;
    let w_before = willmore_energy(bundle);
    let w_after = willmore_energy(&new_bundle);
    if !w_after.is_finite() || w_after - w_before > config.tol_energy * w_before {
        return Err(Error::StepRejected(format!(
            "energy rose from {w_before} to {w_after}"
        )));
    }
    Ok(StepOutcome {
        state: next,
        bundle: new_bundle,
        w_before,
        w_after,
    })
}

pub fn step(state: &FlowState, dt: f64, config: &FlowConfig) -> Result<FlowState> {
    let bundle = state.geometry()?;
    let vel = assemble_velocity_with(state, &bundle, config.tangential)?;
    step_with(state, &bundle, &vel, dt, config).map(|o| o.state)
}

/// Time step requested by the policy for the current geometry.
pub fn policy_dt(config: &FlowConfig, bundle: &GeometryBundle) -> f64 {
    match config.dt_policy {
        DtPolicy::Fixed(dt) => dt,
        DtPolicy::Cfl(lambda) => {
            let lmin = bundle.lambda.iter().cloned().fold(f64::INFINITY, f64::min);
            let grid = &bundle.grid;
            let hg = lmin.exp() * grid.modulus().b.min(1.0) / grid.n() as f64;
            lambda * hg.powi(4)
        }
    }
}

/// Below this defect a state is treated as already conformal.
const CONFORMAL_FLOOR: f64 = 1e-12;

/// Beltrami coefficient `mu` of the parametrization: `r = Q / e^{2 lambda}`
/// equals `conj(mu) / (1 + |mu|^2)`.
fn beltrami(bundle: &GeometryBundle) -> ComplexField {
    bundle
        .q
        .iter()
        .zip(&bundle.lambda)
        .map(|(q, l)| {
            let r = q * (-2.0 * l).exp();
            let s = (1.0 - 4.0 * r.norm_sqr()).max(0.0).sqrt();
            r.conj() * (2.0 / (1.0 + s))
        })
        .collect()
}

/// Solves `zeta_wbar = mu zeta_w` for `zeta = (1 + d) w - d conj(w) + f`,
/// returning `d` and the spectral coefficients of the periodic part `f`.
fn solve_beltrami(grid: &Grid, mu: &[Complex64]) -> (Complex64, ComplexField) {
    let len = grid.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut d = zero;
    let mut fc = vec![zero; len];
    for _ in 0..200 {
        let fw_c: ComplexField = fc
            .iter()
            .enumerate()
            .map(|(idx, v)| v * grid.symbol(idx, Deriv::W))
            .collect();
        let fw = grid.inverse(&fw_c);
        let r: ComplexField = (0..len).map(|i| mu[i] * (1.0 + d + fw[i])).collect();
        let rc = grid.forward(&r);
        let d_new = -rc[0];
        let mut change = (d_new - d).norm();
        let mut size = d_new.norm();
        for idx in 1..len {
            let v = rc[idx] / grid.symbol(idx, Deriv::WBar);
            change = change.max((v - fc[idx]).norm());
            size = size.max(v.norm());
            fc[idx] = v;
        }
        fc[0] = zero;
        d = d_new;
        if change <= 1e-16 * size.max(1e-300) || change < 1e-300 {
            break;
        }
    }
    (d, fc)
}

fn reproject_once(state: &FlowState, bundle: &GeometryBundle) -> Result<FlowState> {
    let grid = &state.grid;
    let old = state.modulus();
    let mu = beltrami(bundle);
    let (d, fc) = solve_beltrami(grid, &mu);
    let tau = old.tau() + Complex64::new(0.0, 2.0 * old.b) * d;
    if !(tau.im > moduli::MODULUS_EPS) {
        return Err(Error::ReprojectionFailed {
            defect: bundle.defect_sup(),
        });
    }
    let new_mod = FlatModulus::new(tau.re, tau.im)?;
    let targets: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let mut x = targets.clone();
    for _ in 0..60 {
        let fx = grid.interpolate(&fc, &x);
        let mut moved = 0.0f64;
        for i in 0..x.len() {
            let q = fx[i].im / tau.im;
            let nx = [
                targets[i][0] - (fx[i].re - tau.re * q),
                targets[i][1] - q,
            ];
            moved = moved.max((nx[0] - x[i][0]).abs()).max((nx[1] - x[i][1]).abs());
            x[i] = nx;
        }
        if moved < 1e-15 {
            break;
        }
    }
    let phi = state
        .phi
        .phi
        .iter()
        .map(|comp| {
            let c = grid.forward_real(comp);
            grid.interpolate(&c, &x).into_iter().map(|z| z.re).collect()
        })
        .collect();
    Ok(FlowState {
        phi: ImmersionField::new(phi)?,
        grid: grid.with_modulus(new_mod),
        t: state.t,
        step_count: state.step_count,
    })
}

/// Reparametrizes `Phi` by a torus diffeomorphism (and moves `tau`) so that it
/// becomes conformal again. Requires a tenfold defect reduction.
pub fn reproject_conformal(state: &FlowState) -> Result<FlowState> {
    let bundle = state.geometry()?;
    let d0 = bundle.defect_sup();
    if !(d0 < 0.1) {
        return Err(Error::ReprojectionFailed { defect: d0 });
    }
    if d0 <= CONFORMAL_FLOOR {
        return Ok(state.clone());
    }
    let mut best = (state.clone(), d0);
    let mut current = (state.clone(), bundle);
    for _ in 0..4 {
        let next = reproject_once(&current.0, &current.1)?;
        let nb = next.geometry().map_err(|_| Error::ReprojectionFailed { defect: d0 })?;
        let d = nb.defect_sup();
        if d >= 0.5 * best.1 {
            if d < best.1 {
                best = (next, d);
            }
            break;
        }
        best = (next.clone(), d);
        if d <= CONFORMAL_FLOOR {
            break;
        }
        current = (next, nb);
    }
    if best.1 * 10.0 > d0 {
        return Err(Error::ReprojectionFailed { defect: best.1 });
    }
    Ok(best.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Completed,
    EnergyGuard,
    DefectGuard,
    ModulusGuard,
    StepFailure,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Completed => "Completed",
            Self::EnergyGuard => "EnergyGuard",
            Self::DefectGuard => "DefectGuard",
            Self::ModulusGuard => "ModulusGuard",
            Self::StepFailure => "StepFailure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<FlowState>,
    pub status: TerminalStatus,
    pub final_state: FlowState,
    pub radius: Option<f64>,
    pub reprojection_failures: usize,
    pub message: Option<String>,
}

/// Radius used by the concentration guard `E(2R) < 8 pi / 3`.
fn guard_radius(config: &FlowConfig, bundle: &GeometryBundle) -> Result<Option<f64>> {
    match config.r_policy {
        RPolicy::Off => Ok(None),
        RPolicy::Fixed(r) => Ok(Some(r)),
        RPolicy::Auto => {
            let r = diagnostics::admissible_radius(bundle, 0.5 * config.beta, config.concentration_stride)?;
            Ok(Some(0.5 * r))
        }
    }
}

/// Integrates up to `config.t_end`, monitoring every guard.
pub fn run(config: &FlowConfig, initial: &FlowState) -> Result<Trajectory> {
    run_with(config, initial, |_| {})
}

/// As [`run`], calling `observe` on every emitted record.
pub fn run_with<F: FnMut(&DiagnosticsRecord)>(
    config: &FlowConfig,
    initial: &FlowState,
    mut observe: F,
) -> Result<Trajectory> {
    config.validate()?;
    let mut state = initial.clone();
    let mut bundle = state.geometry()?;
    let radius = guard_radius(config, &bundle)?;
    let radii: Vec<f64> = match radius {
        Some(r) if config.radii.is_empty() => vec![2.0 * r],
        _ => config.radii.clone(),
    };
    let mut records = Vec::new();
    let mut snapshots = vec![state.clone()];
    let mut failures = 0usize;
    let mut message = None;

    let mut vel = match assemble_velocity_with(&state, &bundle, config.tangential) {
        Ok(v) => v,
        Err(e) => return Ok(halt(records, snapshots, state, radius, failures, e)),
    };
    let rec = diagnostics::record(
        &state,
        &bundle,
        &vel,
        &RecordExtras {
            radii: radii.clone(),
            stride: config.concentration_stride,
            ..RecordExtras::default()
        },
    );
    observe(&rec);
    records.push(rec);

    let t_tol = 1e-12 * config.t_end.max(1.0);
    let mut status = TerminalStatus::Completed;
    while state.t < config.t_end - t_tol {
        let base_dt = policy_dt(config, &bundle).min(config.t_end - state.t);
        let mut dt = base_dt;
        let mut retries = 0usize;
        let outcome = loop {
            match step_with(&state, &bundle, &vel, dt, config) {
                Ok(o) => break Ok(o),
                Err(Error::StepRejected(msg)) if retries < config.max_retries => {
                    message = Some(msg);
                    retries += 1;
                    dt *= 0.5;
                }
                Err(e) => break Err(e),
            }
        };
        let outcome = match outcome {
            Ok(o) => o,
            Err(Error::SingularModulus { .. }) | Err(Error::BadModulus { .. }) => {
                status = TerminalStatus::ModulusGuard;
                break;
            }
            Err(e) => {
                message = Some(e.to_string());
                status = TerminalStatus::StepFailure;
                break;
            }
        };
        let prev_state = std::mem::replace(&mut state, outcome.state);
        let prev_bundle = std::mem::replace(&mut bundle, outcome.bundle);
        let prev_vel = vel.clone();

        let mut reprojected = false;
        if config.reproject_every > 0 && state.step_count % config.reproject_every == 0 {
            match reproject_conformal(&state) {
                Ok(s) => {
                    reprojected = true;
                    state = s;
                    bundle = state.geometry()?;
                }
                Err(_) => failures += 1,
            }
        }

        let b = state.modulus().b;
        if !(b > config.modulus_eps && b < 1.0 / config.modulus_eps) {
            status = TerminalStatus::ModulusGuard;
            break;
        }
        vel = match assemble_velocity_with(&state, &bundle, config.tangential) {
            Ok(v) => v,
            Err(Error::SingularModulus { .. }) => {
                status = TerminalStatus::ModulusGuard;
                break;
            }
            Err(e) => {
                message = Some(e.to_string());
                status = TerminalStatus::StepFailure;
                break;
            }
        };

        let defect = bundle.defect_sup();
        let guard_due = state.step_count % config.guard_every.max(1) == 0;
        let record_due = state.step_count % config.record_every == 0
            || state.t >= config.t_end - t_tol;
        let mut energy_tripped = false;
        if let (Some(r), true) = (radius, guard_due || record_due) {
            let e = moduli::concentration(&bundle, 2.0 * r, config.concentration_stride);
            energy_tripped = e.sup_value >= 8.0 * PI / 3.0;
        }
        if record_due || defect > config.defect_guard || energy_tripped {
            let extras = RecordExtras {
                prev: if reprojected {
                    None
                } else {
                    Some((&prev_state, &prev_bundle, &prev_vel))
                },
                dt: state.t - prev_state.t,
                retries,
                radii: radii.clone(),
                stride: config.concentration_stride,
            };
            let rec = diagnostics::record(&state, &bundle, &vel, &extras);
            observe(&rec);
            records.push(rec);
        }
        if config.snapshot_every > 0 && state.step_count % config.snapshot_every == 0 {
            snapshots.push(state.clone());
        }
        if defect > config.defect_guard {
            status = TerminalStatus::DefectGuard;
            break;
        }
        if energy_tripped {
            status = TerminalStatus::EnergyGuard;
            break;
        }
    }
    if snapshots.last().map(|s| s.step_count) != Some(state.step_count) {
        snapshots.push(state.clone());
    }
    Ok(Trajectory {
        records,
        snapshots,
        status,
        final_state: state,
        radius,
        reprojection_failures: failures,
        message,
    })
}

fn halt(
    records: Vec<DiagnosticsRecord>,
    snapshots: Vec<FlowState>,
    state: FlowState,
    radius: Option<f64>,
    failures: usize,
    err: Error,
) -> Trajectory {
    let status = match err {
        Error::SingularModulus { .. } => TerminalStatus::ModulusGuard,
        _ => TerminalStatus::StepFailure,
    };
    Trajectory {
        records,
        snapshots,
        status,
        final_state: state,
        radius,
        reprojection_failures: failures,
        message: Some(err.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::vector_sup;
    use crate::surfaces;

    #[test]
    fn clifford_is_a_fixed_point() {
        let s = surfaces::clifford(32).unwrap();
        let v = assemble_velocity(&s).unwrap();
        assert!(vector_sup(&v.dphi_dt) < 1e-7);
        let cfg = FlowConfig::default();
        let next = step(&s, 1e-3, &cfg).unwrap();
        for (a, b) in next.phi.phi.iter().zip(&s.phi.phi) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn large_steps_stay_stable() {
        let s = surfaces::clifford_perturbed(16, 3, 0.01).unwrap();
        let w0 = willmore_energy(&s.geometry().unwrap());
        let next = step(&s, 1.0, &FlowConfig::default()).unwrap();
        assert!(willmore_energy(&next.geometry().unwrap()) <= w0);
    }

    #[test]
    fn exhausted_retries_end_in_step_failure() {
        let s = surfaces::clifford_perturbed(16, 3, 0.01).unwrap();
        // Demanding that W halves in a single step can never be met.
        let cfg = FlowConfig {
            dt_policy: DtPolicy::Fixed(1e-3),
            t_end: 1e-2,
            tol_energy: -0.5,
            max_retries: 3,
            ..FlowConfig::default()
        };
        let tr = run(&cfg, &s).unwrap();
        assert_eq!(tr.status, TerminalStatus::StepFailure);
        assert_eq!(tr.records.len(), 1);
        assert!(tr.message.unwrap().contains("energy"));
    }

    #[test]
    fn reprojection_of_conformal_state_is_identity() {
        let s = surfaces::clifford(16).unwrap();
        let r = reproject_conformal(&s).unwrap();
        assert_eq!(r.modulus(), s.modulus());
        assert_eq!(r.phi, s.phi);
    }
}
