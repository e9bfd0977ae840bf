//! One-shot subcommands. Each returns the text it prints.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use pwf_core::dbar::{l1_norm_pair, tent_field, TangentField01};
use pwf_core::diagnostics::{existence_time_report, green_l1_report};
use pwf_core::flow::FlowState;
use pwf_core::geometry::{compute_geometry, energy_identities, willmore_energy, ImmersionField};
use pwf_core::grid::{FlatModulus, Grid, RealVectorField};
use pwf_core::willmore::{pairing, willmore_gradient};
use pwf_core::Complex64;

use crate::config::RunConfig;
use crate::init::init_immersion;
use crate::{snapshot, CliError, Result};

/// A snapshot file, or a run config whose initial immersion is built.
pub fn load_input(path: &Path) -> Result<FlowState> {
    if snapshot::is_snapshot(path) {
        snapshot::read(path)
    } else {
        let cfg = RunConfig::load(path)?;
        init_immersion(&cfg.initial, cfg.n)
    }
}

pub fn energy(state: &FlowState) -> Result<String> {
    let b = state.geometry()?;
    let w = willmore_energy(&b);
    let id = energy_identities(&b);
    let m = state.modulus();
    let mut out = String::new();
    writeln!(out, "N                    {}", state.n()).unwrap();
    writeln!(out, "tau                  {} + {} i", m.a, m.b).unwrap();
    writeln!(out, "l_star               {:.12e}", m.systole()).unwrap();
    writeln!(out, "W                    {w:.15e}").unwrap();
    writeln!(out, "W / (2 pi^2)         {:.15e}", w / (2.0 * PI * PI)).unwrap();
    writeln!(out, "int |II|^2           {:.15e}", id.sff_energy).unwrap();
    writeln!(out, "int |II|^2 - 4W      {:.3e}", id.sff_energy - 4.0 * w).unwrap();
    writeln!(out, "int K dvol           {:.3e}", id.gauss_bonnet_defect).unwrap();
    writeln!(out, "conformality defect  {:.3e}", b.defect_sup()).unwrap();
    writeln!(out, "W >= 4 pi            {}", w >= 4.0 * PI * 0.95).unwrap();
    Ok(out)
}

/// Smooth random direction field with a few modes `|k_i| <= 3`.
pub fn random_direction(grid: &Grid, m: usize, seed: u64) -> RealVectorField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let modes: Vec<(f64, f64, f64, f64)> = (0..6)
                .map(|_| {
                    (
                        rng.gen_range(-3..=3) as f64,
                        rng.gen_range(-3..=3) as f64,
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.0..2.0 * PI),
                    )
                })
                .collect();
            (0..grid.len())
                .map(|i| {
                    let x = grid.node(i);
                    modes
                        .iter()
                        .map(|(k1, k2, a, ph)| a * (2.0 * PI * (k1 * x[0] + k2 * x[1]) + ph).cos())
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingRow {
    pub pairing: f64,
    pub fd: f64,
    pub rel_error: f64,
}

fn energy_along(state: &FlowState, psi: &RealVectorField, eps: f64) -> Result<f64> {
    let phi = state
        .phi
        .phi
        .iter()
        .zip(psi)
        .map(|(p, v)| p.iter().zip(v).map(|(a, b)| a + eps * b).collect())
        .collect();
    let b = compute_geometry(&ImmersionField::new(phi)?, &state.grid)?;
    Ok(willmore_energy(&b))
}

/// `<delta W, psi>` against `-dW/d eps`, the latter by Richardson-extrapolated
/// central differences at `eps` and `eps / 2`.
pub fn pairing_rows(state: &FlowState, seed: u64, count: usize, eps: f64) -> Result<Vec<PairingRow>> {
    let bundle = state.geometry()?;
    let grad = willmore_gradient(&bundle);
    let w0 = willmore_energy(&bundle);
    let grad_sq = pairing(&bundle, &grad.delta_w, &grad.delta_w);
    (0..count)
        .map(|k| {
            let psi = random_direction(&state.grid, state.m(), seed.wrapping_add(k as u64));
            let central = |e: f64| -> Result<f64> {
                Ok((energy_along(state, &psi, e)? - energy_along(state, &psi, -e)?) / (2.0 * e))
            };
            let fd = (4.0 * central(0.5 * eps)? - central(eps)?) / 3.0;
            let p = pairing(&bundle, &grad.delta_w, &psi);
            // Directions nearly orthogonal to the gradient are measured against
            // the Cauchy-Schwarz bound instead of the vanishing pairing itself.
            let cs = (grad_sq * pairing(&bundle, &psi, &psi)).sqrt();
            let scale = fd.abs().max(1e-3 * cs).max(1e-12 * w0);
            Ok(PairingRow {
                pairing: p,
                fd,
                rel_error: (p + fd).abs() / scale,
            })
        })
        .collect()
}

pub fn gradient_check(state: &FlowState, seed: u64, tol: f64) -> Result<String> {
    let rows = pairing_rows(state, seed, 5, 1e-3)?;
    let mut out = String::from("  <dW, psi>              -dW/deps               rel. error\n");
    for r in &rows {
        writeln!(out, "{:+.15e}  {:+.15e}  {:.3e}", r.pairing, -r.fd, r.rel_error).unwrap();
    }
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    if worst > tol {
        return Err(CliError::Guard(format!("{out}pairing error {worst:.3e} exceeds {tol:e}")));
    }
    Ok(out)
}

pub fn green(modulus: FlatModulus, n: usize) -> Result<String> {
    let grid = Grid::new(n, modulus)?;
    let r = green_l1_report(&grid);
    let mut out = String::new();
    writeln!(out, "tau                       {} + {} i", modulus.a, modulus.b).unwrap();
    writeln!(out, "l_star                    {:.12e}", r.l_star).unwrap();
    writeln!(out, "int |dG|_h                {:.12e}", r.l1_grad).unwrap();
    writeln!(out, "int |dG|_h * l_star       {:.12e}", r.l1_grad * r.l_star).unwrap();
    writeln!(out, "int |G|                   {:.12e}", r.l1_g).unwrap();
    writeln!(out, "int |G| * l_star^2        {:.12e}", r.l1_g * r.l_star * r.l_star).unwrap();
    if modulus.a == 0.0 {
        let rel = (r.averaged_cyl_check / r.cyl_target - 1.0).abs();
        writeln!(out, "cylinder half-length L    {:.12e}", PI * modulus.b).unwrap();
        writeln!(out, "circle-averaged int |dG|  {:.12e}", r.averaged_cyl_check).unwrap();
        writeln!(out, "1 / (2 l)                 {:.12e}", r.cyl_target).unwrap();
        writeln!(out, "relative difference       {rel:.3e}").unwrap();
    } else {
        writeln!(out, "circle-averaged check     needs a rectangular modulus").unwrap();
    }
    Ok(out)
}

pub fn dbar_check(b: f64, n: usize) -> Result<String> {
    let grid = Grid::new(n, FlatModulus::new(0.0, b)?)?;
    let u: Vec<Complex64> = tent_field(n, b).iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let pair = l1_norm_pair(&TangentField01 { u }, &grid);
    let target = 2f64.powf(-1.5) * b.powf(1.5);
    let mut out = String::new();
    writeln!(out, "b                         {b}").unwrap();
    writeln!(out, "int |U|_h                 {:.12e}", pair.l1_u).unwrap();
    writeln!(out, "2^(-3/2) b^(3/2)          {target:.12e}").unwrap();
    writeln!(out, "relative difference       {:.3e}", (pair.l1_u / target - 1.0).abs()).unwrap();
    writeln!(out, "int |dbar U|_h            {:.12e}", pair.l1_dbar_u).unwrap();
    writeln!(out, "ratio                     {:.12e}", pair.l1_u / pair.l1_dbar_u).unwrap();
    Ok(out)
}

pub fn existence(state: &FlowState, beta: f64, lambda: f64, c_hat: f64) -> Result<String> {
    let r = existence_time_report(state, beta, lambda, c_hat)?;
    let mut out = String::new();
    writeln!(out, "beta                      {beta}").unwrap();
    writeln!(out, "R                         {:.12e}", r.radius).unwrap();
    writeln!(out, "T_pred = lambda R^4       {:.12e}  (heuristic, not certified)", r.t_pred).unwrap();
    writeln!(out, "l_star(0)                 {:.12e}", r.l_star).unwrap();
    writeln!(out, "l_lower (C = {c_hat})      {:.12e}  (heuristic, not certified)", r.l_lower).unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwf_core::surfaces;

    #[test]
    fn clifford_energy_report() {
        let text = energy(&surfaces::clifford(16).unwrap()).unwrap();
        assert!(text.contains("W / (2 pi^2)         1.0000000000000"), "{text}");
    }

    #[test]
    fn green_report_at_eight_i() {
        let text = green(FlatModulus::new(0.0, 8.0).unwrap(), 256).unwrap();
        let rel: f64 = text
            .lines()
            .find(|l| l.starts_with("relative difference"))
            .and_then(|l| l.split_whitespace().last())
            .unwrap()
            .parse()
            .unwrap();
        assert!(rel < 0.01, "{text}");
    }

    #[test]
    fn existence_rejects_beta_out_of_range() {
        let s = surfaces::clifford(16).unwrap();
        assert!(existence(&s, 9.0, 1.0, 1.0).is_err());
        let text = existence(&s, 0.9 * 8.0 * PI / 3.0, 1.0, 1.0).unwrap();
        assert!(text.contains("heuristic"));
    }
}
