//! Comparisons against values computed independently of the spectral machinery.

use std::f64::consts::PI;

use num_complex::Complex64;
use pwf_core::diagnostics::green_function;
use pwf_core::geometry::{compute_geometry, willmore_energy, ImmersionField};
use pwf_core::grid::{FlatModulus, Grid, RealVectorField};
use pwf_core::moduli::{modulus_velocity, systole, QuadDifferential};
use pwf_core::surfaces;
use pwf_core::willmore::{pairing, willmore_gradient};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exponential integral `E1(z)` for `z > 0`: power series below 1, continued
/// fraction above.
fn e1(z: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if z <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -z / k as f64;
            sum += term / k as f64;
        }
        return -EULER - z.ln() - sum;
    }
    // Modified Lentz on E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))).
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// Ewald sum for the zero-mean Green function of the flat unit square torus:
/// `G(x) = (4 pi^2)^{-1} sum_{k != 0} e^{2 pi i k.x} / |k|^2`, split at `t = eta`
/// of `1/|k|^2 = int e^{-t |k|^2} dt`.
fn ewald_square_green(x: [f64; 2]) -> f64 {
    let eta = PI;
    let mut fourier = 0.0;
    for k1 in -12i32..=12 {
        for k2 in -12i32..=12 {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let k2n = (k1 * k1 + k2 * k2) as f64;
            let p = 2.0 * PI * (k1 as f64 * x[0] + k2 as f64 * x[1]);
            fourier += p.cos() * (-eta * k2n).exp() / k2n;
        }
    }
    let mut images = 0.0;
    for n1 in -6i32..=6 {
        for n2 in -6i32..=6 {
            let r2 = (x[0] - n1 as f64).powi(2) + (x[1] - n2 as f64).powi(2);
            images += PI * e1(PI * PI * r2 / eta);
        }
    }
    (fourier + images - eta) / (4.0 * PI * PI)
}

#[test]
fn exponential_integral_reference_values() {
    // Abramowitz and Stegun table values.
    assert!((e1(0.5) - 0.559_773_594_8).abs() < 1e-9);
    assert!((e1(1.0) - 0.219_383_934_4).abs() < 1e-9);
    assert!((e1(2.0) - 0.048_900_510_7).abs() < 1e-9);
    assert!((e1(5.0) - 0.001_148_295_6).abs() < 1e-10);
}

#[test]
fn green_function_matches_ewald_sum() {
    let n = 256;
    let grid = Grid::new(n, FlatModulus::square()).unwrap();
    let g = green_function(&grid, 0);
    for (i1, i2) in [(n / 2, n / 2), (n / 4, n / 2), (n / 4, n / 8)] {
        let x = grid.node(grid.index(i1, i2));
        let exact = ewald_square_green(x);
        let got = g.values[grid.index(i1, i2)];
        assert!((got - exact).abs() < 1e-5, "x = {x:?}: {got} vs {exact}");
    }
    // The far point sees only an alternating tail, which cancels much better.
    let mid = g.values[grid.index(n / 2, n / 2)];
    assert!((mid - ewald_square_green([0.5, 0.5])).abs() < 1e-8);
}

#[test]
fn revolution_energy_matches_direct_quadrature() {
    for c in [1.7f64, 2.5] {
        // Angle chart: kappa_1 = 1, kappa_2 = cos p / (c + cos p), dA = (c + cos p) dp dtheta.
        let m = 4096;
        let w_quad: f64 = (0..m)
            .map(|j| {
                let p = 2.0 * PI * j as f64 / m as f64;
                let rho = c + p.cos();
                let h = 0.5 * (1.0 + p.cos() / rho);
                h * h * rho
            })
            .sum::<f64>()
            * (2.0 * PI / m as f64)
            * 2.0
            * PI;
        let closed = PI * PI * c * c / (c * c - 1.0).sqrt();
        assert!((w_quad / closed - 1.0).abs() < 1e-12);
        let s = surfaces::revolution(64, c).unwrap();
        let w = willmore_energy(&compute_geometry(&s.phi, &s.grid).unwrap());
        assert!((w / w_quad - 1.0).abs() < 1e-9, "c = {c}: {w} vs {w_quad}");
    }
}

fn random_direction(grid: &Grid, m: usize, rng: &mut ChaCha8Rng) -> RealVectorField {
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
    (0..m)
        .map(|c| {
            (0..grid.len())
                .map(|i| {
                    let x = grid.node(i);
                    modes
                        .iter()
                        .enumerate()
                        .map(|(j, (k1, k2, amp, ph))| {
                            let shift = (c * 7 + j) as f64;
                            amp * (2.0 * PI * (k1 * x[0] + k2 * x[1]) + ph + shift).cos()
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn energy_along(s: &pwf_core::flow::FlowState, psi: &RealVectorField, eps: f64) -> f64 {
    let phi: RealVectorField = s
        .phi
        .phi
        .iter()
        .zip(psi)
        .map(|(p, v)| p.iter().zip(v).map(|(a, b)| a + eps * b).collect())
        .collect();
    let field = ImmersionField::new(phi).unwrap();
    willmore_energy(&compute_geometry(&field, &s.grid).unwrap())
}

#[test]
fn gradient_pairing_matches_finite_differences() {
    // A non-critical base: revolution tori are critical only at c = sqrt 2.
    let s = surfaces::revolution(64, 1.8).unwrap();
    let bundle = compute_geometry(&s.phi, &s.grid).unwrap();
    let grad = willmore_gradient(&bundle);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let psi = random_direction(&s.grid, 3, &mut rng);
        let central = |e: f64| (energy_along(&s, &psi, e) - energy_along(&s, &psi, -e)) / (2.0 * e);
        let eps = 1e-3;
        let fd = (4.0 * central(0.5 * eps) - central(eps)) / 3.0;
        let p = pairing(&bundle, &grad.delta_w, &psi);
        assert!((p + fd).abs() <= 1e-6 * fd.abs().max(1.0), "pairing {p}, fd {fd}");
    }
}

#[test]
fn modulus_velocity_moves_the_metric_family() {
    // h(a, b) = b^{-1} |dx1 + tau dx2|^2 has entries (1/b, a/b, (a^2 + b^2)/b).
    let h = |a: f64, b: f64| [1.0 / b, a / b, (a * a + b * b) / b];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let modulus = FlatModulus::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0)).unwrap();
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = modulus_velocity(&QuadDifferential { c }, &modulus).unwrap();
        let e = 1e-5;
        let plus = h(modulus.a + e * v.da_dt, modulus.b + e * v.db_dt);
        let minus = h(modulus.a - e * v.da_dt, modulus.b - e * v.db_dt);
        let tau = modulus.tau();
        let expected = [c.re, (c * tau).re, (c * tau * tau).re];
        for k in 0..3 {
            let fd = (plus[k] - minus[k]) / (2.0 * e);
            assert!((fd - expected[k]).abs() < 1e-8, "{k}: {fd} vs {}", expected[k]);
        }
    }
}

/// Shortest vector by exhaustive search over a wide window.
fn brute_systole(m: &FlatModulus) -> f64 {
    let tau = m.tau();
    let mut best = f64::INFINITY;
    for p in -200i32..=200 {
        for q in -40i32..=40 {
            if p != 0 || q != 0 {
                best = best.min((p as f64 + tau * q as f64).norm());
            }
        }
    }
    best / m.b.sqrt()
}

#[test]
fn systole_against_closed_forms_and_brute_force() {
    let hex = FlatModulus::new(0.5, 0.75f64.sqrt()).unwrap();
    assert!((systole(&hex) - 1.0 / 0.75f64.sqrt().sqrt()).abs() < 1e-14);
    let thin = FlatModulus::new(0.0, 0.25).unwrap();
    assert!((systole(&thin) - 0.5).abs() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let m = FlatModulus::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..3.0)).unwrap();
        assert!((systole(&m) - brute_systole(&m)).abs() < 1e-12, "{m:?}");
    }
}
