//! Teichmuller side of the torus: systole, flat distance, holomorphic quadratic
//! differentials, the projection onto them, modulus velocities and the
//! concentration function.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::GeometryBundle;
use crate::grid::{mean_complex, FlatModulus};
use crate::{Error, Result};

/// Smallest admissible `b` before the conformal class is declared degenerate.
pub const MODULUS_EPS: f64 = 1e-8;

/// Length of the shortest closed geodesic of `b^{-1} |dw|^2`. The value is
/// invariant under `SL(2, Z)`, so the search runs on the reduced modulus where
/// the shortest lattice vector has small coordinates.
pub fn systole(modulus: &FlatModulus) -> f64 {
    let reduced = reduce_modulus(modulus);
    let tau = reduced.tau();
    let mut best = f64::INFINITY;
    for m in -2i32..=2 {
        for n in -2i32..=2 {
            if m != 0 || n != 0 {
                best = best.min((m as f64 + tau * n as f64).norm());
            }
        }
    }
    best / reduced.b.sqrt()
}

/// Flat distance between two points of `[0,1)^2`. Translates are scanned
/// row by row in `x2`; rows with `b |y| >= best` cannot improve the minimum.
pub fn geodesic_distance(modulus: &FlatModulus, x: [f64; 2], y: [f64; 2]) -> f64 {
    let (d1, d2) = (wrap(x[0] - y[0]), wrap(x[1] - y[1]));
    let (a, b) = (modulus.a, modulus.b);
    let mut best = modulus.chart([d1, d2]).norm();
    let rows = (best / b).ceil() as i64 + 1;
    for n in -rows..=rows {
        let t = d2 - n as f64;
        if b * t.abs() >= best {
            continue;
        }
        let s = d1 + a * t;
        for m in [s.floor(), s.ceil()] {
            best = best.min((s - m).hypot(b * t));
        }
    }
    best / b.sqrt()
}

fn wrap(t: f64) -> f64 {
    t - (t + 0.5).floor()
}

/// Reduces `tau` to the standard fundamental domain of `SL(2, Z)`.
pub fn reduce_modulus(modulus: &FlatModulus) -> FlatModulus {
    let mut tau = modulus.tau();
    for _ in 0..1000 {
        tau.re -= tau.re.round();
        if tau.norm_sqr() < 1.0 - 1e-15 {
            tau = -1.0 / tau;
        } else {
            break;
        }
    }
    FlatModulus {
        a: tau.re,
        b: tau.im,
    }
}

/// `q = c dw (x) dw`; on the torus every holomorphic quadratic differential is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadDifferential {
    pub c: Complex64,
}

impl QuadDifferential {
    /// Pointwise `h`-norm: `|dw|_h = sqrt(b)`, so `|c dw^2|_h = b |c|`.
    pub fn norm_h(&self, modulus: &FlatModulus) -> f64 {
        modulus.b * self.c.norm()
    }

    /// `L^2_h` norm over the unit-volume torus.
    pub fn l2_h(&self, modulus: &FlatModulus) -> f64 {
        self.norm_h(modulus)
    }
}

/// Projection onto holomorphic quadratic differentials and its complement.
#[derive(Debug, Clone)]
pub struct QuadProjection {
    pub q: QuadDifferential,
    pub complement: Vec<Complex64>,
}

/// `L^2_h` projection of `psi dw^2`; the weight is constant, so it is the mean.
pub fn project_quadratic(psi: &[Complex64]) -> QuadProjection {
    let c = mean_complex(psi);
    QuadProjection {
        q: QuadDifferential { c },
        complement: psi.iter().map(|p| p - c).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusVelocity {
    pub da_dt: f64,
    pub db_dt: f64,
}

/// Converts a metric velocity `dh/dt = Re[c dw^2]` on the fixed lattice into
/// the motion of `(a, b)` in the family `h(a,b) = b^{-1}|dx1 + (a + ib) dx2|^2`.
pub fn modulus_velocity(q: &QuadDifferential, modulus: &FlatModulus) -> Result<ModulusVelocity> {
    let b = modulus.b;
    if b <= MODULUS_EPS {
        return Err(Error::SingularModulus { b });
    }
    Ok(ModulusVelocity {
        da_dt: -b * b * q.c.im,
        db_dt: -b * b * q.c.re,
    })
}

/// Smooth plateau cutoff: 1 on `[-1/2, 1/2]`, 0 outside `(-1, 1)`.
pub fn bump(s: f64) -> f64 {
    let s = s.abs();
    if s <= 0.5 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let psi = |t: f64| (-1.0 / t).exp();
    let a = psi(1.0 - s);
    a / (a + psi(s - 0.5))
}

#[derive(Debug, Clone)]
pub struct ConcentrationMap {
    pub centers: Vec<[f64; 2]>,
    pub radius: f64,
    pub values: Vec<f64>,
    pub sup_value: f64,
}

/// `E(R, x0) = int |II|^2 chi(d_h(x, x0) / R) dvol_g` at every `stride`-th node.
pub fn concentration(bundle: &GeometryBundle, radius: f64, stride: usize) -> ConcentrationMap {
    let grid = &bundle.grid;
    let modulus = grid.modulus();
    let n = grid.n();
    let stride = stride.max(1);
    let density: Vec<f64> = (0..grid.len())
        .map(|i| bundle.sff_sq[i] * bundle.area_density[i] * grid.cell_area())
        .collect();
    let nodes: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let centers: Vec<[f64; 2]> = (0..n)
        .step_by(stride)
        .flat_map(|i1| (0..n).step_by(stride).map(move |i2| (i1, i2)))
        .map(|(i1, i2)| grid.node(grid.index(i1, i2)))
        .collect();
    let values: Vec<f64> = centers
        .par_iter()
        .map(|x0| {
            nodes
                .iter()
                .zip(&density)
                .map(|(x, d)| d * bump(geodesic_distance(&modulus, *x, *x0) / radius))
                .sum()
        })
        .collect();
    let sup_value = values.iter().cloned().fold(0.0, f64::max);
    ConcentrationMap {
        centers,
        radius,
        values,
        sup_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn systole_examples() {
        assert!((systole(&FlatModulus::square()) - 1.0).abs() < 1e-15);
        let rect = FlatModulus::new(0.0, 4.0).unwrap();
        assert!((systole(&rect) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let m = FlatModulus::square();
        assert_eq!(geodesic_distance(&m, [0.3, 0.4], [0.3, 0.4]), 0.0);
        assert!((geodesic_distance(&m, [0.0, 0.0], [0.5, 0.0]) - 0.5).abs() < 1e-15);
        assert!((geodesic_distance(&m, [0.0, 0.0], [0.9, 0.0]) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.3), 1.0);
        assert_eq!(bump(-0.5), 1.0);
        assert_eq!(bump(1.0), 0.0);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = bump(0.5 + 0.005 * k as f64);
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn projection_examples() {
        let c = Complex64::new(3.0, 4.0);
        let p = project_quadratic(&[c; 16]);
        assert!((p.q.c - c).norm() < 1e-15);
        assert!(p.complement.iter().all(|z| z.norm() < 1e-15));
        let psi: Vec<Complex64> = (0..16)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 16.0))
            .collect();
        let p = project_quadratic(&psi);
        assert!(p.q.c.norm() < 1e-15);
    }

    #[test]
    fn singular_modulus() {
        let q = QuadDifferential { c: Complex64::new(1.0, 0.0) };
        let m = FlatModulus { a: 0.0, b: 1e-9 };
        assert!(matches!(modulus_velocity(&q, &m), Err(Error::SingularModulus { .. })));
    }

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        let m = reduce_modulus(&FlatModulus::new(2.3, 0.2).unwrap());
        assert!(m.a.abs() <= 0.5 + 1e-12);
        assert!(m.a * m.a + m.b * m.b >= 1.0 - 1e-12);
    }
}
