use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use pwf_core::dbar::dbar_solve;
use pwf_core::geometry::{compute_geometry, willmore_energy, GeometryBundle, ImmersionField};
use pwf_core::grid::{Deriv, FlatModulus, Grid};
use pwf_core::moduli::{
    bump, concentration, geodesic_distance, project_quadratic, reduce_modulus, systole,
};
use pwf_core::surfaces;

fn grid(n: usize, a: f64, b: f64) -> Grid {
    Grid::new(n, FlatModulus::new(a, b).unwrap()).unwrap()
}

fn perturbed() -> &'static (pwf_core::flow::FlowState, GeometryBundle) {
    static CELL: OnceLock<(pwf_core::flow::FlowState, GeometryBundle)> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = surfaces::clifford_perturbed(16, 6, 0.03).unwrap();
        let b = s.geometry().unwrap();
        (s, b)
    })
}

fn field(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n)
}

fn complex_field(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in field(8)) {
        let g = grid(8, 0.0, 1.0);
        let c = g.forward_real(&f);
        let lhs = f.iter().map(|x| x * x).sum::<f64>() / f.len() as f64;
        let rhs = c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn derivative_is_linear(
        f in complex_field(8), h in complex_field(8),
        s in -2.0f64..2.0, a in -0.5f64..0.5, b in 0.5f64..2.0,
    ) {
        let g = grid(8, a, b);
        let combo: Vec<Complex64> = f.iter().zip(&h).map(|(x, y)| x * s + y).collect();
        for kind in [Deriv::W, Deriv::WBar] {
            let lhs = g.derivative(&combo, kind);
            let df = g.derivative(&f, kind);
            let dh = g.derivative(&h, kind);
            for i in 0..lhs.len() {
                prop_assert!((lhs[i] - (df[i] * s + dh[i])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn dbar_inverts_on_mean_free_data(
        f in complex_field(8), a in -0.5f64..0.5, b in 0.5f64..2.0,
    ) {
        let g = grid(8, a, b);
        let m = f.iter().sum::<Complex64>() / f.len() as f64;
        let f: Vec<Complex64> = f.iter().map(|z| z - m).collect();
        let u = dbar_solve(&f, &g).unwrap();
        let back = g.derivative(&u.u, Deriv::W);
        for (x, y) in back.iter().zip(&f) {
            prop_assert!((x - y).norm() < 1e-10);
        }
        prop_assert!(u.u.iter().sum::<Complex64>().norm() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal(psi in complex_field(8)) {
        let p = project_quadratic(&psi);
        let again = project_quadratic(&p.complement);
        prop_assert!(again.q.c.norm() < 1e-14);
        let n = psi.len() as f64;
        let total = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        let rest = p.complement.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        prop_assert!((total - p.q.c.norm_sqr() - rest).abs() < 1e-12);
    }

    #[test]
    fn bump_is_a_monotone_plateau(s in 0.0f64..1.5, t in 0.0f64..1.5) {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        prop_assert!((0.0..=1.0).contains(&bump(lo)));
        prop_assert!(bump(lo) >= bump(hi));
        prop_assert_eq!(bump(lo), bump(-lo));
    }

    #[test]
    fn concentration_grows_with_radius(r in 0.02f64..0.6, k in 1.0f64..2.0) {
        let (_, b) = perturbed();
        let small = concentration(b, r, 4);
        let large = concentration(b, k * r, 4);
        for (x, y) in small.values.iter().zip(&large.values) {
            prop_assert!(y >= x);
        }
    }

    #[test]
    fn energy_is_invariant_under_rigid_motions(
        theta in 0.0f64..(2.0 * PI), i in 0usize..4, j in 0usize..4,
        shift in -3.0f64..3.0, scale in 0.2f64..5.0,
    ) {
        prop_assume!(i != j);
        let (s, b) = perturbed();
        let w0 = willmore_energy(b);
        let (c, sn) = (theta.cos(), theta.sin());
        let mut phi = s.phi.phi.clone();
        for idx in 0..s.grid.len() {
            let (x, y) = (phi[i][idx], phi[j][idx]);
            phi[i][idx] = c * x - sn * y;
            phi[j][idx] = sn * x + c * y;
        }
        for comp in phi.iter_mut() {
            for v in comp.iter_mut() {
                *v = scale * *v + shift;
            }
        }
        let moved = compute_geometry(&ImmersionField::new(phi).unwrap(), &s.grid).unwrap();
        prop_assert!((willmore_energy(&moved) - w0).abs() < 1e-10 * w0);
    }

    #[test]
    fn distance_is_a_metric(
        a in -1.0f64..1.0, b in 0.3f64..3.0,
        x in (0.0f64..1.0, 0.0f64..1.0), y in (0.0f64..1.0, 0.0f64..1.0), z in (0.0f64..1.0, 0.0f64..1.0),
    ) {
        let m = FlatModulus::new(a, b).unwrap();
        let (x, y, z) = ([x.0, x.1], [y.0, y.1], [z.0, z.1]);
        let dxy = geodesic_distance(&m, x, y);
        prop_assert!((dxy - geodesic_distance(&m, y, x)).abs() < 1e-12);
        prop_assert!(dxy <= geodesic_distance(&m, x, z) + geodesic_distance(&m, z, y) + 1e-12);
        // No point is further than half a period combination away.
        prop_assert!(dxy <= 0.5 * (1.0 + m.tau().norm()) / b.sqrt() + 1e-12);
    }

    #[test]
    fn systole_is_modular_invariant(a in -3.0f64..3.0, b in 0.1f64..3.0) {
        let m = FlatModulus::new(a, b).unwrap();
        let l = systole(&m);
        let shifted = FlatModulus::new(a + 1.0, b).unwrap();
        let inv = -1.0 / m.tau();
        let inverted = FlatModulus::new(inv.re, inv.im).unwrap();
        prop_assert!((systole(&shifted) - l).abs() < 1e-12 * l);
        prop_assert!((systole(&inverted) - l).abs() < 1e-12 * l);
        let r = reduce_modulus(&m);
        prop_assert!(r.a.abs() <= 0.5 + 1e-12 && r.tau().norm() >= 1.0 - 1e-12);
        prop_assert!((systole(&r) - l).abs() < 1e-12 * l);
    }
}
