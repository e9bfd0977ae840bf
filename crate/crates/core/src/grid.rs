//! Periodic N x N sampling of the lattice fundamental domain and spectral calculus on it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

pub type RealField = Vec<f64>;
pub type ComplexField = Vec<Complex64>;
/// Component-major vector field: `field[c][node]`.
pub type RealVectorField = Vec<RealField>;
pub type ComplexVectorField = Vec<ComplexField>;

/// Teichmuller parameter `tau = a + i b` of the unit-volume flat torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatModulus {
    pub a: f64,
    pub b: f64,
}

impl FlatModulus {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > 0.0) {
            return Err(Error::BadModulus { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn square() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// Factor `s_h` with `h = s_h |dw|^2`.
    pub fn metric_scale(&self) -> f64 {
        1.0 / self.b
    }

    /// Constant chart factor `nu` of `h`, `e^{2 nu} = 1/b`.
    pub fn chart_log_factor(&self) -> f64 {
        -0.5 * self.b.ln()
    }

    pub fn volume(&self) -> f64 {
        1.0
    }

    pub fn systole(&self) -> f64 {
        crate::moduli::systole(self)
    }

    /// The chart point `w = x1 + tau x2`.
    pub fn chart(&self, x: [f64; 2]) -> Complex64 {
        Complex64::new(x[0] + self.a * x[1], self.b * x[1])
    }
}

/// Which chart derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    W,
    WBar,
}

/// Uniform grid with cached FFT plans. Cloning is cheap.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    modulus: FlatModulus,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Grid {
    pub fn new(n: usize, modulus: FlatModulus) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::BadGrid(n));
        }
        FlatModulus::new(modulus.a, modulus.b)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            modulus,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    /// Same sampling and plans, different modulus.
    pub fn with_modulus(&self, modulus: FlatModulus) -> Self {
        Self {
            modulus,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn modulus(&self) -> FlatModulus {
        self.modulus
    }

    /// Euclidean chart area of one cell, `b / N^2`.
    pub fn cell_area(&self) -> f64 {
        self.modulus.b / (self.n * self.n) as f64
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n + i2
    }

    pub fn node(&self, idx: usize) -> [f64; 2] {
        let n = self.n as f64;
        [(idx / self.n) as f64 / n, (idx % self.n) as f64 / n]
    }

    /// Signed frequency of FFT index `j`.
    pub fn freq(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    fn wavenumbers(&self, idx: usize) -> (i64, i64) {
        (self.freq(idx / self.n), self.freq(idx % self.n))
    }

    fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        idx / self.n == h || idx % self.n == h
    }

    /// Multiplier of `d_w` on mode `k`: `pi (k2 - conj(tau) k1) / b`.
    pub fn mu(&self, k1: i64, k2: i64) -> Complex64 {
        let FlatModulus { a, b } = self.modulus;
        let (k1, k2) = (k1 as f64, k2 as f64);
        Complex64::new(PI * (k2 - a * k1) / b, PI * k1)
    }

    /// Multiplier of `d_wbar` on mode `k`: `pi (tau k1 - k2) / b`.
    pub fn nu(&self, k1: i64, k2: i64) -> Complex64 {
        -self.mu(k1, k2).conj()
    }

    /// Full derivative symbol on the FFT index `idx`.
    pub fn symbol(&self, idx: usize, kind: Deriv) -> Complex64 {
        let (k1, k2) = self.wavenumbers(idx);
        match kind {
            Deriv::W => self.mu(k1, k2),
            Deriv::WBar => self.nu(k1, k2),
        }
    }

    /// Symbol of the flat chart Laplacian `4 d_w d_wbar`. On Nyquist rows the
    /// cross term is dropped so that the operator maps real fields to real fields.
    pub fn laplacian_symbol(&self, idx: usize) -> f64 {
        let FlatModulus { a, b } = self.modulus;
        let (k1, k2) = self.wavenumbers(idx);
        let (k1, k2) = (k1 as f64, k2 as f64);
        let q = if self.is_nyquist(idx) {
            k2 * k2 + (a * a + b * b) * k1 * k1
        } else {
            (k2 - a * k1).powi(2) + b * b * k1 * k1
        };
        -4.0 * PI * PI * q / (b * b)
    }

    /// 2/3-rule mask.
    pub fn keeps(&self, idx: usize) -> bool {
        let (k1, k2) = self.wavenumbers(idx);
        let n = self.n as i64;
        3 * k1.abs() < n && 3 * k2.abs() < n
    }

    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        for (idx, c) in coeffs.iter_mut().enumerate() {
            if !self.keeps(idx) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn transpose(&self, data: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                data.swap(i * n + j, j * n + i);
            }
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        plan.process(data);
        self.transpose(data);
        plan.process(data);
        self.transpose(data);
    }

    /// Spectral coefficients `c_k = N^{-2} sum_x f(x) e^{-2 pi i k.x}`.
    pub fn forward(&self, f: &[Complex64]) -> ComplexField {
        assert_eq!(f.len(), self.len(), "field does not match grid");
        let mut data = f.to_vec();
        self.transform(&mut data, &self.fwd);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    pub fn forward_real(&self, f: &[f64]) -> ComplexField {
        let c: ComplexField = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&c)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> ComplexField {
        assert_eq!(coeffs.len(), self.len(), "coefficients do not match grid");
        let mut data = coeffs.to_vec();
        self.transform(&mut data, &self.inv);
        data
    }

    pub fn inverse_real(&self, coeffs: &[Complex64]) -> RealField {
        self.inverse(coeffs).into_iter().map(|c| c.re).collect()
    }

    /// Derivative of a complex field with the full symbol.
    pub fn derivative(&self, f: &[Complex64], kind: Deriv) -> ComplexField {
        let mut c = self.forward(f);
        for (idx, v) in c.iter_mut().enumerate() {
            *v *= self.symbol(idx, kind);
        }
        self.inverse(&c)
    }

    /// Derivative of a complex field of nonlinear origin: 2/3-truncated first.
    pub fn derivative_dealiased(&self, f: &[Complex64], kind: Deriv) -> ComplexField {
        let mut c = self.forward(f);
        for (idx, v) in c.iter_mut().enumerate() {
            *v *= if self.keeps(idx) {
                self.symbol(idx, kind)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.inverse(&c)
    }

    /// Derivative of a real field. Nyquist modes are zeroed so that
    /// `d_wbar f = conj(d_w f)` holds exactly.
    pub fn derivative_real(&self, f: &[f64], kind: Deriv) -> ComplexField {
        let c = self.forward_real(f);
        self.inverse(&self.derivative_coeffs(&c, kind))
    }

    /// Applies a derivative symbol to real-field coefficients (Nyquist zeroed).
    pub fn derivative_coeffs(&self, c: &[Complex64], kind: Deriv) -> ComplexField {
        c.iter()
            .enumerate()
            .map(|(idx, &v)| {
                if self.is_nyquist(idx) {
                    Complex64::new(0.0, 0.0)
                } else {
                    v * self.symbol(idx, kind)
                }
            })
            .collect()
    }

    /// Second derivative `d_w d_w` of a real field (Nyquist zeroed).
    pub fn d_ww_coeffs(&self, c: &[Complex64]) -> ComplexField {
        c.iter()
            .enumerate()
            .map(|(idx, &v)| {
                if self.is_nyquist(idx) {
                    Complex64::new(0.0, 0.0)
                } else {
                    let m = self.symbol(idx, Deriv::W);
                    v * m * m
                }
            })
            .collect()
    }

    /// Convenience entry point matching the two chart derivatives.
    pub fn spectral_derivative(&self, f: &[Complex64], kind: Deriv) -> ComplexField {
        self.derivative(f, kind)
    }

    /// Flat chart Laplacian `4 d_w d_wbar` of a real field.
    pub fn laplacian(&self, f: &[f64]) -> RealField {
        let mut c = self.forward_real(f);
        for (idx, v) in c.iter_mut().enumerate() {
            *v *= self.laplacian_symbol(idx);
        }
        self.inverse_real(&c)
    }

    /// Solves `4 d_w d_wbar u = f` with `mean(u) = 0`.
    pub fn solve_poisson(&self, f: &[f64]) -> Result<RealField> {
        let sup = sup_norm(f);
        let mean = mean(f);
        if mean.abs() > 1e-10 * sup.max(f64::MIN_POSITIVE) {
            return Err(Error::NonZeroMean { mean });
        }
        let mut c = self.forward_real(f);
        c[0] = Complex64::new(0.0, 0.0);
        for (idx, v) in c.iter_mut().enumerate().skip(1) {
            *v /= self.laplacian_symbol(idx);
        }
        Ok(self.inverse_real(&c))
    }

    /// Evaluates the trigonometric interpolant of `coeffs` at arbitrary points
    /// of `[0,1)^2`. Nyquist modes are split symmetrically (cosine).
    pub fn interpolate(&self, coeffs: &[Complex64], points: &[[f64; 2]]) -> ComplexField {
        let n = self.n;
        points
            .par_iter()
            .map(|p| {
                let e1 = self.basis_row(p[0]);
                let e2 = self.basis_row(p[1]);
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..n {
                    let row = &coeffs[i1 * n..(i1 + 1) * n];
                    let mut s = Complex64::new(0.0, 0.0);
                    for (c, e) in row.iter().zip(&e2) {
                        s += c * e;
                    }
                    acc += s * e1[i1];
                }
                acc
            })
            .collect()
    }

    fn basis_row(&self, x: f64) -> Vec<Complex64> {
        let n = self.n;
        let step = Complex64::from_polar(1.0, 2.0 * PI * x);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let mut e = Complex64::new(1.0, 0.0);
        for j in 0..n / 2 {
            if j % 16 == 0 {
                e = Complex64::from_polar(1.0, 2.0 * PI * x * j as f64);
            }
            out[j] = e;
            if j > 0 {
                out[n - j] = e.conj();
            }
            e *= step;
        }
        out[n / 2] = Complex64::new((PI * n as f64 * x).cos(), 0.0);
        out
    }
}

pub fn mean<T: Copy + Into<f64>>(f: &[T]) -> f64 {
    f.iter().map(|&x| x.into()).sum::<f64>() / f.len() as f64
}

pub fn mean_complex(f: &[Complex64]) -> Complex64 {
    f.iter().sum::<Complex64>() / f.len() as f64
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sup_norm_complex(f: &[Complex64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.norm()))
}

/// Pointwise Euclidean norm of a real vector field.
pub fn vector_norms(v: &RealVectorField) -> RealField {
    let len = v.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| v.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}

pub fn vector_sup(v: &RealVectorField) -> f64 {
    sup_norm(&vector_norms(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, a: f64, b: f64) -> Grid {
        Grid::new(n, FlatModulus::new(a, b).unwrap()).unwrap()
    }

    fn sample<F: Fn([f64; 2]) -> Complex64>(g: &Grid, f: F) -> ComplexField {
        (0..g.len()).map(|i| f(g.node(i))).collect()
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(Grid::new(7, FlatModulus::square()).unwrap_err(), Error::BadGrid(7));
        assert_eq!(Grid::new(6, FlatModulus::square()).unwrap_err(), Error::BadGrid(6));
        assert!(FlatModulus::new(0.0, 0.0).is_err());
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = grid(16, 0.3, 1.2);
        let one = vec![Complex64::new(1.0, 0.0); g.len()];
        let d = g.derivative(&one, Deriv::W);
        assert!(sup_norm_complex(&d) < 1e-14);
    }

    #[test]
    fn single_mode_square_torus() {
        let g = grid(16, 0.0, 1.0);
        let f = sample(&g, |x| Complex64::from_polar(1.0, 2.0 * PI * x[0]));
        let d = g.derivative(&f, Deriv::W);
        for (di, fi) in d.iter().zip(&f) {
            assert!((di - Complex64::new(0.0, PI) * fi).norm() < 1e-12);
        }
    }

    /// Fourth-order central differences in x1, x2 combined through
    /// d_w = (-conj(tau) d1 + d2) / (2 i b).
    #[test]
    fn matches_finite_difference_oracle() {
        let (a, b) = (0.35, 0.8);
        let g = grid(256, a, b);
        let f = |x: [f64; 2]| {
            Complex64::new(
                (2.0 * PI * x[0]).sin() * (2.0 * PI * (x[0] + 2.0 * x[1])).cos(),
                (2.0 * PI * x[1]).cos(),
            )
        };
        let samples = sample(&g, f);
        let dw = g.derivative(&samples, Deriv::W);
        let dwb = g.derivative(&samples, Deriv::WBar);
        let h = 1e-3;
        let fd = |x: [f64; 2], e: [f64; 2]| {
            let at = |s: f64| f([x[0] + s * e[0], x[1] + s * e[1]]);
            (at(-2.0 * h) - at(2.0 * h) + 8.0 * (at(h) - at(-h))) / (12.0 * h)
        };
        let tau = Complex64::new(a, b);
        let i = Complex64::new(0.0, 1.0);
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for idx in (0..g.len()).step_by(97) {
            let x = g.node(idx);
            let d1 = fd(x, [1.0, 0.0]);
            let d2 = fd(x, [0.0, 1.0]);
            let w = (-tau.conj() * d1 + d2) / (2.0 * i * b);
            let wb = (tau * d1 - d2) / (2.0 * i * b);
            err = err.max((w - dw[idx]).norm()).max((wb - dwb[idx]).norm());
            scale = scale.max(w.norm());
        }
        assert!(err < 1e-6 * scale, "err {err} scale {scale}");
    }

    #[test]
    fn mixed_partials_commute() {
        let g = grid(32, 0.0, 1.0);
        let f = sample(&g, |x| {
            Complex64::new((2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin(), 0.0)
        });
        let a = g.derivative(&g.derivative(&f, Deriv::W), Deriv::WBar);
        let b = g.derivative(&g.derivative(&f, Deriv::WBar), Deriv::W);
        let re: RealField = f.iter().map(|c| c.re).collect();
        let lap = g.laplacian(&re);
        for i in 0..g.len() {
            assert!((a[i] - b[i]).norm() < 1e-12);
            assert!((a[i].re - 0.25 * lap[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn real_field_derivatives_are_conjugate() {
        let g = grid(16, 0.4, 0.7);
        let f: RealField = (0..g.len()).map(|i| ((i * 7919) % 31) as f64 / 31.0).collect();
        let dw = g.derivative_real(&f, Deriv::W);
        let dwb = g.derivative_real(&f, Deriv::WBar);
        for i in 0..g.len() {
            assert!((dw[i].conj() - dwb[i]).norm() < 1e-12);
        }
        let lap = g.laplacian(&f);
        let c = g.forward_real(&lap);
        for (idx, v) in c.iter().enumerate() {
            let (k1, k2) = g.wavenumbers(idx);
            let j = g.index(((-k1).rem_euclid(16)) as usize, ((-k2).rem_euclid(16)) as usize);
            assert!((v - c[j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn poisson_cosine_and_zero() {
        let g = grid(32, 0.0, 1.0);
        let f: RealField = (0..g.len()).map(|i| (2.0 * PI * g.node(i)[0]).cos()).collect();
        let u = g.solve_poisson(&f).unwrap();
        for i in 0..g.len() {
            let exact = -(2.0 * PI * g.node(i)[0]).cos() / (4.0 * PI * PI);
            assert!((u[i] - exact).abs() < 1e-14);
        }
        let z = g.solve_poisson(&vec![0.0; g.len()]).unwrap();
        assert!(sup_norm(&z) == 0.0);
        let bad = vec![1.0; g.len()];
        assert!(matches!(g.solve_poisson(&bad), Err(Error::NonZeroMean { .. })));
    }

    #[test]
    fn interpolation_reproduces_band_limited_fields() {
        let g = grid(16, 0.2, 1.1);
        let f = |x: [f64; 2]| (2.0 * PI * (3.0 * x[0] - 2.0 * x[1])).cos() + (2.0 * PI * x[1]).sin();
        let s: RealField = (0..g.len()).map(|i| f(g.node(i))).collect();
        let c = g.forward_real(&s);
        let pts = [[0.123, 0.456], [0.9, 0.01], [0.5, 0.5]];
        let vals = g.interpolate(&c, &pts);
        for (p, v) in pts.iter().zip(&vals) {
            assert!((v.re - f(*p)).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_keeps_low_modes_only() {
        let g = grid(12, 0.0, 1.0);
        let kept = (0..g.len()).filter(|&i| g.keeps(i)).count();
        assert_eq!(kept, 7 * 7);
    }
}
