//! Pseudo-spectral Gauss-peak experiment.
//!
//! On a periodic domain the linear problem is diagonal in Fourier space, so
//! running Parareal on the semi-discrete system amounts to multiplying each
//! Fourier coefficient by the scalar Parareal stability value of its wave
//! number.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::parareal::{parareal_stability, PararealConfig};

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_DOMAIN_LENGTH: f64 = 4.0;
pub const DEFAULT_CENTER: f64 = 2.0;
pub const DEFAULT_WIDTH: f64 = 0.25;

const SYMMETRY_TOL: f64 = 1e-12;

/// Fourier coefficients of a real periodic field, in FFT order
/// (`0, 1, ..., N/2, -N/2 + 1, ..., -1`).
///
/// Coefficients are normalised so that `u(x_j) = sum_m c_m exp(i kappa_m x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    num_modes: usize,
    domain_length: f64,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_coefficients(domain_length: f64, coefficients: Vec<Complex64>) -> Result<Self> {
        let n = coefficients.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("number of modes must be a power of two >= 2, got {n}")));
        }
        if !(domain_length > 0.0 && domain_length.is_finite()) {
            return Err(Error::invalid(format!("domain length must be > 0, got {domain_length}")));
        }
        let field = Self { num_modes: n, domain_length, coefficients };
        if !field.is_conjugate_symmetric(SYMMETRY_TOL) {
            return Err(Error::invalid("coefficients are not conjugate symmetric (field is not real)"));
        }
        Ok(field)
    }

    /// Transforms real samples on the uniform grid `x_j = j L / N`.
    pub fn from_samples(domain_length: f64, samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&u| Complex64::new(u, 0.0)).collect();
        if n >= 2 {
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        }
        let scale = 1.0 / n.max(1) as f64;
        Self::from_coefficients(domain_length, buf.into_iter().map(|c| c * scale).collect())
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.domain_length / self.num_modes as f64;
        (0..self.num_modes).map(|j| j as f64 * h).collect()
    }

    /// Signed mode number of FFT slot `m`.
    pub fn mode_number(&self, m: usize) -> i64 {
        let n = self.num_modes as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Signed wave number `2 pi s / L` of FFT slot `m`.
    pub fn wave_number(&self, m: usize) -> f64 {
        TAU * self.mode_number(m) as f64 / self.domain_length
    }

    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let n = self.num_modes;
        let scale = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        (0..n).all(|m| (self.coefficients[m] - self.coefficients[(n - m) % n].conj()).norm() <= tol * scale)
    }

    /// Complex physical-space values; the imaginary parts are round-off.
    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.coefficients.clone();
        FftPlanner::new().plan_fft_inverse(self.num_modes).process(&mut buf);
        buf
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().into_iter().map(|z| z.re).collect()
    }

    /// Multiplies mode `m` by `multiplier(|kappa_m|)`, conjugated for negative
    /// modes. The Nyquist mode carries `+kappa` and `-kappa` in equal parts
    /// and is scaled by the real part.
    pub fn evolve_with<F>(&self, mut multiplier: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let n = self.num_modes;
        let mut out = Vec::with_capacity(n);
        for (m, &c) in self.coefficients.iter().enumerate() {
            let s = self.mode_number(m);
            let r = multiplier(self.wave_number(m).abs())?;
            let r = if 2 * s.unsigned_abs() as usize == n {
                Complex64::new(r.re, 0.0)
            } else if s < 0 {
                r.conj()
            } else {
                r
            };
            out.push(c * r);
        }
        Ok(Self { num_modes: n, domain_length: self.domain_length, coefficients: out })
    }
}

/// Samples `exp(-(x - center)^2 / (2 width^2))` and transforms it.
pub fn gauss_initial(num_modes: usize, domain_length: f64, center: f64, width: f64) -> Result<SpectralField> {
    if !(width > 0.0) {
        return Err(Error::invalid(format!("width must be > 0, got {width}")));
    }
    if !(0.0..domain_length).contains(&center) {
        return Err(Error::invalid(format!("center must lie in [0, {domain_length}), got {center}")));
    }
    if num_modes < 2 || !num_modes.is_power_of_two() {
        return Err(Error::invalid(format!("number of modes must be a power of two >= 2, got {num_modes}")));
    }
    let h = domain_length / num_modes as f64;
    let samples: Vec<f64> = (0..num_modes)
        .map(|j| {
            let d = j as f64 * h - center;
            (-d * d / (2.0 * width * width)).exp()
        })
        .collect();
    SpectralField::from_samples(domain_length, &samples)
}

/// Applies `k` Parareal iterations of `cfg` to every mode of `field`.
pub fn evolve_parareal(field: &SpectralField, cfg: &PararealConfig, k: usize) -> Result<SpectralField> {
    let cfg = cfg.with_iterations(k);
    cfg.validate()?;
    field.evolve_with(|kappa| parareal_stability(&cfg, kappa))
}

/// Exact solution of the continuous problem after time `t`.
pub fn evolve_exact(field: &SpectralField, params: crate::symbols::PhysicsParams, t: f64) -> SpectralField {
    let sym = crate::symbols::SpatialSymbol::exact(params);
    field.evolve_with(|kappa| Ok((sym.eval(kappa) * t).exp())).expect("exact evolution is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::{MethodKind, PropagatorSpec};
    use crate::symbols::{PhysicsParams, SpatialSymbol};
    use std::f64::consts::PI;

    fn cfg(nu: f64, nc: usize) -> PararealConfig {
        let sym = SpatialSymbol::exact(PhysicsParams::new(1.0, nu).unwrap());
        PararealConfig::new(
            16,
            0,
            PropagatorSpec::new(MethodKind::BackwardEuler, nc, 1.0, sym),
            PropagatorSpec::new(MethodKind::ExactIntegrator, 1, 1.0, sym),
        )
        .unwrap()
    }

    fn default_field() -> SpectralField {
        gauss_initial(DEFAULT_MODES, DEFAULT_DOMAIN_LENGTH, DEFAULT_CENTER, DEFAULT_WIDTH).unwrap()
    }

    #[test]
    fn wide_gaussian_is_nearly_constant() {
        let f = gauss_initial(64, 4.0, 2.0, 400.0).unwrap();
        let c0 = f.coefficients()[0].norm();
        // the residual curvature (x - 2)^2 / (2 w^2) is not periodic; its
        // first harmonic sits at 2.5e-6 relative to the mean
        assert!(f.coefficients()[1..].iter().all(|c| c.norm() / c0 <= 3e-6));
    }

    #[test]
    fn round_trip_reproduces_samples() {
        let f = default_field();
        let back = f.to_physical_complex();
        for (x, u) in f.grid().iter().zip(&back) {
            let d = x - 2.0;
            let want = (-d * d / (2.0 * 0.25 * 0.25)).exp();
            assert!((u - want).norm() <= 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_continuous_transform() {
        // c_m ~ (w sqrt(2 pi) / L) exp(-kappa^2 w^2 / 2) exp(-i kappa x0)
        let (l, w, x0) = (4.0, 0.25, 2.0);
        let f = default_field();
        for (m, c) in f.coefficients().iter().enumerate() {
            let k = f.wave_number(m);
            let want = Complex64::from_polar(w * (2.0 * PI).sqrt() / l * (-0.5 * k * k * w * w).exp(), -k * x0);
            assert!((c - want).norm() <= 1e-6, "mode {m}");
        }
        // well resolved
        assert!(f.coefficients()[32].norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_initial(63, 4.0, 2.0, 0.25).is_err());
        assert!(gauss_initial(64, 4.0, 4.0, 0.25).is_err());
        assert!(gauss_initial(64, 4.0, 2.0, 0.0).is_err());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 8];
        coeffs[1] = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_coefficients(4.0, coeffs).is_err());
    }

    #[test]
    fn full_iterations_return_to_start() {
        let f = default_field();
        let out = evolve_parareal(&f, &cfg(0.0, 2), 16).unwrap();
        let (u0, u) = (f.to_physical(), out.to_physical());
        let err = u0.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn evolution_keeps_field_real() {
        let f = default_field();
        for k in [0, 5, 10, 15] {
            let out = evolve_parareal(&f, &cfg(0.0, 2), k).unwrap();
            assert!(out.is_conjugate_symmetric(1e-12));
            let phys = out.to_physical_complex();
            let sup = phys.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            assert!(phys.iter().all(|z| z.im.abs() <= 1e-10 * sup));
        }
    }

    #[test]
    fn single_mode_is_scaled() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 16];
        coeffs[3] = Complex64::new(0.5, 0.25);
        coeffs[13] = coeffs[3].conj();
        let field = SpectralField::from_coefficients(4.0, coeffs).unwrap();
        let c = cfg(0.0, 1).with_iterations(4);
        let out = evolve_parareal(&field, &c, 4).unwrap();
        let r = parareal_stability(&c, field.wave_number(3)).unwrap();
        assert!((out.coefficients()[3] - field.coefficients()[3] * r).norm() <= 1e-13);
        assert!((out.coefficients()[13] - field.coefficients()[13] * r.conj()).norm() <= 1e-13);
        assert!(out.coefficients().iter().enumerate().filter(|(m, _)| *m != 3 && *m != 13).all(|(_, c)| c.norm() == 0.0));
    }

    #[test]
    fn strong_diffusion_leaves_the_mean() {
        let f = default_field();
        let out = evolve_parareal(&f, &cfg(10.0, 2), 5).unwrap();
        assert!((out.coefficients()[0] - f.coefficients()[0]).norm() < 1e-15);
        for (m, c) in out.coefficients().iter().enumerate().skip(1) {
            assert!(c.norm() <= 1e-8 * f.coefficients()[m].norm(), "mode {m}");
        }
    }
}
