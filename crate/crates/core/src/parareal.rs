//! Linear Parareal with scalar propagators.
//!
//! With `u_0` fixed, `P` slices and one-slice multipliers `F` (fine) and `G`
//! (coarse), a Parareal sweep is
//!
//! ```text
//! M_g u^k = (M_g - M_f) u^{k-1} + b,   b = (u_0, 0, ..., 0)
//! ```
//!
//! where `M_f`, `M_g` are `(P+1) x (P+1)` unit lower-bidiagonal matrices with
//! `-F`, `-G` on the subdiagonal. Starting from the coarse run
//! `M_g u^0 = b`, the end value after `K` sweeps is
//! `[0 .. 0 1] (sum_{j<=K} E^j) M_g^{-1} b` with `E = I - M_g^{-1} M_f`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::propagators::{slice_propagator, Modifier, PropagatorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PararealConfig {
    /// Number of time slices (one per processor).
    pub p: usize,
    /// Number of Parareal iterations, `0 <= k <= p`.
    pub k: usize,
    pub slice_length: f64,
    pub coarse: PropagatorSpec,
    pub fine: PropagatorSpec,
}

impl PararealConfig {
    pub fn new(p: usize, k: usize, coarse: PropagatorSpec, fine: PropagatorSpec) -> Result<Self> {
        let cfg = Self { p, k, slice_length: coarse.slice_length, coarse, fine };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::invalid("number of slices must be >= 1"));
        }
        if self.k > self.p {
            return Err(Error::invalid(format!("iterations k = {} exceed slices p = {}", self.k, self.p)));
        }
        if self.coarse.slice_length != self.slice_length || self.fine.slice_length != self.slice_length {
            return Err(Error::invalid("coarse and fine propagators must use the configured slice length"));
        }
        if matches!(self.coarse.modifier, Modifier::PhaseOfCoarse(_)) {
            return Err(Error::invalid("phase-of-coarse is only valid on the fine propagator"));
        }
        self.coarse.validate()?;
        self.fine.validate()
    }

    pub fn with_iterations(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    /// Final time `T = P * slice_length`.
    pub fn final_time(&self) -> f64 {
        self.p as f64 * self.slice_length
    }

    /// Fine and coarse one-slice multipliers `(F, G)`.
    pub fn propagators(&self, kappa: f64) -> Result<(Complex64, Complex64)> {
        Ok((slice_propagator(&self.fine, kappa)?, slice_propagator(&self.coarse, kappa)?))
    }
}

/// `(P+1) x (P+1)` unit lower-bidiagonal matrix with `-r` on the subdiagonal.
pub fn build_system_matrix(r: Complex64, p: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(p + 1);
    for i in 1..=p {
        m[(i, i - 1)] = -r;
    }
    m
}

/// Solves `M x = b` for `M = build_system_matrix(r, b.len() - 1)`.
pub fn forward_substitute(r: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    let mut x = Vec::with_capacity(b.len());
    for (i, &bi) in b.iter().enumerate() {
        let carry = if i == 0 { Complex64::new(0.0, 0.0) } else { r * x[i - 1] };
        x.push(bi + carry);
    }
    x
}

/// Error-propagation matrix `E = I - M_g^{-1} M_f`.
pub fn error_matrix(cfg: &PararealConfig, kappa: f64) -> Result<ComplexMatrix> {
    let (f, g) = cfg.propagators(kappa)?;
    Ok(error_matrix_from(f, g, cfg.p))
}

pub fn error_matrix_from(f: Complex64, g: Complex64, p: usize) -> ComplexMatrix {
    let n = p + 1;
    let mf = build_system_matrix(f, p);
    let mut e = ComplexMatrix::identity(n);
    for j in 0..n {
        let col = forward_substitute(g, &mf.column(j));
        for (i, v) in col.into_iter().enumerate() {
            e[(i, j)] -= v;
        }
    }
    e
}

pub fn max_singular_value(e: &ComplexMatrix) -> Result<f64> {
    e.norm2()
}

/// Parareal end values `M_parareal(k)` for every `k = 0..=P` (closed form).
pub fn parareal_stability_all(cfg: &PararealConfig, kappa: f64) -> Result<Vec<Complex64>> {
    let (f, g) = cfg.propagators(kappa)?;
    Ok(stability_sequence(f, g, cfg.p, cfg.p))
}

fn stability_sequence(f: Complex64, g: Complex64, p: usize, k_max: usize) -> Vec<Complex64> {
    let e = error_matrix_from(f, g, p);
    let mut rhs = vec![Complex64::new(0.0, 0.0); p + 1];
    rhs[0] = Complex64::new(1.0, 0.0);
    let coarse = forward_substitute(g, &rhs);

    let mut term = coarse.clone();
    let mut sum = coarse;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(sum[p]);
    for _ in 0..k_max {
        term = e.mul_vec(&term);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        out.push(sum[p]);
    }
    out
}

/// Scalar stability value of Parareal with `cfg.k` iterations over `[0, T]`.
pub fn parareal_stability(cfg: &PararealConfig, kappa: f64) -> Result<Complex64> {
    let (f, g) = cfg.propagators(kappa)?;
    Ok(*stability_sequence(f, g, cfg.p, cfg.k).last().expect("non-empty"))
}

/// Runs the Parareal recurrence literally and returns every iterate
/// `u^0, ..., u^K` (each of length `P+1`).
pub fn parareal_iterates(cfg: &PararealConfig, kappa: f64, u0: Complex64) -> Result<Vec<Vec<Complex64>>> {
    let (f, g) = cfg.propagators(kappa)?;
    let p = cfg.p;
    let mut current = Vec::with_capacity(p + 1);
    current.push(u0);
    for i in 1..=p {
        current.push(g * current[i - 1]);
    }
    let mut history = vec![current];
    for _ in 0..cfg.k {
        let prev = history.last().expect("non-empty");
        let mut next = Vec::with_capacity(p + 1);
        next.push(u0);
        for i in 1..=p {
            next.push(g * next[i - 1] + f * prev[i - 1] - g * prev[i - 1]);
        }
        history.push(next);
    }
    Ok(history)
}

pub fn parareal_iterative_oracle(cfg: &PararealConfig, kappa: f64, u0: Complex64) -> Result<Complex64> {
    let history = parareal_iterates(cfg, kappa, u0)?;
    Ok(*history.last().and_then(|u| u.last()).expect("non-empty"))
}

/// Serial fine solution `(u_0, F u_0, ..., F^P u_0)`.
pub fn fine_solution(cfg: &PararealConfig, kappa: f64, u0: Complex64) -> Result<Vec<Complex64>> {
    let f = slice_propagator(&cfg.fine, kappa)?;
    let mut rhs = vec![Complex64::new(0.0, 0.0); cfg.p + 1];
    rhs[0] = u0;
    Ok(forward_substitute(f, &rhs))
}

/// `d(k) = |M_parareal(k) - F^P|` for `k = 0..=P`.
pub fn defect_curve(cfg: &PararealConfig, kappa: f64) -> Result<Vec<f64>> {
    let (f, g) = cfg.propagators(kappa)?;
    let fine = f.powu(cfg.p as u32);
    Ok(stability_sequence(f, g, cfg.p, cfg.p).into_iter().map(|r| (r - fine).norm()).collect())
}

/// Smallest `k >= 1` with `sigma^k <= tol`, or `None` when `sigma >= 1`.
///
/// The comparison allows a relative slack of `1e-9` in the exponent so that
/// exact powers such as `0.1^2 = 0.01` are not lost to rounding.
pub fn iterations_for_tolerance(sigma: f64, tol: f64) -> Option<usize> {
    if !(sigma < 1.0) || !(sigma >= 0.0) {
        return None;
    }
    if sigma == 0.0 {
        return Some(1);
    }
    let ratio = tol.ln() / sigma.ln();
    let k = (ratio - 1e-9 * ratio.abs().max(1.0)).ceil();
    Some((k as usize).max(1))
}

/// Pipelined cost model with unit cost per time step:
/// serial `P N_f` against `P N_c + k (N_c + N_f)`.
pub fn speedup_for_iterations(cfg: &PararealConfig, k: usize) -> f64 {
    let p = cfg.p as f64;
    let nc = cfg.coarse.steps_per_slice as f64;
    let nf = cfg.fine.steps_per_slice as f64;
    p * nf / (p * nc + k as f64 * (nc + nf))
}

pub fn projected_speedup(cfg: &PararealConfig, kappa: f64, tol: f64) -> Result<Option<f64>> {
    check_speedup_inputs(cfg, tol)?;
    let sigma = max_singular_value(&error_matrix(cfg, kappa)?)?;
    Ok(iterations_for_tolerance(sigma, tol).map(|k| speedup_for_iterations(cfg, k)))
}

pub(crate) fn check_speedup_inputs(cfg: &PararealConfig, tol: f64) -> Result<()> {
    if cfg.coarse.method != cfg.fine.method {
        return Err(Error::invalid(format!(
            "speedup model needs the same method on both levels (coarse {}, fine {})",
            cfg.coarse.method, cfg.fine.method
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub sigma: f64,
    pub defect_per_k: Vec<f64>,
    pub iterations_to_tol: Option<usize>,
}

pub fn convergence_report(cfg: &PararealConfig, kappa: f64, tol: f64) -> Result<ConvergenceReport> {
    let sigma = max_singular_value(&error_matrix(cfg, kappa)?)?;
    Ok(ConvergenceReport {
        sigma,
        defect_per_k: defect_curve(cfg, kappa)?,
        iterations_to_tol: iterations_for_tolerance(sigma, tol),
    })
}
