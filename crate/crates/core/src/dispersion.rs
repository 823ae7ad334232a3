//! Discrete dispersion relation of Parareal.
//!
//! A stability value `R` over `[0, T]` defines a frequency through
//! `exp(-i omega T) = R`. The complex logarithm only fixes `omega` up to
//! multiples of `2 pi / T`, which is harmless for `T = 1` but picks the
//! wrong branch for long intervals. The update over `[0, P]` is therefore
//! reduced to a single slice by choosing one of its `P`-th roots, and the
//! root is tracked along the wave number sweep so that neighbouring wave
//! numbers end up on the same branch.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parareal::{parareal_stability_all, PararealConfig};
use crate::propagators::{exact_slice_propagator, slice_propagator, PropagatorSpec};

/// Moduli below this are treated as a mode wiped out by the propagator.
pub const ZERO_AMPLITUDE: f64 = 1e-300;

/// One sample of the discrete dispersion relation.
///
/// `phase_speed` and `amp_factor` are `None` when the stability value had
/// zero amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub kappa: f64,
    pub k_iter: usize,
    pub phase_speed: Option<f64>,
    pub amp_factor: Option<f64>,
    /// Selected one-slice propagator.
    pub root: Option<Complex64>,
    /// Set when the selected angle moved by more than `pi/2` from the
    /// previous wave number, i.e. the tracking assumption did not hold.
    pub branch_jump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub num_kappa: usize,
    pub iterations: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { kappa_min: PI / 40.0, kappa_max: PI, num_kappa: 40, iterations: vec![0, 5, 10, 15] }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_min > 0.0) {
            return Err(Error::invalid(format!("kappa_min must be > 0, got {}", self.kappa_min)));
        }
        if !(self.kappa_max <= PI * (1.0 + 1e-12)) || !(self.kappa_max > self.kappa_min) {
            return Err(Error::invalid(format!(
                "need kappa_min < kappa_max <= pi, got [{}, {}]",
                self.kappa_min, self.kappa_max
            )));
        }
        if self.num_kappa < 2 {
            return Err(Error::invalid("num_kappa must be >= 2"));
        }
        Ok(())
    }

    /// Uniform, strictly increasing grid including both end points.
    pub fn kappas(&self) -> Vec<f64> {
        let n = self.num_kappa;
        let h = (self.kappa_max - self.kappa_min) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { self.kappa_max } else { self.kappa_min + i as f64 * h }).collect()
    }
}

/// How the target angle for the next wave number is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tracking {
    /// Target is the angle selected at the previous wave number.
    PreviousRoot,
    /// Target is linearly extrapolated from the two previous selections
    /// (the first step borrows the slope of the exact relation).
    #[default]
    Extrapolated,
}

/// Principal-branch frequency of a one-unit propagator:
/// `omega = i (ln|R| + i arg R)`.
pub fn omega_from_unit_r(r_unit: Complex64) -> Result<Complex64> {
    let modulus = r_unit.norm();
    if modulus < ZERO_AMPLITUDE {
        return Err(Error::ZeroAmplitude { modulus });
    }
    Ok(Complex64::new(-r_unit.arg(), modulus.ln()))
}

/// All `p` roots of `z^p = r`, ordered by branch index.
pub fn pth_roots(r: Complex64, p: usize) -> Vec<Complex64> {
    assert!(p >= 1, "need at least one root");
    let modulus = r.norm().powf(1.0 / p as f64);
    let theta = r.arg();
    (0..p).map(|m| Complex64::from_polar(modulus, (theta + TAU * m as f64) / p as f64)).collect()
}

/// Signed angular difference `a - b` wrapped into `(-pi, pi]`.
fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Index of the root closest in angle (on the circle) to `theta_target`;
/// ties go to the lowest index.
pub fn select_root_index(roots: &[Complex64], theta_target: f64) -> usize {
    assert!(!roots.is_empty(), "no roots to select from");
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, z) in roots.iter().enumerate() {
        let d = angle_diff(z.arg(), theta_target).abs();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    best
}

pub fn select_root(roots: &[Complex64], theta_target: f64) -> Complex64 {
    roots[select_root_index(roots, theta_target)]
}

/// Walks a wave-number grid, choosing the branch of each `p`-th root.
struct BranchTracker {
    tracking: Tracking,
    exact_angle: Box<dyn Fn(f64) -> f64>,
    history: Vec<(f64, f64)>,
}

impl BranchTracker {
    fn new(tracking: Tracking, exact_angle: Box<dyn Fn(f64) -> f64>) -> Self {
        Self { tracking, exact_angle, history: Vec::new() }
    }

    fn target(&self, kappa: f64) -> f64 {
        match (self.tracking, self.history.as_slice()) {
            (_, []) => (self.exact_angle)(kappa),
            (Tracking::PreviousRoot, [.., (_, last)]) => *last,
            (Tracking::Extrapolated, [(k0, t0)]) => t0 + angle_diff((self.exact_angle)(kappa), (self.exact_angle)(*k0)),
            (Tracking::Extrapolated, [.., (k0, t0), (k1, t1)]) => {
                let slope = (t1 - t0) / (k1 - k0);
                t1 + slope * (kappa - k1)
            }
        }
    }

    /// Returns the selected root, its unwrapped angle, and whether the
    /// selection jumped by more than `pi/2`.
    fn select(&mut self, kappa: f64, roots: &[Complex64]) -> (Complex64, f64, bool) {
        let target = self.target(kappa);
        let z = select_root(roots, target);
        let theta = target + angle_diff(z.arg(), target);
        let jump = self.history.last().is_some_and(|&(_, prev)| (theta - prev).abs() >= PI / 2.0);
        self.history.push((kappa, theta));
        (z, theta, jump)
    }
}

fn point(kappa: f64, k_iter: usize, root: Complex64, theta: f64, slice_length: f64, jump: bool) -> DispersionPoint {
    // omega = i log(root) / slice_length on the tracked branch
    let omega_re = -theta / slice_length;
    let omega_im = root.norm().ln() / slice_length;
    DispersionPoint {
        kappa,
        k_iter,
        phase_speed: Some(omega_re / kappa),
        amp_factor: Some(omega_im.exp()),
        root: Some(root),
        branch_jump: jump,
    }
}

fn missing(kappa: f64, k_iter: usize) -> DispersionPoint {
    DispersionPoint { kappa, k_iter, phase_speed: None, amp_factor: None, root: None, branch_jump: false }
}

/// Normalises a sequence of propagators over `p` slices to one slice and
/// converts each to phase speed and amplification factor.
pub fn normalised_dispersion(
    values: &[(f64, Complex64)],
    p: usize,
    slice_length: f64,
    k_iter: usize,
    tracking: Tracking,
    exact_angle: impl Fn(f64) -> f64 + 'static,
) -> Vec<DispersionPoint> {
    let mut tracker = BranchTracker::new(tracking, Box::new(exact_angle));
    values
        .iter()
        .map(|&(kappa, r)| {
            if r.norm() < ZERO_AMPLITUDE {
                return missing(kappa, k_iter);
            }
            let roots = pth_roots(r, p);
            let (z, theta, jump) = tracker.select(kappa, &roots);
            point(kappa, k_iter, z, theta, slice_length, jump)
        })
        .collect()
}

/// Dispersion relation of Parareal for every requested iteration count.
pub fn dispersion_sweep(cfg: &PararealConfig, sweep: &SweepSpec) -> Result<Vec<DispersionPoint>> {
    dispersion_sweep_with(cfg, sweep, Tracking::default())
}

pub fn dispersion_sweep_with(cfg: &PararealConfig, sweep: &SweepSpec, tracking: Tracking) -> Result<Vec<DispersionPoint>> {
    cfg.validate()?;
    sweep.validate()?;
    if let Some(&k) = sweep.iterations.iter().find(|&&k| k > cfg.p) {
        return Err(Error::invalid(format!("iteration {k} exceeds p = {}", cfg.p)));
    }
    let kappas = sweep.kappas();
    // all iteration counts at once, one row per wave number
    let per_kappa = kappas
        .iter()
        .map(|&kappa| parareal_stability_all(cfg, kappa))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(kappas.len() * sweep.iterations.len());
    for &k_iter in &sweep.iterations {
        let values: Vec<(f64, Complex64)> = kappas.iter().zip(&per_kappa).map(|(&kappa, all)| (kappa, all[k_iter])).collect();
        let fine = cfg.fine.clone();
        out.extend(normalised_dispersion(&values, cfg.p, cfg.slice_length, k_iter, tracking, move |kappa| {
            exact_slice_propagator(&fine, kappa).arg()
        }));
    }
    Ok(out)
}

/// Dispersion relation of a single propagator over one slice.
pub fn single_method_dispersion(spec: &PropagatorSpec, sweep: &SweepSpec) -> Result<Vec<DispersionPoint>> {
    spec.validate()?;
    sweep.validate()?;
    let values = sweep
        .kappas()
        .into_iter()
        .map(|kappa| Ok((kappa, slice_propagator(spec, kappa)?)))
        .collect::<Result<Vec<_>>>()?;
    let reference = spec.clone();
    Ok(normalised_dispersion(&values, 1, spec.slice_length, 0, Tracking::Extrapolated, move |kappa| {
        exact_slice_propagator(&reference, kappa).arg()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::MethodKind;
    use crate::symbols::{PhysicsParams, SpatialSymbol};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(nu: f64) -> SpatialSymbol {
        SpatialSymbol::exact(PhysicsParams::new(1.0, nu).unwrap())
    }

    #[test]
    fn omega_examples() {
        let w = omega_from_unit_r(c(0.0, -2.0).exp()).unwrap();
        assert!((w - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(omega_from_unit_r(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let w = omega_from_unit_r(Complex64::from_polar((-0.1f64).exp(), -0.5)).unwrap();
        assert!((w - c(0.5, -0.1)).norm() < 1e-15);
        assert!(matches!(omega_from_unit_r(c(0.0, 0.0)), Err(Error::ZeroAmplitude { .. })));
    }

    #[test]
    fn naive_log_picks_the_wrong_branch() {
        // i log(exp(-4i)) / 2 lands at 2 - pi instead of 2
        let w = Complex64::new(0.0, 1.0) * c(0.0, -4.0).exp().ln() / 2.0;
        assert!((w.re - (2.0 - PI)).abs() < 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let roots = pth_roots(c(1.0, 0.0), 4);
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (z, w) in roots.iter().zip(want) {
            assert!((z - w).norm() < 1e-15);
        }
    }

    #[test]
    fn roots_reproduce_input() {
        for &p in &[1, 2, 3, 16, 64] {
            let r = Complex64::from_polar(0.37, 2.9);
            for z in pth_roots(r, p) {
                assert!((z.powu(p as u32) - r).norm() <= 1e-10 * r.norm());
            }
        }
    }

    #[test]
    fn selection_recovers_correct_branch() {
        let roots = pth_roots(c(0.0, -4.0).exp(), 2);
        let angles: Vec<f64> = roots.iter().map(|z| z.arg()).collect();
        assert!(angles.iter().any(|a| angle_diff(*a, -2.0).abs() < 1e-12));
        assert!(angles.iter().any(|a| angle_diff(*a, -2.0 + PI).abs() < 1e-12));
        let z = select_root(&roots, -2.0);
        assert!((omega_from_unit_r(z).unwrap() - c(2.0, 0.0)).norm() < 1e-12);

        let unity = pth_roots(c(1.0, 0.0), 4);
        assert_eq!(select_root_index(&unity, 0.1), 0);
        assert_eq!(select_root_index(&unity, unity[2].arg()), 2);
        // circular distance: -3.1 is closest to -1 (angle pi)
        assert_eq!(select_root_index(&unity, -3.1), 2);
    }

    #[test]
    fn grid() {
        let sweep = SweepSpec::default();
        let k = sweep.kappas();
        assert_eq!(k.len(), 40);
        assert_eq!(k[39], PI);
        assert!((k[0] - PI / 40.0).abs() < 1e-15);
        assert!(k.windows(2).all(|w| w[1] > w[0]));
        assert!(SweepSpec { kappa_min: 0.0, ..SweepSpec::default() }.validate().is_err());
        assert!(SweepSpec { kappa_max: 4.0, ..SweepSpec::default() }.validate().is_err());
        assert!(SweepSpec { num_kappa: 1, ..SweepSpec::default() }.validate().is_err());
    }

    #[test]
    fn exact_propagators_give_exact_relation() {
        for &nu in &[0.0, 0.1] {
            let exact = PropagatorSpec::new(MethodKind::ExactIntegrator, 1, 1.0, sym(nu));
            let cfg = PararealConfig::new(16, 0, exact.clone(), exact).unwrap();
            let sweep = SweepSpec { iterations: vec![0, 3, 16], ..SweepSpec::default() };
            for pt in dispersion_sweep(&cfg, &sweep).unwrap() {
                assert!((pt.phase_speed.unwrap() - 1.0).abs() < 1e-10, "{pt:?}");
                let amp = (-nu * pt.kappa * pt.kappa).exp();
                assert!((pt.amp_factor.unwrap() - amp).abs() < 1e-10);
                assert!(!pt.branch_jump);
            }
        }
    }

    #[test]
    fn previous_root_tracking_fails_for_many_slices() {
        // with 64 slices the roots are closer than the grid spacing
        let p = 64;
        let sweep = SweepSpec::default();
        let values: Vec<(f64, Complex64)> =
            sweep.kappas().into_iter().map(|k| (k, c(0.0, -k * p as f64).exp())).collect();
        let exact_angle = |k: f64| -k;
        let naive = normalised_dispersion(&values, p, 1.0, 0, Tracking::PreviousRoot, exact_angle);
        assert!(naive.iter().any(|pt| (pt.phase_speed.unwrap() - 1.0).abs() > 1e-3));
        let tracked = normalised_dispersion(&values, p, 1.0, 0, Tracking::Extrapolated, exact_angle);
        assert!(tracked.iter().all(|pt| (pt.phase_speed.unwrap() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn zero_amplitude_points_are_missing() {
        let values = vec![(0.5, c(0.0, -0.5).exp()), (0.6, c(0.0, 0.0)), (0.7, c(0.0, -0.7).exp())];
        let pts = normalised_dispersion(&values, 1, 1.0, 0, Tracking::Extrapolated, |k| -k);
        assert!(pts[1].phase_speed.is_none() && pts[1].amp_factor.is_none());
        assert!((pts[2].phase_speed.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplification_is_independent_of_branch() {
        let cfg = PararealConfig::new(
            16,
            0,
            PropagatorSpec::new(MethodKind::BackwardEuler, 1, 1.0, sym(0.0)),
            PropagatorSpec::new(MethodKind::ExactIntegrator, 1, 1.0, sym(0.0)),
        )
        .unwrap();
        let sweep = SweepSpec { iterations: vec![5, 10], ..SweepSpec::default() };
        for pt in dispersion_sweep(&cfg, &sweep).unwrap() {
            let r = crate::parareal::parareal_stability(&cfg.with_iterations(pt.k_iter), pt.kappa).unwrap();
            let amp = pt.amp_factor.unwrap();
            assert!(amp > 0.0);
            assert!((amp - r.norm().powf(1.0 / 16.0)).abs() < 1e-14);
            let root = pt.root.unwrap();
            assert!((root.powu(16) - r).norm() <= 1e-10 * r.norm());
        }
    }

    #[test]
    fn rejects_iterations_beyond_p() {
        let exact = PropagatorSpec::new(MethodKind::ExactIntegrator, 1, 1.0, sym(0.0));
        let cfg = PararealConfig::new(4, 0, exact.clone(), exact).unwrap();
        let sweep = SweepSpec { iterations: vec![5], ..SweepSpec::default() };
        assert!(dispersion_sweep(&cfg, &sweep).is_err());
    }

    #[test]
    fn backward_euler_alone() {
        let sweep = SweepSpec::default();
        let be = single_method_dispersion(&PropagatorSpec::new(MethodKind::BackwardEuler, 1, 1.0, sym(0.0)), &sweep).unwrap();
        let p = PhysicsParams::new(1.0, 0.0).unwrap();
        let centred = PropagatorSpec::new(MethodKind::BackwardEuler, 1, 1.0, SpatialSymbol::centred(p, 1.0));
        let fd = single_method_dispersion(&centred, &sweep).unwrap();
        let last = sweep.num_kappa - 1;
        assert!(fd[last].amp_factor.unwrap() > be[last].amp_factor.unwrap());

        let upwind = PropagatorSpec::new(MethodKind::BackwardEuler, 1, 1.0, SpatialSymbol::upwind(p, 1.0));
        let up = single_method_dispersion(&upwind, &sweep).unwrap();
        for (u, e) in up.iter().zip(&be).filter(|(u, _)| u.kappa > 2.0) {
            assert!(u.phase_speed.unwrap() < e.phase_speed.unwrap());
        }

        let exact = single_method_dispersion(&PropagatorSpec::new(MethodKind::ExactIntegrator, 1, 1.0, sym(0.1)), &sweep).unwrap();
        for pt in exact {
            assert!((pt.phase_speed.unwrap() - 1.0).abs() < 1e-12);
            assert!((pt.amp_factor.unwrap() - (-0.1 * pt.kappa * pt.kappa).exp()).abs() < 1e-12);
        }
    }
}
