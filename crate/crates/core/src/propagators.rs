//! One-slice stability values of coarse and fine propagators.
//!
//! A propagator is a one-step method applied `steps_per_slice` times over a
//! slice of length `slice_length`, acting on the scalar ODE produced by a
//! [`SpatialSymbol`]. Optionally the polar form of the result is recombined
//! with the exact integrator (or with a coarse propagator) through a
//! [`Modifier`], which yields propagators with an exact phase or an exact
//! amplitude.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbols::SpatialSymbol;

/// Denominators smaller than this are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    ExactIntegrator,
    BackwardEuler,
    TrapezoidalRule,
}

impl MethodKind {
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::ExactIntegrator => "exact",
            MethodKind::BackwardEuler => "be",
            MethodKind::TrapezoidalRule => "trap",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MethodKind::ExactIntegrator),
            "be" | "backward-euler" => Ok(MethodKind::BackwardEuler),
            "trap" | "trapezoidal" => Ok(MethodKind::TrapezoidalRule),
            other => Err(format!("unknown method `{other}` (expected exact, be or trap)")),
        }
    }
}

/// Stability function of `method` at `z = lambda * h`.
pub fn one_step_stability(method: MethodKind, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    match method {
        MethodKind::ExactIntegrator => Ok(z.exp()),
        MethodKind::BackwardEuler => {
            let den = one - z;
            if den.norm() < POLE_THRESHOLD {
                return Err(Error::Pole { z });
            }
            Ok(one / den)
        }
        MethodKind::TrapezoidalRule => {
            let den = one - 0.5 * z;
            if den.norm() < POLE_THRESHOLD {
                return Err(Error::Pole { z });
            }
            Ok((one + 0.5 * z) / den)
        }
    }
}

/// Post-processing of a propagator's polar form.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Modifier {
    #[default]
    None,
    /// Keep `|R|`, take the angle of the exact integrator.
    ExactPhase,
    /// Keep the angle of `R`, take the modulus of the exact integrator.
    ExactAmplitude,
    /// Keep `|R|`, take the angle of the given (coarse) propagator.
    PhaseOfCoarse(Box<PropagatorSpec>),
}

impl Modifier {
    pub fn name(&self) -> &'static str {
        match self {
            Modifier::None => "none",
            Modifier::ExactPhase => "exact-phase",
            Modifier::ExactAmplitude => "exact-amplitude",
            Modifier::PhaseOfCoarse(_) => "phase-of-coarse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSpec {
    pub method: MethodKind,
    pub steps_per_slice: usize,
    pub slice_length: f64,
    pub symbol: SpatialSymbol,
    pub modifier: Modifier,
}

impl PropagatorSpec {
    pub fn new(method: MethodKind, steps_per_slice: usize, slice_length: f64, symbol: SpatialSymbol) -> Self {
        Self { method, steps_per_slice, slice_length, symbol, modifier: Modifier::None }
    }

    pub fn with_modifier(mut self, modifier: Modifier) -> Self {
        self.modifier = modifier;
        self
    }

    pub fn step_size(&self) -> f64 {
        self.slice_length / self.steps_per_slice as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_slice == 0 {
            return Err(Error::invalid("steps per slice must be >= 1"));
        }
        if !(self.slice_length > 0.0 && self.slice_length.is_finite()) {
            return Err(Error::invalid(format!("slice length must be > 0, got {}", self.slice_length)));
        }
        self.symbol.validate()?;
        if let Modifier::PhaseOfCoarse(inner) = &self.modifier {
            if matches!(inner.modifier, Modifier::PhaseOfCoarse(_)) {
                return Err(Error::invalid("phase-of-coarse modifiers cannot be nested"));
            }
            if inner.slice_length != self.slice_length {
                return Err(Error::invalid("phase-of-coarse reference must share the slice length"));
            }
            inner.validate()?;
        }
        Ok(())
    }
}

/// The exact integrator of the continuous problem over one slice.
pub fn exact_slice_propagator(spec: &PropagatorSpec, kappa: f64) -> Complex64 {
    (spec.symbol.to_exact().eval(kappa) * spec.slice_length).exp()
}

/// Stability value of `spec` over one slice at wave number `kappa`.
pub fn slice_propagator(spec: &PropagatorSpec, kappa: f64) -> Result<Complex64> {
    let z = spec.symbol.eval(kappa) * spec.step_size();
    let r = one_step_stability(spec.method, z)?.powu(spec.steps_per_slice as u32);
    Ok(match &spec.modifier {
        Modifier::None => r,
        Modifier::ExactPhase => Complex64::from_polar(r.norm(), exact_slice_propagator(spec, kappa).arg()),
        Modifier::ExactAmplitude => Complex64::from_polar(exact_slice_propagator(spec, kappa).norm(), r.arg()),
        Modifier::PhaseOfCoarse(coarse) => Complex64::from_polar(r.norm(), slice_propagator(coarse, kappa)?.arg()),
    })
}
