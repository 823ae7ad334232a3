//! Spatial symbols of the advection-diffusion operator.
//!
//! Substituting `u(x, t) = u_hat(t) exp(i kappa x)` into
//! `u_t + U u_x = nu u_xx` gives the scalar ODE `u_hat' = delta(kappa) u_hat`.
//! The exact symbol is `delta = -(U i kappa + nu kappa^2)`; the finite
//! difference kinds replace the advective part by the symbol of the stencil
//! and keep the diffusive part exact.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Advection velocity `u` and diffusion coefficient `nu` of the model problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub u: f64,
    pub nu: f64,
}

impl PhysicsParams {
    pub fn new(u: f64, nu: f64) -> Result<Self> {
        let params = Self { u, nu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.u.is_finite() {
            return Err(Error::invalid(format!("advection velocity must be finite, got {}", self.u)));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(format!(
                "diffusion coefficient must be finite and >= 0, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self { u: 1.0, nu: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Exact,
    UpwindFirstOrder,
    CentredSecondOrder,
}

impl SymbolKind {
    pub fn is_finite_difference(self) -> bool {
        !matches!(self, SymbolKind::Exact)
    }
}

/// Maps a wave number to the scalar ODE coefficient.
///
/// `dx` is only read by the finite-difference kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialSymbol {
    pub kind: SymbolKind,
    pub params: PhysicsParams,
    pub dx: f64,
}

impl SpatialSymbol {
    pub fn exact(params: PhysicsParams) -> Self {
        Self { kind: SymbolKind::Exact, params, dx: 1.0 }
    }

    pub fn upwind(params: PhysicsParams, dx: f64) -> Self {
        Self { kind: SymbolKind::UpwindFirstOrder, params, dx }
    }

    pub fn centred(params: PhysicsParams, dx: f64) -> Self {
        Self { kind: SymbolKind::CentredSecondOrder, params, dx }
    }

    /// The exact symbol sharing this symbol's physics.
    pub fn to_exact(&self) -> Self {
        Self::exact(self.params)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.kind.is_finite_difference() && !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::invalid(format!("mesh width must be > 0, got {}", self.dx)));
        }
        Ok(())
    }

    pub fn eval(&self, kappa: f64) -> Complex64 {
        eval_symbol(self, kappa)
    }
}

/// Evaluates the symbol at wave number `kappa`.
pub fn eval_symbol(sym: &SpatialSymbol, kappa: f64) -> Complex64 {
    let PhysicsParams { u, nu } = sym.params;
    let diffusion = Complex64::new(-nu * kappa * kappa, 0.0);
    let advection = match sym.kind {
        SymbolKind::Exact => Complex64::new(0.0, -u * kappa),
        SymbolKind::UpwindFirstOrder => {
            // -U (1 - exp(-i kappa dx)) / dx
            let theta = kappa * sym.dx;
            let half = (0.5 * theta).sin();
            let one_minus = Complex64::new(2.0 * half * half, theta.sin());
            -u * one_minus / sym.dx
        }
        SymbolKind::CentredSecondOrder => Complex64::new(0.0, -u * (kappa * sym.dx).sin() / sym.dx),
    };
    advection + diffusion
}
