//! Flat `key = value` experiment configuration.
//!
//! Keys are the long CLI flag names without the leading dashes, so a config
//! file and the equivalent command line go through the same [`ExperimentConfig::set`].
//! Lines starting with `#` and blank lines are ignored; unknown or repeated
//! keys are errors.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dispersion::SweepSpec;
use crate::error::{Error, Result};
use crate::gauss_peak;
use crate::parareal::PararealConfig;
use crate::propagators::{MethodKind, Modifier, PropagatorSpec};
use crate::symbols::{PhysicsParams, SpatialSymbol, SymbolKind};

impl SymbolKind {
    pub fn name(self) -> &'static str {
        match self {
            SymbolKind::Exact => "exact",
            SymbolKind::UpwindFirstOrder => "upwind",
            SymbolKind::CentredSecondOrder => "centred",
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymbolKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SymbolKind::Exact),
            "upwind" => Ok(SymbolKind::UpwindFirstOrder),
            "centred" | "centered" => Ok(SymbolKind::CentredSecondOrder),
            other => Err(format!("unknown symbol `{other}` (expected exact, upwind or centred)")),
        }
    }
}

/// Modifier selection without the embedded coarse spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModifierKind {
    None,
    ExactPhase,
    ExactAmplitude,
    PhaseOfCoarse,
}

impl ModifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ModifierKind::None => "none",
            ModifierKind::ExactPhase => "exact-phase",
            ModifierKind::ExactAmplitude => "exact-amplitude",
            ModifierKind::PhaseOfCoarse => "phase-of-coarse",
        }
    }
}

impl fmt::Display for ModifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(ModifierKind::None),
            "exact-phase" => Ok(ModifierKind::ExactPhase),
            "exact-amplitude" => Ok(ModifierKind::ExactAmplitude),
            "phase-of-coarse" => Ok(ModifierKind::PhaseOfCoarse),
            other => Err(format!(
                "unknown modifier `{other}` (expected none, exact-phase, exact-amplitude or phase-of-coarse)"
            )),
        }
    }
}

/// Independent variable of a singular value sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Dt,
    Kappa,
    P,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Dt => "dt",
            SweepKind::Kappa => "kappa",
            SweepKind::P => "p",
        })
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dt" => Ok(SweepKind::Dt),
            "kappa" => Ok(SweepKind::Kappa),
            "p" => Ok(SweepKind::P),
            other => Err(format!("unknown sweep `{other}` (expected dt, kappa or p)")),
        }
    }
}

/// Every recognised key with a short description, in canonical order.
pub const KEYS: &[(&str, &str)] = &[
    ("p", "number of time slices (processors)"),
    ("k-iters", "comma-separated Parareal iteration counts"),
    ("coarse", "coarse method: exact, be, trap"),
    ("nc", "coarse steps per slice"),
    ("symbol", "coarse spatial symbol: exact, upwind, centred"),
    ("modifier", "coarse modifier: none, exact-phase, exact-amplitude"),
    ("fine", "fine method: exact, be, trap"),
    ("nf", "fine steps per slice"),
    ("fine-symbol", "fine spatial symbol: exact, upwind, centred"),
    ("fine-modifier", "fine modifier: none, exact-phase, exact-amplitude, phase-of-coarse"),
    ("u", "advection velocity"),
    ("nu", "diffusion coefficient"),
    ("dx", "mesh width of finite-difference symbols"),
    ("slice-length", "length of one time slice"),
    ("num-kappa", "number of wave numbers in kappa sweeps"),
    ("kappa-min", "smallest wave number of kappa sweeps"),
    ("kappa-max", "largest wave number of kappa sweeps"),
    ("sweep", "singular value sweep variable: dt, kappa, p"),
    ("kappas", "comma-separated wave numbers for dt/p sweeps, defects and speedup"),
    ("dt-values", "comma-separated coarse step sizes"),
    ("p-values", "comma-separated processor counts"),
    ("tol", "tolerance for the iteration count sigma^k <= tol"),
    ("modes", "number of Fourier modes (power of two)"),
    ("domain-length", "length of the periodic domain"),
    ("center", "centre of the Gauss peak"),
    ("width", "width of the Gauss peak"),
    ("out", "output CSV path (stdout when absent)"),
    ("out-spectrum", "spectrum CSV path for the gauss command"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub p: usize,
    pub k_iters: Vec<usize>,
    pub coarse: MethodKind,
    pub nc: usize,
    pub symbol: SymbolKind,
    pub modifier: ModifierKind,
    pub fine: MethodKind,
    pub nf: usize,
    pub fine_symbol: SymbolKind,
    pub fine_modifier: ModifierKind,
    pub u: f64,
    pub nu: f64,
    pub dx: f64,
    pub slice_length: f64,
    pub num_kappa: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub sweep: SweepKind,
    pub kappas: Vec<f64>,
    pub dt_values: Vec<f64>,
    pub p_values: Vec<usize>,
    pub tol: f64,
    pub modes: usize,
    pub domain_length: f64,
    pub center: f64,
    pub width: f64,
    pub out: Option<PathBuf>,
    pub out_spectrum: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 16,
            k_iters: vec![0, 5, 10, 15],
            coarse: MethodKind::BackwardEuler,
            nc: 1,
            symbol: SymbolKind::Exact,
            modifier: ModifierKind::None,
            fine: MethodKind::ExactIntegrator,
            nf: 1,
            fine_symbol: SymbolKind::Exact,
            fine_modifier: ModifierKind::None,
            u: 1.0,
            nu: 0.0,
            dx: 1.0,
            slice_length: 1.0,
            num_kappa: 40,
            kappa_min: PI / 40.0,
            kappa_max: PI,
            sweep: SweepKind::Kappa,
            kappas: vec![0.45, 0.9, 2.69],
            dt_values: vec![0.05, 0.1, 0.2, 0.25, 0.5, 1.0],
            p_values: vec![2, 4, 8, 16, 32, 64],
            tol: 0.01,
            modes: gauss_peak::DEFAULT_MODES,
            domain_length: gauss_peak::DEFAULT_DOMAIN_LENGTH,
            center: gauss_peak::DEFAULT_CENTER,
            width: gauss_peak::DEFAULT_WIDTH,
            out: None,
            out_spectrum: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::invalid(format!("{key}: cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|item| parse(key, item.trim())).collect()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "p" => self.p = parse(key, v)?,
            "k-iters" => self.k_iters = parse_list(key, v)?,
            "coarse" => self.coarse = parse(key, v)?,
            "nc" => self.nc = parse(key, v)?,
            "symbol" => self.symbol = parse(key, v)?,
            "modifier" => self.modifier = parse(key, v)?,
            "fine" => self.fine = parse(key, v)?,
            "nf" => self.nf = parse(key, v)?,
            "fine-symbol" => self.fine_symbol = parse(key, v)?,
            "fine-modifier" => self.fine_modifier = parse(key, v)?,
            "u" => self.u = parse(key, v)?,
            "nu" => self.nu = parse(key, v)?,
            "dx" => self.dx = parse(key, v)?,
            "slice-length" => self.slice_length = parse(key, v)?,
            "num-kappa" => self.num_kappa = parse(key, v)?,
            "kappa-min" => self.kappa_min = parse(key, v)?,
            "kappa-max" => self.kappa_max = parse(key, v)?,
            "sweep" => self.sweep = parse(key, v)?,
            "kappas" => self.kappas = parse_list(key, v)?,
            "dt-values" => self.dt_values = parse_list(key, v)?,
            "p-values" => self.p_values = parse_list(key, v)?,
            "tol" => self.tol = parse(key, v)?,
            "modes" => self.modes = parse(key, v)?,
            "domain-length" => self.domain_length = parse(key, v)?,
            "center" => self.center = parse(key, v)?,
            "width" => self.width = parse(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "out-spectrum" => self.out_spectrum = Some(PathBuf::from(v)),
            other => return Err(Error::invalid(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Canonical textual value of `key`; `None` for unset optional keys.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "p" => self.p.to_string(),
            "k-iters" => join(&self.k_iters),
            "coarse" => self.coarse.to_string(),
            "nc" => self.nc.to_string(),
            "symbol" => self.symbol.to_string(),
            "modifier" => self.modifier.to_string(),
            "fine" => self.fine.to_string(),
            "nf" => self.nf.to_string(),
            "fine-symbol" => self.fine_symbol.to_string(),
            "fine-modifier" => self.fine_modifier.to_string(),
            "u" => self.u.to_string(),
            "nu" => self.nu.to_string(),
            "dx" => self.dx.to_string(),
            "slice-length" => self.slice_length.to_string(),
            "num-kappa" => self.num_kappa.to_string(),
            "kappa-min" => self.kappa_min.to_string(),
            "kappa-max" => self.kappa_max.to_string(),
            "sweep" => self.sweep.to_string(),
            "kappas" => join(&self.kappas),
            "dt-values" => join(&self.dt_values),
            "p-values" => join(&self.p_values),
            "tol" => self.tol.to_string(),
            "modes" => self.modes.to_string(),
            "domain-length" => self.domain_length.to_string(),
            "center" => self.center.to_string(),
            "width" => self.width.to_string(),
            "out" => self.out.as_ref()?.display().to_string(),
            "out-spectrum" => self.out_spectrum.as_ref()?.display().to_string(),
            _ => return None,
        })
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::invalid(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            self.set(key, value).map_err(|e| match e {
                Error::InvalidConfig(msg) => Error::invalid(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Canonical form: every key in [`KEYS`] order, unset optional keys omitted.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .filter_map(|(key, _)| self.get(key).map(|v| format!("{key} = {v}\n")))
            .collect()
    }

    pub fn physics(&self) -> Result<PhysicsParams> {
        PhysicsParams::new(self.u, self.nu)
    }

    fn spatial_symbol(&self, kind: SymbolKind) -> Result<SpatialSymbol> {
        let sym = SpatialSymbol { kind, params: self.physics()?, dx: self.dx };
        sym.validate()?;
        Ok(sym)
    }

    pub fn coarse_spec(&self) -> Result<PropagatorSpec> {
        self.coarse_spec_with_steps(self.nc)
    }

    pub fn coarse_spec_with_steps(&self, nc: usize) -> Result<PropagatorSpec> {
        let base = PropagatorSpec::new(self.coarse, nc, self.slice_length, self.spatial_symbol(self.symbol)?);
        let modifier = match self.modifier {
            ModifierKind::None => Modifier::None,
            ModifierKind::ExactPhase => Modifier::ExactPhase,
            ModifierKind::ExactAmplitude => Modifier::ExactAmplitude,
            ModifierKind::PhaseOfCoarse => {
                return Err(Error::invalid("phase-of-coarse is only valid as fine-modifier"));
            }
        };
        let spec = base.with_modifier(modifier);
        spec.validate()?;
        Ok(spec)
    }

    pub fn fine_spec(&self, coarse: &PropagatorSpec) -> Result<PropagatorSpec> {
        let base = PropagatorSpec::new(self.fine, self.nf, self.slice_length, self.spatial_symbol(self.fine_symbol)?);
        let modifier = match self.fine_modifier {
            ModifierKind::None => Modifier::None,
            ModifierKind::ExactPhase => Modifier::ExactPhase,
            ModifierKind::ExactAmplitude => Modifier::ExactAmplitude,
            ModifierKind::PhaseOfCoarse => Modifier::PhaseOfCoarse(Box::new(coarse.clone())),
        };
        let spec = base.with_modifier(modifier);
        spec.validate()?;
        Ok(spec)
    }

    /// Parareal configuration with `k = 0`; callers pick iteration counts.
    pub fn parareal(&self) -> Result<PararealConfig> {
        self.parareal_with(self.p, self.nc)
    }

    pub fn parareal_with(&self, p: usize, nc: usize) -> Result<PararealConfig> {
        let coarse = self.coarse_spec_with_steps(nc)?;
        let fine = self.fine_spec(&coarse)?;
        PararealConfig::new(p, 0, coarse, fine)
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            kappa_min: self.kappa_min,
            kappa_max: self.kappa_max,
            num_kappa: self.num_kappa,
            iterations: self.k_iters.clone(),
        }
    }

    /// Coarse steps per slice for step size `dt`; the slice must be an
    /// integer multiple of `dt`.
    pub fn coarse_steps_for(&self, dt: f64) -> Result<usize> {
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("coarse step must be > 0, got {dt}")));
        }
        let ratio = self.slice_length / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio {
            return Err(Error::invalid(format!(
                "slice length {} is not an integer multiple of dt = {dt}",
                self.slice_length
            )));
        }
        Ok(steps as usize)
    }
}
