//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE` plus one flag per configuration
//! key (see [`crate::config::KEYS`]); flags are applied after the file. Output
//! is CSV with a header row, written to `--out` or stdout. Numbers use 17
//! significant digits, undefined values are empty fields.
//!
//! Exit status: 0 on success, 2 for invalid arguments or configuration, 1 for
//! numerical failures and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};

use crate::config::{ExperimentConfig, SweepKind, KEYS};
use crate::dispersion::{dispersion_sweep, single_method_dispersion, DispersionPoint};
use crate::error::Error;
use crate::gauss_peak::{evolve_exact, evolve_parareal, gauss_initial, SpectralField};
use crate::parareal::{
    check_speedup_inputs, defect_curve, error_matrix, iterations_for_tolerance, max_singular_value,
    speedup_for_iterations, PararealConfig,
};

const SUBCOMMANDS: &[(&str, &str)] = &[
    ("dispersion", "phase speed and amplification factor of Parareal per iteration count"),
    ("method-dispersion", "phase speed and amplification factor of the coarse method alone"),
    ("svd", "maximum singular value of the error matrix over dt, kappa or p"),
    ("speedup", "projected speedup over coarse step size and wave number"),
    ("defect", "defect ||u_k - u_fine||_inf / ||u_fine||_inf against the iteration count"),
    ("gauss", "Parareal applied to a Gauss peak (physical field and spectrum)"),
];

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) | Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Maps a library error at one sample point to a CLI failure.
fn at(kappa: f64, k: Option<usize>) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::InvalidConfig(_) => usage(e),
        other => Failure::Numerical(match k {
            Some(k) => format!("numerical failure at kappa = {kappa}, k = {k}: {other}"),
            None => format!("numerical failure at kappa = {kappa}: {other}"),
        }),
    }
}

pub fn command() -> Command {
    let mut root = Command::new("parareal-waves")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Wave-propagation analysis of Parareal for linear advection-diffusion")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in SUBCOMMANDS {
        let mut sub = Command::new(*name)
            .about(*about)
            .arg(Arg::new("config").long("config").value_name("FILE").help("key = value configuration file"));
        for (key, help) in KEYS {
            sub = sub.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*help));
        }
        root = root.subcommand(sub);
    }
    root
}

/// Loads `--config` and applies every flag on top.
fn resolve_config(m: &ArgMatches) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = m.get_one::<String>("config") {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
        cfg.apply_text(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    }
    for (key, _) in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v).map_err(usage)?;
        }
    }
    Ok(cfg)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &str) -> Self {
        Self { text: format!("{header}\n") }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }
}

fn emit(csv: &Csv, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
            }
            fs::write(path, &csv.text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout.write_all(csv.text.as_bytes()).map_err(|e| Failure::Io(format!("cannot write stdout: {e}"))),
    }
}

fn check_iterations(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.k_iters.is_empty() {
        return Err(Failure::Usage("k-iters must not be empty".into()));
    }
    if let Some(k) = cfg.k_iters.iter().find(|&&k| k > cfg.p) {
        return Err(Failure::Usage(format!("iteration count {k} exceeds p = {}", cfg.p)));
    }
    Ok(())
}

fn check_kappas(kappas: &[f64]) -> Result<(), Failure> {
    if kappas.is_empty() {
        return Err(Failure::Usage("kappas must not be empty".into()));
    }
    if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
        return Err(Failure::Usage(format!("wave numbers must be finite and >= 0, got {k}")));
    }
    Ok(())
}

fn warn_jumps(points: &[DispersionPoint], stderr: &mut dyn Write) {
    for pt in points.iter().filter(|p| p.branch_jump) {
        let _ = writeln!(stderr, "warning: possible root branch jump at kappa = {}, k = {}", pt.kappa, pt.k_iter);
    }
}

/// Evaluates every sample up front so failures name their wave number.
fn precheck(par: &PararealConfig, kappas: &[f64]) -> Result<(), Failure> {
    for &kappa in kappas {
        par.propagators(kappa).map_err(at(kappa, None))?;
    }
    Ok(())
}

fn run_dispersion(cfg: &ExperimentConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    check_iterations(cfg)?;
    let par = cfg.parareal().map_err(usage)?;
    let sweep = cfg.sweep_spec();
    sweep.validate().map_err(usage)?;
    precheck(&par, &sweep.kappas())?;
    let points = dispersion_sweep(&par, &sweep).map_err(usage)?;
    warn_jumps(&points, stderr);
    let mut csv = Csv::new("kappa,k_iter,phase_speed,amp_factor");
    for pt in &points {
        csv.row(&[num(pt.kappa), pt.k_iter.to_string(), opt(pt.phase_speed), opt(pt.amp_factor)]);
    }
    emit(&csv, cfg.out.as_deref(), stdout)
}

fn run_method_dispersion(cfg: &ExperimentConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let spec = cfg.coarse_spec().map_err(usage)?;
    let mut sweep = cfg.sweep_spec();
    sweep.iterations = vec![0];
    sweep.validate().map_err(usage)?;
    for kappa in sweep.kappas() {
        crate::propagators::slice_propagator(&spec, kappa).map_err(at(kappa, None))?;
    }
    let points = single_method_dispersion(&spec, &sweep).map_err(usage)?;
    warn_jumps(&points, stderr);
    let mut csv = Csv::new("kappa,phase_speed,amp_factor");
    for pt in &points {
        csv.row(&[num(pt.kappa), opt(pt.phase_speed), opt(pt.amp_factor)]);
    }
    emit(&csv, cfg.out.as_deref(), stdout)
}

fn sigma_at(par: &PararealConfig, kappa: f64) -> Result<f64, Failure> {
    let e = error_matrix(par, kappa).map_err(at(kappa, None))?;
    max_singular_value(&e).map_err(at(kappa, None))
}

fn run_svd(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut csv = Csv::new("sweep_value,kappa,sigma");
    match cfg.sweep {
        SweepKind::Kappa => {
            let par = cfg.parareal().map_err(usage)?;
            let sweep = cfg.sweep_spec();
            sweep.validate().map_err(usage)?;
            for kappa in sweep.kappas() {
                csv.row(&[num(kappa), num(kappa), num(sigma_at(&par, kappa)?)]);
            }
        }
        SweepKind::Dt => {
            check_kappas(&cfg.kappas)?;
            for &dt in &cfg.dt_values {
                let nc = cfg.coarse_steps_for(dt).map_err(usage)?;
                let par = cfg.parareal_with(cfg.p, nc).map_err(usage)?;
                for &kappa in &cfg.kappas {
                    csv.row(&[num(dt), num(kappa), num(sigma_at(&par, kappa)?)]);
                }
            }
        }
        SweepKind::P => {
            check_kappas(&cfg.kappas)?;
            for &p in &cfg.p_values {
                let par = cfg.parareal_with(p, cfg.nc).map_err(usage)?;
                for &kappa in &cfg.kappas {
                    csv.row(&[p.to_string(), num(kappa), num(sigma_at(&par, kappa)?)]);
                }
            }
        }
    }
    emit(&csv, cfg.out.as_deref(), stdout)
}

fn run_speedup(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    check_kappas(&cfg.kappas)?;
    if cfg.dt_values.is_empty() {
        return Err(Failure::Usage("dt-values must not be empty".into()));
    }
    let mut csv = Csv::new("dt_coarse,kappa,k,speedup");
    for &dt in &cfg.dt_values {
        let nc = cfg.coarse_steps_for(dt).map_err(usage)?;
        let par = cfg.parareal_with(cfg.p, nc).map_err(usage)?;
        check_speedup_inputs(&par, cfg.tol).map_err(usage)?;
        for &kappa in &cfg.kappas {
            let sigma = sigma_at(&par, kappa)?;
            let (k, s) = match iterations_for_tolerance(sigma, cfg.tol) {
                Some(k) => (k.to_string(), num(speedup_for_iterations(&par, k))),
                None => (String::new(), String::new()),
            };
            csv.row(&[num(dt), num(kappa), k, s]);
        }
    }
    emit(&csv, cfg.out.as_deref(), stdout)
}

fn run_defect(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    check_kappas(&cfg.kappas)?;
    let par = cfg.parareal().map_err(usage)?;
    let mut csv = Csv::new("kappa,k,defect");
    for &kappa in &cfg.kappas {
        let defects = defect_curve(&par, kappa).map_err(at(kappa, None))?;
        for (k, d) in defects.iter().enumerate() {
            csv.row(&[num(kappa), k.to_string(), num(*d)]);
        }
    }
    emit(&csv, cfg.out.as_deref(), stdout)
}

/// `<stem>_spectrum.csv` next to `out`.
fn spectrum_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "gauss".into());
    out.with_file_name(format!("{stem}_spectrum.csv"))
}

fn run_gauss(cfg: &ExperimentConfig) -> Result<(), Failure> {
    check_iterations(cfg)?;
    let out = cfg.out.clone().ok_or_else(|| Failure::Usage("gauss requires --out".into()))?;
    let out_spectrum = cfg.out_spectrum.clone().unwrap_or_else(|| spectrum_path(&out));
    let par = cfg.parareal().map_err(usage)?;
    let initial = gauss_initial(cfg.modes, cfg.domain_length, cfg.center, cfg.width).map_err(usage)?;

    let mut fields: Vec<(String, SpectralField)> = vec![("initial".into(), initial.clone())];
    for &k in &cfg.k_iters {
        let evolved = evolve_parareal(&initial, &par, k).map_err(|e| match e {
            Error::InvalidConfig(_) => usage(e),
            other => Failure::Numerical(format!("numerical failure at k = {k}: {other}")),
        })?;
        fields.push((k.to_string(), evolved));
    }
    let physics = cfg.physics().map_err(usage)?;
    fields.push(("exact".into(), evolve_exact(&initial, physics, par.final_time())));

    let mut phys = Csv::new("x,k_iter,u");
    let mut spec = Csv::new("mode,kappa,k_iter,abs_coeff");
    let x = initial.grid();
    for (label, field) in &fields {
        for (xj, u) in x.iter().zip(field.to_physical()) {
            phys.row(&[num(*xj), label.clone(), num(u)]);
        }
        for m in 0..=field.num_modes() / 2 {
            spec.row(&[
                m.to_string(),
                num(field.wave_number(m)),
                label.clone(),
                num(field.coefficients()[m].norm()),
            ]);
        }
    }
    let mut sink = std::io::sink();
    emit(&phys, Some(&out), &mut sink)?;
    emit(&spec, Some(&out_spectrum), &mut sink)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().next().unwrap_or("error: invalid arguments");
                    let _ = writeln!(stderr, "{line}");
                    2
                }
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let result = resolve_config(sub).and_then(|cfg| match name {
        "dispersion" => run_dispersion(&cfg, stdout, stderr),
        "method-dispersion" => run_method_dispersion(&cfg, stdout, stderr),
        "svd" => run_svd(&cfg, stdout),
        "speedup" => run_speedup(&cfg, stdout),
        "defect" => run_defect(&cfg, stdout),
        "gauss" => run_gauss(&cfg),
        _ => unreachable!("unknown subcommand {name}"),
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
