use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use gho_core::coherent::{
    coherent_wavefunction, expectation_mu, expectation_pi, quadrature_moments, uncertainties,
    CoherentState, QuadratureMoments, DEFAULT_TAIL_TOL,
};
use gho_core::oscillator::{
    base_potential, effective_potential, GridSamples, LadderOps, MAX_HERMITE_DEGREE,
};
use gho_core::spectral::{resolve_grid, GridPolicy, DEFAULT_GRID_POINTS};
use gho_core::{
    gho_ordering, verify, Domain, Grid, MassKind, MassSpec, MuMap, RangeClass, SampledProfile,
    Verdict, VerifyConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "gho",
    version,
    about = "Generalized harmonic oscillator with position-dependent mass"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in mass profiles.
    Catalog,
    /// Write x, m, mu, V, V_eff and psi_n columns as CSV.
    Curves {
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Quantum numbers: a single K selects psi_0..psi_{K-1}, a list selects those levels.
        #[arg(short = 'n', long = "n", default_value = "4")]
        levels: String,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagonalize the discretized Hamiltonian and write a JSON report.
    Verify {
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Eigenvalue tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Output JSON path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherent-state profile (CSV) and moments (JSON).
    Coherent {
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Amplitude as "re,im" (or "re").
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        z: String,
        /// Poisson tail bound for the truncation.
        #[arg(long)]
        tol: Option<f64>,
        /// Profile CSV path; the JSON goes next to it with a .json extension.
        /// Without it only the JSON is printed to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct MassArgs {
    /// Mass kind (see `gho catalog`).
    #[arg(long)]
    mass: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// CSV table with x,m columns for a custom mass.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long = "grid-n", env = "GHO_DEFAULT_GRID_N", default_value_t = DEFAULT_GRID_POINTS)]
    grid_n: usize,
    #[arg(long, allow_negative_numbers = true)]
    xlo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xhi: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Errors past argument parsing are validation failures and exit 2.
fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Catalog => {
            print!("{}", catalog_table());
            Ok(ExitCode::SUCCESS)
        }
        Command::Curves {
            mass,
            grid,
            levels,
            out,
        } => {
            let spec = build_spec(&mass, &grid)?;
            let levels = parse_levels(&levels)?;
            let csv = curves_csv(&spec, &grid, &levels)?;
            emit(out.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            mass,
            grid,
            tol,
            out,
        } => {
            let spec = build_spec(&mass, &grid)?;
            let mut config = VerifyConfig {
                grid: grid_policy(&grid)?,
                ..VerifyConfig::default()
            };
            if let Some(t) = tol {
                if !(t > 0.0 && t.is_finite()) {
                    bail!("--tol must be a positive number, got {t}");
                }
                config.tolerances.eigenvalue = t;
            }
            let report = verify(&spec, &config)?;
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            emit(out.as_deref(), &json)?;
            eprintln!(
                "{}: {} (max eigenvalue error {:.3e})",
                report.mass_id, report.verdict, report.max_eigenvalue_error
            );
            Ok(if report.verdict == Verdict::Fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Coherent {
            mass,
            grid,
            z,
            tol,
            out,
        } => {
            let spec = build_spec(&mass, &grid)?;
            let z = parse_z(&z)?;
            let (csv, json) = coherent_outputs(&spec, &grid, z, tol.unwrap_or(DEFAULT_TAIL_TOL))?;
            match out {
                Some(path) => {
                    write_atomic(&path, &csv)?;
                    write_atomic(&path.with_extension("json"), &json)?;
                }
                None => print!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn catalog_note(kind: MassKind) -> &'static str {
    match kind {
        MassKind::Constant => "full line; ordinary oscillator",
        MassKind::RationalSquare => "full line; a=1 ⇒ constant mass",
        MassKind::Exponential => "half line; orthogonality caveat",
        MassKind::TanhShift => "half line",
        MassKind::PowerLaw => "x>0; half line unless a=-2 (full line)",
        MassKind::SechSquare => "bounded μ-range: excluded",
        MassKind::LorentzSquare => "bounded μ-range: excluded",
        MassKind::Custom => "",
    }
}

fn catalog_table() -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<16}{:<8}{:<24}{:<10}note",
        "kind", "params", "m(x)", "mu closed"
    );
    for kind in MassKind::CATALOG {
        let params = kind.param_names().join(",");
        let _ = writeln!(
            s,
            "{:<16}{:<8}{:<24}{:<10}{}",
            kind.slug(),
            if params.is_empty() { "-" } else { &params },
            kind.formula(),
            "yes",
            catalog_note(kind)
        );
    }
    s
}

fn build_spec(args: &MassArgs, grid: &GridArgs) -> anyhow::Result<MassSpec> {
    let kind = match (&args.mass, &args.profile) {
        (Some(name), _) => MassKind::from_slug(name)
            .with_context(|| format!("unknown mass kind {name:?} (see `gho catalog`)"))?,
        (None, Some(_)) => MassKind::Custom,
        (None, None) => MassKind::Constant,
    };
    let spec = if kind == MassKind::Custom {
        let path = args
            .profile
            .as_ref()
            .context("--mass custom requires --profile <csv>")?;
        if args.a.is_some() || args.q.is_some() {
            bail!("custom masses take no --a/--q");
        }
        let table = SampledProfile::from_csv_path(path)
            .with_context(|| format!("reading profile {}", path.display()))?;
        MassSpec::custom_table(table)?
    } else {
        if args.profile.is_some() {
            bail!("--profile is only valid with --mass custom");
        }
        let mut params = Vec::new();
        if let Some(a) = args.a {
            params.push(("a", a));
        }
        if let Some(q) = args.q {
            params.push(("q", q));
        }
        MassSpec::new(kind, &params, None, None)?
    };
    widen_domain(spec, grid)
}

/// Stretches a catalog domain so that explicit --xlo/--xhi fit, keeping
/// the open flags.
fn widen_domain(spec: MassSpec, grid: &GridArgs) -> anyhow::Result<MassSpec> {
    let d = spec.domain();
    let lo = grid.xlo.map_or(d.lo, |x| x.min(d.lo));
    let hi = grid.xhi.map_or(d.hi, |x| x.max(d.hi));
    if !spec.is_catalog() || (lo == d.lo && hi == d.hi) {
        return Ok(spec);
    }
    Ok(spec.with_domain(Domain { lo, hi, ..d })?)
}

fn grid_policy(args: &GridArgs) -> anyhow::Result<GridPolicy> {
    Ok(match (args.xlo, args.xhi) {
        (Some(lo), Some(hi)) => GridPolicy::Fixed(Grid::new(lo, hi, args.grid_n)?),
        (None, None) => GridPolicy::Auto {
            points: args.grid_n,
        },
        _ => bail!("--xlo and --xhi must be given together"),
    })
}

fn parse_levels(s: &str) -> anyhow::Result<Vec<usize>> {
    let items: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .with_context(|| format!("--n expects non-negative integers, got {t:?}"))
        })
        .collect::<anyhow::Result<_>>()?;
    let levels = match items.as_slice() {
        [] => bail!("--n is empty"),
        [k] if !s.contains(',') => (0..*k).collect(),
        _ => items,
    };
    if let Some(&n) = levels.iter().find(|&&n| n > MAX_HERMITE_DEGREE) {
        bail!("quantum number {n} exceeds the maximum degree {MAX_HERMITE_DEGREE}");
    }
    Ok(levels)
}

fn parse_z(s: &str) -> anyhow::Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .with_context(|| format!("--z expects re,im with finite numbers, got {s:?}"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("--z expects re,im, got {s:?}"),
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn curves_csv(spec: &MassSpec, grid_args: &GridArgs, levels: &[usize]) -> anyhow::Result<String> {
    let mumap = MuMap::new(spec, None)?;
    let rc = mumap.classify();
    let grid = resolve_grid(&mumap, grid_policy(grid_args)?)?;
    let ordering = gho_ordering();
    let samples = GridSamples::new(&mumap, grid)?;
    let top = levels.iter().copied().max().unwrap_or(0);
    let states = samples.eigenfunctions(rc, top)?;
    if !rc.admits_orthonormal_family() {
        eprintln!("note: {rc} μ-range, eigenfunctions are formal");
    }

    let mut out = String::from("x,m,mu,V,V_eff");
    for n in levels {
        let _ = write!(out, ",psi_{n}");
    }
    out.push('\n');
    for (i, x) in grid.points().enumerate() {
        let cells = [
            x,
            spec.mass(x)?,
            mumap.mu(x)?,
            base_potential(&mumap, x)?,
            effective_potential(&mumap, &ordering, x)?,
        ];
        let row: Vec<String> = cells
            .into_iter()
            .chain(levels.iter().map(|&n| states[n].values[i].re))
            .map(fmt_f)
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct Moments {
    mean_mu: f64,
    mean_mu_sq: f64,
    mean_pi: f64,
    mean_pi_sq: f64,
    delta_mu: f64,
    delta_pi: f64,
}

impl From<QuadratureMoments> for Moments {
    fn from(q: QuadratureMoments) -> Self {
        Moments {
            mean_mu: q.mean_mu,
            mean_mu_sq: q.mean_mu_sq,
            mean_pi: q.mean_pi,
            mean_pi_sq: q.mean_pi_sq,
            delta_mu: q.delta_mu(),
            delta_pi: q.delta_pi(),
        }
    }
}

#[derive(Serialize)]
struct CoherentReport {
    mass_id: String,
    z_re: f64,
    z_im: f64,
    truncation: usize,
    retained_weight: f64,
    closed_form: Moments,
    quadrature: Moments,
    /// Interior ‖(A - z)psi_z‖ / ‖psi_z‖.
    eigen_residual: f64,
}

fn coherent_outputs(
    spec: &MassSpec,
    grid_args: &GridArgs,
    z: Complex64,
    tail_tol: f64,
) -> anyhow::Result<(String, String)> {
    let mumap = MuMap::new(spec, None)?;
    let rc = mumap.classify();
    if rc != RangeClass::FullLine {
        bail!(
            "coherent states need a full-line μ-range, {} has a {rc} range",
            spec.id()
        );
    }
    let grid = resolve_grid(&mumap, grid_policy(grid_args)?)?;
    let cs = CoherentState::new(z, tail_tol)?;
    let psi = coherent_wavefunction(&mumap, rc, &cs, grid)?;
    let ops = LadderOps::new(&mumap, grid)?;

    let a_psi = ops.lower(&psi)?;
    let eigen_residual = a_psi.minus_scaled(z, &psi).interior_norm(2) / psi.interior_norm(2);
    let (mean_mu, mean_mu_sq) = expectation_mu(&cs);
    let (mean_pi, mean_pi_sq) = expectation_pi(&cs);
    let (delta_mu, delta_pi) = uncertainties(&cs);
    let report = CoherentReport {
        mass_id: spec.id(),
        z_re: z.re,
        z_im: z.im,
        truncation: cs.truncation(),
        retained_weight: cs.retained_weight(),
        closed_form: Moments {
            mean_mu,
            mean_mu_sq,
            mean_pi,
            mean_pi_sq,
            delta_mu,
            delta_pi,
        },
        quadrature: quadrature_moments(&ops, &psi)?.into(),
        eigen_residual,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');

    let mut csv = String::from("x,re_psi,im_psi,abs2_psi\n");
    for (x, v) in grid.points().zip(&psi.values) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f(x),
            fmt_f(v.re),
            fmt_f(v.im),
            fmt_f(v.norm_sqr())
        );
    }
    Ok((csv, json))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
