//! Command-line front end. Every subcommand writes plain CSV/JSON files and a
//! `manifest.json` echoing the resolved configuration.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::density::{
    default_grid, laughlin_surface, peak_ratio_analytic, peak_ratio_empirical, sfactor_scan,
    DensityProfile,
};
use crate::error::{Error, Result};
use crate::geometry::{DeformedGeometry, SurfaceKind, SurfaceSpec};
use crate::laughlin::expand;
use crate::orbitals::EvolutionMode;
use crate::quadrature::QuadratureConfig;

pub const TOOL_NAME: &str = "toric-lll";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "toric-lll", version, about = "Lowest Landau level states on deformed toric surfaces")]
pub struct Cli {
    /// `key=value` file supplying defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potentials, metric and curvature on a grid, one CSV per s.
    Geometry(Flags),
    /// Exact Slater expansion of a Laughlin state as JSON.
    LaughlinExpand(Flags),
    /// Density profiles, peak ratios and masses.
    Density(Flags),
    /// Bunched-vs-uniform S-factor log ratios over a range of N_e.
    Sfactor(Flags),
}

/// Flags shared by every subcommand; each may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub surface: Option<String>,
    /// Orbital count N (sphere polytope length) for `geometry`.
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub particles: Option<u32>,
    #[arg(long)]
    pub inverse_filling: Option<u32>,
    /// Comma-separated deformation times.
    #[arg(long)]
    pub s_list: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// gcst, prequantum or both.
    #[arg(long)]
    pub evolution: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub ne_from: Option<u32>,
    #[arg(long)]
    pub ne_to: Option<u32>,
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub surface: SurfaceKind,
    pub degree: u32,
    pub particles: u32,
    pub inverse_filling: u32,
    pub s_list: Vec<f64>,
    pub grid_points: usize,
    pub evolution: Vec<EvolutionMode>,
    pub out_dir: PathBuf,
    pub rel_tol: f64,
    pub ne_from: u32,
    pub ne_to: u32,
}

/// Parses `key=value` lines; `#` starts a comment. Keys use the long flag
/// names with either `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_s_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad s value `{t}`")))
        })
        .collect()
}

fn parse_modes(text: &str) -> Result<Vec<EvolutionMode>> {
    match text.trim() {
        "both" => Ok(vec![EvolutionMode::Gcst, EvolutionMode::Prequantum]),
        other => other.split(',').map(str::parse).collect(),
    }
}

impl RunConfig {
    pub fn resolve(flags: &Flags, file: &BTreeMap<String, String>) -> Result<Self> {
        fn pick<T: std::str::FromStr>(
            flag: Option<T>,
            file: &BTreeMap<String, String>,
            key: &str,
        ) -> Result<Option<T>> {
            if flag.is_some() {
                return Ok(flag);
            }
            file.get(key)
                .map(|v| {
                    v.parse::<T>()
                        .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
                })
                .transpose()
        }

        let known = [
            "surface", "degree", "particles", "inverse-filling", "s-list", "grid-points",
            "evolution", "out-dir", "rel-tol", "ne-from", "ne-to",
        ];
        if let Some(k) = file.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown config key `{k}`")));
        }

        let surface: SurfaceKind = pick(flags.surface.clone(), file, "surface")?
            .unwrap_or_else(|| "sphere".into())
            .parse()?;
        let particles = pick(flags.particles, file, "particles")?.unwrap_or(2);
        let inverse_filling = pick(flags.inverse_filling, file, "inverse-filling")?.unwrap_or(3);
        let degree = pick(flags.degree, file, "degree")?.unwrap_or(4);
        let s_list = parse_s_list(&pick(flags.s_list.clone(), file, "s-list")?.unwrap_or_else(|| "0".into()))?;
        let grid_points = pick(flags.grid_points, file, "grid-points")?.unwrap_or(1024);
        let evolution = parse_modes(&pick(flags.evolution.clone(), file, "evolution")?.unwrap_or_else(|| "gcst".into()))?;
        let out_dir = pick(flags.out_dir.clone(), file, "out-dir")?.unwrap_or_else(|| PathBuf::from("."));
        let rel_tol = pick(flags.rel_tol, file, "rel-tol")?.unwrap_or(QuadratureConfig::default().rel_tol);
        let ne_from = pick(flags.ne_from, file, "ne-from")?.unwrap_or(2);
        let ne_to = pick(flags.ne_to, file, "ne-to")?.unwrap_or(40);

        let cfg = RunConfig {
            surface,
            degree,
            particles,
            inverse_filling,
            s_list,
            grid_points,
            evolution,
            out_dir,
            rel_tol,
            ne_from,
            ne_to,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.s_list.is_empty() {
            return Err(Error::Config("s-list must not be empty".into()));
        }
        if let Some(s) = self.s_list.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Config(format!("s values must be non-negative, got {s}")));
        }
        if self.grid_points < 16 {
            return Err(Error::Config("grid-points must be at least 16".into()));
        }
        if self.evolution.is_empty() {
            return Err(Error::Config("no evolution mode selected".into()));
        }
        if self.particles == 0 || self.degree == 0 {
            return Err(Error::Config("particles and degree must be positive".into()));
        }
        if self.ne_from < 2 || self.ne_from > self.ne_to || self.ne_to > 40 {
            return Err(Error::Config("N_e range must satisfy 2 <= ne-from <= ne-to <= 40".into()));
        }
        self.quadrature().validate()
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            ..QuadratureConfig::default()
        }
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `s` rendered for file names, e.g. `0`, `2.5`, `100`.
pub fn s_label(s: f64) -> String {
    format!("{s}")
}

struct Output {
    dir: PathBuf,
    files: Vec<Value>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str, meta: Value) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        let mut entry = json!({ "file": name });
        if let (Value::Object(e), Value::Object(m)) = (&mut entry, meta) {
            e.extend(m);
        }
        self.files.push(entry);
        Ok(())
    }

    fn finish(self, command: &str, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
        let manifest = json!({
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": command,
            "config": cfg,
            "files": self.files,
        });
        fs::write(
            self.dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        let mut paths: Vec<PathBuf> = self
            .files
            .iter()
            .filter_map(|f| f["file"].as_str().map(|n| self.dir.join(n)))
            .collect();
        paths.push(self.dir.join("manifest.json"));
        Ok(paths)
    }
}

pub fn cmd_geometry(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let surface = SurfaceSpec::new(cfg.surface, cfg.degree)?;
    let mut grid = default_grid(&surface, cfg.degree - 1, cfg.grid_points);
    // half-integers too, so closed-form spot values such as x = 1/2 appear
    let top = grid.last().copied().unwrap_or(0.0);
    grid.extend((0..).map(|k| f64::from(k) + 0.5).take_while(|&x| x < top).filter(|&x| surface.is_interior(x)));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut out = Output::new(&cfg.out_dir)?;
    for &s in &cfg.s_list {
        let geom = DeformedGeometry::new(surface, s)?;
        let mut csv = String::from("x,g_s,y_s,kappa_s,gpp,Sc\n");
        for &x in &grid {
            let row = [
                x,
                geom.potential(x)?,
                geom.moment_to_log(x)?,
                geom.kahler_potential(x)?,
                geom.metric_coeff(x)?,
                geom.scalar_curvature(x)?,
            ];
            csv.push_str(&row.map(fmt_num).join(","));
            csv.push('\n');
        }
        let name = format!("geometry_s{}.csv", s_label(s));
        out.write(&name, &csv, json!({ "s": s, "rows": grid.len() }))?;
    }
    out.finish("geometry", cfg)
}

pub fn cmd_laughlin_expand(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let exp = expand(cfg.particles, cfg.inverse_filling)?;
    let mut out = Output::new(&cfg.out_dir)?;
    let name = format!("laughlin_Ne{}_m{}.json", cfg.particles, cfg.inverse_filling);
    let text = serde_json::to_string_pretty(&exp.to_json())? + "\n";
    out.write(&name, &text, json!({ "terms": exp.len() }))?;
    out.finish("laughlin-expand", cfg)
}

pub fn cmd_density(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let exp = expand(cfg.particles, cfg.inverse_filling)?;
    let surface = laughlin_surface(cfg.surface, cfg.particles, cfg.inverse_filling)?;
    let grid = default_grid(&surface, exp.max_level(), cfg.grid_points);
    let quad = cfg.quadrature();
    let mut out = Output::new(&cfg.out_dir)?;

    let mut analytic = Vec::new();
    let mut pairs = Vec::new();
    for p in 0..exp.max_level() {
        if let Ok(r) = peak_ratio_analytic(&exp, &surface, p, p + 1) {
            if r > 0.0 {
                analytic.push(json!({ "p": p, "q": p + 1, "ratio": r }));
                pairs.push((p, p + 1));
            }
        }
    }

    let mut empirical = Vec::new();
    for &s in &cfg.s_list {
        let geom = DeformedGeometry::new(surface, s)?;
        for &mode in &cfg.evolution {
            let profile = DensityProfile::new(&exp, &geom, mode, &quad)?;
            let curve = profile.curve(&grid)?;
            let name = format!(
                "density_{}_Ne{}_{}_s{}.csv",
                cfg.surface.name(),
                cfg.particles,
                mode.name(),
                s_label(s)
            );
            let meta = json!({
                "s": s,
                "mode": mode.name(),
                "particles": cfg.particles,
                "orbital_count": surface.orbital_count,
                "trapezoid_mass": curve.trapezoid_mass(),
                "quadrature_mass": profile.mass(&quad)?,
            });
            out.write(&name, &curve.to_csv(), meta)?;
            for &(p, q) in &pairs {
                empirical.push(json!({
                    "s": s,
                    "mode": mode.name(),
                    "p": p,
                    "q": q,
                    "ratio": peak_ratio_empirical(&curve, p, q)?,
                }));
            }
        }
    }

    let ratios = json!({
        "surface": cfg.surface.name(),
        "particles": cfg.particles,
        "inverse_filling": cfg.inverse_filling,
        "orbital_count": surface.orbital_count,
        "analytic": analytic,
        "empirical": empirical,
    });
    out.write(
        "ratios.json",
        &(serde_json::to_string_pretty(&ratios)? + "\n"),
        json!({}),
    )?;
    out.finish("density", cfg)
}

pub fn cmd_sfactor(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let rows = sfactor_scan(cfg.surface, cfg.ne_from..=cfg.ne_to, cfg.inverse_filling)?;
    let mut csv = String::from("N_e,log_ratio\n");
    for r in &rows {
        csv.push_str(&format!("{},{}\n", r.particles, fmt_num(r.log_ratio)));
    }
    let mut out = Output::new(&cfg.out_dir)?;
    let name = format!("sfactor_{}.csv", cfg.surface.name());
    out.write(&name, &csv, json!({ "rows": rows.len() }))?;
    out.finish("sfactor", cfg)
}

/// Parses arguments, resolves configuration and runs the subcommand.
/// Returns the paths written.
pub fn run<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    execute(&cli)
}

type CommandFn = fn(&RunConfig) -> Result<Vec<PathBuf>>;

pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let file = match &cli.config {
        Some(path) => parse_config_file(&fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let (flags, f): (&Flags, CommandFn) = match &cli.command {
        Command::Geometry(fl) => (fl, cmd_geometry),
        Command::LaughlinExpand(fl) => (fl, cmd_laughlin_expand),
        Command::Density(fl) => (fl, cmd_density),
        Command::Sfactor(fl) => (fl, cmd_sfactor),
    };
    f(&RunConfig::resolve(flags, &file)?)
}
