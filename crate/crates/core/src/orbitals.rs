//! One-particle lowest-Landau-level orbitals.
//!
//! The orbital `σ_s^m = w_s^m σ_{P,s} ⊗ √dz_s` is represented only through
//! its pointwise squared norm
//!
//! ```text
//! h_s^m(x) = exp(2m·y_s(x) − 2κ_s(x)) · g_s''(x)
//! ```
//!
//! which does not depend on the angle. The angular integral contributes an
//! exact factor `2π` to every L² norm.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DeformedGeometry, PolytopePoint, SurfaceKind, SurfaceSpec};
use crate::quadrature::{integrate_log_sites, Domain, Offset, QuadratureConfig, Site};

/// Integer point of the polytope labelling an orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrbitalIndex(pub u32);

impl OrbitalIndex {
    pub fn level(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl From<u32> for OrbitalIndex {
    fn from(m: u32) -> Self {
        OrbitalIndex(m)
    }
}

/// How states at `s = 0` are carried to the deformed geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    /// Generalized coherent state transform: `σ_0^m ↦ e^{−s m²/2} σ_s^m`.
    Gcst,
    /// Prequantum evolution alone: `σ_0^m ↦ σ_s^m`.
    Prequantum,
}

impl EvolutionMode {
    pub fn name(self) -> &'static str {
        match self {
            EvolutionMode::Gcst => "gcst",
            EvolutionMode::Prequantum => "prequantum",
        }
    }
}

impl std::str::FromStr for EvolutionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gcst" => Ok(EvolutionMode::Gcst),
            "prequantum" | "pre" => Ok(EvolutionMode::Prequantum),
            other => Err(Error::Config(format!("unknown evolution mode `{other}`"))),
        }
    }
}

fn check_level(geom: &DeformedGeometry, m: OrbitalIndex) -> Result<()> {
    if geom.surface.has_level(m.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "orbital {} is outside 0..{} on the {}",
            m.0,
            geom.surface.orbital_count,
            geom.surface.kind.name()
        )))
    }
}

/// `log h_s^m(x)`.
pub fn orbital_density_log(geom: &DeformedGeometry, m: OrbitalIndex, x: f64) -> Result<f64> {
    Ok(orbital_density_log_at(geom, m, &geom.surface.point(x)?))
}

pub fn orbital_density_log_at(geom: &DeformedGeometry, m: OrbitalIndex, p: &PolytopePoint) -> f64 {
    let y = geom.moment_to_log_at(p);
    let kappa = geom.kahler_potential_at(p);
    let gpp = geom.metric_coeff_at(p);
    2.0 * m.as_f64() * y - 2.0 * kappa + gpp.ln()
}

/// Polytope point of a quadrature node, keeping facet offsets exact.
pub(crate) fn site_point(surface: &SurfaceSpec, site: Site) -> Result<PolytopePoint> {
    match site.offset {
        Offset::Interior => surface.point(site.x),
        Offset::FromLower(d) => surface.point_from_lower(d),
        Offset::FromUpper(d) => surface.point_from_upper(d),
    }
}

/// Breakpoints bracketing the Gaussian bump of orbital `m`, whose width is
/// about `1/√(2s)`.
fn peak_breaks(geom: &DeformedGeometry, m: OrbitalIndex) -> Vec<f64> {
    let width = if geom.s > 0.0 {
        (1.0 / (2.0 * geom.s).sqrt()).min(0.5)
    } else {
        0.5
    };
    (-8..=8)
        .map(|k| m.as_f64() + f64::from(k) * width)
        .collect()
}

pub(crate) fn domain_of(surface: &SurfaceSpec) -> Domain {
    match (surface.kind, surface.upper()) {
        (SurfaceKind::Sphere, Some(b)) => Domain::Interval(surface.lower(), b),
        _ => Domain::HalfLine(surface.lower()),
    }
}

/// `log ‖σ_s^m‖²_{L²} = log 2π + log ∫_P h_s^m dx`.
pub fn orbital_norm_log(geom: &DeformedGeometry, m: OrbitalIndex, cfg: &QuadratureConfig) -> Result<f64> {
    check_level(geom, m)?;
    let breaks = peak_breaks(geom, m);
    let integrand = |site: Site| {
        site_point(&geom.surface, site).map_or(f64::NAN, |p| orbital_density_log_at(geom, m, &p))
    };
    let log_int = integrate_log_sites(integrand, domain_of(&geom.surface), &breaks, cfg)?;
    Ok((2.0 * PI).ln() + log_int)
}

/// Log of the amplitude multiplying `σ_s^m` in the image of `σ_0^m`.
pub fn evolution_log_amplitude(mode: EvolutionMode, m: OrbitalIndex, s: f64) -> f64 {
    match mode {
        EvolutionMode::Gcst => -0.5 * s * m.as_f64() * m.as_f64(),
        EvolutionMode::Prequantum => 0.0,
    }
}

/// `exp[(log‖σ^m‖² − s m²) − (log‖σ^n‖² − s n²)]`.
///
/// As `s → ∞` this tends to `exp(2g(m) − 2g(n))` with `g` the canonical
/// potential of the surface.
pub fn asymptotic_norm_ratio(
    geom: &DeformedGeometry,
    m: OrbitalIndex,
    n: OrbitalIndex,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if geom.s <= 0.0 {
        return Err(Error::Domain("asymptotic norm ratio needs s > 0".into()));
    }
    if m == n {
        check_level(geom, m)?;
        return Ok(1.0);
    }
    let damped = |k: OrbitalIndex| -> Result<f64> {
        Ok(orbital_norm_log(geom, k, cfg)? - geom.s * k.as_f64() * k.as_f64())
    };
    Ok((damped(m)? - damped(n)?).exp())
}

/// L² norms of the orbitals `0..levels` for one geometry, computed once.
#[derive(Debug, Clone)]
pub struct OrbitalNormTable {
    geom: DeformedGeometry,
    log_norms: Vec<f64>,
}

impl OrbitalNormTable {
    pub fn build(geom: DeformedGeometry, levels: u32, cfg: &QuadratureConfig) -> Result<Self> {
        let log_norms = (0..levels)
            .into_par_iter()
            .map(|m| orbital_norm_log(&geom, OrbitalIndex(m), cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitalNormTable { geom, log_norms })
    }

    pub fn geometry(&self) -> &DeformedGeometry {
        &self.geom
    }

    pub fn levels(&self) -> u32 {
        self.log_norms.len() as u32
    }

    pub fn log_norm(&self, m: OrbitalIndex) -> Result<f64> {
        self.log_norms
            .get(m.0 as usize)
            .copied()
            .ok_or_else(|| Error::Domain(format!("orbital {} not in norm table", m.0)))
    }

    /// `log(2π h_s^m(x) / ‖σ_s^m‖²)`; integrates to one over the polytope.
    pub fn normalized_density_log(&self, m: OrbitalIndex, x: f64) -> Result<f64> {
        self.normalized_density_log_at(m, &self.geom.surface.point(x)?)
    }

    pub fn normalized_density_log_at(&self, m: OrbitalIndex, p: &PolytopePoint) -> Result<f64> {
        Ok((2.0 * PI).ln() + orbital_density_log_at(&self.geom, m, p) - self.log_norm(m)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SurfaceSpec;

    fn geom(kind: SurfaceKind, n: u32, s: f64) -> DeformedGeometry {
        DeformedGeometry::new(SurfaceSpec::new(kind, n).unwrap(), s).unwrap()
    }

    #[test]
    fn plane_origin_density_is_one() {
        let g = geom(SurfaceKind::Plane, 4, 0.0);
        assert_eq!(orbital_density_log(&g, OrbitalIndex(0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sphere_density_mirror_symmetry() {
        let g = geom(SurfaceKind::Sphere, 4, 0.0);
        for m in 0..4 {
            for x in [-0.4, 0.1, 1.0, 2.7, 3.45] {
                let a = orbital_density_log(&g, OrbitalIndex(m), x).unwrap();
                let b = orbital_density_log(&g, OrbitalIndex(3 - m), 3.0 - x).unwrap();
                assert!((a - b).abs() < 1e-12, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn sphere_density_reduces_to_beta_kernel() {
        // h_0^m = (N/2) u^{m-1/2} (N-u)^{N-m-3/2},  u = x + 1/2
        let n: f64 = 4.0;
        let g = geom(SurfaceKind::Sphere, 4, 0.0);
        let (m, x) = (1.0, 2.0);
        let u: f64 = x + 0.5;
        let expected = (n / 2.0).ln() + (m - 0.5) * u.ln() + (n - m - 1.5) * (n - u).ln();
        let got = orbital_density_log(&g, OrbitalIndex(1), x).unwrap();
        assert!((got - expected).abs() < 1e-13);
    }

    #[test]
    fn evolution_amplitudes() {
        assert_eq!(evolution_log_amplitude(EvolutionMode::Gcst, OrbitalIndex(3), 2.0), -9.0);
        assert_eq!(evolution_log_amplitude(EvolutionMode::Gcst, OrbitalIndex(0), 7.0), 0.0);
        assert_eq!(evolution_log_amplitude(EvolutionMode::Prequantum, OrbitalIndex(5), 7.0), 0.0);
    }

    #[test]
    fn invalid_levels_are_rejected() {
        let cfg = QuadratureConfig::default();
        let g = geom(SurfaceKind::Sphere, 4, 1.0);
        assert!(orbital_norm_log(&g, OrbitalIndex(4), &cfg).is_err());
        assert!(asymptotic_norm_ratio(&geom(SurfaceKind::Plane, 4, 0.0), OrbitalIndex(0), OrbitalIndex(1), &cfg).is_err());
    }

    #[test]
    fn equal_levels_give_unit_ratio() {
        let cfg = QuadratureConfig::default();
        let g = geom(SurfaceKind::Plane, 4, 3.0);
        assert_eq!(asymptotic_norm_ratio(&g, OrbitalIndex(2), OrbitalIndex(2), &cfg).unwrap(), 1.0);
    }

    #[test]
    fn norms_are_finite_across_deformations() {
        let cfg = QuadratureConfig::default();
        for kind in [SurfaceKind::Sphere, SurfaceKind::Plane] {
            for s in [0.0, 0.3, 10.0, 100.0, 1000.0] {
                let table = OrbitalNormTable::build(geom(kind, 7, s), 7, &cfg).unwrap();
                for m in 0..7 {
                    assert!(table.log_norm(OrbitalIndex(m)).unwrap().is_finite());
                }
            }
        }
    }
}
