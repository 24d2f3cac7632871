//! Many-body densities of Slater combinations.
//!
//! Slater determinants with distinct level sets are orthogonal, so the
//! density of `Σ_λ a_λ Ψ_s^λ` is a weighted mixture of one-particle
//! densities:
//!
//! ```text
//! ρ_s(x) = Σ_λ w_λ Σ_j 2π h_s^{λ_j}(x) / ‖σ_s^{λ_j}‖²  /  Σ_λ w_λ
//! w_λ    = |a_λ|² e^{−s Σ λ_i²} ∏_i ‖σ_s^{λ_i}‖²        (GCST)
//! ```
//!
//! The prequantum weights drop the damping factor. Each orbital term
//! integrates to one, so `∫ρ dx = N_e`. All λ-sums are taken in log space
//! with a single shift.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DeformedGeometry, SurfaceKind, SurfaceSpec};
use crate::laughlin::{LaughlinExpansion, SlaterIndex};
use crate::geometry::PolytopePoint;
use crate::orbitals::{domain_of, site_point, EvolutionMode, OrbitalIndex, OrbitalNormTable};
use crate::quadrature::{integrate_log_sites, log_sum_exp, QuadratureConfig, Site};

/// Natural log of `|c|`, valid far beyond the `f64` range of `c` itself.
pub fn log_abs(c: &BigInt) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits < 1000 {
        c.abs().to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 64;
        let top = (c.abs() >> shift).to_f64().expect("64-bit prefix");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Per-λ log-weights of an evolved state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightLedger {
    pub surface: SurfaceSpec,
    pub s: f64,
    pub mode: EvolutionMode,
    pub entries: Vec<LedgerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub lambda: SlaterIndex,
    pub log_weight: f64,
}

impl WeightLedger {
    pub fn log_weight(&self, idx: &SlaterIndex) -> Option<f64> {
        self.entries.iter().find(|e| &e.lambda == idx).map(|e| e.log_weight)
    }

    /// Expected occupation of every level, `Σ_{λ∋p} w_λ / Σ_λ w_λ`.
    pub fn occupations(&self) -> BTreeMap<u32, f64> {
        occupations(self.entries.iter().map(|e| (&e.lambda, e.log_weight)))
    }
}

fn occupations<'a>(weights: impl Iterator<Item = (&'a SlaterIndex, f64)> + Clone) -> BTreeMap<u32, f64> {
    let logs: Vec<f64> = weights.clone().map(|(_, w)| w).collect();
    let total = log_sum_exp(&logs);
    let mut occ = BTreeMap::new();
    for (idx, w) in weights {
        let share = (w - total).exp();
        for &l in idx.levels() {
            *occ.entry(l).or_insert(0.0) += share;
        }
    }
    occ
}

fn check_levels(exp: &LaughlinExpansion, surface: &SurfaceSpec) -> Result<()> {
    let top = exp.max_level();
    if surface.has_level(top) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "level {top} is not an orbital of the {} with N = {}",
            surface.kind.name(),
            surface.orbital_count
        )))
    }
}

/// Assembles the ledger from precomputed orbital norms.
pub fn ledger_from_norms(
    exp: &LaughlinExpansion,
    norms: &OrbitalNormTable,
    mode: EvolutionMode,
) -> Result<WeightLedger> {
    let geom = *norms.geometry();
    check_levels(exp, &geom.surface)?;
    let mut entries = Vec::with_capacity(exp.len());
    for (idx, a) in exp.terms() {
        let mut w = 2.0 * log_abs(a);
        if mode == EvolutionMode::Gcst {
            w -= geom.s * idx.square_sum() as f64;
        }
        for &l in idx.levels() {
            w += norms.log_norm(OrbitalIndex(l))?;
        }
        if !w.is_finite() {
            return Err(Error::Domain(format!("weight of {idx} is not finite")));
        }
        entries.push(LedgerEntry { lambda: idx.clone(), log_weight: w });
    }
    Ok(WeightLedger {
        surface: geom.surface,
        s: geom.s,
        mode,
        entries,
    })
}

pub fn slater_weights(
    exp: &LaughlinExpansion,
    geom: &DeformedGeometry,
    mode: EvolutionMode,
    cfg: &QuadratureConfig,
) -> Result<WeightLedger> {
    check_levels(exp, &geom.surface)?;
    let norms = OrbitalNormTable::build(*geom, exp.max_level() + 1, cfg)?;
    ledger_from_norms(exp, &norms, mode)
}

/// A density `ρ_s` that can be evaluated anywhere in the polytope.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    norms: OrbitalNormTable,
    ledger: WeightLedger,
    /// `(level, log occupation)`
    log_occupations: Vec<(OrbitalIndex, f64)>,
    particles: u32,
}

impl DensityProfile {
    pub fn new(
        exp: &LaughlinExpansion,
        geom: &DeformedGeometry,
        mode: EvolutionMode,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        check_levels(exp, &geom.surface)?;
        let norms = OrbitalNormTable::build(*geom, exp.max_level() + 1, cfg)?;
        let ledger = ledger_from_norms(exp, &norms, mode)?;
        let log_occupations = ledger
            .occupations()
            .into_iter()
            .filter(|(_, n)| *n > 0.0)
            .map(|(l, n)| (OrbitalIndex(l), n.ln()))
            .collect();
        Ok(DensityProfile {
            norms,
            ledger,
            log_occupations,
            particles: exp.particles(),
        })
    }

    pub fn geometry(&self) -> &DeformedGeometry {
        self.norms.geometry()
    }

    pub fn ledger(&self) -> &WeightLedger {
        &self.ledger
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn log_rho(&self, x: f64) -> Result<f64> {
        self.log_rho_at(&self.geometry().surface.point(x)?)
    }

    pub fn log_rho_at(&self, p: &PolytopePoint) -> Result<f64> {
        let terms = self
            .log_occupations
            .iter()
            .map(|&(m, ln_n)| Ok(ln_n + self.norms.normalized_density_log_at(m, p)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(log_sum_exp(&terms))
    }

    pub fn rho(&self, x: f64) -> Result<f64> {
        Ok(self.log_rho(x)?.exp())
    }

    fn log_rho_site(&self, site: Site) -> f64 {
        site_point(&self.geometry().surface, site)
            .and_then(|p| self.log_rho_at(&p))
            .unwrap_or(f64::NAN)
    }

    fn breaks(&self) -> Vec<f64> {
        let s = self.geometry().s;
        let width = if s > 0.0 { (1.0 / (2.0 * s).sqrt()).min(0.5) } else { 0.5 };
        self.log_occupations
            .iter()
            .flat_map(|(m, _)| (-6..=6).map(move |k| m.as_f64() + f64::from(k) * width))
            .collect()
    }

    /// `∫_P ρ dx` by adaptive quadrature.
    pub fn mass(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let domain = domain_of(&self.geometry().surface);
        let f = |site: Site| self.log_rho_site(site);
        Ok(integrate_log_sites(f, domain, &self.breaks(), cfg)?.exp())
    }

    /// `∫_P |ρ − ρ'| dx` for two profiles on the same surface.
    ///
    /// The error is controlled relative to the combined mass rather than to
    /// the distance itself, so nearly identical profiles do not chase
    /// cancellation noise: the integrand is padded with `ρ + ρ'` and the
    /// padding is subtracted afterwards.
    pub fn l1_distance(&self, other: &DensityProfile, cfg: &QuadratureConfig) -> Result<f64> {
        if self.geometry().surface != other.geometry().surface {
            return Err(Error::Domain("profiles live on different surfaces".into()));
        }
        let f = |site: Site| {
            let (a, b) = (self.log_rho_site(site).exp(), other.log_rho_site(site).exp());
            ((a - b).abs() + a + b).ln()
        };
        let mut breaks = self.breaks();
        breaks.extend(other.breaks());
        let domain = domain_of(&self.geometry().surface);
        let padded = integrate_log_sites(f, domain, &breaks, cfg)?.exp();
        let padding = self.mass(cfg)? + other.mass(cfg)?;
        Ok((padded - padding).max(0.0))
    }

    pub fn curve(&self, grid: &[f64]) -> Result<DensityCurve> {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Grid("grid must be strictly ascending".into()));
        }
        let rhos = grid
            .par_iter()
            .map(|&x| self.rho(x))
            .collect::<Result<Vec<_>>>()?;
        let geom = self.geometry();
        Ok(DensityCurve {
            xs: grid.to_vec(),
            rhos,
            surface: geom.surface,
            s: geom.s,
            mode: self.ledger.mode,
            particles: self.particles,
        })
    }
}

/// Samples of `ρ_s` on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub xs: Vec<f64>,
    pub rhos: Vec<f64>,
    pub surface: SurfaceSpec,
    pub s: f64,
    pub mode: EvolutionMode,
    pub particles: u32,
}

impl DensityCurve {
    pub fn trapezoid_mass(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.rhos.windows(2))
            .map(|(x, r)| 0.5 * (x[1] - x[0]) * (r[0] + r[1]))
            .sum()
    }

    /// `ρ` at a grid point that must be present exactly.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        self.xs
            .iter()
            .position(|&g| g == x)
            .map(|i| self.rhos[i])
            .ok_or_else(|| Error::Grid(format!("x = {x} is not a grid point")))
    }

    /// CSV with header `x,rho` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,rho\n");
        for (x, r) in self.xs.iter().zip(&self.rhos) {
            out.push_str(&format!("{x:.16e},{r:.16e}\n"));
        }
        out
    }
}

/// `ρ_s` sampled on `grid`.
pub fn density(
    exp: &LaughlinExpansion,
    geom: &DeformedGeometry,
    mode: EvolutionMode,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DensityCurve> {
    DensityProfile::new(exp, geom, mode, cfg)?.curve(grid)
}

/// Uniform interior grid with every integer point of the polytope merged in.
///
/// The plane grid stops at `2·(max_level + 1) + 10`, past which the density
/// of the first `max_level + 1` orbitals is negligible.
pub fn default_grid(surface: &SurfaceSpec, max_level: u32, points: usize) -> Vec<f64> {
    let lo = surface.lower();
    let hi = surface
        .upper()
        .unwrap_or(2.0 * f64::from(max_level + 1) + 10.0 + lo);
    let step = (hi - lo) / points as f64;
    let mut xs: Vec<f64> = (0..points).map(|i| lo + (i as f64 + 0.5) * step).collect();
    let top = match surface.upper() {
        Some(_) => surface.orbital_count - 1,
        None => hi.floor() as u32,
    };
    xs.extend((0..=top).map(f64::from));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn log_limit_weight(idx: &SlaterIndex, a: &BigInt, surface: &SurfaceSpec) -> Result<f64> {
    let mut w = 2.0 * log_abs(a);
    for &l in idx.levels() {
        w += 2.0 * surface.canonical_potential(f64::from(l))?;
    }
    Ok(w)
}

fn limit_log_weights(exp: &LaughlinExpansion, surface: &SurfaceSpec) -> Result<Vec<(SlaterIndex, f64)>> {
    check_levels(exp, surface)?;
    exp.terms()
        .map(|(idx, a)| Ok((idx.clone(), log_limit_weight(idx, a, surface)?)))
        .collect()
}

/// Weights of the `s → ∞` delta comb at each integer point; they sum to `N_e`.
pub fn limit_weights(exp: &LaughlinExpansion, surface: &SurfaceSpec) -> Result<BTreeMap<u32, f64>> {
    let logs = limit_log_weights(exp, surface)?;
    Ok(occupations(logs.iter().map(|(i, w)| (i, *w))))
}

/// Limiting ratio `R_{p,q}` of the delta-comb weights at `p` and `q`.
pub fn peak_ratio_analytic(exp: &LaughlinExpansion, surface: &SurfaceSpec, p: u32, q: u32) -> Result<f64> {
    let logs = limit_log_weights(exp, surface)?;
    let support = |level: u32| -> Vec<f64> {
        logs.iter()
            .filter(|(i, _)| i.contains(level))
            .map(|(_, w)| *w)
            .collect()
    };
    let den = support(q);
    if den.is_empty() {
        return Err(Error::EmptySupport(q));
    }
    if p == q {
        return Ok(1.0);
    }
    Ok((log_sum_exp(&support(p)) - log_sum_exp(&den)).exp())
}

/// `ρ(p)/ρ(q)` read off the curve at exact grid points.
pub fn peak_ratio_empirical(curve: &DensityCurve, p: u32, q: u32) -> Result<f64> {
    Ok(curve.value_at(f64::from(p))? / curve.value_at(f64::from(q))?)
}

/// The term with the largest `Σλ_i²`, ties resolved towards the
/// lexicographically smallest index.
pub fn dominant_slater(exp: &LaughlinExpansion) -> SlaterIndex {
    let mut best: Option<&SlaterIndex> = None;
    for (idx, _) in exp.terms() {
        if best.is_none_or(|b| idx.square_sum() > b.square_sum()) {
            best = Some(idx);
        }
    }
    best.expect("expansions are never empty").clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfactorRow {
    pub particles: u32,
    pub log_ratio: f64,
}

/// The surface used for `N_e` particles at filling `1/m`: `N = m(N_e − 1) + 1`.
pub fn laughlin_surface(kind: SurfaceKind, particles: u32, m: u32) -> Result<SurfaceSpec> {
    SurfaceSpec::new(kind, m * particles.saturating_sub(1) + 1)
}

fn sum_potential(surface: &SurfaceSpec, idx: &SlaterIndex) -> Result<f64> {
    idx.levels()
        .iter()
        .map(|&l| surface.canonical_potential(f64::from(l)))
        .sum()
}

/// `log(|a_{λ^M}|² S(λ^M) / |a_{λ^m}|² S(λ^m))` for each `N_e`, using
/// `|a_{λ^M}| = (2N_e − 1)!!` and `|a_{λ^m}| = 1`.
pub fn sfactor_scan(
    kind: SurfaceKind,
    particles: impl IntoIterator<Item = u32>,
    m: u32,
) -> Result<Vec<SfactorRow>> {
    particles
        .into_iter()
        .map(|ne| {
            if ne < 2 {
                return Err(Error::Domain("S-factor scan needs at least two particles".into()));
            }
            let surface = laughlin_surface(kind, ne, m)?;
            let log_df: f64 = (1..=ne).map(|i| f64::from(2 * i - 1).ln()).sum();
            let bunched = sum_potential(&surface, &SlaterIndex::maximally_bunched(ne))?;
            let uniform = sum_potential(&surface, &SlaterIndex::most_uniform(ne, m))?;
            Ok(SfactorRow {
                particles: ne,
                log_ratio: 2.0 * log_df + 2.0 * bunched - 2.0 * uniform,
            })
        })
        .collect()
}

/// Same quantity as [`sfactor_scan`] with the coefficients read from an
/// explicit expansion.
pub fn sfactor_from_expansion(exp: &LaughlinExpansion, kind: SurfaceKind) -> Result<f64> {
    let ne = exp.particles();
    let m = exp.inverse_filling();
    let surface = laughlin_surface(kind, ne, m)?;
    let weight = |idx: SlaterIndex| -> Result<f64> {
        let a = exp.coefficient(&idx);
        if a.is_zero() {
            return Err(Error::EmptySupport(idx.max_level()));
        }
        log_limit_weight(&idx, &a, &surface)
    };
    Ok(weight(SlaterIndex::maximally_bunched(ne))? - weight(SlaterIndex::most_uniform(ne, m))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laughlin::expand;
    use num_bigint::BigInt;

    fn idx(v: &[u32]) -> SlaterIndex {
        SlaterIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn log_abs_of_large_integers() {
        assert_eq!(log_abs(&BigInt::from(0)), f64::NEG_INFINITY);
        assert!((log_abs(&BigInt::from(-15)) - 15f64.ln()).abs() < 1e-15);
        let big = BigInt::from(3).pow(2000);
        assert!((log_abs(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dominant_terms() {
        assert_eq!(dominant_slater(&expand(2, 3).unwrap()), idx(&[0, 3]));
        assert_eq!(dominant_slater(&expand(3, 3).unwrap()), idx(&[0, 3, 6]));
        let single = LaughlinExpansion::filled(3).unwrap();
        assert_eq!(dominant_slater(&single), idx(&[0, 1, 2]));
    }

    #[test]
    fn analytic_ratios_match_reported_values() {
        let e2 = expand(2, 3).unwrap();
        let e3 = expand(3, 3).unwrap();
        let s2 = laughlin_surface(SurfaceKind::Sphere, 2, 3).unwrap();
        let s3 = laughlin_surface(SurfaceKind::Sphere, 3, 3).unwrap();
        let p = SurfaceSpec::plane(7).unwrap();
        let r = |e, s, a, b| peak_ratio_analytic(e, s, a, b).unwrap();
        assert!((r(&e2, &s2, 0, 1) - 1.08).abs() < 0.01);
        assert!((r(&e3, &s3, 0, 1) - 1.03).abs() < 0.01);
        assert!((r(&e3, &s3, 1, 2) - 1.01).abs() < 0.01);
        assert!((r(&e2, &p, 0, 1) - 0.35).abs() < 0.01);
        assert!((r(&e3, &p, 0, 1) - 0.81).abs() < 0.01);
        assert!((r(&e3, &p, 1, 2) - 0.50).abs() < 0.01);
        assert_eq!(r(&e3, &p, 4, 4), 1.0);
    }

    #[test]
    fn absent_level_has_empty_support() {
        let e2 = expand(2, 3).unwrap();
        let s = SurfaceSpec::sphere(6).unwrap();
        assert!(matches!(peak_ratio_analytic(&e2, &s, 0, 5), Err(Error::EmptySupport(5))));
        assert_eq!(peak_ratio_analytic(&e2, &s, 5, 0).unwrap(), 0.0);
    }

    #[test]
    fn limit_weights_sum_to_particle_number() {
        let e2 = expand(2, 3).unwrap();
        let w = limit_weights(&e2, &SurfaceSpec::sphere(4).unwrap()).unwrap();
        assert_eq!(w.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!((w.values().sum::<f64>() - 2.0).abs() < 1e-14);
        let w = limit_weights(&e2, &SurfaceSpec::plane(4).unwrap()).unwrap();
        assert!((w[&0] / w[&1] - 0.35).abs() < 0.01);
    }

    #[test]
    fn filled_state_limit_is_uniform() {
        let e = LaughlinExpansion::filled(4).unwrap();
        let w = limit_weights(&e, &SurfaceSpec::sphere(4).unwrap()).unwrap();
        assert!(w.values().all(|&v| v == 1.0), "{w:?}");
    }

    #[test]
    fn levels_outside_surface_are_rejected() {
        let e3 = expand(3, 3).unwrap();
        assert!(limit_weights(&e3, &SurfaceSpec::sphere(4).unwrap()).is_err());
    }

    #[test]
    fn grid_contains_integer_points() {
        let s = SurfaceSpec::sphere(4).unwrap();
        let g = default_grid(&s, 3, 64);
        for k in 0..4 {
            assert!(g.contains(&f64::from(k)));
        }
        assert!(g.iter().all(|&x| s.is_interior(x)));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let p = SurfaceSpec::plane(4).unwrap();
        let g = default_grid(&p, 3, 64);
        assert!(g.contains(&17.0) && g.iter().all(|&x| p.is_interior(x)));
    }

    #[test]
    fn empirical_ratio_requires_grid_points() {
        let curve = DensityCurve {
            xs: vec![0.0, 0.5, 1.0],
            rhos: vec![2.0, 1.0, 4.0],
            surface: SurfaceSpec::sphere(2).unwrap(),
            s: 0.0,
            mode: EvolutionMode::Gcst,
            particles: 1,
        };
        assert_eq!(peak_ratio_empirical(&curve, 0, 1).unwrap(), 0.5);
        assert!(matches!(peak_ratio_empirical(&curve, 0, 2), Err(Error::Grid(_))));
        assert_eq!(curve.to_csv().lines().next(), Some("x,rho"));
        assert_eq!(curve.to_csv().lines().nth(1), Some("0.0000000000000000e0,2.0000000000000000e0"));
    }
}
